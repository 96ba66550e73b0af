//! Max-parity games: the circle player ([`Player::Even`]) wins a play iff the
//! largest priority seen infinitely often is even. A player who cannot move
//! loses.

use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Player {
    /// Circle, the disjunctive player.
    Even,
    /// Box, the conjunctive player.
    Odd,
}

impl Player {
    pub fn opponent(self) -> Player {
        match self {
            Player::Even => Player::Odd,
            Player::Odd => Player::Even,
        }
    }

    pub fn of_priority(p: u32) -> Player {
        if p.is_multiple_of(2) { Player::Even } else { Player::Odd }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Game {
    pub owner: Vec<Player>,
    pub priority: Vec<u32>,
    pub succ: Vec<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Solution {
    pub winner: Vec<Player>,
    /// For each vertex won by its owner, a successor that keeps the win;
    /// `None` elsewhere.
    pub strategy: Vec<Option<usize>>,
}

impl Game {
    pub fn len(&self) -> usize {
        self.owner.len()
    }

    pub fn is_empty(&self) -> bool {
        self.owner.is_empty()
    }

    pub fn predecessors(&self) -> Vec<Vec<usize>> {
        let mut pred = vec![Vec::new(); self.len()];
        for (v, ws) in self.succ.iter().enumerate() {
            for &w in ws {
                pred[w].push(v);
            }
        }
        pred
    }

    /// The same game with dead ends routed to two self-looping sinks, one won
    /// by each player. Sinks are appended as vertices `n` (won by circle) and
    /// `n + 1` (won by box).
    pub fn with_sinks(&self) -> Game {
        let n = self.len();
        let mut g = self.clone();
        for v in 0..n {
            if g.succ[v].is_empty() {
                g.succ[v].push(match g.owner[v] {
                    Player::Even => n + 1,
                    Player::Odd => n,
                });
            }
        }
        g.owner.extend([Player::Even, Player::Even]);
        g.priority.extend([0, 1]);
        g.succ.push(vec![n]);
        g.succ.push(vec![n + 1]);
        g
    }
}

/// Solves the game with the recursive attractor decomposition.
pub fn solve(game: &Game) -> Solution {
    let n = game.len();
    let g = game.with_sinks();
    let pred = g.predecessors();
    let mut winner = vec![Player::Even; g.len()];
    let mut strategy = vec![None; g.len()];
    let all = vec![true; g.len()];
    zielonka(&g, &pred, all, &mut winner, &mut strategy);
    winner.truncate(n);
    strategy.truncate(n);
    for s in strategy.iter_mut() {
        if s.is_some_and(|w| w >= n) {
            *s = None;
        }
    }
    Solution { winner, strategy }
}

/// Attractor of `target` for `player` inside `alive`. Returns membership and
/// records attracting moves for `player` in `strategy`.
fn attractor(
    g: &Game,
    pred: &[Vec<usize>],
    alive: &[bool],
    target: &[bool],
    player: Player,
    strategy: &mut [Option<usize>],
) -> Vec<bool> {
    let mut inside = target.to_vec();
    let mut count: Vec<usize> = (0..g.len())
        .map(|v| if alive[v] { g.succ[v].iter().filter(|&&w| alive[w]).count() } else { 0 })
        .collect();
    let mut queue: VecDeque<usize> = (0..g.len()).filter(|&v| inside[v]).collect();
    while let Some(w) = queue.pop_front() {
        for &v in &pred[w] {
            if !alive[v] || inside[v] {
                continue;
            }
            if g.owner[v] == player {
                inside[v] = true;
                strategy[v] = Some(w);
                queue.push_back(v);
            } else {
                count[v] -= 1;
                if count[v] == 0 {
                    inside[v] = true;
                    queue.push_back(v);
                }
            }
        }
    }
    inside
}

fn zielonka(g: &Game, pred: &[Vec<usize>], alive: Vec<bool>, winner: &mut [Player], strategy: &mut [Option<usize>]) {
    let Some(p) = (0..g.len()).filter(|&v| alive[v]).map(|v| g.priority[v]).max() else {
        return;
    };
    let alpha = Player::of_priority(p);
    let top: Vec<bool> = (0..g.len()).map(|v| alive[v] && g.priority[v] == p).collect();
    let a = attractor(g, pred, &alive, &top, alpha, strategy);
    let rest: Vec<bool> = (0..g.len()).map(|v| alive[v] && !a[v]).collect();
    zielonka(g, pred, rest.clone(), winner, strategy);
    let lost: Vec<bool> = (0..g.len()).map(|v| rest[v] && winner[v] != alpha).collect();
    if !lost.iter().any(|&b| b) {
        for v in 0..g.len() {
            if !alive[v] {
                continue;
            }
            winner[v] = alpha;
            if top[v] && g.owner[v] == alpha {
                strategy[v] = g.succ[v].iter().copied().find(|&w| alive[w]);
            }
            if g.owner[v] != alpha {
                strategy[v] = None;
            }
        }
        return;
    }
    let b = attractor(g, pred, &alive, &lost, alpha.opponent(), strategy);
    for v in 0..g.len() {
        if b[v] {
            winner[v] = alpha.opponent();
            if g.owner[v] == alpha {
                strategy[v] = None;
            }
        }
    }
    let remaining: Vec<bool> = (0..g.len()).map(|v| alive[v] && !b[v]).collect();
    zielonka(g, pred, remaining, winner, strategy);
}

/// Winning regions by small progress measures. Independent of [`solve`] and
/// used to cross-check it.
pub fn solve_progress_measures(game: &Game) -> Vec<Player> {
    let n = game.len();
    let g = game.with_sinks();
    // Reversed priorities: the least priority seen infinitely often decides.
    let top = g.priority.iter().copied().max().unwrap_or(0);
    let top = top + top % 2;
    let prio: Vec<usize> = g.priority.iter().map(|&p| (top - p) as usize).collect();
    let d = prio.iter().copied().max().unwrap_or(0) + 1;
    let mut bound = vec![0u64; d];
    for &p in &prio {
        if p % 2 == 1 {
            bound[p] += 1;
        }
    }
    let pred = g.predecessors();
    let mut measure: Vec<Option<Vec<u64>>> = vec![Some(vec![0; d]); g.len()];
    let mut queue: VecDeque<usize> = (0..g.len()).collect();
    let mut queued = vec![true; g.len()];
    while let Some(v) = queue.pop_front() {
        queued[v] = false;
        let lifted = g.succ[v].iter().map(|&w| progress(&measure[w], prio[v], &bound));
        let best = match g.owner[v] {
            Player::Even => lifted.min_by(cmp_measure),
            Player::Odd => lifted.max_by(cmp_measure),
        }
        .expect("sinks remove dead ends");
        if cmp_measure(&best, &measure[v]) == core::cmp::Ordering::Greater {
            measure[v] = best;
            for &u in &pred[v] {
                if !queued[u] {
                    queued[u] = true;
                    queue.push_back(u);
                }
            }
        }
    }
    measure[..n]
        .iter()
        .map(|m| if m.is_some() { Player::Even } else { Player::Odd })
        .collect()
}

/// `None` is the top element.
fn cmp_measure(a: &Option<Vec<u64>>, b: &Option<Vec<u64>>) -> core::cmp::Ordering {
    match (a, b) {
        (None, None) => core::cmp::Ordering::Equal,
        (None, Some(_)) => core::cmp::Ordering::Greater,
        (Some(_), None) => core::cmp::Ordering::Less,
        (Some(x), Some(y)) => x.cmp(y),
    }
}

/// Least measure that is at least `m` on positions `0..=p`, strictly
/// greater there when `p` is odd.
fn progress(m: &Option<Vec<u64>>, p: usize, bound: &[u64]) -> Option<Vec<u64>> {
    let m = m.as_ref()?;
    let mut r = vec![0; m.len()];
    r[..=p].copy_from_slice(&m[..=p]);
    if p.is_multiple_of(2) {
        return Some(r);
    }
    let mut i = p;
    loop {
        if i % 2 == 1 && r[i] < bound[i] {
            r[i] += 1;
            return Some(r);
        }
        r[i] = 0;
        if i == 0 {
            return None;
        }
        i -= 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn game(owner: &[u8], priority: &[u32], succ: &[&[usize]]) -> Game {
        Game {
            owner: owner.iter().map(|&o| if o == 0 { Player::Even } else { Player::Odd }).collect(),
            priority: priority.to_vec(),
            succ: succ.iter().map(|s| s.to_vec()).collect(),
        }
    }

    #[test]
    fn stuck_player_loses() {
        let g = game(&[0, 1], &[0, 0], &[&[], &[]]);
        let s = solve(&g);
        assert_eq!(s.winner, vec![Player::Odd, Player::Even]);
        assert_eq!(solve_progress_measures(&g), s.winner);
        assert_eq!(s.strategy, vec![None, None]);
    }

    #[test]
    fn small_cycles() {
        // 0 (even, p2) <-> 1 (odd, p1) ; 2 (odd, p3) self loop, 0 may go to 2.
        let g = game(&[0, 1, 1], &[2, 1, 3], &[&[1, 2], &[0], &[2]]);
        let s = solve(&g);
        assert_eq!(s.winner, vec![Player::Even, Player::Even, Player::Odd]);
        assert_eq!(s.strategy[0], Some(1));
        assert_eq!(solve_progress_measures(&g), s.winner);
    }

    /// Positional strategies of circle suffice; box wins `v` against a fixed
    /// circle strategy iff it can reach a dead circle vertex or a cycle whose
    /// maximum priority is odd.
    fn brute_force(g: &Game) -> Vec<Player> {
        let n = g.len();
        let choices: Vec<Vec<Option<usize>>> = (0..n)
            .map(|v| match g.owner[v] {
                Player::Even if !g.succ[v].is_empty() => g.succ[v].iter().map(|&w| Some(w)).collect(),
                _ => vec![None],
            })
            .collect();
        let mut won = vec![false; n];
        let mut pick = vec![0usize; n];
        loop {
            let edges: Vec<Vec<usize>> = (0..n)
                .map(|v| match choices[v][pick[v]] {
                    Some(w) => vec![w],
                    None if g.owner[v] == Player::Odd => g.succ[v].clone(),
                    None => vec![],
                })
                .collect();
            let reach = |from: usize, allowed: &dyn Fn(usize) -> bool| {
                let mut seen = vec![false; n];
                let mut stack = vec![from];
                let mut out = vec![];
                while let Some(v) = stack.pop() {
                    for &w in &edges[v] {
                        if allowed(w) && !seen[w] {
                            seen[w] = true;
                            out.push(w);
                            stack.push(w);
                        }
                    }
                }
                seen
            };
            let bad: Vec<bool> = (0..n)
                .map(|u| {
                    let p = g.priority[u];
                    (g.owner[u] == Player::Even && edges[u].is_empty())
                        || (p % 2 == 1 && reach(u, &|w| g.priority[w] <= p)[u])
                })
                .collect();
            for v in 0..n {
                let r = reach(v, &|_| true);
                if !bad[v] && !(0..n).any(|u| r[u] && bad[u]) {
                    won[v] = true;
                }
            }
            let mut i = 0;
            while i < n {
                pick[i] += 1;
                if pick[i] < choices[i].len() {
                    break;
                }
                pick[i] = 0;
                i += 1;
            }
            if i == n {
                break;
            }
        }
        won.into_iter().map(|w| if w { Player::Even } else { Player::Odd }).collect()
    }

    fn arb_game() -> impl Strategy<Value = Game> {
        (1usize..=8).prop_flat_map(|n| {
            (
                proptest::collection::vec(any::<bool>(), n),
                proptest::collection::vec(0u32..=4, n),
                proptest::collection::vec(proptest::collection::vec(0..n, 0..=3), n),
            )
                .prop_map(|(owner, priority, mut succ)| {
                    for s in succ.iter_mut() {
                        s.sort();
                        s.dedup();
                    }
                    Game {
                        owner: owner.into_iter().map(|b| if b { Player::Odd } else { Player::Even }).collect(),
                        priority,
                        succ,
                    }
                })
        })
    }

    fn check_strategy(g: &Game, s: &Solution) {
        for v in 0..g.len() {
            if g.owner[v] == s.winner[v] && !g.succ[v].is_empty() {
                let w = s.strategy[v].expect("winner has a move");
                assert!(g.succ[v].contains(&w));
                assert_eq!(s.winner[w], s.winner[v]);
            } else if g.owner[v] != s.winner[v] {
                assert!(g.succ[v].iter().all(|&w| s.winner[w] == s.winner[v]));
            }
        }
    }

    proptest! {
        #[test]
        fn zielonka_matches_oracles(g in arb_game()) {
            let s = solve(&g);
            check_strategy(&g, &s);
            prop_assert_eq!(&s.winner, &brute_force(&g));
            prop_assert_eq!(&s.winner, &solve_progress_measures(&g));
        }
    }
}
