//! Normalisation of existential PBESs into clause form
//!
//! ```text
//! sigma_i X_i(d) = OR_k  exists e. phi_ik(d, e) && X_a1(f_1(d, e)) && ... && X_ap(f_p(d, e))
//! ```
//!
//! in three steps: rename binders apart, lift the existential quantifiers to
//! the top, and split the quantifier-free matrix into disjunctive normal form.

use alloc::boxed::Box;
use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::error::Error;
use crate::syntax::{self, DataExpr, Equation, Fixpoint, Param, Pbes, PredFormula};

/// Default cap on the number of clauses produced by [`dnf_split`].
pub const DEFAULT_DNF_CAP: usize = 10_000;

/// A predicate-variable call inside a clause, by equation index.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Call {
    pub target: usize,
    pub args: Vec<DataExpr>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Clause {
    /// Quantified variables `e`, restricted to those that occur.
    pub vars: Vec<Param>,
    /// The data constraint `phi_ik(d, e)`.
    pub guard: DataExpr,
    pub calls: Vec<Call>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ClauseEquation {
    pub fixpoint: Fixpoint,
    pub name: String,
    pub params: Vec<Param>,
    pub clauses: Vec<Clause>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ClausePbes {
    pub equations: Vec<ClauseEquation>,
}

impl ClausePbes {
    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.equations.iter().position(|eq| eq.name == name)
    }

    pub fn ranks(&self) -> Vec<u32> {
        syntax::ranks(self.equations.iter().map(|eq| eq.fixpoint))
    }

    /// Binders of the pair space of clause `(i, k)`: parameters then quantified variables.
    pub fn pair_binders(&self, i: usize, k: usize) -> Vec<Param> {
        let eq = &self.equations[i];
        eq.params.iter().chain(&eq.clauses[k].vars).cloned().collect()
    }

    /// Reads the clause form back as an ordinary PBES.
    pub fn to_pbes(&self) -> Pbes {
        let equations = self
            .equations
            .iter()
            .map(|eq| {
                let body = eq
                    .clauses
                    .iter()
                    .map(|c| self.clause_formula(c))
                    .reduce(PredFormula::or)
                    .unwrap_or(PredFormula::Data(DataExpr::Bool(false)));
                Equation { fixpoint: eq.fixpoint, name: eq.name.clone(), params: eq.params.clone(), body }
            })
            .collect();
        Pbes { equations }
    }

    fn clause_formula(&self, clause: &Clause) -> PredFormula {
        let mut literals = Vec::new();
        split_conjunction(&clause.guard, &mut literals);
        let mut parts: Vec<PredFormula> = literals.into_iter().map(PredFormula::Data).collect();
        if clause.guard == DataExpr::Bool(true) && !clause.calls.is_empty() {
            parts.clear();
        }
        parts.extend(
            clause
                .calls
                .iter()
                .map(|call| PredFormula::Call(self.equations[call.target].name.clone(), call.args.clone())),
        );
        let matrix = parts.into_iter().reduce(PredFormula::and).expect("clause has a guard");
        clause
            .vars
            .iter()
            .rev()
            .fold(matrix, |body, v| PredFormula::Exists(v.name.clone(), v.sort, Box::new(body)))
    }
}

fn split_conjunction(e: &DataExpr, out: &mut Vec<DataExpr>) {
    match e {
        DataExpr::And(a, b) => {
            split_conjunction(a, out);
            split_conjunction(b, out);
        }
        other => out.push(other.clone()),
    }
}

impl fmt::Display for ClausePbes {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for eq in &self.equations {
            write!(f, "{} {}(", eq.fixpoint, eq.name)?;
            syntax::write_list(f, &eq.params)?;
            writeln!(f, ") =")?;
            if eq.clauses.is_empty() {
                writeln!(f, "     false")?;
            }
            for (k, clause) in eq.clauses.iter().enumerate() {
                let lead = if k == 0 { "   " } else { "|| " };
                let formula = self.clause_formula(clause);
                if clause.vars.is_empty() {
                    writeln!(f, "  {lead}{formula}")?;
                } else {
                    writeln!(f, "  {lead}({formula})")?;
                }
            }
            writeln!(f, "  ;")?;
        }
        Ok(())
    }
}

/// Renames bound variables so that every binder is distinct from every other
/// binder and from the free variables.
pub fn rename_apart(f: &PredFormula) -> PredFormula {
    rename_apart_avoiding(f, &BTreeSet::new())
}

/// [`rename_apart`], additionally keeping binders away from `avoid`.
pub fn rename_apart_avoiding(f: &PredFormula, avoid: &BTreeSet<String>) -> PredFormula {
    let mut taken: BTreeSet<String> = avoid.clone();
    taken.extend(f.free_vars());
    let mut every = taken.clone();
    f.all_names(&mut every);
    let mut renamer = Renamer { taken, every };
    renamer.walk(f)
}

struct Renamer {
    /// Names already claimed by free variables or earlier binders.
    taken: BTreeSet<String>,
    /// All names in sight; fresh names avoid these too.
    every: BTreeSet<String>,
}

impl Renamer {
    fn fresh(&mut self, base: &str) -> String {
        let stem = base.trim_end_matches(|c: char| c.is_ascii_digit());
        let stem = if stem.is_empty() { base } else { stem };
        let name = (1..)
            .map(|i| format!("{stem}{i}"))
            .find(|n| !self.every.contains(n))
            .expect("unbounded supply of names");
        self.every.insert(name.clone());
        name
    }

    fn walk(&mut self, f: &PredFormula) -> PredFormula {
        match f {
            PredFormula::Data(_) | PredFormula::Call(..) => f.clone(),
            PredFormula::And(a, b) => {
                let a = self.walk(a);
                PredFormula::and(a, self.walk(b))
            }
            PredFormula::Or(a, b) => {
                let a = self.walk(a);
                PredFormula::or(a, self.walk(b))
            }
            PredFormula::Exists(x, s, body) | PredFormula::Forall(x, s, body) => {
                let (name, body) = if self.taken.contains(x) {
                    let y = self.fresh(x);
                    let renamed = body.substitute(&[(x.clone(), DataExpr::Var(y.clone()))].into_iter().collect());
                    (y, renamed)
                } else {
                    (x.clone(), (**body).clone())
                };
                self.taken.insert(name.clone());
                let body = Box::new(self.walk(&body));
                if matches!(f, PredFormula::Exists(..)) {
                    PredFormula::Exists(name, *s, body)
                } else {
                    PredFormula::Forall(name, *s, body)
                }
            }
        }
    }
}

/// Pulls every existential quantifier to the front. The input must have its
/// binders renamed apart.
pub fn lift_existentials(f: &PredFormula) -> Result<(Vec<Param>, PredFormula), Error> {
    fn go(f: &PredFormula, vars: &mut Vec<Param>) -> Result<PredFormula, Error> {
        Ok(match f {
            PredFormula::Data(_) | PredFormula::Call(..) => f.clone(),
            PredFormula::And(a, b) => PredFormula::and(go(a, vars)?, go(b, vars)?),
            PredFormula::Or(a, b) => PredFormula::or(go(a, vars)?, go(b, vars)?),
            PredFormula::Exists(x, s, body) => {
                vars.push(Param { name: x.clone(), sort: *s });
                go(body, vars)?
            }
            PredFormula::Forall(x, ..) => return Err(Error::UniversalNotAllowed(x.clone())),
        })
    }
    let mut vars = Vec::new();
    let matrix = go(f, &mut vars)?;
    Ok((vars, matrix))
}

/// One disjunct of the matrix: data literals and predicate calls.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClauseCore {
    pub guard: DataExpr,
    pub calls: Vec<(String, Vec<DataExpr>)>,
}

/// Splits a quantifier-free matrix into disjunctive normal form.
pub fn dnf_split(matrix: &PredFormula, cap: usize) -> Result<Vec<ClauseCore>, Error> {
    type Conj = (Vec<DataExpr>, Vec<(String, Vec<DataExpr>)>);
    fn go(f: &PredFormula, cap: usize) -> Result<Vec<Conj>, Error> {
        Ok(match f {
            PredFormula::Data(e) => alloc::vec![(alloc::vec![e.clone()], Vec::new())],
            PredFormula::Call(name, args) => alloc::vec![(Vec::new(), alloc::vec![(name.clone(), args.clone())])],
            PredFormula::Or(a, b) => {
                let mut left = go(a, cap)?;
                left.extend(go(b, cap)?);
                if left.len() > cap {
                    return Err(Error::DnfTooLarge { cap });
                }
                left
            }
            PredFormula::And(a, b) => {
                let left = go(a, cap)?;
                let right = go(b, cap)?;
                if left.len().saturating_mul(right.len()) > cap {
                    return Err(Error::DnfTooLarge { cap });
                }
                let mut out = Vec::with_capacity(left.len() * right.len());
                for (ld, lc) in &left {
                    for (rd, rc) in &right {
                        let mut d = ld.clone();
                        d.extend(rd.iter().cloned());
                        let mut c = lc.clone();
                        c.extend(rc.iter().cloned());
                        out.push((d, c));
                    }
                }
                out
            }
            PredFormula::Exists(x, ..) | PredFormula::Forall(x, ..) => {
                return Err(Error::Precondition(format!("matrix still binds `{x}`")))
            }
        })
    }
    Ok(go(matrix, cap)?
        .into_iter()
        .map(|(mut literals, calls)| {
            if literals.len() > 1 {
                literals.retain(|l| *l != DataExpr::Bool(true));
            }
            ClauseCore { guard: DataExpr::conjoin(literals), calls }
        })
        .collect())
}

/// Rewrites a closed existential PBES into clause form.
pub fn to_clause_form(p: &Pbes) -> Result<ClausePbes, Error> {
    to_clause_form_with_cap(p, DEFAULT_DNF_CAP)
}

pub fn to_clause_form_with_cap(p: &Pbes, cap: usize) -> Result<ClausePbes, Error> {
    let mut equations = Vec::new();
    for eq in &p.equations {
        let params: BTreeSet<String> = eq.params.iter().map(|p| p.name.clone()).collect();
        let renamed = rename_apart_avoiding(&eq.body, &params);
        let (vars, matrix) = lift_existentials(&renamed)?;
        let mut clauses = Vec::new();
        for core in dnf_split(&matrix, cap)? {
            let mut used = core.guard.free_vars();
            let mut calls = Vec::new();
            for (name, args) in core.calls {
                let target = p.index_of(&name).ok_or_else(|| Error::UnknownVariable(name.clone()))?;
                args.iter().for_each(|a| a.free_vars_into(&mut used));
                calls.push(Call { target, args });
            }
            let vars = vars.iter().filter(|v| used.contains(&v.name)).cloned().collect();
            clauses.push(Clause { vars, guard: core.guard, calls });
        }
        equations.push(ClauseEquation {
            fixpoint: eq.fixpoint,
            name: eq.name.clone(),
            params: eq.params.clone(),
            clauses,
        });
    }
    Ok(ClausePbes { equations })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_pbes;
    use crate::syntax::{CmpOp, Env, Sort, Value};
    use alloc::vec;

    fn body(text: &str) -> PredFormula {
        parse_pbes(text).unwrap().equations.remove(0).body
    }

    fn binders(f: &PredFormula, out: &mut Vec<String>) {
        match f {
            PredFormula::And(a, b) | PredFormula::Or(a, b) => {
                binders(a, out);
                binders(b, out);
            }
            PredFormula::Exists(x, _, b) | PredFormula::Forall(x, _, b) => {
                out.push(x.clone());
                binders(b, out);
            }
            _ => {}
        }
    }

    #[test]
    fn rename_apart_makes_binders_unique() {
        let f = body("nu X(n:N) = (exists e:N . X(e)) || (exists e:N . Y(e)); nu Y(m:N) = true;");
        let g = rename_apart(&f);
        let mut names = Vec::new();
        binders(&g, &mut names);
        assert_eq!(names, vec!["e".to_string(), "e1".to_string()]);
        assert_eq!(g.to_string(), "(exists e:N . X(e)) || (exists e1:N . Y(e1))");
        assert_eq!(rename_apart(&g), g);

        let plain = body("nu X(n:N) = n > 2 && X(n + 1);");
        assert_eq!(rename_apart(&plain), plain);
    }

    #[test]
    fn rename_apart_avoids_free_variables() {
        let f = body("nu X(n:N) = n = 1 || exists n:N . X(n);");
        let g = rename_apart(&f);
        assert_eq!(g.to_string(), "n = 1 || (exists n1:N . X(n1))");
    }

    #[test]
    fn lift_and_reject_universals() {
        let f = body("mu X(d:N) = (exists e:N . d + e < 10 && X(e)) || d = 0;");
        let (vars, matrix) = lift_existentials(&rename_apart(&f)).unwrap();
        assert_eq!(vars, vec![Param::new("e", Sort::Nat)]);
        assert_eq!(matrix.to_string(), "d + e < 10 && X(e) || d = 0");

        // Bounded-domain equivalence of  exists e. matrix  and the input.
        let eval = |f: &PredFormula, env: &Env, x: bool| -> bool { eval_bounded(f, env, x, 12) };
        for d in 0..=12 {
            let env: Env = [("d".to_string(), Value::Nat(d))].into_iter().collect();
            for x in [false, true] {
                let lifted = (0..=12).any(|e| {
                    let mut env = env.clone();
                    env.insert("e".into(), Value::Nat(e));
                    eval(&matrix, &env, x)
                });
                assert_eq!(lifted, eval(&f, &env, x), "d={d} x={x}");
            }
        }

        let qf = body("nu X(n:N) = n > 1 && X(n);");
        let (vars, matrix) = lift_existentials(&qf).unwrap();
        assert!(vars.is_empty());
        assert_eq!(matrix, qf);

        let uni = body("nu X(n:N) = forall m:N . X(m);");
        assert_eq!(lift_existentials(&uni), Err(Error::UniversalNotAllowed("m".into())));
    }

    /// Truth of a formula whose calls all evaluate to `calls`, quantifiers ranging over `0..=bound`.
    fn eval_bounded(f: &PredFormula, env: &Env, calls: bool, bound: u64) -> bool {
        match f {
            PredFormula::Data(e) => e.eval(env).unwrap() == Value::Bool(true),
            PredFormula::Call(..) => calls,
            PredFormula::And(a, b) => eval_bounded(a, env, calls, bound) && eval_bounded(b, env, calls, bound),
            PredFormula::Or(a, b) => eval_bounded(a, env, calls, bound) || eval_bounded(b, env, calls, bound),
            PredFormula::Exists(x, _, b) => (0..=bound).any(|v| {
                let mut env = env.clone();
                env.insert(x.clone(), Value::Nat(v));
                eval_bounded(b, &env, calls, bound)
            }),
            PredFormula::Forall(..) => unreachable!(),
        }
    }

    #[test]
    fn dnf_distributes() {
        let f = body("nu X(a:B, b:B, e:N) = (a || b) && X(a, b, e);");
        let cores = dnf_split(&f, DEFAULT_DNF_CAP).unwrap();
        assert_eq!(cores.len(), 2);
        assert_eq!(cores[0].guard, DataExpr::var("a"));
        assert_eq!(cores[1].guard, DataExpr::var("b"));
        assert!(cores.iter().all(|c| c.calls.len() == 1));

        // Truth tables of the data skeleton agree.
        for (a, b) in [(false, false), (false, true), (true, false), (true, true)] {
            let env: Env = [("a".to_string(), Value::Bool(a)), ("b".to_string(), Value::Bool(b))]
                .into_iter()
                .collect();
            let split = cores.iter().any(|c| c.guard.eval(&env).unwrap() == Value::Bool(true));
            assert_eq!(split, a || b);
        }

        let g = body("nu X(b:B, e:N) = b && X(b, e) && X(b, e + 1);");
        let cores = dnf_split(&g, DEFAULT_DNF_CAP).unwrap();
        assert_eq!(cores.len(), 1);
        assert_eq!(cores[0].calls.len(), 2);

        let h = body("nu X(n:N) = n > 3;");
        let cores = dnf_split(&h, DEFAULT_DNF_CAP).unwrap();
        assert_eq!(cores, vec![ClauseCore { guard: DataExpr::cmp(CmpOp::Gt, DataExpr::var("n"), DataExpr::Nat(3)), calls: vec![] }]);
    }

    #[test]
    fn dnf_cap_fails_loudly() {
        // (a||b) && (a||b) && ... 16 times: 2^16 disjuncts.
        let factor = "(n = 0 || n = 1)";
        let text = format!("nu X(n:N) = {};", vec![factor; 16].join(" && "));
        let f = body(&text);
        assert_eq!(dnf_split(&f, DEFAULT_DNF_CAP), Err(Error::DnfTooLarge { cap: DEFAULT_DNF_CAP }));
        assert!(dnf_split(&f, 1 << 16).is_ok());
    }

    #[test]
    fn clause_form_of_examples() {
        let e2 = parse_pbes(
            "nu X1(n:N) = (n = 0 && X1(n+2)) || (n > 0 && X2(n-1) && X1(n+2));
             mu X2(n:N) = (n >= 3 && X2(n-2)) || (n = 1 && X1(n-1));",
        )
        .unwrap();
        let c = to_clause_form(&e2).unwrap();
        let eq1 = &c.equations[0];
        assert_eq!(eq1.clauses.len(), 2);
        assert_eq!(eq1.clauses[0].guard.to_string(), "n = 0");
        assert_eq!(eq1.clauses[0].calls, vec![Call { target: 0, args: vec![body_expr("n + 2")] }]);
        assert_eq!(eq1.clauses[1].guard.to_string(), "n > 0");
        assert_eq!(
            eq1.clauses[1].calls.iter().map(|c| c.target).collect::<Vec<_>>(),
            vec![1, 0]
        );

        let e4 = parse_pbes("nu X1(n:N) = exists n':N . even(n) && X1(3*n+5*n') && X1(4*n+5*n');").unwrap();
        let c4 = to_clause_form(&e4).unwrap();
        let clause = &c4.equations[0].clauses[0];
        assert_eq!(c4.equations[0].clauses.len(), 1);
        assert_eq!(clause.vars, vec![Param::new("n'", Sort::Nat)]);
        assert_eq!(clause.guard.to_string(), "even(n)");
        assert_eq!(clause.calls[0].args[0].to_string(), "3*n + 5*n'");
        assert_eq!(clause.calls[1].args[0].to_string(), "4*n + 5*n'");
    }

    fn body_expr(text: &str) -> DataExpr {
        match body(&format!("nu X(n:N) = X({text});")) {
            PredFormula::Call(_, mut args) => args.remove(0),
            _ => unreachable!(),
        }
    }

    #[test]
    fn clause_form_is_stable_and_prunes_unused_quantifiers() {
        let p = parse_pbes(
            "mu M(x:N, y:N) = (x > 3 && y + 1 = x && XT()) || (exists e:N . x <= 3 && M(x+2, e) && M(e, y));
             nu XT() = XT();
             nu Z(n:N) = exists u:N . exists v:N . (n = u || X(v)) && Z(n);
             nu X(n:N) = true;",
        )
        .unwrap();
        let c = to_clause_form(&p).unwrap();
        let z = &c.equations[2];
        assert_eq!(z.clauses[0].vars, vec![Param::new("u", Sort::Nat)]);
        assert_eq!(z.clauses[1].vars, vec![Param::new("v", Sort::Nat)]);
        let again = to_clause_form(&c.to_pbes()).unwrap();
        assert_eq!(again, c);
        let reparsed = to_clause_form(&parse_pbes(&c.to_string()).unwrap()).unwrap();
        assert_eq!(reparsed, c);
        // A clause-form input is reproduced as-is.
        assert_eq!(c.to_pbes(), again.to_pbes());
    }
}
