//! Minimal S-expression reader for solver responses.

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Sexp {
    /// A symbol or numeral; `|quoted|` symbols are stored without the bars.
    Atom(String),
    Str(String),
    List(Vec<Sexp>),
}

impl Sexp {
    pub fn atom(&self) -> Option<&str> {
        match self {
            Sexp::Atom(a) => Some(a),
            _ => None,
        }
    }

    pub fn list(&self) -> Option<&[Sexp]> {
        match self {
            Sexp::List(items) => Some(items),
            _ => None,
        }
    }
}

impl fmt::Display for Sexp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sexp::Atom(a) => f.write_str(a),
            Sexp::Str(s) => write!(f, "\"{s}\""),
            Sexp::List(items) => {
                f.write_str("(")?;
                for (i, item) in items.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" ")?;
                    }
                    write!(f, "{item}")?;
                }
                f.write_str(")")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SexpError {
    pub offset: usize,
    pub message: &'static str,
}

impl fmt::Display for SexpError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "offset {}: {}", self.offset, self.message)
    }
}

/// Parses every top-level expression in `text`.
pub fn parse_all(text: &str) -> Result<Vec<Sexp>, SexpError> {
    let bytes = text.as_bytes();
    let mut pos = 0;
    let mut stack: Vec<Vec<Sexp>> = Vec::new();
    let mut out = Vec::new();
    let err = |offset, message| Err(SexpError { offset, message });
    while pos < bytes.len() {
        let c = bytes[pos];
        let item = match c {
            b' ' | b'\t' | b'\r' | b'\n' => {
                pos += 1;
                continue;
            }
            b';' => {
                while pos < bytes.len() && bytes[pos] != b'\n' {
                    pos += 1;
                }
                continue;
            }
            b'(' => {
                stack.push(Vec::new());
                pos += 1;
                continue;
            }
            b')' => {
                pos += 1;
                match stack.pop() {
                    Some(items) => Sexp::List(items),
                    None => return err(pos - 1, "unbalanced `)`"),
                }
            }
            b'|' => {
                let start = pos + 1;
                let Some(len) = bytes[start..].iter().position(|&b| b == b'|') else {
                    return err(pos, "unterminated quoted symbol");
                };
                pos = start + len + 1;
                Sexp::Atom(text[start..start + len].to_string())
            }
            b'"' => {
                let mut s = String::new();
                let mut i = pos + 1;
                loop {
                    match bytes.get(i) {
                        None => return err(pos, "unterminated string"),
                        Some(b'"') if bytes.get(i + 1) == Some(&b'"') => {
                            s.push('"');
                            i += 2;
                        }
                        Some(b'"') => break,
                        Some(_) => {
                            let ch = text[i..].chars().next().unwrap();
                            s.push(ch);
                            i += ch.len_utf8();
                        }
                    }
                }
                pos = i + 1;
                Sexp::Str(s)
            }
            _ => {
                let start = pos;
                while pos < bytes.len() && !matches!(bytes[pos], b' ' | b'\t' | b'\r' | b'\n' | b'(' | b')' | b'|' | b'"' | b';') {
                    pos += 1;
                }
                Sexp::Atom(text[start..pos].to_string())
            }
        };
        match stack.last_mut() {
            Some(top) => top.push(item),
            None => out.push(item),
        }
    }
    if !stack.is_empty() {
        return err(bytes.len(), "unbalanced `(`");
    }
    Ok(out)
}

/// True once `text` holds at least one complete expression and no open list.
pub fn is_complete(text: &str) -> bool {
    let mut depth = 0usize;
    let mut seen = false;
    let mut chars = text.chars().peekable();
    while let Some(c) = chars.next() {
        match c {
            '(' => {
                depth += 1;
                seen = true;
            }
            ')' => depth = depth.saturating_sub(1),
            '|' => {
                for d in chars.by_ref() {
                    if d == '|' {
                        break;
                    }
                }
                seen = true;
            }
            '"' => {
                for d in chars.by_ref() {
                    if d == '"' {
                        break;
                    }
                }
                seen = true;
            }
            ';' => {
                for d in chars.by_ref() {
                    if d == '\n' {
                        break;
                    }
                }
            }
            c if !c.is_whitespace() => seen = true,
            _ => {}
        }
    }
    seen && depth == 0
}
