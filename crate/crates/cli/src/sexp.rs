//! Minimal s-expression reader for grammar, problem and term files.

use std::fmt;

use thiserror::Error;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Sexp {
    Atom(String),
    List(Vec<Sexp>),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SexpError {
    #[error("line {line}: unexpected `)`")]
    Unbalanced { line: usize },
    #[error("unexpected end of input: missing `)`")]
    Unclosed,
    #[error("line {line}: trailing input after the expression")]
    Trailing { line: usize },
    #[error("empty input")]
    Empty,
}

impl Sexp {
    pub fn atom(&self) -> Option<&str> {
        match self {
            Sexp::Atom(a) => Some(a),
            Sexp::List(_) => None,
        }
    }

    pub fn list(&self) -> Option<&[Sexp]> {
        match self {
            Sexp::List(items) => Some(items),
            Sexp::Atom(_) => None,
        }
    }

    /// `(head rest...)` with an atom head.
    pub fn form(&self) -> Option<(&str, &[Sexp])> {
        let items = self.list()?;
        Some((items.first()?.atom()?, &items[1..]))
    }
}

impl fmt::Display for Sexp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sexp::Atom(a) => f.write_str(a),
            Sexp::List(items) => {
                f.write_str("(")?;
                for (i, it) in items.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" ")?;
                    }
                    write!(f, "{it}")?;
                }
                f.write_str(")")
            }
        }
    }
}

/// Parses exactly one expression. `;` starts a comment running to end of line.
pub fn parse(text: &str) -> Result<Sexp, SexpError> {
    let mut stack: Vec<Vec<Sexp>> = vec![Vec::new()];
    let mut line = 1;
    let mut chars = text.chars().peekable();
    while let Some(c) = chars.next() {
        match c {
            '\n' => line += 1,
            ';' => {
                while chars.peek().is_some_and(|&c| c != '\n') {
                    chars.next();
                }
            }
            '(' => stack.push(Vec::new()),
            ')' => {
                let done = stack.pop().filter(|_| !stack.is_empty()).ok_or(SexpError::Unbalanced { line })?;
                stack.last_mut().unwrap().push(Sexp::List(done));
            }
            c if c.is_whitespace() => {}
            c => {
                let mut atom = String::from(c);
                while let Some(&n) = chars.peek() {
                    if n.is_whitespace() || n == '(' || n == ')' || n == ';' {
                        break;
                    }
                    atom.push(n);
                    chars.next();
                }
                stack.last_mut().unwrap().push(Sexp::Atom(atom));
            }
        }
        if stack.len() == 1 && stack[0].len() > 1 {
            return Err(SexpError::Trailing { line });
        }
    }
    if stack.len() > 1 {
        return Err(SexpError::Unclosed);
    }
    stack.pop().unwrap().pop().ok_or(SexpError::Empty)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reads_nested_lists() {
        let s = parse("(grammar (vars x) ; comment\n (rule E (+ E E)))").unwrap();
        assert_eq!(s.to_string(), "(grammar (vars x) (rule E (+ E E)))");
        assert_eq!(s.form().unwrap().0, "grammar");
        assert_eq!(parse("x").unwrap(), Sexp::Atom("x".into()));
    }

    #[test]
    fn errors() {
        assert_eq!(parse("(a"), Err(SexpError::Unclosed));
        assert_eq!(parse("a)"), Err(SexpError::Unbalanced { line: 1 }));
        assert_eq!(parse("(a)\n(b)"), Err(SexpError::Trailing { line: 2 }));
        assert_eq!(parse("  ; nothing"), Err(SexpError::Empty));
    }
}
