//! Arithmetic right-hand-side expressions for user-defined models: the
//! linear-expression grammar of predicates extended with products,
//! quotients and parentheses. Identifiers resolve to state variables or
//! parameters at parse time.

use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExprError {
    #[error("expression error at position {position}: {message}")]
    Syntax { position: usize, message: String },
    #[error("unknown identifier `{0}` (not a state variable or parameter)")]
    UnknownIdent(String),
}

/// A parsed arithmetic expression over one model's states and parameters.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(f64),
    /// Index into the state vector.
    State(usize),
    /// Index into the parameter vector.
    Param(usize),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
}

impl Expr {
    pub fn eval(&self, state: &[f64], params: &[f64]) -> f64 {
        match self {
            Expr::Const(c) => *c,
            Expr::State(j) => state[*j],
            Expr::Param(j) => params[*j],
            Expr::Neg(e) => -e.eval(state, params),
            Expr::Add(a, b) => a.eval(state, params) + b.eval(state, params),
            Expr::Sub(a, b) => a.eval(state, params) - b.eval(state, params),
            Expr::Mul(a, b) => a.eval(state, params) * b.eval(state, params),
            Expr::Div(a, b) => a.eval(state, params) / b.eval(state, params),
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Const(c) => write!(f, "{c}"),
            Expr::State(j) => write!(f, "x{j}"),
            Expr::Param(j) => write!(f, "p{j}"),
            Expr::Neg(e) => write!(f, "-({e})"),
            Expr::Add(a, b) => write!(f, "({a} + {b})"),
            Expr::Sub(a, b) => write!(f, "({a} - {b})"),
            Expr::Mul(a, b) => write!(f, "({a} * {b})"),
            Expr::Div(a, b) => write!(f, "({a} / {b})"),
        }
    }
}

/// Parses `text` against the given state and parameter names.
pub fn parse_expr(
    text: &str,
    state_names: &[String],
    param_names: &[String],
) -> Result<Expr, ExprError> {
    let mut parser = ExprParser {
        chars: text.chars().collect(),
        pos: 0,
        state_names,
        param_names,
    };
    let expr = parser.sum()?;
    parser.skip_ws();
    if parser.pos < parser.chars.len() {
        return Err(parser.error("unexpected trailing input"));
    }
    Ok(expr)
}

struct ExprParser<'a> {
    chars: Vec<char>,
    pos: usize,
    state_names: &'a [String],
    param_names: &'a [String],
}

impl ExprParser<'_> {
    fn error(&self, message: impl Into<String>) -> ExprError {
        ExprError::Syntax {
            position: self.pos + 1,
            message: message.into(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.chars.len() && self.chars[self.pos].is_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).copied()
    }

    fn sum(&mut self) -> Result<Expr, ExprError> {
        let mut left = self.product()?;
        while let Some(op) = self.peek() {
            match op {
                '+' => {
                    self.pos += 1;
                    left = Expr::Add(Box::new(left), Box::new(self.product()?));
                }
                '-' => {
                    self.pos += 1;
                    left = Expr::Sub(Box::new(left), Box::new(self.product()?));
                }
                _ => break,
            }
        }
        Ok(left)
    }

    fn product(&mut self) -> Result<Expr, ExprError> {
        let mut left = self.unary()?;
        while let Some(op) = self.peek() {
            match op {
                '*' => {
                    self.pos += 1;
                    left = Expr::Mul(Box::new(left), Box::new(self.unary()?));
                }
                '/' => {
                    self.pos += 1;
                    left = Expr::Div(Box::new(left), Box::new(self.unary()?));
                }
                _ => break,
            }
        }
        Ok(left)
    }

    fn unary(&mut self) -> Result<Expr, ExprError> {
        match self.peek() {
            Some('-') => {
                self.pos += 1;
                Ok(Expr::Neg(Box::new(self.unary()?)))
            }
            _ => self.atom(),
        }
    }

    fn atom(&mut self) -> Result<Expr, ExprError> {
        match self.peek() {
            Some('(') => {
                self.pos += 1;
                let inner = self.sum()?;
                if self.peek() != Some(')') {
                    return Err(self.error("expected `)`"));
                }
                self.pos += 1;
                Ok(inner)
            }
            Some(c) if c.is_ascii_digit() || c == '.' => self.number(),
            Some(c) if c.is_alphabetic() || c == '_' => self.ident(),
            Some(c) => Err(self.error(format!("unexpected character `{c}`"))),
            None => Err(self.error("unexpected end of expression")),
        }
    }

    fn number(&mut self) -> Result<Expr, ExprError> {
        let start = self.pos;
        while self
            .chars
            .get(self.pos)
            .is_some_and(|c| c.is_ascii_digit() || *c == '.')
        {
            self.pos += 1;
        }
        if self.chars.get(self.pos).is_some_and(|c| *c == 'e' || *c == 'E') {
            let mut k = self.pos + 1;
            if self.chars.get(k).is_some_and(|c| *c == '+' || *c == '-') {
                k += 1;
            }
            if self.chars.get(k).is_some_and(|c| c.is_ascii_digit()) {
                self.pos = k;
                while self.chars.get(self.pos).is_some_and(|c| c.is_ascii_digit()) {
                    self.pos += 1;
                }
            }
        }
        let lexeme: String = self.chars[start..self.pos].iter().collect();
        lexeme
            .parse()
            .map(Expr::Const)
            .map_err(|_| self.error(format!("invalid number `{lexeme}`")))
    }

    fn ident(&mut self) -> Result<Expr, ExprError> {
        let start = self.pos;
        while self
            .chars
            .get(self.pos)
            .is_some_and(|c| c.is_alphanumeric() || *c == '_')
        {
            self.pos += 1;
        }
        let name: String = self.chars[start..self.pos].iter().collect();
        if let Some(j) = self.state_names.iter().position(|n| *n == name) {
            Ok(Expr::State(j))
        } else if let Some(j) = self.param_names.iter().position(|n| *n == name) {
            Ok(Expr::Param(j))
        } else {
            Err(ExprError::UnknownIdent(name))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Expr {
        parse_expr(
            text,
            &["x".into(), "y".into()],
            &["a".into(), "b".into()],
        )
        .unwrap()
    }

    #[test]
    fn evaluates_arithmetic() {
        let e = parse("a*x - b*y/2 + 1");
        let v = e.eval(&[3.0, 4.0], &[2.0, 0.5]);
        assert_eq!(v, 2.0 * 3.0 - 0.5 * 4.0 / 2.0 + 1.0);
    }

    #[test]
    fn respects_parentheses_and_precedence() {
        let e = parse("a*(x + y)");
        assert_eq!(e.eval(&[1.0, 2.0], &[10.0, 0.0]), 30.0);
        let e = parse("a*x + y");
        assert_eq!(e.eval(&[1.0, 2.0], &[10.0, 0.0]), 12.0);
    }

    #[test]
    fn unary_minus() {
        let e = parse("-x*y");
        assert_eq!(e.eval(&[3.0, 2.0], &[0.0, 0.0]), -6.0);
    }

    #[test]
    fn unknown_identifier_is_reported() {
        let err = parse_expr("z + 1", &["x".into()], &[]).unwrap_err();
        assert_eq!(err, ExprError::UnknownIdent("z".into()));
    }

    #[test]
    fn trailing_garbage_is_an_error() {
        assert!(parse_expr("x + 1 )", &["x".into()], &[]).is_err());
    }
}
