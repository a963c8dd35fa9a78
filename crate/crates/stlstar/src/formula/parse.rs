//! Recursive-descent parser for the concrete formula grammar.
//!
//! ```text
//! formula  := "true" | pred | "!" formula | formula "||" formula
//!           | formula "&&" formula | formula "U[" num "," num "]" formula
//!           | "F[" num "," num "]" formula | "G[" num "," num "]" formula
//!           | "*" [int] formula | "(" formula ")"
//! pred     := linexpr ("<=" | ">=" | "<" | ">") linexpr
//! linexpr  := term (("+" | "-") term)*
//! term     := [num "*"] ident ["*" int] | num
//! ```
//!
//! Unary operators (`!`, `*i`, `F`, `G`) bind tighter than `&&`, which binds
//! tighter than `||`, which binds tighter than `U`; `U` is right-associative.
//! `x*2` is a frozen reference, a bare `x*` means `x*1`, and `F`/`G`/`U` act
//! as operators only when immediately followed by `[`.

use thiserror::Error;

use super::{Formula, FrozenIndex, LinearPredicate, TimeInterval};

/// Parse failure with the 1-based character position where it occurred.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("parse error at position {position}: {message}")]
pub struct ParseError {
    pub position: usize,
    pub message: String,
}

impl ParseError {
    fn new(position: usize, message: impl Into<String>) -> Self {
        ParseError {
            position,
            message: message.into(),
        }
    }
}

/// Parses a formula from its textual form.
pub fn parse(text: &str) -> Result<Formula, ParseError> {
    let tokens = lex(text)?;
    let mut parser = Parser { tokens, pos: 0 };
    let formula = parser.formula()?;
    parser.expect_eof()?;
    Ok(formula)
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Num(f64),
    True,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
    Plus,
    Minus,
    Star,
    Bang,
    AndAnd,
    OrOr,
    Le,
    Ge,
    Lt,
    Gt,
    EqEq,
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(name) => format!("identifier `{name}`"),
            Tok::Num(n) => format!("number `{n}`"),
            Tok::True => "`true`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::LBracket => "`[`".into(),
            Tok::RBracket => "`]`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Plus => "`+`".into(),
            Tok::Minus => "`-`".into(),
            Tok::Star => "`*`".into(),
            Tok::Bang => "`!`".into(),
            Tok::AndAnd => "`&&`".into(),
            Tok::OrOr => "`||`".into(),
            Tok::Le => "`<=`".into(),
            Tok::Ge => "`>=`".into(),
            Tok::Lt => "`<`".into(),
            Tok::Gt => "`>`".into(),
            Tok::EqEq => "`==`".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

struct Token {
    tok: Tok,
    /// 1-based character position of the token start.
    pos: usize,
    /// Raw lexeme, used to validate frozen indices as integers.
    lexeme: String,
}

fn lex(text: &str) -> Result<Vec<Token>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let pos = i + 1;
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let (tok, len) = match c {
            '(' => (Tok::LParen, 1),
            ')' => (Tok::RParen, 1),
            '[' => (Tok::LBracket, 1),
            ']' => (Tok::RBracket, 1),
            ',' => (Tok::Comma, 1),
            '+' => (Tok::Plus, 1),
            '-' => (Tok::Minus, 1),
            '*' => (Tok::Star, 1),
            '!' => (Tok::Bang, 1),
            '&' => {
                if chars.get(i + 1) == Some(&'&') {
                    (Tok::AndAnd, 2)
                } else {
                    return Err(ParseError::new(pos, "expected `&&`"));
                }
            }
            '|' => {
                if chars.get(i + 1) == Some(&'|') {
                    (Tok::OrOr, 2)
                } else {
                    return Err(ParseError::new(pos, "expected `||`"));
                }
            }
            '<' => {
                if chars.get(i + 1) == Some(&'=') {
                    (Tok::Le, 2)
                } else {
                    (Tok::Lt, 1)
                }
            }
            '>' => {
                if chars.get(i + 1) == Some(&'=') {
                    (Tok::Ge, 2)
                } else {
                    (Tok::Gt, 1)
                }
            }
            '=' => {
                if chars.get(i + 1) == Some(&'=') {
                    (Tok::EqEq, 2)
                } else {
                    return Err(ParseError::new(pos, "expected `==`"));
                }
            }
            _ if c.is_ascii_digit() || c == '.' => {
                let mut j = i;
                while j < chars.len() && (chars[j].is_ascii_digit() || chars[j] == '.') {
                    j += 1;
                }
                if j < chars.len() && (chars[j] == 'e' || chars[j] == 'E') {
                    let mut k = j + 1;
                    if k < chars.len() && (chars[k] == '+' || chars[k] == '-') {
                        k += 1;
                    }
                    if k < chars.len() && chars[k].is_ascii_digit() {
                        j = k;
                        while j < chars.len() && chars[j].is_ascii_digit() {
                            j += 1;
                        }
                    }
                }
                let lexeme: String = chars[i..j].iter().collect();
                let value: f64 = lexeme
                    .parse()
                    .map_err(|_| ParseError::new(pos, format!("invalid number `{lexeme}`")))?;
                tokens.push(Token {
                    tok: Tok::Num(value),
                    pos,
                    lexeme,
                });
                i = j;
                continue;
            }
            _ if c.is_alphabetic() || c == '_' => {
                let mut j = i;
                while j < chars.len() && (chars[j].is_alphanumeric() || chars[j] == '_') {
                    j += 1;
                }
                let name: String = chars[i..j].iter().collect();
                let tok = if name == "true" { Tok::True } else { Tok::Ident(name) };
                tokens.push(Token {
                    tok,
                    pos,
                    lexeme: chars[i..j].iter().collect(),
                });
                i = j;
                continue;
            }
            _ => return Err(ParseError::new(pos, format!("unexpected character `{c}`"))),
        };
        let lexeme: String = chars[i..i + len].iter().collect();
        tokens.push(Token { tok, pos, lexeme });
        i += len;
    }
    tokens.push(Token {
        tok: Tok::Eof,
        pos: chars.len() + 1,
        lexeme: String::new(),
    });
    Ok(tokens)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.tokens[self.pos]
    }

    fn peek_at(&self, offset: usize) -> &Token {
        let idx = (self.pos + offset).min(self.tokens.len() - 1);
        &self.tokens[idx]
    }

    fn bump(&mut self) -> &Token {
        let tok = &self.tokens[self.pos];
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        tok
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<(), ParseError> {
        if self.peek().tok == tok {
            self.bump();
            Ok(())
        } else {
            Err(self.unexpected(what))
        }
    }

    fn unexpected(&self, what: &str) -> ParseError {
        let token = self.peek();
        ParseError::new(
            token.pos,
            format!("expected {what}, found {}", token.tok.describe()),
        )
    }

    fn expect_eof(&mut self) -> Result<(), ParseError> {
        if self.peek().tok == Tok::Eof {
            Ok(())
        } else {
            Err(self.unexpected("end of input"))
        }
    }

    /// Is the ident at the current position a temporal operator head
    /// (`U`, `F` or `G` immediately followed by `[`)?
    fn temporal_head(&self, name: &str) -> bool {
        matches!(&self.peek().tok, Tok::Ident(id) if id == name)
            && self.peek_at(1).tok == Tok::LBracket
    }

    // formula := or-expr ( "U[" num "," num "]" formula )?   (right-assoc)
    fn formula(&mut self) -> Result<Formula, ParseError> {
        let left = self.or_expr()?;
        if self.temporal_head("U") {
            self.bump();
            let interval = self.interval()?;
            let right = self.formula()?;
            return Ok(Formula::until(interval, left, right));
        }
        Ok(left)
    }

    fn or_expr(&mut self) -> Result<Formula, ParseError> {
        let mut left = self.and_expr()?;
        while self.peek().tok == Tok::OrOr {
            self.bump();
            let right = self.and_expr()?;
            left = Formula::or(left, right);
        }
        Ok(left)
    }

    fn and_expr(&mut self) -> Result<Formula, ParseError> {
        let mut left = self.unary()?;
        while self.peek().tok == Tok::AndAnd {
            self.bump();
            let right = self.unary()?;
            left = Formula::and(left, right);
        }
        Ok(left)
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        match &self.peek().tok {
            Tok::Bang => {
                self.bump();
                Ok(Formula::not(self.unary()?))
            }
            Tok::Star => {
                self.bump();
                let index = if let Tok::Num(_) = self.peek().tok {
                    self.frozen_index()?
                } else {
                    FrozenIndex::new(1).unwrap()
                };
                Ok(Formula::freeze(index, self.unary()?))
            }
            Tok::Ident(_) if self.temporal_head("F") => {
                self.bump();
                let interval = self.interval()?;
                Ok(Formula::eventually(interval, self.unary()?))
            }
            Tok::Ident(_) if self.temporal_head("G") => {
                self.bump();
                let interval = self.interval()?;
                Ok(Formula::globally(interval, self.unary()?))
            }
            _ => self.primary(),
        }
    }

    fn primary(&mut self) -> Result<Formula, ParseError> {
        match &self.peek().tok {
            Tok::True => {
                self.bump();
                Ok(Formula::truth())
            }
            Tok::LParen => {
                self.bump();
                let inner = self.formula()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(inner)
            }
            Tok::Ident(_) | Tok::Num(_) | Tok::Minus => self.predicate(),
            _ => Err(self.unexpected("a formula")),
        }
    }

    // "[" num "," num "]" with interval validity checks
    fn interval(&mut self) -> Result<TimeInterval, ParseError> {
        self.expect(Tok::LBracket, "`[`")?;
        let (lo, lo_pos) = self.signed_num()?;
        self.expect(Tok::Comma, "`,`")?;
        let (hi, hi_pos) = self.signed_num()?;
        self.expect(Tok::RBracket, "`]`")?;
        if lo < 0.0 || hi < 0.0 {
            return Err(ParseError::new(lo_pos, "negative interval bound"));
        }
        if lo == hi {
            return Err(ParseError::new(
                lo_pos,
                format!("singular interval [{lo}, {hi}]"),
            ));
        }
        if lo > hi {
            return Err(ParseError::new(
                lo_pos,
                format!("reversed interval [{lo}, {hi}]"),
            ));
        }
        TimeInterval::new(lo, hi).map_err(|e| ParseError::new(hi_pos, e.to_string()))
    }

    fn signed_num(&mut self) -> Result<(f64, usize), ParseError> {
        let negative = if self.peek().tok == Tok::Minus {
            self.bump();
            true
        } else {
            false
        };
        let pos = self.peek().pos;
        if let Tok::Num(value) = self.peek().tok {
            self.bump();
            Ok((if negative { -value } else { value }, pos))
        } else {
            Err(self.unexpected("a number"))
        }
    }

    fn frozen_index(&mut self) -> Result<FrozenIndex, ParseError> {
        let token = self.peek();
        let pos = token.pos;
        if let Tok::Num(value) = token.tok {
            let integral = value.fract() == 0.0 && !token.lexeme.contains(['.', 'e', 'E']);
            if !integral || value < 1.0 || value > u32::MAX as f64 {
                return Err(ParseError::new(
                    pos,
                    format!("frozen index must be a positive integer, got `{}`", token.lexeme),
                ));
            }
            self.bump();
            Ok(FrozenIndex::new(value as u32).unwrap())
        } else {
            Err(self.unexpected("a frozen index"))
        }
    }

    // pred := linexpr ("<=" | ">=" | "<" | ">") linexpr, normalized to `>= 0`
    // form by moving every term to the left-hand side.
    fn predicate(&mut self) -> Result<Formula, ParseError> {
        let start = self.peek().pos;
        let lhs = self.linexpr()?;
        let (flip, op_pos) = match self.peek().tok {
            Tok::Ge | Tok::Gt => (false, self.peek().pos),
            Tok::Le | Tok::Lt => (true, self.peek().pos),
            Tok::EqEq => {
                return Err(ParseError::new(
                    self.peek().pos,
                    "equality predicates are not robust and are rejected; use `>=` or `<=`",
                ))
            }
            _ => return Err(self.unexpected("a comparison operator")),
        };
        self.bump();
        let rhs = self.linexpr()?;
        let _ = op_pos;

        // lhs >= rhs  ->  lhs - rhs >= 0;  lhs <= rhs  ->  rhs - lhs >= 0
        let (pos_side, neg_side) = if flip { (rhs, lhs) } else { (lhs, rhs) };
        let mut terms: Vec<(Option<FrozenIndex>, String, f64)> = Vec::new();
        let mut offset = 0.0;
        for (sign, side) in [(1.0, pos_side), (-1.0, neg_side)] {
            offset += sign * side.constant;
            for (idx, name, coeff) in side.terms {
                terms.push((idx, name, sign * coeff));
            }
        }
        let pred = LinearPredicate::new(terms, offset)
            .map_err(|e| ParseError::new(start, e.to_string()))?;
        Ok(Formula::pred(pred))
    }

    fn linexpr(&mut self) -> Result<LinExpr, ParseError> {
        let mut expr = LinExpr::default();
        let mut sign = if self.peek().tok == Tok::Minus {
            self.bump();
            -1.0
        } else {
            1.0
        };
        loop {
            self.term(sign, &mut expr)?;
            sign = match self.peek().tok {
                Tok::Plus => 1.0,
                Tok::Minus => -1.0,
                _ => break,
            };
            self.bump();
        }
        Ok(expr)
    }

    // term := [num "*"] ident ["*" int] | num
    fn term(&mut self, sign: f64, expr: &mut LinExpr) -> Result<(), ParseError> {
        let mut coeff = 1.0;
        if let Tok::Num(value) = self.peek().tok {
            self.bump();
            // `num "*" ident` is a scaled variable; a bare number is a constant
            if self.peek().tok == Tok::Star && matches!(self.peek_at(1).tok, Tok::Ident(_)) {
                self.bump();
                coeff = value;
            } else {
                expr.constant += sign * value;
                return Ok(());
            }
        }
        let name = match &self.peek().tok {
            Tok::Ident(name) => name.clone(),
            _ => return Err(self.unexpected("a variable name")),
        };
        self.bump();
        // `x*2` freezes the reference at index 2; a trailing bare `x*` means `x*1`
        let mut index = None;
        if self.peek().tok == Tok::Star {
            if let Tok::Num(_) = self.peek_at(1).tok {
                self.bump();
                index = Some(self.frozen_index()?);
            } else {
                self.bump();
                index = Some(FrozenIndex::new(1).unwrap());
            }
        }
        expr.terms.push((index, name, sign * coeff));
        Ok(())
    }
}

#[derive(Default)]
struct LinExpr {
    terms: Vec<(Option<FrozenIndex>, String, f64)>,
    constant: f64,
}
