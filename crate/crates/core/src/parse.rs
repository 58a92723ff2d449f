//! Concrete syntax for formulas.
//!
//! Grammar, loosest to tightest binding:
//!
//! ```text
//! imp  ::= or ("->" imp)?                  right associative
//! or   ::= and ("|" and)*
//! and  ::= unary ("&" unary)*
//! unary::= "~" unary | "[]" ("^" digits)? unary | atom
//! atom ::= "bot" | ident | "(" imp ")"
//! ident::= [a-z][a-zA-Z0-9_]*
//! ```
//!
//! `[]^k` abbreviates `k` consecutive boxes. Input is ASCII; offsets in
//! spans are character offsets.

use alloc::borrow::ToOwned;
use alloc::format;
use alloc::string::String;

use crate::formula::Formula;

/// Half-open character range into the source text.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SourceSpan {
    pub start: usize,
    pub end: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseError {
    pub message: String,
    pub span: SourceSpan,
}

impl core::fmt::Display for ParseError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(
            f,
            "{} at {}..{}",
            self.message, self.span.start, self.span.end
        )
    }
}

const MAX_BOX_POWER: u32 = 4096;

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn err<T>(&self, message: String, start: usize) -> Result<T, ParseError> {
        Err(ParseError {
            message,
            span: SourceSpan {
                start,
                end: self.pos.max(start),
            },
        })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, lit: &str) -> bool {
        if self.src[self.pos..].starts_with(lit.as_bytes()) {
            self.pos += lit.len();
            true
        } else {
            false
        }
    }

    fn parse_imp(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.parse_or()?;
        self.skip_ws();
        if self.eat("->") {
            let rhs = self.parse_imp()?;
            Ok(Formula::imp(lhs, rhs))
        } else {
            Ok(lhs)
        }
    }

    fn parse_or(&mut self) -> Result<Formula, ParseError> {
        let mut acc = self.parse_and()?;
        loop {
            self.skip_ws();
            if self.peek() == Some(b'|') {
                self.pos += 1;
                let rhs = self.parse_and()?;
                acc = Formula::or(acc, rhs);
            } else {
                return Ok(acc);
            }
        }
    }

    fn parse_and(&mut self) -> Result<Formula, ParseError> {
        let mut acc = self.parse_unary()?;
        loop {
            self.skip_ws();
            if self.peek() == Some(b'&') {
                self.pos += 1;
                let rhs = self.parse_unary()?;
                acc = Formula::and(acc, rhs);
            } else {
                return Ok(acc);
            }
        }
    }

    fn parse_unary(&mut self) -> Result<Formula, ParseError> {
        self.skip_ws();
        let start = self.pos;
        match self.peek() {
            Some(b'~') => {
                self.pos += 1;
                Ok(Formula::neg(self.parse_unary()?))
            }
            Some(b'[') => {
                if !self.eat("[]") {
                    return self.err("expected \"[]\"".to_owned(), start);
                }
                let power = if self.peek() == Some(b'^') {
                    self.pos += 1;
                    self.parse_box_power(start)?
                } else {
                    1
                };
                Ok(Formula::box_power(power, self.parse_unary()?))
            }
            _ => self.parse_atom(),
        }
    }

    fn parse_box_power(&mut self, start: usize) -> Result<u32, ParseError> {
        let digits_start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        if self.pos == digits_start {
            return self.err("expected digits after \"[]^\"".to_owned(), start);
        }
        let text = core::str::from_utf8(&self.src[digits_start..self.pos]).unwrap();
        match text.parse::<u32>() {
            Ok(k) if k <= MAX_BOX_POWER => Ok(k),
            _ => self.err(format!("box power exceeds {}", MAX_BOX_POWER), start),
        }
    }

    fn parse_atom(&mut self) -> Result<Formula, ParseError> {
        self.skip_ws();
        let start = self.pos;
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let inner = self.parse_imp()?;
                self.skip_ws();
                if self.peek() == Some(b')') {
                    self.pos += 1;
                    Ok(inner)
                } else {
                    self.err("expected \")\"".to_owned(), start)
                }
            }
            Some(c) if c.is_ascii_lowercase() => {
                while self
                    .peek()
                    .is_some_and(|c| c.is_ascii_alphanumeric() || c == b'_')
                {
                    self.pos += 1;
                }
                let name = core::str::from_utf8(&self.src[start..self.pos]).unwrap();
                if name == "bot" {
                    Ok(Formula::Bot)
                } else {
                    Ok(Formula::var(name))
                }
            }
            Some(c) => self.err(format!("unexpected character {:?}", c as char), start),
            None => self.err("unexpected end of input".to_owned(), start),
        }
    }
}

/// Parses a formula from its concrete syntax.
pub fn parse_formula(text: &str) -> Result<Formula, ParseError> {
    if !text.is_ascii() {
        return Err(ParseError {
            message: "input must be ASCII".to_owned(),
            span: SourceSpan {
                start: 0,
                end: text.chars().count(),
            },
        });
    }
    let mut p = Parser {
        src: text.as_bytes(),
        pos: 0,
    };
    let f = p.parse_imp()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        let start = p.pos;
        return p.err("trailing input".to_owned(), start);
    }
    Ok(f)
}

/// Prints `a` with minimal parentheses; `parse_formula` recovers `a` exactly.
pub fn render_formula(a: &Formula) -> String {
    let mut out = String::new();
    render(a, Prec::Imp, &mut out);
    out
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Prec {
    Imp,
    Or,
    And,
    Unary,
}

fn render(a: &Formula, ctx: Prec, out: &mut String) {
    let prec = match a {
        Formula::Var(_) | Formula::Bot => Prec::Unary,
        Formula::Neg(_) | Formula::Box(_) => Prec::Unary,
        Formula::And(..) => Prec::And,
        Formula::Or(..) => Prec::Or,
        Formula::Imp(..) => Prec::Imp,
    };
    let need_parens = prec < ctx;
    if need_parens {
        out.push('(');
    }
    match a {
        Formula::Var(v) => out.push_str(v),
        Formula::Bot => out.push_str("bot"),
        Formula::Neg(x) => {
            out.push('~');
            render(x, Prec::Unary, out);
        }
        Formula::Box(x) => {
            out.push_str("[]");
            render(x, Prec::Unary, out);
        }
        Formula::And(x, y) => {
            // left associative: the right operand must bind tighter
            render(x, Prec::And, out);
            out.push_str(" & ");
            render(y, Prec::Unary, out);
        }
        Formula::Or(x, y) => {
            render(x, Prec::Or, out);
            out.push_str(" | ");
            render(y, Prec::And, out);
        }
        Formula::Imp(x, y) => {
            render(x, Prec::Or, out);
            out.push_str(" -> ");
            // right associative: a -> b -> c needs no parens
            render(y, Prec::Imp, out);
        }
    }
    if need_parens {
        out.push(')');
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p() -> Formula {
        Formula::var("p")
    }

    fn q() -> Formula {
        Formula::var("q")
    }

    #[test]
    fn parses_boxes_and_implication() {
        let f = parse_formula("[]p -> [][]p").unwrap();
        assert_eq!(
            f,
            Formula::imp(Formula::boxed(p()), Formula::box_power(2, p()))
        );
    }

    #[test]
    fn parses_box_power_sugar() {
        assert_eq!(
            parse_formula("[]^3 bot").unwrap(),
            Formula::box_power(3, Formula::Bot)
        );
        assert_eq!(parse_formula("[]^0 p").unwrap(), p());
    }

    #[test]
    fn rejects_truncated_input() {
        assert!(parse_formula("p ->").is_err());
        assert!(parse_formula("").is_err());
        assert!(parse_formula("(p").is_err());
        assert!(parse_formula("p q").is_err());
    }

    #[test]
    fn precedence_and_associativity() {
        assert_eq!(
            parse_formula("p & q | p -> q").unwrap(),
            Formula::imp(Formula::or(Formula::and(p(), q()), p()), q())
        );
        assert_eq!(
            parse_formula("p -> q -> p").unwrap(),
            Formula::imp(p(), Formula::imp(q(), p()))
        );
        assert_eq!(
            parse_formula("~[]p & q").unwrap(),
            Formula::and(Formula::neg(Formula::boxed(p())), q())
        );
    }

    #[test]
    fn renders_examples() {
        assert_eq!(render_formula(&Formula::boxed(p())), "[]p");
        assert_eq!(render_formula(&Formula::Bot), "bot");
        let f = Formula::imp(p(), Formula::imp(q(), p()));
        let rendered = render_formula(&f);
        assert_eq!(parse_formula(&rendered).unwrap(), f);
    }

    #[test]
    fn round_trips_nested_shapes() {
        let samples = [
            Formula::imp(Formula::imp(p(), q()), p()),
            Formula::neg(Formula::and(p(), Formula::or(q(), Formula::Bot))),
            Formula::boxed(Formula::imp(Formula::boxed(p()), q())),
            Formula::and(Formula::and(p(), q()), Formula::and(q(), p())),
            Formula::or(p(), Formula::or(q(), p())),
        ];
        for f in samples {
            assert_eq!(parse_formula(&render_formula(&f)).unwrap(), f);
        }
    }
}
