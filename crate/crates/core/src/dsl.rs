//! Text syntax for linear atomic constraints.
//!
//! ```text
//! constraint := expr ("<=" | ">=" | "=") expr
//! expr       := [sign] term (("+" | "-") term)*
//! term       := rat | rat "*" atom | atom
//! atom       := "p(" ident ")"
//! rat        := decimal | int "/" int
//! ```
//!
//! `≤`, `≥` and `π(` are accepted as aliases. Decimals are exact, so `0.7`
//! means `7/10`. `>=` is flipped into `<=`, and `=` becomes two constraints.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use num_traits::{One, Signed};

use crate::constraint::LinearAtomicConstraint;
use crate::graph::{is_identifier, ArgumentId};
use crate::rational::{format_exact, parse_rational, zero, Rational};

/// Syntax error at a 1-based line and column.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{line}:{column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Relation {
    AtMost,
    AtLeast,
    Equal,
}

/// Parses one constraint. Equalities yield two canonical constraints.
pub fn parse_constraint(text: &str) -> Result<Vec<LinearAtomicConstraint>, ParseError> {
    let mut parser = Parser { text, pos: 0 };
    let lhs = parser.expr()?;
    parser.skip_ws();
    let relation = parser.relation()?;
    let rhs = parser.expr()?;
    parser.skip_ws();
    if parser.pos < text.len() {
        return Err(parser.error("unexpected trailing input"));
    }
    let le = |l: &Linear, r: &Linear| {
        LinearAtomicConstraint::canonicalize(
            l.constant.clone(),
            l.terms.iter().cloned(),
            r.constant.clone(),
            r.terms.iter().cloned(),
        )
    };
    Ok(match relation {
        Relation::AtMost => vec![le(&lhs, &rhs)],
        Relation::AtLeast => vec![le(&rhs, &lhs)],
        Relation::Equal => vec![le(&lhs, &rhs), le(&rhs, &lhs)],
    })
}

/// Normative text form; `parse_constraint(print_constraint(c)) == [c]`.
pub fn print_constraint(c: &LinearAtomicConstraint) -> String {
    let mut out = String::new();
    for (i, (arg, coeff)) in c.terms().iter().enumerate() {
        let magnitude = coeff.abs();
        if i == 0 {
            if coeff.is_negative() {
                out.push('-');
            }
        } else {
            out.push_str(if coeff.is_negative() { " - " } else { " + " });
        }
        if !magnitude.is_one() {
            out.push_str(&format_exact(&magnitude));
            out.push('*');
        }
        out.push_str("p(");
        out.push_str(arg.as_str());
        out.push(')');
    }
    if out.is_empty() {
        out.push('0');
    }
    out.push_str(" <= ");
    out.push_str(&format_exact(c.bound()));
    out
}

struct Linear {
    constant: Rational,
    terms: Vec<(ArgumentId, Rational)>,
}

struct Parser<'a> {
    text: &'a str,
    pos: usize,
}

impl Parser<'_> {
    fn rest(&self) -> &str {
        &self.text[self.pos..]
    }

    fn peek(&self) -> Option<char> {
        self.rest().chars().next()
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.peek() {
            if !c.is_whitespace() {
                break;
            }
            self.pos += c.len_utf8();
        }
    }

    fn eat(&mut self, token: &str) -> bool {
        if self.rest().starts_with(token) {
            self.pos += token.len();
            true
        } else {
            false
        }
    }

    fn error_at(&self, pos: usize, message: impl Into<String>) -> ParseError {
        let before = &self.text[..pos];
        let line = before.matches('\n').count() + 1;
        let line_start = before.rfind('\n').map_or(0, |i| i + 1);
        let column = before[line_start..].chars().count() + 1;
        ParseError { line, column, message: message.into() }
    }

    fn error(&self, message: impl Into<String>) -> ParseError {
        self.error_at(self.pos, message)
    }

    fn relation(&mut self) -> Result<Relation, ParseError> {
        if self.eat("<=") || self.eat("≤") {
            Ok(Relation::AtMost)
        } else if self.eat(">=") || self.eat("≥") {
            Ok(Relation::AtLeast)
        } else if self.eat("=") {
            Ok(Relation::Equal)
        } else {
            Err(self.error("expected `<=`, `>=` or `=`"))
        }
    }

    fn expr(&mut self) -> Result<Linear, ParseError> {
        let mut linear = Linear { constant: zero(), terms: Vec::new() };
        self.skip_ws();
        let mut negative = false;
        if self.eat("-") {
            negative = true;
        } else {
            self.eat("+");
        }
        loop {
            self.skip_ws();
            let (coeff, atom) = self.term()?;
            let coeff = if negative { -coeff } else { coeff };
            match atom {
                Some(arg) => linear.terms.push((arg, coeff)),
                None => linear.constant += coeff,
            }
            self.skip_ws();
            if self.eat("+") {
                negative = false;
            } else if self.eat("-") {
                negative = true;
            } else {
                return Ok(linear);
            }
        }
    }

    fn term(&mut self) -> Result<(Rational, Option<ArgumentId>), ParseError> {
        if self.at_atom() {
            return Ok((Rational::one(), Some(self.atom()?)));
        }
        let coeff = self.rat()?;
        let save = self.pos;
        self.skip_ws();
        if self.eat("*") {
            self.skip_ws();
            if !self.at_atom() {
                return Err(self.error("expected `p(` after `*`"));
            }
            return Ok((coeff, Some(self.atom()?)));
        }
        self.pos = save;
        Ok((coeff, None))
    }

    fn at_atom(&self) -> bool {
        let rest = self.rest();
        let after = if let Some(r) = rest.strip_prefix('p') {
            r
        } else if let Some(r) = rest.strip_prefix('π') {
            r
        } else {
            return false;
        };
        after.trim_start().starts_with('(')
    }

    fn atom(&mut self) -> Result<ArgumentId, ParseError> {
        if !(self.eat("p") || self.eat("π")) {
            return Err(self.error("expected `p(`"));
        }
        self.skip_ws();
        if !self.eat("(") {
            return Err(self.error("expected `(`"));
        }
        self.skip_ws();
        let start = self.pos;
        while let Some(c) = self.peek() {
            if !(c.is_ascii_alphanumeric() || c == '_') {
                break;
            }
            self.pos += 1;
        }
        let name = &self.text[start..self.pos];
        if !is_identifier(name) {
            return Err(self.error("expected argument name"));
        }
        self.skip_ws();
        if !self.eat(")") {
            return Err(self.error("expected `)`"));
        }
        ArgumentId::new(name).map_err(|e| self.error_at(start, e.to_string()))
    }

    fn rat(&mut self) -> Result<Rational, ParseError> {
        let start = self.pos;
        self.digits();
        let int_end = self.pos;
        if self.eat(".") {
            self.digits();
        } else if int_end > start {
            let save = self.pos;
            self.skip_ws();
            if self.eat("/") {
                self.skip_ws();
                let den_start = self.pos;
                self.digits();
                if self.pos == den_start {
                    return Err(self.error("expected denominator"));
                }
            } else {
                self.pos = save;
            }
        }
        if self.pos == start {
            return Err(self.error("expected a number or `p(`"));
        }
        let literal: String = self.text[start..self.pos].split_whitespace().collect();
        parse_rational(&literal).map_err(|e| self.error_at(start, format!("{e}")))
    }

    fn digits(&mut self) {
        while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            self.pos += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    fn id(s: &str) -> ArgumentId {
        ArgumentId::new(s).unwrap()
    }

    fn single(text: &str) -> LinearAtomicConstraint {
        let mut cs = parse_constraint(text).unwrap();
        assert_eq!(cs.len(), 1, "{text}");
        cs.pop().unwrap()
    }

    #[test]
    fn at_least_flips_sign() {
        assert_eq!(single("p(T3) >= 0.7"), LinearAtomicConstraint::new([(id("T3"), int(-1))], ratio(-7, 10)));
        assert_eq!(single("p(E1) >= 0.9"), LinearAtomicConstraint::new([(id("E1"), int(-1))], ratio(-9, 10)));
        assert_eq!(single("0.5 <= p(C)"), LinearAtomicConstraint::new([(id("C"), int(-1))], ratio(-1, 2)));
    }

    #[test]
    fn equality_is_two_constraints() {
        let cs = parse_constraint("p(A) = 1").unwrap();
        assert_eq!(
            cs,
            vec![
                LinearAtomicConstraint::new([(id("A"), int(1))], int(1)),
                LinearAtomicConstraint::new([(id("A"), int(-1))], int(-1)),
            ]
        );
    }

    #[test]
    fn mixed_expressions() {
        let c = single("1/2*p(A) + 0.25 * p(B) - p(C) + 1 <= 2 - p(A)");
        assert_eq!(
            c,
            LinearAtomicConstraint::new([(id("A"), ratio(3, 2)), (id("B"), ratio(1, 4)), (id("C"), int(-1))], int(1))
        );
        assert_eq!(single("π(A) + π(B) ≤ 1"), single("p(A)+p(B)<=1"));
        assert_eq!(single("-p(A) >= -1"), single("p(A) <= 1"));
        assert_eq!(single("3 / 4 * p(x_1) <= 1"), LinearAtomicConstraint::new([(id("x_1"), ratio(3, 4))], int(1)));
    }

    #[test]
    fn printing() {
        let c = LinearAtomicConstraint::new([(id("A"), int(1)), (id("B"), int(1))], int(1));
        assert_eq!(print_constraint(&c), "p(A) + p(B) <= 1");
        let c = LinearAtomicConstraint::new([(id("T3"), int(-1))], ratio(-7, 10));
        assert_eq!(print_constraint(&c), "-p(T3) <= -7/10");
        let c = LinearAtomicConstraint::new([], int(0));
        assert_eq!(print_constraint(&c), "0 <= 0");
        let c = LinearAtomicConstraint::new([(id("A"), ratio(-1, 2)), (id("B"), ratio(-9, 10))], int(0));
        assert_eq!(print_constraint(&c), "-1/2*p(A) - 9/10*p(B) <= 0");
    }

    #[test]
    fn errors_carry_positions() {
        let e = parse_constraint("p(A) < 1").unwrap_err();
        assert_eq!((e.line, e.column), (1, 6));
        let e = parse_constraint("p(A) <= ").unwrap_err();
        assert_eq!((e.line, e.column), (1, 9));
        let e = parse_constraint("p(A) +\n p() <= 1").unwrap_err();
        assert_eq!((e.line, e.column), (2, 4));
        assert!(parse_constraint("p(A) <= 1/0").is_err());
        assert!(parse_constraint("2 * 3 <= 1").is_err());
        assert!(parse_constraint("p(A) <= 1 1").is_err());
        assert!(parse_constraint("p(A) + + p(B) <= 1").is_err());
        assert!(parse_constraint("").is_err());
    }
}
