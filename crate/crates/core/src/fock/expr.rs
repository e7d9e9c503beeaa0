//! Parser for ket expressions such as `(|11>+i|02>+i|20>)/sqrt3`.
//!
//! Grammar (whitespace ignored):
//!
//! ```text
//! expr    := ( '(' sum ')' | sum ) ( '/' divisor )?
//! sum     := sign? term ( sign term )*
//! term    := factor* ket
//! factor  := number | 'i' | 'sqrt' number | 'sqrt(' number ')' | '*'
//! ket     := '|' digits '>' | '|' int (',' int)* '>'
//! divisor := number | 'sqrt' number | 'sqrt(' number ')'
//! ```

use super::{FockSector, FockState, Occupation};
use crate::error::{Error, Result};
use crate::linalg::{CVec, C64};

struct Parser {
    chars: Vec<char>,
    pos: usize,
}

fn perr(msg: impl Into<String>) -> Error {
    Error::Parse(msg.into())
}

impl Parser {
    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn eat_word(&mut self, w: &str) -> bool {
        let end = self.pos + w.len();
        if end <= self.chars.len() && self.chars[self.pos..end].iter().copied().eq(w.chars()) {
            self.pos = end;
            true
        } else {
            false
        }
    }

    fn number(&mut self) -> Result<f64> {
        let start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_digit() || c == '.' || c == 'e') {
            self.pos += 1;
        }
        let s: String = self.chars[start..self.pos].iter().collect();
        s.parse::<f64>()
            .map_err(|_| perr(format!("expected a number at position {start}, found `{s}`")))
    }

    fn sqrt_arg(&mut self) -> Result<f64> {
        let v = if self.eat('(') {
            let v = self.number()?;
            if !self.eat(')') {
                return Err(perr(format!("missing `)` after sqrt argument at position {}", self.pos)));
            }
            v
        } else {
            self.number()?
        };
        Ok(v.sqrt())
    }

    fn ket(&mut self) -> Result<Occupation> {
        let start = self.pos;
        if !self.eat('|') {
            return Err(perr(format!("expected `|` at position {start}")));
        }
        let mut body = String::new();
        while let Some(c) = self.peek() {
            if c == '>' {
                break;
            }
            body.push(c);
            self.pos += 1;
        }
        if !self.eat('>') {
            return Err(perr(format!("unterminated ket starting at position {start}")));
        }
        let occ: Option<Vec<u32>> = if body.contains(',') {
            body.split(',').map(|t| t.parse().ok()).collect()
        } else {
            body.chars().map(|c| c.to_digit(10)).collect()
        };
        match occ {
            Some(v) if !v.is_empty() => Ok(Occupation(v)),
            _ => Err(perr(format!("invalid ket `|{body}>` at position {start}"))),
        }
    }

    fn term(&mut self, sign: f64) -> Result<(Occupation, C64)> {
        let mut coef = C64::new(sign, 0.0);
        loop {
            match self.peek() {
                Some('|') => return Ok((self.ket()?, coef)),
                Some('i') => {
                    self.pos += 1;
                    coef *= C64::new(0.0, 1.0);
                }
                Some('*') => self.pos += 1,
                Some('s') if self.eat_word("sqrt") => coef *= self.sqrt_arg()?,
                Some(c) if c.is_ascii_digit() || c == '.' => coef *= self.number()?,
                Some(c) => return Err(perr(format!("unexpected `{c}` at position {}", self.pos))),
                None => return Err(perr("expression ends inside a term")),
            }
        }
    }

    fn sum(&mut self) -> Result<Vec<(Occupation, C64)>> {
        let mut terms = Vec::new();
        let mut sign = if self.eat('-') {
            -1.0
        } else {
            self.eat('+');
            1.0
        };
        loop {
            terms.push(self.term(sign)?);
            sign = if self.eat('+') {
                1.0
            } else if self.eat('-') {
                -1.0
            } else {
                return Ok(terms);
            };
        }
    }

    fn expr(&mut self) -> Result<Vec<(Occupation, C64)>> {
        let mut terms = if self.eat('(') {
            let t = self.sum()?;
            if !self.eat(')') {
                return Err(perr(format!("expected `)` at position {}", self.pos)));
            }
            t
        } else {
            self.sum()?
        };
        if self.eat('/') {
            let d = if self.eat_word("sqrt") {
                self.sqrt_arg()?
            } else {
                self.number()?
            };
            if d == 0.0 {
                return Err(perr("division by zero"));
            }
            for (_, c) in &mut terms {
                *c /= d;
            }
        }
        if self.pos != self.chars.len() {
            return Err(perr(format!("trailing input at position {}", self.pos)));
        }
        Ok(terms)
    }
}

/// Parses an expression into (occupation, coefficient) terms without normalizing.
/// Repeated kets are summed.
pub fn parse_terms(text: &str) -> Result<Vec<(Occupation, C64)>> {
    let chars: Vec<char> = text.chars().filter(|c| !c.is_whitespace()).collect();
    if chars.is_empty() {
        return Err(perr("empty state expression"));
    }
    let raw = Parser { chars, pos: 0 }.expr()?;
    let mut out: Vec<(Occupation, C64)> = Vec::new();
    for (o, c) in raw {
        match out.iter_mut().find(|(p, _)| *p == o) {
            Some((_, acc)) => *acc += c,
            None => out.push((o, c)),
        }
    }
    Ok(out)
}

/// Parses a ket expression into a normalized state on the sector implied by the kets.
pub fn parse_state(text: &str) -> Result<FockState> {
    let terms = parse_terms(text)?;
    let (m, n) = (terms[0].0.n_modes(), terms[0].0.total());
    if let Some((o, _)) = terms.iter().find(|(o, _)| o.n_modes() != m || o.total() != n) {
        return Err(perr(format!(
            "ket |{o}> does not match the {m}-mode, {n}-phonon sector of the first ket"
        )));
    }
    let sector = FockSector::new(m, n)?;
    let mut amps = CVec::zeros(sector.dim());
    for (o, c) in &terms {
        amps[sector.index_of(o).expect("occupation in sector")] += *c;
    }
    let norm = amps.norm();
    if norm == 0.0 {
        return Err(perr("state expression has zero norm"));
    }
    FockState::new(sector, amps.unscale(norm))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn three_term_state() {
        let s = parse_state("(|11>+i|02>+i|20>)/sqrt3").unwrap();
        let sec = s.sector();
        let a = s.amplitudes();
        let r = 1.0 / 3f64.sqrt();
        assert!((a[sec.index_of_slice(&[1, 1]).unwrap()] - C64::new(r, 0.0)).norm() < 1e-15);
        assert!((a[sec.index_of_slice(&[0, 2]).unwrap()] - C64::new(0.0, r)).norm() < 1e-15);
    }

    #[test]
    fn unnormalized_input_is_renormalized() {
        let s = parse_state("|10> - 2i |01>").unwrap();
        assert!((s.amplitudes().norm() - 1.0).abs() < 1e-15);
        assert!((s.amplitudes()[1] / s.amplitudes()[0] - C64::new(0.0, -2.0)).norm() < 1e-14);
    }

    #[test]
    fn comma_kets_and_sqrt_factors() {
        let t = parse_terms("sqrt(2)|10,0> + 0.5*|0,10>").unwrap();
        assert_eq!(t[0].0, Occupation(vec![10, 0]));
        assert!((t[0].1.re - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(t[1].1, C64::new(0.5, 0.0));
    }

    #[test]
    fn errors() {
        assert!(parse_state("").is_err());
        assert!(parse_state("|10>+|011>").is_err());
        assert!(parse_state("|10>+|02>").is_err());
        assert!(parse_state("(|10>").is_err());
        assert!(parse_state("|1x>").is_err());
        assert!(parse_state("|10> - |10>").is_err());
    }
}
