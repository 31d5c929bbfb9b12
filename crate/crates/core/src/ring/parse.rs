//! Text forms for rings and their elements.
//!
//! Ring grammar (case-insensitive, whitespace ignored):
//!
//! ```text
//! spec  := atom (('x' | '*') atom)*
//! atom  := core tail?
//! core  := 'Z' ('/' nat)? | 'GF' '(' nat ')' | 'loc' '(' spec ',' gens ')'
//! tail  := '[' var ']' '/' '(' poly ')'
//! gens  := elem (',' elem)* possibly wrapped in one pair of parens
//! ```
//!
//! A tail of the shape `y^k - c` builds a k-th root adjunction (c must be
//! invertible); any other monic integer polynomial builds a plain quotient.

use super::{Elem, Ring, RingKind};
use crate::{Error, Result};

pub fn parse_ring(input: &str) -> Result<Ring> {
    let mut p = P::new(input);
    let r = p.ring_spec()?;
    p.skip_ws();
    if !p.done() {
        return Err(p.err("unexpected trailing input"));
    }
    Ok(r)
}

pub(super) fn parse_elem(ring: &Ring, input: &str) -> Result<Elem> {
    let mut p = P::new(input);
    let e = p.elem(ring)?;
    p.skip_ws();
    if !p.done() {
        return Err(p.err("unexpected trailing input"));
    }
    Ok(e)
}

struct P {
    chars: Vec<char>,
    i: usize,
}

impl P {
    fn new(s: &str) -> P {
        P { chars: s.chars().collect(), i: 0 }
    }

    fn err(&self, msg: &str) -> Error {
        Error::Parse { pos: self.i, msg: msg.to_string() }
    }

    fn done(&self) -> bool {
        self.i >= self.chars.len()
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.i).copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek();
        if c.is_some() {
            self.i += 1;
        }
        c
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(c) if c.is_whitespace()) {
            self.i += 1;
        }
    }

    fn eat(&mut self, c: char) -> bool {
        self.skip_ws();
        if self.peek() == Some(c) {
            self.i += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.err(&format!("expected '{c}'")))
        }
    }

    fn ident(&mut self) -> String {
        self.skip_ws();
        let mut s = String::new();
        while matches!(self.peek(), Some(c) if c.is_ascii_alphabetic()) {
            s.push(self.bump().expect("peeked"));
        }
        s
    }

    fn nat(&mut self) -> Result<u64> {
        self.skip_ws();
        let start = self.i;
        let mut v: u64 = 0;
        while let Some(c) = self.peek() {
            let Some(d) = c.to_digit(10) else { break };
            v = v
                .checked_mul(10)
                .and_then(|v| v.checked_add(d as u64))
                .ok_or_else(|| self.err("number too large"))?;
            self.i += 1;
        }
        if self.i == start {
            return Err(self.err("expected a number"));
        }
        Ok(v)
    }

    fn int(&mut self) -> Result<i128> {
        self.skip_ws();
        let neg = if self.peek() == Some('-') {
            self.i += 1;
            true
        } else {
            if self.peek() == Some('+') {
                self.i += 1;
            }
            false
        };
        let v = self.nat()? as i128;
        Ok(if neg { -v } else { v })
    }

    // -- ring grammar -------------------------------------------------------

    fn ring_spec(&mut self) -> Result<Ring> {
        let mut factors = vec![self.atom()?];
        loop {
            self.skip_ws();
            match self.peek() {
                Some('x') | Some('X') | Some('*') => {
                    self.i += 1;
                    factors.push(self.atom()?);
                }
                _ => break,
            }
        }
        if factors.len() == 1 {
            Ok(factors.pop().expect("one factor"))
        } else {
            Ring::product(factors)
        }
    }

    fn atom(&mut self) -> Result<Ring> {
        let at = {
            self.skip_ws();
            self.i
        };
        let name = self.ident().to_ascii_lowercase();
        let core = match name.as_str() {
            "z" => {
                if self.eat('/') {
                    let n = self.nat()?;
                    Ring::zn(n).map_err(|e| Error::Parse { pos: at, msg: e.to_string() })?
                } else {
                    Ring::integers()
                }
            }
            "gf" => {
                self.expect('(')?;
                let q = self.nat()?;
                self.expect(')')?;
                Ring::galois_field(q).map_err(|e| Error::Parse { pos: at, msg: e.to_string() })?
            }
            "loc" => {
                self.expect('(')?;
                let base = self.ring_spec()?;
                self.expect(',')?;
                let gens = self.ideal_gens(&base)?;
                self.expect(')')?;
                let ideal = base
                    .ideal(gens)
                    .map_err(|e| Error::Parse { pos: at, msg: e.to_string() })?;
                Ring::localize_at(base, &ideal)
                    .map_err(|e| Error::Parse { pos: at, msg: e.to_string() })?
            }
            "" => return Err(self.err("expected a ring: Z/n, GF(q), or loc(R, p)")),
            other => {
                self.i = at;
                return Err(self.err(&format!("unknown ring constructor '{other}'")));
            }
        };
        self.skip_ws();
        if self.peek() == Some('[') {
            self.quotient_tail(core)
        } else {
            Ok(core)
        }
    }

    /// `[y]/(poly in y)` after a base ring.
    fn quotient_tail(&mut self, base: Ring) -> Result<Ring> {
        self.expect('[')?;
        let var = self.ident().to_ascii_lowercase();
        if var.len() != 1 {
            return Err(self.err("expected a single-letter variable"));
        }
        self.expect(']')?;
        self.expect('/')?;
        self.expect('(')?;
        let at = self.i;
        let coeffs = self.int_poly(&var)?;
        self.expect(')')?;
        let deg = coeffs.len().saturating_sub(1);
        if deg < 1 || coeffs[deg] != 1 {
            return Err(Error::Parse { pos: at, msg: "modulus must be monic of degree >= 1".into() });
        }
        // y^k - c with all middle coefficients zero is a root adjunction and
        // gets its invertibility check; otherwise build the plain quotient.
        let pure_tail = coeffs[1..deg].iter().all(|&c| c == 0);
        let ring = if pure_tail {
            Ring::quotient_extension(base.clone(), deg, base.int(-coeffs[0]))
        } else {
            let modulus = coeffs.iter().map(|&c| base.int(c)).collect();
            Ring::poly_quot(base, modulus, &var)
        };
        ring.map_err(|e| Error::Parse { pos: at, msg: e.to_string() })
    }

    /// Integer polynomial in `var`, constant coefficient first.
    fn int_poly(&mut self, var: &str) -> Result<Vec<i128>> {
        let mut coeffs: Vec<i128> = Vec::new();
        let mut sign = 1i128;
        loop {
            self.skip_ws();
            let (coeff, power) = self.int_term(var)?;
            if coeffs.len() < power + 1 {
                coeffs.resize(power + 1, 0);
            }
            coeffs[power] += sign * coeff;
            self.skip_ws();
            match self.peek() {
                Some('+') => {
                    self.i += 1;
                    sign = 1;
                }
                Some('-') => {
                    self.i += 1;
                    sign = -1;
                }
                _ => break,
            }
        }
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        Ok(coeffs)
    }

    /// One term: `c`, `c*y^k`, `y^k`, `c*y`, or `y`.
    fn int_term(&mut self, var: &str) -> Result<(i128, usize)> {
        self.skip_ws();
        let mut coeff = 1i128;
        let mut have_coeff = false;
        if matches!(self.peek(), Some(c) if c.is_ascii_digit() || c == '-' || c == '+') {
            coeff = self.int()?;
            have_coeff = true;
            self.skip_ws();
            if self.peek() == Some('*') {
                self.i += 1;
            } else if !matches!(self.peek(), Some(c) if c.is_ascii_alphabetic()) {
                return Ok((coeff, 0));
            }
        }
        self.skip_ws();
        if matches!(self.peek(), Some(c) if c.is_ascii_alphabetic()) {
            let v = self.ident().to_ascii_lowercase();
            if v != var {
                return Err(self.err(&format!("expected variable '{var}', found '{v}'")));
            }
            let power = if self.eat('^') { self.nat()? as usize } else { 1 };
            Ok((coeff, power))
        } else if have_coeff {
            Ok((coeff, 0))
        } else {
            Err(self.err("expected a term"))
        }
    }

    /// Generators for a localization ideal. A single pair of wrapping parens
    /// is allowed when the base is not itself a product (whose element
    /// literals already use parens).
    fn ideal_gens(&mut self, base: &Ring) -> Result<Vec<Elem>> {
        self.skip_ws();
        let wrapped = !matches!(base.kind(), RingKind::Product { .. }) && self.peek() == Some('(');
        if wrapped {
            self.i += 1;
        }
        let mut gens = vec![self.elem(base)?];
        while self.eat(',') {
            gens.push(self.elem(base)?);
        }
        if wrapped {
            self.expect(')')?;
        }
        Ok(gens)
    }

    // -- element literals ---------------------------------------------------

    fn elem(&mut self, ring: &Ring) -> Result<Elem> {
        self.skip_ws();
        match ring.kind() {
            RingKind::Int | RingKind::Zn { .. } => Ok(ring.int(self.int()?)),
            RingKind::Product { factors } => {
                if self.peek() == Some('(') {
                    self.i += 1;
                    let mut parts = Vec::with_capacity(factors.len());
                    for (k, f) in factors.iter().enumerate() {
                        if k > 0 {
                            self.expect(',')?;
                        }
                        parts.push(self.elem(f)?);
                    }
                    self.expect(')')?;
                    Ok(ring.normalize(Elem::Tuple(parts)))
                } else {
                    Ok(ring.int(self.int()?))
                }
            }
            RingKind::PolyQuot { base, var, .. } | RingKind::Poly { base, var } => {
                let coeffs = self.int_poly(var)?;
                let elems = coeffs.into_iter().map(|c| base.int(c)).collect();
                Ok(ring.normalize(Elem::Poly(elems)))
            }
            RingKind::Fractions { base, .. } => {
                let at = self.i;
                let a = self.int()?;
                if self.eat('/') {
                    let s = self.int()?;
                    ring.frac(base.int(a), base.int(s))
                        .map_err(|e| Error::Parse { pos: at, msg: e.to_string() })
                } else {
                    ring.from_base(base.int(a))
                        .map_err(|e| Error::Parse { pos: at, msg: e.to_string() })
                }
            }
        }
    }
}
