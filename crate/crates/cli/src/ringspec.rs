//! Parser for ring specifications.
//!
//! Grammar, case-insensitive with whitespace ignored:
//! `Z/n`, `GF(q)`, `Z/n[y]/(y^k - c)`, `loc(atom, p)`, and products
//! `atom x atom x ...`. Errors carry the byte position in the input.

use chevring::{Elem, Error, Ring};

struct Cursor {
    chars: Vec<(usize, char)>,
    end: usize,
    pos: usize,
}

impl Cursor {
    fn new(input: &str) -> Cursor {
        Cursor {
            chars: input
                .char_indices()
                .filter(|(_, c)| !c.is_whitespace())
                .map(|(i, c)| (i, c.to_ascii_lowercase()))
                .collect(),
            end: input.len(),
            pos: 0,
        }
    }

    fn at(&self) -> usize {
        self.chars.get(self.pos).map(|&(i, _)| i).unwrap_or(self.end)
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).map(|&(_, c)| c)
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek();
        if c.is_some() {
            self.pos += 1;
        }
        c
    }

    fn eat(&mut self, want: char) -> bool {
        if self.peek() == Some(want) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, want: char) -> Result<(), Error> {
        if self.eat(want) {
            Ok(())
        } else {
            Err(self.error(&format!("expected '{want}'")))
        }
    }

    fn error(&self, msg: &str) -> Error {
        Error::Parse { pos: self.at(), msg: msg.into() }
    }

    fn number(&mut self) -> Result<u64, Error> {
        let start = self.pos;
        while self.peek().map(|c| c.is_ascii_digit()).unwrap_or(false) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("expected a number"));
        }
        let text: String = self.chars[start..self.pos].iter().map(|&(_, c)| c).collect();
        text.parse().map_err(|_| self.error("number out of range"))
    }

    fn letter(&mut self) -> Result<char, Error> {
        match self.peek() {
            Some(c) if c.is_ascii_alphabetic() => {
                self.pos += 1;
                Ok(c)
            }
            _ => Err(self.error("expected a variable letter")),
        }
    }

    fn done(&self) -> bool {
        self.pos == self.chars.len()
    }
}

pub fn parse_ring_spec(input: &str) -> Result<Ring, Error> {
    let mut cur = Cursor::new(input);
    if cur.done() {
        return Err(cur.error("empty ring spec"));
    }
    let mut factors = vec![atom(&mut cur)?];
    while cur.eat('x') {
        factors.push(atom(&mut cur)?);
    }
    if !cur.done() {
        return Err(cur.error("unexpected trailing input"));
    }
    if factors.len() == 1 {
        Ok(factors.into_iter().next().expect("one factor"))
    } else {
        Ring::product(factors)
    }
}

fn atom(cur: &mut Cursor) -> Result<Ring, Error> {
    match cur.peek() {
        Some('z') => {
            cur.bump();
            cur.expect('/')?;
            let n = cur.number()?;
            let base = Ring::zn(n)?;
            if cur.peek() == Some('[') {
                quotient_tail(cur, base)
            } else {
                Ok(base)
            }
        }
        Some('g') => {
            cur.bump();
            cur.expect('f')?;
            cur.expect('(')?;
            let q = cur.number()?;
            cur.expect(')')?;
            Ring::galois_field(q)
        }
        Some('l') => {
            cur.bump();
            cur.expect('o')?;
            cur.expect('c')?;
            cur.expect('(')?;
            let base = atom(cur)?;
            cur.expect(',')?;
            let parens = cur.eat('(');
            let ppos = cur.at();
            let p = cur.number()?;
            if parens {
                cur.expect(')')?;
            }
            cur.expect(')')?;
            localize(base, p, ppos)
        }
        _ => Err(cur.error("expected Z/n, GF(q), or loc(...)")),
    }
}

/// The `[y]/(y^k - c)` tail of a quotient extension.
fn quotient_tail(cur: &mut Cursor, base: Ring) -> Result<Ring, Error> {
    cur.expect('[')?;
    let var = cur.letter()?;
    cur.expect(']')?;
    cur.expect('/')?;
    cur.expect('(')?;
    let var2 = cur.letter()?;
    if var2 != var {
        return Err(cur.error("modulus must use the same variable"));
    }
    cur.expect('^')?;
    let k = cur.number()?;
    let negative = if cur.eat('-') {
        true
    } else if cur.eat('+') {
        false
    } else {
        return Err(cur.error("expected '+' or '-' before the constant term"));
    };
    let c = cur.number()? as i128;
    cur.expect(')')?;
    // y^k - c = 0 adjoins a k-th root of c.
    let lambda = base.int(if negative { c } else { -c });
    Ring::quotient_extension(base, k as usize, lambda)
}

fn localize(base: Ring, p: u64, pos: usize) -> Result<Ring, Error> {
    let pe: Elem = base.int(p as i128);
    let containing: Vec<_> = base
        .maximal_ideals()?
        .into_iter()
        .filter(|m| m.contains(&pe))
        .collect();
    match containing.len() {
        1 => Ring::localize_at(base, &containing[0]),
        0 => Err(Error::Parse {
            pos,
            msg: format!("{p} is invertible here and generates no maximal ideal"),
        }),
        _ => Err(Error::Parse { pos, msg: format!("{p} lies in more than one maximal ideal") }),
    }
}
