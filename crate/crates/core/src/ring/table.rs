//! Dense operation tables for small finite rings.
//!
//! Group closures and exhaustive relation sweeps do millions of ring
//! operations; going through `Elem` allocation for each is too slow in debug
//! builds. This layer codes elements as `u16` and either computes residues
//! directly (Z/n) or precomputes full operation tables (any other finite
//! ring up to a size cap).

use super::{Elem, Ring};
use crate::{Error, Result};
use std::collections::HashMap;

const TABLE_CAP: usize = 1024;
const NO_INV: u16 = u16::MAX;

enum Repr {
    /// Residues mod n, coded as themselves.
    Direct { n: u64 },
    /// Arbitrary finite ring with precomputed tables, coded by carrier index.
    Table {
        size: usize,
        add: Vec<u16>,
        mul: Vec<u16>,
        neg: Vec<u16>,
        inv: Vec<u16>,
        elems: Vec<Elem>,
        index: HashMap<Elem, u16>,
        zero: u16,
        one: u16,
    },
}

pub struct FastRing {
    pub ring: Ring,
    repr: Repr,
}

impl FastRing {
    pub fn new(ring: &Ring) -> Result<FastRing> {
        if let Some(n) = ring.is_zn() {
            if n <= u16::MAX as u64 {
                return Ok(FastRing { ring: ring.clone(), repr: Repr::Direct { n } });
            }
        }
        let carrier = ring.carrier().ok_or_else(|| {
            Error::Budget(format!("fast tables need a finite ring, got {}", ring.spec_string()))
        })?;
        let size = carrier.len();
        if size > TABLE_CAP {
            return Err(Error::Budget(format!(
                "ring of size {size} exceeds the fast-table cap of {TABLE_CAP}"
            )));
        }
        let elems: Vec<Elem> = carrier.to_vec();
        let index: HashMap<Elem, u16> =
            elems.iter().enumerate().map(|(i, e)| (e.clone(), i as u16)).collect();
        let mut add = vec![0u16; size * size];
        let mut mul = vec![0u16; size * size];
        let mut neg = vec![0u16; size];
        let mut inv = vec![NO_INV; size];
        for (i, a) in elems.iter().enumerate() {
            neg[i] = index[&ring.neg(a)];
            if let Some(v) = ring.inv(a) {
                inv[i] = index[&v];
            }
            for (j, b) in elems.iter().enumerate() {
                add[i * size + j] = index[&ring.add(a, b)];
                mul[i * size + j] = index[&ring.mul(a, b)];
            }
        }
        let zero = index[&ring.zero()];
        let one = index[&ring.one()];
        Ok(FastRing {
            ring: ring.clone(),
            repr: Repr::Table { size, add, mul, neg, inv, elems, index, zero, one },
        })
    }

    pub fn size(&self) -> usize {
        match &self.repr {
            Repr::Direct { n } => *n as usize,
            Repr::Table { size, .. } => *size,
        }
    }

    pub fn zero(&self) -> u16 {
        match &self.repr {
            Repr::Direct { .. } => 0,
            Repr::Table { zero, .. } => *zero,
        }
    }

    pub fn one(&self) -> u16 {
        match &self.repr {
            Repr::Direct { n } => (1 % n) as u16,
            Repr::Table { one, .. } => *one,
        }
    }

    #[inline]
    pub fn add(&self, a: u16, b: u16) -> u16 {
        match &self.repr {
            Repr::Direct { n } => ((a as u64 + b as u64) % n) as u16,
            Repr::Table { size, add, .. } => add[a as usize * size + b as usize],
        }
    }

    #[inline]
    pub fn mul(&self, a: u16, b: u16) -> u16 {
        match &self.repr {
            Repr::Direct { n } => ((a as u64 * b as u64) % n) as u16,
            Repr::Table { size, mul, .. } => mul[a as usize * size + b as usize],
        }
    }

    #[inline]
    pub fn neg(&self, a: u16) -> u16 {
        match &self.repr {
            Repr::Direct { n } => ((n - a as u64) % n) as u16,
            Repr::Table { neg, .. } => neg[a as usize],
        }
    }

    #[inline]
    pub fn sub(&self, a: u16, b: u16) -> u16 {
        self.add(a, self.neg(b))
    }

    pub fn inv(&self, a: u16) -> Option<u16> {
        match &self.repr {
            Repr::Direct { n } => crate::linalg::mod_inv(a as u64, *n).map(|v| v as u16),
            Repr::Table { inv, .. } => {
                let v = inv[a as usize];
                if v == NO_INV {
                    None
                } else {
                    Some(v)
                }
            }
        }
    }

    pub fn encode(&self, e: &Elem) -> u16 {
        match &self.repr {
            Repr::Direct { .. } => {
                let Elem::Int(v) = e else { panic!("residue elements are integers") };
                *v as u16
            }
            Repr::Table { index, .. } => index[e],
        }
    }

    pub fn decode(&self, code: u16) -> Elem {
        match &self.repr {
            Repr::Direct { .. } => Elem::Int(code as i128),
            Repr::Table { elems, .. } => elems[code as usize].clone(),
        }
    }
}
