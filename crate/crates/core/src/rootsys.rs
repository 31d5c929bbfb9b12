//! Root systems of the classical and exceptional families, realized with
//! integer coordinates.
//!
//! Construction is uniform: each family provides integral simple-root
//! vectors (the E and F families use coordinates doubled relative to the
//! usual half-integral realization, which changes nothing about pairings),
//! and the full root set is the closure of the simples under the simple
//! reflections. Positive roots are ordered by height and then by descending
//! lexicographic order on ambient coordinates; negatives mirror the
//! positives. This order makes the classical-family structure constants
//! later match the textbook matrix models entry for entry.

use crate::linalg;
use crate::{Error, Result};
use std::collections::HashMap;

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum Family {
    A,
    B,
    C,
    D,
    E,
    F,
    G,
}

impl Family {
    pub fn letter(self) -> char {
        match self {
            Family::A => 'A',
            Family::B => 'B',
            Family::C => 'C',
            Family::D => 'D',
            Family::E => 'E',
            Family::F => 'F',
            Family::G => 'G',
        }
    }
}

impl std::fmt::Display for Family {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.letter())
    }
}

/// A reduced irreducible root system with a fixed integral realization and a
/// fixed total order on roots.
pub struct RootSystem {
    pub family: Family,
    pub rank: usize,
    dim: usize,
    roots: Vec<Vec<i64>>,
    coords: Vec<Vec<i64>>,
    heights: Vec<i64>,
    norm2: Vec<i64>,
    simple_idx: Vec<usize>,
    index_of: HashMap<Vec<i64>, usize>,
}

fn dot(a: &[i64], b: &[i64]) -> i64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Simple roots for each family, as integer ambient vectors.
fn simple_roots(family: Family, rank: usize) -> Result<Vec<Vec<i64>>> {
    let l = rank;
    let e = |i: usize, dim: usize| -> Vec<i64> {
        let mut v = vec![0i64; dim];
        v[i] = 1;
        v
    };
    let sub = |a: &[i64], b: &[i64]| -> Vec<i64> { a.iter().zip(b).map(|(x, y)| x - y).collect() };
    let add = |a: &[i64], b: &[i64]| -> Vec<i64> { a.iter().zip(b).map(|(x, y)| x + y).collect() };
    let bad_rank = |min: usize, max: Option<usize>| {
        let range = match max {
            Some(mx) if mx == min => format!("{min}"),
            Some(mx) => format!("{min}..{mx}"),
            None => format!(">= {min}"),
        };
        Error::RootSystem(format!("family {} needs rank {range}, got {rank}", family.letter()))
    };
    match family {
        Family::A => {
            if l < 2 {
                return Err(bad_rank(2, None));
            }
            let dim = l + 1;
            Ok((0..l).map(|i| sub(&e(i, dim), &e(i + 1, dim))).collect())
        }
        Family::B => {
            if l < 2 {
                return Err(bad_rank(2, None));
            }
            let mut s: Vec<Vec<i64>> = (0..l - 1).map(|i| sub(&e(i, l), &e(i + 1, l))).collect();
            s.push(e(l - 1, l));
            Ok(s)
        }
        Family::C => {
            if l < 2 {
                return Err(bad_rank(2, None));
            }
            let mut s: Vec<Vec<i64>> = (0..l - 1).map(|i| sub(&e(i, l), &e(i + 1, l))).collect();
            let mut last = vec![0i64; l];
            last[l - 1] = 2;
            s.push(last);
            Ok(s)
        }
        Family::D => {
            if l < 4 {
                return Err(bad_rank(4, None));
            }
            let mut s: Vec<Vec<i64>> = (0..l - 1).map(|i| sub(&e(i, l), &e(i + 1, l))).collect();
            s.push(add(&e(l - 2, l), &e(l - 1, l)));
            Ok(s)
        }
        Family::E => {
            if !(6..=8).contains(&l) {
                return Err(bad_rank(6, Some(8)));
            }
            // Coordinates doubled: the usual half-sum simple root becomes an
            // all-ones signed vector.
            let dim = 8;
            let mut s = Vec::with_capacity(l);
            s.push(vec![1, -1, -1, -1, -1, -1, -1, 1]);
            s.push(vec![2, 2, 0, 0, 0, 0, 0, 0]);
            for i in 0..l - 2 {
                // 2(e_{i+2} - e_{i+1}), starting from 2(e_2 - e_1)
                let mut v = vec![0i64; dim];
                v[i] = -2;
                v[i + 1] = 2;
                s.push(v);
            }
            Ok(s)
        }
        Family::F => {
            if l != 4 {
                return Err(bad_rank(4, Some(4)));
            }
            // Doubled: short roots have norm 4, long roots norm 8.
            Ok(vec![
                vec![0, 2, -2, 0],
                vec![0, 0, 2, -2],
                vec![0, 0, 0, 2],
                vec![1, -1, -1, -1],
            ])
        }
        Family::G => {
            if l != 2 {
                return Err(bad_rank(2, Some(2)));
            }
            Ok(vec![vec![1, -1, 0], vec![-2, 1, 1]])
        }
    }
}

impl RootSystem {
    pub fn new(family: Family, rank: usize) -> Result<RootSystem> {
        let simples = simple_roots(family, rank)?;
        let dim = simples[0].len();

        // Reflection closure of the simples.
        let mut all: Vec<Vec<i64>> = Vec::new();
        let mut seen: HashMap<Vec<i64>, ()> = HashMap::new();
        for s in &simples {
            if seen.insert(s.clone(), ()).is_none() {
                all.push(s.clone());
            }
        }
        let mut frontier: Vec<Vec<i64>> = all.clone();
        while let Some(r) = frontier.pop() {
            for s in &simples {
                let n2 = dot(s, s);
                let num = 2 * dot(&r, s);
                assert_eq!(num % n2, 0, "non-integral Cartan pairing");
                let c = num / n2;
                let refl: Vec<i64> = r.iter().zip(s).map(|(x, y)| x - c * y).collect();
                if seen.insert(refl.clone(), ()).is_none() {
                    all.push(refl.clone());
                    frontier.push(refl);
                }
            }
        }

        // Simple-root coordinates of each root (unique integral solution).
        let s_cols: Vec<Vec<i128>> = (0..dim)
            .map(|d| simples.iter().map(|s| s[d] as i128).collect())
            .collect();
        let coord_of = |r: &[i64]| -> Vec<i64> {
            let b: Vec<i128> = r.iter().map(|&x| x as i128).collect();
            let c = linalg::z_solve(&s_cols, &b)
                .expect("every root is an integral combination of the simples");
            c.into_iter().map(|x| x as i64).collect()
        };

        let mut pos: Vec<(Vec<i64>, Vec<i64>, i64)> = Vec::new();
        for r in &all {
            let c = coord_of(r);
            let height: i64 = c.iter().sum();
            let all_nonneg = c.iter().all(|&x| x >= 0);
            let all_nonpos = c.iter().all(|&x| x <= 0);
            assert!(
                all_nonneg || all_nonpos,
                "mixed-sign coordinates: not a root system"
            );
            if all_nonneg {
                pos.push((r.clone(), c, height));
            }
        }
        // Height, then descending lexicographic order on ambient coordinates.
        pos.sort_by(|a, b| a.2.cmp(&b.2).then_with(|| b.0.cmp(&a.0)));

        let half = pos.len();
        let mut roots = Vec::with_capacity(2 * half);
        let mut coords = Vec::with_capacity(2 * half);
        let mut heights = Vec::with_capacity(2 * half);
        for (r, c, h) in &pos {
            roots.push(r.clone());
            coords.push(c.clone());
            heights.push(*h);
        }
        for (r, c, h) in &pos {
            roots.push(r.iter().map(|x| -x).collect());
            coords.push(c.iter().map(|x| -x).collect());
            heights.push(-h);
        }
        let norm2: Vec<i64> = roots.iter().map(|r| dot(r, r)).collect();
        let index_of: HashMap<Vec<i64>, usize> =
            roots.iter().enumerate().map(|(i, r)| (r.clone(), i)).collect();
        let simple_idx: Vec<usize> = simples.iter().map(|s| index_of[s]).collect();

        Ok(RootSystem {
            family,
            rank,
            dim,
            roots,
            coords,
            heights,
            norm2,
            simple_idx,
            index_of,
        })
    }

    pub fn parse_name(name: &str) -> Result<RootSystem> {
        let t = name.trim();
        let mut chars = t.chars();
        let letter = chars
            .next()
            .ok_or_else(|| Error::RootSystem("empty root system name".into()))?;
        let family = match letter.to_ascii_uppercase() {
            'A' => Family::A,
            'B' => Family::B,
            'C' => Family::C,
            'D' => Family::D,
            'E' => Family::E,
            'F' => Family::F,
            'G' => Family::G,
            other => {
                return Err(Error::RootSystem(format!("unknown family letter '{other}'")))
            }
        };
        let rest: String = chars.collect();
        let rank: usize = rest
            .trim()
            .parse()
            .map_err(|_| Error::RootSystem(format!("bad rank in root system name '{t}'")))?;
        RootSystem::new(family, rank)
    }

    pub fn name(&self) -> String {
        format!("{}{}", self.family.letter(), self.rank)
    }

    /// Ambient coordinate dimension of the realization.
    pub fn ambient_dim(&self) -> usize {
        self.dim
    }

    pub fn num_roots(&self) -> usize {
        self.roots.len()
    }

    pub fn num_positive(&self) -> usize {
        self.roots.len() / 2
    }

    pub fn root(&self, i: usize) -> &[i64] {
        &self.roots[i]
    }

    pub fn simple_indices(&self) -> &[usize] {
        &self.simple_idx
    }

    /// Coordinates of root `i` over the simple roots.
    pub fn simple_coords(&self, i: usize) -> &[i64] {
        &self.coords[i]
    }

    pub fn height(&self, i: usize) -> i64 {
        self.heights[i]
    }

    pub fn is_positive(&self, i: usize) -> bool {
        i < self.num_positive()
    }

    pub fn neg(&self, i: usize) -> usize {
        let half = self.num_positive();
        if i < half {
            i + half
        } else {
            i - half
        }
    }

    pub fn index_of(&self, v: &[i64]) -> Option<usize> {
        self.index_of.get(v).copied()
    }

    pub fn inner(&self, i: usize, j: usize) -> i64 {
        dot(&self.roots[i], &self.roots[j])
    }

    pub fn norm2(&self, i: usize) -> i64 {
        self.norm2[i]
    }

    pub fn is_long(&self, i: usize) -> bool {
        let max = self.norm2.iter().max().copied().expect("nonempty");
        self.norm2[i] == max
    }

    pub fn is_short(&self, i: usize) -> bool {
        let min = self.norm2.iter().min().copied().expect("nonempty");
        self.norm2[i] == min
    }

    pub fn is_simply_laced(&self) -> bool {
        matches!(self.family, Family::A | Family::D | Family::E)
    }

    /// Integral Cartan pairing <beta, alpha> = 2 (beta, alpha) / (alpha, alpha).
    pub fn pairing(&self, beta: usize, alpha: usize) -> i64 {
        let num = 2 * self.inner(beta, alpha);
        let den = self.norm2[alpha];
        debug_assert_eq!(num % den, 0, "non-integral pairing");
        num / den
    }

    /// Index of the reflection of root `beta` in the hyperplane of `alpha`.
    pub fn reflect(&self, beta: usize, alpha: usize) -> usize {
        let c = self.pairing(beta, alpha);
        let v: Vec<i64> = self.roots[beta]
            .iter()
            .zip(&self.roots[alpha])
            .map(|(b, a)| b - c * a)
            .collect();
        self.index_of[&v]
    }

    /// Index of alpha + beta, when that sum is a root.
    pub fn sum(&self, alpha: usize, beta: usize) -> Option<usize> {
        let v: Vec<i64> = self.roots[alpha]
            .iter()
            .zip(&self.roots[beta])
            .map(|(a, b)| a + b)
            .collect();
        self.index_of.get(&v).copied()
    }

    /// Largest p with beta - p*alpha still a root.
    pub fn chain_down(&self, beta: usize, alpha: usize) -> i64 {
        let mut p = 0;
        let mut v = self.roots[beta].clone();
        loop {
            let next: Vec<i64> = v.iter().zip(&self.roots[alpha]).map(|(b, a)| b - a).collect();
            if self.index_of.contains_key(&next) {
                p += 1;
                v = next;
            } else {
                return p;
            }
        }
    }

    /// Largest q with beta + q*alpha still a root.
    pub fn chain_up(&self, beta: usize, alpha: usize) -> i64 {
        let mut q = 0;
        let mut v = self.roots[beta].clone();
        loop {
            let next: Vec<i64> = v.iter().zip(&self.roots[alpha]).map(|(b, a)| b + a).collect();
            if self.index_of.contains_key(&next) {
                q += 1;
                v = next;
            } else {
                return q;
            }
        }
    }

    /// The positive root of maximal height.
    pub fn highest_root(&self) -> usize {
        self.num_positive() - 1
    }

    pub fn cartan_matrix(&self) -> Vec<Vec<i64>> {
        let l = self.rank;
        (0..l)
            .map(|i| {
                (0..l)
                    .map(|j| self.pairing(self.simple_idx[i], self.simple_idx[j]))
                    .collect()
            })
            .collect()
    }

    /// A pair (beta, gamma) of roots with beta + gamma = alpha and all three
    /// of the same length, together with <beta, gamma> = -1: the configuration
    /// generating a rank-2 subsystem of type A2 through alpha. Short roots of
    /// the B and C families admit none.
    pub fn a2_triple_through(&self, alpha: usize) -> Option<(usize, usize)> {
        let n = self.num_roots();
        for beta in 0..n {
            if beta == alpha || beta == self.neg(alpha) {
                continue;
            }
            let gv: Vec<i64> = self.roots[alpha]
                .iter()
                .zip(&self.roots[beta])
                .map(|(a, b)| a - b)
                .collect();
            let Some(gamma) = self.index_of(&gv) else { continue };
            if self.norm2[beta] == self.norm2[alpha]
                && self.norm2[gamma] == self.norm2[alpha]
                && self.pairing(beta, gamma) == -1
            {
                return Some((beta, gamma));
            }
        }
        None
    }

    /// Name of a root as a combination of simple roots, e.g. `a1+2*a2`.
    pub fn format_root(&self, i: usize) -> String {
        let c = &self.coords[i];
        let mut out = String::new();
        for (k, &ck) in c.iter().enumerate() {
            if ck == 0 {
                continue;
            }
            if ck > 0 && !out.is_empty() {
                out.push('+');
            }
            if ck == -1 {
                out.push('-');
            } else if ck != 1 {
                out.push_str(&format!("{ck}*"));
            }
            out.push_str(&format!("a{}", k + 1));
        }
        if out.is_empty() {
            out.push('0');
        }
        out
    }

    /// Parse a root name in the `format_root` syntax (whitespace ignored).
    pub fn parse_root(&self, s: &str) -> Result<usize> {
        let mut coords = vec![0i64; self.rank];
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let mut rest = compact.as_str();
        if rest.is_empty() {
            return Err(Error::RootSystem("empty root name".into()));
        }
        let mut sign = 1i64;
        let mut first = true;
        while !rest.is_empty() {
            if let Some(r) = rest.strip_prefix('+') {
                if first {
                    return Err(Error::RootSystem(format!("bad root name '{s}'")));
                }
                sign = 1;
                rest = r;
            } else if let Some(r) = rest.strip_prefix('-') {
                sign = -1;
                rest = r;
            } else if !first {
                return Err(Error::RootSystem(format!("bad root name '{s}'")));
            }
            first = false;
            // Optional coefficient with optional '*'.
            let digits: String = rest.chars().take_while(|c| c.is_ascii_digit()).collect();
            let mut coeff = 1i64;
            if !digits.is_empty() {
                coeff = digits
                    .parse()
                    .map_err(|_| Error::RootSystem(format!("bad coefficient in '{s}'")))?;
                rest = &rest[digits.len()..];
                rest = rest.strip_prefix('*').unwrap_or(rest);
            }
            let r = rest
                .strip_prefix(['a', 'A'])
                .ok_or_else(|| Error::RootSystem(format!("expected a simple-root term in '{s}'")))?;
            let idx_digits: String = r.chars().take_while(|c| c.is_ascii_digit()).collect();
            if idx_digits.is_empty() {
                return Err(Error::RootSystem(format!("missing simple-root index in '{s}'")));
            }
            let idx: usize = idx_digits
                .parse()
                .map_err(|_| Error::RootSystem(format!("bad simple-root index in '{s}'")))?;
            if idx == 0 || idx > self.rank {
                return Err(Error::RootSystem(format!(
                    "simple-root index out of range in '{s}': a{idx} with rank {}",
                    self.rank
                )));
            }
            rest = &r[idx_digits.len()..];
            coords[idx - 1] += sign * coeff;
        }
        let v: Vec<i64> = (0..self.dim)
            .map(|d| {
                (0..self.rank)
                    .map(|k| coords[k] * self.roots[self.simple_idx[k]][d])
                    .sum()
            })
            .collect();
        self.index_of(&v).ok_or_else(|| {
            Error::RootSystem(format!("'{s}' is not a root of {}", self.name()))
        })
    }
}
