//! Integer matrix models of the basic representations.
//!
//! A representation stores one integer matrix per root, acting on a weight
//! basis. Models provided: the adjoint action on the Chevalley basis itself,
//! the standard module and its exterior powers for the linear family, the
//! 2l-dimensional symplectic module, and the 2l-dimensional orthogonal module
//! for the even orthogonal family. Simple-root matrices are seeded from the
//! classical forms; matrices for the remaining roots are produced by bracket
//! recursion through each root's distinguished special pair, which keeps the
//! signs aligned with the structure-constant table. Every constructor then
//! verifies the full bracket table against the representation, the weight
//! grading of every entry, and the integrality of the divided powers used to
//! build unipotent elements.

use crate::chevbasis::ChevalleyBasis;
use crate::mat::Mat;
use crate::ring::{Elem, Ring};
use crate::rootsys::Family;
use crate::weights::{ambient_to_fund, WeightLattice};
use crate::{Error, Result};
use std::sync::Arc;

/// Sparse integer matrix: rows of (column, value) pairs sorted by column.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntMat {
    n: usize,
    rows: Vec<Vec<(usize, i64)>>,
}

impl IntMat {
    pub fn zero(n: usize) -> IntMat {
        IntMat { n, rows: vec![Vec::new(); n] }
    }

    pub fn from_entries(n: usize, entries: &[(usize, usize, i64)]) -> IntMat {
        let mut m = IntMat::zero(n);
        for &(r, c, v) in entries {
            m.add_entry(r, c, v);
        }
        m
    }

    pub fn size(&self) -> usize {
        self.n
    }

    fn add_entry(&mut self, r: usize, c: usize, v: i64) {
        if v == 0 {
            return;
        }
        let row = &mut self.rows[r];
        match row.binary_search_by_key(&c, |&(col, _)| col) {
            Ok(p) => {
                row[p].1 += v;
                if row[p].1 == 0 {
                    row.remove(p);
                }
            }
            Err(p) => row.insert(p, (c, v)),
        }
    }

    pub fn get(&self, r: usize, c: usize) -> i64 {
        self.rows[r]
            .binary_search_by_key(&c, |&(col, _)| col)
            .map(|p| self.rows[r][p].1)
            .unwrap_or(0)
    }

    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, i64)> + '_ {
        self.rows
            .iter()
            .enumerate()
            .flat_map(|(r, row)| row.iter().map(move |&(c, v)| (r, c, v)))
    }

    pub fn nnz(&self) -> usize {
        self.rows.iter().map(|r| r.len()).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.rows.iter().all(|r| r.is_empty())
    }

    pub fn mul(&self, other: &IntMat) -> IntMat {
        assert_eq!(self.n, other.n);
        let mut out = IntMat::zero(self.n);
        for (r, row) in self.rows.iter().enumerate() {
            for &(k, va) in row {
                for &(c, vb) in &other.rows[k] {
                    out.add_entry(r, c, va.checked_mul(vb).expect("overflow"));
                }
            }
        }
        out
    }

    pub fn add(&self, other: &IntMat) -> IntMat {
        assert_eq!(self.n, other.n);
        let mut out = self.clone();
        for (r, c, v) in other.entries() {
            out.add_entry(r, c, v);
        }
        out
    }

    pub fn scale(&self, s: i64) -> IntMat {
        let mut out = IntMat::zero(self.n);
        for (r, c, v) in self.entries() {
            out.add_entry(r, c, v.checked_mul(s).expect("overflow"));
        }
        out
    }

    pub fn sub(&self, other: &IntMat) -> IntMat {
        self.add(&other.scale(-1))
    }

    /// [a, b] = ab - ba.
    pub fn comm(&self, other: &IntMat) -> IntMat {
        self.mul(other).sub(&other.mul(self))
    }

    pub fn transpose(&self) -> IntMat {
        let mut out = IntMat::zero(self.n);
        for (r, c, v) in self.entries() {
            out.add_entry(c, r, v);
        }
        out
    }

    /// Exact division of every entry; errors if any entry is not divisible.
    pub fn divide_exact(&self, d: i64) -> Result<IntMat> {
        assert!(d != 0);
        let mut out = IntMat::zero(self.n);
        for (r, c, v) in self.entries() {
            if v % d != 0 {
                return Err(Error::Rep(format!(
                    "entry {v} at ({r}, {c}) is not divisible by {d}"
                )));
            }
            out.add_entry(r, c, v / d);
        }
        Ok(out)
    }

    /// Materialize over a ring.
    pub fn to_ring(&self, ring: &Ring) -> Mat {
        let mut m = Mat::zero(ring, self.n);
        for (r, c, v) in self.entries() {
            m.set(r, c, ring.int(v as i128));
        }
        m
    }
}

/// One edge of a weight diagram: the weight of `to` minus the weight of
/// `from` is the simple root `label`, and `sign` is the matrix entry of that
/// simple root's matrix at (to, from).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiagramEdge {
    pub from: usize,
    pub to: usize,
    pub label: usize,
    pub sign: i64,
}

/// Weight diagram of a multiplicity-free representation: one vertex per
/// basis weight, edges labeled by simple roots.
#[derive(Clone, Debug)]
pub struct WeightDiagram {
    pub vertices: Vec<Vec<i64>>,
    pub edges: Vec<DiagramEdge>,
}

impl WeightDiagram {
    pub fn dim(&self) -> usize {
        self.vertices.len()
    }

    /// Vertices reachable from `v` by adding the simple root `label`.
    pub fn step_up(&self, v: usize, label: usize) -> Option<usize> {
        self.edges.iter().find(|e| e.from == v && e.label == label).map(|e| e.to)
    }
}

/// An integer matrix model of the Lie algebra, one matrix per root.
pub struct Representation {
    cb: Arc<ChevalleyBasis>,
    label: String,
    dim: usize,
    mats: Vec<IntMat>,
    divided: Vec<Vec<IntMat>>,
    weights: Vec<Vec<i64>>,
    lattice: WeightLattice,
    square_zero: bool,
}

impl Representation {
    /// Adjoint action on the basis (H_1, ..., H_l, X_roots in root order).
    pub fn adjoint(cb: &Arc<ChevalleyBasis>) -> Result<Representation> {
        let rs = cb.rootsys().clone();
        let l = rs.rank;
        let n = rs.num_roots();
        let dim = l + n;
        let simples = rs.simple_indices().to_vec();
        let mut mats = Vec::with_capacity(n);
        for a in 0..n {
            let mut entries = Vec::new();
            // Action on the Cartan part: [X_a, H_k] = -<a, s_k> X_a.
            for (k, &sk) in simples.iter().enumerate() {
                entries.push((l + a, k, -rs.pairing(a, sk)));
            }
            // Action on the root part.
            for b in 0..n {
                if b == rs.neg(a) {
                    for (k, &c) in cb.coroot_coords(a).iter().enumerate() {
                        entries.push((k, l + b, c));
                    }
                } else if let Some(s) = cb.sum_index(a, b) {
                    entries.push((l + s, l + b, cb.n_const(a, b)));
                }
            }
            mats.push(IntMat::from_entries(dim, &entries));
        }
        let mut weights = vec![vec![0i64; l]; l];
        for b in 0..n {
            weights.push((0..l).map(|k| rs.pairing(b, simples[k])).collect());
        }
        Representation::finish(cb.clone(), "adjoint", mats, weights)
    }

    /// Standard module: the natural one for the linear family, the
    /// 2l-dimensional symplectic module for C, the 2l-dimensional orthogonal
    /// module for D.
    pub fn standard(cb: &Arc<ChevalleyBasis>) -> Result<Representation> {
        let rs = cb.rootsys().clone();
        match rs.family {
            Family::A => Representation::exterior(cb, 1),
            Family::C => Representation::symplectic(cb),
            Family::D => Representation::orthogonal(cb),
            f => Err(Error::Rep(format!(
                "no standard matrix model wired for family {f:?}; use adjoint"
            ))),
        }
    }

    /// k-th exterior power of the standard module of the linear family.
    /// Basis: k-element subsets of the ambient indices, in lexicographic
    /// order; the matrix of the root e_i - e_j moves j to i with the sign of
    /// the wedge reordering.
    pub fn exterior(cb: &Arc<ChevalleyBasis>, k: usize) -> Result<Representation> {
        let rs = cb.rootsys().clone();
        if rs.family != Family::A {
            return Err(Error::Rep("exterior powers are wired for the linear family only".into()));
        }
        let m = rs.rank + 1;
        if k == 0 || k >= m {
            return Err(Error::Rep(format!("exterior power {k} out of range 1..{m}")));
        }
        let subsets = k_subsets(m, k);
        let index: std::collections::HashMap<Vec<usize>, usize> =
            subsets.iter().enumerate().map(|(i, s)| (s.clone(), i)).collect();
        let dim = subsets.len();
        let mut mats = Vec::with_capacity(rs.num_roots());
        for r in 0..rs.num_roots() {
            // Root coordinates are e_i - e_j in the ambient basis.
            let v = rs.root(r);
            let i = v.iter().position(|&x| x == 1).expect("root shape");
            let j = v.iter().position(|&x| x == -1).expect("root shape");
            let mut entries = Vec::new();
            for (si, s) in subsets.iter().enumerate() {
                if s.contains(&j) && !s.contains(&i) {
                    let mut t: Vec<usize> = s.iter().copied().filter(|&x| x != j).collect();
                    let (lo, hi) = (i.min(j), i.max(j));
                    let crossings = t.iter().filter(|&&x| lo < x && x < hi).count();
                    t.push(i);
                    t.sort_unstable();
                    let sign = if crossings % 2 == 0 { 1 } else { -1 };
                    entries.push((index[&t], si, sign));
                }
            }
            mats.push(IntMat::from_entries(dim, &entries));
        }
        let mut weights = Vec::with_capacity(dim);
        for s in &subsets {
            let mut amb = vec![0i64; m];
            for &x in s {
                amb[x] = 1;
            }
            weights.push(ambient_to_fund(&rs, &amb)?);
        }
        let label = if k == 1 { "standard".to_string() } else { format!("wedge{k}") };
        Representation::finish(cb.clone(), &label, mats, weights)
    }

    fn symplectic(cb: &Arc<ChevalleyBasis>) -> Result<Representation> {
        let rs = cb.rootsys().clone();
        let l = rs.rank;
        let dim = 2 * l;
        // Seed matrices for the simple roots e_i - e_{i+1} and 2 e_l, and
        // their negatives, in the weight basis (e_1..e_l, -e_1..-e_l).
        let mut seeds: Vec<(usize, IntMat)> = Vec::new();
        for (k, &sk) in rs.simple_indices().iter().enumerate() {
            let (pos, neg) = if k + 1 < l {
                let i = k;
                let p = IntMat::from_entries(
                    dim,
                    &[(i, i + 1, 1), (l + i + 1, l + i, -1)],
                );
                (p.clone(), p.transpose())
            } else {
                let p = IntMat::from_entries(dim, &[(l - 1, 2 * l - 1, 1)]);
                (p.clone(), p.transpose())
            };
            seeds.push((sk, pos));
            seeds.push((rs.neg(sk), neg));
        }
        let weights = symmetric_weights(&rs)?;
        let mats = extend_by_recursion(cb, &seeds)?;
        Representation::finish(cb.clone(), "universal", mats, weights)
    }

    fn orthogonal(cb: &Arc<ChevalleyBasis>) -> Result<Representation> {
        let rs = cb.rootsys().clone();
        let l = rs.rank;
        let dim = 2 * l;
        let mut seeds: Vec<(usize, IntMat)> = Vec::new();
        for (k, &sk) in rs.simple_indices().iter().enumerate() {
            let (pos, neg) = if k + 1 < l {
                let i = k;
                let p = IntMat::from_entries(
                    dim,
                    &[(i, i + 1, 1), (l + i + 1, l + i, -1)],
                );
                (p.clone(), p.transpose())
            } else {
                // Simple root e_{l-1} + e_l.
                let p = IntMat::from_entries(
                    dim,
                    &[(l - 2, 2 * l - 1, 1), (l - 1, 2 * l - 2, -1)],
                );
                (p.clone(), p.transpose())
            };
            seeds.push((sk, pos));
            seeds.push((rs.neg(sk), neg));
        }
        let weights = symmetric_weights(&rs)?;
        let mats = extend_by_recursion(cb, &seeds)?;
        Representation::finish(cb.clone(), "standard", mats, weights)
    }

    /// Rebuild a representation from a weight diagram: simple-root matrices
    /// from the signed edges, negatives by transpose, remaining roots by
    /// bracket recursion. The result passes the same validation as the
    /// built-in models, so a diagram inconsistent with the structure
    /// constants is rejected.
    pub fn from_diagram(
        cb: &Arc<ChevalleyBasis>,
        diagram: &WeightDiagram,
        label: &str,
    ) -> Result<Representation> {
        let rs = cb.rootsys().clone();
        let dim = diagram.dim();
        let mut seeds: Vec<(usize, IntMat)> = Vec::new();
        for (k, &sk) in rs.simple_indices().iter().enumerate() {
            let entries: Vec<(usize, usize, i64)> = diagram
                .edges
                .iter()
                .filter(|e| e.label == k)
                .map(|e| (e.to, e.from, e.sign))
                .collect();
            let p = IntMat::from_entries(dim, &entries);
            seeds.push((sk, p.clone()));
            seeds.push((rs.neg(sk), p.transpose()));
        }
        let mats = extend_by_recursion(cb, &seeds)?;
        Representation::finish(cb.clone(), label, mats, diagram.vertices.clone())
    }

    /// Model selector by name: adjoint, standard, universal (symplectic
    /// alias), sc (the model whose lattice is the full weight lattice, where
    /// wired), or w<k> for exterior powers.
    pub fn by_name(cb: &Arc<ChevalleyBasis>, name: &str) -> Result<Representation> {
        let rs = cb.rootsys().clone();
        let lower = name.trim().to_ascii_lowercase();
        match lower.as_str() {
            "adjoint" | "ad" => Representation::adjoint(cb),
            "standard" | "std" => Representation::standard(cb),
            "universal" => {
                if rs.family == Family::C {
                    Representation::standard(cb)
                } else {
                    Err(Error::Rep("universal names the symplectic module of family C".into()))
                }
            }
            "sc" => match rs.family {
                Family::A | Family::C => Representation::standard(cb),
                Family::G => Representation::adjoint(cb),
                f => Err(Error::Rep(format!(
                    "no simply-connected matrix model wired for family {f:?}"
                ))),
            },
            _ => {
                if let Some(num) = lower.strip_prefix('w').or_else(|| lower.strip_prefix("wedge")) {
                    let k: usize = num.parse().map_err(|_| {
                        Error::Rep(format!("cannot parse exterior power from {name:?}"))
                    })?;
                    Representation::exterior(cb, k)
                } else {
                    Err(Error::Rep(format!(
                        "unknown representation {name:?}; try adjoint, standard, universal, sc, or w<k>"
                    )))
                }
            }
        }
    }

    /// Shared validation and bookkeeping behind every constructor.
    fn finish(
        cb: Arc<ChevalleyBasis>,
        label: &str,
        mats: Vec<IntMat>,
        weights: Vec<Vec<i64>>,
    ) -> Result<Representation> {
        let rs = cb.rootsys().clone();
        let n = rs.num_roots();
        let l = rs.rank;
        let dim = if let Some(m) = mats.first() {
            m.size()
        } else {
            return Err(Error::Rep("empty matrix list".into()));
        };
        if weights.len() != dim {
            return Err(Error::Rep("one weight per basis vector is required".into()));
        }
        let simples = rs.simple_indices().to_vec();

        // Weight grading: every entry of the matrix of root a connects a
        // column of weight w to a row of weight w + a.
        for a in 0..n {
            let fund: Vec<i64> = (0..l).map(|k| rs.pairing(a, simples[k])).collect();
            for (r, c, _) in mats[a].entries() {
                let ok = (0..l).all(|k| weights[r][k] - weights[c][k] == fund[k]);
                if !ok {
                    return Err(Error::Rep(format!(
                        "entry ({r}, {c}) of the matrix of root {} breaks the weight grading",
                        rs.format_root(a)
                    )));
                }
            }
        }

        // Full bracket table.
        for a in 0..n {
            for b in a + 1..n {
                let comm = mats[a].comm(&mats[b]);
                if b == rs.neg(a) {
                    // [X_a, X_{-a}] acts diagonally by the pairing with a.
                    let mut expect = IntMat::zero(dim);
                    for (j, w) in weights.iter().enumerate() {
                        let val: i64 = cb
                            .coroot_coords(a)
                            .iter()
                            .zip(w.iter())
                            .map(|(&c, &wk)| c * wk)
                            .sum();
                        expect.add_entry(j, j, val);
                    }
                    if comm != expect {
                        return Err(Error::Rep(format!(
                            "bracket of {} with its negative is not the coroot action",
                            rs.format_root(a)
                        )));
                    }
                } else if let Some(s) = cb.sum_index(a, b) {
                    if comm != mats[s].scale(cb.n_const(a, b)) {
                        return Err(Error::Rep(format!(
                            "bracket [{}, {}] disagrees with the structure constants",
                            rs.format_root(a),
                            rs.format_root(b)
                        )));
                    }
                } else if !comm.is_zero() {
                    return Err(Error::Rep(format!(
                        "bracket [{}, {}] should vanish",
                        rs.format_root(a),
                        rs.format_root(b)
                    )));
                }
            }
        }

        // Divided powers, with integrality enforced by exact division.
        let mut divided = Vec::with_capacity(n);
        let mut square_zero = true;
        for mat in mats.iter() {
            let mut list = vec![mat.clone()];
            let mut power = mat.clone();
            let mut factorial: i64 = 1;
            loop {
                power = power.mul(mat);
                if power.is_zero() {
                    break;
                }
                factorial = factorial
                    .checked_mul(list.len() as i64 + 1)
                    .expect("factorial overflow");
                list.push(power.divide_exact(factorial)?);
            }
            if list.len() > 1 {
                square_zero = false;
            }
            divided.push(list);
        }

        let lattice = WeightLattice::from_weights(&rs, &weights)?;
        Ok(Representation {
            cb,
            label: label.to_string(),
            dim,
            mats,
            divided,
            weights,
            lattice,
            square_zero,
        })
    }

    pub fn basis(&self) -> &Arc<ChevalleyBasis> {
        &self.cb
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn root_matrix(&self, a: usize) -> &IntMat {
        &self.mats[a]
    }

    /// D_1 = X, D_2 = X^2/2, ...; the list stops before the first zero power.
    pub fn divided_powers(&self, a: usize) -> &[IntMat] {
        &self.divided[a]
    }

    /// True when every root matrix squares to zero.
    pub fn square_zero(&self) -> bool {
        self.square_zero
    }

    pub fn weight(&self, basis_index: usize) -> &[i64] {
        &self.weights[basis_index]
    }

    pub fn weights(&self) -> &[Vec<i64>] {
        &self.weights
    }

    pub fn lattice(&self) -> &WeightLattice {
        &self.lattice
    }

    /// The unipotent element x_a(t) = sum of t^k D_k over the ring.
    pub fn unipotent(&self, ring: &Ring, a: usize, t: &Elem) -> Mat {
        let mut m = Mat::identity(ring, self.dim);
        let mut tk = ring.one();
        for d in &self.divided[a] {
            tk = ring.mul(&tk, t);
            for (r, c, v) in d.entries() {
                let add = ring.mul(&tk, &ring.int(v as i128));
                let cur = m.get(r, c).clone();
                m.set(r, c, ring.add(&cur, &add));
            }
        }
        m
    }

    /// Weight diagram; requires pairwise distinct weights and unit entries
    /// in the simple-root matrices.
    pub fn weight_diagram(&self) -> Result<WeightDiagram> {
        for i in 0..self.dim {
            for j in i + 1..self.dim {
                if self.weights[i] == self.weights[j] {
                    return Err(Error::Rep(
                        "weight diagram needs multiplicity-free weights".into(),
                    ));
                }
            }
        }
        let rs = self.cb.rootsys();
        let mut edges = Vec::new();
        for (k, &sk) in rs.simple_indices().iter().enumerate() {
            for (r, c, v) in self.mats[sk].entries() {
                if v.abs() != 1 {
                    return Err(Error::Rep(
                        "weight diagram needs unit entries on simple-root matrices".into(),
                    ));
                }
                edges.push(DiagramEdge { from: c, to: r, label: k, sign: v });
            }
        }
        edges.sort_by_key(|e| (e.from, e.label));
        Ok(WeightDiagram { vertices: self.weights.clone(), edges })
    }
}

/// Weight list (e_1..e_l, -e_1..-e_l) in fundamental coordinates.
fn symmetric_weights(rs: &crate::rootsys::RootSystem) -> Result<Vec<Vec<i64>>> {
    let l = rs.rank;
    let mut out = Vec::with_capacity(2 * l);
    for sign in [1i64, -1] {
        for i in 0..l {
            let mut amb = vec![0i64; l];
            amb[i] = sign;
            out.push(ambient_to_fund(rs, &amb)?);
        }
    }
    Ok(out)
}

/// Fill in matrices for every root from seeds on the simple roots and their
/// negatives: each positive root g is produced from its distinguished special
/// pair (d, e) as [X_d, X_e] / N(d, e), and -g from the negatives.
fn extend_by_recursion(
    cb: &Arc<ChevalleyBasis>,
    seeds: &[(usize, IntMat)],
) -> Result<Vec<IntMat>> {
    let rs = cb.rootsys().clone();
    let n = rs.num_roots();
    let mut mats: Vec<Option<IntMat>> = vec![None; n];
    for (idx, m) in seeds {
        mats[*idx] = Some(m.clone());
    }
    for g in 0..rs.num_positive() {
        if mats[g].is_some() {
            continue;
        }
        let (d, e) = cb
            .extraspecial_pair(g)
            .ok_or_else(|| Error::Rep(format!("no seed for simple root {}", rs.format_root(g))))?;
        let nde = cb.n_const(d, e);
        let md = mats[d].clone().ok_or_else(|| Error::Rep("recursion order broken".into()))?;
        let me = mats[e].clone().ok_or_else(|| Error::Rep("recursion order broken".into()))?;
        mats[g] = Some(md.comm(&me).divide_exact(nde)?);
        let (nd, ne) = (rs.neg(d), rs.neg(e));
        let mnd = mats[nd].clone().ok_or_else(|| Error::Rep("recursion order broken".into()))?;
        let mne = mats[ne].clone().ok_or_else(|| Error::Rep("recursion order broken".into()))?;
        mats[rs.neg(g)] = Some(mnd.comm(&mne).divide_exact(-nde)?);
    }
    Ok(mats.into_iter().map(|m| m.expect("all roots filled")).collect())
}

fn k_subsets(m: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(m: usize, k: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for x in start..m {
            cur.push(x);
            rec(m, k, x + 1, cur, out);
            cur.pop();
        }
    }
    rec(m, k, 0, &mut cur, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rootsys::RootSystem;
    use crate::weights::LatticeKind;

    fn basis(name: &str) -> Arc<ChevalleyBasis> {
        let rs = Arc::new(RootSystem::parse_name(name).unwrap());
        Arc::new(ChevalleyBasis::new(rs).unwrap())
    }

    #[test]
    fn standard_linear_model_is_matrix_units() {
        let cb = basis("A2");
        let rep = Representation::standard(&cb).unwrap();
        assert_eq!(rep.dim(), 3);
        assert_eq!(rep.lattice().kind(), LatticeKind::SimplyConnected);
        let rs = cb.rootsys();
        let a = rs.index_of(&[1, -1, 0]).unwrap();
        assert_eq!(rep.root_matrix(a).get(0, 1), 1);
        assert_eq!(rep.root_matrix(a).nnz(), 1);
        assert!(rep.square_zero());
    }

    #[test]
    fn adjoint_model_validates_across_families() {
        for name in ["A2", "B2", "C3", "D4", "G2", "F4"] {
            let cb = basis(name);
            let rep = Representation::adjoint(&cb).unwrap();
            assert_eq!(rep.dim(), cb.dim(), "{name}");
            assert_eq!(rep.lattice().kind(), LatticeKind::Adjoint, "{name}");
        }
    }

    #[test]
    fn adjoint_model_validates_for_e6() {
        let cb = basis("E6");
        let rep = Representation::adjoint(&cb).unwrap();
        assert_eq!(rep.dim(), 78);
    }

    #[test]
    fn exterior_square_of_a3() {
        let cb = basis("A3");
        let rep = Representation::exterior(&cb, 2).unwrap();
        assert_eq!(rep.dim(), 6);
        assert_eq!(rep.lattice().kind(), LatticeKind::Intermediate);
        // Basis subsets in lex order: 01, 02, 03, 12, 13, 23.
        // The root e_1 - e_2 sends 12 -> 02 and 13 -> 03 with positive sign.
        let rs = cb.rootsys();
        let a = rs.index_of(&[1, -1, 0, 0]).unwrap();
        let m = rep.root_matrix(a);
        assert_eq!(m.get(1, 3), 1);
        assert_eq!(m.get(2, 4), 1);
        assert_eq!(m.nnz(), 2);
        assert!(rep.square_zero());
    }

    #[test]
    fn symplectic_long_root_hits_a_corner() {
        let cb = basis("C2");
        let rep = Representation::standard(&cb).unwrap();
        assert_eq!(rep.dim(), 4);
        assert_eq!(rep.label(), "universal");
        assert_eq!(rep.lattice().kind(), LatticeKind::SimplyConnected);
        let rs = cb.rootsys();
        // The long root 2 e_1 is represented by the single matrix unit E_{1,3}
        // (0-based: entry (0, 2)).
        let g = rs.index_of(&[2, 0]).unwrap();
        assert_eq!(rep.root_matrix(g).get(0, 2), 1);
        assert_eq!(rep.root_matrix(g).nnz(), 1);
        // No weight chain of the vector module has length two.
        assert!(rep.square_zero());
    }

    #[test]
    fn orthogonal_model_of_d4() {
        let cb = basis("D4");
        let rep = Representation::standard(&cb).unwrap();
        assert_eq!(rep.dim(), 8);
        assert_eq!(rep.lattice().kind(), LatticeKind::Intermediate);
        assert!(rep.square_zero());
        // e_i - e_j acts as E_ij - E_{l+j,l+i} for every pair, not only the
        // seeded simple roots.
        let rs = cb.rootsys();
        let a = rs.index_of(&[1, 0, -1, 0]).unwrap();
        let m = rep.root_matrix(a);
        assert_eq!(m.get(0, 2), 1);
        assert_eq!(m.get(6, 4), -1);
        assert_eq!(m.nnz(), 2);
    }

    #[test]
    fn divided_powers_of_long_symplectic_chains() {
        let cb = basis("C2");
        let rep = Representation::standard(&cb).unwrap();
        let rs = cb.rootsys();
        // The short simple root e_1 - e_2 has nilpotency 2 on the standard
        // module: (e_1 - e_2)^2 sends e_2-line... it vanishes only at power 2.
        let a = rs.index_of(&[1, -1]).unwrap();
        assert_eq!(rep.divided_powers(a).len(), 1);
        let ring = Ring::zn(7).unwrap();
        let x = rep.unipotent(&ring, a, &Elem::Int(3));
        assert_eq!(*x.get(0, 1), Elem::Int(3));
        assert_eq!(*x.get(3, 2), Elem::Int(4));
        assert_eq!(*x.get(0, 0), Elem::Int(1));
    }

    #[test]
    fn unipotent_of_adjoint_uses_higher_divided_powers() {
        let cb = basis("G2");
        let rep = Representation::adjoint(&cb).unwrap();
        let rs = cb.rootsys();
        let a = rs.index_of(&[1, -1, 0]).unwrap();
        // In the adjoint action of G2 a short root has a length-3 chain, so
        // divided powers through X^3/6 appear.
        assert!(rep.divided_powers(a).len() >= 3);
        let ring = Ring::zn(5).unwrap();
        let x = rep.unipotent(&ring, a, &Elem::Int(1));
        let inv = x.inverse().unwrap();
        let y = rep.unipotent(&ring, a, &Elem::Int(4));
        assert_eq!(inv, y);
    }

    #[test]
    fn diagram_roundtrip_for_exterior_square() {
        let cb = basis("A3");
        let rep = Representation::exterior(&cb, 2).unwrap();
        let diagram = rep.weight_diagram().unwrap();
        assert_eq!(diagram.dim(), 6);
        assert_eq!(diagram.edges.len(), 6);
        let rebuilt = Representation::from_diagram(&cb, &diagram, "wedge2").unwrap();
        for a in 0..cb.rootsys().num_roots() {
            assert_eq!(rebuilt.root_matrix(a), rep.root_matrix(a));
        }
    }

    #[test]
    fn diagram_rejects_adjoint_multiplicities() {
        let cb = basis("A2");
        let rep = Representation::adjoint(&cb).unwrap();
        assert!(rep.weight_diagram().is_err());
    }

    #[test]
    fn large_exterior_power_validates() {
        let cb = basis("A7");
        let rep = Representation::exterior(&cb, 2).unwrap();
        assert_eq!(rep.dim(), 28);
        assert!(rep.weight_diagram().is_ok());
    }

    #[test]
    fn by_name_selects_models() {
        let cb = basis("C2");
        assert_eq!(Representation::by_name(&cb, "universal").unwrap().dim(), 4);
        assert_eq!(Representation::by_name(&cb, "sc").unwrap().dim(), 4);
        assert_eq!(Representation::by_name(&cb, "adjoint").unwrap().dim(), 10);
        assert!(Representation::by_name(&cb, "w2").is_err());
        let cb_a = basis("A3");
        assert_eq!(Representation::by_name(&cb_a, "w2").unwrap().dim(), 6);
        assert_eq!(Representation::by_name(&cb_a, "sc").unwrap().dim(), 4);
    }
}
