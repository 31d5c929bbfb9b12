//! Square matrices over a runtime ring.
//!
//! Determinants use the Berkowitz scheme (division-free, so valid over any
//! commutative ring); inverses come from the characteristic polynomial: with
//! p(x) = x^n + c_{n-1} x^{n-1} + ... + c_0 and p(A) = 0,
//! A * (A^{n-1} + c_{n-1} A^{n-2} + ... + c_1 I) = -c_0 I,
//! so A is invertible exactly when c_0 is, with an explicit inverse.

use crate::ring::{Elem, FastRing, Ring};
use crate::{Error, Result};

#[derive(Clone, Debug)]
pub struct Mat {
    pub ring: Ring,
    pub n: usize,
    entries: Vec<Elem>,
}

impl PartialEq for Mat {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.entries == other.entries
    }
}
impl Eq for Mat {}

impl std::hash::Hash for Mat {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.n.hash(state);
        self.entries.hash(state);
    }
}

impl Mat {
    pub fn zero(ring: &Ring, n: usize) -> Mat {
        Mat { ring: ring.clone(), n, entries: vec![ring.zero(); n * n] }
    }

    pub fn identity(ring: &Ring, n: usize) -> Mat {
        let mut m = Mat::zero(ring, n);
        for i in 0..n {
            m.set(i, i, ring.one());
        }
        m
    }

    pub fn from_rows(ring: &Ring, rows: Vec<Vec<Elem>>) -> Mat {
        let n = rows.len();
        assert!(rows.iter().all(|r| r.len() == n), "square matrix expected");
        let entries = rows
            .into_iter()
            .flat_map(|r| r.into_iter())
            .map(|e| ring.normalize(e))
            .collect();
        Mat { ring: ring.clone(), n, entries }
    }

    /// Integer matrix mapped through the canonical map Z -> R.
    pub fn from_int_rows(ring: &Ring, rows: &[Vec<i128>]) -> Mat {
        let n = rows.len();
        assert!(rows.iter().all(|r| r.len() == n), "square matrix expected");
        let entries = rows.iter().flatten().map(|&v| ring.int(v)).collect();
        Mat { ring: ring.clone(), n, entries }
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> &Elem {
        &self.entries[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Elem) {
        self.entries[i * self.n + j] = v;
    }

    pub fn add(&self, other: &Mat) -> Mat {
        assert_eq!(self.n, other.n, "dimension mismatch");
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| self.ring.add(a, b))
            .collect();
        Mat { ring: self.ring.clone(), n: self.n, entries }
    }

    pub fn sub(&self, other: &Mat) -> Mat {
        assert_eq!(self.n, other.n, "dimension mismatch");
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| self.ring.sub(a, b))
            .collect();
        Mat { ring: self.ring.clone(), n: self.n, entries }
    }

    pub fn neg(&self) -> Mat {
        let entries = self.entries.iter().map(|a| self.ring.neg(a)).collect();
        Mat { ring: self.ring.clone(), n: self.n, entries }
    }

    pub fn scale(&self, c: &Elem) -> Mat {
        let entries = self.entries.iter().map(|a| self.ring.mul(c, a)).collect();
        Mat { ring: self.ring.clone(), n: self.n, entries }
    }

    pub fn mul(&self, other: &Mat) -> Mat {
        assert_eq!(self.n, other.n, "dimension mismatch");
        let n = self.n;
        let r = &self.ring;
        let mut out = Mat::zero(r, n);
        for i in 0..n {
            for k in 0..n {
                let aik = self.get(i, k);
                if r.is_zero(aik) {
                    continue;
                }
                for j in 0..n {
                    let t = r.mul(aik, other.get(k, j));
                    let cur = r.add(out.get(i, j), &t);
                    out.set(i, j, cur);
                }
            }
        }
        out
    }

    pub fn transpose(&self) -> Mat {
        let n = self.n;
        let mut out = Mat::zero(&self.ring, n);
        for i in 0..n {
            for j in 0..n {
                out.set(j, i, self.get(i, j).clone());
            }
        }
        out
    }

    pub fn trace(&self) -> Elem {
        (0..self.n).fold(self.ring.zero(), |acc, i| self.ring.add(&acc, self.get(i, i)))
    }

    pub fn pow(&self, mut k: u64) -> Mat {
        let mut acc = Mat::identity(&self.ring, self.n);
        let mut base = self.clone();
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            k >>= 1;
        }
        acc
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|e| self.ring.is_zero(e))
    }

    pub fn is_identity(&self) -> bool {
        *self == Mat::identity(&self.ring, self.n)
    }

    /// Apply an element map entrywise (ring automorphisms, base extensions).
    pub fn map_entries(&self, target: &Ring, f: impl Fn(&Elem) -> Elem) -> Mat {
        let entries = self.entries.iter().map(|e| target.normalize(f(e))).collect();
        Mat { ring: target.clone(), n: self.n, entries }
    }

    pub fn mul_vec(&self, v: &[Elem]) -> Vec<Elem> {
        assert_eq!(v.len(), self.n, "dimension mismatch");
        (0..self.n)
            .map(|i| {
                (0..self.n).fold(self.ring.zero(), |acc, j| {
                    self.ring.add(&acc, &self.ring.mul(self.get(i, j), &v[j]))
                })
            })
            .collect()
    }

    /// Characteristic polynomial of the matrix, coefficients of det(xI - A)
    /// in descending degree: [1, c_{n-1}, ..., c_0]. Division-free.
    pub fn char_poly(&self) -> Vec<Elem> {
        let r = &self.ring;
        let n = self.n;
        if n == 0 {
            return vec![r.one()];
        }
        // Berkowitz iteration over leading principal submatrices.
        let mut p = vec![r.one(), r.neg(self.get(0, 0))];
        for m in 1..n {
            // Toeplitz column: t_0 = 1, t_1 = -A[m][m], t_{k+2} = -(row m) M^k (col m).
            let mut t = Vec::with_capacity(m + 2);
            t.push(r.one());
            t.push(r.neg(self.get(m, m)));
            let mut v: Vec<Elem> = (0..m).map(|i| self.get(i, m).clone()).collect();
            for _ in 0..m {
                let dot = (0..m).fold(r.zero(), |acc, j| {
                    r.add(&acc, &r.mul(self.get(m, j), &v[j]))
                });
                t.push(r.neg(&dot));
                // v := (leading m x m block) * v
                v = (0..m)
                    .map(|i| {
                        (0..m).fold(r.zero(), |acc, j| {
                            r.add(&acc, &r.mul(self.get(i, j), &v[j]))
                        })
                    })
                    .collect();
            }
            let mut next = vec![r.zero(); m + 2];
            for (i, slot) in next.iter_mut().enumerate() {
                for (j, pj) in p.iter().enumerate() {
                    if i >= j && i - j < t.len() {
                        *slot = r.add(slot, &r.mul(&t[i - j], pj));
                    }
                }
            }
            p = next;
        }
        p
    }

    pub fn det(&self) -> Elem {
        let r = &self.ring;
        let p = self.char_poly();
        let c0 = p.last().expect("nonempty").clone();
        if self.n % 2 == 0 {
            c0
        } else {
            r.neg(&c0)
        }
    }

    /// Inverse, if the determinant is a unit.
    pub fn inverse(&self) -> Result<Mat> {
        let r = &self.ring;
        let n = self.n;
        if n == 0 {
            return Ok(self.clone());
        }
        let p = self.char_poly();
        let c0 = p[n].clone();
        let Some(c0_inv) = r.inv(&c0) else {
            return Err(Error::Linalg("matrix is not invertible: constant term of the characteristic polynomial is not a unit".into()));
        };
        // Horner build of A^{n-1} + c_{n-1} A^{n-2} + ... + c_1 I.
        let mut b = Mat::identity(r, n);
        for k in 1..n {
            b = self.mul(&b);
            let ck = p[k].clone();
            for i in 0..n {
                let cur = r.add(b.get(i, i), &ck);
                b.set(i, i, cur);
            }
        }
        let scale = r.neg(&c0_inv);
        Ok(b.scale(&scale))
    }

    pub fn rows(&self) -> Vec<Vec<Elem>> {
        (0..self.n).map(|i| (0..self.n).map(|j| self.get(i, j).clone()).collect()).collect()
    }

    pub fn fmt_rows(&self) -> Vec<Vec<String>> {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.ring.fmt_elem(self.get(i, j))).collect())
            .collect()
    }
}

impl std::fmt::Display for Mat {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let rows = self.fmt_rows();
        let widths: Vec<usize> = (0..self.n)
            .map(|j| rows.iter().map(|r| r[j].len()).max().unwrap_or(1))
            .collect();
        for row in &rows {
            write!(f, "[")?;
            for (j, cell) in row.iter().enumerate() {
                if j > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{:>w$}", cell, w = widths[j])?;
            }
            writeln!(f, "]")?;
        }
        Ok(())
    }
}

/// Matrix over a fast-table ring, used for closures and exhaustive sweeps.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct FMat {
    pub n: usize,
    pub e: Vec<u16>,
}

impl FMat {
    pub fn identity(fr: &FastRing, n: usize) -> FMat {
        let mut e = vec![fr.zero(); n * n];
        for i in 0..n {
            e[i * n + i] = fr.one();
        }
        FMat { n, e }
    }

    pub fn from_mat(fr: &FastRing, m: &Mat) -> FMat {
        let n = m.n;
        let e = (0..n * n).map(|k| fr.encode(m.get(k / n, k % n))).collect();
        FMat { n, e }
    }

    pub fn to_mat(&self, fr: &FastRing) -> Mat {
        let rows = (0..self.n)
            .map(|i| (0..self.n).map(|j| fr.decode(self.e[i * self.n + j])).collect())
            .collect();
        Mat::from_rows(&fr.ring, rows)
    }

    pub fn mul(&self, other: &FMat, fr: &FastRing) -> FMat {
        debug_assert_eq!(self.n, other.n);
        let n = self.n;
        let mut out = vec![fr.zero(); n * n];
        for i in 0..n {
            for k in 0..n {
                let aik = self.e[i * n + k];
                if aik == fr.zero() {
                    continue;
                }
                for j in 0..n {
                    let t = fr.mul(aik, other.e[k * n + j]);
                    out[i * n + j] = fr.add(out[i * n + j], t);
                }
            }
        }
        FMat { n, e: out }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn z(n: u64) -> Ring {
        Ring::zn(n).expect("modulus")
    }

    fn det_by_cofactors(ring: &Ring, m: &Mat) -> Elem {
        fn go(ring: &Ring, rows: &[Vec<Elem>]) -> Elem {
            let n = rows.len();
            if n == 0 {
                return ring.one();
            }
            if n == 1 {
                return rows[0][0].clone();
            }
            let mut acc = ring.zero();
            for j in 0..n {
                let minor: Vec<Vec<Elem>> = rows[1..]
                    .iter()
                    .map(|r| {
                        r.iter()
                            .enumerate()
                            .filter(|(k, _)| *k != j)
                            .map(|(_, e)| e.clone())
                            .collect()
                    })
                    .collect();
                let term = ring.mul(&rows[0][j], &go(ring, &minor));
                acc = if j % 2 == 0 { ring.add(&acc, &term) } else { ring.sub(&acc, &term) };
            }
            acc
        }
        go(ring, &m.rows())
    }

    #[test]
    fn berkowitz_determinant_matches_cofactors_over_integers() {
        let r = Ring::integers();
        let cases: Vec<Vec<Vec<i128>>> = vec![
            vec![vec![3]],
            vec![vec![1, 2], vec![3, 4]],
            vec![vec![2, 0, 1], vec![-1, 3, 2], vec![4, 1, 0]],
            vec![vec![0, 1, 0, 0], vec![0, 0, 1, 0], vec![0, 0, 0, 1], vec![-5, 0, -2, 3]],
        ];
        for rows in cases {
            let m = Mat::from_int_rows(&r, &rows);
            assert_eq!(m.det(), det_by_cofactors(&r, &m));
        }
    }

    #[test]
    fn characteristic_polynomial_of_companion_matrix() {
        // Companion matrix of x^3 - 2x^2 + 5x - 7.
        let r = Ring::integers();
        let m = Mat::from_int_rows(&r, &[vec![0, 0, 7], vec![1, 0, -5], vec![0, 1, 2]]);
        let p = m.char_poly();
        assert_eq!(p, vec![Elem::Int(1), Elem::Int(-2), Elem::Int(5), Elem::Int(-7)]);
    }

    #[test]
    fn inverse_over_residue_ring() {
        let r = z(12);
        let m = Mat::from_int_rows(&r, &[vec![1, 2], vec![3, 7]]);
        // det = 1, a unit.
        let inv = m.inverse().expect("unit determinant");
        assert!(m.mul(&inv).is_identity());
        assert!(inv.mul(&m).is_identity());
        // det = 2 is a zero divisor mod 12.
        let bad = Mat::from_int_rows(&r, &[vec![2, 0], vec![0, 1]]);
        assert!(bad.inverse().is_err());
    }

    #[test]
    fn inverse_over_galois_field_and_localization() {
        let f4 = Ring::galois_field(4).expect("prime power");
        let y = f4.monomial(1);
        let m = Mat::from_rows(
            &f4,
            vec![vec![y.clone(), f4.one()], vec![f4.one(), y.clone()]],
        );
        // det = y^2 - 1 = y (in characteristic 2), a unit.
        assert_eq!(m.det(), f4.add(&f4.mul(&y, &y), &f4.one()));
        let inv = m.inverse().expect("unit determinant");
        assert!(m.mul(&inv).is_identity());

        let r12 = z(12);
        let p2 = r12.ideal(vec![Elem::Int(2)]).expect("finite");
        let loc = Ring::localize_at(r12, &p2).expect("prime");
        let third = loc.frac(Elem::Int(1), Elem::Int(3)).expect("odd");
        let m = Mat::from_rows(&loc, vec![vec![loc.one(), third], vec![loc.zero(), loc.one()]]);
        let inv = m.inverse().expect("unipotent");
        assert!(m.mul(&inv).is_identity());
    }

    #[test]
    fn fast_matrices_agree_with_slow_ones() {
        let r = z(5);
        let fr = FastRing::new(&r).expect("small");
        let a = Mat::from_int_rows(&r, &[vec![1, 2, 0], vec![0, 1, 3], vec![4, 0, 1]]);
        let b = Mat::from_int_rows(&r, &[vec![2, 1, 1], vec![0, 2, 0], vec![1, 0, 3]]);
        let fa = FMat::from_mat(&fr, &a);
        let fb = FMat::from_mat(&fr, &b);
        assert_eq!(fa.mul(&fb, &fr).to_mat(&fr), a.mul(&b));
        assert_eq!(FMat::identity(&fr, 3).to_mat(&fr), Mat::identity(&r, 3));
    }

    proptest! {
        #[test]
        fn determinant_is_multiplicative(
            a in proptest::collection::vec(0i128..6, 9),
            b in proptest::collection::vec(0i128..6, 9),
        ) {
            let r = z(6);
            let rows = |v: &[i128]| -> Vec<Vec<i128>> {
                v.chunks(3).map(|c| c.to_vec()).collect()
            };
            let ma = Mat::from_int_rows(&r, &rows(&a));
            let mb = Mat::from_int_rows(&r, &rows(&b));
            prop_assert_eq!(ma.mul(&mb).det(), r.mul(&ma.det(), &mb.det()));
        }

        #[test]
        fn inverse_roundtrips_when_it_exists(entries in proptest::collection::vec(0i128..12, 9)) {
            let r = z(12);
            let rows: Vec<Vec<i128>> = entries.chunks(3).map(|c| c.to_vec()).collect();
            let m = Mat::from_int_rows(&r, &rows);
            if let Ok(inv) = m.inverse() {
                prop_assert!(m.mul(&inv).is_identity());
                prop_assert!(inv.mul(&m).is_identity());
            }
        }
    }
}
