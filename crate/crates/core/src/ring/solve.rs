//! Linear systems over the supported rings.
//!
//! Everything reduces to Z or Z/n: residue rings solve directly through the
//! Howell form, products split componentwise, polynomial quotients flatten
//! coefficientwise over their base, and finite fraction rings lift along the
//! surjection from the base with slack unknowns absorbing its kernel.

use super::{Elem, Ring, RingKind};
use crate::linalg;
use crate::{Error, Result};
use std::collections::BTreeSet;

/// One particular solution plus generators of the homogeneous solutions.
#[derive(Debug, Clone)]
pub struct RingLinSolution {
    pub particular: Vec<Elem>,
    pub nullspace: Vec<Vec<Elem>>,
}

/// Solve a * x = b over `ring`, with `a.len()` equations in `cols` unknowns.
/// `Ok(None)` means the system is provably unsolvable.
pub fn solve_linear(
    ring: &Ring,
    a: &[Vec<Elem>],
    b: &[Elem],
    cols: usize,
) -> Result<Option<RingLinSolution>> {
    let m = a.len();
    assert_eq!(b.len(), m, "dimension mismatch in solve_linear");
    debug_assert!(a.iter().all(|r| r.len() == cols), "ragged system matrix");
    match ring.kind() {
        RingKind::Zn { n } => {
            let n = *n;
            let to_u = |e: &Elem| -> u64 {
                let Elem::Int(v) = e else { panic!("residue elements are integers") };
                *v as u64
            };
            let au: Vec<Vec<u64>> = a.iter().map(|r| r.iter().map(to_u).collect()).collect();
            let bu: Vec<u64> = b.iter().map(to_u).collect();
            Ok(linalg::solve_mod(n, &au, &bu, cols).map(|s| RingLinSolution {
                particular: s.particular.iter().map(|&v| Elem::Int(v as i128)).collect(),
                nullspace: s
                    .nullspace
                    .iter()
                    .map(|g| g.iter().map(|&v| Elem::Int(v as i128)).collect())
                    .collect(),
            }))
        }
        RingKind::Int => {
            let to_i = |e: &Elem| -> i128 {
                let Elem::Int(v) = e else { panic!("integer elements expected") };
                *v
            };
            if m == 0 {
                let nullspace = (0..cols)
                    .map(|j| {
                        (0..cols)
                            .map(|i| Elem::Int(if i == j { 1 } else { 0 }))
                            .collect()
                    })
                    .collect();
                return Ok(Some(RingLinSolution {
                    particular: vec![Elem::Int(0); cols],
                    nullspace,
                }));
            }
            let ai: Vec<Vec<i128>> = a.iter().map(|r| r.iter().map(to_i).collect()).collect();
            let bi: Vec<i128> = b.iter().map(to_i).collect();
            let Some(x) = linalg::z_solve(&ai, &bi) else { return Ok(None) };
            let snf = linalg::smith(&ai);
            let diag = snf.diagonal();
            let mut nullspace = Vec::new();
            for j in 0..cols {
                let free = j >= diag.len() || diag[j] == 0;
                if free {
                    nullspace.push((0..cols).map(|i| Elem::Int(snf.v[i][j])).collect());
                }
            }
            Ok(Some(RingLinSolution {
                particular: x.into_iter().map(Elem::Int).collect(),
                nullspace,
            }))
        }
        RingKind::Product { factors } => {
            let comp = |e: &Elem, idx: usize| -> Elem {
                let Elem::Tuple(xs) = e else { panic!("product elements are tuples") };
                xs[idx].clone()
            };
            let mut parts = Vec::with_capacity(factors.len());
            for (idx, f) in factors.iter().enumerate() {
                let af: Vec<Vec<Elem>> =
                    a.iter().map(|r| r.iter().map(|e| comp(e, idx)).collect()).collect();
                let bf: Vec<Elem> = b.iter().map(|e| comp(e, idx)).collect();
                match solve_linear(f, &af, &bf, cols)? {
                    Some(s) => parts.push(s),
                    None => return Ok(None),
                }
            }
            let particular: Vec<Elem> = (0..cols)
                .map(|j| Elem::Tuple(parts.iter().map(|p| p.particular[j].clone()).collect()))
                .collect();
            let mut nullspace = Vec::new();
            for (idx, part) in parts.iter().enumerate() {
                for g in &part.nullspace {
                    let vec: Vec<Elem> = (0..cols)
                        .map(|j| {
                            Elem::Tuple(
                                factors
                                    .iter()
                                    .enumerate()
                                    .map(|(k, fk)| {
                                        if k == idx {
                                            g[j].clone()
                                        } else {
                                            fk.zero()
                                        }
                                    })
                                    .collect(),
                            )
                        })
                        .collect();
                    nullspace.push(vec);
                }
            }
            Ok(Some(RingLinSolution { particular, nullspace }))
        }
        RingKind::PolyQuot { base, modulus, .. } => {
            let d = modulus.len() - 1;
            let coeffs_of = |e: &Elem| -> Vec<Elem> {
                let Elem::Poly(cs) = e else { panic!("quotient elements are polynomials") };
                let mut v = cs.clone();
                v.resize(d, base.zero());
                v
            };
            // Unknown x_j = sum_t x_{j,t} y^t; equation (i, s) collects the
            // s-th coefficient of a_ij * y^t as the weight of x_{j,t}.
            let mut rows = Vec::with_capacity(m * d);
            let mut rhs = Vec::with_capacity(m * d);
            let monomials: Vec<Elem> = (0..d).map(|t| ring.monomial(t)).collect();
            for i in 0..m {
                let weights: Vec<Vec<Vec<Elem>>> = (0..cols)
                    .map(|j| {
                        monomials
                            .iter()
                            .map(|yt| coeffs_of(&ring.mul(&a[i][j], yt)))
                            .collect()
                    })
                    .collect();
                let bcoef = coeffs_of(&b[i]);
                for s in 0..d {
                    let mut row = Vec::with_capacity(cols * d);
                    for w_j in weights.iter() {
                        for w_jt in w_j.iter() {
                            row.push(w_jt[s].clone());
                        }
                    }
                    rows.push(row);
                    rhs.push(bcoef[s].clone());
                }
            }
            let Some(flat) = solve_linear(base, &rows, &rhs, cols * d)? else {
                return Ok(None);
            };
            let unflatten = |v: &[Elem]| -> Vec<Elem> {
                (0..cols)
                    .map(|j| ring.normalize(Elem::Poly(v[j * d..(j + 1) * d].to_vec())))
                    .collect()
            };
            let particular = unflatten(&flat.particular);
            let nullspace: Vec<Vec<Elem>> = flat
                .nullspace
                .iter()
                .map(|g| unflatten(g))
                .filter(|g| g.iter().any(|e| !ring.is_zero(e)))
                .collect();
            Ok(Some(RingLinSolution { particular, nullspace }))
        }
        RingKind::Fractions { base, .. } => {
            if base.carrier().is_none() {
                return Err(Error::Linalg(format!(
                    "linear solving over {} is not supported",
                    ring.spec_string()
                )));
            }
            // The base surjects onto the fraction ring; solve the lifted
            // system with slack unknowns sweeping the kernel ideal.
            let lift = |e: &Elem| -> Elem {
                let Elem::Frac(num, den) = e else { panic!("fraction elements expected") };
                debug_assert!(base.is_one(den), "canonical fractions have denominator 1");
                (**num).clone()
            };
            let kernel: Vec<Elem> = base
                .carrier()
                .expect("finite base")
                .iter()
                .filter(|e| {
                    let img = ring.from_base((*e).clone()).expect("total on the base");
                    ring.is_zero(&img)
                })
                .cloned()
                .collect();
            let kgens = additive_generators(base, &kernel);
            let g = kgens.len();
            let total = cols + m * g;
            let mut rows = Vec::with_capacity(m);
            for (i, arow) in a.iter().enumerate() {
                let mut row: Vec<Elem> = arow.iter().map(&lift).collect();
                row.extend(vec![base.zero(); m * g]);
                for (t, k) in kgens.iter().enumerate() {
                    row[cols + i * g + t] = k.clone();
                }
                rows.push(row);
            }
            let rhs: Vec<Elem> = b.iter().map(&lift).collect();
            let Some(sol) = solve_linear(base, &rows, &rhs, total)? else {
                return Ok(None);
            };
            let project = |v: &[Elem]| -> Result<Vec<Elem>> {
                v[..cols].iter().map(|e| ring.from_base(e.clone())).collect()
            };
            let particular = project(&sol.particular)?;
            let mut nullspace = Vec::new();
            for gvec in &sol.nullspace {
                let img = project(gvec)?;
                if img.iter().any(|e| !ring.is_zero(e)) {
                    nullspace.push(img);
                }
            }
            Ok(Some(RingLinSolution { particular, nullspace }))
        }
        RingKind::Poly { .. } => Err(Error::Linalg(format!(
            "linear solving over {} is not supported",
            ring.spec_string()
        ))),
    }
}

/// Minimal generating set of a finite additive group given by its elements.
fn additive_generators(ring: &Ring, elems: &[Elem]) -> Vec<Elem> {
    let mut gens: Vec<Elem> = Vec::new();
    let mut span: BTreeSet<Elem> = BTreeSet::new();
    span.insert(ring.zero());
    for e in elems {
        if span.contains(e) {
            continue;
        }
        gens.push(e.clone());
        // Rebuild the additive closure with the new generator.
        let mut frontier: Vec<Elem> = span.iter().cloned().collect();
        while let Some(x) = frontier.pop() {
            for g in &gens {
                let y = ring.add(&x, g);
                if span.insert(y.clone()) {
                    frontier.push(y);
                }
            }
        }
    }
    gens
}
