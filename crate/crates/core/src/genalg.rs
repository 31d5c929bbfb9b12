//! Recovering Lie algebra data from group elements, and the associated
//! generation questions: which matrix algebra the root generators span, and
//! which matrix units can be certified inside a weight basis.
//!
//! The unipotent generator x_a(1) determines pi(X_a) through a truncated
//! logarithm whose denominators depend on the nilpotency degree, so the
//! recovery runs in one of three modes: a plain difference when the root
//! matrices square to zero, a single halving correction when cubes vanish,
//! and the full series otherwise.

use crate::linalg::Howell;
use crate::mat::Mat;
use crate::reps::{Representation, WeightDiagram};
use crate::ring::{solve_linear, Elem, Ring};
use crate::{Error, Result};
use serde::{Deserialize, Serialize};

/// How pi(X_a) is recovered from x_a(1).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RecoveryMode {
    /// pi(X_a) = x_a(1) - E; valid when every root matrix squares to zero.
    SquareZero,
    /// pi(X_a) = m - m^2/2 with m = x_a(1) - E; valid when cubes vanish
    /// and 2 is invertible.
    Half,
    /// Truncated logarithm with all needed denominators inverted.
    Series,
}

impl RecoveryMode {
    pub fn name(&self) -> &'static str {
        match self {
            RecoveryMode::SquareZero => "square-zero",
            RecoveryMode::Half => "half",
            RecoveryMode::Series => "series",
        }
    }

    pub fn parse(s: &str) -> Result<RecoveryMode> {
        match s {
            "square-zero" => Ok(RecoveryMode::SquareZero),
            "half" => Ok(RecoveryMode::Half),
            "series" => Ok(RecoveryMode::Series),
            other => Err(Error::Parse { pos: 0, msg: format!("unknown recovery mode {other}") }),
        }
    }
}

/// The cheapest mode valid for this representation over this ring.
pub fn auto_recovery_mode(rep: &Representation, ring: &Ring) -> Result<RecoveryMode> {
    if rep.square_zero() {
        return Ok(RecoveryMode::SquareZero);
    }
    let max_power = (0..rep.basis().rootsys().num_roots())
        .map(|a| rep.divided_powers(a).len())
        .max()
        .unwrap_or(1);
    for k in 2..=max_power as i128 {
        if ring.inv(&ring.int(k)).is_none() {
            return Err(Error::Group(format!(
                "recovery needs {k} invertible, and it is not a unit in {}",
                ring.spec_string()
            )));
        }
    }
    if max_power <= 2 {
        Ok(RecoveryMode::Half)
    } else {
        Ok(RecoveryMode::Series)
    }
}

/// Recover pi(X_root) over `ring` from the unipotent x_root(1).
pub fn recover_lie_generator(
    rep: &Representation,
    ring: &Ring,
    root: usize,
    mode: RecoveryMode,
) -> Result<Mat> {
    let dim = rep.dim();
    let e = Mat::identity(ring, dim);
    let m = rep.unipotent(ring, root, &ring.one()).sub(&e);
    match mode {
        RecoveryMode::SquareZero => {
            if !rep.square_zero() {
                return Err(Error::Group(
                    "square-zero recovery asked for a module with nonzero squares".into(),
                ));
            }
            Ok(m)
        }
        RecoveryMode::Half => {
            if rep.divided_powers(root).len() > 2 {
                return Err(Error::Group(
                    "halving recovery asked for a root matrix with nonzero cube".into(),
                ));
            }
            let half = ring
                .inv(&ring.int(2))
                .ok_or_else(|| Error::Group("halving recovery needs 2 invertible".into()))?;
            Ok(m.sub(&m.mul(&m).scale(&half)))
        }
        RecoveryMode::Series => {
            // log(E + m) summed until the power vanishes.
            let mut acc = Mat::zero(ring, dim);
            let mut power = m.clone();
            let mut k: i128 = 1;
            while !power.is_zero() {
                let coeff = ring.inv(&ring.int(if k % 2 == 1 { k } else { -k })).ok_or_else(
                    || Error::Group(format!("series recovery needs {k} invertible")),
                )?;
                acc = acc.add(&power.scale(&coeff));
                power = power.mul(&m);
                k += 1;
                if k > dim as i128 + 1 {
                    return Err(Error::Group("unipotent difference is not nilpotent".into()));
                }
            }
            Ok(acc)
        }
    }
}

/// Outcome of an associative closure sweep.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum ClosureVerdict {
    FullMatrixAlgebra,
    ProperSubalgebra,
    Undecided(String),
}

/// The subalgebra of N x N matrices generated by the root matrices.
pub struct AlgebraClosure {
    pub verdict: ClosureVerdict,
    pub rounds: usize,
    pub span_generators: usize,
    pub module_size: Option<u128>,
}

/// Close the R-span of the root generator matrices under multiplication and
/// compare with the full matrix algebra. The span only ever grows, and each
/// adopted element has all its one-step products examined afterwards, so on
/// termination the span is the subalgebra generated.
pub fn algebra_closure(
    rep: &Representation,
    ring: &Ring,
    max_rounds: usize,
) -> Result<AlgebraClosure> {
    let rs = rep.basis().rootsys().clone();
    let dim = rep.dim();
    let mut gens = vec![Mat::identity(ring, dim)];
    gens.extend((0..rs.num_roots()).map(|a| rep.root_matrix(a).to_ring(ring)));
    if let Some(n) = ring.residue_modulus() {
        closure_zn(&gens, dim, n, max_rounds)
    } else {
        closure_generic(&gens, dim, ring, max_rounds)
    }
}

fn vec_zn(m: &Mat, dim: usize) -> Vec<u64> {
    let mut v = Vec::with_capacity(dim * dim);
    for i in 0..dim {
        for j in 0..dim {
            let Elem::Int(x) = m.get(i, j) else { panic!("residue entries are integers") };
            v.push(*x as u64);
        }
    }
    v
}

fn closure_zn(gens: &[Mat], dim: usize, n: u64, max_rounds: usize) -> Result<AlgebraClosure> {
    let width = dim * dim;
    let mut adopted: Vec<Vec<u64>> = Vec::new();
    let mut span = Howell::new(n, width, vec![]);
    let mut frontier: Vec<Mat> = Vec::new();
    for g in gens {
        let v = vec_zn(g, dim);
        if !span.contains(&v) {
            adopted.push(v);
            span = Howell::new(n, width, adopted.clone());
            frontier.push(g.clone());
        }
    }
    let mut rounds = 0;
    while !frontier.is_empty() {
        rounds += 1;
        if rounds > max_rounds {
            return Ok(AlgebraClosure {
                verdict: ClosureVerdict::Undecided(format!(
                    "span still growing after {max_rounds} rounds"
                )),
                rounds: rounds - 1,
                span_generators: adopted.len(),
                module_size: span.module_size(),
            });
        }
        let mut next = Vec::new();
        for f in &frontier {
            for g in gens {
                let p = f.mul(g);
                let v = vec_zn(&p, dim);
                if !span.contains(&v) {
                    adopted.push(v);
                    span = Howell::new(n, width, adopted.clone());
                    next.push(p);
                }
            }
        }
        frontier = next;
    }
    let verdict = if span.is_full() {
        ClosureVerdict::FullMatrixAlgebra
    } else {
        ClosureVerdict::ProperSubalgebra
    };
    Ok(AlgebraClosure {
        verdict,
        rounds,
        span_generators: adopted.len(),
        module_size: span.module_size(),
    })
}

fn closure_generic(
    gens: &[Mat],
    dim: usize,
    ring: &Ring,
    max_rounds: usize,
) -> Result<AlgebraClosure> {
    ring.carrier().ok_or_else(|| Error::Budget("closures need a finite ring".into()))?;
    let width = dim * dim;
    let vec_of = |m: &Mat| -> Vec<Elem> {
        let mut v = Vec::with_capacity(width);
        for i in 0..dim {
            for j in 0..dim {
                v.push(m.get(i, j).clone());
            }
        }
        v
    };
    let mut basis: Vec<Vec<Elem>> = Vec::new();
    let in_span = |basis: &[Vec<Elem>], target: &[Elem]| -> Result<bool> {
        if basis.is_empty() {
            return Ok(target.iter().all(|e| ring.is_zero(e)));
        }
        let a: Vec<Vec<Elem>> =
            (0..width).map(|k| basis.iter().map(|b| b[k].clone()).collect()).collect();
        Ok(solve_linear(ring, &a, target, basis.len())?.is_some())
    };
    let mut frontier: Vec<Mat> = Vec::new();
    for g in gens {
        let v = vec_of(g);
        if !in_span(&basis, &v)? {
            basis.push(v);
            frontier.push(g.clone());
        }
    }
    let mut rounds = 0;
    while !frontier.is_empty() {
        rounds += 1;
        if rounds > max_rounds {
            return Ok(AlgebraClosure {
                verdict: ClosureVerdict::Undecided(format!(
                    "span still growing after {max_rounds} rounds"
                )),
                rounds: rounds - 1,
                span_generators: basis.len(),
                module_size: None,
            });
        }
        let mut next = Vec::new();
        for f in &frontier {
            for g in gens {
                let p = f.mul(g);
                let v = vec_of(&p);
                if !in_span(&basis, &v)? {
                    basis.push(v);
                    next.push(p);
                }
            }
        }
        frontier = next;
    }
    // Full exactly when every matrix unit lies in the span.
    let mut full = true;
    'outer: for r in 0..dim {
        for c in 0..dim {
            let mut unit = vec![ring.zero(); width];
            unit[r * dim + c] = ring.one();
            if !in_span(&basis, &unit)? {
                full = false;
                break 'outer;
            }
        }
    }
    Ok(AlgebraClosure {
        verdict: if full {
            ClosureVerdict::FullMatrixAlgebra
        } else {
            ClosureVerdict::ProperSubalgebra
        },
        rounds,
        span_generators: basis.len(),
        module_size: None,
    })
}

/// Check that conjugation by every unipotent generator maps the Lie algebra
/// span of the representation back into itself over the given ring. The span
/// is generated by the root matrices together with the brackets [X_a, X_-a]
/// for simple a.
pub fn normalization_check(rep: &Representation, ring: &Ring) -> Result<bool> {
    let rs = rep.basis().rootsys().clone();
    let dim = rep.dim();
    let carrier =
        ring.carrier().ok_or_else(|| Error::Budget("normalization sweep needs a finite ring".into()))?.to_vec();
    let mut lie: Vec<Mat> = (0..rs.num_roots()).map(|a| rep.root_matrix(a).to_ring(ring)).collect();
    for &s in rs.simple_indices() {
        lie.push(rep.root_matrix(s).comm(&rep.root_matrix(rs.neg(s))).to_ring(ring));
    }
    let width = dim * dim;
    let vec_of = |m: &Mat| -> Vec<Elem> {
        let mut v = Vec::with_capacity(width);
        for i in 0..dim {
            for j in 0..dim {
                v.push(m.get(i, j).clone());
            }
        }
        v
    };
    let lie_vecs: Vec<Vec<Elem>> = lie.iter().map(&vec_of).collect();
    let a: Vec<Vec<Elem>> =
        (0..width).map(|k| lie_vecs.iter().map(|b| b[k].clone()).collect()).collect();
    for b in 0..rs.num_roots() {
        for t in &carrier {
            let g = rep.unipotent(ring, b, t);
            let ginv = rep.unipotent(ring, b, &ring.neg(t));
            for m in &lie {
                let conj = g.mul(m).mul(&ginv);
                if solve_linear(ring, &a, &vec_of(&conj), lie.len())?.is_none() {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// A certified route to a matrix unit in a multiplicity-free weight basis:
/// a start vertex and simple-root labels i0, i1, ..., ik such that the walk
/// exists from the start, the full label sequence is realizable from no
/// other vertex, and the tail past i0 is realizable only from the vertex one
/// i0-step above the start.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PathCertificate {
    pub start: usize,
    pub labels: Vec<usize>,
}

fn walk(d: &WeightDiagram, from: usize, labels: &[usize]) -> Option<usize> {
    let mut v = from;
    for &l in labels {
        v = d.step_up(v, l)?;
    }
    Some(v)
}

fn realizers(d: &WeightDiagram, labels: &[usize]) -> Vec<usize> {
    (0..d.dim()).filter(|&v| walk(d, v, labels).is_some()).collect()
}

/// Soundness of a certificate against a diagram.
pub fn check_path_certificate(d: &WeightDiagram, cert: &PathCertificate) -> Result<()> {
    if cert.labels.len() < 2 {
        return Err(Error::Group("a certificate needs at least two labels".into()));
    }
    if walk(d, cert.start, &cert.labels).is_none() {
        return Err(Error::Group("certificate walk does not exist from its start".into()));
    }
    let full = realizers(d, &cert.labels);
    if full != vec![cert.start] {
        return Err(Error::Group(format!(
            "label sequence is realizable from {} vertices, need exactly the start",
            full.len()
        )));
    }
    let up = d
        .step_up(cert.start, cert.labels[0])
        .ok_or_else(|| Error::Group("first step missing".into()))?;
    let tail = realizers(d, &cert.labels[1..]);
    if tail != vec![up] {
        return Err(Error::Group(format!(
            "tail sequence is realizable from {} vertices, need exactly the step-up vertex",
            tail.len()
        )));
    }
    Ok(())
}

/// Search for a certificate starting at `start` whose first label is
/// `first_label`, shortest first and lexicographically smallest within a
/// length. Walks only move up in height, so the enumeration is finite.
pub fn find_path_certificate(
    d: &WeightDiagram,
    start: usize,
    first_label: usize,
    max_len: usize,
) -> Option<PathCertificate> {
    let second = d.step_up(start, first_label)?;
    let mut labels: Vec<usize> = d.edges.iter().map(|e| e.label).collect();
    labels.sort_unstable();
    labels.dedup();
    // Depth-first with sorted labels enumerates the sequences of each target
    // length in lexicographic order.
    fn dfs(
        d: &WeightDiagram,
        labels: &[usize],
        v: usize,
        seq: &mut Vec<usize>,
        len: usize,
        start: usize,
    ) -> Option<PathCertificate> {
        if seq.len() == len {
            let cert = PathCertificate { start, labels: seq.clone() };
            return check_path_certificate(d, &cert).ok().map(|_| cert);
        }
        for &l in labels {
            if let Some(w) = d.step_up(v, l) {
                seq.push(l);
                let hit = dfs(d, labels, w, seq, len, start);
                seq.pop();
                if hit.is_some() {
                    return hit;
                }
            }
        }
        None
    }
    for len in 2..=max_len {
        let mut seq = vec![first_label];
        if let Some(cert) = dfs(d, &labels, second, &mut seq, len, start) {
            return Some(cert);
        }
    }
    None
}

/// A matrix unit produced from a certificate: the product of the up-steps
/// followed by the down-steps of the tail collapses to sign * E_{row, col},
/// sending basis vector `col` to `row`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MatrixUnit {
    pub row: usize,
    pub col: usize,
    pub sign: i64,
}

pub fn matrix_unit_from_certificate(
    rep: &Representation,
    cert: &PathCertificate,
) -> Result<MatrixUnit> {
    let d = rep.weight_diagram()?;
    check_path_certificate(&d, cert)?;
    let rs = rep.basis().rootsys().clone();
    let simple = |k: usize| rs.simple_indices()[k];
    // Product of the raising matrices along the walk, rightmost acting first.
    let mut up = rep.root_matrix(simple(cert.labels[0])).clone();
    for &l in &cert.labels[1..] {
        up = rep.root_matrix(simple(l)).mul(&up);
    }
    // Lowering product of the tail, X_{-i1} ... X_{-ik}, undoing the walk
    // back to the vertex one step above the start.
    let target = d.step_up(cert.start, cert.labels[0]).expect("checked step");
    let mut down: Option<crate::reps::IntMat> = None;
    for &l in &cert.labels[1..] {
        let m = rep.root_matrix(rs.neg(simple(l))).clone();
        down = Some(match down {
            None => m,
            Some(acc) => acc.mul(&m),
        });
    }
    let prod = match down {
        Some(downm) => downm.mul(&up),
        None => up,
    };
    let entries: Vec<(usize, usize, i64)> = prod.entries().collect();
    if entries.len() != 1 || entries[0].2.abs() != 1 {
        return Err(Error::Group(format!(
            "certificate product has {} entries instead of a single unit",
            entries.len()
        )));
    }
    let (r, c, s) = entries[0];
    if r != target || c != cert.start {
        return Err(Error::Group("certificate product landed on the wrong unit".into()));
    }
    Ok(MatrixUnit { row: r, col: c, sign: s })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chevbasis::ChevalleyBasis;
    use crate::rootsys::RootSystem;
    use crate::weights::ambient_to_fund;
    use std::sync::Arc;

    fn rep_of(name: &str, rep_name: &str) -> Arc<Representation> {
        let rs = Arc::new(RootSystem::parse_name(name).unwrap());
        let cb = Arc::new(ChevalleyBasis::new(rs).unwrap());
        Arc::new(Representation::by_name(&cb, rep_name).unwrap())
    }

    #[test]
    fn halving_recovery_round_trips_the_adjoint() {
        let rep = rep_of("B2", "adjoint");
        let ring = Ring::zn(5).unwrap();
        assert_eq!(auto_recovery_mode(&rep, &ring).unwrap(), RecoveryMode::Half);
        for a in 0..rep.basis().rootsys().num_roots() {
            let got = recover_lie_generator(&rep, &ring, a, RecoveryMode::Half).unwrap();
            assert_eq!(got, rep.root_matrix(a).to_ring(&ring));
        }
    }

    #[test]
    fn square_zero_recovery_round_trips_the_standard_module() {
        let rep = rep_of("A3", "standard");
        let ring = Ring::zn(4).unwrap();
        assert_eq!(auto_recovery_mode(&rep, &ring).unwrap(), RecoveryMode::SquareZero);
        for a in 0..rep.basis().rootsys().num_roots() {
            let got = recover_lie_generator(&rep, &ring, a, RecoveryMode::SquareZero).unwrap();
            assert_eq!(got, rep.root_matrix(a).to_ring(&ring));
        }
    }

    #[test]
    fn series_recovery_handles_cubic_root_matrices() {
        let rep = rep_of("G2", "adjoint");
        let ring = Ring::zn(7).unwrap();
        assert_eq!(auto_recovery_mode(&rep, &ring).unwrap(), RecoveryMode::Series);
        for a in 0..rep.basis().rootsys().num_roots() {
            let got = recover_lie_generator(&rep, &ring, a, RecoveryMode::Series).unwrap();
            assert_eq!(got, rep.root_matrix(a).to_ring(&ring));
        }
    }

    #[test]
    fn recovery_mode_requirements_are_enforced() {
        let rep = rep_of("B2", "adjoint");
        // 2 is a zero divisor mod 4: the halving mode must refuse.
        let ring = Ring::zn(4).unwrap();
        assert!(auto_recovery_mode(&rep, &ring).is_err());
        let a = 0;
        assert!(recover_lie_generator(&rep, &ring, a, RecoveryMode::SquareZero).is_err());
    }

    #[test]
    fn standard_generators_span_the_full_matrix_algebra() {
        let rep = rep_of("A2", "standard");
        for n in [5u64, 6] {
            let ring = Ring::zn(n).unwrap();
            let out = algebra_closure(&rep, &ring, 20).unwrap();
            assert_eq!(out.verdict, ClosureVerdict::FullMatrixAlgebra, "Z/{n}");
            assert_eq!(out.module_size, Some((n as u128).pow(9)));
        }
    }

    #[test]
    fn closure_over_a_field_extension_uses_the_generic_path() {
        let rep = rep_of("A2", "standard");
        let ring = Ring::galois_field(4).unwrap();
        let out = algebra_closure(&rep, &ring, 20).unwrap();
        assert_eq!(out.verdict, ClosureVerdict::FullMatrixAlgebra);
    }

    #[test]
    fn adjoint_generators_fill_the_matrix_algebra_when_irreducible() {
        let rep = rep_of("A2", "adjoint");
        let ring = Ring::zn(5).unwrap();
        let out = algebra_closure(&rep, &ring, 30).unwrap();
        assert_eq!(out.verdict, ClosureVerdict::FullMatrixAlgebra);
    }

    #[test]
    fn short_root_submodule_keeps_the_span_proper_in_residue_two() {
        // Mod 2 the short root vectors and their coroots span an invariant
        // submodule of the rank-two orthogonal algebra, so the generators
        // cannot reach every matrix.
        let rep = rep_of("B2", "adjoint");
        let ring = Ring::zn(2).unwrap();
        let out = algebra_closure(&rep, &ring, 30).unwrap();
        assert_eq!(out.verdict, ClosureVerdict::ProperSubalgebra);
    }

    #[test]
    fn closure_respects_its_round_budget() {
        let rep = rep_of("A2", "standard");
        let ring = Ring::zn(5).unwrap();
        let out = algebra_closure(&rep, &ring, 1).unwrap();
        assert!(matches!(out.verdict, ClosureVerdict::Undecided(_)));
    }

    #[test]
    fn conjugation_preserves_the_lie_span() {
        let rep = rep_of("A2", "standard");
        let ring = Ring::zn(5).unwrap();
        assert!(normalization_check(&rep, &ring).unwrap());
        let repb = rep_of("B2", "adjoint");
        let ring3 = Ring::zn(3).unwrap();
        assert!(normalization_check(&repb, &ring3).unwrap());
    }

    fn a7_vertex(rep: &Representation, ambient: [i64; 8]) -> usize {
        let rs = rep.basis().rootsys();
        let fund = ambient_to_fund(rs, &ambient).unwrap();
        rep.weights().iter().position(|w| *w == fund).unwrap()
    }

    #[test]
    fn known_certificates_in_the_rank_seven_exterior_square() {
        let rep = rep_of("A7", "w2");
        let d = rep.weight_diagram().unwrap();
        // From the lowest weight, labels a6 a7 a5; from e5+e8, labels a4 a7 a3
        // (zero-based below). Both certify single matrix units.
        let g1 = a7_vertex(&rep, [0, 0, 0, 0, 0, 0, 1, 1]);
        let g2 = a7_vertex(&rep, [0, 0, 0, 0, 0, 1, 0, 1]);
        let cert1 = PathCertificate { start: g1, labels: vec![5, 6, 4] };
        check_path_certificate(&d, &cert1).unwrap();
        let unit1 = matrix_unit_from_certificate(&rep, &cert1).unwrap();
        assert_eq!((unit1.row, unit1.col), (g2, g1));
        assert_eq!(unit1.sign.abs(), 1);

        let g4 = a7_vertex(&rep, [0, 0, 0, 0, 1, 0, 0, 1]);
        let g6 = a7_vertex(&rep, [0, 0, 0, 1, 0, 0, 0, 1]);
        let cert2 = PathCertificate { start: g4, labels: vec![3, 6, 2] };
        check_path_certificate(&d, &cert2).unwrap();
        let unit2 = matrix_unit_from_certificate(&rep, &cert2).unwrap();
        assert_eq!((unit2.row, unit2.col), (g6, g4));
    }

    #[test]
    fn certificate_search_finds_sound_witnesses() {
        let rep = rep_of("A7", "w2");
        let d = rep.weight_diagram().unwrap();
        let g1 = a7_vertex(&rep, [0, 0, 0, 0, 0, 0, 1, 1]);
        let found = find_path_certificate(&d, g1, 5, 6).expect("certificate exists");
        check_path_certificate(&d, &found).unwrap();
        let unit = matrix_unit_from_certificate(&rep, &found).unwrap();
        let g2 = a7_vertex(&rep, [0, 0, 0, 0, 0, 1, 0, 1]);
        assert_eq!((unit.row, unit.col), (g2, g1));
    }

    #[test]
    fn unsound_certificates_are_rejected() {
        let rep = rep_of("A3", "standard");
        let d = rep.weight_diagram().unwrap();
        // In the standard module of rank 3 every label sequence of length two
        // down the chain is realizable from exactly one vertex, but tails of
        // length one are realizable from one vertex too; a sequence that does
        // not exist must still be rejected.
        let bad = PathCertificate { start: 0, labels: vec![0, 0] };
        assert!(check_path_certificate(&d, &bad).is_err());
    }
}
