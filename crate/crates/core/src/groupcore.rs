//! Groups of points: generators, torus elements, defining relations, and
//! finite closures.
//!
//! Elements are invertible matrices over a commutative ring, produced from a
//! representation's divided powers. The unipotent generators x_a(t) come
//! straight from the representation; w_a(t) and h_a(t) are the usual words in
//! them; general diagonal elements h(chi) are built from characters of the
//! representation's weight lattice. The defining relations of the elementary
//! subgroup are verified numerically, exhaustively or by seeded sampling,
//! with the commutator constants extracted once per root pair by symbolic
//! computation over Z[t][u].

use crate::mat::{FMat, Mat};
use crate::reps::Representation;
use crate::ring::{Elem, FastRing, Ring};
use crate::weights::WeightQuotient;
use crate::{Error, Result};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use serde::Serialize;
use std::collections::{HashMap, HashSet, VecDeque};
use std::sync::Arc;

/// A group element: its matrix and the generator word that produced it
/// (letters are unipotent generators x_root(t)).
#[derive(Clone, Debug)]
pub struct GroupElement {
    pub mat: Mat,
    pub word: Vec<(usize, Elem)>,
}

/// A character of the representation's weight lattice with unit values,
/// recorded by its values on the lattice's canonical basis rows.
#[derive(Clone, Debug, PartialEq)]
pub struct TorusCharacter {
    pub values: Vec<Elem>,
}

/// How to drive a verification sweep.
#[derive(Clone, Copy, Debug)]
pub enum SamplePolicy {
    Exhaustive,
    Seeded { seed: u64, cases: u32 },
}

/// Outcome of one relation family's sweep.
#[derive(Clone, Debug, Serialize)]
pub struct RelationCheck {
    pub relation: String,
    pub cases: u64,
    pub failures: Vec<String>,
}

/// Results of a relation verification run.
#[derive(Clone, Debug, Serialize)]
pub struct RelationReport {
    pub system: String,
    pub rep: String,
    pub ring: String,
    pub policy: String,
    pub checks: Vec<RelationCheck>,
}

impl RelationReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.failures.is_empty())
    }
}

/// One term of a commutator expansion: the root i*alpha + j*beta and the
/// integer coefficient of t^i u^j.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CommutatorTerm {
    pub root: usize,
    pub i: i64,
    pub j: i64,
    pub coefficient: i64,
}

/// Result of a closure sweep.
pub enum ClosureOutcome {
    Complete(Vec<Mat>),
    BudgetExceeded { explored: usize },
}

/// Named generator families inside the full group.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SubgroupKind {
    Elementary,
    UpperUnipotent,
    LowerUnipotent,
    Torus,
    WeylLift,
}

/// Membership verdict for a matrix against the full group.
#[derive(Clone, Debug, PartialEq)]
pub enum Membership {
    Member,
    NonMember,
    Undecided(String),
}

pub struct ChevalleyGroup {
    rep: Arc<Representation>,
    ring: Ring,
    quotient: WeightQuotient,
}

impl ChevalleyGroup {
    pub fn new(rep: Arc<Representation>, ring: Ring) -> Result<ChevalleyGroup> {
        let rs = rep.basis().rootsys().clone();
        let quotient = rep.lattice().quotient_mod_roots(&rs)?;
        Ok(ChevalleyGroup { rep, ring, quotient })
    }

    pub fn rep(&self) -> &Arc<Representation> {
        &self.rep
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn quotient(&self) -> &WeightQuotient {
        &self.quotient
    }

    pub fn identity(&self) -> GroupElement {
        GroupElement { mat: Mat::identity(&self.ring, self.rep.dim()), word: vec![] }
    }

    pub fn x(&self, root: usize, t: &Elem) -> GroupElement {
        let t = self.ring.normalize(t.clone());
        GroupElement {
            mat: self.rep.unipotent(&self.ring, root, &t),
            word: vec![(root, t)],
        }
    }

    pub fn mul(&self, a: &GroupElement, b: &GroupElement) -> GroupElement {
        let mut word = a.word.clone();
        word.extend(b.word.iter().cloned());
        GroupElement { mat: a.mat.mul(&b.mat), word }
    }

    pub fn inv(&self, a: &GroupElement) -> GroupElement {
        let word: Vec<(usize, Elem)> =
            a.word.iter().rev().map(|(r, t)| (*r, self.ring.neg(t))).collect();
        let mat = word.iter().fold(Mat::identity(&self.ring, self.rep.dim()), |acc, (r, t)| {
            acc.mul(&self.rep.unipotent(&self.ring, *r, t))
        });
        GroupElement { mat, word }
    }

    /// w_root(t) = x_root(t) x_{-root}(-1/t) x_root(t); t must be a unit.
    pub fn w(&self, root: usize, t: &Elem) -> Result<GroupElement> {
        let tinv = self.ring.inv(t).ok_or_else(|| {
            Error::Group(format!("w needs an invertible parameter, got {}", self.ring.fmt_elem(t)))
        })?;
        let rs = self.rep.basis().rootsys();
        let a = self.x(root, t);
        let b = self.x(rs.neg(root), &self.ring.neg(&tinv));
        Ok(self.mul(&self.mul(&a, &b), &a))
    }

    /// h_root(t) = w_root(t) w_root(1)^{-1}; t must be a unit.
    pub fn h(&self, root: usize, t: &Elem) -> Result<GroupElement> {
        let wt = self.w(root, t)?;
        let w1 = self.w(root, &self.ring.one())?;
        Ok(self.mul(&wt, &self.inv(&w1)))
    }

    /// The character lambda -> u^{<lambda, root>}.
    pub fn root_character(&self, root: usize, u: &Elem) -> Result<TorusCharacter> {
        if !self.ring.is_invertible(u) {
            return Err(Error::Group(format!(
                "character values must be units, got {}",
                self.ring.fmt_elem(u)
            )));
        }
        let cb = self.rep.basis();
        let coroot = cb.coroot_coords(root);
        let mut values = Vec::new();
        for row in self.rep.lattice().basis() {
            let k: i64 = coroot.iter().zip(row.iter()).map(|(&c, &x)| c * x).sum();
            values.push(self.unit_power(u, k)?);
        }
        Ok(TorusCharacter { values })
    }

    /// An arbitrary character from unit values on the lattice basis.
    pub fn character(&self, values: Vec<Elem>) -> Result<TorusCharacter> {
        if values.len() != self.rep.lattice().basis().len() {
            return Err(Error::Group("one value per lattice basis row is required".into()));
        }
        for v in &values {
            if !self.ring.is_invertible(v) {
                return Err(Error::Group(format!(
                    "character values must be units, got {}",
                    self.ring.fmt_elem(v)
                )));
            }
        }
        Ok(TorusCharacter { values: values.into_iter().map(|v| self.ring.normalize(v)).collect() })
    }

    fn unit_power(&self, u: &Elem, k: i64) -> Result<Elem> {
        if k >= 0 {
            Ok(self.ring.pow(u, k as u64))
        } else {
            let ui = self
                .ring
                .inv(u)
                .ok_or_else(|| Error::Group("negative power of a non-unit".into()))?;
            Ok(self.ring.pow(&ui, (-k) as u64))
        }
    }

    /// Value of a character on a lattice member given in fundamental
    /// coordinates.
    pub fn character_value(&self, chi: &TorusCharacter, fund: &[i64]) -> Result<Elem> {
        let coords = self.rep.lattice().coordinates(fund)?;
        let mut acc = self.ring.one();
        for (v, &k) in chi.values.iter().zip(coords.iter()) {
            acc = self.ring.mul(&acc, &self.unit_power(v, k)?);
        }
        Ok(acc)
    }

    /// The diagonal element h(chi) acting on each weight vector by the
    /// character value of its weight.
    pub fn torus_element(&self, chi: &TorusCharacter) -> Result<Mat> {
        let mut m = Mat::zero(&self.ring, self.rep.dim());
        for i in 0..self.rep.dim() {
            let v = self.character_value(chi, self.rep.weight(i))?;
            m.set(i, i, v);
        }
        Ok(m)
    }

    /// Center of the elementary subgroup: diagonal elements h(chi) for the
    /// characters chi that kill the root lattice, i.e. characters of the
    /// finite quotient lattice/roots. Such elements commute with every
    /// unipotent generator, and any central element is of this shape.
    pub fn center_of_elementary(&self) -> Result<Vec<Mat>> {
        let units = self.ring.units().to_vec();
        let rank = self.quotient.invariants.len();
        // Per invariant factor d, the values of order dividing d.
        let mut choices: Vec<Vec<Elem>> = Vec::with_capacity(rank);
        for &d in &self.quotient.invariants {
            let opts: Vec<Elem> = units
                .iter()
                .filter(|u| self.ring.is_one(&self.ring.pow(u, d as u64)))
                .cloned()
                .collect();
            choices.push(opts);
        }
        let mut out: Vec<Mat> = Vec::new();
        let mut pick = vec![0usize; rank];
        loop {
            // Character on quotient coordinates: weight w maps to the
            // product of chosen values to the powers w_i.
            let mut m = Mat::zero(&self.ring, self.rep.dim());
            for i in 0..self.rep.dim() {
                let w = self.quotient.coords(self.rep.weight(i))?;
                let mut v = self.ring.one();
                for (k, &wk) in w.iter().enumerate() {
                    v = self.ring.mul(&v, &self.ring.pow(&choices[k][pick[k]], wk as u64));
                }
                m.set(i, i, v);
            }
            if !out.contains(&m) {
                out.push(m);
            }
            // Advance the mixed-radix counter.
            let mut k = 0;
            loop {
                if k == rank {
                    return Ok(out);
                }
                pick[k] += 1;
                if pick[k] < choices[k].len() {
                    break;
                }
                pick[k] = 0;
                k += 1;
            }
        }
    }

    // -- relation verification ----------------------------------------------

    pub fn verify_relations(&self, policy: SamplePolicy) -> Result<RelationReport> {
        let rs = self.rep.basis().rootsys().clone();
        let n = rs.num_roots();
        let carrier = self
            .ring
            .carrier()
            .ok_or_else(|| Error::Budget("relation sweep needs a finite ring".into()))?
            .to_vec();
        let units = self.ring.units().to_vec();
        let mut checks = Vec::new();

        // Additivity of each root group.
        let mut r1 = RelationCheck { relation: "R1".into(), cases: 0, failures: vec![] };
        for a in 0..n {
            for (t, u) in self.param_pairs(&carrier, &carrier, policy, (a * 7 + 1) as u64) {
                r1.cases += 1;
                let lhs = self.x(a, &t).mat.mul(&self.x(a, &u).mat);
                let rhs = self.x(a, &self.ring.add(&t, &u)).mat;
                if lhs != rhs {
                    r1.failures.push(format!(
                        "R1 root={} t={} u={}",
                        rs.format_root(a),
                        self.ring.fmt_elem(&t),
                        self.ring.fmt_elem(&u)
                    ));
                }
            }
        }
        checks.push(r1);

        // Commutator formula for non-opposite pairs.
        let mut r2 = RelationCheck { relation: "R2".into(), cases: 0, failures: vec![] };
        let mut const_cache: HashMap<(usize, usize), Vec<CommutatorTerm>> = HashMap::new();
        for a in 0..n {
            for b in 0..n {
                if b == rs.neg(a) || b == a {
                    continue;
                }
                let terms = match const_cache.entry((a, b)) {
                    std::collections::hash_map::Entry::Occupied(e) => e.get().clone(),
                    std::collections::hash_map::Entry::Vacant(e) => {
                        e.insert(commutator_constants(&self.rep, a, b)?).clone()
                    }
                };
                for (t, u) in
                    self.param_pairs(&carrier, &carrier, policy, (a * n + b) as u64)
                {
                    r2.cases += 1;
                    let xa = self.x(a, &t);
                    let xb = self.x(b, &u);
                    let lhs = xa
                        .mat
                        .mul(&xb.mat)
                        .mul(&self.inv(&xa).mat)
                        .mul(&self.inv(&xb).mat);
                    let mut rhs = Mat::identity(&self.ring, self.rep.dim());
                    for term in &terms {
                        let param = self.ring.mul(
                            &self.ring.int(term.coefficient as i128),
                            &self.ring.mul(
                                &self.ring.pow(&t, term.i as u64),
                                &self.ring.pow(&u, term.j as u64),
                            ),
                        );
                        rhs = rhs.mul(&self.x(term.root, &param).mat);
                    }
                    if lhs != rhs {
                        r2.failures.push(format!(
                            "R2 alpha={} beta={} t={} u={}",
                            rs.format_root(a),
                            rs.format_root(b),
                            self.ring.fmt_elem(&t),
                            self.ring.fmt_elem(&u)
                        ));
                    }
                }
            }
        }
        checks.push(r2);

        // Well-formedness of the Weyl lifts backing the w shorthand:
        // w_a(t)^{-1} = w_a(-t).
        let mut r3 = RelationCheck { relation: "R3".into(), cases: 0, failures: vec![] };
        for a in 0..n {
            for t in self.params(&units, policy, (a * 13 + 5) as u64) {
                r3.cases += 1;
                let wt = self.w(a, &t)?;
                let wneg = self.w(a, &self.ring.neg(&t))?;
                if wt.mat.mul(&wneg.mat) != Mat::identity(&self.ring, self.rep.dim()) {
                    r3.failures.push(format!(
                        "R3 root={} t={}",
                        rs.format_root(a),
                        self.ring.fmt_elem(&t)
                    ));
                }
            }
        }
        checks.push(r3);

        // Conjugation of diagonals by Weyl lifts.
        let mut r4 = RelationCheck { relation: "R4".into(), cases: 0, failures: vec![] };
        for a in 0..n {
            let wa = self.w(a, &self.ring.one())?;
            let wa_inv = self.inv(&wa);
            for b in 0..n {
                for t in self.params(&units, policy, (a * n + b + 17) as u64) {
                    r4.cases += 1;
                    let lhs = wa.mat.mul(&self.h(b, &t)?.mat).mul(&wa_inv.mat);
                    let rhs = self.h(rs.reflect(b, a), &t)?.mat;
                    if lhs != rhs {
                        r4.failures.push(format!(
                            "R4 alpha={} beta={} t={}",
                            rs.format_root(a),
                            rs.format_root(b),
                            self.ring.fmt_elem(&t)
                        ));
                    }
                }
            }
        }
        checks.push(r4);

        // Conjugation of root elements by Weyl lifts, with a sign fixed per
        // root pair.
        let mut r5 = RelationCheck { relation: "R5".into(), cases: 0, failures: vec![] };
        for a in 0..n {
            let wa = self.w(a, &self.ring.one())?;
            let wa_inv = self.inv(&wa);
            for b in 0..n {
                let rb = rs.reflect(b, a);
                let mut sign: Option<i64> = None;
                for t in self.params(&units, policy, (a * n + b + 29) as u64) {
                    r5.cases += 1;
                    let lhs = wa.mat.mul(&self.x(b, &t).mat).mul(&wa_inv.mat);
                    let found = [1i64, -1].into_iter().find(|&s| {
                        let param = self.ring.mul(&self.ring.int(s as i128), &t);
                        lhs == self.x(rb, &param).mat
                    });
                    match (sign, found) {
                        (_, None) => r5.failures.push(format!(
                            "R5 alpha={} beta={} t={}: image is not a root element",
                            rs.format_root(a),
                            rs.format_root(b),
                            self.ring.fmt_elem(&t)
                        )),
                        (None, Some(s)) => sign = Some(s),
                        (Some(s0), Some(s)) => {
                            // Both signs can match when 2t = 0 in the ring.
                            let two_t = self.ring.add(&t, &t);
                            if s0 != s && !self.ring.is_zero(&two_t) {
                                r5.failures.push(format!(
                                    "R5 alpha={} beta={}: sign flipped between parameters",
                                    rs.format_root(a),
                                    rs.format_root(b)
                                ));
                            }
                        }
                    }
                }
            }
        }
        checks.push(r5);

        // Diagonal action on root elements.
        let mut r6 = RelationCheck { relation: "R6".into(), cases: 0, failures: vec![] };
        for a in 0..n {
            for b in 0..n {
                let k = rs.pairing(b, a);
                for (t, u) in
                    self.param_pairs(&units, &carrier, policy, (a * n + b + 43) as u64)
                {
                    r6.cases += 1;
                    let ha = self.h(a, &t)?;
                    let lhs = ha.mat.mul(&self.x(b, &u).mat).mul(&self.inv(&ha).mat);
                    let rhs = self.x(b, &self.ring.mul(&self.unit_power(&t, k)?, &u)).mat;
                    if lhs != rhs {
                        r6.failures.push(format!(
                            "R6 alpha={} beta={} t={} u={}",
                            rs.format_root(a),
                            rs.format_root(b),
                            self.ring.fmt_elem(&t),
                            self.ring.fmt_elem(&u)
                        ));
                    }
                }
            }
        }
        checks.push(r6);

        Ok(RelationReport {
            system: rs.name(),
            rep: self.rep.label().to_string(),
            ring: self.ring.spec_string(),
            policy: match policy {
                SamplePolicy::Exhaustive => "exhaustive".into(),
                SamplePolicy::Seeded { seed, cases } => format!("seeded(seed={seed}, cases={cases})"),
            },
            checks,
        })
    }

    /// Check that every diagonal h(chi) acts on root elements through the
    /// character value of the root, on seeded samples, and that the
    /// one-parameter diagonals h_a(u) agree with the characters u^<., a>.
    pub fn verify_diagonal_action(&self, seed: u64, cases: u32) -> Result<RelationReport> {
        let rs = self.rep.basis().rootsys().clone();
        let n = rs.num_roots();
        let units = self.ring.units().to_vec();
        let carrier = self
            .ring
            .carrier()
            .ok_or_else(|| Error::Budget("diagonal sweep needs a finite ring".into()))?
            .to_vec();
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let basis_len = self.rep.lattice().basis().len();

        let mut sampled =
            RelationCheck { relation: "diagonal-action".into(), cases: 0, failures: vec![] };
        for _ in 0..cases {
            let values: Vec<Elem> =
                (0..basis_len).map(|_| units[rng.random_range(0..units.len())].clone()).collect();
            let chi = self.character(values)?;
            let h = self.torus_element(&chi)?;
            let hinv = h.inverse()?;
            let b = rng.random_range(0..n);
            let xi = carrier[rng.random_range(0..carrier.len())].clone();
            sampled.cases += 1;
            let lhs = h.mul(&self.x(b, &xi).mat).mul(&hinv);
            let fund: Vec<i64> = (0..rs.rank)
                .map(|k| rs.pairing(b, rs.simple_indices()[k]))
                .collect();
            let scale = self.character_value(&chi, &fund)?;
            let rhs = self.x(b, &self.ring.mul(&scale, &xi)).mat;
            if lhs != rhs {
                sampled.failures.push(format!(
                    "diagonal-action beta={} xi={} values={:?}",
                    rs.format_root(b),
                    self.ring.fmt_elem(&xi),
                    chi.values.iter().map(|v| self.ring.fmt_elem(v)).collect::<Vec<_>>()
                ));
            }
        }

        let mut one_param =
            RelationCheck { relation: "root-characters".into(), cases: 0, failures: vec![] };
        for a in 0..n {
            for u in &units {
                one_param.cases += 1;
                let direct = self.h(a, u)?.mat;
                let viachar = self.torus_element(&self.root_character(a, u)?)?;
                if direct != viachar {
                    one_param.failures.push(format!(
                        "root-characters alpha={} u={}",
                        rs.format_root(a),
                        self.ring.fmt_elem(u)
                    ));
                }
            }
        }

        Ok(RelationReport {
            system: rs.name(),
            rep: self.rep.label().to_string(),
            ring: self.ring.spec_string(),
            policy: format!("seeded(seed={seed}, cases={cases})"),
            checks: vec![sampled, one_param],
        })
    }

    fn params(&self, pool: &[Elem], policy: SamplePolicy, salt: u64) -> Vec<Elem> {
        match policy {
            SamplePolicy::Exhaustive => pool.to_vec(),
            SamplePolicy::Seeded { seed, cases } => {
                let mut rng = ChaCha20Rng::seed_from_u64(seed ^ salt.wrapping_mul(0x9e3779b9));
                (0..cases.min(pool.len() as u32))
                    .map(|_| pool[rng.random_range(0..pool.len())].clone())
                    .collect()
            }
        }
    }

    fn param_pairs(
        &self,
        pool_a: &[Elem],
        pool_b: &[Elem],
        policy: SamplePolicy,
        salt: u64,
    ) -> Vec<(Elem, Elem)> {
        match policy {
            SamplePolicy::Exhaustive => {
                let mut out = Vec::new();
                for t in pool_a {
                    for u in pool_b {
                        out.push((t.clone(), u.clone()));
                    }
                }
                out
            }
            SamplePolicy::Seeded { seed, cases } => {
                let mut rng = ChaCha20Rng::seed_from_u64(seed ^ salt.wrapping_mul(0x85ebca6b));
                (0..cases)
                    .map(|_| {
                        (
                            pool_a[rng.random_range(0..pool_a.len())].clone(),
                            pool_b[rng.random_range(0..pool_b.len())].clone(),
                        )
                    })
                    .collect()
            }
        }
    }

    // -- closures and membership --------------------------------------------

    pub fn subgroup_generators(&self, kind: SubgroupKind) -> Result<Vec<GroupElement>> {
        let rs = self.rep.basis().rootsys().clone();
        let n = rs.num_roots();
        let carrier = self
            .ring
            .carrier()
            .ok_or_else(|| Error::Budget("closures need a finite ring".into()))?
            .to_vec();
        let units = self.ring.units().to_vec();
        let mut gens = Vec::new();
        match kind {
            SubgroupKind::Elementary | SubgroupKind::UpperUnipotent | SubgroupKind::LowerUnipotent => {
                for a in 0..n {
                    let keep = match kind {
                        SubgroupKind::UpperUnipotent => rs.is_positive(a),
                        SubgroupKind::LowerUnipotent => !rs.is_positive(a),
                        _ => true,
                    };
                    if !keep {
                        continue;
                    }
                    for t in &carrier {
                        if !self.ring.is_zero(t) {
                            gens.push(self.x(a, t));
                        }
                    }
                }
            }
            SubgroupKind::Torus => {
                for a in 0..n {
                    for u in &units {
                        gens.push(self.h(a, u)?);
                    }
                }
            }
            SubgroupKind::WeylLift => {
                for a in 0..n {
                    for u in &units {
                        gens.push(self.w(a, u)?);
                    }
                }
            }
        }
        Ok(gens)
    }

    /// Breadth-first closure of a generator family, up to `budget` elements.
    pub fn closure(&self, kind: SubgroupKind, budget: usize) -> Result<ClosureOutcome> {
        let gens = self.subgroup_generators(kind)?;
        self.closure_of(&gens.iter().map(|g| g.mat.clone()).collect::<Vec<_>>(), budget)
    }

    /// Closure of explicit generator matrices.
    pub fn closure_of(&self, gens: &[Mat], budget: usize) -> Result<ClosureOutcome> {
        let fr = FastRing::new(&self.ring)?;
        let fgens: Vec<FMat> = gens.iter().map(|g| FMat::from_mat(&fr, g)).collect();
        let id = FMat::identity(&fr, self.rep.dim());
        let mut seen: HashSet<FMat> = HashSet::new();
        let mut order: Vec<FMat> = Vec::new();
        let mut queue: VecDeque<FMat> = VecDeque::new();
        seen.insert(id.clone());
        order.push(id.clone());
        queue.push_back(id);
        while let Some(m) = queue.pop_front() {
            for g in &fgens {
                let next = m.mul(g, &fr);
                if seen.insert(next.clone()) {
                    if order.len() >= budget {
                        return Ok(ClosureOutcome::BudgetExceeded { explored: order.len() + 1 });
                    }
                    order.push(next.clone());
                    queue.push_back(next);
                }
            }
        }
        Ok(ClosureOutcome::Complete(order.iter().map(|m| m.to_mat(&fr)).collect()))
    }

    /// Decide membership of a matrix in the full group T * E: scan torus
    /// elements h(chi) and test h(chi)^{-1} m against the elementary closure.
    pub fn membership(&self, m: &Mat, budget: usize) -> Result<Membership> {
        let closure = match self.closure(SubgroupKind::Elementary, budget)? {
            ClosureOutcome::Complete(els) => els,
            ClosureOutcome::BudgetExceeded { explored } => {
                return Ok(Membership::Undecided(format!(
                    "elementary closure exceeded budget at {explored} elements"
                )))
            }
        };
        let units = self.ring.units().to_vec();
        let basis_len = self.rep.lattice().basis().len();
        let mut assignment = vec![0usize; basis_len];
        loop {
            let values: Vec<Elem> =
                assignment.iter().map(|&i| units[i].clone()).collect();
            let chi = TorusCharacter { values };
            let h = self.torus_element(&chi)?;
            if let Ok(hinv) = h.inverse() {
                let candidate = hinv.mul(m);
                if closure.contains(&candidate) {
                    return Ok(Membership::Member);
                }
            }
            let mut k = 0;
            loop {
                if k == basis_len {
                    return Ok(Membership::NonMember);
                }
                assignment[k] += 1;
                if assignment[k] < units.len() {
                    break;
                }
                assignment[k] = 0;
                k += 1;
            }
        }
    }
}

/// Integer constants of the commutator expansion [x_alpha(t), x_beta(u)] =
/// prod x_{i a + j b}(c_ij t^i u^j), extracted once by symbolic peeling over
/// Z[t][u]. The product ranges over the roots in the strictly positive span
/// of the pair, in root order; peeling in ascending height is well defined
/// because any later multiset of roots overshoots the height of the root
/// being peeled.
pub fn commutator_constants(
    rep: &Representation,
    alpha: usize,
    beta: usize,
) -> Result<Vec<CommutatorTerm>> {
    let rs = rep.basis().rootsys().clone();
    if beta == rs.neg(alpha) {
        return Err(Error::Group("commutator formula needs alpha + beta != 0".into()));
    }
    if beta == alpha {
        return Ok(vec![]);
    }
    // Roots i*alpha + j*beta with i, j >= 1, by Cramer on the Gram matrix.
    let aa = rs.inner(alpha, alpha) as i128;
    let ab = rs.inner(alpha, beta) as i128;
    let bb = rs.inner(beta, beta) as i128;
    let det = aa * bb - ab * ab;
    let mut span: Vec<(usize, i64, i64)> = Vec::new();
    if det != 0 {
        for g in 0..rs.num_roots() {
            let ga = rs.inner(g, alpha) as i128;
            let gb = rs.inner(g, beta) as i128;
            let inum = ga * bb - gb * ab;
            let jnum = gb * aa - ga * ab;
            if inum % det != 0 || jnum % det != 0 {
                continue;
            }
            let (i, j) = (inum / det, jnum / det);
            if i >= 1 && j >= 1 {
                // Confirm exactly, coordinates being the ground truth.
                let ok = (0..rs.root(g).len()).all(|k| {
                    rs.root(g)[k] as i128
                        == i * rs.root(alpha)[k] as i128 + j * rs.root(beta)[k] as i128
                });
                if ok {
                    span.push((g, i as i64, j as i64));
                }
            }
        }
    }
    span.sort_by_key(|&(g, _, _)| g);

    let zt = Ring::poly_ring(Ring::integers(), "t");
    let p = Ring::poly_ring(zt.clone(), "u");
    let t_elem = p.add(&Elem::Poly(vec![zt.monomial(1)]), &p.zero());
    let u_elem = p.monomial(1);

    let xa = rep.unipotent(&p, alpha, &t_elem);
    let xb = rep.unipotent(&p, beta, &u_elem);
    let xa_inv = rep.unipotent(&p, alpha, &p.neg(&t_elem));
    let xb_inv = rep.unipotent(&p, beta, &p.neg(&u_elem));
    let mut res = xa.mul(&xb).mul(&xa_inv).mul(&xb_inv);

    let mut terms = Vec::new();
    for &(g, i, j) in &span {
        let (r, c, d) = rep
            .root_matrix(g)
            .entries()
            .next()
            .ok_or_else(|| Error::Group("zero root matrix".into()))?;
        let entry = res.get(r, c);
        let v = coeff_tu(entry, i as usize, j as usize);
        if v % (d as i128) != 0 {
            return Err(Error::Group(format!(
                "commutator coefficient {v} not divisible by matrix entry {d}"
            )));
        }
        let cij = (v / d as i128) as i64;
        terms.push(CommutatorTerm { root: g, i, j, coefficient: cij });
        // Strip the factor just identified.
        let param = p.mul(
            &p.int(-(cij as i128)),
            &p.mul(&p.pow(&t_elem, i as u64), &p.pow(&u_elem, j as u64)),
        );
        res = rep.unipotent(&p, g, &param).mul(&res);
    }
    if !res.is_identity() {
        return Err(Error::Group(
            "commutator did not reduce to the identity after peeling".into(),
        ));
    }
    Ok(terms)
}

/// Coefficient of t^i u^j in an element of Z[t][u].
fn coeff_tu(e: &Elem, i: usize, j: usize) -> i128 {
    let in_t = match e {
        Elem::Poly(us) => match us.get(j) {
            Some(c) => c.clone(),
            None => return 0,
        },
        other => {
            if j == 0 {
                other.clone()
            } else {
                return 0;
            }
        }
    };
    match in_t {
        Elem::Poly(ts) => match ts.get(i) {
            Some(Elem::Int(v)) => *v,
            Some(_) => panic!("unexpected nesting in Z[t][u]"),
            None => 0,
        },
        Elem::Int(v) => {
            if i == 0 {
                v
            } else {
                0
            }
        }
        _ => panic!("unexpected element shape in Z[t][u]"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chevbasis::ChevalleyBasis;
    use crate::rootsys::RootSystem;

    fn group(name: &str, rep_name: &str, modulus: u64) -> ChevalleyGroup {
        let rs = Arc::new(RootSystem::parse_name(name).unwrap());
        let cb = Arc::new(ChevalleyBasis::new(rs).unwrap());
        let rep = Arc::new(Representation::by_name(&cb, rep_name).unwrap());
        ChevalleyGroup::new(rep, Ring::zn(modulus).unwrap()).unwrap()
    }

    #[test]
    fn unipotent_generators_invert_cleanly() {
        let g = group("A2", "standard", 9);
        let x = g.x(0, &Elem::Int(4));
        let xi = g.inv(&x);
        assert!(x.mat.mul(&xi.mat).is_identity());
    }

    #[test]
    fn weyl_lift_and_diagonal_shapes() {
        let g = group("A2", "standard", 5);
        let rs = g.rep().basis().rootsys().clone();
        let a = rs.index_of(&[1, -1, 0]).unwrap();
        let w = g.w(a, &Elem::Int(1)).unwrap();
        // Monomial matrix: permutes the first two basis lines with a sign.
        assert_eq!(*w.mat.get(0, 1), Elem::Int(1));
        assert_eq!(*w.mat.get(1, 0), Elem::Int(4));
        assert_eq!(*w.mat.get(2, 2), Elem::Int(1));
        let h = g.h(a, &Elem::Int(2)).unwrap();
        assert_eq!(*h.mat.get(0, 0), Elem::Int(2));
        assert_eq!(*h.mat.get(1, 1), g.ring().inv(&Elem::Int(2)).unwrap());
        assert_eq!(*h.mat.get(2, 2), Elem::Int(1));
    }

    #[test]
    fn relations_hold_exhaustively_for_small_cases() {
        for (sys, rep, n) in [("A2", "standard", 5), ("B2", "adjoint", 3)] {
            let g = group(sys, rep, n);
            let report = g.verify_relations(SamplePolicy::Exhaustive).unwrap();
            assert!(report.all_pass(), "{sys} {rep} Z/{n}: {:?}", report.checks);
        }
    }

    #[test]
    fn relations_hold_seeded_over_a_non_domain() {
        let g = group("A2", "standard", 6);
        let report = g.verify_relations(SamplePolicy::Seeded { seed: 7, cases: 6 }).unwrap();
        assert!(report.all_pass());
    }

    #[test]
    fn commutator_constants_of_the_rank_two_symplectic_pair() {
        let rs = Arc::new(RootSystem::parse_name("B2").unwrap());
        let cb = Arc::new(ChevalleyBasis::new(rs.clone()).unwrap());
        let rep = Arc::new(Representation::adjoint(&cb).unwrap());
        let long_simple = rs.index_of(&[1, -1]).unwrap();
        let short_simple = rs.index_of(&[0, 1]).unwrap();
        let terms = commutator_constants(&rep, long_simple, short_simple).unwrap();
        // Terms at alpha+beta and alpha+2beta with coefficients of size 1.
        assert_eq!(terms.len(), 2);
        assert_eq!(terms[0].root, rs.index_of(&[1, 0]).unwrap());
        assert_eq!((terms[0].i, terms[0].j), (1, 1));
        assert_eq!(terms[0].coefficient.abs(), 1);
        assert_eq!(terms[1].root, rs.index_of(&[1, 1]).unwrap());
        assert_eq!((terms[1].i, terms[1].j), (1, 2));
        assert_eq!(terms[1].coefficient.abs(), 1);
        // The doubled coefficient shows up for the pair (alpha+beta, beta).
        let sum = rs.index_of(&[1, 0]).unwrap();
        let terms2 = commutator_constants(&rep, sum, short_simple).unwrap();
        assert_eq!(terms2.len(), 1);
        assert_eq!(terms2[0].root, rs.index_of(&[1, 1]).unwrap());
        assert_eq!(terms2[0].coefficient.abs(), 2);
    }

    #[test]
    fn diagonal_action_matches_characters() {
        let g = group("A2", "standard", 5);
        let report = g.verify_diagonal_action(11, 40).unwrap();
        assert!(report.all_pass(), "{:?}", report.checks);
    }

    #[test]
    fn centers_of_small_elementary_groups() {
        // Full weight lattice over Z/5: the cube-root condition only has the
        // trivial solution.
        let g = group("A2", "standard", 5);
        let z = g.center_of_elementary().unwrap();
        assert_eq!(z.len(), 1);
        assert!(z[0].is_identity());
        // Adjoint lattice: always trivial center.
        let ga = group("B2", "adjoint", 5);
        assert_eq!(ga.center_of_elementary().unwrap().len(), 1);
    }

    #[test]
    fn center_over_a_field_with_cube_roots() {
        let rs = Arc::new(RootSystem::parse_name("A2").unwrap());
        let cb = Arc::new(ChevalleyBasis::new(rs).unwrap());
        let rep = Arc::new(Representation::standard(&cb).unwrap());
        let gf4 = Ring::galois_field(4).unwrap();
        let g = ChevalleyGroup::new(rep, gf4.clone()).unwrap();
        let z = g.center_of_elementary().unwrap();
        assert_eq!(z.len(), 3);
        // All elements are scalar with unit cubes.
        for m in &z {
            let lam = m.get(0, 0).clone();
            assert!(gf4.is_one(&gf4.pow(&lam, 3)));
            for i in 0..3 {
                assert_eq!(*m.get(i, i), lam);
            }
        }
    }

    #[test]
    fn upper_unipotent_closure_is_the_heisenberg_group() {
        let g = group("A2", "standard", 2);
        match g.closure(SubgroupKind::UpperUnipotent, 100).unwrap() {
            ClosureOutcome::Complete(els) => assert_eq!(els.len(), 8),
            ClosureOutcome::BudgetExceeded { .. } => panic!("budget"),
        }
    }

    #[test]
    fn elementary_closure_over_the_binary_field() {
        let g = group("A2", "standard", 2);
        match g.closure(SubgroupKind::Elementary, 1000).unwrap() {
            ClosureOutcome::Complete(els) => assert_eq!(els.len(), 168),
            ClosureOutcome::BudgetExceeded { .. } => panic!("budget"),
        }
    }

    #[test]
    fn closure_reports_budget_exhaustion() {
        let g = group("A2", "standard", 5);
        match g.closure(SubgroupKind::Elementary, 300).unwrap() {
            ClosureOutcome::Complete(_) => panic!("SL3(Z/5) should not fit in 300"),
            ClosureOutcome::BudgetExceeded { explored } => assert!(explored > 300),
        }
    }

    #[test]
    fn membership_accepts_torus_times_elementary() {
        let g = group("A2", "standard", 2);
        let m = g.x(0, &Elem::Int(1)).mat.clone();
        assert_eq!(g.membership(&m, 1000).unwrap(), Membership::Member);
        // A non-invertible matrix is not a member.
        let zero = Mat::zero(g.ring(), 3);
        assert_eq!(g.membership(&zero, 1000).unwrap(), Membership::NonMember);
        // Budget too small: undecided.
        let g5 = group("A2", "standard", 5);
        let m5 = g5.x(0, &Elem::Int(2)).mat.clone();
        assert!(matches!(g5.membership(&m5, 50).unwrap(), Membership::Undecided(_)));
    }
}
