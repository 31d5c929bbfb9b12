//! Commutative rings with identity, built at runtime.
//!
//! Supported constructions: Z, Z/n, finite products, polynomial quotients
//! R[y]/(f) with monic f (Galois fields and k-th root extensions are special
//! cases), free polynomial rings for symbolic work, and fraction rings with
//! respect to a multiplicatively closed set (localization at a maximal ideal
//! being the case used most).
//!
//! Every element is kept in a canonical form, so structural equality and
//! hashing agree with ring equality. Fraction rings canonicalize through a
//! table built from the defining equivalence: a/s ~ b/t iff (at - bs)u = 0
//! for some u in the multiplicative set.

mod parse;
mod solve;
mod table;

pub use parse::parse_ring;
pub use solve::{solve_linear, RingLinSolution};
pub use table::FastRing;

use crate::linalg::{ext_gcd, gcd_u};
use crate::{Error, Result};
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::{Arc, OnceLock};

/// Hard cap for exhaustive ring-level work (carrier enumeration, ideal
/// lattices, canonical fraction tables). Constructions needing more are
/// rejected with a budget error instead of silently degrading.
pub const DEFAULT_SIZE_BUDGET: u64 = 10_000;

/// A ring element in canonical form. Which variant is legal depends on the
/// ring: residues and integers use `Int`, product rings use `Tuple`,
/// polynomial (quotient) rings use `Poly` with coefficients listed from the
/// constant term up and trailing zeros trimmed, fraction rings use `Frac`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Elem {
    Int(i128),
    Tuple(Vec<Elem>),
    Poly(Vec<Elem>),
    Frac(Box<Elem>, Box<Elem>),
}

/// Multiplicatively closed subset of a ring.
#[derive(Clone, Debug)]
pub enum MultSet {
    /// Explicit finite set; must contain 1 and be closed under products.
    Elems(Vec<Elem>),
    /// Powers of a fixed element (used over Z, where enumeration is out).
    Powers(Elem),
}

/// Ideal of a finite ring: generator witnesses plus the full element set,
/// sorted for canonical comparison.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Ideal {
    pub gens: Vec<Elem>,
    pub elems: Vec<Elem>,
}

impl Ideal {
    pub fn contains(&self, e: &Elem) -> bool {
        self.elems.binary_search(e).is_ok()
    }

    pub fn len(&self) -> usize {
        self.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elems.is_empty()
    }
}

#[derive(Debug)]
enum RingKind {
    /// The integers.
    Int,
    /// Z/n, n >= 2.
    Zn { n: u64 },
    /// Direct product of rings.
    Product { factors: Vec<Ring> },
    /// base[var]/(modulus), modulus monic of degree >= 1.
    PolyQuot { base: Ring, modulus: Vec<Elem>, var: String },
    /// Free polynomial ring base[var].
    Poly { base: Ring, var: String },
    /// Fractions of `base` with denominators in `set`. When the set is the
    /// complement of a maximal ideal, that ideal is recorded.
    Fractions { base: Ring, set: MultSet, local_at: Option<Ideal> },
}

#[derive(Debug)]
struct RingInner {
    kind: RingKind,
    carrier: OnceLock<Option<Vec<Elem>>>,
    units: OnceLock<Vec<Elem>>,
    /// Canonical representative per (numerator, denominator) pair, for
    /// fraction rings over finite bases.
    frac_canon: OnceLock<HashMap<(Elem, Elem), Elem>>,
}

/// A commutative ring with identity. Cheap to clone; all state is shared.
#[derive(Clone, Debug)]
pub struct Ring(Arc<RingInner>);

impl PartialEq for Ring {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.spec_string() == other.spec_string()
    }
}
impl Eq for Ring {}

impl std::fmt::Display for Ring {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.spec_string())
    }
}

fn new_ring(kind: RingKind) -> Ring {
    Ring(Arc::new(RingInner {
        kind,
        carrier: OnceLock::new(),
        units: OnceLock::new(),
        frac_canon: OnceLock::new(),
    }))
}

impl Ring {
    // -- constructors -------------------------------------------------------

    /// The ring of integers.
    pub fn integers() -> Ring {
        new_ring(RingKind::Int)
    }

    /// Z/n. The zero ring (n < 2) is rejected.
    pub fn zn(n: u64) -> Result<Ring> {
        if n < 2 {
            return Err(Error::Ring(format!("Z/{n} is not a ring with 1 != 0")));
        }
        Ok(new_ring(RingKind::Zn { n }))
    }

    /// Direct product of the given rings.
    pub fn product(factors: Vec<Ring>) -> Result<Ring> {
        if factors.is_empty() {
            return Err(Error::Ring("empty product is the zero ring".into()));
        }
        if factors.len() == 1 {
            return Ok(factors.into_iter().next().expect("one factor"));
        }
        Ok(new_ring(RingKind::Product { factors }))
    }

    /// base[var]/(modulus). The modulus is given from the constant
    /// coefficient up and must be monic of degree >= 1.
    pub fn poly_quot(base: Ring, modulus: Vec<Elem>, var: &str) -> Result<Ring> {
        let modulus: Vec<Elem> = modulus.into_iter().map(|c| base.normalize(c)).collect();
        let deg = modulus.len().checked_sub(1).unwrap_or(0);
        if deg < 1 {
            return Err(Error::Ring("quotient modulus must have degree at least 1".into()));
        }
        if !base.is_one(&modulus[deg]) {
            return Err(Error::Ring("quotient modulus must be monic".into()));
        }
        Ok(new_ring(RingKind::PolyQuot { base, modulus, var: var.to_string() }))
    }

    /// R[y]/(y^k - lambda) for an invertible lambda: adjoins a k-th root.
    pub fn quotient_extension(base: Ring, k: usize, lambda: Elem) -> Result<Ring> {
        if k == 0 {
            return Err(Error::Ring("cannot adjoin a 0-th root".into()));
        }
        let lambda = base.normalize(lambda);
        if !base.is_invertible(&lambda) {
            return Err(Error::Ring(format!(
                "k-th root extensions require an invertible element, got {}",
                base.fmt_elem(&lambda)
            )));
        }
        let mut modulus = vec![base.neg(&lambda)];
        modulus.extend(std::iter::repeat_n(base.zero(), k - 1));
        modulus.push(base.one());
        Self::poly_quot(base, modulus, "y")
    }

    /// The field with q = p^k elements, as Z/p for k = 1 and otherwise as a
    /// polynomial quotient by the lexicographically first monic irreducible.
    pub fn galois_field(q: u64) -> Result<Ring> {
        let (p, k) = prime_power(q)
            .ok_or_else(|| Error::Ring(format!("GF({q}): not a prime power")))?;
        let base = Ring::zn(p)?;
        if k == 1 {
            return Ok(base);
        }
        let f = first_irreducible(p, k)
            .ok_or_else(|| Error::Ring(format!("GF({q}): no irreducible modulus found")))?;
        let modulus: Vec<Elem> = f.into_iter().map(|c| base.int(c as i128)).collect();
        Self::poly_quot(base, modulus, "y")
    }

    /// Free polynomial ring base[var], for symbolic expansion.
    pub fn poly_ring(base: Ring, var: &str) -> Ring {
        new_ring(RingKind::Poly { base, var: var.to_string() })
    }

    /// Ring of fractions with denominators in `set`. The set must contain 1,
    /// be multiplicatively closed, and avoid 0 (else the result is the zero
    /// ring).
    pub fn fractions(base: Ring, set: MultSet) -> Result<Ring> {
        let set = normalize_mult_set(&base, set)?;
        Ok(new_ring(RingKind::Fractions { base, set, local_at: None }))
    }

    /// Localization at a maximal ideal: fractions with denominators outside
    /// the ideal. Primality of the ideal is what makes the complement
    /// multiplicatively closed, and it is verified.
    pub fn localize_at(base: Ring, ideal: &Ideal) -> Result<Ring> {
        let carrier = base
            .carrier()
            .ok_or_else(|| Error::Ring("localization needs an enumerable ring".into()))?;
        if ideal.elems.iter().any(|e| base.is_one(e)) {
            return Err(Error::Ring("cannot localize at the unit ideal".into()));
        }
        let complement: Vec<Elem> =
            carrier.iter().filter(|e| !ideal.contains(e)).cloned().collect();
        // Multiplicative closure of the complement is exactly primality.
        for a in &complement {
            for b in &complement {
                if ideal.contains(&base.mul(a, b)) {
                    return Err(Error::Ring(format!(
                        "ideal is not prime: {} * {} falls inside it",
                        base.fmt_elem(a),
                        base.fmt_elem(b)
                    )));
                }
            }
        }
        let set = normalize_mult_set(&base, MultSet::Elems(complement))?;
        Ok(new_ring(RingKind::Fractions { base, set, local_at: Some(ideal.clone()) }))
    }

    // -- basic structure ----------------------------------------------------

    fn kind(&self) -> &RingKind {
        &self.0.kind
    }

    /// The modulus when this is a residue ring Z/n.
    pub fn residue_modulus(&self) -> Option<u64> {
        match self.kind() {
            RingKind::Zn { n } => Some(*n),
            _ => None,
        }
    }

    /// Canonical text form; doubles as structural identity.
    pub fn spec_string(&self) -> String {
        match self.kind() {
            RingKind::Int => "Z".into(),
            RingKind::Zn { n } => format!("Z/{n}"),
            RingKind::Product { factors } => factors
                .iter()
                .map(|f| f.spec_string())
                .collect::<Vec<_>>()
                .join(" x "),
            RingKind::PolyQuot { base, modulus, var } => {
                format!("{}[{}]/({})", base.spec_string(), var, fmt_poly(base, modulus, var))
            }
            RingKind::Poly { base, var } => format!("{}[{}]", base.spec_string(), var),
            RingKind::Fractions { base, set, local_at } => match local_at {
                Some(ideal) => format!(
                    "loc({}, ({}))",
                    base.spec_string(),
                    ideal.gens.iter().map(|g| base.fmt_elem(g)).collect::<Vec<_>>().join(", ")
                ),
                None => match set {
                    MultSet::Powers(b) => {
                        format!("frac({}, powers of {})", base.spec_string(), base.fmt_elem(b))
                    }
                    MultSet::Elems(es) => format!(
                        "frac({}, {{{}}})",
                        base.spec_string(),
                        es.iter().map(|e| base.fmt_elem(e)).collect::<Vec<_>>().join(", ")
                    ),
                },
            },
        }
    }

    pub fn zero(&self) -> Elem {
        match self.kind() {
            RingKind::Int | RingKind::Zn { .. } => Elem::Int(0),
            RingKind::Product { factors } => {
                Elem::Tuple(factors.iter().map(|f| f.zero()).collect())
            }
            RingKind::PolyQuot { .. } | RingKind::Poly { .. } => Elem::Poly(vec![]),
            RingKind::Fractions { base, .. } => {
                self.normalize(Elem::Frac(Box::new(base.zero()), Box::new(base.one())))
            }
        }
    }

    pub fn one(&self) -> Elem {
        match self.kind() {
            RingKind::Int | RingKind::Zn { .. } => Elem::Int(1),
            RingKind::Product { factors } => Elem::Tuple(factors.iter().map(|f| f.one()).collect()),
            RingKind::PolyQuot { base, .. } | RingKind::Poly { base, .. } => {
                Elem::Poly(vec![base.one()])
            }
            RingKind::Fractions { base, .. } => {
                self.normalize(Elem::Frac(Box::new(base.one()), Box::new(base.one())))
            }
        }
    }

    /// Image of an integer under the unique map from Z.
    pub fn int(&self, v: i128) -> Elem {
        match self.kind() {
            RingKind::Int => Elem::Int(v),
            RingKind::Zn { n } => Elem::Int(v.rem_euclid(*n as i128)),
            RingKind::Product { factors } => {
                Elem::Tuple(factors.iter().map(|f| f.int(v)).collect())
            }
            RingKind::PolyQuot { base, .. } | RingKind::Poly { base, .. } => {
                let c = base.int(v);
                if base.is_zero(&c) {
                    Elem::Poly(vec![])
                } else {
                    Elem::Poly(vec![c])
                }
            }
            RingKind::Fractions { base, .. } => {
                self.normalize(Elem::Frac(Box::new(base.int(v)), Box::new(base.one())))
            }
        }
    }

    pub fn is_zero(&self, e: &Elem) -> bool {
        *e == self.zero()
    }

    pub fn is_one(&self, e: &Elem) -> bool {
        *e == self.one()
    }

    pub fn eq_elem(&self, a: &Elem, b: &Elem) -> bool {
        a == b
    }

    /// Bring an element into canonical form. Ops preserve canonicity, so this
    /// is mostly needed at construction boundaries.
    pub fn normalize(&self, e: Elem) -> Elem {
        match (self.kind(), e) {
            (RingKind::Int, Elem::Int(v)) => Elem::Int(v),
            (RingKind::Zn { n }, Elem::Int(v)) => Elem::Int(v.rem_euclid(*n as i128)),
            (RingKind::Product { factors }, Elem::Tuple(cs)) => {
                assert_eq!(cs.len(), factors.len(), "tuple arity mismatch");
                Elem::Tuple(factors.iter().zip(cs).map(|(f, c)| f.normalize(c)).collect())
            }
            (RingKind::Product { .. } | RingKind::PolyQuot { .. } | RingKind::Poly { .. }, Elem::Int(v)) => {
                self.int(v)
            }
            (RingKind::PolyQuot { base, modulus, .. }, Elem::Poly(cs)) => {
                let cs: Vec<Elem> = cs.into_iter().map(|c| base.normalize(c)).collect();
                let cs = poly_rem(base, cs, modulus);
                Elem::Poly(trim_poly(base, cs))
            }
            (RingKind::Poly { base, .. }, Elem::Poly(cs)) => {
                let cs: Vec<Elem> = cs.into_iter().map(|c| base.normalize(c)).collect();
                Elem::Poly(trim_poly(base, cs))
            }
            (RingKind::Fractions { base, set, .. }, Elem::Frac(a, s)) => {
                let a = base.normalize(*a);
                let s = base.normalize(*s);
                self.canon_frac(base, set, a, s)
            }
            (RingKind::Fractions { base, .. }, Elem::Int(v)) => {
                let a = base.int(v);
                let kind = self.kind();
                let RingKind::Fractions { set, .. } = kind else { unreachable!() };
                self.canon_frac(base, set, a, base.one())
            }
            (_, e) => panic!("element {:?} has the wrong shape for ring {}", e, self.spec_string()),
        }
    }

    pub fn add(&self, a: &Elem, b: &Elem) -> Elem {
        match (self.kind(), a, b) {
            (RingKind::Int, Elem::Int(x), Elem::Int(y)) => {
                Elem::Int(x.checked_add(*y).expect("integer overflow"))
            }
            (RingKind::Zn { n }, Elem::Int(x), Elem::Int(y)) => {
                Elem::Int((x + y).rem_euclid(*n as i128))
            }
            (RingKind::Product { factors }, Elem::Tuple(xs), Elem::Tuple(ys)) => Elem::Tuple(
                factors.iter().zip(xs.iter().zip(ys)).map(|(f, (x, y))| f.add(x, y)).collect(),
            ),
            (RingKind::PolyQuot { base, .. } | RingKind::Poly { base, .. }, Elem::Poly(xs), Elem::Poly(ys)) => {
                let m = xs.len().max(ys.len());
                let mut out = Vec::with_capacity(m);
                for i in 0..m {
                    let x = xs.get(i).cloned().unwrap_or_else(|| base.zero());
                    let y = ys.get(i).cloned().unwrap_or_else(|| base.zero());
                    out.push(base.add(&x, &y));
                }
                Elem::Poly(trim_poly(base, out))
            }
            (RingKind::Fractions { base, set, .. }, Elem::Frac(a1, s1), Elem::Frac(a2, s2)) => {
                let num = base.add(&base.mul(a1, s2), &base.mul(a2, s1));
                let den = base.mul(s1, s2);
                self.canon_frac(base, set, num, den)
            }
            _ => panic!("mismatched element shapes in add for {}", self.spec_string()),
        }
    }

    pub fn neg(&self, a: &Elem) -> Elem {
        match (self.kind(), a) {
            (RingKind::Int, Elem::Int(x)) => Elem::Int(-x),
            (RingKind::Zn { n }, Elem::Int(x)) => Elem::Int((-x).rem_euclid(*n as i128)),
            (RingKind::Product { factors }, Elem::Tuple(xs)) => {
                Elem::Tuple(factors.iter().zip(xs).map(|(f, x)| f.neg(x)).collect())
            }
            (RingKind::PolyQuot { base, .. } | RingKind::Poly { base, .. }, Elem::Poly(xs)) => {
                Elem::Poly(xs.iter().map(|x| base.neg(x)).collect())
            }
            (RingKind::Fractions { base, set, .. }, Elem::Frac(a, s)) => {
                self.canon_frac(base, set, base.neg(a), (**s).clone())
            }
            _ => panic!("mismatched element shape in neg for {}", self.spec_string()),
        }
    }

    pub fn sub(&self, a: &Elem, b: &Elem) -> Elem {
        self.add(a, &self.neg(b))
    }

    pub fn mul(&self, a: &Elem, b: &Elem) -> Elem {
        match (self.kind(), a, b) {
            (RingKind::Int, Elem::Int(x), Elem::Int(y)) => {
                Elem::Int(x.checked_mul(*y).expect("integer overflow"))
            }
            (RingKind::Zn { n }, Elem::Int(x), Elem::Int(y)) => {
                Elem::Int((x * y).rem_euclid(*n as i128))
            }
            (RingKind::Product { factors }, Elem::Tuple(xs), Elem::Tuple(ys)) => Elem::Tuple(
                factors.iter().zip(xs.iter().zip(ys)).map(|(f, (x, y))| f.mul(x, y)).collect(),
            ),
            (RingKind::PolyQuot { base, modulus, .. }, Elem::Poly(xs), Elem::Poly(ys)) => {
                let prod = poly_mul(base, xs, ys);
                Elem::Poly(trim_poly(base, poly_rem(base, prod, modulus)))
            }
            (RingKind::Poly { base, .. }, Elem::Poly(xs), Elem::Poly(ys)) => {
                Elem::Poly(trim_poly(base, poly_mul(base, xs, ys)))
            }
            (RingKind::Fractions { base, set, .. }, Elem::Frac(a1, s1), Elem::Frac(a2, s2)) => {
                self.canon_frac(base, set, base.mul(a1, a2), base.mul(s1, s2))
            }
            _ => panic!("mismatched element shapes in mul for {}", self.spec_string()),
        }
    }

    pub fn pow(&self, a: &Elem, mut k: u64) -> Elem {
        let mut acc = self.one();
        let mut base = a.clone();
        while k > 0 {
            if k & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            k >>= 1;
        }
        acc
    }

    pub fn is_invertible(&self, a: &Elem) -> bool {
        self.inv(a).is_some()
    }

    pub fn inv(&self, a: &Elem) -> Option<Elem> {
        match (self.kind(), a) {
            (RingKind::Int, Elem::Int(x)) => {
                if *x == 1 || *x == -1 {
                    Some(Elem::Int(*x))
                } else {
                    None
                }
            }
            (RingKind::Zn { n }, Elem::Int(x)) => {
                let (g, p, _) = ext_gcd(*x, *n as i128);
                if g == 1 {
                    Some(Elem::Int(p.rem_euclid(*n as i128)))
                } else {
                    None
                }
            }
            (RingKind::Product { factors }, Elem::Tuple(xs)) => {
                let mut out = Vec::with_capacity(xs.len());
                for (f, x) in factors.iter().zip(xs) {
                    out.push(f.inv(x)?);
                }
                Some(Elem::Tuple(out))
            }
            (RingKind::PolyQuot { base, modulus, .. }, Elem::Poly(_)) => {
                // Solve a * x = 1 coefficientwise over the base ring.
                let deg = modulus.len() - 1;
                let cols: Vec<Vec<Elem>> = (0..deg)
                    .map(|t| {
                        let yt = self.monomial(t);
                        match self.mul(a, &yt) {
                            Elem::Poly(cs) => {
                                let mut v = cs;
                                v.resize(deg, base.zero());
                                v
                            }
                            _ => unreachable!(),
                        }
                    })
                    .collect();
                let rows: Vec<Vec<Elem>> =
                    (0..deg).map(|s| (0..deg).map(|t| cols[t][s].clone()).collect()).collect();
                let mut rhs = vec![base.zero(); deg];
                rhs[0] = base.one();
                let sol = solve::solve_linear(base, &rows, &rhs, deg).ok()??;
                Some(self.normalize(Elem::Poly(sol.particular)))
            }
            (RingKind::Poly { base, .. }, Elem::Poly(cs)) => {
                // A polynomial is a unit iff its constant term is and every
                // higher coefficient is nilpotent; inverses of genuinely
                // nilpotent-augmented units are not needed here.
                if cs.len() == 1 {
                    base.inv(&cs[0]).map(|c| Elem::Poly(vec![c]))
                } else if cs.is_empty() {
                    None
                } else {
                    let unit_const = base.is_invertible(&cs[0]);
                    let nil_tail = cs[1..].iter().all(|c| base.is_nilpotent(c));
                    if unit_const && nil_tail {
                        // Invert by geometric series: a = c(1 - m) with m nilpotent.
                        let c_inv = base.inv(&cs[0]).expect("constant term is a unit");
                        let c_inv_p = Elem::Poly(vec![c_inv]);
                        let m = self.sub(&self.one(), &self.mul(a, &c_inv_p));
                        let mut series = self.one();
                        let mut mp = m.clone();
                        while !self.is_zero(&mp) {
                            series = self.add(&series, &mp);
                            mp = self.mul(&mp, &m);
                        }
                        Some(self.mul(&c_inv_p, &series))
                    } else {
                        None
                    }
                }
            }
            (RingKind::Fractions { base, .. }, Elem::Frac(a1, _)) => {
                if self.is_zero(a) {
                    return None;
                }
                // Finite fraction rings: scan the carrier for the inverse.
                if self.carrier().is_some() {
                    let target = self.one();
                    for c in self.carrier().expect("finite carrier") {
                        if self.mul(a, c) == target {
                            return Some(c.clone());
                        }
                    }
                    None
                } else {
                    // Over a domain, a/s is invertible iff a lies in the set
                    // up to sign-free association; only the s/a flip is used.
                    let RingKind::Fractions { set, .. } = self.kind() else { unreachable!() };
                    let a_in = mult_set_contains(base, set, a1);
                    if a_in {
                        let Elem::Frac(num, den) = a else { unreachable!() };
                        Some(self.normalize(Elem::Frac(den.clone(), num.clone())))
                    } else {
                        None
                    }
                }
            }
            _ => panic!("mismatched element shape in inv for {}", self.spec_string()),
        }
    }

    pub fn is_nilpotent(&self, a: &Elem) -> bool {
        if self.is_zero(a) {
            return true;
        }
        let bound = match self.size() {
            Some(s) => (128 - s.leading_zeros()) as usize + 1,
            None => match self.kind() {
                RingKind::Int => return false,
                _ => 64,
            },
        };
        let mut x = a.clone();
        for _ in 0..bound {
            x = self.mul(&x, &x);
            if self.is_zero(&x) {
                return true;
            }
        }
        false
    }

    /// y^t in a polynomial or quotient ring.
    pub fn monomial(&self, t: usize) -> Elem {
        match self.kind() {
            RingKind::PolyQuot { base, .. } | RingKind::Poly { base, .. } => {
                let mut cs = vec![base.zero(); t];
                cs.push(base.one());
                self.normalize(Elem::Poly(cs))
            }
            _ => panic!("monomial only makes sense in polynomial rings"),
        }
    }

    // -- enumeration --------------------------------------------------------

    /// All elements, in a fixed deterministic order, when the ring is finite
    /// and within budget. `None` for infinite rings.
    pub fn carrier(&self) -> Option<&[Elem]> {
        self.0
            .carrier
            .get_or_init(|| self.compute_carrier())
            .as_deref()
    }

    fn compute_carrier(&self) -> Option<Vec<Elem>> {
        match self.kind() {
            RingKind::Int | RingKind::Poly { .. } => None,
            RingKind::Zn { n } => {
                if *n > DEFAULT_SIZE_BUDGET {
                    return None;
                }
                Some((0..*n as i128).map(Elem::Int).collect())
            }
            RingKind::Product { factors } => {
                let parts: Vec<&[Elem]> =
                    factors.iter().map(|f| f.carrier()).collect::<Option<Vec<_>>>()?;
                let total: u128 = parts.iter().map(|p| p.len() as u128).product();
                if total > DEFAULT_SIZE_BUDGET as u128 {
                    return None;
                }
                let mut out = vec![Elem::Tuple(vec![])];
                for p in parts {
                    let mut next = Vec::with_capacity(out.len() * p.len());
                    for prefix in &out {
                        let Elem::Tuple(pre) = prefix else { unreachable!() };
                        for e in p {
                            let mut v = pre.clone();
                            v.push(e.clone());
                            next.push(Elem::Tuple(v));
                        }
                    }
                    out = next;
                }
                Some(out)
            }
            RingKind::PolyQuot { base, modulus, .. } => {
                let bc = base.carrier()?;
                let deg = modulus.len() - 1;
                let total = (bc.len() as u128).checked_pow(deg as u32)?;
                if total > DEFAULT_SIZE_BUDGET as u128 {
                    return None;
                }
                let mut out: Vec<Vec<Elem>> = vec![vec![]];
                for _ in 0..deg {
                    let mut next = Vec::with_capacity(out.len() * bc.len());
                    for prefix in &out {
                        for c in bc {
                            let mut v = prefix.clone();
                            v.push(c.clone());
                            next.push(v);
                        }
                    }
                    out = next;
                }
                Some(out.into_iter().map(|cs| Elem::Poly(trim_poly(base, cs))).collect())
            }
            RingKind::Fractions { base, set, .. } => {
                let bc = base.carrier()?;
                let mut seen = BTreeSet::new();
                let mut out = Vec::new();
                for a in bc {
                    let c = self.canon_frac(base, set, a.clone(), base.one());
                    if seen.insert(c.clone()) {
                        out.push(c);
                    }
                }
                // Localization of a finite ring is onto from the base, so
                // numerator sweep covers the carrier; denominators add nothing.
                Some(out)
            }
        }
    }

    pub fn size(&self) -> Option<u128> {
        self.carrier().map(|c| c.len() as u128)
    }

    /// The unit group, enumerated (finite rings only).
    pub fn units(&self) -> &[Elem] {
        self.0.units.get_or_init(|| {
            let Some(carrier) = self.carrier() else {
                panic!("unit enumeration needs a finite ring, got {}", self.spec_string())
            };
            carrier.iter().filter(|e| self.is_invertible(e)).cloned().collect()
        })
    }

    // -- fractions ----------------------------------------------------------

    fn canon_frac(&self, base: &Ring, set: &MultSet, a: Elem, s: Elem) -> Elem {
        debug_assert!(
            mult_set_contains(base, set, &s),
            "denominator {} outside the multiplicative set",
            base.fmt_elem(&s)
        );
        if base.carrier().is_some() {
            let table = self.0.frac_canon.get_or_init(|| self.build_frac_table(base, set));
            let key = (a, s);
            table
                .get(&key)
                .cloned()
                .unwrap_or_else(|| panic!("fraction pair missing from canonical table"))
        } else {
            assert!(
                base.is_int_ring(),
                "fraction canonicalization needs Z or an enumerable base, got {}",
                base.spec_string()
            );
            // Over Z: make the denominator positive, then strip the largest
            // divisor of gcd(a, s) that keeps the denominator in the set.
            let (Elem::Int(mut av), Elem::Int(mut sv)) = (a, s) else {
                panic!("integer fractions expect integer parts")
            };
            assert!(sv != 0, "zero denominator");
            if sv < 0 {
                av = -av;
                sv = -sv;
            }
            let g = gcd_u(av.unsigned_abs() as u64, sv.unsigned_abs() as u64).max(1) as i128;
            let mut best = 1i128;
            for d in divisors_desc(g) {
                if mult_set_contains(base, set, &Elem::Int(sv / d)) {
                    best = d;
                    break;
                }
            }
            Elem::Frac(Box::new(Elem::Int(av / best)), Box::new(Elem::Int(sv / best)))
        }
    }

    fn build_frac_table(&self, base: &Ring, set: &MultSet) -> HashMap<(Elem, Elem), Elem> {
        let carrier = base.carrier().expect("finite base");
        let MultSet::Elems(dens) = set else {
            panic!("finite fraction rings store an explicit denominator set")
        };
        let mut table = HashMap::new();
        for a in carrier {
            for s in dens {
                // First base element b with a/s ~ b/1; sweep order fixes it.
                let mut canon = None;
                for b in carrier {
                    let diff = base.sub(a, &base.mul(b, s));
                    if dens.iter().any(|u| base.is_zero(&base.mul(&diff, u))) {
                        canon = Some(b.clone());
                        break;
                    }
                }
                let b = canon.expect("finite localization is onto from the base");
                table.insert(
                    (a.clone(), s.clone()),
                    Elem::Frac(Box::new(b), Box::new(base.one())),
                );
            }
        }
        table
    }

    /// a/s as an element of a fraction ring; errors when s is outside the
    /// multiplicative set.
    pub fn frac(&self, a: Elem, s: Elem) -> Result<Elem> {
        let RingKind::Fractions { base, set, .. } = self.kind() else {
            return Err(Error::Ring(format!("{} is not a fraction ring", self.spec_string())));
        };
        let a = base.normalize(a);
        let s = base.normalize(s);
        if !mult_set_contains(base, set, &s) {
            return Err(Error::Ring(format!(
                "denominator {} is outside the multiplicative set",
                base.fmt_elem(&s)
            )));
        }
        Ok(self.canon_frac(base, set, a, s))
    }

    /// The underlying a/s ~ b/t test of a fraction ring, exposed for direct
    /// checking against the canonical forms.
    pub fn frac_equivalent(&self, a: &Elem, s: &Elem, b: &Elem, t: &Elem) -> Result<bool> {
        let RingKind::Fractions { base, set, .. } = self.kind() else {
            return Err(Error::Ring(format!("{} is not a fraction ring", self.spec_string())));
        };
        let cross = base.sub(&base.mul(a, t), &base.mul(b, s));
        Ok(match set {
            MultSet::Elems(us) => us.iter().any(|u| base.is_zero(&base.mul(&cross, u))),
            MultSet::Powers(p) => {
                if matches!(base.kind(), RingKind::Int) {
                    base.is_zero(&cross)
                } else {
                    let mut u = base.one();
                    let mut found = false;
                    for _ in 0..64 {
                        if base.is_zero(&base.mul(&cross, &u)) {
                            found = true;
                            break;
                        }
                        u = base.mul(&u, p);
                    }
                    found
                }
            }
        })
    }

    /// Base ring of a derived construction, if any.
    pub fn base_ring(&self) -> Option<&Ring> {
        match self.kind() {
            RingKind::PolyQuot { base, .. }
            | RingKind::Poly { base, .. }
            | RingKind::Fractions { base, .. } => Some(base),
            _ => None,
        }
    }

    pub fn product_factors(&self) -> Option<&[Ring]> {
        match self.kind() {
            RingKind::Product { factors } => Some(factors),
            _ => None,
        }
    }

    /// For fraction rings: the canonical image of a base element.
    pub fn from_base(&self, a: Elem) -> Result<Elem> {
        let RingKind::Fractions { base, .. } = self.kind() else {
            return Err(Error::Ring(format!("{} is not a fraction ring", self.spec_string())));
        };
        self.frac(a, base.one())
    }

    pub(crate) fn is_zn(&self) -> Option<u64> {
        match self.kind() {
            RingKind::Zn { n } => Some(*n),
            _ => None,
        }
    }

    pub(crate) fn is_int_ring(&self) -> bool {
        matches!(self.kind(), RingKind::Int)
    }

    // -- ideals -------------------------------------------------------------

    /// Ideal generated by the given elements (finite rings within budget).
    pub fn ideal(&self, gens: Vec<Elem>) -> Result<Ideal> {
        let carrier = self.carrier().ok_or_else(|| {
            Error::Budget(format!("ideal enumeration needs a finite ring, got {}", self.spec_string()))
        })?;
        let gens: Vec<Elem> = gens.into_iter().map(|g| self.normalize(g)).collect();
        let mut set = BTreeSet::new();
        set.insert(self.zero());
        let mut frontier = vec![self.zero()];
        // Additive closure of all multiples of the generators.
        let multiples: Vec<Elem> = gens
            .iter()
            .flat_map(|g| carrier.iter().map(move |r| (r, g)))
            .map(|(r, g)| self.mul(r, g))
            .collect();
        while let Some(x) = frontier.pop() {
            for m in &multiples {
                let y = self.add(&x, m);
                if set.insert(y.clone()) {
                    frontier.push(y);
                }
            }
        }
        Ok(Ideal { gens, elems: set.into_iter().collect() })
    }

    /// Every ideal, as a lattice closure of principal ideals under sums.
    pub fn all_ideals(&self) -> Result<Vec<Ideal>> {
        let carrier = self.carrier().ok_or_else(|| {
            Error::Budget(format!("ideal enumeration needs a finite ring, got {}", self.spec_string()))
        })?;
        let mut by_elems: BTreeMap<Vec<Elem>, Ideal> = BTreeMap::new();
        for g in carrier {
            let i = self.ideal(vec![g.clone()])?;
            by_elems.entry(i.elems.clone()).or_insert(i);
        }
        loop {
            let snapshot: Vec<Ideal> = by_elems.values().cloned().collect();
            let mut grew = false;
            for a in &snapshot {
                for b in &snapshot {
                    let mut gens = a.gens.clone();
                    gens.extend(b.gens.clone());
                    let joined = self.ideal(gens)?;
                    if !by_elems.contains_key(&joined.elems) {
                        let slim = self.slim_generators(&joined);
                        by_elems.insert(slim.elems.clone(), slim);
                        grew = true;
                    }
                }
            }
            if !grew {
                break;
            }
            if by_elems.len() > 4096 {
                return Err(Error::Budget("ideal lattice exceeds enumeration budget".into()));
            }
        }
        Ok(by_elems.into_values().collect())
    }

    fn slim_generators(&self, ideal: &Ideal) -> Ideal {
        let mut gens = ideal.gens.clone();
        let mut i = 0;
        while i < gens.len() && gens.len() > 1 {
            let mut trial = gens.clone();
            trial.remove(i);
            if let Ok(sub) = self.ideal(trial.clone()) {
                if sub.elems == ideal.elems {
                    gens = trial;
                    continue;
                }
            }
            i += 1;
        }
        Ideal { gens, elems: ideal.elems.clone() }
    }

    /// Maximal ideals, sorted canonically. Residue rings and products take a
    /// direct route; other shapes go through the full ideal lattice.
    pub fn maximal_ideals(&self) -> Result<Vec<Ideal>> {
        match self.kind() {
            RingKind::Zn { n } => {
                let mut out = Vec::new();
                let mut m = *n;
                let mut p = 2u64;
                while p * p <= m {
                    if m % p == 0 {
                        out.push(self.ideal(vec![Elem::Int(p as i128)])?);
                        while m % p == 0 {
                            m /= p;
                        }
                    }
                    p += 1;
                }
                if m > 1 {
                    out.push(self.ideal(vec![Elem::Int(m as i128)])?);
                }
                out.sort();
                Ok(out)
            }
            RingKind::Product { factors } => {
                // Maximal ideals are M_i x (everything else).
                let mut out = Vec::new();
                for (i, f) in factors.iter().enumerate() {
                    for m in f.maximal_ideals()? {
                        let mut gens = Vec::new();
                        for g in &m.gens {
                            let mut tuple: Vec<Elem> =
                                factors.iter().map(|fj| fj.one()).collect();
                            tuple[i] = g.clone();
                            gens.push(Elem::Tuple(tuple));
                        }
                        // Kill the i-th slot's complement of the ideal by
                        // also including the idempotent vanishing at i.
                        let mut e: Vec<Elem> = factors.iter().map(|fj| fj.one()).collect();
                        e[i] = f.zero();
                        gens.push(Elem::Tuple(e));
                        out.push(self.ideal(gens)?);
                    }
                }
                out.sort();
                Ok(out)
            }
            _ => {
                let size = self.size().ok_or_else(|| {
                    Error::Budget(format!(
                        "maximal ideals need a finite ring, got {}",
                        self.spec_string()
                    ))
                })? as usize;
                let all = self.all_ideals()?;
                let proper: Vec<&Ideal> = all.iter().filter(|i| i.len() < size).collect();
                let mut out = Vec::new();
                for i in &proper {
                    let maximal = !proper
                        .iter()
                        .any(|j| j.len() > i.len() && i.elems.iter().all(|e| j.contains(e)));
                    if maximal {
                        out.push((*i).clone());
                    }
                }
                out.sort();
                Ok(out)
            }
        }
    }

    pub fn is_local(&self) -> Result<bool> {
        Ok(self.maximal_ideals()?.len() == 1)
    }

    // -- idempotents --------------------------------------------------------

    pub fn idempotents(&self) -> Result<Vec<Elem>> {
        let carrier = self.carrier().ok_or_else(|| {
            Error::Budget(format!("idempotent scan needs a finite ring, got {}", self.spec_string()))
        })?;
        Ok(carrier.iter().filter(|e| self.mul(e, e) == **e).cloned().collect())
    }

    /// Ordered systems (e_1, ..., e_k) of pairwise-orthogonal idempotents
    /// summing to 1. Zero components are allowed; over a field only the
    /// k systems with a single 1 survive.
    pub fn idempotent_systems(&self, k: usize) -> Result<Vec<Vec<Elem>>> {
        if k == 0 {
            return Ok(vec![]);
        }
        let idems: Vec<Elem> = self.idempotents()?;
        let mut out = Vec::new();
        let mut partial: Vec<Elem> = Vec::new();
        self.idem_rec(&idems, k, &mut partial, &mut out);
        Ok(out)
    }

    fn idem_rec(&self, idems: &[Elem], k: usize, partial: &mut Vec<Elem>, out: &mut Vec<Vec<Elem>>) {
        if partial.len() == k {
            let sum = partial.iter().fold(self.zero(), |acc, e| self.add(&acc, e));
            if self.is_one(&sum) {
                out.push(partial.clone());
            }
            return;
        }
        for e in idems {
            if partial.iter().all(|p| self.is_zero(&self.mul(p, e))) {
                partial.push(e.clone());
                self.idem_rec(idems, k, partial, out);
                partial.pop();
            }
        }
    }

    // -- formatting ---------------------------------------------------------

    pub fn fmt_elem(&self, e: &Elem) -> String {
        match (self.kind(), e) {
            (RingKind::Int | RingKind::Zn { .. }, Elem::Int(v)) => format!("{v}"),
            (RingKind::Product { factors }, Elem::Tuple(xs)) => {
                let parts: Vec<String> =
                    factors.iter().zip(xs).map(|(f, x)| f.fmt_elem(x)).collect();
                format!("({})", parts.join(", "))
            }
            (RingKind::PolyQuot { base, var, .. } | RingKind::Poly { base, var }, Elem::Poly(cs)) => {
                fmt_poly(base, cs, var)
            }
            (RingKind::Fractions { base, .. }, Elem::Frac(a, s)) => {
                if base.is_one(s) {
                    base.fmt_elem(a)
                } else {
                    format!("{}/{}", base.fmt_elem(a), base.fmt_elem(s))
                }
            }
            _ => panic!("mismatched element shape in fmt_elem"),
        }
    }

    /// Parse a single element literal for this ring. Accepts integers for any
    /// ring, tuples `(a, b)` for products, polynomials in the ring variable
    /// for quotients, and `a/s` for fraction rings.
    pub fn parse_elem(&self, s: &str) -> Result<Elem> {
        parse::parse_elem(self, s)
    }
}

// -- helpers ----------------------------------------------------------------

fn trim_poly(base: &Ring, mut cs: Vec<Elem>) -> Vec<Elem> {
    while let Some(last) = cs.last() {
        if base.is_zero(last) {
            cs.pop();
        } else {
            break;
        }
    }
    cs
}

fn poly_mul(base: &Ring, xs: &[Elem], ys: &[Elem]) -> Vec<Elem> {
    if xs.is_empty() || ys.is_empty() {
        return vec![];
    }
    let mut out = vec![base.zero(); xs.len() + ys.len() - 1];
    for (i, x) in xs.iter().enumerate() {
        for (j, y) in ys.iter().enumerate() {
            out[i + j] = base.add(&out[i + j], &base.mul(x, y));
        }
    }
    out
}

/// Remainder of division by a monic modulus.
fn poly_rem(base: &Ring, mut cs: Vec<Elem>, modulus: &[Elem]) -> Vec<Elem> {
    let deg = modulus.len() - 1;
    while cs.len() > deg {
        let lead = cs.pop().expect("nonempty");
        if base.is_zero(&lead) {
            continue;
        }
        let shift = cs.len() - deg;
        for (i, m) in modulus[..deg].iter().enumerate() {
            let t = base.mul(&lead, m);
            cs[shift + i] = base.sub(&cs[shift + i], &t);
        }
    }
    cs
}

fn fmt_poly(base: &Ring, cs: &[Elem], var: &str) -> String {
    if cs.iter().all(|c| base.is_zero(c)) {
        return "0".into();
    }
    let mut parts = Vec::new();
    for (i, c) in cs.iter().enumerate().rev() {
        if base.is_zero(c) {
            continue;
        }
        let cs_str = base.fmt_elem(c);
        let needs_parens = cs_str.contains(' ') || cs_str.contains('+');
        let coeff = if needs_parens { format!("({cs_str})") } else { cs_str };
        let term = match i {
            0 => coeff,
            1 if base.is_one(c) => var.to_string(),
            1 => format!("{coeff}*{var}"),
            _ if base.is_one(c) => format!("{var}^{i}"),
            _ => format!("{coeff}*{var}^{i}"),
        };
        parts.push(term);
    }
    parts.join(" + ")
}

fn normalize_mult_set(base: &Ring, set: MultSet) -> Result<MultSet> {
    match set {
        MultSet::Elems(es) => {
            let es: Vec<Elem> = {
                let mut seen = BTreeSet::new();
                es.into_iter()
                    .map(|e| base.normalize(e))
                    .filter(|e| seen.insert(e.clone()))
                    .collect()
            };
            if es.iter().any(|e| base.is_zero(e)) {
                return Err(Error::Ring("multiplicative set contains 0: fractions collapse to the zero ring".into()));
            }
            if !es.iter().any(|e| base.is_one(e)) {
                return Err(Error::Ring("multiplicative set must contain 1".into()));
            }
            for a in &es {
                for b in &es {
                    let p = base.mul(a, b);
                    if !es.contains(&p) {
                        return Err(Error::Ring(format!(
                            "set is not multiplicatively closed: {} * {} = {} missing",
                            base.fmt_elem(a),
                            base.fmt_elem(b),
                            base.fmt_elem(&p)
                        )));
                    }
                }
            }
            Ok(MultSet::Elems(es))
        }
        MultSet::Powers(b) => {
            let b = base.normalize(b);
            if base.is_zero(&b) || base.is_nilpotent(&b) {
                return Err(Error::Ring("powers of a nilpotent element reach 0: fractions collapse to the zero ring".into()));
            }
            if base.carrier().is_some() {
                // Finite base: expand the cycle into an explicit set.
                let mut es = vec![base.one()];
                let mut x = b.clone();
                while !es.contains(&x) {
                    es.push(x.clone());
                    x = base.mul(&x, &b);
                }
                normalize_mult_set(base, MultSet::Elems(es))
            } else {
                Ok(MultSet::Powers(b))
            }
        }
    }
}

fn mult_set_contains(base: &Ring, set: &MultSet, e: &Elem) -> bool {
    match set {
        MultSet::Elems(es) => es.contains(e),
        MultSet::Powers(b) => {
            if base.is_int_ring() {
                let (Elem::Int(bv), Elem::Int(ev)) = (b, e) else { return false };
                if *ev == 0 {
                    return false;
                }
                let mut x = 1i128;
                for _ in 0..256 {
                    if x == *ev {
                        return true;
                    }
                    if x.abs() > ev.abs() && bv.abs() > 1 {
                        return false;
                    }
                    match x.checked_mul(*bv) {
                        Some(y) if y != x => x = y,
                        // Fixed point (b = 1 or overflow): cycle exhausted.
                        _ => return false,
                    }
                }
                false
            } else {
                let mut x = base.one();
                for _ in 0..256 {
                    if x == *e {
                        return true;
                    }
                    x = base.mul(&x, b);
                }
                false
            }
        }
    }
}

fn divisors_desc(g: i128) -> Vec<i128> {
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1i128;
    while d * d <= g {
        if g % d == 0 {
            small.push(d);
            if d * d != g {
                large.push(g / d);
            }
        }
        d += 1;
    }
    small.reverse();
    large.extend(small);
    large
}

fn prime_power(q: u64) -> Option<(u64, u32)> {
    if q < 2 {
        return None;
    }
    let mut p = 2;
    while p * p <= q {
        if q % p == 0 {
            let mut k = 0;
            let mut m = q;
            while m % p == 0 {
                m /= p;
                k += 1;
            }
            return if m == 1 { Some((p, k)) } else { None };
        }
        p += 1;
    }
    Some((q, 1))
}

/// Lexicographically first monic irreducible of degree k over F_p,
/// coefficients constant-first (excluding the leading 1).
fn first_irreducible(p: u64, k: u32) -> Option<Vec<u64>> {
    let k = k as usize;
    let mut coeffs = vec![0u64; k];
    loop {
        if poly_irreducible_fp(p, &coeffs) {
            let mut f = coeffs.clone();
            f.push(1);
            return Some(f);
        }
        let mut i = 0;
        loop {
            coeffs[i] += 1;
            if coeffs[i] < p {
                break;
            }
            coeffs[i] = 0;
            i += 1;
            if i == k {
                return None;
            }
        }
    }
}

fn poly_eval_fp(p: u64, coeffs: &[u64], x: u64) -> u64 {
    // Horner on the monic polynomial with the given tail coefficients.
    let mut acc = 1u64;
    for c in coeffs.iter().rev() {
        acc = (acc * x + c) % p;
    }
    acc
}

fn poly_irreducible_fp(p: u64, coeffs: &[u64]) -> bool {
    let k = coeffs.len();
    if k == 0 {
        return false;
    }
    // Root test kills every reducible up to degree 3.
    for x in 0..p {
        if poly_eval_fp(p, coeffs, x) == 0 {
            return false;
        }
    }
    if k <= 3 {
        return true;
    }
    // Trial division by monic polynomials of degree 2..k/2.
    let mut full = coeffs.to_vec();
    full.push(1);
    for d in 2..=k / 2 {
        let mut div = vec![0u64; d];
        loop {
            if divides_fp(p, &full, &div) {
                return false;
            }
            let mut i = 0;
            loop {
                div[i] += 1;
                if div[i] < p {
                    break;
                }
                div[i] = 0;
                i += 1;
                if i == d {
                    // All divisors of this degree tried.
                    div.clear();
                    break;
                }
            }
            if div.is_empty() {
                break;
            }
        }
    }
    true
}

fn divides_fp(p: u64, f: &[u64], divisor_tail: &[u64]) -> bool {
    // divisor = y^d + tail; long division of f, checking remainder 0.
    let d = divisor_tail.len();
    let mut rem = f.to_vec();
    while rem.len() > d {
        let lead = *rem.last().expect("nonempty");
        rem.pop();
        if lead == 0 {
            continue;
        }
        let shift = rem.len() - d;
        for (i, &m) in divisor_tail.iter().enumerate() {
            rem[shift + i] = (rem[shift + i] + p * p - (lead * m) % p) % p;
        }
    }
    rem.iter().all(|&c| c == 0)
}

// -- diagonal embedding -----------------------------------------------------

/// Embedding of a finite ring into the product of its localizations at all
/// maximal ideals.
pub struct DiagonalEmbedding {
    pub source: Ring,
    pub target: Ring,
    pub primes: Vec<Ideal>,
    locals: Vec<Ring>,
}

impl DiagonalEmbedding {
    pub fn new(source: Ring) -> Result<DiagonalEmbedding> {
        let primes = source.maximal_ideals()?;
        if primes.is_empty() {
            return Err(Error::Ring("ring has no maximal ideals".into()));
        }
        let locals: Vec<Ring> = primes
            .iter()
            .map(|p| Ring::localize_at(source.clone(), p))
            .collect::<Result<Vec<_>>>()?;
        let target = if locals.len() == 1 {
            locals[0].clone()
        } else {
            Ring::product(locals.clone())?
        };
        Ok(DiagonalEmbedding { source, target, primes, locals })
    }

    pub fn embed(&self, a: &Elem) -> Result<Elem> {
        let images: Vec<Elem> = self
            .locals
            .iter()
            .map(|l| l.from_base(a.clone()))
            .collect::<Result<Vec<_>>>()?;
        Ok(if images.len() == 1 {
            images.into_iter().next().expect("one image")
        } else {
            self.target.normalize(Elem::Tuple(images))
        })
    }

    /// Injectivity, checked by exhausting the source carrier.
    pub fn verify_injective(&self) -> Result<bool> {
        let carrier = self
            .source
            .carrier()
            .ok_or_else(|| Error::Budget("injectivity sweep needs a finite source".into()))?;
        let mut seen = BTreeSet::new();
        for a in carrier {
            if !seen.insert(self.embed(a)?) {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

// -- ring automorphisms -----------------------------------------------------

/// Automorphism of a finite ring, stored as a full value table.
#[derive(Clone, Debug)]
pub struct RingAut {
    pub ring: Ring,
    pub label: String,
    map: HashMap<Elem, Elem>,
}

impl PartialEq for RingAut {
    fn eq(&self, other: &Self) -> bool {
        self.ring == other.ring && self.map == other.map
    }
}

impl RingAut {
    pub fn identity(ring: &Ring) -> RingAut {
        let carrier = ring.carrier().expect("finite ring").to_vec();
        let map = carrier.iter().map(|e| (e.clone(), e.clone())).collect();
        RingAut { ring: ring.clone(), label: "id".into(), map }
    }

    pub fn apply(&self, e: &Elem) -> Elem {
        self.map
            .get(e)
            .cloned()
            .unwrap_or_else(|| panic!("element outside automorphism table"))
    }

    pub fn is_identity(&self) -> bool {
        self.map.iter().all(|(k, v)| k == v)
    }

    pub fn inverse(&self) -> RingAut {
        let map = self.map.iter().map(|(k, v)| (v.clone(), k.clone())).collect();
        RingAut {
            ring: self.ring.clone(),
            label: if self.is_identity() { "id".into() } else { format!("inv({})", self.label) },
            map,
        }
    }

    fn verify(&self) -> bool {
        let r = &self.ring;
        let carrier = r.carrier().expect("finite ring");
        if self.map.len() != carrier.len() {
            return false;
        }
        let image: BTreeSet<&Elem> = self.map.values().collect();
        if image.len() != carrier.len() {
            return false;
        }
        if self.apply(&r.one()) != r.one() {
            return false;
        }
        for a in carrier {
            for b in carrier {
                if self.apply(&r.add(a, b)) != r.add(&self.apply(a), &self.apply(b)) {
                    return false;
                }
                if self.apply(&r.mul(a, b)) != r.mul(&self.apply(a), &self.apply(b)) {
                    return false;
                }
            }
        }
        true
    }
}

/// All ring automorphisms of a finite ring, verified against the full
/// operation tables. Deterministic order, identity first.
pub fn automorphisms(ring: &Ring) -> Result<Vec<RingAut>> {
    let carrier = ring
        .carrier()
        .ok_or_else(|| Error::Budget("automorphism enumeration needs a finite ring".into()))?;
    if carrier.len() > 4096 {
        return Err(Error::Budget("automorphism enumeration budget exceeded".into()));
    }
    let mut candidates: Vec<RingAut> = Vec::new();
    match ring.kind() {
        RingKind::Zn { .. } => candidates.push(RingAut::identity(ring)),
        RingKind::PolyQuot { base, modulus, var: _ } => {
            for sigma in automorphisms(base)? {
                // The variable can go to any root of the (coefficient-mapped)
                // modulus, every base coefficient through sigma.
                let mapped: Vec<Elem> = modulus.iter().map(|c| sigma.apply(c)).collect();
                for r in carrier {
                    let val = eval_poly(ring, base, &mapped, r);
                    if !ring.is_zero(&val) {
                        continue;
                    }
                    let mut map = HashMap::new();
                    for e in carrier {
                        let Elem::Poly(cs) = e else { unreachable!() };
                        let mut acc = ring.zero();
                        let mut rp = ring.one();
                        for c in cs {
                            let lift = ring.normalize(Elem::Poly(vec![sigma.apply(c)]));
                            acc = ring.add(&acc, &ring.mul(&lift, &rp));
                            rp = ring.mul(&rp, r);
                        }
                        map.insert(e.clone(), acc);
                    }
                    let label = if sigma.is_identity() {
                        format!("y->{}", ring.fmt_elem(r))
                    } else {
                        format!("{}, y->{}", sigma.label, ring.fmt_elem(r))
                    };
                    candidates.push(RingAut { ring: ring.clone(), label, map });
                }
            }
        }
        RingKind::Product { factors } => {
            let factor_auts: Vec<Vec<RingAut>> =
                factors.iter().map(automorphisms).collect::<Result<Vec<_>>>()?;
            let specs: Vec<String> = factors.iter().map(|f| f.spec_string()).collect();
            let perms = permutations_preserving(&specs);
            for perm in perms {
                let mut choice = vec![0usize; factors.len()];
                loop {
                    let mut map = HashMap::new();
                    for e in carrier {
                        let Elem::Tuple(xs) = e else { unreachable!() };
                        // Component j of the image comes from source slot perm[j].
                        let ys: Vec<Elem> = (0..factors.len())
                            .map(|j| {
                                let src = perm[j];
                                factor_auts[src][choice[src]].apply(&xs[src])
                            })
                            .collect();
                        map.insert(e.clone(), Elem::Tuple(ys));
                    }
                    let label = format!(
                        "perm{:?} x ({})",
                        perm,
                        (0..factors.len())
                            .map(|i| factor_auts[i][choice[i]].label.clone())
                            .collect::<Vec<_>>()
                            .join(", ")
                    );
                    candidates.push(RingAut { ring: ring.clone(), label, map });
                    // Advance the per-factor choice vector.
                    let mut i = 0;
                    loop {
                        choice[i] += 1;
                        if choice[i] < factor_auts[i].len() {
                            break;
                        }
                        choice[i] = 0;
                        i += 1;
                        if i == factors.len() {
                            break;
                        }
                    }
                    if i == factors.len() {
                        break;
                    }
                }
            }
        }
        RingKind::Fractions { base, .. } => {
            for sigma in automorphisms(base)? {
                let mut map = HashMap::new();
                let mut total = true;
                for e in carrier {
                    let Elem::Frac(a, _) = e else { unreachable!() };
                    match ring.from_base(sigma.apply(a)) {
                        Ok(img) => {
                            map.insert(e.clone(), img);
                        }
                        Err(_) => {
                            total = false;
                            break;
                        }
                    }
                }
                if total {
                    candidates.push(RingAut { ring: ring.clone(), label: sigma.label, map });
                }
            }
        }
        RingKind::Int | RingKind::Poly { .. } => unreachable!("finite carrier"),
    }
    let mut out: Vec<RingAut> = Vec::new();
    for c in candidates {
        if c.verify() && !out.iter().any(|o| o.map == c.map) {
            out.push(c);
        }
    }
    // Identity first, then by label.
    out.sort_by_key(|a| (!a.is_identity(), a.label.clone()));
    Ok(out)
}

fn eval_poly(ring: &Ring, base: &Ring, coeffs: &[Elem], x: &Elem) -> Elem {
    let mut acc = ring.zero();
    let mut xp = ring.one();
    for c in coeffs {
        let lift = ring.normalize(Elem::Poly(vec![base.normalize(c.clone())]));
        acc = ring.add(&acc, &ring.mul(&lift, &xp));
        xp = ring.mul(&xp, x);
    }
    acc
}

fn permutations_preserving(specs: &[String]) -> Vec<Vec<usize>> {
    let n = specs.len();
    let mut out = Vec::new();
    let mut perm: Vec<usize> = Vec::new();
    let mut used = vec![false; n];
    fn rec(
        specs: &[String],
        perm: &mut Vec<usize>,
        used: &mut Vec<bool>,
        out: &mut Vec<Vec<usize>>,
    ) {
        let n = specs.len();
        if perm.len() == n {
            out.push(perm.clone());
            return;
        }
        let j = perm.len();
        for i in 0..n {
            if !used[i] && specs[i] == specs[j] {
                used[i] = true;
                perm.push(i);
                rec(specs, perm, used, out);
                perm.pop();
                used[i] = false;
            }
        }
    }
    rec(specs, &mut perm, &mut used, &mut out);
    out
}

#[cfg(test)]
mod tests;
