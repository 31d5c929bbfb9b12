use super::*;
use crate::Error;
use proptest::prelude::*;
use std::collections::BTreeSet;

fn z(n: u64) -> Ring {
    Ring::zn(n).expect("modulus >= 2")
}

// -- residue rings and products ---------------------------------------------

#[test]
fn residue_ring_basics() {
    let r = z(12);
    assert_eq!(r.int(-1), Elem::Int(11));
    assert_eq!(r.add(&r.int(7), &r.int(8)), Elem::Int(3));
    assert_eq!(r.mul(&r.int(7), &r.int(7)), Elem::Int(1));
    assert_eq!(r.size(), Some(12));
    let units: Vec<Elem> = r.units().to_vec();
    assert_eq!(units, vec![Elem::Int(1), Elem::Int(5), Elem::Int(7), Elem::Int(11)]);
    assert_eq!(r.inv(&r.int(5)), Some(Elem::Int(5)));
    assert_eq!(r.inv(&r.int(4)), None);
}

#[test]
fn product_matches_chinese_remainder_map() {
    // x -> (x mod 4, x mod 3) is the classical iso Z/12 -> Z/4 x Z/3.
    let r12 = z(12);
    let p = Ring::product(vec![z(4), z(3)]).expect("two factors");
    let iso = |x: i128| Elem::Tuple(vec![Elem::Int(x.rem_euclid(4)), Elem::Int(x.rem_euclid(3))]);
    assert_eq!(iso(7), Elem::Tuple(vec![Elem::Int(3), Elem::Int(1)]));
    let mut images = BTreeSet::new();
    for x in 0..12i128 {
        for y in 0..12i128 {
            assert_eq!(iso((x + y) % 12), p.add(&iso(x), &iso(y)));
            assert_eq!(iso((x * y) % 12), p.mul(&iso(x), &iso(y)));
        }
        images.insert(iso(x));
        assert_eq!(r12.is_invertible(&r12.int(x)), p.is_invertible(&iso(x)));
    }
    assert_eq!(images.len(), 12);
    assert_eq!(p.size(), Some(12));
}

#[test]
fn nilpotents_and_poly_units() {
    let r = z(8);
    assert!(r.is_nilpotent(&r.int(2)));
    assert!(!r.is_nilpotent(&r.int(3)));
    let pr = Ring::poly_ring(z(4), "t");
    // 1 + 2t is a unit because 2 is nilpotent mod 4: (1 + 2t)^2 = 1.
    let f = pr.normalize(Elem::Poly(vec![Elem::Int(1), Elem::Int(2)]));
    let inv = pr.inv(&f).expect("unit");
    assert!(pr.is_one(&pr.mul(&f, &inv)));
    // 1 + t is not a unit over Z/4.
    let g = pr.normalize(Elem::Poly(vec![Elem::Int(1), Elem::Int(1)]));
    assert!(pr.inv(&g).is_none());
}

// -- ideals and localization ------------------------------------------------

#[test]
fn maximal_ideals_of_twelve() {
    let r = z(12);
    let maxes = r.maximal_ideals().expect("finite");
    assert_eq!(maxes.len(), 2);
    let two: Vec<i128> = vec![0, 2, 4, 6, 8, 10];
    let three: Vec<i128> = vec![0, 3, 6, 9];
    assert_eq!(maxes[0].elems, two.into_iter().map(Elem::Int).collect::<Vec<_>>());
    assert_eq!(maxes[1].elems, three.into_iter().map(Elem::Int).collect::<Vec<_>>());
    // The general lattice route agrees with the direct one.
    let all = r.all_ideals().expect("finite");
    assert_eq!(all.len(), 6); // one per divisor of 12
    let proper: Vec<&Ideal> = all.iter().filter(|i| i.len() < 12).collect();
    let mut lattice_maxes: Vec<Vec<Elem>> = proper
        .iter()
        .filter(|i| {
            !proper.iter().any(|j| j.len() > i.len() && i.elems.iter().all(|e| j.contains(e)))
        })
        .map(|i| i.elems.clone())
        .collect();
    lattice_maxes.sort();
    assert_eq!(lattice_maxes, maxes.iter().map(|m| m.elems.clone()).collect::<Vec<_>>());
    assert!(!r.is_local().expect("finite"));
}

#[test]
fn product_maximal_ideals_lift_factor_ideals() {
    let r = Ring::product(vec![z(4), z(2)]).expect("two factors");
    let maxes = r.maximal_ideals().expect("finite");
    assert_eq!(maxes.len(), 2);
    for m in &maxes {
        assert_eq!(m.len(), 4); // both have index 2 in an 8-element ring
    }
    let m1: BTreeSet<&Elem> = maxes[0].elems.iter().collect();
    let m2: BTreeSet<&Elem> = maxes[1].elems.iter().collect();
    assert_ne!(m1, m2);
}

#[test]
fn localization_at_even_prime() {
    let r = z(12);
    let p2 = r.ideal(vec![Elem::Int(2)]).expect("finite");
    let loc = Ring::localize_at(r.clone(), &p2).expect("prime ideal");
    assert_eq!(loc.size(), Some(4));
    assert!(loc.is_local().expect("finite"));
    // 1/3 = 3 here: (1 - 3*3) * 3 = -24 = 0 in Z/12 with 3 odd.
    let third = loc.frac(Elem::Int(1), Elem::Int(3)).expect("odd denominator");
    assert_eq!(third, loc.from_base(Elem::Int(3)).expect("base image"));
    // Even denominators are rejected.
    assert!(loc.frac(Elem::Int(1), Elem::Int(4)).is_err());
    // Localizing at a non-prime ideal fails.
    let six = r.ideal(vec![Elem::Int(6)]).expect("finite");
    assert!(Ring::localize_at(r.clone(), &six).is_err());
}

#[test]
fn diagonal_embedding_into_localizations() {
    let r = z(12);
    let emb = DiagonalEmbedding::new(r.clone()).expect("semilocal");
    assert_eq!(emb.primes.len(), 2);
    assert_eq!(emb.target.size(), Some(12));
    assert!(emb.verify_injective().expect("finite"));
    // 6 lands on (2, 0): nonzero at the even prime, zero at the odd one.
    let img = emb.embed(&Elem::Int(6)).expect("total");
    let Elem::Tuple(parts) = &img else { panic!("product image") };
    let l2 = Ring::localize_at(r.clone(), &emb.primes[0]).expect("prime");
    let l3 = Ring::localize_at(r.clone(), &emb.primes[1]).expect("prime");
    assert_eq!(parts[0], l2.from_base(Elem::Int(2)).expect("base image"));
    assert!(l3.is_zero(&parts[1]));
}

// -- idempotents ------------------------------------------------------------

#[test]
fn idempotent_systems_of_six() {
    let r = z(6);
    assert_eq!(
        r.idempotents().expect("finite"),
        vec![Elem::Int(0), Elem::Int(1), Elem::Int(3), Elem::Int(4)]
    );
    let systems = r.idempotent_systems(2).expect("finite");
    assert_eq!(
        systems,
        vec![
            vec![Elem::Int(0), Elem::Int(1)],
            vec![Elem::Int(1), Elem::Int(0)],
            vec![Elem::Int(3), Elem::Int(4)],
            vec![Elem::Int(4), Elem::Int(3)],
        ]
    );
    // A field admits only the trivial systems with one component equal to 1.
    assert_eq!(
        z(5).idempotent_systems(2).expect("finite"),
        vec![vec![Elem::Int(0), Elem::Int(1)], vec![Elem::Int(1), Elem::Int(0)]]
    );
    // Length 1 is just the identity.
    assert_eq!(r.idempotent_systems(1).expect("finite"), vec![vec![Elem::Int(1)]]);
}

// -- polynomial quotients and Galois fields ---------------------------------

#[test]
fn galois_field_four() {
    let f4 = Ring::galois_field(4).expect("prime power");
    assert_eq!(f4.spec_string(), "Z/2[y]/(y^2 + y + 1)");
    assert_eq!(f4.size(), Some(4));
    // Every nonzero element is a unit.
    assert_eq!(f4.units().len(), 3);
    // y^2 = y + 1.
    let y = f4.monomial(1);
    assert_eq!(f4.mul(&y, &y), f4.normalize(Elem::Poly(vec![Elem::Int(1), Elem::Int(1)])));
    // Frobenius is the one nontrivial automorphism.
    let auts = automorphisms(&f4).expect("small");
    assert_eq!(auts.len(), 2);
    assert!(auts[0].is_identity());
    assert_eq!(auts[1].apply(&y), f4.add(&y, &f4.one()));
}

#[test]
fn galois_field_sizes_and_rejections() {
    for (q, expect_units) in [(8u64, 7usize), (9, 8), (25, 24), (27, 26)] {
        let f = Ring::galois_field(q).expect("prime power");
        assert_eq!(f.size(), Some(q as u128));
        assert_eq!(f.units().len(), expect_units);
    }
    assert_eq!(Ring::galois_field(5).expect("prime").spec_string(), "Z/5");
    assert!(Ring::galois_field(6).is_err());
    assert!(Ring::galois_field(1).is_err());
}

#[test]
fn root_adjunction_and_its_unit_check() {
    let r = Ring::quotient_extension(z(7), 3, Elem::Int(2)).expect("2 is a unit mod 7");
    assert_eq!(r.size(), Some(343));
    let y = r.monomial(1);
    assert_eq!(r.pow(&y, 3), r.int(2));
    // 2 is not invertible mod 4, so the same extension over Z/4 is rejected.
    assert!(Ring::quotient_extension(z(4), 2, Elem::Int(2)).is_err());
    assert!(Ring::quotient_extension(z(7), 0, Elem::Int(2)).is_err());
}

#[test]
fn quadratic_extension_automorphisms() {
    // y^2 = 2 over Z/5: the two roots +-y give exactly two automorphisms.
    let r = Ring::quotient_extension(z(5), 2, Elem::Int(2)).expect("unit");
    let auts = automorphisms(&r).expect("small");
    assert_eq!(auts.len(), 2);
    let y = r.monomial(1);
    assert_eq!(auts[1].apply(&y), r.neg(&y));
    assert!(auts[1].inverse().apply(&auts[1].apply(&y)) == y);
    // Swapping equal factors is the only nontrivial automorphism of Z/3 x Z/3.
    let p = Ring::product(vec![z(3), z(3)]).expect("two factors");
    assert_eq!(automorphisms(&p).expect("small").len(), 2);
    // Z/4 x Z/3 has none beyond the identity.
    let q = Ring::product(vec![z(4), z(3)]).expect("two factors");
    assert_eq!(automorphisms(&q).expect("small").len(), 1);
}

// -- fractions --------------------------------------------------------------

#[test]
fn integer_fractions_reduce_within_the_set() {
    let r = Ring::fractions(Ring::integers(), MultSet::Powers(Elem::Int(2))).expect("no zero");
    let x = r.frac(Elem::Int(6), Elem::Int(4)).expect("4 is a power of 2");
    assert_eq!(x, Elem::Frac(Box::new(Elem::Int(3)), Box::new(Elem::Int(2))));
    let half = r.frac(Elem::Int(1), Elem::Int(2)).expect("power");
    assert!(r.is_one(&r.add(&half, &half)));
    assert!(r.frac(Elem::Int(1), Elem::Int(3)).is_err());
    // 3/1 is not invertible, 2/1 is.
    assert!(r.inv(&r.int(3)).is_none());
    assert_eq!(r.inv(&r.int(2)), Some(half));
}

#[test]
fn finite_fraction_ring_collapses_torsion() {
    // Z/6 with denominators {1, 2, 4}: 3 dies (3 * 2 = 0), leaving Z/3.
    let base = z(6);
    let set = MultSet::Elems(vec![Elem::Int(1), Elem::Int(2), Elem::Int(4)]);
    let r = Ring::fractions(base, set).expect("closed set");
    assert_eq!(r.size(), Some(3));
    assert!(r.is_zero(&r.from_base(Elem::Int(3)).expect("image")));
    let half = r.frac(Elem::Int(1), Elem::Int(2)).expect("2 in the set");
    assert_eq!(half, r.from_base(Elem::Int(2)).expect("image"));
    // The powers form of the same set builds the same ring.
    let r2 = Ring::fractions(z(6), MultSet::Powers(Elem::Int(2))).expect("2 not nilpotent");
    assert_eq!(r2.size(), Some(3));
}

#[test]
fn mult_set_validation() {
    assert!(Ring::fractions(z(6), MultSet::Elems(vec![Elem::Int(1), Elem::Int(0)])).is_err());
    // Missing closure: {1, 2} lacks 4 in Z/6.
    assert!(Ring::fractions(z(6), MultSet::Elems(vec![Elem::Int(1), Elem::Int(2)])).is_err());
    // Missing 1.
    assert!(Ring::fractions(z(6), MultSet::Elems(vec![Elem::Int(2), Elem::Int(4)])).is_err());
    // Powers of a nilpotent hit zero.
    assert!(Ring::fractions(z(8), MultSet::Powers(Elem::Int(2))).is_err());
}

proptest! {
    #[test]
    fn fraction_equality_matches_cross_multiplication(a in 0i128..6, s_i in 0usize..3, b in 0i128..6, t_i in 0usize..3) {
        let dens = [1i128, 2, 4];
        let base = z(6);
        let set = MultSet::Elems(vec![Elem::Int(1), Elem::Int(2), Elem::Int(4)]);
        let r = Ring::fractions(base, set).expect("closed set");
        let (s, t) = (Elem::Int(dens[s_i]), Elem::Int(dens[t_i]));
        let (ea, eb) = (Elem::Int(a), Elem::Int(b));
        let x = r.frac(ea.clone(), s.clone()).expect("in set");
        let y = r.frac(eb.clone(), t.clone()).expect("in set");
        let equivalent = r.frac_equivalent(&ea, &s, &eb, &t).expect("fraction ring");
        prop_assert_eq!(x == y, equivalent);
    }

    #[test]
    fn ring_axioms_hold_on_samples(ai in 0usize..9, bi in 0usize..9, ci in 0usize..9) {
        let f9 = Ring::galois_field(9).expect("prime power");
        let c = f9.carrier().expect("finite").to_vec();
        let (a, b, cc) = (&c[ai], &c[bi], &c[ci]);
        prop_assert_eq!(f9.add(a, b), f9.add(b, a));
        prop_assert_eq!(f9.mul(a, b), f9.mul(b, a));
        prop_assert_eq!(f9.mul(&f9.add(a, b), cc), f9.add(&f9.mul(a, cc), &f9.mul(b, cc)));
        prop_assert_eq!(f9.mul(&f9.mul(a, b), cc), f9.mul(a, &f9.mul(b, cc)));
        prop_assert!(f9.is_zero(&f9.add(a, &f9.neg(a))));
    }
}

// -- linear solving ---------------------------------------------------------

fn brute_solutions(ring: &Ring, a: &[Vec<Elem>], b: &[Elem], cols: usize) -> BTreeSet<Vec<Elem>> {
    let carrier = ring.carrier().expect("finite").to_vec();
    let mut out = BTreeSet::new();
    let mut idx = vec![0usize; cols];
    loop {
        let x: Vec<Elem> = idx.iter().map(|&i| carrier[i].clone()).collect();
        let ok = a.iter().zip(b).all(|(row, bi)| {
            let lhs = row
                .iter()
                .zip(&x)
                .fold(ring.zero(), |acc, (c, xi)| ring.add(&acc, &ring.mul(c, xi)));
            lhs == *bi
        });
        if ok {
            out.insert(x);
        }
        let mut k = 0;
        loop {
            if k == cols {
                return out;
            }
            idx[k] += 1;
            if idx[k] < carrier.len() {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
    }
}

fn span_solutions(ring: &Ring, sol: &RingLinSolution) -> BTreeSet<Vec<Elem>> {
    let carrier = ring.carrier().expect("finite").to_vec();
    let mut set = BTreeSet::new();
    set.insert(sol.particular.clone());
    let mut frontier = vec![sol.particular.clone()];
    while let Some(v) = frontier.pop() {
        for g in &sol.nullspace {
            for r in &carrier {
                let w: Vec<Elem> = v
                    .iter()
                    .zip(g)
                    .map(|(vi, gi)| ring.add(vi, &ring.mul(r, gi)))
                    .collect();
                if set.insert(w.clone()) {
                    frontier.push(w);
                }
            }
        }
    }
    set
}

fn check_solver_exhaustively(ring: &Ring, a: &[Vec<Elem>], cols: usize) {
    let carrier = ring.carrier().expect("finite").to_vec();
    let m = a.len();
    let mut idx = vec![0usize; m];
    loop {
        let b: Vec<Elem> = idx.iter().map(|&i| carrier[i].clone()).collect();
        let brute = brute_solutions(ring, a, &b, cols);
        match solve_linear(ring, a, &b, cols).expect("supported ring") {
            Some(sol) => {
                assert!(!brute.is_empty(), "solver found a solution where none exists");
                assert_eq!(span_solutions(ring, &sol), brute);
            }
            None => assert!(brute.is_empty(), "solver missed existing solutions"),
        }
        let mut k = 0;
        loop {
            if k == m {
                return;
            }
            idx[k] += 1;
            if idx[k] < carrier.len() {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
    }
}

#[test]
fn solver_matches_brute_force_over_zero_divisors() {
    let r = z(6);
    let a = vec![
        vec![Elem::Int(2), Elem::Int(3)],
        vec![Elem::Int(4), Elem::Int(1)],
    ];
    check_solver_exhaustively(&r, &a, 2);
}

#[test]
fn solver_matches_brute_force_over_galois_field() {
    let f4 = Ring::galois_field(4).expect("prime power");
    let y = f4.monomial(1);
    let a = vec![
        vec![y.clone(), f4.one()],
        vec![f4.one(), y.clone()],
    ];
    check_solver_exhaustively(&f4, &a, 2);
}

#[test]
fn solver_matches_brute_force_over_product() {
    let r = Ring::product(vec![z(4), z(3)]).expect("two factors");
    let a = vec![
        vec![r.int(2), r.int(1)],
        vec![r.int(0), r.int(6)],
    ];
    check_solver_exhaustively(&r, &a, 2);
}

#[test]
fn solver_matches_brute_force_over_localization() {
    let r12 = z(12);
    let p2 = r12.ideal(vec![Elem::Int(2)]).expect("finite");
    let loc = Ring::localize_at(r12, &p2).expect("prime");
    let half_inv = loc.frac(Elem::Int(1), Elem::Int(3)).expect("odd");
    let a = vec![vec![loc.int(2), half_inv]];
    check_solver_exhaustively(&loc, &a, 2);
}

#[test]
fn solver_over_integers() {
    let r = Ring::integers();
    let a = vec![
        vec![Elem::Int(2), Elem::Int(4)],
        vec![Elem::Int(1), Elem::Int(3)],
    ];
    let sol = solve_linear(&r, &a, &[Elem::Int(2), Elem::Int(3)], 2)
        .expect("supported")
        .expect("solvable");
    assert_eq!(sol.particular, vec![Elem::Int(-3), Elem::Int(2)]);
    assert!(sol.nullspace.is_empty());
    // 2x = 1 has no integer solution.
    assert!(solve_linear(&r, &[vec![Elem::Int(2)]], &[Elem::Int(1)], 1)
        .expect("supported")
        .is_none());
    // Underdetermined: x + 2y = 3 has a one-dimensional solution set.
    let sol = solve_linear(&r, &[vec![Elem::Int(1), Elem::Int(2)]], &[Elem::Int(3)], 2)
        .expect("supported")
        .expect("solvable");
    assert_eq!(sol.nullspace.len(), 1);
    let g = &sol.nullspace[0];
    let (Elem::Int(g0), Elem::Int(g1)) = (&g[0], &g[1]) else { panic!("integers") };
    assert_eq!(g0 + 2 * g1, 0);
    assert!(*g0 != 0 || *g1 != 0);
}

// -- fast tables ------------------------------------------------------------

#[test]
fn fast_ring_agrees_with_slow_ops() {
    for ring in [
        z(8),
        Ring::galois_field(4).expect("prime power"),
        Ring::product(vec![z(2), z(3)]).expect("two factors"),
    ] {
        let fast = FastRing::new(&ring).expect("small");
        let carrier = ring.carrier().expect("finite").to_vec();
        assert_eq!(fast.size(), carrier.len());
        for a in &carrier {
            let ca = fast.encode(a);
            assert_eq!(fast.decode(ca), *a);
            assert_eq!(fast.decode(fast.neg(ca)), ring.neg(a));
            assert_eq!(fast.inv(ca).map(|c| fast.decode(c)), ring.inv(a));
            for b in &carrier {
                let cb = fast.encode(b);
                assert_eq!(fast.decode(fast.add(ca, cb)), ring.add(a, b));
                assert_eq!(fast.decode(fast.mul(ca, cb)), ring.mul(a, b));
                assert_eq!(fast.decode(fast.sub(ca, cb)), ring.sub(a, b));
            }
        }
    }
}

// -- parsing ----------------------------------------------------------------

#[test]
fn ring_specs_parse_and_roundtrip() {
    for (input, expect) in [
        ("Z/12", "Z/12"),
        ("z / 12", "Z/12"),
        ("Z/4 x Z/3", "Z/4 x Z/3"),
        ("Z/4 X Z/3 x Z/2", "Z/4 x Z/3 x Z/2"),
        ("Z/5[y]/(y^2 - 2)", "Z/5[y]/(y^2 + 3)"),
        ("Z/7[y]/(y^3+1)", "Z/7[y]/(y^3 + 1)"),
        ("GF(4)", "Z/2[y]/(y^2 + y + 1)"),
        ("gf(9)", "Z/3[y]/(y^2 + 1)"),
        ("loc(Z/12, (2))", "loc(Z/12, (2))"),
        ("loc(Z/12, 3)", "loc(Z/12, (3))"),
        ("Z", "Z"),
    ] {
        let r = parse_ring(input).unwrap_or_else(|e| panic!("parse {input}: {e}"));
        assert_eq!(r.spec_string(), expect, "for input {input}");
        // Canonical text parses back to itself.
        let again = parse_ring(&r.spec_string()).expect("roundtrip");
        assert_eq!(again.spec_string(), r.spec_string());
    }
}

#[test]
fn ring_spec_errors_carry_positions() {
    let e = parse_ring("Q/4").expect_err("unknown constructor");
    let Error::Parse { pos, .. } = e else { panic!("parse error expected") };
    assert_eq!(pos, 0);
    let e = parse_ring("Z/12 junk").expect_err("trailing");
    let Error::Parse { pos, .. } = e else { panic!("parse error expected") };
    assert_eq!(pos, 5);
    // Non-unit root target.
    assert!(parse_ring("Z/4[y]/(y^2 - 2)").is_err());
    // Localizing at the unit ideal.
    assert!(parse_ring("loc(Z/12, 5)").is_err());
    // Zero ring.
    assert!(parse_ring("Z/1").is_err());
    // Non-monic modulus.
    assert!(parse_ring("Z/5[y]/(2*y^2 - 1)").is_err());
}

#[test]
fn element_literals_parse_per_ring() {
    let r = z(7);
    assert_eq!(r.parse_elem("-2").expect("int"), Elem::Int(5));
    let p = Ring::product(vec![z(4), z(3)]).expect("two factors");
    assert_eq!(
        p.parse_elem("(3, -1)").expect("tuple"),
        Elem::Tuple(vec![Elem::Int(3), Elem::Int(2)])
    );
    assert_eq!(p.parse_elem("7").expect("diagonal"), Elem::Tuple(vec![Elem::Int(3), Elem::Int(1)]));
    let f4 = Ring::galois_field(4).expect("prime power");
    assert_eq!(f4.parse_elem("y + 1").expect("poly"), f4.add(&f4.monomial(1), &f4.one()));
    assert_eq!(f4.parse_elem("y^2").expect("poly"), f4.mul(&f4.monomial(1), &f4.monomial(1)));
    let r12 = z(12);
    let p2 = r12.ideal(vec![Elem::Int(2)]).expect("finite");
    let loc = Ring::localize_at(r12, &p2).expect("prime");
    assert_eq!(
        loc.parse_elem("1/3").expect("fraction"),
        loc.frac(Elem::Int(1), Elem::Int(3)).expect("odd")
    );
    assert!(loc.parse_elem("1/4").is_err());
}
