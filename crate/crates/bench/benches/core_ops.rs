use chevring::genalg::algebra_closure;
use chevring::groupcore::commutator_constants;
use chevring::{ChevalleyBasis, Representation, Ring, RootSystem};
use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;
use std::sync::Arc;

fn rep_of(system: &str, rep: &str) -> Arc<Representation> {
    let rs = Arc::new(RootSystem::parse_name(system).unwrap());
    let cb = Arc::new(ChevalleyBasis::new(rs).unwrap());
    Arc::new(Representation::by_name(&cb, rep).unwrap())
}

fn basis_construction(c: &mut Criterion) {
    c.bench_function("chevalley_basis_f4", |b| {
        b.iter(|| {
            let rs = Arc::new(RootSystem::parse_name(black_box("F4")).unwrap());
            black_box(ChevalleyBasis::new(rs).unwrap())
        })
    });
}

fn closure_c2(c: &mut Criterion) {
    let rep = rep_of("C2", "universal");
    let ring = Ring::zn(5).unwrap();
    c.bench_function("algebra_closure_c2_z5", |b| {
        b.iter(|| black_box(algebra_closure(&rep, &ring, 64).unwrap()))
    });
}

fn constants_b2(c: &mut Criterion) {
    let rep = rep_of("B2", "adjoint");
    let rs = rep.basis().rootsys().clone();
    let a = rs.parse_root("a1").unwrap();
    let b2 = rs.parse_root("a2").unwrap();
    c.bench_function("commutator_constants_b2", |b| {
        b.iter(|| black_box(commutator_constants(&rep, a, b2).unwrap()))
    });
}

fn unipotent_word(c: &mut Criterion) {
    let rep = rep_of("A3", "standard");
    let ring = Ring::zn(5).unwrap();
    let t = ring.int(2);
    let n = rep.basis().rootsys().num_roots();
    c.bench_function("unipotent_word_a3_z5", |b| {
        b.iter(|| {
            let mut acc = rep.unipotent(&ring, 0, &t);
            for root in 1..n {
                acc = acc.mul(&rep.unipotent(&ring, root, &t));
            }
            black_box(acc)
        })
    });
}

criterion_group!(benches, basis_construction, closure_c2, constants_b2, unipotent_word);
criterion_main!(benches);
