use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use transverse_blowup::blowup_surgery::{build_profile, build_surgery_blowup, R_IN, R_MAX, R_OUT};
use transverse_blowup::bw::{brute_force_kernel_agrees, product_quotient};
use transverse_blowup::exterior::contact_check;
use transverse_blowup::models::{make_tube, phi_map};
use transverse_blowup::symexpr::{is_zero, parse};
use transverse_blowup::uniqueness::compare_constructions;
use transverse_blowup::{Env, Expr, ZeroTestConfig};

fn symbolic(c: &mut Criterion) {
    let e = parse("(* (^ (+ 1 (^ r 2)) -1/2) (sin (* 3 theta)))").unwrap();
    let t = make_tube(2, 0.1, 1.9).unwrap();
    let cfg = ZeroTestConfig::default();
    c.bench_function("differentiate", |b| {
        b.iter(|| black_box(&e).differentiate("r"))
    });
    c.bench_function("zero test 256", |b| {
        let d = e.clone() - e.clone();
        b.iter(|| is_zero(black_box(&d), t.chart.domain(), &Env::new(), &cfg).unwrap())
    });
}

fn forms(c: &mut Criterion) {
    let t = make_tube(2, 0.1, 1.9).unwrap();
    let cfg = ZeroTestConfig::default();
    c.bench_function("pullback phi_3", |b| {
        b.iter(|| phi_map(3, &t).pullback(black_box(&t.eta)).unwrap())
    });
    c.bench_function("pullback identity phi_3", |b| {
        b.iter(|| {
            let p = phi_map(3, &t).pullback(&t.eta).unwrap();
            p.sub(&t.lambda_bar(&Expr::int(3)))
                .is_zero(&Env::new(), &cfg)
                .unwrap()
        })
    });
    c.bench_function("contact check eta", |b| {
        b.iter(|| contact_check(black_box(&t.eta), &Env::new(), &cfg).unwrap())
    });
}

fn constructions(c: &mut Criterion) {
    let cfg = ZeroTestConfig::default();
    let t = make_tube(2, 0.02, R_MAX).unwrap();
    c.bench_function("profile l = 3", |b| {
        b.iter(|| build_profile(black_box(3), R_IN, R_OUT, R_MAX).unwrap())
    });
    c.bench_function("surgery blow-up l = 2", |b| {
        b.iter(|| build_surgery_blowup(2, &t, &cfg).unwrap())
    });
    c.bench_function("exact sequences |a|,|b| <= 20", |b| {
        b.iter(|| {
            let mut ok = 0;
            for x in -20..=20 {
                for y in -20..=20 {
                    if let Ok(q) = product_quotient(x, y) {
                        ok += brute_force_kernel_agrees(&q.sequence, 10) as usize;
                    }
                }
            }
            ok
        })
    });
    let mut slow = c.benchmark_group("comparison");
    slow.sample_size(10);
    slow.bench_function("compare (1, 1)", |b| {
        b.iter(|| compare_constructions(1, 1, 2, &cfg).unwrap())
    });
    slow.finish();
}

criterion_group!(benches, symbolic, forms, constructions);
criterion_main!(benches);
