use criterion::{black_box, criterion_group, criterion_main, Criterion};
use sl2kirby::gauss::formal_integrate;
use sl2kirby::invariants::{f_asymptotic, strong_fermat_case, LinkPresentation};
use sl2kirby::kirby::{omega_p_route, Flavor, Route};
use sl2kirby::weight::{omega_sl2, omega_t, weight_polynomial};
use sl2kirby::{AlphaPoly, ChordDiagram, DiagramSum, HbarSeries, PrimeContext, Rational, Skein};
use sl2kirby_bench::diagrams;

fn skein(c: &mut Criterion) {
    c.bench_function("jones_wenzl_8", |b| b.iter(|| Skein::rational(black_box(8))));
    let s = Skein::rational(6);
    c.bench_function("theta_pairing_6_6_6", |b| b.iter(|| s.theta_pairing(6, 6, 6).unwrap()));
}

fn weights(c: &mut Criterion) {
    let ds = diagrams(3);
    c.bench_function("omega_sl2_degree3", |b| {
        b.iter(|| ds.iter().map(|d| omega_sl2(d, &vec![3; d.circle_count()]).unwrap()).count())
    });
    let sk = Skein::rational(3);
    let d = ChordDiagram::from_chords(&[vec![1, 2, 3, 1, 2, 3]]).unwrap();
    c.bench_function("omega_t_k33", |b| b.iter(|| omega_t(&d, &[3], &sk).unwrap()));
    c.bench_function("weight_polynomial_degree3", |b| b.iter(|| ds.iter().map(|d| weight_polynomial(d).unwrap()).count()));
}

fn kirby(c: &mut Criterion) {
    let ctx = PrimeContext::new(11).unwrap();
    let d = DiagramSum::single(ChordDiagram::from_chords(&[vec![1, 2, 3, 4], vec![1, 2, 3, 4]]).unwrap());
    for (name, route) in [("direct", Route::Direct), ("sequential", Route::Sequential), ("polynomial", Route::Polynomial)] {
        c.bench_function(&format!("omega_p_11_{name}"), |b| b.iter(|| omega_p_route(&d, &ctx, Flavor::Sl2, route).unwrap()));
    }
}

fn series(c: &mut Criterion) {
    let coeffs = (0..=20).map(|k| AlphaPoly::monomial(vec![k], Rational::factorial(k as u64).recip())).collect();
    let s = HbarSeries::from_coeffs(1, coeffs).unwrap();
    c.bench_function("formal_integrate_order10", |b| b.iter(|| formal_integrate(&s, &[3], 10).unwrap()));
    c.bench_function("f_unknot_order10", |b| b.iter(|| f_asymptotic(&LinkPresentation::unknot(black_box(2)), 10).unwrap()));
    let theta = ChordDiagram::theta_power(0, 1, 1);
    c.bench_function("strong_fermat_theta", |b| b.iter(|| strong_fermat_case(&theta, &[2], &[7, 11, 13], Flavor::Sl2).unwrap()));
}

criterion_group!(benches, skein, weights, kirby, series);
criterion_main!(benches);
