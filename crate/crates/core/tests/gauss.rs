use proptest::prelude::*;
use sl2kirby::gauss::{fermat_compare, formal_integrate, gaussian_shift_check, integrate_laurent, FermatStatus, Laurent};
use sl2kirby::scalar::psi_p;
use sl2kirby::series::{exp_linear, reduce_series};
use sl2kirby::{AlphaPoly, Error, FpSeries, HbarSeries, PrimeContext, Rational};

fn laurent_product(a: &Laurent, b: &Laurent) -> Laurent {
    let mut out = Laurent::new();
    for (da, ca) in a {
        for (db, cb) in b {
            let v = out.entry(da + db).or_insert_with(Rational::zero);
            *v += &(ca * cb);
        }
    }
    out.retain(|_, v| !v.is_zero());
    out
}

fn poly1(coeffs: &[i64]) -> AlphaPoly {
    let mut p = AlphaPoly::zero(1);
    for (k, &c) in coeffs.iter().enumerate() {
        p.add_term(vec![k as u32], Rational::from(c));
    }
    p
}

#[test]
fn exponential_by_monomials() {
    // I(e^{qħα}) = Σ_k q^{2k} ħ^{2k} I(α^{2k})/(2k)! = e^{−q²ħ/f}
    for (q, f) in [(Rational::new(1, 2), 1i64), (Rational::new(2, 3), -2), (Rational::from(1), 3)] {
        let order = 6;
        let coeffs: Vec<AlphaPoly> = (0..=2 * order)
            .map(|k| AlphaPoly::monomial(vec![k as u32], q.pow(k as i32) / Rational::factorial(k as u64)))
            .collect();
        let s = HbarSeries::from_coeffs(1, coeffs).unwrap();
        let got = formal_integrate(&s, &[f], order).unwrap();
        assert_eq!(got, exp_linear(&(-(&q * &q) / Rational::from(f)), order));
    }
}

#[test]
fn hbar_alpha_squared() {
    for f in [1i64, -1, 2, 3, -5] {
        let s = HbarSeries::monomial(AlphaPoly::monomial(vec![2], Rational::one()), 2, 3);
        let r = formal_integrate(&s, &[f], 3).unwrap();
        assert_eq!(r, HbarSeries::from_rationals(vec![Rational::zero(), Rational::new(-2, f), Rational::zero(), Rational::zero()]));
    }
}

#[test]
fn two_components_factor() {
    let a = poly1(&[1, 0, 3, 0, -2]);
    let b = poly1(&[0, 0, 5, 0, 0, 0, 1]);
    let ab = a.compose(&[AlphaPoly::var(2, 0)]).unwrap().mul(&b.compose(&[AlphaPoly::var(2, 1)]).unwrap()).unwrap();
    let joint = integrate_laurent(&HbarSeries::constant(ab, 0), &[2, -3]).unwrap();
    let la = integrate_laurent(&HbarSeries::constant(a, 0), &[2]).unwrap();
    let lb = integrate_laurent(&HbarSeries::constant(b, 0), &[-3]).unwrap();
    assert_eq!(joint, laurent_product(&la, &lb));
}

#[test]
fn fermat_reports() {
    let limit = HbarSeries::from_rationals(vec![Rational::new(1, 7), Rational::from(2), Rational::new(3, 4)]);
    let mut seq = Vec::new();
    for p in [5u64, 7, 11] {
        let ctx = PrimeContext::new(p).unwrap();
        let coeffs: Vec<_> = (0..=ctx.n_p().min(2))
            .map(|n| psi_p(&limit.scalar_coeff(n), &ctx).unwrap_or_else(|_| ctx.elem(0)))
            .collect();
        seq.push(FpSeries::new(&ctx, coeffs).unwrap());
    }
    let ctx13 = PrimeContext::new(13).unwrap();
    let mut bad = reduce_series(&limit, &ctx13).unwrap().coeffs().to_vec();
    bad[1] = bad[1] + ctx13.elem(1);
    seq.push(FpSeries::new(&ctx13, bad).unwrap());
    let rep = fermat_compare(&seq, &limit).unwrap();
    assert_eq!(
        rep.rows,
        vec![(5, FermatStatus::Pass), (7, FermatStatus::Excluded), (11, FermatStatus::Pass), (13, FermatStatus::Fail(1))]
    );
    assert!(!rep.all_pass());
    assert_eq!(rep.threshold(), 13);
}

#[test]
fn errors() {
    let s = HbarSeries::one(1, 2);
    assert_eq!(formal_integrate(&s, &[0], 2), Err(Error::ZeroFraming));
    let bare = HbarSeries::constant(AlphaPoly::monomial(vec![4], Rational::one()), 1);
    assert_eq!(formal_integrate(&bare, &[1], 1), Err(Error::NegativeDegreeResidue(-2)));
}

fn small_rational() -> impl Strategy<Value = Rational> {
    (-6i64..=6, 1i64..=5).prop_map(|(n, d)| Rational::new(n, d))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn shift_identity(q in small_rational(), fi in 0usize..5, cs in prop::collection::vec(-4i64..=4, 1..5)) {
        let f = [1i64, -1, 2, -2, 3][fi];
        prop_assert!(gaussian_shift_check(&q, f, &poly1(&cs), 8).unwrap());
    }

    #[test]
    fn odd_series_vanish(cs in prop::collection::vec(-4i64..=4, 1..6), f in 1i64..4) {
        let mut p = AlphaPoly::zero(1);
        for (k, &c) in cs.iter().enumerate() {
            p.add_term(vec![2 * k as u32 + 1], Rational::from(c));
        }
        let s = HbarSeries::monomial(p, 2 * cs.len(), 2 * cs.len());
        prop_assert!(integrate_laurent(&s, &[f]).unwrap().is_empty());
    }

    #[test]
    fn linear(a in prop::collection::vec(-4i64..=4, 1..5), b in prop::collection::vec(-4i64..=4, 1..5), f in 1i64..4) {
        let pa = HbarSeries::monomial(poly1(&a), 4, 4);
        let pb = HbarSeries::monomial(poly1(&b), 4, 4);
        let sum = integrate_laurent(&pa.add(&pb).unwrap(), &[f]).unwrap();
        let mut sep = integrate_laurent(&pa, &[f]).unwrap();
        for (d, c) in integrate_laurent(&pb, &[f]).unwrap() {
            let v = sep.entry(d).or_insert_with(Rational::zero);
            *v += &c;
        }
        sep.retain(|_, v| !v.is_zero());
        prop_assert_eq!(sum, sep);
    }
}
