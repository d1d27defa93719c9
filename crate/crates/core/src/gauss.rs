//! Formal Gaussian integration over the color variables, the shift identity,
//! and comparison of modular sequences against rational limits.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::scalar::{PrimeContext, Rational};
use crate::series::{exp_linear, reduce_series, AlphaPoly, FpSeries, HbarSeries};

/// A Laurent polynomial in ħ, as degree → coefficient.
pub type Laurent = BTreeMap<i64, Rational>;

fn check_framings(framings: &[i64]) -> Result<()> {
    if framings.iter().any(|&f| f == 0) {
        return Err(Error::ZeroFraming);
    }
    Ok(())
}

/// Image of Π α_i^{k_i}: (−1/f_i)^{k_i/2} k_i!/(k_i/2)! times ħ^{−Σk_i/2}, or zero if some k_i is odd.
fn monomial_integral(exps: &[u32], framings: &[i64]) -> Option<(i64, Rational)> {
    let mut c = Rational::one();
    let mut shift = 0i64;
    for (&k, &f) in exps.iter().zip(framings) {
        if k % 2 == 1 {
            return None;
        }
        let h = k / 2;
        c = c * Rational::new(-1, f).pow(h as i32) * Rational::factorial(k as u64) / Rational::factorial(h as u64);
        shift -= h as i64;
    }
    Some((shift, c))
}

/// Apply the integration rule to every term, allowing negative powers of ħ.
pub fn integrate_laurent(p: &HbarSeries, framings: &[i64]) -> Result<Laurent> {
    check_framings(framings)?;
    if framings.len() != p.arity() {
        return Err(Error::ArityMismatch(p.arity(), framings.len()));
    }
    let mut out = Laurent::new();
    for (n, poly) in p.coeffs().iter().enumerate() {
        for (e, c) in poly.terms() {
            if let Some((shift, k)) = monomial_integral(e, framings) {
                let deg = n as i64 + shift;
                let v = out.entry(deg).or_insert_with(Rational::zero);
                *v += &(c * &k);
            }
        }
    }
    out.retain(|_, v| !v.is_zero());
    Ok(out)
}

fn laurent_to_series(l: &Laurent, out_order: usize) -> Result<HbarSeries> {
    if let Some((&d, _)) = l.iter().find(|(&d, _)| d < 0) {
        return Err(Error::NegativeDegreeResidue(d));
    }
    let coeffs = (0..=out_order).map(|n| l.get(&(n as i64)).cloned().unwrap_or_else(Rational::zero)).collect();
    Ok(HbarSeries::from_rationals(coeffs))
}

/// I_{f,ħ}(P) truncated at `out_order`. Fails if a negative power of ħ survives.
pub fn formal_integrate(p: &HbarSeries, framings: &[i64], out_order: usize) -> Result<HbarSeries> {
    laurent_to_series(&integrate_laurent(p, framings)?, out_order)
}

/// I(ħ^k P) with the ħ^k applied before the negativity check.
pub fn formal_integrate_shifted(p: &HbarSeries, framings: &[i64], k: usize, out_order: usize) -> Result<HbarSeries> {
    let l: Laurent = integrate_laurent(p, framings)?.into_iter().map(|(d, c)| (d + k as i64, c)).collect();
    laurent_to_series(&l, out_order)
}

/// Both sides of I(e^{qħα} P(α)) = e^{−q²ħ/f} I(P(α − 2q/f)) through ħ^order.
pub fn gaussian_shift_sides(q: &Rational, f: i64, p: &AlphaPoly, order: usize) -> Result<(Laurent, Laurent)> {
    check_framings(&[f])?;
    if p.arity() != 1 {
        return Err(Error::ArityMismatch(1, p.arity()));
    }
    let deg = p.degree_in(0).unwrap_or(0) as usize;
    let top = 2 * order + deg;
    let mut lhs_coeffs = Vec::with_capacity(top + 1);
    let mut qk = Rational::one();
    for k in 0..=top {
        if k > 0 {
            qk = qk * q / Rational::from(k as i64);
        }
        lhs_coeffs.push(AlphaPoly::monomial(vec![k as u32], qk.clone()).mul(p)?);
    }
    let lhs = integrate_laurent(&HbarSeries::from_coeffs(1, lhs_coeffs)?, &[f])?;
    let shifted = p.shift(&[-Rational::new(2, 1) * q / Rational::from(f)])?;
    let base = integrate_laurent(&HbarSeries::constant(shifted, 0), &[f])?;
    let low = base.keys().next().copied().unwrap_or(0);
    let g = exp_linear(&(-(q * q) / Rational::from(f)), (order as i64 - low).max(0) as usize);
    let mut rhs = Laurent::new();
    for (&d, c) in &base {
        for n in 0..=g.order() {
            let v = rhs.entry(d + n as i64).or_insert_with(Rational::zero);
            *v += &(c * &g.scalar_coeff(n));
        }
    }
    let cut = |l: Laurent| -> Laurent { l.into_iter().filter(|(d, c)| *d <= order as i64 && !c.is_zero()).collect() };
    Ok((cut(lhs), cut(rhs)))
}

pub fn gaussian_shift_check(q: &Rational, f: i64, p: &AlphaPoly, order: usize) -> Result<bool> {
    let (l, r) = gaussian_shift_sides(q, f, p, order)?;
    Ok(l == r)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FermatStatus {
    Pass,
    /// First ħ-degree where the reduction disagrees.
    Fail(usize),
    /// The limit does not reduce modulo this prime.
    Excluded,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FermatReport {
    pub rows: Vec<(u64, FermatStatus)>,
}

impl FermatReport {
    pub fn all_pass(&self) -> bool {
        self.rows.iter().all(|(_, s)| !matches!(s, FermatStatus::Fail(_)))
    }

    /// Every prime above this value passed.
    pub fn threshold(&self) -> u64 {
        self.rows.iter().filter(|(_, s)| *s != FermatStatus::Pass).map(|(p, _)| *p).max().unwrap_or(0)
    }
}

impl fmt::Display for FermatReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (p, s) in &self.rows {
            match s {
                FermatStatus::Pass => writeln!(f, "p={p} PASS")?,
                FermatStatus::Fail(d) => writeln!(f, "p={p} FAIL at hbar^{d}")?,
                FermatStatus::Excluded => writeln!(f, "p={p} EXCLUDED")?,
            }
        }
        writeln!(f, "threshold {}", self.threshold())
    }
}

/// Compare each modular series with the reduction of the limit up to its order.
pub fn fermat_compare(seq: &[FpSeries], limit: &HbarSeries) -> Result<FermatReport> {
    let mut rows = Vec::new();
    for s in seq {
        let ctx = PrimeContext::new(s.p())?;
        let status = match reduce_series(&limit.truncate(s.order().min(limit.order())), &ctx) {
            Err(Error::DenominatorDivisibleByP { .. }) => FermatStatus::Excluded,
            Err(e) => return Err(e),
            Ok(r) => {
                if r.order() < s.order() {
                    return Err(Error::DegreeShortfall { have: r.order(), need: s.order() });
                }
                match (0..=s.order()).find(|&n| r.coeffs()[n] != s.coeffs()[n]) {
                    Some(n) => FermatStatus::Fail(n),
                    None => FermatStatus::Pass,
                }
            }
        };
        rows.push((s.p(), status));
    }
    rows.sort_by_key(|(p, _)| *p);
    Ok(FermatReport { rows })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn alpha_sq_hbar_sq() -> HbarSeries {
        HbarSeries::monomial(AlphaPoly::monomial(vec![2], Rational::one()), 2, 2)
    }

    #[test]
    fn monomial_rule() {
        assert_eq!(formal_integrate(&HbarSeries::one(1, 3), &[3], 3).unwrap(), HbarSeries::scalar(Rational::one(), 3));
        for f in [1i64, -1, 2, 3] {
            let r = formal_integrate(&alpha_sq_hbar_sq(), &[f], 2).unwrap();
            assert_eq!(r.scalar_coeff(1), Rational::new(-2, f));
            assert_eq!(r.scalar_coeff(0), Rational::zero());
        }
        let odd = HbarSeries::constant(AlphaPoly::var(1, 0), 2);
        assert!(formal_integrate(&odd, &[1], 2).unwrap().is_zero());
        assert_eq!(formal_integrate(&odd, &[0], 2), Err(Error::ZeroFraming));
        let bare = HbarSeries::constant(AlphaPoly::monomial(vec![2], Rational::one()), 2);
        assert_eq!(formal_integrate(&bare, &[1], 2), Err(Error::NegativeDegreeResidue(-1)));
    }

    #[test]
    fn shift_examples() {
        let one = AlphaPoly::one(1);
        let (l, _) = gaussian_shift_sides(&Rational::new(1, 2), 1, &one, 3).unwrap();
        let e = exp_linear(&Rational::new(-1, 4), 3);
        for n in 0..=3 {
            assert_eq!(l.get(&(n as i64)).cloned().unwrap_or_else(Rational::zero), e.scalar_coeff(n));
        }
        let a = AlphaPoly::var(1, 0);
        let (l, r) = gaussian_shift_sides(&Rational::zero(), 2, &a, 4).unwrap();
        assert!(l.is_empty() && r.is_empty());
        assert!(gaussian_shift_check(&Rational::new(3, 5), -2, &a.pow(2), 8).unwrap());
    }

    #[test]
    fn fermat_constant() {
        let limit = HbarSeries::scalar(Rational::new(3, 4), 0);
        let seq: Vec<FpSeries> = [5u64, 7, 11]
            .iter()
            .map(|&p| {
                let ctx = PrimeContext::new(p).unwrap();
                reduce_series(&limit, &ctx).unwrap()
            })
            .collect();
        let rep = fermat_compare(&seq, &limit).unwrap();
        assert!(rep.all_pass());
        assert_eq!(rep.threshold(), 0);
    }
}
