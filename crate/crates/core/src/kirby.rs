//! Modular Kirby weight systems: sums of the sl(2) weights over the colors
//! 0..p−2 (all of them for sl2, the even ones for so3).

use std::fmt;

use rayon::prelude::*;

use crate::chord::{ChordDiagram, DiagramSum};
use crate::error::{Error, Result};
use crate::scalar::{even_power_sum, power_sum, psi_p, FpElem, PrimeContext, Rational};
use crate::skein::Skein;
use crate::weight::{interpolate_expansion, omega_t, PureExpansion};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Flavor {
    Sl2,
    So3,
}

impl Flavor {
    pub fn colors(self, ctx: &PrimeContext) -> Vec<usize> {
        let top = ctx.p() as usize - 2;
        match self {
            Flavor::Sl2 => (0..=top).collect(),
            Flavor::So3 => (0..=top).step_by(2).collect(),
        }
    }

    /// ε(sl2) = −1, ε(so3) = −1/2.
    pub fn epsilon(self) -> Rational {
        match self {
            Flavor::Sl2 => Rational::from(-1),
            Flavor::So3 => Rational::new(-1, 2),
        }
    }
}

impl fmt::Display for Flavor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Flavor::Sl2 => "sl2",
            Flavor::So3 => "so3",
        })
    }
}

impl std::str::FromStr for Flavor {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sl2" => Ok(Flavor::Sl2),
            "so3" => Ok(Flavor::So3),
            _ => Err(Error::Parse(format!("unknown flavor {s}"))),
        }
    }
}

/// How the coloring sum is carried out.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Route {
    /// One contraction per coloring, summed in parallel.
    Direct,
    /// Same as `Direct`, summed sequentially.
    Sequential,
    /// Interpolated weight polynomial combined with power sums.
    Polynomial,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct KirbyValue {
    pub value: FpElem,
    pub flavor: Flavor,
}

impl fmt::Display for KirbyValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

fn colorings(flavor: Flavor, ctx: &PrimeContext, l: usize) -> Vec<Vec<usize>> {
    let colors = flavor.colors(ctx);
    let mut out = vec![Vec::new()];
    for _ in 0..l {
        out = out.into_iter().flat_map(|v| colors.iter().map(move |&c| [v.clone(), vec![c]].concat())).collect();
    }
    out
}

fn dims(lambdas: &[usize]) -> i64 {
    lambdas.iter().map(|&l| l as i64 + 1).product()
}

/// Σ over x in the color range of x^m, where x = λ + 1.
fn range_power_sum(m: u32, flavor: Flavor, ctx: &PrimeContext) -> FpElem {
    match flavor {
        Flavor::Sl2 => power_sum(m as u64, ctx),
        Flavor::So3 if m % 2 == 0 => even_power_sum(m as u64 / 2, ctx),
        Flavor::So3 => (1..ctx.p()).step_by(2).fold(ctx.elem(0), |a, x| a + ctx.elem(x as i64).pow(m as u64)),
    }
}

/// ψ_p(Σ_λ Π(λ_i+1) ω^{sl2}_λ), without any degree sign.
pub fn coloring_sum(sum: &DiagramSum, ctx: &PrimeContext, flavor: Flavor, route: Route) -> Result<FpElem> {
    if sum.is_empty() {
        return Ok(ctx.elem(0));
    }
    let exp = PureExpansion::new(sum)?;
    coloring_sum_expansion(&exp, ctx, flavor, route)
}

pub fn coloring_sum_expansion(exp: &PureExpansion, ctx: &PrimeContext, flavor: Flavor, route: Route) -> Result<FpElem> {
    let l = exp.circle_count();
    match route {
        Route::Direct | Route::Sequential => {
            let cols = colorings(flavor, ctx, l);
            let term = |lam: &Vec<usize>| -> Result<FpElem> {
                let v = exp.evaluate(lam)? * Rational::from(dims(lam));
                psi_p(&v, ctx)
            };
            let parts: Vec<FpElem> = if route == Route::Direct {
                cols.par_iter().map(term).collect::<Result<_>>()?
            } else {
                cols.iter().map(term).collect::<Result<_>>()?
            };
            Ok(parts.into_iter().fold(ctx.elem(0), |a, b| a + b))
        }
        Route::Polynomial => {
            let poly = interpolate_expansion(exp)?;
            let mut total = ctx.elem(0);
            for (e, c) in poly.terms() {
                let mut t = psi_p(c, ctx)?;
                for &k in e {
                    t = t * range_power_sum(k + 1, flavor, ctx);
                }
                total = total + t;
            }
            Ok(total)
        }
    }
}

/// ω^{(p)}(D) = Σ_λ Π(−1)^{λ_i}(λ_i+1) ω^T_λ(D) mod p, with ω^T obtained from ω^{sl2} by the sign lemma.
pub fn omega_p(sum: &DiagramSum, ctx: &PrimeContext, flavor: Flavor) -> Result<KirbyValue> {
    omega_p_route(sum, ctx, flavor, Route::Direct)
}

pub fn omega_p_route(sum: &DiagramSum, ctx: &PrimeContext, flavor: Flavor, route: Route) -> Result<KirbyValue> {
    let mut total = ctx.elem(0);
    for (d, c) in sum.iter() {
        let v = coloring_sum(&DiagramSum::single(d.clone()), ctx, flavor, route)? * psi_p(c, ctx)?;
        total = if d.degree() % 2 == 0 { total + v } else { total - v };
    }
    Ok(KirbyValue { value: total, flavor })
}

/// ω^{(p)} with ω^T evaluated through spin networks in Z/pZ; practical for small p.
pub fn omega_p_skein(sum: &DiagramSum, ctx: &PrimeContext, flavor: Flavor) -> Result<KirbyValue> {
    let skein = Skein::new(ctx.clone(), ctx.p() as usize - 2)?;
    let mut total = ctx.elem(0);
    for (d, c) in sum.iter() {
        let cols = colorings(flavor, ctx, d.circle_count());
        let parts: Vec<FpElem> = cols
            .par_iter()
            .map(|lam| -> Result<FpElem> {
                let sign: i64 = lam.iter().map(|&l| if l % 2 == 0 { 1 } else { -1 }).product();
                Ok(omega_t(d, lam, &skein)? * ctx.elem(sign * dims(lam)))
            })
            .collect::<Result<_>>()?;
        let v = parts.into_iter().fold(ctx.elem(0), |a, b| a + b);
        total = total + v * psi_p(c, ctx)?;
    }
    Ok(KirbyValue { value: total, flavor })
}

/// Σ over subsets S of the legs on `donor` of D with S moved, in order, to the start of `receiver`.
pub fn handle_slide(d: &ChordDiagram, donor: usize, receiver: usize) -> Result<DiagramSum> {
    if donor == receiver || donor >= d.circle_count() || receiver >= d.circle_count() {
        return Err(Error::OutOfRange(format!("donor {donor}, receiver {receiver}")));
    }
    let n = d.legs_on(donor).len();
    if n > 20 {
        return Err(Error::OutOfRange(format!("{n} legs on the donor circle")));
    }
    let mut out = DiagramSum::zero(d.circle_count());
    for mask in 0..1u64 << n {
        out.add_term(d.move_legs(donor, receiver, mask), Rational::one());
    }
    Ok(out)
}

pub fn check_kirby_pair(a: &DiagramSum, b: &DiagramSum, ctx: &PrimeContext, flavor: Flavor) -> Result<bool> {
    Ok(omega_p(a, ctx, flavor)? == omega_p(b, ctx, flavor)?)
}

/// ω^{(p)}(D) = (−1)^{n_i} ω^{(p)}(D with circle i reversed).
pub fn orientation_reversal_check(d: &ChordDiagram, circle: usize, ctx: &PrimeContext, flavor: Flavor) -> Result<bool> {
    let a = omega_p(&DiagramSum::single(d.clone()), ctx, flavor)?.value;
    let b = omega_p(&DiagramSum::single(d.reverse_circle(circle)), ctx, flavor)?.value;
    Ok(if d.legs_on(circle).len() % 2 == 0 { a == b } else { a == -b })
}

/// ω^{(p)}_{sl2}(D) = 2^L ω^{(p)}_{so3}(D) when every circle carries at most 2N_p + 1 legs.
pub fn so3_sl2_relation_check(d: &ChordDiagram, ctx: &PrimeContext) -> Result<bool> {
    let bound = 2 * ctx.n_p() + 1;
    for (component, &legs) in d.leg_counts().iter().enumerate() {
        if legs > bound {
            return Err(Error::LegCountTooLarge { component, legs, bound });
        }
    }
    let s = DiagramSum::single(d.clone());
    let sl2 = omega_p(&s, ctx, Flavor::Sl2)?.value;
    let so3 = omega_p(&s, ctx, Flavor::So3)?.value;
    Ok(sl2 == so3 * ctx.elem(2).pow(d.circle_count() as u64))
}

/// ω^{(p)}(D) = ω^{(p)}(φ_{N_p}(D)).
pub fn phi_stability_check(d: &ChordDiagram, ctx: &PrimeContext, flavor: Flavor) -> Result<bool> {
    let s = DiagramSum::single(d.clone());
    Ok(omega_p(&s, ctx, flavor)? == omega_p(&s.phi(ctx.n_p()), ctx, flavor)?)
}
