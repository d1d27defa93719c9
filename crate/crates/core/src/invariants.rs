//! The asymptotic invariant F and its normalization O, the modular sequences F^p,
//! and the strong Fermat limit comparison.

use std::fmt;

use rayon::prelude::*;

use crate::chord::{ChordDiagram, DiagramSeries, DiagramSum};
use crate::error::{Error, Result};
use crate::gauss::{fermat_compare, integrate_laurent, FermatReport, Laurent};
use crate::kirby::{coloring_sum, Flavor, Route};
use crate::scalar::{legendre, psi_p, PrimeContext, Rational};
use crate::series::{exp_linear, sinh_ratio, sinh_ratio_poly, substitute_alpha, AlphaPoly, AlphaSubstitution, FpSeries, HbarSeries};
use crate::weight::extract_weight_polynomial;

pub type OhtsukiSeries = HbarSeries;

/// A framed link with diagonal linking matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinkPresentation {
    pub framings: Vec<i64>,
    /// `None` for a disjoint union of unknots; otherwise Ž of the zero-framed link.
    pub payload: Option<DiagramSeries>,
}

impl LinkPresentation {
    pub fn unknot(f: i64) -> Self {
        LinkPresentation { framings: vec![f], payload: None }
    }

    pub fn unknots(framings: &[i64]) -> Self {
        LinkPresentation { framings: framings.to_vec(), payload: None }
    }

    pub fn series(payload: DiagramSeries, framings: &[i64]) -> Result<Self> {
        if payload.circle_count() != framings.len() {
            return Err(Error::SizeMismatch(format!(
                "{} framings for {} circles",
                framings.len(),
                payload.circle_count()
            )));
        }
        Ok(LinkPresentation { framings: framings.to_vec(), payload: Some(payload) })
    }

    pub fn components(&self) -> usize {
        self.framings.len()
    }

    pub fn sigma_plus(&self) -> usize {
        self.framings.iter().filter(|&&f| f > 0).count()
    }

    pub fn sigma_minus(&self) -> usize {
        self.framings.iter().filter(|&&f| f < 0).count()
    }

    /// Parse `unknot f=2`, `union(a, b, …)` or `series PATH f=1,-1`; `load` reads series files.
    pub fn parse(spec: &str, load: &mut dyn FnMut(&str) -> Result<String>) -> Result<Self> {
        let s = spec.trim();
        if let Some(inner) = s.strip_prefix("union(").and_then(|r| r.strip_suffix(')')) {
            let mut framings = Vec::new();
            for part in split_top_level(inner)? {
                let sub = LinkPresentation::parse(part, load)?;
                if sub.payload.is_some() {
                    return Err(Error::Parse("union accepts unknots only".into()));
                }
                framings.extend(sub.framings);
            }
            if framings.is_empty() {
                return Err(Error::Parse("empty union".into()));
            }
            return Ok(LinkPresentation::unknots(&framings));
        }
        let toks: Vec<&str> = s.split_whitespace().collect();
        match toks.as_slice() {
            ["unknot", f] => {
                let fs = parse_framings(f)?;
                if fs.len() != 1 {
                    return Err(Error::Parse("an unknot takes one framing".into()));
                }
                Ok(LinkPresentation::unknot(fs[0]))
            }
            ["series", path, f] => {
                let payload = DiagramSeries::parse(&load(path)?)?;
                LinkPresentation::series(payload, &parse_framings(f)?)
            }
            _ => Err(Error::Parse(format!("unrecognized link spec {s:?}"))),
        }
    }
}

impl fmt::Display for LinkPresentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let fr: Vec<String> = self.framings.iter().map(|x| x.to_string()).collect();
        match &self.payload {
            None if self.framings.len() == 1 => write!(f, "unknot f={}", fr[0]),
            None => write!(f, "union({})", fr.iter().map(|x| format!("unknot f={x}")).collect::<Vec<_>>().join(", ")),
            Some(_) => write!(f, "series f={}", fr.join(",")),
        }
    }
}

fn split_top_level(s: &str) -> Result<Vec<&str>> {
    let mut parts = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, ch) in s.char_indices() {
        match ch {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => {
                parts.push(s[start..i].trim());
                start = i + 1;
            }
            _ => {}
        }
        if depth < 0 {
            return Err(Error::Parse("unbalanced parentheses".into()));
        }
    }
    if depth != 0 {
        return Err(Error::Parse("unbalanced parentheses".into()));
    }
    let last = s[start..].trim();
    if !last.is_empty() {
        parts.push(last);
    }
    Ok(parts)
}

fn parse_framings(tok: &str) -> Result<Vec<i64>> {
    let body = tok.strip_prefix("f=").ok_or_else(|| Error::Parse(format!("expected f=…, got {tok:?}")))?;
    let fs = body
        .split(',')
        .map(|x| x.trim().parse::<i64>().map_err(|_| Error::Parse(format!("bad framing {x:?}"))))
        .collect::<Result<Vec<_>>>()?;
    if fs.contains(&0) {
        return Err(Error::ZeroFraming);
    }
    Ok(fs)
}

/// (e^{ħα/2} − e^{−ħα/2}) / (e^{ħ/2} − e^{−ħ/2}) in one variable.
pub fn colored_jones_unknot(order: usize) -> HbarSeries {
    sinh_ratio_poly(&AlphaPoly::var(1, 0), order)
}

/// −2ħ / (e^{ħ/2} − e^{−ħ/2}).
fn global_prefactor(order: usize) -> HbarSeries {
    let diff = exp_linear(&Rational::new(1, 2), order + 1).sub(&exp_linear(&Rational::new(-1, 2), order + 1)).unwrap();
    let over_hbar = HbarSeries::from_rationals((1..=order + 1).map(|n| diff.scalar_coeff(n)).collect());
    HbarSeries::scalar(Rational::from(-2), order).div(&over_hbar).unwrap()
}

fn laurent_to_series(l: &Laurent, order: usize) -> Result<HbarSeries> {
    if let Some((&d, _)) = l.iter().find(|(&d, c)| d < 0 && !c.is_zero()) {
        return Err(Error::NegativeDegreeResidue(d));
    }
    Ok(HbarSeries::from_rationals((0..=order).map(|n| l.get(&(n as i64)).cloned().unwrap_or_else(Rational::zero)).collect()))
}

fn shift_laurent(l: Laurent, k: i64) -> Laurent {
    l.into_iter().map(|(d, c)| (d + k, c)).collect()
}

fn check_framings(framings: &[i64]) -> Result<()> {
    if framings.is_empty() || framings.contains(&0) {
        return Err(Error::ZeroFraming);
    }
    Ok(())
}

/// I_f(J_{α+1/f}) for a disjoint union of unknots, by substitution and integration.
pub fn integrated_jones(framings: &[i64], order: usize) -> Result<HbarSeries> {
    check_framings(framings)?;
    let l = framings.len();
    let input = 2 * order + l;
    let mut j = HbarSeries::one(l, input);
    for i in 0..l {
        j = j.mul(&sinh_ratio_poly(&AlphaPoly::var(l, i), input))?;
    }
    let shifts = framings.iter().map(|&f| Rational::new(1, f)).collect();
    let shifted = substitute_alpha(&j, &AlphaSubstitution::Shifts(shifts))?;
    laurent_to_series(&integrate_laurent(&shifted, framings)?, order)
}

/// Π e^{−ħ f_i/4} ħ^{|L|} I_f(Π α_i ω̃(payload)).
pub fn fer_route(payload: &DiagramSeries, framings: &[i64], order: usize) -> Result<HbarSeries> {
    check_framings(framings)?;
    let l = framings.len();
    let mut total = Laurent::new();
    let dims = (0..l).fold(AlphaPoly::one(l), |a, i| a.mul(&AlphaPoly::var(l, i)).unwrap());
    for (m, sum) in payload.coeffs().iter().enumerate() {
        if sum.is_empty() {
            continue;
        }
        let w = extract_weight_polynomial(sum)?.mul(&dims)?;
        let lau = integrate_laurent(&HbarSeries::constant(w, 0), framings)?;
        for (d, c) in shift_laurent(lau, (m + l) as i64) {
            let v = total.entry(d).or_insert_with(Rational::zero);
            *v += &c;
        }
    }
    let f_sum: i64 = framings.iter().sum();
    let series = laurent_to_series(&total, order)?;
    series.mul(&exp_linear(&Rational::new(-f_sum, 4), order))
}

/// F(L) through ħ^order.
pub fn f_asymptotic(link: &LinkPresentation, order: usize) -> Result<OhtsukiSeries> {
    check_framings(&link.framings)?;
    match &link.payload {
        Some(p) => fer_route(p, &link.framings, order),
        None => {
            let mut exponent = Rational::zero();
            for &f in &link.framings {
                exponent = exponent + Rational::from(f) + Rational::new(1, f);
            }
            let e = exp_linear(&(-exponent / Rational::from(4)), order);
            let pre = global_prefactor(order).pow(link.components() as u32);
            pre.mul(&e)?.mul(&integrated_jones(&link.framings, order)?)
        }
    }
}

/// ∓2ħ/(e^{ħ/2} − e^{−ħ/2}) e^{∓3ħ/4}.
pub fn f_unknot_closed_form(positive: bool, order: usize) -> OhtsukiSeries {
    let s: i64 = if positive { 1 } else { -1 };
    global_prefactor(order).scale(&Rational::from(s)).mul(&exp_linear(&Rational::new(-3 * s, 4), order)).unwrap()
}

/// F(L) / (F(U+)^{σ+} F(U−)^{σ−}).
pub fn o_asymptotic(link: &LinkPresentation, order: usize) -> Result<OhtsukiSeries> {
    let f = f_asymptotic(link, order)?;
    let up = f_asymptotic(&LinkPresentation::unknot(1), order)?;
    let um = f_asymptotic(&LinkPresentation::unknot(-1), order)?;
    let den = up.pow(link.sigma_plus() as u32).mul(&um.pow(link.sigma_minus() as u32))?;
    f.div(&den)
}

/// e^{−(ħ/4)(n + 2/n − 3 sgn n)} sinh(ħ/(2|n|))/sinh(ħ/2).
pub fn lens_closed_form(n: i64, order: usize) -> Result<OhtsukiSeries> {
    if n == 0 {
        return Err(Error::ZeroFraming);
    }
    let c = -(Rational::from(n) + Rational::new(2, n) - Rational::from(3 * n.signum())) / Rational::from(4);
    exp_linear(&c, order).mul(&sinh_ratio(&Rational::new(1, n.abs()), order))
}

/// ((N_p+1)!/ε)^{|L|} / Π(f_i/p), in Z/pZ.
fn modular_normalization(framings: &[i64], ctx: &PrimeContext, flavor: Flavor) -> Result<crate::scalar::FpElem> {
    let base = Rational::factorial(ctx.n_p() as u64 + 1) / flavor.epsilon();
    let mut v = psi_p(&base.pow(framings.len() as i32), ctx)?;
    for &f in framings {
        match legendre(f, ctx) {
            1 => {}
            -1 => v = -v,
            _ => return Err(Error::DenominatorDivisibleByP { p: ctx.p(), degree: None }),
        }
    }
    Ok(v)
}

/// A θ-power payload for split unknots: on each circle, ω̃ = sinh²(ħα/2)/(α sinh²(ħ/2)).
pub fn unknot_payload(components: usize, order: usize) -> DiagramSeries {
    let s = sinh_ratio_poly(&AlphaPoly::var(1, 0), order);
    let sq = s.mul(&s).unwrap();
    let mut out = DiagramSeries::one(components, order);
    for i in 0..components {
        let mut one = DiagramSeries::new(components, order);
        for m in 0..=order {
            // c α^{2k+2} ↦ c (1+2t)^k, then t^l ↦ θ^l
            for (e, c) in sq.coeff(m).terms() {
                let k = (e[0] / 2 - 1) as usize;
                for l in 0..=k {
                    let binom = Rational::factorial(k as u64) / (Rational::factorial(l as u64) * Rational::factorial((k - l) as u64));
                    one.add_term(m, ChordDiagram::theta_power(i, l, components), c * &binom * Rational::from(2).pow(l as i32));
                }
            }
        }
        out = out.multiply(&one).unwrap();
    }
    out
}

/// F^p(L): the normalized modular sums of Π e^{ħ f_i θ_i/2} · payload at degrees N_p|L| + m, m ≤ N_p.
pub fn f_p_modular(link: &LinkPresentation, ctx: &PrimeContext, flavor: Flavor) -> Result<FpSeries> {
    check_framings(&link.framings)?;
    let n = ctx.n_p();
    let l = link.components();
    let need = n * (l + 1);
    let payload = match &link.payload {
        Some(p) => p.clone(),
        None => unknot_payload(l, need),
    };
    if payload.order() < need {
        return Err(Error::DegreeShortfall { have: payload.order(), need });
    }
    let z = DiagramSeries::framing_exponential(&link.framings, need).multiply(&payload.truncate(need))?;
    let norm = modular_normalization(&link.framings, ctx, flavor)?;
    let coeffs = (0..=n)
        .into_par_iter()
        .map(|m| -> Result<_> {
            let s = z.coeff(n * l + m).phi(n);
            let v = coloring_sum(&s, ctx, flavor, Route::Sequential).map_err(|e| match e {
                Error::DenominatorDivisibleByP { p, .. } => Error::DenominatorDivisibleByP { p, degree: Some(m) },
                e => e,
            })?;
            Ok(v * norm)
        })
        .collect::<Result<Vec<_>>>()?;
    FpSeries::new(ctx, coeffs)
}

/// The payload ħ^{d°(D)} D as a series of the given order.
pub fn graded_payload(d: &ChordDiagram, order: usize) -> DiagramSeries {
    let mut s = DiagramSeries::new(d.circle_count(), order.max(d.degree()));
    s.add_term(d.degree(), d.clone(), Rational::one());
    s
}

/// Π e^{−ħ f_i/4} ħ^{|L|} I_f(Π α_i ω̃(ħ^{d°} D)).
pub fn strong_fermat_limit(d: &ChordDiagram, framings: &[i64], order: usize) -> Result<OhtsukiSeries> {
    if framings.len() != d.circle_count() {
        return Err(Error::SizeMismatch(format!("{} framings for {} circles", framings.len(), d.circle_count())));
    }
    fer_route(&graded_payload(d, d.degree()), framings, order)
}

#[derive(Clone, Debug)]
pub struct StrongFermatReport {
    pub flavor: Flavor,
    pub limit: OhtsukiSeries,
    pub sequence: Vec<FpSeries>,
    pub report: FermatReport,
}

impl StrongFermatReport {
    pub fn passed(&self) -> bool {
        self.report.all_pass()
    }
}

/// Compare F^p of ħ^{d°}D with the reduction of its limit for each prime.
pub fn strong_fermat_case(d: &ChordDiagram, framings: &[i64], primes: &[u64], flavor: Flavor) -> Result<StrongFermatReport> {
    let l = framings.len();
    let ctxs = primes.iter().map(|&p| PrimeContext::new(p)).collect::<Result<Vec<_>>>()?;
    let top = ctxs.iter().map(|c| c.n_p()).max().unwrap_or(0);
    let limit = strong_fermat_limit(d, framings, top)?;
    let sequence = ctxs
        .iter()
        .map(|ctx| {
            let link = LinkPresentation::series(graded_payload(d, ctx.n_p() * (l + 1)), framings)?;
            f_p_modular(&link, ctx, flavor)
        })
        .collect::<Result<Vec<_>>>()?;
    let report = fermat_compare(&sequence, &limit)?;
    Ok(StrongFermatReport { flavor, limit, sequence, report })
}

/// Lowest ħ-degree of ħ^{|L|} I(Π α_i ω̃(ħ^{d°} D)) with unit framings; `None` if it vanishes.
pub fn limit_valuation(d: &ChordDiagram) -> Result<Option<i64>> {
    let l = d.circle_count();
    let sum = DiagramSum::single(d.clone());
    let dims = (0..l).fold(AlphaPoly::one(l), |a, i| a.mul(&AlphaPoly::var(l, i)).unwrap());
    let w = extract_weight_polynomial(&sum)?.mul(&dims)?;
    let lau = integrate_laurent(&HbarSeries::constant(w, 0), &vec![1; l])?;
    Ok(lau.keys().next().map(|&k| k + (d.degree() + l) as i64))
}
