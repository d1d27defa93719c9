//! Truncated ħ-series with multivariate polynomial coefficients in the color variables α_i.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::scalar::{psi_p, FpElem, PrimeContext, Rational};

/// Exponent vector of a monomial α_1^{k_1}…α_L^{k_L}.
pub type Exponents = Vec<u32>;

/// Sparse polynomial in α_1…α_L with rational coefficients.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct AlphaPoly {
    arity: usize,
    terms: BTreeMap<Exponents, Rational>,
}

impl AlphaPoly {
    pub fn zero(arity: usize) -> Self {
        AlphaPoly { arity, terms: BTreeMap::new() }
    }

    pub fn constant(arity: usize, c: Rational) -> Self {
        let mut p = AlphaPoly::zero(arity);
        p.add_term(vec![0; arity], c);
        p
    }

    pub fn one(arity: usize) -> Self {
        AlphaPoly::constant(arity, Rational::one())
    }

    /// The variable α_i (0-based index).
    pub fn var(arity: usize, i: usize) -> Self {
        assert!(i < arity);
        let mut e = vec![0; arity];
        e[i] = 1;
        AlphaPoly::monomial(e, Rational::one())
    }

    pub fn monomial(exps: Exponents, c: Rational) -> Self {
        let mut p = AlphaPoly::zero(exps.len());
        p.add_term(exps, c);
        p
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponents, &Rational)> {
        self.terms.iter()
    }

    pub fn coeff(&self, exps: &[u32]) -> Rational {
        self.terms.get(exps).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn add_term(&mut self, exps: Exponents, c: Rational) {
        assert_eq!(exps.len(), self.arity, "exponent vector length");
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(exps);
        match entry {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    /// Constant term, if the polynomial is constant.
    pub fn as_constant(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => {
                let (e, c) = self.terms.iter().next().unwrap();
                e.iter().all(|&k| k == 0).then(|| c.clone())
            }
            _ => None,
        }
    }

    pub fn constant_term(&self) -> Rational {
        self.coeff(&vec![0; self.arity])
    }

    pub fn degree_in(&self, i: usize) -> Option<u32> {
        self.terms.keys().map(|e| e[i]).max()
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.iter().sum()).max()
    }

    fn check_arity(&self, other: &AlphaPoly) -> Result<()> {
        if self.arity != other.arity {
            return Err(Error::ArityMismatch(self.arity, other.arity));
        }
        Ok(())
    }

    pub fn add(&self, other: &AlphaPoly) -> Result<AlphaPoly> {
        self.check_arity(other)?;
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &AlphaPoly) -> Result<AlphaPoly> {
        self.add(&other.scale(&Rational::from(-1)))
    }

    pub fn scale(&self, c: &Rational) -> AlphaPoly {
        if c.is_zero() {
            return AlphaPoly::zero(self.arity);
        }
        AlphaPoly { arity: self.arity, terms: self.terms.iter().map(|(e, v)| (e.clone(), v * c)).collect() }
    }

    pub fn mul(&self, other: &AlphaPoly) -> Result<AlphaPoly> {
        self.check_arity(other)?;
        let mut out = AlphaPoly::zero(self.arity);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                let e: Exponents = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                out.add_term(e, c1 * c2);
            }
        }
        Ok(out)
    }

    pub fn pow(&self, n: u32) -> AlphaPoly {
        let mut acc = AlphaPoly::one(self.arity);
        for _ in 0..n {
            acc = acc.mul(self).unwrap();
        }
        acc
    }

    /// Substitute α_i ↦ images[i] (polynomials of a common arity).
    pub fn compose(&self, images: &[AlphaPoly]) -> Result<AlphaPoly> {
        if images.len() != self.arity {
            return Err(Error::ArityMismatch(self.arity, images.len()));
        }
        let target = images.first().map(|p| p.arity).unwrap_or(0);
        let mut out = AlphaPoly::zero(target);
        let mut powers: Vec<Vec<AlphaPoly>> = images.iter().map(|p| vec![AlphaPoly::one(p.arity)]).collect();
        for (e, c) in &self.terms {
            let mut term = AlphaPoly::constant(target, c.clone());
            for (i, &k) in e.iter().enumerate() {
                while powers[i].len() <= k as usize {
                    let next = powers[i].last().unwrap().mul(&images[i])?;
                    powers[i].push(next);
                }
                term = term.mul(&powers[i][k as usize])?;
            }
            out = out.add(&term)?;
        }
        Ok(out)
    }

    /// Affine shift α_i ↦ α_i + c_i.
    pub fn shift(&self, shifts: &[Rational]) -> Result<AlphaPoly> {
        let images: Vec<AlphaPoly> = shifts
            .iter()
            .enumerate()
            .map(|(i, c)| AlphaPoly::var(self.arity, i).add(&AlphaPoly::constant(self.arity, c.clone())).unwrap())
            .collect();
        if shifts.len() != self.arity {
            return Err(Error::ArityMismatch(self.arity, shifts.len()));
        }
        self.compose(&images)
    }

    /// Evaluate at rational values.
    pub fn eval(&self, values: &[Rational]) -> Result<Rational> {
        if values.len() != self.arity {
            return Err(Error::ArityMismatch(self.arity, values.len()));
        }
        let mut acc = Rational::zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (v, &k) in values.iter().zip(e) {
                t *= v.pow(k as i32);
            }
            acc += t;
        }
        Ok(acc)
    }

    /// Parse the textual form produced by `Display`.
    pub fn parse(s: &str, arity: usize) -> Result<AlphaPoly> {
        let s = s.trim();
        let mut out = AlphaPoly::zero(arity);
        if s == "0" || s.is_empty() {
            return Ok(out);
        }
        let normalized = s.replace(" - ", " + -");
        for term in normalized.split(" + ") {
            let term = term.trim();
            let (neg, body) = match term.strip_prefix('-') {
                Some(rest) if rest.starts_with('a') => (true, rest),
                _ => (false, term),
            };
            let mut coeff = Rational::one();
            let mut exps = vec![0u32; arity];
            for factor in body.split('*') {
                let factor = factor.trim();
                if let Some(var) = factor.strip_prefix('a') {
                    let (idx, pow) = match var.split_once('^') {
                        Some((i, k)) => (i, k.parse::<u32>().map_err(|_| Error::Parse(factor.into()))?),
                        None => (var, 1),
                    };
                    let idx: usize = if idx.is_empty() { 1 } else { idx.parse().map_err(|_| Error::Parse(factor.into()))? };
                    if idx == 0 || idx > arity {
                        return Err(Error::Parse(format!("variable {factor} outside arity {arity}")));
                    }
                    exps[idx - 1] += pow;
                } else {
                    coeff *= factor.parse::<Rational>()?;
                }
            }
            if neg {
                coeff = -coeff;
            }
            out.add_term(exps, coeff);
        }
        Ok(out)
    }
}

impl fmt::Display for AlphaPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let vars: Vec<String> = e
                .iter()
                .enumerate()
                .filter(|(_, &k)| k > 0)
                .map(|(i, &k)| if k == 1 { format!("a{}", i + 1) } else { format!("a{}^{}", i + 1, k) })
                .collect();
            if vars.is_empty() {
                write!(f, "{c}")?;
            } else {
                write!(f, "{c}*{}", vars.join("*"))?;
            }
        }
        Ok(())
    }
}

/// Truncated series Σ_{n ≤ order} ħ^n P_n(α).
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct HbarSeries {
    arity: usize,
    coeffs: Vec<AlphaPoly>,
}

impl HbarSeries {
    pub fn zero(arity: usize, order: usize) -> Self {
        HbarSeries { arity, coeffs: vec![AlphaPoly::zero(arity); order + 1] }
    }

    pub fn one(arity: usize, order: usize) -> Self {
        HbarSeries::constant(AlphaPoly::one(arity), order)
    }

    pub fn constant(p: AlphaPoly, order: usize) -> Self {
        let mut s = HbarSeries::zero(p.arity(), order);
        s.coeffs[0] = p;
        s
    }

    pub fn scalar(c: Rational, order: usize) -> Self {
        HbarSeries::constant(AlphaPoly::constant(0, c), order)
    }

    /// Series from a list of coefficients; order = len − 1.
    pub fn from_coeffs(arity: usize, coeffs: Vec<AlphaPoly>) -> Result<Self> {
        assert!(!coeffs.is_empty(), "series needs at least one coefficient");
        for c in &coeffs {
            if c.arity() != arity {
                return Err(Error::ArityMismatch(arity, c.arity()));
            }
        }
        Ok(HbarSeries { arity, coeffs })
    }

    pub fn from_rationals(coeffs: Vec<Rational>) -> Self {
        HbarSeries { arity: 0, coeffs: coeffs.into_iter().map(|c| AlphaPoly::constant(0, c)).collect() }
    }

    /// c·ħ^k·P truncated at `order`.
    pub fn monomial(p: AlphaPoly, k: usize, order: usize) -> Self {
        let mut s = HbarSeries::zero(p.arity(), order);
        if k <= order {
            s.coeffs[k] = p;
        }
        s
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, n: usize) -> &AlphaPoly {
        &self.coeffs[n]
    }

    pub fn coeffs(&self) -> &[AlphaPoly] {
        &self.coeffs
    }

    /// Scalar ħ^n coefficient of an arity-0 series.
    pub fn scalar_coeff(&self, n: usize) -> Rational {
        self.coeffs[n].as_constant().expect("series coefficient is not a constant")
    }

    pub fn truncate(&self, order: usize) -> HbarSeries {
        let order = order.min(self.order());
        HbarSeries { arity: self.arity, coeffs: self.coeffs[..=order].to_vec() }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// Smallest n with a nonzero ħ^n coefficient.
    pub fn valuation(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    fn check(&self, other: &HbarSeries) -> Result<()> {
        if self.arity != other.arity {
            return Err(Error::ArityMismatch(self.arity, other.arity));
        }
        Ok(())
    }

    pub fn add(&self, other: &HbarSeries) -> Result<HbarSeries> {
        self.check(other)?;
        let order = self.order().min(other.order());
        let coeffs = (0..=order).map(|n| self.coeffs[n].add(&other.coeffs[n])).collect::<Result<_>>()?;
        Ok(HbarSeries { arity: self.arity, coeffs })
    }

    pub fn sub(&self, other: &HbarSeries) -> Result<HbarSeries> {
        self.add(&other.scale(&Rational::from(-1)))
    }

    pub fn scale(&self, c: &Rational) -> HbarSeries {
        HbarSeries { arity: self.arity, coeffs: self.coeffs.iter().map(|p| p.scale(c)).collect() }
    }

    pub fn neg(&self) -> HbarSeries {
        self.scale(&Rational::from(-1))
    }

    pub fn mul_poly(&self, p: &AlphaPoly) -> Result<HbarSeries> {
        let coeffs = self.coeffs.iter().map(|c| c.mul(p)).collect::<Result<_>>()?;
        Ok(HbarSeries { arity: self.arity, coeffs })
    }

    /// Multiply by ħ^k keeping the order.
    pub fn shift_hbar(&self, k: usize) -> HbarSeries {
        let mut out = HbarSeries::zero(self.arity, self.order());
        for n in 0..=self.order() {
            if n + k <= self.order() {
                out.coeffs[n + k] = self.coeffs[n].clone();
            }
        }
        out
    }

    /// Truncated Cauchy product at the smaller order.
    pub fn mul(&self, other: &HbarSeries) -> Result<HbarSeries> {
        self.check(other)?;
        let order = self.order().min(other.order());
        let mut out = HbarSeries::zero(self.arity, order);
        for i in 0..=order {
            if self.coeffs[i].is_zero() {
                continue;
            }
            for j in 0..=order - i {
                if other.coeffs[j].is_zero() {
                    continue;
                }
                let t = self.coeffs[i].mul(&other.coeffs[j])?;
                out.coeffs[i + j] = out.coeffs[i + j].add(&t)?;
            }
        }
        Ok(out)
    }

    pub fn pow(&self, n: u32) -> HbarSeries {
        let mut acc = HbarSeries::one(self.arity, self.order());
        for _ in 0..n {
            acc = acc.mul(self).unwrap();
        }
        acc
    }

    /// exp of a series with vanishing ħ^0 coefficient.
    pub fn exp(&self) -> Result<HbarSeries> {
        if !self.coeffs[0].is_zero() {
            return Err(Error::NonzeroConstantTerm);
        }
        let order = self.order();
        let mut out = HbarSeries::one(self.arity, order);
        let mut term = HbarSeries::one(self.arity, order);
        for n in 1..=order {
            term = term.mul(self)?.scale(&Rational::new(1, n as i64));
            out = out.add(&term)?;
        }
        Ok(out)
    }

    /// Inverse of a unit (constant ħ^0 coefficient), by Newton iteration b ← b(2 − ab).
    pub fn inverse(&self) -> Result<HbarSeries> {
        let a0 = self.coeffs[0].as_constant().ok_or(Error::NotInvertible)?;
        if a0.is_zero() {
            return Err(Error::NotInvertible);
        }
        let order = self.order();
        let mut b = HbarSeries::constant(AlphaPoly::constant(self.arity, a0.recip()), 0);
        let mut prec = 0;
        while prec < order {
            prec = (2 * prec + 1).min(order);
            let a = self.truncate(prec);
            let b_ext = b.extend(prec);
            let ab = a.mul(&b_ext)?;
            let two = HbarSeries::constant(AlphaPoly::constant(self.arity, Rational::from(2)), prec);
            b = b_ext.mul(&two.sub(&ab)?)?;
        }
        Ok(b.extend(order))
    }

    pub fn div(&self, other: &HbarSeries) -> Result<HbarSeries> {
        self.mul(&other.inverse()?)
    }

    /// Pad with zero coefficients up to `order` (only meaningful for exact polynomials).
    pub fn extend(&self, order: usize) -> HbarSeries {
        let mut coeffs = self.coeffs.clone();
        coeffs.truncate(order + 1);
        while coeffs.len() < order + 1 {
            coeffs.push(AlphaPoly::zero(self.arity));
        }
        HbarSeries { arity: self.arity, coeffs }
    }

    /// Apply a polynomial substitution α_i ↦ images[i] to every coefficient.
    pub fn compose_alpha(&self, images: &[AlphaPoly]) -> Result<HbarSeries> {
        let arity = images.first().map(|p| p.arity()).unwrap_or(0);
        let coeffs = self.coeffs.iter().map(|c| c.compose(images)).collect::<Result<_>>()?;
        Ok(HbarSeries { arity, coeffs })
    }

    /// Textual form "hbar^n: <poly>" one line per degree.
    pub fn parse(text: &str, arity: usize) -> Result<HbarSeries> {
        let mut coeffs = Vec::new();
        for line in text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#')) {
            let (head, body) =
                line.split_once(':').ok_or_else(|| Error::Parse(format!("expected 'hbar^n: ...', got {line:?}")))?;
            let n: usize = head
                .trim()
                .strip_prefix("hbar^")
                .and_then(|k| k.parse().ok())
                .ok_or_else(|| Error::Parse(format!("bad degree label {head:?}")))?;
            if n != coeffs.len() {
                return Err(Error::Parse(format!("degree {n} out of sequence")));
            }
            coeffs.push(AlphaPoly::parse(body, arity)?);
        }
        if coeffs.is_empty() {
            return Err(Error::Parse("empty series".into()));
        }
        HbarSeries::from_coeffs(arity, coeffs)
    }
}

impl fmt::Display for HbarSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (n, c) in self.coeffs.iter().enumerate() {
            writeln!(f, "hbar^{n}: {c}")?;
        }
        Ok(())
    }
}

/// e^{c·ħ} as an arity-0 series.
pub fn exp_linear(c: &Rational, order: usize) -> HbarSeries {
    let mut coeffs = Vec::with_capacity(order + 1);
    let mut term = Rational::one();
    for n in 0..=order {
        if n > 0 {
            term = &term * c / Rational::from(n as i64);
        }
        coeffs.push(term.clone());
    }
    HbarSeries::from_rationals(coeffs)
}

/// Σ_k (uħ/2)^{2k+1}/(2k+1)! divided by ħ, i.e. sinh(uħ/2)/ħ, for polynomial u.
fn sinh_over_hbar(u: &AlphaPoly, order: usize) -> HbarSeries {
    let mut s = HbarSeries::zero(u.arity(), order);
    let half = u.scale(&Rational::new(1, 2));
    for k in 0..=order / 2 {
        let c = half.pow(2 * k as u32 + 1).scale(&Rational::factorial(2 * k as u64 + 1).recip());
        s.coeffs[2 * k] = c;
    }
    s
}

/// sinh(uħ/2)/sinh(ħ/2) for a polynomial u (a constant or a color variable).
pub fn sinh_ratio_poly(u: &AlphaPoly, order: usize) -> HbarSeries {
    let num = sinh_over_hbar(u, order);
    let den = sinh_over_hbar(&AlphaPoly::one(0), order);
    let den = HbarSeries::from_coeffs(
        u.arity(),
        den.coeffs.iter().map(|c| AlphaPoly::constant(u.arity(), c.as_constant().unwrap())).collect(),
    )
    .unwrap();
    num.div(&den).unwrap()
}

/// sinh(uħ/2)/sinh(ħ/2).
pub fn sinh_ratio(u: &Rational, order: usize) -> HbarSeries {
    sinh_ratio_poly(&AlphaPoly::constant(0, u.clone()), order)
}

/// Truncated series over Z/pZ of order at most N_p.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct FpSeries {
    p: u64,
    coeffs: Vec<FpElem>,
}

impl FpSeries {
    pub fn new(ctx: &PrimeContext, coeffs: Vec<FpElem>) -> Result<Self> {
        if coeffs.is_empty() || coeffs.len() > ctx.n_p() + 1 {
            return Err(Error::OutOfRange(format!("order {} exceeds N_p = {}", coeffs.len() as i64 - 1, ctx.n_p())));
        }
        for c in &coeffs {
            assert_eq!(c.modulus(), ctx.p(), "coefficient modulus");
        }
        Ok(FpSeries { p: ctx.p(), coeffs })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[FpElem] {
        &self.coeffs
    }
}

impl fmt::Display for FpSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (n, c) in self.coeffs.iter().enumerate() {
            writeln!(f, "hbar^{n}: {c}")?;
        }
        Ok(())
    }
}

/// Coefficientwise ψ_p of an arity-0 series, truncated at N_p.
pub fn reduce_series(a: &HbarSeries, ctx: &PrimeContext) -> Result<FpSeries> {
    if a.arity() != 0 {
        return Err(Error::ArityMismatch(0, a.arity()));
    }
    let order = a.order().min(ctx.n_p());
    let coeffs = (0..=order)
        .map(|n| {
            psi_p(&a.scalar_coeff(n), ctx).map_err(|_| Error::DenominatorDivisibleByP { p: ctx.p(), degree: Some(n) })
        })
        .collect::<Result<_>>()?;
    FpSeries::new(ctx, coeffs)
}

/// Substitute values or affine shifts for the α variables.
pub enum AlphaSubstitution {
    Values(Vec<Rational>),
    Shifts(Vec<Rational>),
}

pub fn substitute_alpha(a: &HbarSeries, sub: &AlphaSubstitution) -> Result<HbarSeries> {
    let images: Vec<AlphaPoly> = match sub {
        AlphaSubstitution::Values(v) => {
            if v.len() != a.arity() {
                return Err(Error::ArityMismatch(a.arity(), v.len()));
            }
            v.iter().map(|c| AlphaPoly::constant(0, c.clone())).collect()
        }
        AlphaSubstitution::Shifts(s) => {
            if s.len() != a.arity() {
                return Err(Error::ArityMismatch(a.arity(), s.len()));
            }
            (0..a.arity())
                .map(|i| AlphaPoly::var(a.arity(), i).add(&AlphaPoly::constant(a.arity(), s[i].clone())).unwrap())
                .collect()
        }
    };
    if images.is_empty() {
        return Ok(a.clone());
    }
    a.compose_alpha(&images)
}
