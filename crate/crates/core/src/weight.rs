//! The sl(2) weight system by contraction over V_λ, the skein weight system ω^T,
//! and polynomial interpolation of weights in the variables α_i = λ_i + 1.

use rustc_hash::FxHashMap;

use crate::chord::{ChordDiagram, DiagramSum};
use crate::error::{Error, Result};
use crate::scalar::{Field, Rational};
use crate::series::AlphaPoly;
use crate::skein::Skein;
use crate::spin::SpinGraph;

/// Local factor of an internal trivalent vertex in ω^T.
pub const VERTEX_FACTOR: i64 = -2;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Gen {
    E = 1,
    F = 2,
    H = 3,
}

const GENS: [Gen; 3] = [Gen::E, Gen::F, Gen::H];

impl Gen {
    fn from_bits(b: u64) -> Gen {
        match b {
            1 => Gen::E,
            2 => Gen::F,
            _ => Gen::H,
        }
    }

    /// Partner under the Casimir e⊗f + f⊗e + ½h⊗h.
    fn dual(self) -> Gen {
        match self {
            Gen::E => Gen::F,
            Gen::F => Gen::E,
            Gen::H => Gen::H,
        }
    }

    /// Twice the Casimir weight of a chord opened with this label.
    fn weight(self) -> i128 {
        match self {
            Gen::H => 1,
            _ => 2,
        }
    }

    /// Action on the basis vector v_i of V_λ.
    fn act(self, lambda: i64, i: i64) -> Option<(i128, i64)> {
        match self {
            Gen::E if i > 0 => Some(((lambda - i + 1) as i128, i - 1)),
            Gen::F if i < lambda => Some(((i + 1) as i128, i + 1)),
            Gen::H if lambda != 2 * i => Some(((lambda - 2 * i) as i128, i)),
            _ => None,
        }
    }
}

/// A pure chord diagram prepared for contraction.
#[derive(Clone, Debug)]
pub struct Contraction {
    /// Per circle, legs in the order operators are applied: (chord, opens).
    circles: Vec<Vec<(usize, bool)>>,
    chords: usize,
}

impl Contraction {
    pub fn new(d: &ChordDiagram) -> Result<Self> {
        if !d.is_pure() {
            return Err(Error::Malformed("contraction needs a pure chord diagram".into()));
        }
        let mut chord_of: FxHashMap<u32, usize> = FxHashMap::default();
        let mut circles = Vec::new();
        let mut chords = 0;
        for c in 0..d.circle_count() {
            let mut row = Vec::new();
            // operators multiply left to right along the circle, so they act last-first
            for &leg in d.legs_on(c).iter().rev() {
                let other = d.partner((leg, 0)).0;
                match chord_of.get(&other) {
                    Some(&k) => row.push((k, false)),
                    None => {
                        chord_of.insert(leg, chords);
                        row.push((chords, true));
                        chords += 1;
                    }
                }
            }
            circles.push(row);
        }
        if chords > 32 {
            return Err(Error::OutOfRange(format!("{chords} chords")));
        }
        Ok(Contraction { circles, chords })
    }

    /// Π_circles tr_{V_λ}, with each chord carrying the Casimir.
    pub fn evaluate(&self, lambdas: &[usize]) -> Result<Rational> {
        if lambdas.len() != self.circles.len() {
            return Err(Error::ArityMismatch(lambdas.len(), self.circles.len()));
        }
        let mut states: FxHashMap<u64, i128> = FxHashMap::default();
        states.insert(0, 1);
        for (row, &lam) in self.circles.iter().zip(lambdas) {
            let lam = lam as i64;
            if row.is_empty() {
                for v in states.values_mut() {
                    *v *= (lam + 1) as i128;
                }
                continue;
            }
            let mut walk: FxHashMap<(u64, i64, i64), i128> = FxHashMap::default();
            for (&k, &v) in &states {
                for s in 0..=lam {
                    walk.insert((k, s, s), v);
                }
            }
            for &(chord, opens) in row {
                let mut next: FxHashMap<(u64, i64, i64), i128> = FxHashMap::default();
                let shift = 2 * chord as u64;
                for ((labels, start, cur), v) in walk {
                    if opens {
                        for g in GENS {
                            if let Some((c, to)) = g.act(lam, cur) {
                                let key = (labels | (g as u64) << shift, start, to);
                                *next.entry(key).or_insert(0) += v * c * g.weight();
                            }
                        }
                    } else {
                        let g = Gen::from_bits(labels >> shift & 3).dual();
                        if let Some((c, to)) = g.act(lam, cur) {
                            let key = (labels & !(3u64 << shift), start, to);
                            *next.entry(key).or_insert(0) += v * c;
                        }
                    }
                }
                next.retain(|_, v| *v != 0);
                walk = next;
            }
            let mut closed: FxHashMap<u64, i128> = FxHashMap::default();
            for ((labels, start, cur), v) in walk {
                if start == cur {
                    *closed.entry(labels).or_insert(0) += v;
                }
            }
            closed.retain(|_, v| *v != 0);
            states = closed;
        }
        let total: i128 = states.values().sum();
        Ok(Rational::new(num_bigint::BigInt::from(total), num_bigint::BigInt::from(1u8) << self.chords))
    }
}

/// A diagram sum rewritten into prepared pure chord diagrams.
#[derive(Clone, Debug)]
pub struct PureExpansion {
    circles: usize,
    terms: Vec<(Contraction, Rational)>,
    leg_bounds: Vec<usize>,
}

impl PureExpansion {
    pub fn new(sum: &DiagramSum) -> Result<Self> {
        let pure = sum.stu_reduce()?;
        let mut leg_bounds = vec![0; sum.circle_count()];
        let mut terms = Vec::new();
        for (d, c) in pure.iter() {
            for (b, n) in leg_bounds.iter_mut().zip(d.leg_counts()) {
                *b = (*b).max(n);
            }
            terms.push((Contraction::new(d)?, c.clone()));
        }
        Ok(PureExpansion { circles: sum.circle_count(), terms, leg_bounds })
    }

    pub fn from_diagram(d: &ChordDiagram) -> Result<Self> {
        Self::new(&DiagramSum::single(d.clone()))
    }

    pub fn circle_count(&self) -> usize {
        self.circles
    }

    /// Largest leg count on each circle among the pure terms.
    pub fn leg_bounds(&self) -> &[usize] {
        &self.leg_bounds
    }

    pub fn evaluate(&self, lambdas: &[usize]) -> Result<Rational> {
        let mut total = Rational::zero();
        for (t, c) in &self.terms {
            total += &(t.evaluate(lambdas)? * c);
        }
        Ok(total)
    }
}

/// ω^{sl2}_λ(D): internal vertices are removed by STU first.
pub fn omega_sl2(d: &ChordDiagram, lambdas: &[usize]) -> Result<Rational> {
    PureExpansion::from_diagram(d)?.evaluate(lambdas)
}

pub fn omega_sl2_sum(s: &DiagramSum, lambdas: &[usize]) -> Result<Rational> {
    PureExpansion::new(s)?.evaluate(lambdas)
}

/// The spin network of a diagram: circles colored λ_i, chords and internal edges colored 2.
pub fn spin_network(d: &ChordDiagram, lambdas: &[usize]) -> Result<SpinGraph> {
    if lambdas.len() != d.circle_count() {
        return Err(Error::ArityMismatch(lambdas.len(), d.circle_count()));
    }
    let mut g = SpinGraph::new();
    let mut edge_of: FxHashMap<(u32, u8), usize> = FxHashMap::default();
    for (a, b) in d.edges() {
        let e = g.add_edge(2);
        edge_of.insert(a, e);
        edge_of.insert(b, e);
    }
    for (c, &lam) in lambdas.iter().enumerate() {
        let legs = d.legs_on(c);
        if legs.is_empty() {
            g.add_free_loop(lam);
            continue;
        }
        let arcs: Vec<usize> = legs.iter().map(|_| g.add_edge(lam)).collect();
        let n = legs.len();
        for (k, &leg) in legs.iter().enumerate() {
            g.add_vertex([arcs[(k + n - 1) % n], arcs[k], edge_of[&(leg, 0)]]);
        }
    }
    for v in d.internal_vertices() {
        g.add_vertex([edge_of[&(v, 0)], edge_of[&(v, 1)], edge_of[&(v, 2)]]);
    }
    Ok(g)
}

/// ω^T_λ(D) computed by evaluating the spin network in the skein calculator.
pub fn omega_t<F: Field>(d: &ChordDiagram, lambdas: &[usize], skein: &Skein<F>) -> Result<F::Elem> {
    let field = skein.field();
    for (c, &lam) in lambdas.iter().enumerate() {
        if let Some(bound) = field.max_color() {
            if lam > bound {
                return Err(Error::ColorOutOfRange { color: lam, bound });
            }
        }
        if lam == 0 && !d.legs_on(c).is_empty() {
            return Ok(field.zero());
        }
    }
    let e = spin_network(d, lambdas)?.evaluate_with(skein)?;
    let mut factor = field.one();
    for (c, &lam) in lambdas.iter().enumerate() {
        for _ in 0..d.legs_on(c).len() {
            factor = field.mul(&factor, &field.from_i64(lam as i64));
        }
    }
    for _ in 0..d.internal_vertex_count() {
        factor = field.mul(&factor, &field.from_i64(VERTEX_FACTOR));
    }
    Ok(field.mul(&factor, &e))
}

/// The sign relating the two weight systems: (−1)^{Σλ + deg}.
pub fn sign_lemma_factor(d: &ChordDiagram, lambdas: &[usize]) -> i64 {
    if (lambdas.iter().sum::<usize>() + d.degree()) % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Monomial coefficients of the polynomial through (1, v_0), (2, v_1), ….
fn interpolate_1d(values: &[Rational]) -> Vec<Rational> {
    let m = values.len();
    let mut dd = values.to_vec();
    for k in 1..m {
        for i in (k..m).rev() {
            dd[i] = (&dd[i] - &dd[i - 1]) / Rational::from(k as i64);
        }
    }
    // Horner on Newton form with nodes 1, 2, …
    let mut coeffs = vec![Rational::zero(); m];
    for k in (0..m).rev() {
        let node = Rational::from(k as i64 + 1);
        let mut next = vec![Rational::zero(); m];
        for i in 0..m {
            if coeffs[i].is_zero() {
                continue;
            }
            if i + 1 < m {
                next[i + 1] += &coeffs[i];
            }
            next[i] -= &(&coeffs[i] * &node);
        }
        next[0] += &dd[k];
        coeffs = next;
    }
    coeffs
}

/// ω^{sl2} of a diagram as a polynomial in α_i = λ_i + 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightPolynomial {
    pub poly: AlphaPoly,
    pub leg_counts: Vec<usize>,
    pub degree: usize,
}

impl WeightPolynomial {
    pub fn is_odd(&self) -> bool {
        self.poly.terms().all(|(e, _)| e.iter().all(|k| k % 2 == 1))
    }

    pub fn degree_within_bound(&self) -> bool {
        self.poly.terms().all(|(e, _)| e.iter().zip(&self.leg_counts).all(|(&k, &n)| k as usize <= n + 1))
    }

    /// 2^{deg} Π (n_i + 1)!.
    pub fn integrality_scale(&self) -> Rational {
        let mut s = Rational::from(2).pow(self.degree as i32);
        for &n in &self.leg_counts {
            s = s * Rational::factorial(n as u64 + 1);
        }
        s
    }

    pub fn scaled_is_integral(&self) -> bool {
        let s = self.integrality_scale();
        self.poly.terms().all(|(_, c)| (c * &s).is_integer())
    }

    /// Coefficients multiplied by the integrality scale.
    pub fn scaled_coefficients(&self) -> Vec<(Vec<u32>, Rational)> {
        let s = self.integrality_scale();
        self.poly.terms().map(|(e, c)| (e.clone(), c * &s)).collect()
    }
}

/// Interpolate ω^{sl2} of a diagram sum on a grid of colors and check one extra point.
pub fn extract_weight_polynomial(sum: &DiagramSum) -> Result<AlphaPoly> {
    let exp = PureExpansion::new(sum)?;
    interpolate_expansion(&exp)
}

pub fn interpolate_expansion(exp: &PureExpansion) -> Result<AlphaPoly> {
    let l = exp.circle_count();
    let sizes: Vec<usize> = exp.leg_bounds().iter().map(|n| n + 2).collect();
    let total: usize = sizes.iter().product();
    let index = |flat: usize| -> Vec<usize> {
        let mut rest = flat;
        let mut out = vec![0; l];
        for i in (0..l).rev() {
            out[i] = rest % sizes[i];
            rest /= sizes[i];
        }
        out
    };
    let mut grid: Vec<Rational> = (0..total).map(|f| exp.evaluate(&index(f))).collect::<Result<_>>()?;
    let mut stride = 1;
    for axis in (0..l).rev() {
        let m = sizes[axis];
        for base in 0..total {
            if (base / stride) % m != 0 {
                continue;
            }
            let fiber: Vec<Rational> = (0..m).map(|k| grid[base + k * stride].clone()).collect();
            for (k, c) in interpolate_1d(&fiber).into_iter().enumerate() {
                grid[base + k * stride] = c;
            }
        }
        stride *= m;
    }
    let mut poly = AlphaPoly::zero(l);
    for (f, c) in grid.into_iter().enumerate() {
        if !c.is_zero() {
            poly.add_term(index(f).into_iter().map(|k| k as u32).collect(), c);
        }
    }
    let probe: Vec<usize> = sizes.clone();
    let at: Vec<Rational> = probe.iter().map(|&x| Rational::from(x as i64 + 1)).collect();
    let direct = exp.evaluate(&probe)?;
    if poly.eval(&at)? != direct {
        return Err(Error::InterpolationInconsistent(format!("at colors {probe:?}")));
    }
    Ok(poly)
}

/// Weight polynomial of one diagram with its structural data.
pub fn weight_polynomial(d: &ChordDiagram) -> Result<WeightPolynomial> {
    Ok(WeightPolynomial {
        poly: extract_weight_polynomial(&DiagramSum::single(d.clone()))?,
        leg_counts: d.leg_counts(),
        degree: d.degree(),
    })
}

/// χ = ω / (λ_i + 1) as a polynomial.
pub fn infinitesimal_character(d: &ChordDiagram, i: usize) -> Result<AlphaPoly> {
    let w = extract_weight_polynomial(&DiagramSum::single(d.clone()))?;
    let mut out = AlphaPoly::zero(w.arity());
    for (e, c) in w.terms() {
        if e[i] == 0 {
            return Err(Error::InterpolationInconsistent(format!("not divisible by alpha_{}", i + 1)));
        }
        let mut e = e.clone();
        e[i] -= 1;
        out.add_term(e, c.clone());
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{psi_p, PrimeContext, Rationals};

    fn theta() -> ChordDiagram {
        ChordDiagram::theta_power(0, 1, 1)
    }

    #[test]
    fn sl2_basics() {
        for lam in 0..5usize {
            assert_eq!(omega_sl2(&ChordDiagram::empty(1), &[lam]).unwrap(), Rational::from(lam as i64 + 1));
            let l = lam as i64;
            assert_eq!(omega_sl2(&theta(), &[lam]).unwrap(), Rational::new((l + 1) * l * (l + 2), 2));
        }
        assert_eq!(omega_sl2(&theta(), &[1]).unwrap(), Rational::from(3));
    }

    #[test]
    fn skein_basics() {
        let skein = Skein::new(Rationals, 4).unwrap();
        for lam in 0..5usize {
            let l = lam as i64;
            let sign = if lam % 2 == 0 { 1 } else { -1 };
            assert_eq!(omega_t(&ChordDiagram::empty(1), &[lam], &skein).unwrap(), Rational::from(sign * (l + 1)));
            assert_eq!(omega_t(&theta(), &[lam], &skein).unwrap(), Rational::new(-sign * (l + 1) * l * (l + 2), 2));
        }
        let ctx = PrimeContext::new(7).unwrap();
        let sk = Skein::new(ctx.clone(), 5).unwrap();
        assert_eq!(omega_t(&theta(), &[2], &sk).unwrap(), psi_p(&Rational::from(-12), &ctx).unwrap());
        assert_eq!(omega_t(&theta(), &[2], &sk).unwrap().value(), 2);
    }

    #[test]
    fn tripod_sign_lemma() {
        let skein = Skein::new(Rationals, 4).unwrap();
        let t = ChordDiagram::tripod(1);
        for lam in 1..5usize {
            let s = omega_sl2(&t, &[lam]).unwrap();
            let w = omega_t(&t, &[lam], &skein).unwrap();
            assert_eq!(s, w * Rational::from(sign_lemma_factor(&t, &[lam])), "lambda {lam}");
        }
    }

    #[test]
    fn theta_polynomial() {
        let w = weight_polynomial(&theta()).unwrap();
        let a = AlphaPoly::var(1, 0);
        let expect = a.pow(3).sub(&a).unwrap().scale(&Rational::new(1, 2));
        assert_eq!(w.poly, expect);
        assert!(w.is_odd() && w.degree_within_bound() && w.scaled_is_integral());
        let e = weight_polynomial(&ChordDiagram::empty(1)).unwrap();
        assert_eq!(e.poly, a);
    }

    #[test]
    fn characters() {
        let chi = infinitesimal_character(&theta(), 0).unwrap();
        let a = AlphaPoly::var(1, 0);
        assert_eq!(chi, a.pow(2).sub(&AlphaPoly::one(1)).unwrap().scale(&Rational::new(1, 2)));
        let chi2 = infinitesimal_character(&ChordDiagram::theta_power(0, 2, 1), 0).unwrap();
        assert_eq!(chi2, chi.pow(2));
        assert_eq!(infinitesimal_character(&ChordDiagram::empty(1), 0).unwrap(), AlphaPoly::one(1));
    }
}
