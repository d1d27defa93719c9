//! Temperley-Lieb skein calculus with loop value −2 over an arbitrary [`Field`].
//!
//! A (k,l) element has k bottom and l top boundary points. Boundary points are
//! numbered counterclockwise: bottom points 0..k from left to right, then top
//! points from right to left.

use std::fmt;

use rayon::prelude::*;
use rustc_hash::FxHashMap;
use smallvec::SmallVec;

use crate::error::{Error, Result};
use crate::scalar::{Field, PrimeContext, Rational, Rationals};

type Points = SmallVec<[u8; 32]>;

/// A crossingless, circle-free (k,l) diagram stored as a partner array.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PlanarMatching {
    k: u8,
    l: u8,
    pair: Points,
}

impl PlanarMatching {
    pub fn from_partners(k: usize, l: usize, partners: &[usize]) -> Result<Self> {
        let n = k + l;
        if partners.len() != n || n % 2 == 1 || n > 255 {
            return Err(Error::SizeMismatch(format!("{} partners for ({k},{l})", partners.len())));
        }
        for (i, &j) in partners.iter().enumerate() {
            if j >= n || j == i || partners[j] != i {
                return Err(Error::Malformed(format!("partner array is not an involution at {i}")));
            }
        }
        for a in 0..n {
            let b = partners[a];
            if a < b {
                for c in a + 1..b {
                    let d = partners[c];
                    if d < a || d > b {
                        return Err(Error::Malformed(format!("arcs {a}-{b} and {c}-{d} cross")));
                    }
                }
            }
        }
        Ok(PlanarMatching { k: k as u8, l: l as u8, pair: partners.iter().map(|&x| x as u8).collect() })
    }

    pub fn identity(n: usize) -> Self {
        let mut pair = Points::from_elem(0, 2 * n);
        for i in 0..n {
            let t = 2 * n - 1 - i;
            pair[i] = t as u8;
            pair[t] = i as u8;
        }
        PlanarMatching { k: n as u8, l: n as u8, pair }
    }

    pub fn k(&self) -> usize {
        self.k as usize
    }

    pub fn l(&self) -> usize {
        self.l as usize
    }

    pub fn partners(&self) -> Vec<usize> {
        self.pair.iter().map(|&x| x as usize).collect()
    }

    /// Index of the bottom point at position i (left to right).
    pub fn bottom(&self, i: usize) -> usize {
        i
    }

    /// Index of the top point at position t (left to right).
    pub fn top(&self, t: usize) -> usize {
        self.k() + self.l() - 1 - t
    }

    /// Upside-down reflection: a (k,l) diagram becomes an (l,k) diagram.
    pub fn mirror(&self) -> PlanarMatching {
        let (k, l) = (self.k(), self.l());
        let n = k + l;
        // old bottom b -> new top b ; old top t -> new bottom t
        let map = |idx: usize| -> usize {
            if idx < k {
                l + k - 1 - idx
            } else {
                let t = k + l - 1 - idx;
                t
            }
        };
        let mut pair = Points::from_elem(0, n);
        for i in 0..n {
            pair[map(i)] = map(self.pair[i] as usize) as u8;
        }
        PlanarMatching { k: self.l, l: self.k, pair }
    }

    fn tensor(&self, other: &PlanarMatching) -> PlanarMatching {
        let (k1, l1, k2, l2) = (self.k(), self.l(), other.k(), other.l());
        let (k, l) = (k1 + k2, l1 + l2);
        let n = k + l;
        let map1 = |idx: usize| -> usize {
            if idx < k1 {
                idx
            } else {
                let t = k1 + l1 - 1 - idx;
                k + l - 1 - t
            }
        };
        let map2 = |idx: usize| -> usize {
            if idx < k2 {
                k1 + idx
            } else {
                let t = k2 + l2 - 1 - idx;
                k + l - 1 - (l1 + t)
            }
        };
        let mut pair = Points::from_elem(0, n);
        for i in 0..k1 + l1 {
            pair[map1(i)] = map1(self.pair[i] as usize) as u8;
        }
        for i in 0..k2 + l2 {
            pair[map2(i)] = map2(other.pair[i] as usize) as u8;
        }
        PlanarMatching { k: k as u8, l: l as u8, pair }
    }

    /// Stack `self` (k,n) on top of `below` (l,k); returns the (l,n) result and the loop count.
    fn compose(&self, below: &PlanarMatching) -> (PlanarMatching, usize) {
        let (k, n) = (self.k(), self.l());
        let l = below.k();
        debug_assert_eq!(below.l(), k);
        let x = &self.pair;
        let y = &below.pair;
        let mut res = Points::from_elem(u8::MAX, l + n);
        let mut seen: SmallVec<[bool; 32]> = SmallVec::from_elem(false, k);
        // Walk from an outer point; `in_y` selects the diagram holding the current point.
        let walk = |mut in_y: bool, mut idx: usize, seen: &mut SmallVec<[bool; 32]>| -> usize {
            loop {
                if in_y {
                    let q = y[idx] as usize;
                    if q < l {
                        return q;
                    }
                    let m = l + k - 1 - q;
                    seen[m] = true;
                    in_y = false;
                    idx = m;
                } else {
                    let q = x[idx] as usize;
                    if q < k {
                        seen[q] = true;
                        in_y = true;
                        idx = l + k - 1 - q;
                    } else {
                        let t = k + n - 1 - q;
                        return l + n - 1 - t;
                    }
                }
            }
        };
        for b in 0..l {
            if res[b] == u8::MAX {
                let e = walk(true, b, &mut seen);
                res[b] = e as u8;
                res[e] = b as u8;
            }
        }
        for t in 0..n {
            let r = l + n - 1 - t;
            if res[r] == u8::MAX {
                let e = walk(false, k + n - 1 - t, &mut seen);
                res[r] = e as u8;
                res[e] = r as u8;
            }
        }
        let mut loops = 0;
        for m in 0..k {
            if !seen[m] {
                loops += 1;
                let mut cur = m;
                loop {
                    seen[cur] = true;
                    let q = x[cur] as usize;
                    seen[q] = true;
                    let r = y[l + k - 1 - q] as usize;
                    cur = l + k - 1 - r;
                    if cur == m {
                        break;
                    }
                }
            }
        }
        (PlanarMatching { k: l as u8, l: n as u8, pair: res }, loops)
    }
}

impl fmt::Display for PlanarMatching {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})[", self.k, self.l)?;
        for (i, p) in self.pair.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, "]")
    }
}

impl fmt::Debug for PlanarMatching {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// All planar matchings of (k,l).
pub fn simple_basis(k: usize, l: usize) -> Vec<PlanarMatching> {
    fn rec(points: &[usize], partners: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if points.is_empty() {
            out.push(partners.clone());
            return;
        }
        let a = points[0];
        for j in (1..points.len()).step_by(2) {
            let b = points[j];
            partners[a] = b;
            partners[b] = a;
            let inner = &points[1..j];
            let outer = &points[j + 1..];
            let mut inner_out = Vec::new();
            rec(inner, partners, &mut inner_out);
            for p in inner_out {
                let mut copy = p;
                let mut outer_out = Vec::new();
                rec(outer, &mut copy, &mut outer_out);
                out.extend(outer_out);
            }
        }
    }
    let n = k + l;
    if n % 2 == 1 {
        return Vec::new();
    }
    let points: Vec<usize> = (0..n).collect();
    let mut out = Vec::new();
    rec(&points, &mut vec![0; n], &mut out);
    let mut v: Vec<PlanarMatching> = out
        .into_iter()
        .map(|p| PlanarMatching { k: k as u8, l: l as u8, pair: p.into_iter().map(|x| x as u8).collect() })
        .collect();
    v.sort();
    v
}

/// Formal linear combination of planar matchings of a fixed shape.
#[derive(Clone)]
pub struct SkeinElement<E> {
    k: usize,
    l: usize,
    terms: FxHashMap<PlanarMatching, E>,
}

impl<E: Clone + fmt::Display> SkeinElement<E> {
    pub fn zero(k: usize, l: usize) -> Self {
        SkeinElement { k, l, terms: FxHashMap::default() }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn l(&self) -> usize {
        self.l
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, m: &PlanarMatching) -> Option<&E> {
        self.terms.get(m)
    }

    /// Terms in canonical (sorted) order.
    pub fn sorted_terms(&self) -> Vec<(&PlanarMatching, &E)> {
        let mut v: Vec<_> = self.terms.iter().collect();
        v.sort_by(|a, b| a.0.cmp(b.0));
        v
    }

    pub fn iter(&self) -> impl Iterator<Item = (&PlanarMatching, &E)> {
        self.terms.iter()
    }
}

impl<E: Clone + fmt::Display> fmt::Display for SkeinElement<E> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (m, c) in self.sorted_terms() {
            writeln!(f, "{c} {m}")?;
        }
        Ok(())
    }
}

/// Skein calculator over a field, holding Jones-Wenzl projectors f_0..f_n.
#[derive(Clone)]
pub struct Skein<F: Field> {
    field: F,
    projectors: Vec<SkeinElement<F::Elem>>,
}

pub type Element<F> = SkeinElement<<F as Field>::Elem>;

impl<F: Field> Skein<F> {
    /// Calculator with projectors up to `max_color` precomputed.
    pub fn new(field: F, max_color: usize) -> Result<Self> {
        if let Some(bound) = field.max_color() {
            if max_color > bound {
                return Err(Error::ColorOutOfRange { color: max_color, bound });
            }
        }
        let mut s = Skein { field, projectors: Vec::new() };
        s.projectors.push(s.identity(0));
        if max_color >= 1 {
            s.projectors.push(s.identity(1));
        }
        while s.projectors.len() <= max_color {
            let next = s.next_projector();
            s.projectors.push(next);
        }
        Ok(s)
    }

    pub fn field(&self) -> &F {
        &self.field
    }

    pub fn max_color(&self) -> usize {
        self.projectors.len() - 1
    }

    pub fn single(&self, m: PlanarMatching) -> Element<F> {
        let mut e = SkeinElement::zero(m.k(), m.l());
        e.terms.insert(m, self.field.one());
        e
    }

    pub fn identity(&self, n: usize) -> Element<F> {
        self.single(PlanarMatching::identity(n))
    }

    /// The (0,2) cup.
    pub fn cup(&self) -> Element<F> {
        self.single(PlanarMatching::from_partners(0, 2, &[1, 0]).unwrap())
    }

    /// The (2,0) cap.
    pub fn cap(&self) -> Element<F> {
        self.single(PlanarMatching::from_partners(2, 0, &[1, 0]).unwrap())
    }

    /// n nested cups, a (0,2n) element.
    pub fn cup_n(&self, n: usize) -> Element<F> {
        let mut p = vec![0; 2 * n];
        for i in 0..2 * n {
            p[i] = 2 * n - 1 - i;
        }
        self.single(PlanarMatching::from_partners(0, 2 * n, &p).unwrap())
    }

    /// n nested caps, a (2n,0) element.
    pub fn cap_n(&self, n: usize) -> Element<F> {
        let mut p = vec![0; 2 * n];
        for i in 0..2 * n {
            p[i] = 2 * n - 1 - i;
        }
        self.single(PlanarMatching::from_partners(2 * n, 0, &p).unwrap())
    }

    /// U_i = cup∘cap on strands i, i+1 of n strands.
    pub fn u_gen(&self, n: usize, i: usize) -> Element<F> {
        let u = self.compose(&self.cup(), &self.cap()).unwrap();
        self.pad(&u, i, n - i - 2)
    }

    /// The resolved crossing X = −id − U.
    pub fn crossing(&self) -> Element<F> {
        let minus = self.field.from_i64(-1);
        let u = self.u_gen(2, 0);
        self.scale(&self.add(&self.identity(2), &u).unwrap(), &minus)
    }

    fn insert(&self, map: &mut FxHashMap<PlanarMatching, F::Elem>, m: PlanarMatching, c: F::Elem) {
        if self.field.is_zero(&c) {
            return;
        }
        match map.entry(m) {
            std::collections::hash_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::hash_map::Entry::Occupied(mut o) => {
                let s = self.field.add(o.get(), &c);
                if self.field.is_zero(&s) {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    pub fn add(&self, x: &Element<F>, y: &Element<F>) -> Result<Element<F>> {
        if (x.k, x.l) != (y.k, y.l) {
            return Err(Error::SizeMismatch(format!("({},{}) + ({},{})", x.k, x.l, y.k, y.l)));
        }
        let mut out = x.clone();
        for (m, c) in &y.terms {
            self.insert(&mut out.terms, m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, x: &Element<F>, y: &Element<F>) -> Result<Element<F>> {
        self.add(x, &self.scale(y, &self.field.from_i64(-1)))
    }

    pub fn scale(&self, x: &Element<F>, c: &F::Elem) -> Element<F> {
        let mut out = SkeinElement::zero(x.k, x.l);
        if self.field.is_zero(c) {
            return out;
        }
        for (m, v) in &x.terms {
            out.terms.insert(m.clone(), self.field.mul(v, c));
        }
        out
    }

    pub fn is_zero(&self, x: &Element<F>) -> bool {
        x.terms.is_empty()
    }

    pub fn equal(&self, x: &Element<F>, y: &Element<F>) -> bool {
        (x.k, x.l) == (y.k, y.l) && self.sub(x, y).map(|d| d.terms.is_empty()).unwrap_or(false)
    }

    fn loop_factor(&self, loops: usize) -> F::Elem {
        let mut c = self.field.one();
        let m2 = self.field.from_i64(-2);
        for _ in 0..loops {
            c = self.field.mul(&c, &m2);
        }
        c
    }

    /// Stack x (k,n) on top of y (l,k).
    pub fn compose(&self, x: &Element<F>, y: &Element<F>) -> Result<Element<F>> {
        if x.k != y.l {
            return Err(Error::SizeMismatch(format!("cannot stack ({},{}) on ({},{})", x.k, x.l, y.k, y.l)));
        }
        let mut out = SkeinElement::zero(y.k, x.l);
        let xs: Vec<_> = x.terms.iter().collect();
        let ys: Vec<_> = y.terms.iter().collect();
        let factors: Vec<F::Elem> = (0..=x.k / 2 + 1).map(|n| self.loop_factor(n)).collect();
        let work = xs.len() * ys.len();
        if work < 4096 {
            for (mx, cx) in &xs {
                for (my, cy) in &ys {
                    let (m, loops) = mx.compose(my);
                    let c = self.field.mul(&self.field.mul(cx, cy), &factors[loops]);
                    self.insert(&mut out.terms, m, c);
                }
            }
            return Ok(out);
        }
        let (outer, inner, x_outer) = if ys.len() >= xs.len() { (&ys, &xs, false) } else { (&xs, &ys, true) };
        let partial: Vec<FxHashMap<PlanarMatching, F::Elem>> = outer
            .par_chunks(64.max(outer.len() / (4 * rayon::current_num_threads().max(1)) + 1))
            .map(|chunk| {
                let mut local = FxHashMap::default();
                for (mo, co) in chunk {
                    for (mi, ci) in inner.iter() {
                        let ((mx, cx), (my, cy)) = if x_outer { ((mo, co), (mi, ci)) } else { ((mi, ci), (mo, co)) };
                        let (m, loops) = mx.compose(my);
                        let c = self.field.mul(&self.field.mul(cx, cy), &factors[loops]);
                        self.insert(&mut local, m, c);
                    }
                }
                local
            })
            .collect();
        for local in partial {
            for (m, c) in local {
                self.insert(&mut out.terms, m, c);
            }
        }
        Ok(out)
    }

    /// Side-by-side juxtaposition, x on the left.
    pub fn tensor(&self, x: &Element<F>, y: &Element<F>) -> Element<F> {
        let mut out = SkeinElement::zero(x.k + y.k, x.l + y.l);
        for (mx, cx) in &x.terms {
            for (my, cy) in &y.terms {
                self.insert(&mut out.terms, mx.tensor(my), self.field.mul(cx, cy));
            }
        }
        out
    }

    /// id_left ⊗ x ⊗ id_right.
    pub fn pad(&self, x: &Element<F>, left: usize, right: usize) -> Element<F> {
        let l = self.identity(left);
        let r = self.identity(right);
        self.tensor(&self.tensor(&l, x), &r)
    }

    /// Upside-down reflection.
    pub fn mirror(&self, x: &Element<F>) -> Element<F> {
        let mut out = SkeinElement::zero(x.l, x.k);
        for (m, c) in &x.terms {
            out.terms.insert(m.mirror(), c.clone());
        }
        out
    }

    /// Closure of a square element; every loop counts −2.
    pub fn trace(&self, x: &Element<F>) -> Result<F::Elem> {
        if x.k != x.l {
            return Err(Error::NotSquare(x.k, x.l));
        }
        let closer = self.cap_n(x.k);
        let opener = self.cup_n(x.k);
        let closed = self.compose(&closer, &self.compose(&self.pad(x, 0, x.k), &opener)?)?;
        Ok(self.scalar_of(&closed))
    }

    /// Scalar value of a (0,0) element.
    pub fn scalar_of(&self, x: &Element<F>) -> F::Elem {
        assert_eq!((x.k, x.l), (0, 0), "not a closed element");
        x.terms.values().next().cloned().unwrap_or_else(|| self.field.zero())
    }

    /// tr(x∘y) for x (k,l), y (l,k).
    pub fn pairing(&self, x: &Element<F>, y: &Element<F>) -> Result<F::Elem> {
        self.trace(&self.compose(x, y)?)
    }

    /// True when x pairs to zero with every simple diagram of the dual shape.
    pub fn is_null(&self, x: &Element<F>) -> bool {
        if x.terms.is_empty() {
            return true;
        }
        let basis = simple_basis(x.l, x.k);
        basis.par_iter().all(|b| {
            let y = self.single(b.clone());
            self.field.is_zero(&self.pairing(x, &y).unwrap())
        })
    }

    /// T(σ) for σ given as bottom position i ↦ top position σ[i].
    pub fn permutation_to_skein(&self, sigma: &[usize]) -> Element<F> {
        let n = sigma.len();
        let mut s = sigma.to_vec();
        let mut t = self.identity(n);
        let x = self.crossing();
        loop {
            let Some(i) = (0..n.saturating_sub(1)).find(|&i| s[i] > s[i + 1]) else { break };
            s.swap(i, i + 1);
            t = self.compose(&self.pad(&x, i, n - i - 2), &t).unwrap();
        }
        t
    }

    fn next_projector(&self) -> Element<F> {
        let n = self.projectors.len() - 1;
        let f = &self.projectors[n];
        let fi = self.pad(f, 0, 1);
        let u = self.u_gen(n + 1, n - 1);
        let middle = self.compose(&self.compose(&fi, &u).unwrap(), &fi).unwrap();
        let ratio = self.field.div(&self.field.from_i64(n as i64), &self.field.from_i64(n as i64 + 1));
        self.add(&fi, &self.scale(&middle, &ratio)).unwrap()
    }

    /// The Jones-Wenzl idempotent f_n.
    pub fn projector(&self, n: usize) -> Result<&Element<F>> {
        if let Some(bound) = self.field.max_color() {
            if n > bound {
                return Err(Error::ColorOutOfRange { color: n, bound });
            }
        }
        self.projectors.get(n).ok_or(Error::ColorOutOfRange { color: n, bound: self.max_color() })
    }

    /// (1/n!) Σ sign(σ) T(σ), the defining antisymmetrizer.
    pub fn antisymmetrizer(&self, n: usize) -> Result<Element<F>> {
        if let Some(bound) = self.field.max_color() {
            if n > bound {
                return Err(Error::ColorOutOfRange { color: n, bound });
            }
        }
        let mut acc = SkeinElement::zero(n, n);
        for (sigma, sign) in permutations(n) {
            let t = self.permutation_to_skein(&sigma);
            let t = self.scale(&t, &self.field.from_i64(sign));
            acc = self.add(&acc, &t)?;
        }
        let mut fact = self.field.one();
        for i in 2..=n {
            fact = self.field.mul(&fact, &self.field.from_i64(i as i64));
        }
        Ok(self.scale(&acc, &self.field.inv(&fact).unwrap()))
    }

    /// The simple diagram S_{(i)}^{(j,k)} in S(i, j+k).
    pub fn vertex_skeleton(i: usize, j: usize, k: usize) -> Result<PlanarMatching> {
        if !admissible(i, j, k) {
            return Err(Error::NotAdmissible(i, j, k));
        }
        let a = (j + k - i) / 2;
        let b = (i + k - j) / 2;
        let c = (i + j - k) / 2;
        let (kk, ll) = (i, j + k);
        let top = |t: usize| kk + ll - 1 - t;
        let mut p = vec![usize::MAX; kk + ll];
        let mut link = |u: usize, v: usize| {
            p[u] = v;
            p[v] = u;
        };
        for s in 0..c {
            link(s, top(s));
        }
        for r in 0..a {
            link(top(j - 1 - r), top(j + r));
        }
        for r in 0..b {
            link(c + r, top(j + a + r));
        }
        PlanarMatching::from_partners(kk, ll, &p)
    }

    fn check_colors(&self, colors: &[usize]) -> Result<()> {
        for &c in colors {
            self.projector(c)?;
        }
        Ok(())
    }

    /// Y_{(i)}^{(j,k)} = (f_j⊗f_k)∘S∘f_i, an element of S(i, j+k).
    pub fn vertex(&self, i: usize, j: usize, k: usize) -> Result<Element<F>> {
        let s = Self::vertex_skeleton(i, j, k)?;
        self.check_colors(&[i, j, k])?;
        let s = self.single(s);
        let top = self.compose(&self.pad(self.projector(j)?, 0, k), &self.compose(&self.pad(self.projector(k)?, j, 0), &s)?)?;
        self.compose(&top, self.projector(i)?)
    }

    /// The mirror Y_{(j,k)}^{(i)} in S(j+k, i).
    pub fn vertex_mirror(&self, i: usize, j: usize, k: usize) -> Result<Element<F>> {
        Ok(self.mirror(&self.vertex(i, j, k)?))
    }

    /// tr(Y_{(j,k)}^{(i)} ∘ Y_{(i)}^{(j,k)}).
    pub fn theta_pairing(&self, i: usize, j: usize, k: usize) -> Result<F::Elem> {
        let s = self.single(Self::vertex_skeleton(i, j, k)?);
        self.check_colors(&[i, j, k])?;
        // tr(S' (f_j⊗f_k) S f_i) by idempotence and cyclicity
        let a = self.compose(&self.pad(self.projector(k)?, j, 0), &s)?;
        let a = self.compose(&self.pad(self.projector(j)?, 0, k), &a)?;
        let a = self.compose(&a, self.projector(i)?)?;
        let closed = self.compose(&self.mirror(&s), &a)?;
        self.trace(&closed)
    }

    /// Computes Y_{(j,k)}^{(l)} ∘ Y_{(i)}^{(j,k)}; returns c when it equals c·f_i (zero when l ≠ i).
    pub fn orthogonality_check(&self, l: usize, i: usize, j: usize, k: usize) -> Result<F::Elem> {
        let prod = self.compose(&self.vertex_mirror(l, j, k)?, &self.vertex(i, j, k)?)?;
        if l != i {
            if !self.is_null(&prod) {
                return Err(Error::Malformed(format!("Y^({l}) Y_({i}) is not null")));
            }
            return Ok(self.field.zero());
        }
        let f = self.projector(i)?;
        let c = prod.terms.get(&PlanarMatching::identity(i)).cloned().unwrap_or_else(|| self.field.zero());
        let residual = self.sub(&prod, &self.scale(f, &c))?;
        if !self.is_null(&residual) {
            return Err(Error::Malformed(format!("Y^({i}) Y_({i}) is not proportional to f_{i}")));
        }
        Ok(c)
    }

    /// f_i⊗f_j − Σ_k c_k Y_{(k)}^{(i,j)} Y_{(i,j)}^{(k)} for the given coefficients.
    pub fn decomposition_residual(&self, i: usize, j: usize, coeffs: &[(usize, F::Elem)]) -> Result<Element<F>> {
        let mut acc = self.tensor(self.projector(i)?, self.projector(j)?);
        for (k, c) in coeffs {
            let term = self.compose(&self.vertex(*k, i, j)?, &self.vertex_mirror(*k, i, j)?)?;
            acc = self.sub(&acc, &self.scale(&term, c))?;
        }
        Ok(acc)
    }
}

/// All permutations of 0..n with their signs.
pub fn permutations(n: usize) -> Vec<(Vec<usize>, i64)> {
    fn rec(prefix: &mut Vec<usize>, used: &mut Vec<bool>, n: usize, out: &mut Vec<(Vec<usize>, i64)>) {
        if prefix.len() == n {
            let mut inv = 0;
            for a in 0..n {
                for b in a + 1..n {
                    if prefix[a] > prefix[b] {
                        inv += 1;
                    }
                }
            }
            out.push((prefix.clone(), if inv % 2 == 0 { 1 } else { -1 }));
            return;
        }
        for v in 0..n {
            if !used[v] {
                used[v] = true;
                prefix.push(v);
                rec(prefix, used, n, out);
                prefix.pop();
                used[v] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; n], n, &mut out);
    out
}

/// Triangle inequalities and even sum.
pub fn admissible(i: usize, j: usize, k: usize) -> bool {
    (i + j + k) % 2 == 0 && i + j >= k && j + k >= i && i + k >= j
}

/// Admissible with i+j+k ≤ 2(p−2).
pub fn p_admissible(i: usize, j: usize, k: usize, p: u64) -> bool {
    admissible(i, j, k) && (i + j + k) as u64 <= 2 * (p - 2)
}

/// Loop value Δ_n = (−1)^n (n+1).
pub fn delta(n: usize) -> Rational {
    let v = n as i64 + 1;
    Rational::from(if n % 2 == 0 { v } else { -v })
}

/// Θ(i,j,k) = (−1)^s (s+1)!(s−i)!(s−j)!(s−k)!/(i!j!k!) with s = (i+j+k)/2.
pub fn theta_closed_form(i: usize, j: usize, k: usize) -> Result<Rational> {
    if !admissible(i, j, k) {
        return Err(Error::NotAdmissible(i, j, k));
    }
    let s = (i + j + k) / 2;
    let f = |n: usize| Rational::factorial(n as u64);
    let v = f(s + 1) * f(s - i) * f(s - j) * f(s - k) / (f(i) * f(j) * f(k));
    Ok(if s % 2 == 0 { v } else { -v })
}

/// f_n in the given field.
pub fn jones_wenzl<F: Field>(n: usize, field: F) -> Result<SkeinElement<F::Elem>> {
    let s = Skein::new(field, n)?;
    Ok(s.projector(n)?.clone())
}

/// Coefficients ψ_p(Δ_k/Θ(i,j,k)) over the p-admissible k.
pub fn identity_decomposition(i: usize, j: usize, ctx: &PrimeContext) -> Result<Vec<(usize, crate::scalar::FpElem)>> {
    let bound = ctx.p() as usize - 2;
    if i > bound || j > bound {
        return Err(Error::ColorOutOfRange { color: i.max(j), bound });
    }
    let lo = i.abs_diff(j);
    let mut out = Vec::new();
    for k in (lo..=i + j).step_by(2) {
        if p_admissible(i, j, k, ctx.p()) {
            let c = delta(k) / theta_closed_form(i, j, k)?;
            out.push((k, crate::scalar::psi_p(&c, ctx)?));
        }
    }
    Ok(out)
}

/// Characteristic-0 coefficients Δ_k/Θ(i,j,k) over all admissible k.
pub fn identity_decomposition_rational(i: usize, j: usize) -> Vec<(usize, Rational)> {
    let lo = i.abs_diff(j);
    (lo..=i + j).step_by(2).map(|k| (k, delta(k) / theta_closed_form(i, j, k).unwrap())).collect()
}

impl Skein<Rationals> {
    pub fn rational(max_color: usize) -> Self {
        Skein::new(Rationals, max_color).expect("characteristic 0 has no color bound")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> Rational {
        Rational::from(n)
    }

    #[test]
    fn loop_and_identity() {
        let s = Skein::rational(3);
        let closed = s.compose(&s.cap(), &s.cup()).unwrap();
        assert_eq!(s.scalar_of(&closed), q(-2));
        let f2 = s.projector(2).unwrap();
        assert!(s.equal(&s.compose(&s.identity(2), f2).unwrap(), f2));
        assert_eq!(s.trace(&s.identity(1)).unwrap(), q(-2));
        assert_eq!(s.trace(f2).unwrap(), q(3));
        assert_eq!(s.trace(s.projector(3).unwrap()).unwrap(), q(-4));
    }

    #[test]
    fn f2_explicit() {
        let s = Skein::rational(2);
        let expect = s.add(&s.identity(2), &s.scale(&s.u_gen(2, 0), &Rational::new(1, 2))).unwrap();
        assert!(s.equal(s.projector(2).unwrap(), &expect));
        let f2 = s.projector(2).unwrap();
        assert!(s.equal(&s.compose(f2, f2).unwrap(), f2));
    }

    #[test]
    fn crossing_is_three_term() {
        let s = Skein::rational(1);
        let x = s.permutation_to_skein(&[1, 0]);
        let expect = s.scale(&s.add(&s.identity(2), &s.u_gen(2, 0)).unwrap(), &q(-1));
        assert!(s.equal(&x, &expect));
        // X² = id and the braid relation
        assert!(s.equal(&s.compose(&x, &x).unwrap(), &s.identity(2)));
        let x1 = s.pad(&x, 0, 1);
        let x2 = s.pad(&x, 1, 0);
        let lhs = s.compose(&x1, &s.compose(&x2, &x1).unwrap()).unwrap();
        let rhs = s.compose(&x2, &s.compose(&x1, &x2).unwrap()).unwrap();
        assert!(s.equal(&lhs, &rhs));
    }

    #[test]
    fn crossing_against_cap() {
        // a cap absorbs a crossing: −cap − (−2)cap = cap
        let s = Skein::rational(1);
        let x = s.crossing();
        let capped = s.compose(&s.cap(), &x).unwrap();
        assert!(s.equal(&capped, &s.cap()));
    }

    #[test]
    fn tensor_identities() {
        let s = Skein::rational(3);
        let f1 = s.projector(1).unwrap();
        assert!(s.equal(&s.tensor(f1, f1), &s.identity(2)));
        let e = s.identity(0);
        assert!(s.equal(&s.tensor(&e, f1), f1));
        let f3 = s.projector(3).unwrap();
        let t = s.tensor(f1, s.projector(2).unwrap());
        assert!(!s.equal(&t, f3));
        assert!(s.equal(&s.compose(f3, &t).unwrap(), f3));
    }

    #[test]
    fn theta_values() {
        assert_eq!(theta_closed_form(1, 1, 2).unwrap(), q(3));
        assert_eq!(theta_closed_form(2, 2, 2).unwrap(), q(-3));
        for j in 0..6 {
            assert_eq!(theta_closed_form(0, j, j).unwrap(), delta(j));
        }
        assert!(matches!(theta_closed_form(1, 1, 1), Err(Error::NotAdmissible(..))));
        let s = Skein::rational(2);
        assert_eq!(s.theta_pairing(1, 1, 2).unwrap(), q(3));
        assert!(s.vertex(1, 1, 1).is_err());
    }

    #[test]
    fn vertex_near_bound_mod_p() {
        let ctx = PrimeContext::new(5).unwrap();
        let s = Skein::new(ctx.clone(), 3).unwrap();
        let v = s.theta_pairing(3, 3, 2).unwrap();
        assert_eq!(v, crate::scalar::psi_p(&theta_closed_form(3, 3, 2).unwrap(), &ctx).unwrap());
        assert!(matches!(s.vertex(4, 2, 2), Err(Error::ColorOutOfRange { .. })));
    }

    #[test]
    fn orthogonality_examples() {
        let s = Skein::rational(3);
        assert_eq!(s.orthogonality_check(2, 2, 1, 1).unwrap(), q(1));
        assert_eq!(s.orthogonality_check(0, 2, 1, 1).unwrap(), q(0));
    }

    #[test]
    fn decomposition_small() {
        let ctx = PrimeContext::new(7).unwrap();
        let d = identity_decomposition(1, 1, &ctx).unwrap();
        assert_eq!(d.iter().map(|(k, c)| (*k, c.value())).collect::<Vec<_>>(), vec![(0, 3), (2, 1)]);
        let d = identity_decomposition(0, 3, &ctx).unwrap();
        assert_eq!(d.iter().map(|(k, c)| (*k, c.value())).collect::<Vec<_>>(), vec![(3, 1)]);
    }

    #[test]
    fn mirror_involution() {
        for m in simple_basis(3, 5) {
            assert_eq!(m.mirror().mirror(), m);
        }
        assert_eq!(simple_basis(4, 4).len(), 14);
    }
}
