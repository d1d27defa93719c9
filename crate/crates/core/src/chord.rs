//! Chord diagrams on oriented circles, with internal trivalent graphs.
//!
//! Nodes are legs (one half-edge, sitting on a circle) or internal vertices
//! (three half-edges in counterclockwise order). A half-edge is addressed as
//! `(node, slot)`. Every public constructor returns the canonical form, so
//! structural equality is diagram equality.

use std::collections::btree_map::Entry;
use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use smallvec::{smallvec, SmallVec};

use crate::error::{Error, Result};
use crate::scalar::Rational;

type HalfEdge = (u32, u8);
type Slots = SmallVec<[HalfEdge; 3]>;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ChordDiagram {
    circles: Vec<Vec<u32>>,
    nodes: Vec<Slots>,
}

impl ChordDiagram {
    /// No legs on `circles` circles.
    pub fn empty(circles: usize) -> Self {
        ChordDiagram { circles: vec![Vec::new(); circles], nodes: Vec::new() }
    }

    /// Build from raw parts and canonicalize.
    ///
    /// `circles` lists leg node ids in order along each circle; `nodes[n]`
    /// holds the partners of the half-edges of node `n` (one for a leg, three
    /// counterclockwise for an internal vertex). Nodes not reachable from a leg
    /// must be absent or have no slots.
    pub fn from_parts(circles: Vec<Vec<u32>>, nodes: Vec<Vec<HalfEdge>>) -> Result<Self> {
        let nodes: Vec<Slots> = nodes.into_iter().map(SmallVec::from_vec).collect();
        let raw = ChordDiagram { circles, nodes };
        raw.check()?;
        raw.canonical()
    }

    /// Pure chord diagram from label sequences: each label occurs exactly twice overall.
    pub fn from_chords(circles: &[Vec<usize>]) -> Result<Self> {
        let mut first: BTreeMap<usize, u32> = BTreeMap::new();
        let mut nodes: Vec<Vec<HalfEdge>> = Vec::new();
        let mut ids = Vec::new();
        for c in circles {
            let mut row = Vec::new();
            for &label in c {
                let id = nodes.len() as u32;
                nodes.push(vec![(u32::MAX, 0)]);
                row.push(id);
                match first.remove(&label) {
                    Some(other) => {
                        nodes[other as usize][0] = (id, 0);
                        nodes[id as usize][0] = (other, 0);
                    }
                    None => {
                        first.insert(label, id);
                    }
                }
            }
            ids.push(row);
        }
        if let Some(label) = first.keys().next() {
            return Err(Error::Malformed(format!("chord {label} has one end")));
        }
        Self::from_parts(ids, nodes)
    }

    /// One internal vertex joined to three consecutive legs on circle 0, counterclockwise in leg order.
    pub fn tripod(circles: usize) -> Self {
        let mut c = vec![Vec::new(); circles.max(1)];
        c[0] = vec![0, 1, 2];
        let nodes = vec![vec![(3, 0)], vec![(3, 1)], vec![(3, 2)], vec![(0, 0), (1, 0), (2, 0)]];
        Self::from_parts(c, nodes).expect("tripod is well formed")
    }

    /// `l` consecutive isolated chords on circle `i` of `circles`.
    pub fn theta_power(i: usize, l: usize, circles: usize) -> Self {
        let mut c = vec![Vec::new(); circles];
        c[i] = (0..2 * l).map(|k| k / 2).collect();
        Self::from_chords(&c).expect("theta power is well formed")
    }

    pub fn circle_count(&self) -> usize {
        self.circles.len()
    }

    /// Leg node ids along circle `i`.
    pub fn legs_on(&self, i: usize) -> &[u32] {
        &self.circles[i]
    }

    pub fn leg_counts(&self) -> Vec<usize> {
        self.circles.iter().map(|c| c.len()).collect()
    }

    pub fn leg_count(&self) -> usize {
        self.circles.iter().map(|c| c.len()).sum()
    }

    pub fn internal_vertex_count(&self) -> usize {
        self.nodes.iter().filter(|s| s.len() == 3).count()
    }

    pub fn degree(&self) -> usize {
        (self.leg_count() + self.internal_vertex_count()) / 2
    }

    pub fn is_pure(&self) -> bool {
        self.internal_vertex_count() == 0
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_leg(&self, node: u32) -> bool {
        self.nodes[node as usize].len() == 1
    }

    /// Partner of a half-edge.
    pub fn partner(&self, h: HalfEdge) -> HalfEdge {
        self.nodes[h.0 as usize][h.1 as usize]
    }

    /// Circle and position of every leg, indexed by node id.
    pub fn leg_positions(&self) -> BTreeMap<u32, (usize, usize)> {
        let mut m = BTreeMap::new();
        for (c, legs) in self.circles.iter().enumerate() {
            for (p, &l) in legs.iter().enumerate() {
                m.insert(l, (c, p));
            }
        }
        m
    }

    /// Internal vertex ids.
    pub fn internal_vertices(&self) -> Vec<u32> {
        (0..self.nodes.len() as u32).filter(|&n| self.nodes[n as usize].len() == 3).collect()
    }

    /// All edges as unordered half-edge pairs, each listed once.
    pub fn edges(&self) -> Vec<(HalfEdge, HalfEdge)> {
        let mut out = Vec::new();
        for (n, slots) in self.nodes.iter().enumerate() {
            for (s, &q) in slots.iter().enumerate() {
                let h = (n as u32, s as u8);
                if h < q {
                    out.push((h, q));
                }
            }
        }
        out
    }

    fn check(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Malformed(m));
        let mut on_circle = vec![false; self.nodes.len()];
        for legs in &self.circles {
            for &l in legs {
                let Some(slots) = self.nodes.get(l as usize) else {
                    return bad(format!("leg {l} missing"));
                };
                if slots.len() != 1 || on_circle[l as usize] {
                    return bad(format!("leg {l} listed twice or not univalent"));
                }
                on_circle[l as usize] = true;
            }
        }
        for (n, slots) in self.nodes.iter().enumerate() {
            match slots.len() {
                0 => continue,
                1 if on_circle[n] => {}
                3 => {}
                k => return bad(format!("node {n} has {k} half-edges")),
            }
            for (s, &(m, t)) in slots.iter().enumerate() {
                let back = self.nodes.get(m as usize).and_then(|x| x.get(t as usize));
                if back != Some(&(n as u32, s as u8)) || (m as usize, t as usize) == (n, s) {
                    return bad(format!("half-edge ({n},{s}) is not paired"));
                }
            }
        }
        Ok(())
    }

    /// Relabel with the given rotation of each circle; BFS numbering of internal vertices.
    fn relabel(&self, rot: &[usize]) -> Result<ChordDiagram> {
        let n_legs = self.leg_count();
        let mut new_id = vec![u32::MAX; self.nodes.len()];
        let mut shift = vec![0u8; self.nodes.len()];
        let mut circles = Vec::with_capacity(self.circles.len());
        let mut next = 0u32;
        let mut order: Vec<u32> = Vec::with_capacity(self.nodes.len());
        for (c, legs) in self.circles.iter().enumerate() {
            let n = legs.len();
            let mut row = Vec::with_capacity(n);
            for k in 0..n {
                let old = legs[(k + rot[c]) % n];
                new_id[old as usize] = next;
                order.push(old);
                row.push(next);
                next += 1;
            }
            circles.push(row);
        }
        let mut queue: VecDeque<u32> = order.iter().copied().collect();
        let mut vertex_next = n_legs as u32;
        while let Some(old) = queue.pop_front() {
            let slots = &self.nodes[old as usize];
            let k = slots.len();
            for j in 0..k {
                let s = (j + shift[old as usize] as usize) % k;
                let (m, t) = slots[s];
                if self.nodes[m as usize].len() == 3 && new_id[m as usize] == u32::MAX {
                    new_id[m as usize] = vertex_next;
                    shift[m as usize] = t;
                    vertex_next += 1;
                    order.push(m);
                    queue.push_back(m);
                }
            }
        }
        let alive = self.nodes.iter().filter(|s| s.len() == 3).count();
        if order.len() != n_legs + alive {
            return Err(Error::DisconnectedFromCircle);
        }
        let nodes: Vec<Slots> = order
            .iter()
            .map(|&old| {
                let slots = &self.nodes[old as usize];
                let k = slots.len();
                (0..k)
                    .map(|j| {
                        let (m, t) = slots[(j + shift[old as usize] as usize) % k];
                        let kt = self.nodes[m as usize].len();
                        let nt = (t as usize + kt - shift[m as usize] as usize) % kt;
                        (new_id[m as usize], nt as u8)
                    })
                    .collect()
            })
            .collect();
        Ok(ChordDiagram { circles, nodes })
    }

    fn canonical(&self) -> Result<ChordDiagram> {
        let sizes: Vec<usize> = self.circles.iter().map(|c| c.len().max(1)).collect();
        let mut rot = vec![0usize; sizes.len()];
        let mut best: Option<ChordDiagram> = None;
        loop {
            let d = self.relabel(&rot)?;
            if best.as_ref().map_or(true, |b| d < *b) {
                best = Some(d);
            }
            let mut i = 0;
            loop {
                if i == rot.len() {
                    return Ok(best.unwrap_or_else(|| ChordDiagram::empty(0)));
                }
                rot[i] += 1;
                if rot[i] < sizes[i] {
                    break;
                }
                rot[i] = 0;
                i += 1;
            }
        }
    }

    /// The canonical form (constructors already return it; this is idempotent).
    pub fn canonicalize(&self) -> Result<ChordDiagram> {
        self.check()?;
        self.canonical()
    }

    /// Reverse the cyclic order at an internal vertex; the result carries coefficient −1.
    pub fn as_rewrite(&self, vertex: u32) -> Result<DiagramSum> {
        if self.nodes.get(vertex as usize).map(|s| s.len()) != Some(3) {
            return Err(Error::NotInternal(vertex as usize));
        }
        let mut raw = self.clone();
        let v = vertex as usize;
        raw.nodes[v].swap(1, 2);
        for s in 1..3u8 {
            let (m, t) = raw.nodes[v][s as usize];
            if m as usize == v {
                raw.nodes[v][s as usize].1 = 3 - t;
            } else {
                raw.nodes[m as usize][t as usize] = (vertex, s);
            }
        }
        let mut out = DiagramSum::zero(self.circle_count());
        out.add_term(raw.canonicalize()?, -Rational::one());
        Ok(out)
    }

    /// One STU step at the first leg attached to an internal vertex.
    fn stu_step(&self) -> Option<(ChordDiagram, ChordDiagram)> {
        let (c, pos, leg) = self.circles.iter().enumerate().find_map(|(c, legs)| {
            legs.iter().enumerate().find(|(_, &l)| self.nodes[self.nodes[l as usize][0].0 as usize].len() == 3).map(|(p, &l)| (c, p, l))
        })?;
        let (v, sl) = self.nodes[leg as usize][0];
        let x = (sl as usize + 1) % 3;
        let y = (sl as usize + 2) % 3;
        let build = |first: usize, second: usize| -> ChordDiagram {
            let mut raw = self.clone();
            let a = raw.nodes.len() as u32;
            let b = a + 1;
            let ends = [raw.nodes[v as usize][first], raw.nodes[v as usize][second]];
            raw.nodes.push(smallvec![(0, 0)]);
            raw.nodes.push(smallvec![(0, 0)]);
            for (new, (m, t)) in [(a, ends[0]), (b, ends[1])] {
                if m == v {
                    // self-loop at v: the two new legs join each other
                    raw.nodes[new as usize][0] = (if new == a { b } else { a }, 0);
                } else {
                    raw.nodes[new as usize][0] = (m, t);
                    raw.nodes[m as usize][t as usize] = (new, 0);
                }
            }
            raw.nodes[v as usize].clear();
            raw.nodes[leg as usize].clear();
            raw.circles[c].splice(pos..pos + 1, [a, b]);
            raw.canonical().expect("STU keeps every component attached")
        };
        Some((build(x, y), build(y, x)))
    }

    /// Rewrite into pure chord diagrams by repeated STU.
    pub fn stu_reduce(&self) -> Result<DiagramSum> {
        self.check()?;
        self.canonical()?;
        let mut out = DiagramSum::zero(self.circle_count());
        let mut stack = vec![(self.clone(), Rational::one())];
        while let Some((d, c)) = stack.pop() {
            match d.stu_step() {
                None => out.add_term(d, c),
                Some((s, u)) => {
                    stack.push((u, -c.clone()));
                    stack.push((s, c));
                }
            }
        }
        Ok(out)
    }

    /// Reverse the orientation of circle `i`.
    pub fn reverse_circle(&self, i: usize) -> ChordDiagram {
        let mut raw = self.clone();
        raw.circles[i].reverse();
        raw.canonical().expect("reversal keeps the diagram well formed")
    }

    /// Disjoint relabeling of `other` appended to `self`'s node table; returns the id offset.
    fn absorb(&self, other: &ChordDiagram) -> (ChordDiagram, u32) {
        let off = self.nodes.len() as u32;
        let mut raw = self.clone();
        raw.nodes.extend(other.nodes.iter().map(|s| s.iter().map(|&(m, t)| (m + off, t)).collect::<Slots>()));
        (raw, off)
    }

    /// Connected sum along every circle at the basepoints.
    pub fn multiply(&self, other: &ChordDiagram) -> Result<ChordDiagram> {
        if self.circle_count() != other.circle_count() {
            return Err(Error::SizeMismatch(format!("{} vs {} circles", self.circle_count(), other.circle_count())));
        }
        let (mut raw, off) = self.absorb(other);
        for (c, legs) in other.circles.iter().enumerate() {
            raw.circles[c].extend(legs.iter().map(|&l| l + off));
        }
        raw.canonical()
    }

    /// Insert `other`, supported on circle `i` only, after position `offset` of circle `i`.
    pub fn multiply_on_circle(&self, other: &ChordDiagram, i: usize, offset: usize) -> Result<ChordDiagram> {
        if other.circles.iter().enumerate().any(|(c, l)| c != i && !l.is_empty()) {
            return Err(Error::Malformed("second factor has legs off the chosen circle".into()));
        }
        if offset > self.circles[i].len() {
            return Err(Error::OutOfRange(format!("offset {offset}")));
        }
        let (mut raw, off) = self.absorb(other);
        let ins: Vec<u32> = other.circles[i].iter().map(|&l| l + off).collect();
        raw.circles[i].splice(offset..offset, ins);
        raw.canonical()
    }

    /// Move the legs of circle `from` selected by `mask` (bit k = k-th leg) to the
    /// start of circle `to`, keeping their order.
    pub fn move_legs(&self, from: usize, to: usize, mask: u64) -> ChordDiagram {
        let mut raw = self.clone();
        let legs = std::mem::take(&mut raw.circles[from]);
        let (moved, kept): (Vec<_>, Vec<_>) = legs.iter().enumerate().partition(|(k, _)| mask >> k & 1 == 1);
        raw.circles[from] = kept.into_iter().map(|(_, &l)| l).collect();
        let mut dest: Vec<u32> = moved.into_iter().map(|(_, &l)| l).collect();
        dest.extend(raw.circles[to].iter().copied());
        raw.circles[to] = dest;
        raw.canonical().expect("moving legs keeps the diagram well formed")
    }

    /// Kept by φ_n: every circle carries at least 2n legs.
    pub fn survives_phi(&self, n: usize) -> bool {
        self.circles.iter().all(|c| c.len() >= 2 * n)
    }

    /// Parse a single diagram (a one-term sum with coefficient 1).
    pub fn parse(text: &str) -> Result<ChordDiagram> {
        let sum = DiagramSum::parse(text)?;
        match sum.terms.into_iter().collect::<Vec<_>>().as_slice() {
            [(d, c)] if c.is_one() => Ok(d.clone()),
            _ => Err(Error::Parse("expected a single diagram".into())),
        }
    }

    fn write_body(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (c, legs) in self.circles.iter().enumerate() {
            for (p, l) in legs.iter().enumerate() {
                writeln!(f, "leg {l} circle {c} pos {p}")?;
            }
        }
        for v in self.internal_vertices() {
            let slots = &self.nodes[v as usize];
            // choose the rotation under which occurrence order reproduces double edges
            let rot = (0..3)
                .find(|&r| {
                    (0..3).all(|j| {
                        let (m, t) = slots[(j + r) % 3];
                        if m == v || self.nodes[m as usize].len() != 3 || m > v {
                            return true;
                        }
                        let mine = (0..3).map(|q| (q + r) % 3).filter(|&q| slots[q].0 == m).position(|q| q == (j + r) % 3);
                        let theirs = (0..3).filter(|&q| self.nodes[m as usize][q].0 == v).position(|q| q == t as usize);
                        mine == theirs
                    })
                })
                .unwrap_or(0);
            let n: Vec<String> = (0..3).map(|j| slots[(j + rot) % 3].0.to_string()).collect();
            writeln!(f, "ivertex {v} cyclic {}", n.join(" "))?;
        }
        for ((a, _), (b, _)) in self.edges() {
            writeln!(f, "edge {a} {b}")?;
        }
        Ok(())
    }
}

impl fmt::Display for ChordDiagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "circles {}", self.circle_count())?;
        self.write_body(f)
    }
}

/// A finite linear combination of canonical diagrams with rational coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiagramSum {
    circles: usize,
    terms: BTreeMap<ChordDiagram, Rational>,
}

impl DiagramSum {
    pub fn zero(circles: usize) -> Self {
        DiagramSum { circles, terms: BTreeMap::new() }
    }

    pub fn single(d: ChordDiagram) -> Self {
        let mut s = DiagramSum::zero(d.circle_count());
        s.add_term(d, Rational::one());
        s
    }

    pub fn circle_count(&self) -> usize {
        self.circles
    }

    pub fn add_term(&mut self, d: ChordDiagram, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(d) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += &c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (&ChordDiagram, &Rational)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn scale(&self, c: &Rational) -> DiagramSum {
        let mut out = DiagramSum::zero(self.circles);
        for (d, v) in &self.terms {
            out.add_term(d.clone(), v * c);
        }
        out
    }

    pub fn add(&self, other: &DiagramSum) -> DiagramSum {
        let mut out = self.clone();
        for (d, v) in &other.terms {
            out.add_term(d.clone(), v.clone());
        }
        out
    }

    pub fn multiply(&self, other: &DiagramSum) -> Result<DiagramSum> {
        let mut out = DiagramSum::zero(self.circles);
        for (a, x) in &self.terms {
            for (b, y) in &other.terms {
                out.add_term(a.multiply(b)?, x * y);
            }
        }
        Ok(out)
    }

    /// Kill every diagram with some circle carrying fewer than 2n legs.
    pub fn phi(&self, n: usize) -> DiagramSum {
        DiagramSum {
            circles: self.circles,
            terms: self.terms.iter().filter(|(d, _)| d.survives_phi(n)).map(|(d, c)| (d.clone(), c.clone())).collect(),
        }
    }

    /// Rewrite every term into pure chord diagrams.
    pub fn stu_reduce(&self) -> Result<DiagramSum> {
        let mut out = DiagramSum::zero(self.circles);
        for (d, c) in &self.terms {
            for (e, k) in d.stu_reduce()?.iter() {
                out.add_term(e.clone(), c * k);
            }
        }
        Ok(out)
    }

    /// Parse the text format: `circles L`, then `coeff a/b` blocks of diagram lines.
    pub fn parse(text: &str) -> Result<DiagramSum> {
        let series = DiagramSeries::parse(text)?;
        if series.sums.len() > 1 || series.explicit_grading {
            return Err(Error::Parse("expected an ungraded sum".into()));
        }
        Ok(series.sums.into_iter().next().unwrap_or_else(|| DiagramSum::zero(series.circles)))
    }

    fn write_blocks(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (d, c) in &self.terms {
            writeln!(f, "coeff {c}")?;
            d.write_body(f)?;
        }
        Ok(())
    }
}

impl fmt::Display for DiagramSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "circles {}", self.circles)?;
        self.write_blocks(f)
    }
}

/// Diagram sums indexed by the power of ħ, truncated at `order`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiagramSeries {
    circles: usize,
    sums: Vec<DiagramSum>,
    explicit_grading: bool,
}

impl DiagramSeries {
    pub fn new(circles: usize, order: usize) -> Self {
        DiagramSeries { circles, sums: vec![DiagramSum::zero(circles); order + 1], explicit_grading: true }
    }

    pub fn from_sums(circles: usize, sums: Vec<DiagramSum>) -> Self {
        DiagramSeries { circles, sums, explicit_grading: true }
    }

    /// The constant series 1·(empty diagram).
    pub fn one(circles: usize, order: usize) -> Self {
        let mut s = DiagramSeries::new(circles, order);
        s.sums[0] = DiagramSum::single(ChordDiagram::empty(circles));
        s
    }

    pub fn circle_count(&self) -> usize {
        self.circles
    }

    pub fn order(&self) -> usize {
        self.sums.len().saturating_sub(1)
    }

    pub fn coeff(&self, m: usize) -> &DiagramSum {
        &self.sums[m]
    }

    pub fn coeffs(&self) -> &[DiagramSum] {
        &self.sums
    }

    pub fn add_term(&mut self, m: usize, d: ChordDiagram, c: Rational) {
        if m < self.sums.len() {
            self.sums[m].add_term(d, c);
        }
    }

    pub fn truncate(&self, order: usize) -> DiagramSeries {
        let mut s = self.clone();
        s.sums.truncate(order + 1);
        s
    }

    /// Multiply by ħ^k, keeping the order.
    pub fn shift(&self, k: usize) -> DiagramSeries {
        let mut out = DiagramSeries::new(self.circles, self.order());
        for m in 0..self.sums.len() {
            if m + k < out.sums.len() {
                out.sums[m + k] = self.sums[m].clone();
            }
        }
        out
    }

    /// Truncated product, at the smaller order.
    pub fn multiply(&self, other: &DiagramSeries) -> Result<DiagramSeries> {
        let order = self.order().min(other.order());
        let mut out = DiagramSeries::new(self.circles, order);
        for a in 0..=order {
            for b in 0..=order - a {
                let prod = self.sums[a].multiply(&other.sums[b])?;
                out.sums[a + b] = out.sums[a + b].add(&prod);
            }
        }
        Ok(out)
    }

    /// Π_i exp(ħ f_i θ_i / 2), truncated at `order`.
    pub fn framing_exponential(framings: &[i64], order: usize) -> DiagramSeries {
        let l = framings.len();
        let mut out = DiagramSeries::new(l, order);
        let mut exps = vec![0usize; l];
        loop {
            let m: usize = exps.iter().sum();
            if m <= order {
                let mut d = ChordDiagram::empty(l);
                let mut c = Rational::one();
                for (i, &e) in exps.iter().enumerate() {
                    d = d.multiply(&ChordDiagram::theta_power(i, e, l)).expect("same support");
                    c = c * Rational::new(framings[i], 2).pow(e as i32) / Rational::factorial(e as u64);
                }
                out.sums[m].add_term(d, c);
            }
            let mut i = 0;
            loop {
                if i == l {
                    return out;
                }
                exps[i] += 1;
                if exps[..=i].iter().sum::<usize>() <= order {
                    break;
                }
                exps[i] = 0;
                i += 1;
            }
        }
    }

    pub fn parse(text: &str) -> Result<DiagramSeries> {
        let mut circles: Option<usize> = None;
        let mut order: Option<usize> = None;
        let mut graded = false;
        let mut sections: BTreeMap<usize, Vec<(Rational, Vec<(usize, String)>)>> = BTreeMap::new();
        let mut current = 0usize;
        for (ln, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let err = |m: &str| Error::Parse(format!("line {}: {m}", ln + 1));
            let toks: Vec<&str> = line.split_whitespace().collect();
            match toks[0] {
                "circles" => circles = Some(toks.get(1).and_then(|t| t.parse().ok()).ok_or_else(|| err("bad circle count"))?),
                "order" => order = Some(toks.get(1).and_then(|t| t.parse().ok()).ok_or_else(|| err("bad order"))?),
                "hbar" => {
                    current = toks.get(1).and_then(|t| t.parse().ok()).ok_or_else(|| err("bad hbar degree"))?;
                    graded = true;
                    sections.entry(current).or_default();
                }
                "coeff" => {
                    let c: Rational = toks.get(1).ok_or_else(|| err("missing coefficient"))?.parse().map_err(|_| err("bad coefficient"))?;
                    sections.entry(current).or_default().push((c, Vec::new()));
                }
                "leg" | "ivertex" | "edge" => {
                    let blocks = sections.entry(current).or_default();
                    if blocks.is_empty() {
                        blocks.push((Rational::one(), Vec::new()));
                    }
                    blocks.last_mut().unwrap().1.push((ln + 1, line.to_string()));
                }
                other => return Err(err(&format!("unknown keyword {other}"))),
            }
        }
        let circles = circles.ok_or_else(|| Error::Parse("missing circles header".into()))?;
        let top = sections.keys().next_back().copied().unwrap_or(0);
        let order = order.unwrap_or(top);
        if top > order {
            return Err(Error::Parse(format!("hbar degree {top} above order {order}")));
        }
        let mut sums = vec![DiagramSum::zero(circles); order + 1];
        for (m, blocks) in sections {
            for (c, lines) in blocks {
                sums[m].add_term(parse_body(circles, &lines)?, c);
            }
        }
        Ok(DiagramSeries { circles, sums, explicit_grading: graded })
    }
}

impl fmt::Display for DiagramSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "circles {}", self.circles)?;
        writeln!(f, "order {}", self.order())?;
        for (m, s) in self.sums.iter().enumerate() {
            if !s.is_empty() {
                writeln!(f, "hbar {m}")?;
                s.write_blocks(f)?;
            }
        }
        Ok(())
    }
}

fn parse_body(circles: usize, lines: &[(usize, String)]) -> Result<ChordDiagram> {
    let mut legs: BTreeMap<u64, (usize, usize)> = BTreeMap::new();
    let mut verts: BTreeMap<u64, [u64; 3]> = BTreeMap::new();
    let mut edges: Vec<(u64, u64)> = Vec::new();
    for (ln, line) in lines {
        let err = |m: &str| Error::Parse(format!("line {ln}: {m}"));
        let t: Vec<&str> = line.split_whitespace().collect();
        let num = |i: usize| -> Result<u64> { t.get(i).and_then(|s| s.parse().ok()).ok_or_else(|| err("expected a number")) };
        match t[0] {
            "leg" => {
                if t.get(2) != Some(&"circle") || t.get(4) != Some(&"pos") {
                    return Err(err("expected 'leg <id> circle <i> pos <j>'"));
                }
                if legs.insert(num(1)?, (num(3)? as usize, num(5)? as usize)).is_some() {
                    return Err(err("duplicate leg id"));
                }
            }
            "ivertex" => {
                if t.get(2) != Some(&"cyclic") || t.len() != 6 {
                    return Err(err("expected 'ivertex <id> cyclic <a> <b> <c>'"));
                }
                if verts.insert(num(1)?, [num(3)?, num(4)?, num(5)?]).is_some() {
                    return Err(err("duplicate vertex id"));
                }
            }
            _ => edges.push((num(1)?, num(2)?)),
        }
    }
    let mut ids: BTreeMap<u64, u32> = BTreeMap::new();
    for &k in legs.keys().chain(verts.keys()) {
        if ids.insert(k, ids.len() as u32).is_some() {
            return Err(Error::Parse(format!("id {k} used by a leg and a vertex")));
        }
    }
    let mut circ: Vec<BTreeMap<usize, u32>> = vec![BTreeMap::new(); circles];
    for (k, &(c, p)) in &legs {
        let row = circ.get_mut(c).ok_or_else(|| Error::Parse(format!("circle {c} out of range")))?;
        if row.insert(p, ids[k]).is_some() {
            return Err(Error::Parse(format!("two legs at circle {c} pos {p}")));
        }
    }
    let circle_lists: Vec<Vec<u32>> = circ
        .into_iter()
        .enumerate()
        .map(|(c, row)| {
            if row.keys().copied().eq(0..row.len()) {
                Ok(row.into_values().collect())
            } else {
                Err(Error::Parse(format!("positions on circle {c} are not 0..n")))
            }
        })
        .collect::<Result<_>>()?;
    // free slots per (node, neighbour), in cyclic order
    let mut pending: BTreeMap<(u32, u32), VecDeque<u8>> = BTreeMap::new();
    let lookup = |k: u64| ids.get(&k).copied().ok_or_else(|| Error::Parse(format!("unknown node {k}")));
    let mut nodes: Vec<Vec<HalfEdge>> = vec![Vec::new(); ids.len()];
    for (k, nb) in &verts {
        let v = ids[k];
        nodes[v as usize] = vec![(u32::MAX, 0); 3];
        for (s, &n) in nb.iter().enumerate() {
            pending.entry((v, lookup(n)?)).or_default().push_back(s as u8);
        }
    }
    let mut leg_used: BTreeSet<u32> = BTreeSet::new();
    for k in legs.keys() {
        nodes[ids[k] as usize] = vec![(u32::MAX, 0)];
    }
    let mut take = |a: u32, b: u32, pending: &mut BTreeMap<(u32, u32), VecDeque<u8>>| -> Result<u8> {
        if nodes[a as usize].len() == 1 {
            if !leg_used.insert(a) {
                return Err(Error::Parse(format!("leg {a} has two edges")));
            }
            return Ok(0);
        }
        pending
            .get_mut(&(a, b))
            .and_then(|q| q.pop_front())
            .ok_or_else(|| Error::Parse("edge does not match the vertex cyclic lists".into()))
    };
    let mut links = Vec::new();
    for &(x, y) in &edges {
        let (a, b) = (lookup(x)?, lookup(y)?);
        let sa = take(a, b, &mut pending)?;
        let sb = take(b, a, &mut pending)?;
        links.push(((a, sa), (b, sb)));
    }
    if pending.values().any(|q| !q.is_empty()) {
        return Err(Error::Parse("vertex lists name edges that are missing".into()));
    }
    for ((a, sa), (b, sb)) in links {
        nodes[a as usize][sa as usize] = (b, sb);
        nodes[b as usize][sb as usize] = (a, sa);
    }
    if nodes.iter().any(|s| s.iter().any(|h| h.0 == u32::MAX)) {
        return Err(Error::Parse("some half-edge has no edge".into()));
    }
    ChordDiagram::from_parts(circle_lists, nodes).map_err(|e| match e {
        Error::DisconnectedFromCircle => e,
        other => Error::Parse(other.to_string()),
    })
}

/// Diagrams of the given degree on `circles` circles in which no edge joins two
/// legs and every internal component reaches a leg.
pub fn generate_i1(degree: usize, circles: usize) -> Vec<ChordDiagram> {
    generate(degree, circles, false)
}

/// Every diagram of the given degree on `circles` circles whose internal components reach a leg.
pub fn generate_all(degree: usize, circles: usize) -> Vec<ChordDiagram> {
    generate(degree, circles, true)
}

fn generate(degree: usize, circles: usize, chords: bool) -> Vec<ChordDiagram> {
    let mut found: BTreeSet<ChordDiagram> = BTreeSet::new();
    if degree == 0 {
        found.insert(ChordDiagram::empty(circles));
    }
    for internal in 0..=2 * degree {
        let legs = 2 * degree - internal;
        if legs == 0 || (legs + 3 * internal) % 2 != 0 || (internal == 0 && !chords) {
            continue;
        }
        for split in compositions(legs, circles) {
            let mut g = Gen { legs, internal, chords, opened: 0, link: vec![None; legs + 3 * internal] };
            let mut out = Vec::new();
            g.run(&mut out);
            for link in out {
                let mut nodes: Vec<Vec<HalfEdge>> = Vec::with_capacity(legs + internal);
                let he = |h: usize| -> HalfEdge {
                    if h < legs {
                        (h as u32, 0)
                    } else {
                        ((legs + (h - legs) / 3) as u32, ((h - legs) % 3) as u8)
                    }
                };
                for h in 0..legs {
                    nodes.push(vec![he(link[h].unwrap())]);
                }
                for v in 0..internal {
                    nodes.push((0..3).map(|s| he(link[legs + 3 * v + s].unwrap())).collect());
                }
                let mut circle_lists = Vec::new();
                let mut next = 0u32;
                for &n in &split {
                    circle_lists.push((next..next + n as u32).collect());
                    next += n as u32;
                }
                if let Ok(d) = ChordDiagram::from_parts(circle_lists, nodes) {
                    found.insert(d);
                }
            }
        }
    }
    found.into_iter().collect()
}

fn compositions(n: usize, parts: usize) -> Vec<Vec<usize>> {
    if parts == 1 {
        return vec![vec![n]];
    }
    (0..=n)
        .flat_map(|k| {
            compositions(n - k, parts - 1).into_iter().map(move |mut rest| {
                rest.insert(0, k);
                rest
            })
        })
        .collect()
}

struct Gen {
    legs: usize,
    chords: bool,
    internal: usize,
    opened: usize,
    link: Vec<Option<usize>>,
}

impl Gen {
    fn active(&self) -> usize {
        self.legs + 3 * self.opened
    }

    fn run(&mut self, out: &mut Vec<Vec<Option<usize>>>) {
        let Some(h) = (0..self.active()).find(|&h| self.link[h].is_none()) else {
            if self.opened == self.internal {
                out.push(self.link.clone());
            }
            return;
        };
        let lowest = if self.chords { h + 1 } else { self.legs.max(h + 1) };
        for g in lowest..self.active() {
            if self.link[g].is_none() {
                self.link[h] = Some(g);
                self.link[g] = Some(h);
                self.run(out);
                self.link[h] = None;
                self.link[g] = None;
            }
        }
        if self.opened < self.internal {
            let g = self.legs + 3 * self.opened;
            self.opened += 1;
            self.link[h] = Some(g);
            self.link[g] = Some(h);
            self.run(out);
            self.link[h] = None;
            self.link[g] = None;
            self.opened -= 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn theta() -> ChordDiagram {
        ChordDiagram::theta_power(0, 1, 1)
    }

    #[test]
    fn rotations_agree() {
        let a = ChordDiagram::from_chords(&[vec![1, 2, 1, 2, 3, 3]]).unwrap();
        let b = ChordDiagram::from_chords(&[vec![2, 1, 2, 3, 3, 1]]).unwrap();
        assert_eq!(a, b);
        let c = ChordDiagram::from_chords(&[vec![1, 1, 2, 2, 3, 3]]).unwrap();
        assert_ne!(a, c);
        assert_eq!(ChordDiagram::empty(2).canonicalize().unwrap(), ChordDiagram::empty(2));
    }

    #[test]
    fn counts() {
        assert_eq!((theta().internal_vertex_count(), theta().leg_counts()), (0, vec![2]));
        let t = ChordDiagram::tripod(1);
        assert_eq!((t.internal_vertex_count(), t.leg_counts(), t.degree()), (1, vec![3], 2));
        assert_eq!(ChordDiagram::empty(1).leg_counts(), vec![0]);
        assert_eq!(ChordDiagram::theta_power(0, 3, 1).degree(), 3);
    }

    #[test]
    fn as_is_an_involution() {
        let t = ChordDiagram::tripod(1);
        let v = t.internal_vertices()[0];
        let once = t.as_rewrite(v).unwrap();
        let (d, c) = once.iter().next().unwrap();
        assert_eq!(*c, -Rational::one());
        let twice = d.as_rewrite(d.internal_vertices()[0]).unwrap();
        assert_eq!(twice.iter().next().unwrap().0, &t);
        assert!(matches!(t.as_rewrite(0), Err(Error::NotInternal(0))));
    }

    #[test]
    fn stu_on_tripod() {
        let s = ChordDiagram::tripod(1).stu_reduce().unwrap();
        assert_eq!(s.len(), 2);
        assert!(s.iter().all(|(d, _)| d.is_pure() && d.degree() == 2));
        assert_eq!(theta().stu_reduce().unwrap(), DiagramSum::single(theta()));
    }

    #[test]
    fn phi_projection() {
        let s = DiagramSum::single(theta());
        assert_eq!(s.phi(1), s);
        assert!(s.phi(2).is_empty());
        assert_eq!(s.phi(0), s);
    }

    #[test]
    fn framing_series() {
        let e = DiagramSeries::framing_exponential(&[1], 2);
        let t2 = ChordDiagram::theta_power(0, 2, 1);
        assert_eq!(e.coeff(2).iter().next().unwrap(), (&t2, &Rational::new(1, 8)));
        let e = DiagramSeries::framing_exponential(&[2], 1);
        assert_eq!(e.coeff(1).iter().next().unwrap().1, &Rational::one());
        assert_eq!(e.coeff(0), &DiagramSum::single(ChordDiagram::empty(1)));
    }

    #[test]
    fn multiplication() {
        let t = theta();
        assert_eq!(t.multiply(&ChordDiagram::empty(1)).unwrap(), t);
        assert_eq!(t.multiply(&t).unwrap(), ChordDiagram::theta_power(0, 2, 1));
    }

    #[test]
    fn text_round_trip() {
        let mut s = DiagramSum::zero(2);
        s.add_term(ChordDiagram::tripod(2), Rational::new(1, 2));
        s.add_term(ChordDiagram::from_chords(&[vec![1, 2], vec![2, 1]]).unwrap(), Rational::from(-3));
        let text = s.to_string();
        let back = DiagramSum::parse(&text).unwrap();
        assert_eq!(back, s);
        assert_eq!(back.to_string(), text);
    }

    #[test]
    fn double_edges_round_trip() {
        for d in generate_i1(3, 1) {
            let again = ChordDiagram::parse(&d.to_string()).unwrap();
            assert_eq!(again, d, "{d}");
        }
    }

    #[test]
    fn i1_generator() {
        let g = generate_i1(2, 1);
        assert!(g.contains(&ChordDiagram::tripod(1)));
        assert!(g.iter().all(|d| d.degree() == 2 && d.internal_vertex_count() >= 1));
    }

    #[test]
    fn chord_diagram_counts() {
        // pure chord diagrams on one circle up to rotation: 1, 2, 5
        for (deg, n) in [(1, 1), (2, 2), (3, 5)] {
            let pure = generate_all(deg, 1).into_iter().filter(|d| d.is_pure()).count();
            assert_eq!(pure, n, "degree {deg}");
        }
        assert_eq!(generate_all(0, 2), vec![ChordDiagram::empty(2)]);
    }

    #[test]
    fn vacuum_rejected() {
        let text = "circles 1\nivertex 0 cyclic 1 1 1\nivertex 1 cyclic 0 0 0\nedge 0 1\nedge 0 1\nedge 0 1\n";
        assert!(matches!(ChordDiagram::parse(text), Err(Error::DisconnectedFromCircle)));
    }
}
