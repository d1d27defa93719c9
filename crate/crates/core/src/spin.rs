//! Spin networks: colored trivalent graphs evaluated through the skein module.
//!
//! A network is evaluated from a movie, a bottom-to-top sequence of slices acting
//! on a row of colored bundles. Abstract graphs are turned into movies by
//! [`SpinGraph::planarize`].

use std::collections::BTreeMap;
use std::fmt;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};
use crate::scalar::{psi_p, Field, FpElem, PrimeContext, Rational, Rationals};
use crate::skein::{admissible, p_admissible, Element, Skein};

/// One elementary slice. Positions index bundles, counted from the left.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Slice {
    /// New pair of bundles of one edge inserted before bundle `pos`.
    Cup { pos: usize, color: usize },
    /// Join bundles `pos` and `pos + 1`.
    Cap { pos: usize },
    /// Bundles `pos`, `pos + 1` meet at a vertex and leave as one bundle of `color`.
    Merge { pos: usize, color: usize },
    /// Bundle `pos` splits into `left` and `right`.
    Split { pos: usize, left: usize, right: usize },
    /// Bundles `pos` and `pos + 1` cross.
    Cross { pos: usize },
    Id,
}

/// A closed network drawn as a movie.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Movie {
    pub slices: Vec<Slice>,
}

impl Movie {
    /// Colors of the bundles after every slice; checks shapes and admissibility.
    fn validate(&self) -> Result<usize> {
        let mut row: Vec<usize> = Vec::new();
        let mut max = 0;
        for (n, s) in self.slices.iter().enumerate() {
            let bad = |msg: &str| Error::Malformed(format!("slice {n}: {msg}"));
            match *s {
                Slice::Cup { pos, color } => {
                    if pos > row.len() {
                        return Err(bad("cup position out of range"));
                    }
                    row.splice(pos..pos, [color, color]);
                    max = max.max(color);
                }
                Slice::Cap { pos } => {
                    if pos + 1 >= row.len() + usize::from(row.is_empty()) || row[pos] != row[pos + 1] {
                        return Err(bad("cap needs two bundles of equal color"));
                    }
                    row.drain(pos..pos + 2);
                }
                Slice::Merge { pos, color } => {
                    if pos + 1 >= row.len() {
                        return Err(bad("merge position out of range"));
                    }
                    let (j, k) = (row[pos], row[pos + 1]);
                    if !admissible(color, j, k) {
                        return Err(Error::NotAdmissible(color, j, k));
                    }
                    row.splice(pos..pos + 2, [color]);
                    max = max.max(color);
                }
                Slice::Split { pos, left, right } => {
                    if pos >= row.len() {
                        return Err(bad("split position out of range"));
                    }
                    let i = row[pos];
                    if !admissible(i, left, right) {
                        return Err(Error::NotAdmissible(i, left, right));
                    }
                    row.splice(pos..pos + 1, [left, right]);
                    max = max.max(left).max(right);
                }
                Slice::Cross { pos } => {
                    if pos + 1 >= row.len() {
                        return Err(bad("cross position out of range"));
                    }
                    row.swap(pos, pos + 1);
                }
                Slice::Id => {}
            }
        }
        if !row.is_empty() {
            return Err(Error::Malformed("network is not closed".into()));
        }
        Ok(max)
    }

    /// Every vertex triple of the movie.
    fn vertex_triples(&self) -> Vec<(usize, usize, usize)> {
        let mut row: Vec<usize> = Vec::new();
        let mut out = Vec::new();
        for s in &self.slices {
            match *s {
                Slice::Cup { pos, color } => {
                    row.splice(pos..pos, [color, color]);
                }
                Slice::Cap { pos } => {
                    row.drain(pos..pos + 2);
                }
                Slice::Merge { pos, color } => {
                    out.push((color, row[pos], row[pos + 1]));
                    row.splice(pos..pos + 2, [color]);
                }
                Slice::Split { pos, left, right } => {
                    out.push((row[pos], left, right));
                    row.splice(pos..pos + 1, [left, right]);
                }
                Slice::Cross { pos } => row.swap(pos, pos + 1),
                Slice::Id => {}
            }
        }
        out
    }

    /// Parse the text format: a `colors name=c ...` header, then one slice per line.
    pub fn parse(text: &str) -> Result<Movie> {
        let mut colors: BTreeMap<String, usize> = BTreeMap::new();
        let mut slices = Vec::new();
        let mut header = false;
        for (ln, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let err = |m: &str| Error::Parse(format!("line {}: {m}", ln + 1));
            let toks: Vec<&str> = line.split_whitespace().collect();
            if toks[0] == "colors" {
                for t in &toks[1..] {
                    let (name, c) = t.split_once('=').ok_or_else(|| err("expected name=color"))?;
                    colors.insert(name.to_string(), c.parse().map_err(|_| err("bad color"))?);
                }
                header = true;
                continue;
            }
            if !header {
                return Err(err("missing colors header"));
            }
            let color_of = |name: &str| colors.get(name).copied().ok_or_else(|| err(&format!("unknown edge {name}")));
            let pos = || -> Result<usize> {
                let at = toks.iter().find(|t| t.starts_with('@')).ok_or_else(|| err("missing @pos"))?;
                at[1..].parse().map_err(|_| err("bad position"))
            };
            let names: Vec<&str> = toks[1..].iter().filter(|t| !t.starts_with('@')).copied().collect();
            let slice = match toks[0] {
                "cup" => Slice::Cup { pos: pos()?, color: color_of(names.first().ok_or_else(|| err("cup needs an edge"))?)? },
                "cap" => Slice::Cap { pos: pos()? },
                "cross" => Slice::Cross { pos: pos()? },
                "id" => Slice::Id,
                "vertex" => {
                    let arrow = names.iter().position(|t| *t == "->").ok_or_else(|| err("vertex needs ->"))?;
                    let (ins, outs) = (&names[..arrow], &names[arrow + 1..]);
                    match (ins.len(), outs.len()) {
                        (1, 2) => Slice::Split { pos: pos()?, left: color_of(outs[0])?, right: color_of(outs[1])? },
                        (2, 1) => Slice::Merge { pos: pos()?, color: color_of(outs[0])? },
                        _ => return Err(err("vertex must be 'a -> b c' or 'a b -> c'")),
                    }
                }
                other => return Err(err(&format!("unknown slice {other}"))),
            };
            slices.push(slice);
        }
        let movie = Movie { slices };
        movie.validate()?;
        Ok(movie)
    }
}

impl fmt::Display for Movie {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // edge names are regenerated: e<color>
        let mut used: Vec<usize> = Vec::new();
        for s in &self.slices {
            match *s {
                Slice::Cup { color, .. } | Slice::Merge { color, .. } => used.push(color),
                Slice::Split { left, right, .. } => {
                    used.push(left);
                    used.push(right);
                }
                _ => {}
            }
        }
        used.sort();
        used.dedup();
        let names: Vec<String> = used.iter().map(|c| format!("c{c}={c}")).collect();
        writeln!(f, "colors {}", names.join(" "))?;
        let mut row: Vec<usize> = Vec::new();
        for s in &self.slices {
            match *s {
                Slice::Cup { pos, color } => {
                    writeln!(f, "cup c{color} @{pos}")?;
                    row.splice(pos..pos, [color, color]);
                }
                Slice::Cap { pos } => {
                    writeln!(f, "cap @{pos}")?;
                    row.drain(pos..pos + 2);
                }
                Slice::Merge { pos, color } => {
                    writeln!(f, "vertex c{} c{} -> c{color} @{pos}", row[pos], row[pos + 1])?;
                    row.splice(pos..pos + 2, [color]);
                }
                Slice::Split { pos, left, right } => {
                    writeln!(f, "vertex c{} -> c{left} c{right} @{pos}", row[pos])?;
                    row.splice(pos..pos + 1, [left, right]);
                }
                Slice::Cross { pos } => {
                    writeln!(f, "cross @{pos}")?;
                    row.swap(pos, pos + 1);
                }
                Slice::Id => writeln!(f, "id")?,
            }
        }
        Ok(())
    }
}

fn bundle_swap<F: Field>(skein: &Skein<F>, a: usize, b: usize) -> Element<F> {
    let sigma: Vec<usize> = (0..a).map(|i| b + i).chain((0..b).map(|i| i)).collect();
    skein.permutation_to_skein(&sigma)
}

/// Evaluate a movie with an existing skein calculator.
pub fn evaluate_with<F: Field>(skein: &Skein<F>, movie: &Movie) -> Result<F::Elem> {
    movie.validate()?;
    let mut row: Vec<usize> = Vec::new();
    let mut state = skein.identity(0);
    let mut swaps: BTreeMap<(usize, usize), Element<F>> = BTreeMap::new();
    for s in &movie.slices {
        let offset = |row: &Vec<usize>, pos: usize| row[..pos].iter().sum::<usize>();
        let width: usize = row.iter().sum();
        let (block, at, consumed) = match *s {
            Slice::Cup { pos, color } => {
                let f = skein.projector(color)?;
                let b = skein.compose(&skein.pad(f, 0, color), &skein.cup_n(color))?;
                let at = offset(&row, pos);
                row.splice(pos..pos, [color, color]);
                (b, at, 0)
            }
            Slice::Cap { pos } => {
                let c = row[pos];
                let at = offset(&row, pos);
                row.drain(pos..pos + 2);
                (skein.cap_n(c), at, 2 * c)
            }
            Slice::Merge { pos, color } => {
                let (j, k) = (row[pos], row[pos + 1]);
                let skeleton = skein.single(Skein::<F>::vertex_skeleton(color, j, k)?.mirror());
                let b = skein.compose(skein.projector(color)?, &skeleton)?;
                let at = offset(&row, pos);
                row.splice(pos..pos + 2, [color]);
                (b, at, j + k)
            }
            Slice::Split { pos, left, right } => {
                let i = row[pos];
                let skeleton = skein.single(Skein::<F>::vertex_skeleton(i, left, right)?);
                let b = skein.compose(&skein.pad(skein.projector(right)?, left, 0), &skeleton)?;
                let b = skein.compose(&skein.pad(skein.projector(left)?, 0, right), &b)?;
                let at = offset(&row, pos);
                row.splice(pos..pos + 1, [left, right]);
                (b, at, i)
            }
            Slice::Cross { pos } => {
                let (a, b) = (row[pos], row[pos + 1]);
                let at = offset(&row, pos);
                row.swap(pos, pos + 1);
                let blk = swaps.entry((a, b)).or_insert_with(|| bundle_swap(skein, a, b)).clone();
                (blk, at, a + b)
            }
            Slice::Id => continue,
        };
        let padded = skein.pad(&block, at, width - at - consumed);
        state = skein.compose(&padded, &state)?;
    }
    Ok(skein.scalar_of(&state))
}

/// e(Γ) in characteristic 0.
pub fn evaluate(movie: &Movie) -> Result<Rational> {
    let max = movie.validate()?;
    let skein = Skein::new(Rationals, max)?;
    evaluate_with(&skein, movie)
}

/// e_p(Γ) computed natively in Z/pZ.
pub fn evaluate_mod_p(movie: &Movie, ctx: &PrimeContext) -> Result<FpElem> {
    let max = movie.validate()?;
    for (i, j, k) in movie.vertex_triples() {
        if !p_admissible(i, j, k, ctx.p()) {
            return Err(Error::NotPAdmissible(i, j, k, ctx.p()));
        }
    }
    let skein = Skein::new(ctx.clone(), max)?;
    evaluate_with(&skein, movie)
}

/// Reference value ψ_p(e(Γ)).
pub fn evaluate_reduced(movie: &Movie, ctx: &PrimeContext) -> Result<FpElem> {
    psi_p(&evaluate(movie)?, ctx)
}

/// An abstract closed trivalent graph with colored edges and counterclockwise
/// cyclic orders at the vertices.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SpinGraph {
    colors: Vec<usize>,
    /// Edges at each vertex in counterclockwise order.
    vertices: Vec<[usize; 3]>,
    /// Colors of vertex-free loops.
    free_loops: Vec<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Strand {
    edge: usize,
    /// (vertex, slot) where this strand must end.
    target: (usize, usize),
}

/// Choices made while drawing a graph; `None` gives the deterministic drawing.
pub struct Embedding<'a, R: Rng> {
    rng: Option<&'a mut R>,
}

impl SpinGraph {
    pub fn new() -> Self {
        SpinGraph::default()
    }

    pub fn add_edge(&mut self, color: usize) -> usize {
        self.colors.push(color);
        self.colors.len() - 1
    }

    /// Add a vertex with its edges listed counterclockwise.
    pub fn add_vertex(&mut self, edges: [usize; 3]) -> usize {
        self.vertices.push(edges);
        self.vertices.len() - 1
    }

    pub fn add_free_loop(&mut self, color: usize) {
        self.free_loops.push(color);
    }

    pub fn edge_count(&self) -> usize {
        self.colors.len()
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    /// The two (vertex, slot) ends of every edge.
    fn ends(&self) -> Result<Vec<Vec<(usize, usize)>>> {
        let mut ends = vec![Vec::new(); self.colors.len()];
        for (v, es) in self.vertices.iter().enumerate() {
            for (s, &e) in es.iter().enumerate() {
                ends.get_mut(e).ok_or_else(|| Error::Malformed(format!("edge {e} missing")))?.push((v, s));
            }
        }
        for (e, list) in ends.iter().enumerate() {
            if list.len() != 2 {
                return Err(Error::Malformed(format!("edge {e} has {} ends", list.len())));
            }
        }
        for es in &self.vertices {
            let c = [self.colors[es[0]], self.colors[es[1]], self.colors[es[2]]];
            if !admissible(c[0], c[1], c[2]) {
                return Err(Error::NotAdmissible(c[0], c[1], c[2]));
            }
        }
        Ok(ends)
    }

    /// The theta graph with edge colors i, j, k.
    pub fn theta(i: usize, j: usize, k: usize) -> SpinGraph {
        let mut g = SpinGraph::new();
        let a = g.add_edge(i);
        let b = g.add_edge(j);
        let c = g.add_edge(k);
        g.add_vertex([a, b, c]);
        g.add_vertex([a, c, b]);
        g
    }

    /// The tetrahedron with edge colors (a,b,c) around one face and (d,e,f) opposite.
    pub fn tetrahedron(colors: [usize; 6]) -> SpinGraph {
        let mut g = SpinGraph::new();
        let e: Vec<usize> = colors.iter().map(|&c| g.add_edge(c)).collect();
        // vertices 0,1,2 on the outer face, 3 in the middle
        // edges: 0:(0,1) 1:(1,2) 2:(2,0) 3:(0,3) 4:(1,3) 5:(2,3)
        g.add_vertex([e[2], e[3], e[0]]);
        g.add_vertex([e[0], e[4], e[1]]);
        g.add_vertex([e[1], e[5], e[2]]);
        g.add_vertex([e[3], e[5], e[4]]);
        g
    }

    /// Draw the graph as a movie.
    pub fn planarize(&self) -> Result<Movie> {
        self.planarize_with::<rand::rngs::ThreadRng>(Embedding { rng: None })
    }

    /// Draw the graph with random choices of order, placement and extra crossings.
    pub fn planarize_random<R: Rng>(&self, rng: &mut R) -> Result<Movie> {
        self.planarize_with(Embedding { rng: Some(rng) })
    }

    fn planarize_with<R: Rng>(&self, mut emb: Embedding<'_, R>) -> Result<Movie> {
        let ends = self.ends()?;
        let mut slices = Vec::new();
        let mut row: Vec<Strand> = Vec::new();
        let mut done = vec![false; self.vertices.len()];
        let other_end = |e: usize, here: (usize, usize)| -> (usize, usize) {
            if ends[e][0] == here {
                ends[e][1]
            } else {
                ends[e][0]
            }
        };
        let move_next_to = |row: &mut Vec<Strand>, slices: &mut Vec<Slice>, i: usize, j: usize| -> usize {
            // moves strand j to sit immediately right of strand i; returns the new index of i
            let (mut i, mut j) = (i, j);
            if j < i {
                while j + 1 < i {
                    slices.push(Slice::Cross { pos: j });
                    row.swap(j, j + 1);
                    j += 1;
                }
                // now j = i-1: swap so that order is (i, j)
                slices.push(Slice::Cross { pos: j });
                row.swap(j, j + 1);
                i -= 1;
                return i;
            }
            while j > i + 1 {
                slices.push(Slice::Cross { pos: j - 1 });
                row.swap(j - 1, j);
                j -= 1;
            }
            i
        };
        loop {
            if let Some(rng) = emb.rng.as_deref_mut() {
                if row.len() >= 2 && rng.gen_bool(0.2) {
                    let pos = rng.gen_range(0..row.len() - 1);
                    slices.push(Slice::Cross { pos });
                    slices.push(Slice::Cross { pos });
                }
            }
            // an edge emitted upward by both of its end vertices is closed by a cap
            let mut joined = false;
            'outer: for i in 0..row.len() {
                for j in i + 1..row.len() {
                    if row[i].edge == row[j].edge && done[row[i].target.0] && done[row[j].target.0] {
                        let i2 = move_next_to(&mut row, &mut slices, i, j);
                        slices.push(Slice::Cap { pos: i2 });
                        row.drain(i2..i2 + 2);
                        joined = true;
                        break 'outer;
                    }
                }
            }
            if joined {
                continue;
            }
            let present = |row: &Vec<Strand>, v: usize| -> Vec<usize> {
                (0..row.len()).filter(|&i| row[i].target.0 == v).collect()
            };
            let mut candidates: Vec<usize> =
                (0..self.vertices.len()).filter(|&v| !done[v] && present(&row, v).len() >= 2).collect();
            if let Some(rng) = emb.rng.as_deref_mut() {
                candidates.shuffle(rng);
            }
            if let Some(&v) = candidates.first() {
                let idx = present(&row, v);
                let es = self.vertices[v];
                // prefer consuming both ends of a loop edge at v
                let pair = idx
                    .iter()
                    .flat_map(|&a| idx.iter().map(move |&b| (a, b)))
                    .filter(|(a, b)| a < b)
                    .find(|(a, b)| row[*a].edge == row[*b].edge)
                    .unwrap_or((idx[0], idx[1]));
                let (mut pa, pb) = pair;
                let (sa, sb) = (row[pa].target.1, row[pb].target.1);
                let c = 3 - sa - sb;
                pa = move_next_to(&mut row, &mut slices, pa, pb);
                // counterclockwise at a merge: output, left input, right input
                if row[pa].target.1 != (c + 1) % 3 {
                    slices.push(Slice::Cross { pos: pa });
                    row.swap(pa, pa + 1);
                }
                let out_edge = es[c];
                slices.push(Slice::Merge { pos: pa, color: self.colors[out_edge] });
                row.splice(pa..pa + 2, [Strand { edge: out_edge, target: other_end(out_edge, (v, c)) }]);
                done[v] = true;
                continue;
            }
            // open a new edge next to a vertex that already has one strand
            let mut singles: Vec<usize> = (0..self.vertices.len()).filter(|&v| !done[v] && !present(&row, v).is_empty()).collect();
            if let Some(rng) = emb.rng.as_deref_mut() {
                singles.shuffle(rng);
            }
            let (v, anchor) = match singles.first() {
                Some(&v) => (v, Some(present(&row, v)[0])),
                None => match (0..self.vertices.len()).find(|&v| !done[v]) {
                    Some(v) => (v, None),
                    None => break,
                },
            };
            let es = self.vertices[v];
            let taken: Vec<usize> = row.iter().filter(|s| s.target.0 == v).map(|s| s.target.1).collect();
            let mut free: Vec<usize> = (0..3).filter(|s| !taken.contains(s)).collect();
            // a loop edge at v gives both of its strands at once
            free.sort_by_key(|&s| {
                let e = es[s];
                usize::from(other_end(e, (v, s)).0 != v)
            });
            if let Some(rng) = emb.rng.as_deref_mut() {
                if free.len() > 1 && other_end(es[free[0]], (v, free[0])).0 != v {
                    free.shuffle(rng);
                }
            }
            let s = free[0];
            let e = es[s];
            let far = other_end(e, (v, s));
            let mut pos = match anchor {
                Some(a) => a + 1,
                None => row.len(),
            };
            let mut flip = false;
            if let Some(rng) = emb.rng.as_deref_mut() {
                if let Some(a) = anchor {
                    if rng.gen_bool(0.5) {
                        pos = a;
                        flip = true;
                    }
                }
            }
            slices.push(Slice::Cup { pos, color: self.colors[e] });
            let near = Strand { edge: e, target: (v, s) };
            let away = Strand { edge: e, target: far };
            if flip {
                row.splice(pos..pos, [away, near]);
            } else {
                row.splice(pos..pos, [near, away]);
            }
        }
        if !row.is_empty() {
            return Err(Error::Malformed("graph drawing left open strands".into()));
        }
        for &c in &self.free_loops {
            slices.push(Slice::Cup { pos: 0, color: c });
            slices.push(Slice::Cap { pos: 0 });
        }
        let movie = Movie { slices };
        movie.validate()?;
        Ok(movie)
    }

    /// Evaluate through a fresh drawing in the given calculator.
    pub fn evaluate_with<F: Field>(&self, skein: &Skein<F>) -> Result<F::Elem> {
        evaluate_with(skein, &self.planarize()?)
    }

    pub fn max_color(&self) -> usize {
        self.colors.iter().chain(&self.free_loops).copied().max().unwrap_or(0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::skein::{delta, theta_closed_form};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn circle(n: usize) -> Movie {
        Movie { slices: vec![Slice::Cup { pos: 0, color: n }, Slice::Cap { pos: 0 }] }
    }

    #[test]
    fn circles() {
        for n in 0..6 {
            assert_eq!(evaluate(&circle(n)).unwrap(), delta(n));
        }
        let ctx = PrimeContext::new(7).unwrap();
        assert_eq!(evaluate_mod_p(&circle(5), &ctx).unwrap().value(), 1);
    }

    #[test]
    fn theta_movie() {
        let m = Movie::parse(
            "colors a=1 b=1 c=2\ncup a @0\nvertex a -> b c @1\nvertex b c -> a @1\ncap @0\n",
        )
        .unwrap();
        assert_eq!(evaluate(&m).unwrap(), Rational::from(3));
        let ctx = PrimeContext::new(5).unwrap();
        assert_eq!(evaluate_mod_p(&m, &ctx).unwrap().value(), 3);
    }

    #[test]
    fn theta_graph_matches_closed_form() {
        for (i, j, k) in [(2, 2, 2), (1, 1, 2), (3, 2, 1), (2, 4, 2), (0, 3, 3)] {
            let g = SpinGraph::theta(i, j, k);
            let m = g.planarize().unwrap();
            assert_eq!(evaluate(&m).unwrap(), theta_closed_form(i, j, k).unwrap(), "({i},{j},{k})");
        }
    }

    #[test]
    fn random_drawings_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let g = SpinGraph::tetrahedron([2, 2, 2, 2, 2, 2]);
        let v = evaluate(&g.planarize().unwrap()).unwrap();
        for _ in 0..5 {
            let m = g.planarize_random(&mut rng).unwrap();
            assert_eq!(evaluate(&m).unwrap(), v);
        }
    }

    #[test]
    fn text_round_trip() {
        let g = SpinGraph::theta(2, 1, 1);
        let m = g.planarize().unwrap();
        let again = Movie::parse(&m.to_string()).unwrap();
        assert_eq!(again, m);
    }

    #[test]
    fn rejects_bad_nets() {
        assert!(matches!(
            Movie::parse("colors a=1 b=1 c=1\ncup a @0\nvertex a -> b c @1\nvertex b c -> a @1\ncap @0\n"),
            Err(Error::NotAdmissible(..))
        ));
        let ctx = PrimeContext::new(5).unwrap();
        let m = SpinGraph::theta(3, 3, 2).planarize().unwrap();
        assert!(matches!(evaluate_mod_p(&m, &ctx), Err(Error::NotPAdmissible(..))));
    }
}
