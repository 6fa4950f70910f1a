//! Exact counting and enumeration of simple cycles of fixed length.
//!
//! Every k-cycle has `2k` labelled representations (k rotations, two
//! orientations). We keep only the canonical one: the smallest vertex first
//! and `v_1 < v_{k-1}`. The depth-first search below generates exactly those
//! representatives, so nothing needs to be deduplicated.

use std::fmt;

use rayon::prelude::*;
use serde::Serialize;

use crate::graph::{GrgGraph, Vertex};
use crate::{Error, Result};

/// Largest graph [`brute_force_count`] accepts.
pub const BRUTE_FORCE_MAX_N: usize = 10;

/// A cycle in canonical form: `v_0 = min`, `v_1 < v_{k-1}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CanonicalCycle(Vec<Vertex>);

impl CanonicalCycle {
    /// Brings any vertex sequence describing a cycle into canonical form.
    pub fn canonicalize(vertices: &[usize]) -> Result<Self> {
        crate::graph::check_cycle(vertices, usize::MAX)?;
        let k = vertices.len();
        let start = (0..k).min_by_key(|&i| vertices[i]).unwrap();
        let mut out: Vec<Vertex> = (0..k)
            .map(|i| vertices[(start + i) % k] as Vertex)
            .collect();
        if out[1] > out[k - 1] {
            out[1..].reverse();
        }
        Ok(CanonicalCycle(out))
    }

    /// Wraps a sequence that is already canonical.
    pub fn from_canonical(vertices: Vec<Vertex>) -> Result<Self> {
        let as_usize: Vec<usize> = vertices.iter().map(|&v| v as usize).collect();
        crate::graph::check_cycle(&as_usize, usize::MAX)?;
        let k = vertices.len();
        if vertices.iter().skip(1).any(|&v| v < vertices[0]) || vertices[1] > vertices[k - 1] {
            return Err(Error::InvalidArgument(format!(
                "{vertices:?} is not in canonical form"
            )));
        }
        Ok(CanonicalCycle(vertices))
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// The `k` edges `(min, max)` of the cycle.
    pub fn edges(&self) -> impl Iterator<Item = (Vertex, Vertex)> + '_ {
        let k = self.0.len();
        (0..k).map(move |i| {
            let (a, b) = (self.0[i], self.0[(i + 1) % k]);
            (a.min(b), a.max(b))
        })
    }

    pub fn vertices_usize(&self) -> Vec<usize> {
        self.0.iter().map(|&v| v as usize).collect()
    }
}

/// 1-based, e.g. `(1,2,3)`.
impl fmt::Display for CanonicalCycle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", v + 1)?;
        }
        write!(f, ")")
    }
}

/// Number of k-cycles found in one graph.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct CycleCensus {
    pub k: usize,
    pub count: u64,
}

fn check_length(n: usize, k: usize) -> Result<()> {
    if k < 3 || k > n {
        return Err(Error::InvalidArgument(format!(
            "cycle length must satisfy 3 <= k <= n, got k={k}, n={n}"
        )));
    }
    Ok(())
}

/// `|I(k)| = (n)_k / (2k)`, the number of potential k-cycles on `n` labelled vertices.
pub fn candidate_count(n: usize, k: usize) -> Result<u128> {
    check_length(n, k)?;
    let falling = (0..k).try_fold(1u128, |acc, i| acc.checked_mul((n - i) as u128));
    let falling = falling.ok_or(Error::Overflow("falling factorial (n)_k"))?;
    Ok(falling / (2 * k as u128))
}

/// Exact number of k-cycles in `graph`, parallel over the minimum vertex.
pub fn count_k_cycles(graph: &GrgGraph, k: usize) -> Result<CycleCensus> {
    let n = graph.n();
    check_length(n, k)?;
    let count = (0..n)
        .into_par_iter()
        .map_init(
            || Scratch::new(n),
            |scratch, s| scratch.count_from(graph, s, k),
        )
        .sum();
    Ok(CycleCensus { k, count })
}

/// Sequential variant of [`count_k_cycles`].
pub fn count_k_cycles_sequential(graph: &GrgGraph, k: usize) -> Result<CycleCensus> {
    let n = graph.n();
    check_length(n, k)?;
    let mut scratch = Scratch::new(n);
    let count = (0..n).map(|s| scratch.count_from(graph, s, k)).sum();
    Ok(CycleCensus { k, count })
}

struct Scratch {
    on_path: Vec<bool>,
    closes: Vec<bool>,
    path: Vec<Vertex>,
}

impl Scratch {
    fn new(n: usize) -> Self {
        Scratch {
            on_path: vec![false; n],
            closes: vec![false; n],
            path: Vec::new(),
        }
    }

    /// Canonical k-cycles whose minimum vertex is `s`.
    fn count_from(&mut self, g: &GrgGraph, s: usize, k: usize) -> u64 {
        let above = |v: usize| {
            let nb = g.neighbors(v);
            &nb[nb.partition_point(|&u| u as usize <= s)..]
        };
        let up = above(s);
        if up.len() < 2 {
            return 0;
        }
        for &u in up {
            self.closes[u as usize] = true;
        }
        self.on_path[s] = true;
        let mut total = 0;
        for &v1 in up {
            self.path.clear();
            self.path.push(s as Vertex);
            self.path.push(v1);
            self.on_path[v1 as usize] = true;
            total += self.extend(g, s, k, v1);
            self.on_path[v1 as usize] = false;
        }
        self.on_path[s] = false;
        for &u in up {
            self.closes[u as usize] = false;
        }
        total
    }

    fn extend(&mut self, g: &GrgGraph, s: usize, k: usize, v1: Vertex) -> u64 {
        let last = *self.path.last().unwrap() as usize;
        let nb = g.neighbors(last);
        let nb = &nb[nb.partition_point(|&u| u as usize <= s)..];
        if self.path.len() + 1 == k {
            // closing vertex: adjacent to s and larger than v_1
            return nb
                .iter()
                .filter(|&&u| u > v1 && self.closes[u as usize] && !self.on_path[u as usize])
                .count() as u64;
        }
        let mut total = 0;
        for &u in nb {
            if self.on_path[u as usize] {
                continue;
            }
            self.on_path[u as usize] = true;
            self.path.push(u);
            total += self.extend(g, s, k, v1);
            self.path.pop();
            self.on_path[u as usize] = false;
        }
        total
    }
}

/// Triangle count by sorted-list intersection over `i < j < l`.
pub fn count_triangles(graph: &GrgGraph) -> Result<CycleCensus> {
    let n = graph.n();
    check_length(n, 3)?;
    let count = (0..n)
        .into_par_iter()
        .map(|i| {
            let ni = graph.neighbors(i);
            let ni = &ni[ni.partition_point(|&v| v as usize <= i)..];
            let mut c = 0u64;
            for (idx, &j) in ni.iter().enumerate() {
                let nj = graph.neighbors(j as usize);
                let nj = &nj[nj.partition_point(|&v| v <= j)..];
                c += sorted_intersection_len(&ni[idx + 1..], nj);
            }
            c
        })
        .sum();
    Ok(CycleCensus { k: 3, count })
}

fn sorted_intersection_len(a: &[Vertex], b: &[Vertex]) -> u64 {
    let (mut i, mut j, mut c) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                c += 1;
                i += 1;
                j += 1;
            }
        }
    }
    c
}

/// Test oracle: walks every ordered k-tuple of distinct vertices, counts the
/// closed ones and divides by `2k`. Only for `n ≤ 10`.
pub fn brute_force_count(graph: &GrgGraph, k: usize) -> Result<CycleCensus> {
    let n = graph.n();
    if n > BRUTE_FORCE_MAX_N {
        return Err(Error::InvalidArgument(format!(
            "brute force limited to n <= {BRUTE_FORCE_MAX_N}, got {n}"
        )));
    }
    check_length(n, k)?;
    fn rec(g: &GrgGraph, k: usize, tuple: &mut Vec<usize>, used: &mut [bool]) -> u64 {
        if tuple.len() == k {
            let closed = (0..k).all(|i| g.has_edge(tuple[i], tuple[(i + 1) % k]));
            return closed as u64;
        }
        let mut hits = 0;
        for v in 0..g.n() {
            if !used[v] {
                used[v] = true;
                tuple.push(v);
                hits += rec(g, k, tuple, used);
                tuple.pop();
                used[v] = false;
            }
        }
        hits
    }
    let hits = rec(graph, k, &mut Vec::with_capacity(k), &mut vec![false; n]);
    debug_assert_eq!(hits % (2 * k as u64), 0);
    Ok(CycleCensus {
        k,
        count: hits / (2 * k as u64),
    })
}

/// Which index set [`enumerate_cycles`] walks.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EnumerationMode {
    /// Cycles present in the graph.
    Present,
    /// Every candidate in `I(k)`, as if the graph were complete. Refused when
    /// `|I(k)|` exceeds `cap`.
    Candidates { cap: u64 },
}

/// Lazily yields each canonical k-cycle exactly once, in lexicographic order.
pub fn enumerate_cycles(
    graph: &GrgGraph,
    k: usize,
    mode: EnumerationMode,
) -> Result<CycleIter<'_>> {
    let n = graph.n();
    check_length(n, k)?;
    let source = match mode {
        EnumerationMode::Present => Source::Graph(graph),
        EnumerationMode::Candidates { cap } => {
            let candidates = candidate_count(n, k)?;
            if candidates > cap as u128 {
                return Err(Error::CapExceeded { candidates, cap });
            }
            Source::Complete((0..n as Vertex).collect())
        }
    };
    Ok(CycleIter::new(source, n, k))
}

/// Every candidate cycle in `I(k)` over `n` vertices, without needing a graph.
pub fn enumerate_candidates(n: usize, k: usize, cap: u64) -> Result<CycleIter<'static>> {
    check_length(n, k)?;
    let candidates = candidate_count(n, k)?;
    if candidates > cap as u128 {
        return Err(Error::CapExceeded { candidates, cap });
    }
    Ok(CycleIter::new(
        Source::Complete((0..n as Vertex).collect()),
        n,
        k,
    ))
}

enum Source<'g> {
    Graph(&'g GrgGraph),
    Complete(Vec<Vertex>),
}

impl Source<'_> {
    fn neighbors(&self, v: usize) -> &[Vertex] {
        match self {
            Source::Graph(g) => g.neighbors(v),
            // v itself is always on the path, so it is filtered out anyway
            Source::Complete(all) => all,
        }
    }

    fn adjacent(&self, u: usize, v: usize) -> bool {
        match self {
            Source::Graph(g) => g.has_edge(u, v),
            Source::Complete(_) => u != v,
        }
    }
}

/// Iterator returned by [`enumerate_cycles`].
pub struct CycleIter<'g> {
    source: Source<'g>,
    n: usize,
    k: usize,
    start: usize,
    path: Vec<Vertex>,
    cursors: Vec<usize>,
    on_path: Vec<bool>,
}

impl<'g> CycleIter<'g> {
    fn new(source: Source<'g>, n: usize, k: usize) -> Self {
        CycleIter {
            source,
            n,
            k,
            start: 0,
            path: Vec::with_capacity(k),
            cursors: Vec::with_capacity(k),
            on_path: vec![false; n],
        }
    }

    fn first_above(&self, v: usize) -> usize {
        let s = self.start as Vertex;
        self.source.neighbors(v).partition_point(|&u| u <= s)
    }
}

impl Iterator for CycleIter<'_> {
    type Item = CanonicalCycle;

    fn next(&mut self) -> Option<CanonicalCycle> {
        loop {
            if self.path.is_empty() {
                if self.start >= self.n {
                    return None;
                }
                self.path.push(self.start as Vertex);
                self.on_path[self.start] = true;
                self.cursors.push(self.first_above(self.start));
            }
            let depth = self.path.len() - 1;
            let last = self.path[depth] as usize;
            let closing = self.path.len() + 1 == self.k;
            let mut found = None;
            {
                let nb = self.source.neighbors(last);
                let cursor = &mut self.cursors[depth];
                while *cursor < nb.len() {
                    let u = nb[*cursor];
                    *cursor += 1;
                    if self.on_path[u as usize] {
                        continue;
                    }
                    if closing
                        && !(u > self.path[1] && self.source.adjacent(u as usize, self.start))
                    {
                        continue;
                    }
                    found = Some(u);
                    break;
                }
            }
            match found {
                Some(u) if closing => {
                    let mut cycle = self.path.clone();
                    cycle.push(u);
                    return Some(CanonicalCycle(cycle));
                }
                Some(u) => {
                    self.path.push(u);
                    self.on_path[u as usize] = true;
                    self.cursors.push(self.first_above(u as usize));
                }
                None => {
                    let v = self.path.pop().unwrap();
                    self.on_path[v as usize] = false;
                    self.cursors.pop();
                    if self.path.is_empty() {
                        self.start += 1;
                    }
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn candidate_counts() {
        assert_eq!(candidate_count(4, 3).unwrap(), 4);
        assert_eq!(candidate_count(4, 4).unwrap(), 3);
        assert_eq!(candidate_count(5, 3).unwrap(), 10);
        assert!(candidate_count(5, 2).is_err());
        assert!(candidate_count(3, 4).is_err());
        assert!(matches!(
            candidate_count(1 << 40, 40),
            Err(Error::Overflow(_))
        ));
    }

    #[test]
    fn small_graph_counts() {
        let k4 = GrgGraph::complete(4);
        assert_eq!(count_k_cycles(&k4, 3).unwrap().count, 4);
        assert_eq!(count_k_cycles(&k4, 4).unwrap().count, 3);
        assert_eq!(count_triangles(&k4).unwrap().count, 4);
        assert_eq!(brute_force_count(&k4, 3).unwrap().count, 4);
        assert_eq!(brute_force_count(&k4, 4).unwrap().count, 3);

        let c5 = GrgGraph::cycle(5);
        assert_eq!(count_k_cycles(&c5, 5).unwrap().count, 1);
        assert_eq!(count_k_cycles(&c5, 3).unwrap().count, 0);
        assert_eq!(count_k_cycles(&c5, 4).unwrap().count, 0);

        let empty = GrgGraph::from_edges(6, &[]).unwrap();
        assert_eq!(count_triangles(&empty).unwrap().count, 0);
        assert!(brute_force_count(&GrgGraph::complete(11), 3).is_err());
    }

    #[test]
    fn complete_graph_matches_candidate_count() {
        for n in 3..=8 {
            let g = GrgGraph::complete(n);
            for k in 3..=n {
                assert_eq!(
                    count_k_cycles(&g, k).unwrap().count as u128,
                    candidate_count(n, k).unwrap()
                );
            }
        }
    }

    #[test]
    fn candidate_enumeration_on_four_vertices() {
        let g = GrgGraph::from_edges(4, &[]).unwrap();
        let got: Vec<String> = enumerate_cycles(&g, 3, EnumerationMode::Candidates { cap: 100 })
            .unwrap()
            .map(|c| c.to_string())
            .collect();
        assert_eq!(got, ["(1,2,3)", "(1,2,4)", "(1,3,4)", "(2,3,4)"]);
        assert!(matches!(
            enumerate_cycles(&g, 3, EnumerationMode::Candidates { cap: 3 }),
            Err(Error::CapExceeded {
                candidates: 4,
                cap: 3
            })
        ));
    }

    #[test]
    fn present_enumeration_on_c5() {
        let c5 = GrgGraph::cycle(5);
        let got: Vec<_> = enumerate_cycles(&c5, 5, EnumerationMode::Present)
            .unwrap()
            .collect();
        assert_eq!(got.len(), 1);
        assert_eq!(got[0].to_string(), "(1,2,3,4,5)");
    }

    #[test]
    fn canonicalize_handles_rotation_and_reflection() {
        let want = CanonicalCycle::from_canonical(vec![1, 3, 4]).unwrap();
        for rep in [
            [1, 3, 4],
            [3, 4, 1],
            [4, 1, 3],
            [4, 3, 1],
            [1, 4, 3],
            [3, 1, 4],
        ] {
            assert_eq!(CanonicalCycle::canonicalize(&rep).unwrap(), want);
        }
        assert!(CanonicalCycle::from_canonical(vec![1, 4, 3]).is_err());
        assert!(CanonicalCycle::from_canonical(vec![2, 1, 3]).is_err());
        assert!(CanonicalCycle::canonicalize(&[1, 2, 1]).is_err());
    }
}
