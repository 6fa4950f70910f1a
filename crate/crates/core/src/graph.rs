//! Generalized random graph model and the Chung–Lu variant.

use std::fmt::Write as _;
use std::path::Path;

use rand::Rng;

use crate::weights::WeightVector;
use crate::{seed, Error, Result};

/// Vertex id, 0-based.
pub type Vertex = u32;

/// Simple undirected graph stored as strictly sorted adjacency lists.
#[derive(Clone, Debug, PartialEq)]
pub struct GrgGraph {
    adjacency: Vec<Vec<Vertex>>,
    edge_count: usize,
    weights: Option<WeightVector>,
}

impl GrgGraph {
    /// Builds a graph from an edge list over vertices `0..n`.
    ///
    /// Rejects self-loops, out-of-range endpoints and repeated edges.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut adjacency = vec![Vec::new(); n];
        for &(u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::InvalidArgument(format!(
                    "edge ({u}, {v}) out of range for {n} vertices"
                )));
            }
            if u == v {
                return Err(Error::InvalidArgument(format!("self-loop at vertex {u}")));
            }
            adjacency[u].push(v as Vertex);
            adjacency[v].push(u as Vertex);
        }
        for (u, list) in adjacency.iter_mut().enumerate() {
            list.sort_unstable();
            if let Some(w) = list.windows(2).find(|w| w[0] == w[1]) {
                return Err(Error::InvalidArgument(format!(
                    "repeated edge ({u}, {})",
                    w[0]
                )));
            }
        }
        Ok(GrgGraph {
            adjacency,
            edge_count: edges.len(),
            weights: None,
        })
    }

    /// Complete graph `K_n`.
    pub fn complete(n: usize) -> Self {
        let adjacency: Vec<Vec<Vertex>> = (0..n)
            .map(|u| (0..n as Vertex).filter(|&v| v as usize != u).collect())
            .collect();
        GrgGraph {
            adjacency,
            edge_count: n * n.saturating_sub(1) / 2,
            weights: None,
        }
    }

    /// The cycle `C_n` on `0 → 1 → … → n-1 → 0`.
    pub fn cycle(n: usize) -> Self {
        let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        GrgGraph::from_edges(n, &edges).expect("cycle graph on n >= 3 vertices is simple")
    }

    pub fn with_weights(mut self, weights: WeightVector) -> Result<Self> {
        if weights.len() != self.n() {
            return Err(Error::InvalidArgument(format!(
                "{} weights for {} vertices",
                weights.len(),
                self.n()
            )));
        }
        self.weights = Some(weights);
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.adjacency.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn neighbors(&self, v: usize) -> &[Vertex] {
        &self.adjacency[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        let (a, b) = if self.degree(u) <= self.degree(v) {
            (u, v)
        } else {
            (v, u)
        };
        self.adjacency[a].binary_search(&(b as Vertex)).is_ok()
    }

    pub fn weights(&self) -> Option<&WeightVector> {
        self.weights.as_ref()
    }

    /// Edges `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adjacency.iter().enumerate().flat_map(|(u, list)| {
            list.iter()
                .copied()
                .filter(move |&v| v as usize > u)
                .map(move |v| (u, v as usize))
        })
    }

    /// Returns a copy with the extra edge `{u, v}`; a no-op if it is present.
    pub fn with_edge(&self, u: usize, v: usize) -> Result<Self> {
        let mut edges: Vec<_> = self.edges().collect();
        if !self.has_edge(u, v) {
            edges.push((u, v));
        }
        let g = GrgGraph::from_edges(self.n(), &edges)?;
        Ok(GrgGraph {
            weights: self.weights.clone(),
            ..g
        })
    }

    /// Parses the text edge-list format: a header `n m` followed by `m`
    /// lines `u v` with 1-based vertex ids. Blank lines and `#` comments are
    /// ignored.
    pub fn parse_edge_list(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
            .filter(|(_, l)| !l.is_empty());
        let err = |line: usize, msg: &str| Error::EdgeList {
            line,
            msg: msg.to_string(),
        };
        let parse_pair = |line: usize, l: &str| -> Result<(usize, usize)> {
            let mut it = l.split_whitespace();
            let a = it.next().and_then(|s| s.parse().ok());
            let b = it.next().and_then(|s| s.parse().ok());
            match (a, b, it.next()) {
                (Some(a), Some(b), None) => Ok((a, b)),
                _ => Err(err(line, "expected two nonnegative integers")),
            }
        };
        let (hl, header) = lines.next().ok_or_else(|| err(1, "missing header"))?;
        let (n, m) = parse_pair(hl, header)?;
        let mut edges = Vec::with_capacity(m);
        for (line, l) in lines {
            let (u, v) = parse_pair(line, l)?;
            if u == 0 || v == 0 || u > n || v > n {
                return Err(err(line, &format!("vertex id out of range 1..={n}")));
            }
            edges.push((u - 1, v - 1));
        }
        if edges.len() != m {
            return Err(err(
                hl,
                &format!("header declares {m} edges, found {}", edges.len()),
            ));
        }
        GrgGraph::from_edges(n, &edges).map_err(|e| err(hl, &e.to_string()))
    }

    pub fn read_edge_list(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse_edge_list(&text)
    }

    pub fn to_edge_list(&self) -> String {
        let mut out = format!("{} {}\n", self.n(), self.edge_count());
        for (u, v) in self.edges() {
            writeln!(out, "{} {}", u + 1, v + 1).unwrap();
        }
        out
    }

    pub fn write_edge_list(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_edge_list()).map_err(|e| Error::io(path, e))
    }
}

/// GRG edge probability `w_i w_j / (L_n + w_i w_j)`.
///
/// The diagonal `p_ii = 0` is the caller's business; this only covers `i ≠ j`.
pub fn edge_probability(w_i: f64, w_j: f64, total: f64) -> Result<f64> {
    if !(w_i > 0.0 && w_j > 0.0 && total > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "edge probability needs positive inputs, got w_i={w_i}, w_j={w_j}, L={total}"
        )));
    }
    Ok(grg_p(w_i, w_j, total))
}

#[inline]
pub(crate) fn grg_p(w_i: f64, w_j: f64, total: f64) -> f64 {
    let x = w_i * w_j;
    x / (total + x)
}

/// Samples a GRG on the given weights. Pairs `{i, j}` are visited in
/// lexicographic order `(0,1), (0,2), …, (n-2,n-1)`, each consuming exactly
/// one uniform variate.
pub fn sample_grg(weights: &WeightVector, seed: u64) -> Result<GrgGraph> {
    sample_grg_with(weights, &mut seed::rng(seed))
}

pub fn sample_grg_with<R: Rng + ?Sized>(weights: &WeightVector, rng: &mut R) -> Result<GrgGraph> {
    let total = weights.total();
    sample_pairs(weights, rng, |wi, wj| grg_p(wi, wj, total))
}

/// Samples a Chung–Lu graph: pair `{i, j}` present with probability
/// `W_i W_j / L_n`. Requires `W_i² ≤ L_n` for every vertex.
pub fn sample_chung_lu(weights: &WeightVector, seed: u64) -> Result<GrgGraph> {
    sample_chung_lu_with(weights, &mut seed::rng(seed))
}

pub fn sample_chung_lu_with<R: Rng + ?Sized>(
    weights: &WeightVector,
    rng: &mut R,
) -> Result<GrgGraph> {
    let total = weights.total();
    if let Some((vertex, w)) = weights
        .values()
        .iter()
        .enumerate()
        .find(|(_, w)| *w * *w > total)
    {
        return Err(Error::ChungLuPrecondition {
            vertex,
            weight_sq: w * w,
            total,
        });
    }
    sample_pairs(weights, rng, |wi, wj| wi * wj / total)
}

fn sample_pairs<R, F>(weights: &WeightVector, rng: &mut R, prob: F) -> Result<GrgGraph>
where
    R: Rng + ?Sized,
    F: Fn(f64, f64) -> f64,
{
    let n = weights.len();
    if n < 2 {
        return Err(Error::InvalidArgument("need at least 2 vertices".into()));
    }
    let w = weights.values();
    let mut adjacency: Vec<Vec<Vertex>> = vec![Vec::new(); n];
    let mut edge_count = 0;
    for i in 0..n {
        let wi = w[i];
        for j in i + 1..n {
            let u: f64 = rng.gen();
            if u < prob(wi, w[j]) {
                // rows are visited in increasing i, so both lists stay sorted
                adjacency[i].push(j as Vertex);
                adjacency[j].push(i as Vertex);
                edge_count += 1;
            }
        }
    }
    Ok(GrgGraph {
        adjacency,
        edge_count,
        weights: Some(weights.clone()),
    })
}

/// Probability that the cycle through `cycle` (in order, closing back to the
/// first vertex) is present given the weights: `Π p_{v_i v_{i+1}}`.
pub fn cycle_probability(weights: &WeightVector, cycle: &[usize]) -> Result<f64> {
    check_cycle(cycle, weights.len())?;
    let w = weights.values();
    let total = weights.total();
    let k = cycle.len();
    Ok((0..k)
        .map(|i| grg_p(w[cycle[i]], w[cycle[(i + 1) % k]], total))
        .product())
}

pub(crate) fn check_cycle(cycle: &[usize], n: usize) -> Result<()> {
    if cycle.len() < 3 {
        return Err(Error::InvalidArgument(format!(
            "a cycle needs at least 3 vertices, got {}",
            cycle.len()
        )));
    }
    if let Some(v) = cycle.iter().find(|&&v| v >= n) {
        return Err(Error::InvalidArgument(format!(
            "vertex {v} out of range for {n} vertices"
        )));
    }
    let mut sorted = cycle.to_vec();
    sorted.sort_unstable();
    if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
        return Err(Error::InvalidArgument(format!(
            "vertex {} repeated in cycle",
            w[0]
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn edge_probability_examples() {
        assert_relative_eq!(edge_probability(1.0, 1.0, 2.0).unwrap(), 1.0 / 3.0);
        // W ≡ nλ/(n-λ) gives Erdős–Rényi with p = λ/n.
        let (n, lambda) = (100.0, 1.0);
        let s = n * lambda / (n - lambda);
        assert_relative_eq!(
            edge_probability(s, s, n * s).unwrap(),
            lambda / n,
            max_relative = 1e-14
        );
        assert!(edge_probability(1e-12, 1.0, 10.0).unwrap() < 1e-12);
        assert!(edge_probability(0.0, 1.0, 2.0).is_err());
        assert!(edge_probability(1.0, -1.0, 2.0).is_err());
    }

    #[test]
    fn edge_probability_monotone_and_symmetric() {
        let p = |a, b| edge_probability(a, b, 50.0).unwrap();
        assert_eq!(p(2.0, 3.0), p(3.0, 2.0));
        assert!(p(2.0, 3.0) < p(2.5, 3.0));
        assert!(p(2.0, 3.0) < p(2.0, 3.5));
    }

    #[test]
    fn two_vertex_frequency() {
        let w = WeightVector::new(vec![1.0, 1.0]).unwrap();
        let reps = 100_000;
        let hits = (0..reps)
            .filter(|&s| sample_grg(&w, s).unwrap().edge_count() == 1)
            .count();
        let p = 1.0 / 3.0;
        let se = (p * (1.0 - p) / reps as f64).sqrt();
        let freq = hits as f64 / reps as f64;
        assert!((freq - p).abs() < 3.0 * se, "freq {freq}");
    }

    #[test]
    fn erdos_renyi_edge_count() {
        let (n, lambda) = (100usize, 1.0);
        let s = n as f64 * lambda / (n as f64 - lambda);
        let w = WeightVector::constant(n, s).unwrap();
        let reps = 2_000;
        let counts: Vec<f64> = (0..reps)
            .map(|r| sample_grg(&w, r).unwrap().edge_count() as f64)
            .collect();
        let pairs = (n * (n - 1) / 2) as f64;
        let p = lambda / n as f64;
        let mean = counts.iter().sum::<f64>() / reps as f64;
        let se = (pairs * p * (1.0 - p) / reps as f64).sqrt();
        assert!(
            (mean - pairs / 100.0).abs() < 3.0 * se,
            "mean {mean}, se {se}"
        );
    }

    #[test]
    fn heavy_vertex_has_largest_degree() {
        let mut v = vec![1.0; 200];
        v[17] = 150.0;
        let w = WeightVector::new(v).unwrap();
        let mut deg = vec![0usize; 200];
        for s in 0..200 {
            let g = sample_grg(&w, s).unwrap();
            for (d, v) in deg.iter_mut().zip(0..) {
                *d += g.degree(v);
            }
        }
        let max = (0..200).max_by_key(|&v| deg[v]).unwrap();
        assert_eq!(max, 17);
    }

    #[test]
    fn sampled_graph_is_simple_and_symmetric() {
        let w =
            crate::weights::sample_weights(&crate::weights::WeightSpec::reference_pareto(), 150, 3)
                .unwrap();
        for s in 0..5 {
            let g = sample_grg(&w, s).unwrap();
            let mut degree_sum = 0;
            for u in 0..g.n() {
                let nb = g.neighbors(u);
                assert!(nb.windows(2).all(|w| w[0] < w[1]));
                assert!(!nb.contains(&(u as Vertex)));
                for &v in nb {
                    assert!(g
                        .neighbors(v as usize)
                        .binary_search(&(u as Vertex))
                        .is_ok());
                }
                degree_sum += nb.len();
            }
            assert_eq!(degree_sum, 2 * g.edge_count());
        }
    }

    #[test]
    fn sampling_is_deterministic() {
        let w = WeightVector::new(vec![3.0, 1.0, 2.0, 5.0, 4.0]).unwrap();
        assert_eq!(sample_grg(&w, 11).unwrap(), sample_grg(&w, 11).unwrap());
    }

    #[test]
    fn chung_lu_precondition() {
        let w = WeightVector::new(vec![3.0, 1.0]).unwrap();
        match sample_chung_lu(&w, 0) {
            Err(Error::ChungLuPrecondition { vertex, .. }) => assert_eq!(vertex, 0),
            other => panic!("expected precondition error, got {other:?}"),
        }
        assert!(sample_chung_lu(&WeightVector::new(vec![2.0, 1.0, 1.0]).unwrap(), 0).is_ok());
    }

    #[test]
    fn chung_lu_frequencies() {
        // [2, 1, 1], L = 4: p_01 = 1/2, p_12 = 1/4
        let w = WeightVector::new(vec![2.0, 1.0, 1.0]).unwrap();
        let reps = 40_000u64;
        let (mut e01, mut e12) = (0, 0);
        for s in 0..reps {
            let g = sample_chung_lu(&w, s).unwrap();
            e01 += g.has_edge(0, 1) as u64;
            e12 += g.has_edge(1, 2) as u64;
        }
        for (hits, p) in [(e01, 0.5), (e12, 0.25)] {
            let se = (p * (1.0 - p) / reps as f64).sqrt();
            assert!((hits as f64 / reps as f64 - p).abs() < 4.0 * se);
        }
    }

    #[test]
    fn cycle_probability_examples() {
        let w = WeightVector::constant(4, 1.0).unwrap();
        assert_relative_eq!(
            cycle_probability(&w, &[0, 1, 2]).unwrap(),
            0.008,
            max_relative = 1e-14
        );
        let (n, lambda) = (10usize, 2.0);
        let s = n as f64 * lambda / (n as f64 - lambda);
        let w = WeightVector::constant(n, s).unwrap();
        assert_relative_eq!(
            cycle_probability(&w, &[0, 3, 5, 7]).unwrap(),
            (lambda / n as f64).powi(4),
            max_relative = 1e-12
        );
        assert!(cycle_probability(&w, &[0, 1, 0]).is_err());
        assert!(cycle_probability(&w, &[0, 1]).is_err());
    }

    #[test]
    fn edge_list_round_trip_and_errors() {
        let g = GrgGraph::complete(4);
        let text = g.to_edge_list();
        assert!(text.starts_with("4 6\n1 2\n"));
        assert_eq!(GrgGraph::parse_edge_list(&text).unwrap(), g);
        assert!(GrgGraph::parse_edge_list("3 1\n1 1\n").is_err());
        assert!(GrgGraph::parse_edge_list("3 1\n1 4\n").is_err());
        assert!(GrgGraph::parse_edge_list("3 2\n1 2\n").is_err());
        assert!(GrgGraph::parse_edge_list("3 2\n1 2\n2 1\n").is_err());
        assert!(GrgGraph::parse_edge_list("3 1\n1 x\n").is_err());
        assert!(GrgGraph::parse_edge_list("").is_err());
    }
}
