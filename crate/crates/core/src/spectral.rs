//! Adjacency spectral radius and the epidemic threshold `τ = 1/λ1`.

use serde::Serialize;

use crate::cycles::count_triangles;
use crate::graph::GrgGraph;
use crate::{Error, Result};

/// Lower bound on the adjacency spectral radius from the vertex, edge and
/// triangle counts: `(6Δ + √(36Δ² + 32e³/n)) / (4e)`.
pub fn spectral_lower_bound(n: usize, edges: usize, triangles: u64) -> Result<f64> {
    if edges == 0 || n == 0 {
        return Err(Error::InvalidArgument(
            "spectral lower bound needs at least one edge".into(),
        ));
    }
    let (n, e, t) = (n as f64, edges as f64, triangles as f64);
    Ok((6.0 * t + (36.0 * t * t + 32.0 * e.powi(3) / n).sqrt()) / (4.0 * e))
}

/// `τ = 1/λ1`.
pub fn epidemic_threshold(lambda1: f64) -> Result<f64> {
    if !(lambda1 > 0.0 && lambda1.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "spectral radius must be positive, got {lambda1}"
        )));
    }
    Ok(1.0 / lambda1)
}

/// Largest adjacency eigenvalue by power iteration on `A + I`.
///
/// The shift keeps bipartite graphs (where `−λ1` is also an eigenvalue) from
/// oscillating. The start vector is all ones, which has weight on the Perron
/// vector of every component, so disconnected graphs give the maximum over
/// components. Iteration stops once the residual `‖Ax − λx‖/‖x‖` of the
/// Rayleigh quotient `λ` drops below `tolerance`.
pub fn power_iteration_lambda1(graph: &GrgGraph, tolerance: f64, max_iters: usize) -> Result<f64> {
    let n = graph.n();
    if n == 0 {
        return Err(Error::InvalidArgument("empty graph".into()));
    }
    if graph.edge_count() == 0 {
        return Ok(0.0);
    }
    let mut x = vec![1.0 / (n as f64).sqrt(); n];
    let mut ax = vec![0.0; n];
    for _ in 0..max_iters {
        for (v, out) in ax.iter_mut().enumerate() {
            *out = graph.neighbors(v).iter().map(|&u| x[u as usize]).sum();
        }
        let lambda: f64 = x.iter().zip(&ax).map(|(a, b)| a * b).sum();
        let residual = x
            .iter()
            .zip(&ax)
            .map(|(a, b)| (b - lambda * a).powi(2))
            .sum::<f64>()
            .sqrt();
        if residual < tolerance {
            return Ok(lambda);
        }
        // x ← (A + I)x, normalized
        let norm = x
            .iter()
            .zip(&ax)
            .map(|(a, b)| (a + b).powi(2))
            .sum::<f64>()
            .sqrt();
        for (a, b) in x.iter_mut().zip(&ax) {
            *a = (*a + b) / norm;
        }
    }
    Err(Error::NonConvergence { iters: max_iters })
}

/// Spectral radius and epidemic threshold summary of one graph.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ThresholdReport {
    pub n: usize,
    pub edges: usize,
    pub triangles: u64,
    pub lower_bound: f64,
    pub lambda1_estimate: f64,
    pub tau_estimate: f64,
    /// `1 / lower_bound`, an upper bound on `τ`.
    pub tau_upper_bound: f64,
    /// `lower_bound ≤ lambda1_estimate + tolerance`.
    pub bound_holds: bool,
}

pub fn threshold_report(
    graph: &GrgGraph,
    tolerance: f64,
    max_iters: usize,
) -> Result<ThresholdReport> {
    let triangles = if graph.n() >= 3 {
        count_triangles(graph)?.count
    } else {
        0
    };
    let lower_bound = spectral_lower_bound(graph.n(), graph.edge_count(), triangles)?;
    let lambda1_estimate = power_iteration_lambda1(graph, tolerance, max_iters)?;
    Ok(ThresholdReport {
        n: graph.n(),
        edges: graph.edge_count(),
        triangles,
        lower_bound,
        lambda1_estimate,
        tau_estimate: epidemic_threshold(lambda1_estimate)?,
        tau_upper_bound: epidemic_threshold(lower_bound)?,
        bound_holds: lower_bound <= lambda1_estimate + tolerance.max(1e-9),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bound_is_exact_on_small_complete_graphs() {
        assert!((spectral_lower_bound(3, 3, 1).unwrap() - 2.0).abs() < 1e-12);
        assert!((spectral_lower_bound(4, 6, 4).unwrap() - 3.0).abs() < 1e-12);
        assert!((spectral_lower_bound(2, 1, 0).unwrap() - 1.0).abs() < 1e-12);
        assert!(spectral_lower_bound(5, 0, 0).is_err());
    }

    #[test]
    fn threshold_examples() {
        assert!((epidemic_threshold(3.0).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(epidemic_threshold(1.0).unwrap(), 1.0);
        assert!(epidemic_threshold(4.0).unwrap() < epidemic_threshold(2.0).unwrap());
        assert!(epidemic_threshold(0.0).is_err());
        assert!(epidemic_threshold(-1.0).is_err());
    }

    #[test]
    fn power_iteration_known_spectra() {
        let k4 = GrgGraph::complete(4);
        assert!((power_iteration_lambda1(&k4, 1e-12, 10_000).unwrap() - 3.0).abs() < 1e-9);
        let c5 = GrgGraph::cycle(5);
        assert!((power_iteration_lambda1(&c5, 1e-10, 10_000).unwrap() - 2.0).abs() < 1e-6);
        let star = GrgGraph::from_edges(5, &[(0, 1), (0, 2), (0, 3), (0, 4)]).unwrap();
        assert!((power_iteration_lambda1(&star, 1e-10, 10_000).unwrap() - 2.0).abs() < 1e-6);
        // disconnected: K_3 plus an isolated edge
        let g = GrgGraph::from_edges(5, &[(0, 1), (1, 2), (0, 2), (3, 4)]).unwrap();
        assert!((power_iteration_lambda1(&g, 1e-10, 10_000).unwrap() - 2.0).abs() < 1e-6);
        // regular graphs converge at once from the all-ones start, so use a path
        let path: Vec<_> = (0..49).map(|i| (i, i + 1)).collect();
        let path = GrgGraph::from_edges(50, &path).unwrap();
        assert!(matches!(
            power_iteration_lambda1(&path, 1e-14, 3),
            Err(Error::NonConvergence { iters: 3 })
        ));
    }

    #[test]
    fn report_on_k4_and_triangle_free() {
        let r = threshold_report(&GrgGraph::complete(4), 1e-12, 10_000).unwrap();
        assert!((r.lower_bound - 3.0).abs() < 1e-12);
        assert!((r.lambda1_estimate - 3.0).abs() < 1e-9);
        assert!((r.tau_estimate - 1.0 / 3.0).abs() < 1e-9);
        assert!(r.bound_holds);

        let c6 = GrgGraph::cycle(6);
        let r = threshold_report(&c6, 1e-10, 10_000).unwrap();
        assert_eq!(r.triangles, 0);
        assert!((r.lower_bound - (2.0 * 6.0 / 6.0f64).sqrt()).abs() < 1e-12);
        assert!(r.bound_holds);
    }
}
