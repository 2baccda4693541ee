//! Deterministic fixture builders shared by the benchmarks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use plcsnet::{SeriesPanel, WeightedGraph};

/// A panel of `n` growth-like series over `periods` years.
pub fn synthetic_panel(n: usize, periods: usize, seed: u64) -> SeriesPanel {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let entities: Vec<String> = (0..n).map(|i| format!("E{i:02}")).collect();
    let labels: Vec<i64> = (1970..1970 + periods as i64).collect();
    let growth: Vec<f64> = (0..n).map(|_| rng.random_range(1.01..1.08)).collect();
    let level: Vec<f64> = (0..n).map(|_| rng.random_range(500.0..5000.0)).collect();
    let rows: Vec<Vec<f64>> = (0..periods)
        .map(|t| {
            (0..n)
                .map(|e| {
                    let wiggle = 1.0 + 0.03 * ((t * (e + 2)) as f64 * 0.41).sin();
                    level[e] * growth[e].powi(t as i32) * wiggle
                })
                .collect()
        })
        .collect();
    SeriesPanel::new(entities, labels, rows).unwrap()
}

/// Complete weighted graph on `n` nodes with pseudo-random weights.
pub fn complete_graph(n: usize, seed: u64) -> WeightedGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let nodes: Vec<String> = (0..n).map(|i| format!("N{i:02}")).collect();
    let mut edges = Vec::new();
    for u in 0..n {
        for v in (u + 1)..n {
            edges.push((u, v, rng.random_range(-5.0..5.0)));
        }
    }
    WeightedGraph::new(nodes, edges).unwrap()
}
