//! Fixtures shared by the criterion benches.

use switched_consensus::{Graph, ScheduleParams};

/// Ring of `n` agents with a chord every third vertex, unit weights.
pub fn ring_with_chords(n: usize) -> Graph {
    let mut edges: Vec<(usize, usize, f64)> = (0..n).map(|i| (i, (i + 1) % n, 1.0)).collect();
    edges.extend((0..n).step_by(3).map(|i| (i, (i + n / 2) % n, 0.5)));
    edges.retain(|&(i, j, _)| i != j);
    edges.sort_by_key(|&(i, j, _)| (i.min(j), i.max(j)));
    edges.dedup_by_key(|e| (e.0.min(e.1), e.0.max(e.1)));
    Graph::undirected(n, &edges).expect("fixture graph is valid")
}

/// Directed ring where agent `i` hears `i+1` and, with a lighter weight, `i+2`.
pub fn directed_ring(n: usize) -> Graph {
    let edges: Vec<_> = (0..n)
        .flat_map(|i| [(i, (i + 1) % n, 1.0), (i, (i + 2) % n, 0.3)])
        .collect();
    Graph::directed(n, &edges).expect("fixture graph is valid")
}

pub fn mixed_schedule(segments: usize) -> ScheduleParams {
    ScheduleParams {
        segments,
        ct_duration: (0.5, 2.0),
        dt_steps: (2, 10),
        topology_ids: vec!["g".into()],
        ..Default::default()
    }
}
