//! Weighted interaction graphs and their Laplacians.
//!
//! Convention: `a_ij > 0` means agent `i` receives the state of agent `j`,
//! so information flows along the arc `j → i`. Reachability for the
//! directed spanning tree is taken over those arcs.

mod format;
mod spectrum;

pub use spectrum::{left_eigenvector, spectrum, LeftEigenvector, Spectrum};

use nalgebra::{DMatrix, DVector};

use crate::scc::condensation;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    weights: DMatrix<f64>,
    undirected: bool,
}

impl Graph {
    /// Validates a weight matrix: square, finite, nonnegative, zero diagonal,
    /// and symmetric when `undirected` is set.
    pub fn from_weights(weights: DMatrix<f64>, undirected: bool) -> Result<Self> {
        let n = weights.nrows();
        if n == 0 {
            return Err(Error::InvalidGraph("graph must have at least one agent".into()));
        }
        if weights.ncols() != n {
            return Err(Error::InvalidGraph(format!(
                "weight matrix is {}x{}, expected square",
                n,
                weights.ncols()
            )));
        }
        for i in 0..n {
            if weights[(i, i)] != 0.0 {
                return Err(Error::InvalidGraph(format!("self-loop at agent {}", i + 1)));
            }
            for j in 0..n {
                let w = weights[(i, j)];
                if !w.is_finite() || w < 0.0 {
                    return Err(Error::InvalidGraph(format!(
                        "weight a[{}][{}] = {w} must be finite and nonnegative",
                        i + 1,
                        j + 1
                    )));
                }
                if undirected && w != weights[(j, i)] {
                    return Err(Error::InvalidGraph(format!(
                        "undirected graph needs a[{i1}][{j1}] = a[{j1}][{i1}]",
                        i1 = i + 1,
                        j1 = j + 1
                    )));
                }
            }
        }
        Ok(Self {
            weights,
            undirected,
        })
    }

    /// Directed graph from `(i, j, w)` triples meaning `a_ij = w` (0-based).
    pub fn directed(n: usize, edges: &[(usize, usize, f64)]) -> Result<Self> {
        Self::from_weights(Self::assemble(n, edges, false)?, false)
    }

    /// Undirected graph; each `(i, j, w)` sets both `a_ij` and `a_ji`.
    pub fn undirected(n: usize, edges: &[(usize, usize, f64)]) -> Result<Self> {
        Self::from_weights(Self::assemble(n, edges, true)?, true)
    }

    fn assemble(n: usize, edges: &[(usize, usize, f64)], mirror: bool) -> Result<DMatrix<f64>> {
        let mut a = DMatrix::zeros(n, n);
        for &(i, j, w) in edges {
            if i >= n || j >= n {
                return Err(Error::InvalidGraph(format!(
                    "edge ({i}, {j}) out of range for {n} agents"
                )));
            }
            a[(i, j)] = w;
            if mirror {
                a[(j, i)] = w;
            }
        }
        Ok(a)
    }

    /// Complete graph `K_n` with unit weights.
    pub fn complete(n: usize) -> Self {
        let a = DMatrix::from_fn(n, n, |i, j| if i == j { 0.0 } else { 1.0 });
        Self::from_weights(a, true).expect("complete graph is valid")
    }

    /// Unit-weight path `0 – 1 – … – (n−1)`.
    pub fn path(n: usize) -> Self {
        let edges: Vec<_> = (1..n).map(|i| (i - 1, i, 1.0)).collect();
        Self::undirected(n, &edges).expect("path graph is valid")
    }

    /// Unit-weight star `K_{1,leaves}` with the hub at index 0.
    pub fn star(leaves: usize) -> Self {
        let edges: Vec<_> = (1..=leaves).map(|i| (0, i, 1.0)).collect();
        Self::undirected(leaves + 1, &edges).expect("star graph is valid")
    }

    /// Unit-weight directed cycle where agent `i` hears agent `i+1 (mod n)`.
    pub fn directed_cycle(n: usize) -> Self {
        let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n, 1.0)).collect();
        Self::directed(n, &edges).expect("cycle graph is valid")
    }

    /// Two agents where agent 1 hears agent 0 and agent 0 hears nobody.
    pub fn leader_follower() -> Self {
        Self::directed(2, &[(1, 0, 1.0)]).expect("leader-follower graph is valid")
    }

    pub fn n(&self) -> usize {
        self.weights.nrows()
    }

    pub fn weights(&self) -> &DMatrix<f64> {
        &self.weights
    }

    pub fn weight(&self, i: usize, j: usize) -> f64 {
        self.weights[(i, j)]
    }

    pub fn is_undirected(&self) -> bool {
        self.undirected
    }

    /// In-degree `d_ii = Σ_j a_ij`.
    pub fn degree(&self, i: usize) -> f64 {
        self.weights.row(i).sum()
    }

    pub fn max_degree(&self) -> f64 {
        (0..self.n()).map(|i| self.degree(i)).fold(0.0, f64::max)
    }

    /// Arcs in information-flow direction: `succ[j]` holds every `i` with `a_ij > 0`.
    fn flow_successors(&self) -> Vec<Vec<usize>> {
        let n = self.n();
        (0..n)
            .map(|j| (0..n).filter(|&i| self.weights[(i, j)] > 0.0).collect())
            .collect()
    }

    /// Connected components of an undirected graph, by BFS.
    pub fn components(&self) -> Result<Vec<Vec<usize>>> {
        if !self.undirected {
            return Err(Error::NotUndirected);
        }
        let n = self.n();
        let succ = self.flow_successors();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            seen[start] = true;
            let mut comp = vec![start];
            let mut queue = std::collections::VecDeque::from([start]);
            while let Some(u) = queue.pop_front() {
                for &v in &succ[u] {
                    if !seen[v] {
                        seen[v] = true;
                        comp.push(v);
                        queue.push_back(v);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        Ok(out)
    }

    /// Vertex sets of the strongly connected components that receive no
    /// information from outside themselves. A directed spanning tree exists
    /// iff there is exactly one; its members are the possible roots.
    pub fn source_components(&self) -> Vec<Vec<usize>> {
        let succ = self.flow_successors();
        let cond = condensation(&succ);
        let mut out: Vec<Vec<usize>> = cond
            .sources(&succ)
            .into_iter()
            .map(|c| cond.components[c].clone())
            .collect();
        out.sort();
        out
    }

    /// Every vertex from which all others are reachable; empty when there
    /// is no directed spanning tree.
    pub fn spanning_tree_roots(&self) -> Vec<usize> {
        let mut sources = self.source_components();
        if sources.len() == 1 {
            sources.pop().unwrap()
        } else {
            Vec::new()
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        format::parse(text)
    }

    pub fn to_text(&self) -> String {
        format::write(self)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Laplacian {
    matrix: DMatrix<f64>,
    source: Graph,
}

impl Laplacian {
    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn source(&self) -> &Graph {
        &self.source
    }

    pub fn n(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn is_symmetric(&self) -> bool {
        self.matrix == self.matrix.transpose()
    }

    /// `L x`.
    pub fn apply(&self, x: &DVector<f64>) -> DVector<f64> {
        &self.matrix * x
    }
}

/// `L = D − A` with `d_ii = Σ_j a_ij`.
pub fn build_laplacian(g: &Graph) -> Laplacian {
    let n = g.n();
    let mut matrix = -g.weights().clone();
    for i in 0..n {
        // Summing the off-diagonals of the row keeps row sums at exactly the
        // rounding of one accumulation.
        let off: f64 = (0..n).filter(|&j| j != i).map(|j| matrix[(i, j)]).sum();
        matrix[(i, i)] = -off;
    }
    Laplacian {
        matrix,
        source: g.clone(),
    }
}

/// Whether every vertex is reachable from vertex 0 over positive-weight
/// edges. Only defined for undirected graphs.
pub fn is_connected(g: &Graph) -> Result<bool> {
    Ok(g.components()?.len() == 1)
}

/// Whether some root reaches every vertex along the arcs `j → i` (`a_ij > 0`).
pub fn has_directed_spanning_tree(g: &Graph) -> bool {
    g.source_components().len() == 1
}
