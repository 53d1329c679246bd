//! Strongly connected components (iterative Tarjan) and the condensation
//! order used both for spanning-tree detection and for block-triangular
//! eigenvalue splitting.

pub(crate) struct Condensation {
    /// Components in topological order: every arc between two distinct
    /// components goes from a lower index to a higher one.
    pub components: Vec<Vec<usize>>,
    pub component_of: Vec<usize>,
}

impl Condensation {
    /// Components with no incoming arc from another component.
    pub fn sources(&self, succ: &[Vec<usize>]) -> Vec<usize> {
        let mut has_incoming = vec![false; self.components.len()];
        for (u, targets) in succ.iter().enumerate() {
            for &v in targets {
                let (cu, cv) = (self.component_of[u], self.component_of[v]);
                if cu != cv {
                    has_incoming[cv] = true;
                }
            }
        }
        (0..self.components.len())
            .filter(|&c| !has_incoming[c])
            .collect()
    }
}

/// `succ[u]` lists the arcs `u → v`.
pub(crate) fn condensation(succ: &[Vec<usize>]) -> Condensation {
    let n = succ.len();
    const UNSEEN: usize = usize::MAX;
    let mut index = vec![UNSEEN; n];
    let mut low = vec![0usize; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut components: Vec<Vec<usize>> = Vec::new();
    let mut next = 0usize;
    // (vertex, position in its successor list)
    let mut call: Vec<(usize, usize)> = Vec::new();

    for root in 0..n {
        if index[root] != UNSEEN {
            continue;
        }
        call.push((root, 0));
        index[root] = next;
        low[root] = next;
        next += 1;
        stack.push(root);
        on_stack[root] = true;

        while let Some(&mut (u, ref mut pos)) = call.last_mut() {
            if *pos < succ[u].len() {
                let v = succ[u][*pos];
                *pos += 1;
                if index[v] == UNSEEN {
                    index[v] = next;
                    low[v] = next;
                    next += 1;
                    stack.push(v);
                    on_stack[v] = true;
                    call.push((v, 0));
                } else if on_stack[v] {
                    low[u] = low[u].min(index[v]);
                }
                continue;
            }
            call.pop();
            if let Some(&(parent, _)) = call.last() {
                low[parent] = low[parent].min(low[u]);
            }
            if low[u] == index[u] {
                let mut comp = Vec::new();
                loop {
                    let w = stack.pop().expect("tarjan stack holds the component");
                    on_stack[w] = false;
                    comp.push(w);
                    if w == u {
                        break;
                    }
                }
                comp.sort_unstable();
                components.push(comp);
            }
        }
    }

    // Tarjan emits sinks first.
    components.reverse();
    let mut component_of = vec![0; n];
    for (c, comp) in components.iter().enumerate() {
        for &v in comp {
            component_of[v] = c;
        }
    }
    Condensation {
        components,
        component_of,
    }
}
