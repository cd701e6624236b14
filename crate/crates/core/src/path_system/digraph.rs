//! Dependency digraph of a polynomial system and its strong components.

use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;

use super::poly::PolySystem;

/// Edge `i → j` iff `ψ_j` depends on `J_i`.
#[derive(Clone, Debug)]
pub struct DependencyDigraph {
    pub n: usize,
    pub edges: Vec<(usize, usize)>,
    /// Strong components, each sorted, in order of smallest member.
    pub components: Vec<Vec<usize>>,
    pub component_of: Vec<usize>,
    /// Components without outgoing edges in the condensation.
    pub sinks: Vec<usize>,
    /// Components without incoming edges in the condensation.
    pub sources: Vec<usize>,
}

impl DependencyDigraph {
    pub fn new(psi: &PolySystem) -> Self {
        let n = psi.dim();
        let mut edges = Vec::new();
        for (i, deps) in psi.dependents().into_iter().enumerate() {
            edges.extend(deps.into_iter().map(|j| (i, j)));
        }
        Self::from_edges(n, edges)
    }

    pub fn from_edges(n: usize, edges: Vec<(usize, usize)>) -> Self {
        let mut g = DiGraph::<(), ()>::with_capacity(n, edges.len());
        let nodes: Vec<_> = (0..n).map(|_| g.add_node(())).collect();
        for &(i, j) in &edges {
            g.add_edge(nodes[i], nodes[j], ());
        }
        let mut components: Vec<Vec<usize>> = tarjan_scc(&g)
            .into_iter()
            .map(|c| {
                let mut v: Vec<usize> = c.into_iter().map(|x| x.index()).collect();
                v.sort_unstable();
                v
            })
            .collect();
        components.sort();
        let mut component_of = vec![0; n];
        for (ci, c) in components.iter().enumerate() {
            for &v in c {
                component_of[v] = ci;
            }
        }
        let m = components.len();
        let mut has_out = vec![false; m];
        let mut has_in = vec![false; m];
        for &(i, j) in &edges {
            let (ci, cj) = (component_of[i], component_of[j]);
            if ci != cj {
                has_out[ci] = true;
                has_in[cj] = true;
            }
        }
        let sinks = (0..m).filter(|&c| !has_out[c]).collect();
        let sources = (0..m).filter(|&c| !has_in[c]).collect();
        DependencyDigraph { n, edges, components, component_of, sinks, sources }
    }

    /// The strong component every vertex can reach (the unique sink of the
    /// condensation), if it exists.
    pub fn absorbing(&self) -> Option<&[usize]> {
        match self.sinks.as_slice() {
            [c] => Some(&self.components[*c]),
            _ => None,
        }
    }

    /// Same notion with edges reversed (`i → j` iff `ψ_i` depends on `J_j`):
    /// the unique source of the condensation.
    pub fn absorbing_reversed(&self) -> Option<&[usize]> {
        match self.sources.as_slice() {
            [c] => Some(&self.components[*c]),
            _ => None,
        }
    }

    /// `true` if the component contains a cycle (more than one vertex or a
    /// self-loop).
    pub fn is_cyclic(&self, component: &[usize]) -> bool {
        component.len() > 1 || self.edges.iter().any(|&(i, j)| i == j && i == component[0])
    }
}
