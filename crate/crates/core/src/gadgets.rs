//! Reduction from unweighted tree augmentation (TAP) to k-ECSM for odd `k`.
//!
//! Every tree edge `e = {u, v}` becomes two subdivided parallel paths
//! `u – w_e – v` and `u – w'_e – v`; links are copied as they are; every edge
//! costs 1. A TAP solution `F` gives a k-ECSM solution of cost `|F| + 2k|E|`
//! (each gadget path at `⌈k/2⌉/⌊k/2⌋`, each link of `F` once), and
//! [`rebalance`] turns any k-ECSM solution into one of the same cost whose link
//! support is a TAP solution.
//!
//! Vertex layout of the gadget graph: tree vertices keep their ids, tree edge
//! `i` owns `w = n + 2i` and `w' = n + 2i + 1`. Edge layout: tree edge `i`
//! owns edges `4i .. 4i + 4` in the order `{u,w}`, `{w,v}`, `{u,w'}`,
//! `{w',v}`; link `j` is edge `4|E| + j`.

use std::collections::BTreeSet;

use num_traits::One;
use thiserror::Error;

use crate::multigraph::{GraphError, MultiGraph, VertexId, VertexSet};
use crate::problems::{Instance, Mode};
use crate::rational::{int, Rational};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GadgetError {
    #[error("k must be odd and positive, got {0}")]
    EvenK(i64),
    #[error("tree needs at least one vertex")]
    Empty,
    #[error("expected {expected} tree edges, got {actual}")]
    TreeSize { expected: usize, actual: usize },
    #[error("tree edges do not form a spanning tree (cycle through {0}-{1})")]
    NotATree(usize, usize),
    #[error("pair {0}-{1} is out of range or a loop")]
    BadPair(usize, usize),
    #[error("link {0}-{1} is listed twice")]
    DuplicateLink(usize, usize),
    #[error("vertex set is not a tree cut: {0} tree edges cross it")]
    NotATreeCut(usize),
    #[error("solution has {actual} entries, gadget graph has {expected} edges")]
    SolutionLength { expected: usize, actual: usize },
    #[error("solution is not feasible: a cut has value {value} < {k}")]
    Infeasible { value: String, k: i64 },
    #[error("tree edge {0} is covered by no link")]
    Uncoverable(usize),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// A spanning tree on `0..n` plus candidate links.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TapInstance {
    n: usize,
    tree: Vec<(usize, usize)>,
    links: Vec<(usize, usize)>,
    /// Per vertex: parent and the tree edge to it, rooted at 0.
    parent: Vec<Option<(usize, usize)>>,
    depth: Vec<usize>,
}

impl TapInstance {
    pub fn new(
        n: usize,
        tree: Vec<(usize, usize)>,
        links: Vec<(usize, usize)>,
    ) -> Result<Self, GadgetError> {
        if n == 0 {
            return Err(GadgetError::Empty);
        }
        if tree.len() != n - 1 {
            return Err(GadgetError::TreeSize {
                expected: n - 1,
                actual: tree.len(),
            });
        }
        let mut adj = vec![Vec::new(); n];
        let mut comp: Vec<usize> = (0..n).collect();
        fn find(c: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while c[r] != r {
                r = c[r];
            }
            c[x] = r;
            r
        }
        for (i, &(u, v)) in tree.iter().enumerate() {
            if u >= n || v >= n || u == v {
                return Err(GadgetError::BadPair(u, v));
            }
            let (a, b) = (find(&mut comp, u), find(&mut comp, v));
            if a == b {
                return Err(GadgetError::NotATree(u, v));
            }
            comp[a] = b;
            adj[u].push((v, i));
            adj[v].push((u, i));
        }
        let mut seen = BTreeSet::new();
        for &(u, v) in &links {
            if u >= n || v >= n || u == v {
                return Err(GadgetError::BadPair(u, v));
            }
            if !seen.insert((u.min(v), u.max(v))) {
                return Err(GadgetError::DuplicateLink(u, v));
            }
        }
        let mut parent = vec![None; n];
        let mut depth = vec![0; n];
        let mut stack = vec![0usize];
        let mut visited = vec![false; n];
        visited[0] = true;
        while let Some(x) = stack.pop() {
            for &(y, e) in &adj[x] {
                if !visited[y] {
                    visited[y] = true;
                    parent[y] = Some((x, e));
                    depth[y] = depth[x] + 1;
                    stack.push(y);
                }
            }
        }
        Ok(Self {
            n,
            tree,
            links,
            parent,
            depth,
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn tree(&self) -> &[(usize, usize)] {
        &self.tree
    }

    pub fn links(&self) -> &[(usize, usize)] {
        &self.links
    }

    /// Tree edges on the path between `u` and `v`, ascending.
    pub fn tree_path(&self, mut u: usize, mut v: usize) -> Vec<usize> {
        let mut path = Vec::new();
        while u != v {
            if self.depth[u] < self.depth[v] {
                std::mem::swap(&mut u, &mut v);
            }
            let (p, e) = self.parent[u].expect("non-root vertex has a parent");
            path.push(e);
            u = p;
        }
        path.sort_unstable();
        path
    }

    /// `cov(e)` for every tree edge: indices of links whose tree path uses `e`.
    pub fn coverage(&self) -> Vec<Vec<usize>> {
        let mut cov = vec![Vec::new(); self.tree.len()];
        for (j, &(a, b)) in self.links.iter().enumerate() {
            for e in self.tree_path(a, b) {
                cov[e].push(j);
            }
        }
        cov
    }
}

/// Where a gadget-graph edge comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EdgeOrigin {
    /// Edge of the gadget of `tree_edge`; `primed` selects `w'_e` over `w_e`,
    /// `at_u` the half incident to the first endpoint.
    Gadget {
        tree_edge: usize,
        primed: bool,
        at_u: bool,
    },
    Link(usize),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GadgetInstance {
    pub graph: MultiGraph,
    pub cost: Vec<Rational>,
    pub k: i64,
    pub origin: Vec<EdgeOrigin>,
    pub tree_vertices: usize,
    pub tree_edges: usize,
}

impl GadgetInstance {
    pub fn hub(&self, tree_edge: usize, primed: bool) -> VertexId {
        VertexId(self.tree_vertices + 2 * tree_edge + usize::from(primed))
    }

    pub fn gadget_edges(&self, tree_edge: usize) -> [usize; 4] {
        let b = 4 * tree_edge;
        [b, b + 1, b + 2, b + 3]
    }

    pub fn link_edge(&self, link: usize) -> usize {
        4 * self.tree_edges + link
    }

    pub fn to_instance(&self) -> Instance {
        Instance::new(Mode::Ecsm, self.k, self.graph.clone(), self.cost.clone())
    }
}

/// Builds the k-ECSM instance of a TAP instance. `k` must be odd.
pub fn tap_to_kecsm(tap: &TapInstance, k: i64) -> Result<GadgetInstance, GadgetError> {
    if k < 1 || k % 2 == 0 {
        return Err(GadgetError::EvenK(k));
    }
    let n = tap.n;
    let m = tap.tree.len();
    let mut graph = MultiGraph::new(n + 2 * m, VertexId(0))?;
    let mut origin = Vec::with_capacity(4 * m + tap.links.len());
    for (i, &(u, v)) in tap.tree.iter().enumerate() {
        let (w, w2) = (VertexId(n + 2 * i), VertexId(n + 2 * i + 1));
        for (a, b, primed, at_u) in [
            (VertexId(u), w, false, true),
            (w, VertexId(v), false, false),
            (VertexId(u), w2, true, true),
            (w2, VertexId(v), true, false),
        ] {
            graph.add_edge(a, b)?;
            origin.push(EdgeOrigin::Gadget {
                tree_edge: i,
                primed,
                at_u,
            });
        }
    }
    for (j, &(a, b)) in tap.links.iter().enumerate() {
        graph.add_edge(VertexId(a), VertexId(b))?;
        origin.push(EdgeOrigin::Link(j));
    }
    Ok(GadgetInstance {
        cost: vec![Rational::one(); graph.edge_slots()],
        graph,
        k,
        origin,
        tree_vertices: n,
        tree_edges: m,
    })
}

/// The gadget-graph set of a tree cut `s`: `s` plus both hub vertices of
/// every tree edge inside `s`.
pub fn corresponding_cut(tap: &TapInstance, s: &BTreeSet<usize>) -> Result<VertexSet, GadgetError> {
    if let Some(&v) = s.iter().find(|&&v| v >= tap.n) {
        return Err(GadgetError::BadPair(v, v));
    }
    let crossing = tap
        .tree
        .iter()
        .filter(|(u, v)| s.contains(u) != s.contains(v))
        .count();
    if crossing != 1 {
        return Err(GadgetError::NotATreeCut(crossing));
    }
    let mut out: VertexSet = s.iter().map(|&v| VertexId(v)).collect();
    for (i, (u, v)) in tap.tree.iter().enumerate() {
        if s.contains(u) && s.contains(v) {
            out.insert(VertexId(tap.n + 2 * i));
            out.insert(VertexId(tap.n + 2 * i + 1));
        }
    }
    Ok(out)
}

fn check_feasible(gadget: &GadgetInstance, z: &[u64]) -> Result<(), GadgetError> {
    if z.len() != gadget.graph.edge_slots() {
        return Err(GadgetError::SolutionLength {
            expected: gadget.graph.edge_slots(),
            actual: z.len(),
        });
    }
    let w: Vec<Rational> = z.iter().map(|v| int(*v as i64)).collect();
    let cut = gadget.graph.global_min_cut(&w)?;
    if cut.value < int(gadget.k) {
        return Err(GadgetError::Infeasible {
            value: crate::rational::format_rational(&cut.value),
            k: gadget.k,
        });
    }
    Ok(())
}

/// Rewrites a feasible k-ECSM solution so that each hub vertex carries
/// `⌈k/2⌉` on one edge and `⌊k/2⌋` on the other, moving the surplus
/// `z(δ(w_e)) + z(δ(w'_e)) − 2k` onto the lowest-indexed link covering `e`.
/// Cost and feasibility are preserved.
pub fn rebalance(
    tap: &TapInstance,
    gadget: &GadgetInstance,
    z: &[u64],
) -> Result<Vec<u64>, GadgetError> {
    check_feasible(gadget, z)?;
    let k = gadget.k as u64;
    let (hi, lo) = (k.div_ceil(2), k / 2);
    let cov = tap.coverage();
    let mut out = z.to_vec();
    for i in 0..gadget.tree_edges {
        let [a, b, c, d] = gadget.gadget_edges(i);
        let surplus = z[a] + z[b] + z[c] + z[d] - 2 * k;
        out[a] = hi;
        out[b] = lo;
        out[c] = lo;
        out[d] = hi;
        if surplus > 0 {
            let &link = cov[i].first().ok_or(GadgetError::Uncoverable(i))?;
            out[gadget.link_edge(link)] += surplus;
        }
    }
    Ok(out)
}

/// Links used by a gadget solution.
pub fn extract_tap_solution(gadget: &GadgetInstance, z: &[u64]) -> Vec<usize> {
    gadget
        .origin
        .iter()
        .enumerate()
        .filter_map(|(idx, o)| match o {
            EdgeOrigin::Link(j) if z[idx] > 0 => Some(*j),
            _ => None,
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TapVerdict {
    pub feasible: bool,
    /// First tree edge no chosen link covers.
    pub uncovered: Option<usize>,
}

/// Checks that the chosen links cover every tree edge.
pub fn verify_tap(tap: &TapInstance, chosen: &[usize]) -> TapVerdict {
    let mut covered = vec![false; tap.tree.len()];
    for &j in chosen {
        if let Some(&(a, b)) = tap.links.get(j) {
            for e in tap.tree_path(a, b) {
                covered[e] = true;
            }
        }
    }
    let uncovered = covered.iter().position(|c| !c);
    TapVerdict {
        feasible: uncovered.is_none(),
        uncovered,
    }
}

/// Minimum TAP solution by enumerating link subsets by size. `None` when
/// even all links leave an edge uncovered. Intended for a handful of links.
pub fn brute_force_tap(tap: &TapInstance) -> Option<Vec<usize>> {
    let l = tap.links.len();
    assert!(l <= 24, "too many links to enumerate");
    let cov = tap.coverage();
    let masks: Vec<u32> = cov
        .iter()
        .map(|links| links.iter().fold(0u32, |m, &j| m | 1 << j))
        .collect();
    let mut best: Option<u32> = None;
    for chosen in 0u32..(1u32 << l) {
        if best.is_some_and(|b| chosen.count_ones() >= b.count_ones()) {
            continue;
        }
        if masks.iter().all(|m| m & chosen != 0) {
            best = Some(chosen);
        }
    }
    best.map(|b| (0..l).filter(|j| b >> j & 1 == 1).collect())
}

/// The k-ECSM solution built from a TAP solution: every gadget path at
/// `⌈k/2⌉/⌊k/2⌋`, every chosen link once. Cost `|F| + 2k|E|`.
pub fn solution_from_tap(gadget: &GadgetInstance, chosen: &[usize]) -> Vec<u64> {
    let k = gadget.k as u64;
    let mut z = vec![0u64; gadget.graph.edge_slots()];
    for i in 0..gadget.tree_edges {
        let [a, b, c, d] = gadget.gadget_edges(i);
        z[a] = k.div_ceil(2);
        z[b] = k / 2;
        z[c] = k / 2;
        z[d] = k.div_ceil(2);
    }
    for &j in chosen {
        z[gadget.link_edge(j)] = 1;
    }
    z
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::multigraph::for_each_root_free_set;

    fn star() -> TapInstance {
        TapInstance::new(4, vec![(0, 1), (0, 2), (0, 3)], vec![(1, 2), (2, 3)]).unwrap()
    }

    fn exhaustive_min_cut(g: &MultiGraph, z: &[u64]) -> Rational {
        let w: Vec<Rational> = z.iter().map(|v| int(*v as i64)).collect();
        let mut best: Option<Rational> = None;
        for_each_root_free_set(
            g,
            |_, v| {
                if best.as_ref().is_none_or(|b| v < b) {
                    best = Some(v.clone());
                }
            },
            &w,
        )
        .unwrap();
        best.unwrap()
    }

    #[test]
    fn sizes() {
        let single = TapInstance::new(2, vec![(0, 1)], vec![]).unwrap();
        let g = tap_to_kecsm(&single, 3).unwrap();
        assert_eq!((g.graph.vertex_count(), g.graph.edge_count()), (4, 4));
        let g = tap_to_kecsm(&star(), 5).unwrap();
        assert_eq!((g.graph.vertex_count(), g.graph.edge_count()), (10, 14));
        assert!(g.cost.iter().all(|c| *c == int(1)));
        assert_eq!(tap_to_kecsm(&star(), 4).unwrap_err(), GadgetError::EvenK(4));
    }

    #[test]
    fn gadget_edges_follow_layout() {
        let g = tap_to_kecsm(&star(), 3).unwrap();
        let ends: Vec<(usize, usize)> = g
            .graph
            .edges()
            .map(|e| (e.ends.0 .0, e.ends.1 .0))
            .collect();
        assert_eq!(&ends[0..4], &[(0, 4), (4, 1), (0, 5), (5, 1)]);
        assert_eq!(&ends[12..], &[(1, 2), (2, 3)]);
        assert_eq!(g.origin[13], EdgeOrigin::Link(1));
    }

    #[test]
    fn rejects_bad_trees() {
        assert!(matches!(
            TapInstance::new(3, vec![(0, 1), (1, 0)], vec![]),
            Err(GadgetError::NotATree(..))
        ));
        assert!(matches!(
            TapInstance::new(3, vec![(0, 1)], vec![]),
            Err(GadgetError::TreeSize { .. })
        ));
        assert!(matches!(
            TapInstance::new(2, vec![(0, 1)], vec![(0, 1), (1, 0)]),
            Err(GadgetError::DuplicateLink(..))
        ));
    }

    #[test]
    fn coverage_by_tree_paths() {
        let cov = star().coverage();
        assert_eq!(cov, vec![vec![0], vec![0, 1], vec![1]]);
        let path = TapInstance::new(4, vec![(0, 1), (1, 2), (2, 3)], vec![(0, 3)]).unwrap();
        assert_eq!(path.tree_path(3, 0), vec![0, 1, 2]);
    }

    #[test]
    fn corresponding_cuts() {
        let tap = star();
        assert_eq!(
            corresponding_cut(&tap, &[1].into()).unwrap(),
            [VertexId(1)].into()
        );
        let path = TapInstance::new(4, vec![(0, 1), (1, 2), (2, 3)], vec![]).unwrap();
        let s = corresponding_cut(&path, &[1, 2, 3].into()).unwrap();
        assert_eq!(s.len(), 3 + 4);
        assert!(matches!(
            corresponding_cut(&tap, &[1, 2].into()),
            Err(GadgetError::NotATreeCut(2))
        ));
    }

    #[test]
    fn verify_tap_reports_witness() {
        let single = TapInstance::new(2, vec![(0, 1)], vec![(0, 1)]).unwrap();
        assert_eq!(
            verify_tap(&single, &[]),
            TapVerdict {
                feasible: false,
                uncovered: Some(0)
            }
        );
        assert!(verify_tap(&single, &[0]).feasible);
    }

    #[test]
    fn rebalance_moves_surplus_to_covering_link() {
        let tap = TapInstance::new(3, vec![(0, 1), (1, 2)], vec![(0, 2), (0, 1)]).unwrap();
        let g = tap_to_kecsm(&tap, 3).unwrap();
        let mut z = solution_from_tap(&g, &[0]);
        // Bump the hub of tree edge 1 by one unit.
        z[4] += 1;
        let before: u64 = z.iter().sum();
        let out = rebalance(&tap, &g, &z).unwrap();
        assert_eq!(out.iter().sum::<u64>(), before);
        assert_eq!(out[g.link_edge(0)], 2);
        assert!(exhaustive_min_cut(&g.graph, &out) >= int(3));
    }

    #[test]
    fn rebalance_is_identity_on_balanced_solutions() {
        let tap = star();
        let tap = TapInstance::new(tap.n, tap.tree.clone(), vec![(1, 2), (2, 3), (0, 1)]).unwrap();
        let g = tap_to_kecsm(&tap, 5).unwrap();
        let z = solution_from_tap(&g, &[0, 1, 2]);
        assert_eq!(rebalance(&tap, &g, &z).unwrap(), z);
    }

    #[test]
    fn rebalance_rejects_infeasible() {
        let tap = star();
        let g = tap_to_kecsm(&tap, 3).unwrap();
        let z = vec![1; g.graph.edge_slots()];
        assert!(matches!(
            rebalance(&tap, &g, &z),
            Err(GadgetError::Infeasible { .. })
        ));
    }

    #[test]
    fn tap_witness_is_feasible_and_priced() {
        let tap = TapInstance::new(
            4,
            vec![(0, 1), (1, 2), (1, 3)],
            vec![(0, 2), (2, 3), (0, 3)],
        )
        .unwrap();
        let opt = brute_force_tap(&tap).unwrap();
        assert_eq!(opt.len(), 2);
        let g = tap_to_kecsm(&tap, 3).unwrap();
        let z = solution_from_tap(&g, &opt);
        assert!(exhaustive_min_cut(&g.graph, &z) >= int(3));
        assert_eq!(z.iter().sum::<u64>(), 2 + 2 * 3 * 3);
        assert_eq!(extract_tap_solution(&g, &z), opt);
    }
}
