//! Contractible multigraph with exact-rational cut and flow utilities.
//!
//! Edge identities are stable for the whole lifetime of a graph: deleting an
//! edge tombstones its slot, and contracting a vertex set remaps endpoints
//! while keeping both the [`EdgeId`] and the [`OriginalEdgeId`]. Weight and
//! capacity vectors are therefore indexed by `EdgeId` over all slots ever
//! created (see [`MultiGraph::edge_slots`]).
//!
//! Every cut is identified with its side that does not contain the root.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;
use std::ops::{AddAssign, SubAssign};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rational::Rational;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VertexId(pub usize);

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct EdgeId(pub usize);

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct OriginalEdgeId(pub usize);

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "v{}", self.0)
    }
}

impl fmt::Display for EdgeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "e{}", self.0)
    }
}

pub type VertexSet = BTreeSet<VertexId>;

/// Largest vertex count accepted by the exhaustive cut enumerators.
pub const EXHAUSTIVE_VERTEX_LIMIT: usize = 20;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("self-loop on vertex {0}")]
    SelfLoop(VertexId),
    #[error("unknown or contracted vertex {0}")]
    UnknownVertex(VertexId),
    #[error("unknown or deleted edge {0}")]
    UnknownEdge(EdgeId),
    #[error("vertex set contains the root {0}")]
    ContainsRoot(VertexId),
    #[error("contraction needs at least two vertices, got {0}")]
    ContractionTooSmall(usize),
    #[error("a cut must be a non-empty proper vertex subset")]
    InvalidCut,
    #[error("source and sink sets must be non-empty and disjoint")]
    InvalidTerminals,
    #[error("graph needs at least two vertices")]
    TooFewVertices,
    #[error("exhaustive enumeration limited to {limit} vertices, graph has {actual}")]
    TooManyVertices { limit: usize, actual: usize },
    #[error("negative capacity on edge {0}")]
    NegativeCapacity(EdgeId),
    #[error("weight vector has {actual} entries, expected {expected}")]
    WeightLength { expected: usize, actual: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Edge {
    pub id: EdgeId,
    pub ends: (VertexId, VertexId),
    pub original: OriginalEdgeId,
}

impl Edge {
    pub fn other(&self, v: VertexId) -> VertexId {
        if self.ends.0 == v {
            self.ends.1
        } else {
            self.ends.0
        }
    }

    pub fn touches(&self, v: VertexId) -> bool {
        self.ends.0 == v || self.ends.1 == v
    }

    /// True iff exactly one endpoint lies in `set`.
    pub fn crosses(&self, set: &VertexSet) -> bool {
        set.contains(&self.ends.0) != set.contains(&self.ends.1)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
struct VertexSlot {
    alive: bool,
    /// Vertices of the input graph this vertex stands for.
    members: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
struct EdgeSlot {
    edge: Edge,
    alive: bool,
}

/// Result of [`MultiGraph::contract`]. Vertices outside the contracted set keep
/// their ids; every vertex of `absorbed` maps to `merged`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Contraction {
    pub merged: VertexId,
    pub absorbed: VertexSet,
    /// Edges with both endpoints in the contracted set; they are removed.
    pub internal: Vec<EdgeId>,
}

impl Contraction {
    pub fn map(&self, v: VertexId) -> VertexId {
        if self.absorbed.contains(&v) {
            self.merged
        } else {
            v
        }
    }
}

/// A cut value together with its witness (the side not containing the root,
/// or the source side for flow computations).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CutWitness {
    pub value: Rational,
    pub set: VertexSet,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiGraph {
    vertices: Vec<VertexSlot>,
    edges: Vec<EdgeSlot>,
    root: VertexId,
    original_vertices: usize,
}

impl MultiGraph {
    /// A graph on vertices `0..n` with no edges.
    pub fn new(n: usize, root: VertexId) -> Result<Self, GraphError> {
        if root.0 >= n {
            return Err(GraphError::UnknownVertex(root));
        }
        Ok(Self {
            vertices: (0..n)
                .map(|i| VertexSlot {
                    alive: true,
                    members: vec![i],
                })
                .collect(),
            edges: Vec::new(),
            root,
            original_vertices: n,
        })
    }

    pub fn from_edges(
        n: usize,
        root: VertexId,
        edges: &[(usize, usize)],
    ) -> Result<Self, GraphError> {
        let mut g = Self::new(n, root)?;
        for &(u, v) in edges {
            g.add_edge(VertexId(u), VertexId(v))?;
        }
        Ok(g)
    }

    /// Adds an edge; its original id equals its slot index.
    pub fn add_edge(&mut self, u: VertexId, v: VertexId) -> Result<EdgeId, GraphError> {
        self.check_vertex(u)?;
        self.check_vertex(v)?;
        if u == v {
            return Err(GraphError::SelfLoop(u));
        }
        let id = EdgeId(self.edges.len());
        self.edges.push(EdgeSlot {
            edge: Edge {
                id,
                ends: (u, v),
                original: OriginalEdgeId(id.0),
            },
            alive: true,
        });
        Ok(id)
    }

    pub fn root(&self) -> VertexId {
        self.root
    }

    pub fn original_vertex_count(&self) -> usize {
        self.original_vertices
    }

    /// Number of edge slots ever created, i.e. the length weight vectors need.
    pub fn edge_slots(&self) -> usize {
        self.edges.len()
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.vertices
            .iter()
            .enumerate()
            .filter(|(_, s)| s.alive)
            .map(|(i, _)| VertexId(i))
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.iter().filter(|s| s.alive).count()
    }

    pub fn vertex_set(&self) -> VertexSet {
        self.vertices().collect()
    }

    pub fn contains_vertex(&self, v: VertexId) -> bool {
        self.vertices.get(v.0).is_some_and(|s| s.alive)
    }

    /// Input-graph vertices represented by `v`.
    pub fn members(&self, v: VertexId) -> &[usize] {
        &self.vertices[v.0].members
    }

    pub fn edges(&self) -> impl Iterator<Item = &Edge> + '_ {
        self.edges.iter().filter(|s| s.alive).map(|s| &s.edge)
    }

    pub fn edge_count(&self) -> usize {
        self.edges.iter().filter(|s| s.alive).count()
    }

    pub fn is_live(&self, e: EdgeId) -> bool {
        self.edges.get(e.0).is_some_and(|s| s.alive)
    }

    /// Edge data for any slot, including deleted ones.
    pub fn edge(&self, e: EdgeId) -> &Edge {
        &self.edges[e.0].edge
    }

    pub fn delete_edge(&mut self, e: EdgeId) -> Result<(), GraphError> {
        match self.edges.get_mut(e.0) {
            Some(slot) if slot.alive => {
                slot.alive = false;
                Ok(())
            }
            _ => Err(GraphError::UnknownEdge(e)),
        }
    }

    fn check_vertex(&self, v: VertexId) -> Result<(), GraphError> {
        if self.contains_vertex(v) {
            Ok(())
        } else {
            Err(GraphError::UnknownVertex(v))
        }
    }

    fn check_set(&self, s: &VertexSet) -> Result<(), GraphError> {
        s.iter().try_for_each(|&v| self.check_vertex(v))
    }

    fn check_weights(&self, w: &[Rational]) -> Result<(), GraphError> {
        if w.len() != self.edges.len() {
            return Err(GraphError::WeightLength {
                expected: self.edges.len(),
                actual: w.len(),
            });
        }
        Ok(())
    }

    /// Replaces `s` by a single new vertex. Internal edges are deleted and
    /// reported; boundary edges keep their ids.
    pub fn contract(&mut self, s: &VertexSet) -> Result<Contraction, GraphError> {
        self.check_set(s)?;
        if s.contains(&self.root) {
            return Err(GraphError::ContainsRoot(self.root));
        }
        if s.len() < 2 {
            return Err(GraphError::ContractionTooSmall(s.len()));
        }
        let merged = VertexId(self.vertices.len());
        let mut members = Vec::new();
        for v in s {
            let slot = &mut self.vertices[v.0];
            slot.alive = false;
            members.extend(slot.members.iter().copied());
        }
        members.sort_unstable();
        self.vertices.push(VertexSlot {
            alive: true,
            members,
        });
        let mut internal = Vec::new();
        for slot in self.edges.iter_mut().filter(|s| s.alive) {
            let (a, b) = slot.edge.ends;
            match (s.contains(&a), s.contains(&b)) {
                (true, true) => {
                    slot.alive = false;
                    internal.push(slot.edge.id);
                }
                (true, false) => slot.edge.ends.0 = merged,
                (false, true) => slot.edge.ends.1 = merged,
                (false, false) => {}
            }
        }
        Ok(Contraction {
            merged,
            absorbed: s.clone(),
            internal,
        })
    }

    /// All live edges with endpoint set exactly `{u, v}`, in id order.
    pub fn parallel_class(&self, u: VertexId, v: VertexId) -> Vec<EdgeId> {
        self.edges()
            .filter(|e| (e.ends == (u, v) || e.ends == (v, u)) && u != v)
            .map(|e| e.id)
            .collect()
    }

    /// Live edges with exactly one endpoint in `s`.
    pub fn boundary(&self, s: &VertexSet) -> Vec<EdgeId> {
        self.edges()
            .filter(|e| e.crosses(s))
            .map(|e| e.id)
            .collect()
    }

    /// Live edges with both endpoints in `s`.
    pub fn internal_edges(&self, s: &VertexSet) -> Vec<EdgeId> {
        self.edges()
            .filter(|e| s.contains(&e.ends.0) && s.contains(&e.ends.1))
            .map(|e| e.id)
            .collect()
    }

    /// Exact `w(δ(s))`. `s` must be a non-empty proper subset of the live vertices.
    pub fn cut_weight(&self, w: &[Rational], s: &VertexSet) -> Result<Rational, GraphError> {
        self.check_weights(w)?;
        self.check_set(s)?;
        if s.is_empty() || s.len() >= self.vertex_count() {
            return Err(GraphError::InvalidCut);
        }
        Ok(self.boundary_weight(w, s))
    }

    pub(crate) fn boundary_weight(&self, w: &[Rational], s: &VertexSet) -> Rational {
        self.edges()
            .filter(|e| e.crosses(s))
            .fold(Rational::zero(), |acc, e| acc + &w[e.id.0])
    }

    /// Maximum flow from `sources` to `sinks` with undirected capacities `cap`
    /// and the minimal minimum cut: the source side is the set of vertices
    /// reachable from `sources` in the final residual graph.
    pub fn max_flow_min_cut(
        &self,
        cap: &[Rational],
        sources: &VertexSet,
        sinks: &VertexSet,
    ) -> Result<CutWitness, GraphError> {
        self.check_weights(cap)?;
        self.check_set(sources)?;
        self.check_set(sinks)?;
        if sources.is_empty() || sinks.is_empty() || !sources.is_disjoint(sinks) {
            return Err(GraphError::InvalidTerminals);
        }
        if let Some(e) = self.edges().find(|e| cap[e.id.0].is_negative()) {
            return Err(GraphError::NegativeCapacity(e.id));
        }
        Ok(match ScaledCaps::new(self, cap) {
            Some(scaled) => {
                let (flow, set) = self.flow_cut(&scaled.caps, sources, sinks);
                CutWitness {
                    value: scaled.unscale(flow),
                    set,
                }
            }
            None => {
                let (value, set) = self.flow_cut(cap, sources, sinks);
                CutWitness { value, set }
            }
        })
    }

    fn flow_cut<C: Capacity>(
        &self,
        cap: &[C],
        sources: &VertexSet,
        sinks: &VertexSet,
    ) -> (C, VertexSet) {
        let mut net = FlowNetwork::build(self, cap);
        let src: Vec<usize> = sources.iter().map(|v| net.index[v.0]).collect();
        let mut is_sink = vec![false; net.len()];
        for v in sinks {
            is_sink[net.index[v.0]] = true;
        }
        let value = net.max_flow(&src, &is_sink);
        let reach = net.reachable(&src);
        let set = reach
            .iter()
            .enumerate()
            .filter(|(_, r)| **r)
            .map(|(i, _)| net.vertices[i])
            .collect();
        (value, set)
    }

    /// Minimum of `w(δ(S))` over non-empty `S ⊆ V∖{r}`, computed with one exact
    /// max-flow per non-root vertex. Ties prefer the smaller, then
    /// lexicographically smaller, witness.
    pub fn global_min_cut(&self, w: &[Rational]) -> Result<CutWitness, GraphError> {
        self.check_weights(w)?;
        if self.vertex_count() < 2 {
            return Err(GraphError::TooFewVertices);
        }
        if let Some(e) = self.edges().find(|e| w[e.id.0].is_negative()) {
            return Err(GraphError::NegativeCapacity(e.id));
        }
        let sink: VertexSet = [self.root].into();
        let scaled = ScaledCaps::new(self, w);
        let mut best: Option<CutWitness> = None;
        for v in self.vertices().filter(|&v| v != self.root) {
            let source: VertexSet = [v].into();
            let cut = match &scaled {
                Some(sc) => {
                    let (flow, set) = self.flow_cut(&sc.caps, &source, &sink);
                    CutWitness {
                        value: sc.unscale(flow),
                        set,
                    }
                }
                None => {
                    let (value, set) = self.flow_cut(w, &source, &sink);
                    CutWitness { value, set }
                }
            };
            if best.as_ref().is_none_or(|b| cut_order(&cut, b).is_lt()) {
                best = Some(cut);
            }
        }
        Ok(best.expect("at least one non-root vertex"))
    }

    /// Brute-force global minimum cut over all `2^(n-1) - 1` root-free sets.
    /// Same tie-breaking as [`MultiGraph::global_min_cut`].
    pub fn exhaustive_min_cut(&self, w: &[Rational]) -> Result<CutWitness, GraphError> {
        self.check_weights(w)?;
        let mut best: Option<CutWitness> = None;
        for_each_root_free_set(
            self,
            |set, value| {
                let cand = CutWitness {
                    value: value.clone(),
                    set: set.clone(),
                };
                if best.as_ref().is_none_or(|b| cut_order(&cand, b).is_lt()) {
                    best = Some(cand);
                }
            },
            w,
        )?;
        best.ok_or(GraphError::TooFewVertices)
    }
}

pub(crate) fn cut_order(a: &CutWitness, b: &CutWitness) -> std::cmp::Ordering {
    a.value
        .cmp(&b.value)
        .then(a.set.len().cmp(&b.set.len()))
        .then_with(|| a.set.cmp(&b.set))
}

/// Calls `visit(S, w(δ(S)))` for every non-empty `S ⊆ V∖{r}` of the live graph.
pub fn for_each_root_free_set(
    g: &MultiGraph,
    mut visit: impl FnMut(&VertexSet, &Rational),
    w: &[Rational],
) -> Result<(), GraphError> {
    g.check_weights(w)?;
    let others: Vec<VertexId> = g.vertices().filter(|&v| v != g.root()).collect();
    if others.is_empty() {
        return Err(GraphError::TooFewVertices);
    }
    if others.len() + 1 > EXHAUSTIVE_VERTEX_LIMIT {
        return Err(GraphError::TooManyVertices {
            limit: EXHAUSTIVE_VERTEX_LIMIT,
            actual: others.len() + 1,
        });
    }
    let mut bit = vec![usize::MAX; g.vertices.len()];
    for (i, v) in others.iter().enumerate() {
        bit[v.0] = i;
    }
    let side = |mask: u32, v: VertexId| bit[v.0] != usize::MAX && mask >> bit[v.0] & 1 == 1;
    let edges: Vec<&Edge> = g.edges().collect();
    for mask in 1u32..(1u32 << others.len()) {
        let set: VertexSet = others
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, v)| *v)
            .collect();
        let value = edges
            .iter()
            .filter(|e| side(mask, e.ends.0) != side(mask, e.ends.1))
            .fold(Rational::zero(), |acc, e| acc + &w[e.id.0]);
        visit(&set, &value);
    }
    Ok(())
}

/// Residual network over the live vertices with parallel edges aggregated.
/// Residual capacities: exact rationals, or integers after scaling.
trait Capacity: Clone + Ord + Zero + for<'a> AddAssign<&'a Self> + for<'a> SubAssign<&'a Self> {}

impl Capacity for Rational {}
impl Capacity for i128 {}

/// Capacities multiplied by the lcm of their denominators, when every
/// partial sum fits in an `i128`. Flows on these are exact and much cheaper
/// than on big rationals.
struct ScaledCaps {
    caps: Vec<i128>,
    scale: BigInt,
}

impl ScaledCaps {
    fn new(g: &MultiGraph, cap: &[Rational]) -> Option<Self> {
        let mut scale: i128 = 1;
        for e in g.edges() {
            let d = cap[e.id.0].denom().to_i128()?;
            scale = (scale / scale.gcd(&d)).checked_mul(d)?;
        }
        let mut caps = vec![0i128; cap.len()];
        let mut total: i128 = 0;
        for e in g.edges() {
            let c = &cap[e.id.0];
            let v = c
                .numer()
                .to_i128()?
                .checked_mul(scale / c.denom().to_i128()?)?;
            total = total.checked_add(v)?;
            caps[e.id.0] = v;
        }
        total.checked_mul(2)?;
        Some(Self {
            caps,
            scale: BigInt::from(scale),
        })
    }

    fn unscale(&self, v: i128) -> Rational {
        Rational::new(BigInt::from(v), self.scale.clone())
    }
}

struct FlowNetwork<C> {
    vertices: Vec<VertexId>,
    /// VertexId slot -> dense index (usize::MAX for dead slots).
    index: Vec<usize>,
    adj: Vec<Vec<usize>>,
    arcs: Vec<Arc<C>>,
}

struct Arc<C> {
    to: usize,
    residual: C,
}

impl<C: Capacity> FlowNetwork<C> {
    fn build(g: &MultiGraph, cap: &[C]) -> Self {
        let vertices: Vec<VertexId> = g.vertices().collect();
        let mut index = vec![usize::MAX; g.vertices.len()];
        for (i, v) in vertices.iter().enumerate() {
            index[v.0] = i;
        }
        let n = vertices.len();
        let mut pair_cap: std::collections::BTreeMap<(usize, usize), C> = Default::default();
        for e in g.edges() {
            let (a, b) = (index[e.ends.0 .0], index[e.ends.1 .0]);
            let key = (a.min(b), a.max(b));
            *pair_cap.entry(key).or_insert_with(C::zero) += &cap[e.id.0];
        }
        let mut net = Self {
            vertices,
            index,
            adj: vec![Vec::new(); n],
            arcs: Vec::new(),
        };
        for ((a, b), c) in pair_cap {
            if c.is_zero() {
                continue;
            }
            // An undirected edge is a pair of opposite arcs, each the other's reverse.
            let id = net.arcs.len();
            net.arcs.push(Arc {
                to: b,
                residual: c.clone(),
            });
            net.arcs.push(Arc { to: a, residual: c });
            net.adj[a].push(id);
            net.adj[b].push(id + 1);
        }
        net
    }

    fn len(&self) -> usize {
        self.vertices.len()
    }

    /// Shortest-augmenting-path max flow from a source set to a sink set.
    fn max_flow(&mut self, sources: &[usize], is_sink: &[bool]) -> C {
        let mut total = C::zero();
        loop {
            let mut parent_arc = vec![usize::MAX; self.len()];
            let mut seen = vec![false; self.len()];
            let mut queue = VecDeque::new();
            for &s in sources {
                seen[s] = true;
                queue.push_back(s);
            }
            let mut hit = None;
            'bfs: while let Some(u) = queue.pop_front() {
                for &a in &self.adj[u] {
                    let arc = &self.arcs[a];
                    if seen[arc.to] || arc.residual <= C::zero() {
                        continue;
                    }
                    seen[arc.to] = true;
                    parent_arc[arc.to] = a;
                    if is_sink[arc.to] {
                        hit = Some(arc.to);
                        break 'bfs;
                    }
                    queue.push_back(arc.to);
                }
            }
            let Some(sink) = hit else {
                return total;
            };
            let mut path = Vec::new();
            let mut v = sink;
            while parent_arc[v] != usize::MAX {
                let a = parent_arc[v];
                path.push(a);
                v = self.arcs[a ^ 1].to;
            }
            let bottleneck = path
                .iter()
                .map(|&a| &self.arcs[a].residual)
                .min()
                .expect("non-empty path")
                .clone();
            for &a in &path {
                self.arcs[a].residual -= &bottleneck;
                self.arcs[a ^ 1].residual += &bottleneck;
            }
            total += &bottleneck;
        }
    }

    fn reachable(&self, sources: &[usize]) -> Vec<bool> {
        let mut seen = vec![false; self.len()];
        let mut queue: VecDeque<usize> = sources.iter().copied().collect();
        for &s in sources {
            seen[s] = true;
        }
        while let Some(u) = queue.pop_front() {
            for &a in &self.adj[u] {
                let arc = &self.arcs[a];
                if !seen[arc.to] && arc.residual > C::zero() {
                    seen[arc.to] = true;
                    queue.push_back(arc.to);
                }
            }
        }
        seen
    }
}

pub fn set_of(ids: &[usize]) -> VertexSet {
    ids.iter().map(|&i| VertexId(i)).collect()
}
