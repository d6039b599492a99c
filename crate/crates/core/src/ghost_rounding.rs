//! Iterative relaxation with ghost values: rounds a fractional vector `y0`
//! with `y0(δ(S)) ≥ k` on every cut to an integral `z` with
//!
//! * `c·z ≤ c·y0`,
//! * `z_e ∈ {⌊y0_e⌋, ⌈y0_e⌉}` for every edge, and
//! * `z(δ(S)) ≥ k − 9 − [k odd]` on every cut.
//!
//! The loop keeps an LP over the current (contracted) graph whose rows are
//! `x(δ(S)) ≥ k − g(δ(S))` with box bounds `[⌊y0⌋, ⌈y0⌉]` and equality bounds
//! for edges that became integral. Each iteration performs exactly one event:
//!
//! 1. **ghost augmentation**: if some parallel class `E(u,v)` carries a
//!    `(y+g)`-load in `[k/2 − 2, k/2)`, add 2 to the ghost value of its lowest
//!    edge id;
//! 2. otherwise **drop/contract**: find a minimal `y`-tight row whose set has
//!    at most three fractional boundary edges, fix the internal edge values
//!    into the output, drop the row and contract the set.
//!
//! After the event the LP is re-solved to a vertex, edges with `y + g = 0` are
//! deleted and integral edges are frozen. Ghost values never reach the output.
//!
//! Odd `k` runs internally with `k − 1`.
//!
//! Every structural property the analysis relies on is asserted at runtime and
//! surfaces as [`RoundingError::Invariant`] when it fails.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cut_oracle::{audit_all_rows, solve_ghost_lp, GhostLpView, OracleError, RowPool};
use crate::multigraph::{
    for_each_root_free_set, EdgeId, GraphError, MultiGraph, OriginalEdgeId, VertexId, VertexSet,
};
use crate::rational::{format_rational, int, is_integral, to_u64, Rational};

/// Graphs up to this many vertices get exhaustive per-iteration audits by default.
pub const EXHAUSTIVE_AUDIT_VERTICES: usize = 8;

/// Iterations allowed per input vertex before the run is declared runaway.
pub const ITERATION_FACTOR: usize = 4;

/// Runtime-checked properties of the rounding loop.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Check {
    /// `(y+g)(δ(S)) ≥ k − 2` on every cut, with an integral boundary at equality.
    YPlusGHigh,
    /// Every parallel class has at most one fractional edge.
    AtMostOneFracPerClass,
    /// An augmented class carries no ghost value yet.
    NoPositiveGhostInClass,
    /// `⌊y⌋(E(u,v)) ≥ k/2 − 2` when augmenting `E(u,v)`.
    LargeIntegralAtAugmentation,
    /// Internal edges of a relaxed set are integral.
    IntegralInContractedSet,
    /// A fractional iterate always admits an augmentation or a relaxation.
    Progress,
    /// At most `4·|V̄|` iterations.
    IterationBound,
    /// The LP optimum never increases.
    CostMonotone,
    /// Frozen edges keep their value.
    FrozenStable,
    /// The returned vertex satisfies every row of the LP.
    LpRowsSatisfied,
    /// The relaxed set has no tight row on a strict subset.
    RelaxationMinimality,
    /// `z(δ(R)) ≤ k + 2` for every contracted set `R`.
    ZUpperBound,
    /// `z(δ(S)) ≥ k − 9` for even internal `k`.
    CutLowerBound,
    CostPreserved,
    IntegrallyRounded,
    LaminarFamily,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RoundingError {
    #[error("k must be at least 1, got {0}")]
    InvalidK(i64),
    #[error("input vector has {actual} entries, graph has {expected} edges")]
    InputLength { expected: usize, actual: usize },
    #[error("input value on edge {0} is negative")]
    NegativeInput(EdgeId),
    #[error("input vector has a cut of value {min_cut} < k = {k}")]
    InfeasibleInput { min_cut: String, k: i64 },
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error("invariant {check:?} violated: {detail}")]
    Invariant { check: Check, detail: String },
}

fn violated(check: Check, detail: impl Into<String>) -> RoundingError {
    RoundingError::Invariant {
        check,
        detail: detail.into(),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContractionRecord {
    /// Input-graph vertices of the contracted set.
    pub set: Vec<usize>,
    /// Internal edges and their frozen values at contraction time.
    pub internal: Vec<(OriginalEdgeId, u64)>,
    /// Boundary edges at contraction time.
    pub boundary: Vec<OriginalEdgeId>,
}

/// The contracted sets, in contraction order.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LaminarFamily {
    pub records: Vec<ContractionRecord>,
}

impl LaminarFamily {
    pub fn is_laminar(&self) -> bool {
        let sets: Vec<BTreeSet<usize>> = self
            .records
            .iter()
            .map(|r| r.set.iter().copied().collect())
            .collect();
        sets.iter().enumerate().all(|(i, a)| {
            sets[i + 1..]
                .iter()
                .all(|b| a.is_disjoint(b) || a.is_subset(b) || b.is_subset(a))
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoundedSolution {
    /// Multiplicity per original edge.
    pub z: Vec<u64>,
    #[serde(with = "crate::rational::serde_text")]
    pub cost: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "event", rename_all = "snake_case")]
pub enum TraceEvent {
    Solve {
        #[serde(with = "crate::rational::serde_text")]
        objective: Rational,
        rows_added: usize,
        pool_rows: usize,
    },
    Freeze {
        edges: Vec<usize>,
    },
    Delete {
        edges: Vec<usize>,
    },
    Augment {
        u: usize,
        v: usize,
        edge: usize,
    },
    Relax {
        set: Vec<usize>,
        members: Vec<usize>,
    },
    Contract {
        set: Vec<usize>,
        merged: usize,
    },
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunTrace {
    pub k_input: i64,
    pub k_internal: i64,
    pub vertices: usize,
    pub iterations: usize,
    pub augmentations: usize,
    pub relaxations: usize,
    pub contractions: usize,
    pub events: Vec<TraceEvent>,
}

impl RunTrace {
    /// Objective after each LP solve, in order.
    pub fn objectives(&self) -> Vec<Rational> {
        self.events
            .iter()
            .filter_map(|e| match e {
                TraceEvent::Solve { objective, .. } => Some(objective.clone()),
                _ => None,
            })
            .collect()
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RoundingOptions {
    /// Exhaustive audits every iteration; `None` enables them for graphs with
    /// at most [`EXHAUSTIVE_AUDIT_VERTICES`] vertices.
    pub exhaustive: Option<bool>,
}

#[derive(Clone, Debug)]
pub struct RoundOutcome {
    pub solution: RoundedSolution,
    pub trace: RunTrace,
    pub family: LaminarFamily,
}

/// Ghost augmentation target.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Augmentation {
    pub u: VertexId,
    pub v: VertexId,
    pub edge: EdgeId,
    pub load: Rational,
}

/// Full state of the rounding loop. Edge-indexed vectors cover every edge slot.
#[derive(Clone, Debug)]
pub struct GhostState {
    pub graph: MultiGraph,
    pub k: i64,
    pub cost: Vec<Rational>,
    pub y: Vec<Rational>,
    pub ghost: Vec<u32>,
    pub lower: Vec<Rational>,
    pub upper: Vec<Rational>,
    pub frozen: Vec<Option<u64>>,
    pub relaxed: VertexSet,
    pub family: LaminarFamily,
    /// Values fixed when an edge became internal to a relaxed set.
    pub partial_z: Vec<Option<u64>>,
    pub deleted: Vec<bool>,
    pub pool: RowPool,
    pub objective: Rational,
    pub iterations: usize,
    pub exhaustive: bool,
    pub trace: RunTrace,
}

impl GhostState {
    /// State before the initial solve: bounds `[⌊y0⌋, ⌈y0⌉]`, no ghost values.
    pub fn new(
        graph: MultiGraph,
        cost: Vec<Rational>,
        y0: &[Rational],
        k: i64,
        exhaustive: bool,
    ) -> Self {
        let m = graph.edge_slots();
        Self {
            k,
            y: y0.to_vec(),
            ghost: vec![0; m],
            lower: y0.iter().map(|v| v.floor()).collect(),
            upper: y0.iter().map(|v| v.ceil()).collect(),
            frozen: vec![None; m],
            relaxed: VertexSet::new(),
            family: LaminarFamily::default(),
            partial_z: vec![None; m],
            deleted: vec![false; m],
            pool: RowPool::new(),
            objective: Rational::zero(),
            iterations: 0,
            exhaustive,
            trace: RunTrace {
                k_internal: k,
                vertices: graph.original_vertex_count(),
                ..RunTrace::default()
            },
            cost,
            graph,
        }
    }

    pub fn view(&self) -> GhostLpView<'_> {
        GhostLpView {
            graph: &self.graph,
            k: self.k,
            ghost: &self.ghost,
            lower: &self.lower,
            upper: &self.upper,
            relaxed: &self.relaxed,
        }
    }

    pub fn load(&self) -> Vec<Rational> {
        self.view().load(&self.y)
    }

    pub fn fractional_edges(&self) -> Vec<EdgeId> {
        self.graph
            .edges()
            .filter(|e| !is_integral(&self.y[e.id.0]))
            .map(|e| e.id)
            .collect()
    }

    pub fn is_integral(&self) -> bool {
        self.graph.edges().all(|e| is_integral(&self.y[e.id.0]))
    }

    /// Live parallel classes keyed by ordered endpoint pair.
    fn classes(&self) -> BTreeMap<(VertexId, VertexId), Vec<EdgeId>> {
        let mut classes: BTreeMap<(VertexId, VertexId), Vec<EdgeId>> = BTreeMap::new();
        for e in self.graph.edges() {
            let (a, b) = e.ends;
            classes.entry((a.min(b), a.max(b))).or_default().push(e.id);
        }
        classes
    }

    /// Solves the current LP to an optimal vertex and records it.
    pub fn solve(&mut self) -> Result<(), RoundingError> {
        let mut pool = std::mem::take(&mut self.pool);
        let sol = solve_ghost_lp(&self.view(), &self.cost, &mut pool);
        self.pool = pool;
        let sol = sol?;
        if self.exhaustive {
            if let Some(s) = audit_all_rows(&self.view(), &sol.y)? {
                return Err(violated(
                    Check::LpRowsSatisfied,
                    format!("row for {s:?} violated after solve"),
                ));
            }
        }
        for e in self.graph.edges() {
            if let Some(f) = self.frozen[e.id.0] {
                if sol.y[e.id.0] != int(f as i64) {
                    return Err(violated(
                        Check::FrozenStable,
                        format!("edge {} left its frozen value {f}", e.id),
                    ));
                }
            }
        }
        self.trace.events.push(TraceEvent::Solve {
            objective: sol.objective.clone(),
            rows_added: sol.rows_added,
            pool_rows: self.pool.len(),
        });
        self.objective = sol.objective;
        for e in self.graph.edges() {
            self.y[e.id.0] = sol.y[e.id.0].clone();
        }
        Ok(())
    }

    /// Ghost augmentation target: the first parallel class (in vertex-pair
    /// order) with `(y+g)(E(u,v)) ∈ [k/2 − 2, k/2)`, augmented on its lowest edge.
    pub fn find_ghost_augmentation(&self) -> Option<Augmentation> {
        let lo = int(self.k - 4);
        let hi = int(self.k);
        for ((u, v), edges) in self.classes() {
            let load = edges.iter().fold(Rational::zero(), |acc, e| {
                acc + &self.y[e.0] + int(i64::from(self.ghost[e.0]))
            });
            let doubled = &load * int(2);
            if doubled >= lo && doubled < hi {
                return Some(Augmentation {
                    u,
                    v,
                    edge: *edges.iter().min().expect("class is non-empty"),
                    load,
                });
            }
        }
        None
    }

    pub fn apply_augmentation(&mut self, aug: &Augmentation) -> Result<(), RoundingError> {
        let class = self.graph.parallel_class(aug.u, aug.v);
        if let Some(e) = class.iter().find(|e| self.ghost[e.0] > 0) {
            return Err(violated(
                Check::NoPositiveGhostInClass,
                format!(
                    "edge {e} of E({},{}) already carries ghost value",
                    aug.u, aug.v
                ),
            ));
        }
        let floor_sum = class
            .iter()
            .fold(Rational::zero(), |acc, e| acc + self.y[e.0].floor());
        if &floor_sum * int(2) < int(self.k - 4) {
            return Err(violated(
                Check::LargeIntegralAtAugmentation,
                format!(
                    "⌊y⌋(E({},{})) = {} < k/2 - 2",
                    aug.u,
                    aug.v,
                    format_rational(&floor_sum)
                ),
            ));
        }
        self.ghost[aug.edge.0] += 2;
        self.trace.augmentations += 1;
        self.trace.events.push(TraceEvent::Augment {
            u: aug.u.0,
            v: aug.v.0,
            edge: aug.edge.0,
        });
        Ok(())
    }

    /// A set whose y-tight row can be dropped: tight, no tight row on a strict
    /// subset, and at most three fractional boundary edges.
    ///
    /// Singletons outside `W ∪ {r}` are tried first. Otherwise, for every set
    /// `U` of at most three fractional edges and every choice of one endpoint
    /// per edge, the chosen endpoints (padded to a pair when fewer than two)
    /// form a source set `Z`; the minimal minimum cut between `Z` and
    /// `{r} ∪ (V(frac(y)) ∖ Z)` under `y + g` is a candidate. Among the
    /// inclusion-minimal candidates, the first with load exactly `k` wins.
    pub fn find_relaxable_cut(&self) -> Result<Option<VertexSet>, RoundingError> {
        let g = &self.graph;
        let root = g.root();
        let load = self.load();
        let k = int(self.k);
        let frac = self.fractional_edges();
        let frac_set: BTreeSet<EdgeId> = frac.iter().copied().collect();
        let frac_on = |s: &VertexSet| {
            g.boundary(s)
                .iter()
                .filter(|e| frac_set.contains(e))
                .count()
        };

        for v in g.vertices() {
            if v == root || self.relaxed.contains(&v) {
                continue;
            }
            let s: VertexSet = [v].into();
            if g.boundary_weight(&load, &s) == k && frac_on(&s) <= 3 {
                return Ok(Some(s));
            }
        }

        let endpoints: VertexSet = frac
            .iter()
            .flat_map(|e| {
                let (a, b) = g.edge(*e).ends;
                [a, b]
            })
            .collect();
        let vertices: Vec<VertexId> = g.vertices().filter(|v| *v != root).collect();
        let mut sources: BTreeSet<VertexSet> = BTreeSet::new();
        let mut consider = |chosen: &[EdgeId]| {
            for mask in 0u32..(1 << chosen.len()) {
                let pick: VertexSet = chosen
                    .iter()
                    .enumerate()
                    .map(|(i, e)| {
                        let (a, b) = g.edge(*e).ends;
                        if mask >> i & 1 == 0 {
                            a
                        } else {
                            b
                        }
                    })
                    .collect();
                if pick.contains(&root) {
                    continue;
                }
                let one_side = chosen.iter().all(|e| g.edge(*e).crosses(&pick));
                if !one_side {
                    continue;
                }
                if pick.len() >= 2 {
                    sources.insert(pick);
                } else if let Some(&p) = pick.iter().next() {
                    for &x in vertices.iter().filter(|&&x| x != p) {
                        sources.insert([p, x].into());
                    }
                } else {
                    for (i, &a) in vertices.iter().enumerate() {
                        for &b in &vertices[i + 1..] {
                            sources.insert([a, b].into());
                        }
                    }
                }
            }
        };
        consider(&[]);
        for (i, &a) in frac.iter().enumerate() {
            consider(&[a]);
            for (j, &b) in frac.iter().enumerate().skip(i + 1) {
                consider(&[a, b]);
                for &c in frac.iter().skip(j + 1) {
                    consider(&[a, b, c]);
                }
            }
        }

        let mut family: BTreeSet<(usize, VertexSet)> = BTreeSet::new();
        for z in &sources {
            let mut sinks: VertexSet = endpoints.difference(z).copied().collect();
            sinks.insert(root);
            let cut = g.max_flow_min_cut(&load, z, &sinks)?;
            family.insert((cut.set.len(), cut.set));
        }
        let members: Vec<&VertexSet> = family.iter().map(|(_, s)| s).collect();
        for s in &members {
            let minimal = members
                .iter()
                .all(|t| t == s || !(t.is_subset(s) && t.len() < s.len()));
            if minimal && g.boundary_weight(&load, s) == k && frac_on(s) <= 3 {
                return Ok(Some((*s).clone()));
            }
        }
        Ok(None)
    }

    /// Exhaustive check that no strict subset of `s` has a y-tight row.
    fn check_minimality(&self, s: &VertexSet) -> Result<(), RoundingError> {
        let load = self.load();
        let k = int(self.k);
        let items: Vec<VertexId> = s.iter().copied().collect();
        for mask in 1u32..(1u32 << items.len()) - 1 {
            let t: VertexSet = items
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, v)| *v)
                .collect();
            if self.view().has_row(&t) && self.graph.boundary_weight(&load, &t) == k {
                return Err(violated(
                    Check::RelaxationMinimality,
                    format!("{t:?} is a tight strict subset of {s:?}"),
                ));
            }
        }
        Ok(())
    }

    /// Drop/contract: fixes internal edge values into the output, drops the
    /// row of `s`, and contracts `s` when it has two or more vertices.
    pub fn apply_relaxation(&mut self, s: &VertexSet) -> Result<(), RoundingError> {
        let internal = self.graph.internal_edges(s);
        let mut fixed = Vec::with_capacity(internal.len());
        for e in &internal {
            let Some(v) = to_u64(&self.y[e.0]) else {
                return Err(violated(
                    Check::IntegralInContractedSet,
                    format!(
                        "internal edge {e} has y = {}",
                        format_rational(&self.y[e.0])
                    ),
                ));
            };
            fixed.push((self.graph.edge(*e).original, v));
        }
        self.pool.remove(s);
        let members: Vec<usize> = {
            let mut m: Vec<usize> = s
                .iter()
                .flat_map(|v| self.graph.members(*v).iter().copied())
                .collect();
            m.sort_unstable();
            m
        };
        self.trace.relaxations += 1;
        self.trace.events.push(TraceEvent::Relax {
            set: s.iter().map(|v| v.0).collect(),
            members: members.clone(),
        });
        if s.len() == 1 {
            self.relaxed.extend(s.iter().copied());
            return Ok(());
        }
        for (orig, v) in &fixed {
            self.partial_z[orig.0] = Some(*v);
        }
        let boundary = self
            .graph
            .boundary(s)
            .iter()
            .map(|e| self.graph.edge(*e).original)
            .collect();
        let contraction = self.graph.contract(s)?;
        self.pool
            .contract(&contraction.absorbed, contraction.merged);
        self.relaxed.retain(|v| !contraction.absorbed.contains(v));
        self.relaxed.insert(contraction.merged);
        self.family.records.push(ContractionRecord {
            set: members,
            internal: fixed,
            boundary,
        });
        self.trace.contractions += 1;
        self.trace.events.push(TraceEvent::Contract {
            set: s.iter().map(|v| v.0).collect(),
            merged: contraction.merged.0,
        });
        Ok(())
    }

    /// Deletes edges with `y + g = 0` and freezes every integral edge.
    pub fn freeze_and_delete(&mut self) -> Result<(), RoundingError> {
        self.delete_where(|st, e| st.y[e.0].is_zero() && st.ghost[e.0] == 0)?;
        self.freeze_integral();
        Ok(())
    }

    fn delete_where(&mut self, pred: impl Fn(&Self, EdgeId) -> bool) -> Result<(), RoundingError> {
        let doomed: Vec<EdgeId> = self
            .graph
            .edges()
            .map(|e| e.id)
            .filter(|&e| pred(self, e))
            .collect();
        for &e in &doomed {
            self.graph.delete_edge(e)?;
            self.deleted[self.graph.edge(e).original.0] = true;
        }
        if !doomed.is_empty() {
            self.trace.events.push(TraceEvent::Delete {
                edges: doomed.iter().map(|e| e.0).collect(),
            });
        }
        Ok(())
    }

    fn freeze_integral(&mut self) {
        let newly: Vec<EdgeId> = self
            .graph
            .edges()
            .map(|e| e.id)
            .filter(|e| self.frozen[e.0].is_none() && is_integral(&self.y[e.0]))
            .collect();
        for &e in &newly {
            let v = to_u64(&self.y[e.0]).expect("LP values are nonnegative");
            self.frozen[e.0] = Some(v);
            self.lower[e.0] = self.y[e.0].clone();
            self.upper[e.0] = self.y[e.0].clone();
        }
        if !newly.is_empty() {
            self.trace.events.push(TraceEvent::Freeze {
                edges: newly.iter().map(|e| e.0).collect(),
            });
        }
    }

    /// Per-iteration structural checks.
    pub fn check_iteration_invariants(&self) -> Result<(), RoundingError> {
        for (pair, edges) in self.classes() {
            let fractional = edges.iter().filter(|e| !is_integral(&self.y[e.0])).count();
            if fractional > 1 {
                return Err(violated(
                    Check::AtMostOneFracPerClass,
                    format!("class {pair:?} has {fractional} fractional edges"),
                ));
            }
        }
        if self.graph.vertex_count() < 2 {
            return Ok(());
        }
        let load = self.load();
        let floor_k = int(self.k - 2);
        let cut = self.graph.global_min_cut(&load)?;
        if cut.value < floor_k {
            return Err(violated(
                Check::YPlusGHigh,
                format!(
                    "(y+g)(δ({:?})) = {} < k - 2",
                    cut.set,
                    format_rational(&cut.value)
                ),
            ));
        }
        if self.exhaustive {
            let mut bad = None;
            for_each_root_free_set(
                &self.graph,
                |s, value| {
                    if bad.is_none() && value == &floor_k {
                        let all_integral = self
                            .graph
                            .boundary(s)
                            .iter()
                            .all(|e| is_integral(&self.y[e.0]));
                        if !all_integral {
                            bad = Some(s.clone());
                        }
                    }
                },
                &load,
            )?;
            if let Some(s) = bad {
                return Err(violated(
                    Check::YPlusGHigh,
                    format!("cut {s:?} at k - 2 has a fractional boundary edge"),
                ));
            }
        }
        Ok(())
    }

    /// `z` over original edges: values fixed at contraction, final values of
    /// live edges, and zero for deleted edges.
    pub fn assemble_solution(&self) -> Result<RoundedSolution, RoundingError> {
        let m = self.partial_z.len();
        let mut z = vec![None; m];
        for (i, v) in self.partial_z.iter().enumerate() {
            z[i] = *v;
        }
        for e in self.graph.edges() {
            let orig = e.original.0;
            let Some(v) = to_u64(&self.y[e.id.0]) else {
                return Err(violated(
                    Check::IntegrallyRounded,
                    format!("live edge {} is fractional", e.id),
                ));
            };
            if z[orig].replace(v).is_some() {
                return Err(violated(
                    Check::IntegrallyRounded,
                    format!("edge {orig} assigned twice"),
                ));
            }
        }
        for (i, d) in self.deleted.iter().enumerate() {
            if *d && z[i].replace(0).is_some() {
                return Err(violated(
                    Check::IntegrallyRounded,
                    format!("deleted edge {i} also has a value"),
                ));
            }
        }
        let z: Vec<u64> = z
            .into_iter()
            .enumerate()
            .map(|(i, v)| {
                v.ok_or_else(|| {
                    violated(
                        Check::IntegrallyRounded,
                        format!("edge {i} never received a value"),
                    )
                })
            })
            .collect::<Result<_, _>>()?;
        let cost = z
            .iter()
            .zip(&self.cost)
            .fold(Rational::zero(), |acc, (v, c)| acc + c * int(*v as i64));
        Ok(RoundedSolution { z, cost })
    }
}

/// Rounds `y0` (indexed by edge slot of `graph`) for connectivity target `k`.
pub fn round(
    graph: &MultiGraph,
    cost: &[Rational],
    y0: &[Rational],
    k: i64,
    options: &RoundingOptions,
) -> Result<RoundOutcome, RoundingError> {
    if k < 1 {
        return Err(RoundingError::InvalidK(k));
    }
    let m = graph.edge_slots();
    for len in [cost.len(), y0.len()] {
        if len != m {
            return Err(RoundingError::InputLength {
                expected: m,
                actual: len,
            });
        }
    }
    if let Some(e) = graph.edges().find(|e| y0[e.id.0].is_negative()) {
        return Err(RoundingError::NegativeInput(e.id));
    }
    let n = graph.vertex_count();
    let k_internal = if k % 2 == 1 { k - 1 } else { k };
    let exhaustive = options.exhaustive.unwrap_or(n <= EXHAUSTIVE_AUDIT_VERTICES);
    if n < 2 {
        let mut state = GhostState::new(graph.clone(), cost.to_vec(), y0, k_internal, exhaustive);
        state.trace.k_input = k;
        let solution = RoundedSolution {
            z: vec![0; m],
            cost: Rational::zero(),
        };
        return Ok(RoundOutcome {
            solution,
            trace: state.trace,
            family: state.family,
        });
    }
    let min_cut = graph.global_min_cut(y0)?;
    if min_cut.value < int(k) {
        return Err(RoundingError::InfeasibleInput {
            min_cut: format_rational(&min_cut.value),
            k,
        });
    }

    let mut state = GhostState::new(graph.clone(), cost.to_vec(), y0, k_internal, exhaustive);
    state.trace.k_input = k;
    let input_cost = y0
        .iter()
        .zip(cost)
        .fold(Rational::zero(), |acc, (y, c)| acc + y * c);

    state.solve()?;
    if state.objective > input_cost {
        return Err(violated(
            Check::CostMonotone,
            "initial LP optimum exceeds c·y0",
        ));
    }
    state.delete_where(|st, e| st.y[e.0].is_zero())?;
    state.freeze_integral();

    let limit = ITERATION_FACTOR * n;
    while !state.is_integral() {
        state.iterations += 1;
        state.trace.iterations = state.iterations;
        if state.iterations > limit {
            return Err(violated(
                Check::IterationBound,
                format!("more than {limit} iterations"),
            ));
        }
        state.check_iteration_invariants()?;
        if let Some(aug) = state.find_ghost_augmentation() {
            state.apply_augmentation(&aug)?;
        } else if let Some(s) = state.find_relaxable_cut()? {
            if state.exhaustive {
                state.check_minimality(&s)?;
            }
            state.apply_relaxation(&s)?;
        } else {
            return Err(violated(
                Check::Progress,
                "fractional iterate with neither a ghost augmentation nor a relaxable cut",
            ));
        }
        let before = state.objective.clone();
        state.solve()?;
        if state.objective > before {
            return Err(violated(
                Check::CostMonotone,
                format!(
                    "LP optimum rose from {} to {}",
                    format_rational(&before),
                    format_rational(&state.objective)
                ),
            ));
        }
        state.freeze_and_delete()?;
    }

    let solution = state.assemble_solution()?;
    check_final(graph, y0, &input_cost, &state, &solution)?;
    Ok(RoundOutcome {
        solution,
        trace: state.trace,
        family: state.family,
    })
}

/// End-of-run guarantees, checked against the input graph.
fn check_final(
    graph: &MultiGraph,
    y0: &[Rational],
    input_cost: &Rational,
    state: &GhostState,
    solution: &RoundedSolution,
) -> Result<(), RoundingError> {
    if &solution.cost > input_cost {
        return Err(violated(Check::CostPreserved, "c·z exceeds c·y0"));
    }
    for e in graph.edges() {
        let z = int(solution.z[e.original.0] as i64);
        let y = &y0[e.id.0];
        if z != y.floor() && z != y.ceil() {
            return Err(violated(
                Check::IntegrallyRounded,
                format!("edge {} rounded outside floor/ceil", e.id),
            ));
        }
    }
    if !state.family.is_laminar() {
        return Err(violated(Check::LaminarFamily, "contracted sets cross"));
    }
    let z: Vec<Rational> = solution.z.iter().map(|v| int(*v as i64)).collect();
    for rec in &state.family.records {
        let members: VertexSet = rec.set.iter().map(|&i| VertexId(i)).collect();
        let value = graph.boundary_weight(&z, &members);
        if value > int(state.k + 2) {
            return Err(violated(
                Check::ZUpperBound,
                format!("z(δ({:?})) = {} > k + 2", rec.set, format_rational(&value)),
            ));
        }
    }
    let cut = graph.global_min_cut(&z)?;
    if cut.value < int(state.k - 9) {
        return Err(violated(
            Check::CutLowerBound,
            format!(
                "z(δ({:?})) = {} < k - 9",
                cut.set,
                format_rational(&cut.value)
            ),
        ));
    }
    Ok(())
}
