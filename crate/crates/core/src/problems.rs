//! Problem-level solvers on top of the rounding engine: k-ECSS, k-ECSM and
//! subset k-ECSM, plus exact LP values for ratio reporting and a solution
//! verifier.
//!
//! All three solvers feed an optimal vertex of the `(k+10)` LP to
//! [`round`](crate::ghost_rounding::round) with target `k + 10`; the rounded
//! vector loses at most `9 + [k odd]` units of connectivity, so it is
//! `k`-edge-connected and no more expensive than the `(k+10)` LP optimum.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cut_oracle::{row_limit, solve_by_row_generation, CutLpData, OracleError, RowPool};
use crate::ghost_rounding::{round, RoundingError, RoundingOptions, RunTrace};
use crate::multigraph::{
    for_each_root_free_set, EdgeId, GraphError, MultiGraph, VertexId, VertexSet,
};
use crate::rational::{format_rational, frac, int, is_integral, Rational};

/// Extra connectivity the solvers ask of the LP before rounding.
pub const SLACK: i64 = 10;

/// Exhaustive cut enumeration is used up to this many vertices.
pub const EXHAUSTIVE_VERIFY_VERTICES: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Ecss,
    Ecsm,
    Subset,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Ecss => "ecss",
            Mode::Ecsm => "ecsm",
            Mode::Subset => "subset",
        })
    }
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "ecss" => Ok(Mode::Ecss),
            "ecsm" => Ok(Mode::Ecsm),
            "subset" => Ok(Mode::Subset),
            other => Err(format!("unknown mode `{other}`")),
        }
    }
}

/// A problem instance. `terminals` is only meaningful for [`Mode::Subset`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Instance {
    pub mode: Mode,
    pub k: i64,
    pub graph: MultiGraph,
    pub cost: Vec<Rational>,
    pub terminals: Vec<VertexId>,
}

impl Instance {
    pub fn new(mode: Mode, k: i64, graph: MultiGraph, cost: Vec<Rational>) -> Self {
        Self {
            mode,
            k,
            graph,
            cost,
            terminals: Vec::new(),
        }
    }

    pub fn with_terminals(mut self, terminals: Vec<VertexId>) -> Self {
        self.terminals = terminals;
        self
    }

    /// Terminals for subset mode; every vertex otherwise.
    pub fn required_vertices(&self) -> Vec<VertexId> {
        match self.mode {
            Mode::Subset => self.terminals.clone(),
            _ => self.graph.vertices().collect(),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ProblemError {
    #[error("k must be at least 1, got {0}")]
    InvalidK(i64),
    #[error("cost vector has {actual} entries, graph has {expected} edges")]
    CostLength { expected: usize, actual: usize },
    #[error("edge {0} has negative cost")]
    NegativeCost(usize),
    #[error("infeasible: {0}")]
    Infeasible(String),
    #[error("invalid terminal set: {0}")]
    InvalidTerminals(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Rounding(#[from] RoundingError),
}

impl ProblemError {
    /// True when the failure is a broken internal guarantee rather than bad input.
    pub fn is_invariant_violation(&self) -> bool {
        match self {
            ProblemError::Rounding(RoundingError::Invariant { .. }) => true,
            ProblemError::Rounding(RoundingError::Oracle(e)) | ProblemError::Oracle(e) => {
                !matches!(e, OracleError::Infeasible)
            }
            _ => false,
        }
    }

    pub fn is_infeasible(&self) -> bool {
        matches!(
            self,
            ProblemError::Infeasible(_)
                | ProblemError::InvalidTerminals(_)
                | ProblemError::Rounding(RoundingError::InfeasibleInput { .. })
                | ProblemError::Oracle(OracleError::Infeasible)
        )
    }
}

/// LP flavour: `x ∈ [0,1]` for ECSS, `x ≥ 0` for ECSM.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LpMode {
    Ecss,
    Ecsm,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LpValue {
    pub value: Rational,
    /// Optimal vertex, indexed by edge slot.
    pub y: Vec<Rational>,
    pub rows: usize,
}

fn check_common(graph: &MultiGraph, cost: &[Rational], k: i64) -> Result<(), ProblemError> {
    if k < 1 {
        return Err(ProblemError::InvalidK(k));
    }
    if cost.len() != graph.edge_slots() {
        return Err(ProblemError::CostLength {
            expected: graph.edge_slots(),
            actual: cost.len(),
        });
    }
    if let Some(i) = cost.iter().position(|c| c.is_negative()) {
        return Err(ProblemError::NegativeCost(i));
    }
    Ok(())
}

fn unit_min_cut(graph: &MultiGraph) -> Result<Rational, ProblemError> {
    if graph.vertex_count() < 2 {
        return Ok(int(i64::MAX));
    }
    let unit = vec![Rational::one(); graph.edge_slots()];
    Ok(graph.global_min_cut(&unit)?.value)
}

/// Exact optimum and an optimal vertex of the cut LP with all rows
/// `x(δ(S)) ≥ k`. ECSM variables are capped at `k`, which never binds at an
/// optimum: lowering an entry above `k` to `k` keeps every cut through it at `k`.
pub fn lp_opt(
    graph: &MultiGraph,
    cost: &[Rational],
    k: i64,
    mode: LpMode,
) -> Result<LpValue, ProblemError> {
    check_common(graph, cost, k)?;
    let m = graph.edge_slots();
    if graph.vertex_count() < 2 {
        return Ok(LpValue {
            value: Rational::zero(),
            y: vec![Rational::zero(); m],
            rows: 0,
        });
    }
    let connectivity = unit_min_cut(graph)?;
    let (cap, needed) = match mode {
        LpMode::Ecss => (Rational::one(), int(k)),
        LpMode::Ecsm => (int(k), Rational::one()),
    };
    if connectivity < needed {
        return Err(ProblemError::Infeasible(format!(
            "graph is only {}-edge-connected, the {}-{} LP needs {}",
            format_rational(&connectivity),
            k,
            if mode == LpMode::Ecss { "ECSS" } else { "ECSM" },
            format_rational(&needed)
        )));
    }
    let lower = vec![Rational::zero(); m];
    let upper = vec![Some(cap); m];
    let target = int(k);
    let mut pool = RowPool::new();
    let mut separate = |y: &[Rational]| -> Result<Option<VertexSet>, OracleError> {
        let cut = graph.global_min_cut(y)?;
        Ok((cut.value < target).then_some(cut.set))
    };
    let sol = solve_by_row_generation(
        CutLpData {
            graph,
            cost,
            lower: &lower,
            upper: &upper,
        },
        &mut pool,
        &[],
        &|_| int(k),
        &mut separate,
        row_limit(graph),
    )?;
    Ok(LpValue {
        value: sol.objective,
        y: sol.y,
        rows: pool.len(),
    })
}

/// Rational bound `(1 + 10/k)·value`.
pub fn scaled_bound(value: &Rational, k: i64) -> Rational {
    value * (Rational::one() + frac(SLACK, k))
}

/// Result of a solver run, serialized as the solution/report JSON.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolveReport {
    pub mode: Mode,
    pub k: i64,
    pub n: usize,
    pub m: usize,
    /// Multiplicity per input edge, in input order.
    pub z: Vec<u64>,
    #[serde(with = "crate::rational::serde_text")]
    pub cost: Rational,
    /// LP vertex that was rounded; indexed like `z` (absent for subset mode,
    /// where rounding runs on the terminal closure graph).
    #[serde(default, with = "crate::rational::serde_text::vec::option")]
    pub y0: Option<Vec<Rational>>,
    #[serde(with = "crate::rational::serde_text::option")]
    pub lp_k: Option<Rational>,
    #[serde(with = "crate::rational::serde_text")]
    pub lp_k_plus_10: Rational,
    /// Cost bound the run is guaranteed to meet.
    #[serde(with = "crate::rational::serde_text")]
    pub guarantee: Rational,
    /// `cost / lp_k`, absent when `lp_k` is absent or zero.
    #[serde(with = "crate::rational::serde_text::option")]
    pub ratio: Option<Rational>,
    /// Connectivity of `z` between required vertices.
    pub min_cut: u64,
    pub iterations: usize,
    pub augmentations: usize,
    pub relaxations: usize,
    pub contractions: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subset: Option<SubsetDetail>,
}

/// The closure-graph side of a subset run.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubsetDetail {
    pub terminals: Vec<usize>,
    /// Terminal pairs `(i, j)` of the closure graph, in edge order.
    pub pairs: Vec<(usize, usize)>,
    pub pair_z: Vec<u64>,
    #[serde(with = "crate::rational::serde_text::vec")]
    pub pair_y0: Vec<Rational>,
}

#[derive(Clone, Debug)]
pub struct SolveOutcome {
    pub report: SolveReport,
    pub trace: RunTrace,
}

fn z_cost(z: &[u64], cost: &[Rational]) -> Rational {
    z.iter()
        .zip(cost)
        .fold(Rational::zero(), |acc, (v, c)| acc + c * int(*v as i64))
}

fn integral_min_cut(graph: &MultiGraph, z: &[u64]) -> Result<u64, ProblemError> {
    if graph.vertex_count() < 2 {
        return Ok(0);
    }
    let w: Vec<Rational> = z.iter().map(|v| int(*v as i64)).collect();
    let cut = graph.global_min_cut(&w)?;
    Ok(crate::rational::to_u64(&cut.value).expect("integral weights"))
}

fn finish(
    mode: Mode,
    graph: &MultiGraph,
    cost: &[Rational],
    k: i64,
    lp_top: LpValue,
    lp_k: Option<Rational>,
    options: &RoundingOptions,
) -> Result<SolveOutcome, ProblemError> {
    let top = k + SLACK;
    let out = round(graph, cost, &lp_top.y, top, options)?;
    let z = out.solution.z;
    let cost_z = z_cost(&z, cost);
    let min_cut = integral_min_cut(graph, &z)?;
    let guarantee = match mode {
        Mode::Ecss => lp_top.value.clone(),
        _ => scaled_bound(lp_k.as_ref().expect("ECSM reports the k LP"), k),
    };
    let ratio = lp_k.as_ref().filter(|v| !v.is_zero()).map(|v| &cost_z / v);
    Ok(SolveOutcome {
        report: SolveReport {
            mode,
            k,
            n: graph.original_vertex_count(),
            m: graph.edge_slots(),
            z,
            cost: cost_z,
            y0: Some(lp_top.y),
            lp_k,
            lp_k_plus_10: lp_top.value,
            guarantee,
            ratio,
            min_cut,
            iterations: out.trace.iterations,
            augmentations: out.trace.augmentations,
            relaxations: out.trace.relaxations,
            contractions: out.trace.contractions,
            subset: None,
        },
        trace: out.trace,
    })
}

/// k-ECSS: rounds a vertex of the `(k+10)`-ECSS LP. The input must be
/// `(k+10)`-edge-connected so that LP exists.
pub fn solve_kecss(
    graph: &MultiGraph,
    cost: &[Rational],
    k: i64,
    options: &RoundingOptions,
) -> Result<SolveOutcome, ProblemError> {
    check_common(graph, cost, k)?;
    let lp_top = lp_opt(graph, cost, k + SLACK, LpMode::Ecss)?;
    let lp_k = lp_opt(graph, cost, k, LpMode::Ecss)?.value;
    finish(Mode::Ecss, graph, cost, k, lp_top, Some(lp_k), options)
}

/// k-ECSM: rounds a vertex of the `(k+10)`-ECSM LP. Needs a connected input.
pub fn solve_kecsm(
    graph: &MultiGraph,
    cost: &[Rational],
    k: i64,
    options: &RoundingOptions,
) -> Result<SolveOutcome, ProblemError> {
    check_common(graph, cost, k)?;
    let lp_top = lp_opt(graph, cost, k + SLACK, LpMode::Ecsm)?;
    let lp_k = lp_opt(graph, cost, k, LpMode::Ecsm)?.value;
    finish(Mode::Ecsm, graph, cost, k, lp_top, Some(lp_k), options)
}

/// Shortest-path distances between all vertex pairs with path recovery.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MetricClosure {
    n: usize,
    dist: Vec<Option<Rational>>,
    /// First edge and next vertex on a shortest path from `u` to `v`.
    next: Vec<Option<(EdgeId, usize)>>,
}

impl MetricClosure {
    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn dist(&self, u: usize, v: usize) -> Option<&Rational> {
        self.dist[u * self.n + v].as_ref()
    }

    /// Edges of a shortest `u`–`v` path, from `u`. `None` when disconnected.
    pub fn path(&self, u: usize, v: usize) -> Option<Vec<EdgeId>> {
        self.dist(u, v)?;
        let mut edges = Vec::new();
        let mut at = u;
        while at != v {
            let (e, nxt) = self.next[at * self.n + v]?;
            edges.push(e);
            at = nxt;
        }
        Some(edges)
    }
}

/// Floyd–Warshall over the input vertices; parallel edges keep the cheapest
/// (lowest id on ties). The graph must be uncontracted.
pub fn metric_closure(
    graph: &MultiGraph,
    cost: &[Rational],
) -> Result<MetricClosure, ProblemError> {
    if cost.len() != graph.edge_slots() {
        return Err(ProblemError::CostLength {
            expected: graph.edge_slots(),
            actual: cost.len(),
        });
    }
    let n = graph.original_vertex_count();
    let mut dist: Vec<Option<Rational>> = vec![None; n * n];
    let mut next: Vec<Option<(EdgeId, usize)>> = vec![None; n * n];
    for v in 0..n {
        dist[v * n + v] = Some(Rational::zero());
    }
    for e in graph.edges() {
        let (a, b) = (e.ends.0 .0, e.ends.1 .0);
        let c = &cost[e.id.0];
        for (x, y) in [(a, b), (b, a)] {
            if dist[x * n + y].as_ref().is_none_or(|d| c < d) {
                dist[x * n + y] = Some(c.clone());
                next[x * n + y] = Some((e.id, y));
            }
        }
    }
    for m in 0..n {
        for i in 0..n {
            let Some(dim) = dist[i * n + m].clone() else {
                continue;
            };
            for j in 0..n {
                let Some(dmj) = &dist[m * n + j] else {
                    continue;
                };
                let through = &dim + dmj;
                if dist[i * n + j].as_ref().is_none_or(|d| &through < d) {
                    dist[i * n + j] = Some(through);
                    next[i * n + j] = next[i * n + m];
                }
            }
        }
    }
    Ok(MetricClosure { n, dist, next })
}

fn check_terminals(
    graph: &MultiGraph,
    terminals: &[VertexId],
) -> Result<Vec<VertexId>, ProblemError> {
    let set: BTreeSet<VertexId> = terminals.iter().copied().collect();
    if set.len() != terminals.len() {
        return Err(ProblemError::InvalidTerminals("duplicate terminal".into()));
    }
    if set.len() < 2 {
        return Err(ProblemError::InvalidTerminals(
            "need at least two terminals".into(),
        ));
    }
    if let Some(t) = set.iter().find(|t| !graph.contains_vertex(**t)) {
        return Err(ProblemError::InvalidTerminals(format!(
            "unknown vertex {t}"
        )));
    }
    Ok(set.into_iter().collect())
}

/// Exact value of the subset cut LP: `x(δ(S)) ≥ k` for every `S` separating
/// two terminals, `x ≥ 0`.
pub fn subset_lp_value(
    graph: &MultiGraph,
    cost: &[Rational],
    k: i64,
    terminals: &[VertexId],
) -> Result<LpValue, ProblemError> {
    check_common(graph, cost, k)?;
    let terminals = check_terminals(graph, terminals)?;
    let unit = vec![Rational::one(); graph.edge_slots()];
    if terminal_min_cut(graph, &unit, &terminals)?.is_zero() {
        return Err(ProblemError::InvalidTerminals(
            "terminals span several components".into(),
        ));
    }
    let m = graph.edge_slots();
    let lower = vec![Rational::zero(); m];
    let upper = vec![Some(int(k)); m];
    let target = int(k);
    let mut pool = RowPool::new();
    let mut separate = |y: &[Rational]| -> Result<Option<VertexSet>, OracleError> {
        let sink: VertexSet = [terminals[0]].into();
        let mut best: Option<(Rational, VertexSet)> = None;
        for t in &terminals[1..] {
            let cut = graph.max_flow_min_cut(y, &[*t].into(), &sink)?;
            if cut.value < target && best.as_ref().is_none_or(|(v, _)| cut.value < *v) {
                best = Some((cut.value, cut.set));
            }
        }
        Ok(best.map(|(_, s)| s))
    };
    let sol = solve_by_row_generation(
        CutLpData {
            graph,
            cost,
            lower: &lower,
            upper: &upper,
        },
        &mut pool,
        &[],
        &|_| int(k),
        &mut separate,
        row_limit(graph),
    )?;
    Ok(LpValue {
        value: sol.objective,
        y: sol.y,
        rows: pool.len(),
    })
}

/// Minimum weight of a cut separating two terminals.
pub fn terminal_min_cut(
    graph: &MultiGraph,
    w: &[Rational],
    terminals: &[VertexId],
) -> Result<Rational, ProblemError> {
    let sink: VertexSet = [terminals[0]].into();
    let mut best: Option<Rational> = None;
    for t in &terminals[1..] {
        let cut = graph.max_flow_min_cut(w, &[*t].into(), &sink)?;
        if best.as_ref().is_none_or(|b| cut.value < *b) {
            best = Some(cut.value);
        }
    }
    Ok(best.unwrap_or_else(Rational::zero))
}

/// Subset k-ECSM: solves k-ECSM on the terminals with shortest-path costs
/// and maps every selected terminal pair back to its shortest path in `graph`.
pub fn solve_subset_kecsm(
    graph: &MultiGraph,
    cost: &[Rational],
    k: i64,
    terminals: &[VertexId],
    options: &RoundingOptions,
) -> Result<SolveOutcome, ProblemError> {
    check_common(graph, cost, k)?;
    let terminals = check_terminals(graph, terminals)?;
    let closure = metric_closure(graph, cost)?;
    let root = terminals
        .iter()
        .position(|t| *t == graph.root())
        .unwrap_or(0);
    let mut h = MultiGraph::new(terminals.len(), VertexId(root))?;
    let mut pairs = Vec::new();
    let mut h_cost = Vec::new();
    for i in 0..terminals.len() {
        for j in i + 1..terminals.len() {
            let d = closure
                .dist(terminals[i].0, terminals[j].0)
                .ok_or_else(|| {
                    ProblemError::InvalidTerminals(format!(
                        "{} and {} are disconnected",
                        terminals[i], terminals[j]
                    ))
                })?;
            h.add_edge(VertexId(i), VertexId(j))?;
            pairs.push((i, j));
            h_cost.push(d.clone());
        }
    }
    let inner = solve_kecsm(&h, &h_cost, k, options)?;
    let lp_k = subset_lp_value(graph, cost, k, &terminals)?.value;

    let mut z = vec![0u64; graph.edge_slots()];
    for (&(i, j), &mult) in pairs.iter().zip(&inner.report.z) {
        if mult == 0 {
            continue;
        }
        let path = closure
            .path(terminals[i].0, terminals[j].0)
            .expect("distance exists so a path exists");
        for e in path {
            z[e.0] += mult;
        }
    }
    let cost_z = z_cost(&z, cost);
    let w: Vec<Rational> = z.iter().map(|v| int(*v as i64)).collect();
    let min_cut = crate::rational::to_u64(&terminal_min_cut(graph, &w, &terminals)?)
        .expect("integral weights");
    let guarantee = scaled_bound(&lp_k, k);
    let ratio = (!lp_k.is_zero()).then(|| &cost_z / &lp_k);
    let inner_report = inner.report;
    Ok(SolveOutcome {
        report: SolveReport {
            mode: Mode::Subset,
            k,
            n: graph.original_vertex_count(),
            m: graph.edge_slots(),
            z,
            cost: cost_z,
            y0: None,
            lp_k: Some(lp_k),
            lp_k_plus_10: inner_report.lp_k_plus_10,
            guarantee,
            ratio,
            min_cut,
            iterations: inner_report.iterations,
            augmentations: inner_report.augmentations,
            relaxations: inner_report.relaxations,
            contractions: inner_report.contractions,
            subset: Some(SubsetDetail {
                terminals: terminals.iter().map(|t| t.0).collect(),
                pairs,
                pair_z: inner_report.z,
                pair_y0: inner_report.y0.unwrap_or_default(),
            }),
        },
        trace: inner.trace,
    })
}

/// Runs the solver matching `instance.mode`.
pub fn solve(instance: &Instance, options: &RoundingOptions) -> Result<SolveOutcome, ProblemError> {
    match instance.mode {
        Mode::Ecss => solve_kecss(&instance.graph, &instance.cost, instance.k, options),
        Mode::Ecsm => solve_kecsm(&instance.graph, &instance.cost, instance.k, options),
        Mode::Subset => solve_subset_kecsm(
            &instance.graph,
            &instance.cost,
            instance.k,
            &instance.terminals,
            options,
        ),
    }
}

/// Exact LP value at `k` for the instance's mode.
pub fn instance_lp_value(instance: &Instance, k: i64) -> Result<Rational, ProblemError> {
    Ok(match instance.mode {
        Mode::Ecss => lp_opt(&instance.graph, &instance.cost, k, LpMode::Ecss)?.value,
        Mode::Ecsm => lp_opt(&instance.graph, &instance.cost, k, LpMode::Ecsm)?.value,
        Mode::Subset => {
            subset_lp_value(&instance.graph, &instance.cost, k, &instance.terminals)?.value
        }
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VerifyDepth {
    /// Minimum cuts by max flow.
    #[default]
    Fast,
    /// Enumerate every cut when the graph has at most 16 vertices.
    Exhaustive,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub mode: Mode,
    pub k: i64,
    #[serde(with = "crate::rational::serde_text")]
    pub cost: Rational,
    #[serde(with = "crate::rational::serde_text")]
    pub min_cut: Rational,
    /// Vertex set of a minimum cut (its side without the root or first terminal).
    pub min_cut_set: Vec<usize>,
    pub exhaustive: bool,
    pub checks: Vec<CheckResult>,
    pub passed: bool,
}

/// What a solution claims about itself, checked by [`verify_solution`].
#[derive(Clone, Debug, Default)]
pub struct Claims<'a> {
    pub cost: Option<&'a Rational>,
    pub y0: Option<&'a [Rational]>,
    pub cost_bound: Option<&'a Rational>,
}

/// Recomputes feasibility, cost and rounding membership of `z` from scratch.
pub fn verify_solution(
    instance: &Instance,
    z: &[u64],
    claims: &Claims<'_>,
    depth: VerifyDepth,
) -> Result<VerificationReport, ProblemError> {
    let g = &instance.graph;
    let k = instance.k;
    let mut checks = Vec::new();
    let mut push = |name: &str, passed: bool, detail: String| {
        checks.push(CheckResult {
            name: name.to_string(),
            passed,
            detail,
        })
    };
    if z.len() != g.edge_slots() {
        push(
            "length",
            false,
            format!("{} values for {} edges", z.len(), g.edge_slots()),
        );
        return Ok(VerificationReport {
            mode: instance.mode,
            k,
            cost: Rational::zero(),
            min_cut: Rational::zero(),
            min_cut_set: Vec::new(),
            exhaustive: false,
            passed: false,
            checks,
        });
    }
    let cost = z_cost(z, &instance.cost);
    let w: Vec<Rational> = z.iter().map(|v| int(*v as i64)).collect();
    let required = instance.required_vertices();
    let required_set: VertexSet = required.iter().copied().collect();
    let exhaustive =
        depth == VerifyDepth::Exhaustive && g.vertex_count() <= EXHAUSTIVE_VERIFY_VERTICES;

    let (min_cut, min_set) = if g.vertex_count() < 2 || required.len() < 2 {
        (int(k), VertexSet::new())
    } else if exhaustive {
        let mut best: Option<(Rational, VertexSet)> = None;
        for_each_root_free_set(
            g,
            |s, value| {
                let separates = s.iter().any(|v| required_set.contains(v))
                    && required_set.iter().any(|v| !s.contains(v));
                if separates && best.as_ref().is_none_or(|(b, _)| value < b) {
                    best = Some((value.clone(), s.clone()));
                }
            },
            &w,
        )?;
        best.unwrap_or_else(|| (int(k), VertexSet::new()))
    } else if instance.mode == Mode::Subset {
        let sink: VertexSet = [required[0]].into();
        let mut best: Option<(Rational, VertexSet)> = None;
        for t in &required[1..] {
            let cut = g.max_flow_min_cut(&w, &[*t].into(), &sink)?;
            if best.as_ref().is_none_or(|(b, _)| cut.value < *b) {
                best = Some((cut.value, cut.set));
            }
        }
        best.expect("at least two terminals")
    } else {
        let cut = g.global_min_cut(&w)?;
        (cut.value, cut.set)
    };
    push(
        "connectivity",
        min_cut >= int(k),
        format!("min cut {} against k = {k}", format_rational(&min_cut)),
    );
    if instance.mode == Mode::Ecss {
        let over: Vec<usize> = (0..z.len()).filter(|&i| z[i] > 1).collect();
        push(
            "ecss_simple",
            over.is_empty(),
            format!("edges used more than once: {over:?}"),
        );
    }
    if let Some(claimed) = claims.cost {
        push(
            "cost_matches",
            claimed == &cost,
            format!(
                "claimed {} recomputed {}",
                format_rational(claimed),
                format_rational(&cost)
            ),
        );
    }
    if let Some(bound) = claims.cost_bound {
        push(
            "cost_bound",
            &cost <= bound,
            format!(
                "cost {} bound {}",
                format_rational(&cost),
                format_rational(bound)
            ),
        );
    }
    if let Some(y0) = claims.y0 {
        let bad: Vec<usize> = if y0.len() != z.len() {
            (0..z.len()).collect()
        } else {
            (0..z.len())
                .filter(|&i| {
                    let v = int(z[i] as i64);
                    v != y0[i].floor() && v != y0[i].ceil()
                })
                .collect()
        };
        push(
            "integrally_rounded",
            bad.is_empty(),
            format!("edges outside floor/ceil: {bad:?}"),
        );
        let y_cost = y0
            .iter()
            .zip(&instance.cost)
            .fold(Rational::zero(), |acc, (y, c)| acc + y * c);
        push(
            "cost_preserved",
            cost <= y_cost,
            format!(
                "cost {} against c·y0 = {}",
                format_rational(&cost),
                format_rational(&y_cost)
            ),
        );
        if instance.mode != Mode::Subset {
            let top = k + SLACK;
            let lost = 9 + i64::from(top % 2 == 1);
            push(
                "highly_connected",
                min_cut >= int(top - lost),
                format!(
                    "min cut {} against {top} - {lost}",
                    format_rational(&min_cut)
                ),
            );
        }
    }
    let passed = checks.iter().all(|c| c.passed);
    Ok(VerificationReport {
        mode: instance.mode,
        k,
        cost,
        min_cut,
        min_cut_set: min_set.iter().map(|v| v.0).collect(),
        exhaustive,
        checks,
        passed,
    })
}

/// True when `x` is integral on every entry.
pub fn all_integral(x: &[Rational]) -> bool {
    x.iter().all(is_integral)
}
