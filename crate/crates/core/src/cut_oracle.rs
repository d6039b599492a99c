//! Separation by minimum cuts and the row-generation loop that produces an
//! optimal vertex of a cut LP without listing its exponentially many rows.
//!
//! The LP solved here has one variable per live edge and rows
//! `x(δ(S)) ≥ k − g(δ(S))` for every `S ⊆ V∖{r}` with `|S| ≥ 2`, plus the
//! singleton rows of vertices outside the relaxed set `W` (vertices created by
//! contracting a relaxed set). Violated rows are found with
//!
//! * a minimum `v`–`r` cut for each `v ∉ W ∪ {r}`, which covers every set
//!   containing such a `v`, and
//! * a minimum `Q`–`r` cut for each pair `Q ⊆ W`, which covers the remaining
//!   sets `S ⊆ W` with `|S| ≥ 2`,
//!
//! all under capacities `y + g`. A row is violated iff its cut value is below `k`.
//!
//! Note that the relaxed vertex set `W` here is unrelated to the endpoint sets
//! that the relaxable-cut search in [`crate::ghost_rounding`] also calls `W`.
//!
//! Only a subset of rows is ever materialized. A vertex of that relaxation
//! which is feasible for the full LP is a vertex of the full LP too: the full
//! feasible region sits inside the relaxed one, and a point that is extreme in
//! the larger set is extreme in every subset containing it.

use std::collections::BTreeSet;

use num_traits::Zero;
use thiserror::Error;

use crate::lp::{
    resolve_with_new_rows, solve_vertex, BasicSolution, LpError, LpOutcome, LpProblem, Row,
};
use crate::multigraph::{
    cut_order, CutWitness, EdgeId, GraphError, MultiGraph, VertexId, VertexSet,
};
use crate::rational::{int, Rational};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error(transparent)]
    Lp(#[from] LpError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("cut LP is infeasible")]
    Infeasible,
    #[error("cut LP is unbounded")]
    Unbounded,
    #[error("row generation exceeded {limit} rows")]
    RowLimit { limit: usize },
}

/// The persistent set of materialized cut rows, each identified by its vertex
/// set in the current graph.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RowPool {
    sets: Vec<VertexSet>,
}

impl RowPool {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    pub fn sets(&self) -> &[VertexSet] {
        &self.sets
    }

    pub fn contains(&self, s: &VertexSet) -> bool {
        self.sets.contains(s)
    }

    /// Returns false if the row was already present.
    pub fn insert(&mut self, s: VertexSet) -> bool {
        if self.contains(&s) {
            return false;
        }
        self.sets.push(s);
        true
    }

    pub fn remove(&mut self, s: &VertexSet) -> bool {
        let before = self.sets.len();
        self.sets.retain(|t| t != s);
        before != self.sets.len()
    }

    pub fn retain(&mut self, keep: impl FnMut(&VertexSet) -> bool) {
        self.sets.retain(keep);
    }

    /// Rewrites rows after `absorbed` was contracted into `merged`. Rows that
    /// contain the contracted set are remapped, rows disjoint from it are
    /// kept, and every other row no longer exists in the contracted graph.
    pub fn contract(&mut self, absorbed: &VertexSet, merged: VertexId) {
        let mut out = Vec::with_capacity(self.sets.len());
        for s in self.sets.drain(..) {
            if s.is_disjoint(absorbed) {
                out.push(s);
            } else if absorbed.is_subset(&s) && s.len() > absorbed.len() {
                let mut t: VertexSet = s.difference(absorbed).copied().collect();
                t.insert(merged);
                out.push(t);
            }
        }
        out.dedup();
        self.sets = out;
    }
}

/// The g-cut LP of one iteration: graph, connectivity target, ghost values,
/// per-edge bounds, and the relaxed singletons `W`. All edge-indexed slices
/// are indexed by `EdgeId` over every slot of the graph.
#[derive(Clone, Copy, Debug)]
pub struct GhostLpView<'a> {
    pub graph: &'a MultiGraph,
    pub k: i64,
    pub ghost: &'a [u32],
    pub lower: &'a [Rational],
    pub upper: &'a [Rational],
    pub relaxed: &'a VertexSet,
}

impl GhostLpView<'_> {
    pub fn ghost_on(&self, s: &VertexSet) -> i64 {
        self.graph
            .boundary(s)
            .iter()
            .map(|e| i64::from(self.ghost[e.0]))
            .sum()
    }

    /// Right-hand side `k − g(δ(S))`.
    pub fn rhs(&self, s: &VertexSet) -> Rational {
        int(self.k - self.ghost_on(s))
    }

    /// Whether the LP carries a g-cut row for `s`.
    pub fn has_row(&self, s: &VertexSet) -> bool {
        match s.len() {
            0 => false,
            1 => s
                .iter()
                .all(|v| *v != self.graph.root() && !self.relaxed.contains(v)),
            _ => !s.contains(&self.graph.root()),
        }
    }

    /// `y + g` per edge slot.
    pub fn load(&self, y: &[Rational]) -> Vec<Rational> {
        y.iter()
            .zip(self.ghost)
            .map(|(v, g)| v + int(i64::from(*g)))
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Separation {
    /// `value = (y+g)(δ(set)) < k`; `deficit = k − value`.
    Violated {
        set: VertexSet,
        value: Rational,
        deficit: Rational,
    },
    AllSatisfied,
}

/// Most violated g-cut row at `y`, found with the vertex and pair sweeps.
/// Ties prefer the smaller, then lexicographically smaller, set.
pub fn separate(view: &GhostLpView<'_>, y: &[Rational]) -> Result<Separation, OracleError> {
    let g = view.graph;
    let root = g.root();
    let cap = view.load(y);
    let sink: VertexSet = [root].into();
    let mut best: Option<CutWitness> = None;
    let mut consider = |cut: CutWitness| {
        if best.as_ref().is_none_or(|b| cut_order(&cut, b).is_lt()) {
            best = Some(cut);
        }
    };
    for v in g
        .vertices()
        .filter(|v| *v != root && !view.relaxed.contains(v))
    {
        consider(g.max_flow_min_cut(&cap, &[v].into(), &sink)?);
    }
    let relaxed: Vec<VertexId> = view
        .relaxed
        .iter()
        .copied()
        .filter(|v| g.contains_vertex(*v))
        .collect();
    for (i, &a) in relaxed.iter().enumerate() {
        for &b in &relaxed[i + 1..] {
            consider(g.max_flow_min_cut(&cap, &[a, b].into(), &sink)?);
        }
    }
    let k = int(view.k);
    Ok(match best {
        Some(cut) if cut.value < k => Separation::Violated {
            deficit: &k - &cut.value,
            value: cut.value,
            set: cut.set,
        },
        _ => Separation::AllSatisfied,
    })
}

/// An optimal vertex of a cut LP together with how it was obtained.
#[derive(Clone, Debug)]
pub struct CutLpSolution {
    /// Value per edge slot; zero on dead slots.
    pub y: Vec<Rational>,
    pub objective: Rational,
    /// LP column order: `columns[j]` is the edge of variable `j`.
    pub columns: Vec<EdgeId>,
    pub vertex: BasicSolution,
    /// Rows appended by separation during this solve.
    pub rows_added: usize,
}

/// Edge-indexed data of a cut LP; `upper = None` is unbounded.
#[derive(Clone, Copy, Debug)]
pub struct CutLpData<'a> {
    pub graph: &'a MultiGraph,
    pub cost: &'a [Rational],
    pub lower: &'a [Rational],
    pub upper: &'a [Option<Rational>],
}

/// Returns a violated cut for the given point, or `None`.
pub type Separator<'a> = dyn FnMut(&[Rational]) -> Result<Option<VertexSet>, OracleError> + 'a;

/// Generic row generation: solve over the pool, ask `separate` for a violated
/// set, append its row, repeat. `fixed_rows` are extra rows over edge slots
/// kept in every solve.
pub fn solve_by_row_generation(
    data: CutLpData<'_>,
    pool: &mut RowPool,
    fixed_rows: &[(Vec<EdgeId>, Rational)],
    rhs: &dyn Fn(&VertexSet) -> Rational,
    separate: &mut Separator<'_>,
    row_limit: usize,
) -> Result<CutLpSolution, OracleError> {
    let g = data.graph;
    let columns: Vec<EdgeId> = g.edges().map(|e| e.id).collect();
    let mut col_of = vec![usize::MAX; g.edge_slots()];
    for (j, e) in columns.iter().enumerate() {
        col_of[e.0] = j;
    }
    let mut problem = LpProblem::new(columns.len());
    for (j, e) in columns.iter().enumerate() {
        problem.objective[j] = data.cost[e.0].clone();
        problem.set_bounds(j, data.lower[e.0].clone(), data.upper[e.0].clone());
    }
    let one = int(1);
    let cut_row = |s: &VertexSet| -> Row {
        let coeffs = g
            .boundary(s)
            .iter()
            .map(|e| (col_of[e.0], one.clone()))
            .collect();
        Row::new(coeffs, rhs(s))
    };
    for (edges, b) in fixed_rows {
        let coeffs = edges
            .iter()
            .filter(|e| col_of[e.0] != usize::MAX)
            .map(|e| (col_of[e.0], one.clone()))
            .collect();
        problem.add_row(Row::new(coeffs, b.clone()));
    }
    for s in pool.sets() {
        problem.add_row(cut_row(s));
    }

    let mut added = 0usize;
    let mut previous: Option<BasicSolution> = None;
    loop {
        let outcome = match &previous {
            Some(prev) => resolve_with_new_rows(prev, &problem)?,
            None => solve_vertex(&problem)?,
        };
        let vertex = match outcome {
            LpOutcome::Optimal(v) => v,
            LpOutcome::Infeasible(_) => return Err(OracleError::Infeasible),
            LpOutcome::Unbounded(_) => return Err(OracleError::Unbounded),
        };
        let mut y = vec![Rational::zero(); g.edge_slots()];
        for (j, e) in columns.iter().enumerate() {
            y[e.0] = vertex.x[j].clone();
        }
        match separate(&y)? {
            Some(set) => {
                if !pool.insert(set.clone()) {
                    // A pooled row can only be reported again if the LP ignored it.
                    return Err(OracleError::Lp(LpError::Certificate(
                        "separation returned a row already in the LP".into(),
                    )));
                }
                problem.add_row(cut_row(&set));
                added += 1;
                if added > row_limit {
                    return Err(OracleError::RowLimit { limit: row_limit });
                }
                previous = Some(vertex);
            }
            None => {
                return Ok(CutLpSolution {
                    objective: vertex.objective.clone(),
                    y,
                    columns,
                    vertex,
                    rows_added: added,
                })
            }
        }
    }
}

/// Row-count tripwire for one solve: `10·|V|²`.
pub fn row_limit(g: &MultiGraph) -> usize {
    10 * g.vertex_count().pow(2)
}

/// Optimal vertex of the full g-cut LP of `view` with objective `cost`.
/// Singleton rows of `V∖(W∪{r})` are seeded into the pool when missing.
pub fn solve_ghost_lp(
    view: &GhostLpView<'_>,
    cost: &[Rational],
    pool: &mut RowPool,
) -> Result<CutLpSolution, OracleError> {
    let g = view.graph;
    let root = g.root();
    for v in g.vertices() {
        if v != root && !view.relaxed.contains(&v) {
            pool.insert([v].into());
        }
    }
    let upper: Vec<Option<Rational>> = view.upper.iter().cloned().map(Some).collect();
    let data = CutLpData {
        graph: g,
        cost,
        lower: view.lower,
        upper: &upper,
    };
    let rhs = |s: &VertexSet| view.rhs(s);
    let mut sep = |y: &[Rational]| -> Result<Option<VertexSet>, OracleError> {
        Ok(match separate(view, y)? {
            Separation::Violated { set, .. } => Some(set),
            Separation::AllSatisfied => None,
        })
    };
    solve_by_row_generation(data, pool, &[], &rhs, &mut sep, row_limit(g))
}

/// Exhaustive audit: every g-cut row of the LP (all `S ⊆ V∖{r}`, `|S| ≥ 2`,
/// and singletons outside `W`) holds at `y`. Returns the first violated set.
pub fn audit_all_rows(
    view: &GhostLpView<'_>,
    y: &[Rational],
) -> Result<Option<VertexSet>, OracleError> {
    let load = view.load(y);
    let mut violated = None;
    let k = int(view.k);
    crate::multigraph::for_each_root_free_set(
        view.graph,
        |s, value| {
            let has_row = view.has_row(s);
            if violated.is_none() && has_row && value < &k {
                violated = Some(s.clone());
            }
        },
        &load,
    )?;
    Ok(violated)
}

/// Vertices of `g` as an ordered list, for deterministic enumeration.
pub fn ordered_vertices(g: &MultiGraph) -> Vec<VertexId> {
    g.vertices().collect::<BTreeSet<_>>().into_iter().collect()
}
