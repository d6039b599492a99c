//! Exact optimum of tiny instances by exhaustive search.
//!
//! Parallel edges are grouped per vertex pair. For ECSM and subset ECSM the
//! copies of a pair all go to its cheapest edge and a pair never needs more
//! than `k` copies; for ECSS a pair takes its `t` cheapest edges. The search
//! assigns a count to each pair in turn, with cuts kept as bitmasks, and
//! prunes on residual cut capacity and on a cut-wise cost lower bound.

use num_traits::{Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::multigraph::VertexId;
use crate::problems::{Instance, Mode};
use crate::rational::{common_denominator, int, Rational};

pub const BRUTE_FORCE_MAX_VERTICES: usize = 7;

/// Search nodes allowed before giving up.
pub const NODE_BUDGET: u64 = 20_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BruteForceError {
    #[error("instance has {0} vertices, brute force handles at most {BRUTE_FORCE_MAX_VERTICES}")]
    TooManyVertices(usize),
    #[error("search exceeded {NODE_BUDGET} nodes")]
    TooLarge,
    #[error("instance has no feasible solution")]
    Infeasible,
    #[error("invalid instance: {0}")]
    Invalid(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BruteForceResult {
    pub cost: Rational,
    /// Multiplicity per input edge.
    pub z: Vec<u64>,
    pub nodes: u64,
}

struct Pair {
    /// Edge ids ordered by cost, then id.
    edges: Vec<usize>,
    /// `price[t]` = scaled cost of `t` copies.
    price: Vec<i128>,
    /// Indices of the cuts this pair crosses.
    cuts: Vec<usize>,
}

/// Marginal copies available to a cut: `count` units at `price` from `pair`.
struct Units {
    price: i128,
    pair: usize,
    count: u64,
}

struct Search<'a> {
    pairs: &'a [Pair],
    /// Per cut, the units of every crossing pair, cheapest first.
    units: Vec<Vec<Units>>,
    k: u64,
    load: Vec<u64>,
    /// Remaining capacity per cut from undecided pairs.
    spare: Vec<u64>,
    choice: Vec<usize>,
    best: Option<(i128, Vec<usize>)>,
    nodes: u64,
    budget: u64,
}

impl Search<'_> {
    /// Largest over cuts of the cheapest way to fill that cut alone with
    /// pairs `next..`.
    fn lower_bound(&self, next: usize) -> i128 {
        let mut bound = 0;
        for (c, load) in self.load.iter().enumerate() {
            let mut deficit = self.k.saturating_sub(*load);
            let mut fill = 0;
            for u in self.units[c].iter().filter(|u| u.pair >= next) {
                if deficit == 0 {
                    break;
                }
                let take = deficit.min(u.count);
                fill += u.price * i128::from(take);
                deficit -= take;
            }
            bound = bound.max(fill);
        }
        bound
    }

    fn run(&mut self, i: usize, cost: i128) -> Result<(), BruteForceError> {
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(BruteForceError::TooLarge);
        }
        if let Some((b, _)) = &self.best {
            if cost + self.lower_bound(i) >= *b {
                return Ok(());
            }
        }
        if i == self.pairs.len() {
            if self.load.iter().all(|l| *l >= self.k) {
                self.best = Some((cost, self.choice.clone()));
            }
            return Ok(());
        }
        let pair = &self.pairs[i];
        let max_useful = pair
            .cuts
            .iter()
            .map(|&c| self.k.saturating_sub(self.load[c]))
            .max()
            .unwrap_or(0)
            .min(pair.price.len() as u64 - 1);
        let cap = pair.price.len() as u64 - 1;
        for &c in &pair.cuts {
            self.spare[c] -= cap;
        }
        for t in 0..=max_useful {
            let feasible = pair
                .cuts
                .iter()
                .all(|&c| self.load[c] + t + self.spare[c] >= self.k);
            if feasible {
                for &c in &pair.cuts {
                    self.load[c] += t;
                }
                self.choice[i] = t as usize;
                let r = self.run(i + 1, cost + pair.price[t as usize]);
                for &c in &pair.cuts {
                    self.load[c] -= t;
                }
                r?;
            }
        }
        for &c in &pair.cuts {
            self.spare[c] += cap;
        }
        Ok(())
    }
}

/// Minimum-cost feasible solution of `instance` by exhaustive search.
pub fn brute_force_opt(instance: &Instance) -> Result<BruteForceResult, BruteForceError> {
    brute_force_with_budget(instance, NODE_BUDGET)
}

/// As [`brute_force_opt`], giving up after `budget` search nodes.
pub fn brute_force_with_budget(
    instance: &Instance,
    budget: u64,
) -> Result<BruteForceResult, BruteForceError> {
    let g = &instance.graph;
    let n = g.original_vertex_count();
    if n > BRUTE_FORCE_MAX_VERTICES {
        return Err(BruteForceError::TooManyVertices(n));
    }
    if instance.k < 1 {
        return Err(BruteForceError::Invalid("k must be positive".into()));
    }
    if instance.cost.len() != g.edge_slots() {
        return Err(BruteForceError::Invalid("cost length mismatch".into()));
    }
    if instance.cost.iter().any(|c| c.is_negative()) {
        return Err(BruteForceError::Invalid("negative cost".into()));
    }
    let k = instance.k as u64;
    // Costs scaled to integers by their common denominator.
    let scale = common_denominator(&instance.cost);
    let scaled: Vec<i128> = instance
        .cost
        .iter()
        .map(|c| (c.numer() * (&scale / c.denom())).to_i128())
        .collect::<Option<_>>()
        .filter(|v: &Vec<i128>| {
            v.iter()
                .all(|c| c.checked_mul(i128::from(k) * 64).is_some())
        })
        .ok_or_else(|| BruteForceError::Invalid("costs too large for exact search".into()))?;
    let required: Vec<usize> = match instance.mode {
        Mode::Subset => instance.terminals.iter().map(|v| v.0).collect(),
        _ => (0..n).collect(),
    };
    let required_mask: u32 = required.iter().fold(0, |m, v| m | 1 << v);
    // Cuts are the masks containing a required vertex but not the first one
    // (or not vertex 0 when every vertex is required).
    let anchor = required.first().copied().unwrap_or(0);
    let cuts: Vec<u32> = (1u32..(1 << n))
        .filter(|&s| s >> anchor & 1 == 0 && s & required_mask != 0)
        .collect();

    let mut by_pair: std::collections::BTreeMap<(usize, usize), Vec<usize>> = Default::default();
    for e in g.edges() {
        let (a, b) = (e.ends.0 .0, e.ends.1 .0);
        by_pair
            .entry((a.min(b), a.max(b)))
            .or_default()
            .push(e.id.0);
    }
    let mut pairs: Vec<Pair> = Vec::new();
    for ((a, b), mut edges) in by_pair {
        edges.sort_by(|x, y| scaled[*x].cmp(&scaled[*y]).then(x.cmp(y)));
        let price: Vec<i128> = match instance.mode {
            Mode::Ecss => std::iter::once(0)
                .chain(edges.iter().scan(0, |acc, e| {
                    *acc += scaled[*e];
                    Some(*acc)
                }))
                .collect(),
            _ => (0..=k).map(|t| scaled[edges[0]] * i128::from(t)).collect(),
        };
        let pair_cuts: Vec<usize> = cuts
            .iter()
            .enumerate()
            .filter(|(_, &s)| (s >> a & 1) != (s >> b & 1))
            .map(|(i, _)| i)
            .collect();
        pairs.push(Pair {
            edges,
            price,
            cuts: pair_cuts,
        });
    }
    // Cheap pairs first, so early decisions tighten the bound.
    pairs.sort_by_key(|p| p.price.get(1).copied().unwrap_or(0));
    let mut units: Vec<Vec<Units>> = (0..cuts.len()).map(|_| Vec::new()).collect();
    for (i, p) in pairs.iter().enumerate() {
        for &c in &p.cuts {
            for t in 1..p.price.len() {
                let price = p.price[t] - p.price[t - 1];
                match units[c].last_mut() {
                    Some(u) if u.pair == i && u.price == price => u.count += 1,
                    _ => units[c].push(Units {
                        price,
                        pair: i,
                        count: 1,
                    }),
                }
            }
        }
    }
    for list in &mut units {
        list.sort_by_key(|u| u.price);
    }
    let mut spare = vec![0u64; cuts.len()];
    for p in &pairs {
        for &c in &p.cuts {
            spare[c] += p.price.len() as u64 - 1;
        }
    }
    if spare.iter().any(|s| *s < k) {
        return Err(BruteForceError::Infeasible);
    }
    let mut search = Search {
        pairs: &pairs,
        units,
        k,
        load: vec![0; cuts.len()],
        spare,
        choice: vec![0; pairs.len()],
        best: None,
        nodes: 0,
        budget,
    };
    search.run(0, 0)?;
    let nodes = search.nodes;
    let (_, choice) = search.best.ok_or(BruteForceError::Infeasible)?;
    let mut z = vec![0u64; g.edge_slots()];
    for (p, t) in pairs.iter().zip(choice) {
        match instance.mode {
            Mode::Ecss => {
                for e in &p.edges[..t] {
                    z[*e] = 1;
                }
            }
            _ => z[p.edges[0]] = t as u64,
        }
    }
    let cost = z
        .iter()
        .zip(&instance.cost)
        .fold(Rational::zero(), |acc, (t, c)| acc + c * int(*t as i64));
    Ok(BruteForceResult { cost, z, nodes })
}

/// Terminals as vertex ids, for callers building subset instances.
pub fn vertices(ids: &[usize]) -> Vec<VertexId> {
    ids.iter().map(|&v| VertexId(v)).collect()
}
