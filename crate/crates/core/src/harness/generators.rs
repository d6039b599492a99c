//! Seeded instance generators.
//!
//! Randomness comes from PCG64 (PCG XSL-RR 128/64) created with
//! `state = seed` and the reference stream [`PCG_STREAM`]. Integers in
//! `[0, b)` are `next_u64() % b` and probabilities compare
//! `(next_u64() >> 11) / 2^53` against `p`, so other implementations of PCG64
//! reproduce every generated file.

use rand_core::Rng;
use rand_pcg::Pcg64;

use crate::gadgets::TapInstance;
use crate::multigraph::{MultiGraph, VertexId};
use crate::rational::{int, Rational};

/// PCG reference stream constant.
pub const PCG_STREAM: u128 = 0x0a02_bdbf_7bb3_c0a7_ac28_fa16_a64a_bf96;

pub struct Prng(Pcg64);

impl Prng {
    pub fn new(seed: u64) -> Self {
        Prng(Pcg64::new(u128::from(seed), PCG_STREAM))
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0.next_u64()
    }

    /// `next_u64() % bound`; `bound` must be positive.
    pub fn below(&mut self, bound: u64) -> u64 {
        self.next_u64() % bound
    }

    pub fn index(&mut self, bound: usize) -> usize {
        self.below(bound as u64) as usize
    }

    pub fn chance(&mut self, p: f64) -> bool {
        ((self.next_u64() >> 11) as f64 / (1u64 << 53) as f64) < p
    }
}

/// Description line for generated files.
pub fn provenance(command: &str, seed: Option<u64>) -> String {
    match seed {
        Some(s) => {
            format!("{command}\nprng pcg64 state={s} stream={PCG_STREAM:#x}, ints next_u64 % b")
        }
        None => command.to_string(),
    }
}

/// Cycle `0 – 1 – … – n−1 – 0`, unit costs. `n ≥ 3`.
pub fn cycle(n: usize) -> (MultiGraph, Vec<Rational>) {
    assert!(n >= 3, "a cycle needs three vertices");
    let edges: Vec<(usize, usize)> = (0..n).map(|i| (i, (i + 1) % n)).collect();
    let g = MultiGraph::from_edges(n, VertexId(0), &edges).expect("valid cycle");
    (g, vec![int(1); n])
}

/// Hub `0` joined to a rim cycle `1 … n−1`, unit costs. `n ≥ 4`.
pub fn wheel(n: usize) -> (MultiGraph, Vec<Rational>) {
    assert!(n >= 4, "a wheel needs four vertices");
    let rim = n - 1;
    let mut edges: Vec<(usize, usize)> = (1..n).map(|i| (0, i)).collect();
    edges.extend((0..rim).map(|i| (1 + i, 1 + (i + 1) % rim)));
    let g = MultiGraph::from_edges(n, VertexId(0), &edges).expect("valid wheel");
    let m = g.edge_slots();
    (g, vec![int(1); m])
}

#[derive(Clone, Debug, PartialEq)]
pub struct RandomMultigraph {
    pub n: usize,
    /// Probability that a non-tree pair is joined.
    pub p: f64,
    pub max_multiplicity: u64,
    pub max_cost: u64,
}

impl RandomMultigraph {
    pub fn new(n: usize, p: f64) -> Self {
        Self {
            n,
            p,
            max_multiplicity: 3,
            max_cost: 9,
        }
    }
}

/// Connected random multigraph: a random recursive spanning tree (vertex `i`
/// attaches to `below(i)`), then every other pair with probability `p`. Each
/// joined pair gets `1 + below(max_multiplicity)` parallel edges, each with
/// cost `1 + below(max_cost)`. Pairs are emitted in lexicographic order.
pub fn random_multigraph(params: &RandomMultigraph, rng: &mut Prng) -> (MultiGraph, Vec<Rational>) {
    let n = params.n;
    assert!(n >= 1, "need a vertex");
    let mut tree = vec![vec![false; n]; n];
    for i in 1..n {
        let j = rng.index(i);
        tree[j][i] = true;
    }
    let mut g = MultiGraph::new(n, VertexId(0)).expect("n ≥ 1");
    let mut cost = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            let coin = rng.chance(params.p);
            if !(tree[a][b] || coin) {
                continue;
            }
            let copies = 1 + rng.below(params.max_multiplicity.max(1));
            for _ in 0..copies {
                g.add_edge(VertexId(a), VertexId(b))
                    .expect("distinct endpoints");
                cost.push(int(1 + rng.below(params.max_cost.max(1)) as i64));
            }
        }
    }
    (g, cost)
}

/// Random TAP instance: random recursive tree on `n` vertices, `links`
/// random non-tree pairs (fewer if the pairs run out), then one extra link
/// per still-uncovered tree edge (the edge's own endpoints), so `L` covers
/// every tree edge.
pub fn random_tap(n: usize, links: usize, rng: &mut Prng) -> TapInstance {
    assert!(n >= 2, "need a tree edge");
    let tree: Vec<(usize, usize)> = (1..n).map(|i| (rng.index(i), i)).collect();
    let is_tree = |a: usize, b: usize| {
        tree.iter()
            .any(|&(u, v)| (u, v) == (a, b) || (v, u) == (a, b))
    };
    let mut chosen: Vec<(usize, usize)> = Vec::new();
    let free = n * (n - 1) / 2 - (n - 1);
    let target = links.min(free);
    while chosen.len() < target {
        let a = rng.index(n);
        let b = rng.index(n);
        let (a, b) = (a.min(b), a.max(b));
        if a != b && !is_tree(a, b) && !chosen.contains(&(a, b)) {
            chosen.push((a, b));
        }
    }
    let partial = TapInstance::new(n, tree.clone(), chosen.clone()).expect("valid tree");
    for (e, cov) in partial.coverage().iter().enumerate() {
        if cov.is_empty() {
            let (u, v) = tree[e];
            chosen.push((u.min(v), u.max(v)));
        }
    }
    TapInstance::new(n, tree, chosen).expect("valid tree")
}
