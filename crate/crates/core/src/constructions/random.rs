use std::collections::{BTreeMap, HashSet};
use std::ops::ControlFlow;

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::chain::{Chain, ChainGraph};
use crate::error::{input, Result};
use crate::graph::{EdgeId, Graph};
use crate::verify::{classify_with, next_combination, NearCliques, Verdict};

pub const DEFAULT_EPSILON: f64 = 0.5;

#[derive(Clone, Debug)]
pub struct RandomChainConfig {
    pub n: usize,
    pub r: usize,
    pub target_t: usize,
    /// Candidates drawn per step; `None` means `⌈ln n⌉`.
    pub attempts: Option<usize>,
    pub seed: u64,
    /// Adds the count conditions C3 and C4.
    pub robust: bool,
    pub epsilon: f64,
}

impl RandomChainConfig {
    pub fn new(n: usize, r: usize, target_t: usize, seed: u64) -> Self {
        Self {
            n,
            r,
            target_t,
            attempts: None,
            seed,
            robust: false,
            epsilon: DEFAULT_EPSILON,
        }
    }

    pub fn attempts(&self) -> usize {
        self.attempts
            .unwrap_or_else(|| (self.n as f64).ln().ceil().max(1.0) as usize)
    }
}

/// Acceptance conditions, checked in order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Condition {
    /// The new vertices avoid `e_t`.
    C0,
    /// No pair of the new clique other than `e_t` is already covered.
    C1,
    /// No new set was dangerous.
    C2,
    /// No 1- or 2-set of new vertices lies in too many dangerous sets.
    C3,
    /// No small set touching the new vertices lies in too many deadly sets.
    C4,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ChainFailure {
    /// Index of the clique that could not be placed.
    pub step: usize,
    pub attempts: usize,
    /// Attempts rejected by each condition (first failing one only).
    pub rejected: BTreeMap<Condition, usize>,
    /// The furthest condition any attempt reached and failed.
    pub blocking: Condition,
}

#[derive(Clone, Debug)]
pub enum RandomChainOutcome {
    Built(ChainGraph),
    Failed(ChainFailure),
}

impl RandomChainOutcome {
    pub fn built(self) -> Option<ChainGraph> {
        match self {
            Self::Built(cg) => Some(cg),
            Self::Failed(_) => None,
        }
    }
}

/// Grows a good chain by random extension: `H_{t+1} = e_t ∪ X` for a
/// uniform `(r−2)`-set `X`, `e_{t+1}` a uniform pair of `X`. The first of
/// `attempts` candidates passing every condition is taken; if none does the
/// run stops with a [`ChainFailure`]. `e_0` is a uniform edge of `K_n`.
pub fn random_chain(cfg: &RandomChainConfig) -> Result<RandomChainOutcome> {
    let (n, r) = (cfg.n, cfg.r);
    if r < 5 {
        return input(format!("random chain needs r >= 5, got {r}"));
    }
    if n < r {
        return input(format!("random chain needs n >= r, got n={n}, r={r}"));
    }
    if cfg.target_t == 0 {
        return input("target length must be at least 1");
    }
    if cfg.attempts == Some(0) {
        return input("attempts per step must be at least 1");
    }
    if cfg.robust && !(cfg.epsilon > 0.0 && cfg.epsilon.is_finite()) {
        return input(format!("epsilon must be positive, got {}", cfg.epsilon));
    }
    let attempts = cfg.attempts();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);

    let e0 = sample(&mut rng, n, 2).into_vec();
    let mut state = State {
        n,
        r,
        union: Graph::new(n),
        cliques: Vec::new(),
        sorted: HashSet::new(),
        shared: vec![EdgeId::new(e0[0], e0[1])],
    };

    while state.cliques.len() < cfg.target_t {
        let et = *state.shared.last().unwrap();
        let mut rejected = BTreeMap::new();
        let mut accepted = None;
        for _ in 0..attempts {
            let mut x = sample(&mut rng, n, r - 2).into_vec();
            x.sort_unstable();
            let pick = sample(&mut rng, r - 2, 2).into_vec();
            let next = EdgeId::new(x[pick[0]], x[pick[1]]);
            match state.check(et, &x, cfg) {
                Ok(()) => {
                    accepted = Some((x, next));
                    break;
                }
                Err(c) => *rejected.entry(c).or_insert(0) += 1,
            }
        }
        match accepted {
            Some((x, next)) => state.push(et, &x, next),
            None => {
                let blocking = *rejected.keys().next_back().unwrap();
                return Ok(RandomChainOutcome::Failed(ChainFailure {
                    step: state.cliques.len() + 1,
                    attempts,
                    rejected,
                    blocking,
                }));
            }
        }
    }

    let chain = Chain {
        r,
        n,
        cliques: state.cliques,
        shared_edges: state.shared,
    };
    Ok(RandomChainOutcome::Built(ChainGraph::from_chain(chain)?))
}

struct State {
    n: usize,
    r: usize,
    /// `⋃ H_s^(2)` so far, withheld edges included.
    union: Graph,
    cliques: Vec<Vec<usize>>,
    sorted: HashSet<Vec<usize>>,
    shared: Vec<EdgeId>,
}

impl State {
    fn push(&mut self, et: EdgeId, x: &[usize], next: EdgeId) {
        let mut h = vec![et.u as usize, et.v as usize];
        h.extend_from_slice(x);
        for (i, &a) in h.iter().enumerate() {
            for &b in &h[i + 1..] {
                self.union.add_edge(a, b);
            }
        }
        let mut s = h.clone();
        s.sort_unstable();
        self.sorted.insert(s);
        self.cliques.push(h);
        self.shared.push(next);
    }

    fn check(&self, et: EdgeId, x: &[usize], cfg: &RandomChainConfig) -> std::result::Result<(), Condition> {
        let (a, b) = et.endpoints();
        if x.iter().any(|&v| v == a || v == b) {
            return Err(Condition::C0);
        }
        let mut h = vec![a, b];
        h.extend_from_slice(x);
        let covered = h.iter().enumerate().any(|(i, &p)| {
            h[i + 1..]
                .iter()
                .any(|&q| (p, q) != (a, b) && self.union.has_edge(p, q))
        });
        if covered {
            return Err(Condition::C1);
        }
        if !self.new_sets_safe(&h) {
            return Err(Condition::C2);
        }
        if cfg.robust {
            if !self.dangerous_counts_ok(x, cfg.epsilon) {
                return Err(Condition::C3);
            }
            if !self.deadly_counts_ok(et, x, cfg.epsilon) {
                return Err(Condition::C4);
            }
        }
        Ok(())
    }

    /// Every `A ⊂ H_{t+1}` with `2 <= |A| <= r−1`, `A ⊄ e_t`, is safe.
    /// `h[0..2]` is `e_t`.
    fn new_sets_safe(&self, h: &[usize]) -> bool {
        let r = self.r;
        (0u32..1 << r).all(|mask| {
            let size = mask.count_ones() as usize;
            if size < 2 || size >= r || mask & !0b11 == 0 {
                return true;
            }
            let a: Vec<usize> = (0..r).filter(|i| mask >> i & 1 == 1).map(|i| h[i]).collect();
            classify_with(&self.union, r, &self.sorted, self.cliques.len(), &a)
                .map(|rep| rep.verdict == Verdict::Safe)
                .unwrap_or(false)
        })
    }

    /// C3: a `j`-set `J ⊆ X` (`j ∈ {1,2}`) lies in at most `n^{i−ε/4}`
    /// dangerous `(i+j)`-sets, for `i >= 1`, `i + j < r`.
    fn dangerous_counts_ok(&self, x: &[usize], eps: f64) -> bool {
        let n = self.n as f64;
        let mut js: Vec<Vec<usize>> = x.iter().map(|&v| vec![v]).collect();
        for (i, &p) in x.iter().enumerate() {
            for &q in &x[i + 1..] {
                js.push(vec![p, q]);
            }
        }
        js.iter().all(|j| {
            let caps: Vec<(usize, usize)> = (1..self.r - j.len())
                .map(|i| (j.len() + i, n.powf(i as f64 - eps / 4.0).floor() as usize))
                .collect();
            let counts = self.count_dangerous_supersets(j, &caps);
            caps.iter().zip(counts).all(|(&(_, cap), c)| c <= cap)
        })
    }

    /// Distinct dangerous `k`-sets containing `j`, one count per `(k, cap)`,
    /// each stopping once it passes its cap.
    ///
    /// A witness `B ⊃ A` has a vertex `y ∉ A` adjacent to all of `B` but at
    /// most one vertex, so `B ⊆ N[y] ∪ {z}`.
    fn count_dangerous_supersets(&self, j: &[usize], caps: &[(usize, usize)]) -> Vec<usize> {
        let g = &self.union;
        let r = self.r;
        let mut found: Vec<HashSet<Vec<usize>>> = vec![HashSet::new(); caps.len()];
        let full = |found: &Vec<HashSet<Vec<usize>>>| {
            found.iter().zip(caps).all(|(f, &(_, cap))| f.len() > cap)
        };
        let record = |b: &[usize], y: usize, found: &mut Vec<HashSet<Vec<usize>>>| {
            let mut sorted = b.to_vec();
            sorted.push(y);
            sorted.sort_unstable();
            if self.sorted.contains(&sorted) {
                return;
            }
            // `b` holds `j` first, then the rest of `B − y`.
            let free = &b[j.len()..];
            for (slot, &(k, cap)) in caps.iter().enumerate() {
                if found[slot].len() > cap {
                    continue;
                }
                let extra = k - j.len();
                if extra > free.len() {
                    continue;
                }
                let mut pick: Vec<usize> = (0..extra).collect();
                loop {
                    let mut a: Vec<usize> = j.to_vec();
                    a.extend(pick.iter().map(|&p| free[p]));
                    if missing_outside(g, &sorted, &a) <= 1 {
                        a.sort_unstable();
                        found[slot].insert(a);
                    }
                    if extra == 0 || !next_combination(&mut pick, free.len()) {
                        break;
                    }
                }
            }
        };
        for y in 0..self.n {
            if j.contains(&y) {
                continue;
            }
            let miss: Vec<usize> = j.iter().copied().filter(|&v| !g.has_edge(y, v)).collect();
            if miss.len() > 1 {
                continue;
            }
            let nbrs: Vec<usize> = g.neighbors(y).filter(|v| !j.contains(v)).collect();
            let rest = r - 1 - j.len();
            let mut b: Vec<usize> = j.to_vec();
            for_each_subset(&nbrs, rest, &mut |s| {
                b.truncate(j.len());
                b.extend_from_slice(s);
                record(&b, y, &mut found);
            });
            if miss.is_empty() && rest >= 1 {
                for z in 0..self.n {
                    if z == y || j.contains(&z) || g.has_edge(y, z) {
                        continue;
                    }
                    for_each_subset(&nbrs, rest - 1, &mut |s| {
                        b.truncate(j.len());
                        b.push(z);
                        b.extend_from_slice(s);
                        record(&b, y, &mut found);
                    });
                }
            }
            if full(&found) {
                break;
            }
        }
        found.iter().map(HashSet::len).collect()
    }

    /// C4: a `j`-set (`j ∈ {2,3}`) of `e_t ∪ X` with at most one vertex of
    /// `e_t` and at least one of `X` lies in at most `n^{1−ε/8}` deadly
    /// `(j+1)`-sets.
    fn deadly_counts_ok(&self, et: EdgeId, x: &[usize], eps: f64) -> bool {
        let cap = (self.n as f64).powf(1.0 - eps / 8.0).floor() as usize;
        let (a, b) = et.endpoints();
        let mut pool = vec![a, b];
        pool.extend_from_slice(x);
        let mut js = Vec::new();
        for size in 2..=3 {
            if size + 1 >= self.r {
                continue;
            }
            let mut idx: Vec<usize> = (0..size).collect();
            loop {
                let set: Vec<usize> = idx.iter().map(|&i| pool[i]).collect();
                let from_edge = idx.iter().filter(|&&i| i < 2).count();
                if from_edge <= 1 && from_edge < size {
                    js.push(set);
                }
                if !next_combination(&mut idx, pool.len()) {
                    break;
                }
            }
        }
        js.iter().all(|j| {
            let mut count = 0;
            for v in 0..self.n {
                if j.contains(&v) {
                    continue;
                }
                let mut a = j.clone();
                a.push(v);
                a.sort_unstable();
                if self.is_deadly(&a) {
                    count += 1;
                    if count > cap {
                        return false;
                    }
                }
            }
            true
        })
    }

    fn is_deadly(&self, a: &[usize]) -> bool {
        let mut hit = false;
        let _ = NearCliques::new(&self.union, self.r, 0).for_each(a, &mut |b, _| {
            if self.sorted.contains(b) {
                ControlFlow::Continue(())
            } else {
                hit = true;
                ControlFlow::Break(())
            }
        });
        hit
    }
}

/// Non-edges of `g` inside `b` that do not lie inside `a`.
fn missing_outside(g: &Graph, b: &[usize], a: &[usize]) -> usize {
    let mut missing = 0;
    for (i, &p) in b.iter().enumerate() {
        for &q in &b[i + 1..] {
            if !g.has_edge(p, q) && !(a.contains(&p) && a.contains(&q)) {
                missing += 1;
            }
        }
    }
    missing
}

fn for_each_subset(items: &[usize], k: usize, f: &mut impl FnMut(&[usize])) {
    if k > items.len() {
        return;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    let mut buf = Vec::with_capacity(k);
    loop {
        buf.clear();
        buf.extend(idx.iter().map(|&i| items[i]));
        f(&buf);
        if k == 0 || !next_combination(&mut idx, items.len()) {
            return;
        }
    }
}
