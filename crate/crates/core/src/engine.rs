//! The synchronous `K_r` graph bootstrap process.
//!
//! From `G_{t-1}` every non-edge `uv` whose addition completes a new `K_r`
//! is infected simultaneously; equivalently the common neighbourhood of `u`
//! and `v` contains a `K_{r-2}`.

use std::collections::HashMap;
use std::sync::OnceLock;

use rayon::prelude::*;
use serde::Serialize;

use crate::bitset::{popcount, Ones, VertexSet};
use crate::error::{input, Result};
use crate::graph::{clique_in, EdgeId, Graph};

/// Graphs at least this large evaluate a step's rows on the rayon pool.
pub const PARALLEL_MIN_VERTICES: usize = 512;

/// Report layout version shared by every JSON report.
pub const SCHEMA_VERSION: u32 = 1;

fn check_r(r: usize) -> Result<()> {
    if r < 3 {
        return input(format!("clique size r must be at least 3, got {r}"));
    }
    Ok(())
}

/// Edges infected by one step, grouped by their smaller endpoint.
#[derive(Clone, Debug, Default)]
pub struct StepDelta {
    rows: Vec<(usize, Vec<u64>)>,
    count: usize,
}

impl StepDelta {
    pub fn len(&self) -> usize {
        self.count
    }

    pub fn is_empty(&self) -> bool {
        self.count == 0
    }

    /// New edges in increasing order.
    pub fn edges(&self) -> impl Iterator<Item = EdgeId> + '_ {
        self.rows
            .iter()
            .flat_map(|(u, bits)| Ones::new(bits).map(move |v| EdgeId::new(*u, v)))
    }
}

#[inline]
fn completes_clique(g: &Graph, r: usize, u: usize, v: usize, buf: &mut [u64]) -> bool {
    if r == 3 {
        return g.rows_intersect(u, v);
    }
    let common = g.common_neighbors_into(u, v, buf);
    common >= r - 2 && clique_in(g, buf, r - 2)
}

/// New neighbours `v > u` of `u`. When `active` is given and `u` is not in
/// it, only active partners are examined.
fn infect_row(
    g: &Graph,
    r: usize,
    u: usize,
    active: Option<&VertexSet>,
    buf: &mut [u64],
) -> Option<Vec<u64>> {
    let n = g.n();
    if u + 1 >= n || (r > 3 && g.degree(u) < r - 2) {
        return None;
    }
    let words = g.word_len();
    let row = g.row(u);
    let restrict = active.filter(|a| !a.contains(u)).map(VertexSet::as_words);
    let first = (u + 1) / 64;
    let mut out: Option<Vec<u64>> = None;
    for w in first..words {
        let mut cand = !row[w];
        if w == first {
            cand &= u64::MAX << ((u + 1) % 64);
        }
        if w == words - 1 && !n.is_multiple_of(64) {
            cand &= (1u64 << (n % 64)) - 1;
        }
        if let Some(a) = restrict {
            cand &= a[w];
        }
        while cand != 0 {
            let b = cand.trailing_zeros();
            cand &= cand - 1;
            let v = w * 64 + b as usize;
            if completes_clique(g, r, u, v, buf) {
                out.get_or_insert_with(|| vec![0; words])[w] |= 1u64 << b;
            }
        }
    }
    out
}

fn infectable(g: &Graph, r: usize, active: Option<&VertexSet>) -> StepDelta {
    let n = g.n();
    let words = g.word_len();
    let rows: Vec<(usize, Vec<u64>)> = if n >= PARALLEL_MIN_VERTICES {
        (0..n)
            .into_par_iter()
            .map_init(
                || vec![0u64; words],
                |buf, u| infect_row(g, r, u, active, buf).map(|bits| (u, bits)),
            )
            .filter_map(|x| x)
            .collect()
    } else {
        let mut buf = vec![0u64; words];
        (0..n)
            .filter_map(|u| infect_row(g, r, u, active, &mut buf).map(|bits| (u, bits)))
            .collect()
    };
    let count = rows.iter().map(|(_, b)| popcount(b)).sum();
    StepDelta { rows, count }
}

/// One synchronous step evaluated against every non-edge of `g`.
///
/// Returns the infected pairs sorted; `g` is not modified.
pub fn step(g: &Graph, r: usize) -> Result<Vec<EdgeId>> {
    check_r(r)?;
    Ok(infectable(g, r, None).edges().collect())
}

/// Stateful iteration of the process.
///
/// After the first step only pairs that can have gained a new `K_r^-` are
/// examined: a pair infected at step `t+1` but not at `t` lies in an `r`-set
/// containing an edge added at step `t`, so one of its endpoints either
/// touches that edge or is a common neighbour of its endpoints.
pub struct Process {
    graph: Graph,
    r: usize,
    time: usize,
    active: Option<VertexSet>,
    pending: Option<StepDelta>,
}

impl Process {
    pub fn new(graph: Graph, r: usize) -> Result<Self> {
        check_r(r)?;
        Ok(Self {
            graph,
            r,
            time: 0,
            active: None,
            pending: None,
        })
    }

    pub fn r(&self) -> usize {
        self.r
    }

    /// Number of steps that added at least one edge so far.
    pub fn time(&self) -> usize {
        self.time
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn into_graph(self) -> Graph {
        self.graph
    }

    fn pending(&mut self) -> &StepDelta {
        if self.pending.is_none() {
            self.pending = Some(infectable(&self.graph, self.r, self.active.as_ref()));
        }
        self.pending.as_ref().unwrap()
    }

    /// Whether the next step would add nothing.
    pub fn is_stable(&mut self) -> bool {
        self.pending().is_empty()
    }

    /// Performs one step; `None` once the process has stabilized.
    pub fn advance(&mut self) -> Option<StepDelta> {
        self.pending();
        let delta = self.pending.take().unwrap();
        if delta.is_empty() {
            self.pending = Some(delta);
            return None;
        }
        let n = self.graph.n();
        let mut active = VertexSet::empty(n);
        for e in delta.edges() {
            let (u, v) = e.endpoints();
            self.graph.add_edge(u, v);
            active.insert(u);
            active.insert(v);
        }
        if self.r > 3 {
            let mut buf = vec![0u64; self.graph.word_len()];
            for e in delta.edges() {
                let (u, v) = e.endpoints();
                self.graph.common_neighbors_into(u, v, &mut buf);
                for (a, b) in active.words_mut().iter_mut().zip(&buf) {
                    *a |= b;
                }
            }
        }
        self.active = Some(active);
        self.time += 1;
        Some(delta)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RunResult {
    /// Smallest `t` with `G_t = G_{t+1}`, or the step budget when truncated.
    pub stabilization_time: usize,
    pub final_edges: usize,
    /// The final graph is complete.
    pub percolated: bool,
    /// The step budget ran out before stabilization was observed.
    pub truncated: bool,
    pub edges_per_step: Vec<usize>,
}

/// Process history: the edges added at each step `1..=T`.
#[derive(Clone, Debug, Default)]
pub struct Trace {
    steps: Vec<Vec<EdgeId>>,
    /// Built on first lookup.
    infection_time: OnceLock<HashMap<EdgeId, usize>>,
}

impl PartialEq for Trace {
    fn eq(&self, other: &Self) -> bool {
        self.steps == other.steps
    }
}

impl Eq for Trace {}

impl Trace {
    pub fn from_steps(steps: Vec<Vec<EdgeId>>) -> Self {
        Self {
            steps,
            infection_time: OnceLock::new(),
        }
    }

    pub fn steps(&self) -> &[Vec<EdgeId>] {
        &self.steps
    }

    /// Number of recorded steps.
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Edges added at step `t >= 1`.
    pub fn added_at(&self, t: usize) -> &[EdgeId] {
        t.checked_sub(1)
            .and_then(|i| self.steps.get(i))
            .map_or(&[], Vec::as_slice)
    }

    /// `t(e)` for an edge absent from `G_0`.
    pub fn infection_time(&self, e: EdgeId) -> Option<usize> {
        self.infection_time
            .get_or_init(|| {
                self.steps
                    .iter()
                    .enumerate()
                    .flat_map(|(i, s)| s.iter().map(move |&e| (e, i + 1)))
                    .collect()
            })
            .get(&e)
            .copied()
    }

    fn push(&mut self, edges: Vec<EdgeId>) {
        self.infection_time = OnceLock::new();
        self.steps.push(edges);
    }
}

#[derive(Clone, Copy, Debug)]
pub struct RunOptions {
    /// Defaults to `n(n-1)/2`.
    pub max_steps: Option<usize>,
    pub record_trace: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self {
            max_steps: None,
            record_trace: true,
        }
    }
}

#[derive(Clone, Debug)]
pub struct RunOutcome {
    pub result: RunResult,
    pub trace: Trace,
    pub graph: Graph,
}

/// Runs the process from `g` until it stabilizes or `max_steps` steps pass.
pub fn run(g: &Graph, r: usize, max_steps: Option<usize>) -> Result<RunOutcome> {
    run_with(
        g.clone(),
        r,
        RunOptions {
            max_steps,
            record_trace: true,
        },
    )
}

pub fn run_with(g: Graph, r: usize, opts: RunOptions) -> Result<RunOutcome> {
    let budget = opts.max_steps.unwrap_or_else(|| g.pair_count());
    let mut process = Process::new(g, r)?;
    let mut trace = Trace::default();
    let mut edges_per_step = Vec::new();
    let mut truncated = false;
    loop {
        if process.time() >= budget {
            truncated = !process.is_stable();
            break;
        }
        let Some(delta) = process.advance() else {
            break;
        };
        edges_per_step.push(delta.len());
        if opts.record_trace {
            trace.push(delta.edges().collect());
        }
    }
    let stabilization_time = process.time();
    let graph = process.into_graph();
    let result = RunResult {
        stabilization_time,
        final_edges: graph.edge_count(),
        percolated: graph.is_complete(),
        truncated,
        edges_per_step,
    };
    Ok(RunOutcome {
        result,
        trace,
        graph,
    })
}

/// Rebuilds `G_t` from `G_0` and a trace.
pub fn snapshot(g0: &Graph, trace: &Trace, t: usize) -> Result<Graph> {
    let mut g = g0.clone();
    for (i, edges) in trace.steps().iter().take(t).enumerate() {
        apply_step(&mut g, edges, i + 1)?;
    }
    Ok(g)
}

fn apply_step(g: &mut Graph, edges: &[EdgeId], t: usize) -> Result<()> {
    for e in edges {
        let (u, v) = e.endpoints();
        if v >= g.n() {
            return input(format!("trace edge {e:?} at step {t} exceeds n={}", g.n()));
        }
        if !g.add_edge(u, v) {
            return input(format!("trace edge {e:?} at step {t} is already present"));
        }
    }
    Ok(())
}

/// Outcome of the clique-growth check on an `r = 4` trace.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CliqueGrowthReport {
    pub holds: bool,
    pub edges_checked: usize,
    /// First edge (with its infection time) lacking the required clique.
    pub first_failure: Option<(EdgeId, usize)>,
}

fn clique_through(g: &Graph, e: EdgeId, size: usize, buf: &mut [u64]) -> bool {
    let (u, v) = e.endpoints();
    let common = g.common_neighbors_into(u, v, buf);
    common + 2 >= size && clique_in(g, buf, size - 2)
}

/// For a `K_4` trace: every edge with `t(e) = t >= 1` must lie in a clique
/// of size `t + 3 + d` inside `G_{t+d}` for some `d ∈ {0, 1}`.
///
/// Snapshots are replayed from `g0`; a trace edge that is already present
/// when its step is applied is an input error.
pub fn check_clique_growth(g0: &Graph, trace: &Trace) -> Result<CliqueGrowthReport> {
    let steps = trace.steps();
    let mut buf = vec![0u64; g0.word_len()];
    let mut current = g0.clone();
    if let Some(first) = steps.first() {
        apply_step(&mut current, first, 1)?;
    }
    let mut checked = 0;
    for t in 1..=steps.len() {
        let mut next = current.clone();
        if t < steps.len() {
            apply_step(&mut next, &steps[t], t + 1)?;
        }
        for &e in &steps[t - 1] {
            checked += 1;
            let ok = clique_through(&current, e, t + 3, &mut buf)
                || clique_through(&next, e, t + 4, &mut buf);
            if !ok {
                return Ok(CliqueGrowthReport {
                    holds: false,
                    edges_checked: checked,
                    first_failure: Some((e, t)),
                });
            }
        }
        current = next;
    }
    Ok(CliqueGrowthReport {
        holds: true,
        edges_checked: checked,
        first_failure: None,
    })
}

pub fn verify_clique_growth(g0: &Graph, trace: &Trace) -> Result<bool> {
    Ok(check_clique_growth(g0, trace)?.holds)
}

/// BFS on bitrows. Switches between expanding the frontier and scanning
/// unvisited vertices for a frontier neighbour, whichever is cheaper.
struct Bfs<'a> {
    g: &'a Graph,
    visited: Vec<u64>,
    frontier: Vec<u64>,
    next: Vec<u64>,
}

impl<'a> Bfs<'a> {
    fn new(g: &'a Graph) -> Self {
        let w = g.word_len();
        Self {
            g,
            visited: vec![0; w],
            frontier: vec![0; w],
            next: vec![0; w],
        }
    }

    /// Eccentricity of `s` and the number of reached vertices; when `levels`
    /// is given it receives the distance classes.
    fn run(&mut self, s: usize, mut levels: Option<&mut Vec<Vec<usize>>>) -> (usize, usize) {
        let g = self.g;
        let n = g.n();
        self.visited.iter_mut().for_each(|w| *w = 0);
        self.frontier.iter_mut().for_each(|w| *w = 0);
        self.visited[s / 64] |= 1 << (s % 64);
        self.frontier[s / 64] |= 1 << (s % 64);
        if let Some(l) = levels.as_deref_mut() {
            l.clear();
            l.push(vec![s]);
        }
        let (mut ecc, mut reached) = (0, 1);
        let mut f_span = (s / 64, s / 64);
        let mut f_count = 1usize;
        while reached < n {
            self.next.iter_mut().for_each(|w| *w = 0);
            let top_cost: usize = if f_count > n - reached {
                usize::MAX
            } else {
                Ones::new(&self.frontier)
                    .map(|v| g.span(v).map_or(0, |(a, b)| b - a + 1))
                    .sum()
            };
            if top_cost <= 2 * (n - reached) {
                for v in Ones::new(&self.frontier) {
                    if let Some((a, b)) = g.span(v) {
                        let row = g.row(v);
                        for (nx, &bits) in self.next[a..=b].iter_mut().zip(&row[a..=b]) {
                            *nx |= bits;
                        }
                    }
                }
                for (nx, vis) in self.next.iter_mut().zip(&self.visited) {
                    *nx &= !vis;
                }
            } else {
                for wi in 0..self.visited.len() {
                    let mut unvisited = !self.visited[wi];
                    if wi == self.visited.len() - 1 && !n.is_multiple_of(64) {
                        unvisited &= (1u64 << (n % 64)) - 1;
                    }
                    while unvisited != 0 {
                        let b = unvisited.trailing_zeros();
                        unvisited &= unvisited - 1;
                        let x = wi * 64 + b as usize;
                        let Some((a, c)) = g.span(x) else { continue };
                        let (a, c) = (a.max(f_span.0), c.min(f_span.1));
                        let row = g.row(x);
                        if a <= c && (a..=c).any(|w| row[w] & self.frontier[w] != 0) {
                            self.next[wi] |= 1 << b;
                        }
                    }
                }
            }
            let found = popcount(&self.next);
            if found == 0 {
                break;
            }
            ecc += 1;
            reached += found;
            f_count = found;
            let mut lo = usize::MAX;
            let mut hi = 0;
            for (w, (&nx, vis)) in self.next.iter().zip(self.visited.iter_mut()).enumerate() {
                *vis |= nx;
                if nx != 0 {
                    lo = lo.min(w);
                    hi = w;
                }
            }
            f_span = (lo, hi);
            std::mem::swap(&mut self.frontier, &mut self.next);
            if let Some(l) = levels.as_deref_mut() {
                l.push(Ones::new(&self.frontier).collect());
            }
        }
        (ecc, reached)
    }
}

/// Graph diameter; `None` when the graph is disconnected.
///
/// Exact. Two double sweeps give a lower bound and a central root; fringe
/// levels around that root then bound the diameter from above, so only the
/// outermost BFS layers need their own searches.
pub fn diameter(g: &Graph) -> Option<usize> {
    let n = g.n();
    if n == 1 {
        return Some(0);
    }
    let start = (0..n).max_by_key(|&v| (g.degree(v), std::cmp::Reverse(v)))?;
    let mut bfs = Bfs::new(g);
    let mut levels = Vec::new();
    let (_, reached) = bfs.run(start, Some(&mut levels));
    if reached < n {
        return None;
    }
    let mut lb = 0;
    let mut far = levels.last()?[0];
    let mut root = start;
    for _ in 0..2 {
        let (d, _) = bfs.run(far, Some(&mut levels));
        lb = lb.max(d);
        let from_a = distances(n, &levels);
        let b = levels[d][0];
        bfs.run(b, Some(&mut levels));
        let from_b = distances(n, &levels);
        root = (0..n)
            .find(|&v| from_a[v] == d / 2 && from_a[v] + from_b[v] == d)
            .unwrap_or(root);
        bfs.run(root, Some(&mut levels));
        far = levels.last()?[0];
    }
    let (ecc_root, _) = bfs.run(root, Some(&mut levels));
    lb = lb.max(ecc_root);
    for i in (1..=ecc_root).rev() {
        // Every pair within levels 0..=i is at distance <= 2i.
        let ub = 2 * i;
        if lb >= ub {
            return Some(lb);
        }
        for &v in &levels[i] {
            lb = lb.max(bfs.run(v, None).0);
            if lb >= ub {
                return Some(lb);
            }
        }
        if lb > 2 * (i - 1) {
            return Some(lb);
        }
    }
    Some(lb)
}

fn distances(n: usize, levels: &[Vec<usize>]) -> Vec<usize> {
    let mut dist = vec![0; n];
    for (d, level) in levels.iter().enumerate() {
        for &v in level {
            dist[v] = d;
        }
    }
    dist
}

/// Diameters of `G_0, …, G_T` and whether each step halves it (rounding up).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HalvingReport {
    pub holds: bool,
    /// `None` for disconnected snapshots.
    pub diameters: Vec<Option<usize>>,
    /// First `t` with `diam(G_{t+1}) != ⌈diam(G_t)/2⌉`.
    pub first_failure: Option<usize>,
}

/// Checks `diam(G_{t+1}) = ⌈diam(G_t)/2⌉` along a trace. Disconnected
/// snapshots must stay disconnected.
pub fn check_diameter_halving(g0: &Graph, trace: &Trace) -> Result<HalvingReport> {
    let mut g = g0.clone();
    let mut diameters = vec![diameter(&g)];
    for (i, edges) in trace.steps().iter().enumerate() {
        apply_step(&mut g, edges, i + 1)?;
        diameters.push(diameter(&g));
    }
    let first_failure = diameters.windows(2).position(|w| match (w[0], w[1]) {
        (Some(a), Some(b)) => b != a.div_ceil(2),
        (None, None) => false,
        _ => true,
    });
    Ok(HalvingReport {
        holds: first_failure.is_none(),
        diameters,
        first_failure,
    })
}

/// JSON run report with a fixed field order.
#[derive(Clone, Debug, Serialize)]
pub struct RunReport {
    pub schema_version: u32,
    pub n: usize,
    pub r: usize,
    pub time: usize,
    pub percolated: bool,
    pub truncated: bool,
    pub final_edges: usize,
    pub edges_per_step: Vec<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trace: Option<Vec<Vec<EdgeId>>>,
}

impl RunReport {
    pub fn new(n: usize, r: usize, outcome: &RunOutcome, with_trace: bool) -> Self {
        let res = &outcome.result;
        Self {
            schema_version: SCHEMA_VERSION,
            n,
            r,
            time: res.stabilization_time,
            percolated: res.percolated,
            truncated: res.truncated,
            final_edges: res.final_edges,
            edges_per_step: res.edges_per_step.clone(),
            trace: with_trace.then(|| outcome.trace.steps().to_vec()),
        }
    }
}
