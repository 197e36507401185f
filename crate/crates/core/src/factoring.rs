//! Factorizations `β∘α = Φ` through simple-k-ods, their verification, and two
//! complete searches.
//!
//! Setting: `Φ` is light with a tree domain. Any factorization can be cut
//! down to one with `α` surjective, and then `α` is light as well, so the
//! target `T` is the quotient of the domain by the fibers of `α`: classes of
//! constant `Φ`-value whose quotient is a tree with at most one vertex of
//! degree three or more. `β` sends a class to its common `Φ`-value.
//!
//! *Congruence search* builds that quotient directly. Domain vertices are
//! taken in breadth-first order; each joins a class adjacent to its parent's
//! class with the right value, or opens a new leaf class. Joining any other
//! existing class would close a cycle, so this enumerates exactly the
//! tree quotients, each once.
//!
//! *Lift search* fixes the branch instead: for every root `r` it sets
//! `α(r)` to the center of a spider and lifts the remaining vertices one at a
//! time onto an existing neighbor, a new arm tip, or a new arm. Every
//! factorization appears for each root in the fiber over its branch. An arm
//! of `T` never exceeds the eccentricity of `r` in the domain: its tip is
//! `α(x)` for some `x`, and the image of the domain path from `r` to `x`
//! must run the whole arm. This bound is enforced and recorded.
//!
//! Both searches reduce every complete candidate to the same canonical key
//! (arm count, edge count, sorted arm images under `β`, then the assignment
//! of `α`) and keep the minimum, so parallel runs are deterministic.
//!
//! Anchoring asks for `β(s₀) = v₀` at the branch `s₀`. When `T` is a path
//! any vertex may serve as `s₀`; it has one or two arms depending on whether
//! it is an end point.
//!
//! The rearrangement and shortening devices used to prove non-factorability
//! in general are not implemented; at desk scale the exhaustive searches
//! take their place.

use std::collections::{BTreeMap, VecDeque};
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::sync::Arc;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Graph, RawGraph, VertexId};
use crate::map::SimplicialMap;
use crate::od::SimpleNOd;
use crate::par::{self, Execution};

/// A factorization `β∘α = Φ` through the simple-k-od `target`.
#[derive(Clone, Debug)]
pub struct Factorization {
    pub target: SimpleNOd,
    pub alpha: SimplicialMap,
    pub beta: SimplicialMap,
}

/// Unchecked name-level form of a factorization, as read from JSON.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawFactorization {
    pub target: RawGraph,
    pub branch: VertexId,
    pub alpha: BTreeMap<VertexId, VertexId>,
    pub beta: BTreeMap<VertexId, VertexId>,
}

impl Factorization {
    pub fn arm_count(&self) -> usize {
        self.target.arm_count()
    }

    pub fn to_raw(&self) -> RawFactorization {
        RawFactorization {
            target: self.target.graph().to_raw(),
            branch: self.target.branch_name().clone(),
            alpha: self.alpha.assignment_names(),
            beta: self.beta.assignment_names(),
        }
    }

    /// The same factorization with one more arm at the branch, a single edge
    /// sent onto an edge at `β(s₀)`.
    pub fn padded(&self) -> Result<Factorization> {
        let t = self.target.graph();
        let cod = self.beta.codomain();
        let b0 = self.beta.at(self.target.branch());
        let step = cod.neighbors(b0)[0];
        let fresh = VertexId::indexed("t", t.vertex_count());
        let mut vertices = t.vertices().to_vec();
        vertices.push(fresh.clone());
        let mut edges: Vec<(VertexId, VertexId)> = (0..t.edge_count())
            .map(|e| {
                let (x, y) = t.edge_names(e);
                (x.clone(), y.clone())
            })
            .collect();
        edges.push((self.target.branch_name().clone(), fresh.clone()));
        let g = Arc::new(Graph::new(vertices, edges)?);
        let mut arms = self.target.arms();
        arms.push(crate::graph::Walk(vec![self.target.branch_name().clone(), fresh.clone()]));
        let target = SimpleNOd::from_arms(g.clone(), self.target.branch_name(), &arms)?;
        let mut beta = self.beta.assignment_names();
        beta.insert(fresh, cod.name(step).clone());
        let alpha = SimplicialMap::new(self.alpha.domain().clone(), g.clone(), self.alpha.assignment_names())?;
        let beta = SimplicialMap::new(g, cod.clone(), beta)?;
        Ok(Factorization { target, alpha, beta })
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct FactorizationReport {
    pub target: Vec<String>,
    pub alpha: Vec<String>,
    pub beta: Vec<String>,
    pub composition: Vec<String>,
    pub anchor: Vec<String>,
    /// Informational; a padded witness is valid but not onto.
    pub alpha_surjective: bool,
    pub arm_count: Option<usize>,
}

impl FactorizationReport {
    pub fn is_valid(&self) -> bool {
        self.target.is_empty() && self.alpha.is_empty() && self.beta.is_empty() && self.composition.is_empty() && self.anchor.is_empty()
    }
}

fn check_assignment(
    what: &str,
    dom: &Graph,
    cod: &Graph,
    assign: &BTreeMap<VertexId, VertexId>,
    out: &mut Vec<String>,
) -> Option<Vec<usize>> {
    let mut idx = Vec::with_capacity(dom.vertex_count());
    for x in dom.vertices() {
        match assign.get(x).and_then(|y| cod.index_of(y)) {
            Some(y) => idx.push(y),
            None => {
                out.push(format!("{what} has no valid image for {x}"));
                return None;
            }
        }
    }
    for &(x, y) in dom.edges() {
        let (a, b) = (idx[x], idx[y]);
        if a != b && !cod.adjacent(a, b) {
            out.push(format!("{what} sends edge {}-{} to non-adjacent {}, {}", dom.name(x), dom.name(y), cod.name(a), cod.name(b)));
        }
    }
    Some(idx)
}

/// Checks a candidate: the target is a simple-k-od at `branch`, both maps
/// are simplicial, `β∘α = Φ` pointwise, and with `anchored`, `β` sends the
/// branch to `v0`.
pub fn verify_factorization(phi: &SimplicialMap, cand: &RawFactorization, anchored: bool) -> FactorizationReport {
    let mut report = FactorizationReport::default();
    let t = match Graph::from_raw(&cand.target) {
        Ok(g) => Arc::new(g),
        Err(e) => {
            report.target.push(e.to_string());
            return report;
        }
    };
    match crate::od::recognize_simple_n_od(&t, Some(&cand.branch)) {
        Ok(od) => report.arm_count = Some(od.arm_count()),
        Err(e) => report.target.push(e.to_string()),
    }
    let dom = phi.domain();
    let cod = phi.codomain();
    let alpha = check_assignment("alpha", dom, &t, &cand.alpha, &mut report.alpha);
    let beta = check_assignment("beta", &t, cod, &cand.beta, &mut report.beta);
    if let (Some(alpha), Some(beta)) = (&alpha, &beta) {
        for x in 0..dom.vertex_count() {
            if beta[alpha[x]] != phi.at(x) {
                report.composition.push(format!(
                    "beta(alpha({})) = {} but phi gives {}",
                    dom.name(x),
                    cod.name(beta[alpha[x]]),
                    cod.name(phi.at(x))
                ));
            }
        }
        let mut hit = vec![false; t.vertex_count()];
        alpha.iter().for_each(|&y| hit[y] = true);
        report.alpha_surjective = hit.iter().all(|&h| h);
    }
    if anchored {
        match (&beta, t.index_of(&cand.branch)) {
            (Some(beta), Some(s0)) if cod.name(beta[s0]).as_str() == "v0" => {}
            (Some(beta), Some(s0)) => {
                report.anchor.push(format!("beta sends the branch {} to {}, not v0", cand.branch, cod.name(beta[s0])))
            }
            _ => report.anchor.push("branch or beta undefined".into()),
        }
    }
    report
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Strategy {
    Congruence,
    Lift,
}

impl Strategy {
    pub fn name(self) -> &'static str {
        match self {
            Strategy::Congruence => "congruence",
            Strategy::Lift => "lift",
        }
    }
}

#[derive(Clone, Debug)]
pub struct SearchOptions {
    pub k_max: usize,
    pub anchored: bool,
    pub strategy: Strategy,
    pub execution: Execution,
    pub timeout: Option<Duration>,
    pub node_budget: Option<u64>,
}

impl SearchOptions {
    pub fn new(k_max: usize, anchored: bool, strategy: Strategy) -> Self {
        SearchOptions { k_max, anchored, strategy, execution: Execution::Parallel, timeout: None, node_budget: None }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct SearchStats {
    /// Search-tree nodes visited.
    pub nodes: u64,
    /// Complete quotients reached (before canonical filtering).
    pub candidates: u64,
    pub pruned_degree: u64,
    pub pruned_anchor: u64,
    pub pruned_bound: u64,
    pub pruned_arm_length: u64,
    /// Parallel work units (top-level branches or roots).
    pub work_units: u64,
}

impl SearchStats {
    fn absorb(&mut self, o: &SearchStats) {
        self.nodes += o.nodes;
        self.candidates += o.candidates;
        self.pruned_degree += o.pruned_degree;
        self.pruned_anchor += o.pruned_anchor;
        self.pruned_bound += o.pruned_bound;
        self.pruned_arm_length += o.pruned_arm_length;
        self.work_units += o.work_units;
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SearchBounds {
    pub k_max: usize,
    pub anchored: bool,
    /// Largest arm length admitted for `T`.
    pub arm_length_bound: usize,
    pub domain_vertices: usize,
    pub domain_edges: usize,
}

/// Record that the declared bounds were enumerated to the end.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExhaustionCertificate {
    pub strategy: Strategy,
    pub candidates: u64,
    pub stats: SearchStats,
    pub bounds: SearchBounds,
    /// Milliseconds; kept out of deterministic stdout output.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_clock_ms: Option<u128>,
}

impl ExhaustionCertificate {
    pub fn with_wall_clock(mut self, ms: u128) -> Self {
        self.wall_clock_ms = Some(ms);
        self
    }
}

#[derive(Clone, Debug)]
pub enum SearchOutcome {
    Found { witness: Factorization, stats: SearchStats, bounds: SearchBounds },
    Refuted(ExhaustionCertificate),
    Inconclusive { reason: String, stats: SearchStats, bounds: SearchBounds },
}

impl SearchOutcome {
    pub fn verdict(&self) -> Verdict {
        match self {
            SearchOutcome::Found { .. } => Verdict::Found,
            SearchOutcome::Refuted(_) => Verdict::Refuted,
            SearchOutcome::Inconclusive { .. } => Verdict::Inconclusive,
        }
    }

    pub fn witness(&self) -> Option<&Factorization> {
        match self {
            SearchOutcome::Found { witness, .. } => Some(witness),
            _ => None,
        }
    }

    pub fn stats(&self) -> &SearchStats {
        match self {
            SearchOutcome::Found { stats, .. } | SearchOutcome::Inconclusive { stats, .. } => stats,
            SearchOutcome::Refuted(c) => &c.stats,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Verdict {
    Found,
    Refuted,
    Inconclusive,
}

type Key = (usize, usize, Vec<Vec<usize>>, Vec<usize>);

/// Canonical form of a complete candidate.
#[derive(Clone, Debug)]
struct Canon {
    key: Key,
    beta: Vec<usize>,
    edges: Vec<(usize, usize)>,
    arms: Vec<Vec<usize>>,
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

/// Smallest key over admissible branch choices and relabelings, or `None`
/// when `T` is not an admissible simple-≤k-od.
fn canonicalize(adj: &[Vec<usize>], beta: &[usize], alpha: &[usize], v0: usize, k_max: usize, anchored: bool) -> Option<Canon> {
    let high: Vec<usize> = (0..adj.len()).filter(|&t| adj[t].len() >= 3).collect();
    let centers: Vec<usize> = match high.as_slice() {
        [] => (0..adj.len()).filter(|&t| adj[t].len() <= k_max && (!anchored || beta[t] == v0)).collect(),
        [s] if adj[*s].len() <= k_max && (!anchored || beta[*s] == v0) => vec![*s],
        _ => return None,
    };
    let edge_count = adj.len() - 1;
    let mut best: Option<Canon> = None;
    for s0 in centers {
        let mut arms: Vec<Vec<usize>> = adj[s0]
            .iter()
            .map(|&first| {
                let mut arm = vec![first];
                let mut prev = s0;
                while adj[*arm.last().unwrap()].len() == 2 {
                    let cur = *arm.last().unwrap();
                    let next = if adj[cur][0] == prev { adj[cur][1] } else { adj[cur][0] };
                    prev = cur;
                    arm.push(next);
                }
                arm
            })
            .collect();
        let enc = |arm: &Vec<usize>| arm.iter().map(|&t| beta[t]).collect::<Vec<_>>();
        arms.sort_by_key(enc);
        let encodings: Vec<Vec<usize>> = arms.iter().map(enc).collect();
        // groups of arms with equal images may be relabeled freely
        let mut groups: Vec<(usize, usize)> = Vec::new();
        let mut start = 0;
        for k in 1..=arms.len() {
            if k == arms.len() || encodings[k] != encodings[start] {
                groups.push((start, k));
                start = k;
            }
        }
        let mut orders: Vec<Vec<usize>> = vec![vec![]];
        for &(a, b) in &groups {
            let perms = permutations(b - a);
            orders = orders
                .into_iter()
                .flat_map(|o| perms.iter().map(move |p| o.iter().copied().chain(p.iter().map(|&x| x + a)).collect()))
                .collect();
        }
        for order in orders {
            let mut relabel = vec![0usize; adj.len()];
            let mut next = 1;
            let mut new_arms = Vec::new();
            for &ai in &order {
                let mut arm = vec![0];
                for &t in &arms[ai] {
                    relabel[t] = next;
                    arm.push(next);
                    next += 1;
                }
                new_arms.push(arm);
            }
            relabel[s0] = 0;
            let alpha_vec: Vec<usize> = alpha.iter().map(|&t| relabel[t]).collect();
            let key = (adj[s0].len(), edge_count, encodings.clone(), alpha_vec);
            if best.as_ref().is_some_and(|b| b.key <= key) {
                continue;
            }
            let mut new_beta = vec![0; adj.len()];
            for t in 0..adj.len() {
                new_beta[relabel[t]] = beta[t];
            }
            let mut edges = Vec::new();
            for arm in &new_arms {
                for w in arm.windows(2) {
                    edges.push((w[0], w[1]));
                }
            }
            best = Some(Canon { key, beta: new_beta, edges, arms: new_arms });
        }
    }
    best
}

fn build_witness(phi: &SimplicialMap, c: &Canon) -> Result<Factorization> {
    let names: Vec<VertexId> = (0..c.beta.len()).map(|i| VertexId::indexed("t", i)).collect();
    let g = Arc::new(Graph::new(names.iter().cloned(), c.edges.iter().map(|&(x, y)| (names[x].clone(), names[y].clone())))?);
    let arms: Vec<crate::graph::Walk> = c.arms.iter().map(|a| crate::graph::Walk(a.iter().map(|&t| names[t].clone()).collect())).collect();
    let target = SimpleNOd::from_arms(g.clone(), &names[0], &arms)?;
    let remap = |t: usize| g.index_of(&names[t]).unwrap();
    let alpha = SimplicialMap::from_indices(phi.domain().clone(), g.clone(), c.key.3.iter().map(|&t| remap(t)).collect())?;
    let mut beta = vec![0; g.vertex_count()];
    for (t, &b) in c.beta.iter().enumerate() {
        beta[remap(t)] = b;
    }
    let beta = SimplicialMap::from_indices(g, phi.codomain().clone(), beta)?;
    Ok(Factorization { target, alpha, beta })
}

struct Control {
    stop: AtomicBool,
    deadline: Option<Instant>,
    budget: Option<u64>,
    spent: AtomicU64,
}

impl Control {
    fn new(opts: &SearchOptions) -> Self {
        Control {
            stop: AtomicBool::new(false),
            deadline: opts.timeout.map(|t| Instant::now() + t),
            budget: opts.node_budget,
            spent: AtomicU64::new(0),
        }
    }

    fn check(&self, nodes: u64) -> bool {
        if self.stop.load(Ordering::Relaxed) {
            return false;
        }
        if nodes.is_multiple_of(1024) && self.deadline.is_some_and(|d| Instant::now() >= d) {
            self.stop.store(true, Ordering::Relaxed);
            return false;
        }
        if let Some(b) = self.budget {
            if self.spent.fetch_add(1, Ordering::Relaxed) >= b {
                self.stop.store(true, Ordering::Relaxed);
                return false;
            }
        }
        true
    }
}

struct Problem<'a> {
    phi: &'a SimplicialMap,
    v0: usize,
    k_max: usize,
    anchored: bool,
}

/// Breadth-first order and parents from `root`.
fn bfs(g: &Graph, root: usize) -> (Vec<usize>, Vec<usize>, Vec<usize>) {
    let mut order = vec![root];
    let mut parent = vec![usize::MAX; g.vertex_count()];
    let mut depth = vec![0; g.vertex_count()];
    parent[root] = root;
    let mut q = VecDeque::from([root]);
    while let Some(x) = q.pop_front() {
        for &y in g.neighbors(x) {
            if parent[y] == usize::MAX {
                parent[y] = x;
                depth[y] = depth[x] + 1;
                order.push(y);
                q.push_back(y);
            }
        }
    }
    (order, parent, depth)
}

// ---- congruence search ----

#[derive(Clone)]
struct Quotient {
    class_of: Vec<usize>,
    adj: Vec<Vec<usize>>,
    beta: Vec<usize>,
}

struct Congruence<'a> {
    prob: &'a Problem<'a>,
    order: Vec<usize>,
    parent: Vec<usize>,
    ctl: &'a Control,
    stats: SearchStats,
    best: Option<Canon>,
}

impl Congruence<'_> {
    fn lower_k(&self, q: &Quotient) -> usize {
        q.adj.iter().map(Vec::len).filter(|&d| d >= 3).max().unwrap_or(1)
    }

    fn bounded_out(&mut self, q: &Quotient) -> bool {
        if let Some(b) = &self.best {
            let lb = (self.lower_k(q), q.adj.len() - 1);
            if lb > (b.key.0, b.key.1) {
                self.stats.pruned_bound += 1;
                return true;
            }
        }
        false
    }

    /// Degree constraints after class `t` gained an edge.
    fn degree_ok(&mut self, q: &Quotient, t: usize) -> bool {
        let d = q.adj[t].len();
        let cap = if self.prob.k_max >= 3 { self.prob.k_max } else { 2 };
        if d > cap {
            self.stats.pruned_degree += 1;
            return false;
        }
        if d >= 3 {
            if q.adj.iter().enumerate().any(|(s, a)| s != t && a.len() >= 3) {
                self.stats.pruned_degree += 1;
                return false;
            }
            if self.prob.anchored && q.beta[t] != self.prob.v0 {
                self.stats.pruned_anchor += 1;
                return false;
            }
        }
        true
    }

    fn run(&mut self, q: &mut Quotient, pos: usize) {
        self.stats.nodes += 1;
        if !self.ctl.check(self.stats.nodes) {
            return;
        }
        if pos == self.order.len() {
            self.stats.candidates += 1;
            let p = self.prob;
            if let Some(c) = canonicalize(&q.adj, &q.beta, &q.class_of, p.v0, p.k_max, p.anchored) {
                if self.best.as_ref().is_none_or(|b| c.key < b.key) {
                    self.best = Some(c);
                }
            } else {
                self.stats.pruned_anchor += 1;
            }
            return;
        }
        let x = self.order[pos];
        let t = q.class_of[self.parent[x]];
        let want = self.prob.phi.at(x);
        let options: Vec<usize> = q.adj[t].iter().copied().filter(|&s| q.beta[s] == want).collect();
        for s in options {
            q.class_of[x] = s;
            self.run(q, pos + 1);
        }
        // new leaf class
        let c = q.adj.len();
        q.adj.push(vec![t]);
        q.adj[t].push(c);
        q.beta.push(want);
        q.class_of[x] = c;
        if self.degree_ok(q, t) && !self.bounded_out(q) {
            self.run(q, pos + 1);
        }
        q.adj[t].pop();
        q.adj.pop();
        q.beta.pop();
        q.class_of[x] = usize::MAX;
    }
}

fn congruence_search(prob: &Problem, exec: Execution, ctl: &Control) -> (Option<Canon>, SearchStats) {
    let dom = prob.phi.domain();
    let root = (0..dom.vertex_count()).max_by_key(|&x| (dom.degree(x), std::cmp::Reverse(x))).unwrap();
    let (order, parent, _) = bfs(dom, root);
    let mut q0 = Quotient { class_of: vec![usize::MAX; dom.vertex_count()], adj: vec![vec![]], beta: vec![prob.phi.at(root)] };
    q0.class_of[root] = 0;

    // expand the first levels sequentially into independent work units
    let mut frontier: Vec<(Quotient, usize)> = vec![(q0, 1)];
    let mut split = SearchStats::default();
    while frontier.len() < 64 && frontier.iter().any(|(_, pos)| *pos < order.len()) {
        let mut next = Vec::new();
        for (q, pos) in frontier {
            if pos == order.len() {
                next.push((q, pos));
                continue;
            }
            split.nodes += 1;
            let x = order[pos];
            let t = q.class_of[parent[x]];
            let want = prob.phi.at(x);
            for &s in q.adj[t].iter().filter(|&&s| q.beta[s] == want) {
                let mut q2 = q.clone();
                q2.class_of[x] = s;
                next.push((q2, pos + 1));
            }
            let mut q2 = q.clone();
            let c = q2.adj.len();
            q2.adj.push(vec![t]);
            q2.adj[t].push(c);
            q2.beta.push(want);
            q2.class_of[x] = c;
            let mut probe = Congruence { prob, order: vec![], parent: vec![], ctl, stats: SearchStats::default(), best: None };
            if probe.degree_ok(&q2, t) {
                next.push((q2, pos + 1));
            }
            split.absorb(&probe.stats);
        }
        frontier = next;
    }
    let results = par::map(exec, &frontier, |(q, pos)| {
        let mut s = Congruence { prob, order: order.clone(), parent: parent.clone(), ctl, stats: SearchStats::default(), best: None };
        let mut q = q.clone();
        s.run(&mut q, *pos);
        s.stats.work_units = 1;
        (s.best, s.stats)
    });
    let mut stats = split;
    let mut best: Option<Canon> = None;
    for (b, s) in results {
        stats.absorb(&s);
        if let Some(b) = b {
            if best.as_ref().is_none_or(|x| b.key < x.key) {
                best = Some(b);
            }
        }
    }
    (best, stats)
}

// ---- lift search ----

struct Spider {
    /// Per T-vertex: (arm, position); the center is (usize::MAX, 0).
    place: Vec<(usize, usize)>,
    arms: Vec<Vec<usize>>,
    beta: Vec<usize>,
    alpha: Vec<usize>,
}

impl Spider {
    fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.beta.len()];
        for arm in &self.arms {
            let mut prev = 0;
            for &t in arm {
                adj[prev].push(t);
                adj[t].push(prev);
                prev = t;
            }
        }
        adj
    }
}

struct Lift<'a> {
    prob: &'a Problem<'a>,
    order: Vec<usize>,
    parent: Vec<usize>,
    arm_bound: usize,
    ctl: &'a Control,
    stats: SearchStats,
    best: Option<Canon>,
}

impl Lift<'_> {
    fn bounded_out(&mut self, sp: &Spider) -> bool {
        if let Some(b) = &self.best {
            let k = if sp.arms.len() >= 3 { sp.arms.len() } else { 1 };
            if (k, sp.beta.len() - 1) > (b.key.0, b.key.1) {
                self.stats.pruned_bound += 1;
                return true;
            }
        }
        false
    }

    fn assign_and_recurse(&mut self, sp: &mut Spider, pos: usize, x: usize, t: usize) {
        sp.alpha[x] = t;
        self.run(sp, pos + 1);
        sp.alpha[x] = usize::MAX;
    }

    fn run(&mut self, sp: &mut Spider, pos: usize) {
        self.stats.nodes += 1;
        if !self.ctl.check(self.stats.nodes) {
            return;
        }
        if pos == self.order.len() {
            self.stats.candidates += 1;
            let p = self.prob;
            if let Some(c) = canonicalize(&sp.adjacency(), &sp.beta, &sp.alpha, p.v0, p.k_max, p.anchored) {
                if self.best.as_ref().is_none_or(|b| c.key < b.key) {
                    self.best = Some(c);
                }
            } else {
                self.stats.pruned_anchor += 1;
            }
            return;
        }
        let x = self.order[pos];
        let t = sp.alpha[self.parent[x]];
        let want = self.prob.phi.at(x);
        let (arm, at) = sp.place[t];
        if t == 0 {
            for a in 0..sp.arms.len() {
                let f = sp.arms[a][0];
                if sp.beta[f] == want {
                    self.assign_and_recurse(sp, pos, x, f);
                }
            }
            if sp.arms.len() < self.prob.k_max {
                let c = sp.beta.len();
                sp.beta.push(want);
                sp.place.push((sp.arms.len(), 1));
                sp.arms.push(vec![c]);
                if !self.bounded_out(sp) {
                    self.assign_and_recurse(sp, pos, x, c);
                }
                sp.arms.pop();
                sp.place.pop();
                sp.beta.pop();
            } else {
                self.stats.pruned_degree += 1;
            }
            return;
        }
        let inward = if at == 1 { 0 } else { sp.arms[arm][at - 2] };
        if sp.beta[inward] == want {
            self.assign_and_recurse(sp, pos, x, inward);
        }
        if at < sp.arms[arm].len() {
            let outward = sp.arms[arm][at];
            if sp.beta[outward] == want {
                self.assign_and_recurse(sp, pos, x, outward);
            }
        } else if at + 1 > self.arm_bound {
            self.stats.pruned_arm_length += 1;
        } else {
            let c = sp.beta.len();
            sp.beta.push(want);
            sp.place.push((arm, at + 1));
            sp.arms[arm].push(c);
            if !self.bounded_out(sp) {
                self.assign_and_recurse(sp, pos, x, c);
            }
            sp.arms[arm].pop();
            sp.place.pop();
            sp.beta.pop();
        }
    }
}

fn lift_search(prob: &Problem, exec: Execution, ctl: &Control) -> (Option<Canon>, SearchStats, usize) {
    let dom = prob.phi.domain();
    let roots: Vec<usize> = (0..dom.vertex_count()).filter(|&r| !prob.anchored || prob.phi.at(r) == prob.v0).collect();
    let arm_bound_max = roots.iter().map(|&r| *dom.distances_from(r).iter().max().unwrap()).max().unwrap_or(0);
    let results = par::map(exec, &roots, |&r| {
        let (order, parent, depth) = bfs(dom, r);
        let arm_bound = *depth.iter().max().unwrap();
        let mut s = Lift { prob, order, parent, arm_bound, ctl, stats: SearchStats::default(), best: None };
        let mut sp = Spider {
            place: vec![(usize::MAX, 0)],
            arms: Vec::new(),
            beta: vec![prob.phi.at(r)],
            alpha: vec![usize::MAX; dom.vertex_count()],
        };
        sp.alpha[r] = 0;
        s.run(&mut sp, 1);
        s.stats.work_units = 1;
        (s.best, s.stats)
    });
    let mut stats = SearchStats::default();
    let mut best: Option<Canon> = None;
    for (b, s) in results {
        stats.absorb(&s);
        if let Some(b) = b {
            if best.as_ref().is_none_or(|x| b.key < x.key) {
                best = Some(b);
            }
        }
    }
    (best, stats, arm_bound_max)
}

/// Complete search for a factorization of `phi` through a simple-k-od with
/// `k ≤ k_max` (branch over `v0` when anchored).
pub fn search_factorization(phi: &SimplicialMap, opts: &SearchOptions) -> Result<SearchOutcome> {
    let dom = phi.domain();
    if !dom.is_tree() {
        return Err(Error::Precondition("domain must be a tree".into()));
    }
    if !phi.is_light() || !phi.is_surjective() {
        return Err(Error::Precondition("map must be light and surjective".into()));
    }
    if opts.k_max == 0 {
        return Err(Error::Precondition("k_max must be positive".into()));
    }
    let v0 = phi.codomain().index_of(&VertexId::new("v0")).ok_or_else(|| Error::Precondition("codomain has no v0".into()))?;
    let prob = Problem { phi, v0, k_max: opts.k_max, anchored: opts.anchored };
    let ctl = Control::new(opts);
    let (best, stats, arm_bound) = par::with_jobs(opts.execution, 0, || match opts.strategy {
        Strategy::Congruence => {
            let (b, s) = congruence_search(&prob, opts.execution, &ctl);
            (b, s, dom.edge_count())
        }
        Strategy::Lift => lift_search(&prob, opts.execution, &ctl),
    });
    let bounds = SearchBounds {
        k_max: opts.k_max,
        anchored: opts.anchored,
        arm_length_bound: arm_bound,
        domain_vertices: dom.vertex_count(),
        domain_edges: dom.edge_count(),
    };
    if ctl.stop.load(Ordering::Relaxed) {
        let reason =
            if opts.timeout.is_some() && ctl.deadline.is_some_and(|d| Instant::now() >= d) { "timeout" } else { "node budget exhausted" };
        return Ok(SearchOutcome::Inconclusive { reason: reason.into(), stats, bounds });
    }
    Ok(match best {
        Some(c) => SearchOutcome::Found { witness: build_witness(phi, &c)?, stats, bounds },
        None => SearchOutcome::Refuted(ExhaustionCertificate {
            strategy: opts.strategy,
            candidates: stats.candidates,
            stats,
            bounds,
            wall_clock_ms: None,
        }),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct ReportRow {
    pub k: usize,
    pub verdicts: BTreeMap<String, Verdict>,
    pub agree: bool,
    #[serde(skip)]
    pub outcomes: Vec<(Strategy, SearchOutcome, u128)>,
}

/// Anchored searches on `Φ₀ᵐ` of the family system for each `k`, under each
/// requested strategy.
pub fn claim16_report(n: usize, m: usize, ks: &[usize], strategies: &[Strategy], base: &SearchOptions) -> Result<Vec<ReportRow>> {
    if n < 3 || m < 1 {
        return Err(Error::Precondition("need n >= 3 and m >= 1".into()));
    }
    let mut sys = crate::patterns::PatternSystem::new(n)?;
    sys.extend_to(m)?;
    let phi = sys.system().composite(0, m)?;
    let mut rows = Vec::new();
    for &k in ks {
        let mut verdicts = BTreeMap::new();
        let mut outcomes = Vec::new();
        for &s in strategies {
            let opts = SearchOptions { k_max: k, anchored: true, strategy: s, ..base.clone() };
            let start = Instant::now();
            let out = search_factorization(&phi, &opts)?;
            verdicts.insert(s.name().to_string(), out.verdict());
            outcomes.push((s, out, start.elapsed().as_millis()));
        }
        let agree = verdicts.values().all(|v| Some(v) == verdicts.values().next());
        rows.push(ReportRow { k, verdicts, agree, outcomes });
    }
    Ok(rows)
}

/// Writes one JSON file per (k, strategy) into `dir`: the exhaustion
/// certificate with its wall-clock time, or the witness.
pub fn persist_report(n: usize, m: usize, rows: &[ReportRow], dir: &std::path::Path) -> Result<Vec<std::path::PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    for row in rows {
        for (s, out, ms) in &row.outcomes {
            let body = match out {
                SearchOutcome::Found { witness, stats, bounds } => serde_json::json!({
                    "verdict": Verdict::Found, "witness": witness.to_raw(), "stats": stats, "bounds": bounds,
                }),
                SearchOutcome::Refuted(cert) => serde_json::json!({
                    "verdict": Verdict::Refuted, "certificate": cert.clone().with_wall_clock(*ms),
                }),
                SearchOutcome::Inconclusive { reason, stats, bounds } => serde_json::json!({
                    "verdict": Verdict::Inconclusive, "reason": reason, "stats": stats, "bounds": bounds,
                }),
            };
            let doc = serde_json::json!({ "n": n, "m": m, "k": row.k, "strategy": s, "wall_clock_ms": ms, "result": body });
            let path = dir.join(format!("n{n}_m{m}_k{}_{}.json", row.k, s.name()));
            std::fs::write(&path, serde_json::to_string_pretty(&doc)? + "\n")?;
            written.push(path);
        }
    }
    Ok(written)
}
