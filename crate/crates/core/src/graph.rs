//! Finite simple graphs over symbolic vertex identifiers.
//!
//! Vertices are stored in canonical order (see [`VertexId`]) and addressed
//! internally by their position in that order, so every iteration over a
//! [`Graph`] is deterministic. Edges are kept sorted by their endpoint
//! indices, which is the canonical edge order used throughout the crate.

use std::cmp::Ordering;
use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A symbolic vertex name such as `v0`, `u13` or `v0-u1#2`.
///
/// Ordering is "natural": the name is split into alternating runs of
/// non-digits and digits, non-digit runs compare as strings and digit runs
/// compare numerically. For names of the form `<prefix><number>` this is the
/// (alphabetic prefix, numeric suffix) order.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VertexId(String);

impl VertexId {
    pub fn new(name: impl Into<String>) -> Self {
        VertexId(name.into())
    }

    /// `prefix` immediately followed by `index`, e.g. `VertexId::indexed("v", 3)`.
    pub fn indexed(prefix: &str, index: usize) -> Self {
        VertexId(format!("{prefix}{index}"))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Debug for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for VertexId {
    fn from(s: &str) -> Self {
        VertexId(s.to_owned())
    }
}

impl From<String> for VertexId {
    fn from(s: String) -> Self {
        VertexId(s)
    }
}

impl From<&VertexId> for VertexId {
    fn from(v: &VertexId) -> Self {
        v.clone()
    }
}

impl Ord for VertexId {
    fn cmp(&self, other: &Self) -> Ordering {
        natural_cmp(&self.0, &other.0)
    }
}

impl PartialOrd for VertexId {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

fn natural_cmp(a: &str, b: &str) -> Ordering {
    let (mut a, mut b) = (a.as_bytes(), b.as_bytes());
    loop {
        match (a.is_empty(), b.is_empty()) {
            (true, true) => return Ordering::Equal,
            (true, false) => return Ordering::Less,
            (false, true) => return Ordering::Greater,
            _ => {}
        }
        let a_digit = a[0].is_ascii_digit();
        let b_digit = b[0].is_ascii_digit();
        if a_digit != b_digit {
            // digits sort before letters, as in plain byte order
            return if a_digit { Ordering::Less } else { Ordering::Greater };
        }
        let la = a.iter().take_while(|c| c.is_ascii_digit() == a_digit).count();
        let lb = b.iter().take_while(|c| c.is_ascii_digit() == b_digit).count();
        let (ra, rb) = (&a[..la], &b[..lb]);
        let ord = if a_digit {
            let ta = trim_zeros(ra);
            let tb = trim_zeros(rb);
            ta.len().cmp(&tb.len()).then_with(|| ta.cmp(tb)).then_with(|| la.cmp(&lb))
        } else {
            ra.cmp(rb)
        };
        if ord != Ordering::Equal {
            return ord;
        }
        a = &a[la..];
        b = &b[lb..];
    }
}

fn trim_zeros(s: &[u8]) -> &[u8] {
    let k = s.iter().take_while(|&&c| c == b'0').count();
    &s[k..]
}

/// The JSON shape of a graph: `{"vertices":[...],"edges":[[a,b],...]}`.
///
/// A `RawGraph` may violate any graph invariant; [`validate_graph`] reports
/// which ones.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawGraph {
    pub vertices: Vec<VertexId>,
    pub edges: Vec<[VertexId; 2]>,
}

/// One violated graph invariant.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    Empty,
    DuplicateVertex { vertex: VertexId },
    SelfLoop { vertex: VertexId },
    UnknownEndpoint { edge: [VertexId; 2], vertex: VertexId },
    DuplicateEdge { edge: [VertexId; 2] },
    Disconnected { components: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Empty => write!(f, "graph has no vertices"),
            Violation::DuplicateVertex { vertex } => write!(f, "vertex {vertex} listed twice"),
            Violation::SelfLoop { vertex } => write!(f, "self-loop at {vertex}"),
            Violation::UnknownEndpoint { edge, vertex } => {
                write!(f, "edge {}-{} uses unlisted vertex {vertex}", edge[0], edge[1])
            }
            Violation::DuplicateEdge { edge } => write!(f, "edge {}-{} listed twice", edge[0], edge[1]),
            Violation::Disconnected { components } => {
                write!(f, "graph is disconnected ({components} components)")
            }
        }
    }
}

/// Reports every violated invariant of `raw`; an empty report means valid.
pub fn validate_graph(raw: &RawGraph) -> Vec<Violation> {
    let mut report = Vec::new();
    if raw.vertices.is_empty() {
        report.push(Violation::Empty);
    }
    let mut index = HashMap::new();
    for v in &raw.vertices {
        let next = index.len();
        if index.contains_key(v) {
            report.push(Violation::DuplicateVertex { vertex: v.clone() });
        } else {
            index.insert(v.clone(), next);
        }
    }
    let mut seen = BTreeSet::new();
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); index.len()];
    for [a, b] in &raw.edges {
        if a == b {
            report.push(Violation::SelfLoop { vertex: a.clone() });
            continue;
        }
        let mut known = true;
        for v in [a, b] {
            if !index.contains_key(v) {
                report.push(Violation::UnknownEndpoint { edge: [a.clone(), b.clone()], vertex: v.clone() });
                known = false;
            }
        }
        if !known {
            continue;
        }
        let (x, y) = (index[a], index[b]);
        let key = (x.min(y), x.max(y));
        if !seen.insert(key) {
            report.push(Violation::DuplicateEdge { edge: [a.clone(), b.clone()] });
            continue;
        }
        adj[x].push(y);
        adj[y].push(x);
    }
    if !adj.is_empty() {
        let components = count_components(&adj);
        if components > 1 {
            report.push(Violation::Disconnected { components });
        }
    }
    report
}

fn count_components(adj: &[Vec<usize>]) -> usize {
    let mut seen = vec![false; adj.len()];
    let mut components = 0;
    for start in 0..adj.len() {
        if seen[start] {
            continue;
        }
        components += 1;
        seen[start] = true;
        let mut stack = vec![start];
        while let Some(x) = stack.pop() {
            for &y in &adj[x] {
                if !seen[y] {
                    seen[y] = true;
                    stack.push(y);
                }
            }
        }
    }
    components
}

/// A finite, simple, connected graph.
#[derive(Clone)]
pub struct Graph {
    names: Vec<VertexId>,
    index: HashMap<VertexId, usize>,
    edges: Vec<(usize, usize)>,
    edge_index: HashMap<(usize, usize), usize>,
    adj: Vec<Vec<usize>>,
}

impl PartialEq for Graph {
    fn eq(&self, other: &Self) -> bool {
        self.names == other.names && self.edges == other.edges
    }
}

impl Eq for Graph {}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Graph")
            .field("vertices", &self.names)
            .field("edges", &self.edges.iter().map(|&(a, b)| (&self.names[a], &self.names[b])).collect::<Vec<_>>())
            .finish()
    }
}

impl Graph {
    /// Builds a graph, rejecting it with the full violation report if any
    /// invariant fails.
    pub fn new<V, A, B>(vertices: impl IntoIterator<Item = V>, edges: impl IntoIterator<Item = (A, B)>) -> Result<Self>
    where
        V: Into<VertexId>,
        A: Into<VertexId>,
        B: Into<VertexId>,
    {
        let raw = RawGraph {
            vertices: vertices.into_iter().map(Into::into).collect(),
            edges: edges.into_iter().map(|(a, b)| [a.into(), b.into()]).collect(),
        };
        Self::from_raw(&raw)
    }

    pub fn from_raw(raw: &RawGraph) -> Result<Self> {
        let report = validate_graph(raw);
        if !report.is_empty() {
            return Err(Error::InvalidGraph(report));
        }
        Ok(Self::assemble(raw.vertices.clone(), raw.edges.iter().map(|[a, b]| (a.clone(), b.clone()))))
    }

    /// Builds a graph from data already known to be valid.
    pub(crate) fn assemble(mut names: Vec<VertexId>, edges: impl IntoIterator<Item = (VertexId, VertexId)>) -> Self {
        names.sort();
        let index: HashMap<VertexId, usize> = names.iter().cloned().enumerate().map(|(i, v)| (v, i)).collect();
        let mut list: Vec<(usize, usize)> = edges
            .into_iter()
            .map(|(a, b)| {
                let (x, y) = (index[&a], index[&b]);
                (x.min(y), x.max(y))
            })
            .collect();
        list.sort_unstable();
        list.dedup();
        Self::from_indexed(names, index, list)
    }

    /// Builds a graph whose vertex names are already sorted canonically and
    /// whose edges are index pairs into that order.
    pub(crate) fn from_sorted_indexed(names: Vec<VertexId>, mut edges: Vec<(usize, usize)>) -> Self {
        debug_assert!(names.windows(2).all(|w| w[0] < w[1]));
        for e in edges.iter_mut() {
            *e = (e.0.min(e.1), e.0.max(e.1));
        }
        edges.sort_unstable();
        edges.dedup();
        let index = names.iter().cloned().enumerate().map(|(i, v)| (v, i)).collect();
        Self::from_indexed(names, index, edges)
    }

    fn from_indexed(names: Vec<VertexId>, index: HashMap<VertexId, usize>, edges: Vec<(usize, usize)>) -> Self {
        let mut adj = vec![Vec::new(); names.len()];
        let mut edge_index = HashMap::with_capacity(edges.len());
        for (k, &(a, b)) in edges.iter().enumerate() {
            adj[a].push(b);
            adj[b].push(a);
            edge_index.insert((a, b), k);
        }
        for list in adj.iter_mut() {
            list.sort_unstable();
        }
        Graph { names, index, edges, edge_index, adj }
    }

    pub fn vertex_count(&self) -> usize {
        self.names.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Vertex names in canonical order.
    pub fn vertices(&self) -> &[VertexId] {
        &self.names
    }

    pub fn name(&self, v: usize) -> &VertexId {
        &self.names[v]
    }

    pub fn index_of(&self, v: &VertexId) -> Option<usize> {
        self.index.get(v).copied()
    }

    pub(crate) fn idx(&self, v: &VertexId) -> Result<usize> {
        self.index_of(v).ok_or_else(|| Error::UnknownVertex(v.clone()))
    }

    pub fn contains(&self, v: &VertexId) -> bool {
        self.index.contains_key(v)
    }

    /// Edges as index pairs `(a, b)` with `a < b`, in canonical order.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn edge_names(&self, e: usize) -> (&VertexId, &VertexId) {
        let (a, b) = self.edges[e];
        (&self.names[a], &self.names[b])
    }

    /// Position of the edge `{a, b}` in canonical edge order.
    pub fn edge_id(&self, a: usize, b: usize) -> Option<usize> {
        self.edge_index.get(&(a.min(b), a.max(b))).copied()
    }

    pub fn edge_id_by_name(&self, a: &VertexId, b: &VertexId) -> Option<usize> {
        self.edge_id(self.index_of(a)?, self.index_of(b)?)
    }

    pub fn adjacent(&self, a: usize, b: usize) -> bool {
        self.edge_index.contains_key(&(a.min(b), a.max(b)))
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn is_tree(&self) -> bool {
        self.edges.len() + 1 == self.names.len()
    }

    pub fn to_raw(&self) -> RawGraph {
        RawGraph {
            vertices: self.names.clone(),
            edges: self.edges.iter().map(|&(a, b)| [self.names[a].clone(), self.names[b].clone()]).collect(),
        }
    }

    /// Breadth-first distances from `source`.
    pub fn distances_from(&self, source: usize) -> Vec<usize> {
        let mut dist = vec![usize::MAX; self.names.len()];
        dist[source] = 0;
        let mut queue = VecDeque::from([source]);
        while let Some(x) = queue.pop_front() {
            for &y in &self.adj[x] {
                if dist[y] == usize::MAX {
                    dist[y] = dist[x] + 1;
                    queue.push_back(y);
                }
            }
        }
        dist
    }

    /// The unique path between two vertices of a tree, or a shortest path in
    /// general, choosing the canonically least predecessor at every step.
    pub fn shortest_path(&self, from: usize, to: usize) -> Vec<usize> {
        let dist = self.distances_from(to);
        let mut path = vec![from];
        let mut x = from;
        while x != to {
            x = *self.adj[x].iter().find(|&&y| dist[y] + 1 == dist[x]).expect("connected");
            path.push(x);
        }
        path
    }

    /// Whether the vertices in `set` induce a connected subgraph.
    pub fn induces_connected(&self, set: &[usize]) -> bool {
        if set.len() <= 1 {
            return true;
        }
        let members: BTreeSet<usize> = set.iter().copied().collect();
        let mut seen = BTreeSet::from([set[0]]);
        let mut stack = vec![set[0]];
        while let Some(x) = stack.pop() {
            for &y in &self.adj[x] {
                if members.contains(&y) && seen.insert(y) {
                    stack.push(y);
                }
            }
        }
        seen.len() == members.len()
    }
}

/// An ordered vertex sequence relative to some host graph. Consecutive
/// entries must be adjacent there; immediate backtracking is allowed.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Walk(pub Vec<VertexId>);

impl Walk {
    pub fn new<V: Into<VertexId>>(vertices: impl IntoIterator<Item = V>) -> Self {
        Walk(vertices.into_iter().map(Into::into).collect())
    }

    pub fn vertices(&self) -> &[VertexId] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Number of steps, one less than the vertex count.
    pub fn length(&self) -> usize {
        self.0.len().saturating_sub(1)
    }

    pub fn first(&self) -> Option<&VertexId> {
        self.0.first()
    }

    pub fn last(&self) -> Option<&VertexId> {
        self.0.last()
    }

    pub fn reversed(&self) -> Walk {
        Walk(self.0.iter().rev().cloned().collect())
    }

    /// Checks that the walk is nonempty and lives in `host`.
    pub fn check(&self, host: &Graph) -> Result<()> {
        if self.0.is_empty() {
            return Err(Error::InvalidWalk("empty walk".into()));
        }
        for v in &self.0 {
            host.idx(v)?;
        }
        for w in self.0.windows(2) {
            if host.edge_id_by_name(&w[0], &w[1]).is_none() {
                return Err(Error::InvalidWalk(format!("{} and {} are not adjacent", w[0], w[1])));
            }
        }
        Ok(())
    }

    /// Comma-separated vertex list.
    pub fn to_text(&self) -> String {
        self.0.iter().map(VertexId::as_str).collect::<Vec<_>>().join(",")
    }
}

impl fmt::Display for Walk {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{}>", self.to_text())
    }
}
