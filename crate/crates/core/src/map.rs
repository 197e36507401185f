//! Simplicial maps between graphs and their structural predicates.
//!
//! A simplicial map is a total vertex assignment sending every edge either
//! onto an edge or onto a single vertex. For such maps "monotone"
//! (connected point-preimages) is checked combinatorially: every vertex
//! fiber must induce a connected subgraph, and every codomain edge must be
//! the image of at most one domain edge. A point inside a codomain edge has
//! one preimage point per domain edge covering it, so the second condition
//! is exactly connectedness of those preimages; the first handles vertices.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Graph, RawGraph, VertexId};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimplicialMap {
    domain: Arc<Graph>,
    codomain: Arc<Graph>,
    assign: Vec<usize>,
}

/// The JSON shape of a map.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawMap {
    pub domain: RawGraph,
    pub codomain: RawGraph,
    pub assignment: BTreeMap<VertexId, VertexId>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct MapProperties {
    pub simplicial: bool,
    pub light: bool,
    pub monotone: bool,
    pub surjective: bool,
}

impl SimplicialMap {
    /// Builds a map from a name-level assignment, checking totality and
    /// simpliciality.
    pub fn new<A, B>(domain: Arc<Graph>, codomain: Arc<Graph>, assignment: impl IntoIterator<Item = (A, B)>) -> Result<Self>
    where
        A: Into<VertexId>,
        B: Into<VertexId>,
    {
        let mut assign = vec![usize::MAX; domain.vertex_count()];
        for (a, b) in assignment {
            let (a, b) = (a.into(), b.into());
            assign[domain.idx(&a)?] = codomain.idx(&b)?;
        }
        if let Some(v) = assign.iter().position(|&x| x == usize::MAX) {
            return Err(Error::NotTotal(domain.name(v).clone()));
        }
        Self::from_indices(domain, codomain, assign)
    }

    pub fn from_indices(domain: Arc<Graph>, codomain: Arc<Graph>, assign: Vec<usize>) -> Result<Self> {
        let map = SimplicialMap { domain, codomain, assign };
        if let Some((a, b)) = map.first_non_simplicial_edge() {
            let (fa, fb) = (map.assign[a], map.assign[b]);
            return Err(Error::NotSimplicial(
                map.domain.name(a).clone(),
                map.domain.name(b).clone(),
                map.codomain.name(fa).clone(),
                map.codomain.name(fb).clone(),
            ));
        }
        Ok(map)
    }

    pub(crate) fn from_indices_unchecked(domain: Arc<Graph>, codomain: Arc<Graph>, assign: Vec<usize>) -> Self {
        let map = SimplicialMap { domain, codomain, assign };
        debug_assert!(map.first_non_simplicial_edge().is_none());
        map
    }

    pub fn identity(g: Arc<Graph>) -> Self {
        let assign = (0..g.vertex_count()).collect();
        SimplicialMap { domain: g.clone(), codomain: g, assign }
    }

    pub fn from_raw(raw: &RawMap) -> Result<Self> {
        let domain = Arc::new(Graph::from_raw(&raw.domain)?);
        let codomain = Arc::new(Graph::from_raw(&raw.codomain)?);
        Self::new(domain, codomain, raw.assignment.iter().map(|(a, b)| (a.clone(), b.clone())))
    }

    pub fn to_raw(&self) -> RawMap {
        RawMap { domain: self.domain.to_raw(), codomain: self.codomain.to_raw(), assignment: self.assignment_names() }
    }

    pub fn assignment_names(&self) -> BTreeMap<VertexId, VertexId> {
        self.assign.iter().enumerate().map(|(v, &w)| (self.domain.name(v).clone(), self.codomain.name(w).clone())).collect()
    }

    fn first_non_simplicial_edge(&self) -> Option<(usize, usize)> {
        self.domain.edges().iter().copied().find(|&(a, b)| {
            let (fa, fb) = (self.assign[a], self.assign[b]);
            fa != fb && !self.codomain.adjacent(fa, fb)
        })
    }

    pub fn domain(&self) -> &Arc<Graph> {
        &self.domain
    }

    pub fn codomain(&self) -> &Arc<Graph> {
        &self.codomain
    }

    /// Image of domain vertex `v` (by index).
    pub fn at(&self, v: usize) -> usize {
        self.assign[v]
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assign
    }

    pub fn image(&self, v: &VertexId) -> Result<&VertexId> {
        Ok(self.codomain.name(self.assign[self.domain.idx(v)?]))
    }

    /// The codomain edge covered by domain edge `e`, or `None` if it collapses.
    pub fn edge_image(&self, e: usize) -> Option<usize> {
        let (a, b) = self.domain.edges()[e];
        let (fa, fb) = (self.assign[a], self.assign[b]);
        if fa == fb {
            None
        } else {
            self.codomain.edge_id(fa, fb)
        }
    }

    pub fn is_light(&self) -> bool {
        self.domain.edges().iter().all(|&(a, b)| self.assign[a] != self.assign[b])
    }

    pub fn is_surjective(&self) -> bool {
        let mut hit_v = vec![false; self.codomain.vertex_count()];
        for &w in &self.assign {
            hit_v[w] = true;
        }
        let mut hit_e = vec![false; self.codomain.edge_count()];
        for e in 0..self.domain.edge_count() {
            if let Some(d) = self.edge_image(e) {
                hit_e[d] = true;
            }
        }
        hit_v.iter().all(|&x| x) && hit_e.iter().all(|&x| x)
    }

    pub fn is_monotone(&self) -> bool {
        let mut fibers: Vec<Vec<usize>> = vec![Vec::new(); self.codomain.vertex_count()];
        for (v, &w) in self.assign.iter().enumerate() {
            fibers[w].push(v);
        }
        if !fibers.iter().all(|f| self.domain.induces_connected(f)) {
            return false;
        }
        let mut cover = vec![0usize; self.codomain.edge_count()];
        for e in 0..self.domain.edge_count() {
            if let Some(d) = self.edge_image(e) {
                cover[d] += 1;
                if cover[d] > 1 {
                    return false;
                }
            }
        }
        true
    }

    pub fn properties(&self) -> MapProperties {
        MapProperties {
            simplicial: self.first_non_simplicial_edge().is_none(),
            light: self.is_light(),
            monotone: self.is_monotone(),
            surjective: self.is_surjective(),
        }
    }

    /// `self ∘ inner`: first apply `inner`, then `self`.
    pub fn compose(&self, inner: &SimplicialMap) -> Result<SimplicialMap> {
        if !Arc::ptr_eq(&inner.codomain, &self.domain) && *inner.codomain != *self.domain {
            return Err(Error::DomainMismatch);
        }
        let assign = inner.assign.iter().map(|&x| self.assign[x]).collect();
        Ok(SimplicialMap::from_indices_unchecked(inner.domain.clone(), self.codomain.clone(), assign))
    }

    /// Vertex fibers, indexed by codomain vertex.
    pub fn fibers(&self) -> Vec<Vec<usize>> {
        let mut fibers = vec![Vec::new(); self.codomain.vertex_count()];
        for (v, &w) in self.assign.iter().enumerate() {
            fibers[w].push(v);
        }
        fibers
    }
}

/// `compose(f, g)` is `f ∘ g`.
pub fn compose(f: &SimplicialMap, g: &SimplicialMap) -> Result<SimplicialMap> {
    f.compose(g)
}

pub fn map_properties(f: &SimplicialMap) -> MapProperties {
    f.properties()
}

/// Outcome of [`is_simpler`].
#[derive(Clone, Debug)]
pub enum Simpler {
    /// The lexicographically least monotone simplicial surjection `g → h`.
    Witness(SimplicialMap),
    Refuted {
        partitions_examined: u64,
    },
}

pub const DEFAULT_SIMPLER_VERTEX_BOUND: usize = 12;

/// Decides whether `h` is simpler than `g`, i.e. whether `g` admits a
/// monotone simplicial surjection onto `h`.
///
/// Monotone simplicial surjections are exactly quotients by partitions of
/// `V(g)` into connected blocks, where each pair of blocks is joined by at
/// most one edge. All such partitions with `|V(h)|` blocks are enumerated and
/// every isomorphism of the quotient onto `h` is tried.
pub fn is_simpler(h: &Arc<Graph>, g: &Arc<Graph>, vertex_bound: usize) -> Result<Simpler> {
    if g.vertex_count() > vertex_bound {
        return Err(Error::SizeGuard(format!("is_simpler: {} vertices exceeds bound {vertex_bound}", g.vertex_count())));
    }
    let blocks_wanted = h.vertex_count();
    let mut search = PartitionSearch { g, h, blocks_wanted, block_of: vec![usize::MAX; g.vertex_count()], examined: 0, best: None };
    if blocks_wanted <= g.vertex_count() {
        search.assign(0, 0);
    }
    Ok(match search.best {
        Some(assign) => Simpler::Witness(SimplicialMap::from_indices_unchecked(g.clone(), h.clone(), assign)),
        None => Simpler::Refuted { partitions_examined: search.examined },
    })
}

struct PartitionSearch<'a> {
    g: &'a Graph,
    h: &'a Graph,
    blocks_wanted: usize,
    block_of: Vec<usize>,
    examined: u64,
    best: Option<Vec<usize>>,
}

impl PartitionSearch<'_> {
    fn assign(&mut self, v: usize, used: usize) {
        let n = self.g.vertex_count();
        if v == n {
            if used == self.blocks_wanted {
                self.examined += 1;
                self.finish(used);
            }
            return;
        }
        // not enough vertices left to open the remaining blocks
        if used + (n - v) < self.blocks_wanted {
            return;
        }
        for b in 0..used {
            self.block_of[v] = b;
            self.assign(v + 1, used);
        }
        if used < self.blocks_wanted {
            self.block_of[v] = used;
            self.assign(v + 1, used + 1);
        }
        self.block_of[v] = usize::MAX;
    }

    fn finish(&mut self, blocks: usize) {
        let mut members = vec![Vec::new(); blocks];
        for (v, &b) in self.block_of.iter().enumerate() {
            members[b].push(v);
        }
        if !members.iter().all(|m| self.g.induces_connected(m)) {
            return;
        }
        let mut between: HashMap<(usize, usize), usize> = HashMap::new();
        for &(a, b) in self.g.edges() {
            let (x, y) = (self.block_of[a], self.block_of[b]);
            if x != y {
                let c = between.entry((x.min(y), x.max(y))).or_default();
                *c += 1;
                if *c > 1 {
                    return;
                }
            }
        }
        if between.len() != self.h.edge_count() {
            return;
        }
        let mut q_adj = vec![Vec::new(); blocks];
        for &(x, y) in between.keys() {
            q_adj[x].push(y);
            q_adj[y].push(x);
        }
        let mut to_h = vec![usize::MAX; blocks];
        let mut used = vec![false; self.h.vertex_count()];
        self.isomorphisms(0, &q_adj, &mut to_h, &mut used);
    }

    fn isomorphisms(&mut self, q: usize, q_adj: &[Vec<usize>], to_h: &mut Vec<usize>, used: &mut Vec<bool>) {
        if q == q_adj.len() {
            let assign: Vec<usize> = self.block_of.iter().map(|&b| to_h[b]).collect();
            let better = match &self.best {
                None => true,
                Some(best) => self.names_of(&assign) < self.names_of(best),
            };
            if better {
                self.best = Some(assign);
            }
            return;
        }
        for t in 0..self.h.vertex_count() {
            if used[t] || self.h.degree(t) != q_adj[q].len() {
                continue;
            }
            let consistent = q_adj[q].iter().all(|&r| to_h[r] == usize::MAX || self.h.adjacent(t, to_h[r]));
            if !consistent {
                continue;
            }
            to_h[q] = t;
            used[t] = true;
            self.isomorphisms(q + 1, q_adj, to_h, used);
            used[t] = false;
            to_h[q] = usize::MAX;
        }
    }

    fn names_of(&self, assign: &[usize]) -> Vec<VertexId> {
        assign.iter().map(|&t| self.h.name(t).clone()).collect()
    }
}
