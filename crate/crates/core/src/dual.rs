//! Dual graphs of graphs and of simplicial maps.
//!
//! `D(G)` has one vertex per edge of `G`, adjacent when the edges meet.
//! `D(f, G₁)` for `f: G₁ → G₀` has one vertex per component `c` of an edge
//! preimage `f⁻¹(e)` with `f(c) = e`; two such vertices are adjacent when
//! their components meet. The induced map `d[f]` sends each component's
//! vertex to the dual vertex of the edge it covers.
//!
//! The preimage `f⁻¹(e)` is the subgraph spanned by all domain vertices
//! mapping into `e` together with every domain edge whose image lies in `e`
//! (edges collapsed onto an endpoint of `e` included).

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{validate_graph, Graph, RawGraph, VertexId};
use crate::map::SimplicialMap;

/// `D(G)` with its star table `a_i ↦ edge of G`. Dual vertex `a{k+1}`
/// corresponds to the `k`-th edge of `G` in canonical order.
#[derive(Clone, Debug)]
pub struct DualGraph {
    pub graph: Arc<Graph>,
    pub source: Arc<Graph>,
}

impl DualGraph {
    /// The source edge starred by dual vertex `v`.
    pub fn star(&self, v: usize) -> usize {
        v
    }

    /// The dual vertex of source edge `e`.
    pub fn vertex_of_edge(&self, e: usize) -> usize {
        e
    }

    pub fn to_json(&self) -> DualJson {
        let star = (0..self.graph.vertex_count())
            .map(|v| {
                let (a, b) = self.source.edge_names(self.star(v));
                (self.graph.name(v).clone(), StarJson { vertices: vec![a.clone(), b.clone()], edges: vec![[a.clone(), b.clone()]] })
            })
            .collect();
        DualJson { graph: self.graph.to_raw(), star }
    }
}

/// A connected subgraph of a map's domain, by vertex and edge indices.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Star {
    pub vertices: Vec<usize>,
    pub edges: Vec<usize>,
}

impl Star {
    pub fn edge_names(&self, g: &Graph) -> BTreeSet<(VertexId, VertexId)> {
        self.edges
            .iter()
            .map(|&e| {
                let (a, b) = g.edge_names(e);
                (a.clone(), b.clone())
            })
            .collect()
    }
}

/// `D(f, G₁)` together with the star table and the induced map `d[f]`.
#[derive(Clone, Debug)]
pub struct DualOfMap {
    pub graph: Arc<Graph>,
    pub stars: Vec<Star>,
    /// `d[f]`, from `graph` to `target.graph`.
    pub induced: SimplicialMap,
    pub target: DualGraph,
    pub source: Arc<Graph>,
}

#[derive(Clone, Debug, Serialize)]
pub struct StarJson {
    pub vertices: Vec<VertexId>,
    pub edges: Vec<[VertexId; 2]>,
}

/// Dual graphs serialize as the graph JSON plus a star table.
#[derive(Clone, Debug, Serialize)]
pub struct DualJson {
    #[serde(flatten)]
    pub graph: RawGraph,
    pub star: BTreeMap<VertexId, StarJson>,
}

impl DualOfMap {
    pub fn to_json(&self) -> DualJson {
        let star = self
            .stars
            .iter()
            .enumerate()
            .map(|(v, s)| {
                let json = StarJson {
                    vertices: s.vertices.iter().map(|&x| self.source.name(x).clone()).collect(),
                    edges: s
                        .edges
                        .iter()
                        .map(|&e| {
                            let (a, b) = self.source.edge_names(e);
                            [a.clone(), b.clone()]
                        })
                        .collect(),
                };
                (self.graph.name(v).clone(), json)
            })
            .collect();
        DualJson { graph: self.graph.to_raw(), star }
    }

    /// The dual vertex whose star has exactly these edges, if any.
    pub fn vertex_with_star_edges(&self, edges: &BTreeSet<(VertexId, VertexId)>) -> Option<usize> {
        self.stars.iter().position(|s| &s.edge_names(&self.source) == edges)
    }
}

pub fn dual_graph(g: &Arc<Graph>) -> DualGraph {
    let names: Vec<VertexId> = (1..=g.edge_count()).map(|k| VertexId::indexed("a", k)).collect();
    let mut edges = Vec::new();
    for v in 0..g.vertex_count() {
        let incident: Vec<usize> = g.neighbors(v).iter().map(|&w| g.edge_id(v, w).unwrap()).collect();
        for (i, &x) in incident.iter().enumerate() {
            for &y in &incident[i + 1..] {
                edges.push((x, y));
            }
        }
    }
    DualGraph { graph: Arc::new(Graph::from_sorted_indexed(names, edges)), source: g.clone() }
}

/// Components of `f⁻¹(e)` that map onto `e`, in canonical order of their
/// least vertex.
pub fn preimage_components(f: &SimplicialMap, e: usize) -> Vec<Star> {
    let dom = f.domain();
    let (p, q) = f.codomain().edges()[e];
    let inside = |v: usize| f.at(v) == p || f.at(v) == q;
    let mut comp = vec![usize::MAX; dom.vertex_count()];
    let mut stars = Vec::new();
    for start in 0..dom.vertex_count() {
        if comp[start] != usize::MAX || !inside(start) {
            continue;
        }
        let id = stars.len();
        comp[start] = id;
        let mut vertices = vec![start];
        let mut stack = vec![start];
        while let Some(x) = stack.pop() {
            for &y in dom.neighbors(x) {
                if inside(y) && comp[y] == usize::MAX {
                    comp[y] = id;
                    vertices.push(y);
                    stack.push(y);
                }
            }
        }
        vertices.sort_unstable();
        let edges: Vec<usize> = vertices
            .iter()
            .flat_map(|&x| dom.neighbors(x).iter().filter(move |&&y| y > x && inside(y)).map(move |&y| (x, y)))
            .map(|(x, y)| dom.edge_id(x, y).unwrap())
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        stars.push(Star { vertices, edges });
    }
    stars.retain(|s| s.vertices.iter().any(|&v| f.at(v) == p) && s.vertices.iter().any(|&v| f.at(v) == q));
    stars
}

pub fn dual_of_map(f: &SimplicialMap) -> Result<DualOfMap> {
    let target = dual_graph(f.codomain());
    let mut stars = Vec::new();
    let mut induced = Vec::new();
    for e in 0..f.codomain().edge_count() {
        for s in preimage_components(f, e) {
            stars.push(s);
            induced.push(target.vertex_of_edge(e));
        }
    }
    if stars.is_empty() {
        return Err(Error::Precondition("map covers no edge; its dual is empty".into()));
    }
    let names: Vec<VertexId> = (0..stars.len()).map(|k| VertexId::indexed("b", k)).collect();
    let mut containing: Vec<Vec<usize>> = vec![Vec::new(); f.domain().vertex_count()];
    for (k, s) in stars.iter().enumerate() {
        for &v in &s.vertices {
            containing[v].push(k);
        }
    }
    let mut edges = BTreeSet::new();
    for list in &containing {
        for (i, &x) in list.iter().enumerate() {
            for &y in &list[i + 1..] {
                edges.insert((x, y));
            }
        }
    }
    let graph = Graph::from_sorted_indexed(names, edges.into_iter().collect());
    let report = validate_graph(&graph.to_raw());
    if !report.is_empty() {
        return Err(Error::InvalidGraph(report));
    }
    let graph = Arc::new(graph);
    let induced = SimplicialMap::from_indices(graph.clone(), target.graph.clone(), induced)?;
    Ok(DualOfMap { graph, stars, induced, target, source: f.domain().clone() })
}

/// `d[f, g]: D(f∘g, G₂) → D(f, G₁)`, sending `v` to the unique `w` with
/// `g(v*) ⊆ w*`.
pub fn d_pair(f: &SimplicialMap, g: &SimplicialMap) -> Result<SimplicialMap> {
    let fg = f.compose(g)?;
    let outer = dual_of_map(f)?;
    let composite = dual_of_map(&fg)?;
    d_pair_from_duals(&outer, &composite, g)
}

/// [`d_pair`] over precomputed duals. Fails when some `g(v*)` lies in no
/// star of `outer` or in more than one.
pub fn d_pair_from_duals(outer: &DualOfMap, composite: &DualOfMap, g: &SimplicialMap) -> Result<SimplicialMap> {
    let g1 = g.codomain();
    let mut assign = Vec::with_capacity(composite.stars.len());
    for (v, s) in composite.stars.iter().enumerate() {
        let img_vertices: BTreeSet<usize> = s.vertices.iter().map(|&x| g.at(x)).collect();
        let img_edges: BTreeSet<usize> = s.edges.iter().filter_map(|&e| g.edge_image(e)).collect();
        let hits: Vec<usize> = outer
            .stars
            .iter()
            .enumerate()
            .filter(|(_, w)| {
                img_vertices.iter().all(|x| w.vertices.binary_search(x).is_ok())
                    && img_edges.iter().all(|e| w.edges.binary_search(e).is_ok())
            })
            .map(|(k, _)| k)
            .collect();
        match hits.as_slice() {
            [w] => assign.push(*w),
            [] => {
                return Err(Error::DualPair {
                    vertex: composite.graph.name(v).clone(),
                    reason: "image of its star lies in no star of the outer dual".into(),
                })
            }
            _ => {
                return Err(Error::DualPair {
                    vertex: composite.graph.name(v).clone(),
                    reason: format!("image of its star lies in {} stars of the outer dual", hits.len()),
                })
            }
        }
        debug_assert!(img_vertices.iter().all(|&x| x < g1.vertex_count()));
    }
    SimplicialMap::from_indices(composite.graph.clone(), outer.graph.clone(), assign)
        .map_err(|e| Error::DualPair { vertex: VertexId::new("?"), reason: e.to_string() })
}

/// Light, and every dual-vertex star is a single edge.
pub fn is_ultra_light(f: &SimplicialMap) -> bool {
    if !f.is_light() {
        return false;
    }
    (0..f.codomain().edge_count()).all(|e| preimage_components(f, e).iter().all(|s| s.edges.len() == 1))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path(n: usize, prefix: &str) -> Arc<Graph> {
        let vs: Vec<String> = (0..=n).map(|i| format!("{prefix}{i}")).collect();
        let es: Vec<(String, String)> = vs.windows(2).map(|w| (w[0].clone(), w[1].clone())).collect();
        Arc::new(Graph::new(vs, es).unwrap())
    }

    #[test]
    fn dual_of_two_edge_path_is_an_edge() {
        let d = dual_graph(&path(2, "x"));
        assert_eq!(d.graph.vertex_count(), 2);
        assert_eq!(d.graph.edge_count(), 1);
    }

    #[test]
    fn dual_of_unit_spider_is_complete() {
        let g = Arc::new(Graph::new(["c", "a", "b", "d", "e"], [("c", "a"), ("c", "b"), ("c", "d"), ("c", "e")]).unwrap());
        let d = dual_graph(&g);
        assert_eq!(d.graph.vertex_count(), 4);
        assert_eq!(d.graph.edge_count(), 6);
    }

    #[test]
    fn identity_dual_matches_dual_graph() {
        let g = path(3, "x");
        let id = SimplicialMap::identity(g.clone());
        let d = dual_of_map(&id).unwrap();
        let plain = dual_graph(&g);
        assert_eq!(d.graph.edges(), plain.graph.edges());
        assert!(d.induced.assignment().iter().enumerate().all(|(v, &w)| v == w));
        assert!(is_ultra_light(&id));
    }

    #[test]
    fn fold_is_not_ultra_light() {
        let (x, y) = (path(2, "x"), path(1, "y"));
        let f = SimplicialMap::new(x, y, [("x0", "y0"), ("x1", "y1"), ("x2", "y0")]).unwrap();
        assert!(f.is_light());
        assert!(!is_ultra_light(&f));
        let d = dual_of_map(&f).unwrap();
        assert_eq!(d.stars.len(), 1);
        assert_eq!(d.stars[0].edges.len(), 2);
    }

    #[test]
    fn d_pair_with_identity_is_relabeling() {
        let (x, y) = (path(3, "x"), path(1, "y"));
        let f = SimplicialMap::new(x.clone(), y, [("x0", "y0"), ("x1", "y1"), ("x2", "y0"), ("x3", "y1")]).unwrap();
        let id = SimplicialMap::identity(x);
        let d = d_pair(&f, &id).unwrap();
        assert!(d.assignment().iter().enumerate().all(|(v, &w)| v == w));
    }

    #[test]
    fn d_pair_rejects_mismatched_duals() {
        // outer dual of an unrelated fold; the composite's stars are not contained in it
        let (x, y) = (path(2, "x"), path(1, "y"));
        let fold = SimplicialMap::new(x.clone(), y.clone(), [("x0", "y0"), ("x1", "y1"), ("x2", "y0")]).unwrap();
        let id_x = SimplicialMap::identity(x.clone());
        let composite = dual_of_map(&fold).unwrap();
        let outer = dual_of_map(&id_x).unwrap();
        let err = d_pair_from_duals(&outer, &composite, &id_x).unwrap_err();
        assert!(matches!(err, Error::DualPair { .. }));
    }
}
