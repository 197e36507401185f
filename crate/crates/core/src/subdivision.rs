//! Subdivisions of graphs and maps, generated inverse systems, and edge
//! selections with their preservation and consistency checks.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::path::Path;
use std::sync::{Arc, Mutex};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::dual::dual_of_map;
use crate::error::{Error, Result};
use crate::graph::{Graph, RawGraph, VertexId, Walk};
use crate::map::SimplicialMap;

/// A graph `fine` subdividing `coarse`: each coarse edge `(a, b)` (canonical
/// order, `a < b`) is carried by an arc of `fine` running from `a` to `b`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subdivision {
    pub fine: Arc<Graph>,
    pub coarse: Arc<Graph>,
    /// Indexed by coarse edge; entries are fine vertex indices.
    arcs: Vec<Vec<usize>>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct SubdivisionReport {
    pub missing_vertices: Vec<VertexId>,
    pub condition_i: Vec<String>,
    pub condition_ii: Vec<String>,
    pub condition_iii: Vec<String>,
}

impl SubdivisionReport {
    pub fn is_valid(&self) -> bool {
        self.missing_vertices.is_empty() && self.condition_i.is_empty() && self.condition_ii.is_empty() && self.condition_iii.is_empty()
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ArcJson {
    pub edge: [VertexId; 2],
    pub arc: Walk,
}

impl Subdivision {
    /// Assembles a subdivision from name-level arcs without validating
    /// Def.-style conditions; run [`check_subdivision`] for that. Each arc may
    /// be given in either direction.
    pub fn from_arcs(fine: Arc<Graph>, coarse: Arc<Graph>, arcs: &[(VertexId, VertexId, Walk)]) -> Result<Self> {
        let mut table = vec![Vec::new(); coarse.edge_count()];
        for (a, b, walk) in arcs {
            let e = coarse.edge_id_by_name(a, b).ok_or_else(|| Error::InvalidSubdivision(format!("{a}-{b} is not a coarse edge")))?;
            let mut idx = walk.vertices().iter().map(|v| fine.idx(v)).collect::<Result<Vec<_>>>()?;
            let lesser = coarse.edges()[e].0;
            if idx.first().map(|&x| fine.name(x)) != Some(coarse.name(lesser)) {
                idx.reverse();
            }
            table[e] = idx;
        }
        if let Some(e) = table.iter().position(Vec::is_empty) {
            let (a, b) = coarse.edge_names(e);
            return Err(Error::InvalidSubdivision(format!("no arc given for {a}-{b}")));
        }
        Ok(Subdivision { fine, coarse, arcs: table })
    }

    pub(crate) fn from_index_arcs(fine: Arc<Graph>, coarse: Arc<Graph>, arcs: Vec<Vec<usize>>) -> Self {
        Subdivision { fine, coarse, arcs }
    }

    /// `G` subdividing itself, each edge its own arc.
    pub fn identity(g: Arc<Graph>) -> Self {
        let arcs = g.edges().iter().map(|&(a, b)| vec![a, b]).collect();
        Subdivision { fine: g.clone(), coarse: g, arcs }
    }

    /// Arc of coarse edge `e`, oriented from its lesser end point.
    pub fn arc(&self, e: usize) -> &[usize] {
        &self.arcs[e]
    }

    /// Arc of coarse edge `e` walked from coarse vertex `from`.
    pub fn arc_from(&self, e: usize, from: usize) -> Vec<usize> {
        let (a, _) = self.coarse.edges()[e];
        if a == from {
            self.arcs[e].clone()
        } else {
            self.arcs[e].iter().rev().copied().collect()
        }
    }

    pub fn arc_walk(&self, e: usize) -> Walk {
        Walk(self.arcs[e].iter().map(|&v| self.fine.name(v).clone()).collect())
    }

    /// The fine edge `(v, e, G')`: the edge of the arc of `e` containing `v`.
    pub fn germ(&self, v: usize, e: usize) -> Option<usize> {
        let arc = &self.arcs[e];
        let vf = self.fine.index_of(self.coarse.name(v))?;
        if arc.first() == Some(&vf) {
            self.fine.edge_id(arc[0], arc[1])
        } else if arc.last() == Some(&vf) {
            self.fine.edge_id(arc[arc.len() - 1], arc[arc.len() - 2])
        } else {
            None
        }
    }

    /// Walk in `fine` obtained by expanding each edge of a coarse walk.
    pub fn expand_walk(&self, walk: &[usize]) -> Vec<usize> {
        let mut out = vec![self.fine.index_of(self.coarse.name(walk[0])).expect("coarse vertex present")];
        for w in walk.windows(2) {
            let e = self.coarse.edge_id(w[0], w[1]).expect("walk edge");
            out.extend_from_slice(&self.arc_from(e, w[0])[1..]);
        }
        out
    }

    /// `self` followed by `mid`: if `self` subdivides `G'` and `mid` shows `G'`
    /// subdividing `G`, the result shows `self.fine` subdividing `G`.
    pub fn over(&self, mid: &Subdivision) -> Result<Subdivision> {
        if *self.coarse != *mid.fine {
            return Err(Error::InvalidSubdivision("composed subdivisions do not chain".into()));
        }
        let arcs = (0..mid.coarse.edge_count()).map(|e| self.expand_walk(mid.arc(e))).collect();
        Ok(Subdivision { fine: self.fine.clone(), coarse: mid.coarse.clone(), arcs })
    }

    pub fn to_json(&self) -> Vec<ArcJson> {
        (0..self.coarse.edge_count())
            .map(|e| {
                let (a, b) = self.coarse.edge_names(e);
                ArcJson { edge: [a.clone(), b.clone()], arc: self.arc_walk(e) }
            })
            .collect()
    }
}

/// Checks the three subdivision conditions independently: arcs share end
/// points with their edges; distinct arcs meet only where their edges meet;
/// every fine vertex and edge lies on some arc.
pub fn check_subdivision(s: &Subdivision) -> SubdivisionReport {
    let mut report = SubdivisionReport::default();
    let (fine, coarse) = (&s.fine, &s.coarse);
    let mut coarse_in_fine = vec![usize::MAX; coarse.vertex_count()];
    for (v, slot) in coarse_in_fine.iter_mut().enumerate() {
        match fine.index_of(coarse.name(v)) {
            Some(x) => *slot = x,
            None => report.missing_vertices.push(coarse.name(v).clone()),
        }
    }
    let is_coarse: BTreeSet<usize> = coarse_in_fine.iter().copied().filter(|&x| x != usize::MAX).collect();
    let label = |e: usize| {
        let (a, b) = coarse.edge_names(e);
        format!("{a}-{b}")
    };

    let mut vertex_arcs: HashMap<usize, Vec<usize>> = HashMap::new();
    let mut covered_edges = vec![false; fine.edge_count()];
    for e in 0..coarse.edge_count() {
        let arc = &s.arcs[e];
        let (a, b) = coarse.edges()[e];
        if arc.len() < 2 || arc[0] != coarse_in_fine[a] || arc[arc.len() - 1] != coarse_in_fine[b] {
            report.condition_i.push(format!("arc of {} does not join its end points", label(e)));
        }
        let distinct: BTreeSet<usize> = arc.iter().copied().collect();
        if distinct.len() != arc.len() {
            report.condition_i.push(format!("arc of {} repeats a vertex", label(e)));
        }
        for w in arc.windows(2) {
            match fine.edge_id(w[0], w[1]) {
                Some(k) => covered_edges[k] = true,
                None => report.condition_i.push(format!(
                    "arc of {} steps between non-adjacent {} and {}",
                    label(e),
                    fine.name(w[0]),
                    fine.name(w[1])
                )),
            }
        }
        for (pos, &x) in arc.iter().enumerate() {
            let interior = pos > 0 && pos + 1 < arc.len();
            if interior && is_coarse.contains(&x) {
                report.condition_ii.push(format!("arc of {} passes through coarse vertex {}", label(e), fine.name(x)));
            }
            vertex_arcs.entry(x).or_default().push(e);
        }
    }
    for (&x, arcs) in &vertex_arcs {
        if arcs.len() > 1 && !is_coarse.contains(&x) {
            let names: Vec<String> = arcs.iter().map(|&e| label(e)).collect();
            report.condition_ii.push(format!("arcs of {} meet at {}", names.join(", "), fine.name(x)));
        }
    }
    report.condition_ii.sort();
    for v in 0..fine.vertex_count() {
        if !vertex_arcs.contains_key(&v) {
            report.condition_iii.push(format!("vertex {} lies on no arc", fine.name(v)));
        }
    }
    for (k, covered) in covered_edges.iter().enumerate() {
        if !covered {
            let (a, b) = fine.edge_names(k);
            report.condition_iii.push(format!("edge {a}-{b} lies on no arc"));
        }
    }
    report
}

/// The subdivision `f′` of `f` matching `s`, with the induced subdivision of
/// `f`'s domain.
///
/// An edge `{x, y}` (with `x < y`) that `f` collapses is kept. Otherwise it is
/// replaced by a path `x, x-y#1, …, x-y#(L-1), y` carried isomorphically
/// onto the arc of `{f(x), f(y)}` of length `L`, walked from `f(x)`.
pub fn subdivide_map(f: &SimplicialMap, s: &Subdivision) -> Result<(SimplicialMap, Subdivision)> {
    if **f.codomain() != *s.coarse {
        return Err(Error::InvalidSubdivision("subdivision is not over the map's codomain".into()));
    }
    let report = check_subdivision(s);
    if !report.is_valid() {
        return Err(Error::InvalidSubdivision(format!("{report:?}")));
    }
    let dom = f.domain();
    let coarse_to_fine: Vec<usize> = (0..s.coarse.vertex_count()).map(|v| s.fine.index_of(s.coarse.name(v)).unwrap()).collect();

    // name-level construction, then a single sort into canonical order
    let mut names: Vec<VertexId> = dom.vertices().to_vec();
    let mut image: HashMap<VertexId, usize> = (0..dom.vertex_count()).map(|v| (dom.name(v).clone(), coarse_to_fine[f.at(v)])).collect();
    let mut arcs_by_name: Vec<Vec<VertexId>> = Vec::with_capacity(dom.edge_count());
    for &(x, y) in dom.edges() {
        let (fx, fy) = (f.at(x), f.at(y));
        if fx == fy {
            arcs_by_name.push(vec![dom.name(x).clone(), dom.name(y).clone()]);
            continue;
        }
        let e = s.coarse.edge_id(fx, fy).expect("simplicial");
        let target = s.arc_from(e, fx);
        let key = format!("{}-{}", dom.name(x), dom.name(y));
        let mut arc = vec![dom.name(x).clone()];
        for (k, &t) in target.iter().enumerate().take(target.len() - 1).skip(1) {
            let fresh = VertexId::new(format!("{key}#{k}"));
            image.insert(fresh.clone(), t);
            names.push(fresh.clone());
            arc.push(fresh);
        }
        arc.push(dom.name(y).clone());
        arcs_by_name.push(arc);
    }
    names.sort();
    let index: HashMap<&VertexId, usize> = names.iter().enumerate().map(|(i, v)| (v, i)).collect();
    let arcs: Vec<Vec<usize>> = arcs_by_name.iter().map(|a| a.iter().map(|v| index[v]).collect()).collect();
    let edges: Vec<(usize, usize)> = arcs.iter().flat_map(|a| a.windows(2).map(|w| (w[0], w[1]))).collect();
    let assign: Vec<usize> = names.iter().map(|v| image[v]).collect();
    let fine = Arc::new(Graph::from_sorted_indexed(names, edges));
    let fprime = SimplicialMap::from_indices_unchecked(fine.clone(), s.fine.clone(), assign);
    Ok((fprime, Subdivision::from_index_arcs(fine, dom.clone(), arcs)))
}

pub const DEFAULT_EDGE_GUARD: usize = 1_000_000;

/// One generated level: `X_i`, its subdivision of `X_0`, and the bonding map
/// `ψ_{i-1}: X_i → X_{i-1}` (absent at level 0).
#[derive(Clone, Debug)]
pub struct Level {
    pub graph: Arc<Graph>,
    pub over_base: Subdivision,
    pub bonding: Option<SimplicialMap>,
}

/// The inverse system generated by repeatedly subdividing a seed map
/// `φ: X₁ → X₀` whose domain subdivides its codomain.
///
/// Extension takes `&mut self`; reads of built levels and composites take
/// `&self` and may run concurrently.
#[derive(Debug)]
pub struct InverseSystem {
    seed: SimplicialMap,
    witness: Subdivision,
    levels: Vec<Level>,
    composites: Mutex<HashMap<(usize, usize), Arc<SimplicialMap>>>,
    edge_guard: usize,
}

impl InverseSystem {
    pub fn new(seed: SimplicialMap, witness: Subdivision) -> Result<Self> {
        Self::with_guard(seed, witness, DEFAULT_EDGE_GUARD)
    }

    pub fn with_guard(seed: SimplicialMap, witness: Subdivision, edge_guard: usize) -> Result<Self> {
        if *witness.fine != **seed.domain() || *witness.coarse != **seed.codomain() {
            return Err(Error::InvalidSubdivision("witness must show the seed's domain subdividing its codomain".into()));
        }
        let report = check_subdivision(&witness);
        if !report.is_valid() {
            return Err(Error::InvalidSubdivision(format!("{report:?}")));
        }
        let base = seed.codomain().clone();
        let level0 = Level { graph: base.clone(), over_base: Subdivision::identity(base), bonding: None };
        Ok(InverseSystem { seed, witness, levels: vec![level0], composites: Mutex::new(HashMap::new()), edge_guard })
    }

    pub fn depth(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn total_edges(&self) -> usize {
        self.levels.iter().map(|l| l.graph.edge_count()).sum()
    }

    /// Edge count the next level would have.
    pub fn next_edge_count(&self) -> usize {
        let last = &self.levels.last().unwrap().over_base;
        let dom = self.seed.domain();
        (0..dom.edge_count())
            .map(|e| match self.seed.edge_image(e) {
                Some(d) => last.arc(d).len() - 1,
                None => 1,
            })
            .sum()
    }

    pub fn extend_to(&mut self, depth: usize) -> Result<()> {
        while self.depth() < depth {
            let next = self.next_edge_count();
            if self.total_edges() + next > self.edge_guard {
                return Err(Error::SizeGuard(format!(
                    "level {} would bring the system to {} edges (guard {})",
                    self.depth() + 1,
                    self.total_edges() + next,
                    self.edge_guard
                )));
            }
            let prev = &self.levels.last().unwrap().over_base;
            let (psi, over_seed_domain) = subdivide_map(&self.seed, prev)?;
            let over_base = over_seed_domain.over(&self.witness)?;
            self.levels.push(Level { graph: psi.domain().clone(), over_base, bonding: Some(psi) });
        }
        Ok(())
    }

    pub fn level(&self, i: usize) -> &Level {
        &self.levels[i]
    }

    pub fn levels(&self) -> &[Level] {
        &self.levels
    }

    /// `Φ_i^j = ψ_i ∘ … ∘ ψ_{j-1}: X_j → X_i`, memoized.
    pub fn composite(&self, i: usize, j: usize) -> Result<Arc<SimplicialMap>> {
        if i > j || j > self.depth() {
            return Err(Error::Precondition(format!("composite({i}, {j}) outside 0..={}", self.depth())));
        }
        if let Some(m) = self.composites.lock().unwrap().get(&(i, j)) {
            return Ok(m.clone());
        }
        let map = if i == j {
            SimplicialMap::identity(self.levels[i].graph.clone())
        } else {
            let outer = self.composite(i, j - 1)?;
            outer.compose(self.levels[j].bonding.as_ref().unwrap())?
        };
        let map = Arc::new(map);
        self.composites.lock().unwrap().insert((i, j), map.clone());
        Ok(map)
    }

    /// Image under `Φ_0^m` of the walk of `X_0` vertices `walk`, expanded into
    /// `X_m` first.
    pub fn image_of_base_walk(&self, m: usize, walk: &[usize]) -> Result<Vec<usize>> {
        let expanded = self.levels[m].over_base.expand_walk(walk);
        let phi = self.composite(0, m)?;
        Ok(expanded.into_iter().map(|x| phi.at(x)).collect())
    }
}

/// One level as written by [`InverseSystem::export`].
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LevelJson {
    pub level: usize,
    pub graph: RawGraph,
    pub over_base: Vec<ArcJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bonding: Option<BTreeMap<VertexId, VertexId>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelEntry {
    pub level: usize,
    pub file: String,
    pub vertices: usize,
    pub edges: usize,
}

/// SHA-256 of the canonical JSON assignment of `Φ_0^j`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompositeChecksum {
    pub from: usize,
    pub to: usize,
    pub sha256: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SystemManifest {
    pub depth: usize,
    pub total_edges: usize,
    pub levels: Vec<LevelEntry>,
    pub composites: Vec<CompositeChecksum>,
}

pub fn map_checksum(f: &SimplicialMap) -> String {
    let json = serde_json::to_vec(&f.assignment_names()).expect("assignment serializes");
    hex::encode(Sha256::digest(&json))
}

impl InverseSystem {
    pub fn level_json(&self, i: usize) -> LevelJson {
        let l = &self.levels[i];
        LevelJson {
            level: i,
            graph: l.graph.to_raw(),
            over_base: l.over_base.to_json(),
            bonding: l.bonding.as_ref().map(SimplicialMap::assignment_names),
        }
    }

    pub fn manifest(&self) -> Result<SystemManifest> {
        let levels = (0..=self.depth())
            .map(|i| LevelEntry {
                level: i,
                file: format!("level_{i}.json"),
                vertices: self.levels[i].graph.vertex_count(),
                edges: self.levels[i].graph.edge_count(),
            })
            .collect();
        let composites = (1..=self.depth())
            .map(|j| Ok(CompositeChecksum { from: 0, to: j, sha256: map_checksum(&*self.composite(0, j)?) }))
            .collect::<Result<_>>()?;
        Ok(SystemManifest { depth: self.depth(), total_edges: self.total_edges(), levels, composites })
    }

    /// Writes `level_<i>.json` for every level and `manifest.json` into `dir`.
    pub fn export(&self, dir: &Path) -> Result<SystemManifest> {
        std::fs::create_dir_all(dir)?;
        let manifest = self.manifest()?;
        for entry in &manifest.levels {
            let text = serde_json::to_string_pretty(&self.level_json(entry.level))?;
            std::fs::write(dir.join(&entry.file), text + "\n")?;
        }
        std::fs::write(dir.join("manifest.json"), serde_json::to_string_pretty(&manifest)? + "\n")?;
        Ok(manifest)
    }
}

/// Builds a system to `depth` in one call.
pub fn generate_system(seed: SimplicialMap, witness: Subdivision, depth: usize) -> Result<InverseSystem> {
    let mut sys = InverseSystem::new(seed, witness)?;
    sys.extend_to(depth)?;
    Ok(sys)
}

/// An edge selection: each vertex picks a nonempty set of incident edges.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeSelection {
    pub graph: Arc<Graph>,
    select: Vec<BTreeSet<usize>>,
}

impl EdgeSelection {
    pub fn new(graph: Arc<Graph>, select: Vec<BTreeSet<usize>>) -> Result<Self> {
        if select.len() != graph.vertex_count() {
            return Err(Error::InvalidSelection("one entry per vertex required".into()));
        }
        for (v, set) in select.iter().enumerate() {
            if set.is_empty() {
                return Err(Error::InvalidSelection(format!("{} selects nothing", graph.name(v))));
            }
            for &e in set {
                let (a, b) = graph.edges()[e];
                if a != v && b != v {
                    return Err(Error::InvalidSelection(format!("edge {e} does not contain {}", graph.name(v))));
                }
            }
        }
        Ok(EdgeSelection { graph, select })
    }

    pub fn from_names(graph: Arc<Graph>, select: &BTreeMap<VertexId, Vec<(VertexId, VertexId)>>) -> Result<Self> {
        let mut table = vec![BTreeSet::new(); graph.vertex_count()];
        for (v, edges) in select {
            let vi = graph.idx(v)?;
            for (a, b) in edges {
                let e = graph.edge_id_by_name(a, b).ok_or_else(|| Error::InvalidSelection(format!("{a}-{b} is not an edge")))?;
                table[vi].insert(e);
            }
        }
        Self::new(graph, table)
    }

    /// Every vertex selects all of its incident edges.
    pub fn full(graph: Arc<Graph>) -> Self {
        let select =
            (0..graph.vertex_count()).map(|v| graph.neighbors(v).iter().map(|&w| graph.edge_id(v, w).unwrap()).collect()).collect();
        EdgeSelection { graph, select }
    }

    pub fn get(&self, v: usize) -> &BTreeSet<usize> {
        &self.select[v]
    }

    pub fn to_names(&self) -> BTreeMap<VertexId, Vec<[VertexId; 2]>> {
        (0..self.graph.vertex_count())
            .map(|v| {
                let edges = self.select[v]
                    .iter()
                    .map(|&e| {
                        let (a, b) = self.graph.edge_names(e);
                        [a.clone(), b.clone()]
                    })
                    .collect();
                (self.graph.name(v).clone(), edges)
            })
            .collect()
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct PreservesReport {
    pub condition_i: Vec<String>,
    pub condition_ii: Vec<String>,
}

impl PreservesReport {
    pub fn holds(&self) -> bool {
        self.condition_i.is_empty() && self.condition_ii.is_empty()
    }
}

/// Whether `fprime: G₁′ → G₀` preserves `(s0, s1)`, where `sub` shows `G₁′`
/// subdividing the graph carrying `s1` and `s0` lives on `G₀`.
///
/// (i) every selected germ `(v, e, G₁′)`, `e ∈ s1(v)`, maps into `s0(f(v))`;
/// (ii) of any two distinct edges of `G₁′` meeting at `v`, at least one maps
/// into `s0(f(v))`.
pub fn check_preserves(fprime: &SimplicialMap, sub: &Subdivision, s0: &EdgeSelection, s1: &EdgeSelection) -> Result<PreservesReport> {
    if **fprime.domain() != *sub.fine || *sub.coarse != *s1.graph || **fprime.codomain() != *s0.graph {
        return Err(Error::Precondition("map, subdivision and selections do not fit together".into()));
    }
    let fine = &sub.fine;
    let g0 = fprime.codomain();
    let mut report = PreservesReport::default();
    let selected =
        |fine_edge: usize, v_fine: usize| -> bool { fprime.edge_image(fine_edge).is_some_and(|d| s0.get(fprime.at(v_fine)).contains(&d)) };
    for v in 0..sub.coarse.vertex_count() {
        let vf = fine.index_of(sub.coarse.name(v)).unwrap();
        for &e in s1.get(v) {
            let germ = sub.germ(v, e).expect("selected edge contains its vertex");
            if !selected(germ, vf) {
                let (a, b) = fine.edge_names(germ);
                let (c, d) = sub.coarse.edge_names(e);
                report.condition_i.push(format!(
                    "germ {a}-{b} of {c}-{d} at {} does not map into the selection at {}",
                    sub.coarse.name(v),
                    g0.name(fprime.at(vf))
                ));
            }
        }
    }
    for v in 0..fine.vertex_count() {
        let failing: Vec<usize> = fine.neighbors(v).iter().map(|&w| fine.edge_id(v, w).unwrap()).filter(|&e| !selected(e, v)).collect();
        if failing.len() >= 2 {
            let names: Vec<String> = failing
                .iter()
                .map(|&e| {
                    let (a, b) = fine.edge_names(e);
                    format!("{a}-{b}")
                })
                .collect();
            report.condition_ii.push(format!("at {}: {} all miss the selection", fine.name(v), names.join(", ")));
        }
    }
    Ok(report)
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ConsistencyReport {
    pub isomorphism: Vec<String>,
    pub condition_i: Vec<String>,
    pub condition_ii: Vec<String>,
}

impl ConsistencyReport {
    pub fn holds(&self) -> bool {
        self.isomorphism.is_empty() && self.condition_i.is_empty() && self.condition_ii.is_empty()
    }
}

/// Checks that `lam: H₁ → D(f, G₁′)` is a consistency isomorphism for `f` on
/// the selection `s`, where `f_sub` shows `G₁′` subdividing `G₁` and `h1`
/// shows `H₁` subdividing `G₁`.
pub fn check_consistency(
    f: &SimplicialMap,
    f_sub: &Subdivision,
    s: &EdgeSelection,
    h1: &Subdivision,
    lam: &SimplicialMap,
) -> Result<ConsistencyReport> {
    if **f.domain() != *f_sub.fine || *f_sub.coarse != *s.graph || *h1.coarse != *s.graph || **lam.domain() != *h1.fine {
        return Err(Error::Precondition("map, subdivisions, selection and isomorphism do not fit together".into()));
    }
    let dual = dual_of_map(f)?;
    let mut report = ConsistencyReport::default();
    if **lam.codomain() != *dual.graph {
        report.isomorphism.push("codomain is not the dual of the map".into());
        return Ok(report);
    }
    let h = &h1.fine;
    let mut hit = vec![false; dual.graph.vertex_count()];
    for v in 0..h.vertex_count() {
        if std::mem::replace(&mut hit[lam.at(v)], true) {
            report.isomorphism.push(format!("{} is hit twice", dual.graph.name(lam.at(v))));
        }
    }
    if hit.iter().any(|&x| !x) {
        report.isomorphism.push("not onto the dual's vertices".into());
    }
    if !lam.is_light() || h.edge_count() != dual.graph.edge_count() {
        report.isomorphism.push("edges do not correspond".into());
    }
    if !report.isomorphism.is_empty() {
        return Ok(report);
    }

    let g1 = &s.graph;
    let fine = &f_sub.fine;
    for v in 0..g1.vertex_count() {
        let vh = h.idx(g1.name(v))?;
        let star = &dual.stars[lam.at(vh)];
        for &e in s.get(v) {
            let germ = f_sub.germ(v, e).expect("selected edge contains its vertex");
            if star.edges.binary_search(&germ).is_err() {
                let (a, b) = fine.edge_names(germ);
                report.condition_i.push(format!("germ {a}-{b} at {} is not in the star of {}", g1.name(v), dual.graph.name(lam.at(vh))));
            }
        }
    }
    for e in 0..g1.edge_count() {
        let arc_h = h1.arc(e);
        let arc_f: BTreeSet<usize> = f_sub.arc(e).iter().copied().collect();
        let arc_f_edges: BTreeSet<usize> = f_sub.arc(e).windows(2).map(|w| fine.edge_id(w[0], w[1]).unwrap()).collect();
        for &v in &arc_h[1..arc_h.len() - 1] {
            let star = &dual.stars[lam.at(v)];
            if !star.vertices.iter().all(|x| arc_f.contains(x)) || !star.edges.iter().all(|x| arc_f_edges.contains(x)) {
                let (a, b) = g1.edge_names(e);
                report.condition_ii.push(format!(
                    "star of {} = image of {} is not inside the arc of {a}-{b}",
                    dual.graph.name(lam.at(v)),
                    h.name(v)
                ));
            }
        }
    }
    Ok(report)
}
