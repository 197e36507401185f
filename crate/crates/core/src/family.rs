//! The simple-n-od family: `ₙX₀`, its subdivision `ₙX₁`, the bonding map
//! `ₙφ`, the selection `ₙS`, the subdivision `Y₁` and the isomorphism `ₙλ`
//! onto the dual of `ₙφ`, together with the closed-form description of that
//! dual used as golden data.
//!
//! Index conventions: `L = (2n-1)(n-3)` and `K = L + 2(n-1)`, so `ₙX₁` has
//! u-vertices `u1..u(K+3)`. Residues "mod (n-2)" are taken in `1..=n-2`.
//! Families indexed by `1..=n-3` are empty when `n = 3`.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use serde::Serialize;

use crate::dual::{dual_of_map, DualOfMap};
use crate::error::{Error, Result};
use crate::graph::{Graph, RawGraph, VertexId, Walk};
use crate::map::SimplicialMap;
use crate::od::SimpleNOd;
use crate::subdivision::{EdgeSelection, Subdivision};

pub fn v(i: usize) -> VertexId {
    VertexId::indexed("v", i)
}

pub fn u(i: usize) -> VertexId {
    VertexId::indexed("u", i)
}

pub fn w(i: usize) -> VertexId {
    VertexId::indexed("w", i)
}

pub fn a(i: usize) -> VertexId {
    VertexId::indexed("a", i)
}

pub fn b(i: usize) -> VertexId {
    VertexId::indexed("b", i)
}

/// `x mod (n-2)` with representatives `1..=n-2`.
pub fn residue(x: usize, n: usize) -> usize {
    let m = n - 2;
    (x + m - 1) % m + 1
}

fn check_n(n: usize) -> Result<()> {
    if n < 3 {
        return Err(Error::Precondition(format!("n = {n}, need n >= 3")));
    }
    Ok(())
}

/// Arms of `ₙX₀`.
pub fn x0_arms(n: usize) -> Vec<Walk> {
    let mut arms: Vec<Walk> = (1..=n - 2).map(|i| Walk(vec![v(0), v(i)])).collect();
    arms.push(Walk(vec![v(0), v(n - 1), v(n + 1)]));
    arms.push(Walk(vec![v(0), v(n), v(n + 2)]));
    arms
}

/// Arms of `ₙX₁`.
pub fn x1_arms(n: usize) -> Vec<Walk> {
    let t = n - 3;
    let l = (2 * n - 1) * t;
    let k = l + 2 * (n - 1);
    let mut arms = Vec::with_capacity(n);
    for i in 1..=t {
        let mut arm = vec![v(0)];
        arm.extend((0..=2 * (n - 1)).map(|j| u(j * t + i)));
        arm.push(v(i));
        arms.push(Walk(arm));
    }
    arms.push(Walk(vec![v(0), u(k + 1), v(n - 2)]));
    arms.push(Walk(vec![v(0), u(k + 2), u(k + 3), v(n - 1), v(n + 1)]));
    let mut last = vec![v(0)];
    last.extend((1..=2 * (n - 1)).map(|i| u(l + i)));
    last.extend([v(n), v(n + 2)]);
    arms.push(Walk(last));
    arms
}

/// Arms of `Y₁`.
pub fn y1_arms(n: usize) -> Vec<Walk> {
    let t = n - 3;
    let mut arms = Vec::with_capacity(n);
    for i in 1..=t {
        let mut arm = vec![v(0)];
        arm.extend((0..=n - 2).map(|j| w(j * t + i)));
        arm.push(v(i));
        arms.push(Walk(arm));
    }
    arms.push(Walk(vec![v(0), v(n - 2)]));
    arms.push(Walk(vec![v(0), v(n - 1), v(n + 1)]));
    let mut last = vec![v(0)];
    last.extend((1..=n - 2).map(|i| w((n - 1) * t + i)));
    last.extend([v(n), v(n + 2)]);
    arms.push(Walk(last));
    arms
}

/// Splits arms of a subdivided `ₙX₀` into the arcs of the `ₙX₀` edges.
fn arcs_over_x0(n: usize, arms: &[Walk]) -> Vec<(VertexId, VertexId, Walk)> {
    let mut arcs = Vec::new();
    for (i, arm) in arms.iter().enumerate() {
        let verts = arm.vertices();
        if i + 1 >= n - 1 {
            // arms n-1 and n pass through v(n-1) / v(n) before the final leaf
            let mid = verts.len() - 2;
            arcs.push((verts[0].clone(), verts[mid].clone(), Walk(verts[..=mid].to_vec())));
            arcs.push((verts[mid].clone(), verts[mid + 1].clone(), Walk(verts[mid..].to_vec())));
        } else {
            arcs.push((verts[0].clone(), verts[verts.len() - 1].clone(), arm.clone()));
        }
    }
    arcs
}

fn od_from_arms(arms: &[Walk]) -> Result<SimpleNOd> {
    let mut vertices = BTreeSet::new();
    let mut edges = Vec::new();
    for arm in arms {
        vertices.extend(arm.vertices().iter().cloned());
        edges.extend(arm.vertices().windows(2).map(|p| (p[0].clone(), p[1].clone())));
    }
    let g = Arc::new(Graph::new(vertices, edges)?);
    SimpleNOd::from_arms(g, &v(0), arms)
}

/// `ₙφ(x)` for a vertex of `ₙX₁`.
pub fn phi_value(n: usize, x: &VertexId) -> Result<VertexId> {
    let t = n - 3;
    let l = (2 * n - 1) * t;
    let k = l + 2 * (n - 1);
    let s = x.as_str();
    let idx: usize = s[1..].parse().map_err(|_| Error::UnknownVertex(x.clone()))?;
    let value = match &s[..1] {
        "v" => match idx {
            0 => 0,
            i if i >= 1 && i <= t => n + 2,
            i if i == n - 2 => n + 1,
            i if i == n - 1 || i == n => n,
            i if i == n + 1 || i == n + 2 => n + 2,
            _ => return Err(Error::UnknownVertex(x.clone())),
        },
        "u" if idx >= 1 && idx <= l => {
            let (j, i) = ((idx - 1) / t, (idx - 1) % t + 1);
            if j == 0 {
                n - 1
            } else if j == 2 * (n - 1) {
                n
            } else if j % 2 == 1 {
                0
            } else {
                residue(i - 1 + j / 2, n)
            }
        }
        "u" if idx > l && idx <= k => match idx - l {
            1 => n - 1,
            3 => n - 2,
            i if i % 2 == 0 => 0,
            i => (i - 3) / 2,
        },
        "u" if idx == k + 1 || idx == k + 2 => n - 1,
        "u" if idx == k + 3 => 0,
        _ => return Err(Error::UnknownVertex(x.clone())),
    };
    Ok(v(value))
}

/// Golden description of the duals: `D(ₙX₀)`, `D(ₙφ, ₙX₁)` with its stars
/// and arcs, `d[ₙφ]`, and the edge inverses under `d[ₙφ]`. Vertex names
/// follow the closed-form numbering.
#[derive(Clone, Debug, Serialize)]
pub struct ExpectedDual {
    pub n: usize,
    pub dual_x0: RawGraph,
    pub dual_x0_star: BTreeMap<VertexId, [VertexId; 2]>,
    pub dual_map: RawGraph,
    pub dual_map_star: BTreeMap<VertexId, Vec<[VertexId; 2]>>,
    pub arcs: Vec<Walk>,
    pub d_values: BTreeMap<VertexId, VertexId>,
    pub edge_inverses: Vec<EdgeInverse>,
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct EdgeInverse {
    pub edge: [VertexId; 2],
    pub preimage: Vec<[VertexId; 2]>,
}

fn pair(x: VertexId, y: VertexId) -> [VertexId; 2] {
    if x <= y {
        [x, y]
    } else {
        [y, x]
    }
}

pub fn expected_dual(n: usize) -> Result<ExpectedDual> {
    check_n(n)?;
    let t = n - 3;
    let l = (2 * n - 1) * t;
    let k = l + 2 * (n - 1);
    let nt = n * t;

    let mut dual_x0_star = BTreeMap::new();
    for i in 1..=n {
        dual_x0_star.insert(a(i), pair(v(0), v(i)));
    }
    dual_x0_star.insert(a(n + 1), pair(v(n - 1), v(n + 1)));
    dual_x0_star.insert(a(n + 2), pair(v(n), v(n + 2)));
    let mut x0_edges = Vec::new();
    for i in 1..=n {
        for j in i + 1..=n {
            x0_edges.push(pair(a(i), a(j)));
        }
    }
    x0_edges.push(pair(a(n - 1), a(n + 1)));
    x0_edges.push(pair(a(n), a(n + 2)));
    let dual_x0 = RawGraph { vertices: (1..=n + 2).map(a).collect(), edges: x0_edges };

    let mut star: BTreeMap<VertexId, Vec<[VertexId; 2]>> = BTreeMap::new();
    let mut b0 = Vec::new();
    for i in 1..=t {
        b0.push(pair(v(0), u(i)));
        b0.push(pair(u(i), u(t + i)));
    }
    b0.push(pair(v(0), u(l + 1)));
    b0.push(pair(u(l + 1), u(l + 2)));
    b0.push(pair(v(0), u(k + 1)));
    b0.push(pair(v(0), u(k + 2)));
    b0.push(pair(u(k + 2), u(k + 3)));
    star.insert(b(0), b0);
    for i in 1..=t {
        for j in 0..=n - 3 {
            star.insert(
                b(j * t + i),
                vec![pair(u((2 * j + 1) * t + i), u((2 * j + 2) * t + i)), pair(u((2 * j + 2) * t + i), u((2 * j + 3) * t + i))],
            );
        }
        star.insert(b((n - 2) * t + i), vec![pair(u((2 * n - 3) * t + i), u(2 * (n - 1) * t + i))]);
        star.insert(b((n - 1) * t + i), vec![pair(u(2 * (n - 1) * t + i), v(i))]);
    }
    for i in 1..=n - 2 {
        star.insert(b(nt + i), vec![pair(u(l + 2 * i), u(l + 2 * i + 1)), pair(u(l + 2 * i + 1), u(l + 2 * i + 2))]);
    }
    star.insert(b(nt + n - 1), vec![pair(u(l + 2 * (n - 1)), v(n))]);
    star.insert(b(nt + n), vec![pair(v(n), v(n + 2))]);
    star.insert(b(nt + n + 1), vec![pair(u(k + 1), v(n - 2))]);
    star.insert(b(nt + n + 2), vec![pair(u(k + 3), v(n - 1))]);
    star.insert(b(nt + n + 3), vec![pair(v(n - 1), v(n + 1))]);
    for edges in star.values_mut() {
        edges.sort();
    }

    let mut map_edges = Vec::new();
    for i in (1..=t).chain([nt + 1, nt + n + 1, nt + n + 2]) {
        map_edges.push(pair(b(0), b(i)));
    }
    for i in 1..=t {
        for j in 0..=n - 2 {
            map_edges.push(pair(b(j * t + i), b((j + 1) * t + i)));
        }
    }
    for i in 1..=n - 1 {
        map_edges.push(pair(b(nt + i), b(nt + i + 1)));
    }
    map_edges.push(pair(b(nt + n + 2), b(nt + n + 3)));
    map_edges.sort();
    let dual_map = RawGraph { vertices: (0..=nt + n + 3).map(b).collect(), edges: map_edges };

    let mut arcs = Vec::new();
    for i in 1..=t {
        let mut arc = vec![b(0)];
        arc.extend((0..=n - 1).map(|j| b(j * t + i)));
        arcs.push(Walk(arc));
    }
    arcs.push(Walk(vec![b(0), b(nt + n + 1)]));
    arcs.push(Walk(vec![b(0), b(nt + n + 2), b(nt + n + 3)]));
    let mut last = vec![b(0)];
    last.extend((1..=n).map(|i| b(nt + i)));
    arcs.push(Walk(last));

    let mut d_values = BTreeMap::new();
    d_values.insert(b(0), a(n - 1));
    for i in 1..=t {
        for j in 0..=n - 3 {
            d_values.insert(b(j * t + i), a(residue(i + j, n)));
        }
        d_values.insert(b((n - 2) * t + i), a(n));
        d_values.insert(b((n - 1) * t + i), a(n + 2));
    }
    d_values.insert(b(nt + 1), a(n - 2));
    for i in 2..=n - 2 {
        d_values.insert(b(nt + i), a(i - 1));
    }
    d_values.insert(b(nt + n - 1), a(n));
    d_values.insert(b(nt + n), a(n + 2));
    d_values.insert(b(nt + n + 1), a(n + 1));
    d_values.insert(b(nt + n + 2), a(n));
    d_values.insert(b(nt + n + 3), a(n + 2));

    // a-indices at or below 0 wrap into 1..=n-2; degenerate rows vanish
    let ai = |x: isize| -> usize {
        if x >= 1 {
            x as usize
        } else {
            residue((x + (n as isize - 2) * 2) as usize, n)
        }
    };
    let (ni, ti) = (n as isize, t as isize);
    let bb = |x: usize, y: usize| (x, y);
    let mut rows: Vec<((usize, usize), Vec<(usize, usize)>)> = Vec::new();
    for i in 1..=t {
        rows.push(((n - 1, i), vec![bb(0, i)]));
    }
    rows.push(((n - 1, n - 2), vec![bb(0, nt + 1)]));
    rows.push(((n - 1, n + 1), vec![bb(0, nt + n + 1)]));
    rows.push(((n - 1, n), vec![bb(0, nt + n + 2)]));
    for i in 1..=n.saturating_sub(4) {
        let mut pre = Vec::new();
        for j in 0..i {
            pre.push(bb(j * t + i - j, (j + 1) * t + i - j));
        }
        for j in 1..=(n - 4 - i) {
            pre.push(bb((t - j) * t + i + 1 + j, (n - 2 - j) * t + i + 1 + j));
        }
        pre.push(bb(nt + i + 1, nt + i + 2));
        rows.push(((i, i + 1), pre));
    }
    rows.push(((ai(ni - 3), n - 2), (1..=t).map(|i| bb((t - i) * t + i, (n - 2 - i) * t + i)).collect()));
    for i in 1..=n.saturating_sub(4) {
        rows.push(((i, n), vec![bb(t * t + i + 1, (n - 2) * t + i + 1)]));
    }
    rows.push(((ai(ni - 3), n), vec![bb(nt + n - 2, nt + n - 1)]));
    rows.push(((n - 2, n), vec![bb((ti * ti + 1) as usize, (n - 2) * t + 1)]));
    // not tabulated, but forced by the d-values: the edge joining a(n-2) and a1
    if n >= 4 {
        let mut pre = vec![bb(nt + 1, nt + 2)];
        pre.extend((2..=t).map(|i| bb((n - 2 - i) * t + i, (n - 1 - i) * t + i)));
        rows.push(((n - 2, 1), pre));
    }
    let mut last_row = vec![bb(nt + n - 1, nt + n), bb(nt + n + 2, nt + n + 3)];
    last_row.extend((1..=t).map(|i| bb((n - 2) * t + i, (n - 1) * t + i)));
    rows.push(((n, n + 2), last_row));

    let mut merged: BTreeMap<[VertexId; 2], BTreeSet<[VertexId; 2]>> = BTreeMap::new();
    for ((x, y), pre) in rows {
        if x == y {
            continue;
        }
        let pre: BTreeSet<[VertexId; 2]> = pre.into_iter().filter(|(p, q)| p != q).map(|(p, q)| pair(b(p), b(q))).collect();
        if pre.is_empty() {
            continue;
        }
        merged.entry(pair(a(x), a(y))).or_default().extend(pre);
    }
    let edge_inverses = merged.into_iter().map(|(edge, pre)| EdgeInverse { edge, preimage: pre.into_iter().collect() }).collect();

    Ok(ExpectedDual { n, dual_x0, dual_x0_star, dual_map, dual_map_star: star, arcs, d_values, edge_inverses })
}

/// Matches closed-form `b`-names to computed dual vertices by equal stars.
pub fn pin_dual(expected: &ExpectedDual, computed: &DualOfMap) -> Result<BTreeMap<VertexId, usize>> {
    let mut by_star: BTreeMap<Vec<[VertexId; 2]>, usize> = BTreeMap::new();
    for (i, s) in computed.stars.iter().enumerate() {
        let edges: Vec<[VertexId; 2]> = s.edge_names(&computed.source).into_iter().map(|(x, y)| [x, y]).collect();
        by_star.insert(edges, i);
    }
    let mut pin = BTreeMap::new();
    for (name, edges) in &expected.dual_map_star {
        let i = by_star.get(edges).ok_or_else(|| Error::Precondition(format!("no computed dual vertex has the star of {name}")))?;
        pin.insert(name.clone(), *i);
    }
    if pin.len() != computed.stars.len() {
        return Err(Error::Precondition("computed dual has vertices outside the closed form".into()));
    }
    Ok(pin)
}

/// The concrete family for one `n`.
#[derive(Clone, Debug)]
pub struct FamilyBundle {
    pub n: usize,
    pub x0: SimpleNOd,
    pub x1: SimpleNOd,
    pub x1_over_x0: Subdivision,
    pub phi: SimplicialMap,
    pub selection: EdgeSelection,
    pub y1: SimpleNOd,
    pub y1_over_x0: Subdivision,
    pub dual: DualOfMap,
    /// `ₙλ: Y₁ → D(ₙφ, ₙX₁)`, expressed against the computed dual's names.
    pub lambda: SimplicialMap,
}

/// The closed-form `ₙλ`, in closed-form `b`-names.
pub fn lambda_table(n: usize) -> BTreeMap<VertexId, VertexId> {
    let t = n - 3;
    let nt = n * t;
    let mut m = BTreeMap::new();
    m.insert(v(0), b(0));
    for i in 1..=t {
        m.insert(v(i), b((n - 1) * t + i));
        for j in 0..=n - 2 {
            m.insert(w(j * t + i), b(j * t + i));
        }
    }
    m.insert(v(n - 2), b(nt + n + 1));
    m.insert(v(n - 1), b(nt + n + 2));
    m.insert(v(n), b(nt + n - 1));
    m.insert(v(n + 1), b(nt + n + 3));
    m.insert(v(n + 2), b(nt + n));
    for i in 1..=n - 2 {
        m.insert(w((n - 1) * t + i), b(nt + i));
    }
    m
}

pub fn build_family(n: usize) -> Result<FamilyBundle> {
    check_n(n)?;
    let x0 = od_from_arms(&x0_arms(n))?;
    let x1_arms = x1_arms(n);
    let x1 = od_from_arms(&x1_arms)?;
    let x1_over_x0 = Subdivision::from_arcs(x1.graph().clone(), x0.graph().clone(), &arcs_over_x0(n, &x1_arms))?;
    let phi = SimplicialMap::new(
        x1.graph().clone(),
        x0.graph().clone(),
        x1.graph().vertices().iter().map(|x| phi_value(n, x).map(|y| (x.clone(), y))).collect::<Result<Vec<_>>>()?,
    )?;

    let g0 = x0.graph().clone();
    let mut select = BTreeMap::new();
    for i in 1..=n {
        select.insert(v(i), vec![(v(0), v(i))]);
    }
    select.insert(v(n + 1), vec![(v(n - 1), v(n + 1))]);
    select.insert(v(n + 2), vec![(v(n), v(n + 2))]);
    select.insert(v(0), (1..n).map(|i| (v(0), v(i))).collect());
    let selection = EdgeSelection::from_names(g0.clone(), &select)?;

    let y1_arms = y1_arms(n);
    let y1 = od_from_arms(&y1_arms)?;
    let y1_over_x0 = Subdivision::from_arcs(y1.graph().clone(), g0, &arcs_over_x0(n, &y1_arms))?;

    let dual = dual_of_map(&phi)?;
    let pin = pin_dual(&expected_dual(n)?, &dual)?;
    let lambda = SimplicialMap::new(
        y1.graph().clone(),
        dual.graph.clone(),
        lambda_table(n).into_iter().map(|(x, bx)| (x, dual.graph.name(pin[&bx]).clone())),
    )?;
    Ok(FamilyBundle { n, x0, x1, x1_over_x0, phi, selection, y1, y1_over_x0, dual, lambda })
}
