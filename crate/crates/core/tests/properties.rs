use std::sync::Arc;

use nodlim::graph::{Graph, VertexId, Walk};
use nodlim::map::{map_properties, SimplicialMap};
use nodlim::patterns::{apply_walk, wedge, PatternSystem};
use nodlim::subdivision::{check_subdivision, subdivide_map, Subdivision};
use proptest::prelude::*;
use proptest::sample::Index;

fn tree(prefix: &str, parents: &[Index]) -> Arc<Graph> {
    let name = |i: usize| VertexId::indexed(prefix, i);
    let vs: Vec<VertexId> = (0..=parents.len()).map(name).collect();
    let es: Vec<(VertexId, VertexId)> = parents.iter().enumerate().map(|(k, p)| (name(p.index(k + 1)), name(k + 1))).collect();
    Arc::new(Graph::new(vs, es).unwrap())
}

/// Simplicial map from a tree: each vertex moves from its parent's image to
/// a neighbor, or stays put when `light` is false.
fn tree_map(dom: &Arc<Graph>, cod: &Arc<Graph>, root: Index, moves: &[Index], light: bool) -> SimplicialMap {
    let n = dom.vertex_count();
    let mut img = vec![usize::MAX; n];
    let r = dom.index_of(&dom.vertices()[0]).unwrap();
    img[r] = root.index(cod.vertex_count());
    let mut queue = std::collections::VecDeque::from([r]);
    let mut k = 0;
    while let Some(x) = queue.pop_front() {
        for &y in dom.neighbors(x) {
            if img[y] != usize::MAX {
                continue;
            }
            let nb = cod.neighbors(img[x]);
            let options = if light { nb.len() } else { nb.len() + 1 };
            let c = moves[k % moves.len()].index(options);
            k += 1;
            img[y] = if c < nb.len() { nb[c] } else { img[x] };
            queue.push_back(y);
        }
    }
    SimplicialMap::from_indices(dom.clone(), cod.clone(), img).unwrap()
}

fn subdivide(coarse: &Arc<Graph>, lengths: &[usize]) -> Subdivision {
    let mut vs = coarse.vertices().to_vec();
    let mut es = Vec::new();
    let mut arcs = Vec::new();
    for (e, &(a, b)) in coarse.edges().iter().enumerate() {
        let len = lengths[e % lengths.len()];
        let mut arc = vec![coarse.name(a).clone()];
        for k in 1..len {
            let v = VertexId::new(format!("s{e}_{k}"));
            vs.push(v.clone());
            arc.push(v);
        }
        arc.push(coarse.name(b).clone());
        for w in arc.windows(2) {
            es.push((w[0].clone(), w[1].clone()));
        }
        arcs.push((coarse.name(a).clone(), coarse.name(b).clone(), Walk(arc)));
    }
    let fine = Arc::new(Graph::new(vs, es).unwrap());
    Subdivision::from_arcs(fine, coarse.clone(), &arcs).unwrap()
}

fn random_walk(g: &Graph, start: Index, steps: &[Index]) -> Walk {
    random_walk_from(g, start.index(g.vertex_count()), steps)
}

fn parents(max: usize) -> impl Strategy<Value = Vec<Index>> {
    prop::collection::vec(any::<Index>(), 1..max)
}

fn moves() -> impl Strategy<Value = Vec<Index>> {
    prop::collection::vec(any::<Index>(), 1..40)
}

proptest! {
    #[test]
    fn compose_is_associative(
        pa in parents(12), pb in parents(10), pc in parents(8), pd in parents(6),
        r in any::<[Index; 3]>(), m1 in moves(), m2 in moves(), m3 in moves(),
    ) {
        let (a, b, c, d) = (tree("a", &pa), tree("b", &pb), tree("c", &pc), tree("d", &pd));
        let f = tree_map(&a, &b, r[0], &m1, false);
        let g = tree_map(&b, &c, r[1], &m2, false);
        let h = tree_map(&c, &d, r[2], &m3, false);
        let left = h.compose(&g).unwrap().compose(&f).unwrap();
        let right = h.compose(&g.compose(&f).unwrap()).unwrap();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn apply_walk_respects_wedge_and_reversal(
        pa in parents(12), pb in parents(8), r in any::<Index>(), m in moves(),
        s1 in any::<Index>(), w1 in moves(), w2 in moves(),
    ) {
        let (a, b) = (tree("a", &pa), tree("b", &pb));
        let f = tree_map(&a, &b, r, &m, true);
        let p = random_walk(&a, s1, &w1);
        let start = a.index_of(p.last().unwrap()).unwrap();
        let q = random_walk_from(&a, start, &w2);
        let joined = apply_walk(&f, &wedge(&p, &q).unwrap()).unwrap();
        let parts = wedge(&apply_walk(&f, &p).unwrap(), &apply_walk(&f, &q).unwrap()).unwrap();
        prop_assert_eq!(&joined, &parts);
        prop_assert_eq!(apply_walk(&f, &p.reversed()).unwrap(), apply_walk(&f, &p).unwrap().reversed());
    }

    #[test]
    fn subdivide_map_is_simplicial_and_keeps_lightness(
        pa in parents(10), pb in parents(7), r in any::<Index>(), m in moves(),
        light in any::<bool>(), lengths in prop::collection::vec(1usize..4, 1..8),
    ) {
        let (a, b) = (tree("a", &pa), tree("b", &pb));
        let f = tree_map(&a, &b, r, &m, light);
        let s = subdivide(&b, &lengths);
        prop_assert!(check_subdivision(&s).is_valid());
        let (fp, over) = subdivide_map(&f, &s).unwrap();
        prop_assert!(map_properties(&fp).simplicial);
        prop_assert_eq!(fp.is_light(), f.is_light());
        prop_assert!(check_subdivision(&over).is_valid());
        let expected: usize = (0..a.edge_count())
            .map(|e| f.edge_image(e).map_or(1, |d| s.arc(d).len() - 1))
            .sum();
        prop_assert_eq!(fp.domain().edge_count(), expected);
    }
}

fn random_walk_from(g: &Graph, start: usize, steps: &[Index]) -> Walk {
    let mut cur = start;
    let mut out = vec![g.name(cur).clone()];
    for s in steps {
        let nb = g.neighbors(cur);
        cur = nb[s.index(nb.len())];
        out.push(g.name(cur).clone());
    }
    Walk(out)
}

#[test]
fn family_systems_are_transitive() {
    for n in 3..=4 {
        let mut sys = PatternSystem::new(n).unwrap();
        sys.extend_to(3).unwrap();
        let sys = sys.system();
        for j in 0..=3 {
            assert!(check_subdivision(&sys.level(j).over_base).is_valid(), "n = {n}, level {j}");
            let phi = sys.composite(0, j).unwrap();
            assert!(phi.is_light() && phi.is_surjective());
        }
        for i in 0..=3 {
            for j in i..=3 {
                for k in j..=3 {
                    let direct = sys.composite(i, k).unwrap();
                    let split = sys.composite(i, j).unwrap().compose(&sys.composite(j, k).unwrap()).unwrap();
                    assert_eq!(*direct, split, "n = {n}, ({i}, {j}, {k})");
                }
            }
        }
    }
}
