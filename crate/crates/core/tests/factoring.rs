use nodlim::factoring::{claim16_report, persist_report, search_factorization, verify_factorization, SearchOptions, Strategy, Verdict};
use nodlim::par::Execution;
use nodlim::patterns::PatternSystem;

fn strategies() -> [Strategy; 2] {
    [Strategy::Congruence, Strategy::Lift]
}

#[test]
fn first_bonding_map_needs_n_arms() {
    for n in 3..=5 {
        let ks: Vec<usize> = (1..=n).collect();
        let rows = claim16_report(n, 1, &ks, &strategies(), &SearchOptions::new(1, true, Strategy::Congruence)).unwrap();
        for row in rows {
            assert!(row.agree, "n = {n}, k = {}: {:?}", row.k, row.verdicts);
            let expected = if row.k < n { Verdict::Refuted } else { Verdict::Found };
            for (s, out, _) in &row.outcomes {
                assert_eq!(out.verdict(), expected, "n = {n}, k = {}, {s:?}", row.k);
            }
        }
    }
}

#[test]
fn certificates_are_persisted() {
    let rows = claim16_report(3, 1, &[2, 3], &strategies(), &SearchOptions::new(1, true, Strategy::Congruence)).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let files = persist_report(3, 1, &rows, dir.path()).unwrap();
    assert_eq!(files.len(), 4);
    let refuted: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("n3_m1_k2_lift.json")).unwrap()).unwrap();
    assert_eq!(refuted["result"]["verdict"], "Refuted");
    assert_eq!(refuted["result"]["certificate"]["bounds"]["k_max"], 2);
    assert!(refuted["result"]["certificate"]["wall_clock_ms"].is_u64());
    let found: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("n3_m1_k3_congruence.json")).unwrap()).unwrap();
    assert_eq!(found["result"]["verdict"], "Found");
}

#[test]
fn witnesses_are_valid_and_mode_independent() {
    let mut sys = PatternSystem::new(4).unwrap();
    sys.extend_to(1).unwrap();
    let phi = sys.system().composite(0, 1).unwrap();
    for s in strategies() {
        let mut par = SearchOptions::new(4, true, s);
        let a = search_factorization(&phi, &par).unwrap();
        par.execution = Execution::Sequential;
        let b = search_factorization(&phi, &par).unwrap();
        let (a, b) = (a.witness().unwrap(), b.witness().unwrap());
        assert_eq!(a.to_raw(), b.to_raw());
        let report = verify_factorization(&phi, &a.to_raw(), true);
        assert!(report.is_valid(), "{report:?}");
        assert_eq!(report.arm_count, Some(4));
        let padded = a.padded().unwrap();
        assert!(verify_factorization(&phi, &padded.to_raw(), true).is_valid());
    }
}

mod random {
    use std::sync::Arc;

    use nodlim::factoring::{search_factorization, verify_factorization, SearchOptions, Strategy, Verdict};
    use nodlim::family::build_family;
    use nodlim::graph::{Graph, VertexId};
    use nodlim::map::SimplicialMap;
    use proptest::prelude::*;
    use proptest::sample::Index;

    /// Light map from a random tree into `X0` for n = 3, walked out from `v0`.
    fn light_map(parents: &[Index], moves: &[Index]) -> SimplicialMap {
        let x0 = build_family(3).unwrap().x0.graph().clone();
        let name = |i: usize| VertexId::indexed("x", i);
        let vs: Vec<VertexId> = (0..=parents.len()).map(name).collect();
        let es: Vec<_> = parents.iter().enumerate().map(|(k, p)| (name(p.index(k + 1)), name(k + 1))).collect();
        let dom = Arc::new(Graph::new(vs.clone(), es.clone()).unwrap());
        let mut img = std::collections::BTreeMap::new();
        img.insert(name(0), x0.index_of(&"v0".into()).unwrap());
        for (k, (p, c)) in es.iter().enumerate() {
            let at = img[p];
            let nb = x0.neighbors(at);
            img.insert(c.clone(), nb[moves[k % moves.len()].index(nb.len())]);
        }
        // restrict the codomain to the image subtree so the map is onto
        let hit: std::collections::BTreeSet<usize> = img.values().copied().collect();
        let sub_es: Vec<_> = x0
            .edges()
            .iter()
            .filter(|(a, b)| hit.contains(a) && hit.contains(b))
            .map(|&(a, b)| (x0.name(a).clone(), x0.name(b).clone()))
            .collect();
        let cod = Arc::new(Graph::new(hit.iter().map(|&y| x0.name(y).clone()), sub_es).unwrap());
        let assign = img.into_iter().map(|(x, y)| (x, x0.name(y).clone()));
        SimplicialMap::new(dom, cod, assign).unwrap()
    }

    fn outcome(phi: &SimplicialMap, k: usize, anchored: bool, s: Strategy) -> nodlim::factoring::SearchOutcome {
        search_factorization(phi, &SearchOptions::new(k, anchored, s)).unwrap()
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn search_invariants(
            parents in prop::collection::vec(any::<Index>(), 4..14),
            moves in prop::collection::vec(any::<Index>(), 1..20),
        ) {
            let phi = light_map(&parents, &moves);
            prop_assert!(phi.is_surjective() && phi.is_light());
            let mut found_at = None;
            for k in 1..=3 {
                let a = outcome(&phi, k, true, Strategy::Congruence);
                let b = outcome(&phi, k, true, Strategy::Lift);
                prop_assert_eq!(a.verdict(), b.verdict());
                prop_assert_ne!(a.verdict(), Verdict::Inconclusive);
                if let Some(w) = a.witness() {
                    prop_assert!(verify_factorization(&phi, &w.to_raw(), true).is_valid());
                    prop_assert!(verify_factorization(&phi, &w.padded().unwrap().to_raw(), true).is_valid());
                    prop_assert_eq!(outcome(&phi, k, false, Strategy::Congruence).verdict(), Verdict::Found);
                    found_at.get_or_insert(k);
                } else {
                    prop_assert!(found_at.is_none(), "found at a smaller k but refuted at {}", k);
                }
                if let Some(w) = b.witness() {
                    prop_assert!(verify_factorization(&phi, &w.to_raw(), true).is_valid());
                }
            }
            prop_assert_eq!(found_at.map(|_| ()), Some(()));
        }
    }
}
