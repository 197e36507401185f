//! Acceptance run: one PASS/FAIL line per criterion with its time budget.
//!
//! All comparisons are exact (integer and name equality); the only pinned
//! tolerances are the wall-clock budgets below.

use std::collections::{BTreeMap, BTreeSet};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use nodlim::dual::is_ultra_light;
use nodlim::factoring::{claim16_report, persist_report, verify_factorization, RawFactorization, SearchOptions, SearchOutcome, Strategy};
use nodlim::family::{build_family, expected_dual, pin_dual, FamilyBundle};
use nodlim::od::recognize_simple_n_od;
use nodlim::par::Execution;
use nodlim::patterns::{is_palindrome, normal_forms, patterns_recursive, reassemble, PatternSystem};
use nodlim::subdivision::{check_consistency, check_preserves};
use nodlim::{SimplicialMap, VertexId, Walk};

const BUDGET_FAMILY: Duration = Duration::from_secs(1);
const BUDGET_PRESERVES: Duration = Duration::from_secs(1);
const BUDGET_DUAL: Duration = Duration::from_secs(5);
const BUDGET_CONSISTENCY: Duration = Duration::from_secs(5);
const BUDGET_RECURSION: Duration = Duration::from_secs(60);
const BUDGET_NORMAL_FORM: Duration = Duration::from_secs(60);
const BUDGET_FACTOR_PER_N: Duration = Duration::from_secs(600);
const BUDGET_ORACLE: Duration = Duration::from_secs(60);

type Check = std::result::Result<(), String>;

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

fn v(i: usize) -> String {
    format!("v{i}")
}

fn u(i: usize) -> String {
    format!("u{i}")
}

fn names(w: &Walk) -> Vec<String> {
    w.vertices().iter().map(|x| x.as_str().to_string()).collect()
}

fn residue(x: usize, n: usize) -> usize {
    match x % (n - 2) {
        0 => n - 2,
        r => r,
    }
}

/// Table 2, row by row.
fn table_x1(n: usize) -> Vec<Vec<String>> {
    let t = n - 3;
    let l = (2 * n - 1) * t;
    let k = l + 2 * (n - 1);
    let mut arms = Vec::new();
    for i in 1..=t {
        let mut arm = vec![v(0)];
        for j in 0..=2 * (n - 1) {
            arm.push(u(j * t + i));
        }
        arm.push(v(i));
        arms.push(arm);
    }
    arms.push(vec![v(0), u(k + 1), v(n - 2)]);
    arms.push(vec![v(0), u(k + 2), u(k + 3), v(n - 1), v(n + 1)]);
    let mut last = vec![v(0)];
    last.extend((l + 1..=l + 2 * (n - 1)).map(u));
    last.extend([v(n), v(n + 2)]);
    arms.push(last);
    arms
}

/// Table 3, row by row; a vertex named by two rows is an error.
fn table_phi(n: usize) -> std::result::Result<BTreeMap<String, String>, String> {
    let t = n - 3;
    let l = (2 * n - 1) * t;
    let k = l + 2 * (n - 1);
    let mut rows: Vec<(String, usize)> = vec![(v(0), 0)];
    rows.extend((1..=t).map(|i| (v(i), n + 2)));
    rows.extend([(v(n - 2), n + 1), (v(n - 1), n), (v(n), n), (v(n + 1), n + 2), (v(n + 2), n + 2)]);
    rows.extend((1..=t).map(|i| (u(i), n - 1)));
    for i in 1..=t {
        for j in (1..2 * (n - 1)).step_by(2) {
            rows.push((u(j * t + i), 0));
        }
        for j in (2..=2 * (n - 1) - 2).step_by(2) {
            rows.push((u(j * t + i), residue(i - 1 + j / 2, n)));
        }
        rows.push((u(2 * (n - 1) * t + i), n));
    }
    rows.push((u(l + 1), n - 1));
    rows.extend((2..=2 * (n - 1)).step_by(2).map(|i| (u(l + i), 0)));
    rows.push((u(l + 3), n - 2));
    rows.extend((5..2 * (n - 1)).step_by(2).map(|i| (u(l + i), (i - 3) / 2)));
    rows.extend([(u(k + 1), n - 1), (u(k + 2), n - 1), (u(k + 3), 0)]);
    let mut table = BTreeMap::new();
    for (x, y) in rows {
        if table.insert(x.clone(), v(y)).is_some() {
            return Err(format!("n = {n}: {x} assigned twice"));
        }
    }
    Ok(table)
}

fn criterion_family() -> Check {
    for (n, u_count) in [(3, 7), (4, 16), (5, 29)] {
        let f = build_family(n).map_err(|e| e.to_string())?;
        let g = f.x1.graph();
        let us = g.vertices().iter().filter(|x| x.as_str().starts_with('u')).count();
        ensure!(us == u_count, "n = {n}: {us} u-vertices, expected {u_count}");
        ensure!(g.vertex_count() == u_count + n + 3, "n = {n}: vertex count {}", g.vertex_count());

        let arms: BTreeSet<Vec<String>> = f.x1.arms().iter().map(names).collect();
        let table: BTreeSet<Vec<String>> = table_x1(n).into_iter().collect();
        ensure!(arms == table, "n = {n}: arm routing differs from the table");

        let phi = table_phi(n)?;
        let computed: BTreeMap<String, String> =
            f.phi.assignment_names().into_iter().map(|(x, y)| (x.as_str().to_string(), y.as_str().to_string())).collect();
        ensure!(computed == phi, "n = {n}: phi differs from the table");

        let arcs: BTreeSet<Vec<String>> = f.x0.arms().iter().map(names).collect();
        let mut x0: BTreeSet<Vec<String>> = (1..=n - 2).map(|i| vec![v(0), v(i)]).collect();
        x0.insert(vec![v(0), v(n - 1), v(n + 1)]);
        x0.insert(vec![v(0), v(n), v(n + 2)]);
        ensure!(arcs == x0, "n = {n}: X0 arms differ");
    }
    let f = build_family(3).map_err(|e| e.to_string())?;
    let arm3 = Walk(["v0", "u1", "u2", "u3", "u4", "v3", "v5"].map(VertexId::new).to_vec());
    let trace: Vec<String> = arm3.vertices().iter().map(|x| f.phi.image(x).unwrap().as_str().to_string()).collect();
    ensure!(trace.join(",") == "v0,v2,v0,v1,v0,v3,v5", "n = 3 trace {}", trace.join(","));
    Ok(())
}

fn criterion_preserves() -> Check {
    for n in 3..=8 {
        let f = build_family(n).map_err(|e| e.to_string())?;
        let r = check_preserves(&f.phi, &f.x1_over_x0, &f.selection, &f.selection).map_err(|e| e.to_string())?;
        ensure!(r.holds(), "n = {n}: {r:?}");
    }
    Ok(())
}

/// Computed dual against the closed-form tables: edges, d-values and edge
/// inverses, all under the pinned isomorphism.
fn dual_agrees(f: &FamilyBundle) -> Check {
    let n = f.n;
    let e = expected_dual(n).map_err(|e| e.to_string())?;
    let pin = pin_dual(&e, &f.dual).map_err(|e| e.to_string())?;
    let g = &f.dual.graph;
    let name = |b: &VertexId| g.name(pin[b]).clone();
    let sorted = |p: VertexId, q: VertexId| if p <= q { (p, q) } else { (q, p) };

    ensure!(g.vertex_count() == e.dual_map.vertices.len(), "n = {n}: dual vertex count");
    let expected: BTreeSet<_> = e.dual_map.edges.iter().map(|[x, y]| sorted(name(x), name(y))).collect();
    let computed: BTreeSet<_> = (0..g.edge_count())
        .map(|k| {
            let (p, q) = g.edge_names(k);
            sorted(p.clone(), q.clone())
        })
        .collect();
    ensure!(expected == computed, "n = {n}: dual edges differ");

    let target = &f.dual.target;
    let x0 = f.phi.codomain();
    for (b, a) in &e.d_values {
        let edge = target.star(f.dual.induced.at(pin[b]));
        let (x, y) = x0.edge_names(edge);
        ensure!([x.clone(), y.clone()] == e.dual_x0_star[a], "n = {n}: d({b})");
    }

    let a_idx = |a: &VertexId| {
        let s = &e.dual_x0_star[a];
        target.vertex_of_edge(x0.edge_id_by_name(&s[0], &s[1]).unwrap())
    };
    let mut inv_computed: BTreeMap<(usize, usize), BTreeSet<(VertexId, VertexId)>> = BTreeMap::new();
    for &(p, q) in g.edges() {
        let (x, y) = (f.dual.induced.at(p), f.dual.induced.at(q));
        inv_computed.entry((x.min(y), x.max(y))).or_default().insert(sorted(g.name(p).clone(), g.name(q).clone()));
    }
    let mut inv_expected = BTreeMap::new();
    for row in &e.edge_inverses {
        let (x, y) = (a_idx(&row.edge[0]), a_idx(&row.edge[1]));
        let set: BTreeSet<_> = row.preimage.iter().map(|[p, q]| sorted(name(p), name(q))).collect();
        inv_expected.insert((x.min(y), x.max(y)), set);
    }
    ensure!(inv_expected == inv_computed, "n = {n}: edge inverses differ");

    let od = recognize_simple_n_od(g, None).map_err(|e| e.to_string())?;
    ensure!(od.branch() == pin[&VertexId::new("b0")] && od.arm_count() == n, "n = {n}: dual is not an n-od at b0");
    Ok(())
}

fn criterion_dual() -> Check {
    for n in 3..=8 {
        let f = build_family(n).map_err(|e| e.to_string())?;
        ensure!(is_ultra_light(&f.dual.induced), "n = {n}: not ultra light");
        let e = expected_dual(n).map_err(|e| e.to_string())?;
        let pin = pin_dual(&e, &f.dual).map_err(|e| e.to_string())?;
        let edge = f.dual.target.star(f.dual.induced.at(pin[&VertexId::new("b0")]));
        let (x, y) = f.phi.codomain().edge_names(edge);
        ensure!((x.as_str(), y.as_str()) == ("v0", v(n - 1).as_str()), "n = {n}: d(b0) is over {x}-{y}");
        ensure!(e.d_values[&VertexId::new("b0")] == VertexId::new(format!("a{}", n - 1)), "n = {n}: table d(b0)");
        dual_agrees(&f)?;
        if n == 5 {
            ensure!(f.dual.graph.vertex_count() == 19, "n = 5: {} dual vertices", f.dual.graph.vertex_count());
        }
    }
    Ok(())
}

fn criterion_consistency() -> Check {
    for n in 3..=6 {
        let f = build_family(n).map_err(|e| e.to_string())?;
        let r = check_consistency(&f.phi, &f.x1_over_x0, &f.selection, &f.y1_over_x0, &f.lambda).map_err(|e| e.to_string())?;
        ensure!(r.holds(), "n = {n}: {r:?}");
    }
    Ok(())
}

fn criterion_recursion() -> Check {
    for n in 3..=5 {
        let rec = patterns_recursive(n, 6).map_err(|e| e.to_string())?;
        let mut sys = PatternSystem::new(n).map_err(|e| e.to_string())?;
        for m in 1..=6 {
            let direct = sys.patterns(m, Execution::Parallel).map_err(|e| e.to_string())?;
            for i in 1..=n {
                ensure!(rec[m][i - 1].walk == direct[i - 1].walk, "n = {n}, m = {m}, arm {i}");
            }
            ensure!(direct[n - 3].walk == rec[m - 1][n - 2].walk, "n = {n}, m = {m}: clause (ii)");
        }
    }
    Ok(())
}

fn criterion_normal_form() -> Check {
    let suffixes = [(3, "v0,v2,v0,v1,v0,v3,v5"), (4, "v0,v3,v0,v2,v0,v1,v0,v4,v6"), (5, "v0,v4,v0,v3,v0,v1,v0,v2,v0,v5,v7")];
    for (n, suffix) in suffixes {
        let rec = patterns_recursive(n, 5).map_err(|e| e.to_string())?;
        let special = [v(n), v(n + 1), v(n + 2)];
        for m in 3..=5 {
            let forms = normal_forms(&rec[m]).map_err(|e| format!("n = {n}, m = {m}: {e}"))?;
            for (f, p) in forms.iter().zip(&rec[m]) {
                let at = format!("n = {n}, m = {m}, arm {}", p.arm);
                ensure!(reassemble(f).map_err(|e| e.to_string())? == p.walk, "{at}: reassembly");
                ensure!(names(&f.suffix).join(",") == suffix, "{at}: suffix {}", f.suffix);
                ensure!(names(&p.walk).join(",").ends_with(suffix), "{at}: pattern lacks the suffix");
                for b in &f.blocks {
                    let w = names(b);
                    ensure!(w.iter().eq(w.iter().rev()) && w.len() % 2 == 1, "{at}: block {b} not a palindrome");
                    ensure!(special.contains(&w[w.len() / 2]), "{at}: block {b} centered on {}", w[w.len() / 2]);
                    // v_n precedes any v_{n+2}, so only the center's own count is pinned
                    let top = [v(n + 1), v(n + 2), v(n)].into_iter().find(|s| w.contains(s)).unwrap();
                    ensure!(w[w.len() / 2] == top, "{at}: block {b} not centered on {top}");
                    ensure!(w.iter().filter(|x| **x == top).count() == 1, "{at}: {top} repeats in {b}");
                    ensure!(is_palindrome(b).0, "{at}: library palindrome check disagrees");
                }
            }
        }
    }
    Ok(())
}

fn criterion_factoring() -> Check {
    let strategies = [Strategy::Congruence, Strategy::Lift];
    for n in 3..=5 {
        let start = Instant::now();
        let ks: Vec<usize> = (1..=n).collect();
        let rows = claim16_report(n, 1, &ks, &strategies, &SearchOptions::new(1, true, Strategy::Congruence)).map_err(|e| e.to_string())?;
        let f = build_family(n).map_err(|e| e.to_string())?;
        for row in &rows {
            ensure!(row.agree, "n = {n}, k = {}: strategies disagree {:?}", row.k, row.verdicts);
            for (s, out, _) in &row.outcomes {
                let at = format!("n = {n}, k = {}, {}", row.k, s.name());
                match (row.k < n, out) {
                    (true, SearchOutcome::Refuted(cert)) => {
                        ensure!(cert.bounds.k_max == row.k && cert.bounds.anchored, "{at}: certificate bounds");
                        ensure!(cert.strategy == *s, "{at}: certificate strategy");
                    }
                    (false, SearchOutcome::Found { witness, .. }) => {
                        let r = verify_factorization(&f.phi, &witness.to_raw(), true);
                        ensure!(r.is_valid() && r.arm_count == Some(n), "{at}: witness {r:?}");
                    }
                    _ => return Err(format!("{at}: unexpected {:?}", out.verdict())),
                }
            }
        }
        let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
        let files = persist_report(n, 1, &rows, dir.path()).map_err(|e| e.to_string())?;
        ensure!(files.len() == 2 * n, "n = {n}: {} certificate files", files.len());
        // identity-beta control
        let x0 = f.x0.graph().clone();
        let control = RawFactorization {
            target: x0.to_raw(),
            branch: VertexId::new("v0"),
            alpha: f.phi.assignment_names(),
            beta: SimplicialMap::identity(x0).assignment_names(),
        };
        let r = verify_factorization(&f.phi, &control, true);
        ensure!(r.is_valid() && r.arm_count == Some(n), "n = {n}: identity control {r:?}");
        ensure!(start.elapsed() <= BUDGET_FACTOR_PER_N, "n = {n}: over budget");
    }
    Ok(())
}

/// `|E(X_m)|` from arc lengths alone: the arc over an `X_0` edge at level
/// `m` has, for each edge of its level-1 arc, the length of the level-`m-1`
/// arc over that edge's image.
fn edge_count_formula(n: usize, m: usize) -> usize {
    let phi = table_phi(n).unwrap();
    let arms = table_x1(n);
    let mut x0_edges: Vec<(String, String)> = Vec::new();
    let mut level1: Vec<Vec<(String, String)>> = Vec::new();
    for arm in &arms {
        // arms n-1 and n cross v_{n-1} and v_n, which split them into two arcs
        let mut cur = vec![arm[0].clone()];
        for x in &arm[1..] {
            cur.push(x.clone());
            if x.starts_with('v') {
                x0_edges.push((cur[0].clone(), x.clone()));
                level1.push(cur.windows(2).map(|w| (w[0].clone(), w[1].clone())).collect());
                cur = vec![x.clone()];
            }
        }
    }
    let key = |a: &str, b: &str| x0_edges.iter().position(|(x, y)| (x == a && y == b) || (x == b && y == a)).unwrap();
    let mut len: Vec<usize> = vec![1; x0_edges.len()];
    for _ in 0..m {
        len = level1.iter().map(|arc| arc.iter().map(|(a, b)| len[key(&phi[a], &phi[b])]).sum()).collect();
    }
    len.iter().sum()
}

fn criterion_oracle() -> Check {
    for n in 3..=8 {
        let f = build_family(n).map_err(|e| e.to_string())?;
        dual_agrees(&f)?;
    }
    for n in 3..=5 {
        let mut sys = PatternSystem::new(n).map_err(|e| e.to_string())?;
        sys.extend_to(4).map_err(|e| e.to_string())?;
        for m in 0..=4 {
            let got = sys.system().level(m).graph.edge_count();
            let want = edge_count_formula(n, m);
            ensure!(got == want, "n = {n}: |E(X{m})| = {got}, formula gives {want}");
        }
    }
    let mut sys = PatternSystem::new(3).map_err(|e| e.to_string())?;
    sys.extend_to(2).map_err(|e| e.to_string())?;
    let e2 = sys.system().level(2).graph.edge_count();
    ensure!(e2 == 32 && edge_count_formula(3, 2) == 32, "n = 3: |E(X2)| = {e2}");
    Ok(())
}

fn main() -> ExitCode {
    let criteria: [(&str, Duration, fn() -> Check); 8] = [
        ("C1 family tables reproduced (n = 3..5)", BUDGET_FAMILY, criterion_family),
        ("C2 selection preserved (n = 3..8)", BUDGET_PRESERVES, criterion_preserves),
        ("C3 ultra light dual map, d(b0) = a(n-1), dual structure (n = 3..8)", BUDGET_DUAL, criterion_dual),
        ("C4 consistency isomorphism (n = 3..6)", BUDGET_CONSISTENCY, criterion_consistency),
        ("C5 pattern recursion equals direct (n = 3..5, m = 1..6)", BUDGET_RECURSION, criterion_recursion),
        ("C6 palindromic normal forms and suffix (n = 3..5, m = 3..5)", BUDGET_NORMAL_FORM, criterion_normal_form),
        ("C7 no anchored factorization below n arms at m = 1 (n = 3..5)", BUDGET_FACTOR_PER_N * 3, criterion_factoring),
        ("C8 closed-form duals (n = 3..8) and edge counts", BUDGET_ORACLE, criterion_oracle),
    ];
    let mut failed = 0;
    for (label, budget, run) in criteria {
        let start = Instant::now();
        let result = run();
        let took = start.elapsed();
        let result = match result {
            Ok(()) if took > budget => Err("over time budget".to_string()),
            r => r,
        };
        match result {
            Ok(()) => println!("PASS  {label}  [{:.2}s, budget {}s, exact]", took.as_secs_f64(), budget.as_secs()),
            Err(why) => {
                failed += 1;
                println!("FAIL  {label}  [{:.2}s, budget {}s, exact]: {why}", took.as_secs_f64(), budget.as_secs());
            }
        }
    }
    println!("{} of 8 criteria passed", 8 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
