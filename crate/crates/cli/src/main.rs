//! `nodlim`: command-line front end for the simple-n-od family, its duals,
//! inverse systems, arm patterns and factorization searches.
//!
//! Exit codes: 0 success or Found, 1 Refuted or a failed check,
//! 2 Inconclusive or a runtime error, 64 usage error.

use std::fs;
use std::ops::RangeInclusive;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;
use std::time::{Duration, Instant};

use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use nodlim::dot::{graph_to_dot, map_to_dot};
use nodlim::dual::{dual_graph, dual_of_map, is_ultra_light};
use nodlim::factoring::{search_factorization, SearchOptions, SearchOutcome, Strategy, Verdict};
use nodlim::family::{build_family, expected_dual, v, FamilyBundle};
use nodlim::map::RawMap;
use nodlim::od::recognize_simple_n_od;
use nodlim::par::{self, Execution};
use nodlim::patterns::{normal_forms, pattern_direct, patterns_recursive, PatternSystem};
use nodlim::subdivision::{check_consistency, check_preserves};
use nodlim::SimplicialMap;

mod schemas;

const EXIT_REFUTED: u8 = 1;
const EXIT_INCONCLUSIVE: u8 = 2;
const EXIT_USAGE: u8 = 64;

#[derive(Parser, Debug)]
#[command(name = "nodlim", version, about = "Simplicial bonding maps between simple-n-ods")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build the family for one n and emit it as JSON.
    Family {
        #[arg(long)]
        n: usize,
        /// Emit the closed-form dual record instead.
        #[arg(long)]
        golden: bool,
        /// Directory for one JSON file per component (stdout otherwise).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Dual of the family map, or of a map read from JSON.
    Dual {
        #[arg(long, required_unless_present = "map", conflicts_with = "map")]
        n: Option<usize>,
        #[arg(long)]
        map: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate the inverse system to a depth and report its manifest.
    System {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 2)]
        depth: usize,
        /// Directory for level files and manifest.json.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Image of one arm of X_m in X_0.
    Expand {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        arm: usize,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a property suite over a range of n.
    Check {
        #[arg(long, value_enum)]
        prop: Prop,
        /// Inclusive range such as 3..8, or a single value.
        #[arg(long, default_value = "3..8")]
        n: String,
        /// Levels for claim7 (default 1..6) and claim8 (default 3..5).
        #[arg(long)]
        m: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Search for a factorization of Phi_0^m through a simple-k-od.
    Factor {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        m: usize,
        /// Largest arm count; a range runs each value.
        #[arg(long)]
        k: String,
        #[arg(long)]
        anchored: bool,
        #[arg(long, value_enum, default_value_t = StrategyArg::Both)]
        strategy: StrategyArg,
        /// Seconds per search.
        #[arg(long)]
        timeout: Option<f64>,
        #[arg(long)]
        node_budget: Option<u64>,
        /// Worker threads; 0 keeps the default pool.
        #[arg(long, default_value_t = 0)]
        jobs: usize,
        #[arg(long)]
        sequential: bool,
        /// Certificate file (includes wall-clock times).
        #[arg(long)]
        certificate: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write DOT files for the levels, composites and duals.
    ExportDot {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        depth: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Print the JSON schema of a subcommand's output.
    Schema {
        #[arg(value_enum)]
        name: schemas::Name,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Prop {
    Claim3,
    Claim4,
    Claim5,
    Claim7,
    Claim8,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum StrategyArg {
    Congruence,
    Lift,
    Both,
}

/// A usage problem found after parsing.
#[derive(Debug)]
struct Usage(String);

impl std::fmt::Display for Usage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    Usage(msg.into()).into()
}

fn parse_range(s: &str) -> Result<RangeInclusive<usize>> {
    let bad = || usage(format!("bad range {s:?}; expected a..b, a..=b or a single value"));
    let (lo, hi) = match s.split_once("..") {
        Some((a, b)) => (a.trim(), b.trim().trim_start_matches('=')),
        None => (s.trim(), s.trim()),
    };
    let (lo, hi): (usize, usize) = (lo.parse().map_err(|_| bad())?, hi.parse().map_err(|_| bad())?);
    if lo > hi {
        return Err(bad());
    }
    Ok(lo..=hi)
}

fn need_n(n: usize) -> Result<()> {
    if n < 3 {
        return Err(usage(format!("n must be at least 3, got {n}")));
    }
    Ok(())
}

fn emit(value: &Value, out: Option<&Path>) -> Result<()> {
    let text = serde_json::to_string_pretty(value)? + "\n";
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn write_json(dir: &Path, name: &str, value: &Value, files: &mut Vec<String>) -> Result<()> {
    fs::write(dir.join(name), serde_json::to_string_pretty(value)? + "\n")?;
    files.push(name.to_string());
    Ok(())
}

fn family_json(f: &FamilyBundle) -> Vec<(&'static str, Value)> {
    vec![
        ("x0", json!(f.x0.graph().to_raw())),
        ("x1", json!(f.x1.graph().to_raw())),
        ("x1_over_x0", json!(f.x1_over_x0.to_json())),
        ("phi", json!(f.phi.to_raw())),
        ("selection", json!(f.selection.to_names())),
        ("y1", json!(f.y1.graph().to_raw())),
        ("y1_over_x0", json!(f.y1_over_x0.to_json())),
        ("dual", json!(f.dual.to_json())),
        ("lambda", json!(f.lambda.to_raw())),
    ]
}

fn cmd_family(n: usize, golden: bool, out: Option<&Path>) -> Result<u8> {
    need_n(n)?;
    if golden {
        emit(&json!(expected_dual(n)?), out)?;
        return Ok(0);
    }
    let f = build_family(n)?;
    let parts = family_json(&f);
    match out {
        Some(dir) => {
            fs::create_dir_all(dir)?;
            let mut files = Vec::new();
            for (name, value) in &parts {
                write_json(dir, &format!("{name}.json"), value, &mut files)?;
            }
            emit(&json!({ "files": files }), None)?;
        }
        None => {
            let mut obj = serde_json::Map::new();
            obj.insert("n".into(), json!(n));
            obj.extend(parts.into_iter().map(|(k, v)| (k.to_string(), v)));
            emit(&Value::Object(obj), None)?;
        }
    }
    Ok(0)
}

fn cmd_dual(n: Option<usize>, map: Option<&Path>, out: Option<&Path>) -> Result<u8> {
    let phi = match (n, map) {
        (Some(n), _) => {
            need_n(n)?;
            build_family(n)?.phi
        }
        (None, Some(p)) => {
            let raw: RawMap = serde_json::from_str(&fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?)?;
            SimplicialMap::from_raw(&raw)?
        }
        (None, None) => return Err(usage("give --n or --map")),
    };
    let d = dual_of_map(&phi)?;
    let target = dual_graph(phi.codomain());
    let value = json!({
        "dual": d.to_json(),
        "codomain_dual": target.to_json(),
        "induced": d.induced.assignment_names(),
        "ultra_light": is_ultra_light(&d.induced),
    });
    emit(&value, out)?;
    Ok(0)
}

fn cmd_system(n: usize, depth: usize, out: Option<&Path>) -> Result<u8> {
    need_n(n)?;
    let mut sys = PatternSystem::new(n)?;
    sys.extend_to(depth)?;
    let manifest = match out {
        Some(dir) => sys.system().export(dir)?,
        None => sys.system().manifest()?,
    };
    emit(&json!(manifest), None)?;
    Ok(0)
}

fn cmd_expand(n: usize, m: usize, arm: usize, format: Format, out: Option<&Path>) -> Result<u8> {
    need_n(n)?;
    if !(1..=n).contains(&arm) {
        return Err(usage(format!("arm must lie in 1..={n}")));
    }
    let p = pattern_direct(n, m, arm)?;
    match format {
        Format::Text => {
            let text = p.walk.vertices().iter().map(|x| x.as_str()).collect::<Vec<_>>().join(",") + "\n";
            match out {
                Some(path) => fs::write(path, text)?,
                None => print!("{text}"),
            }
        }
        Format::Json => emit(&json!({ "n": n, "m": m, "arm": arm, "length": p.walk.length(), "walk": p.walk }), out)?,
    }
    Ok(0)
}

fn check_one(prop: Prop, n: usize, ms: &RangeInclusive<usize>) -> Result<(bool, String)> {
    Ok(match prop {
        Prop::Claim3 => {
            let f = build_family(n)?;
            let r = check_preserves(&f.phi, &f.x1_over_x0, &f.selection, &f.selection)?;
            (r.holds(), format!("{} + {} violations", r.condition_i.len(), r.condition_ii.len()))
        }
        Prop::Claim4 => {
            let f = build_family(n)?;
            let ultra = is_ultra_light(&f.dual.induced);
            let branch = recognize_simple_n_od(&f.dual.graph, None)?.branch();
            let b0 = f.dual.target.star(f.dual.induced.at(branch));
            let (x, y) = f.phi.codomain().edge_names(b0);
            let ok = ultra && *x == v(0) && *y == v(n - 1);
            (ok, format!("ultra light: {ultra}; d(b0) over {x}-{y}"))
        }
        Prop::Claim5 => {
            let f = build_family(n)?;
            let r = check_consistency(&f.phi, &f.x1_over_x0, &f.selection, &f.y1_over_x0, &f.lambda)?;
            (r.holds(), format!("{} + {} + {} violations", r.isomorphism.len(), r.condition_i.len(), r.condition_ii.len()))
        }
        Prop::Claim7 => {
            let rec = patterns_recursive(n, *ms.end())?;
            let mut sys = PatternSystem::new(n)?;
            let mut bad = Vec::new();
            for m in ms.clone() {
                let direct = sys.patterns(m, Execution::Parallel)?;
                for i in 1..=n {
                    if rec[m][i - 1].walk != direct[i - 1].walk {
                        bad.push(format!("m={m} arm {i}"));
                    }
                }
                if m >= 1 && rec[m][n - 3].walk != rec[m - 1][n - 2].walk {
                    bad.push(format!("m={m} clause (ii)"));
                }
            }
            (bad.is_empty(), if bad.is_empty() { "recursion equals direct".into() } else { bad.join("; ") })
        }
        Prop::Claim8 => {
            let rec = patterns_recursive(n, *ms.end())?;
            let mut bad = Vec::new();
            for m in ms.clone() {
                if let Err(e) = normal_forms(&rec[m]) {
                    bad.push(format!("m={m}: {e}"));
                }
            }
            (bad.is_empty(), if bad.is_empty() { "normal forms found".into() } else { bad.join("; ") })
        }
    })
}

fn cmd_check(prop: Prop, n: &str, m: Option<&str>, out: Option<&Path>) -> Result<u8> {
    let ns = parse_range(n)?;
    need_n(*ns.start())?;
    let ms = match (prop, m) {
        (_, Some(m)) => parse_range(m)?,
        (Prop::Claim8, None) => 3..=5,
        _ => 1..=6,
    };
    if prop == Prop::Claim7 && *ms.start() == 0 {
        return Err(usage("claim7 levels start at 1"));
    }
    if prop == Prop::Claim8 && *ms.start() < 3 {
        return Err(usage("claim8 levels start at 3"));
    }
    let mut results = Vec::new();
    let mut all = true;
    for n in ns {
        let (pass, detail) = check_one(prop, n, &ms)?;
        all &= pass;
        results.push(json!({ "n": n, "pass": pass, "detail": detail }));
    }
    let name = format!("{prop:?}").to_lowercase();
    emit(&json!({ "prop": name, "results": results, "all_pass": all }), out)?;
    Ok(if all { 0 } else { EXIT_REFUTED })
}

fn verdict_name(v: Verdict) -> &'static str {
    match v {
        Verdict::Found => "Found",
        Verdict::Refuted => "Refuted",
        Verdict::Inconclusive => "Inconclusive",
    }
}

fn outcome_json(out: &SearchOutcome) -> Value {
    match out {
        SearchOutcome::Found { witness, stats, bounds } => json!({
            "verdict": "Found",
            "arm_count": witness.arm_count(),
            "witness": witness.to_raw(),
            "stats": stats,
            "bounds": bounds,
        }),
        SearchOutcome::Refuted(cert) => json!({ "verdict": "Refuted", "certificate": cert }),
        SearchOutcome::Inconclusive { reason, stats, bounds } => json!({
            "verdict": "Inconclusive",
            "reason": reason,
            "stats": stats,
            "bounds": bounds,
        }),
    }
}

struct FactorArgs {
    n: usize,
    m: usize,
    ks: RangeInclusive<usize>,
    anchored: bool,
    strategies: Vec<Strategy>,
    timeout: Option<Duration>,
    node_budget: Option<u64>,
    jobs: usize,
    execution: Execution,
}

fn cmd_factor(a: FactorArgs, certificate: Option<&Path>, out: Option<&Path>) -> Result<u8> {
    need_n(a.n)?;
    if a.m == 0 {
        return Err(usage("m must be at least 1"));
    }
    if *a.ks.start() == 0 {
        return Err(usage("k must be at least 1"));
    }
    let mut sys = PatternSystem::new(a.n)?;
    sys.extend_to(a.m)?;
    let phi: Arc<SimplicialMap> = sys.system().composite(0, a.m)?;

    let mut rows = Vec::new();
    let mut cert_rows = Vec::new();
    let mut code = 0;
    for k in a.ks.clone() {
        let mut runs = Vec::new();
        let mut cert_runs = Vec::new();
        let mut verdicts = Vec::new();
        for &s in &a.strategies {
            let opts = SearchOptions {
                k_max: k,
                anchored: a.anchored,
                strategy: s,
                execution: a.execution,
                timeout: a.timeout,
                node_budget: a.node_budget,
            };
            let start = Instant::now();
            let outcome = par::with_jobs(a.execution, a.jobs, || search_factorization(&phi, &opts))?;
            let ms = start.elapsed().as_millis();
            verdicts.push(outcome.verdict());
            let mut run = outcome_json(&outcome);
            run["strategy"] = json!(s.name());
            let mut cert = run.clone();
            cert["wall_clock_ms"] = json!(ms);
            if let Some(c) = cert.get_mut("certificate") {
                c["wall_clock_ms"] = json!(ms);
            }
            runs.push(run);
            cert_runs.push(cert);
        }
        let agree = verdicts.windows(2).all(|w| w[0] == w[1]);
        let verdict = if !agree || verdicts.contains(&Verdict::Inconclusive) { Verdict::Inconclusive } else { verdicts[0] };
        code = code.max(match verdict {
            Verdict::Found => 0,
            Verdict::Refuted => EXIT_REFUTED,
            Verdict::Inconclusive => EXIT_INCONCLUSIVE,
        });
        rows.push(json!({ "k": k, "verdict": verdict_name(verdict), "agree": agree, "runs": runs }));
        cert_rows.push(json!({ "k": k, "verdict": verdict_name(verdict), "agree": agree, "runs": cert_runs }));
    }
    let head = json!({ "n": a.n, "m": a.m, "anchored": a.anchored });
    let mut report = head.clone();
    report["rows"] = json!(rows);
    if let Some(path) = certificate {
        let mut cert = head;
        cert["rows"] = json!(cert_rows);
        fs::write(path, serde_json::to_string_pretty(&cert)? + "\n").with_context(|| format!("writing {}", path.display()))?;
    }
    emit(&report, out)?;
    Ok(code)
}

fn cmd_export_dot(n: usize, depth: usize, out: &Path) -> Result<u8> {
    need_n(n)?;
    let mut sys = PatternSystem::new(n)?;
    sys.extend_to(depth)?;
    let f = build_family(n)?;
    fs::create_dir_all(out)?;
    let mut files = Vec::new();
    let mut put = |name: String, text: String| -> Result<()> {
        fs::write(out.join(&name), text)?;
        files.push(name);
        Ok(())
    };
    for (i, level) in sys.system().levels().iter().enumerate() {
        put(format!("level_{i}.dot"), graph_to_dot(&level.graph, &format!("X{i}")))?;
        if i > 0 {
            put(format!("phi_0_{i}.dot"), map_to_dot(&*sys.system().composite(0, i)?, &format!("Phi0_{i}")))?;
        }
    }
    put("y1.dot".into(), graph_to_dot(f.y1.graph(), "Y1"))?;
    put("dual.dot".into(), map_to_dot(&f.dual.induced, "D"))?;
    put("dual_x0.dot".into(), graph_to_dot(&f.dual.target.graph, "DX0"))?;
    put("lambda.dot".into(), map_to_dot(&f.lambda, "lambda"))?;
    emit(&json!({ "files": files }), None)?;
    Ok(0)
}

fn run(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Family { n, golden, out } => cmd_family(n, golden, out.as_deref()),
        Command::Dual { n, map, out } => cmd_dual(n, map.as_deref(), out.as_deref()),
        Command::System { n, depth, out } => cmd_system(n, depth, out.as_deref()),
        Command::Expand { n, m, arm, format, out } => cmd_expand(n, m, arm, format, out.as_deref()),
        Command::Check { prop, n, m, out } => cmd_check(prop, &n, m.as_deref(), out.as_deref()),
        Command::Factor { n, m, k, anchored, strategy, timeout, node_budget, jobs, sequential, certificate, out } => {
            let timeout = match timeout {
                Some(t) if !(t.is_finite() && t > 0.0) => return Err(usage("timeout must be a positive number of seconds")),
                t => t.map(Duration::from_secs_f64),
            };
            let strategies = match strategy {
                StrategyArg::Congruence => vec![Strategy::Congruence],
                StrategyArg::Lift => vec![Strategy::Lift],
                StrategyArg::Both => vec![Strategy::Congruence, Strategy::Lift],
            };
            let args = FactorArgs {
                n,
                m,
                ks: parse_range(&k)?,
                anchored,
                strategies,
                timeout,
                node_budget,
                jobs,
                execution: if sequential { Execution::Sequential } else { Execution::Parallel },
            };
            cmd_factor(args, certificate.as_deref(), out.as_deref())
        }
        Command::ExportDot { n, depth, out } => cmd_export_dot(n, depth, &out),
        Command::Schema { name } => {
            print!("{}", schemas::text(name));
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) if e.is::<Usage>() => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_INCONCLUSIVE)
        }
    }
}
