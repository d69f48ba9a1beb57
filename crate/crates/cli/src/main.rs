use std::collections::BTreeMap;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use superplucker::clusters::{export_dot, generate_all, mutate, values_from_coords, MutationGraph, SuperCluster};
use superplucker::essential::{
    essential_coordinates, inverse_plucker, relations_check_11, relations_check_r0, relations_check_rs, EssentialCoords,
    RelationReport,
};
use superplucker::exprio::*;
use superplucker::grassmannian::{dimension, ChartIndex};
use superplucker::multivector::{is_simple, k2_family_check, khudaverdian_check, plucker_relations_check, wedge_rows};
use superplucker::selftest::{self, Config};
use superplucker::{Error, GhostColumnSpec, SuperShape};

#[derive(Parser)]
#[command(author, version, about = "Exact super Plücker coordinates and super cluster mutations", long_about = None)]
struct Args {
    /// Machine-readable output.
    #[arg(long, global = true)]
    json: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Berezinian of an even square supermatrix.
    Ber {
        #[arg(long = "in")]
        input: PathBuf,
        /// Inverse Berezinian instead.
        #[arg(long)]
        star: bool,
        /// 1-based column holding a vector of the wrong parity.
        #[arg(long)]
        ghost_col: Option<usize>,
    },
    /// Essential super Plücker coordinates.
    Pluck {
        #[command(subcommand)]
        command: PluckCommand,
    },
    /// Multivectors and their Plücker relations.
    Multivector {
        #[command(subcommand)]
        command: MultivectorCommand,
    },
    /// Charts on super Grassmannians.
    Grassmannian {
        #[command(subcommand)]
        command: GrassmannianCommand,
    },
    /// Dimension `r|s` shape in an `n|m` ambient.
    Dim {
        #[arg(long)]
        shape: SuperShape,
        #[arg(long)]
        ambient: SuperShape,
    },
    /// Super cluster graphs of G_2(4|1) and G_2(5|1).
    Cluster {
        #[command(subcommand)]
        command: ClusterCommand,
    },
    /// Runs the acceptance checks.
    Selftest {
        /// Reduced sample sizes.
        #[arg(long)]
        quick: bool,
        /// Run only this criterion (1-9).
        #[arg(long)]
        criterion: Option<usize>,
    },
}

#[derive(Subcommand)]
enum PluckCommand {
    /// Coordinates of a plane.
    Coords {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Plane in a chart recovered from coordinates.
    Invert {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        chart: ChartIndex,
    },
    /// Relation families on coordinates.
    Check {
        #[arg(long = "in")]
        input: PathBuf,
    },
}

#[derive(Subcommand)]
enum MultivectorCommand {
    /// Wedge of the rows of a `k|0` plane.
    Wedge {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Simplicity test with a factorization when simple.
    Simple {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Plücker relations (and the two-index families for bivectors).
    Check {
        #[arg(long = "in")]
        input: PathBuf,
    },
}

#[derive(Subcommand)]
enum GrassmannianCommand {
    Normalize {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        chart: ChartIndex,
    },
    ChangeChart {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        from: ChartIndex,
        #[arg(long)]
        to: ChartIndex,
    },
    Dim {
        #[arg(long)]
        shape: SuperShape,
        #[arg(long)]
        ambient: SuperShape,
    },
}

#[derive(Subcommand)]
enum ClusterCommand {
    /// Builds a graph; optionally seeds it from a plane and walks it.
    Build {
        #[arg(long)]
        case: String,
        #[arg(long)]
        seed_plane: Option<PathBuf>,
        /// Comma-separated steps such as `even:T14,odd:th3th4`.
        #[arg(long)]
        walk: Option<String>,
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// One mutation of a cluster state.
    Mutate {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        step: String,
    },
    /// A sequence of mutations of a cluster state.
    Walk {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        walk: String,
    },
}

/// Failure with its exit status: 1 validation, 2 relation violation, 3 parse.
struct Failure {
    code: u8,
    msg: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = if matches!(e, Error::Parse { .. }) { 3 } else { 1 };
        Failure { code, msg: e.to_string() }
    }
}

type CliResult = Result<(Value, String, u8), Failure>;

fn read(path: &PathBuf) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure { code: 1, msg: format!("{}: {e}", path.display()) })
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("serializable")
}

fn report_json(rep: &RelationReport) -> Value {
    Value::Array(
        rep.families
            .iter()
            .map(|f| {
                json!({
                    "family": f.name,
                    "checked": f.checked,
                    "violations": f.violations.iter().map(|(k, r)| json!({"tuple": k, "residual": r.to_string()})).collect::<Vec<_>>(),
                    "inconclusive": f.inconclusive,
                })
            })
            .collect(),
    )
}

fn report_text(rep: &RelationReport) -> String {
    let mut s = String::new();
    for f in &rep.families {
        s.push_str(&format!(
            "{}: {} checked, {} violated, {} inconclusive\n",
            f.name,
            f.checked,
            f.violations.len(),
            f.inconclusive.len()
        ));
        for (k, r) in f.violations.iter().take(5) {
            s.push_str(&format!("  {k}: residual {r}\n"));
        }
    }
    s
}

fn coords_check(c: &EssentialCoords) -> CliResult {
    let mut reports = Vec::new();
    if c.shape.odd == 0 && c.shape.even > 0 {
        reports.push(relations_check_r0(c)?);
    }
    if c.shape == SuperShape::new(1, 1) {
        reports.push(relations_check_11(c)?);
    }
    reports.push(relations_check_rs(c)?);
    let ok = reports.iter().all(|r| r.all_hold());
    let text: String = reports.iter().map(report_text).collect();
    let v = json!({"holds": ok, "families": reports.iter().map(report_json).collect::<Vec<_>>()});
    Ok((v, text.trim_end().to_string(), if ok { 0 } else { 2 }))
}

fn parse_walk(walk: &str) -> Vec<String> {
    let mut steps: Vec<String> = Vec::new();
    for s in walk.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        // `odd:th3,th4` is accepted as a spelling of `odd:th3th4`
        match steps.last_mut() {
            Some(last) if s.starts_with("th") && last.starts_with("odd:") => last.push_str(s),
            _ => steps.push(s.to_string()),
        }
    }
    steps
}

fn walk_state(graph: &MutationGraph, mut s: SuperCluster, walk: &str) -> Result<(SuperCluster, Vec<Value>), Failure> {
    let mut trace = Vec::new();
    for step in parse_walk(walk) {
        let v = graph.vertex_of(&s.vars).ok_or_else(|| Failure { code: 1, msg: format!("{} is not in the graph", s.vars) })?;
        let e = graph.select(v, &step)?;
        s = mutate(&s, &e.mutation)?;
        trace.push(json!({
            "step": step,
            "relations": e.mutation.relations.iter().map(|r| r.to_string()).collect::<Vec<_>>(),
            "cluster": s.vars.to_string(),
        }));
    }
    Ok((s, trace))
}

fn state_text(s: &SuperCluster) -> String {
    let mut out = format!("cluster {}\n", s.vars);
    for (k, x) in &s.assignment {
        out.push_str(&format!("  {k} = {x}\n"));
    }
    out.trim_end().to_string()
}

fn run(args: &Args) -> CliResult {
    match &args.command {
        Command::Ber { input, star, ghost_col } => {
            let m = parse_matrix(&read(input)?, ghost_col.is_none())?;
            let v = match ghost_col {
                Some(j) => {
                    let pos = j.checked_sub(1).filter(|&p| p < m.ncols()).ok_or_else(|| Failure {
                        code: 1,
                        msg: format!("ghost column {j} out of range"),
                    })?;
                    m.ber_ghost(GhostColumnSpec { position: pos, declared_parity: m.col_parities()[pos] })?
                }
                None if *star => m.ber_star()?,
                None => m.ber()?,
            };
            Ok((json!({"value": v.to_string()}), v.to_string(), 0))
        }
        Command::Pluck { command } => match command {
            PluckCommand::Coords { input } => {
                let c = essential_coordinates(&parse_plane(&read(input)?)?);
                let v = coords_to_json(&c);
                Ok((v.clone(), pretty(&v), 0))
            }
            PluckCommand::Invert { input, chart } => {
                let c = parse_coords(&read(input)?)?;
                let v = plane_to_json(&inverse_plucker(&c, chart)?);
                Ok((v.clone(), pretty(&v), 0))
            }
            PluckCommand::Check { input } => coords_check(&parse_coords(&read(input)?)?),
        },
        Command::Multivector { command } => match command {
            MultivectorCommand::Wedge { input } => {
                let v = multivector_to_json(&wedge_rows(&parse_plane(&read(input)?)?)?);
                Ok((v.clone(), pretty(&v), 0))
            }
            MultivectorCommand::Simple { input } => {
                let t = parse_multivector(&read(input)?)?;
                let rep = is_simple(&t)?;
                let factors: Option<Vec<Vec<String>>> =
                    rep.witness.as_ref().map(|w| w.iter().map(|row| row.iter().map(|x| x.to_string()).collect()).collect());
                let v = json!({
                    "simple": rep.is_simple(),
                    "nondegenerate": rep.nondegenerate,
                    "failing_generators": rep
                        .failing_generators
                        .iter()
                        .map(|g| g.iter().map(|i| i.to_string()).collect::<Vec<_>>())
                        .collect::<Vec<_>>(),
                    "factors": factors,
                });
                let mut text = format!("simple: {}", rep.is_simple());
                if let Some(f) = &factors {
                    for row in f {
                        text.push_str(&format!("\n  [{}]", row.join(", ")));
                    }
                }
                Ok((v, text, 0))
            }
            MultivectorCommand::Check { input } => {
                let t = parse_multivector(&read(input)?)?;
                let mut families: BTreeMap<String, Vec<String>> = BTreeMap::new();
                families.insert("plucker".into(), plucker_relations_check(&t).iter().map(|v| v.to_string()).collect());
                if t.degree() == 2 {
                    let rep = k2_family_check(&t)?;
                    for (name, vs) in &rep.families {
                        families.insert(name.to_string(), vs.iter().map(|v| v.to_string()).collect());
                    }
                }
                if t.degree() == 2 || (t.degree() == 3 && t.ambient().odd == 0) {
                    let rep = khudaverdian_check(&t, t.degree())?;
                    families.insert("khudaverdian".into(), rep.khudaverdian.iter().map(|v| v.to_string()).collect());
                }
                let ok = families.values().all(|v| v.is_empty());
                let text = families
                    .iter()
                    .map(|(k, v)| match v.first() {
                        None => format!("{k}: holds"),
                        Some(first) => format!("{k}: {} violations, e.g. {first}", v.len()),
                    })
                    .collect::<Vec<_>>()
                    .join("\n");
                Ok((json!({"holds": ok, "violations": families}), text, if ok { 0 } else { 2 }))
            }
        },
        Command::Grassmannian { command } => match command {
            GrassmannianCommand::Normalize { input, chart } => {
                let v = plane_to_json(&parse_plane(&read(input)?)?.normalize_to_chart(chart)?);
                Ok((v.clone(), pretty(&v), 0))
            }
            GrassmannianCommand::ChangeChart { input, from, to } => {
                let p = parse_plane(&read(input)?)?.normalize_to_chart(from)?;
                let v = plane_to_json(&p.change_chart(from, to)?);
                Ok((v.clone(), pretty(&v), 0))
            }
            GrassmannianCommand::Dim { shape, ambient } => dim(*shape, *ambient),
        },
        Command::Dim { shape, ambient } => dim(*shape, *ambient),
        Command::Cluster { command } => match command {
            ClusterCommand::Build { case, seed_plane, walk, dot } => {
                let graph = graph_for_case(case)?;
                let text_dot = export_dot(&graph);
                if let Some(path) = dot {
                    fs::write(path, &text_dot).map_err(|e| Failure { code: 1, msg: format!("{}: {e}", path.display()) })?;
                }
                let mut v = json!({
                    "case": case,
                    "clusters": graph.vertices.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
                    "edges": graph.edge_pairs(),
                });
                let mut text = format!("{} clusters, {} mutation pairs", graph.vertices.len(), graph.edge_pairs());
                if let Some(p) = seed_plane {
                    let plane = parse_plane(&read(p)?)?;
                    if plane.shape() != SuperShape::new(2, 0) || plane.ambient() != SuperShape::new(graph.n, 1) {
                        return Err(Failure {
                            code: 1,
                            msg: format!("case {case} needs a 2|0 plane in {}|1", graph.n),
                        });
                    }
                    let values = values_from_coords(&essential_coordinates(&plane))?;
                    let start = (0..graph.vertices.len())
                        .find_map(|i| graph.state(i, &values).ok())
                        .ok_or_else(|| Failure { code: 1, msg: "no cluster has invertible variables for this plane".into() })?;
                    let all = generate_all(&start, &graph)?;
                    v["generated"] = values_to_json(&all);
                    text.push_str(&format!("\nseeded from {}", start.vars));
                    if let Some(w) = walk {
                        let (end, trace) = walk_state(&graph, start, w)?;
                        v["walk"] = Value::Array(trace);
                        v["state"] = cluster_state_to_json(case, &end);
                        text.push('\n');
                        text.push_str(&state_text(&end));
                    }
                } else if walk.is_some() {
                    return Err(Failure { code: 1, msg: "--walk needs --seed-plane".into() });
                } else if dot.is_none() {
                    text = text_dot.trim_end().to_string();
                }
                Ok((v, text, 0))
            }
            ClusterCommand::Mutate { input, step } => {
                let (case, s) = parse_cluster_state(&read(input)?)?;
                let graph = graph_for_case(&case)?;
                let (end, trace) = walk_state(&graph, s, step)?;
                let v = json!({"walk": trace, "state": cluster_state_to_json(&case, &end)});
                Ok((v, state_text(&end), 0))
            }
            ClusterCommand::Walk { input, walk } => {
                let (case, s) = parse_cluster_state(&read(input)?)?;
                let graph = graph_for_case(&case)?;
                let (end, trace) = walk_state(&graph, s, walk)?;
                let v = json!({"walk": trace, "state": cluster_state_to_json(&case, &end)});
                Ok((v, state_text(&end), 0))
            }
        },
        Command::Selftest { quick, criterion } => {
            let cfg = if *quick { Config::quick() } else { Config::full() };
            let results = match criterion {
                Some(i) => vec![selftest::run(*i, &cfg)],
                None => selftest::run_all(&cfg),
            };
            let ok = results.iter().all(|r| r.passed);
            let v = Value::Array(
                results
                    .iter()
                    .map(|r| json!({"criterion": r.id, "title": r.title, "passed": r.passed, "detail": r.detail}))
                    .collect(),
            );
            let text = results.iter().map(|r| r.to_string()).collect::<Vec<_>>().join("\n");
            Ok((v, text, if ok { 0 } else { 1 }))
        }
    }
}

fn dim(shape: SuperShape, ambient: SuperShape) -> CliResult {
    let d = dimension(shape, ambient)?;
    Ok((json!({"dimension": d.to_string()}), d.to_string(), 0))
}

fn main() -> ExitCode {
    let args = Args::parse();
    match run(&args) {
        Ok((v, text, code)) => {
            if args.json {
                println!("{}", pretty(&v));
            } else {
                println!("{text}");
            }
            ExitCode::from(code)
        }
        Err(f) => {
            if args.json {
                println!("{}", pretty(&json!({"error": f.msg, "status": f.code})));
            }
            eprintln!("error: {}", f.msg);
            ExitCode::from(f.code)
        }
    }
}
