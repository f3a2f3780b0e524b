//! Command-line front end: batch reports over every analysis the
//! library offers, in human text or deterministic JSON.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use sandpile::{divisor, dynamics, graph::Graph, group, ideal, resolution, structure};
use sandpile::{matrix, Error};

#[derive(Parser)]
#[command(name = "sandpile", version, about = "Exact invariants of sandpile graphs")]
struct Cli {
    /// Emit JSON instead of human-readable text
    #[arg(long, global = true)]
    json: bool,

    /// Refuse enumerations once the sandpile group order exceeds this
    #[arg(long, global = true, default_value_t = 1_000_000)]
    max_order: u64,

    /// Refuse divisor enumerations beyond this degree
    #[arg(long, global = true, default_value_t = 64)]
    max_degree: u64,

    /// Worker threads (default: all cores)
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct GraphArg {
    /// Graph file (sink/edge/uedge lines)
    #[arg(short, long)]
    graph: PathBuf,
}

#[derive(Subcommand)]
enum Cmd {
    /// Stabilize a configuration
    Stabilize {
        #[command(flatten)]
        g: GraphArg,
        /// Configuration, comma-separated in nonsink vertex order
        #[arg(short, long)]
        config: String,
    },
    /// Sandpile group order, invariant factors, and identity
    Group {
        #[command(flatten)]
        g: GraphArg,
        /// Also list every recurrent configuration
        #[arg(long)]
        elements: bool,
    },
    /// Minimal burning configuration and script
    Burning {
        #[command(flatten)]
        g: GraphArg,
    },
    /// Groebner basis of the toppling ideal
    Gb {
        #[command(flatten)]
        g: GraphArg,
        /// Minimalize the basis by leading-term divisibility
        #[arg(long)]
        minimal: bool,
        /// Basis of the homogeneous toppling ideal instead
        #[arg(long)]
        homogeneous: bool,
    },
    /// h-vector, postulation number, and affine Hilbert function
    Hilbert {
        #[command(flatten)]
        g: GraphArg,
    },
    /// Tutte polynomial and the T(1, y) identity (undirected only)
    Tutte {
        #[command(flatten)]
        g: GraphArg,
    },
    /// Divisor computations: equivalence, linear system, rank, Riemann-Roch
    Divisor {
        #[command(flatten)]
        g: GraphArg,
        /// Divisor, comma-separated in vertex order with the sink last
        #[arg(short, long)]
        divisor: String,
        #[command(subcommand)]
        action: DivAction,
    },
    /// Graded Betti numbers of the homogeneous toppling ideal
    Betti {
        #[command(flatten)]
        g: GraphArg,
    },
    /// Betti numbers vs. connected-partition counts (undirected only)
    Conjecture {
        #[command(flatten)]
        g: GraphArg,
    },
    /// Complete-intersection / Gorenstein classification
    Classify {
        #[command(flatten)]
        g: GraphArg,
    },
    /// Recover a sandpile graph from a full-rank integer lattice
    Lattice2graph {
        /// Matrix file, one row per line, whitespace-separated
        #[arg(short, long)]
        matrix: PathBuf,
    },
    /// Verify the toppling ideal vanishes on its character orbit
    Zeros {
        #[command(flatten)]
        g: GraphArg,
        /// Maximum tolerated residual
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
}

#[derive(Subcommand)]
enum DivAction {
    /// Is the divisor linearly equivalent to another?
    Equiv {
        /// The other divisor, same format
        other: String,
    },
    /// Enumerate the complete linear system
    Linsys,
    /// Rank of the divisor (undirected only)
    Rank,
    /// Riemann-Roch residual r(D) - r(K-D) - deg(D) + g - 1
    Rr,
}

fn parse_csv(text: &str, expect: usize, what: &str) -> Result<Vec<i64>, Error> {
    let vals: Result<Vec<i64>, _> = text.split(',').map(|t| t.trim().parse::<i64>()).collect();
    let vals = vals.map_err(|e| Error::invalid(format!("bad {what} entry: {e}")))?;
    if vals.len() != expect {
        return Err(Error::invalid(format!(
            "{what} has {} entries, expected {expect}",
            vals.len()
        )));
    }
    Ok(vals)
}

fn load_graph(path: &PathBuf) -> Result<Graph, Error> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::invalid(format!("cannot read {}: {e}", path.display())))?;
    Graph::parse(&text)
}

fn csv(v: &[i64]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

struct Report {
    json: Value,
    text: Vec<String>,
}

fn run(cli: &Cli) -> Result<Report, Error> {
    match &cli.cmd {
        Cmd::Stabilize { g, config } => {
            let g = load_graph(&g.graph)?;
            let c = parse_csv(config, g.n(), "configuration")?;
            let (stable, script) = dynamics::stabilize(&g, &c)?;
            Ok(Report {
                text: vec![format!("stable: {}", csv(&stable)), format!("script: {}", csv(&script))],
                json: json!({ "stable": stable, "script": script }),
            })
        }
        Cmd::Group { g, elements } => {
            let g = load_graph(&g.graph)?;
            let order = group::order(&g);
            let factors = group::invariant_factors(&g);
            let identity = dynamics::identity(&g)?;
            let mut text = vec![
                format!("order: {order}"),
                format!(
                    "invariant factors: [{}]",
                    factors.iter().map(|f| f.to_string()).collect::<Vec<_>>().join(", ")
                ),
                format!("identity: {}", csv(&identity)),
            ];
            let mut out = json!({
                "order": order.to_string(),
                "invariant_factors": factors.iter().map(|f| f.to_string()).collect::<Vec<_>>(),
                "identity": identity,
            });
            if *elements {
                let rec = group::enumerate_recurrents(&g, cli.max_order)?;
                text.push(format!("recurrents ({}):", rec.len()));
                text.extend(rec.iter().map(|c| format!("  {}", csv(c))));
                out["recurrents"] = json!(rec);
            }
            Ok(Report { json: out, text })
        }
        Cmd::Burning { g } => {
            let g = load_graph(&g.graph)?;
            let (config, script) = dynamics::min_burning_config(&g);
            Ok(Report {
                text: vec![
                    format!("burning configuration: {}", csv(&config)),
                    format!("burning script: {}", csv(&script)),
                ],
                json: json!({ "config": config, "script": script }),
            })
        }
        Cmd::Gb { g, minimal, homogeneous } => {
            let g = load_graph(&g.graph)?;
            let basis = if *homogeneous {
                ideal::homogeneous_basis(&g)?
            } else {
                ideal::groebner_basis(&g, *minimal)?
            };
            let labels: Vec<String> = if *homogeneous {
                g.labels().to_vec()
            } else {
                g.labels()[..g.n()].to_vec()
            };
            let rendered: Vec<String> = basis.iter().map(|b| b.render(&labels)).collect();
            Ok(Report {
                text: rendered.clone(),
                json: json!({
                    "basis": basis
                        .iter()
                        .zip(&rendered)
                        .map(|(b, r)| json!({ "plus": b.plus, "minus": b.minus, "display": r }))
                        .collect::<Vec<_>>(),
                }),
            })
        }
        Cmd::Hilbert { g } => {
            let g = load_graph(&g.graph)?;
            let h = ideal::h_vector(&g, cli.max_order)?;
            let post = ideal::postulation(&h);
            let hilbert = ideal::affine_hilbert(&g, cli.max_order)?;
            Ok(Report {
                text: vec![
                    format!("h-vector: {}", csv(&h)),
                    format!("postulation: {post}"),
                    format!("affine Hilbert: {}", csv(&hilbert)),
                ],
                json: json!({ "h_vector": h, "postulation": post, "affine_hilbert": hilbert }),
            })
        }
        Cmd::Tutte { g } => {
            let g = load_graph(&g.graph)?;
            let t = ideal::tutte(&g)?;
            let merino = ideal::merino_check(&g, cli.max_order)?;
            let terms: Vec<Value> = t
                .0
                .iter()
                .map(|(&(i, j), &c)| json!({ "x": i, "y": j, "coeff": c }))
                .collect();
            let display = t
                .0
                .iter()
                .map(|(&(i, j), &c)| {
                    let mut s = String::new();
                    if c != 1 || (i, j) == (0, 0) {
                        s.push_str(&c.to_string());
                    }
                    for (var, e) in [("x", i), ("y", j)] {
                        match e {
                            0 => {}
                            1 => s.push_str(var),
                            _ => s.push_str(&format!("{var}^{e}")),
                        }
                    }
                    s
                })
                .collect::<Vec<_>>()
                .join(" + ");
            Ok(Report {
                text: vec![
                    format!("T(x,y) = {display}"),
                    format!("T(1,y) coefficients: {}", csv(&merino.t1y)),
                    format!("h-vector: {}", csv(&merino.h)),
                    format!("T(1,1) = {} (group order)", merino.order),
                    format!("Merino identity holds: {}", merino.holds),
                ],
                json: json!({
                    "tutte": terms,
                    "t1y": merino.t1y,
                    "h_vector": merino.h,
                    "order": merino.order,
                    "merino_holds": merino.holds,
                }),
            })
        }
        Cmd::Divisor { g, divisor: d, action } => {
            let g = load_graph(&g.graph)?;
            let d = parse_csv(d, g.num_vertices(), "divisor")?;
            if divisor::degree(&d).unsigned_abs() > cli.max_degree {
                return Err(Error::cap(format!(
                    "divisor degree {} exceeds cap {}",
                    divisor::degree(&d),
                    cli.max_degree
                )));
            }
            match action {
                DivAction::Equiv { other } => {
                    let e = parse_csv(other, g.num_vertices(), "divisor")?;
                    let equivalent = divisor::is_equivalent(&g, &d, &e)?;
                    Ok(Report {
                        text: vec![format!("equivalent: {equivalent}")],
                        json: json!({ "equivalent": equivalent }),
                    })
                }
                DivAction::Linsys => {
                    let sys = divisor::linear_system(&g, &d)?;
                    let mut text = vec![format!("|D| has {} elements:", sys.len())];
                    text.extend(sys.iter().map(|e| format!("  {}", csv(e))));
                    Ok(Report {
                        json: json!({ "size": sys.len(), "elements": sys }),
                        text,
                    })
                }
                DivAction::Rank => {
                    let r = divisor::rank(&g, &d)?;
                    Ok(Report {
                        text: vec![format!("rank: {r}")],
                        json: json!({ "rank": r }),
                    })
                }
                DivAction::Rr => {
                    let residual = divisor::riemann_roch_residual(&g, &d)?;
                    let k = divisor::canonical(&g)?;
                    let rank_d = divisor::rank(&g, &d)?;
                    let kd: Vec<i64> = k.iter().zip(&d).map(|(a, b)| a - b).collect();
                    let rank_kd = divisor::rank(&g, &kd)?;
                    Ok(Report {
                        text: vec![
                            format!("deg(D) = {}, genus = {}", divisor::degree(&d), g.genus()?),
                            format!("r(D) = {rank_d}, r(K-D) = {rank_kd}"),
                            format!("Riemann-Roch residual: {residual}"),
                        ],
                        json: json!({
                            "degree": divisor::degree(&d),
                            "genus": g.genus()?,
                            "rank": rank_d,
                            "rank_residual_divisor": rank_kd,
                            "canonical": k,
                            "residual": residual,
                        }),
                    })
                }
            }
        }
        Cmd::Betti { g } => {
            let g = load_graph(&g.graph)?;
            let table = resolution::graded_betti(&g, cli.max_order)?;
            let mut text = vec![format!(
                "coarse Betti numbers: [{}]",
                csv(&table.coarse)
            )];
            for e in &table.graded {
                text.push(format!(
                    "  beta_{},{} = {} (degree {})",
                    e.i,
                    divisor::render(&e.divisor),
                    e.multiplicity,
                    divisor::degree(&e.divisor)
                ));
            }
            Ok(Report {
                json: json!({
                    "coarse": table.coarse,
                    "graded": table
                        .graded
                        .iter()
                        .map(|e| json!({
                            "i": e.i,
                            "degree_vector": divisor::render(&e.divisor),
                            "divisor": e.divisor,
                            "total_degree": divisor::degree(&e.divisor),
                            "multiplicity": e.multiplicity,
                        }))
                        .collect::<Vec<_>>(),
                }),
                text,
            })
        }
        Cmd::Conjecture { g } => {
            let g = load_graph(&g.graph)?;
            let rows = resolution::conjecture_check(&g, cli.max_order)?;
            let mut text = Vec::new();
            for r in &rows {
                text.push(format!(
                    "k = {}: beta = {}, partition sum = {} {} (contributions {})",
                    r.k,
                    r.beta,
                    r.rhs,
                    if r.holds { "ok" } else { "MISMATCH" },
                    csv(&r.contributions)
                ));
            }
            let all = rows.iter().all(|r| r.holds);
            text.push(format!("conjecture holds: {all}"));
            Ok(Report {
                json: json!({
                    "rows": rows
                        .iter()
                        .map(|r| json!({
                            "k": r.k,
                            "beta": r.beta,
                            "contributions": r.contributions,
                            "partition_sum": r.rhs,
                            "holds": r.holds,
                        }))
                        .collect::<Vec<_>>(),
                    "holds": all,
                }),
                text,
            })
        }
        Cmd::Classify { g } => {
            let g = load_graph(&g.graph)?;
            let c = structure::classify(&g, cli.max_order)?;
            Ok(Report {
                text: vec![
                    format!(
                        "loopy tree: {}",
                        c.loopy_tree.map_or("n/a (directed)".into(), |b| b.to_string())
                    ),
                    format!("complete intersection: {}", c.complete_intersection),
                    format!("gorenstein: {}", c.gorenstein),
                    format!("beta_1 = {}, beta_n = {}", c.beta_1, c.beta_n),
                    format!("h-vector: {} (symmetric: {})", csv(&c.h_vector), c.h_symmetric),
                ],
                json: json!({
                    "loopy_tree": c.loopy_tree,
                    "complete_intersection": c.complete_intersection,
                    "gorenstein": c.gorenstein,
                    "beta_1": c.beta_1,
                    "beta_n": c.beta_n,
                    "h_vector": c.h_vector,
                    "h_symmetric": c.h_symmetric,
                }),
            })
        }
        Cmd::Lattice2graph { matrix: path } => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::invalid(format!("cannot read {}: {e}", path.display())))?;
            let m = matrix::parse_matrix(&text)?;
            let g = structure::lattice_to_laplacian(&m)?;
            let mut lines = vec![format!("sink {}", g.label(g.sink()))];
            for u in 0..g.num_vertices() {
                for v in 0..g.num_vertices() {
                    if g.wt(u, v) > 0 {
                        lines.push(format!("edge {} {} {}", g.label(u), g.label(v), g.wt(u, v)));
                    }
                }
            }
            Ok(Report {
                json: json!({
                    "graph": lines.join("\n"),
                    "labels": g.labels(),
                    "reduced_laplacian": g.reduced_laplacian_cols(),
                }),
                text: lines,
            })
        }
        Cmd::Zeros { g, tol } => {
            let g = load_graph(&g.graph)?;
            let residual = group::verify_vanishing(&g, cli.max_order)?;
            let points = group::orbit_points(&g, cli.max_order)?.len();
            if residual >= *tol {
                return Err(Error::invalid(format!(
                    "residual {residual:e} exceeds tolerance {tol:e} over {points} orbit points"
                )));
            }
            Ok(Report {
                text: vec![
                    format!("orbit points: {points}"),
                    format!("max residual: {residual:e} (< {tol:e})"),
                ],
                json: json!({ "points": points, "max_residual": residual, "tol": tol }),
            })
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind::*;
            let code = match e.kind() {
                DisplayHelp | DisplayVersion => 0,
                InvalidSubcommand | UnknownArgument => 64,
                _ => 2,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Some(t) = cli.threads {
        // best effort: the pool may already exist in tests
        let _ = rayon::ThreadPoolBuilder::new().num_threads(t).build_global();
    }
    match run(&cli) {
        Ok(report) => {
            if cli.json {
                println!("{}", serde_json::to_string_pretty(&report.json).unwrap());
            } else {
                for line in report.text {
                    println!("{line}");
                }
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::CapExceeded(_) => ExitCode::from(3),
                _ => ExitCode::from(2),
            }
        }
    }
}
