//! Command-line front end for the `webstrata` library.
//!
//! Exit codes follow a small contract shared by every subcommand:
//!
//! | code | meaning                                                    |
//! |------|------------------------------------------------------------|
//! | 0    | success                                                    |
//! | 2    | numeric failure (curve tracing or root finding gave up)    |
//! | 3    | a cross-check or invariant did not hold                    |
//! | 4    | precondition refused (e.g. a group action that is not free)|
//! | 64   | usage error (bad flags, malformed input, unreadable files) |

mod expr;
mod render;

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use webstrata::diagram::web_to_diagram;
use webstrata::dihedral::{check_equivariance, GroupOrderReport};
use webstrata::mgt::{
    affine_normal_form, dihedral_presentation_check, dihedral_subgroup, euler_phi, mgt_group,
    MAX_MODULUS,
};
use webstrata::orbitgrpd::{
    check_clubsuit, orbit_groupoid_check, quotient_graph, voltage_cover, FiniteGraph, GraphError,
    GroupActionOnGraph,
};
use webstrata::sampling::{random_web_polynomial, SampleConfig};
use webstrata::strata::{catalan, enumerate_generic};
use webstrata::webtrace::{extract_web, sign_grid_oracle};
use webstrata::{DihedralElement, TraceParams};

const EXIT_OK: u8 = 0;
const EXIT_NUMERIC: u8 = 2;
const EXIT_MISMATCH: u8 = 3;
const EXIT_REFUSED: u8 = 4;
const EXIT_USAGE: u8 = 64;

/// Grid resolution used when `--oracle` asks for an independent check.
const ORACLE_RESOLUTION: usize = 256;
/// Random-walk budget for the projection-condition report.
const CLUBSUIT_SAMPLES: usize = 100;

#[derive(Parser)]
#[command(
    name = "webstrata",
    version,
    about = "Webs, chord diagrams, and orbit groupoids from the command line"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Trace the web of a monic polynomial and print its chord diagram.
    ///
    /// The expression is a sum of `z^k` terms with real or parenthesized
    /// complex coefficients, e.g. "z^3 - (1+0.5i)*z + 0.2". The leading
    /// coefficient must be 1.
    Diagram {
        /// Polynomial expression in the variable z.
        expression: String,
        /// Write the diagram as JSON to this file instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write an SVG picture of the traced web to this file.
        #[arg(long)]
        render: Option<PathBuf>,
        /// Re-derive the diagram from a sign grid and compare.
        #[arg(long)]
        oracle: bool,
        /// Override the corrector acceptance tolerance.
        #[arg(long)]
        tol_trace: Option<f64>,
        /// Override the node pin radius (as a fraction of the disc radius).
        #[arg(long)]
        tol_merge: Option<f64>,
    },
    /// List every generic chord-diagram class of a given degree.
    Enumerate {
        /// Degree of the polynomials (1 through 6).
        #[arg(long)]
        n: usize,
        /// Write the diagrams as a JSON array to this file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sample random polynomials and check boundary-symmetry equivariance.
    Equivariance {
        /// Degree of the sampled polynomials.
        #[arg(long)]
        n: usize,
        /// Number of random polynomials to test.
        #[arg(long, default_value_t = 50)]
        samples: usize,
        /// Seed for the sample stream; sample i uses seed + i.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Worker threads (default: WEBSTRATA_WORKERS, then all cores).
        #[arg(long)]
        workers: Option<usize>,
        /// Override the corrector acceptance tolerance.
        #[arg(long)]
        tol_trace: Option<f64>,
        /// Override the node pin radius (as a fraction of the disc radius).
        #[arg(long)]
        tol_merge: Option<f64>,
    },
    /// Tabulate multiplicative-translation groups over a range of moduli.
    Mgt {
        /// Smallest modulus (at least 2).
        #[arg(long, default_value_t = 2)]
        q_min: usize,
        /// Largest modulus.
        #[arg(long, default_value_t = 20)]
        q_max: usize,
        /// Write the table as JSON to this file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare quotient and orbit-presentation ranks for a group action.
    ///
    /// Either give --graph and --action files, or --random N to generate
    /// and check N regular covers. The graph file lists one "u v" edge per
    /// line; the action file lists one generator per line as a permutation
    /// of the vertices ("2 0 1" sends 0 to 2, 1 to 0, 2 to 1).
    Orbitgrpd {
        /// Edge list file for the graph being acted on.
        #[arg(long, requires = "action", conflicts_with = "random")]
        graph: Option<PathBuf>,
        /// Generator file for the vertex action.
        #[arg(long, requires = "graph", conflicts_with = "random")]
        action: Option<PathBuf>,
        /// Generate and check this many random free actions instead.
        #[arg(long)]
        random: Option<usize>,
        /// Seed for random walks and generated instances.
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn main() -> ExitCode {
    // Die quietly when the consumer closes the pipe (`webstrata ... | head`),
    // as Unix filters do, instead of panicking on the failed write.
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }

    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            use clap::error::ErrorKind;
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    let code = match cli.command {
        Command::Diagram {
            expression,
            out,
            render,
            oracle,
            tol_trace,
            tol_merge,
        } => cmd_diagram(&expression, out, render, oracle, tol_trace, tol_merge),
        Command::Enumerate { n, out } => cmd_enumerate(n, out),
        Command::Equivariance {
            n,
            samples,
            seed,
            workers,
            tol_trace,
            tol_merge,
        } => cmd_equivariance(n, samples, seed, workers, tol_trace, tol_merge),
        Command::Mgt { q_min, q_max, out } => cmd_mgt(q_min, q_max, out),
        Command::Orbitgrpd {
            graph,
            action,
            random,
            seed,
        } => cmd_orbitgrpd(graph, action, random, seed),
    };
    ExitCode::from(code)
}

fn usage_error(message: &str) -> u8 {
    eprintln!("error: {message}");
    EXIT_USAGE
}

fn build_params(tol_trace: Option<f64>, tol_merge: Option<f64>) -> Result<TraceParams, String> {
    let mut params = TraceParams::default();
    if let Some(tol) = tol_trace {
        if !tol.is_finite() || tol <= 0.0 {
            return Err(format!("--tol-trace must be a positive number, got {tol}"));
        }
        params.trace_tol = tol;
    }
    if let Some(tol) = tol_merge {
        if !tol.is_finite() || tol <= 0.0 {
            return Err(format!("--tol-merge must be a positive number, got {tol}"));
        }
        params.merge_tol_factor = tol;
    }
    Ok(params)
}

fn write_file(path: &PathBuf, content: &str) -> Result<(), u8> {
    fs::write(path, content).map_err(|err| {
        eprintln!("error: cannot write {}: {err}", path.display());
        EXIT_USAGE
    })
}

fn cmd_diagram(
    expression: &str,
    out: Option<PathBuf>,
    render_to: Option<PathBuf>,
    oracle: bool,
    tol_trace: Option<f64>,
    tol_merge: Option<f64>,
) -> u8 {
    let params = match build_params(tol_trace, tol_merge) {
        Ok(p) => p,
        Err(msg) => return usage_error(&msg),
    };
    let poly = match expr::parse_polynomial(expression) {
        Ok(p) => p,
        Err(msg) => return usage_error(&msg),
    };
    let web = match extract_web(&poly, &params) {
        Ok(w) => w,
        Err(err) => {
            eprintln!("error: tracing failed: {err}");
            return EXIT_NUMERIC;
        }
    };
    let diagram = match web_to_diagram(&web) {
        Ok(d) => d.with_source(expression),
        Err(err) => {
            eprintln!("error: collapsing the web failed: {err}");
            return EXIT_NUMERIC;
        }
    };

    if oracle {
        let grid_web = match sign_grid_oracle(&poly, ORACLE_RESOLUTION, &params) {
            Ok(w) => w,
            Err(err) => {
                eprintln!("error: sign-grid pass failed: {err}");
                return EXIT_NUMERIC;
            }
        };
        let grid_diagram = match web_to_diagram(&grid_web) {
            Ok(d) => d,
            Err(err) => {
                eprintln!("error: collapsing the sign-grid web failed: {err}");
                return EXIT_NUMERIC;
            }
        };
        if grid_diagram.canonical_form() != diagram.canonical_form() {
            eprintln!(
                "oracle mismatch:\n  traced:    {}\n  sign grid: {}",
                diagram.canonical_form(),
                grid_diagram.canonical_form()
            );
            return EXIT_MISMATCH;
        }
        eprintln!("oracle check passed");
    }

    if let Some(path) = &render_to {
        let svg = render::web_to_svg(&web);
        if let Err(code) = write_file(path, &svg) {
            return code;
        }
    }

    let json = diagram.to_json();
    match &out {
        Some(path) => {
            if let Err(code) = write_file(path, &json) {
                return code;
            }
            println!("degree {}", poly.degree());
            println!("class {}", diagram.canonical_form());
            println!("wrote {}", path.display());
            if let Some(path) = &render_to {
                println!("rendered {}", path.display());
            }
        }
        None => println!("{json}"),
    }
    EXIT_OK
}

fn cmd_enumerate(n: usize, out: Option<PathBuf>) -> u8 {
    if !(1..=6).contains(&n) {
        return usage_error("--n must be between 1 and 6");
    }
    let diagrams = match enumerate_generic(n) {
        Ok(d) => d,
        Err(err) => {
            eprintln!("error: enumeration failed: {err}");
            return EXIT_NUMERIC;
        }
    };
    println!(
        "degree {n}: {} single-color matchings, {} generic diagram classes",
        catalan(n),
        diagrams.len()
    );
    for diagram in &diagrams {
        println!("{}", diagram.canonical_form());
    }
    if let Some(path) = &out {
        let values: Vec<serde_json::Value> = diagrams
            .iter()
            .map(|d| serde_json::from_str(&d.to_json()).expect("diagram JSON is well-formed"))
            .collect();
        let body = serde_json::to_string_pretty(&values).expect("JSON array serializes");
        if let Err(code) = write_file(path, &body) {
            return code;
        }
        println!("wrote {}", path.display());
    }
    EXIT_OK
}

enum SampleRun {
    Pass,
    Mismatch(String),
    Untraceable,
}

fn cmd_equivariance(
    n: usize,
    samples: usize,
    seed: u64,
    workers: Option<usize>,
    tol_trace: Option<f64>,
    tol_merge: Option<f64>,
) -> u8 {
    if !(1..=8).contains(&n) {
        return usage_error("--n must be between 1 and 8");
    }
    if samples == 0 {
        return usage_error("--samples must be at least 1");
    }
    let params = match build_params(tol_trace, tol_merge) {
        Ok(p) => p,
        Err(msg) => return usage_error(&msg),
    };
    let worker_count = workers
        .or_else(|| {
            std::env::var("WEBSTRATA_WORKERS")
                .ok()
                .and_then(|value| value.parse().ok())
        })
        .unwrap_or(0);
    let pool = match rayon::ThreadPoolBuilder::new()
        .num_threads(worker_count)
        .build()
    {
        Ok(pool) => pool,
        Err(err) => {
            eprintln!("error: cannot start worker pool: {err}");
            return EXIT_NUMERIC;
        }
    };

    let config = SampleConfig::default();
    let outcomes: Vec<SampleRun> = pool.install(|| {
        (0..samples)
            .into_par_iter()
            .map(|index| {
                let poly =
                    random_web_polynomial(n, seed.wrapping_add(index as u64), &config);
                for generator in [DihedralElement::s(n), DihedralElement::t(n)] {
                    match check_equivariance(&poly, &generator, &params) {
                        Err(_) => return SampleRun::Untraceable,
                        Ok(outcome) if !outcome.holds() => {
                            return SampleRun::Mismatch(format!(
                                "sample {index}: transformed trace {} vs transformed diagram {}",
                                outcome.lhs, outcome.rhs
                            ));
                        }
                        Ok(_) => {}
                    }
                }
                SampleRun::Pass
            })
            .collect()
    });

    let mut passes = 0usize;
    let mut untraceable = 0usize;
    let mut mismatches: Vec<&String> = Vec::new();
    for outcome in &outcomes {
        match outcome {
            SampleRun::Pass => passes += 1,
            SampleRun::Untraceable => untraceable += 1,
            SampleRun::Mismatch(msg) => mismatches.push(msg),
        }
    }
    let checked = passes + mismatches.len();

    println!("degree {n}: {samples} samples, seed {seed}");
    println!(
        "equivariance held for {passes}/{checked} traceable samples ({untraceable} untraceable)"
    );
    for message in mismatches.iter().take(5) {
        println!("  {message}");
    }
    let report = GroupOrderReport::compute(n);
    println!(
        "boundary symmetry group: measured order {}, nominal order {}{}",
        report.measured,
        report.nominal,
        if report.matches() { "" } else { " (differs)" }
    );

    if checked == 0 {
        eprintln!("error: no sample could be traced");
        EXIT_NUMERIC
    } else if mismatches.is_empty() {
        EXIT_OK
    } else {
        EXIT_MISMATCH
    }
}

fn cmd_mgt(q_min: usize, q_max: usize, out: Option<PathBuf>) -> u8 {
    if q_min < 2 {
        return usage_error("--q-min must be at least 2");
    }
    if q_max > MAX_MODULUS {
        return usage_error(&format!("--q-max must be at most {MAX_MODULUS}"));
    }
    if q_min > q_max {
        return usage_error("--q-min must not exceed --q-max");
    }

    println!("q     |mGT_q|  q*phi(q)  affine  dihedral");
    let mut rows = Vec::new();
    let mut all_ok = true;
    for q in q_min..=q_max {
        let group = match mgt_group(q) {
            Ok(g) => g,
            Err(err) => return usage_error(&err.to_string()),
        };
        let order = group.len();
        let predicted = q * euler_phi(q);
        let affine = group
            .iter()
            .all(|perm| affine_normal_form(perm).is_some());
        let dihedral = if q >= 3 {
            let subgroup = match dihedral_subgroup(q) {
                Ok(s) => s,
                Err(err) => return usage_error(&err.to_string()),
            };
            let check = match dihedral_presentation_check(q) {
                Ok(c) => c,
                Err(err) => return usage_error(&err.to_string()),
            };
            Some((subgroup.len(), check.holds()))
        } else {
            None
        };

        let row_ok = order == predicted
            && affine
            && dihedral.map_or(true, |(size, holds)| size == 2 * q && holds);
        all_ok &= row_ok;

        let dihedral_text = match dihedral {
            Some((size, holds)) => format!("{size} ({})", if holds { "ok" } else { "BAD" }),
            None => "-".to_string(),
        };
        println!(
            "{q:<5} {order:<8} {predicted:<9} {affine:<7} {dihedral_text}{}",
            if row_ok { "" } else { "   <- MISMATCH" }
        );

        rows.push(serde_json::json!({
            "q": q,
            "order": order,
            "predicted": predicted,
            "affine": affine,
            "dihedral_order": dihedral.map(|(size, _)| size),
            "dihedral_presentation": dihedral.map(|(_, holds)| holds),
            "ok": row_ok,
        }));
    }
    println!(
        "{}",
        if all_ok {
            "all moduli match the product law"
        } else {
            "some moduli violated an invariant"
        }
    );
    if let Some(path) = &out {
        let body = serde_json::to_string_pretty(&rows).expect("JSON rows serialize");
        if let Err(code) = write_file(path, &body) {
            return code;
        }
        println!("wrote {}", path.display());
    }
    if all_ok {
        EXIT_OK
    } else {
        EXIT_MISMATCH
    }
}

fn cmd_orbitgrpd(
    graph: Option<PathBuf>,
    action: Option<PathBuf>,
    random: Option<usize>,
    seed: u64,
) -> u8 {
    match (graph, action, random) {
        (Some(graph_path), Some(action_path), None) => {
            let graph_text = match fs::read_to_string(&graph_path) {
                Ok(t) => t,
                Err(err) => {
                    return usage_error(&format!("cannot read {}: {err}", graph_path.display()))
                }
            };
            let action_text = match fs::read_to_string(&action_path) {
                Ok(t) => t,
                Err(err) => {
                    return usage_error(&format!("cannot read {}: {err}", action_path.display()))
                }
            };
            let graph = match FiniteGraph::parse(&graph_text) {
                Ok(g) => g,
                Err(err) => return usage_error(&err.to_string()),
            };
            let action = match GroupActionOnGraph::parse_vertex_generators(&graph, &action_text) {
                Ok(a) => a,
                Err(err) => return usage_error(&err.to_string()),
            };
            run_orbit_instance(&graph, &action, seed)
        }
        (None, None, Some(count)) => {
            if count == 0 {
                return usage_error("--random must be at least 1");
            }
            run_random_covers(count, seed)
        }
        _ => usage_error("provide --graph FILE with --action FILE, or --random N"),
    }
}

fn run_orbit_instance(graph: &FiniteGraph, action: &GroupActionOnGraph, seed: u64) -> u8 {
    let base: Vec<usize> = (0..graph.vertex_count()).collect();
    let report = match orbit_groupoid_check(graph, action, &base) {
        Ok(r) => r,
        Err(GraphError::NotFree(witness)) => {
            eprintln!("refused: the action is not free: {witness}");
            return EXIT_REFUSED;
        }
        Err(err) => return usage_error(&err.to_string()),
    };
    println!(
        "graph: {} vertices, {} edges; group order {}",
        graph.vertex_count(),
        graph.edges().len(),
        action.order()
    );
    println!("quotient fundamental-group rank: {}", report.quotient_rank);
    println!(
        "orbit-presentation rank:         {}",
        report.orbit_presentation_rank
    );
    println!(
        "quotient generators covered:     {}",
        report.surjective_on_generators
    );
    let club = check_clubsuit(graph, action, CLUBSUIT_SAMPLES, seed);
    println!(
        "walk lifting: {}/{} random walks lifted",
        club.walk_samples - club.walk_failures,
        club.walk_samples
    );
    println!(
        "stabilizer pairing: {}/{} lift pairs related",
        club.pair_samples - club.pair_failures,
        club.pair_samples
    );
    if report.holds() && club.holds() {
        println!("verdict: PASS");
        EXIT_OK
    } else {
        println!("verdict: FAIL");
        EXIT_MISMATCH
    }
}

fn run_random_covers(count: usize, seed: u64) -> u8 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut failures = 0usize;
    for index in 0..count {
        let group_order = rng.gen_range(2..=6usize);
        let max_vertices = (30 / group_order).min(6).max(2);
        let vertices = rng.gen_range(2..=max_vertices);
        let edge_count = rng.gen_range(vertices..=vertices + 4);
        let edges: Vec<(usize, usize)> = (0..edge_count)
            .map(|_| (rng.gen_range(0..vertices), rng.gen_range(0..vertices)))
            .collect();
        let base = FiniteGraph::new(vertices, edges).expect("generated endpoints are in range");
        let voltages: Vec<usize> = (0..edge_count)
            .map(|_| rng.gen_range(0..group_order))
            .collect();
        let (cover, action) =
            voltage_cover(&base, group_order, &voltages).expect("generated cover is valid");

        let all_vertices: Vec<usize> = (0..cover.vertex_count()).collect();
        let report = match orbit_groupoid_check(&cover, &action, &all_vertices) {
            Ok(r) => r,
            Err(err) => {
                println!("instance {index}: check refused ({err})");
                failures += 1;
                continue;
            }
        };
        let quotient = match quotient_graph(&cover, &action) {
            Ok(q) => q,
            Err(err) => {
                println!("instance {index}: quotient refused ({err})");
                failures += 1;
                continue;
            }
        };
        let multiplicative = cover.euler_characteristic()
            == group_order as i64 * quotient.graph.euler_characteristic();
        let ok = report.holds() && multiplicative;
        println!(
            "instance {index}: base {vertices}v/{edge_count}e, group order {group_order}, \
             cover rank {} vs orbit rank {} -> {}",
            report.quotient_rank,
            report.orbit_presentation_rank,
            if ok { "ok" } else { "FAIL" }
        );
        if !ok {
            failures += 1;
        }
    }
    println!(
        "{}/{count} random covers satisfied the rank identification",
        count - failures
    );
    if failures == 0 {
        EXIT_OK
    } else {
        EXIT_MISMATCH
    }
}
