use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use trigraph::automorphism::orbit_report;
use trigraph::oracle::{DEFAULT_BUDGET, DEFAULT_MAX_TREE_ENDS};
use trigraph::text::{format_automorphism, format_graph, parse_automorphism, parse_fmove, parse_graph};
use trigraph::{
    apply_fmove, automorphism_group, closure_e, decompose, enumerate_iso_classes, format_certificate,
    move_graph_components, parse_certificate, primary_decomposition, transport, verify_certificate, Automorphism,
    FMoveSpec, Graph, OracleError,
};

#[derive(Parser)]
#[command(
    name = "trigraph",
    version,
    about = "F-moves and automorphisms of uni/trivalent graphs"
)]
struct Cli {
    /// Worker threads for enumeration and the oracle (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Class {
    #[arg(long)]
    g: usize,
    #[arg(long)]
    b: usize,
}

#[derive(Args)]
struct Output {
    /// Write the main result here instead of standard output.
    #[arg(short = 'o')]
    output: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Check a graph file against its declared (g,b).
    Validate { graph: PathBuf },
    /// List the isomorphism classes of G_{g,b}.
    Enumerate {
        #[command(flatten)]
        class: Class,
        #[command(flatten)]
        out: Output,
    },
    /// List the automorphism group, or write one element as an automorphism file.
    Aut {
        graph: PathBuf,
        #[arg(long)]
        index: Option<usize>,
        #[command(flatten)]
        out: Output,
    },
    /// Orders of vertices and edges and the primary decomposition.
    Orbits { graph: PathBuf, aut: PathBuf },
    /// Apply an F-move and print the resulting graph.
    Fmove {
        graph: PathBuf,
        fmove: PathBuf,
        #[command(flatten)]
        out: Output,
    },
    /// Transport an automorphism across an invariant F-move.
    Transport {
        graph: PathBuf,
        aut: PathBuf,
        fmove: PathBuf,
        /// Also write the moved graph.
        #[arg(long)]
        graph_out: Option<PathBuf>,
        #[command(flatten)]
        out: Output,
    },
    /// Build a certificate expressing an automorphism through switches.
    Decompose {
        graph: PathBuf,
        aut: PathBuf,
        #[command(flatten)]
        out: Output,
    },
    /// Replay a certificate against an automorphism.
    Verify {
        graph: PathBuf,
        aut: PathBuf,
        cert: PathBuf,
    },
    /// Close the switches under composition and invariant moves.
    OracleClosure {
        #[command(flatten)]
        class: Class,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: usize,
        #[arg(long, default_value_t = DEFAULT_MAX_TREE_ENDS)]
        max_tree_ends: usize,
    },
    /// Connected components of G_{g,b} under elementary edge moves.
    OracleComponents {
        #[command(flatten)]
        class: Class,
    },
}

enum Failure {
    /// Definitively negative answer.
    Negative(String),
    Inconclusive(String),
    Usage(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Negative(_) => 1,
            Failure::Inconclusive(_) => 2,
            Failure::Usage(_) => 3,
        }
    }
}

type Outcome = Result<String, Failure>;

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn load_graph(path: &Path) -> Result<Graph, Failure> {
    let graph = parse_graph(&read(path)?).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    let report = graph.validate();
    if !report.is_valid() {
        return Err(Failure::Negative(format!(
            "{}: invalid graph\n{report}",
            path.display()
        )));
    }
    Ok(graph)
}

fn load_aut(path: &Path, graph: &Graph) -> Result<Automorphism, Failure> {
    parse_automorphism(&read(path)?, graph).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn load_fmove(path: &Path, graph: &Graph) -> Result<FMoveSpec, Failure> {
    parse_fmove(&read(path)?, graph).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn emit(out: &Output, text: String) -> Outcome {
    match &out.output {
        Some(path) => {
            fs::write(path, &text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
            Ok(format!("wrote {}\n", path.display()))
        }
        None => Ok(text),
    }
}

fn oracle_failure(e: OracleError) -> Failure {
    match e {
        OracleError::Saturation { .. } => Failure::Inconclusive(e.to_string()),
        other => Failure::Usage(other.to_string()),
    }
}

fn run(command: Command) -> Outcome {
    match command {
        Command::Validate { graph } => {
            let g = parse_graph(&read(&graph)?).map_err(|e| Failure::Usage(format!("{}: {e}", graph.display())))?;
            let report = g.validate();
            if report.is_valid() {
                Ok(format!(
                    "valid g={} b={} edges={}\n",
                    g.genus(),
                    g.boundary(),
                    g.num_edges()
                ))
            } else {
                Err(Failure::Negative(format!("invalid\n{report}")))
            }
        }
        Command::Enumerate { class, out } => {
            let classes = enumerate_iso_classes(class.g, class.b).map_err(|e| Failure::Usage(e.to_string()))?;
            let mut text = format!("# {} classes in G_{{{},{}}}\n", classes.len(), class.g, class.b);
            for (i, g) in classes.iter().enumerate() {
                let _ = write!(
                    text,
                    "\n# class {i} {}\n{}",
                    trigraph::text::graph_hash(g),
                    format_graph(g)
                );
            }
            emit(&out, text)
        }
        Command::Aut { graph, index, out } => {
            let g = load_graph(&graph)?;
            let group = automorphism_group(&g).map_err(|e| Failure::Negative(e.to_string()))?;
            match index {
                Some(i) => {
                    let phi = group.get(i).ok_or_else(|| {
                        Failure::Usage(format!("index {i} out of range (group order {})", group.len()))
                    })?;
                    emit(&out, format_automorphism(&g, phi))
                }
                None => {
                    let mut text = format!("group order {}\n", group.len());
                    for (i, phi) in group.iter().enumerate() {
                        let _ = writeln!(text, "{i} order {} {phi}", phi.order());
                    }
                    emit(&out, text)
                }
            }
        }
        Command::Orbits { graph, aut } => {
            let g = load_graph(&graph)?;
            let phi = load_aut(&aut, &g)?;
            let r = orbit_report(&g, &phi).map_err(|e| Failure::Negative(e.to_string()))?;
            let join = |v: &[usize]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ");
            let parts = primary_decomposition(&phi);
            Ok(format!(
                "order {}\nvertex orders {}\nedge orders {}\nedge order set {} (m={} k={})\nprimary parts {}\n",
                r.order,
                join(&r.vertex_orders),
                join(&r.edge_orders),
                join(&r.edge_order_set),
                r.base,
                r.doublings,
                join(&parts.orders),
            ))
        }
        Command::Fmove { graph, fmove, out } => {
            let g = load_graph(&graph)?;
            let mv = load_fmove(&fmove, &g)?;
            let (h, _) = apply_fmove(&g, &mv).map_err(|e| Failure::Negative(e.to_string()))?;
            emit(&out, format_graph(&h))
        }
        Command::Transport {
            graph,
            aut,
            fmove,
            graph_out,
            out,
        } => {
            let g = load_graph(&graph)?;
            let phi = load_aut(&aut, &g)?;
            let mv = load_fmove(&fmove, &g)?;
            let (h, psi) = transport(&g, &phi, &mv).map_err(|e| Failure::Negative(format!("not invariant: {e}")))?;
            if let Some(path) = graph_out {
                fs::write(&path, format_graph(&h)).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
            }
            emit(&out, format_automorphism(&h, &psi))
        }
        Command::Decompose { graph, aut, out } => {
            let g = load_graph(&graph)?;
            let phi = load_aut(&aut, &g)?;
            let cert = decompose(&g, &phi).map_err(|e| Failure::Negative(e.to_string()))?;
            let text = format_certificate(&g, &cert).map_err(|e| Failure::Negative(e.to_string()))?;
            emit(&out, text)
        }
        Command::Verify { graph, aut, cert } => {
            let g = load_graph(&graph)?;
            let phi = load_aut(&aut, &g)?;
            let c =
                parse_certificate(&read(&cert)?, &g).map_err(|e| Failure::Usage(format!("{}: {e}", cert.display())))?;
            match verify_certificate(&g, &c, &phi) {
                Ok(()) => {
                    let s = c.stats();
                    Ok(format!(
                        "verified: {} nodes, {} switches, {} transports, depth {}\n",
                        s.nodes, s.switches, s.transports, s.depth
                    ))
                }
                Err(e) => Err(Failure::Negative(format!("verification failed {e}"))),
            }
        }
        Command::OracleClosure {
            class,
            budget,
            max_tree_ends,
        } => {
            let r = closure_e(class.g, class.b, budget, max_tree_ends).map_err(oracle_failure)?;
            let text = format!(
                "G_{{{},{}}}: {} graphs, {} automorphism classes\nswitch closure reached {} classes in {} rounds ({} transports)\n{} move classes\n",
                r.genus,
                r.boundary,
                r.graphs,
                r.all.len(),
                r.closure.len(),
                r.rounds,
                r.explored,
                r.move_classes
            );
            if r.is_full() {
                Ok(text + "closure = full automorphism set\n")
            } else {
                let mut missing = String::new();
                for k in r.all.difference(&r.closure) {
                    let _ = writeln!(missing, "missing {}", k.digest());
                }
                Err(Failure::Negative(text + &missing + "closure is a proper subset\n"))
            }
        }
        Command::OracleComponents { class } => {
            let components = move_graph_components(class.g, class.b).map_err(oracle_failure)?;
            let mut text = format!("G_{{{},{}}}: {} components\n", class.g, class.b, components.len());
            for (i, c) in components.iter().enumerate() {
                let codes: Vec<String> = c.iter().map(|code| code.digest()).collect();
                let _ = writeln!(text, "component {i}: {}", codes.join(" "));
            }
            Ok(text)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 3 } else { 0 });
        }
    };
    if let Some(jobs) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global() {
            eprintln!("--jobs: {e}");
            return ExitCode::from(3);
        }
    }
    match run(cli.command) {
        Ok(text) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(f) => {
            let (Failure::Negative(m) | Failure::Inconclusive(m) | Failure::Usage(m)) = &f;
            eprintln!("{m}");
            ExitCode::from(f.code())
        }
    }
}
