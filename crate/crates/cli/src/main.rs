use std::fs;
use std::io::{self, Read, Write};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};

use treecut::decomposition::{width, LeafRule, WidthReport, WidthWitness};
use treecut::exact::DEFAULT_EXACT_CAP;
use treecut::format::{
    parse_decomposition, parse_graph, parse_starcut, write_decomposition, write_graph, write_solution,
};
use treecut::instances::{gen_bisection_instance, gen_hw, gen_random};
use treecut::starcut::solve;
use treecut::treewidth::{exact_treewidth, heuristic_ub, to_nice, DEFAULT_TW_CAP};
use treecut::{approx_tcw, exact_tcw, ApproxOutcome};

/// Tree-cut width tools. `-` stands for standard input or output.
#[derive(Parser)]
#[command(name = "treecut", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decomposition of width at most 2w, or a certificate that tcw > w.
    Approx {
        #[arg(long)]
        w: u64,
        graph: String,
        /// Write the decomposition here.
        #[arg(long)]
        out: Option<String>,
        /// Write the decomposition as a DOT graph here.
        #[arg(long)]
        dot: Option<String>,
    },
    /// Exact tree-cut width by exhaustive search, followed by a witness.
    Exact {
        graph: String,
        /// Largest graph accepted.
        #[arg(long, default_value_t = DEFAULT_EXACT_CAP)]
        cap: usize,
    },
    /// Checks a decomposition and reports its width.
    Verify { graph: String, decomposition: String },
    /// Solves a star-cut instance.
    Starcut { instance: String },
    /// Treewidth, exact on small graphs and a min-fill upper bound otherwise.
    Tw { graph: String },
    /// Writes a generated graph to standard output.
    Gen {
        #[command(subcommand)]
        family: Family,
    },
}

#[derive(Subcommand)]
enum Family {
    /// The grid-like graph H_w on w^2 vertices.
    Hw {
        #[arg(long)]
        w: u32,
    },
    /// The Min Bisection reduction graph for a source graph and cut size k.
    Bisection {
        #[arg(long)]
        graph: String,
        #[arg(long)]
        k: u64,
    },
    /// A seeded random multigraph.
    Random {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        m: usize,
        #[arg(long, default_value_t = 1)]
        max_mult: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn read_input(path: &str) -> Result<String> {
    if path == "-" {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s).context("reading standard input")?;
        Ok(s)
    } else {
        fs::read_to_string(path).with_context(|| format!("reading {path}"))
    }
}

fn write_output(out: &mut impl Write, path: &str, text: &str) -> Result<()> {
    if path == "-" {
        out.write_all(text.as_bytes())?;
        Ok(())
    } else {
        fs::write(path, text).with_context(|| format!("writing {path}"))
    }
}

fn load_graph(path: &str) -> Result<treecut::Multigraph> {
    parse_graph(&read_input(path)?).with_context(|| format!("in graph {path}"))
}

fn print_report(out: &mut impl Write, r: &WidthReport) -> io::Result<()> {
    writeln!(out, "WIDTH {}", r.width)?;
    writeln!(out, "INTERNAL_WIDTH {}", r.internal_width)?;
    writeln!(out, "MAX_ADHESION {}", r.max_adhesion)?;
    match r.witness {
        WidthWitness::Adhesion(a, b) => writeln!(out, "ATTAINED adhesion {a} {b}"),
        WidthWitness::Torso(t) => writeln!(out, "ATTAINED torso {t}"),
        WidthWitness::None => writeln!(out, "ATTAINED none"),
    }?;
    for ((a, b), s) in &r.adhesions {
        writeln!(out, "ADHESION {a} {b} {s}")?;
    }
    for (t, s) in r.torso_sizes.iter().enumerate() {
        writeln!(out, "TORSO {t} {s}")?;
    }
    Ok(())
}

fn run(cli: Cli, out: &mut impl Write) -> Result<ExitCode> {
    match cli.command {
        Command::Approx { w, graph, out: out_path, dot } => {
            let g = load_graph(&graph)?;
            match approx_tcw(&g, w)? {
                ApproxOutcome::Decomposition(d, r) => {
                    writeln!(out, "WIDTH {}", r.width)?;
                    if let Some(path) = out_path {
                        write_output(out, &path, &write_decomposition(&d))?;
                    }
                    if let Some(path) = dot {
                        write_output(out, &path, &d.to_dot())?;
                    }
                    Ok(ExitCode::SUCCESS)
                }
                ApproxOutcome::TooWide(cert) => {
                    writeln!(out, "TOOWIDE {cert}")?;
                    Ok(ExitCode::from(1))
                }
            }
        }
        Command::Exact { graph, cap } => {
            let g = load_graph(&graph)?;
            let r = exact_tcw(&g, cap)?;
            writeln!(out, "TCW {}", r.tcw)?;
            write!(out, "{}", write_decomposition(&r.witness))?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify { graph, decomposition } => {
            let g = load_graph(&graph)?;
            let d = parse_decomposition(&read_input(&decomposition)?)
                .with_context(|| format!("in decomposition {decomposition}"))?;
            if let Err(violations) = d.validate(&g, LeafRule::Strict) {
                writeln!(out, "INVALID")?;
                for v in violations {
                    eprintln!("violation: {v}");
                }
                return Ok(ExitCode::from(2));
            }
            print_report(out, &width(&g, &d)?)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Starcut { instance } => {
            let inst = parse_starcut(&read_input(&instance)?).with_context(|| format!("in instance {instance}"))?;
            let td = if inst.g.vertex_count() <= DEFAULT_TW_CAP {
                exact_treewidth(&inst.g)?.1
            } else {
                heuristic_ub(&inst.g).1
            };
            match solve(&inst, &to_nice(&inst.g, &td)?)? {
                Some(sol) => {
                    writeln!(out, "YES")?;
                    write!(out, "{}", write_solution(&sol))?;
                    Ok(ExitCode::SUCCESS)
                }
                None => {
                    writeln!(out, "NO")?;
                    Ok(ExitCode::from(1))
                }
            }
        }
        Command::Tw { graph } => {
            let g = load_graph(&graph)?;
            if g.vertex_count() <= DEFAULT_TW_CAP {
                writeln!(out, "TW {} EXACT", exact_treewidth(&g)?.0)?;
            } else {
                writeln!(out, "TW {} UB", heuristic_ub(&g).0)?;
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Gen { family } => {
            let g = match family {
                Family::Hw { w } => gen_hw(w),
                Family::Bisection { graph, k } => gen_bisection_instance(&load_graph(&graph)?, k)?.graph,
                Family::Random { n, m, max_mult, seed } => gen_random(n, m, max_mult, seed)?,
            };
            write!(out, "{}", write_graph(&g)?)?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut out = io::BufWriter::new(io::stdout().lock());
    let result = run(cli, &mut out).and_then(|code| Ok(out.flush().map(|_| code)?));
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
