//! Command-line frontend: prove problems, check traces, list derived
//! rules, and run a directory of problems as a benchmark.
//!
//! Exit codes: 0 proved/valid, 1 exhausted or timed out, 2 usage or parse
//! error, 3 invalid proof.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Duration;

use clap::{Parser, Subcommand};

use polartab_core::preprocess::preprocess_problem;
use polartab_core::prover::{prove, ProofResult, ProveReport, ProverError, SearchConfig};
use polartab_core::syntax::NameGen;
use polartab_core::{check_proof, reconstruct_rewrites, PreprocessOptions, Problem, ProofTrace, Verdict};

#[derive(Parser)]
#[command(name = "polartab", version, about = "Tableau prover with polarized rewriting")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Prove the goal of a problem file.
    Prove {
        file: PathBuf,
        /// Per-branch bound on universal instantiations (iterative deepening ceiling).
        #[arg(long, default_value_t = 10)]
        max_gamma: usize,
        /// Single rewrite steps allowed per literal.
        #[arg(long, default_value_t = 10_000)]
        rewrite_budget: usize,
        /// Wall-clock limit in seconds.
        #[arg(long, default_value_t = 30)]
        timeout: u64,
        /// Plain deduction modulo: only equivalences orient, into
        /// two-sided unskolemized rules; everything else stays an axiom.
        #[arg(long)]
        no_polarize: bool,
        /// Keep rule right-hand sides quantified.
        #[arg(long)]
        no_skolemize_rules: bool,
        /// Leave every axiom as an assumption instead of orienting it.
        #[arg(long)]
        no_orient: bool,
        /// Write the proof trace to this file.
        #[arg(long)]
        trace: Option<PathBuf>,
        /// Drop rewrite-step details from the written trace.
        #[arg(long)]
        elide_rewrites: bool,
        /// Print search statistics.
        #[arg(long)]
        stats: bool,
    },
    /// Check a proof trace against its problem file.
    Check {
        file: PathBuf,
        #[arg(long)]
        trace: PathBuf,
        /// Recover elided rewrite steps before checking.
        #[arg(long)]
        reconstruct: bool,
        #[arg(long, default_value_t = 10_000)]
        rewrite_budget: usize,
    },
    /// List the rewrite rules derived from a problem file.
    Rules {
        file: PathBuf,
        #[arg(long)]
        no_polarize: bool,
        #[arg(long)]
        no_skolemize_rules: bool,
    },
    /// Prove every .p file in a directory and print a result table.
    Bench {
        dir: PathBuf,
        #[arg(long, default_value_t = 10)]
        max_gamma: usize,
        #[arg(long, default_value_t = 10_000)]
        rewrite_budget: usize,
        #[arg(long, default_value_t = 30)]
        timeout: u64,
        #[arg(long)]
        no_polarize: bool,
    },
}

fn main() {
    std::process::exit(run(Cli::parse()));
}

fn load_problem(path: &Path) -> Result<Problem, String> {
    let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "problem".to_string());
    Problem::parse(&name, &text).map_err(|e| format!("{}: {e}", path.display()))
}

fn print_stats(report: &ProveReport) {
    let s = &report.stats;
    println!("expansions={}", s.expansions);
    println!("closures={}", s.closures);
    println!("gamma={}", s.gamma);
    println!("rewrite_steps={}", s.rewrite_steps);
    println!("searched={}", s.searched);
    println!("wall_ms={:.3}", s.wall.as_secs_f64() * 1e3);
}

fn run(cli: Cli) -> i32 {
    match cli.cmd {
        Cmd::Prove {
            file,
            max_gamma,
            rewrite_budget,
            timeout,
            no_polarize,
            no_skolemize_rules,
            no_orient,
            trace,
            elide_rewrites,
            stats,
        } => {
            let problem = match load_problem(&file) {
                Ok(p) => p,
                Err(e) => {
                    eprintln!("error: {e}");
                    return 2;
                }
            };
            let popts = PreprocessOptions {
                polarize: !no_polarize,
                skolemize_rules: !no_skolemize_rules,
                orient_axioms: !no_orient,
            };
            let cfg = SearchConfig {
                max_gamma,
                rewrite_budget,
                timeout: Duration::from_secs(timeout),
                ..Default::default()
            };
            let report = match prove(&problem, &popts, &cfg) {
                Ok(r) => r,
                Err(e) => {
                    eprintln!("error: {e}");
                    return 2;
                }
            };
            if stats {
                print_stats(&report);
            }
            match report.result {
                ProofResult::Proved(t) => {
                    println!("Proved.");
                    if let Some(path) = trace {
                        let out = if elide_rewrites { t.elide_rewrites() } else { *t };
                        if let Err(e) = fs::write(&path, out.serialize()) {
                            eprintln!("error: cannot write {}: {e}", path.display());
                            return 2;
                        }
                    }
                    0
                }
                ProofResult::Exhausted { hit_bounds } => {
                    if hit_bounds {
                        println!("Exhausted (bounds reached).");
                    } else {
                        println!("Exhausted (saturated).");
                    }
                    1
                }
                ProofResult::Timeout => {
                    println!("Timeout.");
                    1
                }
            }
        }
        Cmd::Check {
            file,
            trace,
            reconstruct,
            rewrite_budget,
        } => {
            let problem = match load_problem(&file) {
                Ok(p) => p,
                Err(e) => {
                    eprintln!("error: {e}");
                    return 2;
                }
            };
            let text = match fs::read_to_string(&trace) {
                Ok(t) => t,
                Err(e) => {
                    eprintln!("error: {}: {e}", trace.display());
                    return 2;
                }
            };
            let parsed = match ProofTrace::parse(&text) {
                Ok(t) => t,
                Err(e) => {
                    eprintln!("invalid: {e}");
                    return 3;
                }
            };
            let checked = if reconstruct {
                match reconstruct_rewrites(&problem, &parsed, rewrite_budget) {
                    Ok(t) => t,
                    Err(e) => {
                        eprintln!("invalid: {e}");
                        return 3;
                    }
                }
            } else {
                parsed
            };
            match check_proof(&problem, &checked) {
                Ok(Verdict::Valid) => {
                    println!("Valid.");
                    0
                }
                Ok(Verdict::Invalid { node, reason }) => {
                    println!("Invalid at node {node}: {reason}");
                    3
                }
                Err(e) => {
                    eprintln!("invalid: {e}");
                    3
                }
            }
        }
        Cmd::Rules {
            file,
            no_polarize,
            no_skolemize_rules,
        } => {
            let problem = match load_problem(&file) {
                Ok(p) => p,
                Err(e) => {
                    eprintln!("error: {e}");
                    return 2;
                }
            };
            let popts = PreprocessOptions {
                polarize: !no_polarize,
                skolemize_rules: !no_skolemize_rules,
                orient_axioms: true,
            };
            let mut gen = NameGen::with_reserved(problem.signature_symbols());
            match preprocess_problem(&problem, &popts, &mut gen) {
                Ok(prep) => {
                    for line in prep.rules.render_lines() {
                        println!("{line}");
                    }
                    0
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    2
                }
            }
        }
        Cmd::Bench {
            dir,
            max_gamma,
            rewrite_budget,
            timeout,
            no_polarize,
        } => {
            let mut files: Vec<PathBuf> = match fs::read_dir(&dir) {
                Ok(rd) => rd
                    .filter_map(|e| e.ok())
                    .map(|e| e.path())
                    .filter(|p| p.extension().map(|x| x == "p").unwrap_or(false))
                    .collect(),
                Err(e) => {
                    eprintln!("error: {}: {e}", dir.display());
                    return 2;
                }
            };
            files.sort();
            let popts = PreprocessOptions {
                polarize: !no_polarize,
                ..Default::default()
            };
            let cfg = SearchConfig {
                max_gamma,
                rewrite_budget,
                timeout: Duration::from_secs(timeout),
                ..Default::default()
            };
            println!(
                "{:<24} {:<12} {:>6} {:>6} {:>6} {:>9}",
                "problem", "status", "exp", "gamma", "rw", "ms"
            );
            let mut proved_count = 0usize;
            let total = files.len();
            for path in files {
                let name = path
                    .file_stem()
                    .map(|s| s.to_string_lossy().into_owned())
                    .unwrap_or_default();
                let row = match load_problem(&path) {
                    Err(e) => {
                        eprintln!("error: {e}");
                        format!("{name:<24} {:<12}", "parse-error")
                    }
                    Ok(problem) => match prove(&problem, &popts, &cfg) {
                        Ok(report) => {
                            let status = match report.result {
                                ProofResult::Proved(_) => {
                                    proved_count += 1;
                                    "proved"
                                }
                                ProofResult::Exhausted { .. } => "exhausted",
                                ProofResult::Timeout => "timeout",
                            };
                            format!(
                                "{:<24} {:<12} {:>6} {:>6} {:>6} {:>9.1}",
                                name,
                                status,
                                report.stats.expansions,
                                report.stats.gamma,
                                report.stats.rewrite_steps,
                                report.stats.wall.as_secs_f64() * 1e3
                            )
                        }
                        Err(ProverError::RewriteLimit { .. }) => {
                            format!("{name:<24} {:<12}", "rw-limit")
                        }
                        Err(e) => {
                            eprintln!("error: {name}: {e}");
                            format!("{name:<24} {:<12}", "error")
                        }
                    },
                };
                println!("{row}");
            }
            println!("proved {proved_count}/{total}");
            0
        }
    }
}
