//! Command line front end.
//!
//! Exit status: 0 when the answer is yes (or the certificate verifies), 1
//! for no, unknown or a rejected certificate, 2 for bad input or an
//! exhausted resource limit.

use std::collections::BTreeSet;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use wordeq::engine::{critical_words, l_factorize};
use wordeq::format::{parse_certificate, parse_equation_file, parse_problem, render_certificate};
use wordeq::frontend::ConstraintMode;
use wordeq::solver::{
    oracle_solve, solve_equation, solve_group_formula, GroupVerdict, SearchConfig, Verdict,
};
use wordeq::{Alphabet, Error, Result};

#[derive(Parser)]
#[command(
    name = "wordeq",
    version,
    about = "Equations with rational constraints in free groups and free monoids"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Decide a formula file over a free group.
    SolveGroup {
        file: PathBuf,
        #[command(flatten)]
        search: SearchArgs,
    },
    /// Decide an equation file over a free monoid with involution.
    SolveEquation {
        file: PathBuf,
        #[command(flatten)]
        search: SearchArgs,
        /// Write a certificate here when a solution is found.
        #[arg(long)]
        certificate: Option<PathBuf>,
    },
    /// Brute force search for a solution with values up to `--maxlen`.
    Oracle {
        file: PathBuf,
        #[arg(long, default_value_t = 6)]
        maxlen: usize,
        #[arg(long, default_value_t = 1 << 20)]
        cap: u64,
    },
    /// Check a certificate file.
    Verify {
        file: PathBuf,
        #[arg(long, default_value_t = 1 << 20)]
        cap: u64,
    },
    /// Print the l-factorization of a word over the letters it uses.
    Factorize {
        word: String,
        #[arg(long, default_value_t = 1)]
        ell: usize,
        /// Comma separated cut positions; all positions by default.
        #[arg(long, value_delimiter = ',')]
        cuts: Option<Vec<usize>>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Residual,
    Folded,
}

#[derive(Args)]
struct SearchArgs {
    #[arg(long, default_value_t = 6)]
    max_len: usize,
    #[arg(long, default_value_t = 1 << 20)]
    cap: u64,
    #[arg(long, default_value_t = 1_000_000)]
    reach_budget: usize,
    #[arg(long, default_value_t = 64)]
    admissibility_c: u64,
    #[arg(long, default_value_t = 4096)]
    branch_budget: usize,
    #[arg(long, default_value_t = 40)]
    max_depth: usize,
    #[arg(long, default_value_t = 200_000)]
    node_budget: usize,
    #[arg(long)]
    exponent_ceiling: Option<u64>,
    #[arg(long, default_value_t = 1)]
    max_base_changes: usize,
    #[arg(long, default_value_t = 1)]
    max_projections: usize,
    /// Turn off the visited set.
    #[arg(long)]
    no_dedup: bool,
    #[arg(long, value_enum, default_value_t = Mode::Residual)]
    mode: Mode,
    /// Skip the oracle pass before the search.
    #[arg(long)]
    no_oracle_seed: bool,
}

impl SearchArgs {
    fn config(&self) -> SearchConfig {
        SearchConfig {
            max_len: self.max_len,
            cap: self.cap,
            reach_budget: self.reach_budget,
            admissibility_c: self.admissibility_c,
            branch_budget: self.branch_budget,
            max_depth: self.max_depth,
            node_budget: self.node_budget,
            schedule: None,
            exponent_ceiling: self.exponent_ceiling,
            max_base_changes: self.max_base_changes,
            max_projections: self.max_projections,
            dedup: !self.no_dedup,
            mode: match self.mode {
                Mode::Residual => ConstraintMode::Residual,
                Mode::Folded => ConstraintMode::Folded,
            },
            oracle_seed: !self.no_oracle_seed,
        }
    }
}

fn read(path: &PathBuf) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::parse(0, format!("{}: {e}", path.display())))
}

fn run(cli: Cli) -> Result<bool> {
    match cli.cmd {
        Cmd::SolveGroup { file, search } => {
            let p = parse_problem(&read(&file)?)?;
            let out = solve_group_formula(&p, &search.config())?;
            match out.verdict {
                GroupVerdict::True => {
                    println!("true");
                    if let Some(w) = &out.witness {
                        for (&x, v) in w.assignment.iter().filter(|(&x, _)| x <= p.syms.bar(x)) {
                            println!("{} = {}", p.syms.name(x), p.syms.render(v));
                        }
                    }
                    Ok(true)
                }
                GroupVerdict::False => {
                    println!("false");
                    Ok(false)
                }
                GroupVerdict::FalseWithinBudget => {
                    println!(
                        "unknown: no solution within the budget ({} branches)",
                        out.branches
                    );
                    Ok(false)
                }
            }
        }
        Cmd::SolveEquation {
            file,
            search,
            certificate,
        } => {
            let f = parse_equation_file(&read(&file)?)?;
            let cfg = search.config();
            let (out, e) = solve_equation(&f.equation, &cfg)?;
            match out.verdict {
                Verdict::Sat { solution, path } => {
                    println!("sat");
                    for x in e
                        .syms
                        .symbols()
                        .filter(|&x| e.omega.contains(&x) && x <= e.syms.bar(x))
                    {
                        println!(
                            "{} = {}",
                            e.syms.name(x),
                            e.syms.render(solution.get(x).map_or(&[][..], |w| &w[..]))
                        );
                    }
                    if let Some(c) = certificate {
                        let text = render_certificate(&e, Some(&solution), &path)?;
                        std::fs::write(&c, text)
                            .map_err(|err| Error::parse(0, format!("{}: {err}", c.display())))?;
                    }
                    Ok(true)
                }
                Verdict::Unsat => {
                    println!("unsat");
                    Ok(false)
                }
                Verdict::Unknown => {
                    println!(
                        "unknown: {} nodes, depth {}",
                        out.stats.nodes, out.stats.deepest
                    );
                    Ok(false)
                }
            }
        }
        Cmd::Oracle { file, maxlen, cap } => {
            let f = parse_equation_file(&read(&file)?)?;
            let e = &f.equation;
            match oracle_solve(e, maxlen, cap)? {
                Some(s) => {
                    println!("sat");
                    for x in e
                        .syms
                        .symbols()
                        .filter(|&x| e.omega.contains(&x) && x <= e.syms.bar(x))
                    {
                        println!(
                            "{} = {}",
                            e.syms.name(x),
                            e.syms.render(s.get(x).map_or(&[][..], |w| &w[..]))
                        );
                    }
                    Ok(true)
                }
                None => {
                    println!("none up to length {maxlen}");
                    Ok(false)
                }
            }
        }
        Cmd::Verify { file, cap } => {
            let c = parse_certificate(&read(&file)?, cap)?;
            match c.defect(cap)? {
                None => {
                    println!("valid ({} arcs)", c.arcs.len());
                    Ok(true)
                }
                Some(d) => {
                    println!("invalid: {d}");
                    Ok(false)
                }
            }
        }
        Cmd::Factorize { word, ell, cuts } => {
            let (al, w) = word_alphabet(&word)?;
            let cuts: BTreeSet<usize> = match cuts {
                Some(c) => c.into_iter().collect(),
                None => (0..=w.len()).collect(),
            };
            let crit = critical_words(&al, &w, ell, &cuts);
            println!("{}", l_factorize(&w, ell, &crit).render(&al));
            Ok(true)
        }
    }
}

/// Single character letters; `x'` is the involution of `x`.
fn word_alphabet(text: &str) -> Result<(Alphabet, wordeq::Word)> {
    let mut al = Alphabet::new();
    let mut w = Vec::new();
    let chars: Vec<char> = text.chars().filter(|c| !c.is_whitespace()).collect();
    let mut i = 0;
    while i < chars.len() {
        let name = chars[i].to_string();
        if name == "1" {
            i += 1;
            continue;
        }
        let bar = i + 1 < chars.len() && chars[i + 1] == '\'';
        let s = match al.lookup(&name) {
            Some(s) => s,
            None => al.add_pair(&name, wordeq::Kind::Constant)?,
        };
        w.push(if bar { al.bar(s) } else { s });
        i += if bar { 2 } else { 1 };
    }
    Ok((al, w))
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
