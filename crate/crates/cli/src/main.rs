//! `kdeck`: generate pictures, take decks, reconstruct, and run the
//! experiment and oracle tooling.
//!
//! Exit status: 0 on success, 1 when a reconstruction fails or an oracle
//! answers no, 2 on usage, parse, I/O or resource errors.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use kdeck_core::analysis::{self, ExperimentConfig};
use kdeck_core::diagnostics::{describe, extract_interfaces, mark_bad_windows};
use kdeck_core::format::{decode_deck, decode_picture, encode_deck, encode_picture};
use kdeck_core::oracle::{self, TrialResult, Verdict};
use kdeck_core::{deck, random_picture, reconstruct, Outcome};

#[derive(Parser)]
#[command(
    name = "kdeck",
    version,
    about = "Reconstruct binary pictures from their k-decks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a uniformly random n×n picture.
    Gen {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write the k-deck of a picture.
    Deck {
        #[arg(long)]
        k: usize,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Reconstruct a picture from a deck.
    Reconstruct {
        #[arg(long)]
        deck: PathBuf,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Exit 0 only if the output equals this picture.
        #[arg(long)]
        truth: Option<PathBuf>,
    },
    /// One random picture, its deck and one reconstruction.
    Trial {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        seed: u64,
    },
    /// Monte Carlo sweep over (n, k), written as CSV.
    Experiment {
        /// Comma-separated sizes.
        #[arg(long, value_parser = parse_list)]
        n: List,
        /// `a..b` (inclusive) or a comma-separated list.
        #[arg(long, value_parser = parse_range)]
        k: List,
        #[arg(long)]
        trials: u64,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        threads: usize,
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Fill the mean_ms column (makes the output time-dependent).
        #[arg(long)]
        timing: bool,
    },
    /// Exhaustive reconstructibility for tiny pictures.
    Oracle {
        #[command(subcommand)]
        command: OracleCommand,
    },
    /// Threshold, ratios and log₂ bounds for (n, k).
    Bounds {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
    },
    /// Bad-window marks and interface paths of a reconstruction.
    Diagnose {
        #[arg(long)]
        truth: PathBuf,
        #[arg(long)]
        output: PathBuf,
        #[arg(long)]
        k: usize,
        /// Write the mark map here.
        #[arg(long)]
        marks: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum OracleCommand {
    /// Count reconstructible pictures of size n.
    Classify {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        /// Allow n = 5 (2^25 pictures).
        #[arg(long)]
        allow_n5: bool,
    },
    /// Decide whether one picture is reconstructible.
    Check {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        allow_n5: bool,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
struct List(Vec<usize>);

fn parse_list(s: &str) -> Result<List, String> {
    s.split(',')
        .map(|t| t.trim().parse::<usize>().map_err(|e| format!("{t:?}: {e}")))
        .collect::<Result<_, _>>()
        .map(List)
}

fn parse_range(s: &str) -> Result<List, String> {
    match s.split_once("..") {
        Some((a, b)) => {
            let a: usize = a.trim().parse().map_err(|e| format!("{a:?}: {e}"))?;
            let b: usize = b.trim().parse().map_err(|e| format!("{b:?}: {e}"))?;
            if a > b {
                return Err(format!("empty range {s}"));
            }
            Ok(List((a..=b).collect()))
        }
        None => parse_list(s),
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .context("writing stdout"),
    }
}

fn load_picture(path: &Path) -> Result<kdeck_core::Picture> {
    decode_picture(&read(path)?).with_context(|| format!("parsing {}", path.display()))
}

const OK: ExitCode = ExitCode::SUCCESS;

fn fail() -> ExitCode {
    ExitCode::from(1)
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Gen { n, seed, out } => {
            let p = random_picture(n, seed)?;
            emit(out.as_deref(), &encode_picture(&p))?;
            Ok(OK)
        }
        Command::Deck { k, input, out } => {
            let p = load_picture(&input)?;
            emit(out.as_deref(), &encode_deck(&deck(&p, k)?))?;
            Ok(OK)
        }
        Command::Reconstruct {
            deck: path,
            seed,
            out,
            truth,
        } => {
            let d = decode_deck(&read(&path)?)
                .with_context(|| format!("parsing {}", path.display()))?;
            let truth = truth.as_deref().map(load_picture).transpose()?;
            let r = reconstruct(&d, seed)?;
            let s = &r.stats;
            eprintln!(
                "naive={} internal={} corner={} leftover={} boundary_columns={} boundary_rows={} deck_remaining={}",
                s.naive, s.internal, s.corner, s.leftover, s.boundary_columns, s.boundary_rows, s.deck_remaining
            );
            match r.outcome {
                Outcome::Success(p) => {
                    emit(out.as_deref(), &encode_picture(&p))?;
                    match truth {
                        Some(t) if t != p => {
                            eprintln!("output differs from the truth picture");
                            Ok(fail())
                        }
                        _ => Ok(OK),
                    }
                }
                Outcome::Abort { stage, reason } => {
                    eprintln!("aborted at {} stage: {reason}", stage.name());
                    Ok(fail())
                }
            }
        }
        Command::Trial { n, k, seed } => {
            let t = oracle::run_trial(n, k, seed)?;
            let result = match t.result {
                TrialResult::Success => "success".to_string(),
                TrialResult::WrongOutput => "wrong_output".to_string(),
                TrialResult::Abort(stage) => format!("abort_{}", stage.name()),
            };
            println!(
                "n={n} k={k} seed={seed} result={result} deck_remaining={}",
                t.stats.deck_remaining
            );
            Ok(if t.result == TrialResult::Success {
                OK
            } else {
                fail()
            })
        }
        Command::Experiment {
            n,
            k,
            trials,
            seed,
            threads,
            csv,
            timing,
        } => {
            let cfg = ExperimentConfig {
                ns: n.0,
                ks: k.0,
                trials,
                seed,
                threads,
                timing,
            };
            let e = analysis::run_experiment(&cfg)?;
            for (n, k, why) in &e.skipped {
                eprintln!("skipped n={n} k={k}: {why}");
            }
            emit(csv.as_deref(), &analysis::csv_string(&e.rows))?;
            Ok(OK)
        }
        Command::Oracle { command } => match command {
            OracleCommand::Classify { n, k, allow_n5 } => {
                let c = oracle::classify_all(n, k, allow_n5)?;
                println!(
                    "n={n} k={k} total={} reconstructible={}",
                    c.total, c.reconstructible
                );
                if let Some((a, b)) = c.collision {
                    print!(
                        "collision\n{}--\n{}",
                        encode_picture(&a),
                        encode_picture(&b)
                    );
                }
                Ok(OK)
            }
            OracleCommand::Check { input, k, allow_n5 } => {
                let p = load_picture(&input)?;
                match oracle::is_reconstructible_exhaustive(&p, k, allow_n5)? {
                    Verdict::Yes => {
                        println!("yes");
                        Ok(OK)
                    }
                    Verdict::No(q) => {
                        print!("no\n{}", encode_picture(&q));
                        Ok(fail())
                    }
                }
            }
        },
        Command::Bounds { n, k } => {
            if n < 2 {
                bail!("bounds need n ≥ 2");
            }
            let b = analysis::zero_statement_log2_bound(n, k)?;
            println!("kc={}", analysis::kc(n as u64)?);
            println!("ratio0={}", analysis::format_sig6(analysis::ratio0(n, k)));
            println!("ratio1={}", analysis::format_sig6(analysis::ratio1(n, k)));
            println!("log2_binomial_bound={:.10}", b.binomial);
            println!("log2_simplified_bound={:.10}", b.simplified);
            Ok(OK)
        }
        Command::Diagnose {
            truth,
            output,
            k,
            marks,
        } => {
            let t = load_picture(&truth)?;
            let o = load_picture(&output)?;
            let m = mark_bad_windows(&t, &o, k)?;
            let paths = extract_interfaces(&m);
            print!("{}", describe(&m, &paths));
            if let Some(f) = marks {
                emit(Some(&f), &m.to_text())?;
            }
            Ok(OK)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges() {
        assert_eq!(parse_range("4..7").unwrap(), List(vec![4, 5, 6, 7]));
        assert_eq!(parse_range("5").unwrap(), List(vec![5]));
        assert_eq!(parse_range("3,5").unwrap(), List(vec![3, 5]));
        assert!(parse_range("7..4").is_err());
        assert!(parse_list("48,x").is_err());
    }

    #[test]
    fn cli_shape() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
