use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};

use zsindex::campaign::{self, CampaignOptions, Filter, Mode, Verdict, VerifyOptions};
use zsindex::sequence::enumerate_minimal4;
use zsindex::{certify_index_one, index_oracle, GroupContext, ZsSequence};

#[derive(Parser)]
#[command(name = "zsindex", version, about = "Index of minimal zero-sum sequences over Z_n")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the index of a sequence and the smallest unit attaining it.
    Index {
        /// Sequence as n:x1,x2,...
        sequence: ZsSequence,
    },
    /// Certify index one with a constructive unit witness.
    Witness { sequence: ZsSequence },
    /// List every minimal zero-sum sequence of length four over Z_n.
    Enumerate {
        n: u64,
        /// Only orbit representatives under multiplication by units.
        #[arg(long)]
        orbits: bool,
    },
    /// Run a verification campaign over a range of moduli.
    Verify {
        #[arg(long)]
        from: u64,
        #[arg(long)]
        to: u64,
        #[arg(long, value_parser = parse_filter)]
        filter: Filter,
        #[arg(long, value_parser = parse_mode, default_value = "exhaustive")]
        mode: Mode,
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        /// Worker threads; defaults to all cores.
        #[arg(long)]
        jobs: Option<usize>,
        /// Check every sequence instead of one per orbit.
        #[arg(long)]
        no_orbits: bool,
        /// JSON-lines output, one record per n (stdout when omitted).
        #[arg(long)]
        report: Option<PathBuf>,
        /// CSV summary: n, checked, violations, fallbacks, elapsed.
        #[arg(long)]
        summary: Option<PathBuf>,
    },
    /// Look for sequences of index at least two when gcd(n, 6) > 1.
    Scan {
        #[arg(long)]
        from: u64,
        #[arg(long)]
        to: u64,
        #[arg(long)]
        first_only: bool,
    },
}

fn parse_filter(s: &str) -> Result<Filter, String> {
    s.parse().map_err(|e: zsindex::Error| e.to_string())
}

fn parse_mode(s: &str) -> Result<Mode, String> {
    s.parse().map_err(|e: zsindex::Error| e.to_string())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn run(command: Command) -> Result<ExitCode> {
    let stdout = io::stdout();
    let mut out = BufWriter::new(stdout.lock());
    match command {
        Command::Index { sequence } => {
            let ctx = GroupContext::new(sequence.n())?;
            let r = index_oracle(&sequence, &ctx);
            writeln!(out, "{sequence} index={} witness={}", r.index_value(), r.witness_unit)?;
        }
        Command::Witness { sequence } => {
            let ctx = GroupContext::new(sequence.n())?;
            let (cert, trace) = certify_index_one(&ctx, &sequence)?;
            writeln!(out, "{}", cert.to_line(&trace))?;
        }
        Command::Enumerate { n, orbits } => {
            let ctx = GroupContext::new(n)?;
            for s in enumerate_minimal4(n).filter(|s| !orbits || s.is_canonical(&ctx)) {
                writeln!(out, "{s}")?;
            }
        }
        Command::Verify {
            from,
            to,
            filter,
            mode,
            samples,
            seed,
            jobs,
            no_orbits,
            report,
            summary,
        } => {
            let verify = match mode {
                Mode::Exhaustive => VerifyOptions {
                    orbits: !no_orbits,
                    ..VerifyOptions::exhaustive(filter)
                },
                Mode::Sampled => VerifyOptions::sampled(
                    filter,
                    samples.context("sampled mode needs --samples")?,
                    seed.context("sampled mode needs --seed")?,
                ),
            };
            let result = campaign::campaign(from, to, &CampaignOptions { verify, jobs })?;

            let mut sink: Box<dyn Write> = match &report {
                Some(path) => Box::new(BufWriter::new(
                    File::create(path).with_context(|| format!("creating {}", path.display()))?,
                )),
                None => Box::new(&mut out),
            };
            for record in &result.records {
                serde_json::to_writer(&mut sink, record)?;
                writeln!(sink)?;
            }
            sink.flush()?;
            drop(sink);

            if let Some(path) = &summary {
                let mut w = csv::Writer::from_path(path)
                    .with_context(|| format!("creating {}", path.display()))?;
                w.write_record(["n", "checked", "violations", "fallbacks", "elapsed"])?;
                for r in &result.records {
                    w.write_record([
                        r.n.to_string(),
                        r.sequences_checked.to_string(),
                        r.violations.len().to_string(),
                        r.fallback_uses.to_string(),
                        format!("{:.3}", r.elapsed_secs),
                    ])?;
                }
                w.flush()?;
            }

            let t = &result.totals;
            eprintln!(
                "{} moduli, {} sequences, {} violations, {} fallbacks: {}",
                t.moduli,
                t.sequences_checked,
                t.violations,
                t.fallback_uses,
                match result.verdict {
                    Verdict::Pass => "pass",
                    Verdict::Fail => "FAIL",
                }
            );
            if result.verdict == Verdict::Fail {
                out.flush()?;
                return Ok(ExitCode::from(2));
            }
        }
        Command::Scan {
            from,
            to,
            first_only,
        } => {
            for f in campaign::counterexample_scan(from, to, first_only)? {
                writeln!(out, "{} index={}", f.sequence, f.index)?;
            }
        }
    }
    out.flush()?;
    Ok(ExitCode::SUCCESS)
}
