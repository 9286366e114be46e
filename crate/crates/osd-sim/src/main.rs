//! Command-line front end: `sim` runs SNR sweeps to CSV, `cost` prints the
//! elimination cost table, `inspect` summarizes basis partition statistics.

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use osd_core::code::{compute_ref, CodeError, LinearCode};
use osd_core::osd::order_reception;
use osd_core::channel::NoisyWord;
use osd_core::sim::{
    cost_report, csv_string, run_sweep, AlphaChoice, CodeSource, DecoderKind, SimConfig, SimError,
};
use osd_core::staged::partition_basis;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use std::path::PathBuf;
use std::process::ExitCode;

const EXIT_CONFIG: u8 = 1;
const EXIT_IO: u8 = 2;

#[derive(Parser)]
#[command(name = "osd-sim", about = "OSD decoder simulation harness", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a Monte-Carlo SNR sweep and emit CSV
    Sim(SimArgs),
    /// Print the Gaussian-elimination cost table
    Cost(CostArgs),
    /// Print code dimensions, pivot locations, and partition statistics
    Inspect(InspectArgs),
}

#[derive(Args)]
struct SimArgs {
    /// Code source: "bch:m,t" or "file:PATH"
    #[arg(long)]
    code: String,
    /// Decoder: classic | staged | chase
    #[arg(long)]
    decoder: String,
    /// Reprocessing order i
    #[arg(long, default_value_t = 1)]
    order: usize,
    /// Restrict per-frame elimination to at most B rows (staged decoder)
    #[arg(long)]
    bmax: Option<usize>,
    /// Elimination stages for the staged decoder: 2 or 3
    #[arg(long, default_value_t = 2)]
    stages: u8,
    /// Three-stage split: a row count or "auto"
    #[arg(long)]
    alpha: Option<String>,
    /// Chase-2 pattern positions
    #[arg(long)]
    p: Option<usize>,
    /// Comma-separated Eb/N0 points in dB, e.g. "2.0,3.0,4.0"
    #[arg(long)]
    snr: String,
    /// Frames per SNR point
    #[arg(long, default_value_t = 10_000)]
    frames: u64,
    /// Early stop after this many word errors per point
    #[arg(long = "max-errors", default_value_t = 100)]
    max_errors: u64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    workers: usize,
    /// CSV output path; stdout when omitted
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CostArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    k: usize,
    #[arg(long)]
    blr: usize,
    /// Three-stage split: a row count or "auto"; omitted = two-stage only
    #[arg(long)]
    alpha: Option<String>,
}

#[derive(Args)]
struct InspectArgs {
    /// Code source: "bch:m,t" or "file:PATH"
    #[arg(long)]
    code: String,
    /// Number of random reliability orderings to sample
    #[arg(long, default_value_t = 1000)]
    samples: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
}

fn parse_code(s: &str) -> Result<CodeSource, String> {
    if let Some(rest) = s.strip_prefix("bch:") {
        let (m, t) = rest
            .split_once(',')
            .ok_or_else(|| format!("expected bch:m,t, got {s:?}"))?;
        let m = m.trim().parse().map_err(|_| format!("bad m in {s:?}"))?;
        let t = t.trim().parse().map_err(|_| format!("bad t in {s:?}"))?;
        Ok(CodeSource::Bch { m, t })
    } else if let Some(path) = s.strip_prefix("file:") {
        Ok(CodeSource::File(PathBuf::from(path)))
    } else {
        Err(format!("code must be bch:m,t or file:PATH, got {s:?}"))
    }
}

fn parse_alpha(s: &str) -> Result<AlphaChoice, String> {
    if s.eq_ignore_ascii_case("auto") {
        Ok(AlphaChoice::Auto)
    } else {
        s.parse()
            .map(AlphaChoice::Fixed)
            .map_err(|_| format!("alpha must be a number or \"auto\", got {s:?}"))
    }
}

fn parse_snr(s: &str) -> Result<Vec<f64>, String> {
    s.split(',')
        .map(|tok| {
            tok.trim()
                .parse()
                .map_err(|_| format!("bad SNR value {tok:?}"))
        })
        .collect()
}

fn build_sim_config(a: &SimArgs) -> Result<SimConfig, String> {
    let decoder = match a.decoder.as_str() {
        "classic" => DecoderKind::Classic { order: a.order },
        "staged" => DecoderKind::Staged {
            order: a.order,
            stages: a.stages,
            alpha: match &a.alpha {
                Some(s) => parse_alpha(s)?,
                None => AlphaChoice::Auto,
            },
            b_max: a.bmax,
        },
        "chase" => DecoderKind::Chase {
            p: a.p.ok_or("the chase decoder needs --p")?,
        },
        other => return Err(format!("decoder must be classic|staged|chase, got {other:?}")),
    };
    Ok(SimConfig {
        code: parse_code(&a.code)?,
        decoder,
        snr_points_db: parse_snr(&a.snr)?,
        max_frames: a.frames,
        max_word_errors: a.max_errors,
        seed: a.seed,
        workers: a.workers,
    })
}

fn sim_exit(e: &SimError) -> u8 {
    match e {
        SimError::Io(_) | SimError::Code(CodeError::Io(_)) => EXIT_IO,
        _ => EXIT_CONFIG,
    }
}

fn cmd_sim(a: &SimArgs) -> Result<(), u8> {
    let cfg = build_sim_config(a).map_err(|msg| {
        eprintln!("error: {msg}");
        EXIT_CONFIG
    })?;
    let results = run_sweep(&cfg).map_err(|e| {
        eprintln!("error: {e}");
        sim_exit(&e)
    })?;
    let csv = csv_string(&results);
    match &a.out {
        Some(path) => std::fs::write(path, csv).map_err(|e| {
            eprintln!("error: cannot write {}: {e}", path.display());
            EXIT_IO
        })?,
        None => print!("{csv}"),
    }
    Ok(())
}

fn cmd_cost(a: &CostArgs) -> Result<(), u8> {
    let alpha = match &a.alpha {
        Some(s) => Some(parse_alpha(s).map_err(|msg| {
            eprintln!("error: {msg}");
            EXIT_CONFIG
        })?),
        None => None,
    };
    let report = cost_report(a.n, a.k, a.blr, alpha).map_err(|e| {
        eprintln!("error: {e}");
        EXIT_CONFIG
    })?;
    print!("{report}");
    Ok(())
}

fn load_code(src: &CodeSource) -> Result<LinearCode, u8> {
    match src {
        CodeSource::Bch { m, t } => {
            let spec = osd_core::bch::build_bch(*m, *t).map_err(|e| {
                eprintln!("error: {e}");
                EXIT_CONFIG
            })?;
            LinearCode::from_bch(&spec).map_err(|e| {
                eprintln!("error: {e}");
                EXIT_CONFIG
            })
        }
        CodeSource::File(path) => LinearCode::from_file(path).map_err(|e| {
            eprintln!("error: {e}");
            match e {
                CodeError::Io(_) => EXIT_IO,
                _ => EXIT_CONFIG,
            }
        }),
    }
}

fn cmd_inspect(a: &InspectArgs) -> Result<(), u8> {
    let src = parse_code(&a.code).map_err(|msg| {
        eprintln!("error: {msg}");
        EXIT_CONFIG
    })?;
    let code = load_code(&src)?;
    let ref_form = compute_ref(&code);
    println!("code: ({}, {}), rate {:.4}", code.n, code.k, code.k as f64 / code.n as f64);
    println!("B_K (pivot columns of G_REF): {:?}", ref_form.b_k);

    let mut rng = ChaCha12Rng::seed_from_u64(a.seed);
    let mut lr_sizes = Vec::with_capacity(a.samples);
    for _ in 0..a.samples {
        let soft: Vec<f64> = (0..code.n)
            .map(|_| {
                let v: f64 = rng.gen_range(0.05..2.0);
                if rng.gen_bool(0.5) {
                    v
                } else {
                    -v
                }
            })
            .collect();
        let w = NoisyWord::from_soft(soft);
        let (lambda1, _) = order_reception(&w);
        let part = partition_basis(&ref_form, &lambda1, code.k);
        lr_sizes.push(part.b_k_lr.len());
    }
    let min = lr_sizes.iter().min().copied().unwrap_or(0);
    let max = lr_sizes.iter().max().copied().unwrap_or(0);
    let mean = lr_sizes.iter().sum::<usize>() as f64 / lr_sizes.len().max(1) as f64;
    println!(
        "partition over {} random orderings: |B_K,LR| = |P_NK,MR| min {} / mean {:.2} / max {}",
        a.samples, min, mean, max
    );
    println!("bound: |B_K,LR| <= min(K, N-K) = {}", code.k.min(code.n - code.k));
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            let _ = e.print();
            return ExitCode::from(EXIT_CONFIG);
        }
    };
    let result = match &cli.command {
        Command::Sim(a) => cmd_sim(a),
        Command::Cost(a) => cmd_cost(a),
        Command::Inspect(a) => cmd_inspect(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(code) => ExitCode::from(code),
    }
}
