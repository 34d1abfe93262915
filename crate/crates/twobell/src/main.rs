//! Command-line driver: batch protocol runs, identity verification, and
//! the channel-resource comparison.

use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use twobell::bell::{BellLabel, BellOutcome, CorrectionTable};
use twobell::protocol::{
    run_end_to_end_with_state, trial_seed, CoefficientSet, CompressionVariant, TeleportMode,
    TeleportTranscript,
};
use twobell::resources::{audit, comparison_text, min_pairs_table, Scheme, FORMULA_NOTE};
use twobell::statevector::StateVector;
use twobell::verify::{standard_suite, IdentityReport};
use twobell::Error;

const FIDELITY_BAR: f64 = 1.0 - 1e-10;

const EXIT_VERIFICATION_FAILURE: u8 = 1;
const EXIT_INVALID_INPUT: u8 = 2;
const EXIT_IMPOSSIBLE_OUTCOME: u8 = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum OutputFormat {
    Text,
    Json,
    Csv,
}

impl FromStr for OutputFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "text" => Ok(OutputFormat::Text),
            "json" => Ok(OutputFormat::Json),
            "csv" => Ok(OutputFormat::Csv),
            other => Err(format!(
                "unknown format {other:?}, expected json, csv or text"
            )),
        }
    }
}

fn parse_channel(s: &str) -> Result<(BellLabel, BellLabel), String> {
    let outcome: BellOutcome = s.parse()?;
    Ok((outcome.first, outcome.second))
}

fn parse_range(s: &str) -> Result<(u32, u32), String> {
    let (from, to) = s
        .split_once("..")
        .ok_or_else(|| format!("expected <from>..<to>, got {s:?}"))?;
    let from: u32 = from
        .trim()
        .parse()
        .map_err(|e| format!("bad range start: {e}"))?;
    let to: u32 = to
        .trim()
        .parse()
        .map_err(|e| format!("bad range end: {e}"))?;
    if from < 1 || to < from {
        return Err("range must satisfy 1 <= from <= to".to_owned());
    }
    Ok((from, to))
}

#[derive(Parser)]
#[command(
    name = "twobell",
    version,
    about = "Teleport a four-coefficient eight-qubit state over two Bell pairs: \
             simulate, verify the identities, audit the resources"
)]
struct Cli {
    /// Base seed for all randomness; trial k uses seed + k.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Output format.
    #[arg(long, global = true, default_value = "text")]
    format: OutputFormat,

    /// Compression circuit variant.
    #[arg(long, global = true, default_value = "two-cnot")]
    variant: CompressionVariant,

    /// Channel Bell pair for each wire, as first:second.
    #[arg(long, global = true, default_value = "phi+:phi+", value_parser = parse_channel)]
    channel: (BellLabel, BellLabel),

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the end-to-end protocol and emit one transcript per trial.
    Run {
        /// Coefficients as eight reals: re,im pairs for alpha..delta.
        #[arg(long, value_delimiter = ',', conflicts_with = "random")]
        coeffs: Option<Vec<f64>>,

        /// Draw fresh seeded random coefficients each trial.
        #[arg(long)]
        random: bool,

        /// Number of trials.
        #[arg(long, default_value_t = 1)]
        trials: u64,

        /// Force both Bell measurements onto this joint outcome,
        /// e.g. phi+:psi-.
        #[arg(long)]
        force_outcome: Option<BellOutcome>,

        /// Allow a forced outcome to repeat across trials > 1.
        #[arg(long)]
        repeat_forced: bool,

        /// Write the final reconstructed state to this path as JSON.
        #[arg(long)]
        dump_state: Option<PathBuf>,
    },

    /// Check the algebraic identities; nonzero exit if any fails.
    Verify {
        /// Shorthand for --format json.
        #[arg(long)]
        json: bool,

        /// Corrupt one branch (0..15) of the correction table first;
        /// the suite is then expected to fail.
        #[arg(long)]
        corrupt_branch: Option<usize>,
    },

    /// Compare channel costs and print the Bell-pair floor table.
    Resources {
        /// Inclusive range of unknown-coefficient counts, e.g. 1..8.
        #[arg(long, default_value = "1..8", value_parser = parse_range)]
        n_range: (u32, u32),
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Run {
            ref coeffs,
            random,
            trials,
            force_outcome,
            repeat_forced,
            ref dump_state,
        } => cmd_run(
            &cli,
            coeffs.clone(),
            random,
            trials,
            force_outcome,
            repeat_forced,
            dump_state.clone(),
        ),
        Command::Verify {
            json,
            corrupt_branch,
        } => cmd_verify(&cli, json, corrupt_branch),
        Command::Resources { n_range } => cmd_resources(&cli, n_range),
    }
}

fn cmd_run(
    cli: &Cli,
    coeffs: Option<Vec<f64>>,
    random: bool,
    trials: u64,
    force_outcome: Option<BellOutcome>,
    repeat_forced: bool,
    dump_state: Option<PathBuf>,
) -> ExitCode {
    if coeffs.is_none() && !random {
        eprintln!("error: provide --coeffs or --random");
        return ExitCode::from(EXIT_INVALID_INPUT);
    }
    if trials < 1 {
        eprintln!("error: --trials must be at least 1");
        return ExitCode::from(EXIT_INVALID_INPUT);
    }
    if force_outcome.is_some() && trials > 1 && !repeat_forced {
        eprintln!(
            "error: --force-outcome with --trials > 1 replays one branch; \
             pass --repeat-forced if that is intended"
        );
        return ExitCode::from(EXIT_INVALID_INPUT);
    }

    let fixed = match coeffs {
        Some(values) => {
            if values.len() != 8 {
                eprintln!(
                    "error: --coeffs takes exactly 8 comma-separated reals, got {}",
                    values.len()
                );
                return ExitCode::from(EXIT_INVALID_INPUT);
            }
            let array: [f64; 8] = values.try_into().expect("length checked");
            match CoefficientSet::from_reals(array) {
                Ok(c) => Some(c),
                Err(err) => {
                    eprintln!("error: {err}");
                    return ExitCode::from(EXIT_INVALID_INPUT);
                }
            }
        }
        None => None,
    };

    let mut transcripts: Vec<TeleportTranscript> = Vec::with_capacity(trials as usize);
    let mut last_state: Option<StateVector> = None;
    for trial in 0..trials {
        let mut rng = ChaCha8Rng::seed_from_u64(trial_seed(cli.seed, trial));
        let c = fixed.unwrap_or_else(|| CoefficientSet::random(&mut rng));
        let mode = match force_outcome {
            Some(outcome) => TeleportMode::Forced(outcome),
            None => TeleportMode::Random(&mut rng),
        };
        match run_end_to_end_with_state(&c, mode, cli.variant, cli.channel) {
            Ok((mut transcript, state)) => {
                transcript.seed = Some(cli.seed);
                transcript.trial = Some(trial);
                transcripts.push(transcript);
                last_state = Some(state);
            }
            Err(err @ Error::ZeroProbabilityOutcome { .. }) => {
                eprintln!("error: {err}");
                return ExitCode::from(EXIT_IMPOSSIBLE_OUTCOME);
            }
            // A variant that fails to factor is a protocol failure the
            // run has demonstrated, not bad input.
            Err(err @ Error::FactorizationFailed { .. }) => {
                eprintln!("error: {err}");
                return ExitCode::from(EXIT_VERIFICATION_FAILURE);
            }
            Err(err) => {
                eprintln!("error: {err}");
                return ExitCode::from(EXIT_INVALID_INPUT);
            }
        }
    }

    if let (Some(path), Some(state)) = (&dump_state, &last_state) {
        let json = serde_json::to_string(state).expect("state serializes");
        if let Err(err) = std::fs::write(path, json) {
            eprintln!("error: cannot write {}: {err}", path.display());
            return ExitCode::from(EXIT_INVALID_INPUT);
        }
    }

    emit_transcripts(cli.format, &transcripts);

    let all_ok = transcripts.iter().all(|t| t.fidelity_8q >= FIDELITY_BAR);
    if all_ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_VERIFICATION_FAILURE)
    }
}

fn emit_transcripts(format: OutputFormat, transcripts: &[TeleportTranscript]) {
    match format {
        OutputFormat::Json => {
            println!(
                "{}",
                serde_json::to_string(transcripts).expect("transcripts serialize")
            );
        }
        OutputFormat::Csv => {
            println!(
                "trial,seed,alpha_re,alpha_im,beta_re,beta_im,gamma_re,gamma_im,\
                 delta_re,delta_im,outcome_first,outcome_second,correction_b1,correction_b2,\
                 classical_bits_sent,fidelity_2q,fidelity_8q,variant,channel_first,channel_second"
            );
            for t in transcripts {
                let c = t.coefficients.as_array();
                println!(
                    "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
                    t.trial.map(|v| v.to_string()).unwrap_or_default(),
                    t.seed.map(|v| v.to_string()).unwrap_or_default(),
                    c[0].re,
                    c[0].im,
                    c[1].re,
                    c[1].im,
                    c[2].re,
                    c[2].im,
                    c[3].re,
                    c[3].im,
                    t.outcome.first,
                    t.outcome.second,
                    t.correction.on_b1,
                    t.correction.on_b2,
                    t.classical_bits_sent,
                    t.fidelity_2q,
                    t.fidelity_8q,
                    t.variant,
                    t.channel.0,
                    t.channel.1,
                );
            }
        }
        OutputFormat::Text => {
            for t in transcripts {
                println!(
                    "trial {} seed {}: {t}",
                    t.trial.unwrap_or(0),
                    t.seed.unwrap_or(0),
                );
            }
            let passing = transcripts
                .iter()
                .filter(|t| t.fidelity_8q >= FIDELITY_BAR)
                .count();
            println!(
                "{passing}/{} trials at fidelity >= 1 - 1e-10",
                transcripts.len()
            );
        }
    }
}

fn cmd_verify(cli: &Cli, json: bool, corrupt_branch: Option<usize>) -> ExitCode {
    let format = if json { OutputFormat::Json } else { cli.format };
    let table = match corrupt_branch {
        Some(branch) if branch < 16 => CorrectionTable::canonical().corrupted(branch),
        Some(branch) => {
            eprintln!("error: --corrupt-branch takes 0..15, got {branch}");
            return ExitCode::from(EXIT_INVALID_INPUT);
        }
        None => CorrectionTable::canonical(),
    };

    let reports = standard_suite(cli.seed, &table);
    emit_reports(format, &reports);

    if reports.iter().all(|r| r.holds) {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_VERIFICATION_FAILURE)
    }
}

fn emit_reports(format: OutputFormat, reports: &[IdentityReport]) {
    match format {
        OutputFormat::Json => {
            println!(
                "{}",
                serde_json::to_string(reports).expect("reports serialize")
            );
        }
        OutputFormat::Csv => {
            println!("identity,verdict,holds,max_deviation");
            for r in reports {
                println!(
                    "{},{},{},{:e}",
                    r.identity_name,
                    r.verdict.as_str(),
                    r.holds,
                    r.max_deviation
                );
            }
        }
        OutputFormat::Text => {
            for r in reports {
                println!(
                    "{:<28} {:<24} max deviation {:9.3e}",
                    r.identity_name,
                    r.verdict.as_str(),
                    r.max_deviation
                );
                for d in &r.details {
                    if let Some(verdict) = d.verdict {
                        println!(
                            "    {:<28} {:<24} deviation {:9.3e}",
                            d.name,
                            verdict.as_str(),
                            d.deviation
                        );
                    }
                }
                for note in &r.notes {
                    println!("    note: {note}");
                }
            }
        }
    }
}

fn cmd_resources(cli: &Cli, n_range: (u32, u32)) -> ExitCode {
    let rows = match min_pairs_table(n_range.0, n_range.1) {
        Ok(rows) => rows,
        Err(err) => {
            eprintln!("error: {err}");
            return ExitCode::from(EXIT_INVALID_INPUT);
        }
    };
    match cli.format {
        OutputFormat::Json => {
            let schemes = [
                audit(Scheme::ZhaoCluster, cli.variant),
                audit(Scheme::TwoBellPairs, cli.variant),
            ];
            let floor: Vec<serde_json::Value> = rows
                .iter()
                .map(|(n, pairs)| serde_json::json!({ "n": n, "bell_pairs": pairs }))
                .collect();
            let doc = serde_json::json!({
                "schemes": schemes,
                "min_bell_pairs": floor,
                "note": FORMULA_NOTE,
            });
            println!("{doc}");
        }
        OutputFormat::Csv => {
            println!(
                "scheme,channel_qubits,bell_pairs,product_channel,classical_bits,\
                 n_unknown_coefficients,min_bell_pairs_required"
            );
            for scheme in [Scheme::ZhaoCluster, Scheme::TwoBellPairs] {
                let r = audit(scheme, cli.variant);
                println!(
                    "{},{},{},{},{},{},{}",
                    r.scheme_name,
                    r.channel_qubits,
                    r.bell_pairs,
                    r.product_channel,
                    r.classical_bits.map(|b| b.to_string()).unwrap_or_default(),
                    r.n_unknown_coefficients,
                    r.min_bell_pairs_required,
                );
            }
            println!();
            println!("n,min_bell_pairs");
            for (n, pairs) in &rows {
                println!("{n},{pairs}");
            }
        }
        OutputFormat::Text => {
            print!("{}", comparison_text(cli.variant));
            println!();
            println!("{:>4} {:>14}", "n", "min bell pairs");
            for (n, pairs) in &rows {
                println!("{n:>4} {pairs:>14}");
            }
        }
    }
    ExitCode::SUCCESS
}
