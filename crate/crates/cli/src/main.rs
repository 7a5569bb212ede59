//! `qloc`: fingerprint localization from the command line.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use qloc_cli::{
    evaluate, generate_synthetic_testbed, load_fingerprint, load_tests, scaling_report,
    shots_sweep, tests_from_raw, write_fingerprint_csv, write_tests_csv, HarnessError,
    PreprocessConfig, RawTestRow, ScalingConfig, TestbedSpec, SIMULATOR_TIME_NOTE,
};
use qloc_core::{
    build_localization_circuit, classical_localize_euclidean, export_qasm, quantum_localize,
    Fingerprint, LocalizationConfig, Mode, PreprocessPolicy, RssVector,
};

#[derive(Parser)]
#[command(
    name = "qloc",
    about = "Fingerprint-based localization with a quantum Euclidean-similarity matcher",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Similarity,
    Distance,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::Similarity => Mode::Similarity,
            ModeArg::Distance => Mode::Distance,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum PreprocessArg {
    MinShift,
    LinearPower,
}

impl From<PreprocessArg> for PreprocessPolicy {
    fn from(p: PreprocessArg) -> PreprocessPolicy {
        match p {
            PreprocessArg::MinShift => PreprocessPolicy::MinShift,
            PreprocessArg::LinearPower => PreprocessPolicy::LinearPower,
        }
    }
}

#[derive(Args)]
struct PrepArgs {
    /// RSS floor in dBm; missing readings are set to it
    #[arg(long, default_value_t = -110.0, allow_hyphen_values = true)]
    floor: f64,
    /// dBm-to-amplitude mapping
    #[arg(long, value_enum, default_value = "min-shift")]
    preprocess: PreprocessArg,
}

impl PrepArgs {
    fn config(&self) -> PreprocessConfig {
        PreprocessConfig {
            policy: self.preprocess.into(),
            floor_dbm: self.floor,
        }
    }
}

#[derive(Args)]
struct MatchArgs {
    /// Ancilla outcome conditioning the readout
    #[arg(long, value_enum, default_value = "similarity")]
    mode: ModeArg,
    /// Measurement shots; 0 reads exact probabilities
    #[arg(long, default_value_t = 0)]
    shots: u64,
    /// Base RNG seed
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl MatchArgs {
    fn config(&self) -> LocalizationConfig {
        LocalizationConfig {
            mode: self.mode.into(),
            shots: self.shots,
            seed: self.seed,
            ..LocalizationConfig::default()
        }
    }
}

#[derive(Args)]
struct TestVectorArgs {
    /// Inline raw RSS vector in dBm, comma separated; empty fields are
    /// missing readings (e.g. "-62,,-71")
    #[arg(long, conflicts_with = "tests", allow_hyphen_values = true)]
    rss: Option<String>,
    /// Test CSV to take a row from
    #[arg(long)]
    tests: Option<PathBuf>,
    /// Zero-based row of --tests to use
    #[arg(long, default_value_t = 0)]
    row: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic testbed as fingerprint.csv and tests.csv
    Gen {
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 16)]
        locations: usize,
        #[arg(long, default_value_t = 8)]
        rps: usize,
        #[arg(long, default_value_t = 450.0)]
        width_m: f64,
        #[arg(long, default_value_t = 450.0)]
        height_m: f64,
        /// Path-loss exponent
        #[arg(long, default_value_t = 3.0)]
        gamma: f64,
        /// Shadowing standard deviation in dB
        #[arg(long, default_value_t = 4.0)]
        sigma_db: f64,
        /// Transmit power at the reference distance, dBm
        #[arg(long, default_value_t = -20.0, allow_hyphen_values = true)]
        tx_power: f64,
        #[arg(long, default_value_t = 100)]
        tests_count: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = -110.0, allow_hyphen_values = true)]
        floor: f64,
    },
    /// Localize one test vector: distribution plus estimate as JSON
    Localize {
        #[arg(long)]
        fingerprint: PathBuf,
        #[command(flatten)]
        test: TestVectorArgs,
        #[command(flatten)]
        matching: MatchArgs,
        #[command(flatten)]
        prep: PrepArgs,
    },
    /// Run classical and quantum matchers over a test set; emit error CDFs
    Evaluate {
        #[arg(long)]
        fingerprint: PathBuf,
        #[arg(long)]
        tests: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        matching: MatchArgs,
        #[command(flatten)]
        prep: PrepArgs,
    },
    /// Sweep the shot budget; emit median error and agreement per K
    Sweep {
        #[arg(long)]
        fingerprint: PathBuf,
        #[arg(long)]
        tests: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Comma-separated ascending shot counts
        #[arg(long, default_value = "64,128,256,512,1024,2048,4096,8192,16384,32768")]
        shots_list: String,
        /// Number of sweep seeds
        #[arg(long, default_value_t = 5)]
        sweep_seeds: u64,
        #[command(flatten)]
        matching: MatchArgs,
        #[command(flatten)]
        prep: PrepArgs,
    },
    /// Resource and timing ladder over fingerprint sizes
    Scale {
        /// Comma-separated NxM sizes
        #[arg(long, default_value = "2x2,4x4,8x8,16x16,32x32,64x64")]
        sizes: String,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Skip simulation timing above this qubit count
        #[arg(long, default_value_t = 26)]
        sim_cap: usize,
    },
    /// Emit the localization circuit for one test vector as OpenQASM 2.0
    ExportQasm {
        #[arg(long)]
        fingerprint: PathBuf,
        #[command(flatten)]
        test: TestVectorArgs,
        #[command(flatten)]
        prep: PrepArgs,
        /// Output file; stdout when absent
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Write to stdout, exiting quietly when the reading end has gone away
/// (e.g. piping into `head`).
fn print_out(text: &str) {
    use std::io::Write;
    let mut out = std::io::stdout();
    let result = out.write_all(text.as_bytes()).and_then(|_| out.flush());
    if let Err(e) = result {
        if e.kind() == std::io::ErrorKind::BrokenPipe {
            std::process::exit(0);
        }
    }
}

fn print_out_line(text: &str) {
    print_out(text);
    print_out("\n");
}

fn parse_inline_rss(text: &str) -> Result<Vec<Option<f64>>, HarnessError> {
    text.split(',')
        .map(|f| {
            let f = f.trim();
            if f.is_empty() {
                Ok(None)
            } else {
                f.parse::<f64>().map(Some).map_err(|_| {
                    HarnessError::InvalidArgument(format!("bad RSS value '{f}' in --rss"))
                })
            }
        })
        .collect()
}

fn resolve_test_vector(
    args: &TestVectorArgs,
    prep: &PreprocessConfig,
) -> Result<RssVector, HarnessError> {
    if let Some(inline) = &args.rss {
        let rss_dbm = parse_inline_rss(inline)?;
        let samples = tests_from_raw(
            &[RawTestRow {
                x_m: 0.0,
                y_m: 0.0,
                rss_dbm,
            }],
            prep,
        )?;
        return Ok(samples.into_iter().next().expect("one sample").rss);
    }
    let path = args.tests.as_ref().ok_or_else(|| {
        HarnessError::InvalidArgument("provide a test vector via --rss or --tests".to_string())
    })?;
    let samples = load_tests(path, prep)?;
    samples.get(args.row).map(|s| s.rss.clone()).ok_or_else(|| {
        HarnessError::InvalidArgument(format!(
            "--row {} out of range: {} test rows",
            args.row,
            samples.len()
        ))
    })
}

#[derive(Serialize)]
struct LocalizeOutput {
    mode: String,
    shots: u64,
    ancilla_probability: f64,
    probabilities: BTreeMap<u32, f64>,
    estimate: u32,
    classical_estimate: u32,
    classical_distances: BTreeMap<u32, f64>,
}

fn cmd_localize(
    fingerprint: &Path,
    test: &TestVectorArgs,
    matching: &MatchArgs,
    prep: &PrepArgs,
) -> Result<(), HarnessError> {
    let prep_cfg = prep.config();
    let fp: Fingerprint = load_fingerprint(fingerprint, &prep_cfg)?;
    let psi = resolve_test_vector(test, &prep_cfg)?;
    let config = matching.config();
    let quantum = quantum_localize(&fp, &psi, &config)?;
    let (classical, distances) = classical_localize_euclidean(&fp, &psi)?;
    let output = LocalizeOutput {
        mode: format!("{:?}", config.mode).to_lowercase(),
        shots: config.shots,
        ancilla_probability: quantum.ancilla_prob,
        probabilities: quantum.probs.iter().map(|(id, p)| (id.0, *p)).collect(),
        estimate: quantum.estimate.0,
        classical_estimate: classical.0,
        classical_distances: distances.into_iter().map(|(id, d)| (id.0, d)).collect(),
    };
    print_out_line(&serde_json::to_string_pretty(&output).expect("serializable"));
    Ok(())
}

fn parse_sizes(text: &str) -> Result<Vec<(usize, usize)>, HarnessError> {
    text.split(',')
        .map(|part| {
            let part = part.trim();
            let (n, m) = part.split_once('x').ok_or_else(|| {
                HarnessError::InvalidArgument(format!("size '{part}' is not of the form NxM"))
            })?;
            let n = n.trim().parse().map_err(|_| {
                HarnessError::InvalidArgument(format!("bad location count in '{part}'"))
            })?;
            let m = m
                .trim()
                .parse()
                .map_err(|_| HarnessError::InvalidArgument(format!("bad RP count in '{part}'")))?;
            Ok((n, m))
        })
        .collect()
}

fn parse_shots_list(text: &str) -> Result<Vec<u64>, HarnessError> {
    text.split(',')
        .map(|part| {
            part.trim().parse::<u64>().map_err(|_| {
                HarnessError::InvalidArgument(format!("bad shot count '{}'", part.trim()))
            })
        })
        .collect()
}

fn run() -> Result<(), HarnessError> {
    let cli = Cli::parse();
    match cli.command {
        Command::Gen {
            out,
            locations,
            rps,
            width_m,
            height_m,
            gamma,
            sigma_db,
            tx_power,
            tests_count,
            seed,
            floor,
        } => {
            let spec = TestbedSpec {
                width_m,
                height_m,
                num_locations: locations,
                num_rps: rps,
                path_loss_exponent: gamma,
                shadowing_sigma_db: sigma_db,
                rss_floor_dbm: floor,
                tx_power_dbm: tx_power,
                num_test_samples: tests_count,
                seed,
                ..TestbedSpec::default()
            };
            let testbed = generate_synthetic_testbed(&spec)?;
            std::fs::create_dir_all(&out).map_err(|e| HarnessError::io(&out, e))?;
            let fp_path = out.join("fingerprint.csv");
            let tests_path = out.join("tests.csv");
            write_fingerprint_csv(&fp_path, &testbed.fingerprint_rows)?;
            write_tests_csv(&tests_path, &testbed.test_rows)?;
            print_out_line(&fp_path.display().to_string());
            print_out_line(&tests_path.display().to_string());
            Ok(())
        }
        Command::Localize {
            fingerprint,
            test,
            matching,
            prep,
        } => cmd_localize(&fingerprint, &test, &matching, &prep),
        Command::Evaluate {
            fingerprint,
            tests,
            out,
            matching,
            prep,
        } => {
            let prep_cfg = prep.config();
            let fp = load_fingerprint(&fingerprint, &prep_cfg)?;
            let samples = load_tests(&tests, &prep_cfg)?;
            let report = evaluate(&fp, &samples, &matching.config())?;
            qloc_cli::eval::write_report(&report, &out)?;
            print_out_line(&serde_json::to_string_pretty(&report.summary).expect("serializable"));
            Ok(())
        }
        Command::Sweep {
            fingerprint,
            tests,
            out,
            shots_list,
            sweep_seeds,
            matching,
            prep,
        } => {
            let prep_cfg = prep.config();
            let fp = load_fingerprint(&fingerprint, &prep_cfg)?;
            let samples = load_tests(&tests, &prep_cfg)?;
            let mut shot_counts = parse_shots_list(&shots_list)?;
            // Exact reference row at the end.
            shot_counts.push(0);
            let seeds: Vec<u64> = (0..sweep_seeds.max(1)).collect();
            let rows = shots_sweep(&fp, &samples, &shot_counts, &seeds, &matching.config())?;
            std::fs::create_dir_all(&out).map_err(|e| HarnessError::io(&out, e))?;
            let path = out.join("sweep.csv");
            std::fs::write(&path, qloc_cli::eval::sweep_csv(&rows))
                .map_err(|e| HarnessError::io(&path, e))?;
            print_out_line(&serde_json::to_string_pretty(&rows).expect("serializable"));
            Ok(())
        }
        Command::Scale {
            sizes,
            out,
            seed,
            sim_cap,
        } => {
            let sizes = parse_sizes(&sizes)?;
            let config = ScalingConfig {
                seed,
                sim_qubit_cap: sim_cap,
                ..ScalingConfig::default()
            };
            let rows = scaling_report(&sizes, &config)?;
            eprintln!("note: {SIMULATOR_TIME_NOTE}");
            if let Some(out) = out {
                std::fs::create_dir_all(&out).map_err(|e| HarnessError::io(&out, e))?;
                let csv_path = out.join("scale.csv");
                std::fs::write(&csv_path, qloc_cli::scaling::scaling_csv(&rows))
                    .map_err(|e| HarnessError::io(&csv_path, e))?;
                let json_path = out.join("scale.json");
                let json = serde_json::to_string_pretty(&qloc_cli::scaling::ScalingReportJson {
                    note: SIMULATOR_TIME_NOTE,
                    rows: &rows,
                })
                .expect("serializable");
                std::fs::write(&json_path, json).map_err(|e| HarnessError::io(&json_path, e))?;
            } else {
                print_out(&qloc_cli::scaling::scaling_csv(&rows));
            }
            Ok(())
        }
        Command::ExportQasm {
            fingerprint,
            test,
            prep,
            out,
        } => {
            let prep_cfg = prep.config();
            let fp = load_fingerprint(&fingerprint, &prep_cfg)?;
            let psi = resolve_test_vector(&test, &prep_cfg)?;
            let circuit = build_localization_circuit(&psi, &fp)?;
            let text = export_qasm(&circuit)?;
            match out {
                Some(path) => {
                    std::fs::write(&path, text).map_err(|e| HarnessError::io(&path, e))?
                }
                None => print_out(&text),
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
