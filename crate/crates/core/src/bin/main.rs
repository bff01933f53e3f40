//! Command-line front end: Monte Carlo sweeps, the SAR demo, frame
//! planning, and a quick self-test.
//!
//! Exit codes: 0 success, 2 configuration error, 3 self-test failure.

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use oddm_isac::config::{presets, ConfigFile, RunConfig, Scheme};
use oddm_isac::error::Error;
use oddm_isac::harness::{
    ber_to_csv, demo_scene, frame_plan, metrics_to_csv, render_frame_plan, run_ber_sweep,
    run_mse_sweep, run_sar_demo,
};
use oddm_isac::{harness, io as fio, sensing, waveform};
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

#[derive(Parser)]
#[command(
    name = "oddm-isac",
    about = "Delay-Doppler waveform laboratory: ODDM link simulation and IRCI-free SAR imaging"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Monte Carlo simulations.
    Sim {
        #[command(subcommand)]
        what: SimCommand,
    },
    /// Frame structure planning.
    Frame {
        #[command(subcommand)]
        what: FrameCommand,
    },
    /// Quick built-in sanity checks.
    Selftest,
}

#[derive(Subcommand)]
enum SimCommand {
    /// Channel sensing MSE sweep (proposed vs PN baseline).
    Mse(CommonOpts),
    /// End-to-end BER sweep (ODDM vs OFDM, coded and uncoded).
    Ber(BerOpts),
    /// SAR range reconstruction demo and focused image.
    Sar(SarOpts),
}

#[derive(Subcommand)]
enum FrameCommand {
    /// PRF / numerology feasibility report.
    Plan(CommonOpts),
}

#[derive(Args, Clone)]
struct CommonOpts {
    /// TOML config file overriding the preset.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Built-in parameter preset.
    #[arg(long, default_value = "table2_sub6")]
    preset: String,
    /// Master seed for all RNG streams.
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// SNR sweep points in dB (comma separated).
    #[arg(long, value_delimiter = ',')]
    snr: Option<Vec<f64>>,
    /// Trials per sweep point.
    #[arg(long)]
    trials: Option<usize>,
    /// Output directory for CSV/JSON/PGM artifacts.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Use genie CFO compensation (fractional Doppler perfectly removed).
    #[arg(long, default_value_t = true, action = clap::ArgAction::Set)]
    genie_cfo: bool,
    /// Oversampling factor recorded for pulse-shaped captures.
    #[arg(long)]
    oversample: Option<usize>,
}

#[derive(ValueEnum, Clone, Copy, PartialEq)]
enum SchemeArg {
    Oddm,
    Ofdm,
    Both,
}

#[derive(Args, Clone)]
struct BerOpts {
    #[command(flatten)]
    common: CommonOpts,
    /// Waveform(s) to sweep.
    #[arg(long, value_enum, default_value_t = SchemeArg::Both)]
    scheme: SchemeArg,
}

#[derive(Args, Clone)]
struct SarOpts {
    #[command(flatten)]
    common: CommonOpts,
    /// Scene CSV (header `cell_index,rcs_G_q` or `slant_range_m,rcs_G_q`);
    /// defaults to the built-in 7-target scene.
    #[arg(long)]
    scene: Option<PathBuf>,
}

fn build_run(opts: &CommonOpts) -> Result<RunConfig, Error> {
    let mut params = presets::by_name(&opts.preset)?;
    if let Some(path) = &opts.config {
        let text = fs::read_to_string(path)?;
        params = ConfigFile::parse(&text)?.resolve(params)?;
    }
    let mut cfg = presets::default_run(params);
    cfg.seed = opts.seed;
    if let Some(snr) = &opts.snr {
        cfg.snr_db = snr.clone();
    }
    if let Some(trials) = opts.trials {
        cfg.trials = trials;
    }
    if let Some(os) = opts.oversample {
        cfg.oversample = os;
    }
    cfg.genie_cfo = opts.genie_cfo;
    cfg.validate()?;
    Ok(cfg)
}

fn write_config_echo(dir: &Path, cfg: &RunConfig) -> Result<(), Error> {
    fs::create_dir_all(dir)?;
    let echo = serde_json::to_string_pretty(cfg)
        .map_err(|e| Error::Parse(format!("config echo: {e}")))?;
    fs::write(dir.join("config.json"), echo)?;
    Ok(())
}

fn cmd_mse(opts: &CommonOpts) -> Result<(), Error> {
    let cfg = build_run(opts)?;
    write_config_echo(&opts.out, &cfg)?;
    let records = run_mse_sweep(&cfg)?;
    let csv = metrics_to_csv(&records);
    fs::write(opts.out.join("mse.csv"), &csv)?;
    print!("{csv}");
    Ok(())
}

fn cmd_ber(opts: &BerOpts) -> Result<(), Error> {
    let cfg = build_run(&opts.common)?;
    write_config_echo(&opts.common.out, &cfg)?;
    let schemes: &[Scheme] = match opts.scheme {
        SchemeArg::Oddm => &[Scheme::Oddm],
        SchemeArg::Ofdm => &[Scheme::Ofdm],
        SchemeArg::Both => &[Scheme::Oddm, Scheme::Ofdm],
    };
    let mut records = Vec::new();
    for &scheme in schemes {
        for coded in [false, true] {
            records.extend(run_ber_sweep(&cfg, scheme, coded)?);
        }
    }
    let csv = ber_to_csv(&records);
    fs::write(opts.common.out.join("ber.csv"), &csv)?;
    print!("{csv}");
    Ok(())
}

fn profile_csv(columns: &[(&str, &[Complex64])]) -> String {
    let mut out = String::from("cell_index");
    for (name, _) in columns {
        write!(out, ",{name}_mag").expect("string write");
    }
    out.push('\n');
    let len = columns.first().map_or(0, |(_, c)| c.len());
    for q in 0..len {
        write!(out, "{q}").expect("string write");
        for (_, col) in columns {
            write!(out, ",{:.12e}", col[q].norm()).expect("string write");
        }
        out.push('\n');
    }
    out
}

fn cmd_sar(opts: &SarOpts) -> Result<(), Error> {
    let cfg = build_run(&opts.common)?;
    let dir = &opts.common.out;
    write_config_echo(dir, &cfg)?;
    let scene = match &opts.scene {
        Some(path) => fio::read_scene_csv(
            path,
            cfg.params.geometry.first_cell_range,
            cfg.params.grid.range_resolution(),
            cfg.params.geometry.range_cells.min(cfg.params.grid.m),
        )?,
        None => demo_scene(&cfg),
    };
    let art = run_sar_demo(&cfg, &scene)?;
    fio::write_scene_csv(&dir.join("scene.csv"), &scene)?;
    fs::write(
        dir.join("range_profiles.csv"),
        profile_csv(&[
            ("truth", &art.truth),
            ("proposed_clean", &art.proposed_clean),
            ("proposed_doppler", &art.proposed_doppler),
            ("proposed_noisy", &art.proposed_noisy),
            ("lfm_clean", &art.lfm_clean),
            ("lfm_doppler", &art.lfm_doppler),
        ]),
    )?;
    fs::write(dir.join("sar_metrics.csv"), metrics_to_csv(&art.metrics))?;
    fio::write_pgm(&dir.join("image.pgm"), &art.image.magnitude())?;
    println!(
        "proposed PSLR {:.1} dB, LFM PSLR {:.1} dB; image {}x{} -> {}",
        art.proposed_metrics.pslr_db,
        art.lfm_metrics.pslr_db,
        art.image.data.len(),
        art.image.data.first().map_or(0, Vec::len),
        dir.join("image.pgm").display()
    );
    Ok(())
}

fn cmd_frame_plan(opts: &CommonOpts) -> Result<(), Error> {
    let cfg = build_run(opts)?;
    let plan = frame_plan(&cfg);
    print!("{}", render_frame_plan(&plan));
    Ok(())
}

fn selftest() -> i32 {
    let mut failures = 0;
    let mut check = |name: &str, ok: bool| {
        println!("[{}] {name}", if ok { "pass" } else { "FAIL" });
        if !ok {
            failures += 1;
        }
    };

    // modulation round trip
    let round_trip = (|| {
        let (m, n) = (32usize, 8usize);
        let data: Vec<Complex64> = (0..m * n)
            .map(|i| Complex64::new((i as f64 * 0.37).sin(), (i as f64 * 0.11).cos()))
            .collect();
        let x = waveform::SymbolGrid::from_columns(m, n, data).ok()?;
        let y = waveform::oddm_demodulate_matrix(&waveform::oddm_modulate_matrix(&x), m, n).ok()?;
        let err = x
            .as_slice()
            .iter()
            .zip(y.as_slice())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0f64, f64::max);
        Some(err < 1e-12)
    })()
    .unwrap_or(false);
    check("ODDM modulation round trip", round_trip);

    // sensing exactness for a planted tap
    let sensing_ok = (|| {
        let pattern = sensing::PilotPattern::zc(16, 1, 2, 8).ok()?;
        let x = sensing::embed_pilot(&waveform::SymbolGrid::zeros(16, 8), &pattern).ok()?;
        let mut h = oddm_isac::channel::DDChannelMatrix::zeros(
            15,
            2,
            oddm_isac::channel::ChannelKind::Comm,
        );
        h.set(3, 1, Complex64::new(0.6, -0.2));
        let mut rng = harness::trial_rng(0, 0);
        let y = oddm_isac::channel::apply_dd_channel(&x, &h, 0.0, &mut rng).ok()?;
        let block = sensing::extract_pilot_block(&y, &pattern).ok()?;
        let csi = sensing::sense_channel(&block, &pattern, 0.0).ok()?;
        Some((csi.get(3, 1) - Complex64::new(0.6, -0.2)).norm() < 1e-9)
    })()
    .unwrap_or(false);
    check("pilot sensing exactness", sensing_ok);

    // PAPR of the two pilot layouts
    let papr_ok = (|| {
        let pattern = sensing::PilotPattern::zc(16, 1, 0, 8).ok()?;
        let zc_grid = sensing::embed_pilot(&waveform::SymbolGrid::zeros(16, 8), &pattern).ok()?;
        let zc_papr = waveform::papr(&waveform::oddm_modulate_matrix(&zc_grid)).ok()?;
        let mut single = waveform::SymbolGrid::zeros(16, 8);
        single.set(0, 0, Complex64::new(4.0, 0.0));
        let single_papr = waveform::papr(&waveform::oddm_modulate_matrix(&single)).ok()?;
        Some((zc_papr - 1.0).abs() < 1e-9 && (single_papr - 16.0).abs() < 1e-9)
    })()
    .unwrap_or(false);
    check("pilot grid PAPR", papr_ok);

    // protocol formulas on the presets
    let plan_ok = {
        let p2 = frame_plan(&presets::default_run(presets::table2_sub6()));
        let p3 = frame_plan(&presets::default_run(presets::table3_mmwave()));
        (p2.prf_hz - 2000.0).abs() < 1e-9
            && p2.min_numerology == 1
            && p2.feasible
            && p3.numerology == 4
    };
    check("frame planning presets", plan_ok);

    if failures == 0 {
        println!("selftest passed");
        0
    } else {
        println!("selftest failed ({failures} checks)");
        3
    }
}

fn main() {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Sim { what } => match what {
            SimCommand::Mse(opts) => cmd_mse(opts),
            SimCommand::Ber(opts) => cmd_ber(opts),
            SimCommand::Sar(opts) => cmd_sar(opts),
        },
        Command::Frame { what } => match what {
            FrameCommand::Plan(opts) => cmd_frame_plan(opts),
        },
        Command::Selftest => {
            std::process::exit(selftest());
        }
    };
    if let Err(e) = result {
        eprintln!("error: {e}");
        std::process::exit(2);
    }
}
