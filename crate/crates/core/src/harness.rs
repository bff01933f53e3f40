//! Seeded Monte Carlo sweeps and reporting: sensing MSE curves, end-to-end
//! BER curves for the ODDM chain and the OFDM baseline, the SAR demo, and
//! the frame-planning report.
//!
//! Every trial draws from its own counter-derived RNG stream so results
//! are reproducible and independent of trial execution order.

use crate::channel::{
    add_awgn, apply_dd_channel, cfo_compensate, cfo_estimate_cp, sample_comm_channel,
    sar_channel_from_scene, apply_time_channel, Scene, TimeTap,
};
use crate::coding::{conv_encode, viterbi_decode, CodingConfig};
use crate::config::{RunConfig, Scheme, SensingScheme};
use crate::equalizer::{mmse_equalize, ofdm_mmse_equalize, EqualizerInput};
use crate::error::{Error, Result};
use crate::grid::{min_numerology, prf, prf_bounds, slot_schedule, SignalKind};
use crate::qam::{qam_demap, qam_map, QamConfig};
use crate::sar::{
    azimuth_compress, lfm_baseline, point_spread, range_reconstruct, rcmc, simulate_echoes,
    DopplerMode, PointSpreadMetrics, RangeCompressedGrid, SarImage, SarSimOptions,
};
use crate::sensing::{
    embed_pilot, extract_pilot_block, pn_sequence, pn_sensing_baseline, sense_channel,
    sensing_mse, PilotPattern,
};
use crate::waveform::{add_cp, oddm_demodulate_matrix, oddm_modulate_matrix, ofdm_demodulate, ofdm_modulate, remove_cp, SymbolGrid};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;

/// Provenance string stamped into every emitted record.
pub fn provenance() -> String {
    format!(
        "{}-{}",
        env!("CARGO_PKG_NAME"),
        option_env!("GIT_DESCRIBE").unwrap_or(env!("CARGO_PKG_VERSION"))
    )
}

/// One aggregated metric point.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MetricRecord {
    pub scheme: String,
    pub snr_db: f64,
    /// Metric name: mse | ber | pslr | islr | sinr | papr.
    pub metric: String,
    pub value: f64,
    pub trials: usize,
    /// Standard error of the mean (>= 0).
    pub stderr: f64,
    pub seed: u64,
    pub provenance: String,
}

/// Serializes metric records as a deterministic CSV.
pub fn metrics_to_csv(records: &[MetricRecord]) -> String {
    let mut out = String::from("scheme,snr_db,metric,value,trials,stderr,seed,provenance\n");
    for r in records {
        writeln!(
            out,
            "{},{},{},{:.12e},{},{:.12e},{},{}",
            r.scheme, r.snr_db, r.metric, r.value, r.trials, r.stderr, r.seed, r.provenance
        )
        .expect("string write");
    }
    out
}

/// One BER sweep point.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BerRecord {
    pub snr_db: f64,
    pub trials: usize,
    pub bits: u64,
    pub errors: u64,
    pub scheme: Scheme,
    pub coded: bool,
    pub seed: u64,
}

impl BerRecord {
    pub fn ber(&self) -> f64 {
        if self.bits == 0 {
            0.0
        } else {
            self.errors as f64 / self.bits as f64
        }
    }
}

/// Serializes BER records as a deterministic CSV.
pub fn ber_to_csv(records: &[BerRecord]) -> String {
    let mut out = String::from("snr_db,trials,bits,errors,ber,scheme,coded\n");
    for r in records {
        writeln!(
            out,
            "{},{},{},{},{:.12e},{},{}",
            r.snr_db,
            r.trials,
            r.bits,
            r.errors,
            r.ber(),
            r.scheme,
            r.coded
        )
        .expect("string write");
    }
    out
}

/// Counter-derived per-trial RNG: one independent ChaCha stream per
/// `(master seed, stream index)` pair.
pub fn trial_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn mean_stderr(samples: &[f64]) -> (f64, f64) {
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    if samples.len() < 2 {
        return (mean, 0.0);
    }
    let var = samples.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

fn pn_pattern<R: Rng>(m: usize, guard: usize, n: usize, rng: &mut R) -> Result<PilotPattern> {
    for _ in 0..100 {
        if let Ok(p) = PilotPattern::new(pn_sequence(m, rng), guard, n) {
            return Ok(p);
        }
    }
    Err(Error::Singular("no invertible PN pilot after 100 draws".into()))
}

/// Sensing MSE sweep (proposed ZC scheme plus the PN correlation
/// baseline), with the closed-form `sigma^2 / E0` reference curve.
pub fn run_mse_sweep(cfg: &RunConfig) -> Result<Vec<MetricRecord>> {
    cfg.validate()?;
    let grid = &cfg.params.grid;
    let guard = cfg.doppler_guard;
    let zc = PilotPattern::zc(grid.m, 1, guard, grid.n)?;
    let mut records = Vec::new();
    for (si, &snr_db) in cfg.snr_db.iter().enumerate() {
        let sigma2 = 10f64.powf(-snr_db / 10.0);
        let mut zc_mses = Vec::with_capacity(cfg.trials);
        let mut pn_mses = Vec::with_capacity(cfg.trials);
        for trial in 0..cfg.trials {
            let mut rng = trial_rng(cfg.seed, ((si as u64) << 32) | trial as u64);
            let ch = sample_comm_channel(&cfg.params, cfg.nlos_paths, cfg.max_delay_tap, &mut rng)?
                .normalized();
            let truth = ch.to_dd_matrix(grid.m - 1, guard)?;

            let x = embed_pilot(&SymbolGrid::zeros(grid.m, grid.n), &zc)?;
            let y = apply_dd_channel(&x, &truth, sigma2, &mut rng)?;
            let block = extract_pilot_block(&y, &zc)?;
            let est = sense_channel(&block, &zc, sigma2)?;
            zc_mses.push(sensing_mse(&est, &truth)?);

            let pn = pn_pattern(grid.m, guard, grid.n, &mut rng)?;
            let xp = embed_pilot(&SymbolGrid::zeros(grid.m, grid.n), &pn)?;
            let yp = apply_dd_channel(&xp, &truth, sigma2, &mut rng)?;
            let blockp = extract_pilot_block(&yp, &pn)?;
            let estp = pn_sensing_baseline(&blockp, &pn, sigma2)?;
            pn_mses.push(sensing_mse(&estp, &truth)?);
        }
        for (scheme, mses) in [
            (SensingScheme::Proposed, &zc_mses),
            (SensingScheme::PnSequence, &pn_mses),
        ] {
            let (mean, se) = mean_stderr(mses);
            records.push(MetricRecord {
                scheme: match scheme {
                    SensingScheme::Proposed => "proposed_zc".into(),
                    SensingScheme::PnSequence => "pn_baseline".into(),
                },
                snr_db,
                metric: "mse".into(),
                value: mean,
                trials: cfg.trials,
                stderr: se,
                seed: cfg.seed,
                provenance: provenance(),
            });
        }
        records.push(MetricRecord {
            scheme: "closed_form".into(),
            snr_db,
            metric: "mse".into(),
            value: sigma2 / zc.energy_e0,
            trials: 0,
            stderr: 0.0,
            seed: cfg.seed,
            provenance: provenance(),
        });
    }
    Ok(records)
}

/// Columns of the grid that carry data symbols (everything outside the
/// pilot column and its guards).
fn data_columns(pattern: &PilotPattern) -> Vec<usize> {
    let reserved: Vec<usize> = pattern.guard_columns();
    (0..pattern.n)
        .filter(|c| *c != 0 && !reserved.contains(c))
        .collect()
}

struct TrialOutcome {
    bits: u64,
    errors: u64,
}

fn oddm_trial(
    cfg: &RunConfig,
    pattern: &PilotPattern,
    qam: &QamConfig,
    coding: Option<&CodingConfig>,
    sigma2: f64,
    rng: &mut ChaCha8Rng,
) -> Result<TrialOutcome> {
    let grid = &cfg.params.grid;
    let cols = data_columns(pattern);
    let capacity_bits = cols.len() * grid.m * qam.bits_per_symbol();

    let (payload, tx_bits): (Vec<u8>, Vec<u8>) = match coding {
        None => {
            let bits: Vec<u8> = (0..capacity_bits).map(|_| rng.gen_range(0..2u8)).collect();
            (bits.clone(), bits)
        }
        Some(code) => {
            let msg_len = code.message_len_for(capacity_bits);
            let msg: Vec<u8> = (0..msg_len).map(|_| rng.gen_range(0..2u8)).collect();
            let mut coded = conv_encode(&msg, code);
            coded.resize(capacity_bits, 0);
            (msg, coded)
        }
    };
    let symbols = qam_map(&tx_bits, qam)?;
    let mut x = SymbolGrid::zeros(grid.m, grid.n);
    for (ci, &c) in cols.iter().enumerate() {
        x.column_mut(c)
            .copy_from_slice(&symbols[ci * grid.m..(ci + 1) * grid.m]);
    }
    let x = embed_pilot(&x, pattern)?;

    let ch = sample_comm_channel(&cfg.params, cfg.nlos_paths, cfg.max_delay_tap, rng)?.normalized();
    let s = add_cp(&oddm_modulate_matrix(&x), cfg.max_delay_tap)?;
    let ts = grid.sample_interval;
    let mut r = apply_time_channel(&s, &ch.time_taps(cfg.genie_cfo), ts)?;
    add_awgn(&mut r.samples, sigma2, rng);
    if !cfg.genie_cfo {
        let est = cfo_estimate_cp(&r, ts)?;
        // the integer Doppler tap stays; only the fractional offset is
        // removed (the estimate aliases into +- half a tap)
        r = cfo_compensate(&r, est, ts);
    }

    let y = oddm_demodulate_matrix(&remove_cp(&r), grid.m, grid.n)?;
    let block = extract_pilot_block(&y, pattern)?;
    let csi = sense_channel(&block, pattern, sigma2)?;
    let k_c = if cfg.genie_doppler_column {
        ch.common_doppler_tap
    } else {
        csi.strongest_column()
    };
    let x_hat = mmse_equalize(&EqualizerInput {
        received: &y,
        csi_column: &csi.columns[k_c],
        doppler_tap: k_c,
        noise_var: sigma2,
    })?;

    let mut rx_symbols = Vec::with_capacity(cols.len() * grid.m);
    for &c in &cols {
        rx_symbols.extend_from_slice(x_hat.column(c));
    }
    let rx_bits = qam_demap(&rx_symbols, qam);
    let decided: Vec<u8> = match coding {
        None => rx_bits,
        Some(code) => {
            let coded_len = code.coded_len(payload.len());
            viterbi_decode(&rx_bits[..coded_len], payload.len(), code)?
        }
    };
    let errors = decided
        .iter()
        .zip(&payload)
        .filter(|(a, b)| a != b)
        .count() as u64;
    Ok(TrialOutcome {
        bits: payload.len() as u64,
        errors,
    })
}

fn ofdm_trial(
    cfg: &RunConfig,
    qam: &QamConfig,
    coding: Option<&CodingConfig>,
    sigma2: f64,
    rng: &mut ChaCha8Rng,
) -> Result<TrialOutcome> {
    let grid = &cfg.params.grid;
    let (m_dim, n_sym) = (grid.m, grid.n);
    let capacity_bits = m_dim * n_sym * qam.bits_per_symbol();
    let (payload, tx_bits): (Vec<u8>, Vec<u8>) = match coding {
        None => {
            let bits: Vec<u8> = (0..capacity_bits).map(|_| rng.gen_range(0..2u8)).collect();
            (bits.clone(), bits)
        }
        Some(code) => {
            let msg_len = code.message_len_for(capacity_bits);
            let msg: Vec<u8> = (0..msg_len).map(|_| rng.gen_range(0..2u8)).collect();
            let mut coded = conv_encode(&msg, code);
            coded.resize(capacity_bits, 0);
            (msg, coded)
        }
    };
    let symbols = qam_map(&tx_bits, qam)?;

    let ch = sample_comm_channel(&cfg.params, cfg.nlos_paths, cfg.max_delay_tap, rng)?.normalized();
    // Genie CFO removes the common Doppler completely (all paths share it),
    // leaving a time-invariant multipath channel.
    let taps: Vec<TimeTap> = ch
        .time_taps(true)
        .into_iter()
        .map(|t| TimeTap {
            doppler_hz: 0.0,
            ..t
        })
        .collect();
    let ts = grid.sample_interval;

    // Channel estimation from one pilot OFDM symbol: per-subcarrier least
    // squares, denoised by projection onto the known delay-spread support.
    let pilot_freq = crate::sensing::zc_sequence(m_dim, 1)?;
    let s_pilot = ofdm_modulate(&pilot_freq, cfg.max_delay_tap)?;
    let mut r_pilot = apply_time_channel(&s_pilot, &taps, ts)?;
    add_awgn(&mut r_pilot.samples, sigma2, rng);
    let y_pilot = ofdm_demodulate(&r_pilot);
    let mut impulse: Vec<Complex64> = y_pilot
        .iter()
        .zip(&pilot_freq)
        .map(|(y, p)| y / p)
        .collect();
    crate::fft::idft_in_place(&mut impulse);
    for v in impulse.iter_mut().skip(cfg.max_delay_tap + 1) {
        *v = Complex64::default();
    }
    crate::fft::dft_in_place(&mut impulse);
    let csi_freq = impulse;
    let mut rx_symbols = Vec::with_capacity(m_dim * n_sym);
    for sym in 0..n_sym {
        let x_freq = &symbols[sym * m_dim..(sym + 1) * m_dim];
        let s = ofdm_modulate(x_freq, cfg.max_delay_tap)?;
        let mut r = apply_time_channel(&s, &taps, ts)?;
        add_awgn(&mut r.samples, sigma2, rng);
        let y_freq = ofdm_demodulate(&r);
        rx_symbols.extend(ofdm_mmse_equalize(&y_freq, &csi_freq, sigma2)?);
    }
    let rx_bits = qam_demap(&rx_symbols, qam);
    let decided: Vec<u8> = match coding {
        None => rx_bits,
        Some(code) => {
            let coded_len = code.coded_len(payload.len());
            viterbi_decode(&rx_bits[..coded_len], payload.len(), code)?
        }
    };
    let errors = decided
        .iter()
        .zip(&payload)
        .filter(|(a, b)| a != b)
        .count() as u64;
    Ok(TrialOutcome {
        bits: payload.len() as u64,
        errors,
    })
}

/// Full BER sweep for one scheme/coding combination.
///
/// Each SNR point stops once `target_errors` bit errors are seen or the
/// trial cap is reached, whichever is first.
pub fn run_ber_sweep(cfg: &RunConfig, scheme: Scheme, coded: bool) -> Result<Vec<BerRecord>> {
    cfg.validate()?;
    let grid = &cfg.params.grid;
    let qam = QamConfig::new(cfg.params.qam_order)?;
    let code = CodingConfig::default();
    let coding = coded.then_some(&code);
    let pattern = PilotPattern::zc(grid.m, 1, cfg.doppler_guard, grid.n)?;
    let mut records = Vec::new();
    for (si, &snr_db) in cfg.snr_db.iter().enumerate() {
        let sigma2 = 10f64.powf(-snr_db / 10.0);
        let mut bits = 0u64;
        let mut errors = 0u64;
        let mut trials = 0usize;
        for trial in 0..cfg.trials {
            let stream = ((si as u64) << 32)
                | ((scheme == Scheme::Ofdm) as u64) << 63
                | (coded as u64) << 62
                | trial as u64;
            let mut rng = trial_rng(cfg.seed, stream);
            let outcome = match scheme {
                Scheme::Oddm => oddm_trial(cfg, &pattern, &qam, coding, sigma2, &mut rng)?,
                Scheme::Ofdm => ofdm_trial(cfg, &qam, coding, sigma2, &mut rng)?,
            };
            bits += outcome.bits;
            errors += outcome.errors;
            trials += 1;
            if errors >= cfg.target_errors as u64 {
                break;
            }
        }
        records.push(BerRecord {
            snr_db,
            trials,
            bits,
            errors,
            scheme,
            coded,
            seed: cfg.seed,
        });
    }
    Ok(records)
}

/// Interpolated SNR (dB) where a BER curve crosses `target`, or `None` if
/// the curve never reaches it.
pub fn snr_at_ber(records: &[BerRecord], target: f64) -> Option<f64> {
    let mut points: Vec<(f64, f64)> = records
        .iter()
        .filter(|r| r.bits > 0 && r.errors > 0)
        .map(|r| (r.snr_db, r.ber()))
        .collect();
    points.sort_by(|a, b| a.0.total_cmp(&b.0));
    for pair in points.windows(2) {
        let (s0, b0) = pair[0];
        let (s1, b1) = pair[1];
        if (b0 >= target && b1 <= target) && b0 > b1 {
            // log-linear interpolation in BER
            let t = (b0.ln() - target.ln()) / (b0.ln() - b1.ln());
            return Some(s0 + t * (s1 - s0));
        }
    }
    None
}

/// All artifacts of the SAR demo run.
#[derive(Debug)]
pub struct SarDemoArtifacts {
    /// Range profile of the proposed scheme, noiseless, no Doppler.
    pub proposed_clean: Vec<Complex64>,
    /// Proposed scheme with intra-pulse radar Doppler and genie CFO.
    pub proposed_doppler: Vec<Complex64>,
    /// Proposed scheme with noise.
    pub proposed_noisy: Vec<Complex64>,
    /// LFM baseline, no Doppler.
    pub lfm_clean: Vec<Complex64>,
    /// LFM baseline with uncompensated radar Doppler.
    pub lfm_doppler: Vec<Complex64>,
    /// Expected per-cell gains from the forward model.
    pub truth: Vec<Complex64>,
    /// Focused image over a reduced aperture.
    pub image: SarImage,
    /// Point-spread metrics of the proposed scheme for an isolated
    /// mid-swath point target.
    pub proposed_metrics: PointSpreadMetrics,
    /// LFM point-spread metrics for the same point target.
    pub lfm_metrics: PointSpreadMetrics,
    pub metrics: Vec<MetricRecord>,
}

fn single_pulse_profile(
    cfg: &RunConfig,
    scene: &Scene,
    pilot: &PilotPattern,
    opts: &SarSimOptions,
    stream: u64,
) -> Result<RangeCompressedGrid> {
    let mut geo = cfg.params.geometry.clone();
    geo.synthetic_aperture = 1e-12; // one pulse at closest approach
    let mut rng = trial_rng(cfg.seed, stream);
    let raw = simulate_echoes(
        scene,
        &geo,
        &cfg.params.link,
        pilot,
        &cfg.params.grid,
        &cfg.params.frame,
        opts,
        &mut rng,
    )?;
    range_reconstruct(&raw, pilot, &cfg.params.grid, opts.sigma2)
}

/// SAR demonstration: single-pulse range profiles for the proposed scheme
/// and the LFM baseline (clean / Doppler / noisy), plus a focused image
/// over a reduced aperture.
pub fn run_sar_demo(cfg: &RunConfig, scene: &Scene) -> Result<SarDemoArtifacts> {
    cfg.validate()?;
    let grid = &cfg.params.grid;
    let link = &cfg.params.link;
    let pilot = PilotPattern::zc(grid.m, 1, cfg.doppler_guard, grid.n)?;

    // forward-model truth at closest approach
    let truth_real = sar_channel_from_scene(
        scene,
        &cfg.params.geometry,
        link,
        grid.sample_interval,
        1.0 / grid.duration(),
        0.0,
    )?;
    let mut truth = vec![Complex64::default(); grid.m];
    for t in truth_real.time_taps(true) {
        truth[t.delay_tap] += t.coeff;
    }
    let peak_gain2 = truth.iter().map(|v| v.norm_sqr()).fold(0.0, f64::max);
    // per-sample noise power set from the first SNR point, relative to the
    // strongest cell
    let snr_db = cfg.snr_db.first().copied().unwrap_or(30.0);
    let sigma2 = peak_gain2 * 10f64.powf(-snr_db / 10.0);

    let clean_opts = SarSimOptions {
        sigma2: 0.0,
        doppler: DopplerMode::Off,
        decimate: 1,
    };
    let doppler_opts = SarSimOptions {
        sigma2: 0.0,
        doppler: DopplerMode::OnGenie,
        decimate: 1,
    };
    let noisy_opts = SarSimOptions {
        sigma2,
        doppler: DopplerMode::OnGenie,
        decimate: 1,
    };
    let proposed_clean = single_pulse_profile(cfg, scene, &pilot, &clean_opts, 1)?.profiles[0].clone();
    let proposed_doppler =
        single_pulse_profile(cfg, scene, &pilot, &doppler_opts, 2)?.profiles[0].clone();
    let proposed_noisy =
        single_pulse_profile(cfg, scene, &pilot, &noisy_opts, 3)?.profiles[0].clone();

    let mut one_pulse_geo = cfg.params.geometry.clone();
    one_pulse_geo.synthetic_aperture = 1e-12;
    let mut rng = trial_rng(cfg.seed, 4);
    let lfm_clean = lfm_baseline(
        scene,
        &one_pulse_geo,
        link,
        grid,
        &cfg.params.frame,
        &clean_opts,
        &mut rng,
    )?
    .profiles[0]
        .clone();
    let lfm_doppler = lfm_baseline(
        scene,
        &one_pulse_geo,
        link,
        grid,
        &cfg.params.frame,
        &SarSimOptions {
            doppler: DopplerMode::On,
            ..clean_opts
        },
        &mut rng,
    )?
    .profiles[0]
        .clone();

    // focused image over a reduced aperture (keeps the demo desk-scale)
    let mut img_geo = cfg.params.geometry.clone();
    img_geo.aperture = img_geo.aperture.min(400.0);
    img_geo.synthetic_aperture = img_geo.aperture / img_geo.velocity;
    let mut rng = trial_rng(cfg.seed, 5);
    let raw = simulate_echoes(
        scene,
        &img_geo,
        link,
        &pilot,
        grid,
        &cfg.params.frame,
        &doppler_opts,
        &mut rng,
    )?;
    let rc = range_reconstruct(&raw, &pilot, grid, 0.0)?;
    let image = azimuth_compress(&rcmc(&rc, &img_geo, link.carrier), &img_geo, link.carrier);

    // point-spread metrics need an isolated response: measure them on a
    // dedicated single point target at mid-swath
    let cells = scene.len().max(1);
    let mut point_rcs = vec![0.0f64; cells];
    point_rcs[cells / 2] = 1.0;
    let point_scene = Scene::from_cells(
        cfg.params.geometry.first_cell_range,
        grid.range_resolution(),
        point_rcs,
    );
    let proposed_point =
        single_pulse_profile(cfg, &point_scene, &pilot, &clean_opts, 6)?.profiles[0].clone();
    let mut rng = trial_rng(cfg.seed, 7);
    let lfm_point = lfm_baseline(
        &point_scene,
        &one_pulse_geo,
        link,
        grid,
        &cfg.params.frame,
        &clean_opts,
        &mut rng,
    )?
    .profiles[0]
        .clone();
    let proposed_metrics = point_spread(&proposed_point, 1)?;
    let lfm_metrics = point_spread(&lfm_point, 16)?;
    let prov = provenance();
    let metrics = vec![
        MetricRecord {
            scheme: "proposed".into(),
            snr_db,
            metric: "pslr".into(),
            value: proposed_metrics.pslr_db,
            trials: 1,
            stderr: 0.0,
            seed: cfg.seed,
            provenance: prov.clone(),
        },
        MetricRecord {
            scheme: "proposed".into(),
            snr_db,
            metric: "islr".into(),
            value: proposed_metrics.islr_db,
            trials: 1,
            stderr: 0.0,
            seed: cfg.seed,
            provenance: prov.clone(),
        },
        MetricRecord {
            scheme: "lfm".into(),
            snr_db,
            metric: "pslr".into(),
            value: lfm_metrics.pslr_db,
            trials: 1,
            stderr: 0.0,
            seed: cfg.seed,
            provenance: prov.clone(),
        },
        MetricRecord {
            scheme: "lfm".into(),
            snr_db,
            metric: "islr".into(),
            value: lfm_metrics.islr_db,
            trials: 1,
            stderr: 0.0,
            seed: cfg.seed,
            provenance: prov,
        },
    ];
    Ok(SarDemoArtifacts {
        proposed_clean,
        proposed_doppler,
        proposed_noisy,
        lfm_clean,
        lfm_doppler,
        truth,
        image,
        proposed_metrics,
        lfm_metrics,
        metrics,
    })
}

/// Default 7-target demonstration scene within the simulated range window.
pub fn demo_scene(cfg: &RunConfig) -> Scene {
    let grid = &cfg.params.grid;
    let geo = &cfg.params.geometry;
    let cells = geo.range_cells.min(grid.m);
    let mut rcs = vec![0.0f64; cells];
    for (frac, g) in [
        (0.08, 1.0),
        (0.22, 0.6),
        (0.35, 0.9),
        (0.50, 0.3),
        (0.63, 1.0),
        (0.78, 0.45),
        (0.92, 0.75),
    ] {
        let q = ((cells - 1) as f64 * frac).round() as usize;
        rcs[q] = g;
    }
    Scene::from_cells(geo.first_cell_range, grid.range_resolution(), rcs)
}

/// Frame planning report for one parameter set.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FramePlan {
    pub prf_hz: f64,
    pub prf_min_hz: f64,
    pub prf_max_hz: f64,
    pub numerology: u32,
    pub min_numerology: u32,
    pub slots: usize,
    pub pilots_per_frame: usize,
    pub azimuth_resolution_m: f64,
    pub feasible: bool,
}

/// Evaluates PRF, its feasibility window, and the minimum numerology for
/// the given parameter set.
pub fn frame_plan(cfg: &RunConfig) -> FramePlan {
    let p = &cfg.params;
    let (prf_min, prf_max) = prf_bounds(&p.geometry, &p.frame, p.link.carrier);
    let prf_hz = prf(&p.frame);
    let pilots = slot_schedule(&p.frame)
        .iter()
        .flatten()
        .filter(|k| **k == SignalKind::SharedPilot)
        .count();
    FramePlan {
        prf_hz,
        prf_min_hz: prf_min,
        prf_max_hz: prf_max,
        numerology: p.frame.numerology,
        min_numerology: min_numerology(
            &p.geometry,
            p.frame.pilot_period,
            p.frame.frame_len,
            p.link.carrier,
        ),
        slots: p.frame.slots(),
        pilots_per_frame: pilots,
        azimuth_resolution_m: crate::grid::azimuth_resolution(&p.geometry, p.link.carrier),
        feasible: prf_min <= prf_hz && prf_hz <= prf_max,
    }
}

/// Renders the frame plan as a human-readable report.
pub fn render_frame_plan(plan: &FramePlan) -> String {
    format!(
        "PRF: {:.1} Hz (window {:.1} .. {:.1} Hz)\n\
         numerology: {} (minimum {})\n\
         slots per frame: {} ({} shared pilots)\n\
         azimuth resolution: {:.3} m\n\
         verdict: {}\n",
        plan.prf_hz,
        plan.prf_min_hz,
        plan.prf_max_hz,
        plan.numerology,
        plan.min_numerology,
        plan.slots,
        plan.pilots_per_frame,
        plan.azimuth_resolution_m,
        if plan.feasible { "feasible" } else { "infeasible" }
    )
}
