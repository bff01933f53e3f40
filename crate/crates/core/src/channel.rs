//! Physical channel synthesis and application.
//!
//! Communication channels are Rician LEO links (one LOS path plus `P`
//! scattered paths sharing the satellite Doppler); SAR channels collect one
//! scattering coefficient per range cell in a single Doppler column.
//! Channels can be applied on two independent paths — the exact DD-domain
//! input-output relation, and a time-domain tapped-delay-line convolution
//! with per-path Doppler phase ramps — which must agree for on-grid taps.

use crate::config::SystemParams;
use crate::error::{Error, Result};
use crate::grid::{LinkBudget, SarGeometry};
use crate::waveform::{SymbolGrid, TimeSequence};
use crate::SPEED_OF_LIGHT;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Whether a DD matrix came from a communication or radar channel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ChannelKind {
    Comm,
    Sar,
}

/// Dense (L+1) x (K+1) matrix of channel coefficients on the DD grid:
/// delay taps 0..=L down the rows, Doppler taps 0..=K across the columns.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DDChannelMatrix {
    entries: Vec<Complex64>,
    pub max_delay_tap: usize,
    pub max_doppler_tap: usize,
    pub kind: ChannelKind,
}

impl DDChannelMatrix {
    pub fn zeros(max_delay_tap: usize, max_doppler_tap: usize, kind: ChannelKind) -> Self {
        DDChannelMatrix {
            entries: vec![Complex64::default(); (max_delay_tap + 1) * (max_doppler_tap + 1)],
            max_delay_tap,
            max_doppler_tap,
            kind,
        }
    }

    pub fn get(&self, l: usize, k: usize) -> Complex64 {
        self.entries[l * (self.max_doppler_tap + 1) + k]
    }

    pub fn set(&mut self, l: usize, k: usize, v: Complex64) {
        self.entries[l * (self.max_doppler_tap + 1) + k] = v;
    }

    pub fn add(&mut self, l: usize, k: usize, v: Complex64) {
        self.entries[l * (self.max_doppler_tap + 1) + k] += v;
    }

    /// Doppler column `k` as a length `L+1` vector.
    pub fn column(&self, k: usize) -> Vec<Complex64> {
        (0..=self.max_delay_tap).map(|l| self.get(l, k)).collect()
    }

    /// Total tap energy.
    pub fn energy(&self) -> f64 {
        self.entries.iter().map(|v| v.norm_sqr()).sum()
    }

    /// Index of the Doppler column with the most energy.
    pub fn strongest_column(&self) -> usize {
        (0..=self.max_doppler_tap)
            .max_by(|&a, &b| {
                let ea: f64 = self.column(a).iter().map(|v| v.norm_sqr()).sum();
                let eb: f64 = self.column(b).iter().map(|v| v.norm_sqr()).sum();
                ea.total_cmp(&eb)
            })
            .unwrap_or(0)
    }

    pub fn iter_taps(&self) -> impl Iterator<Item = (usize, usize, Complex64)> + '_ {
        let k1 = self.max_doppler_tap + 1;
        self.entries
            .iter()
            .enumerate()
            .filter(|(_, v)| v.norm_sqr() > 0.0)
            .map(move |(i, v)| (i / k1, i % k1, *v))
    }
}

/// One propagation path of the communication channel.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CommPath {
    /// Delay tap `l_p` in samples.
    pub delay_tap: usize,
    /// Small-scale complex gain including large-scale scaling (`alpha_p`).
    pub gain: Complex64,
    /// Fractional Doppler residual in taps.
    pub frac_doppler: f64,
    /// Angle of arrival in radians (kept for reporting only).
    pub aoa: f64,
}

/// Sampled communication channel: one LOS path plus `P` NLOS paths, all
/// sharing the satellite Doppler tap.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CommChannelRealization {
    /// Path 0 is the LOS path at the minimal delay.
    pub paths: Vec<CommPath>,
    /// Common integer Doppler tap `k_c`.
    pub common_doppler_tap: usize,
    /// Large-scale amplitude gain `g`.
    pub large_scale_g: f64,
    /// Satellite Doppler shift in Hz.
    pub sat_doppler: f64,
    /// Device Doppler shift in Hz (residual, folded into `frac_doppler`).
    pub device_doppler: f64,
    /// Carrier frequency in Hz.
    pub carrier: f64,
    /// Baseband sampling interval in seconds.
    pub sample_interval: f64,
    /// Doppler tap spacing in Hz (`1 / (N T0)`).
    pub doppler_tap_hz: f64,
}

/// Sampled SAR channel at one slow-time instant: one complex scattering
/// coefficient per range cell, all in Doppler column `k_r`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SarChannelRealization {
    /// Scattering coefficients `beta_q`.
    pub cell_gains: Vec<Complex64>,
    /// Delay tap of each cell relative to the ADC reference.
    pub cell_taps: Vec<usize>,
    /// True two-way delays in seconds (carrier phase reference).
    pub delays: Vec<f64>,
    /// Radar Doppler tap `k_r`.
    pub doppler_tap: usize,
    /// Fractional radar Doppler residual in taps.
    pub frac_doppler: f64,
    /// ADC reference delay (two-way delay of the first cell at mid-swath
    /// closest approach).
    pub first_cell_delay: f64,
    pub carrier: f64,
    pub sample_interval: f64,
    pub doppler_tap_hz: f64,
}

/// Illuminated scene: one RCS coefficient per range cell on a uniform
/// slant-range lattice.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Scene {
    /// RCS coefficients `G_q` (nonnegative).
    pub rcs: Vec<f64>,
    /// Slant ranges of the cells at closest approach, meters.
    pub ranges: Vec<f64>,
}

impl Scene {
    /// Places RCS values on the uniform lattice `R_0 + q * rho_r`.
    pub fn from_cells(first_range: f64, range_res: f64, rcs: Vec<f64>) -> Self {
        let ranges = (0..rcs.len())
            .map(|q| first_range + q as f64 * range_res)
            .collect();
        Scene { rcs, ranges }
    }

    pub fn len(&self) -> usize {
        self.rcs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rcs.is_empty()
    }
}

/// Samples the rain attenuation factor `r` (linear amplitude-squared
/// units): `r_dB ~ N(mean, var)`, `r = 10^(r_dB/10)`.
pub fn sample_rain<R: Rng>(link: &LinkBudget, rng: &mut R) -> f64 {
    if link.rain_var_db == 0.0 && link.rain_mean_db == 0.0 {
        return 1.0;
    }
    let normal = Normal::new(link.rain_mean_db, link.rain_var_db.sqrt()).expect("rain sigma");
    10f64.powf(normal.sample(rng) / 10.0)
}

/// Large-scale amplitude gain `g = (c / (4 pi f0 d)) * sqrt(G w / r)` with
/// rain factor `r` sampled from the link's log-normal statistics.
pub fn large_scale_gain<R: Rng>(link: &LinkBudget, rng: &mut R) -> f64 {
    let r = sample_rain(link, rng);
    large_scale_gain_with_rain(link, r)
}

/// Same as [`large_scale_gain`] with the rain factor fixed by the caller.
pub fn large_scale_gain_with_rain(link: &LinkBudget, rain: f64) -> f64 {
    let fsl = SPEED_OF_LIGHT / (4.0 * PI * link.carrier * link.distance);
    fsl * (link.sat_gain * link.user_gain / rain).sqrt()
}

/// Satellite Doppler shift `Vs sin(theta_s) f0 / c` in Hz.
pub fn satellite_doppler(geo: &SarGeometry, carrier: f64) -> f64 {
    geo.velocity * geo.squint.sin() * carrier / SPEED_OF_LIGHT
}

/// Radar (two-way) Doppler shift `2 Vs sin(theta_s) f0 / c` in Hz.
pub fn radar_doppler(geo: &SarGeometry, carrier: f64) -> f64 {
    2.0 * satellite_doppler(geo, carrier)
}

/// Samples a Rician communication channel realization.
///
/// The LOS path sits at delay tap 0 with amplitude
/// `g sqrt(Kr/(Kr+1))`; `p_nlos` scattered paths at random taps in
/// `1..=max_delay_tap` carry uniformly random phases with fixed amplitude
/// `g sqrt(1/((Kr+1) P))`, so the average NLOS power constraint holds
/// exactly. All paths share the satellite Doppler tap
/// `k_c = round(nu_sat N T0)`.
pub fn sample_comm_channel<R: Rng>(
    params: &SystemParams,
    p_nlos: usize,
    max_delay_tap: usize,
    rng: &mut R,
) -> Result<CommChannelRealization> {
    let link = &params.link;
    if link.rician_k < 0.0 {
        return Err(Error::arg("rician factor must be nonnegative"));
    }
    let grid = &params.grid;
    if max_delay_tap >= grid.m {
        return Err(Error::arg("delay spread exceeds the grid"));
    }
    let g = large_scale_gain(link, rng);
    let nu_sat = satellite_doppler(&params.geometry, link.carrier);
    let doppler_tap_hz = 1.0 / grid.duration();
    let exact = nu_sat / doppler_tap_hz;
    let k_c = exact.round();
    if k_c < 0.0 || k_c as usize >= grid.n {
        return Err(Error::arg("satellite Doppler tap outside the grid"));
    }
    let kappa_c = exact - k_c;

    let kr = link.rician_k;
    let mut paths = Vec::with_capacity(p_nlos + 1);
    let los_phase = rng.gen_range(0.0..2.0 * PI);
    paths.push(CommPath {
        delay_tap: 0,
        gain: Complex64::from_polar(g * (kr / (kr + 1.0)).sqrt(), los_phase),
        frac_doppler: kappa_c,
        aoa: 0.0,
    });
    if p_nlos > 0 {
        let scale = g / ((kr + 1.0) * p_nlos as f64).sqrt();
        let mut taps: Vec<usize> = (0..p_nlos)
            .map(|_| rng.gen_range(1..=max_delay_tap.max(1)))
            .collect();
        taps.sort_unstable();
        for tap in taps {
            paths.push(CommPath {
                delay_tap: tap,
                gain: Complex64::from_polar(scale, rng.gen_range(0.0..2.0 * PI)),
                frac_doppler: kappa_c,
                aoa: rng.gen_range(-PI..PI),
            });
        }
    }
    Ok(CommChannelRealization {
        paths,
        common_doppler_tap: k_c as usize,
        large_scale_g: g,
        sat_doppler: nu_sat,
        device_doppler: 0.0,
        carrier: link.carrier,
        sample_interval: grid.sample_interval,
        doppler_tap_hz,
    })
}

impl CommChannelRealization {
    /// Sum of squared path amplitudes (channel power gain).
    pub fn power(&self) -> f64 {
        self.paths.iter().map(|p| p.gain.norm_sqr()).sum()
    }

    /// Rescales all path gains so the total power gain is 1.
    ///
    /// Used by SNR-parameterized sweeps where the large-scale budget is
    /// absorbed into the SNR axis.
    pub fn normalized(&self) -> CommChannelRealization {
        let scale = 1.0 / self.power().sqrt();
        let mut out = self.clone();
        for p in out.paths.iter_mut() {
            p.gain *= scale;
        }
        out.large_scale_g *= scale;
        out
    }

    /// Common fractional Doppler offset in Hz (what CFO compensation
    /// removes).
    pub fn fractional_cfo(&self) -> f64 {
        self.paths.first().map_or(0.0, |p| p.frac_doppler) * self.doppler_tap_hz
    }

    /// Time-domain taps: `(delay_tap, doppler_hz, coefficient)` with the
    /// carrier phase `e^{-j 2 pi f0 tau}` folded into the coefficient.
    pub fn time_taps(&self, on_grid: bool) -> Vec<TimeTap> {
        self.paths
            .iter()
            .map(|p| {
                let tau = p.delay_tap as f64 * self.sample_interval;
                let kappa = if on_grid { 0.0 } else { p.frac_doppler };
                TimeTap {
                    delay_tap: p.delay_tap,
                    doppler_hz: (self.common_doppler_tap as f64 + kappa) * self.doppler_tap_hz,
                    coeff: p.gain * Complex64::from_polar(1.0, -2.0 * PI * self.carrier * tau),
                }
            })
            .collect()
    }

    /// Places the paths on the DD grid per the communication channel
    /// matrix model.
    pub fn to_dd_matrix(&self, max_delay_tap: usize, max_doppler_tap: usize) -> Result<DDChannelMatrix> {
        let mut h = DDChannelMatrix::zeros(max_delay_tap, max_doppler_tap, ChannelKind::Comm);
        if self.common_doppler_tap > max_doppler_tap {
            return Err(Error::dim("doppler tap outside matrix bounds"));
        }
        for p in &self.paths {
            if p.delay_tap > max_delay_tap {
                return Err(Error::dim("delay tap outside matrix bounds"));
            }
            let tau = p.delay_tap as f64 * self.sample_interval;
            let phase = Complex64::from_polar(1.0, -2.0 * PI * self.carrier * tau);
            h.add(p.delay_tap, self.common_doppler_tap, p.gain * phase);
        }
        Ok(h)
    }
}

/// Builds the SAR channel for one slow-time instant `eta` (seconds from
/// closest approach) from a scene.
///
/// Slant ranges follow the hyperbolic model
/// `R_q(eta) = sqrt(R_q0^2 + (Vs eta)^2)`; the ADC window is anchored at
/// the fixed reference `2 R_00 / c`, so range migration shows up as tap
/// drift over the aperture. Scattering amplitudes follow the radar
/// equation with the satellite antenna used for both transmit and
/// receive; the rain factor uses the link's mean value deterministically.
pub fn sar_channel_from_scene(
    scene: &Scene,
    geo: &SarGeometry,
    link: &LinkBudget,
    sample_interval: f64,
    doppler_tap_hz: f64,
    eta: f64,
) -> Result<SarChannelRealization> {
    if scene.is_empty() {
        return Err(Error::arg("empty scene"));
    }
    let f0 = link.carrier;
    let rain = 10f64.powf(link.rain_mean_db / 10.0);
    let first_cell_delay = 2.0 * scene.ranges[0] / SPEED_OF_LIGHT;
    let nu_r = 2.0 * satellite_doppler(geo, f0);
    let exact = nu_r / doppler_tap_hz;
    let k_r = exact.round();
    if k_r < 0.0 {
        return Err(Error::arg("negative radar Doppler tap"));
    }
    let mut cell_gains = Vec::with_capacity(scene.len());
    let mut cell_taps = Vec::with_capacity(scene.len());
    let mut delays = Vec::with_capacity(scene.len());
    let along = geo.velocity * eta;
    for (q, (&g_q, &r0)) in scene.rcs.iter().zip(&scene.ranges).enumerate() {
        if g_q < 0.0 {
            return Err(Error::arg(format!("negative RCS at cell {q}")));
        }
        let r_eta = (r0 * r0 + along * along).sqrt();
        let power = g_q * SPEED_OF_LIGHT.powi(2) * link.sat_gain.powi(2)
            / ((4.0 * PI).powi(3) * f0 * f0 * r_eta.powi(4) * rain);
        let tau = 2.0 * r_eta / SPEED_OF_LIGHT;
        let tap = ((tau - first_cell_delay) / sample_interval).round();
        if tap < 0.0 {
            return Err(Error::arg(format!("cell {q} ahead of the ADC window")));
        }
        cell_gains.push(Complex64::new(power.sqrt(), 0.0));
        cell_taps.push(tap as usize);
        delays.push(tau);
    }
    Ok(SarChannelRealization {
        cell_gains,
        cell_taps,
        delays,
        doppler_tap: k_r as usize,
        frac_doppler: exact - k_r,
        first_cell_delay,
        carrier: f0,
        sample_interval,
        doppler_tap_hz,
    })
}

impl SarChannelRealization {
    /// Time-domain taps with the carrier phase of the true continuous
    /// delay folded in.
    pub fn time_taps(&self, on_grid: bool) -> Vec<TimeTap> {
        let kappa = if on_grid { 0.0 } else { self.frac_doppler };
        let doppler_hz = (self.doppler_tap as f64 + kappa) * self.doppler_tap_hz;
        self.cell_gains
            .iter()
            .zip(&self.cell_taps)
            .zip(&self.delays)
            .filter(|((g, _), _)| g.norm_sqr() > 0.0)
            .map(|((g, &tap), &tau)| TimeTap {
                delay_tap: tap,
                doppler_hz,
                coeff: g * Complex64::from_polar(1.0, -2.0 * PI * self.carrier * tau),
            })
            .collect()
    }

    /// Places the cells in Doppler column `k_r` of a DD matrix.
    pub fn to_dd_matrix(&self, max_delay_tap: usize, max_doppler_tap: usize) -> Result<DDChannelMatrix> {
        let mut h = DDChannelMatrix::zeros(max_delay_tap, max_doppler_tap, ChannelKind::Sar);
        if self.doppler_tap > max_doppler_tap {
            return Err(Error::dim("radar Doppler tap outside matrix bounds"));
        }
        for tap in self.time_taps(true) {
            if tap.delay_tap > max_delay_tap {
                return Err(Error::dim("range cell tap outside matrix bounds"));
            }
            h.add(tap.delay_tap, self.doppler_tap, tap.coeff);
        }
        Ok(h)
    }
}

/// One tap of the time-domain tapped-delay-line channel.
#[derive(Debug, Clone, Copy)]
pub struct TimeTap {
    pub delay_tap: usize,
    pub doppler_hz: f64,
    /// Complex coefficient including the carrier phase of the path delay.
    pub coeff: Complex64,
}

/// Adds circular complex Gaussian noise of per-entry variance `sigma2`.
pub fn add_awgn<R: Rng>(samples: &mut [Complex64], sigma2: f64, rng: &mut R) {
    if sigma2 == 0.0 {
        return;
    }
    let n = Normal::new(0.0, (sigma2 / 2.0).sqrt()).expect("noise sigma");
    for v in samples.iter_mut() {
        *v += Complex64::new(n.sample(rng), n.sample(rng));
    }
}

/// Applies a DD channel matrix through the exact DD-domain input-output
/// relation, then adds AWGN of per-entry variance `sigma2`.
///
/// `Y[m,n] = sum_{l,k} H[l,k] X[(m-l)_M, (n-k)_N] e^{j2 pi k(m-l)/(MN)}
/// gamma_{m,n}` with `gamma = 1` for `m >= l` and
/// `e^{-j2 pi [n-k]_N / N}` for `m < l`.
pub fn apply_dd_channel<R: Rng>(
    x: &SymbolGrid,
    h: &DDChannelMatrix,
    sigma2: f64,
    rng: &mut R,
) -> Result<SymbolGrid> {
    let (m_dim, n_dim) = (x.m(), x.n());
    if h.max_delay_tap >= m_dim || h.max_doppler_tap >= n_dim {
        return Err(Error::dim("channel taps exceed grid dimensions"));
    }
    let mut y = SymbolGrid::zeros(m_dim, n_dim);
    let mn = (m_dim * n_dim) as f64;
    for (l, k, gain) in h.iter_taps() {
        for m in 0..m_dim {
            let m_src = (m + m_dim - l) % m_dim;
            let delta = m as f64 - l as f64;
            let base = Complex64::from_polar(1.0, 2.0 * PI * k as f64 * delta / mn);
            for n in 0..n_dim {
                let n_src = (n + n_dim - k) % n_dim;
                let gamma = if m >= l {
                    Complex64::new(1.0, 0.0)
                } else {
                    Complex64::from_polar(1.0, -2.0 * PI * n_src as f64 / n_dim as f64)
                };
                let v = gain * x.get(m_src, n_src) * base * gamma;
                y.set(m, n, y.get(m, n) + v);
            }
        }
    }
    let mut data = y.to_symbols();
    add_awgn(&mut data, sigma2, rng);
    SymbolGrid::from_columns(m_dim, n_dim, data)
}

/// Applies a tapped-delay-line channel in the time domain. Doppler phase
/// ramps are referenced to the start of the signal body (first post-CP
/// sample), matching the DD-domain relation for on-grid taps.
pub fn apply_time_channel(
    s_cp: &TimeSequence,
    taps: &[TimeTap],
    sample_interval: f64,
) -> Result<TimeSequence> {
    let cp = s_cp.cp_len;
    for t in taps {
        if t.delay_tap > cp {
            return Err(Error::arg(format!(
                "delay tap {} exceeds cyclic prefix {}",
                t.delay_tap, cp
            )));
        }
    }
    let len = s_cp.samples.len();
    let mut out = vec![Complex64::default(); len];
    for t in taps {
        for i in t.delay_tap..len {
            let body_time = (i as f64 - cp as f64 - t.delay_tap as f64) * sample_interval;
            let ramp = Complex64::from_polar(1.0, 2.0 * PI * t.doppler_hz * body_time);
            out[i] += t.coeff * s_cp.samples[i - t.delay_tap] * ramp;
        }
    }
    Ok(TimeSequence {
        samples: out,
        cp_len: cp,
        oversample: s_cp.oversample,
    })
}

/// CP-correlation carrier frequency offset estimate in Hz.
///
/// Correlates the cyclic prefix against the matching body tail; valid for
/// offsets below half the Doppler tap spacing.
pub fn cfo_estimate_cp(r: &TimeSequence, sample_interval: f64) -> Result<f64> {
    let cp = r.cp_len;
    if cp == 0 {
        return Err(Error::arg("CFO estimation needs a cyclic prefix"));
    }
    let body_len = r.samples.len() - cp;
    let mut acc = Complex64::default();
    for i in 0..cp {
        acc += r.samples[i].conj() * r.samples[i + body_len];
    }
    if acc.norm_sqr() == 0.0 {
        return Err(Error::arg("zero-energy cyclic prefix"));
    }
    Ok(acc.arg() / (2.0 * PI * body_len as f64 * sample_interval))
}

/// Removes a carrier frequency offset by mixing with `e^{-j2 pi nu t}`,
/// `t` referenced to the body start.
pub fn cfo_compensate(r: &TimeSequence, nu_hz: f64, sample_interval: f64) -> TimeSequence {
    let cp = r.cp_len as f64;
    let samples = r
        .samples
        .iter()
        .enumerate()
        .map(|(i, v)| {
            let t = (i as f64 - cp) * sample_interval;
            v * Complex64::from_polar(1.0, -2.0 * PI * nu_hz * t)
        })
        .collect();
    TimeSequence {
        samples,
        cp_len: r.cp_len,
        oversample: r.oversample,
    }
}
