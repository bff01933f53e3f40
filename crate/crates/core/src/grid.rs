//! DD grid geometry, the 5G-NR-compatible frame structure, SAR geometry and
//! link-budget parameters, plus the PRF / numerology planning formulas.

use crate::error::{Error, Result};
use crate::SPEED_OF_LIGHT;
use serde::{Deserialize, Serialize};

/// Delay-Doppler grid parameters.
///
/// `M` delay bins at resolution `delay_res` and `N` Doppler bins at
/// resolution `doppler_res`, with subpulse spacing `t0 = M * delay_res`
/// and bandwidth `M * N * doppler_res`. The joint resolution satisfies
/// `delay_res * doppler_res = 1 / (M * N)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DDGridConfig {
    pub m: usize,
    pub n: usize,
    /// Doppler resolution (subcarrier spacing) in Hz.
    pub doppler_res: f64,
    /// Delay resolution in seconds.
    pub delay_res: f64,
    /// Subpulse spacing in seconds.
    pub t0: f64,
    /// Baseband sampling interval in seconds (equals `delay_res`).
    pub sample_interval: f64,
    /// Signal bandwidth in Hz.
    pub bandwidth: f64,
}

impl DDGridConfig {
    /// Total symbols per ODDM signal.
    pub fn len(&self) -> usize {
        self.m * self.n
    }

    pub fn is_empty(&self) -> bool {
        self.m == 0 || self.n == 0
    }

    /// Signal duration without CP, `N * t0` seconds.
    pub fn duration(&self) -> f64 {
        self.n as f64 * self.t0
    }

    /// Range resolution `c / (2 Bw)` implied by the grid bandwidth.
    pub fn range_resolution(&self) -> f64 {
        SPEED_OF_LIGHT / (2.0 * self.bandwidth)
    }
}

/// Derives a DD grid from the numerology index and reference frequency:
/// the Doppler resolution is `2^mu * f0_ref`.
pub fn derive_grid(mu: u32, f0_ref: f64, m: usize, n: usize) -> Result<DDGridConfig> {
    if m == 0 || n == 0 {
        return Err(Error::config("grid dimensions must be positive"));
    }
    if f0_ref <= 0.0 {
        return Err(Error::config("reference frequency must be positive"));
    }
    let doppler_res = (1u64 << mu) as f64 * f0_ref;
    let t0 = 1.0 / (n as f64 * doppler_res);
    let delay_res = t0 / m as f64;
    Ok(DDGridConfig {
        m,
        n,
        doppler_res,
        delay_res,
        t0,
        sample_interval: delay_res,
        bandwidth: m as f64 * n as f64 * doppler_res,
    })
}

/// 5G-NR-style wireless frame layout carrying the shared pilot signals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrameConfig {
    /// Frame length in seconds.
    pub frame_len: f64,
    /// Reference frequency constant `F0` in Hz.
    pub ref_freq: f64,
    /// Numerology index `mu`.
    pub numerology: u32,
    /// Pilot slot period `n0` (shared pilot every `n0`-th slot).
    pub pilot_period: usize,
    /// ODDM signals per slot.
    pub signals_per_slot: usize,
}

impl FrameConfig {
    pub fn new(
        frame_len: f64,
        ref_freq: f64,
        numerology: u32,
        pilot_period: usize,
        signals_per_slot: usize,
    ) -> Result<Self> {
        if frame_len <= 0.0 || ref_freq <= 0.0 {
            return Err(Error::config("frame length and reference frequency must be positive"));
        }
        if pilot_period == 0 || signals_per_slot == 0 {
            return Err(Error::config("pilot period and signals per slot must be positive"));
        }
        let max_signals = (frame_len / 10.0 * ref_freq).floor() as usize;
        if signals_per_slot > max_signals {
            return Err(Error::config(format!(
                "signals per slot {} exceeds slot capacity {}",
                signals_per_slot, max_signals
            )));
        }
        Ok(FrameConfig {
            frame_len,
            ref_freq,
            numerology,
            pilot_period,
            signals_per_slot,
        })
    }

    /// Number of slots per frame, `10 * 2^mu`.
    pub fn slots(&self) -> usize {
        10 * (1usize << self.numerology)
    }

    /// Doppler resolution implied by the numerology.
    pub fn doppler_res(&self) -> f64 {
        (1u64 << self.numerology) as f64 * self.ref_freq
    }
}

/// Pulse repetition frequency of the shared pilot signals,
/// `10 * 2^mu / (n0 * L0)`.
pub fn prf(frame: &FrameConfig) -> f64 {
    frame.slots() as f64 / (frame.pilot_period as f64 * frame.frame_len)
}

/// Stripmap SAR geometry. Angles are stored in radians.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SarGeometry {
    /// Orbit altitude in meters.
    pub orbit_alt: f64,
    /// Platform velocity in m/s.
    pub velocity: f64,
    /// Squint angle in radians.
    pub squint: f64,
    /// Grazing angle in radians.
    pub grazing: f64,
    /// Swath width in meters.
    pub swath: f64,
    /// Synthetic aperture length in meters.
    pub aperture: f64,
    /// Slant range of the first range cell in meters.
    pub first_cell_range: f64,
    /// Beam-center slant range in meters (`orbit_alt / sin(grazing)`).
    pub center_range: f64,
    /// Number of range cells simulated.
    pub range_cells: usize,
    /// Synthetic aperture duration in seconds.
    pub synthetic_aperture: f64,
}

impl SarGeometry {
    /// Builds the geometry, deriving the center range from altitude and
    /// grazing angle and the aperture duration from velocity.
    pub fn new(
        orbit_alt: f64,
        velocity: f64,
        squint_rad: f64,
        grazing_rad: f64,
        swath: f64,
        aperture: f64,
        range_cells: usize,
    ) -> Result<Self> {
        if orbit_alt <= 0.0 || grazing_rad <= 0.0 {
            return Err(Error::config("altitude and grazing angle must be positive"));
        }
        let center_range = orbit_alt / grazing_rad.sin();
        let synthetic_aperture = if velocity > 0.0 { aperture / velocity } else { 0.0 };
        // First cell placed so the simulated window is centred on the beam
        // center; callers may override.
        let first_cell_range = center_range - swath / 2.0;
        Ok(SarGeometry {
            orbit_alt,
            velocity,
            squint: squint_rad,
            grazing: grazing_rad,
            swath,
            aperture,
            first_cell_range,
            center_range,
            range_cells,
            synthetic_aperture,
        })
    }

    /// Range cell count suggested by the swath geometry,
    /// `(Rw / rho_r) * cos(theta_g)`.
    ///
    /// This is a consistency helper only: `range_cells` stays an
    /// independent knob because published scenarios routinely use fewer
    /// cells than the swath formula yields.
    pub fn suggested_range_cells(&self, range_res: f64) -> f64 {
        self.swath / range_res * self.grazing.cos()
    }
}

/// Link-budget parameters. Gains are linear, rain statistics in dB.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinkBudget {
    /// Carrier frequency in Hz.
    pub carrier: f64,
    /// Propagation distance in meters.
    pub distance: f64,
    /// Satellite antenna gain (linear).
    pub sat_gain: f64,
    /// User antenna gain (linear).
    pub user_gain: f64,
    /// Rain attenuation mean in dB.
    pub rain_mean_db: f64,
    /// Rain attenuation variance in dB^2.
    pub rain_var_db: f64,
    /// Rician factor (linear).
    pub rician_k: f64,
    /// Noise variance in watts.
    pub noise_var: f64,
    /// Transmit power in watts.
    pub tx_power: f64,
}

impl LinkBudget {
    pub fn validate(&self) -> Result<()> {
        if self.carrier <= 0.0 || self.distance <= 0.0 {
            return Err(Error::config("carrier and distance must be positive"));
        }
        if self.sat_gain <= 0.0 || self.user_gain <= 0.0 || self.tx_power <= 0.0 {
            return Err(Error::config("gains and powers must be positive"));
        }
        if self.rician_k < 0.0 {
            return Err(Error::config("rician factor must be nonnegative"));
        }
        Ok(())
    }
}

/// Azimuth resolution `0.886 c Rc / (2 f0 Ra)`.
pub fn azimuth_resolution(geo: &SarGeometry, carrier: f64) -> f64 {
    0.886 * SPEED_OF_LIGHT * geo.center_range / (2.0 * carrier * geo.aperture)
}

/// PRF feasibility window `(PRF_min, PRF_max)`.
///
/// `PRF_min = Vs cos(theta_s) / rho_a` (azimuth sampling) and
/// `PRF_max = (2 Rw cos(theta_g)/c + L0/(d Ns))^-1` (swath round trip plus
/// signal duration). `PRF_min > PRF_max` marks an infeasible geometry.
pub fn prf_bounds(geo: &SarGeometry, frame: &FrameConfig, carrier: f64) -> (f64, f64) {
    let rho_a = azimuth_resolution(geo, carrier);
    let prf_min = geo.velocity * geo.squint.cos() / rho_a;
    let signal_len = frame.frame_len / (frame.slots() as f64 * frame.signals_per_slot as f64);
    let prf_max = 1.0 / (2.0 * geo.swath * geo.grazing.cos() / SPEED_OF_LIGHT + signal_len);
    (prf_min, prf_max)
}

/// Smallest numerology index satisfying the azimuth sampling constraint:
/// `mu >= ceil(log2(n0 L0 Vs cos(theta_s) / (10 rho_a)))`, clamped at 0.
pub fn min_numerology(geo: &SarGeometry, pilot_period: usize, frame_len: f64, carrier: f64) -> u32 {
    let rho_a = azimuth_resolution(geo, carrier);
    let arg = pilot_period as f64 * frame_len * geo.velocity * geo.squint.cos() / (10.0 * rho_a);
    if arg <= 1.0 {
        return 0;
    }
    arg.log2().ceil().max(0.0) as u32
}

/// Role of one ODDM signal position within a frame.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SignalKind {
    SharedPilot,
    Data,
}

/// Pilot/data layout over `d` slots of `Ns` signals each. The first signal
/// of every `n0`-th slot is a shared pilot.
pub fn slot_schedule(frame: &FrameConfig) -> Vec<Vec<SignalKind>> {
    (0..frame.slots())
        .map(|slot| {
            (0..frame.signals_per_slot)
                .map(|sig| {
                    if slot % frame.pilot_period == 0 && sig == 0 {
                        SignalKind::SharedPilot
                    } else {
                        SignalKind::Data
                    }
                })
                .collect()
        })
        .collect()
}
