//! Experiment configuration: canonical TOML schema, presets, and the full
//! run description used by the Monte Carlo harness.
//!
//! Angles are written in degrees and gains/powers in dB units in config
//! files; everything is converted to radians / linear / watts on load.

use crate::error::{Error, Result};
use crate::grid::{derive_grid, DDGridConfig, FrameConfig, LinkBudget, SarGeometry};
use serde::{Deserialize, Serialize};

/// One fully-specified physical setup: grid, frame, geometry and link.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SystemParams {
    pub grid: DDGridConfig,
    pub frame: FrameConfig,
    pub geometry: SarGeometry,
    pub link: LinkBudget,
    /// QAM order used for data symbols.
    pub qam_order: usize,
}

/// Canonical config-file schema (TOML). All sections optional; missing
/// sections fall back to the `table2_sub6` preset.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct ConfigFile {
    pub grid: Option<GridSection>,
    pub frame: Option<FrameSection>,
    pub geometry: Option<GeometrySection>,
    pub link: Option<LinkSection>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GridSection {
    pub m: usize,
    pub n: usize,
    pub numerology: u32,
    pub ref_freq_hz: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FrameSection {
    pub frame_len_ms: f64,
    pub pilot_period: usize,
    pub signals_per_slot: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GeometrySection {
    pub orbit_alt_m: f64,
    pub velocity_mps: f64,
    pub squint_deg: f64,
    pub grazing_deg: f64,
    pub swath_m: f64,
    pub aperture_m: f64,
    pub range_cells: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LinkSection {
    pub carrier_hz: f64,
    pub distance_m: Option<f64>,
    pub sat_gain_dbi: f64,
    pub user_gain_dbi: f64,
    pub rain_mean_db: f64,
    pub rain_var_db: f64,
    pub rician_k: f64,
    pub noise_var_dbm: f64,
    pub tx_power_dbw: f64,
    pub qam_order: Option<usize>,
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn dbm_to_watts(dbm: f64) -> f64 {
    10f64.powf((dbm - 30.0) / 10.0)
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Parse(format!("config: {e}")))
    }

    /// Resolves the file against a base preset, overriding any sections
    /// that are present.
    pub fn resolve(&self, base: SystemParams) -> Result<SystemParams> {
        let mut params = base;
        if let Some(g) = &self.grid {
            let frame = &mut params.frame;
            frame.numerology = g.numerology;
            frame.ref_freq = g.ref_freq_hz;
            params.grid = derive_grid(g.numerology, g.ref_freq_hz, g.m, g.n)?;
        }
        if let Some(f) = &self.frame {
            params.frame = FrameConfig::new(
                f.frame_len_ms * 1e-3,
                params.frame.ref_freq,
                params.frame.numerology,
                f.pilot_period,
                f.signals_per_slot,
            )?;
        }
        if let Some(geo) = &self.geometry {
            params.geometry = SarGeometry::new(
                geo.orbit_alt_m,
                geo.velocity_mps,
                geo.squint_deg.to_radians(),
                geo.grazing_deg.to_radians(),
                geo.swath_m,
                geo.aperture_m,
                geo.range_cells,
            )?;
        }
        if let Some(l) = &self.link {
            params.link = LinkBudget {
                carrier: l.carrier_hz,
                distance: l.distance_m.unwrap_or(params.geometry.center_range),
                sat_gain: db_to_linear(l.sat_gain_dbi),
                user_gain: db_to_linear(l.user_gain_dbi),
                rain_mean_db: l.rain_mean_db,
                rain_var_db: l.rain_var_db,
                rician_k: l.rician_k,
                noise_var: dbm_to_watts(l.noise_var_dbm),
                tx_power: db_to_linear(l.tx_power_dbw),
            };
            params.link.validate()?;
            if let Some(order) = l.qam_order {
                params.qam_order = order;
            }
        }
        Ok(params)
    }
}

/// Channel-sensing scheme selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SensingScheme {
    Proposed,
    PnSequence,
}

/// Waveform selector for BER runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    Oddm,
    Ofdm,
}

impl std::fmt::Display for Scheme {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Scheme::Oddm => write!(f, "oddm"),
            Scheme::Ofdm => write!(f, "ofdm"),
        }
    }
}

/// Full experiment description for one harness invocation.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunConfig {
    pub params: SystemParams,
    /// SNR sweep axis in dB.
    pub snr_db: Vec<f64>,
    /// Trials per sweep point (cap for BER runs).
    pub trials: usize,
    /// Master seed; per-trial streams are derived from it.
    pub seed: u64,
    /// Number of NLOS paths for the communication channel.
    pub nlos_paths: usize,
    /// Maximum delay spread in samples for the communication channel.
    pub max_delay_tap: usize,
    /// Doppler guard half-width used by the pilot pattern.
    pub doppler_guard: usize,
    /// Use the true channel Doppler column instead of the sensed one.
    pub genie_doppler_column: bool,
    /// Compensate fractional CFO with the true value instead of the
    /// CP-correlation estimate.
    pub genie_cfo: bool,
    /// Oversampling factor for the pulse-shaped path.
    pub oversample: usize,
    /// BER runs stop a point early once this many bit errors are seen.
    pub target_errors: usize,
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if self.snr_db.is_empty() {
            return Err(Error::config("SNR list must be nonempty"));
        }
        if self.trials == 0 {
            return Err(Error::config("trials must be >= 1"));
        }
        if 2 * self.doppler_guard + 1 > self.params.grid.n {
            return Err(Error::config("doppler guard wider than grid"));
        }
        Ok(())
    }
}

/// Built-in parameter presets.
pub mod presets {
    use super::*;
    use crate::SPEED_OF_LIGHT;

    /// Sub-6 GHz LEO setup: 5 GHz carrier, 122.88 MHz bandwidth,
    /// 550 km orbit, M=128, N=32, numerology 1.
    pub fn table2_sub6() -> SystemParams {
        let grid = derive_grid(1, 15e3, 128, 32).expect("preset grid");
        let frame = FrameConfig::new(10e-3, 15e3, 1, 1, 14).expect("preset frame");
        let geometry = SarGeometry::new(
            550e3,
            7.6e3,
            30f64.to_radians(),
            69.5f64.to_radians(),
            1200.0,
            3600.0,
            128,
        )
        .expect("preset geometry");
        let link = LinkBudget {
            carrier: 5e9,
            distance: geometry.center_range,
            sat_gain: db_to_linear(30.0),
            user_gain: db_to_linear(3.0),
            rain_mean_db: -2.4,
            rain_var_db: 1.63,
            rician_k: 5.0,
            noise_var: dbm_to_watts(-106.0),
            tx_power: db_to_linear(10.0),
        };
        SystemParams {
            grid,
            frame,
            geometry,
            link,
            qam_order: 4,
        }
    }

    /// mmWave prototype setup: 28 GHz carrier, 245.76 MHz bandwidth,
    /// M=128, N=16, numerology 4, 16-QAM, 0.77 m azimuth resolution.
    pub fn table3_mmwave() -> SystemParams {
        let grid = derive_grid(4, 7.5e3, 128, 16).expect("preset grid");
        let frame = FrameConfig::new(10e-3, 7.5e3, 4, 1, 7).expect("preset frame");
        let carrier = 28e9;
        let center_range = 550e3 / 69.5f64.to_radians().sin();
        // Aperture chosen to hit the quoted 0.77 m azimuth resolution.
        let aperture = 0.886 * SPEED_OF_LIGHT * center_range / (2.0 * carrier * 0.77);
        let geometry = SarGeometry::new(
            550e3,
            7.6e3,
            30f64.to_radians(),
            69.5f64.to_radians(),
            1200.0,
            aperture,
            128,
        )
        .expect("preset geometry");
        let link = LinkBudget {
            carrier,
            distance: geometry.center_range,
            sat_gain: db_to_linear(30.0),
            user_gain: db_to_linear(3.0),
            rain_mean_db: -2.4,
            rain_var_db: 1.63,
            rician_k: 5.0,
            noise_var: dbm_to_watts(-106.0),
            tx_power: db_to_linear(10.0),
        };
        SystemParams {
            grid,
            frame,
            geometry,
            link,
            qam_order: 16,
        }
    }

    /// Looks a preset up by name.
    pub fn by_name(name: &str) -> Result<SystemParams> {
        match name {
            "table2_sub6" => Ok(table2_sub6()),
            "table3_mmwave" => Ok(table3_mmwave()),
            other => Err(Error::config(format!("unknown preset `{other}`"))),
        }
    }

    /// Default run configuration on top of a preset.
    pub fn default_run(params: SystemParams) -> RunConfig {
        RunConfig {
            params,
            snr_db: vec![0.0, 10.0, 20.0, 30.0],
            trials: 100,
            seed: 1,
            nlos_paths: 2,
            max_delay_tap: 16,
            doppler_guard: 4,
            genie_doppler_column: false,
            genie_cfo: true,
            oversample: 2,
            target_errors: 100,
        }
    }
}
