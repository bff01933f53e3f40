//! Gray-mapped square QAM with unit average symbol energy.

use crate::error::{Error, Result};
use num_complex::Complex64;

/// QAM constellation configuration. Only square Gray-coded orders are
/// supported; symbols are scaled to unit average energy.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QamConfig {
    pub order: usize,
}

impl QamConfig {
    pub fn new(order: usize) -> Result<Self> {
        match order {
            4 | 16 | 64 => Ok(QamConfig { order }),
            _ => Err(Error::arg(format!("unsupported QAM order {order}"))),
        }
    }

    pub fn bits_per_symbol(&self) -> usize {
        self.order.trailing_zeros() as usize
    }

    fn bits_per_axis(&self) -> usize {
        self.bits_per_symbol() / 2
    }

    /// Energy normalization: levels are odd integers +-1, +-3, ... so the
    /// mean square per axis is (order_axis^2 - 1)/3.
    fn scale(&self) -> f64 {
        let levels_per_axis = 1usize << self.bits_per_axis();
        let axis_ms = (levels_per_axis.pow(2) as f64 - 1.0) / 3.0;
        1.0 / (2.0 * axis_ms).sqrt()
    }
}

/// Gray code for one axis: amplitude rank 0..levels maps from highest
/// positive level downwards, with leading bit 0 on the positive half so
/// that the all-zero word lands in the (+,+) quadrant.
fn axis_level(bits: usize, bits_per_axis: usize) -> f64 {
    let levels = 1usize << bits_per_axis;
    // Gray decode: rank r such that gray(r) == bits.
    let mut rank = bits;
    let mut shift = 1;
    while shift < bits_per_axis {
        rank ^= rank >> shift;
        shift <<= 1;
    }
    // rank 0 -> +(levels-1), rank levels-1 -> -(levels-1)
    (levels as f64 - 1.0) - 2.0 * rank as f64
}

fn axis_bits(level_rank: usize) -> usize {
    level_rank ^ (level_rank >> 1)
}

/// Maps a bit slice onto QAM symbols. The first half of each symbol's bits
/// selects the in-phase level, the second half the quadrature level.
pub fn qam_map(bits: &[u8], cfg: &QamConfig) -> Result<Vec<Complex64>> {
    let bps = cfg.bits_per_symbol();
    if bits.len() % bps != 0 {
        return Err(Error::dim(format!(
            "bit length {} not divisible by {}",
            bits.len(),
            bps
        )));
    }
    let bpa = cfg.bits_per_axis();
    let scale = cfg.scale();
    let mut out = Vec::with_capacity(bits.len() / bps);
    for chunk in bits.chunks(bps) {
        let mut i_bits = 0usize;
        let mut q_bits = 0usize;
        for b in 0..bpa {
            i_bits = (i_bits << 1) | chunk[b] as usize;
            q_bits = (q_bits << 1) | chunk[bpa + b] as usize;
        }
        out.push(Complex64::new(
            axis_level(i_bits, bpa) * scale,
            axis_level(q_bits, bpa) * scale,
        ));
    }
    Ok(out)
}

/// Hard-decision demapping: nearest constellation level per axis.
pub fn qam_demap(symbols: &[Complex64], cfg: &QamConfig) -> Vec<u8> {
    let bpa = cfg.bits_per_axis();
    let levels = 1usize << bpa;
    let scale = cfg.scale();
    let mut out = Vec::with_capacity(symbols.len() * cfg.bits_per_symbol());
    for s in symbols {
        for value in [s.re, s.im] {
            // nearest odd level in units of scale
            let unscaled = value / scale;
            let rank_f = ((levels as f64 - 1.0) - unscaled) / 2.0;
            let rank = rank_f.round().clamp(0.0, levels as f64 - 1.0) as usize;
            let bits = axis_bits(rank);
            for b in (0..bpa).rev() {
                out.push(((bits >> b) & 1) as u8);
            }
        }
        // reorder: demap pushed I bits then Q bits, which matches the map
    }
    out
}
