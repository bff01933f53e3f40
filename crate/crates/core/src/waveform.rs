//! ODDM modulation and demodulation (exact matrix path), cyclic prefix
//! handling, the OFDM baseline, and PAPR measurement.
//!
//! The matrix path implements `s = vec(X F_N^H)`: each delay row of the
//! symbol grid is carried across the N subpulses by an inverse DFT along
//! the Doppler axis, and the receiver inverts it with a forward DFT after
//! column-wise devectorization.

use crate::error::{Error, Result};
use crate::fft;
use num_complex::Complex64;

/// M x N complex symbol grid in the delay-Doppler plane, stored
/// column-major (one Doppler column is contiguous).
#[derive(Debug, Clone, PartialEq)]
pub struct SymbolGrid {
    data: Vec<Complex64>,
    m: usize,
    n: usize,
}

impl SymbolGrid {
    pub fn zeros(m: usize, n: usize) -> Self {
        SymbolGrid {
            data: vec![Complex64::default(); m * n],
            m,
            n,
        }
    }

    pub fn from_columns(m: usize, n: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != m * n {
            return Err(Error::dim(format!(
                "grid data length {} != {}x{}",
                data.len(),
                m,
                n
            )));
        }
        Ok(SymbolGrid { data, m, n })
    }

    /// Fills an M x N grid from a flat symbol vector, column by column.
    pub fn from_symbols(m: usize, n: usize, symbols: &[Complex64]) -> Result<Self> {
        Self::from_columns(m, n, symbols.to_vec())
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, m: usize, n: usize) -> Complex64 {
        self.data[n * self.m + m]
    }

    pub fn set(&mut self, m: usize, n: usize, v: Complex64) {
        self.data[n * self.m + m] = v;
    }

    pub fn column(&self, n: usize) -> &[Complex64] {
        &self.data[n * self.m..(n + 1) * self.m]
    }

    pub fn column_mut(&mut self, n: usize) -> &mut [Complex64] {
        &mut self.data[n * self.m..(n + 1) * self.m]
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn norm_sqr(&self) -> f64 {
        self.data.iter().map(|v| v.norm_sqr()).sum()
    }

    /// Flattens column by column (Doppler-major), the layout used when
    /// packing data symbols into a grid.
    pub fn to_symbols(&self) -> Vec<Complex64> {
        self.data.clone()
    }
}

/// A complex baseband sample sequence, optionally cyclic-prefixed and
/// oversampled.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSequence {
    pub samples: Vec<Complex64>,
    pub cp_len: usize,
    pub oversample: usize,
}

impl TimeSequence {
    pub fn new(samples: Vec<Complex64>) -> Self {
        TimeSequence {
            samples,
            cp_len: 0,
            oversample: 1,
        }
    }

    /// Body samples (everything past the cyclic prefix).
    pub fn body(&self) -> &[Complex64] {
        &self.samples[self.cp_len * self.oversample..]
    }

    pub fn energy(&self) -> f64 {
        self.samples.iter().map(|v| v.norm_sqr()).sum()
    }
}

/// ODDM modulation, matrix path: `s = vec(X F_N^H)`.
///
/// The sample at index `m + u*M` carries delay bin `m` of subpulse `u`.
/// Unitary, so signal energy equals grid energy.
pub fn oddm_modulate_matrix(x: &SymbolGrid) -> TimeSequence {
    let (m_dim, n_dim) = (x.m, x.n);
    let mut samples = vec![Complex64::default(); m_dim * n_dim];
    let mut row = vec![Complex64::default(); n_dim];
    for m in 0..m_dim {
        for n in 0..n_dim {
            row[n] = x.get(m, n);
        }
        fft::idft_in_place(&mut row);
        for u in 0..n_dim {
            samples[m + u * m_dim] = row[u];
        }
    }
    TimeSequence::new(samples)
}

/// ODDM demodulation, matrix path: column-wise devectorization followed by
/// a forward DFT along each delay row. Exact inverse of
/// [`oddm_modulate_matrix`].
pub fn oddm_demodulate_matrix(r: &TimeSequence, m_dim: usize, n_dim: usize) -> Result<SymbolGrid> {
    let body = r.body();
    if body.len() != m_dim * n_dim {
        return Err(Error::dim(format!(
            "sequence length {} != {}x{}",
            body.len(),
            m_dim,
            n_dim
        )));
    }
    let mut grid = SymbolGrid::zeros(m_dim, n_dim);
    let mut row = vec![Complex64::default(); n_dim];
    for m in 0..m_dim {
        for u in 0..n_dim {
            row[u] = body[m + u * m_dim];
        }
        fft::dft_in_place(&mut row);
        for n in 0..n_dim {
            grid.set(m, n, row[n]);
        }
    }
    Ok(grid)
}

/// Prepends a cyclic prefix of `l` samples (at the sequence's own rate).
pub fn add_cp(s: &TimeSequence, l: usize) -> Result<TimeSequence> {
    let os = s.oversample;
    let body = s.body();
    let cp_samples = l * os;
    if cp_samples > body.len() {
        return Err(Error::arg(format!(
            "cp length {} exceeds body length {}",
            l,
            body.len() / os
        )));
    }
    let mut samples = Vec::with_capacity(body.len() + cp_samples);
    samples.extend_from_slice(&body[body.len() - cp_samples..]);
    samples.extend_from_slice(body);
    Ok(TimeSequence {
        samples,
        cp_len: l,
        oversample: os,
    })
}

/// Drops the cyclic prefix.
pub fn remove_cp(s: &TimeSequence) -> TimeSequence {
    TimeSequence {
        samples: s.body().to_vec(),
        cp_len: 0,
        oversample: s.oversample,
    }
}

/// Cyclic-prefix length needed for a delay spread, `ceil(spread / Ts)`.
pub fn cp_len_for_delay_spread(delay_spread: f64, sample_interval: f64) -> usize {
    (delay_spread / sample_interval).ceil() as usize
}

/// Standard OFDM modulation of one symbol: unitary inverse DFT plus CP.
pub fn ofdm_modulate(freq_symbols: &[Complex64], cp_len: usize) -> Result<TimeSequence> {
    let body = fft::idft(freq_symbols);
    add_cp(&TimeSequence::new(body), cp_len)
}

/// OFDM demodulation: CP removal plus unitary DFT.
pub fn ofdm_demodulate(r: &TimeSequence) -> Vec<Complex64> {
    fft::dft(r.body())
}

/// Peak-to-average power ratio, `max |s|^2 / mean |s|^2`.
pub fn papr(seq: &TimeSequence) -> Result<f64> {
    let mean = seq.energy() / seq.samples.len() as f64;
    if mean == 0.0 {
        return Err(Error::arg("papr of a zero sequence"));
    }
    let peak = seq
        .samples
        .iter()
        .map(|v| v.norm_sqr())
        .fold(0.0f64, f64::max);
    Ok(peak / mean)
}
