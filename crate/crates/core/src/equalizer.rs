//! Low-complexity MMSE equalization in the delay-Doppler domain, the
//! per-subcarrier OFDM-MMSE baseline, and BER counting.
//!
//! After CFO compensation the channel occupies a single Doppler column
//! `k_c`, so each received Doppler column is a factor-circulant transform
//! of one transmitted column. The equalizer diagonalizes that transform
//! with per-column DFT conjugation and applies a scalar MMSE per bin —
//! three length-M transforms per Doppler column.

use crate::error::{Error, Result};
use crate::fft;
use crate::sensing::column_twiddle;
use crate::waveform::SymbolGrid;
use num_complex::Complex64;

/// Regularization floor added to the MMSE denominator when `sigma2 = 0`.
pub const MMSE_EPSILON: f64 = 1e-12;

/// Inputs of one equalization pass.
#[derive(Debug, Clone)]
pub struct EqualizerInput<'a> {
    /// Received (demodulated, CFO-compensated) DD grid.
    pub received: &'a SymbolGrid,
    /// Sensed delay profile of Doppler column `k_c`, length M.
    pub csi_column: &'a [Complex64],
    /// Common Doppler tap `k_c`.
    pub doppler_tap: usize,
    /// Noise variance per DD entry.
    pub noise_var: f64,
}

/// MMSE-equalizes a full grid.
///
/// For each received column `n`: `y~ = DFT(C_n^{-1} y_n)`, the channel
/// eigenvalues are `sqrt(M) DFT(C_n^{-1} h)`, the per-bin MMSE estimate is
/// `conj(D) y~ / (|D|^2 + sigma^2)`, and the transmitted column
/// `(n - k_c) mod N` is recovered through `C_{k_c}^{-1} C_n IDFT(.)`.
pub fn mmse_equalize(input: &EqualizerInput<'_>) -> Result<SymbolGrid> {
    let y = input.received;
    let (m_dim, n_dim) = (y.m(), y.n());
    if input.csi_column.len() != m_dim {
        return Err(Error::dim("CSI column length mismatch"));
    }
    if input.doppler_tap >= n_dim {
        return Err(Error::arg("doppler tap outside the grid"));
    }
    if input.noise_var < 0.0 {
        return Err(Error::arg("negative noise variance"));
    }
    let reg = if input.noise_var > 0.0 {
        input.noise_var
    } else {
        MMSE_EPSILON
    };
    let sqrt_m = (m_dim as f64).sqrt();
    let twiddle_kc = column_twiddle(m_dim, input.doppler_tap, n_dim);
    let mut x_hat = SymbolGrid::zeros(m_dim, n_dim);
    for n in 0..n_dim {
        let twiddle = column_twiddle(m_dim, n, n_dim);
        // channel eigenvalues D_n = sqrt(M) DFT(C_n^{-1} h)
        let mut lam: Vec<Complex64> = input
            .csi_column
            .iter()
            .zip(&twiddle)
            .map(|(h, t)| h * t)
            .collect();
        fft::dft_in_place(&mut lam);
        for v in lam.iter_mut() {
            *v *= sqrt_m;
        }
        // y~ = DFT(C_n^{-1} y_n)
        let mut buf: Vec<Complex64> = y
            .column(n)
            .iter()
            .zip(&twiddle)
            .map(|(v, t)| v * t)
            .collect();
        fft::dft_in_place(&mut buf);
        for (v, d) in buf.iter_mut().zip(&lam) {
            let denom = (d.norm_sqr() + reg).max(MMSE_EPSILON);
            *v = d.conj() * *v / denom;
        }
        fft::idft_in_place(&mut buf);
        let target = (n + n_dim - input.doppler_tap) % n_dim;
        let col = x_hat.column_mut(target);
        for (i, v) in buf.iter().enumerate() {
            // C_{k_c}^{-1} C_n
            col[i] = v * twiddle_kc[i] * twiddle[i].conj();
        }
    }
    Ok(x_hat)
}

/// Per-subcarrier MMSE for the OFDM baseline:
/// `x^_k = conj(H_k) y_k / (|H_k|^2 + sigma^2)`.
pub fn ofdm_mmse_equalize(
    received: &[Complex64],
    csi_freq: &[Complex64],
    sigma2: f64,
) -> Result<Vec<Complex64>> {
    if received.len() != csi_freq.len() {
        return Err(Error::dim("OFDM CSI length mismatch"));
    }
    let reg = if sigma2 > 0.0 { sigma2 } else { MMSE_EPSILON };
    Ok(received
        .iter()
        .zip(csi_freq)
        .map(|(y, h)| h.conj() * y / ((h.norm_sqr() + reg).max(MMSE_EPSILON)))
        .collect())
}

/// Bit error rate between two equal-length bit slices.
pub fn ber(measured: &[u8], truth: &[u8]) -> Result<f64> {
    if measured.len() != truth.len() {
        return Err(Error::dim("bit length mismatch"));
    }
    if measured.is_empty() {
        return Err(Error::arg("empty bit vectors"));
    }
    let errors = measured
        .iter()
        .zip(truth)
        .filter(|(a, b)| a != b)
        .count();
    Ok(errors as f64 / truth.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{apply_dd_channel, ChannelKind, DDChannelMatrix};
    use nalgebra::DMatrix;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn random_grid(m: usize, n: usize, rng: &mut ChaCha8Rng) -> SymbolGrid {
        let data = (0..m * n)
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        SymbolGrid::from_columns(m, n, data).unwrap()
    }

    fn single_column_channel(
        h: &[Complex64],
        k_c: usize,
        n_dim: usize,
    ) -> DDChannelMatrix {
        let mut dd = DDChannelMatrix::zeros(h.len() - 1, n_dim - 1, ChannelKind::Comm);
        for (l, v) in h.iter().enumerate() {
            dd.set(l, k_c, *v);
        }
        dd
    }

    #[test]
    fn identity_channel_recovers_exactly() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let x = random_grid(16, 8, &mut rng);
        let mut h = vec![Complex64::default(); 16];
        h[0] = Complex64::new(1.0, 0.0);
        let input = EqualizerInput {
            received: &x,
            csi_column: &h,
            doppler_tap: 0,
            noise_var: 0.0,
        };
        let x_hat = mmse_equalize(&input).unwrap();
        for (a, b) in x.as_slice().iter().zip(x_hat.as_slice()) {
            assert!((a - b).norm() < 1e-10);
        }
    }

    #[test]
    fn noiseless_on_grid_channel_recovers() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let (m_dim, n_dim) = (16usize, 8usize);
        let x = random_grid(m_dim, n_dim, &mut rng);
        let mut h = vec![Complex64::default(); m_dim];
        h[0] = Complex64::new(1.0, 0.2);
        h[3] = Complex64::new(-0.4, 0.1);
        h[7] = Complex64::new(0.2, -0.3);
        let k_c = 2;
        let dd = single_column_channel(&h, k_c, n_dim);
        let y = apply_dd_channel(&x, &dd, 0.0, &mut rng).unwrap();
        let x_hat = mmse_equalize(&EqualizerInput {
            received: &y,
            csi_column: &h,
            doppler_tap: k_c,
            noise_var: 0.0,
        })
        .unwrap();
        let err = x
            .as_slice()
            .iter()
            .zip(x_hat.as_slice())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0f64, f64::max);
        assert!(err < 1e-8, "max error {err}");
    }

    /// Dense per-column channel matrix `B_n[m, m''] = h[(m-m'')_M]
    /// e^{j2 pi k_c m''/(MN)} (lambda_n if m'' > m)`.
    fn dense_column_matrix(
        h: &[Complex64],
        k_c: usize,
        n: usize,
        n_dim: usize,
    ) -> DMatrix<Complex64> {
        let m_dim = h.len();
        let mn = (m_dim * n_dim) as f64;
        let lambda = Complex64::from_polar(1.0, -2.0 * PI * n as f64 / n_dim as f64);
        DMatrix::from_fn(m_dim, m_dim, |m, msrc| {
            let l = (m + m_dim - msrc) % m_dim;
            let mut v = h[l] * Complex64::from_polar(1.0, 2.0 * PI * k_c as f64 * msrc as f64 / mn);
            if msrc > m {
                v *= lambda;
            }
            v
        })
    }

    #[test]
    fn matches_dense_matrix_mmse() {
        for seed in 0..100u64 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let m_dim = [8usize, 16, 32][seed as usize % 3];
            let n_dim = 8usize;
            let k_c = rng.gen_range(0..4usize);
            let sigma2 = 0.01;
            let x = random_grid(m_dim, n_dim, &mut rng);
            let h: Vec<Complex64> = (0..m_dim)
                .map(|l| {
                    if l == 0 || rng.gen::<f64>() < 0.3 {
                        Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
                    } else {
                        Complex64::default()
                    }
                })
                .collect();
            let dd = single_column_channel(&h, k_c, n_dim);
            let y = apply_dd_channel(&x, &dd, sigma2, &mut rng).unwrap();
            let fast = mmse_equalize(&EqualizerInput {
                received: &y,
                csi_column: &h,
                doppler_tap: k_c,
                noise_var: sigma2,
            })
            .unwrap();

            // brute force: per column, W = B^H (B B^H + s I)^{-1}
            for n in 0..n_dim {
                let b = dense_column_matrix(&h, k_c, n, n_dim);
                let gram = &b * b.adjoint()
                    + DMatrix::from_diagonal_element(m_dim, m_dim, Complex64::new(sigma2, 0.0));
                let w = b.adjoint() * gram.try_inverse().expect("invertible");
                let y_vec = DMatrix::from_column_slice(m_dim, 1, y.column(n));
                let x_vec = w * y_vec;
                let target = (n + n_dim - k_c) % n_dim;
                let scale: f64 = x_vec.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt().max(1e-12);
                for m in 0..m_dim {
                    let diff = (fast.get(m, target) - x_vec[(m, 0)]).norm();
                    assert!(
                        diff / scale < 1e-8,
                        "seed {seed} col {n} entry {m}: {diff}"
                    );
                }
            }
        }
    }

    #[test]
    fn fft_count_is_three_per_column() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let (m_dim, n_dim) = (32usize, 8usize);
        let y = random_grid(m_dim, n_dim, &mut rng);
        let mut h = vec![Complex64::default(); m_dim];
        h[0] = Complex64::new(1.0, 0.0);
        h[2] = Complex64::new(0.3, 0.3);
        fft::reset_transform_count();
        let _ = mmse_equalize(&EqualizerInput {
            received: &y,
            csi_column: &h,
            doppler_tap: 1,
            noise_var: 0.01,
        })
        .unwrap();
        assert_eq!(fft::transform_count(), 3 * n_dim as u64);
    }

    #[test]
    fn ofdm_flat_channel_is_scaled_identity() {
        let y: Vec<Complex64> = (0..8).map(|i| Complex64::new(i as f64, -1.0)).collect();
        let h = vec![Complex64::new(2.0, 0.0); 8];
        let x = ofdm_mmse_equalize(&y, &h, 1e-9).unwrap();
        for (a, b) in x.iter().zip(&y) {
            assert!((a - b / 2.0).norm() < 1e-6);
        }
        assert!(ofdm_mmse_equalize(&y, &h[..4], 0.0).is_err());
    }

    #[test]
    fn ber_counting() {
        assert_eq!(ber(&[0, 1, 1], &[0, 1, 1]).unwrap(), 0.0);
        assert_eq!(ber(&[1, 0], &[0, 1]).unwrap(), 1.0);
        let mut a = vec![0u8; 1000];
        for i in 0..5 {
            a[i * 100] = 1;
        }
        assert!((ber(&a, &vec![0u8; 1000]).unwrap() - 0.005).abs() < 1e-12);
        assert!(ber(&[0], &[0, 1]).is_err());
        assert!(ber(&[], &[]).is_err());
    }
}
