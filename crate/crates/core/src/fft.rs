//! Unitary DFT helpers on top of rustfft, with a per-thread transform
//! counter used by the complexity-accounting tests.
//!
//! All transforms here are normalized by `1/sqrt(n)` so that forward and
//! inverse are exact adjoints (Parseval holds without extra factors).

use num_complex::Complex64;
use rustfft::{Fft, FftDirection, FftPlanner};
use std::cell::{Cell, RefCell};
use std::collections::HashMap;
use std::sync::Arc;

thread_local! {
    static PLANS: RefCell<HashMap<(usize, bool), Arc<dyn Fft<f64>>>> =
        RefCell::new(HashMap::new());
    static COUNT: Cell<u64> = Cell::new(0);
}

fn plan(n: usize, inverse: bool) -> Arc<dyn Fft<f64>> {
    PLANS.with(|p| {
        p.borrow_mut()
            .entry((n, inverse))
            .or_insert_with(|| {
                let dir = if inverse {
                    FftDirection::Inverse
                } else {
                    FftDirection::Forward
                };
                FftPlanner::new().plan_fft(n, dir)
            })
            .clone()
    })
}

/// Resets the per-thread transform counter.
pub fn reset_transform_count() {
    COUNT.with(|c| c.set(0));
}

/// Number of DFTs executed on this thread since the last reset.
pub fn transform_count() -> u64 {
    COUNT.with(|c| c.get())
}

fn bump() {
    COUNT.with(|c| c.set(c.get() + 1));
}

/// In-place unitary forward DFT.
pub fn dft_in_place(buf: &mut [Complex64]) {
    let n = buf.len();
    plan(n, false).process(buf);
    let s = 1.0 / (n as f64).sqrt();
    for v in buf.iter_mut() {
        *v *= s;
    }
    bump();
}

/// In-place unitary inverse DFT.
pub fn idft_in_place(buf: &mut [Complex64]) {
    let n = buf.len();
    plan(n, true).process(buf);
    let s = 1.0 / (n as f64).sqrt();
    for v in buf.iter_mut() {
        *v *= s;
    }
    bump();
}

/// Unitary forward DFT of a slice.
pub fn dft(v: &[Complex64]) -> Vec<Complex64> {
    let mut buf = v.to_vec();
    dft_in_place(&mut buf);
    buf
}

/// Unitary inverse DFT of a slice.
pub fn idft(v: &[Complex64]) -> Vec<Complex64> {
    let mut buf = v.to_vec();
    idft_in_place(&mut buf);
    buf
}

/// Raw (unscaled) forward FFT, for convolution work where the caller
/// manages normalization. Still counted.
pub fn fft_raw_in_place(buf: &mut [Complex64]) {
    plan(buf.len(), false).process(buf);
    bump();
}

/// Raw (unscaled) inverse FFT; caller divides by `n`.
pub fn ifft_raw_in_place(buf: &mut [Complex64]) {
    plan(buf.len(), true).process(buf);
    bump();
}

/// Linear convolution of two complex sequences via zero-padded FFTs.
pub fn fft_convolve(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    let out_len = a.len() + b.len() - 1;
    let n = out_len.next_power_of_two();
    let mut fa = vec![Complex64::default(); n];
    let mut fb = vec![Complex64::default(); n];
    fa[..a.len()].copy_from_slice(a);
    fb[..b.len()].copy_from_slice(b);
    fft_raw_in_place(&mut fa);
    fft_raw_in_place(&mut fb);
    for (x, y) in fa.iter_mut().zip(&fb) {
        *x *= y;
    }
    ifft_raw_in_place(&mut fa);
    let s = 1.0 / n as f64;
    fa.truncate(out_len);
    for v in fa.iter_mut() {
        *v *= s;
    }
    fa
}
