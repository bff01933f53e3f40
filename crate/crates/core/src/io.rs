//! File formats: scene CSV, CSI JSON export, interleaved-f32 IQ capture
//! with a JSON sidecar, and PGM image previews.

use crate::channel::Scene;
use crate::error::{Error, Result};
use crate::sensing::EstimatedCSI;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::fs;
use std::io::Write as _;
use std::path::Path;

/// Sidecar metadata stored next to a binary IQ capture.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IqSidecar {
    /// Number of complex samples.
    pub samples: usize,
    /// Sample rate in Hz.
    pub sample_rate: f64,
    /// Cyclic prefix length in samples (0 when absent).
    pub cp_len: usize,
    /// Free-form description of the capture.
    pub description: String,
    /// Master seed of the run that produced the capture.
    pub seed: u64,
}

/// Writes complex samples as interleaved little-endian f32 (I, Q, I, Q, …)
/// plus a `.json` sidecar next to the data file.
pub fn write_iq(path: &Path, samples: &[Complex64], sidecar: &IqSidecar) -> Result<()> {
    let mut bytes = Vec::with_capacity(samples.len() * 8);
    for v in samples {
        bytes.extend_from_slice(&(v.re as f32).to_le_bytes());
        bytes.extend_from_slice(&(v.im as f32).to_le_bytes());
    }
    fs::write(path, &bytes)?;
    let meta = serde_json::to_string_pretty(sidecar)
        .map_err(|e| Error::Parse(format!("sidecar: {e}")))?;
    fs::write(path.with_extension("json"), meta)?;
    Ok(())
}

/// Reads an interleaved-f32 IQ capture.
pub fn read_iq(path: &Path) -> Result<Vec<Complex64>> {
    let bytes = fs::read(path)?;
    if bytes.len() % 8 != 0 {
        return Err(Error::Parse("IQ file length is not a multiple of 8".into()));
    }
    Ok(bytes
        .chunks_exact(8)
        .map(|c| {
            let re = f32::from_le_bytes([c[0], c[1], c[2], c[3]]) as f64;
            let im = f32::from_le_bytes([c[4], c[5], c[6], c[7]]) as f64;
            Complex64::new(re, im)
        })
        .collect())
}

/// Parses a scene CSV with header `cell_index,rcs_G_q` or
/// `slant_range_m,rcs_G_q`.
///
/// Cell indices are placed on the `first_range + q * range_res` lattice;
/// explicit slant ranges are snapped to the nearest cell.
pub fn parse_scene_csv(text: &str, first_range: f64, range_res: f64, cells: usize) -> Result<Scene> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = lines
        .next()
        .ok_or_else(|| Error::Parse("empty scene file".into()))?
        .trim()
        .to_ascii_lowercase();
    let by_range = match header.as_str() {
        "cell_index,rcs_g_q" => false,
        "slant_range_m,rcs_g_q" => true,
        other => {
            return Err(Error::Parse(format!(
                "unknown scene header `{other}` (expected cell_index,rcs_G_q or slant_range_m,rcs_G_q)"
            )))
        }
    };
    let mut rcs = vec![0.0f64; cells];
    for (lineno, line) in lines.enumerate() {
        let mut parts = line.trim().split(',');
        let (a, b) = (parts.next(), parts.next());
        let (a, b) = match (a, b, parts.next()) {
            (Some(a), Some(b), None) => (a, b),
            _ => return Err(Error::Parse(format!("scene line {}: need 2 columns", lineno + 2))),
        };
        let key: f64 = a
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("scene line {}: bad index/range", lineno + 2)))?;
        let value: f64 = b
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("scene line {}: bad RCS", lineno + 2)))?;
        if value < 0.0 {
            return Err(Error::Parse(format!("scene line {}: negative RCS", lineno + 2)));
        }
        let q = if by_range {
            ((key - first_range) / range_res).round()
        } else {
            key
        };
        if q < 0.0 || q as usize >= cells || (!by_range && q.fract() != 0.0) {
            return Err(Error::Parse(format!(
                "scene line {}: cell {q} outside 0..{cells}",
                lineno + 2
            )));
        }
        rcs[q as usize] += value;
    }
    Ok(Scene::from_cells(first_range, range_res, rcs))
}

/// Reads a scene CSV file.
pub fn read_scene_csv(path: &Path, first_range: f64, range_res: f64, cells: usize) -> Result<Scene> {
    parse_scene_csv(&fs::read_to_string(path)?, first_range, range_res, cells)
}

/// Writes a scene back out in the `cell_index,rcs_G_q` form.
pub fn write_scene_csv(path: &Path, scene: &Scene) -> Result<()> {
    let mut out = String::from("cell_index,rcs_G_q\n");
    for (q, g) in scene.rcs.iter().enumerate() {
        out.push_str(&format!("{q},{g}\n"));
    }
    fs::write(path, out)?;
    Ok(())
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct CsiTap {
    l: usize,
    k: usize,
    re: f64,
    im: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct CsiExport {
    taps: Vec<CsiTap>,
    noise_var: f64,
}

/// Serializes sensed CSI as JSON: every nonzero tap as `(l, k, re, im)`
/// plus the improved noise variance.
pub fn csi_to_json(csi: &EstimatedCSI, tap_floor: f64) -> Result<String> {
    let taps = csi
        .columns
        .iter()
        .enumerate()
        .flat_map(|(k, col)| {
            col.iter().enumerate().filter_map(move |(l, v)| {
                (v.norm() > tap_floor).then_some(CsiTap {
                    l,
                    k,
                    re: v.re,
                    im: v.im,
                })
            })
        })
        .collect();
    serde_json::to_string_pretty(&CsiExport {
        taps,
        noise_var: csi.noise_var,
    })
    .map_err(|e| Error::Parse(format!("CSI export: {e}")))
}

/// Writes the CSI JSON export to a file.
pub fn write_csi_json(path: &Path, csi: &EstimatedCSI, tap_floor: f64) -> Result<()> {
    fs::write(path, csi_to_json(csi, tap_floor)?)?;
    Ok(())
}

/// Writes a magnitude matrix as a binary (P5) PGM preview, normalized to
/// the global peak.
pub fn write_pgm(path: &Path, rows: &[Vec<f64>]) -> Result<()> {
    let height = rows.len();
    let width = rows.first().map_or(0, Vec::len);
    if height == 0 || width == 0 {
        return Err(Error::arg("empty image"));
    }
    if rows.iter().any(|r| r.len() != width) {
        return Err(Error::dim("ragged image rows"));
    }
    let peak = rows
        .iter()
        .flatten()
        .fold(0.0f64, |a, &b| a.max(b));
    let mut file = fs::File::create(path)?;
    write!(file, "P5\n{width} {height}\n255\n")?;
    let mut pixels = Vec::with_capacity(width * height);
    for row in rows {
        for &v in row {
            let p = if peak > 0.0 { (v / peak * 255.0).round() as u8 } else { 0 };
            pixels.push(p);
        }
    }
    file.write_all(&pixels)?;
    Ok(())
}
