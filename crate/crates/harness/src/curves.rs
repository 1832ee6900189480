//! Theory-curve sweeps over an alpha grid.

use std::fs;
use std::path::{Path, PathBuf};

use fdrfnr::{default_grid, fnr_star_curve, gaussian_parametric, LfdrLaw, Split};

use crate::error::{runtime, Result};
use crate::spec::ModelSpec;

pub const SCHEMA_LINE: &str = "# schema=1";
pub const CURVE_COLUMNS: [&str; 6] = ["alpha", "mfnr_star", "fnr_star", "alpha1", "alpha2", "p_mix"];
pub const PARAMETRIC_COLUMNS: [&str; 3] = ["z", "mfdr", "mfnr"];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurveRow {
    pub alpha: f64,
    pub mfnr_star: f64,
    pub fnr_star: f64,
    pub split: Split<f64>,
}

/// `mFNR*`, `FNR*` and the oracle split at each alpha.
pub fn run_curves(model: &ModelSpec, alphas: &[f64]) -> Result<Vec<CurveRow>> {
    let law = LfdrLaw::from_model(&model.model).map_err(runtime)?;
    let mut grid: Vec<f64> = default_grid();
    grid.extend_from_slice(alphas);
    let curve = fnr_star_curve(&law, &grid).map_err(runtime)?;
    alphas
        .iter()
        .map(|a| {
            let split = if *a > 0.0 && *a < 1.0 {
                curve.split(&law, *a).map_err(runtime)?
            } else {
                Split {
                    alpha1: *a,
                    alpha2: *a,
                    p: 1.0,
                }
            };
            Ok(CurveRow {
                alpha: *a,
                mfnr_star: law.mfnr_star(*a),
                fnr_star: curve.fnr_at(*a).map_err(runtime)?,
                split,
            })
        })
        .collect()
}

fn csv_bytes(model: &ModelSpec, header: &[&str], rows: impl Iterator<Item = Vec<String>>) -> Result<Vec<u8>> {
    let mut out = format!("{SCHEMA_LINE}\n# model={}\n", model.label()).into_bytes();
    {
        let mut w = csv::Writer::from_writer(&mut out);
        w.write_record(header)?;
        for r in rows {
            w.write_record(&r)?;
        }
        w.flush()?;
    }
    Ok(out)
}

pub fn curves_csv(model: &ModelSpec, rows: &[CurveRow]) -> Result<Vec<u8>> {
    csv_bytes(
        model,
        &CURVE_COLUMNS,
        rows.iter().map(|r| {
            [r.alpha, r.mfnr_star, r.fnr_star, r.split.alpha1, r.split.alpha2, r.split.p]
                .iter()
                .map(|v| v.to_string())
                .collect()
        }),
    )
}

/// Path of the parametric-curve file written next to `out`.
pub fn parametric_path(out: &Path) -> PathBuf {
    let stem = out.file_stem().map_or("curves".into(), |s| s.to_string_lossy().into_owned());
    out.with_file_name(format!("{stem}_parametric.csv"))
}

/// Rejection thresholds traced for the closed-form Gaussian curve.
pub fn parametric_z_grid(mu: f64) -> Vec<f64> {
    let hi = mu.abs() + 8.0;
    let steps = ((hi + 8.0) / 0.01).round() as usize;
    (0..=steps).map(|i| -8.0 + i as f64 * 0.01).collect()
}

/// Writes the curve CSV, plus the parametric sibling for Gaussian models.
/// Returns the paths written.
pub fn write_curves(model: &ModelSpec, alphas: &[f64], out: &Path) -> Result<Vec<PathBuf>> {
    let rows = run_curves(model, alphas)?;
    let main = curves_csv(model, &rows)?;
    let mut written = vec![out.to_path_buf()];
    let sibling = match model.mu() {
        Some(mu) => {
            let z = parametric_z_grid(mu);
            let pts = gaussian_parametric(mu, model.pi0, &z);
            let bytes = csv_bytes(
                model,
                &PARAMETRIC_COLUMNS,
                z.iter()
                    .zip(pts)
                    .map(|(z, (x, y))| vec![z.to_string(), x.to_string(), y.to_string()]),
            )?;
            Some((parametric_path(out), bytes))
        }
        None => None,
    };
    fs::write(out, main)?;
    if let Some((path, bytes)) = sibling {
        fs::write(&path, bytes)?;
        written.push(path);
    }
    Ok(written)
}
