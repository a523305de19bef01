//! Point models for the benchmark.

use std::io::BufRead;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use vocra::Vec3F64;

use crate::error::{BenchError, BenchResult};

/// Seed of the built-in surface sample.
pub const SURFACE_SEED: u64 = 0x5E_ED0F_5EED;

/// `n` points on a closed star-shaped surface with lobes and ridges of
/// several frequencies, fitted into the `[-0.5, 0.5]³` cube.
///
/// Sampling is uniform in the surface parameters, so the density varies over
/// the surface like a real scan does. The output depends only on `n`.
pub fn synthetic_surface(n: usize) -> Vec<Vec3F64> {
    let mut rng = ChaCha8Rng::seed_from_u64(SURFACE_SEED);
    let points = (0..n)
        .map(|_| {
            let u: f64 = rng.random::<f64>() * std::f64::consts::TAU;
            let z: f64 = rng.random::<f64>() * 2.0 - 1.0;
            let v = z.acos();
            let r = 1.0
                + 0.30 * (3.0 * u).sin() * v.sin().powi(2)
                + 0.15 * (4.0 * v).cos()
                + 0.10 * (5.0 * u + 2.0 * v).sin();
            Vec3F64::new(
                1.2 * r * v.sin() * u.cos(),
                0.8 * r * v.sin() * u.sin(),
                r * v.cos(),
            )
        })
        .collect();
    fit_unit_cube(points)
}

/// Translates the bounding box center to the origin and scales the longest
/// side to 1.
pub fn fit_unit_cube(mut points: Vec<Vec3F64>) -> Vec<Vec3F64> {
    if points.is_empty() {
        return points;
    }
    let mut lo = points[0];
    let mut hi = points[0];
    for p in &points {
        lo = lo.inf(p);
        hi = hi.sup(p);
    }
    let center = (lo + hi) / 2.0;
    let extent = (hi - lo).max();
    let scale = if extent > 0.0 { 1.0 / extent } else { 1.0 };
    for p in &mut points {
        *p = (*p - center) * scale;
    }
    points
}

/// Reads `x y z` per line; `#` lines and blank lines are skipped and extra
/// columns (normals, colors) are ignored.
pub fn load_xyz(path: &Path) -> BenchResult<Vec<Vec3F64>> {
    let file = std::fs::File::open(path)?;
    parse_xyz(std::io::BufReader::new(file))
}

pub fn parse_xyz<R: BufRead>(reader: R) -> BenchResult<Vec<Vec3F64>> {
    let mut points = Vec::new();
    for (k, line) in reader.lines().enumerate() {
        let line = line?;
        let text = line.trim();
        if text.is_empty() || text.starts_with('#') {
            continue;
        }
        let parse_err = |message: String| BenchError::Parse { line: k + 1, message };
        let mut xyz = [0.0; 3];
        let mut fields = text.split_whitespace();
        for slot in &mut xyz {
            let f = fields.next().ok_or_else(|| parse_err("expected 3 coordinates".into()))?;
            *slot = f
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| parse_err(format!("invalid coordinate `{f}`")))?;
        }
        points.push(Vec3F64::new(xyz[0], xyz[1], xyz[2]));
    }
    Ok(points)
}
