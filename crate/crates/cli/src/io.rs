//! Correspondence files and ground-truth sidecars.
//!
//! A correspondence file holds one pair per line as six decimals
//! `px py pz qx qy qz`; lines starting with `#` and blank lines are skipped.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};
use vocra::{CorrespondenceSetF64, RigidTransformF64, RotationMatrixF64, Vec3F64};

use crate::error::{CliError, CliResult};

pub fn parse_correspondences(text: &str, path: &Path) -> CliResult<(Vec<Vec3F64>, Vec<Vec3F64>)> {
    let mut p = Vec::new();
    let mut q = Vec::new();
    for (k, line) in text.lines().enumerate() {
        let body = line.trim();
        if body.is_empty() || body.starts_with('#') {
            continue;
        }
        let err = |message: String| CliError::Parse {
            path: path.to_path_buf(),
            line: k + 1,
            message,
        };
        let fields: Vec<&str> = body.split_whitespace().collect();
        if fields.len() != 6 {
            return Err(err(format!("expected 6 numbers, found {}", fields.len())));
        }
        let mut v = [0.0; 6];
        for (slot, f) in v.iter_mut().zip(&fields) {
            *slot = f
                .parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .ok_or_else(|| err(format!("invalid number `{f}`")))?;
        }
        p.push(Vec3F64::new(v[0], v[1], v[2]));
        q.push(Vec3F64::new(v[3], v[4], v[5]));
    }
    Ok((p, q))
}

pub fn read_correspondences(path: &Path, sigma: f64) -> CliResult<CorrespondenceSetF64> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let (p, q) = parse_correspondences(&text, path)?;
    Ok(CorrespondenceSetF64::new(p, q, sigma)?)
}

/// Shortest round-trip decimals, so reading the file back is lossless.
pub fn format_correspondences(set: &CorrespondenceSetF64, header: &str) -> String {
    let mut out = String::new();
    for line in header.lines() {
        let _ = writeln!(out, "# {line}");
    }
    for (p, q) in set.points_p().iter().zip(set.points_q()) {
        let _ = writeln!(out, "{} {} {} {} {} {}", p.x, p.y, p.z, q.x, q.y, q.z);
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroundTruth {
    /// Row-major.
    pub rotation: [f64; 9],
    pub translation: [f64; 3],
    pub inliers: Vec<usize>,
}

impl GroundTruth {
    pub fn new(transform: &RigidTransformF64, inliers: Vec<usize>) -> Self {
        let t = transform.translation;
        Self {
            rotation: transform.rotation.to_row_array(),
            translation: [t.x, t.y, t.z],
            inliers,
        }
    }

    pub fn transform(&self) -> CliResult<RigidTransformF64> {
        let rotation = RotationMatrixF64::from_row_slice(&self.rotation)
            .map_err(|e| CliError::Invalid(format!("ground-truth rotation: {e}")))?;
        let t = self.translation;
        Ok(RigidTransformF64::new(rotation, Vec3F64::new(t[0], t[1], t[2])))
    }

    pub fn read(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| CliError::Parse {
            path: path.to_path_buf(),
            line: e.line(),
            message: e.to_string(),
        })
    }
}

pub fn write_text(path: &Path, text: &str) -> CliResult<()> {
    std::fs::write(path, text).map_err(|e| CliError::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_reports_line_numbers() {
        let path = Path::new("in.txt");
        let (p, q) = parse_correspondences("# c\n\n0 0 0 1 1 1\n  1 2 3 4 5 6  \n", path).unwrap();
        assert_eq!(p.len(), 2);
        assert_eq!(q[1], Vec3F64::new(4.0, 5.0, 6.0));
        let bad = "0 0 0 1 1 1\n".repeat(16) + "0 0 0 1 1\n";
        match parse_correspondences(&bad, path) {
            Err(CliError::Parse { line, .. }) => assert_eq!(line, 17),
            other => panic!("{other:?}"),
        }
        assert!(parse_correspondences("0 0 0 1 1 nan\n", path).is_err());
        assert!(parse_correspondences("0 0 0 1 1 x\n", path).is_err());
    }

    #[test]
    fn format_round_trips_exactly() {
        let p = vec![Vec3F64::new(0.1 + 0.2, -1e-17, 3.0), Vec3F64::new(1.0 / 3.0, 2.0, -0.5)];
        let q = vec![Vec3F64::new(1e300, 0.0, -2.5), Vec3F64::new(7.0, 8.0, 9.0)];
        let set = CorrespondenceSetF64::new(p, q, 0.01).unwrap();
        let text = format_correspondences(&set, "two pairs");
        assert!(text.starts_with("# two pairs\n"));
        let (p2, q2) = parse_correspondences(&text, Path::new("x")).unwrap();
        assert_eq!(p2, set.points_p());
        assert_eq!(q2, set.points_q());
    }

    #[test]
    fn ground_truth_round_trip() {
        let t = RigidTransformF64::new(RotationMatrixF64::from_axis_angle(&Vec3F64::z(), 0.3), Vec3F64::new(1.0, 2.0, 3.0));
        let gt = GroundTruth::new(&t, vec![0, 4]);
        let back: GroundTruth = serde_json::from_str(&serde_json::to_string(&gt).unwrap()).unwrap();
        assert_eq!(back.transform().unwrap(), t);
        assert_eq!(back.inliers, vec![0, 4]);
    }
}
