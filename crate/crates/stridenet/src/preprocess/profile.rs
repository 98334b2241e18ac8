//! Calibration profiles: per-axis affine conversion to physical units plus a
//! signed-permutation axis alignment per foot, loaded from a plain-text
//! `key = value` file.

use std::path::Path;

use crate::error::{invalid, Error, Result};
use crate::kv::parse_kv;
use crate::preprocess::Foot;

/// Per-axis scale and offset: `phys = scale · (raw − offset)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AxisScaleOffset {
    pub scale: [f64; 3],
    pub offset: [f64; 3],
}

impl AxisScaleOffset {
    pub fn identity() -> Self {
        Self { scale: [1.0; 3], offset: [0.0; 3] }
    }

    pub fn apply(&self, v: [f64; 3]) -> [f64; 3] {
        [
            self.scale[0] * (v[0] - self.offset[0]),
            self.scale[1] * (v[1] - self.offset[1]),
            self.scale[2] * (v[2] - self.offset[2]),
        ]
    }
}

/// A signed permutation of the three sensor axes. Each output axis takes the
/// value of exactly one input axis, possibly negated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AxisAlignment {
    rows: [[f64; 3]; 3],
}

impl AxisAlignment {
    pub fn identity() -> Self {
        Self { rows: [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]] }
    }

    /// Validates that `rows` is a signed permutation (one ±1 per row and per
    /// column, zeros elsewhere).
    pub fn from_matrix(rows: [[f64; 3]; 3]) -> Result<Self> {
        let mut col_used = [false; 3];
        for row in &rows {
            let mut hits = 0;
            for (j, &v) in row.iter().enumerate() {
                if v == 0.0 {
                    continue;
                }
                if v != 1.0 && v != -1.0 {
                    return Err(invalid(format!("alignment entry {v} is not 0 or ±1")));
                }
                if col_used[j] {
                    return Err(invalid("alignment reuses an input axis"));
                }
                col_used[j] = true;
                hits += 1;
            }
            if hits != 1 {
                return Err(invalid("each alignment row needs exactly one ±1 entry"));
            }
        }
        Ok(Self { rows })
    }

    /// Parses three whitespace-separated signed axis names, e.g. `x -y z`:
    /// output axis 0 takes input x, output axis 1 takes negated input y, ...
    pub fn parse(spec: &str) -> Result<Self> {
        let tokens: Vec<&str> = spec.split_whitespace().collect();
        if tokens.len() != 3 {
            return Err(invalid(format!("alignment needs 3 axis tokens, got {spec:?}")));
        }
        let mut rows = [[0.0; 3]; 3];
        for (i, token) in tokens.iter().enumerate() {
            let (sign, name) = match token.strip_prefix('-') {
                Some(rest) => (-1.0, rest),
                None => (1.0, token.strip_prefix('+').unwrap_or(token)),
            };
            let j = match name {
                "x" => 0,
                "y" => 1,
                "z" => 2,
                other => return Err(invalid(format!("unknown axis {other:?} in alignment"))),
            };
            rows[i][j] = sign;
        }
        Self::from_matrix(rows)
    }

    /// Renders the alignment in the same token form accepted by [`parse`].
    ///
    /// [`parse`]: AxisAlignment::parse
    pub fn render(&self) -> String {
        let mut tokens = Vec::with_capacity(3);
        for row in &self.rows {
            let j = row.iter().position(|&v| v != 0.0).expect("validated row");
            let name = ["x", "y", "z"][j];
            tokens.push(if row[j] < 0.0 { format!("-{name}") } else { name.to_string() });
        }
        tokens.join(" ")
    }

    pub fn apply(&self, v: [f64; 3]) -> [f64; 3] {
        let dot = |row: &[f64; 3]| row[0] * v[0] + row[1] * v[1] + row[2] * v[2];
        [dot(&self.rows[0]), dot(&self.rows[1]), dot(&self.rows[2])]
    }
}

/// Calibration for one foot's sensor unit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FootCalibration {
    pub accel: AxisScaleOffset,
    pub gyro: AxisScaleOffset,
    pub alignment: AxisAlignment,
}

impl FootCalibration {
    pub fn identity() -> Self {
        Self {
            accel: AxisScaleOffset::identity(),
            gyro: AxisScaleOffset::identity(),
            alignment: AxisAlignment::identity(),
        }
    }
}

/// Calibration for both feet.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CalibrationProfile {
    pub left: FootCalibration,
    pub right: FootCalibration,
}

impl CalibrationProfile {
    /// Unit scale, zero offset, identity alignment: calibration is a no-op.
    pub fn identity() -> Self {
        Self { left: FootCalibration::identity(), right: FootCalibration::identity() }
    }

    pub fn foot(&self, foot: Foot) -> &FootCalibration {
        match foot {
            Foot::Left => &self.left,
            Foot::Right => &self.right,
        }
    }

    pub fn foot_mut(&mut self, foot: Foot) -> &mut FootCalibration {
        match foot {
            Foot::Left => &mut self.left,
            Foot::Right => &mut self.right,
        }
    }

    /// Loads a profile from a `key = value` file with, per foot prefix
    /// `left.`/`right.`: `accel.scale`, `accel.offset`, `gyro.scale`,
    /// `gyro.offset` (three numbers each) and `align` (three signed axis
    /// names). All ten keys are required.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text, path)
    }

    pub fn parse(text: &str, path: &Path) -> Result<Self> {
        let map = parse_kv(text, path)?;
        let field = |key: &str| -> Result<&str> {
            map.get(key).map(String::as_str).ok_or_else(|| Error::Parse {
                path: path.to_path_buf(),
                line: 0,
                msg: format!("missing key {key:?}"),
            })
        };
        let triple = |key: &str| -> Result<[f64; 3]> {
            let raw = field(key)?;
            let parts: Vec<f64> = raw
                .split_whitespace()
                .map(|p| {
                    p.parse::<f64>().map_err(|_| Error::Parse {
                        path: path.to_path_buf(),
                        line: 0,
                        msg: format!("bad number {p:?} in key {key:?}"),
                    })
                })
                .collect::<Result<_>>()?;
            let [a, b, c] = parts[..] else {
                return Err(Error::Parse {
                    path: path.to_path_buf(),
                    line: 0,
                    msg: format!("key {key:?} needs exactly 3 numbers, got {raw:?}"),
                });
            };
            Ok([a, b, c])
        };
        let foot = |prefix: &str| -> Result<FootCalibration> {
            Ok(FootCalibration {
                accel: AxisScaleOffset {
                    scale: triple(&format!("{prefix}.accel.scale"))?,
                    offset: triple(&format!("{prefix}.accel.offset"))?,
                },
                gyro: AxisScaleOffset {
                    scale: triple(&format!("{prefix}.gyro.scale"))?,
                    offset: triple(&format!("{prefix}.gyro.offset"))?,
                },
                alignment: AxisAlignment::parse(field(&format!("{prefix}.align"))?)?,
            })
        };
        Ok(Self { left: foot("left")?, right: foot("right")? })
    }

    /// Renders the profile in the format accepted by [`parse`].
    ///
    /// [`parse`]: CalibrationProfile::parse
    pub fn render(&self) -> String {
        let mut out = String::new();
        let mut emit = |prefix: &str, cal: &FootCalibration| {
            let triple = |v: [f64; 3]| format!("{} {} {}", v[0], v[1], v[2]);
            out.push_str(&format!("{prefix}.accel.scale = {}\n", triple(cal.accel.scale)));
            out.push_str(&format!("{prefix}.accel.offset = {}\n", triple(cal.accel.offset)));
            out.push_str(&format!("{prefix}.gyro.scale = {}\n", triple(cal.gyro.scale)));
            out.push_str(&format!("{prefix}.gyro.offset = {}\n", triple(cal.gyro.offset)));
            out.push_str(&format!("{prefix}.align = {}\n", cal.alignment.render()));
        };
        emit("left", &self.left);
        emit("right", &self.right);
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn alignment_parse_and_apply() {
        let a = AxisAlignment::parse("x -y z").unwrap();
        assert_eq!(a.apply([1.0, 2.0, 3.0]), [1.0, -2.0, 3.0]);
        let swap = AxisAlignment::parse("z x y").unwrap();
        assert_eq!(swap.apply([1.0, 2.0, 3.0]), [3.0, 1.0, 2.0]);
        assert_eq!(AxisAlignment::parse(&swap.render()).unwrap(), swap);
    }

    #[test]
    fn alignment_rejects_non_permutations() {
        assert!(AxisAlignment::parse("x x z").is_err());
        assert!(AxisAlignment::parse("x y").is_err());
        assert!(AxisAlignment::parse("x y w").is_err());
        assert!(AxisAlignment::from_matrix([[0.5, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]])
            .is_err());
        assert!(AxisAlignment::from_matrix([[1.0, 1.0, 0.0], [0.0, 0.0, 1.0], [0.0, 0.0, 0.0]])
            .is_err());
    }

    #[test]
    fn profile_text_round_trip() {
        let mut profile = CalibrationProfile::identity();
        profile.right.alignment = AxisAlignment::parse("x -y z").unwrap();
        profile.left.accel = AxisScaleOffset { scale: [0.25, 0.25, 0.5], offset: [2048.0; 3] };
        let text = profile.render();
        let parsed = CalibrationProfile::parse(&text, Path::new("inline")).unwrap();
        assert_eq!(parsed, profile);
    }

    #[test]
    fn profile_requires_all_keys() {
        let text = "left.accel.scale = 1 1 1\n";
        assert!(CalibrationProfile::parse(text, Path::new("inline")).is_err());
    }

    #[test]
    fn scale_offset_applies_per_axis() {
        let so = AxisScaleOffset { scale: [2.0, 3.0, 4.0], offset: [1.0, 1.0, 1.0] };
        assert_eq!(so.apply([2.0, 2.0, 2.0]), [2.0, 3.0, 4.0]);
    }
}
