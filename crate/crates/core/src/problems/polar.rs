//! Airfoil polar tables: `(alpha_deg, cl, cd)` rows with linear interpolation.
//!
//! File format: plain-text CSV with header `alpha_deg,cl,cd`; blank lines and lines
//! starting with `#` are ignored.

use std::path::Path;

use crate::error::{MoropError, Result};

/// Built-in S809 polar at Re ~ 1e6, extended to the full angle range.
const S809_CSV: &str = include_str!("../../data/s809.csv");

const MIN_COVERAGE: (f64, f64) = (-10.0, 25.0);

#[derive(Debug, Clone, PartialEq)]
pub struct PolarTable {
    alpha: Vec<f64>,
    cl: Vec<f64>,
    cd: Vec<f64>,
}

impl PolarTable {
    /// Validates and sorts rows. Requires strictly increasing angles after sorting,
    /// `cd >= 0`, and coverage of at least [-10, 25] degrees.
    pub fn new(mut rows: Vec<(f64, f64, f64)>) -> Result<Self> {
        if let Some(r) = rows.iter().find(|r| !(r.0.is_finite() && r.1.is_finite() && r.2.is_finite())) {
            return Err(MoropError::MalformedPolar(format!("non-finite row {r:?}")));
        }
        if let Some(r) = rows.iter().find(|r| r.2 < 0.0) {
            return Err(MoropError::MalformedPolar(format!("negative drag coefficient in row {r:?}")));
        }
        rows.sort_by(|a, b| a.0.total_cmp(&b.0));
        if let Some(w) = rows.windows(2).find(|w| w[0].0 >= w[1].0) {
            return Err(MoropError::MalformedPolar(format!(
                "angle of attack {} appears more than once",
                w[0].0
            )));
        }
        let table = Self {
            alpha: rows.iter().map(|r| r.0).collect(),
            cl: rows.iter().map(|r| r.1).collect(),
            cd: rows.iter().map(|r| r.2).collect(),
        };
        let (lo, hi) = table.range();
        if table.alpha.len() < 2 || lo > MIN_COVERAGE.0 || hi < MIN_COVERAGE.1 {
            return Err(MoropError::MalformedPolar(format!(
                "table covers [{lo}, {hi}] deg; need at least [{}, {}]",
                MIN_COVERAGE.0, MIN_COVERAGE.1
            )));
        }
        Ok(table)
    }

    /// Builds a table without the minimum-coverage requirement, for narrow test polars.
    pub fn new_unchecked_range(mut rows: Vec<(f64, f64, f64)>) -> Result<Self> {
        rows.sort_by(|a, b| a.0.total_cmp(&b.0));
        if rows.len() < 2 || rows.windows(2).any(|w| w[0].0 >= w[1].0) || rows.iter().any(|r| r.2 < 0.0) {
            return Err(MoropError::MalformedPolar("need >= 2 rows, distinct angles, cd >= 0".into()));
        }
        Ok(Self {
            alpha: rows.iter().map(|r| r.0).collect(),
            cl: rows.iter().map(|r| r.1).collect(),
            cd: rows.iter().map(|r| r.2).collect(),
        })
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut rows = Vec::new();
        let mut header_seen = false;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if !header_seen {
                let cols: Vec<&str> = line.split(',').map(str::trim).collect();
                if cols != ["alpha_deg", "cl", "cd"] {
                    return Err(MoropError::MalformedPolar(format!(
                        "line {}: expected header 'alpha_deg,cl,cd', found '{line}'",
                        lineno + 1
                    )));
                }
                header_seen = true;
                continue;
            }
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            if fields.len() != 3 {
                return Err(MoropError::MalformedPolar(format!(
                    "line {}: expected 3 fields, found {}",
                    lineno + 1,
                    fields.len()
                )));
            }
            let parse = |s: &str| {
                s.parse::<f64>().map_err(|_| {
                    MoropError::MalformedPolar(format!("line {}: '{s}' is not a number", lineno + 1))
                })
            };
            rows.push((parse(fields[0])?, parse(fields[1])?, parse(fields[2])?));
        }
        if !header_seen {
            return Err(MoropError::MalformedPolar("missing header".into()));
        }
        Self::new(rows)
    }

    pub fn s809() -> Self {
        Self::parse(S809_CSV).expect("bundled S809 polar is valid")
    }

    pub fn range(&self) -> (f64, f64) {
        (
            self.alpha.first().copied().unwrap_or(f64::NAN),
            self.alpha.last().copied().unwrap_or(f64::NAN),
        )
    }

    pub fn rows(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        self.alpha
            .iter()
            .zip(&self.cl)
            .zip(&self.cd)
            .map(|((&a, &l), &d)| (a, l, d))
    }

    /// `(cl, cd)` at `alpha_deg`, linearly interpolated.
    pub fn coefficients(&self, alpha_deg: f64) -> Result<(f64, f64)> {
        let (lo, hi) = self.range();
        if !(alpha_deg >= lo && alpha_deg <= hi) {
            return Err(MoropError::PolarOutOfRange { alpha_deg, min: lo, max: hi });
        }
        let k = self.alpha.partition_point(|&a| a <= alpha_deg);
        if k == 0 {
            return Ok((self.cl[0], self.cd[0]));
        }
        let i = k - 1;
        if i + 1 == self.alpha.len() || self.alpha[i] == alpha_deg {
            return Ok((self.cl[i], self.cd[i]));
        }
        let t = (alpha_deg - self.alpha[i]) / (self.alpha[i + 1] - self.alpha[i]);
        Ok((
            self.cl[i] + t * (self.cl[i + 1] - self.cl[i]),
            self.cd[i] + t * (self.cd[i + 1] - self.cd[i]),
        ))
    }
}

pub fn load_polar(path: impl AsRef<Path>) -> Result<PolarTable> {
    let text = std::fs::read_to_string(path.as_ref()).map_err(|e| {
        MoropError::Io(format!("reading polar {}: {e}", path.as_ref().display()))
    })?;
    PolarTable::parse(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_row_interpolation() {
        let t = PolarTable::new_unchecked_range(vec![(0.0, 0.0, 0.01), (10.0, 1.0, 0.03)]).unwrap();
        let (cl, cd) = t.coefficients(5.0).unwrap();
        assert!((cl - 0.5).abs() < 1e-15);
        assert!((cd - 0.02).abs() < 1e-15);
    }

    #[test]
    fn exact_rows_returned() {
        let t = PolarTable::s809();
        for (a, cl, cd) in t.rows().collect::<Vec<_>>() {
            assert_eq!(t.coefficients(a).unwrap(), (cl, cd));
        }
    }

    #[test]
    fn out_of_range_query() {
        let t = PolarTable::new_unchecked_range(vec![(0.0, 0.0, 0.01), (10.0, 1.0, 0.03)]).unwrap();
        assert_eq!(t.coefficients(10.5).unwrap_err().kind(), "polar-out-of-range");
        assert!(t.coefficients(-0.1).is_err());
        assert!(t.coefficients(f64::NAN).is_err());
    }

    #[test]
    fn parse_with_comments() {
        let text = "# comment\nalpha_deg,cl,cd\n-10,-0.5,0.02\n\n# mid\n0,0.1,0.01\n25,1.0,0.3\n";
        let t = PolarTable::parse(text).unwrap();
        assert_eq!(t.range(), (-10.0, 25.0));
    }

    #[test]
    fn parse_errors() {
        assert_eq!(PolarTable::parse("a,b,c\n1,2,3\n").unwrap_err().kind(), "malformed-polar");
        assert!(PolarTable::parse("alpha_deg,cl,cd\n-10,0.1\n").is_err());
        assert!(PolarTable::parse("alpha_deg,cl,cd\n-10,x,0.1\n").is_err());
        // duplicate angle
        assert!(PolarTable::parse("alpha_deg,cl,cd\n-10,0,0.1\n-10,0,0.1\n25,1,0.1\n").is_err());
        // insufficient range
        assert!(PolarTable::parse("alpha_deg,cl,cd\n-5,0,0.1\n25,1,0.1\n").is_err());
        // negative drag
        assert!(PolarTable::parse("alpha_deg,cl,cd\n-10,0,-0.1\n25,1,0.1\n").is_err());
        assert!(PolarTable::parse("").is_err());
    }

    #[test]
    fn unsorted_rows_are_sorted() {
        let t = PolarTable::new(vec![(25.0, 1.0, 0.3), (-10.0, -0.5, 0.02), (0.0, 0.1, 0.01)]).unwrap();
        assert_eq!(t.range(), (-10.0, 25.0));
        assert!((t.coefficients(-5.0).unwrap().0 - (-0.2)).abs() < 1e-12);
    }

    #[test]
    fn bundled_s809_covers_full_circle() {
        let t = PolarTable::s809();
        assert_eq!(t.range(), (-180.0, 180.0));
        assert!(t.rows().all(|(_, _, cd)| cd >= 0.0));
    }

    #[test]
    fn load_from_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("p.csv");
        std::fs::write(&path, S809_CSV).unwrap();
        assert_eq!(load_polar(&path).unwrap(), PolarTable::s809());
        assert_eq!(load_polar(dir.path().join("missing.csv")).unwrap_err().kind(), "io");
    }
}
