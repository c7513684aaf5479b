//! Deterministic artifact writers. Numbers use Rust's shortest round-trip
//! formatting; wall-clock figures only ever go to `timing.json`.

use std::fs;
use std::path::{Path, PathBuf};

use lyochaos::pce::EmpiricalDistribution;
use lyochaos::{Error, Result};
use serde::Serialize;

pub struct OutputDir {
    root: PathBuf,
}

fn io_err(path: &Path, e: impl std::fmt::Display) -> Error {
    Error::Io(format!("{}: {e}", path.display()))
}

impl OutputDir {
    pub fn create(root: &Path) -> Result<Self> {
        fs::create_dir_all(root).map_err(|e| Error::Config(format!("cannot create {}: {e}", root.display())))?;
        Ok(Self { root: root.to_path_buf() })
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.root.join(name)
    }

    /// Writes a CSV with a header row; every row must match the header width.
    pub fn csv(&self, name: &str, header: &[&str], rows: impl IntoIterator<Item = Vec<f64>>) -> Result<()> {
        let path = self.path(name);
        let mut w = csv::Writer::from_path(&path).map_err(|e| io_err(&path, e))?;
        w.write_record(header).map_err(|e| io_err(&path, e))?;
        for row in rows {
            debug_assert_eq!(row.len(), header.len());
            w.write_record(row.iter().map(|v| format_number(*v))).map_err(|e| io_err(&path, e))?;
        }
        w.flush().map_err(|e| io_err(&path, e))
    }

    /// Pretty JSON with a trailing newline.
    pub fn json(&self, name: &str, value: &impl Serialize) -> Result<()> {
        let path = self.path(name);
        let mut text = serde_json::to_string_pretty(value).map_err(|e| io_err(&path, e))?;
        text.push('\n');
        fs::write(&path, text).map_err(|e| io_err(&path, e))
    }

    /// Histogram (density per bin) and a 1001-point quantile table of an
    /// empirical distribution.
    pub fn distribution(&self, stem: &str, unit: &str, dist: &EmpiricalDistribution<f64>) -> Result<()> {
        let h = dist.histogram();
        self.csv(
            &format!("{stem}_histogram.csv"),
            &[&format!("bin_lower_{unit}"), &format!("bin_upper_{unit}"), &format!("density_per_{unit}")],
            h.density.iter().enumerate().map(|(i, &d)| vec![h.edges[i], h.edges[i + 1], d]),
        )?;
        self.csv(
            &format!("{stem}_cdf.csv"),
            &["probability", &format!("value_{unit}")],
            (0..=1000).map(|k| {
                let p = k as f64 / 1000.0;
                vec![p, dist.quantile(p)]
            }),
        )
    }
}

/// Shortest decimal string that parses back to the same `f64`.
pub fn format_number(v: f64) -> String {
    if v.is_nan() {
        "NaN".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        let plain = format!("{v}");
        let sci = format!("{v:e}");
        if sci.len() < plain.len() { sci } else { plain }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_round_trip() {
        for v in [0.0, 1.0, -2.5, 0.1, 1e-7, 1234567.891, 6.02214076e23, f64::MIN_POSITIVE, 295.0] {
            let s = format_number(v);
            assert_eq!(s.parse::<f64>().unwrap(), v, "{s}");
        }
        assert_eq!(format_number(1e-7), "1e-7");
        assert_eq!(format_number(0.25), "0.25");
    }
}
