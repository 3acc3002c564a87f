//! Sweep-grid specifications, parsed from `start:stop:count[:log]`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// A one-dimensional parameter grid.
///
/// `count == 1` degenerates to the single point `start`. Log grids are
/// geometric and require strictly positive endpoints.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
    #[serde(default)]
    pub log: bool,
}

impl GridSpec {
    pub fn linear(start: f64, stop: f64, count: usize) -> Self {
        GridSpec { start, stop, count, log: false }
    }

    pub fn logarithmic(start: f64, stop: f64, count: usize) -> Self {
        GridSpec { start, stop, count, log: true }
    }

    pub fn validate(&self) -> Result<()> {
        if !self.start.is_finite() || !self.stop.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "grid endpoints must be finite, got {}:{}",
                self.start, self.stop
            )));
        }
        if self.count == 0 {
            return Err(Error::InvalidArgument(
                "grid count must be at least 1; an empty grid is not a run".into(),
            ));
        }
        if self.log && (self.start <= 0.0 || self.stop <= 0.0) {
            return Err(Error::InvalidArgument(format!(
                "log grids need positive endpoints, got {}:{}",
                self.start, self.stop
            )));
        }
        if self.count > 1 && self.start == self.stop {
            return Err(Error::InvalidArgument(format!(
                "grid with {} points needs distinct endpoints",
                self.count
            )));
        }
        Ok(())
    }

    /// Materializes the grid. Endpoints are reproduced exactly.
    pub fn values(&self) -> Result<Vec<f64>> {
        self.validate()?;
        if self.count == 1 {
            return Ok(vec![self.start]);
        }
        let n = self.count;
        let mut out = Vec::with_capacity(n);
        if self.log {
            let la = self.start.ln();
            let lb = self.stop.ln();
            for i in 0..n {
                let t = i as f64 / (n - 1) as f64;
                out.push((la + t * (lb - la)).exp());
            }
        } else {
            for i in 0..n {
                let t = i as f64 / (n - 1) as f64;
                out.push(self.start + t * (self.stop - self.start));
            }
        }
        // Guard against round-off at the far endpoint so sweeps close exactly
        // on the requested boundary value.
        out[0] = self.start;
        out[n - 1] = self.stop;
        Ok(out)
    }
}

impl fmt::Display for GridSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.start, self.stop, self.count)?;
        if self.log {
            write!(f, ":log")?;
        }
        Ok(())
    }
}

impl FromStr for GridSpec {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() < 3 || parts.len() > 4 {
            return Err(format!(
                "expected start:stop:count[:log], got {s:?}"
            ));
        }
        let start: f64 = parts[0]
            .parse()
            .map_err(|_| format!("bad grid start {:?}", parts[0]))?;
        let stop: f64 = parts[1]
            .parse()
            .map_err(|_| format!("bad grid stop {:?}", parts[1]))?;
        let count: usize = parts[2]
            .parse()
            .map_err(|_| format!("bad grid count {:?}", parts[2]))?;
        let log = match parts.get(3) {
            None => false,
            Some(&"log") => true,
            Some(other) => {
                return Err(format!(
                    "unknown grid scale {other:?}; only `log` is recognized"
                ))
            }
        };
        let spec = GridSpec { start, stop, count, log };
        spec.validate().map_err(|e| e.to_string())?;
        Ok(spec)
    }
}
