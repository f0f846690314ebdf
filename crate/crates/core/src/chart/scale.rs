//! Position and size scales mapping data values into normalized units.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum ScaleKind {
    #[default]
    Linear,
    Log10,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum ScaleError {
    #[error("log10 scale applied to non-positive value")]
    NonPositiveLogInput,
}

/// A continuous axis scale onto `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AxisScale {
    pub kind: ScaleKind,
    pub domain: [f64; 2],
}

impl AxisScale {
    pub fn linear(d0: f64, d1: f64) -> Self {
        Self {
            kind: ScaleKind::Linear,
            domain: [d0, d1],
        }
    }

    pub fn log10(d0: f64, d1: f64) -> Self {
        Self {
            kind: ScaleKind::Log10,
            domain: [d0, d1],
        }
    }

    pub fn apply(&self, v: f64) -> Result<f64, ScaleError> {
        let [d0, d1] = self.domain;
        let t = match self.kind {
            ScaleKind::Linear => ratio(v - d0, d1 - d0),
            ScaleKind::Log10 => {
                if v <= 0.0 {
                    return Err(ScaleError::NonPositiveLogInput);
                }
                ratio(v.log10() - d0.log10(), d1.log10() - d0.log10())
            }
        };
        Ok(t.clamp(0.0, 1.0))
    }

    /// Like [`apply`](Self::apply) but maps non-positive log inputs to 0.
    pub fn apply_or_floor(&self, v: f64) -> f64 {
        self.apply(v).unwrap_or(0.0)
    }

    /// Evenly spaced ticks for linear scales, decades for log scales.
    pub fn ticks(&self, count: usize) -> Vec<f64> {
        let [d0, d1] = self.domain;
        match self.kind {
            ScaleKind::Linear => {
                if count < 2 {
                    return vec![d0];
                }
                (0..count)
                    .map(|i| d0 + (d1 - d0) * i as f64 / (count - 1) as f64)
                    .collect()
            }
            ScaleKind::Log10 => {
                let (lo, hi) = (d0.min(d1), d0.max(d1));
                let mut out = Vec::new();
                let mut e = lo.log10().ceil() as i32;
                while 10f64.powi(e) <= hi * (1.0 + 1e-12) {
                    out.push(10f64.powi(e));
                    e += 1;
                }
                out
            }
        }
    }
}

fn ratio(num: f64, den: f64) -> f64 {
    if den == 0.0 {
        0.0
    } else {
        num / den
    }
}

/// Square-root area scale producing mark radii in `[0, max_radius]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SizeScale {
    pub domain: [f64; 2],
    pub max_radius: f64,
}

impl SizeScale {
    pub fn apply(&self, v: f64) -> f64 {
        let [d0, d1] = self.domain;
        let t = ratio(v - d0, d1 - d0).clamp(0.0, 1.0);
        self.max_radius * t.sqrt()
    }
}

/// Short stable label for a tick value.
pub fn tick_label(v: f64) -> String {
    if v.abs() >= 1e4 && (v / 1e3).fract() == 0.0 {
        format!("{}k", v / 1e3)
    } else if v.fract() == 0.0 {
        format!("{v:.0}")
    } else {
        let s = format!("{v:.2}");
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    }
}
