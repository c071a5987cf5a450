//! Synthetic series with known ground truth.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::{AR1Params, TimeSeries};
use crate::significance::generate_surrogate;
use crate::time::YearMonth;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SyntheticKind {
    /// `amplitude * cos(2 pi t / period)`.
    Sinusoid,
    /// AR(1) noise only.
    Ar1,
    /// A sinusoid and a copy delayed by `shift` samples.
    ShiftedCopy,
    /// Two AR(1) series sharing a shifted sinusoid inside `coupling_window`.
    CoupledPair,
    /// Sinusoid plus AR(1) noise.
    Sum,
}

/// Parameters for [`generate`]. Also the `[synth]` section of a config file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SyntheticSpec {
    pub kind: SyntheticKind,
    pub len: usize,
    pub start: YearMonth,
    pub period: f64,
    pub amplitude: f64,
    /// Delay of the second series, in samples.
    pub shift: i64,
    /// Half-open sample range `[start, end)` where the pair is coupled.
    pub coupling_window: (usize, usize),
    pub noise_alpha: f64,
    pub noise_sigma: f64,
    pub seed: u64,
}

impl Default for SyntheticSpec {
    fn default() -> Self {
        Self {
            kind: SyntheticKind::CoupledPair,
            len: 304,
            start: YearMonth::new(1997, 1).expect("valid month"),
            period: 16.0,
            amplitude: 1.0,
            shift: 4,
            coupling_window: (150, 200),
            noise_alpha: 0.0,
            noise_sigma: 1.0,
            seed: 1,
        }
    }
}

impl SyntheticSpec {
    pub fn validate(&self) -> Result<()> {
        if self.len < 2 {
            return Err(Error::InvalidParams("synthetic length must be >= 2".into()));
        }
        if self.period.is_nan() || self.period <= 0.0 {
            return Err(Error::InvalidParams("period must be > 0".into()));
        }
        let (a, b) = self.coupling_window;
        if a > b || b > self.len {
            return Err(Error::InvalidParams(format!(
                "coupling window {a}..{b} does not fit in {} samples",
                self.len
            )));
        }
        if self.shift.unsigned_abs() as usize >= self.len {
            return Err(Error::InvalidParams(
                "shift must be shorter than the series".into(),
            ));
        }
        AR1Params::new(self.noise_alpha, self.noise_sigma, 0.0)?;
        Ok(())
    }

    fn noise(&self) -> Result<AR1Params> {
        AR1Params::new(self.noise_alpha, self.noise_sigma, 0.0)
    }
}

pub fn sinusoid(
    name: &str,
    start: YearMonth,
    len: usize,
    period: f64,
    amplitude: f64,
) -> Result<TimeSeries> {
    let values = (0..len)
        .map(|t| amplitude * (2.0 * PI * t as f64 / period).cos())
        .collect();
    TimeSeries::new(name, start, 1, values)
}

/// Returns `(base, delayed)` where `delayed[t] = base[(t - shift) mod N]`.
pub fn make_shifted_pair(base: &TimeSeries, shift: i64) -> Result<(TimeSeries, TimeSeries)> {
    let n = base.len() as i64;
    let v = base.values();
    let delayed: Vec<f64> = (0..n)
        .map(|t| v[(t - shift).rem_euclid(n) as usize])
        .collect();
    let second = base
        .with_values(delayed)?
        .with_name(format!("{}_shift{}", base.name(), shift));
    Ok((base.clone(), second))
}

/// Two series with independent AR(1) noise plus a common sinusoid inside the
/// coupling window; the second series carries it delayed by `shift` samples.
pub fn make_coupled_pair(spec: &SyntheticSpec) -> Result<(TimeSeries, TimeSeries)> {
    spec.validate()?;
    let noise = spec.noise()?;
    let x_noise = generate_surrogate(&noise, spec.len, spec.seed)?;
    let y_noise = generate_surrogate(
        &noise,
        spec.len,
        spec.seed.wrapping_add(0x9E37_79B9_7F4A_7C15),
    )?;
    let (a, b) = spec.coupling_window;
    let common = |t: i64| -> f64 {
        if t >= a as i64 && t < b as i64 {
            spec.amplitude * (2.0 * PI * t as f64 / spec.period).cos()
        } else {
            0.0
        }
    };
    let x: Vec<f64> = (0..spec.len)
        .map(|t| x_noise.values()[t] + common(t as i64))
        .collect();
    let y: Vec<f64> = (0..spec.len)
        .map(|t| y_noise.values()[t] + common(t as i64 - spec.shift))
        .collect();
    Ok((
        TimeSeries::new("x", spec.start, 1, x)?,
        TimeSeries::new("y", spec.start, 1, y)?,
    ))
}

/// Generates the series described by `spec` (one or two, by kind).
pub fn generate(spec: &SyntheticSpec) -> Result<Vec<TimeSeries>> {
    spec.validate()?;
    let base = || sinusoid("x", spec.start, spec.len, spec.period, spec.amplitude);
    let noise = || -> Result<TimeSeries> {
        let s = generate_surrogate(&spec.noise()?, spec.len, spec.seed)?;
        TimeSeries::new("noise", spec.start, 1, s.values().to_vec())
    };
    Ok(match spec.kind {
        SyntheticKind::Sinusoid => vec![base()?],
        SyntheticKind::Ar1 => vec![noise()?],
        SyntheticKind::ShiftedCopy => {
            let (a, b) = make_shifted_pair(&base()?, spec.shift)?;
            vec![a, b.with_name("y")]
        }
        SyntheticKind::CoupledPair => {
            let (a, b) = make_coupled_pair(spec)?;
            vec![a, b]
        }
        SyntheticKind::Sum => {
            let b = base()?;
            let n = noise()?;
            let v = b
                .values()
                .iter()
                .zip(n.values())
                .map(|(a, e)| a + e)
                .collect();
            vec![b.with_values(v)?]
        }
    })
}

/// Writes series sharing one time axis as `date,<name>,...`.
pub fn write_series_csv(path: impl AsRef<std::path::Path>, series: &[TimeSeries]) -> Result<()> {
    use std::fmt::Write as _;
    let path = path.as_ref();
    let first = series
        .first()
        .ok_or_else(|| Error::InvalidParams("nothing to write".into()))?;
    if series
        .iter()
        .any(|s| s.len() != first.len() || s.start() != first.start() || s.step() != first.step())
    {
        return Err(Error::InvalidParams(
            "series must share one time axis".into(),
        ));
    }
    let mut out = String::from("date");
    for s in series {
        let _ = write!(out, ",{}", s.name());
    }
    out.push('\n');
    for i in 0..first.len() {
        let _ = write!(out, "{}", first.time_at(i));
        for s in series {
            let _ = write!(out, ",{}", s.values()[i]);
        }
        out.push('\n');
    }
    std::fs::write(path, out).map_err(|e| Error::io(path, e))
}
