//! Loading, transforming and aligning uniformly sampled monthly series.
//!
//! Raw prices become log returns, index levels stay as levels, and both are
//! standardized with the sample (n-1) standard deviation before wavelet
//! analysis. Missing months are rejected rather than interpolated: the
//! wavelet transform assumes gap-free uniform sampling.

use std::io::Read;
use std::path::Path;

use crate::error::{Error, Result};
use crate::time::YearMonth;

/// A named, uniformly sampled real series. Sample `i` sits at
/// `start + i * step` months.
#[derive(Clone, Debug, PartialEq)]
pub struct TimeSeries {
    name: String,
    start: YearMonth,
    step: u32,
    values: Vec<f64>,
}

impl TimeSeries {
    /// Builds a series, checking `len >= 2`, `step > 0` and finite values.
    pub fn new(
        name: impl Into<String>,
        start: YearMonth,
        step: u32,
        values: Vec<f64>,
    ) -> Result<Self> {
        let name = name.into();
        if step == 0 {
            return Err(Error::InvalidSeries(format!("'{name}': step must be > 0")));
        }
        if values.len() < 2 {
            return Err(Error::TooShort {
                name,
                len: values.len(),
                min: 2,
            });
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidSeries(format!(
                "'{name}': non-finite value at index {i}"
            )));
        }
        Ok(Self {
            name,
            start,
            step,
            values,
        })
    }

    /// Monthly series starting at January 2000; handy for synthetic data.
    pub fn monthly(name: impl Into<String>, values: Vec<f64>) -> Result<Self> {
        Self::new(
            name,
            YearMonth::new(2000, 1).expect("valid month"),
            1,
            values,
        )
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn start(&self) -> YearMonth {
        self.start
    }

    /// Sampling interval in months.
    pub fn step(&self) -> u32 {
        self.step
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn time_at(&self, i: usize) -> YearMonth {
        self.start.add_months(i as i64 * self.step as i64)
    }

    pub fn end(&self) -> YearMonth {
        self.time_at(self.len() - 1)
    }

    pub fn time_labels(&self) -> Vec<String> {
        (0..self.len())
            .map(|i| self.time_at(i).to_string())
            .collect()
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    /// Same time axis, new values. Lengths must match.
    pub fn with_values(&self, values: Vec<f64>) -> Result<Self> {
        if values.len() != self.len() {
            return Err(Error::InvalidSeries(format!(
                "'{}': expected {} values, got {}",
                self.name,
                self.len(),
                values.len()
            )));
        }
        Self::new(self.name.clone(), self.start, self.step, values)
    }

    pub fn mean(&self) -> f64 {
        mean(&self.values)
    }

    /// Sample variance with the n-1 denominator.
    pub fn sample_variance(&self) -> f64 {
        sample_variance(&self.values)
    }

    pub fn sample_std(&self) -> f64 {
        self.sample_variance().sqrt()
    }
}

pub(crate) fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

pub(crate) fn sample_variance(values: &[f64]) -> f64 {
    let m = mean(values);
    values.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / (values.len() as f64 - 1.0)
}

/// Parameters of a stationary AR(1) process
/// `x_t - mean = alpha (x_{t-1} - mean) + sigma e_t`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AR1Params {
    alpha: f64,
    sigma: f64,
    mean: f64,
}

impl AR1Params {
    pub fn new(alpha: f64, sigma: f64, mean: f64) -> Result<Self> {
        if alpha.is_nan() || alpha.abs() >= 1.0 {
            return Err(Error::InvalidParams(format!(
                "AR(1) alpha must satisfy |alpha| < 1, got {alpha}"
            )));
        }
        if !sigma.is_finite() || sigma <= 0.0 {
            return Err(Error::InvalidParams(format!(
                "AR(1) sigma must be > 0, got {sigma}"
            )));
        }
        if !mean.is_finite() {
            return Err(Error::InvalidParams("AR(1) mean must be finite".into()));
        }
        Ok(Self { alpha, sigma, mean })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Innovation standard deviation.
    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// Stationary variance `sigma^2 / (1 - alpha^2)`.
    pub fn process_variance(&self) -> f64 {
        self.sigma * self.sigma / (1.0 - self.alpha * self.alpha)
    }
}

/// Loads one value column from a monthly CSV file.
///
/// The file needs a header row; `time_column` holds `YYYY-MM` stamps that
/// must be strictly increasing and gap-free. Row numbers in errors count the
/// header as row 1.
pub fn load_csv(
    path: impl AsRef<Path>,
    time_column: &str,
    value_column: &str,
) -> Result<TimeSeries> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_csv(file, path, time_column, value_column)
}

/// Like [`load_csv`] but reads from any reader; `origin` is only used in
/// error messages.
pub fn read_csv<R: Read>(
    reader: R,
    origin: &Path,
    time_column: &str,
    value_column: &str,
) -> Result<TimeSeries> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let headers = rdr
        .headers()
        .map_err(|e| Error::Csv {
            path: origin.to_path_buf(),
            row: 1,
            message: e.to_string(),
        })?
        .clone();
    let col = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::MissingColumn {
                path: origin.to_path_buf(),
                column: name.to_string(),
            })
    };
    let time_idx = col(time_column)?;
    let value_idx = col(value_column)?;

    let mut start: Option<YearMonth> = None;
    let mut prev: Option<YearMonth> = None;
    let mut values = Vec::new();
    for (i, record) in rdr.records().enumerate() {
        let row = i + 2;
        let record = record.map_err(|e| Error::Csv {
            path: origin.to_path_buf(),
            row,
            message: e.to_string(),
        })?;
        let stamp = record.get(time_idx).unwrap_or("");
        let month: YearMonth = stamp.parse().map_err(|_| Error::BadTimestamp {
            path: origin.to_path_buf(),
            row,
            value: stamp.to_string(),
        })?;
        if let Some(p) = prev {
            if month <= p {
                return Err(Error::NonMonotone {
                    path: origin.to_path_buf(),
                    row,
                });
            }
            if month != p.add_months(1) {
                return Err(Error::Gap {
                    path: origin.to_path_buf(),
                    row,
                    missing: p.add_months(1),
                });
            }
        }
        let raw = record.get(value_idx).unwrap_or("");
        let value: f64 = raw
            .parse()
            .ok()
            .filter(|v: &f64| v.is_finite())
            .ok_or_else(|| Error::NonNumeric {
                path: origin.to_path_buf(),
                row,
                column: value_column.to_string(),
                value: raw.to_string(),
            })?;
        start.get_or_insert(month);
        prev = Some(month);
        values.push(value);
    }
    let start = start.ok_or_else(|| Error::TooShort {
        name: value_column.to_string(),
        len: 0,
        min: 2,
    })?;
    TimeSeries::new(value_column, start, 1, values)
}

/// `r_i = ln(v_{i+1} / v_i)`; the result starts one step later.
pub fn log_returns(s: &TimeSeries) -> Result<TimeSeries> {
    if let Some((index, &value)) = s.values().iter().enumerate().find(|(_, v)| **v <= 0.0) {
        return Err(Error::NonPositive {
            name: s.name().to_string(),
            index,
            value,
        });
    }
    let r: Vec<f64> = s.values().windows(2).map(|w| (w[1] / w[0]).ln()).collect();
    TimeSeries::new(s.name(), s.time_at(1), s.step(), r)
}

/// Zero mean, unit sample standard deviation.
pub fn standardize(s: &TimeSeries) -> Result<TimeSeries> {
    let m = s.mean();
    let sd = s.sample_std();
    if sd.is_nan() || sd <= 0.0 || sd <= f64::EPSILON * m.abs() {
        return Err(Error::ZeroVariance {
            name: s.name().to_string(),
        });
    }
    s.with_values(s.values().iter().map(|v| (v - m) / sd).collect())
}

/// Trims both series to their common calendar window.
pub fn align(a: &TimeSeries, b: &TimeSeries) -> Result<(TimeSeries, TimeSeries)> {
    if a.step() != b.step() {
        return Err(Error::InvalidSeries(format!(
            "cannot align '{}' (step {}) with '{}' (step {})",
            a.name(),
            a.step(),
            b.name(),
            b.step()
        )));
    }
    let step = a.step() as i64;
    if b.start().months_since(a.start()).rem_euclid(step) != 0 {
        return Err(Error::InvalidSeries(format!(
            "sampling grids of '{}' and '{}' are offset",
            a.name(),
            b.name()
        )));
    }
    let start = a.start().max(b.start());
    let end = a.end().min(b.end());
    let no_overlap = || Error::NoOverlap {
        a: a.name().to_string(),
        b: b.name().to_string(),
    };
    if end < start {
        return Err(no_overlap());
    }
    let n = (end.months_since(start) / step) as usize + 1;
    let slice = |s: &TimeSeries| -> Result<TimeSeries> {
        let off = (start.months_since(s.start()) / step) as usize;
        TimeSeries::new(s.name(), start, s.step(), s.values()[off..off + n].to_vec())
            .map_err(|_| no_overlap())
    };
    Ok((slice(a)?, slice(b)?))
}

/// Lag-1 sample autocorrelation `sum (x_t - m)(x_{t+1} - m) / sum (x_t - m)^2`.
pub fn lag1_autocorrelation(s: &TimeSeries) -> Result<f64> {
    let m = s.mean();
    let dev: Vec<f64> = s.values().iter().map(|v| v - m).collect();
    let denom: f64 = dev.iter().map(|d| d * d).sum();
    if denom.is_nan() || denom <= 0.0 {
        return Err(Error::ZeroVariance {
            name: s.name().to_string(),
        });
    }
    let num: f64 = dev.windows(2).map(|w| w[0] * w[1]).sum();
    Ok(num / denom)
}

/// Largest alpha used for surrogates; keeps the process stationary.
pub const MAX_ALPHA: f64 = 0.999;

/// Fits the red-noise background used for significance testing.
///
/// Alpha is the lag-1 autocorrelation clamped to `[0, 0.999]`: a negative
/// estimate is treated as white noise. Sigma makes the process variance
/// equal the sample variance.
pub fn fit_ar1(s: &TimeSeries) -> Result<AR1Params> {
    if s.len() < 8 {
        return Err(Error::TooShort {
            name: s.name().to_string(),
            len: s.len(),
            min: 8,
        });
    }
    let var = s.sample_variance();
    if var.is_nan() || var <= 0.0 {
        return Err(Error::ZeroVariance {
            name: s.name().to_string(),
        });
    }
    let alpha = lag1_autocorrelation(s)?.clamp(0.0, MAX_ALPHA);
    AR1Params::new(alpha, (var * (1.0 - alpha * alpha)).sqrt(), s.mean())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ym(y: i32, m: u32) -> YearMonth {
        YearMonth::new(y, m).unwrap()
    }

    fn monthly_csv(start: YearMonth, values: &[f64]) -> String {
        let mut s = String::from("date,price\n");
        for (i, v) in values.iter().enumerate() {
            s.push_str(&format!("{},{}\n", start.add_months(i as i64), v));
        }
        s
    }

    fn parse(text: &str) -> Result<TimeSeries> {
        read_csv(text.as_bytes(), Path::new("mem.csv"), "date", "price")
    }

    #[test]
    fn loads_304_months() {
        let values: Vec<f64> = (0..304).map(|i| 50.0 + i as f64).collect();
        let s = parse(&monthly_csv(ym(1997, 1), &values)).unwrap();
        assert_eq!(s.len(), 304);
        assert_eq!(s.name(), "price");
        assert_eq!(s.start(), ym(1997, 1));
        assert_eq!(s.end(), ym(2022, 4));
    }

    #[test]
    fn loads_minimum_two_rows() {
        let s = parse("date,price\n2000-01,1\n2000-02,2\n").unwrap();
        assert_eq!(s.len(), 2);
    }

    #[test]
    fn gap_names_missing_month() {
        let err = parse("date,price\n2000-01,1\n2000-02,2\n2000-04,3\n").unwrap_err();
        match err {
            Error::Gap { row, missing, .. } => {
                assert_eq!(row, 4);
                assert_eq!(missing, ym(2000, 3));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn rejects_bad_rows() {
        assert!(matches!(
            parse("date,price\n2000-02,1\n2000-01,2\n").unwrap_err(),
            Error::NonMonotone { row: 3, .. }
        ));
        assert!(matches!(
            parse("date,price\n2000-01,1\n2000-02,abc\n").unwrap_err(),
            Error::NonNumeric { row: 3, .. }
        ));
        assert!(matches!(
            parse("date,price\n2000-01,1\n2000-02,\n").unwrap_err(),
            Error::NonNumeric { row: 3, .. }
        ));
        assert!(matches!(
            parse("date,cost\n2000-01,1\n2000-02,2\n").unwrap_err(),
            Error::MissingColumn { .. }
        ));
        assert!(matches!(
            parse("date,price\n2000-1x,1\n").unwrap_err(),
            Error::BadTimestamp { row: 2, .. }
        ));
    }

    #[test]
    fn missing_file_is_io_error() {
        let err = load_csv("/nonexistent/file.csv", "date", "price").unwrap_err();
        assert!(matches!(err, Error::Io { .. }));
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn log_return_examples() {
        let s = TimeSeries::monthly("p", vec![100.0, 110.0, 121.0]).unwrap();
        let r = log_returns(&s).unwrap();
        assert!((r.values()[0] - 0.09531017980432493).abs() < 1e-15);
        assert!((r.values()[1] - r.values()[0]).abs() < 1e-15);
        assert_eq!(r.start(), ym(2000, 2));

        let c = TimeSeries::monthly("p", vec![5.0, 5.0, 5.0]).unwrap();
        assert_eq!(log_returns(&c).unwrap().values(), &[0.0, 0.0]);

        let t = TimeSeries::monthly("p", vec![100.0, 50.0, 100.0]).unwrap();
        let r = log_returns(&t).unwrap();
        assert!((r.values()[0] + 2f64.ln()).abs() < 1e-15);
        assert!((r.values()[1] - 2f64.ln()).abs() < 1e-15);
        assert!(r.values().iter().sum::<f64>().abs() < 1e-15);
    }

    #[test]
    fn log_returns_reject_non_positive() {
        let s = TimeSeries::monthly("p", vec![1.0, 0.0, 2.0]).unwrap();
        assert!(matches!(
            log_returns(&s).unwrap_err(),
            Error::NonPositive { index: 1, .. }
        ));
    }

    #[test]
    fn standardize_examples() {
        let s = TimeSeries::monthly("x", vec![1.0, 2.0, 3.0]).unwrap();
        let z = standardize(&s).unwrap();
        for (a, b) in z.values().iter().zip([-1.0, 0.0, 1.0]) {
            assert!((a - b).abs() < 1e-15);
        }
        let again = standardize(&z).unwrap();
        for (a, b) in again.values().iter().zip(z.values()) {
            assert!((a - b).abs() < 1e-12);
        }
        let flat = TimeSeries::monthly("x", vec![2.0; 5]).unwrap();
        assert!(matches!(
            standardize(&flat).unwrap_err(),
            Error::ZeroVariance { .. }
        ));
    }

    #[test]
    fn align_examples() {
        let a = TimeSeries::new("a", ym(1997, 1), 1, vec![1.0; 304]).unwrap();
        let b = TimeSeries::new("b", ym(2000, 1), 1, vec![2.0; 268]).unwrap();
        let (a2, b2) = align(&a, &b).unwrap();
        assert_eq!(a2.start(), ym(2000, 1));
        assert_eq!(b2.start(), ym(2000, 1));
        assert_eq!(a2.len(), b2.len());
        assert_eq!(a2.end(), ym(2022, 4));

        let (a3, _) = align(&a, &a).unwrap();
        assert_eq!(a3, a);

        let c = TimeSeries::new("c", ym(2030, 1), 1, vec![1.0; 10]).unwrap();
        assert!(matches!(
            align(&a, &c).unwrap_err(),
            Error::NoOverlap { .. }
        ));
    }

    #[test]
    fn fit_ar1_rejects_constant_and_short() {
        let flat = TimeSeries::monthly("x", vec![3.0; 20]).unwrap();
        assert!(matches!(
            fit_ar1(&flat).unwrap_err(),
            Error::ZeroVariance { .. }
        ));
        let short = TimeSeries::monthly("x", vec![1.0, 2.0, 3.0]).unwrap();
        assert!(matches!(
            fit_ar1(&short).unwrap_err(),
            Error::TooShort { .. }
        ));
    }

    #[test]
    fn fit_ar1_clamps_negative_alpha() {
        let alt: Vec<f64> = (0..64)
            .map(|i| if i % 2 == 0 { 1.0 } else { -1.0 })
            .collect();
        let s = TimeSeries::monthly("alt", alt).unwrap();
        assert!(lag1_autocorrelation(&s).unwrap() < -0.9);
        let p = fit_ar1(&s).unwrap();
        assert_eq!(p.alpha(), 0.0);
        assert!((p.sigma() * p.sigma() - s.sample_variance()).abs() < 1e-12);
    }

    #[test]
    fn ar1_params_validation() {
        assert!(AR1Params::new(1.0, 1.0, 0.0).is_err());
        assert!(AR1Params::new(0.5, 0.0, 0.0).is_err());
        assert!(AR1Params::new(f64::NAN, 1.0, 0.0).is_err());
        let p = AR1Params::new(0.5, 1.0, 0.0).unwrap();
        assert!((p.process_variance() - 4.0 / 3.0).abs() < 1e-15);
    }
}
