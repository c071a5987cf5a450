//! Morlet continuous wavelet transform.
//!
//! The transform is the discrete convolution
//!
//! ```text
//! W(s, n) = sum_{n'} x_{n'} sqrt(dt/s) psi*((n' - n) dt / s)
//! ```
//!
//! of the demeaned series with the sampled, conjugated Morlet wavelet. It is
//! evaluated with FFTs: the sampled wavelet for every scale is transformed
//! once per [`CwtPlan`], and the series is zero-padded to a power of two at
//! least `2N - 1` long so the circular product equals the linear sum above
//! exactly. With `pad = false` the series is treated as periodic instead.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::grid::{Grid, RealGrid};
use crate::ingest::{self, TimeSeries};
use crate::time::YearMonth;

pub const DEFAULT_OMEGA0: f64 = 6.0;
pub const DEFAULT_DJ: f64 = 1.0 / 12.0;

/// Mother wavelet and scale-grid configuration.
#[derive(Clone, Debug, PartialEq)]
pub struct WaveletParams {
    omega0: f64,
    dt: f64,
    s0: f64,
    dj: f64,
    num_scales: usize,
    pad: bool,
}

impl WaveletParams {
    /// Defaults for a series of `n` samples spaced `dt` months apart:
    /// `omega0 = 6`, `s0 = 2 dt`, `dj = 1/12`, and as many scales as fit
    /// below `n dt / 2`.
    pub fn for_length(n: usize, dt: f64) -> Self {
        let s0 = 2.0 * dt;
        Self {
            omega0: DEFAULT_OMEGA0,
            dt,
            s0,
            dj: DEFAULT_DJ,
            num_scales: default_num_scales(n, dt, s0, DEFAULT_DJ),
            pad: true,
        }
    }

    pub fn with_omega0(mut self, omega0: f64) -> Self {
        self.omega0 = omega0;
        self
    }

    pub fn with_dt(mut self, dt: f64) -> Self {
        self.dt = dt;
        self
    }

    pub fn with_s0(mut self, s0: f64) -> Self {
        self.s0 = s0;
        self
    }

    pub fn with_dj(mut self, dj: f64) -> Self {
        self.dj = dj;
        self
    }

    pub fn with_num_scales(mut self, num_scales: usize) -> Self {
        self.num_scales = num_scales;
        self
    }

    pub fn with_pad(mut self, pad: bool) -> Self {
        self.pad = pad;
        self
    }

    pub fn omega0(&self) -> f64 {
        self.omega0
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn s0(&self) -> f64 {
        self.s0
    }

    pub fn dj(&self) -> f64 {
        self.dj
    }

    pub fn num_scales(&self) -> usize {
        self.num_scales
    }

    pub fn pad(&self) -> bool {
        self.pad
    }

    pub fn validate(&self) -> Result<()> {
        // The Morlet wavelet only has zero mean to numerical precision for omega0 >= 5.
        if !self.omega0.is_finite() || self.omega0 < 5.0 {
            return Err(Error::InvalidParams(format!(
                "omega0 must be >= 5, got {}",
                self.omega0
            )));
        }
        for (name, v) in [("dt", self.dt), ("s0", self.s0), ("dj", self.dj)] {
            if !v.is_finite() || v <= 0.0 {
                return Err(Error::InvalidParams(format!("{name} must be > 0, got {v}")));
            }
        }
        if self.num_scales == 0 {
            return Err(Error::InvalidParams("num_scales must be >= 1".into()));
        }
        Ok(())
    }
}

/// `J + 1` with `J = floor(log2(n dt / (2 s0)) / dj)`, at least 1.
pub fn default_num_scales(n: usize, dt: f64, s0: f64, dj: f64) -> usize {
    let top = n as f64 * dt / 2.0;
    if top <= s0 {
        return 1;
    }
    ((top / s0).log2() / dj + 1e-9).floor() as usize + 1
}

/// `pi^{-1/4} e^{i omega0 eta} e^{-eta^2 / 2}`.
pub fn morlet_mother(eta: f64, omega0: f64) -> Complex64 {
    let envelope = PI.powf(-0.25) * (-0.5 * eta * eta).exp();
    Complex64::from_polar(envelope, omega0 * eta)
}

/// Ratio of Fourier period to wavelet scale, `4 pi / (omega0 + sqrt(2 + omega0^2))`.
pub fn fourier_factor(omega0: f64) -> f64 {
    4.0 * PI / (omega0 + (2.0 + omega0 * omega0).sqrt())
}

/// `s0 * 2^(j dj)` for `j = 0..num_scales`.
pub fn scale_grid(params: &WaveletParams) -> Vec<f64> {
    (0..params.num_scales)
        .map(|j| params.s0 * 2f64.powf(j as f64 * params.dj))
        .collect()
}

/// Largest reliable period at each column:
/// `fourier_factor(omega0) * sqrt(2) * dt * min(n, N - 1 - n)`.
///
/// The curve is zero at both edges. [`WaveletField`] clips it from below at
/// its smallest period so edge columns have no reliable cells.
pub fn cone_of_influence(n: usize, dt: f64, omega0: f64) -> Vec<f64> {
    let factor = fourier_factor(omega0) * 2f64.sqrt() * dt;
    (0..n).map(|i| factor * i.min(n - 1 - i) as f64).collect()
}

/// Angle of `z` in `(-pi, pi]`.
pub fn wrapped_angle(z: Complex64) -> f64 {
    let a = z.im.atan2(z.re);
    if a <= -PI {
        PI
    } else {
        a
    }
}

/// Complex wavelet coefficients over `(scale, time)` with their axes.
#[derive(Clone, Debug)]
pub struct WaveletField {
    coeffs: Grid<Complex64>,
    scales: Vec<f64>,
    periods: Vec<f64>,
    coi: Vec<f64>,
    params: WaveletParams,
    series_name: String,
    start: YearMonth,
    step: u32,
    variance: f64,
}

impl WaveletField {
    pub fn coeffs(&self) -> &Grid<Complex64> {
        &self.coeffs
    }

    pub fn scales(&self) -> &[f64] {
        &self.scales
    }

    /// Fourier periods in months, increasing with row index.
    pub fn periods(&self) -> &[f64] {
        &self.periods
    }

    /// Per-column largest reliable period (months).
    pub fn coi(&self) -> &[f64] {
        &self.coi
    }

    pub fn params(&self) -> &WaveletParams {
        &self.params
    }

    pub fn series_name(&self) -> &str {
        &self.series_name
    }

    pub fn start(&self) -> YearMonth {
        self.start
    }

    pub fn step(&self) -> u32 {
        self.step
    }

    /// Sample variance of the transformed series.
    pub fn variance(&self) -> f64 {
        self.variance
    }

    pub fn num_scales(&self) -> usize {
        self.coeffs.rows()
    }

    pub fn len(&self) -> usize {
        self.coeffs.cols()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.cols() == 0
    }

    pub fn time_labels(&self) -> Vec<String> {
        (0..self.len())
            .map(|i| {
                self.start
                    .add_months(i as i64 * self.step as i64)
                    .to_string()
            })
            .collect()
    }

    /// `|W|^2`.
    pub fn power(&self) -> RealGrid {
        self.coeffs.map(|c| c.norm_sqr())
    }

    /// Four-quadrant phase `atan2(Im W, Re W)` in `(-pi, pi]`.
    pub fn phase(&self) -> RealGrid {
        self.coeffs.map(|&c| wrapped_angle(c))
    }

    /// `true` where the cell lies outside the cone of influence.
    pub fn is_reliable(&self, row: usize, col: usize) -> bool {
        self.periods[row] < self.coi[col]
    }

    /// Whether two fields share scale grid, length and `dt`.
    pub fn same_grid(&self, other: &WaveletField) -> bool {
        self.coeffs.shape() == other.coeffs.shape()
            && self.params.dt == other.params.dt
            && self
                .scales
                .iter()
                .zip(&other.scales)
                .all(|(a, b)| (a - b).abs() <= 1e-12 * a.abs())
    }
}

/// Precomputed wavelet spectra for one `(params, N)` pair.
///
/// Reusing a plan across many series of the same length (Monte Carlo
/// surrogates) skips the per-scale wavelet FFTs.
pub struct CwtPlan {
    params: WaveletParams,
    n: usize,
    fft_len: usize,
    scales: Vec<f64>,
    periods: Vec<f64>,
    coi: Vec<f64>,
    kernels: Vec<Vec<Complex64>>,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl CwtPlan {
    pub fn new(params: &WaveletParams, n: usize) -> Result<Self> {
        params.validate()?;
        if n < 2 {
            return Err(Error::InvalidParams(format!(
                "series length must be >= 2, got {n}"
            )));
        }
        let fft_len = if params.pad {
            (2 * n - 1).next_power_of_two()
        } else {
            n
        };
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(fft_len);
        let inverse = planner.plan_fft_inverse(fft_len);

        let scales = scale_grid(params);
        let ff = fourier_factor(params.omega0);
        let periods: Vec<f64> = scales.iter().map(|s| ff * s).collect();
        let min_period = periods[0];
        let coi = cone_of_influence(n, params.dt, params.omega0)
            .into_iter()
            .map(|c| c.max(min_period))
            .collect();

        let kernels = scales
            .iter()
            .map(|&s| {
                let mut k = wavelet_kernel(params, s, n, fft_len);
                forward.process(&mut k);
                k
            })
            .collect();

        Ok(Self {
            params: params.clone(),
            n,
            fft_len,
            scales,
            periods,
            coi,
            kernels,
            forward,
            inverse,
        })
    }

    pub fn params(&self) -> &WaveletParams {
        &self.params
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn scales(&self) -> &[f64] {
        &self.scales
    }

    pub fn periods(&self) -> &[f64] {
        &self.periods
    }

    pub fn coi(&self) -> &[f64] {
        &self.coi
    }

    /// Transforms a series whose step matches `dt`.
    pub fn transform(&self, series: &TimeSeries) -> Result<WaveletField> {
        if (series.step() as f64 - self.params.dt).abs() > 1e-12 {
            return Err(Error::InvalidParams(format!(
                "series '{}' has step {} months but dt = {}",
                series.name(),
                series.step(),
                self.params.dt
            )));
        }
        let coeffs = self.transform_values(series.values())?;
        Ok(WaveletField {
            coeffs,
            scales: self.scales.clone(),
            periods: self.periods.clone(),
            coi: self.coi.clone(),
            params: self.params.clone(),
            series_name: series.name().to_string(),
            start: series.start(),
            step: series.step(),
            variance: series.sample_variance(),
        })
    }

    /// Coefficient grid only; the series mean is removed first.
    pub fn transform_values(&self, values: &[f64]) -> Result<Grid<Complex64>> {
        if values.len() != self.n {
            return Err(Error::GridMismatch(format!(
                "plan built for {} samples, got {}",
                self.n,
                values.len()
            )));
        }
        let m = ingest::mean(values);
        let mut spectrum = vec![Complex64::new(0.0, 0.0); self.fft_len];
        for (slot, v) in spectrum.iter_mut().zip(values) {
            slot.re = v - m;
        }
        self.forward.process(&mut spectrum);

        let norm = 1.0 / self.fft_len as f64;
        let mut data = Vec::with_capacity(self.kernels.len() * self.n);
        let mut buf = vec![Complex64::new(0.0, 0.0); self.fft_len];
        let mut scratch = vec![Complex64::new(0.0, 0.0); self.inverse.get_inplace_scratch_len()];
        for kernel in &self.kernels {
            for ((b, x), k) in buf.iter_mut().zip(&spectrum).zip(kernel) {
                *b = x * k;
            }
            self.inverse.process_with_scratch(&mut buf, &mut scratch);
            data.extend(buf[..self.n].iter().map(|c| c * norm));
        }
        Grid::from_vec(self.kernels.len(), self.n, data)
    }
}

/// Time-domain kernel `g[l] = sqrt(dt/s) psi(l dt / s)` laid out circularly,
/// so that `W = x (*) g`. Uses `conj(psi(-eta)) = psi(eta)`.
fn wavelet_kernel(params: &WaveletParams, scale: f64, n: usize, fft_len: usize) -> Vec<Complex64> {
    let dt = params.dt;
    let norm = (dt / scale).sqrt();
    let mut k = vec![Complex64::new(0.0, 0.0); fft_len];
    let reach: i64 = if params.pad {
        n as i64 - 1
    } else {
        // periodic images: the envelope is below e^-72 beyond 12 scales
        ((12.0 * scale / dt).ceil() as i64).max(n as i64)
    };
    for lag in -reach..=reach {
        let idx = lag.rem_euclid(fft_len as i64) as usize;
        k[idx] += norm * morlet_mother(lag as f64 * dt / scale, params.omega0);
    }
    k
}

/// One-shot transform. Builds a [`CwtPlan`] internally.
pub fn cwt(series: &TimeSeries, params: &WaveletParams) -> Result<WaveletField> {
    CwtPlan::new(params, series.len())?.transform(series)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn morlet_examples() {
        let v = morlet_mother(0.0, 6.0);
        assert!((v.re - 0.7511255444649425).abs() < 1e-15);
        assert_eq!(v.im, 0.0);
        for eta in [0.3, 1.1, 2.7] {
            assert!(
                (morlet_mother(eta, 6.0).norm() - morlet_mother(-eta, 6.0).norm()).abs() < 1e-15
            );
        }
        assert!(morlet_mother(10.0, 6.0).norm() < 1e-20);
    }

    #[test]
    fn scale_grid_examples() {
        let p = WaveletParams::for_length(64, 1.0)
            .with_s0(2.0)
            .with_dj(1.0)
            .with_num_scales(4);
        assert_eq!(scale_grid(&p), vec![2.0, 4.0, 8.0, 16.0]);
        let q = p.clone().with_dj(0.25).with_num_scales(2);
        let g = scale_grid(&q);
        assert_eq!(g[0], 2.0);
        assert!((g[1] - 2.378414230005442).abs() < 1e-12);
        assert_eq!(scale_grid(&p.with_num_scales(1)), vec![2.0]);
    }

    #[test]
    fn fourier_factor_values() {
        let direct = 4.0 * PI / (6.0 + 38f64.sqrt());
        assert!((fourier_factor(6.0) - direct).abs() < 1e-15);
        assert!((fourier_factor(6.0) - 1.0330).abs() < 1e-4);
        let mut last = f64::INFINITY;
        for w in [5.0, 6.0, 8.0, 12.0, 20.0] {
            let f = fourier_factor(w);
            assert!(f < last);
            last = f;
        }
        assert!(fourier_factor(1e9) < 1e-8);
    }

    #[test]
    fn default_grid_for_304_months() {
        let p = WaveletParams::for_length(304, 1.0);
        let scales = scale_grid(&p);
        assert_eq!(scales.len(), 75);
        assert!(*scales.last().unwrap() <= 152.0);
        assert!(scales.last().unwrap() * 2f64.powf(1.0 / 12.0) > 152.0);
    }

    #[test]
    fn coi_values() {
        let c = cone_of_influence(304, 1.0, 6.0);
        assert_eq!(c[0], 0.0);
        assert_eq!(c[303], 0.0);
        let mid = fourier_factor(6.0) * 2f64.sqrt() * 151.0;
        assert!((c[151] - mid).abs() < 1e-12);
        assert!((c[151] - 220.6).abs() < 0.1);
        for i in 0..304 {
            assert_eq!(c[i], c[303 - i]);
        }
    }

    #[test]
    fn invalid_params_rejected() {
        let base = WaveletParams::for_length(64, 1.0);
        for p in [
            base.clone().with_omega0(4.0),
            base.clone().with_dt(0.0),
            base.clone().with_s0(-1.0),
            base.clone().with_dj(0.0),
            base.clone().with_num_scales(0),
        ] {
            assert!(matches!(p.validate(), Err(Error::InvalidParams(_))));
        }
    }

    #[test]
    fn phase_quadrants() {
        assert_eq!(wrapped_angle(Complex64::new(1.0, 0.0)), 0.0);
        assert!((wrapped_angle(Complex64::new(0.0, 1.0)) - PI / 2.0).abs() < 1e-15);
        assert_eq!(wrapped_angle(Complex64::new(-1.0, 0.0)), PI);
        assert_eq!(wrapped_angle(Complex64::new(-1.0, -0.0)), PI);
        assert_eq!(Complex64::new(3.0, 4.0).norm_sqr(), 25.0);
    }

    #[test]
    fn constant_series_has_no_power() {
        let s = TimeSeries::monthly("c", vec![42.0; 128]).unwrap();
        let f = cwt(&s, &WaveletParams::for_length(128, 1.0)).unwrap();
        assert!(f.power().as_slice().iter().all(|&p| p < 1e-10));
    }

    #[test]
    fn field_axes_are_consistent() {
        let values: Vec<f64> = (0..100).map(|i| (i as f64 * 0.3).sin()).collect();
        let s = TimeSeries::monthly("x", values).unwrap();
        let f = cwt(&s, &WaveletParams::for_length(100, 1.0)).unwrap();
        let ff = fourier_factor(6.0);
        for (p, s) in f.periods().iter().zip(f.scales()) {
            assert!((p - ff * s).abs() < 1e-12);
        }
        assert!(f.periods().windows(2).all(|w| w[1] > w[0]));
        assert_eq!(f.coi()[0], f.periods()[0]);
        assert_eq!(f.coi()[99], f.periods()[0]);
        assert!(!f.is_reliable(0, 0));
        assert_eq!(f.time_labels()[0], "2000-01");
    }

    #[test]
    fn step_mismatch_is_rejected() {
        let s = TimeSeries::new(
            "q",
            YearMonth::new(2000, 1).unwrap(),
            3,
            vec![1.0, 2.0, 0.0, 5.0],
        )
        .unwrap();
        assert!(cwt(&s, &WaveletParams::for_length(4, 1.0)).is_err());
    }
}
