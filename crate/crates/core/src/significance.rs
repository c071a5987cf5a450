//! Red-noise significance.
//!
//! Single-series power is tested against the theoretical AR(1) spectrum with
//! a chi-square(2) distribution. Coherence and cross power are tested with
//! Monte Carlo: pairs of independent AR(1) surrogates matching each series'
//! fitted alpha are pushed through the same transform, and the per-scale
//! `level` quantile of the statistic outside the cone of influence becomes
//! the threshold.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::coherence::{coherence_grids, CrossField, Smoother};
use crate::cwt::{CwtPlan, WaveletField, WaveletParams};
use crate::error::{Error, Result};
use crate::grid::{MaskGrid, RealGrid};
use crate::ingest::{self, AR1Params, TimeSeries};

pub const DEFAULT_LEVEL: f64 = 0.95;
pub const DEFAULT_SURROGATES: usize = 300;
pub const MIN_SURROGATES: usize = 100;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SignificanceMethod {
    /// Theoretical chi-square test of single-series power.
    Chi2Power,
    /// Monte Carlo test of squared coherence.
    MonteCarloWtc,
    /// Monte Carlo test of cross power normalized by both standard deviations.
    MonteCarloXwt,
}

/// Cells whose statistic exceeds the per-scale threshold.
#[derive(Clone, Debug, PartialEq)]
pub struct SignificanceMask {
    mask: MaskGrid,
    level: f64,
    method: SignificanceMethod,
    thresholds: Vec<f64>,
}

impl SignificanceMask {
    /// `mask[j][n] = statistic[j][n] > thresholds[j]`.
    pub fn from_thresholds(
        statistic: &RealGrid,
        thresholds: Vec<f64>,
        level: f64,
        method: SignificanceMethod,
    ) -> Result<Self> {
        if thresholds.len() != statistic.rows() {
            return Err(Error::GridMismatch(format!(
                "{} thresholds for {} scales",
                thresholds.len(),
                statistic.rows()
            )));
        }
        let mask = MaskGrid::from_fn(statistic.rows(), statistic.cols(), |j, n| {
            *statistic.get(j, n) > thresholds[j]
        });
        Ok(Self {
            mask,
            level,
            method,
            thresholds,
        })
    }

    pub fn mask(&self) -> &MaskGrid {
        &self.mask
    }

    pub fn level(&self) -> f64 {
        self.level
    }

    pub fn method(&self) -> SignificanceMethod {
        self.method
    }

    pub fn thresholds(&self) -> &[f64] {
        &self.thresholds
    }

    pub fn is_significant(&self, row: usize, col: usize) -> bool {
        *self.mask.get(row, col)
    }

    /// Share of reliable (outside-COI) cells that are significant.
    pub fn fraction_outside_coi(&self, periods: &[f64], coi: &[f64]) -> f64 {
        let mut total = 0usize;
        let mut hits = 0usize;
        for (j, &p) in periods.iter().enumerate() {
            for (n, &c) in coi.iter().enumerate() {
                if p < c {
                    total += 1;
                    hits += usize::from(*self.mask.get(j, n));
                }
            }
        }
        if total == 0 {
            0.0
        } else {
            hits as f64 / total as f64
        }
    }
}

/// Normalized AR(1) spectrum at Fourier frequency index `k` of `n`:
/// `(1 - a^2) / (1 + a^2 - 2 a cos(2 pi k / n))`.
///
/// `k` may be fractional so scales between Fourier frequencies map directly.
pub fn red_noise_spectrum(alpha: f64, k: f64, n: f64) -> f64 {
    (1.0 - alpha * alpha) / (1.0 + alpha * alpha - 2.0 * alpha * (2.0 * PI * k / n).cos())
}

/// Quantile of the chi-square distribution with two degrees of freedom.
pub fn chi2_2dof_quantile(level: f64) -> f64 {
    -2.0 * (1.0 - level).ln()
}

fn check_level(level: f64) -> Result<()> {
    if !(level > 0.5 && level < 1.0) {
        return Err(Error::InvalidParams(format!(
            "confidence level must be in (0.5, 1), got {level}"
        )));
    }
    Ok(())
}

/// Chi-square test of wavelet power against the red-noise background.
///
/// Threshold for the row with period `T` is
/// `variance * P(k) * chi2_2(level) / 2` with `k / N = dt / T`.
pub fn power_significance(
    field: &WaveletField,
    ar1: &AR1Params,
    level: f64,
) -> Result<SignificanceMask> {
    check_level(level)?;
    let dt = field.params().dt();
    let chi = chi2_2dof_quantile(level) / 2.0;
    let thresholds = field
        .periods()
        .iter()
        .map(|&t| field.variance() * red_noise_spectrum(ar1.alpha(), dt / t, 1.0) * chi)
        .collect();
    SignificanceMask::from_thresholds(
        &field.power(),
        thresholds,
        level,
        SignificanceMethod::Chi2Power,
    )
}

fn fill_ar1<R: Rng>(ar1: &AR1Params, out: &mut [f64], rng: &mut R) {
    let a = ar1.alpha();
    let mut state = ar1.process_variance().sqrt() * rng.sample::<f64, _>(StandardNormal);
    for slot in out.iter_mut() {
        *slot = ar1.mean() + state;
        state = a * state + ar1.sigma() * rng.sample::<f64, _>(StandardNormal);
    }
}

/// Stationary AR(1) draw of length `n`; identical seeds give identical output.
pub fn generate_surrogate(ar1: &AR1Params, n: usize, seed: u64) -> Result<TimeSeries> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut values = vec![0.0; n];
    fill_ar1(ar1, &mut values, &mut rng);
    TimeSeries::monthly("surrogate", values)
}

/// Monte Carlo settings.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MonteCarloConfig {
    pub n_surrogates: usize,
    pub level: f64,
    pub seed: u64,
}

impl Default for MonteCarloConfig {
    fn default() -> Self {
        Self {
            n_surrogates: DEFAULT_SURROGATES,
            level: DEFAULT_LEVEL,
            seed: 0,
        }
    }
}

impl MonteCarloConfig {
    pub fn validate(&self) -> Result<()> {
        check_level(self.level)?;
        if self.n_surrogates < MIN_SURROGATES {
            return Err(Error::InvalidParams(format!(
                "at least {MIN_SURROGATES} surrogates are required, got {}",
                self.n_surrogates
            )));
        }
        Ok(())
    }
}

/// Per-scale thresholds for coherence and normalized cross power.
#[derive(Clone, Debug, PartialEq)]
pub struct SurrogateThresholds {
    pub wtc: Vec<f64>,
    pub xwt: Vec<f64>,
    pub level: f64,
}

/// Pooled statistic samples per scale row.
struct RowSamples {
    wtc: Vec<Vec<f64>>,
    xwt: Vec<Vec<f64>>,
}

/// Runs the surrogate pairs and returns both threshold sets.
///
/// Surrogate `i` draws from its own ChaCha stream (`seed`, stream `i`), so
/// the result does not depend on scheduling or thread count. Rows without
/// any cell outside the cone of influence pool over all columns instead.
pub fn surrogate_thresholds(
    params: &WaveletParams,
    n: usize,
    ar1_x: &AR1Params,
    ar1_y: &AR1Params,
    config: &MonteCarloConfig,
) -> Result<SurrogateThresholds> {
    config.validate()?;
    let plan = CwtPlan::new(params, n)?;
    let smoother = Smoother::new(plan.scales(), params.dt(), params.dj(), n)?;
    let rows = plan.scales().len();
    let periods = plan.periods();
    let coi = plan.coi();
    let pooled_cols: Vec<Vec<usize>> = periods
        .iter()
        .map(|&p| {
            let inside: Vec<usize> = (0..n).filter(|&c| p < coi[c]).collect();
            if inside.is_empty() {
                (0..n).collect()
            } else {
                inside
            }
        })
        .collect();

    let per_surrogate: Vec<Result<RowSamples>> = (0..config.n_surrogates)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
            rng.set_stream(i as u64);
            let mut x = vec![0.0; n];
            let mut y = vec![0.0; n];
            fill_ar1(ar1_x, &mut x, &mut rng);
            fill_ar1(ar1_y, &mut y, &mut rng);
            let wx = plan.transform_values(&x)?;
            let wy = plan.transform_values(&y)?;
            let (r2, _) = coherence_grids(&smoother, &wx, &wy, plan.scales())?;
            let norm = 1.0 / (ingest::sample_variance(&x) * ingest::sample_variance(&y)).sqrt();
            let mut wtc = Vec::with_capacity(rows);
            let mut xwt = Vec::with_capacity(rows);
            for (j, cols) in pooled_cols.iter().enumerate() {
                wtc.push(cols.iter().map(|&c| *r2.get(j, c)).collect());
                xwt.push(
                    cols.iter()
                        .map(|&c| (wx.get(j, c) * wy.get(j, c).conj()).norm() * norm)
                        .collect(),
                );
            }
            Ok(RowSamples { wtc, xwt })
        })
        .collect();

    let mut wtc_rows: Vec<Vec<f64>> = pooled_cols
        .iter()
        .map(|c| Vec::with_capacity(c.len() * config.n_surrogates))
        .collect();
    let mut xwt_rows = wtc_rows.clone();
    for sample in per_surrogate {
        let sample = sample?;
        for (dst, src) in wtc_rows.iter_mut().zip(sample.wtc) {
            dst.extend(src);
        }
        for (dst, src) in xwt_rows.iter_mut().zip(sample.xwt) {
            dst.extend(src);
        }
    }
    let quantiles = |rows: Vec<Vec<f64>>| -> Result<Vec<f64>> {
        rows.into_iter()
            .map(|mut v| {
                if v.iter().any(|x| !x.is_finite()) {
                    return Err(Error::Numeric("non-finite surrogate statistic".into()));
                }
                Ok(quantile(&mut v, config.level))
            })
            .collect()
    };
    Ok(SurrogateThresholds {
        wtc: quantiles(wtc_rows)?,
        xwt: quantiles(xwt_rows)?,
        level: config.level,
    })
}

/// Per-scale coherence thresholds from `config.n_surrogates` AR(1) pairs.
pub fn wtc_significance(
    params: &WaveletParams,
    n: usize,
    ar1_x: &AR1Params,
    ar1_y: &AR1Params,
    config: &MonteCarloConfig,
) -> Result<Vec<f64>> {
    Ok(surrogate_thresholds(params, n, ar1_x, ar1_y, config)?.wtc)
}

/// Linearly interpolated empirical quantile (sorts `values` in place).
pub fn quantile(values: &mut [f64], level: f64) -> f64 {
    values.sort_by(f64::total_cmp);
    let pos = level * (values.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let frac = pos - lo as f64;
    values[lo] + (values[hi] - values[lo]) * frac
}

/// Cross power normalized by the two series' standard deviations, the
/// statistic tested by [`SignificanceMethod::MonteCarloXwt`].
pub fn normalized_cross_power(cross: &CrossField, var_x: f64, var_y: f64) -> RealGrid {
    let norm = 1.0 / (var_x * var_y).sqrt();
    cross.coeffs().map(|c| c.norm() * norm)
}
