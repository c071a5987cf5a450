//! Cross wavelet transform, time-scale smoothing and squared wavelet coherence.

use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::cwt::{wrapped_angle, WaveletField};
use crate::error::{Error, Result};
use crate::grid::{Grid, RealGrid};
use crate::time::YearMonth;

/// Width of the scale-direction boxcar in octaves.
pub const SCALE_SMOOTHING_OCTAVES: f64 = 0.6;

/// Auto-spectra below this are treated as zero and give `r2 = 0`.
pub const DENOMINATOR_FLOOR: f64 = 1e-300;

/// `W^{XY} = W^X conj(W^Y)` with the shared axes.
#[derive(Clone, Debug)]
pub struct CrossField {
    coeffs: Grid<Complex64>,
    scales: Vec<f64>,
    periods: Vec<f64>,
    coi: Vec<f64>,
    names: (String, String),
    start: YearMonth,
    step: u32,
}

impl CrossField {
    pub fn coeffs(&self) -> &Grid<Complex64> {
        &self.coeffs
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

    pub fn names(&self) -> (&str, &str) {
        (&self.names.0, &self.names.1)
    }

    pub fn start(&self) -> YearMonth {
        self.start
    }

    pub fn step(&self) -> u32 {
        self.step
    }

    /// Cross-wavelet power `|W^{XY}|`.
    pub fn power(&self) -> RealGrid {
        self.coeffs.map(|c| c.norm())
    }

    /// Relative phase; positive when the first series leads.
    pub fn phase(&self) -> RealGrid {
        self.coeffs.map(|&c| wrapped_angle(c))
    }
}

fn check_pair(fx: &WaveletField, fy: &WaveletField) -> Result<()> {
    if !fx.same_grid(fy) {
        return Err(Error::GridMismatch(format!(
            "'{}' {:?} and '{}' {:?} are on different scale/time grids",
            fx.series_name(),
            fx.coeffs().shape(),
            fy.series_name(),
            fy.coeffs().shape()
        )));
    }
    Ok(())
}

pub fn xwt(fx: &WaveletField, fy: &WaveletField) -> Result<CrossField> {
    check_pair(fx, fy)?;
    let coeffs = fx.coeffs().zip_map(fy.coeffs(), |a, b| a * b.conj())?;
    Ok(CrossField {
        coeffs,
        scales: fx.scales().to_vec(),
        periods: fx.periods().to_vec(),
        coi: fx.coi().to_vec(),
        names: (fx.series_name().to_string(), fy.series_name().to_string()),
        start: fx.start(),
        step: fx.step(),
    })
}

/// Odd boxcar length closest to `0.6 / dj`, at least 1.
pub fn boxcar_width(dj: f64) -> usize {
    let target = SCALE_SMOOTHING_OCTAVES / dj;
    let half = ((target - 1.0) / 2.0).round().max(0.0) as usize;
    2 * half + 1
}

/// Half-sample symmetric reflection of an arbitrary index into `0..len`.
fn reflect(i: i64, len: usize) -> usize {
    let period = 2 * len as i64;
    let r = i.rem_euclid(period);
    if r < len as i64 {
        r as usize
    } else {
        (period - 1 - r) as usize
    }
}

/// Time-then-scale smoothing operator for one grid shape.
///
/// Row `j` is convolved in time with a unit-sum Gaussian of standard
/// deviation `scales[j] / dt` samples; each column is then averaged over a
/// boxcar of [`boxcar_width`] rows. Both directions extend the data by
/// half-sample reflection, so constants are preserved and an isolated
/// impulse keeps its mass.
pub struct Smoother {
    cols: usize,
    ext_len: usize,
    width: usize,
    kernels: Vec<Vec<Complex64>>,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl Smoother {
    pub fn new(scales: &[f64], dt: f64, dj: f64, cols: usize) -> Result<Self> {
        if cols == 0 || scales.is_empty() {
            return Err(Error::InvalidParams("cannot smooth an empty grid".into()));
        }
        if dt.is_nan() || dt <= 0.0 || dj.is_nan() || dj <= 0.0 {
            return Err(Error::InvalidParams("dt and dj must be > 0".into()));
        }
        // The reflected row repeats with period 2N, so a circular FFT of that
        // length applies the reflected, untruncated Gaussian exactly.
        let ext_len = 2 * cols;
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(ext_len);
        let inverse = planner.plan_fft_inverse(ext_len);
        let kernels = scales
            .iter()
            .map(|&s| {
                let mut k = periodic_gaussian(s / dt, ext_len);
                forward.process(&mut k);
                k
            })
            .collect();
        Ok(Self {
            cols,
            ext_len,
            width: boxcar_width(dj),
            kernels,
            forward,
            inverse,
        })
    }

    /// Builds a smoother for the grid of `field`.
    pub fn for_field(field: &WaveletField) -> Result<Self> {
        Self::new(
            field.scales(),
            field.params().dt(),
            field.params().dj(),
            field.len(),
        )
    }

    pub fn boxcar_width(&self) -> usize {
        self.width
    }

    pub fn smooth_complex(&self, grid: &Grid<Complex64>) -> Result<Grid<Complex64>> {
        if grid.rows() != self.kernels.len() || grid.cols() != self.cols {
            return Err(Error::GridMismatch(format!(
                "smoother built for {}x{}, got {:?}",
                self.kernels.len(),
                self.cols,
                grid.shape()
            )));
        }
        let n = self.cols;
        let mut timed = Grid::filled(grid.rows(), n, Complex64::new(0.0, 0.0));
        let mut buf = vec![Complex64::new(0.0, 0.0); self.ext_len];
        let mut scratch = vec![
            Complex64::new(0.0, 0.0);
            self.forward
                .get_inplace_scratch_len()
                .max(self.inverse.get_inplace_scratch_len())
        ];
        let norm = 1.0 / self.ext_len as f64;
        for (j, kernel) in self.kernels.iter().enumerate() {
            let row = grid.row(j);
            buf[..n].copy_from_slice(row);
            for (dst, src) in buf[n..].iter_mut().zip(row.iter().rev()) {
                *dst = *src;
            }
            self.forward.process_with_scratch(&mut buf, &mut scratch);
            for (b, k) in buf.iter_mut().zip(kernel) {
                *b *= k;
            }
            self.inverse.process_with_scratch(&mut buf, &mut scratch);
            for (dst, src) in timed.row_mut(j).iter_mut().zip(&buf[..n]) {
                *dst = src * norm;
            }
        }

        let rows = grid.rows();
        if self.width == 1 || rows == 1 {
            return Ok(timed);
        }
        let half = (self.width / 2) as i64;
        let inv_w = 1.0 / self.width as f64;
        Ok(Grid::from_fn(rows, n, |j, col| {
            let mut acc = Complex64::new(0.0, 0.0);
            for d in -half..=half {
                acc += timed.get(reflect(j as i64 + d, rows), col);
            }
            acc * inv_w
        }))
    }

    pub fn smooth_real(&self, grid: &RealGrid) -> Result<RealGrid> {
        let c = grid.map(|&v| Complex64::new(v, 0.0));
        Ok(self.smooth_complex(&c)?.map(|z| z.re))
    }

    /// Smooths two real grids in one complex pass (the operator is real-linear).
    pub fn smooth_real_pair(&self, a: &RealGrid, b: &RealGrid) -> Result<(RealGrid, RealGrid)> {
        let packed = a.zip_map(b, |&x, &y| Complex64::new(x, y))?;
        let out = self.smooth_complex(&packed)?;
        Ok((out.map(|z| z.re), out.map(|z| z.im)))
    }
}

/// `exp(-m^2 / (2 sigma^2))` summed over all periodic images and
/// normalized to unit sum.
fn periodic_gaussian(sigma: f64, len: usize) -> Vec<Complex64> {
    let reach = (10.0 * sigma).ceil() as i64 + len as i64;
    let mut k = vec![0.0f64; len];
    for lag in -reach..=reach {
        let w = (-(lag as f64).powi(2) / (2.0 * sigma * sigma)).exp();
        k[lag.rem_euclid(len as i64) as usize] += w;
    }
    let total: f64 = k.iter().sum();
    k.into_iter()
        .map(|v| Complex64::new(v / total, 0.0))
        .collect()
}

/// Smooths `grid` with the operator for `scales`; see [`Smoother`].
pub fn smooth(grid: &Grid<Complex64>, scales: &[f64], dt: f64, dj: f64) -> Result<Grid<Complex64>> {
    Smoother::new(scales, dt, dj, grid.cols())?.smooth_complex(grid)
}

/// Squared wavelet coherence and the phase of the smoothed cross spectrum.
#[derive(Clone, Debug)]
pub struct CoherenceField {
    r2: RealGrid,
    phase: RealGrid,
    scales: Vec<f64>,
    periods: Vec<f64>,
    coi: Vec<f64>,
    names: (String, String),
    start: YearMonth,
    step: u32,
}

impl CoherenceField {
    pub fn r2(&self) -> &RealGrid {
        &self.r2
    }

    pub fn phase(&self) -> &RealGrid {
        &self.phase
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

    pub fn names(&self) -> (&str, &str) {
        (&self.names.0, &self.names.1)
    }

    pub fn start(&self) -> YearMonth {
        self.start
    }

    pub fn step(&self) -> u32 {
        self.step
    }
}

pub fn wtc(fx: &WaveletField, fy: &WaveletField) -> Result<CoherenceField> {
    check_pair(fx, fy)?;
    let smoother = Smoother::for_field(fx)?;
    wtc_with(&smoother, fx, fy)
}

/// [`wtc`] with a prebuilt smoother for the shared grid.
pub fn wtc_with(
    smoother: &Smoother,
    fx: &WaveletField,
    fy: &WaveletField,
) -> Result<CoherenceField> {
    check_pair(fx, fy)?;
    let (r2, phase) = coherence_grids(smoother, fx.coeffs(), fy.coeffs(), fx.scales())?;
    Ok(CoherenceField {
        r2,
        phase,
        scales: fx.scales().to_vec(),
        periods: fx.periods().to_vec(),
        coi: fx.coi().to_vec(),
        names: (fx.series_name().to_string(), fy.series_name().to_string()),
        start: fx.start(),
        step: fx.step(),
    })
}

/// Core of [`wtc`] on raw coefficient grids:
/// `r2 = |S(W^XY/s)|^2 / (S(|W^X|^2/s) S(|W^Y|^2/s))`.
pub(crate) fn coherence_grids(
    smoother: &Smoother,
    wx: &Grid<Complex64>,
    wy: &Grid<Complex64>,
    scales: &[f64],
) -> Result<(RealGrid, RealGrid)> {
    let rows = wx.rows();
    let cols = wx.cols();
    let inv_s = |j: usize| 1.0 / scales[j];
    let cross = Grid::from_fn(rows, cols, |j, n| {
        wx.get(j, n) * wy.get(j, n).conj() * inv_s(j)
    });
    let autos = Grid::from_fn(rows, cols, |j, n| {
        Complex64::new(wx.get(j, n).norm_sqr(), wy.get(j, n).norm_sqr()) * inv_s(j)
    });
    let s_cross = smoother.smooth_complex(&cross)?;
    let s_autos = smoother.smooth_complex(&autos)?;
    let r2 = s_cross.zip_map(&s_autos, |c, a| {
        if a.re < DENOMINATOR_FLOOR || a.im < DENOMINATOR_FLOOR {
            0.0
        } else {
            (c.norm_sqr() / (a.re * a.im)).clamp(0.0, 1.0)
        }
    })?;
    let phase = s_cross.map(|&c| wrapped_angle(c));
    Ok((r2, phase))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cwt::{cwt, WaveletParams};
    use crate::ingest::TimeSeries;

    #[test]
    fn boxcar_widths() {
        assert_eq!(boxcar_width(1.0 / 12.0), 7);
        assert_eq!(boxcar_width(0.125), 5);
        assert_eq!(boxcar_width(0.25), 3);
        assert_eq!(boxcar_width(1.0), 1);
    }

    #[test]
    fn reflection_indices() {
        let idx: Vec<usize> = (-3..7).map(|i| reflect(i, 3)).collect();
        assert_eq!(idx, vec![2, 1, 0, 0, 1, 2, 2, 1, 0, 0]);
    }

    #[test]
    fn constant_grid_is_unchanged() {
        let scales: Vec<f64> = (0..20).map(|j| 2.0 * 2f64.powf(j as f64 / 4.0)).collect();
        let g = Grid::filled(20, 50, Complex64::new(3.5, -1.25));
        let out = smooth(&g, &scales, 1.0, 0.25).unwrap();
        for z in out.as_slice() {
            assert!((z - Complex64::new(3.5, -1.25)).norm() < 1e-9);
        }
    }

    #[test]
    fn impulse_row_keeps_unit_mass() {
        for (s, pos) in [(2.0, 10), (8.0, 0), (60.0, 37)] {
            let sm = Smoother::new(&[s], 1.0, 1.0, 80).unwrap();
            let mut g = Grid::filled(1, 80, 0.0);
            *g.get_mut(0, pos) = 1.0;
            let out = sm.smooth_real(&g).unwrap();
            let total: f64 = out.row(0).iter().sum();
            assert!((total - 1.0).abs() < 1e-9, "s={s} total={total}");
        }
    }

    #[test]
    fn self_coherence_is_one() {
        let values: Vec<f64> = (0..120).map(|i| ((i * 7919) % 31) as f64 - 15.0).collect();
        let s = TimeSeries::monthly("x", values).unwrap();
        let f = cwt(&s, &WaveletParams::for_length(120, 1.0)).unwrap();
        let c = wtc(&f, &f).unwrap();
        for &v in c.r2().as_slice() {
            assert!((v - 1.0).abs() < 1e-9);
        }
        let x = xwt(&f, &f).unwrap();
        for (z, p) in x.coeffs().as_slice().iter().zip(f.power().as_slice()) {
            assert!((z.re - p).abs() <= 1e-12 * p.max(1.0));
            assert_eq!(z.im, 0.0);
        }
    }

    #[test]
    fn constant_input_gives_zero_coherence() {
        let s = TimeSeries::monthly("c", vec![1.0; 64]).unwrap();
        let f = cwt(&s, &WaveletParams::for_length(64, 1.0)).unwrap();
        let c = wtc(&f, &f).unwrap();
        assert!(c.r2().as_slice().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn mismatched_grids_are_rejected() {
        let a = TimeSeries::monthly("a", (0..64).map(|i| i as f64).collect()).unwrap();
        let b = TimeSeries::monthly("b", (0..70).map(|i| (i * i) as f64).collect()).unwrap();
        let fa = cwt(&a, &WaveletParams::for_length(64, 1.0)).unwrap();
        let fb = cwt(&b, &WaveletParams::for_length(64, 1.0)).unwrap();
        assert!(matches!(xwt(&fa, &fb), Err(Error::GridMismatch(_))));
        assert!(matches!(wtc(&fa, &fb), Err(Error::GridMismatch(_))));
    }
}
