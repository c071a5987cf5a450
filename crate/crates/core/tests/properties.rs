mod common;

use std::f64::consts::PI;

use common::*;
use proptest::prelude::*;
use wavecoh::coherence::{self, Smoother};
use wavecoh::cwt::{self, WaveletParams};
use wavecoh::grid::Grid;
use wavecoh::ingest::{self, AR1Params, TimeSeries};
use wavecoh::phase_lag::{self, Direction};
use wavecoh::significance::{self, MonteCarloConfig, SignificanceMask, SignificanceMethod};
use wavecoh::synth::{self, SyntheticSpec};
use wavecoh::YearMonth;

fn series(values: Vec<f64>) -> TimeSeries {
    TimeSeries::monthly("s", values).unwrap()
}

fn small_params(n: usize) -> WaveletParams {
    WaveletParams::for_length(n, 1.0).with_dj(0.25)
}

fn values(n: std::ops::Range<usize>) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-100.0..100.0f64, n)
}

fn noisy(n: usize) -> impl Strategy<Value = Vec<f64>> {
    any::<u64>().prop_map(move |seed| gaussian_series(n, seed))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn standardize_is_idempotent(v in values(3..80)) {
        prop_assume!(v.iter().any(|x| (x - v[0]).abs() > 1e-3));
        let once = ingest::standardize(&series(v)).unwrap();
        prop_assert!(once.mean().abs() < 1e-12);
        prop_assert!((once.sample_std() - 1.0).abs() < 1e-12);
        let twice = ingest::standardize(&once).unwrap();
        for (a, b) in once.values().iter().zip(twice.values()) {
            prop_assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn geometric_ramp_has_constant_log_returns(c in 0.1..100.0f64, g in 0.5..2.0f64, n in 3usize..60) {
        let v: Vec<f64> = (0..n).map(|i| c * g.powi(i as i32)).collect();
        let r = ingest::log_returns(&series(v)).unwrap();
        prop_assert_eq!(r.len(), n - 1);
        for x in r.values() {
            prop_assert!((x - g.ln()).abs() < 1e-12);
        }
    }

    #[test]
    fn align_window_is_symmetric(a0 in 0i64..40, alen in 2usize..60, b0 in 0i64..40, blen in 2usize..60) {
        let base = YearMonth::new(1990, 1).unwrap();
        let a = TimeSeries::new("a", base.add_months(a0), 1, vec![1.0; alen]).unwrap();
        let b = TimeSeries::new("b", base.add_months(b0), 1, vec![2.0; blen]).unwrap();
        match (ingest::align(&a, &b), ingest::align(&b, &a)) {
            (Ok((a1, b1)), Ok((b2, a2))) => {
                prop_assert_eq!(a1.start(), b2.start());
                prop_assert_eq!(a1.end(), b2.end());
                prop_assert_eq!(a1, a2);
                prop_assert_eq!(b1, b2);
            }
            (Err(_), Err(_)) => {}
            _ => prop_assert!(false, "align succeeded in one order only"),
        }
    }

    #[test]
    fn red_noise_spectrum_falls_with_frequency(alpha in 0.01..0.99f64) {
        let n = 304.0;
        let mut prev = f64::INFINITY;
        for k in 0..=152 {
            let p = significance::red_noise_spectrum(alpha, k as f64, n);
            prop_assert!(p < prev);
            prev = p;
        }
    }

    #[test]
    fn fourier_factor_decreases(a in 5.0..50.0f64, d in 0.01..10.0f64) {
        prop_assert!(cwt::fourier_factor(a + d) < cwt::fourier_factor(a));
    }

    #[test]
    fn time_lag_is_the_formula(phi in -PI..PI, period in 2.0..128.0f64) {
        prop_assert_eq!(phase_lag::time_lag(phi, period), phi.abs() * period / (2.0 * PI));
        let d = phase_lag::classify_direction(phi, 0.15);
        prop_assert_eq!(phase_lag::classify_direction(-phi, 0.15), d.swapped());
        if matches!(d, Direction::FirstLeads | Direction::FirstLags) {
            let lag = phase_lag::time_lag(phi, period);
            prop_assert!((0.0..=period / 2.0).contains(&lag));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn cwt_is_linear(x in noisy(96), y in noisy(96), a in -5.0..5.0f64, b in -5.0..5.0f64) {
        let p = small_params(96);
        let combo: Vec<f64> = x.iter().zip(&y).map(|(u, v)| a * u + b * v).collect();
        let fc = cwt::cwt(&series(combo), &p).unwrap();
        let fx = cwt::cwt(&series(x), &p).unwrap();
        let fy = cwt::cwt(&series(y), &p).unwrap();
        let scale = fc.coeffs().as_slice().iter().map(|c| c.norm()).fold(1e-12, f64::max);
        for ((c, u), v) in fc.coeffs().as_slice().iter().zip(fx.coeffs().as_slice()).zip(fy.coeffs().as_slice()) {
            prop_assert!((c - (u * a + v * b)).norm() <= 1e-9 * scale);
        }
    }

    #[test]
    fn cwt_commutes_with_shifts(z in noisy(180), k in 1usize..20) {
        let n = 160;
        let p = WaveletParams::for_length(n, 1.0).with_dj(0.25).with_num_scales(13);
        let fx = cwt::cwt(&series(z[..n].to_vec()), &p).unwrap();
        let fy = cwt::cwt(&series(z[k..n + k].to_vec()), &p).unwrap();
        // y[t] = x[t + k]; compare well inside both windows, periods up to ~16
        for j in 0..p.num_scales() {
            let reach = (6.0 * fx.scales()[j]).ceil() as usize;
            for t in reach..(n - k - reach) {
                let a = fy.coeffs().get(j, t);
                let b = fx.coeffs().get(j, t + k);
                prop_assert!((a - b).norm() <= 1e-6 * b.norm().max(1e-3));
            }
        }
    }

    #[test]
    fn power_ignores_sign(x in noisy(64)) {
        let p = small_params(64);
        let neg: Vec<f64> = x.iter().map(|v| -v).collect();
        let a = cwt::cwt(&series(x), &p).unwrap().power();
        let b = cwt::cwt(&series(neg), &p).unwrap().power();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn coherence_is_symmetric_and_bounded(x in noisy(96), y in noisy(96)) {
        let p = small_params(96);
        let fx = cwt::cwt(&series(x), &p).unwrap();
        let fy = cwt::cwt(&series(y), &p).unwrap();
        let xy = coherence::wtc(&fx, &fy).unwrap();
        let yx = coherence::wtc(&fy, &fx).unwrap();
        for (i, (a, b)) in xy.r2().as_slice().iter().zip(yx.r2().as_slice()).enumerate() {
            prop_assert!((a - b).abs() < 1e-12);
            prop_assert!((0.0..=1.0).contains(a));
            let (pa, pb) = (xy.phase().as_slice()[i], yx.phase().as_slice()[i]);
            prop_assert!(angle_diff(pa, -pb) < 1e-12);
        }
    }

    #[test]
    fn coherence_ignores_amplitude(x in noisy(96), y in noisy(96), a in 0.01..100.0f64, b in 0.01..100.0f64, flip in any::<bool>()) {
        let p = small_params(96);
        let b = if flip { -b } else { b };
        let fx = cwt::cwt(&series(x.clone()), &p).unwrap();
        let fy = cwt::cwt(&series(y.clone()), &p).unwrap();
        let sx: Vec<f64> = x.iter().map(|v| a * v).collect();
        let sy: Vec<f64> = y.iter().map(|v| b * v).collect();
        let gx = cwt::cwt(&series(sx), &p).unwrap();
        let gy = cwt::cwt(&series(sy), &p).unwrap();
        let c0 = coherence::wtc(&fx, &fy).unwrap();
        let c1 = coherence::wtc(&gx, &gy).unwrap();
        let turn = if flip { PI } else { 0.0 };
        for i in 0..c0.r2().as_slice().len() {
            prop_assert!((c0.r2().as_slice()[i] - c1.r2().as_slice()[i]).abs() < 1e-9);
            if c0.r2().as_slice()[i] > 1e-6 {
                prop_assert!(angle_diff(c1.phase().as_slice()[i], c0.phase().as_slice()[i] + turn) < 1e-9);
            }
        }
    }

    #[test]
    fn cross_power_obeys_cauchy_schwarz(x in noisy(80), y in noisy(80)) {
        let p = small_params(80);
        let fx = cwt::cwt(&series(x), &p).unwrap();
        let fy = cwt::cwt(&series(y), &p).unwrap();
        let cross = coherence::xwt(&fx, &fy).unwrap().power();
        let (px, py) = (fx.power(), fy.power());
        for i in 0..cross.as_slice().len() {
            let bound = (px.as_slice()[i] * py.as_slice()[i]).sqrt();
            prop_assert!(cross.as_slice()[i] <= bound * (1.0 + 1e-9) + 1e-300);
        }
    }

    #[test]
    fn smoothing_preserves_constants(c in -10.0..10.0f64, cols in 8usize..120) {
        let p = WaveletParams::for_length(cols.max(16), 1.0);
        let scales = cwt::scale_grid(&p);
        let s = Smoother::new(&scales, 1.0, p.dj(), cols).unwrap();
        let out = s.smooth_real(&Grid::filled(scales.len(), cols, c)).unwrap();
        prop_assert!(out.as_slice().iter().all(|v| (v - c).abs() < 1e-9));
    }

    #[test]
    fn chi2_mask_shrinks_with_level(x in noisy(128), lo in 0.6..0.95f64, d in 0.0..0.04f64) {
        let f = cwt::cwt(&series(x), &small_params(128)).unwrap();
        let ar = AR1Params::new(0.3, 1.0, 0.0).unwrap();
        let a = significance::power_significance(&f, &ar, lo).unwrap();
        let b = significance::power_significance(&f, &ar, lo + d).unwrap();
        for (lo_cell, hi_cell) in a.mask().as_slice().iter().zip(b.mask().as_slice()) {
            prop_assert!(!hi_cell || *lo_cell);
        }
    }

    #[test]
    fn shift_is_recovered(period in 8.0..24.0f64, shift in 1i64..5) {
        let n = 256;
        let base = synth::sinusoid("x", YearMonth::new(2000, 1).unwrap(), n, period, 1.0).unwrap();
        let (x, y) = synth::make_shifted_pair(&base, shift).unwrap();
        let p = WaveletParams::for_length(n, 1.0);
        let c = coherence::wtc(&cwt::cwt(&x, &p).unwrap(), &cwt::cwt(&y, &p).unwrap()).unwrap();
        let row = nearest_row(c.periods(), period);
        let phi = circular_mean((96..160).map(|col| *c.phase().get(row, col)));
        let lag = phase_lag::time_lag(phi, c.periods()[row]);
        prop_assert!((lag - shift as f64).abs() <= 0.5, "lag {} for shift {}", lag, shift);
        prop_assert_eq!(phase_lag::classify_direction(phi, 0.15), Direction::FirstLeads);
    }

    #[test]
    fn coupled_pair_depends_only_on_seed(seed in any::<u64>()) {
        let spec = SyntheticSpec { seed, noise_alpha: 0.5, ..Default::default() };
        prop_assert_eq!(synth::make_coupled_pair(&spec).unwrap(), synth::make_coupled_pair(&spec).unwrap());
    }
}

#[test]
fn surrogate_moments_do_not_depend_on_seed() {
    let ar = AR1Params::new(0.6, 1.0, 0.0).unwrap();
    for seed in [1, 2, 3, 4] {
        let s = significance::generate_surrogate(&ar, 20_000, seed).unwrap();
        let var = s.sample_variance();
        assert!((var - ar.process_variance()).abs() / ar.process_variance() < 0.1);
        let alpha = ingest::lag1_autocorrelation(&s).unwrap();
        assert!((alpha - 0.6).abs() < 0.05);
    }
}

fn analyzed_pair() -> (wavecoh::WaveletField, wavecoh::WaveletField) {
    let spec = SyntheticSpec {
        amplitude: 2.0,
        noise_alpha: 0.3,
        seed: 4,
        ..Default::default()
    };
    let (x, y) = synth::make_coupled_pair(&spec).unwrap();
    let p = WaveletParams::for_length(x.len(), 1.0);
    (cwt::cwt(&x, &p).unwrap(), cwt::cwt(&y, &p).unwrap())
}

fn masks(
    fx: &wavecoh::WaveletField,
    fy: &wavecoh::WaveletField,
    level: f64,
) -> (SignificanceMask, SignificanceMask) {
    let n = fx.len();
    let ar = AR1Params::new(0.3, 1.0, 0.0).unwrap();
    let cfg = MonteCarloConfig {
        n_surrogates: 100,
        level,
        seed: 9,
    };
    let th = significance::surrogate_thresholds(fx.params(), n, &ar, &ar, &cfg).unwrap();
    let c = coherence::wtc(fx, fy).unwrap();
    let cross = coherence::xwt(fx, fy).unwrap();
    let wtc =
        SignificanceMask::from_thresholds(c.r2(), th.wtc, level, SignificanceMethod::MonteCarloWtc)
            .unwrap();
    let stat = significance::normalized_cross_power(&cross, fx.variance(), fy.variance());
    let xwt =
        SignificanceMask::from_thresholds(&stat, th.xwt, level, SignificanceMethod::MonteCarloXwt)
            .unwrap();
    (wtc, xwt)
}

#[test]
fn regions_shrink_as_level_rises() {
    let (fx, fy) = analyzed_pair();
    let c = coherence::wtc(&fx, &fy).unwrap();
    let (w95, x95) = masks(&fx, &fy, 0.9);
    let (w99, x99) = masks(&fx, &fy, 0.99);
    let low = phase_lag::significant_regions(&w95, &x95, &c).unwrap();
    let high = phase_lag::significant_regions(&w99, &x99, &c).unwrap();
    assert!(!low.is_empty());
    for r in &high {
        let cells: Vec<(usize, usize)> = r.cells.iter().map(|c| (c.row, c.col)).collect();
        let host = low
            .iter()
            .find(|l| l.cells.iter().any(|c| (c.row, c.col) == cells[0]))
            .expect("high-level region inside a low-level one");
        for cell in &cells {
            assert!(host.cells.iter().any(|c| (c.row, c.col) == *cell));
        }
    }
}

#[test]
fn swapping_series_mirrors_regions() {
    let (fx, fy) = analyzed_pair();
    let (w, x) = masks(&fx, &fy, 0.95);
    let c_xy = coherence::wtc(&fx, &fy).unwrap();
    let c_yx = coherence::wtc(&fy, &fx).unwrap();
    let a = phase_lag::significant_regions(&w, &x, &c_xy).unwrap();
    let b = phase_lag::significant_regions(&w, &x, &c_yx).unwrap();
    assert_eq!(a.len(), b.len());
    for (ra, rb) in a.iter().zip(&b) {
        for (ca, cb) in ra.cells.iter().zip(&rb.cells) {
            assert_eq!((ca.row, ca.col), (cb.row, cb.col));
            assert!(angle_diff(ca.delta_phi, -cb.delta_phi) < 1e-12);
            assert!((ca.lag() - cb.lag()).abs() < 1e-9);
            let da = phase_lag::classify_direction(ca.delta_phi, 0.15);
            let db = phase_lag::classify_direction(cb.delta_phi, 0.15);
            if ca.delta_phi.abs() < PI - 1e-9 {
                assert_eq!(da.swapped(), db);
            }
        }
    }
}

#[test]
fn reported_delays_fit_in_half_a_period() {
    let (fx, fy) = analyzed_pair();
    let (w, x) = masks(&fx, &fy, 0.95);
    let c = coherence::wtc(&fx, &fy).unwrap();
    for r in phase_lag::significant_regions(&w, &x, &c).unwrap() {
        for cell in &r.cells {
            assert!((0.0..=cell.period / 2.0 + 1e-12).contains(&cell.lag()));
        }
    }
}
