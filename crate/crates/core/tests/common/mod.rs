#![allow(dead_code)]

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

/// Morlet wavelet written out independently of the library.
pub fn psi(eta: f64, omega0: f64) -> Complex64 {
    let env = (-eta * eta / 2.0).exp() / PI.powf(0.25);
    Complex64::new(env * (omega0 * eta).cos(), env * (omega0 * eta).sin())
}

/// Brute-force `W(s, n) = sum_k (x_k - mean) sqrt(dt/s) conj(psi((k - n) dt / s))`.
pub fn direct_cwt(x: &[f64], scales: &[f64], dt: f64, omega0: f64) -> Vec<Vec<Complex64>> {
    let n = x.len();
    let mean = x.iter().sum::<f64>() / n as f64;
    scales
        .iter()
        .map(|&s| {
            let norm = (dt / s).sqrt();
            (0..n)
                .map(|t| {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for (k, &v) in x.iter().enumerate() {
                        let eta = (k as f64 - t as f64) * dt / s;
                        acc += (v - mean) * norm * psi(eta, omega0).conj();
                    }
                    acc
                })
                .collect()
        })
        .collect()
}

pub fn gaussian_series(n: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| StandardNormal.sample(&mut rng)).collect()
}

pub fn cosine(n: usize, period: f64) -> Vec<f64> {
    (0..n)
        .map(|t| (2.0 * PI * t as f64 / period).cos())
        .collect()
}

/// Row whose period is closest to `target`.
pub fn nearest_row(periods: &[f64], target: f64) -> usize {
    periods
        .iter()
        .enumerate()
        .min_by(|a, b| (a.1 - target).abs().total_cmp(&(b.1 - target).abs()))
        .map(|(i, _)| i)
        .expect("non-empty periods")
}

/// Mean direction of a set of angles.
pub fn circular_mean(angles: impl IntoIterator<Item = f64>) -> f64 {
    let (s, c) = angles
        .into_iter()
        .fold((0.0, 0.0), |(s, c), a: f64| (s + a.sin(), c + a.cos()));
    s.atan2(c)
}

/// Smallest absolute difference between two angles.
pub fn angle_diff(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(2.0 * PI);
    d.min(2.0 * PI - d)
}
