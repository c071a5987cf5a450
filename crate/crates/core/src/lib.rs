//! Wavelet comovement analysis for monthly time series.
//!
//! The crate covers the whole path from raw CSV data to lead/lag tables:
//!
//! - [`ingest`]: loading, log returns, standardization, alignment, AR(1) fits
//! - [`cwt`]: Morlet continuous wavelet transform with cone of influence
//! - [`coherence`]: cross wavelet transform, smoothing and squared coherence
//! - [`significance`]: chi-square and Monte Carlo red-noise tests
//! - [`phase_lag`]: phase to delay, significant regions and band summaries
//! - [`synth`]: synthetic signals with known shifts and couplings
//! - [`render`]: heatmaps with COI shading, contours and phase arrows
//! - [`config`] and [`pipeline`]: batch analysis driven by a TOML file
//!
//! See the `examples/` directory for one runnable program per capability.

pub mod coherence;
pub mod config;
pub mod cwt;
pub mod error;
pub mod grid;
pub mod ingest;
pub mod phase_lag;
pub mod pipeline;
pub mod render;
pub mod significance;
pub mod synth;
pub mod time;

pub use coherence::{wtc, xwt, CoherenceField, CrossField, Smoother};
pub use cwt::{cwt, CwtPlan, WaveletField, WaveletParams};
pub use error::{Error, Result};
pub use grid::Grid;
pub use ingest::{AR1Params, TimeSeries};
pub use phase_lag::{Direction, Region, RegionSummary, Window};
pub use significance::{MonteCarloConfig, SignificanceMask};
pub use time::YearMonth;
