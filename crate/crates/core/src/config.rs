//! Study configuration (TOML).
//!
//! ```toml
//! output_dir = "out"            # relative paths resolve against this file
//! band_split = 6.0              # months; periods >= split are "low" band
//! phase_tolerance = 0.15        # radians, in-phase / anti-phase window
//! phase_source = "wtc"          # or "xwt"
//!
//! [index]                       # first series of every pair
//! file = "gepu.csv"
//! column = "GEPU"
//! time_column = "date"          # default "date"
//! transform = "levels"          # or "log_returns"
//! standardize = true            # default true
//!
//! [[commodities]]
//! file = "prices.csv"
//! column = "crude_oil"
//! transform = "log_returns"
//!
//! [wavelet]                     # every key optional
//! omega0 = 6.0
//! s0 = 2.0
//! dj = 0.0833333
//! num_scales = 75
//! pad = true
//!
//! [significance]
//! level = 0.95
//! n_surrogates = 300
//! seed = 0
//!
//! [[windows]]                   # defaults to the 2001/2008/2020 crises
//! label = "2008"
//! start = "2007-06"
//! end = "2009-12"
//!
//! [render]
//! format = "png"                # or "ppm"
//! cell_width = 3
//! cell_height = 4
//! arrow_every_cols = 8
//! arrow_every_rows = 4
//!
//! [synth]                       # only read by `wavecoh synth`
//! kind = "coupled_pair"
//! ```

use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::cwt::{self, WaveletParams};
use crate::error::{Error, Result};
use crate::phase_lag::{Window, DEFAULT_BAND_SPLIT, DEFAULT_PHASE_TOLERANCE};
use crate::render::HeatmapStyle;
use crate::significance::{MonteCarloConfig, DEFAULT_LEVEL, DEFAULT_SURROGATES};
use crate::synth::SyntheticSpec;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Transform {
    #[default]
    Levels,
    LogReturns,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum PhaseSource {
    /// Phase of the smoothed cross spectrum.
    #[default]
    Wtc,
    /// Phase of the raw cross-wavelet transform.
    Xwt,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum ImageFormat {
    #[default]
    Png,
    Ppm,
}

impl ImageFormat {
    pub fn extension(self) -> &'static str {
        match self {
            ImageFormat::Png => "png",
            ImageFormat::Ppm => "ppm",
        }
    }
}

fn default_time_column() -> String {
    "date".into()
}

fn yes() -> bool {
    true
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeriesSource {
    pub file: PathBuf,
    pub column: String,
    /// Display name; defaults to `column`.
    #[serde(default)]
    pub name: Option<String>,
    #[serde(default = "default_time_column")]
    pub time_column: String,
    #[serde(default)]
    pub transform: Transform,
    #[serde(default = "yes")]
    pub standardize: bool,
}

impl SeriesSource {
    pub fn label(&self) -> &str {
        self.name.as_deref().unwrap_or(&self.column)
    }
}

/// Optional overrides of [`WaveletParams::for_length`].
#[derive(Clone, Debug, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WaveletSection {
    pub omega0: Option<f64>,
    pub s0: Option<f64>,
    pub dj: Option<f64>,
    pub num_scales: Option<usize>,
    pub pad: Option<bool>,
}

impl WaveletSection {
    /// Parameters for a monthly series of `n` samples.
    pub fn params_for(&self, n: usize) -> WaveletParams {
        let dt = 1.0;
        let mut p = WaveletParams::for_length(n, dt);
        if let Some(w) = self.omega0 {
            p = p.with_omega0(w);
        }
        if let Some(s0) = self.s0 {
            p = p.with_s0(s0);
        }
        if let Some(dj) = self.dj {
            p = p.with_dj(dj);
        }
        let j = self
            .num_scales
            .unwrap_or_else(|| cwt::default_num_scales(n, dt, p.s0(), p.dj()));
        p.with_num_scales(j).with_pad(self.pad.unwrap_or(true))
    }
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SignificanceSection {
    pub level: f64,
    pub n_surrogates: usize,
    pub seed: u64,
}

impl Default for SignificanceSection {
    fn default() -> Self {
        Self {
            level: DEFAULT_LEVEL,
            n_surrogates: DEFAULT_SURROGATES,
            seed: 0,
        }
    }
}

impl SignificanceSection {
    pub fn monte_carlo(&self) -> MonteCarloConfig {
        MonteCarloConfig {
            n_surrogates: self.n_surrogates,
            level: self.level,
            seed: self.seed,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RenderSection {
    pub format: ImageFormat,
    pub cell_width: usize,
    pub cell_height: usize,
    pub arrow_every_cols: usize,
    pub arrow_every_rows: usize,
}

impl Default for RenderSection {
    fn default() -> Self {
        let s = HeatmapStyle::default();
        Self {
            format: ImageFormat::Png,
            cell_width: s.cell_width,
            cell_height: s.cell_height,
            arrow_every_cols: s.arrow_every_cols,
            arrow_every_rows: s.arrow_every_rows,
        }
    }
}

impl RenderSection {
    pub fn style(&self) -> HeatmapStyle {
        HeatmapStyle {
            cell_width: self.cell_width,
            cell_height: self.cell_height,
            arrow_every_cols: self.arrow_every_cols,
            arrow_every_rows: self.arrow_every_rows,
            ..HeatmapStyle::default()
        }
    }
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("out")
}

fn default_band_split() -> f64 {
    DEFAULT_BAND_SPLIT
}

fn default_tolerance() -> f64 {
    DEFAULT_PHASE_TOLERANCE
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalysisConfig {
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    #[serde(default = "default_band_split")]
    pub band_split: f64,
    #[serde(default = "default_tolerance")]
    pub phase_tolerance: f64,
    #[serde(default)]
    pub phase_source: PhaseSource,
    pub index: SeriesSource,
    pub commodities: Vec<SeriesSource>,
    #[serde(default)]
    pub wavelet: WaveletSection,
    #[serde(default)]
    pub significance: SignificanceSection,
    #[serde(default = "Window::default_crises")]
    pub windows: Vec<Window>,
    #[serde(default)]
    pub render: RenderSection,
    #[serde(default)]
    pub synth: Option<SyntheticSpec>,
    /// Where the config was read from; used in error messages.
    #[serde(skip)]
    pub source_path: PathBuf,
}

/// Command-line overrides applied on top of a loaded config.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub level: Option<f64>,
    pub surrogates: Option<usize>,
    pub output_dir: Option<PathBuf>,
}

impl AnalysisConfig {
    /// Parses a config and resolves relative paths against `base_dir`.
    pub fn from_toml_str(text: &str, source_path: &Path, base_dir: &Path) -> Result<Self> {
        let mut cfg: AnalysisConfig = toml::from_str(text).map_err(|e| Error::Config {
            path: source_path.to_path_buf(),
            message: e.message().to_string() + &span_hint(text, e.span()),
        })?;
        cfg.source_path = source_path.to_path_buf();
        let resolve = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base_dir.join(&*p);
            }
        };
        resolve(&mut cfg.output_dir);
        resolve(&mut cfg.index.file);
        for c in &mut cfg.commodities {
            resolve(&mut c.file);
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config {
            path: path.to_path_buf(),
            message: e.to_string(),
        })?;
        let base = path.parent().unwrap_or_else(|| Path::new("."));
        Self::from_toml_str(&text, path, base)
    }

    pub fn apply(&mut self, o: &Overrides) -> Result<()> {
        if let Some(seed) = o.seed {
            self.significance.seed = seed;
        }
        if let Some(level) = o.level {
            self.significance.level = level;
        }
        if let Some(n) = o.surrogates {
            self.significance.n_surrogates = n;
        }
        if let Some(dir) = &o.output_dir {
            self.output_dir = dir.clone();
        }
        self.validate()
    }

    fn error(&self, message: impl Into<String>) -> Error {
        Error::Config {
            path: self.source_path.clone(),
            message: message.into(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.commodities.is_empty() {
            return Err(self.error("at least one [[commodities]] entry is required"));
        }
        let mc = self.significance.monte_carlo();
        mc.validate()
            .map_err(|e| self.error(format!("[significance]: {e}")))?;
        if self.band_split.is_nan() || self.band_split <= 0.0 {
            return Err(self.error("band_split must be > 0"));
        }
        if !(self.phase_tolerance >= 0.0 && self.phase_tolerance < std::f64::consts::FRAC_PI_2) {
            return Err(self.error("phase_tolerance must be in [0, pi/2)"));
        }
        for w in &self.windows {
            if w.end < w.start {
                return Err(self.error(format!("window '{}' ends before it starts", w.label)));
            }
        }
        let mut names: Vec<&str> = self.commodities.iter().map(SeriesSource::label).collect();
        names.sort_unstable();
        if names.windows(2).any(|w| w[0] == w[1]) {
            return Err(self.error("commodity names must be unique"));
        }
        let r = &self.render;
        if r.cell_width == 0
            || r.cell_height == 0
            || r.arrow_every_cols == 0
            || r.arrow_every_rows == 0
        {
            return Err(self.error("[render] sizes must be positive"));
        }
        self.wavelet
            .params_for(64)
            .validate()
            .map_err(|e| self.error(format!("[wavelet]: {e}")))?;
        Ok(())
    }

    pub fn commodity(&self, name: &str) -> Option<&SeriesSource> {
        self.commodities.iter().find(|c| c.label() == name)
    }
}

fn span_hint(text: &str, span: Option<std::ops::Range<usize>>) -> String {
    match span {
        Some(r) => {
            let line = text[..r.start.min(text.len())].matches('\n').count() + 1;
            format!(" (line {line})")
        }
        None => String::new(),
    }
}

/// Just the `[synth]` table of a config file.
#[derive(Debug, Deserialize)]
struct SynthOnly {
    synth: Option<SyntheticSpec>,
}

pub fn load_synth_spec(path: impl AsRef<Path>) -> Result<SyntheticSpec> {
    let path = path.as_ref();
    let err = |message: String| Error::Config {
        path: path.to_path_buf(),
        message,
    };
    let text = std::fs::read_to_string(path).map_err(|e| err(e.to_string()))?;
    let table: toml::Table = toml::from_str(&text).map_err(|e| err(e.message().to_string()))?;
    let only = SynthOnly::deserialize(toml::Value::Table(table))
        .map_err(|e| err(e.message().to_string()))?;
    let spec = only
        .synth
        .ok_or_else(|| err("missing [synth] section".into()))?;
    spec.validate().map_err(|e| err(format!("[synth]: {e}")))?;
    Ok(spec)
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
[index]
file = "gepu.csv"
column = "GEPU"

[[commodities]]
file = "prices.csv"
column = "crude_oil"
transform = "log_returns"
"#;

    #[test]
    fn minimal_config_gets_defaults() {
        let cfg = AnalysisConfig::from_toml_str(MINIMAL, Path::new("c.toml"), Path::new("/data"))
            .unwrap();
        assert_eq!(cfg.index.file, PathBuf::from("/data/gepu.csv"));
        assert_eq!(cfg.index.transform, Transform::Levels);
        assert!(cfg.index.standardize);
        assert_eq!(cfg.commodities[0].transform, Transform::LogReturns);
        assert_eq!(cfg.output_dir, PathBuf::from("/data/out"));
        assert_eq!(cfg.significance, SignificanceSection::default());
        assert_eq!(cfg.windows.len(), 3);
        assert_eq!(cfg.band_split, 6.0);
        assert_eq!(cfg.phase_source, PhaseSource::Wtc);
        let p = cfg.wavelet.params_for(304);
        assert_eq!(p.num_scales(), 75);
        assert_eq!(p.s0(), 2.0);
    }

    #[test]
    fn overrides_apply_and_validate() {
        let mut cfg =
            AnalysisConfig::from_toml_str(MINIMAL, Path::new("c.toml"), Path::new(".")).unwrap();
        cfg.apply(&Overrides {
            seed: Some(9),
            level: Some(0.9),
            surrogates: Some(150),
            output_dir: Some("elsewhere".into()),
        })
        .unwrap();
        assert_eq!(cfg.significance.seed, 9);
        assert_eq!(cfg.significance.n_surrogates, 150);
        assert!(cfg
            .apply(&Overrides {
                surrogates: Some(5),
                ..Default::default()
            })
            .is_err());
    }

    #[test]
    fn errors_name_the_problem() {
        let err = AnalysisConfig::from_toml_str(
            "[index]\nfile = 1\n",
            Path::new("bad.toml"),
            Path::new("."),
        )
        .unwrap_err();
        assert_eq!(err.exit_code(), 1);
        assert!(err.to_string().contains("bad.toml"));

        let typo = MINIMAL.replace("transform = \"log_returns\"", "transfrom = \"log_returns\"");
        let err =
            AnalysisConfig::from_toml_str(&typo, Path::new("t.toml"), Path::new(".")).unwrap_err();
        assert!(err.to_string().contains("transfrom"), "{err}");

        let none = "[index]\nfile = \"a\"\ncolumn = \"b\"\ncommodities = []\n";
        assert!(AnalysisConfig::from_toml_str(none, Path::new("n.toml"), Path::new(".")).is_err());
    }

    #[test]
    fn windows_and_wavelet_sections_parse() {
        let text = format!(
            "{MINIMAL}\n[wavelet]\ndj = 0.25\nnum_scales = 10\n\n[[windows]]\nlabel = \"w\"\nstart = \"2001-01\"\nend = \"2001-06\"\n"
        );
        let cfg =
            AnalysisConfig::from_toml_str(&text, Path::new("c.toml"), Path::new(".")).unwrap();
        assert_eq!(cfg.windows.len(), 1);
        assert_eq!(cfg.windows[0].end.to_string(), "2001-06");
        let p = cfg.wavelet.params_for(100);
        assert_eq!(p.num_scales(), 10);
        assert_eq!(p.dj(), 0.25);
    }
}
