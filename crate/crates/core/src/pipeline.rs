//! End-to-end analysis of (index, commodity) pairs and the files it writes.

use std::path::{Path, PathBuf};

use rayon::prelude::*;

use crate::coherence::{self, CoherenceField, CrossField, Smoother};
use crate::config::{
    AnalysisConfig, ImageFormat, PhaseSource, SeriesSource, Transform, WaveletSection,
};
use crate::cwt::{CwtPlan, WaveletField};
use crate::error::{Error, Result};
use crate::grid::{self, MaskGrid, RealGrid};
use crate::ingest::{self, AR1Params, TimeSeries};
use crate::phase_lag::{self, Band, Region, RegionSummary, TimeAxis, Window};
use crate::render::{self, HeatmapLayers, HeatmapStyle, RgbImage, ValueRange};
use crate::significance::{self, MonteCarloConfig, SignificanceMask, SignificanceMethod};

/// Everything [`analyze_pair`] needs besides the data.
#[derive(Clone, Debug, PartialEq)]
pub struct PairSettings {
    pub wavelet: WaveletSection,
    pub monte_carlo: MonteCarloConfig,
    pub windows: Vec<Window>,
    pub band_split: f64,
    pub phase_tolerance: f64,
    pub phase_source: PhaseSource,
}

impl Default for PairSettings {
    fn default() -> Self {
        Self {
            wavelet: WaveletSection::default(),
            monte_carlo: MonteCarloConfig::default(),
            windows: Window::default_crises(),
            band_split: phase_lag::DEFAULT_BAND_SPLIT,
            phase_tolerance: phase_lag::DEFAULT_PHASE_TOLERANCE,
            phase_source: PhaseSource::Wtc,
        }
    }
}

impl From<&AnalysisConfig> for PairSettings {
    fn from(c: &AnalysisConfig) -> Self {
        Self {
            wavelet: c.wavelet.clone(),
            monte_carlo: c.significance.monte_carlo(),
            windows: c.windows.clone(),
            band_split: c.band_split,
            phase_tolerance: c.phase_tolerance,
            phase_source: c.phase_source,
        }
    }
}

/// In-memory result for one pair. `x` is the index, `y` the commodity.
#[derive(Clone, Debug)]
pub struct PairAnalysis {
    pub x: TimeSeries,
    pub y: TimeSeries,
    pub field_x: WaveletField,
    pub field_y: WaveletField,
    pub cross: CrossField,
    pub coherence: CoherenceField,
    pub ar1_x: AR1Params,
    pub ar1_y: AR1Params,
    pub power_mask_x: SignificanceMask,
    pub power_mask_y: SignificanceMask,
    pub wtc_mask: SignificanceMask,
    pub xwt_mask: SignificanceMask,
    pub regions: Vec<Region>,
    pub summaries: Vec<RegionSummary>,
}

impl PairAnalysis {
    pub fn time_axis(&self) -> TimeAxis {
        TimeAxis {
            start: self.x.start(),
            step: self.x.step(),
        }
    }

    /// Phase grid used for regions and arrows.
    pub fn phase(&self, source: PhaseSource) -> RealGrid {
        match source {
            PhaseSource::Wtc => self.coherence.phase().clone(),
            PhaseSource::Xwt => self.cross.phase(),
        }
    }
}

/// Loads and transforms one configured series (no standardization yet).
pub fn load_source(source: &SeriesSource) -> Result<TimeSeries> {
    let raw = ingest::load_csv(&source.file, &source.time_column, &source.column)?;
    let s = match source.transform {
        Transform::Levels => raw,
        Transform::LogReturns => ingest::log_returns(&raw)?,
    };
    Ok(s.with_name(source.label()))
}

/// Loads both sources, aligns them and standardizes as configured.
pub fn prepare_pair(
    index: &SeriesSource,
    commodity: &SeriesSource,
) -> Result<(TimeSeries, TimeSeries)> {
    let x = load_source(index)?;
    let y = load_source(commodity)?;
    let (x, y) = ingest::align(&x, &y)?;
    let x = if index.standardize {
        ingest::standardize(&x)?
    } else {
        x
    };
    let y = if commodity.standardize {
        ingest::standardize(&y)?
    } else {
        y
    };
    Ok((x, y))
}

fn check_windows(windows: &[Window], x: &TimeSeries) -> Result<()> {
    for w in windows {
        if w.start < x.start() || w.end > x.end() {
            return Err(Error::InvalidParams(format!(
                "window '{}' ({}..{}) is outside the aligned data range {}..{}",
                w.label,
                w.start,
                w.end,
                x.start(),
                x.end()
            )));
        }
    }
    Ok(())
}

/// Runs transforms, coherence, all four significance tests and the lead/lag
/// summary on two aligned series.
pub fn analyze_pair(
    x: &TimeSeries,
    y: &TimeSeries,
    settings: &PairSettings,
) -> Result<PairAnalysis> {
    if x.len() != y.len() || x.start() != y.start() || x.step() != y.step() {
        return Err(Error::GridMismatch(format!(
            "series '{}' and '{}' are not aligned",
            x.name(),
            y.name()
        )));
    }
    if x.step() != 1 {
        return Err(Error::InvalidParams(
            "only monthly series (step 1) are supported".into(),
        ));
    }
    check_windows(&settings.windows, x)?;
    settings.monte_carlo.validate()?;

    let n = x.len();
    let params = settings.wavelet.params_for(n);
    let plan = CwtPlan::new(&params, n)?;
    let field_x = plan.transform(x)?;
    let field_y = plan.transform(y)?;
    let cross = coherence::xwt(&field_x, &field_y)?;
    let smoother = Smoother::for_field(&field_x)?;
    let coherence = coherence::wtc_with(&smoother, &field_x, &field_y)?;

    let ar1_x = ingest::fit_ar1(x)?;
    let ar1_y = ingest::fit_ar1(y)?;
    let level = settings.monte_carlo.level;
    let power_mask_x = significance::power_significance(&field_x, &ar1_x, level)?;
    let power_mask_y = significance::power_significance(&field_y, &ar1_y, level)?;
    let thresholds =
        significance::surrogate_thresholds(&params, n, &ar1_x, &ar1_y, &settings.monte_carlo)?;
    let wtc_mask = SignificanceMask::from_thresholds(
        coherence.r2(),
        thresholds.wtc,
        level,
        SignificanceMethod::MonteCarloWtc,
    )?;
    let stat = significance::normalized_cross_power(&cross, field_x.variance(), field_y.variance());
    let xwt_mask = SignificanceMask::from_thresholds(
        &stat,
        thresholds.xwt,
        level,
        SignificanceMethod::MonteCarloXwt,
    )?;

    let phase = match settings.phase_source {
        PhaseSource::Wtc => coherence.phase().clone(),
        PhaseSource::Xwt => cross.phase(),
    };
    let regions = phase_lag::significant_regions_with_phase(
        wtc_mask.mask(),
        xwt_mask.mask(),
        coherence.periods(),
        coherence.coi(),
        coherence.r2(),
        &phase,
    )?;
    let axis = TimeAxis {
        start: x.start(),
        step: x.step(),
    };
    let summaries = phase_lag::band_summary(
        &regions,
        &settings.windows,
        axis,
        settings.band_split,
        settings.phase_tolerance,
    );
    log::info!(
        "{} vs {}: {} scales, {} regions, {} table rows",
        x.name(),
        y.name(),
        params.num_scales(),
        regions.len(),
        summaries.len()
    );
    Ok(PairAnalysis {
        x: x.clone(),
        y: y.clone(),
        field_x,
        field_y,
        cross,
        coherence,
        ar1_x,
        ar1_y,
        power_mask_x,
        power_mask_y,
        wtc_mask,
        xwt_mask,
        regions,
        summaries,
    })
}

/// Header of `summary.csv`.
pub const SUMMARY_HEADER: [&str; 8] = [
    "commodity",
    "window",
    "band",
    "direction",
    "delay_min_months",
    "delay_max_months",
    "area_cells",
    "mean_r2",
];

fn summary_record(commodity: &str, s: &RegionSummary) -> [String; 8] {
    [
        commodity.to_string(),
        s.window.clone(),
        s.band.to_string(),
        s.direction.table_label().to_string(),
        format!("{:.3}", s.delay_min),
        format!("{:.3}", s.delay_max),
        s.area.to_string(),
        format!("{:.4}", s.mean_r2),
    ]
}

fn write_csv_rows(
    path: &Path,
    header: &[&str],
    rows: impl IntoIterator<Item = Vec<String>>,
) -> Result<()> {
    let csv_err = |e: csv::Error| Error::Csv {
        path: path.to_path_buf(),
        row: 0,
        message: e.to_string(),
    };
    let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
    w.write_record(header).map_err(csv_err)?;
    for r in rows {
        w.write_record(&r).map_err(csv_err)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Directory name for a series label: anything but `[A-Za-z0-9_-]` becomes `_`.
pub fn safe_name(label: &str) -> String {
    label
        .chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || c == '-' || c == '_' {
                c
            } else {
                '_'
            }
        })
        .collect()
}

/// Options for [`write_pair`].
#[derive(Clone, Debug, PartialEq)]
pub struct OutputOptions {
    pub style: HeatmapStyle,
    pub format: ImageFormat,
    pub phase_source: PhaseSource,
}

impl Default for OutputOptions {
    fn default() -> Self {
        Self {
            style: HeatmapStyle::default(),
            format: ImageFormat::Png,
            phase_source: PhaseSource::Wtc,
        }
    }
}

/// Writes grids, masks, thresholds, images and `summary.csv` for one pair
/// into `dir`, returning the files written.
pub fn write_pair(
    analysis: &PairAnalysis,
    dir: &Path,
    opts: &OutputOptions,
) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let labels = analysis.x.time_labels();
    let periods = analysis.coherence.periods();
    let mut written = Vec::new();
    let mut file = |name: &str| {
        let p = dir.join(name);
        written.push(p.clone());
        p
    };

    crate::synth::write_series_csv(
        file("series.csv"),
        &[analysis.x.clone(), analysis.y.clone()],
    )?;
    let phase = analysis.phase(opts.phase_source);
    let real: [(&str, RealGrid); 6] = [
        ("power_index.csv", analysis.field_x.power()),
        ("power_commodity.csv", analysis.field_y.power()),
        ("xwt_power.csv", analysis.cross.power()),
        ("xwt_phase.csv", analysis.cross.phase()),
        ("wtc_r2.csv", analysis.coherence.r2().clone()),
        ("wtc_phase.csv", analysis.coherence.phase().clone()),
    ];
    for (name, g) in &real {
        grid::save_real_grid(file(name), g, periods, &labels)?;
    }
    let masks: [(&str, &SignificanceMask); 4] = [
        ("mask_power_index.csv", &analysis.power_mask_x),
        ("mask_power_commodity.csv", &analysis.power_mask_y),
        ("mask_xwt.csv", &analysis.xwt_mask),
        ("mask_wtc.csv", &analysis.wtc_mask),
    ];
    for (name, m) in &masks {
        grid::save_mask(file(name), m.mask(), periods, &labels)?;
    }
    grid::save_coi(file("coi.csv"), analysis.coherence.coi(), &labels)?;

    let thresholds = (0..periods.len()).map(|j| {
        let mut row = vec![periods[j].to_string()];
        row.extend(masks.iter().map(|(_, m)| m.thresholds()[j].to_string()));
        row
    });
    write_csv_rows(
        &file("thresholds.csv"),
        &["period", "power_index", "power_commodity", "xwt", "wtc"],
        thresholds,
    )?;

    let commodity = analysis.y.name();
    write_csv_rows(
        &file("summary.csv"),
        &SUMMARY_HEADER,
        analysis
            .summaries
            .iter()
            .map(|s| summary_record(commodity, s).to_vec()),
    )?;

    let ext = opts.format.extension();
    let coi = analysis.coherence.coi();
    let heat = |g: &RealGrid, mask: &MaskGrid, phase: Option<&RealGrid>, range: ValueRange| {
        let style = HeatmapStyle {
            range,
            ..opts.style.clone()
        };
        render::render_heatmap(
            &HeatmapLayers {
                grid: g,
                periods,
                coi,
                mask: Some(mask),
                phase,
            },
            &style,
        )
    };
    let power = render::stack_vertical(
        &[
            heat(
                &real[0].1,
                analysis.power_mask_x.mask(),
                None,
                ValueRange::Auto,
            )?,
            heat(
                &real[1].1,
                analysis.power_mask_y.mask(),
                None,
                ValueRange::Auto,
            )?,
        ],
        4,
    );
    let xwt_img = heat(
        &real[2].1,
        analysis.xwt_mask.mask(),
        Some(&phase),
        ValueRange::Auto,
    )?;
    let wtc_img = heat(
        &real[4].1,
        analysis.wtc_mask.mask(),
        Some(&phase),
        ValueRange::Fixed(0.0, 1.0),
    )?;
    for (stem, img) in [("power", &power), ("xwt", &xwt_img), ("wtc", &wtc_img)] {
        let p = file(&format!("{stem}.{ext}"));
        save_image(img, &p, opts.format)?;
    }
    Ok(written)
}

fn save_image(img: &RgbImage, path: &Path, format: ImageFormat) -> Result<()> {
    let f = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = std::io::BufWriter::new(f);
    match format {
        ImageFormat::Png => img.write_png(&mut w)?,
        ImageFormat::Ppm => img.write_ppm(&mut w).map_err(|e| Error::io(path, e))?,
    }
    use std::io::Write as _;
    w.flush().map_err(|e| Error::io(path, e))
}

/// Result of [`run_pair`].
#[derive(Clone, Debug)]
pub struct PairReport {
    pub commodity: String,
    pub dir: PathBuf,
    pub summaries: Vec<RegionSummary>,
}

fn output_options(config: &AnalysisConfig) -> OutputOptions {
    OutputOptions {
        style: config.render.style(),
        format: config.render.format,
        phase_source: config.phase_source,
    }
}

/// Analyzes the index against one commodity and writes `<output_dir>/<name>/`.
pub fn run_pair(config: &AnalysisConfig, commodity: &SeriesSource) -> Result<PairReport> {
    let (x, y) = prepare_pair(&config.index, commodity)?;
    let analysis = analyze_pair(&x, &y, &PairSettings::from(config))?;
    let dir = config.output_dir.join(safe_name(commodity.label()));
    write_pair(&analysis, &dir, &output_options(config))?;
    Ok(PairReport {
        commodity: commodity.label().to_string(),
        dir,
        summaries: analysis.summaries,
    })
}

/// Result of [`run_batch`].
#[derive(Clone, Debug)]
pub struct BatchReport {
    pub pairs: Vec<PairReport>,
    pub summary_path: PathBuf,
    pub coverage_path: PathBuf,
}

/// Runs every configured pair and writes the combined `summary.csv` plus
/// `coverage.csv` (one row per commodity, window and band).
pub fn run_batch(config: &AnalysisConfig) -> Result<BatchReport> {
    std::fs::create_dir_all(&config.output_dir).map_err(|e| Error::io(&config.output_dir, e))?;
    let pairs: Vec<PairReport> = config
        .commodities
        .par_iter()
        .map(|c| run_pair(config, c))
        .collect::<Result<_>>()?;

    let summary_path = config.output_dir.join("summary.csv");
    write_csv_rows(
        &summary_path,
        &SUMMARY_HEADER,
        pairs.iter().flat_map(|p| {
            p.summaries
                .iter()
                .map(|s| summary_record(&p.commodity, s).to_vec())
        }),
    )?;

    let coverage_path = config.output_dir.join("coverage.csv");
    let mut coverage = Vec::new();
    for p in &pairs {
        for w in &config.windows {
            for band in [Band::High, Band::Low] {
                let hit = p
                    .summaries
                    .iter()
                    .any(|s| s.window == w.label && s.band == band);
                coverage.push(vec![
                    p.commodity.clone(),
                    w.label.clone(),
                    band.to_string(),
                    u8::from(hit).to_string(),
                ]);
            }
        }
    }
    write_csv_rows(
        &coverage_path,
        &["commodity", "window", "band", "has_region"],
        coverage,
    )?;
    Ok(BatchReport {
        pairs,
        summary_path,
        coverage_path,
    })
}

/// Loads a mask CSV written by [`write_pair`].
pub fn load_mask(path: impl AsRef<Path>) -> Result<MaskGrid> {
    Ok(grid::load_grid(path)?.grid.map(|&v| v > 0.5))
}
