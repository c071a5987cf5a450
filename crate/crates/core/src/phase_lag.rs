//! Lead/lag from relative phase, region extraction and band summaries.
//!
//! Phase convention: `delta_phi > 0` (arrow in the upper half-plane) means
//! the first series leads the second. A phase difference converts to a
//! time delay at period `T` as `|delta_phi| T / (2 pi)`.

use std::f64::consts::PI;
use std::fmt;

use crate::coherence::CoherenceField;
use crate::error::{Error, Result};
use crate::grid::{MaskGrid, RealGrid};
use crate::significance::SignificanceMask;
use crate::time::YearMonth;

pub const DEFAULT_PHASE_TOLERANCE: f64 = 0.15;
pub const DEFAULT_BAND_SPLIT: f64 = 6.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Direction {
    InPhase,
    AntiPhase,
    FirstLeads,
    FirstLags,
}

impl Direction {
    /// Reverses the roles of the two series.
    pub fn swapped(self) -> Self {
        match self {
            Direction::FirstLeads => Direction::FirstLags,
            Direction::FirstLags => Direction::FirstLeads,
            d => d,
        }
    }

    /// Label used in summary tables, where the first series is the index.
    pub fn table_label(self) -> &'static str {
        match self {
            Direction::InPhase => "in_phase",
            Direction::AntiPhase => "anti_phase",
            Direction::FirstLeads => "index_leads",
            Direction::FirstLags => "index_lags",
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Direction::InPhase => "in_phase",
            Direction::AntiPhase => "anti_phase",
            Direction::FirstLeads => "first_leads",
            Direction::FirstLags => "first_lags",
        })
    }
}

/// `|delta_phi| * period / (2 pi)`.
pub fn time_lag(delta_phi: f64, period: f64) -> f64 {
    delta_phi.abs() * period / (2.0 * PI)
}

pub fn classify_direction(delta_phi: f64, phase_tolerance: f64) -> Direction {
    if delta_phi.abs() < phase_tolerance {
        Direction::InPhase
    } else if (PI - delta_phi.abs()).abs() < phase_tolerance {
        Direction::AntiPhase
    } else if delta_phi > 0.0 {
        Direction::FirstLeads
    } else {
        Direction::FirstLags
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhaseRelation {
    pub delta_phi: f64,
    pub period: f64,
    pub direction: Direction,
    pub lag_months: f64,
}

impl PhaseRelation {
    pub fn new(delta_phi: f64, period: f64, phase_tolerance: f64) -> Self {
        Self {
            delta_phi,
            period,
            direction: classify_direction(delta_phi, phase_tolerance),
            lag_months: time_lag(delta_phi, period),
        }
    }
}

/// One significant cell with the values needed downstream.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RegionCell {
    pub row: usize,
    pub col: usize,
    pub period: f64,
    pub delta_phi: f64,
    pub r2: f64,
}

impl RegionCell {
    pub fn relation(&self, phase_tolerance: f64) -> PhaseRelation {
        PhaseRelation::new(self.delta_phi, self.period, phase_tolerance)
    }

    pub fn lag(&self) -> f64 {
        time_lag(self.delta_phi, self.period)
    }
}

/// A 4-connected set of cells significant in both coherence and cross power.
#[derive(Clone, Debug, PartialEq)]
pub struct Region {
    pub cells: Vec<RegionCell>,
}

impl Region {
    pub fn area(&self) -> usize {
        self.cells.len()
    }

    /// `(min_col, max_col)`.
    pub fn time_span(&self) -> (usize, usize) {
        let lo = self.cells.iter().map(|c| c.col).min().unwrap_or(0);
        let hi = self.cells.iter().map(|c| c.col).max().unwrap_or(0);
        (lo, hi)
    }

    /// `(min_period, max_period)`.
    pub fn period_span(&self) -> (f64, f64) {
        let lo = self
            .cells
            .iter()
            .map(|c| c.period)
            .fold(f64::INFINITY, f64::min);
        let hi = self
            .cells
            .iter()
            .map(|c| c.period)
            .fold(f64::NEG_INFINITY, f64::max);
        (lo, hi)
    }

    pub fn mean_r2(&self) -> f64 {
        self.cells.iter().map(|c| c.r2).sum::<f64>() / self.cells.len() as f64
    }

    pub fn mean_lag(&self) -> f64 {
        self.cells.iter().map(RegionCell::lag).sum::<f64>() / self.cells.len() as f64
    }

    /// Whether any cell falls in `cols` (inclusive) and `periods` (inclusive).
    pub fn intersects(&self, cols: (usize, usize), periods: (f64, f64)) -> bool {
        self.cells.iter().any(|c| {
            (cols.0..=cols.1).contains(&c.col) && c.period >= periods.0 && c.period <= periods.1
        })
    }
}

/// Regions where coherence and cross power are both significant, outside
/// the cone of influence. Phases come from the smoothed cross spectrum.
pub fn significant_regions(
    wtc_mask: &SignificanceMask,
    xwt_mask: &SignificanceMask,
    coherence: &CoherenceField,
) -> Result<Vec<Region>> {
    significant_regions_with_phase(
        wtc_mask.mask(),
        xwt_mask.mask(),
        coherence.periods(),
        coherence.coi(),
        coherence.r2(),
        coherence.phase(),
    )
}

/// [`significant_regions`] on bare grids, with an explicit phase source
/// (e.g. the unsmoothed cross-wavelet phase).
pub fn significant_regions_with_phase(
    wtc_mask: &MaskGrid,
    xwt_mask: &MaskGrid,
    periods: &[f64],
    coi: &[f64],
    r2: &RealGrid,
    phase: &RealGrid,
) -> Result<Vec<Region>> {
    let shape = wtc_mask.shape();
    if xwt_mask.shape() != shape
        || r2.shape() != shape
        || phase.shape() != shape
        || periods.len() != shape.0
        || coi.len() != shape.1
    {
        return Err(Error::GridMismatch(
            "masks, coherence and axes must share one grid".into(),
        ));
    }
    let (rows, cols) = shape;
    let active = MaskGrid::from_fn(rows, cols, |j, n| {
        *wtc_mask.get(j, n) && *xwt_mask.get(j, n) && periods[j] < coi[n]
    });
    let labels = label_components(&active);
    let mut regions: Vec<Region> = Vec::new();
    for j in 0..rows {
        for n in 0..cols {
            if let Some(id) = labels[j * cols + n] {
                if id == regions.len() {
                    regions.push(Region { cells: Vec::new() });
                }
                regions[id].cells.push(RegionCell {
                    row: j,
                    col: n,
                    period: periods[j],
                    delta_phi: *phase.get(j, n),
                    r2: *r2.get(j, n),
                });
            }
        }
    }
    Ok(regions)
}

/// 4-connected component labels, numbered in row-major order of first cell.
fn label_components(mask: &MaskGrid) -> Vec<Option<usize>> {
    let (rows, cols) = mask.shape();
    let mut labels: Vec<Option<usize>> = vec![None; rows * cols];
    let mut next = 0;
    let mut stack = Vec::new();
    for j in 0..rows {
        for n in 0..cols {
            if !*mask.get(j, n) || labels[j * cols + n].is_some() {
                continue;
            }
            labels[j * cols + n] = Some(next);
            stack.push((j, n));
            while let Some((r, c)) = stack.pop() {
                let mut visit = |r2: usize, c2: usize| {
                    let idx = r2 * cols + c2;
                    if *mask.get(r2, c2) && labels[idx].is_none() {
                        labels[idx] = Some(next);
                        stack.push((r2, c2));
                    }
                };
                if r > 0 {
                    visit(r - 1, c);
                }
                if r + 1 < rows {
                    visit(r + 1, c);
                }
                if c > 0 {
                    visit(r, c - 1);
                }
                if c + 1 < cols {
                    visit(r, c + 1);
                }
            }
            next += 1;
        }
    }
    labels
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Band {
    /// Period below the split.
    High,
    /// Period at or above the split.
    Low,
}

impl Band {
    pub fn of(period: f64, split: f64) -> Self {
        if period < split {
            Band::High
        } else {
            Band::Low
        }
    }
}

impl fmt::Display for Band {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Band::High => "high",
            Band::Low => "low",
        })
    }
}

/// Inclusive calendar window, e.g. a crisis period.
#[derive(Clone, Debug, PartialEq, Eq, serde::Deserialize, serde::Serialize)]
pub struct Window {
    pub label: String,
    pub start: YearMonth,
    pub end: YearMonth,
}

impl Window {
    pub fn new(label: impl Into<String>, start: YearMonth, end: YearMonth) -> Self {
        Self {
            label: label.into(),
            start,
            end,
        }
    }

    pub fn contains(&self, month: YearMonth) -> bool {
        self.start <= month && month <= self.end
    }

    /// The default crisis windows: dot-com (2001), global financial crisis
    /// (2008) and Covid-19 (2020).
    pub fn default_crises() -> Vec<Window> {
        let ym = |y, m| YearMonth::new(y, m).expect("valid month");
        vec![
            Window::new("2001", ym(2000, 3), ym(2002, 12)),
            Window::new("2008", ym(2007, 6), ym(2009, 12)),
            Window::new("2020", ym(2020, 1), ym(2021, 12)),
        ]
    }
}

/// One row of a lead/lag table.
#[derive(Clone, Debug, PartialEq)]
pub struct RegionSummary {
    pub window: String,
    pub band: Band,
    pub direction: Direction,
    pub delay_min: f64,
    pub delay_max: f64,
    pub area: usize,
    pub mean_r2: f64,
}

/// Calendar position of grid columns.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TimeAxis {
    pub start: YearMonth,
    pub step: u32,
}

impl TimeAxis {
    pub fn month_at(&self, col: usize) -> YearMonth {
        self.start.add_months(col as i64 * self.step as i64)
    }
}

/// Pools region cells by window and band.
///
/// Each row takes the majority direction by cell count (ties become
/// `InPhase` with a warning) and the min/max delay over all its cells.
/// Window/band combinations without cells are omitted.
pub fn band_summary(
    regions: &[Region],
    windows: &[Window],
    axis: TimeAxis,
    band_split: f64,
    phase_tolerance: f64,
) -> Vec<RegionSummary> {
    let mut out = Vec::new();
    for window in windows {
        for band in [Band::High, Band::Low] {
            let cells: Vec<&RegionCell> = regions
                .iter()
                .flat_map(|r| &r.cells)
                .filter(|c| {
                    Band::of(c.period, band_split) == band && window.contains(axis.month_at(c.col))
                })
                .collect();
            if cells.is_empty() {
                continue;
            }
            let mut counts = [0usize; 4];
            let order = [
                Direction::FirstLeads,
                Direction::FirstLags,
                Direction::InPhase,
                Direction::AntiPhase,
            ];
            for c in &cells {
                let d = classify_direction(c.delta_phi, phase_tolerance);
                counts[order.iter().position(|o| *o == d).expect("listed")] += 1;
            }
            let best = *counts.iter().max().expect("non-empty");
            let winners: Vec<Direction> = order
                .iter()
                .zip(counts)
                .filter(|(_, c)| *c == best)
                .map(|(d, _)| *d)
                .collect();
            let direction = if winners.len() == 1 {
                winners[0]
            } else {
                log::warn!(
                    "window {} {} band: direction tie {:?}, reporting in_phase",
                    window.label,
                    band,
                    winners
                );
                Direction::InPhase
            };
            let lags = cells.iter().map(|c| c.lag());
            let delay_min = lags.clone().fold(f64::INFINITY, f64::min);
            let delay_max = lags.fold(f64::NEG_INFINITY, f64::max);
            out.push(RegionSummary {
                window: window.label.clone(),
                band,
                direction,
                delay_min,
                delay_max,
                area: cells.len(),
                mean_r2: cells.iter().map(|c| c.r2).sum::<f64>() / cells.len() as f64,
            });
        }
    }
    out
}
