//! Dense scale-by-time grids and their CSV form.
//!
//! The CSV layout is shared by every exported grid: a header row
//! `period,<time label>,...` followed by one row per scale whose first cell
//! is the Fourier period. Masks use the same layout with `0`/`1` cells.

use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};

/// Row-major `rows x cols` grid; rows are scales, columns are time steps.
#[derive(Clone, Debug, PartialEq)]
pub struct Grid<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Clone> Grid<T> {
    pub fn filled(rows: usize, cols: usize, value: T) -> Self {
        Self {
            rows,
            cols,
            data: vec![value; rows * cols],
        }
    }
}

impl<T> Grid<T> {
    pub fn from_vec(rows: usize, cols: usize, data: Vec<T>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::GridMismatch(format!(
                "{} values cannot fill a {rows}x{cols} grid",
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for j in 0..rows {
            for n in 0..cols {
                data.push(f(j, n));
            }
        }
        Self { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn get(&self, row: usize, col: usize) -> &T {
        &self.data[row * self.cols + col]
    }

    pub fn get_mut(&mut self, row: usize, col: usize) -> &mut T {
        &mut self.data[row * self.cols + col]
    }

    pub fn row(&self, row: usize) -> &[T] {
        &self.data[row * self.cols..(row + 1) * self.cols]
    }

    pub fn row_mut(&mut self, row: usize) -> &mut [T] {
        &mut self.data[row * self.cols..(row + 1) * self.cols]
    }

    pub fn iter_rows(&self) -> impl Iterator<Item = &[T]> {
        self.data.chunks(self.cols.max(1)).take(self.rows)
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn map<U>(&self, f: impl FnMut(&T) -> U) -> Grid<U> {
        Grid {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    pub fn zip_map<U, V>(
        &self,
        other: &Grid<U>,
        mut f: impl FnMut(&T, &U) -> V,
    ) -> Result<Grid<V>> {
        if self.shape() != other.shape() {
            return Err(Error::GridMismatch(format!(
                "shapes {:?} and {:?} differ",
                self.shape(),
                other.shape()
            )));
        }
        Ok(Grid {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| f(a, b))
                .collect(),
        })
    }
}

pub type RealGrid = Grid<f64>;
pub type MaskGrid = Grid<bool>;

/// A real grid read back from CSV, with its axes.
#[derive(Clone, Debug, PartialEq)]
pub struct LabelledGrid {
    pub periods: Vec<f64>,
    pub time_labels: Vec<String>,
    pub grid: RealGrid,
}

fn check_axes<T>(grid: &Grid<T>, periods: &[f64], time_labels: &[String]) -> Result<()> {
    if grid.rows() != periods.len() || grid.cols() != time_labels.len() {
        return Err(Error::GridMismatch(format!(
            "grid {:?} vs axes ({}, {})",
            grid.shape(),
            periods.len(),
            time_labels.len()
        )));
    }
    Ok(())
}

fn write_header<W: Write>(out: &mut W, time_labels: &[String]) -> std::io::Result<()> {
    write!(out, "period")?;
    for t in time_labels {
        write!(out, ",{t}")?;
    }
    writeln!(out)
}

pub fn write_real_grid<W: Write>(
    mut out: W,
    grid: &RealGrid,
    periods: &[f64],
    time_labels: &[String],
) -> Result<()> {
    check_axes(grid, periods, time_labels)?;
    let io = |e| Error::io("<grid>", e);
    write_header(&mut out, time_labels).map_err(io)?;
    for (row, p) in grid.iter_rows().zip(periods) {
        write!(out, "{p}").map_err(io)?;
        for v in row {
            write!(out, ",{v}").map_err(io)?;
        }
        writeln!(out).map_err(io)?;
    }
    Ok(())
}

pub fn write_mask<W: Write>(
    mut out: W,
    mask: &MaskGrid,
    periods: &[f64],
    time_labels: &[String],
) -> Result<()> {
    check_axes(mask, periods, time_labels)?;
    let io = |e| Error::io("<mask>", e);
    write_header(&mut out, time_labels).map_err(io)?;
    for (row, p) in mask.iter_rows().zip(periods) {
        write!(out, "{p}").map_err(io)?;
        for &v in row {
            write!(out, ",{}", u8::from(v)).map_err(io)?;
        }
        writeln!(out).map_err(io)?;
    }
    Ok(())
}

pub fn save_real_grid(
    path: impl AsRef<Path>,
    grid: &RealGrid,
    periods: &[f64],
    time_labels: &[String],
) -> Result<()> {
    let path = path.as_ref();
    let mut buf = Vec::new();
    write_real_grid(&mut buf, grid, periods, time_labels)?;
    std::fs::write(path, buf).map_err(|e| Error::io(path, e))
}

pub fn save_mask(
    path: impl AsRef<Path>,
    mask: &MaskGrid,
    periods: &[f64],
    time_labels: &[String],
) -> Result<()> {
    let path = path.as_ref();
    let mut buf = Vec::new();
    write_mask(&mut buf, mask, periods, time_labels)?;
    std::fs::write(path, buf).map_err(|e| Error::io(path, e))
}

/// Reads a grid written by [`write_real_grid`] or [`write_mask`].
pub fn read_grid<R: Read>(reader: R, origin: &Path) -> Result<LabelledGrid> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(reader);
    let csv_err = |row: usize, e: &dyn std::fmt::Display| Error::Csv {
        path: origin.to_path_buf(),
        row,
        message: e.to_string(),
    };
    let headers = rdr.headers().map_err(|e| csv_err(1, &e))?.clone();
    let time_labels: Vec<String> = headers.iter().skip(1).map(str::to_string).collect();
    let mut periods = Vec::new();
    let mut data = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let row = i + 2;
        let rec = rec.map_err(|e| csv_err(row, &e))?;
        let mut cells = rec.iter();
        let num = |s: Option<&str>, column: &str| -> Result<f64> {
            let s = s.unwrap_or("");
            s.parse::<f64>().map_err(|_| Error::NonNumeric {
                path: origin.to_path_buf(),
                row,
                column: column.to_string(),
                value: s.to_string(),
            })
        };
        periods.push(num(cells.next(), "period")?);
        for label in &time_labels {
            data.push(num(cells.next(), label)?);
        }
    }
    let grid = Grid::from_vec(periods.len(), time_labels.len(), data)?;
    Ok(LabelledGrid {
        periods,
        time_labels,
        grid,
    })
}

pub fn load_grid(path: impl AsRef<Path>) -> Result<LabelledGrid> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_grid(file, path)
}

/// Writes the cone of influence as `time,coi` rows.
pub fn save_coi(path: impl AsRef<Path>, coi: &[f64], time_labels: &[String]) -> Result<()> {
    let path = path.as_ref();
    let mut buf = Vec::new();
    writeln!(buf, "time,coi").map_err(|e| Error::io(path, e))?;
    for (t, c) in time_labels.iter().zip(coi) {
        writeln!(buf, "{t},{c}").map_err(|e| Error::io(path, e))?;
    }
    std::fs::write(path, buf).map_err(|e| Error::io(path, e))
}

pub fn load_coi(path: impl AsRef<Path>) -> Result<(Vec<String>, Vec<f64>)> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut rdr = csv::Reader::from_reader(file);
    let mut labels = Vec::new();
    let mut coi = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let row = i + 2;
        let rec = rec.map_err(|e| Error::Csv {
            path: path.to_path_buf(),
            row,
            message: e.to_string(),
        })?;
        let raw = rec.get(1).unwrap_or("");
        let value = raw.parse::<f64>().map_err(|_| Error::NonNumeric {
            path: path.to_path_buf(),
            row,
            column: "coi".into(),
            value: raw.to_string(),
        })?;
        labels.push(rec.get(0).unwrap_or("").to_string());
        coi.push(value);
    }
    Ok((labels, coi))
}
