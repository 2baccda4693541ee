//! Loading, validation and windowing of time-series panels.
//!
//! A panel is a set of equal-unit scalar series (one per entity) observed
//! over a contiguous range of integer periods, read from wide CSV: header
//! row of entity codes, first column the period label.

use std::io::Read;

use crate::error::{Error, Result};

/// A validated, immutable panel of time series.
///
/// Values are stored column-major: `columns[e]` is the full series of
/// entity `e`, one value per period, rows sorted by period.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesPanel {
    entities: Vec<String>,
    periods: Vec<i64>,
    columns: Vec<Vec<f64>>,
}

/// An inclusive period range selecting a sub-panel.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AnalysisWindow {
    start: i64,
    end: i64,
}

impl AnalysisWindow {
    /// Window length in periods must be at least 4: a two-parameter fit
    /// plus a significance test needs no fewer.
    pub const MIN_LEN: usize = 4;

    pub fn new(start: i64, end: i64) -> Result<Self> {
        if start > end {
            return Err(Error::Contract(format!(
                "window start {start} after end {end}"
            )));
        }
        let len = (end - start + 1) as usize;
        if len < Self::MIN_LEN {
            return Err(Error::Contract(format!(
                "window ({start}, {end}) has {len} periods, need at least {}",
                Self::MIN_LEN
            )));
        }
        Ok(Self { start, end })
    }

    pub fn start(&self) -> i64 {
        self.start
    }

    pub fn end(&self) -> i64 {
        self.end
    }

    /// Number of periods covered (N).
    pub fn len(&self) -> usize {
        (self.end - self.start + 1) as usize
    }

    pub fn is_empty(&self) -> bool {
        false // start <= end is a construction invariant
    }
}

impl SeriesPanel {
    /// Build a panel from parts, enforcing every invariant. Rows are
    /// expected period-major: `rows[r][e]` is entity `e` at period `r`.
    pub fn new(entities: Vec<String>, periods: Vec<i64>, rows: Vec<Vec<f64>>) -> Result<Self> {
        if entities.is_empty() || periods.is_empty() {
            return Err(Error::Schema("empty panel".into()));
        }
        for (i, code) in entities.iter().enumerate() {
            if entities[..i].contains(code) {
                return Err(Error::Schema(format!("duplicate entity {code}")));
            }
        }
        if rows.len() != periods.len() {
            return Err(Error::Schema(format!(
                "{} period labels but {} rows",
                periods.len(),
                rows.len()
            )));
        }

        // Sort rows by period, then demand contiguity.
        let mut order: Vec<usize> = (0..periods.len()).collect();
        order.sort_by_key(|&i| periods[i]);
        let periods: Vec<i64> = order.iter().map(|&i| periods[i]).collect();
        for w in periods.windows(2) {
            if w[1] == w[0] {
                return Err(Error::Schema(format!("duplicate period {}", w[0])));
            }
            if w[1] != w[0] + 1 {
                return Err(Error::PeriodGap {
                    missing: w[0] + 1,
                    before: w[0],
                    after: w[1],
                });
            }
        }

        let mut columns = vec![Vec::with_capacity(periods.len()); entities.len()];
        for &r in &order {
            let row = &rows[r];
            if row.len() != entities.len() {
                return Err(Error::Schema(format!(
                    "row for period {} has {} values, expected {}",
                    periods[r],
                    row.len(),
                    entities.len()
                )));
            }
            for (e, &v) in row.iter().enumerate() {
                columns[e].push(v);
            }
        }

        Ok(Self {
            entities,
            periods,
            columns,
        })
    }

    /// Entity codes, in input order.
    pub fn entities(&self) -> &[String] {
        &self.entities
    }

    /// Period labels, strictly increasing with step 1.
    pub fn periods(&self) -> &[i64] {
        &self.periods
    }

    /// Number of entities.
    pub fn n_entities(&self) -> usize {
        self.entities.len()
    }

    /// Number of periods (window length N when already windowed).
    pub fn n_periods(&self) -> usize {
        self.periods.len()
    }

    /// The full series of entity `e`.
    pub fn series(&self, e: usize) -> &[f64] {
        &self.columns[e]
    }

    /// Restrict the panel to an inclusive window. The entity set is
    /// unchanged; applying the same window twice is a no-op.
    pub fn window(&self, w: AnalysisWindow) -> Result<SeriesPanel> {
        let (have_start, have_end) = (self.periods[0], *self.periods.last().unwrap());
        if w.start < have_start || w.end > have_end {
            return Err(Error::WindowOutOfRange {
                start: w.start,
                end: w.end,
                have_start,
                have_end,
            });
        }
        let lo = (w.start - have_start) as usize;
        let hi = (w.end - have_start) as usize;
        Ok(SeriesPanel {
            entities: self.entities.clone(),
            periods: self.periods[lo..=hi].to_vec(),
            columns: self
                .columns
                .iter()
                .map(|c| c[lo..=hi].to_vec())
                .collect(),
        })
    }
}

/// Parse a wide-format CSV panel: header `period,CODE,CODE,...`, one row
/// per period. The first header cell is ignored. Scientific notation is
/// accepted; any non-finite or malformed number is a parse error naming
/// the 1-based row and column.
pub fn load_panel<R: Read>(source: R) -> Result<SeriesPanel> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(source);

    let headers = reader
        .headers()
        .map_err(|e| Error::Schema(format!("unreadable header: {e}")))?
        .clone();
    if headers.len() < 2 {
        return Err(Error::Schema("header must name at least one entity".into()));
    }
    let entities: Vec<String> = headers.iter().skip(1).map(str::to_owned).collect();

    let mut periods = Vec::new();
    let mut rows = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let row_no = i + 2; // 1-based, counting the header
        let record = record.map_err(|e| Error::Parse {
            row: row_no,
            col: 0,
            message: e.to_string(),
        })?;
        if record.len() != headers.len() {
            return Err(Error::Schema(format!(
                "row {row_no} has {} fields, expected {}",
                record.len(),
                headers.len()
            )));
        }
        let period: i64 = record[0].parse().map_err(|_| Error::Parse {
            row: row_no,
            col: 1,
            message: format!("invalid period label {:?}", &record[0]),
        })?;
        let mut values = Vec::with_capacity(entities.len());
        for (j, field) in record.iter().skip(1).enumerate() {
            let v: f64 = field.parse().map_err(|_| Error::Parse {
                row: row_no,
                col: j + 2,
                message: format!("invalid number {field:?}"),
            })?;
            if !v.is_finite() {
                return Err(Error::Parse {
                    row: row_no,
                    col: j + 2,
                    message: format!("non-finite value {field:?}"),
                });
            }
            values.push(v);
        }
        periods.push(period);
        rows.push(values);
    }

    SeriesPanel::new(entities, periods, rows)
}
