//! CSV ingestion, date-indexed series and the log/difference/lag transforms.
//!
//! Series are immutable once built. A [`TimeSeries`] always has a contiguous,
//! strictly increasing index at its declared frequency and only finite values;
//! every transform returns a new series.

use std::collections::BTreeMap;
use std::fmt;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Frequency {
    Monthly,
    Quarterly,
    Annual,
}

impl Frequency {
    pub fn periods_per_year(self) -> u32 {
        match self {
            Frequency::Monthly => 12,
            Frequency::Quarterly => 4,
            Frequency::Annual => 1,
        }
    }
}

/// A period stamp stored as `(year, sub-period)`; `sub` is 1-based
/// (month 1..=12, quarter 1..=4, always 1 for annual data).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Period {
    pub year: i32,
    pub sub: u32,
    pub freq: Frequency,
}

impl Period {
    pub fn new(year: i32, sub: u32, freq: Frequency) -> Result<Period> {
        if sub == 0 || sub > freq.periods_per_year() {
            return Err(Error::InvalidParameters(format!(
                "sub-period {sub} out of range for {freq:?} data"
            )));
        }
        Ok(Period { year, sub, freq })
    }

    pub fn ordinal(&self) -> i64 {
        i64::from(self.year) * i64::from(self.freq.periods_per_year()) + i64::from(self.sub - 1)
    }

    pub fn succ(&self) -> Period {
        self.offset(1)
    }

    pub fn offset(&self, by: i64) -> Period {
        let ppy = i64::from(self.freq.periods_per_year());
        let ord = self.ordinal() + by;
        Period {
            year: ord.div_euclid(ppy) as i32,
            sub: ord.rem_euclid(ppy) as u32 + 1,
            freq: self.freq,
        }
    }
}

impl fmt::Display for Period {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.freq {
            Frequency::Monthly => write!(f, "{:04}-{:02}", self.year, self.sub),
            Frequency::Quarterly => write!(f, "{:04}-Q{}", self.year, self.sub),
            Frequency::Annual => write!(f, "{:04}", self.year),
        }
    }
}

/// Accepted spellings of the date column.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum DateFormat {
    #[default]
    #[serde(rename = "YYYY-MM")]
    YearMonth,
    /// Day is parsed and ignored; the stamp is the month.
    #[serde(rename = "YYYY-MM-DD")]
    YearMonthDay,
    #[serde(rename = "YYYY/MM")]
    YearSlashMonth,
    #[serde(rename = "YYYYMmm")]
    YearMMonth,
    #[serde(rename = "YYYY-Qq")]
    YearQuarter,
    #[serde(rename = "YYYYQq")]
    YearQQuarter,
    #[serde(rename = "YYYY")]
    Year,
}

impl DateFormat {
    pub fn frequency(self) -> Frequency {
        match self {
            DateFormat::YearMonth
            | DateFormat::YearMonthDay
            | DateFormat::YearSlashMonth
            | DateFormat::YearMMonth => Frequency::Monthly,
            DateFormat::YearQuarter | DateFormat::YearQQuarter => Frequency::Quarterly,
            DateFormat::Year => Frequency::Annual,
        }
    }

    pub fn parse(self, raw: &str) -> Option<Period> {
        let s = raw.trim();
        let num = |t: &str| -> Option<u32> {
            if t.is_empty() || !t.bytes().all(|b| b.is_ascii_digit()) {
                return None;
            }
            t.parse().ok()
        };
        let year = |t: &str| -> Option<i32> {
            if t.len() != 4 {
                return None;
            }
            num(t).map(|y| y as i32)
        };
        let freq = self.frequency();
        let (y, sub) = match self {
            DateFormat::YearMonth => {
                let (a, b) = s.split_once('-')?;
                (year(a)?, num(b)?)
            }
            DateFormat::YearSlashMonth => {
                let (a, b) = s.split_once('/')?;
                (year(a)?, num(b)?)
            }
            DateFormat::YearMonthDay => {
                let mut parts = s.split('-');
                let y = year(parts.next()?)?;
                let m = num(parts.next()?)?;
                let d = num(parts.next()?)?;
                if parts.next().is_some() || d == 0 || d > 31 {
                    return None;
                }
                (y, m)
            }
            DateFormat::YearMMonth => {
                let (a, b) = s.split_once(['M', 'm'])?;
                (year(a)?, num(b)?)
            }
            DateFormat::YearQuarter => {
                let (a, b) = s.split_once('-')?;
                let b = b.strip_prefix(['Q', 'q'])?;
                (year(a)?, num(b)?)
            }
            DateFormat::YearQQuarter => {
                let (a, b) = s.split_once(['Q', 'q'])?;
                (year(a)?, num(b)?)
            }
            DateFormat::Year => (year(s)?, 1),
        };
        Period::new(y, sub, freq).ok()
    }

    pub fn format(self, p: &Period) -> String {
        match self {
            DateFormat::YearMonth => format!("{:04}-{:02}", p.year, p.sub),
            DateFormat::YearMonthDay => format!("{:04}-{:02}-01", p.year, p.sub),
            DateFormat::YearSlashMonth => format!("{:04}/{:02}", p.year, p.sub),
            DateFormat::YearMMonth => format!("{:04}M{:02}", p.year, p.sub),
            DateFormat::YearQuarter => format!("{:04}-Q{}", p.year, p.sub),
            DateFormat::YearQQuarter => format!("{:04}Q{}", p.year, p.sub),
            DateFormat::Year => format!("{:04}", p.year),
        }
    }
}

#[derive(Debug, Clone)]
pub struct TimeSeries {
    name: String,
    frequency: Frequency,
    index: Vec<Period>,
    values: Vec<f64>,
}

impl TimeSeries {
    pub fn new(name: impl Into<String>, index: Vec<Period>, values: Vec<f64>) -> Result<TimeSeries> {
        let name = name.into();
        if index.len() != values.len() {
            return Err(Error::DimensionMismatch(format!(
                "series `{name}`: {} stamps but {} values",
                index.len(),
                values.len()
            )));
        }
        if index.is_empty() {
            return Err(Error::SeriesTooShort {
                series: name,
                len: 0,
                needed: 0,
            });
        }
        let frequency = index[0].freq;
        for (i, w) in index.windows(2).enumerate() {
            if w[1].freq != frequency {
                return Err(Error::InvalidDataset(format!(
                    "series `{name}` mixes frequencies"
                )));
            }
            if w[1] <= w[0] {
                return Err(Error::NonMonotoneIndex {
                    row: i + 1,
                    previous: w[0].to_string(),
                    current: w[1].to_string(),
                });
            }
            if w[1].ordinal() - w[0].ordinal() != 1 {
                return Err(Error::GapInIndex {
                    before: w[0].to_string(),
                    after: w[1].to_string(),
                });
            }
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidDataset(format!(
                "series `{name}` has a non-finite value at position {pos}"
            )));
        }
        Ok(TimeSeries {
            name,
            frequency,
            index,
            values,
        })
    }

    /// Builds a series on a contiguous index starting at `start`.
    pub fn from_start(name: impl Into<String>, start: Period, values: Vec<f64>) -> Result<TimeSeries> {
        let index = (0..values.len() as i64).map(|i| start.offset(i)).collect();
        TimeSeries::new(name, index, values)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn frequency(&self) -> Frequency {
        self.frequency
    }

    pub fn index(&self) -> &[Period] {
        &self.index
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn start(&self) -> Period {
        self.index[0]
    }

    pub fn renamed(&self, name: impl Into<String>) -> TimeSeries {
        TimeSeries {
            name: name.into(),
            ..self.clone()
        }
    }

    /// Restricts the series to the stamps `from..=to`, both of which must lie in the index.
    pub fn window(&self, from: Period, to: Period) -> Result<TimeSeries> {
        let lo = self.index.iter().position(|p| *p == from);
        let hi = self.index.iter().position(|p| *p == to);
        match (lo, hi) {
            (Some(lo), Some(hi)) if lo <= hi => Ok(TimeSeries {
                name: self.name.clone(),
                frequency: self.frequency,
                index: self.index[lo..=hi].to_vec(),
                values: self.values[lo..=hi].to_vec(),
            }),
            _ => Err(Error::InvalidDataset(format!(
                "window {from}..{to} outside the sample of `{}`",
                self.name
            ))),
        }
    }
}

/// Natural log of every observation; the name gains an `LN` prefix.
pub fn log_transform(s: &TimeSeries) -> Result<TimeSeries> {
    if let Some(position) = s.values.iter().position(|v| *v <= 0.0) {
        return Err(Error::NonPositiveValue {
            series: s.name.clone(),
            position,
        });
    }
    Ok(TimeSeries {
        name: format!("LN{}", s.name),
        frequency: s.frequency,
        index: s.index.clone(),
        values: s.values.iter().map(|v| v.ln()).collect(),
    })
}

/// `order`-th difference. The first `order` stamps are dropped.
pub fn difference(s: &TimeSeries, order: usize) -> Result<TimeSeries> {
    if order == 0 {
        return Err(Error::InvalidParameters("difference order must be positive".into()));
    }
    if s.len() <= order {
        return Err(Error::SeriesTooShort {
            series: s.name.clone(),
            len: s.len(),
            needed: order,
        });
    }
    let mut values = s.values.clone();
    for _ in 0..order {
        values = values.windows(2).map(|w| w[1] - w[0]).collect();
    }
    Ok(TimeSeries {
        name: format!("{}{}", "D".repeat(order), s.name),
        frequency: s.frequency,
        index: s.index[order..].to_vec(),
        values,
    })
}

/// Shifts the series back by `k` periods: the value stamped `t` is the input's value at `t - k`.
pub fn lag(s: &TimeSeries, k: usize) -> Result<TimeSeries> {
    if k == 0 {
        return Err(Error::InvalidParameters("lag must be positive".into()));
    }
    if s.len() <= k {
        return Err(Error::SeriesTooShort {
            series: s.name.clone(),
            len: s.len(),
            needed: k,
        });
    }
    Ok(TimeSeries {
        name: format!("{}(-{k})", s.name),
        frequency: s.frequency,
        index: s.index[k..].to_vec(),
        values: s.values[..s.len() - k].to_vec(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Dependent,
    Regressor,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MissingPolicy {
    #[default]
    Reject,
    DropRow,
    LinearInterpolate,
}

impl fmt::Display for MissingPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MissingPolicy::Reject => "reject",
            MissingPolicy::DropRow => "drop-row",
            MissingPolicy::LinearInterpolate => "linear-interpolate",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub source: String,
    pub rows_read: usize,
    pub rows_dropped: usize,
    pub values_interpolated: usize,
    pub policy: MissingPolicy,
}

/// A set of series on one shared index, with exactly one dependent series.
#[derive(Debug, Clone)]
pub struct Dataset {
    series: Vec<TimeSeries>,
    roles: BTreeMap<String, Role>,
    provenance: Option<Provenance>,
}

impl Dataset {
    pub fn new(series: Vec<TimeSeries>, dependent: &str) -> Result<Dataset> {
        let first = series
            .first()
            .ok_or_else(|| Error::InvalidDataset("dataset has no series".into()))?;
        let mut roles = BTreeMap::new();
        for s in &series {
            if s.index != first.index {
                return Err(Error::InvalidDataset(format!(
                    "series `{}` is not on the index of `{}`",
                    s.name, first.name
                )));
            }
            let role = if s.name == dependent {
                Role::Dependent
            } else {
                Role::Regressor
            };
            if roles.insert(s.name.clone(), role).is_some() {
                return Err(Error::InvalidDataset(format!("duplicate series `{}`", s.name)));
            }
        }
        if !roles.contains_key(dependent) {
            return Err(Error::UnknownSeries(dependent.to_string()));
        }
        Ok(Dataset {
            series,
            roles,
            provenance: None,
        })
    }

    /// Trims every series to the common sample (intersection of indexes) first.
    pub fn aligned(series: Vec<TimeSeries>, dependent: &str) -> Result<Dataset> {
        let from = series
            .iter()
            .map(|s| s.start())
            .max()
            .ok_or_else(|| Error::InvalidDataset("dataset has no series".into()))?;
        let to = series.iter().map(|s| *s.index.last().unwrap()).min().unwrap();
        if to < from {
            return Err(Error::InvalidDataset("series do not overlap".into()));
        }
        let trimmed = series
            .iter()
            .map(|s| s.window(from, to))
            .collect::<Result<Vec<_>>>()?;
        Dataset::new(trimmed, dependent)
    }

    pub fn with_provenance(mut self, provenance: Provenance) -> Dataset {
        self.provenance = Some(provenance);
        self
    }

    /// Same data, with `name` as the dependent series.
    pub fn with_dependent(&self, name: &str) -> Result<Dataset> {
        let mut d = Dataset::new(self.series.clone(), name)?;
        d.provenance = self.provenance.clone();
        Ok(d)
    }

    /// Sub-dataset holding only the named series, on their common sample.
    pub fn select(&self, dependent: &str, regressors: &[String]) -> Result<Dataset> {
        let mut picked = vec![self.get(dependent)?.clone()];
        for r in regressors {
            picked.push(self.get(r)?.clone());
        }
        Dataset::new(picked, dependent)
    }

    pub fn get(&self, name: &str) -> Result<&TimeSeries> {
        self.series
            .iter()
            .find(|s| s.name == name)
            .ok_or_else(|| Error::UnknownSeries(name.to_string()))
    }

    pub fn series(&self) -> &[TimeSeries] {
        &self.series
    }

    pub fn roles(&self) -> &BTreeMap<String, Role> {
        &self.roles
    }

    pub fn dependent(&self) -> &TimeSeries {
        self.series
            .iter()
            .find(|s| self.roles[&s.name] == Role::Dependent)
            .expect("dataset invariant: one dependent series")
    }

    pub fn regressors(&self) -> impl Iterator<Item = &TimeSeries> {
        self.series
            .iter()
            .filter(|s| self.roles[&s.name] == Role::Regressor)
    }

    pub fn index(&self) -> &[Period] {
        &self.series[0].index
    }

    pub fn len(&self) -> usize {
        self.series[0].len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn provenance(&self) -> Option<&Provenance> {
        self.provenance.as_ref()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IngestConfig {
    #[serde(default = "default_date_column")]
    pub date_column: String,
    #[serde(default)]
    pub date_format: DateFormat,
    /// Columns to read; every non-date column when absent.
    #[serde(default)]
    pub value_columns: Option<Vec<String>>,
    #[serde(default)]
    pub missing: MissingPolicy,
    /// Dependent series; the first value column when absent.
    #[serde(default)]
    pub dependent: Option<String>,
}

fn default_date_column() -> String {
    "date".to_string()
}

impl Default for IngestConfig {
    fn default() -> Self {
        IngestConfig {
            date_column: default_date_column(),
            date_format: DateFormat::default(),
            value_columns: None,
            missing: MissingPolicy::default(),
            dependent: None,
        }
    }
}

fn is_missing(cell: &str) -> bool {
    matches!(cell.trim(), "" | "NA" | "na" | "NaN" | "nan" | ".")
}

pub fn load_csv(path: &Path, cfg: &IngestConfig) -> Result<Dataset> {
    if !path.exists() {
        return Err(Error::FileNotFound(path.to_path_buf()));
    }
    let file = std::fs::File::open(path)?;
    let mut ds = read_csv(file, cfg)?;
    if let Some(p) = ds.provenance.as_mut() {
        p.source = path.display().to_string();
    }
    Ok(ds)
}

/// Parses CSV from any reader. Row numbers in errors count data rows from 1.
pub fn read_csv<R: std::io::Read>(reader: R, cfg: &IngestConfig) -> Result<Dataset> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let header_err = |e: csv::Error| Error::ParseError {
        row: 0,
        column: String::new(),
        message: e.to_string(),
    };
    let headers: Vec<String> = rdr.headers().map_err(header_err)?.iter().map(String::from).collect();
    let date_idx = headers
        .iter()
        .position(|h| *h == cfg.date_column)
        .ok_or_else(|| Error::ParseError {
            row: 0,
            column: cfg.date_column.clone(),
            message: "date column not found in header".into(),
        })?;
    let value_cols: Vec<(usize, String)> = match &cfg.value_columns {
        Some(names) => names
            .iter()
            .map(|n| {
                headers
                    .iter()
                    .position(|h| h == n)
                    .map(|i| (i, n.clone()))
                    .ok_or_else(|| Error::ParseError {
                        row: 0,
                        column: n.clone(),
                        message: "column not found in header".into(),
                    })
            })
            .collect::<Result<_>>()?,
        None => headers
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != date_idx)
            .map(|(i, h)| (i, h.clone()))
            .collect(),
    };
    if value_cols.is_empty() {
        return Err(Error::Config("no value columns to read".into()));
    }

    let mut stamps: Vec<Period> = Vec::new();
    let mut cells: Vec<Vec<Option<f64>>> = vec![Vec::new(); value_cols.len()];
    for (i, rec) in rdr.records().enumerate() {
        let row = i + 1;
        let rec = rec.map_err(|e| Error::ParseError {
            row,
            column: String::new(),
            message: e.to_string(),
        })?;
        let raw_date = rec.get(date_idx).unwrap_or("");
        let stamp = cfg.date_format.parse(raw_date).ok_or_else(|| Error::ParseError {
            row,
            column: cfg.date_column.clone(),
            message: format!("`{raw_date}` does not match the configured date format"),
        })?;
        if let Some(prev) = stamps.last() {
            if stamp <= *prev {
                return Err(Error::NonMonotoneIndex {
                    row,
                    previous: prev.to_string(),
                    current: stamp.to_string(),
                });
            }
        }
        stamps.push(stamp);
        for (j, (ci, cname)) in value_cols.iter().enumerate() {
            let cell = rec.get(*ci).unwrap_or("");
            let v = if is_missing(cell) {
                None
            } else {
                let v: f64 = cell.trim().parse().map_err(|_| Error::ParseError {
                    row,
                    column: cname.clone(),
                    message: format!("`{cell}` is not a number"),
                })?;
                if !v.is_finite() {
                    return Err(Error::ParseError {
                        row,
                        column: cname.clone(),
                        message: format!("`{cell}` is not finite"),
                    });
                }
                Some(v)
            };
            cells[j].push(v);
        }
    }
    let rows_read = stamps.len();
    if rows_read == 0 {
        return Err(Error::InvalidDataset("CSV has no data rows".into()));
    }

    let mut rows_dropped = 0;
    let mut values_interpolated = 0;
    let mut keep = vec![true; rows_read];
    match cfg.missing {
        MissingPolicy::Reject => {
            for (j, col) in cells.iter().enumerate() {
                if let Some(r) = col.iter().position(Option::is_none) {
                    return Err(Error::MissingValuePolicyViolation {
                        row: r + 1,
                        column: value_cols[j].1.clone(),
                        policy: cfg.missing.to_string(),
                    });
                }
            }
        }
        MissingPolicy::DropRow => {
            for (r, k) in keep.iter_mut().enumerate() {
                if cells.iter().any(|c| c[r].is_none()) {
                    *k = false;
                    rows_dropped += 1;
                }
            }
        }
        MissingPolicy::LinearInterpolate => {
            for (j, col) in cells.iter_mut().enumerate() {
                values_interpolated += interpolate(col).map_err(|r| {
                    Error::MissingValuePolicyViolation {
                        row: r + 1,
                        column: value_cols[j].1.clone(),
                        policy: cfg.missing.to_string(),
                    }
                })?;
            }
        }
    }

    let index: Vec<Period> = stamps
        .iter()
        .zip(&keep)
        .filter(|(_, k)| **k)
        .map(|(p, _)| *p)
        .collect();
    let mut series = Vec::with_capacity(value_cols.len());
    for (j, (_, name)) in value_cols.iter().enumerate() {
        let values: Vec<f64> = cells[j]
            .iter()
            .zip(&keep)
            .filter(|(_, k)| **k)
            .map(|(v, _)| v.expect("missing values resolved"))
            .collect();
        series.push(TimeSeries::new(name.clone(), index.clone(), values)?);
    }
    let dependent = cfg.dependent.clone().unwrap_or_else(|| value_cols[0].1.clone());
    Ok(Dataset::new(series, &dependent)?.with_provenance(Provenance {
        source: String::from("<reader>"),
        rows_read,
        rows_dropped,
        values_interpolated,
        policy: cfg.missing,
    }))
}

/// Fills interior holes linearly; returns the number filled, or the row of a
/// hole that has no observed neighbour on one side.
fn interpolate(col: &mut [Option<f64>]) -> std::result::Result<usize, usize> {
    let mut filled = 0;
    let mut last_obs: Option<usize> = None;
    let mut i = 0;
    while i < col.len() {
        if col[i].is_some() {
            last_obs = Some(i);
            i += 1;
            continue;
        }
        let left = last_obs.ok_or(i)?;
        let right = (i..col.len()).find(|&r| col[r].is_some()).ok_or(i)?;
        let (a, b) = (col[left].unwrap(), col[right].unwrap());
        let span = (right - left) as f64;
        for (r, cell) in col.iter_mut().enumerate().take(right).skip(i) {
            *cell = Some(a + (b - a) * (r - left) as f64 / span);
            filled += 1;
        }
        i = right;
    }
    Ok(filled)
}

/// Writes the dataset as CSV. Values use the shortest representation that
/// parses back to the same `f64`, so a load/write cycle is lossless.
pub fn write_csv<W: Write>(d: &Dataset, out: W, fmt: DateFormat) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["date".to_string()];
    header.extend(d.series().iter().map(|s| s.name().to_string()));
    let csv_err = |e: csv::Error| Error::Io(std::io::Error::other(e));
    w.write_record(&header).map_err(csv_err)?;
    for (r, p) in d.index().iter().enumerate() {
        let mut rec = vec![fmt.format(p)];
        rec.extend(d.series().iter().map(|s| format!("{}", s.values()[r])));
        w.write_record(&rec).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn monthly(values: &[f64]) -> TimeSeries {
        TimeSeries::from_start("s", Period::new(2000, 1, Frequency::Monthly).unwrap(), values.to_vec())
            .unwrap()
    }

    fn cfg(policy: MissingPolicy) -> IngestConfig {
        IngestConfig {
            missing: policy,
            ..IngestConfig::default()
        }
    }

    #[test]
    fn loads_three_rows() {
        let csv = "date,op\n2000-01,25.0\n2000-02,26.0\n2000-03,27.5\n";
        let d = read_csv(csv.as_bytes(), &IngestConfig::default()).unwrap();
        assert_eq!(d.len(), 3);
        assert_eq!(d.dependent().name(), "op");
        assert_eq!(d.get("op").unwrap().values(), &[25.0, 26.0, 27.5]);
        assert_eq!(d.index()[2].to_string(), "2000-03");
    }

    #[test]
    fn out_of_order_rows_rejected() {
        let csv = "date,op\n2000-02,26.0\n2000-01,25.0\n2000-03,27.5\n";
        let err = read_csv(csv.as_bytes(), &IngestConfig::default()).unwrap_err();
        assert!(matches!(err, Error::NonMonotoneIndex { row: 2, .. }), "{err}");
    }

    #[test]
    fn drop_row_policy_counts_dropped_rows() {
        let csv = "date,op\n2000-01,25.0\n2000-02,26.0\n2000-03,\n";
        let d = read_csv(csv.as_bytes(), &cfg(MissingPolicy::DropRow)).unwrap();
        assert_eq!(d.len(), 2);
        assert_eq!(d.provenance().unwrap().rows_dropped, 1);
        assert_eq!(d.provenance().unwrap().rows_read, 3);
    }

    #[test]
    fn interior_drop_leaves_gap() {
        let csv = "date,op\n2000-01,25.0\n2000-02,\n2000-03,27\n";
        let err = read_csv(csv.as_bytes(), &cfg(MissingPolicy::DropRow)).unwrap_err();
        assert!(matches!(err, Error::GapInIndex { .. }), "{err}");
    }

    #[test]
    fn reject_policy_reports_hole() {
        let csv = "date,op,int\n2000-01,25.0,1\n2000-02,26.0,NA\n";
        let err = read_csv(csv.as_bytes(), &IngestConfig::default()).unwrap_err();
        match err {
            Error::MissingValuePolicyViolation { row, column, .. } => {
                assert_eq!((row, column.as_str()), (2, "int"));
            }
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn interpolation_fills_interior_only() {
        let csv = "date,op\n2000-01,1\n2000-02,\n2000-03,\n2000-04,7\n";
        let d = read_csv(csv.as_bytes(), &cfg(MissingPolicy::LinearInterpolate)).unwrap();
        assert_eq!(d.get("op").unwrap().values(), &[1.0, 3.0, 5.0, 7.0]);
        assert_eq!(d.provenance().unwrap().values_interpolated, 2);

        let csv = "date,op\n2000-01,\n2000-02,2\n";
        assert!(read_csv(csv.as_bytes(), &cfg(MissingPolicy::LinearInterpolate)).is_err());
    }

    #[test]
    fn bad_cell_is_parse_error() {
        let csv = "date,op\n2000-01,1\n2000-02,abc\n";
        let err = read_csv(csv.as_bytes(), &IngestConfig::default()).unwrap_err();
        assert!(matches!(err, Error::ParseError { row: 2, .. }));
        let csv = "date,op\n2000-13,1\n";
        assert!(matches!(
            read_csv(csv.as_bytes(), &IngestConfig::default()).unwrap_err(),
            Error::ParseError { row: 1, .. }
        ));
    }

    #[test]
    fn missing_file() {
        let err = load_csv(Path::new("/nonexistent/x.csv"), &IngestConfig::default()).unwrap_err();
        assert!(matches!(err, Error::FileNotFound(_)));
    }

    #[test]
    fn date_formats() {
        assert_eq!(DateFormat::YearQuarter.parse("2001-Q3").unwrap().sub, 3);
        assert_eq!(DateFormat::YearQQuarter.parse("2001Q4").unwrap().sub, 4);
        assert_eq!(DateFormat::YearMMonth.parse("2001M11").unwrap().sub, 11);
        assert_eq!(DateFormat::YearMonthDay.parse("2001-11-30").unwrap().sub, 11);
        assert_eq!(DateFormat::Year.parse("1999").unwrap().year, 1999);
        assert!(DateFormat::YearQuarter.parse("2001-Q5").is_none());
        let p = Period::new(2000, 12, Frequency::Monthly).unwrap();
        assert_eq!(p.succ().to_string(), "2001-01");
        assert_eq!(p.offset(-12).to_string(), "1999-12");
    }

    #[test]
    fn log_examples() {
        let e = std::f64::consts::E;
        let l = log_transform(&monthly(&[1.0, e, e * e])).unwrap();
        assert_eq!(l.name(), "LNs");
        for (got, want) in l.values().iter().zip([0.0, 1.0, 2.0]) {
            assert!((got - want).abs() < 1e-15);
        }
        let v = log_transform(&monthly(&[25.0])).unwrap().values()[0];
        assert!((v - 3.218_875_824_868_200_7).abs() < 1e-15);
        assert!(matches!(
            log_transform(&monthly(&[1.0, 0.0])),
            Err(Error::NonPositiveValue { position: 1, .. })
        ));
    }

    #[test]
    fn difference_examples() {
        let s = monthly(&[1.0, 3.0, 6.0, 10.0]);
        assert_eq!(difference(&s, 1).unwrap().values(), &[2.0, 3.0, 4.0]);
        assert_eq!(difference(&s, 2).unwrap().values(), &[1.0, 1.0]);
        assert_eq!(difference(&s, 2).unwrap().start().to_string(), "2000-03");
        assert_eq!(difference(&monthly(&[4.0; 5]), 1).unwrap().values(), &[0.0; 4]);
        assert!(matches!(difference(&s, 4), Err(Error::SeriesTooShort { .. })));
    }

    #[test]
    fn lag_examples() {
        let s = monthly(&[1.0, 2.0, 3.0, 4.0]);
        let l1 = lag(&s, 1).unwrap();
        assert_eq!(l1.values(), &[1.0, 2.0, 3.0]);
        assert_eq!(l1.start().to_string(), "2000-02");
        assert_eq!(lag(&s, 3).unwrap().values(), &[1.0]);
        assert!(lag(&s, 4).is_err());

        let s = monthly(&[1.0, 3.0, 6.0, 10.0]);
        let a = difference(&lag(&s, 1).unwrap(), 1).unwrap();
        let b = lag(&difference(&s, 1).unwrap(), 1).unwrap();
        assert_eq!(a.values(), b.values());
        assert_eq!(a.index(), b.index());
    }

    #[test]
    fn aligned_takes_intersection() {
        let s = monthly(&[1.0, 3.0, 6.0, 10.0]);
        let d = difference(&s, 1).unwrap();
        let ds = Dataset::aligned(vec![s.clone(), d], "s").unwrap();
        assert_eq!(ds.len(), 3);
        assert_eq!(ds.get("s").unwrap().values(), &[3.0, 6.0, 10.0]);
    }

    proptest! {
        #[test]
        fn difference_composes(values in prop::collection::vec(-1e3f64..1e3, 6..40), a in 1usize..3, b in 1usize..3) {
            let s = monthly(&values);
            let direct = difference(&s, a + b).unwrap();
            let nested = difference(&difference(&s, a).unwrap(), b).unwrap();
            prop_assert_eq!(direct.index(), nested.index());
            for (x, y) in direct.values().iter().zip(nested.values()) {
                prop_assert!((x - y).abs() <= 1e-9 * (1.0 + x.abs()));
            }
        }

        #[test]
        fn log_is_monotone(values in prop::collection::vec(1e-6f64..1e6, 2..30)) {
            let l = log_transform(&monthly(&values)).unwrap();
            for i in 0..values.len() {
                for j in 0..values.len() {
                    if values[i] < values[j] {
                        prop_assert!(l.values()[i] < l.values()[j]);
                    }
                }
            }
        }

        #[test]
        fn csv_round_trip(values in prop::collection::vec(prop::num::f64::NORMAL, 1..30)) {
            let s = monthly(&values).renamed("v");
            let ds = Dataset::new(vec![s], "v").unwrap();
            let mut buf = Vec::new();
            write_csv(&ds, &mut buf, DateFormat::YearMonth).unwrap();
            let back = read_csv(buf.as_slice(), &IngestConfig::default()).unwrap();
            let got = back.get("v").unwrap().values();
            prop_assert_eq!(got.len(), values.len());
            for (g, v) in got.iter().zip(&values) {
                prop_assert_eq!(g.to_bits(), v.to_bits());
            }
        }
    }
}
