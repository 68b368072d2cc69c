use std::fs::File;
use std::path::Path;

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Curves observed on a common grid: one row per curve.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveTable {
    pub argvals: Vec<f64>,
    pub values: DMatrix<f64>,
    pub labels: Vec<String>,
}

/// Scalar columns keyed by name, rows labeled by the first column.
#[derive(Debug, Clone, PartialEq)]
pub struct CovariateTable {
    pub labels: Vec<String>,
    pub names: Vec<String>,
    pub columns: Vec<Vec<f64>>,
}

impl CovariateTable {
    pub fn column(&self, name: &str) -> Option<&[f64]> {
        self.names
            .iter()
            .position(|n| n == name)
            .map(|k| self.columns[k].as_slice())
    }
}

fn parse_err(path: &Path, line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        path: path.display().to_string(),
        line,
        message: message.into(),
    }
}

fn read_records(path: &Path) -> Result<Vec<(usize, csv::StringRecord)>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(file);
    let mut out = Vec::new();
    for rec in reader.records() {
        let rec = rec.map_err(|e| {
            let line = e.position().map(|p| p.line() as usize).unwrap_or(0);
            parse_err(path, line, e.to_string())
        })?;
        let line = rec.position().map(|p| p.line() as usize).unwrap_or(0);
        if rec.iter().all(str::is_empty) {
            continue;
        }
        out.push((line, rec));
    }
    Ok(out)
}

fn parse_cell(path: &Path, line: usize, col: usize, header: &str, cell: &str) -> Result<f64> {
    if cell.is_empty() {
        return Err(parse_err(path, line, format!("missing value in column {col} (`{header}`)")));
    }
    cell.parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| parse_err(path, line, format!("non-numeric value `{cell}` in column {col} (`{header}`)")))
}

/// Read a curve file: the header row holds the numeric sampling times after a
/// leading label cell, every following row is `label, x(t_1), …, x(t_m)`.
pub fn ingest_curves(path: impl AsRef<Path>) -> Result<CurveTable> {
    let path = path.as_ref();
    let records = read_records(path)?;
    let Some(((hline, header), rows)) = records.split_first() else {
        return Err(parse_err(path, 1, "empty file"));
    };
    let m = header.len().saturating_sub(1);
    if m == 0 {
        return Err(parse_err(path, *hline, "header has no sampling times"));
    }
    let argvals = header
        .iter()
        .enumerate()
        .skip(1)
        .map(|(c, cell)| {
            cell.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| parse_err(path, *hline, format!("header column {} `{cell}` is not a number", c + 1)))
        })
        .collect::<Result<Vec<f64>>>()?;
    if let Some(k) = argvals.windows(2).position(|w| w[0] >= w[1]) {
        return Err(parse_err(
            path,
            *hline,
            format!("sampling times not strictly increasing at column {}", k + 3),
        ));
    }
    let mut labels = Vec::with_capacity(rows.len());
    let mut data = Vec::with_capacity(rows.len() * m);
    for (line, rec) in rows {
        if rec.len() != m + 1 {
            return Err(parse_err(
                path,
                *line,
                format!("row `{}` has {} fields, expected {}", &rec[0], rec.len(), m + 1),
            ));
        }
        labels.push(rec[0].to_string());
        for c in 1..=m {
            data.push(parse_cell(path, *line, c + 1, &header[c], &rec[c])?);
        }
    }
    Ok(CurveTable {
        argvals,
        values: DMatrix::from_row_slice(labels.len(), m, &data),
        labels,
    })
}

/// Read a covariate file: header `id, name_1, …`, rows `label, values…`.
pub fn ingest_covariates(path: impl AsRef<Path>) -> Result<CovariateTable> {
    let path = path.as_ref();
    let records = read_records(path)?;
    let Some(((hline, header), rows)) = records.split_first() else {
        return Err(parse_err(path, 1, "empty file"));
    };
    let names: Vec<String> = header.iter().skip(1).map(str::to_string).collect();
    if names.is_empty() {
        return Err(parse_err(path, *hline, "header has no covariate columns"));
    }
    let mut seen = std::collections::HashSet::new();
    for n in &names {
        if !seen.insert(n) {
            return Err(parse_err(path, *hline, format!("duplicate column `{n}`")));
        }
    }
    let mut labels = Vec::new();
    let mut columns = vec![Vec::with_capacity(rows.len()); names.len()];
    for (line, rec) in rows {
        if rec.len() != names.len() + 1 {
            return Err(parse_err(
                path,
                *line,
                format!("row `{}` has {} fields, expected {}", &rec[0], rec.len(), names.len() + 1),
            ));
        }
        labels.push(rec[0].to_string());
        for (c, col) in columns.iter_mut().enumerate() {
            col.push(parse_cell(path, *line, c + 2, &names[c], &rec[c + 1])?);
        }
    }
    Ok(CovariateTable {
        labels,
        names,
        columns,
    })
}

/// Write curves in the layout read by [`ingest_curves`]. Values use the
/// shortest representation that round-trips exactly.
pub fn write_curve_table(path: impl AsRef<Path>, table: &CurveTable) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = csv::Writer::from_writer(file);
    let io_err = |e: csv::Error| Error::io(path, std::io::Error::other(e));
    let mut header = vec!["id".to_string()];
    header.extend(table.argvals.iter().map(|t| t.to_string()));
    w.write_record(&header).map_err(io_err)?;
    for (i, label) in table.labels.iter().enumerate() {
        let mut row = vec![label.clone()];
        row.extend(table.values.row(i).iter().map(|v| v.to_string()));
        w.write_record(&row).map_err(io_err)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// 1-based inclusive day ranges of the twelve months of a non-leap year.
pub const MONTH_RANGES: [(usize, usize); 12] = [
    (1, 31),
    (32, 59),
    (60, 90),
    (91, 120),
    (121, 151),
    (152, 181),
    (182, 212),
    (213, 243),
    (244, 273),
    (274, 304),
    (305, 334),
    (335, 365),
];

/// Monthly means of daily curves (n×365 → n×12).
pub fn monthly_means(daily: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    if daily.ncols() != 365 {
        return Err(Error::invalid(format!(
            "daily data must have 365 columns, got {}",
            daily.ncols()
        )));
    }
    Ok(DMatrix::from_fn(daily.nrows(), 12, |i, m| {
        let (a, b) = MONTH_RANGES[m];
        let days = daily.row(i).columns(a - 1, b - a + 1).sum();
        days / (b - a + 1) as f64
    }))
}
