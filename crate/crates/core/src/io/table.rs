//! CSV input and output.
//!
//! Inputs carry a header row. Outputs use 0-based observation indices and
//! print reals with 9 significant digits, except raw point coordinates, which
//! use the shortest exact representation so they read back bit for bit.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::analysis::{AnomalyReport, LooReport};
use crate::batch::{DqfCollection, SummarySet};
use crate::error::{DqfError, Result};
use crate::inner_product::{GramMatrix, InnerProductView, PointCloud};

use super::config::{InputKind, PairFilter};

/// Label column given by header name or 0-based index.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LabelColumn {
    Name(String),
    Index(usize),
}

impl LabelColumn {
    /// A header name wins over an index reading of the same text.
    fn resolve(&self, header: &[String]) -> Result<usize> {
        match self {
            LabelColumn::Name(name) => match header.iter().position(|h| h == name) {
                Some(c) => Ok(c),
                None => match name.parse::<usize>() {
                    Ok(c) if c < header.len() => Ok(c),
                    _ => Err(DqfError::usage(format!("no label column named '{name}'"))),
                },
            },
            LabelColumn::Index(c) if *c < header.len() => Ok(*c),
            LabelColumn::Index(c) => Err(DqfError::usage(format!(
                "label column {c} out of range for {} columns",
                header.len()
            ))),
        }
    }
}

impl From<&str> for LabelColumn {
    fn from(s: &str) -> Self {
        LabelColumn::Name(s.to_string())
    }
}

/// Raw string cells with their header.
#[derive(Clone, Debug)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

/// Rectangular CSV with a header; ragged rows are rejected with their line.
pub fn read_table(path: &Path) -> Result<Table> {
    let file = File::open(path)
        .map_err(|e| DqfError::data(format!("cannot open {}: {e}", path.display())))?;
    let mut reader = csv::ReaderBuilder::new()
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(file);
    let header: Vec<String> = reader
        .headers()
        .map_err(|e| DqfError::data(format!("{}: {e}", path.display())))?
        .iter()
        .map(str::to_string)
        .collect();
    if header.is_empty() || header.iter().all(String::is_empty) {
        return Err(DqfError::data(format!(
            "{}: missing header row",
            path.display()
        )));
    }
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| DqfError::data(format!("{}: {e}", path.display())))?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() != header.len() {
            return Err(DqfError::data(format!(
                "{}: line {line} has {} fields, header has {}",
                path.display(),
                record.len(),
                header.len()
            )));
        }
        rows.push(record.iter().map(str::to_string).collect());
    }
    if rows.is_empty() {
        return Err(DqfError::data(format!("{}: no data rows", path.display())));
    }
    Ok(Table { header, rows })
}

/// Numeric data with optional integer labels.
#[derive(Clone, Debug)]
pub struct Dataset {
    pub kind: InputKind,
    /// Header names of the numeric columns.
    pub columns: Vec<String>,
    pub values: Vec<Vec<f64>>,
    pub labels: Option<Vec<i64>>,
    /// Original label strings when they were not integers; label `k` stands
    /// for `label_names[k]`.
    pub label_names: Vec<String>,
}

impl Dataset {
    pub fn n(&self) -> usize {
        self.values.len()
    }

    pub fn cloud(&self) -> Result<PointCloud> {
        if self.kind != InputKind::Coords {
            return Err(DqfError::usage(
                "this operation needs coordinate input, not a Gram matrix",
            ));
        }
        let cloud = PointCloud::from_rows(&self.values)?;
        match &self.labels {
            Some(y) => cloud.with_labels(y.clone()),
            None => Ok(cloud),
        }
    }

    pub fn view(&self) -> Result<InnerProductView> {
        match self.kind {
            InputKind::Coords => Ok(InnerProductView::from_cloud(self.cloud()?)),
            InputKind::Gram => {
                let n = self.n();
                if self.columns.len() != n {
                    return Err(DqfError::data(format!(
                        "Gram matrix must be square: {n} rows, {} columns",
                        self.columns.len()
                    )));
                }
                InnerProductView::from_gram(GramMatrix::from_rows(&self.values)?)
            }
        }
    }
}

pub fn read_dataset(path: &Path, kind: InputKind, label: Option<&LabelColumn>) -> Result<Dataset> {
    let table = read_table(path)?;
    let label_idx = label.map(|l| l.resolve(&table.header)).transpose()?;
    let columns: Vec<String> = table
        .header
        .iter()
        .enumerate()
        .filter(|(c, _)| Some(*c) != label_idx)
        .map(|(_, h)| h.clone())
        .collect();
    if columns.is_empty() {
        return Err(DqfError::data(format!(
            "{}: no numeric columns",
            path.display()
        )));
    }

    let mut values = Vec::with_capacity(table.rows.len());
    for (r, row) in table.rows.iter().enumerate() {
        let mut out = Vec::with_capacity(columns.len());
        for (c, cell) in row.iter().enumerate() {
            if Some(c) == label_idx {
                continue;
            }
            let v: f64 = cell.parse().map_err(|_| {
                DqfError::data(format!(
                    "{}: row {} column {} ('{}'): '{cell}' is not a number",
                    path.display(),
                    r + 1,
                    c + 1,
                    table.header[c]
                ))
            })?;
            if !v.is_finite() {
                return Err(DqfError::data(format!(
                    "{}: row {} column {} ('{}'): non-finite value",
                    path.display(),
                    r + 1,
                    c + 1,
                    table.header[c]
                )));
            }
            out.push(v);
        }
        values.push(out);
    }

    let (labels, label_names) = match label_idx {
        None => (None, Vec::new()),
        Some(c) => {
            let cells: Vec<&str> = table.rows.iter().map(|r| r[c].as_str()).collect();
            let (y, names) = parse_labels(&cells);
            (Some(y), names)
        }
    };
    Ok(Dataset {
        kind,
        columns,
        values,
        labels,
        label_names,
    })
}

/// Integer labels as given; anything else maps sorted distinct strings to 0, 1, ….
fn parse_labels(cells: &[&str]) -> (Vec<i64>, Vec<String>) {
    if let Ok(y) = cells.iter().map(|s| s.parse::<i64>()).collect() {
        return (y, Vec::new());
    }
    let mut names: Vec<String> = cells.iter().map(|s| s.to_string()).collect();
    names.sort();
    names.dedup();
    let y = cells
        .iter()
        .map(|s| {
            names
                .binary_search_by(|n| n.as_str().cmp(s))
                .expect("name present") as i64
        })
        .collect();
    (y, names)
}

/// `%.{digits}g`-style formatting with trailing zeros removed.
pub fn fmt_sig(v: f64, digits: usize) -> String {
    if v == 0.0 {
        return "0".to_string();
    }
    if !v.is_finite() {
        return v.to_string();
    }
    let p = digits.max(1);
    let sci = format!("{:.*e}", p - 1, v);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= p as i32 {
        let m = trim_zeros(mantissa);
        return format!("{m}e{}{:02}", if exp < 0 { '-' } else { '+' }, exp.abs());
    }
    let decimals = (p as i32 - 1 - exp).max(0) as usize;
    trim_zeros(&format!("{v:.decimals$}")).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn f9(v: f64) -> String {
    fmt_sig(v, 9)
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path)?))
}

fn delta_header(grid: &[f64]) -> impl Iterator<Item = String> + '_ {
    grid.iter().map(|d| f9(*d))
}

/// One row per computed pair `i < j` that passes the filter.
pub fn write_dqf_csv(
    path: &Path,
    coll: &DqfCollection,
    summaries: &SummarySet,
    filter: PairFilter,
) -> Result<usize> {
    if filter != PairFilter::All && summaries.labels.is_none() {
        return Err(DqfError::usage("--pairs within/between needs labels"));
    }
    let mut w = create(path)?;
    let header: Vec<String> = ["i".to_string(), "j".to_string()]
        .into_iter()
        .chain(delta_header(coll.grid()))
        .collect();
    writeln!(w, "{}", header.join(","))?;
    let mut written = 0;
    for q in coll.iter() {
        let (i, j) = q.pair;
        if !filter.keeps(summaries.pair_category(i, j)) {
            continue;
        }
        let cells: Vec<String> = q.grid_values.iter().map(|v| f9(*v)).collect();
        writeln!(w, "{i},{j},{}", cells.join(","))?;
        written += 1;
    }
    w.flush()?;
    Ok(written)
}

/// `i`, optional label, the overall average, then one block per class.
pub fn write_summaries_csv(path: &Path, s: &SummarySet) -> Result<()> {
    let mut w = create(path)?;
    let mut header = vec!["i".to_string()];
    if s.labels.is_some() {
        header.push("label".to_string());
    }
    header.extend(s.grid.iter().map(|d| format!("avg@{}", f9(*d))));
    for c in &s.classes {
        header.extend(s.grid.iter().map(|d| format!("class{c}@{}", f9(*d))));
    }
    writeln!(w, "{}", header.join(","))?;
    for i in 0..s.n() {
        let mut cells = vec![i.to_string()];
        if let Some(y) = &s.labels {
            cells.push(y[i].to_string());
        }
        cells.extend(s.average[i].iter().map(|v| f9(*v)));
        for block in &s.class_average {
            cells.extend(block[i].iter().map(|v| f9(*v)));
        }
        writeln!(w, "{}", cells.join(","))?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ZplotRow {
    pub k: usize,
    pub z1: f64,
    pub z2: f64,
    pub sigma: Option<f64>,
}

pub fn write_zplot_csv(path: &Path, rows: &[ZplotRow]) -> Result<()> {
    let mut w = create(path)?;
    let with_sigma = rows.iter().any(|r| r.sigma.is_some());
    writeln!(
        w,
        "{}",
        if with_sigma {
            "k,z1,z2,sigma"
        } else {
            "k,z1,z2"
        }
    )?;
    for r in rows {
        match r.sigma {
            Some(s) if with_sigma => writeln!(w, "{},{},{},{}", r.k, f9(r.z1), f9(r.z2), f9(s))?,
            _ => writeln!(w, "{},{},{}", r.k, f9(r.z1), f9(r.z2))?,
        }
    }
    w.flush()?;
    Ok(())
}

/// Coordinates at full precision plus an optional `label` column.
pub fn write_points_csv(path: &Path, cloud: &PointCloud) -> Result<()> {
    let mut w = create(path)?;
    let mut header: Vec<String> = (0..cloud.dim()).map(|a| format!("x{a}")).collect();
    if cloud.labels().is_some() {
        header.push("label".to_string());
    }
    writeln!(w, "{}", header.join(","))?;
    for (i, row) in cloud.rows().enumerate() {
        let mut cells: Vec<String> = row.iter().map(|v| format!("{v:?}")).collect();
        if let Some(y) = cloud.labels() {
            cells.push(y[i].to_string());
        }
        writeln!(w, "{}", cells.join(","))?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_predictions_csv(path: &Path, report: &LooReport) -> Result<()> {
    let mut w = create(path)?;
    writeln!(w, "i,label,predicted,correct")?;
    for (i, (y, p)) in report.labels.iter().zip(&report.predictions).enumerate() {
        writeln!(w, "{i},{y},{p},{}", u8::from(y == p))?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_anomaly_csv(
    path: &Path,
    report: &AnomalyReport,
    outlier: Option<&[bool]>,
) -> Result<()> {
    let mut w = create(path)?;
    writeln!(
        w,
        "{}",
        if outlier.is_some() {
            "i,score,outlier"
        } else {
            "i,score"
        }
    )?;
    for (i, s) in report.scores.iter().enumerate() {
        match outlier {
            Some(o) => writeln!(w, "{i},{},{}", f9(*s), u8::from(o[i]))?,
            None => writeln!(w, "{i},{}", f9(*s))?,
        }
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write(dir: &Path, name: &str, text: &str) -> std::path::PathBuf {
        let p = dir.join(name);
        std::fs::write(&p, text).unwrap();
        p
    }

    #[test]
    fn significant_digits() {
        assert_eq!(fmt_sig(0.25, 9), "0.25");
        assert_eq!(fmt_sig(10.0 / 11.0, 9), "0.909090909");
        assert_eq!(fmt_sig(1.0, 9), "1");
        assert_eq!(fmt_sig(-123456.789, 9), "-123456.789");
        assert_eq!(fmt_sig(1.5e-7, 9), "1.5e-07");
        assert_eq!(fmt_sig(2.0e12, 9), "2e+12");
        assert_eq!(fmt_sig(0.0001, 9), "0.0001");
        assert_eq!(fmt_sig(123456789.4, 9), "123456789");
        assert_eq!(fmt_sig(0.0, 9), "0");
    }

    #[test]
    fn labeled_points() {
        let dir = tempfile::tempdir().unwrap();
        let p = write(
            dir.path(),
            "a.csv",
            "x,y,class\n1,2,setosa\n3,4,virginica\n5,6,setosa\n",
        );
        let d = read_dataset(&p, InputKind::Coords, Some(&"class".into())).unwrap();
        assert_eq!(d.columns, vec!["x", "y"]);
        assert_eq!(d.values[2], vec![5.0, 6.0]);
        assert_eq!(d.labels, Some(vec![0, 1, 0]));
        assert_eq!(d.label_names, vec!["setosa", "virginica"]);

        let d = read_dataset(&p, InputKind::Coords, Some(&LabelColumn::Index(2))).unwrap();
        assert_eq!(d.labels, Some(vec![0, 1, 0]));
        let d = read_dataset(&p, InputKind::Coords, Some(&"2".into())).unwrap();
        assert_eq!(d.columns, vec!["x", "y"]);
    }

    #[test]
    fn diagnostics() {
        let dir = tempfile::tempdir().unwrap();
        let p = write(dir.path(), "bad.csv", "x,y\n1,2\n3,abc\n");
        let msg = read_dataset(&p, InputKind::Coords, None)
            .unwrap_err()
            .to_string();
        assert!(
            msg.contains("row 2") && msg.contains("column 2") && msg.contains("abc"),
            "{msg}"
        );

        let p = write(dir.path(), "ragged.csv", "x,y\n1,2\n3\n");
        let msg = read_dataset(&p, InputKind::Coords, None)
            .unwrap_err()
            .to_string();
        assert!(msg.contains("line 3"), "{msg}");

        let missing = dir.path().join("none.csv");
        assert!(matches!(read_table(&missing), Err(DqfError::Data(_))));

        let p = write(dir.path(), "ok.csv", "x,y\n1,2\n");
        assert!(matches!(
            read_dataset(&p, InputKind::Coords, Some(&"z".into())),
            Err(DqfError::Usage(_))
        ));
    }

    #[test]
    fn gram_input() {
        let dir = tempfile::tempdir().unwrap();
        let p = write(dir.path(), "g.csv", "a,b,c,y\n1,0,0,0\n0,1,0,1\n0,0,1,1\n");
        let d = read_dataset(&p, InputKind::Gram, Some(&"y".into())).unwrap();
        let view = d.view().unwrap();
        assert!(view.is_gram());
        assert_eq!(view.squared_distance(0, 1).unwrap(), 2.0);
        assert!(d.cloud().is_err());

        let p = write(dir.path(), "rect.csv", "a,b\n1,0\n0,1\n0,0\n");
        assert!(read_dataset(&p, InputKind::Gram, None)
            .unwrap()
            .view()
            .is_err());
    }

    #[test]
    fn points_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let cloud = crate::synthetic::gen_disc_vs_ring(10, 4).unwrap();
        let p = dir.path().join("pts.csv");
        write_points_csv(&p, &cloud).unwrap();
        let back = read_dataset(&p, InputKind::Coords, Some(&"label".into()))
            .unwrap()
            .cloud()
            .unwrap();
        assert_eq!(back, cloud);
    }
}
