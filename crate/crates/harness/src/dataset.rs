//! Trial records and their on-disk form: a CSV body plus a JSON summary
//! that carries the header.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::config::Cap;
use crate::error::{HarnessError, Result};
use crate::stats::Aggregate;

pub const CSV_HEADER: &str = "trial,n,statistic,coord1,coord2,value";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Record {
    pub trial: u64,
    pub n: usize,
    pub statistic: String,
    pub coord1: Option<f64>,
    pub coord2: Option<f64>,
    pub value: f64,
}

impl Record {
    pub fn new(trial: u64, n: usize, statistic: &str, coord1: Option<f64>, coord2: Option<f64>, value: f64) -> Self {
        Self {
            trial,
            n,
            statistic: statistic.to_string(),
            coord1,
            coord2,
            value,
        }
    }
}

fn cmp_coord(a: Option<f64>, b: Option<f64>) -> std::cmp::Ordering {
    match (a, b) {
        (Some(x), Some(y)) => x.total_cmp(&y),
        _ => a.is_some().cmp(&b.is_some()),
    }
}

/// Canonical record order: trial, n, statistic, then grid coordinates.
pub fn sort_records(records: &mut [Record]) {
    records.sort_by(|a, b| {
        (a.trial, a.n, &a.statistic)
            .cmp(&(b.trial, b.n, &b.statistic))
            .then(cmp_coord(a.coord1, b.coord1))
            .then(cmp_coord(a.coord2, b.coord2))
    });
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub name: String,
    pub passed: bool,
    #[serde(with = "float")]
    pub observed: f64,
    #[serde(with = "float")]
    pub bound: f64,
    pub detail: String,
}

impl Verdict {
    /// Passes when `observed <= bound`.
    pub fn at_most(name: &str, observed: f64, bound: f64, detail: impl Into<String>) -> Self {
        Self {
            name: name.to_string(),
            passed: observed <= bound,
            observed,
            bound,
            detail: detail.into(),
        }
    }

    /// Passes when `observed >= bound`.
    pub fn at_least(name: &str, observed: f64, bound: f64, detail: impl Into<String>) -> Self {
        Self {
            name: name.to_string(),
            passed: observed >= bound,
            observed,
            bound,
            detail: detail.into(),
        }
    }

    pub fn flag(name: &str, passed: bool, detail: impl Into<String>) -> Self {
        Self {
            name: name.to_string(),
            passed,
            observed: passed as u8 as f64,
            bound: 1.0,
            detail: detail.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub experiment: String,
    pub config_echo: serde_json::Value,
    pub caps: std::collections::BTreeMap<String, Cap>,
    pub verdicts: Vec<Verdict>,
    pub aggregates: Vec<Aggregate>,
    pub failure_count: usize,
    pub failures: Vec<String>,
    pub version: String,
    pub timestamp: String,
    pub record_count: usize,
}

impl Summary {
    pub fn all_passed(&self) -> bool {
        self.verdicts.iter().all(|v| v.passed)
    }

    pub fn verdict(&self, name: &str) -> Option<&Verdict> {
        self.verdicts.iter().find(|v| v.name == name)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialDataset {
    pub summary: Summary,
    pub records: Vec<Record>,
}

/// `foo.csv` -> `foo.summary.json`.
pub fn summary_path(csv: &Path) -> PathBuf {
    csv.with_extension("summary.json")
}

fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

fn fmt_coord(c: Option<f64>) -> String {
    c.map(fmt_float).unwrap_or_default()
}

/// The CSV body; identical inputs give identical bytes.
pub fn csv_body(records: &[Record]) -> String {
    let mut out = String::with_capacity(64 * (records.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in records {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            r.trial,
            r.n,
            r.statistic,
            fmt_coord(r.coord1),
            fmt_coord(r.coord2),
            fmt_float(r.value)
        ));
    }
    out
}

pub fn persist(dataset: &TrialDataset, csv_path: &Path) -> Result<()> {
    let io = |e: std::io::Error| HarnessError::Io(format!("{}: {e}", csv_path.display()));
    if let Some(dir) = csv_path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(io)?;
    }
    let mut f = fs::File::create(csv_path).map_err(io)?;
    f.write_all(csv_body(&dataset.records).as_bytes()).map_err(io)?;
    let json = serde_json::to_string_pretty(&dataset.summary).expect("summary serializes");
    fs::write(summary_path(csv_path), json + "\n").map_err(io)?;
    Ok(())
}

fn parse_float(field: &str, line: u64, what: &str) -> Result<f64> {
    field.parse().map_err(|_| HarnessError::Parse {
        line,
        msg: format!("bad {what} `{field}`"),
    })
}

/// Reads records from a CSV body. Every row must be complete and end with a
/// newline, so a truncated file is an error rather than a short dataset.
pub fn parse_csv(text: &str) -> Result<Vec<Record>> {
    if !text.is_empty() && !text.ends_with('\n') {
        let line = text.lines().count() as u64;
        return Err(HarnessError::Parse {
            line,
            msg: "file ends in the middle of a row".into(),
        });
    }
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .from_reader(text.as_bytes());
    let mut records = Vec::new();
    for (i, row) in reader.records().enumerate() {
        let line = i as u64 + 1;
        let row = row.map_err(|e| HarnessError::Parse {
            line,
            msg: e.to_string(),
        })?;
        if line == 1 {
            let header: Vec<&str> = row.iter().collect();
            if header.join(",") != CSV_HEADER {
                return Err(HarnessError::Parse {
                    line,
                    msg: format!("expected header `{CSV_HEADER}`"),
                });
            }
            continue;
        }
        if row.len() != 6 {
            return Err(HarnessError::Parse {
                line,
                msg: format!("expected 6 fields, found {}", row.len()),
            });
        }
        let coord = |s: &str| -> Result<Option<f64>> {
            if s.is_empty() {
                Ok(None)
            } else {
                parse_float(s, line, "coordinate").map(Some)
            }
        };
        records.push(Record {
            trial: row[0].parse().map_err(|_| HarnessError::Parse {
                line,
                msg: format!("bad trial `{}`", &row[0]),
            })?,
            n: row[1].parse().map_err(|_| HarnessError::Parse {
                line,
                msg: format!("bad n `{}`", &row[1]),
            })?,
            statistic: row[2].to_string(),
            coord1: coord(&row[3])?,
            coord2: coord(&row[4])?,
            value: parse_float(&row[5], line, "value")?,
        });
    }
    if text.is_empty() {
        return Err(HarnessError::Parse {
            line: 1,
            msg: "missing header".into(),
        });
    }
    Ok(records)
}

pub fn load(csv_path: &Path) -> Result<TrialDataset> {
    let io = |p: &Path, e: std::io::Error| HarnessError::Io(format!("{}: {e}", p.display()));
    let text = fs::read_to_string(csv_path).map_err(|e| io(csv_path, e))?;
    let records = parse_csv(&text)?;
    let spath = summary_path(csv_path);
    let stext = fs::read_to_string(&spath).map_err(|e| io(&spath, e))?;
    let summary: Summary = serde_json::from_str(&stext).map_err(|e| HarnessError::Parse {
        line: e.line() as u64,
        msg: format!("{}: {e}", spath.display()),
    })?;
    if summary.record_count != records.len() {
        return Err(HarnessError::Parse {
            line: records.len() as u64 + 1,
            msg: format!(
                "expected {} records, found {} (truncated file?)",
                summary.record_count,
                records.len()
            ),
        });
    }
    Ok(TrialDataset { summary, records })
}

/// Two-column whitespace-delimited `(coordinate, mean)` files, one per
/// statistic and `n`, for external plotting.
pub fn write_plot_data(summary: &Summary, dir: &Path) -> Result<Vec<PathBuf>> {
    use std::collections::BTreeMap;
    let mut series: BTreeMap<(String, usize), Vec<(f64, f64)>> = BTreeMap::new();
    for a in &summary.aggregates {
        if let Some(x) = a.coord1.or(a.coord2) {
            series.entry((a.statistic.clone(), a.n)).or_default().push((x, a.mean));
        }
    }
    fs::create_dir_all(dir).map_err(|e| HarnessError::Io(e.to_string()))?;
    let mut written = Vec::new();
    for ((stat, n), points) in series {
        let path = dir.join(format!("{}_{stat}_n{n}.dat", summary.experiment));
        let body: String = points
            .iter()
            .map(|(x, y)| format!("{} {}\n", fmt_float(*x), fmt_float(*y)))
            .collect();
        fs::write(&path, body).map_err(|e| HarnessError::Io(e.to_string()))?;
        written.push(path);
    }
    Ok(written)
}

/// JSON has no NaN or infinities; those are written as strings so that a
/// summary always loads back to the value it was written from.
pub(crate) mod float {
    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
        if x.is_finite() {
            s.serialize_f64(*x)
        } else {
            s.serialize_str(&x.to_string())
        }
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Num(f64),
        Text(String),
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Num(x) => Ok(x),
            Repr::Text(t) => t.parse().map_err(|_| de::Error::custom(format!("not a float: `{t}`"))),
        }
    }
}
