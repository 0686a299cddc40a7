//! Suite reports, CSV tables and the JSON summary.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;

use crate::config::Suite;
use crate::AppError;

/// Shortest decimal that parses back to the same `f64`.
pub fn num(x: f64) -> String {
    if x.is_infinite() {
        if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        }
    } else {
        format!("{x}")
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(name: &str, columns: &[&str]) -> Self {
        Self {
            name: name.into(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    /// CSV body without the header comment.
    pub fn body(&self) -> Result<Vec<u8>, AppError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.columns)?;
        for row in &self.rows {
            w.write_record(row)?;
        }
        w.into_inner().map_err(|e| AppError::Io(e.into_error()))
    }

    /// Writes `# generated …` followed by the CSV body.
    pub fn write(&self, dir: &Path, header: &str) -> Result<(), AppError> {
        let mut file = fs::File::create(dir.join(format!("{}.csv", self.name)))?;
        writeln!(file, "# {header}")?;
        file.write_all(&self.body()?)?;
        Ok(())
    }
}

/// A measured quantity with its verdict. Hard checks decide the exit status;
/// the others are findings.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub passed: bool,
    pub hard: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub checks: Vec<Check>,
    pub measures: BTreeMap<String, f64>,
    pub seconds: f64,
    #[serde(skip)]
    pub tables: Vec<Table>,
}

impl SuiteReport {
    pub fn new(suite: Suite) -> Self {
        Self {
            suite: suite.name().into(),
            checks: Vec::new(),
            measures: BTreeMap::new(),
            seconds: 0.0,
            tables: Vec::new(),
        }
    }

    pub fn hard(&mut self, name: &str, value: f64, passed: bool) {
        self.checks.push(Check {
            name: name.into(),
            value,
            passed,
            hard: true,
        });
    }

    pub fn finding(&mut self, name: &str, value: f64, passed: bool) {
        self.checks.push(Check {
            name: name.into(),
            value,
            passed,
            hard: false,
        });
    }

    pub fn measure(&mut self, name: &str, value: f64) {
        self.measures.insert(name.into(), value);
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn hard_passed(&self) -> bool {
        self.checks.iter().filter(|c| c.hard).all(|c| c.passed)
    }

    pub fn table(&self, name: &str) -> Option<&Table> {
        self.tables.iter().find(|t| t.name == name)
    }
}

#[derive(Serialize)]
struct Summary<'a> {
    seed: u64,
    passed: bool,
    suites: &'a [SuiteReport],
}

pub fn header_line(seed: u64) -> String {
    let secs = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    format!("generated_unix={secs} seed={seed}")
}

/// Writes every table as CSV and `summary.json` into `dir`.
pub fn write_bundle(dir: &Path, seed: u64, reports: &[SuiteReport]) -> Result<(), AppError> {
    fs::create_dir_all(dir)?;
    let header = header_line(seed);
    for report in reports {
        for table in &report.tables {
            table.write(dir, &header)?;
        }
    }
    let summary = Summary {
        seed,
        passed: reports.iter().all(SuiteReport::hard_passed),
        suites: reports,
    };
    let json = serde_json::to_string_pretty(&summary)?;
    fs::write(dir.join("summary.json"), json + "\n")?;
    Ok(())
}

/// CSV file contents with `#` comment lines removed.
pub fn csv_body(path: &Path) -> std::io::Result<String> {
    Ok(fs::read_to_string(path)?
        .lines()
        .filter(|l| !l.starts_with('#'))
        .map(|l| format!("{l}\n"))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_round_trip() {
        for x in [0.1, 1.0 / 3.0, 1e-300, 12345.678, f64::INFINITY] {
            let s = num(x);
            assert_eq!(
                if s == "inf" {
                    f64::INFINITY
                } else {
                    s.parse().unwrap()
                },
                x
            );
        }
    }

    #[test]
    fn table_body() {
        let mut t = Table::new("demo", &["a", "b"]);
        t.push(vec!["1".into(), "x,y".into()]);
        assert_eq!(
            String::from_utf8(t.body().unwrap()).unwrap(),
            "a,b\n1,\"x,y\"\n"
        );
    }

    #[test]
    fn hard_checks_decide() {
        let mut r = SuiteReport::new(Suite::Zeta);
        r.finding("band", 40.0, false);
        assert!(r.hard_passed());
        r.hard("identity", 1e-3, false);
        assert!(!r.hard_passed());
    }
}
