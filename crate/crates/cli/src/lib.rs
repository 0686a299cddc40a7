//! Command-line front end: configuration, verification suites and reports.

pub mod commands;
pub mod config;
pub mod report;
pub mod suites;

use std::fs;
use std::path::PathBuf;

use config::{ConfigError, ExperimentConfig};
use report::{write_bundle, SuiteReport};

#[derive(Debug, thiserror::Error)]
pub enum AppError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{0}")]
    Usage(String),
    #[error("cannot load graph {}: {source}", path.display())]
    Graph {
        path: PathBuf,
        source: heatbound::Error,
    },
    #[error("exhaustion did not converge: {0}")]
    Unconverged(String),
    #[error(transparent)]
    Compute(#[from] heatbound::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl AppError {
    /// Process exit status: 2 usage or configuration, 3 unreadable graph,
    /// 4 unconverged exhaustion, 5 anything else. Status 1 is reserved for a
    /// failed hard check.
    pub fn exit_code(&self) -> u8 {
        match self {
            AppError::Config(_) | AppError::Usage(_) => 2,
            AppError::Graph { .. } => 3,
            AppError::Unconverged(_) => 4,
            AppError::Compute(_) | AppError::Io(_) | AppError::Csv(_) | AppError::Json(_) => 5,
        }
    }
}

pub struct VerifyOutcome {
    pub reports: Vec<SuiteReport>,
    pub passed: bool,
}

impl VerifyOutcome {
    pub fn exit_code(&self) -> u8 {
        if self.passed {
            0
        } else {
            1
        }
    }

    pub fn report(&self, name: &str) -> Option<&SuiteReport> {
        self.reports.iter().find(|r| r.suite == name)
    }
}

/// Runs the configured suites and writes tables, `summary.json` and the
/// canonical configuration into `out_dir`.
pub fn run_verify(config: &ExperimentConfig) -> Result<VerifyOutcome, AppError> {
    let mut reports = Vec::new();
    for &suite in &config.suites {
        reports.push(suites::run_suite(suite, config)?);
    }
    write_bundle(&config.out_dir, config.seed, &reports)?;
    fs::write(config.out_dir.join("config.txt"), config.canonical())?;
    let passed = reports.iter().all(SuiteReport::hard_passed);
    Ok(VerifyOutcome { reports, passed })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes_are_distinct() {
        let errors = [
            AppError::Config(ConfigError::UnknownKey("x".into())),
            AppError::Graph {
                path: "g".into(),
                source: heatbound::Error::Parse {
                    line: 1,
                    message: "bad".into(),
                },
            },
            AppError::Unconverged("cap".into()),
            AppError::Io(std::io::Error::other("disk")),
        ];
        let codes: Vec<u8> = errors.iter().map(AppError::exit_code).collect();
        assert_eq!(codes, [2, 3, 4, 5]);
    }

    #[test]
    fn verify_writes_bundle() {
        let dir = tempfile::tempdir().unwrap();
        let config = ExperimentConfig {
            suites: vec![config::Suite::ClosedForm],
            out_dir: dir.path().to_path_buf(),
            ..ExperimentConfig::default()
        };
        let outcome = run_verify(&config).unwrap();
        assert_eq!(outcome.exit_code(), 0);
        assert!(outcome.report("closed_form").is_some());
        for file in ["closed_form.csv", "summary.json", "config.txt"] {
            assert!(dir.path().join(file).exists(), "{file}");
        }
    }
}
