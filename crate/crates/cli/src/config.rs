//! Experiment configuration in a `key = value` text format.
//!
//! Unknown or repeated keys are errors. [`ExperimentConfig::canonical`] writes
//! every key in sorted order, and parsing that text gives back the same value.

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("unknown key `{0}`")]
    UnknownKey(String),
    #[error("key `{0}` given twice")]
    DuplicateKey(String),
    #[error("bad value `{value}` for `{key}`: {message}")]
    Value {
        key: String,
        value: String,
        message: String,
    },
}

macro_rules! names {
    ($(#[$meta:meta])* $name:ident { $($variant:ident => $text:literal),+ $(,)? }) => {
        $(#[$meta])*
        #[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
        pub enum $name { $($variant),+ }

        impl $name {
            pub const ALL: &'static [$name] = &[$($name::$variant),+];

            pub fn name(self) -> &'static str {
                match self { $($name::$variant => $text),+ }
            }
        }

        impl FromStr for $name {
            type Err = String;
            fn from_str(s: &str) -> Result<Self, String> {
                match s {
                    $($text => Ok($name::$variant),)+
                    _ => Err(format!(
                        "expected one of {}",
                        [$($text),+].join(", ")
                    )),
                }
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.name())
            }
        }
    };
}

names!(
    /// Verification suites, in execution order.
    Suite {
        Identities => "identities",
        ClosedForm => "closed_form",
        Reduction => "reduction",
        MetricReduction => "metric_reduction",
        Intrinsic => "intrinsic",
        Semigroup => "semigroup",
        Decay => "decay",
        Bands => "bands",
        Isoperimetry => "isoperimetry",
        Sobolev => "sobolev",
        Zeta => "zeta",
        Ratios => "ratios",
        Lambda => "lambda",
        Custom => "custom",
    }
);

names!(MetricChoice {
    Degree => "degree",
    Combinatorial => "combinatorial",
});

names!(BoundChoice {
    Main => "main",
    Antitree1 => "antitree1",
    Antitree1c => "antitree1c",
    Antitree2 => "antitree2",
});

names!(
    /// What the generator builds from `gamma` and `levels`.
    Shape {
        Line => "line",
        Antitree => "antitree",
    }
);

/// Geometric time grid `start, start·ratio, …` up to `end`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TimeGrid {
    pub start: f64,
    pub end: f64,
    pub ratio: f64,
}

impl FromStr for TimeGrid {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        let [a, b, r] = parts[..] else {
            return Err("expected start:end:ratio".into());
        };
        let num = |x: &str| x.trim().parse::<f64>().map_err(|e| e.to_string());
        let grid = TimeGrid {
            start: num(a)?,
            end: num(b)?,
            ratio: num(r)?,
        };
        if !(grid.start > 0.0 && grid.end >= grid.start && grid.ratio > 1.0) {
            return Err("need 0 < start <= end and ratio > 1".into());
        }
        Ok(grid)
    }
}

impl fmt::Display for TimeGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.start, self.end, self.ratio)
    }
}

/// `p ∈ (1, ∞]`, written `inf` for infinity.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MeanExponent(pub f64);

impl FromStr for MeanExponent {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let p = match s {
            "inf" => f64::INFINITY,
            _ => s.parse::<f64>().map_err(|e| e.to_string())?,
        };
        if p > 1.0 {
            Ok(MeanExponent(p))
        } else {
            Err("need p > 1".into())
        }
    }
}

impl fmt::Display for MeanExponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_infinite() {
            f.write_str("inf")
        } else {
            write!(f, "{}", self.0)
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub seed: u64,
    pub suites: Vec<Suite>,
    /// Graph file for the custom suite; the generator is used when absent.
    pub graph: Option<PathBuf>,
    pub gamma: f64,
    pub levels: usize,
    pub shape: Shape,
    pub anchor: usize,
    pub metric: MetricChoice,
    pub t_grid: TimeGrid,
    pub bound: BoundChoice,
    /// Sobolev dimension; `2d` when absent.
    pub n: Option<f64>,
    pub p: MeanExponent,
    /// `1 + 1/(n ∨ 2q)` when absent.
    pub beta: Option<f64>,
    /// Volume growth exponent; from `gamma` when absent.
    pub d: Option<f64>,
    pub tolerance: f64,
    pub out_dir: PathBuf,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            seed: 1,
            suites: Suite::ALL
                .iter()
                .copied()
                .filter(|&s| s != Suite::Custom)
                .collect(),
            graph: None,
            gamma: 1.0,
            levels: 12,
            shape: Shape::Line,
            anchor: 0,
            metric: MetricChoice::Degree,
            t_grid: TimeGrid {
                start: 0.5,
                end: 8.0,
                ratio: 2.0,
            },
            bound: BoundChoice::Antitree1,
            n: None,
            p: MeanExponent(f64::INFINITY),
            beta: None,
            d: None,
            tolerance: 1e-10,
            out_dir: PathBuf::from("out"),
        }
    }
}

fn value_err(key: &str, value: &str, message: impl fmt::Display) -> ConfigError {
    ConfigError::Value {
        key: key.into(),
        value: value.into(),
        message: message.to_string(),
    }
}

fn parse_value<T: FromStr>(key: &str, value: &str) -> Result<T, ConfigError>
where
    T::Err: fmt::Display,
{
    value.parse::<T>().map_err(|e| value_err(key, value, e))
}

fn positive(key: &str, value: &str) -> Result<f64, ConfigError> {
    let v: f64 = parse_value(key, value)?;
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(value_err(key, value, "need a finite positive number"))
    }
}

impl ExperimentConfig {
    pub const KEYS: &'static [&'static str] = &[
        "anchor",
        "beta",
        "bound",
        "d",
        "gamma",
        "graph",
        "levels",
        "metric",
        "n",
        "out_dir",
        "p",
        "seed",
        "shape",
        "suites",
        "t_grid",
        "tolerance",
    ];

    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut pairs = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(ConfigError::Syntax {
                    line: i + 1,
                    message: "expected `key = value`".into(),
                });
            };
            let (key, value) = (key.trim().to_string(), value.trim().to_string());
            if pairs.insert(key.clone(), value).is_some() {
                return Err(ConfigError::DuplicateKey(key));
            }
        }
        let mut config = Self::default();
        for (key, value) in &pairs {
            config.set(key, value)?;
        }
        Ok(config)
    }

    /// Applies one `key = value` setting, as from the file or a flag override.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        match key {
            "seed" => self.seed = parse_value(key, value)?,
            "suites" => {
                let mut suites = value
                    .split(',')
                    .map(str::trim)
                    .filter(|s| !s.is_empty())
                    .map(|s| parse_value::<Suite>(key, s))
                    .collect::<Result<Vec<_>, _>>()?;
                suites.sort();
                suites.dedup();
                self.suites = suites;
            }
            "graph" => {
                self.graph = (!value.is_empty()).then(|| PathBuf::from(value));
            }
            "gamma" => {
                let g: f64 = parse_value(key, value)?;
                if !(0.0..2.0).contains(&g) {
                    return Err(value_err(key, value, "need 0 <= gamma < 2"));
                }
                self.gamma = g;
            }
            "levels" => {
                let l: usize = parse_value(key, value)?;
                if l == 0 {
                    return Err(value_err(key, value, "need at least one level"));
                }
                self.levels = l;
            }
            "shape" => self.shape = parse_value(key, value)?,
            "anchor" => self.anchor = parse_value(key, value)?,
            "metric" => self.metric = parse_value(key, value)?,
            "t_grid" => self.t_grid = parse_value(key, value)?,
            "bound" => self.bound = parse_value(key, value)?,
            "n" => {
                let n: f64 = parse_value(key, value)?;
                if !(n > 2.0 && n.is_finite()) {
                    return Err(value_err(key, value, "need 2 < n < infinity"));
                }
                self.n = Some(n);
            }
            "p" => self.p = parse_value(key, value)?,
            "beta" => {
                let b: f64 = parse_value(key, value)?;
                if b.is_nan() || b <= 1.0 {
                    return Err(value_err(key, value, "need beta > 1"));
                }
                self.beta = Some(b);
            }
            "d" => self.d = Some(positive(key, value)?),
            "tolerance" => self.tolerance = positive(key, value)?,
            "out_dir" => self.out_dir = PathBuf::from(value),
            _ => return Err(ConfigError::UnknownKey(key.into())),
        }
        Ok(())
    }

    /// Canonical text: all keys sorted, unset options written as empty values
    /// only where the key accepts it.
    pub fn canonical(&self) -> String {
        let mut lines: BTreeMap<&str, String> = BTreeMap::new();
        lines.insert("anchor", self.anchor.to_string());
        if let Some(b) = self.beta {
            lines.insert("beta", b.to_string());
        }
        lines.insert("bound", self.bound.to_string());
        if let Some(d) = self.d {
            lines.insert("d", d.to_string());
        }
        lines.insert("gamma", self.gamma.to_string());
        lines.insert(
            "graph",
            self.graph
                .as_ref()
                .map(|p| p.display().to_string())
                .unwrap_or_default(),
        );
        lines.insert("levels", self.levels.to_string());
        lines.insert("metric", self.metric.to_string());
        if let Some(n) = self.n {
            lines.insert("n", n.to_string());
        }
        lines.insert("out_dir", self.out_dir.display().to_string());
        lines.insert("p", self.p.to_string());
        lines.insert("seed", self.seed.to_string());
        lines.insert("shape", self.shape.to_string());
        lines.insert(
            "suites",
            self.suites
                .iter()
                .map(|s| s.name())
                .collect::<Vec<_>>()
                .join(","),
        );
        lines.insert("t_grid", self.t_grid.to_string());
        lines.insert("tolerance", self.tolerance.to_string());
        lines
            .into_iter()
            .map(|(k, v)| {
                if v.is_empty() {
                    format!("{k} =\n")
                } else {
                    format!("{k} = {v}\n")
                }
            })
            .collect()
    }
}
