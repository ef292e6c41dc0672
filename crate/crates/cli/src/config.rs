//! Run configuration from `key = value` text or command-line flags.
//!
//! Both sources reduce to a list of `(key, value)` pairs, so errors name the
//! same keys either way. Keys use kebab case; underscores are accepted.

use std::fmt::Write as _;
use std::path::PathBuf;

use gepup_core::bench::{CaseId, ConvergenceConfig, MeshParams, SimulationConfig};
use gepup_core::gepup::SolverTolerances;
use gepup_core::imex::{StepperConfig, TableauId};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ConfigError {
    #[error("missing required keys: {}", .0.join(", "))]
    Missing(Vec<&'static str>),
    #[error("unknown key '{0}'")]
    UnknownKey(String),
    #[error("key '{key}' given more than once")]
    Duplicate { key: String },
    #[error("invalid value '{value}' for key '{key}': {reason}")]
    Invalid {
        key: String,
        value: String,
        reason: String,
    },
    #[error("line {line}: expected 'key = value', got '{text}'")]
    Syntax { line: usize, text: String },
}

/// Which subcommand the configuration is for; decides the required keys.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Run,
    Converge,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub case: CaseId,
    pub re: f64,
    pub degree: usize,
    /// Finest refinement level.
    pub level: u32,
    /// Levels of a convergence study; empty for single runs.
    pub levels: Vec<u32>,
    pub base_cells: [usize; 2],
    pub integrator: TableauId,
    pub courant: f64,
    pub t0: f64,
    pub t_end: f64,
    pub dt_max: f64,
    pub fixed_dt: Option<f64>,
    pub output: PathBuf,
    /// Steps between VTK snapshots; 0 writes only the first and last.
    pub snapshot_interval: usize,
    pub rebuild_interval: usize,
    /// Relative tolerance of every linear solve.
    pub tol: f64,
}

pub const KEYS: &[&str] = &[
    "case",
    "re",
    "degree",
    "level",
    "levels",
    "base",
    "integrator",
    "cr",
    "t0",
    "t-end",
    "dt-max",
    "fixed-dt",
    "output",
    "snapshot-interval",
    "rebuild-interval",
    "tol",
];

pub const MAX_LEVEL: u32 = 10;

/// Maps a key or accepted alias to its canonical spelling.
pub fn canonical(key: &str) -> Result<&'static str, ConfigError> {
    let k = key
        .trim()
        .trim_start_matches("--")
        .replace('_', "-")
        .to_ascii_lowercase();
    let k = match k.as_str() {
        "courant" => "cr",
        "tableau" => "integrator",
        "t-start" => "t0",
        other => other,
    }
    .to_string();
    KEYS.iter()
        .find(|c| **c == k)
        .copied()
        .ok_or_else(|| ConfigError::UnknownKey(key.trim().to_string()))
}

/// Default Reynolds number per case.
pub fn default_re(case: CaseId) -> f64 {
    match case {
        CaseId::TaylorGreen => 100.0,
        CaseId::SingleVortex | CaseId::LidCavity => 5000.0,
        CaseId::Zero => 1.0,
    }
}

/// Splits `key = value` lines into pairs with canonical keys.
pub fn text_pairs(text: &str) -> Result<Vec<(String, String)>, ConfigError> {
    let mut pairs = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| ConfigError::Syntax {
            line: i + 1,
            text: raw.to_string(),
        })?;
        pairs.push((canonical(k)?.to_string(), v.trim().to_string()));
    }
    Ok(pairs)
}

struct Pairs(Vec<(&'static str, String)>);

impl Pairs {
    fn get(&self, key: &str) -> Option<&str> {
        self.0
            .iter()
            .find(|(k, _)| *k == key)
            .map(|(_, v)| v.as_str())
    }

    fn parse<T: std::str::FromStr>(&self, key: &'static str) -> Result<Option<T>, ConfigError>
    where
        T::Err: std::fmt::Display,
    {
        self.get(key)
            .map(|v| {
                v.trim().parse::<T>().map_err(|e| ConfigError::Invalid {
                    key: key.into(),
                    value: v.into(),
                    reason: e.to_string(),
                })
            })
            .transpose()
    }
}

fn invalid(key: &str, value: impl ToString, reason: impl Into<String>) -> ConfigError {
    ConfigError::Invalid {
        key: key.into(),
        value: value.to_string(),
        reason: reason.into(),
    }
}

fn parse_levels(v: &str) -> Result<Vec<u32>, ConfigError> {
    let bad = |r: &str| invalid("levels", v, r);
    let v = v.trim();
    let levels: Vec<u32> = if let Some((a, b)) = v.split_once("..") {
        let a: u32 = a
            .trim()
            .parse()
            .map_err(|_| bad("expected 'a..b' or a comma list"))?;
        let b: u32 = b
            .trim()
            .trim_start_matches('=')
            .parse()
            .map_err(|_| bad("expected 'a..b' or a comma list"))?;
        (a..=b).collect()
    } else {
        v.split(',')
            .map(|s| s.trim().parse::<u32>())
            .collect::<Result<_, _>>()
            .map_err(|_| bad("expected 'a..b' or a comma list"))?
    };
    if levels.len() < 2 {
        return Err(bad("a convergence study needs at least two levels"));
    }
    if levels.windows(2).any(|w| w[1] != w[0] + 1) {
        return Err(bad("levels must be consecutive and increasing"));
    }
    if *levels.last().unwrap() > MAX_LEVEL {
        return Err(bad(
            format!("levels above {MAX_LEVEL} are not supported").as_str()
        ));
    }
    Ok(levels)
}

fn parse_base(v: &str) -> Result<[usize; 2], ConfigError> {
    let parts: Vec<&str> = v.trim().split(['x', 'X', ',']).collect();
    let nums: Result<Vec<usize>, _> = parts.iter().map(|p| p.trim().parse::<usize>()).collect();
    match nums.as_deref() {
        Ok([n]) if *n > 0 => Ok([*n, *n]),
        Ok([a, b]) if *a > 0 && *b > 0 => Ok([*a, *b]),
        _ => Err(invalid(
            "base",
            v,
            "expected positive cell counts 'NX' or 'NXxNY'",
        )),
    }
}

impl RunConfig {
    /// Builds and validates a configuration from `(key, value)` pairs.
    pub fn from_pairs<K: AsRef<str>, V: Into<String>>(
        mode: Mode,
        pairs: impl IntoIterator<Item = (K, V)>,
    ) -> Result<Self, ConfigError> {
        let mut list: Vec<(&'static str, String)> = Vec::new();
        for (k, v) in pairs {
            let key = canonical(k.as_ref())?;
            if list.iter().any(|(c, _)| *c == key) {
                return Err(ConfigError::Duplicate { key: key.into() });
            }
            list.push((key, v.into()));
        }
        let p = Pairs(list);

        let mut required: Vec<&'static str> = vec!["case", "degree"];
        required.push(if mode == Mode::Converge {
            "levels"
        } else {
            "level"
        });
        required.extend(["integrator", "t-end"]);
        let missing: Vec<&'static str> = required
            .into_iter()
            .filter(|k| p.get(k).is_none())
            .collect();
        if !missing.is_empty() {
            return Err(ConfigError::Missing(missing));
        }

        let case_s = p.get("case").unwrap();
        let case = CaseId::parse(case_s).map_err(|e| invalid("case", case_s, e.to_string()))?;
        let integ_s = p.get("integrator").unwrap();
        let integrator =
            TableauId::parse(integ_s).map_err(|e| invalid("integrator", integ_s, e.to_string()))?;
        let levels = match p.get("levels") {
            Some(v) => parse_levels(v)?,
            None => Vec::new(),
        };
        let level = match p.parse::<u32>("level")? {
            Some(l) => l,
            None => *levels.last().expect("levels required in converge mode"),
        };
        let cfg = RunConfig {
            case,
            re: p.parse("re")?.unwrap_or_else(|| default_re(case)),
            degree: p.parse("degree")?.unwrap(),
            level,
            levels,
            base_cells: p.get("base").map(parse_base).transpose()?.unwrap_or([1, 1]),
            integrator,
            courant: p.parse("cr")?.unwrap_or(0.8),
            t0: p.parse("t0")?.unwrap_or(0.0),
            t_end: p.parse("t-end")?.unwrap(),
            dt_max: p.parse("dt-max")?.unwrap_or(0.1),
            fixed_dt: p.parse("fixed-dt")?,
            output: p
                .get("output")
                .map(PathBuf::from)
                .unwrap_or_else(|| PathBuf::from("output")),
            snapshot_interval: p.parse("snapshot-interval")?.unwrap_or(0),
            rebuild_interval: p.parse("rebuild-interval")?.unwrap_or(50),
            tol: p.parse("tol")?.unwrap_or(1e-12),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Parses `key = value` lines; `#` starts a comment.
    pub fn from_text(mode: Mode, text: &str) -> Result<Self, ConfigError> {
        Self::from_pairs(mode, text_pairs(text)?)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let positive = |key: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(invalid(key, v, "must be positive and finite"))
            }
        };
        if !(1..=4).contains(&self.degree) {
            return Err(invalid("degree", self.degree, "must be in 1..=4"));
        }
        if self.level > MAX_LEVEL {
            return Err(invalid(
                "level",
                self.level,
                format!("must be at most {MAX_LEVEL}"),
            ));
        }
        positive("re", self.re)?;
        positive("cr", self.courant)?;
        positive("dt-max", self.dt_max)?;
        if let Some(dt) = self.fixed_dt {
            positive("fixed-dt", dt)?;
        }
        if !self.t0.is_finite() {
            return Err(invalid("t0", self.t0, "must be finite"));
        }
        if !(self.t_end >= self.t0) || !self.t_end.is_finite() {
            return Err(invalid(
                "t-end",
                self.t_end,
                format!("must be finite and not before t0 = {}", self.t0),
            ));
        }
        if !(self.tol > 0.0 && self.tol < 1.0) {
            return Err(invalid("tol", self.tol, "must lie in (0, 1)"));
        }
        if self.rebuild_interval == 0 {
            return Err(invalid("rebuild-interval", 0, "must be at least 1"));
        }
        if self.base_cells.contains(&0) {
            return Err(invalid(
                "base",
                format!("{:?}", self.base_cells),
                "cell counts must be positive",
            ));
        }
        Ok(())
    }

    /// `key = value` text accepted by [`RunConfig::from_text`].
    pub fn serialize(&self) -> String {
        let mut s = String::new();
        let mut put = |k: &str, v: String| {
            let _ = writeln!(s, "{k} = {v}");
        };
        put("case", self.case.to_string());
        put("re", format!("{:?}", self.re));
        put("degree", self.degree.to_string());
        put("level", self.level.to_string());
        if !self.levels.is_empty() {
            put(
                "levels",
                self.levels
                    .iter()
                    .map(|l| l.to_string())
                    .collect::<Vec<_>>()
                    .join(","),
            );
        }
        put(
            "base",
            format!("{}x{}", self.base_cells[0], self.base_cells[1]),
        );
        put("integrator", self.integrator.to_string());
        put("cr", format!("{:?}", self.courant));
        put("t0", format!("{:?}", self.t0));
        put("t-end", format!("{:?}", self.t_end));
        put("dt-max", format!("{:?}", self.dt_max));
        if let Some(dt) = self.fixed_dt {
            put("fixed-dt", format!("{dt:?}"));
        }
        put("output", self.output.display().to_string());
        put("snapshot-interval", self.snapshot_interval.to_string());
        put("rebuild-interval", self.rebuild_interval.to_string());
        put("tol", format!("{:?}", self.tol));
        s
    }

    pub fn tolerances(&self) -> SolverTolerances {
        SolverTolerances::uniform(self.tol)
    }

    pub fn simulation(&self) -> SimulationConfig {
        SimulationConfig {
            mesh: MeshParams {
                base_cells: self.base_cells,
                level: self.level,
                degree: self.degree,
            },
            stepper: StepperConfig {
                tableau: self.integrator,
                courant: self.courant,
                dt_max: self.dt_max,
                rebuild_interval: self.rebuild_interval,
            },
            tolerances: self.tolerances(),
            t0: self.t0,
            t_end: self.t_end,
            fixed_dt: self.fixed_dt,
        }
    }

    pub fn convergence(&self) -> ConvergenceConfig {
        ConvergenceConfig {
            degree: self.degree,
            tableau: self.integrator,
            base_cells: self.base_cells,
            levels: self.levels.clone(),
            courant: self.courant,
            t0: self.t0,
            t_end: self.t_end,
            tolerances: self.tolerances(),
            rebuild_interval: self.rebuild_interval,
        }
    }
}
