//! Graph specs and flat `key = value` experiment configs.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::graph::{complete_bipartite, complete_graph, cycle_graph, disjoint_copies, random_regular, RegularGraph};
use crate::io::read_graph;
use crate::lift::MAX_LIFT_DEGREE;

/// How to obtain a base graph: a generator call such as `random(500,6,7)`
/// or a path to an edge-list file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GraphSpec {
    Complete(usize),
    Bipartite(usize),
    Cycle(usize),
    Random { n: usize, d: usize, seed: u64 },
    Copies(Box<GraphSpec>, usize),
    File(PathBuf),
}

impl GraphSpec {
    pub fn build(&self) -> Result<RegularGraph> {
        match self {
            GraphSpec::Complete(m) => complete_graph(*m),
            GraphSpec::Bipartite(m) => complete_bipartite(*m),
            GraphSpec::Cycle(n) => cycle_graph(*n),
            GraphSpec::Random { n, d, seed } => random_regular(*n, *d, *seed),
            GraphSpec::Copies(g, m) => disjoint_copies(&g.build()?, *m),
            GraphSpec::File(p) => read_graph(p),
        }
    }
}

/// Splits `name(args)` into the name and top-level comma-separated args.
fn split_call(s: &str) -> Option<(&str, Vec<&str>)> {
    let open = s.find('(')?;
    let inner = s.strip_suffix(')')?.get(open + 1..)?;
    let mut args = Vec::new();
    let (mut depth, mut start) = (0i32, 0);
    for (i, c) in inner.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => {
                args.push(inner[start..i].trim());
                start = i + 1;
            }
            _ => {}
        }
    }
    args.push(inner[start..].trim());
    Some((s[..open].trim(), args))
}

impl FromStr for GraphSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let Some((name, args)) = split_call(s) else {
            if s.is_empty() {
                return Err(Error::invalid("empty graph spec"));
            }
            return Ok(GraphSpec::File(PathBuf::from(s)));
        };
        let bad = || Error::invalid(format!("cannot parse graph spec {s:?}"));
        let num = |a: &str| a.parse::<u64>().map_err(|_| bad());
        let size = |a: &str| a.parse::<usize>().map_err(|_| bad());
        match (name, args.as_slice()) {
            ("complete", [m]) => Ok(GraphSpec::Complete(size(m)?)),
            ("bipartite", [m]) => Ok(GraphSpec::Bipartite(size(m)?)),
            ("cycle", [n]) => Ok(GraphSpec::Cycle(size(n)?)),
            ("random", [n, d, seed]) => Ok(GraphSpec::Random {
                n: size(n)?,
                d: size(d)?,
                seed: num(seed)?,
            }),
            ("copies", [g, m]) => Ok(GraphSpec::Copies(Box::new(g.parse()?), size(m)?)),
            _ => Err(bad()),
        }
    }
}

impl fmt::Display for GraphSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GraphSpec::Complete(m) => write!(f, "complete({m})"),
            GraphSpec::Bipartite(m) => write!(f, "bipartite({m})"),
            GraphSpec::Cycle(n) => write!(f, "cycle({n})"),
            GraphSpec::Random { n, d, seed } => write!(f, "random({n},{d},{seed})"),
            GraphSpec::Copies(g, m) => write!(f, "copies({g},{m})"),
            GraphSpec::File(p) => write!(f, "{}", p.display()),
        }
    }
}

impl Serialize for GraphSpec {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LiftMode {
    /// Uniform signings (k = 2).
    #[default]
    TwoLift,
    /// Uniform cyclic shifts in `0..k`.
    ShiftLift,
}

impl FromStr for LiftMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "two_lift" => Ok(LiftMode::TwoLift),
            "shift_lift" => Ok(LiftMode::ShiftLift),
            other => Err(Error::invalid(format!("unknown mode {other:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub graph: GraphSpec,
    pub k: usize,
    pub trials: usize,
    #[serde(serialize_with = "crate::io::u64_as_string")]
    pub base_seed: u64,
    /// Constants `c` for the bounds `λ + c√d` and `c·λ`.
    pub constants: Vec<f64>,
    pub mode: LiftMode,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            graph: GraphSpec::Complete(4),
            k: 2,
            trials: 100,
            base_seed: 0,
            constants: vec![1.0, 2.0, 3.0],
            mode: LiftMode::TwoLift,
        }
    }
}

pub const CONFIG_KEYS: [&str; 6] = ["graph", "k", "trials", "seed", "constants", "mode"];

impl ExperimentConfig {
    /// Overrides one field from its textual form.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let value = value.trim();
        let bad = || Error::invalid(format!("bad value {value:?} for {key}"));
        match key {
            "graph" => self.graph = value.parse()?,
            "k" => self.k = value.parse().map_err(|_| bad())?,
            "trials" => self.trials = value.parse().map_err(|_| bad())?,
            "seed" => self.base_seed = value.parse().map_err(|_| bad())?,
            "constants" => {
                self.constants = value
                    .split(',')
                    .map(|c| c.trim().parse::<f64>().map_err(|_| bad()))
                    .collect::<Result<_>>()?
            }
            "mode" => self.mode = value.parse()?,
            _ => return Err(Error::invalid(format!("unknown key {key:?}"))),
        }
        Ok(())
    }

    /// Parses `key = value` lines over the defaults. `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = ExperimentConfig::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(Error::parse(i + 1, format!("expected key = value, got {line:?}")));
            };
            cfg.set(key.trim(), value)
                .map_err(|e| Error::parse(i + 1, e.to_string()))?;
        }
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::invalid("trials must be at least 1"));
        }
        if !(2..=MAX_LIFT_DEGREE).contains(&self.k) {
            return Err(Error::invalid(format!(
                "k = {} is outside 2..={MAX_LIFT_DEGREE}",
                self.k
            )));
        }
        if self.mode == LiftMode::TwoLift && self.k != 2 {
            return Err(Error::invalid("two_lift mode needs k = 2"));
        }
        if self.constants.iter().any(|c| !c.is_finite()) {
            return Err(Error::invalid("bound constants must be finite"));
        }
        Ok(())
    }
}
