//! Experiment configuration.
//!
//! A configuration is a flat TOML table. Every key is optional and falls back
//! to the reference setup: six nodes on a ring with extra edges drawn with
//! probability 0.2, `γ0 = 1`, `c1 = 2`, `c2 = 1`, unit initial weights,
//! harmonic gains, one bit per round alternating between the two channels and
//! the quantizer range `[0, 1]`.
//!
//! ```toml
//! nodes = 6
//! edge_prob = 0.2
//! graphs = 100
//! inits = 100
//! max_rounds = 100000
//! bits = "simultaneous"
//! y0 = "uniform"          # or an explicit list such as [0.1, 0.9, ...]
//! seed = 1
//! ```

use std::path::Path;

use serde::Deserialize;

use crate::consensus::{ConsensusSchedules, QuantRange};
use crate::digraph::Digraph;
use crate::error::{Assumption, Error, Result};
use crate::numerics::{AlphaSchedule, BitScheme, StepSchedule};

/// Keys accepted in a configuration file.
pub const KEYS: [&str; 18] = [
    "nodes",
    "edge_prob",
    "graphs",
    "inits",
    "max_rounds",
    "target_mse",
    "gamma0",
    "c1",
    "c2",
    "cij",
    "alpha",
    "bits",
    "qmin",
    "qmax",
    "y0",
    "seed",
    "diag_u",
    "trace",
];

/// Where the initial estimates come from.
#[derive(Debug, Clone, PartialEq)]
pub enum InitialValues {
    /// i.i.d. uniform on the quantizer range, one draw per trial.
    Uniform,
    /// The same values for every trial.
    Explicit(Vec<f64>),
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum RawInitial {
    Name(String),
    Values(Vec<f64>),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    nodes: Option<usize>,
    edge_prob: Option<f64>,
    graphs: Option<usize>,
    inits: Option<usize>,
    max_rounds: Option<u64>,
    target_mse: Option<f64>,
    gamma0: Option<f64>,
    c1: Option<u32>,
    c2: Option<u64>,
    cij: Option<u64>,
    alpha: Option<String>,
    bits: Option<String>,
    qmin: Option<f64>,
    qmax: Option<f64>,
    y0: Option<RawInitial>,
    seed: Option<u64>,
    diag_u: Option<bool>,
    trace: Option<bool>,
}

/// A validated experiment description.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub nodes: usize,
    pub edge_prob: f64,
    pub graphs: usize,
    pub inits: usize,
    pub max_rounds: u64,
    pub target_mse: Option<f64>,
    pub step: StepSchedule,
    pub cij: u64,
    pub alpha: AlphaSchedule,
    pub bits: BitScheme,
    pub range: QuantRange,
    pub y0: InitialValues,
    pub seed: u64,
    /// Record the potential `U(k)` in balancing traces.
    pub diag_u: bool,
    /// Write per-trial round traces.
    pub trace: bool,
    /// Use this graph for every trial instead of generating one per graph index.
    pub graph: Option<Digraph>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            nodes: 6,
            edge_prob: 0.2,
            graphs: 100,
            inits: 100,
            max_rounds: 100_000,
            target_mse: None,
            step: StepSchedule::new(1.0, 2, 1).expect("reference step schedule"),
            cij: 1,
            alpha: AlphaSchedule::Harmonic,
            bits: BitScheme::Alternating,
            range: QuantRange::new(0.0, 1.0).expect("unit range"),
            y0: InitialValues::Uniform,
            seed: 1,
            diag_u: false,
            trace: false,
            graph: None,
        }
    }
}

impl ExperimentConfig {
    /// Parses a TOML document and applies `key=value` overrides on top.
    ///
    /// Override values are read as TOML when they parse as such and as plain
    /// strings otherwise, so `bits=simultaneous` and `y0=[0.1,0.2]` both work.
    pub fn from_toml_str(text: &str, overrides: &[String]) -> Result<Self> {
        Self::parse(text, overrides, Path::new("<config>"))
    }

    fn parse(text: &str, overrides: &[String], origin: &Path) -> Result<Self> {
        let parse_err = |msg: String| Error::Parse {
            path: origin.to_path_buf(),
            msg,
        };
        let mut table: toml::Table = text.parse().map_err(|e: toml::de::Error| parse_err(e.to_string()))?;
        for item in overrides {
            let (key, value) = item
                .split_once('=')
                .ok_or_else(|| Error::invalid(format!("override `{item}` is not of the form key=value")))?;
            let key = key.trim();
            if !KEYS.contains(&key) {
                return Err(Error::invalid(format!("unknown configuration key `{key}`")));
            }
            table.insert(key.to_string(), parse_value(value.trim()));
        }
        let raw: RawConfig = table.try_into().map_err(|e: toml::de::Error| parse_err(e.to_string()))?;
        Self::from_raw(raw)
    }

    fn from_raw(raw: RawConfig) -> Result<Self> {
        let d = Self::default();
        let nodes = raw.nodes.unwrap_or(d.nodes);
        if nodes < 2 {
            return Err(Error::invalid(format!("nodes must be at least 2, got {nodes}")));
        }
        let edge_prob = raw.edge_prob.unwrap_or(d.edge_prob);
        if !(0.0..=1.0).contains(&edge_prob) {
            return Err(Error::invalid(format!("edge_prob must lie in [0, 1], got {edge_prob}")));
        }
        let graphs = raw.graphs.unwrap_or(d.graphs);
        let inits = raw.inits.unwrap_or(d.inits);
        if graphs == 0 || inits == 0 {
            return Err(Error::invalid("graphs and inits must be at least 1"));
        }
        let max_rounds = raw.max_rounds.unwrap_or(d.max_rounds);
        if max_rounds == 0 {
            return Err(Error::invalid("max_rounds must be at least 1"));
        }
        if let Some(t) = raw.target_mse {
            if !(t.is_finite() && t > 0.0) {
                return Err(Error::invalid(format!("target_mse must be positive, got {t}")));
            }
        }
        let step = StepSchedule::new(
            raw.gamma0.unwrap_or(d.step.gamma0()),
            raw.c1.unwrap_or(d.step.c1()),
            raw.c2.unwrap_or(d.step.c2()),
        )?;
        let cij = raw.cij.unwrap_or(d.cij);
        if cij == 0 {
            return Err(Error::assumption(
                Assumption::StepSizeRule,
                "initial weight multiple cij must be a positive integer",
            ));
        }
        let alpha = match raw.alpha {
            Some(a) => a.parse()?,
            None => d.alpha,
        };
        let bits = match raw.bits {
            Some(b) => b.parse()?,
            None => d.bits,
        };
        let range = QuantRange::new(raw.qmin.unwrap_or(0.0), raw.qmax.unwrap_or(1.0))?;
        let y0 = match raw.y0 {
            None => InitialValues::Uniform,
            Some(RawInitial::Name(n)) if n == "uniform" => InitialValues::Uniform,
            Some(RawInitial::Name(n)) => {
                return Err(Error::invalid(format!("y0 must be \"uniform\" or a list of numbers, got `{n}`")))
            }
            Some(RawInitial::Values(v)) => InitialValues::Explicit(v),
        };
        let cfg = Self {
            nodes,
            edge_prob,
            graphs,
            inits,
            max_rounds,
            target_mse: raw.target_mse,
            step,
            cij,
            alpha,
            bits,
            range,
            y0,
            seed: raw.seed.unwrap_or(d.seed),
            diag_u: raw.diag_u.unwrap_or(d.diag_u),
            trace: raw.trace.unwrap_or(d.trace),
            graph: None,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Checks the cross-field constraints. Called on every load.
    pub fn validate(&self) -> Result<()> {
        let (wb, cons) = self.bits.schedules()?;
        wb.pattern().validate_nodes(self.nodes)?;
        cons.pattern().validate_nodes(self.nodes)?;
        if let InitialValues::Explicit(v) = &self.y0 {
            if v.len() != self.nodes {
                return Err(Error::invalid(format!(
                    "y0 lists {} values for {} nodes",
                    v.len(),
                    self.nodes
                )));
            }
            if v.iter().any(|x| !x.is_finite()) {
                return Err(Error::invalid("y0 values must be finite"));
            }
        }
        if let Some(g) = &self.graph {
            if g.n_nodes() != self.nodes {
                return Err(Error::invalid(format!(
                    "graph has {} nodes but the configuration asks for {}",
                    g.n_nodes(),
                    self.nodes
                )));
            }
            if !g.is_strongly_connected() {
                return Err(Error::invalid("graph is not strongly connected"));
            }
        }
        Ok(())
    }

    /// Fixes the graph used by every trial; `nodes` follows the graph.
    pub fn with_graph(mut self, graph: Digraph) -> Result<Self> {
        self.nodes = graph.n_nodes();
        self.graph = Some(graph);
        self.validate()?;
        Ok(self)
    }

    pub fn trials(&self) -> usize {
        self.graphs * self.inits
    }

    pub fn schedules(&self) -> Result<ConsensusSchedules> {
        let (bits_wb, bits_cons) = self.bits.schedules()?;
        Ok(ConsensusSchedules {
            step: self.step,
            alpha: self.alpha,
            bits_wb,
            bits_cons,
        })
    }

    /// Initial weight multiples for every edge of `g`.
    pub fn initial_multiples(&self, g: &Digraph) -> Vec<u64> {
        vec![self.cij; g.edge_count()]
    }
}

fn parse_value(text: &str) -> toml::Value {
    let doc = format!("v = {text}");
    match doc.parse::<toml::Table>() {
        Ok(mut t) => t.remove("v").unwrap_or_else(|| toml::Value::String(text.to_string())),
        Err(_) => toml::Value::String(text.to_string()),
    }
}

/// Reads and validates a configuration file.
pub fn load_config(path: &Path) -> Result<ExperimentConfig> {
    load_config_with(Some(path), &[])
}

/// Reads an optional configuration file and applies `key=value` overrides.
pub fn load_config_with(path: Option<&Path>, overrides: &[String]) -> Result<ExperimentConfig> {
    match path {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| Error::Parse {
                path: p.to_path_buf(),
                msg: e.to_string(),
            })?;
            ExperimentConfig::parse(&text, overrides, p)
        }
        None => ExperimentConfig::parse("", overrides, Path::new("<defaults>")),
    }
}
