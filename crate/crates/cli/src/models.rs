//! Command-line descriptors for kernels and signals.
//!
//! A kernel is `constant:P`, `product`, `soft-geometric:BETA` or a path to a step
//! graphon JSON file. A signal is `constant:C`, `identity`, `gaussian:SIGMA` or a
//! path to a JSON array of block values.

use std::fmt;
use std::path::Path;

use anyhow::{Context, Result};
use gspx_core::io::{signal_from_json, step_graphon_from_json};
use gspx_core::{AnalyticKernel, AnalyticSignal, Graphon, GraphonSignal, StepSignal};

/// Bad command-line input that clap could not catch; maps to exit code 1.
#[derive(Debug)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

pub fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

fn parameter(name: &str, arg: Option<&str>) -> Result<f64> {
    let raw = arg.ok_or_else(|| usage(format!("{name} needs a parameter, as in {name}:0.5")))?;
    raw.parse()
        .map_err(|_| usage(format!("{name} parameter {raw:?} is not a number")))
}

fn looks_like_file(desc: &str) -> bool {
    desc.ends_with(".json") || Path::new(desc).is_file()
}

pub fn parse_graphon(desc: &str) -> Result<Graphon> {
    if looks_like_file(desc) {
        let text = std::fs::read_to_string(desc).with_context(|| format!("reading {desc}"))?;
        return Ok(step_graphon_from_json(&text)
            .with_context(|| format!("parsing step graphon {desc}"))?
            .into());
    }
    let (name, arg) = match desc.split_once(':') {
        Some((n, a)) => (n, Some(a)),
        None => (desc, None),
    };
    let kernel = match name {
        "constant" => AnalyticKernel::constant(parameter(name, arg)?),
        "product" => Ok(AnalyticKernel::Product),
        "soft-geometric" | "pollution" => AnalyticKernel::soft_geometric(parameter(name, arg)?),
        _ => {
            return Err(usage(format!(
                "unknown graphon {desc:?}; expected constant:P, product, soft-geometric:BETA or a .json file"
            )))
        }
    };
    kernel.map(Graphon::from).map_err(|e| usage(e.to_string()))
}

pub fn parse_signal(desc: &str) -> Result<GraphonSignal> {
    if looks_like_file(desc) {
        let text = std::fs::read_to_string(desc).with_context(|| format!("reading {desc}"))?;
        let x = signal_from_json(&text).with_context(|| format!("parsing signal {desc}"))?;
        return Ok(StepSignal::new(x.into_values())?.into());
    }
    let (name, arg) = match desc.split_once(':') {
        Some((n, a)) => (n, Some(a)),
        None => (desc, None),
    };
    let signal = match name {
        "constant" => Ok(AnalyticSignal::Constant(parameter(name, arg)?)),
        "identity" => Ok(AnalyticSignal::Identity),
        "gaussian" | "pollution" => AnalyticSignal::gaussian(parameter(name, arg)?),
        _ => {
            return Err(usage(format!(
                "unknown signal {desc:?}; expected constant:C, identity, gaussian:SIGMA or a .json file"
            )))
        }
    };
    signal
        .map(GraphonSignal::from)
        .map_err(|e| usage(e.to_string()))
}

/// Resolution to discretize at: the explicit value, else the block count of a step graphon.
pub fn resolution(w: &Graphon, requested: Option<usize>) -> Result<usize> {
    match (requested, w) {
        (Some(0), _) => Err(usage("--resolution must be at least 1")),
        (Some(n), _) => Ok(n),
        (None, Graphon::Step(s)) => Ok(s.blocks()),
        (None, Graphon::Analytic(_)) => Err(usage("analytic graphons need --resolution")),
    }
}
