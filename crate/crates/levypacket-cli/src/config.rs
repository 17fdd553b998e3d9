//! Scenario configs: a flat `[section]` / `key = value` text format whose
//! law values reuse the textual law grammar of the library
//! (`cauchy`, `stable(alpha=1.5,a=0.5)`, `vg(nu=2)`, ...).
//!
//! Sections and keys:
//!
//! ```text
//! [scenario]
//! noise     = <law>  |  wiener_poisson(gamma=G,rate=R,jump=<law>)
//! tau       = 1            # catalog time scale (default 1)
//! initial   = normal | cauchy | student3 | laplace | vg(nu=N) | relativistic(nu=N)
//! scale     = 1            # initial length scale b (default 1)
//! phase     = 0            # plane-wave momentum k0 (default 0)
//! mode      = process | schrodinger | both   (default both)
//!
//! [grid]
//! n          = 4096        # points, power of two
//! half_width = 40          # window is [-L, L]
//!
//! [times]
//! list = 0, 0.5, 1, 2, 4   # starts at 0, strictly increasing
//!
//! [tolerances]             # optional
//! aliasing   = 1e-8
//! truncation = 1e-6
//! series     = 1e-12
//!
//! [output]                 # optional
//! frames  = frames         # frame directory, relative to the output root
//! summary = summary.json   # summary file, relative to the output root
//! ```

use std::collections::BTreeMap;

use levypacket::evolution::{
    EvolutionMode, InitialState, NoiseModel, Scenario, StateKind, Tolerances,
};
use levypacket::laws::parse_law;
use levypacket::solutions::RateParams;
use levypacket::spectral::GridPair;
use levypacket::{Error, Result};

/// A fully parsed run: the scenario plus output layout.
#[derive(Clone, Debug)]
pub struct RunConfig {
    /// Human-readable origin (preset name or config path).
    pub label: String,
    pub scenario: Scenario,
    /// Frame directory, relative to the output root.
    pub frames_path: String,
    /// Summary file, relative to the output root.
    pub summary_path: String,
}

fn bad(msg: String) -> Error {
    Error::Config(msg)
}

/// Split `text` on top-level commas, respecting parentheses, so nested law
/// expressions survive (`gamma=1,jump=cpoisson(lambda=1,component=normal)`).
fn split_top_level(text: &str) -> Vec<&str> {
    let mut parts = Vec::new();
    let mut depth = 0usize;
    let mut start = 0usize;
    for (i, ch) in text.char_indices() {
        match ch {
            '(' => depth += 1,
            ')' => depth = depth.saturating_sub(1),
            ',' if depth == 0 => {
                parts.push(text[start..i].trim());
                start = i + 1;
            }
            _ => {}
        }
    }
    parts.push(text[start..].trim());
    parts
}

fn parse_number(key: &str, value: &str) -> Result<f64> {
    value
        .trim()
        .parse::<f64>()
        .map_err(|_| bad(format!("key `{key}` expects a number, got `{value}`")))
}

fn parse_noise(value: &str, series_tol: f64) -> Result<NoiseModel> {
    let value = value.trim();
    if let Some(body) = value
        .strip_prefix("wiener_poisson(")
        .and_then(|rest| rest.strip_suffix(')'))
    {
        let mut gamma = None;
        let mut rate = None;
        let mut jump = None;
        for part in split_top_level(body) {
            let (key, val) = part
                .split_once('=')
                .ok_or_else(|| bad(format!("wiener_poisson argument `{part}` is not key=value")))?;
            match key.trim() {
                "gamma" => gamma = Some(parse_number("gamma", val)?),
                "rate" => rate = Some(parse_number("rate", val)?),
                "jump" => jump = Some(parse_law(val.trim())?),
                other => {
                    return Err(bad(format!("unknown wiener_poisson argument `{other}`")));
                }
            }
        }
        let gamma = gamma.ok_or_else(|| bad("wiener_poisson needs gamma=".into()))?;
        let rate = rate.ok_or_else(|| bad("wiener_poisson needs rate=".into()))?;
        let jump = jump.ok_or_else(|| bad("wiener_poisson needs jump=".into()))?;
        return NoiseModel::wiener_poisson(gamma, rate, jump, series_tol);
    }
    Ok(NoiseModel::Law(parse_law(value)?))
}

fn parse_initial(kind: &str, scale: f64, phase: f64) -> Result<InitialState> {
    let kind = kind.trim();
    let (name, nu) = match kind.split_once('(') {
        None => (kind, None),
        Some((name, rest)) => {
            let body = rest
                .strip_suffix(')')
                .ok_or_else(|| bad(format!("unbalanced parentheses in initial `{kind}`")))?;
            let val = body
                .trim()
                .strip_prefix("nu=")
                .ok_or_else(|| bad(format!("initial `{name}` takes a single nu= argument")))?;
            (name.trim(), Some(parse_number("nu", val)?))
        }
    };
    let state = match (name, nu) {
        ("normal", None) => StateKind::Normal,
        ("cauchy", None) => StateKind::Cauchy,
        ("student3", None) => StateKind::Student3,
        ("laplace", None) => StateKind::Laplace,
        ("vg", Some(nu)) => StateKind::VarianceGamma { nu },
        ("relativistic", Some(nu)) => StateKind::Relativistic { nu },
        ("vg" | "relativistic", None) => {
            return Err(bad(format!("initial `{name}` needs a nu= argument")))
        }
        _ => {
            return Err(bad(format!(
                "unknown initial state `{kind}` (expected normal, cauchy, student3, laplace, \
                 vg(nu=..) or relativistic(nu=..))"
            )))
        }
    };
    InitialState::new(state, scale, phase)
}

fn parse_mode(value: &str) -> Result<EvolutionMode> {
    match value.trim() {
        "process" => Ok(EvolutionMode::Process),
        "schrodinger" | "wave" => Ok(EvolutionMode::Schrodinger),
        "both" => Ok(EvolutionMode::Both),
        other => Err(bad(format!(
            "unknown mode `{other}` (expected process, schrodinger or both)"
        ))),
    }
}

fn parse_times(value: &str) -> Result<Vec<f64>> {
    let trimmed = value.trim();
    if trimmed.is_empty() {
        return Err(bad("the time list is empty".into()));
    }
    trimmed
        .split(',')
        .map(|piece| parse_number("times.list", piece))
        .collect()
}

/// Parse a config document into a [`RunConfig`].  Unknown sections or keys
/// are rejected so typos fail loudly.
pub fn parse_config(text: &str, label: &str) -> Result<RunConfig> {
    let mut entries: BTreeMap<(String, String), String> = BTreeMap::new();
    let mut section = String::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = match raw.split_once('#') {
            Some((before, _)) => before.trim(),
            None => raw.trim(),
        };
        if line.is_empty() {
            continue;
        }
        if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
            section = name.trim().to_string();
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            bad(format!("line {}: expected `key = value`, got `{line}`", lineno + 1))
        })?;
        if section.is_empty() {
            return Err(bad(format!(
                "line {}: key `{}` appears before any [section]",
                lineno + 1,
                key.trim()
            )));
        }
        let slot = (section.clone(), key.trim().to_string());
        if entries.insert(slot, value.trim().to_string()).is_some() {
            return Err(bad(format!(
                "duplicate key `{}` in section [{}]",
                key.trim(),
                section
            )));
        }
    }

    let known: &[(&str, &[&str])] = &[
        ("scenario", &["noise", "tau", "initial", "scale", "phase", "mode"]),
        ("grid", &["n", "half_width"]),
        ("times", &["list"]),
        ("tolerances", &["aliasing", "truncation", "series"]),
        ("output", &["frames", "summary"]),
    ];
    for (section, key) in entries.keys() {
        let ok = known
            .iter()
            .any(|(s, keys)| s == section && keys.contains(&key.as_str()));
        if !ok {
            return Err(bad(format!("unknown key `{key}` in section [{section}]")));
        }
    }

    let get = |section: &str, key: &str| -> Option<&String> {
        entries.get(&(section.to_string(), key.to_string()))
    };
    let require = |section: &str, key: &str| -> Result<&String> {
        get(section, key)
            .ok_or_else(|| bad(format!("missing required key `{key}` in section [{section}]")))
    };

    let defaults = Tolerances::default();
    let tolerances = Tolerances {
        aliasing: match get("tolerances", "aliasing") {
            Some(v) => parse_number("tolerances.aliasing", v)?,
            None => defaults.aliasing,
        },
        truncation: match get("tolerances", "truncation") {
            Some(v) => parse_number("tolerances.truncation", v)?,
            None => defaults.truncation,
        },
        series: match get("tolerances", "series") {
            Some(v) => parse_number("tolerances.series", v)?,
            None => defaults.series,
        },
    };

    let noise = parse_noise(require("scenario", "noise")?, tolerances.series)?;
    let tau = match get("scenario", "tau") {
        Some(v) => parse_number("scenario.tau", v)?,
        None => 1.0,
    };
    let scale = match get("scenario", "scale") {
        Some(v) => parse_number("scenario.scale", v)?,
        None => 1.0,
    };
    let phase = match get("scenario", "phase") {
        Some(v) => parse_number("scenario.phase", v)?,
        None => 0.0,
    };
    let initial = parse_initial(require("scenario", "initial")?, scale, phase)?;
    let mode = match get("scenario", "mode") {
        Some(v) => parse_mode(v)?,
        None => EvolutionMode::Both,
    };

    let n = parse_number("grid.n", require("grid", "n")?)?;
    if n <= 0.0 || n.fract() != 0.0 || n > (1u64 << 26) as f64 {
        return Err(bad(format!("grid.n must be a positive integer, got {n}")));
    }
    let half_width = parse_number("grid.half_width", require("grid", "half_width")?)?;
    let grid = GridPair::new(n as usize, half_width)?;

    let times = parse_times(require("times", "list")?)?;
    let rates = RateParams::new(tau)?;
    let scenario = Scenario::new(noise, rates, initial, grid, times, tolerances, mode)?;

    let frames_path = get("output", "frames").cloned().unwrap_or_else(|| "frames".into());
    let summary_path = get("output", "summary")
        .cloned()
        .unwrap_or_else(|| "summary.json".into());

    Ok(RunConfig {
        label: label.to_string(),
        scenario,
        frames_path,
        summary_path,
    })
}
