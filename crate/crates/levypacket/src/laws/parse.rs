//! Textual law grammar used by scenario configs:
//!
//! ```text
//! law   := name [ '(' arg (',' arg)* ')' ]
//! arg   := key '=' (number | law)
//! ```
//!
//! e.g. `normal(a=1)`, `stable(alpha=1.5,a=0.5)`, `vg(nu=2)`,
//! `cpoisson(lambda=1,component=normal(a=1))`.  The scale key `a` defaults
//! to 1; shape keys (`alpha`, `nu`, `lambda`) are mandatory where the family
//! has one.  [`std::fmt::Display`] for [`LawSpec`] emits the same grammar, so
//! laws round-trip through their textual form.

use std::fmt;

use super::{Family, LawSpec};
use crate::error::{Error, Result};

pub(crate) fn family_name(family: &Family) -> &'static str {
    match family {
        Family::Degenerate => "degenerate",
        Family::Normal => "normal",
        Family::Uniform => "uniform",
        Family::BernoulliPm => "bernoulli",
        Family::Laplace => "laplace",
        Family::Cauchy => "cauchy",
        Family::Stable { .. } => "stable",
        Family::VarianceGamma { .. } => "vg",
        Family::Student { .. } => "student",
        Family::Relativistic { .. } => "relativistic",
        Family::CompoundPoisson { .. } => "cpoisson",
    }
}

impl fmt::Display for LawSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = family_name(&self.family);
        let mut args: Vec<String> = vec![];
        match &self.family {
            Family::Stable { alpha } | Family::Student { alpha } => {
                args.push(format!("alpha={alpha}"));
            }
            Family::VarianceGamma { nu } | Family::Relativistic { nu } => {
                args.push(format!("nu={nu}"));
            }
            Family::CompoundPoisson { lambda, component } => {
                args.push(format!("lambda={lambda}"));
                args.push(format!("component={component}"));
            }
            _ => {}
        }
        if self.scale != 1.0 {
            args.push(format!("a={}", self.scale));
        }
        if args.is_empty() {
            write!(f, "{name}")
        } else {
            write!(f, "{}({})", name, args.join(","))
        }
    }
}

/// One `key = value` argument; the value is kept raw so nested laws can be
/// parsed recursively.
struct RawArg<'a> {
    key: &'a str,
    value: &'a str,
}

/// Split `s` at top-level commas (commas inside nested parentheses belong to
/// component laws).
fn split_args(s: &str) -> Result<Vec<&str>> {
    let mut parts = vec![];
    let mut depth = 0usize;
    let mut start = 0usize;
    for (i, c) in s.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => {
                depth = depth.checked_sub(1).ok_or_else(|| {
                    Error::Config(format!("unbalanced parentheses in law arguments '{s}'"))
                })?;
            }
            ',' if depth == 0 => {
                parts.push(&s[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    if depth != 0 {
        return Err(Error::Config(format!(
            "unbalanced parentheses in law arguments '{s}'"
        )));
    }
    parts.push(&s[start..]);
    Ok(parts)
}

fn parse_args(body: &str) -> Result<Vec<RawArg<'_>>> {
    let mut args = vec![];
    for part in split_args(body)? {
        let part = part.trim();
        if part.is_empty() {
            return Err(Error::Config(format!("empty argument in '{body}'")));
        }
        // split at the first top-level '='; later '=' belong to nested laws
        let eq = part
            .char_indices()
            .take_while(|&(_, c)| c != '(')
            .find(|&(_, c)| c == '=')
            .map(|(i, _)| i)
            .ok_or_else(|| Error::Config(format!("expected key=value, got '{part}'")))?;
        let key = part[..eq].trim();
        let value = part[eq + 1..].trim();
        if key.is_empty() || value.is_empty() {
            return Err(Error::Config(format!("expected key=value, got '{part}'")));
        }
        if args.iter().any(|a: &RawArg<'_>| a.key == key) {
            return Err(Error::Config(format!("duplicate key '{key}' in '{body}'")));
        }
        args.push(RawArg { key, value });
    }
    Ok(args)
}

fn number(arg: &RawArg<'_>) -> Result<f64> {
    arg.value
        .parse::<f64>()
        .map_err(|_| Error::Config(format!("'{}' is not a number for key '{}'", arg.value, arg.key)))
}

/// Look up one key; `None` when absent.
fn take<'a, 'b>(args: &'a [RawArg<'b>], key: &str) -> Option<&'a RawArg<'b>> {
    args.iter().find(|a| a.key == key)
}

fn require<'a, 'b>(args: &'a [RawArg<'b>], key: &str, name: &str) -> Result<&'a RawArg<'b>> {
    take(args, key).ok_or_else(|| Error::Config(format!("{name} needs '{key}=...'")))
}

fn reject_unknown(args: &[RawArg<'_>], allowed: &[&str], name: &str) -> Result<()> {
    for arg in args {
        if !allowed.contains(&arg.key) {
            return Err(Error::Config(format!(
                "unknown key '{}' for {name}; allowed: {}",
                arg.key,
                allowed.join(", ")
            )));
        }
    }
    Ok(())
}

/// Parse a law expression such as `vg(nu=2,a=1.0)`.
pub fn parse_law(text: &str) -> Result<LawSpec> {
    let text = text.trim();
    let (name, body) = match text.find('(') {
        None => (text, ""),
        Some(open) => {
            if !text.ends_with(')') {
                return Err(Error::Config(format!(
                    "law expression '{text}' does not end with ')'"
                )));
            }
            (&text[..open], &text[open + 1..text.len() - 1])
        }
    };
    let name = name.trim();
    let args = if body.trim().is_empty() {
        vec![]
    } else {
        parse_args(body)?
    };

    let scale = match take(&args, "a") {
        Some(arg) => number(arg)?,
        None => 1.0,
    };

    let family = match name {
        "degenerate" => {
            reject_unknown(&args, &["a"], name)?;
            Family::Degenerate
        }
        "normal" => {
            reject_unknown(&args, &["a"], name)?;
            Family::Normal
        }
        "uniform" => {
            reject_unknown(&args, &["a"], name)?;
            Family::Uniform
        }
        "bernoulli" => {
            reject_unknown(&args, &["a"], name)?;
            Family::BernoulliPm
        }
        "laplace" => {
            reject_unknown(&args, &["a"], name)?;
            Family::Laplace
        }
        "cauchy" => {
            reject_unknown(&args, &["a"], name)?;
            Family::Cauchy
        }
        "stable" => {
            reject_unknown(&args, &["alpha", "a"], name)?;
            Family::Stable {
                alpha: number(require(&args, "alpha", name)?)?,
            }
        }
        "student" => {
            reject_unknown(&args, &["alpha", "a"], name)?;
            Family::Student {
                alpha: number(require(&args, "alpha", name)?)?,
            }
        }
        "vg" => {
            reject_unknown(&args, &["nu", "a"], name)?;
            Family::VarianceGamma {
                nu: number(require(&args, "nu", name)?)?,
            }
        }
        "relativistic" => {
            reject_unknown(&args, &["nu", "a"], name)?;
            Family::Relativistic {
                nu: number(require(&args, "nu", name)?)?,
            }
        }
        "cpoisson" => {
            reject_unknown(&args, &["lambda", "component", "a"], name)?;
            let lambda = number(require(&args, "lambda", name)?)?;
            let component = parse_law(require(&args, "component", name)?.value)?;
            Family::CompoundPoisson {
                lambda,
                component: Box::new(component),
            }
        }
        other => {
            return Err(Error::Config(format!(
                "unknown law family '{other}' in '{text}'"
            )));
        }
    };
    LawSpec::new(family, scale)
}
