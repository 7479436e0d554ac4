//! Line-oriented text formats for datasets, slates and voter samples.
//!
//! Each line is a whitespace-separated list of `key=value` fields; lines
//! starting with `#` are comments. Vectors are comma-separated and every
//! float is written in scientific notation with 17 significant digits so it
//! reads back bit-for-bit. A comparison record looks like
//!
//! ```text
//! voter_id=3 a0=1.0000000000000000e0,2.5000000000000000e-1 a1=... label=1 scheme=true-reward
//! ```
//!
//! and proxy-labelled records carry their weights: `scheme=proxy:<w1>,<w2>`.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::model::{ComparisonRecord, FeatureVector, FeatureWeights, Label, LabelScheme, VoterParams};

/// 17 significant digits.
pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn format_coords(v: &FeatureVector) -> String {
    v.coords().iter().map(|&x| format_float(x)).collect::<Vec<_>>().join(",")
}

fn parse_coords(what: &'static str, line: usize, s: &str) -> Result<FeatureVector> {
    let coords = s
        .split(',')
        .map(|t| {
            t.parse::<f64>().map_err(|e| Error::Parse {
                what,
                line,
                message: format!("bad number `{t}`: {e}"),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    FeatureVector::new(coords).map_err(|e| Error::Parse {
        what,
        line,
        message: e.to_string(),
    })
}

fn format_scheme(s: &LabelScheme) -> String {
    match s {
        LabelScheme::TrueReward => "true-reward".to_string(),
        LabelScheme::Proxy { w } => format!("proxy:{}", format_coords(&w.w)),
    }
}

fn parse_scheme(line: usize, s: &str) -> Result<LabelScheme> {
    if s == "true-reward" {
        return Ok(LabelScheme::TrueReward);
    }
    match s.strip_prefix("proxy:") {
        Some(w) => Ok(LabelScheme::Proxy {
            w: FeatureWeights::new(parse_coords("dataset", line, w)?),
        }),
        None => Err(Error::Parse {
            what: "dataset",
            line,
            message: format!("unknown scheme `{s}`"),
        }),
    }
}

/// Splits a line into its `key=value` fields, requiring exactly `keys` in order.
fn fields<'a>(what: &'static str, line: usize, text: &'a str, keys: &[&str]) -> Result<Vec<&'a str>> {
    let parts: Vec<&str> = text.split_whitespace().collect();
    if parts.len() != keys.len() {
        return Err(Error::Parse {
            what,
            line,
            message: format!("expected {} fields, found {}", keys.len(), parts.len()),
        });
    }
    parts
        .iter()
        .zip(keys)
        .map(|(part, key)| match part.split_once('=') {
            Some((k, v)) if k == *key => Ok(v),
            _ => Err(Error::Parse {
                what,
                line,
                message: format!("expected `{key}=...`, found `{part}`"),
            }),
        })
        .collect()
}

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn parse_usize(what: &'static str, line: usize, s: &str) -> Result<usize> {
    s.parse().map_err(|e| Error::Parse {
        what,
        line,
        message: format!("bad integer `{s}`: {e}"),
    })
}

pub fn format_dataset(records: &[ComparisonRecord]) -> String {
    let mut out = String::from("# voter_id a0 a1 label scheme\n");
    for r in records {
        out.push_str(&format!(
            "voter_id={} a0={} a1={} label={} scheme={}\n",
            r.voter_id,
            format_coords(&r.a0),
            format_coords(&r.a1),
            r.label.as_u8(),
            format_scheme(&r.scheme)
        ));
    }
    out
}

pub fn parse_dataset(text: &str) -> Result<Vec<ComparisonRecord>> {
    content_lines(text)
        .map(|(n, line)| {
            let f = fields("dataset", n, line, &["voter_id", "a0", "a1", "label", "scheme"])?;
            let label = match f[3] {
                "0" => Label::First,
                "1" => Label::Second,
                other => {
                    return Err(Error::Parse {
                        what: "dataset",
                        line: n,
                        message: format!("label must be 0 or 1, got `{other}`"),
                    })
                }
            };
            ComparisonRecord::new(
                parse_usize("dataset", n, f[0])?,
                parse_coords("dataset", n, f[1])?,
                parse_coords("dataset", n, f[2])?,
                label,
                parse_scheme(n, f[4])?,
            )
            .map_err(|e| Error::Parse {
                what: "dataset",
                line: n,
                message: e.to_string(),
            })
        })
        .collect()
}

pub fn format_slate(slate: &[FeatureVector]) -> String {
    let mut out = String::from("# index coords\n");
    for (i, a) in slate.iter().enumerate() {
        out.push_str(&format!("index={i} coords={}\n", format_coords(a)));
    }
    out
}

pub fn parse_slate(text: &str) -> Result<Vec<FeatureVector>> {
    content_lines(text)
        .enumerate()
        .map(|(expected, (n, line))| {
            let f = fields("slate", n, line, &["index", "coords"])?;
            if parse_usize("slate", n, f[0])? != expected {
                return Err(Error::Parse {
                    what: "slate",
                    line: n,
                    message: format!("expected index {expected}"),
                });
            }
            parse_coords("slate", n, f[1])
        })
        .collect()
}

pub fn format_voters(voters: &[VoterParams]) -> String {
    let mut out = String::from("# voter_id theta\n");
    for v in voters {
        out.push_str(&format!("voter_id={} theta={}\n", v.voter_id, format_coords(&v.theta)));
    }
    out
}

pub fn parse_voters(text: &str) -> Result<Vec<VoterParams>> {
    content_lines(text)
        .map(|(n, line)| {
            let f = fields("voters", n, line, &["voter_id", "theta"])?;
            Ok(VoterParams::new(parse_usize("voters", n, f[0])?, parse_coords("voters", n, f[1])?))
        })
        .collect()
}

pub fn write_dataset(path: &Path, records: &[ComparisonRecord]) -> Result<()> {
    Ok(fs::write(path, format_dataset(records))?)
}

pub fn read_dataset(path: &Path) -> Result<Vec<ComparisonRecord>> {
    parse_dataset(&read_artifact(path)?)
}

/// Reads a file, reporting a missing one as a missing artifact.
pub fn read_artifact(path: &Path) -> Result<String> {
    match fs::read_to_string(path) {
        Ok(s) => Ok(s),
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => Err(Error::MissingArtifact(path.display().to_string())),
        Err(e) => Err(e.into()),
    }
}
