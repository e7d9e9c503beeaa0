//! Value parsers for grids, lists and files.

use std::f64::consts::PI;
use std::fs;
use std::path::Path;

use phononet::network::{ConfigFile, InterferometerConfig};
use serde::Serialize;

use crate::error::{CliError, CliResult};

/// A number with an optional `pi` factor: `0.25`, `0.5pi`, `pi`, `-pi/4`, `3pi/2`.
pub fn parse_scalar(s: &str) -> Result<f64, String> {
    let t = s.trim();
    let bad = || format!("`{s}` is not a number (forms: 0.3, 0.5pi, pi/4)");
    let Some(at) = t.find("pi") else {
        return t.parse().map_err(|_| bad());
    };
    let (head, tail) = (t[..at].trim(), t[at + 2..].trim());
    let factor = match head {
        "" | "+" => 1.0,
        "-" => -1.0,
        h => h.trim_end_matches('*').parse::<f64>().map_err(|_| bad())?,
    };
    let divisor = match tail {
        "" => 1.0,
        d => d.strip_prefix('/').ok_or_else(bad)?.trim().parse::<f64>().map_err(|_| bad())?,
    };
    Ok(factor * PI / divisor)
}

/// Evenly spaced points `start:stop:count`, endpoints included.
#[derive(Clone, Debug, Serialize)]
#[serde(transparent)]
pub struct Grid(pub Vec<f64>);

pub fn parse_grid(s: &str) -> Result<Grid, String> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 3 {
        return Err(format!("`{s}` is not start:stop:count"));
    }
    let (a, b) = (parse_scalar(parts[0])?, parse_scalar(parts[1])?);
    let n: usize = parts[2]
        .trim()
        .parse()
        .map_err(|_| format!("point count `{}` is not a positive integer", parts[2]))?;
    if n == 0 {
        return Err("a grid needs at least one point".into());
    }
    if n == 1 {
        return Ok(Grid(vec![a]));
    }
    Ok(Grid((0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()))
}

/// Comma-separated numbers.
#[derive(Clone, Debug, Serialize)]
#[serde(transparent)]
pub struct List(pub Vec<f64>);

pub fn parse_list(s: &str) -> Result<List, String> {
    s.split(',').map(parse_scalar).collect::<Result<_, _>>().map(List)
}

/// Integers as `first:last:step` or a comma-separated list.
#[derive(Clone, Debug, Serialize)]
#[serde(transparent)]
pub struct Counts(pub Vec<usize>);

pub fn parse_counts(s: &str) -> Result<Counts, String> {
    let int = |t: &str| t.trim().parse::<usize>().map_err(|_| format!("`{t}` is not a non-negative integer"));
    if s.contains(':') {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return Err(format!("`{s}` is not first:last:step"));
        }
        let (a, b, step) = (int(parts[0])?, int(parts[1])?, int(parts[2])?);
        if step == 0 || b < a {
            return Err(format!("`{s}` is an empty range"));
        }
        return Ok(Counts((a..=b).step_by(step).collect()));
    }
    s.split(',').map(int).collect::<Result<_, _>>().map(Counts)
}

/// A 1-based mode pair `m,n`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct ModePair(pub usize, pub usize);

pub fn parse_pair(s: &str) -> Result<ModePair, String> {
    let c = parse_counts(s)?;
    match c.0.as_slice() {
        &[m, n] if m >= 1 && n >= 1 && m != n => Ok(ModePair(m, n)),
        _ => Err(format!("`{s}` is not a pair of distinct 1-based modes such as 1,2")),
    }
}

pub fn read_text(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

pub fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> CliResult<T> {
    serde_json::from_str(&read_text(path)?).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))
}

/// Interferometer settings from a configuration file holding one configuration
/// object or an array of them.
pub fn load_configs(path: &Path) -> CliResult<Vec<InterferometerConfig>> {
    #[derive(serde::Deserialize)]
    #[serde(untagged)]
    enum OneOrMany {
        One(ConfigFile),
        Many(Vec<ConfigFile>),
    }
    let files = match read_json::<OneOrMany>(path)? {
        OneOrMany::One(f) => vec![f],
        OneOrMany::Many(v) => v,
    };
    if files.is_empty() {
        return Err(CliError::Parse(format!("{}: no configurations", path.display())));
    }
    files.iter().map(|f| f.to_config().map_err(CliError::from)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scalars() {
        assert_eq!(parse_scalar("0.25").unwrap(), 0.25);
        assert_eq!(parse_scalar("0.5pi").unwrap(), 0.5 * PI);
        assert_eq!(parse_scalar("-pi/4").unwrap(), -PI / 4.0);
        assert_eq!(parse_scalar("2*pi").unwrap(), 2.0 * PI);
        assert!(parse_scalar("pie").is_err());
    }

    #[test]
    fn grids() {
        let g = parse_grid("0:0.5pi:3").unwrap().0;
        assert_eq!(g, vec![0.0, PI / 4.0, PI / 2.0]);
        assert!(parse_grid("0:1").is_err());
        assert!(parse_grid("0:1:0").is_err());
    }

    #[test]
    fn counts() {
        assert_eq!(parse_counts("10:30:10").unwrap().0, vec![10, 20, 30]);
        assert_eq!(parse_counts("2,5").unwrap().0, vec![2, 5]);
        assert!(parse_pair("1,1").is_err());
        assert!(parse_pair("0,2").is_err());
    }
}
