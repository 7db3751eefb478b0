//! `--config` overlay: a TOML file supplies per-subcommand defaults;
//! flags given explicitly on the command line win.

use clap::parser::ValueSource;
use clap::ArgMatches;
use serde::de::DeserializeOwned;
use serde::Serialize;
use std::path::Path;

use sbm_ising::{Error, Result};

/// Applies the `[table]` section of a config file over `args`: every key
/// whose flag was not explicitly passed is replaced by the file value.
pub fn apply<T: Serialize + DeserializeOwned>(
    args: T,
    config_path: Option<&Path>,
    table: &str,
    matches: &ArgMatches,
) -> Result<T> {
    let Some(path) = config_path else {
        return Ok(args);
    };
    let text = std::fs::read_to_string(path)?;
    let doc: toml::Table = toml::from_str(&text)
        .map_err(|e| Error::Parse { line: 0, msg: format!("config file: {e}") })?;
    let Some(section) = doc.get(table) else {
        return Ok(args);
    };
    let section = section.as_table().ok_or_else(|| Error::Parse {
        line: 0,
        msg: format!("config section [{table}] must be a table"),
    })?;

    let mut value = serde_json::to_value(&args).expect("args serialize");
    let map = value.as_object_mut().expect("args are a struct");
    for (key, file_value) in section {
        if matches.try_contains_id(key.as_str()).is_err() || !map.contains_key(key) {
            return Err(Error::InvalidParams(format!(
                "config key '{key}' is not a parameter of subcommand '{table}'"
            )));
        }
        if matches.value_source(key.as_str()) == Some(ValueSource::CommandLine) {
            continue;
        }
        map.insert(key.clone(), toml_to_json(file_value));
    }
    serde_json::from_value(value)
        .map_err(|e| Error::InvalidParams(format!("config section [{table}]: {e}")))
}

fn toml_to_json(v: &toml::Value) -> serde_json::Value {
    match v {
        toml::Value::String(s) => serde_json::Value::String(s.clone()),
        toml::Value::Integer(i) => serde_json::Value::from(*i),
        toml::Value::Float(f) => serde_json::Value::from(*f),
        toml::Value::Boolean(b) => serde_json::Value::from(*b),
        toml::Value::Datetime(d) => serde_json::Value::String(d.to_string()),
        toml::Value::Array(a) => {
            serde_json::Value::Array(a.iter().map(toml_to_json).collect())
        }
        toml::Value::Table(t) => serde_json::Value::Object(
            t.iter().map(|(k, v)| (k.clone(), toml_to_json(v))).collect(),
        ),
    }
}

/// Parses "start:end:step" or a comma-separated list into a sorted grid.
pub fn parse_grid(spec: &str) -> Result<Vec<f64>> {
    let spec = spec.trim();
    let values: Vec<f64> = if spec.contains(':') {
        let parts: Vec<&str> = spec.split(':').collect();
        if parts.len() != 3 {
            return Err(Error::InvalidParams(format!(
                "grid spec must be start:end:step, got {spec:?}"
            )));
        }
        let start: f64 = parse_f64(parts[0])?;
        let end: f64 = parse_f64(parts[1])?;
        let step: f64 = parse_f64(parts[2])?;
        if step <= 0.0 || end < start {
            return Err(Error::InvalidParams(format!(
                "grid spec needs step > 0 and end >= start, got {spec:?}"
            )));
        }
        let count = ((end - start) / step + 0.5).floor() as usize + 1;
        (0..count).map(|i| start + step * i as f64).collect()
    } else {
        spec.split(',')
            .map(|t| parse_f64(t.trim()))
            .collect::<Result<Vec<f64>>>()?
    };
    if values.is_empty() {
        return Err(Error::InvalidParams("empty grid".into()));
    }
    Ok(values)
}

fn parse_f64(token: &str) -> Result<f64> {
    token
        .parse()
        .map_err(|e| Error::InvalidParams(format!("bad number {token:?}: {e}")))
}

/// Resolves a `--beta` argument: "auto" means `1/sqrt(d)`.
pub fn resolve_beta(spec: &str, d: f64) -> Result<f64> {
    if spec.trim() == "auto" {
        if d <= 0.0 {
            return Err(Error::InvalidParams(
                "beta=auto needs a positive degree estimate".into(),
            ));
        }
        Ok(1.0 / d.sqrt())
    } else {
        parse_f64(spec.trim())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grids_parse() {
        assert_eq!(parse_grid("1,2,3.5").unwrap(), vec![1.0, 2.0, 3.5]);
        assert_eq!(
            parse_grid("1.0:2.0:0.5").unwrap(),
            vec![1.0, 1.5, 2.0]
        );
        let g = parse_grid("1.5:4.5:0.5").unwrap();
        assert_eq!(g.len(), 7);
        assert!((g[6] - 4.5).abs() < 1e-12);
        assert!(parse_grid("").is_err());
        assert!(parse_grid("1:2").is_err());
        assert!(parse_grid("2:1:0.5").is_err());
    }

    #[test]
    fn beta_resolution() {
        assert!((resolve_beta("auto", 25.0).unwrap() - 0.2).abs() < 1e-12);
        assert!((resolve_beta("0.3", 25.0).unwrap() - 0.3).abs() < 1e-12);
        assert!(resolve_beta("auto", 0.0).is_err());
        assert!(resolve_beta("xyz", 1.0).is_err());
    }
}
