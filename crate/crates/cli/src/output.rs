//! Provenance-carrying output envelopes.
//!
//! Every experiment output embeds the resolved config, its hash, the seed,
//! the RNG algorithm id and the code version. The timestamp is confined to
//! a single line so reruns are byte-identical after stripping it.

use serde::Serialize;
use sha2::{Digest, Sha256};
use std::fs;
use std::path::Path;

use sbm_ising::rng::RNG_ALGORITHM;
use sbm_ising::Result;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Serialize)]
pub struct Meta {
    pub timestamp: String,
    pub version: &'static str,
    pub rng: &'static str,
    pub seed: u64,
    pub config_hash: String,
}

#[derive(Debug, Serialize)]
pub struct Envelope<C: Serialize, R: Serialize> {
    pub meta: Meta,
    pub config: C,
    pub result: R,
}

pub fn config_hash<C: Serialize>(config: &C) -> String {
    let json = serde_json::to_string(config).expect("config serializes");
    let digest = Sha256::digest(json.as_bytes());
    let mut hex = String::with_capacity(16);
    for byte in digest.iter().take(8) {
        hex.push_str(&format!("{byte:02x}"));
    }
    hex
}

fn timestamp() -> String {
    chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true)
}

pub fn meta<C: Serialize>(seed: u64, config: &C) -> Meta {
    Meta {
        timestamp: timestamp(),
        version: VERSION,
        rng: RNG_ALGORITHM,
        seed,
        config_hash: config_hash(config),
    }
}

/// Renders the envelope, writes it to `out` when given, and prints either
/// the JSON or the human-readable summary to stdout.
pub fn emit<C: Serialize, R: Serialize>(
    out: Option<&Path>,
    json_stdout: bool,
    human: &str,
    seed: u64,
    config: &C,
    result: &R,
) -> Result<()> {
    let envelope = Envelope { meta: meta(seed, config), config, result };
    let json = serde_json::to_string_pretty(&envelope).expect("envelope serializes");
    if let Some(path) = out {
        fs::write(path, format!("{json}\n"))?;
    }
    if json_stdout {
        println!("{json}");
    } else if !human.is_empty() {
        println!("{human}");
    }
    Ok(())
}

/// Provenance comment lines for CSV outputs.
pub fn csv_header<C: Serialize>(seed: u64, config: &C) -> String {
    let compact = serde_json::to_string(config).expect("config serializes");
    format!(
        "# timestamp: {}\n# version: {}\n# rng: {}\n# seed: {}\n# config_hash: {}\n# config: {}\n",
        timestamp(),
        VERSION,
        RNG_ALGORITHM,
        seed,
        config_hash(config),
        compact
    )
}

/// Drops the (single) timestamp line of a payload, JSON or CSV.
pub fn strip_timestamp(payload: &str) -> String {
    payload
        .lines()
        .filter(|line| {
            let t = line.trim_start();
            !t.starts_with("# timestamp:") && !t.starts_with("\"timestamp\":")
        })
        .collect::<Vec<_>>()
        .join("\n")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[derive(Serialize)]
    struct Cfg {
        x: u32,
    }

    #[test]
    fn hash_is_stable_and_short() {
        let a = config_hash(&Cfg { x: 1 });
        let b = config_hash(&Cfg { x: 1 });
        let c = config_hash(&Cfg { x: 2 });
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert_eq!(a.len(), 16);
    }

    #[test]
    fn timestamp_occupies_one_strippable_line() {
        let envelope = Envelope {
            meta: meta(7, &Cfg { x: 1 }),
            config: Cfg { x: 1 },
            result: 42u32,
        };
        let json = serde_json::to_string_pretty(&envelope).unwrap();
        let stripped = strip_timestamp(&json);
        assert_eq!(json.lines().count(), stripped.lines().count() + 1);
        assert!(!stripped.contains("timestamp"));

        let csv = csv_header(7, &Cfg { x: 1 });
        let stripped = strip_timestamp(&csv);
        assert!(!stripped.contains("timestamp"));
        assert!(stripped.contains("# config_hash:"));
    }
}
