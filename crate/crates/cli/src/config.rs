//! Layered configuration: built-in defaults, then the `--config` file, then
//! command-line flags.

use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{Map, Value};

use crate::CliError;

pub const SEED_ENV: &str = "PERCOLIMIT_SEED";

/// Reads a JSON object of overrides.
pub fn read_config(path: &Path) -> Result<Map<String, Value>, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    match serde_json::from_str(&text) {
        Ok(Value::Object(map)) => Ok(map),
        Ok(_) => Err(CliError::Usage(format!(
            "{}: config must be a JSON object",
            path.display()
        ))),
        Err(e) => Err(CliError::Usage(format!("{}: {e}", path.display()))),
    }
}

/// Merges `defaults`, the config file and the set flags, fills the seed from
/// the environment if still missing, and deserializes the result.
pub fn resolve<D: Serialize, F: Serialize, T: DeserializeOwned>(
    defaults: &D,
    file: &Map<String, Value>,
    flags: &F,
) -> Result<T, CliError> {
    let mut merged = match serde_json::to_value(defaults).expect("defaults serialize") {
        Value::Object(m) => m,
        _ => unreachable!("defaults are a struct"),
    };
    merged.remove("seed");
    for (k, v) in file {
        merged.insert(k.clone(), v.clone());
    }
    if let Value::Object(f) = serde_json::to_value(flags).expect("flags serialize") {
        for (k, v) in f {
            if !v.is_null() {
                merged.insert(k, v);
            }
        }
    }
    if !merged.contains_key("seed") {
        let raw = std::env::var(SEED_ENV).map_err(|_| {
            CliError::Usage(format!(
                "seed: missing (pass --seed, set `seed` in the config file or {SEED_ENV})"
            ))
        })?;
        let seed: u64 = raw
            .trim()
            .parse()
            .map_err(|_| CliError::Usage(format!("seed: {SEED_ENV} = `{raw}` is not an unsigned integer")))?;
        merged.insert("seed".into(), seed.into());
    }
    serde_json::from_value(Value::Object(merged)).map_err(|e| CliError::Usage(format!("configuration: {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde::Deserialize;

    #[derive(Serialize)]
    struct Defaults {
        seed: u64,
        k: f64,
        n: usize,
    }

    #[derive(Serialize)]
    struct Flags {
        seed: Option<u64>,
        k: Option<f64>,
    }

    #[derive(Debug, Deserialize, PartialEq)]
    #[serde(deny_unknown_fields)]
    struct Resolved {
        seed: u64,
        k: f64,
        n: usize,
    }

    #[test]
    fn flags_beat_file_beat_defaults() {
        let d = Defaults { seed: 0, k: 1.0, n: 5 };
        let file: Map<String, Value> = serde_json::from_str(r#"{"k": 2.0, "n": 7, "seed": 3}"#).unwrap();
        let r: Resolved = resolve(
            &d,
            &file,
            &Flags {
                seed: None,
                k: Some(4.0),
            },
        )
        .unwrap();
        assert_eq!(r, Resolved { seed: 3, k: 4.0, n: 7 });
        let r: Resolved = resolve(&d, &Map::new(), &Flags { seed: Some(9), k: None }).unwrap();
        assert_eq!(r, Resolved { seed: 9, k: 1.0, n: 5 });
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let d = Defaults { seed: 0, k: 1.0, n: 5 };
        let file: Map<String, Value> = serde_json::from_str(r#"{"bogus": 1, "seed": 1}"#).unwrap();
        let r: Result<Resolved, _> = resolve(&d, &file, &Flags { seed: None, k: None });
        assert!(matches!(r, Err(CliError::Usage(m)) if m.contains("bogus")));
    }
}
