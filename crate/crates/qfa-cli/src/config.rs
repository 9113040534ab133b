//! `--config` files: TOML whose keys are flag names.
//!
//! Top-level scalars apply to every command; a table named after the
//! subcommand applies to that command only. Flags given on the command line
//! win over the file.

use std::fs;
use toml::Value;

fn scalar(v: &Value) -> Option<String> {
    match v {
        Value::String(s) => Some(s.clone()),
        Value::Integer(n) => Some(n.to_string()),
        Value::Float(x) => Some(x.to_string()),
        Value::Boolean(b) => Some(b.to_string()),
        _ => None,
    }
}

fn present(args: &[String], flag: &str) -> bool {
    args.iter()
        .any(|a| a == flag || a.starts_with(&format!("{flag}=")))
}

/// Splices the config file named by `--config` into `args`, right after the
/// subcommand.
pub fn expand(mut args: Vec<String>) -> Result<Vec<String>, String> {
    let Some(k) = args
        .iter()
        .position(|a| a == "--config" || a.starts_with("--config="))
    else {
        return Ok(args);
    };
    let path = match args[k].strip_prefix("--config=") {
        Some(p) => p.to_string(),
        None => args.get(k + 1).cloned().ok_or("--config needs a path")?,
    };
    let text = fs::read_to_string(&path).map_err(|e| format!("{path}: {e}"))?;
    let table: toml::Table = text.parse().map_err(|e| format!("{path}: {e}"))?;
    let Some(sub) =
        (1..args.len()).find(|&j| !args[j].starts_with('-') && args[j - 1] != "--config")
    else {
        return Ok(args);
    };
    let name = args[sub].clone();
    let mut pairs: Vec<(String, Value)> = Vec::new();
    for (key, v) in &table {
        match v {
            Value::Table(t) if *key == name => {
                pairs.extend(t.iter().map(|(a, b)| (a.clone(), b.clone())))
            }
            Value::Table(_) => {}
            _ => pairs.push((key.clone(), v.clone())),
        }
    }
    let mut extra = Vec::new();
    for (key, v) in pairs {
        let flag = format!("--{}", key.replace('_', "-"));
        if present(&args, &flag) {
            continue;
        }
        match v {
            Value::Boolean(true) => extra.push(flag),
            Value::Boolean(false) => {}
            Value::Array(items) => {
                for item in &items {
                    extra.push(flag.clone());
                    extra.push(scalar(item).ok_or(format!("{path}: {key} must hold scalars"))?);
                }
            }
            other => {
                extra.push(flag);
                extra.push(scalar(&other).ok_or(format!("{path}: {key} must be a scalar"))?);
            }
        }
    }
    args.splice(sub + 1..sub + 1, extra);
    Ok(args)
}
