//! Run parameters as TOML tables: built-in defaults, then the config file,
//! then flags, each layer replacing whole top-level keys.

use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::de::DeserializeOwned;
use toml::{Table, Value};

pub struct Layered {
    table: Table,
}

impl Layered {
    pub fn new(defaults: Table) -> Self {
        Layered { table: defaults }
    }

    pub fn file(mut self, path: Option<&Path>) -> Result<Self> {
        if let Some(path) = path {
            let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            let file: Table = toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
            self.table.extend(file);
        }
        Ok(self)
    }

    pub fn set(&mut self, key: &str, value: impl Into<Value>) {
        self.table.insert(key.to_string(), value.into());
    }

    pub fn set_opt<V: Into<Value>>(&mut self, key: &str, value: Option<V>) {
        if let Some(v) = value {
            self.set(key, v);
        }
    }

    pub fn set_list(&mut self, key: &str, values: &[usize]) -> Result<()> {
        if !values.is_empty() {
            let list = values.iter().map(|&v| int(v)).collect::<Result<Vec<_>>>()?;
            self.set(key, Value::Array(list));
        }
        Ok(())
    }

    pub fn require_seed(&mut self, seed: Option<u64>) -> Result<()> {
        if let Some(s) = seed {
            let s = i64::try_from(s).context("seed must be below 2^63")?;
            self.set("seed", Value::Integer(s));
        }
        if !self.table.contains_key("seed") {
            bail!("a seed is required: pass --seed or set `seed` in the config file");
        }
        Ok(())
    }

    pub fn build<T: DeserializeOwned>(self) -> Result<T> {
        self.table.try_into().context("invalid run parameters")
    }
}

pub fn int(v: usize) -> Result<Value> {
    Ok(Value::Integer(i64::try_from(v).context("value too large")?))
}

/// Parses `sqrt`, `power:E` or `fixed:K` into the TOML form of a k rule.
pub fn k_rule(text: &str) -> Result<Value> {
    let value = match text.split_once(':') {
        None if text == "sqrt" => Value::String("sqrt".into()),
        Some(("power", e)) => table_value("power", Value::Float(e.parse().context("power exponent")?)),
        Some(("fixed", k)) => table_value("fixed", int(k.parse().context("fixed k")?)?),
        _ => bail!("k rule `{text}` is not `sqrt`, `power:E` or `fixed:K`"),
    };
    Ok(value)
}

pub fn table_value(key: &str, v: Value) -> Value {
    let mut t = Table::new();
    t.insert(key.into(), v);
    Value::Table(t)
}
