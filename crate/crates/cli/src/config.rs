//! Typed access to the TOML config with field paths in every diagnostic.
//!
//! Physical quantities are strings carrying a unit suffix, e.g. `"632.8 nm"`,
//! `"55 deg"` or `"1.37e16 rad_s"`. Dimensionless values are plain numbers.

use std::path::{Path, PathBuf};

use toml::{Table, Value};

use crate::error::{CliError, CliResult};

/// Units accepted in quantity strings.
pub const UNITS: [&str; 3] = ["deg", "nm", "rad_s"];

/// Parsed config file with its location for resolving relative paths.
#[derive(Debug, Clone)]
pub struct Document {
    pub root: Table,
    pub base_dir: PathBuf,
    pub bytes: Vec<u8>,
}

impl Document {
    pub fn load(path: &Path) -> CliResult<Self> {
        let bytes = std::fs::read(path).map_err(|e| CliError::io(path, e))?;
        let text = std::str::from_utf8(&bytes)
            .map_err(|e| CliError::config("<file>", format!("config is not UTF-8: {e}")))?;
        let root: Table = text.parse().map_err(|e: toml::de::Error| {
            CliError::config(error_location(text, &e), e.message().to_string())
        })?;
        let base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok(Self { root, base_dir, bytes })
    }

    pub fn section(&self) -> Section<'_> {
        Section { path: String::new(), table: &self.root, base_dir: &self.base_dir }
    }

    /// Replaces the value at dotted `path`, keeping the unit of a quantity string.
    pub fn set_number(&mut self, path: &str, value: f64) -> CliResult<()> {
        let mut keys = path.split('.').peekable();
        let mut table = &mut self.root;
        while let Some(key) = keys.next() {
            let last = keys.peek().is_none();
            let entry = table
                .get_mut(key)
                .ok_or_else(|| CliError::config(path, "no such parameter in the config"))?;
            if last {
                *entry = match entry {
                    Value::Integer(_) | Value::Float(_) => Value::Float(value),
                    Value::String(s) => match split_quantity(s) {
                        Some((_, unit)) => Value::String(format!("{value:?} {unit}")),
                        None => return Err(CliError::config(path, "parameter is not numeric")),
                    },
                    _ => return Err(CliError::config(path, "parameter is not numeric")),
                };
                return Ok(());
            }
            table = entry
                .as_table_mut()
                .ok_or_else(|| CliError::config(path, "no such parameter in the config"))?;
        }
        Err(CliError::config(path, "empty parameter name"))
    }
}

fn error_location(text: &str, e: &toml::de::Error) -> String {
    match e.span() {
        Some(span) => {
            let line = text[..span.start.min(text.len())].matches('\n').count() + 1;
            format!("line {line}")
        }
        None => "<file>".into(),
    }
}

/// Splits `"<number> <unit>"` (space optional) into its parts.
fn split_quantity(s: &str) -> Option<(f64, &'static str)> {
    let s = s.trim();
    UNITS.iter().find_map(|&u| {
        s.strip_suffix(u)
            .and_then(|num| num.trim().parse::<f64>().ok())
            .map(|v| (v, u))
    })
}

/// A table plus its dotted path.
#[derive(Debug, Clone)]
pub struct Section<'a> {
    pub path: String,
    table: &'a Table,
    base_dir: &'a Path,
}

impl<'a> Section<'a> {
    fn field(&self, key: &str) -> String {
        if self.path.is_empty() {
            key.to_string()
        } else {
            format!("{}.{key}", self.path)
        }
    }

    pub fn has(&self, key: &str) -> bool {
        self.table.contains_key(key)
    }

    fn get(&self, key: &str) -> CliResult<&'a Value> {
        self.table
            .get(key)
            .ok_or_else(|| CliError::config(self.field(key), "missing required field"))
    }

    /// Rejects keys outside `allowed`.
    pub fn only(&self, allowed: &[&str]) -> CliResult<()> {
        for key in self.table.keys() {
            if !allowed.contains(&key.as_str()) {
                return Err(CliError::config(
                    self.field(key),
                    format!("unknown field; expected one of: {}", allowed.join(", ")),
                ));
            }
        }
        Ok(())
    }

    fn nested(&self, path: String, value: &'a Value) -> CliResult<Section<'a>> {
        match value {
            Value::Table(table) => Ok(Section { path, table, base_dir: self.base_dir }),
            other => Err(CliError::config(path, format!("expected a table, found {other}"))),
        }
    }

    pub fn child(&self, key: &str) -> CliResult<Section<'a>> {
        self.nested(self.field(key), self.get(key)?)
    }

    pub fn child_opt(&self, key: &str) -> CliResult<Option<Section<'a>>> {
        if self.has(key) { self.child(key).map(Some) } else { Ok(None) }
    }

    /// Elements of an array of tables, with indexed paths.
    pub fn children(&self, key: &str) -> CliResult<Vec<Section<'a>>> {
        self.array(key)?
            .iter()
            .enumerate()
            .map(|(i, v)| self.nested(format!("{}[{i}]", self.field(key)), v))
            .collect()
    }

    pub fn number(&self, key: &str) -> CliResult<f64> {
        match self.get(key)? {
            Value::Integer(i) => Ok(*i as f64),
            Value::Float(x) if x.is_finite() => Ok(*x),
            Value::String(s) if split_quantity(s).is_some() => Err(CliError::config(
                self.field(key),
                format!("`{s}` carries a unit but this field is dimensionless"),
            )),
            other => Err(CliError::config(self.field(key), format!("expected a number, found {other}"))),
        }
    }

    pub fn number_or(&self, key: &str, default: f64) -> CliResult<f64> {
        if self.has(key) { self.number(key) } else { Ok(default) }
    }

    pub fn quantity(&self, key: &str, unit: &str) -> CliResult<f64> {
        let field = self.field(key);
        match self.get(key)? {
            Value::String(s) => match split_quantity(s) {
                Some((v, u)) if u == unit && v.is_finite() => Ok(v),
                Some((_, u)) => Err(CliError::config(field, format!("expected unit `{unit}`, found `{u}`"))),
                None => Err(CliError::config(field, format!("cannot parse `{s}` as a quantity in `{unit}`"))),
            },
            Value::Integer(_) | Value::Float(_) => Err(CliError::config(
                field,
                format!("missing unit suffix; write e.g. \"{} {unit}\"", self.table[key]),
            )),
            other => Err(CliError::config(field, format!("expected a quantity in `{unit}`, found {other}"))),
        }
    }

    pub fn quantity_or(&self, key: &str, unit: &str, default: f64) -> CliResult<f64> {
        if self.has(key) { self.quantity(key, unit) } else { Ok(default) }
    }

    pub fn count(&self, key: &str) -> CliResult<usize> {
        match self.get(key)? {
            Value::Integer(i) if *i >= 0 => Ok(*i as usize),
            other => Err(CliError::config(self.field(key), format!("expected a non-negative integer, found {other}"))),
        }
    }

    pub fn count_or(&self, key: &str, default: usize) -> CliResult<usize> {
        if self.has(key) { self.count(key) } else { Ok(default) }
    }

    pub fn string(&self, key: &str) -> CliResult<&'a str> {
        match self.get(key)? {
            Value::String(s) => Ok(s),
            other => Err(CliError::config(self.field(key), format!("expected a string, found {other}"))),
        }
    }

    pub fn string_or(&self, key: &str, default: &'a str) -> CliResult<&'a str> {
        if self.has(key) { self.string(key) } else { Ok(default) }
    }

    /// Path relative to the config file's directory.
    pub fn path(&self, key: &str) -> CliResult<PathBuf> {
        Ok(self.base_dir.join(self.string(key)?))
    }

    pub fn array(&self, key: &str) -> CliResult<&'a [Value]> {
        match self.get(key)? {
            Value::Array(a) => Ok(a),
            other => Err(CliError::config(self.field(key), format!("expected an array, found {other}"))),
        }
    }

    /// Dotted path of `key` inside this section.
    pub fn field_path(&self, key: &str) -> String {
        self.field(key)
    }

    /// Key/value pairs of a table of plain numbers.
    pub fn numbers(&self) -> CliResult<Vec<(String, f64)>> {
        self.table.keys().map(|k| Ok((k.clone(), self.number(k)?))).collect()
    }
}
