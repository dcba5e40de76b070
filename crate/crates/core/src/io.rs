//! File formats: household CSV, versioned JSON documents and menu TOML.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::household::Household;
use crate::menu::MenuConfig;

/// Version stamped into every JSON document.
pub const SCHEMA_VERSION: u32 = 1;

/// Household CSV columns, in order.
pub const CSV_HEADER: [&str; 7] = [
    "household_id",
    "base_price_collision",
    "base_price_comprehensive",
    "claim_prob_collision",
    "claim_prob_comprehensive",
    "choice_collision_deductible",
    "choice_comprehensive_deductible",
];

/// A JSON output: schema version, the resolved configuration that produced
/// it, and the result.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Document<C, T> {
    pub schema_version: u32,
    pub config: C,
    pub result: T,
}

impl<C, T> Document<C, T> {
    pub fn new(config: C, result: T) -> Self {
        Document {
            schema_version: SCHEMA_VERSION,
            config,
            result,
        }
    }
}

fn parse_error(path: &str, line: u64, column: &str, message: impl Into<String>) -> Error {
    Error::Parse {
        path: path.to_string(),
        line,
        column: column.to_string(),
        message: message.into(),
    }
}

fn dollars(d: f64) -> Result<i64> {
    if d.fract() != 0.0 || d.abs() > 1e15 {
        return Err(Error::invalid("deductible", format!("{d} is not a whole dollar amount")));
    }
    Ok(d as i64)
}

/// Writes households as CSV. Chosen bundles are written as deductible
/// amounts in whole dollars; households without a choice leave both choice
/// columns empty.
pub fn write_households<W: Write>(writer: W, households: &[Household], menu: &MenuConfig) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(CSV_HEADER)?;
    let (n1, n2) = menu.shape();
    for h in households {
        let (c1, c2) = match h.choice {
            Some(b) => {
                if b.collision >= n1 || b.comprehensive >= n2 {
                    return Err(Error::invalid("household", format!("choice {b:?} of household {} is off the menu", h.id)));
                }
                let (d1, d2) = menu.deductibles(b);
                (dollars(d1)?.to_string(), dollars(d2)?.to_string())
            }
            None => (String::new(), String::new()),
        };
        w.write_record([
            h.id.to_string(),
            h.base_price_collision.to_string(),
            h.base_price_comprehensive.to_string(),
            h.claim_prob_collision.to_string(),
            h.claim_prob_comprehensive.to_string(),
            c1,
            c2,
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Reads households from CSV. `path` labels error messages.
pub fn read_households<R: Read>(reader: R, path: &str, menu: &MenuConfig) -> Result<Vec<Household>> {
    let mut r = csv::ReaderBuilder::new().has_headers(false).from_reader(reader);
    let mut records = r.records();
    let header = match records.next() {
        Some(rec) => rec.map_err(|e| parse_error(path, 1, "header", e.to_string()))?,
        None => return Err(parse_error(path, 1, "header", "file is empty")),
    };
    if header.len() != CSV_HEADER.len() || header.iter().zip(CSV_HEADER).any(|(a, b)| a.trim() != b) {
        return Err(parse_error(
            path,
            1,
            "header",
            format!("expected `{}`", CSV_HEADER.join(",")),
        ));
    }
    let mut out = Vec::new();
    for rec in records {
        let rec = rec.map_err(|e| {
            let line = e.position().map(|p| p.line()).unwrap_or(0);
            parse_error(path, line, "record", e.to_string())
        })?;
        let line = rec.position().map(|p| p.line()).unwrap_or(0);
        if rec.len() != CSV_HEADER.len() {
            return Err(parse_error(
                path,
                line,
                "record",
                format!("expected {} fields, found {}", CSV_HEADER.len(), rec.len()),
            ));
        }
        let field = |k: usize| rec[k].trim();
        let number = |k: usize| -> Result<f64> {
            let v: f64 = field(k)
                .parse()
                .map_err(|_| parse_error(path, line, CSV_HEADER[k], format!("`{}` is not a number", field(k))))?;
            if !v.is_finite() {
                return Err(parse_error(path, line, CSV_HEADER[k], "value must be finite"));
            }
            Ok(v)
        };
        let id: u64 = field(0)
            .parse()
            .map_err(|_| parse_error(path, line, CSV_HEADER[0], format!("`{}` is not a non-negative integer", field(0))))?;
        let mut h = Household::new(id, number(1)?, number(2)?, number(3)?, number(4)?);
        for k in [1, 2] {
            if !(number(k)? > 0.0) {
                return Err(parse_error(path, line, CSV_HEADER[k], "base price must be positive"));
            }
        }
        for k in [3, 4] {
            let p = number(k)?;
            if !(p > 0.0 && p < 1.0) {
                return Err(parse_error(path, line, CSV_HEADER[k], "claim probability must lie in (0, 1)"));
            }
        }
        match (field(5).is_empty(), field(6).is_empty()) {
            (true, true) => {}
            (false, false) => {
                let amount = |k: usize| -> Result<f64> {
                    let d: i64 = field(k).parse().map_err(|_| {
                        parse_error(path, line, CSV_HEADER[k], format!("`{}` is not a whole dollar amount", field(k)))
                    })?;
                    Ok(d as f64)
                };
                let (d1, d2) = (amount(5)?, amount(6)?);
                let b = menu.find_bundle(d1, d2).ok_or_else(|| {
                    let column = if menu.collision.deductibles.contains(&d1) { CSV_HEADER[6] } else { CSV_HEADER[5] };
                    parse_error(path, line, column, format!("deductible pair ({d1}, {d2}) is not on the menu"))
                })?;
                h = h.with_choice(b);
            }
            (c1, _) => {
                let column = if c1 { CSV_HEADER[5] } else { CSV_HEADER[6] };
                return Err(parse_error(path, line, column, "both choice columns must be filled or both empty"));
            }
        }
        out.push(h);
    }
    Ok(out)
}

pub fn write_households_file(path: &Path, households: &[Household], menu: &MenuConfig) -> Result<()> {
    let f = File::create(path)?;
    write_households(BufWriter::new(f), households, menu)
}

pub fn read_households_file(path: &Path, menu: &MenuConfig) -> Result<Vec<Household>> {
    let f = File::open(path)?;
    read_households(BufReader::new(f), &path.display().to_string(), menu)
}

/// Pretty-printed JSON with a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    std::fs::write(path, to_json(value)?)?;
    Ok(())
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| parse_error(&path.display().to_string(), e.line() as u64, &format!("{}", e.column()), e.to_string()))
}

/// Reads a document and checks its schema version.
pub fn read_document<C: DeserializeOwned, T: DeserializeOwned>(path: &Path) -> Result<Document<C, T>> {
    let doc: Document<C, T> = read_json(path)?;
    if doc.schema_version != SCHEMA_VERSION {
        return Err(parse_error(
            &path.display().to_string(),
            0,
            "schema_version",
            format!("unsupported version {}, expected {SCHEMA_VERSION}", doc.schema_version),
        ));
    }
    Ok(doc)
}

/// Menu as TOML with one table per context.
pub fn menu_to_toml(menu: &MenuConfig) -> Result<String> {
    Ok(toml::to_string(menu)?)
}

pub fn menu_from_toml(text: &str) -> Result<MenuConfig> {
    let menu: MenuConfig = toml::from_str(text)?;
    menu.validate()?;
    Ok(menu)
}

pub fn read_menu(path: &Path) -> Result<MenuConfig> {
    let text = std::fs::read_to_string(path)?;
    let menu: MenuConfig = toml::from_str(&text).map_err(|e| {
        let (line, column) = e
            .span()
            .map(|s| {
                let before = &text[..s.start.min(text.len())];
                let line = before.matches('\n').count() as u64 + 1;
                let col = s.start - before.rfind('\n').map(|i| i + 1).unwrap_or(0) + 1;
                (line, col.to_string())
            })
            .unwrap_or((0, String::new()));
        parse_error(&path.display().to_string(), line, &column, e.message().to_string())
    })?;
    menu.validate()?;
    Ok(menu)
}
