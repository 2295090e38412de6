//! The polytope JSON format: `{"dim": d, "vertices": [["p/q", ...], ...]}`.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::Serialize;
use serde_json::Value;

use crate::exact::{parse_rational, Rational};
use crate::geometry::{convex_hull, Polytope, RationalVector};
use crate::{Error, Result};

#[derive(Serialize)]
struct PolytopeFile<'a> {
    dim: usize,
    vertices: &'a [RationalVector],
}

pub fn polytope_to_json(p: &Polytope) -> String {
    serde_json::to_string_pretty(&PolytopeFile {
        dim: p.dim(),
        vertices: p.vertices(),
    })
    .expect("polytope serializes")
}

fn scalar(v: &Value) -> Result<Rational> {
    match v {
        Value::String(s) => parse_rational(s),
        Value::Number(n) if n.is_i64() || n.is_u64() => parse_rational(&n.to_string()),
        Value::Number(n) => Err(Error::Parse(format!(
            "floating-point coordinate {n} rejected; write exact \"p/q\" strings"
        ))),
        other => Err(Error::Parse(format!("unexpected coordinate {other}"))),
    }
}

/// Parses and re-canonicalizes (the vertex list is re-hulled).
pub fn polytope_from_json(text: &str) -> Result<Polytope> {
    let doc: Value = serde_json::from_str(text)?;
    let dim = doc
        .get("dim")
        .and_then(Value::as_u64)
        .ok_or_else(|| Error::Parse("missing integer field \"dim\"".into()))? as usize;
    let rows = doc
        .get("vertices")
        .and_then(Value::as_array)
        .ok_or_else(|| Error::Parse("missing array field \"vertices\"".into()))?;
    let mut points = Vec::with_capacity(rows.len());
    for row in rows {
        let coords = row
            .as_array()
            .ok_or_else(|| Error::Parse("vertex must be an array".into()))?
            .iter()
            .map(scalar)
            .collect::<Result<Vec<_>>>()?;
        if coords.len() != dim {
            return Err(Error::Parse(format!(
                "vertex has {} coordinates, expected {dim}",
                coords.len()
            )));
        }
        points.push(RationalVector::new(coords));
    }
    convex_hull(&points)
}

pub fn read_polytope(path: &Path) -> Result<Polytope> {
    polytope_from_json(&fs::read_to_string(path)?)
}

/// Writes through a temporary sibling file and renames it into place.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let dir = path.parent().filter(|d| !d.as_os_str().is_empty());
    if let Some(dir) = dir {
        fs::create_dir_all(dir)?;
    }
    let file_name = path
        .file_name()
        .ok_or_else(|| Error::Parameter(format!("{} is not a file path", path.display())))?
        .to_string_lossy();
    let tmp = path.with_file_name(format!(".{file_name}.{}.tmp", std::process::id()));
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(contents.as_bytes())?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

pub fn write_polytope(path: &Path, p: &Polytope) -> Result<()> {
    write_atomic(path, &polytope_to_json(p))
}
