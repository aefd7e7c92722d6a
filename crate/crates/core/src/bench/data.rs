//! Synthetic pools, embedding-file IO and exact nearest-neighbour retrieval.

use std::collections::HashSet;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::problem::{Candidate, Query};

/// `n` points uniform over the unit disc, query at the origin.
///
/// Radii are `sqrt(u)` so the density is uniform in area.
pub fn generate_unit_disc(n: usize, seed: u64) -> Result<(Query, Vec<Candidate>)> {
    if n == 0 {
        return Err(Error::invalid("unit disc needs at least one point"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pool = (0..n)
        .map(|i| {
            let theta = rng.random::<f64>() * std::f64::consts::TAU;
            let r = rng.random::<f64>().sqrt();
            Candidate::new(format!("c{i:03}"), vec![r * theta.cos(), r * theta.sin()])
        })
        .collect();
    Ok((Query::new("origin", vec![0.0, 0.0]), pool))
}

fn parse_rows(text: &str, path: &Path) -> Result<Vec<Candidate>> {
    let mut out = Vec::new();
    let mut ids = HashSet::new();
    let mut dim = None;
    for (lineno, line) in text.lines().enumerate() {
        let line_no = lineno + 1;
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() {
            continue;
        }
        let err = |msg: String| Error::Parse {
            path: path.to_path_buf(),
            line: line_no,
            msg,
        };
        let mut fields = line.split(',');
        let id = fields.next().unwrap_or_default().trim();
        if id.is_empty() || id.contains('"') {
            return Err(err(format!("bad id {id:?}")));
        }
        let vector = fields
            .map(|f| {
                let f = f.trim();
                f.parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| err(format!("not a finite number: {f:?}")))
            })
            .collect::<Result<Vec<f64>>>()?;
        if vector.is_empty() {
            return Err(err("row has no coordinates".into()));
        }
        match dim {
            None => dim = Some(vector.len()),
            Some(d) if d != vector.len() => {
                return Err(err(format!(
                    "ragged row: {} values, expected {d}",
                    vector.len()
                )));
            }
            _ => {}
        }
        if !ids.insert(id.to_string()) {
            return Err(err(format!("duplicate id {id:?}")));
        }
        out.push(Candidate::new(id, vector));
    }
    Ok(out)
}

/// Reads `id,v1,...,vd` rows (no header) in file order.
pub fn load_embeddings(path: impl AsRef<Path>) -> Result<Vec<Candidate>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_rows(&text, path)
}

/// First row of a query file.
pub fn load_query(path: impl AsRef<Path>) -> Result<Query> {
    let path = path.as_ref();
    let first = load_embeddings(path)?
        .into_iter()
        .next()
        .ok_or_else(|| Error::invalid(format!("{} holds no query row", path.display())))?;
    Ok(Query::new(first.id, first.vector))
}

fn render_row(out: &mut String, id: &str, vector: &[f64]) {
    out.push_str(id);
    for v in vector {
        // shortest representation that parses back to the same bits
        let _ = write!(out, ",{v:?}");
    }
    out.push('\n');
}

pub fn write_embeddings(path: impl AsRef<Path>, rows: &[Candidate]) -> Result<()> {
    let path = path.as_ref();
    let mut text = String::new();
    for c in rows {
        if c.id.contains(',') || c.id.contains('"') {
            return Err(Error::invalid(format!(
                "id {:?} cannot be written unquoted",
                c.id
            )));
        }
        render_row(&mut text, &c.id, &c.vector);
    }
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

pub fn write_query(path: impl AsRef<Path>, query: &Query) -> Result<()> {
    write_embeddings(
        path,
        &[Candidate::new(query.id.clone(), query.vector.clone())],
    )
}

/// The `n` corpus points closest to the query in Euclidean distance, ties by id.
pub fn knn_retrieve(query: &Query, corpus: &[Candidate], n: usize) -> Result<Vec<Candidate>> {
    if n > corpus.len() {
        return Err(Error::invalid(format!(
            "asked for {n} neighbours from a corpus of {}",
            corpus.len()
        )));
    }
    let mut scored = Vec::with_capacity(corpus.len());
    for c in corpus {
        if c.vector.len() != query.vector.len() {
            return Err(Error::invalid(format!(
                "candidate {} has dimension {}, query has {}",
                c.id,
                c.vector.len(),
                query.vector.len()
            )));
        }
        let d2: f64 = c
            .vector
            .iter()
            .zip(&query.vector)
            .map(|(a, b)| (a - b) * (a - b))
            .sum();
        scored.push((d2, c));
    }
    scored.sort_by(|a, b| a.0.total_cmp(&b.0).then_with(|| a.1.id.cmp(&b.1.id)));
    Ok(scored.into_iter().take(n).map(|(_, c)| c.clone()).collect())
}
