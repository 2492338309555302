//! Edge-list, membership and population-manifest files.
//!
//! Edge lists hold one `u,v` pair per line (0-indexed, written with `u < v`);
//! memberships hold `vertex_id,block_id` lines. Both readers skip blank lines
//! and accept one optional non-numeric header line.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hierarchy::Membership;
use crate::sampling::GraphSample;

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// Parses two-column integer CSV rows, returning `(line number, a, b)`.
fn parse_pairs(text: &str, path: &Path) -> Result<Vec<(usize, usize, usize)>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(text.as_bytes());
    let mut out = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|e| Error::Parse {
            path: path.to_path_buf(),
            line: e.position().map_or(0, |p| p.line() as usize),
            message: e.to_string(),
        })?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        let parse_err = |message: String| Error::Parse {
            path: path.to_path_buf(),
            line,
            message,
        };
        if record.len() != 2 {
            return Err(parse_err(format!("expected 2 fields, found {}", record.len())));
        }
        match (record[0].parse::<usize>(), record[1].parse::<usize>()) {
            (Ok(a), Ok(b)) => out.push((line, a, b)),
            _ if i == 0 => continue,
            _ => {
                return Err(parse_err(format!(
                    "expected two nonnegative integers, found {:?}",
                    record.iter().collect::<Vec<_>>().join(",")
                )))
            }
        }
    }
    Ok(out)
}

pub fn parse_edge_list(text: &str, path: &Path) -> Result<Vec<(usize, usize)>> {
    Ok(parse_pairs(text, path)?
        .into_iter()
        .map(|(_, u, v)| (u, v))
        .collect())
}

pub fn read_edge_list(path: impl AsRef<Path>) -> Result<Vec<(usize, usize)>> {
    let path = path.as_ref();
    parse_edge_list(&read(path)?, path)
}

pub fn edge_list_csv(graph: &GraphSample) -> String {
    graph.edges().iter().map(|(u, v)| format!("{u},{v}\n")).collect()
}

pub fn write_edge_list(path: impl AsRef<Path>, graph: &GraphSample) -> Result<()> {
    write(path.as_ref(), &edge_list_csv(graph))
}

/// Parses a membership; vertex ids must be exactly `0..n`. When `k_star` is
/// `None` it is taken as the largest block id plus one.
pub fn parse_membership(text: &str, path: &Path, k_star: Option<usize>) -> Result<Membership> {
    let rows = parse_pairs(text, path)?;
    let n = rows.len();
    let mut tau = vec![usize::MAX; n];
    for &(line, v, b) in &rows {
        let err = |message: String| Error::Parse {
            path: path.to_path_buf(),
            line,
            message,
        };
        if v >= n {
            return Err(err(format!("vertex id {v} out of range for {n} vertices")));
        }
        if tau[v] != usize::MAX {
            return Err(err(format!("vertex {v} listed twice")));
        }
        if let Some(k) = k_star {
            if b >= k {
                return Err(err(format!("block {b} out of range for {k} blocks")));
            }
        }
        tau[v] = b;
    }
    let k = k_star.unwrap_or_else(|| tau.iter().max().map_or(0, |m| m + 1));
    Membership::new(tau, k)
}

pub fn read_membership(path: impl AsRef<Path>, k_star: Option<usize>) -> Result<Membership> {
    let path = path.as_ref();
    parse_membership(&read(path)?, path, k_star)
}

pub fn membership_csv(tau: &Membership) -> String {
    tau.labels()
        .iter()
        .enumerate()
        .map(|(v, b)| format!("{v},{b}\n"))
        .collect()
}

pub fn write_membership(path: impl AsRef<Path>, tau: &Membership) -> Result<()> {
    write(path.as_ref(), &membership_csv(tau))
}

/// Reads a graph from its edge list and membership files.
pub fn read_graph(edges: impl AsRef<Path>, membership: impl AsRef<Path>, k_star: Option<usize>) -> Result<GraphSample> {
    let tau = read_membership(membership, k_star)?;
    let edges_path = edges.as_ref();
    let list = read_edge_list(edges_path)?;
    GraphSample::new(tau, list).map_err(|e| Error::Parse {
        path: edges_path.to_path_buf(),
        line: 0,
        message: e.to_string(),
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestMember {
    pub edges: PathBuf,
    pub membership: PathBuf,
}

/// A population of graphs on disk. Relative member paths are resolved
/// against the manifest's directory.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PopulationManifest {
    pub master_seed: u64,
    pub members: Vec<ManifestMember>,
}

impl PopulationManifest {
    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        serde_json::from_str(&read(path)?).map_err(|e| Error::Parse {
            path: path.to_path_buf(),
            line: e.line(),
            message: e.to_string(),
        })
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        write(
            path.as_ref(),
            &serde_json::to_string_pretty(self).expect("manifest serializes"),
        )
    }
}

/// Loads every member graph of a manifest, in manifest order.
pub fn load_population(manifest_path: impl AsRef<Path>, k_star: Option<usize>) -> Result<(PopulationManifest, Vec<GraphSample>)> {
    let manifest_path = manifest_path.as_ref();
    let manifest = PopulationManifest::from_path(manifest_path)?;
    let dir = manifest_path.parent().unwrap_or(Path::new("."));
    let graphs = manifest
        .members
        .iter()
        .map(|m| read_graph(dir.join(&m.edges), dir.join(&m.membership), k_star))
        .collect::<Result<Vec<_>>>()?;
    Ok((manifest, graphs))
}

/// Writes `graph_<i>.edges.csv` and `graph_<i>.membership.csv` per graph and
/// a `manifest.json` with relative paths; returns the manifest path.
pub fn write_population(dir: impl AsRef<Path>, graphs: &[GraphSample], master_seed: u64) -> Result<PathBuf> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let width = graphs.len().saturating_sub(1).to_string().len();
    let mut members = Vec::with_capacity(graphs.len());
    for (i, g) in graphs.iter().enumerate() {
        let edges = PathBuf::from(format!("graph_{i:0width$}.edges.csv"));
        let membership = PathBuf::from(format!("graph_{i:0width$}.membership.csv"));
        write_edge_list(dir.join(&edges), g)?;
        write_membership(dir.join(&membership), g.membership())?;
        members.push(ManifestMember { edges, membership });
    }
    let path = dir.join("manifest.json");
    PopulationManifest { master_seed, members }.write(&path)?;
    Ok(path)
}
