//! File formats: edge/node CSV input, spectrum/trajectory/cluster outputs.
//!
//! Input CSVs are UTF-8 with a header row; lines starting with `#` are
//! comments. Every output file carries the run's config hash and seed, and all
//! numbers are written with 12 significant digits.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::embedding::{Alignment, GapWarning, Trajectory};
use crate::error::{Error, Result};
use crate::graph::{EdgeRecord, Graph, NodeRecord};

fn reader(path: &Path) -> Result<csv::Reader<File>> {
    let file = File::open(path).map_err(|e| Error::Parse {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    Ok(csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(file))
}

fn column(headers: &csv::StringRecord, name: &str, path: &Path) -> Result<usize> {
    headers.iter().position(|h| h == name).ok_or_else(|| Error::Parse {
        path: path.display().to_string(),
        message: format!("missing column `{name}`"),
    })
}

/// Reads `source,target,weight,layer`. The `layer` column may be omitted.
pub fn read_edge_csv(path: &Path) -> Result<Vec<EdgeRecord>> {
    let mut rdr = reader(path)?;
    let headers = rdr.headers()?.clone();
    let (s, t, w) = (
        column(&headers, "source", path)?,
        column(&headers, "target", path)?,
        column(&headers, "weight", path)?,
    );
    let layer = headers.iter().position(|h| h == "layer");
    let mut out = Vec::new();
    for (line, record) in rdr.records().enumerate() {
        let record = record?;
        let weight_str = &record[w];
        let weight: f64 = weight_str.parse().map_err(|_| Error::Parse {
            path: path.display().to_string(),
            message: format!("record {}: bad weight `{weight_str}`", line + 1),
        })?;
        out.push(EdgeRecord {
            source: record[s].to_string(),
            target: record[t].to_string(),
            weight,
            layer: layer.map(|l| record[l].to_string()).unwrap_or_default(),
        });
    }
    Ok(out)
}

/// Reads `id,label,class`; any further columns are kept as node metadata.
pub fn read_node_csv(path: &Path) -> Result<Vec<NodeRecord>> {
    let mut rdr = reader(path)?;
    let headers = rdr.headers()?.clone();
    let (id, label, class) = (
        column(&headers, "id", path)?,
        column(&headers, "label", path)?,
        column(&headers, "class", path)?,
    );
    let mut out = Vec::new();
    for record in rdr.records() {
        let record = record?;
        let extra = headers
            .iter()
            .enumerate()
            .filter(|(k, _)| ![id, label, class].contains(k))
            .map(|(k, h)| (h.to_string(), record[k].to_string()))
            .collect();
        out.push(NodeRecord {
            id: record[id].to_string(),
            label: record[label].to_string(),
            class: record[class].to_string(),
            extra,
        });
    }
    Ok(out)
}

pub fn write_edge_csv(path: &Path, records: &[EdgeRecord]) -> Result<()> {
    let mut wtr = csv::Writer::from_path(path)?;
    wtr.write_record(["source", "target", "weight", "layer"])?;
    for r in records {
        wtr.write_record([&r.source, &r.target, &fmt_num(r.weight), &r.layer])?;
    }
    wtr.flush()?;
    Ok(())
}

pub fn write_node_csv(path: &Path, records: &[NodeRecord]) -> Result<()> {
    let mut wtr = csv::Writer::from_path(path)?;
    wtr.write_record(["id", "label", "class"])?;
    for r in records {
        wtr.write_record([&r.id, &r.label, &r.class])?;
    }
    wtr.flush()?;
    Ok(())
}

/// 12 significant digits, scientific notation; `-0` prints as `0`.
pub fn fmt_num(x: f64) -> String {
    let x = if x == 0.0 { 0.0 } else { x };
    format!("{x:.11e}")
}

/// Rounds to the value [`fmt_num`] prints, for JSON output.
pub fn round12(x: f64) -> f64 {
    if x.is_finite() {
        fmt_num(x).parse().expect("formatted float parses")
    } else {
        x
    }
}

/// Provenance line written at the top of every CSV output.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub config_hash: String,
    pub seed: Option<u64>,
}

impl Provenance {
    pub fn header_line(&self) -> String {
        let seed = self.seed.map_or_else(|| "none".to_string(), |s| s.to_string());
        format!("# config_hash={} seed={}", self.config_hash, seed)
    }
}

/// Writes a CSV with a provenance comment, a header and string rows.
pub fn write_table(
    path: &Path,
    provenance: &Provenance,
    header: &[&str],
    rows: impl IntoIterator<Item = Vec<String>>,
) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    writeln!(out, "{}", provenance.header_line())?;
    {
        let mut wtr = csv::Writer::from_writer(&mut out);
        wtr.write_record(header)?;
        for row in rows {
            wtr.write_record(&row)?;
        }
        wtr.flush()?;
    }
    out.flush()?;
    Ok(())
}

/// `index,value` rows with 1-based indices.
pub fn write_spectrum(path: &Path, provenance: &Provenance, values: &[f64]) -> Result<()> {
    write_table(
        path,
        provenance,
        &["index", "value"],
        values
            .iter()
            .enumerate()
            .map(|(k, v)| vec![(k + 1).to_string(), fmt_num(*v)]),
    )
}

/// Reads `index,value` files produced by [`write_spectrum`].
pub fn read_spectrum(path: &Path) -> Result<Vec<f64>> {
    let mut rdr = reader(path)?;
    let headers = rdr.headers()?.clone();
    let v = column(&headers, "value", path)?;
    rdr.records()
        .map(|r| {
            let r = r?;
            r[v].parse::<f64>().map_err(|_| Error::Parse {
                path: path.display().to_string(),
                message: format!("bad value `{}`", &r[v]),
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub step: usize,
    pub off_focus_weight: f64,
    pub zeta: [f64; 2],
    /// Row-major 2x2 orthogonal transform applied to the raw frame.
    pub transform: [[f64; 2]; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodePath {
    pub index: usize,
    pub label: String,
    pub class: String,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub metadata: BTreeMap<String, String>,
    pub path: Vec<[f64; 2]>,
}

/// JSON form of a [`Trajectory`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryFile {
    pub config_hash: String,
    pub seed: Option<u64>,
    pub n: usize,
    pub eigvec_indices: [usize; 2],
    pub approx_order: Option<usize>,
    pub alignment: Alignment,
    pub focus: Vec<usize>,
    pub steps: Vec<StepRecord>,
    pub nodes: Vec<NodePath>,
    pub warnings: Vec<GapWarning>,
}

impl TrajectoryFile {
    pub fn from_trajectory(
        trajectory: &Trajectory,
        graph: &Graph,
        focus: &[usize],
        off_focus: &[f64],
        approx_order: Option<usize>,
        alignment: Alignment,
        provenance: &Provenance,
    ) -> Self {
        let indices = trajectory
            .frames
            .first()
            .map_or((2, 3), |f| f.eigvec_indices);
        let steps = trajectory
            .frames
            .iter()
            .zip(&trajectory.transforms)
            .zip(off_focus)
            .enumerate()
            .map(|(step, ((frame, r), &w))| StepRecord {
                step,
                off_focus_weight: round12(w),
                zeta: [round12(frame.zeta_values.0), round12(frame.zeta_values.1)],
                transform: [
                    [round12(r[(0, 0)]), round12(r[(0, 1)])],
                    [round12(r[(1, 0)]), round12(r[(1, 1)])],
                ],
            })
            .collect();
        let nodes = trajectory
            .per_node_paths
            .iter()
            .enumerate()
            .map(|(i, path)| NodePath {
                index: i,
                label: graph.labels()[i].clone(),
                class: graph.classes()[i].clone(),
                metadata: graph.metadata()[i].clone(),
                path: path.iter().map(|p| [round12(p[0]), round12(p[1])]).collect(),
            })
            .collect();
        let warnings = trajectory
            .warnings
            .iter()
            .map(|w| GapWarning {
                gap: round12(w.gap),
                ..w.clone()
            })
            .collect();
        Self {
            config_hash: provenance.config_hash.clone(),
            seed: provenance.seed,
            n: graph.n(),
            eigvec_indices: [indices.0, indices.1],
            approx_order,
            alignment,
            focus: focus.to_vec(),
            steps,
            nodes,
            warnings,
        }
    }

    /// Final-frame coordinates of every node.
    pub fn final_frame(&self) -> Vec<[f64; 2]> {
        self.nodes
            .iter()
            .map(|n| *n.path.last().unwrap_or(&[0.0, 0.0]))
            .collect()
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let mut out = BufWriter::new(File::create(path)?);
        serde_json::to_writer_pretty(&mut out, self)?;
        writeln!(out)?;
        out.flush()?;
        Ok(())
    }

    pub fn read(path: &Path) -> Result<Self> {
        let file = File::open(path).map_err(|e| Error::Parse {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        Ok(serde_json::from_reader(std::io::BufReader::new(file))?)
    }

    /// `node,label,step,x,y` rows ordered by node, then step.
    pub fn write_flat_csv(&self, path: &Path, provenance: &Provenance) -> Result<()> {
        let rows = self.nodes.iter().flat_map(|node| {
            node.path.iter().enumerate().map(move |(step, p)| {
                vec![
                    node.index.to_string(),
                    node.label.clone(),
                    step.to_string(),
                    fmt_num(p[0]),
                    fmt_num(p[1]),
                ]
            })
        });
        write_table(path, provenance, &["node", "label", "step", "x", "y"], rows)
    }
}

/// One column per cluster (`C1..Ck`), member labels as rows, shorter columns
/// padded with empty cells.
pub fn write_cluster_table(path: &Path, provenance: &Provenance, clusters: &[Vec<String>]) -> Result<()> {
    let header: Vec<String> = (1..=clusters.len()).map(|c| format!("C{c}")).collect();
    let header_refs: Vec<&str> = header.iter().map(String::as_str).collect();
    let depth = clusters.iter().map(Vec::len).max().unwrap_or(0);
    let rows = (0..depth).map(|r| {
        clusters
            .iter()
            .map(|c| c.get(r).cloned().unwrap_or_default())
            .collect()
    });
    write_table(path, provenance, &header_refs, rows)
}
