//! The file-based pipeline behind the CLI: writes a demo graph as CSV, then
//! runs `spectrum`, `sweep` and `cluster` on it.
//!
//! cargo run --example file_pipeline -- OUT_DIR
//!
//! The CSVs in OUT_DIR/input can be fed to the `guided-spectral` binary.

use std::path::PathBuf;

use guided_spectral::io::{write_edge_csv, write_node_csv};
use guided_spectral::pipeline::{cmd_cluster, cmd_spectrum, cmd_sweep, FocusSpec, RunConfig};
use guided_spectral::synthetic::{planted_partition, to_records, PlantedSpec};
use guided_spectral::Error;

fn main() -> Result<(), Error> {
    let out = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "pipeline-out".into()));
    let input = out.join("input");
    std::fs::create_dir_all(&input)?;
    let (g, _) = planted_partition(&PlantedSpec::default(), 1);
    let (edges, nodes) = to_records(&g, "chemical");
    write_edge_csv(&input.join("edges.csv"), &edges)?;
    write_node_csv(&input.join("nodes.csv"), &nodes)?;

    let mut config = RunConfig::new(input.join("edges.csv"), input.join("nodes.csv"), out.join("inter"));
    config.focus = FocusSpec::classes(["inter"]);
    config.seed = Some(1);
    config.bandwidths = vec![20, g.n()];
    println!("config hash {}", config.hash()?);
    for f in cmd_spectrum(&config)? {
        println!("wrote {}", f.display());
    }
    let sweep = cmd_sweep(&config)?;
    for f in &sweep.files {
        println!("wrote {}", f.display());
    }
    let clusters = cmd_cluster(&config, &config.out_dir.join("trajectory.json"))?;
    println!("k = {}, Q = {:.4}, p = {:.4}", clusters.report.k, clusters.report.q_observed, clusters.report.p_value);
    Ok(())
}
