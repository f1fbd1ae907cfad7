//! Loading a two-layer edge list: layer filters, merge rules, and the
//! explicit isolated-node pass.
//!
//! cargo run --example load_layers

use guided_spectral::graph::{connected_components, EdgeRecord, NodeRecord};
use guided_spectral::{load_graph, normalize, Error, LoadOptions, MergeRule};

fn main() -> Result<(), Error> {
    let nodes: Vec<NodeRecord> = ["ASEL", "ASER", "AIYL", "AIYR", "VA01"]
        .iter()
        .enumerate()
        .map(|(i, name)| NodeRecord::new(name, *name, if i < 2 { "sensory" } else if i < 4 { "inter" } else { "motor" }))
        .collect();
    // chemical synapses are directed and may repeat; gap junctions are not
    let edges = vec![
        EdgeRecord::new("ASEL", "AIYL", 2.0, "chemical"),
        EdgeRecord::new("ASEL", "AIYL", 1.0, "chemical"),
        EdgeRecord::new("AIYL", "ASEL", 1.0, "chemical"),
        EdgeRecord::new("ASER", "AIYR", 4.0, "chemical"),
        EdgeRecord::new("AIYL", "AIYR", 1.0, "gap"),
        EdgeRecord::new("ASEL", "AIYL", 5.0, "gap"),
        EdgeRecord::new("AIYR", "VA01", 1.0, "gap"),
    ];

    for merge in [MergeRule::Or, MergeRule::Max, MergeRule::Sum] {
        let options = LoadOptions::default().with_merge(merge).with_binarize(false);
        let g = load_graph(&edges, &nodes, &options)?;
        println!("{merge:?}: w(ASEL, AIYL) = {}", g.weights()[(0, 2)]);
    }

    let chemical = load_graph(&edges, &nodes, &LoadOptions::default().with_layers(["chemical"]))?;
    println!(
        "chemical only: {} edges, components {:?}",
        chemical.edge_count(),
        connected_components(&chemical)
    );
    match normalize(&chemical) {
        Err(e) => println!("normalize: {e}"),
        Ok(_) => unreachable!("VA01 has no chemical synapse"),
    }
    let (kept, index) = chemical.drop_isolated();
    println!("after drop_isolated: {} nodes, original indices {index:?}", kept.n());

    let all = load_graph(&edges, &nodes, &LoadOptions::default())?;
    let ops = normalize(&all)?;
    println!("layers of (ASEL, AIYL): {:?}", all.edge_layers(0, 2));
    println!("normalized adjacency:\n{:.3}", ops.adjacency());
    Ok(())
}
