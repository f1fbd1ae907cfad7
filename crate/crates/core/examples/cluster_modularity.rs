//! k-means with silhouette selection on the final frame of a focused sweep,
//! then a permutation test of the clustering's modularity.
//!
//! cargo run --example cluster_modularity

use guided_spectral::analysis::{permutation_test, silhouette_select, with_off_focus_group, NullModel};
use guided_spectral::embedding::{make_schedule, trajectory_sweep, SweepOptions};
use guided_spectral::graph::binarize;
use guided_spectral::synthetic::{planted_partition, PlantedSpec};
use guided_spectral::{normalize, Error};
use nalgebra::DMatrix;

fn main() -> Result<(), Error> {
    let (g, groups) = planted_partition(&PlantedSpec::default(), 3);
    let focus = g.nodes_in_class("sensory");
    let schedule = make_schedule(g.n(), &focus, 21, 1.0, 0.0)?;
    let t = trajectory_sweep(&normalize(&g)?, &schedule, &SweepOptions::default())?;
    let last = &t.frames.last().expect("non-empty").coords;
    let points = DMatrix::from_fn(focus.len(), 2, |r, c| last[(focus[r], c)]);

    let sel = silhouette_select(&points, 2, 10, 20, 42)?;
    for s in &sel.scores {
        println!("k={:<2} negatives={:<2} mean silhouette={:.3}", s.k, s.negatives, s.mean_silhouette);
    }
    println!("selected k = {}", sel.k);
    for (c, members) in sel.assignment.members().iter().enumerate() {
        let planted: Vec<usize> = members.iter().map(|&r| groups[focus[r]]).collect();
        println!("  C{}: planted groups {planted:?}", c + 1);
    }

    let labels = with_off_focus_group(g.n(), &focus, &sel.assignment.labels, sel.k)?;
    let test = permutation_test(binarize(&g).weights(), &labels, 999, 42, NullModel::Permute)?;
    let max_null = test.null_samples.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    println!("Q = {:.4}, max null Q = {max_null:.4}, p = {:.4}", test.q_observed, test.p_value);
    Ok(())
}
