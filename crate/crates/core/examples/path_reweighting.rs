//! How the linear and quadratic guided forms reweight direct and length-2
//! paths of the normalized adjacency.
//!
//! cargo run --example path_reweighting

use guided_spectral::slepian::{guided_matrix_linear, guided_matrix_quadratic};
use guided_spectral::{normalize, synthetic, CooperationWeights, Error};

fn main() -> Result<(), Error> {
    let a = normalize(&synthetic::path(3))?.adjacency().clone();
    println!("path 0-1-2, normalized adjacency:\n{a:.4}");
    for m in [[1.0, 1.0, 1.0], [1.0, 0.0, 1.0], [0.0, 1.0, 0.0], [1.0, 1.0, 0.0]] {
        let w = CooperationWeights::new(m.to_vec())?;
        let lin = guided_matrix_linear(&w, &a)?;
        let quad = guided_matrix_quadratic(&w, &a)?;
        println!(
            "m = {m:?}: linear (0,1) = {:.4}, quadratic (0,2) via node 1 = {:.4}, quadratic (0,0) = {:.4}",
            lin[(0, 1)],
            quad[(0, 2)],
            quad[(0, 0)]
        );
    }
    Ok(())
}
