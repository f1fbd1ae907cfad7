//! Concentration, embedded-distance and guided spectra with one node class
//! unselected, including the full-bandwidth degeneracies.
//!
//! cargo run --example slepian_spectra

use guided_spectral::slepian::{
    concentration_slepians, embedded_distance_slepians, guided_matrix_exact, guided_slepians, verify_degeneracy,
};
use guided_spectral::spectral::sqrt_psd_exact;
use guided_spectral::synthetic::{planted_partition, PlantedSpec};
use guided_spectral::{eig_sym, normalize, Bandwidth, CooperationWeights, Error, SortOrder};

fn head(values: &[f64], k: usize) -> String {
    values.iter().take(k).map(|v| format!("{v:.3}")).collect::<Vec<_>>().join(" ")
}

fn main() -> Result<(), Error> {
    let (g, _) = planted_partition(&PlantedSpec::default(), 1);
    let n = g.n();
    let motor = g.nodes_in_class("motor");
    let selected: Vec<usize> = (0..n).filter(|i| !motor.contains(i)).collect();
    println!("{n} nodes, {} unselected motor nodes", motor.len());

    let ops = normalize(&g)?;
    let basis = eig_sym(ops.laplacian(), SortOrder::Ascending)?;
    let half = sqrt_psd_exact(ops.laplacian())?;
    let s = CooperationWeights::selection(n, &selected)?;

    for w in [10, 25, 40, n] {
        let band = Bandwidth::new(w, n)?;
        let mu = concentration_slepians(&basis, &s, band)?;
        let xi = embedded_distance_slepians(&basis, &half, &s, band)?;
        println!("W={w:<3} mu: {} ...  xi: {} ...", head(&mu.values, 6), head(&xi.values, 6));
    }

    let full = Bandwidth::full(n);
    let mu = verify_degeneracy(&concentration_slepians(&basis, &s, full)?, &s, 1e-8)?;
    let xi = verify_degeneracy(&embedded_distance_slepians(&basis, &half, &s, full)?, &s, 1e-8)?;
    println!("full bandwidth: mu has {} ones and {} zeros; xi has {} zeros", mu.ones, mu.zeros, xi.zeros);

    let zeta = guided_slepians(&guided_matrix_exact(&s, &half)?, &s, &half)?;
    let (cmu, cxi) = (zeta.companion_mu.unwrap(), zeta.companion_xi.unwrap());
    println!("  k  zeta     mu      xi");
    for k in 0..6 {
        println!("  {:<2} {:<8.4} {:<7.4} {:.4}", k + 1, zeta.values[k], cmu[k], cxi[k]);
    }
    Ok(())
}
