//! Truncated Taylor roots of the normalized Laplacian against the exact root,
//! with the remainder bound. Every graph Laplacian has a zero eigenvalue, so
//! the reported bound is infinite; a spectrum kept away from zero shows the
//! finite case.
//!
//! cargo run --example taylor_sqrt

use guided_spectral::slepian::{guided_matrix_exact, guided_matrix_series, CooperationWeights};
use guided_spectral::spectral::{sqrt_psd_exact, sqrt_taylor, taylor_coeffs, taylor_error_bound, TaylorBound};
use guided_spectral::{eig_sym, normalize, synthetic, Error, SortOrder};
use nalgebra::{DMatrix, DVector};

fn main() -> Result<(), Error> {
    println!("c_1..c_5 = {:?}", taylor_coeffs(5));

    let g = synthetic::barbell(5);
    let ops = normalize(&g)?;
    let lambdas: Vec<f64> = eig_sym(ops.laplacian(), SortOrder::Ascending)?
        .values
        .iter()
        .map(|v| v.clamp(0.0, 2.0))
        .collect();
    let exact = sqrt_psd_exact(ops.laplacian())?;
    let weights = CooperationWeights::selection(g.n(), &[0, 1, 2, 3, 4])?;
    let criterion = guided_matrix_exact(&weights, &exact)?;
    println!("barbell(5)\n  K   ||L^1/2 - T_K||   d_K   ||zeta - zeta_K||   d_K,M");
    for k in [1, 2, 5, 10, 20, 50] {
        let root_err = (sqrt_taylor(ops.adjacency(), k)? - &exact).norm();
        let crit_err = (guided_matrix_series(&weights, ops.adjacency(), k)? - &criterion).norm();
        let bound = TaylorBound::compute(k, &lambdas, weights.as_slice())?;
        println!("  {k:<3} {root_err:<17.3e} {:<5} {crit_err:<19.3e} {}", bound.d_k, bound.d_km);
    }

    // a symmetric matrix with Laplacian-like spectrum in [0.3, 1.7]
    let values: Vec<f64> = (0..8).map(|i| 0.3 + 0.2 * i as f64).collect();
    let q = eig_sym(&DMatrix::from_fn(8, 8, |i, j| ((i * j) as f64).sin() + ((i + j) as f64).cos()), SortOrder::Ascending)?.vectors;
    let l = &q * DMatrix::from_diagonal(&DVector::from_vec(values.clone())) * q.transpose();
    let a = DMatrix::identity(8, 8) - &l;
    println!("spectrum in [0.3, 1.7]\n  K   error      bound");
    for k in [1, 2, 5, 10] {
        let err = (sqrt_taylor(&a, k)? - sqrt_psd_exact(&l)?).norm();
        println!("  {k:<3} {err:<10.3e} {:.3e}", taylor_error_bound(k, &values)?);
    }
    Ok(())
}
