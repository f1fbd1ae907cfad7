//! Orthogonal Procrustes alignment of a rotated, reflected and perturbed
//! point set.
//!
//! cargo run --example procrustes

use guided_spectral::embedding::{apply_transform, procrustes_rotation};
use guided_spectral::Error;
use nalgebra::{DMatrix, Matrix2};

fn main() -> Result<(), Error> {
    let reference = DMatrix::from_row_slice(5, 2, &[0.0, 1.0, 1.0, 0.5, 0.5, -1.0, -0.5, -1.0, -1.0, 0.5]);
    let t: f64 = 2.0;
    let reflect_rotate = Matrix2::new(t.cos(), t.sin(), t.sin(), -t.cos());
    let mut moved = apply_transform(&reference, &reflect_rotate);
    moved[(0, 0)] += 0.05;
    moved[(3, 1)] -= 0.05;

    let r = procrustes_rotation(&reference, &moved)?;
    let aligned = apply_transform(&moved, &r);
    println!("recovered transform (det {:.1}):\n{r:.4}", r.determinant());
    println!("distance before {:.4}, after {:.4}", (&moved - &reference).norm(), (&aligned - &reference).norm());
    Ok(())
}
