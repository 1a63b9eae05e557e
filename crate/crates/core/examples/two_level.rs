//! Every 2x2 Hamiltonian with prescribed levels X and Y, parametrized by
//! the free diagonal entry a.

use effham::spectral::eigenvalues_dense;
use effham::toys::{two_level_reconstruct, TwoLevelInput};

fn main() -> effham::Result<()> {
    let (x, y) = (1.5, -0.5);
    for a in [0.0, 0.5, 1.0, 1.5, 2.0] {
        let r = two_level_reconstruct(&TwoLevelInput { x, y, a })?;
        let levels: Vec<f64> = eigenvalues_dense(&r.uncentered())?.iter().map(|z| z.re).collect();
        println!(
            "a = {a:3.1}  varrho = {:+.4}  symmetric = {:5}  levels = {levels:.12?}",
            r.varrho,
            r.is_symmetrizable()
        );
    }
    Ok(())
}
