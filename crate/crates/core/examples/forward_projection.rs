//! Projects a doorway Hamiltonian onto its model space and checks the
//! result against the dense Schur complement.
//!
//! ```text
//! cargo run --example forward_projection
//! ```

use effham::forward::{effective_hamiltonian, g_function, g_function_dense_oracle};
use effham::{PartitionedHamiltonian, TridiagonalChain};
use nalgebra::DMatrix;

fn main() -> effham::Result<()> {
    let p = DMatrix::from_row_slice(3, 3, &[1.0, 0.5, 0.0, 0.5, -1.0, 0.3, 0.0, 0.3, 0.0]);
    let chain = TridiagonalChain::new(vec![0.0, 2.0, -0.5, 1.5], vec![0.8, 1.2, 0.4])?;
    let h = PartitionedHamiltonian::new(p, chain)?;
    println!("N = {} (M = {}, K = {})", h.n(), h.m(), h.k());

    for energy in [-2.5, 0.7, 3.1] {
        let heff = effective_hamiltonian(&h, energy)?;
        let g = g_function(&h.chain, energy)?;
        let dense = g_function_dense_oracle(&h, energy)?;
        println!("E = {energy:5.2}  G = {g:+.15}  dense = {dense:+.15}");
        println!("  H_eff rows: {:.6?}", effham::model::matrix_rows(&heff));
    }
    Ok(())
}
