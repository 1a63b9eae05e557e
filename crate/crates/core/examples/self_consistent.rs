//! Solves the energy-dependent model-space problem level by level and
//! compares with the full spectrum.

use effham::spectral::{
    eigenvalues_dense, full_space_eigenvector, hidden_levels, self_consistent_solve,
    SelfConsistentOptions,
};
use effham::{PartitionedHamiltonian, TridiagonalChain};
use nalgebra::DMatrix;

fn main() -> effham::Result<()> {
    let p = DMatrix::from_row_slice(2, 2, &[-1.0, 0.4, 0.4, 0.5]);
    let chain = TridiagonalChain::new(vec![0.5, 2.5, 4.0], vec![0.6, 0.9])?;
    let h = PartitionedHamiltonian::new(p, chain)?;
    let dense = h.assemble_dense()?;
    let full: Vec<f64> = eigenvalues_dense(&dense)?.iter().map(|z| z.re).collect();
    println!("full spectrum: {full:.10?}");

    let options = SelfConsistentOptions::default();
    for (n, eta0) in [(1, -1.0), (2, 0.5)] {
        let r = self_consistent_solve(&h, eta0, n, &options)?;
        let psi = full_space_eigenvector(&h, r.energy, &r.eigvec_model)?;
        let residual = (&dense * &psi - &psi * r.energy).amax();
        println!(
            "level {n}: E = {:.12} after {} steps, |H psi - E psi| = {residual:.1e}",
            r.energy, r.iterations
        );
    }

    let hidden = hidden_levels(&h, 1e-9)?;
    println!("levels shared with QHQ: {}", hidden.len());
    Ok(())
}
