//! Samples a random chain at Chebyshev probes kept away from its poles,
//! rebuilds it and scores the result on held-out energies.
//!
//! ```text
//! cargo run --example reconstruct_chain -- 6 17
//! ```

use effham::instance::{max_entry_error, roundtrip_in_window, probe_window, InstanceGenerator};

fn main() -> effham::Result<()> {
    let mut args = std::env::args().skip(1);
    let k: usize = args.next().and_then(|s| s.parse().ok()).unwrap_or(5);
    let seed: u64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(1);

    let truth = InstanceGenerator::new(seed).chain(k);
    let window = probe_window(&truth)?;
    let out = roundtrip_in_window(&truth, window, 0.05, 4)?;

    println!("K = {k}, window = [{:.3}, {:.3}]", window.0, window.1);
    println!("probes: {:.4?}", out.probes);
    for (i, (x, y)) in truth.a.iter().zip(&out.report.chain.a).enumerate() {
        println!("a_{i:<2} {x:+.12}  {y:+.12}");
    }
    for (i, (x, y)) in truth.rho.iter().zip(&out.report.chain.rho).enumerate() {
        println!("rho_{i:<2} {x:+.12}  {y:+.12}");
    }
    println!("max entry error {:.2e}", max_entry_error(&truth, &out.report.chain));
    println!("holdout residual {:.2e}", out.report.residual_max);
    println!("condition estimate {:.2e}", out.report.condition_estimate);
    Ok(())
}
