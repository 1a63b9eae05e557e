//! Two measured levels of an M = 2 model do not pin down the excluded
//! space: a G that matches at both levels but differs elsewhere rebuilds a
//! chain with the right two levels and a wrong third one.

use effham::toys::{m2_paradox, M2ToyInput, ParadoxSetup};
use effham::TridiagonalChain;

fn main() -> effham::Result<()> {
    let setup = ParadoxSetup {
        model: M2ToyInput { a: 1.0, b: 1.0, c: 1.0 },
        chain: TridiagonalChain::new(vec![0.0, 3.0], vec![1.0])?,
        epsilon: 0.5,
        third_probe: None,
    };
    let r = m2_paradox(&setup)?;
    println!("original spectrum {:.10?}", r.original_spectrum);
    for (e, (g, closed)) in r.measured.iter().zip(r.closed_form_check) {
        println!("E = {e:+.10}  G = {g:+.12}  BC/(A - E) = {closed:+.12}");
    }
    for g in [&r.lucky, &r.wrong] {
        println!(
            "{:5}: a = {:.6?} rho = {:.6?} spectrum {:.10?} mismatch {:.1e}",
            g.label, g.chain.a, g.chain.rho, g.spectrum, g.spectral_mismatch
        );
    }
    Ok(())
}
