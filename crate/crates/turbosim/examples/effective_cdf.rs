//! Compares the empirical cdf of the effective channel radius with the
//! small-radius power law C_r^N r^(2N) / N! for one and two receive
//! apertures.

use num_complex::Complex64;
use turbosim::asymptotics::{cr_closed_form, effective_cdf};
use turbosim::channel::TurbulenceParams;
use turbosim::montecarlo::empirical_effective_cdf;

fn main() {
    let turb = TurbulenceParams::new(4.0, 2.0).unwrap();
    let cr = cr_closed_form(&turb).unwrap();
    let delta = [Complex64::new(2.0, 0.0), Complex64::new(2.0, 0.0)];
    let radii = [0.05, 0.1, 0.2];
    for n_rx in [1usize, 2] {
        println!("N = {n_rx}");
        let emp = empirical_effective_cdf(&turb, n_rx, &delta, &radii, 2_000_000, 11).unwrap();
        for (&r, &e) in radii.iter().zip(&emp) {
            let law = effective_cdf(r, n_rx as u32, &cr).unwrap();
            println!("  r = {r:4}: empirical {e:.4e}  power law {law:.4e}");
        }
    }
}
