//! Estimates the pairwise error probability of the all-flipped BPSK
//! codeword pair two ways (direct decision events and channel-conditional
//! Gaussian tails) and compares both against the high-SNR asymptote.

use num_complex::Complex64;
use turbosim::asymptotics::{cr_closed_form, pep_asymptote};
use turbosim::channel::TurbulenceParams;
use turbosim::montecarlo::{estimate_pep_conditional, estimate_pep_direct};

fn main() {
    let turb = TurbulenceParams::new(4.0, 2.0).unwrap();
    let cr = cr_closed_form(&turb).unwrap();
    let delta = [Complex64::new(2.0, 0.0), Complex64::new(2.0, 0.0)];
    println!("snr_db   direct       conditional  asymptote");
    for snr_db in [6.0, 10.0, 14.0] {
        let snr = 10f64.powf(snr_db / 10.0);
        let direct = estimate_pep_direct(&turb, 2, &delta, snr, 500_000, 3).unwrap();
        let cond = estimate_pep_conditional(&turb, 2, &delta, snr, 200_000, 4).unwrap();
        let line = pep_asymptote(&cr, 2, snr).unwrap();
        println!(
            "{snr_db:5.1}   {:.4e}   {:.4e}   {:.4e}",
            direct.probability, cond.probability, line
        );
    }
}
