//! Estimates the ergodic capacity of turbulent MIMO links at several
//! SNRs, next to the exact scalar no-fading reference.

use turbosim::channel::TurbulenceParams;
use turbosim::montecarlo::estimate_capacity;
use turbosim::signal::PowerNormalization;

fn main() {
    let turb = TurbulenceParams::new(4.0, 2.0).unwrap();
    println!("snr_db   1x1 exact   1x1 turb    2x2 turb");
    for snr_db in [0.0, 10.0, 20.0, 30.0] {
        let snr = 10f64.powf(snr_db / 10.0);
        let exact = (1.0 + snr).log2();
        let siso = estimate_capacity(
            Some(&turb), 1, 1, PowerNormalization::Total, snr, 20_000, 5,
        )
        .unwrap();
        let mimo = estimate_capacity(
            Some(&turb), 2, 2, PowerNormalization::Total, snr, 20_000, 5,
        )
        .unwrap();
        println!(
            "{snr_db:5.1}   {exact:8.4}   {:8.4}   {:8.4}",
            siso.mean_bits, mimo.mean_bits
        );
    }
}
