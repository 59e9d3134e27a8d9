//! Simulates a short BER-vs-SNR sweep for a 2x2 spatially multiplexed
//! BPSK link through Gamma-Gamma turbulence and prints the points with
//! their 95% confidence intervals.

use turbosim::channel::TurbulenceParams;
use turbosim::montecarlo::{simulate_ber, McOptions};
use turbosim::signal::{
    build_constellation, ModulationKind, PowerNormalization, SchemeConfig, SchemeKind,
};

fn main() {
    let turb = TurbulenceParams::new(4.0, 2.0).unwrap();
    let scheme = SchemeConfig::new(
        SchemeKind::Vblast,
        2,
        2,
        build_constellation(ModulationKind::Psk, 2).unwrap(),
        PowerNormalization::PerAntenna,
    )
    .unwrap();
    let opts = McOptions { min_bit_errors: 200, max_trials: 500_000, ..McOptions::default() };
    let grid = [0.0, 4.0, 8.0, 12.0, 16.0];
    let curve = simulate_ber(&scheme, &turb, &grid, 1, 0, &opts).unwrap();
    println!("snr_db    trials      errors  ber         95% interval");
    for p in &curve.points {
        println!(
            "{:5.1}  {:9}  {:9}  {:.3e}  [{:.3e}, {:.3e}]",
            p.snr_db, p.trials, p.bit_errors, p.ber, p.ci95.0, p.ci95.1
        );
    }
}
