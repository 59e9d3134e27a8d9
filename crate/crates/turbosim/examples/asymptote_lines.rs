//! Prints the high-SNR BER asymptote coefficient and sampled line values
//! for one, two, and three receive apertures.

use turbosim::asymptotics::{ber_asymptote, cr_closed_form};
use turbosim::channel::TurbulenceParams;

fn main() {
    let turb = TurbulenceParams::new(4.0, 2.0).unwrap();
    let cr = cr_closed_form(&turb).unwrap();
    println!("radius coefficient C_r = {:.12}", cr.value);
    for n_rx in [1u32, 2, 3] {
        let model = ber_asymptote(&cr, n_rx).unwrap();
        println!(
            "N = {n_rx}: coefficient {:.6e}, slope -{}, BER 1e-4 at {:.2} dB",
            model.coefficient,
            model.slope,
            10.0 * model.snr_at(1e-4).log10()
        );
        for snr_db in [10.0, 20.0, 30.0] {
            println!("    {snr_db:4.0} dB -> {:.3e}", model.evaluate_db(snr_db));
        }
    }
}
