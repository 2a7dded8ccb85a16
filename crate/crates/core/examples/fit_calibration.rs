//! Regenerates the shipped crosstalk calibration.
//!
//! The pass loss anchors to the MR through loss; the homodyne leak fraction
//! and Lorentzian scale are then fitted so the bank feasibility scans cut
//! off at 20 coherent MRs and 18 non-coherent wavelengths (36 MRs, 1550 nm
//! start, 1 nm spacing) under a 21.3 dB SNR requirement.
//!
//! Usage: cargo run -p ghost-core --example fit_calibration > calibration.json

use ghost_core::photonics::{fit_calibration, LossTable};

fn main() {
    let model = fit_calibration(&LossTable::default(), 3100.0, 21.3, 20, 1550.0, 1.0, 18)
        .expect("calibration fit");
    println!("{}", model.to_json());
}
