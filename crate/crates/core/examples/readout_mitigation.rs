//! Calibrate a two-qubit readout channel and undo it on a known distribution.

use pwcovo::vqe::{calibrate, mitigate_probabilities, rng_for, Mode, NoiseModel};

fn main() -> pwcovo::Result<()> {
    let noise = NoiseModel::from_flips([0.03, 0.05], 0.0, 0.0);
    let a = noise.readout_matrix();
    let truth = [0.6, 0.1, 0.05, 0.25];
    let measured = a * nalgebra::Vector4::from_column_slice(&truth);
    let measured = [measured[0], measured[1], measured[2], measured[3]];
    println!("true     {truth:?}");
    println!("measured {measured:.4?}");

    let exact = calibrate(&noise, Mode::Exact, &mut rng_for(1, 0));
    println!("exact calibration  -> {:.6?}", mitigate_probabilities(&measured, &exact)?);
    for shots in [200, 2000, 20000] {
        let cal = calibrate(&noise, Mode::Shots(shots), &mut rng_for(1, 0));
        println!("{shots:5} shots/state -> {:.4?}", mitigate_probabilities(&measured, &cal)?);
    }
    Ok(())
}
