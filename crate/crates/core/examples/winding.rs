//! Winding of the resultant vector around the EP3 of a κ = 5 chain.

use std::f64::consts::TAU;

use nhtopo::spectra::locate_ep3;
use nhtopo::topology::{winding_number, winding_number_integral, ChainField, ParameterLoop, WindingOptions};

fn main() -> nhtopo::Result<()> {
    let kappa = 5.0;
    let opts = WindingOptions::default();

    let square = ParameterLoop::square(TAU)?;
    for lp in [square.clone(), square.clone().reversed()] {
        let w = winding_number(&lp, kappa, &opts)?;
        println!("{:?} square: W_raw = {:.12}, W = {}, {} samples", lp.orientation, w.raw, w.rounded, w.samples);
    }
    let theta = ParameterLoop::parametric_theta(TAU, 2048)?;
    println!("theta-parametrized square: W = {}", winding_number(&theta, kappa, &opts)?.rounded);
    let integral = winding_number_integral(&square, &ChainField { kappa }, &opts)?;
    println!("quadrature cross-check: {:.9}", integral.raw);

    // small loops: one around the EP3, one beside it
    let (x, y) = locate_ep3(kappa)?[0];
    let around = ParameterLoop::circle((x, y), 0.1)?;
    let beside = ParameterLoop::circle((x + 1.0, y + 1.0), 0.1)?;
    println!("circle around EP3: W = {}", winding_number(&around, kappa, &opts)?.rounded);
    println!("circle beside EP3: W = {}", winding_number(&beside, kappa, &opts)?.rounded);

    let through = ParameterLoop::polyline(vec![(0.0, 0.0), (x, y), (3.0, 3.0), (0.0, 3.0), (0.0, 0.0)])?;
    match winding_number(&through, kappa, &opts) {
        Ok(w) => println!("loop through EP3 unexpectedly gave {}", w.raw),
        Err(e) => println!("loop through EP3: {e}"),
    }
    Ok(())
}
