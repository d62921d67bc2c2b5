//! Zero-winding controls: diabolical points and isolated EP2s.

use nhtopo::model::ReferenceModel;
use nhtopo::topology::{winding_number_of, ParameterLoop, ReferenceField, WindingOptions};

fn main() -> nhtopo::Result<()> {
    let gamma = 1.0;
    let opts = WindingOptions::default();
    let cases = [
        ("DP2D around origin", ReferenceModel::Dp2d { omega_x: 0.0, omega_y: 0.0 }, (0.0, 0.0)),
        ("DP3D around origin", ReferenceModel::Dp3d { lambda1: 0.0, lambda2: 0.0 }, (0.0, 0.0)),
        (
            "EP2 qubit around J = +gamma/4",
            ReferenceModel::Ep2Qubit { j_x: 0.0, j_y: 0.0, gamma },
            (gamma / 4.0, 0.0),
        ),
        (
            "EP2 qubit around J = -gamma/4",
            ReferenceModel::Ep2Qubit { j_x: 0.0, j_y: 0.0, gamma },
            (-gamma / 4.0, 0.0),
        ),
    ];
    for (name, model, center) in cases {
        let field = ReferenceField { model };
        let w = winding_number_of(&ParameterLoop::circle(center, 1.0)?, &field, &opts)?;
        println!("{name:<32} W_raw = {:+.3e}, W = {}", w.raw, w.rounded);
    }
    Ok(())
}
