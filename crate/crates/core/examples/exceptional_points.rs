//! Locating the EP3s and classifying degenerate points.

use nhtopo::spectra::{chain_eigenvectors, classify_point, eigenvalues_closed_form, locate_ep3, DEFAULT_GAP_TOL};

fn main() -> nhtopo::Result<()> {
    let kappa = 1.0;
    let points = locate_ep3(kappa)?;
    for (l1, l2) in points {
        println!("EP3 at ({l1:+.9}, {l2:+.9})");
    }
    let (l1, l2) = points[0];
    for e in eigenvalues_closed_form(l1, l2, kappa).energies() {
        println!("  E = {:+.3e} {:+.9}i   (-kappa/6 = {:.9})", e.re, e.im, -kappa / 6.0);
    }
    let (_, vectors) = chain_eigenvectors(l1, l2, kappa)?;
    println!("  eigenvector defective: {}", vectors[0].defective);

    let tol = DEFAULT_GAP_TOL * kappa;
    for (name, (a, b, k)) in [
        ("EP3", (l1, l2, kappa)),
        ("EP2 on the lambda2 = 0 axis", (kappa / 4.0, 0.0, kappa)),
        ("lossless origin", (0.0, 0.0, 0.0)),
        ("generic point", (0.7, 0.4, kappa)),
    ] {
        let c = classify_point(a, b, k, tol)?;
        println!("{name:<28} -> {} (min gap {:.2e})", c.kind.as_str(), c.min_gap);
    }
    Ok(())
}
