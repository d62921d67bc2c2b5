//! Gap map of the three-mode chain and the arcs bounding the isofrequency region.

use nhtopo::spectra::{scan_spectral_map, trace_arcs, write_map_csv, ArcKind, GridSpec};

fn main() -> nhtopo::Result<()> {
    let kappa = 1.0;
    let grid = GridSpec {
        lambda1_min: 0.0,
        lambda1_max: 0.6,
        n_lambda1: 61,
        lambda2_min: 0.0,
        lambda2_max: 0.3,
        n_lambda2: 31,
    };
    let map = scan_spectral_map(kappa, &grid)?;
    let iso = map.iter().filter(|r| r.isofrequency).count();
    println!("{} grid points, {iso} in the isofrequency region", map.len());

    // the first few rows of the CSV
    let mut csv = Vec::new();
    write_map_csv(&mut csv, &map).expect("in-memory write");
    for line in String::from_utf8_lossy(&csv).lines().take(4) {
        println!("  {line}");
    }

    let arcs = trace_arcs(kappa, &grid)?;
    let ep2 = arcs.iter().filter(|p| p.kind == ArcKind::Ep2).count();
    println!("{ep2} EP2-line crossings, {} i-Fermi crossings", arcs.len() - ep2);
    if let Some(p) = arcs.iter().find(|p| p.kind == ArcKind::Ep2 && p.lambda2 == 0.0) {
        println!("EP2 line meets lambda2 = 0 at lambda1 = {:.6} (kappa/4 = {:.6})", p.lambda1, kappa / 4.0);
    }
    Ok(())
}
