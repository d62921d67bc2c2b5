use std::f64::consts::TAU;

use num_complex::Complex64;

use super::config::*;
use super::loops::parse_loop_spec;
use super::output::{Cell, Table};
use crate::analysis::{
    extract_eigenenergies, fit_symmetric_parametrization, pairwise_concurrence, reduced_two_mode_state,
    wootters_concurrence, ExtractionRow, DEFAULT_RE_TOL, EXTRACTION_CSV_HEADER,
};
use crate::dynamics::{
    evolve_modulated_with, evolve_nh_with, population_rms, stabilization_metrics, ExperimentalSetup, Resonance,
    TimeTrace, DEFAULT_DT,
};
use crate::error::{Error, Result};
use crate::model::{build_chain_hamiltonian, ChainParams, ReferenceModel};
use crate::spectra::{
    chain_eigenvectors, eigenvalues_closed_form, eigenvector_for, locate_ep3, scan_spectral_map_with_tol,
    trace_arcs, GridSpec, DEFAULT_FLAG_TOL, MAP_CSV_HEADER,
};
use crate::state::StateVector;
use crate::topology::{
    winding_number_of, ChainField, ReferenceField, ResultantField, WindingOptions, WINDING_CSV_HEADER,
};

/// Result of one command: the summary line and the data rows.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub summary: String,
    pub table: Table,
}

/// Executes `config` without writing anything.
pub fn execute(config: &RunConfig) -> Result<Report> {
    config.validate()?;
    let scale = if config.mhz2pi { TAU } else { 1.0 };
    let mut report = match &config.operation {
        Operation::Spectrum(a) => spectrum(a, scale),
        Operation::Eps(a) => eps(a, scale),
        Operation::Winding(a) => winding(a, scale, config.output_path.is_some()),
        Operation::Evolve(a) => evolve(a, scale),
        Operation::Modulated(a) => modulated(a, scale),
        Operation::Extract(a) => extract(a, scale),
        Operation::Concurrence(a) => concurrence(a, scale),
        Operation::Arcs(a) => arcs(a, scale),
    }?;
    if config.mhz2pi {
        report.summary = format!("[inputs x 2pi: MHz -> 1/us] {}", report.summary);
    }
    Ok(report)
}

fn grid_spec(g: &GridArgs, kappa: f64, scale: f64) -> Result<GridSpec> {
    let span = if kappa > 0.0 { 2.0 * kappa } else { 1.0 };
    let grid = GridSpec {
        lambda1_min: g.lambda1_min.map_or(0.0, |x| x * scale),
        lambda1_max: g.lambda1_max.map_or(span, |x| x * scale),
        n_lambda1: g.n_lambda1.unwrap_or(101),
        lambda2_min: g.lambda2_min.map_or(0.0, |x| x * scale),
        lambda2_max: g.lambda2_max.map_or(span, |x| x * scale),
        n_lambda2: g.n_lambda2.unwrap_or(101),
    };
    grid.validate()?;
    Ok(grid)
}

fn check_kappa(kappa: f64) -> Result<f64> {
    if kappa >= 0.0 && kappa.is_finite() {
        Ok(kappa)
    } else {
        Err(Error::InvalidParams(format!("kappa must be finite and non-negative, got {kappa}")))
    }
}

fn spectrum(a: &SpectrumArgs, scale: f64) -> Result<Report> {
    let kappa = check_kappa(a.kappa * scale)?;
    let grid = grid_spec(&a.grid, kappa, scale)?;
    let records = scan_spectral_map_with_tol(kappa, &grid, a.flag_tol.unwrap_or(DEFAULT_FLAG_TOL))?;
    let mut table = Table::new(MAP_CSV_HEADER);
    for r in &records {
        table.push(vec![
            r.lambda1.into(),
            r.lambda2.into(),
            r.max_re_gap.into(),
            r.max_im_gap.into(),
            r.min_gap.into(),
            r.isofrequency.into(),
            r.ifermi.into(),
        ]);
    }
    let iso = records.iter().filter(|r| r.isofrequency).count();
    let ifermi = records.iter().filter(|r| r.ifermi).count();
    Ok(Report {
        summary: format!("points={}, isofrequency={iso}, ifermi={ifermi}", records.len()),
        table,
    })
}

fn eps(a: &EpsArgs, scale: f64) -> Result<Report> {
    let kappa = a.kappa * scale;
    let points = locate_ep3(kappa)?;
    let mut table = Table::new("lambda1,lambda2,re_E,im_E,max_gap");
    let mut coords = Vec::new();
    let mut energy = Complex64::new(0.0, 0.0);
    for &(l1, l2) in &points {
        let spectrum = eigenvalues_closed_form(l1, l2, kappa);
        let mean = spectrum.sum() / 3.0;
        energy = mean;
        table.push(vec![l1.into(), l2.into(), mean.re.into(), mean.im.into(), spectrum.max_gap().into()]);
        coords.push(format!("({l1:.6}, {l2:.6})"));
    }
    Ok(Report {
        summary: format!("EP3 at {}, E={:.6}i", coords.join(" "), energy.im),
        table,
    })
}

fn winding(a: &WindingArgs, scale: f64, record: bool) -> Result<Report> {
    let mut lp = parse_loop_spec(&a.loop_spec, scale)?;
    if a.reverse {
        lp = lp.reversed();
    }
    let model = a.model.unwrap_or_default();
    let need = |name: &str, x: Option<f64>| {
        x.map(|x| x * scale)
            .ok_or_else(|| Error::InvalidParams(format!("--{name} is required for the {model:?} model")))
    };
    let field: Box<dyn ResultantField> = match model {
        FieldModel::Chain => Box::new(ChainField {
            kappa: check_kappa(need("kappa", a.kappa)?)?,
        }),
        FieldModel::Dp2d => Box::new(ReferenceField {
            model: ReferenceModel::Dp2d { omega_x: 0.0, omega_y: 0.0 },
        }),
        FieldModel::Dp3d => Box::new(ReferenceField {
            model: ReferenceModel::Dp3d { lambda1: 0.0, lambda2: 0.0 },
        }),
        FieldModel::Ep2qubit => Box::new(ReferenceField {
            model: ReferenceModel::Ep2Qubit {
                j_x: 0.0,
                j_y: 0.0,
                gamma: need("gamma", a.gamma)?,
            },
        }),
    };
    let mut opts = WindingOptions {
        record_trace: record,
        ..WindingOptions::default()
    };
    if let Some(n) = a.samples_per_edge {
        if n == 0 {
            return Err(Error::InvalidParams("samples_per_edge must be positive".into()));
        }
        opts.samples_per_edge = n;
    }
    let w = winding_number_of(&lp, field.as_ref(), &opts)?;
    let mut table = Table::new(WINDING_CSV_HEADER);
    for s in &w.trace {
        table.push(vec![
            s.s.into(),
            s.lambda1.into(),
            s.lambda2.into(),
            s.r1_normalized.into(),
            s.r2_normalized.into(),
            s.phase_unwrapped.into(),
        ]);
    }
    Ok(Report {
        summary: format!("W_raw={:.9}, W={}, samples={}", w.raw, w.rounded, w.samples),
        table,
    })
}

fn trace_table(trace: &TimeTrace) -> Table {
    let mut table = Table::new(&trace.csv_header());
    for k in 0..trace.len() {
        let mut row: Vec<Cell> = vec![trace.times[k].into()];
        for c in trace.states[k].amplitudes() {
            row.push(c.re.into());
            row.push(c.im.into());
        }
        row.push(trace.norms[k].into());
        row.extend(trace.populations[k].iter().map(|&p| Cell::from(p)));
        table.push(row);
    }
    table
}

fn mode_index(mode: usize, n: usize, what: &str) -> Result<usize> {
    if (1..=n).contains(&mode) {
        Ok(mode - 1)
    } else {
        Err(Error::InvalidParams(format!("{what} must be a mode between 1 and {n}, got {mode}")))
    }
}

fn evolve(a: &EvolveArgs, scale: f64) -> Result<Report> {
    let kappa = a.kappa * scale;
    let l1 = a.lambda1 * scale;
    let params = match a.lambda2 {
        Some(l2) => ChainParams::three_mode(l1, l2 * scale, kappa)?,
        None => ChainParams::two_mode(l1, kappa)?,
    };
    let n = params.n_modes();
    let initial = mode_index(a.initial.unwrap_or(2), n, "initial")?;
    let h = build_chain_hamiltonian(&params);
    let trace = evolve_nh_with(
        &h,
        &StateVector::basis(n, initial),
        a.dt.unwrap_or(DEFAULT_DT),
        a.t_final.unwrap_or(2.0),
        a.stride.unwrap_or(10),
    )?;
    let last = trace.len() - 1;
    let pops: Vec<String> = trace.populations[last].iter().map(|p| format!("{p:.6}")).collect();
    let mut summary = format!(
        "t={:.6}, norm2={:.6e}, p=({})",
        trace.times[last],
        trace.norms[last],
        pops.join(", ")
    );
    if let (Some(l2), true) = (a.lambda2, kappa > 0.0) {
        if let Ok((spectrum, vecs)) = chain_eigenvectors(l1, l2 * scale, kappa) {
            let states: Vec<StateVector> = vecs.into_iter().map(|v| v.state).collect();
            let report = stabilization_metrics(&trace, &spectrum, &states)?;
            match (report.dominant, report.time_to_threshold) {
                (Some(d), Some(t)) => summary += &format!(", dominant={}, t_0.99={t:.6}", d + 1),
                (Some(d), None) => {
                    let best = report.dominant_fidelity().unwrap_or(&[]).iter().copied().fold(0.0, f64::max);
                    summary += &format!(", dominant={}, max_fidelity={best:.6}", d + 1);
                }
                _ => summary += ", no dominant eigenvector",
            }
        }
    }
    Ok(Report {
        summary,
        table: trace_table(&trace),
    })
}

fn modulated(a: &ModulatedArgs, scale: f64) -> Result<Report> {
    let setup = ExperimentalSetup::reference();
    let (d1, d2) = ExperimentalSetup::reference_couplings();
    let l1 = a.lambda1.map_or(d1, |x| x * scale);
    let l2 = a.lambda2.map_or(d2, |x| x * scale);
    let resonance: Resonance = a.resonance.unwrap_or(ResonanceArg::Dressed).into();
    let cfg = setup.modulation_for(l1, l2, resonance)?;
    let (mu1, mu2) = cfg.indices()?;
    let t_final = a.t_final.unwrap_or(1.0);
    let dt = a.dt.unwrap_or_else(|| cfg.max_dt());
    let output_dt = a.output_dt.unwrap_or(DEFAULT_DT);
    if !(output_dt > 0.0 && output_dt.is_finite()) {
        return Err(Error::InvalidParams(format!("output_dt must be positive, got {output_dt}")));
    }
    let stride = (output_dt / dt).round().max(1.0) as usize;
    let psi0 = StateVector::basis(3, 1);
    let full = evolve_modulated_with(&cfg, &psi0, dt, t_final, stride)?;
    let h = build_chain_hamiltonian(&ChainParams::three_mode(l1, l2, setup.kappa)?);
    let effective = evolve_nh_with(&h, &psi0, DEFAULT_DT, t_final, 1)?;
    let rms = population_rms(&effective, &full)?;
    Ok(Report {
        summary: format!(
            "nu=({:.6}, {:.6}) /us, mu=({mu1:.6}, {mu2:.6}), rms={rms:.6}",
            cfg.nu1, cfg.nu2
        ),
        table: trace_table(&full),
    })
}

fn extract(a: &ExtractArgs, scale: f64) -> Result<Report> {
    let kappa = check_kappa(a.kappa * scale)?;
    if a.points.is_empty() {
        return Err(Error::InvalidParams("at least one --point is required".into()));
    }
    let component = mode_index(a.component.unwrap_or(2), 3, "component")?;
    let re_tol = a.re_tol.unwrap_or(DEFAULT_RE_TOL) * kappa;
    let mut rows = Vec::with_capacity(a.points.len());
    for p in &a.points {
        let (l1, l2) = (p[0] * scale, p[1] * scale);
        let h = build_chain_hamiltonian(&ChainParams::three_mode(l1, l2, kappa)?);
        let trace = evolve_nh_with(
            &h,
            &StateVector::basis(3, 1),
            a.dt.unwrap_or(DEFAULT_DT),
            a.t_final.unwrap_or(4.0),
            a.stride.unwrap_or(20),
        )?;
        let energies = extract_eigenenergies(&trace, component, 3)?;
        let fit = fit_symmetric_parametrization(&energies, re_tol).ok();
        rows.push(ExtractionRow {
            lambda1: l1,
            lambda2: l2,
            energies,
            fit,
        });
    }
    let mut table = Table::new(EXTRACTION_CSV_HEADER);
    for row in &rows {
        let mut cells: Vec<Cell> = vec![row.lambda1.into(), row.lambda2.into()];
        for k in 0..3 {
            let e = row.energies.get(k);
            cells.push(e.map(|e| e.re).into());
            cells.push(e.map(|e| e.im).into());
        }
        let f = row.fit.as_ref();
        cells.extend([
            f.map(|f| f.r).into(),
            f.map(|f| f.i1).into(),
            f.map(|f| f.i2).into(),
            f.map(|f| f.residual).into(),
        ]);
        table.push(cells);
    }
    let fitted = rows.iter().filter(|r| r.fit.is_some()).count();
    Ok(Report {
        summary: format!("points={}, symmetric fits={fitted}", rows.len()),
        table,
    })
}

fn concurrence(a: &ConcurrenceArgs, scale: f64) -> Result<Report> {
    let kappa = a.kappa * scale;
    let (l1, l2) = match (a.lambda1, a.lambda2) {
        (Some(l1), Some(l2)) => (l1 * scale, l2 * scale),
        _ => locate_ep3(kappa)?[0],
    };
    let h = build_chain_hamiltonian(&ChainParams::three_mode(l1, l2, kappa)?);
    let spectrum = eigenvalues_closed_form(l1, l2, kappa);
    let mut table = Table::new("eigenvector,re_E,im_E,pair,concurrence,wootters");
    let mut first = Vec::new();
    for (n, &e) in spectrum.energies().iter().enumerate() {
        let psi = eigenvector_for(&h, e)?.state.normalized();
        for (i, j) in [(0, 1), (0, 2), (1, 2)] {
            let closed = pairwise_concurrence(&psi, (i, j))?;
            let general = wootters_concurrence(&reduced_two_mode_state(&psi, (i, j))?)?;
            let pair = format!("{}{}", i + 1, j + 1);
            if n == 0 {
                first.push(format!("C{pair}={closed:.9}"));
            }
            table.push(vec![(n + 1).into(), e.re.into(), e.im.into(), pair.as_str().into(), closed.into(), general.into()]);
        }
    }
    Ok(Report {
        summary: format!("at ({l1:.6}, {l2:.6}): {}", first.join(", ")),
        table,
    })
}

fn arcs(a: &ArcsArgs, scale: f64) -> Result<Report> {
    let kappa = check_kappa(a.kappa * scale)?;
    let grid = grid_spec(&a.grid, kappa, scale)?;
    let points = trace_arcs(kappa, &grid)?;
    let mut table = Table::new("lambda1,lambda2,kind");
    for p in &points {
        table.push(vec![p.lambda1.into(), p.lambda2.into(), p.kind.as_str().into()]);
    }
    let ep2 = points.iter().filter(|p| p.kind.as_str() == "ep2").count();
    Ok(Report {
        summary: format!("ep2 points={ep2}, ifermi points={}", points.len() - ep2),
        table,
    })
}
