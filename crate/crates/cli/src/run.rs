//! Executes a validated scenario and writes its CSV files.

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::thread;

use lindblad_speed::models::{angular_momentum_ops, husimi_on, phase_coherence_with};
use lindblad_speed::{
    build_affine, embed, evolve_affine, evolve_operator_with, gell_mann_basis, gradient_norm,
    gradient_operator, spectrum, speed_trace, DensityMatrix, Error, RkOptions, TimeGrid,
};

use crate::config::{Output, RunSpec, Scenario};

#[derive(Debug)]
pub enum Failure {
    /// The computation itself failed or produced an unphysical state.
    Numerical(String),
    Io(String),
}

/// Files written, plus a positivity warning per run that left the cone.
#[derive(Debug, Default)]
pub struct Report {
    pub files: Vec<PathBuf>,
    pub violations: Vec<String>,
}

fn numerical(label: &str) -> impl Fn(Error) -> Failure + '_ {
    move |e| {
        let which = if label.is_empty() { String::new() } else { format!(" ({})", &label[1..]) };
        Failure::Numerical(format!("{e}{which}"))
    }
}

fn io_failure(path: &Path) -> impl Fn(io::Error) -> Failure + '_ {
    move |e| Failure::Io(format!("{}: {e}", path.display()))
}

/// Seventeen significant digits.
fn num(x: f64) -> String {
    format!("{x:.16e}")
}

/// Writes through a temporary file in the same directory and renames it
/// into place.
fn write_atomic(path: &Path, contents: &str) -> Result<(), Failure> {
    let name = path.file_name().and_then(|n| n.to_str()).unwrap_or("out");
    let tmp = path.with_file_name(format!(".{name}.tmp{}", std::process::id()));
    fs::write(&tmp, contents).map_err(io_failure(&tmp))?;
    fs::rename(&tmp, path).map_err(io_failure(path))
}

/// Runs every trajectory of the scenario, sweep values in parallel.
pub fn execute(s: &Scenario) -> Result<Report, Failure> {
    fs::create_dir_all(&s.output_dir).map_err(io_failure(&s.output_dir))?;
    let results: Vec<Result<Report, Failure>> = thread::scope(|scope| {
        let handles: Vec<_> = s
            .runs
            .iter()
            .map(|run| scope.spawn(move || execute_one(s, run)))
            .collect();
        handles
            .into_iter()
            .map(|h| {
                h.join()
                    .unwrap_or_else(|_| Err(Failure::Numerical("worker thread panicked".into())))
            })
            .collect()
    });
    let mut report = Report::default();
    for r in results {
        let r = r?;
        report.files.extend(r.files);
        report.violations.extend(r.violations);
    }
    Ok(report)
}

fn execute_one(s: &Scenario, run: &RunSpec) -> Result<Report, Failure> {
    let err = numerical(&run.label);
    let n = run.model.dim();
    let grid = TimeGrid::new(s.t_start, s.t_end, s.n_samples).map_err(&err)?;
    let times = grid.times();
    let needs_basis = s.backend.uses_affine(n)
        || s.outputs.iter().any(|o| matches!(o, Output::Spectrum | Output::Navigate | Output::Trajectory));
    let basis = if needs_basis {
        Some(gell_mann_basis::<f64>(n).map_err(&err)?)
    } else {
        None
    };

    let mut report = Report::default();
    let mut affine = None;
    let states: Vec<DensityMatrix<f64>> = if s.backend.uses_affine(n) {
        let basis = basis.as_ref().expect("basis built for the affine backend");
        let gen = build_affine(&run.model, basis).map_err(&err)?;
        let r0 = embed(&run.rho0, basis).map_err(&err)?;
        let traj = evolve_affine(&gen, &r0, &grid).map_err(&err)?;
        affine = Some(gen);
        traj.density_matrices(basis).map_err(&err)?
    } else {
        let mut opts = RkOptions::default();
        if let Some(m) = s.max_step_norm {
            opts.max_step_norm = m;
        }
        let traj = evolve_operator_with(&run.model, &run.rho0, &grid, &opts).map_err(&err)?;
        if let Some(v) = traj.positivity_violation() {
            report.violations.push(format!(
                "state left the positive cone at sample {} (t = {}), minimum eigenvalue {:e}{}",
                v.sample,
                v.time,
                v.min_eigenvalue,
                if run.label.is_empty() { String::new() } else { format!(" ({})", &run.label[1..]) }
            ));
        }
        traj.density_states().expect("operator backend keeps matrices").to_vec()
    };

    let file = |stem: &str| s.output_dir.join(format!("{stem}{}.csv", run.label));
    let mut emit = |path: PathBuf, contents: String| -> Result<(), Failure> {
        write_atomic(&path, &contents)?;
        report.files.push(path);
        Ok(())
    };

    if s.wants(Output::Speed) {
        let samples = speed_trace(&run.model, &times, &states).map_err(&err)?;
        let coherence = match run.n_particles {
            Some(np) => {
                let ops = angular_momentum_ops::<f64>(np).map_err(&err)?;
                let mut out = Vec::with_capacity(states.len());
                for rho in &states {
                    out.push(match phase_coherence_with(rho, &ops) {
                        Ok(c) => c,
                        Err(Error::CoherenceUndefined { .. }) => f64::NAN,
                        Err(e) => return Err(err(e)),
                    });
                }
                Some(out)
            }
            None => None,
        };
        let mut csv = String::from("t,v,v2_unitary,v2_cross,v2_dissipative,v_radial_signed,v_tangential,purity");
        csv.push_str(if coherence.is_some() { ",coherence\n" } else { "\n" });
        for (k, sm) in samples.iter().enumerate() {
            let fields = [
                sm.t,
                sm.v(),
                sm.term_unitary,
                sm.term_cross,
                sm.term_dissipative,
                sm.v_radial_signed,
                sm.v_tangential,
                sm.purity,
            ];
            let mut row: Vec<String> = fields.iter().map(|&x| num(x)).collect();
            if let Some(c) = &coherence {
                row.push(num(c[k]));
            }
            csv.push_str(&row.join(","));
            csv.push('\n');
        }
        emit(file("speed"), csv)?;
    }

    if s.wants(Output::Spectrum) {
        let basis = basis.as_ref().expect("basis built for spectrum");
        let gen = match affine.take() {
            Some(g) => g,
            None => build_affine(&run.model, basis).map_err(&err)?,
        };
        let eigs = spectrum(&gen).map_err(&err)?;
        let mut csv = String::from("re,im\n");
        for z in eigs {
            let _ = writeln!(csv, "{},{}", num(z.re), num(z.im));
        }
        emit(file("spectrum"), csv)?;
    }

    if s.wants(Output::Trajectory) {
        let basis = basis.as_ref().expect("basis built for trajectory");
        let mut csv = String::from("t");
        for k in 1..n * n {
            let _ = write!(csv, ",r{k}");
        }
        csv.push('\n');
        for (t, rho) in times.iter().zip(&states) {
            let r = lindblad_speed::bloch::embed_traceless(rho.matrix(), basis).map_err(&err)?;
            csv.push_str(&num(*t));
            for x in r {
                csv.push(',');
                csv.push_str(&num(x));
            }
            csv.push('\n');
        }
        emit(file("trajectory"), csv)?;
    }

    if s.wants(Output::Navigate) {
        let basis = basis.as_ref().expect("basis built for navigation");
        let g = gradient_operator(&run.model, &run.rho0).map_err(&err)?;
        let coefficients: Vec<f64> = basis
            .trace_free()
            .iter()
            .map(|sigma| sigma.matrix().trace_of_product(g.matrix()).re)
            .collect();
        let norm = coefficients.iter().map(|c| c * c).sum::<f64>().sqrt();
        let mut csv = String::from("basis_index,coefficient\n");
        for (j, c) in coefficients.iter().enumerate() {
            let _ = writeln!(csv, "{},{}", j + 1, num(*c));
        }
        let _ = writeln!(csv, "norm,{}", num(norm));
        emit(file("navigate"), csv)?;
    }

    if s.navigate_path {
        let mut csv = String::from("t,delta_v2_max\n");
        for (t, rho) in times.iter().zip(&states) {
            let c = gradient_norm(&run.model, rho).map_err(&err)?;
            let _ = writeln!(csv, "{},{}", num(*t), num(c));
        }
        emit(file("navigate_heuristic"), csv)?;
    }

    if s.wants(Output::Husimi) {
        for &t in &s.husimi_times {
            let k = ((t - s.t_start) / grid.spacing()).round() as usize;
            let k = k.min(states.len() - 1);
            let q = husimi_on(&states[k], &s.husimi_spec).map_err(&err)?;
            let mut csv = String::from("theta,phi,q\n");
            for (th, ph, v) in q.rows() {
                let _ = writeln!(csv, "{},{},{}", num(th), num(ph), num(v));
            }
            emit(s.output_dir.join(format!("husimi_t{t}{}.csv", run.label)), csv)?;
        }
    }

    Ok(report)
}
