//! Second difference quotients of the scheme against second derivatives of the
//! continuum solution.

use std::collections::BTreeSet;

use latwave::leapfrog::{solve, Record};
use latwave::spectral::{Flavor, ReferenceSolution};
use latwave::stencils::{delta_t_second, discrete_laplacian};
use rayon::prelude::*;

use super::e1::{fixed_family, TIME_SLICES};
use super::{convergence_checks, cube_points, window_problem, Outcome};
use crate::config::ExperimentConfig;
use crate::table::ErrorTable;
use crate::HarnessError;

pub fn run(cfg: &ExperimentConfig) -> Result<Outcome, HarnessError> {
    let mut out = Outcome::new(cfg);
    let base = cfg.base_spec()?;
    let steps = base.steps().unwrap_or(0);
    if steps % TIME_SLICES != 0 {
        return Err(HarnessError::Config(format!("T/dt must be a multiple of {TIME_SLICES}")));
    }
    let n = cfg.n;
    let d = &cfg.data;
    let reference = ReferenceSolution::auto(&d.f, &d.g, Flavor::Continuum, n, base.horizon, cfg.tolerances.oracle_tol)?;
    let xs = cube_points(n, cfg.window, base.dx);
    let slice_dt = base.horizon / TIME_SLICES as f64;
    // interior slices only: the time quotient needs both neighbours inside [0, T]
    let slices: Vec<i64> = (1..TIME_SLICES as i64).collect();
    let samples: Vec<(usize, i64)> = (0..xs.len()).flat_map(|k| slices.iter().map(move |&j| (k, j))).collect();
    let exact: Vec<(f64, f64)> = samples
        .par_iter()
        .map(|&(k, j)| {
            let t = j as f64 * slice_dt;
            (reference.eval_derivative(&xs[k], t, 2, false), reference.eval_derivative(&xs[k], t, 0, true))
        })
        .collect();

    let mut tt_table = ErrorTable::new();
    let mut lap_table = ErrorTable::new();
    let vol = base.dx.powi(n as i32) * slice_dt;
    for spec in fixed_family(&base, cfg.lattice.levels)? {
        let problem = window_problem(spec, cfg.window, &d.f, &d.g, &d.w)?;
        let steps = spec.steps().unwrap_or(0) as i64;
        let per = steps / TIME_SLICES as i64;
        let keep: BTreeSet<i64> = slices.iter().flat_map(|j| [j * per - 1, j * per, j * per + 1]).collect();
        let field = match solve(&problem, &Record::Select(keep), 0, steps) {
            Ok(f) => f,
            Err(e) => {
                out.failed(format!("level dx = {}", spec.dx), &e.into());
                break;
            }
        };
        let cls = &problem.classification;
        let (mut tt_sup, mut tt_sq, mut lap_sup, mut lap_sq) = (0.0f64, 0.0, 0.0f64, 0.0);
        for (&(k, j), &(utt, lap)) in samples.iter().zip(&exact) {
            let i = cls.locate(&xs[k]).ok_or(HarnessError::NoCommonPoints)?;
            let p = j * per;
            let e1 = (delta_t_second(&field, i, p)? - utt).abs();
            let e2 = (discrete_laplacian(&field, i, p)? - lap).abs();
            tt_sup = tt_sup.max(e1);
            lap_sup = lap_sup.max(e2);
            tt_sq += e1 * e1;
            lap_sq += e2 * e2;
        }
        tt_table.push(spec.dx, spec.dt, tt_sup, (tt_sq * vol).sqrt());
        lap_table.push(spec.dx, spec.dt, lap_sup, (lap_sq * vol).sqrt());
    }
    let tol = &cfg.tolerances;
    convergence_checks(&mut out, "time second difference", &tt_table, tol.order_min, tol.order_max);
    convergence_checks(&mut out, "discrete laplacian", &lap_table, tol.order_min, tol.order_max);
    out.tables.push(("time_second_difference".into(), tt_table));
    out.tables.push(("laplacian".into(), lap_table));
    Ok(out)
}
