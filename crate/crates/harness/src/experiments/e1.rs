//! Joint limit: the scheme against the continuum solution under refinement, once
//! with a fixed ratio `dt/dx` and once with the ratio changing from level to level.

use std::collections::BTreeSet;

use latwave::lattice::{refine_halving, LatticeSpec};
use latwave::leapfrog::{solve, Record};
use latwave::spectral::{Flavor, ReferenceSolution};

use super::{convergence_checks, cube_points, window_problem, Outcome, Tabulated};
use crate::compare::{compare_on_common_lattice, CommonGrid, Target, Window};
use crate::config::ExperimentConfig;
use crate::table::ErrorTable;
use crate::HarnessError;

/// Comparison times are `j·T/TIME_SLICES`.
pub const TIME_SLICES: u64 = 8;

/// Ratio used at level `l` of the varying family: `r − 0.2·2^{−l}`, approaching the
/// base ratio `r` from below (0.3, 0.4, 0.45, … for `r = 0.5`).
pub fn varying_ratio(base_ratio: f64, level: usize) -> f64 {
    base_ratio - 0.2 * 0.5f64.powi(level as i32)
}

/// Lattice at level `l` of the varying family: `dx = dx₀/2^l`, `dt` the largest step
/// not above `λ_l·dx` with `T/dt` a multiple of the slice count.
pub fn varying_spec(base: &LatticeSpec, level: usize) -> LatticeSpec {
    let dx = base.dx * 0.5f64.powi(level as i32);
    let lambda = varying_ratio(base.dt / base.dx, level);
    let slices = TIME_SLICES as f64;
    let steps = slices * (base.horizon / (slices * lambda * dx)).ceil();
    LatticeSpec {
        dx,
        dt: base.horizon / steps,
        ..*base
    }
}

pub fn fixed_family(base: &LatticeSpec, levels: usize) -> Result<Vec<LatticeSpec>, HarnessError> {
    let mut specs = vec![*base];
    if levels > 1 {
        specs.extend(refine_halving(base, levels - 1)?);
    }
    Ok(specs)
}

/// Sup and L2 error of the scheme on `spec` against tabulated oracle values.
pub(crate) fn level_error(
    cfg: &ExperimentConfig,
    spec: LatticeSpec,
    oracle: &Tabulated,
    grid: CommonGrid,
) -> Result<(f64, f64), HarnessError> {
    let d = &cfg.data;
    let problem = window_problem(spec, cfg.window, &d.f, &d.g, &d.w)?;
    let steps = spec.steps().ok_or(HarnessError::Config("horizon is not a multiple of dt".into()))? as i64;
    let per_slice = steps / TIME_SLICES as i64;
    let keep: BTreeSet<i64> = (0..=TIME_SLICES as i64).map(|j| j * per_slice).collect();
    let field = solve(&problem, &Record::Select(keep), 0, steps)?;
    let window = Window::cube(spec.n, cfg.window, 0.0, spec.horizon);
    let lookup = |x: &[f64], t: f64| oracle.get(x, t);
    let norms = compare_on_common_lattice(&field, Target::Oracle(&lookup), &window, Some(grid))?;
    Ok((norms.sup, norms.l2))
}

pub fn run(cfg: &ExperimentConfig) -> Result<Outcome, HarnessError> {
    let mut out = Outcome::new(cfg);
    let base = cfg.base_spec()?;
    base.require_admissible()?;
    let steps = base.steps().unwrap_or(0);
    if steps % TIME_SLICES != 0 {
        return Err(HarnessError::Config(format!("T/dt must be a multiple of {TIME_SLICES}")));
    }
    let n = cfg.n;
    let grid = CommonGrid {
        dx: base.dx,
        dt: base.horizon / TIME_SLICES as f64,
    };
    let reference = ReferenceSolution::auto(&cfg.data.f, &cfg.data.g, Flavor::Continuum, n, base.horizon, cfg.tolerances.oracle_tol)?;
    let xs = cube_points(n, cfg.window, base.dx);
    let ts: Vec<f64> = (0..=TIME_SLICES).map(|j| j as f64 * grid.dt).collect();
    let oracle = Tabulated::new(grid.dx, grid.dt, &xs, &ts, reference.eval_grid(&xs, &ts));
    out.note(format!(
        "oracle: continuum Fourier integral, tail bound {:.2e}, {} comparison points",
        reference.tail_bound().unwrap_or(f64::NAN),
        xs.len() * ts.len()
    ));

    let tol = &cfg.tolerances;
    let families: [(&str, Vec<LatticeSpec>); 2] = [
        ("fixed_ratio", fixed_family(&base, cfg.lattice.levels)?),
        ("varying_ratio", (0..cfg.lattice.levels).map(|l| varying_spec(&base, l)).collect()),
    ];
    let mut finals = Vec::new();
    for (label, specs) in families {
        let mut table = ErrorTable::new();
        for spec in specs {
            match level_error(cfg, spec, &oracle, grid) {
                Ok((sup, l2)) => table.push(spec.dx, spec.dt, sup, l2),
                Err(e) => {
                    out.failed(format!("{label}: level dx = {}", spec.dx), &e);
                    break;
                }
            }
        }
        convergence_checks(&mut out, label, &table, tol.order_min, tol.order_max);
        finals.push(table.last().map(|r| r.sup_error));
        out.tables.push((label.to_string(), table));
    }
    if let [Some(a), Some(b)] = finals[..] {
        let factor = if a == b { 1.0 } else { a.max(b) / a.min(b) };
        out.check(
            "ratio-free final errors",
            factor <= 4.0,
            format!("final sup errors {a:.3e} and {b:.3e} differ by a factor {factor:.3}"),
        );
    }
    Ok(out)
}
