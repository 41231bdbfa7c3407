//! CFL violation: a checkerboard seed blows up when `dt/dx = 1.05/√n`, stays
//! bounded at `1/√n`, and refining `dx` at fixed `dt` diverges.

use latwave::dispersion::{arcsin_argument, beta, DispersionError};
use latwave::lattice::LatticeSpec;
use latwave::leapfrog::{bootstrap, step, Direction, LeapfrogError};
use latwave::spectral::{DataFunction, Flavor, Forcing, ReferenceSolution};

use super::{cube_points, window_problem, Outcome};
use crate::config::ExperimentConfig;
use crate::table::ErrorTable;
use crate::HarnessError;

/// Result of running forward to the horizon.
#[derive(Debug, Clone, PartialEq)]
pub enum RunStatus {
    Bounded { max_sup: f64, final_level: Vec<f64> },
    Blowup { level: i64, time: f64, sup: f64 },
}

/// Steps forward to `T` keeping three levels, tracking the largest sup-norm.
pub fn run_forward(
    spec: LatticeSpec,
    half: f64,
    f: &DataFunction,
    g: &DataFunction,
) -> Result<(RunStatus, f64, latwave::leapfrog::DiscreteProblem), HarnessError> {
    let mut problem = window_problem(spec, half, f, g, &Forcing::Zero)?;
    problem.enforce_cfl = false;
    let steps = spec.steps().ok_or(HarnessError::Config("horizon is not a multiple of dt".into()))? as i64;
    let mut field = bootstrap(&problem)?;
    field.remove_level(-1);
    let initial = field.sup_norm(0)?;
    let mut max_sup = initial.max(field.sup_norm(1)?);
    for p in 1..steps {
        match step(&problem, &mut field, Direction::Forward) {
            Ok(q) => {
                max_sup = max_sup.max(field.sup_norm(q)?);
                field.remove_level(q - 2);
            }
            Err(LeapfrogError::BlowupDetected { level, time, sup }) => {
                return Ok((RunStatus::Blowup { level, time, sup }, initial, problem));
            }
            Err(e) => return Err(e.into()),
        }
        debug_assert!(field.has_level(p + 1));
    }
    let final_level = field.level(steps)?.to_vec();
    Ok((RunStatus::Bounded { max_sup, final_level }, initial, problem))
}

pub fn run(cfg: &ExperimentConfig) -> Result<Outcome, HarnessError> {
    let mut out = Outcome::new(cfg);
    let n = cfg.n;
    let (dx, dt, t_end) = (cfg.lattice.dx, cfg.lattice.dt, cfg.lattice.horizon);
    let seed = &cfg.data.f;
    let alpha = match seed {
        DataFunction::SeparableCosine { alpha, .. } | DataFunction::PlaneWave { alpha, .. } => alpha.clone(),
        _ => return Err(HarnessError::Config("E5 needs a plane-wave or separable-cosine seed".into())),
    };
    let arg = arcsin_argument(&alpha, dx, dt);
    let rejected = matches!(beta(&alpha, dx, dt), Err(DispersionError::CflViolated { .. }));
    out.check(
        "seeded frequency violates the dispersion relation",
        arg > 1.0 && rejected,
        format!("arcsin argument {arg:.6} at α = {:.4}·π/dx, dt/dx = {:.4}", alpha[0] * dx / std::f64::consts::PI, dt / dx),
    );

    // unstable run
    let spec = LatticeSpec::new(n, dx, dt, t_end)?;
    match run_forward(spec, cfg.window, seed, &cfg.data.g) {
        Ok((RunStatus::Blowup { level, time, sup }, _, _)) => out.check(
            "blowup before T",
            time < t_end && sup >= 1e3,
            format!("blowup-detected at level {level}, t = {time:.4} < T = {t_end:.4}, sup = {sup:.3e}"),
        ),
        Ok((RunStatus::Bounded { max_sup, .. }, _, _)) => {
            out.check("blowup before T", false, format!("run stayed bounded, max sup {max_sup:.3e}"))
        }
        Err(e) => out.failed("blowup before T", &e),
    }

    // admissible control at dt/dx = 1/√n with the same horizon
    let steps = (t_end * (n as f64).sqrt() / dx).ceil();
    let control = LatticeSpec::new(n, dx, t_end / steps, t_end)?;
    match run_forward(control, cfg.window, seed, &cfg.data.g) {
        Ok((RunStatus::Bounded { max_sup, .. }, initial, _)) => out.check(
            "control run bounded",
            max_sup <= 2.0 * initial,
            format!("max sup {max_sup:.6} vs initial {initial:.6} at dt/dx = {:.6}", control.dt / dx),
        ),
        Ok((RunStatus::Blowup { time, .. }, _, _)) => out.check("control run bounded", false, format!("blowup at t = {time}")),
        Err(e) => out.failed("control run bounded", &e),
    }

    // reversed order: dt fixed, dx → 0
    let fixed_dt = 0.05;
    let horizon = 2.0;
    let smooth = DataFunction::gaussian(vec![0.0; n], 0.5);
    let half = 1.0;
    let reference = ReferenceSolution::auto(&smooth, &DataFunction::Zero, Flavor::Continuum, n, horizon, cfg.tolerances.oracle_tol)?;
    let xs = cube_points(n, half, 0.1);
    let exact = reference.eval_grid(&xs, &[horizon]);
    let mut table = ErrorTable::new();
    let mut diverged = false;
    for k in 0..cfg.lattice.levels {
        let h = 0.1 * 0.5f64.powi(k as i32);
        let spec = LatticeSpec::new(n, h, fixed_dt, horizon)?;
        let (sup, l2) = match run_forward(spec, half, &smooth, &DataFunction::Zero)? {
            (RunStatus::Blowup { time, sup, .. }, _, _) => {
                out.note(format!("reversed order, dx = {h}: blowup-detected at t = {time:.3}"));
                diverged = true;
                (sup, sup)
            }
            (RunStatus::Bounded { final_level, .. }, _, problem) => {
                let (mut s, mut q) = (0.0f64, 0.0);
                for (x, e) in xs.iter().zip(&exact) {
                    let i = problem.classification.locate(x).ok_or(HarnessError::NoCommonPoints)?;
                    let d = (final_level[i] - e[0]).abs();
                    s = s.max(d);
                    q += d * d;
                }
                (s, (q * 0.1f64.powi(n as i32)).sqrt())
            }
        };
        table.push(h, fixed_dt, sup, l2);
    }
    let rows = table.rows();
    if let (Some(first), Some(last)) = (rows.first(), rows.last()) {
        diverged |= last.sup_error > 1e3 * first.sup_error;
        out.check(
            "reversed limit diverges",
            diverged,
            format!(
                "error at t = {horizon}: {:.3e} at dx = {} vs {:.3e} at dx = {}",
                first.sup_error, first.dx, last.sup_error, last.dx
            ),
        );
    }
    out.tables.push(("reversed_order".into(), table));
    Ok(out)
}
