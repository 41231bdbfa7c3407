//! First limit of the iterated pair: Störmer–Verlet with shrinking step against
//! the semidiscrete closed form at fixed `dx`.

use latwave::lagrange_ode::{phi_reference_error, Method};

use super::{cube_points, Outcome};
use crate::config::ExperimentConfig;
use crate::table::ErrorTable;
use crate::HarnessError;

pub fn run(cfg: &ExperimentConfig) -> Result<Outcome, HarnessError> {
    let mut out = Outcome::new(cfg);
    let n = cfg.n;
    let (dx, t_end) = (cfg.lattice.dx, cfg.lattice.horizon);
    let h_values: Vec<f64> = (0..cfg.lattice.levels).map(|k| cfg.lattice.dt * 0.5f64.powi(k as i32)).collect();
    // probes on a coarse sub-grid of the lattice at t = T/2 and T
    let spacing = (cfg.window / 2.0 / dx).round().max(1.0) * dx;
    let mut probes = Vec::new();
    for x in cube_points(n, cfg.window, spacing) {
        probes.push((x.clone(), 0.5 * t_end));
        probes.push((x, t_end));
    }
    let lower = vec![-cfg.window; n];
    let upper = vec![cfg.window; n];
    let rows = phi_reference_error(
        &cfg.data.f,
        &cfg.data.g,
        dx,
        (&lower, &upper),
        &probes,
        &h_values,
        Method::StormerVerlet,
        cfg.tolerances.oracle_tol,
    )?;
    let mut table = ErrorTable::new();
    for r in &rows {
        table.push(dx, r.h_ode, r.max_error, r.rms_error);
    }
    let tol = &cfg.tolerances;
    let mut judged = 0;
    for w in rows.windows(2) {
        let ratio = w[0].max_error / w[1].max_error;
        let label = format!("ratio h = {} → {}", w[0].h_ode, w[1].h_ode);
        if w[1].max_error < tol.floor {
            out.note(format!("{label}: {ratio:.3} (below the oracle floor {:.0e}, not judged)", tol.floor));
            continue;
        }
        judged += 1;
        let lo = tol.order_min;
        let hi = tol.order_max;
        out.check(label, ratio >= lo && ratio <= hi, format!("error ratio {ratio:.4} (accepted [{lo}, {hi}])"));
    }
    out.check("ratios above the floor", judged >= 2, format!("{judged} ratios judged"));
    out.tables.push(("verlet_vs_semidiscrete".into(), table));
    Ok(out)
}
