//! Second limit of the iterated pair: the semidiscrete solution against the
//! continuum solution under `dx` halving.

use latwave::spectral::{Flavor, ReferenceSolution};

use super::e1::TIME_SLICES;
use super::{cube_points, Outcome};
use crate::config::ExperimentConfig;
use crate::table::ErrorTable;
use crate::HarnessError;

pub fn run(cfg: &ExperimentConfig) -> Result<Outcome, HarnessError> {
    let mut out = Outcome::new(cfg);
    let n = cfg.n;
    let d = &cfg.data;
    let t_end = cfg.lattice.horizon;
    let dx0 = cfg.lattice.dx;
    let tol_rel = cfg.tolerances.oracle_tol;
    let xs = cube_points(n, cfg.window, dx0);
    let slice_dt = t_end / TIME_SLICES as f64;
    let ts: Vec<f64> = (0..=TIME_SLICES).map(|j| j as f64 * slice_dt).collect();
    let u = ReferenceSolution::auto(&d.f, &d.g, Flavor::Continuum, n, t_end, tol_rel)?.eval_grid(&xs, &ts);
    let vol = dx0.powi(n as i32) * slice_dt;
    let mut table = ErrorTable::new();
    for l in 0..cfg.lattice.levels {
        let dx = dx0 * 0.5f64.powi(l as i32);
        let phi = ReferenceSolution::auto(&d.f, &d.g, Flavor::Semidiscrete { dx }, n, t_end, tol_rel)?.eval_grid(&xs, &ts);
        let (mut sup, mut sq) = (0.0f64, 0.0);
        for (a, b) in phi.iter().flatten().zip(u.iter().flatten()) {
            let e = (a - b).abs();
            sup = sup.max(e);
            sq += e * e;
        }
        table.push(dx, 0.0, sup, (sq * vol).sqrt());
    }
    let tol = &cfg.tolerances;
    for r in table.rows().iter().skip(1) {
        let o = r.observed_order.unwrap_or(f64::NAN);
        out.check(
            format!("order at dx = {}", r.dx),
            o >= tol.order_min && o <= tol.order_max,
            format!("observed order {o:.4} (accepted [{}, {}])", tol.order_min, tol.order_max),
        );
    }
    if table.len() < 2 {
        out.check("levels", false, "at least two levels are needed");
    }
    out.tables.push(("semidiscrete_vs_continuum".into(), table));
    Ok(out)
}
