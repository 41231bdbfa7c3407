//! Audit of the propagator bound and the degeneration chain
//! fully discrete → semidiscrete → continuum.

use latwave::spectral::{propagator, Flavor};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{audit, Outcome};
use crate::config::ExperimentConfig;
use crate::table::ErrorTable;
use crate::HarnessError;

pub const BOUND_SAMPLES: usize = 10_000;
pub const CHAIN_SAMPLES: usize = 100;

pub fn run(cfg: &ExperimentConfig) -> Result<Outcome, HarnessError> {
    let mut out = Outcome::new(cfg);
    let (check, _) = audit::propagator_bound(cfg.seed, BOUND_SAMPLES);
    out.checks.push(check);

    let n = cfg.n;
    let t_end = cfg.lattice.horizon;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(1));
    let samples: Vec<(Vec<f64>, f64)> = (0..CHAIN_SAMPLES)
        .map(|_| {
            let a = (0..n).map(|_| rng.random_range(-4.0..4.0)).collect();
            (a, rng.random_range(-t_end..=t_end))
        })
        .collect();
    let levels = cfg.lattice.levels;

    // dt → 0 at fixed dx
    let dx = cfg.lattice.dx;
    let mut dt_chain = ErrorTable::new();
    for k in 0..levels {
        let dt = cfg.lattice.dt * 0.5f64.powi(k as i32);
        let mut worst = 0.0f64;
        let mut sq = 0.0;
        for (a, t) in &samples {
            let d = propagator(Flavor::FullyDiscrete { dx, dt }, a, *t)?.max_abs_diff(&propagator(Flavor::Semidiscrete { dx }, a, *t)?);
            worst = worst.max(d);
            sq += d * d;
        }
        dt_chain.push(dx, dt, worst, (sq / samples.len() as f64).sqrt());
    }
    // dx → 0
    let mut dx_chain = ErrorTable::new();
    for k in 0..levels {
        let h = 4.0 * cfg.lattice.dx * 0.5f64.powi(k as i32);
        let mut worst = 0.0f64;
        let mut sq = 0.0;
        for (a, t) in &samples {
            let d = propagator(Flavor::Semidiscrete { dx: h }, a, *t)?.max_abs_diff(&propagator(Flavor::Continuum, a, *t)?);
            worst = worst.max(d);
            sq += d * d;
        }
        dx_chain.push(h, 0.0, worst, (sq / samples.len() as f64).sqrt());
    }
    let lo = cfg.tolerances.order_min;
    for (label, table) in [("dt chain", &dt_chain), ("dx chain", &dx_chain)] {
        let orders: Vec<f64> = table.rows().iter().filter_map(|r| r.observed_order).collect();
        let min = orders.iter().copied().fold(f64::INFINITY, f64::min);
        let text: Vec<String> = orders.iter().map(|o| format!("{o:.3}")).collect();
        out.check(
            format!("{label} order"),
            !orders.is_empty() && min >= lo && table.is_monotone_decreasing(),
            format!("orders {} over {} samples (accepted ≥ {lo})", text.join(", "), samples.len()),
        );
    }
    out.tables.push(("dt_chain".into(), dt_chain));
    out.tables.push(("dx_chain".into(), dx_chain));
    Ok(out)
}
