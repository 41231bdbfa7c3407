//! Forced problems: the continuum Duhamel integral for a single frequency, and a
//! manufactured standing wave solved by the forced scheme.

use latwave::leapfrog::{solve, Record};
use latwave::spectral::{duhamel_solve, DataFunction, Flavor, Forcing, FrequencyQuadrature, TimeProfile};

use super::{cube_points, window_problem, Outcome};
use crate::config::ExperimentConfig;
use crate::table::ErrorTable;
use crate::HarnessError;

/// `(1 − cos(|α|t))/|α|²`, the response to `w = e^{iα·x}` from rest at `x = 0`.
pub fn single_frequency_oracle(alpha_norm: f64, t: f64) -> f64 {
    (1.0 - (alpha_norm * t).cos()) / (alpha_norm * alpha_norm)
}

pub fn run(cfg: &ExperimentConfig) -> Result<Outcome, HarnessError> {
    let mut out = Outcome::new(cfg);
    let n = cfg.n;
    let tol = &cfg.tolerances;

    // single frequency α = 2·e₁ at t = 1
    let mut alpha = vec![0.0; n];
    alpha[0] = 2.0;
    let forcing = Forcing::Separable {
        space: DataFunction::PlaneWave { alpha, amplitude: 1.0 },
        time: TimeProfile::Constant { value: 1.0 },
    };
    let zero = DataFunction::Zero;
    let quad = FrequencyQuadrature::new(n, 1.0, 3);
    let origin = vec![0.0; n];
    let v = duhamel_solve(&zero, &zero, &forcing, Flavor::Continuum, &origin, 1.0, quad, 1e-3)?;
    let oracle = single_frequency_oracle(2.0, 1.0);
    out.check(
        "single frequency closed form",
        (v - oracle).abs() <= tol.abs_tol,
        format!("Duhamel {v:.9} vs (1 − cos 2)/4 = {oracle:.9}"),
    );

    // manufactured standing wave p(x)·cos(ωt)
    let (profile, omega) = match &cfg.data.w {
        Forcing::StandingWaveResidual { profile, frequency } => (profile.clone(), *frequency),
        _ => return Err(HarnessError::Config("E6 expects a standing-wave forcing".into())),
    };
    let spec = cfg.base_spec()?;
    let steps = spec.steps().unwrap_or(0) as i64;
    let problem = window_problem(spec, cfg.window, &profile, &DataFunction::Zero, &cfg.data.w)?;
    let field = solve(&problem, &Record::Full, 0, steps)?;
    let cls = &problem.classification;
    let xs = cube_points(n, cfg.window, spec.dx);
    let scale = xs.iter().map(|x| profile.eval(x).abs()).fold(0.0, f64::max);
    let (mut sup, mut sq) = (0.0f64, 0.0);
    for p in 0..=steps {
        let t = p as f64 * spec.dt;
        let level = field.level(p)?;
        for x in &xs {
            let i = cls.locate(x).ok_or(HarnessError::NoCommonPoints)?;
            let e = (level[i] - profile.eval(x) * (omega * t).cos()).abs();
            sup = sup.max(e);
            sq += e * e;
        }
    }
    let bound = 5.0 * (spec.dx * spec.dx + spec.dt * spec.dt) * scale;
    out.check(
        "manufactured solution",
        sup <= bound,
        format!("sup error {sup:.3e} vs 5(dx² + dt²)·scale = {bound:.3e}"),
    );
    let mut table = ErrorTable::new();
    table.push(spec.dx, spec.dt, sup, (sq * spec.dx.powi(n as i32) * spec.dt).sqrt());
    out.tables.push(("manufactured".into(), table));

    // forced scheme against the discrete Duhamel sum at probes
    let fine = FrequencyQuadrature::new(n, 16.0, if n == 1 { 257 } else { 129 });
    let flavor = Flavor::FullyDiscrete { dx: spec.dx, dt: spec.dt };
    let probes: Vec<(Vec<f64>, i64)> = (0..10)
        .map(|k| {
            let mut x = vec![0.0; n];
            x[0] = ((-0.9 + 0.2 * k as f64) * cfg.window / spec.dx).round() * spec.dx;
            (x, (steps * (k + 1)) / 10)
        })
        .collect();
    let mut worst = 0.0f64;
    for (x, p) in &probes {
        let t = *p as f64 * spec.dt;
        let d = duhamel_solve(&profile, &DataFunction::Zero, &cfg.data.w, flavor, x, t, fine, spec.dt)?;
        let i = cls.locate(x).ok_or(HarnessError::NoCommonPoints)?;
        worst = worst.max((field.level(*p)?[i] - d).abs());
    }
    out.check(
        "forced scheme vs discrete Duhamel",
        worst <= tol.abs_tol,
        format!("max deviation {worst:.3e} at {} probes", probes.len()),
    );
    Ok(out)
}
