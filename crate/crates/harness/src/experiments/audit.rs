//! Randomized audits: the dispersion root, plane-wave annihilation by the discrete
//! d'Alembertian, the propagator bound, and the Verlet/scheme identity.

use latwave::dispersion::{beta, symbol_g};
use latwave::lagrange_ode::{integrate, LagrangeSystem, Method};
use latwave::lattice::{Domain, LatticeSpec};
use latwave::leapfrog::{solve, DiscreteProblem, Record};
use latwave::spectral::propagator::discrete_g_coefficient;
use latwave::spectral::{DataFunction, Forcing};
use latwave::stencils::symbolic;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::Check;

/// Random `(α, dx, dt)` with `dt/dx ≤ 1/√n` and `|α_k| ≤ alpha_span·π/dx`.
fn sample(rng: &mut ChaCha8Rng, dx_range: (f64, f64), alpha_span: f64) -> (Vec<f64>, f64, f64) {
    let n = rng.random_range(1..=3usize);
    let dx = rng.random_range(dx_range.0..dx_range.1);
    let ratio = rng.random_range(0.05..=1.0) / (n as f64).sqrt();
    let alpha = (0..n)
        .map(|_| rng.random_range(-alpha_span..=alpha_span) * std::f64::consts::PI / dx)
        .collect();
    (alpha, dx, ratio * dx)
}

/// `|G(α, β², dx, dt)| ≤ 1e-11·(1 + |α|²)` with `β` from the dispersion branch.
pub fn dispersion_root(seed: u64, samples: usize) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    let mut failures = 0;
    for _ in 0..samples {
        let (alpha, dx, dt) = sample(&mut rng, (1e-3, 1.0), 3.0);
        let a2: f64 = alpha.iter().map(|a| a * a).sum();
        match beta(&alpha, dx, dt) {
            Ok(b) => {
                let r = symbol_g(&alpha, b * b, dx, dt).abs() / (1.0 + a2);
                worst = worst.max(r);
                if r > 1e-11 {
                    failures += 1;
                }
            }
            Err(_) => failures += 1,
        }
    }
    Check {
        name: "dispersion root".into(),
        pass: failures == 0,
        detail: format!("{samples} samples (seed {seed}), max |G|/(1+|α|²) = {worst:.2e}, {failures} violations"),
    }
}

/// The discrete d'Alembertian of `A·Re e^{i(α·x + βt)}` at random space-time points.
///
/// Neighbour increments are `A·Re(e^{iθ₀}(e^{iδ} − 1))` with `e^{iδ} − 1 = (−2 sin²(δ/2), sin δ)`,
/// so the only rounding left is relative to the increments themselves; plain sampling
/// loses `ε·A·4/dt²` to cancellation, which exceeds the tolerance once `dt < 3e-3`.
pub fn plane_wave_annihilation(seed: u64, samples: usize) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for _ in 0..samples {
        let (alpha, dx, dt) = sample(&mut rng, (0.01, 0.5), 1.0);
        let n = alpha.len();
        let amp = rng.random_range(0.1..10.0);
        let b = beta(&alpha, dx, dt).expect("admissible sample");
        let x0: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let t0 = rng.random_range(-1.0..1.0);
        let theta0: f64 = alpha.iter().zip(&x0).map(|(a, x)| a * x).sum::<f64>() + b * t0;
        let base = Complex64::from_polar(amp, theta0);
        let d = |axis: Option<usize>, sign: f64| {
            let delta = sign * axis.map_or(b * dt, |k| alpha[k] * dx);
            let half = (0.5 * delta).sin();
            (base * Complex64::new(-2.0 * half * half, delta.sin())).re
        };
        let r = symbolic::discrete_dalembert_increments(&d, n, dx, dt).abs() / amp;
        worst = worst.max(r);
    }
    Check {
        name: "plane-wave annihilation".into(),
        pass: worst <= 1e-10,
        detail: format!("{samples} points (seed {seed}), max |□v|/amplitude = {worst:.2e}"),
    }
}

/// `|dt·sin(βt)/sin(β·dt)| ≤ T` over random lattices, frequencies and times `k·dt`, `|t| ≤ T`.
pub fn propagator_bound(seed: u64, samples: usize) -> (Check, f64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut violations = 0;
    let mut worst = 0.0f64;
    for _ in 0..samples {
        let (alpha, dx, dt) = sample(&mut rng, (1e-3, 1.0), 3.0);
        let steps = rng.random_range(1..=1000i64);
        let horizon = steps as f64 * dt;
        let k = rng.random_range(-steps..=steps);
        let b = beta(&alpha, dx, dt).expect("admissible sample");
        let c = discrete_g_coefficient(b, dt, k as f64 * dt).abs();
        worst = worst.max(c / horizon);
        if c > horizon * (1.0 + 1e-12) {
            violations += 1;
        }
    }
    (
        Check {
            name: "propagator bound".into(),
            pass: violations == 0,
            detail: format!("{samples} samples (seed {seed}), max |coefficient|/T = {worst:.15}, {violations} violations"),
        },
        worst,
    )
}

/// Störmer–Verlet at `h = dt` against the scheme on a 512-point interval, 200 steps.
pub fn keystone_identity() -> Check {
    let dx = 1.0 / 511.0;
    let dt = 0.75 * dx;
    let steps = 200;
    let run = || -> Result<(usize, usize), String> {
        let spec = LatticeSpec::new(1, dx, dt, steps as f64 * dt).map_err(|e| e.to_string())?;
        let dom = Domain::Box {
            lower: vec![0.0],
            upper: vec![511.0 * dx],
        };
        let f = DataFunction::gaussian(vec![0.5], 0.08);
        let g = DataFunction::ModulatedGaussian {
            center: vec![0.4],
            width: 0.05,
            carrier: vec![30.0],
            amplitude: 0.3,
        };
        let zero = |_: &[f64]| 0.0;
        let p = DiscreteProblem::from_data(&dom, spec, &f, &g, &zero, Forcing::Zero).map_err(|e| e.to_string())?;
        let hist = solve(&p, &Record::Full, 0, steps).map_err(|e| e.to_string())?;
        let sys = LagrangeSystem::from_problem(&p).map_err(|e| e.to_string())?;
        let traj = integrate(&sys, &p.f, &p.g, 0.0, steps as f64 * dt, Method::StormerVerlet, dt, 1).map_err(|e| e.to_string())?;
        let mut mismatches = 0;
        let mut compared = 0;
        for q in 0..=steps {
            let a = hist.level(q).map_err(|e| e.to_string())?;
            let b = &traj.states[q as usize];
            for &i in p.classification.interior() {
                compared += 1;
                if a[i].to_bits() != b[i].to_bits() {
                    mismatches += 1;
                }
            }
        }
        Ok((compared, mismatches))
    };
    match run() {
        Ok((compared, mismatches)) => Check {
            name: "keystone identity".into(),
            pass: mismatches == 0,
            detail: format!("{compared} values over {steps} steps, {mismatches} differ in any bit"),
        },
        Err(e) => Check {
            name: "keystone identity".into(),
            pass: false,
            detail: format!("error: {e}"),
        },
    }
}
