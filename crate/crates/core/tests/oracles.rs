use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use latwave::dispersion::{arcsin_argument, beta, beta_semidiscrete, symbol_g};
use latwave::lattice::{Domain, LatticeSpec};
use latwave::leapfrog::{solve, DiscreteProblem, Record};
use latwave::spectral::propagator::discrete_g_coefficient;
use latwave::spectral::synthesis::DEFAULT_TAIL_TOL;
use latwave::spectral::{duhamel_solve, propagator, DataFunction, Flavor, Forcing, FrequencyQuadrature, ReferenceSolution};

fn window_problem(n: usize, dx: f64, dt: f64, horizon: f64, half: f64, f: &DataFunction, forcing: Forcing) -> DiscreteProblem {
    let spec = LatticeSpec::new(n, dx, dt, horizon).unwrap();
    let dom = Domain::FullSpace {
        lower: vec![-half; n],
        upper: vec![half; n],
    };
    let zero = |_: &[f64]| 0.0;
    DiscreteProblem::from_data(&dom, spec, f, &DataFunction::Zero, &zero, forcing).unwrap()
}

#[test]
fn gaussian_2d_matches_discrete_closed_form() {
    let (dx, dt) = (0.1, 0.0625);
    let f = DataFunction::gaussian(vec![0.0, 0.0], 0.5);
    let p = window_problem(2, dx, dt, 1.25, 1.5, &f, Forcing::Zero);
    let hist = solve(&p, &Record::Full, 0, 20).unwrap();
    let r = ReferenceSolution::auto(&f, &DataFunction::Zero, Flavor::FullyDiscrete { dx, dt }, 2, 1.25, DEFAULT_TAIL_TOL).unwrap();
    let cls = &p.classification;
    let pts: Vec<Vec<f64>> = cls
        .interior()
        .iter()
        .map(|&i| cls.coords(i))
        .filter(|x| x.iter().all(|v| v.abs() <= 1.5 + 1e-9))
        .collect();
    let t = 20.0 * dt;
    let vals = r.eval_grid(&pts, &[t]);
    let mut worst = 0.0f64;
    for (x, v) in pts.iter().zip(vals) {
        let i = cls.locate(x).unwrap();
        worst = worst.max((hist.level(20).unwrap()[i] - v[0]).abs());
    }
    assert!(worst < 1e-7, "max deviation {worst:e}");
}

#[test]
fn discrete_closed_form_at_origin() {
    let (dx, dt) = (0.2, 0.1);
    let f = DataFunction::gaussian(vec![0.0], 0.3);
    let p = window_problem(1, dx, dt, 1.0, 1.0, &f, Forcing::Zero);
    let hist = solve(&p, &Record::Full, -4, 4).unwrap();
    let r = ReferenceSolution::auto(&f, &DataFunction::Zero, Flavor::FullyDiscrete { dx, dt }, 1, 1.0, DEFAULT_TAIL_TOL).unwrap();
    let i = p.classification.locate(&[0.0]).unwrap();
    for q in [-4, -1, 0, 2, 4] {
        let v = hist.level(q).unwrap()[i];
        assert!((v - r.eval(&[0.0], q as f64 * dt)).abs() < 1e-8, "level {q}");
    }
}

#[test]
fn forced_scheme_matches_discrete_duhamel() {
    let (dx, dt) = (0.05, 0.025);
    let profile = DataFunction::gaussian(vec![0.0], 1.0);
    let forcing = Forcing::StandingWaveResidual {
        profile: profile.clone(),
        frequency: 1.0,
    };
    let p = window_problem(1, dx, dt, 1.0, 2.0, &profile, forcing.clone());
    let hist = solve(&p, &Record::Full, 0, 40).unwrap();
    let quad = FrequencyQuadrature::new(1, 16.0, 257);
    let fl = Flavor::FullyDiscrete { dx, dt };
    let probes = [-1.8, -1.2, -0.6, -0.2, 0.0, 0.25, 0.5, 0.9, 1.4, 2.0];
    for (k, &x) in probes.iter().enumerate() {
        let q = 4 * (k as i64 + 1);
        let t = q as f64 * dt;
        let d = duhamel_solve(&profile, &DataFunction::Zero, &forcing, fl, &[x], t, quad, dt).unwrap();
        let i = p.classification.locate(&[x]).unwrap();
        let v = hist.level(q).unwrap()[i];
        assert!((v - d).abs() < 1e-6, "x = {x}, t = {t}: {v} vs {d}");
        // and the scheme is a second-order approximation of p(x)·cos t
        assert!((v - profile.eval(&[x]) * t.cos()).abs() < 5.0 * (dx * dx + dt * dt));
    }
}

#[test]
fn finite_domain_of_dependence() {
    let (dx, dt) = (0.05, 0.025);
    let f = DataFunction::gaussian(vec![0.0], 0.2);
    let base = window_problem(1, dx, dt, 1.0, 2.0, &f, Forcing::Zero);
    let mut changed = base.clone();
    let cls = base.classification.clone();
    let radius = 1.0;
    for &i in cls.interior() {
        if cls.coords(i)[0].abs() > radius {
            changed.f[i] += 0.5 + (i as f64).sin();
        }
    }
    let a = solve(&base, &Record::Full, -40, 40).unwrap();
    let b = solve(&changed, &Record::Full, -40, 40).unwrap();
    for q in -40i64..=40 {
        let reach = q.unsigned_abs() as f64 * dx;
        for &i in cls.interior() {
            let x = cls.coords(i)[0];
            if x.abs() + reach < radius - 1e-9 {
                assert_eq!(a.level(q).unwrap()[i].to_bits(), b.level(q).unwrap()[i].to_bits());
            }
        }
    }
}

fn random_case(rng: &mut ChaCha8Rng) -> (Vec<f64>, f64, f64, usize) {
    let n = rng.random_range(1..=3usize);
    let dx = rng.random_range(0.01..0.5);
    let ratio = rng.random_range(0.05..=1.0) / (n as f64).sqrt();
    let alpha: Vec<f64> = (0..n).map(|_| rng.random_range(-3.0..3.0) * std::f64::consts::PI / dx).collect();
    (alpha, dx, ratio * dx, n)
}

#[test]
fn dispersion_root_sweep() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..10_000 {
        let (alpha, dx, dt, _) = random_case(&mut rng);
        let b = beta(&alpha, dx, dt).unwrap();
        let a2: f64 = alpha.iter().map(|a| a * a).sum();
        assert!(symbol_g(&alpha, b * b, dx, dt).abs() <= 1e-11 * (1.0 + a2));
        let b0 = beta_semidiscrete(&alpha, dx);
        assert!(b0 <= b * (1.0 + 1e-12) && b0 <= a2.sqrt() * (1.0 + 1e-12));
        assert!(arcsin_argument(&alpha, dx, dt) <= 1.0 + 1e-12);
    }
}

#[test]
fn propagator_bound_sweep() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..10_000 {
        let (alpha, dx, dt, _) = random_case(&mut rng);
        let steps = rng.random_range(1..=400i64);
        let horizon = steps as f64 * dt;
        let k = rng.random_range(-steps..=steps);
        let b = beta(&alpha, dx, dt).unwrap();
        let c = discrete_g_coefficient(b, dt, k as f64 * dt);
        assert!(c.abs() <= horizon * (1.0 + 1e-12), "{c} > {horizon}");
    }
}

#[test]
fn propagator_degenerates_to_continuum() {
    let alpha = [1.3, -0.4];
    let t = 0.9;
    let w = propagator(Flavor::Continuum, &alpha, t).unwrap();
    let dx = 0.05;
    let semi = propagator(Flavor::Semidiscrete { dx }, &alpha, t).unwrap();
    let mut prev: Option<f64> = None;
    for k in 0..4 {
        let dt = 0.9 / (10.0 * 2f64.powi(k));
        let d = propagator(Flavor::FullyDiscrete { dx, dt }, &alpha, t).unwrap().max_abs_diff(&semi);
        if let Some(p) = prev {
            assert!((p / d).log2() >= 1.9);
        }
        prev = Some(d);
    }
    let mut prev: Option<f64> = None;
    for k in 0..4 {
        let dx = 0.2 / 2f64.powi(k);
        let d = propagator(Flavor::Semidiscrete { dx }, &alpha, t).unwrap().max_abs_diff(&w);
        if let Some(p) = prev {
            assert!((p / d).log2() >= 1.9);
        }
        prev = Some(d);
    }
}
