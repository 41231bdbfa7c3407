//! Störmer–Verlet at `h = dt` against the three-level scheme, compared bit for bit.

use latwave::lagrange_ode::{integrate, LagrangeSystem, Method};
use latwave::lattice::{Domain, LatticeSpec};
use latwave::leapfrog::{solve, DiscreteProblem, Record};
use latwave::spectral::{DataFunction, Forcing, TimeProfile};

fn compare(problem: &DiscreteProblem, steps: i64) {
    let hist = solve(problem, &Record::Full, 0, steps).unwrap();
    let system = LagrangeSystem::from_problem(problem).unwrap();
    let dt = problem.spec.dt;
    let traj = integrate(&system, &problem.f, &problem.g, 0.0, steps as f64 * dt, Method::StormerVerlet, dt, 1).unwrap();
    assert_eq!(traj.states.len() as i64, steps + 1);
    for p in 0..=steps {
        let lf = hist.level(p).unwrap();
        let vv = &traj.states[p as usize];
        for &i in problem.classification.interior() {
            assert_eq!(lf[i].to_bits(), vv[i].to_bits(), "level {p}, point {i}");
        }
    }
}

#[test]
fn verlet_reproduces_scheme_bitwise_1d() {
    // 512 lattice points on [0, 1], 200 steps
    let dx = 1.0 / 511.0;
    let dt = dx * 0.75;
    let spec = LatticeSpec::new(1, dx, dt, 200.0 * dt).unwrap();
    let f = DataFunction::gaussian(vec![0.5], 0.08);
    let g = DataFunction::ModulatedGaussian {
        center: vec![0.4],
        width: 0.05,
        carrier: vec![30.0],
        amplitude: 0.3,
    };
    let zero = |_: &[f64]| 0.0;
    let dom = Domain::Box {
        lower: vec![0.0],
        upper: vec![511.0 * dx],
    };
    let p = DiscreteProblem::from_data(&dom, spec, &f, &g, &zero, Forcing::Zero).unwrap();
    assert_eq!(p.classification.interior().len() + p.classification.boundary().len(), 512);
    compare(&p, 200);
}

#[test]
fn verlet_reproduces_forced_scheme_bitwise_2d() {
    let spec = LatticeSpec::new(2, 0.05, 0.03125, 1.0).unwrap();
    let f = DataFunction::gaussian(vec![0.5, 0.4], 0.1);
    let forcing = Forcing::Separable {
        space: DataFunction::gaussian(vec![0.3, 0.6], 0.15),
        time: TimeProfile::Cosine {
            frequency: 4.0,
            amplitude: 2.0,
            phase: 0.1,
        },
    };
    let h = |x: &[f64]| 0.1 * x[0];
    let p = DiscreteProblem::from_data(&Domain::unit_box(2), spec, &f, &DataFunction::Zero, &h, forcing).unwrap();
    compare(&p, 32);
}
