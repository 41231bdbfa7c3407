use latwave::spectral::DataFunction;
use latwave_harness::config::{ExperimentConfig, ExperimentId};
use latwave_harness::experiments::{audit, e1};
use latwave_harness::{run_experiment, ErrorTable};

#[test]
fn e4_csv_reparses_bit_exactly() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = ExperimentConfig::default_for(ExperimentId::E4, 1);
    cfg.out = Some(dir.path().to_path_buf());
    let out = run_experiment(&cfg).unwrap();
    assert!(out.passed(), "{}", out.summary());
    for (name, table) in &out.tables {
        let text = std::fs::read_to_string(dir.path().join(format!("e4_{name}.csv"))).unwrap();
        let back = ErrorTable::from_csv(&text).unwrap();
        assert_eq!(back.len(), table.len());
        for (a, b) in back.rows().iter().zip(table.rows()) {
            assert_eq!(a.sup_error.to_bits(), b.sup_error.to_bits());
            assert_eq!(a.l2_error.to_bits(), b.l2_error.to_bits());
            assert_eq!(a.dx.to_bits(), b.dx.to_bits());
            assert_eq!(a.dt.to_bits(), b.dt.to_bits());
            assert_eq!(a.observed_order.map(f64::to_bits), b.observed_order.map(f64::to_bits));
        }
        assert!(dir.path().join(format!("e4_{name}.gp")).exists());
    }
    assert!(dir.path().join("e4_summary.txt").exists());
}

#[test]
fn zero_data_gives_zero_errors() {
    let mut cfg = ExperimentConfig::default_for(ExperimentId::E1, 1);
    cfg.data.f = DataFunction::Zero;
    cfg.data.g = DataFunction::Zero;
    cfg.lattice.levels = 3;
    let out = run_experiment(&cfg).unwrap();
    assert_eq!(out.tables.len(), 2);
    for (_, t) in &out.tables {
        assert_eq!(t.len(), 3);
        for r in t.rows() {
            assert_eq!(r.sup_error, 0.0);
            assert_eq!(r.l2_error, 0.0);
        }
    }
}

#[test]
fn e1_is_deterministic() {
    let cfg = ExperimentConfig::default_for(ExperimentId::E1, 1);
    let a = run_experiment(&cfg).unwrap();
    let b = run_experiment(&cfg).unwrap();
    let ta = a.table("fixed_ratio").unwrap();
    let tb = b.table("fixed_ratio").unwrap();
    let (ra, rb) = (&ta.rows()[2], &tb.rows()[2]);
    assert_eq!(ra.level, 3);
    assert!((ra.sup_error - rb.sup_error).abs() <= 1e-12);
    assert!((ra.l2_error - rb.l2_error).abs() <= 1e-12);
}

#[test]
fn e1_orders_settle_near_two() {
    let out = run_experiment(&ExperimentConfig::default_for(ExperimentId::E1, 1)).unwrap();
    assert!(out.passed(), "{}", out.summary());
    let fixed = out.table("fixed_ratio").unwrap();
    assert!(fixed.is_monotone_decreasing());
    let order = fixed.final_order().unwrap();
    assert!((1.7..=2.3).contains(&order), "order {order}");
}

#[test]
fn varying_ratios_stay_admissible() {
    let base = ExperimentConfig::default_for(ExperimentId::E1, 2).base_spec().unwrap();
    for l in 0..6 {
        let s = e1::varying_spec(&base, l);
        assert!(s.is_admissible(), "level {l}: {s:?}");
        assert_eq!(s.steps().unwrap() % e1::TIME_SLICES, 0);
    }
}

#[test]
fn annihilation_holds_across_seeds() {
    for seed in 0..20 {
        let c = audit::plane_wave_annihilation(seed, 1_000);
        assert!(c.pass, "{}", c.detail);
    }
}

#[test]
fn audits_pass() {
    assert!(audit::dispersion_root(7, 2_000).pass);
    assert!(audit::propagator_bound(7, 2_000).0.pass);
    assert!(audit::keystone_identity().pass);
}

#[test]
fn every_experiment_passes_in_one_dimension() {
    for id in ExperimentId::ALL {
        let out = run_experiment(&ExperimentConfig::default_for(id, 1)).unwrap();
        assert!(out.passed(), "{}", out.summary());
    }
}
