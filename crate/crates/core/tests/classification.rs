use std::collections::BTreeSet;

use latwave::lattice::{classify, detect_double_points, Domain, LatticeSpec, PointKind};

fn brute_force(domain: &Domain, dx: f64, range: i64, n: usize) -> (BTreeSet<Vec<i64>>, BTreeSet<Vec<i64>>) {
    let mut interior = BTreeSet::new();
    let mut boundary = BTreeSet::new();
    let total = (2 * range + 1).pow(n as u32);
    for code in 0..total {
        let mut c = code;
        let idx: Vec<i64> = (0..n)
            .map(|_| {
                let v = c % (2 * range + 1) - range;
                c /= 2 * range + 1;
                v
            })
            .collect();
        let x: Vec<f64> = idx.iter().map(|&k| k as f64 * dx).collect();
        if !domain.contains_closure(&x) {
            continue;
        }
        let mut all_in = domain.contains(&x);
        for k in 0..n {
            for s in [-1.0, 1.0] {
                let mut y = x.clone();
                y[k] += s * dx;
                all_in &= domain.contains_closure(&y);
            }
        }
        if all_in {
            interior.insert(idx);
        } else {
            boundary.insert(idx);
        }
    }
    (interior, boundary)
}

#[test]
fn ball_matches_brute_force() {
    for (n, dx, r) in [(2, 0.1, 0.73), (2, 0.05, 0.512), (3, 0.125, 0.61)] {
        let dom = Domain::Ball {
            center: vec![0.0; n],
            radius: r,
        };
        let spec = LatticeSpec::new(n, dx, dx / (n as f64).sqrt() / 2.0, 1.0).unwrap();
        let spec = LatticeSpec { dt: 1.0 / (1.0 / spec.dt).ceil(), ..spec };
        let cls = classify(&dom, &spec).unwrap();
        let (interior, boundary) = brute_force(&dom, dx, (r / dx).ceil() as i64 + 2, n);
        assert_eq!(cls.interior_set(), interior, "n = {n}, dx = {dx}");
        assert_eq!(cls.boundary_set(), boundary, "n = {n}, dx = {dx}");
        assert!(detect_double_points(&dom, &spec).unwrap().is_empty());
    }
}

#[test]
fn box_boundary_is_the_frame() {
    let spec = LatticeSpec::new(2, 0.25, 0.125, 1.0).unwrap();
    let cls = classify(&Domain::unit_box(2), &spec).unwrap();
    assert_eq!(cls.interior().len(), 9);
    assert_eq!(cls.boundary().len(), 16);
    for &i in cls.boundary() {
        let x = cls.coords(i);
        assert!(x.iter().any(|v| *v == 0.0 || *v == 1.0));
    }
}

#[test]
fn classification_is_a_partition() {
    let dom = Domain::Union {
        parts: vec![
            Domain::Ball {
                center: vec![0.0, 0.0],
                radius: 0.52,
            },
            Domain::Box {
                lower: vec![0.25, -0.3125],
                upper: vec![1.125, 0.3125],
            },
        ],
    };
    let spec = LatticeSpec::new(2, 0.0625, 0.03125, 1.0).unwrap();
    let cls = classify(&dom, &spec).unwrap();
    let mut seen = BTreeSet::new();
    for &i in cls.interior().iter().chain(cls.boundary()) {
        assert!(seen.insert(i));
        assert!(matches!(cls.kind(i), PointKind::Interior | PointKind::Boundary));
    }
    for i in cls.support() {
        assert!(dom.contains_closure(&cls.coords(i)) || cls.kind(i) == PointKind::Ghost);
    }
}
