use sublorentz_web::{dtau_field, longest_path, reachable_cloud};

#[test]
fn minkowski_path_is_straight() {
    let r = longest_path("minkowski11", &[5.0, 3.0], 20, 2).ok().unwrap();
    assert_eq!(r.status(), "solved");
    assert!((r.objective() - 4.0).abs() < 1e-3);
    assert_eq!(r.bound(), 4.0);
    let pts = r.points();
    assert_eq!(pts.len(), 21 * 2);
    for p in pts.chunks(2) {
        assert!((3.0 * p[0] - 5.0 * p[1]).abs() < 1e-3);
    }
}

#[test]
fn heisenberg_path_stays_below_bound() {
    let r = longest_path("heisenberg-sl", &[3.0, 0.5, 0.4], 20, 2).ok().unwrap();
    assert_eq!(r.dim(), 3);
    assert!(r.objective() <= r.bound() + 1e-9);
    assert!(r.residual() <= 1e-6);
}

#[test]
fn cloud_is_in_the_future_cone() {
    let pts = reachable_cloud("minkowski11", 300, 7).ok().unwrap();
    assert_eq!(pts.len(), 600);
    for p in pts.chunks(2) {
        assert!(p[0] >= p[1].abs() - 1e-12);
    }
    assert_eq!(pts, reachable_cloud("minkowski11", 300, 7).ok().unwrap());
}

#[test]
fn dtau_matches_a_over_y_squared() {
    let field = dtau_field(1.5, 1.0, 5, 4, -1.0, 1.0, 0.5, 2.0, 1e-3).ok().unwrap();
    for (j, row) in field.chunks(5).enumerate() {
        let y = 0.5 + 1.5 * j as f64 / 3.0;
        for v in row {
            assert!((v - 1.5 / (y * y)).abs() < 1e-4);
        }
    }
    let flat = dtau_field(0.0, 2.0, 3, 3, -1.0, 1.0, 0.5, 2.0, 1e-3).ok().unwrap();
    assert!(flat.iter().all(|v| v.abs() < 1e-9));
}
