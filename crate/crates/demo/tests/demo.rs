use enaqt_demo::{efficiency_curve_impl, optimize_impl, plane_map_impl};

#[test]
fn curve_layout() {
    let c = efficiency_curve_impl("chain", 3, 1, 2, 0.1, 0.01, 1e-2, 1e2, 9).unwrap();
    assert_eq!(c.len(), 20);
    assert_eq!(c[0], 0.0);
    assert!((c[1] - 0.7129).abs() < 1e-4);
    assert!(c.chunks(2).all(|p| (0.0..=1.0).contains(&p[1])));
}

#[test]
fn optimum() {
    let r = optimize_impl("chain", 3, 1, 2, 0.1, 0.01).unwrap();
    assert!((r[2] - 0.319).abs() < 2e-3 && (r[3] - 0.038).abs() < 1e-3);
    let ring = optimize_impl("ring", 4, 1, 3, 0.1, 0.01).unwrap();
    assert_eq!(ring[3], 0.0);
}

#[test]
fn plane() {
    let m = plane_map_impl("chain", 3, 1, 2, 1e-3, 1.0, 3).unwrap();
    assert_eq!(m.len(), 9);
    assert!(m.iter().all(|x| x.is_finite() && *x >= 0.0 && *x < 0.08));
}

#[test]
fn rejects_bad_input() {
    assert!(optimize_impl("star", 3, 1, 2, 0.1, 0.01).is_err());
    assert!(optimize_impl("chain", 3, 0, 2, 0.1, 0.01).is_err());
    assert!(optimize_impl("chain", 3, 2, 2, 0.1, 0.01).is_err());
    assert!(plane_map_impl("chain", 3, 1, 2, 1.0, 0.1, 3).is_err());
}
