use hierarchy_core::oracle::*;
use proptest::prelude::*;

const QUARTIC_G2: f64 = 1.4009572651751;

fn quartic(g: f64) -> impl Fn(f64) -> f64 {
    move |x| 0.5 * g * g * (x * x - 1.0).powi(2)
}

#[test]
fn harmonic_ground_state() {
    let r = fd_ground_state(&|x: f64| 2.0 * x * x, &Mesh::with_density(-7.0, 7.0, 100.0)).unwrap();
    assert!((r.best() - 1.0).abs() <= r.refinement.error_estimate.max(1e-9));
    let h = r.mesh.h();
    assert!((h * r.psi.iter().map(|p| p * p).sum::<f64>() - 1.0).abs() < 1e-12);
    assert!(r.psi.iter().all(|&p| p > 0.0));
    assert_eq!(r.x.len(), r.psi.len());
}

#[test]
fn box_ground_state() {
    let gamma = 2.0;
    let r = fd_ground_state(&|_| 0.0, &Mesh::with_density(-gamma, gamma, 100.0)).unwrap();
    let exact = std::f64::consts::PI.powi(2) / (8.0 * gamma * gamma);
    assert!((r.best() - exact).abs() < 1e-9);
    let ev = fd_eigenvalues(&|_| 0.0, &r.mesh, 2).unwrap();
    assert!((ev[1] / ev[0] - 4.0).abs() < 1e-3);
}

#[test]
fn quartic_regression_constant() {
    let xm = 1.0 + 8.0 / 2f64.sqrt();
    let r = fd_ground_state(&quartic(2.0), &Mesh::with_density(-xm, xm, 400.0)).unwrap();
    assert!((r.best() - QUARTIC_G2).abs() < 1e-10, "{}", r.best());
    assert!((r.refinement.order - 2.0).abs() < 0.2);
    assert!(r.e_first > r.e_ground);
}

#[test]
fn errors_are_reported() {
    assert_eq!(fd_eigenvalues(&|_| 0.0, &Mesh { x_min: 0.0, x_max: 1.0, intervals: 2 }, 1), Err(OracleError::BadMesh));
    let e = fd_ground_state(&|x: f64| if x > 0.5 { f64::NAN } else { 0.0 }, &Mesh::with_density(0.0, 1.0, 50.0));
    assert!(matches!(e, Err(OracleError::NonFinite(_))));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn refinement_order_is_two(g in 0.5f64..4.0, shift in -1.0f64..1.0) {
        let xm = 1.0 + 8.0 / g.sqrt();
        let v = move |x: f64| 0.5 * g * g * (x * x - 1.0).powi(2) + 0.1 * g * shift * x;
        let r = fd_ground_state(&v, &Mesh::with_density(-xm, xm, 60.0)).unwrap();
        prop_assert!(r.refinement.order >= 1.8 && r.refinement.order <= 2.2, "order {}", r.refinement.order);
        prop_assert!(r.psi.iter().all(|&p| p > 0.0));
        let norm: f64 = r.mesh.h() * r.psi.iter().map(|p| p * p).sum::<f64>();
        prop_assert!((norm - 1.0).abs() < 1e-12);
    }
}
