use std::f64::consts::PI;

use hierarchy_core::hierarchy::{IterOptions, StopReason};
use hierarchy_core::oracle::{fd_ground_state, Mesh};
use hierarchy_core::squarewell::*;
use proptest::prelude::*;

fn model(mu_sq: f64, alpha: f64) -> SquareWellModel {
    solve_asymmetric(10.0, mu_sq.sqrt(), alpha, 1.0).unwrap()
}

#[test]
fn even_channels() {
    let b = solve_even_well(10.0, 1.0, 1.0, Channel::B).unwrap();
    let od = solve_even_well(10.0, 1.0, 1.0, Channel::Od).unwrap();
    assert!(b.residual < 1e-12 && od.residual < 1e-12);
    assert!(od.energy > b.energy);
    let th = theta_exact(10.0).unwrap();
    assert!(b.k > PI - th - 0.1 && b.k < PI);
    assert!((b.k - 2.852341892107779).abs() < 1e-12);
    assert!((b.k * b.k + b.q * b.q - 100.0).abs() < 1e-12);
}

#[test]
fn wide_barrier_approaches_isolated_well() {
    let (p_inf, q_inf) = isolated_well(10.0, 1.0).unwrap();
    let wide = solve_even_well(10.0, 1.0, 4.0, Channel::B).unwrap();
    assert!((wide.k - p_inf).abs() < 1e-10);
    assert!((p_inf * p_inf + q_inf * q_inf - 100.0).abs() < 1e-12);
    let narrow = solve_even_well(10.0, 1.0, 0.5, Channel::B).unwrap();
    assert!((narrow.k - p_inf).abs() > (wide.k - p_inf).abs());
}

#[test]
fn shallow_well_is_a_regime_error() {
    assert!(matches!(solve_even_well(1.2, 1.0, 1.0, Channel::B), Err(SquareWellError::Regime(_))));
    assert!(matches!(solve_asymmetric(1.0, 2.0, 1.0, 1.0), Err(SquareWellError::Parameters(_))));
}

#[test]
fn theta_series() {
    let direct = (PI / 10.0) * (1.0 - 0.1 + (1.0 + PI * PI / 6.0) * 0.01);
    assert!((theta_asymptotic(10.0) - direct).abs() < 1e-15);
    assert!(theta_asymptotic(1e8) < 1e-7);
    let err = |wb: f64| (theta_asymptotic(wb) - theta_exact(wb).unwrap()).abs();
    for wb in [10.0, 20.0, 40.0, 80.0] {
        assert!(err(wb) < 25.0 * wb.powi(-4), "Wβ={wb}: {}", err(wb));
    }
    let slope = (err(20.0) / err(40.0)).log2();
    assert!((slope - 4.0).abs() < 0.3, "{slope}");
}

#[test]
fn model_invariants() {
    for (mu_sq, alpha) in [(0.05, 1.0), (0.04, 0.5), (1e-3, 0.3), (2.0, 0.6)] {
        let m = model(mu_sq, alpha);
        let w2 = m.w * m.w;
        assert!((m.k_sq + mu_sq + m.q * m.q - w2).abs() < 1e-12 * w2);
        assert!((m.p * m.p + m.q * m.q - w2).abs() < 1e-12 * w2);
        assert!((m.k_a * m.k_a + m.q_a * m.q_a - (w2 - mu_sq)).abs() < 1e-12 * w2);
        assert_eq!(2.0 * m.lambda, m.e_od - m.e_b);
        assert!(m.delta > 0.0);
        assert!(m.e < m.e_a && m.e < m.e_od && m.e_b < m.e_a);
        assert!(m.residuals.iter().all(|r| r.abs() < 1e-12), "{:?}", m.residuals);
        assert!((m.gamma - alpha - 1.0).abs() < 1e-15);
    }
}

#[test]
fn symmetric_limit() {
    let m = solve_asymmetric(10.0, 0.0, 1.0, 1.0).unwrap();
    assert_eq!(m.delta, 0.0);
    assert_eq!(m.e, m.e_b);
    let grid = square_well_grid(&m, 200.0).unwrap();
    assert_eq!(exact_shift(&m, &grid).unwrap().e_hat, 0.0);
    let t = two_level(5.0, 0.01, 0.0);
    assert_eq!(t.e, t.e_b);
}

#[test]
fn small_mixing_regime() {
    let m = model(0.04, 0.5);
    let e_inf = 0.5 * m.p_inf * m.p_inf;
    let (a, b, c) = (0.02, e_inf - m.e_b, e_inf - m.e);
    assert!(a > 100.0 * b && b > 100.0 * c, "{a} {b} {c}");
    let r = 0.5 * 0.04 * (e_inf - m.e) / (m.lambda * m.lambda);
    assert!((r - 1.0).abs() < 0.1, "{r}");
    let rel = m.delta_relation;
    assert!(rel.in_regime);
    assert!((rel.ratio - 1.0).abs() < 0.2, "{rel:?}");
    assert_eq!(m.delta_case, DeltaCase::Inside);
}

#[test]
fn wide_delta_is_classified() {
    let m = model(1e-3, 0.3);
    assert!(m.delta < m.alpha);
    assert!(!m.delta_relation.in_regime);
    let big = solve_asymmetric(10.0, 3.0, 0.2, 1.0).unwrap();
    assert_eq!(big.delta_case == DeltaCase::Inside, big.delta < big.alpha);
}

#[test]
fn exact_shift_identities() {
    let m = model(0.04, 0.5);
    let grid = square_well_grid(&m, 400.0).unwrap();
    let s = exact_shift(&m, &grid).unwrap();
    assert!((s.e_hat - s.reference).abs() < 1e-8 * s.reference);
    assert!(s.wronskian_residual.abs() < 1e-8);
    let frac = s.e_hat / m.gap();
    assert!(frac > 0.0 && frac < 1.0);
    let wide = model(0.05, 1.0);
    let g2 = square_well_grid(&wide, 400.0).unwrap();
    let s2 = exact_shift(&wide, &g2).unwrap();
    assert!((s2.e_hat - s2.reference).abs() < 1e-8 * s2.reference);
}

#[test]
fn normalization_at_the_wall() {
    let m = model(0.04, 0.5);
    let x = m.gamma - 1e-12;
    let (_, dpsi) = m.psi(x).unwrap();
    let (_, dchi) = m.chi(x).unwrap();
    assert!((dpsi / dchi - 1.0).abs() < 1e-9);
    assert!(m.chi(m.gamma + 0.1).is_err());
}

#[test]
fn greens_function_properties() {
    let m = model(0.04, 0.5);
    assert_eq!(greens_function(&m, 0.3, 0.3).unwrap(), 0.0);
    assert_eq!(greens_function(&m, 0.8, 0.3).unwrap(), 0.0);
    assert!(greens_function(&m, -0.2, 0.3).unwrap() != 0.0);
    assert!(matches!(greens_function(&m, m.gamma, 0.0), Err(SquareWellError::Domain(_))));
    let mut rng = 0x2545_f491_4f6c_dd1du64;
    for _ in 0..20 {
        rng ^= rng << 13;
        rng ^= rng >> 7;
        rng ^= rng << 17;
        let x = (rng as f64 / u64::MAX as f64 * 2.0 - 1.0) * 0.999 * m.gamma;
        let w = wronskian(&m, x).unwrap();
        assert!((w - 1.0).abs() < 1e-9, "x={x}: {w}");
    }
}

#[test]
fn greens_function_inverts_the_operator() {
    let m = model(0.04, 0.5);
    let gap = m.gap();
    let u = |x: f64| m.potential(x) + if x < 0.0 { gap } else { 0.0 } - m.e_a;
    let z = 0.537;
    let h = 1e-3;
    let g = |y: f64| greens_function(&m, y, z).unwrap();
    let apply = |x: f64| -0.5 * (g(x + h) - 2.0 * g(x) + g(x - h)) / (h * h) + u(x) * g(x);
    assert!((apply(z) * h - 1.0).abs() < 1e-3);
    // away from z the residual is truncation error, small against the potential term
    for x in [z - 0.1, 0.2, -0.3, -1.2] {
        assert!(apply(x).abs() < 1e-4 * (u(x) * g(x)).abs(), "x={x}: {}", apply(x));
    }
    assert_eq!(apply(z + 0.2), 0.0);
}

#[test]
fn first_step_closed_forms() {
    let m = model(0.05, 1.0);
    let grid = square_well_grid(&m, 400.0).unwrap();
    let run = iterate_squarewell(&m, &grid, IterOptions::default()).unwrap();
    assert!((run.m0_quad / run.m0_closed - 1.0).abs() < 1e-8);
    assert!((run.n0_quad / run.n0_closed - 1.0).abs() < 1e-8);
    let e1 = run.trace.states[1].e_n;
    assert!((e1 - run.e1_closed).abs() < 1e-10 * e1);
    assert_eq!(run.trace.stop_reason, StopReason::Tolerance);
    assert!((run.trace.e_limit.unwrap() - m.e).abs() < 5e-7);
}

#[test]
fn two_level_formula_error_is_quartic_in_mu() {
    for alpha in [0.5, 1.0] {
        let dev = |mu_sq: f64| {
            let m = model(mu_sq, alpha);
            let (_, _, e1) = first_step_closed_form(&m);
            (e1 - m.e_b - 0.5 * m.gap()).abs()
        };
        let exps: Vec<f64> = [0.04, 0.02, 0.01].windows(2).map(|w| (dev(w[0]) / dev(w[1])).ln() / 2f64.ln()).collect();
        for e in exps {
            assert!((e - 2.0).abs() < 0.3, "α={alpha}: {e}");
        }
    }
}

#[test]
fn region_solution_matches_engine() {
    for (mu_sq, alpha) in [(0.05, 1.0), (0.04, 0.5)] {
        let m = model(mu_sq, alpha);
        let grid = square_well_grid(&m, 400.0).unwrap();
        let run = iterate_squarewell(&m, &grid, IterOptions::fixed(1)).unwrap();
        let rs = region_solution_n1(&m).unwrap();
        assert!((rs.e1 - run.e1_closed).abs() < 1e-10 * rs.e1);
        let f1 = &run.trace.states[1].f;
        let (mut worst, mut scale) = (0.0f64, 0.0f64);
        for (i, &x) in grid.nodes().iter().enumerate() {
            let engine = m.chi(x).unwrap().0 * f1.value(i);
            let table = rs.eval(x).unwrap().0;
            worst = worst.max((engine - table).abs());
            scale = scale.max(table.abs());
        }
        assert!(worst < 1e-6 * scale, "μ²={mu_sq}: {}", worst / scale);
        for b in [m.alpha, 0.0, -m.alpha] {
            let lo = rs.eval(b - 1e-13).unwrap();
            let hi = rs.eval(b + 1e-13).unwrap();
            assert!((lo.0 - hi.0).abs() < 1e-10 * scale, "ψ₁ jumps at {b}");
        }
        let xi = m.k_a * 0.3;
        let c_a = (m.q_a * m.alpha).cosh() / (m.k_a * m.beta).sin();
        let e = rs.eps[0];
        let row1 = c_a * ((1.0 + 0.5 * e) * xi.sin() - 0.5 * e * xi * xi.cos());
        assert!((rs.eval(m.gamma - 0.3).unwrap().0 - row1).abs() < 1e-12 * row1.abs());
    }
}

#[test]
fn region_solution_symmetric_pattern() {
    let m = solve_asymmetric(10.0, 0.0, 0.5, 1.0).unwrap();
    let rs = region_solution_n1(&m).unwrap();
    assert!(rs.kappa_ii.abs() < 1e-10);
    assert!((rs.rho_ii - 1.0).abs() < 1e-10);
}

#[test]
fn oracle_reproduces_transcendental_energy() {
    let m = model(0.05, 1.0);
    let o = fd_ground_state(&|x| m.potential(x), &Mesh::with_density(-m.gamma, m.gamma, 800.0)).unwrap();
    assert!((o.e_ground - m.e).abs() < 1e-5);
    assert!((o.best() - m.e).abs() < 1e-7);
}

#[test]
fn two_level_regimes_match_the_square_well() {
    let m = model(0.04, 0.5);
    let e_inf = 0.5 * m.p_inf * m.p_inf;
    let pred = 2.0 * m.lambda * m.lambda / 0.04;
    assert!(((e_inf - m.e) - pred).abs() / pred < 0.05);
    let t = two_level(e_inf, m.lambda, 0.04);
    assert!(((e_inf - t.e) - pred).abs() / pred < 0.05);
    let m = model(1e-3, 0.3);
    assert!(4.0 * m.lambda > 10.0 * 1e-3);
    assert!((m.e - m.e_b - 0.5 * m.gap()).abs() < 0.05 * m.gap());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn solved_models_are_consistent(mu_sq in 1e-3f64..5.0, alpha in 0.2f64..1.2, w in 6.0f64..14.0) {
        let m = solve_asymmetric(w, mu_sq.sqrt(), alpha, 1.0).unwrap();
        prop_assert!(m.e < m.e_a && m.e < m.e_od && m.e_b < m.e);
        prop_assert!(m.delta > 0.0);
        prop_assert!((m.k_sq + mu_sq + m.q * m.q - w * w).abs() < 1e-12 * w * w);
        prop_assert!(m.residuals.iter().all(|r| r.abs() < 1e-12));
        let t = two_level(0.5 * m.p_inf * m.p_inf, m.lambda, mu_sq);
        prop_assert!(t.eigen_residual() < 1e-12);
        prop_assert!((t.e_od - t.e_b - 2.0 * m.lambda).abs() < 1e-15);
    }
}
