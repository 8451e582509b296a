use std::sync::Arc;

use hierarchy_core::grid::*;
use hierarchy_core::hierarchy::*;
use hierarchy_core::oracle::{fd_ground_state, Mesh};
use hierarchy_core::trialgen::*;
use proptest::prelude::*;

fn quartic(g: f64, density: f64) -> TrialFunction {
    let grid = quartic_half_grid(g, density, None).unwrap();
    build_symmetric_quartic_trial(g, &grid).unwrap()
}

fn quartic_oracle(g: f64, lambda: f64, density: f64) -> f64 {
    let xm = quartic_x_max(g);
    let v = move |x: f64| 0.5 * g * g * (x * x - 1.0).powi(2) + g * lambda * x;
    fd_ground_state(&v, &Mesh::with_density(-xm, xm, density)).unwrap().best()
}

fn interior(n: usize) -> std::ops::Range<usize> {
    1..n - 1
}

#[test]
fn harmonic_is_a_fixed_point() {
    for g in [1.0, 2.0] {
        let grid = quartic_half_grid(g, 200.0, None).unwrap();
        let t = build_harmonic_trial(g, &grid).unwrap();
        let tr = iterate(&t, Case::A, IterOptions::default()).unwrap();
        assert_eq!(tr.stop_reason, StopReason::Tolerance);
        assert_eq!(tr.states.len(), 2);
        assert!(tr.shifts().iter().all(|&e| e == 0.0));
        assert!(tr.last().f.values().iter().all(|&f| f == 1.0));
        assert!((tr.e_limit.unwrap() - g / 2.0).abs() < 1e-10);
        let rep = certify(&tr, Case::A);
        assert!(rep.passed());
        assert_eq!(rep.degenerate.as_deref(), Some("degenerate: w ≡ 0"));
    }
}

#[test]
fn energy_update_basics() {
    let t = quartic(2.0, 200.0);
    let grid = t.grid.clone();
    let one = Samples::constant(&grid, 1.0);
    let c = Samples::constant(&grid, 0.37);
    let f = Samples::from_fn(&grid, |x| 1.0 + 0.5 * (-x).exp());
    assert!((energy_update(&c, &f, &t.log_phi).unwrap() - 0.37).abs() < 1e-15);
    let e1 = energy_update(&t.w, &one, &t.log_phi).unwrap();
    assert!((e1 - 0.551597704365063).abs() < 1e-6, "{e1}");
    let mut bad = one.values().to_vec();
    bad[10] = -1e-3;
    let bad = Samples::plain(grid, bad);
    assert!(matches!(energy_update(&t.w, &bad, &t.log_phi), Err(HierarchyError::Positivity { node: 10, .. })));
}

#[test]
fn first_shift_regression() {
    let t = quartic(2.0, 400.0);
    let e1 = energy_update(&t.w, &Samples::constant(&t.grid, 1.0), &t.log_phi).unwrap();
    assert!((e1 - 0.551597704365063).abs() < 1e-12, "{e1}");
}

#[test]
fn displacement_of_constant_w_vanishes() {
    let t = quartic(2.0, 200.0);
    let one = Samples::constant(&t.grid, 1.0);
    let c = Samples::constant(&t.grid, 0.8);
    let d = displacement(&c, &one, &t.log_phi, 0.8).unwrap();
    assert!(d.d.values().iter().all(|&v| v == 0.0));
    let fa = f_update_case_a(&d);
    let fb = f_update_case_b(&d).unwrap();
    assert!(fa.values().iter().chain(fb.values()).all(|&v| v == 1.0));
}

#[test]
fn wrong_shift_breaks_charge_balance() {
    let t = quartic(2.0, 200.0);
    let one = Samples::constant(&t.grid, 1.0);
    let e1 = energy_update(&t.w, &one, &t.log_phi).unwrap();
    assert!(matches!(displacement(&t.w, &one, &t.log_phi, e1 * 1.01), Err(HierarchyError::ChargeBalance(_))));
}

#[test]
fn first_displacement_is_positive_and_peaks_at_crossing() {
    let t = quartic(2.0, 400.0);
    let one = Samples::constant(&t.grid, 1.0);
    let e1 = energy_update(&t.w, &one, &t.log_phi).unwrap();
    let d = displacement(&t.w, &one, &t.log_phi, e1).unwrap();
    let dv = d.d.values();
    let n = dv.len();
    let dmax = dv.iter().cloned().fold(0.0, f64::max);
    assert!(interior(n).all(|i| dv[i] > 0.0));
    assert_eq!(dv[0], 0.0);
    assert!(dv[n - 1].abs() < 1e-10 * dmax);
    let peak = (0..n).max_by(|&a, &b| dv[a].total_cmp(&dv[b])).unwrap();
    // w - ℰ₁ changes sign between peak - 1 and peak + 1
    let s = |i: usize| t.w.value(i) - e1;
    let r = |i: usize| t.w.right_value(i) - e1;
    assert!(s(peak - 1) > 0.0 || r(peak - 1) > 0.0);
    assert!(s(peak + 1) < 0.0);
}

#[test]
fn first_iterates_have_the_right_shape() {
    let t = quartic(2.0, 400.0);
    let one = Samples::constant(&t.grid, 1.0);
    let e1 = energy_update(&t.w, &one, &t.log_phi).unwrap();
    let d = displacement(&t.w, &one, &t.log_phi, e1).unwrap();
    let fa = f_update_case_a(&d);
    let fb = f_update_case_b(&d).unwrap();
    let (a, b) = (fa.values(), fb.values());
    let n = a.len();
    assert_eq!(a[n - 1], 1.0);
    assert_eq!(b[0], 1.0);
    assert!(interior(n).all(|i| a[0] > a[i] && a[i] > 1.0));
    assert!(interior(n).all(|i| 1.0 > b[i] && b[i] > b[n - 1]));
    assert!(b[n - 1] > 0.0);
}

#[test]
fn case_a_ascends_and_case_b_alternates() {
    let t = quartic(2.0, 400.0);
    let a = iterate(&t, Case::A, IterOptions::default()).unwrap();
    let e = a.shifts();
    assert!(e.windows(2).skip(1).take(8).all(|w| w[1] > w[0]));
    let b = iterate(&t, Case::B, IterOptions::default()).unwrap();
    let s = b.shifts();
    assert!(s[1] < s[3]);
    assert!(s[2] > s[4]);
    assert!(s[2] > s[3]);
    assert!(a.converged && b.converged);
    let tol = 1e-10 * t.e0;
    assert!((a.e_limit.unwrap() - b.e_limit.unwrap()).abs() < 2.0 * tol);
}

#[test]
fn iterations_stop_on_tolerance() {
    for g in [2.0, 4.0] {
        let t = quartic(g, 400.0);
        for case in [Case::A, Case::B] {
            let tr = iterate(&t, case, IterOptions::default()).unwrap();
            assert_eq!(tr.stop_reason, StopReason::Tolerance, "g={g} {case:?}");
            assert_eq!(tr.states[0].f.values().iter().filter(|&&f| f != 1.0).count(), 0);
        }
    }
}

#[test]
fn limit_is_a_fixed_point() {
    let t = quartic(2.0, 400.0);
    let tr = iterate(&t, Case::A, IterOptions::default()).unwrap();
    let f = tr.f_limit.clone().unwrap();
    let again = energy_update(&t.w, &f, &t.log_phi).unwrap();
    assert!((again - tr.last().e_shift).abs() < 1e-10 * t.e0);
}

#[test]
fn shifts_stay_inside_bounds() {
    for case in [Case::A, Case::B] {
        let t = quartic(2.0, 400.0);
        let tr = iterate(&t, case, IterOptions::default()).unwrap();
        let w0 = t.w.value(0);
        assert!(tr.states.iter().skip(1).all(|s| s.e_shift > 0.0 && s.e_shift < w0));
    }
}

#[test]
fn f_decreases_when_previous_f_is_positive() {
    for case in [Case::A, Case::B] {
        let t = quartic(2.0, 400.0);
        let tr = iterate(&t, case, IterOptions::fixed(8)).unwrap();
        for pair in tr.states.windows(2) {
            if pair[0].f.values().iter().all(|&v| v > 0.0) {
                let f = pair[1].f.values();
                assert!(f.windows(2).all(|w| w[1] < w[0]), "{case:?} n={}", pair[1].n);
            }
        }
    }
}

#[test]
fn charge_balance_every_step() {
    for case in [Case::A, Case::B] {
        let t = quartic(2.0, 400.0);
        let tr = iterate(&t, case, IterOptions::default()).unwrap();
        for s in tr.states.iter().skip(1) {
            assert!(s.charge_residual < 1e-12, "{case:?} n={} {}", s.n, s.charge_residual);
            let d = s.d.values();
            let dmax = d.iter().cloned().fold(0.0, f64::max);
            assert!(d[0].abs() <= 1e-10 * dmax && d[d.len() - 1].abs() <= 1e-10 * dmax);
        }
    }
}

#[test]
fn case_a_certifies_strictly() {
    for g in [2.0, 4.0] {
        let t = quartic(g, 400.0);
        let tr = iterate(&t, Case::A, IterOptions::fixed(8)).unwrap();
        let rep = certify(&tr, Case::A);
        assert!(rep.strict(), "g={g}: {:?}", rep.failures());
        assert!(rep.worst_margin > 0.0);
    }
}

#[test]
fn swapped_shifts_fail_certification() {
    let t = quartic(2.0, 400.0);
    let mut tr = iterate(&t, Case::A, IterOptions::fixed(8)).unwrap();
    let (a, b) = (tr.states[2].e_shift, tr.states[3].e_shift);
    tr.states[2].e_shift = b;
    tr.states[3].e_shift = a;
    let rep = certify(&tr, Case::A);
    assert!(!rep.passed());
    let bad = rep.failures();
    assert!(bad.iter().any(|c| c.label == "shift ascending" && c.n == 2 && c.m == 3));
}

#[test]
fn certification_is_reproducible() {
    let t = quartic(2.0, 300.0);
    let tr = iterate(&t, Case::B, IterOptions::fixed(10)).unwrap();
    assert_eq!(certify(&tr, Case::B), certify(&tr, Case::B));
}

#[test]
fn case_b_brackets_the_oracle() {
    let t = quartic(2.0, 400.0);
    let tr = iterate(&t, Case::B, IterOptions::default()).unwrap();
    let rep = certify(&tr, Case::B);
    assert!(rep.passed(), "{:?}", rep.failures());
    let oracle = quartic_oracle(2.0, 0.0, 400.0);
    let iv = tr.case_b_intervals();
    assert!(iv.len() >= 4);
    for &(n, lo, hi) in &iv {
        assert!(lo <= oracle && oracle <= hi, "n={n}: [{lo}, {hi}] vs {oracle}");
    }
    assert!(iv.windows(2).all(|w| w[1].2 - w[1].1 <= w[0].2 - w[0].1));
}

#[test]
fn case_a_matches_oracle() {
    let t = quartic(2.0, 400.0);
    let tr = iterate(&t, Case::A, IterOptions::default()).unwrap();
    let oracle = quartic_oracle(2.0, 0.0, 400.0);
    assert!((tr.e_limit.unwrap() - oracle).abs() < 1e-5);
}

#[test]
fn non_monotone_w_is_rejected() {
    let mut t = quartic(2.0, 100.0);
    let mut w = t.w.values().to_vec();
    w[50] += 1.0;
    t.w = Samples::plain(t.grid.clone(), w);
    assert!(matches!(iterate(&t, Case::A, IterOptions::default()), Err(HierarchyError::NotMonotone(_))));
}

fn tilted(g: f64, lambda: f64, density: f64) -> (TrialFunction, TrialFunction) {
    let grid = quartic_half_grid(g, density, None).unwrap();
    build_asymmetric_quartic_trial(g, lambda, &grid, &grid).unwrap()
}

#[test]
fn symmetric_pair_has_equal_halves() {
    let (tp, tm) = tilted(3.0, 0.0, 200.0);
    let half = solve_half_line_pair(&tp, &tm, IterOptions::default()).unwrap();
    assert!((half.e_plus - half.e_minus).abs() < 1e-12);
    let p = glue_full_line(&half, &tp, &tm).unwrap();
    assert!(p.w_step.values().iter().all(|&v| v == 0.0));
    assert_eq!(p.e_hat0, p.e_a);
    assert_eq!(p.e_a, p.e_b);
    let tr = iterate_full_line(&p, Boundary::AtPlusInf, IterOptions::default()).unwrap();
    assert!(tr.shifts().iter().all(|&e| e == 0.0));
    assert_eq!(tr.last().e_n, p.e_hat0);
}

#[test]
fn tilted_well_half_lines() {
    let (tp, tm) = tilted(5.0, 0.2, 400.0);
    let half = solve_half_line_pair(&tp, &tm, IterOptions::default()).unwrap();
    assert!(half.e_plus > half.e_minus);
    let v0 = tp.w.value(0);
    assert!(half.trace_plus.states.iter().skip(1).all(|s| s.e_shift < v0));
    let p = glue_full_line(&half, &tp, &tm).unwrap();
    let gap = half.e_plus - half.e_minus;
    assert_eq!(p.e_hat0, half.e_plus);
    let grid = p.w_step.grid().clone();
    let zero = grid.index_of(0.0).unwrap();
    for i in 0..grid.len() {
        let v = p.w_step.value(i);
        if i < zero {
            assert_eq!(v, gap);
        } else if i > zero {
            assert_eq!(v, 0.0);
        }
    }
    assert_eq!(p.w_step.right_value(zero), 0.0);
}

#[test]
fn tilted_well_full_line() {
    let (tp, tm) = tilted(5.0, 0.2, 400.0);
    let res = full_line_pipeline(&tp, &tm, Boundary::AtPlusInf, IterOptions::default(), IterOptions::default()).unwrap();
    let e = res.trace.energies();
    assert!(e[1] > e[2] && e[2] > e[3]);
    assert_eq!(res.trace.case, Case::A);
    assert_eq!(res.trace.stop_reason, StopReason::Tolerance);
    let rep = certify(&res.trace, Case::A);
    assert!(rep.passed(), "{:?}", rep.failures());
    let oracle = quartic_oracle(5.0, 0.2, 400.0);
    assert!((res.trace.e_limit.unwrap() - oracle).abs() < 1e-5);
    assert!(res.trace.states.iter().skip(1).all(|s| s.charge_residual < 1e-10));
}

#[test]
fn tilted_well_case_b_reports_positivity() {
    let (tp, tm) = tilted(5.0, 0.2, 200.0);
    let res = full_line_pipeline(&tp, &tm, Boundary::AtMinusInf, IterOptions::default(), IterOptions::default()).unwrap();
    assert_eq!(res.trace.case, Case::B);
    assert_eq!(res.trace.stop_reason, StopReason::PositivityViolation);
    assert!(!res.trace.converged && res.trace.e_limit.is_none());
}

#[test]
fn shift_series_negative_controls() {
    let ok = ShiftSeries { case: Case::B, shifts: vec![0.0, 0.5, 0.7, 0.6, 0.65], w_max: 1.0 };
    let (energy, cross, bounds) = certify_shifts(&ok);
    assert!(energy.iter().chain(&cross).chain(&bounds).all(|c| c.verdict == Verdict::Pass));
    let bad = ShiftSeries { case: Case::B, shifts: vec![0.0, 0.5, 0.7, 0.75, 0.65], w_max: 1.0 };
    let (energy, cross, _) = certify_shifts(&bad);
    assert!(energy.iter().chain(&cross).any(|c| c.verdict == Verdict::Fail));
    let over = ShiftSeries { case: Case::A, shifts: vec![0.0, 0.5, 1.2], w_max: 1.0 };
    let (_, _, bounds) = certify_shifts(&over);
    assert!(bounds.iter().any(|c| c.verdict == Verdict::Fail && c.n == 2));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn quartic_invariants(g in 1.3f64..6.0, density in 120.0f64..220.0) {
        let grid: Arc<Grid> = quartic_half_grid(g, density, None).unwrap();
        let t = build_symmetric_quartic_trial(g, &grid).unwrap();
        let tr = iterate(&t, Case::A, IterOptions::fixed(5)).unwrap();
        let n = grid.len();
        for pair in tr.states.windows(2) {
            let s = &pair[1];
            prop_assert!(s.e_shift > pair[0].e_shift);
            prop_assert!(s.e_shift < t.w.value(0));
            prop_assert!(s.charge_residual < 1e-12);
            prop_assert_eq!(s.f.value(n - 1), 1.0);
            prop_assert!(interior(n).all(|i| s.d.value(i) > 0.0));
            prop_assert!(s.f.values().windows(2).all(|w| w[1] < w[0]));
            prop_assert!(interior(n).all(|i| s.f.value(i) > pair[0].f.value(i)));
        }
    }

    #[test]
    fn case_b_starts_at_one(g in 1.5f64..5.0) {
        let grid = quartic_half_grid(g, 150.0, None).unwrap();
        let t = build_symmetric_quartic_trial(g, &grid).unwrap();
        let tr = iterate(&t, Case::B, IterOptions::fixed(4)).unwrap();
        for s in tr.states.iter().skip(1) {
            prop_assert_eq!(s.f.value(0), 1.0);
        }
        let rep = certify(&tr, Case::B);
        prop_assert!(rep.passed(), "{:?}", rep.failures());
    }

    #[test]
    fn constant_w_gives_constant_shift(c in 0.01f64..3.0, g in 1.5f64..4.0) {
        let grid = quartic_half_grid(g, 80.0, None).unwrap();
        let t = build_symmetric_quartic_trial(g, &grid).unwrap();
        let f = Samples::from_fn(&grid, |x| 1.0 + (-x).exp());
        let e = energy_update(&Samples::constant(&grid, c), &f, &t.log_phi).unwrap();
        prop_assert!((e - c).abs() < 1e-14 * c.max(1.0));
    }
}
