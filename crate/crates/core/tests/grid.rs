use std::sync::Arc;

use hierarchy_core::grid::*;
use hierarchy_core::hierarchy::energy_update;
use hierarchy_core::trialgen::{build_symmetric_quartic_trial, quartic_half_grid};
use proptest::prelude::*;

fn half(x_max: f64, density: f64, bps: &[f64]) -> Arc<Grid> {
    Arc::new(make_grid(Domain::HalfLine { x_max }, density, bps).unwrap())
}

#[test]
fn half_line_node_count() {
    let g = half(10.0, 100.0, &[]);
    assert_eq!(g.len(), 1001);
    assert_eq!(g.nodes()[0], 0.0);
    assert_eq!(g.x_max(), 10.0);
}

#[test]
fn full_line_origin_is_node() {
    let g = make_grid(Domain::FullLine { x_min: -6.0, x_max: 6.0 }, 100.0, &[-1.0, 0.0, 1.0]).unwrap();
    for b in [-1.0, 0.0, 1.0] {
        let i = g.index_of(b).unwrap();
        assert_eq!(g.nodes()[i].to_bits(), (b as f64).to_bits());
        assert!(g.is_breakpoint(i));
    }
}

#[test]
fn cumulative_of_one() {
    let g = half(10.0, 50.0, &[1.0]);
    let c = cumulative_from(&Samples::constant(&g, 1.0), Origin::LeftEdge).unwrap();
    assert!((c.value(g.index_of(3.0).unwrap()) - 3.0).abs() < 1e-12);
    assert_eq!(c.value(0), 0.0);
    let z = cumulative_from(&Samples::constant(&g, 0.0), Origin::RightEdge).unwrap();
    assert!(z.values().iter().all(|&v| v == 0.0));
}

#[test]
fn normalized_bracket_of_one() {
    let g = half(8.0, 200.0, &[]);
    let raw = Samples::from_fn(&g, |x| (-x * x).exp());
    let norm = integrate(&raw).unwrap();
    let phi_sq = raw.map(|v| v / norm);
    assert!((bracket(&Samples::constant(&g, 1.0), &phi_sq).unwrap() - 1.0).abs() < 1e-12);
    let c = 3.7;
    let b1 = bracket(&Samples::constant(&g, 1.0), &phi_sq).unwrap();
    let bc = bracket(&Samples::constant(&g, c), &phi_sq).unwrap();
    assert!((bc - c * b1).abs() < 1e-14);
}

#[test]
fn quartic_bracket_matches_first_shift() {
    let grid = quartic_half_grid(2.0, 400.0, None).unwrap();
    let t = build_symmetric_quartic_trial(2.0, &grid).unwrap();
    let ps = t.phi_sq_scaled();
    let one = Samples::constant(&grid, 1.0);
    let ratio = bracket(&t.w, &ps).unwrap() / bracket(&one, &ps).unwrap();
    assert!(ratio > 0.0);
    let e1 = energy_update(&t.w, &one, &t.log_phi).unwrap();
    assert!((ratio - e1).abs() < 1e-12 * e1, "{ratio} vs {e1}");
}

#[test]
fn gaussian_convergence_order() {
    let exact = std::f64::consts::PI.sqrt() / 2.0;
    for rule in [Rule::Trapezoid, Rule::Cubic] {
        let err = |d: f64| {
            let g = Arc::new(make_grid_with_rule(Domain::HalfLine { x_max: 10.0 }, d, &[0.7], rule).unwrap());
            (integrate(&Samples::from_fn(&g, |x| (-x * x).exp())).unwrap() - exact).abs()
        };
        let (e1, e2) = (err(5.0), err(10.0));
        let order = (e1 / e2).log2();
        assert!(order >= 1.9, "{rule:?}: order {order}");
    }
}

#[test]
fn log_amplitude_integrand_rejected() {
    let g = half(2.0, 10.0, &[]);
    let l = Samples::new(g.clone(), vec![0.0; g.len()], SampleKind::LogAmplitude);
    assert!(integrate(&l).is_err());
}

proptest! {
    #[test]
    fn integrate_is_linear(
        a in -5.0f64..5.0,
        b in -5.0f64..5.0,
        c1 in proptest::collection::vec(-2.0f64..2.0, 4),
        c2 in proptest::collection::vec(-2.0f64..2.0, 4),
        bp in 0.1f64..2.9,
    ) {
        let g = half(3.0, 40.0, &[bp]);
        let poly = |c: &[f64]| {
            let c = c.to_vec();
            move |x: f64| c[0] + c[1] * x.sin() + c[2] * (c[3] * x).cos()
        };
        let f = Samples::from_fn(&g, poly(&c1));
        let h = Samples::from_fn(&g, poly(&c2));
        let mix = f.zip(&h, |u, v| a * u + b * v).unwrap();
        let lhs = integrate(&mix).unwrap();
        let (i_f, i_h) = (integrate(&f).unwrap(), integrate(&h).unwrap());
        let scale = 1.0 + (a * i_f).abs() + (b * i_h).abs();
        prop_assert!((lhs - a * i_f - b * i_h).abs() < 1e-12 * scale);
    }

    #[test]
    fn cumulative_end_is_total(
        x_max in 1.0f64..12.0,
        density in 5.0f64..80.0,
        k in 0.1f64..3.0,
        bp_frac in 0.05f64..0.95,
    ) {
        let g = half(x_max, density, &[bp_frac * x_max]);
        let f = Samples::from_fn(&g, |x| (k * x).sin() + x * x);
        let c = cumulative_from(&f, Origin::LeftEdge).unwrap();
        prop_assert_eq!(c.value(g.len() - 1).to_bits(), integrate(&f).unwrap().to_bits());
        prop_assert_eq!(c.value(0), 0.0);
        let r = cumulative_from(&f, Origin::RightEdge).unwrap();
        prop_assert_eq!(r.value(g.len() - 1), 0.0);
    }

    #[test]
    fn nodes_ascend_and_hold_breakpoints(
        x_max in 1.0f64..20.0,
        density in 1.0f64..60.0,
        fracs in proptest::collection::vec(0.01f64..0.99, 0..5),
    ) {
        let bps: Vec<f64> = fracs.iter().map(|f| f * x_max).collect();
        let g = half(x_max, density, &bps);
        prop_assert!(g.nodes().windows(2).all(|w| w[0] < w[1]));
        for b in &bps {
            let i = g.index_of(*b);
            prop_assert!(i.is_some());
            prop_assert_eq!(g.nodes()[i.unwrap()].to_bits(), b.to_bits());
        }
    }
}
