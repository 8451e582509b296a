use hierarchy_solver::certify::certify_trace;
use hierarchy_solver::config::{CaseName, EngineConfig, ExperimentConfig, Format, GridConfig, Problem};
use hierarchy_solver::solve::{run, Status};
use hierarchy_solver::trace::Trace;
use proptest::prelude::*;

fn config(problem: Problem, case: CaseName, density: f64, max_iter: usize) -> ExperimentConfig {
    ExperimentConfig {
        problem,
        case,
        grid: GridConfig { density, x_max: None },
        engine: EngineConfig { max_iter, ..Default::default() },
        format: Format::Csv,
    }
}

fn problems() -> impl Strategy<Value = Problem> {
    prop_oneof![
        (0.5f64..4.0).prop_map(|g| Problem::Harmonic { g }),
        (1.0f64..6.0).prop_map(|g| Problem::SymQuartic { g }),
        (3.0f64..8.0, 0.0f64..0.4).prop_map(|(g, lambda)| Problem::AsymQuartic { g, lambda }),
        (0.0f64..0.5, 0.3f64..1.0).prop_map(|(mu, alpha)| Problem::Squarewell { w: 10.0, mu, alpha, beta: 1.0 }),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn identical_configs_give_identical_bytes(p in problems(), b in any::<bool>(), it in 2usize..20) {
        let case = if b { CaseName::B } else { CaseName::A };
        let cfg = config(p, case, 120.0, it);
        if let (Ok(a), Ok(b)) = (run(&cfg), run(&cfg)) {
            prop_assert_eq!(a.trace.render(Format::Csv), b.trace.render(Format::Csv));
            prop_assert_eq!(a.trace.render(Format::Json), b.trace.render(Format::Json));
            prop_assert_eq!(&a.trace.config_hash, &cfg.hash());
        }
    }

    #[test]
    fn zero_exit_implies_certified(p in problems(), b in any::<bool>()) {
        let case = if b { CaseName::B } else { CaseName::A };
        let cfg = config(p, case, 120.0, 64);
        if let Ok(out) = run(&cfg) {
            let csv = Trace::parse(&out.trace.to_csv()).unwrap();
            let energies_ok = certify_trace(&csv).passed();
            let full_ok = certify_trace(&out.trace).passed();
            if out.status == Status::Converged || out.status == Status::MaxIter {
                prop_assert!(energies_ok && full_ok);
            }
            if !full_ok {
                prop_assert_ne!(out.status.exit_code(), 0);
            }
        }
    }

    #[test]
    fn lambda_at_or_above_one_is_rejected(lambda in 1.0f64..10.0, g in 2.0f64..10.0) {
        let cfg = config(Problem::AsymQuartic { g, lambda }, CaseName::A, 120.0, 8);
        prop_assert!(cfg.validate().is_err());
        prop_assert!(run(&cfg).is_err());
    }
}
