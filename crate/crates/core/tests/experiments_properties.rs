use proptest::prelude::*;

use stratclass::costs::{scale_for_budget, CostModel};
use stratclass::experiments::{
    accuracy_under_gaming, generate_synthetic_population, normalize_features, perturb_direction,
    run_angle_sweep, run_gaming_sweep, sin_angle, ExperimentConfig, FeatureSchema, METHOD_BASELINE,
};
use stratclass::game::{effective_labels, Search};
use stratclass::learners::{plain_accuracy, train_baseline_linear, SvmParams};

fn small(seed: u64) -> ExperimentConfig {
    ExperimentConfig {
        epsilons: vec![0.0, 0.2],
        gaming_grid: vec![0.0, 0.5, 1.5],
        sin_theta_grid: vec![0.0, 0.25, 0.5],
        seeds: vec![seed],
        n_train: 70,
        n_test: 30,
        ..Default::default()
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn angle_fidelity(target in 0.0f64..0.99, seed in any::<u64>()) {
        let alpha = FeatureSchema::default().alpha();
        let p = perturb_direction(&alpha, target, seed).unwrap();
        prop_assert!((sin_angle(&alpha, &p) - target).abs() <= 1e-3);
    }

    #[test]
    fn normalization_is_idempotent(seed in any::<u64>(), sep in 0.0f64..6.0) {
        let pop = generate_synthetic_population(&FeatureSchema::default(), 40, seed, sep, 0.5).unwrap();
        let (once, _) = normalize_features(&pop).unwrap();
        let (twice, _) = normalize_features(&once).unwrap();
        for (a, b) in once.points().iter().zip(twice.points()) {
            for (x, y) in a.coords.iter().zip(&b.coords) {
                prop_assert!((x - y).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn movers_only_grow_with_budget(seed in any::<u64>(), eps in 0.0f64..=1.0) {
        let schema = FeatureSchema::default();
        let pop = generate_synthetic_population(&schema, 60, seed, 4.0, 0.5).unwrap();
        let f = train_baseline_linear(&pop.samples(), SvmParams::default()).unwrap().classifier();
        let c = CostModel::mixed(schema.alpha(), eps);
        let mut prev = vec![false; pop.len()];
        let mut false_accepts = 0;
        for k in 1..=10 {
            let s = scale_for_budget(&c, &(f64::from(k) * 0.3)).unwrap();
            let eff = effective_labels(&f, &s, &pop, Search::Analytic).unwrap();
            let acc: Vec<bool> = eff.iter().map(|l| l.is_pos()).collect();
            prop_assert!(prev.iter().zip(&acc).all(|(a, b)| !a || *b));
            let fa = acc.iter().zip(pop.labels()).filter(|(a, l)| **a && !l.is_pos()).count();
            prop_assert!(fa >= false_accepts);
            false_accepts = fa;
            prev = acc;
        }
    }

    #[test]
    fn tiny_budget_is_plain_accuracy(seed in any::<u64>(), eps in 0.0f64..=1.0) {
        let schema = FeatureSchema::default();
        let pop = generate_synthetic_population(&schema, 60, seed, 3.0, 0.5).unwrap();
        let f = train_baseline_linear(&pop.samples(), SvmParams::default()).unwrap().classifier();
        let c = CostModel::mixed(schema.alpha(), eps.max(0.05));
        let gamed = accuracy_under_gaming(&f, &pop, &c, 1e-9).unwrap();
        prop_assert_eq!(gamed, plain_accuracy(&f, &pop.samples()).unwrap());
    }
}

#[test]
fn sweeps_are_deterministic() {
    for seed in [0, 7] {
        let a = run_gaming_sweep(&small(seed)).unwrap();
        assert_eq!(a, run_gaming_sweep(&small(seed)).unwrap());
        assert_eq!(
            a,
            run_gaming_sweep(&ExperimentConfig {
                workers: 3,
                ..small(seed)
            })
            .unwrap()
        );
        let b = run_angle_sweep(&small(seed)).unwrap();
        assert_eq!(
            b,
            run_angle_sweep(&ExperimentConfig {
                workers: 3,
                ..small(seed)
            })
            .unwrap()
        );
        for r in &b {
            let target = [0.0, 0.25, 0.5]
                .iter()
                .map(|t| (t - r.sin_theta).abs())
                .fold(f64::MAX, f64::min);
            assert!(target <= 1e-3);
        }
    }
}

#[test]
fn tiny_budget_grid_reports_plain_accuracy() {
    let cfg = ExperimentConfig {
        gaming_grid: vec![0.0, 1e-9],
        epsilons: vec![0.2],
        ..small(3)
    };
    let rows = run_gaming_sweep(&cfg).unwrap();
    let at = |t: f64| {
        rows.iter()
            .find(|r| r.method == METHOD_BASELINE && r.t == t)
            .unwrap()
            .accuracy
    };
    assert_eq!(at(0.0), at(1e-9));
}
