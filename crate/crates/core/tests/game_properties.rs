mod common;

use proptest::prelude::*;

use stratclass::game::{
    best_response, best_responses, effective_labels, jury_payoff, CandidateSet, Classifier, Label,
    Search, Target,
};

fn labeling(n: usize) -> impl Strategy<Value = Classifier<f64>> {
    prop::collection::vec(any::<bool>(), n).prop_map(|v| Classifier::Tabular {
        labels: v.into_iter().map(Label::from_bool).collect(),
    })
}

fn instance() -> impl Strategy<
    Value = (
        stratclass::Population64,
        stratclass::CostModel64,
        Classifier<f64>,
    ),
> {
    common::tabular_instance(12).prop_flat_map(|(p, c)| {
        let n = p.len();
        (Just(p), Just(c), labeling(n))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn best_response_is_optimal((pop, c, f) in instance()) {
        for i in 0..pop.len() {
            let x = pop.site(i);
            let r = best_response(x, &f, &c, CandidateSet::Population(&pop)).unwrap();
            let value = r.label.value::<f64>() - r.cost;
            for j in 0..pop.len() {
                let y = pop.site(j);
                let alt = f.predict(y).unwrap().value::<f64>() - c.eval(x, y).unwrap();
                prop_assert!(value >= alt);
            }
        }
    }

    #[test]
    fn move_rule((pop, c, f) in instance()) {
        for i in 0..pop.len() {
            let x = pop.site(i);
            let r = best_response(x, &f, &c, CandidateSet::Population(&pop)).unwrap();
            let here = f.predict(x).unwrap();
            if here.is_pos() {
                prop_assert!(!r.moved && r.cost == 0.0 && r.target == Target::Member(i));
            }
            if r.moved {
                let Target::Member(j) = r.target else { unreachable!() };
                prop_assert!(r.cost < 2.0);
                prop_assert!(!here.is_pos() && f.predict(pop.site(j)).unwrap().is_pos());
            } else {
                prop_assert_eq!(r.cost, 0.0);
                prop_assert_eq!(r.target, Target::Member(i));
            }
        }
    }

    #[test]
    fn accepted_iff_cheap_accepted_candidate((pop, c, f) in instance()) {
        let eff = effective_labels(&f, &c, &pop, Search::Population).unwrap();
        for (i, e) in eff.iter().enumerate() {
            let reach = (0..pop.len()).any(|j| {
                f.predict(pop.site(j)).unwrap().is_pos() && c.eval(pop.site(i), pop.site(j)).unwrap() < 2.0
            });
            prop_assert_eq!(e.is_pos(), reach);
        }
    }

    #[test]
    fn deterministic_and_order_free((pop, c, f) in instance()) {
        let a = best_responses(&f, &c, &pop, Search::Population).unwrap();
        prop_assert_eq!(&a, &best_responses(&f, &c, &pop, Search::Population).unwrap());
        // evaluating members one at a time, backwards, gives the same outcomes
        for i in (0..pop.len()).rev() {
            let r = best_response(pop.site(i), &f, &c, CandidateSet::Population(&pop)).unwrap();
            prop_assert_eq!(&r, &a[i]);
        }
        let p = jury_payoff(&f, &c, &pop, Search::Population).unwrap();
        prop_assert!((0.0..=1.0).contains(&p));
    }
}
