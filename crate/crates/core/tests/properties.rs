use std::collections::BTreeMap;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tamc_core::eltl::{parse_spec, print_spec};
use tamc_core::generators::{
    parse_dimacs, parse_qdimacs_lite, print_dimacs, print_qdimacs_lite, random_cnf, random_sigma2,
    random_ta, RandomTaCaps,
};
use tamc_core::presburger::SolverConfig;
use tamc_core::reach::{solve_reach, ApplEncoding, InitSpec, ReachOutcome, ReachQuery};
use tamc_core::semantics::{apply, context, enables, initial_configs, OracleLimits};
use tamc_core::ta::{normalize_guard, parse_ta, print_ta, Guard, GuardKind, LinearExpr, Rational};

fn ta_from(seed: u64) -> tamc_core::ta::ThresholdAutomaton {
    random_ta(&mut ChaCha8Rng::seed_from_u64(seed), RandomTaCaps::default())
}

proptest! {
    #[test]
    fn automata_round_trip(seed in any::<u64>()) {
        let ta = ta_from(seed);
        let back = parse_ta(&print_ta(&ta)).unwrap().into_concrete().unwrap();
        prop_assert_eq!(back, ta);
    }

    #[test]
    fn formulas_round_trip(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = random_cnf(&mut rng, 5, 6);
        prop_assert_eq!(parse_dimacs(&print_dimacs(&f)).unwrap(), f);
        let q = random_sigma2(&mut rng, 3, 2, 3);
        prop_assert_eq!(parse_qdimacs_lite(&print_qdimacs_lite(&q)).unwrap(), q);
    }

    #[test]
    fn specs_round_trip(seed in any::<u64>(), a in 0usize..5, b in 0usize..5) {
        let ta = ta_from(seed);
        let n = ta.locations.len();
        let (a, b) = (&ta.locations[a % n], &ta.locations[b % n]);
        let x = &ta.shared[0];
        let text = format!("(and (eq0 {a}) (F (G (or (not (eq0 {b})) (ge {x} (/ n 2))))) (G (lt {x} 3)))");
        let f = parse_spec(&text, &ta).unwrap();
        let printed = print_spec(&f, &ta);
        prop_assert_eq!(parse_spec(&printed, &ta).unwrap(), f);
    }

    #[test]
    fn normalized_guards_agree(
        num in -6i64..6, den in 1i64..5, cn in -6i64..6, cd in 1i64..5,
        rise in any::<bool>(), value in 0u64..20, p in 0u64..10,
    ) {
        let rhs = LinearExpr::with_coeffs(Rational::new(cn, cd), [(0, Rational::new(num, den))]);
        let g = Guard { var: 0, kind: if rise { GuardKind::Rise } else { GuardKind::Fall }, rhs: rhs.clone() };
        let exact = Rational::from_integer(value as i64) >= rhs.eval(&[p]);
        prop_assert_eq!(normalize_guard(&g).holds(value, &[p]), exact == rise);
    }

    /// Along random runs: process count is constant, shared variables never
    /// decrease and the context only grows.
    #[test]
    fn runs_conserve_and_are_monotone(seed in any::<u64>(), choices in proptest::collection::vec(any::<u16>(), 0..16)) {
        let ta = ta_from(seed);
        let inits = initial_configs(&ta, &vec![(0, 4); ta.env.params.len()], OracleLimits::default()).unwrap();
        prop_assume!(!inits.is_empty());
        let guards = ta.guard_set();
        let mut sigma = inits[seed as usize % inits.len()].clone();
        let total = sigma.processes();
        for c in choices {
            let enabled: Vec<usize> = (0..ta.rules.len()).filter(|&r| enables(&ta, &sigma, r)).collect();
            if enabled.is_empty() {
                break;
            }
            let next = apply(&ta, &sigma, enabled[c as usize % enabled.len()]).unwrap();
            prop_assert_eq!(next.processes(), total);
            prop_assert!(next.globals.iter().zip(&sigma.globals).all(|(a, b)| a >= b));
            prop_assert!(context(&guards, &sigma).is_subset(&context(&guards, &next)));
            sigma = next;
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn rank_and_chain_encodings_agree(seed in any::<u64>(), bound in 1u64..5) {
        let ta = ta_from(seed);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
        let pos = vec![rng.gen_range(0..ta.locations.len())];
        let outcome = |appl| {
            let q = ReachQuery {
                init: InitSpec::Parameterized(Some(vec![(0, 4); ta.env.params.len()])),
                zero: vec![],
                pos: pos.clone(),
                bound: Some(bound),
                appl,
            };
            matches!(solve_reach(&ta, &q, &SolverConfig::default()).unwrap(), ReachOutcome::Reachable(_))
        };
        prop_assert_eq!(outcome(ApplEncoding::Rank), outcome(ApplEncoding::Chains));
    }
}

#[test]
fn constant_guards_have_unit_scale() {
    let g = Guard { var: 0, kind: GuardKind::Rise, rhs: LinearExpr { constant: Rational::from_integer(2), coeffs: BTreeMap::new() } };
    assert_eq!(normalize_guard(&g).scale, 1);
}
