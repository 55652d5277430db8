use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use tamc_core::cover::{cover, CoverMode, CoverOutcome};
use tamc_core::generators::{
    brute_sat, example_cnf, gen_3sat, nonparam_initial, random_cnf, Cnf3, SatVariant,
};
use tamc_core::presburger::SolverConfig;
use tamc_core::semantics::{explore_paths, initial_configs, oracle_search, run, OracleLimits};
use tamc_core::ta::ThresholdAutomaton;

fn l_f(ta: &ThresholdAutomaton) -> usize {
    ta.location_index("l_F").unwrap()
}

fn param_cover(f: &Cnf3) -> CoverOutcome {
    let ta = gen_3sat(f, SatVariant::Param);
    cover(&ta, l_f(&ta), &CoverMode::Parameterized, None, false, &SolverConfig::default()).unwrap()
}

#[test]
fn example_formula_is_coverable_with_replayable_witness() {
    let f = example_cnf();
    let ta = gen_3sat(&f, SatVariant::Param);
    let CoverOutcome::Coverable(Some(w)) = param_cover(&f) else { panic!() };
    let end = run(&ta, w.initial(), &w.realize_path()).unwrap();
    assert!(end.covers(l_f(&ta)));
}

#[test]
fn contradiction_is_not_coverable() {
    let f = Cnf3::new(1, vec![vec![1], vec![-1]]).unwrap();
    assert!(matches!(param_cover(&f), CoverOutcome::NotCoverable));
    let ta = gen_3sat(&f, SatVariant::Param);
    let init = initial_configs(&ta, &vec![(1, 4)], OracleLimits::default()).unwrap();
    let hit = oracle_search(&ta, &init, |c| c.covers(l_f(&ta)), 10, OracleLimits::default()).unwrap();
    assert!(hit.is_none());
}

#[test]
fn empty_formula_is_coverable_by_one_process() {
    let f = Cnf3::new(1, vec![]).unwrap();
    let ta = gen_3sat(&f, SatVariant::Param);
    let init = initial_configs(&ta, &vec![(1, 1)], OracleLimits::default()).unwrap();
    let hit = oracle_search(&ta, &init, |c| c.covers(l_f(&ta)), 5, OracleLimits::default()).unwrap();
    assert_eq!(hit.unwrap().1.len(), 3);
    assert!(param_cover(&f).is_coverable());
}

#[test]
fn nonparam_variant_agrees_with_brute_force() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..15 {
        let f = random_cnf(&mut rng, 3, 4);
        let ta = gen_3sat(&f, SatVariant::NonParam);
        let init = nonparam_initial(&ta);
        let mode = CoverMode::From(init);
        let out = cover(&ta, l_f(&ta), &mode, None, false, &SolverConfig::default()).unwrap();
        assert_eq!(out.is_coverable(), brute_sat(&f).unwrap(), "{f:?}");
    }
}

#[test]
fn poles_are_exclusive_along_every_run() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..5 {
        let f = random_cnf(&mut rng, 2, 3);
        let ta = gen_3sat(&f, SatVariant::Param);
        for s in initial_configs(&ta, &vec![(1, 2)], OracleLimits::default()).unwrap() {
            explore_paths(&ta, &s, 7, 1_000_000, |cs, _| {
                for i in 0..f.num_vars {
                    let top = cs.iter().any(|c| c.kappa[3 * i + 1] > 0);
                    let bot = cs.iter().any(|c| c.kappa[3 * i + 2] > 0);
                    assert!(!(top && bot));
                }
            })
            .unwrap();
        }
    }
}
