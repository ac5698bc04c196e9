//! Acceptance suite: one test per acceptance criterion, each printing a
//! PASS line (visible with `--nocapture`). Every comparison is exact
//! rational equality; no tolerances anywhere.

use dsplab_core::game::{DspGame, Game, TableGame};
use dsplab_core::generators::{
    gen_dspn, gen_identity, gen_mis_reduction, gen_random, loc2, loc3, run_mis_pipeline,
    RandomConfig,
};
use dsplab_core::graph::{brute_force_mis, Graph};
use dsplab_core::instance::{Instance, StrategyProfile};
use dsplab_core::mechanism::{
    anonymity_check, enumerate_equilibria, is_nash, poa_pos, potential, run_brd,
    shapley_permutation, shapley_subsets, PaymentRule, RatioBound,
};
use dsplab_core::partition::Partition;
use dsplab_core::rational::{from_int, ratio, Rational};
use dsplab_core::solvers::{baseline_silent, local_expert_solve, solve_exact, Caps};
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::time::Instant;

fn random_table_game(rng: &mut ChaCha8Rng) -> TableGame {
    loop {
        let players = rng.gen_range(1..=6);
        let counts: Vec<usize> = (0..players).map(|_| rng.gen_range(1..=3)).collect();
        if counts.iter().product::<usize>() > 64 {
            continue;
        }
        return TableGame::from_fn(counts, |_| {
            ratio(rng.gen_range(-10..=10), rng.gen_range(1..=6))
        })
        .expect("counts were validated");
    }
}

fn random_profile(rng: &mut ChaCha8Rng, counts: &[usize]) -> Vec<usize> {
    counts.iter().map(|&c| rng.gen_range(0..c)).collect()
}

#[test]
fn criterion_01_identity_example_values() {
    for (value, silent, paired, shattered) in [
        (from_int(100), from_int(25), from_int(50), from_int(0)),
        (from_int(1), ratio(1, 4), ratio(1, 2), from_int(0)),
    ] {
        let inst = gen_identity(4, &value).unwrap();
        assert_eq!(inst.revenue(&Partition::whole(4)).unwrap(), silent);
        assert_eq!(inst.revenue(inst.mediator(0)).unwrap(), paired);
        assert_eq!(inst.revenue(&Partition::singletons(4)).unwrap(), shattered);
        let best = solve_exact(&inst, &Caps::default()).unwrap();
        assert_eq!(best.revenue, paired);
    }
    println!("criterion 1: PASS - identity family revenues match the worked example exactly");
}

#[test]
fn criterion_02_payment_formulas_agree_and_are_efficient() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xC2);
    for _ in 0..200 {
        let game = random_table_game(&mut rng);
        let counts = game.strategy_counts().to_vec();
        let null_value = game.value(&vec![0; counts.len()]);
        for _ in 0..2 {
            let a = random_profile(&mut rng, &counts);
            let perm = shapley_permutation(&game, &a).unwrap();
            let subs = shapley_subsets(&game, &a).unwrap();
            assert_eq!(perm, subs);
            let total: Rational = subs.iter().sum();
            assert_eq!(total, game.value(&a) - &null_value);
        }
    }
    println!(
        "criterion 2: PASS - permutation and subset payments agree exactly and split v(a) - v(null) on 200 random games"
    );
}

#[test]
fn criterion_03_payments_admit_the_exact_potential() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xC3);
    for _ in 0..200 {
        let game = random_table_game(&mut rng);
        let counts = game.strategy_counts().to_vec();
        for _ in 0..2 {
            let a = random_profile(&mut rng, &counts);
            let pay = shapley_subsets(&game, &a).unwrap();
            let phi = potential(&game, &a).unwrap();
            for t in 0..counts.len() {
                for s in 0..counts[t] {
                    if s == a[t] {
                        continue;
                    }
                    let mut dev = a.clone();
                    dev[t] = s;
                    let dev_pay = shapley_subsets(&game, &dev).unwrap();
                    let dev_phi = potential(&game, &dev).unwrap();
                    assert_eq!(&dev_pay[t] - &pay[t], dev_phi - &phi);
                }
            }
        }
    }
    println!(
        "criterion 3: PASS - every unilateral payment change equals the potential change on 200 random games"
    );
}

#[test]
fn criterion_04_best_response_dynamics_reach_equilibria() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xC4);
    let cfg = RandomConfig::default();
    for seed in 0..100u64 {
        let n = rng.gen_range(2..=5);
        let k = rng.gen_range(1..=4);
        let m = rng.gen_range(1..=3);
        let inst = gen_random(n, k, m, seed, &cfg).unwrap();
        let game = DspGame::new(&inst, Caps::default().max_parts).unwrap();
        let null_value = game.value(&vec![0; m]);
        let order: Vec<usize> = (0..m).collect();

        let silent_start = vec![0usize; m];
        let report_start = game
            .index_profile(&StrategyProfile::all_report(&inst))
            .expect("base partitions are their own coarsenings");
        for start in [silent_start, report_start] {
            let trace = run_brd(&game, &start, &order).unwrap();
            assert!(trace.converged);
            assert!(is_nash(&game, &trace.final_profile, PaymentRule::Subsets).unwrap());
            assert!(game.value(&trace.final_profile) >= null_value);
        }
    }
    println!(
        "criterion 4: PASS - best-response dynamics converge to Nash profiles worth at least the null value on 100 random instances"
    );
}

#[test]
fn criterion_05_gap_family_equilibria_and_optima() {
    let started = Instant::now();
    let caps = Caps::default();
    for (n, eps) in [(1usize, ratio(1, 2)), (2, ratio(1, 4)), (3, ratio(1, 9))] {
        let inst = gen_dspn(n, &eps).unwrap();
        let game = DspGame::new(&inst, caps.max_parts).unwrap();
        let ne_value =
            (from_int(n as i64) * &eps + from_int(1)) / from_int((3 * n + 1) as i64);
        let opt_bound = ratio((n + 1) as i64, (3 * n + 1) as i64);

        let pp = poa_pos(&game, &caps).unwrap();
        let poa = pp.poa.as_finite().expect("positive equilibrium value").clone();
        let pos = pp.pos.as_finite().expect("positive equilibrium value").clone();
        // Worst and best equilibrium values coincide at the family value.
        assert_eq!(&pp.opt / &poa, ne_value);
        assert_eq!(&pp.opt / &pos, ne_value);
        assert!(pp.opt >= opt_bound);

        let best = solve_exact(&inst, &caps).unwrap();
        assert_eq!(best.revenue, pp.opt);
        assert!(best.revenue >= opt_bound);

        if n >= 2 {
            assert_eq!(pp.pos, RatioBound::Finite(from_int(n as i64)));
        }
        if n == 1 {
            let found = enumerate_equilibria(&game, &caps).unwrap();
            assert!(!found.is_empty());
            assert!(found.iter().all(|eq| eq.value == ne_value));
        }
    }
    let elapsed = started.elapsed();
    assert!(elapsed.as_secs() < 120, "budget exceeded: {elapsed:?}");
    println!(
        "criterion 5: PASS - gap family equilibria all sit at (n*eps+1)/(3n+1) and the size-3 case finished in {elapsed:?}"
    );
}

fn random_battery(tag: u64) -> Vec<(usize, usize, Instance)> {
    let mut rng = ChaCha8Rng::seed_from_u64(tag);
    let cfg = RandomConfig::default();
    (0..100u64)
        .map(|seed| {
            let n = rng.gen_range(2..=5);
            let k = rng.gen_range(1..=4);
            let m = rng.gen_range(1..=3);
            (n, k, gen_random(n, k, m, seed, &cfg).unwrap())
        })
        .collect()
}

#[test]
fn criterion_06_price_of_anarchy_bound() {
    let caps = Caps::default();
    for (n, k, inst) in random_battery(0xC6) {
        let game = DspGame::new(&inst, caps.max_parts).unwrap();
        let pp = poa_pos(&game, &caps).unwrap();
        let bound = from_int(1.max(((k as i64) - 1).min(n as i64)));
        match pp.poa {
            RatioBound::Finite(poa) => assert!(poa <= bound, "{poa} > {bound}"),
            RatioBound::Infinite => panic!("price of anarchy must be finite"),
        }
    }
    println!(
        "criterion 6: PASS - price of anarchy stayed within max(1, min(k-1, n)) on 100 random instances"
    );
}

#[test]
fn criterion_07_silence_approximates_the_optimum() {
    let caps = Caps::default();
    for (n, k, inst) in random_battery(0xC7) {
        let silent = baseline_silent(&inst).unwrap().revenue;
        let best = solve_exact(&inst, &caps).unwrap().revenue;
        let factor = from_int(1.max(((k as i64) - 1).min(n as i64)));
        assert!(best <= factor * silent, "instance breaks the silence bound");
    }
    println!(
        "criterion 7: PASS - the optimum never beat all-silent by more than max(1, min(k-1, n)) on 100 random instances"
    );
}

#[test]
fn criterion_08_local_expert_five_approximation() {
    let caps = Caps::default();
    let mut rng = ChaCha8Rng::seed_from_u64(0xC8);
    let cfg = RandomConfig {
        local_experts: true,
        ..RandomConfig::default()
    };
    for seed in 0..100u64 {
        let n = rng.gen_range(2..=8);
        let k = rng.gen_range(1..=5);
        let m = rng.gen_range(1..=3);
        let inst = gen_random(n, k, m, seed, &cfg).unwrap();
        let greedy = local_expert_solve(&inst).unwrap().revenue;
        let best = solve_exact(&inst, &caps).unwrap().revenue;
        assert!(
            from_int(5) * &greedy >= best,
            "greedy fell below a fifth of the optimum"
        );
    }
    // The two worked examples are solved to optimality.
    assert_eq!(local_expert_solve(&loc2()).unwrap().revenue, from_int(4));
    assert_eq!(local_expert_solve(&loc3()).unwrap().revenue, from_int(2));
    println!(
        "criterion 8: PASS - the greedy local-expert solver stayed within factor 5 of optimal on 100 expert instances"
    );
}

fn speak_profile(inst: &Instance, speaking: &[bool]) -> StrategyProfile {
    let n = inst.item_count();
    let reports: Vec<Partition> = (0..inst.mediator_count())
        .map(|t| {
            if speaking[t] {
                inst.mediator(t).clone()
            } else {
                Partition::whole(n)
            }
        })
        .collect();
    StrategyProfile::new(inst, reports).expect("base partitions and the whole set are reports")
}

fn reduction_bounds_hold(g: &Graph, ell: usize) {
    let nodes = g.node_count();
    let (inst, map) = gen_mis_reduction(g, ell).unwrap();
    let mediators = inst.mediator_count();

    // Lower bound: speaking on every layer of an independent set A earns
    // at least ell * |A|.
    for mask in 0u32..(1 << nodes) {
        let set: Vec<usize> = (0..nodes).filter(|&v| mask >> v & 1 == 1).collect();
        if !g.is_independent(&set) {
            continue;
        }
        let mut speaking = vec![false; mediators];
        for &v in &set {
            for k in 0..ell {
                speaking[map.mediator(v, k)] = true;
            }
        }
        let revenue = inst.revenue(&speak_profile(&inst, &speaking).joint()).unwrap();
        assert!(
            revenue >= from_int((ell * set.len()) as i64),
            "independent set {set:?} under-earned"
        );
    }

    // Upper bound: any speaking set S touching node set S' earns at most
    // |S'| + N + 1.
    for mask in 0u32..(1 << mediators) {
        let speaking: Vec<bool> = (0..mediators).map(|t| mask >> t & 1 == 1).collect();
        let mut touched = vec![false; nodes];
        for t in 0..mediators {
            if speaking[t] {
                touched[map.mediator_node(t)] = true;
            }
        }
        let touched_count = touched.iter().filter(|&&b| b).count();
        let revenue = inst.revenue(&speak_profile(&inst, &speaking).joint()).unwrap();
        assert!(
            revenue <= from_int((touched_count + nodes + 1) as i64),
            "speaking set {mask:#b} over-earned"
        );
    }
}

#[test]
fn criterion_09_reduction_revenue_bounds() {
    // Every graph on up to 4 nodes.
    for nodes in 1usize..=4 {
        let pairs: Vec<(usize, usize)> = (0..nodes)
            .flat_map(|u| (u + 1..nodes).map(move |v| (u, v)))
            .collect();
        for mask in 0u32..(1 << pairs.len()) {
            let edges: Vec<(usize, usize)> = pairs
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, &e)| e)
                .collect();
            let g = Graph::new(nodes, edges).unwrap();
            for ell in [1usize, 2] {
                reduction_bounds_hold(&g, ell);
            }
        }
    }
    // A handful of seeded 5-node graphs.
    for seed in 0..5u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let edges: Vec<(usize, usize)> = (0..5usize)
            .flat_map(|u| (u + 1..5).map(move |v| (u, v)))
            .filter(|_| rng.gen_bool(0.5))
            .collect();
        let g = Graph::new(5, edges).unwrap();
        for ell in [1usize, 2] {
            reduction_bounds_hold(&g, ell);
        }
    }
    println!(
        "criterion 9: PASS - reduction revenues stayed between ell*|A| and |S'|+N+1 on all graphs up to 4 nodes plus seeded 5-node graphs"
    );
}

#[test]
fn criterion_10_pipeline_recovers_independent_sets() {
    let caps = Caps::default();
    let solver = |inst: &Instance| solve_exact(inst, &caps);
    let cases = [
        (Graph::new(2, vec![(0, 1)]).unwrap(), vec![1]),
        (Graph::new(2, vec![]).unwrap(), vec![0, 1]),
        (
            Graph::new(3, vec![(0, 1), (0, 2), (1, 2)]).unwrap(),
            vec![2],
        ),
    ];
    for (g, expected) in cases {
        let ell = g.node_count() + 1;
        let res = run_mis_pipeline(&g, ell, solver).unwrap();
        let (opt, _) = brute_force_mis(&g).unwrap();
        assert!(g.is_independent(&res.independent_set));
        assert!(2 * res.independent_set.len() >= opt, "below half of optimal");
        assert_eq!(res.independent_set, expected);
        assert_eq!(res.independent_set.len(), opt);
    }
    println!(
        "criterion 10: PASS - the reduction pipeline decoded optimal independent sets on the edge, empty, and triangle graphs"
    );
}

#[test]
fn criterion_11_single_bump_payments_are_anonymous() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xC11);
    for round in 0..50 {
        let players = rng.gen_range(2..=4);
        let counts: Vec<usize> = (0..players).map(|_| rng.gen_range(2..=3)).collect();
        let mut a_star = random_profile(&mut rng, &counts);
        let forced = rng.gen_range(0..players);
        a_star[forced] = rng.gen_range(1..counts[forced]);
        let baseline = ratio(rng.gen_range(-5..=5), rng.gen_range(1..=3));
        let delta = ratio(rng.gen_range(1..=9), rng.gen_range(1..=3));
        let game = TableGame::from_fn(counts, |p| {
            if p == a_star {
                &baseline + &delta
            } else {
                baseline.clone()
            }
        })
        .unwrap();
        assert!(
            anonymity_check(&game, &a_star).unwrap(),
            "round {round} split the bump unevenly"
        );
        let payments = shapley_subsets(&game, &a_star).unwrap();
        let active = a_star.iter().filter(|&&s| s != 0).count();
        for (t, pay) in payments.iter().enumerate() {
            if a_star[t] == 0 {
                assert!(pay.is_zero());
            } else {
                assert_eq!(pay * from_int(active as i64), delta);
            }
        }
    }
    println!(
        "criterion 11: PASS - 50 random single-bump games split the surplus equally among non-null players"
    );
}
