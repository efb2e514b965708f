//! Randomized invariants.

mod common;

use std::collections::BTreeSet;

use common::{all_genomes, random_problem, random_small_problem, ref_bounds, ref_fitness, ref_raw, rng};
use proptest::prelude::*;
use qoscompose::baseline::{brute_force_optimum, decode_position, normative_intervals, DEFAULT_COMBO_CAP};
use qoscompose::bench::{emit_results_csv, parse_results_csv, quantile_sorted, summarize_stats, ResultRow};
use qoscompose::io::{read_instance, write_instance};
use qoscompose::operators::{random_cut_points, random_genome, two_point_crossover};
use qoscompose::qos::{aggregate_qos, fitness, objective_bounds, Objective, QosTriple, WorkflowNode};
use qoscompose::search::{EvaluatedFrog, Evaluator};
use qoscompose::sfga::{
    init_population, memeplex_crossover_step, memeplex_mutation_step, mutation_count, sort_and_partition,
    SfgaConfig,
};
use qoscompose::{solve, Algorithm, Execution, Genome, SolverConfig};
use rand::Rng;

fn rel_close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * a.abs().max(b.abs()).max(1.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn aggregation_matches_reference(seed in any::<u64>()) {
        let p = random_problem(seed, 8, 4);
        let g = random_genome(&mut rng(seed), &p.pool_sizes());
        let got = aggregate_qos(&p.workflow, &p, &g).unwrap().to_array();
        let want = ref_raw(&p, g.genes());
        for i in 0..3 {
            prop_assert!(rel_close(got[i], want[i]), "{got:?} vs {want:?}");
        }
    }

    #[test]
    fn atomic_is_identity(t in 0.0..1e6f64, e in 0.0..1e6f64, c in 0.0..1e6f64) {
        let q = QosTriple::new(t, e, c);
        let p = qoscompose::CompositionProblem {
            tasks: vec![qoscompose::qos::TaskClass::from_triples(0, &[q])],
            workflow: WorkflowNode::Atomic(0),
            weights: Default::default(),
        };
        prop_assert_eq!(aggregate_qos(&p.workflow, &p, &Genome::zeros(1)).unwrap(), q);
    }

    #[test]
    fn aggregation_is_monotone(seed in any::<u64>(), bump in prop::array::uniform3(0.0..50.0f64)) {
        let mut p = random_problem(seed, 8, 4);
        let mut r = rng(seed ^ 0xabc);
        let g = random_genome(&mut r, &p.pool_sizes());
        let before = aggregate_qos(&p.workflow, &p, &g).unwrap();
        let t = r.gen_range(0..p.task_count());
        let q = &mut p.tasks[t].candidates[g.genes()[t]].qos;
        *q = QosTriple::new(q.response_time + bump[0], q.energy + bump[1], q.cost + bump[2]);
        let after = aggregate_qos(&p.workflow, &p, &g).unwrap();
        prop_assert!(after.response_time >= before.response_time * (1.0 - 1e-12));
        prop_assert!(after.energy >= before.energy * (1.0 - 1e-12));
        prop_assert!(after.cost >= before.cost * (1.0 - 1e-12));
    }

    #[test]
    fn bounds_contain_every_aggregate(seed in any::<u64>()) {
        let p = random_small_problem(seed, 200);
        let b = objective_bounds(&p);
        let (lo, hi) = ref_bounds(&p);
        for i in 0..3 {
            prop_assert!(rel_close(b.lower.to_array()[i], lo[i]) && rel_close(b.upper.to_array()[i], hi[i]));
        }
        for g in all_genomes(&p.pool_sizes()) {
            let a = aggregate_qos(&p.workflow, &p, &Genome::new(g)).unwrap().to_array();
            for i in 0..3 {
                let slack = 1e-9 * hi[i].abs().max(1.0);
                prop_assert!(lo[i] - slack <= a[i] && a[i] <= hi[i] + slack, "{a:?} outside {lo:?}..{hi:?}");
            }
        }
    }

    #[test]
    fn fitness_in_unit_interval_and_matches_reference(seed in any::<u64>()) {
        let p = random_problem(seed, 8, 5);
        let b = objective_bounds(&p);
        let g = random_genome(&mut rng(seed), &p.pool_sizes());
        let f = fitness(&p, &g, &b).unwrap();
        prop_assert!((0.0..=1.0).contains(&f));
        prop_assert!((f - ref_fitness(&p, g.genes())).abs() <= 1e-9);
    }

    #[test]
    fn argmin_survives_rescaling(seed in any::<u64>(), column in 0usize..3, factor in 0.01..100.0f64) {
        let mut p = random_small_problem(seed, 100);
        if column == 2 {
            // Cost multiplies through the tree; rescaling is only exact on a
            // flat sequence, where every genome scales by the same power.
            p.workflow = WorkflowNode::sequence_of(p.task_count());
        }
        let argmin = |p: &qoscompose::CompositionProblem| -> BTreeSet<Vec<usize>> {
            let obj = Objective::new(p);
            let all = all_genomes(&p.pool_sizes());
            let fs: Vec<f64> = all.iter().map(|g| obj.evaluate(g)).collect();
            let best = fs.iter().copied().fold(f64::INFINITY, f64::min);
            all.into_iter().zip(fs).filter(|(_, f)| *f <= best + 1e-9).map(|(g, _)| g).collect()
        };
        let before = argmin(&p);
        for t in &mut p.tasks {
            for c in &mut t.candidates {
                let mut a = c.qos.to_array();
                a[column] *= factor;
                c.qos = QosTriple::from_array(a);
            }
        }
        prop_assert_eq!(before, argmin(&p));
    }

    #[test]
    fn crossover_children_are_valid_swaps(seed in any::<u64>()) {
        let p = random_problem(seed, 10, 5);
        let pools = p.pool_sizes();
        let mut r = rng(seed);
        let (a, b) = (random_genome(&mut r, &pools), random_genome(&mut r, &pools));
        let (r1, r2) = random_cut_points(&mut r, a.len());
        let (c1, c2) = two_point_crossover(&a, &b, r1, r2).unwrap();
        prop_assert!(c1.is_valid_for(&p) && c2.is_valid_for(&p));
        for i in 0..a.len() {
            let mut got = [c1.genes()[i], c2.genes()[i]];
            let mut want = [a.genes()[i], b.genes()[i]];
            got.sort_unstable();
            want.sort_unstable();
            prop_assert_eq!(got, want);
            let inside = r1 <= i && i <= r2;
            prop_assert_eq!(c1.genes()[i], if inside { b.genes()[i] } else { a.genes()[i] });
        }
    }

    #[test]
    fn partition_is_an_equal_disjoint_cover(
        fits in prop::collection::vec(0.0..1.0f64, 1..12),
        m in 1usize..6,
    ) {
        let n = fits.len() * m;
        let pop: Vec<EvaluatedFrog> = (0..n)
            .map(|i| EvaluatedFrog { genome: Genome::zeros(1), fitness: fits[i % fits.len()] })
            .collect();
        let plexes = sort_and_partition(&pop, m);
        prop_assert_eq!(plexes.len(), m);
        let mut seen = vec![false; n];
        for plex in &plexes {
            prop_assert_eq!(plex.members.len(), n / m);
            for w in plex.members.windows(2) {
                prop_assert!(pop[w[0]].fitness <= pop[w[1]].fitness);
            }
            for &i in &plex.members {
                prop_assert!(!seen[i]);
                seen[i] = true;
            }
        }
        prop_assert!(seen.iter().all(|&s| s));
    }

    #[test]
    fn mutation_step_makes_exactly_the_stated_events(
        seed in any::<u64>(),
        fraction in 0.0..=1.0f64,
        m in 1usize..5,
        size in 2usize..12,
    ) {
        let p = random_problem(seed, 6, 4);
        let cfg = SfgaConfig { population_size: m * size, memeplex_count: m, ..Default::default() };
        let mut r = rng(seed);
        let mut eval = Evaluator::new(&p);
        let mut pop = init_population(&mut eval, &cfg, &mut r).unwrap();
        for plex in sort_and_partition(&pop, m) {
            let before = eval.evaluations();
            let events = memeplex_mutation_step(&plex, &mut pop, fraction, &mut eval, &mut r);
            prop_assert_eq!(events, mutation_count(size, fraction));
            prop_assert_eq!(eval.evaluations() - before, events as u64);
        }
        prop_assert!(pop.iter().all(|f| f.genome.is_valid_for(&p)));
    }

    #[test]
    fn generations_keep_every_frog_valid(seed in any::<u64>()) {
        let p = random_problem(seed, 6, 4);
        let cfg = SfgaConfig { population_size: 12, memeplex_count: 3, ..Default::default() };
        let mut r = rng(seed);
        let mut eval = Evaluator::new(&p);
        let mut pop = init_population(&mut eval, &cfg, &mut r).unwrap();
        let mut last = eval.best().fitness;
        for _ in 0..10 {
            let mut plexes = sort_and_partition(&pop, 3);
            for plex in plexes.iter_mut() {
                memeplex_crossover_step(plex, &mut pop, &mut eval, &mut r);
            }
            for plex in &plexes {
                memeplex_mutation_step(plex, &mut pop, 0.3, &mut eval, &mut r);
            }
            prop_assert!(pop.iter().all(|f| f.genome.is_valid_for(&p)));
            prop_assert!(eval.best().fitness <= last);
            last = eval.best().fitness;
        }
    }

    #[test]
    fn pso_decode_stays_in_range(
        pos in prop::collection::vec(-1e6..1e6f64, 1..10),
        seed in any::<u64>(),
    ) {
        let mut r = rng(seed);
        let pools: Vec<usize> = pos.iter().map(|_| r.gen_range(1..8)).collect();
        let g = decode_position(&pos, &pools);
        prop_assert!(g.genes().iter().zip(&pools).all(|(&x, &n)| x < n));
    }

    #[test]
    fn normative_intervals_stay_in_range(seed in any::<u64>(), k in 1usize..10) {
        let p = random_problem(seed, 6, 5);
        let pools = p.pool_sizes();
        let mut r = rng(seed);
        let frogs: Vec<EvaluatedFrog> =
            (0..k).map(|_| EvaluatedFrog { genome: random_genome(&mut r, &pools), fitness: 0.0 }).collect();
        for (d, (lo, hi)) in normative_intervals(&frogs, pools.len()).into_iter().enumerate() {
            prop_assert!(lo <= hi && hi < pools[d]);
        }
    }

    #[test]
    fn instances_round_trip(seed in any::<u64>()) {
        let p = random_problem(seed, 8, 5);
        prop_assert_eq!(read_instance(&write_instance(&p)).unwrap(), p);
    }

    #[test]
    fn results_csv_round_trips_to_six_decimals(
        vals in prop::collection::vec((0.0..1.0f64, 0.0..1e4f64, 0.0..1e4f64, 0.0..1e9f64), 0..20),
        timing in any::<bool>(),
    ) {
        let rows: Vec<ResultRow> = vals
            .iter()
            .enumerate()
            .map(|(i, &(f, t, e, c))| ResultRow {
                algorithm: "sfga".into(),
                instance: format!("x-{i}"),
                level: i,
                seed: i as u64,
                best_fitness: f,
                aggregate: QosTriple::new(t, e, c),
                evaluations: 100 + i as u64,
                wall_time_s: Some(f * 3.0),
            })
            .collect();
        let back = parse_results_csv(&emit_results_csv(&rows, timing)).unwrap();
        prop_assert_eq!(back.len(), rows.len());
        for (a, b) in rows.iter().zip(&back) {
            prop_assert_eq!((&a.algorithm, &a.instance, a.level, a.seed, a.evaluations),
                            (&b.algorithm, &b.instance, b.level, b.seed, b.evaluations));
            prop_assert!((a.best_fitness - b.best_fitness).abs() <= 5e-7);
            for (x, y) in a.aggregate.to_array().iter().zip(b.aggregate.to_array()) {
                prop_assert!((x - y).abs() <= 5e-7 * x.abs().max(1.0) + 5e-7);
            }
            prop_assert_eq!(b.wall_time_s.is_some(), timing);
        }
    }

    #[test]
    fn summary_stats_match_two_pass(values in prop::collection::vec(-1e3..1e3f64, 1..60)) {
        let s = summarize_stats(&values).unwrap();
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let var = if values.len() > 1 {
            values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)
        } else {
            0.0
        };
        prop_assert!((s.mean - mean).abs() <= 1e-9);
        prop_assert!((s.std - var.sqrt()).abs() <= 1e-9);
        prop_assert!(s.min <= s.q1 && s.q1 <= s.median && s.median <= s.q3 && s.q3 <= s.max);
        let mut sorted = values.clone();
        sorted.sort_by(f64::total_cmp);
        prop_assert_eq!(s.median, quantile_sorted(&sorted, 0.5));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn every_algorithm_honours_the_run_contract(seed in any::<u64>()) {
        let p = random_small_problem(seed, 300);
        let optimum = brute_force_optimum(&p, DEFAULT_COMBO_CAP, Execution::Sequential).unwrap().fitness;
        let config = SolverConfig { population_size: 10, memeplex_count: 2, generations: 15, seed, ..Default::default() };
        for a in Algorithm::COMPARED {
            let r = solve(&p, a, &config).unwrap();
            prop_assert!(r.best().is_valid_for(&p));
            prop_assert!(r.trace_is_monotone());
            prop_assert_eq!(r.trace.last().copied(), Some(r.best_fitness));
            prop_assert!(r.best_fitness >= optimum - 1e-12);
            prop_assert!(solve(&p, a, &config).unwrap().same_outcome(&r));
        }
    }

    #[test]
    fn brute_force_is_order_independent(seed in any::<u64>()) {
        let p = random_small_problem(seed, 500);
        let forward = brute_force_optimum(&p, DEFAULT_COMBO_CAP, Execution::Sequential).unwrap();
        let obj = Objective::new(&p);
        let reverse = all_genomes(&p.pool_sizes())
            .iter()
            .rev()
            .map(|g| obj.evaluate(g))
            .fold(f64::INFINITY, f64::min);
        prop_assert!((forward.fitness - reverse).abs() <= 1e-12);
        let par = brute_force_optimum(&p, DEFAULT_COMBO_CAP, Execution::Parallel).unwrap();
        prop_assert_eq!(par, forward);
    }
}
