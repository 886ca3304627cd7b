mod common;

use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use qslice::circuit::{asap_schedule, Circuit, Gate};
use qslice::mapper::{comm_cost, map_circuit, parse_mapped, Algorithm, InitialLayout, MapOptions};
use qslice::partition::{Assignment, Machine};
use qslice::Exec;

fn algorithm() -> impl Strategy<Value = Algorithm> {
    prop::sample::select(Algorithm::ALL.to_vec())
}

fn layout() -> impl Strategy<Value = InitialLayout> {
    prop_oneof![
        Just(InitialLayout::ClusterMajor),
        any::<u64>().prop_map(InitialLayout::Shuffled),
    ]
}

/// Random circuit that fits a random machine, with single-qubit gates mixed in.
fn mapping_case() -> impl Strategy<Value = (Machine, Circuit)> {
    (2usize..5, 2usize..5)
        .prop_flat_map(|(k, p)| {
            let slots = k * p;
            (
                Just((k, p)),
                2..=slots,
                prop::collection::vec((0..slots, 1..slots, any::<bool>()), 1..40),
            )
        })
        .prop_filter_map(
            "slice needs more pairs than the machine holds",
            |((k, p), n, raw)| {
                let machine = Machine::new(k, p, 1.0).unwrap();
                let gates = raw.into_iter().map(|(a, off, single)| {
                    let a = a % n;
                    if single {
                        Gate::single("h", a)
                    } else {
                        Gate::pair("cx", a, (a + off % (n - 1) + 1) % n)
                    }
                });
                let c = asap_schedule(gates, n).unwrap();
                let fits = c
                    .interaction_skeleton()
                    .slices()
                    .iter()
                    .all(|s| s.interactions().count() <= machine.pair_limit());
                fits.then_some((machine, c))
            },
        )
}

fn random_assignment(rng: &mut ChaCha8Rng, machine: &Machine, qubits: usize) -> Assignment {
    let p = machine.capacity();
    let mut labels: Vec<usize> = (0..machine.slots()).map(|h| h / p).collect();
    labels.shuffle(rng);
    Assignment::from_clusters(machine, qubits, labels).unwrap()
}

fn transition_case() -> impl Strategy<Value = (Machine, Assignment, Assignment)> {
    (2usize..=6, 1usize..=3, any::<u64>()).prop_flat_map(|(k, p, seed)| {
        (Just((k, p, seed)), 1..=(k * p).min(6)).prop_map(|((k, p, seed), q)| {
            let machine = Machine::new(k, p, 1.0).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let a = random_assignment(&mut rng, &machine, q);
            let b = random_assignment(&mut rng, &machine, q);
            (machine, a, b)
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn paths_are_valid_and_replay_exactly((machine, c) in mapping_case(), alg in algorithm(), layout in layout()) {
        let opts = MapOptions::new(alg).with_layout(layout).with_exec(Exec::Sequential);
        let (path, mapped) = map_circuit(&c, &machine, &opts).unwrap();
        let skeleton = c.interaction_skeleton();
        prop_assert_eq!(path.first_invalid(&skeleton), None);
        prop_assert!(path.assignments.iter().all(Assignment::capacity_holds));
        for (t, moves) in path.transitions.iter().enumerate() {
            prop_assert_eq!(&moves.apply(&path.assignments[t]), &path.assignments[t + 1]);
        }
        prop_assert!(mapped.matches_path(&path).unwrap());
        prop_assert_eq!(mapped.swap_count(), path.total_cost());
        prop_assert_eq!(mapped.to_circuit().gate_count(), c.gate_count() + path.total_cost());
    }

    #[test]
    fn mapped_text_round_trips((machine, c) in mapping_case(), alg in algorithm()) {
        let (_, mapped) = map_circuit(&c, &machine, &MapOptions::new(alg)).unwrap();
        let text = mapped.emit();
        let back = parse_mapped(&text).unwrap();
        prop_assert_eq!(back.emit(), text);
        prop_assert_eq!(back.total_cost(), mapped.total_cost());
    }

    #[test]
    fn execution_strategy_does_not_change_the_path((machine, c) in mapping_case(), alg in algorithm()) {
        let seq = map_circuit(&c, &machine, &MapOptions::new(alg).with_exec(Exec::Sequential)).unwrap();
        let par = map_circuit(&c, &machine, &MapOptions::new(alg).with_exec(Exec::Parallel)).unwrap();
        prop_assert_eq!(seq.0, par.0);
        prop_assert_eq!(seq.1.emit(), par.1.emit());
    }

    #[test]
    fn cost_is_bounded_by_displacement((_, a, b) in transition_case()) {
        let moves = comm_cost(&a, &b).unwrap();
        let d = (0..a.qubits()).filter(|&q| a.cluster(q) != b.cluster(q)).count();
        prop_assert!(d.div_ceil(2) <= moves.cost && moves.cost <= d, "d={} C={}", d, moves.cost);
        let by_parts: usize = moves.cycles.iter().map(|c| c.len() - 1).sum::<usize>() + moves.residual.len();
        prop_assert_eq!(moves.cost, by_parts);
        prop_assert_eq!(moves.swaps().len(), moves.cost);
        prop_assert!(moves.rounds() <= moves.cost);
        prop_assert_eq!(moves.rounds() == 0, moves.cost == 0);
        prop_assert!(moves.apply(&a).same_qubit_placement(&b));
        prop_assert!(moves.apply(&a).capacity_holds());
    }

    #[test]
    fn cost_matches_brute_force((machine, a, b) in transition_case()) {
        let want = common::min_swaps(
            &common::placement(&a),
            &common::placement(&b),
            machine.clusters(),
            machine.capacity(),
        );
        prop_assert_eq!(comm_cost(&a, &b).unwrap().cost, want);
    }
}

/// Random X, CZ and CNOT circuits on up to 8 qubits, with a basis input.
fn reversible_case() -> impl Strategy<Value = (Circuit, usize)> {
    (3usize..=8)
        .prop_flat_map(|n| {
            (
                Just(n),
                prop::collection::vec((0..n, 1..n, 0..3usize), 1..30),
                0..(1usize << n),
            )
        })
        .prop_map(|(n, raw, input)| {
            let gates = raw.into_iter().map(|(a, off, kind)| match kind {
                0 => Gate::single("x", a),
                1 => Gate::pair("cz", a, (a + off) % n),
                _ => Gate::pair("cx", a, (a + off) % n),
            });
            (asap_schedule(gates, n).unwrap(), input)
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn mapped_circuits_compute_the_same_function((c, input) in reversible_case(), alg in algorithm()) {
        let machine = Machine::new(2, 4, 1.0).unwrap();
        let (_, mapped) = map_circuit(&c, &machine, &MapOptions::new(alg)).unwrap();
        let want = common::run(&c, input).classical();
        prop_assert!(want.is_some());
        prop_assert_eq!(common::run_mapped(&mapped, input), want);
    }
}
