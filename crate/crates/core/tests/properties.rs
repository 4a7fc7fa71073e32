//! Property tests for the structural invariants: unitarity of the IR,
//! census/depth behavior, reversible-vs-dense agreement, and brute-force
//! cross-checks of the graph enumeration.

use grover_domset::circuit::{Circuit, Gate, Polarity};
use grover_domset::graph::{Graph, VertexSet};
use grover_domset::oracle::{build_oracle, plan_layout, WidthPolicy};
use grover_domset::sim::{
    apply_circuit, extract_phase_table, reversible_eval, StateVector, NORM_TOLERANCE,
};
use proptest::prelude::*;

const QUBITS: usize = 5;

/// Any gate over a fixed register, including negative controls and phases.
fn arb_gate() -> impl Strategy<Value = Gate> {
    let target = 0..QUBITS;
    let angle = -3.2f64..3.2;
    let controls = proptest::collection::btree_set(0..QUBITS, 1..QUBITS)
        .prop_map(|s| s.into_iter().collect::<Vec<_>>());
    prop_oneof![
        target.clone().prop_map(Gate::h),
        target.clone().prop_map(Gate::x),
        (target.clone(), angle.clone()).prop_map(|(t, a)| Gate::phase(t, a)),
        (controls.clone(), target.clone(), proptest::collection::vec(any::<bool>(), QUBITS))
            .prop_filter_map("target among controls", |(ctrls, t, neg)| {
                if ctrls.contains(&t) {
                    return None;
                }
                let polarized = ctrls
                    .iter()
                    .map(|&q| (q, if neg[q] { Polarity::Negative } else { Polarity::Positive }))
                    .collect();
                Some(Gate::mcx_polarized(polarized, t))
            }),
        (controls, target, angle).prop_filter_map("target among controls", |(ctrls, t, a)| {
            if ctrls.contains(&t) {
                return None;
            }
            Some(Gate::Controlled {
                base: grover_domset::circuit::ControlledBase::Phase(a),
                controls: ctrls.into_iter().map(|q| (q, Polarity::Positive)).collect(),
                target: t,
            })
        }),
    ]
}

fn arb_circuit(max_gates: usize) -> impl Strategy<Value = Circuit> {
    proptest::collection::vec(arb_gate(), 0..max_gates).prop_map(|gates| {
        let mut c = Circuit::new(QUBITS);
        for g in gates {
            c.push(g).expect("generated gates are valid");
        }
        c
    })
}

/// Only X and controlled-X: eligible for reversible evaluation.
fn arb_permutation_circuit(max_gates: usize) -> impl Strategy<Value = Circuit> {
    let gate = prop_oneof![
        (0..QUBITS).prop_map(Gate::x),
        (
            proptest::collection::btree_set(0..QUBITS, 1..QUBITS),
            0..QUBITS,
            proptest::collection::vec(any::<bool>(), QUBITS)
        )
            .prop_filter_map("target among controls", |(ctrls, t, neg)| {
                if ctrls.contains(&t) {
                    return None;
                }
                let polarized = ctrls
                    .iter()
                    .map(|&q| (q, if neg[q] { Polarity::Negative } else { Polarity::Positive }))
                    .collect();
                Some(Gate::mcx_polarized(polarized, t))
            }),
    ];
    proptest::collection::vec(gate, 0..max_gates).prop_map(|gates| {
        let mut c = Circuit::new(QUBITS);
        for g in gates {
            c.push(g).expect("generated gates are valid");
        }
        c
    })
}

fn arb_graph(max_n: usize) -> impl Strategy<Value = Graph> {
    (1..=max_n).prop_flat_map(|n| {
        let pairs: Vec<(usize, usize)> =
            (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
        let len = pairs.len();
        proptest::collection::vec(any::<bool>(), len..=len).prop_map(move |mask| {
            let edges: Vec<(usize, usize)> =
                pairs.iter().zip(&mask).filter(|(_, &keep)| keep).map(|(&e, _)| e).collect();
            Graph::new(n, edges).unwrap()
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn circuits_preserve_norm_and_invert(c in arb_circuit(20)) {
        let mut initial = StateVector::zero(QUBITS);
        let mut prep = Circuit::new(QUBITS);
        for q in 0..QUBITS {
            prep.push(Gate::h(q)).unwrap();
        }
        prep.push(Gate::phase(0, 0.71)).unwrap();
        apply_circuit(&mut initial, &prep).unwrap();

        let mut state = initial.clone();
        apply_circuit(&mut state, &c).unwrap();
        prop_assert!((state.norm_sqr() - 1.0).abs() < NORM_TOLERANCE);

        apply_circuit(&mut state, &c.inverse()).unwrap();
        for (a, b) in state.amplitudes().iter().zip(initial.amplitudes()) {
            prop_assert!((a - b).norm() < NORM_TOLERANCE);
        }
    }

    #[test]
    fn inverse_is_involution(c in arb_circuit(20)) {
        prop_assert_eq!(c.inverse().inverse(), c);
    }

    #[test]
    fn census_invariant_under_inverse_for_self_adjoint_gates(
        c in arb_permutation_circuit(20)
    ) {
        prop_assert_eq!(c.inverse().gate_census(), c.gate_census());
    }

    #[test]
    fn depth_invariant_under_qubit_relabeling(
        c in arb_circuit(20),
        perm_seed in 0u64..1000
    ) {
        // build a permutation of 0..QUBITS from the seed
        let mut perm: Vec<usize> = (0..QUBITS).collect();
        let mut s = perm_seed;
        for i in (1..QUBITS).rev() {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            perm.swap(i, (s >> 33) as usize % (i + 1));
        }
        let mut relabeled = Circuit::new(QUBITS);
        for g in c.ops() {
            let mapped = match g {
                Gate::H(t) => Gate::h(perm[*t]),
                Gate::X(t) => Gate::x(perm[*t]),
                Gate::Phase(t, a) => Gate::phase(perm[*t], *a),
                Gate::Controlled { base, controls, target } => Gate::Controlled {
                    base: *base,
                    controls: controls.iter().map(|&(q, p)| (perm[q], p)).collect(),
                    target: perm[*target],
                },
            };
            relabeled.push(mapped).unwrap();
        }
        prop_assert_eq!(relabeled.depth(), c.depth());
        prop_assert!(c.depth() <= c.ops().len());
    }

    #[test]
    fn reversible_eval_matches_dense_simulation(
        c in arb_permutation_circuit(16),
        input in 0u64..(1 << QUBITS)
    ) {
        let out = reversible_eval(&c, input, None).unwrap();
        prop_assert_eq!(out.phase_parity, 1);
        let mut state = StateVector::basis(QUBITS, input);
        apply_circuit(&mut state, &c).unwrap();
        for (i, a) in state.amplitudes().iter().enumerate() {
            let expected = if i as u64 == out.bits { 1.0 } else { 0.0 };
            prop_assert!((a.re - expected).abs() < 1e-12 && a.im.abs() < 1e-12);
        }
    }

    #[test]
    fn enumeration_matches_naive_reimplementation(g in arb_graph(8), k_seed in 0usize..8) {
        let n = g.vertex_count();
        let k = 1 + k_seed % n;
        let fast = g.enumerate_dominating_sets(k).unwrap();
        // independent route: scan every subset, checking domination straight
        // from the edge list
        let edges: Vec<(usize, usize)> = g.edges().collect();
        let mut naive = Vec::new();
        for mask in 0..1u64 << n {
            if mask.count_ones() as usize != k {
                continue;
            }
            let selected = |v: usize| mask & (1 << v) != 0;
            let dominated = (0..n).all(|v| {
                selected(v)
                    || edges
                        .iter()
                        .any(|&(a, b)| (a == v && selected(b)) || (b == v && selected(a)))
            });
            if dominated {
                naive.push(VertexSet::from_mask(mask));
            }
        }
        prop_assert_eq!(fast, naive);
    }

    #[test]
    fn domination_is_monotone(g in arb_graph(8), sub in any::<u64>(), extra in any::<u64>()) {
        let n = g.vertex_count();
        let full = (1u64 << n) - 1;
        let small = VertexSet::from_mask(sub & full);
        let large = VertexSet::from_mask((sub | extra) & full);
        prop_assert!(small.is_subset_of(&large));
        if g.is_dominating(&small) {
            prop_assert!(g.is_dominating(&large));
        }
        prop_assert!(g.is_dominating(&VertexSet::from_mask(full)));
    }

    #[test]
    fn uniform_width_tables_match_when_k_small(g in arb_graph(6), k_seed in 0usize..3) {
        // two counting qubits per checker cannot wrap while k <= 3
        let n = g.vertex_count();
        let k = 1 + k_seed % n.min(3);
        let layout = plan_layout(&g, k, WidthPolicy::Uniform2).unwrap();
        let oracle = build_oracle(&g, k, &layout).unwrap();
        let table = extract_phase_table(&oracle, &layout).unwrap();
        for x in 0..1u64 << n {
            let s = VertexSet::from_mask(x);
            let expected = s.len() == k && g.is_dominating(&s);
            prop_assert_eq!(table.is_marked(x), expected);
        }
    }
}

/// Dense simulation of the full 12-qubit path-graph oracle agrees with
/// reversible evaluation (bits and kickback sign) on every basis input of
/// the non-phase qubits.
#[test]
fn oracle_dense_matches_reversible_exhaustively() {
    let g = Graph::new(3, [(0, 1), (1, 2)]).unwrap();
    let layout = plan_layout(&g, 1, WidthPolicy::Exact).unwrap();
    let oracle = build_oracle(&g, 1, &layout).unwrap();
    let total = layout.total_qubits();
    assert_eq!(total, 12);
    let phase = layout.phase_qubit();

    let mut prep = Circuit::new(total);
    prep.push(Gate::x(phase)).unwrap();
    prep.push(Gate::h(phase)).unwrap();

    let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
    for input in 0..1u64 << (total - 1) {
        let expected = reversible_eval(&oracle, input, Some(phase)).unwrap();

        let mut state = StateVector::basis(total, input);
        apply_circuit(&mut state, &prep).unwrap();
        apply_circuit(&mut state, &oracle).unwrap();

        // expected state: parity * |bits> x (|0> - |1>)/sqrt(2) on the phase qubit
        let lo = expected.bits as usize;
        let hi = lo | 1 << phase;
        let sign = expected.phase_parity as f64;
        for (i, a) in state.amplitudes().iter().enumerate() {
            let want = if i == lo {
                sign * inv_sqrt2
            } else if i == hi {
                -sign * inv_sqrt2
            } else {
                0.0
            };
            assert!(
                (a.re - want).abs() < 1e-12 && a.im.abs() < 1e-12,
                "input {input:b}: amplitude {i} = {a}, want {want}"
            );
        }
    }
}

/// Same agreement for the counter circuits, exhaustively over all widths
/// up to 4 (these circuits never touch a phase qubit).
#[test]
fn counters_dense_matches_reversible_exhaustively() {
    use grover_domset::counter::{build_baseline_counter, build_improved_counter, CounterSpec};
    for w in 1..=4usize {
        let spec = CounterSpec::new(0, (1..=w).collect()).unwrap();
        for circuit in [build_improved_counter(&spec), build_baseline_counter(&spec)] {
            let qubits = circuit.num_qubits();
            for input in 0..1u64 << qubits {
                let out = reversible_eval(&circuit, input, None).unwrap();
                let mut state = StateVector::basis(qubits, input);
                apply_circuit(&mut state, &circuit).unwrap();
                for (i, a) in state.amplitudes().iter().enumerate() {
                    let want = if i as u64 == out.bits { 1.0 } else { 0.0 };
                    assert!((a.re - want).abs() < 1e-12 && a.im.abs() < 1e-12);
                }
            }
        }
    }
}
