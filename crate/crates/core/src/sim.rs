//! Dense statevector simulation plus a reversible basis-state evaluator that
//! turns permutation-gate oracles into classical phase tables.
//!
//! Conventions, fixed globally: basis index bit `i` corresponds to qubit `i`
//! (little-endian), and printed bitstrings put the highest qubit leftmost.

use std::collections::BTreeMap;
use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::circuit::{Circuit, ControlledBase, Gate, Polarity};
use crate::oracle::OracleLayout;

/// Norm drift allowed before a state is considered corrupted.
pub const NORM_TOLERANCE: f64 = 1e-10;

/// Dense simulation above this qubit count is refused unless the caller
/// raises the cap explicitly; 2^26 amplitudes is already a 1 GiB state.
pub const DEFAULT_DENSE_QUBIT_CAP: usize = 26;

#[derive(Debug, Error, PartialEq)]
pub enum SimError {
    #[error("circuit acts on {circuit} qubits but the state has {state}")]
    QubitCountMismatch { circuit: usize, state: usize },
    #[error("qubit {qubit} out of range for {num_qubits} qubits")]
    QubitOutOfRange { qubit: usize, num_qubits: usize },
    #[error("qubit {0} listed twice in the measurement subset")]
    DuplicateQubit(usize),
    #[error("shots must be at least 1")]
    ZeroShots,
    #[error("`{0}` is not a permutation gate (only X and controlled-X are)")]
    NonPermutationGate(String),
    #[error("phase qubit {0} may not be used as a control")]
    PhaseQubitControl(usize),
    #[error(
        "uncomputation violation on input {input:0width$b}: qubit {qubit} ({role}) not restored"
    )]
    UncomputationViolation { input: u64, width: usize, qubit: usize, role: String },
}

/// Dense complex amplitudes over the 2^q basis states of q qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    num_qubits: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    /// |0...0>
    pub fn zero(num_qubits: usize) -> Self {
        let mut amps = vec![Complex64::ZERO; 1 << num_qubits];
        amps[0] = Complex64::ONE;
        StateVector { num_qubits, amps }
    }

    /// The uniform superposition over all basis states.
    pub fn uniform(num_qubits: usize) -> Self {
        let dim = 1usize << num_qubits;
        let amp = Complex64::new(1.0 / (dim as f64).sqrt(), 0.0);
        StateVector { num_qubits, amps: vec![amp; dim] }
    }

    /// The computational basis state |index>.
    pub fn basis(num_qubits: usize, index: u64) -> Self {
        let mut amps = vec![Complex64::ZERO; 1 << num_qubits];
        amps[index as usize] = Complex64::ONE;
        StateVector { num_qubits, amps }
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }
}

/// Applies every gate of `c` to `s` in order.
pub fn apply_circuit(s: &mut StateVector, c: &Circuit) -> Result<(), SimError> {
    if c.num_qubits() != s.num_qubits {
        return Err(SimError::QubitCountMismatch { circuit: c.num_qubits(), state: s.num_qubits });
    }
    for g in c.ops() {
        apply_gate(&mut s.amps, g);
    }
    Ok(())
}

fn apply_gate(amps: &mut [Complex64], gate: &Gate) {
    match gate {
        Gate::H(t) => {
            let bit = 1usize << t;
            for i in 0..amps.len() {
                if i & bit == 0 {
                    let a = amps[i];
                    let b = amps[i | bit];
                    amps[i] = (a + b) * FRAC_1_SQRT_2;
                    amps[i | bit] = (a - b) * FRAC_1_SQRT_2;
                }
            }
        }
        Gate::X(t) => {
            let bit = 1usize << t;
            for i in 0..amps.len() {
                if i & bit == 0 {
                    amps.swap(i, i | bit);
                }
            }
        }
        Gate::Phase(t, angle) => {
            let bit = 1usize << t;
            let phase = Complex64::from_polar(1.0, *angle);
            for (i, amp) in amps.iter_mut().enumerate() {
                if i & bit != 0 {
                    *amp *= phase;
                }
            }
        }
        Gate::Controlled { base, controls, target } => {
            let (cmask, cval) = control_masks(controls);
            let tbit = 1usize << target;
            match base {
                ControlledBase::X => {
                    for i in 0..amps.len() {
                        if i & tbit == 0 && i & cmask == cval {
                            amps.swap(i, i | tbit);
                        }
                    }
                }
                ControlledBase::Phase(angle) => {
                    let phase = Complex64::from_polar(1.0, *angle);
                    for (i, amp) in amps.iter_mut().enumerate() {
                        if i & tbit != 0 && i & cmask == cval {
                            *amp *= phase;
                        }
                    }
                }
            }
        }
    }
}

fn control_masks(controls: &[(usize, Polarity)]) -> (usize, usize) {
    let mut mask = 0usize;
    let mut val = 0usize;
    for &(q, pol) in controls {
        mask |= 1 << q;
        if pol == Polarity::Positive {
            val |= 1 << q;
        }
    }
    (mask, val)
}

fn check_subset(qubits: &[usize], num_qubits: usize) -> Result<(), SimError> {
    let mut seen = vec![false; num_qubits];
    for &q in qubits {
        if q >= num_qubits {
            return Err(SimError::QubitOutOfRange { qubit: q, num_qubits });
        }
        if seen[q] {
            return Err(SimError::DuplicateQubit(q));
        }
        seen[q] = true;
    }
    Ok(())
}

/// Probabilities over the 2^|qubits| outcomes of measuring the listed qubits;
/// outcome bit `j` corresponds to the `j`-th listed qubit.
pub fn marginal_probabilities(s: &StateVector, qubits: &[usize]) -> Result<Vec<f64>, SimError> {
    check_subset(qubits, s.num_qubits)?;
    let mut out = vec![0.0; 1 << qubits.len()];
    for (i, amp) in s.amps.iter().enumerate() {
        let p = amp.norm_sqr();
        if p == 0.0 {
            continue;
        }
        let mut outcome = 0usize;
        for (j, &q) in qubits.iter().enumerate() {
            if i & (1 << q) != 0 {
                outcome |= 1 << j;
            }
        }
        out[outcome] += p;
    }
    Ok(out)
}

/// Measurement counts keyed by bitstring; counts always sum to `shots`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Histogram {
    counts: BTreeMap<String, u64>,
    shots: u64,
}

impl Histogram {
    pub(crate) fn from_counts(counts: BTreeMap<String, u64>, shots: u64) -> Self {
        debug_assert_eq!(counts.values().sum::<u64>(), shots);
        Histogram { counts, shots }
    }

    pub fn shots(&self) -> u64 {
        self.shots
    }

    pub fn get(&self, bitstring: &str) -> u64 {
        self.counts.get(bitstring).copied().unwrap_or(0)
    }

    /// Entries in ascending bitstring order (only outcomes that occurred).
    pub fn iter(&self) -> impl Iterator<Item = (&str, u64)> {
        self.counts.iter().map(|(k, &v)| (k.as_str(), v))
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    /// `bitstring,count` lines sorted by bitstring.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("bitstring,count\n");
        for (k, v) in &self.counts {
            out.push_str(&format!("{k},{v}\n"));
        }
        out
    }
}

// Serializes as the plain map {"bitstring": count}.
impl Serialize for Histogram {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(self.counts.len()))?;
        for (k, v) in &self.counts {
            map.serialize_entry(k, v)?;
        }
        map.end()
    }
}

/// Samples `shots` measurements of the listed qubits with a seeded PRNG.
/// Identical (state, qubits, shots, seed) always yields the same histogram.
pub fn sample_counts(
    s: &StateVector,
    qubits: &[usize],
    shots: u64,
    seed: u64,
) -> Result<Histogram, SimError> {
    if shots == 0 {
        return Err(SimError::ZeroShots);
    }
    let probs = marginal_probabilities(s, qubits)?;
    let mut cumulative = Vec::with_capacity(probs.len());
    let mut total = 0.0;
    for &p in &probs {
        total += p;
        cumulative.push(total);
    }

    let width = qubits.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut counts: BTreeMap<String, u64> = BTreeMap::new();
    for _ in 0..shots {
        let u: f64 = rng.random::<f64>() * total;
        let idx = cumulative.partition_point(|&c| c <= u).min(probs.len() - 1);
        *counts.entry(format!("{idx:0width$b}")).or_insert(0) += 1;
    }
    Ok(Histogram::from_counts(counts, shots))
}

/// Boolean predicate table over the 2^n inputs of an n-qubit register.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PhaseTable {
    n: usize,
    table: Vec<bool>,
}

impl PhaseTable {
    pub fn from_fn<F: FnMut(u64) -> bool>(n: usize, f: F) -> Self {
        PhaseTable { n, table: (0..1u64 << n).map(f).collect() }
    }

    pub fn input_width(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.table.len()
    }

    pub fn is_empty(&self) -> bool {
        self.table.is_empty()
    }

    pub fn is_marked(&self, x: u64) -> bool {
        self.table[x as usize]
    }

    pub fn marked_count(&self) -> u64 {
        self.table.iter().filter(|&&b| b).count() as u64
    }

    pub fn marked(&self) -> impl Iterator<Item = u64> + '_ {
        self.table.iter().enumerate().filter(|(_, &b)| b).map(|(x, _)| x as u64)
    }
}

/// Result of evaluating a permutation circuit on one basis input.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ReversibleOutcome {
    /// Output bit assignment over the non-phase qubits (phase bit forced 0).
    pub bits: u64,
    /// +1 or -1: each X action on the |-> phase qubit contributes a factor -1.
    pub phase_parity: i32,
}

/// Runs a circuit of X / controlled-X gates as a classical reversible
/// function on a basis input. `phase_qubit`, when given, is treated as held
/// in |->: flips of it accumulate sign instead of toggling a bit, and it must
/// never appear as a control.
pub fn reversible_eval(
    c: &Circuit,
    input: u64,
    phase_qubit: Option<usize>,
) -> Result<ReversibleOutcome, SimError> {
    if let Some(p) = phase_qubit {
        if p >= c.num_qubits() {
            return Err(SimError::QubitOutOfRange { qubit: p, num_qubits: c.num_qubits() });
        }
    }
    let phase_mask = phase_qubit.map_or(0u64, |p| 1u64 << p);
    let mut bits = input & !phase_mask;
    let mut parity = 1i32;
    for g in c.ops() {
        match g {
            Gate::X(t) => {
                let tbit = 1u64 << t;
                if tbit == phase_mask {
                    parity = -parity;
                } else {
                    bits ^= tbit;
                }
            }
            Gate::Controlled { base: ControlledBase::X, controls, target } => {
                let fires = controls.iter().try_fold(true, |acc, &(q, pol)| {
                    if Some(q) == phase_qubit {
                        return Err(SimError::PhaseQubitControl(q));
                    }
                    let set = bits & (1u64 << q) != 0;
                    Ok(acc && (set == (pol == Polarity::Positive)))
                })?;
                if fires {
                    let tbit = 1u64 << target;
                    if tbit == phase_mask {
                        parity = -parity;
                    } else {
                        bits ^= tbit;
                    }
                }
            }
            other => return Err(SimError::NonPermutationGate(other.to_string())),
        }
    }
    Ok(ReversibleOutcome { bits, phase_parity: parity })
}

/// Evaluates a phase-kickback oracle on every vertex-register input, checking
/// that every ancilla and counting qubit is restored to its initial value.
/// The resulting table marks exactly the inputs whose phase was flipped.
pub fn extract_phase_table(
    oracle: &Circuit,
    layout: &OracleLayout,
) -> Result<PhaseTable, SimError> {
    let n = layout.n();
    let size = 1u64 << n;
    let rows: Vec<Result<bool, SimError>> = (0..size)
        .into_par_iter()
        .map(|x| {
            let mut input = 0u64;
            for (i, &q) in layout.vertex_qubits().iter().enumerate() {
                if x & (1 << i) != 0 {
                    input |= 1 << q;
                }
            }
            let out = reversible_eval(oracle, input, Some(layout.phase_qubit()))?;
            for q in 0..layout.total_qubits() {
                if q == layout.phase_qubit() {
                    continue;
                }
                if (out.bits ^ input) & (1 << q) != 0 {
                    return Err(SimError::UncomputationViolation {
                        input: x,
                        width: n,
                        qubit: q,
                        role: layout.role_of(q).to_string(),
                    });
                }
            }
            Ok(out.phase_parity == -1)
        })
        .collect();
    let mut table = Vec::with_capacity(size as usize);
    for row in rows {
        table.push(row?);
    }
    Ok(PhaseTable { n, table })
}

/// Sign-flips the amplitudes of the marked basis states.
pub fn phase_flip(amps: &mut [Complex64], table: &PhaseTable) {
    debug_assert_eq!(amps.len(), table.len());
    for x in table.marked() {
        amps[x as usize] = -amps[x as usize];
    }
}

/// Reflects amplitudes about their mean: the diffuser 2|s><s| - I in the
/// computational basis.
pub fn invert_about_mean(amps: &mut [Complex64]) {
    let mean = amps.iter().sum::<Complex64>() / amps.len() as f64;
    for a in amps.iter_mut() {
        *a = 2.0 * mean - *a;
    }
}

impl fmt::Display for ReversibleOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "bits={:b} parity={:+}", self.bits, self.phase_parity)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn hadamard_on_zero() {
        let mut s = StateVector::zero(1);
        let mut c = Circuit::new(1);
        c.push(Gate::h(0)).unwrap();
        apply_circuit(&mut s, &c).unwrap();
        assert_abs_diff_eq!(s.amplitudes()[0].re, FRAC_1_SQRT_2, epsilon = 1e-12);
        assert_abs_diff_eq!(s.amplitudes()[1].re, FRAC_1_SQRT_2, epsilon = 1e-12);
    }

    #[test]
    fn x_flips_basis_state() {
        let mut s = StateVector::zero(1);
        let mut c = Circuit::new(1);
        c.push(Gate::x(0)).unwrap();
        apply_circuit(&mut s, &c).unwrap();
        assert_eq!(s.amplitudes()[1], Complex64::ONE);
    }

    #[test]
    fn negative_control_fires_on_zero() {
        let mut s = StateVector::zero(2);
        let mut c = Circuit::new(2);
        c.push(Gate::mcx_polarized(vec![(0, Polarity::Negative)], 1)).unwrap();
        apply_circuit(&mut s, &c).unwrap();
        // |00> -> |10>, i.e. basis index 2
        assert_eq!(s.amplitudes()[2], Complex64::ONE);
        assert_eq!(s.amplitudes()[0], Complex64::ZERO);
    }

    #[test]
    fn qubit_count_mismatch_rejected() {
        let mut s = StateVector::zero(1);
        let c = Circuit::new(2);
        assert_eq!(
            apply_circuit(&mut s, &c),
            Err(SimError::QubitCountMismatch { circuit: 2, state: 1 })
        );
    }

    #[test]
    fn marginals_on_bell_state() {
        let mut s = StateVector::zero(2);
        let mut c = Circuit::new(2);
        c.push(Gate::h(0)).unwrap();
        c.push(Gate::cx(0, 1)).unwrap();
        apply_circuit(&mut s, &c).unwrap();
        let m = marginal_probabilities(&s, &[0]).unwrap();
        assert_abs_diff_eq!(m[0], 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(m[1], 0.5, epsilon = 1e-12);
    }

    #[test]
    fn marginals_deterministic_and_uniform() {
        let s = StateVector::basis(1, 1);
        let m = marginal_probabilities(&s, &[0]).unwrap();
        assert_eq!(m, vec![0.0, 1.0]);

        let s = StateVector::uniform(2);
        let m = marginal_probabilities(&s, &[0, 1]).unwrap();
        for p in m {
            assert_abs_diff_eq!(p, 0.25, epsilon = 1e-12);
        }
    }

    #[test]
    fn marginals_reject_bad_subsets() {
        let s = StateVector::zero(2);
        assert_eq!(
            marginal_probabilities(&s, &[2]),
            Err(SimError::QubitOutOfRange { qubit: 2, num_qubits: 2 })
        );
        assert_eq!(marginal_probabilities(&s, &[0, 0]), Err(SimError::DuplicateQubit(0)));
    }

    #[test]
    fn sampling_deterministic_state() {
        let s = StateVector::basis(1, 1);
        let h = sample_counts(&s, &[0], 100, 7).unwrap();
        assert_eq!(h.get("1"), 100);
        assert_eq!(h.get("0"), 0);
        assert_eq!(h.shots(), 100);
    }

    #[test]
    fn sampling_unbiased_within_five_sigma() {
        let mut s = StateVector::zero(1);
        let mut c = Circuit::new(1);
        c.push(Gate::h(0)).unwrap();
        apply_circuit(&mut s, &c).unwrap();
        let h = sample_counts(&s, &[0], 1000, 12345).unwrap();
        let ones = h.get("1") as f64;
        // binomial sigma = sqrt(1000 * 0.25) ~= 15.8
        assert!((ones - 500.0).abs() < 5.0 * 15.811, "ones = {ones}");
    }

    #[test]
    fn sampling_repeatable() {
        let s = StateVector::uniform(3);
        let a = sample_counts(&s, &[0, 1, 2], 500, 99).unwrap();
        let b = sample_counts(&s, &[0, 1, 2], 500, 99).unwrap();
        assert_eq!(a, b);
        let c = sample_counts(&s, &[0, 1, 2], 500, 100).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn sampling_rejects_zero_shots() {
        let s = StateVector::zero(1);
        assert_eq!(sample_counts(&s, &[0], 0, 1), Err(SimError::ZeroShots));
    }

    #[test]
    fn histogram_serialization() {
        let s = StateVector::basis(2, 2);
        let h = sample_counts(&s, &[0, 1], 10, 3).unwrap();
        assert_eq!(serde_json::to_string(&h).unwrap(), r#"{"10":10}"#);
        assert_eq!(h.to_csv(), "bitstring,count\n10,10\n");
    }

    #[test]
    fn reversible_eval_examples() {
        let mut c = Circuit::new(1);
        c.push(Gate::x(0)).unwrap();
        let out = reversible_eval(&c, 0, None).unwrap();
        assert_eq!(out, ReversibleOutcome { bits: 1, phase_parity: 1 });

        // CX onto the phase qubit kicks the sign once.
        let mut c = Circuit::new(2);
        c.push(Gate::cx(0, 1)).unwrap();
        let out = reversible_eval(&c, 0b01, Some(1)).unwrap();
        assert_eq!(out, ReversibleOutcome { bits: 0b01, phase_parity: -1 });
        let out = reversible_eval(&c, 0b00, Some(1)).unwrap();
        assert_eq!(out, ReversibleOutcome { bits: 0b00, phase_parity: 1 });
    }

    #[test]
    fn reversible_eval_rejects_non_permutation_gates() {
        let mut c = Circuit::new(1);
        c.push(Gate::h(0)).unwrap();
        assert!(matches!(reversible_eval(&c, 0, None), Err(SimError::NonPermutationGate(_))));

        let mut c = Circuit::new(2);
        c.push(Gate::cx(1, 0)).unwrap();
        assert_eq!(reversible_eval(&c, 0, Some(1)), Err(SimError::PhaseQubitControl(1)));
    }

    #[test]
    fn phase_flip_and_mean_inversion() {
        let table = PhaseTable::from_fn(2, |x| x == 3);
        let mut amps = vec![Complex64::new(0.5, 0.0); 4];
        phase_flip(&mut amps, &table);
        assert_eq!(amps[3], Complex64::new(-0.5, 0.0));
        invert_about_mean(&mut amps);
        // mean = 0.25, so 0.5 -> 0, -0.5 -> 1.0
        assert_abs_diff_eq!(amps[0].re, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(amps[3].re, 1.0, epsilon = 1e-12);
    }
}
