//! Phase-estimation counting of the number of solutions M.
//!
//! A register of t counting qubits controls powers of the compressed Grover
//! iterate (diagonal phase flip plus inversion about the mean) acting on the
//! vertex register. The iterate rotates by 2*theta per application where
//! sin^2(theta) = M/N, so after the inverse Fourier transform the counting
//! register concentrates on y with pi*y/2^t close to theta (or its
//! complement), and M is read back as N*sin^2(pi*y/2^t).

use std::collections::BTreeMap;
use std::f64::consts::PI;

use serde::Serialize;
use thiserror::Error;

use crate::circuit::{Circuit, CircuitError, Gate};
use crate::graph::Graph;
use crate::oracle::{build_oracle, plan_layout, OracleError, WidthPolicy};
use crate::sim::{
    apply_circuit, extract_phase_table, invert_about_mean, marginal_probabilities, phase_flip,
    sample_counts, Histogram, SimError, StateVector, DEFAULT_DENSE_QUBIT_CAP,
};

#[derive(Debug, Error, PartialEq)]
pub enum QCountError {
    #[error("need at least one counting qubit")]
    NoCountingQubits,
    #[error("counting needs {required} simulated qubits, cap is {cap}")]
    TooLarge { required: usize, cap: usize },
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Circuit(#[from] CircuitError),
}

/// Counting-register configuration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CountingConfig {
    pub t: usize,
    pub shots: u64,
    pub seed: u64,
}

impl Default for CountingConfig {
    fn default() -> Self {
        CountingConfig { t: 7, shots: 1000, seed: 42 }
    }
}

/// Counting outcome. The histogram and estimates are keyed by the t-bit
/// outcome strings; `exact_distribution[y]` is the pre-sampling probability.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CountResult {
    pub t: usize,
    pub histogram: Histogram,
    #[serde(rename = "M_estimates")]
    pub m_estimates: BTreeMap<String, f64>,
    #[serde(rename = "M_rounded_mode")]
    pub m_rounded_mode: u64,
    #[serde(skip)]
    pub exact_distribution: Vec<f64>,
}

/// M estimate for a t-bit phase outcome: N * sin^2(pi * y / 2^t). Computed on
/// the folded outcome min(y, 2^t - y), so the complementary-eigenphase
/// symmetry estimate(y) == estimate(2^t - y) holds exactly.
pub fn estimate_from_phase(y: u64, t: usize, n_states: u64) -> f64 {
    let size = 1u64 << t;
    debug_assert!(y < size);
    let folded = y.min(size - y);
    n_states as f64 * (PI * folded as f64 / size as f64).sin().powi(2)
}

/// Forward Fourier transform on the listed qubits (bit j of the transformed
/// value lives on `qubits[j]`), H-then-controlled-phase form, no swaps.
pub fn build_qft(qubits: &[usize]) -> Result<Circuit, CircuitError> {
    let t = qubits.len();
    let mut c = Circuit::new(qubits.iter().max().map_or(0, |&q| q + 1));
    for j in 0..t {
        c.push(Gate::h(qubits[j]))?;
        for i in j + 1..t {
            c.push(Gate::cp(qubits[i], qubits[j], PI / (1u64 << (i - j)) as f64))?;
        }
    }
    Ok(c)
}

/// Inverse Fourier transform, the exact adjoint gate sequence of
/// [`build_qft`]: controlled-P(-pi/2^m) cascades and H gates. The usual
/// qubit-order reversal is left to the caller, which reads the output bits
/// from the qubit list in reverse.
pub fn build_inverse_qft(qubits: &[usize]) -> Result<Circuit, CircuitError> {
    let t = qubits.len();
    let mut c = Circuit::new(qubits.iter().max().map_or(0, |&q| q + 1));
    for j in (0..t).rev() {
        for i in (j + 1..t).rev() {
            c.push(Gate::cp(qubits[i], qubits[j], -PI / (1u64 << (i - j)) as f64))?;
        }
        c.push(Gate::h(qubits[j]))?;
    }
    Ok(c)
}

/// Runs phase-estimation counting for the instance (g, k).
///
/// Layout of the simulated state: vertex register on qubits 0..n-1, counting
/// qubits on n..n+t-1, counting qubit j controlling 2^j applications of the
/// Grover iterate. After the inverse QFT (which leaves the result
/// bit-reversed), the outcome is read from the counting qubits in reverse
/// order.
pub fn run_quantum_counting(
    g: &Graph,
    k: usize,
    cfg: &CountingConfig,
) -> Result<CountResult, QCountError> {
    if cfg.t == 0 {
        return Err(QCountError::NoCountingQubits);
    }
    let n = g.vertex_count();
    let t = cfg.t;
    if n + t > DEFAULT_DENSE_QUBIT_CAP {
        return Err(QCountError::TooLarge { required: n + t, cap: DEFAULT_DENSE_QUBIT_CAP });
    }

    let layout = plan_layout(g, k, WidthPolicy::Exact)?;
    let oracle = build_oracle(g, k, &layout)?;
    let table = extract_phase_table(&oracle, &layout)?;

    let block = 1usize << n;
    let mut state = StateVector::uniform(n + t);
    for j in 0..t {
        let reps = 1usize << j;
        let amps = state.amplitudes_mut();
        for h in 0..1usize << t {
            if h >> j & 1 == 1 {
                let slice = &mut amps[h * block..(h + 1) * block];
                for _ in 0..reps {
                    phase_flip(slice, &table);
                    invert_about_mean(slice);
                }
            }
        }
    }

    let counting: Vec<usize> = (n..n + t).collect();
    let iqft = build_inverse_qft(&counting)?.extended_to(n + t)?;
    apply_circuit(&mut state, &iqft)?;

    let read_order: Vec<usize> = counting.iter().rev().copied().collect();
    let exact_distribution = marginal_probabilities(&state, &read_order)?;
    let histogram = sample_counts(&state, &read_order, cfg.shots, cfg.seed)?;

    let n_states = 1u64 << n;
    let m_estimates: BTreeMap<String, f64> = histogram
        .iter()
        .map(|(key, _)| {
            let y = u64::from_str_radix(key, 2).expect("histogram keys are bitstrings");
            (key.to_string(), estimate_from_phase(y, t, n_states))
        })
        .collect();

    let mode = histogram
        .iter()
        .max_by(|a, b| a.1.cmp(&b.1).then(b.0.cmp(a.0)))
        .map(|(key, _)| key.to_string())
        .expect("at least one shot");
    let m_rounded_mode = m_estimates[&mode].round() as u64;

    Ok(CountResult { t, histogram, m_estimates, m_rounded_mode, exact_distribution })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn surrogate() -> Graph {
        Graph::new(6, [(0, 1), (0, 2), (1, 2), (2, 3), (2, 4), (3, 4), (3, 5)]).unwrap()
    }

    #[test]
    fn estimate_examples() {
        assert_eq!(estimate_from_phase(0, 5, 64), 0.0);
        assert_abs_diff_eq!(estimate_from_phase(16, 5, 64), 64.0, epsilon = 1e-12);
        assert_abs_diff_eq!(estimate_from_phase(10, 7, 64), 3.78, epsilon = 0.01);
    }

    #[test]
    fn estimate_symmetric_under_complement() {
        for t in 1..=8usize {
            let size = 1u64 << t;
            for y in 0..size {
                let a = estimate_from_phase(y, t, 64);
                let b = estimate_from_phase((size - y) % size, t, 64);
                assert_eq!(a.to_bits(), b.to_bits(), "t={t} y={y}");
            }
        }
    }

    #[test]
    fn qft_then_inverse_is_identity() {
        for t in 1..=5usize {
            let qubits: Vec<usize> = (0..t).collect();
            let mut roundtrip = build_qft(&qubits).unwrap();
            roundtrip.append_circuit(&build_inverse_qft(&qubits).unwrap()).unwrap();
            for x in 0..1u64 << t {
                let mut s = StateVector::basis(t, x);
                apply_circuit(&mut s, &roundtrip).unwrap();
                for (i, &a) in s.amplitudes().iter().enumerate() {
                    let expected = if i as u64 == x { 1.0 } else { 0.0 };
                    assert_abs_diff_eq!(a.re, expected, epsilon = 1e-9);
                    assert_abs_diff_eq!(a.im, 0.0, epsilon = 1e-9);
                }
            }
        }
    }

    #[test]
    fn surrogate_counting_peaks_at_complementary_phases() {
        let g = surrogate();
        let result = run_quantum_counting(&g, 2, &CountingConfig::default()).unwrap();
        let dist = &result.exact_distribution;
        let mut order: Vec<usize> = (0..dist.len()).collect();
        order.sort_by(|&a, &b| dist[b].total_cmp(&dist[a]));
        let mut top = [order[0], order[1]];
        top.sort_unstable();
        assert_eq!(top, [10, 118]);
        assert_abs_diff_eq!(estimate_from_phase(10, 7, 64), 3.78, epsilon = 0.01);
        assert_eq!(result.m_rounded_mode, 4);
    }

    #[test]
    fn counting_distribution_matches_analytic_kernel() {
        // Independent route: the two-eigenphase mixture of the standard
        // phase-estimation kernel, evaluated in closed form.
        let g = surrogate();
        let t = 7usize;
        let result =
            run_quantum_counting(&g, 2, &CountingConfig { t, ..CountingConfig::default() })
                .unwrap();
        let n_states = 64u64;
        let m = g.enumerate_dominating_sets(2).unwrap().len() as f64;
        let theta = (m / n_states as f64).sqrt().asin();
        let analytic = qpe_mixture_distribution(theta, t);
        for (y, (&actual, expected)) in result.exact_distribution.iter().zip(analytic).enumerate() {
            assert!((actual - expected).abs() < 1e-9, "y={y}: {actual} vs {expected}");
        }
    }

    /// Exact outcome distribution of t-qubit phase estimation on a unitary
    /// with eigenphases +-2*theta, starting from an equal-weight mixture.
    fn qpe_mixture_distribution(theta: f64, t: usize) -> Vec<f64> {
        let size = 1u64 << t;
        let kernel = |phi: f64| -> Vec<f64> {
            (0..size)
                .map(|y| {
                    let d = phi - y as f64 / size as f64;
                    let scaled = d * size as f64;
                    if (scaled - scaled.round()).abs() < 1e-12 {
                        if scaled.round().rem_euclid(size as f64) == 0.0 {
                            1.0
                        } else {
                            0.0
                        }
                    } else {
                        let num = (PI * scaled).sin();
                        let den = size as f64 * (PI * d).sin();
                        (num / den).powi(2)
                    }
                })
                .collect()
        };
        let plus = kernel(theta / PI);
        let minus = kernel(1.0 - theta / PI);
        plus.iter().zip(minus).map(|(a, b)| 0.5 * a + 0.5 * b).collect()
    }

    #[test]
    fn all_marked_peaks_at_half() {
        // K3 with k=3: the only size-3 subset is a dominating set, so every
        // marked check hits... N=8, M=1 at x=111.
        let g = Graph::new(3, [(0, 1), (0, 2), (1, 2)]).unwrap();
        let result =
            run_quantum_counting(&g, 3, &CountingConfig { t: 7, ..CountingConfig::default() })
                .unwrap();
        assert_eq!(result.m_rounded_mode, 1);

        // Single vertex with k=1: every input of the 1-bit register marked
        // except |0>... M = 1 of N = 2; eigenphase pi/2 exactly.
        let single = Graph::new(1, []).unwrap();
        let result =
            run_quantum_counting(&single, 1, &CountingConfig { t: 4, ..CountingConfig::default() })
                .unwrap();
        let dist = &result.exact_distribution;
        // theta = asin(sqrt(1/2)) = pi/4, eigenphase 2*theta = pi/2: y = 4 or 12
        assert_abs_diff_eq!(dist[4] + dist[12], 1.0, epsilon = 1e-9);
        assert_eq!(result.m_rounded_mode, 1);
    }

    #[test]
    fn no_solutions_peaks_at_zero() {
        let g = Graph::new(3, []).unwrap();
        let result =
            run_quantum_counting(&g, 1, &CountingConfig { t: 5, ..CountingConfig::default() })
                .unwrap();
        assert_abs_diff_eq!(result.exact_distribution[0], 1.0, epsilon = 1e-9);
        assert_eq!(result.m_rounded_mode, 0);
        assert_eq!(result.histogram.get(&"0".repeat(5)), result.histogram.shots());
    }

    #[test]
    fn config_validation() {
        let g = surrogate();
        assert_eq!(
            run_quantum_counting(&g, 2, &CountingConfig { t: 0, ..CountingConfig::default() })
                .unwrap_err(),
            QCountError::NoCountingQubits
        );
        assert!(matches!(
            run_quantum_counting(&g, 2, &CountingConfig { t: 25, ..CountingConfig::default() })
                .unwrap_err(),
            QCountError::TooLarge { .. }
        ));
    }
}
