//! Diffuser construction, iteration planning, and the end-to-end search.
//!
//! Two execution paths produce the same vertex-qubit distribution:
//!
//! * `Compressed` (default): the oracle circuit is reduced to its verified
//!   diagonal phase table, and the search runs exactly on just the vertex
//!   register. Sound because table extraction proves every ancilla and
//!   counting qubit is restored on every input.
//! * `Dense`: the full circuit (oracle, phase qubit in |->, gate-level
//!   diffuser) is simulated amplitude-by-amplitude. Memory grows as
//!   2^total_qubits, so this path sits behind a qubit cap.

use std::f64::consts::PI;

use serde::Serialize;
use thiserror::Error;

use crate::circuit::{Circuit, CircuitError, Gate};
use crate::graph::{Graph, GraphError};
use crate::oracle::{build_oracle, plan_layout, OracleError, OracleLayout, WidthPolicy};
use crate::qcount::{run_quantum_counting, CountingConfig, QCountError};
use crate::sim::{
    apply_circuit, extract_phase_table, invert_about_mean, marginal_probabilities, phase_flip,
    sample_counts, Histogram, SimError, StateVector, DEFAULT_DENSE_QUBIT_CAP,
};

#[derive(Debug, Error, PartialEq)]
pub enum GroverError {
    #[error("diffuser needs at least one qubit")]
    EmptyDiffuser,
    #[error("iteration count undefined for M = 0")]
    NoSolutions,
    #[error("M={m} exceeds the search space N={n}")]
    TooManySolutions { m: u64, n: u64 },
    #[error("simulating {required} qubits exceeds the cap of {cap}; raise the cap to allow it")]
    QubitCapExceeded { required: usize, cap: usize },
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Circuit(#[from] CircuitError),
    #[error(transparent)]
    Counting(#[from] QCountError),
}

/// H-all, X-all, multi-controlled phase flip of |1...1>, X-all, H-all.
/// Acts as 2|s><s| - I on the given qubits, up to a global phase.
pub fn build_diffuser(qubits: &[usize]) -> Result<Circuit, GroverError> {
    let (&last, rest) = qubits.split_last().ok_or(GroverError::EmptyDiffuser)?;
    let mut c = Circuit::new(qubits.iter().max().unwrap() + 1);
    for &q in qubits {
        c.push(Gate::h(q))?;
    }
    for &q in qubits {
        c.push(Gate::x(q))?;
    }
    c.push(Gate::h(last))?;
    if rest.is_empty() {
        c.push(Gate::x(last))?;
    } else {
        c.push(Gate::mcx(rest, last))?;
    }
    c.push(Gate::h(last))?;
    for &q in qubits {
        c.push(Gate::x(q))?;
    }
    for &q in qubits {
        c.push(Gate::h(q))?;
    }
    Ok(c)
}

/// Optimal repetition count floor(pi/4 * sqrt(N/M)).
pub fn iteration_count(n_states: u64, m: u64) -> Result<usize, GroverError> {
    if m == 0 {
        return Err(GroverError::NoSolutions);
    }
    if m > n_states {
        return Err(GroverError::TooManySolutions { m, n: n_states });
    }
    Ok((PI / 4.0 * (n_states as f64 / m as f64).sqrt()).floor() as usize)
}

/// Probability that measuring after `r` iterations yields a solution:
/// sin^2((2r+1) * arcsin(sqrt(M/N))).
pub fn success_probability(n_states: u64, m: u64, r: usize) -> f64 {
    debug_assert!(m >= 1 && m <= n_states);
    let theta = (m as f64 / n_states as f64).sqrt().asin();
    ((2 * r + 1) as f64 * theta).sin().powi(2)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ExecMode {
    Dense,
    Compressed,
}

/// Where the solution count M driving the iteration plan comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolutionCountSource {
    /// Brute-force enumeration (exact).
    Classical,
    /// Phase-estimation counting with `t` counting qubits.
    QuantumCounting { t: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOptions {
    pub mode: ExecMode,
    pub width_policy: WidthPolicy,
    pub shots: u64,
    pub seed: u64,
    /// Overrides the floor(pi/4 sqrt(N/M)) repetition count when set.
    pub reps_override: Option<usize>,
    pub dense_cap: usize,
    pub m_source: SolutionCountSource,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            mode: ExecMode::Compressed,
            width_policy: WidthPolicy::Exact,
            shots: 1000,
            seed: 42,
            reps_override: None,
            dense_cap: DEFAULT_DENSE_QUBIT_CAP,
            m_source: SolutionCountSource::Classical,
        }
    }
}

/// The resolved search parameters a run executed with.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GroverPlan {
    #[serde(rename = "N")]
    pub n_states: u64,
    #[serde(rename = "M")]
    pub m: u64,
    pub r: usize,
    pub mode: ExecMode,
    pub shots: u64,
    pub seed: u64,
}

/// Outcome of a search run. `exact_target_mass` is the summed probability of
/// the classically verified solutions in the pre-measurement state.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunOutcome {
    pub plan: GroverPlan,
    pub exact_target_mass: f64,
    pub histogram: Histogram,
    pub solutions: Vec<String>,
    #[serde(skip)]
    pub layout: OracleLayout,
    /// Probabilities over all 2^n vertex-register outcomes.
    #[serde(skip)]
    pub vertex_marginal: Vec<f64>,
}

impl RunOutcome {
    /// True when M = 0 forced a degenerate plan (uniform output, r = 0).
    pub fn is_degenerate(&self) -> bool {
        self.plan.m == 0
    }
}

/// Runs the full pipeline for (g, k): plan the layout, build and verify the
/// oracle, amplify, and sample the vertex register.
pub fn run_grover(g: &Graph, k: usize, opts: &RunOptions) -> Result<RunOutcome, GroverError> {
    let n = g.vertex_count();
    // compressed mode still holds 2^n amplitudes and a 2^n-row phase table
    let required = match opts.mode {
        ExecMode::Compressed => n,
        ExecMode::Dense => plan_layout(g, k, opts.width_policy)?.total_qubits(),
    };
    let cap = opts.dense_cap.min(62);
    if required > cap {
        return Err(GroverError::QubitCapExceeded { required, cap });
    }

    let layout = plan_layout(g, k, opts.width_policy)?;
    let solutions = g.enumerate_dominating_sets(k)?;
    let n_states = 1u64 << n;

    let m = match opts.m_source {
        SolutionCountSource::Classical => solutions.len() as u64,
        SolutionCountSource::QuantumCounting { t } => {
            let cfg = CountingConfig { t, shots: opts.shots, seed: opts.seed };
            run_quantum_counting(g, k, &cfg)?.m_rounded_mode
        }
    };

    // M = 0 gets a degenerate plan (no iterations, uniform output) so batch
    // runs over many instances never abort.
    let r = if m == 0 {
        0
    } else {
        match opts.reps_override {
            Some(r) => r,
            None => iteration_count(n_states, m)?,
        }
    };

    let vertex_qubits: Vec<usize> = layout.vertex_qubits().to_vec();
    let (vertex_marginal, histogram) = match opts.mode {
        ExecMode::Compressed => {
            let oracle = build_oracle(g, k, &layout)?;
            let table = extract_phase_table(&oracle, &layout)?;
            let mut state = StateVector::uniform(n);
            for _ in 0..r {
                phase_flip(state.amplitudes_mut(), &table);
                invert_about_mean(state.amplitudes_mut());
            }
            let qubits: Vec<usize> = (0..n).collect();
            let marginal = marginal_probabilities(&state, &qubits)?;
            let histogram = sample_counts(&state, &qubits, opts.shots, opts.seed)?;
            (marginal, histogram)
        }
        ExecMode::Dense => {
            let total = layout.total_qubits();
            let oracle = build_oracle(g, k, &layout)?;
            let diffuser = build_diffuser(&vertex_qubits)?.extended_to(total)?;
            let mut iteration = oracle;
            iteration.append_circuit(&diffuser)?;

            let mut prep = Circuit::new(total);
            for &q in &vertex_qubits {
                prep.push(Gate::h(q))?;
            }
            prep.push(Gate::x(layout.phase_qubit()))?;
            prep.push(Gate::h(layout.phase_qubit()))?;

            let mut state = StateVector::zero(total);
            apply_circuit(&mut state, &prep)?;
            for _ in 0..r {
                apply_circuit(&mut state, &iteration)?;
            }
            let marginal = marginal_probabilities(&state, &vertex_qubits)?;
            let histogram = sample_counts(&state, &vertex_qubits, opts.shots, opts.seed)?;
            (marginal, histogram)
        }
    };

    let exact_target_mass =
        solutions.iter().map(|s| vertex_marginal[s.mask() as usize]).sum::<f64>();

    Ok(RunOutcome {
        plan: GroverPlan { n_states, m, r, mode: opts.mode, shots: opts.shots, seed: opts.seed },
        exact_target_mass,
        histogram,
        solutions: solutions.iter().map(|s| s.bitstring(n)).collect(),
        layout,
        vertex_marginal,
    })
}
