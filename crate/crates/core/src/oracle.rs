//! Oracle synthesis for the k-dominating-set predicate.
//!
//! The full oracle is U * MCX * U^-1: a marking pass U that drives one
//! checker per vertex (ancilla = 1 iff the vertex is dominated) and a size
//! counter, a single multi-controlled X that kicks the phase qubit exactly
//! when all checkers pass and the size counter reads k, and the inverse pass
//! that restores every ancilla and counting qubit. The whole circuit is a
//! permutation plus a sign, so it can be evaluated reversibly.

use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::circuit::{Circuit, CircuitError, Gate, Polarity};
use crate::counter::{append_checker_readout_mcx, append_improved_counter};
use crate::graph::Graph;

#[derive(Debug, Error, PartialEq)]
pub enum OracleError {
    #[error("k={k} out of range 0 < k <= {n}")]
    KOutOfRange { k: usize, n: usize },
    #[error("graph must have at least one vertex")]
    EmptyGraph,
    #[error("layout does not match the instance: {0}")]
    LayoutMismatch(String),
    #[error(transparent)]
    Circuit(#[from] CircuitError),
}

/// Checker register width selection.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum WidthPolicy {
    /// Smallest width whose counter cannot wrap: with at most k selected
    /// vertices, checker v counts to min(k, deg(v)+1).
    Exact,
    /// Two counting qubits per checker regardless of degree. Safe for k <= 3;
    /// larger k can wrap a busy checker's counter.
    Uniform2,
}

/// One vertex's checker: a counting register and the ancilla it reads into.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CheckerLayout {
    pub counting: Vec<usize>,
    pub ancilla: usize,
}

/// Role of a qubit within an [`OracleLayout`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QubitRole {
    Vertex(usize),
    CheckerCounting { vertex: usize, bit: usize },
    CheckerAncilla { vertex: usize },
    SizeCounting { bit: usize },
    Phase,
}

impl fmt::Display for QubitRole {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            QubitRole::Vertex(v) => write!(f, "vertex {v}"),
            QubitRole::CheckerCounting { vertex, bit } => {
                write!(f, "checker {vertex} counting {bit}")
            }
            QubitRole::CheckerAncilla { vertex } => write!(f, "checker {vertex} ancilla"),
            QubitRole::SizeCounting { bit } => write!(f, "size counting {bit}"),
            QubitRole::Phase => write!(f, "phase"),
        }
    }
}

/// Qubit-role map for an instance: vertex qubits first, then one checker per
/// vertex (counting register, then ancilla), the size counter, and the phase
/// qubit last.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OracleLayout {
    n: usize,
    k: usize,
    vertex_qubits: Vec<usize>,
    checkers: Vec<CheckerLayout>,
    size_counter: Vec<usize>,
    phase_qubit: usize,
    total_qubits: usize,
}

impl OracleLayout {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn vertex_qubits(&self) -> &[usize] {
        &self.vertex_qubits
    }

    pub fn checkers(&self) -> &[CheckerLayout] {
        &self.checkers
    }

    pub fn size_counter(&self) -> &[usize] {
        &self.size_counter
    }

    pub fn phase_qubit(&self) -> usize {
        self.phase_qubit
    }

    pub fn total_qubits(&self) -> usize {
        self.total_qubits
    }

    /// Total qubits across all checkers (counting registers plus ancillas).
    pub fn checker_qubit_count(&self) -> usize {
        self.checkers.iter().map(|c| c.counting.len() + 1).sum()
    }

    pub fn role_of(&self, qubit: usize) -> QubitRole {
        if let Some(i) = self.vertex_qubits.iter().position(|&q| q == qubit) {
            return QubitRole::Vertex(i);
        }
        for (vertex, checker) in self.checkers.iter().enumerate() {
            if let Some(bit) = checker.counting.iter().position(|&q| q == qubit) {
                return QubitRole::CheckerCounting { vertex, bit };
            }
            if checker.ancilla == qubit {
                return QubitRole::CheckerAncilla { vertex };
            }
        }
        if let Some(bit) = self.size_counter.iter().position(|&q| q == qubit) {
            return QubitRole::SizeCounting { bit };
        }
        QubitRole::Phase
    }

    /// JSON role report: `[{"qubit": 0, "role": "vertex 0"}, ...]`.
    pub fn role_report(&self) -> serde_json::Value {
        let entries: Vec<serde_json::Value> = (0..self.total_qubits)
            .map(|q| serde_json::json!({ "qubit": q, "role": self.role_of(q).to_string() }))
            .collect();
        serde_json::Value::Array(entries)
    }

    /// One-line budget summary, e.g. `28 qubits = 6 vertex + 18 checker + 3 size + 1 phase`.
    pub fn summary(&self) -> String {
        format!(
            "{} qubits = {} vertex + {} checker + {} size + 1 phase",
            self.total_qubits,
            self.n,
            self.checker_qubit_count(),
            self.size_counter.len(),
        )
    }
}

fn ceil_log2(x: usize) -> usize {
    debug_assert!(x >= 1);
    (usize::BITS - (x - 1).leading_zeros()) as usize
}

/// Plans the qubit roles for an instance (g, k) under a width policy.
pub fn plan_layout(g: &Graph, k: usize, policy: WidthPolicy) -> Result<OracleLayout, OracleError> {
    let n = g.vertex_count();
    if n == 0 {
        return Err(OracleError::EmptyGraph);
    }
    if k == 0 || k > n {
        return Err(OracleError::KOutOfRange { k, n });
    }

    let vertex_qubits: Vec<usize> = (0..n).collect();
    let mut next = n;
    let mut checkers = Vec::with_capacity(n);
    for v in 0..n {
        let width = match policy {
            WidthPolicy::Exact => {
                // The checker counts |N[v] ∩ selection| <= min(k, deg(v)+1);
                // pick the smallest register that cannot wrap at that count.
                let max_count = k.min(g.degree(v).expect("v < n") + 1);
                ceil_log2(max_count + 1).max(1)
            }
            WidthPolicy::Uniform2 => 2,
        };
        let counting: Vec<usize> = (next..next + width).collect();
        let ancilla = next + width;
        next = ancilla + 1;
        checkers.push(CheckerLayout { counting, ancilla });
    }
    let size_width = ceil_log2(n + 1);
    let size_counter: Vec<usize> = (next..next + size_width).collect();
    next += size_width;
    let phase_qubit = next;

    Ok(OracleLayout {
        n,
        k,
        vertex_qubits,
        checkers,
        size_counter,
        phase_qubit,
        total_qubits: phase_qubit + 1,
    })
}

fn check_layout(g: &Graph, k: usize, layout: &OracleLayout) -> Result<(), OracleError> {
    if layout.n != g.vertex_count() {
        return Err(OracleError::LayoutMismatch(format!(
            "layout is for {} vertices, graph has {}",
            layout.n,
            g.vertex_count()
        )));
    }
    if layout.k != k {
        return Err(OracleError::LayoutMismatch(format!(
            "layout is for k={}, requested k={k}",
            layout.k
        )));
    }
    if layout.checkers.len() != layout.n {
        return Err(OracleError::LayoutMismatch(format!(
            "{} checkers for {} vertices",
            layout.checkers.len(),
            layout.n
        )));
    }
    Ok(())
}

/// Builds the marking pass U: ancilla initialization, one controlled counter
/// per (vertex, dominated neighbor) pair, the size counter increments, and
/// the checker readouts. Contains only permutation gates.
pub fn build_u_omega(g: &Graph, k: usize, layout: &OracleLayout) -> Result<Circuit, OracleError> {
    check_layout(g, k, layout)?;
    let mut c = Circuit::new(layout.total_qubits);

    // (a) every checker ancilla starts at |1>
    for checker in &layout.checkers {
        c.push(Gate::x(checker.ancilla))?;
    }
    // (b) vertex qubit u increments the checker of every vertex it dominates
    for u in 0..layout.n {
        let neighborhood = g.closed_neighborhood(u).expect("u < n");
        for w in neighborhood.members() {
            append_improved_counter(&mut c, layout.vertex_qubits[u], &layout.checkers[w].counting);
        }
    }
    // (c) vertex qubit u increments the selection-size counter
    for u in 0..layout.n {
        append_improved_counter(&mut c, layout.vertex_qubits[u], &layout.size_counter);
    }
    // (d) readout: ancilla v ends |1> iff checker v counted anything
    for checker in &layout.checkers {
        append_checker_readout_mcx(&mut c, &checker.counting, checker.ancilla);
    }
    Ok(c)
}

/// Controls of the central kickback MCX: every checker ancilla positive, and
/// each size-counter qubit with the polarity of the matching bit of k, so k
/// is encoded purely in control polarities.
pub(crate) fn phase_mcx_controls(layout: &OracleLayout, k: usize) -> Vec<(usize, Polarity)> {
    let mut controls: Vec<(usize, Polarity)> =
        layout.checkers.iter().map(|ch| (ch.ancilla, Polarity::Positive)).collect();
    for (bit, &q) in layout.size_counter.iter().enumerate() {
        let polarity = if k >> bit & 1 == 1 { Polarity::Positive } else { Polarity::Negative };
        controls.push((q, polarity));
    }
    controls
}

/// Builds the complete oracle U * MCX * U^-1. The central multi-controlled X
/// targets the phase qubit and fires exactly when every vertex is dominated
/// and the size counter reads k.
pub fn build_oracle(g: &Graph, k: usize, layout: &OracleLayout) -> Result<Circuit, OracleError> {
    let marking = build_u_omega(g, k, layout)?;
    let mut c = marking.clone();
    c.push(Gate::mcx_polarized(phase_mcx_controls(layout, k), layout.phase_qubit))?;
    c.append_circuit(&marking.inverse())?;
    Ok(c)
}
