//! Controlled cyclic counter builders and the checker readout.
//!
//! Both counter builders realize the same semantics: if the control qubit is
//! |1>, map the counting register x to (x+1) mod 2^w, wrapping from all-ones
//! back to zero; if |0>, do nothing. They differ in realization:
//!
//! * the improved builder is a descending cascade of multi-controlled X
//!   gates sharing the control qubit, with zero X gates;
//! * the baseline builder ripples upward, inverting each counting qubit
//!   after flipping it so later gates can condition on the original value,
//!   then restores the inversions at the end.
//!
//! The gap between them is exact: 2w-2 X gates and w layers of depth.

use thiserror::Error;

use crate::circuit::{Circuit, Gate, GateCensus, Polarity};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CounterError {
    #[error("counting register must not be empty")]
    EmptyRegister,
    #[error("counter qubits must be pairwise distinct (qubit {0} repeats)")]
    DuplicateQubit(usize),
    #[error("counter comparison needs width >= 2, got {0}")]
    WidthTooSmall(usize),
}

/// A control qubit plus an ordered counting register, least significant first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CounterSpec {
    control: usize,
    counting: Vec<usize>,
}

impl CounterSpec {
    pub fn new(control: usize, counting: Vec<usize>) -> Result<Self, CounterError> {
        if counting.is_empty() {
            return Err(CounterError::EmptyRegister);
        }
        let mut seen = std::collections::BTreeSet::new();
        for &q in counting.iter().chain(std::iter::once(&control)) {
            if !seen.insert(q) {
                return Err(CounterError::DuplicateQubit(q));
            }
        }
        Ok(CounterSpec { control, counting })
    }

    pub fn control(&self) -> usize {
        self.control
    }

    pub fn counting(&self) -> &[usize] {
        &self.counting
    }

    pub fn width(&self) -> usize {
        self.counting.len()
    }

    fn circuit(&self) -> Circuit {
        let max = self.counting.iter().chain(std::iter::once(&self.control)).max().unwrap();
        Circuit::new(max + 1)
    }
}

/// Pushes the improved counter onto an existing circuit: for i = w-1 down
/// to 1 a controlled-X on {control, a_0..a_{i-1}} targeting a_i, then
/// CX(control -> a_0). Contains no X gates.
pub(crate) fn append_improved_counter(c: &mut Circuit, control: usize, counting: &[usize]) {
    let w = counting.len();
    for i in (1..w).rev() {
        let mut controls = vec![control];
        controls.extend_from_slice(&counting[..i]);
        c.push(Gate::mcx(&controls, counting[i])).expect("validated counter spec");
    }
    c.push(Gate::cx(control, counting[0])).expect("validated counter spec");
}

/// The improved controlled increment: a descending multi-controlled cascade.
pub fn build_improved_counter(spec: &CounterSpec) -> Circuit {
    let mut c = spec.circuit();
    append_improved_counter(&mut c, spec.control, &spec.counting);
    c
}

/// The baseline controlled increment: ascending ripple with an X after each
/// partial flip and w-1 restoring X gates after the final multi-controlled X.
pub fn build_baseline_counter(spec: &CounterSpec) -> Circuit {
    let mut c = spec.circuit();
    let w = spec.width();
    let a = &spec.counting;
    c.push(Gate::cx(spec.control, a[0])).expect("validated counter spec");
    if w == 1 {
        return c;
    }
    c.push(Gate::x(a[0])).expect("validated counter spec");
    for i in 1..w {
        let mut controls = vec![spec.control];
        controls.extend_from_slice(&a[..i]);
        c.push(Gate::mcx(&controls, a[i])).expect("validated counter spec");
        if i < w - 1 {
            c.push(Gate::x(a[i])).expect("validated counter spec");
        }
    }
    for &q in &a[..w - 1] {
        c.push(Gate::x(q)).expect("validated counter spec");
    }
    c
}

/// Readout mapping a checker's counter to its ancilla: X(ancilla), then a
/// controlled-X with every counting qubit as a negative control. Net effect
/// starting from ancilla |0>: ancilla ends |1> iff the counter is nonzero.
pub fn build_checker_readout(counting: &[usize], ancilla: usize) -> Result<Circuit, CounterError> {
    let spec = CounterSpec::new(ancilla, counting.to_vec())?;
    let mut c = spec.circuit();
    c.push(Gate::x(ancilla)).expect("validated readout spec");
    append_checker_readout_mcx(&mut c, counting, ancilla);
    Ok(c)
}

/// Just the negative-controlled MCX of the readout (the ancilla X gates are
/// hoisted to the front of the oracle).
pub(crate) fn append_checker_readout_mcx(c: &mut Circuit, counting: &[usize], ancilla: usize) {
    let controls = counting.iter().map(|&q| (q, Polarity::Negative)).collect();
    c.push(Gate::mcx_polarized(controls, ancilla)).expect("validated readout spec");
}

/// Metric gap between the two counter realizations at a given width.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CounterComparison {
    pub width: usize,
    /// X-gate count, baseline minus improved. Always 2w-2.
    pub x_delta: i64,
    /// Scheduling depth, baseline minus improved. Always w.
    pub depth_delta: i64,
    pub census_baseline: GateCensus,
    pub census_improved: GateCensus,
}

/// Compares baseline and improved counters of width `w` on a canonical spec.
pub fn compare_counters(w: usize) -> Result<CounterComparison, CounterError> {
    if w < 2 {
        return Err(CounterError::WidthTooSmall(w));
    }
    let spec = CounterSpec::new(0, (1..=w).collect())?;
    let baseline = build_baseline_counter(&spec);
    let improved = build_improved_counter(&spec);
    let census_baseline = baseline.gate_census();
    let census_improved = improved.gate_census();
    Ok(CounterComparison {
        width: w,
        x_delta: census_baseline.x as i64 - census_improved.x as i64,
        depth_delta: baseline.depth() as i64 - improved.depth() as i64,
        census_baseline,
        census_improved,
    })
}
