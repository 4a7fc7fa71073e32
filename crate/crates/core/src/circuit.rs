//! Gate-level circuit representation over the restricted set
//! {H, X, P(theta), controlled X/P with per-control polarity}, plus
//! inversion and the scheduling metrics used to compare counter designs.
//!
//! Negative controls are first-class rather than X-sandwich expansions, so
//! the gate census can distinguish real X gates from polarity annotations.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum CircuitError {
    #[error("qubit {qubit} out of range for a circuit with {num_qubits} qubits")]
    QubitOutOfRange { qubit: usize, num_qubits: usize },
    #[error("control qubits must be distinct and must not include the target ({target})")]
    OverlappingOperands { target: usize },
    #[error("controlled gate needs at least one control")]
    NoControls,
    #[error("phase angle must be finite")]
    NonFiniteAngle,
    #[error("cannot extend a {from}-qubit circuit down to {to} qubits")]
    ExtendShrinks { from: usize, to: usize },
}

/// Whether a control fires on |1> (positive) or |0> (negative).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Polarity {
    Positive,
    Negative,
}

/// The single-qubit operation a controlled gate applies to its target.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ControlledBase {
    X,
    Phase(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Gate {
    H(usize),
    X(usize),
    Phase(usize, f64),
    Controlled { base: ControlledBase, controls: Vec<(usize, Polarity)>, target: usize },
}

impl Gate {
    pub fn h(target: usize) -> Gate {
        Gate::H(target)
    }

    pub fn x(target: usize) -> Gate {
        Gate::X(target)
    }

    pub fn phase(target: usize, angle: f64) -> Gate {
        Gate::Phase(target, angle)
    }

    /// CX with a single positive control.
    pub fn cx(control: usize, target: usize) -> Gate {
        Gate::Controlled {
            base: ControlledBase::X,
            controls: vec![(control, Polarity::Positive)],
            target,
        }
    }

    /// Multi-controlled X, all controls positive.
    pub fn mcx(controls: &[usize], target: usize) -> Gate {
        Gate::Controlled {
            base: ControlledBase::X,
            controls: controls.iter().map(|&q| (q, Polarity::Positive)).collect(),
            target,
        }
    }

    /// Multi-controlled X with explicit per-control polarities.
    pub fn mcx_polarized(controls: Vec<(usize, Polarity)>, target: usize) -> Gate {
        Gate::Controlled { base: ControlledBase::X, controls, target }
    }

    /// Controlled phase with a single positive control.
    pub fn cp(control: usize, target: usize, angle: f64) -> Gate {
        Gate::Controlled {
            base: ControlledBase::Phase(angle),
            controls: vec![(control, Polarity::Positive)],
            target,
        }
    }

    pub fn target(&self) -> usize {
        match *self {
            Gate::H(t) | Gate::X(t) | Gate::Phase(t, _) => t,
            Gate::Controlled { target, .. } => target,
        }
    }

    /// Every qubit the gate touches (controls then target).
    pub fn qubits(&self) -> Vec<usize> {
        match self {
            Gate::H(t) | Gate::X(t) | Gate::Phase(t, _) => vec![*t],
            Gate::Controlled { controls, target, .. } => {
                let mut qs: Vec<usize> = controls.iter().map(|&(q, _)| q).collect();
                qs.push(*target);
                qs
            }
        }
    }

    /// The adjoint gate: H, X and controlled-X are self-adjoint, phases negate.
    pub fn adjoint(&self) -> Gate {
        match self {
            Gate::H(t) => Gate::H(*t),
            Gate::X(t) => Gate::X(*t),
            Gate::Phase(t, a) => Gate::Phase(*t, -a),
            Gate::Controlled { base, controls, target } => Gate::Controlled {
                base: match base {
                    ControlledBase::X => ControlledBase::X,
                    ControlledBase::Phase(a) => ControlledBase::Phase(-a),
                },
                controls: controls.clone(),
                target: *target,
            },
        }
    }

    fn validate(&self, num_qubits: usize) -> Result<(), CircuitError> {
        let check = |qubit: usize| {
            if qubit >= num_qubits {
                Err(CircuitError::QubitOutOfRange { qubit, num_qubits })
            } else {
                Ok(())
            }
        };
        match self {
            Gate::H(t) | Gate::X(t) => check(*t),
            Gate::Phase(t, a) => {
                if !a.is_finite() {
                    return Err(CircuitError::NonFiniteAngle);
                }
                check(*t)
            }
            Gate::Controlled { base, controls, target } => {
                if let ControlledBase::Phase(a) = base {
                    if !a.is_finite() {
                        return Err(CircuitError::NonFiniteAngle);
                    }
                }
                if controls.is_empty() {
                    return Err(CircuitError::NoControls);
                }
                check(*target)?;
                let mut seen = vec![false; num_qubits];
                seen[*target] = true;
                for &(q, _) in controls {
                    check(q)?;
                    if seen[q] {
                        return Err(CircuitError::OverlappingOperands { target: *target });
                    }
                    seen[q] = true;
                }
                Ok(())
            }
        }
    }
}

/// Top-level gate counts. MCX and controlled-phase gates are counted whole
/// (no decomposition), keyed by their control arity.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct GateCensus {
    pub h: usize,
    pub x: usize,
    pub phase: usize,
    /// Single positive- or negative-control X gates.
    pub cx: usize,
    /// Control arity (>= 2) -> count of multi-controlled X gates.
    pub mcx: BTreeMap<usize, usize>,
    /// Control arity (>= 1) -> count of controlled phase gates.
    pub cp: BTreeMap<usize, usize>,
}

impl GateCensus {
    pub fn total(&self) -> usize {
        self.h
            + self.x
            + self.phase
            + self.cx
            + self.mcx.values().sum::<usize>()
            + self.cp.values().sum::<usize>()
    }

    pub fn mcx_with_arity(&self, controls: usize) -> usize {
        self.mcx.get(&controls).copied().unwrap_or(0)
    }
}

/// An ordered gate list over a fixed qubit count.
#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    num_qubits: usize,
    ops: Vec<Gate>,
}

impl Circuit {
    pub fn new(num_qubits: usize) -> Self {
        Circuit { num_qubits, ops: Vec::new() }
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn ops(&self) -> &[Gate] {
        &self.ops
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    /// Appends a gate after validating its operands against this circuit.
    pub fn push(&mut self, gate: Gate) -> Result<(), CircuitError> {
        gate.validate(self.num_qubits)?;
        self.ops.push(gate);
        Ok(())
    }

    /// Appends every gate of `other` in order.
    pub fn append_circuit(&mut self, other: &Circuit) -> Result<(), CircuitError> {
        for g in &other.ops {
            self.push(g.clone())?;
        }
        Ok(())
    }

    /// Same gates on a wider register.
    pub fn extended_to(&self, num_qubits: usize) -> Result<Circuit, CircuitError> {
        if num_qubits < self.num_qubits {
            return Err(CircuitError::ExtendShrinks { from: self.num_qubits, to: num_qubits });
        }
        Ok(Circuit { num_qubits, ops: self.ops.clone() })
    }

    /// The adjoint circuit: gates reversed, each replaced by its adjoint.
    pub fn inverse(&self) -> Circuit {
        Circuit {
            num_qubits: self.num_qubits,
            ops: self.ops.iter().rev().map(Gate::adjoint).collect(),
        }
    }

    /// Layer count under greedy as-soon-as-possible scheduling, where a gate
    /// occupies its target and all control qubits for one layer.
    pub fn depth(&self) -> usize {
        let mut busy = vec![0usize; self.num_qubits];
        let mut depth = 0;
        for g in &self.ops {
            let layer = 1 + g.qubits().into_iter().map(|q| busy[q]).max().unwrap_or(0);
            for q in g.qubits() {
                busy[q] = layer;
            }
            depth = depth.max(layer);
        }
        depth
    }

    pub fn gate_census(&self) -> GateCensus {
        let mut census = GateCensus::default();
        for g in &self.ops {
            match g {
                Gate::H(_) => census.h += 1,
                Gate::X(_) => census.x += 1,
                Gate::Phase(_, _) => census.phase += 1,
                Gate::Controlled { base, controls, .. } => match base {
                    ControlledBase::X if controls.len() == 1 => census.cx += 1,
                    ControlledBase::X => *census.mcx.entry(controls.len()).or_insert(0) += 1,
                    ControlledBase::Phase(_) => *census.cp.entry(controls.len()).or_insert(0) += 1,
                },
            }
        }
        census
    }

    /// Stable line-oriented dump, one gate per line, for golden-file tests.
    pub fn to_text(&self) -> String {
        let mut out = format!("qubits {}\n", self.num_qubits);
        for g in &self.ops {
            out.push_str(&g.to_string());
            out.push('\n');
        }
        out
    }
}

fn write_controls(f: &mut fmt::Formatter<'_>, controls: &[(usize, Polarity)]) -> fmt::Result {
    for (i, (q, pol)) in controls.iter().enumerate() {
        if i > 0 {
            write!(f, ",")?;
        }
        let sign = match pol {
            Polarity::Positive => '+',
            Polarity::Negative => '-',
        };
        write!(f, "{sign}{q}")?;
    }
    Ok(())
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Gate::H(t) => write!(f, "h {t}"),
            Gate::X(t) => write!(f, "x {t}"),
            Gate::Phase(t, a) => write!(f, "p {t} {a}"),
            Gate::Controlled { base, controls, target } => {
                let (one, many) = match base {
                    ControlledBase::X => ("cx", "mcx"),
                    ControlledBase::Phase(_) => ("cp", "mcp"),
                };
                write!(f, "{} ", if controls.len() == 1 { one } else { many })?;
                write_controls(f, controls)?;
                write!(f, " {target}")?;
                if let ControlledBase::Phase(a) = base {
                    write!(f, " {a}")?;
                }
                Ok(())
            }
        }
    }
}
