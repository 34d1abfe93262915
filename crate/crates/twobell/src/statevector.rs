//! Dense statevector simulation over labeled qubits.
//!
//! A [`StateVector`] stores all 2^n complex amplitudes of an n-qubit pure
//! state together with an ordered list of qubit labels. The first label is
//! the most significant bit of the basis index, so a ket string reads
//! left-to-right in label order: on the register `(a, b)` the basis state
//! `|10⟩` sits at index 2.
//!
//! Operations never mutate their input; they return a new state (gates
//! clone once and update amplitudes in place via index-pair strides).

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use serde::ser::{Serialize, SerializeSeq, SerializeStruct, Serializer};

use crate::error::{Error, Result};

/// Complex amplitude of a basis state.
pub type Amplitude = Complex64;

/// Hard cap on register size; a dense state above this is a caller bug.
pub const MAX_QUBITS: usize = 16;

/// Tolerance on state normalization and gate unitarity.
pub const NORM_TOL: f64 = 1e-12;

/// Tolerance on factorization and fidelity assertions.
pub const FACTOR_TOL: f64 = 1e-10;

/// Symbolic name of one qubit, unique within a register.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct QubitLabel(String);

impl QubitLabel {
    pub fn new(name: impl Into<String>) -> Self {
        Self(name.into())
    }

    pub fn name(&self) -> &str {
        &self.0
    }
}

impl From<&str> for QubitLabel {
    fn from(name: &str) -> Self {
        Self(name.to_owned())
    }
}

impl From<String> for QubitLabel {
    fn from(name: String) -> Self {
        Self(name)
    }
}

impl fmt::Display for QubitLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl Serialize for QubitLabel {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.0)
    }
}

/// Gate alphabet of the simulator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GateKind {
    Cnot,
    Swap,
    H,
    X,
    Y,
    Z,
    I,
}

impl GateKind {
    pub fn as_str(self) -> &'static str {
        match self {
            GateKind::Cnot => "CNOT",
            GateKind::Swap => "SWAP",
            GateKind::H => "H",
            GateKind::X => "X",
            GateKind::Y => "Y",
            GateKind::Z => "Z",
            GateKind::I => "I",
        }
    }

    fn operand_count(self) -> usize {
        match self {
            GateKind::Cnot | GateKind::Swap => 2,
            _ => 1,
        }
    }
}

impl fmt::Display for GateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One gate together with the labels it acts on.
///
/// For [`GateKind::Cnot`] the first operand is the control and the second
/// the target.
#[derive(Clone, Debug, PartialEq)]
pub struct GateOp {
    kind: GateKind,
    operands: Vec<QubitLabel>,
}

impl GateOp {
    pub fn cnot(control: impl Into<QubitLabel>, target: impl Into<QubitLabel>) -> Self {
        Self {
            kind: GateKind::Cnot,
            operands: vec![control.into(), target.into()],
        }
    }

    pub fn swap(q1: impl Into<QubitLabel>, q2: impl Into<QubitLabel>) -> Self {
        Self {
            kind: GateKind::Swap,
            operands: vec![q1.into(), q2.into()],
        }
    }

    pub fn h(q: impl Into<QubitLabel>) -> Self {
        Self::single(GateKind::H, q)
    }

    pub fn x(q: impl Into<QubitLabel>) -> Self {
        Self::single(GateKind::X, q)
    }

    pub fn y(q: impl Into<QubitLabel>) -> Self {
        Self::single(GateKind::Y, q)
    }

    pub fn z(q: impl Into<QubitLabel>) -> Self {
        Self::single(GateKind::Z, q)
    }

    pub fn identity(q: impl Into<QubitLabel>) -> Self {
        Self::single(GateKind::I, q)
    }

    fn single(kind: GateKind, q: impl Into<QubitLabel>) -> Self {
        Self {
            kind,
            operands: vec![q.into()],
        }
    }

    pub fn kind(&self) -> GateKind {
        self.kind
    }

    pub fn operands(&self) -> &[QubitLabel] {
        &self.operands
    }

    /// Same gate with every operand renamed through `map`.
    pub fn relabeled(&self, map: impl Fn(&QubitLabel) -> QubitLabel) -> Self {
        Self {
            kind: self.kind,
            operands: self.operands.iter().map(map).collect(),
        }
    }
}

impl fmt::Display for GateOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            GateKind::Cnot => write!(f, "CNOT {}->{}", self.operands[0], self.operands[1]),
            GateKind::Swap => write!(f, "SWAP {},{}", self.operands[0], self.operands[1]),
            _ => write!(f, "{} {}", self.kind, self.operands[0]),
        }
    }
}

/// Ordered gate list; the first element acts first (circuit-diagram order).
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Circuit {
    ops: Vec<GateOp>,
}

impl Circuit {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_ops(ops: Vec<GateOp>) -> Self {
        Self { ops }
    }

    pub fn push(&mut self, op: GateOp) {
        self.ops.push(op);
    }

    pub fn ops(&self) -> &[GateOp] {
        &self.ops
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    /// Concatenation: `self` runs first, then `other`.
    pub fn then(mut self, other: Circuit) -> Circuit {
        self.ops.extend(other.ops);
        self
    }

    /// Inverse circuit. Every gate in the alphabet is its own inverse, so
    /// reversing the gate order suffices.
    pub fn inverted(&self) -> Circuit {
        Circuit {
            ops: self.ops.iter().rev().cloned().collect(),
        }
    }

    /// Same circuit with every operand renamed through `map`.
    pub fn relabeled(&self, map: impl Fn(&QubitLabel) -> QubitLabel) -> Circuit {
        Circuit {
            ops: self.ops.iter().map(|op| op.relabeled(&map)).collect(),
        }
    }

    /// Number of gates of each kind, e.g. for resource accounting.
    pub fn gate_counts(&self) -> BTreeMap<GateKind, u32> {
        let mut counts = BTreeMap::new();
        for op in &self.ops {
            *counts.entry(op.kind).or_insert(0) += 1;
        }
        counts
    }
}

/// Dense pure state over an ordered, labeled qubit register.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    labels: Vec<QubitLabel>,
    amps: Vec<Amplitude>,
}

impl StateVector {
    /// Build the computational basis state described by `bits`, one
    /// character per label ('0' or '1'), read in label order.
    pub fn basis_state(labels: &[QubitLabel], bits: &str) -> Result<Self> {
        let chars: Vec<char> = bits.chars().collect();
        if chars.len() != labels.len() {
            return Err(Error::BitstringLength {
                expected: labels.len(),
                got: chars.len(),
            });
        }
        check_register(labels)?;
        let mut index = 0usize;
        for ch in chars {
            index <<= 1;
            match ch {
                '0' => {}
                '1' => index |= 1,
                other => return Err(Error::BitstringChar(other)),
            }
        }
        let mut amps = vec![Amplitude::new(0.0, 0.0); 1 << labels.len()];
        amps[index] = Amplitude::new(1.0, 0.0);
        Ok(Self {
            labels: labels.to_vec(),
            amps,
        })
    }

    /// Build a state from explicit amplitudes in index order. The vector
    /// must be finite, of length 2^n, and normalized within [`NORM_TOL`].
    pub fn from_amplitudes(labels: Vec<QubitLabel>, amps: Vec<Amplitude>) -> Result<Self> {
        check_register(&labels)?;
        if amps.len() != 1 << labels.len() {
            return Err(Error::AmplitudeLength {
                got: amps.len(),
                qubits: labels.len(),
            });
        }
        if amps.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
            return Err(Error::NonFiniteAmplitude);
        }
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized { norm });
        }
        Ok(Self { labels, amps })
    }

    pub fn num_qubits(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[QubitLabel] {
        &self.labels
    }

    pub fn amplitudes(&self) -> &[Amplitude] {
        &self.amps
    }

    pub fn amplitude(&self, index: usize) -> Amplitude {
        self.amps[index]
    }

    /// Rename the register without touching amplitudes.
    pub fn with_labels(&self, labels: Vec<QubitLabel>) -> Result<Self> {
        if labels.len() != self.labels.len() {
            return Err(Error::RegisterSize {
                got: labels.len(),
                max: MAX_QUBITS,
            });
        }
        check_register(&labels)?;
        Ok(Self {
            labels,
            amps: self.amps.clone(),
        })
    }

    fn position_of(&self, label: &QubitLabel) -> Result<usize> {
        self.labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| Error::UnknownLabel(label.clone()))
    }

    /// Bit index (from the least significant end) addressed by `label`.
    /// `labels[0]` is the most significant bit.
    fn bit_of(&self, label: &QubitLabel) -> Result<usize> {
        Ok(self.labels.len() - 1 - self.position_of(label)?)
    }

    /// Apply one gate, returning the new state.
    pub fn apply_gate(&self, op: &GateOp) -> Result<Self> {
        let mut out = self.clone();
        out.apply_gate_in_place(op)?;
        Ok(out)
    }

    /// Apply gates in list order, first element first.
    pub fn apply_circuit(&self, circuit: &Circuit) -> Result<Self> {
        let mut out = self.clone();
        for op in circuit.ops() {
            out.apply_gate_in_place(op)?;
        }
        Ok(out)
    }

    fn apply_gate_in_place(&mut self, op: &GateOp) -> Result<()> {
        let expected = op.kind().operand_count();
        if op.operands().len() != expected {
            return Err(Error::OperandCount {
                kind: op.kind().as_str(),
                expected,
                got: op.operands().len(),
            });
        }
        if expected == 2 && op.operands()[0] == op.operands()[1] {
            return Err(Error::DuplicateOperands(op.operands()[0].clone()));
        }
        match op.kind() {
            GateKind::Cnot => {
                let control = self.bit_of(&op.operands()[0])?;
                let target = self.bit_of(&op.operands()[1])?;
                let cmask = 1usize << control;
                let tmask = 1usize << target;
                for i in 0..self.amps.len() {
                    if i & cmask != 0 && i & tmask == 0 {
                        self.amps.swap(i, i | tmask);
                    }
                }
            }
            GateKind::Swap => {
                let b1 = self.bit_of(&op.operands()[0])?;
                let b2 = self.bit_of(&op.operands()[1])?;
                let m1 = 1usize << b1;
                let m2 = 1usize << b2;
                for i in 0..self.amps.len() {
                    if i & m1 != 0 && i & m2 == 0 {
                        self.amps.swap(i, i ^ (m1 | m2));
                    }
                }
            }
            GateKind::H => {
                let mask = 1usize << self.bit_of(&op.operands()[0])?;
                let s = std::f64::consts::FRAC_1_SQRT_2;
                for i in 0..self.amps.len() {
                    if i & mask == 0 {
                        let j = i | mask;
                        let a0 = self.amps[i];
                        let a1 = self.amps[j];
                        self.amps[i] = (a0 + a1) * s;
                        self.amps[j] = (a0 - a1) * s;
                    }
                }
            }
            GateKind::X => {
                let mask = 1usize << self.bit_of(&op.operands()[0])?;
                for i in 0..self.amps.len() {
                    if i & mask == 0 {
                        self.amps.swap(i, i | mask);
                    }
                }
            }
            GateKind::Y => {
                let mask = 1usize << self.bit_of(&op.operands()[0])?;
                let phase = Amplitude::new(0.0, 1.0);
                for i in 0..self.amps.len() {
                    if i & mask == 0 {
                        let j = i | mask;
                        let a0 = self.amps[i];
                        let a1 = self.amps[j];
                        self.amps[i] = -phase * a1;
                        self.amps[j] = phase * a0;
                    }
                }
            }
            GateKind::Z => {
                let mask = 1usize << self.bit_of(&op.operands()[0])?;
                for i in 0..self.amps.len() {
                    if i & mask != 0 {
                        self.amps[i] = -self.amps[i];
                    }
                }
            }
            GateKind::I => {
                self.bit_of(&op.operands()[0])?;
            }
        }
        Ok(())
    }

    /// Apply an arbitrary 2x2 matrix to one qubit. Used for the correction
    /// operators (iY is not in the gate alphabet); not part of the public
    /// gate surface.
    pub(crate) fn apply_single_qubit_matrix(
        &self,
        label: &QubitLabel,
        m: [[Amplitude; 2]; 2],
    ) -> Result<Self> {
        let mask = 1usize << self.bit_of(label)?;
        let mut out = self.clone();
        for i in 0..out.amps.len() {
            if i & mask == 0 {
                let j = i | mask;
                let a0 = out.amps[i];
                let a1 = out.amps[j];
                out.amps[i] = m[0][0] * a0 + m[0][1] * a1;
                out.amps[j] = m[1][0] * a0 + m[1][1] * a1;
            }
        }
        Ok(out)
    }

    /// Kronecker product; labels concatenate, `self` first (most
    /// significant).
    pub fn tensor(&self, other: &StateVector) -> Result<Self> {
        for label in &other.labels {
            if self.labels.contains(label) {
                return Err(Error::OverlappingLabels(label.clone()));
            }
        }
        let total = self.labels.len() + other.labels.len();
        if total > MAX_QUBITS {
            return Err(Error::RegisterSize {
                got: total,
                max: MAX_QUBITS,
            });
        }
        let mut labels = self.labels.clone();
        labels.extend(other.labels.iter().cloned());
        let dim2 = other.amps.len();
        let mut amps = vec![Amplitude::new(0.0, 0.0); self.amps.len() * dim2];
        for (i, &a) in self.amps.iter().enumerate() {
            for (j, &b) in other.amps.iter().enumerate() {
                amps[i * dim2 + j] = a * b;
            }
        }
        Ok(Self { labels, amps })
    }

    /// Reindex amplitudes so the register reads in `new_order`; the
    /// physical state is unchanged.
    pub fn permute_to(&self, new_order: &[QubitLabel]) -> Result<Self> {
        if new_order.len() != self.labels.len() {
            return Err(Error::NotAPermutation);
        }
        check_register(new_order).map_err(|_| Error::NotAPermutation)?;
        let n = self.labels.len();
        // new_bit[p] = bit position (lsb-based) in the old indexing of the
        // qubit that lands at position p of the new order.
        let mut old_bit_for_new = vec![0usize; n];
        for (p_new, label) in new_order.iter().enumerate() {
            let p_old = self
                .labels
                .iter()
                .position(|l| l == label)
                .ok_or(Error::NotAPermutation)?;
            old_bit_for_new[p_new] = n - 1 - p_old;
        }
        let mut amps = vec![Amplitude::new(0.0, 0.0); self.amps.len()];
        for (i, &a) in self.amps.iter().enumerate() {
            let mut j = 0usize;
            for (p_new, &old_bit) in old_bit_for_new.iter().enumerate() {
                if i & (1 << old_bit) != 0 {
                    j |= 1 << (n - 1 - p_new);
                }
            }
            amps[j] = a;
        }
        Ok(Self {
            labels: new_order.to_vec(),
            amps,
        })
    }

    /// Squared overlap |⟨self|other⟩|², insensitive to global phase.
    /// The states must share one label set; `other` is permuted into
    /// `self`'s label order before the inner product.
    pub fn fidelity(&self, other: &StateVector) -> Result<f64> {
        if self.labels.len() != other.labels.len()
            || !self.labels.iter().all(|l| other.labels.contains(l))
        {
            return Err(Error::LabelSetMismatch);
        }
        let aligned = other.permute_to(&self.labels)?;
        let overlap: Amplitude = self
            .amps
            .iter()
            .zip(aligned.amps.iter())
            .map(|(a, b)| a.conj() * b)
            .sum();
        Ok(overlap.norm_sqr())
    }

    /// Test whether the state factors as (state on `part`) ⊗ (state on the
    /// rest) within [`FACTOR_TOL`], returning both normalized factors when
    /// it does. Factor labels keep their order from the register; the
    /// complement factor's largest amplitude is made real and positive, so
    /// an exact `ψ ⊗ |0..0⟩` input returns ψ's amplitudes unchanged.
    pub fn product_check(&self, part: &[QubitLabel]) -> Result<ProductCheck> {
        let part_labels: Vec<QubitLabel> = self
            .labels
            .iter()
            .filter(|l| part.contains(l))
            .cloned()
            .collect();
        let mut seen = part_labels.clone();
        seen.sort();
        seen.dedup();
        if part_labels.is_empty()
            || part_labels.len() == self.labels.len()
            || seen.len() != part.len()
        {
            return Err(Error::InvalidSubset);
        }
        let rest_labels: Vec<QubitLabel> = self
            .labels
            .iter()
            .filter(|l| !part.contains(l))
            .cloned()
            .collect();

        let mut order = part_labels.clone();
        order.extend(rest_labels.iter().cloned());
        let arranged = self.permute_to(&order)?;

        let rows = 1usize << part_labels.len();
        let cols = 1usize << rest_labels.len();
        let at = |i: usize, j: usize| arranged.amps[i * cols + j];

        // Dominant column of the (part x rest) amplitude matrix.
        let j_star = (0..cols)
            .max_by(|&j1, &j2| {
                let n1: f64 = (0..rows).map(|i| at(i, j1).norm_sqr()).sum();
                let n2: f64 = (0..rows).map(|i| at(i, j2).norm_sqr()).sum();
                n1.total_cmp(&n2)
            })
            .expect("cols >= 1");
        let f_raw: Vec<Amplitude> = (0..rows).map(|i| at(i, j_star)).collect();
        let f_norm = f_raw.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        let factor: Vec<Amplitude> = f_raw.iter().map(|a| a / f_norm).collect();

        let i_star = (0..rows)
            .max_by(|&i1, &i2| factor[i1].norm_sqr().total_cmp(&factor[i2].norm_sqr()))
            .expect("rows >= 1");
        let pivot = factor[i_star];
        let complement: Vec<Amplitude> = (0..cols).map(|j| at(i_star, j) / pivot).collect();

        // Gauge: phase of the complement's dominant entry moves onto the
        // part factor, leaving that entry real positive.
        let k_star = (0..cols)
            .max_by(|&j1, &j2| {
                complement[j1]
                    .norm_sqr()
                    .total_cmp(&complement[j2].norm_sqr())
            })
            .expect("cols >= 1");
        let phase = complement[k_star] / complement[k_star].norm();
        let factor: Vec<Amplitude> = factor.iter().map(|a| a * phase).collect();
        let complement: Vec<Amplitude> = complement.iter().map(|a| a * phase.conj()).collect();

        let mut max_deviation = 0.0f64;
        for (i, f) in factor.iter().enumerate() {
            for (j, g) in complement.iter().enumerate() {
                let dev = (at(i, j) - f * g).norm();
                max_deviation = max_deviation.max(dev);
            }
        }
        let is_product = max_deviation < FACTOR_TOL;

        if !is_product {
            return Ok(ProductCheck {
                is_product,
                max_deviation,
                factor: None,
                complement: None,
            });
        }

        let renorm = |amps: Vec<Amplitude>| {
            let n = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
            amps.into_iter().map(|a| a / n).collect::<Vec<_>>()
        };
        Ok(ProductCheck {
            is_product,
            max_deviation,
            factor: Some(StateVector::from_amplitudes(part_labels, renorm(factor))?),
            complement: Some(StateVector::from_amplitudes(
                rest_labels,
                renorm(complement),
            )?),
        })
    }
}

/// Outcome of [`StateVector::product_check`].
#[derive(Clone, Debug)]
pub struct ProductCheck {
    pub is_product: bool,
    pub max_deviation: f64,
    /// Normalized factor on the requested subset, when the state factors.
    pub factor: Option<StateVector>,
    /// Normalized factor on the remaining labels, when the state factors.
    pub complement: Option<StateVector>,
}

impl Serialize for StateVector {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        struct Amps<'a>(&'a [Amplitude]);
        impl Serialize for Amps<'_> {
            fn serialize<S: Serializer>(
                &self,
                serializer: S,
            ) -> std::result::Result<S::Ok, S::Error> {
                let mut seq = serializer.serialize_seq(Some(self.0.len()))?;
                for a in self.0 {
                    seq.serialize_element(&[a.re, a.im])?;
                }
                seq.end()
            }
        }
        let mut s = serializer.serialize_struct("StateVector", 2)?;
        s.serialize_field("labels", &self.labels)?;
        s.serialize_field("amplitudes", &Amps(&self.amps))?;
        s.end()
    }
}

fn check_register(labels: &[QubitLabel]) -> Result<()> {
    if labels.is_empty() || labels.len() > MAX_QUBITS {
        return Err(Error::RegisterSize {
            got: labels.len(),
            max: MAX_QUBITS,
        });
    }
    for (i, label) in labels.iter().enumerate() {
        if labels[..i].contains(label) {
            return Err(Error::DuplicateLabel(label.clone()));
        }
    }
    Ok(())
}

/// Convenience constructor for a list of labels.
pub fn labels<const N: usize>(names: [&str; N]) -> Vec<QubitLabel> {
    names.iter().map(|n| QubitLabel::from(*n)).collect()
}
