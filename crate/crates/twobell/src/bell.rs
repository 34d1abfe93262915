//! Bell basis states, projective Bell measurement, and the outcome to
//! Pauli-correction lookup used by the receiver.

use std::fmt;
use std::str::FromStr;

use rand::RngCore;
use serde::ser::{Serialize, SerializeSeq, Serializer};

use crate::error::{Error, Result};
use crate::statevector::{Amplitude, QubitLabel, StateVector};

/// Threshold below which an outcome counts as unrealizable.
pub const PROBABILITY_FLOOR: f64 = 1e-12;

/// The four Bell states, in their fixed serialization order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BellLabel {
    PhiPlus = 0,
    PhiMinus = 1,
    PsiPlus = 2,
    PsiMinus = 3,
}

impl BellLabel {
    pub const ALL: [BellLabel; 4] = [
        BellLabel::PhiPlus,
        BellLabel::PhiMinus,
        BellLabel::PsiPlus,
        BellLabel::PsiMinus,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(index: usize) -> Option<Self> {
        Self::ALL.get(index).copied()
    }

    pub fn as_str(self) -> &'static str {
        match self {
            BellLabel::PhiPlus => "phi+",
            BellLabel::PhiMinus => "phi-",
            BellLabel::PsiPlus => "psi+",
            BellLabel::PsiMinus => "psi-",
        }
    }

    /// Amplitudes in the two-qubit computational basis (|00⟩,|01⟩,|10⟩,|11⟩):
    /// Φ± = (|00⟩ ± |11⟩)/√2 and Ψ± = (|01⟩ ± |10⟩)/√2.
    pub fn amplitudes(self) -> [Amplitude; 4] {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let z = Amplitude::new(0.0, 0.0);
        let p = Amplitude::new(s, 0.0);
        let m = Amplitude::new(-s, 0.0);
        match self {
            BellLabel::PhiPlus => [p, z, z, p],
            BellLabel::PhiMinus => [p, z, z, m],
            BellLabel::PsiPlus => [z, p, p, z],
            BellLabel::PsiMinus => [z, p, m, z],
        }
    }
}

impl fmt::Display for BellLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for BellLabel {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "phi+" => Ok(BellLabel::PhiPlus),
            "phi-" => Ok(BellLabel::PhiMinus),
            "psi+" => Ok(BellLabel::PsiPlus),
            "psi-" => Ok(BellLabel::PsiMinus),
            other => Err(format!(
                "unknown Bell label {other:?}, expected one of phi+, phi-, psi+, psi-"
            )),
        }
    }
}

impl Serialize for BellLabel {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(self.as_str())
    }
}

/// The standard Bell state on the pair `(q1, q2)`.
pub fn bell_state(label: BellLabel, q1: QubitLabel, q2: QubitLabel) -> Result<StateVector> {
    if q1 == q2 {
        return Err(Error::DuplicateLabel(q1));
    }
    StateVector::from_amplitudes(vec![q1, q2], label.amplitudes().to_vec())
}

/// Joint result of the sender's two Bell measurements: `first` on the
/// pair (a, A1), `second` on (c, A2).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct BellOutcome {
    pub first: BellLabel,
    pub second: BellLabel,
}

impl BellOutcome {
    pub fn new(first: BellLabel, second: BellLabel) -> Self {
        Self { first, second }
    }

    /// Index in the fixed enumeration order, `first` major.
    pub fn index(self) -> usize {
        self.first.index() * 4 + self.second.index()
    }

    pub fn from_index(index: usize) -> Option<Self> {
        if index < 16 {
            Some(Self {
                first: BellLabel::from_index(index / 4)?,
                second: BellLabel::from_index(index % 4)?,
            })
        } else {
            None
        }
    }

    /// All 16 outcomes in index order.
    pub fn all() -> impl Iterator<Item = BellOutcome> {
        (0..16).map(|i| BellOutcome::from_index(i).unwrap())
    }
}

impl fmt::Display for BellOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.first, self.second)
    }
}

impl FromStr for BellOutcome {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let (first, second) = s
            .split_once(':')
            .ok_or_else(|| format!("expected <bell>:<bell>, got {s:?}"))?;
        Ok(Self {
            first: first.parse()?,
            second: second.parse()?,
        })
    }
}

impl Serialize for BellOutcome {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(2))?;
        seq.serialize_element(self.first.as_str())?;
        seq.serialize_element(self.second.as_str())?;
        seq.end()
    }
}

/// Single-qubit correction operator. `IY` is i·Y with the phase kept in
/// the matrix, as the decomposition checks require it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CorrectionOp {
    I,
    Z,
    X,
    IY,
}

impl CorrectionOp {
    pub fn as_str(self) -> &'static str {
        match self {
            CorrectionOp::I => "I",
            CorrectionOp::Z => "Z",
            CorrectionOp::X => "X",
            CorrectionOp::IY => "iY",
        }
    }

    pub fn matrix(self) -> [[Amplitude; 2]; 2] {
        let o = Amplitude::new(1.0, 0.0);
        let z = Amplitude::new(0.0, 0.0);
        match self {
            CorrectionOp::I => [[o, z], [z, o]],
            CorrectionOp::Z => [[o, z], [z, -o]],
            CorrectionOp::X => [[z, o], [o, z]],
            // i·Y = [[0, 1], [-1, 0]]
            CorrectionOp::IY => [[z, o], [-o, z]],
        }
    }

    /// Product in the Pauli group modulo global phase ({I, Z, X, iY} is
    /// closed under this).
    pub fn compose_mod_phase(self, other: CorrectionOp) -> CorrectionOp {
        use CorrectionOp::*;
        match (self, other) {
            (I, p) | (p, I) => p,
            (Z, Z) | (X, X) | (IY, IY) => I,
            (Z, X) | (X, Z) => IY,
            (Z, IY) | (IY, Z) => X,
            (X, IY) | (IY, X) => Z,
        }
    }

    fn next_cyclic(self) -> CorrectionOp {
        use CorrectionOp::*;
        match self {
            I => Z,
            Z => X,
            X => IY,
            IY => I,
        }
    }
}

impl fmt::Display for CorrectionOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl Serialize for CorrectionOp {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(self.as_str())
    }
}

/// The receiver's correction pair, one operator per held qubit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PauliCorrection {
    pub on_b1: CorrectionOp,
    pub on_b2: CorrectionOp,
}

impl fmt::Display for PauliCorrection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.on_b1, self.on_b2)
    }
}

impl Serialize for PauliCorrection {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(2))?;
        seq.serialize_element(self.on_b1.as_str())?;
        seq.serialize_element(self.on_b2.as_str())?;
        seq.end()
    }
}

fn pauli_for(label: BellLabel) -> CorrectionOp {
    match label {
        BellLabel::PhiPlus => CorrectionOp::I,
        BellLabel::PhiMinus => CorrectionOp::Z,
        BellLabel::PsiPlus => CorrectionOp::X,
        BellLabel::PsiMinus => CorrectionOp::IY,
    }
}

/// Correction recovering the teleported pair over the Φ+⊗Φ+ channel:
/// per measured pair, Φ+ ↦ I, Φ− ↦ Z, Ψ+ ↦ X, Ψ− ↦ iY.
pub fn correction_for(outcome: BellOutcome) -> PauliCorrection {
    PauliCorrection {
        on_b1: pauli_for(outcome.first),
        on_b2: pauli_for(outcome.second),
    }
}

/// Correction for an arbitrary Bell-pair channel. Each channel state is
/// (I⊗V)Φ+ for a Pauli V, so the receiver composes the standard
/// correction with V (modulo an irrelevant global phase).
pub fn correction_for_channel(
    outcome: BellOutcome,
    channel: (BellLabel, BellLabel),
) -> PauliCorrection {
    PauliCorrection {
        on_b1: pauli_for(outcome.first).compose_mod_phase(pauli_for(channel.0)),
        on_b2: pauli_for(outcome.second).compose_mod_phase(pauli_for(channel.1)),
    }
}

/// Full 16-entry outcome→correction table, indexed by [`BellOutcome::index`].
/// Kept as a value so verification can inject corrupted copies.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CorrectionTable {
    entries: [PauliCorrection; 16],
}

impl CorrectionTable {
    /// The table for the Φ+⊗Φ+ channel.
    pub fn canonical() -> Self {
        Self::for_channel((BellLabel::PhiPlus, BellLabel::PhiPlus))
    }

    pub fn for_channel(channel: (BellLabel, BellLabel)) -> Self {
        let mut entries = [PauliCorrection {
            on_b1: CorrectionOp::I,
            on_b2: CorrectionOp::I,
        }; 16];
        for outcome in BellOutcome::all() {
            entries[outcome.index()] = correction_for_channel(outcome, channel);
        }
        Self { entries }
    }

    pub fn lookup(&self, outcome: BellOutcome) -> PauliCorrection {
        self.entries[outcome.index()]
    }

    /// Copy with one branch's first operator cycled to a wrong value;
    /// used by mutation tests and the `--corrupt-branch` hook.
    pub fn corrupted(&self, branch: usize) -> Self {
        let mut entries = self.entries;
        entries[branch % 16].on_b1 = entries[branch % 16].on_b1.next_cyclic();
        Self { entries }
    }

    /// Copy with one branch replaced outright.
    pub fn with_entry(&self, branch: usize, correction: PauliCorrection) -> Self {
        let mut entries = self.entries;
        entries[branch % 16] = correction;
        Self { entries }
    }
}

impl Default for CorrectionTable {
    fn default() -> Self {
        Self::canonical()
    }
}

/// How a Bell measurement picks its branch.
pub enum MeasureMode<'a> {
    /// Sample by the Born rule from the caller's generator.
    Random(&'a mut dyn RngCore),
    /// Collapse onto the given outcome (its true probability is recorded);
    /// an outcome with probability below [`PROBABILITY_FLOOR`] is an error.
    Forced(BellLabel),
}

/// Result of one projective Bell measurement. The measured pair leaves
/// the register: `state` holds only the surviving qubits.
#[derive(Clone, Debug)]
pub struct BellMeasurement {
    pub outcome: BellLabel,
    pub probability: f64,
    pub state: StateVector,
}

/// Born probabilities of the four Bell outcomes on `(q1, q2)`.
pub fn bell_outcome_probabilities(
    state: &StateVector,
    q1: &QubitLabel,
    q2: &QubitLabel,
) -> Result<[f64; 4]> {
    let projections = project_all(state, q1, q2)?;
    let mut probs = [0.0f64; 4];
    for (k, (_, amps)) in projections.iter().enumerate() {
        probs[k] = amps.iter().map(|a| a.norm_sqr()).sum();
    }
    Ok(probs)
}

/// Project the pair `(q1, q2)` onto a Bell state, renormalize, and drop
/// the measured qubits from the register.
pub fn bell_measure(
    state: &StateVector,
    q1: &QubitLabel,
    q2: &QubitLabel,
    mode: MeasureMode<'_>,
) -> Result<BellMeasurement> {
    let projections = project_all(state, q1, q2)?;
    let probs: Vec<f64> = projections
        .iter()
        .map(|(_, amps)| amps.iter().map(|a| a.norm_sqr()).sum())
        .collect();

    let chosen = match mode {
        MeasureMode::Forced(label) => {
            if probs[label.index()] <= PROBABILITY_FLOOR {
                return Err(Error::ZeroProbabilityOutcome {
                    outcome: label,
                    probability: probs[label.index()],
                });
            }
            label.index()
        }
        MeasureMode::Random(rng) => {
            let u = uniform_f64(rng);
            let mut acc = 0.0;
            let mut picked = None;
            for (k, &p) in probs.iter().enumerate() {
                acc += p;
                if u < acc {
                    picked = Some(k);
                    break;
                }
            }
            // Float residue can leave u >= acc; fall back to the last
            // outcome with nonzero probability.
            picked.unwrap_or_else(|| {
                probs
                    .iter()
                    .rposition(|&p| p > PROBABILITY_FLOOR)
                    .expect("probabilities sum to 1")
            })
        }
    };

    let (remaining, amps) = &projections[chosen];
    let p = probs[chosen];
    let scale = 1.0 / p.sqrt();
    let normalized: Vec<Amplitude> = amps.iter().map(|a| a * scale).collect();
    Ok(BellMeasurement {
        outcome: BellLabel::from_index(chosen).unwrap(),
        probability: p,
        state: StateVector::from_amplitudes(remaining.clone(), normalized)?,
    })
}

/// Apply the two correction operators to the receiver's qubits.
pub fn apply_correction(
    state: &StateVector,
    correction: &PauliCorrection,
    b1: &QubitLabel,
    b2: &QubitLabel,
) -> Result<StateVector> {
    let step1 = state.apply_single_qubit_matrix(b1, correction.on_b1.matrix())?;
    step1.apply_single_qubit_matrix(b2, correction.on_b2.matrix())
}

/// Unnormalized post-projection amplitudes for all four Bell outcomes.
/// Each entry pairs the surviving label order with the partial inner
/// product ⟨bell|state⟩ over `(q1, q2)`.
#[allow(clippy::type_complexity)]
fn project_all(
    state: &StateVector,
    q1: &QubitLabel,
    q2: &QubitLabel,
) -> Result<Vec<(Vec<QubitLabel>, Vec<Amplitude>)>> {
    if q1 == q2 {
        return Err(Error::DuplicateOperands(q1.clone()));
    }
    let n = state.num_qubits();
    let labels = state.labels();
    let p1 = labels
        .iter()
        .position(|l| l == q1)
        .ok_or_else(|| Error::UnknownLabel(q1.clone()))?;
    let p2 = labels
        .iter()
        .position(|l| l == q2)
        .ok_or_else(|| Error::UnknownLabel(q2.clone()))?;
    let b1 = n - 1 - p1;
    let b2 = n - 1 - p2;

    let remaining: Vec<QubitLabel> = labels
        .iter()
        .enumerate()
        .filter(|(p, _)| *p != p1 && *p != p2)
        .map(|(_, l)| l.clone())
        .collect();
    let rest_dim = 1usize << remaining.len();

    let mut out: Vec<(Vec<QubitLabel>, Vec<Amplitude>)> = BellLabel::ALL
        .iter()
        .map(|_| (remaining.clone(), vec![Amplitude::new(0.0, 0.0); rest_dim]))
        .collect();
    let bells: Vec<[Amplitude; 4]> = BellLabel::ALL.iter().map(|l| l.amplitudes()).collect();

    for (i, &amp) in state.amplitudes().iter().enumerate() {
        let v1 = (i >> b1) & 1;
        let v2 = (i >> b2) & 1;
        // Compress the surviving bits, preserving label order.
        let mut r = 0usize;
        for p in 0..n {
            if p == p1 || p == p2 {
                continue;
            }
            r = (r << 1) | ((i >> (n - 1 - p)) & 1);
        }
        let pair_index = v1 * 2 + v2;
        for (k, bell) in bells.iter().enumerate() {
            let coeff = bell[pair_index].conj();
            if coeff.norm_sqr() > 0.0 {
                out[k].1[r] += coeff * amp;
            }
        }
    }
    Ok(out)
}

fn uniform_f64(rng: &mut dyn RngCore) -> f64 {
    // 53 random mantissa bits, uniform on [0, 1).
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}
