//! End-to-end pipeline: encode the four-coefficient eight-qubit state,
//! compress it onto two qubits, teleport those over two Bell pairs, and
//! reconstruct on the receiver side.
//!
//! The sender's register is labeled `a..h`; the channel pairs are
//! `(A1, B1)` and `(A2, B2)` with the receiver holding `B1, B2`; the
//! receiver's rebuilt register is `B1, B, B2, D, E, F, G, H`.

use rand::{Rng, RngCore};
use serde::ser::{SerializeSeq, Serializer};
use serde::Serialize;
use std::fmt;
use std::str::FromStr;

use crate::bell::{
    apply_correction, bell_measure, bell_state, BellLabel, BellOutcome, CorrectionTable,
    MeasureMode, PauliCorrection,
};
use crate::error::{Error, Result};
use crate::statevector::{Amplitude, Circuit, GateOp, QubitLabel, StateVector};

/// Auto-normalization window for caller-supplied coefficients.
pub const COEFF_NORM_TOL: f64 = 1e-6;

/// Tolerance for the encoded-family support check.
const SUPPORT_TOL: f64 = 1e-12;

/// Basis indices carrying the four coefficients on the register `a..h`:
/// the bitstrings 00000000, 00100000, 11011111, 11111111.
pub const ENCODED_SUPPORT: [usize; 4] = [0b0000_0000, 0b0010_0000, 0b1101_1111, 0b1111_1111];

/// Sender data register `a..h`.
pub fn data_register() -> Vec<QubitLabel> {
    ["a", "b", "c", "d", "e", "f", "g", "h"]
        .iter()
        .map(|n| QubitLabel::from(*n))
        .collect()
}

/// Receiver register after reconstruction.
pub fn receiver_register() -> Vec<QubitLabel> {
    ["B1", "B", "B2", "D", "E", "F", "G", "H"]
        .iter()
        .map(|n| QubitLabel::from(*n))
        .collect()
}

/// The four unknown amplitudes of the input state. Normalized on
/// construction: inputs within [`COEFF_NORM_TOL`] of unit norm are
/// rescaled exactly, anything else is rejected.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CoefficientSet {
    pub alpha: Amplitude,
    pub beta: Amplitude,
    pub gamma: Amplitude,
    pub delta: Amplitude,
}

impl CoefficientSet {
    pub fn new(
        alpha: Amplitude,
        beta: Amplitude,
        gamma: Amplitude,
        delta: Amplitude,
    ) -> Result<Self> {
        let norm_sqr = alpha.norm_sqr() + beta.norm_sqr() + gamma.norm_sqr() + delta.norm_sqr();
        if norm_sqr == 0.0 || !norm_sqr.is_finite() {
            return Err(Error::ZeroNormCoefficients);
        }
        let norm = norm_sqr.sqrt();
        if (norm - 1.0).abs() > COEFF_NORM_TOL {
            return Err(Error::CoefficientsNotNormalized { norm });
        }
        Ok(Self {
            alpha: alpha / norm,
            beta: beta / norm,
            gamma: gamma / norm,
            delta: delta / norm,
        })
    }

    /// Coefficients from eight reals in (re, im) pairs, as entered on the
    /// command line.
    pub fn from_reals(values: [f64; 8]) -> Result<Self> {
        Self::new(
            Amplitude::new(values[0], values[1]),
            Amplitude::new(values[2], values[3]),
            Amplitude::new(values[4], values[5]),
            Amplitude::new(values[6], values[7]),
        )
    }

    /// The uniform set (1/2, 1/2, 1/2, 1/2).
    pub fn uniform() -> Self {
        let h = Amplitude::new(0.5, 0.0);
        Self {
            alpha: h,
            beta: h,
            gamma: h,
            delta: h,
        }
    }

    /// The k-th computational unit vector, k in 0..4.
    pub fn basis(k: usize) -> Self {
        let mut vals = [Amplitude::new(0.0, 0.0); 4];
        vals[k] = Amplitude::new(1.0, 0.0);
        Self {
            alpha: vals[0],
            beta: vals[1],
            gamma: vals[2],
            delta: vals[3],
        }
    }

    /// Haar-like random coefficients: complex-normal components,
    /// normalized to the unit sphere.
    pub fn random<R: Rng>(rng: &mut R) -> Self {
        use rand_distr::StandardNormal;
        let mut draw = || {
            Amplitude::new(
                rng.sample::<f64, _>(StandardNormal),
                rng.sample::<f64, _>(StandardNormal),
            )
        };
        let raw = [draw(), draw(), draw(), draw()];
        let norm = raw.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        Self {
            alpha: raw[0] / norm,
            beta: raw[1] / norm,
            gamma: raw[2] / norm,
            delta: raw[3] / norm,
        }
    }

    pub fn as_array(&self) -> [Amplitude; 4] {
        [self.alpha, self.beta, self.gamma, self.delta]
    }

    /// The two-qubit carrier state α|00⟩ + β|01⟩ + γ|10⟩ + δ|11⟩ on
    /// `(q1, q2)`.
    pub fn pair_state(&self, q1: QubitLabel, q2: QubitLabel) -> StateVector {
        StateVector::from_amplitudes(vec![q1, q2], self.as_array().to_vec())
            .expect("coefficients are normalized")
    }
}

impl Serialize for CoefficientSet {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(4))?;
        for a in self.as_array() {
            seq.serialize_element(&[a.re, a.im])?;
        }
        seq.end()
    }
}

/// Which stage-two gate list the compression uses.
///
/// `TwoCnot` is the pair of copy gates that provably concentrates the
/// four-qubit intermediate onto `(a, c)`. `PaperLiteral` keeps the
/// published gate string (swap before the copy pair, read right to
/// left) so the audit can demonstrate that it does not factor.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CompressionVariant {
    TwoCnot,
    PaperLiteral,
}

impl CompressionVariant {
    pub fn as_str(self) -> &'static str {
        match self {
            CompressionVariant::TwoCnot => "two-cnot",
            CompressionVariant::PaperLiteral => "paper-literal",
        }
    }
}

impl fmt::Display for CompressionVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CompressionVariant {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "two-cnot" => Ok(CompressionVariant::TwoCnot),
            "paper-literal" => Ok(CompressionVariant::PaperLiteral),
            other => Err(format!(
                "unknown variant {other:?}, expected two-cnot or paper-literal"
            )),
        }
    }
}

impl Serialize for CompressionVariant {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(self.as_str())
    }
}

/// Quantum channel candidates between sender and receiver.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ChannelSpec {
    /// Product of two Bell pairs on (A1, B1) and (A2, B2); the minimal
    /// working channel.
    TwoBellPairs { first: BellLabel, second: BellLabel },
    /// The fixed six-qubit cluster state on qubits 1..6.
    ZhaoCluster,
    /// The six-qubit cluster as written with the input coefficients in
    /// its definition. Not preparable: the coefficients are unknown.
    ZhaoCoefficientDependent,
}

impl ChannelSpec {
    /// Does the channel definition reference the unknown input
    /// coefficients? A constructible channel never does.
    pub fn parameter_dependence(&self) -> bool {
        matches!(self, ChannelSpec::ZhaoCoefficientDependent)
    }
}

/// Prepare the channel state. Takes no coefficient argument by design:
/// a channel that needs one cannot exist, which is exactly the error the
/// coefficient-dependent variant returns.
pub fn build_channel(spec: &ChannelSpec) -> Result<StateVector> {
    match spec {
        ChannelSpec::TwoBellPairs { first, second } => {
            let pair1 = bell_state(*first, QubitLabel::from("A1"), QubitLabel::from("B1"))?;
            let pair2 = bell_state(*second, QubitLabel::from("A2"), QubitLabel::from("B2"))?;
            pair1.tensor(&pair2)
        }
        ChannelSpec::ZhaoCluster => {
            let labels: Vec<QubitLabel> = ["1", "2", "3", "4", "5", "6"]
                .iter()
                .map(|n| QubitLabel::from(*n))
                .collect();
            let mut amps = vec![Amplitude::new(0.0, 0.0); 64];
            // 1/2 (|000000⟩ + |001001⟩ + |110110⟩ + |111111⟩)
            for index in [0b000000, 0b001001, 0b110110, 0b111111] {
                amps[index] = Amplitude::new(0.5, 0.0);
            }
            StateVector::from_amplitudes(labels, amps)
        }
        ChannelSpec::ZhaoCoefficientDependent => Err(Error::ChannelNotConstructible {
            reason: "the coefficients α, β, γ, δ of the state to be teleported are unknown, \
                     so a channel defined in terms of them cannot be prepared"
                .to_owned(),
        }),
    }
}

/// The eight-qubit input state
/// α|00000000⟩ + β|00100000⟩ + γ|11011111⟩ + δ|11111111⟩ on `a..h`.
pub fn encode_input(c: &CoefficientSet) -> StateVector {
    let mut amps = vec![Amplitude::new(0.0, 0.0); 256];
    for (index, value) in ENCODED_SUPPORT.iter().zip(c.as_array()) {
        amps[*index] = value;
    }
    StateVector::from_amplitudes(data_register(), amps).expect("coefficients are normalized")
}

/// The four-qubit intermediate α|0000⟩ + β|0010⟩ + γ|1101⟩ + δ|1111⟩ on
/// `(a, b, c, d)` that stage one concentrates the input onto.
pub fn four_qubit_intermediate(c: &CoefficientSet) -> StateVector {
    let labels: Vec<QubitLabel> = ["a", "b", "c", "d"]
        .iter()
        .map(|n| QubitLabel::from(*n))
        .collect();
    let mut amps = vec![Amplitude::new(0.0, 0.0); 16];
    for (index, value) in [0b0000, 0b0010, 0b1101, 0b1111].iter().zip(c.as_array()) {
        amps[*index] = value;
    }
    StateVector::from_amplitudes(labels, amps).expect("coefficients are normalized")
}

/// Stage one: four copy gates from `a` onto `e, f, g, h`. In every term
/// of the encoded family those four bits equal `a`'s bit, so this clears
/// them to |0000⟩.
pub fn compression_stage_one() -> Circuit {
    Circuit::from_ops(vec![
        GateOp::cnot("a", "e"),
        GateOp::cnot("a", "f"),
        GateOp::cnot("a", "g"),
        GateOp::cnot("a", "h"),
    ])
}

/// Stage two in circuit-diagram order (first gate acts first).
pub fn compression_stage_two(variant: CompressionVariant) -> Circuit {
    match variant {
        CompressionVariant::TwoCnot => {
            Circuit::from_ops(vec![GateOp::cnot("a", "b"), GateOp::cnot("a", "d")])
        }
        // The published operator product read rightmost-first, converted
        // to diagram order: swap first, then the two copy gates.
        CompressionVariant::PaperLiteral => Circuit::from_ops(vec![
            GateOp::swap("b", "c"),
            GateOp::cnot("a", "b"),
            GateOp::cnot("a", "d"),
        ]),
    }
}

/// Full sender-side compression circuit.
pub fn compression_circuit(variant: CompressionVariant) -> Circuit {
    compression_stage_one().then(compression_stage_two(variant))
}

/// Output of [`compress`]: the two-qubit carrier on `(a, c)` and the
/// residual register left in |000000⟩.
#[derive(Clone, Debug)]
pub struct CompressOutput {
    pub pair: StateVector,
    pub residual: StateVector,
}

/// Run the compression circuit and split off the carrier pair.
///
/// The input must be in the encoded family (support only on
/// [`ENCODED_SUPPORT`]). Fails with [`Error::FactorizationFailed`] when
/// the circuit variant does not actually concentrate the state.
pub fn compress(state8: &StateVector, variant: CompressionVariant) -> Result<CompressOutput> {
    let arranged = state8.permute_to(&data_register())?;
    for (index, amp) in arranged.amplitudes().iter().enumerate() {
        if !ENCODED_SUPPORT.contains(&index) && amp.norm() > SUPPORT_TOL {
            return Err(Error::OutsideEncodedFamily);
        }
    }
    let compressed = arranged.apply_circuit(&compression_circuit(variant))?;
    let check = compressed.product_check(&[QubitLabel::from("a"), QubitLabel::from("c")])?;
    if !check.is_product {
        return Err(Error::FactorizationFailed {
            max_deviation: check.max_deviation,
        });
    }
    Ok(CompressOutput {
        pair: check.factor.expect("factor present when product"),
        residual: check.complement.expect("complement present when product"),
    })
}

/// Branch selection for a teleportation run.
pub enum TeleportMode<'a> {
    /// Born-rule sampling from the caller's seeded generator.
    Random(&'a mut dyn RngCore),
    /// Force both Bell measurements onto the given joint outcome.
    Forced(BellOutcome),
}

/// One teleportation of the carrier pair.
#[derive(Clone, Debug)]
pub struct TeleportResult {
    /// Receiver state on `(B1, B2)` after correction.
    pub bob: StateVector,
    pub outcome: BellOutcome,
    pub correction: PauliCorrection,
    /// Born probability of the joint outcome (1/16 for any input).
    pub joint_probability: f64,
    pub fidelity_2q: f64,
    pub classical_bits_sent: u32,
}

/// Teleport a two-qubit state labeled `(a, c)` over two Bell pairs,
/// using the correction table conjugated for that channel.
pub fn teleport_two_qubit(
    psi2: &StateVector,
    channel: (BellLabel, BellLabel),
    mode: TeleportMode<'_>,
) -> Result<TeleportResult> {
    teleport_two_qubit_with_table(psi2, channel, mode, &CorrectionTable::for_channel(channel))
}

/// Same as [`teleport_two_qubit`] but with an explicit correction table,
/// so verification can inject corrupted tables.
pub fn teleport_two_qubit_with_table(
    psi2: &StateVector,
    channel: (BellLabel, BellLabel),
    mode: TeleportMode<'_>,
    table: &CorrectionTable,
) -> Result<TeleportResult> {
    let a = QubitLabel::from("a");
    let c = QubitLabel::from("c");
    if psi2.labels() != [a.clone(), c.clone()] {
        return Err(Error::LabelSetMismatch);
    }
    let b1 = QubitLabel::from("B1");
    let b2 = QubitLabel::from("B2");
    let channel_state = build_channel(&ChannelSpec::TwoBellPairs {
        first: channel.0,
        second: channel.1,
    })?;
    let combined = psi2.tensor(&channel_state)?;

    let (first, second) = match mode {
        TeleportMode::Forced(outcome) => {
            let m1 = bell_measure(
                &combined,
                &a,
                &QubitLabel::from("A1"),
                MeasureMode::Forced(outcome.first),
            )?;
            let m2 = bell_measure(
                &m1.state,
                &c,
                &QubitLabel::from("A2"),
                MeasureMode::Forced(outcome.second),
            )?;
            (m1, m2)
        }
        TeleportMode::Random(rng) => {
            let m1 = bell_measure(
                &combined,
                &a,
                &QubitLabel::from("A1"),
                MeasureMode::Random(&mut *rng),
            )?;
            let m2 = bell_measure(
                &m1.state,
                &c,
                &QubitLabel::from("A2"),
                MeasureMode::Random(&mut *rng),
            )?;
            (m1, m2)
        }
    };

    let outcome = BellOutcome::new(first.outcome, second.outcome);
    let correction = table.lookup(outcome);
    let bob = apply_correction(&second.state, &correction, &b1, &b2)?;
    let target = psi2.with_labels(vec![b1, b2])?;
    let fidelity_2q = bob.fidelity(&target)?;
    Ok(TeleportResult {
        bob,
        outcome,
        correction,
        joint_probability: first.probability * second.probability,
        fidelity_2q,
        // Two Bell measurements, four outcomes each: two bits per pair.
        classical_bits_sent: 4,
    })
}

/// Rebuild the eight-qubit state from the teleported pair and six fresh
/// |0⟩ ancillas by running the compression circuit backwards on the
/// receiver's register.
pub fn reconstruct(bob: &StateVector, variant: CompressionVariant) -> Result<StateVector> {
    let b1 = QubitLabel::from("B1");
    let b2 = QubitLabel::from("B2");
    if bob.labels() != [b1, b2] {
        return Err(Error::LabelSetMismatch);
    }
    let ancilla_labels: Vec<QubitLabel> = ["B", "D", "E", "F", "G", "H"]
        .iter()
        .map(|n| QubitLabel::from(*n))
        .collect();
    let ancillas = StateVector::basis_state(&ancilla_labels, "000000")?;
    let full = bob.tensor(&ancillas)?.permute_to(&receiver_register())?;

    let sender = data_register();
    let receiver = receiver_register();
    let circuit = compression_circuit(variant).inverted().relabeled(|label| {
        let pos = sender
            .iter()
            .position(|l| l == label)
            .expect("sender label");
        receiver[pos].clone()
    });
    full.apply_circuit(&circuit)
}

/// Full transcript of one protocol run.
#[derive(Clone, Debug, Serialize)]
pub struct TeleportTranscript {
    pub coefficients: CoefficientSet,
    pub outcome: BellOutcome,
    pub correction: PauliCorrection,
    pub classical_bits_sent: u32,
    pub fidelity_2q: f64,
    pub fidelity_8q: f64,
    /// Base seed of the run, when outcomes were sampled.
    pub seed: Option<u64>,
    /// Trial index under the base seed; `seed + trial` seeds the
    /// generator, so the pair replays the run exactly.
    pub trial: Option<u64>,
    /// Set when the branch was forced instead of sampled.
    pub forced_outcome: Option<BellOutcome>,
    pub variant: CompressionVariant,
    pub channel: (BellLabel, BellLabel),
}

/// Generator seed for one trial of a batch.
pub fn trial_seed(base: u64, trial: u64) -> u64 {
    base.wrapping_add(trial)
}

/// Encode, compress, teleport, reconstruct; fidelity is measured against
/// the encoded input carried onto the receiver register.
pub fn run_end_to_end(
    c: &CoefficientSet,
    mode: TeleportMode<'_>,
    variant: CompressionVariant,
    channel: (BellLabel, BellLabel),
) -> Result<TeleportTranscript> {
    run_end_to_end_with_state(c, mode, variant, channel).map(|(transcript, _)| transcript)
}

/// [`run_end_to_end`] that also yields the reconstructed state, e.g. for
/// `--dump-state`.
pub fn run_end_to_end_with_state(
    c: &CoefficientSet,
    mode: TeleportMode<'_>,
    variant: CompressionVariant,
    channel: (BellLabel, BellLabel),
) -> Result<(TeleportTranscript, StateVector)> {
    let forced_outcome = match &mode {
        TeleportMode::Forced(outcome) => Some(*outcome),
        TeleportMode::Random(_) => None,
    };
    let encoded = encode_input(c);
    let compressed = compress(&encoded, variant)?;
    let teleported = teleport_two_qubit(&compressed.pair, channel, mode)?;
    let reconstructed = reconstruct(&teleported.bob, variant)?;
    let target = encoded.with_labels(receiver_register())?;
    let fidelity_8q = reconstructed.fidelity(&target)?;
    let transcript = TeleportTranscript {
        coefficients: *c,
        outcome: teleported.outcome,
        correction: teleported.correction,
        classical_bits_sent: teleported.classical_bits_sent,
        fidelity_2q: teleported.fidelity_2q,
        fidelity_8q,
        seed: None,
        trial: None,
        forced_outcome,
        variant,
        channel,
    };
    Ok((transcript, reconstructed))
}

impl fmt::Display for TeleportTranscript {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "outcome {} correction {} fidelity_2q={:.12} fidelity_8q={:.12}",
            self.outcome, self.correction, self.fidelity_2q, self.fidelity_8q
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::statevector::labels;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn ql(name: &str) -> QubitLabel {
        QubitLabel::from(name)
    }

    fn amp(re: f64) -> Amplitude {
        Amplitude::new(re, 0.0)
    }

    fn assert_close(a: Amplitude, b: Amplitude) {
        assert!((a - b).norm() < 1e-12, "{a} != {b}");
    }

    // Independent oracle: push the four encoded terms through the
    // compression gates with plain u8 bit arithmetic (bit 7 = a, bit 0 =
    // h, matching the ket reading), then expand all 256 amplitudes.
    fn brute_force_compressed_amps(
        c: &CoefficientSet,
        variant: CompressionVariant,
    ) -> Vec<Amplitude> {
        let bit = |name: u8| -> u8 { 7 - (name - b'a') };
        let cnot = |bits: u8, control: u8, target: u8| -> u8 {
            if bits >> bit(control) & 1 == 1 {
                bits ^ (1 << bit(target))
            } else {
                bits
            }
        };
        let swap = |bits: u8, q1: u8, q2: u8| -> u8 {
            let v1 = bits >> bit(q1) & 1;
            let v2 = bits >> bit(q2) & 1;
            if v1 != v2 {
                bits ^ (1 << bit(q1)) ^ (1 << bit(q2))
            } else {
                bits
            }
        };
        let mut terms: Vec<(Amplitude, u8)> = ENCODED_SUPPORT
            .iter()
            .zip(c.as_array())
            .map(|(index, coeff)| (coeff, *index as u8))
            .collect();
        for (_, bits) in terms.iter_mut() {
            for (ctrl, tgt) in [(b'a', b'e'), (b'a', b'f'), (b'a', b'g'), (b'a', b'h')] {
                *bits = cnot(*bits, ctrl, tgt);
            }
            match variant {
                CompressionVariant::TwoCnot => {
                    *bits = cnot(*bits, b'a', b'b');
                    *bits = cnot(*bits, b'a', b'd');
                }
                CompressionVariant::PaperLiteral => {
                    *bits = swap(*bits, b'b', b'c');
                    *bits = cnot(*bits, b'a', b'b');
                    *bits = cnot(*bits, b'a', b'd');
                }
            }
        }
        let mut amps = vec![Amplitude::new(0.0, 0.0); 256];
        for (coeff, bits) in terms {
            amps[bits as usize] += coeff;
        }
        amps
    }

    #[test]
    fn coefficients_normalize_within_tolerance_and_reject_beyond() {
        let c = CoefficientSet::new(amp(1.0), amp(0.0), amp(0.0), amp(0.0)).unwrap();
        assert_close(c.alpha, amp(1.0));

        // Decimal-entry roundoff inside the window is rescaled exactly.
        let slightly_off = 1.0 + 5e-7;
        let c = CoefficientSet::new(amp(slightly_off), amp(0.0), amp(0.0), amp(0.0)).unwrap();
        let norm_sqr: f64 = c.as_array().iter().map(|a| a.norm_sqr()).sum();
        assert!((norm_sqr - 1.0).abs() < 1e-14);

        assert!(matches!(
            CoefficientSet::new(amp(1.0), amp(0.0), amp(0.0), amp(1.0)),
            Err(Error::CoefficientsNotNormalized { .. })
        ));
        assert!(matches!(
            CoefficientSet::new(amp(0.0), amp(0.0), amp(0.0), amp(0.0)),
            Err(Error::ZeroNormCoefficients)
        ));
    }

    #[test]
    fn encode_places_the_four_terms() {
        let state = encode_input(&CoefficientSet::basis(0));
        assert_close(state.amplitude(0), amp(1.0));

        let state = encode_input(&CoefficientSet::basis(2));
        assert_close(state.amplitude(223), amp(1.0));

        let state = encode_input(&CoefficientSet::uniform());
        for index in ENCODED_SUPPORT {
            assert_close(state.amplitude(index), amp(0.5));
        }
        let norm: f64 = state.amplitudes().iter().map(|a| a.norm_sqr()).sum();
        assert!((norm - 1.0).abs() < 1e-12);
    }

    #[test]
    fn two_bell_pair_channel_matches_the_hand_kronecker() {
        let state = build_channel(&ChannelSpec::TwoBellPairs {
            first: BellLabel::PhiPlus,
            second: BellLabel::PhiPlus,
        })
        .unwrap();
        assert_eq!(state.labels(), &labels(["A1", "B1", "A2", "B2"])[..]);
        for (index, value) in state.amplitudes().iter().enumerate() {
            if [0b0000, 0b0011, 0b1100, 0b1111].contains(&index) {
                assert_close(*value, amp(0.5));
            } else {
                assert_close(*value, amp(0.0));
            }
        }
    }

    #[test]
    fn cluster_channel_has_the_four_published_terms() {
        let state = build_channel(&ChannelSpec::ZhaoCluster).unwrap();
        for (index, value) in state.amplitudes().iter().enumerate() {
            if [0b000000, 0b001001, 0b110110, 0b111111].contains(&index) {
                assert_close(*value, amp(0.5));
            } else {
                assert_close(*value, amp(0.0));
            }
        }
    }

    #[test]
    fn coefficient_dependent_channel_is_not_constructible() {
        let spec = ChannelSpec::ZhaoCoefficientDependent;
        assert!(spec.parameter_dependence());
        let err = build_channel(&spec).unwrap_err();
        match err {
            Error::ChannelNotConstructible { reason } => {
                assert!(reason.contains("unknown"));
            }
            other => panic!("unexpected error {other:?}"),
        }
        assert!(!ChannelSpec::ZhaoCluster.parameter_dependence());
    }

    #[test]
    fn stage_one_concentrates_onto_the_four_qubit_intermediate() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..20 {
            let c = CoefficientSet::random(&mut rng);
            let after = encode_input(&c)
                .apply_circuit(&compression_stage_one())
                .unwrap();
            let expected = four_qubit_intermediate(&c)
                .tensor(&StateVector::basis_state(&labels(["e", "f", "g", "h"]), "0000").unwrap())
                .unwrap();
            for (x, y) in after.amplitudes().iter().zip(expected.amplitudes()) {
                assert_close(*x, *y);
            }
        }
    }

    #[test]
    fn full_circuit_matches_the_bitwise_brute_force_expansion() {
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        for variant in [
            CompressionVariant::TwoCnot,
            CompressionVariant::PaperLiteral,
        ] {
            for case in 0..6 {
                let c = match case {
                    0 => CoefficientSet::uniform(),
                    1..=4 => CoefficientSet::basis(case - 1),
                    _ => CoefficientSet::random(&mut rng),
                };
                let simulated = encode_input(&c)
                    .apply_circuit(&compression_circuit(variant))
                    .unwrap();
                let expected = brute_force_compressed_amps(&c, variant);
                for (x, y) in simulated.amplitudes().iter().zip(expected.iter()) {
                    assert_close(*x, *y);
                }
            }
        }
    }

    #[test]
    fn compress_exposes_the_coefficients_on_the_pair() {
        let out = compress(
            &encode_input(&CoefficientSet::basis(0)),
            CompressionVariant::TwoCnot,
        )
        .unwrap();
        assert_close(out.pair.amplitude(0b00), amp(1.0));

        // Trace of the second term: it must land on |01⟩ of (a, c).
        let out = compress(
            &encode_input(&CoefficientSet::basis(1)),
            CompressionVariant::TwoCnot,
        )
        .unwrap();
        assert_close(out.pair.amplitude(0b01), amp(1.0));

        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..25 {
            let c = CoefficientSet::random(&mut rng);
            let out = compress(&encode_input(&c), CompressionVariant::TwoCnot).unwrap();
            assert_eq!(out.pair.labels(), &labels(["a", "c"])[..]);
            for (value, expected) in out.pair.amplitudes().iter().zip(c.as_array()) {
                assert_close(*value, expected);
            }
            assert_eq!(
                out.residual.labels(),
                &labels(["b", "d", "e", "f", "g", "h"])[..]
            );
            assert_close(out.residual.amplitude(0), amp(1.0));
        }
    }

    #[test]
    fn compress_rejects_inputs_outside_the_family() {
        let state = StateVector::basis_state(&data_register(), "01000000").unwrap();
        assert!(matches!(
            compress(&state, CompressionVariant::TwoCnot),
            Err(Error::OutsideEncodedFamily)
        ));
    }

    #[test]
    fn literal_gate_string_fails_to_factor_for_generic_coefficients() {
        let mut rng = ChaCha8Rng::seed_from_u64(24);
        let c = CoefficientSet::random(&mut rng);
        let err = compress(&encode_input(&c), CompressionVariant::PaperLiteral).unwrap_err();
        assert!(matches!(err, Error::FactorizationFailed { .. }));
    }

    #[test]
    fn teleporting_zero_zero_over_the_default_channel() {
        let psi2 = StateVector::basis_state(&labels(["a", "c"]), "00").unwrap();
        let result = teleport_two_qubit(
            &psi2,
            (BellLabel::PhiPlus, BellLabel::PhiPlus),
            TeleportMode::Forced(BellOutcome::new(BellLabel::PhiPlus, BellLabel::PhiPlus)),
        )
        .unwrap();
        assert_eq!(result.correction.on_b1, crate::bell::CorrectionOp::I);
        assert_eq!(result.correction.on_b2, crate::bell::CorrectionOp::I);
        assert_close(result.bob.amplitude(0b00), amp(1.0));
        assert!((result.joint_probability - 1.0 / 16.0).abs() < 1e-12);
        assert_eq!(result.classical_bits_sent, 4);
    }

    #[test]
    fn every_forced_branch_recovers_the_carrier() {
        let mut rng = ChaCha8Rng::seed_from_u64(25);
        let c = CoefficientSet::random(&mut rng);
        let psi2 = c.pair_state(ql("a"), ql("c"));
        for outcome in BellOutcome::all() {
            let result = teleport_two_qubit(
                &psi2,
                (BellLabel::PhiPlus, BellLabel::PhiPlus),
                TeleportMode::Forced(outcome),
            )
            .unwrap();
            assert!((result.fidelity_2q - 1.0).abs() < 1e-10);
            assert!((result.joint_probability - 1.0 / 16.0).abs() < 1e-12);
        }
    }

    #[test]
    fn nondefault_channels_work_through_the_conjugated_table() {
        let mut rng = ChaCha8Rng::seed_from_u64(26);
        let c = CoefficientSet::random(&mut rng);
        let psi2 = c.pair_state(ql("a"), ql("c"));
        for first in BellLabel::ALL {
            for second in BellLabel::ALL {
                for outcome in BellOutcome::all() {
                    let result =
                        teleport_two_qubit(&psi2, (first, second), TeleportMode::Forced(outcome))
                            .unwrap();
                    assert!(
                        (result.fidelity_2q - 1.0).abs() < 1e-10,
                        "channel {first}:{second}, outcome {outcome}"
                    );
                }
            }
        }
    }

    #[test]
    fn teleport_requires_the_pair_labels() {
        let psi2 = StateVector::basis_state(&labels(["x", "y"]), "00").unwrap();
        assert!(matches!(
            teleport_two_qubit(
                &psi2,
                (BellLabel::PhiPlus, BellLabel::PhiPlus),
                TeleportMode::Forced(BellOutcome::new(BellLabel::PhiPlus, BellLabel::PhiPlus)),
            ),
            Err(Error::LabelSetMismatch)
        ));
    }

    #[test]
    fn measurement_order_does_not_matter() {
        use crate::bell::{bell_measure, MeasureMode};
        let mut rng = ChaCha8Rng::seed_from_u64(27);
        let c = CoefficientSet::random(&mut rng);
        let combined = c
            .pair_state(ql("a"), ql("c"))
            .tensor(
                &build_channel(&ChannelSpec::TwoBellPairs {
                    first: BellLabel::PhiPlus,
                    second: BellLabel::PhiPlus,
                })
                .unwrap(),
            )
            .unwrap();
        for outcome in BellOutcome::all() {
            let first_then_second = {
                let m1 = bell_measure(
                    &combined,
                    &ql("a"),
                    &ql("A1"),
                    MeasureMode::Forced(outcome.first),
                )
                .unwrap();
                let m2 = bell_measure(
                    &m1.state,
                    &ql("c"),
                    &ql("A2"),
                    MeasureMode::Forced(outcome.second),
                )
                .unwrap();
                (m1.probability * m2.probability, m2.state)
            };
            let second_then_first = {
                let m2 = bell_measure(
                    &combined,
                    &ql("c"),
                    &ql("A2"),
                    MeasureMode::Forced(outcome.second),
                )
                .unwrap();
                let m1 = bell_measure(
                    &m2.state,
                    &ql("a"),
                    &ql("A1"),
                    MeasureMode::Forced(outcome.first),
                )
                .unwrap();
                (m2.probability * m1.probability, m1.state)
            };
            assert!((first_then_second.0 - second_then_first.0).abs() < 1e-12);
            let f = first_then_second.1.fidelity(&second_then_first.1).unwrap();
            assert!((f - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn receiver_is_maximally_mixed_before_corrections() {
        use crate::bell::{bell_measure, MeasureMode};
        let mut rng = ChaCha8Rng::seed_from_u64(28);
        let c = CoefficientSet::random(&mut rng);
        let combined = c
            .pair_state(ql("a"), ql("c"))
            .tensor(
                &build_channel(&ChannelSpec::TwoBellPairs {
                    first: BellLabel::PhiPlus,
                    second: BellLabel::PhiPlus,
                })
                .unwrap(),
            )
            .unwrap();
        let mut populations = [0.0f64; 4];
        for outcome in BellOutcome::all() {
            let m1 = bell_measure(
                &combined,
                &ql("a"),
                &ql("A1"),
                MeasureMode::Forced(outcome.first),
            )
            .unwrap();
            let m2 = bell_measure(
                &m1.state,
                &ql("c"),
                &ql("A2"),
                MeasureMode::Forced(outcome.second),
            )
            .unwrap();
            for (index, value) in m2.state.amplitudes().iter().enumerate() {
                populations[index] += value.norm_sqr() / 16.0;
            }
        }
        for p in populations {
            assert!((p - 0.25).abs() < 1e-10, "population {p}");
        }
    }

    #[test]
    fn reconstruct_rebuilds_the_receiver_register() {
        let bob = StateVector::basis_state(&labels(["B1", "B2"]), "00").unwrap();
        let rebuilt = reconstruct(&bob, CompressionVariant::TwoCnot).unwrap();
        assert_eq!(rebuilt.labels(), &receiver_register()[..]);
        assert_close(rebuilt.amplitude(0), amp(1.0));
    }

    #[test]
    fn compress_then_reconstruct_is_the_identity_on_the_family() {
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        for _ in 0..100 {
            let c = CoefficientSet::random(&mut rng);
            let encoded = encode_input(&c);
            let compressed = compress(&encoded, CompressionVariant::TwoCnot).unwrap();
            let bob = compressed.pair.with_labels(labels(["B1", "B2"])).unwrap();
            let rebuilt = reconstruct(&bob, CompressionVariant::TwoCnot).unwrap();
            let target = encoded.with_labels(receiver_register()).unwrap();
            assert!(rebuilt.fidelity(&target).unwrap() >= 1.0 - 1e-10);
        }
    }

    #[test]
    fn end_to_end_transcript_for_a_basis_input() {
        let c = CoefficientSet::basis(0);
        for outcome in BellOutcome::all() {
            let transcript = run_end_to_end(
                &c,
                TeleportMode::Forced(outcome),
                CompressionVariant::TwoCnot,
                (BellLabel::PhiPlus, BellLabel::PhiPlus),
            )
            .unwrap();
            assert!((transcript.fidelity_8q - 1.0).abs() < 1e-10);
            assert_eq!(transcript.classical_bits_sent, 4);
            assert_eq!(transcript.forced_outcome, Some(outcome));
            assert_eq!(transcript.outcome, outcome);
        }
    }

    #[test]
    fn sampled_runs_replay_exactly_from_the_seed() {
        let run = |seed: u64| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let c = CoefficientSet::random(&mut rng);
            run_end_to_end(
                &c,
                TeleportMode::Random(&mut rng),
                CompressionVariant::TwoCnot,
                (BellLabel::PhiPlus, BellLabel::PhiPlus),
            )
            .unwrap()
        };
        let t1 = run(trial_seed(7, 3));
        let t2 = run(trial_seed(7, 3));
        assert_eq!(t1.outcome, t2.outcome);
        assert_eq!(
            serde_json::to_string(&t1).unwrap(),
            serde_json::to_string(&t2).unwrap()
        );
    }

    #[test]
    fn transcript_serializes_the_wire_schema() {
        let c = CoefficientSet::basis(0);
        let mut transcript = run_end_to_end(
            &c,
            TeleportMode::Forced(BellOutcome::new(BellLabel::PhiPlus, BellLabel::PsiMinus)),
            CompressionVariant::TwoCnot,
            (BellLabel::PhiPlus, BellLabel::PhiPlus),
        )
        .unwrap();
        transcript.seed = Some(7);
        transcript.trial = Some(0);
        let value: serde_json::Value = serde_json::to_value(&transcript).unwrap();
        let object = value.as_object().unwrap();
        for key in [
            "coefficients",
            "outcome",
            "correction",
            "classical_bits_sent",
            "fidelity_2q",
            "fidelity_8q",
            "seed",
            "variant",
            "channel",
        ] {
            assert!(object.contains_key(key), "missing {key}");
        }
        assert_eq!(value["outcome"][0], "phi+");
        assert_eq!(value["outcome"][1], "psi-");
        assert_eq!(value["correction"][1], "iY");
        assert_eq!(value["variant"], "two-cnot");
        assert_eq!(value["channel"][0], "phi+");
        assert_eq!(value["coefficients"][0][0], 1.0);
    }
}
