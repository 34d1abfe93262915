use thiserror::Error;

use crate::bell::BellLabel;
use crate::statevector::QubitLabel;

/// Errors produced by state construction, gate application, measurement,
/// and the protocol pipeline.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("register must hold between 1 and {max} qubits, got {got}")]
    RegisterSize { got: usize, max: usize },

    #[error("amplitude vector has length {got}, expected 2^{qubits}")]
    AmplitudeLength { got: usize, qubits: usize },

    #[error("state contains a non-finite amplitude")]
    NonFiniteAmplitude,

    #[error("state norm {norm} is not 1 within tolerance")]
    NotNormalized { norm: f64 },

    #[error("bitstring has length {got}, expected {expected}")]
    BitstringLength { expected: usize, got: usize },

    #[error("invalid bitstring character {0:?}, expected '0' or '1'")]
    BitstringChar(char),

    #[error("duplicate qubit label {0}")]
    DuplicateLabel(QubitLabel),

    #[error("unknown qubit label {0}")]
    UnknownLabel(QubitLabel),

    #[error("gate operands must be distinct, got {0} twice")]
    DuplicateOperands(QubitLabel),

    #[error("gate {kind} takes {expected} operand(s), got {got}")]
    OperandCount {
        kind: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("states are defined on different label sets")]
    LabelSetMismatch,

    #[error("requested label order is not a permutation of the register")]
    NotAPermutation,

    #[error("tensor factors share the label {0}")]
    OverlappingLabels(QubitLabel),

    #[error("subset must be a nonempty proper subset of the register labels")]
    InvalidSubset,

    #[error("coefficient set has zero norm")]
    ZeroNormCoefficients,

    #[error("coefficient norm {norm} is outside the auto-normalization tolerance")]
    CoefficientsNotNormalized { norm: f64 },

    #[error("channel cannot be constituted: {reason}")]
    ChannelNotConstructible { reason: String },

    #[error("input state is not in the four-term encoded family")]
    OutsideEncodedFamily,

    #[error("state does not factor on the requested qubits (max deviation {max_deviation:.3e})")]
    FactorizationFailed { max_deviation: f64 },

    #[error("forced outcome {outcome} has probability {probability:.3e}, too small to realize")]
    ZeroProbabilityOutcome {
        outcome: BellLabel,
        probability: f64,
    },

    #[error("resource count needs at least one unknown coefficient")]
    NoUnknownCoefficients,
}

pub type Result<T> = std::result::Result<T, Error>;
