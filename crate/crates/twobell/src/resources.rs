//! Entanglement-cost accounting: how many channel qubits and Bell pairs
//! each scheme spends, against the information-theoretic floor.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::protocol::{compression_circuit, CompressionVariant, TeleportTranscript};

/// Note printed with every resource report. The counting rule here is
/// ceil(log2 n); a circulating variant of the rule, log2(ceil(n/2)),
/// evaluates to 1 at n = 4, which contradicts the two-pair protocol this
/// crate verifies (and the n = 2 single-pair base case it agrees on).
pub const FORMULA_NOTE: &str = "minimum Bell pairs for n unknown coefficients: ceil(log2 n). \
A sometimes-quoted form of this rule, log2(ceil(n/2)), gives 1 for n = 4 and is inconsistent \
with the fidelity-1 two-pair protocol verified here; ceil(log2 n) matches every endorsed \
instance (n = 2 -> 1 pair, n = 4 -> 2 pairs).";

/// Teleportation schemes under audit.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Scheme {
    /// Six-qubit cluster channel.
    ZhaoCluster,
    /// Product of two Bell pairs.
    TwoBellPairs,
}

impl Scheme {
    pub fn as_str(self) -> &'static str {
        match self {
            Scheme::ZhaoCluster => "zhao-cluster",
            Scheme::TwoBellPairs => "two-bell-pairs",
        }
    }
}

/// Resource tally for one scheme.
#[derive(Clone, Debug, Serialize)]
pub struct ResourceReport {
    pub scheme_name: String,
    pub channel_qubits: u32,
    /// Bell pairs consumed; 0 with `product_channel = false` when the
    /// channel is not a Bell-pair product.
    pub bell_pairs: u32,
    pub product_channel: bool,
    /// Classical bits sent; `None` where the published path is out of
    /// scope for this audit.
    pub classical_bits: Option<u32>,
    /// Sender-side local gate counts (the receiver block mirrors them).
    pub gate_counts: BTreeMap<String, u32>,
    pub n_unknown_coefficients: u32,
    pub min_bell_pairs_required: u32,
}

/// Bell pairs needed to carry `n_unknown` unknown amplitudes:
/// ceil(log2 n). A fully known state (n = 1) needs no channel.
pub fn min_bell_pairs(n_unknown: u32) -> Result<u32> {
    if n_unknown < 1 {
        return Err(Error::NoUnknownCoefficients);
    }
    Ok(u32::BITS - (n_unknown - 1).leading_zeros())
}

/// Tally the resources of one scheme. The two-Bell-pair numbers follow
/// from the actual compression circuit of `variant`.
pub fn audit(scheme: Scheme, variant: CompressionVariant) -> ResourceReport {
    let min_required = min_bell_pairs(4).expect("n = 4");
    match scheme {
        Scheme::ZhaoCluster => ResourceReport {
            scheme_name: scheme.as_str().to_owned(),
            channel_qubits: 6,
            bell_pairs: 0,
            product_channel: false,
            classical_bits: None,
            gate_counts: BTreeMap::new(),
            n_unknown_coefficients: 4,
            min_bell_pairs_required: min_required,
        },
        Scheme::TwoBellPairs => {
            let gate_counts = compression_circuit(variant)
                .gate_counts()
                .into_iter()
                .map(|(kind, count)| (kind.as_str().to_owned(), count))
                .collect();
            ResourceReport {
                scheme_name: scheme.as_str().to_owned(),
                channel_qubits: 4,
                bell_pairs: 2,
                product_channel: true,
                classical_bits: Some(4),
                gate_counts,
                n_unknown_coefficients: 4,
                min_bell_pairs_required: min_required,
            }
        }
    }
}

/// Did a run hit the resource floor: exactly the minimum number of Bell
/// pairs, at unit fidelity?
pub fn saturation_check(transcript: &TeleportTranscript) -> bool {
    // The pipeline always spends one pair per channel Bell state.
    saturation_check_counts(2, transcript.fidelity_8q)
}

/// Core of [`saturation_check`], parameterized for hypothetical runs.
pub fn saturation_check_counts(bell_pairs: u32, fidelity_8q: f64) -> bool {
    bell_pairs == min_bell_pairs(4).expect("n = 4") && fidelity_8q >= 1.0 - 1e-10
}

/// `(n, min_bell_pairs(n))` rows over an inclusive range.
pub fn min_pairs_table(from: u32, to: u32) -> Result<Vec<(u32, u32)>> {
    (from..=to).map(|n| Ok((n, min_bell_pairs(n)?))).collect()
}

/// Aligned plain-text comparison of the two schemes.
pub fn comparison_text(variant: CompressionVariant) -> String {
    let reports = [
        audit(Scheme::ZhaoCluster, variant),
        audit(Scheme::TwoBellPairs, variant),
    ];
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:<16} {:>14} {:>11} {:>15} {:<20}",
        "scheme", "channel qubits", "bell pairs", "classical bits", "sender gates"
    );
    for r in &reports {
        let pairs = if r.product_channel {
            r.bell_pairs.to_string()
        } else {
            "n/a".to_owned()
        };
        let bits = r
            .classical_bits
            .map(|b| b.to_string())
            .unwrap_or_else(|| "unknown".to_owned());
        let gates = if r.gate_counts.is_empty() {
            "n/a".to_owned()
        } else {
            r.gate_counts
                .iter()
                .map(|(kind, count)| format!("{kind} x{count}"))
                .collect::<Vec<_>>()
                .join(", ")
        };
        let _ = writeln!(
            out,
            "{:<16} {:>14} {:>11} {:>15} {:<20}",
            r.scheme_name, r.channel_qubits, pairs, bits, gates
        );
    }
    let _ = writeln!(
        out,
        "minimum required for 4 unknown coefficients: {} Bell pairs",
        min_bell_pairs(4).expect("n = 4")
    );
    let _ = writeln!(out, "note: {FORMULA_NOTE}");
    out
}
