//! Binary belief-propagation decoders for quantum LDPC codes.
//!
//! The crate covers the whole decoding stack: Pauli strings and their
//! symplectic (`2n`-bit) and decoupled (`3n`-bit) binary images, GF(2)
//! matrices and elimination, surface-code constructions, Pauli channels,
//! symplectic / partially decoupled / fully decoupled BP with min-sum and
//! sum-product updates, order-0 OSD, and a Monte Carlo harness for logical
//! error rates and thresholds.
//!
//! ```
//! use qldpc_bp::{build_xzzx_surface, BpConfig, Flavor, NoiseModel, UpdateRule, run_point};
//!
//! let code = build_xzzx_surface(3).unwrap();
//! let noise = NoiseModel::depolarizing(0.05).unwrap();
//! let cfg = BpConfig::new(Flavor::Fdbp, UpdateRule::MinSum, code.n());
//! let point = run_point(&code, noise, cfg, 200, 7).unwrap();
//! assert!(point.ler < 0.5);
//! ```

pub mod bits;
pub mod bp;
pub mod code;
pub mod error;
pub mod gf2;
pub mod noise;
pub mod osd;
pub mod pauli;
pub mod sim;

pub use bits::BitVec;
pub use bp::{
    decode, BpConfig, BpDecoder, BpState, CorrectionScope, DecodeOutcome, Flavor, UpdateRule, DEFAULT_LLR_CLAMP,
};
pub use code::{build_decoupled_matrix, build_planar_surface, build_xzzx_surface, extract_logicals, StabilizerCode};
pub use error::{Error, Result};
pub use gf2::{build_tanner, row_reduce, solve_on_pivots, BitMatrix, Elimination, SpanBasis, TannerGraph};
pub use noise::{
    decoupled_priors, sample_error, symplectic_priors, trial_rng, ChannelKind, ChannelSpec, NoiseModel, PriorVector,
};
pub use osd::{decode_with_osd, osd0, BpOsdDecoder, BpOsdOutcome};
pub use pauli::{
    commutes, decoupled_to_symplectic, pauli_to_decoupled, pauli_to_symplectic, symplectic_to_decoupled,
    syndrome_decoupled, syndrome_symplectic, DecoupledVec, Pauli, PauliString, SymplecticVec, Syndrome,
};
pub use sim::{
    curves_from_rows, estimate_threshold, logical_failure, run_point, sweep, wilson_interval, Curve, CurvePoint,
    PairCrossing, SweepRow, ThresholdEstimate, TrialRecord, TrialRunner,
};
