//! Moment sequences over the whole real line as a working toolkit.
//!
//! A finite real sequence `s_0..s_m` is a truncated moment sequence exactly
//! when its Hankel matrices `H_n = (s_{i+j})` are positive semidefinite.
//! Everything here builds on that test:
//!
//! - [`classify_positivity`] and [`classify_exact`] decide definite /
//!   semidefinite / not positive, in floating point with an explicit
//!   tolerance band or in exact rational arithmetic with none;
//! - [`eigenvalue_trajectory`] and [`determinacy_heuristic`] follow the
//!   smallest Hankel eigenvalue as the order grows, a trajectory that tends
//!   to zero exactly for determinate moment problems;
//! - [`recover_atoms`] turns a valid sequence back into point masses, and
//!   [`moments_of`] goes the other way;
//! - [`extract_submoment`] and [`index_admissibility`] handle the
//!   subsequences `s_{k d + offset}` that stay moment sequences;
//! - [`complete_arithmetic`] fills in the missing entries of a partial
//!   sequence specified along such a pattern, via an explicit measure;
//! - [`check_domination`] and [`perturb_and_classify`] decide when a signed
//!   perturbation keeps a sequence inside the positive cone;
//! - [`stieltjes_transform`] and the relation checks in [`transforms`] tie
//!   the transforms of a measure and its extracted counterparts together.
//!
//! ```
//! use momentkit::{classify_positivity, moments_of, recover_atoms};
//! use momentkit::{Atom, AtomicMeasure, Verdict, DEFAULT_TOLERANCE};
//!
//! let measure = AtomicMeasure::new(vec![
//!     Atom::new(-1.0, 0.5),
//!     Atom::new(2.0, 1.0),
//! ])?;
//! let seq = moments_of(&measure, 5)?;
//! let report = classify_positivity(&seq, 2, DEFAULT_TOLERANCE)?;
//! assert_eq!(report.verdict, Verdict::PositiveSemidefinite);
//!
//! let recovered = recover_atoms(&seq, 2)?;
//! assert_eq!(recovered.len(), 2);
//! # Ok::<(), momentkit::Error>(())
//! ```

pub mod completion;
pub mod eigen;
pub mod error;
pub mod exact;
pub mod measures;
pub mod perturbation;
pub mod sequence;
pub mod spectral;
pub mod submoment;
pub mod transforms;

pub use eigen::{symmetric_eigen, EigenDecomposition};
pub use error::{Error, Result};
pub use exact::classify_exact;
pub use measures::{
    generalized_moments, moments_of, recover_atoms, Atom, AtomicMeasure, SignedAtomicMeasure,
};
pub use sequence::{
    build_hankel, classify_positivity, validate_partial, HankelMatrix, Mode,
    PartialMomentSequence, PositivityReport, TruncatedMomentSequence, Verdict, Witness,
    DEFAULT_TOLERANCE,
};
pub use spectral::{
    determinacy_heuristic, eigenvalue_trajectory, interlacing_audit, DeterminacyReport,
    DeterminacyVerdict, HeuristicParams,
};
pub use completion::{
    complete_arithmetic, detect_pattern, verify_completion, CompletionReport, CompletionResult,
    Definiteness, PatternDescriptor,
};
pub use perturbation::{
    check_domination, ejection_demo, perturb_and_classify, DominationReport,
    DominationViolation,
};
pub use submoment::{
    extract_submoment, index_admissibility, shift_identity_check, Admissibility,
    AdmissibilityWitness, IndexMap,
};
pub use transforms::{
    circle_constant, circle_relation_check, quotient_relation_check, stieltjes_transform,
    ComplexPoint,
};
