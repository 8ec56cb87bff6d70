//! Deterministic leverage-score sampling for the column subset selection
//! problem.
//!
//! Given `A ∈ R^{m×n}` and a target rank `k`, the deterministic selector
//! sorts the rank-`k` leverage scores `ℓ_i = ‖[V_k]_{i,:}‖²` and keeps the
//! fewest top columns whose accumulated score strictly exceeds a threshold
//! `θ`. With `θ = k − ε` the selected columns `C` satisfy
//! `‖A − CC⁺A‖² < (1 − ε)⁻¹·‖A − A_k‖²` in spectral and Frobenius norm.
//!
//! Modules:
//! - [`matrix`]: dense substrate (SVD, pivoted QR, norms, projections).
//! - [`leverage`]: scores and power-law fits.
//! - [`selectors`]: deterministic, randomized, pivoted-QR and approximate-basis selection.
//! - [`sketch`]: approximate top-`k` bases (Frequent Directions, rangefinder).
//! - [`synthgen`]: matrices with prescribed leverage profiles.
//! - [`evaluation`]: error reports, certificates and bound calculators.

pub mod error;
pub mod evaluation;
pub mod leverage;
pub mod matrix;
pub mod rng;
pub mod selectors;
pub mod sketch;
pub mod synthgen;

pub use error::{Error, Result};
pub use matrix::{
    best_rank_k_errors, orthonormal_basis, pivoted_qr, projection_residual, spectral_norm, svd,
    DenseMatrix, PivotedQr, SvdFactors,
};
pub use evaluation::{
    check_rank_preservation, comparison_counts, error_report, error_report_with,
    lemma1_certificate, restricted_rank_k, theorem1_factor, theorem2_column_bound, BoundReport,
    ErrorReport, ReferenceErrors,
};
pub use leverage::{fit_power_law, leverage_scores, LeverageProfile, PowerLawFit};
pub use selectors::{
    select_deterministic, select_pivoted_qr, select_randomized, select_top_c, select_with_basis,
    theta_for_epsilon, SelectionMethod, SelectionResult,
};
pub use sketch::{exact_basis, frequent_directions_basis, rangefinder_basis, BasisArtifact, BasisKind};
pub use synthgen::{generate, SyntheticInstance, SyntheticSpec};
