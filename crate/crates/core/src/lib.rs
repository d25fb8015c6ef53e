//! Exact flattening matrices of homogeneous forms and certified lower bounds
//! for cactus and Waring rank.
//!
//! The crate provides:
//!
//! - exact sparse linear algebra over ℚ and 𝔽_p ([`matrix`]);
//! - homogeneous forms, dual forms, and the contraction pairing ([`poly`]);
//! - catalecticant and Koszul-type flattening matrices ([`flatten`]);
//! - homogeneous ideals, Hilbert functions, apolarity checks ([`apolarity`]);
//! - certified rank lower bounds and decomposition verification ([`bounds`]).

pub mod apolarity;
pub mod bounds;
pub mod error;
pub mod flatten;
pub mod matrix;
pub mod poly;
pub mod scalar;

pub use apolarity::{
    annihilator_piece, check_nonabelian, hilbert_function, hilbert_profile, ideal_piece, in_span,
    length, HilbertProfile, HomogeneousIdeal, NonabelianReport,
};
pub use bounds::{
    cactus_lower_bound, gap_regime, parse_certificate, serialize_certificate,
    verify_decomposition, BoundOptions, Certificate, CertificateEntry, Decomposition, GapRegime,
    WitnessPolicy, DEFAULT_SEED,
};
pub use error::{Error, Result};
pub use flatten::{
    catalecticant_matrix, default_spec_grid, default_spec_grid_capped, exterior_indices,
    flattening_rank, koszul_matrix, point_rank, ExteriorIndex, FlatteningKind, FlatteningSpec,
    DEFAULT_GRID_CAP,
};
pub use matrix::SparseMatrix;
pub use poly::{
    contract, parse_dual_form, parse_form, power_of_linear, random_form, DualForm, Form,
    HomogeneousForm, LinearPoint, Monomial,
};
pub use scalar::{FieldTag, Scalar};
