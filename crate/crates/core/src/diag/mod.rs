//! Diagonalization of finite abelian automorphism groups of R[x₁,x₂],
//! R = k[t]: the field stage over k(t), centralizer decompositions and
//! coordinate lifts, the descent of the conjugator to k[t], the end-to-end
//! pipeline, and the verifiable certificates they emit.

pub mod centralizer;
pub mod certificate;
pub mod descent;
pub mod field_stage;
pub mod pipeline;

pub use centralizer::{
    centralizer_decompose, coordinate_mate, homogeneous_coordinate_lift,
    homogenize_last_coordinate, lift_elementary, CentralizerWord, HomogeneousLift,
};
pub use certificate::{
    map_to_frac, record_stage, stage_hash, verify_conjugation,
    verify_entries_are_root_powers, Certificate, StageRecord,
};
pub use descent::{
    descend_conjugator, exact_divide, homogenize_kernel_coordinate, kernel_generator,
};
pub use field_stage::diagonalize_over_field;
pub use pipeline::{fixed_coordinate_conjugator, diagonalize_finite_abelian};
