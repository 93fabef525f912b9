//! Chain complexes over ℤ and ℤ[T, T⁻¹], homology, cones and spectral sequences.

pub mod complex;
pub mod cone;
pub mod homology;
pub mod scalars;
pub mod spectral;
pub mod tensor;

pub use complex::{
    same_complex, ChainComplex, ComplexExt, DirectSum, GradedMap, Grading, IntComplex, IntMap,
    LaurentComplex,
};
pub use cone::{
    anti_cone, contracting_homotopy, is_contracting_homotopy, mapping_cone, verify_homotopy, Cone, Homotopy,
    HomotopyCheck,
};
pub use homology::{homology, homology_dims, is_acyclic, Homology};
pub use scalars::{extend_scalars, reduce_mod_p, specialize, FpComplex, Specialized};
pub use spectral::{
    spectral_sequence, summand_filtration, Filtration, Page, PageDifferential, SpectralSequence,
};
pub use tensor::{tensor, Tensor, TensorIndex};

/// Verifies ∂² = 0.
pub fn verify_complex<R: crate::exactlin::Ring>(c: &ChainComplex<R>) -> bool {
    c.verify_complex()
}
