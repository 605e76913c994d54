//! 2-adic lattices at finite precision, their normalizer extensions and the splitting of
//! complete reflection lattices into Coxeter and DI(4) factors.

pub mod classify;
pub mod di4;
pub mod lattice;
pub mod matrix;

pub use lattice::{
    discrete_lift_check, discrete_marking_numerators, discrete_normalizer_extension, promote, promotion_embedding,
    two_adic_action, two_adic_markings, two_adic_reflection, two_adic_reflection_data, two_adic_reflections,
    CompleteMarkedLattice, DiscreteTorusElement, TwoAdicGroup, TwoAdicMarking, TwoAdicReflection,
};
pub use matrix::{smith_mod2k, SmithMod2k, TwoAdicMatrix, DEFAULT_PRECISION};
pub use di4::{di4_data, di4_oracle, DI4Data, DI4Report};
pub use classify::{classify, classify_factor, coxeterize, reflection_components, reflection_partition, split_off_di4, DI4Splitting, weyl_types, Factor, FactorTag, Partition, WeylType};
