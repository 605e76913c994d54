//! Reflection, Tits and normalizer extensions as explicit 2-cocycles.

pub mod cocycle;
pub mod module;
pub mod normalizer;
pub mod reflection;
pub mod tits;

pub use cocycle::{
    cohomologous, default_bound, solve_coboundary, split_check, split_check_with, verify_witness, CheckPlan, Cochain,
    ExtensionCocycle, IdentityReport, SearchBound, SplitReport,
};
pub use module::{Action, Coefficients, Module};
pub use normalizer::{
    marking_numerators, normalizer_cocycle, normalizer_extension, nt_model, presentation_check, presentation_check_with,
    reflection_lift_check, NtModel, PresentationReport, RealizedElement, RealizedExtension, TorusAction,
};
pub use reflection::{
    centralizer_splitting, centralizer_splitting_with, induce, reflection_extension, word_lengths, CentralizerSplitting,
    CosetSpace, ReflectionClass, ReflectionData,
};
pub use tits::{tits_cocycle, tits_kernel_element, tits_subgroup, tits_vs_reflection, tits_word_element, SemidirectElement, TitsContext};
