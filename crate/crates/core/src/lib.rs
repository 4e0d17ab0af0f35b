//! Workbench for modal provability logics: sequent provers for K4, KD4, S4, GL and GLS,
//! Kripke semantics on trees with clusters, witnesses and expansions, the K4 to GL
//! translation with its cluster unwinding, and the BHK and Gödel translations.

pub mod harness;
pub mod kripke;
pub mod modal_provers;
pub mod prop_provers;
pub mod provability_semantics;
pub mod syntax;
pub mod transform;
