//! Finite 2-valued and 3-valued first-order structures with transitive
//! closure, embedding and canonical abstraction, generators for the
//! characteristic formulas that describe exactly the concrete models an
//! abstract structure stands for, and a supervaluation query engine backed
//! by bounded finite-model enumeration.

pub mod abstraction;
pub mod charform;
pub mod error;
pub mod fixtures;
pub mod logic;
pub mod semantics;
pub mod structures;
pub mod supervaluation;

pub use error::Error;
pub use logic::{parse_formula, parse_formula_np, print_formula, Formula, Vocabulary};
pub use semantics::{eval2, eval2_closed, eval3, eval3_closed, eval_mso, eval_mso_closed, Assignment};
pub use structures::{
    enumerate_structures, ThreeValuedStructure, TruthValue, TwoValuedStructure, Violation,
};
