//! Finite operads, bimodules and infinitesimal bimodules as lookup tables,
//! the built-in operads, axiom checkers and the constructions built on them.

pub mod builtin;
pub mod endo;
pub mod indexed;
pub mod modules;
pub mod operad;
pub mod xcons;

pub use builtin::{builtin_act, builtin_as, star_closed, star_open};
pub use endo::{endomorphism_operad, ActionData, EndFn, Family};
pub use indexed::{Id, Indexed};
pub use modules::{
    check_bimodule_axioms, check_bimodule_map, check_infbimodule_axioms, check_infbimodule_map,
    induced_bimodule, induced_infbimodule, infbimodule_from_bimodule_map, BimoduleTables,
    InfBimoduleTables,
};
pub use operad::{check_operad_axioms, FiniteOperad, OperadMap};
pub use xcons::{check_assumption_13, m_star, x_construction, x_star, XInput};
