//! Finite covers and unitary twists.

pub mod action;
pub mod congruence;
pub mod unitary;

pub use action::{regular_action, AbelianCover, CosetAction, RegularCover};
pub use congruence::{
    congruence_action, image_group, integral_generators, integral_scheme, search_integral_fixture, sl2_order,
    CongruenceCover, CongruenceKind, IntMatrix,
};
pub use unitary::{induced_permutation_rep, UnitaryRep};
