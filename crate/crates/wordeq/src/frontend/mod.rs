//! Formulas, the reduction pipeline and equations with constraints.

pub mod equation;
pub mod formula;
pub mod pipeline;

pub use equation::{Equation, EquationKey, Solution};
pub use formula::{Formula, GroupProblem};
pub use pipeline::{
    combine_to_single_equation, eliminate_group_inequalities, eliminate_monoid_inequalities,
    folded_equations, normalize, rho_candidates, transfer_constraints_to_monoid, triangle_cases,
    triangulate, Atom, Compiled, ConstraintMode, DisjunctStream, Membership, MonoidSystem,
    ONE_AUTOMATON,
};
