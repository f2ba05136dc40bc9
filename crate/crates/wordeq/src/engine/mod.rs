//! Solution checking, the three moves of the search graph, free-interval
//! analysis, periodicity and the certificate construction.

pub mod factorization;
pub mod intervals;
pub mod moves;
pub mod periodicity;
pub mod transform;

pub use factorization::{critical_words, head_body_tail, l_factorize, Block, LFactorization};
pub use intervals::{
    compute_cuts, maximal_free_factorization, CutData, FreeFactorization, IntervalAnalysis,
    Occurrence,
};
pub use moves::{
    apply_base_change, apply_partial_solution, apply_projection, projection_exists, pull_back_path,
    verify_arc, Arc, BaseChange, Delta, PartialSolution, Projection,
};
pub use periodicity::{
    exponent_of_periodicity, is_primitive, p_stable_normal_form, NfKind, PStableNF,
};
pub use transform::{
    admissibility_budget, build_certificate_path, compress_l_factor, is_admissible,
    l_transformation, CertConfig, CertPath, Level,
};

use crate::error::Result;
use crate::frontend::{Equation, Solution};

/// True iff `sigma` solves `e`, including `rho` and residual checks.
pub fn check_solution(e: &Equation, sigma: &Solution, cap: u64) -> Result<bool> {
    e.check_solution(sigma, cap)
}
