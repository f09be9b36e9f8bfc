//! Cohomology of `CP^1`, the two index formulas, idempotent lifting and the
//! trace comparison that pins `theta` and `beta`.

mod checks;
mod cohomology;
mod idempotent;

pub use checks::{beta_check, index_check, smallest_liftable_level, BetaReport, IndexReport, TraceFit, COEFF_TOL, TRACE_TOL};
pub use cohomology::{
    a_hat_cp1, formal_index, gq_index_polynomial, tangent_chern_class, theta_class, todd_cp1, CharacterData, CohoClass, Laurent,
};
pub use idempotent::{bott_projector, idempotent_by_name, lift_idempotent, ClassicalIdempotent, Lift, BOTT_DEGREE_SIGN, DEFAULT_GAP};
