//! Uniform convexity in `lp`, line fits in Banach spaces and in the
//! Heisenberg group, and the bad-set experiment.

mod bad_set;
mod banach;
mod heisenberg;
mod modulus;

pub use bad_set::{bad_set_experiment, bad_set_fractions, measure_mr, BadSetBall, BadSetOptions, BadSetPoint, BadSetReport};
pub use banach::{beta_banach, dist_to_line, lineconvexity_check, min_width_beta, BetaBanach, LineConvexity};
pub use heisenberg::{beta_heisenberg, dist_to_horizontal_line, BetaH, HorizontalLine};
pub use modulus::{convexity_profile, hanner_modulus, modulus_of_convexity, ConvexityProfile};
