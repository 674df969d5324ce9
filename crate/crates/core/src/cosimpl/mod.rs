//! Truncated cosimplicial objects, box products and `∘̊`-monoids.

mod boxprod;
mod gen;
mod grouped;
mod monoid;
mod object;
mod theta;

pub use boxprod::{box_product, boxcirc, boxcirc_chain, BoxProduct, Pairing};
pub use gen::{constant_set, coproduct_sets, random_cosimplicial_set, sigma_free, standard_simplex};
pub use grouped::{sigma_free_mu, CoTable, Grouped};
pub use monoid::{build_co, build_constant_monoid, check_boxcirc_monoid, check_coaugmentation, BoxcircMonoid};
pub use object::{sigma_free_factor, validate_cosimplicial, TruncCosimplicial};
pub use theta::{check_grouping, sigma_free_mu_triple, ThetaReport, Triple};
