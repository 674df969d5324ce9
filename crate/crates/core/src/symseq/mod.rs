//! Symmetric sequences, composition products and one-colored operads.

mod circle;
mod gen;
mod operad;
mod relative;
mod seq;

pub use circle::{
    act_circle, assoc_left, assoc_right, circle, circle_component, circle_hat, circle_map, circle_with,
    coset_representatives, is_coset_least, left_unit_map, normalize, orbit_types, right_unit_inverse, right_unit_map,
    CircleOpts, HatFamily,
};
pub use gen::{orbit_seq, random_reduced, OrbitKind};
pub use operad::{ass, check_operad_map, com, OperadData, Report, Witness};
pub use relative::{relative_circle, Bimodule, Quotient};
pub use seq::{SeqMap, SymSeq};
