//! Leveled objects over profiles, their composition products, and the
//! leveled operads built from symmetric sequences.

mod coend;
mod flat;
mod object;
mod odot;
mod oper;
mod sym;

pub use coend::{coend_operad, CoEnd, CoEndKey, Quadratic, Tree};
pub use flat::{graft, renormalize, slot_order, Flat, Places};
pub use object::{Key, NLevObject};
pub use odot::{
    assoc_backward, assoc_forward, check_monoidal, left_unit, left_unit_inverse, monoidal_tables, odot, odot_elems,
    right_unit, right_unit_inverse, BijectionTable, Bounds, Mapped, OdotElem,
};
pub use oper::{decorate, forget_to_colored, ColoredTable, Oper, OperKey, XiSummary};
pub use sym::{
    odot_sigma, partner, sigma_classes, sigma_groups, sigma_groups_for, Classes, Decomp, KeyActions, RightGen,
    SigmaGroup, SymNLevObject,
};
