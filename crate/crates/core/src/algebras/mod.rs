//! Algebras over leveled operads, the correspondence with operads, free
//! algebras and modules.

mod classical;
mod free;
mod module;
mod structure;

pub use classical::{oper_algebra_to_operad, operad_to_oper_algebra};
pub use free::{
    canon, free_algebra, free_operad, free_terms, generator, leaf, node, substitute, term_act, term_arity, term_height,
};
pub use module::{check_module, concentrated_at_zero, module_from_action, product, regular_module, ModuleStructure};
pub use structure::{
    check_algebra, check_algebra_map, decorations, encode_entry, flats_of, planar_levels, slot_arities,
    symmetric_sequence_algebra, AlgebraStructure, Entries, LevelOperad, Table, Tables,
};
