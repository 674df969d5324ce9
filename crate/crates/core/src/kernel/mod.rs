//! Permutations, block subgroups, finite (pointed) sets and group actions.

mod group;
mod obj;
mod perm;
mod uf;

pub use group::{h_subgroup, is_subgroup, size_preserving_perms, wreath, BlockSubgroup};
pub use obj::{coproduct_obj, orbit_quotient, right_unitor, tensor_obj, Comp, Elem, FinObj, GObj, Mode, Orbits};
pub use perm::{block_sum, block_sum_ids, direct_sum, Perm};
pub use uf::UnionFind;

pub fn compose_perms(a: &Perm, b: &Perm) -> crate::error::Result<Perm> {
    a.compose(b)
}
