//! Directed groups of rooted-tree automorphisms: rewriting, word problem,
//! random walks and exponent sequences.

pub mod delta_ext;
pub mod error;
pub mod exponents;
pub mod group_model;
pub mod lamplighter_ref;
pub mod perm;
pub mod walker;
#[cfg(any(test, feature = "testkit"))]
pub mod testkit;
pub mod words;

pub use delta_ext::{DeltaSpec, FreeProductWord, RootGroup};
pub use error::{Error, Result};
pub use exponents::{Beta, DesignTarget, ExponentProfile};
pub use group_model::{act_ray, act_vertex, build_group, expand_directed, GroupConfig, GroupSpec, Ray};
pub use perm::{FiniteGroup, Perm};
pub use words::{canonical_alternate, AlternateWord, CanonicalForm, Letter};
