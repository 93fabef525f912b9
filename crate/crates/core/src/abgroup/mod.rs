//! Finitely generated abelian groups, gradings and finite extensions.

pub mod extensions;
pub mod graded;
pub mod group;

pub use extensions::{enumerate_extensions, groups_of_order, DEFAULT_EXTENSION_BOUND};
pub use graded::GradedGroup;
pub use group::FgAbelianGroup;
