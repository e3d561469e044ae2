#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod builders;
pub mod error;
pub mod inertia;
pub mod linalg;
pub mod oracle;
pub mod par;
pub mod real;
pub mod sweep;
pub mod types;
