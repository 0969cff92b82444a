// Negated float comparisons are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod clustering;
pub mod data_io;
pub mod dispatch;
pub mod evaluation;
pub mod linalg;
pub mod lp;
pub mod plot;
