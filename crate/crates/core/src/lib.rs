//! Ground-state solver for one-dimensional Schrödinger problems built on a
//! convergent iteration around a trial function, with runtime checks of the
//! monotone and alternating bounds it produces.

pub mod grid;
pub mod trialgen;
pub mod hierarchy;
pub mod oracle;
pub mod squarewell;
