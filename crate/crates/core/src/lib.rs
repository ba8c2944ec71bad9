//! Iterated rational maps over prime fields: exact image sizes, periodic
//! points and fibers, fixed-point proportions of iterated wreath products,
//! and the explicit error terms that link the two.

pub mod dynamics;
pub mod ffield;
pub mod groups;
pub mod interval;
pub mod polyfp;
pub mod ratio;
pub mod theory;
