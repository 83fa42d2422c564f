//! Hitting sets, packings and colourings for families of rotated squares.

pub mod geometry;
pub mod hitters;
pub mod patches;
pub mod approx;
pub mod solvers;
pub mod constructions;
pub mod io;

pub use geometry::{Point, Square, SquareFamily, Tolerance};
