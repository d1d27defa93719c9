//! Exact computation of the sl(2) Kirby weight systems and the Ohtsuki series
//! they produce: Temperley-Lieb skein calculus, spin networks, chord-diagram
//! weight systems, formal Gaussian integration and Fermat limits.

pub mod chord;
pub mod error;
pub mod gauss;
pub mod invariants;
pub mod kirby;
pub mod scalar;
pub mod series;
pub mod skein;
pub mod spin;
pub mod weight;

pub use chord::{ChordDiagram, DiagramSeries, DiagramSum};
pub use error::{Error, Result};
pub use scalar::{Field, FpElem, PrimeContext, Rational, Rationals};
pub use series::{AlphaPoly, FpSeries, HbarSeries};
pub use skein::{PlanarMatching, Skein, SkeinElement};
pub use spin::{Movie, Slice, SpinGraph};
