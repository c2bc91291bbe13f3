//! Exact computations with linear syzygies of quadric-generated ideals over
//! prime fields: linear strands, syzygy ranks and schemes, generic syzygy
//! models, Grassmannian Pfaffian geometry and the associated count formulas.

pub mod bott;
pub mod error;
pub mod exactla;
pub mod exterior;
pub mod gensyz;
pub mod grass;
pub mod ideal_io;
pub mod polyring;
pub mod rep;
pub mod syzygy;

pub use error::{Error, Result};
pub use exactla::{Matrix, PrimeField, Subspace};
pub use polyring::{GradedSubspace, HilbertReport, Poly, QuadricIdeal};
