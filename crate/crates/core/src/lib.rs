//! Exact computation of classical and inverted Kloosterman sums over finite
//! fields as cyclotomic integers, together with their Galois orbits, algebraic
//! degrees, Gauss-sum expansions, and π-adic valuations.

pub mod arith;
pub mod census;
pub mod charsum;
pub mod cyclo;
pub mod ff;
pub mod galois;
pub mod padic;
pub mod poly;
mod ser;
pub mod verify;

pub use charsum::{CharSpec, CharSumError, SumContext, SumValue};
pub use cyclo::{CycInt, CycloError, Embedding};
pub use ff::{Field, FieldElt, FieldError};
pub use galois::{GaloisError, OrbitReport};
pub use padic::{CaseLabel, CaseReport, PadicElt, PadicEmbedding, PadicError};
pub use poly::{cyclotomic_poly, IntPoly};
