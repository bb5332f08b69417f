//! Point symmetries of the pseudo-diffusion equation and the Lie algebras they generate.

pub mod classify;
pub mod criterion;
pub mod generators;
pub mod involution;
pub mod laurent;
pub mod structure;
pub mod table;
pub mod virasoro;

pub use classify::*;
pub use criterion::*;
pub use generators::*;
pub use involution::*;
pub use laurent::Laurent;
pub use structure::*;
pub use table::*;
pub use virasoro::*;
