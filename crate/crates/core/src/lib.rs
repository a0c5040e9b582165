//! Numerics for the completed Riemann xi function and the completed
//! Dirichlet L-function of the character mod 4: evaluation, critical-line
//! zeros, and de Branges positivity probes.

pub mod error;
pub mod scaled;
pub mod special;
pub mod completed;
pub mod zeros;
pub mod positivity;

pub use error::{Error, Result};
pub use completed::{CompletedFunction, LFunctionKind};
pub use scaled::{Decimal, ScaledComplex};
pub use zeros::{ZeroCache, ZeroFinder, ZeroRecord, ZeroTable};
pub use positivity::{GramReport, HerglotzScan, KernelVerdict, Positivity, ScanRow};
