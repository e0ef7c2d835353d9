//! Canonical frames, rotation coefficients and genus-1 data for semisimple
//! Frobenius manifolds, with numerical identity suites.

pub mod calculus;
pub mod descendants;
pub mod error;
pub mod frame;
pub mod genus1;
pub mod model;
pub mod numeric;
pub mod verify;

pub use calculus::{correlator, correlator_tensor, quantum_product, CorrelatorTensor, EvalPoint, QuantumProduct};
pub use descendants::{Expr, Reducer, RewriteMode, VectorFieldExpr};
pub use error::{Error, Result};
pub use frame::{canonical_frame, match_frames, CanonicalFrame, FrameOptions};
pub use genus1::{genus1_onepoint, phi};
pub use model::{builtin_catalog, load_model, FrobeniusModel, PotentialExpr, Term};
pub use numeric::{CMatrix, C64};
pub use verify::{run_suite, SuiteSpec, VerificationReport};
