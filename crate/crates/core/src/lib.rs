//! Curvature tensors, generalized curvature families and pseudosymmetry
//! fitting on manifolds carrying a unit vector field of constant nullity.

pub mod config;
pub mod derive;
pub mod error;
pub mod expr;
pub mod family;
pub mod geometry;
pub mod nk;
pub mod pseudosym;
pub mod suites;
pub mod tensors;

pub use derive::{derive, q_op, CurvOp};
pub use error::{Error, ExprError, Result, TensorError};
pub use expr::{parse, Expr};
pub use family::{coefficients, CoeffVector, FreeParams, Preset};
pub use geometry::{frame, ManifoldSpec, PointFrame};
pub use nk::{builtin, builtin_registry, ClassTag, NkFrame, RegistryEntry, UnitField};
pub use pseudosym::{fit_l, ConditionKind, ConditionSpec, FitReport, LSummary, Verdict};
pub use tensors::{MetricPair, Tensor, Variance};
