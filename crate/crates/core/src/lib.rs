//! Liouville interpolation systems over three-dimensional flows: bi-contact
//! pairs, their Liouville fields and skeletons, the DA deformation chart, and
//! regularity diagnostics.

pub mod da;
pub mod dynamics;
pub mod error;
pub mod expr;
pub mod field;
pub mod forms;
pub mod jet;
pub mod lis;
pub mod models;
pub mod ode;
pub mod regularity;
pub mod sampling;

pub use error::{LisError, Result};
pub use lis::InterpolationSystem;
pub use models::{FlowModel, Point};
