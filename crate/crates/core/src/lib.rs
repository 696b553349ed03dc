//! Tuned mass damper placement and tuning on shear buildings, searched with a
//! multi-substrate coral reef optimizer.

pub mod building;
pub mod cro;
pub mod encoding;
pub mod error;
pub mod experiment;
pub mod frf;
pub mod operators;
pub mod tmd;
pub mod transient;

pub use building::{BuildingModel, DampingAnchors, ModalData, StructuralMatrices};
pub use cro::{CroParams, Objective, RunReport, TmdProblem};
pub use encoding::{Genome, Interval, SearchSpace};
pub use error::{Error, Result};
pub use frf::{FitnessEvaluator, FitnessValue, FrfConfig, FrfCurves, FrequencyGrid};
pub use operators::SubstrateTag;
pub use tmd::{TmdDesign, TmdUnit};
