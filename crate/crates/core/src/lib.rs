//! Exact and precision-tracked arithmetic for Carlitz-module special values:
//! zeta values, the geometric Gamma function, the Carlitz period and the
//! Frobenius difference equations they satisfy.

pub mod carlitz;
pub mod context;
pub mod error;
pub mod ext;
pub mod factor;
pub mod fq;
pub mod gamma;
pub mod linalg;
pub mod motives;
pub mod par;
pub mod poly;
pub mod rational;
pub mod recognize;
pub mod series;
pub mod tower;
pub mod zeta;

pub use context::{Config, Context};
pub use error::{Error, Result};
pub use ext::ExtScalar;
pub use fq::{Fe, Fq};
pub use poly::{Poly, Var};
pub use rational::RationalFunction;
pub use series::{PrecSeries, Valuation};
pub use tower::{Level, TowerScalar};
