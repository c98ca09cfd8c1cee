//! Numerical verification toolkit for level-set measures of
//! `E_lambda = {(x,y) : |u(x)+v(y)| >= lambda |x-y|^{N/p}}` and the
//! weak-L^p quasinorm identities they satisfy.

pub mod acceptance;
pub mod config;
pub mod experiments;
pub mod functions;
pub mod measure;
pub mod montecarlo;
pub mod parser;
pub mod quad;
pub mod report;
pub mod rng;
pub mod special;
pub mod weaknorm;

pub use functions::TestFunction;
pub use measure::{LevelSetQuery, MeasureValue};
