//! Daily Value-at-Risk and Expected Shortfall from intraday minute bars.
//!
//! The estimation pipeline runs day by day:
//!
//! 1. subordination — transform the 390 minute returns into c returns of
//!    equal market activity (clock, tri-power variation, or volume clock);
//! 2. optional MA(1) filtering of microstructural lag-one autocorrelation;
//! 3. Student-t fitting of the returns or innovations, with the location
//!    fixed a priori (zero or an EMA of past daily returns);
//! 4. scaling to the daily horizon along two routes — characteristic-function
//!    inversion (Gil-Pelaez) and antithetic Monte Carlo — plus their ensemble
//!    average, or the realized-quantile benchmark (c^H scaling, H = 1/2).
//!
//! Supporting modules cover self-similarity diagnostics (structure function,
//! Ljung-Box), synthetic panels with analytic or Monte-Carlo ground truth,
//! backtesting (hits frequency, Z1/Z2 bootstrap ES tests, rolling AR(1)/EMA/RW
//! forecast losses), and a reproducible batch pipeline.
//!
//! Interchangeable strategies (subordinators, risk estimators, forecasters)
//! live behind traits and are selected by registry name at runtime.

pub mod dh;
pub mod diagnostics;
pub mod error;
pub mod estimator;
pub mod evaluation;
pub mod intraday_model;
pub mod market_data;
pub mod num;
pub mod pipeline;
pub mod scaling;
pub mod seed;
pub mod stats;
pub mod subordinator;
pub mod synthetic;

pub use error::{Error, ErrorKind, Result};
