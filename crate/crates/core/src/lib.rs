//! Online saddle-point hybrid gradient (OSPHG) for online monotone
//! DR-submodular maximization under a long-term linear budget, with the
//! window-feasible offline benchmark and post-hoc validators.
//!
//! ```
//! use osphg::{domain::FeasibleDomain, objectives::ObjectiveFunction};
//!
//! let f = ObjectiveFunction::quadratic_from_rows(&[vec![-1.0, 0.0], vec![0.0, -1.0]], vec![1.0, 1.0]).unwrap();
//! let g = f.gradient(&[0.5, 0.5]).unwrap();
//! assert_eq!(g, vec![0.5, 0.5]);
//! assert!((FeasibleDomain::unit_box(2).diameter() - 2f64.sqrt()).abs() < 1e-15);
//! ```

pub mod analysis;
pub mod benchmark;
pub mod budget;
pub mod config;
pub mod domain;
pub mod error;
pub mod experiment;
pub mod lp;
pub mod objectives;
pub mod osphg;
pub mod report;
pub mod rng;

pub use error::{Error, Result};
