//! Grover-search training circuits for a single threshold neuron.
//!
//! The oracle is compiled from the neuron's activation rule with reversible
//! adders, amplitude amplification runs on an exact dense state-vector
//! simulator, and every outcome is checked against a brute-force classical
//! solver.
//!
//! ```
//! use grover_perceptron::grover::{run_weight_search, Iterations};
//! use grover_perceptron::perceptron::Predicate;
//! use grover_perceptron::qarith::ProblemSpec;
//!
//! let spec = ProblemSpec::new(2, 2, 3, Predicate::Equal).unwrap();
//! let run = run_weight_search(&spec, &[true, true], Iterations::Auto).unwrap();
//! assert_eq!(run.plan.iterations, 1);
//! assert!((run.search_marginal.get("01 10").unwrap() - 0.25).abs() < 1e-9);
//! ```

pub mod cli;
pub mod error;
pub mod grover;
pub mod perceptron;
pub mod qarith;
pub mod statevector;

pub use error::{Error, Result};
