//! Hierarchical clustering under the revenue objective.
//!
//! Given `n` points with nonnegative pairwise similarities `w_ij`, a
//! hierarchical clustering is a rooted binary tree `T` with the points as
//! leaves. Its revenue is
//!
//! ```text
//! R(T) = sum over edges {i, j} of w_ij * (n - |T_ij|)
//! ```
//!
//! where `|T_ij|` counts the leaves below the least common ancestor of `i`
//! and `j`. Similar points should be separated as low in the tree as
//! possible.
//!
//! The crate provides
//!
//! - [`instance`]: similarity graphs, generators and the edge-list format;
//! - [`hctree`]: trees, revenue, Dasgupta cost and depth-two bisection trees;
//! - [`ordering`]: planar leaf orderings and the derandomized ordering whose
//!   total weighted position distance is at most half the Dasgupta cost;
//! - [`mub`]: max-uncut bisection solvers (exact, local search, random);
//! - [`algos`]: random halving, average linkage, bisection-then-random and
//!   the extraction of a bisection worth half of a given tree's revenue;
//! - [`oracle`]: exhaustive optimal trees and Monte Carlo estimators.
//!
//! All objective values are exact ([`Weight`] is fixed-point with nine
//! decimal places), so bounds like "a bisection earns at least half the
//! optimum" are checked without tolerances.
//!
//! ```
//! use hcrevenue::{algos, hctree, instance, mub, oracle};
//!
//! let g = instance::gen_matching(6).unwrap();
//! let opt = oracle::opt_tree_bruteforce(&g).unwrap();
//! assert_eq!(opt.optimum.to_string(), "12");
//!
//! // the best bisection keeps half of the optimum
//! let best = mub::mub_exact(&g).unwrap();
//! let bisection = mub::bisection_revenue(&g, &best).unwrap();
//! assert!(bisection.times(2) >= opt.optimum);
//!
//! let t = algos::bisect_then_random(&g, algos::MubSolver::Exact, 7).unwrap();
//! assert!(hctree::revenue(&g, &t).unwrap() <= opt.optimum);
//! ```
//!
//! A longer walk-through lives in the guide under `book/`.

pub mod algos;
mod error;
pub mod hctree;
pub mod instance;
pub mod mub;
pub mod oracle;
pub mod ordering;
pub mod weight;

pub use error::{Error, Result};
pub use weight::Weight;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../README.md")]
    mod readme {}
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/instances.md")]
    mod instances {}
    #[doc = include_str!("../../../book/src/trees.md")]
    mod trees {}
    #[doc = include_str!("../../../book/src/orderings.md")]
    mod orderings {}
    #[doc = include_str!("../../../book/src/bisections.md")]
    mod bisections {}
    #[doc = include_str!("../../../book/src/algorithms.md")]
    mod algorithms {}
    #[doc = include_str!("../../../book/src/oracles.md")]
    mod oracles {}
}
