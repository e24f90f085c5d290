//! Sublinear-time randomized greedy maximum coverage.
//!
//! Sets are black boxes that answer three questions: roughly how large
//! they are, a random member, and whether some element is a member. The
//! solver estimates marginal gains from samples, so its draw and query
//! counts depend on the number of sets and the accuracy asked for, not on
//! set sizes.
//!
//! ```
//! use maxcover::backends::SortedArraySet;
//! use maxcover::greedy::{approximate_maximum_cover, GreedyParams, Strategy};
//! use maxcover::oracle::{BiasProfile, CoverageInstance, SeedSequence, SetBackend};
//! use rand::SeedableRng;
//!
//! let sets: Vec<Box<dyn SetBackend>> = vec![
//!     Box::new(SortedArraySet::from_values([1, 2, 3])),
//!     Box::new(SortedArraySet::from_values([3, 4])),
//!     Box::new(SortedArraySet::from_values([4, 5, 6])),
//! ];
//! let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0);
//! let mut instance = CoverageInstance::from_backends(sets, 2, BiasProfile::zero(), &mut rng).unwrap();
//! let params = GreedyParams::with_xi(0.5, 0.1, 2, Strategy::SingleRound).unwrap();
//! let result = approximate_maximum_cover(&mut instance, &params, SeedSequence::new(7)).unwrap();
//! assert_eq!(result.selected.len(), 2);
//! ```

pub mod backends;
pub mod baselines;
pub mod error;
pub mod estimation;
pub mod greedy;
pub mod harness;
pub mod oracle;

pub use error::{CoverError, ParseError, Result};
pub use greedy::{approximate_maximum_cover, CoverageResult, GreedyParams, Strategy};
pub use oracle::{BackendKind, BiasProfile, CostCounters, CoverageInstance, Element, SeedSequence};
