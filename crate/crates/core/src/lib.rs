//! Learning first-order definable classifiers over relational structures
//! with local access.
//!
//! The background structure is fixed ([`structure`]). Concepts are first-order
//! formulas with counting ([`logic`]); hypotheses are unions of sphere types
//! ([`locality`]) found by the learners in [`learner`].

pub mod logic;
pub mod structure;
pub mod locality;
pub mod learner;
pub mod generators;
pub mod oracle;
pub mod pac;
