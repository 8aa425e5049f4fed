//! Squarefree ternary words and arithmetic-progression constraints:
//! square detection, word morphisms and their squarefreeness verdicts,
//! 2-DFAO machinery, constrained backtracking search, a catalog of named
//! morphisms shipped as verified data assets, and subsequence embedding
//! via a multi-valued morphism.

pub mod automatic;
pub mod catalog;
pub mod embed;
mod error;
pub mod morphism;
pub mod report;
pub mod search;
pub mod sqf;
pub mod stream;
pub mod verify;
pub mod words;

pub use error::{Error, Result};
pub use morphism::{tau, tau_cubed, vtm, Morphism, MultiMorphism, Permutation};
pub use stream::WordStream;
pub use words::{Alphabet, Letter, Square, Word};
