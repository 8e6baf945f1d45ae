//! Reconstruction of square binary pictures from the multiset of their
//! k×k subgrids.

pub mod analysis;
pub mod deck;
pub mod diagnostics;
pub mod error;
pub mod format;
pub mod grid;
pub mod index;
pub mod kgrid;
pub mod oracle;
pub mod reconstruct;
pub mod rng;

pub use deck::{deck, infer_n, Deck};
pub use error::{Error, Result};
pub use grid::{random_picture, BitGrid, Picture};
pub use index::{Checkpoint, DeckIndex};
pub use kgrid::{KGrid, OverlapKey, Side, MAX_K};
pub use reconstruct::{reconstruct, Outcome, ReconstructionResult, Stage};
