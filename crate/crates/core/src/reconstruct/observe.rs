//! Hooks for instrumenting a reconstruction run.
//!
//! Coordinates in events are in the droplet frame: fixed for the whole run,
//! with the same orientation as the picture, but with an arbitrary origin.

use crate::grid::BitGrid;
use crate::kgrid::KGrid;

use super::{Corner, Direction};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PlacementKind {
    /// The first element of the random order.
    Initial,
    /// Naive extension (initial band growth and boundary-step corners).
    Naive,
    Internal,
    Corner,
    /// A window implied by placed neighbours and deleted from the deck.
    Leftover,
}

/// An assembled lookahead block, captured for corner placements.
#[derive(Clone, Debug)]
pub struct LookaheadBlock {
    pub row0: usize,
    pub col0: usize,
    pub cells: BitGrid,
    /// Block offset of the window that was placed.
    pub commit: (usize, usize),
}

#[derive(Clone, Debug)]
pub struct Placement<'a> {
    pub kind: PlacementKind,
    pub direction: Option<Direction>,
    pub corner: Option<Corner>,
    pub row: usize,
    pub col: usize,
    pub grid: KGrid,
    pub block: Option<&'a LookaheadBlock>,
}

/// Receives every deck removal and every checkpoint transition.
///
/// `checkpoint`/`rollback`/`release` nest exactly like the reconstruction's
/// own undo stack; placements reported between a `checkpoint` and its
/// `rollback` have been undone.
pub trait Observer {
    /// Whether corner placements should carry their lookahead block.
    fn wants_blocks(&self) -> bool {
        false
    }
    fn placed(&mut self, _p: &Placement<'_>) {}
    fn checkpoint(&mut self) {}
    fn rollback(&mut self) {}
    fn release(&mut self) {}
}

impl Observer for () {}

impl<O: Observer + ?Sized> Observer for &mut O {
    fn wants_blocks(&self) -> bool {
        (**self).wants_blocks()
    }
    fn placed(&mut self, p: &Placement<'_>) {
        (**self).placed(p)
    }
    fn checkpoint(&mut self) {
        (**self).checkpoint()
    }
    fn rollback(&mut self) {
        (**self).rollback()
    }
    fn release(&mut self) {
        (**self).release()
    }
}
