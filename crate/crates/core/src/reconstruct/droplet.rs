//! The droplet: the partially reconstructed rectangle, held on a canvas
//! large enough for the droplet to grow `n` cells in any direction from its
//! seed plus lookahead margins.

use crate::grid::BitGrid;
use crate::kgrid::{KGrid, MAX_K};

#[derive(Clone, Copy, Debug)]
enum Undo {
    Cell(u32, u32),
    Window(u32, u32),
}

#[derive(Clone, Debug)]
pub(crate) struct Droplet {
    k: usize,
    values: BitGrid,
    known: BitGrid,
    /// Top-left corners of windows already taken from the deck.
    committed: BitGrid,
    pub(crate) top: usize,
    pub(crate) left: usize,
    pub(crate) height: usize,
    pub(crate) width: usize,
    undo: Vec<Undo>,
    marks: Vec<usize>,
}

impl Droplet {
    /// An empty droplet whose first window will sit at `(origin, origin)`.
    pub(crate) fn new(n: usize, k: usize) -> Self {
        let origin = Self::origin(n, k);
        let dim = 2 * origin + 2 * k;
        Droplet {
            k,
            values: BitGrid::new(dim, dim),
            known: BitGrid::new(dim, dim),
            committed: BitGrid::new(dim, dim),
            top: origin,
            left: origin,
            height: 0,
            width: 0,
            undo: Vec::new(),
            marks: Vec::new(),
        }
    }

    pub(crate) fn origin(n: usize, k: usize) -> usize {
        n + 4 * k + 4
    }

    #[inline]
    pub(crate) fn k(&self) -> usize {
        self.k
    }

    #[inline]
    pub(crate) fn is_committed(&self, r: usize, c: usize) -> bool {
        self.committed.get(r, c)
    }

    #[inline]
    pub(crate) fn value_bits(&self, r: usize, c: usize, len: usize) -> u64 {
        self.values.row_bits(r, c, len)
    }

    #[inline]
    pub(crate) fn known_bits(&self, r: usize, c: usize, len: usize) -> u64 {
        self.known.row_bits(r, c, len)
    }

    /// The window at `(r, c)` if all of its cells are known.
    pub(crate) fn known_window(&self, r: usize, c: usize) -> Option<KGrid> {
        let k = self.k;
        let full = (1u64 << k) - 1;
        let mut rows = [0u16; MAX_K];
        for (i, row) in rows.iter_mut().enumerate().take(k) {
            if self.known.row_bits(r + i, c, k) != full {
                return None;
            }
            *row = self.values.row_bits(r + i, c, k) as u16;
        }
        Some(KGrid::from_raw(k, rows))
    }

    /// Writes `g` at `(r, c)` and records the window as taken from the deck.
    pub(crate) fn place(&mut self, r: usize, c: usize, g: &KGrid) {
        for i in 0..self.k {
            for j in 0..self.k {
                let v = g.get(i, j);
                if self.known.get(r + i, c + j) {
                    debug_assert_eq!(
                        self.values.get(r + i, c + j),
                        v,
                        "placement contradicts droplet"
                    );
                } else {
                    self.known.set(r + i, c + j, true);
                    self.values.set(r + i, c + j, v);
                    self.log(Undo::Cell((r + i) as u32, (c + j) as u32));
                }
            }
        }
        self.mark_committed(r, c);
    }

    pub(crate) fn mark_committed(&mut self, r: usize, c: usize) {
        debug_assert!(!self.committed.get(r, c), "window committed twice");
        self.committed.set(r, c, true);
        self.log(Undo::Window(r as u32, c as u32));
    }

    fn log(&mut self, u: Undo) {
        if !self.marks.is_empty() {
            self.undo.push(u);
        }
    }

    pub(crate) fn checkpoint(&mut self) -> usize {
        self.marks.push(self.undo.len());
        self.marks.len() - 1
    }

    pub(crate) fn rollback(&mut self, depth: usize) {
        let mark = self.marks[depth];
        for u in self.undo.drain(mark..).rev() {
            match u {
                Undo::Cell(r, c) => {
                    self.known.set(r as usize, c as usize, false);
                    self.values.set(r as usize, c as usize, false);
                }
                Undo::Window(r, c) => self.committed.set(r as usize, c as usize, false),
            }
        }
        self.marks.truncate(depth);
    }

    pub(crate) fn release(&mut self, depth: usize) {
        self.marks.truncate(depth);
        if self.marks.is_empty() {
            self.undo.clear();
        }
    }

    /// The current droplet rectangle.
    pub(crate) fn to_grid(&self) -> BitGrid {
        self.values
            .crop(self.top, self.left, self.height, self.width)
    }

    pub(crate) fn dim(&self) -> usize {
        self.values.rows()
    }
}
