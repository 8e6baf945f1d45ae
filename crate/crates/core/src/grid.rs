//! Bit-packed rectangular grids and square pictures.
//!
//! Rows are packed into `u64` words, least significant bit = leftmost
//! column. [`BitGrid`] is 0-indexed; [`Picture`] exposes 1-indexed
//! coordinates with row 1 at the top, so fixtures can be transcribed from
//! drawings cell for cell.

use std::fmt;

use rand::RngCore;

use crate::error::{Error, Result};
use crate::kgrid::{KGrid, MAX_K};
use crate::rng;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitGrid {
    rows: usize,
    cols: usize,
    stride: usize,
    words: Vec<u64>,
}

impl BitGrid {
    pub fn new(rows: usize, cols: usize) -> Self {
        let stride = cols.div_ceil(64).max(1);
        BitGrid {
            rows,
            cols,
            stride,
            words: vec![0; stride * rows],
        }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> bool) -> Self {
        let mut g = BitGrid::new(rows, cols);
        for r in 0..rows {
            for c in 0..cols {
                if f(r, c) {
                    g.set(r, c, true);
                }
            }
        }
        g
    }

    /// Builds a grid from rows of `0`/`1` values. Panics on ragged input.
    pub fn from_rows<R: AsRef<[u8]>>(rows: &[R]) -> Self {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        assert!(rows.iter().all(|r| r.as_ref().len() == cols), "ragged rows");
        BitGrid::from_fn(rows.len(), cols, |r, c| rows[r].as_ref()[c] != 0)
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> bool {
        debug_assert!(r < self.rows && c < self.cols);
        (self.words[r * self.stride + c / 64] >> (c % 64)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: bool) {
        debug_assert!(r < self.rows && c < self.cols);
        let w = &mut self.words[r * self.stride + c / 64];
        let bit = 1u64 << (c % 64);
        if v {
            *w |= bit;
        } else {
            *w &= !bit;
        }
    }

    /// `len` (≤ 64) consecutive cells of row `r` starting at column `c`,
    /// cell `c` in the least significant bit.
    #[inline]
    pub fn row_bits(&self, r: usize, c: usize, len: usize) -> u64 {
        debug_assert!(len <= 64 && c + len <= self.cols);
        if len == 0 {
            return 0;
        }
        let base = r * self.stride + c / 64;
        let off = c % 64;
        let mut v = self.words[base] >> off;
        if off + len > 64 {
            v |= self.words[base + 1] << (64 - off);
        }
        if len == 64 {
            v
        } else {
            v & ((1u64 << len) - 1)
        }
    }

    /// Writes `len` (≤ 64) cells of row `r` from the low bits of `bits`.
    pub fn set_row_bits(&mut self, r: usize, c: usize, len: usize, bits: u64) {
        for i in 0..len {
            self.set(r, c + i, (bits >> i) & 1 == 1);
        }
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// The `rows × cols` sub-rectangle with top-left cell `(r, c)`.
    pub fn crop(&self, r: usize, c: usize, rows: usize, cols: usize) -> BitGrid {
        assert!(r + rows <= self.rows && c + cols <= self.cols);
        BitGrid::from_fn(rows, cols, |i, j| self.get(r + i, c + j))
    }

    /// The k×k window with 0-based top-left `(r, c)`.
    pub(crate) fn window(&self, r: usize, c: usize, k: usize) -> KGrid {
        let mut rows = [0u16; MAX_K];
        for (i, row) in rows.iter_mut().enumerate().take(k) {
            *row = self.row_bits(r + i, c, k) as u16;
        }
        KGrid::from_raw(k, rows)
    }

    pub(crate) fn words_mut(&mut self) -> &mut [u64] {
        &mut self.words
    }

    pub(crate) fn stride(&self) -> usize {
        self.stride
    }
}

impl fmt::Debug for BitGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BitGrid {}x{}", self.rows, self.cols)?;
        for r in 0..self.rows {
            for c in 0..self.cols {
                f.write_str(if self.get(r, c) { "1" } else { "0" })?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// A square binary picture of side `n ≥ 1`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Picture {
    grid: BitGrid,
}

impl Picture {
    pub fn zeros(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Input("picture size must be at least 1".into()));
        }
        Ok(Picture {
            grid: BitGrid::new(n, n),
        })
    }

    pub fn from_grid(grid: BitGrid) -> Result<Self> {
        if grid.rows() == 0 || grid.rows() != grid.cols() {
            return Err(Error::Input(format!(
                "picture must be square and non-empty, got {}x{}",
                grid.rows(),
                grid.cols()
            )));
        }
        Ok(Picture { grid })
    }

    /// Convenience constructor from rows of 0/1 values, top row first.
    pub fn from_rows<R: AsRef<[u8]>>(rows: &[R]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.as_ref().len() != n) {
            return Err(Error::Input("picture rows must all have length n".into()));
        }
        Picture::from_grid(BitGrid::from_rows(rows))
    }

    /// Picture number `index` in the enumeration of all `2^(n²)` pictures:
    /// bit `i` of `index` is the cell at row-major position `i`.
    pub fn from_index(n: usize, index: u64) -> Self {
        assert!(n >= 1 && n * n <= 64);
        Picture {
            grid: BitGrid::from_fn(n, n, |r, c| (index >> (r * n + c)) & 1 == 1),
        }
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.grid.rows()
    }

    /// Cell value at 1-indexed `(row, col)`.
    pub fn cell(&self, row: usize, col: usize) -> bool {
        assert!(
            (1..=self.n()).contains(&row) && (1..=self.n()).contains(&col),
            "cell ({row},{col}) outside picture of size {}",
            self.n()
        );
        self.grid.get(row - 1, col - 1)
    }

    pub fn set_cell(&mut self, row: usize, col: usize, v: bool) {
        assert!((1..=self.n()).contains(&row) && (1..=self.n()).contains(&col));
        self.grid.set(row - 1, col - 1, v);
    }

    pub fn as_grid(&self) -> &BitGrid {
        &self.grid
    }

    /// The k×k window whose top-left cell is the 1-indexed `(row, col)`.
    pub fn subgrid(&self, row: usize, col: usize, k: usize) -> Result<KGrid> {
        let n = self.n();
        if k == 0 || k > MAX_K {
            return Err(Error::Range(format!("window side {k} not in 1..={MAX_K}")));
        }
        if k > n || row == 0 || col == 0 || row > n - k + 1 || col > n - k + 1 {
            return Err(Error::Input(format!(
                "window ({row},{col}) of side {k} does not fit in picture of size {n}"
            )));
        }
        Ok(self.grid.window(row - 1, col - 1, k))
    }

    pub fn count_ones(&self) -> usize {
        self.grid.count_ones()
    }

    /// Row-major cell index used by [`Picture::from_index`]; only for `n² ≤ 64`.
    pub fn to_index(&self) -> u64 {
        let n = self.n();
        assert!(n * n <= 64);
        let mut idx = 0u64;
        for r in 0..n {
            for c in 0..n {
                if self.grid.get(r, c) {
                    idx |= 1 << (r * n + c);
                }
            }
        }
        idx
    }
}

impl fmt::Debug for Picture {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Picture(n={}) ", self.n())?;
        self.grid.fmt(f)
    }
}

/// A uniformly random picture of side `n`, deterministic in `seed` for the
/// generator named by [`rng::GENERATOR`].
pub fn random_picture(n: usize, seed: u64) -> Result<Picture> {
    let mut pic = Picture::zeros(n)?;
    let mut rng = rng::generator(seed);
    let tail = n % 64;
    let stride = pic.grid.stride();
    for (i, w) in pic.grid.words_mut().iter_mut().enumerate() {
        *w = rng.next_u64();
        if tail != 0 && i % stride == stride - 1 {
            *w &= (1u64 << tail) - 1;
        }
    }
    Ok(pic)
}
