//! k×k binary windows with a canonical 256-bit packing.

use std::cmp::Ordering;
use std::fmt;

use crate::error::{Error, Result};
use crate::grid::BitGrid;

/// Largest supported window side; a window packs into `MAX_K` rows of 16 bits.
pub const MAX_K: usize = 16;

/// A k×k window. Row `r` is stored in `rows[r]` with column 0 in the least
/// significant bit; unused rows and high bits are zero.
///
/// Ordering is lexicographic on the row-major `0`/`1` string, which is the
/// order used by deck files.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct KGrid {
    k: u8,
    rows: [u16; MAX_K],
}

impl KGrid {
    pub(crate) fn from_raw(k: usize, rows: [u16; MAX_K]) -> Self {
        debug_assert!((1..=MAX_K).contains(&k));
        debug_assert!(rows.iter().skip(k).all(|&r| r == 0));
        debug_assert!(rows.iter().all(|&r| k == 16 || r >> k == 0));
        KGrid { k: k as u8, rows }
    }

    /// Builds a window from rows of 0/1 values.
    pub fn from_rows<R: AsRef<[u8]>>(rows: &[R]) -> Result<Self> {
        let k = rows.len();
        check_k(k)?;
        let mut packed = [0u16; MAX_K];
        for (r, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            if row.len() != k {
                return Err(Error::Input(format!(
                    "window row {r} has length {}, expected {k}",
                    row.len()
                )));
            }
            for (c, &v) in row.iter().enumerate() {
                match v {
                    0 => {}
                    1 => packed[r] |= 1 << c,
                    _ => return Err(Error::Input(format!("cell value {v} is not 0 or 1"))),
                }
            }
        }
        Ok(KGrid::from_raw(k, packed))
    }

    /// Parses the k²-character row-major `0`/`1` string.
    pub fn from_bit_string(k: usize, s: &str) -> Result<Self> {
        check_k(k)?;
        if s.len() != k * k {
            return Err(Error::Input(format!(
                "window string has length {}, expected {}",
                s.len(),
                k * k
            )));
        }
        let mut packed = [0u16; MAX_K];
        for (i, ch) in s.bytes().enumerate() {
            match ch {
                b'0' => {}
                b'1' => packed[i / k] |= 1 << (i % k),
                _ => return Err(Error::Input(format!("illegal character {:?}", ch as char))),
            }
        }
        Ok(KGrid::from_raw(k, packed))
    }

    pub fn from_grid(g: &BitGrid) -> Result<Self> {
        if g.rows() != g.cols() {
            return Err(Error::Input("window must be square".into()));
        }
        check_k(g.rows())?;
        Ok(g.window(0, 0, g.rows()))
    }

    #[inline]
    pub fn k(&self) -> usize {
        self.k as usize
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> bool {
        (self.rows[r] >> c) & 1 == 1
    }

    /// Row `r`, column 0 in the least significant bit.
    #[inline]
    pub fn row(&self, r: usize) -> u16 {
        self.rows[r]
    }

    /// Column `c`, row 0 in the least significant bit.
    pub fn col(&self, c: usize) -> u16 {
        (0..self.k()).fold(0, |acc, r| acc | (((self.rows[r] >> c) & 1) << r))
    }

    #[inline]
    pub(crate) fn raw_rows(&self) -> &[u16; MAX_K] {
        &self.rows
    }

    pub fn to_bit_string(&self) -> String {
        let k = self.k();
        let mut s = String::with_capacity(k * k);
        for r in 0..k {
            for c in 0..k {
                s.push(if self.get(r, c) { '1' } else { '0' });
            }
        }
        s
    }

    pub fn to_grid(&self) -> BitGrid {
        BitGrid::from_fn(self.k(), self.k(), |r, c| self.get(r, c))
    }

    /// The (k−1)-line block on `side`, packed into key form.
    pub fn overlap(&self, side: Side) -> OverlapKey {
        let k = self.k();
        let mut bits = [0u16; MAX_K];
        match side {
            Side::Left => {
                let mask = low_mask(k - 1);
                for (b, row) in bits.iter_mut().zip(&self.rows[..k]) {
                    *b = row & mask;
                }
            }
            Side::Right => {
                for (b, row) in bits.iter_mut().zip(&self.rows[..k]) {
                    *b = row >> 1;
                }
            }
            Side::Top => bits[..k - 1].copy_from_slice(&self.rows[..k - 1]),
            Side::Bottom => bits[..k - 1].copy_from_slice(&self.rows[1..k]),
        }
        OverlapKey {
            side,
            k: self.k,
            bits,
        }
    }

    /// Canonical key: rows with column 0 as most significant bit.
    fn order_key(&self) -> impl Iterator<Item = u16> + '_ {
        self.rows.iter().map(|r| r.reverse_bits())
    }
}

#[inline]
pub(crate) fn low_mask(len: usize) -> u16 {
    if len >= 16 {
        u16::MAX
    } else {
        (1u16 << len) - 1
    }
}

pub(crate) fn check_k(k: usize) -> Result<()> {
    if (1..=MAX_K).contains(&k) {
        Ok(())
    } else {
        Err(Error::Range(format!("window side {k} not in 1..={MAX_K}")))
    }
}

impl Ord for KGrid {
    fn cmp(&self, other: &Self) -> Ordering {
        self.k
            .cmp(&other.k)
            .then_with(|| self.order_key().cmp(other.order_key()))
    }
}

impl PartialOrd for KGrid {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for KGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "KGrid[")?;
        for r in 0..self.k() {
            if r > 0 {
                f.write_str("/")?;
            }
            for c in 0..self.k() {
                f.write_str(if self.get(r, c) { "1" } else { "0" })?;
            }
        }
        write!(f, "]")
    }
}

impl fmt::Display for KGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_bit_string())
    }
}

/// Side of a window on which an overlap block lies.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Side {
    Left,
    Right,
    Top,
    Bottom,
}

impl Side {
    pub const ALL: [Side; 4] = [Side::Left, Side::Right, Side::Top, Side::Bottom];

    pub(crate) fn index(self) -> usize {
        self as usize
    }
}

/// The k×(k−1) (or (k−1)×k) overlap block on one side of a window.
///
/// A window `T` extends a band to the right iff `T.overlap(Left)` equals the
/// band's trailing k−1 columns, and analogously for the other sides.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct OverlapKey {
    pub side: Side,
    k: u8,
    bits: [u16; MAX_K],
}

impl OverlapKey {
    /// Key for a band given as `k` rows (Left/Right) or `k−1` rows
    /// (Top/Bottom), column 0 in the least significant bit.
    pub fn from_rows(side: Side, k: usize, rows: &[u16]) -> Result<Self> {
        check_k(k)?;
        let (nrows, width) = match side {
            Side::Left | Side::Right => (k, k - 1),
            Side::Top | Side::Bottom => (k - 1, k),
        };
        if rows.len() != nrows || rows.iter().any(|&r| r & !low_mask(width) != 0) {
            return Err(Error::Input(format!(
                "{side:?} overlap for k={k} needs {nrows} rows of {width} bits"
            )));
        }
        let mut bits = [0u16; MAX_K];
        bits[..nrows].copy_from_slice(rows);
        Ok(OverlapKey {
            side,
            k: k as u8,
            bits,
        })
    }

    pub fn k(&self) -> usize {
        self.k as usize
    }
}
