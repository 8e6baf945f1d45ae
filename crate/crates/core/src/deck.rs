//! k-decks: the multiset of all k×k windows of a picture.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::grid::Picture;
use crate::kgrid::{check_k, KGrid};

/// A multiset of k×k windows, iterated in canonical (bit-string) order.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Deck {
    k: usize,
    counts: BTreeMap<KGrid, u32>,
    total: u64,
}

impl Deck {
    pub fn new(k: usize) -> Result<Self> {
        check_k(k)?;
        Ok(Deck {
            k,
            counts: BTreeMap::new(),
            total: 0,
        })
    }

    /// Adds `mult` copies of `g`.
    pub fn insert(&mut self, g: KGrid, mult: u32) -> Result<()> {
        if g.k() != self.k {
            return Err(Error::Input(format!(
                "window of side {} added to a {}-deck",
                g.k(),
                self.k
            )));
        }
        if mult == 0 {
            return Ok(());
        }
        *self.counts.entry(g).or_insert(0) += mult;
        self.total += u64::from(mult);
        Ok(())
    }

    #[inline]
    pub fn k(&self) -> usize {
        self.k
    }

    /// Sum of multiplicities.
    #[inline]
    pub fn total(&self) -> u64 {
        self.total
    }

    /// Number of distinct windows.
    #[inline]
    pub fn distinct(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.total == 0
    }

    pub fn multiplicity(&self, g: &KGrid) -> u32 {
        self.counts.get(g).copied().unwrap_or(0)
    }

    /// `(window, multiplicity)` pairs in ascending bit-string order.
    pub fn iter(&self) -> impl Iterator<Item = (&KGrid, u32)> + '_ {
        self.counts.iter().map(|(g, &m)| (g, m))
    }
}

/// The k-deck of `pic`.
pub fn deck(pic: &Picture, k: usize) -> Result<Deck> {
    check_k(k)?;
    let n = pic.n();
    if k > n {
        return Err(Error::Input(format!(
            "window side {k} exceeds picture size {n}"
        )));
    }
    let mut d = Deck::new(k)?;
    let grid = pic.as_grid();
    for r in 0..=n - k {
        for c in 0..=n - k {
            d.insert(grid.window(r, c, k), 1)?;
        }
    }
    Ok(d)
}

/// All windows of `pic` in sorted order; a cheaper canonical form than a
/// [`Deck`] for bulk comparisons.
pub(crate) fn sorted_windows(pic: &Picture, k: usize) -> Vec<KGrid> {
    let n = pic.n();
    let grid = pic.as_grid();
    let mut v = Vec::with_capacity((n - k + 1) * (n - k + 1));
    for r in 0..=n - k {
        for c in 0..=n - k {
            v.push(grid.window(r, c, k));
        }
    }
    v.sort_unstable();
    v
}

/// Side length of the picture a deck came from: `√total + k − 1`.
pub fn infer_n(d: &Deck) -> Result<usize> {
    let total = d.total();
    if total == 0 {
        return Err(Error::MalformedDeck("empty deck".into()));
    }
    let root = total.isqrt();
    if root * root != total {
        return Err(Error::MalformedDeck(format!(
            "total {total} is not a perfect square"
        )));
    }
    Ok(root as usize + d.k() - 1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn infer_n_examples() {
        let mut d = Deck::new(2).unwrap();
        d.insert(KGrid::from_bit_string(2, "0000").unwrap(), 4)
            .unwrap();
        assert_eq!(infer_n(&d).unwrap(), 3);

        let mut d = Deck::new(5).unwrap();
        d.insert(KGrid::from_bit_string(5, &"0".repeat(25)).unwrap(), 1)
            .unwrap();
        assert_eq!(infer_n(&d).unwrap(), 5);

        let mut d = Deck::new(6).unwrap();
        d.insert(KGrid::from_bit_string(6, &"1".repeat(36)).unwrap(), 63001)
            .unwrap();
        assert_eq!(infer_n(&d).unwrap(), 256);
    }

    #[test]
    fn infer_n_rejects_non_square() {
        let mut d = Deck::new(2).unwrap();
        d.insert(KGrid::from_bit_string(2, "0000").unwrap(), 5)
            .unwrap();
        assert!(matches!(infer_n(&d), Err(Error::MalformedDeck(_))));
        assert!(matches!(
            infer_n(&Deck::new(2).unwrap()),
            Err(Error::MalformedDeck(_))
        ));
    }

    #[test]
    fn deck_rejects_oversized_window() {
        let p = Picture::zeros(3).unwrap();
        assert!(deck(&p, 4).is_err());
        assert!(deck(&p, 0).is_err());
    }

    #[test]
    fn mismatched_window_side_rejected() {
        let mut d = Deck::new(2).unwrap();
        assert!(d
            .insert(KGrid::from_bit_string(1, "1").unwrap(), 1)
            .is_err());
    }
}
