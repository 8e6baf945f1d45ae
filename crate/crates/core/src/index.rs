//! A consumable deck with overlap indexes, used as the working deck during
//! reconstruction.
//!
//! Distinct windows are numbered by the position of their first copy in a
//! seeded uniform permutation of all copies; every candidate list is sorted
//! by that number, so "first fitting element" means first in the random
//! order. Removing a copy decrements a counter and never reorders values.

use std::sync::atomic::{AtomicU64, Ordering};

use rand::seq::SliceRandom;
use rustc_hash::FxHashMap;

use crate::deck::Deck;
use crate::error::{Error, Result};
use crate::kgrid::{KGrid, OverlapKey, Side};
use crate::rng;

static NEXT_NONCE: AtomicU64 = AtomicU64::new(1);

/// Returned by [`DeckIndex::remove`] when no copy is left.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Missing;

/// Token for [`DeckIndex::rollback`]; valid until rolled past or released.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Checkpoint {
    nonce: u64,
    depth: usize,
    mark: usize,
}

#[derive(Clone, Debug)]
pub struct DeckIndex {
    k: usize,
    nonce: u64,
    grids: Vec<KGrid>,
    ids: FxHashMap<KGrid, u32>,
    order: Vec<u32>,
    remaining: Vec<u32>,
    initial_total: u64,
    remaining_total: u64,
    sides: [FxHashMap<OverlapKey, Vec<u32>>; 4],
    log: Vec<u32>,
    checkpoints: Vec<usize>,
}

impl DeckIndex {
    pub fn build(d: &Deck, seed: u64) -> Result<Self> {
        if d.is_empty() {
            return Err(Error::Input("cannot index an empty deck".into()));
        }
        let canonical: Vec<KGrid> = d.iter().map(|(g, _)| *g).collect();
        let mut slots: Vec<u32> = Vec::with_capacity(d.total() as usize);
        for (i, (_, m)) in d.iter().enumerate() {
            slots.extend(std::iter::repeat_n(i as u32, m as usize));
        }
        slots.shuffle(&mut rng::generator(seed));

        // Renumber distinct windows by first appearance in the permutation.
        let mut renumber = vec![u32::MAX; canonical.len()];
        let mut grids = Vec::with_capacity(canonical.len());
        let mut remaining = Vec::with_capacity(canonical.len());
        for s in slots.iter_mut() {
            let old = *s as usize;
            if renumber[old] == u32::MAX {
                renumber[old] = grids.len() as u32;
                grids.push(canonical[old]);
                remaining.push(d.multiplicity(&canonical[old]));
            }
            *s = renumber[old];
        }

        let mut ids = FxHashMap::default();
        let mut sides: [FxHashMap<OverlapKey, Vec<u32>>; 4] = Default::default();
        for (id, g) in grids.iter().enumerate() {
            ids.insert(*g, id as u32);
            for side in Side::ALL {
                sides[side.index()]
                    .entry(g.overlap(side))
                    .or_default()
                    .push(id as u32);
            }
        }

        Ok(DeckIndex {
            k: d.k(),
            nonce: NEXT_NONCE.fetch_add(1, Ordering::Relaxed),
            grids,
            ids,
            order: slots,
            remaining,
            initial_total: d.total(),
            remaining_total: d.total(),
            sides,
            log: Vec::new(),
            checkpoints: Vec::new(),
        })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// All copies in the random order chosen at build time.
    pub fn order(&self) -> impl Iterator<Item = KGrid> + '_ {
        self.order.iter().map(|&id| self.grids[id as usize])
    }

    pub fn remaining_total(&self) -> u64 {
        self.remaining_total
    }

    pub fn initial_total(&self) -> u64 {
        self.initial_total
    }

    pub fn remaining(&self, g: &KGrid) -> u32 {
        self.ids.get(g).map_or(0, |&id| self.remaining[id as usize])
    }

    /// Remaining windows whose `key.side` overlap equals `key`, in random
    /// order, with their remaining multiplicities.
    pub fn candidates(&self, key: &OverlapKey) -> Vec<(KGrid, u32)> {
        self.candidate_ids(key)
            .iter()
            .filter(|&&id| self.remaining[id as usize] > 0)
            .map(|&id| (self.grids[id as usize], self.remaining[id as usize]))
            .collect()
    }

    /// The remaining deck as a [`Deck`].
    pub fn remaining_deck(&self) -> Deck {
        let mut d = Deck::new(self.k).expect("k validated at build");
        for (g, &m) in self.grids.iter().zip(&self.remaining) {
            d.insert(*g, m).expect("same k");
        }
        d
    }

    /// Removes one copy of `g`.
    pub fn remove(&mut self, g: &KGrid) -> Result<(), Missing> {
        match self.ids.get(g) {
            Some(&id) => self.remove_id(id),
            None => Err(Missing),
        }
    }

    pub fn checkpoint(&mut self) -> Checkpoint {
        self.checkpoints.push(self.log.len());
        Checkpoint {
            nonce: self.nonce,
            depth: self.checkpoints.len() - 1,
            mark: self.log.len(),
        }
    }

    /// Restores every count to its value when `token` was issued, discarding
    /// `token` and any checkpoint taken after it.
    pub fn rollback(&mut self, token: Checkpoint) -> Result<()> {
        self.validate(token)?;
        for id in self.log.drain(token.mark..).rev() {
            self.remaining[id as usize] += 1;
            self.remaining_total += 1;
        }
        self.checkpoints.truncate(token.depth);
        Ok(())
    }

    /// Drops `token` (and later checkpoints) keeping all removals.
    pub fn release(&mut self, token: Checkpoint) -> Result<()> {
        self.validate(token)?;
        self.checkpoints.truncate(token.depth);
        if self.checkpoints.is_empty() {
            self.log.clear();
        }
        Ok(())
    }

    fn validate(&self, token: Checkpoint) -> Result<()> {
        if token.nonce != self.nonce || self.checkpoints.get(token.depth) != Some(&token.mark) {
            return Err(Error::StaleCheckpoint);
        }
        Ok(())
    }

    #[inline]
    pub(crate) fn candidate_ids(&self, key: &OverlapKey) -> &[u32] {
        self.sides[key.side.index()]
            .get(key)
            .map_or(&[], |v| v.as_slice())
    }

    #[inline]
    pub(crate) fn id_of(&self, g: &KGrid) -> Option<u32> {
        self.ids.get(g).copied()
    }

    #[inline]
    pub(crate) fn grid(&self, id: u32) -> KGrid {
        self.grids[id as usize]
    }

    #[inline]
    pub(crate) fn remaining_of(&self, id: u32) -> u32 {
        self.remaining[id as usize]
    }

    /// All distinct ids in random order (used when no overlap is known).
    pub(crate) fn all_ids(&self) -> std::ops::Range<u32> {
        0..self.grids.len() as u32
    }

    pub(crate) fn remove_id(&mut self, id: u32) -> Result<(), Missing> {
        let r = &mut self.remaining[id as usize];
        if *r == 0 {
            return Err(Missing);
        }
        *r -= 1;
        self.remaining_total -= 1;
        if !self.checkpoints.is_empty() {
            self.log.push(id);
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::deck::deck;
    use crate::grid::{random_picture, Picture};

    fn small_deck() -> Deck {
        let p = Picture::from_rows(&[[1, 0, 1], [0, 1, 0], [1, 1, 0]]).unwrap();
        deck(&p, 2).unwrap()
    }

    #[test]
    fn order_is_a_permutation() {
        let d = small_deck();
        let ix = DeckIndex::build(&d, 11).unwrap();
        let mut got: Vec<KGrid> = ix.order().collect();
        got.sort();
        let want: Vec<KGrid> = d.iter().map(|(g, _)| *g).collect();
        assert_eq!(got, want);
        for (g, _) in d.iter() {
            assert_eq!(ix.remaining(g), 1);
        }
    }

    #[test]
    fn singleton_deck() {
        let p = random_picture(4, 1).unwrap();
        let d = deck(&p, 4).unwrap();
        let ix = DeckIndex::build(&d, 0).unwrap();
        assert_eq!(
            ix.order().collect::<Vec<_>>(),
            vec![KGrid::from_grid(p.as_grid()).unwrap()]
        );
    }

    #[test]
    fn empty_deck_rejected() {
        assert!(DeckIndex::build(&Deck::new(2).unwrap(), 0).is_err());
    }

    #[test]
    fn left_overlap_candidates_on_small_deck() {
        let ix = DeckIndex::build(&small_deck(), 5).unwrap();
        let key = OverlapKey::from_rows(Side::Left, 2, &[1, 0]).unwrap();
        let got: Vec<KGrid> = ix.candidates(&key).into_iter().map(|(g, _)| g).collect();
        assert_eq!(got, vec![KGrid::from_rows(&[[1, 0], [0, 1]]).unwrap()]);
        let key = OverlapKey::from_rows(Side::Left, 2, &[0, 1]).unwrap();
        let mut got: Vec<KGrid> = ix.candidates(&key).into_iter().map(|(g, _)| g).collect();
        got.sort();
        let want = vec![
            KGrid::from_rows(&[[0, 1], [1, 0]]).unwrap(),
            KGrid::from_rows(&[[0, 1], [1, 1]]).unwrap(),
        ];
        assert_eq!(got, want);
    }

    #[test]
    fn remove_until_missing() {
        let mut ix = DeckIndex::build(&small_deck(), 5).unwrap();
        let g = KGrid::from_rows(&[[1, 0], [0, 1]]).unwrap();
        let before = ix.remaining_total();
        assert_eq!(ix.remove(&g), Ok(()));
        assert_eq!(ix.remaining_total(), before - 1);
        assert_eq!(ix.remove(&g), Err(Missing));
        let key = g.overlap(Side::Top);
        assert!(ix.candidates(&key).iter().all(|(c, _)| *c != g));
    }

    #[test]
    fn full_consumption() {
        let p = random_picture(6, 9).unwrap();
        let d = deck(&p, 2).unwrap();
        let mut ix = DeckIndex::build(&d, 1).unwrap();
        let all: Vec<KGrid> = ix.order().collect();
        assert_eq!(all.len(), 25);
        for g in &all {
            ix.remove(g).unwrap();
        }
        assert_eq!(ix.remaining_total(), 0);
        assert!(ix.remaining_deck().is_empty());
    }

    #[test]
    fn nested_checkpoints_unwind_lifo() {
        let p = random_picture(6, 2).unwrap();
        let d = deck(&p, 2).unwrap();
        let mut ix = DeckIndex::build(&d, 3).unwrap();
        let all: Vec<KGrid> = ix.order().collect();
        let snap0 = ix.remaining_deck();
        let outer = ix.checkpoint();
        ix.remove(&all[0]).unwrap();
        let snap1 = ix.remaining_deck();
        let inner = ix.checkpoint();
        ix.remove(&all[1]).unwrap();
        ix.remove(&all[2]).unwrap();
        ix.rollback(inner).unwrap();
        assert_eq!(ix.remaining_deck(), snap1);
        assert_eq!(ix.rollback(inner), Err(Error::StaleCheckpoint));
        ix.rollback(outer).unwrap();
        assert_eq!(ix.remaining_deck(), snap0);
        assert_eq!(ix.rollback(outer), Err(Error::StaleCheckpoint));
    }

    #[test]
    fn token_from_another_index_is_stale() {
        let d = small_deck();
        let mut a = DeckIndex::build(&d, 1).unwrap();
        let mut b = DeckIndex::build(&d, 1).unwrap();
        let t = a.checkpoint();
        let _ = b.checkpoint();
        assert_eq!(b.rollback(t), Err(Error::StaleCheckpoint));
        assert!(a.rollback(t).is_ok());
    }
}
