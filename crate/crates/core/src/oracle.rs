//! Ground truth: exhaustive reconstructibility for tiny pictures, the
//! per-trial harness, and an observer that checks every placement against
//! the source picture.

use std::time::{Duration, Instant};

use rayon::prelude::*;
use xxhash_rust::xxh3::xxh3_128;

use crate::deck::{deck, sorted_windows, Deck};
use crate::diagnostics::{corner_report, CornerReport};
use crate::error::{Error, Result};
use crate::grid::{random_picture, BitGrid, Picture};
use crate::kgrid::KGrid;
use crate::reconstruct::{
    Corner, Direction, Observer, Outcome, Placement, PlacementKind, Reconstructor, Stage, Stats,
};
use crate::rng;

/// Largest n enumerated without opting in.
pub const EXHAUSTIVE_MAX_N: usize = 4;
/// Largest n enumerated at all.
pub const EXHAUSTIVE_OPT_IN_N: usize = 5;

pub fn deck_equal(a: &Deck, b: &Deck) -> Result<bool> {
    if a.k() != b.k() {
        return Err(Error::Input(format!(
            "decks have k = {} and k = {}",
            a.k(),
            b.k()
        )));
    }
    Ok(a == b)
}

fn check_enumerable(n: usize, k: usize, allow_n5: bool) -> Result<()> {
    if n == 0 || k == 0 || k > n {
        return Err(Error::Input(format!(
            "need 1 ≤ k ≤ n, got n = {n}, k = {k}"
        )));
    }
    let limit = if allow_n5 {
        EXHAUSTIVE_OPT_IN_N
    } else {
        EXHAUSTIVE_MAX_N
    };
    if n > limit {
        return Err(Error::Resource(format!(
            "enumerating 2^{} pictures of size {n} exceeds the limit n ≤ {limit}",
            n * n
        )));
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Yes,
    /// Another picture with the same deck.
    No(Picture),
}

/// Searches every picture of the same size for one with an equal deck.
pub fn is_reconstructible_exhaustive(p: &Picture, k: usize, allow_n5: bool) -> Result<Verdict> {
    let n = p.n();
    check_enumerable(n, k, allow_n5)?;
    let own = p.to_index();
    let target = sorted_windows(p, k);
    let hit = (0..1u64 << (n * n))
        .into_par_iter()
        .find_first(|&i| i != own && sorted_windows(&Picture::from_index(n, i), k) == target);
    Ok(match hit {
        None => Verdict::Yes,
        Some(i) => {
            let q = Picture::from_index(n, i);
            assert!(deck_equal(&deck(p, k)?, &deck(&q, k)?)? && q != *p);
            Verdict::No(q)
        }
    })
}

/// Every picture of one size bucketed by deck.
#[derive(Clone, Debug)]
pub struct Classification {
    pub n: usize,
    pub k: usize,
    pub total: u64,
    pub reconstructible: u64,
    /// Two pictures with equal decks, the lowest such indices.
    pub collision: Option<(Picture, Picture)>,
    singletons: Vec<u64>,
}

impl Classification {
    /// Whether the picture with this row-major index is alone in its bucket.
    pub fn is_reconstructible(&self, index: u64) -> bool {
        self.singletons[(index / 64) as usize] >> (index % 64) & 1 == 1
    }
}

fn deck_hash(windows: &[KGrid]) -> u128 {
    let mut bytes = Vec::with_capacity(windows.len() * 32);
    for g in windows {
        for r in 0..g.k() {
            bytes.extend_from_slice(&g.row(r).to_le_bytes());
        }
    }
    xxh3_128(&bytes)
}

const INDEX_BITS: u32 = 32;

pub fn classify_all(n: usize, k: usize, allow_n5: bool) -> Result<Classification> {
    check_enumerable(n, k, allow_n5)?;
    let total = 1u64 << (n * n);
    let windows = |i: u64| sorted_windows(&Picture::from_index(n, i), k);
    let mut keys: Vec<u128> = (0..total)
        .into_par_iter()
        .map(|i| (deck_hash(&windows(i)) >> INDEX_BITS << INDEX_BITS) | u128::from(i))
        .collect();
    keys.par_sort_unstable();

    let mut singletons = vec![0u64; total.div_ceil(64) as usize];
    let mut set = |i: u64| singletons[(i / 64) as usize] |= 1 << (i % 64);
    let mut collision: Option<(u64, u64)> = None;
    let mut note = |a: u64, b: u64| {
        let pair = (a.min(b), a.max(b));
        if collision.is_none_or(|c| pair < c) {
            collision = Some(pair);
        }
    };
    let index = |key: u128| (key & ((1u128 << INDEX_BITS) - 1)) as u64;
    let mut start = 0;
    while start < keys.len() {
        let hash = keys[start] >> INDEX_BITS;
        let mut end = start + 1;
        while end < keys.len() && keys[end] >> INDEX_BITS == hash {
            end += 1;
        }
        let run: Vec<u64> = keys[start..end].iter().map(|&x| index(x)).collect();
        if run.len() == 1 {
            set(run[0]);
        } else {
            let first = windows(run[0]);
            if run[1..].iter().all(|&i| windows(i) == first) {
                note(run[0], run[1]);
            } else {
                // A genuine hash collision: regroup by full comparison.
                let mut full: Vec<(Vec<KGrid>, u64)> =
                    run.iter().map(|&i| (windows(i), i)).collect();
                full.sort();
                let mut a = 0;
                while a < full.len() {
                    let mut b = a + 1;
                    while b < full.len() && full[b].0 == full[a].0 {
                        b += 1;
                    }
                    if b - a == 1 {
                        set(full[a].1);
                    } else {
                        note(full[a].1, full[a + 1].1);
                    }
                    a = b;
                }
            }
        }
        start = end;
    }
    let reconstructible = singletons.iter().map(|w| u64::from(w.count_ones())).sum();
    Ok(Classification {
        n,
        k,
        total,
        reconstructible,
        collision: collision.map(|(a, b)| (Picture::from_index(n, a), Picture::from_index(n, b))),
        singletons,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TrialResult {
    Success,
    WrongOutput,
    Abort(Stage),
}

#[derive(Clone, Debug)]
pub struct TrialOutcome {
    pub n: usize,
    pub k: usize,
    pub seed: u64,
    pub result: TrialResult,
    pub elapsed: Duration,
    pub stats: Stats,
}

/// Seed for the deck order of a trial whose picture came from `seed`.
pub fn order_seed(seed: u64) -> u64 {
    rng::derive_seed(seed, &[1])
}

/// Random picture from `seed`, its deck, one reconstruction.
pub fn run_trial(n: usize, k: usize, seed: u64) -> Result<TrialOutcome> {
    run_trial_with(n, k, seed, |_| ()).map(|(t, _)| t)
}

/// As [`run_trial`], with an observer built from the source picture.
pub fn run_trial_with<O: Observer>(
    n: usize,
    k: usize,
    seed: u64,
    make: impl FnOnce(&Picture) -> O,
) -> Result<(TrialOutcome, O)> {
    let start = Instant::now();
    let p = random_picture(n, seed)?;
    let d = deck(&p, k)?;
    let mut r = Reconstructor::new(&d, order_seed(seed), make(&p))?;
    let res = r.run();
    let result = match &res.outcome {
        Outcome::Success(q) => {
            assert!(
                deck_equal(&deck(q, k)?, &d)?,
                "output deck differs from input deck"
            );
            if *q == p {
                TrialResult::Success
            } else {
                TrialResult::WrongOutput
            }
        }
        Outcome::Abort { stage, .. } => TrialResult::Abort(*stage),
    };
    let outcome = TrialOutcome {
        n,
        k,
        seed,
        result,
        elapsed: start.elapsed(),
        stats: res.stats,
    };
    Ok((outcome, r.into_observer()))
}

/// The first bad placement after a valid droplet, made by a corner
/// lookahead, with its block in the standard frame.
#[derive(Clone, Debug)]
pub struct CornerEvent {
    pub direction: Direction,
    pub corner: Corner,
    /// Mismatch map of the block against the truth.
    pub wrong: BitGrid,
    pub report: CornerReport,
}

/// Observer tracking whether the droplet still embeds in the truth.
///
/// A placement is bad when no translation of the droplet onto the truth
/// survives it; windows outside the truth are incorrect.
pub struct TruthProbe {
    truth: Picture,
    k: usize,
    alive: Vec<(isize, isize)>,
    started: bool,
    stack: Vec<Vec<(isize, isize)>>,
    /// Bad placements, including ones later rolled back.
    pub bad_placements: usize,
    pub first_bad: Option<PlacementKind>,
    pub corner_events: Vec<CornerEvent>,
}

impl TruthProbe {
    pub fn new(truth: &Picture, k: usize) -> Self {
        TruthProbe {
            truth: truth.clone(),
            k,
            alive: Vec::new(),
            started: false,
            stack: Vec::new(),
            bad_placements: 0,
            first_bad: None,
            corner_events: Vec::new(),
        }
    }

    /// No placement in the run was ever bad.
    pub fn mistake_free(&self) -> bool {
        self.bad_placements == 0
    }

    fn truth_cell(&self, r: isize, c: isize) -> Option<bool> {
        let n = self.truth.n() as isize;
        (r >= 0 && c >= 0 && r < n && c < n)
            .then(|| self.truth.as_grid().get(r as usize, c as usize))
    }

    fn matches(&self, g: &KGrid, r: isize, c: isize) -> bool {
        let k = self.k;
        (0..k).all(|i| {
            (0..k).all(|j| self.truth_cell(r + i as isize, c + j as isize) == Some(g.get(i, j)))
        })
    }

    fn corner_event(&self, p: &Placement<'_>, (dr, dc): (isize, isize)) -> Option<CornerEvent> {
        let b = p.block?;
        let (direction, corner) = (p.direction?, p.corner?);
        let m = b.cells.rows();
        let raw = BitGrid::from_fn(m, m, |i, j| {
            let (r, c) = ((b.row0 + i) as isize - dr, (b.col0 + j) as isize - dc);
            self.truth_cell(r, c) != Some(b.cells.get(i, j))
        });
        let wrong = canonical_block(&raw, direction, corner);
        let report = corner_report(&wrong, self.k);
        Some(CornerEvent {
            direction,
            corner,
            wrong,
            report,
        })
    }
}

/// Reorients a corner block so the droplet lies to the left and the placed
/// window sits in the upper-left corner.
pub fn canonical_block(block: &BitGrid, dir: Direction, corner: Corner) -> BitGrid {
    let m = block.rows();
    let last = m - 1;
    BitGrid::from_fn(m, m, |i, j| {
        let (r, c) = match (dir, corner) {
            (Direction::Right, Corner::First) => (i, j),
            (Direction::Right, Corner::Last) => (last - i, j),
            (Direction::Left, Corner::First) => (i, last - j),
            (Direction::Left, Corner::Last) => (last - i, last - j),
            (Direction::Up, Corner::First) => (last - j, i),
            (Direction::Up, Corner::Last) => (last - j, last - i),
            (Direction::Down, Corner::First) => (j, i),
            (Direction::Down, Corner::Last) => (j, last - i),
        };
        block.get(r, c)
    })
}

impl Observer for TruthProbe {
    fn wants_blocks(&self) -> bool {
        true
    }

    fn placed(&mut self, p: &Placement<'_>) {
        let (r, c) = (p.row as isize, p.col as isize);
        if !self.started {
            self.started = true;
            let span = (self.truth.n() - self.k) as isize;
            self.alive = (0..=span)
                .flat_map(|i| (0..=span).map(move |j| (i, j)))
                .filter(|&(i, j)| self.matches(&p.grid, i, j))
                .map(|(i, j)| (r - i, c - j))
                .collect();
            if self.alive.is_empty() {
                self.bad_placements += 1;
                self.first_bad.get_or_insert(p.kind);
            }
            return;
        }
        if self.alive.is_empty() {
            return;
        }
        let next: Vec<(isize, isize)> = self
            .alive
            .iter()
            .copied()
            .filter(|&(dr, dc)| self.matches(&p.grid, r - dr, c - dc))
            .collect();
        if next.is_empty() {
            self.bad_placements += 1;
            self.first_bad.get_or_insert(p.kind);
            if p.kind == PlacementKind::Corner {
                if let Some(e) = self.corner_event(p, self.alive[0]) {
                    self.corner_events.push(e);
                }
            }
        }
        self.alive = next;
    }

    fn checkpoint(&mut self) {
        self.stack.push(self.alive.clone());
    }

    fn rollback(&mut self) {
        self.alive = self.stack.pop().expect("rollback without checkpoint");
    }

    fn release(&mut self) {
        self.stack.pop().expect("release without checkpoint");
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_deck_is_color_count() {
        let a = Picture::from_rows(&[[1, 0], [0, 0]]).unwrap();
        let b = Picture::from_rows(&[[0, 1], [0, 0]]).unwrap();
        assert!(deck_equal(&deck(&a, 1).unwrap(), &deck(&b, 1).unwrap()).unwrap());
        match is_reconstructible_exhaustive(&a, 1, false).unwrap() {
            Verdict::No(q) => assert_eq!(q.count_ones(), 1),
            Verdict::Yes => panic!("k = 1 cannot tell positions apart"),
        }
    }

    #[test]
    fn mismatched_k_is_an_error() {
        let a = Picture::zeros(3).unwrap();
        assert!(deck_equal(&deck(&a, 1).unwrap(), &deck(&a, 2).unwrap()).is_err());
    }

    #[test]
    fn full_window_always_reconstructs() {
        for i in 0..16 {
            let p = Picture::from_index(2, i);
            assert_eq!(
                is_reconstructible_exhaustive(&p, 2, false).unwrap(),
                Verdict::Yes
            );
        }
    }

    #[test]
    fn size_limits() {
        let p = Picture::zeros(5).unwrap();
        assert!(matches!(
            is_reconstructible_exhaustive(&p, 2, false),
            Err(Error::Resource(_))
        ));
        assert!(matches!(classify_all(6, 2, true), Err(Error::Resource(_))));
        assert!(matches!(classify_all(3, 4, false), Err(Error::Input(_))));
    }

    #[test]
    fn classify_small() {
        let c = classify_all(2, 1, false).unwrap();
        assert_eq!((c.total, c.reconstructible), (16, 2));
        assert!(c.is_reconstructible(0) && c.is_reconstructible(15));
        let (a, b) = c.collision.unwrap();
        assert_eq!(deck(&a, 1).unwrap(), deck(&b, 1).unwrap());
        for n in 1..=3 {
            let c = classify_all(n, n, false).unwrap();
            assert_eq!(c.reconstructible, c.total);
            assert!(c.collision.is_none());
        }
    }

    #[test]
    fn flipped_blocks_are_standardized() {
        let k = 2;
        let m = 2 * k - 1;
        // Mark the placed window's cells in each raw frame and check they
        // land in the upper-left corner.
        let commit = |dir, corner| match (dir, corner) {
            (Direction::Right, Corner::First) | (Direction::Down, Corner::First) => (0, 0),
            (Direction::Right, Corner::Last) | (Direction::Up, Corner::First) => (k - 1, 0),
            (Direction::Left, Corner::First) | (Direction::Down, Corner::Last) => (0, k - 1),
            (Direction::Left, Corner::Last) | (Direction::Up, Corner::Last) => (k - 1, k - 1),
        };
        for dir in [
            Direction::Right,
            Direction::Left,
            Direction::Up,
            Direction::Down,
        ] {
            for corner in [Corner::First, Corner::Last] {
                let (a, b) = commit(dir, corner);
                let raw = BitGrid::from_fn(m, m, |i, j| i >= a && i < a + k && j >= b && j < b + k);
                let c = canonical_block(&raw, dir, corner);
                let want = BitGrid::from_fn(m, m, |i, j| i < k && j < k);
                assert_eq!(c, want, "{dir:?} {corner:?}");
            }
        }
    }

    #[test]
    fn probe_agrees_with_outcome() {
        for seed in 0..6 {
            let (t, probe) = run_trial_with(30, 4, seed, |p| TruthProbe::new(p, 4)).unwrap();
            if probe.mistake_free() {
                assert_eq!(t.result, TrialResult::Success);
            }
            if t.result == TrialResult::WrongOutput {
                assert!(!probe.mistake_free());
            }
        }
    }

    #[test]
    fn trials_are_deterministic() {
        let a = run_trial(24, 4, 17).unwrap();
        let b = run_trial(24, 4, 17).unwrap();
        assert_eq!((a.result, a.stats), (b.result, b.stats));
    }
}
