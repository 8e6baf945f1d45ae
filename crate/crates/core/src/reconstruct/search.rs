//! Depth-first assembly of lookahead blocks.
//!
//! A block is a rectangle of cells tiled by overlapping k×k windows. The
//! search assigns deck elements to windows one at a time, each consistent
//! with every cell already known (droplet cells and earlier assignments),
//! with joint multiplicity accounting across the block. The designated
//! window is assigned first, so the element it receives is the first one in
//! deck order that admits a complete block.

use crate::index::DeckIndex;
use crate::kgrid::{low_mask, KGrid, Side, MAX_K};

use super::droplet::Droplet;

#[derive(Clone, Debug)]
pub(crate) struct BlockSpec {
    pub row0: usize,
    pub col0: usize,
    pub rows: usize,
    pub cols: usize,
    /// Window offsets in assignment order; `windows[0]` is the one placed.
    pub windows: Vec<(usize, usize)>,
}

impl BlockSpec {
    /// Every window of a `rows × cols` block, ordered by distance from
    /// `commit` so each later window overlaps an earlier one on a full side.
    pub(crate) fn new(
        row0: usize,
        col0: usize,
        rows: usize,
        cols: usize,
        k: usize,
        commit: (usize, usize),
    ) -> Self {
        let mut windows: Vec<(usize, usize)> = (0..=rows - k)
            .flat_map(|a| (0..=cols - k).map(move |b| (a, b)))
            .collect();
        windows.sort_by_key(|&(a, b)| (a.abs_diff(commit.0) + b.abs_diff(commit.1), a, b));
        debug_assert_eq!(windows[0], commit);
        BlockSpec {
            row0,
            col0,
            rows,
            cols,
            windows,
        }
    }

    pub(crate) fn single(row: usize, col: usize, k: usize) -> Self {
        BlockSpec::new(row, col, k, k, k, (0, 0))
    }
}

#[derive(Clone, Debug)]
pub(crate) struct Assembly {
    /// Block rows, column 0 in the least significant bit.
    pub cells: Vec<u64>,
    /// Deck id per window (same order as the spec); `None` for windows that
    /// were already part of the droplet.
    pub chosen: Vec<Option<u32>>,
}

struct Search<'a> {
    k: usize,
    full: u64,
    ix: &'a DeckIndex,
    windows: &'a [(usize, usize)],
    in_droplet: Vec<bool>,
    vals: Vec<u64>,
    mask: Vec<u64>,
    chosen: Vec<Option<u32>>,
    reserved: Vec<u32>,
}

pub(crate) fn assemble(droplet: &Droplet, ix: &DeckIndex, spec: &BlockSpec) -> Option<Assembly> {
    let k = droplet.k();
    debug_assert!(spec.cols <= 64);
    debug_assert!(spec.row0 + spec.rows <= droplet.dim() && spec.col0 + spec.cols <= droplet.dim());
    let vals = (0..spec.rows)
        .map(|i| droplet.value_bits(spec.row0 + i, spec.col0, spec.cols))
        .collect();
    let mask = (0..spec.rows)
        .map(|i| droplet.known_bits(spec.row0 + i, spec.col0, spec.cols))
        .collect();
    let in_droplet = spec
        .windows
        .iter()
        .map(|&(a, b)| droplet.is_committed(spec.row0 + a, spec.col0 + b))
        .collect();
    let mut s = Search {
        k,
        full: (1u64 << k) - 1,
        ix,
        windows: &spec.windows,
        in_droplet,
        vals,
        mask,
        chosen: vec![None; spec.windows.len()],
        reserved: Vec::with_capacity(spec.windows.len()),
    };
    if s.dfs(0) {
        Some(Assembly {
            cells: s.vals,
            chosen: s.chosen,
        })
    } else {
        None
    }
}

impl Search<'_> {
    fn window(&self, a: usize, b: usize) -> ([u16; MAX_K], [u16; MAX_K]) {
        let mut v = [0u16; MAX_K];
        let mut m = [0u16; MAX_K];
        for r in 0..self.k {
            v[r] = ((self.vals[a + r] >> b) & self.full) as u16;
            m[r] = ((self.mask[a + r] >> b) & self.full) as u16;
        }
        (v, m)
    }

    fn known_side(&self, m: &[u16; MAX_K]) -> Option<Side> {
        let k = self.k;
        let full = low_mask(k);
        let lead = low_mask(k - 1);
        if m[..k].iter().all(|&r| r & lead == lead) {
            return Some(Side::Left);
        }
        if k >= 2 && m[..k - 1].iter().all(|&r| r == full) {
            return Some(Side::Top);
        }
        let trail = full & !1;
        if m[..k].iter().all(|&r| r & trail == trail) {
            return Some(Side::Right);
        }
        if k >= 2 && m[1..k].iter().all(|&r| r == full) {
            return Some(Side::Bottom);
        }
        None
    }

    fn available(&self, id: u32) -> bool {
        let used = self.reserved.iter().filter(|&&x| x == id).count() as u32;
        self.ix.remaining_of(id) > used
    }

    fn dfs(&mut self, depth: usize) -> bool {
        if depth == self.windows.len() {
            return true;
        }
        if self.in_droplet[depth] {
            return self.dfs(depth + 1);
        }
        let (a, b) = self.windows[depth];
        let k = self.k;
        let (v, m) = self.window(a, b);
        let full = low_mask(k);

        if m[..k].iter().all(|&r| r == full) {
            let g = KGrid::from_raw(k, v);
            let Some(id) = self.ix.id_of(&g) else {
                return false;
            };
            if !self.available(id) {
                return false;
            }
            self.reserved.push(id);
            self.chosen[depth] = Some(id);
            if self.dfs(depth + 1) {
                return true;
            }
            self.chosen[depth] = None;
            self.reserved.pop();
            return false;
        }

        let ix = self.ix;
        let side = self.known_side(&m);
        let listed: &[u32] = match side {
            Some(side) => ix.candidate_ids(&KGrid::from_raw(k, v).overlap(side)),
            None => &[],
        };
        let unindexed = if side.is_none() { ix.all_ids() } else { 0..0 };

        let mut saved_v = [0u64; MAX_K];
        let mut saved_m = [0u64; MAX_K];
        saved_v[..k].copy_from_slice(&self.vals[a..a + k]);
        saved_m[..k].copy_from_slice(&self.mask[a..a + k]);
        for id in listed.iter().copied().chain(unindexed) {
            if self.ix.remaining_of(id) == 0 {
                continue;
            }
            let g = self.ix.grid(id);
            let rows = g.raw_rows();
            if (0..k).any(|r| (rows[r] ^ v[r]) & m[r] != 0) {
                continue;
            }
            if !self.available(id) {
                continue;
            }
            let lane = self.full << b;
            for (r, &row) in rows[..k].iter().enumerate() {
                self.vals[a + r] = (self.vals[a + r] & !lane) | (u64::from(row) << b);
                self.mask[a + r] |= lane;
            }
            self.reserved.push(id);
            self.chosen[depth] = Some(id);
            if self.dfs(depth + 1) {
                return true;
            }
            self.chosen[depth] = None;
            self.reserved.pop();
            self.vals[a..a + k].copy_from_slice(&saved_v[..k]);
            self.mask[a..a + k].copy_from_slice(&saved_m[..k]);
        }
        false
    }
}
