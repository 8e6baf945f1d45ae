//! Reconstruction of a picture from its deck by droplet growth.
//!
//! The droplet starts as one window, grows into a band of height 3k,
//! then widens column by column to width n, then grows row by row to
//! height n. Each new line is started at its two corners with a
//! (2k−1)×(2k−1) lookahead, filled by (2k−1)×k internal lookaheads, and
//! finished by deleting the windows it implies from the deck.

mod droplet;
mod extension;
mod observe;
mod search;

use crate::deck::{infer_n, Deck};
use crate::error::{Error, Result};
use crate::grid::{BitGrid, Picture};
use crate::index::{Checkpoint, DeckIndex};
use crate::kgrid::KGrid;

use droplet::Droplet;
use search::{assemble, BlockSpec};

pub use extension::{extend, fits};
pub use observe::{LookaheadBlock, Observer, Placement, PlacementKind};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Direction {
    Right,
    Left,
    Up,
    Down,
}

impl Direction {
    pub fn is_horizontal(self) -> bool {
        matches!(self, Direction::Right | Direction::Left)
    }
}

/// Which end of a new line: top for columns, left for rows.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Corner {
    First,
    Last,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Stage {
    Initial,
    Column,
    Row,
    Leftover,
}

impl Stage {
    pub fn name(self) -> &'static str {
        match self {
            Stage::Initial => "initial",
            Stage::Column => "column",
            Stage::Row => "row",
            Stage::Leftover => "leftover",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome {
    Success(Picture),
    Abort { stage: Stage, reason: String },
}

impl Outcome {
    pub fn picture(&self) -> Option<&Picture> {
        match self {
            Outcome::Success(p) => Some(p),
            Outcome::Abort { .. } => None,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Stats {
    pub naive: u32,
    pub internal: u32,
    pub corner: u32,
    pub leftover: u32,
    pub columns: u32,
    pub rows: u32,
    pub boundary_columns: u32,
    pub boundary_rows: u32,
    pub rollbacks: u32,
    /// Deck copies not consumed when the run ended.
    pub deck_remaining: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReconstructionResult {
    pub outcome: Outcome,
    pub stats: Stats,
}

/// Why a single line extension failed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StepFailure {
    Corner,
    Internal,
    Leftover,
}

/// A rectangle of a known picture, 1-indexed, used to seed a droplet.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Region {
    pub row: usize,
    pub col: usize,
    pub height: usize,
    pub width: usize,
}

struct Tx {
    droplet: usize,
    index: Checkpoint,
}

pub struct Reconstructor<O: Observer = ()> {
    n: usize,
    k: usize,
    droplet: Droplet,
    ix: DeckIndex,
    stats: Stats,
    observer: O,
}

/// Reconstructs with the deck order drawn from `seed`.
pub fn reconstruct(d: &Deck, seed: u64) -> Result<ReconstructionResult> {
    reconstruct_observed(d, seed, ())
}

pub fn reconstruct_observed<O: Observer>(
    d: &Deck,
    seed: u64,
    observer: O,
) -> Result<ReconstructionResult> {
    Ok(Reconstructor::new(d, seed, observer)?.run())
}

fn abort(stage: Stage, reason: impl Into<String>) -> Outcome {
    Outcome::Abort {
        stage,
        reason: reason.into(),
    }
}

impl<O: Observer> Reconstructor<O> {
    /// Fails with `Unsupported` when k < n < 3k.
    pub fn new(d: &Deck, seed: u64, observer: O) -> Result<Self> {
        let n = infer_n(d)?;
        let k = d.k();
        if n != k && n < 3 * k {
            return Err(Error::Unsupported(format!(
                "n = {n} with k = {k}: need n = k or n >= 3k"
            )));
        }
        Ok(Reconstructor {
            n,
            k,
            droplet: Droplet::new(n, k),
            ix: DeckIndex::build(d, seed)?,
            stats: Stats::default(),
            observer,
        })
    }

    /// A reconstructor whose droplet already holds `region` of `truth`,
    /// with the region's windows removed from the deck.
    pub fn from_region(
        d: &Deck,
        truth: &Picture,
        region: Region,
        seed: u64,
        observer: O,
    ) -> Result<Self> {
        let mut this = Self::new(d, seed, observer)?;
        let (n, k) = (this.n, this.k);
        if truth.n() != n {
            return Err(Error::Input(format!(
                "picture is {}×{0}, deck is for n = {n}",
                truth.n()
            )));
        }
        let Region {
            row,
            col,
            height,
            width,
        } = region;
        if row == 0
            || col == 0
            || height < k
            || width < k
            || row + height - 1 > n
            || col + width - 1 > n
        {
            return Err(Error::Range(format!(
                "region {region:?} does not fit an {n}×{n} picture"
            )));
        }
        let (top, left) = (this.droplet.top, this.droplet.left);
        for i in 0..=height - k {
            for j in 0..=width - k {
                let g = truth.subgrid(row + i, col + j, k)?;
                this.ix
                    .remove(&g)
                    .map_err(|_| Error::Input("region window missing from deck".into()))?;
                this.droplet.place(top + i, left + j, &g);
            }
        }
        this.droplet.height = height;
        this.droplet.width = width;
        this.stats.deck_remaining = this.ix.remaining_total();
        Ok(this)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn index(&self) -> &DeckIndex {
        &self.ix
    }

    pub fn stats(&self) -> &Stats {
        &self.stats
    }

    pub fn observer(&self) -> &O {
        &self.observer
    }

    pub fn into_observer(self) -> O {
        self.observer
    }

    /// Droplet rectangle as (top, left, height, width) in droplet coordinates.
    pub fn extent(&self) -> (usize, usize, usize, usize) {
        let d = &self.droplet;
        (d.top, d.left, d.height, d.width)
    }

    pub fn droplet_grid(&self) -> BitGrid {
        self.droplet.to_grid()
    }

    fn begin(&mut self) -> Tx {
        self.observer.checkpoint();
        Tx {
            droplet: self.droplet.checkpoint(),
            index: self.ix.checkpoint(),
        }
    }

    fn commit(&mut self, tx: Tx) {
        self.droplet.release(tx.droplet);
        self.ix
            .release(tx.index)
            .expect("checkpoints are strictly nested");
        self.observer.release();
    }

    fn undo(&mut self, tx: Tx) {
        self.droplet.rollback(tx.droplet);
        self.ix
            .rollback(tx.index)
            .expect("checkpoints are strictly nested");
        self.observer.rollback();
        self.stats.rollbacks += 1;
    }

    /// Window positions along the next line in `dir`.
    fn positions(&self, dir: Direction) -> usize {
        let span = if dir.is_horizontal() {
            self.droplet.height
        } else {
            self.droplet.width
        };
        span + 1 - self.k
    }

    /// Top-left corner of the `j`-th window of the next line in `dir`.
    fn window_pos(&self, dir: Direction, j: usize) -> (usize, usize) {
        let d = &self.droplet;
        let k = self.k;
        match dir {
            Direction::Right => (d.top + j, d.left + d.width + 1 - k),
            Direction::Left => (d.top + j, d.left - 1),
            Direction::Down => (d.top + d.height + 1 - k, d.left + j),
            Direction::Up => (d.top - 1, d.left + j),
        }
    }

    fn grow_extent(&mut self, dir: Direction) {
        let d = &mut self.droplet;
        match dir {
            Direction::Right => d.width += 1,
            Direction::Left => {
                d.left -= 1;
                d.width += 1;
            }
            Direction::Down => d.height += 1,
            Direction::Up => {
                d.top -= 1;
                d.height += 1;
            }
        }
    }

    fn span(&self, dir: Direction) -> usize {
        if dir.is_horizontal() {
            self.droplet.width
        } else {
            self.droplet.height
        }
    }

    fn corner_spec(&self, dir: Direction, corner: Corner) -> BlockSpec {
        let k = self.k;
        let j = match corner {
            Corner::First => 0,
            Corner::Last => self.positions(dir) - 1,
        };
        let (wr, wc) = self.window_pos(dir, j);
        let along = |w: usize| match corner {
            Corner::First => (w, 0),
            Corner::Last => (w + 1 - k, k - 1),
        };
        let ((row0, cr), (col0, cc)) = match dir {
            Direction::Right => (along(wr), (wc, 0)),
            Direction::Left => (along(wr), (wc + 1 - k, k - 1)),
            Direction::Down => ((wr, 0), along(wc)),
            Direction::Up => ((wr + 1 - k, k - 1), along(wc)),
        };
        BlockSpec::new(row0, col0, 2 * k - 1, 2 * k - 1, k, (cr, cc))
    }

    fn place(
        &mut self,
        spec: &BlockSpec,
        kind: PlacementKind,
        dir: Option<Direction>,
        corner: Option<Corner>,
    ) -> Option<KGrid> {
        let asm = assemble(&self.droplet, &self.ix, spec)?;
        let id = asm.chosen[0].expect("the placed window is never already in the droplet");
        let g = self.ix.grid(id);
        let (a, b) = spec.windows[0];
        let (row, col) = (spec.row0 + a, spec.col0 + b);
        self.droplet.place(row, col, &g);
        self.ix
            .remove_id(id)
            .expect("assembly reserved an available copy");
        match kind {
            PlacementKind::Naive => self.stats.naive += 1,
            PlacementKind::Internal => self.stats.internal += 1,
            PlacementKind::Corner => self.stats.corner += 1,
            PlacementKind::Initial | PlacementKind::Leftover => {}
        }
        let block = (kind == PlacementKind::Corner && self.observer.wants_blocks()).then(|| {
            LookaheadBlock {
                row0: spec.row0,
                col0: spec.col0,
                cells: BitGrid::from_fn(spec.rows, spec.cols, |r, c| asm.cells[r] >> c & 1 == 1),
                commit: (a, b),
            }
        });
        self.observer.placed(&Placement {
            kind,
            direction: dir,
            corner,
            row,
            col,
            grid: g,
            block: block.as_ref(),
        });
        Some(g)
    }

    /// Places the first deck element that extends a k-wide band by one line.
    /// The band perpendicular to `dir` must be exactly k cells thick; the
    /// droplet extent grows on success.
    pub fn naive_extend(&mut self, dir: Direction) -> Option<KGrid> {
        assert_eq!(
            self.positions(dir),
            1,
            "naive extension needs a band exactly k thick"
        );
        let (r, c) = self.window_pos(dir, 0);
        let g = self.place(
            &BlockSpec::single(r, c, self.k),
            PlacementKind::Naive,
            Some(dir),
            None,
        )?;
        self.grow_extent(dir);
        Some(g)
    }

    /// Places window `j` (0-based along the line) of the next line in `dir`
    /// using a (2k−1)×k lookahead. The extent does not change.
    pub fn internal_extend(&mut self, dir: Direction, j: usize) -> Option<KGrid> {
        let k = self.k;
        assert!(
            j + k <= self.positions(dir),
            "internal lookahead leaves the band"
        );
        let (r, c) = self.window_pos(dir, j);
        let spec = if dir.is_horizontal() {
            BlockSpec::new(r, c, 2 * k - 1, k, k, (0, 0))
        } else {
            BlockSpec::new(r, c, k, 2 * k - 1, k, (0, 0))
        };
        self.place(&spec, PlacementKind::Internal, Some(dir), None)
    }

    /// Places a corner window of the next line in `dir` using a
    /// (2k−1)×(2k−1) lookahead. The extent does not change.
    pub fn corner_extend(&mut self, dir: Direction, corner: Corner) -> Option<KGrid> {
        assert!(
            self.positions(dir) >= self.k,
            "corner lookahead leaves the band"
        );
        let spec = self.corner_spec(dir, corner);
        self.place(&spec, PlacementKind::Corner, Some(dir), Some(corner))
    }

    fn naive_corner(&mut self, dir: Direction, corner: Corner) -> Option<KGrid> {
        let j = match corner {
            Corner::First => 0,
            Corner::Last => self.positions(dir) - 1,
        };
        let (r, c) = self.window_pos(dir, j);
        self.place(
            &BlockSpec::single(r, c, self.k),
            PlacementKind::Naive,
            Some(dir),
            Some(corner),
        )
    }

    fn delete_leftover(&mut self, dir: Direction, j: usize) -> bool {
        let (r, c) = self.window_pos(dir, j);
        let Some(g) = self.droplet.known_window(r, c) else {
            return false;
        };
        if self.ix.remove(&g).is_err() {
            return false;
        }
        self.droplet.mark_committed(r, c);
        self.stats.leftover += 1;
        self.observer.placed(&Placement {
            kind: PlacementKind::Leftover,
            direction: Some(dir),
            corner: None,
            row: r,
            col: c,
            grid: g,
            block: None,
        });
        true
    }

    fn line_body(&mut self, dir: Direction, naive_corners: bool) -> Result<(), StepFailure> {
        let k = self.k;
        let l = self.positions(dir);
        for corner in [Corner::First, Corner::Last] {
            let placed = if naive_corners {
                self.naive_corner(dir, corner)
            } else {
                self.corner_extend(dir, corner)
            };
            if placed.is_none() {
                return Err(StepFailure::Corner);
            }
        }
        let last_internal = (l - k).min(l - 2);
        for j in 1..=last_internal {
            if self.internal_extend(dir, j).is_none() {
                return Err(StepFailure::Internal);
            }
        }
        for j in last_internal + 1..l - 1 {
            if !self.delete_leftover(dir, j) {
                return Err(StepFailure::Leftover);
            }
        }
        Ok(())
    }

    fn line_step(&mut self, dir: Direction, naive_corners: bool) -> Result<(), StepFailure> {
        let tx = self.begin();
        match self.line_body(dir, naive_corners) {
            Ok(()) => {
                self.commit(tx);
                self.grow_extent(dir);
                Ok(())
            }
            Err(e) => {
                self.undo(tx);
                Err(e)
            }
        }
    }

    /// One new column: corners, internals, then leftover deletions. On any
    /// failure the droplet and deck are restored. Needs height exactly 3k.
    pub fn single_column_extend(&mut self, dir: Direction) -> Result<(), StepFailure> {
        assert!(dir.is_horizontal(), "columns extend right or left");
        assert_eq!(
            self.droplet.height,
            3 * self.k,
            "column extension needs height 3k"
        );
        self.line_step(dir, false)?;
        self.stats.columns += 1;
        Ok(())
    }

    /// Up to k−1 columns with naive corners; returns how many were added.
    /// Stops early once the width exceeds n.
    pub fn boundary_columns(&mut self, dir: Direction) -> usize {
        assert!(dir.is_horizontal(), "columns extend right or left");
        self.boundary(dir)
    }

    /// One new row; needs width exactly n.
    pub fn single_row_extend(&mut self, dir: Direction) -> Result<(), StepFailure> {
        assert!(!dir.is_horizontal(), "rows extend up or down");
        assert_eq!(self.droplet.width, self.n, "row extension needs width n");
        self.line_step(dir, false)?;
        self.stats.rows += 1;
        Ok(())
    }

    pub fn boundary_rows(&mut self, dir: Direction) -> usize {
        assert!(!dir.is_horizontal(), "rows extend up or down");
        self.boundary(dir)
    }

    fn boundary(&mut self, dir: Direction) -> usize {
        let mut added = 0;
        while added + 1 < self.k && self.span(dir) <= self.n {
            if self.line_step(dir, true).is_err() {
                break;
            }
            added += 1;
            if dir.is_horizontal() {
                self.stats.boundary_columns += 1;
            } else {
                self.stats.boundary_rows += 1;
            }
        }
        added
    }

    fn grow(&mut self, dir: Direction) -> Result<(), Outcome> {
        let stage = if dir.is_horizontal() {
            Stage::Column
        } else {
            Stage::Row
        };
        let too_big = |this: &Self| {
            (this.span(dir) > this.n)
                .then(|| abort(stage, format!("{dir:?} growth passed n = {}", this.n)))
        };
        loop {
            let step = if dir.is_horizontal() {
                self.single_column_extend(dir)
            } else {
                self.single_row_extend(dir)
            };
            match step {
                Ok(()) => {
                    if let Some(a) = too_big(self) {
                        return Err(a);
                    }
                }
                Err(StepFailure::Internal) => return Ok(()),
                Err(StepFailure::Leftover) => {
                    return Err(abort(
                        Stage::Leftover,
                        format!("{dir:?} leftover window not in deck"),
                    ))
                }
                Err(StepFailure::Corner) => {
                    self.boundary(dir);
                    return match too_big(self) {
                        Some(a) => Err(a),
                        None => Ok(()),
                    };
                }
            }
        }
    }

    fn initial(&mut self) -> Result<(), Outcome> {
        let first = self.ix.order().next().expect("index is never empty");
        self.ix.remove(&first).expect("first element has a copy");
        let d = &mut self.droplet;
        let (top, left) = (d.top, d.left);
        d.place(top, left, &first);
        d.height = self.k;
        d.width = self.k;
        self.observer.placed(&Placement {
            kind: PlacementKind::Initial,
            direction: None,
            corner: None,
            row: top,
            col: left,
            grid: first,
            block: None,
        });
        let target = 3 * self.k;
        for dir in [Direction::Down, Direction::Up] {
            while self.droplet.height < target && self.naive_extend(dir).is_some() {}
        }
        if self.droplet.height < target {
            return Err(abort(
                Stage::Initial,
                format!("initial band stopped at height {}", self.droplet.height),
            ));
        }
        Ok(())
    }

    fn phases(&mut self) -> Result<Picture, Outcome> {
        if self.n == self.k {
            let g = self.ix.order().next().expect("index is never empty");
            self.ix.remove(&g).expect("first element has a copy");
            return Ok(Picture::from_grid(g.to_grid()).expect("k ≥ 1"));
        }
        self.initial()?;
        self.grow(Direction::Right)?;
        self.grow(Direction::Left)?;
        if self.droplet.width != self.n {
            return Err(abort(
                Stage::Column,
                format!(
                    "width {} after column growth, expected {}",
                    self.droplet.width, self.n
                ),
            ));
        }
        self.grow(Direction::Up)?;
        self.grow(Direction::Down)?;
        if self.droplet.height != self.n {
            return Err(abort(
                Stage::Row,
                format!(
                    "height {} after row growth, expected {}",
                    self.droplet.height, self.n
                ),
            ));
        }
        Ok(Picture::from_grid(self.droplet.to_grid()).expect("droplet is n×n"))
    }

    /// Runs every phase on a fresh reconstructor.
    pub fn run(&mut self) -> ReconstructionResult {
        assert_eq!(self.droplet.height, 0, "run needs a fresh reconstructor");
        let outcome = match self.phases() {
            Ok(p) => Outcome::Success(p),
            Err(a) => a,
        };
        self.stats.deck_remaining = self.ix.remaining_total();
        ReconstructionResult {
            outcome,
            stats: self.stats.clone(),
        }
    }
}

#[cfg(test)]
mod tests;
