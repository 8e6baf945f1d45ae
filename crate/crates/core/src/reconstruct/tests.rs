use super::*;
use crate::deck::deck;
use crate::grid::random_picture;

fn truth(n: usize, seed: u64) -> Picture {
    random_picture(n, seed).unwrap()
}

fn seeded(p: &Picture, k: usize, region: Region) -> Reconstructor {
    let d = deck(p, k).unwrap();
    Reconstructor::from_region(&d, p, region, 5, ()).unwrap()
}

fn truth_crop(p: &Picture, r: &Reconstructor, region: Region) -> BitGrid {
    let (top, left, h, w) = r.extent();
    let origin = Droplet::origin(r.n(), r.k());
    let row = region.row - 1 + top - origin;
    let col = region.col - 1 + left - origin;
    p.as_grid().crop(row, col, h, w)
}

/// Replaces one copy of `g` by a window that does not occur in the deck.
fn swap_out(d: &Deck, g: &KGrid) -> Deck {
    let k = d.k();
    let mut out = Deck::new(k).unwrap();
    for (h, m) in d.iter() {
        let m = if h == g { m - 1 } else { m };
        if m > 0 {
            out.insert(*h, m).unwrap();
        }
    }
    let mut bits = 0u64;
    loop {
        let s: String = (0..k * k)
            .map(|i| if bits >> i & 1 == 1 { '1' } else { '0' })
            .collect();
        let cand = KGrid::from_bit_string(k, &s).unwrap();
        if d.multiplicity(&cand) == 0 {
            out.insert(cand, 1).unwrap();
            return out;
        }
        bits += 1;
    }
}

#[test]
fn n_equals_k_returns_the_element() {
    let p = Picture::from_rows(&[[1, 0, 1], [0, 1, 1], [0, 0, 1]]).unwrap();
    let r = reconstruct(&deck(&p, 3).unwrap(), 9).unwrap();
    assert_eq!(r.outcome, Outcome::Success(p));
    assert_eq!(r.stats.deck_remaining, 0);
}

#[test]
fn short_pictures_are_unsupported() {
    let p = truth(8, 1);
    let err = reconstruct(&deck(&p, 3).unwrap(), 0).unwrap_err();
    assert!(matches!(err, Error::Unsupported(_)));
}

#[test]
fn constant_picture_reconstructs() {
    let p = Picture::zeros(9).unwrap();
    let r = reconstruct(&deck(&p, 3).unwrap(), 4).unwrap();
    assert_eq!(r.outcome, Outcome::Success(p));
    assert_eq!(r.stats.deck_remaining, 0);
}

#[test]
fn end_to_end_mistake_free_run() {
    let p = truth(48, 11);
    let d = deck(&p, 5).unwrap();
    let r = reconstruct(&d, 3).unwrap();
    assert_eq!(r.outcome, Outcome::Success(p));
    assert_eq!(r.stats.deck_remaining, 0);
    assert_eq!(r.stats.columns + r.stats.boundary_columns, 48 - 5);
    assert_eq!(reconstruct(&d, 3).unwrap(), r);
}

#[test]
fn k1_output_usually_differs() {
    let mut differs = 0;
    for s in 0..20 {
        let p = truth(6, s);
        if let Outcome::Success(q) = reconstruct(&deck(&p, 1).unwrap(), s).unwrap().outcome {
            if q != p {
                differs += 1;
            }
        } else {
            differs += 1;
        }
    }
    assert!(differs >= 18, "{differs}");
}

#[test]
fn naive_extension_places_true_window() {
    let p = truth(30, 2);
    let region = Region {
        row: 10,
        col: 10,
        height: 5,
        width: 5,
    };
    let mut r = seeded(&p, 5, region);
    let g = r.naive_extend(Direction::Down).unwrap();
    assert_eq!(g, p.subgrid(11, 10, 5).unwrap());
    let g = r.naive_extend(Direction::Up).unwrap();
    assert_eq!(g, p.subgrid(9, 10, 5).unwrap());
    assert_eq!(r.droplet_grid(), truth_crop(&p, &r, region));
}

#[test]
fn naive_extension_fails_at_picture_edge() {
    let p = truth(30, 2);
    let region = Region {
        row: 26,
        col: 10,
        height: 5,
        width: 5,
    };
    let mut r = seeded(&p, 5, region);
    let before = r.index().remaining_total();
    assert_eq!(r.naive_extend(Direction::Down), None);
    assert_eq!(r.index().remaining_total(), before);
}

#[test]
fn interior_column_is_ground_truth() {
    let k = 4;
    let p = truth(40, 7);
    let region = Region {
        row: 12,
        col: 12,
        height: 3 * k,
        width: 3 * k,
    };
    let mut r = seeded(&p, k, region);
    let before = r.index().remaining_total();
    r.single_column_extend(Direction::Right).unwrap();
    assert_eq!(before - r.index().remaining_total(), 2 * k as u64 + 1);
    r.single_column_extend(Direction::Left).unwrap();
    assert_eq!(r.droplet_grid(), truth_crop(&p, &r, region));
    assert_eq!(r.extent().3, 3 * k + 2);
}

#[test]
fn corner_and_internal_place_true_windows() {
    let k = 4;
    let p = truth(40, 8);
    let region = Region {
        row: 5,
        col: 5,
        height: 3 * k,
        width: 3 * k,
    };
    let mut r = seeded(&p, k, region);
    let col = region.col + region.width - k + 1;
    let top = r.corner_extend(Direction::Right, Corner::First).unwrap();
    assert_eq!(top, p.subgrid(region.row, col, k).unwrap());
    let bottom = r.corner_extend(Direction::Right, Corner::Last).unwrap();
    assert_eq!(bottom, p.subgrid(region.row + 2 * k, col, k).unwrap());
    for j in 1..=k + 1 {
        let g = r.internal_extend(Direction::Right, j).unwrap();
        assert_eq!(g, p.subgrid(region.row + j, col, k).unwrap());
    }
}

#[test]
fn corner_fails_near_the_edge_and_boundary_fills_in() {
    let k = 4;
    let n = 40;
    let p = truth(n, 9);
    let width = n - (k - 1) - 10;
    let region = Region {
        row: 8,
        col: 11,
        height: 3 * k,
        width,
    };
    let mut r = seeded(&p, k, region);
    assert_eq!(r.corner_extend(Direction::Right, Corner::First), None);
    assert_eq!(
        r.single_column_extend(Direction::Right),
        Err(StepFailure::Corner)
    );
    assert_eq!(r.boundary_columns(Direction::Right), k - 1);
    assert_eq!(r.stats().boundary_columns, k as u32 - 1);
    assert_eq!(r.droplet_grid(), truth_crop(&p, &r, region));
    assert_eq!(r.boundary_columns(Direction::Right), 0);
}

#[test]
fn failed_column_rolls_back() {
    let k = 4;
    let p = truth(40, 10);
    let region = Region {
        row: 12,
        col: 12,
        height: 3 * k,
        width: 3 * k,
    };
    let col = region.col + region.width - k + 1;
    let leftover = p.subgrid(region.row + k + 2, col, k).unwrap();
    let d = swap_out(&deck(&p, k).unwrap(), &leftover);
    let mut r = Reconstructor::from_region(&d, &p, region, 5, ()).unwrap();
    let before = r.index().remaining_deck();
    let grid = r.droplet_grid();
    // Lookaheads covering the leftover window fail before deletion is reached.
    assert!(r.single_column_extend(Direction::Right).is_err());
    assert_eq!(r.index().remaining_deck(), before);
    assert_eq!(r.droplet_grid(), grid);
    assert_eq!(r.stats().rollbacks, 1);
}

#[test]
fn row_step_consumes_a_full_row() {
    let k = 4;
    let n = 30;
    let p = truth(n, 12);
    let region = Region {
        row: 10,
        col: 1,
        height: 3 * k,
        width: n,
    };
    let mut r = seeded(&p, k, region);
    let before = r.index().remaining_total();
    r.single_row_extend(Direction::Up).unwrap();
    r.single_row_extend(Direction::Down).unwrap();
    assert_eq!(before - r.index().remaining_total(), 2 * (n - k + 1) as u64);
    assert_eq!(r.droplet_grid(), truth_crop(&p, &r, region));
}

#[derive(Default)]
struct Log {
    events: Vec<PlacementKind>,
    depth: usize,
    blocks: usize,
}

impl Observer for Log {
    fn wants_blocks(&self) -> bool {
        true
    }
    fn placed(&mut self, p: &Placement<'_>) {
        self.events.push(p.kind);
        if let Some(b) = p.block {
            assert_eq!(b.cells.rows(), 2 * p.grid.k() - 1);
            assert_eq!(b.cells.window(b.commit.0, b.commit.1, p.grid.k()), p.grid);
            self.blocks += 1;
        }
    }
    fn checkpoint(&mut self) {
        self.depth += 1;
    }
    fn rollback(&mut self) {
        self.depth -= 1;
    }
    fn release(&mut self) {
        self.depth -= 1;
    }
}

#[test]
fn observer_sees_every_removal() {
    let p = truth(48, 11);
    let d = deck(&p, 5).unwrap();
    let mut log = Log::default();
    let r = reconstruct_observed(&d, 3, &mut log).unwrap();
    assert!(r.outcome.picture().is_some());
    assert_eq!(log.depth, 0);
    assert_eq!(log.events[0], PlacementKind::Initial);
    assert_eq!(log.blocks, r.stats.corner as usize);
    assert!(log.events.len() as u64 >= d.total());
}
