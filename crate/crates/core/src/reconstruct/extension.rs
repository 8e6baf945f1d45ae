//! The one-line extension predicate on explicit bands.

use crate::grid::BitGrid;
use crate::kgrid::KGrid;

use super::Direction;

/// Whether `t` extends `band` in direction `dir`: the leading k−1 lines of
/// `t` (on the side facing the band) equal the band's trailing k−1 lines.
///
/// For `Right`/`Left` the band must have exactly k rows, for `Up`/`Down`
/// exactly k columns; a band too thin to hold k−1 lines never fits.
pub fn fits(dir: Direction, band: &BitGrid, t: &KGrid) -> bool {
    let k = t.k();
    let (across, along) = match dir {
        Direction::Right | Direction::Left => (band.rows(), band.cols()),
        Direction::Up | Direction::Down => (band.cols(), band.rows()),
    };
    if across != k || along + 1 < k {
        return false;
    }
    (0..k).all(|i| {
        (0..k - 1).all(|j| {
            let (tv, bv) = match dir {
                Direction::Right => (t.get(i, j), band.get(i, along - (k - 1) + j)),
                Direction::Left => (t.get(i, j + 1), band.get(i, j)),
                Direction::Down => (t.get(j, i), band.get(along - (k - 1) + j, i)),
                Direction::Up => (t.get(j + 1, i), band.get(j, i)),
            };
            tv == bv
        })
    })
}

/// The band with `t`'s outer line appended, or `None` if `t` does not fit.
pub fn extend(dir: Direction, band: &BitGrid, t: &KGrid) -> Option<BitGrid> {
    if !fits(dir, band, t) {
        return None;
    }
    let k = t.k();
    let (rows, cols) = (band.rows(), band.cols());
    Some(match dir {
        Direction::Right => BitGrid::from_fn(rows, cols + 1, |r, c| {
            if c < cols {
                band.get(r, c)
            } else {
                t.get(r, k - 1)
            }
        }),
        Direction::Left => BitGrid::from_fn(rows, cols + 1, |r, c| {
            if c == 0 {
                t.get(r, 0)
            } else {
                band.get(r, c - 1)
            }
        }),
        Direction::Down => BitGrid::from_fn(rows + 1, cols, |r, c| {
            if r < rows {
                band.get(r, c)
            } else {
                t.get(k - 1, c)
            }
        }),
        Direction::Up => BitGrid::from_fn(rows + 1, cols, |r, c| {
            if r == 0 {
                t.get(0, c)
            } else {
                band.get(r - 1, c)
            }
        }),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s() -> BitGrid {
        BitGrid::from_rows(&[[1, 0, 1], [0, 1, 0], [1, 1, 0]])
    }

    fn t() -> KGrid {
        KGrid::from_rows(&[[0, 1, 0], [1, 0, 0], [1, 0, 1]]).unwrap()
    }

    #[test]
    fn drawn_right_extension() {
        assert!(fits(Direction::Right, &s(), &t()));
        let ext = extend(Direction::Right, &s(), &t()).unwrap();
        assert_eq!(
            ext,
            BitGrid::from_rows(&[[1, 0, 1, 0], [0, 1, 0, 0], [1, 1, 0, 1]])
        );
    }

    #[test]
    fn mismatched_overlap_rejected() {
        assert!(!fits(Direction::Left, &s(), &t()));
        assert!(!fits(Direction::Down, &s(), &t()));
        let thin = BitGrid::from_rows(&[[1, 0], [0, 1]]);
        assert!(!fits(Direction::Right, &thin, &t()));
    }

    #[test]
    fn constant_band_fits_its_own_shift() {
        for v in [0u8, 1] {
            let band = BitGrid::from_fn(3, 5, |_, _| v == 1);
            let g = KGrid::from_rows(&[[v; 3], [v; 3], [v; 3]]).unwrap();
            for dir in [Direction::Right, Direction::Left] {
                assert!(fits(dir, &band, &g));
            }
            let tall = BitGrid::from_fn(5, 3, |_, _| v == 1);
            for dir in [Direction::Up, Direction::Down] {
                assert!(fits(dir, &tall, &g));
            }
        }
    }

    #[test]
    fn transposed_extensions_agree() {
        let band = BitGrid::from_fn(3, 3, |r, c| s().get(c, r));
        let tt = KGrid::from_grid(&BitGrid::from_fn(3, 3, |r, c| t().get(c, r))).unwrap();
        let ext = extend(Direction::Down, &band, &tt).unwrap();
        let right = extend(Direction::Right, &s(), &t()).unwrap();
        assert_eq!(ext, BitGrid::from_fn(4, 3, |r, c| right.get(c, r)));
    }
}
