//! Mismatch census between a picture and a reconstruction: bad-window
//! marks, the grid graph, and interface paths between marked and unmarked
//! cells.
//!
//! Vertices are lattice points `(row, col)` with `0 ≤ row ≤ rows` and
//! `0 ≤ col ≤ cols`; cell `(r, c)` has corners `(r, c)` and `(r + 1, c + 1)`.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::grid::{BitGrid, Picture};

pub type Vertex = (usize, usize);

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MarkedGrid {
    marks: BitGrid,
}

impl MarkedGrid {
    pub fn new(rows: usize, cols: usize) -> Self {
        MarkedGrid {
            marks: BitGrid::new(rows, cols),
        }
    }

    pub fn from_grid(marks: BitGrid) -> Self {
        MarkedGrid { marks }
    }

    pub fn rows(&self) -> usize {
        self.marks.rows()
    }

    pub fn cols(&self) -> usize {
        self.marks.cols()
    }

    pub fn is_marked(&self, r: usize, c: usize) -> bool {
        self.marks.get(r, c)
    }

    pub fn mark(&mut self, r: usize, c: usize) {
        self.marks.set(r, c, true);
    }

    pub fn count(&self) -> usize {
        self.marks.count_ones()
    }

    pub fn as_grid(&self) -> &BitGrid {
        &self.marks
    }

    /// Marked cells in row-major order.
    pub fn marked_cells(&self) -> Vec<(usize, usize)> {
        (0..self.rows())
            .flat_map(|r| (0..self.cols()).map(move |c| (r, c)))
            .filter(|&(r, c)| self.is_marked(r, c))
            .collect()
    }

    /// `MARKS rows=R cols=C` followed by one line per row of `.`/`X`.
    pub fn to_text(&self) -> String {
        let mut s = format!("MARKS rows={} cols={}\n", self.rows(), self.cols());
        for r in 0..self.rows() {
            for c in 0..self.cols() {
                s.push(if self.is_marked(r, c) { 'X' } else { '.' });
            }
            s.push('\n');
        }
        s
    }

    fn marked_at(&self, r: isize, c: isize) -> Option<bool> {
        if r < 0 || c < 0 || r as usize >= self.rows() || c as usize >= self.cols() {
            return None;
        }
        Some(self.is_marked(r as usize, c as usize))
    }
}

/// Marks the upper-right cell of every k×k window of `output` that differs
/// from `truth` somewhere.
pub fn mark_bad_windows(truth: &Picture, output: &Picture, k: usize) -> Result<MarkedGrid> {
    mark_bad_windows_grid(truth.as_grid(), output.as_grid(), k)
}

pub fn mark_bad_windows_grid(truth: &BitGrid, output: &BitGrid, k: usize) -> Result<MarkedGrid> {
    let (rows, cols) = (truth.rows(), truth.cols());
    if (rows, cols) != (output.rows(), output.cols()) {
        return Err(Error::Input(format!(
            "extent mismatch: {rows}×{cols} vs {}×{}",
            output.rows(),
            output.cols()
        )));
    }
    if k == 0 || k > rows || k > cols {
        return Err(Error::Range(format!(
            "k = {k} does not fit a {rows}×{cols} grid"
        )));
    }
    let wrong = BitGrid::from_fn(rows, cols, |r, c| truth.get(r, c) != output.get(r, c));
    let mut m = MarkedGrid::new(rows, cols);
    for r in 0..=rows - k {
        for c in 0..=cols - k {
            if (0..k).any(|i| (0..k).any(|j| wrong.get(r + i, c + j))) {
                m.mark(r, c + k - 1);
            }
        }
    }
    Ok(m)
}

/// Marks cell `(r, c)` when the k×k window whose upper-right cell it is,
/// clipped to the grid, covers a `wrong` cell. Cells outside the grid count
/// as correct.
pub fn mark_clipped(wrong: &BitGrid, k: usize) -> MarkedGrid {
    let (rows, cols) = (wrong.rows(), wrong.cols());
    let mut m = MarkedGrid::new(rows, cols);
    for r in 0..rows {
        for c in 0..cols {
            let hit = (r..(r + k).min(rows))
                .any(|i| (c.saturating_sub(k - 1)..=c).any(|j| wrong.get(i, j)));
            if hit {
                m.mark(r, c);
            }
        }
    }
    m
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Step {
    Up,
    Down,
    Left,
    Right,
}

impl Step {
    fn apply(self, v: Vertex) -> Vertex {
        match self {
            Step::Up => (v.0 - 1, v.1),
            Step::Down => (v.0 + 1, v.1),
            Step::Left => (v.0, v.1 - 1),
            Step::Right => (v.0, v.1 + 1),
        }
    }

    fn between(a: Vertex, b: Vertex) -> Step {
        match (b.0 as isize - a.0 as isize, b.1 as isize - a.1 as isize) {
            (-1, 0) => Step::Up,
            (1, 0) => Step::Down,
            (0, -1) => Step::Left,
            (0, 1) => Step::Right,
            d => panic!("vertices {a:?} and {b:?} are not adjacent ({d:?})"),
        }
    }

    /// Cells on the traveller's (left, right) when taking this step from `v`.
    fn sides(self, v: Vertex) -> ((isize, isize), (isize, isize)) {
        let (y, x) = (v.0 as isize, v.1 as isize);
        match self {
            Step::Right => ((y - 1, x), (y, x)),
            Step::Left => ((y, x - 1), (y - 1, x - 1)),
            Step::Down => ((y, x), (y, x - 1)),
            Step::Up => ((y - 1, x - 1), (y - 1, x)),
        }
    }

    fn turn_left(self) -> Step {
        match self {
            Step::Down => Step::Right,
            Step::Right => Step::Up,
            Step::Up => Step::Left,
            Step::Left => Step::Down,
        }
    }

    fn turn_right(self) -> Step {
        self.turn_left().turn_left().turn_left()
    }
}

/// An undirected grid-graph edge, stored with its smaller endpoint first.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Edge {
    pub a: Vertex,
    pub b: Vertex,
}

impl Edge {
    pub fn new(u: Vertex, v: Vertex) -> Self {
        let (a, b) = if u <= v { (u, v) } else { (v, u) };
        Edge { a, b }
    }
}

/// The grid graph of a `rows × cols` array of cells.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GridGraph {
    pub rows: usize,
    pub cols: usize,
}

impl GridGraph {
    pub fn new(rows: usize, cols: usize) -> Self {
        GridGraph { rows, cols }
    }

    pub fn vertex_count(&self) -> usize {
        (self.rows + 1) * (self.cols + 1)
    }

    pub fn edge_count(&self) -> usize {
        (self.rows + 1) * self.cols + self.rows * (self.cols + 1)
    }

    pub fn edges(&self) -> impl Iterator<Item = Edge> + '_ {
        let h = (0..=self.rows)
            .flat_map(move |y| (0..self.cols).map(move |x| Edge::new((y, x), (y, x + 1))));
        let v = (0..self.rows)
            .flat_map(move |y| (0..=self.cols).map(move |x| Edge::new((y, x), (y + 1, x))));
        h.chain(v)
    }

    /// Cells bordering `e` (one on the outer boundary, two inside).
    pub fn incident_cells(&self, e: Edge) -> Vec<(usize, usize)> {
        let ((y, x), _) = (e.a, e.b);
        let candidates: [(isize, isize); 2] = if e.a.0 == e.b.0 {
            [(y as isize - 1, x as isize), (y as isize, x as isize)]
        } else {
            [(y as isize, x as isize - 1), (y as isize, x as isize)]
        };
        candidates
            .into_iter()
            .filter(|&(r, c)| {
                r >= 0 && c >= 0 && (r as usize) < self.rows && (c as usize) < self.cols
            })
            .map(|(r, c)| (r as usize, c as usize))
            .collect()
    }

    fn neighbours(&self, v: Vertex) -> impl Iterator<Item = (Step, Vertex)> + '_ {
        [Step::Down, Step::Right, Step::Left, Step::Up]
            .into_iter()
            .filter(move |s| match s {
                Step::Up => v.0 > 0,
                Step::Down => v.0 < self.rows,
                Step::Left => v.1 > 0,
                Step::Right => v.1 < self.cols,
            })
            .map(move |s| (s, s.apply(v)))
    }
}

/// Edges with a marked cell on one side and an unmarked cell on the other.
pub fn separating_edges(m: &MarkedGrid) -> Vec<Edge> {
    let g = GridGraph::new(m.rows(), m.cols());
    g.edges()
        .filter(|&e| match g.incident_cells(e).as_slice() {
            [p, q] => m.is_marked(p.0, p.1) != m.is_marked(q.0, q.1),
            _ => false,
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InterfacePath {
    pub vertices: Vec<Vertex>,
    /// Whether the path returns to its first vertex.
    pub closed: bool,
}

impl InterfacePath {
    /// ℓ(γ): the number of edges.
    pub fn len(&self) -> usize {
        self.vertices.len().saturating_sub(1)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn steps(&self) -> Vec<Step> {
        self.vertices
            .windows(2)
            .map(|w| Step::between(w[0], w[1]))
            .collect()
    }

    pub fn reversed(&self) -> Self {
        let mut vertices = self.vertices.clone();
        vertices.reverse();
        InterfacePath {
            vertices,
            closed: self.closed,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct StepCounts {
    pub up: usize,
    pub down: usize,
    pub left: usize,
    pub right: usize,
    pub contributing: usize,
}

/// Step census; an edge contributes when it is a down-step after a right- or
/// down-step, a right-step after a right-step, or a left-step after a down-
/// or left-step.
pub fn classify_steps(p: &InterfacePath) -> StepCounts {
    let steps = p.steps();
    let mut c = StepCounts::default();
    for (i, s) in steps.iter().enumerate() {
        match s {
            Step::Up => c.up += 1,
            Step::Down => c.down += 1,
            Step::Left => c.left += 1,
            Step::Right => c.right += 1,
        }
        if i > 0 {
            use Step::*;
            if matches!(
                (steps[i - 1], *s),
                (Right, Down) | (Down, Down) | (Right, Right) | (Down, Left) | (Left, Left)
            ) {
                c.contributing += 1;
            }
        }
    }
    c
}

/// Whether every left-step followed later by a right-step in the same cell
/// column is at least `k` rows away from it.
pub fn left_right_separated(p: &InterfacePath, k: usize) -> bool {
    let hs: Vec<(Step, usize, usize)> = p
        .vertices
        .windows(2)
        .filter_map(|w| {
            let s = Step::between(w[0], w[1]);
            let col = w[0].1.min(w[1].1);
            matches!(s, Step::Left | Step::Right).then_some((s, w[0].0, col))
        })
        .collect();
    hs.iter().enumerate().all(|(i, &(s, row, col))| {
        s != Step::Left
            || hs[i + 1..]
                .iter()
                .all(|&(t, r2, c2)| t != Step::Right || c2 != col || row.abs_diff(r2) >= k)
    })
}

struct Tracer<'a> {
    m: &'a MarkedGrid,
    g: GridGraph,
    unused: BTreeSet<Edge>,
}

impl Tracer<'_> {
    fn new(m: &MarkedGrid) -> Tracer<'_> {
        Tracer {
            m,
            g: GridGraph::new(m.rows(), m.cols()),
            unused: separating_edges(m).into_iter().collect(),
        }
    }

    fn degree(&self, v: Vertex) -> usize {
        self.g
            .neighbours(v)
            .filter(|&(_, w)| self.unused.contains(&Edge::new(v, w)))
            .count()
    }

    fn marked_left(&self, s: Step, v: Vertex) -> bool {
        let (l, _) = s.sides(v);
        self.m.marked_at(l.0, l.1) == Some(true)
    }

    fn trace(&mut self, start: Vertex, first: Option<Step>) -> InterfacePath {
        let mut vertices = vec![start];
        let mut cur = start;
        let mut prev: Option<Step> = None;
        let mut side: Option<bool> = None;
        loop {
            let opts: Vec<Step> = self
                .g
                .neighbours(cur)
                .filter(|&(_, w)| self.unused.contains(&Edge::new(cur, w)))
                .map(|(s, _)| s)
                .collect();
            let pick = match (prev, side) {
                (None, _) => first
                    .filter(|s| opts.contains(s))
                    .or_else(|| opts.first().copied()),
                (Some(p), Some(left)) => {
                    let order = if left {
                        [p.turn_left(), p, p.turn_right()]
                    } else {
                        [p.turn_right(), p, p.turn_left()]
                    };
                    order
                        .into_iter()
                        .find(|s| opts.contains(s) && self.marked_left(*s, cur) == left)
                        .or_else(|| opts.first().copied())
                }
                (Some(_), None) => opts.first().copied(),
            };
            let Some(s) = pick else { break };
            if side.is_none() {
                side = Some(self.marked_left(s, cur));
            }
            let next = s.apply(cur);
            self.unused.remove(&Edge::new(cur, next));
            vertices.push(next);
            cur = next;
            prev = Some(s);
        }
        let closed = vertices.len() > 1 && cur == start;
        InterfacePath { vertices, closed }
    }
}

/// Splits the separating edges into paths. Open paths are traced from
/// odd-degree vertices in lexicographic order; the remaining edges form
/// cycles, each traced from its least vertex with marked cells on the left.
/// At a vertex where two marked cells meet diagonally the path turns toward
/// the marked cell it is following.
pub fn extract_interfaces(m: &MarkedGrid) -> Vec<InterfacePath> {
    let mut t = Tracer::new(m);
    let mut out = Vec::new();
    let mut endpoints: Vec<Vertex> = t
        .unused
        .iter()
        .flat_map(|e| [e.a, e.b])
        .collect::<BTreeSet<_>>()
        .into_iter()
        .filter(|&v| t.degree(v) % 2 == 1)
        .collect();
    endpoints.sort();
    for v in endpoints {
        while t.degree(v) % 2 == 1 {
            out.push(t.trace(v, None));
        }
    }
    while let Some(e) = t.unused.iter().next().copied() {
        let start = e.a;
        let first = [Step::Right, Step::Down].into_iter().find(|&s| {
            t.unused.contains(&Edge::new(start, s.apply(start))) && t.marked_left(s, start)
        });
        out.push(t.trace(start, first));
    }
    out
}

/// The interface path traced from `start`, if a separating edge meets it.
pub fn interface_from(m: &MarkedGrid, start: Vertex) -> Option<InterfacePath> {
    let mut t = Tracer::new(m);
    (t.degree(start) > 0).then(|| t.trace(start, None))
}

/// Interface analysis of a corner lookahead block in the standard frame:
/// droplet to the left, the placed window in the upper-left corner.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CornerReport {
    pub marks: MarkedGrid,
    pub path: Option<InterfacePath>,
}

impl CornerReport {
    pub fn no_up_steps(&self) -> bool {
        self.path
            .as_ref()
            .is_some_and(|p| classify_steps(p).up == 0)
    }

    pub fn separated(&self, k: usize) -> bool {
        self.path
            .as_ref()
            .is_some_and(|p| left_right_separated(p, k))
    }

    pub fn length_within(&self, bound: usize) -> bool {
        self.path.as_ref().is_some_and(|p| p.len() <= bound)
    }
}

/// `wrong` is the (2k−1)×(2k−1) block's mismatch map; its first k−1
/// columns overlap the droplet. The interface starts at the top-left vertex
/// of the new part, `(0, k − 1)`.
pub fn corner_report(wrong: &BitGrid, k: usize) -> CornerReport {
    let marks = mark_clipped(wrong, k);
    let path = interface_from(&marks, (0, k - 1));
    CornerReport { marks, path }
}

/// Human-readable summary of a census, for the CLI.
pub fn describe(m: &MarkedGrid, paths: &[InterfacePath]) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "marked {}", m.count());
    for (i, p) in paths.iter().enumerate() {
        let c = classify_steps(p);
        let _ = writeln!(
            s,
            "path {i}: start={:?} length={} closed={} up={} down={} left={} right={} contributing={}",
            p.vertices[0],
            p.len(),
            p.closed,
            c.up,
            c.down,
            c.left,
            c.right,
            c.contributing
        );
    }
    s
}
