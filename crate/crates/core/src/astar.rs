//! Grid baseline: rasterize the map to occupied and free cells and search
//! the shortest 8-connected path with A*.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, VecDeque};
use std::fmt::Write as _;

use thiserror::Error;

use crate::geometry::{Feature, Point2};
use crate::map::{Bounds, WaterwayMap};
use crate::num::{cmp_real, Real};
use crate::profile::{WidthProfile, WidthSample};

/// Grid cell; `x` is the column and `y` the row counted from the grid origin.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Cell {
    pub x: usize,
    pub y: usize,
}

impl Cell {
    pub fn new(x: usize, y: usize) -> Self {
        Self { x, y }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OccupancyGrid<T> {
    pub origin: Point2<T>,
    pub cell_size: T,
    pub width: usize,
    pub height: usize,
    occupied: Vec<bool>,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GridError {
    #[error("cell size must be positive")]
    BadCellSize,
    #[error("grid bounds are empty")]
    EmptyBounds,
    #[error("reference point lies in an occupied cell")]
    ReferenceBlocked,
    #[error("point outside the grid")]
    OutOfGrid,
    #[error("start or goal cell is occupied")]
    Blocked,
    #[error("no path between start and goal")]
    NoPath,
}

impl<T: Real> OccupancyGrid<T> {
    /// All-free grid.
    pub fn empty(origin: Point2<T>, cell_size: T, width: usize, height: usize) -> Self {
        Self {
            origin,
            cell_size,
            width,
            height,
            occupied: vec![false; width * height],
        }
    }

    /// Grid from row-major occupancy flags (`true` = occupied).
    pub fn from_cells(cell_size: T, width: usize, height: usize, occupied: Vec<bool>) -> Self {
        assert_eq!(occupied.len(), width * height);
        Self {
            origin: Point2::origin(),
            cell_size,
            width,
            height,
            occupied,
        }
    }

    fn idx(&self, c: Cell) -> usize {
        c.y * self.width + c.x
    }

    pub fn contains(&self, c: Cell) -> bool {
        c.x < self.width && c.y < self.height
    }

    pub fn is_occupied(&self, c: Cell) -> bool {
        !self.contains(c) || self.occupied[self.idx(c)]
    }

    pub fn is_free(&self, c: Cell) -> bool {
        !self.is_occupied(c)
    }

    pub fn set_occupied(&mut self, c: Cell, occupied: bool) {
        if self.contains(c) {
            let i = self.idx(c);
            self.occupied[i] = occupied;
        }
    }

    pub fn occupied_count(&self) -> usize {
        self.occupied.iter().filter(|&&o| o).count()
    }

    pub fn cell_of(&self, p: Point2<T>) -> Option<Cell> {
        let fx = ((p.x - self.origin.x) / self.cell_size).floor();
        let fy = ((p.y - self.origin.y) / self.cell_size).floor();
        if fx < T::zero() || fy < T::zero() {
            return None;
        }
        let c = Cell::new(fx.to_usize()?, fy.to_usize()?);
        self.contains(c).then_some(c)
    }

    pub fn center_of(&self, c: Cell) -> Point2<T> {
        let half = T::lit(0.5);
        Point2::new(
            self.origin.x + (T::from_usize(c.x).unwrap() + half) * self.cell_size,
            self.origin.y + (T::from_usize(c.y).unwrap() + half) * self.cell_size,
        )
    }

    fn cell_box(&self, c: Cell) -> (Point2<T>, Point2<T>) {
        let lo = Point2::new(
            self.origin.x + T::from_usize(c.x).unwrap() * self.cell_size,
            self.origin.y + T::from_usize(c.y).unwrap() * self.cell_size,
        );
        (lo, lo + Point2::new(self.cell_size, self.cell_size))
    }

    /// Cell index range covering `[lo, hi]`, clamped to the grid.
    fn span(&self, lo: T, hi: T, origin: T, n: usize) -> (usize, usize) {
        let a = ((lo - origin) / self.cell_size).floor().max(T::zero());
        let b = ((hi - origin) / self.cell_size).floor().max(T::zero());
        let a = a.to_usize().unwrap_or(0).min(n.saturating_sub(1));
        let b = b.to_usize().unwrap_or(0).min(n.saturating_sub(1));
        (a, b)
    }

    /// Marks every cell whose closed square touches the segment.
    fn stamp_segment(&mut self, a: Point2<T>, b: Point2<T>) {
        let (x0, x1) = self.span(a.x.min(b.x), a.x.max(b.x), self.origin.x, self.width);
        let (y0, y1) = self.span(a.y.min(b.y), a.y.max(b.y), self.origin.y, self.height);
        for y in y0.saturating_sub(1)..=(y1 + 1).min(self.height - 1) {
            for x in x0.saturating_sub(1)..=(x1 + 1).min(self.width - 1) {
                let c = Cell::new(x, y);
                let (lo, hi) = self.cell_box(c);
                if segment_touches_box(a, b, lo, hi) {
                    self.set_occupied(c, true);
                }
            }
        }
    }

    /// PGM (plain, maxval 1): 0 free, 1 occupied; top row is the largest `y`.
    pub fn to_pgm(&self) -> String {
        let mut out = format!("P2\n{} {}\n1\n", self.width, self.height);
        for y in (0..self.height).rev() {
            let row: Vec<&str> = (0..self.width)
                .map(|x| if self.is_occupied(Cell::new(x, y)) { "1" } else { "0" })
                .collect();
            out.push_str(&row.join(" "));
            out.push('\n');
        }
        out
    }
}

/// Liang-Barsky clip of segment `ab` against the closed box `[lo, hi]`.
fn segment_touches_box<T: Real>(a: Point2<T>, b: Point2<T>, lo: Point2<T>, hi: Point2<T>) -> bool {
    let d = b - a;
    let mut t0 = T::zero();
    let mut t1 = T::one();
    for (p, q) in [
        (-d.x, a.x - lo.x),
        (d.x, hi.x - a.x),
        (-d.y, a.y - lo.y),
        (d.y, hi.y - a.y),
    ] {
        if p == T::zero() {
            if q < T::zero() {
                return false;
            }
        } else {
            let r = q / p;
            if p < T::zero() {
                t0 = t0.max(r);
            } else {
                t1 = t1.min(r);
            }
            if t0 > t1 {
                return false;
            }
        }
    }
    true
}

/// Occupancy grid over `bounds`: cells touched by a boundary element are
/// occupied, and so is every free cell not 4-connected to the seed.
pub fn rasterize<T: Real>(
    map: &WaterwayMap<T>,
    cell_size: T,
    bounds: Bounds<T>,
    seed: Option<Point2<T>>,
) -> Result<OccupancyGrid<T>, GridError> {
    if !(cell_size > T::zero()) {
        return Err(GridError::BadCellSize);
    }
    if !(bounds.width() >= T::zero() && bounds.height() >= T::zero()) {
        return Err(GridError::EmptyBounds);
    }
    let w = (bounds.width() / cell_size).floor().to_usize().ok_or(GridError::EmptyBounds)? + 1;
    let h = (bounds.height() / cell_size).floor().to_usize().ok_or(GridError::EmptyBounds)? + 1;
    let mut grid = OccupancyGrid::empty(bounds.min, cell_size, w, h);
    for e in map.elements() {
        match e.feature {
            Feature::Segment { a, b } => grid.stamp_segment(a, b),
            Feature::Point(p) => grid.stamp_segment(p, p),
        }
    }
    if let Some(seed) = seed.or(map.reference()) {
        let start = grid.cell_of(seed).ok_or(GridError::ReferenceBlocked)?;
        if grid.is_occupied(start) {
            return Err(GridError::ReferenceBlocked);
        }
        let mut reached = vec![false; w * h];
        let mut queue = VecDeque::from([start]);
        reached[grid.idx(start)] = true;
        while let Some(c) = queue.pop_front() {
            for n in neighbors4(c, w, h) {
                let i = grid.idx(n);
                if !reached[i] && !grid.occupied[i] {
                    reached[i] = true;
                    queue.push_back(n);
                }
            }
        }
        for (o, r) in grid.occupied.iter_mut().zip(reached) {
            *o = *o || !r;
        }
    }
    Ok(grid)
}

fn neighbors4(c: Cell, w: usize, h: usize) -> impl Iterator<Item = Cell> {
    let mut out = Vec::with_capacity(4);
    if c.x > 0 {
        out.push(Cell::new(c.x - 1, c.y));
    }
    if c.x + 1 < w {
        out.push(Cell::new(c.x + 1, c.y));
    }
    if c.y > 0 {
        out.push(Cell::new(c.x, c.y - 1));
    }
    if c.y + 1 < h {
        out.push(Cell::new(c.x, c.y + 1));
    }
    out.into_iter()
}

/// 8-neighbours reachable without cutting an occupied corner, with step cost in cells.
pub fn moves<T: Real>(grid: &OccupancyGrid<T>, c: Cell) -> Vec<(Cell, T)> {
    let mut out = Vec::with_capacity(8);
    for dy in -1i64..=1 {
        for dx in -1i64..=1 {
            if dx == 0 && dy == 0 {
                continue;
            }
            let nx = c.x as i64 + dx;
            let ny = c.y as i64 + dy;
            if nx < 0 || ny < 0 {
                continue;
            }
            let n = Cell::new(nx as usize, ny as usize);
            if grid.is_occupied(n) {
                continue;
            }
            if dx != 0 && dy != 0 {
                let side_a = Cell::new(nx as usize, c.y);
                let side_b = Cell::new(c.x, ny as usize);
                if grid.is_occupied(side_a) || grid.is_occupied(side_b) {
                    continue;
                }
                out.push((n, T::SQRT_2()));
            } else {
                out.push((n, T::one()));
            }
        }
    }
    out
}

/// Octile distance in meters.
pub fn octile<T: Real>(a: Cell, b: Cell, cell_size: T) -> T {
    let dx = T::from_usize(a.x.abs_diff(b.x)).unwrap();
    let dy = T::from_usize(a.y.abs_diff(b.y)).unwrap();
    (dx.max(dy) + (T::SQRT_2() - T::one()) * dx.min(dy)) * cell_size
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridPath<T> {
    pub cells: Vec<Cell>,
    pub polyline: Vec<Point2<T>>,
    /// Path cost in meters.
    pub cost: T,
}

impl<T: Real> GridPath<T> {
    /// CSV in the modified-path schema, timed at a nominal constant `speed`.
    pub fn to_csv(&self, speed: T) -> String {
        let mut out = String::from("t_s,x,y,heading_rad,v_mps,omega_radps\n");
        let mut t = T::zero();
        let n = self.polyline.len();
        let heading_at = |i: usize| {
            if n < 2 {
                T::zero()
            } else {
                let j = i.min(n - 2);
                (self.polyline[j + 1] - self.polyline[j]).angle()
            }
        };
        for i in 0..n {
            if i > 0 {
                t = t + self.polyline[i - 1].distance(self.polyline[i]) / speed;
            }
            let _ = writeln!(
                out,
                "{:.6},{:.6},{:.6},{:.6},{:.6},{:.6}",
                t,
                self.polyline[i].x,
                self.polyline[i].y,
                heading_at(i),
                speed,
                0.0
            );
        }
        out
    }
}

struct Open<T> {
    f: T,
    h: T,
    cell: Cell,
}

impl<T: Real> PartialEq for Open<T> {
    fn eq(&self, o: &Self) -> bool {
        self.cmp(o) == Ordering::Equal
    }
}
impl<T: Real> Eq for Open<T> {}
impl<T: Real> PartialOrd for Open<T> {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl<T: Real> Ord for Open<T> {
    // reversed so that the max-heap pops the smallest (f, h, cell)
    fn cmp(&self, o: &Self) -> Ordering {
        cmp_real(&o.f, &self.f)
            .then_with(|| cmp_real(&o.h, &self.h))
            .then_with(|| o.cell.cmp(&self.cell))
    }
}

/// Minimum-cost 8-connected path; ties go to the smaller heuristic, then the
/// smaller cell.
pub fn astar<T: Real>(grid: &OccupancyGrid<T>, start: Cell, goal: Cell) -> Result<GridPath<T>, GridError> {
    if !grid.contains(start) || !grid.contains(goal) {
        return Err(GridError::OutOfGrid);
    }
    if grid.is_occupied(start) || grid.is_occupied(goal) {
        return Err(GridError::Blocked);
    }
    let n = grid.width * grid.height;
    let mut g = vec![T::infinity(); n];
    let mut parent: Vec<Option<Cell>> = vec![None; n];
    let mut closed = vec![false; n];
    let mut open = BinaryHeap::new();
    g[grid.idx(start)] = T::zero();
    let h0 = octile(start, goal, grid.cell_size);
    open.push(Open { f: h0, h: h0, cell: start });
    while let Some(Open { cell, .. }) = open.pop() {
        let ci = grid.idx(cell);
        if closed[ci] {
            continue;
        }
        closed[ci] = true;
        if cell == goal {
            let mut cells = vec![goal];
            let mut cur = goal;
            while let Some(p) = parent[grid.idx(cur)] {
                cells.push(p);
                cur = p;
            }
            cells.reverse();
            return Ok(GridPath {
                polyline: cells.iter().map(|&c| grid.center_of(c)).collect(),
                cells,
                cost: g[ci],
            });
        }
        for (next, step) in moves(grid, cell) {
            let ni = grid.idx(next);
            if closed[ni] {
                continue;
            }
            let cand = g[ci] + step * grid.cell_size;
            if cand < g[ni] {
                g[ni] = cand;
                parent[ni] = Some(cell);
                let h = octile(next, goal, grid.cell_size);
                open.push(Open { f: cand + h, h, cell: next });
            }
        }
    }
    Err(GridError::NoPath)
}

/// Clearance at each path vertex against the whole map.
pub fn clearance_profile<T: Real>(path: &GridPath<T>, map: &WaterwayMap<T>) -> WidthProfile<T> {
    let mut s = T::zero();
    let mut samples = Vec::with_capacity(path.polyline.len());
    for (i, &p) in path.polyline.iter().enumerate() {
        if i > 0 {
            s = s + path.polyline[i - 1].distance(p);
        }
        samples.push(WidthSample::new(s, map.clearance(p), p));
    }
    WidthProfile::from_samples_unchecked(samples)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(x: f64, y: f64) -> Point2<f64> {
        Point2::new(x, y)
    }

    #[test]
    fn diagonal_and_straight_costs() {
        let g = OccupancyGrid::<f64>::empty(p(0.0, 0.0), 5.0, 10, 10);
        let path = astar(&g, Cell::new(0, 0), Cell::new(9, 9)).unwrap();
        assert!((path.cost - 9.0 * 2f64.sqrt() * 5.0).abs() < 1e-9);
        let path = astar(&g, Cell::new(0, 0), Cell::new(0, 5)).unwrap();
        assert!((path.cost - 25.0).abs() < 1e-12);
    }

    #[test]
    fn corner_cutting_forbidden() {
        let mut g = OccupancyGrid::<f64>::empty(p(0.0, 0.0), 1.0, 2, 2);
        g.set_occupied(Cell::new(1, 0), true);
        g.set_occupied(Cell::new(0, 1), true);
        assert_eq!(astar(&g, Cell::new(0, 0), Cell::new(1, 1)), Err(GridError::NoPath));
    }

    #[test]
    fn horizontal_segment_stamps_one_band() {
        let map: WaterwayMap<f64> = WaterwayMap::builder()
            .chain(1, false, vec![p(0.0, 22.0), p(49.0, 22.0)])
            .build()
            .unwrap();
        let b = Bounds::new(p(0.0, 0.0), p(49.9, 49.9));
        let g = rasterize(&map, 5.0, b, None).unwrap();
        assert_eq!((g.width, g.height), (10, 10));
        for y in 0..10 {
            for x in 0..10 {
                assert_eq!(g.is_occupied(Cell::new(x, y)), y == 4);
            }
        }
    }

    #[test]
    fn closed_box_exterior_filled() {
        let map: WaterwayMap<f64> = WaterwayMap::builder()
            .chain(1, true, vec![p(12.0, 12.0), p(37.0, 12.0), p(37.0, 37.0), p(12.0, 37.0)])
            .reference(p(25.0, 25.0))
            .build()
            .unwrap();
        let b = Bounds::new(p(0.0, 0.0), p(49.9, 49.9));
        let g = rasterize(&map, 5.0, b, None).unwrap();
        // interior cells 3..=6 on both axes stay free; everything else is occupied
        for y in 0..10 {
            for x in 0..10 {
                let inside = (3..=6).contains(&x) && (3..=6).contains(&y);
                assert_eq!(g.is_free(Cell::new(x, y)), inside, "cell {x},{y}");
            }
        }
        assert!(g.to_pgm().starts_with("P2\n10 10\n1\n"));
    }

    #[test]
    fn centerline_profile_is_constant() {
        let map: WaterwayMap<f64> = WaterwayMap::builder()
            .chain(1, false, vec![p(0.0, 0.0), p(500.0, 0.0)])
            .chain(2, false, vec![p(0.0, 100.0), p(500.0, 100.0)])
            .build()
            .unwrap();
        let path = GridPath {
            cells: vec![],
            polyline: vec![p(0.0, 50.0), p(250.0, 50.0), p(500.0, 50.0)],
            cost: 500.0,
        };
        let prof = clearance_profile(&path, &map);
        assert!(prof.widths().all(|w| w == 50.0));
        assert_eq!(prof.total_length(), 500.0);
    }

    #[test]
    fn blocked_seed_rejected() {
        let map: WaterwayMap<f64> = WaterwayMap::builder()
            .chain(1, false, vec![p(0.0, 22.0), p(49.0, 22.0)])
            .build()
            .unwrap();
        let b = Bounds::new(p(0.0, 0.0), p(49.9, 49.9));
        assert_eq!(
            rasterize(&map, 5.0, b, Some(p(10.0, 21.0))).unwrap_err(),
            GridError::ReferenceBlocked
        );
    }
}
