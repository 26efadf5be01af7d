use super::ppp::Point;
use super::window::SimWindow;

/// Bucket grid over a torus for nearest-point queries.
#[derive(Debug, Clone)]
pub struct TorusGrid<'a> {
    window: SimWindow,
    points: &'a [Point],
    cells: usize,
    cell: f64,
    start: Vec<u32>,
    items: Vec<u32>,
}

impl<'a> TorusGrid<'a> {
    pub fn new(window: SimWindow, points: &'a [Point]) -> Self {
        let cells = ((points.len() as f64 / 2.0).sqrt().floor() as usize).max(1);
        let cell = window.side() / cells as f64;
        let index = |p: &Point| {
            let cx = ((p[0] / cell) as usize).min(cells - 1);
            let cy = ((p[1] / cell) as usize).min(cells - 1);
            cy * cells + cx
        };
        let mut start = vec![0u32; cells * cells + 1];
        for p in points {
            start[index(p) + 1] += 1;
        }
        for i in 0..cells * cells {
            start[i + 1] += start[i];
        }
        let mut fill = start.clone();
        let mut items = vec![0u32; points.len()];
        for (i, p) in points.iter().enumerate() {
            let c = index(p);
            items[fill[c] as usize] = i as u32;
            fill[c] += 1;
        }
        Self {
            window,
            points,
            cells,
            cell,
            start,
            items,
        }
    }

    /// Index and squared distance of the point nearest to `q`, or `None` if empty.
    pub fn nearest(&self, q: Point) -> Option<(usize, f64)> {
        if self.points.is_empty() {
            return None;
        }
        let n = self.cells as i64;
        let cx = ((q[0] / self.cell) as i64).clamp(0, n - 1);
        let cy = ((q[1] / self.cell) as i64).clamp(0, n - 1);
        let mut best = (usize::MAX, f64::INFINITY);
        let mut r: i64 = 0;
        loop {
            if 2 * r + 1 >= n {
                return Some(self.brute_force(q));
            }
            for dy in -r..=r {
                for dx in -r..=r {
                    if dx.abs() != r && dy.abs() != r {
                        continue;
                    }
                    let c = (((cy + dy).rem_euclid(n)) * n + (cx + dx).rem_euclid(n)) as usize;
                    for &i in &self.items[self.start[c] as usize..self.start[c + 1] as usize] {
                        let d2 = self.window.dist2(q, self.points[i as usize]);
                        if d2 < best.1 || (d2 == best.1 && (i as usize) < best.0) {
                            best = (i as usize, d2);
                        }
                    }
                }
            }
            let reach = r as f64 * self.cell;
            if best.0 != usize::MAX && best.1 < reach * reach {
                return Some(best);
            }
            r += 1;
        }
    }

    fn brute_force(&self, q: Point) -> (usize, f64) {
        let mut best = (usize::MAX, f64::INFINITY);
        for (i, p) in self.points.iter().enumerate() {
            let d2 = self.window.dist2(q, *p);
            if d2 < best.1 {
                best = (i, d2);
            }
        }
        best
    }
}
