//! Grid quantization of projected points and Bresenham rasterization of the
//! per-word paths through the time slices.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use libm::round;

use crate::mds::PointKey;

/// Integer pixel position (`x` column, `y` row).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GridPoint {
    pub x: i32,
    pub y: i32,
}

impl GridPoint {
    pub const fn new(x: i32, y: i32) -> Self {
        GridPoint { x, y }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, thiserror::Error)]
pub enum TrajectoryError {
    #[error("no points to quantize")]
    Empty,
    #[error("invalid grid {width}x{height} with margin {margin}")]
    InvalidGrid { width: u32, height: u32, margin: f64 },
}

/// Fits the bounding box of `coords` into a `width x height` grid with a
/// relative margin on every side, using one scale for both axes and
/// centring the result. Degenerate boxes map to the grid centre.
pub fn quantize<I>(coords: I, width: u32, height: u32, margin: f64) -> Result<BTreeMap<PointKey, GridPoint>, TrajectoryError>
where
    I: IntoIterator<Item = (PointKey, [f64; 2])>,
{
    if width < 2 || height < 2 || !(0.0..0.5).contains(&margin) || width > i32::MAX as u32 || height > i32::MAX as u32 {
        return Err(TrajectoryError::InvalidGrid { width, height, margin });
    }
    let points: Vec<(PointKey, [f64; 2])> = coords.into_iter().collect();
    if points.is_empty() {
        return Err(TrajectoryError::Empty);
    }
    let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
    for (_, p) in &points {
        for axis in 0..2 {
            lo[axis] = lo[axis].min(p[axis]);
            hi[axis] = hi[axis].max(p[axis]);
        }
    }
    let size = [width as f64, height as f64];
    let mut scale = f64::INFINITY;
    for axis in 0..2 {
        let extent = hi[axis] - lo[axis];
        if extent > 0.0 {
            scale = scale.min(size[axis] * (1.0 - 2.0 * margin) / extent);
        }
    }
    if !scale.is_finite() {
        scale = 0.0;
    }
    let centre = [(lo[0] + hi[0]) / 2.0, (lo[1] + hi[1]) / 2.0];
    let place = |axis: usize, v: f64| -> i32 {
        let px = round(size[axis] / 2.0 + scale * (v - centre[axis]));
        px.clamp(0.0, size[axis] - 1.0) as i32
    };
    Ok(points
        .into_iter()
        .map(|(key, p)| (key, GridPoint::new(place(0, p[0]), place(1, p[1]))))
        .collect())
}

/// All-octant integer Bresenham line from `p0` to `p1`, both endpoints
/// included. When the decision variable is exactly zero the minor axis does
/// not step.
pub fn bresenham(p0: GridPoint, p1: GridPoint) -> Vec<GridPoint> {
    let dx = (p1.x as i64 - p0.x as i64).abs();
    let dy = (p1.y as i64 - p0.y as i64).abs();
    let sx: i64 = if p1.x >= p0.x { 1 } else { -1 };
    let sy: i64 = if p1.y >= p0.y { 1 } else { -1 };
    let (major, minor) = if dx >= dy { (dx, dy) } else { (dy, dx) };

    let mut out = Vec::with_capacity(major as usize + 1);
    let (mut x, mut y) = (p0.x as i64, p0.y as i64);
    let mut decision = 2 * minor - major;
    out.push(p0);
    for _ in 0..major {
        if decision > 0 {
            if dx >= dy {
                y += sy;
            } else {
                x += sx;
            }
            decision -= 2 * major;
        }
        decision += 2 * minor;
        if dx >= dy {
            x += sx;
        } else {
            y += sy;
        }
        out.push(GridPoint::new(x as i32, y as i32));
    }
    out
}

/// A word's rasterized path.
#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Trajectory {
    pub word_index: usize,
    /// `(slice, position)` for every slice with data, ascending.
    pub keyframes: Vec<(usize, GridPoint)>,
    pub frames: Vec<GridPoint>,
    /// Frame index of each keyframe.
    pub segment_offsets: Vec<usize>,
}

impl Trajectory {
    /// True for a word with no data in any slice.
    pub fn is_empty(&self) -> bool {
        self.keyframes.is_empty()
    }
}

/// Joins each word's keyframes (ascending slice order, gaps bridged by a
/// single segment) into one frame list without repeated junction points.
pub fn build_trajectories(quantized: &BTreeMap<PointKey, GridPoint>, k: usize, slice_count: usize) -> Vec<Trajectory> {
    (0..k)
        .map(|word_index| {
            let keyframes: Vec<(usize, GridPoint)> = quantized
                .range(PointKey::new(word_index, 0)..PointKey::new(word_index + 1, 0))
                .filter(|(key, _)| key.slice_index < slice_count)
                .map(|(key, p)| (key.slice_index, *p))
                .collect();
            let mut frames = Vec::new();
            let mut segment_offsets = Vec::with_capacity(keyframes.len());
            for (i, (_, point)) in keyframes.iter().enumerate() {
                if i == 0 {
                    frames.push(*point);
                } else {
                    let from = keyframes[i - 1].1;
                    frames.extend(bresenham(from, *point).into_iter().skip(1));
                }
                segment_offsets.push(frames.len() - 1);
            }
            Trajectory { word_index, keyframes, frames, segment_offsets }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use proptest::prelude::*;

    fn gp(x: i32, y: i32) -> GridPoint {
        GridPoint::new(x, y)
    }

    #[test]
    fn quantize_fits_box_into_margins() {
        // scale = 100 * 0.8 / 1 = 80 around centre 0.5 -> 50 -+ 40
        let q = quantize(
            [(PointKey::new(0, 0), [0.0, 0.0]), (PointKey::new(0, 1), [1.0, 1.0])],
            100,
            100,
            0.1,
        )
        .unwrap();
        assert_eq!(q[&PointKey::new(0, 0)], gp(10, 10));
        assert_eq!(q[&PointKey::new(0, 1)], gp(90, 90));
    }

    #[test]
    fn quantize_degenerate_boxes_go_to_centre() {
        let q = quantize([(PointKey::new(0, 0), [3.0, -7.0])], 100, 100, 0.1).unwrap();
        assert_eq!(q[&PointKey::new(0, 0)], gp(50, 50));
        let q = quantize([(PointKey::new(0, 0), [1.0, 1.0]), (PointKey::new(1, 0), [1.0, 1.0])], 100, 100, 0.1).unwrap();
        assert!(q.values().all(|p| *p == gp(50, 50)));
    }

    #[test]
    fn quantize_preserves_aspect_ratio() {
        // wide box: x extent 10, y extent 1; scale limited by x
        let q = quantize(
            [(PointKey::new(0, 0), [0.0, 0.0]), (PointKey::new(0, 1), [10.0, 1.0])],
            200,
            100,
            0.0,
        )
        .unwrap();
        assert_eq!(q[&PointKey::new(0, 0)], gp(0, 40));
        assert_eq!(q[&PointKey::new(0, 1)], gp(199, 60));
    }

    #[test]
    fn quantize_errors() {
        let none: [(PointKey, [f64; 2]); 0] = [];
        assert_eq!(quantize(none, 10, 10, 0.1), Err(TrajectoryError::Empty));
        assert!(quantize([(PointKey::new(0, 0), [0.0, 0.0])], 1, 10, 0.1).is_err());
        assert!(quantize([(PointKey::new(0, 0), [0.0, 0.0])], 10, 10, 0.5).is_err());
    }

    #[test]
    fn bresenham_examples() {
        assert_eq!(bresenham(gp(0, 0), gp(0, 0)), vec![gp(0, 0)]);
        assert_eq!(bresenham(gp(0, 0), gp(3, 0)), vec![gp(0, 0), gp(1, 0), gp(2, 0), gp(3, 0)]);
        assert_eq!(
            bresenham(gp(0, 0), gp(4, 2)),
            vec![gp(0, 0), gp(1, 0), gp(2, 1), gp(3, 1), gp(4, 2)]
        );
        assert_eq!(bresenham(gp(0, 0), gp(-2, -4)), vec![gp(0, 0), gp(0, -1), gp(-1, -2), gp(-1, -3), gp(-2, -4)]);
    }

    #[test]
    fn trajectory_single_segment() {
        let q: BTreeMap<_, _> = [(PointKey::new(0, 0), gp(0, 0)), (PointKey::new(0, 1), gp(3, 0))].into();
        let t = build_trajectories(&q, 1, 2);
        assert_eq!(t[0].frames, vec![gp(0, 0), gp(1, 0), gp(2, 0), gp(3, 0)]);
        assert_eq!(t[0].segment_offsets, vec![0, 3]);
    }

    #[test]
    fn trajectory_bridges_gaps_and_flags_empty() {
        let q: BTreeMap<_, _> = [
            (PointKey::new(0, 0), gp(0, 0)),
            (PointKey::new(0, 2), gp(2, 2)),
            (PointKey::new(2, 1), gp(5, 5)),
        ]
        .into();
        let t = build_trajectories(&q, 3, 3);
        assert_eq!(t[0].keyframes, vec![(0, gp(0, 0)), (2, gp(2, 2))]);
        assert_eq!(t[0].frames, vec![gp(0, 0), gp(1, 1), gp(2, 2)]);
        assert_eq!(t[0].segment_offsets, vec![0, 2]);
        assert!(t[1].is_empty());
        assert!(t[1].frames.is_empty());
        assert_eq!(t[2].frames, vec![gp(5, 5)]);
        assert_eq!(t[2].segment_offsets, vec![0]);
    }

    #[test]
    fn repeated_keyframe_positions_collapse() {
        let q: BTreeMap<_, _> = [(PointKey::new(0, 0), gp(1, 1)), (PointKey::new(0, 1), gp(1, 1))].into();
        let t = build_trajectories(&q, 1, 2);
        assert_eq!(t[0].frames, vec![gp(1, 1)]);
        assert_eq!(t[0].segment_offsets, vec![0, 0]);
    }

    proptest! {
        #[test]
        fn reversal_keeps_count_and_swaps_endpoints(x0 in -50i32..50, y0 in -50i32..50, x1 in -50i32..50, y1 in -50i32..50) {
            let a = bresenham(gp(x0, y0), gp(x1, y1));
            let b = bresenham(gp(x1, y1), gp(x0, y0));
            prop_assert_eq!(a.len(), b.len());
            prop_assert_eq!(a.first(), b.last());
            prop_assert_eq!(a.last(), b.first());
        }

        #[test]
        fn trajectories_are_eight_connected(points in proptest::collection::btree_map(0usize..8, (0i32..100, 0i32..100), 1..8)) {
            let q: BTreeMap<_, _> = points.iter().map(|(s, (x, y))| (PointKey::new(0, *s), gp(*x, *y))).collect();
            let t = &build_trajectories(&q, 1, 8)[0];
            prop_assert_eq!(t.frames.first(), Some(&t.keyframes[0].1));
            prop_assert_eq!(t.frames.last(), Some(&t.keyframes.last().unwrap().1));
            for (off, (_, p)) in t.segment_offsets.iter().zip(&t.keyframes) {
                prop_assert_eq!(t.frames[*off], *p);
            }
            for w in t.frames.windows(2) {
                let step = (w[0].x - w[1].x).abs().max((w[0].y - w[1].y).abs());
                prop_assert!(step <= 1);
            }
        }
    }
}
