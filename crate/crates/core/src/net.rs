//! Nested dyadic nets and the multiresolution ball family.

use std::cmp::{Ordering, Reverse};
use std::collections::BinaryHeap;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::curve::{Curve, CurveSamples};
use crate::error::{Error, Result};
use crate::metric::{MetricSpace, Point};

#[derive(Clone, Copy, Debug, PartialEq)]
struct Key(f64);

impl Eq for Key {}

impl PartialOrd for Key {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Key {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0)
    }
}

/// Nets `X_n` for `n_min <= n <= n_max`, stored as indices into the source
/// sample. Each level lists the coarser level first, in insertion order.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct NetHierarchy {
    pub n_min: i32,
    pub n_max: i32,
    levels: Vec<Vec<usize>>,
}

impl NetHierarchy {
    pub fn level(&self, n: i32) -> &[usize] {
        &self.levels[(n - self.n_min) as usize]
    }

    pub fn levels(&self) -> impl Iterator<Item = (i32, &[usize])> {
        self.levels.iter().enumerate().map(move |(k, v)| (self.n_min + k as i32, v.as_slice()))
    }
}

/// Largest `n` with `2^-n >= diam`.
pub fn coarsest_level(diam: f64) -> i32 {
    let mut n = (-diam.log2()).floor() as i32;
    while 2f64.powi(-n) < diam {
        n -= 1;
    }
    while 2f64.powi(-(n + 1)) >= diam {
        n += 1;
    }
    n
}

/// Builds nested nets by greedy farthest-point insertion: at level `n` the
/// sample point farthest from the current net (lowest index on ties) is added
/// while that distance exceeds `2^-n`. The result is `2^-n`-separated and
/// `2^-n`-covering at every level.
pub fn build_net_hierarchy(space: &MetricSpace, sample: &[Point], n_range: (i32, i32)) -> Result<NetHierarchy> {
    build(space, sample, None, n_range)
}

/// Same as [`build_net_hierarchy`] for samples taken along a curve at unit
/// speed, which allows skipping far stretches during distance updates.
pub fn build_net_hierarchy_along(space: &MetricSpace, samples: &CurveSamples, n_range: (i32, i32)) -> Result<NetHierarchy> {
    build(space, &samples.points, Some(samples.step), n_range)
}

fn build(space: &MetricSpace, pts: &[Point], step: Option<f64>, (n_min, n_max): (i32, i32)) -> Result<NetHierarchy> {
    if pts.is_empty() {
        return Err(Error::InvalidParameter("empty sample".into()));
    }
    if n_min > n_max {
        return Err(Error::InvalidParameter(format!("empty level range {n_min}..={n_max}")));
    }
    for p in pts {
        space.check_point(p)?;
    }
    let n = pts.len();
    let mut dmin = vec![f64::INFINITY; n];
    let mut heap: BinaryHeap<(Key, Reverse<usize>)> = BinaryHeap::with_capacity(n);
    heap.extend((0..n).map(|i| (Key(f64::INFINITY), Reverse(i))));
    let mut chosen: Vec<usize> = Vec::new();
    let mut levels = Vec::new();
    for level in n_min..=n_max {
        let eps = 2f64.powi(-level);
        while let Some(&(Key(k), Reverse(i))) = heap.peek() {
            if k <= eps {
                break;
            }
            heap.pop();
            if k != dmin[i] {
                if dmin[i] > 0.0 {
                    heap.push((Key(dmin[i]), Reverse(i)));
                }
                continue;
            }
            chosen.push(i);
            dmin[i] = 0.0;
            let bound = heap.peek().map_or(0.0, |e| e.0 .0);
            update(space, pts, step, &mut dmin, i, bound);
        }
        levels.push(chosen.clone());
    }
    Ok(NetHierarchy { n_min, n_max, levels })
}

fn update(space: &MetricSpace, pts: &[Point], step: Option<f64>, dmin: &mut [f64], new: usize, bound: f64) {
    let c = &pts[new];
    let mut j = 0;
    while j < pts.len() {
        let d = space.dist(&pts[j], c);
        if d < dmin[j] {
            dmin[j] = d;
        }
        j += match step {
            // No point whose distance exceeds the largest current key can
            // change, so skip the stretch that must stay beyond it.
            Some(h) if bound.is_finite() && d > bound => {
                let k = ((d - bound) / h * (1.0 - 1e-9)).floor();
                if k >= 1.0 {
                    k as usize
                } else {
                    1
                }
            }
            _ => 1,
        };
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Ball {
    pub level: i32,
    /// Position of the centre in the level's net.
    pub index: usize,
    /// Index of the centre in the source sample.
    pub sample: usize,
    pub center: Point,
    pub radius: f64,
}

impl Ball {
    pub fn id(&self) -> String {
        format!("{}:{}", self.level, self.index)
    }
}

/// The balls `B(x, A 2^-n)` over `x` in `X_n`, ordered by level then net
/// index.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MultiresFamily {
    pub a: f64,
    pub n_min: i32,
    pub n_max: i32,
    pub balls: Vec<Ball>,
}

pub fn multiresolution_family(hierarchy: &NetHierarchy, sample: &[Point], a: f64) -> Result<MultiresFamily> {
    if !(a.is_finite() && a > 1.0) {
        return Err(Error::InvalidParameter(format!("inflation factor must exceed 1, got {a}")));
    }
    let mut balls = Vec::new();
    for (n, idx) in hierarchy.levels() {
        let r = a * 2f64.powi(-n);
        for (k, &s) in idx.iter().enumerate() {
            balls.push(Ball { level: n, index: k, sample: s, center: sample[s].clone(), radius: r });
        }
    }
    Ok(MultiresFamily { a, n_min: hierarchy.n_min, n_max: hierarchy.n_max, balls })
}

impl MultiresFamily {
    pub fn len(&self) -> usize {
        self.balls.len()
    }

    pub fn is_empty(&self) -> bool {
        self.balls.is_empty()
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        wr.write_record(["level", "ball_id", "radius", "center"])?;
        for b in &self.balls {
            let c: Vec<String> = b.center.0.iter().map(|x| format!("{x:?}")).collect();
            wr.write_record([b.level.to_string(), b.id(), format!("{:?}", b.radius), c.join(" ")])?;
        }
        wr.flush()?;
        Ok(())
    }
}

/// Curve, source samples, nets and ball family bundled for the pipelines.
#[derive(Clone, Debug)]
pub struct Multires {
    pub source: CurveSamples,
    pub nets: NetHierarchy,
    pub family: MultiresFamily,
}

/// Default number of dyadic levels below the coarsest one.
pub const DEFAULT_LEVELS: i32 = 10;

/// Samples the image at `2^-(n_max + 3)`, builds nets for
/// `n_min ..= n_min + levels` and the ball family with inflation `a`.
pub fn multires_for_curve(curve: &Curve, a: f64, levels: i32) -> Result<Multires> {
    if levels < 0 {
        return Err(Error::InvalidParameter("negative level count".into()));
    }
    let n_min = coarsest_level(curve.diam());
    let n_max = n_min + levels;
    let source = curve.image_samples(2f64.powi(-(n_max + 3)));
    let nets = build_net_hierarchy_along(curve.space(), &source, (n_min, n_max))?;
    let family = multiresolution_family(&nets, &source.points, a)?;
    Ok(Multires { source, nets, family })
}

/// Largest number of `r/2`-separated sample points found inside a ball
/// `B(x, r)`, over the first 64 sample points as centres and dyadic radii
/// spanning 16 levels below the diameter. Greedy packing in index order
/// keeps the estimate non-decreasing when the sample is extended.
pub fn doubling_constant_estimate(space: &MetricSpace, sample: &[Point]) -> Result<usize> {
    if sample.is_empty() {
        return Err(Error::InvalidParameter("empty sample".into()));
    }
    for p in sample {
        space.check_point(p)?;
    }
    let mut diam: f64 = 0.0;
    for i in 0..sample.len() {
        for j in i + 1..sample.len() {
            diam = diam.max(space.dist(&sample[i], &sample[j]));
        }
    }
    if diam == 0.0 {
        return Ok(1);
    }
    let n0 = coarsest_level(diam);
    let mut best = 1;
    let mut picked: Vec<usize> = Vec::new();
    for c in sample.iter().take(64) {
        for n in n0..=n0 + 16 {
            let r = 2f64.powi(-n);
            picked.clear();
            for (i, p) in sample.iter().enumerate() {
                if space.dist(p, c) <= r && picked.iter().all(|&q| space.dist(&sample[q], p) > r / 2.0) {
                    picked.push(i);
                }
            }
            best = best.max(picked.len());
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::{generate_curve, CurveSpec};

    #[test]
    fn coarsest_level_brackets_diameter() {
        for d in [0.3, 1.0, 2.0, 3.7, 1e-3] {
            let n = coarsest_level(d);
            assert!(2f64.powi(-n) >= d && 2f64.powi(-(n + 1)) < d);
        }
    }

    #[test]
    fn segment_nets_are_nested_and_valid() {
        let c = generate_curve(&CurveSpec::Segment { length: 1.0 }).unwrap();
        let m = multires_for_curve(&c, 10.0, 5).unwrap();
        let e = c.space();
        let pts = &m.source.points;
        let mut prev: Vec<usize> = vec![];
        for (n, lvl) in m.nets.levels() {
            let eps = 2f64.powi(-n);
            assert_eq!(&lvl[..prev.len()], &prev[..]);
            for (a, &i) in lvl.iter().enumerate() {
                for &j in &lvl[a + 1..] {
                    assert!(e.dist(&pts[i], &pts[j]) > eps);
                }
            }
            for p in pts {
                assert!(lvl.iter().any(|&i| e.dist(&pts[i], p) <= eps));
            }
            prev = lvl.to_vec();
        }
        assert_eq!(m.nets.level(m.nets.n_min), &[0]);
    }

    #[test]
    fn doubling_of_a_segment() {
        let e = MetricSpace::euclidean(2).unwrap();
        let pts: Vec<Point> = (0..=400).map(|i| Point::xy(i as f64 / 400.0, 0.0)).collect();
        assert!(doubling_constant_estimate(&e, &pts).unwrap() <= 5);
    }
}
