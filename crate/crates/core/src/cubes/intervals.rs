use crate::curve::{Curve, CurveSamples, ParamInterval};
use crate::metric::Point;

/// Finite union of closed parameter intervals on the loop `[0, L)`.
/// Intervals are kept sorted, disjoint and inside `[0, L]`; an interval
/// ending at `L` and one starting at `0` belong to the same component.
#[derive(Clone, Debug, PartialEq)]
pub struct LoopSet {
    len: f64,
    ivs: Vec<(f64, f64)>,
}

impl LoopSet {
    pub fn empty(len: f64) -> Self {
        LoopSet { len, ivs: Vec::new() }
    }

    pub fn from_intervals(len: f64, mut ivs: Vec<(f64, f64)>) -> Self {
        ivs.retain(|iv| iv.1 >= iv.0);
        ivs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut out: Vec<(f64, f64)> = Vec::with_capacity(ivs.len());
        for (a, b) in ivs {
            match out.last_mut() {
                Some(last) if a <= last.1 => last.1 = last.1.max(b),
                _ => out.push((a, b)),
            }
        }
        LoopSet { len, ivs: out }
    }

    pub fn loop_len(&self) -> f64 {
        self.len
    }

    pub fn intervals(&self) -> &[(f64, f64)] {
        &self.ivs
    }

    pub fn is_empty(&self) -> bool {
        self.ivs.is_empty()
    }

    pub fn measure(&self) -> f64 {
        self.ivs.iter().map(|(a, b)| b - a).sum()
    }

    pub fn union(&self, other: &LoopSet) -> LoopSet {
        let mut v = self.ivs.clone();
        v.extend_from_slice(&other.ivs);
        LoopSet::from_intervals(self.len, v)
    }

    pub fn intersection(&self, other: &LoopSet) -> LoopSet {
        let (mut i, mut j) = (0, 0);
        let mut out = Vec::new();
        while i < self.ivs.len() && j < other.ivs.len() {
            let (a, b) = self.ivs[i];
            let (c, d) = other.ivs[j];
            let lo = a.max(c);
            let hi = b.min(d);
            if lo <= hi {
                out.push((lo, hi));
            }
            if b < d {
                i += 1;
            } else {
                j += 1;
            }
        }
        LoopSet { len: self.len, ivs: out }
    }

    pub fn difference(&self, other: &LoopSet) -> LoopSet {
        let mut out = Vec::new();
        for &(a, b) in &self.ivs {
            let mut cur = a;
            for &(c, d) in &other.ivs {
                if d < cur || c > b {
                    continue;
                }
                if c > cur {
                    out.push((cur, c));
                }
                cur = cur.max(d);
                if cur >= b {
                    break;
                }
            }
            if cur < b {
                out.push((cur, b));
            }
        }
        LoopSet { len: self.len, ivs: out }
    }

    pub fn intersects(&self, other: &LoopSet) -> bool {
        !self.intersection(other).is_empty()
    }

    /// Whether every interval of `other` lies in one interval of `self`.
    pub fn contains_set(&self, other: &LoopSet) -> bool {
        let tol = 1e-12 * self.len;
        other.ivs.iter().all(|&(c, d)| self.ivs.iter().any(|&(a, b)| a - tol <= c && d <= b + tol))
    }

    pub fn contains(&self, t: f64) -> bool {
        let t = t.rem_euclid(self.len);
        self.ivs.iter().any(|&(a, b)| a <= t && t <= b)
    }

    /// Connected components as parameter intervals; a component through the
    /// origin is reported with `end > L`.
    pub fn components(&self) -> Vec<ParamInterval> {
        let tol = 1e-12 * self.len;
        let mut v: Vec<ParamInterval> = self.ivs.iter().map(|&(a, b)| ParamInterval::new(a, b)).collect();
        if v.len() >= 2 && v[0].start <= tol && v[v.len() - 1].end >= self.len - tol {
            let first = v.remove(0);
            let last = v.last_mut().unwrap();
            last.end = first.end + self.len;
        } else if v.len() == 1 && v[0].start <= tol && v[0].end >= self.len - tol {
            v[0] = ParamInterval::new(0.0, self.len);
        }
        v
    }

    /// The set for one cyclic interval.
    pub fn from_arc(len: f64, arc: ParamInterval) -> LoopSet {
        if arc.len() >= len {
            return LoopSet { len, ivs: vec![(0.0, len)] };
        }
        let a = arc.start.rem_euclid(len);
        let b = a + arc.len();
        if b <= len {
            LoopSet::from_intervals(len, vec![(a, b)])
        } else {
            LoopSet::from_intervals(len, vec![(a, len), (0.0, b - len)])
        }
    }

    /// Parameters in the set on the grid of `samples`, plus interval
    /// endpoints.
    pub fn sample_params(&self, samples: &CurveSamples) -> Vec<f64> {
        let h = samples.step;
        let mut out = Vec::new();
        for &(a, b) in &self.ivs {
            out.push(a);
            let mut k = (a / h).floor() as usize + 1;
            while (k as f64) * h < b {
                out.push(k as f64 * h);
                k += 1;
            }
            if b > a {
                out.push(b);
            }
        }
        out
    }
}

/// `gamma^-1(closed ball)` at the resolution of `samples` (loop samples).
/// Each run of consecutive samples inside the ball becomes an interval whose
/// ends are located by bisection against the neighbouring outside samples.
pub fn preimage(curve: &Curve, samples: &CurveSamples, center: &Point, radius: f64) -> LoopSet {
    let space = curve.space();
    let l = curve.length();
    let n = samples.len();
    let idx = samples.within(space, center, radius);
    if idx.is_empty() {
        return LoopSet::empty(l);
    }
    if idx.len() == n {
        return LoopSet { len: l, ivs: vec![(0.0, l)] };
    }
    let inside = |t: f64| space.dist(&curve.point_at(t), center) <= radius;
    let bisect = |mut out: f64, mut inn: f64| {
        for _ in 0..48 {
            let mid = 0.5 * (out + inn);
            if inside(mid) {
                inn = mid;
            } else {
                out = mid;
            }
        }
        inn
    };
    let t = |i: usize| samples.params[i];
    let mut ivs = Vec::new();
    let mut k = 0;
    while k < idx.len() {
        let start = idx[k];
        let mut end = start;
        while k + 1 < idx.len() && idx[k + 1] == end + 1 {
            k += 1;
            end = idx[k];
        }
        k += 1;
        let a = if start == 0 { 0.0 } else { bisect(t(start - 1), t(start)) };
        let b = if end == n - 1 {
            if idx[0] == 0 {
                l
            } else {
                bisect(l, t(end))
            }
        } else {
            bisect(t(end + 1), t(end))
        };
        ivs.push((a, b));
    }
    LoopSet::from_intervals(l, ivs)
}
