use serde::{Deserialize, Serialize};

use crate::metric::MetricSpace;
use crate::net::MultiresFamily;

/// Colouring of the family into subfamilies whose same-level balls are
/// `r_sep * r` apart.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Partition {
    pub colors: Vec<usize>,
    /// Number of colours used.
    pub p1: usize,
}

/// Greedy colouring level by level in net order: two balls of radius `r`
/// conflict when their centres are closer than `(r_sep + 2) r`, which keeps
/// the balls themselves at least `r_sep * r` apart in any metric.
pub fn partition_separated(space: &MetricSpace, family: &MultiresFamily, r_sep: f64) -> Partition {
    let mut colors = vec![0; family.balls.len()];
    let mut p1 = 0;
    let mut start = 0;
    while start < family.balls.len() {
        let level = family.balls[start].level;
        let mut end = start;
        while end < family.balls.len() && family.balls[end].level == level {
            end += 1;
        }
        let mut used = vec![false; end - start + 1];
        for a in start..end {
            used.iter_mut().for_each(|u| *u = false);
            let ba = &family.balls[a];
            let reach = (r_sep + 2.0) * ba.radius;
            for b in start..a {
                if space.dist(&ba.center, &family.balls[b].center) < reach {
                    used[colors[b]] = true;
                }
            }
            let c = used.iter().position(|u| !u).unwrap();
            colors[a] = c;
            p1 = p1.max(c + 1);
        }
        start = end;
    }
    Partition { colors, p1 }
}

/// Scale class of a ball: `M` with `beta^2 / 2` in `[2^-M, 2^(1-M))` and the
/// residue `i` in `1..=K M` with radius `A 2^(-n K M + i)` for some `n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ScaleClass {
    pub m: u32,
    pub i: u32,
}

/// `M` for a flatness value; `None` for flat balls. Values with
/// `beta^2 / 2 >= 1` are put in the first class.
pub fn class_m(beta: f64) -> Option<u32> {
    let x = beta * beta / 2.0;
    if !(x > 0.0) {
        return None;
    }
    if x >= 0.5 {
        return Some(1);
    }
    let mut m = (-x.log2()).ceil().max(1.0) as i32;
    while 2f64.powi(-m) > x {
        m += 1;
    }
    while m > 1 && x >= 2f64.powi(1 - m) {
        m -= 1;
    }
    Some(m as u32)
}

pub fn scale_class(beta: f64, level: i32, k: u32) -> Option<ScaleClass> {
    let m = class_m(beta)?;
    let km = (k * m) as i64;
    let i = (-(level as i64) - 1).rem_euclid(km) + 1;
    Some(ScaleClass { m, i: i as u32 })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn class_boundaries() {
        assert_eq!(class_m(0.0), None);
        assert_eq!(class_m(1.0), Some(1));
        assert_eq!(class_m(2f64.sqrt()), Some(1));
        assert_eq!(class_m((2.0 * 0.125f64).sqrt()), Some(3));
        assert_eq!(class_m((2.0 * 0.2f64).sqrt()), Some(3));
    }

    #[test]
    fn residues_cycle() {
        let k = 3;
        // beta = 0.9 sits in class M = 2, so residues repeat every K M = 6 levels.
        let a = scale_class(0.9, 4, k).unwrap();
        let b = scale_class(0.9, 4 + 6, k).unwrap();
        assert_eq!(a.m, 2);
        assert_eq!(a, b);
        assert!((1..=6).contains(&a.i));
        assert_ne!(scale_class(0.9, 5, k).unwrap().i, a.i);
    }
}
