use serde::{Deserialize, Serialize};

use crate::curve::{Curve, CurveSamples};
use crate::net::MultiresFamily;

use super::intervals::{preimage, LoopSet};

/// A dyadic cube, stored through its preimage on the loop.
#[derive(Clone, Debug)]
pub struct Cube {
    /// Index of the generating ball in the family.
    pub ball: usize,
    pub level: i32,
    pub set: LoopSet,
    pub parent: Option<usize>,
    pub children: Vec<usize>,
}

#[derive(Clone, Debug)]
pub struct CubeFamily {
    pub km: u32,
    pub cubes: Vec<Cube>,
    /// Finer cubes touched by two cubes of the same level.
    pub double_absorptions: usize,
}

/// Builds cubes from the finest level up: each cube is `2B` together with
/// every maximal finer cube meeting `2B`. A finer cube meeting the result
/// then lies inside it, so the family is laminar as long as same-level
/// cubes stay apart.
///
/// `samples[n - n_min]` are loop samples used at level `n`; `members` are
/// ball indices of one separated scale class.
pub fn build_cubes(curve: &Curve, samples: &[CurveSamples], family: &MultiresFamily, members: &[usize], km: u32) -> CubeFamily {
    let mut order: Vec<usize> = members.to_vec();
    order.sort_by(|&a, &b| family.balls[b].level.cmp(&family.balls[a].level).then(a.cmp(&b)));
    let mut cubes: Vec<Cube> = Vec::with_capacity(order.len());
    let mut roots: Vec<usize> = Vec::new();
    let mut double_absorptions = 0;
    let mut k = 0;
    while k < order.len() {
        let level = family.balls[order[k]].level;
        let mut end = k;
        while end < order.len() && family.balls[order[end]].level == level {
            end += 1;
        }
        let s = &samples[(level - family.n_min) as usize];
        let mut taken = vec![false; roots.len()];
        let first_new = cubes.len();
        for &bi in &order[k..end] {
            let b = &family.balls[bi];
            let base = preimage(curve, s, &b.center, 2.0 * b.radius);
            let mut set = base.clone();
            let mut children = Vec::new();
            for (ri, &r) in roots.iter().enumerate() {
                if cubes[r].set.intersects(&base) {
                    if taken[ri] {
                        double_absorptions += 1;
                    }
                    taken[ri] = true;
                    set = set.union(&cubes[r].set);
                    children.push(r);
                }
            }
            let id = cubes.len();
            for &c in &children {
                cubes[c].parent.get_or_insert(id);
            }
            cubes.push(Cube { ball: bi, level, set, parent: None, children });
        }
        let mut next: Vec<usize> = roots.iter().zip(&taken).filter(|(_, t)| !**t).map(|(r, _)| *r).collect();
        next.extend(first_new..cubes.len());
        roots = next;
        k = end;
    }
    CubeFamily { km, cubes, double_absorptions }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct CubeInvariants {
    pub cubes: usize,
    /// Samples of `2B` missing from the cube.
    pub inner_violations: usize,
    /// Cube samples outside `(1 + 4 * 2^-KM) 2B`.
    pub outer_violations: usize,
    /// Intersecting pairs of cubes that are not nested.
    pub laminarity_violations: usize,
    /// Intersecting pairs of same-level cubes.
    pub same_level_overlaps: usize,
}

impl CubeInvariants {
    pub fn ok(&self) -> bool {
        self.inner_violations == 0 && self.outer_violations == 0 && self.laminarity_violations == 0 && self.same_level_overlaps == 0
    }

    pub fn merge(&mut self, o: &CubeInvariants) {
        self.cubes += o.cubes;
        self.inner_violations += o.inner_violations;
        self.outer_violations += o.outer_violations;
        self.laminarity_violations += o.laminarity_violations;
        self.same_level_overlaps += o.same_level_overlaps;
    }
}

/// Checks the sandwich `2B ⊆ Q ⊆ (1 + 4 * 2^-KM) 2B` on the samples of each
/// cube's level, laminarity and disjointness of same-level cubes.
pub fn check_cubes(curve: &Curve, samples: &[CurveSamples], family: &MultiresFamily, cf: &CubeFamily) -> CubeInvariants {
    let space = curve.space();
    let mut inv = CubeInvariants { cubes: cf.cubes.len(), ..Default::default() };
    let grow = 1.0 + 4.0 * 2f64.powi(-(cf.km.min(1000) as i32));
    for q in &cf.cubes {
        let b = &family.balls[q.ball];
        let s = &samples[(q.level - family.n_min) as usize];
        for i in s.within(space, &b.center, 2.0 * b.radius) {
            if !q.set.contains(s.params[i]) {
                inv.inner_violations += 1;
            }
        }
        let limit = grow * 2.0 * b.radius * (1.0 + 1e-12);
        for t in q.set.sample_params(s) {
            if space.dist(&curve.point_at(t), &b.center) > limit {
                inv.outer_violations += 1;
            }
        }
    }
    for a in 0..cf.cubes.len() {
        for b in a + 1..cf.cubes.len() {
            let (qa, qb) = (&cf.cubes[a], &cf.cubes[b]);
            if !qa.set.intersects(&qb.set) {
                continue;
            }
            if qa.level == qb.level {
                inv.same_level_overlaps += 1;
            } else if !(qa.set.contains_set(&qb.set) || qb.set.contains_set(&qa.set)) {
                inv.laminarity_violations += 1;
            }
        }
    }
    inv
}
