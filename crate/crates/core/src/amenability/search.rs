//! Minimum boundary-ratio search over admissible subsets.
//!
//! Every set of diameter at most `S` lies in a ball of radius `S` around its
//! smallest member, so exact enumeration walks, for each centre `x`, the
//! subsets of `B(x; S)` whose members exceed `x` and are pairwise `S`-close.
//! Boundary weights are maintained incrementally with per-point counters.

use std::cmp::Ordering;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::space::{FiniteMetricSpace, PointId, PointSet};

/// Default cap on the size of a ball enumerated exhaustively.
pub const DEFAULT_BALL_CAP: usize = 20;

const MAX_CAP: usize = 63;
const SEEDS_FOR_LOCAL_SEARCH: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum SearchMode {
    #[default]
    Exact,
    Heuristic,
}

impl std::str::FromStr for SearchMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(SearchMode::Exact),
            "heuristic" => Ok(SearchMode::Heuristic),
            other => Err(Error::input(format!("unknown mode {other:?}"))),
        }
    }
}

/// Which subsets compete.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Admissible {
    /// Sets of diameter at most `S`.
    Diameter(u32),
    /// Subsets of some ball of the given radius.
    Ball(u32),
}

/// A weighted ratio-minimisation instance:
/// minimise `Σ_{∂_R E} boundary_w / Σ_E mass_w` over admissible `E ⊆ allowed`.
#[derive(Clone, Debug)]
pub struct Problem<'a> {
    pub space: &'a FiniteMetricSpace,
    pub allowed: Vec<bool>,
    pub mass_weights: Vec<f64>,
    pub boundary_weights: Vec<f64>,
    pub r: u32,
    pub admissible: Admissible,
    pub mode: SearchMode,
    pub cap: usize,
}

impl<'a> Problem<'a> {
    /// Counting weights restricted to `within`.
    pub fn counting(space: &'a FiniteMetricSpace, within: &PointSet, r: u32, admissible: Admissible) -> Self {
        let mask = within.mask(space.len());
        let w: Vec<f64> = mask.iter().map(|&m| if m { 1.0 } else { 0.0 }).collect();
        Problem {
            space,
            allowed: mask,
            mass_weights: w.clone(),
            boundary_weights: w,
            r,
            admissible,
            mode: SearchMode::Exact,
            cap: DEFAULT_BALL_CAP,
        }
    }

    /// Measure weights; `E` ranges over the support.
    pub fn weighted(space: &'a FiniteMetricSpace, weights: &[f64], r: u32, admissible: Admissible) -> Self {
        Problem {
            space,
            allowed: weights.iter().map(|&w| w > 0.0).collect(),
            mass_weights: weights.to_vec(),
            boundary_weights: weights.to_vec(),
            r,
            admissible,
            mode: SearchMode::Exact,
            cap: DEFAULT_BALL_CAP,
        }
    }

    pub fn with_mode(mut self, mode: SearchMode, cap: usize) -> Self {
        self.mode = mode;
        self.cap = cap;
        self
    }

    /// Boundary weight, mass and ratio of `set`, computed from scratch.
    pub fn evaluate(&self, set: &PointSet) -> (f64, f64, f64) {
        let boundary = self
            .space
            .boundary(set, self.r)
            .map(|b| b.iter().map(|y| self.boundary_weights[y]).sum::<f64>())
            .unwrap_or(f64::INFINITY);
        let mass: f64 = set.iter().map(|x| self.mass_weights[x]).sum();
        let ratio = if mass > 0.0 { boundary / mass } else { f64::INFINITY };
        (boundary, mass, ratio)
    }
}

/// The best set found, with its directly recomputed ratio.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Candidate {
    pub set: PointSet,
    pub boundary: f64,
    pub mass: f64,
    pub ratio: f64,
    pub diameter: u32,
    /// True iff the search was exhaustive over all admissible sets.
    pub exact: bool,
}

fn key_cmp(a_ratio: f64, a_ids: &[PointId], b_ratio: f64, b_ids: &[PointId]) -> Ordering {
    a_ratio.total_cmp(&b_ratio).then_with(|| a_ids.cmp(b_ids))
}

impl Candidate {
    fn better_than(&self, other: &Candidate) -> bool {
        key_cmp(self.ratio, self.set.as_slice(), other.ratio, other.set.as_slice())
            .then(self.diameter.cmp(&other.diameter))
            == Ordering::Less
    }
}

fn pick_best(a: Option<Candidate>, b: Option<Candidate>) -> Option<Candidate> {
    match (a, b) {
        (Some(a), Some(b)) => Some(if b.better_than(&a) { b } else { a }),
        (a, None) => a,
        (None, b) => b,
    }
}

/// Runs the search. `Ok(None)` means no admissible set with positive mass
/// exists at all.
pub fn minimize_ratio(p: &Problem<'_>) -> Result<Option<Candidate>> {
    if p.mass_weights.len() != p.space.len()
        || p.boundary_weights.len() != p.space.len()
        || p.allowed.len() != p.space.len()
    {
        return Err(Error::input("weight vectors do not match the space"));
    }
    let near = near_lists(p.space, p.r);
    let raw = match p.mode {
        SearchMode::Exact => exact_search(p, &near)?,
        SearchMode::Heuristic => heuristic_search(p, &near),
    };
    Ok(raw.map(|ids| {
        let set = PointSet::new(ids);
        let (boundary, mass, ratio) = p.evaluate(&set);
        Candidate {
            diameter: p.space.diameter(&set),
            set,
            boundary,
            mass,
            ratio,
            exact: p.mode == SearchMode::Exact,
        }
    }))
}

fn near_lists(space: &FiniteMetricSpace, r: u32) -> Vec<Vec<usize>> {
    (0..space.len())
        .map(|x| {
            space
                .row(x)
                .iter()
                .enumerate()
                .filter_map(|(y, &d)| (d <= r).then_some(y))
                .collect()
        })
        .collect()
}

/// Incremental boundary bookkeeping for a growing/shrinking set.
struct Tracker<'a> {
    near: &'a [Vec<usize>],
    mass_w: &'a [f64],
    bnd_w: &'a [f64],
    in_set: Vec<bool>,
    cnt: Vec<u32>,
    mass: f64,
    bnd: f64,
    integral: bool,
    stamp: Vec<u32>,
    epoch: u32,
}

impl<'a> Tracker<'a> {
    fn new(p: &'a Problem<'_>, near: &'a [Vec<usize>]) -> Self {
        let n = p.space.len();
        Tracker {
            near,
            mass_w: &p.mass_weights,
            bnd_w: &p.boundary_weights,
            in_set: vec![false; n],
            cnt: vec![0; n],
            mass: 0.0,
            bnd: 0.0,
            integral: p
                .mass_weights
                .iter()
                .chain(&p.boundary_weights)
                .all(|w| w.fract() == 0.0 && w.abs() < 1e12),
            stamp: vec![0; n],
            epoch: 0,
        }
    }

    fn add(&mut self, x: usize) {
        self.in_set[x] = true;
        self.mass += self.mass_w[x];
        if self.cnt[x] > 0 {
            self.bnd -= self.bnd_w[x];
        }
        for &y in &self.near[x] {
            if self.cnt[y] == 0 && !self.in_set[y] {
                self.bnd += self.bnd_w[y];
            }
            self.cnt[y] += 1;
        }
    }

    fn remove(&mut self, x: usize) {
        for &y in &self.near[x] {
            self.cnt[y] -= 1;
            if self.cnt[y] == 0 && !self.in_set[y] {
                self.bnd -= self.bnd_w[y];
            }
        }
        self.in_set[x] = false;
        self.mass -= self.mass_w[x];
        if self.cnt[x] > 0 {
            self.bnd += self.bnd_w[x];
        }
    }

    fn ratio(&self) -> f64 {
        if self.mass > 0.0 {
            self.bnd.max(0.0) / self.mass
        } else {
            f64::INFINITY
        }
    }

    /// Ratio recomputed without accumulated rounding.
    fn exact_ratio(&mut self, members: &[usize]) -> f64 {
        if self.integral {
            return self.ratio();
        }
        let mass: f64 = members.iter().map(|&x| self.mass_w[x]).sum();
        if mass <= 0.0 {
            return f64::INFINITY;
        }
        self.epoch = self.epoch.wrapping_add(1);
        if self.epoch == 0 {
            self.stamp.iter_mut().for_each(|s| *s = 0);
            self.epoch = 1;
        }
        let mut bnd = 0.0;
        for &x in members {
            for &y in &self.near[x] {
                if !self.in_set[y] && self.stamp[y] != self.epoch {
                    self.stamp[y] = self.epoch;
                    bnd += self.bnd_w[y];
                }
            }
        }
        bnd / mass
    }
}

struct Best {
    ratio: f64,
    ids: Vec<usize>,
}

impl Best {
    fn offer(&mut self, tracker: &mut Tracker<'_>, stack: &[usize]) {
        let quick = tracker.ratio();
        if quick > self.ratio + 1e-9 {
            return;
        }
        let ratio = tracker.exact_ratio(stack);
        if key_cmp(ratio, stack, self.ratio, &self.ids) == Ordering::Less {
            self.ratio = ratio;
            self.ids = stack.to_vec();
        }
    }
}

fn candidates_for(p: &Problem<'_>, x: usize) -> Vec<usize> {
    match p.admissible {
        Admissible::Diameter(s) => (x + 1..p.space.len())
            .filter(|&y| p.allowed[y] && p.space.d(x, y) <= s)
            .collect(),
        Admissible::Ball(r) => (0..p.space.len())
            .filter(|&y| p.allowed[y] && p.space.d(x, y) <= r)
            .collect(),
    }
}

fn exact_search(p: &Problem<'_>, near: &[Vec<usize>]) -> Result<Option<Vec<usize>>> {
    let cap = p.cap.min(MAX_CAP);
    let centers: Vec<usize> = match p.admissible {
        Admissible::Diameter(_) => (0..p.space.len()).filter(|&x| p.allowed[x]).collect(),
        Admissible::Ball(_) => (0..p.space.len()).collect(),
    };
    let lists: Vec<(usize, Vec<usize>)> = centers
        .par_iter()
        .map(|&x| (x, candidates_for(p, x)))
        .collect();
    let needed = lists
        .iter()
        .map(|(_, c)| c.len() + matches!(p.admissible, Admissible::Diameter(_)) as usize)
        .max()
        .unwrap_or(0);
    if needed > cap {
        return Err(Error::Capacity {
            what: "ball size for exhaustive search",
            needed,
            cap,
        });
    }
    let results: Vec<Option<(f64, Vec<usize>)>> = lists
        .par_iter()
        .map(|(x, cands)| exact_center(p, near, *x, cands))
        .collect();
    let mut best: Option<(f64, Vec<usize>)> = None;
    for r in results.into_iter().flatten() {
        best = match best {
            Some(b) if key_cmp(b.0, &b.1, r.0, &r.1) != Ordering::Greater => Some(b),
            _ => Some(r),
        };
    }
    Ok(best.map(|(_, ids)| ids))
}

fn exact_center(
    p: &Problem<'_>,
    near: &[Vec<usize>],
    x: usize,
    cands: &[usize],
) -> Option<(f64, Vec<usize>)> {
    let k = cands.len();
    let compat: Vec<u64> = match p.admissible {
        Admissible::Diameter(s) => (0..k)
            .map(|i| {
                (0..k).fold(0u64, |m, j| {
                    if j > i && p.space.d(cands[i], cands[j]) <= s {
                        m | (1 << j)
                    } else {
                        m
                    }
                })
            })
            .collect(),
        Admissible::Ball(_) => (0..k)
            .map(|i| if i + 1 >= 64 { 0 } else { !0u64 << (i + 1) })
            .collect(),
    };
    let full = if k == 64 { !0u64 } else { (1u64 << k) - 1 };
    let mut tracker = Tracker::new(p, near);
    let mut best = Best {
        ratio: f64::INFINITY,
        ids: Vec::new(),
    };
    let mut stack = Vec::with_capacity(k + 1);

    fn dfs(
        avail: u64,
        cands: &[usize],
        compat: &[u64],
        tracker: &mut Tracker<'_>,
        stack: &mut Vec<usize>,
        best: &mut Best,
    ) {
        let mut rest = avail;
        while rest != 0 {
            let i = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            let y = cands[i];
            tracker.add(y);
            stack.push(y);
            best.offer(tracker, stack);
            dfs(avail & compat[i], cands, compat, tracker, stack, best);
            stack.pop();
            tracker.remove(y);
        }
    }

    match p.admissible {
        Admissible::Diameter(_) => {
            tracker.add(x);
            stack.push(x);
            best.offer(&mut tracker, &stack);
            dfs(full, cands, &compat, &mut tracker, &mut stack, &mut best);
        }
        Admissible::Ball(_) => {
            dfs(full, cands, &compat, &mut tracker, &mut stack, &mut best);
        }
    }
    best.ratio.is_finite().then_some((best.ratio, best.ids))
}

fn heuristic_search(p: &Problem<'_>, near: &[Vec<usize>]) -> Option<Vec<usize>> {
    let n = p.space.len();
    let centers: Vec<usize> = match p.admissible {
        Admissible::Diameter(_) => (0..n).filter(|&x| p.allowed[x]).collect(),
        Admissible::Ball(_) => (0..n).collect(),
    };
    let mut seeds: Vec<(f64, Vec<usize>, usize)> = centers
        .par_iter()
        .filter_map(|&x| grow_balls(p, near, x).map(|(r, ids)| (r, ids, x)))
        .collect();
    seeds.sort_by(|a, b| key_cmp(a.0, &a.1, b.0, &b.1));
    seeds.dedup_by(|a, b| a.1 == b.1);
    seeds.truncate(SEEDS_FOR_LOCAL_SEARCH);
    let improved: Vec<Option<Candidate>> = seeds
        .par_iter()
        .map(|(_, ids, center)| {
            let ids = local_search(p, near, ids.clone(), *center);
            let set = PointSet::new(ids);
            let (boundary, mass, ratio) = p.evaluate(&set);
            (mass > 0.0).then(|| Candidate {
                diameter: p.space.diameter(&set),
                set,
                boundary,
                mass,
                ratio,
                exact: false,
            })
        })
        .collect();
    improved
        .into_iter()
        .fold(None, pick_best)
        .map(|c| c.set.into_vec())
}

/// Best ball `B(x; r) ∩ allowed` among admissible radii.
fn grow_balls(p: &Problem<'_>, near: &[Vec<usize>], x: usize) -> Option<(f64, Vec<usize>)> {
    let row = p.space.row(x);
    let max_r = match p.admissible {
        Admissible::Diameter(s) => s,
        Admissible::Ball(r) => r,
    };
    let mut rings: Vec<Vec<usize>> = vec![Vec::new(); max_r as usize + 1];
    for (y, &d) in row.iter().enumerate() {
        if d <= max_r && p.allowed[y] {
            rings[d as usize].push(y);
        }
    }
    let mut tracker = Tracker::new(p, near);
    let mut members: Vec<usize> = Vec::new();
    let mut best: Option<(f64, Vec<usize>)> = None;
    for (r, ring) in rings.iter().enumerate() {
        if ring.is_empty() && r > 0 {
            continue;
        }
        if let Admissible::Diameter(s) = p.admissible {
            if 2 * r as u32 > s {
                let diam_ok = ring.iter().all(|&y| {
                    members.iter().chain(ring.iter()).all(|&z| p.space.d(y, z) <= s)
                });
                if !diam_ok {
                    break;
                }
            }
        }
        for &y in ring {
            tracker.add(y);
            members.push(y);
        }
        let ratio = tracker.ratio();
        if ratio.is_finite() {
            let mut ids = members.clone();
            ids.sort_unstable();
            let ratio = tracker.exact_ratio(&ids);
            let better = best
                .as_ref()
                .is_none_or(|(br, bids)| key_cmp(ratio, &ids, *br, bids) == Ordering::Less);
            if better {
                best = Some((ratio, ids));
            }
        }
    }
    best
}

/// Steepest-descent single-point add/remove moves within the admissible
/// family (around `center` for ball admissibility).
fn local_search(p: &Problem<'_>, near: &[Vec<usize>], start: Vec<usize>, center: usize) -> Vec<usize> {
    let n = p.space.len();
    let mut tracker = Tracker::new(p, near);
    let mut members = start;
    for &x in &members {
        tracker.add(x);
    }
    let addable = |tracker: &Tracker<'_>, members: &[usize], y: usize| -> bool {
        if tracker.in_set[y] || !p.allowed[y] || p.mass_weights[y] <= 0.0 {
            return false;
        }
        match p.admissible {
            Admissible::Diameter(s) => members.iter().all(|&e| p.space.d(e, y) <= s),
            Admissible::Ball(r) => p.space.d(center, y) <= r,
        }
    };
    for _ in 0..(4 * n).max(16) {
        let current = tracker.exact_ratio(&members);
        let mut best_move: Option<(f64, bool, usize)> = None;
        let consider = |ratio: f64, add: bool, y: usize, best_move: &mut Option<(f64, bool, usize)>| {
            if ratio < current - 1e-12 * current.abs().max(1.0)
                && best_move.is_none_or(|(r, _, _)| ratio < r)
            {
                *best_move = Some((ratio, add, y));
            }
        };
        let frontier: Vec<usize> = (0..n).filter(|&y| tracker.cnt[y] > 0 && !tracker.in_set[y]).collect();
        for y in frontier {
            if addable(&tracker, &members, y) {
                tracker.add(y);
                let ratio = tracker.ratio();
                tracker.remove(y);
                consider(ratio, true, y, &mut best_move);
            }
        }
        if members.len() > 1 {
            for i in 0..members.len() {
                let y = members[i];
                tracker.remove(y);
                let ratio = tracker.ratio();
                tracker.add(y);
                consider(ratio, false, y, &mut best_move);
            }
        }
        match best_move {
            Some((_, true, y)) => {
                tracker.add(y);
                members.push(y);
            }
            Some((_, false, y)) => {
                tracker.remove(y);
                members.retain(|&z| z != y);
            }
            None => break,
        }
    }
    members.sort_unstable();
    members
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Graph;

    fn brute_force(p: &Problem<'_>) -> f64 {
        let n = p.space.len();
        let mut best = f64::INFINITY;
        for mask in 1u32..(1 << n) {
            let set = PointSet::from_mask(&(0..n).map(|i| mask >> i & 1 == 1).collect::<Vec<_>>());
            if set.iter().any(|x| !p.allowed[x]) {
                continue;
            }
            let ok = match p.admissible {
                Admissible::Diameter(s) => p.space.diameter(&set) <= s,
                Admissible::Ball(r) => (0..n).any(|c| set.iter().all(|y| p.space.d(c, y) <= r)),
            };
            if ok {
                best = best.min(p.evaluate(&set).2);
            }
        }
        best
    }

    #[test]
    fn exact_matches_brute_force() {
        let graphs = [
            Graph::cycle(9),
            Graph::path(10),
            Graph::complete(5),
            crate::generators::random_regular(10, 3, 3).unwrap(),
        ];
        for g in &graphs {
            let space = FiniteMetricSpace::from_graph(g);
            for r in 1..=2 {
                for adm in [Admissible::Diameter(2), Admissible::Diameter(3), Admissible::Ball(1)] {
                    let p = Problem::counting(&space, &space.all_points(), r, adm);
                    let got = minimize_ratio(&p).unwrap().unwrap();
                    let want = brute_force(&p);
                    assert!((got.ratio - want).abs() < 1e-12, "{adm:?} r={r}: {} vs {want}", got.ratio);
                    assert!(got.exact);
                }
            }
        }
    }

    #[test]
    fn capacity_error() {
        let space = FiniteMetricSpace::from_graph(&Graph::path(100));
        let p = Problem::counting(&space, &space.all_points(), 1, Admissible::Diameter(20));
        assert!(matches!(minimize_ratio(&p), Err(Error::Capacity { needed: 21, .. })));
    }

    #[test]
    fn heuristic_finds_long_arcs() {
        let space = FiniteMetricSpace::from_graph(&Graph::cycle(100));
        let p = Problem::counting(&space, &space.all_points(), 1, Admissible::Diameter(20))
            .with_mode(SearchMode::Heuristic, DEFAULT_BALL_CAP);
        let c = minimize_ratio(&p).unwrap().unwrap();
        assert_eq!(c.set.len(), 21);
        assert!((c.ratio - 2.0 / 21.0).abs() < 1e-15);
        assert!(!c.exact);
    }
}
