//! Følner witnesses for finite sets and probability measures, the
//! set/function conversions, property A extraction, pullback along coarse
//! maps, and isodiametric quantities.

mod isodiametric;
mod prop_a;
pub mod search;
mod variational;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::space::{measure_lt, CoarseMap, FiniteMetricSpace, PointSet, ProbMeasure};

pub use isodiametric::{isodiametric, layered_folner, wmsp_growth, Isodiametric, Layer};
pub use prop_a::{property_a_defect, property_a_to_folner, PropAExtraction, PropADefect, PropAField};
pub use search::{Admissible, Candidate, SearchMode, DEFAULT_BALL_CAP};
pub use variational::{
    set_to_variational, variational_ratio, variational_to_set, LayerChoice, VariationalWitness,
};

/// Whether a ratio is a count `|∂_R E ∩ F| / |E ∩ F|` or a measure
/// `μ(∂_R E) / μ(E)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WitnessMode {
    Count,
    Measure,
}

/// A set `E` with small `R`-boundary relative to itself.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FolnerWitness {
    #[serde(rename = "E")]
    pub set: PointSet,
    #[serde(rename = "R")]
    pub r: u32,
    pub eps: f64,
    pub diameter: u32,
    pub ratio: f64,
    pub boundary: f64,
    pub mass: f64,
    pub mode: WitnessMode,
    /// True iff the search that produced it was exhaustive.
    pub exact: bool,
}

/// Search outcome: a verified witness, or the best ratio seen.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Outcome {
    Found(FolnerWitness),
    NotFound {
        best: Option<Candidate>,
        /// True iff absence is proven (exact mode).
        exhaustive: bool,
    },
}

impl Outcome {
    pub fn witness(&self) -> Option<&FolnerWitness> {
        match self {
            Outcome::Found(w) => Some(w),
            Outcome::NotFound { .. } => None,
        }
    }

    pub fn is_found(&self) -> bool {
        matches!(self, Outcome::Found(_))
    }

    pub fn into_witness(self) -> Result<FolnerWitness> {
        match self {
            Outcome::Found(w) => Ok(w),
            Outcome::NotFound { best, exhaustive } => Err(Error::NoWitness(format!(
                "best ratio {} ({})",
                best.map_or("none".to_string(), |c| format!("{:.6}", c.ratio)),
                if exhaustive { "exhaustive" } else { "heuristic" }
            ))),
        }
    }
}

/// Search knobs shared by the witness searches.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchOptions {
    pub mode: SearchMode,
    pub cap: usize,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            mode: SearchMode::Exact,
            cap: DEFAULT_BALL_CAP,
        }
    }
}

impl SearchOptions {
    pub fn exact() -> Self {
        Self::default()
    }

    pub fn heuristic() -> Self {
        SearchOptions {
            mode: SearchMode::Heuristic,
            cap: DEFAULT_BALL_CAP,
        }
    }
}

/// `|∂_R E ∩ F|` and `|E ∩ F|`.
pub fn count_ratio(space: &FiniteMetricSpace, f: &PointSet, e: &PointSet, r: u32) -> Result<(usize, usize)> {
    let bnd = space.boundary(e, r)?.intersection(f).len();
    Ok((bnd, e.intersection(f).len()))
}

/// `μ(∂_R E)` and `μ(E)`.
pub fn measure_ratio(space: &FiniteMetricSpace, mu: &ProbMeasure, e: &PointSet, r: u32) -> Result<(f64, f64)> {
    Ok((mu.mass(&space.boundary(e, r)?), mu.mass(e)))
}

/// Finds `E ⊆ F` with `diam E ≤ S_max` and `|∂_R E ∩ F| < ε|E ∩ F|`,
/// returning the minimum-ratio such set.
pub fn folner_search(
    space: &FiniteMetricSpace,
    f: &PointSet,
    r: u32,
    eps: f64,
    s_max: u32,
    opts: SearchOptions,
) -> Result<Outcome> {
    space.check_set(f)?;
    if f.is_empty() {
        return Err(Error::input("F is empty"));
    }
    let problem = search::Problem::counting(space, f, r, Admissible::Diameter(s_max)).with_mode(opts.mode, opts.cap);
    let best = search::minimize_ratio(&problem)?;
    let exact = opts.mode == SearchMode::Exact;
    match best {
        Some(c) if c.boundary < eps * c.mass => {
            let (bnd, mass) = count_ratio(space, f, &c.set, r)?;
            debug_assert_eq!(bnd as f64, c.boundary);
            if !((bnd as f64) < eps * mass as f64) || c.diameter > s_max || !c.set.is_subset(f) {
                return Err(Error::NotAchieved("witness failed re-verification".into()));
            }
            Ok(Outcome::Found(FolnerWitness {
                set: c.set,
                r,
                eps,
                diameter: c.diameter,
                ratio: bnd as f64 / mass as f64,
                boundary: bnd as f64,
                mass: mass as f64,
                mode: WitnessMode::Count,
                exact,
            }))
        }
        best => Ok(Outcome::NotFound {
            best,
            exhaustive: exact,
        }),
    }
}

/// Finds `E ⊆ supp μ` with `diam E ≤ S_max` and `μ(∂_R E) < ε μ(E)`.
pub fn ula_mu_witness(
    space: &FiniteMetricSpace,
    mu: &ProbMeasure,
    r: u32,
    eps: f64,
    s_max: u32,
    opts: SearchOptions,
) -> Result<Outcome> {
    if mu.len() != space.len() {
        return Err(Error::input("measure does not match the space"));
    }
    weighted_witness(space, mu.weights(), r, eps, s_max, opts)
}

/// Like [`ula_mu_witness`] for arbitrary nonnegative weights (used on
/// unnormalised residual measures).
pub(crate) fn weighted_witness(
    space: &FiniteMetricSpace,
    weights: &[f64],
    r: u32,
    eps: f64,
    s_max: u32,
    opts: SearchOptions,
) -> Result<Outcome> {
    let problem =
        search::Problem::weighted(space, weights, r, Admissible::Diameter(s_max)).with_mode(opts.mode, opts.cap);
    let best = search::minimize_ratio(&problem)?;
    let exact = opts.mode == SearchMode::Exact;
    match best {
        Some(c) if measure_lt(c.boundary, eps * c.mass) => {
            let (bnd, mass, ratio) = problem.evaluate(&c.set);
            if !measure_lt(bnd, eps * mass) || c.diameter > s_max {
                return Err(Error::NotAchieved("witness failed re-verification".into()));
            }
            Ok(Outcome::Found(FolnerWitness {
                set: c.set,
                r,
                eps,
                diameter: c.diameter,
                ratio,
                boundary: bnd,
                mass,
                mode: WitnessMode::Measure,
                exact,
            }))
        }
        best => Ok(Outcome::NotFound {
            best,
            exhaustive: exact,
        }),
    }
}

/// Re-checks a witness against a space: diameter, ratio and the strict
/// inequality. For count mode `f` is the ambient finite set; for measure
/// mode `mu` is required.
pub fn verify_witness(
    space: &FiniteMetricSpace,
    w: &FolnerWitness,
    f: Option<&PointSet>,
    mu: Option<&ProbMeasure>,
) -> Result<bool> {
    space.check_set(&w.set)?;
    if space.diameter(&w.set) != w.diameter {
        return Ok(false);
    }
    match w.mode {
        WitnessMode::Count => {
            let all = space.all_points();
            let f = f.unwrap_or(&all);
            let (b, m) = count_ratio(space, f, &w.set, w.r)?;
            Ok(m > 0 && (b as f64) < w.eps * m as f64 && b as f64 == w.boundary && m as f64 == w.mass)
        }
        WitnessMode::Measure => {
            let mu = mu.ok_or_else(|| Error::input("measure witness needs a measure"))?;
            let (b, m) = measure_ratio(space, mu, &w.set, w.r)?;
            Ok(m > 0.0 && measure_lt(b, w.eps * m) && (b - w.boundary).abs() < 1e-9)
        }
    }
}

/// Pulls a witness back along a coarse map: `E = f⁻¹(E′) ∩ F`.
///
/// `e_prime` must satisfy `|∂_{ρ₊(R)} E′ ∩ f(F)| < (ε/D) |E′ ∩ f(F)|` in
/// `y`; the returned witness is re-verified in `x`.
pub fn pullback_witness(
    x: &FiniteMetricSpace,
    y: &FiniteMetricSpace,
    map: &CoarseMap,
    f: &PointSet,
    e_prime: &PointSet,
    r: u32,
    eps: f64,
) -> Result<FolnerWitness> {
    x.check_set(f)?;
    y.check_set(e_prime)?;
    let image = map.image(f);
    let big_r = map.rho_plus(r);
    let d = map.fiber_bound() as f64;
    let (b, m) = count_ratio(y, &image, e_prime, big_r)?;
    if m == 0 || !((b as f64) < (eps / d) * m as f64) {
        return Err(Error::pre(format!(
            "|∂_{big_r} E′ ∩ f(F)| = {b} is not < (ε/D)·|E′ ∩ f(F)| = {}",
            eps / d * m as f64
        )));
    }
    let e = map.preimage_within(e_prime, f);
    let (bx, mx) = count_ratio(x, f, &e, r)?;
    if mx == 0 || !((bx as f64) < eps * mx as f64) {
        return Err(Error::NotAchieved(format!(
            "pulled-back set has |∂_R E ∩ F| = {bx}, |E ∩ F| = {mx}"
        )));
    }
    Ok(FolnerWitness {
        diameter: x.diameter(&e),
        set: e,
        r,
        eps,
        ratio: bx as f64 / mx as f64,
        boundary: bx as f64,
        mass: mx as f64,
        mode: WitnessMode::Count,
        exact: true,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Graph;

    fn space(g: Graph) -> FiniteMetricSpace {
        FiniteMetricSpace::from_graph(&g)
    }

    #[test]
    fn singleton_f_is_its_own_witness() {
        let s = space(Graph::cycle(10));
        let f = PointSet::singleton(3);
        let w = folner_search(&s, &f, 2, 0.01, 0, SearchOptions::exact())
            .unwrap()
            .into_witness()
            .unwrap();
        assert_eq!(w.set, f);
        assert_eq!(w.ratio, 0.0);
    }

    #[test]
    fn arcs_on_cycles_and_paths() {
        let c = space(Graph::cycle(100));
        let w = folner_search(&c, &c.all_points(), 1, 0.1, 20, SearchOptions::heuristic())
            .unwrap()
            .into_witness()
            .unwrap();
        assert!((w.ratio - 2.0 / 21.0).abs() < 1e-15);
        assert_eq!(w.diameter, 20);
        assert!(!w.exact);

        let p = space(Graph::path(100));
        let w = folner_search(&p, &p.all_points(), 1, 0.1, 20, SearchOptions::heuristic())
            .unwrap()
            .into_witness()
            .unwrap();
        assert!(w.ratio <= 2.0 / 21.0);
        assert!(verify_witness(&p, &w, None, None).unwrap());
    }

    #[test]
    fn uniform_measure_agrees_with_counting() {
        let p = space(Graph::path(60));
        let mu = ProbMeasure::uniform(60).unwrap();
        let a = folner_search(&p, &p.all_points(), 1, 0.2, 12, SearchOptions::heuristic()).unwrap();
        let b = ula_mu_witness(&p, &mu, 1, 0.2, 12, SearchOptions::heuristic()).unwrap();
        let (a, b) = (a.witness().unwrap(), b.witness().unwrap());
        assert!((a.ratio - b.ratio).abs() < 1e-12);
        for set in [&a.set, &b.set] {
            let (cb, cm) = count_ratio(&p, &p.all_points(), set, 1).unwrap();
            let (mb, mm) = measure_ratio(&p, &mu, set, 1).unwrap();
            assert!((cb as f64 / cm as f64 - mb / mm).abs() < 1e-12);
        }
    }

    #[test]
    fn point_mass_witness() {
        let p = space(Graph::cycle(12));
        let mu = ProbMeasure::point_mass(12, 5).unwrap();
        let w = ula_mu_witness(&p, &mu, 3, 0.5, 4, SearchOptions::exact())
            .unwrap()
            .into_witness()
            .unwrap();
        assert_eq!(w.set, PointSet::singleton(5));
        assert_eq!(w.ratio, 0.0);
        assert!(verify_witness(&p, &w, None, Some(&mu)).unwrap());
    }

    #[test]
    fn identity_pullback() {
        let p = space(Graph::path(30));
        let id = CoarseMap::identity(&p);
        let e = PointSet::range(5, 20);
        let w = pullback_witness(&p, &p, &id, &p.all_points(), &e, 1, 0.5).unwrap();
        assert_eq!(w.set, e);
        assert!((w.ratio - 2.0 / 15.0).abs() < 1e-15);
    }

    #[test]
    fn fold_pullback() {
        let big = space(Graph::cycle(200));
        let small = space(Graph::cycle(100));
        let fold = CoarseMap::new(&big, &small, (0..200).map(|i| i % 100).collect()).unwrap();
        assert_eq!(fold.fiber_bound(), 2);
        assert_eq!(fold.rho_plus(1), 1);
        let arc = PointSet::range(10, 50);
        let w = pullback_witness(&big, &small, &fold, &big.all_points(), &arc, 1, 0.2).unwrap();
        assert_eq!(w.set.len(), 80);
        assert!((w.ratio - 4.0 / 80.0).abs() < 1e-15);
        let too_big = PointSet::range(10, 15);
        assert!(matches!(
            pullback_witness(&big, &small, &fold, &big.all_points(), &too_big, 1, 0.2),
            Err(Error::Precondition(_))
        ));
    }
}
