//! Negative and positive certificates: vertex expansion, refutation of
//! uniform local amenability for expanders and large-girth families, lifting
//! Følner sets out of box-space quotients, boundary-growth profiles and
//! Hamming-cube tables.
//!
//! Refutations are checked member by member. Each member of a
//! [`GraphFamily`] is searched in its own graph metric; since members are at
//! distance at least 2 in the family space, the 1-boundary of a subset of a
//! member never leaves that member.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::amenability::search::{self, Admissible, Candidate, Problem};
use crate::amenability::{SearchMode, SearchOptions};
use crate::error::{Error, Result};
use crate::generators::{spectral_gap, GraphFamily};
use crate::graph::Graph;
use crate::space::{FiniteMetricSpace, PointSet, MEASURE_SLACK};

mod lift;
mod profile;

pub use lift::{box_lift, injectivity_radius, LiftReport};
pub use profile::{
    cube_refute, exponential_fit, growth_compare, neg_ula_profile, CubeRow, CubeTable, ExpFit, GrowthRelation,
    ProfileOptions, Verdict,
};

/// Largest vertex count for which [`vertex_cheeger`] enumerates subsets.
pub const CHEEGER_EXACT_MAX: usize = 22;

/// `ε₀ = min_{0 < |A| ≤ n/2} |∂₁A| / |A|`, or a lower bound for it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Cheeger {
    pub epsilon: f64,
    /// A minimizing subset when the value is exact.
    pub witness: Option<PointSet>,
    pub boundary: usize,
    pub size: usize,
    /// False for the spectral bound `λ₂ / (2 d_max)`.
    pub exact: bool,
}

/// Vertex expansion by enumeration over all subsets of at most half the
/// vertices (up to [`CHEEGER_EXACT_MAX`] vertices), otherwise the spectral
/// lower bound `λ₂/(2d_max)`. Ties go to the smallest bitmask.
pub fn vertex_cheeger(graph: &Graph) -> Cheeger {
    let n = graph.len();
    if n > CHEEGER_EXACT_MAX {
        let d_max = graph.max_degree();
        let gap = spectral_gap(graph, 1e-10);
        let epsilon = if d_max == 0 { 0.0 } else { (gap.lambda2 / (2.0 * d_max as f64)).max(0.0) };
        return Cheeger {
            epsilon,
            witness: None,
            boundary: 0,
            size: 0,
            exact: false,
        };
    }
    if n < 2 {
        // no nonempty subset has at most n/2 points
        return Cheeger {
            epsilon: f64::INFINITY,
            witness: None,
            boundary: 0,
            size: 0,
            exact: true,
        };
    }
    let nbr: Vec<u32> = (0..n)
        .map(|x| graph.neighbors(x).iter().fold(0u32, |m, &y| m | (1 << y)))
        .collect();
    let total = 1usize << n;
    let mut reach = vec![0u32; total];
    for mask in 1..total {
        let low = mask.trailing_zeros() as usize;
        reach[mask] = reach[mask & (mask - 1)] | nbr[low];
    }
    let half = (n / 2) as u32;
    // (boundary, size, mask), compared as fractions
    let better = |a: (u32, u32, usize), b: (u32, u32, usize)| {
        let lhs = a.0 as u64 * b.1 as u64;
        let rhs = b.0 as u64 * a.1 as u64;
        if lhs < rhs || (lhs == rhs && a.2 < b.2) {
            a
        } else {
            b
        }
    };
    let best = (1..total)
        .into_par_iter()
        .with_min_len(1 << 12)
        .filter_map(|mask| {
            let size = (mask as u32).count_ones();
            (size <= half).then(|| ((reach[mask] & !(mask as u32)).count_ones(), size, mask))
        })
        .reduce_with(better)
        .expect("n ≥ 2 has a singleton");
    Cheeger {
        epsilon: best.0 as f64 / best.1 as f64,
        witness: Some(PointSet::new((0..n).filter(|&i| best.2 >> i & 1 == 1).collect())),
        boundary: best.0 as usize,
        size: best.1 as usize,
        exact: true,
    }
}

/// One tabulated minimal ratio with its minimizing set.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RatioRow {
    pub member: usize,
    #[serde(rename = "R")]
    pub r: u32,
    #[serde(rename = "S")]
    pub s: u32,
    /// `|∂_R E ∩ X_n| / |E|`, i.e. the ratio for the uniform measure on the
    /// member.
    pub ratio: f64,
    pub boundary: f64,
    pub mass: f64,
    /// Minimizer, in family-space ids.
    pub witness: PointSet,
    /// True iff the search over admissible sets was exhaustive.
    pub exact: bool,
    /// The lower bound the row is checked against, if any.
    pub bound: Option<f64>,
    pub bound_exact: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Skipped {
    pub member: usize,
    pub reason: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RefutationKind {
    Expander,
    Girth,
    Profile,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    /// Every qualifying member was searched exhaustively and no admissible
    /// set beats its bound.
    Refuted,
    /// No row beats its bound, but some rows are heuristic.
    Consistent,
    /// Some admissible set beats its bound.
    Violated,
    /// No member qualified.
    Inconclusive,
    /// A plain table with no bound attached.
    Profiled,
}

/// `min_S f(R, S)` at one `R`, with the row that attains it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProfilePoint {
    #[serde(rename = "R")]
    pub r: u32,
    pub f: f64,
    pub member: usize,
    #[serde(rename = "S")]
    pub s: u32,
    pub exact: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RefutationReport {
    pub kind: RefutationKind,
    pub members: Vec<String>,
    /// Human-readable admissibility policy, e.g. `subsets of B(x; 2)`.
    pub policy: String,
    pub rows: Vec<RatioRow>,
    pub skipped: Vec<Skipped>,
    pub profile: Vec<ProfilePoint>,
    pub fit: Option<ExpFit>,
    /// Whether `R ↦ R` is dominated by the profile on the sample.
    pub linear_lower: Option<GrowthRelation>,
    pub status: Status,
}

impl RefutationReport {
    /// Smallest tabulated ratio.
    pub fn min_ratio(&self) -> Option<f64> {
        self.rows.iter().map(|r| r.ratio).min_by(f64::total_cmp)
    }

    pub fn exact(&self) -> bool {
        self.rows.iter().all(|r| r.exact)
    }

    /// Recomputes every row from its stored witness.
    pub fn verify(&self, family: &GraphFamily) -> Result<bool> {
        let space = family.space();
        for row in &self.rows {
            let member = family.member(row.member);
            if !row.witness.is_subset(&member) || row.witness.is_empty() {
                return Ok(false);
            }
            let bnd = space.boundary(&row.witness, row.r)?.intersection(&member).len();
            let ratio = bnd as f64 / row.witness.len() as f64;
            if (ratio - row.ratio).abs() > MEASURE_SLACK {
                return Ok(false);
            }
            if self.kind == RefutationKind::Profile && space.diameter(&row.witness) > row.s {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// CSV with columns `member,R,S,f,witness_size,exact`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("member,R,S,f,witness_size,exact\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                r.member,
                r.r,
                r.s,
                r.ratio,
                r.witness.len(),
                r.exact
            ));
        }
        out
    }
}

fn member_spaces(family: &GraphFamily) -> Vec<FiniteMetricSpace> {
    family
        .components()
        .par_iter()
        .map(|c| FiniteMetricSpace::from_graph(&c.graph))
        .collect()
}

/// Runs the search in the requested mode, falling back to the heuristic when
/// an exhaustive search would exceed the cap.
pub(crate) fn search_with_fallback(p: Problem<'_>) -> Result<Option<Candidate>> {
    match search::minimize_ratio(&p) {
        Err(Error::Capacity { .. }) if p.mode == SearchMode::Exact => {
            search::minimize_ratio(&p.with_mode(SearchMode::Heuristic, 0))
        }
        other => other,
    }
}

fn status_of(rows: &[RatioRow]) -> Status {
    if rows.is_empty() {
        Status::Inconclusive
    } else if rows
        .iter()
        .any(|r| r.bound.is_some_and(|b| r.ratio < b - MEASURE_SLACK))
    {
        Status::Violated
    } else if rows.iter().all(|r| r.exact) {
        Status::Refuted
    } else {
        Status::Consistent
    }
}

fn row_from(member: usize, offset: usize, r: u32, s: u32, c: Candidate, bound: Option<f64>, bound_exact: bool) -> RatioRow {
    RatioRow {
        member,
        r,
        s,
        ratio: c.ratio,
        boundary: c.boundary,
        mass: c.mass,
        witness: PointSet::new(c.set.iter().map(|x| x + offset).collect()),
        exact: c.exact,
        bound,
        bound_exact,
    }
}

fn report(kind: RefutationKind, family: &GraphFamily, policy: String, rows: Vec<RatioRow>, skipped: Vec<Skipped>) -> RefutationReport {
    RefutationReport {
        kind,
        members: family.components().iter().map(|c| c.name.clone()).collect(),
        policy,
        status: status_of(&rows),
        rows,
        skipped,
        profile: Vec::new(),
        fit: None,
        linear_lower: None,
    }
}

/// For every member with `|X_n| ≥ 2N_S`, the minimal `|∂₁E|/|E|` over
/// subsets `E` of balls of radius `S`, checked against the member's vertex
/// expansion. Every such `E` has at most half the member's points, so a
/// minimum at least `ε₀` rules out `(1, ε, S)`-Følner sets for `ε ≤ ε₀`.
pub fn expander_refute(family: &GraphFamily, s: u32, opts: SearchOptions) -> Result<RefutationReport> {
    let spaces = member_spaces(family);
    let mut rows = Vec::new();
    let mut skipped = Vec::new();
    for (i, space) in spaces.iter().enumerate() {
        let n_s = space.max_ball_size(s);
        if space.len() < 2 * n_s {
            skipped.push(Skipped {
                member: i,
                reason: format!("|X| = {} < 2N_S = {}", space.len(), 2 * n_s),
            });
            continue;
        }
        let cheeger = vertex_cheeger(&family.components()[i].graph);
        let p = Problem::counting(space, &space.all_points(), 1, Admissible::Ball(s)).with_mode(opts.mode, opts.cap);
        let best = search_with_fallback(p)?.ok_or_else(|| Error::input("empty member"))?;
        rows.push(row_from(i, family.offset(i), 1, s, best, Some(cheeger.epsilon), cheeger.exact));
    }
    Ok(report(
        RefutationKind::Expander,
        family,
        format!("subsets of B(x; {s})"),
        rows,
        skipped,
    ))
}

/// What to do with vertices of degree below 3.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum DegreePolicy {
    /// Any vertex of degree below 3 is an error.
    #[default]
    Strict,
    /// `E` ranges over vertices of degree at least 3 only (for truncated
    /// trees, whose leaves violate the degree hypothesis).
    FullDegreeOnly,
}

/// For every member of girth greater than `2S + 2`, the minimal `|∂₁E|/|E|`
/// over subsets of balls of radius `⌈S/2⌉` (which hold every set of
/// diameter `≤ S` in a tree), checked against `1/(D − 1)`.
pub fn girth_refute(family: &GraphFamily, s: u32, policy: DegreePolicy, opts: SearchOptions) -> Result<RefutationReport> {
    let spaces = member_spaces(family);
    let radius = s.div_ceil(2);
    let mut rows = Vec::new();
    let mut skipped = Vec::new();
    for (i, space) in spaces.iter().enumerate() {
        let g = &family.components()[i].graph;
        let d_max = g.max_degree();
        if d_max < 3 {
            return Err(Error::pre(format!("member {i} has maximum degree {d_max} < 3")));
        }
        let allowed: Vec<bool> = (0..g.len()).map(|x| g.degree(x) >= 3).collect();
        if allowed.iter().any(|ok| !ok) && policy == DegreePolicy::Strict {
            return Err(Error::pre(format!("member {i} has a vertex of degree {} < 3", g.min_degree())));
        }
        if let Some(girth) = g.girth() {
            if girth as u64 <= 2 * s as u64 + 2 {
                skipped.push(Skipped {
                    member: i,
                    reason: format!("girth {girth} ≤ 2S + 2 = {}", 2 * s + 2),
                });
                continue;
            }
        }
        let n = space.len();
        let p = Problem {
            space,
            allowed,
            mass_weights: vec![1.0; n],
            boundary_weights: vec![1.0; n],
            r: 1,
            admissible: Admissible::Ball(radius),
            mode: opts.mode,
            cap: opts.cap,
        };
        let Some(best) = search_with_fallback(p)? else {
            skipped.push(Skipped {
                member: i,
                reason: "no vertex of degree ≥ 3".into(),
            });
            continue;
        };
        let bound = 1.0 / (d_max as f64 - 1.0);
        rows.push(row_from(i, family.offset(i), 1, s, best, Some(bound), true));
    }
    Ok(report(
        RefutationKind::Girth,
        family,
        format!("subsets of B(x; {radius}) within degree ≥ 3"),
        rows,
        skipped,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::amenability::folner_search;
    use crate::generators::{random_regular, Component};

    fn brute_cheeger(g: &Graph) -> f64 {
        let n = g.len();
        let mut best = f64::INFINITY;
        for mask in 1usize..1 << n {
            let set: Vec<usize> = (0..n).filter(|&i| mask >> i & 1 == 1).collect();
            if set.len() * 2 > n {
                continue;
            }
            let mut bnd = std::collections::BTreeSet::new();
            for &x in &set {
                for &y in g.neighbors(x) {
                    if mask >> y & 1 == 0 {
                        bnd.insert(y);
                    }
                }
            }
            best = best.min(bnd.len() as f64 / set.len() as f64);
        }
        best
    }

    #[test]
    fn cheeger_small_graphs() {
        let k4 = vertex_cheeger(&Graph::complete(4));
        assert_eq!(k4.epsilon, 1.0);
        assert_eq!(k4.size, 2);
        let c6 = vertex_cheeger(&Graph::cycle(6));
        assert!((c6.epsilon - 2.0 / 3.0).abs() < 1e-15);
        let two = Graph::from_edges(4, &[(0, 1), (2, 3)]).unwrap();
        assert_eq!(vertex_cheeger(&two).epsilon, 0.0);
        for seed in 0..4 {
            let g = random_regular(12, 3, seed).unwrap();
            assert_eq!(vertex_cheeger(&g).epsilon, brute_cheeger(&g));
        }
    }

    #[test]
    fn spectral_bound_is_below_exact() {
        let g = random_regular(20, 3, 9).unwrap();
        let exact = vertex_cheeger(&g).epsilon;
        let d = g.max_degree() as f64;
        let bound = spectral_gap(&g, 1e-10).lambda2 / (2.0 * d);
        assert!(bound <= exact + 1e-12);
        let big = random_regular(40, 3, 9).unwrap();
        assert!(!vertex_cheeger(&big).exact);
    }

    #[test]
    fn complete_graphs_at_radius_zero() {
        let fam = GraphFamily::chain(vec![
            Component::new("K4", Graph::complete(4)),
            Component::new("K6", Graph::complete(6)),
        ])
        .unwrap();
        let rep = expander_refute(&fam, 0, SearchOptions::exact()).unwrap();
        assert_eq!(rep.rows.len(), 2);
        assert_eq!(rep.rows[0].ratio, 3.0);
        assert_eq!(rep.rows[1].ratio, 5.0);
        assert_eq!(rep.status, Status::Refuted);
        assert!(rep.verify(&fam).unwrap());
    }

    #[test]
    fn expander_matches_folner_search() {
        let g = random_regular(16, 3, 4).unwrap();
        let eps0 = vertex_cheeger(&g).epsilon;
        let fam = GraphFamily::single(Component::new("g16", g.clone())).unwrap();
        let rep = expander_refute(&fam, 1, SearchOptions::exact()).unwrap();
        assert_eq!(rep.status, Status::Refuted);
        assert!(rep.rows[0].ratio >= eps0);
        let space = FiniteMetricSpace::from_graph(&g);
        let out = folner_search(&space, &space.all_points(), 1, eps0, 1, SearchOptions::exact()).unwrap();
        assert!(!out.is_found());
        // at S = 2 the member is too small for the claim
        let rep = expander_refute(&fam, 2, SearchOptions::exact()).unwrap();
        assert_eq!(rep.status, Status::Inconclusive);
        assert_eq!(rep.skipped.len(), 1);
    }

    #[test]
    fn girth_on_truncated_tree() {
        let fam = GraphFamily::single(Component::new("T3", Graph::regular_tree(3, 4))).unwrap();
        assert!(matches!(
            girth_refute(&fam, 4, DegreePolicy::Strict, SearchOptions::exact()),
            Err(Error::Precondition(_))
        ));
        let rep = girth_refute(&fam, 4, DegreePolicy::FullDegreeOnly, SearchOptions::exact()).unwrap();
        assert_eq!(rep.status, Status::Refuted);
        assert!(rep.min_ratio().unwrap() >= 0.5);
        assert!(rep.verify(&fam).unwrap());
    }

    #[test]
    fn girth_guard_skips() {
        // Petersen graph: 3-regular, girth 5
        let outer: Vec<(usize, usize)> = (0..5).map(|i| (i, (i + 1) % 5)).collect();
        let inner: Vec<(usize, usize)> = (0..5).map(|i| (5 + i, 5 + (i + 2) % 5)).collect();
        let spokes: Vec<(usize, usize)> = (0..5).map(|i| (i, i + 5)).collect();
        let edges: Vec<_> = outer.into_iter().chain(inner).chain(spokes).collect();
        let petersen = Graph::from_edges(10, &edges).unwrap();
        assert_eq!(petersen.girth(), Some(5));
        let fam = GraphFamily::single(Component::new("petersen", petersen)).unwrap();
        let rep = girth_refute(&fam, 2, DegreePolicy::Strict, SearchOptions::exact()).unwrap();
        assert_eq!(rep.status, Status::Inconclusive);
        let rep = girth_refute(&fam, 1, DegreePolicy::Strict, SearchOptions::exact()).unwrap();
        assert!(rep.min_ratio().unwrap() >= 0.5);
    }

    #[test]
    fn csv_has_a_row_per_entry() {
        let fam = GraphFamily::single(Component::new("K5", Graph::complete(5))).unwrap();
        let rep = expander_refute(&fam, 0, SearchOptions::exact()).unwrap();
        let csv = rep.to_csv();
        assert_eq!(csv.lines().count(), 2);
        assert!(csv.starts_with("member,R,S,f,witness_size,exact"));
    }
}
