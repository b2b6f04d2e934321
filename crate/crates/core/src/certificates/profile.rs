//! Boundary-growth profiles, sampled growth comparison, and minimal Følner
//! diameters of Hamming powers.

use serde::{Deserialize, Serialize};

use crate::amenability::search::{Admissible, Problem};
use crate::amenability::{folner_search, Outcome, SearchMode, SearchOptions};
use crate::error::{Error, Result};
use crate::generators::{hamming_power, GraphFamily};
use crate::space::{FiniteMetricSpace, PointSet};

use super::{member_spaces, search_with_fallback, ProfilePoint, RatioRow, RefutationKind, RefutationReport, Skipped, Status};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProfileOptions {
    /// Members with fewer points are ignored.
    pub size_floor: usize,
    /// Restrict `E` to points at distance at least `R` from the frontier
    /// (vertices of less than maximal degree), so that truncation artifacts
    /// such as tree leaves do not produce spuriously small boundaries.
    pub avoid_frontier: bool,
    pub search: SearchOptions,
}

impl Default for ProfileOptions {
    fn default() -> Self {
        ProfileOptions {
            size_floor: 0,
            avoid_frontier: true,
            search: SearchOptions::default(),
        }
    }
}

/// Least-squares fit of `log f(R) = a + R·log(base)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExpFit {
    pub base: f64,
    pub intercept: f64,
    /// Root-mean-square residual in `log f`.
    pub rms_log_residual: f64,
    pub points: usize,
}

/// Fits the positive samples; `None` with fewer than two of them.
pub fn exponential_fit(samples: &[(u32, f64)]) -> Option<ExpFit> {
    let pts: Vec<(f64, f64)> = samples
        .iter()
        .filter(|(_, f)| *f > 0.0 && f.is_finite())
        .map(|&(r, f)| (r as f64, f.ln()))
        .collect();
    let m = pts.len() as f64;
    if pts.len() < 2 {
        return None;
    }
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let slope = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>() / sxx;
    let intercept = my - slope * mx;
    let rss: f64 = pts.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum();
    Some(ExpFit {
        base: slope.exp(),
        intercept,
        rms_log_residual: (rss / m).sqrt(),
        points: pts.len(),
    })
}

/// `f(R, S)`: for every member of at least `size_floor` points and every
/// `S` below the member's diameter, the minimal `|∂_R E| / |E|` over sets of
/// diameter at most `S` (the uniform measure on the member). Rows are made
/// monotone in `R` by re-evaluating witnesses found at larger `R`.
pub fn neg_ula_profile(family: &GraphFamily, r_list: &[u32], s_list: &[u32], opts: ProfileOptions) -> Result<RefutationReport> {
    let mut rs = r_list.to_vec();
    rs.sort_unstable();
    rs.dedup();
    let spaces = member_spaces(family);
    let mut rows: Vec<RatioRow> = Vec::new();
    let mut skipped = Vec::new();
    for (i, space) in spaces.iter().enumerate() {
        if space.len() < opts.size_floor {
            skipped.push(Skipped {
                member: i,
                reason: format!("{} points, below the size floor {}", space.len(), opts.size_floor),
            });
            continue;
        }
        let diam = space.max_finite_distance();
        let frontier = if opts.avoid_frontier { space.frontier() } else { PointSet::default() };
        let depth: Vec<u32> = (0..space.len()).map(|x| space.dist_to_set(x, &frontier)).collect();
        for &s in s_list {
            if diam <= s {
                skipped.push(Skipped {
                    member: i,
                    reason: format!("S = {s} is not below the member diameter {diam}"),
                });
                continue;
            }
            let mut block: Vec<RatioRow> = Vec::new();
            for &r in &rs {
                let allowed: Vec<bool> = depth.iter().map(|&d| d >= r).collect();
                let n = space.len();
                let p = Problem {
                    space,
                    allowed,
                    mass_weights: vec![1.0; n],
                    boundary_weights: vec![1.0; n],
                    r,
                    admissible: Admissible::Diameter(s),
                    mode: opts.search.mode,
                    cap: opts.search.cap,
                };
                match search_with_fallback(p)? {
                    Some(c) => block.push(super::row_from(i, family.offset(i), r, s, c, None, false)),
                    None => skipped.push(Skipped {
                        member: i,
                        reason: format!("no point at distance ≥ {r} from the frontier"),
                    }),
                }
            }
            monotone_pass(family.space(), &family.member(i), &mut block)?;
            rows.extend(block);
        }
    }
    if rows.is_empty() {
        return Err(Error::pre("empty table: no member qualifies for any (R, S)"));
    }
    let profile: Vec<ProfilePoint> = rs
        .iter()
        .filter_map(|&r| {
            rows.iter()
                .filter(|row| row.r == r)
                .min_by(|a, b| a.ratio.total_cmp(&b.ratio))
                .map(|row| ProfilePoint {
                    r,
                    f: row.ratio,
                    member: row.member,
                    s: row.s,
                    exact: row.exact,
                })
        })
        .collect();
    let fit = exponential_fit(&profile.iter().map(|p| (p.r, p.f)).collect::<Vec<_>>());
    let contiguous = profile.iter().enumerate().all(|(k, p)| p.r == k as u32 + 1);
    let linear_lower = (contiguous && !profile.is_empty())
        .then(|| {
            let ids: Vec<f64> = (1..=profile.len()).map(|r| r as f64).collect();
            let f: Vec<f64> = profile.iter().map(|p| p.f).collect();
            growth_compare(&ids, &f, &[0.25, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0], &[1.0, 2.0, 4.0, 8.0, 16.0]).ok()
        })
        .flatten();
    let mut rep = super::report(
        RefutationKind::Profile,
        family,
        "sets of diameter ≤ S, uniform measure per member".into(),
        rows,
        skipped,
    );
    rep.status = Status::Profiled;
    rep.profile = profile;
    rep.fit = fit;
    rep.linear_lower = linear_lower;
    Ok(rep)
}

/// `f(R)` must not exceed `f(R′)` for `R < R′`: a witness for `R′` is
/// admissible at `R` with a boundary no larger, so it is re-scored there.
fn monotone_pass(space: &FiniteMetricSpace, member: &PointSet, block: &mut [RatioRow]) -> Result<()> {
    for hi in (1..block.len()).rev() {
        for lo in 0..hi {
            let w = block[hi].witness.clone();
            let bnd = space.boundary(&w, block[lo].r)?.intersection(member).len();
            let ratio = bnd as f64 / w.len() as f64;
            if ratio < block[lo].ratio {
                let hi_exact = block[hi].exact;
                let row = &mut block[lo];
                row.ratio = ratio;
                row.boundary = bnd as f64;
                row.mass = w.len() as f64;
                row.exact = row.exact && hi_exact;
                row.witness = w;
            }
        }
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    /// `f ⪯ g` on the sample.
    Dominated,
    IncomparableOnSample,
}

/// Sampled comparison `f ⪯ g`. The verdict only speaks for the sampled
/// range; it is never a proof about the asymptotics.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrowthRelation {
    pub f: Vec<f64>,
    pub g: Vec<f64>,
    pub c: Option<f64>,
    pub d: Option<f64>,
    pub verdict: Verdict,
    pub sample_limited: bool,
}

/// Looks for `(c, d)` in the grids (in the given order, `c` outermost) with
/// `f(n) ≤ c·g(min(⌊d·n⌋, n_max))` for every `n` in `1..=n_max`.
pub fn growth_compare(f: &[f64], g: &[f64], c_grid: &[f64], d_grid: &[f64]) -> Result<GrowthRelation> {
    if f.len() != g.len() || f.is_empty() {
        return Err(Error::input("f and g must be sampled on the same nonempty range"));
    }
    let n_max = f.len();
    let holds = |c: f64, d: f64| {
        (1..=n_max).all(|n| {
            let m = ((d * n as f64).floor() as usize).clamp(1, n_max);
            f[n - 1] <= c * g[m - 1]
        })
    };
    let found = c_grid
        .iter()
        .flat_map(|&c| d_grid.iter().map(move |&d| (c, d)))
        .find(|&(c, d)| holds(c, d));
    Ok(GrowthRelation {
        f: f.to_vec(),
        g: g.to_vec(),
        c: found.map(|x| x.0),
        d: found.map(|x| x.1),
        verdict: if found.is_some() { Verdict::Dominated } else { Verdict::IncomparableOnSample },
        sample_limited: true,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CubeRow {
    pub n: usize,
    pub vertices: usize,
    pub space_diameter: u32,
    /// Smallest `D` with an `(R, ε)`-Følner set of diameter `≤ D`.
    pub min_diameter: u32,
    pub witness: PointSet,
    pub ratio: f64,
    /// False when some smaller diameter was only searched heuristically, so
    /// `min_diameter` is an upper bound.
    pub exact: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CubeTable {
    pub q: usize,
    #[serde(rename = "R")]
    pub r: u32,
    pub eps: f64,
    pub rows: Vec<CubeRow>,
    /// Why the table stops early, if it does.
    pub partial: Option<String>,
}

impl CubeTable {
    /// CSV with columns `n,vertices,min_diameter,witness_size,ratio,exact`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,vertices,min_diameter,witness_size,ratio,exact\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                r.n,
                r.vertices,
                r.min_diameter,
                r.witness.len(),
                r.ratio,
                r.exact
            ));
        }
        out
    }
}

/// Minimal diameter of an `(R, ε)`-Følner set in `(ℤ/qℤ)^n` for each `n`.
/// Powers above `vertex_cap` end the table.
pub fn cube_refute(q: usize, n_list: &[usize], r: u32, eps: f64, vertex_cap: usize, opts: SearchOptions) -> Result<CubeTable> {
    if !(eps > 0.0) {
        return Err(Error::input("ε must be positive"));
    }
    let mut rows = Vec::new();
    let mut partial = None;
    for &n in n_list {
        let g = match hamming_power(q, n, vertex_cap) {
            Ok(g) => g,
            Err(e @ Error::Capacity { .. }) => {
                partial = Some(format!("n = {n}: {e}"));
                break;
            }
            Err(e) => return Err(e),
        };
        let space = FiniteMetricSpace::from_graph(&g);
        let all = space.all_points();
        let diam = space.max_finite_distance();
        let mut exact = true;
        let mut row = None;
        for d in 0..=diam {
            let out = match folner_search(&space, &all, r, eps, d, opts) {
                Err(Error::Capacity { .. }) if opts.mode == SearchMode::Exact => {
                    exact = false;
                    folner_search(&space, &all, r, eps, d, SearchOptions::heuristic())?
                }
                other => other?,
            };
            if let Outcome::Found(w) = out {
                row = Some(CubeRow {
                    n,
                    vertices: space.len(),
                    space_diameter: diam,
                    min_diameter: d,
                    ratio: w.ratio,
                    witness: w.set,
                    exact: exact && w.exact,
                });
                break;
            }
        }
        rows.push(row.expect("the whole space has empty boundary"));
    }
    Ok(CubeTable {
        q,
        r,
        eps,
        rows,
        partial,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::Component;
    use crate::graph::Graph;

    #[test]
    fn growth_examples() {
        let f: Vec<f64> = (1..=20).map(|n| n as f64).collect();
        let g: Vec<f64> = (1..=20).map(|n| 2f64.powi(n)).collect();
        let grid: Vec<f64> = (1..=16).map(|c| c as f64).collect();
        let same = growth_compare(&f, &f, &grid, &grid).unwrap();
        assert_eq!((same.c, same.d), (Some(1.0), Some(1.0)));
        let up = growth_compare(&f, &g, &grid, &grid).unwrap();
        assert_eq!(up.verdict, Verdict::Dominated);
        assert_eq!((up.c, up.d), (Some(1.0), Some(1.0)));
        let down = growth_compare(&g, &f, &grid, &grid).unwrap();
        assert_eq!(down.verdict, Verdict::IncomparableOnSample);
        assert!(growth_compare(&f, &g[..3], &grid, &grid).is_err());
    }

    #[test]
    fn fit_recovers_a_base() {
        let s: Vec<(u32, f64)> = (1..6).map(|r| (r, 3.0 * 2f64.powi(r as i32))).collect();
        let fit = exponential_fit(&s).unwrap();
        assert!((fit.base - 2.0).abs() < 1e-12);
        assert!(fit.rms_log_residual < 1e-12);
        assert!(exponential_fit(&[(1, 1.0)]).is_none());
    }

    #[test]
    fn cycles_follow_the_arc_formula() {
        let fam = GraphFamily::chain(vec![Component::new("C40", Graph::cycle(40))]).unwrap();
        let rep = neg_ula_profile(&fam, &[0, 1, 2], &[5, 9], ProfileOptions::default()).unwrap();
        for row in &rep.rows {
            let expected = 2.0 * row.r as f64 / (row.s as f64 + 1.0);
            assert!((row.ratio - expected).abs() < 1e-12, "{row:?}");
        }
        assert_eq!(rep.profile[0].f, 0.0);
        assert!(rep.verify(&fam).unwrap());
    }

    #[test]
    fn small_members_are_skipped() {
        let fam = GraphFamily::chain(vec![Component::new("C6", Graph::cycle(6))]).unwrap();
        assert!(neg_ula_profile(&fam, &[1], &[3], ProfileOptions::default()).is_err());
    }

    #[test]
    fn cube_tables() {
        let t = cube_refute(2, &[1, 2, 3], 1, 0.5, 1 << 10, SearchOptions::exact()).unwrap();
        assert_eq!(t.rows[0].min_diameter, 1);
        assert_eq!(t.rows[0].witness.len(), 2);
        assert!(t.rows.iter().all(|r| r.exact && r.ratio < 0.5));
        assert!(t.rows.iter().all(|r| r.min_diameter <= r.space_diameter));
        let t = cube_refute(2, &[2, 20], 1, 0.5, 1 << 10, SearchOptions::exact()).unwrap();
        assert_eq!(t.rows.len(), 1);
        assert!(t.partial.is_some());
    }
}
