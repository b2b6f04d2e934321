//! Metric sparsifications: the greedy construction from Følner witnesses,
//! the selection of a Følner piece from a sparsification, verifiers for the
//! plain, weak and colour-class (asymptotic dimension) variants, and the
//! pigeonhole conversion from a colour cover to a weak sparsification.

use serde::{Deserialize, Serialize};

use crate::amenability::{self, FolnerWitness, Outcome, SearchOptions, WitnessMode};
use crate::error::{Error, Result};
use crate::space::{measure_le, FiniteMetricSpace, PointSet, ProbMeasure, MEASURE_SLACK, SEPARATED};

/// Per-stage record of the greedy construction.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Stage {
    /// `μ(∂_R E_i ∩ F_i) / μ(E_i)`.
    pub ratio: f64,
    pub diameter: u32,
    /// `μ(F_i)`: the normalising factor of the residual measure.
    pub residual_mass: f64,
    pub piece_mass: f64,
    pub carved_boundary_mass: f64,
}

/// `Ω = ⊔ Ω_i` with pairwise separation `> R` and diameters `≤ S`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SparseDecomposition {
    pub pieces: Vec<PointSet>,
    #[serde(rename = "R")]
    pub r: u32,
    #[serde(rename = "S")]
    pub s: u32,
    /// `μ(Ω)` (or `|Ω ∩ F| / |F|` for counting decompositions).
    pub mass: f64,
    #[serde(default)]
    pub stages: Vec<Stage>,
}

impl SparseDecomposition {
    pub fn union(&self) -> PointSet {
        self.pieces.iter().fold(PointSet::default(), |acc, p| acc.union(p))
    }
}

/// Greedy sparsification: repeatedly pick a Følner witness `E_i` for the
/// residual measure on `F_i` and carve out `N_R(E_i)`.
///
/// Residual measures are kept unnormalised; ratios are scale-free, and each
/// stage records the factor `μ(F_i)`.
pub fn greedy_sparsify(
    space: &FiniteMetricSpace,
    mu: &ProbMeasure,
    r: u32,
    eps: f64,
    s: u32,
    opts: SearchOptions,
) -> Result<SparseDecomposition> {
    if mu.len() != space.len() {
        return Err(Error::input("measure does not match the space"));
    }
    if !(eps > 0.0) {
        return Err(Error::input("ε must be positive"));
    }
    let mut residual = mu.support();
    let mut pieces = Vec::new();
    let mut stages = Vec::new();
    while !residual.is_empty() {
        let mut weights = vec![0.0; space.len()];
        for x in residual.iter() {
            weights[x] = mu.weight(x);
        }
        let residual_mass = mu.mass(&residual);
        let w = match amenability::weighted_witness(space, &weights, r, eps, s, opts)? {
            Outcome::Found(w) => w,
            Outcome::NotFound { best, exhaustive } => {
                return Err(Error::NoWitness(format!(
                    "stage {}: residual measure on {} points (mass {residual_mass:.6}) has no ({r}, {eps}, {s}) witness; best ratio {}{}",
                    stages.len() + 1,
                    residual.len(),
                    best.map_or("n/a".to_string(), |c| format!("{:.6}", c.ratio)),
                    if exhaustive { " (exhaustive)" } else { " (heuristic)" },
                )))
            }
        };
        let carved = space.neighborhood(&w.set, r)?.intersection(&residual);
        let boundary_part = carved.difference(&w.set);
        stages.push(Stage {
            ratio: w.ratio,
            diameter: w.diameter,
            residual_mass,
            piece_mass: mu.mass(&w.set),
            carved_boundary_mass: mu.mass(&boundary_part),
        });
        residual = residual.difference(&carved);
        pieces.push(w.set);
    }
    let mass: f64 = pieces.iter().map(|p| mu.mass(p)).sum();
    let decomposition = SparseDecomposition {
        pieces,
        r,
        s,
        mass,
        stages,
    };
    let total = accounting_total(&decomposition);
    if (total - mu.total()).abs() > 1e-12 {
        return Err(Error::NotAchieved(format!("mass accounting drifted: Σ = {total}")));
    }
    if !(mass + MEASURE_SLACK >= 1.0 / (1.0 + eps)) {
        return Err(Error::NotAchieved(format!("captured mass {mass} < 1/(1+ε)")));
    }
    Ok(decomposition)
}

/// `Σ_i [μ(E_i) + μ(∂_R E_i ∩ F_i)]`, which equals `μ(supp μ) = 1` for a
/// greedy decomposition.
pub fn accounting_total(d: &SparseDecomposition) -> f64 {
    d.stages.iter().map(|s| s.piece_mass + s.carved_boundary_mass).sum()
}

/// Selects a piece `E` of a sparsification at scale `2R` with
/// `μ(∂_R E) ≤ (1/c − 1) μ(E)`.
pub fn decomposition_to_folner(
    space: &FiniteMetricSpace,
    mu: &ProbMeasure,
    omega: &SparseDecomposition,
    r: u32,
    c: f64,
) -> Result<FolnerWitness> {
    if !(c > 0.0 && c <= 1.0) {
        return Err(Error::input("c must lie in (0, 1]"));
    }
    let report = verify_msp(space, mu, &omega.pieces, 2 * r, u32::MAX, c);
    if !report.separated() {
        let (i, j, d) = report.separation_violations[0];
        return Err(Error::pre(format!("pieces {i} and {j} are {d} <= 2R apart")));
    }
    if !report.mass_ok {
        return Err(Error::pre(format!("μ(Ω) = {} < c = {c}", report.mass)));
    }
    let mut nbhd_total = 0.0;
    for p in &omega.pieces {
        nbhd_total += mu.mass(&space.neighborhood(p, r)?);
    }
    if !measure_le(nbhd_total, 1.0) {
        return Err(Error::NotAchieved(format!(
            "R-neighbourhoods are not disjoint: Σ μ(N_R Ω_i) = {nbhd_total}"
        )));
    }
    let eps = 1.0 / c - 1.0;
    let mut best: Option<(f64, &PointSet, f64, f64)> = None;
    for p in &omega.pieces {
        let m = mu.mass(p);
        if m <= 0.0 {
            continue;
        }
        let b = mu.mass(&space.boundary(p, r)?);
        let ratio = b / m;
        if best.is_none_or(|(br, bp, _, _)| ratio < br || (ratio == br && p < bp)) {
            best = Some((ratio, p, b, m));
        }
    }
    let (ratio, set, b, m) = best.ok_or_else(|| Error::pre("no piece carries mass"))?;
    if !measure_le(b, eps * m) {
        return Err(Error::NotAchieved(format!("best piece ratio {ratio} exceeds 1/c − 1 = {eps}")));
    }
    Ok(FolnerWitness {
        diameter: space.diameter(set),
        set: set.clone(),
        r,
        eps,
        ratio,
        boundary: b,
        mass: m,
        mode: WitnessMode::Measure,
        exact: true,
    })
}

/// Clause-by-clause verdict of a sparsification check.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MspReport {
    pub mass: f64,
    pub mass_ok: bool,
    /// `(piece, diameter)` with diameter above the bound.
    pub diameter_violations: Vec<(usize, u32)>,
    /// `(i, j, d(Ω_i, Ω_j))` with distance not above `R`.
    pub separation_violations: Vec<(usize, usize, u32)>,
    /// Points outside the space or pieces outside `F`.
    pub other: Vec<String>,
}

impl MspReport {
    pub fn separated(&self) -> bool {
        self.separation_violations.is_empty()
    }

    pub fn valid(&self) -> bool {
        self.mass_ok && self.diameter_violations.is_empty() && self.separated() && self.other.is_empty()
    }
}

fn piece_clauses(space: &FiniteMetricSpace, pieces: &[PointSet], r: u32, s: u32) -> MspReport {
    let mut report = MspReport {
        mass: 0.0,
        mass_ok: false,
        diameter_violations: Vec::new(),
        separation_violations: Vec::new(),
        other: Vec::new(),
    };
    for (i, p) in pieces.iter().enumerate() {
        if let Err(e) = space.check_set(p) {
            report.other.push(format!("piece {i}: {e}"));
        }
    }
    if !report.other.is_empty() {
        return report;
    }
    for (i, p) in pieces.iter().enumerate() {
        let d = space.diameter(p);
        if d > s {
            report.diameter_violations.push((i, d));
        }
        for (j, q) in pieces.iter().enumerate().skip(i + 1) {
            let d = space.set_distance(p, q);
            if d != SEPARATED && d <= r {
                report.separation_violations.push((i, j, d));
            }
        }
    }
    report
}

/// `μ(Ω) ≥ c`, `diam Ω_i ≤ S`, `d(Ω_i, Ω_j) > R`.
pub fn verify_msp(
    space: &FiniteMetricSpace,
    mu: &ProbMeasure,
    pieces: &[PointSet],
    r: u32,
    s: u32,
    c: f64,
) -> MspReport {
    let mut report = piece_clauses(space, pieces, r, s);
    if report.other.is_empty() {
        report.mass = pieces.iter().map(|p| mu.mass(p)).sum();
        report.mass_ok = report.mass + MEASURE_SLACK >= c;
    }
    report
}

/// Counting variant on a finite `F`: `Ω ⊆ F`, `|Ω| ≥ c|F|`,
/// `diam Ω_i ≤ f_R`, `d(Ω_i, Ω_j) > R`.
pub fn verify_wmsp(
    space: &FiniteMetricSpace,
    f: &PointSet,
    pieces: &[PointSet],
    r: u32,
    f_r: u32,
    c: f64,
) -> MspReport {
    let mut report = piece_clauses(space, pieces, r, f_r);
    if !report.other.is_empty() {
        return report;
    }
    for (i, p) in pieces.iter().enumerate() {
        if !p.is_subset(f) {
            report.other.push(format!("piece {i} is not contained in F"));
        }
    }
    let captured: usize = pieces.iter().map(PointSet::len).sum();
    report.mass = if f.is_empty() { 0.0 } else { captured as f64 / f.len() as f64 };
    report.mass_ok = c <= 1.0 && captured as f64 >= c * f.len() as f64;
    report
}

/// Colour classes `Ω¹ … Ωⁿ⁺¹`, each a list of pieces.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AsdimDecomposition {
    pub classes: Vec<Vec<PointSet>>,
    #[serde(rename = "R")]
    pub r: u32,
    /// `τ(R)`.
    pub tau: u32,
}

impl AsdimDecomposition {
    /// `n` in "asymptotic dimension at most n".
    pub fn dimension(&self) -> usize {
        self.classes.len().saturating_sub(1)
    }

    /// Two-colour cover of the path `0..len` by alternating intervals of
    /// `block` points.
    pub fn alternating_intervals(len: usize, block: usize, r: u32) -> Self {
        let mut classes = vec![Vec::new(), Vec::new()];
        let mut start = 0;
        let mut colour = 0;
        while start < len {
            let end = (start + block).min(len);
            classes[colour].push(PointSet::range(start, end));
            colour ^= 1;
            start = end;
        }
        AsdimDecomposition {
            classes,
            r,
            tau: block.saturating_sub(1) as u32,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FadReport {
    pub uncovered: Vec<usize>,
    /// `(class, piece, diameter)`.
    pub diameter_violations: Vec<(usize, usize, u32)>,
    /// `(class, i, j, distance)`.
    pub separation_violations: Vec<(usize, usize, usize, u32)>,
    pub other: Vec<String>,
}

impl FadReport {
    pub fn valid(&self) -> bool {
        self.uncovered.is_empty()
            && self.diameter_violations.is_empty()
            && self.separation_violations.is_empty()
            && self.other.is_empty()
    }
}

/// Cover, separation `> R` within each class, and diameter `≤ τ(R)`.
pub fn verify_fad(space: &FiniteMetricSpace, cover: &AsdimDecomposition, r: u32) -> FadReport {
    let mut report = FadReport {
        uncovered: Vec::new(),
        diameter_violations: Vec::new(),
        separation_violations: Vec::new(),
        other: Vec::new(),
    };
    let mut covered = vec![false; space.len()];
    for (k, class) in cover.classes.iter().enumerate() {
        for (i, p) in class.iter().enumerate() {
            if let Err(e) = space.check_set(p) {
                report.other.push(format!("class {k} piece {i}: {e}"));
                continue;
            }
            p.iter().for_each(|x| covered[x] = true);
            let d = space.diameter(p);
            if d > cover.tau {
                report.diameter_violations.push((k, i, d));
            }
            for (j, q) in class.iter().enumerate().skip(i + 1) {
                if space.check_set(q).is_err() {
                    continue;
                }
                let d = space.set_distance(p, q);
                if d != SEPARATED && d <= r {
                    report.separation_violations.push((k, i, j, d));
                }
            }
        }
    }
    report.uncovered = (0..space.len()).filter(|&x| !covered[x]).collect();
    report
}

/// The colour class capturing the most of `F`, restricted to `F`; by
/// pigeonhole it captures at least `|F| / (n + 1)`.
pub fn fad_to_wmsp(
    space: &FiniteMetricSpace,
    cover: &AsdimDecomposition,
    f: &PointSet,
) -> Result<SparseDecomposition> {
    let report = verify_fad(space, cover, cover.r);
    if !report.valid() {
        return Err(Error::pre(format!("cover is invalid: {report:?}")));
    }
    space.check_set(f)?;
    if f.is_empty() {
        return Err(Error::input("F is empty"));
    }
    let mut best: Option<(usize, usize)> = None;
    for (k, class) in cover.classes.iter().enumerate() {
        let cap: usize = class.iter().map(|p| p.intersection(f).len()).sum();
        if best.is_none_or(|(b, _)| cap > b) {
            best = Some((cap, k));
        }
    }
    let (captured, k) = best.ok_or_else(|| Error::pre("cover has no classes"))?;
    let classes = cover.classes.len();
    if captured * classes < f.len() {
        return Err(Error::NotAchieved("pigeonhole failed; cover does not cover F".into()));
    }
    let pieces: Vec<PointSet> = cover.classes[k]
        .iter()
        .map(|p| p.intersection(f))
        .filter(|p| !p.is_empty())
        .collect();
    Ok(SparseDecomposition {
        pieces,
        r: cover.r,
        s: cover.tau,
        mass: captured as f64 / f.len() as f64,
        stages: Vec::new(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Graph;

    fn path(n: usize) -> FiniteMetricSpace {
        FiniteMetricSpace::from_graph(&Graph::path(n))
    }

    #[test]
    fn point_mass_is_one_piece() {
        let p = path(20);
        let mu = ProbMeasure::point_mass(20, 7).unwrap();
        let d = greedy_sparsify(&p, &mu, 2, 0.5, 3, SearchOptions::exact()).unwrap();
        assert_eq!(d.pieces, vec![PointSet::singleton(7)]);
        assert_eq!(d.mass, 1.0);
    }

    #[test]
    fn uniform_path_sparsifies() {
        let p = path(100);
        let mu = ProbMeasure::uniform(100).unwrap();
        let d = greedy_sparsify(&p, &mu, 1, 1.0, 30, SearchOptions::heuristic()).unwrap();
        assert!(d.mass >= 0.5);
        assert!(verify_msp(&p, &mu, &d.pieces, 1, 30, 0.5).valid());
        assert!((accounting_total(&d) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn decomposition_selection_and_errors() {
        let p = path(200);
        let mu = ProbMeasure::uniform(200).unwrap();
        let omega = SparseDecomposition {
            pieces: vec![PointSet::range(0, 95), PointSet::range(100, 200)],
            r: 4,
            s: 99,
            mass: 0.975,
            stages: Vec::new(),
        };
        let w = decomposition_to_folner(&p, &mu, &omega, 2, 0.9).unwrap();
        assert_eq!(w.set, PointSet::range(100, 200));
        assert!(w.ratio <= 1.0 / 0.9 - 1.0);

        let close = SparseDecomposition {
            pieces: vec![PointSet::range(0, 98), PointSet::range(100, 200)],
            ..omega
        };
        assert!(matches!(
            decomposition_to_folner(&p, &mu, &close, 2, 0.9),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn msp_strict_separation() {
        let p = path(10);
        let mu = ProbMeasure::uniform(10).unwrap();
        let pieces = vec![PointSet::range(0, 3), PointSet::range(5, 10)];
        assert!(!verify_msp(&p, &mu, &pieces, 3, 10, 0.5).valid());
        assert!(verify_msp(&p, &mu, &pieces, 2, 10, 0.5).valid());
    }

    #[test]
    fn wmsp_edge_cases() {
        let p = path(10);
        let f = PointSet::range(0, 4);
        assert!(verify_wmsp(&p, &f, std::slice::from_ref(&f), 1, 3, 1.0).valid());
        assert!(verify_wmsp(&p, &f, &[PointSet::range(0, 2)], 1, 3, 0.5).valid());
        assert!(!verify_wmsp(&p, &f, std::slice::from_ref(&f), 1, 3, 1.5).valid());
    }

    #[test]
    fn fad_examples() {
        let p = path(100);
        let cover = AsdimDecomposition::alternating_intervals(100, 10, 9);
        assert!(verify_fad(&p, &cover, 9).valid());
        assert!(verify_fad(&p, &cover, 10).valid());
        assert!(!verify_fad(&p, &cover, 11).valid());
        let w = fad_to_wmsp(&p, &cover, &p.all_points()).unwrap();
        assert!(w.union().len() >= 50);

        let one = AsdimDecomposition {
            classes: vec![vec![PointSet::range(0, 3), PointSet::range(5, 8)]],
            r: 2,
            tau: 5,
        };
        let q = path(8);
        assert!(!verify_fad(&q, &one, 2).valid());
        assert_eq!(verify_fad(&q, &one, 1).uncovered, vec![3, 4]);
    }
}
