//! Finite-propagation operators on weighted `ℓ²`, norm estimation, localized
//! norms, the polynomial square-root calculus, and the Laplacian pipeline
//! that turns norm localisation into small-variation functions.
//!
//! Scalars are real. Operators live on a finite support `F ⊆ X` with
//! positive weights `μ`, inner product `⟨φ,ψ⟩ = Σ μ(x) φ(x)·ψ(x)`, and
//! optional `k × k` block entries.

mod chebyshev;
mod localize;
mod onl;

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::linalg;
use crate::space::{FiniteMetricSpace, PointId, PointSet, SEPARATED};

pub use chebyshev::{sqrt_calculus, Chebyshev, SqrtApprox};
pub use localize::{localized_norm, quadratic_localization, LocalizedVector, QuadraticLocalization};
pub use onl::{onl_to_ula, OnlReport};

/// Default relative tolerance for norm estimates.
pub const NORM_TOL: f64 = 1e-8;
/// Iteration cap for power iteration.
pub const MAX_ITER: usize = 100_000;
/// Largest dimension handled by dense eigensolvers.
pub const DENSE_NORM: usize = 512;
const RESTARTS: usize = 3;
const NORM_SEED: u64 = 0x0B5E_55ED;

/// A band-dominated matrix `T_{x,y}` over a finite support, with certified
/// propagation: `T_{x,y} = 0` whenever `d(x,y)` exceeds [`propagation`].
///
/// [`propagation`]: BandOperator::propagation
#[derive(Clone, Debug)]
pub struct BandOperator {
    /// The metric restricted to the support, shared between derived
    /// operators.
    local: Arc<FiniteMetricSpace>,
    points: Arc<Vec<PointId>>,
    weights: Arc<Vec<f64>>,
    block: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    /// `block²` values per stored entry, row-major.
    vals: Vec<f64>,
    propagation: u32,
}

impl BandOperator {
    /// Builds an operator from `(x, y, block)` entries with global point ids.
    /// Repeated entries are summed; exact zeros are dropped.
    pub fn from_entries(
        space: &FiniteMetricSpace,
        support: &PointSet,
        weights: Vec<f64>,
        block: usize,
        entries: impl IntoIterator<Item = (PointId, PointId, Vec<f64>)>,
    ) -> Result<Self> {
        space.check_set(support)?;
        if support.is_empty() {
            return Err(Error::input("operator support is empty"));
        }
        if block == 0 {
            return Err(Error::input("block size must be at least 1"));
        }
        if weights.len() != support.len() {
            return Err(Error::input(format!(
                "{} weights for a support of {} points",
                weights.len(),
                support.len()
            )));
        }
        if weights.iter().any(|w| !(w.is_finite() && *w > 0.0)) {
            return Err(Error::input("operator weights must be positive and finite"));
        }
        let ids = support.as_slice();
        let local_of = |p: PointId| ids.binary_search(&p).map_err(|_| Error::input(format!("entry at {p} outside support")));
        let mut rows: Vec<BTreeMap<usize, Vec<f64>>> = vec![BTreeMap::new(); ids.len()];
        for (x, y, v) in entries {
            if v.len() != block * block {
                return Err(Error::input(format!("entry ({x},{y}) has {} values, expected {}", v.len(), block * block)));
            }
            if v.iter().any(|t| !t.is_finite()) {
                return Err(Error::input(format!("entry ({x},{y}) is not finite")));
            }
            let (i, j) = (local_of(x)?, local_of(y)?);
            let slot = rows[i].entry(j).or_insert_with(|| vec![0.0; block * block]);
            slot.iter_mut().zip(&v).for_each(|(s, t)| *s += t);
        }
        let template = BandOperator {
            local: Arc::new(space.restrict(support)),
            points: Arc::new(ids.to_vec()),
            weights: Arc::new(weights),
            block,
            row_ptr: vec![0; ids.len() + 1],
            cols: Vec::new(),
            vals: Vec::new(),
            propagation: 0,
        };
        template.with_rows(rows.into_iter().map(|r| r.into_iter().collect()).collect())
    }

    /// Scalar operator from `(x, y, value)` entries.
    pub fn scalar(
        space: &FiniteMetricSpace,
        support: &PointSet,
        weights: Vec<f64>,
        entries: impl IntoIterator<Item = (PointId, PointId, f64)>,
    ) -> Result<Self> {
        Self::from_entries(space, support, weights, 1, entries.into_iter().map(|(x, y, v)| (x, y, vec![v])))
    }

    /// Diagonal operator `δ_x ↦ a_x δ_x`.
    pub fn diagonal(space: &FiniteMetricSpace, support: &PointSet, weights: Vec<f64>, values: &[f64]) -> Result<Self> {
        if values.len() != support.len() {
            return Err(Error::input("one diagonal value per support point"));
        }
        Self::scalar(space, support, weights, support.iter().zip(values).map(|(x, &v)| (x, x, v)))
    }

    pub fn identity(space: &FiniteMetricSpace, support: &PointSet, weights: Vec<f64>) -> Result<Self> {
        let ones = vec![1.0; support.len()];
        Self::diagonal(space, support, weights, &ones)
    }

    /// Same support, weights and block size; new rows of local entries.
    fn with_rows(&self, rows: Vec<Vec<(usize, Vec<f64>)>>) -> Result<Self> {
        let mut row_ptr = Vec::with_capacity(rows.len() + 1);
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        let mut propagation = 0;
        row_ptr.push(0);
        for (i, row) in rows.into_iter().enumerate() {
            for (j, v) in row {
                if v.iter().all(|&t| t == 0.0) {
                    continue;
                }
                let d = self.local.d(i, j);
                if d == SEPARATED {
                    return Err(Error::input(format!(
                        "entry between separated points {} and {}",
                        self.points[i], self.points[j]
                    )));
                }
                propagation = propagation.max(d);
                cols.push(j);
                vals.extend_from_slice(&v);
            }
            row_ptr.push(cols.len());
        }
        Ok(BandOperator {
            local: Arc::clone(&self.local),
            points: Arc::clone(&self.points),
            weights: Arc::clone(&self.weights),
            block: self.block,
            row_ptr,
            cols,
            vals,
            propagation,
        })
    }

    /// Number of support points.
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Vector length: points times block size.
    pub fn dim(&self) -> usize {
        self.points.len() * self.block
    }

    pub fn block(&self) -> usize {
        self.block
    }

    /// Global ids of the support, in local order.
    pub fn points(&self) -> &[PointId] {
        &self.points
    }

    pub fn support(&self) -> PointSet {
        PointSet::new(self.points.to_vec())
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// The metric restricted to the support (local ids).
    pub fn local_space(&self) -> &FiniteMetricSpace {
        &self.local
    }

    /// Largest distance between points joined by a nonzero entry.
    pub fn propagation(&self) -> u32 {
        self.propagation
    }

    pub fn nnz(&self) -> usize {
        self.cols.len()
    }

    pub fn is_zero(&self) -> bool {
        self.cols.is_empty()
    }

    /// Stored entries `(local x, local y, block)`.
    pub fn local_entries(&self) -> impl Iterator<Item = (usize, usize, &[f64])> + '_ {
        let kk = self.block * self.block;
        (0..self.len()).flat_map(move |i| {
            (self.row_ptr[i]..self.row_ptr[i + 1]).map(move |e| (i, self.cols[e], &self.vals[e * kk..(e + 1) * kk]))
        })
    }

    /// Stored entries with global ids.
    pub fn entries(&self) -> impl Iterator<Item = (PointId, PointId, &[f64])> + '_ {
        self.local_entries().map(|(i, j, v)| (self.points[i], self.points[j], v))
    }

    /// Block `T_{x,y}` for local ids.
    pub fn get(&self, i: usize, j: usize) -> Option<&[f64]> {
        let kk = self.block * self.block;
        let range = self.row_ptr[i]..self.row_ptr[i + 1];
        let pos = self.cols[range.clone()].binary_search(&j).ok()?;
        let e = range.start + pos;
        Some(&self.vals[e * kk..(e + 1) * kk])
    }

    fn same_space(&self, other: &BandOperator) -> Result<()> {
        let same = (Arc::ptr_eq(&self.points, &other.points) || self.points == other.points)
            && (Arc::ptr_eq(&self.weights, &other.weights) || self.weights == other.weights)
            && self.block == other.block;
        if same {
            Ok(())
        } else {
            Err(Error::input("operators act on different weighted spaces"))
        }
    }

    /// `out = T v` (plain matrix action on local coordinates).
    pub fn apply(&self, v: &[f64], out: &mut [f64]) {
        let k = self.block;
        out.iter_mut().for_each(|o| *o = 0.0);
        for (i, j, b) in self.local_entries() {
            for a in 0..k {
                let mut acc = 0.0;
                for c in 0..k {
                    acc += b[a * k + c] * v[j * k + c];
                }
                out[i * k + a] += acc;
            }
        }
    }

    /// `out = Tᵀ v` (plain transpose, no weights).
    pub fn apply_transpose(&self, v: &[f64], out: &mut [f64]) {
        let k = self.block;
        out.iter_mut().for_each(|o| *o = 0.0);
        for (i, j, b) in self.local_entries() {
            for c in 0..k {
                let mut acc = 0.0;
                for a in 0..k {
                    acc += b[a * k + c] * v[i * k + a];
                }
                out[j * k + c] += acc;
            }
        }
    }

    /// `out = T* v` for the `μ`-weighted inner product: `T* = W⁻¹ Tᵀ W`.
    pub fn apply_adjoint(&self, v: &[f64], out: &mut [f64]) {
        let k = self.block;
        let wv: Vec<f64> = v.iter().enumerate().map(|(i, x)| x * self.weights[i / k]).collect();
        self.apply_transpose(&wv, out);
        out.iter_mut().enumerate().for_each(|(i, o)| *o /= self.weights[i / k]);
    }

    /// `T*` as an operator.
    pub fn adjoint(&self) -> BandOperator {
        let k = self.block;
        let mut rows: Vec<Vec<(usize, Vec<f64>)>> = vec![Vec::new(); self.len()];
        for (i, j, b) in self.local_entries() {
            let s = self.weights[i] / self.weights[j];
            let mut t = vec![0.0; k * k];
            for a in 0..k {
                for c in 0..k {
                    t[c * k + a] = s * b[a * k + c];
                }
            }
            rows[j].push((i, t));
        }
        rows.iter_mut().for_each(|r| r.sort_by_key(|&(j, _)| j));
        self.with_rows(rows).expect("adjoint keeps the sparsity pattern")
    }

    /// `⟨a, b⟩ = Σ μ(x) a(x)·b(x)`.
    pub fn inner(&self, a: &[f64], b: &[f64]) -> f64 {
        let k = self.block;
        a.iter().zip(b).enumerate().map(|(i, (x, y))| self.weights[i / k] * x * y).sum()
    }

    pub fn vector_norm(&self, v: &[f64]) -> f64 {
        self.inner(v, v).sqrt()
    }

    /// `self · other`.
    pub fn compose(&self, other: &BandOperator) -> Result<BandOperator> {
        self.same_space(other)?;
        let k = self.block;
        let kk = k * k;
        let n = self.len();
        let mut acc = vec![0.0; n * kk];
        let mut touched = vec![false; n];
        let mut list = Vec::new();
        let mut rows = Vec::with_capacity(n);
        for i in 0..n {
            for e in self.row_ptr[i]..self.row_ptr[i + 1] {
                let j = self.cols[e];
                let a = &self.vals[e * kk..(e + 1) * kk];
                for f in other.row_ptr[j]..other.row_ptr[j + 1] {
                    let l = other.cols[f];
                    let b = &other.vals[f * kk..(f + 1) * kk];
                    if !touched[l] {
                        touched[l] = true;
                        list.push(l);
                    }
                    let slot = &mut acc[l * kk..(l + 1) * kk];
                    for r in 0..k {
                        for c in 0..k {
                            let mut s = 0.0;
                            for m in 0..k {
                                s += a[r * k + m] * b[m * k + c];
                            }
                            slot[r * k + c] += s;
                        }
                    }
                }
            }
            list.sort_unstable();
            let row = list
                .iter()
                .map(|&l| {
                    touched[l] = false;
                    let v = acc[l * kk..(l + 1) * kk].to_vec();
                    acc[l * kk..(l + 1) * kk].iter_mut().for_each(|t| *t = 0.0);
                    (l, v)
                })
                .collect();
            list.clear();
            rows.push(row);
        }
        self.with_rows(rows)
    }

    /// `α·self + β·other`.
    pub fn combine(&self, alpha: f64, beta: f64, other: &BandOperator) -> Result<BandOperator> {
        self.same_space(other)?;
        let kk = self.block * self.block;
        let mut rows = Vec::with_capacity(self.len());
        for i in 0..self.len() {
            let mut row: BTreeMap<usize, Vec<f64>> = BTreeMap::new();
            for (op, s) in [(self, alpha), (other, beta)] {
                for e in op.row_ptr[i]..op.row_ptr[i + 1] {
                    let slot = row.entry(op.cols[e]).or_insert_with(|| vec![0.0; kk]);
                    slot.iter_mut()
                        .zip(&op.vals[e * kk..(e + 1) * kk])
                        .for_each(|(t, v)| *t += s * v);
                }
            }
            rows.push(row.into_iter().collect());
        }
        self.with_rows(rows)
    }

    pub fn scale(&self, alpha: f64) -> BandOperator {
        let mut out = self.clone();
        out.vals.iter_mut().for_each(|v| *v *= alpha);
        if alpha == 0.0 {
            return self.with_rows(vec![Vec::new(); self.len()]).expect("zero operator");
        }
        out
    }

    /// The identity on the same weighted space.
    pub fn eye(&self) -> BandOperator {
        let k = self.block;
        let mut unit = vec![0.0; k * k];
        (0..k).for_each(|a| unit[a * k + a] = 1.0);
        self.with_rows((0..self.len()).map(|i| vec![(i, unit.clone())]).collect())
            .expect("identity is local")
    }

    /// Dense row-major `dim × dim` matrix.
    pub fn to_dense(&self) -> Vec<f64> {
        let k = self.block;
        let d = self.dim();
        let mut m = vec![0.0; d * d];
        for (i, j, b) in self.local_entries() {
            for a in 0..k {
                for c in 0..k {
                    m[(i * k + a) * d + j * k + c] = b[a * k + c];
                }
            }
        }
        m
    }

    /// Largest entrywise difference `|T − T*|`.
    pub fn asymmetry(&self) -> f64 {
        let adj = self.adjoint();
        match self.combine(1.0, -1.0, &adj) {
            Ok(diff) => diff.vals.iter().fold(0.0f64, |m, v| m.max(v.abs())),
            Err(_) => f64::INFINITY,
        }
    }

    fn sqrt_weights(&self) -> Vec<f64> {
        let k = self.block;
        (0..self.dim()).map(|i| self.weights[i / k].sqrt()).collect()
    }

    /// `U = W^{1/2} T W^{-1/2}`, unitarily equivalent to `T` on unweighted
    /// `ℓ²`.
    fn apply_unweighted(&self, sw: &[f64], v: &[f64], out: &mut [f64]) {
        let scaled: Vec<f64> = v.iter().zip(sw).map(|(x, s)| x / s).collect();
        self.apply(&scaled, out);
        out.iter_mut().zip(sw).for_each(|(o, s)| *o *= s);
    }

    fn apply_unweighted_transpose(&self, sw: &[f64], v: &[f64], out: &mut [f64]) {
        let scaled: Vec<f64> = v.iter().zip(sw).map(|(x, s)| x * s).collect();
        self.apply_transpose(&scaled, out);
        out.iter_mut().zip(sw).for_each(|(o, s)| *o /= s);
    }
}

/// `‖T‖_{B(ℓ²(μ))}`: exact from the dense Gram matrix `U*U` up to
/// [`DENSE_NORM`] dimensions, seeded power iteration on `T*T` above that.
pub fn op_norm(t: &BandOperator, tol: f64) -> f64 {
    if !(tol > 0.0) || t.is_zero() {
        return 0.0;
    }
    let sw = t.sqrt_weights();
    let d = t.dim();
    if d <= DENSE_NORM {
        let u = t.to_dense();
        let mut rows: Vec<Vec<(usize, f64)>> = vec![Vec::new(); d];
        for r in 0..d {
            for c in 0..d {
                let v = u[r * d + c];
                if v != 0.0 {
                    rows[r].push((c, v * sw[r] / sw[c]));
                }
            }
        }
        let mut gram = vec![0.0; d * d];
        for row in &rows {
            for &(i, a) in row {
                for &(j, b) in row {
                    gram[i * d + j] += a * b;
                }
            }
        }
        let top = linalg::sym_eigen(&gram, d).0[d - 1];
        return top.max(0.0).sqrt();
    }
    let apply = |v: &[f64], out: &mut [f64]| {
        let mut mid = vec![0.0; d];
        t.apply_unweighted(&sw, v, &mut mid);
        t.apply_unweighted_transpose(&sw, &mid, out);
    };
    let r = linalg::power_psd(d, &apply, None, NORM_SEED, RESTARTS, tol, MAX_ITER);
    r.value.max(0.0).sqrt()
}

/// Smallest eigenvalue of a self-adjoint operator, exact (Jacobi) up to
/// `dense_cap` dimensions and a power-iteration estimate above that.
pub(crate) fn min_eigenvalue(t: &BandOperator, dense_cap: usize) -> f64 {
    let d = t.dim();
    let sw = t.sqrt_weights();
    if d <= dense_cap {
        let mut m = t.to_dense();
        for i in 0..d {
            for j in 0..d {
                m[i * d + j] *= sw[i] / sw[j];
            }
        }
        for i in 0..d {
            for j in i + 1..d {
                let s = 0.5 * (m[i * d + j] + m[j * d + i]);
                m[i * d + j] = s;
                m[j * d + i] = s;
            }
        }
        return linalg::sym_eigen(&m, d).0[0];
    }
    let top = op_norm(t, NORM_TOL);
    let apply = |v: &[f64], out: &mut [f64]| {
        t.apply_unweighted(&sw, v, out);
        out.iter_mut().zip(v).for_each(|(o, x)| *o = top * x - *o);
    };
    let r = linalg::power_psd(d, &apply, None, NORM_SEED ^ 1, RESTARTS, NORM_TOL, MAX_ITER);
    top - r.value
}

/// `Δ_R` on a finite set with counting weights, its norm and the positive
/// companion `A_R = ‖Δ_R‖·I − Δ_R`.
#[derive(Clone, Debug)]
pub struct Laplacian {
    pub delta: BandOperator,
    pub a: BandOperator,
    pub norm: f64,
    pub r: u32,
    /// Largest ball size at radius `R` in the ambient space.
    pub n_r: usize,
}

/// `Δ_R δ_x = Σ_{y ∈ F, d(x,y) ≤ R} (δ_x − δ_y)`.
pub fn make_laplacian(space: &FiniteMetricSpace, f: &PointSet, r: u32) -> Result<Laplacian> {
    if f.is_empty() {
        return Err(Error::input("F is empty"));
    }
    space.check_set(f)?;
    let ids = f.as_slice();
    let mut entries = Vec::new();
    for &x in ids {
        let row = space.row(x);
        let mut deg = 0.0;
        for &y in ids {
            if y != x && row[y] <= r {
                entries.push((x, y, -1.0));
                deg += 1.0;
            }
        }
        entries.push((x, x, deg));
    }
    let delta = BandOperator::scalar(space, f, vec![1.0; f.len()], entries)?;
    let norm = op_norm(&delta, NORM_TOL);
    let n_r = space.max_ball_size(r);
    if norm > 2.0 * n_r as f64 * (1.0 + NORM_TOL) {
        return Err(Error::NotAchieved(format!("‖Δ_R‖ = {norm} exceeds 2N_R = {}", 2 * n_r)));
    }
    let a = delta.eye().combine(norm, -1.0, &delta)?;
    Ok(Laplacian {
        delta,
        a,
        norm,
        r,
        n_r,
    })
}

/// `(⟨ψ, Δ_R ψ⟩, ½ Σ_{x,y ∈ F, d(x,y) ≤ R} |ψ(x) − ψ(y)|²)` for a local
/// vector `ψ`.
pub fn quadratic_form_identity(lap: &Laplacian, psi: &[f64]) -> (f64, f64) {
    let mut out = vec![0.0; psi.len()];
    lap.delta.apply(psi, &mut out);
    let form = lap.delta.inner(psi, &out);
    let local = lap.delta.local_space();
    let n = lap.delta.len();
    let mut half = 0.0;
    for x in 0..n {
        for y in 0..n {
            if local.d(x, y) <= lap.r {
                half += (psi[x] - psi[y]).powi(2);
            }
        }
    }
    (form, 0.5 * half)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Graph;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn cycle(n: usize) -> FiniteMetricSpace {
        FiniteMetricSpace::from_graph(&Graph::cycle(n))
    }

    #[test]
    fn cycle_laplacian_norms() {
        for (n, expect) in [(3, 3.0), (4, 4.0)] {
            let c = cycle(n);
            let lap = make_laplacian(&c, &c.all_points(), 1).unwrap();
            assert!((lap.norm - expect).abs() < 1e-6, "{}", lap.norm);
            assert!((op_norm(&lap.a, NORM_TOL) - expect).abs() < 1e-6);
            assert!(min_eigenvalue(&lap.a, 100) > -1e-9);
        }
    }

    #[test]
    fn single_point_laplacian_is_zero() {
        let c = cycle(5);
        let lap = make_laplacian(&c, &PointSet::singleton(2), 3).unwrap();
        assert!(lap.delta.is_zero());
        assert_eq!(lap.norm, 0.0);
    }

    #[test]
    fn norms_of_simple_operators() {
        let p = FiniteMetricSpace::from_graph(&Graph::path(6));
        let all = p.all_points();
        let w = vec![0.5, 1.0, 2.0, 0.1, 3.0, 1.0];
        let id = BandOperator::identity(&p, &all, w.clone()).unwrap();
        assert!((op_norm(&id, NORM_TOL) - 1.0).abs() < 1e-12);
        let d = BandOperator::diagonal(&p, &all, vec![1.0; 6], &[0.5, -3.0, 2.0, 0.0, 1.0, 1.0]).unwrap();
        assert!((op_norm(&d, NORM_TOL) - 3.0).abs() < 1e-9);
        assert_eq!(op_norm(&id.scale(0.0), NORM_TOL), 0.0);
    }

    #[test]
    fn iterative_norm_above_dense_cap() {
        let n = DENSE_NORM + 88;
        let p = FiniteMetricSpace::from_graph(&Graph::path(n));
        let values: Vec<f64> = (0..n).map(|i| if i == 17 { -9.0 } else { (i % 5) as f64 }).collect();
        let d = BandOperator::diagonal(&p, &p.all_points(), vec![1.0; n], &values).unwrap();
        assert!((op_norm(&d, NORM_TOL) - 9.0).abs() < 1e-7);
        assert!((min_eigenvalue(&d, 0) + 9.0).abs() < 1e-6);
    }

    #[test]
    fn weighted_adjoint() {
        let p = FiniteMetricSpace::from_graph(&Graph::path(8));
        let all = p.all_points();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let w: Vec<f64> = (0..8).map(|_| rng.gen_range(0.1..2.0)).collect();
        let mut entries = Vec::new();
        for x in 0..8 {
            for y in 0..8 {
                if p.d(x, y) <= 2 {
                    entries.push((x, y, rng.gen_range(-1.0..1.0)));
                }
            }
        }
        let t = BandOperator::scalar(&p, &all, w, entries).unwrap();
        assert!(t.propagation() <= 2);
        let adj = t.adjoint();
        for _ in 0..20 {
            let a: Vec<f64> = (0..8).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let b: Vec<f64> = (0..8).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let (mut ta, mut sb, mut sb2) = (vec![0.0; 8], vec![0.0; 8], vec![0.0; 8]);
            t.apply(&a, &mut ta);
            t.apply_adjoint(&b, &mut sb);
            adj.apply(&b, &mut sb2);
            assert!((t.inner(&ta, &b) - t.inner(&a, &sb)).abs() < 1e-10);
            assert!(sb.iter().zip(&sb2).all(|(x, y)| (x - y).abs() < 1e-12));
        }
    }

    #[test]
    fn block_operators() {
        let p = FiniteMetricSpace::from_graph(&Graph::path(3));
        let all = p.all_points();
        let rot = vec![0.0, -1.0, 1.0, 0.0];
        let t = BandOperator::from_entries(&p, &all, vec![1.0; 3], 2, vec![(0, 1, rot.clone()), (1, 2, rot)]).unwrap();
        assert_eq!(t.dim(), 6);
        assert!((op_norm(&t, NORM_TOL) - 1.0).abs() < 1e-9);
        let sq = t.compose(&t).unwrap();
        assert_eq!(sq.propagation(), 2);
        assert_eq!(sq.get(0, 2).unwrap(), &[-1.0, 0.0, 0.0, -1.0]);
    }

    #[test]
    fn separated_entries_are_rejected() {
        let s = FiniteMetricSpace::from_graph(&Graph::from_edges(4, &[(0, 1), (2, 3)]).unwrap());
        assert!(BandOperator::scalar(&s, &s.all_points(), vec![1.0; 4], vec![(0, 2, 1.0)]).is_err());
    }
}
