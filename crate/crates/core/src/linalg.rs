//! Small dense kernels: vector helpers, seeded power iteration, and a dense
//! symmetric eigensolver.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub(crate) fn random_unit(n: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let s = norm(&v);
        if s > 1e-3 {
            return v.into_iter().map(|x| x / s).collect();
        }
    }
}

/// Outcome of a power iteration.
#[derive(Clone, Debug)]
pub(crate) struct PowerResult {
    pub value: f64,
    pub vector: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

/// Largest eigenvalue of a symmetric positive semidefinite operator given by
/// `apply(v, out)`. `project` (if any) is applied after every step, which
/// deflates a known invariant subspace. Runs `restarts` seeded starts and
/// keeps the best Rayleigh quotient.
pub(crate) fn power_psd(
    n: usize,
    apply: &dyn Fn(&[f64], &mut [f64]),
    project: Option<&dyn Fn(&mut [f64])>,
    seed: u64,
    restarts: usize,
    tol: f64,
    max_iter: usize,
) -> PowerResult {
    let mut best = PowerResult {
        value: 0.0,
        vector: vec![0.0; n],
        iterations: 0,
        converged: true,
    };
    if n == 0 {
        return best;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = vec![0.0; n];
    for _ in 0..restarts.max(1) {
        let mut v = random_unit(n, &mut rng);
        if let Some(p) = project {
            p(&mut v);
        }
        let s = norm(&v);
        if s < 1e-300 {
            continue;
        }
        v.iter_mut().for_each(|x| *x /= s);
        let mut value = 0.0;
        let mut converged = false;
        let mut iters = 0;
        for it in 0..max_iter {
            iters = it + 1;
            apply(&v, &mut out);
            if let Some(p) = project {
                p(&mut out);
            }
            let theta = dot(&v, &out);
            let resid = out
                .iter()
                .zip(&v)
                .map(|(o, x)| (o - theta * x).powi(2))
                .sum::<f64>()
                .sqrt();
            value = theta;
            let s = norm(&out);
            if s < 1e-300 {
                value = 0.0;
                converged = true;
                break;
            }
            if resid <= tol * theta.abs().max(1e-300) {
                converged = true;
                break;
            }
            for (x, o) in v.iter_mut().zip(&out) {
                *x = o / s;
            }
        }
        if value > best.value || best.iterations == 0 {
            best = PowerResult {
                value,
                vector: v,
                iterations: iters,
                converged,
            };
        }
    }
    best
}

/// Eigen-decomposition of a symmetric `n × n` row-major matrix. Returns
/// eigenvalues in ascending order and the matching eigenvectors as rows.
pub(crate) fn sym_eigen(a: &[f64], n: usize) -> (Vec<f64>, Vec<Vec<f64>>) {
    let m = nalgebra::DMatrix::from_row_slice(n, n, a);
    let eig = nalgebra::SymmetricEigen::new(m);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = order.iter().map(|&i| eig.eigenvectors.column(i).iter().copied().collect()).collect();
    (values, vectors)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dense_eigen_on_cycle_laplacian() {
        let n = 6;
        let mut a = vec![0.0; n * n];
        for i in 0..n {
            a[i * n + i] = 2.0;
            a[i * n + (i + 1) % n] = -1.0;
            a[i * n + (i + n - 1) % n] = -1.0;
        }
        let (vals, vecs) = sym_eigen(&a, n);
        let mut expect: Vec<f64> = (0..n)
            .map(|k| 2.0 - 2.0 * (2.0 * std::f64::consts::PI * k as f64 / n as f64).cos())
            .collect();
        expect.sort_by(f64::total_cmp);
        for (v, e) in vals.iter().zip(&expect) {
            assert!((v - e).abs() < 1e-12, "{v} vs {e}");
        }
        for (lam, vec) in vals.iter().zip(&vecs) {
            for i in 0..n {
                let av: f64 = (0..n).map(|j| a[i * n + j] * vec[j]).sum();
                assert!((av - lam * vec[i]).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn power_finds_top_of_diagonal() {
        let d = [1.0, 5.0, 3.0];
        let apply = |v: &[f64], out: &mut [f64]| {
            for i in 0..3 {
                out[i] = d[i] * v[i];
            }
        };
        let r = power_psd(3, &apply, None, 7, 3, 1e-10, 100_000);
        assert!((r.value - 5.0).abs() < 1e-9);
        assert!(r.converged);
    }
}
