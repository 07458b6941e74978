//! Dense symmetric matrices and their spectra.
//!
//! Eigenvalues of large matrices come from a Householder reduction to
//! tridiagonal form followed by implicit QL with Wilkinson shifts. Small
//! matrices that also need eigenvectors go through cyclic Jacobi.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinalgError {
    #[error("matrix is not symmetric: |a[{row}][{col}] - a[{col}][{row}]| = {gap:e}")]
    Asymmetric { row: usize, col: usize, gap: f64 },
    #[error("QL iteration did not converge for eigenvalue {index}")]
    NoConvergence { index: usize },
}

/// Tolerance for [`symmetric_eigenvalues`]' symmetry check.
pub const SYMMETRY_TOLERANCE: f64 = 1e-12;

/// Square row-major matrix of `f64`.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix {
    n: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(n: usize) -> Self {
        Matrix {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    /// Builds a matrix from rows; panics if the rows are not all of length `rows.len()`.
    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for row in rows {
            assert_eq!(row.len(), n, "matrix rows must be square");
            data.extend_from_slice(row);
        }
        Matrix { n, data }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        self.data[i * self.n + j] = value;
    }

    pub fn add(&mut self, i: usize, j: usize, value: f64) {
        self.data[i * self.n + j] += value;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.n);
        (0..self.n)
            .map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// Maximum absolute row sum.
    pub fn inf_norm(&self) -> f64 {
        (0..self.n)
            .map(|i| self.row(i).iter().map(|x| x.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// First entry pair violating symmetry by more than `tol`, if any.
    pub fn asymmetry(&self, tol: f64) -> Option<(usize, usize, f64)> {
        for i in 0..self.n {
            for j in 0..i {
                let gap = (self.get(i, j) - self.get(j, i)).abs();
                if gap > tol {
                    return Some((i, j, gap));
                }
            }
        }
        None
    }
}

/// All eigenvalues of a symmetric matrix, in ascending order.
pub fn symmetric_eigenvalues(a: &Matrix) -> Result<Vec<f64>, LinalgError> {
    if let Some((row, col, gap)) = a.asymmetry(SYMMETRY_TOLERANCE) {
        return Err(LinalgError::Asymmetric { row, col, gap });
    }
    let n = a.dim();
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut work = a.data.clone();
    let (mut diag, mut off) = tridiagonalize(&mut work, n);
    tridiagonal_ql(&mut diag, &mut off)?;
    diag.sort_by(|x, y| x.total_cmp(y));
    Ok(diag)
}

/// Reduces the symmetric matrix in `a` (row-major, only the lower triangle
/// is read) to tridiagonal form. Returns the diagonal and the subdiagonal,
/// the latter padded with a trailing zero to length `n`.
///
/// Each reflection's rank-two update is applied row by row in the same
/// sweep that computes the next reflection's matrix-vector product, so
/// the trailing submatrix is streamed once per step.
fn tridiagonalize(a: &mut [f64], n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut diag = vec![0.0; n];
    let mut off = vec![0.0; n];
    // (v, w) of the previous step, indexed from row k of the current step.
    let mut pending: Option<(Vec<f64>, Vec<f64>)> = None;

    for k in 0..n {
        if let Some((v, w)) = &pending {
            for r in k..n {
                a[r * n + k] -= v[r - k] * w[0] + w[r - k] * v[0];
            }
        }
        diag[k] = a[k * n + k];
        let m = n - k - 1;
        if m == 0 {
            break;
        }

        let x: Vec<f64> = (k + 1..n).map(|r| a[r * n + k]).collect();
        let tail: f64 = x[1..].iter().map(|t| t * t).sum();
        let reflector = if tail == 0.0 {
            off[k] = x[0];
            None
        } else {
            let norm = (x[0] * x[0] + tail).sqrt();
            let alpha = if x[0] > 0.0 { -norm } else { norm };
            let mut v = x;
            v[0] -= alpha;
            let vnorm = (v[0] * v[0] + tail).sqrt();
            v.iter_mut().for_each(|t| *t /= vnorm);
            off[k] = alpha;
            Some(v)
        };

        let mut p = vec![0.0; m];
        for i in 0..m {
            let r = k + 1 + i;
            let row = &mut a[r * n + k + 1..r * n + r + 1];
            if let Some((pv, pw)) = &pending {
                // previous step's vectors are offset by one relative to this submatrix
                let (vi, wi) = (pv[i + 1], pw[i + 1]);
                for ((entry, &wj), &vj) in row.iter_mut().zip(&pw[1..]).zip(&pv[1..]) {
                    *entry -= vi * wj + wi * vj;
                }
            }
            if let Some(v) = &reflector {
                let vi = v[i];
                let (below, d) = row.split_at(i);
                p[i] += d[0] * vi + symmetric_row_product(below, &v[..i], &mut p[..i], vi);
            }
        }

        pending = reflector.map(|v| {
            let k_dot: f64 = v.iter().zip(&p).map(|(a, b)| a * b).sum();
            let w = p
                .iter()
                .zip(&v)
                .map(|(pi, vi)| 2.0 * pi - 2.0 * k_dot * vi)
                .collect();
            (v, w)
        });
    }
    (diag, off)
}

/// Returns `row . v` and adds `scale * row` into `acc`, with four independent
/// partial sums so the loop vectorizes.
fn symmetric_row_product(row: &[f64], v: &[f64], acc: &mut [f64], scale: f64) -> f64 {
    let mut sums = [0.0; 4];
    let mut row_chunks = row.chunks_exact(4);
    let mut v_chunks = v.chunks_exact(4);
    let mut acc_chunks = acc.chunks_exact_mut(4);
    for ((r, x), a) in (&mut row_chunks).zip(&mut v_chunks).zip(&mut acc_chunks) {
        for t in 0..4 {
            sums[t] += r[t] * x[t];
            a[t] += r[t] * scale;
        }
    }
    let mut total = (sums[0] + sums[1]) + (sums[2] + sums[3]);
    for ((r, x), a) in row_chunks
        .remainder()
        .iter()
        .zip(v_chunks.remainder())
        .zip(acc_chunks.into_remainder())
    {
        total += r * x;
        *a += r * scale;
    }
    total
}

/// Implicit QL with Wilkinson shifts on a symmetric tridiagonal matrix.
/// `off[i]` couples `i` and `i + 1`; `off[n - 1]` must be zero. On return
/// `diag` holds the (unsorted) eigenvalues.
fn tridiagonal_ql(diag: &mut [f64], off: &mut [f64]) -> Result<(), LinalgError> {
    let n = diag.len();
    for l in 0..n {
        let mut iterations = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = diag[m].abs() + diag[m + 1].abs();
                if off[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iterations += 1;
            if iterations > 60 {
                return Err(LinalgError::NoConvergence { index: l });
            }
            let mut g = (diag[l + 1] - diag[l]) / (2.0 * off[l]);
            let mut r = g.hypot(1.0);
            g = diag[m] - diag[l] + off[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut deflated = false;
            for i in (l..m).rev() {
                let f = s * off[i];
                let b = c * off[i];
                r = f.hypot(g);
                off[i + 1] = r;
                if r == 0.0 {
                    diag[i + 1] -= p;
                    off[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = diag[i + 1] - p;
                r = (diag[i] - g) * s + 2.0 * c * b;
                p = s * r;
                diag[i + 1] = g + p;
                g = c * r - b;
            }
            if deflated {
                continue;
            }
            diag[l] -= p;
            off[l] = g;
            off[m] = 0.0;
        }
    }
    Ok(())
}

/// Eigenpairs of a small symmetric matrix by cyclic Jacobi rotations.
///
/// Returns ascending eigenvalues and a matrix whose column `i` is a unit
/// eigenvector for eigenvalue `i`.
pub fn symmetric_eigen(a: &Matrix) -> Result<(Vec<f64>, Matrix), LinalgError> {
    if let Some((row, col, gap)) = a.asymmetry(SYMMETRY_TOLERANCE) {
        return Err(LinalgError::Asymmetric { row, col, gap });
    }
    let n = a.dim();
    let mut m = a.clone();
    let mut vecs = Matrix::identity(n);
    let scale = a.inf_norm().max(1.0);
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| m.get(i, j).powi(2))
            .sum();
        if off.sqrt() <= 1e-15 * scale {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = m.get(p, q);
                if apq == 0.0 {
                    continue;
                }
                let theta = (m.get(q, q) - m.get(p, p)) / (2.0 * apq);
                let sign = if theta >= 0.0 { 1.0 } else { -1.0 };
                let t = sign / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let mkp = m.get(k, p);
                    let mkq = m.get(k, q);
                    m.set(k, p, c * mkp - s * mkq);
                    m.set(k, q, s * mkp + c * mkq);
                }
                for k in 0..n {
                    let mpk = m.get(p, k);
                    let mqk = m.get(q, k);
                    m.set(p, k, c * mpk - s * mqk);
                    m.set(q, k, s * mpk + c * mqk);
                }
                for k in 0..n {
                    let vkp = vecs.get(k, p);
                    let vkq = vecs.get(k, q);
                    vecs.set(k, p, c * vkp - s * vkq);
                    vecs.set(k, q, s * vkp + c * vkq);
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m.get(i, i).total_cmp(&m.get(j, j)));
    let values = order.iter().map(|&i| m.get(i, i)).collect();
    let mut sorted = Matrix::zeros(n);
    for (col, &src) in order.iter().enumerate() {
        for k in 0..n {
            sorted.set(k, col, vecs.get(k, src));
        }
    }
    Ok((values, sorted))
}

/// Multiset inclusion of `sub` in `sup` within `tol`, matching each value of
/// `sub` (ascending) to its nearest unmatched value of `sup`.
///
/// Returns the indices of `sup` left unmatched, or the first value of `sub`
/// that found no partner.
pub fn match_spectrum(sup: &[f64], sub: &[f64], tol: f64) -> Result<Vec<usize>, f64> {
    let mut sup_order: Vec<usize> = (0..sup.len()).collect();
    sup_order.sort_by(|&i, &j| sup[i].total_cmp(&sup[j]));
    let mut sub_sorted = sub.to_vec();
    sub_sorted.sort_by(|x, y| x.total_cmp(y));
    let mut used = vec![false; sup.len()];
    for &target in &sub_sorted {
        // sorted order lets the search start at the insertion point
        let start = sup_order.partition_point(|&i| sup[i] < target);
        let mut best: Option<(usize, f64)> = None;
        let mut left = start;
        while left > 0 {
            left -= 1;
            let idx = sup_order[left];
            let gap = target - sup[idx];
            if gap > tol || best.is_some_and(|(_, g)| gap >= g) {
                break;
            }
            if !used[left] {
                best = Some((left, gap));
                break;
            }
        }
        let mut right = start;
        while right < sup_order.len() {
            let idx = sup_order[right];
            let gap = sup[idx] - target;
            if gap > tol || best.is_some_and(|(_, g)| gap >= g) {
                break;
            }
            if !used[right] {
                best = Some((right, gap));
                break;
            }
            right += 1;
        }
        match best {
            Some((pos, _)) => used[pos] = true,
            None => return Err(target),
        }
    }
    Ok(sup_order
        .iter()
        .enumerate()
        .filter(|(pos, _)| !used[*pos])
        .map(|(_, &i)| i)
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Number of eigenvalues of `a` strictly below `x`, by Sylvester's law of
    /// inertia on an LDL^T factorization of `a - x I`.
    fn count_below(a: &Matrix, x: f64) -> usize {
        let n = a.dim();
        let mut m: Vec<Vec<f64>> = (0..n).map(|i| a.row(i).to_vec()).collect();
        for (i, row) in m.iter_mut().enumerate() {
            row[i] -= x;
        }
        let mut negatives = 0;
        for k in 0..n {
            let mut pivot = m[k][k];
            if pivot.abs() < 1e-300 {
                pivot = 1e-300;
            }
            if pivot < 0.0 {
                negatives += 1;
            }
            for i in k + 1..n {
                let factor = m[i][k] / pivot;
                for j in k + 1..n {
                    m[i][j] -= factor * m[k][j];
                }
            }
        }
        negatives
    }

    /// Independent oracle: the `index`-th smallest eigenvalue by bisection on
    /// inertia counts.
    fn bisect_eigenvalue(a: &Matrix, index: usize) -> f64 {
        let bound = a.inf_norm() + 1.0;
        let (mut lo, mut hi) = (-bound, bound);
        while hi - lo > 1e-12 {
            let mid = 0.5 * (lo + hi);
            if count_below(a, mid) > index {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }

    fn lcg_matrix(n: usize, seed: u64) -> Matrix {
        let mut state = seed;
        let mut next = || {
            state = state
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            ((state >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
        };
        let mut m = Matrix::zeros(n);
        for i in 0..n {
            for j in 0..=i {
                let v = next();
                m.set(i, j, v);
                m.set(j, i, v);
            }
        }
        m
    }

    #[test]
    fn swap_matrix() {
        let a = Matrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]);
        let ev = symmetric_eigenvalues(&a).unwrap();
        assert!((ev[0] + 1.0).abs() < 1e-12 && (ev[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn four_cycle() {
        let mut a = Matrix::zeros(4);
        for i in 0..4 {
            a.set(i, (i + 1) % 4, 1.0);
            a.set((i + 1) % 4, i, 1.0);
        }
        let ev = symmetric_eigenvalues(&a).unwrap();
        for (got, want) in ev.iter().zip([-2.0, 0.0, 0.0, 2.0]) {
            assert!((got - want).abs() < 1e-10, "{ev:?}");
        }
    }

    #[test]
    fn random_50_matches_inertia_bisection() {
        let a = lcg_matrix(50, 7);
        let ev = symmetric_eigenvalues(&a).unwrap();
        for (i, got) in ev.iter().enumerate() {
            let want = bisect_eigenvalue(&a, i);
            assert!((got - want).abs() < 1e-6, "eigenvalue {i}: {got} vs {want}");
        }
    }

    #[test]
    fn jacobi_agrees_and_vectors_are_eigenvectors() {
        let a = lcg_matrix(12, 3);
        let ql = symmetric_eigenvalues(&a).unwrap();
        let (vals, vecs) = symmetric_eigen(&a).unwrap();
        for i in 0..12 {
            assert!((ql[i] - vals[i]).abs() < 1e-10);
            let f: Vec<f64> = (0..12).map(|k| vecs.get(k, i)).collect();
            let af = a.mul_vec(&f);
            for k in 0..12 {
                assert!((af[k] - vals[i] * f[k]).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn rejects_asymmetric() {
        let a = Matrix::from_rows(&[vec![0.0, 1.0], vec![0.5, 0.0]]);
        assert!(matches!(
            symmetric_eigenvalues(&a),
            Err(LinalgError::Asymmetric { .. })
        ));
    }

    #[test]
    fn already_diagonal_and_tiny() {
        assert!(symmetric_eigenvalues(&Matrix::zeros(0)).unwrap().is_empty());
        let a = Matrix::from_rows(&[
            vec![3.0, 0.0, 0.0],
            vec![0.0, -1.0, 0.0],
            vec![0.0, 0.0, 2.0],
        ]);
        assert_eq!(symmetric_eigenvalues(&a).unwrap(), vec![-1.0, 2.0, 3.0]);
    }

    #[test]
    fn spectrum_matching() {
        let sup = [3.0, -1.0, 1.0, 1.0, 0.0];
        assert_eq!(
            match_spectrum(&sup, &[1.0, 3.0 + 1e-9], 1e-6),
            Ok(vec![1, 4, 3])
        );
        assert_eq!(match_spectrum(&sup, &[1.0, 1.0, 1.0], 1e-6), Err(1.0));
    }
}
