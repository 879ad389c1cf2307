//! Dense linear-algebra helpers: ordered complex Schur forms, spectral
//! projectors, and exterior-power (compound matrix) machinery.

use std::cmp::Ordering;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
pub const ONE: C64 = C64 { re: 1.0, im: 0.0 };
pub const I: C64 = C64 { re: 0.0, im: 1.0 };

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn to_complex(m: &DMatrix<f64>) -> DMatrix<C64> {
    m.map(|x| C64::new(x, 0.0))
}

pub fn to_complex_vec(v: &DVector<f64>) -> DVector<C64> {
    v.map(|x| C64::new(x, 0.0))
}

/// Complex Schur form `A = Q T Q*` with `T` upper triangular.
#[derive(Debug, Clone)]
pub struct SchurForm {
    pub q: DMatrix<C64>,
    pub t: DMatrix<C64>,
}

impl SchurForm {
    pub fn new(a: &DMatrix<C64>) -> Result<Self> {
        let n = a.nrows();
        if n != a.ncols() {
            return Err(Error::numerical("linalg", "Schur form of a non-square matrix"));
        }
        let scale = a.iter().map(|z| z.norm()).fold(0.0, f64::max).max(1e-300);
        let schur = nalgebra::linalg::Schur::try_new(a.clone(), 1e-15 * scale, 10_000)
            .ok_or_else(|| Error::numerical("linalg", "Schur iteration did not converge"))?;
        let (q, t) = schur.unpack();
        let mut form = SchurForm { q, t };
        form.split_blocks(scale);
        Ok(form)
    }

    pub fn dim(&self) -> usize {
        self.t.nrows()
    }

    pub fn eigenvalues(&self) -> Vec<C64> {
        (0..self.dim()).map(|k| self.t[(k, k)]).collect()
    }

    // The iteration may leave 2x2 bumps on the subdiagonal; rotate each
    // onto one of its eigenvectors.
    fn split_blocks(&mut self, scale: f64) {
        let n = self.dim();
        let mut k = 0;
        while k + 1 < n {
            if self.t[(k + 1, k)].norm() > 1e-14 * scale {
                let a = self.t[(k, k)];
                let b = self.t[(k, k + 1)];
                let cc = self.t[(k + 1, k)];
                let d = self.t[(k + 1, k + 1)];
                let tr = a + d;
                let det = a * d - b * cc;
                let disc = (tr * tr - 4.0 * det).sqrt();
                let mu = (tr + disc) * 0.5;
                // eigenvector of the block for mu
                let (x0, x1) = if (a - mu).norm() + b.norm() >= cc.norm() + (d - mu).norm() {
                    (b, mu - a)
                } else {
                    (mu - d, cc)
                };
                let nrm = (x0.norm_sqr() + x1.norm_sqr()).sqrt();
                if nrm > 0.0 {
                    self.rotate(k, x0 / nrm, x1 / nrm);
                }
                self.t[(k + 1, k)] = ZERO;
            }
            k += 1;
        }
        for i in 0..n {
            for j in 0..i {
                if self.t[(i, j)].norm() <= 1e-13 * scale {
                    self.t[(i, j)] = ZERO;
                }
            }
        }
    }

    /// Apply the unitary `U = [[c, -conj(s)], [s, conj(c)]]` on coordinates
    /// `k, k+1`: `T <- U* T U`, `Q <- Q U`.
    fn rotate(&mut self, k: usize, cs: C64, sn: C64) {
        let n = self.dim();
        for j in 0..n {
            let t0 = self.t[(k, j)];
            let t1 = self.t[(k + 1, j)];
            self.t[(k, j)] = cs.conj() * t0 + sn.conj() * t1;
            self.t[(k + 1, j)] = -sn * t0 + cs * t1;
        }
        for i in 0..n {
            let t0 = self.t[(i, k)];
            let t1 = self.t[(i, k + 1)];
            self.t[(i, k)] = t0 * cs + t1 * sn;
            self.t[(i, k + 1)] = -t0 * sn.conj() + t1 * cs.conj();
            let q0 = self.q[(i, k)];
            let q1 = self.q[(i, k + 1)];
            self.q[(i, k)] = q0 * cs + q1 * sn;
            self.q[(i, k + 1)] = -q0 * sn.conj() + q1 * cs.conj();
        }
    }

    /// Swap diagonal entries `k` and `k+1`.
    fn swap(&mut self, k: usize) {
        let t11 = self.t[(k, k)];
        let t12 = self.t[(k, k + 1)];
        let t22 = self.t[(k + 1, k + 1)];
        let x0 = t12;
        let x1 = t22 - t11;
        let nrm = (x0.norm_sqr() + x1.norm_sqr()).sqrt();
        if nrm == 0.0 {
            return;
        }
        self.rotate(k, x0 / nrm, x1 / nrm);
        self.t[(k + 1, k)] = ZERO;
        self.t[(k, k)] = t22;
        self.t[(k + 1, k + 1)] = t11;
    }

    /// Reorder so that diagonal entries follow `cmp` (stable bubble sort).
    pub fn sort_by(&mut self, mut cmp: impl FnMut(&C64, &C64) -> Ordering) {
        let n = self.dim();
        for pass in 0..n {
            let mut swapped = false;
            for k in 0..n - 1 - pass.min(n - 1) {
                if cmp(&self.t[(k, k)], &self.t[(k + 1, k + 1)]) == Ordering::Greater {
                    self.swap(k);
                    swapped = true;
                }
            }
            if !swapped {
                break;
            }
        }
    }

    /// Move the diagonal positions flagged in `mask` to the top, keeping the
    /// relative order inside both groups. Returns the number selected.
    pub fn select_top(&mut self, mask: &[bool]) -> usize {
        let n = self.dim();
        let mut flags = mask.to_vec();
        for pass in 0..n {
            let mut swapped = false;
            for k in 0..n - 1 - pass.min(n - 1) {
                if !flags[k] && flags[k + 1] {
                    self.swap(k);
                    flags.swap(k, k + 1);
                    swapped = true;
                }
            }
            if !swapped {
                break;
            }
        }
        flags.iter().filter(|&&f| f).count()
    }

    /// Leading `k` Schur vectors.
    pub fn leading(&self, k: usize) -> DMatrix<C64> {
        self.q.columns(0, k).into_owned()
    }

    /// Spectral projector onto the leading `k`-dimensional invariant
    /// subspace along the trailing one.
    pub fn projector(&self, k: usize) -> Result<DMatrix<C64>> {
        let n = self.dim();
        let y = sylvester_upper(
            &self.t.view((0, 0), (k, k)).into_owned(),
            &self.t.view((k, k), (n - k, n - k)).into_owned(),
            &(-self.t.view((0, k), (k, n - k)).into_owned()),
        )?;
        let mut p = DMatrix::<C64>::zeros(n, n);
        for i in 0..k {
            p[(i, i)] = ONE;
            for j in 0..n - k {
                p[(i, k + j)] = -y[(i, j)];
            }
        }
        Ok(&self.q * p * self.q.adjoint())
    }

    /// Right eigenvector (in original coordinates) for diagonal entry `k`.
    pub fn right_eigenvector(&self, k: usize) -> DVector<C64> {
        let n = self.dim();
        let lam = self.t[(k, k)];
        let mut x = DVector::<C64>::zeros(n);
        x[k] = ONE;
        for i in (0..k).rev() {
            let mut s = ZERO;
            for j in i + 1..=k {
                s += self.t[(i, j)] * x[j];
            }
            let mut d = self.t[(i, i)] - lam;
            if d.norm() < 1e-14 {
                d = C64::new(1e-14, 0.0);
            }
            x[i] = -s / d;
        }
        let v = &self.q * x;
        let nrm = v.norm();
        v / C64::new(nrm, 0.0)
    }

    /// Left eigenvector `w` with `w^T A = lambda w^T` (bilinear convention).
    pub fn left_eigenvector(&self, k: usize) -> DVector<C64> {
        let n = self.dim();
        let lam = self.t[(k, k)];
        // y^T T = lam y^T, y_j = 0 for j < k
        let mut y = DVector::<C64>::zeros(n);
        y[k] = ONE;
        for j in k + 1..n {
            let mut s = ZERO;
            for i in k..j {
                s += y[i] * self.t[(i, j)];
            }
            let mut d = lam - self.t[(j, j)];
            if d.norm() < 1e-14 {
                d = C64::new(1e-14, 0.0);
            }
            y[j] = s / d;
        }
        // w^T = y^T Q*  =>  w = conj(Q) y
        let w = self.q.map(|z| z.conj()) * y;
        let nrm = w.norm();
        w / C64::new(nrm, 0.0)
    }
}

/// Solve `A X - X B = C` for upper-triangular `A`, `B`.
pub fn sylvester_upper(
    a: &DMatrix<C64>,
    b: &DMatrix<C64>,
    cm: &DMatrix<C64>,
) -> Result<DMatrix<C64>> {
    let m = a.nrows();
    let n = b.nrows();
    let mut x = DMatrix::<C64>::zeros(m, n);
    for j in 0..n {
        for i in (0..m).rev() {
            let mut rhs = cm[(i, j)];
            for l in i + 1..m {
                rhs -= a[(i, l)] * x[(l, j)];
            }
            for l in 0..j {
                rhs += x[(i, l)] * b[(l, j)];
            }
            let d = a[(i, i)] - b[(j, j)];
            if d.norm() < 1e-13 {
                return Err(Error::numerical(
                    "linalg",
                    "spectral groups collide: projector undefined",
                ));
            }
            x[(i, j)] = rhs / d;
        }
    }
    Ok(x)
}

/// Scale every column to unit length with its first entry of non-negligible
/// modulus made real and positive.
pub fn normalize_phase_columns(m: &mut DMatrix<C64>) {
    for mut col in m.column_iter_mut() {
        let nrm = col.norm();
        if nrm == 0.0 {
            continue;
        }
        let pivot = col
            .iter()
            .find(|z| z.norm() > 1e-8 * nrm)
            .copied()
            .unwrap_or(ONE);
        let phase = pivot / pivot.norm();
        let f = ONE / (phase * nrm);
        for z in col.iter_mut() {
            *z *= f;
        }
    }
}

/// Modified Gram-Schmidt with positive real diagonal in `R`; returns `Q`.
pub fn orthonormalize(m: &DMatrix<C64>) -> DMatrix<C64> {
    let mut q = m.clone();
    for j in 0..q.ncols() {
        for i in 0..j {
            let qi = q.column(i).into_owned();
            let proj = qi.dotc(&q.column(j));
            let mut cj = q.column_mut(j);
            cj -= &qi * proj;
        }
        let nrm = q.column(j).norm();
        let mut cj = q.column_mut(j);
        cj /= C64::new(nrm, 0.0);
    }
    q
}

/// Real orthonormal basis of a conjugation-invariant subspace given by a
/// complex basis.
pub fn realify(m: &DMatrix<C64>) -> DMatrix<C64> {
    let n = m.nrows();
    let k = m.ncols();
    let mut stacked = DMatrix::<f64>::zeros(n, 2 * k);
    for j in 0..k {
        for i in 0..n {
            stacked[(i, j)] = m[(i, j)].re;
            stacked[(i, k + j)] = m[(i, j)].im;
        }
    }
    let svd = stacked.svd(true, false);
    let u = svd.u.expect("left singular vectors requested");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| {
        svd.singular_values[b]
            .partial_cmp(&svd.singular_values[a])
            .unwrap_or(Ordering::Equal)
    });
    let mut out = DMatrix::<C64>::zeros(n, k);
    for (jj, &j) in order.iter().take(k).enumerate() {
        for i in 0..n {
            out[(i, jj)] = C64::new(u[(i, j)], 0.0);
        }
    }
    out
}

/// Largest principal angle sine between the column spans of `a` and `b`
/// (both assumed full rank, same dimension).
pub fn subspace_distance(a: &DMatrix<C64>, b: &DMatrix<C64>) -> f64 {
    let qa = orthonormalize(a);
    let qb = orthonormalize(b);
    let resid = &qb - &qa * (qa.adjoint() * &qb);
    resid.column_iter().map(|c| c.norm()).fold(0.0, f64::max)
}

// ---------------------------------------------------------------------------
// Exterior algebra

/// Lexicographically ordered `k`-subsets of `0..n`.
pub fn index_sets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// Coordinates of `v_1 ^ ... ^ v_k` (columns of `m`) in the lexicographic
/// basis of the k-th exterior power.
pub fn wedge(m: &DMatrix<C64>) -> DVector<C64> {
    let n = m.nrows();
    let k = m.ncols();
    let sets = index_sets(n, k);
    DVector::from_iterator(
        sets.len(),
        sets.iter().map(|rows| {
            let sub = DMatrix::from_fn(k, k, |i, j| m[(rows[i], j)]);
            sub.determinant()
        }),
    )
}

/// Matrix of the derivation induced by `g` on the k-th exterior power:
/// if `V' = G V` column-wise then `(wedge V)' = G^(k) wedge V`.
pub fn compound_matrix(g: &DMatrix<C64>, k: usize) -> DMatrix<C64> {
    let n = g.nrows();
    let sets = index_sets(n, k);
    let dim = sets.len();
    let mut out = DMatrix::<C64>::zeros(dim, dim);
    let lookup = |s: &[usize]| sets.iter().position(|t| t.as_slice() == s);
    for (ii, set_i) in sets.iter().enumerate() {
        out[(ii, ii)] = set_i.iter().map(|&i| g[(i, i)]).sum();
        for (p, &i) in set_i.iter().enumerate() {
            for j in 0..n {
                if set_i.contains(&j) {
                    continue;
                }
                // replace i by j and sort
                let mut set_j: Vec<usize> = set_i.clone();
                set_j[p] = j;
                set_j.sort_unstable();
                let q = set_j.iter().position(|&x| x == j).expect("present");
                let sign = if (p + q) % 2 == 0 { 1.0 } else { -1.0 };
                if let Some(jj) = lookup(&set_j) {
                    out[(ii, jj)] += g[(i, j)] * sign;
                }
            }
        }
    }
    out
}

/// Precomputed sparsity pattern of [`compound_matrix`] for repeated
/// products `G^(k) y` without forming the matrix.
#[derive(Debug, Clone)]
pub struct CompoundStencil {
    pub n: usize,
    pub k: usize,
    pub dim: usize,
    diag: Vec<Vec<usize>>,
    // (row, col, i, j, sign)
    off: Vec<(usize, usize, usize, usize, f64)>,
}

impl CompoundStencil {
    pub fn new(n: usize, k: usize) -> Self {
        let sets = index_sets(n, k);
        let mut off = Vec::new();
        for (ii, set_i) in sets.iter().enumerate() {
            for (p, &i) in set_i.iter().enumerate() {
                for j in 0..n {
                    if set_i.contains(&j) {
                        continue;
                    }
                    let mut set_j: Vec<usize> = set_i.clone();
                    set_j[p] = j;
                    set_j.sort_unstable();
                    let q = set_j.iter().position(|&x| x == j).expect("present");
                    let sign = if (p + q) % 2 == 0 { 1.0 } else { -1.0 };
                    if let Some(jj) = sets.iter().position(|t| *t == set_j) {
                        off.push((ii, jj, i, j, sign));
                    }
                }
            }
        }
        CompoundStencil {
            n,
            k,
            dim: sets.len(),
            diag: sets,
            off,
        }
    }

    /// `out = G^(k) y`.
    pub fn apply(&self, g: &DMatrix<C64>, y: &[C64], out: &mut [C64]) {
        for (ii, set) in self.diag.iter().enumerate() {
            let d: C64 = set.iter().map(|&i| g[(i, i)]).sum();
            out[ii] = d * y[ii];
        }
        for &(ii, jj, i, j, sign) in &self.off {
            out[ii] += g[(i, j)] * y[jj] * sign;
        }
    }
}

/// Sign of the permutation taking `(set, complement)` to `0..n`.
fn shuffle_sign(set: &[usize], n: usize) -> f64 {
    // number of inversions between set entries and complement entries
    let mut inv = 0usize;
    for &s in set {
        inv += (0..s).filter(|x| !set.contains(x)).count();
    }
    let _ = n;
    if inv.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// `det(A | B)` from the exterior coordinates of the column blocks `A`
/// (k columns) and `B` (n-k columns).
pub fn wedge_pairing(a: &DVector<C64>, k: usize, b: &DVector<C64>, n: usize) -> C64 {
    let sets_a = index_sets(n, k);
    let sets_b = index_sets(n, n - k);
    let mut acc = ZERO;
    for (ia, sa) in sets_a.iter().enumerate() {
        let comp: Vec<usize> = (0..n).filter(|x| !sa.contains(x)).collect();
        let ib = sets_b
            .iter()
            .position(|s| *s == comp)
            .expect("complement present");
        acc += a[ia] * b[ib] * shuffle_sign(sa, n);
    }
    acc
}

pub fn det(m: &DMatrix<C64>) -> C64 {
    m.clone().determinant()
}

/// `[A | B]` column concatenation.
pub fn hcat(a: &DMatrix<C64>, b: &DMatrix<C64>) -> DMatrix<C64> {
    let mut out = DMatrix::<C64>::zeros(a.nrows(), a.ncols() + b.ncols());
    out.view_mut((0, 0), (a.nrows(), a.ncols())).copy_from(a);
    out.view_mut((0, a.ncols()), (b.nrows(), b.ncols()))
        .copy_from(b);
    out
}

pub fn hcat_vec(a: &DMatrix<C64>, v: &DVector<C64>) -> DMatrix<C64> {
    let mut out = DMatrix::<C64>::zeros(a.nrows(), a.ncols() + 1);
    out.view_mut((0, 0), (a.nrows(), a.ncols())).copy_from(a);
    out.column_mut(a.ncols()).copy_from(v);
    out
}

/// Bilinear product `sum a_i b_i` (no conjugation).
pub fn bilinear(a: &DVector<C64>, b: &DVector<C64>) -> C64 {
    a.iter().zip(b.iter()).map(|(x, y)| x * y).sum()
}

/// `1 - |<a,b>| / (|a| |b|)`: zero iff the vectors are complex-collinear.
pub fn collinearity_residual(a: &DVector<C64>, b: &DVector<C64>) -> f64 {
    let na = a.norm();
    let nb = b.norm();
    if na == 0.0 || nb == 0.0 {
        return 1.0;
    }
    let cos = a.dotc(b).norm() / (na * nb);
    // sin of the angle is better conditioned than 1 - cos
    (1.0 - cos * cos).max(0.0).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stencil_matches_compound() {
        let g = sample(5, 11);
        for k in 1..5 {
            let st = CompoundStencil::new(5, k);
            let c = compound_matrix(&g, k);
            let y: Vec<C64> = (0..st.dim).map(|i| C64::new(i as f64 * 0.3 - 1.0, 0.1 * i as f64)).collect();
            let mut out = vec![ZERO; st.dim];
            st.apply(&g, &y, &mut out);
            let want = &c * DVector::from_vec(y.clone());
            for i in 0..st.dim {
                assert!((out[i] - want[i]).norm() < 1e-12);
            }
        }
    }

    fn sample(n: usize, seed: u64) -> DMatrix<C64> {
        let mut s = seed;
        DMatrix::from_fn(n, n, |_, _| {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let a = ((s >> 11) as f64 / (1u64 << 53) as f64) - 0.5;
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let b = ((s >> 11) as f64 / (1u64 << 53) as f64) - 0.5;
            C64::new(a, b)
        })
    }

    #[test]
    fn schur_reconstructs_and_is_triangular() {
        for seed in 0..20 {
            let a = sample(5, seed);
            let f = SchurForm::new(&a).unwrap();
            let back = &f.q * &f.t * f.q.adjoint();
            assert!((back - &a).norm() < 1e-12);
            for i in 0..5 {
                for j in 0..i {
                    assert_eq!(f.t[(i, j)], ZERO);
                }
            }
        }
    }

    #[test]
    fn real_matrix_with_complex_pair() {
        let a = DMatrix::from_row_slice(3, 3, &[0.0, -2.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 3.0]);
        let f = SchurForm::new(&to_complex(&a)).unwrap();
        let mut ev = f.eigenvalues();
        ev.sort_by(|a, b| a.im.partial_cmp(&b.im).unwrap());
        assert!((ev[0] - c(0.0, -2f64.sqrt())).norm() < 1e-12);
        assert!((ev[2] - c(0.0, 2f64.sqrt())).norm() < 1e-12);
    }

    #[test]
    fn ordering_preserves_similarity() {
        let a = sample(5, 7);
        let mut f = SchurForm::new(&a).unwrap();
        f.sort_by(|x, y| y.re.partial_cmp(&x.re).unwrap());
        let back = &f.q * &f.t * f.q.adjoint();
        assert!((back - &a).norm() < 1e-12);
        let ev = f.eigenvalues();
        for w in ev.windows(2) {
            assert!(w[0].re >= w[1].re);
        }
        // leading columns span an invariant subspace
        let v = f.leading(2);
        let av = &a * &v;
        let resid = &av - &v * (v.adjoint() * &av);
        assert!(resid.norm() < 1e-12);
    }

    #[test]
    fn projector_is_idempotent_and_commutes() {
        let a = sample(5, 3);
        let mut f = SchurForm::new(&a).unwrap();
        f.sort_by(|x, y| y.re.partial_cmp(&x.re).unwrap());
        let p = f.projector(2).unwrap();
        assert!((&p * &p - &p).norm() < 1e-11);
        assert!((&p * &a - &a * &p).norm() < 1e-11);
        let tr: C64 = (0..5).map(|i| p[(i, i)]).sum();
        assert!((tr - c(2.0, 0.0)).norm() < 1e-11);
    }

    #[test]
    fn eigenvectors_from_schur() {
        let a = sample(4, 11);
        let f = SchurForm::new(&a).unwrap();
        for k in 0..4 {
            let lam = f.t[(k, k)];
            let r = f.right_eigenvector(k);
            assert!((&a * &r - &r * lam).norm() < 1e-10);
            let l = f.left_eigenvector(k);
            assert!((a.transpose() * &l - &l * lam).norm() < 1e-10);
        }
    }

    #[test]
    fn compound_matches_wedge_derivative() {
        let g = sample(5, 5);
        let v = sample(5, 9).columns(0, 3).into_owned();
        let h = 1e-6;
        let plus = wedge(&((DMatrix::identity(5, 5) + &g * C64::new(h, 0.0)) * &v));
        let minus = wedge(&((DMatrix::identity(5, 5) - &g * C64::new(h, 0.0)) * &v));
        let fd = (plus - minus) / C64::new(2.0 * h, 0.0);
        let exact = compound_matrix(&g, 3) * wedge(&v);
        assert!((fd - exact).norm() < 1e-8);
        let v2 = sample(5, 13).columns(0, 2).into_owned();
        let plus = wedge(&((DMatrix::identity(5, 5) + &g * C64::new(h, 0.0)) * &v2));
        let minus = wedge(&((DMatrix::identity(5, 5) - &g * C64::new(h, 0.0)) * &v2));
        let fd = (plus - minus) / C64::new(2.0 * h, 0.0);
        assert!((fd - compound_matrix(&g, 2) * wedge(&v2)).norm() < 1e-8);
    }

    #[test]
    fn pairing_equals_block_determinant() {
        let m = sample(5, 21);
        let a = m.columns(0, 2).into_owned();
        let b = m.columns(2, 3).into_owned();
        let lhs = wedge_pairing(&wedge(&a), 2, &wedge(&b), 5);
        assert!((lhs - det(&m)).norm() < 1e-12);
    }

    #[test]
    fn realify_recovers_real_span() {
        let a = DMatrix::from_row_slice(3, 3, &[0.0, -2.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 3.0]);
        let mut f = SchurForm::new(&to_complex(&a)).unwrap();
        let mask: Vec<bool> = f.eigenvalues().iter().map(|z| z.re.abs() < 1.0).collect();
        let k = f.select_top(&mask);
        assert_eq!(k, 2);
        let r = realify(&f.leading(k));
        assert!(r.iter().all(|z| z.im == 0.0));
        assert!(subspace_distance(&r, &f.leading(k)) < 1e-12);
    }
}
