//! Dense symmetric eigensolver.
//!
//! Householder reduction to tridiagonal form, implicit-shift QL for the full
//! spectrum, then inverse iteration on the tridiagonal matrix for the few
//! leading eigenvectors, which are mapped back through the stored
//! reflectors. Every step is a fixed sequence of floating-point operations,
//! so identical input yields bit-identical output.

use alloc::vec;
use alloc::vec::Vec;
use libm::{fabs, hypot, sqrt};

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
pub enum EigenError {
    #[error("matrix storage has {len} elements, expected {n}x{n}")]
    Shape { len: usize, n: usize },
    #[error("QL iteration did not converge for eigenvalue {index}")]
    NoConvergence { index: usize },
    #[error("matrix contains non-finite values")]
    NonFinite,
}

/// Leading part of a symmetric eigendecomposition.
#[derive(Debug, Clone, PartialEq)]
pub struct TopEigen {
    /// Every eigenvalue, descending.
    pub values: Vec<f64>,
    /// Unit eigenvectors for `values[0..vectors.len()]`.
    pub vectors: Vec<Vec<f64>>,
}

struct Tridiagonal {
    diag: Vec<f64>,
    /// `sub[i] = T[i + 1][i]`; `sub[n - 1] = 0`.
    sub: Vec<f64>,
    /// Unit Householder vectors; reflector `k` acts on indices `k + 1..n`.
    reflectors: Vec<Vec<f64>>,
}

fn tridiagonalize(mut m: Vec<f64>, n: usize) -> Tridiagonal {
    let mut sub = vec![0.0; n];
    let mut reflectors = Vec::with_capacity(n.saturating_sub(2));
    let mut p = vec![0.0; n];
    for k in 0..n.saturating_sub(2) {
        let len = n - k - 1;
        let mut v: Vec<f64> = (0..len).map(|i| m[(k + 1 + i) * n + k]).collect();
        let norm = sqrt(v.iter().map(|x| x * x).sum());
        if norm == 0.0 {
            reflectors.push(Vec::new());
            continue;
        }
        let alpha = if v[0] > 0.0 { -norm } else { norm };
        v[0] -= alpha;
        let vnorm = sqrt(v.iter().map(|x| x * x).sum());
        v.iter_mut().for_each(|x| *x /= vnorm);
        sub[k] = alpha;
        for i in 0..len {
            m[(k + 1 + i) * n + k] = if i == 0 { alpha } else { 0.0 };
            m[k * n + k + 1 + i] = m[(k + 1 + i) * n + k];
        }

        // S <- H S H with H = I - 2vv^T, as S - 2(v q^T + q v^T), q = Sv - (v^T S v) v
        let base = (k + 1) * n + (k + 1);
        let p = &mut p[..len];
        for (i, pi) in p.iter_mut().enumerate() {
            let row = &m[base + i * n..base + i * n + len];
            *pi = row.iter().zip(&v).map(|(a, b)| a * b).sum();
        }
        let gamma: f64 = p.iter().zip(&v).map(|(a, b)| a * b).sum();
        p.iter_mut().zip(&v).for_each(|(pi, vi)| *pi -= gamma * vi);
        for i in 0..len {
            let (vi, qi) = (v[i], p[i]);
            let row = &mut m[base + i * n..base + i * n + len];
            for ((s, &vj), &qj) in row.iter_mut().zip(v.iter()).zip(p.iter()) {
                *s -= 2.0 * (vi * qj + qi * vj);
            }
        }
        reflectors.push(v);
    }
    if n >= 2 {
        sub[n - 2] = m[(n - 1) * n + (n - 2)];
    }
    let diag = (0..n).map(|i| m[i * n + i]).collect();
    Tridiagonal { diag, sub, reflectors }
}

/// Eigenvalues of a symmetric tridiagonal matrix by implicit QL, unsorted.
fn tridiagonal_eigenvalues(diag: &[f64], sub: &[f64]) -> Result<Vec<f64>, EigenError> {
    let n = diag.len();
    let mut d = diag.to_vec();
    let mut e = sub.to_vec();
    let norm = (0..n).map(|i| fabs(d[i]) + fabs(e[i])).fold(0.0, f64::max);
    let floor = f64::EPSILON * norm;
    for l in 0..n {
        let mut iterations = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = fabs(d[m]) + fabs(d[m + 1]);
                if fabs(e[m]) <= f64::EPSILON * dd || fabs(e[m]) <= floor {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iterations += 1;
            if iterations > 60 {
                return Err(EigenError::NoConvergence { index: l });
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = hypot(g, 1.0);
            g = d[m] - d[l] + e[l] / (g + if g >= 0.0 { r } else { -r });
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut deflated = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = hypot(f, g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(d)
}

/// LU factorization with partial pivoting of `T - shift*I` for tridiagonal
/// `T`, used for repeated solves during inverse iteration.
struct ShiftedFactor {
    /// Rows of U: diagonal, first and second superdiagonal.
    u0: Vec<f64>,
    u1: Vec<f64>,
    u2: Vec<f64>,
    mult: Vec<f64>,
    swapped: Vec<bool>,
}

impl ShiftedFactor {
    fn new(diag: &[f64], sub: &[f64], shift: f64, tiny: f64) -> Self {
        let n = diag.len();
        let mut f = ShiftedFactor {
            u0: vec![0.0; n],
            u1: vec![0.0; n],
            u2: vec![0.0; n],
            mult: vec![0.0; n],
            swapped: vec![false; n],
        };
        let mut piv = diag[0] - shift;
        let mut sup = if n > 1 { sub[0] } else { 0.0 };
        for i in 0..n.saturating_sub(1) {
            let below = sub[i];
            let next_diag = diag[i + 1] - shift;
            let next_sup = if i + 2 < n { sub[i + 1] } else { 0.0 };
            if fabs(piv) >= fabs(below) {
                let l = if piv == 0.0 { 0.0 } else { below / piv };
                f.u0[i] = piv;
                f.u1[i] = sup;
                f.mult[i] = l;
                piv = next_diag - l * sup;
                sup = next_sup;
            } else {
                let l = piv / below;
                f.u0[i] = below;
                f.u1[i] = next_diag;
                f.u2[i] = next_sup;
                f.mult[i] = l;
                f.swapped[i] = true;
                piv = sup - l * next_diag;
                sup = -l * next_sup;
            }
        }
        f.u0[n - 1] = piv;
        for u in f.u0.iter_mut() {
            if fabs(*u) < tiny {
                *u = if *u < 0.0 { -tiny } else { tiny };
            }
        }
        f
    }

    fn solve(&self, rhs: &mut [f64]) {
        let n = rhs.len();
        for i in 0..n.saturating_sub(1) {
            if self.swapped[i] {
                rhs.swap(i, i + 1);
            }
            rhs[i + 1] -= self.mult[i] * rhs[i];
        }
        for i in (0..n).rev() {
            let mut acc = rhs[i];
            if i + 1 < n {
                acc -= self.u1[i] * rhs[i + 1];
            }
            if i + 2 < n {
                acc -= self.u2[i] * rhs[i + 2];
            }
            rhs[i] = acc / self.u0[i];
        }
    }
}

fn normalize(v: &mut [f64]) -> bool {
    let norm = sqrt(v.iter().map(|x| x * x).sum());
    if norm <= 0.0 || !norm.is_finite() {
        return false;
    }
    v.iter_mut().for_each(|x| *x /= norm);
    true
}

/// Deterministic start vector for inverse iteration (xorshift sequence).
fn start_vector(n: usize, salt: u64) -> Vec<f64> {
    let mut state = 0x9E37_79B9_7F4A_7C15u64 ^ salt.wrapping_mul(0xD1B5_4A32_D192_ED03);
    (0..n)
        .map(|_| {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            0.5 + (state >> 11) as f64 / (1u64 << 53) as f64
        })
        .collect()
}

/// Computes every eigenvalue of the symmetric `n x n` row-major matrix `a`
/// (descending) and unit eigenvectors for the `k` largest.
///
/// Only the lower triangle of `a` is trusted to be the symmetric reference;
/// callers should pass exactly symmetric input.
pub fn symmetric_top_eigen(a: &[f64], n: usize, k: usize) -> Result<TopEigen, EigenError> {
    if a.len() != n * n {
        return Err(EigenError::Shape { len: a.len(), n });
    }
    if a.iter().any(|x| !x.is_finite()) {
        return Err(EigenError::NonFinite);
    }
    if n == 0 {
        return Ok(TopEigen { values: Vec::new(), vectors: Vec::new() });
    }
    let k = k.min(n);
    let tri = tridiagonalize(a.to_vec(), n);
    let mut values = tridiagonal_eigenvalues(&tri.diag, &tri.sub)?;
    values.sort_by(|x, y| y.total_cmp(x));

    let scale = tri
        .diag
        .iter()
        .zip(&tri.sub)
        .map(|(d, e)| fabs(*d) + 2.0 * fabs(*e))
        .fold(0.0, f64::max);
    let tiny = if scale > 0.0 { f64::EPSILON * scale } else { f64::MIN_POSITIVE };

    let mut tri_vectors: Vec<Vec<f64>> = Vec::with_capacity(k);
    for (j, &lambda) in values.iter().take(k).enumerate() {
        let factor = ShiftedFactor::new(&tri.diag, &tri.sub, lambda, tiny);
        let mut z = start_vector(n, j as u64);
        normalize(&mut z);
        for _ in 0..5 {
            factor.solve(&mut z);
            // Gram-Schmidt against earlier vectors separates clustered eigenvalues.
            for prev in &tri_vectors {
                let dot: f64 = z.iter().zip(prev).map(|(a, b)| a * b).sum();
                z.iter_mut().zip(prev).for_each(|(x, p)| *x -= dot * p);
            }
            if !normalize(&mut z) {
                z = start_vector(n, j as u64 + 0x1000);
                normalize(&mut z);
            }
        }
        tri_vectors.push(z);
    }

    let vectors = tri_vectors
        .into_iter()
        .map(|mut y| {
            for (k, v) in tri.reflectors.iter().enumerate().rev() {
                if v.is_empty() {
                    continue;
                }
                let seg = &mut y[k + 1..];
                let dot: f64 = seg.iter().zip(v).map(|(a, b)| a * b).sum();
                seg.iter_mut().zip(v).for_each(|(x, vi)| *x -= 2.0 * dot * vi);
            }
            y
        })
        .collect();
    Ok(TopEigen { values, vectors })
}
