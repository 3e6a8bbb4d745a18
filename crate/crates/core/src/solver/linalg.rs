//! Small dense complex linear algebra used by the Newton iterations.

use num_complex::Complex;
use num_traits::Zero;

use crate::extprec::{cabs, Real};

pub(crate) type Cx<T> = Complex<T>;

pub(crate) fn cnorm_inf<T: Real>(v: &[Cx<T>]) -> f64 {
    v.iter().map(|z| cabs(z).to_f64()).fold(0.0, f64::max)
}

/// Gaussian elimination with partial pivoting. `None` when a pivot falls below
/// `rel_tol` times the largest entry.
pub(crate) fn solve<T: Real>(mut a: Vec<Vec<Cx<T>>>, mut b: Vec<Cx<T>>, rel_tol: f64) -> Option<Vec<Cx<T>>> {
    let n = b.len();
    let scale = a.iter().flat_map(|r| r.iter()).map(|z| cabs(z).to_f64()).fold(0.0, f64::max);
    if scale == 0.0 || !scale.is_finite() {
        return None;
    }
    for col in 0..n {
        let (piv, mag) = (col..n)
            .map(|r| (r, cabs(&a[r][col]).to_f64()))
            .fold((col, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
        if mag <= rel_tol * scale {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        let inv = Cx::new(a[col][col].re.clone(), a[col][col].im.clone());
        let pivot_row = a[col].clone();
        for r in col + 1..n {
            if a[r][col].is_zero() {
                continue;
            }
            let f = a[r][col].clone() / inv.clone();
            for (dst, p) in a[r][col..].iter_mut().zip(&pivot_row[col..]) {
                *dst = dst.clone() - f.clone() * p.clone();
            }
            let sub = f * b[col].clone();
            b[r] = b[r].clone() - sub;
        }
    }
    let mut x = vec![Cx::zero(); n];
    for r in (0..n).rev() {
        let mut acc = b[r].clone();
        for c in r + 1..n {
            acc = acc - a[r][c].clone() * x[c].clone();
        }
        x[r] = acc / a[r][r].clone();
    }
    Some(x)
}

/// Levenberg-Marquardt step `(J^H J + mu I) d = -J^H e`.
pub(crate) fn lm_step<T: Real>(j: &[Vec<Cx<T>>], e: &[Cx<T>], mu: f64) -> Option<Vec<Cx<T>>> {
    let n = j.first()?.len();
    let proto = e.first()?.re.clone();
    let mut normal: Vec<Vec<Cx<T>>> = vec![vec![Cx::zero(); n]; n];
    let mut rhs: Vec<Cx<T>> = vec![Cx::zero(); n];
    for (row, ek) in j.iter().zip(e) {
        for a in 0..n {
            let ca = row[a].conj();
            rhs[a] = rhs[a].clone() - ca.clone() * ek.clone();
            for b in 0..n {
                normal[a][b] = normal[a][b].clone() + ca.clone() * row[b].clone();
            }
        }
    }
    let diag = normal.iter().enumerate().map(|(i, r)| cabs(&r[i]).to_f64()).fold(0.0, f64::max);
    let damp = proto.constant(mu * diag.max(1e-300));
    for (i, row) in normal.iter_mut().enumerate() {
        row[i].re = row[i].re.clone() + damp.clone();
    }
    solve(normal, rhs, 0.0)
}
