//! Simultaneous polynomial root finding (Aberth-Ehrlich).

use num_complex::Complex;
use num_traits::Zero;

use super::linalg::Cx;
use crate::extprec::{cabs, Real};

/// `(p(z), p'(z))` by Horner; coefficients lowest power first.
fn eval_with_derivative<T: Real>(p: &[Cx<T>], z: &Cx<T>) -> (Cx<T>, Cx<T>) {
    let mut v = Cx::zero();
    let mut d = Cx::zero();
    for c in p.iter().rev() {
        d = d * z.clone() + v.clone();
        v = v * z.clone() + c.clone();
    }
    (v, d)
}

/// Initial guesses on a circle whose radius is the geometric mean of the
/// Fujiwara-type bounds, rotated off the real axis.
pub(crate) fn initial_guesses(p: &[Complex<f64>]) -> Vec<Complex<f64>> {
    let deg = p.len() - 1;
    let lead = p[deg].norm();
    let radius = (0..deg)
        .filter(|&k| p[k].norm() > 0.0)
        .map(|k| (p[k].norm() / lead).powf(1.0 / (deg - k) as f64))
        .fold(0.0, f64::max)
        .max(1e-3);
    (0..deg)
        .map(|k| Complex::from_polar(radius, (2.0 * std::f64::consts::PI * k as f64 + 0.4) / deg as f64))
        .collect()
}

/// Refine `roots` until every correction is below `rel_tol` relative to its
/// root (or `abs_floor`), or `max_iter` sweeps. Returns whether all converged.
pub(crate) fn aberth<T: Real>(
    p: &[Cx<T>],
    roots: &mut [Cx<T>],
    rel_tol: f64,
    abs_floor: f64,
    max_iter: usize,
) -> bool {
    let n = roots.len();
    let mut done = vec![false; n];
    for _ in 0..max_iter {
        for i in 0..n {
            if done[i] {
                continue;
            }
            let (v, d) = eval_with_derivative(p, &roots[i]);
            if v.is_zero() {
                done[i] = true;
                continue;
            }
            let ratio = v / d;
            let mut sum = Cx::zero();
            for j in 0..n {
                if j != i {
                    let diff = roots[i].clone() - roots[j].clone();
                    if !diff.is_zero() {
                        sum = sum + Cx::new(diff.re.constant(1.0), diff.re.constant(0.0)) / diff;
                    }
                }
            }
            let one = Cx::new(ratio.re.constant(1.0), ratio.re.constant(0.0));
            let denom = one - ratio.clone() * sum;
            let step = if denom.is_zero() { ratio } else { ratio / denom };
            let mag = cabs(&step).to_f64();
            if !mag.is_finite() {
                done[i] = true;
                continue;
            }
            roots[i] = roots[i].clone() - step;
            if mag <= rel_tol * cabs(&roots[i]).to_f64().max(abs_floor) {
                done[i] = true;
            }
        }
        if done.iter().all(|&d| d) {
            return true;
        }
    }
    false
}
