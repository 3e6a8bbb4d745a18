//! Damped Newton on the quadratic band and the seeded multistart driver.

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::linalg::{cnorm_inf, lm_step, solve, Cx};
use super::stages::Triangular;
use crate::extprec::Real;

pub(crate) const BATCH: usize = 50;
pub(crate) const IDLE_BATCHES: usize = 5;

#[derive(Clone, Copy, Debug)]
pub(crate) struct NewtonOpts {
    pub max_iter: usize,
    /// Absolute residual target.
    pub res_tol: f64,
    /// Stop once a step is below this, relative to `max(1, |z|)`.
    pub step_tol: f64,
    /// Relative pivot threshold before falling back to Levenberg-Marquardt.
    pub pivot_tol: f64,
    /// Abandon iterates beyond this magnitude.
    pub blowup: f64,
}

#[derive(Clone, Debug)]
pub(crate) struct NewtonOutcome<T> {
    pub z: Vec<Cx<T>>,
    pub residual: f64,
    pub converged: bool,
}

fn axpy<T: Real>(z: &[Cx<T>], step: &[Cx<T>], lambda: f64) -> Vec<Cx<T>> {
    z.iter()
        .zip(step)
        .map(|(a, d)| {
            let l = d.re.constant(lambda);
            a.clone() + d.clone() * l
        })
        .collect()
}

pub(crate) fn damped_newton<T: Real>(tri: &Triangular<T>, z0: Vec<Cx<T>>, opts: &NewtonOpts) -> NewtonOutcome<T> {
    let mut z = z0;
    let mut e = tri.residual(&z);
    let mut norm = cnorm_inf(&e);
    for _ in 0..opts.max_iter {
        if !norm.is_finite() {
            break;
        }
        if norm <= opts.res_tol {
            return NewtonOutcome { z, residual: norm, converged: true };
        }
        let j = tri.jacobian(&z);
        let neg: Vec<Cx<T>> = e.iter().map(|x| -x.clone()).collect();
        let step = match solve(j.clone(), neg, opts.pivot_tol) {
            Some(d) => d,
            None => match lm_step(&j, &e, 1e-10) {
                Some(d) => d,
                None => break,
            },
        };
        let step_norm = cnorm_inf(&step);
        let mut lambda = 1.0;
        let mut accepted = None;
        for _ in 0..40 {
            let trial = axpy(&z, &step, lambda);
            let te = tri.residual(&trial);
            let tn = cnorm_inf(&te);
            if tn < norm {
                accepted = Some((trial, te, tn));
                break;
            }
            lambda *= 0.5;
        }
        let Some((nz, ne, nn)) = accepted else {
            break;
        };
        z = nz;
        e = ne;
        norm = nn;
        let zn = cnorm_inf(&z);
        if zn > opts.blowup {
            break;
        }
        if lambda * step_norm <= opts.step_tol * zn.max(1.0) {
            return NewtonOutcome { z, residual: norm, converged: norm <= opts.res_tol };
        }
    }
    NewtonOutcome { converged: norm <= opts.res_tol, z, residual: norm }
}

pub(crate) fn close(a: &[Complex<f64>], b: &[Complex<f64>], tol: f64) -> bool {
    let scale = a.iter().map(|z| z.norm()).fold(1.0, f64::max);
    a.iter().zip(b).all(|(x, y)| (x - y).norm() <= tol * scale)
}

/// Random start: log-uniform magnitude in `[0.1, 10]`, uniform phase.
fn random_start(rng: &mut ChaCha8Rng, n: usize) -> Vec<Complex<f64>> {
    (0..n)
        .map(|_| {
            let mag = 10f64.powf(rng.random_range(-1.0..1.0));
            Complex::from_polar(mag, rng.random_range(0.0..std::f64::consts::TAU))
        })
        .collect()
}

/// Seeded multistart in `f64`. The first start is the origin. Returns the
/// converged points not within `tol` of `known` or of each other, in
/// discovery order. Starts are drawn sequentially, so results do not depend
/// on the worker count.
pub(crate) fn multistart(
    tri: &Triangular<f64>,
    known: &[Vec<Complex<f64>>],
    max_starts: usize,
    seed: u64,
    tol: f64,
) -> Vec<Vec<Complex<f64>>> {
    let n = tri.n_unknowns();
    let scale = tri.band_scale();
    let opts = NewtonOpts { max_iter: 80, res_tol: 1e-11 * scale, step_tol: 1e-15, pivot_tol: 1e-13, blowup: 1e12 };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut seen: Vec<Vec<Complex<f64>>> = known.to_vec();
    let mut found = Vec::new();
    let mut started = 0;
    let mut idle = 0;
    while started < max_starts && idle < IDLE_BATCHES {
        let count = BATCH.min(max_starts - started);
        let starts: Vec<Vec<Complex<f64>>> = (0..count)
            .map(|i| if started + i == 0 { vec![Complex::new(0.0, 0.0); n] } else { random_start(&mut rng, n) })
            .collect();
        started += count;
        let results: Vec<NewtonOutcome<f64>> = starts.into_par_iter().map(|z0| damped_newton(tri, z0, &opts)).collect();
        let mut fresh = false;
        for r in results.into_iter().filter(|r| r.converged) {
            if !seen.iter().any(|k| close(k, &r.z, tol)) {
                seen.push(r.z.clone());
                found.push(r.z);
                fresh = true;
            }
        }
        idle = if fresh { 0 } else { idle + 1 };
    }
    found
}
