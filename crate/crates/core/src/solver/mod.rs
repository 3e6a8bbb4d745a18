//! Enumeration of all coefficient sets that make the nested scheme reproduce
//! a given polynomial.
//!
//! The system is solved in an exactly rescaled frame (see [`scaling`]). Stages
//! Q and U are triangular; the quadratic band is reduced to a univariate
//! polynomial in `t = R_s` whose roots are found simultaneously, and a seeded
//! multistart Newton sweep backs the reduction up wherever its pivot
//! `d_s - e_s` vanishes. Every candidate is polished at working precision and
//! must pass the reconstruction-residual filter. Only the `q_s > 0` branch is
//! solved; the other is its image under `(Q, L, R, e0, F) -> (-Q, -L, -R, -e0, F)`.

mod closed_form;
mod linalg;
mod newton;
mod roots;
mod scaling;
mod stages;

use std::cmp::Ordering;

use num_complex::Complex;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::extprec::{cabs, digits_to_bits, BigComplex, BigReal, Real};
use crate::psm::Polynomial;
use crate::scheme::{inner_polynomial, join_layout, CoefficientSet, Parts, SchemeSpec, Variant};
use linalg::Cx;
use newton::{damped_newton, multistart, NewtonOpts};
use scaling::Scaling;
use stages::{eliminate, from_f64_complex, to_f64_complex, triangular, Triangular};

/// Guard bits carried beyond the requested decimal digits.
pub const GUARD_BITS: u32 = 64;

/// Working precision for `ndigits` significant digits.
pub fn working_bits(ndigits: u32) -> u32 {
    digits_to_bits(ndigits) + GUARD_BITS
}

/// The inner target `beta_i = sigma b_{p+i}` and the copied tail
/// `a_j = sigma b_j`, `j < p`.
#[derive(Clone, Debug, PartialEq)]
pub struct InnerProblem {
    pub spec: SchemeSpec,
    pub beta: Vec<BigReal>,
    pub tail: Vec<BigReal>,
}

impl InnerProblem {
    /// Split a polynomial according to `spec` (whose sign is applied here).
    pub fn new(spec: SchemeSpec, b: &Polynomial, bits: u32) -> Result<Self> {
        if b.degree() != spec.m {
            return Err(Error::InvalidArgument(format!("degree {} does not match m={}", b.degree(), spec.m)));
        }
        let coeffs: Vec<BigReal> =
            b.with_prec(bits).into_iter().map(|c| if spec.sign < 0 { -c } else { c }).collect();
        let tail = coeffs[..spec.p].to_vec();
        let beta = coeffs[spec.p..].to_vec();
        InnerProblem::from_beta(spec, beta, tail)
    }

    pub fn from_beta(spec: SchemeSpec, beta: Vec<BigReal>, tail: Vec<BigReal>) -> Result<Self> {
        if beta.len() != 4 * spec.s + 1 || tail.len() != spec.p {
            return Err(Error::LayoutMismatch(format!(
                "inner target of length {} and tail of length {} for s={}, p={}",
                beta.len(),
                tail.len(),
                spec.s,
                spec.p
            )));
        }
        let lead = &beta[4 * spec.s];
        if lead.is_zero_value() || lead.is_sign_negative() {
            return Err(Error::LeadingCoefficientZero);
        }
        Ok(InnerProblem { spec, beta, tail })
    }

    /// `||y(set) - beta||_inf / ||beta||_inf` at working precision.
    pub fn residual(&self, set: &CoefficientSet) -> Result<f64> {
        let parts = crate::scheme::split_layout(self.spec.s, set.variant, &set.inner)?;
        Ok(self.parts_residual(&parts))
    }

    fn parts_residual(&self, parts: &Parts<BigComplex>) -> f64 {
        let y = inner_polynomial(self.spec.s, parts);
        let num = y
            .iter()
            .zip(&self.beta)
            .map(|(a, b)| cabs(&(a.clone() - Complex::from(b.clone()))).to_f64())
            .fold(0.0, f64::max);
        let den = self.beta.iter().map(|b| b.abs().to_f64()).fold(0.0, f64::max);
        num / den
    }
}

/// Tolerances and search budget.
#[derive(Clone, Debug, PartialEq)]
pub struct SolverConfig {
    pub ndigits: u32,
    pub max_starts: usize,
    /// Bound on the relative reconstruction residual (held as `f64`).
    pub residual_tol: f64,
    /// Two sets closer than this (relative, rescaled frame) are one set.
    pub dedup_tol: f64,
    /// A set whose imaginary parts are below this (relative) is real.
    pub tau_real: f64,
    /// Variant-1 sets with `|d_s - e_s|` below this (relative) are rejected for `s > 2`.
    pub tau_eq: f64,
    pub rng_seed: u64,
}

impl SolverConfig {
    pub fn new(ndigits: u32, s: usize) -> Self {
        let half = 10f64.powf(-(ndigits as f64) / 2.0);
        SolverConfig {
            ndigits,
            max_starts: 2000 * s,
            residual_tol: 10f64.powi(8 - ndigits as i32),
            dedup_tol: half,
            tau_real: half,
            tau_eq: half,
            rng_seed: 0,
        }
    }

    pub fn bits(&self) -> u32 {
        working_bits(self.ndigits)
    }
}

/// All sets for the problem: the closed form for `s = 2`, variant 1 (unless
/// doubly degenerate), the general enumerator otherwise.
pub fn solve(problem: &InnerProblem, cfg: &SolverConfig) -> Result<Vec<CoefficientSet>> {
    if let Some(sets) = solve_s2(problem, cfg)? {
        return Ok(sets);
    }
    solve_general(problem, cfg)
}

/// Closed-form branches for `s = 2`, variant 1. `Ok(None)` when the problem
/// is outside its domain (other shape, or `beta_7 = beta_5 = 0`).
pub fn solve_s2(problem: &InnerProblem, cfg: &SolverConfig) -> Result<Option<Vec<CoefficientSet>>> {
    if problem.spec.s != 2 || problem.spec.variant != Variant::One {
        return Ok(None);
    }
    let beta: Vec<BigReal> = problem.beta.iter().map(|b| b.with_prec(cfg.bits())).collect();
    let Some(parts) = closed_form::solve_s2_parts(&beta) else {
        return Ok(None);
    };
    let sc = Scaling::fit(&beta);
    let scaled = parts.iter().map(|p| sc.scale_parts(2, p)).collect();
    finalize(problem, cfg, sc, scaled).map(Some)
}

fn polish_opts(tri: &Triangular<BigReal>, bits: u32) -> NewtonOpts {
    let ulp = 2f64.powi(-(bits as i32));
    NewtonOpts {
        max_iter: 300,
        res_tol: tri.band_scale() * ulp * 65536.0,
        step_tol: ulp * 256.0,
        pivot_tol: ulp * 65536.0,
        blowup: 1e40,
    }
}

fn bezout_cap(s: usize) -> usize {
    1usize.checked_shl(s as u32).unwrap_or(usize::MAX)
}

/// Reduction plus multistart enumeration for any `s >= 2` and variant.
pub fn solve_general(problem: &InnerProblem, cfg: &SolverConfig) -> Result<Vec<CoefficientSet>> {
    let spec = problem.spec;
    let s = spec.s;
    let bits = cfg.bits();
    let beta: Vec<BigReal> = problem.beta.iter().map(|b| b.with_prec(bits)).collect();
    let sc = Scaling::fit(&beta);
    let tri = triangular(s, spec.variant, &sc.beta(&beta), 1);
    let opts = polish_opts(&tri, bits);

    let mut seeds: Vec<Vec<Cx<BigReal>>> = Vec::new();
    for t in univariate_roots(&eliminate(&tri), bits) {
        let d = cabs(&(Complex::from(tri.u[s].clone()) - t.clone() - t.clone())).to_f64();
        if d <= 1e-12 * tri.u[s].to_f64().abs().max(1.0) && spec.variant.r_start() < s {
            continue;
        }
        if let Some(z) = tri.back_substitute(&t) {
            seeds.push(z);
        }
    }
    let mut polished: Vec<Vec<Cx<BigReal>>> = seeds
        .into_par_iter()
        .map(|z| damped_newton(&tri, z, &opts))
        .filter(|o| o.residual.is_finite())
        .map(|o| o.z)
        .collect();

    let tri_f = tri.map(|x| x.to_f64());
    if tri_f.q.iter().chain(&tri_f.u).chain(&tri_f.c).chain(&tri_f.beta).all(|x| x.is_finite()) {
        let known: Vec<_> = polished.iter().map(|z| to_f64_complex(z)).collect();
        let mut extra = multistart(&tri_f, &known, cfg.max_starts, cfg.rng_seed, 1e-6);
        let cap = bezout_cap(s);
        if extra.len() > cap {
            extra.sort_by(|a, b| cnorm(a).total_cmp(&cnorm(b)));
            extra.truncate(cap);
        }
        let more: Vec<_> = extra
            .into_par_iter()
            .map(|z| damped_newton(&tri, from_f64_complex(&z, bits), &opts))
            .filter(|o| o.residual.is_finite())
            .map(|o| o.z)
            .collect();
        polished.extend(more);
    }

    let mut scaled = Vec::with_capacity(2 * polished.len());
    for z in &polished {
        let parts = tri.assemble(z);
        scaled.push(mirror(&parts));
        scaled.push(parts);
    }
    finalize(problem, cfg, sc, scaled)
}

fn cnorm(z: &[Complex<f64>]) -> f64 {
    z.iter().map(|c| c.norm()).fold(0.0, f64::max)
}

/// Roots of a real polynomial (lowest power first): `f64` Aberth, then
/// refinement at working precision.
fn univariate_roots(p: &[BigReal], bits: u32) -> Vec<Cx<BigReal>> {
    if p.len() < 2 {
        return Vec::new();
    }
    let pf: Vec<Complex<f64>> = p.iter().map(|c| Complex::new(c.to_f64(), 0.0)).collect();
    if pf.iter().any(|c| !c.re.is_finite()) || pf.last().map(|c| c.re == 0.0).unwrap_or(true) {
        return Vec::new();
    }
    let mut rf = roots::initial_guesses(&pf);
    roots::aberth(&pf, &mut rf, 1e-15, 1e-300, 500);
    let pb: Vec<Cx<BigReal>> = p.iter().map(|c| Complex::from(c.with_prec(bits))).collect();
    let mut rb = from_f64_complex(&rf, bits);
    roots::aberth(&pb, &mut rb, 2f64.powi(8 - bits as i32), 1e-300, 200);
    rb
}

fn mirror(p: &Parts<BigComplex>) -> Parts<BigComplex> {
    let neg = |v: &[BigComplex]| v.iter().map(|z| -z.clone()).collect();
    Parts { q: neg(&p.q), l: neg(&p.l), r: neg(&p.r), e0: -p.e0.clone(), f: p.f.clone() }
}

fn is_finite(v: &[BigComplex]) -> bool {
    v.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

fn max_abs(v: &[BigComplex], part: impl Fn(&BigComplex) -> &BigReal) -> f64 {
    v.iter().map(|z| part(z).abs().to_f64()).fold(0.0, f64::max)
}

fn canonical_cmp(a: &[BigComplex], b: &[BigComplex]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        let o = x.re.to_f64().total_cmp(&y.re.to_f64()).then(x.im.to_f64().total_cmp(&y.im.to_f64()));
        if o != Ordering::Equal {
            return o;
        }
    }
    Ordering::Equal
}

/// Realness snap, degeneracy and duplicate filtering in the rescaled frame;
/// residual filter, branch cap and canonical order in the original frame.
fn finalize(
    problem: &InnerProblem,
    cfg: &SolverConfig,
    sc: Scaling,
    candidates: Vec<Parts<BigComplex>>,
) -> Result<Vec<CoefficientSet>> {
    let spec = problem.spec;
    let s = spec.s;
    let variant = spec.variant;
    let mut kept: Vec<(Vec<BigComplex>, Parts<BigComplex>, bool)> = Vec::new();
    for mut parts in candidates {
        let mut flat = join_layout(s, variant, &parts);
        if !is_finite(&flat) {
            continue;
        }
        let re_max = max_abs(&flat, |z| &z.re).max(1.0);
        let is_real = max_abs(&flat, |z| &z.im) <= cfg.tau_real * re_max;
        if is_real {
            let zero = |v: &mut Vec<BigComplex>| v.iter_mut().for_each(|z| z.im = z.re.constant(0.0));
            zero(&mut parts.q);
            zero(&mut parts.l);
            zero(&mut parts.r);
            zero(&mut parts.f);
            parts.e0.im = parts.e0.re.constant(0.0);
            flat = join_layout(s, variant, &parts);
        }
        if variant == Variant::One && s > 2 {
            let (ds, es) = (cabs(&parts.l[s]).to_f64(), cabs(&parts.r[s]).to_f64());
            let gap = cabs(&(parts.l[s].clone() - parts.r[s].clone())).to_f64();
            if gap <= cfg.tau_eq * ds.max(es).max(1.0) {
                continue;
            }
        }
        let norm = flat.iter().map(|z| cabs(z).to_f64()).fold(1.0, f64::max);
        let dup = kept.iter().any(|(other, _, _)| {
            other.iter().zip(&flat).all(|(a, b)| cabs(&(a.clone() - b.clone())).to_f64() <= cfg.dedup_tol * norm)
        });
        if !dup {
            kept.push((flat, parts, is_real));
        }
    }

    let mut accepted: Vec<(f64, bool, CoefficientSet)> = Vec::new();
    for (flat, parts, is_real) in kept {
        let orig = sc.unscale_parts(s, &parts);
        if problem.parts_residual(&orig) > cfg.residual_tol {
            continue;
        }
        let norm = flat.iter().map(|z| cabs(z).to_f64()).fold(0.0, f64::max);
        let positive = !orig.q[s].re.is_sign_negative();
        accepted.push((
            norm,
            positive,
            CoefficientSet { variant, inner: join_layout(s, variant, &orig), tail: problem.tail.clone(), is_real },
        ));
    }
    let cap = bezout_cap(s);
    let mut out = Vec::new();
    for branch in [true, false] {
        let mut group: Vec<_> = accepted.iter().filter(|a| a.1 == branch).collect();
        group.sort_by(|a, b| a.0.total_cmp(&b.0));
        out.extend(group.into_iter().take(cap).map(|a| a.2.clone()));
    }
    if out.is_empty() {
        return Err(Error::SolverFailure);
    }
    out.sort_by(|a, b| canonical_cmp(&a.inner, &b.inner));
    Ok(out)
}
