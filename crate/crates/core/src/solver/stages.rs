//! Triangular stages and the quadratic band of the coefficient-matching system.
//!
//! With `u = L + R`, the bands of the inner polynomial separate as
//!
//! ```text
//! x^{3s+1..4s}  (Q^2) only                    -> q_s..q_1
//! x^{2s+1..3s}  (Q^2) + (Q U), linear in u    -> u_s..u_1
//! x^{s+1..2s}   (Q U) + w Q + L R             -> R and w  (s quadratics)
//! x^{0..s}      L R + F                       -> f_0..f_s
//! ```
//!
//! where `w` is `e0` (variant 1), `g0` (variant 2) or absent (variant 3).

use num_complex::Complex;
use num_traits::Zero;

use super::linalg::Cx;
use crate::extprec::{BigReal, Real};
use crate::scheme::{Parts, Variant};

/// Known part of the system after Stages Q and U for one sign branch.
#[derive(Clone, Debug)]
pub(crate) struct Triangular<T> {
    pub s: usize,
    pub variant: Variant,
    /// `q_0..q_s`, `q_0 = 0`.
    pub q: Vec<T>,
    /// `u_0..u_s`; `u_0` is unused.
    pub u: Vec<T>,
    /// `C_k = sum_{i+j=k, i,j>=1} q_i u_j` for `k = 0..s`.
    pub c: Vec<T>,
    /// `beta_0..beta_4s`.
    pub beta: Vec<T>,
}

/// Stages Q and U; the leading pivot `q_s = sign * sqrt(beta_4s)` never vanishes.
pub(crate) fn triangular(s: usize, variant: Variant, beta: &[BigReal], sign: i8) -> Triangular<BigReal> {
    let z = BigReal::zero();
    let mut q = vec![z.clone(); s + 1];
    let mut u = vec![z.clone(); s + 1];
    let mut qs = beta[4 * s].sqrt();
    if sign < 0 {
        qs = -qs;
    }
    let two_qs = qs.clone() + qs.clone();
    q[s] = qs.clone();
    for k in (1..s).rev() {
        let mut acc = beta[3 * s + k].clone();
        for i in k + 1..s {
            acc = acc - &q[i] * &q[s + k - i];
        }
        q[k] = acc / two_qs.clone();
    }
    for k in (1..=s).rev() {
        let mut acc = beta[2 * s + k].clone();
        for i in 1..k {
            acc = acc - &q[i] * &q[k - i];
        }
        for j in k + 1..=s {
            acc = acc - &q[s + k - j] * &u[j];
        }
        u[k] = acc / qs.clone();
    }
    let c = (0..=s).map(|k| (1..k).fold(z.clone(), |acc, i| acc + &q[i] * &u[k - i])).collect();
    Triangular { s, variant, q, u, c, beta: beta.to_vec() }
}

impl<T: Real> Triangular<T> {
    pub fn map<U: Real>(&self, f: impl Fn(&T) -> U) -> Triangular<U> {
        Triangular {
            s: self.s,
            variant: self.variant,
            q: self.q.iter().map(&f).collect(),
            u: self.u.iter().map(&f).collect(),
            c: self.c.iter().map(&f).collect(),
            beta: self.beta.iter().map(&f).collect(),
        }
    }

    fn has_w(&self) -> bool {
        self.variant != Variant::Three
    }

    /// Number of Stage N unknowns; always `s`.
    pub fn n_unknowns(&self) -> usize {
        self.s + 1 - self.variant.r_start() + usize::from(self.has_w())
    }

    /// Split the unknown vector into `R_0..R_s` and `w`.
    fn unpack(&self, z: &[Cx<T>]) -> (Vec<Cx<T>>, Cx<T>) {
        let lo = self.variant.r_start();
        let mut r = vec![Cx::zero(); self.s + 1];
        for (k, v) in (lo..=self.s).zip(z) {
            r[k] = v.clone();
        }
        let w = if self.has_w() { z[self.s + 1 - lo].clone() } else { Cx::zero() };
        (r, w)
    }

    fn pack(&self, r: &[Cx<T>], w: Cx<T>) -> Vec<Cx<T>> {
        let mut z: Vec<Cx<T>> = r[self.variant.r_start()..=self.s].to_vec();
        if self.has_w() {
            z.push(w);
        }
        z
    }

    fn left(&self, r: &[Cx<T>]) -> Vec<Cx<T>> {
        (0..=self.s).map(|i| if i == 0 { Cx::zero() } else { Complex::from(self.u[i].clone()) - r[i].clone() }).collect()
    }

    /// `E_k`, `k = 1..s`, of the quadratic band.
    pub fn residual(&self, z: &[Cx<T>]) -> Vec<Cx<T>> {
        let s = self.s;
        let (r, w) = self.unpack(z);
        let l = self.left(&r);
        (1..=s)
            .map(|k| {
                let mut e = w.clone() * self.q[k].clone() + Complex::from(self.c[k].clone() - self.beta[s + k].clone());
                for i in k..=s {
                    e = e + l[i].clone() * r[s + k - i].clone();
                }
                e
            })
            .collect()
    }

    /// Rows `dE_k/dz`.
    pub fn jacobian(&self, z: &[Cx<T>]) -> Vec<Vec<Cx<T>>> {
        let s = self.s;
        let lo = self.variant.r_start();
        let (r, _) = self.unpack(z);
        let l = self.left(&r);
        (1..=s)
            .map(|k| {
                let mut row: Vec<Cx<T>> = (lo..=s)
                    .map(|m| if m >= k { l[s + k - m].clone() - r[s + k - m].clone() } else { Cx::zero() })
                    .collect();
                if self.has_w() {
                    row.push(Complex::from(self.q[k].clone()));
                }
                row
            })
            .collect()
    }

    /// Scale of the band right-hand side, for relative tolerances.
    pub fn band_scale(&self) -> f64 {
        (1..=self.s).map(|k| self.beta[self.s + k].to_f64().abs()).fold(1.0, f64::max)
    }

    /// Solve the band given `t = R_s`: `w` from `E_s`, then `R_{s-1}..R_lo`
    /// from `E_{s-1}..E_lo`, each linear with pivot `u_s - 2t`. For variant 3
    /// `t` must already satisfy `E_s`.
    pub fn back_substitute(&self, t: &Cx<T>) -> Option<Vec<Cx<T>>> {
        let s = self.s;
        let lo = self.variant.r_start();
        let us = Complex::from(self.u[s].clone());
        let mut r = vec![Cx::zero(); s + 1];
        r[s] = t.clone();
        let w = if self.has_w() {
            let top = Complex::from(self.beta[2 * s].clone() - self.c[s].clone()) - (us.clone() - t.clone()) * t.clone();
            top / self.q[s].clone()
        } else {
            Cx::zero()
        };
        let d = us.clone() - t.clone() - t.clone();
        if d.is_zero() && lo < s {
            return None;
        }
        for k in (lo..s).rev() {
            let mut rest = w.clone() * self.q[k].clone()
                + Complex::from(self.c[k].clone() - self.beta[s + k].clone())
                + t.clone() * self.u[k].clone();
            for i in k + 1..s {
                rest = rest + (Complex::from(self.u[i].clone()) - r[i].clone()) * r[s + k - i].clone();
            }
            r[k] = -rest / d.clone();
        }
        Some(self.pack(&r, w))
    }

    /// Full parts from a Stage N solution: `L = U - R`, `F` from the low band.
    pub fn assemble(&self, z: &[Cx<T>]) -> Parts<Cx<T>> {
        let s = self.s;
        let (r, w) = self.unpack(z);
        let mut l = self.left(&r);
        let mut e0 = Cx::zero();
        match self.variant {
            Variant::One => e0 = w,
            Variant::Two => l[0] = w,
            Variant::Three => {}
        }
        let f = (0..=s)
            .map(|k| {
                let mut acc = Complex::from(self.beta[k].clone());
                for i in 0..=k {
                    acc = acc - l[i].clone() * r[k - i].clone();
                }
                acc
            })
            .collect();
        Parts { q: self.q.iter().cloned().map(Complex::from).collect(), l, r, e0, f }
    }
}

/// Rational function `num(t) / D(t)^exp` with `D(t) = u_s - 2t`.
#[derive(Clone, Debug)]
struct Rat {
    num: Vec<BigReal>,
    exp: usize,
}

struct RatAlgebra {
    /// `D^0, D^1, ..`
    dpow: Vec<Vec<BigReal>>,
}

fn padd(a: &[BigReal], b: &[BigReal]) -> Vec<BigReal> {
    let n = a.len().max(b.len());
    (0..n)
        .map(|i| match (a.get(i), b.get(i)) {
            (Some(x), Some(y)) => x + y,
            (Some(x), None) => x.clone(),
            (None, Some(y)) => y.clone(),
            (None, None) => unreachable!(),
        })
        .collect()
}

fn pmul(a: &[BigReal], b: &[BigReal]) -> Vec<BigReal> {
    crate::scheme::convolve(a, b)
}

impl RatAlgebra {
    fn new(us: &BigReal) -> Self {
        let d = vec![us.clone(), us.constant(-2.0)];
        RatAlgebra { dpow: vec![vec![us.constant(1.0)], d] }
    }

    fn dpow(&mut self, e: usize) -> Vec<BigReal> {
        while self.dpow.len() <= e {
            let next = pmul(self.dpow.last().unwrap(), &self.dpow[1]);
            self.dpow.push(next);
        }
        self.dpow[e].clone()
    }

    fn add(&mut self, a: &Rat, b: &Rat) -> Rat {
        let exp = a.exp.max(b.exp);
        let an = pmul(&a.num, &self.dpow(exp - a.exp));
        let bn = pmul(&b.num, &self.dpow(exp - b.exp));
        Rat { num: padd(&an, &bn), exp }
    }

    fn mul(&self, a: &Rat, b: &Rat) -> Rat {
        Rat { num: pmul(&a.num, &b.num), exp: a.exp + b.exp }
    }
}

fn konst(c: BigReal) -> Rat {
    Rat { num: vec![c], exp: 0 }
}

fn scale(a: &Rat, c: &BigReal) -> Rat {
    Rat { num: a.num.iter().map(|x| x * c).collect(), exp: a.exp }
}

/// Univariate polynomial in `t = R_s` (lowest power first) whose roots, away
/// from `D(t) = 0`, are exactly the Stage N solutions.
pub(crate) fn eliminate(tri: &Triangular<BigReal>) -> Vec<BigReal> {
    let s = tri.s;
    let (q, u, c, beta) = (&tri.q, &tri.u, &tri.c, &tri.beta);
    let one = u[s].constant(1.0);
    if tri.variant == Variant::Three {
        // E_s: -t^2 + u_s t + C_s - beta_2s
        return vec![c[s].clone() - beta[2 * s].clone(), u[s].clone(), -one];
    }
    let mut alg = RatAlgebra::new(&u[s]);
    let t = Rat { num: vec![BigReal::zero(), one.clone()], exp: 0 };
    let inv_qs = one.clone() / q[s].clone();
    let w = Rat {
        num: vec![
            (beta[2 * s].clone() - c[s].clone()) * inv_qs.clone(),
            -(u[s].clone() * inv_qs.clone()),
            inv_qs,
        ],
        exp: 0,
    };
    let mut r: Vec<Rat> = vec![konst(BigReal::zero()); s + 1];
    r[s] = t.clone();
    let left = |alg: &mut RatAlgebra, r: &Rat, ui: &BigReal| alg.add(&konst(ui.clone()), &scale(r, &(-one.clone())));
    let rest = |alg: &mut RatAlgebra, r: &[Rat], k: usize| {
        let mut acc = alg.add(&scale(&w, &q[k]), &scale(&t, &u[k]));
        acc = alg.add(&acc, &konst(c[k].clone() - beta[s + k].clone()));
        for i in k + 1..s {
            let li = left(alg, &r[i], &u[i]);
            let term = alg.mul(&li, &r[s + k - i]);
            acc = alg.add(&acc, &term);
        }
        acc
    };
    for k in (2..s).rev() {
        let e = rest(&mut alg, &r, k);
        r[k] = Rat { num: e.num.iter().map(|x| -x.clone()).collect(), exp: e.exp + 1 };
    }
    // E_1 has no pivot term since R_1 = 0
    let e1 = rest(&mut alg, &r, 1);
    let mut p = e1.num;
    let scale_max = p.iter().map(|x| x.abs()).fold(BigReal::zero(), BigReal::max);
    let floor = scale_max.to_f64() * one.unit_roundoff() * 1024.0;
    while p.len() > 1 && p.last().map(|x| x.abs().to_f64() <= floor).unwrap_or(false) {
        p.pop();
    }
    p
}

pub(crate) fn to_f64_complex(z: &[Cx<BigReal>]) -> Vec<Complex<f64>> {
    z.iter().map(|c| Complex::new(c.re.to_f64(), c.im.to_f64())).collect()
}

pub(crate) fn from_f64_complex(z: &[Complex<f64>], bits: u32) -> Vec<Cx<BigReal>> {
    z.iter().map(|c| Complex::new(BigReal::from_f64(c.re, bits), BigReal::from_f64(c.im, bits))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scheme::{inner_polynomial, join_layout, split_layout};

    fn big(v: f64) -> BigReal {
        BigReal::from_f64(v, 200)
    }

    fn target(s: usize, variant: Variant) -> (Vec<BigReal>, Parts<BigReal>) {
        let inner: Vec<BigReal> = (0..4 * s + 1).map(|i| big(0.3 + ((i * 37) % 11) as f64 * 0.21)).collect();
        let parts = split_layout(s, variant, &inner).unwrap();
        (inner_polynomial(s, &parts), parts)
    }

    #[test]
    fn stage_n_holds_at_known_solution() {
        for v in Variant::ALL {
            for s in 2..=5 {
                let (beta, parts) = target(s, v);
                let tri = triangular(s, v, &beta, 1);
                for i in 1..=s {
                    assert!((tri.q[i].clone() - parts.q[i].clone()).abs().to_f64() < 1e-40);
                    let ui = parts.l[i].clone() + parts.r[i].clone();
                    assert!((tri.u[i].clone() - ui).abs().to_f64() < 1e-40);
                }
                let r: Vec<Cx<BigReal>> = parts.r.iter().cloned().map(Complex::from).collect();
                let w = Complex::from(match v {
                    Variant::One => parts.e0.clone(),
                    Variant::Two => parts.l[0].clone(),
                    Variant::Three => BigReal::zero(),
                });
                let z = tri.pack(&r, w);
                assert_eq!(z.len(), s);
                let e = tri.residual(&z);
                assert!(e.iter().all(|x| x.norm_sqr().to_f64() < 1e-70), "v={v:?} s={s}");
                let back = tri.back_substitute(&r[s]).unwrap();
                for (a, b) in back.iter().zip(&z) {
                    assert!((a.clone() - b.clone()).norm_sqr().to_f64() < 1e-60);
                }
                let p = eliminate(&tri);
                let val = p.iter().rev().fold(BigReal::zero(), |acc, c| acc * r[s].re.clone() + c.clone());
                assert!(val.abs().to_f64() < 1e-30 * p.iter().map(|c| c.abs().to_f64()).fold(1.0, f64::max));
                let rebuilt = tri.assemble(&z);
                let inner = join_layout(s, v, &rebuilt);
                let orig = join_layout(s, v, &parts);
                for (a, b) in inner.iter().zip(&orig) {
                    assert!((a.re.clone() - b.clone()).abs().to_f64() < 1e-35);
                }
            }
        }
    }

    #[test]
    fn jacobian_matches_finite_differences() {
        let (beta, _) = target(4, Variant::One);
        let tri = triangular(4, Variant::One, &beta, 1).map(|x| x.to_f64());
        let z: Vec<Complex<f64>> = (0..4).map(|i| Complex::new(0.3 * i as f64 - 0.2, 0.1 * i as f64)).collect();
        let j = tri.jacobian(&z);
        let h = 1e-7;
        for col in 0..4 {
            let mut zp = z.clone();
            zp[col] += h;
            let ep = tri.residual(&zp);
            let e = tri.residual(&z);
            for row in 0..4 {
                let fd = (ep[row] - e[row]) / h;
                assert!((fd - j[row][col]).norm() < 1e-5, "row {row} col {col}");
            }
        }
    }
}
