//! Exact power-of-two change of variables `x -> alpha x`, `y -> lambda y`
//! that brings the inner target to unit scale.
//!
//! With `alpha = 2^k` and `lambda = 4^j`:
//! `q'_i = 2^(j + k(s+i)) q_i`, `l'_i = 2^(j + k i) l_i` (same for `r`),
//! `e0' = 2^j e0`, `f'_i = 2^(2j + k i) f_i`, `beta'_i = 2^(2j + k i) beta_i`.

use num_complex::Complex;

use crate::extprec::BigReal;
use crate::scheme::Parts;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) struct Scaling {
    pub k: i32,
    pub j: i32,
}

fn shift(z: &Complex<BigReal>, e: i32) -> Complex<BigReal> {
    Complex::new(z.re.mul_pow2(e), z.im.mul_pow2(e))
}

impl Scaling {
    /// Least-squares fit of `log2 |beta_i|` against `i` fixes `k`; `j` then
    /// brings the leading coefficient near one.
    pub fn fit(beta: &[BigReal]) -> Scaling {
        let pts: Vec<(f64, f64)> = beta
            .iter()
            .enumerate()
            .filter(|(_, b)| !b.is_zero_value())
            .map(|(i, b)| (i as f64, log2_abs(b)))
            .collect();
        let k = if pts.len() >= 2 {
            let n = pts.len() as f64;
            let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
            let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
            let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
            let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
            -(sxy / sxx).round() as i32
        } else {
            0
        };
        let top = beta.len() - 1;
        let lead = log2_abs(&beta[top]) + (k as f64) * top as f64;
        Scaling { k, j: (-lead / 2.0).round() as i32 }
    }

    pub fn beta(&self, beta: &[BigReal]) -> Vec<BigReal> {
        beta.iter().enumerate().map(|(i, b)| b.mul_pow2(2 * self.j + self.k * i as i32)).collect()
    }

    fn apply(&self, s: usize, p: &Parts<Complex<BigReal>>, dir: i32) -> Parts<Complex<BigReal>> {
        let (k, j) = (self.k * dir, self.j * dir);
        let lin = |v: &[Complex<BigReal>], off: i32, base: i32| {
            v.iter().enumerate().map(|(i, z)| shift(z, base + k * (off + i as i32))).collect()
        };
        Parts {
            q: lin(&p.q, s as i32, j),
            l: lin(&p.l, 0, j),
            r: lin(&p.r, 0, j),
            e0: shift(&p.e0, j),
            f: lin(&p.f, 0, 2 * j),
        }
    }

    pub fn scale_parts(&self, s: usize, p: &Parts<Complex<BigReal>>) -> Parts<Complex<BigReal>> {
        self.apply(s, p, 1)
    }

    pub fn unscale_parts(&self, s: usize, p: &Parts<Complex<BigReal>>) -> Parts<Complex<BigReal>> {
        self.apply(s, p, -1)
    }
}

/// `log2 |x|` for nonzero `x`, robust to magnitudes outside `f64` range.
fn log2_abs(x: &BigReal) -> f64 {
    let e = x.exponent().unwrap_or(0);
    let m = x.mul_pow2(-e).to_f64().abs();
    m.log2() + e as f64
}
