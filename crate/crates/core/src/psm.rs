//! Paterson-Stockmeyer evaluation, its optimal degrees and cost model.

use crate::error::{Error, Result};
use crate::extprec::{parse_number, parse_number_bits, BigReal, Real, TargetFloat};
use crate::matrix::{DenseMatrix, EvalResult, ProductCounter};

/// Coefficients `b_0..b_m` of `P_m(x) = sum b_i x^i` in extended precision.
#[derive(Clone, Debug, PartialEq)]
pub struct Polynomial {
    pub coeffs: Vec<BigReal>,
}

impl Polynomial {
    pub fn new(coeffs: Vec<BigReal>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::InvalidArgument("polynomial needs at least one coefficient".into()));
        }
        Ok(Polynomial { coeffs })
    }

    /// Parse decimal or `p/q` strings at `ndigits` digits.
    pub fn parse<S: AsRef<str>>(texts: &[S], ndigits: u32) -> Result<Self> {
        Polynomial::new(texts.iter().map(|t| parse_number(t.as_ref(), ndigits)).collect::<Result<_>>()?)
    }

    /// Parse decimal or `p/q` strings rounded to `bits`.
    pub fn parse_bits<S: AsRef<str>>(texts: &[S], bits: u32) -> Result<Self> {
        Polynomial::new(texts.iter().map(|t| parse_number_bits(t.as_ref(), bits)).collect::<Result<_>>()?)
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn leading(&self) -> &BigReal {
        self.coeffs.last().expect("nonempty")
    }

    pub fn negated(&self) -> Polynomial {
        Polynomial { coeffs: self.coeffs.iter().map(|c| -c.clone()).collect() }
    }

    pub fn rounded<F: TargetFloat>(&self) -> Result<Vec<F>> {
        self.coeffs.iter().map(F::round_from).collect()
    }

    pub fn with_prec(&self, bits: u32) -> Vec<BigReal> {
        self.coeffs.iter().map(|c| c.with_prec(bits)).collect()
    }

    /// Horner evaluation at a scalar.
    pub fn horner<T: Real>(coeffs: &[T], x: &T) -> T {
        coeffs.iter().rev().fold(T::zero(), |acc, c| acc * x.clone() + c.clone())
    }
}

/// Block size and cost of a Paterson-Stockmeyer plan.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PsPlan {
    pub s: usize,
    /// Padded degree `s * ceil(m/s)`.
    pub m0: usize,
    pub cost: usize,
}

fn plan_for(m: usize, s: usize) -> PsPlan {
    let blocks = m.div_ceil(s);
    PsPlan { s, m0: s * blocks, cost: (s + blocks).saturating_sub(2) }
}

/// `{s^2, s(s+1) : s >= 1}` up to `limit`, ascending.
pub fn optimal_degrees(limit: usize) -> Vec<usize> {
    let mut out = Vec::new();
    for s in 1.. {
        if s * s > limit {
            break;
        }
        out.push(s * s);
        if s * (s + 1) <= limit {
            out.push(s * (s + 1));
        }
    }
    out
}

/// Minimum-cost plan over `s in {floor(sqrt m), ceil(sqrt m)}`, ties to smaller `s`.
pub fn ps_cost(m: usize) -> PsPlan {
    if m <= 1 {
        return PsPlan { s: 1, m0: m, cost: 0 };
    }
    let lo = m.isqrt();
    let hi = if lo * lo == m { lo } else { lo + 1 };
    let a = plan_for(m, lo);
    let b = plan_for(m, hi);
    if b.cost < a.cost {
        b
    } else {
        a
    }
}

/// Evaluate `sum b_i A^i` with block size `s`, padding with zero coefficients
/// up to `s * ceil(m/s)`. Powers `A^2..A^s` are formed once per call.
pub fn ps_eval<T: Real>(a: &DenseMatrix<T>, coeffs: &[T], s: usize) -> Result<EvalResult<T>> {
    if coeffs.is_empty() {
        return Err(Error::InvalidArgument("empty coefficient vector".into()));
    }
    if s == 0 {
        return Err(Error::InvalidArgument("block size must be positive".into()));
    }
    let n = a.n();
    let m = coeffs.len() - 1;
    let mut counter = ProductCounter::default();
    if m == 0 {
        return Ok(EvalResult { value: DenseMatrix::identity(n).scaled(&coeffs[0]), product_count: 0 });
    }
    let blocks = m.div_ceil(s);
    let m0 = s * blocks;
    // padded coefficients above m are zero, so A^s is only needed when it multiplies
    let top_power = if blocks >= 2 { s } else { m.min(s) };
    let pows = counter.powers(a, top_power)?;
    let coef = |k: usize| if k <= m { Some(&coeffs[k]) } else { None };

    let mut z = DenseMatrix::zeros(n);
    for j in 0..=s {
        if let Some(c) = coef(m0 - j) {
            z.add_term(c, &pows, s - j);
        }
    }
    for l in 1..blocks {
        z = counter.mul(&z, &pows[s])?;
        for j in 1..=s {
            if let Some(c) = coef(m0 - l * s - j) {
                z.add_term(c, &pows, s - j);
            }
        }
    }
    Ok(EvalResult { value: z, product_count: counter.count() })
}
