//! Scheme parameters, coefficient layouts of the three structural variants,
//! the coefficient-reconstruction map and the product-count model.
//!
//! With `Q(x) = sum_{i=1..s} q_i x^i`, factor addends `L`, `R` and the free
//! block `F`, the inner polynomial is
//!
//! ```text
//! y(x) = x^{2s} Q^2 + x^s Q (L + R) + L R + e0 x^s Q + F
//! ```
//!
//! and the full scheme is `y(x) x^p + sum_{j<p} a_j x^j`.

use num_traits::{Num, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::extprec::{BigComplex, BigReal, TargetFloat};
use crate::psm::ps_cost;

/// Structural variant of the quadratic level (`type_pol`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub enum Variant {
    /// `(y0 + sum_{1..s} d_i A^i)(y0 + sum_{2..s} e_i A^i) + e0 y0 + F`
    One,
    /// `(y0 + sum_{0..s} g_i A^i)(y0 + sum_{2..s} e_i A^i) + F`
    Two,
    /// `(y0 + sum_{1..s} d_i A^i)(y0 + sum_{1..s} e_i A^i) + F`
    Three,
}

impl Variant {
    pub const ALL: [Variant; 3] = [Variant::One, Variant::Two, Variant::Three];

    pub fn from_type_pol(t: u8) -> Result<Self> {
        match t {
            1 => Ok(Variant::One),
            2 => Ok(Variant::Two),
            3 => Ok(Variant::Three),
            other => Err(Error::InvalidVariant(other)),
        }
    }

    pub fn type_pol(self) -> u8 {
        match self {
            Variant::One => 1,
            Variant::Two => 2,
            Variant::Three => 3,
        }
    }

    /// Lowest power carried by the right factor addend `R`.
    pub(crate) fn r_start(self) -> usize {
        match self {
            Variant::One | Variant::Two => 2,
            Variant::Three => 1,
        }
    }

    /// Lowest power carried by the left factor addend `L`.
    pub(crate) fn l_start(self) -> usize {
        match self {
            Variant::Two => 0,
            Variant::One | Variant::Three => 1,
        }
    }
}

impl TryFrom<u8> for Variant {
    type Error = Error;
    fn try_from(t: u8) -> Result<Self> {
        Variant::from_type_pol(t)
    }
}

impl From<Variant> for u8 {
    fn from(v: Variant) -> u8 {
        v.type_pol()
    }
}

/// Degree split `m = 4s + p`, `p = t s + r`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SchemeParams {
    pub m: usize,
    pub s: usize,
    pub p: usize,
    pub t: usize,
    pub r: usize,
}

impl SchemeParams {
    pub fn new(m: usize, s: usize) -> Result<Self> {
        if s < 2 || 4 * s > m {
            return Err(Error::BlockSize { s, m });
        }
        let p = m - 4 * s;
        Ok(SchemeParams { m, s, p, t: p / s, r: p % s })
    }

    pub fn cost(&self) -> usize {
        scheme_cost(self.s, self.p)
    }

    /// Products saved relative to the optimal Paterson-Stockmeyer plan.
    pub fn savings(&self) -> i64 {
        ps_cost(self.m).cost as i64 - self.cost() as i64
    }
}

/// Full structural choice: degree split, variant and leading-coefficient sign.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SchemeSpec {
    pub m: usize,
    pub s: usize,
    pub p: usize,
    pub t: usize,
    pub r: usize,
    pub variant: Variant,
    pub sign: i8,
}

impl SchemeSpec {
    pub fn new(params: SchemeParams, variant: Variant, sign: i8) -> Self {
        debug_assert!(sign == 1 || sign == -1);
        SchemeSpec { m: params.m, s: params.s, p: params.p, t: params.t, r: params.r, variant, sign }
    }

    pub fn params(&self) -> SchemeParams {
        SchemeParams { m: self.m, s: self.s, p: self.p, t: self.t, r: self.r }
    }

    pub fn inner_len(&self) -> usize {
        4 * self.s + 1
    }
}

/// Degrees for which no block size saves a product over Paterson-Stockmeyer.
pub fn is_refused_degree(m: usize) -> bool {
    m < 8 || m == 9 || m == 11
}

/// `s + 1 + ceil(p/s)`: `s-1` powers, `y0`, `y1`, then `t` products by `A^s`
/// and one by `A^r` when `r > 0`.
pub fn scheme_cost(s: usize, p: usize) -> usize {
    assert!(s >= 2, "block size must be at least 2");
    s + 1 + p.div_ceil(s)
}

/// Smallest `s` saving one product over PS, or the caller's override.
pub fn select_params(m: usize, s_override: Option<usize>) -> Result<SchemeParams> {
    if is_refused_degree(m) {
        return Err(Error::RecommendPs { m });
    }
    if let Some(s) = s_override {
        return SchemeParams::new(m, s);
    }
    let target = ps_cost(m).cost - 1;
    (2..=m / 4)
        .find(|&s| scheme_cost(s, m - 4 * s) == target)
        .map(|s| SchemeParams::new(m, s).expect("s within bounds"))
        .ok_or(Error::RecommendPs { m })
}

/// Decoded inner coefficients, each vector indexed by power `0..=s`.
#[derive(Clone, Debug, PartialEq)]
pub struct Parts<T> {
    pub q: Vec<T>,
    pub l: Vec<T>,
    pub r: Vec<T>,
    pub e0: T,
    pub f: Vec<T>,
}

impl<T: Clone + Zero> Parts<T> {
    pub fn zeros(s: usize) -> Self {
        Parts {
            q: vec![T::zero(); s + 1],
            l: vec![T::zero(); s + 1],
            r: vec![T::zero(); s + 1],
            e0: T::zero(),
            f: vec![T::zero(); s + 1],
        }
    }
}

/// Split an inner vector (highest power first within each block) into parts.
pub fn split_layout<T: Clone + Zero>(s: usize, variant: Variant, inner: &[T]) -> Result<Parts<T>> {
    if inner.len() != 4 * s + 1 {
        return Err(Error::LayoutMismatch(format!(
            "expected {} inner coefficients for s={s}, got {}",
            4 * s + 1,
            inner.len()
        )));
    }
    let mut parts = Parts::zeros(s);
    let mut it = inner.iter().cloned();
    let take_block = |it: &mut dyn Iterator<Item = T>, dst: &mut Vec<T>, lo: usize| {
        for i in (lo..=s).rev() {
            dst[i] = it.next().expect("length checked");
        }
    };
    take_block(&mut it, &mut parts.q, 1);
    take_block(&mut it, &mut parts.l, variant.l_start());
    take_block(&mut it, &mut parts.r, variant.r_start());
    if variant == Variant::One {
        parts.e0 = it.next().expect("length checked");
    }
    take_block(&mut it, &mut parts.f, 0);
    Ok(parts)
}

/// Inverse of [`split_layout`].
pub fn join_layout<T: Clone>(s: usize, variant: Variant, parts: &Parts<T>) -> Vec<T> {
    let mut out = Vec::with_capacity(4 * s + 1);
    let block = |out: &mut Vec<T>, src: &[T], lo: usize| out.extend((lo..=s).rev().map(|i| src[i].clone()));
    block(&mut out, &parts.q, 1);
    block(&mut out, &parts.l, variant.l_start());
    block(&mut out, &parts.r, variant.r_start());
    if variant == Variant::One {
        out.push(parts.e0.clone());
    }
    block(&mut out, &parts.f, 0);
    out
}

/// Human-readable names of the inner coefficients in layout order.
pub fn layout_names(s: usize, variant: Variant) -> Vec<String> {
    let (l, r) = match variant {
        Variant::Two => ('g', 'e'),
        _ => ('d', 'e'),
    };
    let mut names: Vec<String> = (1..=s).rev().map(|i| format!("q{i}")).collect();
    names.extend((variant.l_start()..=s).rev().map(|i| format!("{l}{i}")));
    names.extend((variant.r_start()..=s).rev().map(|i| format!("{r}{i}")));
    if variant == Variant::One {
        names.push("e0".into());
    }
    names.extend((0..=s).rev().map(|i| format!("f{i}")));
    names
}

pub(crate) fn convolve<T: Clone + Num>(a: &[T], b: &[T]) -> Vec<T> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![T::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] = out[i + j].clone() + x.clone() * y.clone();
        }
    }
    out
}

/// Coefficients `0..=4s` of the inner polynomial built from `parts`.
pub fn inner_polynomial<T: Clone + Num>(s: usize, parts: &Parts<T>) -> Vec<T> {
    let mut y = vec![T::zero(); 4 * s + 1];
    let mut acc = |offset: usize, poly: &[T]| {
        for (k, c) in poly.iter().enumerate() {
            if !c.is_zero() {
                y[offset + k] = y[offset + k].clone() + c.clone();
            }
        }
    };
    let u: Vec<T> = parts.l.iter().zip(&parts.r).map(|(a, b)| a.clone() + b.clone()).collect();
    acc(2 * s, &convolve(&parts.q, &parts.q));
    acc(s, &convolve(&parts.q, &u));
    acc(0, &convolve(&parts.l, &parts.r));
    let e0q: Vec<T> = parts.q.iter().map(|c| parts.e0.clone() * c.clone()).collect();
    acc(s, &e0q);
    acc(0, &parts.f);
    y
}

/// Reconstructed coefficients `b_0..b_m` of the (sign-normalized) polynomial
/// that `inner` and `tail` evaluate.
pub fn reconstruct<T: Clone + Num>(spec: &SchemeSpec, inner: &[T], tail: &[T]) -> Result<Vec<T>> {
    if tail.len() != spec.p {
        return Err(Error::LayoutMismatch(format!("expected {} tail coefficients, got {}", spec.p, tail.len())));
    }
    let parts = split_layout(spec.s, spec.variant, inner)?;
    let mut out: Vec<T> = tail.to_vec();
    out.extend(inner_polynomial(spec.s, &parts));
    Ok(out)
}

/// One solution of the coefficient-matching system plus the copied tail.
#[derive(Clone, Debug, PartialEq)]
pub struct CoefficientSet {
    pub variant: Variant,
    pub inner: Vec<BigComplex>,
    /// `a_j = sigma * b_j` for `j < p`.
    pub tail: Vec<BigReal>,
    pub is_real: bool,
}

/// Real coefficients in some scalar type, ready for evaluation.
#[derive(Clone, Debug, PartialEq)]
pub struct RealCoefficients<T> {
    pub inner: Vec<T>,
    pub tail: Vec<T>,
}

impl CoefficientSet {
    pub fn real_inner(&self) -> Option<Vec<BigReal>> {
        self.is_real.then(|| self.inner.iter().map(|c| c.re.clone()).collect())
    }

    pub fn real(&self) -> Option<RealCoefficients<BigReal>> {
        self.real_inner().map(|inner| RealCoefficients { inner, tail: self.tail.clone() })
    }

    /// Inner and tail coefficients rounded to the target format.
    pub fn rounded<F: TargetFloat>(&self) -> Result<RealCoefficients<F>> {
        let inner = self.real_inner().ok_or(Error::NoRealCandidates)?;
        Ok(RealCoefficients {
            inner: inner.iter().map(F::round_from).collect::<Result<_>>()?,
            tail: self.tail.iter().map(F::round_from).collect::<Result<_>>()?,
        })
    }

    pub fn complex_tail(&self) -> Vec<BigComplex> {
        self.tail.iter().map(|t| BigComplex::new(t.clone(), BigReal::zero())).collect()
    }
}
