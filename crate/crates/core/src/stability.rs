//! Ranking of real coefficient sets by their reconstruction error after
//! rounding to the target format.

use crate::error::{Error, Result};
use crate::extprec::{round_to_target, BigReal, PrecisionTarget, Real};
use crate::matrix::{evaluate_scheme, DenseMatrix};
use crate::psm::Polynomial;
use crate::scheme::{reconstruct, CoefficientSet, RealCoefficients, SchemeSpec};

/// Hybrid error of one real set: `delta_i` is relative when `b_i != 0`,
/// absolute otherwise.
#[derive(Clone, Debug, PartialEq)]
pub struct SetScore {
    /// Position in the canonical solution list.
    pub index: usize,
    pub eps_max: f64,
    pub delta: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct StabilityReport {
    pub spec: SchemeSpec,
    pub target: PrecisionTarget,
    pub per_set: Vec<SetScore>,
    pub er_min: f64,
    pub chosen: usize,
    pub warning: bool,
    /// Chosen set rounded to the target (values exactly representable there).
    pub c_prec: RealCoefficients<f64>,
    /// Chosen set at working precision.
    pub c_vpa: RealCoefficients<BigReal>,
    pub leading_coeff_sign: i8,
    pub savings: i64,
    pub s: usize,
    pub p: usize,
}

fn round_all(v: &[BigReal], target: PrecisionTarget) -> Result<Vec<f64>> {
    v.iter().map(|x| round_to_target(x, target)).collect()
}

/// Score every real set; the lowest `eps_max` wins, ties to the earlier set.
pub fn assess(
    sets: &[CoefficientSet],
    b: &Polynomial,
    spec: &SchemeSpec,
    target: PrecisionTarget,
) -> Result<StabilityReport> {
    let bits = b.coeffs.iter().map(BigReal::prec).max().unwrap_or(53).max(128);
    let sigma_b: Vec<BigReal> =
        b.coeffs.iter().map(|c| if spec.sign < 0 { -c.clone() } else { c.clone() }).collect();
    let mut per_set = Vec::new();
    for (index, set) in sets.iter().enumerate() {
        let Some(exact) = set.real() else { continue };
        let rounded: Vec<BigReal> =
            round_all(&exact.inner, target)?.into_iter().map(|v| BigReal::from_f64(v, bits)).collect();
        let b_hat = reconstruct(spec, &rounded, &exact.tail)?;
        let delta: Vec<f64> = sigma_b
            .iter()
            .zip(&b_hat)
            .map(|(bi, hi)| {
                let diff = (bi.clone() - hi.clone()).abs();
                if bi.is_zero_value() {
                    diff.to_f64()
                } else {
                    (diff / bi.abs()).to_f64()
                }
            })
            .collect();
        let eps_max = delta.iter().cloned().fold(0.0, f64::max);
        per_set.push(SetScore { index, eps_max, delta });
    }
    let best = per_set
        .iter()
        .fold(None::<&SetScore>, |acc, cur| match acc {
            Some(a) if a.eps_max <= cur.eps_max => Some(a),
            _ => Some(cur),
        })
        .ok_or(Error::NoRealCandidates)?;
    let chosen = best.index;
    let er_min = best.eps_max;
    let c_vpa = sets[chosen].real().expect("scored sets are real");
    let c_prec = RealCoefficients { inner: round_all(&c_vpa.inner, target)?, tail: round_all(&c_vpa.tail, target)? };
    Ok(StabilityReport {
        spec: *spec,
        target,
        er_min,
        chosen,
        warning: er_min > 10.0 * target.u,
        c_prec,
        c_vpa,
        leading_coeff_sign: spec.sign,
        savings: spec.params().savings(),
        s: spec.s,
        p: spec.p,
        per_set,
    })
}

/// Minimum precision for scalar probes, in bits (about 77 digits).
pub const PROBE_BITS: u32 = 256;

/// Evaluate the scheme with the target-rounded coefficients at the `1x1`
/// matrix `[x]` in extended precision; relative error against `reference`.
pub fn scalar_probe(report: &StabilityReport, x: &BigReal, reference: &BigReal) -> Result<f64> {
    if reference.is_zero_value() {
        return Err(Error::InvalidArgument("scalar probe reference is zero".into()));
    }
    let bits = x.prec().max(PROBE_BITS);
    let lift = |v: &[f64]| v.iter().map(|c| BigReal::from_f64(*c, bits)).collect::<Vec<_>>();
    let coeffs = RealCoefficients { inner: lift(&report.c_prec.inner), tail: lift(&report.c_prec.tail) };
    let a = DenseMatrix::from_rows(vec![vec![x.with_prec(bits)]])?;
    let value = evaluate_scheme(&a, &report.spec, &coeffs)?.value.get(0, 0);
    Ok(((reference.clone() - value) / reference.clone()).abs().to_f64())
}

impl StabilityReport {
    pub fn chosen_score(&self) -> &SetScore {
        self.per_set.iter().find(|s| s.index == self.chosen).expect("chosen set is scored")
    }

    pub fn unit_roundoff(&self) -> f64 {
        self.target.u
    }

    /// `er_min` in multiples of the target unit roundoff.
    pub fn er_min_in_u(&self) -> f64 {
        self.er_min / self.target.u
    }

    pub fn c_prec_as<T: Real>(&self, proto: &T) -> RealCoefficients<T> {
        RealCoefficients {
            inner: self.c_prec.inner.iter().map(|v| proto.constant(*v)).collect(),
            tail: self.c_prec.tail.iter().map(|v| proto.constant(*v)).collect(),
        }
    }
}
