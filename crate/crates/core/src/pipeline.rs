//! End-to-end selection: validate, normalize the sign, pick the block size,
//! solve, and rank.

use crate::error::{Error, Result};
use crate::extprec::{PrecisionTarget, MIN_DIGITS};
use crate::psm::Polynomial;
use crate::scheme::{is_refused_degree, select_params, CoefficientSet, SchemeSpec, Variant};
use crate::solver::{solve, working_bits, InnerProblem, SolverConfig};
use crate::stability::{assess, StabilityReport};

#[derive(Clone, Debug, PartialEq)]
pub struct GenerateOptions {
    pub target: PrecisionTarget,
    pub variant: Variant,
    /// Defaults to 32 digits for double, 16 for single.
    pub ndigits: Option<u32>,
    pub s: Option<usize>,
    pub seed: u64,
}

impl Default for GenerateOptions {
    fn default() -> Self {
        GenerateOptions { target: PrecisionTarget::DOUBLE, variant: Variant::One, ndigits: None, s: None, seed: 0 }
    }
}

impl GenerateOptions {
    pub fn digits(&self) -> Result<u32> {
        let nd = self.ndigits.unwrap_or_else(|| self.target.default_digits());
        if nd < MIN_DIGITS {
            return Err(Error::InvalidDigits(nd));
        }
        Ok(nd)
    }

    /// Working precision used to parse coefficients before calling [`generate`].
    pub fn bits(&self) -> Result<u32> {
        Ok(working_bits(self.digits()?))
    }
}

#[derive(Clone, Debug)]
pub struct Generated {
    pub polynomial: Polynomial,
    pub spec: SchemeSpec,
    pub ndigits: u32,
    pub sets: Vec<CoefficientSet>,
    pub report: StabilityReport,
}

impl Generated {
    pub fn n_real(&self) -> usize {
        self.sets.iter().filter(|s| s.is_real).count()
    }
}

/// Degree gate, then the leading-coefficient check, then sign normalization.
pub fn validate(b: &Polynomial) -> Result<i8> {
    let m = b.degree();
    if is_refused_degree(m) {
        return Err(Error::RecommendPs { m });
    }
    let lead = b.leading();
    if lead.is_zero_value() {
        return Err(Error::LeadingCoefficientZero);
    }
    Ok(if lead.is_sign_negative() { -1 } else { 1 })
}

pub fn generate(b: &Polynomial, opts: &GenerateOptions) -> Result<Generated> {
    let ndigits = opts.digits()?;
    let sign = validate(b)?;
    let params = select_params(b.degree(), opts.s)?;
    let spec = SchemeSpec::new(params, opts.variant, sign);
    let mut cfg = SolverConfig::new(ndigits, params.s);
    cfg.rng_seed = opts.seed;
    let problem = InnerProblem::new(spec, b, cfg.bits())?;
    let sets = solve(&problem, &cfg)?;
    let report = assess(&sets, b, &spec, opts.target)?;
    Ok(Generated { polynomial: b.clone(), spec, ndigits, sets, report })
}
