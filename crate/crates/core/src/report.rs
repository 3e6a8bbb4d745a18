//! Versioned JSON report: echoed inputs, the chosen coefficients in target
//! format (hex floats, bit-exact) and at working precision, and every set found.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::extprec::{parse_hex_float, to_hex_float, PrecisionTarget, TargetFloat};
use crate::pipeline::Generated;
use crate::psm::ps_cost;
use crate::scheme::{layout_names, RealCoefficients, SchemeParams, SchemeSpec, Variant};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReportInputs {
    pub m: usize,
    pub precision: String,
    pub type_pol: u8,
    pub ndigits: u32,
    pub s: usize,
    pub p: usize,
    /// `b_0..b_m` as decimal strings at `ndigits`.
    pub b: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComplexSet {
    pub is_real: bool,
    pub re: Vec<String>,
    pub im: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToolReport {
    pub schema_version: u32,
    pub inputs: ReportInputs,
    /// Names of the entries of `c_prec` / `c_vpa`: the inner layout, then `a0..a{p-1}`.
    pub coefficient_names: Vec<String>,
    pub c_prec: Vec<String>,
    pub c_vpa: Vec<String>,
    pub leading_coeff_sign: i8,
    pub er_min: f64,
    pub er_min_in_u: f64,
    pub savings: i64,
    pub product_count: usize,
    pub ps_product_count: usize,
    pub n_solutions_total: usize,
    pub n_solutions_real: usize,
    pub chosen: usize,
    pub all_cvpa: Vec<ComplexSet>,
    pub warning: bool,
    pub message: String,
}

pub fn status_message(warning: bool, er_min: f64, target: PrecisionTarget) -> String {
    if warning {
        format!(
            "warning: the evaluation formulas are likely to be inaccurate (er_min = {er_min:.3e} > 10u = {:.3e})",
            10.0 * target.u
        )
    } else {
        format!("the evaluation formulas are numerically stable (er_min = {er_min:.3e} <= 10u = {:.3e})", 10.0 * target.u)
    }
}

impl ToolReport {
    pub fn from_generated(g: &Generated) -> ToolReport {
        let r = &g.report;
        let spec = g.spec;
        let nd = g.ndigits;
        let mut names = layout_names(spec.s, spec.variant);
        names.extend((0..spec.p).map(|j| format!("a{j}")));
        let c_prec = r.c_prec.inner.iter().chain(&r.c_prec.tail).map(|v| to_hex_float(*v)).collect();
        let c_vpa = r.c_vpa.inner.iter().chain(&r.c_vpa.tail).map(|v| v.to_decimal(nd)).collect();
        let all_cvpa = g
            .sets
            .iter()
            .map(|set| ComplexSet {
                is_real: set.is_real,
                re: set.inner.iter().map(|z| z.re.to_decimal(nd)).collect(),
                im: set.inner.iter().map(|z| z.im.to_decimal(nd)).collect(),
            })
            .collect();
        ToolReport {
            schema_version: SCHEMA_VERSION,
            inputs: ReportInputs {
                m: spec.m,
                precision: r.target.name().to_string(),
                type_pol: spec.variant.type_pol(),
                ndigits: nd,
                s: spec.s,
                p: spec.p,
                b: g.polynomial.coeffs.iter().map(|c| c.to_decimal(nd)).collect(),
            },
            coefficient_names: names,
            c_prec,
            c_vpa,
            leading_coeff_sign: spec.sign,
            er_min: r.er_min,
            er_min_in_u: r.er_min_in_u(),
            savings: r.savings,
            product_count: spec.params().cost(),
            ps_product_count: ps_cost(spec.m).cost,
            n_solutions_total: g.sets.len(),
            n_solutions_real: g.n_real(),
            chosen: r.chosen,
            all_cvpa,
            warning: r.warning,
            message: status_message(r.warning, r.er_min, r.target),
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Parse and check version and internal consistency.
    pub fn from_json(text: &str) -> Result<ToolReport> {
        let r: ToolReport = serde_json::from_str(text)?;
        if r.schema_version != SCHEMA_VERSION {
            return Err(Error::Report(format!(
                "unsupported schema version {} (expected {SCHEMA_VERSION})",
                r.schema_version
            )));
        }
        let spec = r.spec()?;
        let len = 4 * spec.s + 1 + spec.p;
        if r.c_prec.len() != len || r.c_vpa.len() != len || r.coefficient_names.len() != len {
            return Err(Error::Report(format!("expected {len} coefficients for s={}, p={}", spec.s, spec.p)));
        }
        if r.inputs.b.len() != spec.m + 1 {
            return Err(Error::Report(format!("expected {} polynomial coefficients", spec.m + 1)));
        }
        Ok(r)
    }

    pub fn target(&self) -> Result<PrecisionTarget> {
        PrecisionTarget::parse(&self.inputs.precision)
    }

    pub fn spec(&self) -> Result<SchemeSpec> {
        let i = &self.inputs;
        let params = SchemeParams::new(i.m, i.s)?;
        if params.p != i.p {
            return Err(Error::Report(format!("p={} inconsistent with m={}, s={}", i.p, i.m, i.s)));
        }
        if self.leading_coeff_sign != 1 && self.leading_coeff_sign != -1 {
            return Err(Error::Report("leading_coeff_sign must be 1 or -1".into()));
        }
        Ok(SchemeSpec::new(params, Variant::from_type_pol(i.type_pol)?, self.leading_coeff_sign))
    }

    /// Bit-exact target-format coefficients.
    pub fn coefficients<F: TargetFloat>(&self) -> Result<RealCoefficients<F>> {
        let spec = self.spec()?;
        let vals = self
            .c_prec
            .iter()
            .map(|h| {
                let v = parse_hex_float(h)?;
                let f = F::from_f64_exact(v);
                if f.to_f64() == v {
                    Ok(f)
                } else {
                    Err(Error::Report(format!("{h} is not representable in {}", F::TARGET.name())))
                }
            })
            .collect::<Result<Vec<F>>>()?;
        let inner_len = 4 * spec.s + 1;
        Ok(RealCoefficients { inner: vals[..inner_len].to_vec(), tail: vals[inner_len..].to_vec() })
    }
}
