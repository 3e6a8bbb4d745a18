//! Property-based checks of rounding, evaluation identities and solver soundness.

use polyeval::extprec::{parse_hex_float, parse_number, parse_number_bits, to_hex_float, BigReal, TargetFloat};
use polyeval::matrix::{evaluate_scheme, DenseMatrix};
use polyeval::pipeline::{generate, GenerateOptions};
use polyeval::psm::{ps_eval, Polynomial};
use polyeval::scheme::{reconstruct, select_params, RealCoefficients, SchemeParams, SchemeSpec, Variant};
use polyeval::solver::{InnerProblem, SolverConfig};
use proptest::prelude::*;

const BITS: u32 = 256;

fn big(v: f64) -> BigReal {
    BigReal::from_f64(v, BITS)
}

fn scalar(x: f64) -> DenseMatrix<BigReal> {
    DenseMatrix::from_rows(vec![vec![big(x)]]).unwrap()
}

fn direct_sum(coeffs: &[BigReal], x: f64) -> (BigReal, f64) {
    let mut sum = big(0.0);
    let mut mag = 0.0;
    for (i, c) in coeffs.iter().enumerate() {
        let term = c.clone() * big(x).powi(i as i32);
        mag += term.abs().to_f64();
        sum = sum + term;
    }
    (sum, mag)
}

fn variant() -> impl Strategy<Value = Variant> {
    prop_oneof![Just(Variant::One), Just(Variant::Two), Just(Variant::Three)]
}

proptest! {
    #[test]
    fn hex_float_round_trip(bits in any::<u64>()) {
        let v = f64::from_bits(bits);
        prop_assume!(v.is_finite());
        prop_assert_eq!(parse_hex_float(&to_hex_float(v)).unwrap().to_bits(), v.to_bits());
    }

    #[test]
    fn single_rounding_matches_cast(v in -1e30f64..1e30) {
        prop_assume!(v == 0.0 || v.abs() > 1e-30);
        prop_assert_eq!(f32::round_from(&big(v)).unwrap(), v as f32);
    }

    #[test]
    fn double_rounding_matches_std_parse(mant in -1.0f64..1.0, exp in -200i32..200) {
        let text = format!("{:.25e}", mant * 10f64.powi(exp));
        let ours = f64::round_from(&parse_number_bits(&text, BITS).unwrap()).unwrap();
        prop_assert_eq!(ours, text.parse::<f64>().unwrap());
    }

    #[test]
    fn decimal_print_parse_is_identity(mant in -1.0f64..1.0, exp in -50i32..50) {
        let x = parse_number(&format!("{:.20e}", mant * 10f64.powi(exp)), 32).unwrap();
        let text = x.to_decimal(32);
        prop_assert_eq!(parse_number(&text, 32).unwrap(), x.clone());
    }

    #[test]
    fn ps_eval_scalar_matches_direct_sum(
        coeffs in prop::collection::vec(-1.0f64..1.0, 2..30),
        x in -2.0f64..2.0,
        s_pick in 0usize..100,
    ) {
        let m = coeffs.len() - 1;
        let s = 1 + s_pick % m;
        let b: Vec<BigReal> = coeffs.iter().map(|c| big(*c)).collect();
        let got = ps_eval(&scalar(x), &b, s).unwrap().value.get(0, 0);
        let (want, mag) = direct_sum(&b, x);
        prop_assert!((got - want).abs().to_f64() <= 1e-60 * mag.max(1e-300));
    }

    #[test]
    fn scheme_scalar_matches_reconstruction(
        s in 2usize..5,
        p in 0usize..8,
        var in variant(),
        negative in any::<bool>(),
        seed in prop::collection::vec(-1.0f64..1.0, 30),
        x in -1.5f64..1.5,
    ) {
        let params = SchemeParams::new(4 * s + p, s).unwrap();
        let sign = if negative { -1 } else { 1 };
        let spec = SchemeSpec::new(params, var, sign);
        let n_inner = spec.inner_len();
        let inner: Vec<BigReal> = seed[..n_inner].iter().map(|v| big(*v)).collect();
        let tail: Vec<BigReal> = seed[n_inner..n_inner + p].iter().map(|v| big(*v)).collect();
        let bh = reconstruct(&spec, &inner, &tail).unwrap();
        let coeffs = RealCoefficients { inner, tail };
        let got = evaluate_scheme(&scalar(x), &spec, &coeffs).unwrap().value.get(0, 0);
        let (sum, mag) = direct_sum(&bh, x);
        let want = if negative { -sum } else { sum };
        prop_assert!((got - want).abs().to_f64() <= 1e-60 * mag.max(1e-300));
    }

    #[test]
    fn associativity_within_rounding(seed in prop::collection::vec(-1.0f64..1.0, 192)) {
        let mk = |k: usize| DenseMatrix::from_vec(8, seed[64 * k..64 * (k + 1)].to_vec()).unwrap();
        let (a, b, c) = (mk(0), mk(1), mk(2));
        let left = a.matmul(&b).unwrap().matmul(&c).unwrap();
        let right = a.matmul(&b.matmul(&c).unwrap()).unwrap();
        let diff = left.sub(&right).unwrap().norm1();
        prop_assert!(diff <= 100.0 * f64::EPSILON / 2.0 * a.norm1() * b.norm1() * c.norm1());
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 16, ..ProptestConfig::default() })]

    #[test]
    fn every_returned_set_reconstructs(
        m in prop::sample::select(vec![8usize, 10, 12, 13, 14, 16]),
        var in variant(),
        coeffs in prop::collection::vec(0.05f64..1.0, 17),
        signs in prop::collection::vec(any::<bool>(), 17),
    ) {
        let opts = GenerateOptions { variant: var, ..Default::default() };
        let bits = opts.bits().unwrap();
        let b = Polynomial {
            coeffs: (0..=m)
                .map(|i| {
                    let v = coeffs[i] * 2f64.powi(-(i as i32));
                    BigReal::from_f64(if signs[i] && i < m { -v } else { v }, bits)
                })
                .collect(),
        };
        let params = select_params(m, None).unwrap();
        let spec = SchemeSpec::new(params, var, 1);
        let cfg = SolverConfig::new(opts.digits().unwrap(), params.s);
        let problem = InnerProblem::new(spec, &b, cfg.bits()).unwrap();
        match generate(&b, &opts) {
            Ok(g) => {
                for set in &g.sets {
                    prop_assert!(problem.residual(set).unwrap() <= cfg.residual_tol);
                }
            }
            Err(polyeval::Error::NoRealCandidates) => {}
            Err(e) => prop_assert!(false, "unexpected error {e}"),
        }
    }
}
