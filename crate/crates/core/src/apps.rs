//! Coefficient generators, the Westreich geometric-series formulas and a
//! seeded test-matrix gallery.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rug::{Integer, Rational};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::extprec::{BigReal, Real};
use crate::matrix::{DenseMatrix, EvalResult, ProductCounter};
use crate::psm::Polynomial;

/// `b_i = 1/i!`, each correctly rounded from the exact rational.
pub fn exp_taylor_coeffs(m: usize, bits: u32) -> Polynomial {
    let mut fact = Integer::from(1);
    let coeffs = (0..=m)
        .map(|i| {
            if i > 0 {
                fact *= i as u32;
            }
            BigReal::from_rational(&Rational::from((Integer::from(1), fact.clone())), bits)
        })
        .collect();
    Polynomial { coeffs }
}

/// `"1/i!"` as exact rational strings, `i = 0..=m`.
pub fn exp_taylor_strings(m: usize) -> Vec<String> {
    let mut fact = Integer::from(1);
    (0..=m)
        .map(|i| {
            if i > 0 {
                fact *= i as u32;
            }
            format!("1/{fact}")
        })
        .collect()
}

/// All-ones coefficients of `I + A + .. + A^{n-1}`.
pub fn geometric_coeffs(n: usize, bits: u32) -> Result<Polynomial> {
    if n == 0 {
        return Err(Error::InvalidArgument("geometric series needs at least one term".into()));
    }
    Ok(Polynomial { coeffs: vec![BigReal::from_i64(1, bits); n] })
}

/// Factored evaluations of `Psi(N, A)` for `N` in `{9, 13, 17}` with 4, 5 and
/// 6 products.
pub fn westreich_eval<T: Real>(a: &DenseMatrix<T>, n_terms: usize) -> Result<EvalResult<T>> {
    if !matches!(n_terms, 9 | 13 | 17) {
        return Err(Error::InvalidArgument(format!("Westreich formulas exist for N = 9, 13, 17, not {n_terms}")));
    }
    let one = a.get(0, 0).constant(1.0);
    let mut counter = ProductCounter::default();
    let a2 = counter.mul(a, a)?;
    let a4 = counter.mul(&a2, &a2)?;
    let mut i_a2 = a2.clone();
    i_a2.add_diagonal(&one);
    let a_a2 = a.add(&a2)?;
    let mut acc = counter.mul(&i_a2, &a_a2)?;
    let mut i_a4 = a4.clone();
    i_a4.add_diagonal(&one);
    match n_terms {
        9 => acc = counter.mul(&acc, &i_a4)?,
        13 => {
            let a8 = counter.mul(&a4, &a4)?;
            acc = counter.mul(&acc, &i_a4.add(&a8)?)?;
        }
        _ => {
            let mut i_a8 = counter.mul(&a4, &a4)?;
            i_a8.add_diagonal(&one);
            acc = counter.mul(&acc, &i_a4)?;
            acc = counter.mul(&acc, &i_a8)?;
        }
    }
    acc.add_diagonal(&one);
    Ok(EvalResult { value: acc, product_count: counter.count() })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    /// Entries uniform on `[0, 1)`.
    Uniform01,
    /// `(B + B^T) / 2`, `B` uniform on `[-1, 1)`.
    Symmetric,
    /// `0.9 I + N`, `N` the unit superdiagonal.
    JordanBlock,
    /// Strictly upper triangular band of width 3.
    NilpotentBand,
    /// Uniform on `[-1, 1)` rescaled to unit 1-norm.
    ScaledRandom,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TestMatrixSpec {
    pub family: Family,
    pub n: usize,
    pub seed: u64,
}

pub const JORDAN_EIGENVALUE: f64 = 0.9;

pub fn gallery(spec: TestMatrixSpec) -> Result<DenseMatrix<f64>> {
    let n = spec.n;
    if n < 1 {
        return Err(Error::Dimension("gallery matrices need n >= 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut m = DenseMatrix::zeros(n);
    match spec.family {
        Family::Uniform01 => {
            for i in 0..n {
                for j in 0..n {
                    m.set(i, j, rng.random::<f64>());
                }
            }
        }
        Family::Symmetric => {
            for i in 0..n {
                for j in 0..=i {
                    let v = rng.random_range(-1.0..1.0);
                    m.set(i, j, v);
                    m.set(j, i, v);
                }
            }
        }
        Family::JordanBlock => {
            for i in 0..n {
                m.set(i, i, JORDAN_EIGENVALUE);
                if i + 1 < n {
                    m.set(i, i + 1, 1.0);
                }
            }
        }
        Family::NilpotentBand => {
            for i in 0..n {
                for j in i + 1..n.min(i + 4) {
                    m.set(i, j, rng.random_range(-1.0..1.0));
                }
            }
        }
        Family::ScaledRandom => {
            for i in 0..n {
                for j in 0..n {
                    m.set(i, j, rng.random_range(-1.0..1.0));
                }
            }
            let norm = m.norm1();
            if norm > 0.0 {
                m = m.scaled(&(1.0 / norm));
            }
        }
    }
    Ok(m)
}

/// Uniform `[0, 1)` matrix as used by the geometric-series benchmark.
pub fn uniform01(n: usize, rng: &mut ChaCha8Rng) -> DenseMatrix<f64> {
    let data = (0..n * n).map(|_| rng.random::<f64>()).collect();
    DenseMatrix::from_vec(n, data).expect("n >= 1")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::psm::ps_eval;

    #[test]
    fn exp_coefficients() {
        let p = exp_taylor_coeffs(2, 128);
        assert_eq!(p.coeffs[2].to_f64(), 0.5);
        assert_eq!(exp_taylor_strings(28)[28], "1/304888344611713860501504000000");
        let p = exp_taylor_coeffs(28, 200);
        let sum = p.coeffs.iter().fold(BigReal::from_f64(0.0, 200), |a, c| a + c.clone());
        let e = BigReal::from_f64(1.0, 200).exp();
        assert!(((sum - e.clone()) / e).abs().to_f64() < 1e-29);
    }

    #[test]
    fn geometric_coefficients() {
        assert_eq!(geometric_coeffs(1, 64).unwrap().coeffs.len(), 1);
        let p = geometric_coeffs(13, 128).unwrap();
        assert_eq!(p.degree(), 12);
        let x = 0.5f64;
        let coeffs: Vec<f64> = p.coeffs.iter().map(|c| c.to_f64()).collect();
        let v = Polynomial::horner(&coeffs, &x);
        assert!((v - (x.powi(13) - 1.0) / (x - 1.0)).abs() < 1e-15);
        assert!(geometric_coeffs(0, 64).is_err());
    }

    #[test]
    fn westreich_counts_and_values() {
        let one = DenseMatrix::from_rows(vec![vec![1.0]]).unwrap();
        let r = westreich_eval(&one, 9).unwrap();
        assert_eq!((r.value.get(0, 0), r.product_count), (9.0, 4));
        assert_eq!(westreich_eval(&one, 13).unwrap().product_count, 5);
        assert_eq!(westreich_eval(&one, 17).unwrap().product_count, 6);
        assert!(westreich_eval(&one, 10).is_err());
        let x = 0.3f64;
        let a = DenseMatrix::from_rows(vec![vec![x]]).unwrap();
        let v = westreich_eval(&a, 13).unwrap().value.get(0, 0);
        let want = (x.powi(13) - 1.0) / (x - 1.0);
        assert!((v - want).abs() <= 10.0 * f64::EPSILON / 2.0 * want);
    }

    #[test]
    fn westreich_matches_ps_on_gallery() {
        for n_terms in [9, 13, 17] {
            let a = gallery(TestMatrixSpec { family: Family::ScaledRandom, n: 6, seed: 3 }).unwrap();
            let w = westreich_eval(&a, n_terms).unwrap().value;
            let ps = ps_eval(&a, &vec![1.0; n_terms], 4).unwrap().value;
            assert!(w.rel_diff(&ps).unwrap() < 50.0 * f64::EPSILON);
        }
    }

    #[test]
    fn gallery_properties() {
        let spec = TestMatrixSpec { family: Family::Uniform01, n: 100, seed: 0 };
        assert_eq!(gallery(spec).unwrap(), gallery(spec).unwrap());
        let j = gallery(TestMatrixSpec { family: Family::JordanBlock, n: 4, seed: 1 }).unwrap();
        for i in 0..4 {
            for k in 0..4 {
                let want = if i == k { 0.9 } else if k == i + 1 { 1.0 } else { 0.0 };
                assert_eq!(j.get(i, k), want);
            }
        }
        let nb = gallery(TestMatrixSpec { family: Family::NilpotentBand, n: 8, seed: 2 }).unwrap();
        let mut p = nb.clone();
        for _ in 1..8 {
            p = p.matmul(&nb).unwrap();
        }
        assert!(p.data().iter().all(|v| *v == 0.0));
        let s = gallery(TestMatrixSpec { family: Family::Symmetric, n: 5, seed: 4 }).unwrap();
        assert!((0..5).all(|i| (0..5).all(|k| s.get(i, k) == s.get(k, i))));
        let sr = gallery(TestMatrixSpec { family: Family::ScaledRandom, n: 8, seed: 5 }).unwrap();
        assert!((sr.norm1() - 1.0).abs() < 1e-12);
        assert!(gallery(TestMatrixSpec { family: Family::Symmetric, n: 0, seed: 0 }).is_err());
    }
}
