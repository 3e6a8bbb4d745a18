//! Closed-form solution of the degree-8 inner problem (`s = 2`, variant 1).

use num_complex::Complex;
use num_traits::Zero;

use super::linalg::Cx;
use crate::extprec::{cabs, csqrt, BigReal, Real};
use crate::scheme::Parts;

type C = Cx<BigReal>;

fn c(x: &BigReal) -> C {
    Complex::new(x.clone(), x.constant(0.0))
}

/// Both roots of `a t^2 + b t + k`, computed without cancellation.
fn quadratic_roots(a: &C, b: &C, k: &C) -> [C; 2] {
    let four = c(&a.re.constant(4.0));
    let two = c(&a.re.constant(2.0));
    let sq = csqrt(&(b.clone() * b.clone() - four * a.clone() * k.clone()));
    let plus = b.clone() + sq.clone();
    let minus = b.clone() - sq;
    let big = if cabs(&plus) >= cabs(&minus) { plus } else { minus };
    if big.is_zero() {
        let z = c(&a.re.constant(0.0));
        return [z.clone(), z];
    }
    let m = -big / two;
    [m.clone() / a.clone(), k.clone() / m]
}

/// Parts for every branch, or `None` when `beta_7 = beta_5 = 0` and the
/// general solver must take over.
pub(crate) fn solve_s2_parts(beta: &[BigReal]) -> Option<Vec<Parts<C>>> {
    assert_eq!(beta.len(), 9);
    if beta[7].is_zero_value() && beta[5].is_zero_value() {
        return None;
    }
    let zero = beta[8].constant(0.0);
    let mut out = Vec::new();
    for sign in [1.0, -1.0] {
        let c4 = beta[8].sqrt() * beta[8].constant(sign);
        let c3 = beta[7].clone() / (c4.clone() + c4.clone());
        let u2 = (beta[6].clone() - &c3 * &c3) / c4.clone();
        let d1 = (beta[5].clone() - &c3 * &u2) / c4.clone();
        // (e2, e0, d2) triples
        let mut sols: Vec<(C, C, C)> = Vec::new();
        if !beta[7].is_zero_value() {
            let rho = c3.clone() / c4.clone();
            let qa = c(&rho);
            let qb = c(&(d1.clone() - &rho * &u2));
            let qk = c(&-(beta[3].clone() + &(&rho * &c3) * &d1 - &rho * &beta[4]));
            for e2 in quadratic_roots(&qa, &qb, &qk) {
                let d2 = c(&u2) - e2.clone();
                let e0 = (c(&(beta[4].clone() - &c3 * &d1)) - d2.clone() * e2.clone()) / c(&c4);
                sols.push((e2, e0, d2));
            }
        } else {
            let e2 = c(&(beta[3].clone() / d1.clone()));
            let d2 = c(&(beta[6].clone() / c4.clone())) - e2.clone();
            let e0 = (c(&beta[4]) - d2.clone() * e2.clone()) / c(&c4);
            sols.push((e2, e0, d2));
        }
        for (e2, e0, d2) in sols {
            let z = c(&zero);
            out.push(Parts {
                q: vec![z.clone(), c(&c3), c(&c4)],
                l: vec![z.clone(), c(&d1), d2],
                r: vec![z.clone(), z.clone(), e2],
                e0,
                f: vec![c(&beta[0]), c(&beta[1]), c(&beta[2])],
            });
        }
    }
    Some(out)
}
