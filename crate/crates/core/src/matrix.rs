//! Dense square matrices, counted products and the nested scheme evaluator.

use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::extprec::Real;
use crate::scheme::{split_layout, RealCoefficients, SchemeSpec};

/// Row-major square matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseMatrix<T> {
    n: usize,
    data: Vec<T>,
}

/// Matrix value plus the number of matrix-matrix products spent on it.
#[derive(Clone, Debug, PartialEq)]
pub struct EvalResult<T> {
    pub value: DenseMatrix<T>,
    pub product_count: usize,
}

impl<T: Real> DenseMatrix<T> {
    pub fn from_rows(rows: Vec<Vec<T>>) -> Result<Self> {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for row in rows {
            if row.len() != n {
                return Err(Error::NonSquare { rows: n, cols: row.len() });
            }
            data.extend(row);
        }
        if n == 0 {
            return Err(Error::Dimension("empty matrix".into()));
        }
        Ok(DenseMatrix { n, data })
    }

    pub fn from_vec(n: usize, data: Vec<T>) -> Result<Self> {
        if data.len() != n * n || n == 0 {
            return Err(Error::Dimension(format!("{} entries for a {n}x{n} matrix", data.len())));
        }
        Ok(DenseMatrix { n, data })
    }

    pub fn zeros(n: usize) -> Self {
        DenseMatrix { n, data: vec![T::zero(); n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.data[i * n + i] = T::one();
        }
        m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        self.data[i * self.n + j].clone()
    }

    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.data[i * self.n + j] = v;
    }

    pub fn data(&self) -> &[T] {
        &self.data
    }

    pub fn map<U: Real>(&self, f: impl Fn(&T) -> U) -> DenseMatrix<U> {
        DenseMatrix { n: self.n, data: self.data.iter().map(f).collect() }
    }

    fn check_dims(&self, other: &Self) -> Result<()> {
        if self.n != other.n {
            return Err(Error::Dimension(format!("{}x{} vs {}x{}", self.n, self.n, other.n, other.n)));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_dims(other)?;
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a.clone() + b.clone()).collect();
        Ok(DenseMatrix { n: self.n, data })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_dims(other)?;
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a.clone() - b.clone()).collect();
        Ok(DenseMatrix { n: self.n, data })
    }

    pub fn scaled(&self, c: &T) -> Self {
        DenseMatrix { n: self.n, data: self.data.iter().map(|a| c.clone() * a.clone()).collect() }
    }

    /// `self += c * x`.
    pub fn axpy(&mut self, c: &T, x: &Self) {
        debug_assert_eq!(self.n, x.n);
        for (a, b) in self.data.iter_mut().zip(&x.data) {
            *a = a.clone() + c.clone() * b.clone();
        }
    }

    /// `self += c * I`.
    pub fn add_diagonal(&mut self, c: &T) {
        for i in 0..self.n {
            let k = i * self.n + i;
            self.data[k] = self.data[k].clone() + c.clone();
        }
    }

    /// `self += c * pows[k]`, with `pows[0]` standing for the identity.
    pub(crate) fn add_term(&mut self, c: &T, pows: &[DenseMatrix<T>], k: usize) {
        if k == 0 {
            self.add_diagonal(c);
        } else {
            self.axpy(c, &pows[k]);
        }
    }

    /// Uncounted product in i-k-j order.
    pub fn matmul(&self, other: &Self) -> Result<Self> {
        self.check_dims(other)?;
        let n = self.n;
        let mut out = vec![T::zero(); n * n];
        for i in 0..n {
            let row = &mut out[i * n..(i + 1) * n];
            for k in 0..n {
                let aik = &self.data[i * n + k];
                let brow = &other.data[k * n..(k + 1) * n];
                for (c, b) in row.iter_mut().zip(brow) {
                    *c = c.clone() + aik.clone() * b.clone();
                }
            }
        }
        Ok(DenseMatrix { n, data: out })
    }

    /// Maximum absolute column sum.
    pub fn norm1(&self) -> T {
        let n = self.n;
        (0..n)
            .map(|j| (0..n).fold(T::zero(), |acc, i| acc + self.data[i * n + j].abs()))
            .fold(T::zero(), |a, b| if b > a { b } else { a })
    }

    /// `||self - other||_1 / ||other||_1`, or the absolute difference when
    /// `other` is zero.
    pub fn rel_diff(&self, other: &Self) -> Result<f64> {
        let d = self.sub(other)?.norm1().to_f64();
        let r = other.norm1().to_f64();
        Ok(if r == 0.0 { d } else { d / r })
    }
}

pub fn mat_mul<T: Real>(a: &DenseMatrix<T>, b: &DenseMatrix<T>) -> Result<DenseMatrix<T>> {
    a.matmul(b)
}

pub fn mat_add<T: Real>(a: &DenseMatrix<T>, b: &DenseMatrix<T>) -> Result<DenseMatrix<T>> {
    a.add(b)
}

pub fn mat_scale<T: Real>(c: &T, a: &DenseMatrix<T>) -> DenseMatrix<T> {
    a.scaled(c)
}

pub fn norm1<T: Real>(a: &DenseMatrix<T>) -> T {
    a.norm1()
}

/// Counts every explicit matrix-matrix product; no identity shortcuts.
#[derive(Debug, Default)]
pub struct ProductCounter {
    count: usize,
}

impl ProductCounter {
    pub fn count(&self) -> usize {
        self.count
    }

    pub fn mul<T: Real>(&mut self, a: &DenseMatrix<T>, b: &DenseMatrix<T>) -> Result<DenseMatrix<T>> {
        self.count += 1;
        a.matmul(b)
    }

    /// `[I, A, A^2, .., A^top]`, spending `top - 1` products.
    pub fn powers<T: Real>(&mut self, a: &DenseMatrix<T>, top: usize) -> Result<Vec<DenseMatrix<T>>> {
        let mut pows = vec![DenseMatrix::identity(a.n()), a.clone()];
        for k in 2..=top {
            let next = self.mul(&pows[k - 1], a)?;
            pows.push(next);
        }
        Ok(pows)
    }
}

/// Evaluate the nested scheme: powers, `y0`, `y1`, then the outer blocks of
/// tail coefficients, and finally the sign. Costs exactly `s + 1 + ceil(p/s)`
/// products.
pub fn evaluate_scheme<T: Real>(
    a: &DenseMatrix<T>,
    spec: &SchemeSpec,
    coeffs: &RealCoefficients<T>,
) -> Result<EvalResult<T>> {
    let s = spec.s;
    if coeffs.tail.len() != spec.p {
        return Err(Error::LayoutMismatch(format!("expected {} tail coefficients, got {}", spec.p, coeffs.tail.len())));
    }
    let parts = split_layout(s, spec.variant, &coeffs.inner)?;
    let n = a.n();
    let mut counter = ProductCounter::default();
    let pows = counter.powers(a, s)?;

    // sum of c_i A^i from the highest power down
    let lincomb = |mut acc: DenseMatrix<T>, c: &[T], lo: usize| {
        for i in (lo..=s).rev() {
            acc.add_term(&c[i], &pows, i);
        }
        acc
    };

    let inner_q = lincomb(DenseMatrix::zeros(n), &parts.q, 1);
    let y0 = counter.mul(&pows[s], &inner_q)?;
    let left = lincomb(y0.clone(), &parts.l, spec.variant.l_start());
    let right = lincomb(y0.clone(), &parts.r, spec.variant.r_start());
    let mut z = counter.mul(&left, &right)?;
    if spec.variant == crate::scheme::Variant::One {
        z.axpy(&parts.e0, &y0);
    }
    z = lincomb(z, &parts.f, 0);

    let tail = &coeffs.tail;
    let p = spec.p;
    for k in 1..=spec.t {
        z = counter.mul(&z, &pows[s])?;
        for i in 1..=s {
            z.add_term(&tail[p - (k - 1) * s - i], &pows, s - i);
        }
    }
    if spec.r > 0 {
        z = counter.mul(&z, &pows[spec.r])?;
        for j in (0..spec.r).rev() {
            z.add_term(&tail[j], &pows, j);
        }
    }
    if spec.sign < 0 {
        z = z.scaled(&(-T::one()));
    }
    Ok(EvalResult { value: z, product_count: counter.count() })
}

/// Read a square matrix from CSV (one row per line, no header).
pub fn read_csv<R: Read>(reader: R) -> Result<DenseMatrix<f64>> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(false).trim(csv::Trim::All).from_reader(reader);
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let row = rec
            .iter()
            .map(|f| f.parse::<f64>().map_err(|_| Error::Parse(format!("bad matrix entry {f:?}"))))
            .collect::<Result<Vec<_>>>()?;
        if row.iter().any(|v| !v.is_finite()) {
            return Err(Error::Parse("matrix entries must be finite".into()));
        }
        rows.push(row);
    }
    DenseMatrix::from_rows(rows)
}

pub fn read_csv_file(path: &Path) -> Result<DenseMatrix<f64>> {
    read_csv(std::fs::File::open(path)?)
}

/// Write with shortest round-trip scientific formatting.
pub fn write_csv<T: Real + std::fmt::LowerExp, W: Write>(m: &DenseMatrix<T>, writer: W) -> Result<()> {
    let mut wtr = csv::WriterBuilder::new().has_headers(false).from_writer(writer);
    for i in 0..m.n() {
        wtr.write_record((0..m.n()).map(|j| format!("{:e}", m.get(i, j))))?;
    }
    wtr.flush()?;
    Ok(())
}
