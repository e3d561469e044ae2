//! Value types shared by every module: node configurations, exponents, dense
//! matrices, inertia triples and the precision policy.

use std::fmt;
use std::ops::Add;

use dashu::rational::RBig;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::real::{Real, Scalar};

/// One input abscissa, either a float or an exact rational.
#[derive(Debug, Clone, PartialEq)]
pub enum PointValue {
    Float(f64),
    Exact(RBig),
}

impl From<f64> for PointValue {
    fn from(v: f64) -> Self {
        PointValue::Float(v)
    }
}

impl From<RBig> for PointValue {
    fn from(v: RBig) -> Self {
        PointValue::Exact(v)
    }
}

/// Strictly increasing positive nodes `p_1 < ... < p_n`.
///
/// When every input was rational the exact values are retained, and any
/// multiprecision evaluation starts from them rather than from the rounded
/// floats.
#[derive(Debug, Clone, PartialEq)]
pub struct PointConfig {
    points: Vec<f64>,
    exact: Option<Vec<RBig>>,
}

impl PointConfig {
    /// Validates and builds a configuration. Inputs must already be sorted.
    pub fn new(values: &[PointValue]) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptyPoints);
        }
        let mut points = Vec::with_capacity(values.len());
        let mut exact = Vec::with_capacity(values.len());
        let mut all_exact = true;
        for (index, v) in values.iter().enumerate() {
            let f = match v {
                PointValue::Float(f) => {
                    all_exact = false;
                    *f
                }
                PointValue::Exact(q) => {
                    exact.push(q.clone());
                    q.to_f64().value()
                }
            };
            if !f.is_finite() {
                return Err(Error::NonFinitePoint { index });
            }
            let positive = match v {
                PointValue::Exact(q) => Scalar::sign(q) > 0,
                PointValue::Float(f) => *f > 0.0,
            };
            if !positive {
                return Err(Error::NonPositivePoint { index, value: f });
            }
            points.push(f);
        }
        for i in 1..values.len() {
            let ord = match (&values[i - 1], &values[i]) {
                (PointValue::Exact(a), PointValue::Exact(b)) => a.partial_cmp(b),
                _ => points[i - 1].partial_cmp(&points[i]),
            };
            match ord {
                Some(std::cmp::Ordering::Less) => {}
                Some(std::cmp::Ordering::Equal) => return Err(Error::DuplicatePoint { index: i }),
                _ => return Err(Error::NotIncreasing { index: i }),
            }
        }
        // exact rationals that collide after rounding would break the float path
        if points.windows(2).any(|w| w[0] >= w[1]) {
            let index = points.windows(2).position(|w| w[0] >= w[1]).unwrap() + 1;
            return Err(Error::DuplicatePoint { index });
        }
        Ok(PointConfig {
            points,
            exact: all_exact.then_some(exact),
        })
    }

    pub fn from_f64s(values: &[f64]) -> Result<Self> {
        let v: Vec<PointValue> = values.iter().map(|&x| PointValue::Float(x)).collect();
        Self::new(&v)
    }

    pub fn from_ratios(values: &[RBig]) -> Result<Self> {
        let v: Vec<PointValue> = values.iter().cloned().map(PointValue::Exact).collect();
        Self::new(&v)
    }

    /// Integer nodes, always exact.
    pub fn from_ints(values: &[i64]) -> Result<Self> {
        let v: Vec<RBig> = values.iter().map(|&x| RBig::from_i64(x, 0)).collect();
        Self::from_ratios(&v)
    }

    pub fn n(&self) -> usize {
        self.points.len()
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn exact(&self) -> Option<&[RBig]> {
        self.exact.as_deref()
    }

    /// Exact values if present, otherwise the exact dyadic value of each float.
    pub fn exact_or_dyadic(&self) -> Vec<RBig> {
        match &self.exact {
            Some(e) => e.clone(),
            None => self
                .points
                .iter()
                .map(|&p| RBig::try_from(p).expect("finite point"))
                .collect(),
        }
    }

    /// Copy carrying an exact representation (dyadic values for float input).
    pub fn with_exact(&self) -> PointConfig {
        PointConfig {
            points: self.points.clone(),
            exact: Some(self.exact_or_dyadic()),
        }
    }

    /// Node `i` at `bits` of precision.
    pub fn point<R: Real>(&self, i: usize, bits: u32) -> R {
        match &self.exact {
            Some(e) => R::from_ratio(&e[i], bits),
            None => R::from_f64(self.points[i], bits),
        }
    }

    pub fn points_as<R: Real>(&self, bits: u32) -> Vec<R> {
        (0..self.n()).map(|i| self.point(i, bits)).collect()
    }

    /// Leading `m` nodes.
    pub fn prefix(&self, m: usize) -> PointConfig {
        PointConfig {
            points: self.points[..m].to_vec(),
            exact: self.exact.as_ref().map(|e| e[..m].to_vec()),
        }
    }

    /// Every node multiplied by `c > 0` (float only).
    pub fn scaled(&self, c: f64) -> Result<PointConfig> {
        let v: Vec<f64> = self.points.iter().map(|p| p * c).collect();
        PointConfig::from_f64s(&v)
    }
}

/// Real exponent `r`, with its integer value recorded when it is one exactly.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Exponent {
    r: f64,
    integer: Option<i64>,
}

impl Exponent {
    pub fn new(r: f64) -> Self {
        let integer = (r.is_finite() && r == r.round() && r.abs() < 9.0e15).then_some(r as i64);
        Exponent { r, integer }
    }

    pub fn value(&self) -> f64 {
        self.r
    }

    pub fn is_integer(&self) -> bool {
        self.integer.is_some()
    }

    pub fn integer_value(&self) -> Option<i64> {
        self.integer
    }
}

impl From<f64> for Exponent {
    fn from(r: f64) -> Self {
        Exponent::new(r)
    }
}

/// Dense row-major matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Clone> Matrix<T> {
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        if let Some(bad) = rows.iter().find(|row| row.len() != c) {
            return Err(Error::DimensionMismatch {
                expected: c,
                found: bad.len(),
            });
        }
        Ok(Matrix {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &T {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<T>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Matrix<T> {
        Matrix::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn map<U: Clone>(&self, f: impl Fn(&T) -> U) -> Matrix<U> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    /// Submatrix on the given row and column index sets.
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> Matrix<T> {
        Matrix::from_fn(rows.len(), cols.len(), |i, j| self.get(rows[i], cols[j]).clone())
    }
}

impl<T: Scalar> Matrix<T> {
    pub fn matmul(&self, other: &Matrix<T>) -> Result<Matrix<T>> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                found: other.rows,
            });
        }
        let zero = self.data.first().map(|x| x.clone() - x.clone());
        Ok(Matrix::from_fn(self.rows, other.cols, |i, j| {
            let mut acc = zero.clone().expect("nonempty");
            for k in 0..self.cols {
                acc = acc + self.get(i, k).clone() * other.get(k, j).clone();
            }
            acc
        }))
    }

    pub fn max_abs(&self) -> Option<T> {
        self.data.iter().map(Scalar::abs).reduce(crate::real::max_of)
    }
}

impl<T: Real> Matrix<T> {
    pub fn frobenius(&self) -> T {
        let bits = self.data.first().map_or(53, Real::bits);
        self.data
            .iter()
            .fold(T::from_i64(0, bits), |acc, x| acc + x.clone() * x.clone())
            .sqrt()
    }
}

impl<T: Scalar> Matrix<T> {
    pub fn to_f64(&self) -> Matrix<f64> {
        self.map(Scalar::approx_f64)
    }
}

/// Square symmetric matrix. Constructors only evaluate the upper triangle and
/// mirror it, so symmetry is exact.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix<T>(Matrix<T>);

impl<T: Clone> SymMatrix<T> {
    pub fn from_upper(n: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut upper: Vec<Option<T>> = vec![None; n * n];
        for i in 0..n {
            for j in i..n {
                upper[i * n + j] = Some(f(i, j));
            }
        }
        SymMatrix(Matrix::from_fn(n, n, |i, j| {
            let (a, b) = if i <= j { (i, j) } else { (j, i) };
            upper[a * n + b].clone().expect("upper entry")
        }))
    }

    /// Wraps a square matrix after checking exact symmetry.
    pub fn try_from_matrix(m: Matrix<T>) -> Result<Self>
    where
        T: PartialEq,
    {
        if m.rows() != m.cols() {
            return Err(Error::DimensionMismatch {
                expected: m.rows(),
                found: m.cols(),
            });
        }
        for i in 0..m.rows() {
            for j in 0..i {
                if m.get(i, j) != m.get(j, i) {
                    return Err(Error::Precondition(format!("matrix not symmetric at ({i},{j})")));
                }
            }
        }
        Ok(SymMatrix(m))
    }

    /// Symmetrizes by copying the upper triangle.
    pub fn from_matrix_upper(m: &Matrix<T>) -> Self {
        SymMatrix::from_upper(m.rows(), |i, j| m.get(i, j).clone())
    }

    pub fn order(&self) -> usize {
        self.0.rows()
    }

    pub fn get(&self, i: usize, j: usize) -> &T {
        self.0.get(i, j)
    }

    pub fn as_matrix(&self) -> &Matrix<T> {
        &self.0
    }

    pub fn into_matrix(self) -> Matrix<T> {
        self.0
    }

    pub fn map<U: Clone>(&self, f: impl Fn(&T) -> U) -> SymMatrix<U> {
        SymMatrix(self.0.map(f))
    }

    pub fn principal(&self, idx: &[usize]) -> SymMatrix<T> {
        SymMatrix(self.0.select(idx, idx))
    }
}

impl<T: Scalar> SymMatrix<T> {
    pub fn to_f64(&self) -> SymMatrix<f64> {
        self.map(Scalar::approx_f64)
    }

    pub fn identity(n: usize, bits: u32) -> Self {
        SymMatrix::from_upper(n, |i, j| T::from_i64((i == j) as i64, bits))
    }

    pub fn diagonal(d: &[T]) -> Self {
        let zero = d[0].clone() - d[0].clone();
        SymMatrix::from_upper(d.len(), |i, j| if i == j { d[i].clone() } else { zero.clone() })
    }

    /// `Xᵀ A X` for a rectangular `X`.
    pub fn congruence(&self, x: &Matrix<T>) -> Result<SymMatrix<T>> {
        let ax = self.0.matmul(x)?;
        let full = x.transpose().matmul(&ax)?;
        Ok(SymMatrix::from_matrix_upper(&full))
    }
}

/// The triple (π, ζ, ν) of positive, zero and negative eigenvalue counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize)]
pub struct Inertia {
    pub pos: usize,
    pub zero: usize,
    pub neg: usize,
}

impl Inertia {
    pub const fn new(pos: usize, zero: usize, neg: usize) -> Self {
        Inertia { pos, zero, neg }
    }

    pub fn order(&self) -> usize {
        self.pos + self.zero + self.neg
    }

    /// Inertia of the negated matrix: (ν, ζ, π).
    pub fn reflect(&self) -> Inertia {
        Inertia::new(self.neg, self.zero, self.pos)
    }

    pub fn is_nonsingular(&self) -> bool {
        self.zero == 0
    }
}

impl Add for Inertia {
    type Output = Inertia;
    fn add(self, o: Inertia) -> Inertia {
        Inertia::new(self.pos + o.pos, self.zero + o.zero, self.neg + o.neg)
    }
}

impl fmt::Display for Inertia {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.pos, self.zero, self.neg)
    }
}

/// Working precision and the thresholds derived from it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ToleranceContext {
    pub precision_bits: u32,
    /// Eigenvalue `λ` counts as zero when `|λ| ≤ zero_rel_tol · n · max|λ|`.
    pub zero_rel_tol: f64,
    /// Relative residual accepted by identity and convergence checks.
    pub residual_tol: f64,
    pub grid_points: usize,
}

pub const DEFAULT_BITS: u32 = 53;
pub const EXTENDED_BITS: u32 = 256;

impl ToleranceContext {
    /// Defaults for a mantissa width: thresholds shrink by one binary order per
    /// extra bit beyond double precision.
    pub fn for_bits(bits: u32) -> Self {
        let shrink = 2f64.powi(-(bits.saturating_sub(DEFAULT_BITS) as i32));
        ToleranceContext {
            precision_bits: bits.max(DEFAULT_BITS),
            zero_rel_tol: 1e-10 * shrink,
            residual_tol: 1e-12 * shrink,
            grid_points: 100_000,
        }
    }

    pub fn extended() -> Self {
        Self::for_bits(EXTENDED_BITS)
    }

    pub fn validate(&self) -> Result<()> {
        if self.precision_bits < DEFAULT_BITS {
            return Err(Error::InvalidTolerance(format!(
                "precision_bits {} below {DEFAULT_BITS}",
                self.precision_bits
            )));
        }
        if !(self.zero_rel_tol > 0.0) {
            return Err(Error::InvalidTolerance("zero_rel_tol must be positive".into()));
        }
        if !(self.residual_tol > 0.0) {
            return Err(Error::InvalidTolerance("residual_tol must be positive".into()));
        }
        Ok(())
    }

    pub fn is_extended(&self) -> bool {
        self.precision_bits > DEFAULT_BITS
    }

    /// Same policy at a different precision, keeping the grid resolution.
    pub fn at_bits(&self, bits: u32) -> Self {
        ToleranceContext {
            grid_points: self.grid_points,
            ..Self::for_bits(bits)
        }
    }
}

impl Default for ToleranceContext {
    fn default() -> Self {
        Self::for_bits(DEFAULT_BITS)
    }
}
