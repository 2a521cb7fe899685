//! Dense order-4 tensors over `(C^d)^4`, the three balanced flattenings and
//! their inverses, and the JSON tensor format.
//!
//! Coefficients are stored a-major: the tuple `(a, b, c, e)` (0-based) lives
//! at `a*d^3 + b*d^2 + c*d + e`. Kets such as `|1123>` are
//! 1-based; [`parse_ket`] converts them.

use std::fmt;
use std::fs;
use std::path::Path;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// 0-based multi-index `(a, b, c, e)`.
pub type Index4 = [usize; 4];

pub fn linearize(d: usize, idx: Index4) -> usize {
    ((idx[0] * d + idx[1]) * d + idx[2]) * d + idx[3]
}

pub fn delinearize(d: usize, mut lin: usize) -> Index4 {
    let e = lin % d;
    lin /= d;
    let c = lin % d;
    lin /= d;
    let b = lin % d;
    [lin / d, b, c, e]
}

/// Parses a 1-based ket label such as `"1123"` into a 0-based index.
/// Only single-digit slots are supported, so `d <= 9`.
pub fn parse_ket(label: &str) -> Option<Index4> {
    let digits: Vec<usize> = label
        .chars()
        .map(|ch| ch.to_digit(10).map(|v| v as usize))
        .collect::<Option<_>>()?;
    match digits.as_slice() {
        [a, b, c, e] if digits.iter().all(|&v| v >= 1) => Some([a - 1, b - 1, c - 1, e - 1]),
        _ => None,
    }
}

/// Formats a 0-based index as a 1-based ket label.
pub fn ket_label(idx: Index4) -> String {
    idx.iter()
        .map(|v| (v + 1).to_string())
        .collect::<Vec<_>>()
        .join(if idx.iter().any(|&v| v >= 9) { "," } else { "" })
}

#[derive(Clone, Debug, PartialEq)]
pub struct Tensor4 {
    d: usize,
    coeffs: Vec<Complex64>,
}

impl Tensor4 {
    pub fn new(d: usize, coeffs: Vec<Complex64>) -> Result<Self> {
        if d < 2 {
            return Err(Error::InvalidDimension(d));
        }
        let expected = d.pow(4);
        if coeffs.len() != expected {
            return Err(Error::LengthMismatch {
                expected,
                found: coeffs.len(),
            });
        }
        if let Some(pos) = coeffs
            .iter()
            .position(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(Error::NonFinite(pos));
        }
        Ok(Self { d, coeffs })
    }

    pub fn zeros(d: usize) -> Self {
        assert!(d >= 2, "local dimension must be at least 2");
        Self {
            d,
            coeffs: vec![Complex64::new(0.0, 0.0); d.pow(4)],
        }
    }

    /// Builds a tensor from `(index, value)` pairs; repeated indices add up.
    pub fn from_entries<I>(d: usize, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Index4, Complex64)>,
    {
        let mut t = Self::zeros(d);
        for (idx, z) in entries {
            if idx.iter().any(|&v| v >= d) {
                return Err(Error::MalformedTensor(format!(
                    "index {idx:?} out of range for d={d}"
                )));
            }
            t.coeffs[linearize(d, idx)] += z;
        }
        Self::new(d, t.coeffs)
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Complex64> {
        self.coeffs
    }

    pub fn get(&self, idx: Index4) -> Complex64 {
        self.coeffs[linearize(self.d, idx)]
    }

    pub fn set(&mut self, idx: Index4, value: Complex64) {
        let lin = linearize(self.d, idx);
        self.coeffs[lin] = value;
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self {
            d: self.d,
            coeffs: self.coeffs.iter().map(|z| z * factor).collect(),
        }
    }

    /// `self + factor * other`.
    pub fn axpy(&self, factor: Complex64, other: &Self) -> Self {
        assert_eq!(
            self.d, other.d,
            "axpy on tensors of different local dimension"
        );
        Self {
            d: self.d,
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a + factor * b)
                .collect(),
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn norm_sqr(&self) -> f64 {
        self.coeffs.iter().map(|z| z.norm_sqr()).sum()
    }

    /// Linear indices of entries with modulus above `tol`.
    pub fn support(&self, tol: f64) -> Vec<usize> {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, z)| z.norm() > tol)
            .map(|(i, _)| i)
            .collect()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|z| z.re == 0.0 && z.im == 0.0)
    }
}

/// Sum of two tensors of equal local dimension.
impl std::ops::Add<&Tensor4> for &Tensor4 {
    type Output = Tensor4;

    fn add(self, rhs: &Tensor4) -> Tensor4 {
        self.axpy(Complex64::new(1.0, 0.0), rhs)
    }
}

impl std::ops::Sub<&Tensor4> for &Tensor4 {
    type Output = Tensor4;

    fn sub(self, rhs: &Tensor4) -> Tensor4 {
        self.axpy(Complex64::new(-1.0, 0.0), rhs)
    }
}

/// Which balanced bipartition a flattening realizes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum FlatteningId {
    /// `(A⊗B) × (C⊗D)`
    F1,
    /// `(A⊗C) × (B⊗D)`
    F2,
    /// `(A⊗D) × (C⊗B)`; the column space is C⊗B in that order.
    F3,
}

impl FlatteningId {
    pub const ALL: [FlatteningId; 3] = [FlatteningId::F1, FlatteningId::F2, FlatteningId::F3];

    /// Row and column of the tuple `(a, b, c, e)` in the `d^2 × d^2` flattening.
    pub fn position(self, d: usize, [a, b, c, e]: Index4) -> (usize, usize) {
        match self {
            FlatteningId::F1 => (a * d + b, c * d + e),
            FlatteningId::F2 => (a * d + c, b * d + e),
            FlatteningId::F3 => (a * d + e, c * d + b),
        }
    }

    /// Inverse of [`FlatteningId::position`].
    pub fn tensor_index(self, d: usize, row: usize, col: usize) -> Index4 {
        let (r0, r1, c0, c1) = (row / d, row % d, col / d, col % d);
        match self {
            FlatteningId::F1 => [r0, r1, c0, c1],
            FlatteningId::F2 => [r0, c0, r1, c1],
            FlatteningId::F3 => [r0, c1, c0, r1],
        }
    }

    /// Parses a subset written as digits, e.g. `"123"` or `"13"`.
    pub fn parse_subset(spec: &str) -> Result<Vec<FlatteningId>> {
        let mut out = Vec::new();
        for ch in spec.chars() {
            let f = match ch {
                '1' => FlatteningId::F1,
                '2' => FlatteningId::F2,
                '3' => FlatteningId::F3,
                _ => {
                    return Err(Error::InvalidConfig(format!(
                        "bad flattening subset `{spec}`"
                    )))
                }
            };
            if !out.contains(&f) {
                out.push(f);
            }
        }
        if out.is_empty() {
            return Err(Error::EmptyFlatteningSubset);
        }
        out.sort();
        Ok(out)
    }
}

impl fmt::Display for FlatteningId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            FlatteningId::F1 => "F1",
            FlatteningId::F2 => "F2",
            FlatteningId::F3 => "F3",
        };
        f.write_str(s)
    }
}

/// Dense row-major complex matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            entries: vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.entries[i * n + i] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_row_major(rows: usize, cols: usize, entries: Vec<Complex64>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::LengthMismatch {
                expected: rows * cols,
                found: entries.len(),
            });
        }
        Ok(Self {
            rows,
            cols,
            entries,
        })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut entries = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                entries.push(f(r, c));
            }
        }
        Self {
            rows,
            cols,
            entries,
        }
    }

    pub fn diagonal(values: &[Complex64]) -> Self {
        let n = values.len();
        let mut m = Self::zeros(n, n);
        for (i, v) in values.iter().enumerate() {
            m.entries[i * n + i] = *v;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn get(&self, r: usize, c: usize) -> Complex64 {
        self.entries[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: Complex64) {
        self.entries[r * self.cols + c] = v;
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self.get(c, r).conj())
    }

    pub fn matmul(&self, rhs: &Self) -> Self {
        assert_eq!(self.cols, rhs.rows, "matmul shape mismatch");
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.entries[i * self.cols + k];
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                let rhs_row = &rhs.entries[k * rhs.cols..(k + 1) * rhs.cols];
                let out_row = &mut out.entries[i * rhs.cols..(i + 1) * rhs.cols];
                for (o, b) in out_row.iter_mut().zip(rhs_row) {
                    *o += a * b;
                }
            }
        }
        out
    }

    pub fn add(&self, rhs: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Self {
            rows: self.rows,
            cols: self.cols,
            entries: self
                .entries
                .iter()
                .zip(&rhs.entries)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Self {
            rows: self.rows,
            cols: self.cols,
            entries: self
                .entries
                .iter()
                .zip(&rhs.entries)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|z| z * factor).collect(),
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// `max |M M† − I|`.
    pub fn unitarity_residual(&self) -> f64 {
        if self.rows != self.cols {
            return f64::INFINITY;
        }
        self.matmul(&self.adjoint())
            .sub(&Self::identity(self.rows))
            .max_abs()
    }

    /// `max |M + M†|`.
    pub fn skew_hermitian_residual(&self) -> f64 {
        if self.rows != self.cols {
            return f64::INFINITY;
        }
        self.add(&self.adjoint()).max_abs()
    }

    /// Exactly one entry per row and column equal to 1 (within `tol`), all
    /// others within `tol` of 0.
    pub fn is_permutation(&self, tol: f64) -> bool {
        if self.rows != self.cols {
            return false;
        }
        let n = self.rows;
        let mut col_hits = vec![0usize; n];
        for r in 0..n {
            let mut row_hits = 0;
            for c in 0..n {
                let z = self.get(r, c);
                if (z - Complex64::new(1.0, 0.0)).norm() <= tol {
                    row_hits += 1;
                    col_hits[c] += 1;
                } else if z.norm() > tol {
                    return false;
                }
            }
            if row_hits != 1 {
                return false;
            }
        }
        col_hits.iter().all(|&h| h == 1)
    }

    pub fn to_nalgebra(&self) -> DMatrix<Complex64> {
        DMatrix::from_row_slice(self.rows, self.cols, &self.entries)
    }

    pub fn from_nalgebra(m: &DMatrix<Complex64>) -> Self {
        Self::from_fn(m.nrows(), m.ncols(), |r, c| m[(r, c)])
    }
}

/// Reshapes `t` into the `d^2 × d^2` matrix of flattening `f`.
pub fn flatten(t: &Tensor4, f: FlatteningId) -> ComplexMatrix {
    let d = t.d;
    let n = d * d;
    let mut m = ComplexMatrix::zeros(n, n);
    for (lin, z) in t.coeffs.iter().enumerate() {
        let (r, c) = f.position(d, delinearize(d, lin));
        m.entries[r * n + c] = *z;
    }
    m
}

/// Inverse of [`flatten`].
pub fn unflatten(m: &ComplexMatrix, f: FlatteningId, d: usize) -> Result<Tensor4> {
    if d < 2 {
        return Err(Error::InvalidDimension(d));
    }
    let n = d * d;
    if m.rows != n || m.cols != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: m.rows.max(m.cols),
        });
    }
    let mut t = Tensor4::zeros(d);
    for r in 0..n {
        for c in 0..n {
            let lin = linearize(d, f.tensor_index(d, r, c));
            t.coeffs[lin] = m.entries[r * n + c];
        }
    }
    Tensor4::new(d, t.coeffs)
}

/// Entrywise sup-distance between two tensors of the same local dimension.
pub fn max_abs_diff(s: &Tensor4, t: &Tensor4) -> Result<f64> {
    if s.d != t.d {
        return Err(Error::DimensionMismatch {
            expected: s.d,
            found: t.d,
        });
    }
    Ok(s.coeffs
        .iter()
        .zip(&t.coeffs)
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum JsonLayout {
    Sparse,
    Dense,
}

#[derive(Debug, Serialize, Deserialize)]
struct SparseEntry {
    idx: [usize; 4],
    re: f64,
    im: f64,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(tag = "format", rename_all = "lowercase")]
enum TensorFile {
    Sparse {
        d: usize,
        entries: Vec<SparseEntry>,
    },
    Dense {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        d: Option<usize>,
        coeffs: Vec<[f64; 2]>,
    },
}

/// Serializes a tensor. Floats are written in shortest round-trip form, so
/// reading the output back reproduces every coefficient bit for bit.
pub fn to_json_string(t: &Tensor4, layout: JsonLayout) -> Result<String> {
    let file = match layout {
        JsonLayout::Sparse => TensorFile::Sparse {
            d: t.d,
            entries: t
                .coeffs
                .iter()
                .enumerate()
                .filter(|(_, z)| z.re != 0.0 || z.im != 0.0)
                .map(|(lin, z)| {
                    let idx = delinearize(t.d, lin);
                    SparseEntry {
                        idx: idx.map(|v| v + 1),
                        re: z.re,
                        im: z.im,
                    }
                })
                .collect(),
        },
        JsonLayout::Dense => TensorFile::Dense {
            d: Some(t.d),
            coeffs: t.coeffs.iter().map(|z| [z.re, z.im]).collect(),
        },
    };
    Ok(serde_json::to_string_pretty(&file)?)
}

pub fn from_json_str(text: &str) -> Result<Tensor4> {
    let file: TensorFile =
        serde_json::from_str(text).map_err(|e| Error::MalformedTensor(e.to_string()))?;
    match file {
        TensorFile::Sparse { d, entries } => {
            if d < 2 {
                return Err(Error::InvalidDimension(d));
            }
            let mut items = Vec::with_capacity(entries.len());
            for e in entries {
                if e.idx.iter().any(|&v| v == 0 || v > d) {
                    return Err(Error::MalformedTensor(format!(
                        "sparse index {:?} outside 1..={d}",
                        e.idx
                    )));
                }
                if !e.re.is_finite() || !e.im.is_finite() {
                    return Err(Error::NonFinite(linearize(d, e.idx.map(|v| v - 1))));
                }
                items.push((e.idx.map(|v| v - 1), Complex64::new(e.re, e.im)));
            }
            Tensor4::from_entries(d, items)
        }
        TensorFile::Dense { d, coeffs } => {
            let inferred = (2..=64).find(|k: &usize| k.pow(4) == coeffs.len());
            let d = match (d, inferred) {
                (Some(d), _) => d,
                (None, Some(k)) => k,
                (None, None) => {
                    return Err(Error::MalformedTensor(format!(
                        "{} dense coefficients is not a fourth power",
                        coeffs.len()
                    )))
                }
            };
            if d < 2 {
                return Err(Error::InvalidDimension(d));
            }
            Tensor4::new(
                d,
                coeffs
                    .into_iter()
                    .map(|[re, im]| Complex64::new(re, im))
                    .collect(),
            )
        }
    }
}

pub fn read_json(path: impl AsRef<Path>) -> Result<Tensor4> {
    from_json_str(&fs::read_to_string(path)?)
}

pub fn write_json(t: &Tensor4, path: impl AsRef<Path>, layout: JsonLayout) -> Result<()> {
    fs::write(path, to_json_string(t, layout)?)?;
    Ok(())
}
