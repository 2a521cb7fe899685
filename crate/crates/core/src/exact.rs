//! Exact linear algebra over the rationals: reduced row-echelon form, rank,
//! kernel bases and subspace comparison.
//!
//! Matrices are stored as sparse rows. The constraint systems this crate
//! builds have a handful of nonzeros per row, and elimination keeps that
//! sparsity, so `d = 5` systems (1875 × 1250) reduce in well under a second.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};

pub type Rational = BigRational;
pub type ExactVector = Vec<Rational>;

type SparseRow = Vec<(usize, Rational)>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactMatrix {
    rows: usize,
    cols: usize,
    data: Vec<SparseRow>,
}

impl ExactMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Vec::new(); rows],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for (i, row) in m.data.iter_mut().enumerate() {
            row.push((i, Rational::one()));
        }
        m
    }

    pub fn from_i64_rows(rows: &[Vec<i64>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        let data = rows
            .iter()
            .map(|r| {
                assert_eq!(r.len(), cols, "ragged rows");
                r.iter()
                    .enumerate()
                    .filter(|(_, v)| **v != 0)
                    .map(|(c, v)| (c, Rational::from_integer(BigInt::from(*v))))
                    .collect()
            })
            .collect();
        Self {
            rows: rows.len(),
            cols,
            data,
        }
    }

    /// Stacks vectors as rows.
    pub fn from_vectors(cols: usize, vectors: &[ExactVector]) -> Result<Self> {
        let mut m = Self::zeros(0, cols);
        for v in vectors {
            if v.len() != cols {
                return Err(Error::LengthMismatch {
                    expected: cols,
                    found: v.len(),
                });
            }
            m.push_dense_row(v);
        }
        Ok(m)
    }

    /// Appends a row given as `(column, value)` pairs; duplicates are summed
    /// and zeros dropped.
    pub fn push_row<I>(&mut self, entries: I)
    where
        I: IntoIterator<Item = (usize, Rational)>,
    {
        let mut acc: BTreeMap<usize, Rational> = BTreeMap::new();
        for (c, v) in entries {
            assert!(c < self.cols, "column {c} out of range");
            *acc.entry(c).or_insert_with(Rational::zero) += v;
        }
        self.data
            .push(acc.into_iter().filter(|(_, v)| !v.is_zero()).collect());
        self.rows += 1;
    }

    pub fn push_dense_row(&mut self, row: &[Rational]) {
        self.push_row(
            row.iter()
                .enumerate()
                .filter(|(_, v)| !v.is_zero())
                .map(|(c, v)| (c, v.clone())),
        );
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> Rational {
        let row = &self.data[r];
        match row.binary_search_by_key(&c, |(col, _)| *col) {
            Ok(pos) => row[pos].1.clone(),
            Err(_) => Rational::zero(),
        }
    }

    pub fn row_dense(&self, r: usize) -> ExactVector {
        let mut v = vec![Rational::zero(); self.cols];
        for (c, x) in &self.data[r] {
            v[*c] = x.clone();
        }
        v
    }

    pub fn nonzeros(&self) -> usize {
        self.data.iter().map(Vec::len).sum()
    }

    pub fn mul_vec(&self, v: &[Rational]) -> Result<ExactVector> {
        if v.len() != self.cols {
            return Err(Error::LengthMismatch {
                expected: self.cols,
                found: v.len(),
            });
        }
        Ok(self
            .data
            .iter()
            .map(|row| {
                row.iter()
                    .fold(Rational::zero(), |acc, (c, x)| acc + x * &v[*c])
            })
            .collect())
    }

    pub fn to_f64_rows(&self) -> Vec<Vec<f64>> {
        use num_traits::ToPrimitive;
        (0..self.rows)
            .map(|r| {
                self.row_dense(r)
                    .iter()
                    .map(|x| x.to_f64().unwrap_or(f64::NAN))
                    .collect()
            })
            .collect()
    }

    fn permute_columns(&self, new_of_old: &[usize]) -> Self {
        let data = self
            .data
            .iter()
            .map(|row| {
                let mut out: SparseRow = row
                    .iter()
                    .map(|(c, v)| (new_of_old[*c], v.clone()))
                    .collect();
                out.sort_by_key(|(c, _)| *c);
                out
            })
            .collect();
        Self {
            rows: self.rows,
            cols: self.cols,
            data,
        }
    }
}

/// `a - factor * b` on sorted sparse rows.
fn sub_scaled(a: &[(usize, Rational)], factor: &Rational, b: &[(usize, Rational)]) -> SparseRow {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        let take_a = j >= b.len() || (i < a.len() && a[i].0 < b[j].0);
        let take_b = i >= a.len() || (j < b.len() && b[j].0 < a[i].0);
        if take_a {
            out.push(a[i].clone());
            i += 1;
        } else if take_b {
            out.push((b[j].0, -(factor * &b[j].1)));
            j += 1;
        } else {
            let v = &a[i].1 - factor * &b[j].1;
            if !v.is_zero() {
                out.push((a[i].0, v));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

/// Reduced row-echelon form and the pivot columns, in increasing order.
pub fn rref(m: &ExactMatrix) -> (ExactMatrix, Vec<usize>) {
    // pivot column -> row with leading 1 at that column (echelon, not yet reduced)
    let mut pivots: BTreeMap<usize, SparseRow> = BTreeMap::new();
    for input in &m.data {
        let mut row = input.clone();
        let mut pos = 0;
        while pos < row.len() {
            let col = row[pos].0;
            if let Some(prow) = pivots.get(&col) {
                let factor = row[pos].1.clone();
                row = sub_scaled(&row, &factor, prow);
                // entries before `pos` are untouched: prow starts at `col`
            } else {
                pos += 1;
            }
        }
        if let Some((lead, lead_val)) = row.first().cloned() {
            let inv = lead_val.recip();
            for (_, v) in row.iter_mut() {
                *v *= &inv;
            }
            pivots.insert(lead, row);
        }
    }

    // back-substitution, largest pivot first
    let cols: Vec<usize> = pivots.keys().copied().collect();
    for &pc in cols.iter().rev() {
        let prow = pivots[&pc].clone();
        for &other in cols.iter().take_while(|&&c| c < pc) {
            let row = pivots.get_mut(&other).expect("pivot row");
            if let Ok(pos) = row.binary_search_by_key(&pc, |(c, _)| *c) {
                let factor = row[pos].1.clone();
                *row = sub_scaled(row, &factor, &prow);
            }
        }
    }

    let mut out = ExactMatrix::zeros(0, m.cols);
    out.rows = m.rows;
    out.data = pivots.into_values().collect();
    out.data.resize(m.rows, Vec::new());
    (out, cols)
}

/// RREF after reordering columns so that `order[0]` is eliminated first.
/// The returned matrix and pivots are expressed in the original columns.
pub fn rref_with_order(m: &ExactMatrix, order: &[usize]) -> (ExactMatrix, Vec<usize>) {
    assert_eq!(
        order.len(),
        m.cols,
        "ordering must be a permutation of the columns"
    );
    let mut new_of_old = vec![usize::MAX; m.cols];
    for (new, &old) in order.iter().enumerate() {
        new_of_old[old] = new;
    }
    assert!(
        new_of_old.iter().all(|&v| v != usize::MAX),
        "ordering must be a permutation of the columns"
    );
    let (reduced, pivots) = rref(&m.permute_columns(&new_of_old));
    (
        reduced.permute_columns(order),
        pivots.into_iter().map(|p| order[p]).collect(),
    )
}

pub fn rank(m: &ExactMatrix) -> usize {
    rref(m).1.len()
}

/// Scales a vector to coprime integers with its first nonzero entry positive.
pub fn normalize_integer(v: &mut [Rational]) {
    let mut lcm = BigInt::one();
    for x in v.iter().filter(|x| !x.is_zero()) {
        lcm = lcm.lcm(x.denom());
    }
    let mut gcd = BigInt::zero();
    for x in v.iter_mut() {
        *x = Rational::from_integer(x.numer() * (&lcm / x.denom()));
        gcd = gcd.gcd(x.numer());
    }
    if gcd.is_zero() {
        return;
    }
    let first_negative = v
        .iter()
        .find(|x| !x.is_zero())
        .is_some_and(|x| x.is_negative());
    if first_negative {
        gcd = -gcd;
    }
    let g = Rational::from_integer(gcd);
    for x in v.iter_mut() {
        *x /= &g;
    }
}

/// Null-space basis, one vector per free column, each integer-normalized.
pub fn kernel_basis(m: &ExactMatrix) -> Vec<ExactVector> {
    let (reduced, pivots) = rref(m);
    let mut is_pivot = vec![false; m.cols];
    for &p in &pivots {
        is_pivot[p] = true;
    }
    let free: Vec<usize> = (0..m.cols).filter(|&c| !is_pivot[c]).collect();
    let mut slot = vec![usize::MAX; m.cols];
    for (k, &f) in free.iter().enumerate() {
        slot[f] = k;
    }
    let mut basis: Vec<ExactVector> = free
        .iter()
        .map(|&f| {
            let mut v = vec![Rational::zero(); m.cols];
            v[f] = Rational::one();
            v
        })
        .collect();
    for (row, &p) in reduced.data.iter().zip(&pivots) {
        for (c, val) in row {
            if *c != p {
                basis[slot[*c]][p] = -val.clone();
            }
        }
    }
    for v in &mut basis {
        normalize_integer(v);
    }
    basis
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SubspaceRelation {
    Equal,
    /// The first span is strictly contained in the second.
    FirstInSecond,
    /// The second span is strictly contained in the first.
    SecondInFirst,
    Incomparable,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SubspaceComparison {
    pub relation: SubspaceRelation,
    pub dim_first: usize,
    pub dim_second: usize,
    pub dim_sum: usize,
}

pub fn subspace_compare(a: &[ExactVector], b: &[ExactVector]) -> Result<SubspaceComparison> {
    let len = a.first().or(b.first()).map_or(0, Vec::len);
    let ma = ExactMatrix::from_vectors(len, a)?;
    let mb = ExactMatrix::from_vectors(len, b)?;
    let mut both = ma.clone();
    for v in b {
        both.push_dense_row(v);
    }
    let (dim_first, dim_second, dim_sum) = (rank(&ma), rank(&mb), rank(&both));
    let relation = match (dim_sum == dim_second, dim_sum == dim_first) {
        (true, true) => SubspaceRelation::Equal,
        (true, false) => SubspaceRelation::FirstInSecond,
        (false, true) => SubspaceRelation::SecondInFirst,
        (false, false) => SubspaceRelation::Incomparable,
    };
    Ok(SubspaceComparison {
        relation,
        dim_first,
        dim_second,
        dim_sum,
    })
}

#[derive(Serialize)]
struct RationalJson {
    num: String,
    den: String,
}

/// Exact basis export: each vector is an array of `{"num", "den"}` strings.
pub fn basis_to_json(vectors: &[ExactVector]) -> serde_json::Value {
    let arr: Vec<Vec<RationalJson>> = vectors
        .iter()
        .map(|v| {
            v.iter()
                .map(|x| RationalJson {
                    num: x.numer().to_string(),
                    den: x.denom().to_string(),
                })
                .collect()
        })
        .collect();
    serde_json::to_value(arr).expect("rational export is infallible")
}

pub fn rational_json(x: &Rational) -> serde_json::Value {
    serde_json::json!({ "num": x.numer().to_string(), "den": x.denom().to_string() })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(BigInt::from(n), BigInt::from(d))
    }

    fn ints(v: &[i64]) -> ExactVector {
        v.iter().map(|&x| q(x, 1)).collect()
    }

    #[test]
    fn rref_identity() {
        let (r, p) = rref(&ExactMatrix::identity(3));
        assert_eq!(r, ExactMatrix::identity(3));
        assert_eq!(p, vec![0, 1, 2]);
    }

    #[test]
    fn rref_rank_one() {
        let (r, p) = rref(&ExactMatrix::from_i64_rows(&[vec![1, 2], vec![2, 4]]));
        assert_eq!(r, ExactMatrix::from_i64_rows(&[vec![1, 2], vec![0, 0]]));
        assert_eq!(p, vec![0]);
    }

    #[test]
    fn rref_needs_back_substitution() {
        let m = ExactMatrix::from_i64_rows(&[vec![0, 2, 4], vec![3, 1, 0], vec![3, 3, 4]]);
        let (r, p) = rref(&m);
        assert_eq!(p, vec![0, 1]);
        assert_eq!(r.row_dense(0), vec![q(1, 1), q(0, 1), q(-2, 3)]);
        assert_eq!(r.row_dense(1), vec![q(0, 1), q(1, 1), q(2, 1)]);
    }

    #[test]
    fn kernel_of_identity_is_empty() {
        assert!(kernel_basis(&ExactMatrix::identity(4)).is_empty());
    }

    #[test]
    fn kernel_of_difference_row() {
        let k = kernel_basis(&ExactMatrix::from_i64_rows(&[vec![1, -1]]));
        assert_eq!(k, vec![ints(&[1, 1])]);
    }

    #[test]
    fn kernel_vectors_are_coprime_integers() {
        let m = ExactMatrix::from_i64_rows(&[vec![2, 3, 0, 5], vec![0, 6, 4, 1]]);
        let k = kernel_basis(&m);
        assert_eq!(k.len(), 2);
        for v in &k {
            assert!(v.iter().all(|x| x.is_integer()));
            assert!(v.iter().find(|x| !x.is_zero()).unwrap().is_positive());
            assert!(m.mul_vec(v).unwrap().iter().all(Zero::is_zero));
        }
    }

    #[test]
    fn ordering_changes_pivots_not_span() {
        let m = ExactMatrix::from_i64_rows(&[vec![1, 1, 0], vec![0, 1, 1]]);
        let (r1, p1) = rref(&m);
        let (r2, p2) = rref_with_order(&m, &[2, 1, 0]);
        assert_eq!(p1, vec![0, 1]);
        assert_eq!(p2, vec![2, 1]);
        let rows1: Vec<_> = (0..2).map(|i| r1.row_dense(i)).collect();
        let rows2: Vec<_> = (0..2).map(|i| r2.row_dense(i)).collect();
        assert_eq!(
            subspace_compare(&rows1, &rows2).unwrap().relation,
            SubspaceRelation::Equal
        );
    }

    #[test]
    fn compare_relations() {
        let a = vec![ints(&[1, 0, 0])];
        let b = vec![ints(&[1, 0, 0]), ints(&[0, 1, 0])];
        let c = vec![ints(&[0, 0, 1])];
        assert_eq!(
            subspace_compare(&a, &a).unwrap().relation,
            SubspaceRelation::Equal
        );
        assert_eq!(
            subspace_compare(&a, &b).unwrap().relation,
            SubspaceRelation::FirstInSecond
        );
        assert_eq!(
            subspace_compare(&b, &a).unwrap().relation,
            SubspaceRelation::SecondInFirst
        );
        let cmp = subspace_compare(&b, &c).unwrap();
        assert_eq!(cmp.relation, SubspaceRelation::Incomparable);
        assert_eq!((cmp.dim_first, cmp.dim_second, cmp.dim_sum), (2, 1, 3));
        assert!(subspace_compare(&a, &[ints(&[1, 0])]).is_err());
    }

    #[test]
    fn json_export_uses_decimal_strings() {
        let json = basis_to_json(&[vec![q(-3, 4), q(0, 1)]]);
        assert_eq!(json[0][0]["num"], "-3");
        assert_eq!(json[0][0]["den"], "4");
        assert_eq!(json[0][1]["den"], "1");
    }
}
