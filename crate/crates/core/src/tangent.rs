//! The tangent space `T` at a seed: the real solutions `X` of
//! `F_i(X) F_i(Φ)† + F_i(Φ) F_i(X)† = 0` over a chosen set of flattenings,
//! solved exactly, plus the structural classification of its bases.
//!
//! Unknowns are real coordinates: column `2k` is `Re X_k`, column `2k+1` is
//! `Im X_k`, where `k` is the linear tensor index. The equations are
//! R-linear but not C-linear, so the kernel is a real vector space.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::{self, ExactMatrix, ExactVector, Rational};
use crate::tensor::{delinearize, flatten, ket_label, linearize, FlatteningId, Tensor4};

const MAX_DENOMINATOR: i64 = 1 << 16;

/// The rational `p/q` with `q <= 2^16` whose correctly rounded quotient is
/// exactly `x`, if there is one.
pub fn small_rational(x: f64) -> Option<Rational> {
    if !x.is_finite() {
        return None;
    }
    let (mut h0, mut h1, mut k0, mut k1) = (0i64, 1i64, 1i64, 0i64);
    let mut r = x;
    for _ in 0..64 {
        let a = r.floor();
        if a.abs() > 1e15 {
            return None;
        }
        let a = a as i64;
        let h2 = a.checked_mul(h1)?.checked_add(h0)?;
        let k2 = a.checked_mul(k1)?.checked_add(k0)?;
        if k2 > MAX_DENOMINATOR {
            break;
        }
        (h0, h1, k0, k1) = (h1, h2, k1, k2);
        if h1 as f64 / k1 as f64 == x {
            return Some(Rational::new(BigInt::from(h1), BigInt::from(k1)));
        }
        let frac = r - a as f64;
        if frac == 0.0 {
            break;
        }
        r = 1.0 / frac;
    }
    None
}

/// Gaussian-rational nonzero entries of a seed: `(linear index, re, im)`.
fn exact_entries(phi: &Tensor4) -> Result<Vec<(usize, Rational, Rational)>> {
    let mut out = Vec::new();
    for (lin, z) in phi.coeffs().iter().enumerate() {
        if z.re == 0.0 && z.im == 0.0 {
            continue;
        }
        let re = small_rational(z.re).ok_or(Error::NonRationalEntry(lin))?;
        let im = small_rational(z.im).ok_or(Error::NonRationalEntry(lin))?;
        out.push((lin, re, im));
    }
    Ok(out)
}

fn re_col(lin: usize) -> usize {
    2 * lin
}

fn im_col(lin: usize) -> usize {
    2 * lin + 1
}

/// The real linear system for `T` over `which`: `2d^4` columns and `d^4`
/// rows per flattening (one per real diagonal entry, two per off-diagonal
/// pair of the Hermitian left-hand side, upper triangle row by row).
pub fn constraint_matrix(phi: &Tensor4, which: &[FlatteningId]) -> Result<ExactMatrix> {
    if which.is_empty() {
        return Err(Error::EmptyFlatteningSubset);
    }
    let d = phi.d();
    let n = d * d;
    let entries = exact_entries(phi)?;
    let mut m = ExactMatrix::zeros(0, 2 * d.pow(4));
    for &f in which {
        // rows of P = F_f(Φ) as (col, re, im)
        let mut prow: Vec<Vec<(usize, &Rational, &Rational)>> = vec![Vec::new(); n];
        for (lin, re, im) in &entries {
            let (r, c) = f.position(d, delinearize(d, *lin));
            prow[r].push((c, re, im));
        }
        let unknown = |r: usize, k: usize| linearize(d, f.tensor_index(d, r, k));
        for r in 0..n {
            for s in r..n {
                let mut real_row: Vec<(usize, Rational)> = Vec::new();
                let mut imag_row: Vec<(usize, Rational)> = Vec::new();
                // X_rk · conj(P_sk)
                for &(k, pr, pi) in &prow[s] {
                    let lin = unknown(r, k);
                    real_row.push((re_col(lin), pr.clone()));
                    real_row.push((im_col(lin), pi.clone()));
                    imag_row.push((re_col(lin), -pi.clone()));
                    imag_row.push((im_col(lin), pr.clone()));
                }
                // conj(X_sk) · P_rk
                for &(k, pr, pi) in &prow[r] {
                    let lin = unknown(s, k);
                    real_row.push((re_col(lin), pr.clone()));
                    real_row.push((im_col(lin), pi.clone()));
                    imag_row.push((re_col(lin), pi.clone()));
                    imag_row.push((im_col(lin), -pr.clone()));
                }
                m.push_row(real_row);
                if r != s {
                    m.push_row(imag_row);
                }
            }
        }
    }
    Ok(m)
}

/// A direction at the seed, optionally carrying its exact coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct TangentVector {
    pub tensor: Tensor4,
    pub exact: Option<ExactVector>,
}

impl TangentVector {
    /// From exact real coordinates (`2d^4` entries, re/im interleaved).
    pub fn from_exact(d: usize, v: ExactVector) -> Result<Self> {
        let expected = 2 * d.pow(4);
        if v.len() != expected {
            return Err(Error::LengthMismatch {
                expected,
                found: v.len(),
            });
        }
        let coeffs = v
            .chunks(2)
            .map(|p| {
                Complex64::new(
                    p[0].to_f64().unwrap_or(f64::NAN),
                    p[1].to_f64().unwrap_or(f64::NAN),
                )
            })
            .collect();
        Ok(Self {
            tensor: Tensor4::new(d, coeffs)?,
            exact: Some(v),
        })
    }

    /// From a numeric tensor; exact coordinates are attached when every
    /// entry is a small rational.
    pub fn from_tensor(t: Tensor4) -> Self {
        let exact = t
            .coeffs()
            .iter()
            .flat_map(|z| [z.re, z.im])
            .map(|x| {
                if x == 0.0 {
                    Some(Rational::zero())
                } else {
                    small_rational(x)
                }
            })
            .collect::<Option<Vec<_>>>();
        Self { tensor: t, exact }
    }

    pub fn support(&self) -> Vec<usize> {
        match &self.exact {
            Some(v) => (0..v.len() / 2)
                .filter(|&k| !v[2 * k].is_zero() || !v[2 * k + 1].is_zero())
                .collect(),
            None => self.tensor.support(0.0),
        }
    }

    pub fn purity(&self) -> Purity {
        let (has_re, has_im) = match &self.exact {
            Some(v) => (
                v.iter().step_by(2).any(|x| !x.is_zero()),
                v.iter().skip(1).step_by(2).any(|x| !x.is_zero()),
            ),
            None => (
                self.tensor.coeffs().iter().any(|z| z.re != 0.0),
                self.tensor.coeffs().iter().any(|z| z.im != 0.0),
            ),
        };
        match (has_re, has_im) {
            (true, false) => Purity::Real,
            (false, true) => Purity::Imaginary,
            (true, true) => Purity::Mixed,
            (false, false) => Purity::Zero,
        }
    }

    /// Sparse export with exact coefficients when available.
    pub fn to_json(&self) -> serde_json::Value {
        let d = self.tensor.d();
        let entries: Vec<serde_json::Value> = self
            .support()
            .into_iter()
            .map(|k| {
                let idx = delinearize(d, k).map(|v| v + 1);
                match &self.exact {
                    Some(v) => serde_json::json!({
                        "idx": idx,
                        "re": exact::rational_json(&v[2 * k]),
                        "im": exact::rational_json(&v[2 * k + 1]),
                    }),
                    None => {
                        let z = self.tensor.coeffs()[k];
                        serde_json::json!({ "idx": idx, "re": z.re, "im": z.im })
                    }
                }
            })
            .collect();
        serde_json::json!({ "d": d, "entries": entries })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Purity {
    Real,
    Imaginary,
    Mixed,
    Zero,
}

impl fmt::Display for Purity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Purity::Real => "real",
            Purity::Imaginary => "imaginary",
            Purity::Mixed => "mixed",
            Purity::Zero => "zero",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VectorClass {
    /// Linear indices of the nonzero coefficients.
    pub support: Vec<usize>,
    pub purity: Purity,
    /// Index of the vector with the same support and opposite purity.
    pub partner: Option<usize>,
}

impl VectorClass {
    pub fn support_size(&self) -> usize {
        self.support.len()
    }
}

/// Per-vector classes, with pairs detected and overlaps flagged.
/// Returns the classes and whether the family is support-disjoint-or-paired.
pub fn describe_vectors(vectors: &[TangentVector]) -> (Vec<VectorClass>, bool) {
    let mut classes: Vec<VectorClass> = vectors
        .iter()
        .map(|v| VectorClass {
            support: v.support(),
            purity: v.purity(),
            partner: None,
        })
        .collect();
    let mut groups: HashMap<&[usize], Vec<usize>> = HashMap::new();
    for (i, c) in classes.iter().enumerate() {
        groups.entry(c.support.as_slice()).or_default().push(i);
    }
    let mut resolved = classes
        .iter()
        .all(|c| matches!(c.purity, Purity::Real | Purity::Imaginary));
    let mut pairs = Vec::new();
    for members in groups.values() {
        match members.as_slice() {
            [_] => {}
            [i, j] if classes[*i].purity != classes[*j].purity => pairs.push((*i, *j)),
            _ => resolved = false,
        }
    }
    let mut owner: HashMap<usize, &[usize]> = HashMap::new();
    for c in &classes {
        for &k in &c.support {
            if let Some(prev) = owner.insert(k, c.support.as_slice()) {
                if prev != c.support.as_slice() {
                    resolved = false;
                }
            }
        }
    }
    for (i, j) in pairs {
        classes[i].partner = Some(j);
        classes[j].partner = Some(i);
    }
    (classes, resolved)
}

#[derive(Clone, Debug)]
pub struct TangentBasis {
    pub seed: Tensor4,
    pub flattenings: Vec<FlatteningId>,
    pub vectors: Vec<TangentVector>,
    pub classes: Vec<VectorClass>,
}

impl TangentBasis {
    pub fn dim(&self) -> usize {
        self.vectors.len()
    }

    pub fn exact_vectors(&self) -> Vec<ExactVector> {
        self.vectors
            .iter()
            .filter_map(|v| v.exact.clone())
            .collect()
    }
}

/// Exact kernel of [`constraint_matrix`], reassembled as complex tensors.
pub fn solve_tangent(phi: &Tensor4, which: &[FlatteningId]) -> Result<TangentBasis> {
    let m = constraint_matrix(phi, which)?;
    let d = phi.d();
    let vectors = exact::kernel_basis(&m)
        .into_iter()
        .map(|v| TangentVector::from_exact(d, v))
        .collect::<Result<Vec<_>>>()?;
    let (classes, _) = describe_vectors(&vectors);
    let mut flattenings = which.to_vec();
    flattenings.sort();
    flattenings.dedup();
    Ok(TangentBasis {
        seed: phi.clone(),
        flattenings,
        vectors,
        classes,
    })
}

/// `max_i max|F_i(X) F_i(Φ)† + F_i(Φ) F_i(X)†|` over `which`.
pub fn membership_residual(x: &Tensor4, phi: &Tensor4, which: &[FlatteningId]) -> Result<f64> {
    if x.d() != phi.d() {
        return Err(Error::DimensionMismatch {
            expected: phi.d(),
            found: x.d(),
        });
    }
    Ok(which
        .iter()
        .map(|&f| {
            let xm = flatten(x, f);
            let pm = flatten(phi, f);
            xm.matmul(&pm.adjoint())
                .add(&pm.matmul(&xm.adjoint()))
                .max_abs()
        })
        .fold(0.0, f64::max))
}

/// Tangency residual over all three flattenings.
pub fn verify_membership(x: &Tensor4, phi: &Tensor4) -> Result<f64> {
    membership_residual(x, phi, &FlatteningId::ALL)
}

/// `true` when the exact coordinates of `x` solve the system identically.
pub fn exact_membership(x: &TangentVector, phi: &Tensor4, which: &[FlatteningId]) -> Result<bool> {
    let v = match &x.exact {
        Some(v) => v.clone(),
        None => return Ok(false),
    };
    let m = constraint_matrix(phi, which)?;
    Ok(m.mul_vec(&v)?.iter().all(Zero::is_zero))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ColumnOrdering {
    Natural,
    FrequencyDescending,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct ClassCount {
    pub support_size: usize,
    pub purity: Purity,
    pub paired: bool,
    pub count: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StructureSummary {
    pub dimension: usize,
    /// Number of `(e, f)` pairs by support size.
    pub pairs: BTreeMap<usize, usize>,
    /// Unpaired pure vectors.
    pub singles: Vec<ClassCount>,
    /// Vectors that did not fit the disjoint-or-paired pattern.
    pub unresolved: usize,
}

impl StructureSummary {
    fn from_classes(classes: &[VectorClass], resolved: bool) -> Self {
        let mut pairs = BTreeMap::new();
        let mut singles: BTreeMap<(usize, Purity), usize> = BTreeMap::new();
        for c in classes {
            match c.partner {
                Some(_) if c.purity == Purity::Real => {
                    *pairs.entry(c.support_size()).or_insert(0) += 1
                }
                Some(_) => {}
                None => *singles.entry((c.support_size(), c.purity)).or_insert(0) += 1,
            }
        }
        let singles = singles
            .into_iter()
            .map(|((support_size, purity), count)| ClassCount {
                support_size,
                purity,
                paired: false,
                count,
            })
            .collect();
        Self {
            dimension: classes.len(),
            pairs,
            singles,
            unresolved: if resolved { 0 } else { classes.len() },
        }
    }

    pub fn single_count(&self, support_size: usize, purity: Purity) -> usize {
        self.singles
            .iter()
            .find(|c| c.support_size == support_size && c.purity == purity)
            .map_or(0, |c| c.count)
    }
}

impl fmt::Display for StructureSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "dim {}", self.dimension)?;
        for (size, count) in &self.pairs {
            write!(f, "; {count} pairs support-{size}")?;
        }
        for c in &self.singles {
            write!(f, "; {} {} support-{}", c.count, c.purity, c.support_size)?;
        }
        if self.unresolved > 0 {
            write!(f, "; unresolved")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct Classification {
    /// Support-minimal basis spanning the same space as the input.
    pub vectors: Vec<TangentVector>,
    pub classes: Vec<VectorClass>,
    /// Ordering that produced a disjoint-or-paired basis, if any did.
    pub ordering: Option<ColumnOrdering>,
    pub summary: StructureSummary,
}

impl Classification {
    /// Names the basis the way the tables do: `e_j`/`f_j` for the real and
    /// imaginary member of each pair, `g_k` for imaginary singletons, `h_l`
    /// for larger imaginary singles, `v_m` for anything else. Each family
    /// is sorted by its support.
    pub fn named(&self) -> Vec<(String, TangentVector)> {
        let mut pairs: Vec<(usize, usize)> = Vec::new();
        let mut g = Vec::new();
        let mut h = Vec::new();
        let mut other = Vec::new();
        for (i, c) in self.classes.iter().enumerate() {
            match (c.partner, c.purity) {
                (Some(j), Purity::Real) => pairs.push((i, j)),
                (Some(_), _) => {}
                (None, Purity::Imaginary) if c.support_size() == 1 => g.push(i),
                (None, Purity::Imaginary) => h.push(i),
                (None, _) => other.push(i),
            }
        }
        let key = |i: &usize| self.classes[*i].support.clone();
        pairs.sort_by_key(|(i, _)| key(i));
        g.sort_by_key(key);
        h.sort_by_key(key);
        other.sort_by_key(key);
        let mut out = Vec::with_capacity(self.vectors.len());
        for (n, (i, _)) in pairs.iter().enumerate() {
            out.push((format!("e{}", n + 1), self.vectors[*i].clone()));
        }
        for (n, (_, j)) in pairs.iter().enumerate() {
            out.push((format!("f{}", n + 1), self.vectors[*j].clone()));
        }
        for (prefix, list) in [("g", &g), ("h", &h), ("v", &other)] {
            for (n, i) in list.iter().enumerate() {
                out.push((format!("{prefix}{}", n + 1), self.vectors[*i].clone()));
            }
        }
        out
    }
}

fn frequency_order(vectors: &[ExactVector], cols: usize) -> Vec<usize> {
    let mut freq = vec![0usize; cols];
    for v in vectors {
        for (c, x) in v.iter().enumerate() {
            if !x.is_zero() {
                freq[c] += 1;
            }
        }
    }
    let mut order: Vec<usize> = (0..cols).collect();
    order.sort_by_key(|&c| (std::cmp::Reverse(freq[c]), c));
    order
}

/// Rewrites the basis in support-minimal form by exact RREF of the stacked
/// vectors, trying the natural column order first and then columns by
/// descending frequency, and reports the resulting class multiset.
pub fn classify(basis: &TangentBasis) -> Result<Classification> {
    let d = basis.seed.d();
    let cols = 2 * d.pow(4);
    let exact_vectors: Vec<ExactVector> = basis
        .vectors
        .iter()
        .map(|v| {
            v.exact.clone().ok_or_else(|| {
                Error::InvalidConfig("basis vector without exact coordinates".into())
            })
        })
        .collect::<Result<_>>()?;
    let stacked = ExactMatrix::from_vectors(cols, &exact_vectors)?;
    let orderings = [
        (ColumnOrdering::Natural, (0..cols).collect::<Vec<_>>()),
        (
            ColumnOrdering::FrequencyDescending,
            frequency_order(&exact_vectors, cols),
        ),
    ];
    let mut fallback = None;
    for (ordering, order) in orderings {
        let (reduced, pivots) = exact::rref_with_order(&stacked, &order);
        let vectors = (0..pivots.len())
            .map(|r| {
                let mut v = reduced.row_dense(r);
                exact::normalize_integer(&mut v);
                TangentVector::from_exact(d, v)
            })
            .collect::<Result<Vec<_>>>()?;
        let (classes, resolved) = describe_vectors(&vectors);
        if resolved {
            let summary = StructureSummary::from_classes(&classes, true);
            return Ok(Classification {
                vectors,
                classes,
                ordering: Some(ordering),
                summary,
            });
        }
        if fallback.is_none() {
            fallback = Some((vectors, classes));
        }
    }
    let (vectors, classes) = fallback.expect("at least one ordering");
    let summary = StructureSummary::from_classes(&classes, false);
    Ok(Classification {
        vectors,
        classes,
        ordering: None,
        summary,
    })
}

/// JSON export of a classified basis.
pub fn basis_to_json(basis: &TangentBasis, classification: &Classification) -> serde_json::Value {
    let named = classification.named();
    let by_support: HashMap<Vec<usize>, usize> = classification
        .classes
        .iter()
        .enumerate()
        .map(|(i, c)| (c.support.clone(), i))
        .collect();
    let vectors: Vec<serde_json::Value> = named
        .iter()
        .map(|(name, v)| {
            let support = v.support();
            let purity = v.purity();
            let partner = by_support
                .get(&support)
                .and_then(|&i| classification.classes[i].partner)
                .map(|_| true)
                .unwrap_or(false);
            let mut json = v.to_json();
            json["name"] = serde_json::json!(name);
            json["support_size"] = serde_json::json!(support.len());
            json["purity"] = serde_json::json!(purity);
            json["paired"] = serde_json::json!(partner);
            json["support"] = serde_json::json!(support
                .iter()
                .map(|&k| ket_label(delinearize(basis.seed.d(), k)))
                .collect::<Vec<_>>());
            json
        })
        .collect();
    serde_json::json!({
        "d": basis.seed.d(),
        "flattenings": basis.flattenings,
        "dimension": basis.dim(),
        "ordering": classification.ordering,
        "summary": classification.summary,
        "vectors": vectors,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ols::OlsPair;
    use crate::tensor::parse_ket;

    fn seed(d: usize) -> Tensor4 {
        OlsPair::builtin(d).unwrap().to_tensor().unwrap()
    }

    #[test]
    fn small_rationals() {
        assert_eq!(small_rational(0.5), Some(Rational::new(1.into(), 2.into())));
        assert_eq!(
            small_rational(-3.0),
            Some(Rational::from_integer((-3).into()))
        );
        assert_eq!(
            small_rational(1.0 / 3.0),
            Some(Rational::new(1.into(), 3.into()))
        );
        assert_eq!(small_rational(std::f64::consts::PI), None);
        assert_eq!(small_rational(f64::NAN), None);
    }

    #[test]
    fn constraint_shape_d3() {
        let m = constraint_matrix(&seed(3), &FlatteningId::ALL).unwrap();
        assert_eq!((m.rows(), m.cols()), (243, 162));
    }

    #[test]
    fn single_flattening_kernel_is_unitary_lie_algebra() {
        let m = constraint_matrix(&seed(3), &[FlatteningId::F1]).unwrap();
        assert_eq!(exact::kernel_basis(&m).len(), 81);
    }

    #[test]
    fn identity_seed_single_flattening() {
        // F1(Φ) = I gives skew-Hermitian F1(X): real dimension d^4.
        let id = crate::tensor::unflatten(
            &crate::tensor::ComplexMatrix::identity(4),
            FlatteningId::F1,
            2,
        )
        .unwrap();
        let b = solve_tangent(&id, &[FlatteningId::F1]).unwrap();
        assert_eq!(b.dim(), 16);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(matches!(
            constraint_matrix(&seed(3), &[]),
            Err(Error::EmptyFlatteningSubset)
        ));
        let mut t = seed(3);
        t.set([0, 0, 0, 0], Complex64::new(std::f64::consts::E, 0.0));
        assert!(matches!(
            constraint_matrix(&t, &FlatteningId::ALL),
            Err(Error::NonRationalEntry(0))
        ));
    }

    #[test]
    fn rank_matches_kernel() {
        let m = constraint_matrix(&seed(3), &FlatteningId::ALL).unwrap();
        assert_eq!(exact::rank(&m), 162 - 33);
    }

    #[test]
    fn global_phase_direction_is_tangent() {
        let phi = seed(3);
        let x = phi.scale(Complex64::new(0.0, 1.0));
        assert_eq!(verify_membership(&x, &phi).unwrap(), 0.0);
        assert!(
            exact_membership(&TangentVector::from_tensor(x), &phi, &FlatteningId::ALL).unwrap()
        );
    }

    #[test]
    fn real_seed_direction_is_not_tangent() {
        let phi = seed(3);
        assert!(verify_membership(&phi, &phi).unwrap() > 1.0);
        assert!(!exact_membership(
            &TangentVector::from_tensor(phi.clone()),
            &phi,
            &FlatteningId::ALL
        )
        .unwrap());
    }

    #[test]
    fn classification_d3() {
        let basis = solve_tangent(&seed(3), &FlatteningId::ALL).unwrap();
        let cls = classify(&basis).unwrap();
        assert_eq!(cls.ordering, Some(ColumnOrdering::Natural));
        assert_eq!(cls.summary.pairs, BTreeMap::from([(6, 12)]));
        assert_eq!(cls.summary.single_count(1, Purity::Imaginary), 9);
        assert_eq!(cls.summary.singles.len(), 1);
        assert_eq!(
            cls.summary.to_string(),
            "dim 33; 12 pairs support-6; 9 imaginary support-1"
        );
        let named = cls.named();
        assert_eq!(named[0].0, "e1");
        assert_eq!(named[24].0, "g1");
        assert_eq!(
            named[24].1.support(),
            vec![linearize(3, parse_ket("1123").unwrap())]
        );
    }

    #[test]
    fn overlapping_family_is_unresolved() {
        let d = 3;
        let a = Tensor4::from_entries(d, [([0, 0, 0, 0], Complex64::new(1.0, 0.0))]).unwrap();
        let b = Tensor4::from_entries(
            d,
            [
                ([0, 0, 0, 0], Complex64::new(1.0, 0.0)),
                ([0, 0, 0, 1], Complex64::new(1.0, 0.0)),
            ],
        )
        .unwrap();
        let (_, resolved) =
            describe_vectors(&[TangentVector::from_tensor(a), TangentVector::from_tensor(b)]);
        assert!(!resolved);
    }

    #[test]
    fn json_export_lists_named_vectors() {
        let basis = solve_tangent(&seed(3), &FlatteningId::ALL).unwrap();
        let cls = classify(&basis).unwrap();
        let json = basis_to_json(&basis, &cls);
        assert_eq!(json["dimension"], 33);
        assert_eq!(json["vectors"].as_array().unwrap().len(), 33);
        assert_eq!(json["vectors"][0]["support_size"], 6);
        assert_eq!(json["vectors"][0]["paired"], true);
        assert_eq!(json["vectors"][32]["name"], "g9");
        assert_eq!(json["vectors"][32]["entries"][0]["im"]["num"], "1");
    }
}
