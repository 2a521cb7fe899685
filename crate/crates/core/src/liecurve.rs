//! Exponential curves on the unitary groups of the three flattenings,
//! pulled back to tensors, and the checks that compare them.
//!
//! For a base tensor `Φ` and direction `X`, flattening `f` gives the curve
//! `F_f⁻¹(P · exp(P† F_f(X)))` with `P = F_f(Φ)`. The three curves coincide
//! exactly on directions tangent to a smooth piece of `P(4,d)`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::tangent::membership_residual;
use crate::tensor::{flatten, max_abs_diff, unflatten, ComplexMatrix, FlatteningId, Tensor4};

pub const SKEW_TOL: f64 = 1e-10;
pub const UNITARY_TOL: f64 = 1e-10;
pub const TANGENT_TOL: f64 = 1e-10;
pub const DEFAULT_AGREEMENT_TOL: f64 = 1e-9;
pub const DEFAULT_TAYLOR_RTOL: f64 = 1e-8;
/// Deviations below this are treated as rounding noise by the slope fit.
pub const NOISE_FLOOR: f64 = 1e-13;

/// Eigendecomposition of Hermitian `h` as `(V, λ)`. The unshifted solve can
/// break down (NaN) on very sparse, exactly structured inputs; those are
/// retried on `h + σI`, which has the same eigenvectors.
fn hermitian_eigen(h: &DMatrix<Complex64>) -> Result<(DMatrix<Complex64>, Vec<f64>)> {
    let n = h.nrows();
    let norm = h.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let tol = 1e-12 * (1.0 + norm) * n as f64;
    for sigma in [0.0, 0.37, -0.61, 1.13].map(|c| c * (1.0 + norm)) {
        let shifted = h + DMatrix::<Complex64>::identity(n, n) * Complex64::new(sigma, 0.0);
        let eig = shifted.symmetric_eigen();
        let v = eig.eigenvectors;
        let lambda: Vec<f64> = eig.eigenvalues.iter().map(|l| l - sigma).collect();
        if v.iter().any(|z| !z.is_finite()) || lambda.iter().any(|l| !l.is_finite()) {
            continue;
        }
        let recon =
            &v * DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
                n,
                lambda.iter().map(|&l| Complex64::new(l, 0.0)),
            )) * v.adjoint();
        if (recon - h).iter().all(|z| z.norm() <= tol) {
            return Ok((v, lambda));
        }
    }
    Err(Error::EigenFailure)
}

/// `exp(S)` for skew-Hermitian `S`, via the eigendecomposition of the
/// Hermitian matrix `H = −iS`: `exp(S) = V diag(e^{iλ}) V†`.
pub fn expm_skew(s: &ComplexMatrix) -> Result<ComplexMatrix> {
    let residual = s.skew_hermitian_residual();
    if !(residual <= SKEW_TOL) {
        return Err(Error::NotSkewHermitian { residual });
    }
    let n = s.rows();
    let h = s.scale(Complex64::new(0.0, -1.0));
    let h = h.add(&h.adjoint()).scale(Complex64::new(0.5, 0.0));
    let (v, lambda) = hermitian_eigen(&h.to_nalgebra())?;
    let mut scaled = v.clone();
    for (k, l) in lambda.iter().enumerate() {
        let phase = Complex64::from_polar(1.0, *l);
        for r in 0..n {
            scaled[(r, k)] *= phase;
        }
    }
    Ok(ComplexMatrix::from_nalgebra(&(scaled * v.adjoint())))
}

/// `(P, P† F_f(X))` after checking that `P` is unitary and the left-translated
/// direction is skew-Hermitian.
fn lie_algebra_direction(
    phi: &Tensor4,
    x: &Tensor4,
    f: FlatteningId,
) -> Result<(ComplexMatrix, ComplexMatrix)> {
    if phi.d() != x.d() {
        return Err(Error::DimensionMismatch {
            expected: phi.d(),
            found: x.d(),
        });
    }
    let p = flatten(phi, f);
    let residual = p.unitarity_residual();
    if !(residual <= UNITARY_TOL) {
        return Err(Error::NotUnitary {
            flattening: f,
            residual,
        });
    }
    let y = p.adjoint().matmul(&flatten(x, f));
    let residual = y.skew_hermitian_residual();
    if !(residual <= SKEW_TOL) {
        return Err(Error::NotTangent {
            flattening: f,
            residual,
        });
    }
    Ok((p, y))
}

/// `F_f⁻¹(F_f(Φ) · exp(F_f(Φ)† F_f(X)))`.
pub fn exp_at(phi: &Tensor4, x: &Tensor4, f: FlatteningId) -> Result<Tensor4> {
    let (p, y) = lie_algebra_direction(phi, x, f)?;
    unflatten(&p.matmul(&expm_skew(&y)?), f, phi.d())
}

/// Carries `X` (tangent at `Φ`) to the left-translated direction at another
/// point `Ψ` of the same one-parameter subgroup: `F_f⁻¹(F_f(Ψ) F_f(Φ)† F_f(X))`.
pub fn translate_direction(
    phi: &Tensor4,
    x: &Tensor4,
    psi: &Tensor4,
    f: FlatteningId,
) -> Result<Tensor4> {
    let (_, y) = lie_algebra_direction(phi, x, f)?;
    unflatten(&flatten(psi, f).matmul(&y), f, phi.d())
}

#[derive(Clone, Debug)]
pub struct ExpResult {
    /// Pulled-back exponentials through F1, F2, F3.
    pub tensors: [Tensor4; 3],
    pub delta12: f64,
    pub delta13: f64,
    pub delta23: f64,
    pub tol: f64,
    pub agree: bool,
}

#[derive(Serialize)]
struct ExpResultJson<'a> {
    delta12: f64,
    delta13: f64,
    delta23: f64,
    max_deviation: f64,
    tol: f64,
    agree: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    tensor: Option<&'a [Complex64]>,
}

impl ExpResult {
    pub fn max_deviation(&self) -> f64 {
        self.delta12.max(self.delta13).max(self.delta23)
    }

    /// The common value `exp_Φ(X)` when the three curves agree.
    pub fn common(&self) -> Option<&Tensor4> {
        self.agree.then_some(&self.tensors[0])
    }

    pub fn to_json(&self, include_tensor: bool) -> serde_json::Value {
        serde_json::to_value(ExpResultJson {
            delta12: self.delta12,
            delta13: self.delta13,
            delta23: self.delta23,
            max_deviation: self.max_deviation(),
            tol: self.tol,
            agree: self.agree,
            tensor: include_tensor.then(|| self.tensors[0].coeffs()),
        })
        .expect("serializable")
    }
}

fn check_tangent(phi: &Tensor4, x: &Tensor4) -> Result<()> {
    for f in FlatteningId::ALL {
        let residual = membership_residual(x, phi, &[f])?;
        if !(residual <= TANGENT_TOL) {
            return Err(Error::NotTangent {
                flattening: f,
                residual,
            });
        }
    }
    Ok(())
}

/// Computes the three pulled-back exponentials and their pairwise distances.
pub fn agreement(phi: &Tensor4, x: &Tensor4, tol: f64) -> Result<ExpResult> {
    check_tangent(phi, x)?;
    let [e1, e2, e3] = [
        exp_at(phi, x, FlatteningId::F1)?,
        exp_at(phi, x, FlatteningId::F2)?,
        exp_at(phi, x, FlatteningId::F3)?,
    ];
    let delta12 = max_abs_diff(&e1, &e2)?;
    let delta13 = max_abs_diff(&e1, &e3)?;
    let delta23 = max_abs_diff(&e2, &e3)?;
    let agree = delta12.max(delta13).max(delta23) <= tol;
    Ok(ExpResult {
        tensors: [e1, e2, e3],
        delta12,
        delta13,
        delta23,
        tol,
        agree,
    })
}

/// Degree-`k` terms `F_f⁻¹(P (P† F_f(X))^k / k!)` for `k = 0..=maxdeg`.
pub fn taylor_terms(
    phi: &Tensor4,
    x: &Tensor4,
    f: FlatteningId,
    maxdeg: usize,
) -> Result<Vec<Tensor4>> {
    let (p, y) = lie_algebra_direction(phi, x, f)?;
    let mut out = Vec::with_capacity(maxdeg + 1);
    let mut term = p;
    out.push(unflatten(&term, f, phi.d())?);
    for k in 1..=maxdeg {
        term = term.matmul(&y).scale(Complex64::new(1.0 / k as f64, 0.0));
        out.push(unflatten(&term, f, phi.d())?);
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TaylorAgreement {
    /// Terms of degree `degree` are the first to differ; `relative` is the
    /// pairwise deviation over the largest term entry at that degree.
    DisagreesAt {
        degree: usize,
        relative: f64,
    },
    AgreesThrough {
        maxdeg: usize,
        worst_relative: f64,
    },
}

impl TaylorAgreement {
    pub fn first_disagreement(&self) -> Option<usize> {
        match self {
            TaylorAgreement::DisagreesAt { degree, .. } => Some(*degree),
            TaylorAgreement::AgreesThrough { .. } => None,
        }
    }
}

/// Compares the Taylor terms of the three curves degree by degree.
pub fn taylor_agreement_degree(
    phi: &Tensor4,
    x: &Tensor4,
    maxdeg: usize,
    rtol: f64,
) -> Result<TaylorAgreement> {
    let terms = FlatteningId::ALL
        .iter()
        .map(|&f| taylor_terms(phi, x, f, maxdeg))
        .collect::<Result<Vec<_>>>()?;
    let mut worst: f64 = 0.0;
    for k in 0..=maxdeg {
        let scale = terms.iter().map(|t| t[k].max_abs()).fold(0.0, f64::max);
        if scale == 0.0 {
            continue;
        }
        let dev = max_abs_diff(&terms[0][k], &terms[1][k])?
            .max(max_abs_diff(&terms[0][k], &terms[2][k])?)
            .max(max_abs_diff(&terms[1][k], &terms[2][k])?);
        let relative = dev / scale;
        if relative > rtol {
            return Ok(TaylorAgreement::DisagreesAt {
                degree: k,
                relative,
            });
        }
        worst = worst.max(relative);
    }
    Ok(TaylorAgreement::AgreesThrough {
        maxdeg,
        worst_relative: worst,
    })
}

/// Maximum pairwise deviation of the three exponentials at `s·X`.
pub fn deviation_at_scale(phi: &Tensor4, x: &Tensor4, s: f64) -> Result<f64> {
    let xs = x.scale(Complex64::new(s, 0.0));
    let e = FlatteningId::ALL
        .iter()
        .map(|&f| exp_at(phi, &xs, f))
        .collect::<Result<Vec<_>>>()?;
    Ok(max_abs_diff(&e[0], &e[1])?
        .max(max_abs_diff(&e[0], &e[2])?)
        .max(max_abs_diff(&e[1], &e[2])?))
}

/// Least-squares slope of `log(deviation)` against `log(s)`; the order at
/// which the curves separate.
pub fn disagreement_order_fit(phi: &Tensor4, x: &Tensor4, scales: &[f64]) -> Result<f64> {
    let mut points = Vec::with_capacity(scales.len());
    for &s in scales {
        let dev = deviation_at_scale(phi, x, s)?;
        if dev > NOISE_FLOOR {
            points.push((s.ln(), dev.ln()));
        }
    }
    if points.len() < 2 {
        return Err(Error::CannotFit);
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::CannotFit);
    }
    Ok(sxy / sxx)
}

/// `2^-3, …, 2^-10`.
pub fn default_fit_scales() -> Vec<f64> {
    (3..=10).map(|k| 2f64.powi(-k)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::tabulated_vector_d3;
    use crate::ols::OlsPair;
    use crate::tensor::parse_ket;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn seed3() -> Tensor4 {
        OlsPair::builtin(3).unwrap().to_tensor().unwrap()
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn random_skew(n: usize, scale: f64, rng: &mut ChaCha8Rng) -> ComplexMatrix {
        let a = ComplexMatrix::from_fn(n, n, |_, _| {
            c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        });
        a.sub(&a.adjoint()).scale(c(scale, 0.0))
    }

    /// Truncated power series; independent of the eigensolver path.
    fn series(s: &ComplexMatrix, terms: usize) -> ComplexMatrix {
        let mut acc = ComplexMatrix::identity(s.rows());
        let mut term = ComplexMatrix::identity(s.rows());
        for k in 1..terms {
            term = term.matmul(s).scale(c(1.0 / k as f64, 0.0));
            acc = acc.add(&term);
        }
        acc
    }

    #[test]
    fn exp_of_zero_is_identity() {
        assert_eq!(
            expm_skew(&ComplexMatrix::zeros(9, 9))
                .unwrap()
                .sub(&ComplexMatrix::identity(9))
                .max_abs(),
            0.0
        );
    }

    #[test]
    fn exp_of_diagonal_phases() {
        let theta = [0.3, -1.2, 2.5];
        let s = ComplexMatrix::diagonal(&theta.map(|t| c(0.0, t)));
        let e = expm_skew(&s).unwrap();
        let want = ComplexMatrix::diagonal(&theta.map(|t| Complex64::from_polar(1.0, t)));
        assert!(e.sub(&want).max_abs() < 1e-15);
    }

    #[test]
    fn exp_rejects_non_skew() {
        assert!(matches!(
            expm_skew(&ComplexMatrix::identity(3)),
            Err(Error::NotSkewHermitian { .. })
        ));
    }

    #[test]
    fn exp_matches_power_series() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for n in [4, 9, 16] {
            let s = random_skew(n, 0.4, &mut rng);
            let diff = expm_skew(&s).unwrap().sub(&series(&s, 40)).max_abs();
            assert!(diff < 1e-13, "n={n}: {diff}");
        }
    }

    #[test]
    fn exp_second_order_remainder_is_cubic() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let base = random_skew(9, 1.0, &mut rng);
        let rem = |h: f64| {
            let s = base.scale(c(h, 0.0));
            expm_skew(&s).unwrap().sub(&series(&s, 3)).max_abs()
        };
        let ratio = rem(1e-2) / rem(5e-3);
        assert!((ratio - 8.0).abs() < 0.2, "ratio {ratio}");
    }

    #[test]
    fn zero_direction_returns_base() {
        let phi = seed3();
        for f in FlatteningId::ALL {
            assert_eq!(
                max_abs_diff(&exp_at(&phi, &Tensor4::zeros(3), f).unwrap(), &phi).unwrap(),
                0.0
            );
        }
    }

    #[test]
    fn single_phase_direction() {
        let phi = seed3();
        let t = 0.7;
        let x = tabulated_vector_d3("g9").unwrap().tensor.scale(c(t, 0.0));
        let e = exp_at(&phi, &x, FlatteningId::F1).unwrap();
        let mut want = phi.clone();
        want.set(parse_ket("3333").unwrap(), Complex64::from_polar(1.0, t));
        assert!(max_abs_diff(&e, &want).unwrap() < 1e-15);
    }

    #[test]
    fn preconditions_are_named() {
        let phi = seed3();
        let x = phi.clone();
        assert!(matches!(
            exp_at(&phi, &x, FlatteningId::F2),
            Err(Error::NotTangent {
                flattening: FlatteningId::F2,
                ..
            })
        ));
        let zero = Tensor4::zeros(3);
        assert!(matches!(
            exp_at(&zero, &zero, FlatteningId::F1),
            Err(Error::NotUnitary { .. })
        ));
        assert!(matches!(
            agreement(&phi, &x, 1e-9),
            Err(Error::NotTangent { .. })
        ));
    }

    #[test]
    fn taylor_low_terms() {
        let phi = seed3();
        let x = tabulated_vector_d3("e1").unwrap().tensor.scale(c(0.3, 0.0));
        for f in FlatteningId::ALL {
            let terms = taylor_terms(&phi, &x, f, 3).unwrap();
            assert_eq!(max_abs_diff(&terms[0], &phi).unwrap(), 0.0);
            assert!(max_abs_diff(&terms[1], &x).unwrap() < 1e-15);
        }
    }

    #[test]
    fn cross_block_disagrees_at_degree_two() {
        let phi = seed3();
        let x =
            &tabulated_vector_d3("e1").unwrap().tensor + &tabulated_vector_d3("e4").unwrap().tensor;
        let res = taylor_agreement_degree(&phi, &x, 10, DEFAULT_TAYLOR_RTOL).unwrap();
        assert_eq!(res.first_disagreement(), Some(2));
        let slope = disagreement_order_fit(&phi, &x, &default_fit_scales()).unwrap();
        assert!((slope - 2.0).abs() < 0.1, "slope {slope}");
    }

    #[test]
    fn fit_needs_signal() {
        let phi = seed3();
        let x = tabulated_vector_d3("g1").unwrap().tensor;
        assert!(matches!(
            disagreement_order_fit(&phi, &x, &default_fit_scales()),
            Err(Error::CannotFit)
        ));
    }

    #[test]
    fn result_json() {
        let phi = seed3();
        let x = tabulated_vector_d3("e1").unwrap().tensor;
        let r = agreement(&phi, &x, 1e-9).unwrap();
        assert!(r.agree);
        let json = r.to_json(false);
        assert_eq!(json["agree"], true);
        assert!(json.get("tensor").is_none());
        assert_eq!(r.to_json(true)["tensor"].as_array().unwrap().len(), 81);
    }
}
