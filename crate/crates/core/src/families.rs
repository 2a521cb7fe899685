//! Named subspaces of the tangent space, sampled exponential families, and
//! their reports.

use std::f64::consts::PI;
use std::fmt::Write as _;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fixtures::tabulated_basis_d3;
use crate::liecurve::{agreement, TANGENT_TOL};
use crate::ols::OlsPair;
use crate::perfect::check_p4d;
use crate::tangent::{classify, solve_tangent, verify_membership, TangentVector};
use crate::tensor::{flatten, ComplexMatrix, FlatteningId, Tensor4};

/// Tolerance for the generalized-permutation smell test.
pub const SMELL_TOL: f64 = 1e-9;

/// The seed square used for order `d`: the tabulated one for 3, 4, 5 and
/// the cyclic construction for other odd orders.
pub fn seed_ols(d: usize) -> Result<OlsPair> {
    match d {
        3..=5 => OlsPair::builtin(d),
        _ => OlsPair::cyclic(d),
    }
}

/// Named tangent basis at the seed of order `d`. Order 3 uses the tabulated
/// vectors; other orders use the classified exact kernel.
pub fn named_basis(d: usize) -> Result<Vec<(String, TangentVector)>> {
    if d == 3 {
        return Ok(tabulated_basis_d3());
    }
    let seed = seed_ols(d)?.to_tensor()?;
    let basis = solve_tangent(&seed, &FlatteningId::ALL)?;
    Ok(classify(&basis)?.named())
}

#[derive(Clone, Debug)]
pub struct NamedDirection {
    pub name: String,
    pub tensor: Tensor4,
}

pub fn resolve_span(
    basis: &[(String, TangentVector)],
    names: &[&str],
) -> Result<Vec<NamedDirection>> {
    names
        .iter()
        .map(|name| {
            basis
                .iter()
                .find(|(n, _)| n == name)
                .map(|(n, v)| NamedDirection {
                    name: n.clone(),
                    tensor: v.tensor.clone(),
                })
                .ok_or_else(|| Error::UnknownVector((*name).to_string()))
        })
        .collect()
}

#[derive(Clone, Debug)]
pub struct FamilySpec {
    pub name: String,
    pub seed: Tensor4,
    pub span: Vec<NamedDirection>,
    /// Sampling interval per coordinate.
    pub bounds: Vec<(f64, f64)>,
    pub samples: usize,
    pub rng_seed: u64,
    /// When set, F1 of each sample is compared with the phase-decorated
    /// permutation matrix of this square.
    pub phase_reference: Option<OlsPair>,
}

impl FamilySpec {
    pub fn new(name: impl Into<String>, seed: Tensor4, span: Vec<NamedDirection>) -> Self {
        let bounds = vec![(-PI, PI); span.len()];
        Self {
            name: name.into(),
            seed,
            span,
            bounds,
            samples: 100,
            rng_seed: 0,
            phase_reference: None,
        }
    }

    pub fn with_samples(mut self, samples: usize) -> Self {
        self.samples = samples;
        self
    }

    pub fn with_rng_seed(mut self, seed: u64) -> Self {
        self.rng_seed = seed;
        self
    }

    pub fn with_box(mut self, lo: f64, hi: f64) -> Self {
        self.bounds = vec![(lo, hi); self.span.len()];
        self
    }

    pub fn dim(&self) -> usize {
        self.span.len()
    }

    /// Span vectors tangent at the seed and linearly independent over R.
    pub fn validate(&self) -> Result<()> {
        if self.samples == 0 {
            return Err(Error::InvalidConfig(
                "sample count must be at least 1".into(),
            ));
        }
        if self.bounds.len() != self.span.len() {
            return Err(Error::LengthMismatch {
                expected: self.span.len(),
                found: self.bounds.len(),
            });
        }
        for v in &self.span {
            let residual = verify_membership(&v.tensor, &self.seed)?;
            if residual > TANGENT_TOL {
                return Err(Error::InvalidConfig(format!(
                    "{} is not tangent (residual {residual:.2e})",
                    v.name
                )));
            }
        }
        let rows = 2 * self.seed.d().pow(4);
        let m = DMatrix::from_fn(rows, self.span.len(), |r, c| {
            let z = self.span[c].tensor.coeffs()[r / 2];
            if r % 2 == 0 {
                z.re
            } else {
                z.im
            }
        });
        let rank = m
            .svd(false, false)
            .singular_values
            .iter()
            .filter(|&&s| s > 1e-9)
            .count();
        if rank != self.span.len() {
            return Err(Error::InvalidConfig(format!(
                "span of {} vectors has rank {rank}",
                self.span.len()
            )));
        }
        Ok(())
    }

    /// `Σ t_j X_j`.
    pub fn direction(&self, t: &[f64]) -> Tensor4 {
        self.span
            .iter()
            .zip(t)
            .fold(Tensor4::zeros(self.seed.d()), |acc, (v, &tj)| {
                acc.axpy(Complex64::new(tj, 0.0), &v.tensor)
            })
    }

    pub fn parameter_samples(&self) -> Vec<Vec<f64>> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.rng_seed);
        (0..self.samples)
            .map(|_| {
                self.bounds
                    .iter()
                    .map(|&(lo, hi)| rng.gen_range(lo..=hi))
                    .collect()
            })
            .collect()
    }
}

fn named_span(basis: &[(String, TangentVector)], names: &[String]) -> Result<Vec<NamedDirection>> {
    let refs: Vec<&str> = names.iter().map(String::as_str).collect();
    resolve_span(basis, &refs)
}

/// The named subspaces for order `d`: for 3, the twelve four-dimensional
/// spans `{e_i, f_i, e_j, f_j}` inside each block of three pairs, the phase
/// span of `g_1..g_9`, and the four six-dimensional blocks; for 4 and 5,
/// the phase span of all `g_k`.
pub fn builtin_spans(d: usize) -> Result<Vec<FamilySpec>> {
    let ols = match d {
        3..=5 => OlsPair::builtin(d)?,
        _ => return Err(Error::UnsupportedOrder(d)),
    };
    let seed = ols.to_tensor()?;
    let basis = named_basis(d)?;
    let mut out = Vec::new();
    let g_names: Vec<String> = basis
        .iter()
        .map(|(n, _)| n.clone())
        .filter(|n| n.starts_with('g'))
        .collect();
    if d == 3 {
        for block in [[1, 2, 3], [4, 5, 6], [7, 8, 9], [10, 11, 12]] {
            for a in 0..3 {
                for b in a + 1..3 {
                    let (i, j) = (block[a], block[b]);
                    let names = [
                        format!("e{i}"),
                        format!("f{i}"),
                        format!("e{j}"),
                        format!("f{j}"),
                    ];
                    out.push(FamilySpec::new(
                        format!("prop3:e{i}e{j}"),
                        seed.clone(),
                        named_span(&basis, &names)?,
                    ));
                }
            }
        }
        let mut classical = FamilySpec::new("prop4", seed.clone(), named_span(&basis, &g_names)?);
        classical.phase_reference = Some(ols.clone());
        out.push(classical);
        for [i, j, k] in [[1, 2, 3], [4, 5, 6], [7, 8, 9], [10, 11, 12]] {
            let names: Vec<String> = [i, j, k]
                .iter()
                .flat_map(|v| [format!("e{v}"), format!("f{v}")])
                .collect();
            out.push(FamilySpec::new(
                format!("prop5:e{i}e{j}e{k}"),
                seed.clone(),
                named_span(&basis, &names)?,
            ));
        }
    } else {
        let mut classical = FamilySpec::new("prop9", seed, named_span(&basis, &g_names)?);
        classical.phase_reference = Some(ols);
        out.push(classical);
    }
    Ok(out)
}

/// Looks up a built-in family by name, e.g. `prop3:e1e2`, `prop4`, `prop9`.
pub fn builtin_family(d: usize, name: &str) -> Result<FamilySpec> {
    builtin_spans(d)?
        .into_iter()
        .find(|s| s.name == name)
        .ok_or_else(|| Error::UnknownFamily(name.to_string()))
}

/// The F1 permutation matrix of the seed with the unit on the `k`-th seed
/// support tuple (in lexicographic order) replaced by `e^{i t_k}`.
pub fn classical_phase_matrix(d: usize, t: &[f64], ols: &OlsPair) -> Result<ComplexMatrix> {
    if ols.d != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: ols.d,
        });
    }
    if t.len() != d * d {
        return Err(Error::LengthMismatch {
            expected: d * d,
            found: t.len(),
        });
    }
    let seed = ols.to_tensor()?;
    let mut m = ComplexMatrix::zeros(d * d, d * d);
    for (k, lin) in seed.support(0.5).into_iter().enumerate() {
        let (r, c) = FlatteningId::F1.position(d, crate::tensor::delinearize(d, lin));
        m.set(r, c, Complex64::from_polar(1.0, t[k]));
    }
    Ok(m)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SmellReport {
    /// Every flattening is a phase-decorated permutation matrix.
    pub ols_form: bool,
    pub nonzeros: usize,
}

/// Necessary condition for being locally equivalent to an OLS seed by
/// diagonal phases: all three flattenings are generalized permutation
/// matrices with unimodular entries. Failing it does not prove
/// inequivalence under general local unitaries.
pub fn smell_test_nonclassical(t: &Tensor4) -> SmellReport {
    let nonzeros = t.support(SMELL_TOL).len();
    let ols_form = FlatteningId::ALL.iter().all(|&f| {
        let m = flatten(t, f);
        let n = m.rows();
        let mut col_hits = vec![0usize; n];
        for r in 0..n {
            let mut row_hits = 0;
            for c in 0..n {
                let z = m.get(r, c);
                if z.norm() > SMELL_TOL {
                    if (z.norm() - 1.0).abs() > SMELL_TOL {
                        return false;
                    }
                    row_hits += 1;
                    col_hits[c] += 1;
                }
            }
            if row_hits != 1 {
                return false;
            }
        }
        col_hits.iter().all(|&h| h == 1)
    });
    SmellReport { ols_form, nonzeros }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SampleRow {
    pub index: usize,
    pub params: Vec<f64>,
    pub max_deviation: f64,
    pub agree: bool,
    /// Unitarity residual of the common tensor, when the curves agree.
    pub perfectness_residual: Option<f64>,
    pub perfect: bool,
    pub smell: SmellReport,
    /// `max |F1(exp) − phase matrix|`, for classical families.
    pub phase_mismatch: Option<f64>,
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FamilyReport {
    pub name: String,
    pub d: usize,
    pub dim: usize,
    pub span: Vec<String>,
    pub samples: usize,
    pub rng_seed: u64,
    pub tol: f64,
    pub agree_count: usize,
    pub perfect_count: usize,
    pub non_ols_count: usize,
    pub error_count: usize,
    pub max_deviation: f64,
    pub max_perfectness_residual: f64,
    pub max_phase_mismatch: Option<f64>,
    pub rows: Vec<SampleRow>,
}

#[derive(Debug, PartialEq)]
struct Aggregates {
    agree_count: usize,
    perfect_count: usize,
    non_ols_count: usize,
    error_count: usize,
    max_deviation: f64,
    max_perfectness_residual: f64,
    max_phase_mismatch: Option<f64>,
}

fn aggregate(rows: &[SampleRow]) -> Aggregates {
    let phase: Vec<f64> = rows.iter().filter_map(|r| r.phase_mismatch).collect();
    Aggregates {
        agree_count: rows.iter().filter(|r| r.agree).count(),
        perfect_count: rows.iter().filter(|r| r.perfect).count(),
        non_ols_count: rows.iter().filter(|r| !r.smell.ols_form).count(),
        error_count: rows.iter().filter(|r| r.error.is_some()).count(),
        max_deviation: rows.iter().map(|r| r.max_deviation).fold(0.0, f64::max),
        max_perfectness_residual: rows
            .iter()
            .filter_map(|r| r.perfectness_residual)
            .fold(0.0, f64::max),
        max_phase_mismatch: (!phase.is_empty()).then(|| phase.iter().copied().fold(0.0, f64::max)),
    }
}

impl FamilyReport {
    /// `true` when the stored aggregates equal a recomputation from rows.
    pub fn aggregates_consistent(&self) -> bool {
        aggregate(&self.rows)
            == Aggregates {
                agree_count: self.agree_count,
                perfect_count: self.perfect_count,
                non_ols_count: self.non_ols_count,
                error_count: self.error_count,
                max_deviation: self.max_deviation,
                max_perfectness_residual: self.max_perfectness_residual,
                max_phase_mismatch: self.max_phase_mismatch,
            }
    }

    pub fn all_agree_and_perfect(&self) -> bool {
        self.agree_count == self.samples && self.perfect_count == self.samples
    }

    pub fn to_json_string(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// One line per sample: parameters (`;`-separated), maximal deviation,
    /// perfectness residual, smell result.
    pub fn to_csv_string(&self) -> String {
        let mut out =
            String::from("index,params,max_deviation,agree,perfectness_residual,smell,nonzeros\n");
        for r in &self.rows {
            let params: Vec<String> = r.params.iter().map(|v| format!("{v:e}")).collect();
            let _ = writeln!(
                out,
                "{},{},{:e},{},{},{},{}",
                r.index,
                params.join(";"),
                r.max_deviation,
                r.agree,
                r.perfectness_residual
                    .map(|v| format!("{v:e}"))
                    .unwrap_or_default(),
                if r.smell.ols_form {
                    "ols-form"
                } else {
                    "non-ols-form"
                },
                r.smell.nonzeros,
            );
        }
        out
    }
}

fn evaluate(spec: &FamilySpec, index: usize, params: Vec<f64>, tol: f64) -> SampleRow {
    let x = spec.direction(&params);
    match agreement(&spec.seed, &x, tol) {
        Ok(res) => {
            let perf = res.agree.then(|| check_p4d(&res.tensors[0], tol));
            let phase_mismatch = match (&spec.phase_reference, res.agree) {
                (Some(ols), true) => classical_phase_matrix(spec.seed.d(), &params, ols)
                    .ok()
                    .map(|m| flatten(&res.tensors[0], FlatteningId::F1).sub(&m).max_abs()),
                _ => None,
            };
            SampleRow {
                index,
                max_deviation: res.max_deviation(),
                agree: res.agree,
                perfectness_residual: perf.as_ref().map(|p| p.max_residual()),
                perfect: perf.is_some_and(|p| p.pass),
                smell: smell_test_nonclassical(&res.tensors[0]),
                phase_mismatch,
                error: None,
                params,
            }
        }
        Err(e) => SampleRow {
            index,
            params,
            max_deviation: f64::INFINITY,
            agree: false,
            perfectness_residual: None,
            perfect: false,
            smell: SmellReport {
                ols_form: false,
                nonzeros: 0,
            },
            phase_mismatch: None,
            error: Some(e.to_string()),
        },
    }
}

/// Samples the family; parameters are drawn sequentially from the seeded
/// generator, evaluated in parallel, and reported in sample order.
pub fn sample_family(spec: &FamilySpec, tol: f64) -> FamilyReport {
    let rows: Vec<SampleRow> = spec
        .parameter_samples()
        .into_par_iter()
        .enumerate()
        .map(|(i, params)| evaluate(spec, i, params, tol))
        .collect();
    let agg = aggregate(&rows);
    FamilyReport {
        name: spec.name.clone(),
        d: spec.seed.d(),
        dim: spec.dim(),
        span: spec.span.iter().map(|v| v.name.clone()).collect(),
        samples: rows.len(),
        rng_seed: spec.rng_seed,
        tol,
        agree_count: agg.agree_count,
        perfect_count: agg.perfect_count,
        non_ols_count: agg.non_ols_count,
        error_count: agg.error_count,
        max_deviation: agg.max_deviation,
        max_perfectness_residual: agg.max_perfectness_residual,
        max_phase_mismatch: agg.max_phase_mismatch,
        rows,
    }
}
