//! Membership in `P(4,d)` and the scale-free perfectness check.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::tensor::{delinearize, flatten, FlatteningId, Tensor4};

pub const DEFAULT_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PerfectnessReport {
    /// `max |F_i F_i† − I|` for F1, F2, F3.
    pub residuals: [f64; 3],
    pub tol: f64,
    pub pass: bool,
}

impl PerfectnessReport {
    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().copied().fold(0.0, f64::max)
    }
}

/// All three balanced flattenings unitary within `tol`.
pub fn check_p4d(t: &Tensor4, tol: f64) -> PerfectnessReport {
    let residuals = FlatteningId::ALL.map(|f| flatten(t, f).unitarity_residual());
    let pass = residuals.iter().all(|&r| r <= tol);
    PerfectnessReport {
        residuals,
        tol,
        pass,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BipartitionCheck {
    /// 1-based slots on the small side.
    pub small_side: Vec<usize>,
    /// Estimated `c` in `G = c·I`, with `G` the Gram matrix on the small side.
    pub constant: f64,
    /// `max |G − c·I| / c`.
    pub relative_residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProportionalReport {
    pub bipartitions: Vec<BipartitionCheck>,
    /// Common constant over the four 1|3 splits (mean).
    pub constant_one_three: f64,
    /// Common constant over the three 2|2 splits (mean).
    pub constant_two_two: f64,
    pub tol: f64,
    pub pass: bool,
}

const SMALL_SIDES: [&[usize]; 7] = [&[0], &[1], &[2], &[3], &[0, 1], &[0, 2], &[0, 3]];

fn gram_on(t: &Tensor4, small: &[usize]) -> (usize, Vec<Complex64>) {
    let d = t.d();
    let n = d.pow(small.len() as u32);
    let rest: Vec<usize> = (0..4).filter(|s| !small.contains(s)).collect();
    let m = d.pow(rest.len() as u32);
    let mut mat = vec![Complex64::new(0.0, 0.0); n * m];
    for (lin, z) in t.coeffs().iter().enumerate() {
        let idx = delinearize(d, lin);
        let row = small.iter().fold(0, |acc, &s| acc * d + idx[s]);
        let col = rest.iter().fold(0, |acc, &s| acc * d + idx[s]);
        mat[row * m + col] = *z;
    }
    let mut gram = vec![Complex64::new(0.0, 0.0); n * n];
    for i in 0..n {
        for j in 0..n {
            gram[i * n + j] = (0..m).map(|k| mat[i * m + k] * mat[j * m + k].conj()).sum();
        }
    }
    (n, gram)
}

/// Perfectness up to scale: every split with `|I| <= |J|` (four 1|3, three
/// 2|2) has a Gram matrix proportional to the identity, with one common
/// constant per split size.
pub fn check_perfect_proportional(t: &Tensor4, tol: f64) -> Result<ProportionalReport> {
    if t.is_zero() {
        return Err(Error::ZeroTensor);
    }
    let mut bipartitions = Vec::with_capacity(SMALL_SIDES.len());
    for small in SMALL_SIDES {
        let (n, gram) = gram_on(t, small);
        let constant = (0..n).map(|i| gram[i * n + i].re).sum::<f64>() / n as f64;
        let mut dev: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                let target = if i == j { constant } else { 0.0 };
                dev = dev.max((gram[i * n + j] - target).norm());
            }
        }
        bipartitions.push(BipartitionCheck {
            small_side: small.iter().map(|s| s + 1).collect(),
            constant,
            relative_residual: dev / constant,
        });
    }
    let mean = |range: std::ops::Range<usize>| {
        bipartitions[range.clone()]
            .iter()
            .map(|b| b.constant)
            .sum::<f64>()
            / range.len() as f64
    };
    let constant_one_three = mean(0..4);
    let constant_two_two = mean(4..7);
    let common = |range: std::ops::Range<usize>, c: f64| {
        bipartitions[range]
            .iter()
            .all(|b| (b.constant - c).abs() <= tol * c)
    };
    let pass = bipartitions.iter().all(|b| b.relative_residual <= tol)
        && common(0..4, constant_one_three)
        && common(4..7, constant_two_two);
    Ok(ProportionalReport {
        bipartitions,
        constant_one_three,
        constant_two_two,
        tol,
        pass,
    })
}
