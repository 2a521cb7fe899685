//! The tabulated basis of the order-3 tangent space: twelve real vectors
//! `e_j` of support 6, their imaginary partners `f_j` (same support, all
//! coefficients `+i`), and nine imaginary unit vectors `g_k` on the seed's
//! support.

use num_bigint::BigInt;
use num_traits::Zero;

use crate::exact::Rational;
use crate::tangent::TangentVector;
use crate::tensor::{linearize, parse_ket};

const E_TERMS: [&str; 12] = [
    "-1132+1223-2113+2231-3121+3212",
    "-1111+1323-2122+2331-3133+3312",
    "-1211+1332-2222+2313-3233+3321",
    "-1131-1213-1322+2123+2232+2311",
    "-1112-1221-1333+3123+3232+3311",
    "-2112-2221-2333+3131+3213+3322",
    "+1113-1321-2223+2312-3122+3211",
    "-1133+1222+2121-2332-3231+3323",
    "+1212-1331+2111-2233-3132+3313",
    "+1122-1233+2212-2323-3113+3332",
    "+1121-1313-2133+2211-3223+3331",
    "-1231+1312+2132-2321-3111+3222",
];

const G_TERMS: [&str; 9] = [
    "1123", "1232", "1311", "2131", "2213", "2322", "3112", "3221", "3333",
];

/// Parses `"-1132+1223"` into `(sign, ket)` terms.
fn terms(expr: &str) -> Vec<(i64, &str)> {
    let mut out = Vec::new();
    let mut rest = expr;
    while !rest.is_empty() {
        let sign = match rest.as_bytes()[0] {
            b'-' => -1,
            _ => 1,
        };
        rest = rest.trim_start_matches(['+', '-']);
        let end = rest.find(['+', '-']).unwrap_or(rest.len());
        out.push((sign, &rest[..end]));
        rest = &rest[end..];
    }
    out
}

fn vector(terms: &[(i64, &str)], imaginary: bool) -> TangentVector {
    let d = 3;
    let mut v = vec![Rational::zero(); 2 * d * d * d * d];
    for &(sign, ket) in terms {
        let lin = linearize(d, parse_ket(ket).expect("fixture ket"));
        v[2 * lin + usize::from(imaginary)] = Rational::from_integer(BigInt::from(sign));
    }
    TangentVector::from_exact(d, v).expect("fixture length")
}

/// `e1..e12`, `f1..f12`, `g1..g9`, in that order.
pub fn tabulated_basis_d3() -> Vec<(String, TangentVector)> {
    let mut out = Vec::with_capacity(33);
    for (j, expr) in E_TERMS.iter().enumerate() {
        out.push((format!("e{}", j + 1), vector(&terms(expr), false)));
    }
    for (j, expr) in E_TERMS.iter().enumerate() {
        let unsigned: Vec<(i64, &str)> = terms(expr).into_iter().map(|(_, k)| (1, k)).collect();
        out.push((format!("f{}", j + 1), vector(&unsigned, true)));
    }
    for (k, ket) in G_TERMS.iter().enumerate() {
        out.push((format!("g{}", k + 1), vector(&[(1, ket)], true)));
    }
    out
}

/// Looks up fixture vectors by name (`"e1"`, `"f12"`, `"g9"`).
pub fn tabulated_vector_d3(name: &str) -> Option<TangentVector> {
    tabulated_basis_d3()
        .into_iter()
        .find(|(n, _)| n == name)
        .map(|(_, v)| v)
}
