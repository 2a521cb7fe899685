//! The eleven acceptance criteria, each at its stated tolerance and time
//! budget. Prints one PASS/FAIL line per criterion.

use std::time::{Duration, Instant};

use ameforge::closed_form::{compare_with_exponential, psi, AppendixParams};
use ameforge::exact::{rank, subspace_compare, ExactMatrix, SubspaceRelation};
use ameforge::families::{builtin_family, builtin_spans, named_basis, sample_family};
use ameforge::fixtures::tabulated_basis_d3;
use ameforge::liecurve::{
    agreement, default_fit_scales, disagreement_order_fit, expm_skew, taylor_agreement_degree,
    TaylorAgreement,
};
use ameforge::ols::OlsPair;
use ameforge::perfect::check_p4d;
use ameforge::repro::{random_block_vector, random_cross_block_vector, BLOCKS};
use ameforge::tangent::{classify, exact_membership, solve_tangent, Purity, TangentBasis};
use ameforge::tensor::{flatten, unflatten, ComplexMatrix, FlatteningId, Tensor4};
use ameforge::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn seed(d: usize) -> Tensor4 {
    OlsPair::builtin(d).unwrap().to_tensor().unwrap()
}

fn tangent(d: usize) -> TangentBasis {
    solve_tangent(&seed(d), &FlatteningId::ALL).unwrap()
}

fn ols_seeds() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut perms = true;
    for d in 3..=5 {
        let t = seed(d);
        perms &= FlatteningId::ALL
            .iter()
            .all(|&f| flatten(&t, f).is_permutation(0.0));
        worst = worst.max(check_p4d(&t, 1e-14).max_residual());
    }
    outcome(
        perms && worst < 1e-14,
        format!("exact permutation flattenings: {perms}, max residual {worst:.1e}"),
    )
}

fn tangent_dimensions() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for (d, want, budget) in [(3, 33, 5.0), (4, 76, 600.0), (5, 145, 600.0)] {
        let start = Instant::now();
        let dim = tangent(d).dim();
        let secs = start.elapsed().as_secs_f64();
        ok &= dim == want && secs < budget;
        parts.push(format!("d={d}: {dim} in {secs:.2}s"));
    }
    outcome(ok, parts.join(", "))
}

fn fixture_basis() -> Outcome {
    let phi = seed(3);
    let fixture = tabulated_basis_d3();
    let tangent_ok = fixture
        .iter()
        .all(|(_, v)| exact_membership(v, &phi, &FlatteningId::ALL).unwrap());
    let exact: Vec<_> = fixture
        .iter()
        .map(|(_, v)| v.exact.clone().unwrap())
        .collect();
    let independent = rank(&ExactMatrix::from_vectors(162, &exact).unwrap()) == 33;
    let cmp = subspace_compare(&exact, &tangent(3).exact_vectors()).unwrap();
    outcome(
        tangent_ok && independent && cmp.relation == SubspaceRelation::Equal,
        format!(
            "exactly tangent: {tangent_ok}, rank 33: {independent}, span vs kernel: {:?}",
            cmp.relation
        ),
    )
}

fn structure() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for (d, pair_support, pairs, units, h) in
        [(3, 6, 12, 9, 0), (4, 8, 24, 16, 12), (5, 10, 60, 25, 0)]
    {
        let s = classify(&tangent(d)).unwrap().summary;
        let singles: usize = s.singles.iter().map(|c| c.count).sum();
        ok &= s.unresolved == 0
            && s.pairs.len() == 1
            && s.pairs.get(&pair_support) == Some(&pairs)
            && s.single_count(1, Purity::Imaginary) == units
            && s.single_count(4, Purity::Imaginary) == h
            && singles == units + h;
        parts.push(s.to_string());
    }
    outcome(ok, parts.join(" | "))
}

fn intersections() -> Outcome {
    use FlatteningId::*;
    let mut ok = true;
    let mut parts = Vec::new();
    for d in 3..=5 {
        let phi = seed(d);
        let triple = tangent(d);
        let mut dims = Vec::new();
        for pair in [[F1, F2], [F1, F3], [F2, F3]] {
            let pairwise = solve_tangent(&phi, &pair).unwrap();
            let rel = subspace_compare(&triple.exact_vectors(), &pairwise.exact_vectors())
                .unwrap()
                .relation;
            ok &= match d {
                4 => rel == SubspaceRelation::FirstInSecond && triple.dim() < pairwise.dim(),
                _ => rel == SubspaceRelation::Equal,
            };
            dims.push(pairwise.dim().to_string());
        }
        parts.push(format!(
            "d={d}: triple {} pairwise {}",
            triple.dim(),
            dims.join("/")
        ));
    }
    outcome(ok, parts.join(", "))
}

fn quadruple_families() -> Outcome {
    let start = Instant::now();
    let mut ok = true;
    let mut worst: f64 = 0.0;
    let specs: Vec<_> = builtin_spans(3)
        .unwrap()
        .into_iter()
        .filter(|s| s.name.starts_with("prop3:"))
        .collect();
    for (k, spec) in specs.iter().enumerate() {
        let r = sample_family(
            &spec
                .clone()
                .with_samples(200)
                .with_rng_seed(1000 + k as u64),
            1e-9,
        );
        let generic = r
            .rows
            .iter()
            .all(|row| !row.smell.ols_form && row.smell.nonzeros == 27);
        ok &= r.agree_count == 200 && r.perfect_count == 200 && r.max_deviation <= 1e-9 && generic;
        worst = worst.max(r.max_deviation);
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(
        ok && specs.len() == 12 && secs < 30.0,
        format!(
            "{} spans x 200 samples, max deviation {worst:.1e}, {secs:.2}s",
            specs.len()
        ),
    )
}

fn classical_families() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for (d, name) in [(3, "prop4"), (4, "prop9"), (5, "prop9")] {
        let spec = builtin_family(d, name)
            .unwrap()
            .with_samples(100)
            .with_rng_seed(2000 + d as u64);
        let r = sample_family(&spec, 1e-10);
        let phase = r.max_phase_mismatch.unwrap_or(f64::INFINITY);
        ok &= spec.dim() == d * d
            && r.agree_count == 100
            && r.max_deviation <= 1e-10
            && phase <= 1e-10;
        parts.push(format!(
            "d={d} ({} params): deviation {:.1e}, phase {phase:.1e}",
            spec.dim(),
            r.max_deviation
        ));
    }
    outcome(ok, parts.join(", "))
}

fn h_vectors_fail() -> Outcome {
    let phi = seed(4);
    let named = named_basis(4).unwrap();
    let devs: Vec<f64> = named
        .iter()
        .filter(|(n, _)| n.starts_with('h'))
        .map(|(_, v)| agreement(&phi, &v.tensor, 1e-9).unwrap().max_deviation())
        .collect();
    let min = devs.iter().copied().fold(f64::INFINITY, f64::min);
    outcome(
        devs.len() == 12 && min > 1e-3,
        format!("{} h vectors, min deviation {min:.3}", devs.len()),
    )
}

fn taylor_horizons() -> Outcome {
    let start = Instant::now();
    let phi = seed(3);
    let mut rng = ChaCha8Rng::seed_from_u64(3000);
    let mut blocks_ok = true;
    for block in BLOCKS {
        for _ in 0..20 {
            let x = random_block_vector(block, &mut rng).unwrap();
            let r = taylor_agreement_degree(&phi, &x, 13, 1e-8).unwrap();
            blocks_ok &= matches!(r, TaylorAgreement::AgreesThrough { maxdeg: 13, .. });
        }
    }
    let mut degrees_ok = true;
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for _ in 0..20 {
        let x = random_cross_block_vector(&mut rng).unwrap();
        degrees_ok &= taylor_agreement_degree(&phi, &x, 13, 1e-8)
            .unwrap()
            .first_disagreement()
            == Some(2);
        let slope = disagreement_order_fit(&phi, &x, &default_fit_scales()).unwrap();
        lo = lo.min(slope);
        hi = hi.max(slope);
    }
    let slopes_ok = (lo - 2.0).abs() <= 0.1 && (hi - 2.0).abs() <= 0.1;
    let secs = start.elapsed().as_secs_f64();
    outcome(
        blocks_ok && degrees_ok && slopes_ok && secs < 120.0,
        format!(
            "blocks through 13: {blocks_ok}, cross-block first at 2: {degrees_ok}, slopes {lo:.3}..{hi:.3}, {secs:.2}s"
        ),
    )
}

fn closed_form_oracle() -> Outcome {
    let start = Instant::now();
    let r = compare_with_exponential(450, 50, 4000, 1e-9).unwrap();
    let near = r
        .rows
        .iter()
        .filter(|row| row.params.norm_sq() < 1e-6)
        .count();
    let origin = psi(&AppendixParams::new(0.0, 0.0, 0.0, 0.0)) == seed(3);
    let secs = start.elapsed().as_secs_f64();
    outcome(
        r.rows.len() == 500 && near >= 50 && r.max_deviation <= 1e-9 && origin && secs < 10.0,
        format!("{} points ({near} near origin), max deviation {:.1e}, psi(0) exact: {origin}, {secs:.2}s", r.rows.len(), r.max_deviation),
    )
}

fn property_suite() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5000);
    let mut round_trip = true;
    for d in 2..=5 {
        let t = Tensor4::new(
            d,
            (0..d.pow(4))
                .map(|_| Complex64::new(rng.gen(), rng.gen()))
                .collect(),
        )
        .unwrap();
        for f in FlatteningId::ALL {
            round_trip &= unflatten(&flatten(&t, f), f, d).unwrap() == t;
        }
    }
    let mut worst_unitary: f64 = 0.0;
    for n in [9, 16, 25] {
        for _ in 0..100 {
            let a = ComplexMatrix::from_fn(n, n, |_, _| {
                Complex64::new(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0))
            });
            let s = a.sub(&a.adjoint()).scale(Complex64::new(0.5, 0.0));
            worst_unitary = worst_unitary.max(expm_skew(&s).unwrap().unitarity_residual());
        }
    }
    let mut kernel_exact = true;
    for d in 3..=5 {
        let phi = seed(d);
        let basis = tangent(d);
        kernel_exact &= basis
            .vectors
            .iter()
            .all(|v| exact_membership(v, &phi, &FlatteningId::ALL).unwrap());
    }
    let spec = builtin_family(3, "prop3:e1e2")
        .unwrap()
        .with_samples(30)
        .with_rng_seed(6000);
    let a = sample_family(&spec, 1e-9);
    let b = sample_family(&spec, 1e-9);
    let reproducible = a.to_json_string().unwrap() == b.to_json_string().unwrap()
        && a.to_csv_string() == b.to_csv_string();
    outcome(
        round_trip && worst_unitary <= 1e-11 && kernel_exact && reproducible,
        format!(
            "round trips: {round_trip}, expm unitarity {worst_unitary:.1e}, kernel residual zero: {kernel_exact}, reproducible: {reproducible}"
        ),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("OLS seeds", ols_seeds),
        ("tangent dimensions", tangent_dimensions),
        ("fixture basis", fixture_basis),
        ("class structure", structure),
        ("intersections", intersections),
        ("four-parameter families", quadruple_families),
        ("classical phase families", classical_families),
        ("h-vectors fail", h_vectors_fail),
        ("Taylor horizons", taylor_horizons),
        ("closed-form oracle", closed_form_oracle),
        ("property suite", property_suite),
    ];
    let mut failed = Vec::new();
    let mut total = Duration::ZERO;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let o = run();
        let elapsed = start.elapsed();
        total += elapsed;
        println!(
            "criterion {:>2} {} {name}: {} [{:.2}s]",
            k + 1,
            if o.pass { "PASS" } else { "FAIL" },
            o.detail,
            elapsed.as_secs_f64()
        );
        if !o.pass {
            failed.push(k + 1);
        }
    }
    println!(
        "{}/11 criteria pass in {:.1}s",
        11 - failed.len(),
        total.as_secs_f64()
    );
    if !failed.is_empty() {
        eprintln!("failing criteria: {failed:?}");
        std::process::exit(1);
    }
}
