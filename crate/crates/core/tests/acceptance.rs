mod common;

use std::f64::consts::{FRAC_PI_2, PI};
use std::time::{Duration, Instant};

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use tensor_nns::catalog::{
    explicit_nns, pad_solution, verify_catalog_entry, verify_vector, CatalogEntry,
    CatalogTolerances,
};
use tensor_nns::channel::{products, random_span_set, realize_and_verify};
use tensor_nns::feasibility::{
    conjectured_threshold, necessity_grid, nns_exists, threshold_bisect, verify_certificate,
    FeasibilityOptions, FeasibilityOutcome, ThresholdOptions,
};
use tensor_nns::symmetry::{expand, reverse_conjugate, symmetrize_permutation, FullVector, ReducedVector};
use tensor_nns::tensor_system::{
    a_alpha, build_b, build_b_direct, build_c, build_c_block, kron_power,
};
use tensor_nns::{ComplexDenseMatrix, MatrixForm, PhaseAngle, C64};

type Outcome = Result<String, String>;

fn angle(a: f64) -> PhaseAngle {
    PhaseAngle::new(a).unwrap()
}

fn random_angles(seed: u64, count: usize, lo: f64, hi: f64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| rng.random_range(lo..=hi)).collect()
}

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn construction_cross_check() -> Outcome {
    let start = Instant::now();
    let mut worst_direct = 0.0f64;
    let mut worst_oracle = 0.0f64;
    for n in 1..=8 {
        for a in random_angles(100 + n as u64, 10, FRAC_PI_2, PI) {
            let closed = build_b(angle(a), n).map_err(|e| e.to_string())?;
            let direct = build_b_direct(angle(a), n).map_err(|e| e.to_string())?;
            worst_direct = worst_direct.max(closed.max_abs_diff(&direct));
            worst_oracle = worst_oracle.max(closed.max_abs_diff(&common::b_oracle(a, n)));
        }
    }
    let elapsed = start.elapsed();
    check(
        worst_direct <= 1e-10 && worst_oracle <= 1e-10 && elapsed < Duration::from_secs(30),
        format!(
            "max |closed - A^N Q| = {worst_direct:.2e}, vs label sum {worst_oracle:.2e}, {:.1} s",
            elapsed.as_secs_f64()
        ),
    )
}

fn displayed_matrices() -> Outcome {
    let alphas = [FRAC_PI_2, 2.0, 3.0 * PI / 4.0, 2.8, PI];
    let mut worst = 0.0f64;
    for &a in &alphas {
        let c2 = build_c(angle(a), 2).map_err(|e| e.to_string())?;
        let c3 = build_c(angle(a), 3).map_err(|e| e.to_string())?;
        if c2.shape() != (3, 6) || c3.shape() != (4, 10) {
            return Err(format!("shapes {:?} {:?}", c2.shape(), c3.shape()));
        }
        worst = worst.max(c2.max_abs_diff(&common::displayed_c2(a)));
        worst = worst.max(c3.max_abs_diff(&common::displayed_c3(a)));
    }
    check(worst <= 1e-12, format!("max deviation {worst:.2e} over 5 angles"))
}

fn block_structure() -> Outcome {
    let mut worst = 0.0f64;
    for n in 1..=10 {
        for a in random_angles(300 + n as u64, 20, 0.0, 2.0 * PI) {
            let c = build_c(angle(a), n).map_err(|e| e.to_string())?;
            let blocks = build_c_block(angle(a), n).map_err(|e| e.to_string())?;
            worst = worst.max(c.max_abs_diff(&blocks));
        }
    }
    check(worst <= 1e-12, format!("max |C - C_block| = {worst:.2e}"))
}

fn rank_property() -> Outcome {
    let grid: Vec<f64> = (0..25).map(|i| FRAC_PI_2 + FRAC_PI_2 * i as f64 / 24.0).collect();
    let mut bad = Vec::new();
    for n in 1..=10 {
        for &a in &grid {
            let rank = build_c(angle(a), n).map_err(|e| e.to_string())?.numerical_rank(1e-9);
            // independent: the oracle C has the same rank
            let oracle = common::c_oracle(a, n).numerical_rank(1e-9);
            if rank != n + 1 || oracle != n + 1 {
                bad.push(format!("N={n} α={a:.4} rank {rank}/{oracle}"));
            }
        }
    }
    check(bad.is_empty(), if bad.is_empty() { "rank N+1 at all 250 points".into() } else { bad.join("; ") })
}

fn catalog_verification() -> Outcome {
    let tol = CatalogTolerances::default();
    let mut worst_res = 0.0f64;
    let mut worst_min = f64::INFINITY;
    let mut failures = Vec::new();
    for n in 1..=10 {
        let entry = CatalogEntry::new(n).map_err(|e| e.to_string())?;
        let samples = entry.samples(20);
        if (samples[0].radians() - entry.lo).abs() > 0.0 {
            return Err(format!("N={n}: samples do not start at the left endpoint"));
        }
        for alpha in samples {
            let report = verify_catalog_entry(n, alpha, &tol).map_err(|e| e.to_string())?;
            let y = explicit_nns(n, alpha).map_err(|e| e.to_string())?;
            let res = common::oracle_residual(alpha.radians(), y.entries());
            worst_res = worst_res.max(res).max(report.residual_inf);
            worst_min = worst_min.min(report.min_entry);
            if !report.passed || res > 1e-9 || report.min_entry < -1e-12 {
                failures.push(format!("N={n} α={:.6}", alpha.radians()));
            }
        }
    }
    check(
        failures.is_empty(),
        format!(
            "200 samples, max residual {worst_res:.2e}, min entry {worst_min:.2e}{}",
            if failures.is_empty() { String::new() } else { format!(", failing: {}", failures.join(" ")) }
        ),
    )
}

fn necessity() -> Outcome {
    let start = Instant::now();
    let opts = FeasibilityOptions::default();
    let jobs: Vec<(usize, PhaseAngle)> = (2..=10)
        .flat_map(|n| necessity_grid(n, 50).into_iter().map(move |a| (n, a)))
        .collect();
    let results: Vec<Result<f64, String>> = jobs
        .par_iter()
        .map(|&(n, alpha)| {
            let a = alpha.radians();
            if !(a > FRAC_PI_2 && a < conjectured_threshold(n)) {
                return Err(format!("N={n} α={a} outside the open interval"));
            }
            match nns_exists(alpha, n, &opts) {
                Ok(FeasibilityOutcome::Certificate { h, margin }) => {
                    let lib = verify_certificate(&h, margin, alpha, n).map_err(|e| e.to_string())?;
                    let ours = common::oracle_margin(a, n, &h);
                    if lib.valid && ours >= 1e-8 {
                        Ok(ours)
                    } else {
                        Err(format!("N={n} α={a:.6}: margin {ours:.2e}"))
                    }
                }
                Ok(_) => Err(format!("N={n} α={a:.6}: witness found")),
                Err(e) => Err(format!("N={n} α={a:.6}: {e}")),
            }
        })
        .collect();
    let elapsed = start.elapsed();
    let errors: Vec<String> = results.iter().filter_map(|r| r.clone().err()).collect();
    let min_margin = results
        .iter()
        .filter_map(|r| r.as_ref().ok())
        .fold(f64::INFINITY, |m, &v| m.min(v));
    check(
        errors.is_empty() && elapsed < Duration::from_secs(120),
        format!(
            "{} certificates, min margin {min_margin:.2e}, {:.1} s{}",
            results.len() - errors.len(),
            elapsed.as_secs_f64(),
            if errors.is_empty() { String::new() } else { format!(", {}", errors.join("; ")) }
        ),
    )
}

fn threshold() -> Outcome {
    let topts = ThresholdOptions {
        tol_alpha: 1e-6,
        ..ThresholdOptions::default()
    };
    let opts = FeasibilityOptions::default();
    let mut worst = 0.0f64;
    let mut lines = Vec::new();
    for n in 1..=10 {
        match threshold_bisect(n, &topts, &opts) {
            Ok(est) => {
                let expected = FRAC_PI_2 + PI / (2.0 * n as f64);
                let dev = (est.alpha_star - expected).abs();
                worst = worst.max(dev);
                if dev > 1e-5 {
                    lines.push(format!("N={n}: α*={} deviation {dev:.2e}", est.alpha_star));
                }
            }
            Err(e) => lines.push(format!("N={n}: {e}")),
        }
    }
    check(
        lines.is_empty(),
        format!("max |α* - threshold| = {worst:.2e}{}", if lines.is_empty() { String::new() } else { format!(", {}", lines.join("; ")) }),
    )
}

fn symmetry_suite() -> Outcome {
    let mut worst_null = 0.0f64;
    let mut vectors = 0usize;
    for n in 1..=5 {
        for (k, a) in random_angles(800 + n as u64, 3, FRAC_PI_2, PI).into_iter().enumerate() {
            let form = if k % 2 == 0 { MatrixForm::Reduced } else { MatrixForm::Original };
            let a_n = kron_power(&a_alpha(angle(a), form), n).map_err(|e| e.to_string())?;
            for x in a_n.real_null_space(1e-10) {
                let scale = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
                let x: Vec<f64> = x.iter().map(|v| v / scale).collect();
                let full = FullVector::from_real(&x).map_err(|e| e.to_string())?;
                let hat = reverse_conjugate(&full).map_err(|e| e.to_string())?;
                let before = a_n.matvec_real(&x).unwrap().iter().fold(0.0f64, |m, v| m.max(v.norm()));
                let hat_re: Vec<f64> = hat.entries().iter().map(|v| v.re).collect();
                // independent reindexing: complement every digit
                let total = x.len();
                if (0..total).any(|i| hat_re[i] != x[total - 1 - i]) {
                    return Err(format!("N={n}: reversal is not the digit complement"));
                }
                let after = a_n.matvec_real(&hat_re).unwrap().iter().fold(0.0f64, |m, v| m.max(v.norm()));
                if before > 1e-11 {
                    return Err(format!("N={n}: null vector residual {before:.2e}"));
                }
                worst_null = worst_null.max(after);
                vectors += 1;
            }
        }
    }
    if worst_null > 1e-11 {
        return Err(format!("reversed null vector residual {worst_null:.2e}"));
    }

    let mut worst_avg = 0.0f64;
    let mut worst_fix = 0.0f64;
    let mut cases = 0usize;
    for n in 1..=4 {
        let total = 3usize.pow(n as u32);
        let mut inputs: Vec<Vec<f64>> = (0..total)
            .map(|i| (0..total).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
            .collect();
        let mut rng = ChaCha8Rng::seed_from_u64(900 + n as u64);
        inputs.push((0..total).map(|_| rng.random_range(-1.0..1.0)).collect());
        for x in inputs {
            let s = symmetrize_permutation(&FullVector::from_real(&x).unwrap());
            let s_re: Vec<f64> = s.entries().iter().map(|v| v.re).collect();
            let avg = common::permutation_average(n, &x);
            worst_avg = worst_avg.max(max_diff(&s_re, &avg));
            let again = symmetrize_permutation(&s);
            let again_re: Vec<f64> = again.entries().iter().map(|v| v.re).collect();
            worst_fix = worst_fix.max(max_diff(&again_re, &s_re));
            cases += 1;
        }
        let p = (n + 1) * (n + 2) / 2;
        for k in 0..p {
            let y = ReducedVector::new(n, (0..p).map(|j| if j == k { 1.0 } else { 0.0 }).collect()).unwrap();
            let x = expand(&y);
            let s = symmetrize_permutation(&x);
            let d = x.entries().iter().zip(s.entries()).fold(0.0f64, |m, (a, b)| m.max((a - b).norm()));
            worst_fix = worst_fix.max(d);
            cases += 1;
        }
    }
    check(
        worst_avg <= 1e-12 && worst_fix <= 1e-12,
        format!(
            "{vectors} null vectors, reversed residual {worst_null:.2e}; {cases} symmetrization cases, orbit-average error {worst_avg:.2e}, fixed-point error {worst_fix:.2e}"
        ),
    )
}

fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0f64, |m, (x, y)| m.max((x - y).abs()))
}

fn padding() -> Outcome {
    let tol = CatalogTolerances::default();
    let mut worst = 0.0f64;
    let mut count = 0usize;
    for n in 1..=9 {
        for alpha in CatalogEntry::new(n).map_err(|e| e.to_string())?.samples(20) {
            let y = explicit_nns(n, alpha).map_err(|e| e.to_string())?;
            if !verify_vector(&y, alpha, &tol).map_err(|e| e.to_string())?.passed {
                return Err(format!("N={n} α={}: catalog entry fails", alpha.radians()));
            }
            let padded = pad_solution(&y);
            let report = verify_vector(&padded, alpha, &tol).map_err(|e| e.to_string())?;
            let res = common::oracle_residual(alpha.radians(), padded.entries());
            if padded.order() != n + 1 || !report.passed || res > 1e-9 {
                return Err(format!("N={n} α={}: padded residual {res:.2e}", alpha.radians()));
            }
            worst = worst.max(res);
            count += 1;
        }
    }
    Ok(format!("{count} padded solutions, max residual {worst:.2e}"))
}

fn channels() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(20_240_601);
    let mut worst_kraus = 0.0f64;
    let mut worst_span = 0.0f64;
    for case in 0..100 {
        let t = random_span_set(&mut rng, 4, 6);
        let report = realize_and_verify(&t).map_err(|e| e.to_string())?;
        let pair = &report.pair;
        for ops in [&pair.e, &pair.f] {
            worst_kraus = worst_kraus.max(kraus_defect(ops));
        }
        let prods = products(&pair.e, &pair.f).map_err(|e| e.to_string())?;
        let span = span_gap(&prods, &t).max(span_gap(&t, &prods));
        worst_span = worst_span.max(span);
        let defect = report.kraus_e.defect.max(report.kraus_f.defect);
        if !report.passed || !report.span_equal || defect > 1e-10 {
            return Err(format!("set {case}: report failed (kraus defect {defect:.2e})"));
        }
    }
    check(
        worst_kraus <= 1e-10 && worst_span <= 1e-8,
        format!("100 sets, Kraus defect {worst_kraus:.2e}, span gap {worst_span:.2e}"),
    )
}

fn kraus_defect(ops: &[ComplexDenseMatrix]) -> f64 {
    let n = ops[0].cols();
    let mut sum = DMatrix::<C64>::identity(n, n) * C64::new(-1.0, 0.0);
    for op in ops {
        let m = op.to_nalgebra();
        sum += m.adjoint() * m;
    }
    sum.norm()
}

/// Largest relative least-squares residual of a member of `from` against `span(onto)`.
fn span_gap(from: &[ComplexDenseMatrix], onto: &[ComplexDenseMatrix]) -> f64 {
    let len = onto[0].rows() * onto[0].cols();
    let basis = DMatrix::<C64>::from_fn(len, onto.len(), |i, j| onto[j].as_slice()[i]);
    let svd = basis.svd(true, true);
    let smax = svd.singular_values.max();
    let u = svd.u.unwrap();
    let keep: Vec<usize> = (0..svd.singular_values.len())
        .filter(|&k| svd.singular_values[k] > 1e-10 * smax)
        .collect();
    from.iter()
        .map(|m| {
            let v = DVector::from_column_slice(m.as_slice());
            let mut proj = DVector::<C64>::zeros(len);
            for &k in &keep {
                let col = u.column(k);
                proj += col * col.dotc(&v);
            }
            let norm = v.norm();
            if norm == 0.0 { 0.0 } else { (v - proj).norm() / norm }
        })
        .fold(0.0, f64::max)
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("construction cross-check", construction_cross_check),
        ("displayed C matrices", displayed_matrices),
        ("block structure", block_structure),
        ("rank of C", rank_property),
        ("catalog verification", catalog_verification),
        ("necessity certificates", necessity),
        ("threshold agreement", threshold),
        ("symmetry suite", symmetry_suite),
        ("padding", padding),
        ("channel realization", channels),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let (tag, detail) = match f() {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!(
            "criterion {:>2} {tag}  {name}: {detail} [{:.2} s]",
            i + 1,
            start.elapsed().as_secs_f64()
        );
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
