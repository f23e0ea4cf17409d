//! Choi-Kraus pairs `{E_j}`, `{F_j}` whose products `E_i* F_j` span a prescribed set of
//! `n × n` matrices.
//!
//! For a basis `A_1, …, A_m` of `span T`, factor `A_1 ⊕ … ⊕ A_m = [B_1 … B_m]* [C_1 … C_m]`
//! with `k × n` blocks (`k` the rank), pick `M` so that `I - ΣB_j*B_j / M = B_0²` and
//! `I - ΣC_j*C_j / M = C_0²` are positive semidefinite, and stack the blocks into three
//! slots:
//!
//! ```text
//! E_j = [B_j; 0; 0] / √M,   F_j = [C_j; 0; 0] / √M,   j = 1…m
//! E_{m+1} = [0; B_0; 0],    F_{m+1} = [0; 0; C_0]
//! ```
//!
//! Each slot has `s = max(k, n)` rows, so that the `n × n` roots `B_0`, `C_0` always fit;
//! `E_j` maps `C^n` to `C^{3s}`.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{ComplexDenseMatrix, C64};
use crate::tensor_system::{PhaseAngle, ZPowers};

/// Relative cutoff for the rank factorization and for basis extraction.
pub const RANK_TOL: f64 = 1e-10;
/// Pass threshold of [`verify_kraus`].
pub const KRAUS_TOL: f64 = 1e-10;
/// Relative singular-value cutoff used by [`span_equality`].
pub const SPAN_TOL: f64 = 1e-8;
/// Eigenvalues of a square-root argument down to `-PSD_CLAMP` are clamped to zero.
pub const PSD_CLAMP: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpanSet {
    pub n: usize,
    pub matrices: Vec<ComplexDenseMatrix>,
    /// Positions in `matrices` of a maximal linearly independent subsequence.
    pub basis: Vec<usize>,
}

impl SpanSet {
    pub fn basis_matrices(&self) -> Vec<&ComplexDenseMatrix> {
        self.basis.iter().map(|&i| &self.matrices[i]).collect()
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }
}

fn check_square_family(t: &[ComplexDenseMatrix]) -> Result<usize> {
    let first = t
        .first()
        .ok_or_else(|| Error::InvalidArgument("empty matrix set".into()))?;
    let n = first.rows();
    for (i, a) in t.iter().enumerate() {
        if a.rows() != n || a.cols() != n {
            return Err(Error::ShapeMismatch(format!(
                "matrix {i} is {}x{}, expected {n}x{n}",
                a.rows(),
                a.cols()
            )));
        }
    }
    Ok(n)
}

/// Greedy selection of a basis of `span T`: a matrix is kept when its component orthogonal
/// to the ones kept so far exceeds `RANK_TOL` times the largest norm in `T`.
pub fn extract_basis(t: &[ComplexDenseMatrix]) -> Result<SpanSet> {
    let n = check_square_family(t)?;
    let scale = t.iter().map(|a| a.frobenius_norm()).fold(0.0, f64::max);
    let mut ortho: Vec<Vec<C64>> = Vec::new();
    let mut basis = Vec::new();
    if scale > 0.0 {
        for (i, a) in t.iter().enumerate() {
            let mut v = a.as_slice().to_vec();
            // two Gram-Schmidt passes
            for _ in 0..2 {
                for q in &ortho {
                    let c: C64 = q.iter().zip(&v).map(|(x, y)| x.conj() * y).sum();
                    v.iter_mut().zip(q).for_each(|(y, x)| *y -= c * x);
                }
            }
            let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if norm > RANK_TOL * scale {
                v.iter_mut().for_each(|z| *z /= norm);
                ortho.push(v);
                basis.push(i);
            }
        }
    }
    if basis.is_empty() {
        return Err(Error::AllZero);
    }
    Ok(SpanSet {
        n,
        matrices: t.to_vec(),
        basis,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KrausPair {
    pub e: Vec<ComplexDenseMatrix>,
    pub f: Vec<ComplexDenseMatrix>,
    /// The scale `M`.
    pub scale: f64,
    /// Rank `k` of `A_1 ⊕ … ⊕ A_m`.
    pub rank: usize,
    /// Rows per slot, `max(k, n)`.
    pub slot: usize,
}

/// Runs the construction on the basis of `span`.
pub fn realize_channels(span: &SpanSet) -> Result<KrausPair> {
    let n = span.n;
    let blocks: Vec<ComplexDenseMatrix> = span.basis_matrices().into_iter().cloned().collect();
    if blocks.is_empty() {
        return Err(Error::AllZero);
    }
    let m = blocks.len();
    let a = ComplexDenseMatrix::direct_sum(&blocks).to_nalgebra();

    let svd = a.svd(true, true);
    let (u, v_t) = (svd.u.expect("u"), svd.v_t.expect("v_t"));
    let smax = svd.singular_values.max();
    let keep: Vec<usize> = (0..svd.singular_values.len())
        .filter(|&i| svd.singular_values[i] > RANK_TOL * smax)
        .collect();
    let k = keep.len();
    if k == 0 {
        return Err(Error::AllZero);
    }
    // A = U Σ V* = (Σ^½ U*)* (Σ^½ V*)
    let b_stack = DMatrix::from_fn(k, n * m, |r, c| {
        u[(c, keep[r])].conj() * svd.singular_values[keep[r]].sqrt()
    });
    let c_stack = DMatrix::from_fn(k, n * m, |r, c| {
        v_t[(keep[r], c)] * svd.singular_values[keep[r]].sqrt()
    });
    let b_blocks: Vec<DMatrix<C64>> = (0..m)
        .map(|j| b_stack.columns(j * n, n).into_owned())
        .collect();
    let c_blocks: Vec<DMatrix<C64>> = (0..m)
        .map(|j| c_stack.columns(j * n, n).into_owned())
        .collect();

    let gram = |bs: &[DMatrix<C64>]| {
        bs.iter()
            .fold(DMatrix::<C64>::zeros(n, n), |acc, b| acc + b.adjoint() * b)
    };
    let gb = gram(&b_blocks);
    let gc = gram(&c_blocks);
    let scale = 2.0 * spectral_norm(&gb).max(spectral_norm(&gc)).max(1.0);
    let identity = DMatrix::<C64>::identity(n, n);
    let b0 = psd_sqrt(&(&identity - gb.unscale(scale)))?;
    let c0 = psd_sqrt(&(&identity - gc.unscale(scale)))?;

    let s = k.max(n);
    let inv_sqrt = 1.0 / scale.sqrt();
    let place = |block: &DMatrix<C64>, slot: usize, factor: f64| {
        let mut out = ComplexDenseMatrix::zeros(3 * s, n);
        for i in 0..block.nrows() {
            for j in 0..n {
                out[(slot * s + i, j)] = block[(i, j)] * factor;
            }
        }
        out
    };
    let mut e: Vec<_> = b_blocks.iter().map(|b| place(b, 0, inv_sqrt)).collect();
    let mut f: Vec<_> = c_blocks.iter().map(|c| place(c, 0, inv_sqrt)).collect();
    e.push(place(&b0, 1, 1.0));
    f.push(place(&c0, 2, 1.0));
    Ok(KrausPair {
        e,
        f,
        scale,
        rank: k,
        slot: s,
    })
}

fn spectral_norm(h: &DMatrix<C64>) -> f64 {
    h.singular_values().max()
}

/// Hermitian square root of a positive semidefinite matrix.
pub fn psd_sqrt(h: &DMatrix<C64>) -> Result<DMatrix<C64>> {
    let sym = (h + h.adjoint()).unscale(2.0);
    let eig = SymmetricEigen::new(sym);
    let mut roots = Vec::with_capacity(eig.eigenvalues.len());
    for &lambda in eig.eigenvalues.iter() {
        if lambda < -PSD_CLAMP {
            return Err(Error::InvalidArgument(format!(
                "matrix is not positive semidefinite (eigenvalue {lambda:e})"
            )));
        }
        roots.push(C64::new(lambda.max(0.0).sqrt(), 0.0));
    }
    let d = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(roots));
    let q = &eig.eigenvectors;
    Ok(q * d * q.adjoint())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KrausCheck {
    pub passed: bool,
    /// `‖Σ E_j* E_j - I‖_F`.
    pub defect: f64,
}

pub fn verify_kraus(ops: &[ComplexDenseMatrix]) -> Result<KrausCheck> {
    let first = ops
        .first()
        .ok_or_else(|| Error::ShapeMismatch("empty operator list".into()))?;
    let n = first.cols();
    let mut sum = ComplexDenseMatrix::zeros(n, n);
    for (i, op) in ops.iter().enumerate() {
        if op.cols() != n {
            return Err(Error::ShapeMismatch(format!(
                "operator {i} has {} columns, expected {n}",
                op.cols()
            )));
        }
        sum = sum.add(&op.adjoint().matmul(op)?)?;
    }
    let defect = sum.sub(&ComplexDenseMatrix::identity(n))?.frobenius_norm();
    Ok(KrausCheck {
        passed: defect <= KRAUS_TOL,
        defect,
    })
}

/// The products `E_i* F_j` in row-major `(i, j)` order.
pub fn products(e: &[ComplexDenseMatrix], f: &[ComplexDenseMatrix]) -> Result<Vec<ComplexDenseMatrix>> {
    let mut out = Vec::with_capacity(e.len() * f.len());
    for a in e {
        let a_adj = a.adjoint();
        for b in f {
            out.push(a_adj.matmul(b)?);
        }
    }
    Ok(out)
}

fn span_rank(sets: &[&[ComplexDenseMatrix]]) -> usize {
    let mut rows: Vec<Vec<C64>> = Vec::new();
    for set in sets {
        let scale = set.iter().map(|a| a.frobenius_norm()).fold(0.0, f64::max);
        if scale == 0.0 {
            continue;
        }
        rows.extend(
            set.iter()
                .map(|a| a.as_slice().iter().map(|z| z / scale).collect()),
        );
    }
    if rows.is_empty() {
        return 0;
    }
    ComplexDenseMatrix::from_rows(&rows)
        .expect("equal lengths")
        .numerical_rank(SPAN_TOL)
}

/// Whether `span {E_i* F_j} = span T`, decided by comparing the ranks of the two families
/// and of their union.
pub fn span_equality(
    e: &[ComplexDenseMatrix],
    f: &[ComplexDenseMatrix],
    t: &[ComplexDenseMatrix],
) -> Result<bool> {
    let p = products(e, f)?;
    let n = check_square_family(t)?;
    if let Some(bad) = p.iter().find(|a| a.rows() != n || a.cols() != n) {
        return Err(Error::ShapeMismatch(format!(
            "products are {}x{}, T holds {n}x{n} matrices",
            bad.rows(),
            bad.cols()
        )));
    }
    let rp = span_rank(&[&p]);
    let rt = span_rank(&[t]);
    let both = span_rank(&[&p, t]);
    Ok(rp == rt && rt == both)
}

/// `max |[E_1 … E_{m+1}]* [F_1 … F_{m+1}] - (A_1 ⊕ … ⊕ A_m ⊕ 0_n) / M|`.
pub fn product_defect(pair: &KrausPair, span: &SpanSet) -> Result<f64> {
    let e_row = hstack(&pair.e);
    let f_row = hstack(&pair.f);
    let product = e_row.adjoint().matmul(&f_row)?;
    let mut blocks: Vec<ComplexDenseMatrix> = span
        .basis_matrices()
        .into_iter()
        .map(|a| a.scale(C64::new(1.0 / pair.scale, 0.0)))
        .collect();
    blocks.push(ComplexDenseMatrix::zeros(span.n, span.n));
    Ok(product.max_abs_diff(&ComplexDenseMatrix::direct_sum(&blocks)))
}

fn hstack(ms: &[ComplexDenseMatrix]) -> ComplexDenseMatrix {
    let rows = ms[0].rows();
    let cols: usize = ms.iter().map(|m| m.cols()).sum();
    let mut out = ComplexDenseMatrix::zeros(rows, cols);
    let mut c = 0;
    for m in ms {
        out.set_block(0, c, m);
        c += m.cols();
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RealizationReport {
    pub version: String,
    pub n: usize,
    pub dim: usize,
    pub rank: usize,
    pub scale: f64,
    pub output_dim: usize,
    pub kraus_e: KrausCheck,
    pub kraus_f: KrausCheck,
    pub span_equal: bool,
    pub product_defect: f64,
    pub passed: bool,
    pub kraus_tol: f64,
    pub span_tol: f64,
    pub pair: KrausPair,
}

/// Extracts a basis, realizes the pair and runs every check on it.
pub fn realize_and_verify(t: &[ComplexDenseMatrix]) -> Result<RealizationReport> {
    let span = extract_basis(t)?;
    let pair = realize_channels(&span)?;
    let kraus_e = verify_kraus(&pair.e)?;
    let kraus_f = verify_kraus(&pair.f)?;
    let span_equal = span_equality(&pair.e, &pair.f, t)?;
    let defect = product_defect(&pair, &span)?;
    Ok(RealizationReport {
        version: crate::VERSION.to_string(),
        n: span.n,
        dim: span.dim(),
        rank: pair.rank,
        scale: pair.scale,
        output_dim: 3 * pair.slot,
        kraus_e,
        kraus_f,
        span_equal,
        product_defect: defect,
        passed: kraus_e.passed && kraus_f.passed && span_equal && defect <= KRAUS_TOL,
        kraus_tol: KRAUS_TOL,
        span_tol: SPAN_TOL,
        pair,
    })
}

/// `T_α = { diag(1, e^{iα}, 0), diag(0, 1, e^{iα}) }`.
pub fn t_alpha(alpha: PhaseAngle) -> Vec<ComplexDenseMatrix> {
    let z = ZPowers::new(alpha, 1).get(1);
    let one = C64::new(1.0, 0.0);
    let zero = C64::new(0.0, 0.0);
    vec![
        ComplexDenseMatrix::diagonal(&[one, z, zero]),
        ComplexDenseMatrix::diagonal(&[zero, one, z]),
    ]
}

/// A set of `1..=max_count` matrices of size `n × n`, `n` in `1..=max_n`, with independent
/// standard complex Gaussian entries.
pub fn random_span_set<R: Rng>(rng: &mut R, max_n: usize, max_count: usize) -> Vec<ComplexDenseMatrix> {
    let n = rng.random_range(1..=max_n);
    let count = rng.random_range(1..=max_count);
    (0..count)
        .map(|_| {
            let data = (0..n * n)
                .map(|_| {
                    let re: f64 = rng.sample(StandardNormal);
                    let im: f64 = rng.sample(StandardNormal);
                    C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
                })
                .collect();
            ComplexDenseMatrix::from_row_major(n, n, data).expect("finite")
        })
        .collect()
}
