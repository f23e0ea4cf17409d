//! The coefficient matrix `A_α`, its Kronecker powers, the orbit selector `Q_N`,
//! and the orbit-reduced systems `B_{α,N}` (2^N rows) and `C_{α,N}` (N+1 rows).
//!
//! `B` and `C` are built from the closed-form entry
//!
//! ```text
//! B[J; N0,N1,N2] = C(N-j, N0) · (-z²)^(N-j-N0) · C(j, N1) · z^(j-N1),   z = e^{iα}
//! ```
//!
//! where `j` is the number of ones in the binary row label `J`; rows sharing a ones-count
//! coincide. [`build_b_direct`] forms `A^{⊗N} Q_N` literally and exists to cross-check.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::labels::{
    binomial, column_order, label_orbit, p_count, pow3, BinaryLabel, MultisetLabel, TernaryLabel,
    MAX_ORDER,
};
use crate::matrix::{ComplexDenseMatrix, C64};

/// Largest number of entries [`kron_power`] will materialize by default (2^27).
pub const DEFAULT_ENTRY_BUDGET: usize = 1 << 27;

/// The phase `α` in radians.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PhaseAngle(f64);

impl PhaseAngle {
    pub fn new(alpha: f64) -> Result<Self> {
        if !alpha.is_finite() {
            return Err(Error::InvalidArgument(format!("alpha must be finite, got {alpha}")));
        }
        Ok(Self(alpha))
    }

    /// `α = π·num/den`.
    pub fn from_pi_fraction(num: i64, den: i64) -> Result<Self> {
        if den == 0 {
            return Err(Error::InvalidArgument("zero denominator".into()));
        }
        Self::new(PI * num as f64 / den as f64)
    }

    pub fn radians(self) -> f64 {
        self.0
    }

    /// Representative in `[0, 2π)`.
    pub fn canonical(self) -> f64 {
        self.0.rem_euclid(2.0 * PI)
    }

    pub fn z(self) -> C64 {
        C64::from_polar(1.0, self.0)
    }
}

/// Powers `z^0 … z^max` of `z = e^{iα}`, each obtained by one more multiplication.
#[derive(Debug, Clone)]
pub struct ZPowers(Vec<C64>);

impl ZPowers {
    pub fn new(alpha: PhaseAngle, max: usize) -> Self {
        let z = alpha.z();
        let mut pows = Vec::with_capacity(max + 1);
        let mut acc = C64::new(1.0, 0.0);
        pows.push(acc);
        for _ in 0..max {
            acc *= z;
            pows.push(acc);
        }
        Self(pows)
    }

    pub fn get(&self, k: usize) -> C64 {
        self.0[k]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MatrixForm {
    /// `[[1, z, 0], [0, 1, z]]`
    Original,
    /// `[[1, 0, -z²], [0, 1, z]]`, obtained by the row operation `[[1, -z], [0, 1]]`.
    Reduced,
}

pub fn a_alpha(alpha: PhaseAngle, form: MatrixForm) -> ComplexDenseMatrix {
    let zp = ZPowers::new(alpha, 2);
    let one = C64::new(1.0, 0.0);
    let zero = C64::new(0.0, 0.0);
    let data = match form {
        MatrixForm::Original => vec![one, zp.get(1), zero, zero, one, zp.get(1)],
        MatrixForm::Reduced => vec![one, zero, -zp.get(2), zero, one, zp.get(1)],
    };
    ComplexDenseMatrix::from_row_major(2, 3, data).expect("2x3 literal")
}

fn check_budget(entries: u128, budget: usize) -> Result<()> {
    if entries > budget as u128 {
        return Err(Error::SizeExceeded { entries, budget });
    }
    Ok(())
}

/// `M^{⊗N}` with the default entry budget.
pub fn kron_power(m: &ComplexDenseMatrix, order: usize) -> Result<ComplexDenseMatrix> {
    kron_power_with_budget(m, order, DEFAULT_ENTRY_BUDGET)
}

/// `M^{⊗N}`; the first factor carries the most significant digit of the row/column labels.
pub fn kron_power_with_budget(
    m: &ComplexDenseMatrix,
    order: usize,
    budget: usize,
) -> Result<ComplexDenseMatrix> {
    if order == 0 {
        return Err(Error::InvalidOrder(order));
    }
    let entries = (m.rows() as u128).pow(order as u32) * (m.cols() as u128).pow(order as u32);
    check_budget(entries, budget)?;
    let mut out = m.clone();
    for _ in 1..order {
        out = out.kron(m);
    }
    Ok(out)
}

fn check_order(order: usize) -> Result<()> {
    if order == 0 || order > MAX_ORDER {
        return Err(Error::InvalidOrder(order));
    }
    Ok(())
}

/// The `3^N × p_N` 0/1 matrix sending reduced vectors to orbit-constant full vectors.
pub fn build_q(order: usize) -> Result<ComplexDenseMatrix> {
    check_order(order)?;
    let rows = pow3(order);
    let cols = p_count(order);
    check_budget(rows as u128 * cols as u128, DEFAULT_ENTRY_BUDGET)?;
    let mut q = ComplexDenseMatrix::zeros(rows, cols);
    for i in 0..rows {
        let label = TernaryLabel::from_index(order, i)?;
        q[(i, label_orbit(&label).column_index())] = C64::new(1.0, 0.0);
    }
    Ok(q)
}

/// `A_red^{⊗N} · Q_N`, formed by materializing the Kronecker power.
pub fn build_b_direct(alpha: PhaseAngle, order: usize) -> Result<ComplexDenseMatrix> {
    check_order(order)?;
    let a = kron_power(&a_alpha(alpha, MatrixForm::Reduced), order)?;
    a.matmul(&build_q(order)?)
}

fn closed_form_entry(zp: &ZPowers, order: usize, ones: usize, label: MultisetLabel) -> C64 {
    let zeros = order - ones;
    if label.n0 > zeros || label.n1 > ones {
        return C64::new(0.0, 0.0);
    }
    let neg = zeros - label.n0;
    let coef = binomial(zeros, label.n0) * binomial(ones, label.n1);
    let sign = if neg % 2 == 0 { 1.0 } else { -1.0 };
    zp.get(2 * neg + ones - label.n1) * (sign * coef as f64)
}

/// Entry of `B_{α,N}` in row `0…0 1…1` (with `ones` trailing ones) and orbit column `label`.
pub fn b_entry_closed_form(
    order: usize,
    ones: usize,
    label: MultisetLabel,
    alpha: PhaseAngle,
) -> Result<C64> {
    check_order(order)?;
    if ones > order {
        return Err(Error::IndexOutOfRange { index: ones, order });
    }
    if label.order() != order {
        return Err(Error::LabelOrderMismatch {
            sum: label.order(),
            order,
        });
    }
    Ok(closed_form_entry(&ZPowers::new(alpha, 2 * order), order, ones, label))
}

/// `B_{α,N}` (2^N × p_N) from the closed form; rows in lexicographic binary order.
pub fn build_b(alpha: PhaseAngle, order: usize) -> Result<ComplexDenseMatrix> {
    let c = build_c(alpha, order)?;
    let rows = 1usize << order;
    let mut b = ComplexDenseMatrix::zeros(rows, c.cols());
    for r in 0..rows {
        let ones = BinaryLabel::from_index(order, r)?.ones();
        b.row_mut(r).copy_from_slice(c.row(ones));
    }
    Ok(b)
}

/// `C_{α,N}` ((N+1) × p_N): the rows of `B_{α,N}` labelled `0…0, 0…01, …, 1…1`.
pub fn build_c(alpha: PhaseAngle, order: usize) -> Result<ComplexDenseMatrix> {
    check_order(order)?;
    let zp = ZPowers::new(alpha, 2 * order);
    let labels = column_order(order);
    let mut c = ComplexDenseMatrix::zeros(order + 1, labels.len());
    for ones in 0..=order {
        for (col, &label) in labels.iter().enumerate() {
            c[(ones, col)] = closed_form_entry(&zp, order, ones, label);
        }
    }
    Ok(c)
}

/// Upper-triangular `Γ_n` with 1-based `(j, k)` entry `(-1)^{k-j} C(n+1-j, k-j) z^{j-1+2(k-j)}`.
pub fn gamma(n: usize, alpha: PhaseAngle) -> ComplexDenseMatrix {
    let zp = ZPowers::new(alpha, 2 * n);
    let mut g = ComplexDenseMatrix::zeros(n + 1, n + 1);
    for j in 1..=n + 1 {
        for k in j..=n + 1 {
            let d = k - j;
            let sign = if d % 2 == 0 { 1.0 } else { -1.0 };
            let coef = binomial(n + 1 - j, d) as f64;
            g[(j - 1, k - 1)] = zp.get(j - 1 + 2 * d) * (sign * coef);
        }
    }
    g
}

/// `D_{n,k} = diag(C(k,k), C(k+1,k), …, C(n,k))`.
pub fn d_diag(n: usize, k: usize) -> Result<ComplexDenseMatrix> {
    if k > n {
        return Err(Error::IndexOutOfRange { index: k, order: n });
    }
    let values: Vec<C64> = (k..=n)
        .map(|i| C64::new(binomial(i, k) as f64, 0.0))
        .collect();
    Ok(ComplexDenseMatrix::diagonal(&values))
}

/// `C_{α,N}` assembled as `[Γ_N | 0 over D_{N,1}Γ_{N-1} | … | 0 over D_{N,N}Γ_0]`.
pub fn build_c_block(alpha: PhaseAngle, order: usize) -> Result<ComplexDenseMatrix> {
    check_order(order)?;
    let mut c = ComplexDenseMatrix::zeros(order + 1, p_count(order));
    c.set_block(0, 0, &gamma(order, alpha));
    let mut col = order + 1;
    for k in 1..=order {
        let block = d_diag(order, k)?.matmul(&gamma(order - k, alpha))?;
        c.set_block(k, col, &block);
        col += block.cols();
    }
    Ok(c)
}
