//! Explicit nonnegative solutions of `C_{α,N} y = 0` for `N = 1, …, 10`.
//!
//! Each entry is valid on `α ∈ [π/2 + π/(2N), π/2 + π/(2(N-1)))`; for `N = 1` only
//! `α = π`. Vectors are laid out in [`column_order`], block `a_j` holding the labels
//! with `N1 = j`.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::labels::{column_order, p_count};
use crate::symmetry::{palindrome_check, ReducedVector};
use crate::tensor_system::{build_c, PhaseAngle};

/// Largest order with a catalog entry.
pub const MAX_CATALOG_ORDER: usize = 10;

/// Slack allowed when testing membership of the admissible interval, so that
/// endpoints written as `π·a/b` are accepted after rounding.
pub const ENDPOINT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CatalogEntry {
    pub order: usize,
    pub lo: f64,
    pub hi: f64,
    /// `false` only for `N = 1`, whose interval is the single point `π`.
    pub hi_open: bool,
}

impl CatalogEntry {
    pub fn new(order: usize) -> Result<Self> {
        match order {
            1 => Ok(Self {
                order,
                lo: PI,
                hi: PI,
                hi_open: false,
            }),
            2..=MAX_CATALOG_ORDER => Ok(Self {
                order,
                lo: FRAC_PI_2 + PI / (2 * order) as f64,
                hi: FRAC_PI_2 + PI / (2 * (order - 1)) as f64,
                hi_open: true,
            }),
            _ => Err(Error::InvalidOrder(order)),
        }
    }

    pub fn contains(&self, alpha: PhaseAngle) -> bool {
        let a = alpha.radians();
        if self.hi_open {
            a >= self.lo - ENDPOINT_TOL && a < self.hi
        } else {
            (a - self.lo).abs() <= ENDPOINT_TOL
        }
    }

    fn check(&self, alpha: PhaseAngle) -> Result<()> {
        if self.contains(alpha) {
            Ok(())
        } else {
            Err(Error::AlphaOutOfInterval {
                alpha: alpha.radians(),
                order: self.order,
                lo: self.lo,
                hi: self.hi,
            })
        }
    }

    /// `k` equally spaced points starting at the left endpoint.
    pub fn samples(&self, k: usize) -> Vec<PhaseAngle> {
        (0..k)
            .map(|i| {
                let a = self.lo + (self.hi - self.lo) * i as f64 / k as f64;
                PhaseAngle::new(a).expect("finite")
            })
            .collect()
    }

    pub fn build(&self, alpha: PhaseAngle) -> Result<ReducedVector> {
        self.check(alpha)?;
        ReducedVector::new(self.order, raw_entries(self.order, alpha.radians()))
    }
}

/// The catalog solution of order `N` at `α`.
pub fn explicit_nns(order: usize, alpha: PhaseAngle) -> Result<ReducedVector> {
    CatalogEntry::new(order)?.build(alpha)
}

#[rustfmt::skip]
fn raw_entries(order: usize, a: f64) -> Vec<f64> {
    let s = |k: f64| (k * a).sin();
    let c = |k: f64| (k * a).cos();
    let v = match order {
        1 => vec![1.0, 1.0, 1.0],
        2 => vec![1.0, c(2.0), 1.0, -c(1.0), -c(1.0), 1.0],
        3 => vec![
            3.0 * s(1.0), s(3.0), s(3.0), 3.0 * s(1.0),
            -s(2.0), -s(2.0), -s(2.0),
            s(1.0), s(1.0),
            0.0,
        ],
        4 => vec![
            6.0, 0.0, -2.0 * c(4.0), 0.0, 6.0,
            -3.0 * c(1.0), c(3.0), c(3.0), -3.0 * c(1.0),
            // a2 | a3 | a4
            2.0, 0.0, 2.0,
            -3.0 * c(1.0), -3.0 * c(1.0),
            6.0,
        ],
        5 => vec![
            20.0 * s(1.0), 0.0, -2.0 * s(5.0), -2.0 * s(5.0), 0.0, 20.0 * s(1.0),
            -4.0 * s(2.0), s(4.0), 2.0 * s(4.0), s(4.0), -4.0 * s(2.0),
            3.0 * s(1.0), -s(3.0), -s(3.0), 3.0 * s(1.0),
            -s(2.0), 0.0, -s(2.0),
            2.0 * s(1.0), 2.0 * s(1.0),
            0.0,
        ],
        6 => vec![
            20.0, 0.0, 0.0, 2.0 * c(6.0), 0.0, 0.0, 20.0,
            -10.0 * c(1.0), 0.0, -c(5.0), -c(5.0), 0.0, -10.0 * c(1.0),
            3.0, 0.0, c(4.0), 0.0, 3.0,
            c(3.0), 0.0, 0.0, c(3.0),
            -2.0 * c(2.0), 0.0, -2.0 * c(2.0),
            0.0, 0.0,
            5.0,
        ],
        7 => vec![
            140.0 * s(1.0), 0.0, 0.0, 4.0 * s(7.0), 4.0 * s(7.0), 0.0, 0.0, 140.0 * s(1.0),
            -30.0 * s(2.0), 0.0, -2.0 * s(6.0), -4.0 * s(6.0), -2.0 * s(6.0), 0.0, -30.0 * s(2.0),
            20.0 * s(1.0), 0.0, 2.0 * s(5.0), 2.0 * s(5.0), 0.0, 20.0 * s(1.0),
            2.0 * s(4.0) - 4.0 * s(2.0), s(4.0), 0.0, s(4.0), 2.0 * s(4.0) - 4.0 * s(2.0),
            -4.0 * s(3.0) + 6.0 * s(1.0), -2.0 * s(3.0), -2.0 * s(3.0), -4.0 * s(3.0) + 6.0 * s(1.0),
            0.0, 0.0, 0.0,
            10.0 * s(1.0), 10.0 * s(1.0),
            0.0,
        ],
        8 => vec![
            140.0, 0.0, 0.0, 0.0, -4.0 * c(8.0), 0.0, 0.0, 0.0, 140.0,
            -70.0 * c(1.0), 0.0, 0.0, 2.0 * c(7.0), 2.0 * c(7.0), 0.0, 0.0, -70.0 * c(1.0),
            20.0, 0.0, 0.0, -2.0 * c(6.0), 0.0, 0.0, 20.0,
            5.0 * c(3.0), -c(5.0), 0.0, 0.0, -c(5.0), 5.0 * c(3.0),
            -8.0 * c(2.0), 2.0 * c(4.0), 0.0, 2.0 * c(4.0), -8.0 * c(2.0),
            // a5 | a6 | a7 | a8, printed as one row
            0.0, 0.0, 0.0, 0.0,
            10.0, 0.0, 10.0,
            -35.0 * c(1.0), -35.0 * c(1.0),
            140.0,
        ],
        9 => vec![
            504.0 * s(1.0), 0.0, 0.0, 0.0, -4.0 * s(9.0), -4.0 * s(9.0), 0.0, 0.0, 0.0, 504.0 * s(1.0),
            -112.0 * s(2.0), 0.0, 0.0, 2.0 * s(8.0), 4.0 * s(8.0), 2.0 * s(8.0), 0.0, 0.0, -112.0 * s(2.0),
            70.0 * s(1.0), 0.0, 0.0, -2.0 * s(7.0), -2.0 * s(7.0), 0.0, 0.0, 70.0 * s(1.0),
            6.0 * s(4.0) - 15.0 * s(2.0), -s(6.0), -s(6.0), 0.0, -s(6.0), -s(6.0), 6.0 * s(4.0) - 15.0 * s(2.0),
            -10.0 * s(3.0) + 20.0 * s(1.0), 2.0 * s(5.0), 2.0 * s(5.0), 2.0 * s(5.0), 2.0 * s(5.0), -10.0 * s(3.0) + 20.0 * s(1.0),
            4.0 * s(4.0), 0.0, 0.0, 0.0, 4.0 * s(4.0),
            15.0 * s(1.0) - 12.0 * s(3.0), -5.0 * s(3.0), -5.0 * s(3.0), 15.0 * s(1.0) - 12.0 * s(3.0),
            0.0, 0.0, 0.0,
            56.0 * s(1.0), 56.0 * s(1.0),
            0.0,
        ],
        10 => vec![
            504.0, 0.0, 0.0, 0.0, 0.0, 4.0 * c(10.0), 0.0, 0.0, 0.0, 0.0, 504.0,
            -252.0 * c(1.0), 0.0, 0.0, 0.0, -2.0 * c(9.0), -2.0 * c(9.0), 0.0, 0.0, 0.0, -252.0 * c(1.0),
            70.0, 0.0, 0.0, 0.0, 2.0 * c(8.0), 0.0, 0.0, 0.0, 70.0,
            21.0 * c(3.0), 0.0, c(7.0), 0.0, 0.0, c(7.0), 0.0, 21.0 * c(3.0),
            -30.0 * c(2.0), 0.0, -2.0 * c(6.0), 0.0, -2.0 * c(6.0), 0.0, -30.0 * c(2.0),
            -4.0 * c(5.0), 0.0, 0.0, 0.0, 0.0, -4.0 * c(5.0),
            12.0 * c(4.0) + 15.0, 0.0, 5.0 * c(4.0), 0.0, 12.0 * c(4.0) + 15.0,
            // a7 | a8 | a9 | a10
            0.0, 0.0, 0.0, 0.0,
            -56.0 * c(2.0), 0.0, -56.0 * c(2.0),
            0.0, 0.0,
            504.0,
        ],
        _ => unreachable!("order checked by CatalogEntry"),
    };
    debug_assert_eq!(v.len(), p_count(order));
    v
}

/// Quadrant (1 to 4) containing `e^{ikα}` for `α` in the order-`N` catalog interval:
/// `k + 1 (mod 4)` for `k < N` and `N + 2 (mod 4)` for `k = N`, with 0 read as 4.
pub fn quadrant_of(k: usize, alpha: PhaseAngle, order: usize) -> Result<u8> {
    if order < 2 {
        return Err(Error::InvalidOrder(order));
    }
    if k > order {
        return Err(Error::IndexOutOfRange { index: k, order });
    }
    CatalogEntry::new(order)?.check(alpha)?;
    let r = if k < order { k + 1 } else { order + 2 };
    Ok(match r % 4 {
        0 => 4,
        q => q as u8,
    })
}

/// Whether the angle lies in the closed quadrant `q`, up to `tol` radians.
pub fn angle_in_quadrant(angle: f64, q: u8, tol: f64) -> bool {
    let lo = FRAC_PI_2 * (q as f64 - 1.0);
    let t = angle.rem_euclid(2.0 * PI);
    // test t and t - 2π so that angles just below 2π count for Q1 near zero
    [t, t - 2.0 * PI]
        .iter()
        .any(|&x| x >= lo - tol && x <= lo + FRAC_PI_2 + tol)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CatalogTolerances {
    /// Bound on `‖C y‖_∞ / ‖y‖_∞`.
    pub residual: f64,
    /// Entries above `-nonneg` count as nonnegative.
    pub nonneg: f64,
}

impl Default for CatalogTolerances {
    fn default() -> Self {
        Self {
            residual: 1e-9,
            nonneg: 1e-12,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub version: String,
    pub order: usize,
    pub alpha: f64,
    pub residual_inf: f64,
    pub min_entry: f64,
    pub nonneg: bool,
    pub nonzero: bool,
    pub palindrome: bool,
    pub passed: bool,
    pub tolerances: CatalogTolerances,
}

/// `‖C_{α,N} y‖_∞ / ‖y‖_∞`, or `‖C y‖_∞` when `y = 0`.
pub fn relative_residual(y: &ReducedVector, alpha: PhaseAngle) -> Result<f64> {
    let c = build_c(alpha, y.order())?;
    let r = c.matvec_real(y.entries())?;
    let res = r.iter().fold(0.0, |m: f64, z| m.max(z.norm()));
    let scale = y.max_abs();
    Ok(if scale > 0.0 { res / scale } else { res })
}

/// Checks a vector against `C_{α,N}` built independently of how `y` was obtained.
pub fn verify_vector(
    y: &ReducedVector,
    alpha: PhaseAngle,
    tol: &CatalogTolerances,
) -> Result<VerificationReport> {
    let residual_inf = relative_residual(y, alpha)?;
    let min_entry = y.min_entry();
    let nonneg = min_entry >= -tol.nonneg;
    let nonzero = y.max_abs() > 0.0;
    Ok(VerificationReport {
        version: crate::VERSION.to_string(),
        order: y.order(),
        alpha: alpha.radians(),
        residual_inf,
        min_entry,
        nonneg,
        nonzero,
        palindrome: palindrome_check(y),
        passed: nonneg && nonzero && residual_inf <= tol.residual,
        tolerances: *tol,
    })
}

pub fn verify_catalog_entry(
    order: usize,
    alpha: PhaseAngle,
    tol: &CatalogTolerances,
) -> Result<VerificationReport> {
    verify_vector(&explicit_nns(order, alpha)?, alpha, tol)
}

/// Reduced image of `expand(y) ⊗ (1, 0, 0)`, an order `N+1` solution whenever `y` solves
/// the order-`N` system.
pub fn pad_solution(y: &ReducedVector) -> ReducedVector {
    pad_solution_with(y, [1.0, 0.0, 0.0])
}

/// Reduced image of the permutation average of `expand(y) ⊗ e`.
///
/// In the orbit `[N0', N1', N2']` a fraction `N_d'/(N+1)` of the labels ends in digit `d`,
/// and the remaining digits then form the orbit with `N_d'` lowered by one.
pub fn pad_solution_with(y: &ReducedVector, e: [f64; 3]) -> ReducedVector {
    let order = y.order() + 1;
    let inv = 1.0 / order as f64;
    let entries = column_order(order)
        .iter()
        .map(|l| {
            let counts = [l.n0, l.n1, l.n2];
            let mut acc = 0.0;
            for d in 0..3 {
                if counts[d] == 0 || e[d] == 0.0 {
                    continue;
                }
                let mut prev = counts;
                prev[d] -= 1;
                let label = crate::labels::MultisetLabel::new(prev[0], prev[1], prev[2]);
                acc += counts[d] as f64 * inv * e[d] * y.entries()[label.column_index()];
            }
            acc
        })
        .collect();
    ReducedVector::new(order, entries).expect("length p_{N+1}")
}
