//! Does `C_{α,N} y = 0` have a nonzero nonnegative solution?
//!
//! The question is posed as the LP `{ y ≥ 0, 1ᵀy = 1, M y = 0 }` on the real embedding
//! `M = [Re C; Im C]` and answered by [`crate::lp::phase_one`]. A feasible LP yields a
//! witness `y`; an infeasible one yields, through its dual, a vector `h` with `hᵀM > 0`
//! columnwise, which rules out every nonzero `y ≥ 0` with `M y = 0`. Both kinds of answer
//! are re-checked against freshly built matrices before they are returned.

use std::f64::consts::{FRAC_PI_2, PI};

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::labels::{p_count, MAX_ORDER};
use crate::lp::{phase_one, SimplexOptions};
use crate::matrix::ComplexDenseMatrix;
use crate::symmetry::ReducedVector;
use crate::tensor_system::{build_c, PhaseAngle};

/// `C_{α,N}` embedded as the real `2(N+1) × p_N` matrix `[Re C; Im C]`.
#[derive(Debug, Clone, PartialEq)]
pub struct RealizedSystem {
    pub order: usize,
    pub alpha: PhaseAngle,
    pub m: DMatrix<f64>,
}

pub fn realize(alpha: PhaseAngle, order: usize) -> Result<RealizedSystem> {
    Ok(RealizedSystem {
        order,
        alpha,
        m: build_c(alpha, order)?.realify(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeasibilityOptions {
    /// Phase-1 objectives at or below this value count as feasible.
    pub objective: f64,
    /// Bound on `‖C y‖_∞` for an accepted witness (with `Σy = 1`).
    pub witness_residual: f64,
    /// Smallest accepted certificate margin `min_j (hᵀM)_j` with `‖h‖_∞ = 1`.
    pub margin: f64,
    /// Entries of a witness above `-nonneg` count as nonnegative.
    pub nonneg: f64,
    pub simplex: SimplexOptions,
}

impl Default for FeasibilityOptions {
    fn default() -> Self {
        Self {
            objective: 1e-10,
            witness_residual: 1e-8,
            margin: 1e-8,
            nonneg: 1e-12,
            simplex: SimplexOptions::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum FeasibilityOutcome {
    Witness { y: ReducedVector, residual: f64 },
    Certificate { h: Vec<f64>, margin: f64 },
}

impl FeasibilityOutcome {
    pub fn is_witness(&self) -> bool {
        matches!(self, Self::Witness { .. })
    }

    pub fn label(&self) -> &'static str {
        match self {
            Self::Witness { .. } => "witness",
            Self::Certificate { .. } => "certificate",
        }
    }

    /// Residual of a witness or margin of a certificate.
    pub fn metric(&self) -> f64 {
        match self {
            Self::Witness { residual, .. } => *residual,
            Self::Certificate { margin, .. } => *margin,
        }
    }
}

/// Decides feasibility for `C_{α,N}`.
pub fn nns_exists(
    alpha: PhaseAngle,
    order: usize,
    opts: &FeasibilityOptions,
) -> Result<FeasibilityOutcome> {
    nns_exists_for(&build_c(alpha, order)?, alpha, order, opts)
}

/// Decides feasibility for any complex matrix with the row space of `C_{α,N}` and
/// `p_N` columns, such as `B_{α,N}`. Witnesses are re-checked against a rebuilt `C_{α,N}`,
/// certificates (of length `2·rows`) against the embedding of `system`.
pub fn nns_exists_for(
    system: &ComplexDenseMatrix,
    alpha: PhaseAngle,
    order: usize,
    opts: &FeasibilityOptions,
) -> Result<FeasibilityOutcome> {
    let p = p_count(order);
    if system.cols() != p {
        return Err(Error::ShapeMismatch(format!(
            "system has {} columns, expected {p}",
            system.cols()
        )));
    }
    let m = system.realify();
    let rows = m.nrows();
    let mut a = DMatrix::zeros(rows + 1, p);
    a.view_mut((0, 0), (rows, p)).copy_from(&m);
    a.row_mut(rows).fill(1.0);
    let mut b = vec![0.0; rows + 1];
    b[rows] = 1.0;
    let sol = phase_one(&a, &b, &opts.simplex)?;

    let mut residual = f64::INFINITY;
    let mut margin = f64::NEG_INFINITY;
    if sol.objective <= opts.objective {
        let mut y: Vec<f64> = sol.x.iter().map(|&v| v.max(0.0)).collect();
        let total: f64 = y.iter().sum();
        if total > 0.0 {
            y.iter_mut().for_each(|v| *v /= total);
            let y = ReducedVector::new(order, y)?;
            residual = witness_residual(&y, alpha)?;
            if residual <= opts.witness_residual {
                return Ok(FeasibilityOutcome::Witness { y, residual });
            }
        }
    } else {
        let mut h: Vec<f64> = sol.duals[..rows].iter().map(|u| -u).collect();
        let scale = h.iter().fold(0.0, |s: f64, v| s.max(v.abs()));
        if scale > 0.0 {
            h.iter_mut().for_each(|v| *v /= scale);
            margin = column_margin(&m, &h);
            if margin >= opts.margin {
                return Ok(FeasibilityOutcome::Certificate { h, margin });
            }
        }
    }
    Err(Error::NumericalIndeterminate {
        alpha: alpha.radians(),
        order,
        objective: sol.objective,
        residual,
        margin,
    })
}

fn witness_residual(y: &ReducedVector, alpha: PhaseAngle) -> Result<f64> {
    let c = build_c(alpha, y.order())?;
    let r = c.matvec_real(y.entries())?;
    Ok(r.iter().fold(0.0, |m: f64, z| m.max(z.norm())))
}

/// `min_j (hᵀM)_j`.
pub fn column_margin(m: &DMatrix<f64>, h: &[f64]) -> f64 {
    let hv = DVector::from_column_slice(h);
    (m.transpose() * hv).min()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CertificateCheck {
    pub valid: bool,
    /// Recomputed `min_j (hᵀM)_j`.
    pub margin: f64,
}

/// Recomputes the column margins of `h` against `[Re C; Im C]` for a freshly built `C_{α,N}`.
/// Valid iff the recomputed margin is positive and at least `declared - 1e-12`.
pub fn verify_certificate(
    h: &[f64],
    declared: f64,
    alpha: PhaseAngle,
    order: usize,
) -> Result<CertificateCheck> {
    let m = realize(alpha, order)?.m;
    if h.len() != m.nrows() {
        return Ok(CertificateCheck {
            valid: false,
            margin: f64::NEG_INFINITY,
        });
    }
    let margin = column_margin(&m, h);
    Ok(CertificateCheck {
        valid: margin > 0.0 && margin >= declared - 1e-12,
        margin,
    })
}

/// How a probe was classified.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Probe {
    Witness,
    Certificate,
    /// No certificate, but the phase-1 objective stayed above the feasibility tolerance.
    UncertifiedInfeasible,
}

impl Probe {
    pub fn feasible(self) -> bool {
        self == Probe::Witness
    }
}

/// Feasibility predicate used by the threshold search. Indeterminate outcomes whose
/// phase-1 objective exceeds `opts.objective` are read as infeasible; any other failure
/// propagates.
pub fn probe(alpha: PhaseAngle, order: usize, opts: &FeasibilityOptions) -> Result<Probe> {
    match nns_exists(alpha, order, opts) {
        Ok(FeasibilityOutcome::Witness { .. }) => Ok(Probe::Witness),
        Ok(FeasibilityOutcome::Certificate { .. }) => Ok(Probe::Certificate),
        Err(Error::NumericalIndeterminate { objective, .. }) if objective > opts.objective => {
            Ok(Probe::UncertifiedInfeasible)
        }
        Err(e) => Err(e),
    }
}

/// `π/2 + π/(2N)`.
pub fn conjectured_threshold(order: usize) -> f64 {
    FRAC_PI_2 + PI / (2 * order) as f64
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThresholdOptions {
    pub tol_alpha: f64,
    /// Points of the monotonicity pre-scan between the initial bracket ends.
    pub prescan: usize,
    /// Initial infeasible end is `π/2 + lower_offset`.
    pub lower_offset: f64,
}

impl Default for ThresholdOptions {
    fn default() -> Self {
        Self {
            tol_alpha: 1e-6,
            prescan: 24,
            lower_offset: 1e-4,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdEstimate {
    pub version: String,
    pub order: usize,
    pub alpha_star: f64,
    /// Largest probed infeasible angle.
    pub lo: f64,
    /// Smallest probed feasible angle.
    pub hi: f64,
    pub bracket_width: f64,
    pub conjectured: f64,
    pub probes: usize,
    /// Probes read as infeasible without a certificate meeting the margin.
    pub uncertified_probes: usize,
    pub tolerances: FeasibilityOptions,
    pub tol_alpha: f64,
}

/// Locates the feasible/infeasible transition in `α` by bisection between
/// `π/2 + lower_offset` (expected infeasible) and `π` (expected feasible).
pub fn threshold_bisect(
    order: usize,
    topts: &ThresholdOptions,
    opts: &FeasibilityOptions,
) -> Result<ThresholdEstimate> {
    if order == 0 || order > MAX_ORDER {
        return Err(Error::InvalidOrder(order));
    }
    if !(topts.tol_alpha >= 1e-8) {
        return Err(Error::InvalidArgument(format!(
            "tol_alpha must be at least 1e-8, got {}",
            topts.tol_alpha
        )));
    }
    let mut lo = FRAC_PI_2 + topts.lower_offset;
    let mut hi = PI;
    let grid: Vec<f64> = (0..=topts.prescan + 1)
        .map(|i| lo + (hi - lo) * i as f64 / (topts.prescan + 1) as f64)
        .collect();
    let scan: Vec<Probe> = grid
        .par_iter()
        .map(|&a| probe(PhaseAngle::new(a)?, order, opts))
        .collect::<Result<_>>()?;
    let mut probes = scan.len();
    let mut uncertified = scan
        .iter()
        .filter(|p| **p == Probe::UncertifiedInfeasible)
        .count();

    if scan[0].feasible() {
        return Err(Error::NonMonotonePredicate(format!(
            "feasible at the lower end alpha={lo}"
        )));
    }
    if !scan[scan.len() - 1].feasible() {
        return Err(Error::NonMonotonePredicate(format!(
            "infeasible at the upper end alpha={hi}"
        )));
    }
    let first = scan.iter().position(|p| p.feasible()).expect("last is feasible");
    if let Some(bad) = scan[first..].iter().position(|p| !p.feasible()) {
        return Err(Error::NonMonotonePredicate(format!(
            "feasible at alpha={} but infeasible at alpha={}",
            grid[first],
            grid[first + bad]
        )));
    }
    lo = grid[first - 1];
    hi = grid[first];

    while hi - lo > topts.tol_alpha {
        let mid = 0.5 * (lo + hi);
        let p = probe(PhaseAngle::new(mid)?, order, opts)?;
        probes += 1;
        if p == Probe::UncertifiedInfeasible {
            uncertified += 1;
        }
        if p.feasible() {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(ThresholdEstimate {
        version: crate::VERSION.to_string(),
        order,
        alpha_star: 0.5 * (lo + hi),
        lo,
        hi,
        bracket_width: hi - lo,
        conjectured: conjectured_threshold(order),
        probes,
        uncertified_probes: uncertified,
        tolerances: *opts,
        tol_alpha: topts.tol_alpha,
    })
}

/// `k` midpoints strictly inside `[π/2, π/2 + π/(2N))`.
pub fn necessity_grid(order: usize, k: usize) -> Vec<PhaseAngle> {
    let width = conjectured_threshold(order) - FRAC_PI_2;
    (0..k)
        .map(|i| PhaseAngle::new(FRAC_PI_2 + width * (i as f64 + 0.5) / k as f64).expect("finite"))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanPoint {
    pub alpha: f64,
    /// `witness`, `certificate` or `indeterminate`.
    pub outcome: String,
    /// Witness residual, certificate margin, or phase-1 objective when indeterminate.
    pub metric: f64,
    /// For certificates: whether [`verify_certificate`] accepts them.
    pub verified: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NecessityReport {
    pub version: String,
    pub order: usize,
    pub points: Vec<ScanPoint>,
    pub certificates: usize,
    /// Grid points without a verified certificate.
    pub anomalies: usize,
    pub tolerances: FeasibilityOptions,
}

/// Runs [`nns_exists`] at each angle, in parallel, keeping grid order.
pub fn scan(order: usize, grid: &[PhaseAngle], opts: &FeasibilityOptions) -> Result<Vec<ScanPoint>> {
    grid.par_iter()
        .map(|&alpha| scan_point(alpha, order, opts))
        .collect()
}

fn scan_point(alpha: PhaseAngle, order: usize, opts: &FeasibilityOptions) -> Result<ScanPoint> {
    let (outcome, metric, verified) = match nns_exists(alpha, order, opts) {
        Ok(out @ FeasibilityOutcome::Certificate { .. }) => {
            let FeasibilityOutcome::Certificate { h, margin } = &out else {
                unreachable!()
            };
            let check = verify_certificate(h, *margin, alpha, order)?;
            ("certificate", *margin, check.valid && check.margin >= opts.margin)
        }
        Ok(out) => ("witness", out.metric(), false),
        Err(Error::NumericalIndeterminate { objective, .. }) => {
            ("indeterminate", objective, false)
        }
        Err(e) => return Err(e),
    };
    Ok(ScanPoint {
        alpha: alpha.radians(),
        outcome: outcome.to_string(),
        metric,
        verified,
    })
}

/// Expects a verified certificate at every grid point; anything else is an anomaly.
pub fn necessity_scan(
    order: usize,
    grid: &[PhaseAngle],
    opts: &FeasibilityOptions,
) -> Result<NecessityReport> {
    let points = scan(order, grid, opts)?;
    let certificates = points.iter().filter(|p| p.verified).count();
    Ok(NecessityReport {
        version: crate::VERSION.to_string(),
        order,
        anomalies: points.len() - certificates,
        certificates,
        points,
        tolerances: *opts,
    })
}

/// `k` angles `π/2 + (i+1)/k · π/2`, ending at `π`.
pub fn sweep_grid(k: usize) -> Vec<PhaseAngle> {
    (0..k)
        .map(|i| PhaseAngle::new(FRAC_PI_2 + FRAC_PI_2 * (i + 1) as f64 / k as f64).expect("finite"))
        .collect()
}
