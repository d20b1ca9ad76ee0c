//! Iterative reduction of `A + E` to `A + D` with `D` on a star pattern.
//!
//! For every matrix unit `E_ij` outside the pattern a correction `F_ij` is
//! chosen (minimum norm) so that `E_ij + F_ijᵀ A + A F_ij` lies on the
//! pattern. Starting from `M_1 = E`, each step forms
//! `C_k = Σ m_ij F_ij` over the off-pattern entries of `M_k` and replaces
//! `A + M_k` by `(I + C_k)ᵀ (A + M_k) (I + C_k)`. The off-pattern part of
//! `M_k` decays quadratically, and the accumulated product
//! `S = (I + C_1)(I + C_2)⋯` satisfies `Sᵀ (A + E) S = A + D`.

use std::io::{self, Write};

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::matcore::{masked_norm, matrix_text_serde, ComplexMatrix, LeastNormSolver, MatrixError, C64};
use crate::patterns::StarPattern;
use crate::tangent::{check_transversality, off_pattern_rows, TangentError, TangentOperator, TransversalityReport, Verdict};

#[derive(Debug, Clone, Error)]
pub enum ReducerError {
    #[error(transparent)]
    Tangent(#[from] TangentError),
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    #[error("pattern does not span the complement of the tangent space (combined rank {} of {})", .0.combined_rank, .0.ambient_dim)]
    NotSpanning(TransversalityReport),
    #[error("no convergence after {} iterations (masked norm {:e})", .trace.iterations, .trace.last_masked_norm())]
    MaxIterExceeded { trace: Box<ReductionTrace> },
    #[error("eps must lie in (0, 1/3), got {0}")]
    EpsOutOfRange(f64),
    #[error("bound recurrence violated at step {step}")]
    BoundViolated { step: usize },
}

/// Precomputed corrections and constants for one `(A, pattern)` pair.
#[derive(Clone, Debug)]
pub struct ReducerSetup {
    a: ComplexMatrix,
    pattern: StarPattern,
    /// Indexed by `i * n + j` (0-based); zero on the pattern.
    f: Vec<ComplexMatrix>,
    a_norm: f64,
    f_sum: f64,
    eps_max: f64,
    report: TransversalityReport,
}

impl ReducerSetup {
    pub fn prepare(a: &ComplexMatrix, pattern: &StarPattern, tol: f64) -> Result<Self, ReducerError> {
        let report = check_transversality(a, pattern, tol)?;
        if report.verdict == Verdict::NotSpanning {
            return Err(ReducerError::NotSpanning(report));
        }
        let n = a.rows();
        let t = TangentOperator::new(a)?;
        let (k, off) = off_pattern_rows(&t, pattern);
        let solver = LeastNormSolver::new(&k, tol);
        let f = (0..n * n)
            .into_par_iter()
            .map(|idx| {
                let (i, j) = (idx / n, idx % n);
                if pattern.contains(i + 1, j + 1) {
                    return Ok(ComplexMatrix::zeros(n, n));
                }
                let rhs: Vec<C64> = off
                    .iter()
                    .map(|&p| if p == (i, j) { C64::new(-1.0, 0.0) } else { C64::new(0.0, 0.0) })
                    .collect();
                let x = solver.solve(&rhs)?;
                ComplexMatrix::devectorize(&x, n, n)
            })
            .collect::<Result<Vec<_>, MatrixError>>()?;
        let a_norm = a.frobenius_norm();
        let f_sum: f64 = f.iter().map(ComplexMatrix::frobenius_norm).sum();
        let eps_max = 1.0 / (f_sum * (a_norm + 1.0) * (f_sum + 2.0)).max(3.0);
        Ok(Self {
            a: a.clone(),
            pattern: pattern.clone(),
            f,
            a_norm,
            f_sum,
            eps_max,
            report,
        })
    }

    pub fn base(&self) -> &ComplexMatrix {
        &self.a
    }

    pub fn pattern(&self) -> &StarPattern {
        &self.pattern
    }

    /// The correction for the 1-based position `(i, j)`.
    pub fn correction(&self, i: usize, j: usize) -> &ComplexMatrix {
        &self.f[(i - 1) * self.a.rows() + (j - 1)]
    }

    /// `‖A‖`
    pub fn a(&self) -> f64 {
        self.a_norm
    }

    /// `Σ ‖F_ij‖`
    pub fn f(&self) -> f64 {
        self.f_sum
    }

    pub fn eps_max(&self) -> f64 {
        self.eps_max
    }

    /// Whether the pattern is also a minimal complement (so `D` is unique).
    pub fn is_direct(&self) -> bool {
        self.report.verdict == Verdict::DirectSum
    }

    pub fn report(&self) -> &TransversalityReport {
        &self.report
    }

    /// `2 f (a+1) (f+2)`: bounds `‖M_{k+1}‖_𝒟 / (‖M_k‖_𝒟 ‖M_k‖)` while `‖M_k‖ ≤ 1`.
    pub fn quadratic_constant(&self) -> f64 {
        2.0 * self.f_sum * (self.a_norm + 1.0) * (self.f_sum + 2.0)
    }
}

/// One step: returns `(M_{k+1}, C_k)`.
pub fn step(setup: &ReducerSetup, m: &ComplexMatrix) -> (ComplexMatrix, ComplexMatrix) {
    let n = setup.a.rows();
    let mut c = ComplexMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let mij = m[(i, j)];
            if mij == C64::new(0.0, 0.0) || setup.pattern.contains(i + 1, j + 1) {
                continue;
            }
            c = &c + &setup.f[i * n + j].scale(mij);
        }
    }
    let am = &setup.a + m;
    let ct = c.transpose();
    let ct_am = &ct * &am;
    let next = &(&(m + &ct_am) + &(&am * &c)) + &(&ct_am * &c);
    (next, c)
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct ReduceOptions {
    /// Basin parameter; defaults to `0.999 · eps_max`.
    pub eps: Option<f64>,
    /// Stop once the masked norm drops below this; defaults to `1e-12 (1 + ‖A‖)`.
    pub stop_tol: Option<f64>,
    /// Defaults to 100.
    pub max_iter: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TraceRecord {
    pub k: usize,
    pub norm: f64,
    pub masked_norm: f64,
    /// `‖C_k‖`, absent for the final record where no step was taken.
    pub c_norm: Option<f64>,
    pub delta_bound: f64,
    pub tau_bound: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct ReductionTrace {
    pub eps: f64,
    pub records: Vec<TraceRecord>,
    pub converged: bool,
    pub iterations: usize,
}

impl ReductionTrace {
    pub fn last_masked_norm(&self) -> f64 {
        self.records.last().map_or(0.0, |r| r.masked_norm)
    }

    /// One JSON object per record.
    pub fn write_json_lines<W: Write>(&self, mut w: W) -> io::Result<()> {
        for r in &self.records {
            serde_json::to_writer(&mut w, r)?;
            writeln!(w)?;
        }
        Ok(())
    }

    /// Whether every record lies under `ε^{2k}` (masked) and `ε³` (full).
    pub fn within_bounds(&self) -> bool {
        self.records
            .iter()
            .all(|r| r.masked_norm < self.eps.powi(2 * r.k as i32) && r.norm < self.eps.powi(3))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ReductionResult {
    #[serde(rename = "S", with = "matrix_text_serde")]
    pub s: ComplexMatrix,
    #[serde(rename = "D", with = "matrix_text_serde")]
    pub d: ComplexMatrix,
    pub residual: f64,
    pub in_basin: bool,
    pub trace: ReductionTrace,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

/// `(δ_i, τ_i)` for `i = 1..=k_max`: `δ_1 = τ_1 = ε⁵`,
/// `δ_{i+1} = δ_i τ_i / ε`, `τ_{i+1} = τ_i + δ_i / ε`.
pub fn bound_sequence(eps: f64, k_max: usize) -> Result<Vec<(f64, f64)>, ReducerError> {
    if !(eps > 0.0 && eps < 1.0 / 3.0) {
        return Err(ReducerError::EpsOutOfRange(eps));
    }
    let mut out = Vec::with_capacity(k_max);
    let (mut d, mut t) = (eps.powi(5), eps.powi(5));
    for i in 1..=k_max {
        if !(d > 0.0 && d < eps.powi(2 * i as i32) && t > 0.0 && t < eps.powi(3)) {
            return Err(ReducerError::BoundViolated { step: i });
        }
        out.push((d, t));
        (d, t) = (d * t / eps, t + d / eps);
    }
    Ok(out)
}

fn bound_at(bounds: &[(f64, f64)], k: usize) -> (f64, f64) {
    bounds.get(k - 1).copied().unwrap_or((0.0, 0.0))
}

/// Runs the iteration from `M_1 = E`.
pub fn reduce(setup: &ReducerSetup, e: &ComplexMatrix, opts: ReduceOptions) -> Result<ReductionResult, ReducerError> {
    let n = setup.a.rows();
    if e.shape() != (n, n) {
        return Err(MatrixError::DimensionMismatch {
            expected: (n, n),
            got: e.shape(),
        }
        .into());
    }
    if !e.is_finite() {
        return Err(MatrixError::NonFinite { row: 0, col: 0 }.into());
    }
    let eps = opts.eps.unwrap_or(0.999 * setup.eps_max);
    let stop_tol = opts.stop_tol.unwrap_or(1e-12 * (1.0 + setup.a_norm));
    let max_iter = opts.max_iter.unwrap_or(100);
    let bounds = if eps > 0.0 && eps < 1.0 / 3.0 {
        bound_sequence(eps, max_iter + 1).unwrap_or_default()
    } else {
        Vec::new()
    };

    let mut warnings = Vec::new();
    let e_norm = e.frobenius_norm();
    let in_basin = eps < setup.eps_max && e_norm < eps.powi(5);
    if !in_basin {
        warnings.push(format!(
            "outside the certified basin: |E| = {e_norm:e}, eps = {eps:e}, eps_max = {:e}",
            setup.eps_max
        ));
    }
    if !setup.is_direct() {
        warnings.push("pattern is not a direct complement; D need not be unique".to_string());
    }

    let mut trace = ReductionTrace {
        eps,
        ..Default::default()
    };
    let mut s = ComplexMatrix::identity(n);
    let mut m = e.clone();
    let mut slow_steps = 0;
    let mut k = 1;
    loop {
        let masked = masked_norm(&m, &setup.pattern)?;
        let (delta_bound, tau_bound) = bound_at(&bounds, k);
        let mut rec = TraceRecord {
            k,
            norm: m.frobenius_norm(),
            masked_norm: masked,
            c_norm: None,
            delta_bound,
            tau_bound,
        };
        if masked < stop_tol {
            trace.records.push(rec);
            trace.converged = true;
            break;
        }
        if trace.iterations >= max_iter || slow_steps >= 3 || !masked.is_finite() {
            trace.records.push(rec);
            return Err(ReducerError::MaxIterExceeded { trace: Box::new(trace) });
        }
        let (next, c) = step(setup, &m);
        rec.c_norm = Some(c.frobenius_norm());
        trace.records.push(rec);
        s = &s + &(&s * &c);
        let next_masked = masked_norm(&next, &setup.pattern)?;
        slow_steps = if next_masked > 0.9 * masked { slow_steps + 1 } else { 0 };
        m = next;
        trace.iterations += 1;
        k += 1;
    }

    let mut d = m;
    for i in 0..n {
        for j in 0..n {
            if !setup.pattern.contains(i + 1, j + 1) {
                d[(i, j)] = C64::new(0.0, 0.0);
            }
        }
    }
    Ok(ReductionResult {
        s,
        d,
        residual: trace.last_masked_norm(),
        in_basin,
        trace,
        warnings,
    })
}
