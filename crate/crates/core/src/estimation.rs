//! Estimation of the structural parameters (a, b) of the grey power model
//! `x⁽⁰⁾(k) + a·z⁽¹⁾(k) = b·(z⁽¹⁾(k))^α` for fixed λ and α.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics::{Norm, ResidualObjective};
use crate::minimize::{nelder_mead, SimplexOptions};
use crate::series::{ago, check_lambda, mean_sequence, RawSeries};

/// Development coefficient `a`, grey input `b`, power index `alpha` and mean
/// value parameter `lambda`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StructuralParams {
    pub a: f64,
    pub b: f64,
    pub alpha: f64,
    pub lambda: f64,
}

impl StructuralParams {
    pub fn new(a: f64, b: f64, alpha: f64, lambda: f64) -> Result<Self> {
        check_alpha(alpha)?;
        check_lambda(lambda)?;
        if !a.is_finite() || !b.is_finite() {
            return Err(Error::ParameterDomain(format!(
                "non-finite a = {a} or b = {b}"
            )));
        }
        Ok(Self {
            a,
            b,
            alpha,
            lambda,
        })
    }

    /// `b / a`, the steady level of the whitened equation.
    pub fn b_over_a(&self) -> Result<f64> {
        if self.a == 0.0 {
            return Err(Error::ParameterDomain(
                "development coefficient a is zero".into(),
            ));
        }
        Ok(self.b / self.a)
    }

    /// `1 − α`.
    pub fn one_minus_alpha(&self) -> f64 {
        1.0 - self.alpha
    }
}

pub(crate) fn check_alpha(alpha: f64) -> Result<()> {
    if !alpha.is_finite() || alpha == 1.0 {
        return Err(Error::ParameterDomain(format!(
            "power index α = {alpha} is not allowed (α ≠ 1, finite)"
        )));
    }
    Ok(())
}

/// Regressors and targets of the grey equation for one (λ, α).
pub(crate) struct Design {
    pub x0: Vec<f64>,
    pub z: Vec<f64>,
    pub z_pow: Vec<f64>,
}

impl Design {
    pub fn new(raw: &RawSeries, lambda: f64, alpha: f64) -> Result<Self> {
        check_alpha(alpha)?;
        let z = mean_sequence(&ago(raw), lambda)?.values;
        let z_pow = z.iter().map(|v| v.powf(alpha)).collect();
        Ok(Self {
            x0: raw.fit_values()[1..].to_vec(),
            z,
            z_pow,
        })
    }

    pub fn objective(&self, a: f64, b: f64, obj: ResidualObjective) -> f64 {
        let residuals: Vec<f64> = self
            .x0
            .iter()
            .zip(&self.z)
            .zip(&self.z_pow)
            .map(|((&x, &z), &zp)| {
                let r = x + a * z - b * zp;
                if obj.relative {
                    r / x
                } else {
                    r
                }
            })
            .collect();
        obj.norm.apply(&residuals)
    }

    /// Least squares for `x0 ≈ a·(−z) + b·z^α`, rows scaled by `weights`.
    fn solve(&self, weights: Option<&[f64]>) -> Result<(f64, f64)> {
        let w = |i: usize| weights.map_or(1.0, |w| w[i]);
        let m = self.x0.len();
        let col1: Vec<f64> = (0..m).map(|i| -self.z[i] * w(i)).collect();
        let col2: Vec<f64> = (0..m).map(|i| self.z_pow[i] * w(i)).collect();
        let y: Vec<f64> = (0..m).map(|i| self.x0[i] * w(i)).collect();
        solve_two_column(&col1, &col2, &y)
    }
}

fn dot(u: &[f64], v: &[f64]) -> f64 {
    u.iter().zip(v).map(|(a, b)| a * b).sum()
}

/// Thin QR (Gram–Schmidt with one reorthogonalisation pass) for a
/// two-column least-squares problem.
fn solve_two_column(c1: &[f64], c2: &[f64], y: &[f64]) -> Result<(f64, f64)> {
    let r11 = dot(c1, c1).sqrt();
    let c2_norm = dot(c2, c2).sqrt();
    if r11 == 0.0 || c2_norm == 0.0 || !r11.is_finite() || !c2_norm.is_finite() {
        return Err(Error::DegenerateDesign(
            "zero or non-finite regressor column".into(),
        ));
    }
    let q1: Vec<f64> = c1.iter().map(|v| v / r11).collect();
    let mut r12 = dot(&q1, c2);
    let mut v: Vec<f64> = c2.iter().zip(&q1).map(|(c, q)| c - r12 * q).collect();
    let s = dot(&q1, &v);
    v.iter_mut().zip(&q1).for_each(|(vi, q)| *vi -= s * q);
    r12 += s;
    let r22 = dot(&v, &v).sqrt();
    if r22 <= 1e-12 * c2_norm {
        return Err(Error::DegenerateDesign(
            "regressor columns are linearly dependent".into(),
        ));
    }
    let q2: Vec<f64> = v.iter().map(|x| x / r22).collect();
    let b = dot(&q2, y) / r22;
    let a = (dot(&q1, y) - r12 * b) / r11;
    Ok((a, b))
}

/// Least-squares estimate of (a, b) for fixed λ and α.
pub fn lsq_fit(raw: &RawSeries, lambda: f64, alpha: f64) -> Result<StructuralParams> {
    let design = Design::new(raw, lambda, alpha)?;
    let (a, b) = design.solve(None)?;
    StructuralParams::new(a, b, alpha, lambda)
}

/// Explicit 2×2 normal-equation solution for α = 0:
/// `A(λ)·(a, b)ᵀ = b(λ)` with `A = [[‖z‖², −eᵀz], [−eᵀz, ‖e‖²]]` and
/// `b(λ) = (−zᵀx⁰, eᵀx⁰)ᵀ`, inverted by the adjugate.
pub fn lsq_fit_lambda_closed(raw: &RawSeries, lambda: f64) -> Result<StructuralParams> {
    let z = mean_sequence(&ago(raw), lambda)?.values;
    let x0 = &raw.fit_values()[1..];
    let zz: f64 = z.iter().map(|v| v * v).sum();
    let ez: f64 = z.iter().sum();
    let ee = z.len() as f64;
    let zx = dot(&z, x0);
    let ex: f64 = x0.iter().sum();

    let det = zz * ee - ez * ez;
    let a_norm = (zz + ez.abs()).max(ez.abs() + ee);
    if det.abs() < 1e-12 * (1.0 + a_norm) {
        return Err(Error::DegenerateDesign(format!(
            "det A(λ) = {det:e} is numerically zero"
        )));
    }
    let a = (-ee * zx + ez * ex) / det;
    let b = (-zx * ez + zz * ex) / det;
    StructuralParams::new(a, b, 0.0, lambda)
}

/// Result of a p-norm structural fit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormFit {
    pub params: StructuralParams,
    pub objective: f64,
    pub converged: bool,
    pub evaluations: usize,
}

/// Minimise f_p (or its relative variant) over (a, b) at fixed λ, α.
///
/// p = 2 is solved exactly by (weighted) least squares; p ∈ {1, ∞} by a
/// downhill simplex started from `init`. The returned objective never
/// exceeds the objective at `init`.
pub fn norm_fit(
    raw: &RawSeries,
    lambda: f64,
    alpha: f64,
    obj: ResidualObjective,
    init: &StructuralParams,
) -> Result<NormFit> {
    let design = Design::new(raw, lambda, alpha)?;
    let init_obj = design.objective(init.a, init.b, obj);

    let (a, b, objective, converged, evaluations) = match obj.norm {
        Norm::L2 => {
            let weights: Option<Vec<f64>> = obj
                .relative
                .then(|| design.x0.iter().map(|x| 1.0 / x).collect());
            let (a, b) = design.solve(weights.as_deref())?;
            let v = design.objective(a, b, obj);
            if v <= init_obj || !init_obj.is_finite() {
                (a, b, v, true, 1)
            } else {
                (init.a, init.b, init_obj, true, 1)
            }
        }
        Norm::L1 | Norm::Inf => {
            let r = nelder_mead(
                |p| design.objective(p[0], p[1], obj),
                [init.a, init.b],
                SimplexOptions::default(),
            );
            (r.x[0], r.x[1], r.fx, r.converged, r.evaluations)
        }
    };
    if !converged {
        log::warn!(
            "p-norm fit (p = {}) did not converge within the evaluation budget",
            obj.norm
        );
    }
    Ok(NormFit {
        params: StructuralParams::new(a, b, alpha, lambda)?,
        objective,
        converged,
        evaluations,
    })
}
