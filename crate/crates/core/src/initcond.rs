//! Integration constant `c` of the whitened-equation solution
//! `x⁽¹⁾(t) = (c·e^{−(1−α)at} + b/a)^{1/(1−α)}` and the equivalent initial
//! condition weight β between the anchors x⁽¹⁾(1) and x⁽¹⁾(n).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimation::StructuralParams;
use crate::metrics::{level_objective, LevelObjective};
use crate::minimize::{bracket_symmetric, golden_section};
use crate::response::response_value;
use crate::series::AgoSeries;

/// How the integration constant is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum InitPolicy {
    /// Fixed weight β; β = 1 is the classic x⁽¹⁾(1) anchor, β = 0 anchors at x⁽¹⁾(n).
    BetaFixed { beta: f64 },
    /// Closed-form least squares of the level residuals (golden-section
    /// search on f₂ when α ≠ 0).
    CLeastSquares,
    /// Golden-section minimisation of f₁ or f₂.
    CMinimize { objective: LevelObjective },
}

/// A resolved initial condition.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InitCondition {
    pub c: f64,
    pub beta: f64,
    pub policy: InitPolicy,
    /// False when the back-computed β falls outside [0, 1]. Predictions use
    /// `c` directly, so such a β is reported, never clamped.
    pub beta_in_unit_interval: bool,
}

/// Pieces of the anchor relation
/// `c·[β·e₁ + (1−β)·eₙ] + b/a = β·u + (1−β)·v`.
struct Anchors {
    e_first: f64,
    e_last: f64,
    u: f64,
    v: f64,
    steady: f64,
}

impl Anchors {
    fn new(sp: &StructuralParams, ago: &AgoSeries) -> Result<Self> {
        let q = sp.one_minus_alpha();
        let steady = sp.b_over_a()?;
        let n = ago.len() as f64;
        let (u, v) = (ago.first().powf(q), ago.last().powf(q));
        if !u.is_finite() || !v.is_finite() {
            return Err(Error::ParameterDomain(
                "accumulated anchors cannot be raised to 1 − α".into(),
            ));
        }
        Ok(Self {
            e_first: (-q * sp.a).exp(),
            e_last: (-q * sp.a * n).exp(),
            u,
            v,
            steady,
        })
    }
}

/// c from a given β.
pub fn c_from_beta(beta: f64, sp: &StructuralParams, ago: &AgoSeries) -> Result<f64> {
    let an = Anchors::new(sp, ago)?;
    let denom = beta * an.e_first + (1.0 - beta) * an.e_last;
    if denom == 0.0 || !denom.is_finite() || denom.abs() < 1e-300 {
        return Err(Error::DegenerateInitialCondition(format!(
            "β·e^(−(1−α)a) + (1−β)·e^(−(1−α)an) vanishes for β = {beta}"
        )));
    }
    Ok((beta * an.u + (1.0 - beta) * an.v - an.steady) / denom)
}

/// β from a given c, inverting the anchor relation (linear in β).
pub fn beta_from_c(c: f64, sp: &StructuralParams, ago: &AgoSeries) -> Result<f64> {
    let an = Anchors::new(sp, ago)?;
    // β·(c·(e₁ − eₙ) − u + v) = v − b/a − c·eₙ, with e₁ − eₙ taken through
    // expm1 since the two are close when a is small
    let q = sp.one_minus_alpha();
    let e_diff = -an.e_first * (-q * sp.a * (ago.len() as f64 - 1.0)).exp_m1();
    let coef = c * e_diff - (an.u - an.v);
    let scale = (c * an.e_first).abs() + (c * an.e_last).abs() + an.u.abs() + an.v.abs();
    if coef.abs() <= 1e-14 * scale || !coef.is_finite() {
        return Err(Error::DegenerateInitialCondition(
            "first and last anchors are indistinguishable for this c".into(),
        ));
    }
    Ok((an.v - an.steady - c * an.e_last) / coef)
}

/// Least-squares c for GM(1,1) (α = 0):
/// `c = −(Σ e^{−2ak})⁻¹ Σ (b/a − x⁽¹⁾(k))·e^{−ak}`, k = 1..n.
pub fn c_least_squares_gm(sp: &StructuralParams, ago: &AgoSeries) -> Result<f64> {
    if sp.alpha != 0.0 {
        return Err(Error::ParameterDomain(format!(
            "closed-form c requires α = 0, got {}",
            sp.alpha
        )));
    }
    let steady = sp.b_over_a()?;
    let (mut num, mut den) = (0.0, 0.0);
    for (i, x1) in ago.values().iter().enumerate() {
        let e = (-sp.a * (i + 1) as f64).exp();
        num += (steady - x1) * e;
        den += e * e;
    }
    Ok(-num / den)
}

/// Level objective f₁ or f₂ of the response with constant `c`.
pub fn level_objective_at(
    c: f64,
    sp: &StructuralParams,
    ago: &AgoSeries,
    kind: LevelObjective,
) -> f64 {
    let fitted: Vec<f64> = (1..=ago.len())
        .map(|k| response_value(sp, c, k as f64).unwrap_or(f64::NAN))
        .collect();
    level_objective(&fitted, ago.values(), kind)
}

/// c minimising f₁ or f₂ by golden-section search on a bracket grown
/// symmetrically around c(β = 0.5).
pub fn c_minimize(
    sp: &StructuralParams,
    ago: &AgoSeries,
    objective: LevelObjective,
) -> Result<f64> {
    let center = c_from_beta(0.5, sp, ago).or_else(|_| c_from_beta(1.0, sp, ago))?;
    let f = |c: f64| level_objective_at(c, sp, ago, objective);
    let half = if center == 0.0 {
        1.0
    } else {
        0.5 * center.abs()
    };
    let (lo, hi) = bracket_symmetric(f, center, half, 60).ok_or_else(|| {
        Error::OptimizationDomain(format!(
            "no finite bracket for the integration constant around c = {center}"
        ))
    })?;
    let r = golden_section(f, lo, hi, 1e-12 * (1.0 + center.abs()), 200);
    if !r.fx.is_finite() {
        return Err(Error::OptimizationDomain(
            "level objective is infinite across the bracket".into(),
        ));
    }
    Ok(r.x)
}

/// Resolve an initial-condition policy into (c, β).
pub fn resolve(
    policy: InitPolicy,
    sp: &StructuralParams,
    ago: &AgoSeries,
) -> Result<InitCondition> {
    let (c, beta) = match policy {
        InitPolicy::BetaFixed { beta } => (c_from_beta(beta, sp, ago)?, beta),
        InitPolicy::CLeastSquares => {
            let c = if sp.alpha == 0.0 {
                c_least_squares_gm(sp, ago)?
            } else {
                c_minimize(sp, ago, LevelObjective::F2)?
            };
            (c, beta_from_c(c, sp, ago)?)
        }
        InitPolicy::CMinimize { objective } => {
            let c = c_minimize(sp, ago, objective)?;
            (c, beta_from_c(c, sp, ago)?)
        }
    };
    let beta_in_unit_interval = (0.0..=1.0).contains(&beta);
    if !beta_in_unit_interval {
        log::warn!(
            "initial condition weight β = {beta} lies outside [0, 1]; using c = {c} unclamped"
        );
    }
    Ok(InitCondition {
        c,
        beta,
        policy,
        beta_in_unit_interval,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimation::lsq_fit;
    use crate::series::{ago, RawSeries};

    const EX1_FIT: [f64; 5] = [2.9836, 4.4511, 6.6402, 9.9061, 14.7781];
    const EX2_FIT: [f64; 9] = [
        5565.83, 5590.19, 5600.52, 5600.69, 5600.87, 5600.92, 5570.38, 5450.19, 5300.09,
    ];

    fn classic(values: &[f64]) -> (StructuralParams, AgoSeries) {
        let raw = RawSeries::new(values.to_vec()).unwrap();
        (lsq_fit(&raw, 0.5, 0.0).unwrap(), ago(&raw))
    }

    #[test]
    fn beta_one_is_classic_constant() {
        let (sp, acc) = classic(&EX1_FIT);
        let c = c_from_beta(1.0, &sp, &acc).unwrap();
        let k = sp.b / sp.a;
        assert!((c - (acc.first() - k) * sp.a.exp()).abs() < 1e-12 * c.abs());
    }

    #[test]
    fn beta_zero_anchors_last_point() {
        let (sp, acc) = classic(&EX1_FIT);
        let c = c_from_beta(0.0, &sp, &acc).unwrap();
        let at_n = response_value(&sp, c, acc.len() as f64).unwrap();
        assert!((at_n - acc.last()).abs() < 1e-9);
    }

    #[test]
    fn least_squares_c_recovers_exact_level() {
        let sp = StructuralParams::new(-0.3, 1.5, 0.0, 0.5).unwrap();
        let c0 = 2.75;
        let values: Vec<f64> = (1..=7)
            .map(|k| c0 * (0.3 * k as f64).exp() + 1.5 / -0.3)
            .collect();
        let acc = AgoSeries::new(values).unwrap();
        let c = c_least_squares_gm(&sp, &acc).unwrap();
        assert!((c - c0).abs() < 1e-10, "{c}");
    }

    #[test]
    fn least_squares_c_requires_gm() {
        let (sp, acc) = classic(&EX1_FIT);
        let sp2 = StructuralParams { alpha: 2.0, ..sp };
        assert!(c_least_squares_gm(&sp2, &acc).is_err());
    }

    #[test]
    fn example_one_optimal_beta() {
        let (sp, acc) = classic(&EX1_FIT);
        let c = c_least_squares_gm(&sp, &acc).unwrap();
        let beta = beta_from_c(c, &sp, &acc).unwrap();
        assert!((beta - 0.522684).abs() < 1e-3, "{beta}");
        let searched = c_minimize(&sp, &acc, LevelObjective::F2).unwrap();
        assert!((searched - c).abs() < 1e-8 * c.abs());
    }

    #[test]
    fn example_two_optimal_beta_value() {
        // a ≈ 0.006 makes β nearly irrelevant to the predictions; the
        // least-squares constant corresponds to β ≈ −7.9568 (confirmed with
        // 50-digit arithmetic), not the 0.499969 printed with the table.
        let (sp, acc) = classic(&EX2_FIT);
        let c = c_least_squares_gm(&sp, &acc).unwrap();
        let beta = beta_from_c(c, &sp, &acc).unwrap();
        assert!((beta - (-7.956_834_7)).abs() < 1e-4, "{beta}");
    }

    #[test]
    fn beta_round_trip() {
        let (sp, acc) = classic(&EX1_FIT);
        for beta in [0.0, 0.3, 0.5, 1.0, 1.7] {
            let c = c_from_beta(beta, &sp, &acc).unwrap();
            assert!((beta_from_c(c, &sp, &acc).unwrap() - beta).abs() < 1e-10);
        }
    }

    #[test]
    fn verhulst_constant_matches_reciprocal_form() {
        let raw = RawSeries::new(vec![2.0, 3.1, 4.4, 5.6, 6.1, 6.3]).unwrap();
        let sp = lsq_fit(&raw, 0.5, 2.0).unwrap();
        let acc = ago(&raw);
        let beta = 0.4;
        let n = acc.len() as f64;
        let expected = (beta / acc.first() + (1.0 - beta) / acc.last() - sp.b / sp.a)
            / (beta * sp.a.exp() + (1.0 - beta) * (sp.a * n).exp());
        let c = c_from_beta(beta, &sp, &acc).unwrap();
        assert!((c - expected).abs() < 1e-12 * expected.abs());
    }

    #[test]
    fn recovers_logistic_constant() {
        let (a, b, c0) = (-0.6, -0.02, 0.9);
        let sp = StructuralParams::new(a, b, 2.0, 0.5).unwrap();
        let values: Vec<f64> = (1..=8)
            .map(|t| 1.0 / (c0 * (a * t as f64).exp() + b / a))
            .collect();
        let acc = AgoSeries::new(values).unwrap();
        for kind in [LevelObjective::F1, LevelObjective::F2] {
            let c = c_minimize(&sp, &acc, kind).unwrap();
            assert!((c - c0).abs() < 1e-6, "{kind:?}: {c}");
        }
    }

    #[test]
    fn f1_minimiser_is_no_worse_than_neighbours() {
        let (sp, acc) = classic(&EX1_FIT);
        let c = c_minimize(&sp, &acc, LevelObjective::F1).unwrap();
        let f = |c| level_objective_at(c, &sp, &acc, LevelObjective::F1);
        for d in [1e-6, 1e-4, 1e-2] {
            assert!(f(c) <= f(c + d * (1.0 + c.abs())));
            assert!(f(c) <= f(c - d * (1.0 + c.abs())));
        }
    }

    #[test]
    fn resolve_policies() {
        let (sp, acc) = classic(&EX1_FIT);
        let ic = resolve(InitPolicy::BetaFixed { beta: 1.0 }, &sp, &acc).unwrap();
        assert_eq!(ic.beta, 1.0);
        assert!(ic.beta_in_unit_interval);
        let ic = resolve(InitPolicy::CLeastSquares, &sp, &acc).unwrap();
        assert!((c_from_beta(ic.beta, &sp, &acc).unwrap() - ic.c).abs() < 1e-9 * ic.c.abs());

        let (sp2, acc2) = classic(&EX2_FIT);
        let ic = resolve(InitPolicy::CLeastSquares, &sp2, &acc2).unwrap();
        assert!(!ic.beta_in_unit_interval);
    }

    #[test]
    fn degenerate_denominator() {
        // a = 0 leaves b/a undefined
        let sp = StructuralParams {
            a: 0.0,
            b: 1.0,
            alpha: 0.0,
            lambda: 0.5,
        };
        let acc = AgoSeries::new(vec![1.0, 2.0, 3.0]).unwrap();
        assert!(c_from_beta(0.5, &sp, &acc).is_err());
        // e₁ = eₙ when n = 1 and β weighting collapses: β coefficient zero
        let sp = StructuralParams::new(0.2, 1.0, 0.0, 0.5).unwrap();
        let acc = AgoSeries::new(vec![4.0]).unwrap();
        assert!(matches!(
            beta_from_c(3.0, &sp, &acc),
            Err(Error::DegenerateInitialCondition(_))
        ));
    }
}
