//! Hypothesis evaluators and conclusion-consistency checks for the
//! rigidity theorems on sampled charts.
//!
//! The theorems are statements about complete surfaces; a chart can only
//! falsify them. A verdict is `consistent` when every hypothesis holds on the
//! sample and every conclusion checks out, `inapplicable` when some
//! hypothesis fails, and `counterexample-candidate` when the hypotheses hold
//! but a conclusion does not. On an exact catalog surface the last outcome
//! points at an implementation bug.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::codazzi::{codazzi_residual_at, operator_s_formula, CodazziField, CodazziKind};
use crate::error::{Error, Result};
use crate::geometry::{GeomPoint, SurfaceSpec};
use crate::identities::{minimality_class, mu_from_points, pmc_at, sample, Grid};

/// Slack for non-strict sign hypotheses and for conclusions.
pub const HYPOTHESIS_TOL: f64 = 1e-8;
pub const CONCLUSION_TOL: f64 = 1e-8;
/// Margin required for strict `> 0` hypotheses.
pub const STRICT_TOL: f64 = 1e-12;
/// Gates on the Codazzi property and on parallel mean curvature.
pub const CODAZZI_GATE: f64 = 1e-8;
pub const PMC_GATE: f64 = 1e-8;

const CHART_NOTE: &str = "consistency on sampled chart";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum TheoremId {
    #[serde(rename = "1.2")]
    T12,
    #[serde(rename = "1.3")]
    T13,
    #[serde(rename = "3.1")]
    T31,
    #[serde(rename = "cor")]
    Corollaries,
}

impl fmt::Display for TheoremId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TheoremId::T12 => "1.2",
            TheoremId::T13 => "1.3",
            TheoremId::T31 => "3.1",
            TheoremId::Corollaries => "cor",
        })
    }
}

impl FromStr for TheoremId {
    type Err = Error;
    fn from_str(s: &str) -> Result<TheoremId> {
        match s {
            "1.2" => Ok(TheoremId::T12),
            "1.3" => Ok(TheoremId::T13),
            "3.1" => Ok(TheoremId::T31),
            "cor" => Ok(TheoremId::Corollaries),
            _ => Err(Error::InvalidArgument(format!(
                "unknown theorem `{s}` (expected 1.2, 1.3, 3.1 or cor)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum VerdictStatus {
    Consistent,
    Inapplicable,
    CounterexampleCandidate,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Hypothesis {
    pub name: String,
    pub satisfied: bool,
    /// Signed distance from the boundary of the hypothesis; negative when
    /// violated.
    pub margin: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Conclusion {
    pub claim: String,
    pub residual: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TheoremVerdict {
    pub theorem_id: TheoremId,
    pub status: VerdictStatus,
    pub hypotheses: Vec<Hypothesis>,
    pub conclusion_checked: Vec<Conclusion>,
    pub applicable: bool,
    pub notes: Vec<String>,
}

impl TheoremVerdict {
    pub fn is_counterexample_candidate(&self) -> bool {
        self.status == VerdictStatus::CounterexampleCandidate
    }
}

fn le(name: impl Into<String>, margin: f64) -> Hypothesis {
    Hypothesis {
        name: name.into(),
        satisfied: margin >= -HYPOTHESIS_TOL,
        margin,
    }
}

fn strict(name: impl Into<String>, margin: f64) -> Hypothesis {
    Hypothesis {
        name: name.into(),
        satisfied: margin > STRICT_TOL,
        margin,
    }
}

fn conclusion(claim: impl Into<String>, residual: f64) -> Conclusion {
    Conclusion {
        claim: claim.into(),
        residual,
        passed: residual <= CONCLUSION_TOL,
    }
}

/// One group of hypotheses with the conclusions it implies.
struct Branch {
    hypotheses: Vec<Hypothesis>,
    conclusions: Vec<Conclusion>,
}

impl Branch {
    fn holds(&self) -> bool {
        self.hypotheses.iter().all(|h| h.satisfied)
    }
}

fn assemble(id: TheoremId, branches: Vec<Branch>, mut notes: Vec<String>) -> TheoremVerdict {
    notes.insert(0, CHART_NOTE.to_string());
    let mut hypotheses = Vec::new();
    let mut conclusion_checked = Vec::new();
    let mut applicable = false;
    for b in branches {
        let holds = b.holds();
        hypotheses.extend(b.hypotheses);
        if holds {
            applicable = true;
            conclusion_checked.extend(b.conclusions);
        }
    }
    let status = if !applicable {
        VerdictStatus::Inapplicable
    } else if conclusion_checked.iter().all(|c| c.passed) {
        VerdictStatus::Consistent
    } else {
        VerdictStatus::CounterexampleCandidate
    };
    TheoremVerdict {
        theorem_id: id,
        status,
        hypotheses,
        conclusion_checked,
        applicable,
        notes,
    }
}

fn range(xs: impl Iterator<Item = f64>) -> (f64, f64) {
    xs.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), x| {
        (lo.min(x), hi.max(x))
    })
}

fn max_abs(xs: impl Iterator<Item = f64>) -> f64 {
    xs.fold(0.0, |m, x| m.max(x.abs()))
}

/// Theorem 1.2 for a traceless Codazzi operator on a sampled chart.
pub fn check_theorem_1_2(
    s: &SurfaceSpec,
    field: CodazziField,
    grid: &Grid,
    eps: f64,
) -> Result<TheoremVerdict> {
    check_eps(eps)?;
    check_theorem_1_2_on(s, field, &sample(s, grid)?, eps)
}

/// Theorem 1.2 on points already sampled from `s`.
pub fn check_theorem_1_2_on(
    s: &SurfaceSpec,
    field: CodazziField,
    points: &[GeomPoint],
    eps: f64,
) -> Result<TheoremVerdict> {
    check_eps(eps)?;
    let ops = points
        .par_iter()
        .map(|gp| Ok((field.matrix_at(gp)?, codazzi_residual_at(gp, field)?)))
        .collect::<Result<Vec<_>>>()?;
    let gate = ops.iter().map(|(_, r)| *r).fold(0.0, f64::max);
    if gate > CODAZZI_GATE {
        return Err(Error::CodazziGate { residual: gate });
    }
    let trace = max_abs(ops.iter().map(|(m, _)| m.trace()));
    if trace > HYPOTHESIS_TOL {
        return Err(Error::NotTraceless { trace });
    }

    let ks: Vec<f64> = points.iter().map(|p| p.k.value()).collect();
    let dets: Vec<f64> = ops.iter().map(|(m, _)| m.det()).collect();
    let (k_min, k_max) = range(ks.iter().copied());
    let (det_lo, det_hi) = range(dets.iter().copied());
    let (mut abs_lo, abs_hi) = range(dets.iter().map(|d| d.abs()));
    let mut notes = vec![
        "the alternative 'Σ is a topological sphere' is not checked".to_string(),
    ];
    if field.kind == CodazziKind::STilde {
        if let Some(inf_t) = s.global.inf_norm_t {
            // |det S̃| = |T|⁴/4 on the complete surface
            let global = inf_t.powi(4) / 4.0;
            if global < abs_lo {
                abs_lo = global;
                notes.push(format!(
                    "inf |det S̃| over the complete surface is {global:e} (from inf |T|)"
                ));
            }
        }
    }
    let det_variation = det_hi - det_lo;
    let branch_a = Branch {
        hypotheses: vec![
            le("A: K >= 0", k_min),
            le("A: |det S| <= eps", eps - abs_hi),
        ],
        conclusions: vec![
            conclusion("A: det S constant", det_variation),
            conclusion(
                "A: K·det S ≡ 0",
                max_abs(ks.iter().zip(&dets).map(|(k, d)| k * d)),
            ),
        ],
    };
    let branch_b = Branch {
        hypotheses: vec![
            le("B: K <= 0", -k_max),
            le("B: |det S| >= eps", abs_lo - eps),
            strict("B: eps > 0", eps),
        ],
        conclusions: vec![
            conclusion("B: det S constant", det_variation),
            conclusion("B: K ≡ 0", max_abs(ks.iter().copied())),
        ],
    };
    Ok(assemble(TheoremId::T12, vec![branch_a, branch_b], notes))
}

fn check_eps(eps: f64) -> Result<()> {
    if eps.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument("eps must be finite".into()))
    }
}

fn check_c(c: f64) -> Result<()> {
    if (0.0..1.0).contains(&c) {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("c must lie in [0, 1), got {c}")))
    }
}

/// Shared preconditions of Theorems 1.3 and 3.1: non-minimal, PMC, `0 <= c < 1`.
fn pmc_gate(points: &[GeomPoint], eps: f64, c: f64) -> Result<()> {
    check_eps(eps)?;
    check_c(c)?;
    let class = minimality_class(points);
    if class.min_norm_h < crate::geometry::MINIMAL_TOL {
        return Err(Error::MinimalSurface {
            norm_h: class.min_norm_h,
        });
    }
    let gate = points.par_iter().map(pmc_at).reduce(|| 0.0, f64::max);
    if gate > PMC_GATE {
        return Err(Error::PmcGate { residual: gate });
    }
    Ok(())
}

/// Builds the hypotheses common to Theorems 1.3 and 3.1. `extra[i]` is the
/// term standing in for the auxiliary normal curvature at point `i`:
/// `−Σ_{i>1} det A_i` for 3.1, `½μ` for 1.3.
fn pmc_branches(points: &[GeomPoint], kappa: f64, eps: f64, c: f64, extra: &[f64], label: &str) -> Vec<Branch> {
    let ks: Vec<f64> = points.iter().map(|p| p.k.value()).collect();
    let h2: Vec<f64> = points.iter().map(|p| p.norm_h * p.norm_h).collect();
    let k_max = ks.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let k_zero = conclusion("K ≡ 0", max_abs(ks.iter().copied()));
    let k_le = le("K <= 0", -k_max);
    if kappa < 0.0 {
        // K − |H|² − κ + extra ≤ −ε
        let worst = (0..points.len())
            .map(|i| ks[i] - h2[i] - kappa + extra[i])
            .fold(f64::NEG_INFINITY, f64::max);
        vec![Branch {
            hypotheses: vec![
                k_le,
                le(format!("kappa<0: K - |H|^2 - kappa {label} <= -eps"), -eps - worst),
                strict("kappa<0: eps > 0", eps),
            ],
            conclusions: vec![k_zero],
        }]
    } else {
        // K + extra ≤ c|H|²  and  4(1−c)^{1/2}|H|² − κ > 0
        let first = (0..points.len())
            .map(|i| c * h2[i] - (ks[i] + extra[i]))
            .fold(f64::INFINITY, f64::min);
        let second = h2
            .iter()
            .map(|h| 4.0 * (1.0 - c).sqrt() * h - kappa)
            .fold(f64::INFINITY, f64::min);
        vec![Branch {
            hypotheses: vec![
                k_le,
                le(format!("kappa>0: K {label} <= c|H|^2"), first),
                strict("kappa>0: 4(1-c)^(1/2)|H|^2 - kappa > 0", second),
            ],
            conclusions: vec![k_zero],
        }]
    }
}

fn zero_curvature_verdict(id: TheoremId) -> TheoremVerdict {
    assemble(
        id,
        vec![Branch {
            hypotheses: vec![strict("kappa != 0", 0.0)],
            conclusions: vec![],
        }],
        vec!["the theorem is stated for kappa != 0".to_string()],
    )
}

/// Theorem 3.1 with the pointwise `Σ_{i>1} det A_i` term.
pub fn check_theorem_3_1(s: &SurfaceSpec, grid: &Grid, eps: f64, c: f64) -> Result<TheoremVerdict> {
    check_eps(eps)?;
    check_c(c)?;
    check_theorem_3_1_on(s, &sample(s, grid)?, eps, c)
}

pub fn check_theorem_3_1_on(s: &SurfaceSpec, points: &[GeomPoint], eps: f64, c: f64) -> Result<TheoremVerdict> {
    pmc_gate(points, eps, c)?;
    let kappa = s.ambient.kappa;
    if kappa == 0.0 {
        return Ok(zero_curvature_verdict(TheoremId::T31));
    }
    let extra: Vec<f64> = points.iter().map(|p| -p.sum_aux_det()).collect();
    let branches = pmc_branches(points, kappa, eps, c, &extra, "- sum_{i>1} det A_i");
    Ok(assemble(TheoremId::T31, branches, vec![]))
}

/// Theorem 1.3 with `μ` estimated as the grid supremum.
pub fn check_theorem_1_3(s: &SurfaceSpec, grid: &Grid, eps: f64, c: f64) -> Result<TheoremVerdict> {
    check_eps(eps)?;
    check_c(c)?;
    check_theorem_1_3_on(s, &sample(s, grid)?, eps, c)
}

pub fn check_theorem_1_3_on(s: &SurfaceSpec, points: &[GeomPoint], eps: f64, c: f64) -> Result<TheoremVerdict> {
    pmc_gate(points, eps, c)?;
    let kappa = s.ambient.kappa;
    if kappa == 0.0 {
        return Ok(zero_curvature_verdict(TheoremId::T13));
    }
    let mu = mu_from_points(points)?;
    let extra = vec![0.5 * mu.mu; points.len()];
    let branches = pmc_branches(points, kappa, eps, c, &extra, "+ mu/2");
    let notes = vec![format!(
        "mu = {:e} is a grid supremum (attained at ({}, {}))",
        mu.mu, mu.argmax.0, mu.argmax.1
    )];
    Ok(assemble(TheoremId::T13, branches, notes))
}

/// Corollaries for minimal surfaces: `K ≤ 0` and `|T| > ε` force `K ≡ 0`
/// and constant `|T|`; in `ℍ^n × ℝ`, `|T| > ε` alone forces a vertical
/// cylinder.
pub fn check_corollaries(s: &SurfaceSpec, grid: &Grid, eps: f64) -> Result<TheoremVerdict> {
    check_eps(eps)?;
    check_corollaries_on(s, &sample(s, grid)?, eps)
}

pub fn check_corollaries_on(s: &SurfaceSpec, points: &[GeomPoint], eps: f64) -> Result<TheoremVerdict> {
    check_eps(eps)?;
    let class = minimality_class(points);
    if !class.minimal {
        return Err(Error::NotMinimal {
            norm_h: class.max_norm_h,
        });
    }
    let kappa = s.ambient.kappa;
    let ks: Vec<f64> = points.iter().map(|p| p.k.value()).collect();
    let ts: Vec<f64> = points.iter().map(|p| p.norm_t()).collect();
    let (t_lo, t_hi) = range(ts.iter().copied());
    let k_max = ks.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut notes = Vec::new();
    let mut inf_t = t_lo;
    if let Some(g) = s.global.inf_norm_t {
        if g < inf_t {
            inf_t = g;
            notes.push(format!("inf |T| over the complete surface is {g:e}"));
        }
    }

    // |S̃|² = |T|⁴/2 and, from the operator formula with H = 0, |S|² = κ²|T|⁴/2
    let (tilde_res, s_res) = points
        .iter()
        .map(|gp| {
            let st = CodazziField::S_TILDE.matrix_at(gp).unwrap_or_else(|_| unreachable!());
            let sf = operator_s_formula(gp, kappa).values();
            let t4 = gp.t_norm_sq().value().powi(2);
            (
                (st.matmul(&st).trace() - 0.5 * t4).abs(),
                (sf.matmul(&sf).trace() - 0.5 * kappa * kappa * t4).abs(),
            )
        })
        .fold((0.0_f64, 0.0_f64), |(a, b), (x, y)| (a.max(x), b.max(y)));
    notes.push(format!(
        "max ||S̃|^2 - |T|^4/2| = {tilde_res:e}, max ||S|^2 - kappa^2|T|^4/2| = {s_res:e}"
    ));
    let identities = || {
        vec![
            conclusion("|S̃|^2 = |T|^4/2", tilde_res),
            conclusion("|S|^2 = kappa^2 |T|^4/2", s_res),
        ]
    };

    let mut flat = identities();
    flat.push(conclusion("K ≡ 0", max_abs(ks.iter().copied())));
    flat.push(conclusion("|T| constant", t_hi - t_lo));
    let mut branches = vec![Branch {
        hypotheses: vec![
            le("flat: K <= 0", -k_max),
            strict("flat: |T| > eps", inf_t - eps),
            strict("flat: eps > 0", eps),
        ],
        conclusions: flat,
    }];
    if kappa < 0.0 {
        let eta = points
            .iter()
            .map(|gp| {
                let e = gp.eta_value();
                gp.ambient.inner(&e, &e).abs().sqrt()
            })
            .fold(0.0, f64::max);
        let mut vertical = identities();
        vertical.push(conclusion("vertical: η ≡ 0", eta));
        branches.push(Branch {
            hypotheses: vec![
                strict("vertical: |T| > eps", inf_t - eps),
                strict("vertical: eps > 0", eps),
            ],
            conclusions: vertical,
        });
    } else if kappa > 0.0 {
        notes.push(
            "classification (vertical cylinder or the flat M^4 example) is not checked".to_string(),
        );
    }
    Ok(assemble(TheoremId::Corollaries, branches, notes))
}

/// The Codazzi field each checker uses for a surface: `S̃` on minimal
/// surfaces, `S` otherwise.
pub fn natural_field(points: &[GeomPoint]) -> CodazziField {
    if minimality_class(points).minimal {
        CodazziField::S_TILDE
    } else {
        CodazziField::S
    }
}

/// Runs a checker by id, choosing the natural Codazzi field for 1.2.
pub fn check(id: TheoremId, s: &SurfaceSpec, grid: &Grid, eps: f64, c: f64) -> Result<TheoremVerdict> {
    check_eps(eps)?;
    if id != TheoremId::T12 && id != TheoremId::Corollaries {
        check_c(c)?;
    }
    check_on(id, s, &sample(s, grid)?, eps, c)
}

pub fn check_on(id: TheoremId, s: &SurfaceSpec, points: &[GeomPoint], eps: f64, c: f64) -> Result<TheoremVerdict> {
    match id {
        TheoremId::T12 => check_theorem_1_2_on(s, natural_field(points), points, eps),
        TheoremId::T13 => check_theorem_1_3_on(s, points, eps, c),
        TheoremId::T31 => check_theorem_3_1_on(s, points, eps, c),
        TheoremId::Corollaries => check_corollaries_on(s, points, eps),
    }
}
