//! Pointwise residuals of the fundamental equations and curvature
//! identities, and grid sweeps that summarize them as [`ResidualReport`]s.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::codazzi::{
    codazzi_residual_at, metric_change_at, operator_s, simons_residuals_at, CodazziField,
    MetricChange, SimonsResiduals,
};
use crate::error::{Error, Result};
use crate::geometry::{evaluate_chart, laplace_beltrami, GeomPoint, SurfaceSpec, CONDITIONING_TOL, MINIMAL_TOL};
use crate::jets::{Jet2, Var};
use crate::linalg::{g_norm, self_adjoint_defect, Mat2};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum IdentityId {
    CodazziS,
    CodazziSTilde,
    SimonsEq4,
    SimonsEq5,
    SimonsEq6,
    MetricChange,
    InverseCodazzi,
    AmbientCodazzi,
    GaussEquation,
    CurvatureFormula,
    TLaplacian,
    Pmc,
    TGradient,
    TAlpha,
    MuIdentity,
    Traceless,
}

impl IdentityId {
    pub const ALL: [IdentityId; 16] = [
        IdentityId::CodazziS,
        IdentityId::CodazziSTilde,
        IdentityId::SimonsEq4,
        IdentityId::SimonsEq5,
        IdentityId::SimonsEq6,
        IdentityId::MetricChange,
        IdentityId::InverseCodazzi,
        IdentityId::AmbientCodazzi,
        IdentityId::GaussEquation,
        IdentityId::CurvatureFormula,
        IdentityId::TLaplacian,
        IdentityId::Pmc,
        IdentityId::TGradient,
        IdentityId::TAlpha,
        IdentityId::MuIdentity,
        IdentityId::Traceless,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            IdentityId::CodazziS => "codazzi_s",
            IdentityId::CodazziSTilde => "codazzi_s_tilde",
            IdentityId::SimonsEq4 => "simons_eq4",
            IdentityId::SimonsEq5 => "simons_eq5",
            IdentityId::SimonsEq6 => "simons_eq6",
            IdentityId::MetricChange => "metric_change",
            IdentityId::InverseCodazzi => "inverse_codazzi",
            IdentityId::AmbientCodazzi => "ambient_codazzi",
            IdentityId::GaussEquation => "gauss_equation",
            IdentityId::CurvatureFormula => "curvature_formula",
            IdentityId::TLaplacian => "t_laplacian",
            IdentityId::Pmc => "pmc",
            IdentityId::TGradient => "t_gradient",
            IdentityId::TAlpha => "t_alpha",
            IdentityId::MuIdentity => "mu_identity",
            IdentityId::Traceless => "traceless",
        }
    }

    pub fn default_tolerance(self) -> f64 {
        match self {
            IdentityId::CodazziS | IdentityId::CodazziSTilde => 1e-9,
            IdentityId::SimonsEq4 | IdentityId::SimonsEq5 | IdentityId::SimonsEq6 => 1e-7,
            IdentityId::MetricChange => 1e-8,
            IdentityId::InverseCodazzi => 1e-9,
            IdentityId::AmbientCodazzi => 1e-8,
            IdentityId::GaussEquation => 1e-8,
            IdentityId::CurvatureFormula => 1e-9,
            IdentityId::TLaplacian => 1e-9,
            IdentityId::Pmc => 1e-8,
            IdentityId::TGradient | IdentityId::TAlpha => 1e-9,
            IdentityId::MuIdentity => 1e-9,
            IdentityId::Traceless => 1e-10,
        }
    }
}

impl fmt::Display for IdentityId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for IdentityId {
    type Err = Error;
    fn from_str(s: &str) -> Result<IdentityId> {
        IdentityId::ALL
            .into_iter()
            .find(|id| id.as_str() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown identity `{s}`")))
    }
}

/// Sampling grid over a chart domain, shrunk by a relative margin.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Grid {
    pub nu: usize,
    pub nv: usize,
    pub margin: f64,
}

impl Default for Grid {
    fn default() -> Grid {
        Grid {
            nu: 33,
            nv: 33,
            margin: 0.02,
        }
    }
}

impl Grid {
    pub fn new(nu: usize, nv: usize, margin: f64) -> Result<Grid> {
        if nu < 5 || nv < 5 {
            return Err(Error::InvalidArgument(format!(
                "grid must be at least 5x5, got {nu}x{nv}"
            )));
        }
        if !(0.0..0.5).contains(&margin) {
            return Err(Error::InvalidArgument(format!(
                "margin must lie in [0, 0.5), got {margin}"
            )));
        }
        Ok(Grid { nu, nv, margin })
    }

    fn axis(a: f64, b: f64, n: usize, m: f64) -> impl Iterator<Item = f64> {
        (0..n).map(move |i| a + (b - a) * (m + (1.0 - 2.0 * m) * i as f64 / (n - 1) as f64))
    }

    /// Sample points, `u` outer and `v` inner.
    pub fn points(&self, s: &SurfaceSpec) -> Vec<(f64, f64)> {
        let d = s.domain;
        let vs: Vec<f64> = Grid::axis(d.v0, d.v1, self.nv, self.margin).collect();
        Grid::axis(d.u0, d.u1, self.nu, self.margin)
            .flat_map(|u| vs.iter().map(move |v| (u, *v)))
            .collect()
    }
}

/// Evaluates the chart at every grid point, in grid order.
pub fn sample(s: &SurfaceSpec, grid: &Grid) -> Result<Vec<GeomPoint>> {
    grid.points(s)
        .par_iter()
        .map(|(u, v)| evaluate_chart(s, *u, *v))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResidualReport {
    pub identity_id: IdentityId,
    pub grid: (usize, usize),
    pub max_abs: f64,
    pub mean_abs: f64,
    pub argmax: (f64, f64),
    pub tolerance: f64,
    pub passed: bool,
    pub warnings: Vec<String>,
}

/// Outcome of a pointwise evaluator.
pub enum Sample {
    Value(f64),
    Skipped(&'static str),
}

/// Summarizes a pointwise evaluator over sampled points.
pub fn summarize(
    id: IdentityId,
    grid: &Grid,
    points: &[GeomPoint],
    tolerance: f64,
    f: impl Fn(&GeomPoint) -> Result<Sample> + Sync,
) -> Result<ResidualReport> {
    let samples: Vec<Sample> = points.par_iter().map(&f).collect::<Result<_>>()?;
    Ok(summarize_samples(id, grid, points, tolerance, &samples))
}

/// Ordered reduction of per-point samples, so the report does not depend on
/// thread scheduling.
pub fn summarize_samples(
    id: IdentityId,
    grid: &Grid,
    points: &[GeomPoint],
    tolerance: f64,
    samples: &[Sample],
) -> ResidualReport {
    let mut max_abs = 0.0;
    let mut argmax = points.first().map(|p| (p.u, p.v)).unwrap_or((0.0, 0.0));
    let mut sum = 0.0;
    let mut count = 0usize;
    let mut skipped: Vec<(&'static str, usize)> = Vec::new();
    for (p, s) in points.iter().zip(samples) {
        match s {
            Sample::Value(x) => {
                let x = x.abs();
                if x > max_abs || x.is_nan() {
                    max_abs = x;
                    argmax = (p.u, p.v);
                }
                sum += x;
                count += 1;
            }
            Sample::Skipped(why) => match skipped.iter_mut().find(|(w, _)| w == why) {
                Some((_, n)) => *n += 1,
                None => skipped.push((why, 1)),
            },
        }
    }
    let warnings = skipped
        .into_iter()
        .map(|(why, n)| format!("skipped at {n} of {} points: {why}", points.len()))
        .collect();
    ResidualReport {
        identity_id: id,
        grid: (grid.nu, grid.nv),
        max_abs,
        mean_abs: if count > 0 { sum / count as f64 } else { 0.0 },
        argmax,
        tolerance,
        passed: max_abs <= tolerance,
        warnings,
    }
}

/// `(∇_{∂y} A)(∂x, ξ)` in chart components, for a normal field `xi` given
/// as jets near the point.
fn shape_derivative(gp: &GeomPoint, xi: &[Jet2], x: usize, y: usize) -> [f64; 2] {
    let a = gp.shape_matrix(xi);
    let dir = Var::from_index(y);
    let dxi = gp.normal_derivative(xi, dir);
    let dxi_jets: Vec<Jet2> = dxi.iter().map(|w| Jet2::constant(*w, 0)).collect();
    let a_dxi = gp.shape_matrix(&dxi_jets).values();
    let gamma = |c: usize, i: usize, j: usize| gp.gamma[c].at(i, j).value();
    std::array::from_fn(|c| {
        let mut r = a.at(c, x).first(dir) - a_dxi.at(c, x);
        for d in 0..2 {
            r += gamma(c, y, d) * a.at(d, x).value() - a.at(c, d).value() * gamma(d, y, x);
        }
        r
    })
}

/// g-norm of `(∇_Y A)(X,ξ) − (∇_X A)(Y,ξ) + κ⟨ξ,η⟩(X∧Y)T` with `X = ∂u`,
/// `Y = ∂v`, `(X∧Y)T = ⟨Y,T⟩X − ⟨X,T⟩Y`.
///
/// `xi` is extended off the point by projecting the constant flat vector to
/// the normal space, so `∇^⊥ξ` is generally nonzero and enters the result.
pub fn ambient_codazzi_at(gp: &GeomPoint, xi: &[f64]) -> Result<f64> {
    gp.check_normal(xi)?;
    let field = gp.extend_normal(xi);
    let lhs_y = shape_derivative(gp, &field, 0, 1);
    let lhs_x = shape_derivative(gp, &field, 1, 0);
    let c = gp.kappa() * gp.ambient.inner(xi, &gp.eta_value());
    let t = gp.t_lower_value();
    let wedge = [t[1], -t[0]];
    let r = [
        lhs_y[0] - lhs_x[0] + c * wedge[0],
        lhs_y[1] - lhs_x[1] + c * wedge[1],
    ];
    Ok(g_norm(&gp.metric(), r))
}

pub fn ambient_codazzi_residual(s: &SurfaceSpec, u: f64, v: f64, xi: &[f64]) -> Result<f64> {
    ambient_codazzi_at(&evaluate_chart(s, u, v)?, xi)
}

/// Largest ambient-Codazzi residual over the normal frame at the point.
pub fn ambient_codazzi_frame_at(gp: &GeomPoint) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for xi in &gp.xi {
        worst = worst.max(ambient_codazzi_at(gp, xi)?);
    }
    Ok(worst)
}

/// Intrinsic `R(∂u,∂v)∂v` from the Christoffel symbols.
pub fn intrinsic_curvature_vector(gp: &GeomPoint) -> [f64; 2] {
    let gm = &gp.gamma;
    std::array::from_fn(|a| {
        let mut r = gm[a].at(1, 1).du() - gm[a].at(0, 1).dv();
        for b in 0..2 {
            r += gm[b].at(1, 1).value() * gm[a].at(0, b).value()
                - gm[b].at(0, 1).value() * gm[a].at(1, b).value();
        }
        r
    })
}

/// g-norm of `R(X,Y)W − κ[(X∧Y)W − ⟨Y,T⟩(X∧T)W + ⟨X,T⟩(Y∧T)W]
/// − A_{α(Y,W)}X + A_{α(X,W)}Y` with `X = ∂u`, `Y = W = ∂v`.
pub fn gauss_equation_at(gp: &GeomPoint) -> f64 {
    let g = gp.metric();
    let t = gp.t_value();
    let tl = gp.t_lower_value();
    let (x, y) = ([1.0, 0.0], [0.0, 1.0]);
    let w = y;
    let ip = |a: [f64; 2], b: [f64; 2]| g.form(a, b);
    // (A ∧ B)C = ⟨B,C⟩A − ⟨A,C⟩B
    let wedge = |a: [f64; 2], b: [f64; 2], c: [f64; 2]| -> [f64; 2] {
        let (bc, ac) = (ip(b, c), ip(a, c));
        [bc * a[0] - ac * b[0], bc * a[1] - ac * b[1]]
    };
    let xy = wedge(x, y, w);
    let xt = wedge(x, t, w);
    let yt = wedge(y, t, w);
    let (ty, tx) = (tl[1], tl[0]);
    let a_yw = gp.shape_matrix(&gp.alpha[1][1]).values().apply(x);
    let a_xw = gp.shape_matrix(&gp.alpha[0][1]).values().apply(y);
    let k = gp.kappa();
    let lhs = intrinsic_curvature_vector(gp);
    let r: [f64; 2] = std::array::from_fn(|a| {
        lhs[a] - k * (xy[a] - ty * xt[a] + tx * yt[a]) - a_yw[a] + a_xw[a]
    });
    g_norm(&g, r)
}

pub fn gauss_equation_residual(s: &SurfaceSpec, u: f64, v: f64) -> Result<f64> {
    Ok(gauss_equation_at(&evaluate_chart(s, u, v)?))
}

/// The individual terms of the curvature formula for `K` at one point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CurvatureTerms {
    pub k_intrinsic: f64,
    /// `κ(1 − |T|²)`
    pub ambient: f64,
    /// `|H|²`
    pub h_sq: f64,
    /// `|S|²/(8|H|²)`
    pub s_sq_term: f64,
    /// `κ²|T|⁴/(16|H|²)`
    pub t4_term: f64,
    /// `κ⟨ST,T⟩/(4|H|²)`
    pub st_term: f64,
    /// `Σ_{i>1} det A_i`
    pub aux_det: f64,
    /// `|S|²`
    pub s_sq: f64,
    /// `⟨ST,T⟩`
    pub st_t: f64,
    pub residual: f64,
}

pub fn curvature_terms_at(gp: &GeomPoint) -> Result<CurvatureTerms> {
    let kappa = gp.kappa();
    let s = operator_s(gp, kappa)?;
    let h2 = gp.norm_h * gp.norm_h;
    let t2 = gp.t_norm_sq().value();
    let t = gp.t_value();
    let s_sq = s.matmul(&s).trace();
    let st_t = gp.metric().form(s.apply(t), t);
    let ambient = kappa * (1.0 - t2);
    let s_sq_term = s_sq / (8.0 * h2);
    let t4_term = kappa * kappa * t2 * t2 / (16.0 * h2);
    let st_term = kappa * st_t / (4.0 * h2);
    let aux_det = gp.sum_aux_det();
    let k_intrinsic = gp.k.value();
    let rhs = ambient + h2 - s_sq_term - t4_term - st_term + aux_det;
    Ok(CurvatureTerms {
        k_intrinsic,
        ambient,
        h_sq: h2,
        s_sq_term,
        t4_term,
        st_term,
        aux_det,
        s_sq,
        st_t,
        residual: (k_intrinsic - rhs).abs(),
    })
}

pub fn curvature_formula_residual(s: &SurfaceSpec, u: f64, v: f64) -> Result<f64> {
    Ok(curvature_terms_at(&evaluate_chart(s, u, v)?)?.residual)
}

/// The pieces of `½Δ|T|²` at one point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TLaplacianTerms {
    /// `½Δ|T|²`
    pub lhs: f64,
    /// `|A_η|²`
    pub a_eta_sq: f64,
    /// `κ|T|²(1 − |T|²)`
    pub ambient: f64,
    /// `Σ_i |A_i T|²` over the whole normal frame.
    pub frame_sum: f64,
    /// `2⟨∇^⊥_T H, η⟩`, zero on surfaces with parallel mean curvature.
    pub pmc_term: f64,
}

impl TLaplacianTerms {
    /// Residual of `½Δ|T|² = |A_η|² + κ|T|²(1 − |T|²) − Σ_i |A_i T|²`.
    pub fn residual(&self) -> f64 {
        (self.lhs - self.a_eta_sq - self.ambient + self.frame_sum).abs()
    }

    /// Same, including the `2⟨∇^⊥_T H, η⟩` term that holds without PMC.
    pub fn general_residual(&self) -> f64 {
        (self.lhs - self.a_eta_sq - self.ambient + self.frame_sum - self.pmc_term).abs()
    }
}

pub fn t_laplacian_terms_at(gp: &GeomPoint) -> Result<TLaplacianTerms> {
    let t2 = gp.t_norm_sq();
    let lhs = 0.5 * laplace_beltrami(&t2, &gp.g)?;
    let a_eta = gp.a_eta().values();
    let g = gp.metric();
    let t = gp.t_value();
    let frame_sum: f64 = gp
        .shape
        .iter()
        .map(|a| {
            let at = a.apply(t);
            g.form(at, at)
        })
        .sum();
    let dh: Vec<Vec<f64>> = Var::BOTH
        .iter()
        .map(|d| gp.normal_derivative(&gp.h, *d))
        .collect();
    let dh_t: Vec<f64> = (0..gp.ambient.flat_dim)
        .map(|k| t[0] * dh[0][k] + t[1] * dh[1][k])
        .collect();
    let t2 = t2.value();
    Ok(TLaplacianTerms {
        lhs,
        a_eta_sq: a_eta.matmul(&a_eta).trace(),
        ambient: gp.kappa() * t2 * (1.0 - t2),
        frame_sum,
        pmc_term: 2.0 * gp.ambient.inner(&dh_t, &gp.eta_value()),
    })
}

/// `|½Δ|T|² − |A_η|² − κ|T|²(1 − |T|²) + Σ_i |A_i T|²|`, the sum running
/// over the whole normal frame.
pub fn t_laplacian_at(gp: &GeomPoint) -> Result<f64> {
    Ok(t_laplacian_terms_at(gp)?.residual())
}

pub fn t_laplacian_residual(s: &SurfaceSpec, u: f64, v: f64) -> Result<f64> {
    t_laplacian_at(&evaluate_chart(s, u, v)?)
}

fn flat_norm(gp: &GeomPoint, w: &[f64]) -> f64 {
    gp.ambient.inner(w, w).abs().sqrt()
}

/// `max_a |∇^⊥_{∂a} H|`.
pub fn pmc_at(gp: &GeomPoint) -> f64 {
    Var::BOTH
        .iter()
        .map(|d| flat_norm(gp, &gp.normal_derivative(&gp.h, *d)))
        .fold(0.0, f64::max)
}

/// `max_a |∇_{∂a} T − A_η ∂a|` in the g-norm.
pub fn t_gradient_at(gp: &GeomPoint) -> f64 {
    let a_eta = gp.a_eta().values();
    let g = gp.metric();
    let mut worst: f64 = 0.0;
    for a in 0..2 {
        let dir = Var::from_index(a);
        let r: [f64; 2] = std::array::from_fn(|c| {
            let mut x = gp.t[c].first(dir);
            for d in 0..2 {
                x += gp.gamma[c].at(a, d).value() * gp.t[d].value();
            }
            x - a_eta.at(c, a)
        });
        worst = worst.max(g_norm(&g, r));
    }
    worst
}

/// `max_a |α(∂a, T) + ∇^⊥_{∂a} η|`.
pub fn t_alpha_at(gp: &GeomPoint) -> f64 {
    let t = gp.t_value();
    let mut worst: f64 = 0.0;
    for a in 0..2 {
        let d_eta = gp.normal_derivative(&gp.eta, Var::from_index(a));
        let r: Vec<f64> = (0..gp.ambient.flat_dim)
            .map(|k| t[0] * gp.alpha[a][0][k].value() + t[1] * gp.alpha[a][1][k].value() + d_eta[k])
            .collect();
        worst = worst.max(flat_norm(gp, &r));
    }
    worst
}

/// `|α|² − |A_H|²/|H|² + 2 Σ_{i>1} det A_i`.
pub fn mu_identity_at(gp: &GeomPoint) -> Result<f64> {
    Ok(gp.mu_integrand()? + 2.0 * gp.sum_aux_det())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MuEstimate {
    /// Grid supremum of `|α|² − |A_H|²/|H|²`.
    pub mu: f64,
    /// `|μ + 2 min Σ_{i>1} det A_i|` over the same grid.
    pub cross_check: f64,
    pub argmax: (f64, f64),
}

pub fn mu_from_points(points: &[GeomPoint]) -> Result<MuEstimate> {
    let mut mu = f64::NEG_INFINITY;
    let mut argmax = (0.0, 0.0);
    let mut min_det = f64::INFINITY;
    for gp in points {
        let x = gp.mu_integrand()?;
        if x > mu {
            mu = x;
            argmax = (gp.u, gp.v);
        }
        min_det = min_det.min(gp.sum_aux_det());
    }
    if points.is_empty() {
        return Err(Error::InvalidArgument("empty grid".into()));
    }
    Ok(MuEstimate {
        mu,
        cross_check: (mu + 2.0 * min_det).abs(),
        argmax,
    })
}

pub fn mu_estimate(s: &SurfaceSpec, grid: &Grid) -> Result<MuEstimate> {
    mu_from_points(&sample(s, grid)?)
}

/// `|trace| + self-adjointness defect` of a Codazzi field.
pub fn traceless_at(gp: &GeomPoint, field: CodazziField) -> Result<f64> {
    let m = field.matrix_at(gp)?;
    Ok(m.trace().abs() + self_adjoint_defect(&gp.metric(), &m))
}

pub fn pmc_residual(s: &SurfaceSpec, grid: &Grid) -> Result<ResidualReport> {
    let points = sample(s, grid)?;
    pmc_report(&points, grid, IdentityId::Pmc.default_tolerance())
}

fn pmc_report(points: &[GeomPoint], grid: &Grid, tol: f64) -> Result<ResidualReport> {
    let mut rep = summarize(IdentityId::Pmc, grid, points, tol, |gp| Ok(Sample::Value(pmc_at(gp))))?;
    let minimal = points.iter().filter(|gp| gp.is_minimal()).count();
    if minimal > 0 {
        rep.warnings
            .push(format!("{minimal} of {} points are minimal (H = 0)", points.len()));
    }
    Ok(rep)
}

/// Whether the surface is minimal over the sampled grid, and the smallest
/// and largest `|H|` seen.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MinimalityClass {
    pub minimal: bool,
    pub min_norm_h: f64,
    pub max_norm_h: f64,
}

pub fn minimality_class(points: &[GeomPoint]) -> MinimalityClass {
    let max_norm_h = points.iter().map(|p| p.norm_h).fold(0.0, f64::max);
    let min_norm_h = points.iter().map(|p| p.norm_h).fold(f64::INFINITY, f64::min);
    MinimalityClass {
        minimal: max_norm_h < MINIMAL_TOL,
        min_norm_h,
        max_norm_h,
    }
}

/// Per-identity tolerance overrides.
pub type Tolerances = std::collections::BTreeMap<IdentityId, f64>;

fn tol(t: &Tolerances, id: IdentityId) -> f64 {
    t.get(&id).copied().unwrap_or_else(|| id.default_tolerance())
}

fn skip_on_precondition(r: Result<f64>, why: &'static str) -> Result<Sample> {
    match r {
        Ok(x) => Ok(Sample::Value(x)),
        Err(e) if e.is_precondition() || matches!(e, Error::SingularOperator { .. }) => {
            Ok(Sample::Skipped(why))
        }
        Err(e) => Err(e),
    }
}

/// Runs every identity that applies to the surface's minimality class.
pub fn run_suite(s: &SurfaceSpec, grid: &Grid, tolerances: &Tolerances) -> Result<Vec<ResidualReport>> {
    let points = sample(s, grid)?;
    run_suite_on(&points, grid, tolerances)
}

pub fn run_suite_on(points: &[GeomPoint], grid: &Grid, tolerances: &Tolerances) -> Result<Vec<ResidualReport>> {
    let class = minimality_class(points);
    let field = if class.minimal {
        CodazziField::S_TILDE
    } else {
        CodazziField::S
    };
    let t = |id| tol(tolerances, id);
    let mut out = Vec::new();

    let codazzi_id = if class.minimal {
        IdentityId::CodazziSTilde
    } else {
        IdentityId::CodazziS
    };
    out.push(summarize(codazzi_id, grid, points, t(codazzi_id), |gp| {
        skip_on_precondition(codazzi_residual_at(gp, field), UNDEFINED)
    })?);
    out.push(summarize(IdentityId::Traceless, grid, points, t(IdentityId::Traceless), |gp| {
        skip_on_precondition(traceless_at(gp, field), UNDEFINED)
    })?);

    const UNDEFINED: &str = "operator undefined (minimal point)";
    let simons: Vec<Option<SimonsResiduals>> = points
        .par_iter()
        .map(|gp| match simons_residuals_at(gp, field) {
            Ok(r) => Ok(Some(r)),
            Err(e) if e.is_precondition() => Ok(None),
            Err(e) => Err(e),
        })
        .collect::<Result<_>>()?;
    let eq4: Vec<Sample> = simons
        .iter()
        .map(|r| match r {
            Some(r) => Sample::Value(r.eq4),
            None => Sample::Skipped(UNDEFINED),
        })
        .collect();
    out.push(summarize_samples(IdentityId::SimonsEq4, grid, points, t(IdentityId::SimonsEq4), &eq4));
    let floored = |id: IdentityId, pick: fn(&SimonsResiduals) -> Option<f64>| {
        let samples: Vec<Sample> = simons
            .iter()
            .map(|r| match r.as_ref().map(pick) {
                Some(Some(x)) => Sample::Value(x),
                Some(None) => Sample::Skipped("|S| below floor 1e-6"),
                None => Sample::Skipped(UNDEFINED),
            })
            .collect();
        summarize_samples(id, grid, points, t(id), &samples)
    };
    out.push(floored(IdentityId::SimonsEq5, |r| r.eq5));
    out.push(floored(IdentityId::SimonsEq6, |r| r.eq6));

    let changes: Vec<Option<MetricChange>> = points
        .par_iter()
        .map(|gp| match metric_change_at(gp, field) {
            Ok(r) => Ok(Some(r)),
            Err(e) if e.is_precondition() || matches!(e, Error::SingularOperator { .. }) => Ok(None),
            Err(e) => Err(e),
        })
        .collect::<Result<_>>()?;
    let changed = |id: IdentityId, pick: fn(&MetricChange) -> f64| {
        let samples: Vec<Sample> = changes
            .iter()
            .map(|m| match m {
                Some(m) => Sample::Value(pick(m)),
                None => Sample::Skipped("operator singular (|det| <= 1e-8)"),
            })
            .collect();
        summarize_samples(id, grid, points, t(id), &samples)
    };
    out.push(changed(IdentityId::MetricChange, |m| m.residual));
    out.push(changed(IdentityId::InverseCodazzi, |m| m.inverse_codazzi));

    out.push(summarize(IdentityId::AmbientCodazzi, grid, points, t(IdentityId::AmbientCodazzi), |gp| {
        ambient_codazzi_frame_at(gp).map(Sample::Value)
    })?);
    out.push(summarize(IdentityId::GaussEquation, grid, points, t(IdentityId::GaussEquation), |gp| {
        Ok(Sample::Value(gauss_equation_at(gp)))
    })?);
    if !class.minimal {
        out.push(summarize(IdentityId::CurvatureFormula, grid, points, t(IdentityId::CurvatureFormula), |gp| {
            skip_on_precondition(curvature_terms_at(gp).map(|c| c.residual), "minimal point")
        })?);
    }
    out.push(summarize(IdentityId::TLaplacian, grid, points, t(IdentityId::TLaplacian), |gp| {
        t_laplacian_at(gp).map(Sample::Value)
    })?);
    out.push(pmc_report(points, grid, t(IdentityId::Pmc))?);
    out.push(summarize(IdentityId::TGradient, grid, points, t(IdentityId::TGradient), |gp| {
        Ok(Sample::Value(t_gradient_at(gp)))
    })?);
    out.push(summarize(IdentityId::TAlpha, grid, points, t(IdentityId::TAlpha), |gp| {
        Ok(Sample::Value(t_alpha_at(gp)))
    })?);
    if !class.minimal {
        out.push(summarize(IdentityId::MuIdentity, grid, points, t(IdentityId::MuIdentity), |gp| {
            skip_on_precondition(mu_identity_at(gp), "minimal point")
        })?);
    }

    if class.min_norm_h >= MINIMAL_TOL && class.min_norm_h <= CONDITIONING_TOL
        || (!class.minimal && class.min_norm_h < MINIMAL_TOL)
    {
        let w = format!(
            "ill-conditioned mean curvature: min |H| = {:e} over the grid",
            class.min_norm_h
        );
        for r in &mut out {
            r.warnings.push(w.clone());
        }
    }
    Ok(out)
}

/// `Σ_{i>1} det A_i` after replacing the auxiliary frame by `rot · frame`,
/// where `rot` is an orthogonal matrix of matching size.
pub fn rotated_aux_det(gp: &GeomPoint, rot: &[Vec<f64>]) -> f64 {
    let start = usize::from(gp.h_frame);
    let aux = &gp.xi[start..];
    rot.iter()
        .map(|row| {
            let xi: Vec<f64> = (0..gp.ambient.flat_dim)
                .map(|k| row.iter().zip(aux).map(|(c, x)| c * x[k]).sum())
                .collect();
            let jets: Vec<Jet2> = xi.iter().map(|x| Jet2::constant(*x, 0)).collect();
            gp.shape_matrix(&jets).values().det()
        })
        .sum()
}

/// `Mat2` helper used by tests and reports: `A_η` values.
pub fn a_eta_value(gp: &GeomPoint) -> Mat2<f64> {
    gp.a_eta().values()
}
