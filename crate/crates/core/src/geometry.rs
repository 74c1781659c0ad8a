//! Pointwise geometry of a surface immersed in `M^n(κ) × ℝ`.
//!
//! [`evaluate_chart`] expands the immersion to order 4 at a chart point and
//! derives every quantity the identity checks need as jets:
//!
//! * metric `g` (order 3), its inverse and Christoffel symbols (order 2),
//! * second fundamental form `α(∂_a, ∂_b)`: the Σ-normal part of the
//!   projected flat second derivative (order 2),
//! * mean curvature vector `H = ½ g^{ab} α_ab` (order 2),
//! * the splitting `∂/∂t = T + η` (order 3),
//! * intrinsic Gaussian curvature from the metric alone (order 1).
//!
//! Frame-dependent data (the orthonormal normal frame and the shape
//! operators `A_i`) are computed only at the point itself; anything that
//! needs derivatives goes through frame-free jets.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::jets::{Jet2, JetError, Var, MAX_ORDER};
use crate::linalg::{g_norm, Mat2};
use crate::spaceforms::AmbientModel;

/// Below this `|H|` the surface is treated as minimal.
pub const MINIMAL_TOL: f64 = 1e-8;
/// `|H|` between [`MINIMAL_TOL`] and this value triggers a conditioning warning.
pub const CONDITIONING_TOL: f64 = 1e-6;
/// Gram–Schmidt candidates shorter than this are discarded.
pub const FRAME_DISCARD_TOL: f64 = 1e-10;
/// Smallest admissible `det g`.
pub const METRIC_DET_TOL: f64 = 1e-12;
/// Tolerance for "is this vector normal to Σ".
pub const NORMALITY_TOL: f64 = 1e-10;

/// A closed-form immersion `(u, v) ↦ f(u, v)` into the flat model.
pub trait Immersion: Send + Sync + fmt::Debug {
    fn eval(&self, u: Jet2, v: Jet2) -> Vec<Jet2>;
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Domain {
    pub u0: f64,
    pub u1: f64,
    pub v0: f64,
    pub v1: f64,
}

impl Domain {
    pub fn new(u0: f64, u1: f64, v0: f64, v1: f64) -> Domain {
        Domain { u0, u1, v0, v1 }
    }

    pub fn contains(&self, u: f64, v: f64) -> bool {
        let eps = 1e-12 * (1.0 + self.u1.abs().max(self.v1.abs()));
        u >= self.u0 - eps && u <= self.u1 + eps && v >= self.v0 - eps && v <= self.v1 + eps
    }

    pub fn center(&self) -> (f64, f64) {
        (0.5 * (self.u0 + self.u1), 0.5 * (self.v0 + self.v1))
    }
}

/// Closed-form facts about the complete surface that a chart cannot reveal.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct GlobalFacts {
    /// Infimum of `|T|` over the complete surface, when known.
    pub inf_norm_t: Option<f64>,
}

#[derive(Clone)]
pub struct SurfaceSpec {
    pub catalog_id: String,
    pub params: BTreeMap<String, f64>,
    pub domain: Domain,
    pub ambient: AmbientModel,
    pub global: GlobalFacts,
    chart: Arc<dyn Immersion>,
}

impl fmt::Debug for SurfaceSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SurfaceSpec")
            .field("catalog_id", &self.catalog_id)
            .field("params", &self.params)
            .field("domain", &self.domain)
            .field("ambient", &self.ambient)
            .field("chart", &self.chart)
            .finish()
    }
}

impl SurfaceSpec {
    pub fn new(
        catalog_id: impl Into<String>,
        params: BTreeMap<String, f64>,
        domain: Domain,
        ambient: AmbientModel,
        chart: Arc<dyn Immersion>,
    ) -> SurfaceSpec {
        SurfaceSpec {
            catalog_id: catalog_id.into(),
            params,
            domain,
            ambient,
            global: GlobalFacts::default(),
            chart,
        }
    }

    pub fn with_global(mut self, global: GlobalFacts) -> SurfaceSpec {
        self.global = global;
        self
    }

    /// Flat coordinates of the chart at `(u, v)`, values only.
    pub fn point(&self, u: f64, v: f64) -> Vec<f64> {
        self.chart
            .eval(Jet2::constant(u, 0), Jet2::constant(v, 0))
            .iter()
            .map(Jet2::value)
            .collect()
    }

    /// The chart expanded to `order` at `(u, v)`.
    pub fn expand(&self, u: f64, v: f64, order: usize) -> Result<Vec<Jet2>> {
        let uj = Jet2::variable(Var::U, u, order)?;
        let vj = Jet2::variable(Var::V, v, order)?;
        let f = self.chart.eval(uj, vj);
        if f.len() != self.ambient.flat_dim {
            return Err(Error::ChartDimension {
                expected: self.ambient.flat_dim,
                got: f.len(),
            });
        }
        Ok(f)
    }
}

/// Everything known about the surface at one chart point.
#[derive(Debug, Clone)]
pub struct GeomPoint {
    pub u: f64,
    pub v: f64,
    pub ambient: AmbientModel,
    /// Flat coordinates, order 4.
    pub f: Vec<Jet2>,
    /// Coordinate tangent vectors `∂_u f`, `∂_v f`, order 3.
    pub df: [Vec<Jet2>; 2],
    /// First fundamental form, order 3.
    pub g: Mat2<Jet2>,
    pub ginv: Mat2<Jet2>,
    /// `gamma[k].at(i, j)` is `Γ^k_{ij}`, order 2.
    pub gamma: [Mat2<Jet2>; 2],
    /// `alpha[a][b]` is `α(∂_a, ∂_b)` as a flat vector, order 2.
    pub alpha: [[Vec<Jet2>; 2]; 2],
    /// Mean curvature vector, order 2.
    pub h: Vec<Jet2>,
    pub norm_h: f64,
    /// `T_a = ⟨∂/∂t, ∂_a⟩`, order 3.
    pub t_lower: [Jet2; 2],
    /// Chart components `T^a`, order 3.
    pub t: [Jet2; 2],
    /// Normal part of `∂/∂t`, order 3.
    pub eta: Vec<Jet2>,
    /// Orthonormal normal frame; `xi[0] = H/|H|` when `h_frame`.
    pub xi: Vec<Vec<f64>>,
    pub h_frame: bool,
    /// Shape operators `A_i = A_{ξ_i}` in the chart basis.
    pub shape: Vec<Mat2<f64>>,
    /// Intrinsic Gaussian curvature from the metric, order 1.
    pub k: Jet2,
}

fn values(w: &[Jet2]) -> Vec<f64> {
    w.iter().map(Jet2::value).collect()
}

fn christoffel_from(g: &Mat2<Jet2>, ginv: &Mat2<Jet2>) -> [Mat2<Jet2>; 2] {
    // dg[c] = ∂_c g
    let dg = [g.map(|x| x.d(Var::U)), g.map(|x| x.d(Var::V))];
    // Γ_{ij,l} = ½(∂_i g_jl + ∂_j g_il − ∂_l g_ij)
    let lower = |i: usize, j: usize, l: usize| -> Jet2 {
        (dg[i].at(j, l) + dg[j].at(i, l) - dg[l].at(i, j)) * 0.5
    };
    let mut out = [Mat2::<Jet2>::zeros(), Mat2::<Jet2>::zeros()];
    for (k, gk) in out.iter_mut().enumerate() {
        *gk = Mat2::from_fn(|i, j| {
            ginv.at(k, 0) * lower(i, j, 0) + ginv.at(k, 1) * lower(i, j, 1)
        });
    }
    out
}

/// Christoffel symbols `Γ^k_{ij}` of a metric given as jets of order ≥ 1.
pub fn christoffel(g: &Mat2<Jet2>) -> Result<[Mat2<Jet2>; 2]> {
    let order = g.0.iter().flatten().map(Jet2::order).min().unwrap_or(0);
    if order < 1 {
        return Err(JetError::InsufficientOrder {
            needed: 1,
            got: order,
        }
        .into());
    }
    let ginv = inverse_metric(g)?;
    Ok(christoffel_from(g, &ginv))
}

pub fn inverse_metric(g: &Mat2<Jet2>) -> Result<Mat2<Jet2>> {
    let det = g.det();
    if det.value() <= METRIC_DET_TOL {
        return Err(Error::DegenerateMetric { det: det.value() });
    }
    let r = det.recip()?;
    Ok(g.adjugate().scale(r))
}

/// Intrinsic Gaussian curvature of `g` via the Brioschi formula.
///
/// Uses only the metric coefficients and their first and second
/// derivatives; the result has order two less than the input.
pub fn gauss_curvature_brioschi(g: &Mat2<Jet2>) -> Result<Jet2> {
    let order = g.0.iter().flatten().map(Jet2::order).min().unwrap_or(0);
    if order < 2 {
        return Err(JetError::InsufficientOrder {
            needed: 2,
            got: order,
        }
        .into());
    }
    let (e, f, gg) = (g.at(0, 0), g.at(0, 1), g.at(1, 1));
    let det = e * gg - f * f;
    if det.value() <= METRIC_DET_TOL {
        return Err(Error::DegenerateMetric { det: det.value() });
    }
    let (eu, ev) = (e.d(Var::U), e.d(Var::V));
    let (fu, fv) = (f.d(Var::U), f.d(Var::V));
    let (gu, gv) = (gg.d(Var::U), gg.d(Var::V));
    let evv = ev.d(Var::V);
    let fuv = fu.d(Var::V);
    let guu = gu.d(Var::U);

    let det3 = |m: [[Jet2; 3]; 3]| -> Jet2 {
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    };
    let m1 = [
        [evv * -0.5 + fuv - guu * 0.5, eu * 0.5, fu - ev * 0.5],
        [fv - gu * 0.5, e, f],
        [gv * 0.5, f, gg],
    ];
    let m2 = [
        [Jet2::zero(order - 2), ev * 0.5, gu * 0.5],
        [ev * 0.5, e, f],
        [gu * 0.5, f, gg],
    ];
    let num = det3(m1) - det3(m2);
    Ok(num.checked_div(&(det * det))?)
}

/// `Δφ = g^{ab}(∂_a∂_b φ − Γ^k_{ab} ∂_k φ)` at the expansion point.
pub fn laplace_beltrami(phi: &Jet2, g: &Mat2<Jet2>) -> Result<f64> {
    if phi.order() < 2 {
        return Err(JetError::InsufficientOrder {
            needed: 2,
            got: phi.order(),
        }
        .into());
    }
    let gamma = christoffel(g)?;
    let ginv = inverse_metric(g)?.values();
    let grad = [phi.du(), phi.dv()];
    let mut acc = 0.0;
    for a in 0..2 {
        for b in 0..2 {
            let mut hess = phi.second(Var::from_index(a), Var::from_index(b));
            for (k, gk) in grad.iter().enumerate() {
                hess -= gamma[k].at(a, b).value() * gk;
            }
            acc += ginv.at(a, b) * hess;
        }
    }
    Ok(acc)
}

/// `|∇φ|² = g^{ab} ∂_a φ ∂_b φ`.
pub fn grad_norm_sq(phi: &Jet2, g: &Mat2<Jet2>) -> Result<f64> {
    if phi.order() < 1 {
        return Err(JetError::InsufficientOrder {
            needed: 1,
            got: phi.order(),
        }
        .into());
    }
    let ginv = inverse_metric(g)?.values();
    let grad = [phi.du(), phi.dv()];
    Ok(ginv.form(grad, grad))
}

/// Expands the surface at `(u, v)` and computes all pointwise geometry.
pub fn evaluate_chart(s: &SurfaceSpec, u: f64, v: f64) -> Result<GeomPoint> {
    if !s.domain.contains(u, v) {
        return Err(Error::OutsideDomain { u, v });
    }
    let model = &s.ambient;
    let f = s.expand(u, v, MAX_ORDER)?;
    model.check_point(&values(&f))?;

    let df = [
        f.iter().map(|x| x.d(Var::U)).collect::<Vec<_>>(),
        f.iter().map(|x| x.d(Var::V)).collect::<Vec<_>>(),
    ];
    let g = Mat2::from_fn(|a, b| model.inner(&df[a], &df[b]));
    let ginv = inverse_metric(&g)?;
    let gamma = christoffel_from(&g, &ginv);

    let mut gp = GeomPoint {
        u,
        v,
        ambient: model.clone(),
        f,
        df,
        g,
        ginv,
        gamma,
        alpha: Default::default(),
        h: Vec::new(),
        norm_h: 0.0,
        t_lower: [Jet2::zero(0); 2],
        t: [Jet2::zero(0); 2],
        eta: Vec::new(),
        xi: Vec::new(),
        h_frame: false,
        shape: Vec::new(),
        k: Jet2::zero(0),
    };

    for a in 0..2 {
        for b in 0..2 {
            let fab: Vec<Jet2> = gp.df[a].iter().map(|x| x.d(Var::from_index(b))).collect();
            gp.alpha[a][b] = gp.ambient_normal_part(&fab);
        }
    }
    let n = model.flat_dim;
    gp.h = (0..n)
        .map(|k| {
            let mut acc = Jet2::scalar(0.0);
            for a in 0..2 {
                for b in 0..2 {
                    acc += gp.ginv.at(a, b) * gp.alpha[a][b][k];
                }
            }
            acc * 0.5
        })
        .collect();
    gp.norm_h = model.inner(&values(&gp.h), &values(&gp.h)).max(0.0).sqrt();

    let ti = model.t_index;
    gp.t_lower = [gp.df[0][ti], gp.df[1][ti]];
    gp.t = [
        gp.ginv.at(0, 0) * gp.t_lower[0] + gp.ginv.at(0, 1) * gp.t_lower[1],
        gp.ginv.at(1, 0) * gp.t_lower[0] + gp.ginv.at(1, 1) * gp.t_lower[1],
    ];
    gp.eta = (0..n)
        .map(|k| {
            let base = if k == ti { 1.0 } else { 0.0 };
            -(gp.t[0] * gp.df[0][k] + gp.t[1] * gp.df[1][k]) + base
        })
        .collect();

    gp.k = gauss_curvature_brioschi(&gp.g)?;
    gp.build_frame();
    Ok(gp)
}

impl GeomPoint {
    pub fn metric(&self) -> Mat2<f64> {
        self.g.values()
    }

    pub fn inverse_metric(&self) -> Mat2<f64> {
        self.ginv.values()
    }

    pub fn kappa(&self) -> f64 {
        self.ambient.kappa
    }

    pub fn position(&self) -> Vec<f64> {
        values(&self.f)
    }

    pub fn tangent(&self, a: usize) -> Vec<f64> {
        values(&self.df[a])
    }

    pub fn is_minimal(&self) -> bool {
        self.norm_h < MINIMAL_TOL
    }

    pub fn h_value(&self) -> Vec<f64> {
        values(&self.h)
    }

    pub fn eta_value(&self) -> Vec<f64> {
        values(&self.eta)
    }

    pub fn t_value(&self) -> [f64; 2] {
        [self.t[0].value(), self.t[1].value()]
    }

    pub fn t_lower_value(&self) -> [f64; 2] {
        [self.t_lower[0].value(), self.t_lower[1].value()]
    }

    /// `|T|²` as a jet (order 3).
    pub fn t_norm_sq(&self) -> Jet2 {
        self.t[0] * self.t_lower[0] + self.t[1] * self.t_lower[1]
    }

    pub fn norm_t(&self) -> f64 {
        self.t_norm_sq().value().max(0.0).sqrt()
    }

    /// `|H|²` as a jet (order 2).
    pub fn h_norm_sq(&self) -> Jet2 {
        self.ambient.inner(&self.h, &self.h)
    }

    /// Chart components `g^{ab}⟨w, ∂_b⟩` of the Σ-tangent part of `w`.
    pub fn tangential_components(&self, w: &[Jet2]) -> [Jet2; 2] {
        let c = [
            self.ambient.inner(w, &self.df[0]),
            self.ambient.inner(w, &self.df[1]),
        ];
        self.ginv.apply(c)
    }

    /// Removes the Σ-tangent part of `w`.
    pub fn normal_part(&self, w: &[Jet2]) -> Vec<Jet2> {
        let t = self.tangential_components(w);
        w.iter()
            .enumerate()
            .map(|(k, wk)| *wk - (t[0] * self.df[0][k] + t[1] * self.df[1][k]))
            .collect()
    }

    /// Projects a flat vector onto the normal space of Σ inside `T(M × ℝ)`.
    pub fn ambient_normal_part(&self, w: &[Jet2]) -> Vec<Jet2> {
        let projected = self.ambient.project(&self.f, w);
        self.normal_part(&projected)
    }

    fn ambient_normal_part_value(&self, w: &[f64]) -> Vec<f64> {
        let jets: Vec<Jet2> = w.iter().map(|x| Jet2::constant(*x, 0)).collect();
        values(&self.ambient_normal_part(&jets))
    }

    /// Coordinate-wise distance of `w` from the normal space of Σ.
    pub fn normality_defect(&self, w: &[f64]) -> f64 {
        let n = self.ambient_normal_part_value(w);
        w.iter()
            .zip(&n)
            .map(|(a, b)| (a - b).powi(2))
            .sum::<f64>()
            .sqrt()
    }

    pub fn check_normal(&self, w: &[f64]) -> Result<()> {
        let scale = 1.0 + w.iter().map(|x| x.abs()).fold(0.0, f64::max);
        let defect = self.normality_defect(w);
        if defect > NORMALITY_TOL * scale {
            Err(Error::NotNormal { defect })
        } else {
            Ok(())
        }
    }

    /// Extends the normal vector `xi` at this point to a smooth normal field
    /// near it, by projecting the constant flat vector onto the normal space.
    pub fn extend_normal(&self, xi: &[f64]) -> Vec<Jet2> {
        let jets: Vec<Jet2> = xi.iter().map(|x| Jet2::scalar(*x)).collect();
        self.ambient_normal_part(&jets)
    }

    /// Matrix of `A_ξ` for a (jet-valued) normal field: `g^{-1} [⟨α_ab, ξ⟩]`.
    pub fn shape_matrix(&self, xi: &[Jet2]) -> Mat2<Jet2> {
        let lowered = Mat2::from_fn(|a, b| self.ambient.inner(&self.alpha[a][b], xi));
        self.ginv.matmul(&lowered)
    }

    /// `A_H` as jets (order 2).
    pub fn a_h(&self) -> Mat2<Jet2> {
        self.shape_matrix(&self.h)
    }

    /// `A_η` as jets (order 2).
    pub fn a_eta(&self) -> Mat2<Jet2> {
        self.shape_matrix(&self.eta)
    }

    /// Checked shape operator of a normal vector at this point.
    pub fn shape_operator(&self, xi: &[f64]) -> Result<Mat2<f64>> {
        if xi.len() != self.ambient.flat_dim {
            return Err(crate::spaceforms::SpaceFormError::LengthMismatch {
                expected: self.ambient.flat_dim,
                got: xi.len(),
            }
            .into());
        }
        self.check_normal(xi)?;
        let jets: Vec<Jet2> = xi.iter().map(|x| Jet2::constant(*x, 0)).collect();
        Ok(self.shape_matrix(&jets).values())
    }

    /// `∇^⊥_{∂_dir} ξ` for a jet-valued normal field, without normality checks.
    pub fn normal_derivative(&self, xi: &[Jet2], dir: Var) -> Vec<f64> {
        let d: Vec<Jet2> = xi.iter().map(|x| x.d(dir)).collect();
        values(&self.ambient_normal_part(&d))
    }

    /// Shape operators of the auxiliary frame vectors `ξ_i`, `i > 1`.
    /// On a minimal point there is no distinguished `ξ_1` and all are returned.
    pub fn aux_shape_operators(&self) -> &[Mat2<f64>] {
        if self.h_frame {
            &self.shape[1..]
        } else {
            &self.shape
        }
    }

    /// `Σ_{i>1} det A_i`.
    pub fn sum_aux_det(&self) -> f64 {
        self.aux_shape_operators().iter().map(Mat2::det).sum()
    }

    /// `|α|² = g^{ac} g^{bd} ⟨α_ab, α_cd⟩`, computed without a frame.
    pub fn alpha_norm_sq(&self) -> f64 {
        let gi = self.inverse_metric();
        let mut acc = 0.0;
        for a in 0..2 {
            for b in 0..2 {
                for c in 0..2 {
                    for d in 0..2 {
                        let ip = self
                            .ambient
                            .inner(&values(&self.alpha[a][b]), &values(&self.alpha[c][d]));
                        acc += gi.at(a, c) * gi.at(b, d) * ip;
                    }
                }
            }
        }
        acc
    }

    /// `|α|² − |A_H|²/|H|²`, the quantity whose supremum is μ.
    pub fn mu_integrand(&self) -> Result<f64> {
        if self.is_minimal() {
            return Err(Error::MinimalSurface {
                norm_h: self.norm_h,
            });
        }
        let ah = self.a_h().values();
        let ah_sq = ah.matmul(&ah).trace();
        Ok(self.alpha_norm_sq() - ah_sq / (self.norm_h * self.norm_h))
    }

    /// Flat vector `T = T^a ∂_a`.
    pub fn t_vector(&self) -> Vec<f64> {
        let t = self.t_value();
        (0..self.ambient.flat_dim)
            .map(|k| t[0] * self.df[0][k].value() + t[1] * self.df[1][k].value())
            .collect()
    }

    pub fn g_norm(&self, w: [f64; 2]) -> f64 {
        g_norm(&self.metric(), w)
    }

    fn build_frame(&mut self) {
        let model = &self.ambient;
        let codim = model.codim();
        let mut frame: Vec<Vec<f64>> = Vec::with_capacity(codim);
        self.h_frame = false;
        if self.norm_h > MINIMAL_TOL {
            let h = self.h_value();
            frame.push(h.iter().map(|x| x / self.norm_h).collect());
            self.h_frame = true;
        }
        for axis in 0..model.flat_dim {
            if frame.len() == codim {
                break;
            }
            let mut e = vec![0.0; model.flat_dim];
            e[axis] = 1.0;
            let mut w = self.ambient_normal_part_value(&e);
            // two Gram–Schmidt passes
            for _ in 0..2 {
                for x in &frame {
                    let c = model.inner(&w, x);
                    for (wk, xk) in w.iter_mut().zip(x) {
                        *wk -= c * xk;
                    }
                }
            }
            let norm = model.inner(&w, &w).max(0.0).sqrt();
            if norm < FRAME_DISCARD_TOL {
                continue;
            }
            for wk in w.iter_mut() {
                *wk /= norm;
            }
            if let Some(first) = w.iter().find(|x| x.abs() > 1e-12) {
                if *first < 0.0 {
                    for wk in w.iter_mut() {
                        *wk = -*wk;
                    }
                }
            }
            frame.push(w);
        }
        self.shape = frame
            .iter()
            .map(|xi| {
                let jets: Vec<Jet2> = xi.iter().map(|x| Jet2::constant(*x, 0)).collect();
                self.shape_matrix(&jets).values()
            })
            .collect();
        self.xi = frame;
    }
}

/// `∇^⊥_{∂_dir}` of a normal field given as a function of the point geometry.
pub fn normal_connection_derivative(
    s: &SurfaceSpec,
    u: f64,
    v: f64,
    field: &dyn Fn(&GeomPoint) -> Vec<Jet2>,
    dir: Var,
) -> Result<Vec<f64>> {
    let gp = evaluate_chart(s, u, v)?;
    let xi = field(&gp);
    gp.check_normal(&values(&xi))?;
    if xi.iter().any(|x| x.order() == 0) {
        return Err(JetError::InsufficientOrder { needed: 1, got: 0 }.into());
    }
    Ok(gp.normal_derivative(&xi, dir))
}

/// Matrix of `A_ξ` in the chart basis at a prepared point.
pub fn shape_operator(gp: &GeomPoint, xi: &[f64]) -> Result<Mat2<f64>> {
    gp.shape_operator(xi)
}
