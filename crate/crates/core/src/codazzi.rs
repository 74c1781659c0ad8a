//! The Codazzi operators `S` and `S̃`, their Codazzi and Simons residuals,
//! and the metric change `⟨·,·⟩_S = ⟨S·, S·⟩`.
//!
//! Operators are endomorphisms in the chart basis (see [`crate::linalg`]);
//! traces and determinants are those of the endomorphism, never of a
//! matrix paired with the wrong metric.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{
    christoffel, evaluate_chart, gauss_curvature_brioschi, grad_norm_sq, laplace_beltrami,
    GeomPoint, SurfaceSpec, MINIMAL_TOL,
};
use crate::jets::{Jet2, Var};
use crate::linalg::{g_norm, self_adjoint_defect, Mat2};

/// Below this `|S|` the logarithmic Simons forms are not evaluated.
pub const NORM_S_FLOOR: f64 = 1e-6;
/// Below this `|det S|` the metric change is not defined.
pub const SINGULAR_TOL: f64 = 1e-8;
/// Input tolerance for tracelessness and self-adjointness.
pub const TRACELESS_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CodazziKind {
    #[serde(rename = "S")]
    S,
    #[serde(rename = "S_tilde")]
    STilde,
}

/// A Codazzi operator field on a surface, evaluated pointwise from jets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CodazziField {
    pub kind: CodazziKind,
}

impl CodazziField {
    pub const S: CodazziField = CodazziField {
        kind: CodazziKind::S,
    };
    pub const S_TILDE: CodazziField = CodazziField {
        kind: CodazziKind::STilde,
    };

    /// The operator with jet entries (order 2).
    pub fn matrix_jet(&self, gp: &GeomPoint) -> Result<Mat2<Jet2>> {
        match self.kind {
            CodazziKind::S => operator_s_jet(gp, gp.kappa()),
            CodazziKind::STilde => Ok(operator_s_tilde_jet(gp)),
        }
    }

    pub fn matrix_at(&self, gp: &GeomPoint) -> Result<Mat2<f64>> {
        Ok(self.matrix_jet(gp)?.values())
    }
}

/// `T^a T_b` and `|T|²` as jets.
fn t_dyad(gp: &GeomPoint) -> (Mat2<Jet2>, Jet2) {
    (
        Mat2::from_fn(|a, b| gp.t[a] * gp.t_lower[b]),
        gp.t_norm_sq(),
    )
}

/// `SX = 2A_H X − κ⟨T,X⟩T + κ(|T|²/2)X − 2|H|²X`, with jet entries.
pub fn operator_s_jet(gp: &GeomPoint, kappa: f64) -> Result<Mat2<Jet2>> {
    if gp.norm_h < MINIMAL_TOL {
        return Err(Error::MinimalSurface { norm_h: gp.norm_h });
    }
    Ok(operator_s_formula(gp, kappa))
}

/// The right-hand side of [`operator_s_jet`] without the non-minimality
/// check; on a minimal surface it reduces to `κ S̃`.
pub fn operator_s_formula(gp: &GeomPoint, kappa: f64) -> Mat2<Jet2> {
    let (tt, t2) = t_dyad(gp);
    let ah = gp.a_h();
    let diag = t2 * (0.5 * kappa) - gp.h_norm_sq() * 2.0;
    Mat2::from_fn(|a, b| {
        let mut x = ah.at(a, b) * 2.0 - tt.at(a, b) * kappa;
        if a == b {
            x += diag;
        }
        x
    })
}

/// `S̃X = −⟨T,X⟩T + (|T|²/2)X`, with jet entries.
pub fn operator_s_tilde_jet(gp: &GeomPoint) -> Mat2<Jet2> {
    let (tt, t2) = t_dyad(gp);
    Mat2::from_fn(|a, b| {
        let x = -tt.at(a, b);
        if a == b {
            x + t2 * 0.5
        } else {
            x
        }
    })
}

pub fn operator_s(gp: &GeomPoint, kappa: f64) -> Result<Mat2<f64>> {
    Ok(operator_s_jet(gp, kappa)?.values())
}

pub fn operator_s_tilde(gp: &GeomPoint) -> Mat2<f64> {
    operator_s_tilde_jet(gp).values()
}

/// `(∇_{∂a} S)` as a matrix, for `a` in `{u, v}`, at the expansion point.
pub fn covariant_derivative(gp: &GeomPoint, s: &Mat2<Jet2>, dir: Var) -> Mat2<f64> {
    let a = dir.index();
    let gamma = |c: usize, i: usize, j: usize| gp.gamma[c].at(i, j).value();
    Mat2::from_fn(|c, e| {
        let mut x = s.at(c, e).first(dir);
        for d in 0..2 {
            x += gamma(c, a, d) * s.at(d, e).value() - s.at(c, d).value() * gamma(d, a, e);
        }
        x
    })
}

/// Chart components of `∇_{∂u}(S∂v) − ∇_{∂v}(S∂u)` for an operator given
/// as jets and Christoffel symbols `gamma[k].at(i, j) = Γ^k_{ij}`.
pub fn codazzi_defect(s: &Mat2<Jet2>, gamma: &[Mat2<Jet2>; 2]) -> [f64; 2] {
    let mut r = [0.0; 2];
    for (c, rc) in r.iter_mut().enumerate() {
        let mut x = s.at(c, 1).du() - s.at(c, 0).dv();
        for d in 0..2 {
            x += gamma[c].at(0, d).value() * s.at(d, 1).value()
                - gamma[c].at(1, d).value() * s.at(d, 0).value();
        }
        *rc = x;
    }
    r
}

pub fn codazzi_residual_at(gp: &GeomPoint, field: CodazziField) -> Result<f64> {
    let s = field.matrix_jet(gp)?;
    Ok(g_norm(&gp.metric(), codazzi_defect(&s, &gp.gamma)))
}

/// g-norm of `(∇_{∂u} S)∂v − (∇_{∂v} S)∂u` at `(u, v)`.
pub fn codazzi_residual(s: &SurfaceSpec, u: f64, v: f64, field: CodazziField) -> Result<f64> {
    codazzi_residual_at(&evaluate_chart(s, u, v)?, field)
}

/// `|tr(S²) + 2 det S|` for a traceless, `g`-self-adjoint endomorphism.
pub fn s_norm_det_identity(s: &Mat2<f64>, g: &Mat2<f64>) -> Result<f64> {
    let scale = 1.0 + s.max_abs();
    let trace = s.trace();
    if trace.abs() > TRACELESS_TOL * scale {
        return Err(Error::NotTraceless { trace });
    }
    let defect = self_adjoint_defect(g, s);
    if defect > TRACELESS_TOL * scale * (1.0 + g.max_abs()) {
        return Err(Error::InvalidArgument(format!(
            "operator is not self-adjoint (defect {defect:e})"
        )));
    }
    Ok((s.matmul(s).trace() + 2.0 * s.det()).abs())
}

/// `|∇S|² = g^{ab} g_{cd} g^{ef} (∇_a S)^c_e (∇_b S)^d_f`.
pub fn covariant_norm_sq(gp: &GeomPoint, s: &Mat2<Jet2>) -> f64 {
    let g = gp.metric();
    let gi = gp.inverse_metric();
    let ds = [
        covariant_derivative(gp, s, Var::U),
        covariant_derivative(gp, s, Var::V),
    ];
    let mut acc = 0.0;
    for a in 0..2 {
        for b in 0..2 {
            for c in 0..2 {
                for d in 0..2 {
                    for e in 0..2 {
                        for f in 0..2 {
                            acc += gi.at(a, b)
                                * g.at(c, d)
                                * gi.at(e, f)
                                * ds[a].at(c, e)
                                * ds[b].at(d, f);
                        }
                    }
                }
            }
        }
    }
    acc
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SimonsResiduals {
    pub norm_s: f64,
    /// `|½Δ|S|² − |∇S|² − 2K|S|²|`, defined everywhere.
    pub eq4: f64,
    /// `||S|Δ|S| − 2K|S|² − |∇|S||²|`, only where `|S| > NORM_S_FLOOR`.
    pub eq5: Option<f64>,
    /// `|Δ ln|S| − 2K|`, only where `|S| > NORM_S_FLOOR`.
    pub eq6: Option<f64>,
    /// `||∇S|² − 2|∇|S||²|`, only where `|S| > NORM_S_FLOOR`.
    pub gradient_split: Option<f64>,
}

pub fn simons_residuals_at(gp: &GeomPoint, field: CodazziField) -> Result<SimonsResiduals> {
    let s = field.matrix_jet(gp)?;
    let sq = s.matmul(&s).trace();
    let k = gp.k.value();
    let norm_s = sq.value().max(0.0).sqrt();
    let lap_sq = laplace_beltrami(&sq, &gp.g)?;
    let eq4 = (0.5 * lap_sq - covariant_norm_sq(gp, &s) - 2.0 * k * sq.value()).abs();
    let mut out = SimonsResiduals {
        norm_s,
        eq4,
        eq5: None,
        eq6: None,
        gradient_split: None,
    };
    if norm_s > NORM_S_FLOOR {
        let n = sq.sqrt()?;
        let grad_n = grad_norm_sq(&n, &gp.g)?;
        let lap_n = laplace_beltrami(&n, &gp.g)?;
        out.eq5 = Some((norm_s * lap_n - 2.0 * k * sq.value() - grad_n).abs());
        out.eq6 = Some(log_simons_residual_from(&sq, gp)?);
        out.gradient_split = Some((covariant_norm_sq(gp, &s) - 2.0 * grad_n).abs());
    }
    Ok(out)
}

fn log_simons_residual_from(sq: &Jet2, gp: &GeomPoint) -> Result<f64> {
    let norm = sq.value().max(0.0).sqrt();
    if norm <= NORM_S_FLOOR {
        return Err(Error::ZeroOfS { norm });
    }
    let ln = sq.ln()? * 0.5;
    Ok((laplace_beltrami(&ln, &gp.g)? - 2.0 * gp.k.value()).abs())
}

/// `|Δ ln|S| − 2K|`; fails at zeros of `|S|`.
pub fn log_simons_residual(gp: &GeomPoint, field: CodazziField) -> Result<f64> {
    let s = field.matrix_jet(gp)?;
    log_simons_residual_from(&s.matmul(&s).trace(), gp)
}

pub fn simons_residuals(
    s: &SurfaceSpec,
    u: f64,
    v: f64,
    field: CodazziField,
) -> Result<SimonsResiduals> {
    simons_residuals_at(&evaluate_chart(s, u, v)?, field)
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricChange {
    /// `(g_S)_{ab} = ⟨S∂a, S∂b⟩`, order 2.
    pub g_s: Mat2<Jet2>,
    pub det_s: f64,
    /// Curvature of `g_S`, from `g_S` alone.
    pub k_tilde: f64,
    /// `|K̃ det S − K|`.
    pub residual: f64,
    /// g_S-norm of the Codazzi defect of `S⁻¹` for the Levi-Civita
    /// connection of `g_S`.
    pub inverse_codazzi: f64,
    /// Largest difference between the Christoffel symbols of `g_S` and
    /// those of the connection `S⁻¹∇(S·)`.
    pub connection_defect: f64,
}

pub fn metric_change_at(gp: &GeomPoint, field: CodazziField) -> Result<MetricChange> {
    let s = field.matrix_jet(gp)?;
    let det_s = s.det().value();
    if det_s.abs() <= SINGULAR_TOL {
        return Err(Error::SingularOperator { det: det_s });
    }
    let g_s = s.transpose().matmul(&gp.g).matmul(&s);
    let k_tilde = gauss_curvature_brioschi(&g_s)?.value();
    let residual = (k_tilde * det_s - gp.k.value()).abs();

    let s_inv = s.adjugate().scale(s.det().recip()?);
    let gamma_s = christoffel(&g_s)?;
    let defect = codazzi_defect(&s_inv, &gamma_s);
    let inverse_codazzi = g_norm(&g_s.values(), defect);

    // Γ̃^k_{ij} = (S⁻¹)^k_c (∂_i S^c_j + Γ^c_{id} S^d_j)
    let sv = s.values();
    let si = s_inv.values();
    let mut connection_defect: f64 = 0.0;
    for i in 0..2 {
        let dir = Var::from_index(i);
        for j in 0..2 {
            let w: [f64; 2] = std::array::from_fn(|c| {
                let mut x = s.at(c, j).first(dir);
                for d in 0..2 {
                    x += gp.gamma[c].at(i, d).value() * sv.at(d, j);
                }
                x
            });
            let pulled = si.apply(w);
            for k in 0..2 {
                connection_defect =
                    connection_defect.max((pulled[k] - gamma_s[k].at(i, j).value()).abs());
            }
        }
    }
    Ok(MetricChange {
        g_s,
        det_s,
        k_tilde,
        residual,
        inverse_codazzi,
        connection_defect,
    })
}

pub fn metric_change(
    s: &SurfaceSpec,
    u: f64,
    v: f64,
    field: CodazziField,
) -> Result<MetricChange> {
    metric_change_at(&evaluate_chart(s, u, v)?, field)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::instantiate;
    use std::collections::BTreeMap;
    use std::f64::consts::PI;

    fn surface(id: &str, pairs: &[(&str, f64)]) -> SurfaceSpec {
        let p: BTreeMap<String, f64> = pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect();
        instantiate(id, &p).unwrap()
    }

    #[test]
    fn s_on_circle_cylinder() {
        let s = surface("circle_cylinder", &[("kappa", 1.0), ("r", PI / 4.0)]);
        let gp = evaluate_chart(&s, 0.8, 0.1).unwrap();
        let m = operator_s(&gp, 1.0).unwrap();
        let [lo, hi] = m.real_eigenvalues();
        assert!((lo + 1.0).abs() < 1e-12 && (hi - 1.0).abs() < 1e-12);
        assert!((m.det() + 1.0).abs() < 1e-12);
        assert!((m.matmul(&m).trace() - 2.0).abs() < 1e-12);
        assert!(m.trace().abs() < 1e-12);
        assert!(self_adjoint_defect(&gp.metric(), &m) < 1e-12);
    }

    #[test]
    fn s_rejects_minimal_points() {
        let s = surface("slice", &[("kappa", 1.0)]);
        let gp = evaluate_chart(&s, 1.0, 1.0).unwrap();
        assert!(matches!(
            operator_s(&gp, 1.0),
            Err(Error::MinimalSurface { .. })
        ));
        assert_eq!(operator_s_tilde(&gp), Mat2::zeros());
    }

    #[test]
    fn s_tilde_on_vertical_cylinder() {
        let s = surface("vertical_geodesic_cylinder", &[("kappa", 1.0)]);
        let gp = evaluate_chart(&s, 0.5, 0.5).unwrap();
        let m = operator_s_tilde(&gp);
        let [lo, hi] = m.real_eigenvalues();
        assert!((lo + 0.5).abs() < 1e-14 && (hi - 0.5).abs() < 1e-14);
        assert!((m.det() + 0.25).abs() < 1e-14);
        // T is the eigenvector of −|T|²/2.
        let t = gp.t_value();
        let mt = m.apply(t);
        assert!((mt[0] + 0.5 * t[0]).abs() < 1e-14 && (mt[1] + 0.5 * t[1]).abs() < 1e-14);
    }

    #[test]
    fn s_tilde_matches_s_on_minimal_surfaces() {
        // With H = 0 the operator S reduces to κ S̃.
        let s = surface("cor32_flat_minimal", &[("kappa", 2.0), ("theta", 0.5)]);
        let gp = evaluate_chart(&s, 0.3, 0.4).unwrap();
        let (tt, t2) = t_dyad(&gp);
        let kappa = 2.0;
        let s_formula = Mat2::from_fn(|a, b| {
            -kappa * tt.at(a, b).value() + if a == b { 0.5 * kappa * t2.value() } else { 0.0 }
        });
        let st = operator_s_tilde(&gp).scale(kappa);
        assert!(s_formula.sub(&st).max_abs() < 1e-12);
    }

    #[test]
    fn umbilic_data_gives_zero() {
        // A_H = |H|² Id and T = 0 make every term of S cancel.
        let h2 = 0.7;
        let ah = Mat2::<f64>::identity().scale(h2);
        let s = ah.scale(2.0).sub(&Mat2::identity().scale(2.0 * h2));
        assert_eq!(s, Mat2::zeros());
    }

    #[test]
    fn norm_det_examples() {
        let id = Mat2::identity();
        assert_eq!(s_norm_det_identity(&Mat2::diag(1.0, -1.0), &id).unwrap(), 0.0);
        assert_eq!(s_norm_det_identity(&Mat2::zeros(), &id).unwrap(), 0.0);
        assert!(matches!(
            s_norm_det_identity(&Mat2::diag(1.0, 1.0), &id),
            Err(Error::NotTraceless { .. })
        ));
    }

    #[test]
    fn codazzi_on_pmc_and_minimal_examples() {
        let s = surface("circle_cylinder", &[("kappa", -1.0), ("r", 0.3)]);
        assert!(codazzi_residual(&s, 1.0, 0.2, CodazziField::S).unwrap() < 1e-9);
        let s = surface("slice", &[("kappa", 1.0)]);
        assert_eq!(
            codazzi_residual(&s, 1.0, 0.2, CodazziField::S_TILDE).unwrap(),
            0.0
        );
        let s = surface("perturbed_control", &[("kappa", 1.0)]);
        let worst = (0..20)
            .map(|i| codazzi_residual(&s, 1.0, 0.3 * i as f64, CodazziField::S).unwrap())
            .fold(0.0, f64::max);
        assert!(worst > 1e-3);
    }

    #[test]
    fn simons_on_constant_norm_surfaces() {
        let s = surface("circle_cylinder", &[("kappa", 1.0), ("r", PI / 4.0)]);
        let r = simons_residuals(&s, 1.0, 0.0, CodazziField::S).unwrap();
        assert!(r.eq4 < 1e-8 && r.eq6.unwrap() < 1e-8);
        let s = surface("vertical_geodesic_cylinder", &[("kappa", 1.0)]);
        let r = simons_residuals(&s, 1.0, 0.0, CodazziField::S_TILDE).unwrap();
        assert!((r.norm_s - 0.5_f64.sqrt()).abs() < 1e-14);
        assert!(r.eq4 < 1e-8 && r.eq6.unwrap() < 1e-8);
        let s = surface("slice", &[("kappa", 1.0)]);
        let gp = evaluate_chart(&s, 1.0, 0.0).unwrap();
        assert!(matches!(
            log_simons_residual(&gp, CodazziField::S_TILDE),
            Err(Error::ZeroOfS { .. })
        ));
        let r = simons_residuals_at(&gp, CodazziField::S_TILDE).unwrap();
        assert_eq!(r.eq6, None);
    }

    #[test]
    fn simons_on_helicoid() {
        for kappa in [1.0, -1.0, 0.0] {
            let s = surface("helicoid", &[("kappa", kappa), ("a", 1.3)]);
            for (u, v) in [(0.2, 0.1), (-0.7, 0.5), (0.9, -0.3)] {
                let r = simons_residuals(&s, u, v, CodazziField::S_TILDE).unwrap();
                assert!(r.eq4 < 1e-9, "{kappa} {r:?}");
                assert!(r.eq5.unwrap() < 1e-9, "{kappa} {r:?}");
                assert!(r.eq6.unwrap() < 1e-9, "{kappa} {r:?}");
                assert!(r.gradient_split.unwrap() < 1e-9, "{kappa} {r:?}");
            }
        }
    }

    #[test]
    fn metric_change_examples() {
        let s = surface("circle_cylinder", &[("kappa", 1.0), ("r", PI / 4.0)]);
        let m = metric_change(&s, 1.0, 0.3, CodazziField::S).unwrap();
        assert!((m.det_s + 1.0).abs() < 1e-12);
        assert!(m.k_tilde.abs() < 1e-8 && m.residual < 1e-8);
        let s = surface("vertical_geodesic_cylinder", &[("kappa", 1.0)]);
        let m = metric_change(&s, 1.0, 0.3, CodazziField::S_TILDE).unwrap();
        assert!(m.residual < 1e-8);
        let s = surface("slice", &[("kappa", 1.0)]);
        assert!(matches!(
            metric_change(&s, 1.0, 0.3, CodazziField::S_TILDE),
            Err(Error::SingularOperator { .. })
        ));
    }

    #[test]
    fn metric_change_on_curved_examples() {
        let s = surface("helicoid", &[("kappa", -1.0), ("a", 0.8)]);
        for (u, v) in [(0.3, 0.2), (-0.5, 0.7)] {
            let m = metric_change(&s, u, v, CodazziField::S_TILDE).unwrap();
            assert!(m.residual < 1e-8, "{m:?}");
            assert!(m.inverse_codazzi < 1e-9, "{m:?}");
            assert!(m.connection_defect < 1e-9, "{m:?}");
            assert!(m.g_s.values().det() > 0.0);
        }
    }

    #[test]
    fn synthetic_constant_operator() {
        // S = diag(2, −2) on the flat metric: g_S = 4 g stays flat.
        let one = Jet2::constant(1.0, 2);
        let zero = Jet2::constant(0.0, 2);
        let g = Mat2::new(one, zero, zero, one);
        let s = Mat2::new(one * 2.0, zero, zero, one * -2.0);
        let g_s = s.transpose().matmul(&g).matmul(&s);
        assert_eq!(g_s.values(), Mat2::diag(4.0, 4.0));
        assert_eq!(gauss_curvature_brioschi(&g_s).unwrap().value(), 0.0);
    }
}
