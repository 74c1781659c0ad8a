//! Built-in exact immersions with closed-form geometry.
//!
//! Every chart is written in the flat model of [`AmbientModel`]: the
//! space-form coordinates first, then zero padding coordinates when the
//! surface is included totally geodesically in a higher-dimensional
//! `M^n(κ)`, then the `ℝ` coordinate. Throughout `R = 1/√|κ|`.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{Domain, GlobalFacts, Immersion, SurfaceSpec};
use crate::jets::Jet2;
use crate::spaceforms::AmbientModel;

#[derive(Debug, Clone, Serialize)]
pub struct ParamSpec {
    pub name: &'static str,
    pub default: f64,
    /// Human-readable admissible range.
    pub range: &'static str,
}

#[derive(Debug, Clone, Serialize)]
pub struct CatalogEntry {
    pub id: &'static str,
    pub description: &'static str,
    pub required_params: Vec<ParamSpec>,
    pub ambient_rule: &'static str,
    /// Closed-form expected quantities, as formulas in the parameters.
    pub expected: BTreeMap<&'static str, &'static str>,
}

const KAPPA: ParamSpec = ParamSpec {
    name: "kappa",
    default: 1.0,
    range: "finite real",
};
const PAD: ParamSpec = ParamSpec {
    name: "n",
    default: 2.0,
    range: "integer 2..=6 (dimension of the space form)",
};

pub fn catalog_list() -> Vec<CatalogEntry> {
    vec![
        CatalogEntry {
            id: "slice",
            description: "horizontal slice M^2(κ) × {t0}, geodesic polar chart for κ ≠ 0",
            required_params: vec![
                KAPPA,
                ParamSpec {
                    name: "t0",
                    default: 0.0,
                    range: "finite real",
                },
                PAD,
            ],
            ambient_rule: "M^n(κ) × ℝ, κ from params",
            expected: BTreeMap::from([
                ("K", "kappa"),
                ("normT", "0"),
                ("normH", "0"),
                ("detS_tilde", "0"),
            ]),
        },
        CatalogEntry {
            id: "vertical_geodesic_cylinder",
            description: "γ × ℝ over a unit-speed geodesic γ of M^2(κ)",
            required_params: vec![KAPPA, PAD],
            ambient_rule: "M^n(κ) × ℝ, κ from params",
            expected: BTreeMap::from([
                ("K", "0"),
                ("normT", "1"),
                ("normH", "0"),
                ("detS_tilde", "-1/4"),
            ]),
        },
        CatalogEntry {
            id: "circle_cylinder",
            description: "c × ℝ over a geodesic circle c of radius r in M^2(κ)",
            required_params: vec![
                KAPPA,
                ParamSpec {
                    name: "r",
                    default: PI / 4.0,
                    range: "0 < r < π/(2√κ) for κ > 0, r > 0 otherwise",
                },
                PAD,
            ],
            ambient_rule: "M^n(κ) × ℝ, κ from params; n > 2 pads totally geodesically",
            expected: BTreeMap::from([
                ("K", "0"),
                ("normT", "1"),
                (
                    "normH",
                    "√κ cot(√κ r)/2 (κ>0), 1/(2r) (κ=0), √-κ coth(√-κ r)/2 (κ<0)",
                ),
                ("detS", "-(2|H|² + κ/2)²"),
                ("mu", "0"),
            ]),
        },
        CatalogEntry {
            id: "cor32_flat_minimal",
            description: "flat minimal surface (cosθ/b cos bu, cosθ/b sin bu, sin bv/b, cos bv/b, 0, u sinθ)",
            required_params: vec![
                ParamSpec {
                    name: "kappa",
                    default: 1.0,
                    range: "kappa > 0",
                },
                ParamSpec {
                    name: "theta",
                    default: PI / 4.0,
                    range: "0 < theta < π/2",
                },
            ],
            ambient_rule: "M^4(κ) × ℝ, κ > 0 (flat dimension 6)",
            expected: BTreeMap::from([
                ("K", "0"),
                ("normT", "sin θ"),
                ("normH", "0"),
                ("b", "√(κ + κ cos²θ)"),
                ("detS_tilde", "-sin⁴θ/4"),
            ]),
        },
        CatalogEntry {
            id: "perturbed_control",
            description: "circle cylinder with radius r(1 + amp·sin v); a genuine surface that is not PMC",
            required_params: vec![
                KAPPA,
                ParamSpec {
                    name: "r",
                    default: PI / 4.0,
                    range: "0 < r(1 - amp), r(1 + amp) < π/√κ for κ > 0",
                },
                ParamSpec {
                    name: "amp",
                    default: 0.1,
                    range: "0 <= amp <= 0.5",
                },
                PAD,
            ],
            ambient_rule: "M^n(κ) × ℝ, κ from params",
            expected: BTreeMap::from([("constraint_residual", "0"), ("pmc", "fails")]),
        },
        CatalogEntry {
            id: "helicoid",
            description: "ruled minimal helicoid: horizontal geodesics through an axis, turning at rate a",
            required_params: vec![
                KAPPA,
                ParamSpec {
                    name: "a",
                    default: 1.0,
                    range: "-10 <= a <= 10",
                },
                PAD,
            ],
            ambient_rule: "M^n(κ) × ℝ, κ from params",
            expected: BTreeMap::from([
                ("normH", "0"),
                ("K at s = 0", "-a²"),
                ("normT at s = 0", "1"),
                ("inf normT", "1/√(1 + a²/κ) (κ>0), 0 (κ≤0, a≠0)"),
            ]),
        },
    ]
}

pub fn catalog_entry(id: &str) -> Result<CatalogEntry> {
    catalog_list()
        .into_iter()
        .find(|e| e.id == id)
        .ok_or_else(|| Error::UnknownSurface(id.to_string()))
}

fn invalid(name: &str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name: name.to_string(),
        reason: reason.into(),
    }
}

/// Resolves defaults and rejects unknown or non-finite parameters.
pub fn resolve_params(
    entry: &CatalogEntry,
    params: &BTreeMap<String, f64>,
) -> Result<BTreeMap<String, f64>> {
    for (k, v) in params {
        if !entry.required_params.iter().any(|p| p.name == k) {
            return Err(invalid(k, format!("not a parameter of `{}`", entry.id)));
        }
        if !v.is_finite() {
            return Err(invalid(k, "must be finite"));
        }
    }
    Ok(entry
        .required_params
        .iter()
        .map(|p| {
            (
                p.name.to_string(),
                params.get(p.name).copied().unwrap_or(p.default),
            )
        })
        .collect())
}

fn space_dim(p: &BTreeMap<String, f64>) -> Result<usize> {
    let n = p["n"];
    if n.fract() != 0.0 || !(2.0..=6.0).contains(&n) {
        return Err(invalid("n", "must be an integer between 2 and 6"));
    }
    Ok(n as usize)
}

fn radius(kappa: f64) -> f64 {
    1.0 / kappa.abs().sqrt()
}

/// Assembles `(space coords, zero padding, t)`.
fn assemble(mut space: Vec<Jet2>, pad: usize, t: Jet2) -> Vec<Jet2> {
    let z = t * 0.0;
    space.extend(std::iter::repeat_n(z, pad));
    space.push(t);
    space
}

/// Point of `M^2(κ)` at geodesic distance `rho` from the base point in
/// direction angle `phi`, in the flat model.
fn polar(kappa: f64, rho: Jet2, phi: Jet2) -> Vec<Jet2> {
    if kappa > 0.0 {
        let r = radius(kappa);
        let s = (rho * (1.0 / r)).sin() * r;
        vec![s * phi.cos(), s * phi.sin(), (rho * (1.0 / r)).cos() * r]
    } else if kappa < 0.0 {
        let r = radius(kappa);
        let s = (rho * (1.0 / r)).sinh() * r;
        vec![(rho * (1.0 / r)).cosh() * r, s * phi.cos(), s * phi.sin()]
    } else {
        vec![rho * phi.cos(), rho * phi.sin()]
    }
}

#[derive(Debug)]
struct Slice {
    kappa: f64,
    t0: f64,
    pad: usize,
}

impl Immersion for Slice {
    fn eval(&self, u: Jet2, v: Jet2) -> Vec<Jet2> {
        let t = u * 0.0 + self.t0;
        if self.kappa == 0.0 {
            assemble(vec![u, v], self.pad, t)
        } else {
            assemble(polar(self.kappa, u, v), self.pad, t)
        }
    }
}

#[derive(Debug)]
struct VerticalCylinder {
    kappa: f64,
    pad: usize,
}

impl Immersion for VerticalCylinder {
    fn eval(&self, u: Jet2, v: Jet2) -> Vec<Jet2> {
        let z = u * 0.0;
        let space = if self.kappa > 0.0 {
            let r = radius(self.kappa);
            let w = u * (1.0 / r);
            vec![w.cos() * r, w.sin() * r, z]
        } else if self.kappa < 0.0 {
            let r = radius(self.kappa);
            let w = u * (1.0 / r);
            vec![w.cosh() * r, w.sinh() * r, z]
        } else {
            vec![u, z]
        };
        assemble(space, self.pad, v)
    }
}

/// `c × ℝ` where `c` is the circle of radius `r(v)` about the base point.
#[derive(Debug)]
struct CircleCylinder {
    kappa: f64,
    r: f64,
    amp: f64,
    pad: usize,
}

impl Immersion for CircleCylinder {
    fn eval(&self, u: Jet2, v: Jet2) -> Vec<Jet2> {
        let rho = (v.sin() * self.amp + 1.0) * self.r;
        assemble(polar(self.kappa, rho, u), self.pad, v)
    }
}

#[derive(Debug)]
struct Cor32 {
    b: f64,
    theta: f64,
}

impl Immersion for Cor32 {
    fn eval(&self, u: Jet2, v: Jet2) -> Vec<Jet2> {
        let (b, c) = (self.b, self.theta.cos());
        let bu = u * b;
        let bv = v * b;
        vec![
            bu.cos() * (c / b),
            bu.sin() * (c / b),
            bv.sin() * (1.0 / b),
            bv.cos() * (1.0 / b),
            u * 0.0,
            u * self.theta.sin(),
        ]
    }
}

#[derive(Debug)]
struct Helicoid {
    kappa: f64,
    a: f64,
    pad: usize,
}

impl Immersion for Helicoid {
    fn eval(&self, u: Jet2, v: Jet2) -> Vec<Jet2> {
        assemble(polar(self.kappa, u, v * self.a), self.pad, v)
    }
}

/// Builds the chart for `id` with the given parameters (missing ones take
/// their defaults).
// Negated comparisons below also reject NaN.
#[allow(clippy::neg_cmp_op_on_partial_ord)]
pub fn instantiate(id: &str, params: &BTreeMap<String, f64>) -> Result<SurfaceSpec> {
    let entry = catalog_entry(id)?;
    let p = resolve_params(&entry, params)?;
    let kappa = p["kappa"];
    match id {
        "slice" => {
            let n = space_dim(&p)?;
            let domain = if kappa > 0.0 {
                let r = radius(kappa);
                Domain::new(0.1 * r, (PI - 0.1) * r, 0.0, 2.0 * PI)
            } else if kappa < 0.0 {
                Domain::new(0.1, 2.0, 0.0, 2.0 * PI)
            } else {
                Domain::new(-1.0, 1.0, -1.0, 1.0)
            };
            let chart = Slice {
                kappa,
                t0: p["t0"],
                pad: n - 2,
            };
            Ok(spec(id, p, domain, kappa, n, chart)?)
        }
        "vertical_geodesic_cylinder" => {
            let n = space_dim(&p)?;
            let domain = if kappa > 0.0 {
                Domain::new(0.0, 2.0 * PI * radius(kappa), -1.0, 1.0)
            } else {
                Domain::new(-2.0, 2.0, -1.0, 1.0)
            };
            let chart = VerticalCylinder { kappa, pad: n - 2 };
            Ok(spec(id, p, domain, kappa, n, chart)?.with_global(GlobalFacts {
                inf_norm_t: Some(1.0),
            }))
        }
        "circle_cylinder" => {
            let n = space_dim(&p)?;
            let r = p["r"];
            if !(r > 0.0) {
                return Err(invalid("r", "must be positive"));
            }
            if kappa > 0.0 && r >= PI / (2.0 * kappa.sqrt()) {
                return Err(invalid("r", "must be below π/(2√κ)"));
            }
            let chart = CircleCylinder {
                kappa,
                r,
                amp: 0.0,
                pad: n - 2,
            };
            let domain = Domain::new(0.0, 2.0 * PI, -1.0, 1.0);
            Ok(spec(id, p, domain, kappa, n, chart)?.with_global(GlobalFacts {
                inf_norm_t: Some(1.0),
            }))
        }
        "cor32_flat_minimal" => {
            let theta = p["theta"];
            if !(kappa > 0.0) {
                return Err(invalid("kappa", "must be positive"));
            }
            if !(theta > 0.0 && theta < PI / 2.0) {
                return Err(invalid("theta", "must lie in (0, π/2)"));
            }
            let b = (kappa + kappa * theta.cos().powi(2)).sqrt();
            let domain = Domain::new(0.0, 2.0 * PI / b, 0.0, 2.0 * PI / b);
            Ok(
                spec(id, p, domain, kappa, 4, Cor32 { b, theta })?.with_global(GlobalFacts {
                    inf_norm_t: Some(theta.sin()),
                }),
            )
        }
        "perturbed_control" => {
            let n = space_dim(&p)?;
            let (r, amp) = (p["r"], p["amp"]);
            if !(0.0..=0.5).contains(&amp) {
                return Err(invalid("amp", "must lie in [0, 0.5]"));
            }
            if !(r * (1.0 - amp) > 0.0) {
                return Err(invalid("r", "must be positive"));
            }
            if kappa > 0.0 && r * (1.0 + amp) >= PI / kappa.sqrt() {
                return Err(invalid("r", "r(1 + amp) must be below π/√κ"));
            }
            let chart = CircleCylinder {
                kappa,
                r,
                amp,
                pad: n - 2,
            };
            let domain = Domain::new(0.0, 2.0 * PI, 0.0, 2.0 * PI);
            Ok(spec(id, p, domain, kappa, n, chart)?)
        }
        "helicoid" => {
            let n = space_dim(&p)?;
            let a = p["a"];
            if !(-10.0..=10.0).contains(&a) {
                return Err(invalid("a", "must lie in [-10, 10]"));
            }
            let domain = if kappa > 0.0 {
                let h = 0.5 * PI * radius(kappa);
                Domain::new(-h, h, -1.0, 1.0)
            } else {
                Domain::new(-1.0, 1.0, -1.0, 1.0)
            };
            let inf_norm_t = if a == 0.0 {
                1.0
            } else if kappa > 0.0 {
                1.0 / (1.0 + a * a / kappa).sqrt()
            } else {
                0.0
            };
            let chart = Helicoid { kappa, a, pad: n - 2 };
            Ok(spec(id, p, domain, kappa, n, chart)?.with_global(GlobalFacts {
                inf_norm_t: Some(inf_norm_t),
            }))
        }
        _ => Err(Error::UnknownSurface(id.to_string())),
    }
}

fn spec(
    id: &str,
    params: BTreeMap<String, f64>,
    domain: Domain,
    kappa: f64,
    n: usize,
    chart: impl Immersion + 'static,
) -> Result<SurfaceSpec> {
    let ambient = AmbientModel::new(kappa, n)?;
    Ok(SurfaceSpec::new(id, params, domain, ambient, Arc::new(chart)))
}

/// Closed-form values used by tests, evaluated at the given parameters.
pub fn expected_values(id: &str, params: &BTreeMap<String, f64>) -> Result<BTreeMap<String, f64>> {
    let entry = catalog_entry(id)?;
    let p = resolve_params(&entry, params)?;
    let kappa = p["kappa"];
    let mut out = BTreeMap::new();
    let mut put = |k: &str, v: f64| {
        out.insert(k.to_string(), v);
    };
    match id {
        "slice" => {
            put("K", kappa);
            put("normT", 0.0);
            put("normH", 0.0);
            put("detS_tilde", 0.0);
        }
        "vertical_geodesic_cylinder" => {
            put("K", 0.0);
            put("normT", 1.0);
            put("normH", 0.0);
            put("detS_tilde", -0.25);
        }
        "circle_cylinder" => {
            let r = p["r"];
            let h = circle_mean_curvature(kappa, r);
            put("K", 0.0);
            put("normT", 1.0);
            put("normH", h);
            put("detS", -(2.0 * h * h + 0.5 * kappa).powi(2));
            put("mu", 0.0);
        }
        "cor32_flat_minimal" => {
            let theta = p["theta"];
            put("K", 0.0);
            put("normT", theta.sin());
            put("normH", 0.0);
            put("b", (kappa + kappa * theta.cos().powi(2)).sqrt());
            put("detS_tilde", -theta.sin().powi(4) / 4.0);
        }
        "perturbed_control" => {
            put("constraint_residual", 0.0);
        }
        "helicoid" => {
            let a = p["a"];
            put("normH", 0.0);
            put("K_axis", -a * a);
            put("normT_axis", 1.0);
        }
        _ => return Err(Error::UnknownSurface(id.to_string())),
    }
    Ok(out)
}

/// `|H|` of the cylinder over a geodesic circle of radius `r` in `M^2(κ)`.
pub fn circle_mean_curvature(kappa: f64, r: f64) -> f64 {
    if kappa > 0.0 {
        let s = kappa.sqrt();
        0.5 * s / (s * r).tan()
    } else if kappa < 0.0 {
        let s = (-kappa).sqrt();
        0.5 * s / (s * r).tanh()
    } else {
        0.5 / r
    }
}

/// Default parameter instances exercised by the test suites: every entry,
/// both curvature signs where meaningful, and padded variants.
pub fn default_instances() -> Vec<(&'static str, BTreeMap<String, f64>)> {
    let m = |pairs: &[(&str, f64)]| -> BTreeMap<String, f64> {
        pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
    };
    vec![
        ("slice", m(&[("kappa", 1.0)])),
        ("slice", m(&[("kappa", -1.0)])),
        ("slice", m(&[("kappa", 0.0), ("t0", 0.5)])),
        ("vertical_geodesic_cylinder", m(&[("kappa", 1.0)])),
        ("vertical_geodesic_cylinder", m(&[("kappa", -1.0)])),
        ("circle_cylinder", m(&[("kappa", 1.0), ("r", PI / 4.0)])),
        ("circle_cylinder", m(&[("kappa", 1.0), ("r", PI / 8.0)])),
        ("circle_cylinder", m(&[("kappa", -1.0), ("r", 0.3)])),
        ("circle_cylinder", m(&[("kappa", 0.0), ("r", 0.5)])),
        ("circle_cylinder", m(&[("kappa", 1.0), ("r", PI / 8.0), ("n", 4.0)])),
        ("circle_cylinder", m(&[("kappa", -1.0), ("r", 0.3), ("n", 4.0)])),
        ("cor32_flat_minimal", m(&[("kappa", 1.0), ("theta", PI / 4.0)])),
        ("cor32_flat_minimal", m(&[("kappa", 1.0), ("theta", PI / 3.0)])),
        ("cor32_flat_minimal", m(&[("kappa", 2.0), ("theta", 0.5)])),
        ("helicoid", m(&[("kappa", 1.0), ("a", 1.0)])),
        ("helicoid", m(&[("kappa", -1.0), ("a", 1.5)])),
        ("helicoid", m(&[("kappa", 0.0), ("a", 1.0)])),
        ("perturbed_control", m(&[("kappa", 1.0)])),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::evaluate_chart;

    fn params(pairs: &[(&str, f64)]) -> BTreeMap<String, f64> {
        pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
    }

    #[test]
    fn listing() {
        let list = catalog_list();
        assert!(list.len() >= 5);
        assert!(list.iter().any(|e| e.id == "cor32_flat_minimal"));
        assert!(list.iter().all(|e| !e.expected.is_empty()));
        let mut ids: Vec<_> = list.iter().map(|e| e.id).collect();
        ids.sort();
        ids.dedup();
        assert_eq!(ids.len(), list.len());
    }

    #[test]
    fn cor32_norm_identity() {
        let s = instantiate(
            "cor32_flat_minimal",
            &params(&[("kappa", 1.0), ("theta", PI / 4.0)]),
        )
        .unwrap();
        let b = 1.5_f64.sqrt();
        assert!((2.0 * PI / b - s.domain.u1).abs() < 1e-15);
        for (u, v) in [(0.0, 0.0), (0.7, 1.9), (3.1, 0.2)] {
            let p = s.point(u, v);
            let n2: f64 = p[..5].iter().map(|x| x * x).sum();
            assert!((n2 - 1.0).abs() < 1e-14);
        }
        // b is recoverable from the chart itself: f_4(u, 0) = 1/b.
        assert!((1.0 / s.point(0.3, 0.0)[3] - b).abs() < 1e-14);
    }

    #[test]
    fn circle_cylinder_expectations() {
        let e = expected_values("circle_cylinder", &params(&[("r", PI / 4.0)])).unwrap();
        assert!((e["normH"] - 0.5).abs() < 1e-15);
        assert!((e["detS"] + 1.0).abs() < 1e-15);
        let s = instantiate("circle_cylinder", &params(&[("r", PI / 4.0)])).unwrap();
        let gp = evaluate_chart(&s, 1.0, 0.2).unwrap();
        assert!((gp.norm_h - 0.5).abs() < 1e-12);
        assert!(gp.k.value().abs() < 1e-11);
        assert!((gp.norm_t() - 1.0).abs() < 1e-12);
        let [lo, hi] = gp.shape[0].real_eigenvalues();
        assert!(lo.abs() < 1e-12 && (hi - 1.0).abs() < 1e-12);
    }

    #[test]
    fn slice_expectations() {
        let e = expected_values("slice", &params(&[("kappa", -1.0), ("t0", 0.0)])).unwrap();
        assert_eq!(e["K"], -1.0);
        assert_eq!(e["normT"], 0.0);
        let s = instantiate("slice", &params(&[("kappa", 1.0)])).unwrap();
        let gp = evaluate_chart(&s, 1.0, 2.0).unwrap();
        assert!((gp.k.value() - 1.0).abs() < 1e-12);
        assert_eq!(gp.norm_t(), 0.0);
        assert!(gp.norm_h < 1e-14);
        assert!((gp.ambient.inner(&gp.eta_value(), &gp.eta_value()) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn vertical_cylinder_expectations() {
        let s = instantiate("vertical_geodesic_cylinder", &params(&[("kappa", 1.0)])).unwrap();
        let gp = evaluate_chart(&s, 0.4, 0.3).unwrap();
        assert!((gp.norm_t() - 1.0).abs() < 1e-14);
        assert!(gp.eta_value().iter().all(|x| x.abs() < 1e-14));
        assert!(gp.norm_h < 1e-14);
        assert!(gp.k.value().abs() < 1e-12);
    }

    #[test]
    fn helicoid_is_minimal_with_axis_curvature() {
        for kappa in [1.0, -1.0, 0.0, 2.5] {
            let a = 1.3;
            let s = instantiate("helicoid", &params(&[("kappa", kappa), ("a", a)])).unwrap();
            for (u, v) in [(0.0, 0.2), (0.4, -0.6), (-0.9, 0.9)] {
                let gp = evaluate_chart(&s, u, v).unwrap();
                assert!(gp.norm_h < 1e-10, "{kappa}: {}", gp.norm_h);
            }
            let gp = evaluate_chart(&s, 0.0, 0.3).unwrap();
            assert!((gp.k.value() + a * a).abs() < 1e-10);
            assert!((gp.norm_t() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn constraint_at_random_points() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand::rngs::StdRng::seed_from_u64(11);
        for (id, p) in default_instances() {
            let s = instantiate(id, &p).unwrap();
            if s.ambient.kappa == 0.0 {
                continue;
            }
            for _ in 0..100 {
                let u = rng.gen_range(s.domain.u0..=s.domain.u1);
                let v = rng.gen_range(s.domain.v0..=s.domain.v1);
                let r = s.ambient.constraint_residual(&s.point(u, v)).unwrap();
                assert!(r.abs() < 1e-12, "{id} {p:?}: {r:e}");
            }
        }
    }

    #[test]
    fn parameter_errors() {
        assert!(matches!(
            instantiate("cor32_flat_minimal", &params(&[("kappa", -1.0)])),
            Err(Error::InvalidParameter { .. })
        ));
        assert!(matches!(
            instantiate("cor32_flat_minimal", &params(&[("theta", 2.0)])),
            Err(Error::InvalidParameter { .. })
        ));
        assert!(matches!(
            instantiate("circle_cylinder", &params(&[("r", 1.6)])),
            Err(Error::InvalidParameter { .. })
        ));
        assert!(matches!(
            instantiate("circle_cylinder", &params(&[("radius", 0.3)])),
            Err(Error::InvalidParameter { .. })
        ));
        assert!(matches!(
            instantiate("torus", &BTreeMap::new()),
            Err(Error::UnknownSurface(_))
        ));
        assert!(instantiate("circle_cylinder", &params(&[("kappa", -1.0), ("r", 3.0)])).is_ok());
    }
}
