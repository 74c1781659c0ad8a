use std::collections::BTreeMap;

use pmcgeom::catalog::instantiate;
use pmcgeom::codazzi::s_norm_det_identity;
use pmcgeom::geometry::evaluate_chart;
use pmcgeom::identities::Grid;
use pmcgeom::jets::{Jet2, Var};
use pmcgeom::linalg::Mat2;
use pmcgeom::spaceforms::AmbientModel;
use pmcgeom::theorems::check_theorem_3_1;
use proptest::prelude::*;

fn params(pairs: &[(&str, f64)]) -> BTreeMap<String, f64> {
    pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
}

fn falling(n: usize, k: usize) -> f64 {
    (0..k).map(|i| (n - i) as f64).product()
}

/// Exact partial `∂^a_u ∂^b_v` of `Σ c_ij u^i v^j` at `(u, v)`.
fn poly_partial(c: &[f64], u: f64, v: f64, a: usize, b: usize) -> f64 {
    let mut k = 0;
    let mut acc = 0.0;
    for d in 0..=4 {
        for i in (0..=d).rev() {
            let j = d - i;
            if i >= a && j >= b {
                acc += c[k] * falling(i, a) * falling(j, b) * u.powi((i - a) as i32) * v.powi((j - b) as i32);
            }
            k += 1;
        }
    }
    acc
}

fn poly_jet(c: &[f64], u: f64, v: f64) -> Jet2 {
    let ju = Jet2::variable(Var::U, u, 4).unwrap();
    let jv = Jet2::variable(Var::V, v, 4).unwrap();
    let mut k = 0;
    let mut acc = Jet2::zero(4);
    for d in 0..=4 {
        for i in (0..=d).rev() {
            let j = d - i;
            acc += ju.powi(i as u32) * jv.powi(j as u32) * c[k];
            k += 1;
        }
    }
    acc
}

fn random_point(m: &AmbientModel, raw: &[f64]) -> Vec<f64> {
    let r = 1.0 / m.kappa.abs().sqrt();
    let mut p: Vec<f64> = raw[..m.flat_dim].to_vec();
    let sq: f64 = p[..m.t_index].iter().map(|x| x * x).sum();
    if m.kappa > 0.0 {
        let s = r / sq.sqrt();
        p[..m.t_index].iter_mut().for_each(|x| *x *= s);
    } else {
        let spatial: f64 = p[1..m.t_index].iter().map(|x| x * x).sum();
        p[0] = (r * r + spatial).sqrt();
    }
    p
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn jets_are_exact_on_quartics(
        c in prop::collection::vec(-3.0..3.0f64, 15),
        u in -1.5..1.5f64,
        v in -1.5..1.5f64,
    ) {
        let j = poly_jet(&c, u, v);
        for a in 0..=4 {
            for b in 0..=(4 - a) {
                let want = poly_partial(&c, u, v, a, b);
                prop_assert!((j.partial(a, b) - want).abs() <= 1e-9 * (1.0 + want.abs()), "∂({a},{b})");
            }
        }
    }

    #[test]
    fn jet_products_obey_leibniz(
        a in -2.0..2.0f64, b in -2.0..2.0f64, c in -1.0..1.0f64, d in -1.0..1.0f64,
        u in -1.0..1.0f64, v in -1.0..1.0f64,
    ) {
        let ju = Jet2::variable(Var::U, u, 4).unwrap();
        let jv = Jet2::variable(Var::V, v, 4).unwrap();
        let f = (ju * a + jv * b).sin();
        let g = (ju * c + jv * d).exp();
        let fg = f * g;
        let want11 = f.partial(1, 1) * g.value() + f.partial(1, 0) * g.partial(0, 1)
            + f.partial(0, 1) * g.partial(1, 0) + f.value() * g.partial(1, 1);
        let want20 = f.partial(2, 0) * g.value() + 2.0 * f.du() * g.du() + f.value() * g.partial(2, 0);
        prop_assert!((fg.partial(1, 1) - want11).abs() < 1e-12 * (1.0 + want11.abs()));
        prop_assert!((fg.partial(2, 0) - want20).abs() < 1e-12 * (1.0 + want20.abs()));
    }

    #[test]
    fn projection_is_idempotent_and_tangent(
        kappa in prop_oneof![-3.0..-0.2f64, 0.2..3.0f64, Just(0.0)],
        n in 2usize..=5,
        raw in prop::collection::vec(-2.0..2.0f64, 7),
        w in prop::collection::vec(-2.0..2.0f64, 7),
    ) {
        prop_assume!(raw[..n].iter().map(|x| x * x).sum::<f64>() > 1e-2);
        let m = AmbientModel::new(kappa, n).unwrap();
        let p = if kappa == 0.0 { raw[..m.flat_dim].to_vec() } else { random_point(&m, &raw) };
        let w = &w[..m.flat_dim];
        let once = m.project_to_product_tangent(&p, w).unwrap();
        let twice = m.project(&p, &once);
        for (x, y) in once.iter().zip(&twice) {
            prop_assert!((x - y).abs() < 1e-10);
        }
        if kappa != 0.0 {
            prop_assert!(m.inner_space(&once, &p).abs() < 1e-10);
        }
        prop_assert_eq!(once[m.t_index], w[m.t_index]);
    }

    #[test]
    fn traceless_self_adjoint_norm_is_minus_twice_det(
        e in 0.2..3.0f64, f in -0.9..0.9f64, gg in 0.2..3.0f64,
        b00 in -5.0..5.0f64, b01 in -5.0..5.0f64, b11 in -5.0..5.0f64,
    ) {
        let f = f * (e * gg).sqrt();
        let g = Mat2::new(e, f, f, gg);
        let gi = g.inverse().unwrap();
        let s0 = gi.matmul(&Mat2::new(b00, b01, b01, b11));
        let s = s0.sub(&Mat2::identity().scale(s0.trace() / 2.0));
        let r = s_norm_det_identity(&s, &g).unwrap();
        prop_assert!(r < 1e-12 * (1.0 + s.max_abs().powi(2)), "{r:e}");
    }

    #[test]
    fn catalog_charts_stay_on_the_model(
        r in 0.1..1.4f64,
        kappa in prop_oneof![-2.0..-0.3f64, 0.3..2.0f64],
        n in 2.0..=5.0f64,
        s in 0.0..1.0f64, t in 0.0..1.0f64,
    ) {
        let sp = instantiate("circle_cylinder", &params(&[("kappa", kappa), ("r", r.min(0.45 * std::f64::consts::PI / kappa.abs().sqrt())), ("n", n.floor())])).unwrap();
        let d = sp.domain;
        let p = sp.point(d.u0 + s * (d.u1 - d.u0), d.v0 + t * (d.v1 - d.v0));
        prop_assert!(sp.ambient.constraint_residual(&p).unwrap() < 1e-12);
    }

    #[test]
    fn normal_frames_are_orthonormal(
        kappa in prop_oneof![-2.0..-0.3f64, 0.3..2.0f64, Just(0.0)],
        a in 0.2..2.0f64,
        s in 0.05..0.95f64, t in 0.05..0.95f64,
    ) {
        let sp = instantiate("helicoid", &params(&[("kappa", kappa), ("a", a), ("n", 3.0)])).unwrap();
        let d = sp.domain;
        let gp = evaluate_chart(&sp, d.u0 + s * (d.u1 - d.u0), d.v0 + t * (d.v1 - d.v0)).unwrap();
        prop_assert_eq!(gp.xi.len(), sp.ambient.codim());
        for (i, x) in gp.xi.iter().enumerate() {
            prop_assert!(gp.normality_defect(x) < 1e-10);
            for (j, y) in gp.xi.iter().enumerate() {
                let want = if i == j { 1.0 } else { 0.0 };
                prop_assert!((gp.ambient.inner(x, y) - want).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn grids_respect_margins(nu in 0usize..12, nv in 0usize..12, margin in -0.2..0.7f64) {
        let ok = nu >= 5 && nv >= 5 && (0.0..0.5).contains(&margin);
        match Grid::new(nu, nv, margin) {
            Err(_) => prop_assert!(!ok),
            Ok(grid) => {
                prop_assert!(ok);
                let sp = instantiate("slice", &params(&[])).unwrap();
                let pts = grid.points(&sp);
                prop_assert_eq!(pts.len(), nu * nv);
                prop_assert!(pts.iter().all(|(u, v)| sp.domain.contains(*u, *v)));
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn hypothesis_margins_shrink_as_eps_grows(r in 0.1..1.0f64, e1 in 0.01..2.0f64, de in 0.01..1.0f64) {
        let sp = instantiate("circle_cylinder", &params(&[("kappa", -1.0), ("r", r)])).unwrap();
        let grid = Grid::new(5, 5, 0.02).unwrap();
        let m = |eps| check_theorem_3_1(&sp, &grid, eps, 0.0).unwrap().hypotheses[1].margin;
        prop_assert!(m(e1) > m(e1 + de));
    }

    #[test]
    fn hypothesis_margins_track_c(r in 0.1..0.7f64, c1 in 0.0..0.8f64, dc in 0.01..0.19f64) {
        let sp = instantiate("circle_cylinder", &params(&[("kappa", 1.0), ("r", r)])).unwrap();
        let grid = Grid::new(5, 5, 0.02).unwrap();
        let h = |c| check_theorem_3_1(&sp, &grid, 0.1, c).unwrap().hypotheses;
        let (lo, hi) = (h(c1), h(c1 + dc));
        // the curvature bound loosens with c, the mean-curvature bound tightens
        prop_assert!(hi[1].margin >= lo[1].margin);
        prop_assert!(hi[2].margin < lo[2].margin);
    }
}
