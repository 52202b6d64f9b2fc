//! Recovery of the isothermic surface from a Bonnet pair.
//!
//! At each node the planes `dF(∂u)`, `dF(∂v)` and `N = n∧x` span a
//! 3-dimensional Klein-isotropic space `W` whose members all contain the
//! point `x`. The line is the common kernel of `B ↦ B∧y` over the
//! generators, found by SVD of a 12×4 matrix. Which of `dF₊ ± dF₋` is the
//! decomposable sum is not known in advance; exactly one sign works.

use nalgebra::{SMatrix, SVector};
use num_complex::Complex64;
use serde::Serialize;

use crate::bonnet::{pairing_sides, PairDifferentials};
use crate::catalog::{c_from_re_iq, quadratic_differential, re_iq, QuadraticForm};
use crate::charts::{d_oneform, d_scalar, partial_u, partial_v, Field, GridChart, OneForm};
use crate::error::{Error, Node, Result};
use crate::exec;
use crate::exterior4::{
    act, hodge, klein, wedge, wedge_bivector_vector, Bivector4, Vec4,
};
use crate::report::{Check, Report, Stats};
use crate::tolerances::{differential_tolerance, Tolerances};

use std::f64::consts::SQRT_2;

/// `σ_min ≤ LINE_TOL·σ_max` marks a kernel direction.
pub const LINE_TOL: f64 = 1e-8;

/// Largest `|κ(a, b)|/(|a||b|)` over pairs of generators, including `a = b`.
pub fn isotropy_defect(generators: &[Bivector4]) -> f64 {
    let mut worst = 0.0_f64;
    for a in generators {
        for b in generators {
            let scale = a.norm() * b.norm();
            if scale > 0.0 {
                worst = worst.max(klein(a, b).abs() / scale);
            }
        }
    }
    worst
}

/// Common line of the planes in `generators`, as a unit vector together with
/// `σ₄/σ₁` of the stacked trivector map.
pub fn extract_line(generators: &[Bivector4]) -> Result<(Vec4, f64)> {
    extract_line_within(generators, LINE_TOL)
}

/// [`extract_line`] accepting `σ₄/σ₁ ≤ tolerance`, for generators built from
/// finite differences. A second kernel direction is still judged at
/// [`LINE_TOL`].
pub fn extract_line_within(generators: &[Bivector4], tolerance: f64) -> Result<(Vec4, f64)> {
    if generators.is_empty() || generators.len() > 3 {
        return Err(Error::NoLine(format!("expected 1 to 3 generators, got {}", generators.len())));
    }
    let mut m = SMatrix::<f64, 12, 4>::zeros();
    for (g, b) in generators.iter().enumerate() {
        for col in 0..4 {
            let tri = wedge_bivector_vector(b, &Vec4::basis(col));
            for (r, value) in tri.iter().enumerate() {
                m[(4 * g + r, col)] = *value;
            }
        }
    }
    let svd = m.svd(false, true);
    let v_t = svd.v_t.expect("requested V");
    let mut order: Vec<usize> = (0..4).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
    let s = |k: usize| svd.singular_values[order[k]];
    if s(0) == 0.0 || !s(0).is_finite() {
        return Err(Error::NoLine("generators vanish".into()));
    }
    let ratio = s(3) / s(0);
    if !(ratio <= tolerance) {
        return Err(Error::NoLine(format!("no common line (σ₄/σ₁ = {ratio:.3e})")));
    }
    if s(2) / s(0) <= LINE_TOL {
        return Err(Error::NoLine("kernel is more than one-dimensional".into()));
    }
    let row: SVector<f64, 4> = v_t.row(order[3]).transpose();
    Ok((Vec4([row[0], row[1], row[2], row[3]]).normalized(), ratio))
}

/// Optional ground truth for deviation checks.
pub struct Reference<'a> {
    pub x: &'a Field<Vec4>,
    pub n: &'a Field<Vec4>,
    pub omega: &'a OneForm<Vec4>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Recovered {
    pub chart: GridChart,
    pub x: Field<Vec4>,
    pub dx: OneForm<Vec4>,
    pub n: Field<Vec4>,
    pub omega: OneForm<Vec4>,
    /// Node average of the coefficient of `q = c dz²` read off `II₊ − II₋`.
    pub c: Complex64,
    /// True when `dF₊ − dF₋` (rather than the sum) was the decomposable field.
    pub hodge_swapped: bool,
    pub report: Report,
}

impl PairDifferentials {
    /// Differentials by finite differences from sampled `F±` and `n±`.
    pub fn from_positions(
        chart: &GridChart,
        fp: &Field<Bivector4>,
        fm: &Field<Bivector4>,
        np: &Field<Bivector4>,
        nm: &Field<Bivector4>,
    ) -> Result<PairDifferentials> {
        for f in [fp, fm, np, nm] {
            f.check_shape(chart)?;
        }
        Ok(PairDifferentials {
            chart: *chart,
            np: np.clone(),
            nm: nm.clone(),
            dfp: d_scalar(fp, chart),
            dfm: d_scalar(fm, chart),
            dnp: d_scalar(np, chart),
            dnm: d_scalar(nm, chart),
        })
    }
}

/// Orthonormal bases of `W± = span{dF₊(∂u) ± dF₋(∂u), dF₊(∂v) ± dF₋(∂v), n₊ ± n₋}`
/// at every node.
#[derive(Debug, Clone)]
pub struct IsotropicPlaneField {
    pub chart: GridChart,
    pub wp: Vec<[Bivector4; 3]>,
    pub wm: Vec<[Bivector4; 3]>,
    /// `σ₁/σ₃` of the generators of `W₊` (equal for `W₋`).
    pub condition: Vec<f64>,
}

fn generators(d: &PairDifferentials, k: usize, sign: f64) -> [Bivector4; 3] {
    let (pu, pv) = d.dfp.at(k);
    let (mu, mv) = d.dfm.at(k);
    [pu + mu * sign, pv + mv * sign, d.np.data[k] + d.nm.data[k] * sign]
}

/// Orthonormal basis of the span of three bivectors and `σ₁/σ₃`.
fn orthonormal_basis(g: &[Bivector4; 3]) -> ([Bivector4; 3], f64) {
    let m = SMatrix::<f64, 6, 3>::from_fn(|r, c| g[c].0[r]);
    let svd = m.svd(true, false);
    let u = svd.u.expect("requested U");
    let mut order = [0, 1, 2];
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
    let col = |c: usize| Bivector4(std::array::from_fn(|r| u[(r, c)]));
    let condition = svd.singular_values[order[0]] / svd.singular_values[order[2]];
    ([col(order[0]), col(order[1]), col(order[2])], condition)
}

fn second_form_difference(d: &PairDifferentials, k: usize) -> QuadraticForm {
    let second = |df: (Bivector4, Bivector4), dn: (Bivector4, Bivector4)| {
        QuadraticForm::symmetrize([
            [-df.0.dot(&dn.0), -df.0.dot(&dn.1)],
            [-df.1.dot(&dn.0), -df.1.dot(&dn.1)],
        ])
    };
    second(d.dfp.at(k), d.dnp.at(k)) - second(d.dfm.at(k), d.dnm.at(k))
}

/// Builds `W±`, refusing nodes where `II₊ − II₋` vanishes or the generators
/// do not span three dimensions.
pub fn build_w(d: &PairDifferentials) -> Result<IsotropicPlaneField> {
    let chart = d.chart;
    for f in [&d.np, &d.nm, &d.dfp.du, &d.dfp.dv, &d.dfm.du, &d.dfm.dv, &d.dnp.du, &d.dnp.dv, &d.dnm.du, &d.dnm.dv] {
        f.check_shape(&chart)?;
    }
    let norms = exec::map_range(chart.len(), |k| second_form_difference(d, k).max_abs());
    if let Some(k) = norms.iter().position(|v| !(*v > NEVER_ZERO_TOL)) {
        return Err(Error::VanishingQuadraticDifferential { node: chart.node(k), norm: norms[k] });
    }
    let per_node = exec::map_range(chart.len(), |k| {
        let (wp, cond) = orthonormal_basis(&generators(d, k, 1.0));
        let (wm, _) = orthonormal_basis(&generators(d, k, -1.0));
        (wp, wm, cond)
    });
    if let Some(k) = per_node.iter().position(|p| !(p.2 <= 1.0 / RANK_TOL)) {
        return Err(Error::RankDeficient { node: chart.node(k), rank: 2 });
    }
    Ok(IsotropicPlaneField {
        chart,
        wp: per_node.iter().map(|p| p.0).collect(),
        wm: per_node.iter().map(|p| p.1).collect(),
        condition: per_node.iter().map(|p| p.2).collect(),
    })
}

impl IsotropicPlaneField {
    /// Largest entry of the κ-Gram matrix on either basis.
    pub fn isotropy_defect(&self, k: usize) -> f64 {
        isotropy_defect(&self.wp[k]).max(isotropy_defect(&self.wm[k]))
    }

    /// Distance of `S(W₊)` from `W₋`, basis vector by basis vector.
    pub fn hodge_swap_defect(&self, k: usize) -> f64 {
        let wm = &self.wm[k];
        self.wp[k]
            .iter()
            .map(|b| {
                let s = hodge(b);
                let proj = wm.iter().fold(Bivector4::ZERO, |acc, m| acc + *m * s.dot(m));
                (s - proj).norm()
            })
            .fold(0.0, f64::max)
    }
}

/// Minimum pointwise `max |II₊ − II₋|` for the never-zero hypothesis.
pub const NEVER_ZERO_TOL: f64 = 1e-8;
/// `σ₃ ≥ RANK_TOL·σ₁` certifies that `W` is three-dimensional.
pub const RANK_TOL: f64 = 1e-10;

/// Largest `sin` of the principal angles between `span(a)` and `span(b)`.
fn principal_angle(a: (Vec4, Vec4), b: (Vec4, Vec4)) -> f64 {
    let orthonormal = |p: (Vec4, Vec4)| {
        let e0 = p.0.normalized();
        let e1 = (p.1 - e0 * p.1.dot(&e0)).normalized();
        (e0, e1)
    };
    let (a0, a1) = orthonormal(a);
    let (b0, b1) = orthonormal(b);
    let off = |v: Vec4| v - b0 * v.dot(&b0) - b1 * v.dot(&b1);
    let (r0, r1) = (off(a0), off(a1));
    largest_singular_value_2(r0.norm_sq(), r0.dot(&r1), r1.norm_sq())
}

/// `√λ_max` of the Gram matrix `(g00, g01; g01, g11)`.
fn largest_singular_value_2(g00: f64, g01: f64, g11: f64) -> f64 {
    let mean = 0.5 * (g00 + g11);
    let dev = (0.25 * (g00 - g11).powi(2) + g01 * g01).sqrt();
    (mean + dev).max(0.0).sqrt()
}

fn smallest_singular_value_2(g00: f64, g01: f64, g11: f64) -> f64 {
    let mean = 0.5 * (g00 + g11);
    let dev = (0.25 * (g00 - g11).powi(2) + g01 * g01).sqrt();
    (mean - dev).max(0.0).sqrt()
}

/// `x`, `ω`, `n` and the immersion `dx` from a pair.
///
/// Consumes only the pair: `dF±`, `n±` and `dn±`.
pub fn recover_isothermic(
    d: &PairDifferentials,
    reference: Option<&Reference<'_>>,
    tol: &Tolerances,
) -> Result<Recovered> {
    let chart = d.chart;
    let w = build_w(d)?;

    // Which plane is of the form ℝ⁴∧x is decided at the first node and must
    // hold everywhere. With widened tolerances both planes may pass; the one
    // closer to decomposable wins unless both are exact.
    let line_tol = tol.get("line_kernel");
    let sign = match (extract_line_within(&w.wp[0], line_tol), extract_line_within(&w.wm[0], line_tol)) {
        (Ok(_), Err(_)) => 1.0,
        (Err(_), Ok(_)) => -1.0,
        (Ok(p), Ok(m)) if p.1.max(m.1) <= LINE_TOL => {
            return Err(Error::NoLine("both W₊ and W₋ contain a common line".into()))
        }
        (Ok(p), Ok(m)) => if p.1 <= m.1 { 1.0 } else { -1.0 },
        (Err(e), Err(_)) => return Err(Error::NoLine(format!("at node {}: {e}", chart.node(0)))),
    };
    let planes = if sign > 0.0 { &w.wp } else { &w.wm };
    let lines = exec::map_slice(planes, |basis| extract_line_within(basis, line_tol));
    let mut lines = lines
        .into_iter()
        .enumerate()
        .map(|(k, r)| r.map_err(|e| Error::NoLine(format!("at node {}: {e}", chart.node(k)))))
        .collect::<Result<Vec<_>>>()?;

    // Sign continuity along the serpentine, anchored to the reference if any.
    let path = chart.serpentine();
    let first = chart.index(path[0].i, path[0].j);
    if let Some(r) = reference {
        if lines[first].0.dot(&r.x.data[first]) < 0.0 {
            lines[first].0 = -lines[first].0;
        }
    }
    for step in path.windows(2) {
        let (a, b) = (chart.index(step[0].i, step[0].j), chart.index(step[1].i, step[1].j));
        if lines[b].0.dot(&lines[a].0) < 0.0 {
            lines[b].0 = -lines[b].0;
        }
    }
    let x = Field { nu: chart.nu, nv: chart.nv, data: lines.iter().map(|l| l.0).collect::<Vec<_>>() };
    for i in 0..chart.nu {
        for j in 0..chart.nv {
            let here = x.get(i, j);
            let bad_u = i + 1 < chart.nu && here.dot(&x.get(i + 1, j)) <= 0.0;
            let bad_v = j + 1 < chart.nv && here.dot(&x.get(i, j + 1)) <= 0.0;
            if bad_u || bad_v {
                return Err(Error::SignContinuity { node: Node { i, j } });
            }
        }
    }

    let big_n = |k: usize| (d.np.data[k] + d.nm.data[k] * sign) * (1.0 / SQRT_2);
    let big_dn = |k: usize| {
        let (pu, pv) = d.dnp.at(k);
        let (mu, mv) = d.dnm.at(k);
        ((pu + mu * sign) * (1.0 / SQRT_2), (pv + mv * sign) * (1.0 / SQRT_2))
    };
    let big_df = |k: usize| {
        let g = generators(d, k, sign);
        (g[0], g[1])
    };

    let n = Field::from_nodes(&chart, |k| (-act(&big_n(k), &x.data[k])).normalized());
    let omega = OneForm::from_nodes(&chart, |k| {
        let (fu, fv) = big_df(k);
        (-act(&fu, &x.data[k]), -act(&fv, &x.data[k]))
    });
    let dx = OneForm::from_nodes(&chart, |k| {
        let (nu, nv) = big_dn(k);
        (act(&nu, &n.data[k]), act(&nv, &n.data[k]))
    });

    let immersion = exec::map_range(chart.len(), |k| {
        let (xu, xv) = dx.at(k);
        let g = (xu.norm_sq(), xu.dot(&xv), xv.norm_sq());
        largest_singular_value_2(g.0, g.1, g.2) / smallest_singular_value_2(g.0, g.1, g.2)
    });
    if let Some(k) = immersion.iter().position(|v| !(*v < 1e12)) {
        return Err(Error::RankDeficient { node: chart.node(k), rank: 1 });
    }

    // q from the pair's own second fundamental forms: II₊ − II₋ = 2√2 Re(iq).
    let c_pair = exec::map_range(chart.len(), |k| {
        c_from_re_iq(&(second_form_difference(d, k) * (1.0 / (2.0 * SQRT_2))))
    });
    let c = c_pair.iter().sum::<Complex64>() / c_pair.len() as f64;

    let mut report = Report::default();
    let mut push = |name: &str, values: Vec<f64>, tolerance: f64| {
        report.push(Check::new(name, Stats::of(&values), tolerance));
    };

    push("W_rank", w.condition.clone(), tol.get("W_rank"));
    push("W_isotropy", exec::map_range(chart.len(), |k| w.isotropy_defect(k)), tol.get("W_isotropy"));
    push("W_hodge_swap", exec::map_range(chart.len(), |k| w.hodge_swap_defect(k)), tol.get("W_hodge_swap"));
    push("line_kernel", lines.iter().map(|l| l.1).collect(), tol.get("line_kernel"));
    push("recovered_immersion", immersion, tol.get("recovered_immersion"));

    let per_node = exec::map_range(chart.len(), |k| {
        let (xk, nk) = (x.data[k], n.data[k]);
        let (ou, ov) = omega.at(k);
        let (xu, xv) = dx.at(k);
        let (fu, fv) = big_df(k);
        let q = quadratic_differential(c_pair[k]);
        let pair = [[ou.dot(&xu), ou.dot(&xv)], [ov.dot(&xu), ov.dot(&xv)]];
        let sym = QuadraticForm::symmetrize(pair);
        let (lhs, _) = pairing_sides((ou, ov), xk, nk, (xu, xv));
        let image = (wedge(&ou, &xk) - fu)
            .norm()
            .max((wedge(&ov, &xk) - fv).norm())
            .max((wedge(&nk, &xk) - big_n(k)).norm());
        let (gu, gv, guv) = (xu.norm_sq(), xv.norm_sq(), xu.dot(&xv));
        let scale = 0.5 * (gu + gv);
        [
            (xk.norm() - 1.0).abs(),
            ou.dot(&xk).abs().max(ov.dot(&xk).abs()),
            ou.dot(&nk).abs().max(ov.dot(&nk).abs()),
            (wedge(&ou, &xv) - wedge(&ov, &xu)).norm(),
            (pair[0][1] - pair[1][0]).abs(),
            (sym - q).max_abs(),
            (lhs + re_iq(c_pair[k]) * 2.0).max_abs(),
            image,
            principal_angle((ou, ov), (xu, xv)),
            ((gu - gv).abs().max(2.0 * guv.abs())) / scale,
        ]
    });
    const NAMES: [&str; 10] = [
        "recovered_on_sphere",
        "recovered_omega_perp_x",
        "recovered_omega_perp_n",
        "recovered_omega_wedge_dx",
        "recovered_pairing_antisymmetric",
        "recovered_pairing_vs_2Req",
        "recovered_pairing_identity",
        "recovered_reproduces_pair",
        "recovered_im_omega_eq_im_dx",
        "recovered_conformal",
    ];
    for (i, name) in NAMES.iter().enumerate() {
        push(name, per_node.iter().map(|p| p[i]).collect(), tol.get(name));
    }

    let d_omega = d_oneform(&omega, &chart);
    push(
        "recovered_d_omega",
        d_omega.coeff.data.iter().map(|v| v.norm()).collect(),
        differential_tolerance(omega.max_magnitude(), chart.h()),
    );
    let fd = OneForm { du: partial_u(&x, &chart), dv: partial_v(&x, &chart) };
    let consistency = exec::map_range(chart.len(), |k| {
        let (a, b) = (dx.at(k), fd.at(k));
        (a.0 - b.0).norm().max((a.1 - b.1).norm())
    });
    push("recovered_dx_consistency", consistency, differential_tolerance(dx.max_magnitude(), chart.h()));

    if let Some(r) = reference {
        for f in [r.x, r.n, &r.omega.du, &r.omega.dv] {
            f.check_shape(&chart)?;
        }
        let dev = exec::map_range(chart.len(), |k| {
            let (a, b) = (omega.at(k), r.omega.at(k));
            [
                (x.data[k] - r.x.data[k]).norm(),
                (a.0 - b.0).norm().max((a.1 - b.1).norm()),
                (n.data[k] - r.n.data[k]).norm(),
            ]
        });
        for (i, name) in ["x_deviation", "omega_deviation", "n_deviation"].iter().enumerate() {
            push(name, dev.iter().map(|p| p[i]).collect(), tol.get(name));
        }
    }

    Ok(Recovered { chart, x, dx, n, omega, c, hodge_swapped: sign < 0.0, report })
}
