//! Bonnet pairs from an isothermic surface.
//!
//! With `dF = ω∧x` the self-dual and anti-self-dual parts `F± = ½(F ± SF)`
//! are isometric, conformal to `x`, and carry unit normals
//! `n± = (n∧x ± S(n∧x))/√2` whose second fundamental forms differ by
//! `2√2 Re(iq)`.
//!
//! Everything except `F` itself is pointwise in `(x, dx, n, dn, ω)`, so the
//! identities can be checked through [`PairDifferentials`] even when `ω∧x`
//! is not closed; [`synthesize`] additionally integrates `F` and refuses
//! non-closed input.

use std::f64::consts::SQRT_2;

use serde::{Deserialize, Serialize};

use crate::catalog::{re_iq, SampledPatch, QuadraticForm};
use crate::charts::{integrate_closed_within, Field, GridChart, OneForm};
use crate::error::{Node, Result};
use crate::exec;
use crate::exterior4::{
    det4, hodge, klein, quat_conj, quat_mul, sd_asd_split, to_quat_pair, wedge, Bivector4, Quat,
    SplitBivector, Vec4,
};
use crate::report::{Check, Report, Stats};
use crate::tolerances::Tolerances;

/// Derivative-level data of a Bonnet pair: normals and the differentials
/// of `F±` and `n±`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PairDifferentials {
    pub chart: GridChart,
    pub np: Field<Bivector4>,
    pub nm: Field<Bivector4>,
    pub dfp: OneForm<Bivector4>,
    pub dfm: OneForm<Bivector4>,
    pub dnp: OneForm<Bivector4>,
    pub dnm: OneForm<Bivector4>,
}

/// First and second fundamental forms and mean curvatures of `F±`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FundamentalForms {
    pub ip: Field<QuadraticForm>,
    pub im: Field<QuadraticForm>,
    pub iip: Field<QuadraticForm>,
    pub iim: Field<QuadraticForm>,
    pub hp: Field<f64>,
    pub hm: Field<f64>,
    /// Nodes where `det I±` fell below `1e−14·scale²`; `H±` is NaN there.
    #[serde(skip)]
    pub degenerate: Vec<Node>,
}

#[derive(Debug, Clone)]
pub struct BonnetPairPatch {
    pub f: Field<Bivector4>,
    pub fp: Field<Bivector4>,
    pub fm: Field<Bivector4>,
    pub diff: PairDifferentials,
    pub forms: FundamentalForms,
    /// `max |d(ω∧x)|` accepted by the integration gate.
    pub closure_residual: f64,
    /// Worst trapezoid cell circulation of `ω∧x`.
    pub worst_loop_defect: f64,
}

impl BonnetPairPatch {
    pub fn chart(&self) -> &GridChart {
        &self.diff.chart
    }
}

/// `dF = ω∧x` as a Λ²ℝ⁴-valued 1-form.
pub fn omega_wedge_x(omega: &OneForm<Vec4>, x: &Field<Vec4>) -> OneForm<Bivector4> {
    let chart_shape = (x.nu, x.nv);
    let pairs = exec::map_range(x.data.len(), |k| {
        let (ou, ov) = omega.at(k);
        (wedge(&ou, &x.data[k]), wedge(&ov, &x.data[k]))
    });
    let field = |data| Field { nu: chart_shape.0, nv: chart_shape.1, data };
    OneForm {
        du: field(pairs.iter().map(|p| p.0).collect()),
        dv: field(pairs.iter().map(|p| p.1).collect()),
    }
}

fn split_pair(b: &Bivector4) -> (Bivector4, Bivector4) {
    sd_asd_split(b)
}

/// `n± = (N ± SN)/√2` for `N = n∧x`.
pub fn normals(n: &Bivector4) -> (Bivector4, Bivector4) {
    let s = hodge(n);
    ((*n + s) * (1.0 / SQRT_2), (*n - s) * (1.0 / SQRT_2))
}

pub fn differentials(sp: &SampledPatch, omega: &OneForm<Vec4>) -> PairDifferentials {
    let per_node = exec::map_range(sp.chart.len(), |k| {
        let x = sp.x.data[k];
        let n = sp.n.data[k];
        let (ou, ov) = omega.at(k);
        let (xu, xv) = sp.dx.at(k);
        let (nu, nv) = sp.dn.at(k);
        let (np, nm) = normals(&wedge(&n, &x));
        let (dfp_u, dfm_u) = split_pair(&wedge(&ou, &x));
        let (dfp_v, dfm_v) = split_pair(&wedge(&ov, &x));
        let dn_big = |dn: Vec4, dx: Vec4| wedge(&dn, &x) + wedge(&n, &dx);
        let (dnp_u, dnm_u) = normals(&dn_big(nu, xu));
        let (dnp_v, dnm_v) = normals(&dn_big(nv, xv));
        [np, nm, dfp_u, dfp_v, dfm_u, dfm_v, dnp_u, dnp_v, dnm_u, dnm_v]
    });
    let chart = sp.chart;
    let col = |i: usize| Field { nu: chart.nu, nv: chart.nv, data: per_node.iter().map(|p| p[i]).collect() };
    PairDifferentials {
        chart,
        np: col(0),
        nm: col(1),
        dfp: OneForm { du: col(2), dv: col(3) },
        dfm: OneForm { du: col(4), dv: col(5) },
        dnp: OneForm { du: col(6), dv: col(7) },
        dnm: OneForm { du: col(8), dv: col(9) },
    }
}

fn gram(df: (Bivector4, Bivector4)) -> QuadraticForm {
    QuadraticForm::new(df.0.dot(&df.0), df.0.dot(&df.1), df.1.dot(&df.1))
}

/// `II(X,Y) = −⟨dF(X), dn(Y)⟩`, symmetrised.
fn second_form(df: (Bivector4, Bivector4), dn: (Bivector4, Bivector4)) -> QuadraticForm {
    QuadraticForm::symmetrize([
        [-df.0.dot(&dn.0), -df.0.dot(&dn.1)],
        [-df.1.dot(&dn.0), -df.1.dot(&dn.1)],
    ])
}

/// `I±`, `II±` and `H± = ½ tr_{I±} II±`.
pub fn fundamental_forms(d: &PairDifferentials) -> FundamentalForms {
    let per_node = exec::map_range(d.chart.len(), |k| {
        let ip = gram(d.dfp.at(k));
        let im = gram(d.dfm.at(k));
        let iip = second_form(d.dfp.at(k), d.dnp.at(k));
        let iim = second_form(d.dfm.at(k), d.dnm.at(k));
        let mean = |ii: &QuadraticForm, i: &QuadraticForm| {
            let scale = i.max_abs();
            if i.det().abs() < 1e-14 * scale * scale || scale == 0.0 {
                None
            } else {
                ii.trace_wrt(i).map(|t| 0.5 * t)
            }
        };
        (ip, im, iip, iim, mean(&iip, &ip), mean(&iim, &im))
    });
    let chart = d.chart;
    let field = |data| Field { nu: chart.nu, nv: chart.nv, data };
    let degenerate = per_node
        .iter()
        .enumerate()
        .filter(|(_, p)| p.4.is_none() || p.5.is_none())
        .map(|(k, _)| chart.node(k))
        .collect();
    FundamentalForms {
        ip: field(per_node.iter().map(|p| p.0).collect()),
        im: field(per_node.iter().map(|p| p.1).collect()),
        iip: field(per_node.iter().map(|p| p.2).collect()),
        iim: field(per_node.iter().map(|p| p.3).collect()),
        hp: Field { nu: chart.nu, nv: chart.nv, data: per_node.iter().map(|p| p.4.unwrap_or(f64::NAN)).collect() },
        hm: Field { nu: chart.nu, nv: chart.nv, data: per_node.iter().map(|p| p.5.unwrap_or(f64::NAN)).collect() },
        degenerate,
    }
}

/// Integrates `F` with `dF = ω∧x`, `F(u0, v0) = base`, and assembles the pair.
pub fn synthesize(sp: &SampledPatch, omega: &OneForm<Vec4>, base: Bivector4) -> Result<BonnetPairPatch> {
    let df = omega_wedge_x(omega, &sp.x);
    let prim = integrate_closed_within(&df, &sp.chart, base, sp.closure_margin())?;
    let fp = prim.values.map(|b| sd_asd_split(b).0);
    let fm = prim.values.map(|b| sd_asd_split(b).1);
    let diff = differentials(sp, omega);
    let forms = fundamental_forms(&diff);
    Ok(BonnetPairPatch {
        f: prim.values,
        fp,
        fm,
        diff,
        forms,
        closure_residual: prim.closure_residual,
        worst_loop_defect: prim.worst_loop_defect,
    })
}

/// Complex structure on the tangent plane: `J x_u = x_v |x_u|/|x_v|`,
/// `J x_v = −x_u |x_v|/|x_u|`, extended linearly.
fn rotate(w: Vec4, xu: Vec4, xv: Vec4) -> Vec4 {
    let (gu, gv) = (xu.norm_sq(), xv.norm_sq());
    let (a, b) = (w.dot(&xu) / gu, w.dot(&xv) / gv);
    let ratio = (gu / gv).sqrt();
    xv * (a * ratio) - xu * (b / ratio)
}

/// Both sides of `ω∧x∧n∧dx = −⟨ω, J dx⟩ vol` with the 1-form slots paired
/// symmetrically.
pub fn pairing_sides(
    omega: (Vec4, Vec4),
    x: Vec4,
    n: Vec4,
    dx: (Vec4, Vec4),
) -> (QuadraticForm, QuadraticForm) {
    let w = [omega.0, omega.1];
    let d = [dx.0, dx.1];
    let lhs = |a: usize, b: usize| det4(&w[a], &x, &n, &d[b]);
    let rhs = |a: usize, b: usize| -w[a].dot(&rotate(d[b], dx.0, dx.1));
    let sym = |f: &dyn Fn(usize, usize) -> f64| {
        QuadraticForm::symmetrize([[f(0, 0), f(0, 1)], [f(1, 0), f(1, 1)]])
    };
    (sym(&lhs), sym(&rhs))
}

fn node_stats(values: Vec<f64>) -> Stats {
    Stats::of(&values)
}

/// Every claim of the forward direction, as max/mean residuals.
pub fn verify_theorem2(
    d: &PairDifferentials,
    forms: &FundamentalForms,
    sp: &SampledPatch,
    omega: &OneForm<Vec4>,
    tol: &Tolerances,
) -> Report {
    let n_nodes = d.chart.len();
    let expected_diff = re_iq(sp.c) * (2.0 * SQRT_2);
    let per_node = exec::map_range(n_nodes, |k| {
        let ip = forms.ip.data[k];
        let im = forms.im.data[k];
        let g = sp.conformal.data[k];
        let (ou, ov) = omega.at(k);
        let (xu, xv) = sp.dx.at(k);
        let x = sp.x.data[k];
        let n = sp.n.data[k];
        let nx = wedge(&n, &x);
        let (dfp, dfm) = (d.dfp.at(k), d.dfm.at(k));
        let df = [dfp.0 + dfm.0, dfp.1 + dfm.1];
        let expected = 2.0 * sp.c.norm_sqr() / g;

        let isometry = (ip - im).max_abs();
        let offdiag = ip.uv.abs();
        let anisotropy = (ip.uu - ip.vv).abs();
        let conformal_factor = (ip.uu - expected).abs().max((ip.vv - expected).abs());
        let w = [ou, ov];
        let mut df_norm = 0.0_f64;
        let mut klein_df: f64 = 0.0;
        for a in 0..2 {
            for b in 0..2 {
                df_norm = df_norm.max((df[a].dot(&df[b]) - w[a].dot(&w[b])).abs());
                klein_df = klein_df.max(klein(&df[a], &df[b]).abs());
            }
        }
        let second = (forms.iip.data[k] - forms.iim.data[k] - expected_diff).max_abs();
        let mean = (forms.hp.data[k] - forms.hm.data[k]).abs();
        let (lhs, rhs) = pairing_sides((ou, ov), x, n, (xu, xv));
        let pairing = (lhs - rhs).max_abs();
        let klein_nx = df.iter().map(|b| klein(b, &nx).abs()).fold(0.0, f64::max);
        let perp_nx = df.iter().map(|b| b.dot(&nx).abs()).fold(0.0, f64::max);
        let (np, nm) = (d.np.data[k], d.nm.data[k]);
        let unit = (np.norm() - 1.0).abs().max((nm.norm() - 1.0).abs());
        let tangent = [dfp.0.dot(&np), dfp.1.dot(&np), dfm.0.dot(&nm), dfm.1.dot(&nm)]
            .iter()
            .map(|v| v.abs())
            .fold(0.0, f64::max);
        [
            isometry, offdiag, anisotropy, conformal_factor, df_norm, second, mean, pairing, klein_df,
            klein_nx, perp_nx, unit, tangent,
        ]
    });
    const NAMES: [&str; 13] = [
        "isometry",
        "conformal_offdiag",
        "conformal_anisotropy",
        "conformal_factor",
        "dF_norm",
        "second_form_difference",
        "mean_curvature",
        "symmetric_pairing",
        "klein_dF_dF",
        "klein_dF_nx",
        "dF_perp_nx",
        "unit_normals",
        "dFpm_perp_npm",
    ];
    let mut report = Report::default();
    for (i, name) in NAMES.iter().enumerate() {
        let stats = node_stats(per_node.iter().map(|p| p[i]).collect());
        report.push(Check::new(*name, stats, tol.get(name)));
    }
    report
}

/// `½ x ω̄` and `−½ ω̄ x` at one node for one direction.
pub fn quaternionic_differentials(x: Vec4, omega: Vec4) -> (Quat, Quat) {
    let xq = Quat::from_vec4(&x);
    let wbar = quat_conj(Quat::from_vec4(&omega));
    (quat_mul(xq, wbar) * 0.5, quat_mul(wbar, xq) * -0.5)
}

fn quat_pair_distance(a: &SplitBivector, left: Quat, right: Quat) -> f64 {
    (a.left - left).norm().max((a.right - right).norm())
}

/// Cross-check of `dF₊ = ½ x ω̄`, `dF₋ = −½ ω̄ x` through the isomorphism
/// Λ²ℍ ≅ Imℍ ⊕ Imℍ, plus `Re(x ω̄) = 0` and `ω̄∧dx = 0 = dx∧ω̄`.
/// `quat_dFm_sign_flipped` compares `−dF₋` with `+½ ω̄ x`.
pub fn quaternionic_check(
    d: &PairDifferentials,
    sp: &SampledPatch,
    omega: &OneForm<Vec4>,
    tol: &Tolerances,
) -> Report {
    let zero = Quat::default();
    let per_node = exec::map_range(d.chart.len(), |k| {
        let x = sp.x.data[k];
        let (ou, ov) = omega.at(k);
        let (dfp, dfm) = (d.dfp.at(k), d.dfm.at(k));
        let mut r = [0.0_f64; 6];
        for (w, fp, fm) in [(ou, dfp.0, dfm.0), (ov, dfp.1, dfm.1)] {
            let (plus, minus) = quaternionic_differentials(x, w);
            r[0] = r[0].max(quat_pair_distance(&to_quat_pair(&fp), plus, zero));
            r[1] = r[1].max(quat_pair_distance(&to_quat_pair(&fm), zero, minus));
            r[2] = r[2].max(quat_pair_distance(&to_quat_pair(&-fm), zero, minus * -1.0));
            r[3] = r[3].max(quat_mul(Quat::from_vec4(&x), quat_conj(Quat::from_vec4(&w))).re.abs());
        }
        let (xu, xv) = sp.dx.at(k);
        let q = |v: Vec4| Quat::from_vec4(&v);
        let (wu, wv) = (quat_conj(q(ou)), quat_conj(q(ov)));
        r[4] = (quat_mul(wu, q(xv)) - quat_mul(wv, q(xu))).norm();
        r[5] = (quat_mul(q(xu), wv) - quat_mul(q(xv), wu)).norm();
        r
    });
    const NAMES: [&str; 6] = [
        "quat_dFp",
        "quat_dFm",
        "quat_dFm_sign_flipped",
        "quat_real_part",
        "quat_wedge_left",
        "quat_wedge_right",
    ];
    let mut report = Report::default();
    for (i, name) in NAMES.iter().enumerate() {
        let stats = node_stats(per_node.iter().map(|p| p[i]).collect());
        report.push(Check::new(*name, stats, tol.get(name)));
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{christoffel_omega, sample, DerivativeMode, IsothermicPatch, Surface};
    use num_complex::Complex64;
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    fn torus_setup(n: usize, c: Complex64) -> (SampledPatch, OneForm<Vec4>) {
        let chart = GridChart::new(0.0, PI, 0.0, PI, n, n).unwrap();
        let patch = IsothermicPatch::new(Surface::homogeneous_torus(FRAC_1_SQRT_2).unwrap(), c).unwrap();
        let sp = sample(&patch, &chart, DerivativeMode::Analytic);
        let omega = christoffel_omega(&sp).unwrap();
        (sp, omega)
    }

    #[test]
    fn torus_differential_is_twice_tangent_wedge_x() {
        let (sp, omega) = torus_setup(9, Complex64::new(1.0, 0.0));
        let df = omega_wedge_x(&omega, &sp.x);
        for k in 0..sp.chart.len() {
            let (xu, xv) = sp.dx.at(k);
            let x = sp.x.data[k];
            assert!((df.du.data[k] - wedge(&xu, &x) * 2.0).norm() < 1e-14);
            assert!((df.dv.data[k] + wedge(&xv, &x) * 2.0).norm() < 1e-14);
        }
    }

    #[test]
    fn torus_metric_is_twice_identity() {
        let (sp, omega) = torus_setup(9, Complex64::new(1.0, 0.0));
        let forms = fundamental_forms(&differentials(&sp, &omega));
        for f in forms.ip.data.iter().chain(&forms.im.data) {
            assert!((*f - QuadraticForm::identity() * 2.0).max_abs() < 1e-13, "{f:?}");
        }
        assert!(forms.degenerate.is_empty());
    }

    #[test]
    fn torus_second_form_difference_is_off_diagonal() {
        let (sp, omega) = torus_setup(9, Complex64::new(1.0, 0.0));
        let forms = fundamental_forms(&differentials(&sp, &omega));
        let expected = QuadraticForm::new(0.0, -2.0 * SQRT_2, 0.0);
        for k in 0..sp.chart.len() {
            let diff = forms.iip.data[k] - forms.iim.data[k];
            assert!((diff - expected).max_abs() < 1e-12, "{diff:?}");
        }
    }

    #[test]
    fn pairing_uv_entry_is_two_on_torus() {
        let (sp, omega) = torus_setup(5, Complex64::new(1.0, 0.0));
        for k in 0..sp.chart.len() {
            let (lhs, rhs) = pairing_sides(omega.at(k), sp.x.data[k], sp.n.data[k], sp.dx.at(k));
            assert!((lhs.uv - 2.0).abs() < 1e-13 && (rhs.uv - 2.0).abs() < 1e-13);
            assert!(lhs.uu.abs() < 1e-13 && lhs.vv.abs() < 1e-13);
        }
    }

    #[test]
    fn base_shift_moves_only_positions() {
        let (sp, omega) = torus_setup(9, Complex64::new(1.0, 0.0));
        let b = Bivector4([0.3, -1.0, 0.2, 0.0, 0.5, 2.0]);
        let p0 = synthesize(&sp, &omega, Bivector4::ZERO).unwrap();
        let p1 = synthesize(&sp, &omega, b).unwrap();
        let (bp, bm) = sd_asd_split(&b);
        for k in 0..sp.chart.len() {
            assert!((p1.fp.data[k] - p0.fp.data[k] - bp).norm() < 1e-12);
            assert!((p1.fm.data[k] - p0.fm.data[k] - bm).norm() < 1e-12);
        }
        assert_eq!(p0.diff.dfp, p1.diff.dfp);
        assert_eq!(p0.forms.iip, p1.forms.iip);
    }

    #[test]
    fn non_closed_input_is_refused() {
        let (sp, omega) = torus_setup(17, Complex64::new(0.0, 1.0));
        assert!(matches!(
            synthesize(&sp, &omega, Bivector4::ZERO),
            Err(crate::error::Error::NotClosed { .. })
        ));
    }

    #[test]
    fn split_quaternionic_derivatives_on_torus() {
        let (sp, omega) = torus_setup(9, Complex64::new(1.0, 0.0));
        let d = differentials(&sp, &omega);
        let report = quaternionic_check(&d, &sp, &omega, &Tolerances::analytic());
        assert!(report.all_pass(), "{report:?}");
    }
}
