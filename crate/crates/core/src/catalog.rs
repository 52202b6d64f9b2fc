//! Closed-form isothermic surfaces `x: Σ → S³ ⊂ ℝ⁴` in conformal
//! curvature-line coordinates, and their Christoffel-dual 1-form.
//!
//! Every surface is parametrised so that `⟨x_u, x_u⟩ = ⟨x_v, x_v⟩ = e^{2φ}`,
//! `⟨x_u, x_v⟩ = 0`. The unit normal `n` in S³ is oriented by
//! `det(x_u, x_v, x, n) > 0`.

use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::charts::{d_scalar, Field, FieldValue, GridChart, OneForm, TwoForm};
use crate::error::{Error, Result};
use crate::exec;
use crate::exterior4::{det4, wedge, Bivector4, Vec4};

/// Symmetric bilinear form in the `(∂u, ∂v)` frame.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct QuadraticForm {
    pub uu: f64,
    pub uv: f64,
    pub vv: f64,
}

impl QuadraticForm {
    pub const fn new(uu: f64, uv: f64, vv: f64) -> Self {
        QuadraticForm { uu, uv, vv }
    }

    pub fn identity() -> Self {
        QuadraticForm::new(1.0, 0.0, 1.0)
    }

    /// Symmetric part of a general 2×2 matrix `[[uu, uv], [vu, vv]]`.
    pub fn symmetrize(m: [[f64; 2]; 2]) -> Self {
        QuadraticForm::new(m[0][0], 0.5 * (m[0][1] + m[1][0]), m[1][1])
    }

    pub fn det(&self) -> f64 {
        self.uu * self.vv - self.uv * self.uv
    }

    pub fn trace(&self) -> f64 {
        self.uu + self.vv
    }

    /// `tr(metric⁻¹ · self)`; `None` when the metric is singular.
    pub fn trace_wrt(&self, metric: &QuadraticForm) -> Option<f64> {
        let det = metric.det();
        if det == 0.0 || !det.is_finite() {
            return None;
        }
        Some((metric.vv * self.uu - 2.0 * metric.uv * self.uv + metric.uu * self.vv) / det)
    }

    pub fn max_abs(&self) -> f64 {
        self.uu.abs().max(self.uv.abs()).max(self.vv.abs())
    }

    pub fn as_matrix(&self) -> [[f64; 2]; 2] {
        [[self.uu, self.uv], [self.uv, self.vv]]
    }
}

impl Add for QuadraticForm {
    type Output = QuadraticForm;
    fn add(self, o: QuadraticForm) -> QuadraticForm {
        QuadraticForm::new(self.uu + o.uu, self.uv + o.uv, self.vv + o.vv)
    }
}

impl Sub for QuadraticForm {
    type Output = QuadraticForm;
    fn sub(self, o: QuadraticForm) -> QuadraticForm {
        QuadraticForm::new(self.uu - o.uu, self.uv - o.uv, self.vv - o.vv)
    }
}

impl Mul<f64> for QuadraticForm {
    type Output = QuadraticForm;
    fn mul(self, s: f64) -> QuadraticForm {
        QuadraticForm::new(self.uu * s, self.uv * s, self.vv * s)
    }
}

impl FieldValue for QuadraticForm {
    fn magnitude(&self) -> f64 {
        self.max_abs()
    }
}

/// `Q = 2 Re q` for `q = c dz²`, `z = u + iv`.
pub fn quadratic_differential(c: Complex64) -> QuadraticForm {
    QuadraticForm::new(2.0 * c.re, -2.0 * c.im, -2.0 * c.re)
}

/// `Re(i q)` for `q = c dz²`.
pub fn re_iq(c: Complex64) -> QuadraticForm {
    QuadraticForm::new(-c.im, -c.re, c.im)
}

/// Inverts [`re_iq`]: the `c` with `Re(i c dz²) = m` (trace-free part of `m`).
pub fn c_from_re_iq(m: &QuadraticForm) -> Complex64 {
    Complex64::new(-m.uv, 0.5 * (m.vv - m.uu))
}

/// Analytic jet of a surface at one parameter point.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SurfacePoint {
    pub x: Vec4,
    pub xu: Vec4,
    pub xv: Vec4,
    pub xuu: Vec4,
    pub xuv: Vec4,
    pub xvv: Vec4,
    pub n: Vec4,
    pub nu: Vec4,
    pub nv: Vec4,
}

impl SurfacePoint {
    pub fn conformal_factor(&self) -> f64 {
        0.5 * (self.xu.norm_sq() + self.xv.norm_sq())
    }

    fn oriented(mut self) -> Self {
        if det4(&self.xu, &self.xv, &self.x, &self.n) < 0.0 {
            self.n = -self.n;
            self.nu = -self.nu;
            self.nv = -self.nv;
        }
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case")]
pub enum Surface {
    /// `(r cos(u/r), r sin(u/r), s cos(v/s), s sin(v/s))`, `s = √(1 − r²)`.
    HomogeneousTorus { r: f64 },
    /// Inverse stereographic image of the cylinder of radius `rho` about the
    /// third axis of ℝ³.
    StereoCylinder { rho: f64 },
    /// Inverse stereographic image of the plane `x₃ = 0`: a great 2-sphere.
    GreatSphere,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ParamInfo {
    pub name: &'static str,
    pub range: &'static str,
    pub default: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SurfaceInfo {
    pub name: &'static str,
    pub params: Vec<ParamInfo>,
    pub description: &'static str,
}

pub fn registry() -> Vec<SurfaceInfo> {
    vec![
        SurfaceInfo {
            name: "homogeneous_torus",
            params: vec![ParamInfo {
                name: "r",
                range: "(0,1)",
                default: std::f64::consts::FRAC_1_SQRT_2,
            }],
            description: "flat torus in S3 with radii r and sqrt(1-r^2); Clifford torus at r=1/sqrt(2)",
        },
        SurfaceInfo {
            name: "stereo_cylinder",
            params: vec![ParamInfo { name: "rho", range: "(0,inf)", default: 1.0 }],
            description: "inverse stereographic image of a round cylinder of radius rho",
        },
        SurfaceInfo {
            name: "great_sphere",
            params: vec![],
            description: "totally umbilic great 2-sphere (inverse stereographic image of a plane)",
        },
    ]
}

impl Surface {
    pub fn homogeneous_torus(r: f64) -> Result<Self> {
        if !(r > 0.0 && r < 1.0) {
            return Err(Error::InvalidParameter(format!("homogeneous_torus needs r in (0,1), got {r}")));
        }
        Ok(Surface::HomogeneousTorus { r })
    }

    pub fn stereo_cylinder(rho: f64) -> Result<Self> {
        if !(rho > 0.0 && rho.is_finite()) {
            return Err(Error::InvalidParameter(format!("stereo_cylinder needs rho > 0, got {rho}")));
        }
        Ok(Surface::StereoCylinder { rho })
    }

    /// Looks a surface up by registry name; missing parameters take defaults.
    pub fn from_name(name: &str, params: &[(String, f64)]) -> Result<Self> {
        let info = registry()
            .into_iter()
            .find(|s| s.name == name)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown surface '{name}'")))?;
        for (k, _) in params {
            if !info.params.iter().any(|p| p.name == k) {
                return Err(Error::InvalidParameter(format!("surface '{name}' has no parameter '{k}'")));
            }
        }
        let get = |key: &str| {
            params.iter().rev().find(|(k, _)| k == key).map(|p| p.1).unwrap_or_else(|| {
                info.params.iter().find(|p| p.name == key).map(|p| p.default).unwrap_or(0.0)
            })
        };
        match name {
            "homogeneous_torus" => Surface::homogeneous_torus(get("r")),
            "stereo_cylinder" => Surface::stereo_cylinder(get("rho")),
            _ => Ok(Surface::GreatSphere),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Surface::HomogeneousTorus { .. } => "homogeneous_torus",
            Surface::StereoCylinder { .. } => "stereo_cylinder",
            Surface::GreatSphere => "great_sphere",
        }
    }

    /// Whether `q = c dz²` gives a closed Christoffel form for every `c`
    /// (umbilic surfaces) or only for real `c` (curvature lines along u, v).
    pub fn admits_complex_q(&self) -> bool {
        matches!(self, Surface::GreatSphere)
    }

    pub fn eval(&self, u: f64, v: f64) -> SurfacePoint {
        let p = match *self {
            Surface::HomogeneousTorus { r } => torus(r, u, v),
            Surface::StereoCylinder { rho } => {
                let (sa, ca) = (u / rho).sin_cos();
                inverse_stereographic(&SpaceJet {
                    x: [rho * ca, rho * sa, v],
                    xu: [-sa, ca, 0.0],
                    xv: [0.0, 0.0, 1.0],
                    xuu: [-ca / rho, -sa / rho, 0.0],
                    xuv: [0.0; 3],
                    xvv: [0.0; 3],
                    n: [ca, sa, 0.0],
                    nu: [-sa / rho, ca / rho, 0.0],
                    nv: [0.0; 3],
                })
            }
            Surface::GreatSphere => inverse_stereographic(&SpaceJet {
                x: [u, v, 0.0],
                xu: [1.0, 0.0, 0.0],
                xv: [0.0, 1.0, 0.0],
                xuu: [0.0; 3],
                xuv: [0.0; 3],
                xvv: [0.0; 3],
                n: [0.0, 0.0, 1.0],
                nu: [0.0; 3],
                nv: [0.0; 3],
            }),
        };
        p.oriented()
    }
}

fn torus(r: f64, u: f64, v: f64) -> SurfacePoint {
    let s = (1.0 - r * r).sqrt();
    let (sa, ca) = (u / r).sin_cos();
    let (sb, cb) = (v / s).sin_cos();
    SurfacePoint {
        x: Vec4::new(r * ca, r * sa, s * cb, s * sb),
        xu: Vec4::new(-sa, ca, 0.0, 0.0),
        xv: Vec4::new(0.0, 0.0, -sb, cb),
        xuu: Vec4::new(-ca / r, -sa / r, 0.0, 0.0),
        xuv: Vec4::ZERO,
        xvv: Vec4::new(0.0, 0.0, -cb / s, -sb / s),
        n: Vec4::new(s * ca, s * sa, -r * cb, -r * sb),
        nu: Vec4::new(-s / r * sa, s / r * ca, 0.0, 0.0),
        nv: Vec4::new(0.0, 0.0, r / s * sb, -r / s * cb),
    }
}

/// Second-order jet of a surface in ℝ³ with its unit normal.
struct SpaceJet {
    x: [f64; 3],
    xu: [f64; 3],
    xv: [f64; 3],
    xuu: [f64; 3],
    xuv: [f64; 3],
    xvv: [f64; 3],
    n: [f64; 3],
    nu: [f64; 3],
    nv: [f64; 3],
}

fn dot3(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// `X ↦ (A X, 1 − A)` with `A = 2 / (1 + |X|²)`, pushed through the jet.
/// The normal maps to `(N − A⟨X,N⟩X, A⟨X,N⟩)`.
fn inverse_stereographic(j: &SpaceJet) -> SurfacePoint {
    let d = 1.0 + dot3(&j.x, &j.x);
    let a = 2.0 / d;
    let d_t = |xt: &[f64; 3]| 2.0 * dot3(&j.x, xt);
    let (du, dv) = (d_t(&j.xu), d_t(&j.xv));
    let d_ts = |xs: &[f64; 3], xt: &[f64; 3], xst: &[f64; 3]| 2.0 * (dot3(xs, xt) + dot3(&j.x, xst));
    let (duu, duv, dvv) =
        (d_ts(&j.xu, &j.xu, &j.xuu), d_ts(&j.xu, &j.xv, &j.xuv), d_ts(&j.xv, &j.xv, &j.xvv));
    let a_t = |dt: f64| -2.0 * dt / (d * d);
    let a_ts = |dts: f64, dt: f64, ds: f64| -2.0 * dts / (d * d) + 4.0 * dt * ds / (d * d * d);
    let (au, av) = (a_t(du), a_t(dv));
    let (auu, auv, avv) = (a_ts(duu, du, du), a_ts(duv, du, dv), a_ts(dvv, dv, dv));

    let lin = |terms: &[(f64, &[f64; 3])], last: f64| {
        let mut out = [0.0; 3];
        for (c, v) in terms {
            for k in 0..3 {
                out[k] += c * v[k];
            }
        }
        Vec4::new(out[0], out[1], out[2], last)
    };

    let x = lin(&[(a, &j.x)], 1.0 - a);
    let xu = lin(&[(au, &j.x), (a, &j.xu)], -au);
    let xv = lin(&[(av, &j.x), (a, &j.xv)], -av);
    let xuu = lin(&[(auu, &j.x), (2.0 * au, &j.xu), (a, &j.xuu)], -auu);
    let xuv = lin(&[(auv, &j.x), (au, &j.xv), (av, &j.xu), (a, &j.xuv)], -auv);
    let xvv = lin(&[(avv, &j.x), (2.0 * av, &j.xv), (a, &j.xvv)], -avv);

    let p = dot3(&j.x, &j.n);
    let b = a * p;
    let p_t = |xt: &[f64; 3], nt: &[f64; 3]| dot3(xt, &j.n) + dot3(&j.x, nt);
    let bu = au * p + a * p_t(&j.xu, &j.nu);
    let bv = av * p + a * p_t(&j.xv, &j.nv);
    let n = lin(&[(1.0, &j.n), (-b, &j.x)], b);
    let nu = lin(&[(1.0, &j.nu), (-bu, &j.x), (-b, &j.xu)], bu);
    let nv = lin(&[(1.0, &j.nv), (-bv, &j.x), (-b, &j.xv)], bv);

    SurfacePoint { x, xu, xv, xuu, xuv, xvv, n, nu, nv }
}

/// Surface together with its quadratic differential `q = c dz²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IsothermicPatch {
    pub surface: Surface,
    pub c: Complex64,
}

impl IsothermicPatch {
    pub fn new(surface: Surface, c: Complex64) -> Result<Self> {
        if c == Complex64::new(0.0, 0.0) || !c.is_finite() {
            return Err(Error::ZeroQuadraticDifferential);
        }
        Ok(IsothermicPatch { surface, c })
    }

    pub fn q(&self) -> QuadraticForm {
        quadratic_differential(self.c)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DerivativeMode {
    Analytic,
    FiniteDifference,
}

/// A patch sampled on a chart: positions, normals, their differentials and
/// the conformal factor `e^{2φ}`.
#[derive(Debug, Clone)]
pub struct SampledPatch {
    pub chart: GridChart,
    pub c: Complex64,
    pub x: Field<Vec4>,
    pub dx: OneForm<Vec4>,
    pub n: Field<Vec4>,
    pub dn: OneForm<Vec4>,
    pub conformal: Field<f64>,
    pub deriv: DerivativeMode,
}

impl SampledPatch {
    /// Boundary rings excluded from exterior-derivative residuals. Nested
    /// one-sided stencils are only first order there when `dx` itself is a
    /// finite difference.
    pub fn closure_margin(&self) -> usize {
        match self.deriv {
            DerivativeMode::Analytic => 0,
            DerivativeMode::FiniteDifference => 2,
        }
    }

    pub fn q(&self) -> QuadraticForm {
        quadratic_differential(self.c)
    }
}

pub fn sample(patch: &IsothermicPatch, chart: &GridChart, mode: DerivativeMode) -> SampledPatch {
    let points = Field::from_fn(chart, |u, v| patch.surface.eval(u, v));
    let x = points.map(|p| p.x);
    let n = points.map(|p| p.n);
    let (dx, dn) = match mode {
        DerivativeMode::Analytic => (
            OneForm { du: points.map(|p| p.xu), dv: points.map(|p| p.xv) },
            OneForm { du: points.map(|p| p.nu), dv: points.map(|p| p.nv) },
        ),
        DerivativeMode::FiniteDifference => (d_scalar(&x, chart), d_scalar(&n, chart)),
    };
    let conformal = Field::from_nodes(chart, |k| {
        let (xu, xv) = dx.at(k);
        0.5 * (xu.norm_sq() + xv.norm_sq())
    });
    SampledPatch { chart: *chart, c: patch.c, x, dx, n, dn, conformal, deriv: mode }
}

/// `ω = dx∘Q♯` with `Q♯ = e^{−2φ}(2Re c, −2Im c; −2Im c, −2Re c)`.
pub fn christoffel_omega(sp: &SampledPatch) -> Result<OneForm<Vec4>> {
    if sp.c == Complex64::new(0.0, 0.0) {
        return Err(Error::ZeroQuadraticDifferential);
    }
    let q = sp.q();
    Ok(OneForm::from_nodes(&sp.chart, |k| {
        let (xu, xv) = sp.dx.at(k);
        let inv = 1.0 / sp.conformal.data[k];
        ((xu * q.uu + xv * q.uv) * inv, (xu * q.uv + xv * q.vv) * inv)
    }))
}

/// Full (unsymmetrised) matrix `⟨α(X), β(Y)⟩`, rows X, columns Y.
pub fn pairing(alpha: &OneForm<Vec4>, beta: &OneForm<Vec4>) -> Vec<[[f64; 2]; 2]> {
    exec::map_range(alpha.du.data.len(), |k| {
        let (au, av) = alpha.at(k);
        let (bu, bv) = beta.at(k);
        [[au.dot(&bu), au.dot(&bv)], [av.dot(&bu), av.dot(&bv)]]
    })
}

pub fn first_fundamental_form(sp: &SampledPatch) -> Field<QuadraticForm> {
    Field::from_nodes(&sp.chart, |k| {
        let (xu, xv) = sp.dx.at(k);
        QuadraticForm::new(xu.dot(&xu), xu.dot(&xv), xv.dot(&xv))
    })
}

/// `II(X,Y) = −⟨dx(X), dn(Y)⟩`, symmetrised.
pub fn second_fundamental_form_s3(sp: &SampledPatch) -> Field<QuadraticForm> {
    let m = pairing(&sp.dx, &sp.dn);
    Field::from_nodes(&sp.chart, |k| QuadraticForm::symmetrize(m[k]) * -1.0)
}

pub fn shape_data(sp: &SampledPatch) -> OneForm<Vec4> {
    sp.dn.clone()
}

/// Exact `dω` and `d(ω∧x)` from second derivatives, the latter by the
/// product rule on each coefficient.
pub struct AnalyticClosure {
    pub d_omega: TwoForm<Vec4>,
    pub d_omega_wedge_x: TwoForm<Bivector4>,
}

pub fn analytic_closure(patch: &IsothermicPatch, chart: &GridChart) -> AnalyticClosure {
    let q = patch.q();
    let per_node = exec::map_range(chart.len(), |k| {
        let node = chart.node(k);
        let (u, v) = chart.param(node.i, node.j);
        let p = patch.surface.eval(u, v);
        let g = p.xu.norm_sq();
        let gu = 2.0 * p.xuu.dot(&p.xu);
        let gv = 2.0 * p.xuv.dot(&p.xu);
        let omega_u = (p.xu * q.uu + p.xv * q.uv) * (1.0 / g);
        let omega_v = (p.xu * q.uv + p.xv * q.vv) * (1.0 / g);
        // ∂_v ω_u and ∂_u ω_v
        let dv_omega_u = (p.xuv * q.uu + p.xvv * q.uv) * (1.0 / g) - omega_u * (gv / g);
        let du_omega_v = (p.xuu * q.uv + p.xuv * q.vv) * (1.0 / g) - omega_v * (gu / g);
        let d_omega = du_omega_v - dv_omega_u;
        let d_wedge = (wedge(&du_omega_v, &p.x) + wedge(&omega_v, &p.xu))
            - (wedge(&dv_omega_u, &p.x) + wedge(&omega_u, &p.xv));
        (d_omega, d_wedge)
    });
    let field = |data| Field { nu: chart.nu, nv: chart.nv, data };
    AnalyticClosure {
        d_omega: TwoForm { coeff: field(per_node.iter().map(|p| p.0).collect()) },
        d_omega_wedge_x: TwoForm {
            coeff: Field { nu: chart.nu, nv: chart.nv, data: per_node.iter().map(|p| p.1).collect() },
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    fn surfaces() -> Vec<Surface> {
        vec![
            Surface::homogeneous_torus(FRAC_1_SQRT_2).unwrap(),
            Surface::homogeneous_torus(0.3).unwrap(),
            Surface::stereo_cylinder(0.7).unwrap(),
            Surface::GreatSphere,
        ]
    }

    #[test]
    fn parameter_validation() {
        assert!(Surface::homogeneous_torus(1.0).is_err());
        assert!(Surface::homogeneous_torus(0.0).is_err());
        assert!(Surface::stereo_cylinder(0.0).is_err());
        assert!(Surface::from_name("klein_bottle", &[]).is_err());
        assert!(Surface::from_name("great_sphere", &[("r".into(), 0.5)]).is_err());
        assert_eq!(
            Surface::from_name("homogeneous_torus", &[("r".into(), 0.5)]).unwrap(),
            Surface::HomogeneousTorus { r: 0.5 }
        );
        let s = Surface::GreatSphere;
        assert!(IsothermicPatch::new(s, Complex64::new(0.0, 0.0)).is_err());
    }

    #[test]
    fn patch_invariants_hold() {
        for s in surfaces() {
            for &(u, v) in &[(0.0, 0.0), (0.3, 1.7), (2.9, -0.4), (PI, PI)] {
                let p = s.eval(u, v);
                let g = p.xu.norm_sq();
                let checks = [
                    p.x.norm() - 1.0,
                    p.xu.dot(&p.x),
                    p.xv.dot(&p.x),
                    p.xv.norm_sq() - g,
                    p.xu.dot(&p.xv),
                    p.n.norm() - 1.0,
                    p.n.dot(&p.x),
                    p.n.dot(&p.xu),
                    p.n.dot(&p.xv),
                    p.n.dot(&p.nu),
                    p.n.dot(&p.nv),
                ];
                for (i, c) in checks.iter().enumerate() {
                    assert!(c.abs() < 1e-12, "{} check {i} at ({u},{v}): {c}", s.name());
                }
                let det = det4(&(p.xu * (1.0 / g.sqrt())), &(p.xv * (1.0 / g.sqrt())), &p.x, &p.n);
                assert!((det - 1.0).abs() < 1e-12, "{} orientation {det}", s.name());
            }
        }
    }

    #[test]
    fn second_derivatives_match_differences() {
        let h = 1e-5;
        for s in surfaces() {
            let (u, v) = (0.4, 0.9);
            let p = s.eval(u, v);
            let fd = |a: Vec4, b: Vec4| (a - b) * (0.5 / h);
            let pu = (s.eval(u + h, v), s.eval(u - h, v));
            let pv = (s.eval(u, v + h), s.eval(u, v - h));
            let pairs = [
                (p.xu, fd(pu.0.x, pu.1.x)),
                (p.xv, fd(pv.0.x, pv.1.x)),
                (p.xuu, fd(pu.0.xu, pu.1.xu)),
                (p.xuv, fd(pv.0.xu, pv.1.xu)),
                (p.xvv, fd(pv.0.xv, pv.1.xv)),
                (p.nu, fd(pu.0.n, pu.1.n)),
                (p.nv, fd(pv.0.n, pv.1.n)),
            ];
            for (i, (a, b)) in pairs.iter().enumerate() {
                assert!((*a - *b).norm() < 1e-8, "{} jet {i}: {:?} vs {:?}", s.name(), a, b);
            }
        }
    }

    #[test]
    fn clifford_torus_is_flat_with_vanishing_mixed_derivative() {
        let s = Surface::homogeneous_torus(FRAC_1_SQRT_2).unwrap();
        let p = s.eval(0.7, 2.1);
        assert!((p.conformal_factor() - 1.0).abs() < 1e-15);
        assert_eq!(p.xuv, Vec4::ZERO);
    }

    #[test]
    fn quadratic_differential_entries() {
        let c = Complex64::new(0.5, -1.5);
        let q = quadratic_differential(c);
        assert_eq!(q, QuadraticForm::new(1.0, 3.0, -1.0));
        assert_eq!(re_iq(Complex64::new(1.0, 0.0)), QuadraticForm::new(0.0, -1.0, 0.0));
        assert_eq!(c_from_re_iq(&re_iq(c)), c);
    }

    #[test]
    fn christoffel_form_on_torus() {
        let chart = GridChart::new(0.0, PI, 0.0, PI, 9, 9).unwrap();
        let patch =
            IsothermicPatch::new(Surface::homogeneous_torus(0.6).unwrap(), Complex64::new(1.0, 0.0))
                .unwrap();
        let sp = sample(&patch, &chart, DerivativeMode::Analytic);
        let omega = christoffel_omega(&sp).unwrap();
        for k in 0..chart.len() {
            let (ou, ov) = omega.at(k);
            let (xu, xv) = sp.dx.at(k);
            assert!((ou - xu * 2.0).norm() < 1e-14);
            assert!((ov + xv * 2.0).norm() < 1e-14);
        }
    }

    #[test]
    fn torus_second_fundamental_form_is_diagonal() {
        let chart = GridChart::new(0.0, PI, 0.0, PI, 7, 7).unwrap();
        let patch =
            IsothermicPatch::new(Surface::homogeneous_torus(0.4).unwrap(), Complex64::new(1.0, 0.0))
                .unwrap();
        let sp = sample(&patch, &chart, DerivativeMode::Analytic);
        let ii = second_fundamental_form_s3(&sp);
        assert!(ii.data.iter().all(|f| f.uv.abs() < 1e-12));
        assert!(ii.data.iter().all(|f| (f.uu - f.vv).abs() > 0.1));
    }

    #[test]
    fn great_sphere_is_umbilic() {
        let chart = GridChart::new(-1.0, 2.0, -0.5, 1.0, 7, 7).unwrap();
        let patch = IsothermicPatch::new(Surface::GreatSphere, Complex64::new(0.3, 1.0)).unwrap();
        let sp = sample(&patch, &chart, DerivativeMode::Analytic);
        let ii = second_fundamental_form_s3(&sp);
        let first = first_fundamental_form(&sp);
        for (a, b) in ii.data.iter().zip(&first.data) {
            let lambda = a.trace() / b.trace();
            assert!((*a - *b * lambda).max_abs() < 1e-10);
        }
    }
}
