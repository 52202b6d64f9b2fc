//! The ℝ^{4,1} light-cone model with `𝔮` as the fifth basis vector
//! (Gram matrix `diag(1, 1, 1, 1, −1)`).
//!
//! A point `y = s + t𝔮` is a [`Vec5`]; a bivector of Λ²ℝ^{4,1} splits as
//! `B + w∧𝔮` with `B ∈ Λ²ℝ⁴` and `w ∈ ℝ⁴` ([`Bivector5`]).

use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::{Matrix5, Vector5};
use serde::{Deserialize, Serialize};

use crate::catalog::QuadraticForm;
use crate::charts::{d_oneform, wedge_vv, Field, FieldValue, GridChart, OneForm};
use crate::error::{Error, Result};
use crate::exec;
use crate::exterior4::{act, wedge, Bivector4, Vec4, BIVECTOR_BASIS};
use crate::report::Stats;

/// Accepted deviation of `|x|` from 1 in [`lift`].
pub const SPHERE_TOL: f64 = 1e-9;
/// Accepted `|⟨ω, x⟩|` in [`assemble_eta`].
pub const ORTHOGONALITY_TOL: f64 = 1e-8;
/// Accepted `max |gᵀGg − G|` for Möbius transformations.
pub const LORENTZ_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Vec5 {
    pub spatial: Vec4,
    pub timelike: f64,
}

impl Vec5 {
    /// The unit timelike vector `𝔮`.
    pub const Q: Vec5 = Vec5 { spatial: Vec4::ZERO, timelike: 1.0 };

    pub fn new(spatial: Vec4, timelike: f64) -> Self {
        Vec5 { spatial, timelike }
    }

    pub fn from_spatial(spatial: Vec4) -> Self {
        Vec5 { spatial, timelike: 0.0 }
    }

    fn to_na(self) -> Vector5<f64> {
        let s = self.spatial.0;
        Vector5::new(s[0], s[1], s[2], s[3], self.timelike)
    }

    fn from_na(v: &Vector5<f64>) -> Self {
        Vec5 { spatial: Vec4::new(v[0], v[1], v[2], v[3]), timelike: v[4] }
    }

    /// Euclidean length of the five coordinates, used for residuals only.
    pub fn coord_norm(&self) -> f64 {
        (self.spatial.norm_sq() + self.timelike * self.timelike).sqrt()
    }
}

impl Add for Vec5 {
    type Output = Vec5;
    fn add(self, o: Vec5) -> Vec5 {
        Vec5 { spatial: self.spatial + o.spatial, timelike: self.timelike + o.timelike }
    }
}

impl Sub for Vec5 {
    type Output = Vec5;
    fn sub(self, o: Vec5) -> Vec5 {
        Vec5 { spatial: self.spatial - o.spatial, timelike: self.timelike - o.timelike }
    }
}

impl Neg for Vec5 {
    type Output = Vec5;
    fn neg(self) -> Vec5 {
        Vec5 { spatial: -self.spatial, timelike: -self.timelike }
    }
}

impl Mul<f64> for Vec5 {
    type Output = Vec5;
    fn mul(self, s: f64) -> Vec5 {
        Vec5 { spatial: self.spatial * s, timelike: self.timelike * s }
    }
}

impl FieldValue for Vec5 {
    fn magnitude(&self) -> f64 {
        self.coord_norm()
    }
}

/// `so4 + translation∧𝔮`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Bivector5 {
    pub so4: Bivector4,
    pub translation: Vec4,
}

impl Bivector5 {
    pub fn new(so4: Bivector4, translation: Vec4) -> Self {
        Bivector5 { so4, translation }
    }

    /// Antisymmetric component matrix `A_ij` = coefficient of `e_i∧e_j`
    /// (index 4 is `𝔮`).
    pub fn component_matrix(&self) -> Matrix5<f64> {
        let mut a = Matrix5::zeros();
        for (k, &(p, q)) in BIVECTOR_BASIS.iter().enumerate() {
            a[(p, q)] = self.so4.0[k];
            a[(q, p)] = -self.so4.0[k];
        }
        for i in 0..4 {
            a[(i, 4)] = self.translation.0[i];
            a[(4, i)] = -self.translation.0[i];
        }
        a
    }

    pub fn from_component_matrix(a: &Matrix5<f64>) -> Self {
        Bivector5 {
            so4: Bivector4(BIVECTOR_BASIS.map(|(p, q)| 0.5 * (a[(p, q)] - a[(q, p)]))),
            translation: Vec4(std::array::from_fn(|i| 0.5 * (a[(i, 4)] - a[(4, i)]))),
        }
    }

    pub fn norm(&self) -> f64 {
        (self.so4.norm_sq() + self.translation.norm_sq()).sqrt()
    }
}

impl Add for Bivector5 {
    type Output = Bivector5;
    fn add(self, o: Bivector5) -> Bivector5 {
        Bivector5 { so4: self.so4 + o.so4, translation: self.translation + o.translation }
    }
}

impl Sub for Bivector5 {
    type Output = Bivector5;
    fn sub(self, o: Bivector5) -> Bivector5 {
        Bivector5 { so4: self.so4 - o.so4, translation: self.translation - o.translation }
    }
}

impl Mul<f64> for Bivector5 {
    type Output = Bivector5;
    fn mul(self, s: f64) -> Bivector5 {
        Bivector5 { so4: self.so4 * s, translation: self.translation * s }
    }
}

impl FieldValue for Bivector5 {
    fn magnitude(&self) -> f64 {
        self.norm()
    }
}

/// Retraction form coefficients `(η_u, η_v)` per node.
pub type EtaField = OneForm<Bivector5>;

pub fn mink_inner(v: &Vec5, w: &Vec5) -> f64 {
    v.spatial.dot(&w.spatial) - v.timelike * w.timelike
}

pub fn wedge5(a: &Vec5, b: &Vec5) -> Bivector5 {
    Bivector5 {
        so4: wedge(&a.spatial, &b.spatial),
        translation: a.spatial * b.timelike - b.spatial * a.timelike,
    }
}

/// `(a∧b)c = ⟨a,c⟩b − ⟨b,c⟩a` on ℝ^{4,1}.
pub fn act5(b: &Bivector5, c: &Vec5) -> Vec5 {
    Vec5 {
        spatial: act(&b.so4, &c.spatial) + b.translation * c.timelike,
        timelike: b.translation.dot(&c.spatial),
    }
}

/// The lift `y = x + 𝔮` normalised by `⟨y, 𝔮⟩ = −1`.
pub fn lift(x: &Vec4) -> Result<Vec5> {
    let norm = x.norm();
    if !((norm - 1.0).abs() <= SPHERE_TOL) {
        return Err(Error::NotOnSphere { norm });
    }
    Ok(Vec5::new(*x, 1.0))
}

/// `η = ω∧x + ω∧𝔮` at every node.
pub fn assemble_eta(omega: &OneForm<Vec4>, x: &Field<Vec4>) -> Result<EtaField> {
    assemble_eta_within(omega, x, ORTHOGONALITY_TOL)
}

/// [`assemble_eta`] with an explicit orthogonality tolerance, for
/// finite-difference input where `⟨ω, x⟩` is only `O(h²)`.
pub fn assemble_eta_within(omega: &OneForm<Vec4>, x: &Field<Vec4>, tolerance: f64) -> Result<EtaField> {
    let chart_shape = (x.nu, x.nv);
    let bad = exec::map_range(x.data.len(), |k| {
        let xk = x.data[k];
        let (ou, ov) = omega.at(k);
        let worst = ou.dot(&xk).abs().max(ov.dot(&xk).abs());
        (!(worst <= tolerance)).then_some((k, worst))
    });
    if let Some((k, value)) = bad.into_iter().flatten().next() {
        let node = crate::error::Node { i: k / chart_shape.1, j: k % chart_shape.1 };
        return Err(Error::NotOrthogonal { node, value });
    }
    let eta_at = |w: Vec4, xk: Vec4| Bivector5 { so4: wedge(&w, &xk), translation: w };
    let pairs = exec::map_range(x.data.len(), |k| {
        let (ou, ov) = omega.at(k);
        (eta_at(ou, x.data[k]), eta_at(ov, x.data[k]))
    });
    Ok(OneForm {
        du: Field { nu: chart_shape.0, nv: chart_shape.1, data: pairs.iter().map(|p| p.0).collect() },
        dv: Field { nu: chart_shape.0, nv: chart_shape.1, data: pairs.iter().map(|p| p.1).collect() },
    })
}

/// Per-node `max_{X,Y} |η(X)dσ(Y) + η(Y)dσ(X) − 2Q(X,Y)σ|` with `σ = x + 𝔮`
/// and `X, Y ∈ {∂u, ∂v}`.
pub fn theorem1_residual(
    eta: &EtaField,
    x: &Field<Vec4>,
    dx: &OneForm<Vec4>,
    q: &Field<QuadraticForm>,
) -> Stats {
    let values = exec::map_range(x.data.len(), |k| {
        let sigma = Vec5::new(x.data[k], 1.0);
        let (eu, ev) = eta.at(k);
        let (xu, xv) = dx.at(k);
        let (su, sv) = (Vec5::from_spatial(xu), Vec5::from_spatial(xv));
        let qk = q.data[k];
        let uu = act5(&eu, &su) * 2.0 - sigma * (2.0 * qk.uu);
        let uv = act5(&eu, &sv) + act5(&ev, &su) - sigma * (2.0 * qk.uv);
        let vv = act5(&ev, &sv) * 2.0 - sigma * (2.0 * qk.vv);
        uu.coord_norm().max(uv.coord_norm()).max(vv.coord_norm())
    });
    Stats::of(&values)
}

/// Finite-difference closure of `η` and its two pieces.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EtaClosure {
    /// `|dη|` from differencing the Λ²ℝ^{4,1} coefficients.
    pub d_eta: Stats,
    /// `|dω|`, the `ℝ⁴∧𝔮` component of `dη`.
    pub d_omega: Stats,
    /// `|d(ω∧x)|`, the Λ²ℝ⁴ component of `dη`.
    pub d_omega_wedge_x: Stats,
    /// `|ω⋏dx|` pointwise (algebraic).
    pub omega_wedge_dx: Stats,
}

pub fn eta_closure_residual(eta: &EtaField, dx: &OneForm<Vec4>, chart: &GridChart) -> EtaClosure {
    eta_closure_residual_within(eta, dx, chart, 0)
}

/// [`eta_closure_residual`] with the differential pieces restricted to nodes
/// at least `margin` from the boundary; `ω⋏dx` is always taken everywhere.
pub fn eta_closure_residual_within(
    eta: &EtaField,
    dx: &OneForm<Vec4>,
    chart: &GridChart,
    margin: usize,
) -> EtaClosure {
    let d_eta = d_oneform(eta, chart).interior(margin);
    let omega = eta.map(|b| b.translation);
    let omega_wedge_dx = wedge_vv(&omega, dx);
    let pick = |f: &dyn Fn(&Bivector5) -> f64| Stats::of(&d_eta.iter().map(f).collect::<Vec<_>>());
    EtaClosure {
        d_eta: pick(&|b| b.norm()),
        d_omega: pick(&|b| b.translation.norm()),
        d_omega_wedge_x: pick(&|b| b.so4.norm()),
        omega_wedge_dx: Stats::of(
            &omega_wedge_dx.coeff.data.iter().map(|b| b.norm()).collect::<Vec<_>>(),
        ),
    }
}

fn gram() -> Matrix5<f64> {
    Matrix5::from_diagonal(&Vector5::new(1.0, 1.0, 1.0, 1.0, -1.0))
}

/// Element of O(4,1) acting on ℝ^{4,1} (and by conjugation on Λ²ℝ^{4,1}).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mobius(Matrix5<f64>);

impl Mobius {
    pub fn new(m: Matrix5<f64>) -> Result<Self> {
        let g = gram();
        let defect = (m.transpose() * g * m - g).amax();
        if !(defect <= LORENTZ_TOL) {
            return Err(Error::NotLorentzian { defect });
        }
        Ok(Mobius(m))
    }

    pub fn identity() -> Self {
        Mobius(Matrix5::identity())
    }

    /// Embeds an orthogonal 4×4 matrix as a transformation fixing `𝔮`.
    pub fn rotation(r: &nalgebra::Matrix4<f64>) -> Result<Self> {
        let mut m = Matrix5::identity();
        m.fixed_view_mut::<4, 4>(0, 0).copy_from(r);
        Mobius::new(m)
    }

    /// Boost in the `(e_axis, 𝔮)` plane with the given rapidity.
    pub fn boost(axis: usize, rapidity: f64) -> Self {
        let mut m = Matrix5::identity();
        let (c, s) = (rapidity.cosh(), rapidity.sinh());
        m[(axis, axis)] = c;
        m[(4, 4)] = c;
        m[(axis, 4)] = s;
        m[(4, axis)] = s;
        Mobius(m)
    }

    pub fn compose(&self, other: &Mobius) -> Mobius {
        Mobius(self.0 * other.0)
    }

    pub fn matrix(&self) -> &Matrix5<f64> {
        &self.0
    }

    pub fn apply(&self, v: &Vec5) -> Vec5 {
        Vec5::from_na(&(self.0 * v.to_na()))
    }

    /// `Ad_g B = g B g⁻¹`, i.e. `ga∧gb` on decomposables.
    pub fn adjoint(&self, b: &Bivector5) -> Bivector5 {
        Bivector5::from_component_matrix(&(self.0 * b.component_matrix() * self.0.transpose()))
    }

    /// Image of `x ∈ S³` and of tangent vectors at `x` under the projective
    /// action, renormalised to the affine chart `⟨y, 𝔮⟩ = −1`. Returns `None`
    /// when the image lies at infinity of the chart.
    pub fn apply_point(&self, x: &Vec4, tangents: &[Vec4]) -> Option<(Vec4, Vec<Vec4>)> {
        let y = self.apply(&Vec5::new(*x, 1.0));
        if y.timelike.abs() < 1e-12 {
            return None;
        }
        let t = y.timelike;
        let image = y.spatial * (1.0 / t);
        let pushed = tangents
            .iter()
            .map(|v| {
                let dy = self.apply(&Vec5::from_spatial(*v));
                (dy.spatial * t - y.spatial * dy.timelike) * (1.0 / (t * t))
            })
            .collect();
        Some((image, pushed))
    }
}

/// `x' = g·x` renormalised; errors name the first node sent to infinity.
pub fn mobius_apply(g: &Mobius, x: &Field<Vec4>) -> Result<Field<Vec4>> {
    let images = exec::map_range(x.data.len(), |k| g.apply_point(&x.data[k], &[]).map(|p| p.0));
    let mut data = Vec::with_capacity(images.len());
    for (k, img) in images.into_iter().enumerate() {
        match img {
            Some(p) => data.push(p),
            None => {
                let node = crate::error::Node { i: k / x.nv, j: k % x.nv };
                return Err(Error::AtInfinity { node });
            }
        }
    }
    Ok(Field { nu: x.nu, nv: x.nv, data })
}

/// `x'` together with its pushed-forward differential.
pub fn mobius_apply_with_differential(
    g: &Mobius,
    x: &Field<Vec4>,
    dx: &OneForm<Vec4>,
) -> Result<(Field<Vec4>, OneForm<Vec4>)> {
    let images = exec::map_range(x.data.len(), |k| {
        let (xu, xv) = dx.at(k);
        g.apply_point(&x.data[k], &[xu, xv])
    });
    let (mut xs, mut us, mut vs) = (Vec::new(), Vec::new(), Vec::new());
    for (k, img) in images.into_iter().enumerate() {
        let (p, t) = img.ok_or(Error::AtInfinity {
            node: crate::error::Node { i: k / x.nv, j: k % x.nv },
        })?;
        xs.push(p);
        us.push(t[0]);
        vs.push(t[1]);
    }
    let shape = |data| Field { nu: x.nu, nv: x.nv, data };
    Ok((shape(xs), OneForm { du: shape(us), dv: shape(vs) }))
}

pub fn adjoint_action(g: &Mobius, eta: &EtaField) -> EtaField {
    eta.map(|b| g.adjoint(b))
}
