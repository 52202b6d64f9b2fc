//! Sampled fields on rectangular parameter charts and their calculus.
//!
//! Grids are node-centred and include the boundary. Storage is row-major in
//! u: node `(i, j)` lives at `i * nv + j`. Derivatives are second-order
//! central differences in the interior and second-order one-sided stencils on
//! the boundary.

use std::ops::{Add, Mul, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Node, Result};
use crate::exec;
use crate::exterior4::{wedge, Bivector4, Quat, Vec4};

/// Values a [`Field`] may hold.
pub trait FieldValue:
    Copy + Default + Send + Sync + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self>
{
    /// Norm used for residuals.
    fn magnitude(&self) -> f64;
}

impl FieldValue for f64 {
    fn magnitude(&self) -> f64 {
        self.abs()
    }
}

impl FieldValue for Vec4 {
    fn magnitude(&self) -> f64 {
        self.norm()
    }
}

impl FieldValue for Bivector4 {
    fn magnitude(&self) -> f64 {
        self.norm()
    }
}

impl FieldValue for Quat {
    fn magnitude(&self) -> f64 {
        self.norm()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridChart {
    pub u0: f64,
    pub u1: f64,
    pub v0: f64,
    pub v1: f64,
    pub nu: usize,
    pub nv: usize,
}

impl GridChart {
    pub fn new(u0: f64, u1: f64, v0: f64, v1: f64, nu: usize, nv: usize) -> Result<Self> {
        if !(u0.is_finite() && u1.is_finite() && v0.is_finite() && v1.is_finite()) {
            return Err(Error::InvalidChart("non-finite bounds".into()));
        }
        if u1 <= u0 || v1 <= v0 {
            return Err(Error::InvalidChart(format!(
                "empty rectangle [{u0}, {u1}] x [{v0}, {v1}]"
            )));
        }
        if nu < 3 || nv < 3 {
            return Err(Error::InvalidChart(format!("need at least 3x3 nodes, got {nu}x{nv}")));
        }
        Ok(GridChart { u0, u1, v0, v1, nu, nv })
    }

    /// Same rectangle, node counts `2n − 1` (spacing halved).
    pub fn refined(&self) -> GridChart {
        GridChart { nu: 2 * self.nu - 1, nv: 2 * self.nv - 1, ..*self }
    }

    pub fn hu(&self) -> f64 {
        (self.u1 - self.u0) / (self.nu - 1) as f64
    }

    pub fn hv(&self) -> f64 {
        (self.v1 - self.v0) / (self.nv - 1) as f64
    }

    pub fn h(&self) -> f64 {
        self.hu().max(self.hv())
    }

    pub fn len(&self) -> usize {
        self.nu * self.nv
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        i * self.nv + j
    }

    pub fn node(&self, k: usize) -> Node {
        Node { i: k / self.nv, j: k % self.nv }
    }

    pub fn param(&self, i: usize, j: usize) -> (f64, f64) {
        (self.u0 + i as f64 * self.hu(), self.v0 + j as f64 * self.hv())
    }

    /// Boustrophedon order: along u on v-row 0, back along u on v-row 1, ...
    pub fn serpentine(&self) -> Vec<Node> {
        let mut out = Vec::with_capacity(self.len());
        for j in 0..self.nv {
            if j % 2 == 0 {
                out.extend((0..self.nu).map(|i| Node { i, j }));
            } else {
                out.extend((0..self.nu).rev().map(|i| Node { i, j }));
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Field<T> {
    pub nu: usize,
    pub nv: usize,
    pub data: Vec<T>,
}

impl<T: Copy + Send + Sync> Field<T> {
    pub fn from_fn<F>(chart: &GridChart, f: F) -> Self
    where
        F: Fn(f64, f64) -> T + Sync + Send,
    {
        let data = exec::map_range(chart.len(), |k| {
            let n = chart.node(k);
            let (u, v) = chart.param(n.i, n.j);
            f(u, v)
        });
        Field { nu: chart.nu, nv: chart.nv, data }
    }

    pub fn from_nodes<F>(chart: &GridChart, f: F) -> Self
    where
        F: Fn(usize) -> T + Sync + Send,
    {
        Field { nu: chart.nu, nv: chart.nv, data: exec::map_range(chart.len(), f) }
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        self.data[i * self.nv + j]
    }

    pub fn map<S: Copy + Send + Sync, F>(&self, f: F) -> Field<S>
    where
        F: Fn(&T) -> S + Sync + Send,
    {
        Field { nu: self.nu, nv: self.nv, data: exec::map_slice(&self.data, f) }
    }

    pub fn check_shape(&self, chart: &GridChart) -> Result<()> {
        if (self.nu, self.nv) != (chart.nu, chart.nv) || self.data.len() != chart.len() {
            return Err(Error::Shape { expected: (chart.nu, chart.nv), got: (self.nu, self.nv) });
        }
        Ok(())
    }
}

impl<T: FieldValue> Field<T> {
    pub fn max_magnitude(&self) -> f64 {
        self.data.iter().map(|v| v.magnitude()).fold(0.0, f64::max)
    }
}

/// Pair of coefficient fields `α = α_u du + α_v dv`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OneForm<T> {
    pub du: Field<T>,
    pub dv: Field<T>,
}

impl<T: Copy + Send + Sync> OneForm<T> {
    pub fn from_nodes<F>(chart: &GridChart, f: F) -> Self
    where
        F: Fn(usize) -> (T, T) + Sync + Send,
    {
        let pairs = exec::map_range(chart.len(), f);
        OneForm {
            du: Field { nu: chart.nu, nv: chart.nv, data: pairs.iter().map(|p| p.0).collect() },
            dv: Field { nu: chart.nu, nv: chart.nv, data: pairs.iter().map(|p| p.1).collect() },
        }
    }

    /// Coefficients `(α_u, α_v)` at flat index `k`.
    pub fn at(&self, k: usize) -> (T, T) {
        (self.du.data[k], self.dv.data[k])
    }

    pub fn map<S: Copy + Send + Sync, F>(&self, f: F) -> OneForm<S>
    where
        F: Fn(&T) -> S + Sync + Send,
    {
        OneForm { du: self.du.map(&f), dv: self.dv.map(&f) }
    }
}

impl<T: FieldValue> OneForm<T> {
    pub fn max_magnitude(&self) -> f64 {
        self.du.max_magnitude().max(self.dv.max_magnitude())
    }
}

/// `du∧dv` coefficient of a 2-form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TwoForm<T> {
    pub coeff: Field<T>,
}

impl<T: FieldValue> TwoForm<T> {
    /// Coefficients of nodes at least `margin` away from every edge. The
    /// margin shrinks on grids too small to leave an interior.
    pub fn interior(&self, margin: usize) -> Vec<T> {
        let f = &self.coeff;
        let mu = margin.min((f.nu - 1) / 2);
        let mv = margin.min((f.nv - 1) / 2);
        let mut out = Vec::with_capacity(f.data.len());
        for i in mu..f.nu - mu {
            for j in mv..f.nv - mv {
                out.push(f.get(i, j));
            }
        }
        out
    }

    pub fn interior_max_magnitude(&self, margin: usize) -> f64 {
        self.interior(margin).iter().map(|v| v.magnitude()).fold(0.0, f64::max)
    }

    pub fn max_magnitude(&self) -> f64 {
        self.coeff.max_magnitude()
    }
}

/// One-dimensional second-order difference at position `k` of `n` samples.
fn diff_1d<T: FieldValue>(get: impl Fn(usize) -> T, k: usize, n: usize, h: f64) -> T {
    let inv = 1.0 / (2.0 * h);
    if k == 0 {
        (get(1) * 4.0 - get(0) * 3.0 - get(2)) * inv
    } else if k == n - 1 {
        (get(n - 1) * 3.0 - get(n - 2) * 4.0 + get(n - 3)) * inv
    } else {
        (get(k + 1) - get(k - 1)) * inv
    }
}

/// ∂/∂u of a sampled field.
pub fn partial_u<T: FieldValue>(f: &Field<T>, chart: &GridChart) -> Field<T> {
    let h = chart.hu();
    Field::from_nodes(chart, |k| {
        let n = chart.node(k);
        diff_1d(|i| f.get(i, n.j), n.i, chart.nu, h)
    })
}

/// ∂/∂v of a sampled field.
pub fn partial_v<T: FieldValue>(f: &Field<T>, chart: &GridChart) -> Field<T> {
    let h = chart.hv();
    Field::from_nodes(chart, |k| {
        let n = chart.node(k);
        diff_1d(|j| f.get(n.i, j), n.j, chart.nv, h)
    })
}

pub fn d_scalar<T: FieldValue>(f: &Field<T>, chart: &GridChart) -> OneForm<T> {
    OneForm { du: partial_u(f, chart), dv: partial_v(f, chart) }
}

/// `dα = (∂_u α_v − ∂_v α_u) du∧dv`.
pub fn d_oneform<T: FieldValue>(alpha: &OneForm<T>, chart: &GridChart) -> TwoForm<T> {
    let a = partial_u(&alpha.dv, chart);
    let b = partial_v(&alpha.du, chart);
    TwoForm { coeff: Field::from_nodes(chart, |k| a.data[k] - b.data[k]) }
}

/// `α⋏β` for ℝ⁴-valued forms: `α_u∧β_v − α_v∧β_u`.
pub fn wedge_vv(alpha: &OneForm<Vec4>, beta: &OneForm<Vec4>) -> TwoForm<Bivector4> {
    let chart_shape = (alpha.du.nu, alpha.du.nv);
    let data = exec::map_range(alpha.du.data.len(), |k| {
        let (au, av) = alpha.at(k);
        let (bu, bv) = beta.at(k);
        wedge(&au, &bv) - wedge(&av, &bu)
    });
    TwoForm { coeff: Field { nu: chart_shape.0, nv: chart_shape.1, data } }
}

/// Result of [`integrate_closed`].
#[derive(Debug, Clone)]
pub struct Primitive<T> {
    pub values: Field<T>,
    /// `max |dα|` that passed the gate.
    pub closure_residual: f64,
    pub closure_tolerance: f64,
    /// Largest trapezoid circulation `|∮α|` over the elementary cells.
    pub worst_loop_defect: f64,
}

/// Closure gate `max(1e−8, 10·h²·scale(α))`.
pub fn closure_tolerance<T: FieldValue>(alpha: &OneForm<T>, chart: &GridChart) -> f64 {
    let h = chart.h();
    (10.0 * h * h * alpha.max_magnitude()).max(1e-8)
}

/// Trapezoid circulation around cell `(i, j)–(i+1, j+1)`, counter-clockwise.
pub fn cell_circulation<T: FieldValue>(alpha: &OneForm<T>, chart: &GridChart, i: usize, j: usize) -> T {
    let (hu, hv) = (chart.hu(), chart.hv());
    let au = |a: usize, b: usize| alpha.du.get(a, b);
    let av = |a: usize, b: usize| alpha.dv.get(a, b);
    (au(i, j) + au(i + 1, j)) * (0.5 * hu) + (av(i + 1, j) + av(i + 1, j + 1)) * (0.5 * hv)
        - (au(i, j + 1) + au(i + 1, j + 1)) * (0.5 * hu)
        - (av(i, j) + av(i, j + 1)) * (0.5 * hv)
}

/// Primitive of a closed 1-form by trapezoid accumulation along the
/// serpentine path, with `F(u0, v0) = base`. Refuses forms whose discrete
/// exterior derivative exceeds [`closure_tolerance`].
pub fn integrate_closed<T: FieldValue>(
    alpha: &OneForm<T>,
    chart: &GridChart,
    base: T,
) -> Result<Primitive<T>> {
    integrate_closed_within(alpha, chart, base, 0)
}

/// [`integrate_closed`] with the closure residual measured only on nodes at
/// least `margin` away from the chart boundary.
pub fn integrate_closed_within<T: FieldValue>(
    alpha: &OneForm<T>,
    chart: &GridChart,
    base: T,
    margin: usize,
) -> Result<Primitive<T>> {
    alpha.du.check_shape(chart)?;
    alpha.dv.check_shape(chart)?;
    let closure_residual = d_oneform(alpha, chart).interior_max_magnitude(margin);
    let closure_tolerance = closure_tolerance(alpha, chart);
    if !(closure_residual <= closure_tolerance) {
        return Err(Error::NotClosed { residual: closure_residual, tolerance: closure_tolerance });
    }

    let mut data = vec![T::default(); chart.len()];
    let path = chart.serpentine();
    data[chart.index(path[0].i, path[0].j)] = base;
    for step in path.windows(2) {
        let (a, b) = (step[0], step[1]);
        let (ka, kb) = (chart.index(a.i, a.j), chart.index(b.i, b.j));
        let increment = if a.j == b.j {
            let h = (b.i as f64 - a.i as f64) * chart.hu();
            (alpha.du.data[ka] + alpha.du.data[kb]) * (0.5 * h)
        } else {
            let h = (b.j as f64 - a.j as f64) * chart.hv();
            (alpha.dv.data[ka] + alpha.dv.data[kb]) * (0.5 * h)
        };
        data[kb] = data[ka] + increment;
    }

    let cells = (chart.nu - 1) * (chart.nv - 1);
    let defects = exec::map_range(cells, |c| {
        let (i, j) = (c / (chart.nv - 1), c % (chart.nv - 1));
        cell_circulation(alpha, chart, i, j).magnitude()
    });
    let worst_loop_defect = defects.into_iter().fold(0.0, f64::max);

    Ok(Primitive {
        values: Field { nu: chart.nu, nv: chart.nv, data },
        closure_residual,
        closure_tolerance,
        worst_loop_defect,
    })
}
