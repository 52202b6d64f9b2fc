//! Wavefront OBJ export of sampled surfaces.
//!
//! `F₊` and `F₋` are written in ℝ³ through the orthonormal bases
//! `(e12 ± e34)/√2, (e13 ∓ e24)/√2, (e14 ± e23)/√2` of the self-dual and
//! anti-self-dual bivectors. `x` is projected stereographically from `e4`.

use std::f64::consts::FRAC_1_SQRT_2;
use std::io::{self, Write};

use crate::charts::{Field, GridChart};
use crate::exterior4::{Bivector4, Vec4};

const S: f64 = FRAC_1_SQRT_2;

/// Orthonormal basis of the self-dual bivectors.
pub const SELF_DUAL_BASIS: [Bivector4; 3] = [
    Bivector4([S, 0.0, 0.0, 0.0, 0.0, S]),
    Bivector4([0.0, S, 0.0, 0.0, -S, 0.0]),
    Bivector4([0.0, 0.0, S, S, 0.0, 0.0]),
];

/// Orthonormal basis of the anti-self-dual bivectors.
pub const ANTI_SELF_DUAL_BASIS: [Bivector4; 3] = [
    Bivector4([S, 0.0, 0.0, 0.0, 0.0, -S]),
    Bivector4([0.0, S, 0.0, 0.0, S, 0.0]),
    Bivector4([0.0, 0.0, S, -S, 0.0, 0.0]),
];

/// Header lines documenting the ℝ³ scale convention of the pair meshes.
pub const PAIR_HEADER: [&str; 3] = [
    "coordinates are inner products with the orthonormal (anti-)self-dual basis (e12+-e34)/sqrt2, (e13-+e24)/sqrt2, (e14+-e23)/sqrt2",
    "multiply by 1/sqrt2 for the imaginary quaternion of the left/right factor",
    "lengths agree with the bivector norm on Lambda^2 R^4",
];

/// Nodes closer than this to the projection pole are not exported.
pub const POLE_MARGIN: f64 = 1e-6;

pub fn bivector_coords(b: &Bivector4, basis: &[Bivector4; 3]) -> [f64; 3] {
    [b.dot(&basis[0]), b.dot(&basis[1]), b.dot(&basis[2])]
}

/// Stereographic projection from `e4`; `None` within [`POLE_MARGIN`] of it.
pub fn stereographic(x: &Vec4) -> Option<[f64; 3]> {
    let d = 1.0 - x.0[3];
    (d >= POLE_MARGIN).then(|| [x.0[0] / d, x.0[1] / d, x.0[2] / d])
}

pub fn project_field(x: &Field<Vec4>) -> Option<Vec<[f64; 3]>> {
    x.data.iter().map(stereographic).collect()
}

pub fn bivector_field_coords(f: &Field<Bivector4>, basis: &[Bivector4; 3]) -> Vec<[f64; 3]> {
    f.data.iter().map(|b| bivector_coords(b, basis)).collect()
}

/// Vertices in storage order, two triangles per cell, counter-clockwise in
/// the `(u, v)` chart.
pub fn write_obj<W: Write>(
    out: &mut W,
    chart: &GridChart,
    points: &[[f64; 3]],
    header: &[&str],
) -> io::Result<()> {
    assert_eq!(points.len(), chart.len(), "one vertex per node");
    for line in header {
        writeln!(out, "# {line}")?;
    }
    for p in points {
        writeln!(out, "v {} {} {}", p[0], p[1], p[2])?;
    }
    let id = |i: usize, j: usize| chart.index(i, j) + 1;
    for i in 0..chart.nu - 1 {
        for j in 0..chart.nv - 1 {
            let (a, b, c, d) = (id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1));
            writeln!(out, "f {a} {b} {c}")?;
            writeln!(out, "f {a} {c} {d}")?;
        }
    }
    Ok(())
}
