//! Pointwise exterior algebra of ℝ⁴.
//!
//! Bivectors are stored in the ordered basis
//! `e₁∧e₂, e₁∧e₃, e₁∧e₄, e₂∧e₃, e₂∧e₄, e₃∧e₄` and act on vectors through
//! `(a∧b)c = ⟨a,c⟩b − ⟨b,c⟩a`. The orientation is `vol = e₁∧e₂∧e₃∧e₄`, and
//! the quaternion identification is `e₁ ↦ 1, e₂ ↦ i, e₃ ↦ j, e₄ ↦ k`.

use std::ops::{Add, AddAssign, Index, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

/// Index pairs `(p, q)` with `p < q` in storage order.
pub const BIVECTOR_BASIS: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];

/// `true` when the left factor `zL` of [`SplitBivector`] carries the
/// self-dual (`S = +1`) part. Pinned by `left_factor_convention` in the tests,
/// which applies the Hodge star to `from_quat_pair((i, 0))`.
pub const LEFT_IS_SELF_DUAL: bool = true;

/// Relative tolerance for `|κ(B,B)| ≤ tol·⟨B,B⟩`.
pub const DECOMPOSABLE_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Vec4(pub [f64; 4]);

impl Vec4 {
    pub const ZERO: Vec4 = Vec4([0.0; 4]);

    pub const fn new(a: f64, b: f64, c: f64, d: f64) -> Self {
        Vec4([a, b, c, d])
    }

    /// Standard basis vector `e_{i+1}`.
    pub fn basis(i: usize) -> Self {
        let mut v = [0.0; 4];
        v[i] = 1.0;
        Vec4(v)
    }

    pub fn dot(&self, other: &Vec4) -> f64 {
        self.0.iter().zip(other.0.iter()).map(|(a, b)| a * b).sum()
    }

    pub fn norm_sq(&self) -> f64 {
        self.dot(self)
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn normalized(&self) -> Vec4 {
        *self * (1.0 / self.norm())
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|c| c.is_finite())
    }
}

impl Index<usize> for Vec4 {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl Add for Vec4 {
    type Output = Vec4;
    fn add(self, o: Vec4) -> Vec4 {
        Vec4(std::array::from_fn(|i| self.0[i] + o.0[i]))
    }
}

impl AddAssign for Vec4 {
    fn add_assign(&mut self, o: Vec4) {
        *self = *self + o;
    }
}

impl Sub for Vec4 {
    type Output = Vec4;
    fn sub(self, o: Vec4) -> Vec4 {
        Vec4(std::array::from_fn(|i| self.0[i] - o.0[i]))
    }
}

impl Neg for Vec4 {
    type Output = Vec4;
    fn neg(self) -> Vec4 {
        Vec4(self.0.map(|c| -c))
    }
}

impl Mul<f64> for Vec4 {
    type Output = Vec4;
    fn mul(self, s: f64) -> Vec4 {
        Vec4(self.0.map(|c| c * s))
    }
}

impl Mul<Vec4> for f64 {
    type Output = Vec4;
    fn mul(self, v: Vec4) -> Vec4 {
        v * self
    }
}

/// Element of Λ²ℝ⁴ (six components, see [`BIVECTOR_BASIS`]).
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Bivector4(pub [f64; 6]);

impl Bivector4 {
    pub const ZERO: Bivector4 = Bivector4([0.0; 6]);

    pub fn basis(i: usize) -> Self {
        let mut b = [0.0; 6];
        b[i] = 1.0;
        Bivector4(b)
    }

    /// Component on `e_p∧e_q` for any `p ≠ q` (antisymmetric in the indices).
    pub fn component(&self, p: usize, q: usize) -> f64 {
        if p == q {
            return 0.0;
        }
        let (lo, hi, sign) = if p < q { (p, q, 1.0) } else { (q, p, -1.0) };
        let idx = BIVECTOR_BASIS
            .iter()
            .position(|&pq| pq == (lo, hi))
            .expect("valid index pair");
        sign * self.0[idx]
    }

    /// Euclidean inner product induced from ℝ⁴; the basis above is orthonormal.
    pub fn dot(&self, other: &Bivector4) -> f64 {
        self.0.iter().zip(other.0.iter()).map(|(a, b)| a * b).sum()
    }

    pub fn norm_sq(&self) -> f64 {
        self.dot(self)
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn is_decomposable(&self) -> bool {
        klein(self, self).abs() <= DECOMPOSABLE_TOL * self.norm_sq()
    }
}

impl Add for Bivector4 {
    type Output = Bivector4;
    fn add(self, o: Bivector4) -> Bivector4 {
        Bivector4(std::array::from_fn(|i| self.0[i] + o.0[i]))
    }
}

impl AddAssign for Bivector4 {
    fn add_assign(&mut self, o: Bivector4) {
        *self = *self + o;
    }
}

impl Sub for Bivector4 {
    type Output = Bivector4;
    fn sub(self, o: Bivector4) -> Bivector4 {
        Bivector4(std::array::from_fn(|i| self.0[i] - o.0[i]))
    }
}

impl Neg for Bivector4 {
    type Output = Bivector4;
    fn neg(self) -> Bivector4 {
        Bivector4(self.0.map(|c| -c))
    }
}

impl Mul<f64> for Bivector4 {
    type Output = Bivector4;
    fn mul(self, s: f64) -> Bivector4 {
        Bivector4(self.0.map(|c| c * s))
    }
}

impl Mul<Bivector4> for f64 {
    type Output = Bivector4;
    fn mul(self, b: Bivector4) -> Bivector4 {
        b * self
    }
}

/// `(a∧b)_{pq} = a_p b_q − a_q b_p`.
pub fn wedge(a: &Vec4, b: &Vec4) -> Bivector4 {
    Bivector4(BIVECTOR_BASIS.map(|(p, q)| a.0[p] * b.0[q] - a.0[q] * b.0[p]))
}

/// The so(4) action: `(a∧b)c = ⟨a,c⟩b − ⟨b,c⟩a`, extended linearly.
pub fn act(b: &Bivector4, c: &Vec4) -> Vec4 {
    let mut out = [0.0; 4];
    for (k, &(p, q)) in BIVECTOR_BASIS.iter().enumerate() {
        let w = b.0[k];
        out[q] += w * c.0[p];
        out[p] -= w * c.0[q];
    }
    Vec4(out)
}

/// Hodge star for `vol = e₁∧e₂∧e₃∧e₄`: `⟨α,β⟩vol = α∧S(β)`.
pub fn hodge(b: &Bivector4) -> Bivector4 {
    let [b12, b13, b14, b23, b24, b34] = b.0;
    Bivector4([b34, -b24, b23, b14, -b13, b12])
}

/// Coefficient of `vol` in `α∧β`.
pub fn wedge_bivectors(a: &Bivector4, b: &Bivector4) -> f64 {
    let [a12, a13, a14, a23, a24, a34] = a.0;
    let [b12, b13, b14, b23, b24, b34] = b.0;
    a12 * b34 - a13 * b24 + a14 * b23 + a23 * b14 - a24 * b13 + a34 * b12
}

/// Klein inner product `κ(α,β) = ⟨α, Sβ⟩`, signature (3,3).
pub fn klein(a: &Bivector4, b: &Bivector4) -> f64 {
    a.dot(&hodge(b))
}

/// Eigenspace split `(½(B+SB), ½(B−SB))`.
pub fn sd_asd_split(b: &Bivector4) -> (Bivector4, Bivector4) {
    let s = hodge(b);
    ((*b + s) * 0.5, (*b - s) * 0.5)
}

/// Coefficient of `vol` in `a∧b∧c∧d`, i.e. `det[a b c d]`.
pub fn det4(a: &Vec4, b: &Vec4, c: &Vec4, d: &Vec4) -> f64 {
    wedge_bivectors(&wedge(a, b), &wedge(c, d))
}

/// `B∧v` in the basis `e₁₂₃, e₁₂₄, e₁₃₄, e₂₃₄`.
pub fn wedge_bivector_vector(b: &Bivector4, v: &Vec4) -> [f64; 4] {
    const TRIPLES: [(usize, usize, usize); 4] = [(0, 1, 2), (0, 1, 3), (0, 2, 3), (1, 2, 3)];
    TRIPLES.map(|(i, j, k)| {
        b.component(i, j) * v.0[k] - b.component(i, k) * v.0[j] + b.component(j, k) * v.0[i]
    })
}

/// Quaternion `re + im₀ i + im₁ j + im₂ k`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Quat {
    pub re: f64,
    pub im: [f64; 3],
}

impl Quat {
    pub const ONE: Quat = Quat { re: 1.0, im: [0.0; 3] };
    pub const I: Quat = Quat { re: 0.0, im: [1.0, 0.0, 0.0] };
    pub const J: Quat = Quat { re: 0.0, im: [0.0, 1.0, 0.0] };
    pub const K: Quat = Quat { re: 0.0, im: [0.0, 0.0, 1.0] };

    pub const fn new(re: f64, i: f64, j: f64, k: f64) -> Self {
        Quat { re, im: [i, j, k] }
    }

    pub fn imaginary(im: [f64; 3]) -> Self {
        Quat { re: 0.0, im }
    }

    pub fn from_vec4(v: &Vec4) -> Self {
        Quat::new(v.0[0], v.0[1], v.0[2], v.0[3])
    }

    pub fn to_vec4(self) -> Vec4 {
        Vec4::new(self.re, self.im[0], self.im[1], self.im[2])
    }

    pub fn conj(self) -> Quat {
        quat_conj(self)
    }

    pub fn im_part(self) -> Quat {
        Quat { re: 0.0, im: self.im }
    }

    pub fn norm(self) -> f64 {
        self.to_vec4().norm()
    }
}

impl Add for Quat {
    type Output = Quat;
    fn add(self, o: Quat) -> Quat {
        Quat::new(self.re + o.re, self.im[0] + o.im[0], self.im[1] + o.im[1], self.im[2] + o.im[2])
    }
}

impl AddAssign for Quat {
    fn add_assign(&mut self, o: Quat) {
        *self = *self + o;
    }
}

impl Sub for Quat {
    type Output = Quat;
    fn sub(self, o: Quat) -> Quat {
        self + (-o)
    }
}

impl Neg for Quat {
    type Output = Quat;
    fn neg(self) -> Quat {
        Quat { re: -self.re, im: self.im.map(|c| -c) }
    }
}

impl Mul<f64> for Quat {
    type Output = Quat;
    fn mul(self, s: f64) -> Quat {
        Quat { re: self.re * s, im: self.im.map(|c| c * s) }
    }
}

impl Mul for Quat {
    type Output = Quat;
    fn mul(self, o: Quat) -> Quat {
        quat_mul(self, o)
    }
}

/// Hamilton product.
pub fn quat_mul(p: Quat, q: Quat) -> Quat {
    let (a1, [b1, c1, d1]) = (p.re, p.im);
    let (a2, [b2, c2, d2]) = (q.re, q.im);
    Quat::new(
        a1 * a2 - b1 * b2 - c1 * c2 - d1 * d2,
        a1 * b2 + b1 * a2 + c1 * d2 - d1 * c2,
        a1 * c2 - b1 * d2 + c1 * a2 + d1 * b2,
        a1 * d2 + b1 * c2 - c1 * b2 + d1 * a2,
    )
}

pub fn quat_conj(q: Quat) -> Quat {
    Quat { re: q.re, im: q.im.map(|c| -c) }
}

/// `⟨a,b⟩ = Re(a b̄)`.
pub fn eucl_inner(a: Quat, b: Quat) -> f64 {
    quat_mul(a, quat_conj(b)).re
}

/// A bivector written as the pair `(zL, zR)` of imaginary quaternions acting by
/// `c ↦ zL c − c zR`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct SplitBivector {
    pub left: Quat,
    pub right: Quat,
}

impl SplitBivector {
    pub fn act(&self, c: Quat) -> Quat {
        quat_mul(self.left, c) - quat_mul(c, self.right)
    }
}

/// Λ²ℍ ≅ Imℍ ⊕ Imℍ, `a∧b ↦ ½(Im(b ā), −Im(ā b))`, written out on the basis.
pub fn to_quat_pair(b: &Bivector4) -> SplitBivector {
    let [b12, b13, b14, b23, b24, b34] = b.0;
    SplitBivector {
        left: Quat::imaginary([0.5 * (b12 + b34), 0.5 * (b13 - b24), 0.5 * (b14 + b23)]),
        right: Quat::imaginary([0.5 * (b34 - b12), -0.5 * (b13 + b24), 0.5 * (b23 - b14)]),
    }
}

/// Inverse of [`to_quat_pair`]. Real parts of the input are ignored.
pub fn from_quat_pair(sp: &SplitBivector) -> Bivector4 {
    let [l1, l2, l3] = sp.left.im;
    let [r1, r2, r3] = sp.right.im;
    Bivector4([l1 - r1, l2 - r2, l3 - r3, l3 + r3, -l2 - r2, l1 + r1])
}
