use bonnet_core::exterior4::{
    act, from_quat_pair, hodge, klein, to_quat_pair, wedge, wedge_bivectors, Bivector4, Quat, Vec4,
    BIVECTOR_BASIS,
};
use nalgebra::{SMatrix, SymmetricEigen};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn vec4() -> impl Strategy<Value = Vec4> {
    prop::array::uniform4(-2.0..2.0f64).prop_map(Vec4)
}

fn bivector() -> impl Strategy<Value = Bivector4> {
    prop::array::uniform6(-2.0..2.0f64).prop_map(Bivector4)
}

fn random_vec(rng: &mut ChaCha8Rng) -> Vec4 {
    Vec4(std::array::from_fn(|_| rng.random_range(-1.0..1.0)))
}

fn levi_civita(p: [usize; 4]) -> f64 {
    let mut sign = 1.0;
    for a in 0..4 {
        for b in a + 1..4 {
            if p[a] == p[b] {
                return 0.0;
            }
            if p[a] > p[b] {
                sign = -sign;
            }
        }
    }
    sign
}

/// `S(B)_{ij} = ½ ε_{ijkl} B_{kl}`, written independently of the library.
fn hodge_oracle(b: &Bivector4) -> Bivector4 {
    Bivector4(BIVECTOR_BASIS.map(|(i, j)| {
        let mut s = 0.0;
        for k in 0..4 {
            for l in 0..4 {
                s += 0.5 * levi_civita([i, j, k, l]) * b.component(k, l);
            }
        }
        s
    }))
}

proptest! {
    #[test]
    fn hodge_matches_levi_civita(b in bivector()) {
        prop_assert!((hodge(&b) - hodge_oracle(&b)).norm() <= 1e-15);
    }

    #[test]
    fn hodge_is_an_isometric_involution(a in bivector(), b in bivector()) {
        prop_assert!((hodge(&hodge(&a)) - a).norm() <= 1e-15);
        prop_assert!((hodge(&a).dot(&hodge(&b)) - a.dot(&b)).abs() <= 1e-12);
    }

    #[test]
    fn klein_is_symmetric_and_matches_wedge(a in bivector(), b in bivector()) {
        prop_assert!((klein(&a, &b) - klein(&b, &a)).abs() <= 1e-12);
        prop_assert!((klein(&a, &b) - wedge_bivectors(&a, &b)).abs() <= 1e-12);
        prop_assert!((klein(&a, &b) - a.dot(&hodge(&b))).abs() <= 1e-12);
    }

    #[test]
    fn act_is_antisymmetric_and_matches_definition(a in vec4(), b in vec4(), c in vec4()) {
        let expected = b * a.dot(&c) - a * b.dot(&c);
        prop_assert!((act(&wedge(&a, &b), &c) - expected).norm() <= 1e-12);
        let v = act(&wedge(&a, &b), &c);
        prop_assert!(v.dot(&c).abs() <= 1e-12);
    }

    #[test]
    fn quat_pair_round_trips(b in bivector()) {
        let sp = to_quat_pair(&b);
        prop_assert!((from_quat_pair(&sp) - b).norm() <= 1e-15);
        prop_assert_eq!(sp.left.re, 0.0);
        prop_assert_eq!(sp.right.re, 0.0);
    }
}

#[test]
fn klein_signature_is_three_three() {
    let gram = SMatrix::<f64, 6, 6>::from_fn(|i, j| klein(&Bivector4::basis(i), &Bivector4::basis(j)));
    let eig = SymmetricEigen::new(gram);
    let positive = eig.eigenvalues.iter().filter(|&&e| e > 0.5).count();
    let negative = eig.eigenvalues.iter().filter(|&&e| e < -0.5).count();
    assert_eq!((positive, negative), (3, 3), "{:?}", eig.eigenvalues);
    for e in eig.eigenvalues.iter() {
        assert!((e.abs() - 1.0).abs() <= 1e-12);
    }
}

#[test]
fn decomposables_are_exactly_the_isotropic_bivectors() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst = 0.0_f64;
    for _ in 0..10_000 {
        let b = wedge(&random_vec(&mut rng), &random_vec(&mut rng));
        worst = worst.max(klein(&b, &b).abs() / b.norm_sq().max(1e-300));
        assert!(b.is_decomposable());
    }
    assert!(worst <= 1e-12, "{worst}");

    // Generic sums of two decomposables are not decomposable, and the wedge
    // criterion agrees with an independent rank test on the 4×4 matrix.
    let mut disagreements = 0;
    for _ in 0..10_000 {
        let b = wedge(&random_vec(&mut rng), &random_vec(&mut rng))
            + wedge(&random_vec(&mut rng), &random_vec(&mut rng));
        let m = SMatrix::<f64, 4, 4>::from_fn(|p, q| b.component(p, q));
        let pfaffian = m[(0, 1)] * m[(2, 3)] - m[(0, 2)] * m[(1, 3)] + m[(0, 3)] * m[(1, 2)];
        let rank_two = pfaffian.abs() <= 1e-10 * b.norm_sq();
        if rank_two != b.is_decomposable() {
            disagreements += 1;
        }
        assert!((klein(&b, &b) - 2.0 * pfaffian).abs() <= 1e-12 * (1.0 + b.norm_sq()));
    }
    assert_eq!(disagreements, 0);
}

#[test]
fn action_intertwines_with_quaternion_pair() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut worst = 0.0_f64;
    for _ in 0..10_000 {
        let b = Bivector4(std::array::from_fn(|_| rng.random_range(-1.0..1.0)));
        let c = random_vec(&mut rng);
        let lhs = act(&b, &c);
        let rhs = to_quat_pair(&b).act(Quat::from_vec4(&c)).to_vec4();
        worst = worst.max((lhs - rhs).norm());
    }
    assert!(worst <= 1e-12, "{worst}");
}
