use memxbar::crossbar::{eliminate_negatives, CrossbarConfig, MappedMatrix};
use memxbar::cs::{project_ball, soft_threshold};
use memxbar::mathprog::{project_nonneg, project_soc};
use memxbar::numerics::vector::{dist2, norm2};
use memxbar::numerics::{direct_solve, frobenius_norm, gaussian_perturbation, sym_eig_oracle, Matrix, SeededRng};
use proptest::prelude::*;

fn vec_strategy(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-10.0f64..10.0, n)
}

fn matrix_strategy(n: usize) -> impl Strategy<Value = Matrix<f64>> {
    prop::collection::vec(-5.0f64..5.0, n * n).prop_map(move |d| Matrix::from_row_major(n, n, d).unwrap())
}

fn in_soc(v: &[f64], tol: f64) -> bool {
    let n = v.len();
    norm2(&v[..n - 1]) <= v[n - 1] + tol
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 200, ..ProptestConfig::default() })]

    #[test]
    fn elimination_preserves_products(c in matrix_strategy(5), v in vec_strategy(5)) {
        let xb = MappedMatrix::program(&c, 0.0, &mut SeededRng::new(0), &CrossbarConfig::default()).unwrap();
        let got = xb.multiply(&v).unwrap();
        let want = c.mul_vec(&v).unwrap();
        prop_assert!(dist2(&got, &want) <= 1e-8 * (1.0 + norm2(&want)));
    }

    #[test]
    fn elimination_preserves_solutions(c in matrix_strategy(5), b in vec_strategy(5)) {
        let Ok(x_ref) = direct_solve(&c, &b) else { return Ok(()) };
        prop_assume!(norm2(&x_ref) < 1e6);
        let xb = MappedMatrix::program(&c, 0.0, &mut SeededRng::new(0), &CrossbarConfig::default()).unwrap();
        let x = xb.solve(&b).unwrap();
        prop_assert!(dist2(&x, &x_ref) <= 1e-8 * (1.0 + norm2(&x_ref)));
    }

    #[test]
    fn augmented_matrix_is_nonnegative(c in matrix_strategy(4)) {
        let sys = eliminate_negatives(&c).unwrap();
        prop_assert!(sys.matrix.as_slice().iter().all(|&v| v >= 0.0));
        prop_assert_eq!(sys.dim(), 4 + sys.aux_dim);
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 1000, ..ProptestConfig::default() })]

    #[test]
    fn nonneg_projection(a in vec_strategy(6), b in vec_strategy(6)) {
        let pa = project_nonneg(&a);
        prop_assert!(pa.iter().all(|&v| v >= 0.0));
        prop_assert!(dist2(&project_nonneg(&pa), &pa) <= 1e-12);
        prop_assert!(dist2(&pa, &project_nonneg(&b)) <= dist2(&a, &b) + 1e-12);
    }

    #[test]
    fn soc_projection(a in vec_strategy(6), b in vec_strategy(6)) {
        let pa = project_soc(&a);
        prop_assert!(in_soc(&pa, 1e-12));
        prop_assert!(dist2(&project_soc(&pa), &pa) <= 1e-12);
        prop_assert!(dist2(&pa, &project_soc(&b)) <= dist2(&a, &b) + 1e-12);
    }

    #[test]
    fn ball_projection(a in vec_strategy(6), b in vec_strategy(6), xi in 0.0f64..5.0) {
        let pa = project_ball(&a, xi);
        prop_assert!(norm2(&pa) <= xi + 1e-12);
        prop_assert!(dist2(&project_ball(&pa, xi), &pa) <= 1e-12);
        prop_assert!(dist2(&pa, &project_ball(&b, xi)) <= dist2(&a, &b) + 1e-12);
    }

    #[test]
    fn soft_threshold_satisfies_prox_optimality(beta in -5.0f64..5.0, tau in 0.0f64..3.0) {
        let z = soft_threshold(&[beta], tau)[0];
        if z == 0.0 {
            prop_assert!(beta.abs() <= tau + 1e-12);
        } else {
            prop_assert!((beta - z - tau * z.signum()).abs() <= 1e-12);
        }
    }
}

#[test]
fn soft_threshold_matches_grid_search() {
    let mut rng = SeededRng::new(31);
    for _ in 0..100 {
        let beta = rng.uniform(-3.0, 3.0);
        let tau = rng.uniform(0.0, 1.5);
        let f = |z: f64| tau * z.abs() + 0.5 * (z - beta).powi(2);
        let grid = (-400_000..=400_000).map(|i| f64::from(i) * 1e-5).min_by(|&a, &b| f(a).total_cmp(&f(b))).unwrap();
        assert!((soft_threshold(&[beta], tau)[0] - grid).abs() <= 1e-4);
    }
}

#[test]
fn perturbation_has_exact_ratio() {
    let mut rng = SeededRng::new(4);
    let base = rng.gaussian_matrix::<f64>(12, 12);
    for ratio in [0.0, 0.01, 0.1, 0.5] {
        let s = gaussian_perturbation(&base, ratio, &mut rng);
        assert!((frobenius_norm(&s) - ratio * frobenius_norm(&base)).abs() <= 1e-12 * frobenius_norm(&base));
    }
}

#[test]
fn variation_is_frozen_per_programming() {
    let c = SeededRng::new(1).gaussian_matrix::<f64>(6, 6);
    let xb = MappedMatrix::program(&c, 0.1, &mut SeededRng::new(2), &CrossbarConfig::default()).unwrap();
    let v = vec![1.0; 6];
    assert_eq!(xb.multiply(&v).unwrap(), xb.multiply(&v).unwrap());
    let again = MappedMatrix::program(&c, 0.1, &mut SeededRng::new(2), &CrossbarConfig::default()).unwrap();
    assert_eq!(xb.multiply(&v).unwrap(), again.multiply(&v).unwrap());
    assert_ne!(xb.multiply(&v).unwrap(), c.mul_vec(&v).unwrap());
}

#[test]
fn jacobi_reconstructs_random_symmetric() {
    let g = SeededRng::new(6).gaussian_matrix::<f64>(15, 15);
    let a = g.add(&g.transpose()).unwrap();
    let pairs = sym_eig_oracle(&a).unwrap();
    let mut rec = Matrix::<f64>::zeros(15, 15);
    for p in &pairs {
        for i in 0..15 {
            for j in 0..15 {
                rec[(i, j)] += p.value * p.vector[i] * p.vector[j];
            }
        }
    }
    assert!(frobenius_norm(&rec.sub(&a).unwrap()) <= 1e-10 * frobenius_norm(&a));
}
