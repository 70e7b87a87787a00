use antisym_core::bounds::von_neumann_entropy;
use antisym_core::linalg::{eig_hermitian, is_psd, kron, partial_trace, permute_factors, permute_vector, CMatrix, DimSignature};
use antisym_core::sampler::{haar_isometry, StreamRng};
use antisym_core::{DensityMatrix, Ket};
use proptest::prelude::*;

fn gaussian_matrix(rows: usize, cols: usize, seed: u64) -> CMatrix<f64> {
    let mut rng = StreamRng::new(seed, 0);
    CMatrix::from_vec(rows, cols, rng.gaussian_vector(rows * cols)).unwrap()
}

fn hermitian(n: usize, seed: u64) -> CMatrix<f64> {
    let g = gaussian_matrix(n, n, seed);
    g.add(&g.adjoint()).scale(0.5)
}

fn density(n: usize, seed: u64) -> CMatrix<f64> {
    let g = gaussian_matrix(n, n, seed);
    let m = g.matmul(&g.adjoint());
    let tr = m.trace().re;
    m.scale(1.0 / tr)
}

fn dims() -> impl Strategy<Value = Vec<usize>> {
    prop::collection::vec(1usize..=3, 1..=4)
}

fn dims_and_keep() -> impl Strategy<Value = (Vec<usize>, Vec<usize>)> {
    dims().prop_flat_map(|d| {
        let len = d.len();
        (Just(d), prop::sample::subsequence((0..len).collect::<Vec<_>>(), 1..=len))
    })
}

fn dims_and_perm() -> impl Strategy<Value = (Vec<usize>, Vec<usize>)> {
    dims().prop_flat_map(|d| {
        let len = d.len();
        (Just(d), Just((0..len).collect::<Vec<_>>()).prop_shuffle())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn eigen_reconstruction(n in 1usize..=24, seed in any::<u64>()) {
        let m = hermitian(n, seed);
        let spec = eig_hermitian(&m, true).unwrap();
        prop_assert!(spec.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
        let back = spec.reconstruct().unwrap();
        prop_assert!(back.max_abs_diff(&m) <= 1e-10 * m.max_abs().max(1.0));
        let u = spec.eigenvectors.unwrap();
        prop_assert!(u.adjoint().matmul(&u).max_abs_diff(&CMatrix::identity(n)) <= 1e-10);
    }

    #[test]
    fn partial_trace_keeps_trace_and_positivity((d, keep) in dims_and_keep(), seed in any::<u64>()) {
        let sig = DimSignature::new(d).unwrap();
        let rho = density(sig.total(), seed);
        let reduced = partial_trace(&rho, &sig, &keep).unwrap();
        prop_assert!((reduced.trace().re - 1.0).abs() <= 1e-12);
        prop_assert!(reduced.trace().im.abs() <= 1e-12);
        prop_assert!(eig_hermitian(&reduced, false).unwrap().min() >= -1e-10);
    }

    #[test]
    fn schmidt_symmetry(a in 1usize..=4, b in 1usize..=4, seed in any::<u64>()) {
        let sig = DimSignature::new(vec![a, b]).unwrap();
        let mut rng = StreamRng::new(seed, 1);
        let psi = Ket::new(rng.gaussian_vector(a * b), sig.clone()).unwrap().normalized().unwrap();
        let ra = eig_hermitian(&psi.reduced(&[0]).unwrap(), false).unwrap().eigenvalues;
        let rb = eig_hermitian(&psi.reduced(&[1]).unwrap(), false).unwrap().eigenvalues;
        let nonzero = |v: &[f64]| -> Vec<f64> { v.iter().copied().filter(|x| *x > 1e-10).collect() };
        let (na, nb) = (nonzero(&ra), nonzero(&rb));
        prop_assert_eq!(na.len(), nb.len());
        for (x, y) in na.iter().zip(&nb) {
            prop_assert!((x - y).abs() <= 1e-10);
        }
    }

    #[test]
    fn kron_identities(
        (r1, c1, r2, c2, r3) in (1usize..=3, 1usize..=3, 1usize..=3, 1usize..=3, 1usize..=3),
        seed in any::<u64>(),
    ) {
        let a = gaussian_matrix(r1, c1, seed);
        let b = gaussian_matrix(r2, c2, seed ^ 1);
        let c = gaussian_matrix(r3, 2, seed ^ 2);
        prop_assert!(kron(&kron(&a, &b), &c).max_abs_diff(&kron(&a, &kron(&b, &c))) <= 1e-12);
        let p = gaussian_matrix(c1, 2, seed ^ 3);
        let q = gaussian_matrix(c2, 3, seed ^ 4);
        let lhs = kron(&a, &b).matmul(&kron(&p, &q));
        let rhs = kron(&a.matmul(&p), &b.matmul(&q));
        prop_assert!(lhs.max_abs_diff(&rhs) <= 1e-12 * lhs.max_abs().max(1.0));
    }

    #[test]
    fn permutation_preserves_spectrum((d, perm) in dims_and_perm(), seed in any::<u64>()) {
        let sig = DimSignature::new(d).unwrap();
        let m = hermitian(sig.total(), seed);
        let (pm, psig) = permute_factors(&m, &sig, &perm).unwrap();
        prop_assert_eq!(psig.total(), sig.total());
        let e1 = eig_hermitian(&m, false).unwrap().eigenvalues;
        let e2 = eig_hermitian(&pm, false).unwrap().eigenvalues;
        for (x, y) in e1.iter().zip(&e2) {
            prop_assert!((x - y).abs() <= 1e-12 * m.max_abs().max(1.0));
        }
    }

    #[test]
    fn permutation_round_trip((d, perm) in dims_and_perm(), seed in any::<u64>()) {
        let sig = DimSignature::new(d).unwrap();
        let mut rng = StreamRng::new(seed, 2);
        let v = rng.gaussian_vector::<f64>(sig.total());
        let (pv, psig) = permute_vector(&v, &sig, &perm).unwrap();
        let mut inverse = vec![0; perm.len()];
        for (k, &p) in perm.iter().enumerate() {
            inverse[p] = k;
        }
        let (back, bsig) = permute_vector(&pv, &psig, &inverse).unwrap();
        prop_assert_eq!(bsig, sig);
        prop_assert_eq!(back, v);
    }

    #[test]
    fn psd_predicate_accepts_densities(n in 1usize..=12, seed in any::<u64>()) {
        let rho = density(n, seed);
        prop_assert!(is_psd(&rho, 1e-9).unwrap().is_psd);
        let shifted = rho.sub(&CMatrix::identity(n).scale(2.0));
        prop_assert!(!is_psd(&shifted, 1e-9).unwrap().is_psd);
    }

    #[test]
    fn entropy_is_unitarily_invariant(n in 2usize..=8, seed in any::<u64>()) {
        let sig = DimSignature::new(vec![n]).unwrap();
        let rho = DensityMatrix::new(density(n, seed), sig.clone()).unwrap();
        let u = haar_isometry::<f64>(n, n, &mut StreamRng::new(seed, 3)).unwrap();
        let rotated = u.matmul(rho.matrix()).matmul(&u.adjoint());
        let rotated = DensityMatrix::new(rotated.hermitian_part(), sig).unwrap();
        let diff = von_neumann_entropy(&rho).unwrap() - von_neumann_entropy(&rotated).unwrap();
        prop_assert!(diff.abs() <= 1e-10);
    }
}

#[test]
fn eigen_reconstruction_at_side_600() {
    let m = hermitian(600, 77);
    let spec = eig_hermitian(&m, true).unwrap();
    let back = spec.reconstruct().unwrap();
    assert!(back.max_abs_diff(&m) <= 1e-10 * m.max_abs());
}

#[test]
fn non_hermitian_input_reports_violation() {
    let m = gaussian_matrix(4, 4, 5);
    match eig_hermitian(&m, false) {
        Err(antisym_core::Error::NotHermitian { violation, .. }) => assert!(violation > 1e-3),
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn single_precision_alias_works() {
    let m = hermitian(6, 9).cast::<f32>();
    let spec = eig_hermitian(&m, true).unwrap();
    assert!(spec.reconstruct().unwrap().max_abs_diff(&m) <= 1e-4);
}
