use std::sync::OnceLock;

use ndarray::{Array1, Array2};
use num_complex::Complex64;
use proptest::prelude::*;
use qsde_core::algebra::{
    build_basis, decompose_hermitian, reconstruct, structure_constants, GellMannBasis,
    StructureConstants,
};
use qsde_core::forms::{form_product, OperatorForm};
use qsde_core::linalg::{c, dagger, max_abs_c, max_diff_c};
use qsde_core::theta::ThetaContext;

fn context(n: usize) -> &'static (GellMannBasis, StructureConstants) {
    static CACHE: OnceLock<Vec<(GellMannBasis, StructureConstants)>> = OnceLock::new();
    let all = CACHE.get_or_init(|| {
        (2..=4)
            .map(|n| {
                let b = build_basis(n).unwrap();
                let sc = structure_constants(&b).unwrap();
                (b, sc)
            })
            .collect()
    });
    &all[n - 2]
}

fn complex_vec(len: usize) -> impl Strategy<Value = Array1<Complex64>> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), len)
        .prop_map(|v| v.into_iter().map(|(re, im)| c(re, im)).collect())
}

fn form(n: usize) -> impl Strategy<Value = OperatorForm> {
    ((-1.0f64..1.0, -1.0f64..1.0), complex_vec(n * n - 1))
        .prop_map(move |((re, im), v)| OperatorForm::new(n, c(re, im), v).unwrap())
}

fn with_n<T: std::fmt::Debug, S: Strategy<Value = T>>(
    f: impl Fn(usize) -> S + Clone + 'static,
) -> impl Strategy<Value = (usize, T)> {
    (2usize..=4).prop_flat_map(move |n| (Just(n), f(n)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn product_matches_matrix_product((n, (a, b)) in with_n(|n| (form(n), form(n)))) {
        let (basis, sc) = context(n);
        let ab = form_product(&a, &b, sc).unwrap().to_matrix(basis).unwrap();
        let direct = a.to_matrix(basis).unwrap().dot(&b.to_matrix(basis).unwrap());
        prop_assert!(max_diff_c(ab.view(), direct.view()) <= 1e-10);
    }

    #[test]
    fn product_is_associative((n, (a, b, d)) in with_n(|n| (form(n), form(n), form(n)))) {
        let (_, sc) = context(n);
        let left = form_product(&form_product(&a, &b, sc).unwrap(), &d, sc).unwrap();
        let right = form_product(&a, &form_product(&b, &d, sc).unwrap(), sc).unwrap();
        prop_assert!(left.max_abs_diff(&right).unwrap() <= 1e-10);
    }

    #[test]
    fn product_distributes((n, (a, b, d)) in with_n(|n| (form(n), form(n), form(n)))) {
        let (_, sc) = context(n);
        let left = form_product(&a, &b.add(&d).unwrap(), sc).unwrap();
        let right = form_product(&a, &b, sc).unwrap().add(&form_product(&a, &d, sc).unwrap()).unwrap();
        prop_assert!(left.max_abs_diff(&right).unwrap() <= 1e-12);
    }

    #[test]
    fn hermitian_round_trip((n, entries) in with_n(|n| complex_vec(n * n))) {
        let (basis, _) = context(n);
        let m = Array2::from_shape_vec((n, n), entries.to_vec()).unwrap();
        let h = (&m + &dagger(m.view())) * c(0.5, 0.0);
        let (a0, alpha) = decompose_hermitian(h.view(), basis).unwrap();
        let back = reconstruct(a0, alpha.view(), basis).unwrap();
        prop_assert!(max_diff_c(h.view(), back.view()) <= 1e-12);
    }

    #[test]
    fn theta_maps_are_linear((n, (b, g)) in with_n(|n| (complex_vec(n * n - 1), complex_vec(n * n - 1)))) {
        let (_, sc) = context(n);
        let th = ThetaContext::new(sc);
        let z = c(0.3, -0.7);
        let sum = &b + &g.mapv(|x| x * z);
        for (lhs, rhs) in [
            (th.theta_minus(sum.view()).unwrap(), th.theta_minus(b.view()).unwrap() + th.theta_minus(g.view()).unwrap() * z),
            (th.theta_plus(sum.view()).unwrap(), th.theta_plus(b.view()).unwrap() + th.theta_plus(g.view()).unwrap() * z),
        ] {
            prop_assert!(max_diff_c(lhs.view(), rhs.view()) <= 1e-12);
        }
        let tm = th.theta_minus(b.view()).unwrap();
        let tp = th.theta_plus(b.view()).unwrap();
        prop_assert!(max_abs_c((&tm + &tm.t()).iter()) == 0.0);
        prop_assert!(max_abs_c((&tp - &tp.t()).iter()) == 0.0);
    }

    #[test]
    fn theta_identities_on_random_vectors((n, (b, g)) in with_n(|n| (complex_vec(n * n - 1), complex_vec(n * n - 1)))) {
        let (_, sc) = context(n);
        let th = ThetaContext::new(sc);
        let (tmb, tmg) = (th.theta_minus(b.view()).unwrap(), th.theta_minus(g.view()).unwrap());
        let (tpb, tpg) = (th.theta_plus(b.view()).unwrap(), th.theta_plus(g.view()).unwrap());
        prop_assert!(max_abs_c((tmb.dot(&g) + tmg.dot(&b)).iter()) <= 1e-10);
        prop_assert!(max_abs_c((tpb.dot(&g) - tpg.dot(&b)).iter()) <= 1e-10);
        prop_assert!(max_abs_c(tmb.dot(&b).iter()) <= 1e-10);
        let iv = th.theta_minus(tmb.dot(&g).view()).unwrap();
        prop_assert!(max_diff_c(iv.view(), (tmb.dot(&tmg) - tmg.dot(&tmb)).view()) <= 1e-10);
        let v = th.theta_minus(tpb.dot(&g).view()).unwrap();
        prop_assert!(max_diff_c(v.view(), (tmb.dot(&tpg) + tmg.dot(&tpb)).view()) <= 1e-10);
        let vi = th.theta_plus(tmb.dot(&g).view()).unwrap();
        prop_assert!(max_diff_c(vi.view(), (tpb.dot(&tmg) - tmg.dot(&tpb)).view()) <= 1e-10);
        prop_assert!(max_diff_c(vi.view(), (tmb.dot(&tpg) - tpg.dot(&tmb)).view()) <= 1e-10);
    }
}

/// The anticommutator reading `Θ⁻(Θ⁺(β)γ) = {Θ⁻(β), Θ⁺(γ)}` holds on the
/// diagonal `γ = β` but not in general.
#[test]
fn anticommutator_reading_of_theta_minus_of_theta_plus() {
    let (_, sc) = context(3);
    let th = ThetaContext::new(sc);
    let b: Array1<Complex64> = (0..8)
        .map(|i| c(0.1 * i as f64, 0.3 - 0.05 * i as f64))
        .collect();
    let g: Array1<Complex64> = (0..8)
        .map(|i| c(0.2 - 0.03 * i as f64, 0.07 * i as f64))
        .collect();
    let anti = |x: &Array1<Complex64>, y: &Array1<Complex64>| {
        let (tm, tp) = (
            th.theta_minus(x.view()).unwrap(),
            th.theta_plus(y.view()).unwrap(),
        );
        tm.dot(&tp) + tp.dot(&tm)
    };
    let lhs = |x: &Array1<Complex64>, y: &Array1<Complex64>| {
        th.theta_minus(th.theta_plus(x.view()).unwrap().dot(y).view())
            .unwrap()
    };
    assert!(max_diff_c(lhs(&b, &b).view(), anti(&b, &b).view()) <= 1e-12);
    assert!(max_diff_c(lhs(&b, &g).view(), anti(&b, &g).view()) > 1e-2);
}
