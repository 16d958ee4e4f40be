//! Library verdicts against the reference computations in `oracle`, and
//! randomized invariants over sampled instances.

mod oracle;

use hlk_core::connection::{adjoint_connection, check_connection, Connection, TwistMap};
use hlk_core::extension::{build_extension, check_length_one, verify_extension};
use hlk_core::forms::{check_complex, cohomology_dims, d_squared_vanishes, differential, scalar_differential, wedge, Form};
use hlk_core::homlie::{check_hom_lie_axioms, HomLieAlgebra};
use hlk_core::io::{hom_lie_doc, parse_instance, ruth_doc, to_json_string, to_value, Instance};
use hlk_core::linalg::{frac, int, Matrix, Q};
use hlk_core::ruth::{sign_flip_twin, structure_residuals, GradedModule, RuthData};
use hlk_core::sample::{catalog_lie, random_connection, random_hom_lie, random_jacobi_violating, random_length_one, rng, LIE_CATALOG};
use oracle::Alg;
use proptest::prelude::*;
use std::path::Path;

const SMALL: &[&str] = &["ab2", "r2", "heis", "sl2", "r3"];

fn actions_of(c: &Connection) -> Vec<Vec<Vec<Q>>> {
    c.action().iter().map(|m| m.to_rows()).collect()
}

#[test]
fn classical_catalog_matches_jacobi_oracle() {
    for (name, _, _) in LIE_CATALOG {
        let g = catalog_lie(name).unwrap();
        assert!(Alg::of(&g).jacobi_holds(), "{name}");
        assert!(check_hom_lie_axioms(&g).all_passed(), "{name}");
    }
}

#[test]
fn untwisted_cohomology_matches_chevalley_eilenberg() {
    for (name, _, _) in LIE_CATALOG {
        let g = catalog_lie(name).unwrap();
        let c = Connection::trivial(g.clone(), 1);
        let ours = cohomology_dims(&c, g.dim()).unwrap();
        assert_eq!(ours, Alg::of(&g).ce_dims(), "{name}");
    }
}

#[test]
fn brute_force_oracle_agrees_with_classical_when_untwisted() {
    for (name, _, _) in LIE_CATALOG.iter().filter(|(_, d, _)| *d <= 3) {
        let a = Alg::of(&catalog_lie(name).unwrap());
        assert_eq!(a.twisted_invariant_dims(), a.ce_dims(), "{name}");
    }
}

#[test]
fn twisted_heisenberg_cohomology() {
    let g = HomLieAlgebra::from_entries(3, &[(2, 0, 1, int(1))], Matrix::diagonal(&[int(2), frac(1, 2), int(1)])).unwrap();
    let expected = Alg::of(&g).twisted_invariant_dims();
    assert_eq!(expected, vec![1, 0, 0, 1]);
    assert_eq!(cohomology_dims(&Connection::trivial(g, 1), 3).unwrap(), expected);
}

/// With `Θ = Id` and `α = Id` the degree-zero curvature block is the classical
/// `d² = R∧`, so it must agree with the oracle's flatness on any connection.
#[test]
fn classical_limit_of_curvature_block() {
    let mut r = rng(11);
    let mut seen = [0usize; 2];
    for _ in 0..40 {
        let name = SMALL[seen.iter().sum::<usize>() % SMALL.len()];
        let g = catalog_lie(name).unwrap();
        let (_, c) = random_connection(&mut r, &g, 2);
        let c = Connection::new(g.clone(), TwistMap::identity(c.rank()), c.action().to_vec()).unwrap();
        let flat = Alg::of(&g).curvature_zero(&actions_of(&c), &Matrix::identity(c.rank()).to_rows());
        let data =
            RuthData::new(g, GradedModule::new(vec![TwistMap::identity(c.rank())]).unwrap(), vec![], vec![c.action().to_vec()], vec![])
                .unwrap();
        let rep = structure_residuals(&data);
        assert_eq!(rep.passed("d2-block-2-curvature"), flat);
        seen[flat as usize] += 1;
    }
    assert!(seen[0] > 0 && seen[1] > 0, "both outcomes sampled: {seen:?}");
}

#[test]
fn extension_of_sampled_identity_twist_data_is_hom_lie() {
    let mut r = rng(5);
    let mut built = 0;
    for i in 0..30 {
        let g = catalog_lie(SMALL[i % SMALL.len()]).unwrap();
        let Some(l) = random_length_one(&mut r, &g, true) else { continue };
        assert!(check_length_one(&l).all_passed());
        let ext = build_extension(&l, false).unwrap();
        let rep = verify_extension(&ext, Some(&g)).unwrap();
        assert!(rep.all_passed(), "{}", rep.to_text());
        built += 1;
    }
    assert!(built >= 10);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn hom_jacobi_verdict_matches_oracle(seed in any::<u64>(), violate in any::<bool>()) {
        let mut r = rng(seed);
        let (_, g) = if violate { random_jacobi_violating(&mut r, SMALL) } else { random_hom_lie(&mut r, SMALL) };
        let rep = check_hom_lie_axioms(&g);
        prop_assert_eq!(rep.passed("hom-jacobi"), Alg::of(&g).hom_jacobi_holds());
    }

    #[test]
    fn adjoint_flatness_matches_oracle(seed in any::<u64>(), violate in any::<bool>()) {
        let mut r = rng(seed);
        let (_, g) = if violate { random_jacobi_violating(&mut r, SMALL) } else { random_hom_lie(&mut r, SMALL) };
        let c = adjoint_connection(&g).unwrap();
        prop_assert_eq!(check_connection(&c).passed("flatness"), Alg::of(&g).adjoint_flat());
    }

    #[test]
    fn connection_flatness_matches_oracle(seed in any::<u64>()) {
        let mut r = rng(seed);
        let (_, g) = random_hom_lie(&mut r, SMALL);
        let (_, c) = random_connection(&mut r, &g, 2);
        let flat = Alg::of(&g).curvature_zero(&actions_of(&c), &c.alpha().matrix().to_rows());
        prop_assert_eq!(check_connection(&c).passed("flatness"), flat);
    }

    /// On a flat connection the twisted differential squares to zero on the
    /// compatible complex.
    #[test]
    fn flat_connections_give_complexes(seed in any::<u64>()) {
        let mut r = rng(seed);
        let (_, g) = random_hom_lie(&mut r, SMALL);
        let (_, c) = random_connection(&mut r, &g, 2);
        if check_connection(&c).all_passed() {
            prop_assert!(d_squared_vanishes(&check_complex(&c)));
        }
    }

    /// Untwisted Lie algebras: `d(ω∧η) = dω∧η + (−1)^p ω∧dη` and `d² = 0` on all scalar forms.
    #[test]
    fn classical_scalar_forms(name in prop::sample::select(SMALL.to_vec()), a in prop::collection::vec(-3i64..4, 3), b in prop::collection::vec(-3i64..4, 3)) {
        let g = catalog_lie(name).unwrap();
        let n = g.dim();
        let om = Form::from_flat(n, 1, 1, a.iter().take(n).map(|&x| int(x)).collect());
        let eta = Form::from_flat(n, 1, 1, b.iter().take(n).map(|&x| int(x)).collect());
        let lhs = scalar_differential(&g, &wedge(&om, &eta));
        let rhs = wedge(&scalar_differential(&g, &om), &eta).sub(&wedge(&om, &scalar_differential(&g, &eta)));
        prop_assert_eq!(lhs, rhs);
        prop_assert!(scalar_differential(&g, &scalar_differential(&g, &om)).is_zero());
        let c = Connection::trivial(g, 1);
        prop_assert!(differential(&c, &differential(&c, &om)).is_zero());
    }

    #[test]
    fn sign_flip_twin_always_intertwines(seed in any::<u64>()) {
        let mut r = rng(seed);
        let (_, g) = random_hom_lie(&mut r, SMALL);
        if let Some(l) = random_length_one(&mut r, &g, false) {
            let (_, rep) = sign_flip_twin(l.data());
            prop_assert!(rep.all_passed(), "{}", rep.to_text());
        }
    }

    #[test]
    fn sampled_length_one_data_meets_hypotheses(seed in any::<u64>()) {
        let mut r = rng(seed);
        let (_, g) = random_hom_lie(&mut r, SMALL);
        if let Some(l) = random_length_one(&mut r, &g, false) {
            prop_assert!(check_length_one(&l).all_passed());
        }
    }

    #[test]
    fn algebra_documents_round_trip(seed in any::<u64>()) {
        let mut r = rng(seed);
        let (_, g) = random_hom_lie(&mut r, SMALL);
        let text = to_json_string(&hom_lie_doc(&g, None));
        match parse_instance(&text, Path::new(".")).unwrap() {
            Instance::HomLieAlgebra { algebra, .. } => prop_assert_eq!(algebra, g),
            other => prop_assert!(false, "parsed as {}", other.type_name()),
        }
    }

    #[test]
    fn ruth_documents_round_trip(seed in any::<u64>()) {
        let mut r = rng(seed);
        let (_, g) = random_hom_lie(&mut r, SMALL);
        if let Some(l) = random_length_one(&mut r, &g, false) {
            let doc = ruth_doc(l.data(), to_value(&hom_lie_doc(&g, None)));
            let text = to_json_string(&doc);
            match parse_instance(&text, Path::new(".")).unwrap() {
                Instance::Ruth(back) => prop_assert_eq!(&back, l.data()),
                other => prop_assert!(false, "parsed as {}", other.type_name()),
            }
        }
    }
}
