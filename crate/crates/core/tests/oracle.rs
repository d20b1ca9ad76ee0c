mod common;

use common::{brute_combined, brute_tangent, close, svd_rank, to_na};
use miniversal::canonical::{CanonicalBlock, CanonicalStructure};
use miniversal::matcore::{rank_of, solve_least_norm, vec_index, ComplexMatrix, C64, DEFAULT_TOL};
use miniversal::patterns::{codimension, diagonal_pattern, full_pattern, offdiagonal_pattern, PatternOptions, StarPattern};
use miniversal::reducer::{reduce, step, ReduceOptions, ReducerSetup};
use miniversal::sweep::{case_rng, random_perturbation, sweep_structures};
use miniversal::tangent::{
    check_pair_transversality, check_transversality, greedy_miniversal, project_onto_pattern, tangent_operator, Verdict,
};
use rand::Rng;

fn random_matrix(rows: usize, cols: usize, rng: &mut impl Rng) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
}

fn pat(n: usize, stars: &[(usize, usize)]) -> StarPattern {
    StarPattern::from_stars(n, n, stars.iter().copied()).unwrap()
}

#[test]
fn pivoted_qr_rank_agrees_with_svd() {
    let mut rng = case_rng(11, 0);
    for _ in 0..60 {
        let rows = rng.gen_range(1..12);
        let cols = rng.gen_range(1..12);
        let r = rng.gen_range(0..=rows.min(cols));
        let m = random_matrix(rows, r, &mut rng)
            .matmul(&random_matrix(r, cols, &mut rng))
            .unwrap_or_else(|_| ComplexMatrix::zeros(rows, cols));
        let m = if r == 0 { ComplexMatrix::zeros(rows, cols) } else { m };
        assert_eq!(rank_of(&m, DEFAULT_TOL).rank, svd_rank(&to_na(&m), DEFAULT_TOL));
        assert_eq!(rank_of(&m, DEFAULT_TOL).rank, r);
    }
}

#[test]
fn least_norm_solution_matches_pseudo_inverse() {
    let mut rng = case_rng(12, 0);
    for _ in 0..40 {
        let rows = rng.gen_range(1..10);
        let cols = rng.gen_range(1..10);
        let r = rng.gen_range(1..=rows.min(cols));
        let m = random_matrix(rows, r, &mut rng).matmul(&random_matrix(r, cols, &mut rng)).unwrap();
        // consistent right-hand side
        let x0: Vec<C64> = (0..cols).map(|_| C64::new(rng.gen(), rng.gen())).collect();
        let b = m.mul_vec(&x0).unwrap();
        let x = solve_least_norm(&m, &b, DEFAULT_TOL).unwrap();
        let pinv = to_na(&m).pseudo_inverse(1e-10).unwrap();
        let expect = pinv * nalgebra::DVector::from_vec(b.clone());
        for (a, e) in x.iter().zip(expect.iter()) {
            assert!((a - e).norm() < 1e-8, "{a} vs {e}");
        }
    }
}

#[test]
fn tangent_operator_matches_dense_products() {
    let mut rng = case_rng(13, 0);
    for n in 1..6 {
        let a = random_matrix(n, n, &mut rng);
        let t = tangent_operator(&a).unwrap();
        let brute = brute_tangent(&a);
        let mine = to_na(t.matrix());
        assert!((mine - brute).norm() < 1e-14);
    }
}

#[test]
fn tangent_ranks_against_svd() {
    let j2 = CanonicalBlock::jordan_zero(2).unwrap().matrix();
    assert_eq!(svd_rank(&brute_tangent(&j2), DEFAULT_TOL), 3);
    assert_eq!(tangent_operator(&j2).unwrap().rank(DEFAULT_TOL), 3);
    let id = ComplexMatrix::identity(2);
    assert_eq!(svd_rank(&brute_tangent(&id), DEFAULT_TOL), 3);
}

#[test]
fn transversality_ranks_against_svd() {
    let opts = PatternOptions::default();
    for case in sweep_structures(6, 120, 5) {
        let a = case.structure.assemble();
        let p = full_pattern(&case.structure, &opts);
        let rep = check_transversality(&a, &p, DEFAULT_TOL).unwrap();
        assert_eq!(rep.tangent_rank, svd_rank(&brute_tangent(&a), DEFAULT_TOL), "{}", case.structure);
        assert_eq!(rep.combined_rank, svd_rank(&brute_combined(&a, &p), DEFAULT_TOL), "{}", case.structure);
    }
    let id = ComplexMatrix::identity(2);
    let both = pat(2, &[(1, 2), (2, 1)]);
    assert_eq!(svd_rank(&brute_combined(&id, &both), DEFAULT_TOL), 4);
    assert_eq!(check_transversality(&id, &both, DEFAULT_TOL).unwrap().verdict, Verdict::SumNotDirect);
}

#[test]
fn projection_matches_dense_solve() {
    let id = ComplexMatrix::identity(2);
    let p = pat(2, &[(2, 1)]);
    let mut c = ComplexMatrix::zeros(2, 2);
    c[(0, 1)] = C64::new(1.0, 0.0);
    // unknowns: vec X (4) and d (1); T vec X − d e_21 = −vec C
    let mut sys = brute_tangent(&id).insert_column(4, C64::new(0.0, 0.0));
    sys[(vec_index(1, 0, 2), 4)] = C64::new(-1.0, 0.0);
    let rhs = nalgebra::DVector::from_vec(c.vectorize().iter().map(|z| -z).collect());
    let sol = sys.pseudo_inverse(1e-12).unwrap() * rhs;
    let (d, _) = project_onto_pattern(&id, &p, &c, DEFAULT_TOL).unwrap();
    assert!((d[(1, 0)] - sol[4]).norm() < 1e-12);
    assert_eq!(d[(0, 0)], C64::new(0.0, 0.0));
    assert_eq!(d[(0, 1)], C64::new(0.0, 0.0));
    assert_eq!(d[(1, 1)], C64::new(0.0, 0.0));
}

#[test]
fn greedy_count_equals_codimension() {
    let s = CanonicalStructure::parse_inline("H1(2,0) H1(0.5,0)").unwrap();
    let g = greedy_miniversal(&s.assemble(), DEFAULT_TOL).unwrap();
    assert_eq!(g.len(), codimension(&s));
    for case in sweep_structures(6, 80, 9) {
        let g = greedy_miniversal(&case.structure.assemble(), DEFAULT_TOL).unwrap();
        assert_eq!(g.len(), codimension(&case.structure), "{}", case.structure);
    }
}

#[test]
fn blockwise_and_global_tests_agree() {
    let opts = PatternOptions::default();
    for case in sweep_structures(7, 200, 21) {
        let blocks = case.structure.blocks();
        if blocks.len() != 2 {
            continue;
        }
        let (b1, b2) = (&blocks[0], &blocks[1]);
        let (ji, ij) = offdiagonal_pattern(b1, b2, &opts);
        let pair = check_pair_transversality(&b1.matrix(), &b2.matrix(), &ji, &ij, DEFAULT_TOL).unwrap();
        let d1 = check_transversality(&b1.matrix(), &diagonal_pattern(b1, &opts), DEFAULT_TOL).unwrap();
        let d2 = check_transversality(&b2.matrix(), &diagonal_pattern(b2, &opts), DEFAULT_TOL).unwrap();
        let global = check_transversality(
            &case.structure.assemble(),
            &full_pattern(&case.structure, &opts),
            DEFAULT_TOL,
        )
        .unwrap();
        assert_eq!(
            global.is_direct_sum(),
            pair.is_direct_sum() && d1.is_direct_sum() && d2.is_direct_sum(),
            "{}",
            case.structure
        );
        // corrupt the pair pattern: the blockwise test must notice
        let first = ji.iter().next();
        if let Some((i, j)) = first {
            let mut fewer = ji.clone();
            fewer.remove(i, j);
            let rep = check_pair_transversality(&b1.matrix(), &b2.matrix(), &fewer, &ij, DEFAULT_TOL).unwrap();
            assert_eq!(rep.verdict, Verdict::NotSpanning);
        }
    }
}

#[test]
fn corrections_land_on_the_pattern() {
    let a = ComplexMatrix::identity(2);
    let p = pat(2, &[(2, 1)]);
    let setup = ReducerSetup::prepare(&a, &p, DEFAULT_TOL).unwrap();
    for i in 1..=2 {
        for j in 1..=2 {
            let f = setup.correction(i, j);
            let mut img = &(&f.transpose() * &a) + &(&a * f);
            img[(i - 1, j - 1)] += C64::new(1.0, 0.0);
            assert!(miniversal::matcore::masked_norm(&img, &p).unwrap() < 1e-12);
        }
    }
    assert_eq!(setup.correction(2, 1).frobenius_norm(), 0.0);
}

#[test]
fn reduction_of_identity_perturbation() {
    let a = ComplexMatrix::identity(2);
    let p = pat(2, &[(2, 1)]);
    let setup = ReducerSetup::prepare(&a, &p, DEFAULT_TOL).unwrap();
    let e = random_perturbation(2, 1e-6, &mut case_rng(31, 0));
    let r = reduce(&setup, &e, ReduceOptions::default()).unwrap();
    assert!(r.trace.converged);
    assert!(r.trace.iterations <= 6);
    let moved = &(&r.s.transpose() * &(&a + &e)) * &r.s;
    let diff = &moved - &a;
    assert!(miniversal::matcore::masked_norm(&diff, &p).unwrap() < 1e-12);
    assert!(close(&diff, &r.d, 1e-12));
}

#[test]
fn reduction_matches_linearization_to_second_order() {
    let s = CanonicalStructure::parse_inline("H1(2,0) G1").unwrap();
    let a = s.assemble();
    let p = full_pattern(&s, &PatternOptions::default());
    let setup = ReducerSetup::prepare(&a, &p, DEFAULT_TOL).unwrap();
    for (k, size) in [1e-3, 1e-4, 1e-5].into_iter().enumerate() {
        let e = random_perturbation(3, size, &mut case_rng(32, k));
        let r = reduce(&setup, &e, ReduceOptions::default()).unwrap();
        let (lin, _) = project_onto_pattern(&a, &p, &e, DEFAULT_TOL).unwrap();
        let gap = (&r.d - &lin).frobenius_norm();
        assert!(gap < 50.0 * size * size, "gap {gap:e} at |E| = {size:e}");
    }
}

#[test]
fn every_iterate_is_congruent_to_the_start() {
    let s = CanonicalStructure::parse_inline("G2 J1").unwrap();
    let a = s.assemble();
    let p = full_pattern(&s, &PatternOptions::default());
    let setup = ReducerSetup::prepare(&a, &p, DEFAULT_TOL).unwrap();
    let e = random_perturbation(3, 1e-3, &mut case_rng(33, 0));
    let start = &a + &e;
    let mut m = e.clone();
    let mut acc = ComplexMatrix::identity(3);
    for _ in 0..4 {
        let (next, c) = step(&setup, &m);
        acc = &acc + &(&acc * &c);
        let lhs = &(&acc.transpose() * &start) * &acc;
        let rhs = &a + &next;
        assert!((&lhs - &rhs).frobenius_norm() <= 1e-10 * (1.0 + rhs.frobenius_norm()));
        m = next;
    }
}

#[test]
fn final_deformation_does_not_depend_on_eps() {
    let s = CanonicalStructure::parse_inline("H1(-1,0) J1").unwrap();
    let a = s.assemble();
    let p = full_pattern(&s, &PatternOptions::default());
    let setup = ReducerSetup::prepare(&a, &p, DEFAULT_TOL).unwrap();
    let e = random_perturbation(3, 1e-5, &mut case_rng(34, 0));
    let r1 = reduce(&setup, &e, ReduceOptions::default()).unwrap();
    let r2 = reduce(
        &setup,
        &e,
        ReduceOptions {
            eps: Some(0.5 * setup.eps_max()),
            ..Default::default()
        },
    )
    .unwrap();
    assert!((&r1.d - &r2.d).frobenius_norm() <= 10.0 * 1e-12 * (1.0 + setup.a()));
}

#[test]
fn svd_oracle_sees_the_same_codimension() {
    for case in sweep_structures(5, 60, 77) {
        let a = case.structure.assemble();
        let n = a.rows();
        let rank = svd_rank(&brute_tangent(&a), DEFAULT_TOL);
        assert_eq!(codimension(&case.structure), n * n - rank, "{}", case.structure);
    }
}
