use super::*;
use crate::model::canonicalize_system;
use crate::ratereg::hk_system;
use proptest::prelude::*;

fn elements(v: &[&[u32]]) -> Vec<HilbertBasisElement> {
    let mut out: Vec<_> = v
        .iter()
        .map(|m| HilbertBasisElement { multipliers: m.to_vec() })
        .collect();
    out.sort();
    out
}

fn unit_sum(m: usize, ones: &[usize]) -> Vec<u32> {
    let mut v = vec![0; m];
    for &i in ones {
        v[i - 1] += 1;
    }
    v
}

/// e1, e5, e2+e6, e3+e7, e4+e8, e2+e3+e8, e4+e6+e7 (1-based rows).
fn hk2_expected() -> Vec<HilbertBasisElement> {
    let sets: [&[usize]; 7] = [&[1], &[5], &[2, 6], &[3, 7], &[4, 8], &[2, 3, 8], &[4, 6, 7]];
    let mut out: Vec<_> = sets
        .iter()
        .map(|s| HilbertBasisElement { multipliers: unit_sum(8, s) })
        .collect();
    out.sort();
    out
}

#[test]
fn small_bases() {
    let limits = HilbertLimits::default();
    let zero = DiophantineMatrix::from_i64(&[&[0], &[0]]).unwrap();
    assert_eq!(hilbert_basis(&zero, limits).unwrap(), elements(&[&[1, 0], &[0, 1]]));
    let balance = DiophantineMatrix::from_i64(&[&[1], &[-1]]).unwrap();
    assert_eq!(hilbert_basis(&balance, limits).unwrap(), elements(&[&[1, 1]]));
    let double = DiophantineMatrix::from_i64(&[&[2], &[-1]]).unwrap();
    assert_eq!(hilbert_basis(&double, limits).unwrap(), elements(&[&[1, 2]]));
}

#[test]
fn brute_force_small() {
    let balance = DiophantineMatrix::from_i64(&[&[1], &[-1]]).unwrap();
    assert_eq!(brute_force_minimal_solutions(&balance, 3).unwrap(), elements(&[&[1, 1]]));
    let zero = DiophantineMatrix::from_i64(&[&[0]]).unwrap();
    assert_eq!(brute_force_minimal_solutions(&zero, 2).unwrap(), elements(&[&[1]]));
    assert!(matches!(brute_force_minimal_solutions(&zero, 0), Err(Error::Usage(_))));

    let one: &[i64] = &[1];
    let wide = DiophantineMatrix::from_i64(&[one; 30]).unwrap();
    assert!(matches!(brute_force_minimal_solutions(&wide, 3), Err(Error::Usage(_))));
}

#[test]
fn hk2_dual_matrix_and_basis() {
    let s = hk_system(2).unwrap();
    let b = dual_matrix(&s).unwrap();
    let col = |j| b.column(j).iter().map(|x| x.to_i64().unwrap()).collect::<Vec<_>>();
    assert_eq!(col(0), [0, 0, -1, -1, 0, 0, 1, 1]);
    assert_eq!(col(1), [0, 1, 0, 1, 0, -1, 0, -1]);

    let oracle = brute_force_minimal_solutions(&b, 3).unwrap();
    assert_eq!(oracle, hk2_expected());
    assert_eq!(hilbert_basis(&b, HilbertLimits::default()).unwrap(), oracle);
}

#[test]
fn dual_matrix_scaling_and_zero_columns() {
    let s = InequalitySystem::from_text(&["R1", "R1c"], &["R1c"], &["I_a"], &["1/2 R1 + 1/2 R1c <= I_a"]).unwrap();
    let b = dual_matrix(&s).unwrap();
    assert_eq!(b.entries(), &[vec![BigInt::from(1)]]);
    assert_eq!(b.row_scales(), &[Rational::from(2)]);

    let untouched = InequalitySystem::from_text(&["x", "y"], &["y"], &["a", "b"], &["x <= a", "2 x <= b"]).unwrap();
    let b = dual_matrix(&untouched).unwrap();
    assert!(b.entries().iter().flatten().all(Zero::is_zero));

    let nothing = InequalitySystem::from_text(&["x"], &[], &[], &["x <= 1"]).unwrap();
    assert!(matches!(dual_matrix(&nothing), Err(Error::Usage(_))));
}

#[test]
fn raw_matrix_format() {
    let b = DiophantineMatrix::parse_raw("1\n-1\n").unwrap();
    assert_eq!(b, DiophantineMatrix::from_i64(&[&[1], &[-1]]).unwrap());
    assert_eq!(b.to_string(), "1\n-1\n");
    assert!(matches!(DiophantineMatrix::parse_raw("1 2\n3\n"), Err(Error::MalformedMatrix(_))));
    assert!(matches!(DiophantineMatrix::parse_raw("1 x\n"), Err(Error::MalformedMatrix(_))));
}

#[test]
fn limits_fail_loudly() {
    let b = DiophantineMatrix::from_i64(&[&[7], &[-5]]).unwrap();
    let tight = HilbertLimits { max_frontier: 1000, max_norm: 4 };
    match hilbert_basis(&b, tight) {
        Err(Error::Resource { limit: "max_norm", stats }) => assert!(stats.level >= 4),
        other => panic!("expected resource error, got {other:?}"),
    }
    let narrow = HilbertLimits { max_frontier: 1, max_norm: 100 };
    let hk = dual_matrix(&hk_system(2).unwrap()).unwrap();
    assert!(matches!(
        hilbert_basis(&hk, narrow),
        Err(Error::Resource { limit: "max_frontier", .. })
    ));
    assert_eq!(
        hilbert_basis(&b, HilbertLimits::default()).unwrap(),
        elements(&[&[5, 7]])
    );
}

#[test]
fn bigint_path_agrees_with_machine_integers() {
    let big: BigInt = BigInt::from(i64::MAX) * 4;
    let b = DiophantineMatrix::new(vec![vec![big.clone()], vec![-big.clone()], vec![-(&big * BigInt::from(2))]]).unwrap();
    assert_eq!(
        hilbert_basis(&b, HilbertLimits::default()).unwrap(),
        elements(&[&[1, 1, 0], &[2, 0, 1]])
    );
}

#[test]
fn duality_on_hk2() {
    let s = hk_system(2).unwrap();
    let out = eliminate_by_duality(&s, &DualityOptions { drop_trivial: true, ..Default::default() }).unwrap();
    let expected = InequalitySystem::from_text(
        &["R1", "R2"],
        &[],
        &["I_1_00", "I_1_01", "I_1_10", "I_1_11", "I_2_00", "I_2_01", "I_2_10", "I_2_11"],
        &[
            "R1 <= I_1_00",
            "R2 <= I_2_00",
            "R1 + R2 <= I_1_01 + I_2_01",
            "R1 + R2 <= I_1_10 + I_2_10",
            "R1 + R2 <= I_1_11 + I_2_11",
            "2 R1 + R2 <= I_1_01 + I_1_10 + I_2_11",
            "R1 + 2 R2 <= I_1_11 + I_2_01 + I_2_10",
        ],
    )
    .unwrap();
    assert_eq!(out.system.rows().len(), 7);
    assert_eq!(canonicalize_system(&out.system), canonicalize_system(&expected));
    assert_eq!(out.report.constraint_count, 8);
    assert_eq!(out.report.aux_var_count, 2);
    assert_eq!(out.report.basis_element_count, 7);
    assert_eq!(out.certificates, hk2_expected());
    for ((row, h), comb) in out.system.rows().iter().zip(&out.certificates).zip(&out.combinations) {
        assert!(dual_matrix(&s).unwrap().annihilates(&h.multipliers));
        assert!(comb.verify(&s, row));
    }
}

#[test]
fn lone_row_projects_to_nothing() {
    let s = InequalitySystem::from_text(&["y"], &["y"], &["s1"], &["y <= s1"]).unwrap();
    let dropped = eliminate_by_duality(&s, &DualityOptions { drop_trivial: true, ..Default::default() }).unwrap();
    assert!(dropped.system.rows().is_empty());
    assert_eq!(dropped.report.basis_element_count, 0);

    let s = InequalitySystem::from_text(&["x", "y"], &["y"], &["s1", "s2"], &["y <= s1", "x <= s2"]).unwrap();
    let kept = eliminate_by_duality(&s, &DualityOptions::default()).unwrap();
    assert_eq!(kept.system.rows().len(), 1);
    assert_eq!(kept.system.display_row(&kept.system.rows()[0]), "x <= s2");
}

#[test]
fn trivial_rows_kept_unless_vacuous() {
    // 2y <= s1, -y <= s2 - 3: the combination 0 <= s1 + 2 s2 - 6 is not vacuous.
    let s = InequalitySystem::from_text(&["y"], &["y"], &["s1", "s2"], &["2 y <= s1", "-y <= s2 - 3"]).unwrap();
    let out = eliminate_by_duality(&s, &DualityOptions { drop_trivial: true, ..Default::default() }).unwrap();
    assert_eq!(out.system.rows().len(), 1);
    assert_eq!(out.system.display_row(&out.system.rows()[0]), "0 <= s1 + 2 s2 - 6");
    assert_eq!(out.report.trivial_dropped, 0);

    let mut free = InequalitySystem::from_text(&["y"], &["y"], &["s1", "s2"], &["2 y <= s1", "-y <= s2"]).unwrap();
    free.set_symbols_nonnegative(false);
    let out = eliminate_by_duality(&free, &DualityOptions { drop_trivial: true, ..Default::default() }).unwrap();
    assert_eq!(out.system.rows().len(), 1);
}

fn matrix_strategy() -> impl Strategy<Value = Vec<Vec<i64>>> {
    (1usize..=5, 1usize..=2).prop_flat_map(|(m, e)| prop::collection::vec(prop::collection::vec(-2i64..=2, e), m))
}

fn to_matrix(rows: &[Vec<i64>]) -> DiophantineMatrix {
    DiophantineMatrix::new(rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn matches_brute_force_oracle(rows in matrix_strategy()) {
        let b = to_matrix(&rows);
        let basis = hilbert_basis(&b, HilbertLimits::default()).unwrap();
        let bound = 4;
        if basis.iter().all(|h| h.multipliers.iter().all(|&k| k <= bound)) {
            prop_assert_eq!(brute_force_minimal_solutions(&b, bound).unwrap(), basis);
        }
    }

    #[test]
    fn basis_is_minimal_and_sound(rows in matrix_strategy()) {
        let b = to_matrix(&rows);
        let basis = hilbert_basis(&b, HilbertLimits::default()).unwrap();
        for (i, h) in basis.iter().enumerate() {
            prop_assert!(h.norm() > 0);
            prop_assert!(b.annihilates(&h.multipliers));
            for (j, g) in basis.iter().enumerate() {
                if i != j {
                    prop_assert!(!g.dominated_by(h));
                }
            }
        }
    }

    #[test]
    fn row_permutation_permutes_basis(rows in matrix_strategy(), shift in 0usize..5) {
        let m = rows.len();
        let k = shift % m;
        let mut rotated = rows.clone();
        rotated.rotate_left(k);
        let basis = hilbert_basis(&to_matrix(&rows), HilbertLimits::default()).unwrap();
        let mut expected: Vec<_> = basis
            .into_iter()
            .map(|mut h| { h.multipliers.rotate_left(k); h })
            .collect();
        expected.sort();
        prop_assert_eq!(hilbert_basis(&to_matrix(&rotated), HilbertLimits::default()).unwrap(), expected);
    }
}
