use num_bigint::BigUint;
use syzygy_core::bott::{bott_cohomology, corollary_table, en_term_weight, BottResult};
use syzygy_core::rep::{binom, count_table, expected_strand_dim, factorial, grass_strand_dims};

#[test]
fn count_identities_up_to_sixteen() {
    for k in 2..=16 {
        let t = count_table(k).unwrap();
        assert_eq!(t.dim_v_via_betti, t.dim_v_via_binomial);
        assert_eq!(t.dim_v, binom(2 * k - 1, k - 2));
        assert_eq!(t.deg_dual_grass, t.deg_w1);
        assert_eq!(t.deg_w1, t.scrollar_lines);
        // Catalan numbers by an independent recurrence
        let catalan = factorial(2 * k) / (factorial(k) * factorial(k + 1));
        assert_eq!(t.scrollar_lines, catalan);
        assert_eq!(expected_strand_dim(2 * k, k - 2).unwrap(), t.dim_v);
    }
    assert_eq!(count_table(16).unwrap().dim_v, BigUint::from(265_182_525u64));
    assert_eq!(count_table(16).unwrap().scrollar_lines, BigUint::from(35_357_670u64));
}

#[test]
fn top_grassmannian_strand_is_a_symmetric_power() {
    for k in 2..=10 {
        let dims = grass_strand_dims(k + 2).unwrap();
        assert_eq!(dims.len(), k - 1);
        // dim S^{k-2} of a (k+2)-dimensional space
        assert_eq!(dims[k - 2], binom(2 * k - 1, k - 2));
    }
}

#[test]
fn eagon_northcott_terms_have_no_cohomology_but_one() {
    for k in 2..=8 {
        let table = corollary_table(k).unwrap();
        assert_eq!(table.len(), k);
        for row in &table {
            assert_eq!(row.weight, en_term_weight(k, row.j).unwrap());
            if row.j + 2 <= k {
                assert_eq!(row.result, BottResult::AllVanish, "k = {k}, j = {}", row.j);
            } else {
                assert_eq!(row.result.i0(), Some(k), "k = {k}, j = {}", row.j);
            }
        }
    }
}

#[test]
fn corollary_witnesses() {
    // δ + λ = (2, 4, 3, 2, 0): the first and fourth coordinates tie
    assert_eq!(bott_cohomology(&[-3, 0, 0, 0, -1]).unwrap(), BottResult::AllVanish);
    // δ + λ = (1, 4, 3, 2, -1): three inversions
    let BottResult::Single { i0, dominant, dim } = bott_cohomology(&[-4, 0, 0, 0, -2]).unwrap() else {
        panic!("expected a single nonvanishing degree");
    };
    assert_eq!(i0, 3);
    // the dual of the standard representation
    assert_eq!(dominant, vec![-1, -1, -1, -1, -2]);
    assert_eq!(dim, BigUint::from(5u32));
}
