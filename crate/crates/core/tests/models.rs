use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use syzygy_core::gensyz::{
    classify_point, gensyz_equations, make_generic_syzygy, random_solution_point, PointClass,
    Regime, Witness,
};
use syzygy_core::polyring::binomial;
use syzygy_core::syzygy::{linear_strand, syzygy_rank, syzygy_scheme_ideal};
use syzygy_core::{Matrix, PrimeField, Subspace};

const CASES: [(usize, usize); 5] = [(1, 2), (1, 3), (1, 4), (2, 4), (2, 5)];

fn f101() -> PrimeField {
    PrimeField::new(101).unwrap()
}

#[test]
fn generic_syzygies() {
    let f = f101();
    for (p, r) in CASES {
        let m = gensyz_equations(f, p, r).unwrap();
        assert_eq!(m.ideal.num_quadrics(), binomial(r, r - p));
        let s = make_generic_syzygy(&m).unwrap();
        assert_eq!(syzygy_rank(&m.ideal, &s).rank, r, "p={p} r={r}");
        let scheme = syzygy_scheme_ideal(&m.ideal, &s).unwrap();
        assert_eq!(scheme.space(), m.ideal.quadrics().space());
        // s_gen lies in the computed strand
        let strand = linear_strand(&m.ideal, p).unwrap();
        assert!(Subspace::span(strand.koszul_basis(p)).contains(s.koszul()));
    }
}

#[test]
fn grassmannian_dichotomy_fuzz() {
    let f = f101();
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for (p, r) in CASES.into_iter().filter(|&(p, r)| r == p + 3) {
        let m = gensyz_equations(f, p, r).unwrap();
        assert_eq!(m.regime, Regime::Grassmannian);
        for _ in 0..500 {
            let x = random_solution_point(&m, &mut rng);
            assert_eq!(classify_point(&m, &x).unwrap(), PointClass::OnGrassmannianPart);
        }
        let mut x = vec![0u64; m.n_vars()];
        x[r] = 1;
        assert_eq!(classify_point(&m, &x).unwrap(), PointClass::Both);
        for v in x.iter_mut().skip(r) {
            *v = f.random_nonzero(&mut rng);
        }
        assert_eq!(classify_point(&m, &x).unwrap(), PointClass::OnLinearPart);
        // a point off the zero set: l = e_0 together with a generic a
        let mut y: Vec<u64> = (0..m.n_vars()).map(|i| (i as u64 * 7 + 3) % 101).collect();
        y[..r].fill(0);
        y[0] = 1;
        assert_eq!(classify_point(&m, &y).unwrap(), PointClass::Outside);
    }
}

#[test]
fn scrollar_points_lie_on_the_segre() {
    let f = f101();
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    for (p, r) in CASES.into_iter().filter(|&(p, r)| r == p + 2) {
        let m = gensyz_equations(f, p, r).unwrap();
        let Some(Witness::Scroll { rows }) = &m.witness else {
            panic!("scrollar model without a 2-row witness");
        };
        for _ in 0..100 {
            let x = random_solution_point(&m, &mut rng);
            let mat = Matrix::from_rows(
                f,
                rows[0].len(),
                &[rows[0].iter().map(|&i| x[i]).collect(), rows[1].iter().map(|&i| x[i]).collect()],
            );
            assert!(mat.rank() <= 1);
        }
    }
}
