//! Cross-module checks of the structural results over small fields.

use simds::census::{self, CensusOptions, EnumerateMode, MatrixTarget, SetName};
use simds::construct::{build_mat3, build_matrix, build_raw, extract_xy, sum_conditions, SiParams};
use simds::mat3;
use simds::si::{si_check_3x3, si_oracle};
use simds::{DiagonalMatrix, Elem, Field, Permutation, SquareMatrix};

fn all_3x3(f: &Field) -> impl Iterator<Item = SquareMatrix> + '_ {
    let q = f.order();
    (0..q.pow(9)).map(move |mut code| {
        let mut e = [Elem::ZERO; 9];
        for slot in e.iter_mut() {
            *slot = Elem((code % q) as u16);
            code /= q;
        }
        SquareMatrix::from_mat3(f, e)
    })
}

/// Every irreducible SI matrix over GF(4) comes from the eight-parameter
/// family with its own diagonal and associated D. Over GF(4) all of them have
/// a zero diagonal entry, so the raw builder (zeros allowed) is used.
#[test]
fn irreducible_si_matrices_have_parameters_gf4() {
    let f = Field::binary(2, 0b111).unwrap();
    let nz = f.elements(true);
    let mut irreducible = 0;
    for a in all_3x3(&f) {
        if a.det().is_zero() || a.is_reducible().unwrap() {
            continue;
        }
        let v = si_oracle(&a).unwrap();
        let Some(d) = v.witness else { continue };
        irreducible += 1;
        let m = a.as_mat3().unwrap();
        let diag = [m[0], m[4], m[8]];
        assert!(diag.iter().any(|e| e.is_zero()));
        let dd = [d.diag()[0], d.diag()[1], d.diag()[2]];
        let hit = nz.iter().any(|&x| nz.iter().any(|&y| build_raw(&f, &diag, &dd, x, y) == Some(m)));
        assert!(hit, "{a:?} with {d:?}");
        assert!(v.scalar_c.is_some());
    }
    assert_eq!(irreducible, 1458);
}

/// Over GF(8) every nowhere-zero SI matrix is recovered by `extract_xy`.
#[test]
fn nowhere_zero_si_matrices_have_parameters_gf8() {
    let f = Field::binary(3, 0b1101).unwrap();
    let e = census::enumerate_si_mds(&f, EnumerateMode { dedup: true, emit: true }, &CensusOptions::default()).unwrap();
    for m in e.matrices.unwrap().iter().step_by(13) {
        let a = SquareMatrix::from_mat3(&f, *m);
        let v = si_check_3x3(&a).unwrap();
        let (x, y) = extract_xy(&a, v.witness.as_ref().unwrap()).unwrap().expect("parameters exist");
        let d = v.witness.unwrap();
        let p = SiParams::new(&f, [m[0], m[4], m[8]], [d.diag()[0], d.diag()[1], d.diag()[2]], x, y).unwrap();
        assert_eq!(build_mat3(&p), *m);
    }
}

/// Zero-containing irreducible SI matrices over GF(8), sampled: the family
/// with zeros allowed on the diagonal still covers them.
#[test]
fn sampled_irreducible_si_with_zeros_gf8() {
    use rand::{Rng, SeedableRng};
    let f = Field::binary(3, 0b1011).unwrap();
    let nz = f.elements(true);
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(42);
    let mut seen = 0;
    for _ in 0..300_000 {
        let mut m = [Elem::ZERO; 9];
        for e in m.iter_mut() {
            *e = Elem(rng.gen_range(0..8));
        }
        m[rng.gen_range(0..3) * 4] = Elem::ZERO;
        let a = SquareMatrix::from_mat3(&f, m);
        if a.det().is_zero() || a.is_reducible().unwrap() {
            continue;
        }
        let Some(d) = si_oracle(&a).unwrap().witness else { continue };
        seen += 1;
        let diag = [m[0], m[4], m[8]];
        let dd = [d.diag()[0], d.diag()[1], d.diag()[2]];
        assert!(nz.iter().any(|&x| nz.iter().any(|&y| build_raw(&f, &diag, &dd, x, y) == Some(m))), "{a:?}");
    }
    assert!(seen > 0);
}

#[test]
fn mds_iff_sums_nonzero_sampled_gf16() {
    use rand::{Rng, SeedableRng};
    let f = Field::binary(4, 0b11001).unwrap();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(8);
    for _ in 0..200_000 {
        let v: [u32; 8] = std::array::from_fn(|_| rng.gen_range(1..16));
        let p = SiParams::from_reprs(&f, v).unwrap();
        assert_eq!(mat3::is_mds3(&f, &build_mat3(&p)), sum_conditions(&p).all_nonzero());
    }
}

#[test]
fn mds_invariant_under_transpose_and_conjugation_gf8() {
    let f = Field::binary(3, 0b1011).unwrap();
    let perms = Permutation::all(3);
    let e = census::enumerate_si_mds(&f, EnumerateMode { dedup: true, emit: true }, &CensusOptions::default()).unwrap();
    for (k, m) in e.matrices.unwrap().iter().enumerate().step_by(17) {
        let a = SquareMatrix::from_mat3(&f, *m);
        assert!(a.transpose().is_mds());
        assert!(a.perm_conjugate(&perms[k % 6]).unwrap().is_mds());
        // a zero entry destroys it
        let mut z = *m;
        z[k % 9] = Elem::ZERO;
        assert!(!SquareMatrix::from_mat3(&f, z).is_mds());
    }
}

#[test]
fn counts_do_not_depend_on_worker_count() {
    let f = Field::binary(3, 0b1101).unwrap();
    let base = census::tuple_counts(&f, &CensusOptions::with_jobs(1)).unwrap();
    let inv = census::exhaustive_matrix_census(&f, MatrixTarget::InvMds, &CensusOptions::with_jobs(1)).unwrap();
    for jobs in [2, 3, 7] {
        let opts = CensusOptions::with_jobs(jobs);
        assert_eq!(census::tuple_counts(&f, &opts).unwrap(), base);
        assert_eq!(census::exhaustive_matrix_census(&f, MatrixTarget::InvMds, &opts).unwrap(), inv);
    }
    let e1 = census::enumerate_si_mds(&f, EnumerateMode { dedup: true, emit: true }, &CensusOptions::with_jobs(1));
    let e3 = census::enumerate_si_mds(&f, EnumerateMode { dedup: true, emit: true }, &CensusOptions::with_jobs(3));
    assert_eq!(e1.unwrap(), e3.unwrap());
}

#[test]
fn s_family_partition_gf16() {
    let f = Field::binary(4, 0b11001).unwrap();
    let c = census::tuple_counts(&f, &CensusOptions::default()).unwrap();
    assert_eq!(c.0[1..].iter().sum::<u128>(), c.0[0]);
    for set in &SetName::S_FAMILY[1..] {
        assert_eq!(c.get(*set), Some(census::formula_count(*set, 4).unwrap()), "{set}");
    }
    assert_eq!(c.0[0], census::partition_formula_sum(4).unwrap());
    // one factor (q-1) more than the single closed form for S
    assert_eq!(c.0[0], census::formula_count(SetName::S, 4).unwrap() * 15);
}

#[test]
fn scaling_d_leaves_matrix_unchanged() {
    let f = Field::binary(3, 0b1011).unwrap();
    let p = SiParams::from_reprs(&f, [3, 5, 6, 1, 2, 4, 7, 3]).unwrap();
    let base = build_matrix(&p);
    for mu in f.elements(true) {
        let d = p.d.map(|di| f.mul(mu, di));
        let q = SiParams::new(&f, p.a, d, p.x, p.y).unwrap();
        assert_eq!(build_matrix(&q), base);
    }
    let w = DiagonalMatrix::new(&f, p.d.to_vec()).unwrap();
    assert_eq!(extract_xy(&base, &w).unwrap(), Some((p.x, p.y)));
}
