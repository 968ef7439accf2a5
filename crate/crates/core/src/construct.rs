//! Explicit 3×3 constructions over GF(2^m).
//!
//! [`build_matrix`] realizes the eight-parameter family
//!
//! ```text
//!     [ a11              s13·x/d2      s12·xy/d3 ]
//! A = [ s23/(d1·x)       a22           s12·y/d3  ]
//!     [ s23/(d1·xy)      s13/(d2·y)    a33       ]
//! ```
//!
//! with `s_ij = a_ii·d_i + a_jj·d_j`. With `s = a11·d1 + a22·d2 + a33·d3`,
//! `A·D·A = s^2·D^{-1}` and `det A = s^3/(d1·d2·d3)`; `A` is MDS exactly when
//! `s12`, `s13`, `s23` and `s` are all nonzero.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{Elem, Field};
use crate::mat3::{self, Mat3};
use crate::matrix::{DiagonalMatrix, SquareMatrix};

/// The eight parameters `(a11, a22, a33, d1, d2, d3, x, y)`, all nonzero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SiParams {
    field: Field,
    pub a: [Elem; 3],
    pub d: [Elem; 3],
    pub x: Elem,
    pub y: Elem,
}

impl SiParams {
    pub fn new(field: &Field, a: [Elem; 3], d: [Elem; 3], x: Elem, y: Elem) -> Result<Self> {
        if !field.is_char2() {
            return Err(Error::invalid(format!("construction needs characteristic 2, got {}", field.spec())));
        }
        let all = a.iter().chain(&d).chain([&x, &y]);
        for e in all {
            if !field.spec().contains(*e) {
                return Err(Error::invalid(format!("element {e} out of range for {}", field.spec())));
            }
            if e.is_zero() {
                return Err(Error::invalid("all eight parameters must be nonzero"));
            }
        }
        Ok(SiParams { field: field.clone(), a, d, x, y })
    }

    /// From reprs in the order `a11, a22, a33, d1, d2, d3, x, y`.
    pub fn from_reprs(field: &Field, v: [u32; 8]) -> Result<Self> {
        let e = v.map(|r| field.element(r));
        let mut out = [Elem::ZERO; 8];
        for (o, r) in out.iter_mut().zip(e) {
            *o = r?;
        }
        SiParams::new(field, [out[0], out[1], out[2]], [out[3], out[4], out[5]], out[6], out[7])
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn witness(&self) -> DiagonalMatrix {
        DiagonalMatrix::new(&self.field, self.d.to_vec()).expect("validated")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SumConditions {
    pub s12: Elem,
    pub s13: Elem,
    pub s23: Elem,
    pub s: Elem,
    pub s12_nonzero: bool,
    pub s13_nonzero: bool,
    pub s23_nonzero: bool,
    pub s_nonzero: bool,
}

impl SumConditions {
    pub fn all_nonzero(&self) -> bool {
        self.s12_nonzero && self.s13_nonzero && self.s23_nonzero && self.s_nonzero
    }
}

#[inline]
fn sums(f: &Field, a: &[Elem; 3], d: &[Elem; 3]) -> (Elem, Elem, Elem, Elem) {
    let t = [f.mul(a[0], d[0]), f.mul(a[1], d[1]), f.mul(a[2], d[2])];
    let s12 = f.add(t[0], t[1]);
    (s12, f.add(t[0], t[2]), f.add(t[1], t[2]), f.add(s12, t[2]))
}

pub fn sum_conditions(p: &SiParams) -> SumConditions {
    let f = &p.field;
    let (s12, s13, s23, s) = sums(f, &p.a, &p.d);
    let t2 = f.mul(p.a[1], p.d[1]);
    let t3 = f.mul(p.a[2], p.d[2]);
    assert_eq!(s, f.add(s13, t2), "s = s13 + a22 d2");
    assert_eq!(s, f.add(s12, t3), "s = s12 + a33 d3");
    SumConditions {
        s12,
        s13,
        s23,
        s,
        s12_nonzero: !s12.is_zero(),
        s13_nonzero: !s13.is_zero(),
        s23_nonzero: !s23.is_zero(),
        s_nonzero: !s.is_zero(),
    }
}

/// The family's matrix for arbitrary diagonal entries (zeros allowed).
/// `None` when one of `d1, d2, d3, x, y` is zero.
#[inline]
pub fn build_raw(f: &Field, a: &[Elem; 3], d: &[Elem; 3], x: Elem, y: Elem) -> Option<Mat3> {
    let di = [f.inv(d[0])?, f.inv(d[1])?, f.inv(d[2])?];
    let xi = f.inv(x)?;
    let yi = f.inv(y)?;
    let (s12, s13, s23, _) = sums(f, a, d);
    let xy = f.mul(x, y);
    let xyi = f.mul(xi, yi);
    let u = f.mul(s13, di[1]);
    let v = f.mul(s12, di[2]);
    let w = f.mul(s23, di[0]);
    Some([
        a[0],
        f.mul(u, x),
        f.mul(v, xy),
        f.mul(w, xi),
        a[1],
        f.mul(v, y),
        f.mul(w, xyi),
        f.mul(u, yi),
        a[2],
    ])
}

pub fn build_mat3(p: &SiParams) -> Mat3 {
    build_raw(&p.field, &p.a, &p.d, p.x, p.y).expect("validated nonzero parameters")
}

pub fn build_matrix(p: &SiParams) -> SquareMatrix {
    SquareMatrix::from_mat3(&p.field, build_mat3(p))
}

/// `(det A, diag(A·D·A))` predicted by the closed forms.
pub fn predicted_invariants(p: &SiParams) -> (Elem, [Elem; 3]) {
    let f = &p.field;
    let s = sum_conditions(p).s;
    let s2 = f.mul(s, s);
    let dprod = f.prod(&p.d);
    let det = f.mul(f.mul(s2, s), f.inv_nz(dprod));
    (det, p.d.map(|di| f.mul(s2, f.inv_nz(di))))
}

/// The nine 2×2 minors in closed form, ordered by row pair then column pair
/// (the order of [`mat3::minors2`]). Uses `b = s`, the square root of `s^2`.
pub fn minor_formulas(p: &SiParams) -> Result<[Elem; 9]> {
    let f = &p.field;
    let c = sum_conditions(p);
    if !c.all_nonzero() {
        return Err(Error::domain("minor closed forms need all four sums nonzero"));
    }
    let b = c.s;
    let [d1, d2, d3] = p.d.map(|d| f.inv_nz(d));
    let (xi, yi) = (f.inv_nz(p.x), f.inv_nz(p.y));
    let [a11, a22, a33] = p.a;
    let [e1, e2, e3] = p.d;
    Ok([
        f.prod(&[a33, b, e3, d1, d2]),
        f.prod(&[c.s12, b, p.y, d3, d1]),
        f.prod(&[c.s12, b, p.x, p.y, d2, d3]),
        f.prod(&[c.s13, b, yi, d1, d2]),
        f.prod(&[a22, b, e2, d1, d3]),
        f.prod(&[c.s13, b, p.x, d2, d3]),
        f.prod(&[c.s23, b, xi, yi, d1, d2]),
        f.prod(&[c.s23, b, xi, d1, d3]),
        f.prod(&[a11, b, e1, d2, d3]),
    ])
}

/// Recovers `(x, y)` with `build(diag(A), D, x, y) = A`, if they exist.
///
/// Returns `None` when `A` has a zero entry, `D` is singular, one of the four
/// sums vanishes, or the recovered pair does not reproduce every
/// off-diagonal entry.
pub fn extract_xy(a: &SquareMatrix, d: &DiagonalMatrix) -> Result<Option<(Elem, Elem)>> {
    let m = a.as_mat3().ok_or_else(|| Error::Dimension("extract_xy needs a 3x3 matrix".into()))?;
    if d.n() != 3 {
        return Err(Error::Dimension("extract_xy needs three diagonal entries".into()));
    }
    if a.field() != d.field() {
        return Err(Error::FieldMismatch(a.field().spec(), d.field().spec()));
    }
    let f = a.field();
    if !mat3::is_nowhere_zero(&m) || !d.is_nonsingular() {
        return Ok(None);
    }
    let diag = [m[0], m[4], m[8]];
    let dd = [d.diag()[0], d.diag()[1], d.diag()[2]];
    let (s12, s13, s23, s) = sums(f, &diag, &dd);
    if [s12, s13, s23, s].iter().any(|e| e.is_zero()) {
        return Ok(None);
    }
    let x = f.prod(&[m[1], dd[1], f.inv_nz(s13)]);
    let y = f.prod(&[m[5], dd[2], f.inv_nz(s12)]);
    Ok(build_raw(f, &diag, &dd, x, y).filter(|b| *b == m).map(|_| (x, y)))
}

fn require_char2(f: &Field) -> Result<()> {
    if f.is_char2() {
        Ok(())
    } else {
        Err(Error::invalid(format!("characteristic 2 required, got {}", f.spec())))
    }
}

/// `I + a·A + b·B` with `A = [[1,1,1],[0,0,0],[1,1,1]]` and
/// `B = [[0,0,0],[1,1,1],[1,1,1]]`; an involution for every `a, b`.
pub fn curupira_matrix(f: &Field, a: Elem, b: Elem) -> Result<SquareMatrix> {
    require_char2(f)?;
    let one = Elem::ONE;
    let ab = f.add(a, b);
    let rows = [
        [f.add(one, a), a, a],
        [b, f.add(one, b), b],
        [ab, ab, f.add(one, ab)],
    ];
    SquareMatrix::new(f.clone(), 3, rows.concat())
}

/// `a ∉ {0, 1}` and `b ∉ {0, 1, a, a+1}`.
pub fn curupira_is_mds(f: &Field, a: Elem, b: Elem) -> Result<bool> {
    require_char2(f)?;
    let one = Elem::ONE;
    Ok(!a.is_zero() && a != one && ![Elem::ZERO, one, a, f.add(a, one)].contains(&b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::si::{si_check_3x3, si_oracle};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn gf8() -> Field {
        Field::binary(3, 0b1011).unwrap()
    }

    fn random_params(f: &Field, rng: &mut impl Rng) -> SiParams {
        let q = f.order() as u16;
        let mut e = || Elem(rng.gen_range(1..q));
        SiParams::new(f, [e(), e(), e()], [e(), e(), e()], e(), e()).unwrap()
    }

    fn all_params(f: &Field) -> impl Iterator<Item = SiParams> + '_ {
        let q = f.order();
        let n = (q - 1).pow(8);
        (0..n).map(move |mut code| {
            let mut v = [0u32; 8];
            for slot in v.iter_mut().rev() {
                *slot = code % (q - 1) + 1;
                code /= q - 1;
            }
            SiParams::from_reprs(f, v).unwrap()
        })
    }

    #[test]
    fn worked_examples() {
        let g4 = Field::binary(2, 0b111).unwrap();
        let p = SiParams::from_reprs(&g4, [1, 2, 3, 2, 3, 1, 2, 3]).unwrap();
        let a = build_matrix(&p);
        assert_eq!(a.rows(), vec![vec![1, 3, 3], vec![3, 2, 2], vec![1, 3, 3]]);
        assert!(sum_conditions(&p).s.is_zero());
        assert_eq!(a.det(), Elem::ZERO);

        let g16 = Field::binary(4, 0b11001).unwrap();
        let p = SiParams::from_reprs(&g16, [1, 2, 4, 2, 2, 9, 1, 2]).unwrap();
        let a = build_matrix(&p);
        assert_eq!(a.rows(), vec![vec![1, 10, 10], vec![9, 2, 10], vec![8, 5, 4]]);
        assert!(sum_conditions(&p).all_nonzero());
        assert_eq!(predicted_invariants(&p).1, [Elem(7), Elem(7), Elem(9)]);
        assert_eq!(extract_xy(&a, &p.witness()).unwrap(), Some((Elem(1), Elem(2))));
        assert!(a.is_mds());
    }

    #[test]
    fn remark_matrix_has_parameters() {
        let f = Field::binary(3, 0b1101).unwrap();
        let a = SquareMatrix::from_rows(&f, &[[6, 1, 5], [1, 6, 3], [5, 3, 6]]).unwrap();
        let d = DiagonalMatrix::from_reprs(&f, &[7, 6, 3]).unwrap();
        let (x, y) = extract_xy(&a, &d).unwrap().expect("parameters exist");
        let p = SiParams::new(&f, [Elem(6); 3], [Elem(7), Elem(6), Elem(3)], x, y).unwrap();
        assert_eq!(build_matrix(&p), a);
    }

    #[test]
    fn sum_edge_cases() {
        let f = gf8();
        let p = SiParams::from_reprs(&f, [3, 3, 5, 2, 2, 1, 1, 1]).unwrap();
        assert!(sum_conditions(&p).s12.is_zero());
        assert!(minor_formulas(&p).is_err());
        let p = SiParams::from_reprs(&f, [3, 5, 6, 1, 1, 1, 4, 2]).unwrap();
        let s = sum_conditions(&p).s;
        assert_eq!(predicted_invariants(&p).0, f.prod(&[s, s, s]));
        // s13 = 0 puts zeros at (1,2) and (3,2)
        let p = SiParams::from_reprs(&f, [1, 5, 2, 2, 3, 1, 3, 3]).unwrap();
        assert!(sum_conditions(&p).s13.is_zero());
        let m = build_mat3(&p);
        assert!(m[1].is_zero() && m[7].is_zero());
    }

    #[test]
    fn minor_closed_forms_match() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for f in [gf8(), Field::binary(4, 0b10011).unwrap()] {
            let mut done = 0;
            while done < 1000 {
                let p = random_params(&f, &mut rng);
                if !sum_conditions(&p).all_nonzero() {
                    continue;
                }
                assert_eq!(minor_formulas(&p).unwrap(), mat3::minors2(&f, &build_mat3(&p)));
                done += 1;
            }
        }
    }

    #[test]
    fn eighth_minor_needs_inverse_x() {
        // the variant with x instead of x^{-1} disagrees on most tuples
        let f = gf8();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let (mut bad, mut valid) = (0, 0);
        for _ in 0..400 {
            let p = random_params(&f, &mut rng);
            if !sum_conditions(&p).all_nonzero() {
                continue;
            }
            valid += 1;
            let c = sum_conditions(&p);
            let variant = f.prod(&[c.s23, c.s, p.x, f.inv_nz(p.d[0]), f.inv_nz(p.d[2])]);
            if variant != mat3::minors2(&f, &build_mat3(&p))[7] {
                bad += 1;
            }
        }
        assert!(valid > 50 && 4 * bad > 3 * valid, "{bad} of {valid}");
    }

    #[test]
    fn construction_is_si_with_predicted_invariants() {
        for f in [Field::binary(2, 0b111).unwrap(), gf8()] {
            let step = if f.order() == 4 { 1 } else { 37 };
            for p in all_params(&f).step_by(step) {
                let c = sum_conditions(&p);
                let a = build_matrix(&p);
                let (det, ada) = predicted_invariants(&p);
                assert_eq!(a.det(), det);
                if !c.s_nonzero {
                    continue;
                }
                let m = build_mat3(&p);
                assert!(mat3::ada_is_nonsingular_diagonal(&f, &m, &p.d));
                for i in 0..3 {
                    assert_eq!(mat3::ada_entry(&f, &m, &p.d, i, i), ada[i]);
                }
                if c.s12_nonzero && c.s13_nonzero && c.s23_nonzero {
                    assert!(!a.is_reducible().unwrap());
                }
            }
        }
    }

    #[test]
    fn oracle_accepts_construction_gf4() {
        let f = Field::binary(2, 0b111).unwrap();
        for p in all_params(&f) {
            if sum_conditions(&p).s_nonzero {
                let a = build_matrix(&p);
                let v = si_oracle(&a).unwrap();
                assert!(v.is_semi_involutory);
                assert_eq!(v.witness.unwrap().diag()[0], Elem::ONE);
            }
        }
    }

    #[test]
    fn irreducible_witness_is_unique_up_to_scale_gf8() {
        let f = gf8();
        for p in all_params(&f).step_by(101) {
            if sum_conditions(&p).all_nonzero() {
                let w = si_oracle(&build_matrix(&p)).unwrap().witness.unwrap();
                assert_eq!(w, p.witness().scale(f.inv(p.d[0]).unwrap()));
            }
        }
    }

    #[test]
    fn round_trip_extract_gf8() {
        let f = gf8();
        for p in all_params(&f).step_by(11) {
            if sum_conditions(&p).all_nonzero() {
                assert_eq!(extract_xy(&build_matrix(&p), &p.witness()).unwrap(), Some((p.x, p.y)));
            }
        }
    }

    #[test]
    fn curupira() {
        let f = gf8();
        assert!(curupira_matrix(&f, Elem(0), Elem(0)).unwrap().is_identity());
        let d = curupira_matrix(&f, Elem(2), Elem(4)).unwrap();
        assert_eq!(d.rows(), vec![vec![3, 2, 2], vec![4, 5, 4], vec![6, 6, 7]]);
        assert!(d.is_involutory() && d.is_mds());
        assert!(curupira_is_mds(&f, Elem(2), Elem(4)).unwrap());
        assert!(!curupira_is_mds(&f, Elem(1), Elem(4)).unwrap());
        assert!(!curupira_is_mds(&f, Elem(5), Elem(5)).unwrap());
        let f11 = Field::prime(11).unwrap();
        assert!(curupira_matrix(&f11, Elem(2), Elem(3)).is_err());
        for (m, poly) in [(2, 0b111), (3, 0b1011), (3, 0b1101), (4, 0b10011), (4, 0b11001)] {
            let f = Field::binary(m, poly).unwrap();
            for a in f.elements(false) {
                for b in f.elements(false) {
                    let d = curupira_matrix(&f, a, b).unwrap();
                    assert!(d.is_involutory());
                    assert_eq!(curupira_is_mds(&f, a, b).unwrap(), d.is_mds());
                }
            }
        }
    }

    #[test]
    fn params_validation() {
        let f = gf8();
        assert!(SiParams::from_reprs(&f, [0, 1, 1, 1, 1, 1, 1, 1]).is_err());
        assert!(SiParams::from_reprs(&f, [8, 1, 1, 1, 1, 1, 1, 1]).is_err());
        assert!(SiParams::from_reprs(&Field::prime(11).unwrap(), [1; 8]).is_err());
    }

    proptest! {
        #[test]
        fn construction_passes_characterization(v in proptest::array::uniform8(1u32..16)) {
            let f = Field::binary(4, 0b11001).unwrap();
            let p = SiParams::from_reprs(&f, v).unwrap();
            let c = sum_conditions(&p);
            let a = build_matrix(&p);
            prop_assert_eq!(a.is_mds(), c.all_nonzero());
            let verdict = si_check_3x3(&a).unwrap();
            prop_assert_eq!(verdict.is_semi_involutory, c.s_nonzero);
        }
    }
}
