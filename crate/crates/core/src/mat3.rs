//! Allocation-free 3×3 kernels over a [`Field`], row-major `[Elem; 9]`.
//!
//! These back the generic [`SquareMatrix`](crate::matrix::SquareMatrix)
//! operations for `n = 3` and the census inner loops.

use crate::field::{Elem, Field};

pub type Mat3 = [Elem; 9];

/// Row/column index pairs of the nine 2×2 minors, in row-major order of
/// (row pair, column pair).
pub const PAIRS: [(usize, usize); 3] = [(0, 1), (0, 2), (1, 2)];

pub const IDENTITY: Mat3 = [
    Elem::ONE,
    Elem::ZERO,
    Elem::ZERO,
    Elem::ZERO,
    Elem::ONE,
    Elem::ZERO,
    Elem::ZERO,
    Elem::ZERO,
    Elem::ONE,
];

#[inline]
pub fn det2(f: &Field, a: Elem, b: Elem, c: Elem, d: Elem) -> Elem {
    f.sub(f.mul(a, d), f.mul(b, c))
}

/// Determinant of the 2×2 submatrix on rows `(r0, r1)` and columns `(c0, c1)`.
#[inline]
pub fn minor2(f: &Field, m: &Mat3, (r0, r1): (usize, usize), (c0, c1): (usize, usize)) -> Elem {
    det2(f, m[3 * r0 + c0], m[3 * r0 + c1], m[3 * r1 + c0], m[3 * r1 + c1])
}

/// The nine 2×2 minors, ordered by row pair then column pair.
pub fn minors2(f: &Field, m: &Mat3) -> [Elem; 9] {
    let mut out = [Elem::ZERO; 9];
    let mut k = 0;
    for rows in PAIRS {
        for cols in PAIRS {
            out[k] = minor2(f, m, rows, cols);
            k += 1;
        }
    }
    out
}

/// Cofactor expansion along the first row.
#[inline]
pub fn det3(f: &Field, m: &Mat3) -> Elem {
    let c0 = det2(f, m[4], m[5], m[7], m[8]);
    let c1 = det2(f, m[3], m[5], m[6], m[8]);
    let c2 = det2(f, m[3], m[4], m[6], m[7]);
    f.add(f.sub(f.mul(m[0], c0), f.mul(m[1], c1)), f.mul(m[2], c2))
}

#[inline]
pub fn mul3(f: &Field, a: &Mat3, b: &Mat3) -> Mat3 {
    let mut out = [Elem::ZERO; 9];
    for i in 0..3 {
        for j in 0..3 {
            let mut acc = Elem::ZERO;
            for k in 0..3 {
                acc = f.add(acc, f.mul(a[3 * i + k], b[3 * k + j]));
            }
            out[3 * i + j] = acc;
        }
    }
    out
}

#[inline]
pub fn is_nowhere_zero(m: &Mat3) -> bool {
    m.iter().all(|e| !e.is_zero())
}

/// Every 1×1, 2×2 and 3×3 minor is nonzero.
#[inline]
pub fn is_mds3(f: &Field, m: &Mat3) -> bool {
    if !is_nowhere_zero(m) {
        return false;
    }
    for rows in PAIRS {
        for cols in PAIRS {
            if minor2(f, m, rows, cols).is_zero() {
                return false;
            }
        }
    }
    !det3(f, m).is_zero()
}

#[inline]
pub fn is_involutory3(f: &Field, m: &Mat3) -> bool {
    mul3(f, m, m) == IDENTITY
}

/// `(A·diag(d)·A)` entry `(i, j)`.
#[inline]
pub fn ada_entry(f: &Field, a: &Mat3, d: &[Elem; 3], i: usize, j: usize) -> Elem {
    let mut acc = Elem::ZERO;
    for k in 0..3 {
        acc = f.add(acc, f.prod(&[a[3 * i + k], d[k], a[3 * k + j]]));
    }
    acc
}

/// Whether `A·diag(d)·A` is diagonal with nonzero diagonal.
#[inline]
pub fn ada_is_nonsingular_diagonal(f: &Field, a: &Mat3, d: &[Elem; 3]) -> bool {
    for i in 0..3 {
        for j in 0..3 {
            if i != j && !ada_entry(f, a, d, i, j).is_zero() {
                return false;
            }
        }
    }
    (0..3).all(|i| !ada_entry(f, a, d, i, i).is_zero())
}

/// Packs nine reprs of an `m`-bit field into one integer, 4 bits per entry
/// for `m <= 4`. Distinct matrices get distinct keys.
#[inline]
pub fn pack_key(m: &Mat3, bits: u32) -> u64 {
    m.iter().fold(0u64, |acc, e| (acc << bits) | e.0 as u64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mat(v: [u16; 9]) -> Mat3 {
        v.map(Elem)
    }

    #[test]
    fn det_and_minors_small() {
        let f = Field::binary(2, 0b111).unwrap();
        assert_eq!(det3(&f, &mat([1, 3, 3, 3, 2, 2, 1, 3, 3])), Elem::ZERO);
        assert_eq!(det3(&f, &IDENTITY), Elem::ONE);
        let m = mat([1, 2, 3, 2, 3, 1, 3, 1, 2]);
        assert_eq!(minors2(&f, &m)[0], det2(&f, Elem(1), Elem(2), Elem(2), Elem(3)));
    }

    #[test]
    fn pack_is_injective_on_small_space() {
        use std::collections::HashSet;
        let mut seen = HashSet::new();
        for a in 0..4u16 {
            for b in 0..4u16 {
                let m = mat([a, b, 0, 0, 3, 0, 1, 0, b]);
                assert!(seen.insert(pack_key(&m, 2)));
            }
        }
    }
}
