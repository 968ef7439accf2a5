//! Dense square matrices over a finite field.
//!
//! Matrices are immutable values: every operation returns a new matrix. All
//! operands of a binary operation must live over the same field and have the
//! same dimension.

use std::fmt;

use crate::error::{Error, Result};
use crate::field::{Elem, Field};
use crate::mat3::{self, Mat3};

/// Largest dimension for which [`SquareMatrix::is_reducible`] enumerates permutations.
pub const MAX_REDUCIBILITY_N: usize = 4;

#[derive(Clone, PartialEq, Eq)]
pub struct SquareMatrix {
    field: Field,
    n: usize,
    entries: Vec<Elem>,
}

impl fmt::Debug for SquareMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {:?}", self.field.spec(), self.rows())
    }
}

impl SquareMatrix {
    pub fn new(field: Field, n: usize, entries: Vec<Elem>) -> Result<Self> {
        if n == 0 {
            return Err(Error::Dimension("matrix dimension must be at least 1".into()));
        }
        if entries.len() != n * n {
            return Err(Error::Dimension(format!("{} entries for an {n}x{n} matrix", entries.len())));
        }
        if let Some(bad) = entries.iter().find(|e| !field.spec().contains(**e)) {
            return Err(Error::invalid(format!("element {bad} out of range for {}", field.spec())));
        }
        Ok(SquareMatrix { field, n, entries })
    }

    /// Builds a matrix from rows of integer reprs.
    pub fn from_rows<R: AsRef<[u32]>>(field: &Field, rows: &[R]) -> Result<Self> {
        let n = rows.len();
        let mut entries = Vec::with_capacity(n * n);
        for (i, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            if row.len() != n {
                return Err(Error::Dimension(format!("row {i} has {} entries, expected {n}", row.len())));
            }
            for &v in row {
                entries.push(field.element(v)?);
            }
        }
        SquareMatrix::new(field.clone(), n, entries)
    }

    pub fn from_mat3(field: &Field, m: Mat3) -> Self {
        SquareMatrix { field: field.clone(), n: 3, entries: m.to_vec() }
    }

    pub fn identity(field: &Field, n: usize) -> Self {
        let mut entries = vec![Elem::ZERO; n * n];
        for i in 0..n {
            entries[i * n + i] = Elem::ONE;
        }
        SquareMatrix { field: field.clone(), n, entries }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Elem {
        self.entries[i * self.n + j]
    }

    pub fn entries(&self) -> &[Elem] {
        &self.entries
    }

    pub fn rows(&self) -> Vec<Vec<u32>> {
        self.entries.chunks(self.n).map(|r| r.iter().map(|e| e.repr()).collect()).collect()
    }

    pub fn as_mat3(&self) -> Option<Mat3> {
        <[Elem; 9]>::try_from(self.entries.as_slice()).ok()
    }

    pub fn is_nowhere_zero(&self) -> bool {
        self.entries.iter().all(|e| !e.is_zero())
    }

    pub fn transpose(&self) -> Self {
        let n = self.n;
        let entries = (0..n * n).map(|k| self.get(k % n, k / n)).collect();
        SquareMatrix { field: self.field.clone(), n, entries }
    }

    fn check_compatible(&self, other_field: &Field, other_n: usize) -> Result<()> {
        self.field.check_same(other_field)?;
        if self.n != other_n {
            return Err(Error::Dimension(format!("{}x{} vs {}x{}", self.n, self.n, other_n, other_n)));
        }
        Ok(())
    }

    /// Matrix product `self · other`.
    pub fn mul(&self, other: &SquareMatrix) -> Result<SquareMatrix> {
        self.check_compatible(&other.field, other.n)?;
        let (f, n) = (&self.field, self.n);
        let mut entries = vec![Elem::ZERO; n * n];
        for i in 0..n {
            for j in 0..n {
                let mut acc = Elem::ZERO;
                for k in 0..n {
                    acc = f.add(acc, f.mul(self.get(i, k), other.get(k, j)));
                }
                entries[i * n + j] = acc;
            }
        }
        Ok(SquareMatrix { field: f.clone(), n, entries })
    }

    /// `self · D`: scales column `j` by `d_j`.
    pub fn mul_diag(&self, d: &DiagonalMatrix) -> Result<SquareMatrix> {
        self.check_compatible(&d.field, d.n())?;
        let n = self.n;
        let entries = (0..n * n).map(|k| self.field.mul(self.entries[k], d.diag[k % n])).collect();
        Ok(SquareMatrix { field: self.field.clone(), n, entries })
    }

    pub fn scale(&self, c: Elem) -> SquareMatrix {
        let entries = self.entries.iter().map(|&e| self.field.mul(c, e)).collect();
        SquareMatrix { field: self.field.clone(), n: self.n, entries }
    }

    pub fn is_identity(&self) -> bool {
        *self == SquareMatrix::identity(&self.field, self.n)
    }

    /// Closed form for `n <= 3`, fraction-free (Bareiss) elimination above.
    pub fn det(&self) -> Elem {
        let f = &self.field;
        match self.n {
            1 => self.entries[0],
            2 => mat3::det2(f, self.entries[0], self.entries[1], self.entries[2], self.entries[3]),
            3 => mat3::det3(f, &self.as_mat3().expect("3x3")),
            _ => self.det_bareiss(),
        }
    }

    fn det_bareiss(&self) -> Elem {
        let (f, n) = (&self.field, self.n);
        let mut a: Vec<Vec<Elem>> = self.entries.chunks(n).map(<[Elem]>::to_vec).collect();
        let mut negate = false;
        let mut prev = Elem::ONE;
        for k in 0..n - 1 {
            if a[k][k].is_zero() {
                match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                    Some(i) => {
                        a.swap(i, k);
                        negate = !negate;
                    }
                    None => return Elem::ZERO,
                }
            }
            let inv_prev = f.inv_nz(prev);
            for i in k + 1..n {
                for j in k + 1..n {
                    let t = f.sub(f.mul(a[i][j], a[k][k]), f.mul(a[i][k], a[k][j]));
                    a[i][j] = f.mul(t, inv_prev);
                }
            }
            prev = a[k][k];
        }
        let d = a[n - 1][n - 1];
        if negate {
            f.neg(d)
        } else {
            d
        }
    }

    /// Adjugate formula for `n <= 3`, Gauss-Jordan above.
    pub fn inverse(&self) -> Result<SquareMatrix> {
        let f = &self.field;
        let det = self.det();
        let inv_det = f.inv(det).ok_or_else(|| Error::domain("matrix is singular"))?;
        let n = self.n;
        if n > 3 {
            return self.inverse_gauss_jordan();
        }
        let mut entries = vec![Elem::ZERO; n * n];
        if n == 1 {
            entries[0] = inv_det;
        } else {
            for i in 0..n {
                for j in 0..n {
                    // adj[j][i] = (-1)^(i+j) M_ij
                    let rows: Vec<usize> = (0..n).filter(|&r| r != i).collect();
                    let cols: Vec<usize> = (0..n).filter(|&c| c != j).collect();
                    let mut cof = self.minor(&rows, &cols)?;
                    if (i + j) % 2 == 1 {
                        cof = f.neg(cof);
                    }
                    entries[j * n + i] = f.mul(cof, inv_det);
                }
            }
        }
        Ok(SquareMatrix { field: f.clone(), n, entries })
    }

    fn inverse_gauss_jordan(&self) -> Result<SquareMatrix> {
        let (f, n) = (&self.field, self.n);
        let mut a: Vec<Vec<Elem>> = self.entries.chunks(n).map(<[Elem]>::to_vec).collect();
        let mut inv: Vec<Vec<Elem>> = SquareMatrix::identity(f, n).entries.chunks(n).map(<[Elem]>::to_vec).collect();
        for col in 0..n {
            let pivot = (col..n)
                .find(|&r| !a[r][col].is_zero())
                .ok_or_else(|| Error::domain("matrix is singular"))?;
            a.swap(pivot, col);
            inv.swap(pivot, col);
            let s = f.inv_nz(a[col][col]);
            for j in 0..n {
                a[col][j] = f.mul(a[col][j], s);
                inv[col][j] = f.mul(inv[col][j], s);
            }
            for r in 0..n {
                if r != col && !a[r][col].is_zero() {
                    let factor = a[r][col];
                    for j in 0..n {
                        a[r][j] = f.sub(a[r][j], f.mul(factor, a[col][j]));
                        inv[r][j] = f.sub(inv[r][j], f.mul(factor, inv[col][j]));
                    }
                }
            }
        }
        Ok(SquareMatrix { field: f.clone(), n, entries: inv.concat() })
    }

    /// The submatrix on the given (0-based) rows and columns.
    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Result<SquareMatrix> {
        if rows.is_empty() || rows.len() != cols.len() {
            return Err(Error::invalid("row and column index sets must be nonempty and equal in size"));
        }
        let in_range = |ix: &[usize]| ix.iter().all(|&i| i < self.n);
        let distinct = |ix: &[usize]| ix.iter().enumerate().all(|(k, i)| !ix[..k].contains(i));
        if !in_range(rows) || !in_range(cols) || !distinct(rows) || !distinct(cols) {
            return Err(Error::invalid(format!("bad index set {rows:?} x {cols:?} for n = {}", self.n)));
        }
        let k = rows.len();
        let entries = rows.iter().flat_map(|&r| cols.iter().map(move |&c| self.get(r, c))).collect();
        Ok(SquareMatrix { field: self.field.clone(), n: k, entries })
    }

    pub fn minor(&self, rows: &[usize], cols: &[usize]) -> Result<Elem> {
        Ok(self.submatrix(rows, cols)?.det())
    }

    /// Every square submatrix is nonsingular.
    pub fn is_mds(&self) -> bool {
        if let Some(m) = self.as_mat3() {
            return mat3::is_mds3(&self.field, &m);
        }
        (1..=self.n).all(|k| {
            let subsets = index_subsets(self.n, k);
            subsets.iter().all(|rows| {
                subsets.iter().all(|cols| !self.minor(rows, cols).expect("valid index sets").is_zero())
            })
        })
    }

    pub fn is_involutory(&self) -> bool {
        self.mul(self).map(|sq| sq.is_identity()).unwrap_or(false)
    }

    /// `P·A·P^T`: entry `(i, j)` of the result is `A[π(i)][π(j)]`.
    pub fn perm_conjugate(&self, p: &Permutation) -> Result<SquareMatrix> {
        if p.len() != self.n {
            return Err(Error::Dimension(format!("permutation of {} for n = {}", p.len(), self.n)));
        }
        let n = self.n;
        let entries = (0..n * n).map(|k| self.get(p.apply(k / n), p.apply(k % n))).collect();
        Ok(SquareMatrix { field: self.field.clone(), n, entries })
    }

    /// Whether some `P·A·P^T` has a zero lower-left `(n-k)×k` block, `1 <= k < n`.
    ///
    /// Enumerates all `n!` permutations, so `n` is limited to
    /// [`MAX_REDUCIBILITY_N`].
    pub fn is_reducible(&self) -> Result<bool> {
        let n = self.n;
        if n < 2 {
            return Err(Error::domain("reducibility needs n >= 2"));
        }
        if n > MAX_REDUCIBILITY_N {
            return Err(Error::Budget(format!("reducibility enumeration limited to n <= {MAX_REDUCIBILITY_N}")));
        }
        for p in Permutation::all(n) {
            for k in 1..n {
                let zero_block = (k..n).all(|i| (0..k).all(|j| self.get(p.apply(i), p.apply(j)).is_zero()));
                if zero_block {
                    return Ok(true);
                }
            }
        }
        Ok(false)
    }
}

/// All `k`-element subsets of `0..n` in lexicographic order.
pub fn index_subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::with_capacity(k), &mut out);
    out
}

/// A diagonal matrix, stored as its diagonal.
#[derive(Clone, PartialEq, Eq)]
pub struct DiagonalMatrix {
    field: Field,
    diag: Vec<Elem>,
}

impl fmt::Debug for DiagonalMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "diag{:?}", self.reprs())
    }
}

impl DiagonalMatrix {
    pub fn new(field: &Field, diag: Vec<Elem>) -> Result<Self> {
        if diag.is_empty() {
            return Err(Error::Dimension("diagonal matrix needs at least one entry".into()));
        }
        if let Some(bad) = diag.iter().find(|e| !field.spec().contains(**e)) {
            return Err(Error::invalid(format!("element {bad} out of range for {}", field.spec())));
        }
        Ok(DiagonalMatrix { field: field.clone(), diag })
    }

    pub fn from_reprs(field: &Field, reprs: &[u32]) -> Result<Self> {
        let diag = reprs.iter().map(|&v| field.element(v)).collect::<Result<_>>()?;
        DiagonalMatrix::new(field, diag)
    }

    pub fn identity(field: &Field, n: usize) -> Self {
        DiagonalMatrix { field: field.clone(), diag: vec![Elem::ONE; n] }
    }

    pub fn n(&self) -> usize {
        self.diag.len()
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn diag(&self) -> &[Elem] {
        &self.diag
    }

    pub fn reprs(&self) -> Vec<u32> {
        self.diag.iter().map(|e| e.repr()).collect()
    }

    pub fn is_nonsingular(&self) -> bool {
        self.diag.iter().all(|e| !e.is_zero())
    }

    pub fn to_square(&self) -> SquareMatrix {
        let n = self.n();
        let mut entries = vec![Elem::ZERO; n * n];
        for (i, &d) in self.diag.iter().enumerate() {
            entries[i * n + i] = d;
        }
        SquareMatrix { field: self.field.clone(), n, entries }
    }

    /// `D · A`: scales row `i` of `a` by `d_i`.
    pub fn mul_matrix(&self, a: &SquareMatrix) -> Result<SquareMatrix> {
        a.check_compatible(&self.field, self.n())?;
        let n = a.n;
        let entries = (0..n * n).map(|k| self.field.mul(self.diag[k / n], a.entries[k])).collect();
        Ok(SquareMatrix { field: a.field.clone(), n, entries })
    }

    /// Componentwise product.
    pub fn mul(&self, other: &DiagonalMatrix) -> Result<DiagonalMatrix> {
        self.field.check_same(&other.field)?;
        if self.n() != other.n() {
            return Err(Error::Dimension(format!("{} vs {}", self.n(), other.n())));
        }
        let diag = self.diag.iter().zip(&other.diag).map(|(&a, &b)| self.field.mul(a, b)).collect();
        Ok(DiagonalMatrix { field: self.field.clone(), diag })
    }

    pub fn scale(&self, c: Elem) -> DiagonalMatrix {
        let diag = self.diag.iter().map(|&d| self.field.mul(c, d)).collect();
        DiagonalMatrix { field: self.field.clone(), diag }
    }

    pub fn inverse(&self) -> Result<DiagonalMatrix> {
        let diag = self
            .diag
            .iter()
            .map(|&d| self.field.inv(d).ok_or_else(|| Error::domain("diagonal matrix is singular")))
            .collect::<Result<_>>()?;
        Ok(DiagonalMatrix { field: self.field.clone(), diag })
    }
}

/// A permutation of `0..n`, stored as its image map.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Permutation {
    image: Vec<usize>,
}

impl Permutation {
    pub fn new(image: Vec<usize>) -> Result<Self> {
        let n = image.len();
        let mut seen = vec![false; n];
        for &i in &image {
            if i >= n || seen[i] {
                return Err(Error::invalid(format!("{image:?} is not a permutation")));
            }
            seen[i] = true;
        }
        Ok(Permutation { image })
    }

    pub fn identity(n: usize) -> Self {
        Permutation { image: (0..n).collect() }
    }

    /// Transposition of `i` and `j` in `0..n`.
    pub fn swap(n: usize, i: usize, j: usize) -> Result<Self> {
        let mut image: Vec<usize> = (0..n).collect();
        if i >= n || j >= n {
            return Err(Error::invalid(format!("swap({i}, {j}) out of range for n = {n}")));
        }
        image.swap(i, j);
        Ok(Permutation { image })
    }

    pub fn len(&self) -> usize {
        self.image.len()
    }

    pub fn is_empty(&self) -> bool {
        self.image.is_empty()
    }

    #[inline]
    pub fn apply(&self, i: usize) -> usize {
        self.image[i]
    }

    pub fn image(&self) -> &[usize] {
        &self.image
    }

    /// All `n!` permutations in lexicographic order of their image maps.
    pub fn all(n: usize) -> Vec<Permutation> {
        let mut cur: Vec<usize> = (0..n).collect();
        let mut out = vec![Permutation { image: cur.clone() }];
        // next-permutation
        loop {
            let Some(i) = (1..n).rev().find(|&i| cur[i - 1] < cur[i]) else {
                return out;
            };
            let j = (i..n).rev().find(|&j| cur[j] > cur[i - 1]).expect("successor exists");
            cur.swap(i - 1, j);
            cur[i..].reverse();
            out.push(Permutation { image: cur.clone() });
        }
    }
}
