//! Exact arithmetic in GF(2^m) and in prime fields GF(p).
//!
//! Elements of GF(2^m) are encoded as integers whose bit `i` is the
//! coefficient of `x^i` in the polynomial basis defined by an explicit
//! modulus. Prime-field elements are residues in `[0, p)`. The modulus is
//! never defaulted: two fields of the same order with different moduli are
//! different encodings and compare unequal.
//!
//! [`FieldSpec`] holds the raw shift-and-reduce arithmetic. [`Field`] wraps a
//! spec and can carry log/exp tables, which is what the matrix and census
//! code uses on its hot paths. [`FieldElement`] is a value bound to its spec,
//! with checked operations that reject operands from different fields.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest supported field order.
pub const MAX_ORDER: u32 = 1 << 16;

/// A field element in its canonical integer encoding.
#[derive(Copy, Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Elem(pub u16);

impl Elem {
    pub const ZERO: Elem = Elem(0);
    pub const ONE: Elem = Elem(1);

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }

    #[inline]
    pub fn repr(self) -> u32 {
        self.0 as u32
    }
}

impl From<u16> for Elem {
    fn from(v: u16) -> Self {
        Elem(v)
    }
}

impl fmt::Display for Elem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Wire form of a field descriptor: `{"p": 2, "m": 3, "poly": 13}`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
struct RawFieldSpec {
    p: u32,
    m: u32,
    #[serde(default)]
    poly: u32,
}

/// A validated finite field descriptor.
///
/// For `m = 1` the modulus is unused and stored as 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawFieldSpec", into = "RawFieldSpec")]
pub struct FieldSpec {
    p: u32,
    m: u32,
    poly: u32,
}

impl TryFrom<RawFieldSpec> for FieldSpec {
    type Error = Error;
    fn try_from(raw: RawFieldSpec) -> Result<Self> {
        FieldSpec::new(raw.p, raw.m, raw.poly)
    }
}

impl From<FieldSpec> for RawFieldSpec {
    fn from(s: FieldSpec) -> Self {
        RawFieldSpec { p: s.p, m: s.m, poly: s.poly }
    }
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.m == 1 {
            write!(f, "GF({})", self.p)
        } else {
            write!(f, "GF({}^{}; poly {:#b})", self.p, self.m, self.poly)
        }
    }
}

impl FieldSpec {
    /// Validates and builds a field descriptor.
    ///
    /// Supported: `p = 2` with `1 <= m <= 16` and an irreducible modulus of
    /// degree exactly `m`; odd prime `p < 2^16` with `m = 1`.
    pub fn new(p: u32, m: u32, poly: u32) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::InvalidField(format!("p = {p} is not prime")));
        }
        if m == 0 {
            return Err(Error::InvalidField("m must be at least 1".into()));
        }
        if m == 1 {
            if p >= MAX_ORDER {
                return Err(Error::InvalidField(format!("p = {p} exceeds 2^16")));
            }
            return Ok(FieldSpec { p, m, poly: 0 });
        }
        if p != 2 {
            return Err(Error::InvalidField(format!(
                "extension fields are only supported for p = 2 (got p = {p}, m = {m})"
            )));
        }
        if m > 16 {
            return Err(Error::InvalidField(format!("m = {m} exceeds 16")));
        }
        if !validate_modulus(p, m, poly) {
            return Err(Error::InvalidField(format!(
                "modulus {poly:#b} is not an irreducible polynomial of degree {m} over GF(2)"
            )));
        }
        Ok(FieldSpec { p, m, poly })
    }

    /// Shorthand for `FieldSpec::new(2, m, poly)`.
    pub fn binary(m: u32, poly: u32) -> Result<Self> {
        FieldSpec::new(2, m, poly)
    }

    /// Shorthand for the prime field GF(p).
    pub fn prime(p: u32) -> Result<Self> {
        FieldSpec::new(p, 1, 0)
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn poly(&self) -> u32 {
        self.poly
    }

    /// Number of elements `q = p^m`.
    pub fn order(&self) -> u32 {
        self.p.pow(self.m)
    }

    pub fn is_char2(&self) -> bool {
        self.p == 2
    }

    #[inline]
    pub fn contains(&self, e: Elem) -> bool {
        e.repr() < self.order()
    }

    #[inline]
    pub fn add_raw(&self, a: u32, b: u32) -> u32 {
        if self.p == 2 {
            a ^ b
        } else {
            (a + b) % self.p
        }
    }

    #[inline]
    pub fn neg_raw(&self, a: u32) -> u32 {
        if self.p == 2 {
            a
        } else {
            (self.p - a) % self.p
        }
    }

    #[inline]
    pub fn mul_raw(&self, a: u32, b: u32) -> u32 {
        if self.p == 2 {
            gf2m_mul(a, b, self.m, self.poly)
        } else {
            ((a as u64 * b as u64) % self.p as u64) as u32
        }
    }

    pub fn pow_raw(&self, a: u32, mut e: u64) -> u32 {
        let mut base = a;
        let mut acc = 1;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul_raw(acc, base);
            }
            base = self.mul_raw(base, base);
            e >>= 1;
        }
        acc
    }

    /// Inverse via `a^(q-2)`.
    pub fn inv_raw(&self, a: u32) -> Option<u32> {
        if a == 0 {
            None
        } else {
            Some(self.pow_raw(a, self.order() as u64 - 2))
        }
    }
}

/// Carry-less multiply with interleaved reduction by `poly` (degree `m`).
#[inline]
fn gf2m_mul(mut a: u32, mut b: u32, m: u32, poly: u32) -> u32 {
    let top = 1u32 << m;
    let mut r = 0;
    while b != 0 {
        if b & 1 != 0 {
            r ^= a;
        }
        b >>= 1;
        a <<= 1;
        if a & top != 0 {
            a ^= poly;
        }
    }
    r & (top - 1)
}

pub fn is_prime(p: u32) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u32;
    while (d as u64) * (d as u64) <= p as u64 {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

fn poly_degree(f: u32) -> Option<u32> {
    if f == 0 {
        None
    } else {
        Some(31 - f.leading_zeros())
    }
}

/// Remainder of `f` modulo `g` over GF(2).
fn gf2_poly_rem(mut f: u32, g: u32) -> u32 {
    let dg = poly_degree(g).expect("nonzero divisor");
    while let Some(df) = poly_degree(f) {
        if df < dg {
            break;
        }
        f ^= g << (df - dg);
    }
    f
}

/// Whether `modulus` is an irreducible polynomial of degree exactly `m` over F_p.
///
/// For `p = 2` the modulus is a coefficient bit-vector and irreducibility is
/// decided by trial division by every polynomial of degree `1..=m/2`. For odd
/// `p` only `m = 1` is meaningful; the modulus is then ignored.
pub fn validate_modulus(p: u32, m: u32, modulus: u32) -> bool {
    if !is_prime(p) || m == 0 {
        return false;
    }
    if p != 2 {
        return m == 1;
    }
    if m > 31 || poly_degree(modulus) != Some(m) {
        return false;
    }
    for d in 1..=m / 2 {
        for g in (1u32 << d)..(1u32 << (d + 1)) {
            if gf2_poly_rem(modulus, g) == 0 {
                return false;
            }
        }
    }
    true
}

#[derive(Debug)]
struct Tables {
    /// `exp[i] = g^i` for `i < 2(q-1)`, so two logs can be added without a modulo.
    exp: Vec<u16>,
    log: Vec<u16>,
    inv: Vec<u16>,
}

impl Tables {
    fn build(spec: &FieldSpec) -> Tables {
        let q = spec.order();
        let n = q - 1;
        let g = (1..q)
            .find(|&g| multiplicative_order(spec, g) == n)
            .expect("finite field has a primitive element");
        let mut exp = vec![0u16; 2 * n as usize];
        let mut log = vec![0u16; q as usize];
        let mut x = 1u32;
        for i in 0..n {
            exp[i as usize] = x as u16;
            exp[(i + n) as usize] = x as u16;
            log[x as usize] = i as u16;
            x = spec.mul_raw(x, g);
        }
        let mut inv = vec![0u16; q as usize];
        for a in 1..q {
            let l = log[a as usize] as u32;
            inv[a as usize] = exp[((n - l) % n) as usize];
        }
        Tables { exp, log, inv }
    }
}

fn multiplicative_order(spec: &FieldSpec, g: u32) -> u32 {
    let mut x = g;
    let mut k = 1;
    while x != 1 {
        x = spec.mul_raw(x, g);
        k += 1;
    }
    k
}

/// A field ready for arithmetic, optionally table-accelerated.
///
/// Cheap to clone; the tables are shared. Two `Field`s are equal when their
/// specs are equal, regardless of table state.
#[derive(Clone)]
pub struct Field {
    spec: FieldSpec,
    tables: Option<Arc<Tables>>,
}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Field")
            .field("spec", &self.spec)
            .field("tables", &self.tables.is_some())
            .finish()
    }
}

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        self.spec == other.spec
    }
}

impl Eq for Field {}

impl Serialize for Field {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.spec.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Field {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        FieldSpec::deserialize(d).map(Field::with_tables)
    }
}

impl Field {
    /// Shift-and-reduce arithmetic, no precomputation.
    pub fn new(spec: FieldSpec) -> Field {
        Field { spec, tables: None }
    }

    /// Log/exp and inverse tables; same results as [`Field::new`], faster.
    pub fn with_tables(spec: FieldSpec) -> Field {
        Field { tables: Some(Arc::new(Tables::build(&spec))), spec }
    }

    /// `GF(2^m)` with the given modulus, table-accelerated.
    pub fn binary(m: u32, poly: u32) -> Result<Field> {
        Ok(Field::with_tables(FieldSpec::binary(m, poly)?))
    }

    pub fn prime(p: u32) -> Result<Field> {
        Ok(Field::with_tables(FieldSpec::prime(p)?))
    }

    pub fn spec(&self) -> FieldSpec {
        self.spec
    }

    pub fn order(&self) -> u32 {
        self.spec.order()
    }

    pub fn is_char2(&self) -> bool {
        self.spec.is_char2()
    }

    pub fn has_tables(&self) -> bool {
        self.tables.is_some()
    }

    /// Checks that `e` is a canonical representative of this field.
    pub fn element(&self, repr: u32) -> Result<Elem> {
        if repr < self.order() {
            Ok(Elem(repr as u16))
        } else {
            Err(Error::invalid(format!("element {repr} out of range for {}", self.spec)))
        }
    }

    #[inline]
    pub fn add(&self, a: Elem, b: Elem) -> Elem {
        Elem(self.spec.add_raw(a.repr(), b.repr()) as u16)
    }

    #[inline]
    pub fn neg(&self, a: Elem) -> Elem {
        Elem(self.spec.neg_raw(a.repr()) as u16)
    }

    #[inline]
    pub fn sub(&self, a: Elem, b: Elem) -> Elem {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: Elem, b: Elem) -> Elem {
        match &self.tables {
            Some(t) => {
                if a.is_zero() || b.is_zero() {
                    Elem::ZERO
                } else {
                    Elem(t.exp[t.log[a.0 as usize] as usize + t.log[b.0 as usize] as usize])
                }
            }
            None => Elem(self.spec.mul_raw(a.repr(), b.repr()) as u16),
        }
    }

    /// Product of several elements.
    #[inline]
    pub fn prod(&self, xs: &[Elem]) -> Elem {
        xs.iter().fold(Elem::ONE, |acc, &x| self.mul(acc, x))
    }

    /// Multiplicative inverse, `None` for zero.
    #[inline]
    pub fn inv(&self, a: Elem) -> Option<Elem> {
        if a.is_zero() {
            return None;
        }
        match &self.tables {
            Some(t) => Some(Elem(t.inv[a.0 as usize])),
            None => self.spec.inv_raw(a.repr()).map(|v| Elem(v as u16)),
        }
    }

    /// Inverse of an element the caller knows to be nonzero.
    #[inline]
    pub(crate) fn inv_nz(&self, a: Elem) -> Elem {
        debug_assert!(!a.is_zero());
        self.inv(a).unwrap_or(Elem::ZERO)
    }

    /// `a / b`, `None` when `b = 0`.
    #[inline]
    pub fn div(&self, a: Elem, b: Elem) -> Option<Elem> {
        self.inv(b).map(|ib| self.mul(a, ib))
    }

    /// `a^e`; `0^0` is rejected.
    pub fn pow(&self, a: Elem, e: u64) -> Result<Elem> {
        if a.is_zero() && e == 0 {
            return Err(Error::domain("0^0 is undefined"));
        }
        Ok(Elem(self.spec.pow_raw(a.repr(), e) as u16))
    }

    /// Some square root of `a`, if one exists. Unique in characteristic 2.
    pub fn sqrt(&self, a: Elem) -> Option<Elem> {
        if self.is_char2() {
            // Frobenius is a bijection; a^(q/2) squares back to a.
            return Some(Elem(self.spec.pow_raw(a.repr(), self.order() as u64 / 2) as u16));
        }
        (0..self.order()).map(|v| Elem(v as u16)).find(|&r| self.mul(r, r) == a)
    }

    /// All elements (or all nonzero elements) in ascending repr order.
    pub fn elements(&self, nonzero_only: bool) -> Vec<Elem> {
        let start = u32::from(nonzero_only);
        (start..self.order()).map(|v| Elem(v as u16)).collect()
    }

    pub(crate) fn check_same(&self, other: &Field) -> Result<()> {
        if self.spec == other.spec {
            Ok(())
        } else {
            Err(Error::FieldMismatch(self.spec, other.spec))
        }
    }
}

/// A field element bound to its field descriptor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FieldElement {
    spec: FieldSpec,
    repr: Elem,
}

impl FieldElement {
    pub fn new(spec: FieldSpec, repr: u32) -> Result<Self> {
        if repr >= spec.order() {
            return Err(Error::invalid(format!("element {repr} out of range for {spec}")));
        }
        Ok(FieldElement { spec, repr: Elem(repr as u16) })
    }

    pub fn zero(spec: FieldSpec) -> Self {
        FieldElement { spec, repr: Elem::ZERO }
    }

    pub fn one(spec: FieldSpec) -> Self {
        FieldElement { spec, repr: Elem::ONE }
    }

    pub fn spec(&self) -> FieldSpec {
        self.spec
    }

    pub fn elem(&self) -> Elem {
        self.repr
    }

    pub fn repr(&self) -> u32 {
        self.repr.repr()
    }

    pub fn is_zero(&self) -> bool {
        self.repr.is_zero()
    }

    fn same(&self, other: &FieldElement) -> Result<()> {
        if self.spec == other.spec {
            Ok(())
        } else {
            Err(Error::FieldMismatch(self.spec, other.spec))
        }
    }

    fn with(&self, v: u32) -> FieldElement {
        FieldElement { spec: self.spec, repr: Elem(v as u16) }
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.repr)
    }
}

pub fn fe_add(a: &FieldElement, b: &FieldElement) -> Result<FieldElement> {
    a.same(b)?;
    Ok(a.with(a.spec.add_raw(a.repr(), b.repr())))
}

pub fn fe_sub(a: &FieldElement, b: &FieldElement) -> Result<FieldElement> {
    a.same(b)?;
    Ok(a.with(a.spec.add_raw(a.repr(), a.spec.neg_raw(b.repr()))))
}

pub fn fe_mul(a: &FieldElement, b: &FieldElement) -> Result<FieldElement> {
    a.same(b)?;
    Ok(a.with(a.spec.mul_raw(a.repr(), b.repr())))
}

pub fn fe_inv(a: &FieldElement) -> Result<FieldElement> {
    a.spec
        .inv_raw(a.repr())
        .map(|v| a.with(v))
        .ok_or_else(|| Error::domain("inverse of zero"))
}

pub fn fe_pow(a: &FieldElement, e: u64) -> Result<FieldElement> {
    if a.is_zero() && e == 0 {
        return Err(Error::domain("0^0 is undefined"));
    }
    Ok(a.with(a.spec.pow_raw(a.repr(), e)))
}

/// Every element of the field (or every nonzero one), ascending.
pub fn field_elements(spec: FieldSpec, nonzero_only: bool) -> Vec<FieldElement> {
    let start = u32::from(nonzero_only);
    (start..spec.order())
        .map(|v| FieldElement { spec, repr: Elem(v as u16) })
        .collect()
}
