//! JSON shapes for matrices, construction parameters and verdicts.
//!
//! Elements are always integer reprs; the field is always explicit.

use serde::{Deserialize, Serialize};

use crate::construct::SiParams;
use crate::error::{Error, Result};
use crate::field::{Elem, Field, FieldSpec};
use crate::matrix::SquareMatrix;
use crate::si::{Branch, SiVerdict};

/// `{"p":2,"m":3,"poly":13,"n":3,"rows":[[6,1,5],[1,6,3],[5,3,6]]}`
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixJson {
    pub p: u32,
    pub m: u32,
    #[serde(default)]
    pub poly: u32,
    pub n: usize,
    pub rows: Vec<Vec<u32>>,
}

impl MatrixJson {
    pub fn from_matrix(a: &SquareMatrix) -> Self {
        let spec = a.field().spec();
        MatrixJson { p: spec.p(), m: spec.m(), poly: spec.poly(), n: a.n(), rows: a.rows() }
    }

    pub fn to_matrix(&self) -> Result<SquareMatrix> {
        let field = Field::with_tables(FieldSpec::new(self.p, self.m, self.poly)?);
        if self.rows.len() != self.n {
            return Err(Error::Dimension(format!("n = {} but {} rows given", self.n, self.rows.len())));
        }
        SquareMatrix::from_rows(&field, &self.rows)
    }
}

/// `{"field":{"p":2,"m":4,"poly":25},"a":[1,2,4],"d":[2,2,9],"x":1,"y":2}`
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsJson {
    pub field: FieldSpec,
    pub a: [u32; 3],
    pub d: [u32; 3],
    pub x: u32,
    pub y: u32,
}

impl ParamsJson {
    pub fn from_params(p: &SiParams) -> Self {
        ParamsJson {
            field: p.field().spec(),
            a: p.a.map(|e| e.repr()),
            d: p.d.map(|e| e.repr()),
            x: p.x.repr(),
            y: p.y.repr(),
        }
    }

    pub fn to_params(&self) -> Result<SiParams> {
        let field = Field::with_tables(self.field);
        let [a11, a22, a33] = self.a;
        let [d1, d2, d3] = self.d;
        SiParams::from_reprs(&field, [a11, a22, a33, d1, d2, d3, self.x, self.y])
    }
}

/// `{"si":true,"branch":"nowhere-zero","D":[7,6,3],"c":1,"a":1}`
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerdictJson {
    pub si: bool,
    pub branch: Branch,
    #[serde(rename = "D")]
    pub d: Option<Vec<u32>>,
    pub c: Option<u32>,
    pub a: Option<u32>,
}

impl From<&SiVerdict> for VerdictJson {
    fn from(v: &SiVerdict) -> Self {
        VerdictJson {
            si: v.is_semi_involutory,
            branch: v.branch,
            d: v.witness.as_ref().map(|d| d.reprs()),
            c: v.scalar_c.map(Elem::repr),
            a: v.a_value.map(Elem::repr),
        }
    }
}
