//! JSON encodings shared by reports and the command line.
//!
//! Complex numbers are written as `{"re": .., "im": ..}` objects and
//! matrices as row-major nested arrays of them.

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::numlin::{HermitianMatrix, C64};

/// A complex number in its `{"re", "im"}` wire form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Cx {
    pub re: f64,
    pub im: f64,
}

impl From<C64> for Cx {
    fn from(z: C64) -> Self {
        Cx { re: z.re, im: z.im }
    }
}

impl From<Cx> for C64 {
    fn from(z: Cx) -> Self {
        C64::new(z.re, z.im)
    }
}

pub fn complex(z: C64) -> Value {
    json!({ "re": z.re, "im": z.im })
}

pub fn complexes(zs: &[C64]) -> Value {
    Value::Array(zs.iter().map(|&z| complex(z)).collect())
}

pub fn matrix(m: &HermitianMatrix) -> Value {
    let n = m.dim();
    Value::Array(
        (0..n)
            .map(|i| Value::Array((0..n).map(|j| complex(m.get(i, j))).collect()))
            .collect(),
    )
}

pub fn points(ps: &[Vec<C64>]) -> Value {
    Value::Array(ps.iter().map(|p| complexes(p)).collect())
}
