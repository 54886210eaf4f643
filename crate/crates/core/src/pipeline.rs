//! JSON encoding of automorphism pipelines.
//!
//! A pipeline is a JSON array of steps applied left to right:
//!
//! ```text
//! {"op":"transpose"}
//! {"op":"moebius","alpha":[re,im],"gamma":[re,im]}
//! {"op":"diag_twist","phi":[[re,im],...]}
//! {"op":"lower_twist","a":{"monomials":[{"i":0,"j":0,"k":0,"c":[re,im]},...]}}
//! {"op":"diag_conj","a":{"monomials":[...],"exp":false,"reciprocal":false}}
//! ```
//!
//! Any complex coefficient may also be written as a bare real number.
//! For `lower_twist` the exponents are powers of `x12`, `tr x`, `det x`; for
//! `diag_conj` they are powers of `x11`, `x22`, `x12·x21`. The optional
//! `exp` flag makes the diagonal scalar `exp(g)`, and `reciprocal` takes
//! `1/a`.

use num_complex::Complex;
use serde::{Deserialize, Deserializer, Serialize};

use crate::automorphism::{Automorphism, MoebiusParams};
use crate::error::{Error, Result};
use crate::poly::{EntirePoly, InvariantFunction, MonomialTable, ScalarForm, TwistFunction};
use crate::scalar::{Cx, Real};

type Pair = [f64; 2];

#[derive(Deserialize)]
#[serde(untagged)]
enum Coeff {
    Real(f64),
    Complex(Pair),
}

impl From<Coeff> for Pair {
    fn from(c: Coeff) -> Self {
        match c {
            Coeff::Real(re) => [re, 0.0],
            Coeff::Complex(p) => p,
        }
    }
}

fn coeff<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Pair, D::Error> {
    Coeff::deserialize(d).map(Pair::from)
}

fn coeffs<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<Pair>, D::Error> {
    Vec::<Coeff>::deserialize(d).map(|v| v.into_iter().map(Pair::from).collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case", deny_unknown_fields)]
pub enum Step {
    Transpose {},
    Moebius {
        #[serde(deserialize_with = "coeff")]
        alpha: Pair,
        #[serde(deserialize_with = "coeff")]
        gamma: Pair,
    },
    DiagTwist {
        #[serde(deserialize_with = "coeffs")]
        phi: Vec<Pair>,
    },
    LowerTwist { a: Monomials },
    DiagConj { a: InvariantMonomials },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Monomial {
    pub i: u32,
    pub j: u32,
    pub k: u32,
    #[serde(deserialize_with = "coeff")]
    pub c: Pair,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Monomials {
    pub monomials: Vec<Monomial>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InvariantMonomials {
    pub monomials: Vec<Monomial>,
    #[serde(default, skip_serializing_if = "is_false")]
    pub exp: bool,
    #[serde(default, skip_serializing_if = "is_false")]
    pub reciprocal: bool,
}

fn is_false(b: &bool) -> bool {
    !*b
}

fn to_cx<T: Real>(p: Pair) -> Cx<T> {
    Complex::new(T::lit(p[0]), T::lit(p[1]))
}

fn to_pair<T: Real>(z: Cx<T>) -> Pair {
    [z.re.to_f64_lossy(), z.im.to_f64_lossy()]
}

fn table<T: Real>(m: &[Monomial]) -> Result<MonomialTable<T>> {
    MonomialTable::new(m.iter().map(|t| ((t.i, t.j, t.k), to_cx(t.c))))
}

fn monomials<T: Real>(t: &MonomialTable<T>) -> Vec<Monomial> {
    t.terms()
        .map(|((i, j, k), c)| Monomial {
            i,
            j,
            k,
            c: to_pair(c),
        })
        .collect()
}

impl Step {
    pub fn to_automorphism<T: Real>(&self) -> Result<Automorphism<T>> {
        Ok(match self {
            Step::Transpose {} => Automorphism::Transpose,
            Step::Moebius { alpha, gamma } => {
                Automorphism::Moebius(MoebiusParams::new(to_cx(*alpha), to_cx(*gamma))?)
            }
            Step::DiagTwist { phi } => {
                Automorphism::DiagTwist(EntirePoly::new(phi.iter().copied().map(to_cx).collect())?)
            }
            Step::LowerTwist { a } => Automorphism::LowerTwist(TwistFunction::new(table(&a.monomials)?)),
            Step::DiagConj { a } => Automorphism::diag_conj(InvariantFunction {
                g: table(&a.monomials)?,
                form: if a.exp { ScalarForm::Exp } else { ScalarForm::Poly },
                reciprocal: a.reciprocal,
            }),
        })
    }

    /// Encodes a single non-composite step; opaque and pulled-back
    /// conjugations have no wire form.
    pub fn from_automorphism<T: Real>(f: &Automorphism<T>) -> Result<Self> {
        Ok(match f {
            Automorphism::Transpose => Step::Transpose {},
            Automorphism::Moebius(p) => Step::Moebius {
                alpha: to_pair(p.alpha()),
                gamma: to_pair(p.gamma()),
            },
            Automorphism::DiagTwist(phi) => Step::DiagTwist {
                phi: phi.coeffs().iter().copied().map(to_pair).collect(),
            },
            Automorphism::LowerTwist(a) => Step::LowerTwist {
                a: Monomials {
                    monomials: monomials(&a.g),
                },
            },
            Automorphism::DiagConj { a, pullback } if pullback.is_empty() => Step::DiagConj {
                a: InvariantMonomials {
                    monomials: monomials(&a.g),
                    exp: a.form == ScalarForm::Exp,
                    reciprocal: a.reciprocal,
                },
            },
            other => {
                return Err(Error::WrongForm {
                    expected: "a step with a JSON encoding",
                    got: other.kind(),
                })
            }
        })
    }
}

/// Parses a pipeline document into a left-to-right composition.
pub fn parse_pipeline<T: Real>(json: &str) -> Result<Automorphism<T>> {
    let steps: Vec<Step> = serde_json::from_str(json)
        .map_err(|e| Error::InvalidParameter(format!("pipeline JSON: {e}")))?;
    let members = steps
        .iter()
        .map(Step::to_automorphism)
        .collect::<Result<Vec<_>>>()?;
    Automorphism::compose(members)
}

/// Flattens a composition into wire steps.
pub fn pipeline_steps<T: Real>(f: &Automorphism<T>) -> Result<Vec<Step>> {
    match f {
        Automorphism::Compose(members) => Ok(members
            .iter()
            .map(pipeline_steps)
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .flatten()
            .collect()),
        single => Ok(vec![Step::from_automorphism(single)?]),
    }
}

/// Parses a polynomial given as a JSON array of coefficients, each a real
/// number or an `[re, im]` pair, in ascending degree.
pub fn parse_poly<T: Real>(json: &str) -> Result<EntirePoly<T>> {
    let coeffs: Vec<Coeff> = serde_json::from_str(json)
        .map_err(|e| Error::InvalidParameter(format!("polynomial JSON: {e}")))?;
    EntirePoly::new(coeffs.into_iter().map(|c| to_cx(c.into())).collect())
}
