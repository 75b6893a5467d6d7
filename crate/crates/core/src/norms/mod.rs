//! Vector norms on ℂ^d, their induced operator norms and set norms.
//!
//! Every induced norm here has an exact formula: the Euclidean operator norm
//! is the largest singular value, the sup-norm operator norm is the largest
//! absolute row sum, and ellipsoidal or transported norms reduce to their base
//! norm after a similarity. `EntrySup` (largest entry modulus) is a matrix
//! norm only and is not induced by any vector norm.

pub(crate) mod search;

pub use search::{
    distortion_search, ellipsoidal_descent, ellipsoidal_descent_multistart, DescentResult,
    DistortionResult, DEFAULT_DISTORTION_SAMPLES,
};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matcore::{condition_number, spectral_norm, spectral_radius};
use crate::matrix::{CMatrix, MatrixSet, C64};

/// Largest accepted condition number for ellipsoid and transport matrices.
pub const MAX_CONDITION: f64 = 1e8;

/// Largest nesting of `Transported` specs.
pub const MAX_TRANSPORT_DEPTH: usize = 8;

/// Declarative description of a norm.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NormSpec {
    /// `‖v‖ = (Σ|v_i|²)^{1/2}`
    Euclidean,
    /// `‖v‖ = max |v_i|`
    VectorSup,
    /// `‖A‖ = max |a_ij|`, matrices only.
    EntrySup,
    /// `‖v‖ = ‖Wv‖₂`
    Ellipsoidal { w: CMatrix },
    /// `‖v‖ = base(Sv)`
    Transported { s: CMatrix, base: Box<NormSpec> },
}

impl NormSpec {
    /// Ellipsoidal norm, rejecting singular or badly conditioned `W`.
    pub fn ellipsoidal(w: CMatrix) -> Result<Self> {
        check_condition(&w)?;
        Ok(NormSpec::Ellipsoidal { w })
    }

    pub fn transported(s: CMatrix, base: NormSpec) -> Result<Self> {
        check_condition(&s)?;
        let spec = NormSpec::Transported {
            s,
            base: Box::new(base),
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Whether the norm is induced by a vector norm (everything but `EntrySup`).
    pub fn is_induced(&self) -> bool {
        match self {
            NormSpec::EntrySup => false,
            NormSpec::Transported { base, .. } => base.is_induced(),
            _ => true,
        }
    }

    pub fn transport_depth(&self) -> usize {
        match self {
            NormSpec::Transported { base, .. } => 1 + base.transport_depth(),
            _ => 0,
        }
    }

    /// Dimension pinned by an embedded matrix, if any.
    pub fn dim(&self) -> Option<usize> {
        match self {
            NormSpec::Ellipsoidal { w } => Some(w.dim()),
            NormSpec::Transported { s, .. } => Some(s.dim()),
            _ => None,
        }
    }

    /// Condition numbers of the embedded matrices, outermost first.
    pub fn conditions(&self) -> Result<Vec<f64>> {
        match self {
            NormSpec::Ellipsoidal { w } => Ok(vec![condition_number(w)?]),
            NormSpec::Transported { s, base } => {
                let mut out = vec![condition_number(s)?];
                out.extend(base.conditions()?);
                Ok(out)
            }
            _ => Ok(vec![]),
        }
    }

    /// Checks nesting depth, conditioning and dimension consistency.
    pub fn validate(&self) -> Result<()> {
        if self.transport_depth() > MAX_TRANSPORT_DEPTH {
            return Err(Error::usage(format!(
                "transported norm nested deeper than {MAX_TRANSPORT_DEPTH}"
            )));
        }
        match self {
            NormSpec::Ellipsoidal { w } => check_condition(w),
            NormSpec::Transported { s, base } => {
                check_condition(s)?;
                if let Some(d) = base.dim() {
                    if d != s.dim() {
                        return Err(Error::DimensionMismatch {
                            expected: s.dim(),
                            found: d,
                        });
                    }
                }
                base.validate()
            }
            _ => Ok(()),
        }
    }

    pub fn label(&self) -> String {
        match self {
            NormSpec::Euclidean => "euclidean".into(),
            NormSpec::VectorSup => "sup".into(),
            NormSpec::EntrySup => "entry-sup".into(),
            NormSpec::Ellipsoidal { .. } => "ellipsoidal".into(),
            NormSpec::Transported { base, .. } => format!("transported({})", base.label()),
        }
    }

    /// Precomputes inverses so repeated operator-norm evaluations are cheap.
    pub fn prepare(&self) -> Result<PreparedNorm> {
        self.validate()?;
        Ok(match self {
            NormSpec::Euclidean => PreparedNorm::Euclidean,
            NormSpec::VectorSup => PreparedNorm::VectorSup,
            NormSpec::EntrySup => PreparedNorm::EntrySup,
            NormSpec::Ellipsoidal { w } => PreparedNorm::Similarity {
                s: w.clone(),
                s_inv: w.inverse()?,
                base: Box::new(PreparedNorm::Euclidean),
            },
            NormSpec::Transported { s, base } => PreparedNorm::Similarity {
                s: s.clone(),
                s_inv: s.inverse()?,
                base: Box::new(base.prepare()?),
            },
        })
    }
}

fn check_condition(m: &CMatrix) -> Result<()> {
    let cond = condition_number(m)?;
    if !cond.is_finite() || cond > MAX_CONDITION {
        return Err(Error::Singular { condition: cond });
    }
    Ok(())
}

/// A norm with cached similarity inverses.
#[derive(Clone, Debug)]
pub enum PreparedNorm {
    Euclidean,
    VectorSup,
    EntrySup,
    Similarity {
        s: CMatrix,
        s_inv: CMatrix,
        base: Box<PreparedNorm>,
    },
}

impl PreparedNorm {
    pub fn is_induced(&self) -> bool {
        match self {
            PreparedNorm::EntrySup => false,
            PreparedNorm::Similarity { base, .. } => base.is_induced(),
            _ => true,
        }
    }

    pub fn vector(&self, v: &[C64]) -> Result<f64> {
        match self {
            PreparedNorm::Euclidean => Ok(v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()),
            PreparedNorm::VectorSup => Ok(v.iter().map(|z| z.norm()).fold(0.0, f64::max)),
            PreparedNorm::EntrySup => Err(Error::usage(
                "entry-sup is a matrix norm and cannot measure vectors",
            )),
            PreparedNorm::Similarity { s, base, .. } => {
                if v.len() != s.dim() {
                    return Err(Error::DimensionMismatch {
                        expected: s.dim(),
                        found: v.len(),
                    });
                }
                base.vector(&s.apply(v))
            }
        }
    }

    pub fn operator(&self, a: &CMatrix) -> Result<f64> {
        match self {
            PreparedNorm::Euclidean => spectral_norm(a),
            PreparedNorm::VectorSup => Ok((0..a.dim())
                .map(|i| a.row(i).iter().map(|z| z.norm()).sum::<f64>())
                .fold(0.0, f64::max)),
            PreparedNorm::EntrySup => Ok(a.max_abs()),
            PreparedNorm::Similarity { s, s_inv, base } => {
                if a.dim() != s.dim() {
                    return Err(Error::DimensionMismatch {
                        expected: s.dim(),
                        found: a.dim(),
                    });
                }
                base.operator(&a.conjugate_by(s, s_inv))
            }
        }
    }

    pub fn set(&self, set: &MatrixSet) -> Result<f64> {
        let mut best: f64 = 0.0;
        for m in set {
            best = best.max(self.operator(m)?);
        }
        Ok(best)
    }
}

pub fn vector_norm(spec: &NormSpec, v: &[C64]) -> Result<f64> {
    spec.prepare()?.vector(v)
}

/// Operator norm `sup_{‖v‖=1} ‖Av‖` (or the entry-sup matrix norm).
pub fn operator_norm(spec: &NormSpec, a: &CMatrix) -> Result<f64> {
    spec.prepare()?.operator(a)
}

/// `‖Σ‖ = max_{A∈Σ} ‖A‖`.
pub fn set_norm(spec: &NormSpec, set: &MatrixSet) -> Result<f64> {
    spec.prepare()?.set(set)
}

/// `ρ(Σ) = max_{A∈Σ} ρ(A)`.
pub fn set_spectral_radius(set: &MatrixSet) -> Result<f64> {
    let mut best: f64 = 0.0;
    for m in set {
        best = best.max(spectral_radius(m)?);
    }
    Ok(best)
}
