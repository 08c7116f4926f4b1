//! Named fiducial tensors and their parametrized families.

use std::fmt;
use std::str::FromStr;

use crate::error::{invalid, Result};
use crate::linalg::{hadamard, sigma1, CMatrix, C64};
use crate::mps::Rank3Tensor;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Family {
    W,
    Ghz,
    Cluster,
    Aklt,
    Vb,
    GhzB,
    WB,
    AkltG,
}

impl Family {
    pub const ALL: [Family; 8] =
        [Family::W, Family::Ghz, Family::Cluster, Family::Aklt, Family::Vb, Family::GhzB, Family::WB, Family::AkltG];

    pub fn name(self) -> &'static str {
        match self {
            Family::W => "w",
            Family::Ghz => "ghz",
            Family::Cluster => "cluster",
            Family::Aklt => "aklt",
            Family::Vb => "vb",
            Family::GhzB => "ghz-b",
            Family::WB => "w-b",
            Family::AkltG => "aklt-g",
        }
    }

    pub fn needs_param(self) -> bool {
        matches!(self, Family::GhzB | Family::WB | Family::AkltG)
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = crate::error::Error;
    fn from_str(s: &str) -> Result<Self> {
        let key = s.to_ascii_lowercase().replace('_', "-");
        Family::ALL
            .into_iter()
            .find(|f| f.name() == key)
            .ok_or_else(|| invalid(format!("unknown family '{s}'")))
    }
}

/// A catalogued family with its 2×2 parameter (`b` or `g`) where required.
#[derive(Clone, Debug, PartialEq)]
pub struct FamilySpec {
    pub family: Family,
    pub param: Option<CMatrix>,
}

impl FamilySpec {
    pub fn new(family: Family, param: Option<CMatrix>) -> Result<Self> {
        let spec = Self { family, param };
        spec.validate()?;
        Ok(spec)
    }

    pub fn plain(family: Family) -> Self {
        Self { family, param: None }
    }

    pub fn ghz_b(b: CMatrix) -> Self {
        Self { family: Family::GhzB, param: Some(b) }
    }

    pub fn w_b(b: CMatrix) -> Self {
        Self { family: Family::WB, param: Some(b) }
    }

    pub fn aklt_g(g: CMatrix) -> Self {
        Self { family: Family::AkltG, param: Some(g) }
    }

    pub fn validate(&self) -> Result<()> {
        match (&self.param, self.family.needs_param()) {
            (None, true) => Err(invalid(format!("family {} requires a 2x2 parameter", self.family))),
            (Some(_), false) => Err(invalid(format!("family {} takes no parameter", self.family))),
            (Some(p), true) => {
                if p.shape() != (2, 2) {
                    Err(invalid("family parameter must be 2x2"))
                } else if !p.is_regular(1e-12) {
                    Err(invalid("family parameter must be regular"))
                } else {
                    Ok(())
                }
            }
            (None, false) => Ok(()),
        }
    }

    /// Parameter folded into a GHZ/W generated pair, if this spec is one;
    /// `GHZ` and `Cluster` map to `GHZ_b` with `b = 𝟙` and `b = H`.
    pub fn generator_param(&self) -> Option<(Family, CMatrix)> {
        match self.family {
            Family::Ghz => Some((Family::GhzB, CMatrix::identity(2))),
            Family::Cluster => Some((Family::GhzB, hadamard())),
            Family::W => Some((Family::WB, CMatrix::identity(2))),
            Family::GhzB | Family::WB => Some((self.family, self.param.clone()?)),
            _ => None,
        }
    }
}

impl fmt::Display for FamilySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.family)
    }
}

/// The tensor of a catalogued family.
pub fn get_tensor(spec: &FamilySpec) -> Result<Rank3Tensor> {
    spec.validate()?;
    let p = spec.param.as_ref();
    match spec.family {
        Family::Ghz => ghz_b(&CMatrix::identity(2)),
        Family::GhzB => ghz_b(p.expect("validated")),
        Family::Cluster => ghz_b(&hadamard()),
        Family::W => w_b(&CMatrix::identity(2)),
        Family::WB => w_b(p.expect("validated")),
        Family::Aklt => Ok(aklt()),
        Family::AkltG => aklt().map_bond(p.expect("validated"), &CMatrix::identity(2)),
        Family::Vb => Ok(vb()),
    }
}

/// `A⁰ = b|0⟩⟨0|`, `A¹ = b|1⟩⟨1|`.
pub fn ghz_b(b: &CMatrix) -> Result<Rank3Tensor> {
    Rank3Tensor::new(vec![b * &CMatrix::unit(2, 2, 0, 0), b * &CMatrix::unit(2, 2, 1, 1)])
}

/// `A⁰ = b(|0⟩⟨1| + |1⟩⟨0|)`, `A¹ = b|0⟩⟨0|`.
pub fn w_b(b: &CMatrix) -> Result<Rank3Tensor> {
    Rank3Tensor::new(vec![b * &sigma1(), b * &CMatrix::unit(2, 2, 0, 0)])
}

/// `A⁰ = √2 E₁₀`, `A¹ = diag(−1, 1)`, `A² = −√2 E₀₁`.
pub fn aklt() -> Rank3Tensor {
    let s = 2f64.sqrt();
    Rank3Tensor::new(vec![
        CMatrix::real(&[&[0.0, 0.0], &[s, 0.0]]),
        CMatrix::real(&[&[-1.0, 0.0], &[0.0, 1.0]]),
        CMatrix::real(&[&[0.0, -s], &[0.0, 0.0]]),
    ])
    .expect("constant tensor")
}

/// Valence-bond tensor, `B^{2i+j} = |i⟩⟨j|`, so that `𝒜 = 𝟙₄`.
pub fn vb() -> Rank3Tensor {
    Rank3Tensor::new((0..4).map(|k| CMatrix::unit(2, 2, k / 2, k % 2)).collect()).expect("constant tensor")
}

/// Parses a family name plus optional parameter, rejecting inconsistent pairs.
pub fn spec_from_parts(name: &str, param: Option<CMatrix>) -> Result<FamilySpec> {
    FamilySpec::new(name.parse()?, param)
}

pub fn real2(a: f64, b: f64, c: f64, d: f64) -> CMatrix {
    CMatrix::from_fn(2, 2, |i, j| C64::from([[a, b], [c, d]][i][j]))
}
