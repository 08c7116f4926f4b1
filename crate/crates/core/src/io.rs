//! JSON wire formats. Complex numbers are `[re, im]`; matrices are row lists.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::catalog::{Family, FamilySpec};
use crate::cycles::{CycleCertificate, TripleOperator};
use crate::error::{invalid, Result};
use crate::linalg::{CMatrix, C64};
use crate::mps::{DenseState, Rank3Tensor};
use crate::oracle::VerificationReport;
use crate::symmetries::SymmetrySolution;
use crate::transforms::TransformPlan;

pub type ComplexJson = [f64; 2];
pub type MatrixJson = Vec<Vec<ComplexJson>>;

pub fn complex_to_json(z: C64) -> ComplexJson {
    [z.re, z.im]
}

pub fn complex_from_json(z: ComplexJson) -> C64 {
    C64::new(z[0], z[1])
}

pub fn matrix_to_json(m: &CMatrix) -> MatrixJson {
    (0..m.rows()).map(|i| m.row(i).iter().map(|z| complex_to_json(*z)).collect()).collect()
}

pub fn matrix_from_json(m: &MatrixJson) -> Result<CMatrix> {
    CMatrix::from_rows(&m.iter().map(|r| r.iter().map(|z| complex_from_json(*z)).collect()).collect::<Vec<_>>())
}

/// Parses a matrix literal such as `[[1, 0], [0, [0, 1]]]`: entries are
/// numbers or `[re, im]` pairs.
pub fn parse_matrix_literal(s: &str) -> Result<CMatrix> {
    let v: Value = serde_json::from_str(s).map_err(|e| invalid(format!("bad matrix literal: {e}")))?;
    let rows = v.as_array().ok_or_else(|| invalid("matrix literal must be a list of rows"))?;
    let parsed = rows
        .iter()
        .map(|r| {
            r.as_array()
                .ok_or_else(|| invalid("matrix rows must be lists"))?
                .iter()
                .map(parse_entry)
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    CMatrix::from_rows(&parsed)
}

fn parse_entry(v: &Value) -> Result<C64> {
    match v {
        Value::Number(x) => Ok(C64::new(x.as_f64().ok_or_else(|| invalid("bad number"))?, 0.0)),
        Value::Array(p) if p.len() == 2 => match (p[0].as_f64(), p[1].as_f64()) {
            (Some(re), Some(im)) => Ok(C64::new(re, im)),
            _ => Err(invalid("complex entries are [re, im] numbers")),
        },
        _ => Err(invalid(format!("bad matrix entry {v}"))),
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct TensorJson {
    pub d: usize,
    #[serde(rename = "D")]
    pub bond: usize,
    /// `entries[j][α][β] = A^j_{αβ}`.
    pub entries: Vec<MatrixJson>,
}

impl From<&Rank3Tensor> for TensorJson {
    fn from(a: &Rank3Tensor) -> Self {
        Self { d: a.d(), bond: a.bond(), entries: a.mats().iter().map(matrix_to_json).collect() }
    }
}

impl TensorJson {
    pub fn to_tensor(&self) -> Result<Rank3Tensor> {
        if self.entries.len() != self.d {
            return Err(invalid("tensor entries do not match d"));
        }
        let mats = self.entries.iter().map(matrix_from_json).collect::<Result<Vec<_>>>()?;
        if mats.iter().any(|m| m.shape() != (self.bond, self.bond)) {
            return Err(invalid("tensor matrices do not match D"));
        }
        Rank3Tensor::new(mats)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct StateJson {
    pub n: usize,
    pub local_dims: Vec<usize>,
    pub amplitudes: Vec<ComplexJson>,
}

impl From<&DenseState> for StateJson {
    fn from(s: &DenseState) -> Self {
        Self {
            n: s.n(),
            local_dims: s.local_dims().to_vec(),
            amplitudes: s.amplitudes().iter().map(|z| complex_to_json(*z)).collect(),
        }
    }
}

impl StateJson {
    pub fn to_state(&self) -> Result<DenseState> {
        if self.local_dims.len() != self.n {
            return Err(invalid("local_dims length differs from n"));
        }
        DenseState::new(self.local_dims.clone(), self.amplitudes.iter().map(|z| complex_from_json(*z)).collect())
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct OpJson {
    pub g: MatrixJson,
    pub x: MatrixJson,
    pub y: MatrixJson,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct CertificateJson {
    pub n: usize,
    pub ops: Vec<OpJson>,
    pub scalars: Vec<ComplexJson>,
    pub site_ops: Vec<MatrixJson>,
}

impl From<&CycleCertificate> for CertificateJson {
    fn from(c: &CycleCertificate) -> Self {
        Self {
            n: c.n(),
            ops: c
                .ops
                .iter()
                .map(|h| OpJson { g: matrix_to_json(&h.g), x: matrix_to_json(&h.x), y: matrix_to_json(&h.y), label: h.label.clone() })
                .collect(),
            scalars: c.scalars.iter().map(|z| complex_to_json(*z)).collect(),
            site_ops: c.site_ops.iter().map(matrix_to_json).collect(),
        }
    }
}

impl CertificateJson {
    /// Rebuilds the certificate from its ops, re-deriving scalars and site
    /// operators; stored site operators must agree with the derived ones.
    pub fn to_certificate(&self, tol: f64) -> Result<CycleCertificate> {
        let ops = self
            .ops
            .iter()
            .map(|o| {
                let h = TripleOperator::new(matrix_from_json(&o.g)?, matrix_from_json(&o.x)?, matrix_from_json(&o.y)?)?;
                Ok(match &o.label {
                    Some(l) => h.with_label(l.clone()),
                    None => h,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        if ops.len() != self.n {
            return Err(invalid("certificate length differs from n"));
        }
        let cert = CycleCertificate::from_ops(ops, tol)?;
        let stored = self.site_ops.iter().map(matrix_from_json).collect::<Result<Vec<_>>>()?;
        if stored.len() != cert.n() || stored.iter().zip(&cert.site_ops).any(|(s, d)| s.shape() != d.shape() || s.rel_dist(d) > 1e-6) {
            return Err(invalid("stored site operators disagree with the ops"));
        }
        Ok(cert)
    }
}

fn spec_to_json(s: &FamilySpec) -> (String, Option<MatrixJson>) {
    (s.family.name().to_string(), s.param.as_ref().map(matrix_to_json))
}

fn spec_from_json(name: &str, param: &Option<MatrixJson>) -> Result<FamilySpec> {
    FamilySpec::new(name.parse::<Family>()?, param.as_ref().map(matrix_from_json).transpose()?)
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct PlanJson {
    pub kind: PlanTag,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source_param: Option<MatrixJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target_param: Option<MatrixJson>,
    pub n: usize,
    pub feasible: bool,
    pub reason: String,
    pub source_tensor: TensorJson,
    pub target_tensor: TensorJson,
    pub certificate: Option<CertificateJson>,
    #[serde(default)]
    pub alternatives: Vec<CertificateJson>,
    #[serde(default)]
    pub verified_residual: Option<f64>,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum PlanTag {
    Transform,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum SymmetryTag {
    Symmetries,
}

impl From<&TransformPlan> for PlanJson {
    fn from(p: &TransformPlan) -> Self {
        let (source, source_param) = p.source_family.as_ref().map(spec_to_json).unzip();
        let (target, target_param) = p.target_family.as_ref().map(spec_to_json).unzip();
        Self {
            kind: PlanTag::Transform,
            source,
            source_param: source_param.flatten(),
            target,
            target_param: target_param.flatten(),
            n: p.n,
            feasible: p.feasible,
            reason: p.reason.clone(),
            source_tensor: (&p.source_tensor).into(),
            target_tensor: (&p.target_tensor).into(),
            certificate: p.certificate.as_ref().map(Into::into),
            alternatives: p.alternatives.iter().map(Into::into).collect(),
            verified_residual: p.verification,
        }
    }
}

impl PlanJson {
    pub fn to_plan(&self, tol: f64) -> Result<TransformPlan> {
        let family = |name: &Option<String>, param: &Option<MatrixJson>| {
            name.as_deref().map(|n| spec_from_json(n, param)).transpose()
        };
        Ok(TransformPlan {
            source_family: family(&self.source, &self.source_param)?,
            target_family: family(&self.target, &self.target_param)?,
            source_tensor: self.source_tensor.to_tensor()?,
            target_tensor: self.target_tensor.to_tensor()?,
            n: self.n,
            feasible: self.feasible,
            reason: self.reason.clone(),
            certificate: self.certificate.as_ref().map(|c| c.to_certificate(tol)).transpose()?,
            alternatives: self.alternatives.iter().map(|c| c.to_certificate(tol)).collect::<Result<_>>()?,
            verification: self.verified_residual,
        })
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct ParametrizedJson {
    pub description: String,
    pub constraint: String,
    pub n_params: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct SymmetryReportJson {
    pub kind: SymmetryTag,
    pub family: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub param: Option<MatrixJson>,
    pub n: usize,
    pub tensor: TensorJson,
    pub certificates: Vec<CertificateJson>,
    #[serde(default)]
    pub parametrized: Vec<ParametrizedJson>,
    #[serde(default)]
    pub warnings: Vec<String>,
}

impl SymmetryReportJson {
    pub fn new(sol: &SymmetrySolution, tensor: &Rank3Tensor) -> Self {
        let (family, param) = spec_to_json(&sol.family);
        Self {
            kind: SymmetryTag::Symmetries,
            family,
            param,
            n: sol.n,
            tensor: tensor.into(),
            certificates: sol.certificates.iter().map(Into::into).collect(),
            parametrized: sol
                .parametrized
                .iter()
                .map(|p| ParametrizedJson {
                    description: p.to_string(),
                    constraint: p.constraint().to_string(),
                    n_params: p.n_params(sol.n),
                })
                .collect(),
            warnings: sol.warnings.clone(),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct ReportJson {
    pub checked: usize,
    pub passed: usize,
    pub worst_residual: f64,
    pub failures: Vec<(String, f64)>,
    pub skipped: Vec<(String, String)>,
}

impl From<&VerificationReport> for ReportJson {
    fn from(r: &VerificationReport) -> Self {
        Self {
            checked: r.checked,
            passed: r.passed,
            worst_residual: r.worst_residual,
            failures: r.failures.clone(),
            skipped: r.skipped.clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::linalg::{c64, hadamard};

    #[test]
    fn literal_mixed_entries() {
        let m = parse_matrix_literal("[[1, 0], [0, [0.5, -2]]]").unwrap();
        assert_eq!(m[(1, 1)], c64(0.5, -2.0));
        assert!(parse_matrix_literal("[[1, 0], [0]]").is_err());
        assert!(parse_matrix_literal("[[1, \"a\"]]").is_err());
    }

    #[test]
    fn tensor_round_trip() {
        let a = catalog::ghz_b(&hadamard()).unwrap();
        let j = TensorJson::from(&a);
        let s = serde_json::to_string(&j).unwrap();
        let back: TensorJson = serde_json::from_str(&s).unwrap();
        assert_eq!(back.to_tensor().unwrap(), a);
    }

    #[test]
    fn certificate_round_trip() {
        let c = crate::cycles::trivial_certificate(2, 2, 3);
        let j = CertificateJson::from(&c);
        let back = j.to_certificate(1e-10).unwrap();
        assert!(back.same_site_ops(&c, 1e-12));
    }
}
