//! Brute-force checks: dense evaluation of certificates and exhaustive
//! cycle search, independent of the structured solvers.

use std::ops::RangeInclusive;

use crate::cycles::{dedup_ops, CycleCertificate, TripleOperator};
use crate::error::{invalid, Error, Result};
use crate::linalg::{prop_check, CMatrix, PropResult};
use crate::mps::{apply_local, build_state, states_equal, Rank3Tensor, ScalarMode, DEFAULT_AMPLITUDE_CAP};

/// Compares `(⊗ site_ops)|Ψ(A)⟩` with `|Ψ(B)⟩`.
pub fn verify_certificate(
    cert: &CycleCertificate,
    source: &Rank3Tensor,
    target: &Rank3Tensor,
    mode: ScalarMode,
    tol: f64,
) -> Result<PropResult> {
    let n = cert.n();
    let psi = build_state(std::slice::from_ref(source), n)?;
    let phi = build_state(std::slice::from_ref(target), n)?;
    let moved = apply_local(&cert.site_ops, &psi)?;
    states_equal(&moved, &phi, mode, tol)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ClaimKind {
    /// Strict equality `(⊗ g_k)|Ψ(A)⟩ = |Ψ(A)⟩`.
    Symmetry,
    /// Equality up to a nonzero scalar.
    Transform,
}

impl ClaimKind {
    pub fn mode(self) -> ScalarMode {
        match self {
            ClaimKind::Symmetry => ScalarMode::Strict,
            ClaimKind::Transform => ScalarMode::UpToScalar,
        }
    }
}

/// A certificate with the tensors it is claimed to relate.
#[derive(Clone, Debug)]
pub struct Claim {
    pub id: String,
    pub kind: ClaimKind,
    pub source: Rank3Tensor,
    pub target: Rank3Tensor,
    pub certificate: CycleCertificate,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct VerificationReport {
    pub checked: usize,
    pub passed: usize,
    pub worst_residual: f64,
    /// `(claim id @ N, residual)`.
    pub failures: Vec<(String, f64)>,
    /// `(claim id @ N, reason)`.
    pub skipped: Vec<(String, String)>,
}

impl VerificationReport {
    pub fn all_passed(&self) -> bool {
        self.failures.is_empty() && self.passed == self.checked
    }

    pub fn merge(&mut self, other: VerificationReport) {
        self.checked += other.checked;
        self.passed += other.passed;
        self.worst_residual = self.worst_residual.max(other.worst_residual);
        self.failures.extend(other.failures);
        self.skipped.extend(other.skipped);
    }
}

/// Checks a claim at every `N` in range for which the certificate can be
/// resized (repeating its minimal period) and the dense states fit the cap.
pub fn verify_claim(claim: &Claim, n_range: RangeInclusive<usize>, tol: f64) -> VerificationReport {
    let mut rep = VerificationReport::default();
    for n in n_range {
        let tag = format!("{}@N={n}", claim.id);
        let dim = claim.source.d().max(claim.target.d()) as u128;
        if !dim.checked_pow(n as u32).is_some_and(|s| s <= DEFAULT_AMPLITUDE_CAP as u128) {
            rep.skipped.push((tag, format!("{}^{n} amplitudes exceed the cap", dim)));
            continue;
        }
        let cert = if n == claim.certificate.n() {
            Some(claim.certificate.clone())
        } else {
            claim.certificate.resized(n, tol.max(1e-9))
        };
        let Some(cert) = cert else {
            rep.skipped.push((tag, "certificate period does not divide N".into()));
            continue;
        };
        rep.checked += 1;
        match verify_certificate(&cert, &claim.source, &claim.target, claim.kind.mode(), tol) {
            Ok(p) => {
                rep.worst_residual = rep.worst_residual.max(p.residual);
                if p.proportional {
                    rep.passed += 1;
                } else {
                    rep.failures.push((tag, p.residual));
                }
            }
            Err(e) => rep.failures.push((format!("{tag}: {e}"), f64::INFINITY)),
        }
    }
    rep
}

pub fn verify_claims(claims: &[Claim], n_range: RangeInclusive<usize>, tol: f64) -> VerificationReport {
    let mut rep = VerificationReport::default();
    for c in claims {
        rep.merge(verify_claim(c, n_range.clone(), tol));
    }
    rep
}

/// Checks a full transform plan verdict: feasible plans must verify; for
/// infeasible ones exhaustive search over the given candidate ops must
/// find nothing.
pub fn verify_transform(
    cert: Option<&CycleCertificate>,
    source: &Rank3Tensor,
    target: &Rank3Tensor,
    tol: f64,
) -> Result<Option<PropResult>> {
    cert.map(|c| verify_certificate(c, source, target, ScalarMode::UpToScalar, tol)).transpose()
}

pub const EXHAUSTIVE_MAX_N: usize = 8;
pub const EXHAUSTIVE_MAX_OPS: usize = 16;

/// All closed walks of length `n` by naive depth-first search, checking
/// every junction `y_k x_{k+1} ∝ 𝟙` directly. Walks are distinct as
/// sequences of operators up to gauge.
pub fn exhaustive_small_cycles(ops: &[TripleOperator], n: usize, tol: f64) -> Result<Vec<CycleCertificate>> {
    if n == 0 || n > EXHAUSTIVE_MAX_N {
        return Err(invalid(format!("exhaustive search supports 1 <= N <= {EXHAUSTIVE_MAX_N}")));
    }
    if ops.len() > EXHAUSTIVE_MAX_OPS {
        return Err(Error::ResourceLimit { requested: ops.len() as u128, cap: EXHAUSTIVE_MAX_OPS });
    }
    let full: Vec<CMatrix> = ops.iter().map(|h| h.full_operator()).collect();
    let mut uniq: Vec<usize> = Vec::new();
    for i in 0..ops.len() {
        if !uniq.iter().any(|&j| prop_check(full[i].as_slice(), full[j].as_slice(), 1e-9).proportional) {
            uniq.push(i);
        }
    }
    let joins = |a: usize, b: usize| {
        let m = &ops[a].y * &ops[b].x;
        prop_check(m.as_slice(), CMatrix::identity(m.rows()).as_slice(), tol).proportional
    };
    let mut out = Vec::new();
    let mut path = Vec::with_capacity(n);
    fn dfs(
        path: &mut Vec<usize>,
        n: usize,
        uniq: &[usize],
        joins: &dyn Fn(usize, usize) -> bool,
        ops: &[TripleOperator],
        out: &mut Vec<CycleCertificate>,
        tol: f64,
    ) -> Result<()> {
        if path.len() == n {
            if joins(path[n - 1], path[0]) {
                out.push(CycleCertificate::from_ops(path.iter().map(|&i| ops[i].clone()).collect(), tol)?);
            }
            return Ok(());
        }
        for &i in uniq {
            if path.last().map_or(true, |&p| joins(p, i)) {
                path.push(i);
                dfs(path, n, uniq, joins, ops, out, tol)?;
                path.pop();
            }
        }
        Ok(())
    }
    dfs(&mut path, n, &uniq, &joins, ops, &mut out, tol)?;
    Ok(out)
}

/// Equality of two walk sets, each walk compared as its sequence of full
/// operators `g ⊗ x ⊗ y^T` up to per-operator scalars.
pub fn same_cycle_sets(a: &[CycleCertificate], b: &[CycleCertificate]) -> bool {
    let same = |p: &CycleCertificate, q: &CycleCertificate| {
        p.n() == q.n()
            && p.ops.iter().zip(&q.ops).all(|(h, k)| {
                prop_check(h.full_operator().as_slice(), k.full_operator().as_slice(), 1e-8).proportional
            })
    };
    let covered = |x: &[CycleCertificate], y: &[CycleCertificate]| x.iter().all(|p| y.iter().any(|q| same(p, q)));
    covered(a, b) && covered(b, a)
}

/// Keeps one representative of each class of operators equal up to gauge.
pub fn representatives(ops: &[TripleOperator], tol: f64) -> Vec<TripleOperator> {
    dedup_ops(ops, tol)
}
