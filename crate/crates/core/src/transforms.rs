//! Deciding `Ψ_N(A) → Ψ_N(B)` by local operations, with certificates.

use crate::catalog::{self, Family, FamilySpec};
use crate::cycles::{CycleCertificate, TripleOperator};
use crate::error::{invalid, Error, Result};
use crate::ghz::{ghz_decompose, solve_junction, GhzBranch};
use crate::linalg::{hadamard, prop_check, rank, CMatrix, C64, ONE};
use crate::mps::{
    amap, amap_left_inverse, apply_local, default_injectivity_bound, fiducial_state, injectivity_length, Rank3Tensor,
    ScalarMode, DEFAULT_AMPLITUDE_CAP,
};
use crate::oracle::verify_certificate;
use crate::slocc::{classify, equivalence_witness, slocc_equivalent_classes, w_equivalence_witness};
use crate::symmetries::{aklt_s_of_x, injective_symmetry};

/// Outcome of a transformation query.
#[derive(Clone, Debug)]
pub struct TransformPlan {
    pub source_family: Option<FamilySpec>,
    pub target_family: Option<FamilySpec>,
    pub source_tensor: Rank3Tensor,
    pub target_tensor: Rank3Tensor,
    pub n: usize,
    pub feasible: bool,
    pub reason: String,
    pub certificate: Option<CycleCertificate>,
    pub alternatives: Vec<CycleCertificate>,
    /// Oracle residual of the certificate; `None` when not checked.
    pub verification: Option<f64>,
}

impl TransformPlan {
    fn new(a: &Rank3Tensor, b: &Rank3Tensor, n: usize) -> Self {
        Self {
            source_family: None,
            target_family: None,
            source_tensor: a.clone(),
            target_tensor: b.clone(),
            n,
            feasible: false,
            reason: String::new(),
            certificate: None,
            alternatives: Vec::new(),
            verification: None,
        }
    }

    fn infeasible(mut self, reason: impl Into<String>) -> Self {
        self.reason = reason.into();
        self
    }

    fn feasible_with(mut self, reason: impl Into<String>, cert: CycleCertificate) -> Self {
        self.feasible = true;
        self.reason = reason.into();
        self.certificate = Some(cert);
        self
    }

    /// Runs the oracle on the certificate when the dense states fit the cap.
    pub fn verify(&mut self, tol: f64) -> Result<()> {
        let Some(cert) = &self.certificate else { return Ok(()) };
        if cert.site_ops.iter().any(|g| g.rows() > g.cols()) {
            return Err(Error::Unsupported("site operators would increase the physical dimension".into()));
        }
        let dims = self.source_tensor.d().max(self.target_tensor.d()) as u128;
        if dims.checked_pow(self.n as u32).is_some_and(|s| s <= DEFAULT_AMPLITUDE_CAP as u128) {
            let p = verify_certificate(cert, &self.source_tensor, &self.target_tensor, ScalarMode::UpToScalar, tol)?;
            self.verification = Some(p.residual);
            if !p.proportional {
                return Err(Error::Numerical(format!("certificate fails verification (residual {:.3e})", p.residual)));
            }
        }
        Ok(())
    }
}

/// `(𝓑𝓐⁻¹, 𝟙, 𝟙)` repeated: any injective `A` reaches any `B` of the same bond dimension.
pub fn injective_to_any(a: &Rank3Tensor, b: &Rank3Tensor, n: usize, tol: f64) -> Result<CycleCertificate> {
    let h = injective_map(a, b, tol)?;
    CycleCertificate::repeated(&h, n, tol.max(1e-9))
}

fn injective_map(a: &Rank3Tensor, b: &Rank3Tensor, tol: f64) -> Result<TripleOperator> {
    if a.bond() != b.bond() {
        return Err(Error::Unsupported("bond dimensions differ".into()));
    }
    let g = &amap(b) * &amap_left_inverse(a, tol)?;
    let id = CMatrix::identity(a.bond());
    Ok(TripleOperator::fixing(g, id.clone(), id, a, b, 1e-8)?.with_label("B A^-1"))
}

/// Non-translation-invariant variant: the ops `(𝓑𝓐⁻¹ s_{x_{k−1}⁻¹, x_k}, x_{k−1}⁻¹, x_k)`.
pub fn injective_to_any_dressed(a: &Rank3Tensor, b: &Rank3Tensor, xs: &[CMatrix], tol: f64) -> Result<CycleCertificate> {
    let g = injective_map(a, b, tol)?;
    let n = xs.len();
    let ops = (0..n)
        .map(|k| {
            let s = injective_symmetry(a, &xs[(k + n - 1) % n].inverse()?, &xs[k], tol)?;
            TripleOperator::compose(&g, &s)
        })
        .collect::<Result<Vec<_>>>()?;
    CycleCertificate::from_ops(ops, tol.max(1e-9))
}

/// `M₁ = [[1,0,1],[0,1,0]]`, `M₂ = [[1,0,0],[0,0,1]]`: both send the AKLT
/// fiducial state into the GHZ class.
pub fn aklt_cluster_projectors() -> (CMatrix, CMatrix) {
    (
        CMatrix::real(&[&[1.0, 0.0, 1.0], &[0.0, 1.0, 0.0]]),
        CMatrix::real(&[&[1.0, 0.0, 0.0], &[0.0, 0.0, 1.0]]),
    )
}

/// The triple `(W₁⁻¹M, W₂⁻¹, W₃^{-T})` taking `|A_A⟩` to `|GHZ⟩`, where
/// `(M ⊗ 𝟙 ⊗ 𝟙)|A_A⟩ = (W₁ ⊗ W₂ ⊗ W₃)|GHZ⟩`.
pub fn aklt_to_ghz_triple(m: &CMatrix, tol: f64) -> Result<TripleOperator> {
    let aklt = catalog::aklt();
    let id = CMatrix::identity(2);
    let psi = apply_local(&[m.clone(), id.clone(), id.clone()], &fiducial_state(&aklt))?;
    let dec = ghz_decompose(&psi, tol)?;
    let g = &dec.w1.inverse()? * m;
    let ghz = catalog::ghz_b(&id)?;
    TripleOperator::fixing(g, dec.w2.inverse()?, dec.w3.inverse()?.transpose(), &aklt, &ghz, 1e-8)
}

/// Base elements of `G_{A_A, GHZ_H}` from the two projectors.
pub fn aklt_cluster_ops(tol: f64) -> Result<(TripleOperator, TripleOperator)> {
    let (m1, m2) = aklt_cluster_projectors();
    Ok((aklt_to_ghz_triple(&m1, tol)?, aklt_to_ghz_triple(&m2, tol)?))
}

/// `(𝟙 ⊗ H ⊗ 𝟙)(σ₁^i P_{1/(pq)} ⊗ σ₁^i P_p ⊗ σ₁^i P_q) h`.
fn dress(h: &TripleOperator, i: usize, p: C64, q: C64) -> Result<TripleOperator> {
    let s = GhzBranch { k: i, v: p, w: q }.triple_between(&CMatrix::identity(2), &hadamard())?;
    TripleOperator::compose(&s, h)
}

/// 2-cycles `h_a → h_b → h_a` alternating the two projector sets, one per
/// branch choice `(i_a, i_b)`; the junction `a → b` fixes `(q_a, p_b)`.
pub fn aklt_cluster_two_cycles(tol: f64) -> Result<Vec<(TripleOperator, TripleOperator)>> {
    let (h1, h2) = aklt_cluster_ops(tol)?;
    let hd = hadamard();
    let t12 = (&h1.y.inverse()? * &h2.x.inverse()?).scale(ONE);
    let t21 = &h2.y.inverse()? * &h1.x.inverse()?;
    let mut out = Vec::new();
    for ia in 0..2 {
        for ib in 0..2 {
            let (Some(j12), Some(j21)) =
                (solve_junction(&hd, &t12, ia, ib, tol), solve_junction(&hd, &t21, ib, ia, tol))
            else {
                continue;
            };
            let a = dress(&h1, ia, j21.x, j12.w)?.with_label(format!("M1,k={ia}"));
            let b = dress(&h2, ib, j12.x, j21.w)?.with_label(format!("M2,k={ib}"));
            out.push((a, b));
        }
    }
    Ok(out)
}

fn alternating(a: &TripleOperator, b: &TripleOperator, n: usize, tol: f64) -> Result<CycleCertificate> {
    let ops = (0..n).map(|k| if k % 2 == 0 { a.clone() } else { b.clone() }).collect();
    CycleCertificate::from_ops(ops, tol.max(1e-9))
}

/// AKLT to cluster: possible exactly for even `N`.
pub fn aklt_to_cluster(n: usize, tol: f64) -> Result<TransformPlan> {
    let (a, b) = (catalog::aklt(), catalog::ghz_b(&hadamard())?);
    require_n(n, 5)?;
    let plan = TransformPlan::new(&a, &b, n);
    if n % 2 == 1 {
        return Ok(plan.infeasible("every cycle in G_{A_A,GHZ_H} alternates the two projector sets, so N must be even"));
    }
    let pairs = aklt_cluster_two_cycles(tol)?;
    let (first, rest) = pairs.split_first().ok_or_else(|| Error::NoWitness("no AKLT-cluster 2-cycle".into()))?;
    let mut plan = plan.feasible_with("alternating 2-cycle of G_{A_A,GHZ_H}", alternating(&first.0, &first.1, n, tol)?);
    plan.alternatives.push(alternating(&first.1, &first.0, n, tol)?);
    for (x, y) in rest {
        plan.alternatives.push(alternating(x, y, n, tol)?);
        plan.alternatives.push(alternating(y, x, n, tol)?);
    }
    Ok(plan)
}

/// AKLT to `A_{A,g}`: possible iff `g^N ∝ 𝟙`, via `(s_{x_k}, g x_k⁻¹, x_k)`
/// with `x_k = g^{k−1}`.
pub fn aklt_to_aklt_type(g: &CMatrix, n: usize, tol: f64) -> Result<TransformPlan> {
    let a = catalog::aklt();
    let b = catalog::get_tensor(&FamilySpec::aklt_g(g.clone()))?;
    require_n(n, 5)?;
    let plan = TransformPlan::new(&a, &b, n);
    let gn = g.pow(n as u64);
    if !prop_check(gn.as_slice(), CMatrix::identity(2).as_slice(), 1e-9).proportional {
        return Ok(plan.infeasible("g^N is not proportional to the identity"));
    }
    let mut ops = Vec::with_capacity(n);
    let mut xk = CMatrix::identity(2);
    for k in 0..n {
        let h = TripleOperator::new(aklt_s_of_x(&xk)?, g * &xk.inverse()?, xk.clone())?.with_label(format!("x=g^{k}"));
        ops.push(h);
        xk = &xk * g;
    }
    Ok(plan.feasible_with("x_k = g^(k-1) closes since g^N is scalar", CycleCertificate::from_ops(ops, tol.max(1e-9))?))
}

fn require_n(n: usize, min_n: usize) -> Result<()> {
    if n < min_n {
        Err(Error::TheoremsInapplicable { n, min_n })
    } else {
        Ok(())
    }
}

fn local_rank(a: &Rank3Tensor) -> Result<usize> {
    rank(&amap(a), 1e-10)
}

/// Decides a transformation between catalogued families.
pub fn decide_transform(source: &FamilySpec, target: &FamilySpec, n: usize, tol: f64) -> Result<TransformPlan> {
    source.validate()?;
    target.validate()?;
    let (a, b) = (catalog::get_tensor(source)?, catalog::get_tensor(target)?);
    let mut plan = decide(Some(source), &a, Some(target), &b, n, tol)?;
    plan.source_family = Some(source.clone());
    plan.target_family = Some(target.clone());
    plan.verify(1e-8)?;
    Ok(plan)
}

/// Decides a transformation between explicit tensors.
pub fn decide_transform_tensors(a: &Rank3Tensor, b: &Rank3Tensor, n: usize, tol: f64) -> Result<TransformPlan> {
    let mut plan = decide(None, a, None, b, n, tol)?;
    plan.verify(1e-8)?;
    Ok(plan)
}

fn decide(
    source: Option<&FamilySpec>,
    a: &Rank3Tensor,
    target: Option<&FamilySpec>,
    b: &Rank3Tensor,
    n: usize,
    tol: f64,
) -> Result<TransformPlan> {
    if n == 0 {
        return Err(invalid("N must be positive"));
    }
    let la = injectivity_length(a, default_injectivity_bound(a.bond())).injectivity_length;
    let lb = injectivity_length(b, default_injectivity_bound(b.bond())).injectivity_length;
    let min_n = [la, lb].iter().flatten().map(|l| 2 * l + 1).max().unwrap_or(0);
    require_n(n, min_n)?;
    let plan = TransformPlan::new(a, b, n);
    if local_rank(b)? > local_rank(a)? {
        return Ok(plan.infeasible("local operations cannot increase the single-site rank"));
    }
    if la == Some(1) {
        let cert = injective_to_any(a, b, n, tol)?;
        return Ok(plan.feasible_with("injective source: g = B A^-1 on every site", cert));
    }
    let (sf, tf) = (source.map(|s| s.family), target.map(|t| t.family));
    match (sf, tf) {
        (Some(Family::Aklt), Some(Family::Cluster)) => return aklt_to_cluster(n, tol),
        (Some(Family::Aklt), Some(Family::Aklt)) => return aklt_to_aklt_type(&CMatrix::identity(2), n, tol),
        (Some(Family::Aklt), Some(Family::AkltG)) => {
            return aklt_to_aklt_type(target.and_then(|t| t.param.as_ref()).expect("validated"), n, tol)
        }
        _ => {}
    }
    if a.d() == 2 && a.bond() == 2 && b.d() == 2 && b.bond() == 2 {
        let (ca, cb) = (classify(a, tol)?, classify(b, tol)?);
        if !ca.is_normal() || !cb.is_normal() {
            return Err(Error::Unsupported("non-normal inputs are outside the decision procedure".into()));
        }
        let ghz_a = ca.b.is_some();
        let ghz_b = cb.b.is_some();
        if ghz_a != ghz_b {
            return Ok(plan.infeasible("GHZ-class and W-class fiducial states are SLOCC inequivalent"));
        }
        if !slocc_equivalent_classes(&ca, &cb, n)? {
            return Ok(plan.infeasible(format!(
                "SLOCC classes differ ({} vs {})",
                ca.kind.name(),
                cb.kind.name()
            )));
        }
        let gen = |s: Option<&FamilySpec>| s.and_then(|s| s.generator_param()).map(|(_, p)| p);
        let cert = if ghz_a {
            match (gen(source), gen(target)) {
                (Some(pb), Some(pc)) => equivalence_witness(&pb, &pc, n, tol)?,
                _ => return Err(Error::Unsupported("witnesses need GHZ_b family inputs".into())),
            }
        } else {
            match (gen(source), gen(target)) {
                (Some(pb), Some(pc)) => w_equivalence_witness(&pb, &pc, n, tol)?,
                _ => return Err(Error::Unsupported("witnesses need W_b family inputs".into())),
            }
        };
        return Ok(plan.feasible_with(format!("SLOCC equivalent ({})", ca.kind.name()), cert));
    }
    Err(Error::Unsupported("no decision procedure covers this pair".into()))
}
