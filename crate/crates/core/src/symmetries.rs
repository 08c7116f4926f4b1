//! Local symmetries of the catalogued families.
//!
//! Every finite answer is a list of [`CycleCertificate`]s; continuous
//! families are returned as a [`Parametrized`] generator whose
//! instantiations are certificates.

use std::fmt;

use crate::catalog::{self, Family, FamilySpec};
use crate::cycles::{
    distinct_by_site_ops, enumerate_cycles, trivial_certificate, ConcatMode, CycleCertificate, TripleOperator,
};
use crate::error::{invalid, Error, Result};
use crate::ghz::ghz_transport_ops;
use crate::linalg::{hadamard, kron, sigma1, sigma3, CMatrix, PropResult, C64, I, ONE};
use crate::mps::{amap, amap_left_inverse, default_injectivity_bound, injectivity_length, Rank3Tensor, ScalarMode};
use crate::oracle::verify_certificate;

/// Symmetries of one MPS at a fixed size.
#[derive(Clone, Debug)]
pub struct SymmetrySolution {
    pub family: FamilySpec,
    pub n: usize,
    pub certificates: Vec<CycleCertificate>,
    pub parametrized: Vec<Parametrized>,
    pub warnings: Vec<String>,
}

/// Continuous symmetry families.
#[derive(Clone, Debug)]
pub enum Parametrized {
    /// `x ↦ s_x^{⊗N}` for the AKLT tensor, `x` any regular 2×2.
    AkltGlobal,
    /// `x ↦ s_{x_1} ⊗ … ⊗ s_{x_N}` with `x_{k+1} = g⁻¹ x_k g` and
    /// `x = Σ t_i basis_i` regular; the basis spans `g^{-N} x g^N = λ x`.
    AkltType { g: CMatrix, lambda: C64, basis: Vec<CMatrix> },
    /// `x ↦ (z(x) ⊗ z(1/x))^{⊗N/2}` for `Ψ(W_b)`, `N` even.
    WPairs { b: CMatrix },
    /// `(x_1, …, x_N) ↦ s_{x_N⁻¹,x_1} ⊗ s_{x_1⁻¹,x_2} ⊗ …` for an injective tensor.
    InjectiveChain { tensor: Rank3Tensor },
}

impl Parametrized {
    /// Number of free complex parameters at size `n`.
    pub fn n_params(&self, n: usize) -> usize {
        match self {
            Parametrized::AkltGlobal => 4,
            Parametrized::AkltType { basis, .. } => basis.len(),
            Parametrized::WPairs { .. } => 1,
            Parametrized::InjectiveChain { tensor } => n * tensor.bond() * tensor.bond(),
        }
    }

    pub fn constraint(&self) -> &'static str {
        match self {
            Parametrized::AkltGlobal => "x regular",
            Parametrized::AkltType { .. } => "x = sum t_i basis_i regular",
            Parametrized::WPairs { .. } => "x nonzero, N even",
            Parametrized::InjectiveChain { .. } => "every x_k regular",
        }
    }

    /// Builds the certificate for one parameter choice.
    pub fn instantiate(&self, params: &[C64], n: usize, tol: f64) -> Result<CycleCertificate> {
        if params.len() != self.n_params(n) {
            return Err(invalid(format!("expected {} parameters, got {}", self.n_params(n), params.len())));
        }
        match self {
            Parametrized::AkltGlobal => {
                let x = CMatrix::from_vec(2, 2, params.to_vec())?;
                CycleCertificate::repeated(&aklt_triple(&x)?, n, tol)
            }
            Parametrized::AkltType { g, basis, .. } => {
                let mut x = CMatrix::zeros(2, 2);
                for (t, m) in params.iter().zip(basis) {
                    x = &x + &m.scale(*t);
                }
                aklt_type_cycle(g, &x, n, tol)
            }
            Parametrized::WPairs { b } => w_pair_cycle(b, params[0], n, tol),
            Parametrized::InjectiveChain { tensor } => {
                let dd = tensor.bond() * tensor.bond();
                let xs = params
                    .chunks(dd)
                    .map(|c| CMatrix::from_vec(tensor.bond(), tensor.bond(), c.to_vec()))
                    .collect::<Result<Vec<_>>>()?;
                injective_symmetry_cycle(tensor, &xs, tol)
            }
        }
    }
}

impl fmt::Display for Parametrized {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Parametrized::AkltGlobal => write!(f, "s_x^(xN), x in GL(2)"),
            Parametrized::AkltType { lambda, basis, .. } => {
                write!(f, "S(x) with g^-N x g^N = ({:.0}) x, {}-dim solution space", lambda.re, basis.len())
            }
            Parametrized::WPairs { .. } => write!(f, "(z(x) (x) z(1/x))^(x N/2), x nonzero"),
            Parametrized::InjectiveChain { .. } => write!(f, "S(x_1..x_N), x_k in GL(D)"),
        }
    }
}

fn require_n(n: usize, min_n: usize) -> Result<()> {
    if n < min_n {
        Err(Error::TheoremsInapplicable { n, min_n })
    } else {
        Ok(())
    }
}

/// Minimal size `2L + 1` for a normal tensor; `NotNormal` otherwise.
pub fn min_sites(a: &Rank3Tensor) -> Result<usize> {
    injectivity_length(a, default_injectivity_bound(a.bond()))
        .normal_for_sites
        .ok_or_else(|| Error::NotNormal(format!("no injectivity length up to {}", default_injectivity_bound(a.bond()))))
}

/// `(s_{x,y}, x, y)` with `s_{x,y} = 𝒜 (x^{T,-1} ⊗ y⁻¹) 𝒜⁻¹`.
pub fn injective_symmetry(a: &Rank3Tensor, x: &CMatrix, y: &CMatrix, tol: f64) -> Result<TripleOperator> {
    let ainv = amap_left_inverse(a, tol)?;
    let core = kron(&x.transpose().inverse()?, &y.inverse()?);
    let s = &(&amap(a) * &core) * &ainv;
    TripleOperator::fixing(s, x.clone(), y.clone(), a, a, 1e-8)
}

/// `S(x_1, …, x_N)`: the cycle of `s_{x_{k-1}⁻¹, x_k}` with `x_0 = x_N`.
pub fn injective_symmetry_cycle(a: &Rank3Tensor, xs: &[CMatrix], tol: f64) -> Result<CycleCertificate> {
    let n = xs.len();
    let ops = (0..n)
        .map(|k| injective_symmetry(a, &xs[(k + n - 1) % n].inverse()?, &xs[k], tol))
        .collect::<Result<Vec<_>>>()?;
    CycleCertificate::from_ops(ops, tol.max(1e-9))
}

/// `s_x` with `(s_x ⊗ x⁻¹ ⊗ x^T)|A_A⟩ = |A_A⟩`, from
/// `x⁻¹ A^i x = Σ_j (s⁻¹)_{ij} A^j` in the orthogonal basis `{A⁰, A¹, A²}`.
pub fn aklt_s_of_x(x: &CMatrix) -> Result<CMatrix> {
    if x.shape() != (2, 2) {
        return Err(invalid("x must be 2x2"));
    }
    let xinv = x.inverse()?;
    let basis = catalog::aklt();
    let mut sinv = CMatrix::zeros(3, 3);
    for i in 0..3 {
        let conj = &(&xinv * basis.mat(i)) * x;
        let mut rebuilt = CMatrix::zeros(2, 2);
        for j in 0..3 {
            let aj = basis.mat(j);
            let coef = crate::linalg::inner(aj.as_slice(), conj.as_slice()) / aj.frobenius_norm().powi(2);
            sinv[(i, j)] = coef;
            rebuilt = &rebuilt + &aj.scale(coef);
        }
        debug_assert!(rebuilt.rel_dist(&conj) < 1e-9, "conjugation leaves the traceless span");
    }
    sinv.inverse()
}

/// `(s_x, x⁻¹, x) ∈ G_{A_A}`.
pub fn aklt_triple(x: &CMatrix) -> Result<TripleOperator> {
    TripleOperator::new(aklt_s_of_x(x)?, x.inverse()?, x.clone())
}

/// `(s_x, g x⁻¹ g⁻¹, x) ∈ G_{A_{A,g}}`.
pub fn aklt_type_triple(g: &CMatrix, x: &CMatrix) -> Result<TripleOperator> {
    let gx = &(g * &x.inverse()?) * &g.inverse()?;
    TripleOperator::new(aklt_s_of_x(x)?, gx, x.clone())
}

/// Cycle `x_1 = x`, `x_{k+1} = g⁻¹ x_k g` in `G_{A_{A,g}}`.
pub fn aklt_type_cycle(g: &CMatrix, x: &CMatrix, n: usize, tol: f64) -> Result<CycleCertificate> {
    let ginv = g.inverse()?;
    let mut xs = vec![x.clone()];
    for _ in 1..n {
        let last = xs.last().expect("nonempty");
        xs.push(&(&ginv * last) * g);
    }
    let ops = xs.iter().map(|xk| aklt_type_triple(g, xk)).collect::<Result<Vec<_>>>()?;
    CycleCertificate::from_ops(ops, tol.max(1e-9))
}

/// Solution spaces of `g^{-N} x g^N = λ x` for `λ = ±1` (the only scalars
/// compatible with `det`), as kernels of `g^{-N} ⊗ (g^N)^T − λ𝟙`, with
/// warnings for nearly degenerate ranks.
pub fn aklt_type_kernel(g: &CMatrix, n: usize, tol: f64) -> Result<(Vec<(C64, Vec<CMatrix>)>, Vec<String>)> {
    if g.shape() != (2, 2) || !g.is_regular(1e-12) {
        return Err(invalid("g must be a regular 2x2 matrix"));
    }
    let gn = g.pow(n as u64);
    let k = kron(&gn.inverse()?, &gn.transpose());
    let mut branches = Vec::new();
    let mut warnings = Vec::new();
    for lambda in [ONE, -ONE] {
        let shifted = &k - &CMatrix::identity(4).scale(lambda);
        let sv = shifted.singular_values();
        let scale = k.frobenius_norm().max(1.0);
        if sv.iter().any(|&s| s > tol * scale && s < 1e-6 * scale) {
            warnings.push(format!(
                "g^N is close to a degenerate case for lambda = {:+}: singular values {:?}",
                lambda.re, sv
            ));
        }
        let basis: Vec<CMatrix> = shifted
            .nullspace(tol)
            .into_iter()
            .map(|v| CMatrix::from_vec(2, 2, v).expect("4 entries"))
            .collect();
        if !basis.is_empty() {
            branches.push((lambda, basis));
        }
    }
    Ok((branches, warnings))
}

/// Symmetries of `Ψ(A_{A,g})`: the trivial one plus every solution branch of
/// the fixed-point equation containing regular matrices.
pub fn aklt_type_symmetries(g: &CMatrix, n: usize, tol: f64) -> Result<SymmetrySolution> {
    let tensor = catalog::get_tensor(&FamilySpec::aklt_g(g.clone()))?;
    require_n(n, min_sites(&tensor)?)?;
    let (branches, warnings) = aklt_type_kernel(g, n, tol)?;
    let mut parametrized = Vec::new();
    for (lambda, basis) in branches {
        if contains_regular(&basis) {
            parametrized.push(Parametrized::AkltType { g: g.clone(), lambda, basis });
        }
    }
    Ok(SymmetrySolution {
        family: FamilySpec::aklt_g(g.clone()),
        n,
        certificates: vec![aklt_type_cycle(g, &CMatrix::identity(2), n, tol)?],
        parametrized,
        warnings,
    })
}

fn contains_regular(basis: &[CMatrix]) -> bool {
    let mut x = CMatrix::zeros(2, 2);
    for (k, m) in basis.iter().enumerate() {
        x = &x + &m.scale(C64::from_polar(1.0 + 0.29 * k as f64, 0.83 * (k as f64 + 1.0)));
    }
    x.is_regular(1e-8)
}

/// AKLT symmetries `{s_x^{⊗N}}`.
pub fn aklt_symmetries(n: usize, tol: f64) -> Result<SymmetrySolution> {
    require_n(n, min_sites(&catalog::aklt())?)?;
    Ok(SymmetrySolution {
        family: FamilySpec::plain(Family::Aklt),
        n,
        certificates: vec![CycleCertificate::repeated(&aklt_triple(&CMatrix::identity(2))?, n, tol)?],
        parametrized: vec![Parametrized::AkltGlobal],
        warnings: Vec::new(),
    })
}

/// Elements of `G_{GHZ_b}` that take part in some cycle, one per branch
/// label `(k_prev, k, k_next)`.
pub fn ghz_branch_solutions(b: &CMatrix, tol: f64) -> Result<Vec<TripleOperator>> {
    let tensor = catalog::ghz_b(b)?;
    min_sites(&tensor)?;
    ghz_transport_ops(b, b, tol)
}

/// All local symmetries of `Ψ(GHZ_b)` at size `n`, distinct up to a global scalar.
pub fn ghz_symmetries(b: &CMatrix, n: usize, tol: f64) -> Result<SymmetrySolution> {
    let tensor = catalog::ghz_b(b)?;
    require_n(n, min_sites(&tensor)?)?;
    let ops = ghz_branch_solutions(b, tol)?;
    let cycles = enumerate_cycles(&ops, n, &ConcatMode::Plain, tol.max(1e-9))?;
    Ok(SymmetrySolution {
        family: FamilySpec::ghz_b(b.clone()),
        n,
        certificates: distinct_by_site_ops(&cycles.certificates, 1e-8),
        parametrized: Vec::new(),
        warnings: Vec::new(),
    })
}

/// The `2^N` symmetries of the cluster MPS `Ψ(GHZ_H)`.
pub fn cluster_stabilizer(n: usize, tol: f64) -> Result<Vec<CycleCertificate>> {
    require_n(n, 5)?;
    Ok(ghz_symmetries(&hadamard(), n, tol)?.certificates)
}

/// Site operators of `K_1^{e_1} ⋯ K_N^{e_N}`, where `K_i` is `σ₁` on site
/// `i` and `σ₃` on its two cyclic neighbours.
pub fn cluster_k_product(exps: &[bool]) -> Vec<CMatrix> {
    let n = exps.len();
    let mut ops = vec![CMatrix::identity(2); n];
    for (i, &e) in exps.iter().enumerate() {
        if !e {
            continue;
        }
        let l = (i + n - 1) % n;
        let r = (i + 1) % n;
        ops[l] = &ops[l] * &sigma3();
        ops[i] = &ops[i] * &sigma1();
        ops[r] = &ops[r] * &sigma3();
    }
    ops
}

/// `z(x) = [[x, (1/x − x)β], [0, 1/x]]` with `β = (b₀₁ + b₁₀)/b₀₀`.
pub fn w_z(b: &CMatrix, x: C64) -> CMatrix {
    let beta = (b[(0, 1)] + b[(1, 0)]) / b[(0, 0)];
    CMatrix::complex(&[&[x, (x.inv() - x) * beta], &[C64::from(0.0), x.inv()]])
}

/// Element `h_p = (s₁(p), b s₂(p) b⁻¹, s₃(p)^T) ∈ G_{W_b}` built from the
/// W-state stabilizer with `y = b₀₁(p − 1/p)/b₀₀`, `z = b₁₀(p − 1/p)/b₀₀`.
/// `h_p → h_q` holds iff `q = ±1/p`.
pub fn w_branch(b: &CMatrix, p: C64) -> Result<TripleOperator> {
    if b[(0, 0)].norm() <= 1e-12 * b.max_abs() {
        return Err(Error::NotNormal("W_b with b00 = 0 is not normal".into()));
    }
    let d = p - p.inv();
    let y = b[(0, 1)] * d / b[(0, 0)];
    let z = b[(1, 0)] * d / b[(0, 0)];
    let (s1, s2, s3) = w_stabilizer(p, y, z);
    let x = &(b * &s2) * &b.inverse()?;
    Ok(TripleOperator::new(s1, x, s3.transpose())?.with_label(format!("p={:.6}{:+.6}i", p.re, p.im)))
}

/// `(s₁, s₂, s₃)` of the W-state stabilizer at `(x, y, z)`.
pub fn w_stabilizer(x: C64, y: C64, z: C64) -> (CMatrix, CMatrix, CMatrix) {
    let zero = C64::from(0.0);
    let s1 = CMatrix::complex(&[&[x, -y - z], &[zero, x.inv()]]).scale(x.inv());
    let s2 = CMatrix::complex(&[&[x, y], &[zero, x.inv()]]);
    let s3 = CMatrix::complex(&[&[x, z], &[zero, x.inv()]]);
    (s1, s2, s3)
}

/// Alternating cycle `h_x → h_{1/x} → …` for even `n`.
pub fn w_pair_cycle(b: &CMatrix, x: C64, n: usize, tol: f64) -> Result<CycleCertificate> {
    if n % 2 == 1 {
        return Err(invalid("the W pair family needs even N"));
    }
    if x.norm() == 0.0 {
        return Err(invalid("x must be nonzero"));
    }
    let (a, c) = (w_branch(b, x)?, w_branch(b, x.inv())?);
    let ops = (0..n).map(|k| if k % 2 == 0 { a.clone() } else { c.clone() }).collect();
    CycleCertificate::from_ops(ops, tol.max(1e-9))
}

/// Symmetries of `Ψ(W_b)`. Besides the identity, `p = i` gives a 1-cycle
/// (`i` and `−1/i` are gauge-equivalent), so a global symmetry exists for
/// every `N`; for even `N` the alternating 2-cycles add a one-parameter family.
pub fn w_symmetries(b: &CMatrix, n: usize, tol: f64) -> Result<SymmetrySolution> {
    let tensor = catalog::w_b(b)?;
    require_n(n, min_sites(&tensor)?)?;
    let global = CycleCertificate::repeated(&w_branch(b, I)?, n, tol.max(1e-9))?;
    let certificates = vec![trivial_certificate(2, 2, n), global];
    let parametrized = if n % 2 == 0 { vec![Parametrized::WPairs { b: b.clone() }] } else { Vec::new() };
    Ok(SymmetrySolution { family: FamilySpec::w_b(b.clone()), n, certificates, parametrized, warnings: Vec::new() })
}

/// Strict check `(⊗ site_ops)|Ψ(A)⟩ = |Ψ(A)⟩`.
pub fn verify_symmetry(cert: &CycleCertificate, tensor: &Rank3Tensor, n: usize, tol: f64) -> Result<PropResult> {
    if cert.n() != n {
        return Err(invalid(format!("certificate has length {}, expected {n}", cert.n())));
    }
    verify_certificate(cert, tensor, tensor, ScalarMode::Strict, tol)
}

/// Dispatches to the family solvers.
pub fn family_symmetries(spec: &FamilySpec, n: usize, tol: f64) -> Result<SymmetrySolution> {
    spec.validate()?;
    let mut sol = match spec.family {
        Family::Cluster => ghz_symmetries(&hadamard(), n, tol)?,
        Family::Ghz => ghz_symmetries(&CMatrix::identity(2), n, tol)?,
        Family::GhzB => ghz_symmetries(spec.param.as_ref().expect("validated"), n, tol)?,
        Family::W => w_symmetries(&CMatrix::identity(2), n, tol)?,
        Family::WB => w_symmetries(spec.param.as_ref().expect("validated"), n, tol)?,
        Family::Aklt => aklt_symmetries(n, tol)?,
        Family::AkltG => aklt_type_symmetries(spec.param.as_ref().expect("validated"), n, tol)?,
        Family::Vb => {
            let tensor = catalog::vb();
            require_n(n, min_sites(&tensor)?)?;
            SymmetrySolution {
                family: spec.clone(),
                n,
                certificates: vec![trivial_certificate(4, 2, n)],
                parametrized: vec![Parametrized::InjectiveChain { tensor }],
                warnings: Vec::new(),
            }
        }
    };
    sol.family = spec.clone();
    Ok(sol)
}
