//! SLOCC invariants and classification of `d = D = 2` MPS, and
//! equivalence witnesses between members of the generated families.

use std::fmt;

use crate::catalog;
use crate::cycles::{enumerate_cycles, ConcatMode, CycleCertificate, TripleOperator};
use crate::error::{invalid, Error, Result};
use crate::ghz::{ghz_decompose, ghz_transport_branches};
use crate::linalg::{kron, rank, sigma2, CMatrix, C64};
use crate::mps::{
    build_state, default_injectivity_bound, fiducial_state, injectivity_length, DenseState, Rank3Tensor, ScalarMode,
    DEFAULT_AMPLITUDE_CAP,
};
use crate::oracle::verify_certificate;
use crate::symmetries::w_stabilizer;

/// A point of the extended complex plane.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ExtendedComplex {
    Finite(C64),
    Infinity,
}

impl ExtendedComplex {
    /// Chordal distance on the Riemann sphere, in `[0, 1]`.
    pub fn chordal(self, other: Self) -> f64 {
        match (self, other) {
            (Self::Infinity, Self::Infinity) => 0.0,
            (Self::Finite(z), Self::Infinity) | (Self::Infinity, Self::Finite(z)) => 1.0 / (1.0 + z.norm_sqr()).sqrt(),
            (Self::Finite(z), Self::Finite(w)) => {
                (z - w).norm() / ((1.0 + z.norm_sqr()).sqrt() * (1.0 + w.norm_sqr()).sqrt())
            }
        }
    }

    pub fn approx_eq(self, other: Self, tol: f64) -> bool {
        self.chordal(other) <= tol
    }

    pub fn recip(self) -> Self {
        match self {
            Self::Infinity => Self::Finite(C64::from(0.0)),
            Self::Finite(z) if z.norm() == 0.0 => Self::Infinity,
            Self::Finite(z) => Self::Finite(z.inv()),
        }
    }

    pub fn finite(self) -> Option<C64> {
        match self {
            Self::Finite(z) => Some(z),
            Self::Infinity => None,
        }
    }
}

impl fmt::Display for ExtendedComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Infinity => f.write_str("inf"),
            Self::Finite(z) => write!(f, "{:.12}{:+.12}i", z.re, z.im),
        }
    }
}

/// Chordal tolerance for comparing `χ` values.
pub const CHI_TOL: f64 = 1e-8;

/// `χ(b) = b₀₀ b₁₁ / (b₀₁ b₁₀)`.
pub fn chi(b: &CMatrix, tol: f64) -> Result<ExtendedComplex> {
    if b.shape() != (2, 2) {
        return Err(invalid("chi needs a 2x2 matrix"));
    }
    let num = b[(0, 0)] * b[(1, 1)];
    let den = b[(0, 1)] * b[(1, 0)];
    let scale = b.frobenius_norm().powi(2);
    let thresh = tol.max(1e-14) * scale;
    match (num.norm() <= thresh, den.norm() <= thresh) {
        (true, true) => Err(Error::Indeterminate("both products of b vanish".into())),
        (false, true) => Ok(ExtendedComplex::Infinity),
        _ => Ok(ExtendedComplex::Finite(num / den)),
    }
}

/// Three-tangle `4|det G|`, `G_ij = φ_i^T (σ₂ ⊗ σ₂) φ_j`, of the normalized
/// 3-qubit state with first-party slices `φ_i`; 1 for `|GHZ⟩`, 0 for `|W⟩`.
pub fn three_tangle(psi: &DenseState) -> Result<f64> {
    if psi.local_dims() != [2, 2, 2] {
        return Err(invalid("three-tangle needs a 3-qubit state"));
    }
    if psi.is_zero() {
        return Err(invalid("zero state"));
    }
    let p = psi.normalized();
    let amps = p.amplitudes();
    let ss = kron(&sigma2(), &sigma2());
    let phi = [&amps[0..4], &amps[4..8]];
    let g = CMatrix::from_fn(2, 2, |i, j| {
        let v = ss.apply(phi[j]);
        phi[i].iter().zip(&v).map(|(a, b)| a * b).sum()
    });
    Ok(4.0 * g.det()?.norm())
}

/// Threshold on the three-tangle separating the GHZ class from the W class.
pub const TANGLE_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SloccKind {
    /// The state vanishes at the requested size.
    Zero,
    /// A product state, or reducible to fewer parties locally.
    Product,
    /// `χ = −1`, the cluster class.
    ClusterSet,
    /// Normal GHZ-generated MPS with generic `χ`.
    GhzGeneric(ExtendedComplex),
    /// One vanishing diagonal entry of `b`: `χ = 0` or `∞`.
    SymmetrylessSet,
    /// Non-normal GHZ-generated MPS, locally `|GHZ_N⟩`.
    GhzNNonNormal,
    /// Normal W-generated MPS.
    WClass,
}

impl SloccKind {
    pub fn name(&self) -> &'static str {
        match self {
            SloccKind::Zero => "zero",
            SloccKind::Product => "product",
            SloccKind::ClusterSet => "cluster-set",
            SloccKind::GhzGeneric(_) => "ghz-generic",
            SloccKind::SymmetrylessSet => "symmetryless-set",
            SloccKind::GhzNNonNormal => "ghz-n-non-normal",
            SloccKind::WClass => "w-class",
        }
    }

    fn same_kind(&self, other: &Self) -> bool {
        std::mem::discriminant(self) == std::mem::discriminant(other)
    }
}

/// Size of the local symmetry group of the class.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SymmetryOrder {
    One,
    Two,
    /// `2^N`.
    PowerOfTwo,
    Infinite,
    /// 2 for odd `N`, infinite for even `N`.
    ParityDependent,
}

impl SymmetryOrder {
    pub fn describe(self) -> &'static str {
        match self {
            SymmetryOrder::One => "1",
            SymmetryOrder::Two => "2",
            SymmetryOrder::PowerOfTwo => "2^N",
            SymmetryOrder::Infinite => "infinite",
            SymmetryOrder::ParityDependent => "2 (N odd), infinite (N even)",
        }
    }
}

#[derive(Clone, Debug)]
pub struct SloccClass {
    pub kind: SloccKind,
    /// Canonical `b` for GHZ-class tensors.
    pub b: Option<CMatrix>,
    pub chi: Option<ExtendedComplex>,
    pub injectivity_length: Option<usize>,
    pub symmetry_order: SymmetryOrder,
    /// True when a fiducial party has local rank 1.
    pub reducible: bool,
}

impl SloccClass {
    /// Smallest `N` at which the equivalence theorems apply, for normal classes.
    pub fn min_sites(&self) -> Option<usize> {
        self.injectivity_length.map(|l| 2 * l + 1)
    }

    pub fn is_normal(&self) -> bool {
        self.injectivity_length.is_some()
    }
}

fn local_ranks(psi: &DenseState, tol: f64) -> Result<[usize; 3]> {
    let a = psi.amplitudes();
    let idx = |p: usize, q: usize, r: usize| a[(p * 2 + q) * 2 + r];
    let f0 = CMatrix::from_fn(2, 4, |i, c| idx(i, c / 2, c % 2));
    let f1 = CMatrix::from_fn(2, 4, |i, c| idx(c / 2, i, c % 2));
    let f2 = CMatrix::from_fn(2, 4, |i, c| idx(c / 2, c % 2, i));
    Ok([rank(&f0, tol)?, rank(&f1, tol)?, rank(&f2, tol)?])
}

/// Classifies a `d = D = 2` tensor through its fiducial state: the
/// three-tangle splits GHZ from W, the canonical `b` fixes the GHZ subclass,
/// injectivity separates normal from non-normal.
pub fn classify(a: &Rank3Tensor, tol: f64) -> Result<SloccClass> {
    if a.d() != 2 || a.bond() != 2 {
        return Err(Error::Unsupported(format!("classification needs d = D = 2, got d = {}, D = {}", a.d(), a.bond())));
    }
    let psi = fiducial_state(a).normalized();
    let l = injectivity_length(a, default_injectivity_bound(2)).injectivity_length;
    if local_ranks(&psi, 1e-9)?.iter().any(|&r| r < 2) {
        return Ok(SloccClass {
            kind: SloccKind::Product,
            b: None,
            chi: None,
            injectivity_length: l,
            symmetry_order: SymmetryOrder::Infinite,
            reducible: true,
        });
    }
    if three_tangle(&psi)? > TANGLE_TOL {
        let b = ghz_decompose(&psi, tol)?.canonical_b();
        let scale = b.max_abs();
        let z: Vec<bool> = b.as_slice().iter().map(|e| e.norm() <= 1e-9 * scale).collect();
        let diag_zeros = z[0] as usize + z[3] as usize;
        let off_zeros = z[1] as usize + z[2] as usize;
        let (kind, order, expect_l) = match (diag_zeros, off_zeros) {
            (0, 0) => {
                let c = chi(&b, tol)?;
                if c.approx_eq(ExtendedComplex::Finite(C64::from(-1.0)), CHI_TOL) {
                    (SloccKind::ClusterSet, SymmetryOrder::PowerOfTwo, Some(2))
                } else {
                    (SloccKind::GhzGeneric(c), SymmetryOrder::Two, Some(2))
                }
            }
            (1, 0) => (SloccKind::SymmetrylessSet, SymmetryOrder::One, Some(3)),
            _ => (SloccKind::GhzNNonNormal, SymmetryOrder::Infinite, None),
        };
        if l != expect_l {
            return Err(Error::Unsupported(format!(
                "inconsistent numerics: b-pattern predicts injectivity length {expect_l:?}, found {l:?}"
            )));
        }
        let chi_val = chi(&b, tol).ok();
        return Ok(SloccClass { kind, b: Some(b), chi: chi_val, injectivity_length: l, symmetry_order: order, reducible: false });
    }
    let (kind, order) = match l {
        Some(_) => (SloccKind::WClass, SymmetryOrder::ParityDependent),
        None => (SloccKind::Product, SymmetryOrder::Infinite),
    };
    Ok(SloccClass { kind, b: None, chi: None, injectivity_length: l, symmetry_order: order, reducible: false })
}

/// [`classify`], reporting [`SloccKind::Zero`] when `Ψ_N(A)` vanishes.
pub fn classify_at(a: &Rank3Tensor, n: usize, tol: f64) -> Result<SloccClass> {
    let mut cls = classify(a, tol)?;
    if (2usize).checked_pow(n as u32).is_some_and(|s| s <= DEFAULT_AMPLITUDE_CAP) {
        let psi = build_state(std::slice::from_ref(a), n)?;
        if psi.norm() <= 1e-12 * a.entries().iter().map(|z| z.norm()).fold(0.0, f64::max).powi(n as i32) {
            cls.kind = SloccKind::Zero;
        }
    }
    Ok(cls)
}

/// Whether `Ψ_N(A)` and `Ψ_N(B)` are SLOCC equivalent. Requires `N ≥ 2L + 1`
/// for every normal input.
pub fn slocc_equivalent(a: &Rank3Tensor, b: &Rank3Tensor, n: usize, tol: f64) -> Result<bool> {
    let (ca, cb) = (classify(a, tol)?, classify(b, tol)?);
    slocc_equivalent_classes(&ca, &cb, n)
}

pub fn slocc_equivalent_classes(ca: &SloccClass, cb: &SloccClass, n: usize) -> Result<bool> {
    let min_n = ca.min_sites().unwrap_or(0).max(cb.min_sites().unwrap_or(0));
    if n < min_n {
        return Err(Error::TheoremsInapplicable { n, min_n });
    }
    Ok(match (&ca.kind, &cb.kind) {
        (SloccKind::GhzGeneric(x), SloccKind::GhzGeneric(y)) => {
            x.approx_eq(*y, CHI_TOL) || (n % 2 == 0 && x.approx_eq(y.recip(), CHI_TOL))
        }
        (p, q) => p.same_kind(q),
    })
}

/// A certificate `Ψ_N(GHZ_b) → Ψ_N(GHZ_c)` up to a scalar, built from
/// `G_GHZ` branches under the `(c → b)` concatenation rule. A constant walk
/// is preferred. The certificate is checked on the dense states when they
/// fit the amplitude cap.
pub fn equivalence_witness(b: &CMatrix, c: &CMatrix, n: usize, tol: f64) -> Result<CycleCertificate> {
    let (ta, tb) = (catalog::ghz_b(b)?, catalog::ghz_b(c)?);
    let (ca, cb) = (classify(&ta, tol)?, classify(&tb, tol)?);
    if !ca.is_normal() || !cb.is_normal() {
        return Err(Error::NotNormal("witnesses are built for normal GHZ_b only".into()));
    }
    if !slocc_equivalent_classes(&ca, &cb, n)? {
        return Err(Error::NoWitness("the states are not SLOCC equivalent".into()));
    }
    let ops: Vec<TripleOperator> = ghz_transport_branches(b, c, tol)
        .into_iter()
        .map(|(lab, br)| br.triple().with_label(lab))
        .collect();
    let mode = ConcatMode::Bc { b: c.clone(), c: b.clone() };
    let found = enumerate_cycles(&ops, n, &mode, tol.max(1e-9))?;
    let cert = found
        .certificates
        .iter()
        .find(|cert| cert.ops.iter().all(|h| h.label == cert.ops[0].label))
        .or_else(|| found.certificates.first())
        .cloned()
        .ok_or_else(|| Error::NoWitness(format!("no cycle of length {n} in G_GHZ_b,GHZ_c")))?;
    check_witness(&cert, &ta, &tb, n)?;
    Ok(cert)
}

fn check_witness(cert: &CycleCertificate, source: &Rank3Tensor, target: &Rank3Tensor, n: usize) -> Result<()> {
    let size = (source.d() as u128).checked_pow(n as u32);
    if size.is_some_and(|s| s <= DEFAULT_AMPLITUDE_CAP as u128) {
        let p = verify_certificate(cert, source, target, ScalarMode::UpToScalar, 1e-8)?;
        if !p.proportional {
            return Err(Error::Numerical(format!("witness fails on the dense states (residual {:.3e})", p.residual)));
        }
    }
    Ok(())
}

/// `h = (s₁, c s₂, s₃^T)`, a 1-cycle element of `G_{W, W_c}` built from the
/// W stabilizer with `κ = det(c)^{-1/2}`, `x = (κ c₀₀)^{-1/2}`,
/// `y = −κ c₀₁ x`, `z = −κ c₁₀ x`.
pub fn w_transport(c: &CMatrix) -> Result<TripleOperator> {
    if c.shape() != (2, 2) || !c.is_regular(1e-12) {
        return Err(invalid("c must be a regular 2x2 matrix"));
    }
    if c[(0, 0)].norm() <= 1e-12 * c.max_abs() {
        return Err(Error::NotNormal("W_c with c00 = 0 is not normal".into()));
    }
    let kappa = c.det()?.sqrt().inv();
    let x = (kappa * c[(0, 0)]).sqrt().inv();
    let y = -kappa * c[(0, 1)] * x;
    let z = -kappa * c[(1, 0)] * x;
    let (s1, s2, s3) = w_stabilizer(x, y, z);
    TripleOperator::new(s1, c * &s2, s3.transpose())
}

/// A certificate `Ψ_N(W_b) → Ψ_N(W_c)` up to a scalar, valid for every `N`.
pub fn w_equivalence_witness(b: &CMatrix, c: &CMatrix, n: usize, tol: f64) -> Result<CycleCertificate> {
    let (ta, tb) = (catalog::w_b(b)?, catalog::w_b(c)?);
    let h = TripleOperator::compose(&w_transport(c)?, &w_transport(b)?.inverse()?)?.with_label("w-transport");
    let cert = CycleCertificate::repeated(&h, n, tol.max(1e-9))?;
    check_witness(&cert, &ta, &tb, n)?;
    Ok(cert)
}
