//! Rank-3 tensors, their fiducial states and the dense periodic MPS they generate.

use crate::error::{invalid, Error, Result};
use crate::linalg::{kron, norm, prop_check, rank, CMatrix, PropResult, C64, ONE, ZERO};

/// Default cap on the number of amplitudes a dense state may hold.
pub const DEFAULT_AMPLITUDE_CAP: usize = 1 << 20;

/// Tensor `A^j_{αβ}` with `d` physical and `D` bond dimensions.
#[derive(Clone, Debug, PartialEq)]
pub struct Rank3Tensor {
    bond: usize,
    mats: Vec<CMatrix>,
}

impl Rank3Tensor {
    pub fn new(mats: Vec<CMatrix>) -> Result<Self> {
        let first = mats.first().ok_or_else(|| invalid("tensor needs at least one matrix"))?;
        let bond = first.rows();
        if bond == 0 {
            return Err(invalid("bond dimension must be at least 1"));
        }
        if mats.iter().any(|m| m.shape() != (bond, bond)) {
            return Err(invalid("tensor matrices must all be DxD"));
        }
        if mats.iter().any(|m| !m.is_finite()) {
            return Err(invalid("tensor has non-finite entries"));
        }
        if mats.iter().all(|m| m.max_abs() == 0.0) {
            return Err(invalid("tensor matrices are all zero"));
        }
        Ok(Self { bond, mats })
    }

    /// Entries in `(j, α, β)` order.
    pub fn from_entries(d: usize, bond: usize, entries: &[C64]) -> Result<Self> {
        if d == 0 || bond == 0 || entries.len() != d * bond * bond {
            return Err(invalid(format!("expected {} entries for d={d}, D={bond}", d * bond * bond)));
        }
        let mats = entries
            .chunks(bond * bond)
            .map(|c| CMatrix::from_vec(bond, bond, c.to_vec()))
            .collect::<Result<Vec<_>>>()?;
        Self::new(mats)
    }

    pub fn d(&self) -> usize {
        self.mats.len()
    }

    pub fn bond(&self) -> usize {
        self.bond
    }

    pub fn mats(&self) -> &[CMatrix] {
        &self.mats
    }

    pub fn mat(&self, j: usize) -> &CMatrix {
        &self.mats[j]
    }

    /// All entries in `(j, α, β)` order.
    pub fn entries(&self) -> Vec<C64> {
        self.mats.iter().flat_map(|m| m.as_slice().iter().copied()).collect()
    }

    /// `A^j ↦ x A^j y`.
    pub fn map_bond(&self, x: &CMatrix, y: &CMatrix) -> Result<Self> {
        if x.shape() != (self.bond, self.bond) || y.shape() != (self.bond, self.bond) {
            return Err(invalid("bond operators must be DxD"));
        }
        Self::new(self.mats.iter().map(|a| &(x * a) * y).collect())
    }

    /// Gauge transformation `A^j ↦ x⁻¹ A^j x`.
    pub fn gauge(&self, x: &CMatrix) -> Result<Self> {
        self.map_bond(&x.inverse()?, x)
    }

    /// `B^i = Σ_j g_ij A^j`; the result has physical dimension `g.rows()`.
    pub fn map_physical(&self, g: &CMatrix) -> Result<Self> {
        if g.cols() != self.d() {
            return Err(invalid(format!("physical operator has {} columns, tensor has d={}", g.cols(), self.d())));
        }
        let mats = (0..g.rows())
            .map(|i| {
                let mut acc = CMatrix::zeros(self.bond, self.bond);
                for (j, a) in self.mats.iter().enumerate() {
                    if g[(i, j)] != ZERO {
                        acc = &acc + &a.scale(g[(i, j)]);
                    }
                }
                acc
            })
            .collect();
        Self::new(mats)
    }
}

/// Dense state on `n` sites; amplitude index order has site 1 most significant.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseState {
    n: usize,
    local_dims: Vec<usize>,
    amplitudes: Vec<C64>,
}

impl DenseState {
    pub fn new(local_dims: Vec<usize>, amplitudes: Vec<C64>) -> Result<Self> {
        let total = checked_size(&local_dims).ok_or_else(|| invalid("state dimension overflows"))?;
        if total != amplitudes.len() as u128 {
            return Err(invalid(format!("expected {total} amplitudes, got {}", amplitudes.len())));
        }
        if amplitudes.iter().any(|z| !z.is_finite()) {
            return Err(invalid("state has non-finite amplitudes"));
        }
        Ok(Self { n: local_dims.len(), local_dims, amplitudes })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn local_dims(&self) -> &[usize] {
        &self.local_dims
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        norm(&self.amplitudes)
    }

    pub fn is_zero(&self) -> bool {
        self.amplitudes.iter().all(|z| *z == ZERO)
    }

    pub fn normalized(&self) -> Self {
        let n = self.norm();
        let s = if n > 0.0 { 1.0 / n } else { 1.0 };
        Self { amplitudes: self.amplitudes.iter().map(|z| z * s).collect(), ..self.clone() }
    }

    pub fn scale(&self, s: C64) -> Self {
        Self { amplitudes: self.amplitudes.iter().map(|z| z * s).collect(), ..self.clone() }
    }

    /// Amplitude at a multi-index.
    pub fn amplitude(&self, idx: &[usize]) -> C64 {
        assert_eq!(idx.len(), self.n, "index length mismatch");
        let mut flat = 0;
        for (i, d) in idx.iter().zip(&self.local_dims) {
            assert!(i < d, "index out of range");
            flat = flat * d + i;
        }
        self.amplitudes[flat]
    }
}

fn checked_size(dims: &[usize]) -> Option<u128> {
    dims.iter().try_fold(1u128, |acc, &d| acc.checked_mul(d as u128))
}

/// Periodic MPS `Σ Tr(A_1^{j_1}…A_N^{j_N}) |j_1…j_N⟩` with the default amplitude cap.
pub fn build_state(tensors: &[Rank3Tensor], n: usize) -> Result<DenseState> {
    build_state_capped(tensors, n, DEFAULT_AMPLITUDE_CAP)
}

/// As [`build_state`]; a single tensor is reused on every site, otherwise
/// one tensor per site is required.
pub fn build_state_capped(tensors: &[Rank3Tensor], n: usize, cap: usize) -> Result<DenseState> {
    if n == 0 {
        return Err(invalid("N must be at least 1"));
    }
    let sites: Vec<&Rank3Tensor> = match tensors.len() {
        1 => vec![&tensors[0]; n],
        k if k == n => tensors.iter().collect(),
        k => return Err(invalid(format!("need 1 or {n} tensors, got {k}"))),
    };
    let bond = sites[0].bond();
    if sites.iter().any(|t| t.bond() != bond) {
        return Err(invalid("tensors have mismatched bond dimensions"));
    }
    let dims: Vec<usize> = sites.iter().map(|t| t.d()).collect();
    let total = checked_size(&dims).unwrap_or(u128::MAX);
    if total > cap as u128 {
        return Err(Error::ResourceLimit { requested: total, cap });
    }
    let mut amps = vec![ZERO; total as usize];
    let mut cursor = 0usize;
    fill(&sites, 0, &CMatrix::identity(bond), &mut amps, &mut cursor);
    DenseState::new(dims, amps)
}

fn fill(sites: &[&Rank3Tensor], k: usize, prefix: &CMatrix, out: &mut [C64], cursor: &mut usize) {
    let t = sites[k];
    if k + 1 == sites.len() {
        let dbond = t.bond();
        for a in t.mats() {
            let mut tr = ZERO;
            for p in 0..dbond {
                for q in 0..dbond {
                    tr += prefix[(p, q)] * a[(q, p)];
                }
            }
            out[*cursor] = tr;
            *cursor += 1;
        }
        return;
    }
    for a in t.mats() {
        fill(sites, k + 1, &(prefix * a), out, cursor);
    }
}

/// The 3-party state `Σ A^j_{αβ} |j, α, β⟩` with dims `(d, D, D)`.
pub fn fiducial_state(a: &Rank3Tensor) -> DenseState {
    DenseState {
        n: 3,
        local_dims: vec![a.d(), a.bond(), a.bond()],
        amplitudes: a.entries(),
    }
}

/// Reads a 3-party state with dims `(d, D, D)` back into a tensor.
pub fn tensor_from_fiducial(psi: &DenseState) -> Result<Rank3Tensor> {
    let dims = psi.local_dims();
    if dims.len() != 3 || dims[1] != dims[2] {
        return Err(invalid("fiducial state must have dims (d, D, D)"));
    }
    Rank3Tensor::from_entries(dims[0], dims[1], psi.amplitudes())
}

/// The `d × D²` map whose row `j` is the row-major vectorization of `A^j`.
pub fn amap(a: &Rank3Tensor) -> CMatrix {
    let dd = a.bond() * a.bond();
    CMatrix::from_vec(a.d(), dd, a.entries()).expect("consistent tensor")
}

/// Moore-Penrose left inverse of [`amap`]; requires column rank `D²`.
pub fn amap_left_inverse(a: &Rank3Tensor, tol: f64) -> Result<CMatrix> {
    let m = amap(a);
    let required = a.bond() * a.bond();
    let r = rank(&m, tol)?;
    if r < required {
        return Err(Error::NotInjective { rank: r, required });
    }
    m.pinv(tol)
}

/// Injectivity analysis result.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NormalityReport {
    pub injectivity_length: Option<usize>,
    pub searched_up_to: usize,
    /// `2L + 1`, the smallest size at which the structural theorems apply.
    pub normal_for_sites: Option<usize>,
}

/// `⌈2D²(6 + log₂ D)⌉`, which is 56 for `D = 2`.
pub fn default_injectivity_bound(bond: usize) -> usize {
    let dd = (bond * bond) as f64;
    (2.0 * dd * (6.0 + (bond as f64).log2())).ceil() as usize
}

/// Smallest `L ≤ l_max` whose length-`L` products span all `D×D` matrices.
pub fn injectivity_length(a: &Rank3Tensor, l_max: usize) -> NormalityReport {
    injectivity_length_tol(a, l_max, crate::linalg::DEFAULT_TOL)
}

pub fn injectivity_length_tol(a: &Rank3Tensor, l_max: usize, tol: f64) -> NormalityReport {
    let dbond = a.bond();
    let full = dbond * dbond;
    let mut basis = row_space(&a.mats().iter().map(|m| m.as_slice().to_vec()).collect::<Vec<_>>(), tol);
    for l in 1..=l_max {
        if l > 1 {
            let grown: Vec<Vec<C64>> = basis
                .iter()
                .flat_map(|v| {
                    let m = CMatrix::from_vec(dbond, dbond, v.clone()).expect("square");
                    a.mats().iter().map(move |aj| (&m * aj).into_vec())
                })
                .collect();
            basis = row_space(&grown, tol);
        }
        if basis.len() == full {
            debug_assert_eq!(
                row_space(
                    &basis
                        .iter()
                        .flat_map(|v| {
                            let m = CMatrix::from_vec(dbond, dbond, v.clone()).expect("square");
                            a.mats().iter().map(move |aj| (&m * aj).into_vec())
                        })
                        .collect::<Vec<_>>(),
                    tol
                )
                .len(),
                full,
                "span saturation must persist"
            );
            return NormalityReport {
                injectivity_length: Some(l),
                searched_up_to: l,
                normal_for_sites: Some(2 * l + 1),
            };
        }
    }
    NormalityReport { injectivity_length: None, searched_up_to: l_max, normal_for_sites: None }
}

/// Orthonormal basis of the span of `vectors`, relative rank threshold `tol`.
pub(crate) fn row_space(vectors: &[Vec<C64>], tol: f64) -> Vec<Vec<C64>> {
    if vectors.is_empty() {
        return Vec::new();
    }
    let n = vectors[0].len();
    let m = nalgebra::DMatrix::from_fn(vectors.len(), n, |i, j| vectors[i][j]);
    let svd = m.svd(false, true);
    let vt = svd.v_t.expect("requested V^T");
    let smax = svd.singular_values.iter().copied().fold(0.0, f64::max);
    if smax == 0.0 {
        return Vec::new();
    }
    (0..svd.singular_values.len())
        .filter(|&k| svd.singular_values[k] > tol * smax)
        .map(|k| (0..n).map(|j| vt[(k, j)]).collect())
        .collect()
}

/// `(g_1 ⊗ … ⊗ g_N)|ψ⟩`; each `g_k` needs `local_dims[k]` columns and may
/// have any number of rows.
pub fn apply_local(ops: &[CMatrix], psi: &DenseState) -> Result<DenseState> {
    if ops.len() != psi.n() {
        return Err(invalid(format!("need {} site operators, got {}", psi.n(), ops.len())));
    }
    let mut dims = psi.local_dims().to_vec();
    let mut amps = psi.amplitudes().to_vec();
    for (k, g) in ops.iter().enumerate() {
        if g.cols() != dims[k] {
            return Err(invalid(format!("site {k}: operator has {} columns, local dim is {}", g.cols(), dims[k])));
        }
        let left: usize = dims[..k].iter().product();
        let right: usize = dims[k + 1..].iter().product();
        let (din, dout) = (dims[k], g.rows());
        let mut next = vec![ZERO; left * dout * right];
        for l in 0..left {
            for a in 0..dout {
                let dst = &mut next[(l * dout + a) * right..(l * dout + a + 1) * right];
                for b in 0..din {
                    let coef = g[(a, b)];
                    if coef == ZERO {
                        continue;
                    }
                    let src = &amps[(l * din + b) * right..(l * din + b + 1) * right];
                    for (d, s) in dst.iter_mut().zip(src) {
                        *d += coef * s;
                    }
                }
            }
        }
        dims[k] = dout;
        amps = next;
    }
    DenseState::new(dims, amps)
}

/// How two states are compared.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ScalarMode {
    Strict,
    UpToScalar,
}

/// Strict: `‖ψ − φ‖ ≤ tol·‖φ‖`. Up to scalar: [`prop_check`]`(ψ, φ)`.
pub fn states_equal(psi: &DenseState, phi: &DenseState, mode: ScalarMode, tol: f64) -> Result<PropResult> {
    if psi.local_dims() != phi.local_dims() {
        return Err(invalid("states have different local dimensions"));
    }
    match mode {
        ScalarMode::UpToScalar => Ok(prop_check(psi.amplitudes(), phi.amplitudes(), tol)),
        ScalarMode::Strict => {
            let diff: Vec<C64> = psi.amplitudes().iter().zip(phi.amplitudes()).map(|(a, b)| a - b).collect();
            let nrm = phi.norm();
            let residual = if nrm == 0.0 {
                if norm(&diff) == 0.0 { 0.0 } else { f64::INFINITY }
            } else {
                norm(&diff) / nrm
            };
            let ok = residual <= tol;
            Ok(PropResult { proportional: ok, scalar: ok.then_some(ONE), residual })
        }
    }
}

/// The tripartite state `(𝟙 ⊗ 𝒜 ⊗ 𝟙)(|Φ⁺⟩ ⊗ |Φ⁺⟩)`, reordered to `(j, α, β)`.
pub fn fiducial_via_max_entangled(a: &Rank3Tensor) -> DenseState {
    let dbond = a.bond();
    let phi = CMatrix::identity(dbond);
    let pair = kron(&phi, &phi);
    let map = amap(a);
    let mut amps = vec![ZERO; a.d() * dbond * dbond];
    for ap in 0..dbond {
        for bp in 0..dbond {
            for j in 0..a.d() {
                let mut acc = ZERO;
                for al in 0..dbond {
                    for be in 0..dbond {
                        acc += map[(j, al * dbond + be)] * pair[(ap * dbond + bp, al * dbond + be)];
                    }
                }
                amps[(j * dbond + ap) * dbond + bp] = acc;
            }
        }
    }
    DenseState { n: 3, local_dims: vec![a.d(), dbond, dbond], amplitudes: amps }
}
