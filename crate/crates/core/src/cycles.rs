//! Triple operators `h = g ⊗ x ⊗ y^T`, concatenation, and cycle enumeration
//! over finite operator sets.
//!
//! Acting on a fiducial state, `h|A⟩ = |B⟩` means `B^i = Σ_j g_ij x A^j y`.
//! If `h_1 → … → h_N → h_1` with `y_k x_{k+1} = r_k 𝟙` and every `h_k` maps
//! `|A⟩` to `|B⟩` exactly, then `(r·g_1 ⊗ g_2 ⊗ … ⊗ g_N)|Ψ(A)⟩ = |Ψ(B)⟩`
//! with `r = Π r_k`; certificates store exactly these site operators.

use crate::error::{invalid, Error, Result};
use crate::linalg::{kron, phase_normalize, prop_check, CMatrix, PropResult, C64};
use crate::linalg::eigenspaces;
use crate::mps::{amap, fiducial_state, Rank3Tensor};

#[derive(Clone, Debug, PartialEq)]
pub struct TripleOperator {
    pub g: CMatrix,
    pub x: CMatrix,
    pub y: CMatrix,
    pub label: Option<String>,
}

impl TripleOperator {
    /// Checks shapes and regularity of `x` and `y`.
    pub fn new(g: CMatrix, x: CMatrix, y: CMatrix) -> Result<Self> {
        if !x.is_square() || x.shape() != y.shape() {
            return Err(invalid("x and y must be square matrices of equal size"));
        }
        if !x.is_regular(1e-13) || !y.is_regular(1e-13) {
            return Err(invalid("x and y must be regular"));
        }
        if !g.is_finite() || g.rows() == 0 || g.cols() == 0 {
            return Err(invalid("g must be a finite nonempty matrix"));
        }
        Ok(Self { g, x, y, label: None })
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    pub fn identity(d: usize, bond: usize) -> Self {
        Self { g: CMatrix::identity(d), x: CMatrix::identity(bond), y: CMatrix::identity(bond), label: None }
    }

    /// Builds `h` and rescales `g` so that `h|source⟩ = |target⟩` holds exactly;
    /// fails unless the two agree up to a scalar.
    pub fn fixing(g: CMatrix, x: CMatrix, y: CMatrix, source: &Rank3Tensor, target: &Rank3Tensor, tol: f64) -> Result<Self> {
        let mut h = Self::new(g, x, y)?;
        let out = h.apply(source)?;
        if out.d() != target.d() || out.bond() != target.bond() {
            return Err(invalid("operator output has the wrong dimensions"));
        }
        let p = prop_check(&target.entries(), &out.entries(), tol);
        match p.scalar {
            Some(s) if p.proportional && s.norm() > 0.0 => {
                h.g = h.g.scale(s);
                Ok(h)
            }
            _ => Err(invalid(format!("operator does not map source to target (residual {:.3e})", p.residual))),
        }
    }

    pub fn bond(&self) -> usize {
        self.x.rows()
    }

    /// `(g ⊗ x ⊗ y^T)` applied to the fiducial state of `a`, as a tensor.
    pub fn apply(&self, a: &Rank3Tensor) -> Result<Rank3Tensor> {
        a.map_bond(&self.x, &self.y)?.map_physical(&self.g)
    }

    /// Relative residual of `h|source⟩ ∝ |target⟩`.
    pub fn check(&self, source: &Rank3Tensor, target: &Rank3Tensor, tol: f64) -> Result<PropResult> {
        let out = self.apply(source)?;
        if out.d() != target.d() {
            return Ok(PropResult { proportional: false, scalar: None, residual: f64::INFINITY });
        }
        Ok(prop_check(fiducial_state(&out).amplitudes(), fiducial_state(target).amplitudes(), tol))
    }

    /// The full operator `g ⊗ x ⊗ y^T`; two triples are gauge-equivalent iff these agree.
    pub fn full_operator(&self) -> CMatrix {
        kron(&self.g, &kron(&self.x, &self.y.transpose()))
    }

    /// Gauge normal form under `(g, x, y) ~ (g/(λμ), λx, μy)`: `x`, `y` scaled
    /// to unit Frobenius norm with leading entry real positive.
    pub fn canonical(&self) -> (CMatrix, CMatrix, CMatrix) {
        let (xs, fx) = phase_normalize(self.x.as_slice());
        let (ys, fy) = phase_normalize(self.y.as_slice());
        let d = self.bond();
        (
            self.g.scale(fx * fy),
            CMatrix::from_vec(d, d, xs).expect("shape"),
            CMatrix::from_vec(d, d, ys).expect("shape"),
        )
    }

    pub fn same_up_to_gauge(&self, other: &Self, tol: f64) -> bool {
        if self.g.shape() != other.g.shape() || self.x.shape() != other.x.shape() {
            return false;
        }
        let (a, b) = (self.canonical(), other.canonical());
        a.0.rel_dist(&b.0) <= tol && a.1.rel_dist(&b.1) <= tol && a.2.rel_dist(&b.2) <= tol
    }

    pub fn inverse(&self) -> Result<Self> {
        Ok(Self { g: self.g.inverse()?, x: self.x.inverse()?, y: self.y.inverse()?, label: None })
    }

    /// `after ∘ before`.
    pub fn compose(after: &Self, before: &Self) -> Result<Self> {
        Ok(Self {
            g: after.g.matmul(&before.g)?,
            x: after.x.matmul(&before.x)?,
            y: before.y.matmul(&after.y)?,
            label: None,
        })
    }
}

/// Keeps the first representative of every gauge class, preserving order.
pub fn dedup_ops(ops: &[TripleOperator], tol: f64) -> Vec<TripleOperator> {
    let mut out: Vec<TripleOperator> = Vec::new();
    for h in ops {
        if !out.iter().any(|k| k.same_up_to_gauge(h, tol)) {
            out.push(h.clone());
        }
    }
    out
}

/// Tolerance used to compare operators up to gauge.
pub(crate) fn gauge_tol(tol: f64) -> f64 {
    tol.max(1e-9)
}

/// `y₁ x₂ ∝ 𝟙`.
pub fn concatenable(h1: &TripleOperator, h2: &TripleOperator, tol: f64) -> PropResult {
    if h1.bond() != h2.bond() {
        return PropResult { proportional: false, scalar: None, residual: f64::INFINITY };
    }
    let prod = &h1.y * &h2.x;
    prop_check(prod.as_slice(), CMatrix::identity(h1.bond()).as_slice(), tol)
}

/// `y₁ b x₂ ∝ c`.
pub fn bc_concatenable(h1: &TripleOperator, h2: &TripleOperator, b: &CMatrix, c: &CMatrix, tol: f64) -> Result<PropResult> {
    let dbond = h1.bond();
    if b.shape() != (dbond, dbond) || c.shape() != (dbond, dbond) || h2.bond() != dbond {
        return Err(invalid("b and c must be DxD"));
    }
    if !b.is_regular(1e-12) || !c.is_regular(1e-12) {
        return Err(invalid("b and c must be regular"));
    }
    let prod = &(&h1.y * b) * &h2.x;
    Ok(prop_check(prod.as_slice(), c.as_slice(), tol))
}

/// Concatenation rule used by [`enumerate_cycles`].
#[derive(Clone, Debug, PartialEq)]
pub enum ConcatMode {
    Plain,
    /// `(b → c)` rule `y_k b x_{k+1} ∝ c`. For operators fixing `|A⟩`, the
    /// emitted certificates carry `(g, b x c⁻¹, y)`, which map `Ψ(A_c)` to
    /// `Ψ(A_b)` where `A_z^j = z A^j`.
    Bc { b: CMatrix, c: CMatrix },
}

/// A closed walk `h_1 → … → h_N → h_1` with its junction scalars and site operators.
#[derive(Clone, Debug, PartialEq)]
pub struct CycleCertificate {
    pub ops: Vec<TripleOperator>,
    pub scalars: Vec<C64>,
    pub site_ops: Vec<CMatrix>,
}

impl CycleCertificate {
    /// Validates every cyclic junction `y_k x_{k+1} = r_k 𝟙` and derives
    /// the site operators, with `Π r_k` folded into the first one.
    pub fn from_ops(ops: Vec<TripleOperator>, tol: f64) -> Result<Self> {
        if ops.is_empty() {
            return Err(invalid("a cycle needs at least one operator"));
        }
        let n = ops.len();
        let mut scalars = Vec::with_capacity(n);
        for k in 0..n {
            let p = concatenable(&ops[k], &ops[(k + 1) % n], tol);
            match p.scalar {
                Some(r) if p.proportional && r.norm() > 0.0 => scalars.push(r),
                _ => {
                    return Err(invalid(format!(
                        "operators {k} and {} are not concatenable (residual {:.3e})",
                        (k + 1) % n,
                        p.residual
                    )))
                }
            }
        }
        let total: C64 = scalars.iter().product();
        let mut site_ops: Vec<CMatrix> = ops.iter().map(|h| h.g.clone()).collect();
        site_ops[0] = site_ops[0].scale(total);
        Ok(Self { ops, scalars, site_ops })
    }

    pub fn n(&self) -> usize {
        self.ops.len()
    }

    /// One operator repeated `n` times.
    pub fn repeated(h: &TripleOperator, n: usize, tol: f64) -> Result<Self> {
        Self::from_ops(vec![h.clone(); n], tol)
    }

    /// Smallest `p` dividing `N` with `ops[k] ≅ ops[k + p]` up to gauge.
    pub fn minimal_period(&self, tol: f64) -> usize {
        let n = self.n();
        (1..=n)
            .filter(|p| n % p == 0)
            .find(|&p| (0..n).all(|k| self.ops[k].same_up_to_gauge(&self.ops[(k + p) % n], gauge_tol(tol))))
            .unwrap_or(n)
    }

    /// The certificate for `n` sites obtained by repeating the minimal period;
    /// `None` when `n` is not a multiple of it.
    pub fn resized(&self, n: usize, tol: f64) -> Option<Self> {
        let p = self.minimal_period(tol);
        if n == 0 || n % p != 0 {
            return None;
        }
        let ops: Vec<TripleOperator> = (0..n).map(|k| self.ops[k % p].clone()).collect();
        Self::from_ops(ops, tol).ok()
    }

    /// Site operators up to a global scalar, each normalized.
    pub fn normalized_site_ops(&self) -> Vec<Vec<C64>> {
        self.site_ops.iter().map(|g| phase_normalize(g.as_slice()).0).collect()
    }

    /// True when the site operators of both certificates agree up to one global factor.
    pub fn same_site_ops(&self, other: &Self, tol: f64) -> bool {
        if self.n() != other.n() {
            return false;
        }
        let a: Vec<C64> = self.site_ops.iter().flat_map(|g| g.as_slice().iter().copied()).collect();
        let b: Vec<C64> = other.site_ops.iter().flat_map(|g| g.as_slice().iter().copied()).collect();
        if a.len() != b.len() {
            return false;
        }
        self.normalized_site_ops()
            .iter()
            .zip(other.normalized_site_ops())
            .all(|(u, v)| crate::linalg::norm(&u.iter().zip(&v).map(|(p, q)| p - q).collect::<Vec<_>>()) <= tol)
    }
}

/// Removes certificates whose site-operator tuples coincide up to a global scalar.
pub fn distinct_by_site_ops(certs: &[CycleCertificate], tol: f64) -> Vec<CycleCertificate> {
    let mut out: Vec<CycleCertificate> = Vec::new();
    for c in certs {
        if !out.iter().any(|k| k.same_site_ops(c, tol)) {
            out.push(c.clone());
        }
    }
    out
}

/// Result of [`enumerate_cycles`].
#[derive(Clone, Debug)]
pub struct CycleEnumeration {
    /// Input operators after gauge deduplication (vertex set).
    pub ops: Vec<TripleOperator>,
    /// Vertices with a self-loop, i.e. 1-cycles.
    pub self_loops: Vec<usize>,
    /// Vertex index sequence of every certificate, lexicographically ordered.
    pub walks: Vec<Vec<usize>>,
    pub certificates: Vec<CycleCertificate>,
}

impl CycleEnumeration {
    /// At least one cycle exists but no 1-cycle does.
    pub fn only_nontrivial_cycles(&self) -> bool {
        !self.certificates.is_empty() && self.self_loops.is_empty()
    }
}

fn edge(h1: &TripleOperator, h2: &TripleOperator, mode: &ConcatMode, tol: f64) -> Result<bool> {
    Ok(match mode {
        ConcatMode::Plain => concatenable(h1, h2, tol).proportional,
        ConcatMode::Bc { b, c } => bc_concatenable(h1, h2, b, c, tol)?.proportional,
    })
}

/// Every closed walk of length `n` in the concatenation digraph of `ops`
/// (deduplicated up to gauge). Walks are enumerated per start vertex with
/// pruning by exact-length reachability back to the start.
pub fn enumerate_cycles(ops: &[TripleOperator], n: usize, mode: &ConcatMode, tol: f64) -> Result<CycleEnumeration> {
    if n == 0 {
        return Err(invalid("cycle length must be at least 1"));
    }
    let verts = dedup_ops(ops, gauge_tol(tol));
    let m = verts.len();
    let mut adj = vec![vec![false; m]; m];
    for i in 0..m {
        for j in 0..m {
            adj[i][j] = edge(&verts[i], &verts[j], mode, tol)?;
        }
    }
    let self_loops: Vec<usize> = (0..m).filter(|&i| adj[i][i]).collect();
    // reach[t][v][s]: a walk of exactly t edges leads from v to s.
    let mut reach = vec![identity_bool(m)];
    for t in 1..=n {
        let prev = &reach[t - 1];
        let next: Vec<Vec<bool>> =
            (0..m).map(|v| (0..m).map(|s| (0..m).any(|w| adj[v][w] && prev[w][s])).collect()).collect();
        reach.push(next);
    }
    let mut walks = Vec::new();
    for start in 0..m {
        if !reach[n][start][start] {
            continue;
        }
        let mut path = vec![start];
        extend(&adj, &reach, n, start, &mut path, &mut walks);
    }
    let mut certificates = Vec::with_capacity(walks.len());
    for w in &walks {
        let chosen: Vec<TripleOperator> = w.iter().map(|&i| verts[i].clone()).collect();
        let cert = match mode {
            ConcatMode::Plain => CycleCertificate::from_ops(chosen, tol)?,
            ConcatMode::Bc { b, c } => {
                let cinv = c.inverse()?;
                let converted = chosen
                    .into_iter()
                    .map(|h| TripleOperator { x: &(b * &h.x) * &cinv, ..h })
                    .collect();
                CycleCertificate::from_ops(converted, tol)?
            }
        };
        certificates.push(cert);
    }
    Ok(CycleEnumeration { ops: verts, self_loops, walks, certificates })
}

fn identity_bool(m: usize) -> Vec<Vec<bool>> {
    (0..m).map(|i| (0..m).map(|j| i == j).collect()).collect()
}

fn extend(adj: &[Vec<bool>], reach: &[Vec<Vec<bool>>], n: usize, start: usize, path: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    let cur = *path.last().expect("nonempty path");
    if path.len() == n {
        if adj[cur][start] {
            out.push(path.clone());
        }
        return;
    }
    let remaining = n - path.len();
    for next in 0..adj.len() {
        if adj[cur][next] && reach[remaining][next][start] {
            path.push(next);
            extend(adj, reach, n, start, path, out);
            path.pop();
        }
    }
}

/// A `(c, b)` pair admitting a `(b → c)`-style 2-cycle between `h_a` and `h_b`.
#[derive(Clone, Debug)]
pub struct TwoCycleTarget {
    pub c: CMatrix,
    pub b: CMatrix,
    pub lambda: C64,
}

/// Solves `y_a⁻¹ y_b c x_a x_b⁻¹ = λ c`, i.e. the eigenproblem of
/// `M = y_a⁻¹ y_b ⊗ (x_a x_b⁻¹)^T` on `vec(c)`, and sets `b = y_a c x_b`,
/// so that `y_a c x_b = b` and `y_b c x_a = λ b`. Singular `c` are dropped.
/// Degenerate eigenspaces contribute their basis vectors plus one generic
/// combination.
pub fn two_cycle_targets(h_a: &TripleOperator, h_b: &TripleOperator, tol: f64) -> Result<Vec<TwoCycleTarget>> {
    if h_a.bond() != 2 || h_b.bond() != 2 {
        return Err(invalid("two-cycle targets are defined for D = 2"));
    }
    if h_a.same_up_to_gauge(h_b, gauge_tol(tol)) {
        return Err(invalid("h_a and h_b must differ up to gauge"));
    }
    let ya_inv = h_a.y.inverse()?;
    let xb_inv = h_b.x.inverse()?;
    let m = kron(&(&ya_inv * &h_b.y), &(&h_a.x * &xb_inv).transpose());
    let mut out: Vec<TwoCycleTarget> = Vec::new();
    for sp in eigenspaces(&m, tol.max(1e-12))? {
        let mut candidates = sp.basis.clone();
        if sp.basis.len() > 1 {
            let mut combo = vec![C64::from(0.0); 4];
            for (k, v) in sp.basis.iter().enumerate() {
                let w = C64::from_polar(1.0 + 0.37 * k as f64, 0.61 * (k as f64 + 1.0));
                for (cz, vz) in combo.iter_mut().zip(v) {
                    *cz += w * vz;
                }
            }
            candidates.push(combo);
        }
        for v in candidates {
            let c = CMatrix::from_vec(2, 2, v)?;
            if !c.is_regular(1e-8) {
                continue;
            }
            let b = &(&h_a.y * &c) * &h_b.x;
            let fwd = bc_concatenable(h_a, h_b, &c, &b, 1e-8)?;
            let back = bc_concatenable(h_b, h_a, &c, &b, 1e-8)?;
            if !(fwd.proportional && back.proportional) {
                continue;
            }
            if out.iter().any(|t| prop_check(t.c.as_slice(), c.as_slice(), 1e-8).proportional) {
                continue;
            }
            out.push(TwoCycleTarget { c, b, lambda: sp.value });
        }
    }
    Ok(out)
}

/// Least-squares `g` with `Σ_j g_ij x A^j y = B^i`; errors when no exact solution exists.
pub fn solve_physical(source: &Rank3Tensor, target: &Rank3Tensor, x: &CMatrix, y: &CMatrix, tol: f64) -> Result<CMatrix> {
    let moved = source.map_bond(x, y)?;
    let v = amap(&moved);
    let bmap = amap(target);
    if bmap.cols() != v.cols() {
        return Err(invalid("bond dimensions differ"));
    }
    let g = &bmap * &v.pinv(1e-12)?;
    let resid = (&g * &v).rel_dist(&bmap);
    if resid > tol.max(1e-9) {
        return Err(Error::NoWitness(format!("no physical operator reproduces the target (residual {resid:.3e})")));
    }
    Ok(g)
}

/// Identity triple on the given dimensions; always a 1-cycle.
pub fn trivial_certificate(d: usize, bond: usize, n: usize) -> CycleCertificate {
    CycleCertificate::repeated(&TripleOperator::identity(d, bond), n, 1e-12).expect("identity concatenates")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c64, sigma1, sigma3};

    fn regular(seed: u64) -> CMatrix {
        let t = seed as f64;
        CMatrix::from_fn(2, 2, |i, j| c64((t + 1.3 * i as f64 + 0.7 * j as f64).sin() + if i == j { 2.0 } else { 0.0 }, (t * 0.3 + j as f64).cos()))
    }

    #[test]
    fn self_inverse_bonds_concatenate() {
        let x = regular(1);
        let h = TripleOperator::new(CMatrix::identity(2), x.clone(), x.inverse().unwrap()).unwrap();
        assert!(concatenable(&h, &h, 1e-10).proportional);
        let e = enumerate_cycles(&[h], 4, &ConcatMode::Plain, 1e-10).unwrap();
        assert_eq!(e.certificates.len(), 1);
        assert_eq!(e.self_loops, vec![0]);
    }

    #[test]
    fn two_cycle_only_for_even_n() {
        let x = regular(2);
        let z = regular(3);
        // h1 → h2 needs y1 x2 ∝ 1; h2 → h1 needs y2 x1 ∝ 1; neither self-loops.
        let h1 = TripleOperator::new(CMatrix::identity(2), x.clone(), z.clone()).unwrap();
        let h2 = TripleOperator::new(sigma1(), z.inverse().unwrap(), x.inverse().unwrap()).unwrap();
        assert!(!concatenable(&h1, &h1, 1e-10).proportional);
        for n in 1..=6 {
            let e = enumerate_cycles(&[h1.clone(), h2.clone()], n, &ConcatMode::Plain, 1e-10).unwrap();
            assert_eq!(e.certificates.len(), if n % 2 == 0 { 2 } else { 0 }, "n = {n}");
            assert!(e.self_loops.is_empty());
        }
    }

    #[test]
    fn bc_specializes_to_plain() {
        let h1 = TripleOperator::new(sigma3(), regular(4), regular(5)).unwrap();
        let h2 = TripleOperator::new(sigma1(), regular(5).inverse().unwrap(), regular(6)).unwrap();
        let id = CMatrix::identity(2);
        for (a, b) in [(&h1, &h2), (&h2, &h1), (&h1, &h1)] {
            assert_eq!(
                concatenable(a, b, 1e-10).proportional,
                bc_concatenable(a, b, &id, &id, 1e-10).unwrap().proportional
            );
        }
        assert!(bc_concatenable(&h1, &h2, &CMatrix::zeros(2, 2), &id, 1e-10).is_err());
    }

    #[test]
    fn identity_pair_bc_iff_c_prop_b() {
        let h = TripleOperator::identity(2, 2);
        let b = regular(7);
        assert!(bc_concatenable(&h, &h, &b, &b.scale(c64(0.0, 3.0)), 1e-10).unwrap().proportional);
        assert!(!bc_concatenable(&h, &h, &b, &regular(8), 1e-10).unwrap().proportional);
    }

    #[test]
    fn gauge_dedup() {
        let h = TripleOperator::new(sigma1(), regular(1), regular(2)).unwrap();
        let (l, m) = (c64(0.5, -2.0), c64(-3.0, 0.1));
        let h2 = TripleOperator { g: h.g.scale((l * m).inv()), x: h.x.scale(l), y: h.y.scale(m), label: None };
        assert!(h.same_up_to_gauge(&h2, 1e-10));
        assert!(h.full_operator().rel_dist(&h2.full_operator()) < 1e-12);
        assert_eq!(dedup_ops(&[h.clone(), h2], 1e-9).len(), 1);
        let h3 = TripleOperator { g: h.g.scale(c64(2.0, 0.0)), ..h.clone() };
        assert!(!h.same_up_to_gauge(&h3, 1e-10));
    }

    #[test]
    fn identity_matrix_m_admits_generic_c() {
        let x = regular(9);
        let y = regular(10);
        let ha = TripleOperator::new(CMatrix::identity(2), x.clone(), y.clone()).unwrap();
        let hb = TripleOperator::new(sigma1(), x.clone(), y.clone()).unwrap();
        let targets = two_cycle_targets(&ha, &hb, 1e-10).unwrap();
        assert!(!targets.is_empty());
        for t in targets {
            let expect = &(&y * &t.c) * &x;
            assert!(prop_check(t.b.as_slice(), expect.as_slice(), 1e-10).proportional);
            assert!((t.lambda - crate::linalg::ONE).norm() < 1e-9);
        }
        assert!(two_cycle_targets(&ha, &ha, 1e-10).is_err());
    }

    #[test]
    fn certificate_scalar_folding() {
        let x = regular(11);
        let h = TripleOperator::new(CMatrix::identity(2), x.clone(), x.inverse().unwrap().scale(c64(2.0, 0.0))).unwrap();
        let cert = CycleCertificate::repeated(&h, 3, 1e-10).unwrap();
        assert_eq!(cert.scalars.len(), 3);
        assert!((cert.site_ops[0][(0, 0)] - c64(8.0, 0.0)).norm() < 1e-12);
        assert_eq!(cert.minimal_period(1e-10), 1);
        assert_eq!(cert.resized(5, 1e-10).unwrap().n(), 5);
    }
}
