//! The GHZ stabilizer group and the tools built on it: junction equations
//! between its elements, and the canonical `(W₁ ⊗ W₂ ⊗ W₃)|GHZ⟩` form of a
//! 3-qubit state in the GHZ class.
//!
//! Elements of `G_GHZ` are labelled `(k, v, w)`:
//! `σ₁^k P_{1/(vw)} ⊗ σ₁^k P_v ⊗ σ₁^k P_w`, i.e. the triple
//! `(σ₁^k P_{1/(vw)}, σ₁^k P_v, P_w σ₁^k)` with `P_z = diag(z, 1/z)`.

use crate::cycles::TripleOperator;
use crate::error::{invalid, Error, Result};
use crate::linalg::{p_mat, sigma1_pow, CMatrix, C64, ONE};
use crate::mps::DenseState;

/// Label of a `G_GHZ` element.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GhzBranch {
    pub k: usize,
    pub v: C64,
    pub w: C64,
}

impl GhzBranch {
    pub fn identity() -> Self {
        Self { k: 0, v: ONE, w: ONE }
    }

    /// Physical part `σ₁^k P_{1/(vw)}`.
    pub fn g(&self) -> CMatrix {
        &sigma1_pow(self.k) * &p_mat((self.v * self.w).inv())
    }

    /// Left bond part `σ₁^k P_v`.
    pub fn x(&self) -> CMatrix {
        &sigma1_pow(self.k) * &p_mat(self.v)
    }

    /// Right bond part `P_w σ₁^k` (so that `y^T = σ₁^k P_w`).
    pub fn y(&self) -> CMatrix {
        &p_mat(self.w) * &sigma1_pow(self.k)
    }

    /// The element as a triple fixing `|GHZ⟩`.
    pub fn triple(&self) -> TripleOperator {
        TripleOperator::new(self.g(), self.x(), self.y()).expect("regular by construction")
    }

    /// The element transported to `G_{GHZ_b, GHZ_c}`: `(g, c x b⁻¹, y)`.
    pub fn triple_between(&self, b: &CMatrix, c: &CMatrix) -> Result<TripleOperator> {
        let x = &(c * &self.x()) * &b.inverse()?;
        TripleOperator::new(self.g(), x, self.y())
    }
}

/// Solution `(w, x, r)` of `P_w σ₁^k c σ₁^l P_x = r b`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Junction {
    pub w: C64,
    pub x: C64,
    pub r: C64,
}

/// Solves `P_w σ₁^k c σ₁^l P_x = r b` for `(w, x, r)`. The solution is unique
/// up to the sign gauge `(w, r) → (−w, −r)` whenever `c' = σ₁^k c σ₁^l` has
/// nonzero off-diagonal entries and a nonzero diagonal entry; an
/// anti-diagonal `c'` leaves `wx` free and `x = 1` is chosen.
/// Returns `None` when no solution exists.
pub fn solve_junction(c: &CMatrix, b: &CMatrix, k: usize, l: usize, tol: f64) -> Option<Junction> {
    let cp = &(&sigma1_pow(k) * c) * &sigma1_pow(l);
    let (cn, bn) = (cp.max_abs(), b.max_abs());
    if cn == 0.0 || bn == 0.0 {
        return None;
    }
    let zero_pattern = |m: &CMatrix, scale: f64| -> [bool; 4] {
        [0, 1, 2, 3].map(|i| m.as_slice()[i].norm() <= tol.max(1e-12) * scale)
    };
    let (zc, zb) = (zero_pattern(&cp, cn), zero_pattern(b, bn));
    if zc != zb || zc[1] || zc[2] {
        return None;
    }
    let q = |i: usize, j: usize| b[(i, j)] / cp[(i, j)];
    let r = (q(0, 1) * q(1, 0)).sqrt().inv();
    let a = r * q(0, 1); // w / x
    let p = if !zc[0] {
        Some(r * q(0, 0)) // w x
    } else if !zc[3] {
        Some((r * q(1, 1)).inv())
    } else {
        None
    };
    let (w, x) = match p {
        Some(p) => {
            let x = (p / a).sqrt();
            (p / x, x)
        }
        None => (a, ONE),
    };
    let lhs = &(&p_mat(w) * &cp) * &p_mat(x);
    let resid = (&lhs - &b.scale(r)).frobenius_norm() / (r.norm() * b.frobenius_norm());
    (resid <= 1e-8_f64.max(tol)).then_some(Junction { w, x, r })
}

/// Every element `(g, c x b⁻¹, y)` of `G_{GHZ_b, GHZ_c}` that can appear in a
/// cycle, labelled by the neighbouring branch indices `(k_prev, k, k_next)`:
/// `v` comes from the junction `(k_prev, k)` and `w` from `(k, k_next)`.
pub fn ghz_transport_ops(b: &CMatrix, c: &CMatrix, tol: f64) -> Result<Vec<TripleOperator>> {
    let labels = ghz_transport_branches(b, c, tol);
    labels
        .into_iter()
        .map(|(lab, br)| Ok(br.triple_between(b, c)?.with_label(lab)))
        .collect()
}

/// The `G_GHZ` labels behind [`ghz_transport_ops`]: junctions solve
/// `P_w σ₁^k c σ₁^l P_x ∝ b`, the `(c → b)` concatenation rule.
pub fn ghz_transport_branches(b: &CMatrix, c: &CMatrix, tol: f64) -> Vec<(String, GhzBranch)> {
    let mut junctions = [[None; 2]; 2];
    for (k, row) in junctions.iter_mut().enumerate() {
        for (l, slot) in row.iter_mut().enumerate() {
            *slot = solve_junction(c, b, k, l, tol);
        }
    }
    let mut out = Vec::new();
    for kp in 0..2 {
        for k in 0..2 {
            for kn in 0..2 {
                if let (Some(jin), Some(jout)) = (junctions[kp][k], junctions[k][kn]) {
                    out.push((format!("k=({kp},{k},{kn})"), GhzBranch { k, v: jin.x, w: jout.w }));
                }
            }
        }
    }
    out
}

/// `|ψ⟩ = (W₁ ⊗ W₂ ⊗ W₃)(|000⟩ + |111⟩)`.
#[derive(Clone, Debug)]
pub struct GhzDecomposition {
    pub w1: CMatrix,
    pub w2: CMatrix,
    pub w3: CMatrix,
}

impl GhzDecomposition {
    /// `b` with `|ψ⟩ ∝ (W₁ ⊗ x⁻¹ ⊗ x^T)|GHZ_b⟩` for `x = W₃^T`, i.e. `b = W₃^T W₂`.
    pub fn canonical_b(&self) -> CMatrix {
        &self.w3.transpose() * &self.w2
    }
}

/// Decomposes a 3-qubit GHZ-class state through the rank-one members of
/// its slice pencil `a T₀ + b T₁`, treating the pencil homogeneously.
pub fn ghz_decompose(psi: &DenseState, tol: f64) -> Result<GhzDecomposition> {
    if psi.local_dims() != [2, 2, 2] {
        return Err(invalid("GHZ decomposition needs a 3-qubit state"));
    }
    let amps = psi.amplitudes();
    let t0 = CMatrix::from_vec(2, 2, amps[0..4].to_vec())?;
    let t1 = CMatrix::from_vec(2, 2, amps[4..8].to_vec())?;
    let c2 = t0.det()?;
    let c0 = t1.det()?;
    let c1 = (&t0 + &t1).det()? - c2 - c0;
    let scale = psi.norm().powi(2).max(f64::MIN_POSITIVE);
    let disc = c1 * c1 - 4.0 * c2 * c0;
    if disc.norm() <= tol.max(1e-12) * scale * scale {
        return Err(Error::Unsupported("state is not in the GHZ class".into()));
    }
    let mut s = disc.sqrt();
    if (c1.conj() * s).re < 0.0 {
        s = -s;
    }
    let big = -c1 - s;
    let roots = [(big, 2.0 * c2), (2.0 * c0, big)];
    let mut w1 = CMatrix::zeros(2, 2);
    let mut us = Vec::new();
    let mut vs = Vec::new();
    let mut pencil = CMatrix::zeros(2, 2);
    for (k, (a, bb)) in roots.iter().enumerate() {
        let nrm = (a.norm_sqr() + bb.norm_sqr()).sqrt();
        let (a, bb) = (a / nrm, bb / nrm);
        pencil[(k, 0)] = a;
        pencil[(k, 1)] = bb;
        let rk = &t0.scale(a) + &t1.scale(bb);
        let svd = rk.to_na().svd(true, true);
        let (u, vt) = (svd.u.expect("U"), svd.v_t.expect("V^T"));
        let (i0, smax) = svd
            .singular_values
            .iter()
            .enumerate()
            .fold((0, -1.0), |acc, (i, &s)| if s > acc.1 { (i, s) } else { acc });
        us.push([u[(0, i0)] * smax, u[(1, i0)] * smax]);
        vs.push([vt[(i0, 0)], vt[(i0, 1)]]);
    }
    let minv = pencil.inverse()?;
    for i in 0..2 {
        for k in 0..2 {
            w1[(i, k)] = minv[(i, k)];
        }
    }
    let w2 = CMatrix::from_fn(2, 2, |a, k| us[k][a]);
    let w3 = CMatrix::from_fn(2, 2, |b, k| vs[k][b]);
    let dec = GhzDecomposition { w1, w2, w3 };
    let rebuilt = rebuild(&dec);
    let resid = crate::linalg::norm(&rebuilt.iter().zip(amps).map(|(p, q)| p - q).collect::<Vec<_>>()) / psi.norm();
    if resid > 1e-8 {
        return Err(Error::Numerical(format!("GHZ decomposition residual {resid:.3e}")));
    }
    Ok(dec)
}

fn rebuild(d: &GhzDecomposition) -> Vec<C64> {
    let mut out = vec![C64::from(0.0); 8];
    for i in 0..2 {
        for a in 0..2 {
            for b in 0..2 {
                out[(i * 2 + a) * 2 + b] = (0..2).map(|k| d.w1[(i, k)] * d.w2[(a, k)] * d.w3[(b, k)]).sum();
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c64, hadamard, I};

    #[test]
    fn hadamard_junctions() {
        let h = hadamard();
        let expect = [((0, 0), ONE, ONE), ((0, 1), -I, ONE), ((1, 0), -ONE, I), ((1, 1), I, I)];
        for ((k, l), w, x) in expect {
            let j = solve_junction(&h, &h, k, l, 1e-10).unwrap();
            let lhs = &(&(&p_mat(j.w) * &sigma1_pow(k)) * &h) * &(&sigma1_pow(l) * &p_mat(j.x));
            assert!(lhs.rel_dist(&h.scale(j.r)) < 1e-12);
            // unique up to the sign gauge
            assert!((j.w * j.x - w * x).norm() < 1e-12 || (j.w * j.x + w * x).norm() < 1e-12, "({k},{l})");
            assert!((j.w / j.x - w / x).norm() < 1e-12 || (j.w / j.x + w / x).norm() < 1e-12, "({k},{l})");
        }
    }

    #[test]
    fn generic_b_has_only_diagonal_junctions() {
        let b = CMatrix::real(&[&[1.0, 2.0], &[0.5, 1.5]]);
        assert!(solve_junction(&b, &b, 0, 0, 1e-10).is_some());
        assert!(solve_junction(&b, &b, 1, 1, 1e-10).is_some());
        assert!(solve_junction(&b, &b, 0, 1, 1e-10).is_none());
        assert!(solve_junction(&b, &b, 1, 0, 1e-10).is_none());
    }

    #[test]
    fn branch_element_fixes_ghz() {
        let ghz = crate::catalog::ghz_b(&CMatrix::identity(2)).unwrap();
        for k in 0..2 {
            let br = GhzBranch { k, v: c64(0.3, 1.1), w: c64(-2.0, 0.4) };
            let out = br.triple().apply(&ghz).unwrap();
            assert!(CMatrix::from_vec(1, 8, out.entries()).unwrap().rel_dist(&CMatrix::from_vec(1, 8, ghz.entries()).unwrap()) < 1e-12);
        }
    }

    #[test]
    fn decomposition_rebuilds_state() {
        let t = crate::catalog::ghz_b(&CMatrix::real(&[&[1.0, 2.0], &[-0.5, 0.7]])).unwrap();
        let gauge = CMatrix::real(&[&[1.0, 0.3], &[0.2, 1.4]]);
        let t = t.map_bond(&gauge, &CMatrix::real(&[&[0.9, 0.0], &[0.4, 1.1]])).unwrap();
        let psi = crate::mps::fiducial_state(&t);
        let dec = ghz_decompose(&psi, 1e-10).unwrap();
        assert!(dec.w1.is_regular(1e-8) && dec.w2.is_regular(1e-8) && dec.w3.is_regular(1e-8));
    }

    #[test]
    fn decomposition_handles_singular_first_slice() {
        // T₀ singular puts one pencil root at infinity.
        let psi = DenseState::new(vec![2, 2, 2], vec![ONE, ONE, C64::from(0.0), C64::from(0.0), C64::from(0.0), ONE, ONE, c64(2.0, 0.0)]).unwrap();
        assert!(ghz_decompose(&psi, 1e-10).is_ok());
    }

    #[test]
    fn w_state_is_rejected() {
        let w = crate::catalog::w_b(&CMatrix::identity(2)).unwrap();
        assert!(ghz_decompose(&crate::mps::fiducial_state(&w), 1e-10).is_err());
    }
}
