#![allow(dead_code)]

use mpsym::linalg::{CMatrix, C64};
use mpsym::Rank3Tensor;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn complex(r: &mut ChaCha8Rng) -> C64 {
    C64::new(r.random_range(-1.0..1.0), r.random_range(-1.0..1.0))
}

pub fn matrix(r: &mut ChaCha8Rng, rows: usize, cols: usize) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| complex(r))
}

/// Random matrix with `|det|` bounded away from zero.
pub fn regular(r: &mut ChaCha8Rng, n: usize) -> CMatrix {
    loop {
        let m = matrix(r, n, n);
        let sv = m.singular_values();
        if sv[n - 1] > 0.2 * sv[0] {
            return m;
        }
    }
}

/// Random 2x2 `b` with all entries nonzero and `χ(b)` away from −1 and 0.
pub fn generic_b(r: &mut ChaCha8Rng) -> CMatrix {
    loop {
        let b = regular(r, 2);
        let chi = b[(0, 0)] * b[(1, 1)] / (b[(0, 1)] * b[(1, 0)]);
        if b.as_slice().iter().all(|z| z.norm() > 0.1) && (chi + 1.0).norm() > 0.05 && chi.norm() > 0.05 {
            return b;
        }
    }
}

pub fn tensor(r: &mut ChaCha8Rng, d: usize, bond: usize) -> Rank3Tensor {
    Rank3Tensor::new((0..d).map(|_| matrix(r, bond, bond)).collect()).expect("nonzero")
}

/// Haar-ish random unitary from the QR of a random matrix.
pub fn unitary(r: &mut ChaCha8Rng, n: usize) -> CMatrix {
    let m = matrix(r, n, n).to_na();
    let q = m.qr().q();
    CMatrix::from_na(&q)
}
