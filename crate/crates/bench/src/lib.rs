//! Shared fixtures for the decoder benchmarks.

use qldpc_bp::{build_xzzx_surface, pauli_to_symplectic, sample_error, trial_rng, BitVec, NoiseModel, StabilizerCode};

/// `count` syndromes of independent errors drawn from `noise` on `code`.
pub fn syndromes(code: &StabilizerCode, noise: &NoiseModel, count: u64) -> Vec<BitVec> {
    (0..count)
        .map(|i| {
            let e = sample_error(noise, code.n(), &mut trial_rng(99, i));
            code.h_check().mul_vec(pauli_to_symplectic(&e).bits()).unwrap()
        })
        .collect()
}

pub fn xzzx(l: usize) -> StabilizerCode {
    build_xzzx_surface(l).unwrap()
}
