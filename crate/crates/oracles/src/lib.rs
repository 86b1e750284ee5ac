//! Brute-force reference computations for the test suites.
//!
//! Everything here works on plain `Vec<u8>` rows and `f64` priors and
//! shares no code with the decoder crate.

use thiserror::Error;

pub mod trees;

pub const DEFAULT_BUDGET: u64 = 1 << 24;

#[derive(Debug, Error, PartialEq)]
pub enum OracleError {
    #[error("enumeration needs {needed} configurations, budget is {budget}")]
    BudgetExceeded { needed: u128, budget: u64 },
    #[error("no configuration is consistent with the syndrome")]
    ZeroProbability,
    #[error("shape error: {0}")]
    Shape(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Constraint {
    None,
    /// Columns `i`, `i+n`, `i+2n` of a `3n`-column matrix hold at most one set bit.
    OneHot,
}

fn check_budget(bits: usize, budget: u64) -> Result<(), OracleError> {
    let needed = 1u128 << bits.min(127);
    if bits >= 127 || needed > budget as u128 {
        return Err(OracleError::BudgetExceeded { needed, budget });
    }
    Ok(())
}

fn parity(row: &[u8], e: &[u8]) -> u8 {
    row.iter().zip(e).fold(0, |acc, (&a, &b)| acc ^ (a & b & 1))
}

/// `P(e_i = 1 | H e = s)` for every column, by enumerating every assignment
/// of the columns with nonzero prior.
pub fn exact_marginals(
    h: &[Vec<u8>],
    priors: &[f64],
    s: &[u8],
    constraint: Constraint,
    budget: u64,
) -> Result<Vec<f64>, OracleError> {
    let cols = priors.len();
    if h.iter().any(|r| r.len() != cols) || h.len() != s.len() {
        return Err(OracleError::Shape("matrix, priors and syndrome disagree".into()));
    }
    if constraint == Constraint::OneHot && !cols.is_multiple_of(3) {
        return Err(OracleError::Shape("one-hot needs a multiple of 3 columns".into()));
    }
    let live: Vec<usize> = (0..cols).filter(|&i| priors[i] > 0.0).collect();
    check_budget(live.len(), budget)?;
    let n = cols / 3;
    let mut e = vec![0u8; cols];
    let mut total = 0.0;
    let mut ones = vec![0.0; cols];
    for mask in 0u64..(1u64 << live.len()) {
        for (k, &i) in live.iter().enumerate() {
            e[i] = ((mask >> k) & 1) as u8;
        }
        if h.iter().zip(s).any(|(row, &sj)| parity(row, &e) != sj & 1) {
            continue;
        }
        if constraint == Constraint::OneHot && (0..n).any(|q| e[q] + e[q + n] + e[q + 2 * n] > 1) {
            continue;
        }
        let w: f64 = (0..cols)
            .map(|i| if e[i] == 1 { priors[i] } else { 1.0 - priors[i] })
            .product();
        total += w;
        for i in 0..cols {
            if e[i] == 1 {
                ones[i] += w;
            }
        }
    }
    if total <= 0.0 {
        return Err(OracleError::ZeroProbability);
    }
    Ok(ones.into_iter().map(|x| x / total).collect())
}

/// Single-qubit Pauli as `(x, z)` bits: I=(0,0), X=(1,0), Z=(0,1), Y=(1,1).
const OPS: [(u8, u8, char); 4] = [(0, 0, 'I'), (1, 0, 'X'), (1, 1, 'Y'), (0, 1, 'Z')];

fn syndrome_of(h: &[Vec<u8>], n: usize, x: &[u8], z: &[u8]) -> Vec<u8> {
    h.iter()
        .map(|row| (0..n).fold(0u8, |acc, q| acc ^ (row[q] & z[q]) ^ (row[q + n] & x[q])))
        .collect()
}

fn decode_index(mut idx: u64, n: usize, x: &mut [u8], z: &mut [u8], ops: &mut [usize]) {
    for q in 0..n {
        let k = (idx & 3) as usize;
        idx >>= 2;
        ops[q] = k;
        x[q] = OPS[k].0;
        z[q] = OPS[k].1;
    }
}

/// Most probable Pauli (not coset) with syndrome `s` under independent
/// `(p_x, p_y, p_z)` noise. `h` is `(H_x | H_z)`. Returns the word as a
/// string over `IXYZ`; ties keep the first word in enumeration order.
pub fn exhaustive_ml_decode(h: &[Vec<u8>], p_x: f64, p_y: f64, p_z: f64, s: &[u8]) -> Result<String, OracleError> {
    let cols = h.first().map(Vec::len).unwrap_or(0);
    if !cols.is_multiple_of(2) || h.iter().any(|r| r.len() != cols) || h.len() != s.len() {
        return Err(OracleError::Shape(
            "expected m x 2n rows and a length-m syndrome".into(),
        ));
    }
    let n = cols / 2;
    if n > 10 {
        return Err(OracleError::BudgetExceeded {
            needed: 1u128 << (2 * n),
            budget: 1 << 20,
        });
    }
    let prob = [1.0 - p_x - p_y - p_z, p_x, p_y, p_z];
    let (mut x, mut z, mut ops) = (vec![0; n], vec![0; n], vec![0; n]);
    let mut best: Option<(f64, Vec<usize>)> = None;
    for idx in 0..(1u64 << (2 * n)) {
        decode_index(idx, n, &mut x, &mut z, &mut ops);
        if syndrome_of(h, n, &x, &z).iter().zip(s).any(|(a, b)| a != &(b & 1)) {
            continue;
        }
        let w: f64 = ops.iter().map(|&k| prob[k]).product();
        if best.as_ref().is_none_or(|(bw, _)| w > *bw) {
            best = Some((w, ops.clone()));
        }
    }
    let (w, ops) = best.ok_or(OracleError::ZeroProbability)?;
    if w <= 0.0 {
        return Err(OracleError::ZeroProbability);
    }
    Ok(ops.iter().map(|&k| OPS[k].2).collect())
}

/// GF(2) rank by dense elimination.
pub fn dense_rank(rows: &[Vec<u8>]) -> usize {
    let mut m: Vec<Vec<u8>> = rows.iter().map(|r| r.iter().map(|b| b & 1).collect()).collect();
    let cols = m.first().map(Vec::len).unwrap_or(0);
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..m.len()).find(|&r| m[r][c] == 1) else {
            continue;
        };
        m.swap(rank, p);
        let pivot = m[rank].clone();
        for (r, row) in m.iter_mut().enumerate() {
            if r != rank && row[c] == 1 {
                for (a, b) in row.iter_mut().zip(&pivot) {
                    *a ^= b;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Smallest weight of a Pauli that commutes with every row of `h`
/// (`(H_x | H_z)`) but is not in its row space.
pub fn min_logical_weight(h: &[Vec<u8>]) -> Result<usize, OracleError> {
    let cols = h.first().map(Vec::len).unwrap_or(0);
    let n = cols / 2;
    if n > 10 {
        return Err(OracleError::BudgetExceeded {
            needed: 1u128 << (2 * n),
            budget: 1 << 20,
        });
    }
    let base = dense_rank(h);
    let (mut x, mut z, mut ops) = (vec![0; n], vec![0; n], vec![0; n]);
    let mut best = usize::MAX;
    for idx in 1..(1u64 << (2 * n)) {
        decode_index(idx, n, &mut x, &mut z, &mut ops);
        let w = ops.iter().filter(|&&k| k != 0).count();
        if w >= best || syndrome_of(h, n, &x, &z).contains(&1) {
            continue;
        }
        let mut ext = h.to_vec();
        ext.push(x.iter().chain(&z).copied().collect());
        if dense_rank(&ext) > base {
            best = w;
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_bit_marginals() {
        let m = exact_marginals(&[vec![1, 1]], &[0.1, 0.2], &[1], Constraint::None, DEFAULT_BUDGET).unwrap();
        assert!((m[0] - 0.08 / 0.26).abs() < 1e-15);
        assert!((m[1] - 0.18 / 0.26).abs() < 1e-15);
    }

    #[test]
    fn inconsistent_syndrome() {
        let r = exact_marginals(&[vec![0, 0]], &[0.1, 0.2], &[1], Constraint::None, DEFAULT_BUDGET);
        assert_eq!(r, Err(OracleError::ZeroProbability));
    }

    #[test]
    fn one_hot_filters_pairs() {
        // single qubit, check on the X and Z columns with s = 0: only 000 and 001 survive
        let m = exact_marginals(
            &[vec![1, 1, 0]],
            &[0.1, 0.1, 0.1],
            &[0],
            Constraint::OneHot,
            DEFAULT_BUDGET,
        )
        .unwrap();
        assert_eq!(m[0], 0.0);
        assert_eq!(m[1], 0.0);
        assert!((m[2] - 0.1).abs() < 1e-15);
    }

    #[test]
    fn budget_is_enforced() {
        let r = exact_marginals(&[vec![1; 5]], &[0.1; 5], &[0], Constraint::None, 16);
        assert!(matches!(r, Err(OracleError::BudgetExceeded { .. })));
    }

    #[test]
    fn ml_decode_examples() {
        // XIX, ZYZ
        let h = vec![vec![1, 0, 1, 0, 0, 0], vec![0, 1, 0, 1, 1, 1]];
        assert_eq!(exhaustive_ml_decode(&h, 0.05, 0.01, 0.01, &[0, 0]).unwrap(), "III");
        assert_eq!(exhaustive_ml_decode(&h, 0.1, 0.01, 0.01, &[0, 1]).unwrap(), "XII");
    }

    #[test]
    fn rank_and_distance() {
        assert_eq!(dense_rank(&[vec![1, 1, 0], vec![0, 1, 1], vec![1, 0, 1]]), 2);
        // ZZ on two qubits: X1X2 commutes, Z1 commutes; weight 1
        assert_eq!(min_logical_weight(&[vec![0, 0, 1, 1]]).unwrap(), 1);
    }
}
