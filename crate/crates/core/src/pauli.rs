//! Pauli strings and their binary images.
//!
//! Two binary representations are supported:
//!
//! * symplectic, `(e_x | e_z)` of length `2n`, where `Y` sets both halves;
//! * decoupled, `(e_x' | e_z' | e_y')` of length `3n`, where each of `X`,
//!   `Z` and `Y` owns its own block and a valid Pauli has at most one set bit
//!   among positions `i`, `i + n`, `i + 2n`.
//!
//! Phases are ignored throughout; products are taken modulo phase.

use std::fmt;
use std::ops::Deref;
use std::str::FromStr;

use crate::bits::BitVec;
use crate::error::{check_dim, Error, Result};
use crate::gf2::BitMatrix;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum Pauli {
    #[default]
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];

    #[inline]
    pub fn from_xz(x: bool, z: bool) -> Pauli {
        match (x, z) {
            (false, false) => Pauli::I,
            (true, false) => Pauli::X,
            (true, true) => Pauli::Y,
            (false, true) => Pauli::Z,
        }
    }

    #[inline]
    pub fn has_x(self) -> bool {
        matches!(self, Pauli::X | Pauli::Y)
    }

    #[inline]
    pub fn has_z(self) -> bool {
        matches!(self, Pauli::Z | Pauli::Y)
    }

    pub fn to_char(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }

    pub fn from_char(c: char) -> Option<Pauli> {
        match c {
            'I' | '_' | '.' => Some(Pauli::I),
            'X' => Some(Pauli::X),
            'Y' => Some(Pauli::Y),
            'Z' => Some(Pauli::Z),
            _ => None,
        }
    }
}

/// An `n`-qubit Pauli operator without phase.
/// Product modulo phase.
impl std::ops::Mul for Pauli {
    type Output = Pauli;

    #[inline]
    fn mul(self, other: Pauli) -> Pauli {
        Pauli::from_xz(self.has_x() ^ other.has_x(), self.has_z() ^ other.has_z())
    }
}

#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct PauliString {
    ops: Vec<Pauli>,
}

impl PauliString {
    pub fn new(ops: Vec<Pauli>) -> Self {
        Self { ops }
    }

    pub fn identity(n: usize) -> Self {
        Self { ops: vec![Pauli::I; n] }
    }

    /// Identity except for the listed `(qubit, Pauli)` pairs.
    pub fn from_sparse(n: usize, entries: &[(usize, Pauli)]) -> Self {
        let mut p = Self::identity(n);
        for &(q, op) in entries {
            p.ops[q] = op;
        }
        p
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    pub fn ops(&self) -> &[Pauli] {
        &self.ops
    }

    pub fn get(&self, q: usize) -> Pauli {
        self.ops[q]
    }

    pub fn set(&mut self, q: usize, op: Pauli) {
        self.ops[q] = op;
    }

    pub fn weight(&self) -> usize {
        self.ops.iter().filter(|&&p| p != Pauli::I).count()
    }

    pub fn is_identity(&self) -> bool {
        self.ops.iter().all(|&p| p == Pauli::I)
    }

    /// Qubit-wise product modulo phase.
    pub fn mul(&self, other: &PauliString) -> Result<PauliString> {
        check_dim("Pauli string length", self.len(), other.len())?;
        Ok(PauliString {
            ops: self.ops.iter().zip(&other.ops).map(|(&a, &b)| a * b).collect(),
        })
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for p in &self.ops {
            write!(f, "{}", p.to_char())?;
        }
        Ok(())
    }
}

impl fmt::Debug for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PauliString({self})")
    }
}

impl FromStr for PauliString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let ops = s
            .trim()
            .chars()
            .map(|c| {
                Pauli::from_char(c.to_ascii_uppercase())
                    .ok_or_else(|| Error::InvalidParameter(format!("`{c}` is not a Pauli letter")))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(PauliString { ops })
    }
}

/// `(e_x | e_z)`, length `2n`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct SymplecticVec {
    bits: BitVec,
    n: usize,
}

impl SymplecticVec {
    pub fn from_bits(bits: BitVec) -> Result<Self> {
        if !bits.len().is_multiple_of(2) {
            return Err(Error::InvalidParameter(format!(
                "symplectic vector length {} is odd",
                bits.len()
            )));
        }
        let n = bits.len() / 2;
        Ok(Self { bits, n })
    }

    pub fn from_parts(e_x: &BitVec, e_z: &BitVec) -> Result<Self> {
        check_dim("e_z length", e_x.len(), e_z.len())?;
        Ok(Self {
            n: e_x.len(),
            bits: BitVec::concat(&[e_x, e_z]),
        })
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            bits: BitVec::zeros(2 * n),
            n,
        }
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn bits(&self) -> &BitVec {
        &self.bits
    }

    pub fn into_bits(self) -> BitVec {
        self.bits
    }

    pub fn x_part(&self) -> BitVec {
        self.bits.slice(0, self.n)
    }

    pub fn z_part(&self) -> BitVec {
        self.bits.slice(self.n, self.n)
    }

    /// `(e_z | e_x)`: the vector a stored `(H_x | H_z)` row must be dotted
    /// with to obtain a syndrome bit.
    pub fn swapped(&self) -> BitVec {
        BitVec::concat(&[&self.z_part(), &self.x_part()])
    }

    pub fn to_pauli(&self) -> PauliString {
        PauliString::new(
            (0..self.n)
                .map(|q| Pauli::from_xz(self.bits.get(q), self.bits.get(q + self.n)))
                .collect(),
        )
    }

    /// Sum over GF(2), i.e. the Pauli product modulo phase.
    pub fn add(&self, other: &SymplecticVec) -> Result<SymplecticVec> {
        check_dim("symplectic vector length", self.bits.len(), other.bits.len())?;
        let mut bits = self.bits.clone();
        bits.xor_assign(&other.bits);
        Ok(SymplecticVec { bits, n: self.n })
    }

    /// Symplectic inner product; `true` means the operators anticommute.
    pub fn symplectic_product(&self, other: &SymplecticVec) -> Result<bool> {
        check_dim("symplectic vector length", self.bits.len(), other.bits.len())?;
        Ok(self.bits.dot(&other.swapped()))
    }
}

/// `(e_x' | e_z' | e_y')`, length `3n`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct DecoupledVec {
    bits: BitVec,
    n: usize,
}

impl DecoupledVec {
    pub fn from_bits(bits: BitVec) -> Result<Self> {
        if !bits.len().is_multiple_of(3) {
            return Err(Error::InvalidParameter(format!(
                "decoupled vector length {} is not a multiple of 3",
                bits.len()
            )));
        }
        let n = bits.len() / 3;
        Ok(Self { bits, n })
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            bits: BitVec::zeros(3 * n),
            n,
        }
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn bits(&self) -> &BitVec {
        &self.bits
    }

    pub fn into_bits(self) -> BitVec {
        self.bits
    }

    /// Whether every qubit has at most one of its three bits set.
    pub fn is_one_hot(&self) -> bool {
        (0..self.n).all(|q| {
            u8::from(self.bits.get(q)) + u8::from(self.bits.get(q + self.n)) + u8::from(self.bits.get(q + 2 * self.n))
                <= 1
        })
    }

    /// Reads the vector as a Pauli string. Qubits with several bits set are
    /// interpreted as the product of the corresponding Paulis.
    pub fn to_pauli(&self) -> PauliString {
        decoupled_to_symplectic(self).to_pauli()
    }
}

/// Syndrome bits, one per stabilizer generator.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Syndrome(BitVec);

impl Syndrome {
    pub fn zeros(m: usize) -> Self {
        Syndrome(BitVec::zeros(m))
    }

    pub fn bits(&self) -> &BitVec {
        &self.0
    }

    pub fn into_bits(self) -> BitVec {
        self.0
    }
}

impl From<BitVec> for Syndrome {
    fn from(b: BitVec) -> Self {
        Syndrome(b)
    }
}

impl Deref for Syndrome {
    type Target = BitVec;

    fn deref(&self) -> &BitVec {
        &self.0
    }
}

pub fn pauli_to_decoupled(p: &PauliString) -> DecoupledVec {
    let n = p.len();
    let mut bits = BitVec::zeros(3 * n);
    for (q, op) in p.ops().iter().enumerate() {
        match op {
            Pauli::I => {}
            Pauli::X => bits.set(q, true),
            Pauli::Z => bits.set(q + n, true),
            Pauli::Y => bits.set(q + 2 * n, true),
        }
    }
    DecoupledVec { bits, n }
}

pub fn pauli_to_symplectic(p: &PauliString) -> SymplecticVec {
    let n = p.len();
    let mut bits = BitVec::zeros(2 * n);
    for (q, op) in p.ops().iter().enumerate() {
        if op.has_x() {
            bits.set(q, true);
        }
        if op.has_z() {
            bits.set(q + n, true);
        }
    }
    SymplecticVec { bits, n }
}

/// `e_x = e_x' + e_y'`, `e_z = e_z' + e_y'`. Total: inputs with several bits
/// per qubit map to the product of the corresponding Paulis.
pub fn decoupled_to_symplectic(d: &DecoupledVec) -> SymplecticVec {
    let n = d.n;
    let ex = d.bits.slice(0, n);
    let ez = d.bits.slice(n, n);
    let ey = d.bits.slice(2 * n, n);
    let mut x = ex;
    x.xor_assign(&ey);
    let mut z = ez;
    z.xor_assign(&ey);
    SymplecticVec {
        bits: BitVec::concat(&[&x, &z]),
        n,
    }
}

pub fn symplectic_to_decoupled(s: &SymplecticVec) -> DecoupledVec {
    let x = s.x_part();
    let z = s.z_part();
    let y = x.and(&z);
    DecoupledVec {
        bits: BitVec::concat(&[&x.and_not(&z), &z.and_not(&x), &y]),
        n: s.n,
    }
}

/// Syndrome of `e` against a stored `(H_x | H_z)` matrix:
/// `s = H_x e_z + H_z e_x (mod 2)`.
pub fn syndrome_symplectic(h: &BitMatrix, e: &SymplecticVec) -> Result<Syndrome> {
    check_dim("symplectic parity-check columns", 2 * e.n, h.cols())?;
    Ok(Syndrome(h.mul_vec(&e.swapped())?))
}

/// Syndrome of `e` against a decoupled parity-check matrix: `s = H_d e (mod 2)`.
pub fn syndrome_decoupled(h_d: &BitMatrix, e: &DecoupledVec) -> Result<Syndrome> {
    check_dim("decoupled parity-check columns", 3 * e.n, h_d.cols())?;
    Ok(Syndrome(h_d.mul_vec(&e.bits)?))
}

pub fn commutes(p: &PauliString, q: &PauliString) -> Result<bool> {
    check_dim("Pauli string length", p.len(), q.len())?;
    let odd = p
        .ops()
        .iter()
        .zip(q.ops())
        .filter(|(a, b)| (a.has_x() && b.has_z()) ^ (a.has_z() && b.has_x()))
        .count()
        % 2;
    Ok(odd == 0)
}
