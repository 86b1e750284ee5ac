//! Stabilizer code construction: surface-code families, generator files,
//! decoupled parity-check matrices and logical operator bases.

use std::io::BufRead;
use std::path::Path;

use crate::error::{Error, Result};
use crate::gf2::{BitMatrix, SpanBasis};
use crate::pauli::{pauli_to_symplectic, Pauli, PauliString, SymplecticVec};

/// A validated `[[n, k]]` stabilizer code.
#[derive(Clone, Debug)]
pub struct StabilizerCode {
    name: String,
    n: usize,
    k: usize,
    generators: Vec<PauliString>,
    /// `(H_x | H_z)`
    h: BitMatrix,
    /// `(H_z | H_x)`: the matrix whose product with `(e_x | e_z)` is the syndrome.
    h_check: BitMatrix,
    /// `(H_z | H_x | H_x + H_z)`
    h_d: BitMatrix,
    /// `(X̄_1, Z̄_1, X̄_2, Z̄_2, ...)`
    logicals: Vec<PauliString>,
}

impl StabilizerCode {
    /// Validates the generators (equal lengths, pairwise commuting, linearly
    /// independent) and derives every matrix and the logical basis.
    pub fn from_generators(name: impl Into<String>, generators: Vec<PauliString>) -> Result<Self> {
        let n = generators
            .first()
            .map(PauliString::len)
            .ok_or_else(|| Error::InvalidCode("a code needs at least one generator".into()))?;
        if let Some(bad) = generators.iter().find(|g| g.len() != n) {
            return Err(Error::InvalidCode(format!(
                "generator `{bad}` has length {} instead of {n}",
                bad.len()
            )));
        }
        let h = symplectic_matrix(n, &generators);
        let h_check = BitMatrix::hstack(&[&h.column_block(n, n), &h.column_block(0, n)])?;
        for a in 0..generators.len() {
            for b in a + 1..generators.len() {
                if h_check.row(a).dot(h.row(b)) {
                    return Err(Error::InvalidCode(format!(
                        "generators {a} (`{}`) and {b} (`{}`) anticommute",
                        generators[a], generators[b]
                    )));
                }
            }
        }
        let rank = h.rank();
        if rank != generators.len() {
            return Err(Error::InvalidCode(format!(
                "generators are dependent: rank {rank} < {}",
                generators.len()
            )));
        }
        let k = n - generators.len();
        let h_d = build_decoupled_matrix(&h)?;
        let logicals = extract_logicals(&h)?;
        debug_assert_eq!(logicals.len(), 2 * k);
        Ok(Self {
            name: name.into(),
            n,
            k,
            generators,
            h,
            h_check,
            h_d,
            logicals,
        })
    }

    /// Reads one Pauli word per line (`I`, `X`, `Y`, `Z`); blank lines and
    /// lines starting with `#` are skipped.
    pub fn read_generators<R: BufRead>(name: impl Into<String>, reader: R) -> Result<Self> {
        let mut gens = Vec::new();
        for (idx, line) in reader.lines().enumerate() {
            let line = line?;
            let t = line.trim();
            if t.is_empty() || t.starts_with('#') {
                continue;
            }
            let p: PauliString = t.parse().map_err(|e: Error| Error::Parse {
                line: idx + 1,
                msg: e.to_string(),
            })?;
            gens.push(p);
        }
        Self::from_generators(name, gens)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let file = std::fs::File::open(path)?;
        Self::read_generators(path.display().to_string(), std::io::BufReader::new(file))
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// Physical qubit count.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Logical qubit count.
    pub fn k(&self) -> usize {
        self.k
    }

    /// Number of stabilizer generators, `n - k`.
    pub fn m(&self) -> usize {
        self.generators.len()
    }

    pub fn generators(&self) -> &[PauliString] {
        &self.generators
    }

    /// `(H_x | H_z)`.
    pub fn h(&self) -> &BitMatrix {
        &self.h
    }

    /// `(H_z | H_x)`, the matrix symplectic BP decodes against.
    pub fn h_check(&self) -> &BitMatrix {
        &self.h_check
    }

    /// `(H_z | H_x | H_x + H_z)`.
    pub fn h_d(&self) -> &BitMatrix {
        &self.h_d
    }

    /// Logical operators ordered `X̄_1, Z̄_1, X̄_2, Z̄_2, ...`.
    pub fn logicals(&self) -> &[PauliString] {
        &self.logicals
    }
}

fn symplectic_matrix(n: usize, generators: &[PauliString]) -> BitMatrix {
    let rows = generators.iter().map(|g| pauli_to_symplectic(g).into_bits()).collect();
    BitMatrix::from_dense_rows(2 * n, rows)
}

/// `(H_x | H_z) -> (H_z | H_x | H_x + H_z)`.
pub fn build_decoupled_matrix(h: &BitMatrix) -> Result<BitMatrix> {
    if !h.cols().is_multiple_of(2) {
        return Err(Error::InvalidParameter(format!(
            "symplectic matrix has an odd column count {}",
            h.cols()
        )));
    }
    let n = h.cols() / 2;
    let hx = h.column_block(0, n);
    let hz = h.column_block(n, n);
    let hy = hx.xor(&hz)?;
    BitMatrix::hstack(&[&hz, &hx, &hy])
}

/// A symplectic basis of the normalizer modulo the stabilizer: returns
/// `2k` operators `X̄_1, Z̄_1, ...` with `X̄_l`, `Z̄_l` anticommuting and every
/// other pair commuting. `h` is the stored `(H_x | H_z)` matrix and must have
/// full row rank.
pub fn extract_logicals(h: &BitMatrix) -> Result<Vec<PauliString>> {
    if !h.cols().is_multiple_of(2) {
        return Err(Error::InvalidParameter("odd column count".into()));
    }
    let n = h.cols() / 2;
    let rank = h.rank();
    if rank != h.rows() {
        return Err(Error::RankDeficient {
            rank,
            expected: h.rows(),
        });
    }
    let k = n - rank;

    // v is in the normalizer iff (H_z | H_x) v = 0
    let h_check = BitMatrix::hstack(&[&h.column_block(n, n), &h.column_block(0, n)])?;
    let normalizer = h_check.kernel_basis();

    let mut span = SpanBasis::new();
    for r in h.dense_rows() {
        span.insert(r);
    }
    let mut reps: Vec<SymplecticVec> = Vec::with_capacity(2 * k);
    for v in &normalizer {
        if span.insert(v) {
            reps.push(SymplecticVec::from_bits(v.clone())?);
        }
    }
    if reps.len() != 2 * k {
        return Err(Error::InvalidCode(format!(
            "found {} logical representatives, expected {}",
            reps.len(),
            2 * k
        )));
    }

    let mut out = Vec::with_capacity(2 * k);
    while let Some(a) = reps.pop() {
        let partner = reps
            .iter()
            .position(|b| a.symplectic_product(b).unwrap_or(false))
            .ok_or_else(|| Error::InvalidCode("logical space is degenerate".into()))?;
        let b = reps.swap_remove(partner);
        for r in reps.iter_mut() {
            let mut v = r.clone();
            if r.symplectic_product(&b)? {
                v = v.add(&a)?;
            }
            if r.symplectic_product(&a)? {
                v = v.add(&b)?;
            }
            *r = v;
        }
        out.push(a.to_pauli());
        out.push(b.to_pauli());
    }
    Ok(out)
}

/// Open-boundary planar surface code with `L² + (L-1)²` qubits.
///
/// Qubits sit at the sites `(r, c)` of a `(2L-1) x (2L-1)` grid with `r + c`
/// even and are numbered row-major. Sites with `r` even and `c` odd carry
/// X-type checks, sites with `r` odd and `c` even carry Z-type checks; each
/// check acts on its in-grid horizontal and vertical neighbours.
pub fn build_planar_surface(l: usize) -> Result<StabilizerCode> {
    if l < 2 {
        return Err(Error::InvalidParameter(format!(
            "lattice size must be at least 2, got {l}"
        )));
    }
    let size = 2 * l - 1;
    let mut index = vec![usize::MAX; size * size];
    let mut n = 0;
    for r in 0..size {
        for c in 0..size {
            if (r + c) % 2 == 0 {
                index[r * size + c] = n;
                n += 1;
            }
        }
    }
    let mut gens = Vec::with_capacity(n - 1);
    for r in 0..size {
        for c in 0..size {
            if (r + c) % 2 == 0 {
                continue;
            }
            let op = if r % 2 == 0 { Pauli::X } else { Pauli::Z };
            let mut entries = Vec::with_capacity(4);
            let (ri, ci) = (r as isize, c as isize);
            for (dr, dc) in [(-1, 0), (0, -1), (0, 1), (1, 0)] {
                let (nr, nc) = (ri + dr, ci + dc);
                if nr >= 0 && nc >= 0 && (nr as usize) < size && (nc as usize) < size {
                    entries.push((index[nr as usize * size + nc as usize], op));
                }
            }
            gens.push(PauliString::from_sparse(n, &entries));
        }
    }
    StabilizerCode::from_generators(format!("planar-L{l}"), gens)
}

/// Rotated XZZX surface code on an `L x L` grid of qubits (row-major).
///
/// Every bulk face carries `X` on its top-left and bottom-right corners and
/// `Z` on the other two, so reading the corners row-major gives `X Z Z X`.
/// Boundary faces contribute weight-2 checks, alternating along each edge.
pub fn build_xzzx_surface(l: usize) -> Result<StabilizerCode> {
    if l < 2 {
        return Err(Error::InvalidParameter(format!(
            "lattice size must be at least 2, got {l}"
        )));
    }
    let n = l * l;
    let li = l as isize;
    let qubit =
        |r: isize, c: isize| -> Option<usize> { (r >= 0 && c >= 0 && r < li && c < li).then(|| (r * li + c) as usize) };
    let mut gens = Vec::with_capacity(n - 1);
    // face (r, c) has corners (r, c), (r, c+1), (r+1, c), (r+1, c+1)
    for r in -1..li {
        for c in -1..li {
            let interior_r = r >= 0 && r < li - 1;
            let interior_c = c >= 0 && c < li - 1;
            // checkerboard type of the underlying CSS rotated code
            let x_type = (r + c).rem_euclid(2) == 0;
            let keep = match (interior_r, interior_c) {
                (true, true) => true,
                // top/bottom boundaries keep X-type faces, left/right keep Z-type
                (false, true) => x_type,
                (true, false) => !x_type,
                (false, false) => false,
            };
            if !keep {
                continue;
            }
            let corners = [
                (r, c, Pauli::X),
                (r, c + 1, Pauli::Z),
                (r + 1, c, Pauli::Z),
                (r + 1, c + 1, Pauli::X),
            ];
            let entries: Vec<(usize, Pauli)> = corners
                .iter()
                .filter_map(|&(qr, qc, op)| qubit(qr, qc).map(|q| (q, op)))
                .collect();
            gens.push(PauliString::from_sparse(n, &entries));
        }
    }
    StabilizerCode::from_generators(format!("xzzx-L{l}"), gens)
}

/// Number of ones among columns `i`, `i+n`, `i+2n` of row `j` of a
/// decoupled matrix.
pub fn triple_weight(h_d: &BitMatrix, j: usize, qubit: usize) -> usize {
    let n = h_d.cols() / 3;
    (0..3).filter(|&b| h_d.get(j, qubit + b * n)).count()
}

/// Whether `v` lies in the row space of the stored `(H_x | H_z)` matrix.
pub fn in_stabilizer_group(code: &StabilizerCode, v: &SymplecticVec) -> bool {
    let mut span = SpanBasis::new();
    for r in code.h().dense_rows() {
        span.insert(r);
    }
    span.contains(v.bits())
}
