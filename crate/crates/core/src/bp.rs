//! Log-domain binary belief propagation on a parity-check matrix.
//!
//! Three flavours share one flooding engine:
//!
//! * [`Flavor::Sbp`] decodes `(e_x | e_z)` against `(H_z | H_x)`.
//! * [`Flavor::Pdbp`] runs ordinary binary BP on the decoupled matrix `H_d`.
//! * [`Flavor::Fdbp`] runs on `H_d` but folds the one-bit-per-qubit
//!   restraint into the check update, the variable update and the hard
//!   decision.
//!
//! Columns whose prior is exactly zero are removed from the Tanner graph
//! before decoding; their posterior is reported as `+inf`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::bits::BitVec;
use crate::error::{check_dim, Error, Result};
use crate::gf2::BitMatrix;
use crate::noise::PriorVector;

pub const DEFAULT_LLR_CLAMP: f64 = 30.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Flavor {
    Sbp,
    Pdbp,
    Fdbp,
}

impl Flavor {
    pub const ALL: [Flavor; 3] = [Flavor::Sbp, Flavor::Pdbp, Flavor::Fdbp];

    pub fn as_str(self) -> &'static str {
        match self {
            Flavor::Sbp => "sbp",
            Flavor::Pdbp => "pdbp",
            Flavor::Fdbp => "fdbp",
        }
    }

    /// Bits per qubit in the representation this flavour decodes.
    pub fn bits_per_qubit(self) -> usize {
        match self {
            Flavor::Sbp => 2,
            Flavor::Pdbp | Flavor::Fdbp => 3,
        }
    }
}

impl fmt::Display for Flavor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Flavor {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "sbp" => Ok(Flavor::Sbp),
            "pdbp" => Ok(Flavor::Pdbp),
            "fdbp" => Ok(Flavor::Fdbp),
            other => Err(Error::InvalidParameter(format!("unknown decoder `{other}`"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum UpdateRule {
    MinSum,
    SumProduct,
}

impl UpdateRule {
    pub fn as_str(self) -> &'static str {
        match self {
            UpdateRule::MinSum => "min-sum",
            UpdateRule::SumProduct => "sum-product",
        }
    }
}

impl fmt::Display for UpdateRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for UpdateRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().replace('_', "-").as_str() {
            "min-sum" | "ms" => Ok(UpdateRule::MinSum),
            "sum-product" | "sp" => Ok(UpdateRule::SumProduct),
            other => Err(Error::InvalidParameter(format!("unknown update rule `{other}`"))),
        }
    }
}

/// Which partner priors enter the FDBP variable-node correction
/// `-ln(1 - p_partner)` for an edge `(j, i)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CorrectionScope {
    /// Both other columns of the qubit, on every edge.
    #[default]
    AllPartners,
    /// Only the partner columns that also sit in check `j`.
    CheckPartners,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BpConfig {
    pub flavor: Flavor,
    pub rule: UpdateRule,
    pub iter_max: usize,
    pub llr_clamp: f64,
    /// Stop at the first iteration whose hard decision reproduces the
    /// syndrome. Disable to always run `iter_max` iterations.
    pub early_stop: bool,
    pub correction: CorrectionScope,
}

impl BpConfig {
    pub fn new(flavor: Flavor, rule: UpdateRule, iter_max: usize) -> Self {
        Self {
            flavor,
            rule,
            iter_max,
            llr_clamp: DEFAULT_LLR_CLAMP,
            early_stop: true,
            correction: CorrectionScope::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.iter_max == 0 {
            return Err(Error::InvalidParameter("iter_max must be at least 1".into()));
        }
        if !(self.llr_clamp > 0.0 && self.llr_clamp.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "llr_clamp must be positive and finite, got {}",
                self.llr_clamp
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DecodeOutcome {
    pub converged: bool,
    pub estimate: BitVec,
    /// Posterior LLRs of the last iteration, one per column.
    pub posteriors: Vec<f64>,
    pub iterations: usize,
}

/// Read-only view of the decoder after the hard decision of one iteration.
///
/// Edge-indexed slices follow [`BpDecoder::edges`].
#[derive(Debug)]
pub struct BpState<'a> {
    pub iteration: usize,
    pub var_to_check: &'a [f64],
    pub check_to_var: &'a [f64],
    pub posteriors: &'a [f64],
    pub hard_decision: &'a [bool],
    pub syndrome_matches: bool,
}

#[inline]
fn sanitize(v: f64, clamp: f64) -> f64 {
    if v.is_nan() {
        0.0
    } else {
        v.clamp(-clamp, clamp)
    }
}

#[inline]
fn sign_of(s: bool) -> f64 {
    if s {
        -1.0
    } else {
        1.0
    }
}

/// Min-sum check update: `(-1)^s * prod sign * min |m|` over the other
/// incoming messages. An empty neighbourhood gives `(-1)^s * clamp`.
pub fn horizontal_min_sum(incoming: &[f64], s: bool, clamp: f64, out: &mut [f64]) {
    debug_assert_eq!(incoming.len(), out.len());
    let mut negative = s;
    let (mut min1, mut min2, mut arg) = (f64::INFINITY, f64::INFINITY, usize::MAX);
    for (k, &m) in incoming.iter().enumerate() {
        negative ^= m < 0.0;
        let a = m.abs();
        if a < min1 {
            min2 = min1;
            min1 = a;
            arg = k;
        } else if a < min2 {
            min2 = a;
        }
    }
    for (k, (o, &m)) in out.iter_mut().zip(incoming).enumerate() {
        let mag = if k == arg { min2 } else { min1 };
        let v = if mag.is_finite() { mag } else { clamp };
        *o = sanitize(if negative ^ (m < 0.0) { -v } else { v }, clamp);
    }
}

/// Sum-product check update:
/// `(-1)^s * ln[(1 + prod tanh(m/2)) / (1 - prod tanh(m/2))]`.
pub fn horizontal_sum_product(incoming: &[f64], s: bool, clamp: f64, out: &mut [f64]) {
    horizontal_fdbp(
        UpdateRule::SumProduct,
        incoming,
        &[0; 64][..incoming.len()],
        s,
        clamp,
        out,
    );
}

/// FDBP check update. `partners[k]` is a bitmask over local positions of
/// the check: the columns belonging to the same qubit as position `k`.
/// With every mask zero this is the ordinary update of `rule`.
pub fn horizontal_fdbp(rule: UpdateRule, incoming: &[f64], partners: &[u64], s: bool, clamp: f64, out: &mut [f64]) {
    let d = incoming.len();
    assert!(d <= 64, "check degree {d} exceeds 64");
    debug_assert_eq!(partners.len(), d);
    debug_assert_eq!(out.len(), d);
    let mut t = [0.0f64; 64];
    let mut all = 1.0;
    let mut divisible = true;
    for (tk, &m) in t.iter_mut().zip(incoming) {
        *tk = (0.5 * m).tanh();
        all *= *tk;
        divisible &= tk.abs() >= 1e-100;
    }
    let full = if d == 64 { u64::MAX } else { (1u64 << d) - 1 };
    let prod = |skip: u64| -> f64 {
        if skip & full == full {
            return 1.0;
        }
        if divisible {
            let mut p = all;
            let mut rest = skip;
            while rest != 0 {
                p /= t[rest.trailing_zeros() as usize];
                rest &= rest - 1;
            }
            return p.clamp(-1.0, 1.0);
        }
        let mut p = 1.0;
        for (k, &tk) in t[..d].iter().enumerate() {
            if skip >> k & 1 == 0 {
                p *= tk;
            }
        }
        p
    };
    // three smallest magnitudes, enough to skip any two positions
    let mut best = [(f64::INFINITY, usize::MAX); 3];
    let mut negative_all = false;
    for (k, &m) in incoming.iter().enumerate() {
        negative_all ^= m < 0.0;
        let a = m.abs();
        if a < best[2].0 {
            best[2] = (a, k);
            if best[2].0 < best[1].0 {
                best.swap(1, 2);
                if best[1].0 < best[0].0 {
                    best.swap(0, 1);
                }
            }
        }
    }
    // signed min-sum value over positions not in `skip`
    let min_sum = |skip: u64| -> f64 {
        let negative = negative_all ^ (masked_negatives(incoming, skip) & 1 == 1);
        let min = if skip.count_ones() <= 2 {
            best.iter()
                .find(|(_, k)| *k == usize::MAX || skip >> k & 1 == 0)
                .map_or(f64::INFINITY, |b| b.0)
        } else {
            incoming
                .iter()
                .enumerate()
                .filter(|(k, _)| skip >> k & 1 == 0)
                .fold(f64::INFINITY, |acc, (_, m)| acc.min(m.abs()))
        };
        let v = if min.is_finite() { min } else { clamp };
        if negative {
            -v
        } else {
            v
        }
    };
    let sigma = sign_of(s);
    for k in 0..d {
        let skip = 1u64 << k;
        let skip_red = skip | partners[k];
        let v = match rule {
            UpdateRule::SumProduct => {
                let tt = prod(skip);
                let tr = if partners[k] == 0 { tt } else { prod(skip_red) };
                ((1.0 + sigma * tt) / (1.0 - sigma * tr)).ln()
            }
            UpdateRule::MinSum if partners[k] == 0 => sigma * min_sum(skip),
            UpdateRule::MinSum => {
                let tt = prod(skip);
                if s && skip_red & full == full {
                    // nothing left besides i and its partners: both forms agree
                    ((1.0 - tt) / 2.0).ln()
                } else {
                    let tr = prod(skip_red);
                    let corr = ((1.0 - tt) / (1.0 - tr)).ln();
                    let base = if s { -min_sum(skip_red) } else { min_sum(skip) };
                    base + corr
                }
            }
        };
        out[k] = sanitize(v, clamp);
    }
}

fn masked_negatives(incoming: &[f64], mask: u64) -> u32 {
    let mut count = 0;
    let mut rest = mask;
    while rest != 0 {
        count += (incoming[rest.trailing_zeros() as usize] < 0.0) as u32;
        rest &= rest - 1;
    }
    count
}

/// Variable-to-check message towards the check at position `exclude`:
/// `gamma + sum over the other checks of (m - correction)`.
pub fn vertical_message(gamma: f64, incoming: &[f64], corrections: &[f64], exclude: usize, clamp: f64) -> f64 {
    let mut acc = gamma;
    for (k, (&m, &c)) in incoming.iter().zip(corrections).enumerate() {
        if k != exclude {
            acc += m - c;
        }
    }
    sanitize(acc, clamp)
}

/// FDBP per-qubit decision on the posterior triple `(X, Z, Y)`: `None` when
/// all three are non-negative, else the index of the smallest (lowest index
/// on ties).
pub fn fdbp_hard_decision(triple: [f64; 3]) -> Option<usize> {
    if triple.iter().all(|&g| g >= 0.0) {
        return None;
    }
    let mut best = 0;
    for k in 1..3 {
        if triple[k] < triple[best] {
            best = k;
        }
    }
    Some(best)
}

/// A decoder bound to one matrix and one prior vector.
///
/// Construction prunes zero-prior columns and lays out edges check-major;
/// [`BpDecoder::decode`] then only allocates its message buffers. The
/// decoder is immutable and can be shared across threads.
#[derive(Clone, Debug)]
pub struct BpDecoder {
    cfg: BpConfig,
    rows: usize,
    cols: usize,
    gamma: Vec<f64>,
    check_ptr: Vec<usize>,
    edge_var: Vec<usize>,
    edge_partners: Vec<u64>,
    edge_corr: Vec<f64>,
    var_ptr: Vec<usize>,
    var_edges: Vec<usize>,
    live_vars: Vec<usize>,
}

impl BpDecoder {
    pub fn new(h: &BitMatrix, priors: &PriorVector, cfg: BpConfig) -> Result<Self> {
        cfg.validate()?;
        let cols = h.cols();
        check_dim("prior vector", cols, priors.len())?;
        let per = cfg.flavor.bits_per_qubit();
        if !cols.is_multiple_of(per) {
            return Err(Error::InvalidParameter(format!(
                "{} needs a column count divisible by {per}, got {cols}",
                cfg.flavor
            )));
        }
        let p = priors.as_slice();
        let mut gamma = vec![f64::INFINITY; cols];
        for (i, &pi) in p.iter().enumerate() {
            if pi > 0.0 {
                let g = ((1.0 - pi) / pi).ln();
                if !g.is_finite() {
                    return Err(Error::NonFinitePrior { column: i, p: pi });
                }
                gamma[i] = g;
            }
        }
        let live = |i: usize| gamma[i].is_finite();

        let rows = h.rows();
        let mut check_ptr = Vec::with_capacity(rows + 1);
        let mut edge_var = Vec::with_capacity(h.nnz());
        check_ptr.push(0);
        for j in 0..rows {
            edge_var.extend(h.row_support(j).iter().copied().filter(|&i| live(i)));
            check_ptr.push(edge_var.len());
        }

        let n = cols / per;
        let fdbp = cfg.flavor == Flavor::Fdbp;
        let partner_cols = |i: usize| [(i + n) % cols, (i + 2 * n) % cols];
        let mut edge_partners = vec![0u64; edge_var.len()];
        let mut edge_corr = vec![0.0; edge_var.len()];
        if fdbp {
            for j in 0..rows {
                let range = check_ptr[j]..check_ptr[j + 1];
                let vars = &edge_var[range.clone()];
                if vars.len() > 64 {
                    return Err(Error::InvalidParameter(format!(
                        "check {j} has degree {} (limit 64)",
                        vars.len()
                    )));
                }
                for (k, &i) in vars.iter().enumerate() {
                    let pc = partner_cols(i);
                    let mut mask = 0u64;
                    for (k2, &i2) in vars.iter().enumerate() {
                        if pc.contains(&i2) {
                            mask |= 1 << k2;
                        }
                    }
                    let corr = match cfg.correction {
                        CorrectionScope::AllPartners => pc.iter().map(|&q| (-p[q]).ln_1p()).sum(),
                        CorrectionScope::CheckPartners => {
                            pc.iter().filter(|q| vars.contains(q)).map(|&q| (-p[q]).ln_1p()).sum()
                        }
                    };
                    edge_partners[range.start + k] = mask;
                    edge_corr[range.start + k] = corr;
                }
            }
        }

        let mut degree = vec![0usize; cols];
        for &i in &edge_var {
            degree[i] += 1;
        }
        let mut var_ptr = Vec::with_capacity(cols + 1);
        var_ptr.push(0);
        for i in 0..cols {
            var_ptr.push(var_ptr[i] + degree[i]);
        }
        let mut fill = var_ptr.clone();
        let mut var_edges = vec![0; edge_var.len()];
        for (e, &i) in edge_var.iter().enumerate() {
            var_edges[fill[i]] = e;
            fill[i] += 1;
        }
        let live_vars = (0..cols).filter(|&i| live(i)).collect();

        Ok(Self {
            cfg,
            rows,
            cols,
            gamma,
            check_ptr,
            edge_var,
            edge_partners,
            edge_corr,
            var_ptr,
            var_edges,
            live_vars,
        })
    }

    pub fn config(&self) -> &BpConfig {
        &self.cfg
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Prior LLRs; pruned columns are `+inf`.
    pub fn priors_llr(&self) -> &[f64] {
        &self.gamma
    }

    /// `(check, column)` for every edge of the pruned graph, check-major.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        (0..self.rows)
            .flat_map(|j| (self.check_ptr[j]..self.check_ptr[j + 1]).map(move |e| (j, e)))
            .map(|(j, e)| (j, self.edge_var[e]))
            .collect()
    }

    /// Correction term subtracted from each check message at the variable
    /// node, per edge. Zero except for FDBP.
    pub fn edge_corrections(&self) -> &[f64] {
        &self.edge_corr
    }

    pub fn decode(&self, syndrome: &BitVec) -> Result<DecodeOutcome> {
        self.decode_observed(syndrome, |_| {})
    }

    /// Like [`decode`](Self::decode), calling `observer` after the hard
    /// decision of every iteration.
    pub fn decode_observed<F>(&self, syndrome: &BitVec, mut observer: F) -> Result<DecodeOutcome>
    where
        F: FnMut(&BpState<'_>),
    {
        check_dim("syndrome", self.rows, syndrome.len())?;
        let clamp = self.cfg.llr_clamp;
        let edges = self.edge_var.len();
        let s: Vec<bool> = (0..self.rows).map(|j| syndrome.get(j)).collect();

        let mut v2c: Vec<f64> = self.edge_var.iter().map(|&i| sanitize(self.gamma[i], clamp)).collect();
        let mut c2v = vec![0.0; edges];
        let mut post = self.gamma.clone();
        let mut hard = vec![false; self.cols];
        let mut converged = false;
        let mut iterations = 0;

        for it in 1..=self.cfg.iter_max {
            iterations = it;
            self.horizontal(&s, &v2c, &mut c2v);
            self.vertical(&c2v, &mut v2c, &mut post);
            self.hard_decision(&post, &mut hard);
            converged = self.satisfies(&s, &hard);
            observer(&BpState {
                iteration: it,
                var_to_check: &v2c,
                check_to_var: &c2v,
                posteriors: &post,
                hard_decision: &hard,
                syndrome_matches: converged,
            });
            if converged && self.cfg.early_stop {
                break;
            }
        }

        Ok(DecodeOutcome {
            converged,
            estimate: BitVec::from_bools(&hard),
            posteriors: post,
            iterations,
        })
    }

    fn horizontal(&self, s: &[bool], v2c: &[f64], c2v: &mut [f64]) {
        let clamp = self.cfg.llr_clamp;
        for (j, &sj) in s.iter().enumerate() {
            let r = self.check_ptr[j]..self.check_ptr[j + 1];
            if r.is_empty() {
                continue;
            }
            let (inc, out) = (&v2c[r.clone()], &mut c2v[r.clone()]);
            match (self.cfg.flavor, self.cfg.rule) {
                (Flavor::Fdbp, rule) => horizontal_fdbp(rule, inc, &self.edge_partners[r], sj, clamp, out),
                (_, UpdateRule::MinSum) => horizontal_min_sum(inc, sj, clamp, out),
                (_, UpdateRule::SumProduct) => {
                    horizontal_fdbp(UpdateRule::SumProduct, inc, &self.edge_partners[r], sj, clamp, out)
                }
            }
        }
    }

    fn vertical(&self, c2v: &[f64], v2c: &mut [f64], post: &mut [f64]) {
        let clamp = self.cfg.llr_clamp;
        for &i in &self.live_vars {
            let es = &self.var_edges[self.var_ptr[i]..self.var_ptr[i + 1]];
            let mut total = self.gamma[i];
            for &e in es {
                total += c2v[e] - self.edge_corr[e];
            }
            post[i] = if total.is_nan() { 0.0 } else { total };
            for &e in es {
                v2c[e] = sanitize(total - (c2v[e] - self.edge_corr[e]), clamp);
            }
        }
    }

    fn hard_decision(&self, post: &[f64], hard: &mut [bool]) {
        match self.cfg.flavor {
            Flavor::Sbp | Flavor::Pdbp => {
                for (h, &g) in hard.iter_mut().zip(post) {
                    *h = g < 0.0;
                }
            }
            Flavor::Fdbp => {
                let n = self.cols / 3;
                for q in 0..n {
                    let pick = fdbp_hard_decision([post[q], post[q + n], post[q + 2 * n]]);
                    for k in 0..3 {
                        hard[q + k * n] = pick == Some(k);
                    }
                }
            }
        }
    }

    fn satisfies(&self, s: &[bool], hard: &[bool]) -> bool {
        (0..self.rows).all(|j| {
            let parity = self.edge_var[self.check_ptr[j]..self.check_ptr[j + 1]]
                .iter()
                .fold(false, |acc, &i| acc ^ hard[i]);
            parity == s[j]
        })
    }
}

/// One-shot convenience wrapper around [`BpDecoder`].
pub fn decode(h: &BitMatrix, priors: &PriorVector, s: &BitVec, cfg: BpConfig) -> Result<DecodeOutcome> {
    BpDecoder::new(h, priors, cfg)?.decode(s)
}
