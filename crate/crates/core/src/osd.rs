//! Order-0 ordered statistics decoding and the BP+OSD pipeline.

use crate::bits::BitVec;
use crate::bp::{BpConfig, BpDecoder, DecodeOutcome};
use crate::error::{check_dim, Error, Result};
use crate::gf2::{row_reduce, solve_on_pivots, BitMatrix};
use crate::noise::PriorVector;

/// Column indices sorted by ascending posterior LLR, ties by index.
pub fn reliability_order(posteriors: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..posteriors.len()).collect();
    order.sort_by(|&a, &b| posteriors[a].total_cmp(&posteriors[b]).then(a.cmp(&b)));
    order
}

/// Solves `H e = s` on the first `m` independent columns taken from least
/// to most reliable and zero-fills every other column.
pub fn osd0(h: &BitMatrix, s: &BitVec, posteriors: &[f64]) -> Result<BitVec> {
    check_dim("posterior vector", h.cols(), posteriors.len())?;
    check_dim("syndrome", h.rows(), s.len())?;
    let record = row_reduce(h, &reliability_order(posteriors));
    if record.rank() != h.rows() {
        return Err(Error::RankDeficient {
            rank: record.rank(),
            expected: h.rows(),
        });
    }
    solve_on_pivots(&record, s)
}

#[derive(Clone, Debug, PartialEq)]
pub struct BpOsdOutcome {
    pub estimate: BitVec,
    pub bp: DecodeOutcome,
    pub osd_used: bool,
}

/// BP followed by OSD-0 on the last posteriors whenever BP does not
/// reproduce the syndrome.
#[derive(Clone, Debug)]
pub struct BpOsdDecoder {
    h: BitMatrix,
    bp: BpDecoder,
}

impl BpOsdDecoder {
    pub fn new(h: &BitMatrix, priors: &PriorVector, cfg: BpConfig) -> Result<Self> {
        let bp = BpDecoder::new(h, priors, cfg)?;
        let rank = h.rank();
        if rank != h.rows() {
            return Err(Error::RankDeficient {
                rank,
                expected: h.rows(),
            });
        }
        Ok(Self { h: h.clone(), bp })
    }

    pub fn bp(&self) -> &BpDecoder {
        &self.bp
    }

    pub fn matrix(&self) -> &BitMatrix {
        &self.h
    }

    pub fn decode(&self, s: &BitVec) -> Result<BpOsdOutcome> {
        let bp = self.bp.decode(s)?;
        if bp.converged {
            return Ok(BpOsdOutcome {
                estimate: bp.estimate.clone(),
                bp,
                osd_used: false,
            });
        }
        let estimate = osd0(&self.h, s, &bp.posteriors)?;
        Ok(BpOsdOutcome {
            estimate,
            bp,
            osd_used: true,
        })
    }
}

/// One-shot BP+OSD on `h` (the flavour's matrix: `(H_z | H_x)` for SBP,
/// `H_d` otherwise).
pub fn decode_with_osd(h: &BitMatrix, priors: &PriorVector, s: &BitVec, cfg: BpConfig) -> Result<BpOsdOutcome> {
    BpOsdDecoder::new(h, priors, cfg)?.decode(s)
}
