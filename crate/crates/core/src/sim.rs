//! Monte Carlo logical-error-rate estimation.
//!
//! Every trial draws its error from [`trial_rng`]`(seed, index)`, so a point
//! is a pure function of `(code, noise, config, trials, seed)` and is the
//! same for any thread count. Points in one sweep share the seed, which
//! gives correlated samples across `p` and across decoders.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bits::BitVec;
use crate::bp::{BpConfig, Flavor};
use crate::code::StabilizerCode;
use crate::error::{check_dim, Error, Result};
use crate::gf2::BitMatrix;
use crate::noise::{decoupled_priors, sample_error, symplectic_priors, trial_rng, NoiseModel};
use crate::osd::BpOsdDecoder;
use crate::pauli::{decoupled_to_symplectic, pauli_to_symplectic, DecoupledVec, PauliString, SymplecticVec};

/// Two-sided 95% normal quantile.
pub const Z95: f64 = 1.959964;

/// Wilson score interval `(low, high)` at 95%.
pub fn wilson_interval(failures: u64, trials: u64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = failures as f64 / n;
    let z2 = Z95 * Z95;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = Z95 / denom * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    ((center - half).max(0.0), (center + half).min(1.0))
}

/// Half-width of the Wilson interval.
pub fn wilson_half_width(failures: u64, trials: u64) -> f64 {
    let (lo, hi) = wilson_interval(failures, trials);
    0.5 * (hi - lo)
}

/// Symplectic-product test against a fixed operator set.
#[derive(Clone, Debug)]
pub struct LogicalChecker {
    swapped: Vec<BitVec>,
}

impl LogicalChecker {
    pub fn new(code: &StabilizerCode) -> Self {
        let swapped = code
            .logicals()
            .iter()
            .map(|l| pauli_to_symplectic(l).swapped())
            .collect();
        Self { swapped }
    }

    /// Whether `r` anticommutes with some logical.
    pub fn acts_logically(&self, r: &SymplecticVec) -> bool {
        self.swapped.iter().any(|l| l.dot(r.bits()))
    }
}

/// `true` when `e * e_hat` is a nontrivial logical operator.
///
/// Errors with [`Error::SyndromeMismatch`] if the two operators do not share
/// a syndrome.
pub fn logical_failure(code: &StabilizerCode, e: &PauliString, e_hat: &PauliString) -> Result<bool> {
    check_dim("error length", code.n(), e.len())?;
    check_dim("correction length", code.n(), e_hat.len())?;
    let r = pauli_to_symplectic(e).add(&pauli_to_symplectic(e_hat))?;
    if !code.h_check().mul_vec(r.bits())?.is_zero() {
        return Err(Error::SyndromeMismatch);
    }
    Ok(LogicalChecker::new(code).acts_logically(&r))
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrialRecord {
    pub seed: u64,
    pub index: u64,
    pub error: PauliString,
    pub correction: PauliString,
    pub bp_converged: bool,
    pub osd_used: bool,
    pub iterations: usize,
    /// The flavour's raw estimate (`2n` or `3n` bits).
    pub raw_estimate: BitVec,
    pub logical_failure: bool,
}

/// Everything needed to run trials of one `(code, noise, config)` triple.
#[derive(Clone, Debug)]
pub struct TrialRunner<'a> {
    code: &'a StabilizerCode,
    noise: NoiseModel,
    cfg: BpConfig,
    decoder: BpOsdDecoder,
    logicals: LogicalChecker,
}

impl<'a> TrialRunner<'a> {
    pub fn new(code: &'a StabilizerCode, noise: NoiseModel, cfg: BpConfig) -> Result<Self> {
        let n = code.n();
        let (h, priors): (&BitMatrix, _) = match cfg.flavor {
            Flavor::Sbp => (code.h_check(), symplectic_priors(&noise, n)),
            Flavor::Pdbp | Flavor::Fdbp => (code.h_d(), decoupled_priors(&noise, n)),
        };
        let decoder = BpOsdDecoder::new(h, &priors, cfg)?;
        Ok(Self {
            code,
            noise,
            cfg,
            decoder,
            logicals: LogicalChecker::new(code),
        })
    }

    pub fn code(&self) -> &StabilizerCode {
        self.code
    }

    pub fn noise(&self) -> &NoiseModel {
        &self.noise
    }

    pub fn config(&self) -> &BpConfig {
        &self.cfg
    }

    pub fn decoder(&self) -> &BpOsdDecoder {
        &self.decoder
    }

    /// Decodes the syndrome of `error` and classifies the outcome.
    pub fn run_error(&self, error: &PauliString, seed: u64, index: u64) -> Result<TrialRecord> {
        let e = pauli_to_symplectic(error);
        let s = self.code.h_check().mul_vec(e.bits())?;
        let out = self.decoder.decode(&s)?;
        let e_hat = match self.cfg.flavor {
            Flavor::Sbp => SymplecticVec::from_bits(out.estimate.clone())?,
            Flavor::Pdbp | Flavor::Fdbp => decoupled_to_symplectic(&DecoupledVec::from_bits(out.estimate.clone())?),
        };
        let r = e.add(&e_hat)?;
        if !self.code.h_check().mul_vec(r.bits())?.is_zero() {
            return Err(Error::SyndromeMismatch);
        }
        Ok(TrialRecord {
            seed,
            index,
            error: error.clone(),
            correction: e_hat.to_pauli(),
            bp_converged: out.bp.converged,
            osd_used: out.osd_used,
            iterations: out.bp.iterations,
            raw_estimate: out.estimate,
            logical_failure: self.logicals.acts_logically(&r),
        })
    }

    pub fn run_trial(&self, seed: u64, index: u64) -> Result<TrialRecord> {
        let mut rng = trial_rng(seed, index);
        let error = sample_error(&self.noise, self.code.n(), &mut rng);
        self.run_error(&error, seed, index)
    }

    /// Aggregates `trials` trials in parallel.
    pub fn run_point(&self, trials: u64, seed: u64) -> Result<CurvePoint> {
        if trials == 0 {
            return Err(Error::InvalidParameter("trials must be at least 1".into()));
        }
        let tally = (0..trials)
            .into_par_iter()
            .map(|i| self.run_trial(seed, i).map(|t| Tally::from(&t)))
            .try_reduce(Tally::default, |a, b| Ok(a.merge(b)))?;
        Ok(CurvePoint::from_tally(&self.noise, trials, tally))
    }
}

#[derive(Clone, Copy, Debug, Default)]
struct Tally {
    failures: u64,
    converged: u64,
    iterations: u64,
}

impl Tally {
    fn merge(self, o: Tally) -> Tally {
        Tally {
            failures: self.failures + o.failures,
            converged: self.converged + o.converged,
            iterations: self.iterations + o.iterations,
        }
    }
}

impl From<&TrialRecord> for Tally {
    fn from(t: &TrialRecord) -> Self {
        Tally {
            failures: t.logical_failure as u64,
            converged: t.bp_converged as u64,
            iterations: t.iterations as u64,
        }
    }
}

/// Aggregate statistics at one physical error rate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub p: f64,
    pub p_x: f64,
    pub p_y: f64,
    pub p_z: f64,
    pub trials: u64,
    pub failures: u64,
    pub ler: f64,
    pub ler_ci95: f64,
    pub bp_converged: u64,
    /// Non-convergent rounds count `iter_max` iterations.
    pub avg_iterations: f64,
}

impl CurvePoint {
    fn from_tally(noise: &NoiseModel, trials: u64, t: Tally) -> Self {
        Self {
            p: noise.total(),
            p_x: noise.p_x(),
            p_y: noise.p_y(),
            p_z: noise.p_z(),
            trials,
            failures: t.failures,
            ler: t.failures as f64 / trials as f64,
            ler_ci95: wilson_half_width(t.failures, trials),
            bp_converged: t.converged,
            avg_iterations: t.iterations as f64 / trials as f64,
        }
    }

    pub fn interval(&self) -> (f64, f64) {
        wilson_interval(self.failures, self.trials)
    }

    pub fn bp_converged_frac(&self) -> f64 {
        self.bp_converged as f64 / self.trials as f64
    }

    /// Whether the two Wilson intervals are disjoint.
    pub fn separated_from(&self, other: &CurvePoint) -> bool {
        let (a_lo, a_hi) = self.interval();
        let (b_lo, b_hi) = other.interval();
        a_hi < b_lo || b_hi < a_lo
    }
}

pub fn run_point(
    code: &StabilizerCode,
    noise: NoiseModel,
    cfg: BpConfig,
    trials: u64,
    seed: u64,
) -> Result<CurvePoint> {
    TrialRunner::new(code, noise, cfg)?.run_point(trials, seed)
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub l: usize,
    pub n: usize,
    pub iter_max: usize,
    pub point: CurvePoint,
}

/// Full factorial sweep over lattice sizes and noise models. When
/// `iter_max` is `None` each code runs with `iter_max = n`. `on_row` sees
/// rows as they finish, in `(L, noise)` order.
#[allow(clippy::too_many_arguments)]
pub fn sweep<B, F>(
    build: B,
    sizes: &[usize],
    noises: &[NoiseModel],
    mut cfg: BpConfig,
    iter_max: Option<usize>,
    trials: u64,
    seed: u64,
    mut on_row: F,
) -> Result<Vec<SweepRow>>
where
    B: Fn(usize) -> Result<StabilizerCode>,
    F: FnMut(&SweepRow) -> Result<()>,
{
    let mut rows = Vec::with_capacity(sizes.len() * noises.len());
    for &l in sizes {
        let code = build(l)?;
        cfg.iter_max = iter_max.unwrap_or(code.n());
        for &noise in noises {
            let point = run_point(&code, noise, cfg, trials, seed)?;
            let row = SweepRow {
                l,
                n: code.n(),
                iter_max: cfg.iter_max,
                point,
            };
            on_row(&row)?;
            rows.push(row);
        }
    }
    Ok(rows)
}

/// LER samples `(p, ler)` for one lattice size.
#[derive(Clone, Debug, PartialEq)]
pub struct Curve {
    pub l: usize,
    pub points: Vec<(f64, f64)>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairCrossing {
    pub l_small: usize,
    pub l_large: usize,
    pub crossing: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThresholdEstimate {
    pub threshold: f64,
    /// Standard deviation of the pairwise crossings (0 for a single pair).
    pub spread: f64,
    pub pairs: Vec<PairCrossing>,
}

/// Crossing of two log-LER curves on a shared `p` grid.
///
/// Uses the points where both rates are positive, looks for places where
/// `ln LER_large - ln LER_small` goes from negative to non-negative and
/// interpolates linearly in `p`. Several crossings give their median.
pub fn pair_crossing(small: &Curve, large: &Curve) -> Option<f64> {
    let mut diffs = Vec::new();
    for &(p, a) in &small.points {
        let Some(&(_, b)) = large.points.iter().find(|(q, _)| (q - p).abs() <= 1e-12) else {
            continue;
        };
        if a > 0.0 && b > 0.0 {
            diffs.push((p, b.ln() - a.ln()));
        }
    }
    diffs.sort_by(|x, y| x.0.total_cmp(&y.0));
    let mut crossings: Vec<f64> = diffs
        .windows(2)
        .filter(|w| w[0].1 < 0.0 && w[1].1 >= 0.0)
        .map(|w| {
            let ((p0, d0), (p1, d1)) = (w[0], w[1]);
            p0 + (p1 - p0) * (-d0) / (d1 - d0)
        })
        .collect();
    if crossings.is_empty() {
        return None;
    }
    crossings.sort_by(f64::total_cmp);
    let k = crossings.len();
    Some(if k % 2 == 1 {
        crossings[k / 2]
    } else {
        0.5 * (crossings[k / 2 - 1] + crossings[k / 2])
    })
}

/// Mean and spread of the crossings of adjacent lattice sizes.
pub fn estimate_threshold(curves: &[Curve]) -> Result<ThresholdEstimate> {
    if curves.len() < 2 {
        return Err(Error::InvalidParameter(
            "threshold estimation needs at least two sizes".into(),
        ));
    }
    let mut sorted: Vec<&Curve> = curves.iter().collect();
    sorted.sort_by_key(|c| c.l);
    let pairs: Vec<PairCrossing> = sorted
        .windows(2)
        .map(|w| PairCrossing {
            l_small: w[0].l,
            l_large: w[1].l,
            crossing: pair_crossing(w[0], w[1]),
        })
        .collect();
    let xs: Vec<f64> = pairs.iter().filter_map(|p| p.crossing).collect();
    if xs.is_empty() {
        return Err(Error::NoCrossing);
    }
    let mean = xs.iter().sum::<f64>() / xs.len() as f64;
    let spread = if xs.len() > 1 {
        (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (xs.len() - 1) as f64).sqrt()
    } else {
        0.0
    };
    Ok(ThresholdEstimate {
        threshold: mean,
        spread,
        pairs,
    })
}

/// Groups sweep rows into one curve per lattice size.
pub fn curves_from_rows(rows: &[SweepRow]) -> Vec<Curve> {
    let mut out: Vec<Curve> = Vec::new();
    for r in rows {
        match out.iter_mut().find(|c| c.l == r.l) {
            Some(c) => c.points.push((r.point.p, r.point.ler)),
            None => out.push(Curve {
                l: r.l,
                points: vec![(r.point.p, r.point.ler)],
            }),
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bp::UpdateRule;
    use crate::code::{build_planar_surface, build_xzzx_surface};
    use approx::assert_abs_diff_eq;

    #[test]
    fn wilson_examples() {
        let (lo, hi) = wilson_interval(0, 100);
        assert_eq!(lo, 0.0);
        assert!(hi > 0.03 && hi < 0.04);
        let (lo, hi) = wilson_interval(50, 100);
        assert_abs_diff_eq!(0.5 * (lo + hi), 0.5, epsilon = 1e-12);
        assert!(wilson_half_width(500, 10_000) < wilson_half_width(50, 1000));
    }

    #[test]
    fn failure_classification() {
        let code = build_planar_surface(2).unwrap();
        let e: PauliString = "XIZIY".parse().unwrap();
        assert!(!logical_failure(&code, &e, &e).unwrap());
        let with_stab = e.mul(&code.generators()[0]).unwrap();
        assert!(!logical_failure(&code, &e, &with_stab).unwrap());
        let with_logical = e.mul(&code.logicals()[0]).unwrap();
        assert!(logical_failure(&code, &e, &with_logical).unwrap());
        let wrong: PauliString = "IIIIX".parse().unwrap();
        assert!(matches!(
            logical_failure(&code, &e, &wrong),
            Err(Error::SyndromeMismatch)
        ));
    }

    #[test]
    fn zero_noise_point() {
        let code = build_xzzx_surface(3).unwrap();
        let noise = NoiseModel::new(0.0, 0.0, 0.0).unwrap();
        for flavor in Flavor::ALL {
            let cfg = BpConfig::new(flavor, UpdateRule::MinSum, 9);
            let pt = run_point(&code, noise, cfg, 50, 1).unwrap();
            assert_eq!(pt.failures, 0);
            assert_eq!(pt.avg_iterations, 1.0);
            assert_eq!(pt.bp_converged, 50);
        }
    }

    #[test]
    fn points_are_reproducible() {
        let code = build_planar_surface(3).unwrap();
        let noise = NoiseModel::depolarizing(0.1).unwrap();
        let cfg = BpConfig::new(Flavor::Fdbp, UpdateRule::MinSum, 13);
        let a = run_point(&code, noise, cfg, 300, 42).unwrap();
        let b = run_point(&code, noise, cfg, 300, 42).unwrap();
        assert_eq!(a, b);
    }

    fn synthetic(l: usize, p_th: f64) -> Curve {
        let points = (5..=25)
            .map(|k| k as f64 * 0.01)
            .map(|p| (p, (p / p_th).powi(l as i32)))
            .collect();
        Curve { l, points }
    }

    #[test]
    fn synthetic_threshold() {
        let curves: Vec<Curve> = [5, 7, 9, 11].iter().map(|&l| synthetic(l, 0.16)).collect();
        let est = estimate_threshold(&curves).unwrap();
        assert!((est.threshold - 0.16).abs() < 0.005, "{est:?}");
        assert_eq!(est.pairs.len(), 3);
    }

    #[test]
    fn identical_curves_do_not_cross() {
        let c = synthetic(5, 0.16);
        let twin = Curve { l: 7, ..c.clone() };
        assert!(matches!(estimate_threshold(&[c, twin]), Err(Error::NoCrossing)));
    }
}
