//! Knill-Laflamme certification of Fock codes against the truncated
//! amplitude-damping channel.
//!
//! The truncated channel has Kraus operators `A_r / sqrt(p)` for patterns of
//! weight at most `t`, with `p = P[Bin(N, gamma) <= t]`. On a constant
//! excitation code every diagonal quadratic form is a weighted sum of
//!
//! ```text
//! Y_r(n) = (1/p) (1-gamma)^{N-|r|} gamma^{|r|} prod_i binom(n_i, r_i)
//! ```
//!
//! which is evaluated in the log domain.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::function::factorial::{ln_binomial, ln_factorial};

use crate::bounds::{compensated_sum, eps_to_ad, kraus_count, p_loss, ChannelParams};
use crate::classical::uniform_point;
use crate::error::{Error, Result};
use crate::fock::{find_duplicate, FockCode};
use crate::rng;
use crate::simplex::{l1_distance_unchecked, loss_patterns, LossPattern, SimplexPoint, SimplexShape};

pub const DEFAULT_PATTERN_CAP: u64 = 10_000_000;
pub const KRAUS_NORMALIZATION: &str = "A_r/sqrt(p_{N,t})";

/// Two code words and loss patterns with `n - r = n' - r'`: the damaged
/// states `A_r|n>` and `A_r'|n'>` coincide up to a positive factor.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub word_a: usize,
    pub word_b: usize,
    pub block_a: usize,
    pub block_b: usize,
    pub n_a: SimplexPoint,
    pub n_b: SimplexPoint,
    pub r_a: LossPattern,
    pub r_b: LossPattern,
}

impl std::fmt::Display for Witness {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "word {} {} (block {}) and word {} {} (block {}) coincide after losses {} and {}",
            self.word_a, self.n_a, self.block_a, self.word_b, self.n_b, self.block_b, self.r_a, self.r_b
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "verdict")]
pub enum Orthogonality {
    /// Classical minimum distance of the whole code is at least `t + 1`.
    ProvedByDistance { min_distance: u32 },
    /// The classical code is closer than `t + 1`, but no retained pair with
    /// nonzero amplitude collides.
    BruteForceVerified { min_distance: u32, pairs_checked: u64 },
    Failed { witness: Witness },
}

impl Orthogonality {
    pub fn holds(&self) -> bool {
        !matches!(self, Orthogonality::Failed { .. })
    }
}

fn pair_witness(fc: &FockCode, a: usize, b: usize) -> Witness {
    let x = fc.classical.words[a].coords();
    let y = fc.classical.words[b].coords();
    let r_a = x.iter().zip(y).map(|(&u, &v)| u.saturating_sub(v)).collect();
    let r_b = x.iter().zip(y).map(|(&u, &v)| v.saturating_sub(u)).collect();
    Witness {
        word_a: a,
        word_b: b,
        block_a: fc.partition.block_of(a).unwrap_or(usize::MAX),
        block_b: fc.partition.block_of(b).unwrap_or(usize::MAX),
        n_a: fc.classical.words[a].clone(),
        n_b: fc.classical.words[b].clone(),
        r_a: LossPattern::new(r_a),
        r_b: LossPattern::new(r_b),
    }
}

/// Exact orthogonality verdict for losses of weight at most `t`.
///
/// Distinct words `n, n'` admit patterns of weight at most `t` with
/// `n - r = n' - r'` exactly when `d(n, n') <= t`, and then
/// `r = (n - n')^+`, `r' = (n' - n)^+` is such a pair. All amplitudes and
/// Kraus entries are nonnegative, so any collision gives a nonzero off-term.
pub fn orthogonality_check(fc: &FockCode, t: u32) -> Result<Orthogonality> {
    let words = &fc.classical.words;
    let full = if words.len() < 2 {
        u32::MAX
    } else {
        crate::classical::min_distance(&fc.classical)?
    };
    if full > t {
        return Ok(Orthogonality::ProvedByDistance { min_distance: full });
    }
    let mut live: Vec<usize> = fc
        .partition
        .blocks()
        .iter()
        .flatten()
        .copied()
        .filter(|&i| fc.amplitude(i) > 0.0)
        .collect();
    live.sort_unstable();
    let found = (0..live.len())
        .into_par_iter()
        .filter_map(|ia| {
            let a = live[ia];
            live[ia + 1..]
                .iter()
                .find(|&&b| l1_distance_unchecked(words[a].coords(), words[b].coords()) <= t)
                .map(|&b| (a, b))
        })
        .min();
    if let Some((a, b)) = found {
        return Ok(Orthogonality::Failed { witness: pair_witness(fc, a, b) });
    }
    let n = live.len() as u64;
    Ok(Orthogonality::BruteForceVerified {
        min_distance: full,
        pairs_checked: n * n.saturating_sub(1) / 2,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LambdaMode {
    AnalyticUniform,
    AnalyticMultinomial,
    EmpiricalCodeMean,
}

impl std::str::FromStr for LambdaMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "analytic_uniform" | "uniform" => Ok(LambdaMode::AnalyticUniform),
            "analytic_multinomial" | "multinomial" => Ok(LambdaMode::AnalyticMultinomial),
            "empirical_code_mean" | "empirical" => Ok(LambdaMode::EmpiricalCodeMean),
            other => Err(Error::domain(format!("unknown lambda mode {other:?}"))),
        }
    }
}

impl LambdaMode {
    /// Analytic for the random ensembles, the code mean otherwise.
    pub fn default_for(ensemble: crate::classical::Ensemble) -> Self {
        match ensemble {
            crate::classical::Ensemble::Uniform => LambdaMode::AnalyticUniform,
            crate::classical::Ensemble::Multinomial => LambdaMode::AnalyticMultinomial,
            _ => LambdaMode::EmpiricalCodeMean,
        }
    }
}

/// Shared prefactor `ln[(1/p)(1-gamma)^{N-w} gamma^w]`; zero exponents are
/// skipped so that `gamma` in `{0, 1}` stays finite where it should.
fn ln_prefactor(n: u32, w: u32, gamma: f64, ln_p: f64) -> f64 {
    let mut v = -ln_p;
    if w > 0 {
        v += w as f64 * gamma.ln();
    }
    if n > w {
        v += (n - w) as f64 * (-gamma).ln_1p();
    }
    v
}

/// `ln Y_r(n)`; per-mode terms are summed in sorted order so that permuting
/// modes of both `n` and `r` leaves the result bit-identical.
fn ln_y(n: &[u32], r: &[u32], gamma: f64, ln_p: f64) -> f64 {
    let mut terms: Vec<f64> = Vec::new();
    let mut total = 0u32;
    let mut w = 0u32;
    for (&ni, &ri) in n.iter().zip(r) {
        total += ni;
        w += ri;
        if ri > ni {
            return f64::NEG_INFINITY;
        }
        if ri > 0 {
            terms.push(ln_binomial(ni as u64, ri as u64));
        }
    }
    terms.sort_by(f64::total_cmp);
    terms.iter().fold(ln_prefactor(total, w, gamma, ln_p), |acc, x| acc + x)
}

/// `Y_r(n)` with normalisation `p`.
pub fn y_value(n: &SimplexPoint, r: &LossPattern, gamma: f64, p: f64) -> f64 {
    ln_y(n.coords(), r.r(), gamma, p.ln()).exp()
}

fn check_pattern(fc: &FockCode, r: &LossPattern) -> Result<()> {
    if r.q() != fc.shape().q {
        return Err(Error::ShapeMismatch(format!("pattern {r} has {} modes, code has {}", r.q(), fc.shape().q)));
    }
    if r.weight() > fc.shape().n {
        return Err(Error::domain(format!("pattern {r} removes more than N = {} photons", fc.shape().n)));
    }
    Ok(())
}

fn check_p(p: f64) -> Result<()> {
    if p > 0.0 && p <= 1.0 {
        Ok(())
    } else {
        Err(Error::domain(format!("normalisation p must lie in (0, 1], got {p}")))
    }
}

fn block_diag(fc: &FockCode, block: usize, r: &[u32], gamma: f64, ln_p: f64) -> f64 {
    compensated_sum(
        fc.block_words(block)
            .map(|(w, a)| a * a * ln_y(w.coords(), r, gamma, ln_p).exp()),
    )
}

/// `<c_i| A_r^dag A_r |c_i> / p`, i.e. the amplitude-weighted mean of
/// `Y_r` over block `i`.
pub fn diag_expectation(fc: &FockCode, block: usize, r: &LossPattern, gamma: f64, p: f64) -> Result<f64> {
    check_pattern(fc, r)?;
    check_p(p)?;
    if block >= fc.k() {
        return Err(Error::domain(format!("block {block} out of range for K = {}", fc.k())));
    }
    Ok(block_diag(fc, block, r.r(), gamma, p.ln()))
}

fn ln_lambda_analytic(r: &[u32], shape: SimplexShape, gamma: f64, ln_p: f64, mode: LambdaMode) -> f64 {
    let n = shape.n as u64;
    let q = shape.q as u64;
    let w: u32 = r.iter().sum();
    let pre = ln_prefactor(shape.n, w, gamma, ln_p);
    let ln_e = match mode {
        LambdaMode::AnalyticUniform => {
            ln_binomial(n + q - 1, w as u64 + q - 1) - ln_binomial(n + q - 1, q - 1)
        }
        _ => {
            let mut parts: Vec<f64> = r.iter().filter(|&&x| x > 1).map(|&x| ln_factorial(x as u64)).collect();
            parts.sort_by(f64::total_cmp);
            let denom: f64 = parts.iter().sum();
            ln_binomial(n, w as u64) + ln_factorial(w as u64) - denom - w as f64 * (q as f64).ln()
        }
    };
    pre + ln_e
}

/// Ensemble-mean choice of `lambda_r`:
/// `(1/p)(1-gamma)^{N-|r|} gamma^{|r|} E[prod_i binom(X_i, r_i)]`.
///
/// Uniform: `E = binom(N+q-1, |r|+q-1) / binom(N+q-1, q-1)`.
/// Multinomial: `E = binom(N, |r|) |r|! / prod r_i! * q^{-|r|}`.
pub fn lambda_analytic(r: &LossPattern, shape: SimplexShape, gamma: f64, p: f64, mode: LambdaMode) -> Result<f64> {
    if mode == LambdaMode::EmpiricalCodeMean {
        return Err(Error::domain("lambda_analytic needs an analytic mode"));
    }
    if r.q() != shape.q || r.weight() > shape.n {
        return Err(Error::domain(format!("pattern {r} does not fit {shape}")));
    }
    check_p(p)?;
    Ok(ln_lambda_analytic(r.r(), shape, gamma, p.ln(), mode).exp())
}

/// Code-mean choice: the average of the block diagonals. With uniform
/// amplitudes this is the plain mean of `Y_r` over all retained words.
pub fn lambda_empirical(fc: &FockCode, r: &LossPattern, gamma: f64, p: f64) -> Result<f64> {
    check_pattern(fc, r)?;
    check_p(p)?;
    let ln_p = p.ln();
    Ok(compensated_sum((0..fc.k()).map(|b| block_diag(fc, b, r.r(), gamma, ln_p))) / fc.k() as f64)
}

/// Per-pattern diagonals and lambda for the whole pattern list.
struct Deviation {
    lambda: f64,
    dev: f64,
    block: usize,
}

fn pattern_deviation(fc: &FockCode, r: &[u32], gamma: f64, ln_p: f64, mode: LambdaMode) -> Deviation {
    let diags: Vec<f64> = (0..fc.k()).map(|b| block_diag(fc, b, r, gamma, ln_p)).collect();
    let lambda = match mode {
        LambdaMode::EmpiricalCodeMean => compensated_sum(diags.iter().copied()) / fc.k() as f64,
        m => ln_lambda_analytic(r, fc.shape(), gamma, ln_p, m).exp(),
    };
    let mut best = Deviation { lambda, dev: 0.0, block: 0 };
    for (b, d) in diags.iter().enumerate() {
        let dev = (d - lambda).abs();
        if dev > best.dev {
            best.dev = dev;
            best.block = b;
        }
    }
    best
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeviationAt {
    pub pattern: LossPattern,
    pub block: usize,
}

/// Non-deformation part of the certificate, without any orthogonality or
/// distinctness requirement.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Deformation {
    #[serde(rename = "M")]
    pub m: u64,
    pub lambda_sum: f64,
    pub eps_max: f64,
    pub eps_max_at: DeviationAt,
    /// `sqrt(K M eps_max)`.
    pub eps_certified: f64,
    pub p_loss: f64,
}

fn check_certify_args(fc: &FockCode, t: u32, gamma: f64) -> Result<ChannelParams> {
    if t > fc.shape().n {
        return Err(Error::domain(format!("t = {t} exceeds N = {}", fc.shape().n)));
    }
    let params = ChannelParams::new(gamma, fc.shape().n, t)?;
    if p_loss(&params) <= 0.0 {
        return Err(Error::domain("p_{N,t} vanishes; the truncated channel is undefined"));
    }
    Ok(params)
}

fn pattern_count(q: usize, t: u32, cap: u64) -> Result<u64> {
    let m = kraus_count(q, t)?;
    match m.to_u64() {
        Some(v) if v <= cap => Ok(v),
        _ => Err(Error::CapExceeded {
            what: "loss-pattern set",
            size: m.to_string(),
            cap,
            hint: "; use estimate_eps for a sampled lower bound",
        }),
    }
}

/// `eps_max = max_{i, r} |<c_i|A~_r^dag A~_r|c_i> - lambda_r|` over all
/// patterns of weight at most `t`, and `sqrt(K M eps_max)`.
pub fn deformation_bound(fc: &FockCode, t: u32, gamma: f64, mode: LambdaMode, pattern_cap: u64) -> Result<Deformation> {
    let params = check_certify_args(fc, t, gamma)?;
    let m = pattern_count(fc.shape().q, t, pattern_cap)?;
    let p = p_loss(&params);
    let ln_p = p.ln();
    let patterns = loss_patterns(fc.shape().q, t);
    let devs: Vec<Deviation> = patterns
        .par_iter()
        .map(|r| pattern_deviation(fc, r.r(), gamma, ln_p, mode))
        .collect();
    let lambda_sum = compensated_sum(devs.iter().map(|d| d.lambda));
    // First maximum in pattern order.
    let (idx, worst) = devs
        .iter()
        .enumerate()
        .fold((0, &devs[0]), |acc, (i, d)| if d.dev > acc.1.dev { (i, d) } else { acc });
    let eps_max = worst.dev;
    Ok(Deformation {
        m,
        lambda_sum,
        eps_max,
        eps_max_at: DeviationAt { pattern: patterns[idx].clone(), block: worst.block },
        eps_certified: (fc.k() as f64 * m as f64 * eps_max).sqrt(),
        p_loss: p,
    })
}

/// Overlap of code states with words of occupancy at most `b`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LocalExcitation {
    #[serde(rename = "B")]
    pub b: u32,
    pub overlap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertReport {
    pub tool_version: String,
    pub kraus_normalization: String,
    #[serde(rename = "K")]
    pub k: usize,
    #[serde(rename = "T")]
    pub t_block: usize,
    pub q: usize,
    #[serde(rename = "N")]
    pub n: u32,
    #[serde(rename = "L")]
    pub len: usize,
    pub discarded: Vec<usize>,
    pub t: u32,
    pub gamma: f64,
    #[serde(rename = "M")]
    pub m: u64,
    pub orthogonality: Orthogonality,
    pub lambda_mode: LambdaMode,
    pub lambda_sum: f64,
    pub eps_max: f64,
    pub eps_max_at: DeviationAt,
    pub eps_certified: f64,
    pub p_loss: f64,
    /// Full-channel guarantee; absent when `eps_certified > 1`.
    pub eps_ad: Option<f64>,
    pub patterns_enumerated: u64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub quantum_rate: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub local_excitation: Option<LocalExcitation>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty", default)]
    pub input_digests: BTreeMap<String, String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub wallclock_seconds: Option<f64>,
}

impl CertReport {
    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }
}

/// Full certificate. Refuses codes with repeated retained words, codes that
/// fail orthogonality (with the witness) and pattern sets above the cap.
pub fn certify(fc: &FockCode, t: u32, gamma: f64, mode: LambdaMode, pattern_cap: u64) -> Result<CertReport> {
    check_certify_args(fc, t, gamma)?;
    if let Some((first, second)) = find_duplicate(&fc.classical, &fc.partition) {
        return Err(Error::DuplicateWord { first, second });
    }
    let orthogonality = orthogonality_check(fc, t)?;
    if let Orthogonality::Failed { witness } = orthogonality {
        return Err(Error::Orthogonality(Box::new(witness)));
    }
    let d = deformation_bound(fc, t, gamma, mode, pattern_cap)?;
    let eps_ad = if d.eps_certified <= 1.0 {
        Some(eps_to_ad(d.eps_certified, d.p_loss)?)
    } else {
        None
    };
    Ok(CertReport {
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        kraus_normalization: KRAUS_NORMALIZATION.to_string(),
        k: fc.k(),
        t_block: fc.partition.block_size(),
        q: fc.shape().q,
        n: fc.shape().n,
        len: fc.classical.len(),
        discarded: fc.partition.discarded().to_vec(),
        t,
        gamma,
        m: d.m,
        orthogonality,
        lambda_mode: mode,
        lambda_sum: d.lambda_sum,
        eps_max: d.eps_max,
        eps_max_at: d.eps_max_at,
        eps_certified: d.eps_certified,
        p_loss: d.p_loss,
        eps_ad,
        patterns_enumerated: d.m,
        quantum_rate: None,
        local_excitation: None,
        input_digests: BTreeMap::new(),
        wallclock_seconds: None,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpsEstimate {
    pub eps_max_lower_bound: f64,
    pub patterns_sampled: u64,
    pub distinct_patterns: u64,
    /// Always false: a sampled maximum is never a certificate.
    pub certifying: bool,
}

/// Lower bound on `eps_max` from `samples` patterns drawn uniformly from
/// all patterns of weight at most `t`.
pub fn estimate_eps(
    fc: &FockCode,
    t: u32,
    gamma: f64,
    mode: LambdaMode,
    samples: u64,
    seed: u64,
) -> Result<EpsEstimate> {
    if samples == 0 {
        return Err(Error::domain("sample count must be at least 1"));
    }
    let params = check_certify_args(fc, t, gamma)?;
    let q = fc.shape().q;
    let weights: Vec<f64> = (0..=t as u64)
        .map(|w| crate::simplex::log2_big(&crate::simplex::binomial(w + q as u64 - 1, q as u64 - 1)).exp2())
        .collect();
    let weight_dist = WeightedIndex::new(&weights).map_err(|e| Error::domain(e.to_string()))?;
    let ln_p = p_loss(&params).ln();
    let drawn: Vec<Vec<u32>> = (0..samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = rng::stream(seed, i);
            let w = weight_dist.sample(&mut rng) as u32;
            let shape = SimplexShape { q, n: w };
            uniform_point(shape, seed ^ 0x9e37_79b9_7f4a_7c15, i).into_coords()
        })
        .collect();
    let mut distinct = drawn.clone();
    distinct.sort();
    distinct.dedup();
    let eps = distinct
        .par_iter()
        .map(|r| pattern_deviation(fc, r, gamma, ln_p, mode).dev)
        .reduce(|| 0.0, f64::max);
    Ok(EpsEstimate {
        eps_max_lower_bound: eps,
        patterns_sampled: samples,
        distinct_patterns: distinct.len() as u64,
        certifying: false,
    })
}

/// Whether `K^3 M^2 <= floor(L^{1-eps})`.
pub fn feasibility_check(len: u64, k: u64, m: &BigUint, epsilon: f64) -> Result<bool> {
    if len == 0 || k == 0 || *m == BigUint::from(0u32) {
        return Err(Error::domain("L, K and M must be positive"));
    }
    if !(0.0..1.0).contains(&epsilon) {
        return Err(Error::domain(format!("epsilon must lie in [0, 1), got {epsilon}")));
    }
    let lhs = BigUint::from(k).pow(3) * m * m;
    if epsilon == 0.0 {
        return Ok(lhs <= BigUint::from(len));
    }
    let ln_lhs = 3.0 * (k as f64).ln() + 2.0 * crate::simplex::log2_big(m) * std::f64::consts::LN_2;
    let ln_rhs = (1.0 - epsilon) * (len as f64).ln();
    if (ln_lhs - ln_rhs).abs() > 1e-9 * ln_rhs.abs().max(1.0) {
        return Ok(ln_lhs < ln_rhs);
    }
    // Near tie: compare against the integer part exactly.
    let rhs = (len as f64).powf(1.0 - epsilon).floor();
    Ok(lhs <= BigUint::from(rhs as u64))
}
