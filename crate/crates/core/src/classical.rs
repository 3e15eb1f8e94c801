//! Classical l1 codes on the simplex: random ensembles, greedy GV search over
//! the typical set, distance verification and occupancy statistics.

use std::io::{Read, Write};

use num_bigint::BigUint;
use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng;
use crate::simplex::{
    ball_volume_bound, enumerate_simplex, l1_distance_unchecked, SimplexPoint, SimplexShape,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Ensemble {
    Uniform,
    Multinomial,
    GreedyGv,
    Explicit,
}

impl std::str::FromStr for Ensemble {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "uniform" => Ok(Ensemble::Uniform),
            "multinomial" => Ok(Ensemble::Multinomial),
            "greedy_gv" => Ok(Ensemble::GreedyGv),
            "explicit" => Ok(Ensemble::Explicit),
            other => Err(Error::domain(format!("unknown ensemble {other:?}"))),
        }
    }
}

impl std::fmt::Display for Ensemble {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Ensemble::Uniform => "uniform",
            Ensemble::Multinomial => "multinomial",
            Ensemble::GreedyGv => "greedy_gv",
            Ensemble::Explicit => "explicit",
        })
    }
}

/// A sequence of codewords on one simplex. Repeated words are allowed.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassicalCode {
    pub shape: SimplexShape,
    pub alpha: Option<f64>,
    pub words: Vec<SimplexPoint>,
    pub ensemble: Ensemble,
    pub seed: Option<u64>,
    pub claimed_distance: Option<u32>,
}

/// On-disk layout; field order is the canonical order of the file format.
#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CodeFile {
    q: usize,
    #[serde(rename = "N")]
    n: u32,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    alpha: Option<f64>,
    ensemble: Ensemble,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    claimed_distance: Option<u32>,
    words: Vec<Vec<u32>>,
}

impl ClassicalCode {
    /// Builds an explicit code, checking every word against the shape.
    pub fn explicit(shape: SimplexShape, words: Vec<SimplexPoint>) -> Result<Self> {
        let code = ClassicalCode {
            shape,
            alpha: None,
            words,
            ensemble: Ensemble::Explicit,
            seed: None,
            claimed_distance: None,
        };
        code.validate()?;
        Ok(code)
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn validate(&self) -> Result<()> {
        for (i, w) in self.words.iter().enumerate() {
            if w.q() != self.shape.q || w.total() != self.shape.n {
                return Err(Error::ShapeMismatch(format!(
                    "word {i} = {w} does not lie on {}",
                    self.shape
                )));
            }
        }
        Ok(())
    }

    /// `log2 |C| / log2 |S_{q,N}|`.
    pub fn rate(&self) -> f64 {
        let dim = crate::simplex::simplex_size(self.shape);
        (self.words.len() as f64).log2() / crate::simplex::log2_big(&dim)
    }

    pub fn to_json(&self) -> Result<String> {
        let file = CodeFile {
            q: self.shape.q,
            n: self.shape.n,
            alpha: self.alpha,
            ensemble: self.ensemble,
            seed: self.seed,
            claimed_distance: self.claimed_distance,
            words: self.words.iter().map(|w| w.coords().to_vec()).collect(),
        };
        let mut s = serde_json::to_string(&file)?;
        s.push('\n');
        Ok(s)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let file: CodeFile = serde_json::from_str(s)?;
        let shape = SimplexShape::new(file.q, file.n)?;
        let code = ClassicalCode {
            shape,
            alpha: file.alpha,
            words: file.words.into_iter().map(SimplexPoint::from_counts).collect(),
            ensemble: file.ensemble,
            seed: file.seed,
            claimed_distance: file.claimed_distance,
        };
        code.validate()?;
        Ok(code)
    }

    pub fn write_to(&self, mut w: impl Write) -> Result<()> {
        w.write_all(self.to_json()?.as_bytes())?;
        Ok(())
    }

    pub fn read_from(mut r: impl Read) -> Result<Self> {
        let mut s = String::new();
        r.read_to_string(&mut s)?;
        Self::from_json(&s)
    }
}

/// Parameters of the typical set: support window exponent `xi` and
/// infinity-norm slack `eps`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TypicalityParams {
    pub alpha: f64,
    pub eps: f64,
    pub xi: f64,
}

impl TypicalityParams {
    pub fn new(alpha: f64, eps: f64, xi: f64) -> Result<Self> {
        if !(alpha > 0.0) {
            return Err(Error::domain(format!("alpha must be positive, got {alpha}")));
        }
        if !(eps > 0.0) {
            return Err(Error::domain(format!("eps must be positive, got {eps}")));
        }
        if !(xi > 0.0 && xi < 0.5) {
            return Err(Error::domain(format!("xi must lie in (0, 1/2), got {xi}")));
        }
        Ok(TypicalityParams { alpha, eps, xi })
    }

    /// `(1 + eps) log_{1+alpha} N`.
    pub fn inf_norm_cap(&self, n: u32) -> f64 {
        (1.0 + self.eps) * (n as f64).ln() / (1.0 + self.alpha).ln()
    }

    /// `N^{-1/2 + xi}`.
    pub fn support_window(&self, n: u32) -> f64 {
        (n as f64).powf(-0.5 + self.xi)
    }
}

fn sample_uniform_word(shape: SimplexShape, seed: u64, index: u64) -> SimplexPoint {
    let q = shape.q;
    let n = shape.n as usize;
    if q == 1 {
        return SimplexPoint::from_counts(vec![shape.n]);
    }
    let mut rng = rng::stream(seed, index);
    // q-1 distinct separators among N+q-1 slots; gaps between them are the
    // occupancies.
    let mut bars: Vec<usize> = rand::seq::index::sample(&mut rng, n + q - 1, q - 1).into_vec();
    bars.sort_unstable();
    let mut coords = Vec::with_capacity(q);
    let mut prev: isize = -1;
    for &b in &bars {
        coords.push((b as isize - prev - 1) as u32);
        prev = b as isize;
    }
    coords.push((n + q - 2) as u32 - prev as u32);
    SimplexPoint::from_counts(coords)
}

fn sample_multinomial_word(shape: SimplexShape, seed: u64, index: u64) -> SimplexPoint {
    let mut rng = rng::stream(seed, index);
    let mut coords = vec![0u32; shape.q];
    for _ in 0..shape.n {
        coords[rng.random_range(0..shape.q)] += 1;
    }
    SimplexPoint::from_counts(coords)
}

fn sample_with(
    shape: SimplexShape,
    len: usize,
    seed: u64,
    ensemble: Ensemble,
    draw: fn(SimplexShape, u64, u64) -> SimplexPoint,
) -> Result<ClassicalCode> {
    if len == 0 {
        return Err(Error::domain("code length L must be at least 1"));
    }
    let words = (0..len as u64)
        .into_par_iter()
        .map(|i| draw(shape, seed, i))
        .collect();
    Ok(ClassicalCode {
        shape,
        alpha: None,
        words,
        ensemble,
        seed: Some(seed),
        claimed_distance: None,
    })
}

/// `len` independent uniform points of the simplex (balls and bars).
pub fn sample_uniform(shape: SimplexShape, len: usize, seed: u64) -> Result<ClassicalCode> {
    sample_with(shape, len, seed, Ensemble::Uniform, sample_uniform_word)
}

/// `len` independent Multinomial(q, N) occupancy vectors: N balls, each in a
/// uniformly chosen bin.
pub fn sample_multinomial(shape: SimplexShape, len: usize, seed: u64) -> Result<ClassicalCode> {
    sample_with(shape, len, seed, Ensemble::Multinomial, sample_multinomial_word)
}

/// Draws one uniform point from its own stream; shared with the pattern
/// sampler of the certifier.
pub(crate) fn uniform_point(shape: SimplexShape, seed: u64, index: u64) -> SimplexPoint {
    sample_uniform_word(shape, seed, index)
}

fn check_pairs(code: &ClassicalCode) -> Result<()> {
    if code.words.len() < 2 {
        return Err(Error::domain(format!(
            "distance needs at least 2 words, code has {}",
            code.words.len()
        )));
    }
    Ok(())
}

/// Exact minimum pairwise distance.
pub fn min_distance(code: &ClassicalCode) -> Result<u32> {
    check_pairs(code)?;
    let words = &code.words;
    Ok((0..words.len() - 1)
        .into_par_iter()
        .map(|i| {
            words[i + 1..]
                .iter()
                .map(|w| l1_distance_unchecked(words[i].coords(), w.coords()))
                .min()
                .unwrap_or(u32::MAX)
        })
        .min()
        .unwrap_or(u32::MAX))
}

/// Both typicality constraints: support window and infinity-norm cap.
pub fn typicality_check(p: &SimplexPoint, params: &TypicalityParams) -> bool {
    let n = p.total();
    if n < 2 {
        return false;
    }
    let target = params.alpha / (1.0 + params.alpha);
    let frac = p.support_size() as f64 / n as f64;
    (frac - target).abs() <= params.support_window(n)
        && p.inf_norm() as f64 <= params.inf_norm_cap(n)
}

#[derive(Debug, Clone)]
pub struct GreedyOutcome {
    pub code: ClassicalCode,
    /// Number of typical points considered.
    pub typical_count: u64,
    /// `|typical set| / max ball_volume_bound(., t-1)` over typical points.
    pub gv_counting_bound: f64,
    /// False when the output is too large for an exhaustive distance check.
    pub distance_verified: bool,
}

/// Greedy GV construction on an exhaustively enumerated simplex.
///
/// The typical points (all points when `params` is `None`) are scanned in an
/// order shuffled by `order_seed`; a point is accepted when it is at distance
/// at least `t` from every accepted point.
pub fn greedy_gv(
    shape: SimplexShape,
    t: u32,
    params: Option<&TypicalityParams>,
    order_seed: u64,
    cap: u64,
) -> Result<GreedyOutcome> {
    let iter = enumerate_simplex(shape, cap).map_err(|e| match e {
        Error::CapExceeded { what, size, cap, .. } => Error::CapExceeded {
            what,
            size,
            cap,
            hint: "; use the uniform or multinomial ensembles (or the sampled greedy) instead",
        },
        other => other,
    })?;
    let mut candidates: Vec<SimplexPoint> = iter
        .filter(|p| params.is_none_or(|tp| typicality_check(p, tp)))
        .collect();
    let typical_count = candidates.len() as u64;
    let max_ball = candidates
        .iter()
        .map(|p| ball_volume_bound(p, t.saturating_sub(1)))
        .max()
        .unwrap_or_else(|| BigUint::from(1u32));
    let gv_counting_bound = typical_count as f64 / crate::simplex::log2_big(&max_ball).exp2();

    let mut rng = rng::stream(order_seed, rng::SHUFFLE_STREAM);
    candidates.shuffle(&mut rng);
    let mut accepted: Vec<SimplexPoint> = Vec::new();
    for p in candidates {
        if accepted
            .iter()
            .all(|a| l1_distance_unchecked(a.coords(), p.coords()) >= t)
        {
            accepted.push(p);
        }
    }
    Ok(GreedyOutcome {
        code: ClassicalCode {
            shape,
            alpha: params.map(|p| p.alpha),
            words: accepted,
            ensemble: Ensemble::GreedyGv,
            seed: Some(order_seed),
            claimed_distance: Some(t),
        },
        typical_count,
        gv_counting_bound,
        distance_verified: true,
    })
}

/// Sampling fallback for simplices too large to enumerate: propose uniform
/// points, keep the typical ones at distance at least `t` from everything
/// accepted so far, until `target` words or `max_proposals` draws.
///
/// The acceptance test already guarantees the distance; the outcome is
/// re-verified with [`min_distance`] when the number of pairs is below
/// `pair_cap` and flagged unverified otherwise.
pub fn greedy_sampled(
    shape: SimplexShape,
    t: u32,
    params: Option<&TypicalityParams>,
    seed: u64,
    target: usize,
    max_proposals: u64,
    pair_cap: u64,
) -> Result<GreedyOutcome> {
    let mut accepted: Vec<SimplexPoint> = Vec::new();
    let mut typical = 0u64;
    for i in 0..max_proposals {
        if accepted.len() >= target {
            break;
        }
        let p = sample_uniform_word(shape, seed, i);
        if !params.is_none_or(|tp| typicality_check(&p, tp)) {
            continue;
        }
        typical += 1;
        if accepted
            .iter()
            .all(|a| l1_distance_unchecked(a.coords(), p.coords()) >= t)
        {
            accepted.push(p);
        }
    }
    let code = ClassicalCode {
        shape,
        alpha: params.map(|p| p.alpha),
        words: accepted,
        ensemble: Ensemble::GreedyGv,
        seed: Some(seed),
        claimed_distance: Some(t),
    };
    let pairs = (code.len() as u64).saturating_mul(code.len() as u64) / 2;
    let distance_verified = if code.len() < 2 {
        true
    } else if pairs <= pair_cap {
        min_distance(&code)? >= t
    } else {
        false
    };
    Ok(GreedyOutcome {
        code,
        typical_count: typical,
        gv_counting_bound: f64::NAN,
        distance_verified,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OccupancyStats {
    pub max_inf_norm: u32,
    /// Mean of `|supp(n)| / N` over the code.
    pub mean_support_fraction: f64,
    /// Fraction of words with infinity norm strictly above the threshold.
    pub fraction_exceeding: f64,
    pub threshold: f64,
}

pub fn occupancy_stats(code: &ClassicalCode, threshold: f64) -> Result<OccupancyStats> {
    if code.is_empty() {
        return Err(Error::domain("occupancy statistics need a nonempty code"));
    }
    let len = code.len() as f64;
    let n = code.shape.n.max(1) as f64;
    let max_inf_norm = code.words.iter().map(SimplexPoint::inf_norm).max().unwrap_or(0);
    let mean_support_fraction =
        code.words.iter().map(|w| w.support_size() as f64 / n).sum::<f64>() / len;
    let exceeding = code
        .words
        .iter()
        .filter(|w| w.inf_norm() as f64 > threshold)
        .count();
    Ok(OccupancyStats {
        max_inf_norm,
        mean_support_fraction,
        fraction_exceeding: exceeding as f64 / len,
        threshold,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DistanceStats {
    pub mean: f64,
    pub min: u32,
    pub max: u32,
    /// `mean / N`.
    pub normalized_mean: f64,
}

pub fn pairwise_distance_stats(code: &ClassicalCode) -> Result<DistanceStats> {
    check_pairs(code)?;
    let words = &code.words;
    let rows: Vec<(u64, u32, u32)> = (0..words.len() - 1)
        .into_par_iter()
        .map(|i| {
            let mut sum = 0u64;
            let (mut lo, mut hi) = (u32::MAX, 0u32);
            for w in &words[i + 1..] {
                let d = l1_distance_unchecked(words[i].coords(), w.coords());
                sum += d as u64;
                lo = lo.min(d);
                hi = hi.max(d);
            }
            (sum, lo, hi)
        })
        .collect();
    let total: u64 = rows.iter().map(|r| r.0).sum();
    let pairs = (words.len() as u64 * (words.len() as u64 - 1)) / 2;
    let mean = total as f64 / pairs as f64;
    Ok(DistanceStats {
        mean,
        min: rows.iter().map(|r| r.1).min().unwrap_or(0),
        max: rows.iter().map(|r| r.2).max().unwrap_or(0),
        normalized_mean: mean / code.shape.n.max(1) as f64,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(c: &[u32]) -> SimplexPoint {
        SimplexPoint::from_counts(c.to_vec())
    }

    fn shape(q: usize, n: u32) -> SimplexShape {
        SimplexShape::new(q, n).unwrap()
    }

    #[test]
    fn sampling_is_deterministic() {
        let a = sample_uniform(shape(6, 6), 32, 7).unwrap();
        let b = sample_uniform(shape(6, 6), 32, 7).unwrap();
        assert_eq!(a, b);
        let c = sample_multinomial(shape(6, 6), 32, 7).unwrap();
        assert_eq!(c, sample_multinomial(shape(6, 6), 32, 7).unwrap());
        assert_ne!(a.words, sample_uniform(shape(6, 6), 32, 8).unwrap().words);
        assert!(sample_uniform(shape(3, 3), 0, 1).is_err());
    }

    #[test]
    fn uniform_two_points() {
        let len = 40_000;
        let code = sample_uniform(shape(2, 1), len, 11).unwrap();
        let ones = code.words.iter().filter(|w| w.coords() == [1, 0]).count() as f64;
        let sigma = (len as f64 * 0.25).sqrt();
        assert!((ones - len as f64 / 2.0).abs() < 3.0 * sigma, "{ones}");
    }

    #[test]
    fn uniform_chi_square_q3_n2() {
        let len = 60_000;
        let code = sample_uniform(shape(3, 2), len, 5).unwrap();
        let pts: Vec<_> = enumerate_simplex(shape(3, 2), 10).unwrap().collect();
        let expected = len as f64 / 6.0;
        let sigma = (len as f64 * (1.0 / 6.0) * (5.0 / 6.0)).sqrt();
        let mut chi2 = 0.0;
        for p in &pts {
            let c = code.words.iter().filter(|w| *w == p).count() as f64;
            assert!((c - expected).abs() < 3.0 * sigma, "{p}: {c}");
            chi2 += (c - expected).powi(2) / expected;
        }
        // 99.9% quantile of chi-square with 5 degrees of freedom.
        assert!(chi2 < 20.52, "chi2 = {chi2}");
    }

    #[test]
    fn multinomial_cases() {
        let code = sample_multinomial(shape(1, 9), 5, 3).unwrap();
        assert!(code.words.iter().all(|w| w.coords() == [9]));
        let code = sample_multinomial(shape(5, 1), 50, 3).unwrap();
        assert!(code
            .words
            .iter()
            .all(|w| w.coords().iter().filter(|&&c| c == 1).count() == 1));
        let (n, len) = (40u32, 5000usize);
        let code = sample_multinomial(shape(2, n), len, 9).unwrap();
        let mean = code.words.iter().map(|w| w.coords()[0] as f64).sum::<f64>() / len as f64;
        let sigma = (n as f64 * 0.25 / len as f64).sqrt();
        assert!((mean - n as f64 / 2.0).abs() < 3.0 * sigma, "{mean}");
    }

    #[test]
    fn min_distance_cases() {
        let c = ClassicalCode::explicit(shape(2, 3), vec![pt(&[3, 0]), pt(&[0, 3])]).unwrap();
        assert_eq!(min_distance(&c).unwrap(), 3);
        let c =
            ClassicalCode::explicit(shape(2, 3), vec![pt(&[3, 0]), pt(&[1, 2]), pt(&[3, 0])])
                .unwrap();
        assert_eq!(min_distance(&c).unwrap(), 0);
        let c = ClassicalCode::explicit(shape(2, 3), vec![pt(&[3, 0])]).unwrap();
        assert!(min_distance(&c).is_err());
    }

    #[test]
    fn min_distance_matches_double_loop() {
        let code = sample_uniform(shape(3, 4), 100, 21).unwrap();
        let mut best = u32::MAX;
        for i in 0..code.len() {
            for j in 0..code.len() {
                if i != j {
                    let a = code.words[i].coords();
                    let b = code.words[j].coords();
                    let d: i64 = a.iter().zip(b).map(|(&x, &y)| (x as i64 - y as i64).abs()).sum();
                    best = best.min((d / 2) as u32);
                }
            }
        }
        assert_eq!(min_distance(&code).unwrap(), best);
    }

    #[test]
    fn typicality_cases() {
        let params = TypicalityParams::new(1.0, 1.0, 0.25).unwrap();
        let mut c = vec![0u32; 1000];
        c[0] = 1000;
        assert!(!typicality_check(&pt(&c), &params));
        // Exactly N/2 modes occupied with single photons except a few twos.
        let mut c = vec![0u32; 1000];
        for x in c.iter_mut().take(500) {
            *x = 2;
        }
        assert!(typicality_check(&pt(&c), &params));
        assert!(TypicalityParams::new(1.0, 1.0, 0.5).is_err());
        assert!(TypicalityParams::new(1.0, 0.0, 0.2).is_err());
    }

    #[test]
    fn typical_fraction_of_uniform_samples() {
        let params = TypicalityParams::new(1.0, 1.0, 0.25).unwrap();
        let code = sample_uniform(shape(10_000, 10_000), 60, 4).unwrap();
        let pass = code.words.iter().filter(|w| typicality_check(w, &params)).count();
        assert!(pass as f64 / 60.0 >= 0.9, "{pass}");
    }

    #[test]
    fn greedy_small_instance() {
        let outcomes: std::collections::BTreeSet<Vec<Vec<u32>>> = (0..16)
            .map(|seed| {
                let mut w: Vec<Vec<u32>> = greedy_gv(shape(2, 2), 2, None, seed, 100)
                    .unwrap()
                    .code
                    .words
                    .into_iter()
                    .map(SimplexPoint::into_coords)
                    .collect();
                w.sort();
                w
            })
            .collect();
        // Exhaustive over the 6 scan orders: (1,1) first gives {(1,1)},
        // every other order gives {(0,2),(2,0)}.
        let allowed: std::collections::BTreeSet<Vec<Vec<u32>>> =
            [vec![vec![0, 2], vec![2, 0]], vec![vec![1, 1]]].into_iter().collect();
        assert!(outcomes.is_subset(&allowed));
        assert!(outcomes.contains(&vec![vec![0, 2], vec![2, 0]]));
    }

    #[test]
    fn greedy_t1_keeps_everything() {
        let out = greedy_gv(shape(3, 4), 1, None, 3, 1000).unwrap();
        assert_eq!(out.code.len(), 15);
        assert!(greedy_gv(shape(20, 20), 3, None, 0, 1000).is_err());
    }

    #[test]
    fn greedy_beats_counting_bound() {
        let params = TypicalityParams::new(1.0, 1.0, 0.45).unwrap();
        for seed in 0..3 {
            let out = greedy_gv(shape(8, 8), 3, Some(&params), seed, 1_000_000).unwrap();
            assert!(out.code.len() as f64 >= out.gv_counting_bound);
            assert!(min_distance(&out.code).unwrap() >= 3);
            assert!(out.code.words.iter().all(|w| typicality_check(w, &params)));
        }
    }

    #[test]
    fn sampled_greedy_respects_distance() {
        let out = greedy_sampled(shape(12, 12), 4, None, 1, 40, 10_000, 1_000_000).unwrap();
        assert!(out.distance_verified);
        assert!(min_distance(&out.code).unwrap() >= 4);
    }

    #[test]
    fn occupancy_and_distance_stats() {
        let c = ClassicalCode::explicit(shape(4, 4), vec![pt(&[1, 1, 1, 1])]).unwrap();
        let s = occupancy_stats(&c, 1.0).unwrap();
        assert_eq!(s.max_inf_norm, 1);
        assert_eq!(s.fraction_exceeding, 0.0);
        let c = ClassicalCode::explicit(shape(2, 3), vec![pt(&[3, 0]), pt(&[3, 0])]).unwrap();
        assert_eq!(pairwise_distance_stats(&c).unwrap().mean, 0.0);
        let c = ClassicalCode::explicit(shape(2, 3), vec![pt(&[3, 0]), pt(&[0, 3])]).unwrap();
        let s = pairwise_distance_stats(&c).unwrap();
        assert_eq!((s.mean, s.min, s.max), (3.0, 3, 3));
    }

    #[test]
    fn json_round_trip_and_format() {
        let mut code = sample_uniform(shape(3, 3), 2, 1).unwrap();
        code.alpha = Some(1.0);
        let s = code.to_json().unwrap();
        assert!(s.starts_with("{\"q\":3,\"N\":3,\"alpha\":1.0,\"ensemble\":\"uniform\",\"seed\":1,\"words\":"));
        assert!(s.ends_with('\n'));
        assert_eq!(ClassicalCode::from_json(&s).unwrap(), code);
        assert!(ClassicalCode::from_json("{\"q\":2,\"N\":1,\"ensemble\":\"explicit\",\"words\":[[1,1]]}").is_err());
        assert!(ClassicalCode::from_json("{\"q\":2,\"N\":1,\"ensemble\":\"explicit\",\"words\":[],\"x\":1}").is_err());
    }
}
