//! Dense reference simulator on the multi-mode Fock space truncated to
//! total excitation at most `N_max`.
//!
//! Everything here is brute force: explicit Kraus matrices, explicit code
//! vectors, explicit projectors. It exists to check the closed forms used by
//! the certifier on instances with a few hundred basis states.

use std::collections::HashMap;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use crate::bounds::{p_loss, ChannelParams};
use crate::certify::{orthogonality_check, Orthogonality};
use crate::error::{Error, Result};
use crate::fock::{find_duplicate, FockCode};
use crate::rng;
use crate::simplex::{binomial, loss_patterns, LossPattern, SimplexIter, SimplexPoint, SimplexShape};

pub const DIM_CAP: usize = 20_000;

type CMat = DMatrix<Complex64>;
type CVec = DVector<Complex64>;

/// All points of `S_{q,m}` for `m = 0..=n_max`, excitation-major and
/// lexicographic within an excitation.
#[derive(Debug, Clone)]
pub struct GradedBasis {
    q: usize,
    n_max: u32,
    points: Vec<SimplexPoint>,
    index: HashMap<Vec<u32>, usize>,
    layer_start: Vec<usize>,
}

impl GradedBasis {
    pub fn new(q: usize, n_max: u32) -> Result<Self> {
        Self::with_cap(q, n_max, DIM_CAP)
    }

    pub fn with_cap(q: usize, n_max: u32, cap: usize) -> Result<Self> {
        if q == 0 {
            return Err(Error::domain("q must be at least 1"));
        }
        let dim = binomial(n_max as u64 + q as u64, q as u64);
        if dim > cap.into() {
            return Err(Error::CapExceeded {
                what: "truncated Fock basis",
                size: dim.to_string(),
                cap: cap as u64,
                hint: "",
            });
        }
        let mut points = Vec::new();
        let mut layer_start = Vec::new();
        for m in 0..=n_max {
            layer_start.push(points.len());
            points.extend(SimplexIter::new(SimplexShape { q, n: m }));
        }
        layer_start.push(points.len());
        let index = points.iter().enumerate().map(|(i, p)| (p.coords().to_vec(), i)).collect();
        Ok(GradedBasis { q, n_max, points, index, layer_start })
    }

    pub fn dim(&self) -> usize {
        self.points.len()
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn n_max(&self) -> u32 {
        self.n_max
    }

    pub fn point(&self, i: usize) -> &SimplexPoint {
        &self.points[i]
    }

    pub fn index_of(&self, coords: &[u32]) -> Option<usize> {
        self.index.get(coords).copied()
    }

    /// Index range of the excitation-`m` layer.
    pub fn layer(&self, m: u32) -> std::ops::Range<usize> {
        self.layer_start[m as usize]..self.layer_start[m as usize + 1]
    }
}

#[derive(Debug, Clone)]
pub struct DenseOperator {
    pub label: String,
    pub matrix: CMat,
}

/// `<n - r| A_r |n> = prod_i sqrt(binom(n_i, r_i) (1-gamma)^{n_i - r_i} gamma^{r_i})`,
/// or 0 when some `r_i > n_i`.
pub fn kraus_amplitude(n: &[u32], r: &[u32], gamma: f64) -> f64 {
    let mut v = 1.0f64;
    for (&ni, &ri) in n.iter().zip(r) {
        if ri > ni {
            return 0.0;
        }
        let b = binomial(ni as u64, ri as u64);
        let b: f64 = b.to_string().parse().unwrap_or(f64::INFINITY);
        v *= (b * (1.0 - gamma).powi((ni - ri) as i32) * gamma.powi(ri as i32)).sqrt();
    }
    v
}

pub fn build_kraus(basis: &GradedBasis, r: &LossPattern, gamma: f64) -> Result<DenseOperator> {
    if r.q() != basis.q() || r.weight() > basis.n_max() {
        return Err(Error::domain(format!("pattern {r} does not act on this basis")));
    }
    if !(0.0..=1.0).contains(&gamma) {
        return Err(Error::domain(format!("gamma must lie in [0, 1], got {gamma}")));
    }
    let dim = basis.dim();
    let mut m = CMat::zeros(dim, dim);
    let mut target = vec![0u32; basis.q()];
    for col in basis.layer(r.weight()).start..dim {
        let n = basis.point(col).coords();
        if n.iter().zip(r.r()).any(|(a, b)| b > a) {
            continue;
        }
        for (t, (&a, &b)) in target.iter_mut().zip(n.iter().zip(r.r())) {
            *t = a - b;
        }
        let row = basis.index_of(&target).expect("basis closed under losses");
        m[(row, col)] = Complex64::new(kraus_amplitude(n, r.r(), gamma), 0.0);
    }
    Ok(DenseOperator { label: format!("A_{r}"), matrix: m })
}

fn code_vectors(basis: &GradedBasis, fc: &FockCode) -> Vec<CVec> {
    (0..fc.k())
        .map(|b| {
            let mut v = CVec::zeros(basis.dim());
            for (w, a) in fc.block_words(b) {
                let i = basis.index_of(w.coords()).expect("word inside basis");
                v[i] += Complex64::new(a, 0.0);
            }
            v
        })
        .collect()
}

/// Dense model of one Fock code: basis, code vectors and `A_r c_i` for every
/// pattern of weight at most `t_max`.
pub struct CodeOracle {
    pub basis: GradedBasis,
    pub states: Vec<CVec>,
    pub gamma: f64,
    patterns: Vec<LossPattern>,
    images: HashMap<LossPattern, CMat>,
}

impl CodeOracle {
    pub fn new(fc: &FockCode, gamma: f64, t_max: u32) -> Result<Self> {
        let shape = fc.shape();
        if t_max > shape.n {
            return Err(Error::domain(format!("t = {t_max} exceeds N = {}", shape.n)));
        }
        let basis = GradedBasis::new(shape.q, shape.n)?;
        let states = code_vectors(&basis, fc);
        let mut oracle = CodeOracle { basis, states, gamma, patterns: Vec::new(), images: HashMap::new() };
        oracle.rebuild(t_max)?;
        Ok(oracle)
    }

    fn rebuild(&mut self, t_max: u32) -> Result<()> {
        let patterns = loss_patterns(self.basis.q(), t_max);
        let c = CMat::from_columns(&self.states);
        let images: Vec<(LossPattern, CMat)> = patterns
            .par_iter()
            .map(|r| build_kraus(&self.basis, r, self.gamma).map(|a| (r.clone(), &a.matrix * &c)))
            .collect::<Result<_>>()?;
        self.images = images.into_iter().collect();
        self.patterns = patterns;
        Ok(())
    }

    /// Scales one coefficient of one code vector without renormalising;
    /// used to check that the oracle suites detect corrupted codes.
    pub fn corrupt_amplitude(&mut self, block: usize, factor: f64) -> Result<()> {
        let v = &mut self.states[block];
        if let Some(i) = (0..v.len()).find(|&i| v[i].norm() > 0.0) {
            v[i] *= factor;
        }
        let t = self.patterns.iter().map(LossPattern::weight).max().unwrap_or(0);
        self.rebuild(t)
    }

    pub fn patterns(&self) -> &[LossPattern] {
        &self.patterns
    }

    pub fn k(&self) -> usize {
        self.states.len()
    }

    /// Columns `A_r c_0, ..., A_r c_{K-1}`.
    pub fn image(&self, r: &LossPattern) -> Result<&CMat> {
        self.images
            .get(r)
            .ok_or_else(|| Error::domain(format!("pattern {r} outside the precomputed range")))
    }

    /// `<c_i| A_r^dag A_r' |c_j>`.
    pub fn inner(&self, i: usize, j: usize, r: &LossPattern, r2: &LossPattern) -> Result<Complex64> {
        if i >= self.k() || j >= self.k() {
            return Err(Error::domain("block index out of range"));
        }
        let a = self.image(r)?.column(i);
        let b = self.image(r2)?.column(j);
        Ok(a.dotc(&b))
    }
}

/// One-off dense evaluation of `<c_i| A_r^dag A_r' |c_j>`.
pub fn bruteforce_inner(
    fc: &FockCode,
    i: usize,
    j: usize,
    r: &LossPattern,
    r2: &LossPattern,
    gamma: f64,
) -> Result<Complex64> {
    let basis = GradedBasis::new(fc.shape().q, fc.shape().n)?;
    let states = code_vectors(&basis, fc);
    if i >= states.len() || j >= states.len() {
        return Err(Error::domain("block index out of range"));
    }
    let a = build_kraus(&basis, r, gamma)?.matrix * &states[i];
    let b = build_kraus(&basis, r2, gamma)?.matrix * &states[j];
    Ok(a.dotc(&b))
}

fn random_unit(rng: &mut impl Rng, len: usize) -> CVec {
    let mut v = CVec::from_fn(len, |_, _| {
        Complex64::new(rng.sample::<f64, _>(StandardNormal), rng.sample::<f64, _>(StandardNormal))
    });
    let n = v.norm();
    v.unscale_mut(n);
    v
}

#[derive(Debug, Clone, Serialize)]
pub struct TraceReport {
    pub q: usize,
    #[serde(rename = "N")]
    pub n: u32,
    pub t: u32,
    pub gamma: f64,
    pub trials: usize,
    pub p_loss: f64,
    pub max_deviation: f64,
}

/// Largest `|sum_{|r| <= t} <psi|A_r^dag A_r|psi> - p_{N,t}|` over random
/// unit states of `H_{q,N}`.
pub fn check_trace_preserving(shape: SimplexShape, t: u32, gamma: f64, trials: usize, seed: u64) -> Result<TraceReport> {
    check_trace_preserving_with(shape, t, gamma, trials, seed, None)
}

/// As [`check_trace_preserving`], optionally scaling the first nonzero entry
/// of `A_0` by `corruption` (fault injection).
pub fn check_trace_preserving_with(
    shape: SimplexShape,
    t: u32,
    gamma: f64,
    trials: usize,
    seed: u64,
    corruption: Option<f64>,
) -> Result<TraceReport> {
    if t > shape.n {
        return Err(Error::domain(format!("t = {t} exceeds N = {}", shape.n)));
    }
    if trials == 0 {
        return Err(Error::domain("trials must be at least 1"));
    }
    let basis = GradedBasis::new(shape.q, shape.n)?;
    let layer = basis.layer(shape.n);
    let mut ops: Vec<CMat> = loss_patterns(shape.q, t)
        .iter()
        .map(|r| build_kraus(&basis, r, gamma).map(|a| a.matrix.columns(layer.start, layer.len()).into_owned()))
        .collect::<Result<_>>()?;
    if let Some(f) = corruption {
        if let Some(x) = ops[0].iter_mut().find(|x| x.norm() > 0.0) {
            *x *= f;
        }
    }
    let p = p_loss(&ChannelParams::new(gamma, shape.n, t)?);
    let max_deviation = (0..trials as u64)
        .into_par_iter()
        .map(|i| {
            let psi = random_unit(&mut rng::stream(seed, i), layer.len());
            let total: f64 = ops.iter().map(|a| (a * &psi).norm_squared()).sum();
            (total - p).abs()
        })
        .reduce(|| 0.0, f64::max);
    Ok(TraceReport { q: shape.q, n: shape.n, t, gamma, trials, p_loss: p, max_deviation })
}

/// `max |(sum_{|r| <= N} A_r^dag A_r - I)_{ab}|` on the excitation-`N` layer.
pub fn check_completeness(shape: SimplexShape, gamma: f64) -> Result<f64> {
    let basis = GradedBasis::new(shape.q, shape.n)?;
    let layer = basis.layer(shape.n);
    let mut sum = CMat::zeros(layer.len(), layer.len());
    for r in loss_patterns(shape.q, shape.n) {
        let a = build_kraus(&basis, &r, gamma)?.matrix.columns(layer.start, layer.len()).into_owned();
        sum += a.adjoint() * a;
    }
    let id = CMat::identity(layer.len(), layer.len());
    Ok((sum - id).iter().map(|x| x.norm()).fold(0.0, f64::max))
}

fn require_orthogonal(fc: &FockCode, t: u32) -> Result<Orthogonality> {
    if let Some((first, second)) = find_duplicate(&fc.classical, &fc.partition) {
        return Err(Error::DuplicateWord { first, second });
    }
    match orthogonality_check(fc, t)? {
        Orthogonality::Failed { witness } => Err(Error::Orthogonality(Box::new(witness))),
        ok => Ok(ok),
    }
}

/// Orthonormal basis of the column span, from the eigenvectors of the Gram
/// matrix with eigenvalue above `rel_tol` times the largest one.
fn range_basis(v: &CMat, rel_tol: f64) -> CMat {
    let gram = v.adjoint() * v;
    let eig = gram.symmetric_eigen();
    let top = eig.eigenvalues.iter().cloned().fold(0.0, f64::max);
    let cols: Vec<CVec> = (0..eig.eigenvalues.len())
        .filter(|&k| top > 0.0 && eig.eigenvalues[k] > rel_tol * top)
        .map(|k| (v * eig.eigenvectors.column(k)).unscale(eig.eigenvalues[k].sqrt()))
        .collect();
    if cols.is_empty() {
        CMat::zeros(v.nrows(), 0)
    } else {
        CMat::from_columns(&cols)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct IdentificationReport {
    pub t: u32,
    pub gamma: f64,
    pub trials: u64,
    pub leq_t_count: u64,
    pub empirical_leq_t_fraction: f64,
    pub p_loss: f64,
    pub binomial_sigma: f64,
    pub correct_id_rate_given_leq_t: f64,
    /// Smallest probability, over trials with weight at most `t`, that the
    /// measurement returns the true pattern.
    pub min_identification_probability: f64,
}

/// Simulates the syndrome measurement `{Pi_r : |r| <= t} + {Pi_>t}` after a
/// Kraus branch sampled exactly from all patterns of weight at most `N`.
pub fn identification_sim(fc: &FockCode, t: u32, gamma: f64, trials: u64, seed: u64) -> Result<IdentificationReport> {
    if trials == 0 {
        return Err(Error::domain("trials must be at least 1"));
    }
    require_orthogonal(fc, t)?;
    let n = fc.shape().n;
    let oracle = CodeOracle::new(fc, gamma, n)?;
    let all = oracle.patterns().to_vec();
    let detect: Vec<(usize, CMat)> = all
        .iter()
        .enumerate()
        .filter(|(_, r)| r.weight() <= t)
        .map(|(i, r)| Ok((i, range_basis(oracle.image(r)?, 1e-12))))
        .collect::<Result<_>>()?;
    let k = oracle.k();
    let outcomes: Vec<(bool, bool, f64)> = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = rng::stream(seed, trial);
            let x = random_unit(&mut rng, k);
            let images: Vec<CVec> = all.iter().map(|r| oracle.image(r).expect("precomputed") * &x).collect();
            let probs: Vec<f64> = images.iter().map(|v| v.norm_squared()).collect();
            let total: f64 = probs.iter().sum();
            let mut u = rng.random::<f64>() * total;
            let mut branch = probs.len() - 1;
            for (i, &pr) in probs.iter().enumerate() {
                if u < pr {
                    branch = i;
                    break;
                }
                u -= pr;
            }
            let phi = images[branch].unscale(probs[branch].sqrt());
            let leq = all[branch].weight() <= t;
            let mut meas: Vec<(usize, f64)> =
                detect.iter().map(|(i, q)| (*i, (q.adjoint() * &phi).norm_squared())).collect();
            let caught: f64 = meas.iter().map(|m| m.1).sum();
            meas.push((usize::MAX, (1.0 - caught).max(0.0)));
            let truth = if leq { branch } else { usize::MAX };
            let p_true = meas.iter().find(|m| m.0 == truth).map_or(0.0, |m| m.1);
            let mut v = rng.random::<f64>() * meas.iter().map(|m| m.1).sum::<f64>();
            let mut outcome = usize::MAX;
            for &(label, pr) in &meas {
                if v < pr {
                    outcome = label;
                    break;
                }
                v -= pr;
            }
            (leq, outcome == truth, if leq { p_true } else { 1.0 })
        })
        .collect();
    let leq: Vec<_> = outcomes.iter().filter(|o| o.0).collect();
    let correct = leq.iter().filter(|o| o.1).count() as f64;
    let p = p_loss(&ChannelParams::new(gamma, n, t)?);
    Ok(IdentificationReport {
        t,
        gamma,
        trials,
        leq_t_count: leq.len() as u64,
        empirical_leq_t_fraction: leq.len() as f64 / trials as f64,
        p_loss: p,
        binomial_sigma: (p * (1.0 - p) / trials as f64).sqrt(),
        correct_id_rate_given_leq_t: if leq.is_empty() { 1.0 } else { correct / leq.len() as f64 },
        min_identification_probability: leq.iter().map(|o| o.2).fold(1.0, f64::min),
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct FidelityReport {
    pub t: u32,
    pub gamma: f64,
    /// Entanglement fidelity on the maximally entangled code state.
    pub fidelity: f64,
    pub branches: usize,
    pub branches_omitted: usize,
}

/// Entanglement fidelity of `R o N_{<=t}` on the maximally entangled state
/// over the code, with the recovery `R_s = U_s^dag` built from the polar
/// isometry `U_s = V_s G_s^{-1/2}` of each branch `V_s = A_s C`.
pub fn recovery_fidelity(fc: &FockCode, t: u32, gamma: f64) -> Result<FidelityReport> {
    require_orthogonal(fc, t)?;
    let n = fc.shape().n;
    let p = p_loss(&ChannelParams::new(gamma, n, t)?);
    if p <= 0.0 {
        return Err(Error::domain("p_{N,t} vanishes"));
    }
    let oracle = CodeOracle::new(fc, gamma, t)?;
    let k = oracle.k();
    let pats = oracle.patterns().to_vec();
    let mut recoveries: Vec<CMat> = Vec::new();
    let mut omitted = 0;
    for s in &pats {
        let v = oracle.image(s)?;
        let eig = (v.adjoint() * v).symmetric_eigen();
        let top = eig.eigenvalues.iter().cloned().fold(0.0, f64::max);
        if top <= 1e-300 {
            omitted += 1;
            continue;
        }
        let mut inv_sqrt = CMat::zeros(k, k);
        for j in 0..k {
            let e = eig.eigenvalues[j];
            if e > 1e-12 * top {
                let u = eig.eigenvectors.column(j);
                inv_sqrt += (u * u.adjoint()).unscale(e.sqrt());
            }
        }
        // R_s restricted to code coordinates: G^{-1/2} V_s^dag.
        recoveries.push(inv_sqrt * v.adjoint());
    }
    let mut acc = Vec::new();
    for rs in &recoveries {
        for r in &pats {
            let e = rs * oracle.image(r)?;
            acc.push(e.trace().norm_sqr() / p);
        }
    }
    let fidelity = crate::bounds::compensated_sum(acc) / (k * k) as f64;
    Ok(FidelityReport { t, gamma, fidelity, branches: recoveries.len(), branches_omitted: omitted })
}
