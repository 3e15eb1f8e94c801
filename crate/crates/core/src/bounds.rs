//! Scalar quantities: binary entropy, the loss tail p_{N,t}, the classical
//! and quantum rate functions, the Skellam constant Delta_alpha, Kraus counts
//! and the conversions between truncated and full damping guarantees.

use std::io::Write;

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};
use statrs::function::factorial::ln_binomial;

use crate::error::{Error, Result};
use crate::simplex::binomial;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelParams {
    pub gamma: f64,
    #[serde(rename = "N")]
    pub n: u32,
    pub t: u32,
}

impl ChannelParams {
    /// `gamma = 0` is accepted as the noiseless edge case.
    pub fn new(gamma: f64, n: u32, t: u32) -> Result<Self> {
        if !(0.0..=1.0).contains(&gamma) {
            return Err(Error::domain(format!("gamma must lie in (0, 1], got {gamma}")));
        }
        Ok(ChannelParams { gamma, n, t })
    }
}

fn check_unit(name: &str, x: f64) -> Result<()> {
    if (0.0..=1.0).contains(&x) {
        Ok(())
    } else {
        Err(Error::domain(format!("{name} must lie in [0, 1], got {x}")))
    }
}

fn xlog2x(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        x * x.log2()
    }
}

/// Binary entropy in bits, with `0 log 0 = 0`.
pub fn h2(x: f64) -> Result<f64> {
    check_unit("h2 argument", x)?;
    Ok(h2_unchecked(x))
}

fn h2_unchecked(x: f64) -> f64 {
    let x = x.clamp(0.0, 1.0);
    -xlog2x(x) - xlog2x(1.0 - x)
}

/// Neumaier compensated sum.
pub(crate) fn compensated_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut sum = 0.0f64;
    let mut c = 0.0f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            c += (sum - t) + v;
        } else {
            c += (v - t) + sum;
        }
        sum = t;
    }
    sum + c
}

/// ln of the binomial pmf term `C(N,k) γ^k (1-γ)^{N-k}` for `0 < γ < 1`.
pub(crate) fn ln_binomial_term(n: u32, k: u32, gamma: f64) -> f64 {
    ln_binomial(n as u64, k as u64) + k as f64 * gamma.ln() + (n - k) as f64 * (-gamma).ln_1p()
}

/// `P[Bin(N, gamma) <= t]`.
pub fn p_loss(params: &ChannelParams) -> f64 {
    let ChannelParams { gamma, n, t } = *params;
    if t >= n || gamma == 0.0 {
        return 1.0;
    }
    if gamma == 1.0 {
        return 0.0;
    }
    // Sum whichever side is shorter so the complement is never cancelled.
    let sum_range = |lo: u32, hi: u32| {
        compensated_sum((lo..=hi).map(|k| ln_binomial_term(n, k, gamma).exp()))
    };
    let mean = n as f64 * gamma;
    let p = if (t as f64) < mean {
        sum_range(0, t)
    } else {
        1.0 - sum_range(t + 1, n)
    };
    p.clamp(0.0, 1.0)
}

fn check_rate_args(delta: f64, alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::domain(format!("alpha must be positive, got {alpha}")));
    }
    if !(0.0..1.0).contains(&delta) {
        return Err(Error::domain(format!("delta must lie in [0, 1), got {delta}")));
    }
    Ok(())
}

/// `(a + d) h2(a / (a + d))`, the recurring ball-volume exponent.
fn ball_term(a: f64, d: f64) -> f64 {
    if a + d == 0.0 {
        return 0.0;
    }
    (a + d) * h2_unchecked(a / (a + d))
}

/// Rate of the greedy construction over the typical set.
pub fn rate_gv(delta: f64, alpha: f64) -> Result<f64> {
    check_rate_args(delta, alpha)?;
    let lead = (1.0 + alpha) * h2_unchecked(1.0 / (1.0 + alpha));
    let mid_w = alpha / (1.0 + alpha) + delta;
    let mid = mid_w * h2_unchecked(alpha / (alpha + (1.0 + alpha) * delta));
    Ok(lead - mid - ball_term(alpha, delta))
}

/// Rate of the uniform random ensemble.
pub fn rate_u(delta: f64, alpha: f64) -> Result<f64> {
    check_rate_args(delta, alpha)?;
    let lead = 0.5 * (1.0 + alpha) * h2_unchecked(1.0 / (1.0 + alpha));
    Ok(lead - ball_term(alpha, delta))
}

/// Simpson estimate on `[a, b]` from the endpoint and midpoint values.
fn simpson(fa: f64, fm: f64, fb: f64, a: f64, b: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

struct Quad<'a> {
    f: &'a dyn Fn(f64) -> f64,
    worst: f64,
    failed: bool,
}

impl Quad<'_> {
    #[allow(clippy::too_many_arguments)]
    fn step(&mut self, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
        let m = 0.5 * (a + b);
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = (self.f)(lm);
        let frm = (self.f)(rm);
        let left = simpson(fa, flm, fm, a, m);
        let right = simpson(fm, frm, fb, m, b);
        let diff = left + right - whole;
        if diff.abs() <= 15.0 * tol {
            return left + right + diff / 15.0;
        }
        if depth == 0 {
            self.failed = true;
            self.worst = self.worst.max(diff.abs() / 15.0);
            return left + right + diff / 15.0;
        }
        self.step(a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
            + self.step(m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
    }
}

/// Adaptive Simpson quadrature with absolute tolerance `tol` and at most
/// `max_depth` bisection levels.
pub fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64, max_depth: u32) -> Result<f64> {
    let fa = f(a);
    let fb = f(b);
    let fm = f(0.5 * (a + b));
    let whole = simpson(fa, fm, fb, a, b);
    let mut q = Quad { f, worst: 0.0, failed: false };
    let v = q.step(a, b, fa, fm, fb, whole, tol, max_depth);
    if q.failed || !v.is_finite() {
        return Err(Error::Quadrature { residual: q.worst });
    }
    Ok(v)
}

pub const QUADRATURE_TOL: f64 = 1e-12;

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!("alpha must be positive, got {alpha}")))
    }
}

/// `Delta_alpha = lim E[d(X, Z)] / N` for independent multinomial words, by
/// adaptive Simpson on
/// `(1/pi) int_0^pi exp(-2(1-cos th)/alpha) (1+cos th) d th`,
/// with `1 - cos th = 2 sin^2(th/2)` and `1 + cos th = 2 cos^2(th/2)`.
///
/// The weight `1 + cos th` is what the Skellam computation produces; the
/// variant with `1 - cos th` is [`delta_alpha_minus_variant`].
pub fn delta_alpha(alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    let f = move |th: f64| {
        let s = (0.5 * th).sin();
        let c = (0.5 * th).cos();
        (-4.0 * s * s / alpha).exp() * 2.0 * c * c
    };
    Ok(adaptive_simpson(&f, 0.0, std::f64::consts::PI, QUADRATURE_TOL, 40)? / std::f64::consts::PI)
}

/// `(1/pi) int_0^pi exp(-2(1-cos th)/alpha) (1-cos th) d th`, which equals
/// `exp(-x)(I0(x) - I1(x))` at `x = 2/alpha` rather than `Delta_alpha`.
pub fn delta_alpha_minus_variant(alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    let f = move |th: f64| {
        let s = (0.5 * th).sin();
        let u = 2.0 * s * s;
        (-2.0 * u / alpha).exp() * u
    };
    Ok(adaptive_simpson(&f, 0.0, std::f64::consts::PI, QUADRATURE_TOL, 40)? / std::f64::consts::PI)
}

/// Same constant from `exp(-x)(I0(x) + I1(x))` at `x = 2/alpha`.
pub fn delta_alpha_bessel(alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    let x = 2.0 / alpha;
    Ok(bessel_i0e(x) + bessel_i1e(x))
}

const SERIES_LIMIT: f64 = 20.0;

/// `exp(-x) I_nu(x)` for `nu in {0, 1}` and `x >= 0`.
///
/// Power series `sum (x/2)^{2k+nu} / (k! (k+nu)!)` for `x <= 20`, stopped when
/// a term drops below `1e-17` of the running sum (at most 200 terms). Above
/// 20 the asymptotic series `(2 pi x)^{-1/2} sum (-1)^k a_k(nu) / x^k`, cut at
/// its smallest term or after 30 terms.
fn bessel_ie(nu: u32, x: f64) -> f64 {
    if x <= SERIES_LIMIT {
        let h = 0.5 * x;
        let h2 = h * h;
        let mut term = if nu == 0 { 1.0 } else { h };
        let mut sum = term;
        for k in 1..200u32 {
            term *= h2 / (k as f64 * (k + nu) as f64);
            sum += term;
            if term < 1e-17 * sum {
                break;
            }
        }
        sum * (-x).exp()
    } else {
        let mu = 4.0 * (nu * nu) as f64;
        let mut term = 1.0f64;
        let mut sum = 1.0f64;
        for k in 1..30u32 {
            let odd = (2 * k - 1) as f64;
            let next = -term * (mu - odd * odd) / (k as f64 * 8.0 * x);
            if next.abs() >= term.abs() {
                break;
            }
            term = next;
            sum += term;
            if term.abs() < 1e-17 * sum.abs() {
                break;
            }
        }
        sum / (2.0 * std::f64::consts::PI * x).sqrt()
    }
}

pub fn bessel_i0e(x: f64) -> f64 {
    bessel_ie(0, x.abs())
}

pub fn bessel_i1e(x: f64) -> f64 {
    x.signum() * bessel_ie(1, x.abs())
}

/// Rate of the multinomial ensemble, `(Delta_alpha - delta)^2 / (8 ln 2)`
/// below `Delta_alpha` and 0 above it.
pub fn rate_m(delta: f64, alpha: f64) -> Result<f64> {
    check_rate_args(delta, alpha)?;
    let d = delta_alpha_bessel(alpha)?;
    if delta >= d {
        return Ok(0.0);
    }
    Ok((d - delta).powi(2) / (8.0 * std::f64::consts::LN_2))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RandomEnsemble {
    Uniform,
    Multinomial,
}

/// Exponent charged for the number of Kraus operators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KrausExponent {
    /// `(1+delta) h2(1/(1+delta))`, as printed with simplices `S_{N,r}`.
    Printed,
    /// `(alpha+delta) h2(alpha/(alpha+delta))`, counting patterns on `S_{alpha N, r}`.
    Modes,
}

/// `R(delta)/3 - (2/3) E(delta)` with `E` the chosen Kraus exponent.
pub fn quantum_rate_bound_with(
    delta: f64,
    alpha: f64,
    ensemble: RandomEnsemble,
    exponent: KrausExponent,
) -> Result<f64> {
    let r = match ensemble {
        RandomEnsemble::Uniform => rate_u(delta, alpha)?,
        RandomEnsemble::Multinomial => rate_m(delta, alpha)?,
    };
    let e = match exponent {
        KrausExponent::Printed => ball_term(1.0, delta),
        KrausExponent::Modes => ball_term(alpha, delta),
    };
    Ok(r / 3.0 - 2.0 / 3.0 * e)
}

pub fn quantum_rate_bound(delta: f64, alpha: f64, ensemble: RandomEnsemble) -> Result<f64> {
    quantum_rate_bound_with(delta, alpha, ensemble, KrausExponent::Printed)
}

/// Rate of the exact construction from a greedy code and a good partition.
pub fn exact_quantum_rate(delta: f64, alpha: f64) -> Result<f64> {
    Ok(rate_gv(delta, alpha)? - ball_term(alpha, delta))
}

/// Number of loss patterns of weight at most `t` on `q` modes.
pub fn kraus_count(q: usize, t: u32) -> Result<BigUint> {
    if q == 0 {
        return Err(Error::domain("q must be at least 1"));
    }
    Ok((0..=t as u64).map(|r| binomial(r + q as u64 - 1, q as u64 - 1)).sum())
}

fn check_p(p: f64) -> Result<()> {
    if p > 0.0 && p <= 1.0 {
        Ok(())
    } else {
        Err(Error::domain(format!("p must lie in (0, 1], got {p}")))
    }
}

/// Truncated-channel guarantee to full-channel guarantee:
/// `sqrt(1 - (1 - eps^2) p)`.
pub fn eps_to_ad(eps: f64, p: f64) -> Result<f64> {
    check_unit("eps", eps)?;
    check_p(p)?;
    Ok((1.0 - (1.0 - eps * eps) * p).max(0.0).sqrt())
}

/// Converse direction: `eps / sqrt(p)`.
pub fn eps_from_ad(eps: f64, p: f64) -> Result<f64> {
    if !(eps >= 0.0) {
        return Err(Error::domain(format!("eps must be nonnegative, got {eps}")));
    }
    check_p(p)?;
    Ok(eps / p.sqrt())
}

/// Bisection root of `f` on `[lo, hi]` to width `tol`.
pub fn zero_crossing(f: impl Fn(f64) -> Result<f64>, lo: f64, hi: f64, tol: f64) -> Result<f64> {
    if !(tol > 0.0) || !(lo < hi) {
        return Err(Error::domain("zero_crossing needs lo < hi and tol > 0"));
    }
    let (mut a, mut b) = (lo, hi);
    let mut fa = f(a)?;
    let fb = f(b)?;
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(Error::NoSignChange { lo, hi });
    }
    while b - a > tol {
        let m = 0.5 * (a + b);
        let fm = f(m)?;
        if fm == 0.0 {
            return Ok(m);
        }
        if fm.signum() == fa.signum() {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    Ok(0.5 * (a + b))
}

/// A rate function of `delta` at fixed `alpha`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "curve", rename_all = "snake_case")]
pub enum Curve {
    Gv { alpha: f64 },
    Uniform { alpha: f64 },
    Multinomial { alpha: f64 },
    QuantumBound { alpha: f64, ensemble: RandomEnsemble, exponent: KrausExponent },
    ExactQuantum { alpha: f64 },
}

impl Curve {
    pub fn eval(&self, delta: f64) -> Result<f64> {
        match *self {
            Curve::Gv { alpha } => rate_gv(delta, alpha),
            Curve::Uniform { alpha } => rate_u(delta, alpha),
            Curve::Multinomial { alpha } => rate_m(delta, alpha),
            Curve::QuantumBound { alpha, ensemble, exponent } => {
                quantum_rate_bound_with(delta, alpha, ensemble, exponent)
            }
            Curve::ExactQuantum { alpha } => exact_quantum_rate(delta, alpha),
        }
    }

    pub fn name(&self) -> String {
        match *self {
            Curve::Gv { alpha } => format!("rate_gv_alpha{alpha}"),
            Curve::Uniform { alpha } => format!("rate_u_alpha{alpha}"),
            Curve::Multinomial { alpha } => format!("rate_m_alpha{alpha}"),
            Curve::QuantumBound { alpha, ensemble, exponent } => {
                let e = match ensemble {
                    RandomEnsemble::Uniform => "uniform",
                    RandomEnsemble::Multinomial => "multinomial",
                };
                let x = match exponent {
                    KrausExponent::Printed => "printed",
                    KrausExponent::Modes => "modes",
                };
                format!("quantum_{e}_{x}_alpha{alpha}")
            }
            Curve::ExactQuantum { alpha } => format!("exact_quantum_alpha{alpha}"),
        }
    }
}

/// `count` evenly spaced points from `lo` to `hi` inclusive.
pub fn linear_grid(lo: f64, hi: f64, count: usize) -> Result<Vec<f64>> {
    if count < 2 || !(lo < hi) {
        return Err(Error::domain("grid needs at least 2 points and lo < hi"));
    }
    let step = (hi - lo) / (count - 1) as f64;
    Ok((0..count).map(|i| if i + 1 == count { hi } else { lo + step * i as f64 }).collect())
}

/// Formats with 12 significant digits, `%g` style.
pub fn format_sig12(v: f64) -> String {
    if v == 0.0 {
        return "0".to_string();
    }
    if !v.is_finite() {
        return v.to_string();
    }
    let s = format!("{v:.11e}");
    let (mant, exp) = s.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("exponent digits");
    if (-5..12).contains(&exp) {
        let decimals = (11 - exp).max(0) as usize;
        let fixed = format!("{v:.decimals$}");
        trim_zeros(&fixed)
    } else {
        format!("{}e{exp}", trim_zeros(mant))
    }
}

fn trim_zeros(s: &str) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s.to_string()
    }
}

/// Writes `delta,value` rows for the grid.
pub fn emit_curve(curve: &Curve, grid: &[f64], mut out: impl Write) -> Result<()> {
    let mut buf = String::from("delta,value\n");
    for &d in grid {
        let v = curve.eval(d)?;
        buf.push_str(&format_sig12(d));
        buf.push(',');
        buf.push_str(&format_sig12(v));
        buf.push('\n');
    }
    out.write_all(buf.as_bytes())?;
    Ok(())
}
