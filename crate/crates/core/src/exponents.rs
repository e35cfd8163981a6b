//! Exponent sequences of a valency profile and the sequence designers.
//!
//! With `p_i = c_i / ((c_i + 1) d_i)` the contraction factors, `k(n)` is the
//! least `k` with `p_0..p_k * n <= 1` and `beta(n) = log(d_0..d_k(n)) / log n`.
//! Thresholds are decided on exact integer products, so `k(n)` never depends
//! on floating point. Logs only enter when a value is reported.

use std::collections::BTreeSet;

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::group_model::{CSeq, GroupSpec, ValencySeq};

/// Every `n` up to this many bits has its `k(n)` and `l(n)` in the cache.
const COVERED_BITS: u64 = 130;

/// Number of levels emitted by the designers; enough to cover every `u128`.
pub const DESIGN_LEVELS: usize = 72;

/// An exponent value `log(numerator) / log(denominator)` with its float view.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Beta {
    pub log_num: BigUint,
    pub log_den: BigUint,
    pub value: f64,
}

impl Beta {
    fn new(log_num: BigUint, log_den: BigUint) -> Self {
        let value = ln_big(&log_num) / ln_big(&log_den);
        Beta { log_num, log_den, value }
    }

    /// Exact comparison `self <= a / b` for a positive rational.
    pub fn le_ratio(&self, a: u32, b: u32) -> bool {
        self.log_num.pow(b) <= self.log_den.pow(a)
    }

    pub fn ge_ratio(&self, a: u32, b: u32) -> bool {
        self.log_num.pow(b) >= self.log_den.pow(a)
    }
}

/// Natural log of a big integer.
pub fn ln_big(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits <= 1000 {
        return x.to_f64().unwrap_or(f64::INFINITY).ln();
    }
    let shift = bits - 64;
    (x >> shift).to_f64().unwrap().ln() + shift as f64 * std::f64::consts::LN_2
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Plateau {
    pub k: usize,
    pub lo: u128,
    pub hi: u128,
}

/// Valency and saturation sequences with cached prefix products.
#[derive(Clone, Debug)]
pub struct ExponentProfile {
    valency: ValencySeq,
    cseq: CSeq,
    /// `d_0..d_k`
    d_prod: Vec<BigUint>,
    /// `c_0..c_k`
    c_prod: Vec<BigUint>,
    /// `(c_0+1)d_0..(c_k+1)d_k`, so that `p_0..p_k = c_prod / q_prod`
    q_prod: Vec<BigUint>,
    /// `d_0^2(c_0+1)..d_k^2(c_k+1)`, so that `d_0/p_0..d_k/p_k = r_prod / c_prod`
    r_prod: Vec<BigUint>,
}

impl ExponentProfile {
    pub fn new(valency: ValencySeq, cseq: CSeq) -> Result<Self> {
        let span = span(&valency, &cseq);
        for l in 0..span {
            let (d, c) = (valency.d(l), cseq.c(l));
            if d < 2 || c == 0 || c >= d {
                return Err(Error::InvalidConfig(format!("level {l}: need d >= 2 and 1 <= c <= d-1, got d={d}, c={c}")));
            }
        }
        let mut me = ExponentProfile { valency, cseq, d_prod: vec![], c_prod: vec![], q_prod: vec![], r_prod: vec![] };
        let (mut d, mut c, mut q, mut r) = (BigUint::one(), BigUint::one(), BigUint::one(), BigUint::one());
        let mut l = 0;
        loop {
            let (dl, cl) = (me.valency.d(l), me.cseq.c(l));
            d *= dl;
            c *= cl;
            q *= (cl + 1) * dl;
            r *= dl * dl * (cl + 1);
            me.d_prod.push(d.clone());
            me.c_prod.push(c.clone());
            me.q_prod.push(q.clone());
            me.r_prod.push(r.clone());
            l += 1;
            if (&q / &c).bits() > COVERED_BITS {
                break;
            }
        }
        Ok(me)
    }

    /// Basic saturation `c_i = d_i - 1`.
    pub fn basic(valency: ValencySeq) -> Self {
        let cseq = CSeq::full(&valency);
        Self::new(valency, cseq).expect("basic saturation is always valid")
    }

    pub fn constant(d: usize) -> Self {
        Self::basic(ValencySeq::constant(d))
    }

    pub fn from_spec(spec: &GroupSpec) -> Self {
        Self::new(spec.valency.clone(), spec.cseq.clone()).expect("validated by build_group")
    }

    pub fn valency(&self) -> &ValencySeq {
        &self.valency
    }

    pub fn cseq(&self) -> &CSeq {
        &self.cseq
    }

    pub fn d(&self, i: usize) -> usize {
        self.valency.d(i)
    }

    /// `p_i` as an exact rational.
    pub fn p(&self, i: usize) -> BigRational {
        let (d, c) = (self.valency.d(i), self.cseq.c(i));
        ratio(c as u64, ((c + 1) * d) as u64)
    }

    /// Distinct `(d_i, c_i)` pairs over all levels.
    pub fn level_pairs(&self) -> BTreeSet<(usize, usize)> {
        (0..span(&self.valency, &self.cseq)).map(|l| (self.valency.d(l), self.cseq.c(l))).collect()
    }

    /// Smallest and largest `p_i`.
    pub fn p_range(&self) -> (f64, f64) {
        self.level_pairs().into_iter().fold((1.0f64, 0.0f64), |(lo, hi), (d, c)| {
            let p = c as f64 / ((c + 1) * d) as f64;
            (lo.min(p), hi.max(p))
        })
    }

    /// `k(n)`: least `k` with `p_0..p_k * n <= 1`.
    pub fn k_of_n(&self, n: u128) -> Result<usize> {
        if n < 2 {
            return Err(Error::Undefined(format!("k(n) needs n >= 2, got {n}")));
        }
        let nb = BigUint::from(n);
        let k = (0..self.q_prod.len())
            .find(|&k| &nb * &self.c_prod[k] <= self.q_prod[k])
            .expect("cache covers every u128");
        debug_assert!(k == 0 || &nb * &self.c_prod[k - 1] > self.q_prod[k - 1]);
        Ok(k)
    }

    pub fn beta_of_n(&self, n: u128) -> Result<Beta> {
        let k = self.k_of_n(n)?;
        Ok(Beta::new(self.d_prod[k].clone(), BigUint::from(n)))
    }

    /// `h(n) = d_0..d_k(n)`, so that `n^beta(n) = h(n)`.
    pub fn h(&self, n: u128) -> Result<BigUint> {
        Ok(self.d_prod[self.k_of_n(n)?].clone())
    }

    /// Maximal runs of `n` sharing the same `k(n)`, clipped to `2..=n_max`.
    pub fn plateaus(&self, n_max: u128) -> Vec<Plateau> {
        let mut out = Vec::new();
        for k in 0..self.q_prod.len() {
            let lo = if k == 0 { 2 } else { to_u128_sat(&(&self.q_prod[k - 1] / &self.c_prod[k - 1])).saturating_add(1) };
            if lo > n_max {
                break;
            }
            let hi = to_u128_sat(&(&self.q_prod[k] / &self.c_prod[k])).min(n_max);
            if lo <= hi {
                out.push(Plateau { k, lo, hi });
            }
        }
        out
    }

    /// `k^theta(n)`: least `k` with `(p_0+theta)..(p_k+theta) * n <= n0`.
    pub fn k_theta(&self, n: u128, theta: &BigRational, n0: u128) -> Result<usize> {
        if n < 2 {
            return Err(Error::Undefined(format!("k(n) needs n >= 2, got {n}")));
        }
        let span = span(&self.valency, &self.cseq);
        for l in 0..span {
            let x = self.p(l) + theta;
            if !x.is_positive() || x >= BigRational::one() {
                return Err(Error::Precondition {
                    witness: format!("theta = {theta}"),
                    reason: format!("p_{l} + theta = {x} is outside (0, 1)"),
                });
            }
        }
        let target = BigRational::new(n0.into(), n.into());
        let mut prod = BigRational::one();
        let mut k = 0;
        loop {
            prod *= self.p(k) + theta;
            if prod <= target {
                return Ok(k);
            }
            k += 1;
        }
    }

    pub fn beta_theta(&self, n: u128, theta: &BigRational, n0: u128) -> Result<Beta> {
        let k = self.k_theta(n, theta, n0)?;
        let num = if k < self.d_prod.len() {
            self.d_prod[k].clone()
        } else {
            (0..=k).fold(BigUint::one(), |acc, i| acc * self.d(i))
        };
        Ok(Beta::new(num, BigUint::from(n)))
    }

    /// Upper bound on `|beta^theta(n) - beta(n)|`.
    ///
    /// Counting the extra (or missing) levels between `k(n)` and
    /// `k^theta(n)`: each perturbed factor is within `(1 + |theta|/P)` of the
    /// unperturbed one, while every level past the crossing contracts by at
    /// least `p + theta` (or `p`). Each level changes `log h(n)` by at most
    /// `log D`.
    pub fn epsilon_bound(&self, n: u128, theta: f64, n0: u128) -> Result<f64> {
        let k = self.k_of_n(n)? as f64;
        let (small_p, big_p) = self.p_range();
        let d_max = self.level_pairs().iter().map(|&(d, _)| d).max().unwrap() as f64;
        let ln_n0 = (n0 as f64).ln();
        let levels = if theta >= 0.0 {
            let up = 1.0 + ((k + 1.0) * (1.0 + theta / small_p).ln() + ln_n0) / (big_p + theta).ln().abs();
            let down = 1.0 + ln_n0 / big_p.ln().abs();
            up.max(down)
        } else {
            let down = 1.0 + ((k + 1.0) * (1.0 + theta / small_p).ln().abs() + ln_n0) / big_p.ln().abs();
            down.max(1.0)
        };
        Ok(levels * d_max.ln() / (n as f64).ln())
    }

    /// `l(n)`: largest `l` with `d_0/p_0..d_l/p_l <= n`.
    pub fn l_of_n(&self, n: u128) -> Result<usize> {
        let nb = BigUint::from(n);
        let fits = |l: usize| self.r_prod[l] <= &nb * &self.c_prod[l];
        if !fits(0) {
            return Err(Error::Undefined(format!("l(n) needs n >= d_0/p_0, got n = {n}")));
        }
        Ok((1..self.r_prod.len()).take_while(|&l| fits(l)).last().unwrap_or(0))
    }

    pub fn beta_prime(&self, n: u128) -> Result<Beta> {
        let l = self.l_of_n(n)?;
        Ok(Beta::new(self.d_prod[l].clone(), BigUint::from(n)))
    }

    /// `(beta_min, beta_max)`: the limit constants over all level pairs.
    pub fn beta_bounds(&self) -> (f64, f64) {
        self.level_pairs().into_iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), (d, c)| {
            let b = beta_dc(d, c).expect("validated pair");
            (lo.min(b), hi.max(b))
        })
    }

    /// A constant `C` with `beta(n) <= beta_max + C / log n` for all `n`.
    ///
    /// The ratio `log h / -log(p_0..p_k)` never exceeds `beta_max`, and
    /// `log n` falls short of `-log(p_0..p_k)` by at most `|log P_min|`.
    pub fn sandwich_constant(&self) -> f64 {
        let (_, hi) = self.beta_bounds();
        hi * self.p_range().0.ln().abs()
    }

    /// Smallest `C` for which the upper sandwich holds on `n_min..=n_max`.
    /// The worst `n` of each plateau is its left end.
    pub fn measured_constant(&self, n_min: u128, n_max: u128) -> f64 {
        let (_, hi) = self.beta_bounds();
        self.plateaus(n_max)
            .into_iter()
            .map(|p| p.lo.max(n_min))
            .filter(|&n| n <= n_max)
            .map(|n| (self.beta_of_n(n).unwrap().value - hi) * (n as f64).ln())
            .fold(0.0, f64::max)
    }
}

fn span(valency: &ValencySeq, cseq: &CSeq) -> usize {
    fn gcd(a: usize, b: usize) -> usize {
        if b == 0 { a } else { gcd(b, a % b) }
    }
    let (a, b) = (valency.pattern.len(), cseq.pattern.len());
    valency.prefix.len().max(cseq.prefix.len()) + a / gcd(a, b) * b
}

fn ratio(a: u64, b: u64) -> BigRational {
    BigRational::new(a.into(), b.into())
}

fn to_u128_sat(x: &BigUint) -> u128 {
    x.to_u128().unwrap_or(u128::MAX)
}

fn check_pair(d: usize, c: usize) -> Result<()> {
    if d < 2 || c == 0 || c >= d {
        return Err(Error::InvalidConfig(format!("need d >= 2 and 1 <= c <= d-1, got d={d}, c={c}")));
    }
    Ok(())
}

/// `beta_d = 1 / (2 - log(d-1)/log d)`.
pub fn beta_const(d: usize) -> Result<f64> {
    beta_dc(d, d.saturating_sub(1))
}

/// `beta'_d = 1 / (3 - log(d-1)/log d)`.
pub fn beta_prime_const(d: usize) -> Result<f64> {
    beta_prime_dc(d, d.saturating_sub(1))
}

/// `beta_{d,c} = 1 / (1 + log((c+1)/c)/log d)`.
pub fn beta_dc(d: usize, c: usize) -> Result<f64> {
    check_pair(d, c)?;
    let (d, c) = (d as f64, c as f64);
    Ok(1.0 / (1.0 + ((c + 1.0) / c).ln() / d.ln()))
}

/// `beta'_{d,c} = 1 / (2 + log((c+1)/c)/log d)`.
pub fn beta_prime_dc(d: usize, c: usize) -> Result<f64> {
    check_pair(d, c)?;
    let (d, c) = (d as f64, c as f64);
    Ok(1.0 / (2.0 + ((c + 1.0) / c).ln() / d.ln()))
}

// ---------------------------------------------------------------------------
// designers

#[derive(Clone, Debug, Serialize)]
pub struct ConstantDesign {
    /// Asymptotic frequency of `d` in the sequence.
    pub lambda: f64,
    pub valency: ValencySeq,
}

fn check_admissible(lo: f64, hi: f64, d: usize, big_d: usize) -> Result<(f64, f64)> {
    if d < 2 || big_d < d {
        return Err(Error::Inadmissible(format!("need 2 <= d <= D, got d={d}, D={big_d}")));
    }
    let bd = beta_const(d)?;
    let bbd = beta_const(big_d)?;
    let slack = 1e-12;
    if lo < bd - slack || hi > bbd + slack || lo > hi {
        return Err(Error::Inadmissible(format!(
            "need beta_d = {bd:.6} <= {lo} <= {hi} <= beta_D = {bbd:.6}"
        )));
    }
    Ok((bd, bbd))
}

/// Two-letter sequence over `{d, D}` whose exponent sequence tends to `beta`.
///
/// The first [`DESIGN_LEVELS`] entries are exact; the stored tail repeats the
/// last entry and is never reached for `n` below `2^128`.
pub fn design_constant(beta: f64, d: usize, big_d: usize) -> Result<ConstantDesign> {
    check_admissible(beta, beta, d, big_d)?;
    let lambda = if d == big_d {
        1.0
    } else {
        let (ld, lbd) = ((d as f64).ln(), (big_d as f64).ln());
        let lp = ((d - 1) as f64 / (d * d) as f64).ln();
        let lbp = ((big_d - 1) as f64 / (big_d * big_d) as f64).ln();
        let l = (lbd + beta * lbp) / (lbd - ld + beta * (lbp - lp));
        if (l - 1.0).abs() < 1e-12 {
            1.0
        } else if l.abs() < 1e-12 {
            0.0
        } else {
            l.clamp(0.0, 1.0)
        }
    };
    let digits: Vec<usize> = (0..DESIGN_LEVELS)
        .map(|i| {
            let emit_small = (lambda * (i + 1) as f64).floor() > (lambda * i as f64).floor();
            if emit_small { d } else { big_d }
        })
        .collect();
    Ok(ConstantDesign { lambda, valency: into_valency(digits) })
}

fn into_valency(mut digits: Vec<usize>) -> ValencySeq {
    let last = digits.pop().unwrap();
    ValencySeq::new(digits, vec![last]).expect("digits are valid valencies")
}

/// Target `(alpha, beta)` for the oscillating designer, with rational bounds.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DesignTarget {
    /// `alpha = alpha.0 / alpha.1`
    pub alpha: (u32, u32),
    pub beta: (u32, u32),
    pub d: usize,
    pub big_d: usize,
}

impl DesignTarget {
    pub fn new(alpha: (u32, u32), beta: (u32, u32), d: usize, big_d: usize) -> Result<Self> {
        if alpha.1 == 0 || beta.1 == 0 {
            return Err(Error::Inadmissible("zero denominator".into()));
        }
        let (a, b) = (alpha.0 as f64 / alpha.1 as f64, beta.0 as f64 / beta.1 as f64);
        if !(0.5..1.0).contains(&a) || !(0.5..1.0).contains(&b) {
            return Err(Error::Inadmissible(format!("alpha = {a} and beta = {b} must lie in [1/2, 1)")));
        }
        check_admissible(a, b, d, big_d)?;
        Ok(DesignTarget { alpha: reduce(alpha), beta: reduce(beta), d, big_d })
    }

    /// Rounds `alpha` and `beta` to the nearest rationals with denominator at
    /// most 1000.
    pub fn from_f64(alpha: f64, beta: f64, d: usize, big_d: usize) -> Result<Self> {
        Self::new(approx_ratio(alpha), approx_ratio(beta), d, big_d)
    }

    pub fn alpha_f64(&self) -> f64 {
        self.alpha.0 as f64 / self.alpha.1 as f64
    }

    pub fn beta_f64(&self) -> f64 {
        self.beta.0 as f64 / self.beta.1 as f64
    }
}

fn reduce((a, b): (u32, u32)) -> (u32, u32) {
    fn gcd(a: u32, b: u32) -> u32 {
        if b == 0 { a } else { gcd(b, a % b) }
    }
    let g = gcd(a, b).max(1);
    (a / g, b / g)
}

fn approx_ratio(x: f64) -> (u32, u32) {
    (1..=1000u32)
        .map(|b| ((x * b as f64).round() as u32, b))
        .min_by(|p, q| {
            let e = |(a, b): (u32, u32)| (a as f64 / b as f64 - x).abs();
            e(*p).partial_cmp(&e(*q)).unwrap()
        })
        .map(reduce)
        .unwrap()
}

/// Lazy generator for the oscillating design.
///
/// A `d`-block runs until the running ratio `log(d_0..d_k) / -log(p_0..p_k)`
/// first drops to `alpha`; a `D`-block then runs until it first reaches
/// `beta`. Both crossings are decided on exact integer powers.
#[derive(Clone, Debug)]
pub struct OscillatingDesign {
    target: DesignTarget,
    small_phase: bool,
    index: usize,
    h: BigUint,
    c: BigUint,
    q: BigUint,
    switches: Vec<usize>,
}

impl OscillatingDesign {
    pub fn new(target: DesignTarget) -> Self {
        OscillatingDesign {
            target,
            small_phase: true,
            index: 0,
            h: BigUint::one(),
            c: BigUint::one(),
            q: BigUint::one(),
            switches: Vec::new(),
        }
    }

    /// Indices at which the emitted letter changes.
    pub fn switches(&self) -> &[usize] {
        &self.switches
    }

    /// The first `levels` entries as a profile, with the switch indices.
    pub fn take_profile(target: DesignTarget, levels: usize) -> (ExponentProfile, Vec<usize>) {
        let mut gen = OscillatingDesign::new(target);
        let digits: Vec<usize> = gen.by_ref().take(levels).collect();
        let profile = ExponentProfile::basic(into_valency(digits));
        (profile, gen.switches)
    }
}

impl Iterator for OscillatingDesign {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        let t = &self.target;
        let digit = if self.small_phase { t.d } else { t.big_d };
        self.h *= digit;
        self.c *= digit - 1;
        self.q *= digit * digit;
        // ratio <= a/b  <=>  h^b * c^a <= q^a
        let cross = |(a, b): (u32, u32)| (self.h.pow(b) * self.c.pow(a)).cmp(&self.q.pow(a));
        let switch = if self.small_phase {
            cross(t.alpha).is_le()
        } else {
            cross(t.beta).is_ge()
        };
        self.index += 1;
        if switch {
            self.small_phase = !self.small_phase;
            self.switches.push(self.index);
        }
        Some(digit)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct OscillationReport {
    /// Smallest `C` with `alpha - C/log n <= beta(n) <= beta + C/log n` on the range.
    pub c: f64,
    pub min_beta: f64,
    pub max_beta: f64,
    /// Some `n` has `beta(n) <= alpha + C/log n`.
    pub attains_alpha: bool,
    /// Some `n` has `beta(n) >= beta - C/log n`.
    pub attains_beta: bool,
}

/// Measures the sandwich constant of `profile` against `[alpha, beta]` over
/// `n_min..=n_max`, using plateau ends where `beta(n)` is extremal.
pub fn oscillation_report(profile: &ExponentProfile, alpha: f64, beta: f64, n_min: u128, n_max: u128) -> OscillationReport {
    let mut points = Vec::new();
    for p in profile.plateaus(n_max) {
        for n in [p.lo.max(n_min), p.hi] {
            if n >= n_min && n <= n_max {
                points.push((n, profile.beta_of_n(n).unwrap().value));
            }
        }
    }
    let ln = |n: u128| (n as f64).ln();
    let c = points
        .iter()
        .map(|&(n, b)| ((b - beta) * ln(n)).max((alpha - b) * ln(n)))
        .fold(0.0, f64::max);
    OscillationReport {
        c,
        min_beta: points.iter().map(|x| x.1).fold(f64::INFINITY, f64::min),
        max_beta: points.iter().map(|x| x.1).fold(f64::NEG_INFINITY, f64::max),
        attains_alpha: points.iter().any(|&(n, b)| b <= alpha + c / ln(n)),
        attains_beta: points.iter().any(|&(n, b)| b >= beta - c / ln(n)),
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Checkpoint {
    pub x: f64,
    pub h: f64,
    pub g: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct Approximation {
    pub valency: ValencySeq,
    /// `D / d`: the certified factor at checkpoints.
    pub c: f64,
    pub checkpoints: Vec<Checkpoint>,
    /// Extremes of `h(x_k) / g(x_k)` over the checkpoints.
    pub min_ratio: f64,
    pub max_ratio: f64,
}

impl Approximation {
    pub fn certified(&self) -> bool {
        let tol = 1e-9;
        self.min_ratio >= 1.0 / self.c * (1.0 - tol) && self.max_ratio <= self.c * (1.0 + tol)
    }
}

/// Greedy sequence whose `h(x)` tracks `g(x)` within `D/d` at every
/// checkpoint `x_k = 1/(p_0..p_k)`, for checkpoints up to `x_max`.
pub fn approximate_function(g: impl Fn(f64) -> f64, d: usize, big_d: usize, x_max: f64) -> Result<Approximation> {
    if d < 2 || big_d < d {
        return Err(Error::Inadmissible(format!("need 2 <= d <= D, got d={d}, D={big_d}")));
    }
    let tol = 1e-9;
    let grow = |e: usize| (e * e) as f64 / (e - 1) as f64;
    let (mut x, mut h) = (1.0f64, 1.0f64);
    let mut digits = Vec::new();
    let mut checkpoints = Vec::new();
    while x <= x_max {
        let gx = g(x);
        if (d as f64) * gx > g(grow(d) * x) * (1.0 + tol) {
            return Err(Error::Precondition {
                witness: format!("{x}"),
                reason: format!("d*g(x) > g(d^2 x/(d-1)) for d = {d}"),
            });
        }
        if g(grow(big_d) * x) > (big_d as f64) * gx * (1.0 + tol) {
            return Err(Error::Precondition {
                witness: format!("{x}"),
                reason: format!("g(D^2 x/(D-1)) > D*g(x) for D = {big_d}"),
            });
        }
        let e = if h >= gx { d } else { big_d };
        digits.push(e);
        x *= grow(e);
        h *= e as f64;
        checkpoints.push(Checkpoint { x, h, g: g(x) });
    }
    while digits.len() < 2 {
        digits.push(d);
    }
    let ratios = checkpoints.iter().map(|c| c.h / c.g);
    let min_ratio = ratios.clone().fold(f64::INFINITY, f64::min);
    let max_ratio = ratios.fold(f64::NEG_INFINITY, f64::max);
    Ok(Approximation {
        valency: into_valency(digits),
        c: big_d as f64 / d as f64,
        checkpoints,
        min_ratio,
        max_ratio,
    })
}

// ---------------------------------------------------------------------------
// pseudo-period exponents

/// A positive function on a contiguous integer range, stored as runs of
/// constant value: `H(n) = exp(ln_values[i])` for `starts[i] <= n < starts[i+1]`,
/// the last run ending at `end`.
#[derive(Clone, Debug, Serialize)]
pub struct StepTable {
    starts: Vec<u128>,
    ln_values: Vec<f64>,
    end: u128,
}

impl StepTable {
    pub fn new(starts: Vec<u128>, ln_values: Vec<f64>, end: u128) -> Result<Self> {
        if starts.is_empty() || starts.len() != ln_values.len() {
            return Err(Error::InvalidConfig("step table is empty or ragged".into()));
        }
        if starts[0] < 2 || starts.windows(2).any(|w| w[0] >= w[1]) || *starts.last().unwrap() > end {
            return Err(Error::InvalidConfig("step table starts must increase from n >= 2 up to the end".into()));
        }
        Ok(StepTable { starts, ln_values, end })
    }

    /// One entry per integer, `values[i] = H(start + i)`.
    pub fn sampled(start: u128, values: &[f64]) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidConfig("empty table".into()));
        }
        let starts = (0..values.len() as u128).map(|i| start + i).collect();
        let end = start + values.len() as u128 - 1;
        Self::new(starts, values.iter().map(|v| v.ln()).collect(), end)
    }

    /// The model function `H(n) = n^beta(n) = h(n)` of a profile on `lo..=hi`.
    pub fn from_profile(profile: &ExponentProfile, lo: u128, hi: u128) -> Result<Self> {
        let mut starts = Vec::new();
        let mut vals = Vec::new();
        for p in profile.plateaus(hi) {
            if p.hi < lo {
                continue;
            }
            starts.push(p.lo.max(lo));
            vals.push(ln_big(&profile.d_prod[p.k]));
        }
        Self::new(starts, vals, hi)
    }

    fn runs(&self) -> impl Iterator<Item = (u128, u128, f64)> + '_ {
        (0..self.starts.len()).map(|i| {
            let e = self.starts.get(i + 1).map_or(self.end, |s| s - 1);
            (self.starts[i], e, self.ln_values[i])
        })
    }

    /// Maximal intervals of `n` with `H(n) <= n^a` (`below`) or `H(n) >= n^a`.
    fn region(&self, a: f64, below: bool) -> Vec<(u128, u128)> {
        let mut out: Vec<(u128, u128)> = Vec::new();
        for (s, e, v) in self.runs() {
            // on a run, H(n) <= n^a  <=>  n >= exp(v/a)
            let t = (v / a).exp();
            let (lo, hi) = if below {
                (s.max(ceil_u128(t)), e)
            } else {
                (s, e.min(floor_u128(t)))
            };
            if lo <= hi {
                match out.last_mut() {
                    Some(last) if last.1 + 1 == lo => last.1 = hi,
                    _ => out.push((lo, hi)),
                }
            }
        }
        out
    }
}

fn ceil_u128(t: f64) -> u128 {
    if t >= u128::MAX as f64 { u128::MAX } else { t.ceil().max(0.0) as u128 }
}

fn floor_u128(t: f64) -> u128 {
    if t >= u128::MAX as f64 { u128::MAX } else { t.floor().max(0.0) as u128 }
}

#[derive(Clone, Debug, Serialize)]
pub struct PseudoPeriods {
    /// `sup log m / log n` over `n` with `H(n) <= n^alpha`, `m >= n` the first
    /// point with `H(m) >= m^beta`; `None` when no pair fits in the range.
    pub u_est: Option<f64>,
    pub u_witness: Option<(u128, u128)>,
    pub l_est: Option<f64>,
    pub l_witness: Option<(u128, u128)>,
    /// `(alpha - 1) / (beta - 1)`.
    pub u_ref: f64,
    /// `beta / alpha`.
    pub l_lower: f64,
    /// `(beta - 1/2) / (alpha - 1/2)`.
    pub l_upper: f64,
}

/// Empirical upper and lower pseudo-period exponents of a table.
///
/// Points whose partner falls outside the table are dropped, so the
/// estimates are suprema over the uncensored part of the range.
pub fn pseudo_period_exponents(table: &StepTable, alpha: f64, beta: f64) -> Result<PseudoPeriods> {
    if !(alpha <= beta && alpha > 0.0 && beta < 1.0) {
        return Err(Error::InvalidConfig(format!("need 0 < alpha <= beta < 1, got {alpha}, {beta}")));
    }
    let low = table.region(alpha, true);
    let high = table.region(beta, false);
    let (u_est, u_witness) = sweep(&low, &high);
    let (l_est, l_witness) = sweep(&high, &low);
    Ok(PseudoPeriods {
        u_est,
        u_witness,
        l_est,
        l_witness,
        u_ref: (alpha - 1.0) / (beta - 1.0),
        l_lower: beta / alpha,
        l_upper: if alpha > 0.5 { (beta - 0.5) / (alpha - 0.5) } else { f64::INFINITY },
    })
}

/// For every start point in `from`, the first point of `to` at or after it;
/// returns the worst `log m / log n`.
fn sweep(from: &[(u128, u128)], to: &[(u128, u128)]) -> (Option<f64>, Option<(u128, u128)>) {
    let mut best: Option<(f64, (u128, u128))> = None;
    let mut j = 0;
    for &(a, b) in from {
        // inside one interval the worst start is the first point not in `to`
        let mut n = a;
        loop {
            while j < to.len() && to[j].1 < n {
                j += 1;
            }
            let Some(&(c, e)) = to.get(j) else { break };
            let m = c.max(n);
            if m > n || e >= b {
                let nu = (m as f64).ln() / (n as f64).ln();
                if best.is_none_or(|(x, _)| nu > x) {
                    best = Some((nu, (n, m)));
                }
            }
            if m == n && e < b {
                n = e + 1;
                continue;
            }
            break;
        }
    }
    (best.map(|x| x.0), best.map(|x| x.1))
}

#[cfg(test)]
mod tests {
    use num_traits::Zero;

    use super::*;

    fn binary() -> ExponentProfile {
        ExponentProfile::constant(2)
    }

    #[test]
    fn binary_values() {
        let p = binary();
        assert_eq!(p.k_of_n(16).unwrap(), 1);
        let b = p.beta_of_n(16).unwrap();
        assert!(b.le_ratio(1, 2) && b.ge_ratio(1, 2));
        assert_eq!(p.l_of_n(64).unwrap(), 1);
        let b = p.beta_prime(64).unwrap();
        assert!(b.le_ratio(1, 3) && b.ge_ratio(1, 3));
        assert!(p.l_of_n(7).is_err());
        assert!(p.k_of_n(1).is_err());
    }

    #[test]
    fn first_threshold() {
        let p = ExponentProfile::constant(5);
        // 1/p_0 = 25/4
        assert_eq!(p.k_of_n(6).unwrap(), 0);
        assert!((p.beta_of_n(6).unwrap().value - 5f64.ln() / 6f64.ln()).abs() < 1e-15);
        assert_eq!(p.k_of_n(7).unwrap(), 1);
    }

    #[test]
    fn constants() {
        assert!((beta_const(2).unwrap() - 0.5).abs() < 1e-15);
        assert!((beta_const(3).unwrap() - 0.7304).abs() < 1e-4);
        assert!((beta_prime_const(2).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        for d in 2..=16 {
            assert!((beta_dc(d, d - 1).unwrap() - beta_const(d).unwrap()).abs() < 1e-14);
            let q = d as f64;
            assert!((beta_dc(d, 1).unwrap() - 1.0 / (1.0 + 2f64.ln() / q.ln())).abs() < 1e-15);
            if d > 2 {
                assert!(beta_prime_const(d).unwrap() > beta_prime_const(d - 1).unwrap());
            }
        }
        assert!(beta_dc(3, 3).is_err());
        assert!(beta_dc(1, 0).is_err());
    }

    #[test]
    fn ternary_converges() {
        let p = ExponentProfile::constant(3);
        let b3 = beta_const(3).unwrap();
        let c = p.sandwich_constant();
        for n in [1_000_000u128, 1_000_000_000, 1 << 60, 1 << 100] {
            let b = p.beta_of_n(n).unwrap().value;
            assert!(b >= b3 && b <= b3 + c / (n as f64).ln(), "n={n} beta={b}");
        }
    }

    #[test]
    fn theta_zero_matches_and_is_monotone() {
        let p = binary();
        let zero = BigRational::zero();
        let up = BigRational::new(1.into(), 100.into());
        for n in [2u128, 10, 1000, 123456, 1 << 40] {
            assert_eq!(p.k_theta(n, &zero, 1).unwrap(), p.k_of_n(n).unwrap());
            assert!(p.k_theta(n, &up, 1).unwrap() >= p.k_of_n(n).unwrap());
            assert!(p.k_theta(n, &-up.clone(), 1).unwrap() <= p.k_of_n(n).unwrap());
        }
        assert!(p.k_theta(10, &BigRational::new((-1).into(), 4.into()), 1).is_err());
    }

    #[test]
    fn plateaus_partition_the_range() {
        let p = ExponentProfile::basic(ValencySeq::new(vec![], vec![2, 3]).unwrap());
        let ps = p.plateaus(100_000);
        assert_eq!(ps[0].lo, 2);
        for w in ps.windows(2) {
            assert_eq!(w[0].hi + 1, w[1].lo);
        }
        for pl in &ps {
            assert_eq!(p.k_of_n(pl.lo).unwrap(), pl.k);
            assert_eq!(p.k_of_n(pl.hi).unwrap(), pl.k);
        }
    }

    #[test]
    fn design_constant_endpoints() {
        let b2 = beta_const(2).unwrap();
        let b16 = beta_const(16).unwrap();
        let lo = design_constant(b2, 2, 16).unwrap();
        assert_eq!(lo.lambda, 1.0);
        assert!(lo.valency.values().iter().all(|&d| d == 2));
        let hi = design_constant(b16, 2, 16).unwrap();
        assert_eq!(hi.lambda, 0.0);
        assert!(hi.valency.values().iter().all(|&d| d == 16));
        assert!(design_constant(0.4, 2, 16).is_err());
        assert!(design_constant(0.99, 2, 16).is_err());
    }

    #[test]
    fn oscillating_alternates_blocks() {
        let t = DesignTarget::from_f64(0.5, 0.75, 2, 16).unwrap();
        assert_eq!(t.alpha, (1, 2));
        assert_eq!(t.beta, (3, 4));
        let (profile, switches) = OscillatingDesign::take_profile(t, DESIGN_LEVELS);
        assert!(!switches.is_empty());
        assert_eq!(profile.d(0), 2);
        assert_eq!(profile.d(switches[0]), 16);
        assert!(DesignTarget::from_f64(0.4, 0.75, 2, 16).is_err());
        assert!(DesignTarget::from_f64(0.6, 0.99, 2, 16).is_err());
    }

    #[test]
    fn approximate_fixed_point() {
        let b2 = beta_const(2).unwrap();
        let a = approximate_function(|x| x.powf(b2), 2, 16, 1e12).unwrap();
        assert!(a.certified());
        let big = a.valency.prefix.iter().filter(|&&d| d == 16).count();
        assert!(big <= 1, "{:?}", a.valency);
    }

    #[test]
    fn approximate_rejects_slow_growth() {
        match approximate_function(|x| x.powf(0.3), 2, 16, 1e12) {
            Err(Error::Precondition { witness, .. }) => assert_eq!(witness, "1"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn pseudo_period_references() {
        let t = StepTable::sampled(2, &[1.0; 10]).unwrap();
        let r = pseudo_period_exponents(&t, 0.6, 0.8).unwrap();
        assert!((r.u_ref - 2.0).abs() < 1e-12);
        let r = pseudo_period_exponents(&t, 0.7, 0.7).unwrap();
        assert!((r.u_ref - 1.0).abs() < 1e-12);
        assert!(StepTable::sampled(2, &[]).is_err());
        assert!(StepTable::new(vec![5, 3], vec![0.0, 0.0], 9).is_err());
    }

    #[test]
    fn pseudo_period_on_a_hand_table() {
        // H(n) = 1 on 2..=9 (below n^a), H jumps to 1000 on 10..=20.
        let t = StepTable::new(vec![2, 10], vec![0.0, 1000f64.ln()], 20).unwrap();
        let r = pseudo_period_exponents(&t, 0.5, 0.9).unwrap();
        assert_eq!(r.u_witness, Some((2, 10)));
        assert!((r.u_est.unwrap() - 10f64.ln() / 2f64.ln()).abs() < 1e-12);
        // after 10..=20 nothing falls back below n^0.5
        assert_eq!(r.l_est, None);
    }
}
