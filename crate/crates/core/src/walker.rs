//! Random alternate words, Monte-Carlo estimators and exact convolution.
//!
//! The walk `Y_n = s_1 k_1 s_2 .. k_n s_{n+1}` has every `s_i` uniform on the
//! rooted group and every `k_i` uniform on `HF`, all independent. It is the
//! simple random walk for the generating set `S.HF.S`.
//!
//! Sampling is split into fixed batches of [`BATCH`] samples. Batch `b` at
//! length `n` draws from the ChaCha8 stream `(n << 32) | b` of the seed, and
//! batch results are merged in batch order, so every statistic is
//! bit-identical whatever the thread count.

use std::collections::{BTreeMap, HashMap, VecDeque};

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::group_model::GroupSpec;
use crate::words::{activity, activity_support, canonical_key, rewrite_step, AlternateWord, CanonicalForm};

pub const BATCH: usize = 256;

/// Default cap on the number of distinct elements held by the exact engines.
pub const DEFAULT_KEY_BUDGET: usize = 1_000_000;

/// The RNG for batch `batch` of the length-`n` experiment.
pub fn substream(seed: u64, n: usize, batch: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((n as u64) << 32) | batch as u64);
    rng
}

/// Uniform random alternate word of length `n` at the root.
pub fn sample_word<R: Rng>(spec: &GroupSpec, n: usize, rng: &mut R) -> AlternateWord {
    let so = spec.s_group(0).order() as u32;
    let ko = spec.hf_order() as u32;
    let mut s = Vec::with_capacity(n + 1);
    let mut k = Vec::with_capacity(n);
    for _ in 0..n {
        s.push(rng.random_range(0..so));
        k.push(spec.hf_norm(0, rng.random_range(0..ko)));
    }
    s.push(rng.random_range(0..so));
    AlternateWord { level: 0, s, k }
}

/// Runs `per_sample` on `samples` words of length `n`, batch-parallel, and
/// returns the results in sample order.
fn map_samples<T: Send>(
    spec: &GroupSpec,
    n: usize,
    samples: usize,
    seed: u64,
    per_sample: impl Fn(&AlternateWord) -> T + Sync,
) -> Vec<T> {
    let batches = samples.div_ceil(BATCH);
    let chunks: Vec<Vec<T>> = (0..batches)
        .into_par_iter()
        .map(|b| {
            let mut rng = substream(seed, n, b);
            let count = BATCH.min(samples - b * BATCH);
            (0..count).map(|_| per_sample(&sample_word(spec, n, &mut rng))).collect()
        })
        .collect();
    chunks.into_iter().flatten().collect()
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct Estimate {
    pub mean: f64,
    pub stderr: f64,
}

impl Estimate {
    pub fn from_values(xs: impl Iterator<Item = f64> + Clone) -> Self {
        let (mut n, mut sum) = (0usize, 0.0);
        for x in xs.clone() {
            n += 1;
            sum += x;
        }
        if n == 0 {
            return Estimate::default();
        }
        let mean = sum / n as f64;
        let var = if n > 1 { xs.map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1) as f64 } else { 0.0 };
        Estimate { mean, stderr: (var / n as f64).sqrt() }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct WalkStats {
    pub n: usize,
    pub samples: usize,
    pub activity: Estimate,
    pub support: Estimate,
    /// Mean of `(1/#F)^a(Y_n)`, an unbiased estimate of `P(phi_n = id)`.
    pub phi_trivial: Estimate,
    /// Natural log of `phi_trivial.mean`, for lengths where it underflows
    /// any useful precision.
    pub phi_trivial_ln: f64,
    /// `hist[m]`: number of first-level children of length `m`, pooled over
    /// all coordinates and samples.
    pub child_hist: Vec<u64>,
}

impl WalkStats {
    /// Relative standard error of the phi-trivial estimate above which the
    /// value should be read as an order of magnitude only.
    pub const PHI_WARN: f64 = 0.5;

    pub fn phi_trivial_unreliable(&self) -> bool {
        self.phi_trivial.mean == 0.0 || self.phi_trivial.stderr > Self::PHI_WARN * self.phi_trivial.mean
    }
}

/// Monte-Carlo estimates of activity, boundary support and phi-triviality.
pub fn estimate_walk(spec: &GroupSpec, n: usize, samples: usize, seed: u64) -> Result<WalkStats> {
    if samples < 30 {
        return Err(Error::InvalidConfig(format!("need at least 30 samples, got {samples}")));
    }
    let inv_f = 1.0 / spec.f_order() as f64;
    let rows = map_samples(spec, n, samples, seed, |w| {
        let (a, supp) = activity_support(spec, w);
        let lengths: Vec<usize> = if n == 0 { Vec::new() } else { rewrite_step(spec, w).0.iter().map(|c| c.len()).collect() };
        (a, supp, lengths)
    });
    let mut child_hist = vec![0u64; n + 1];
    for (_, _, ls) in &rows {
        for &m in ls {
            child_hist[m] += 1;
        }
    }
    while child_hist.len() > 1 && *child_hist.last().unwrap() == 0 {
        child_hist.pop();
    }
    let phi = Estimate::from_values(rows.iter().map(|r| inv_f.powi(r.0 as i32)));
    Ok(WalkStats {
        n,
        samples,
        activity: Estimate::from_values(rows.iter().map(|r| r.0 as f64)),
        support: Estimate::from_values(rows.iter().map(|r| r.1 as f64)),
        phi_trivial: phi,
        phi_trivial_ln: phi.mean.ln(),
        child_hist,
    })
}

/// Plug-in entropy of the empirical law of sampled elements, in nats.
/// Biased low whenever the support is not well covered by the sample.
pub fn plugin_entropy(spec: &GroupSpec, n: usize, samples: usize, seed: u64, budget: usize) -> Result<f64> {
    let keys = map_samples(spec, n, samples, seed, |w| canonical_key(spec, w, budget));
    let mut counts: HashMap<CanonicalForm, u64> = HashMap::new();
    for k in keys {
        *counts.entry(k?).or_default() += 1;
    }
    // fixed summation order keeps the result bit-identical across runs
    let mut counts: Vec<u64> = counts.into_values().collect();
    counts.sort_unstable();
    let t = samples as f64;
    Ok(-counts.iter().map(|&c| c as f64 / t * (c as f64 / t).ln()).sum::<f64>())
}

// ---------------------------------------------------------------------------
// child lengths

#[derive(Clone, Debug, Serialize)]
pub struct ChildLengthReport {
    pub n: usize,
    pub samples: usize,
    /// `hist[t][m]`: samples whose coordinate `t` has length `m`.
    pub hist: Vec<Vec<u64>>,
    pub p0: f64,
    /// Largest total-variation distance, over coordinates, to `Binomial(n, p0)`.
    pub tv_binomial: f64,
    /// Largest total-variation distance to the exact law of the number of
    /// `HF` packs.
    pub tv_exact: f64,
}

/// Empirical law of the child lengths `m_t` compared with `Binomial(n, p0)`
/// and with the exact pack-count law.
pub fn child_length_distribution(spec: &GroupSpec, n: usize, samples: usize, seed: u64) -> Result<ChildLengthReport> {
    if n == 0 {
        return Err(Error::InvalidConfig("child lengths need n >= 1".into()));
    }
    let d = spec.d(0);
    let c = spec.c(0);
    let rows = map_samples(spec, n, samples, seed, |w| {
        rewrite_step(spec, w).0.iter().map(|x| x.len()).collect::<Vec<_>>()
    });
    let mut hist = vec![vec![0u64; n + 1]; d];
    for r in &rows {
        for (t, &m) in r.iter().enumerate() {
            hist[t][m] += 1;
        }
    }
    let p0 = c as f64 / ((c + 1) * d) as f64;
    let binom = binomial_pmf(n, p0);
    let exact = pack_count_pmf(n, d, c);
    let tv = |h: &[u64], law: &[f64]| -> f64 {
        0.5 * h.iter().zip(law).map(|(&x, &p)| (x as f64 / samples as f64 - p).abs()).sum::<f64>()
    };
    Ok(ChildLengthReport {
        n,
        samples,
        p0,
        tv_binomial: hist.iter().map(|h| tv(h, &binom)).fold(0.0, f64::max),
        tv_exact: hist.iter().map(|h| tv(h, &exact)).fold(0.0, f64::max),
        hist,
    })
}

/// Fraction of coordinates with `|m_t/n - p0| > theta`.
pub fn child_length_tail(report: &ChildLengthReport, theta: f64) -> f64 {
    let n = report.n as f64;
    let (mut out, mut all) = (0u64, 0u64);
    for h in &report.hist {
        for (m, &x) in h.iter().enumerate() {
            all += x;
            if (m as f64 / n - report.p0).abs() > theta {
                out += x;
            }
        }
    }
    out as f64 / all as f64
}

pub fn binomial_pmf(n: usize, p: f64) -> Vec<f64> {
    let ln_fact: Vec<f64> = std::iter::once(0.0)
        .chain((1..=n).scan(0.0, |acc, i| {
            *acc += (i as f64).ln();
            Some(*acc)
        }))
        .collect();
    (0..=n)
        .map(|k| {
            (ln_fact[n] - ln_fact[k] - ln_fact[n - k] + k as f64 * p.ln() + (n - k) as f64 * (1.0 - p).ln()).exp()
        })
        .collect()
}

/// Law of the number of `HF` packs in a child word.
///
/// Along the word, the child at a fixed coordinate receives an `HF` letter
/// with probability `1/d`, an `S` letter with probability `c/d`, and nothing
/// otherwise, independently at every step. Packs are the maximal runs of
/// `HF` letters not separated by an `S` letter.
pub fn pack_count_pmf(n: usize, d: usize, c: usize) -> Vec<f64> {
    let (pk, ps) = (1.0 / d as f64, c as f64 / d as f64);
    let pz = 1.0 - pk - ps;
    // state: last letter received was HF (true) or not
    let mut dist = vec![[0.0f64; 2]; n + 1];
    dist[0][0] = 1.0;
    for _ in 0..n {
        let mut next = vec![[0.0f64; 2]; n + 1];
        for m in 0..=n {
            let [off, on] = dist[m];
            if off == 0.0 && on == 0.0 {
                continue;
            }
            next[m][0] += (off + on) * ps + off * pz;
            next[m][1] += on * (pk + pz);
            if m < n {
                next[m + 1][1] += off * pk;
            }
        }
        dist = next;
    }
    dist.into_iter().map(|[a, b]| a + b).collect()
}

/// Exhaustive check that, conditioned on its length, a child word of a
/// uniform alternate word has uniform independent interior factors.
///
/// For every length `m` and coordinate `t`, the multiset of interior factor
/// tuples `(k_1, s_2, .., s_m, k_m)` must be an exact multiple of the
/// product of the uniform laws (pushed through `HF` normalization).
pub fn conditioned_child_uniformity(spec: &GroupSpec, n: usize) -> Result<bool> {
    let so = spec.s_group(0).order() as u32;
    let ko = spec.hf_order() as u32;
    let total = (so as u128).pow(n as u32 + 1) * (ko as u128).pow(n as u32);
    if total > 50_000_000 {
        return Err(Error::KeyBudget { budget: 50_000_000, n });
    }
    let d = spec.d(0);
    let s1 = spec.s_group(1).order() as u32;
    // pushforward of the uniform HF letter at level 1
    let mut k_law: HashMap<u32, u64> = HashMap::new();
    for y in 0..ko {
        *k_law.entry(spec.hf_norm(1, y)).or_default() += 1;
    }
    let mut tables: Vec<HashMap<usize, HashMap<Vec<u32>, u64>>> = vec![HashMap::new(); d];
    let mut idx = vec![0u32; 2 * n + 1];
    loop {
        let w = AlternateWord {
            level: 0,
            s: (0..=n).map(|j| idx[2 * j]).collect(),
            k: (0..n).map(|j| idx[2 * j + 1]).collect(),
        };
        for (t, child) in rewrite_step(spec, &w).0.into_iter().enumerate() {
            let m = child.len();
            let mut interior = Vec::with_capacity(2 * m);
            for j in 0..m {
                if j > 0 {
                    interior.push(child.s[j]);
                }
                interior.push(child.k[j]);
            }
            *tables[t].entry(m).or_default().entry(interior).or_default() += 1;
        }
        // odometer over (s_1, k_1, .., s_{n+1})
        let mut pos = 0;
        loop {
            if pos == idx.len() {
                return Ok(tables.iter().all(|by_m| by_m.iter().all(|(&m, tab)| product_law(tab, m, s1, &k_law))));
            }
            let base = if pos % 2 == 0 { so } else { ko };
            idx[pos] += 1;
            if idx[pos] < base {
                break;
            }
            idx[pos] = 0;
            pos += 1;
        }
    }
}

fn product_law(tab: &HashMap<Vec<u32>, u64>, m: usize, s_order: u32, k_law: &HashMap<u32, u64>) -> bool {
    if m == 0 {
        return true;
    }
    let k_total: u64 = k_law.values().sum();
    let cells = (s_order as u128).pow(m as u32 - 1) * (k_total as u128).pow(m as u32);
    let total: u128 = tab.values().map(|&x| x as u128).sum();
    if !total.is_multiple_of(cells) {
        return false;
    }
    let unit = total / cells;
    let support: u128 = (k_law.len() as u128).pow(m as u32) * (s_order as u128).pow(m as u32 - 1);
    if tab.len() as u128 != support {
        return false;
    }
    tab.iter().all(|(t, &x)| {
        let weight: u128 = t.iter().step_by(2).map(|k| k_law[k] as u128).product();
        x as u128 == unit * weight
    })
}

// ---------------------------------------------------------------------------
// exact distributions

/// Exact law of `Y_n`, as element counts out of `total` equally likely words.
#[derive(Clone, Debug)]
pub struct ExactDistribution {
    pub n: usize,
    pub total: u128,
    pub counts: BTreeMap<CanonicalForm, u128>,
    reps: HashMap<CanonicalForm, AlternateWord>,
}

impl ExactDistribution {
    pub fn probability(&self, key: &CanonicalForm) -> BigRational {
        let c = self.counts.get(key).copied().unwrap_or(0);
        BigRational::new(BigInt::from(c), BigInt::from(self.total))
    }

    pub fn support_size(&self) -> usize {
        self.counts.len()
    }

    pub fn representative(&self, key: &CanonicalForm) -> Option<&AlternateWord> {
        self.reps.get(key)
    }
}

/// Number of boundary points with a non-trivial label.
pub fn label_support(key: &CanonicalForm) -> usize {
    match key {
        CanonicalForm::Rooted(_) => 0,
        CanonicalForm::Directed { f, .. } => (*f != 0) as usize,
        CanonicalForm::Node(_, c) => c.iter().map(label_support).sum(),
    }
}

/// Exact laws of `Y_0, .., Y_{n_max}` by repeated convolution with one step.
pub fn exact_distributions(spec: &GroupSpec, n_max: usize, budget: usize) -> Result<Vec<ExactDistribution>> {
    let so = spec.s_group(0).order() as u32;
    let ko = spec.hf_order() as u32;
    let mut out: Vec<ExactDistribution> = Vec::new();
    let mut counts = BTreeMap::new();
    let mut reps = HashMap::new();
    for s in 0..so {
        let w = AlternateWord { level: 0, s: vec![s], k: vec![] };
        let key = canonical_key(spec, &w, budget)?;
        *counts.entry(key.clone()).or_insert(0u128) += 1;
        reps.entry(key).or_insert(w);
    }
    out.push(ExactDistribution { n: 0, total: so as u128, counts, reps });
    for n in 1..=n_max {
        let prev = out.last().unwrap();
        let total = prev
            .total
            .checked_mul(so as u128 * ko as u128)
            .ok_or(Error::KeyBudget { budget, n })?;
        let entries: Vec<(&CanonicalForm, &u128)> = prev.counts.iter().collect();
        let products: Vec<Vec<(CanonicalForm, u128, AlternateWord)>> = entries
            .par_iter()
            .map(|&(key, &c)| {
                let base = &prev.reps[key];
                let mut local = Vec::with_capacity((so * ko) as usize);
                for y in 0..ko {
                    for s in 0..so {
                        let step = AlternateWord { level: 0, s: vec![0, s], k: vec![spec.hf_norm(0, y)] };
                        let w = base.concat(spec, &step);
                        local.push((canonical_key(spec, &w, budget)?, c, w));
                    }
                }
                Ok(local)
            })
            .collect::<Result<_>>()?;
        let mut counts: BTreeMap<CanonicalForm, u128> = BTreeMap::new();
        let mut reps = HashMap::new();
        for (key, c, w) in products.into_iter().flatten() {
            let e = counts.entry(key.clone()).or_insert(0);
            *e = e.checked_add(c).ok_or(Error::KeyBudget { budget, n })?;
            reps.entry(key).or_insert(w);
            if counts.len() > budget {
                return Err(Error::KeyBudget { budget, n });
            }
        }
        out.push(ExactDistribution { n, total, counts, reps });
    }
    Ok(out)
}

pub fn exact_distribution(spec: &GroupSpec, n: usize, budget: usize) -> Result<ExactDistribution> {
    Ok(exact_distributions(spec, n, budget)?.pop().unwrap())
}

/// Shannon entropy in nats.
pub fn entropy_exact(dist: &ExactDistribution) -> f64 {
    let t = dist.total as f64;
    let mut terms: Vec<f64> = dist.counts.values().map(|&c| c as f64 * (c as f64).ln()).collect();
    terms.sort_by(|a, b| a.partial_cmp(b).unwrap());
    t.ln() - terms.iter().sum::<f64>() / t
}

/// `P(Y_n = 1)`.
pub fn return_prob_exact(dist: &ExactDistribution) -> BigRational {
    let id = dist.counts.keys().find(|k| k.is_identity()).cloned();
    id.map_or_else(BigRational::zero, |k| dist.probability(&k))
}

/// `P(phi_n = id)`: total mass of elements without boundary labels.
pub fn phi_trivial_exact(dist: &ExactDistribution) -> BigRational {
    let c: u128 = dist.counts.iter().filter(|(k, _)| label_support(k) == 0).map(|(_, &c)| c).sum();
    BigRational::new(BigInt::from(c), BigInt::from(dist.total))
}

/// `E #supp(phi_n)` as an exact rational.
pub fn expected_support_exact(dist: &ExactDistribution) -> BigRational {
    let s: u128 = dist.counts.iter().map(|(k, &c)| c * label_support(k) as u128).sum();
    BigRational::new(BigInt::from(s), BigInt::from(dist.total))
}

/// `E[(1/#F)^a(Y_n)]`, enumerating the words with their boundary components
/// removed. Activity does not see the `F` components, so every such word
/// stands for `#F^n` equally likely words.
pub fn expected_inverse_f_power(spec: &GroupSpec, n: usize, budget: usize) -> Result<BigRational> {
    let so = spec.s_group(0).order() as u32;
    let ho = spec.h_group().order() as u32;
    let words = (so as u128).pow(n as u32 + 1) * (ho as u128).pow(n as u32);
    if words > budget as u128 {
        return Err(Error::KeyBudget { budget, n });
    }
    let f = spec.f_order() as u64;
    let lens: Vec<usize> = (0..words as u64)
        .into_par_iter()
        .map(|mut i| {
            let mut s = Vec::with_capacity(n + 1);
            let mut k = Vec::with_capacity(n);
            for j in 0..=n {
                s.push((i % so as u64) as u32);
                i /= so as u64;
                if j < n {
                    k.push(spec.hf_join((i % ho as u64) as u32, 0));
                    i /= ho as u64;
                }
            }
            activity(spec, &AlternateWord { level: 0, s, k })
        })
        .collect();
    let max_a = lens.iter().copied().max().unwrap_or(0);
    let mut by_a = vec![0u128; max_a + 1];
    for a in lens {
        by_a[a] += 1;
    }
    // sum_a count_a * f^(max_a - a) / (words * f^max_a)
    let num: BigUint = by_a
        .iter()
        .enumerate()
        .map(|(a, &c)| BigUint::from(c) * BigUint::from(f).pow((max_a - a) as u32))
        .sum();
    let den = BigUint::from(words) * BigUint::from(f).pow(max_a as u32);
    Ok(BigRational::new(num.into(), den.into()))
}

// ---------------------------------------------------------------------------
// word norms and drift

/// Exact word norms for the generating set `S.HF.S`, on the ball of radius
/// `radius`.
#[derive(Clone, Debug)]
pub struct NormOracle {
    pub radius: usize,
    pub norms: HashMap<CanonicalForm, usize>,
    pub generators: usize,
}

pub fn norm_oracle(spec: &GroupSpec, radius: usize, budget: usize) -> Result<NormOracle> {
    let so = spec.s_group(0).order() as u32;
    let mut gens = Vec::new();
    let mut seen = HashMap::new();
    for a in 0..so {
        for y in 0..spec.hf_order() as u32 {
            for b in 0..so {
                let g = AlternateWord { level: 0, s: vec![a, b], k: vec![spec.hf_norm(0, y)] };
                let key = canonical_key(spec, &g, budget)?;
                if !key.is_identity() && seen.insert(key, ()).is_none() {
                    gens.push(g);
                }
            }
        }
    }
    let id = AlternateWord::identity(0);
    let mut norms = HashMap::from([(canonical_key(spec, &id, budget)?, 0usize)]);
    let mut frontier = VecDeque::from([(id, 0usize)]);
    while let Some((w, r)) = frontier.pop_front() {
        if r == radius {
            continue;
        }
        let next: Vec<(CanonicalForm, AlternateWord)> = gens
            .par_iter()
            .map(|g| {
                let x = w.concat(spec, g);
                Ok((canonical_key(spec, &x, budget)?, x))
            })
            .collect::<Result<_>>()?;
        for (key, x) in next {
            if !norms.contains_key(&key) {
                norms.insert(key, r + 1);
                frontier.push_back((x, r + 1));
                if norms.len() > budget {
                    return Err(Error::KeyBudget { budget, n: r + 1 });
                }
            }
        }
    }
    Ok(NormOracle { radius, norms, generators: gens.len() })
}

#[derive(Clone, Debug, Serialize)]
pub struct DriftReport {
    pub n: usize,
    pub samples: usize,
    /// Mean norm over the samples that stayed inside the oracle's ball.
    pub drift: Estimate,
    pub censored: usize,
    pub entropy: f64,
    /// `(H - ln(n+1)) / ln |A|` for the `|A|` generators: a ball of radius `r`
    /// has at most `|A|^r` elements on its sphere.
    pub lower: f64,
    /// `2 sqrt(n (H + ln n))`.
    pub upper: f64,
}

/// Monte-Carlo drift `E||Y_n||` with the entropy sandwich evaluated at the
/// exact entropy `entropy`.
pub fn drift_bounds(
    spec: &GroupSpec,
    oracle: &NormOracle,
    n: usize,
    samples: usize,
    seed: u64,
    entropy: f64,
    budget: usize,
) -> Result<DriftReport> {
    let norms = map_samples(spec, n, samples, seed, |w| canonical_key(spec, w, budget).map(|k| oracle.norms.get(&k).copied()));
    let norms: Vec<Option<usize>> = norms.into_iter().collect::<Result<_>>()?;
    let inside: Vec<f64> = norms.iter().flatten().map(|&x| x as f64).collect();
    let nf = n as f64;
    Ok(DriftReport {
        n,
        samples,
        drift: Estimate::from_values(inside.iter().copied()),
        censored: norms.iter().filter(|x| x.is_none()).count(),
        entropy,
        lower: (entropy - (nf + 1.0).ln()) / (oracle.generators as f64).ln(),
        upper: 2.0 * (nf * (entropy + nf.max(1.0).ln())).sqrt(),
    })
}
