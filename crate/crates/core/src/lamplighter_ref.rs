//! Lamplighter over the infinite dihedral group, used as a reference for the
//! directed group `F ≀ D∞` acting on the binary tree with `h = (h, s)`.
//!
//! Elements of `D∞ = ⟨s, h⟩` are points of its Cayley graph, a bi-infinite
//! line: `0` is the identity, `p > 0` the reduced word of length `p` starting
//! with `s`, `p < 0` the one of length `|p|` starting with `h`. The edge
//! `{p, p+1}` is labelled `s` for even `p` and `h` for odd `p`.
//!
//! The walk steps by `r f` with `r = h s h′` and `f` uniform. After step `i`
//! the lamp at `(r_1 .. r_i)⁻¹` is multiplied by `f_i`; lamps are keyed by
//! that inverse. The projection to the tree group sums lamps over the fibres
//! of the covering `y ↦ 0^∞ · y` onto the half-line Schreier graph.

use std::collections::{BTreeMap, HashMap};

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::perm::FiniteGroup;
use crate::walker::{substream, Estimate, BATCH};

/// `p · s`.
pub fn mul_s(p: i64) -> i64 {
    if p.rem_euclid(2) == 0 {
        p + 1
    } else {
        p - 1
    }
}

/// `p · h`.
pub fn mul_h(p: i64) -> i64 {
    if p.rem_euclid(2) == 0 {
        p - 1
    } else {
        p + 1
    }
}

/// `p⁻¹`: reversing an alternating word keeps its first letter exactly when
/// its length is odd.
pub fn inverse(p: i64) -> i64 {
    if p % 2 == 0 {
        -p
    } else {
        p
    }
}

/// `h · p`.
pub fn left_h(p: i64) -> i64 {
    if p < 0 {
        -p - 1
    } else {
        -(p + 1)
    }
}

/// Reduced word of `p` as letters `'s'`/`'h'`.
pub fn reduced_word(p: i64) -> Vec<char> {
    let first = if p >= 0 { ['s', 'h'] } else { ['h', 's'] };
    (0..p.unsigned_abs() as usize).map(|i| first[i % 2]).collect()
}

/// Index on the half-line of `0^∞ · y`; `h` fixes `0^∞`, so `c(y) = c(h y)`.
pub fn covering_map(y: i64) -> u64 {
    if y >= 0 {
        y as u64
    } else {
        (-y - 1) as u64
    }
}

/// Element of the lamplighter: lamps keyed by inverse walker positions.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct LampElement {
    pub lamps: BTreeMap<i64, u32>,
    pub position: i64,
}

impl LampElement {
    pub fn is_identity(&self) -> bool {
        self.position == 0 && self.lamps.is_empty()
    }

    /// Boundary function of the image in the tree group, indexed by half-line points.
    pub fn project(&self, f: &FiniteGroup) -> BTreeMap<u64, u32> {
        let mut out: BTreeMap<u64, u32> = BTreeMap::new();
        for (&y, &v) in &self.lamps {
            let e = out.entry(covering_map(y)).or_insert(0);
            *e = f.mul(*e, v);
        }
        out.retain(|_, v| *v != 0);
        out
    }
}

/// Word norm for the generators `s`, `h` and the non-identity lamp values at
/// the walker's position: lit lamps plus the shorter of the two tours of the
/// line that visit every lit position and end at the walker.
pub fn lamp_norm(e: &LampElement) -> u64 {
    let lit = e.lamps.len() as u64;
    let (mut lo, mut hi) = (e.position.min(0), e.position.max(0));
    for &y in e.lamps.keys() {
        let x = inverse(y);
        lo = lo.min(x);
        hi = hi.max(x);
    }
    let p = e.position;
    let left_first = -lo + (hi - lo) + (hi - p);
    let right_first = hi + (hi - lo) + (p - lo);
    lit + left_first.min(right_first) as u64
}

/// One increment `h s h′ f`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LampStep {
    pub h: bool,
    pub s: bool,
    pub h2: bool,
    pub f: u32,
}

impl LampStep {
    pub fn sample<R: Rng>(f_order: usize, rng: &mut R) -> Self {
        LampStep { h: rng.random(), s: rng.random(), h2: rng.random(), f: rng.random_range(0..f_order as u32) }
    }
}

/// A trajectory's endpoint in the lamplighter together with the boundary
/// function kept independently on the half-line.
#[derive(Clone, Debug)]
pub struct LampSample {
    pub tilde: LampElement,
    pub projected: BTreeMap<u64, u32>,
    pub steps: Vec<LampStep>,
}

impl LampSample {
    /// The image in the tree group is trivial.
    pub fn z_trivial(&self) -> bool {
        self.tilde.position == 0 && self.projected.is_empty()
    }
}

fn check_abelian(f: &FiniteGroup) -> Result<()> {
    if !f.is_abelian() {
        return Err(Error::InvalidConfig("the covering identity needs an abelian F".into()));
    }
    Ok(())
}

pub fn apply_steps(f: &FiniteGroup, steps: &[LampStep]) -> Result<LampSample> {
    check_abelian(f)?;
    let mut lamps: HashMap<i64, u32> = HashMap::new();
    let mut projected: HashMap<u64, u32> = HashMap::new();
    let mut p = 0i64;
    for st in steps {
        if st.h {
            p = mul_h(p);
        }
        if st.s {
            p = mul_s(p);
        }
        if st.h2 {
            p = mul_h(p);
        }
        if st.f != 0 {
            let y = inverse(p);
            let e = lamps.entry(y).or_insert(0);
            *e = f.mul(*e, st.f);
            let e = projected.entry(covering_map(y)).or_insert(0);
            *e = f.mul(*e, st.f);
        }
    }
    Ok(LampSample {
        tilde: LampElement { lamps: lamps.into_iter().filter(|&(_, v)| v != 0).collect(), position: p },
        projected: projected.into_iter().filter(|&(_, v)| v != 0).collect(),
        steps: steps.to_vec(),
    })
}

pub fn lamp_walk<R: Rng>(f: &FiniteGroup, n: usize, rng: &mut R) -> Result<LampSample> {
    let steps: Vec<LampStep> = (0..n).map(|_| LampStep::sample(f.order(), rng)).collect();
    apply_steps(f, &steps)
}

#[derive(Clone, Debug, Serialize)]
pub struct LampStats {
    pub n: usize,
    pub samples: usize,
    pub norm: Estimate,
    pub tilde_return: Estimate,
    pub z_return: Estimate,
}

/// Norm and return statistics from `samples` walks of length `n`; batches
/// use the same substreams as the tree-group walker.
pub fn lamp_stats(f: &FiniteGroup, n: usize, samples: usize, seed: u64) -> Result<LampStats> {
    check_abelian(f)?;
    let batches = samples.div_ceil(BATCH);
    let rows: Vec<(f64, f64, f64)> = (0..batches)
        .into_par_iter()
        .map(|b| {
            let mut rng = substream(seed, n, b);
            let count = BATCH.min(samples - b * BATCH);
            (0..count)
                .map(|_| {
                    let x = lamp_walk(f, n, &mut rng).unwrap();
                    (lamp_norm(&x.tilde) as f64, x.tilde.is_identity() as u8 as f64, x.z_trivial() as u8 as f64)
                })
                .collect::<Vec<_>>()
        })
        .flatten()
        .collect();
    Ok(LampStats {
        n,
        samples,
        norm: Estimate::from_values(rows.iter().map(|r| r.0)),
        tilde_return: Estimate::from_values(rows.iter().map(|r| r.1)),
        z_return: Estimate::from_values(rows.iter().map(|r| r.2)),
    })
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn log_log_slope(points: &[(f64, f64)]) -> f64 {
    let xs: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let m = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / m;
    let my = ys.iter().sum::<f64>() / m;
    let num: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let den: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    num / den
}
