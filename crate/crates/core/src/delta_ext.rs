//! Extended-valency modification of a directed group.
//!
//! At every level `l` the tree gets `d′_l` extra children per vertex. The
//! rooted letters and the `HF` letters act on those extra children through a
//! root group `R_l` generated by copies `S″` and `H″F″`; the first `d_l`
//! coordinates behave exactly as in the base group. Elements are handled as
//! alternate words over the base alphabet with raw (unnormalized) `H`
//! letters, since `H″ ≅ H` stays faithful at every level.
//!
//! Triviality is decided by recursion on the first `d_l` coordinates, testing
//! the base root permutation and the `R_l` component of every node.

use std::collections::{BTreeMap, HashSet, VecDeque};
use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group_model::{act_ray, GroupConfig, GroupSpec, Ray};
use crate::perm::{FiniteGroup, Perm};
use crate::words::{boundary_function, AlternateWord, Letter};

/// Largest tree degree that fits a [`Perm`].
const MAX_DEGREE: usize = 255;

/// Root group acting on the extra children at one level.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum RootGroup {
    /// No extra children: the level behaves as in the base group.
    Trivial,
    /// `S_l × HF` acting on `degree` extra points: `S″` right-regularly on
    /// the first `|S_l|` points, `H″F″` right-regularly on the next `|HF|`,
    /// the rest fixed.
    Regular { degree: usize },
    /// The free product `S_l * HF`, kept symbolically.
    FreeProduct,
    /// A finite quotient of the free product agreeing with it on every word
    /// of at most `radius` letters.
    Truncated { radius: usize },
}

impl RootGroup {
    fn is_trivial_group(&self) -> bool {
        matches!(self, RootGroup::Trivial)
    }
}

/// Serializable description of a [`DeltaSpec`].
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DeltaConfig {
    pub base: GroupConfig,
    #[serde(default)]
    pub blocks: BTreeMap<usize, RootGroup>,
    /// Root groups at levels `>= horizon` are unknown.
    #[serde(default)]
    pub horizon: Option<usize>,
}

#[derive(Clone, Debug)]
pub struct DeltaSpec {
    base: Arc<GroupSpec>,
    blocks: BTreeMap<usize, RootGroup>,
    horizon: Option<usize>,
}

impl DeltaSpec {
    pub fn new(base: Arc<GroupSpec>, blocks: BTreeMap<usize, RootGroup>, horizon: Option<usize>) -> Result<Self> {
        let blocks: BTreeMap<usize, RootGroup> = blocks.into_iter().filter(|(_, g)| !g.is_trivial_group()).collect();
        for (&l, g) in &blocks {
            if let RootGroup::Regular { degree } = g {
                let need = base.s_group(l).order() + base.hf_order();
                if *degree < need {
                    return Err(Error::InvalidConfig(format!(
                        "level {l}: {degree} extra points cannot carry S × HF faithfully, need {need}"
                    )));
                }
                if base.d(l) + degree > MAX_DEGREE {
                    return Err(Error::InvalidConfig(format!(
                        "level {l}: extended degree {} exceeds {MAX_DEGREE}",
                        base.d(l) + degree
                    )));
                }
            }
            if horizon.is_some_and(|h| l >= h) {
                return Err(Error::InvalidConfig(format!("block at level {l} lies beyond the horizon")));
            }
        }
        Ok(DeltaSpec { base, blocks, horizon })
    }

    /// The base group itself.
    pub fn trivial(base: Arc<GroupSpec>) -> Self {
        DeltaSpec { base, blocks: BTreeMap::new(), horizon: None }
    }

    pub fn from_config(cfg: &DeltaConfig) -> Result<Self> {
        Self::new(Arc::new(crate::group_model::build_group(&cfg.base)?), cfg.blocks.clone(), cfg.horizon)
    }

    pub fn config(&self) -> DeltaConfig {
        DeltaConfig { base: self.base.config().clone(), blocks: self.blocks.clone(), horizon: self.horizon }
    }

    pub fn base(&self) -> &GroupSpec {
        &self.base
    }

    pub fn base_arc(&self) -> Arc<GroupSpec> {
        self.base.clone()
    }

    pub fn blocks(&self) -> &BTreeMap<usize, RootGroup> {
        &self.blocks
    }

    pub fn horizon(&self) -> Option<usize> {
        self.horizon
    }

    pub fn root_group(&self, l: usize) -> Result<&RootGroup> {
        if self.horizon.is_some_and(|h| l >= h) {
            return Err(Error::MissingQuotient(l));
        }
        Ok(self.blocks.get(&l).unwrap_or(&RootGroup::Trivial))
    }

    /// `d′_l`, with `None` for an infinite root group.
    pub fn extra_degree(&self, l: usize) -> Option<usize> {
        match self.blocks.get(&l) {
            None | Some(RootGroup::Trivial) => Some(0),
            Some(RootGroup::Regular { degree }) => Some(*degree),
            Some(RootGroup::FreeProduct) | Some(RootGroup::Truncated { .. }) => None,
        }
    }

    /// The same spec with the root group at `level` replaced by the trivial one.
    pub fn without_block(&self, level: usize) -> Self {
        let mut out = self.clone();
        out.blocks.remove(&level);
        out
    }

    /// Every level `> l` has a trivial root group.
    fn trivial_from(&self, l: usize) -> Result<bool> {
        if let Some(h) = self.horizon {
            return Err(Error::MissingQuotient(h));
        }
        Ok(self.blocks.range(l + 1..).next().is_none())
    }
}

/// Letter of the free product `S_l * HF`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum FpLetter {
    S(u32),
    /// Raw joined `HF` index.
    K(u32),
}

/// Reduced word in `S_l * HF`: alternating factors, no identity letters.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct FreeProductWord {
    pub level: usize,
    pub letters: Vec<FpLetter>,
}

impl FreeProductWord {
    pub fn identity(level: usize) -> Self {
        FreeProductWord { level, letters: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// Appends one letter and reduces.
    pub fn push(&mut self, spec: &GroupSpec, x: FpLetter) {
        let sg = spec.s_group(self.level);
        let merged = match (self.letters.last().copied(), x) {
            (_, FpLetter::S(0)) | (_, FpLetter::K(0)) => return,
            (Some(FpLetter::S(a)), FpLetter::S(b)) => Some(FpLetter::S(sg.mul(a, b))),
            (Some(FpLetter::K(a)), FpLetter::K(b)) => Some(FpLetter::K(hf_mul_raw(spec, a, b))),
            _ => None,
        };
        match merged {
            None => self.letters.push(x),
            Some(FpLetter::S(0)) | Some(FpLetter::K(0)) => {
                self.letters.pop();
            }
            Some(m) => *self.letters.last_mut().unwrap() = m,
        }
    }

    pub fn from_letters(spec: &GroupSpec, level: usize, letters: &[FpLetter]) -> Self {
        let mut w = FreeProductWord::identity(level);
        for &x in letters {
            w.push(spec, x);
        }
        w
    }

    pub fn mul(&self, spec: &GroupSpec, other: &FreeProductWord) -> Self {
        let mut w = self.clone();
        for &x in &other.letters {
            w.push(spec, x);
        }
        w
    }
}

/// Product in `H × F` without normalization.
pub fn hf_mul_raw(spec: &GroupSpec, a: u32, b: u32) -> u32 {
    let (ha, fa) = spec.hf_split(a);
    let (hb, fb) = spec.hf_split(b);
    spec.hf_join(spec.h_group().mul(ha, hb), spec.f_group().mul(fa, fb))
}

pub fn hf_inv_raw(spec: &GroupSpec, a: u32) -> u32 {
    let (h, f) = spec.hf_split(a);
    spec.hf_join(spec.h_group().inv(h), spec.f_group().inv(f))
}

pub fn inverse_raw(spec: &GroupSpec, w: &AlternateWord) -> AlternateWord {
    let sg = spec.s_group(w.level);
    AlternateWord {
        level: w.level,
        s: w.s.iter().rev().map(|&x| sg.inv(x)).collect(),
        k: w.k.iter().rev().map(|&y| hf_inv_raw(spec, y)).collect(),
    }
}

/// Letter sequence packed into an alternate word, merging raw letters.
pub fn alternate_raw(spec: &GroupSpec, level: usize, letters: &[Letter]) -> AlternateWord {
    let mut b = RawBuilder::new(level);
    let sg = spec.s_group(level);
    for &x in letters {
        match x {
            Letter::S(s) => b.push_s(sg, s),
            Letter::K(y) => b.push_k(spec, y),
        }
    }
    b.finish()
}

pub fn concat_raw(spec: &GroupSpec, words: &[&AlternateWord]) -> AlternateWord {
    let level = words.first().map_or(0, |w| w.level);
    let letters: Vec<Letter> = words.iter().flat_map(|w| w.letters()).collect();
    alternate_raw(spec, level, &letters)
}

struct RawBuilder {
    level: usize,
    s: Vec<u32>,
    k: Vec<u32>,
    last_k: bool,
}

impl RawBuilder {
    fn new(level: usize) -> Self {
        RawBuilder { level, s: vec![0], k: Vec::new(), last_k: false }
    }

    fn push_s(&mut self, g: &FiniteGroup, x: u32) {
        if self.last_k {
            self.s.push(x);
            self.last_k = false;
        } else {
            let last = self.s.last_mut().unwrap();
            *last = g.mul(*last, x);
        }
    }

    fn push_k(&mut self, spec: &GroupSpec, y: u32) {
        if self.last_k {
            let last = self.k.last_mut().unwrap();
            *last = hf_mul_raw(spec, *last, y);
        } else {
            self.k.push(y);
            self.last_k = true;
        }
    }

    fn finish(mut self) -> AlternateWord {
        if self.last_k {
            self.s.push(0);
        }
        AlternateWord { level: self.level, s: self.s, k: self.k }
    }
}

/// Root of a rewritten word: the base root permutation and the component in
/// the root group of the level.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeltaRootComponent {
    pub sigma: Perm,
    pub tail: FreeProductWord,
}

/// One rewriting step. Children are the first `d_l` coordinates with raw
/// `H` letters; the extra coordinates of a word are always trivial.
pub fn rewrite_delta(spec: &GroupSpec, w: &AlternateWord) -> (Vec<AlternateWord>, DeltaRootComponent) {
    let l = w.level;
    let cl = spec.class(l);
    let sg = spec.s_group(l);
    let sn = spec.s_group(l + 1);
    let mut builders: Vec<RawBuilder> = (0..cl.d).map(|_| RawBuilder::new(l + 1)).collect();
    let mut tail = FreeProductWord::identity(l);
    let mut pi = w.s[0];
    tail.push(spec, FpLetter::S(w.s[0]));
    for j in 0..w.k.len() {
        let (h, _) = spec.hf_split(w.k[j]);
        let p = sg.perm(pi);
        for (t, b) in builders.iter_mut().enumerate() {
            let idx = p.apply(t);
            if idx == 0 {
                b.push_k(spec, w.k[j]);
            } else if idx <= cl.c {
                b.push_s(sn, cl.rho[idx - 1][h as usize]);
            }
        }
        pi = sg.mul(sg.mul(pi, cl.sigma[h as usize]), w.s[j + 1]);
        tail.push(spec, FpLetter::K(w.k[j]));
        tail.push(spec, FpLetter::S(w.s[j + 1]));
    }
    let children = builders.into_iter().map(RawBuilder::finish).collect();
    (children, DeltaRootComponent { sigma: *sg.perm(pi), tail })
}

/// Whether the root-group component `tail` is trivial in `group`. `letters`
/// is the unreduced letter count, used against a truncation radius.
fn tail_trivial(spec: &GroupSpec, group: &RootGroup, tail: &FreeProductWord, letters: usize) -> Result<bool> {
    match group {
        RootGroup::Trivial => Ok(true),
        RootGroup::FreeProduct => Ok(tail.is_empty()),
        RootGroup::Truncated { radius } => {
            if letters > *radius {
                Err(Error::BeyondRadius { len: letters, radius: *radius })
            } else {
                Ok(tail.is_empty())
            }
        }
        RootGroup::Regular { .. } => {
            let sg = spec.s_group(tail.level);
            let (mut s, mut k) = (0u32, 0u32);
            for &x in &tail.letters {
                match x {
                    FpLetter::S(a) => s = sg.mul(s, a),
                    FpLetter::K(a) => k = hf_mul_raw(spec, k, a),
                }
            }
            Ok(s == 0 && k == 0)
        }
    }
}

/// Number of non-identity letters of `w`, i.e. the length of its root-group
/// component before reduction.
fn letter_count(w: &AlternateWord) -> usize {
    w.s.iter().filter(|&&x| x != 0).count() + w.k.iter().filter(|&&y| y != 0).count()
}

/// Decides whether `w` is the identity of the extended group.
pub fn is_trivial_delta(delta: &DeltaSpec, w: &AlternateWord) -> Result<bool> {
    let spec = delta.base();
    let mut stack = vec![w.clone()];
    while let Some(x) = stack.pop() {
        let l = x.level;
        let group = delta.root_group(l)?;
        if x.is_empty() {
            if x.s[0] != 0 {
                return Ok(false);
            }
            continue;
        }
        let (children, root) = rewrite_delta(spec, &x);
        if !root.sigma.is_identity() || !tail_trivial(spec, group, &root.tail, letter_count(&x))? {
            return Ok(false);
        }
        if x.len() == 1 {
            let (h, f) = spec.hf_split(x.k[0]);
            if f != 0 {
                return Ok(false);
            }
            if h != 0 && !(spec.trivial_below(l, h) && delta.trivial_from(l)?) {
                return Ok(false);
            }
            continue;
        }
        stack.extend(children);
    }
    Ok(true)
}

/// Image in the base group: letters normalized for their level.
pub fn quotient_to_gamma(spec: &GroupSpec, w: &AlternateWord) -> AlternateWord {
    let letters: Vec<Letter> = w.letters();
    crate::words::canonical_alternate(spec, w.level, &letters)
}

/// A word at level `w.level - 1` whose first coordinate is `w` and whose base
/// root permutation is trivial. Each letter `x` of `w` is produced by one
/// `HF` letter `h` carrying `x` at some coordinate `t`, conjugated by a
/// rooted letter moving `t` to coordinate 0.
pub fn lift_one_level(spec: &GroupSpec, w: &AlternateWord) -> Result<AlternateWord> {
    if w.level == 0 {
        return Err(Error::InvalidConfig("cannot lift a level-0 word".into()));
    }
    let l = w.level - 1;
    let cl = spec.class(l);
    let sg = spec.s_group(l);
    let carrier = |x: u32| -> Option<(usize, u32)> {
        (1..=cl.c).find_map(|t| {
            (0..spec.h_group().order() as u32)
                .find(|&h| cl.sigma[h as usize] == 0 && cl.rho[t - 1][h as usize] == x)
                .map(|h| (t, h))
        })
    };
    let mover = |t: usize| (0..sg.order() as u32).find(|&s| sg.perm(s).apply(0) == t);
    let mut letters = Vec::new();
    for x in w.letters() {
        match x {
            Letter::S(0) => {}
            Letter::S(a) => {
                let (t, h) = carrier(a).ok_or_else(|| Error::Precondition {
                    witness: format!("s{a}"),
                    reason: format!("no h with trivial root permutation carries it at level {l}"),
                })?;
                let s = mover(t).ok_or_else(|| Error::Precondition {
                    witness: format!("coordinate {t}"),
                    reason: "rooted group is not transitive".into(),
                })?;
                letters.extend([Letter::S(s), Letter::K(spec.hf_join(h, 0)), Letter::S(sg.inv(s))]);
            }
            Letter::K(y) => {
                let (h, _) = spec.hf_split(y);
                if cl.sigma[h as usize] != 0 {
                    return Err(Error::Precondition {
                        witness: format!("h{h}"),
                        reason: format!("root permutation of h is not trivial at level {l}"),
                    });
                }
                letters.push(Letter::K(y));
            }
        }
    }
    Ok(alternate_raw(spec, l, &letters))
}

/// Lift of a level-1 word to level 0.
pub fn lift_from_level1(spec: &GroupSpec, w: &AlternateWord) -> Result<AlternateWord> {
    if w.level != 1 {
        return Err(Error::InvalidConfig(format!("expected a level-1 word, got level {}", w.level)));
    }
    lift_one_level(spec, w)
}

/// Root permutations of every `s′` and `HF′` letter on the `e_l = d_l + d′_l`
/// children at one level; `None` for infinite root groups.
#[derive(Clone, Debug)]
pub struct LevelPortrait {
    pub level: usize,
    pub degree: usize,
    pub s: Vec<Perm>,
    pub k: Vec<Perm>,
}

fn right_regular(g_order: usize, mul: impl Fn(u32, u32) -> u32, x: u32, offset: usize, degree: usize) -> Vec<usize> {
    let mut img: Vec<usize> = (0..degree).collect();
    for y in 0..g_order {
        img[offset + y] = offset + mul(y as u32, x) as usize;
    }
    img
}

/// Root permutations at levels `0..levels`.
pub fn build_delta(delta: &DeltaSpec, levels: usize) -> Vec<Option<LevelPortrait>> {
    let spec = delta.base();
    (0..levels)
        .map(|l| {
            let d = spec.d(l);
            let sg = spec.s_group(l);
            let extra = delta.extra_degree(l)?;
            let e = d + extra;
            let so = sg.order();
            let s = (0..so as u32)
                .map(|x| {
                    let mut img: Vec<usize> = (0..e).collect();
                    let p = sg.perm(x);
                    for (i, v) in img.iter_mut().enumerate().take(d) {
                        *v = p.apply(i);
                    }
                    if extra > 0 {
                        let reg = right_regular(so, |a, b| sg.mul(a, b), x, d, e);
                        img[d..d + so].copy_from_slice(&reg[d..d + so]);
                    }
                    Perm::from_images(&img).unwrap()
                })
                .collect();
            let ko = spec.hf_order();
            let k = (0..ko as u32)
                .map(|y| {
                    let mut img: Vec<usize> = (0..e).collect();
                    let p = sg.perm(spec.sigma(l, spec.hf_split(y).0));
                    for (i, v) in img.iter_mut().enumerate().take(d) {
                        *v = p.apply(i);
                    }
                    if extra > 0 {
                        let reg = right_regular(ko, |a, b| hf_mul_raw(spec, a, b), y, d + so, e);
                        img[d + so..d + so + ko].copy_from_slice(&reg[d + so..d + so + ko]);
                    }
                    Perm::from_images(&img).unwrap()
                })
                .collect();
            Some(LevelPortrait { level: l, degree: e, s, k })
        })
        .collect()
}

/// Purpose of a scale schedule; recorded with the emitted spec.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScaleMode {
    Entropy,
    Return,
    Drift,
}

#[derive(Clone, Debug)]
pub struct Schedule {
    pub spec: DeltaSpec,
    pub mode: ScaleMode,
    pub radii: Vec<usize>,
    /// Level of the free block attached to each radius.
    pub levels: Vec<usize>,
}

impl Schedule {
    /// Which blocks a walk of length `n` can see: the deepest block level
    /// within the localisation depth of length-`n` words, if any.
    pub fn regime(&self, n: usize) -> Option<usize> {
        let reach = localisation_depth(n) + 1;
        self.levels.iter().copied().filter(|&l| l <= reach).max()
    }
}

/// `1 + ⌈log₂ n⌉`: deepest level whose root group can influence words of
/// length `n`.
pub fn localisation_depth(n: usize) -> usize {
    1 + if n <= 1 { 0 } else { (usize::BITS - (n - 1).leading_zeros()) as usize }
}

/// Free blocks just below the localisation depth of each radius; every block
/// but the last is a finite quotient agreeing on the next scale's balls.
pub fn schedule_scales(base: Arc<GroupSpec>, radii: &[usize], mode: ScaleMode) -> Result<Schedule> {
    if radii.windows(2).any(|w| w[0] >= w[1]) || radii.first() == Some(&0) {
        return Err(Error::InvalidConfig(format!("radii must be positive and increasing: {radii:?}")));
    }
    let levels: Vec<usize> = radii.iter().map(|&r| localisation_depth(r) + 1).collect();
    if let Some(w) = levels.windows(2).find(|w| w[0] >= w[1]) {
        return Err(Error::InvalidConfig(format!(
            "radii too dense: two scales share the block level {}",
            w[0]
        )));
    }
    let mut blocks = BTreeMap::new();
    for (i, &l) in levels.iter().enumerate() {
        let g = match radii.get(i + 1) {
            Some(&next) => RootGroup::Truncated { radius: 2 * next + 1 },
            None => RootGroup::FreeProduct,
        };
        blocks.insert(l, g);
    }
    Ok(Schedule { spec: DeltaSpec::new(base, blocks, None)?, mode, radii: radii.to_vec(), levels })
}

/// Shortest rooted/directed word moving the distinguished ray to `target`,
/// by breadth-first search over at most `budget` rays.
fn ray_path(spec: &GroupSpec, target: &Ray, budget: usize) -> Option<Vec<Letter>> {
    let mut gens: Vec<Letter> = (1..spec.s_group(0).order() as u32).map(Letter::S).collect();
    gens.extend(spec.h_classes(0).into_iter().filter(|&h| h != 0).map(|h| Letter::K(spec.hf_join(h, 0))));
    let words: Vec<AlternateWord> = gens.iter().map(|&g| alternate_raw(spec, 0, &[g])).collect();
    let start = Ray::distinguished();
    let mut prev: std::collections::HashMap<Ray, (Ray, usize)> = std::collections::HashMap::new();
    let mut seen: HashSet<Ray> = HashSet::from([start.clone()]);
    let mut queue = VecDeque::from([start.clone()]);
    while let Some(r) = queue.pop_front() {
        if &r == target {
            let mut path = Vec::new();
            let mut cur = r;
            while cur != start {
                let (p, g) = prev[&cur].clone();
                path.push(gens[g]);
                cur = p;
            }
            path.reverse();
            return Some(path);
        }
        if seen.len() > budget {
            return None;
        }
        for (g, w) in words.iter().enumerate() {
            let next = act_ray(spec, w, &r).ok()?.0;
            if seen.insert(next.clone()) {
                prev.insert(next.clone(), (r.clone(), g));
                queue.push_back(next);
            }
        }
    }
    None
}

/// A level-0 word that is trivial once the root group at `level` is removed
/// but not in `delta`: the commutator of the boundary lamp at the
/// distinguished ray with a lamp at `0^level j 0^∞`. Its section at
/// `0^level` has root component `[f″, g″ f″ g″⁻¹]` with `g″` outside `HF`.
pub fn block_witness(delta: &DeltaSpec, level: usize, budget: usize) -> Result<Option<AlternateWord>> {
    let spec = delta.base();
    if spec.f_order() < 2 {
        return Ok(None);
    }
    let reduced = delta.without_block(level);
    let lamp = alternate_raw(spec, 0, &[Letter::K(spec.hf_join(0, 1))]);
    for j in 1..spec.d(level) as u8 {
        let mut prefix = vec![0u8; level];
        prefix.push(j);
        let target = Ray::new(prefix);
        let Some(path) = ray_path(spec, &target, budget) else { continue };
        let t = alternate_raw(spec, 0, &path);
        let ti = inverse_raw(spec, &t);
        for b in [concat_raw(spec, &[&ti, &lamp, &t]), concat_raw(spec, &[&t, &lamp, &ti])] {
            let support = boundary_function(spec, &quotient_to_gamma(spec, &b));
            if support.len() != 1 || !support.contains_key(&target) {
                continue;
            }
            let w = concat_raw(spec, &[&lamp, &b, &inverse_raw(spec, &lamp), &inverse_raw(spec, &b)]);
            if !is_trivial_delta(delta, &w)? && is_trivial_delta(&reduced, &w)? {
                return Ok(Some(w));
            }
        }
    }
    Ok(None)
}

/// Uniform letters over `S_0` and raw `H × F`.
pub fn sample_delta_word<R: Rng>(spec: &GroupSpec, n: usize, rng: &mut R) -> AlternateWord {
    let so = spec.s_group(0).order() as u32;
    let ko = spec.hf_order() as u32;
    AlternateWord {
        level: 0,
        s: (0..=n).map(|_| rng.random_range(0..so)).collect(),
        k: (0..n).map(|_| rng.random_range(0..ko)).collect(),
    }
}
