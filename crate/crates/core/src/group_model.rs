//! Saturated directed groups `Γ(S, HF)` acting on extended spherically
//! homogeneous trees.
//!
//! Vertices are 0-based: child `0` at every level is the distinguished ray
//! along which directed elements travel. A directed element `h` is an index
//! into the abstract finite group `H`; at each level it expands into
//! `(h, ρ_1(h), .., ρ_c(h), 1, .., 1) σ_h` where the `ρ_t` are rooted
//! permutations one level down and `σ_h` fixes `0`.
//!
//! Expansion data is tabulated per *level class*: levels that share valency,
//! relative-saturation bound and portrait rule from the next level on.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::perm::{FiniteGroup, Perm, Tuple, MAX_DEGREE};
use crate::words::{AlternateWord, LetterTable};

const MAX_H_ORDER: usize = 200_000;

fn periodic_at(prefix: &[usize], pattern: &[usize], l: usize) -> usize {
    if l < prefix.len() {
        prefix[l]
    } else {
        pattern[(l - prefix.len()) % pattern.len()]
    }
}

fn periodic_shift(prefix: &[usize], pattern: &[usize], k: usize) -> (Vec<usize>, Vec<usize>) {
    if k <= prefix.len() {
        (prefix[k..].to_vec(), pattern.to_vec())
    } else {
        let r = (k - prefix.len()) % pattern.len();
        let mut pat = pattern[r..].to_vec();
        pat.extend_from_slice(&pattern[..r]);
        (Vec::new(), pat)
    }
}

/// Eventually periodic valency sequence `d_0, d_1, ..`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValencySeq {
    pub prefix: Vec<usize>,
    pub pattern: Vec<usize>,
}

impl ValencySeq {
    pub fn new(prefix: Vec<usize>, pattern: Vec<usize>) -> Result<Self> {
        if pattern.is_empty() {
            return Err(Error::InvalidConfig("valency pattern must be non-empty".into()));
        }
        if let Some(&d) = prefix.iter().chain(&pattern).find(|&&d| !(2..=MAX_DEGREE).contains(&d)) {
            return Err(Error::InvalidConfig(format!(
                "valency {d} outside 2..={MAX_DEGREE}"
            )));
        }
        Ok(ValencySeq { prefix, pattern })
    }

    pub fn constant(d: usize) -> Self {
        ValencySeq { prefix: Vec::new(), pattern: vec![d] }
    }

    #[inline]
    pub fn d(&self, l: usize) -> usize {
        periodic_at(&self.prefix, &self.pattern, l)
    }

    pub fn d_min(&self) -> usize {
        self.values().into_iter().next().unwrap()
    }

    pub fn d_max(&self) -> usize {
        self.values().into_iter().next_back().unwrap()
    }

    /// Distinct valency values.
    pub fn values(&self) -> BTreeSet<usize> {
        self.prefix.iter().chain(&self.pattern).copied().collect()
    }

    pub fn shift(&self, k: usize) -> Self {
        let (prefix, pattern) = periodic_shift(&self.prefix, &self.pattern, k);
        ValencySeq { prefix, pattern }
    }
}

/// Relative-saturation bounds `1 <= c_l <= d_l - 1`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CSeq {
    pub prefix: Vec<usize>,
    pub pattern: Vec<usize>,
}

impl CSeq {
    /// The basic case `c_l = d_l - 1`.
    pub fn full(valency: &ValencySeq) -> Self {
        CSeq {
            prefix: valency.prefix.iter().map(|d| d - 1).collect(),
            pattern: valency.pattern.iter().map(|d| d - 1).collect(),
        }
    }

    #[inline]
    pub fn c(&self, l: usize) -> usize {
        periodic_at(&self.prefix, &self.pattern, l)
    }

    pub fn shift(&self, k: usize) -> Self {
        let (prefix, pattern) = periodic_shift(&self.prefix, &self.pattern, k);
        CSeq { prefix, pattern }
    }
}

// ---------------------------------------------------------------------------
// configuration

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "camelCase")]
pub struct GroupConfig {
    pub valency: SeqConfig,
    pub h_model: HModelConfig,
    pub f_group: FGroupConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c_seq: Option<SeqConfig>,
    pub saturated: bool,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub rooted_groups: Vec<RootedGroupConfig>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeqConfig {
    pub pattern: Vec<usize>,
    #[serde(default)]
    pub prefix: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum HModelConfig {
    /// `H = S_{e_1} × .. × S_{e_T}` over the distinct valencies, embedded diagonally.
    DiagonalFull,
    /// `H = S_d ≀ S_c` on a constant-valency tree, with non-trivial root components
    /// when `c = d - 1`.
    GeneralizedMother,
    Custom(CustomPortrait),
}

/// An explicit finite group with per-level expansion rules.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CustomPortrait {
    /// Degrees of the permutation factors of `H`.
    pub factors: Vec<usize>,
    /// Generators of `H`, each a list of image lists (one per factor).
    pub generators: Vec<Vec<Vec<usize>>>,
    pub rules: RuleSeqConfig,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RuleSeqConfig {
    #[serde(default)]
    pub prefix: Vec<LevelRules>,
    pub pattern: Vec<LevelRules>,
}

/// Expansion rule of a directed element at one level.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LevelRules {
    /// Rules for positions `1..=c_l`; `None` is the identity.
    pub rooted: Vec<Option<BlockRule>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub root: Option<BlockRule>,
}

/// Reads a permutation from factor `factor` of `H`. As a rooted rule it is
/// `x -> P(b*size + x) mod size` with `b = block`; as a root rule it is the
/// block permutation `t -> 1 + P((t-1)*size) / size` on positions `1..`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "camelCase")]
pub struct BlockRule {
    pub factor: usize,
    #[serde(default)]
    pub block: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub block_size: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FStructure {
    Cyclic,
    Symmetric,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FGroupConfig {
    pub structure: FStructure,
    pub size: usize,
}

/// A transitive rooted group given by generators, replacing the full
/// symmetric group at every level of this valency.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RootedGroupConfig {
    pub degree: usize,
    pub generators: Vec<Vec<usize>>,
}

impl GroupConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// Constant valency `d`, diagonal `H = S_d`, `F = Z/f`.
    pub fn constant(d: usize, f: usize) -> Self {
        Self::pattern(&[d], f)
    }

    /// Repeating valency pattern with diagonal `H`.
    pub fn pattern(pattern: &[usize], f: usize) -> Self {
        GroupConfig {
            valency: SeqConfig { pattern: pattern.to_vec(), prefix: Vec::new() },
            h_model: HModelConfig::DiagonalFull,
            f_group: FGroupConfig { structure: FStructure::Cyclic, size: f },
            c_seq: None,
            saturated: true,
            rooted_groups: Vec::new(),
        }
    }

    /// The infinite dihedral group `⟨s, h⟩` with `h = (h, s)` on the binary tree,
    /// extended by `F = Z/f` at the boundary.
    pub fn dinfty(f: usize) -> Self {
        GroupConfig {
            valency: SeqConfig { pattern: vec![2], prefix: Vec::new() },
            h_model: HModelConfig::Custom(CustomPortrait {
                factors: vec![2],
                generators: vec![vec![vec![1, 0]]],
                rules: RuleSeqConfig {
                    prefix: Vec::new(),
                    pattern: vec![LevelRules {
                        rooted: vec![Some(BlockRule { factor: 0, block: 0, block_size: None })],
                        root: None,
                    }],
                },
            }),
            f_group: FGroupConfig { structure: FStructure::Cyclic, size: f },
            c_seq: None,
            saturated: true,
            rooted_groups: Vec::new(),
        }
    }

    /// Generalized mother group on the `d`-regular tree.
    pub fn mother(d: usize, f: usize) -> Self {
        GroupConfig { h_model: HModelConfig::GeneralizedMother, ..Self::constant(d, f) }
    }

    /// Drops the first `k` levels.
    pub fn shift(&self, k: usize) -> Self {
        let shift_seq = |s: &SeqConfig| {
            let (prefix, pattern) = periodic_shift(&s.prefix, &s.pattern, k);
            SeqConfig { prefix, pattern }
        };
        let h_model = match &self.h_model {
            HModelConfig::Custom(p) => {
                let mut rules = p.rules.clone();
                for _ in 0..k {
                    if rules.prefix.is_empty() {
                        rules.pattern.rotate_left(1);
                    } else {
                        rules.prefix.remove(0);
                    }
                }
                HModelConfig::Custom(CustomPortrait { rules, ..p.clone() })
            }
            m => m.clone(),
        };
        GroupConfig {
            valency: shift_seq(&self.valency),
            h_model,
            c_seq: self.c_seq.as_ref().map(shift_seq),
            ..self.clone()
        }
    }
}

// ---------------------------------------------------------------------------
// built specification

#[derive(Clone, Debug, PartialEq, Eq)]
enum RuleSource {
    Diagonal { factor_of_degree: BTreeMap<usize, usize> },
    Mother { d: usize },
    Custom { prefix: Vec<LevelRules>, pattern: Vec<LevelRules> },
}

impl RuleSource {
    fn periodicity(&self) -> (usize, usize) {
        match self {
            RuleSource::Custom { prefix, pattern } => (prefix.len(), pattern.len()),
            _ => (0, 1),
        }
    }

    fn rules_at(&self, l: usize, d_next: usize, c: usize) -> LevelRules {
        match self {
            RuleSource::Diagonal { factor_of_degree } => {
                let rule = BlockRule { factor: factor_of_degree[&d_next], block: 0, block_size: None };
                LevelRules { rooted: vec![Some(rule); c], root: None }
            }
            RuleSource::Mother { d } => LevelRules {
                rooted: (0..c)
                    .map(|b| Some(BlockRule { factor: 0, block: b, block_size: Some(*d) }))
                    .collect(),
                root: (c == d - 1 && c > 1)
                    .then_some(BlockRule { factor: 0, block: 0, block_size: Some(*d) }),
            },
            RuleSource::Custom { prefix, pattern } => {
                if l < prefix.len() {
                    prefix[l].clone()
                } else {
                    pattern[(l - prefix.len()) % pattern.len()].clone()
                }
            }
        }
    }
}

/// Per level-class expansion tables.
#[derive(Clone, Debug)]
pub(crate) struct LevelClass {
    pub d: usize,
    pub d_next: usize,
    pub c: usize,
    pub next: usize,
    /// Index of the rooted group of degree `d` in `GroupSpec::s_groups`.
    pub s: usize,
    pub s_next: usize,
    /// `rho[t-1][h]`: index of `ρ_t(h)` in the rooted group of degree `d_next`.
    pub rho: Vec<Vec<u32>>,
    /// `sigma[h]`: index of `σ_h` in the rooted group of degree `d`.
    pub sigma: Vec<u32>,
    /// Smallest element of `H` acting like `h` on the subtree at this level.
    pub norm: Vec<u32>,
    /// `h` acts trivially strictly below the root of this level, i.e. every
    /// `ρ_t(h)` is the identity here and `h` is trivial from the next level on.
    pub trivial_below: Vec<bool>,
    pub has_sigma: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum HModelKind {
    DiagonalFull,
    GeneralizedMother,
    Custom,
}

/// A validated saturated (or relatively saturated) directed group.
#[derive(Clone, Debug)]
pub struct GroupSpec {
    pub valency: ValencySeq,
    pub cseq: CSeq,
    pub h_model: HModelKind,
    pub f_structure: FStructure,
    pub saturated: bool,
    /// Some rooted group is a proper transitive subgroup.
    pub experimental_rooted: bool,
    pub(crate) s_groups: Vec<FiniteGroup>,
    s_of_degree: BTreeMap<usize, usize>,
    pub(crate) h: FiniteGroup,
    pub(crate) f: FiniteGroup,
    rules: RuleSource,
    pub(crate) classes: Vec<LevelClass>,
    pub(crate) canon_tables: OnceLock<Vec<LetterTable>>,
    class_prefix: usize,
    class_period: usize,
    source: GroupConfig,
}

/// Wreath coordinates of a directed element at one level.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Expansion {
    /// The directed element in coordinate `0`, normalized at level `l + 1`.
    pub child: u32,
    /// Rooted components in coordinates `1..d_l`, identities beyond `c_l`.
    pub rooted: Vec<Perm>,
    /// Root permutation `σ_h`; fixes `0`.
    pub root: Perm,
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn tuple_from_images(degrees: &[usize], images: &[Vec<usize>]) -> Result<Tuple> {
    if images.len() != degrees.len() {
        return Err(Error::InvalidConfig(format!(
            "generator has {} factors, expected {}",
            images.len(),
            degrees.len()
        )));
    }
    images
        .iter()
        .zip(degrees)
        .map(|(img, &d)| {
            if img.len() != d {
                return Err(Error::InvalidConfig(format!("image list {img:?} is not of degree {d}")));
            }
            Perm::from_images(img)
        })
        .collect()
}

fn symmetric_generators(d: usize) -> Vec<Perm> {
    if d < 2 {
        return Vec::new();
    }
    vec![Perm::swap(d, 0, 1), Perm::cycle(d)]
}

/// Builds a [`GroupSpec`] from a configuration record.
pub fn build_group(config: &GroupConfig) -> Result<GroupSpec> {
    let valency = ValencySeq::new(config.valency.prefix.clone(), config.valency.pattern.clone())?;
    let cseq = match &config.c_seq {
        None => CSeq::full(&valency),
        Some(s) => {
            if s.pattern.is_empty() {
                return Err(Error::InvalidConfig("cSeq pattern must be non-empty".into()));
            }
            CSeq { prefix: s.prefix.clone(), pattern: s.pattern.clone() }
        }
    };

    // rooted groups, one per distinct valency
    let mut s_groups = Vec::new();
    let mut s_of_degree = BTreeMap::new();
    let mut experimental_rooted = false;
    for d in valency.values() {
        let group = match config.rooted_groups.iter().find(|r| r.degree == d) {
            None => FiniteGroup::symmetric(d),
            Some(r) => {
                let gens = r
                    .generators
                    .iter()
                    .map(|g| tuple_from_images(&[d], std::slice::from_ref(g)))
                    .collect::<Result<Vec<_>>>()?;
                let g = FiniteGroup::generated(&[d], &gens, MAX_H_ORDER)?;
                if !g.is_transitive() {
                    return Err(Error::InvalidGroup(format!(
                        "rooted group of degree {d} is not transitive"
                    )));
                }
                if g.order() < (1..=d).product::<usize>() {
                    experimental_rooted = true;
                }
                g
            }
        };
        s_of_degree.insert(d, s_groups.len());
        s_groups.push(group);
    }
    if let Some(r) = config.rooted_groups.iter().find(|r| !s_of_degree.contains_key(&r.degree)) {
        return Err(Error::InvalidConfig(format!(
            "rooted group given for degree {} which is not a valency",
            r.degree
        )));
    }

    let (h, rules, h_model) = match &config.h_model {
        HModelConfig::DiagonalFull => {
            let degrees: Vec<usize> = valency.values().into_iter().collect();
            let mut gens = Vec::new();
            for (i, &d) in degrees.iter().enumerate() {
                let group = &s_groups[s_of_degree[&d]];
                let factor_gens: Vec<Perm> = if config.rooted_groups.iter().any(|r| r.degree == d) {
                    (1..group.order() as u32).map(|e| *group.perm(e)).collect()
                } else {
                    symmetric_generators(d)
                };
                for p in factor_gens {
                    let mut t: Tuple = degrees.iter().map(|&x| Perm::identity(x)).collect();
                    t[i] = p;
                    gens.push(t);
                }
            }
            let h = FiniteGroup::generated(&degrees, &gens, MAX_H_ORDER)?;
            let factor_of_degree = degrees.iter().enumerate().map(|(i, &d)| (d, i)).collect();
            (h, RuleSource::Diagonal { factor_of_degree }, HModelKind::DiagonalFull)
        }
        HModelConfig::GeneralizedMother => {
            if valency.values().len() != 1 {
                return Err(Error::InvalidConfig(
                    "generalized-mother requires constant valency".into(),
                ));
            }
            let d = valency.d(0);
            let c = cseq.c(0);
            if cseq.prefix.iter().chain(&cseq.pattern).any(|&x| x != c) {
                return Err(Error::InvalidConfig("generalized-mother requires constant cSeq".into()));
            }
            if !config.rooted_groups.is_empty() {
                return Err(Error::InvalidConfig(
                    "generalized-mother uses the full symmetric rooted group".into(),
                ));
            }
            if c == 0 || c * d > MAX_DEGREE {
                return Err(Error::InvalidConfig(format!("mother group of degree {c}x{d} unsupported")));
            }
            let n = c * d;
            let block_perm = |p: &Perm, b: usize| {
                let mut img: Vec<usize> = (0..n).collect();
                for x in 0..d {
                    img[b * d + x] = b * d + p.apply(x);
                }
                Perm::from_images(&img).unwrap()
            };
            let mut gens: Vec<Tuple> = Vec::new();
            for b in 0..c {
                for p in symmetric_generators(d) {
                    gens.push(vec![block_perm(&p, b)]);
                }
            }
            if c == d - 1 && c > 1 {
                for q in symmetric_generators(c) {
                    let img: Vec<usize> = (0..n).map(|i| q.apply(i / d) * d + i % d).collect();
                    gens.push(vec![Perm::from_images(&img).unwrap()]);
                }
            }
            let h = FiniteGroup::generated(&[n], &gens, MAX_H_ORDER)?;
            (h, RuleSource::Mother { d }, HModelKind::GeneralizedMother)
        }
        HModelConfig::Custom(p) => {
            if p.rules.pattern.is_empty() {
                return Err(Error::InvalidConfig("custom rules pattern must be non-empty".into()));
            }
            let gens = p
                .generators
                .iter()
                .map(|g| tuple_from_images(&p.factors, g))
                .collect::<Result<Vec<_>>>()?;
            let h = FiniteGroup::generated(&p.factors, &gens, MAX_H_ORDER)?;
            let rules = RuleSource::Custom { prefix: p.rules.prefix.clone(), pattern: p.rules.pattern.clone() };
            (h, rules, HModelKind::Custom)
        }
    };

    if config.f_group.size < 1 {
        return Err(Error::InvalidConfig("F must have size at least 1".into()));
    }
    let f = match config.f_group.structure {
        FStructure::Cyclic => FiniteGroup::cyclic(config.f_group.size),
        FStructure::Symmetric => {
            if config.f_group.size > 7 {
                return Err(Error::InvalidConfig("symmetric F limited to degree 7".into()));
            }
            FiniteGroup::symmetric(config.f_group.size)
        }
    };

    let mut spec = GroupSpec {
        valency,
        cseq,
        h_model,
        f_structure: config.f_group.structure,
        saturated: config.saturated,
        experimental_rooted,
        s_groups,
        s_of_degree,
        h,
        f,
        rules,
        classes: Vec::new(),
        canon_tables: OnceLock::new(),
        class_prefix: 0,
        class_period: 1,
        source: config.clone(),
    };
    spec.build_classes()?;
    if config.saturated {
        spec.check_saturation()?;
    }
    Ok(spec)
}

impl GroupSpec {
    fn build_classes(&mut self) -> Result<()> {
        let (rp, rq) = self.rules.periodicity();
        let prefix = self.valency.prefix.len().max(self.cseq.prefix.len()).max(rp);
        let period = [self.valency.pattern.len(), self.cseq.pattern.len(), rq.max(1)]
            .into_iter()
            .fold(1, |a, b| a / gcd(a, b) * b);
        self.class_prefix = prefix;
        self.class_period = period;
        let n_classes = prefix + period;
        let h_order = self.h.order();
        let mut classes = Vec::with_capacity(n_classes);
        for l in 0..n_classes {
            let d = self.valency.d(l);
            let d_next = self.valency.d(l + 1);
            let c = self.cseq.c(l);
            if c < 1 || c >= d {
                return Err(Error::InvalidConfig(format!("c_{l} = {c} outside 1..={}", d - 1)));
            }
            let rules = self.rules.rules_at(l, d_next, c);
            if rules.rooted.len() != c {
                return Err(Error::InvalidConfig(format!(
                    "level {l}: {} rooted rules for c = {c}",
                    rules.rooted.len()
                )));
            }
            let s = self.s_of_degree[&d];
            let s_next = self.s_of_degree[&d_next];
            let mut rho = vec![vec![0u32; h_order]; c];
            let mut sigma = vec![0u32; h_order];
            for hi in 0..h_order as u32 {
                let elem = self.h.element(hi);
                for (t, rule) in rules.rooted.iter().enumerate() {
                    if let Some(rule) = rule {
                        let p = self.read_block(elem, rule, d_next, l)?;
                        rho[t][hi as usize] = self.s_groups[s_next].index_of_perm(&p).ok_or_else(|| {
                            Error::InvalidGroup(format!(
                                "level {l}: ρ_{} = {p:?} is outside the rooted group of degree {d_next}",
                                t + 1
                            ))
                        })?;
                    }
                }
                if let Some(rule) = &rules.root {
                    let p = self.read_root(elem, rule, d, c, l)?;
                    sigma[hi as usize] = self.s_groups[s].index_of_perm(&p).ok_or_else(|| {
                        Error::InvalidGroup(format!("level {l}: σ_h = {p:?} outside the rooted group"))
                    })?;
                }
            }
            classes.push(LevelClass {
                d,
                d_next,
                c,
                next: 0,
                s,
                s_next,
                rho,
                sigma,
                norm: Vec::new(),
                trivial_below: Vec::new(),
                has_sigma: rules.root.is_some(),
            });
        }
        for i in 0..n_classes {
            classes[i].next = self.class_of_with(i + 1, prefix, period);
        }

        // trivial-from-here as a greatest fixpoint over the class cycle
        let mut triv_from = vec![vec![true; h_order]; n_classes];
        loop {
            let mut changed = false;
            for ci in 0..n_classes {
                let next = classes[ci].next;
                for h in 0..h_order {
                    let cl = &classes[ci];
                    let v = cl.sigma[h] == 0 && cl.rho.iter().all(|r| r[h] == 0) && triv_from[next][h];
                    if v != triv_from[ci][h] {
                        triv_from[ci][h] = v;
                        changed = true;
                    }
                }
            }
            if !changed {
                break;
            }
        }
        for ci in 0..n_classes {
            let next = classes[ci].next;
            classes[ci].trivial_below = (0..h_order)
                .map(|h| classes[ci].rho.iter().all(|r| r[h] == 0) && triv_from[next][h])
                .collect();
        }

        // action signature over all classes reachable from each class
        for ci in 0..n_classes {
            let mut reach = vec![ci];
            let mut x = classes[ci].next;
            while !reach.contains(&x) {
                reach.push(x);
                x = classes[x].next;
            }
            let mut first: HashMap<Vec<u32>, u32> = HashMap::new();
            let mut norm = vec![0u32; h_order];
            for h in 0..h_order {
                let mut sig = Vec::new();
                for &r in &reach {
                    sig.push(classes[r].sigma[h]);
                    sig.extend(classes[r].rho.iter().map(|v| v[h]));
                }
                norm[h] = *first.entry(sig).or_insert(h as u32);
            }
            classes[ci].norm = norm;
        }
        self.classes = classes;
        Ok(())
    }

    fn read_block(&self, elem: &Tuple, rule: &BlockRule, d_next: usize, l: usize) -> Result<Perm> {
        let p = elem.get(rule.factor).ok_or_else(|| {
            Error::InvalidConfig(format!("level {l}: rule names missing factor {}", rule.factor))
        })?;
        let bs = rule.block_size.unwrap_or(p.degree());
        if bs != d_next || (rule.block + 1) * bs > p.degree() {
            return Err(Error::InvalidConfig(format!(
                "level {l}: block {} of size {bs} does not give a permutation of degree {d_next}",
                rule.block
            )));
        }
        let base = rule.block * bs;
        let img: Vec<usize> = (0..bs).map(|x| p.apply(base + x) % bs).collect();
        Perm::from_images(&img)
    }

    fn read_root(&self, elem: &Tuple, rule: &BlockRule, d: usize, c: usize, l: usize) -> Result<Perm> {
        let p = elem.get(rule.factor).ok_or_else(|| {
            Error::InvalidConfig(format!("level {l}: root rule names missing factor {}", rule.factor))
        })?;
        let bs = rule.block_size.unwrap_or(1);
        if p.degree() != bs * c {
            return Err(Error::InvalidConfig(format!(
                "level {l}: root rule factor of degree {} does not have {c} blocks of size {bs}",
                p.degree()
            )));
        }
        let mut img: Vec<usize> = (0..d).collect();
        for t in 1..=c {
            img[t] = 1 + p.apply((t - 1) * bs) / bs;
        }
        Perm::from_images(&img)
    }

    fn check_saturation(&self) -> Result<()> {
        let h_order = self.h.order();
        for (ci, cl) in self.classes.iter().enumerate() {
            let target = &self.s_groups[cl.s_next];
            for (t, rho) in cl.rho.iter().enumerate() {
                let mut counts = vec![0usize; target.order()];
                for &x in rho {
                    counts[x as usize] += 1;
                }
                if counts.iter().any(|&k| k * target.order() != h_order) {
                    return Err(Error::InvalidGroup(format!(
                        "level class {ci}: projection onto position {} is not equidistributed on the rooted group of degree {}",
                        t + 1,
                        cl.d_next
                    )));
                }
            }
            if cl.has_sigma {
                // joint projection onto (ρ_1, .., ρ_c, σ) must be uniform on S_{d'}^c ⋊ S_c
                let mut counts: HashMap<Vec<u32>, usize> = HashMap::new();
                for h in 0..h_order {
                    let mut key: Vec<u32> = cl.rho.iter().map(|r| r[h]).collect();
                    key.push(cl.sigma[h]);
                    *counts.entry(key).or_default() += 1;
                }
                let expected = target.order().pow(cl.c as u32) * (1..=cl.c).product::<usize>();
                let fibre = h_order / expected.max(1);
                if counts.len() != expected || counts.values().any(|&k| k != fibre) {
                    return Err(Error::InvalidGroup(format!(
                        "level class {ci}: projection onto the wreath factor is not equidistributed"
                    )));
                }
            }
        }
        Ok(())
    }

    fn class_of_with(&self, l: usize, prefix: usize, period: usize) -> usize {
        if l < prefix {
            l
        } else {
            prefix + (l - prefix) % period
        }
    }

    /// Level class of level `l`.
    #[inline]
    pub fn class_of(&self, l: usize) -> usize {
        self.class_of_with(l, self.class_prefix, self.class_period)
    }

    pub fn num_classes(&self) -> usize {
        self.classes.len()
    }

    #[inline]
    pub(crate) fn class(&self, l: usize) -> &LevelClass {
        &self.classes[self.class_of(l)]
    }

    /// The rooted group acting at level `l`.
    #[inline]
    pub fn s_group(&self, l: usize) -> &FiniteGroup {
        &self.s_groups[self.class(l).s]
    }

    pub fn s_group_of_degree(&self, d: usize) -> Option<&FiniteGroup> {
        self.s_of_degree.get(&d).map(|&i| &self.s_groups[i])
    }

    pub fn h_group(&self) -> &FiniteGroup {
        &self.h
    }

    pub fn f_group(&self) -> &FiniteGroup {
        &self.f
    }

    pub fn f_order(&self) -> usize {
        self.f.order()
    }

    pub fn f_is_abelian(&self) -> bool {
        self.f.is_abelian()
    }

    /// Order of the letter group `HF` (before normalization).
    pub fn hf_order(&self) -> usize {
        self.h.order() * self.f.order()
    }

    #[inline]
    pub fn hf_join(&self, h: u32, f: u32) -> u32 {
        h * self.f.order() as u32 + f
    }

    #[inline]
    pub fn hf_split(&self, k: u32) -> (u32, u32) {
        let m = self.f.order() as u32;
        (k / m, k % m)
    }

    /// Product in `HF` at level `l`, normalized for that level.
    #[inline]
    pub fn hf_mul(&self, l: usize, a: u32, b: u32) -> u32 {
        let (ha, fa) = self.hf_split(a);
        let (hb, fb) = self.hf_split(b);
        let h = self.class(l).norm[self.h.mul(ha, hb) as usize];
        self.hf_join(h, self.f.mul(fa, fb))
    }

    #[inline]
    pub fn hf_inv(&self, l: usize, a: u32) -> u32 {
        let (h, f) = self.hf_split(a);
        self.hf_join(self.class(l).norm[self.h.inv(h) as usize], self.f.inv(f))
    }

    /// Normal form of an `HF` letter at level `l`.
    #[inline]
    pub fn hf_norm(&self, l: usize, a: u32) -> u32 {
        let (h, f) = self.hf_split(a);
        self.hf_join(self.class(l).norm[h as usize], f)
    }

    #[inline]
    pub fn norm_h(&self, l: usize, h: u32) -> u32 {
        self.class(l).norm[h as usize]
    }

    /// Distinct normalized `H` elements at level `l`.
    pub fn h_classes(&self, l: usize) -> Vec<u32> {
        let norm = &self.class(l).norm;
        (0..self.h.order() as u32).filter(|&h| norm[h as usize] == h).collect()
    }

    pub fn d(&self, l: usize) -> usize {
        self.valency.d(l)
    }

    pub fn c(&self, l: usize) -> usize {
        self.cseq.c(l)
    }

    /// `h` acts trivially on every vertex strictly below level `l`.
    pub fn trivial_below(&self, l: usize, h: u32) -> bool {
        self.class(l).trivial_below[h as usize]
    }

    /// Index of `σ_h` at level `l` in the rooted group of that level.
    pub fn sigma(&self, l: usize, h: u32) -> u32 {
        self.class(l).sigma[h as usize]
    }

    /// The same group with its first `k` levels removed.
    pub fn shift(&self, k: usize) -> Result<GroupSpec> {
        build_group(&self.source.shift(k))
    }

    pub fn config(&self) -> &GroupConfig {
        &self.source
    }

    /// Short human-readable description.
    pub fn summary(&self) -> String {
        let model = match self.h_model {
            HModelKind::DiagonalFull => "diagonal-full",
            HModelKind::GeneralizedMother => "generalized-mother",
            HModelKind::Custom => "custom",
        };
        let f = match self.f_structure {
            FStructure::Cyclic => format!("Z/{}", self.f.order()),
            FStructure::Symmetric => format!("S_{}", self.f.degrees()[0]),
        };
        format!(
            "valency prefix {:?} pattern {:?}; c prefix {:?} pattern {:?}; H {} of order {}; F = {}; saturated: {}; level classes: {}{}",
            self.valency.prefix,
            self.valency.pattern,
            self.cseq.prefix,
            self.cseq.pattern,
            model,
            self.h.order(),
            f,
            self.saturated,
            self.classes.len(),
            if self.experimental_rooted { "; non-full rooted groups (experimental)" } else { "" }
        )
    }
}

/// Wreath coordinates of the directed element `h` at level `l`.
pub fn expand_directed(spec: &GroupSpec, h: u32, l: usize) -> Expansion {
    let cl = spec.class(l);
    let s_next = &spec.s_groups[cl.s_next];
    let mut rooted = vec![Perm::identity(cl.d_next); cl.d - 1];
    for t in 0..cl.c {
        rooted[t] = *s_next.perm(cl.rho[t][h as usize]);
    }
    Expansion {
        child: spec.norm_h(l + 1, h),
        rooted,
        root: *spec.s_groups[cl.s].perm(cl.sigma[h as usize]),
    }
}

/// A point of the boundary of the form `prefix · 0^∞`, stored with trailing
/// zeros stripped.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Ray(pub Vec<u8>);

impl Ray {
    pub fn distinguished() -> Self {
        Ray(Vec::new())
    }

    pub fn new(mut prefix: Vec<u8>) -> Self {
        while prefix.last() == Some(&0) {
            prefix.pop();
        }
        Ray(prefix)
    }

    pub fn is_distinguished(&self) -> bool {
        self.0.is_empty()
    }
}

fn check_vertex(spec: &GroupSpec, level: usize, v: &[u8]) -> Result<()> {
    for (i, &x) in v.iter().enumerate() {
        if x as usize >= spec.d(level + i) {
            return Err(Error::MalformedVertex(format!(
                "coordinate {i} = {x} exceeds valency {}",
                spec.d(level + i)
            )));
        }
    }
    Ok(())
}

/// Applies a rooted letter at level `l` to the coordinates `v` of the subtree
/// rooted at a level-`l` vertex.
#[inline]
fn apply_s(spec: &GroupSpec, l: usize, s: u32, v: &mut [u8]) {
    if let Some(x) = v.first_mut() {
        *x = spec.s_group(l).perm(s).apply(*x as usize) as u8;
    }
}

/// Applies a directed element at level `l`. When `extend` is set, `v` is the
/// prefix of a ray and may grow by one coordinate.
fn apply_h(spec: &GroupSpec, l: usize, h: u32, v: &mut Vec<u8>, extend: bool) {
    let mut i = 0;
    loop {
        let lvl = l + i;
        let cl = spec.class(lvl);
        if i >= v.len() {
            return;
        }
        let t = v[i] as usize;
        v[i] = spec.s_groups[cl.s].perm(cl.sigma[h as usize]).apply(t) as u8;
        if t == 0 {
            i += 1;
            continue;
        }
        if t <= cl.c {
            let r = spec.s_groups[cl.s_next].perm(cl.rho[t - 1][h as usize]);
            if i + 1 < v.len() {
                v[i + 1] = r.apply(v[i + 1] as usize) as u8;
            } else if extend {
                v.push(r.apply(0) as u8);
            }
        }
        return;
    }
}

/// Image of the level-`word.level` subtree vertex `v` under `word`.
pub fn act_vertex(spec: &GroupSpec, word: &AlternateWord, v: &[u8]) -> Result<Vec<u8>> {
    check_vertex(spec, word.level, v)?;
    let l = word.level;
    let mut v = v.to_vec();
    for j in 0..word.k.len() {
        apply_s(spec, l, word.s[j], &mut v);
        let (h, _) = spec.hf_split(word.k[j]);
        apply_h(spec, l, h, &mut v, false);
    }
    apply_s(spec, l, *word.s.last().unwrap(), &mut v);
    Ok(v)
}

/// Image of `ray` under `word`, together with the boundary label the word
/// carries at `ray`: the ordered product of the `f_j` whose letters meet the
/// distinguished ray along the trajectory of `ray`.
pub fn act_ray(spec: &GroupSpec, word: &AlternateWord, ray: &Ray) -> Result<(Ray, u32)> {
    check_vertex(spec, word.level, &ray.0)?;
    let l = word.level;
    let mut v = ray.0.clone();
    let mut label = 0u32;
    for j in 0..word.k.len() {
        if v.is_empty() {
            v.push(0);
        }
        apply_s(spec, l, word.s[j], &mut v);
        while v.last() == Some(&0) {
            v.pop();
        }
        let (h, f) = spec.hf_split(word.k[j]);
        if v.is_empty() {
            label = spec.f.mul(label, f);
        }
        apply_h(spec, l, h, &mut v, true);
        while v.last() == Some(&0) {
            v.pop();
        }
    }
    if v.is_empty() {
        v.push(0);
    }
    apply_s(spec, l, *word.s.last().unwrap(), &mut v);
    Ok((Ray::new(v), label))
}

/// Elements of the rooted group at level `l`.
pub fn rooted_elements(spec: &GroupSpec, l: usize) -> Vec<Perm> {
    let g = spec.s_group(l);
    (0..g.order() as u32).map(|i| *g.perm(i)).collect()
}
