//! Alternate words and the wreath rewriting process.
//!
//! A word `s_1 k_1 s_2 .. k_n s_{n+1}` at level `l` stores rooted letters as
//! indices into the rooted group of degree `d_l` and `HF` letters as joined
//! indices `h * |F| + f` (see [`GroupSpec::hf_join`]). Identity letters are
//! kept: `1_S` and `1_HF` are distinct letters.
//!
//! Rewriting sends `k_j` into coordinate `t` exactly when the running root
//! permutation `π_j = s_1 σ_{h_1} s_2 .. s_j` maps `t` to `0`; coordinate `t`
//! receives the rooted component `ρ_{π_j(t)}(h_j)` when `1 <= π_j(t) <= c_l`
//! and nothing otherwise.

use std::collections::{BTreeMap, HashMap};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::group_model::{act_ray, GroupSpec, Ray};
use crate::perm::{FiniteGroup, Perm};

/// Default cap on visited nodes for [`is_trivial`] and [`canonical_key`].
pub const DEFAULT_STATE_BUDGET: usize = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Letter {
    /// Rooted letter, index into the rooted group of the word's level.
    S(u32),
    /// `HF` letter, joined index.
    K(u32),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct AlternateWord {
    pub level: usize,
    /// `s_1 .. s_{n+1}`.
    pub s: Vec<u32>,
    /// `k_1 .. k_n`.
    pub k: Vec<u32>,
}

impl AlternateWord {
    pub fn identity(level: usize) -> Self {
        AlternateWord { level, s: vec![0], k: Vec::new() }
    }

    pub fn new(level: usize, s: Vec<u32>, k: Vec<u32>) -> Result<Self> {
        if s.len() != k.len() + 1 {
            return Err(Error::MalformedWord(format!(
                "{} rooted letters for {} HF letters",
                s.len(),
                k.len()
            )));
        }
        Ok(AlternateWord { level, s, k })
    }

    /// Number of `HF` letters.
    #[inline]
    pub fn len(&self) -> usize {
        self.k.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.k.is_empty()
    }

    pub fn letters(&self) -> Vec<Letter> {
        let mut out = Vec::with_capacity(2 * self.k.len() + 1);
        for j in 0..self.k.len() {
            out.push(Letter::S(self.s[j]));
            out.push(Letter::K(self.k[j]));
        }
        out.push(Letter::S(self.s[self.k.len()]));
        out
    }

    pub fn inverse(&self, spec: &GroupSpec) -> Self {
        let sg = spec.s_group(self.level);
        AlternateWord {
            level: self.level,
            s: self.s.iter().rev().map(|&x| sg.inv(x)).collect(),
            k: self.k.iter().rev().map(|&y| spec.hf_inv(self.level, y)).collect(),
        }
    }

    /// The product `self · other`; the touching rooted letters are merged.
    pub fn concat(&self, spec: &GroupSpec, other: &AlternateWord) -> Self {
        debug_assert_eq!(self.level, other.level);
        let sg = spec.s_group(self.level);
        let mut s = self.s.clone();
        let last = s.pop().unwrap();
        s.push(sg.mul(last, other.s[0]));
        s.extend_from_slice(&other.s[1..]);
        let mut k = self.k.clone();
        k.extend_from_slice(&other.k);
        AlternateWord { level: self.level, s, k }
    }

    /// The same word with every boundary component set to `1_F`.
    pub fn strip_f(&self, spec: &GroupSpec) -> Self {
        AlternateWord {
            level: self.level,
            s: self.s.clone(),
            k: self.k.iter().map(|&y| spec.hf_join(spec.hf_split(y).0, 0)).collect(),
        }
    }

    /// Compact text form, e.g. `s1 k(1,0) s0`.
    pub fn display(&self, spec: &GroupSpec) -> String {
        let mut out = String::new();
        for (i, l) in self.letters().into_iter().enumerate() {
            if i > 0 {
                out.push(' ');
            }
            match l {
                Letter::S(x) => out.push_str(&format!("s{x}")),
                Letter::K(y) => {
                    let (h, f) = spec.hf_split(y);
                    out.push_str(&format!("k({h},{f})"));
                }
            }
        }
        out
    }
}

/// Incremental builder of canonical alternate words.
struct Builder {
    level: usize,
    s: Vec<u32>,
    k: Vec<u32>,
    last_k: bool,
}

impl Builder {
    fn new(level: usize) -> Self {
        Builder { level, s: vec![0], k: Vec::new(), last_k: false }
    }

    #[inline]
    fn push_s(&mut self, g: &FiniteGroup, x: u32) {
        if self.last_k {
            self.s.push(x);
            self.last_k = false;
        } else {
            let last = self.s.last_mut().unwrap();
            *last = g.mul(*last, x);
        }
    }

    #[inline]
    fn push_k(&mut self, spec: &GroupSpec, y: u32) {
        if self.last_k {
            let last = self.k.last_mut().unwrap();
            *last = spec.hf_mul(self.level, *last, y);
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

/// Merges packs of consecutive letters from the same finite group.
pub fn canonical_alternate(spec: &GroupSpec, level: usize, raw: &[Letter]) -> AlternateWord {
    let sg = spec.s_group(level);
    let mut b = Builder::new(level);
    for &l in raw {
        match l {
            Letter::S(x) => b.push_s(sg, x),
            Letter::K(y) => b.push_k(spec, spec.hf_norm(level, y)),
        }
    }
    b.finish()
}

/// One rewriting step: the `d_l` coordinate words and the root permutation
/// (index into the rooted group of level `l`).
pub fn rewrite_step(spec: &GroupSpec, w: &AlternateWord) -> (Vec<AlternateWord>, u32) {
    let (children, root, _) = rewrite_impl(spec, w, false);
    (children, root)
}

/// As [`rewrite_step`], also returning for each child factor the indices of
/// the parent factors merged into it.
pub fn rewrite_step_traced(
    spec: &GroupSpec,
    w: &AlternateWord,
) -> (Vec<AlternateWord>, u32, Vec<Vec<Vec<usize>>>) {
    rewrite_impl(spec, w, true)
}

fn rewrite_impl(
    spec: &GroupSpec,
    w: &AlternateWord,
    trace: bool,
) -> (Vec<AlternateWord>, u32, Vec<Vec<Vec<usize>>>) {
    let l = w.level;
    let cl = spec.class(l);
    let sg = spec.s_group(l);
    let sn = spec.s_group(l + 1);
    let d = cl.d;
    let mut builders: Vec<Builder> = (0..d).map(|_| Builder::new(l + 1)).collect();
    let mut sources: Vec<Vec<Vec<usize>>> = if trace { vec![Vec::new(); d] } else { Vec::new() };
    let next_norm = &spec.class(l + 1).norm;
    let mut pi = w.s[0];
    for j in 0..w.k.len() {
        let (h, f) = spec.hf_split(w.k[j]);
        let p = sg.perm(pi);
        for (t, b) in builders.iter_mut().enumerate() {
            let idx = p.apply(t);
            if idx == 0 {
                let fresh = !b.last_k;
                b.push_k(spec, spec.hf_join(next_norm[h as usize], f));
                if trace {
                    if fresh {
                        sources[t].push(vec![j]);
                    } else {
                        sources[t].last_mut().unwrap().push(j);
                    }
                }
            } else if idx <= cl.c {
                b.push_s(sn, cl.rho[idx - 1][h as usize]);
            }
        }
        pi = sg.mul(sg.mul(pi, cl.sigma[h as usize]), w.s[j + 1]);
    }
    let children = builders.into_iter().map(Builder::finish).collect();
    (children, pi, sources)
}

/// A node of the rewriting tree.
#[derive(Clone, Debug, Serialize)]
pub struct WordNode {
    /// Path from the word's root, 0-based child indices.
    pub vertex: Vec<u8>,
    pub word: AlternateWord,
    /// Root permutation of the rewrite at this node, for nodes with `m_v >= 2`.
    pub root: Option<Vec<u8>>,
    /// Indices of the child nodes in [`WordTree::nodes`].
    pub children: Vec<usize>,
    /// For each `HF` factor of `word`, the factor indices in the parent word
    /// that were merged into it.
    pub sources: Vec<Vec<usize>>,
}

/// Iterated rewriting down to words of length at most one.
#[derive(Clone, Debug, Serialize)]
pub struct WordTree {
    pub level: usize,
    pub nodes: Vec<WordNode>,
}

impl WordTree {
    pub fn depth(&self) -> usize {
        self.nodes.iter().map(|n| n.vertex.len()).max().unwrap_or(0)
    }

    pub fn leaves(&self) -> impl Iterator<Item = &WordNode> {
        self.nodes.iter().filter(|n| n.children.is_empty())
    }
}

pub fn rewrite_full(spec: &GroupSpec, w: &AlternateWord) -> WordTree {
    let mut nodes = vec![WordNode {
        vertex: Vec::new(),
        word: w.clone(),
        root: None,
        children: Vec::new(),
        sources: (0..w.len()).map(|j| vec![j]).collect(),
    }];
    let mut i = 0;
    while i < nodes.len() {
        if nodes[i].word.len() >= 2 {
            let (children, root, sources) = rewrite_step_traced(spec, &nodes[i].word);
            let level = nodes[i].word.level;
            nodes[i].root = Some(spec.s_group(level).perm(root).images().to_vec());
            for (t, (child, src)) in children.into_iter().zip(sources).enumerate() {
                let mut vertex = nodes[i].vertex.clone();
                vertex.push(t as u8);
                let idx = nodes.len();
                nodes[i].children.push(idx);
                nodes.push(WordNode { vertex, word: child, root: None, children: Vec::new(), sources: src });
            }
        }
        i += 1;
    }
    WordTree { level: w.level, nodes }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MinimalNodeKind {
    Internal { perm: Vec<u8> },
    Active { word: AlternateWord },
    Inactive { perm: Vec<u8> },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MinimalNode {
    pub vertex: Vec<u8>,
    pub kind: MinimalNodeKind,
}

/// Smallest regular subtree whose leaf words have length at most one.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MinimalTree {
    pub level: usize,
    pub nodes: Vec<MinimalNode>,
}

impl MinimalTree {
    pub fn depth(&self) -> usize {
        self.nodes.iter().map(|n| n.vertex.len()).max().unwrap_or(0)
    }

    pub fn active_leaves(&self) -> impl Iterator<Item = (&Vec<u8>, &AlternateWord)> {
        self.nodes.iter().filter_map(|n| match &n.kind {
            MinimalNodeKind::Active { word } => Some((&n.vertex, word)),
            _ => None,
        })
    }
}

pub fn minimal_tree(spec: &GroupSpec, w: &AlternateWord) -> MinimalTree {
    let tree = rewrite_full(spec, w);
    let nodes = tree
        .nodes
        .into_iter()
        .map(|n| {
            let kind = match (n.word.len(), n.root) {
                (_, Some(perm)) => MinimalNodeKind::Internal { perm },
                (0, None) => MinimalNodeKind::Inactive {
                    perm: spec.s_group(n.word.level).perm(n.word.s[0]).images().to_vec(),
                },
                _ => MinimalNodeKind::Active { word: n.word },
            };
            MinimalNode { vertex: n.vertex, kind }
        })
        .collect();
    MinimalTree { level: w.level, nodes }
}

/// Visits every leaf word (length at most one) of the rewriting tree.
fn for_each_leaf(spec: &GroupSpec, w: &AlternateWord, mut visit: impl FnMut(&AlternateWord)) {
    let mut stack = vec![w.clone()];
    while let Some(x) = stack.pop() {
        if x.len() <= 1 {
            visit(&x);
        } else {
            stack.extend(rewrite_step(spec, &x).0);
        }
    }
}

/// Number of active leaves of the minimal tree.
pub fn activity(spec: &GroupSpec, w: &AlternateWord) -> usize {
    let mut a = 0;
    for_each_leaf(spec, w, |x| a += x.len());
    a
}

/// Activity and the number of active leaves carrying a non-trivial label.
pub fn activity_support(spec: &GroupSpec, w: &AlternateWord) -> (usize, usize) {
    let (mut a, mut supp) = (0, 0);
    for_each_leaf(spec, w, |x| {
        if x.len() == 1 {
            a += 1;
            if spec.hf_split(x.k[0]).1 != 0 {
                supp += 1;
            }
        }
    });
    (a, supp)
}

/// Boundary point carried by an active leaf at `vertex` with word `s_1 k s_2`.
fn active_point(spec: &GroupSpec, level: usize, vertex: &[u8], leaf: &AlternateWord) -> Ray {
    let sg = spec.s_group(level + vertex.len());
    let t0 = sg.perm(sg.inv(leaf.s[0])).apply(0);
    let mut v = vertex.to_vec();
    v.push(t0 as u8);
    Ray::new(v)
}

/// Active boundary points, one per active leaf.
pub fn active_boundary(spec: &GroupSpec, w: &AlternateWord) -> Vec<Ray> {
    let t = minimal_tree(spec, w);
    let mut out: Vec<Ray> = t.active_leaves().map(|(v, x)| active_point(spec, w.level, v, x)).collect();
    out.sort();
    out
}

#[derive(Clone, Debug, Serialize)]
pub struct ForestNode {
    pub vertex: Vec<u8>,
    pub factor: usize,
}

/// The graph on all `HF` factors of all rewritten words, linking a factor to
/// the factor it feeds one level down.
#[derive(Clone, Debug, Serialize)]
pub struct AscendanceForest {
    pub nodes: Vec<ForestNode>,
    /// `(from, to)`: factor `from` is merged into factor `to` one level down.
    pub edges: Vec<(usize, usize)>,
    pub component: Vec<usize>,
    pub components: usize,
    pub acyclic: bool,
}

fn uf_find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

pub fn ascendance_forest(spec: &GroupSpec, w: &AlternateWord) -> AscendanceForest {
    let tree = rewrite_full(spec, w);
    let mut base = vec![0usize; tree.nodes.len()];
    let mut nodes = Vec::new();
    for (i, n) in tree.nodes.iter().enumerate() {
        base[i] = nodes.len();
        nodes.extend((0..n.word.len()).map(|f| ForestNode { vertex: n.vertex.clone(), factor: f }));
    }
    let mut edges = Vec::new();
    for (i, n) in tree.nodes.iter().enumerate() {
        for &c in &n.children {
            for (fi, src) in tree.nodes[c].sources.iter().enumerate() {
                for &j in src {
                    edges.push((base[i] + j, base[c] + fi));
                }
            }
        }
    }
    let mut parent: Vec<usize> = (0..nodes.len()).collect();
    let mut acyclic = true;
    for &(a, b) in &edges {
        let (ra, rb) = (uf_find(&mut parent, a), uf_find(&mut parent, b));
        if ra == rb {
            acyclic = false;
        } else {
            parent[ra] = rb;
        }
    }
    let mut ids = HashMap::new();
    let component: Vec<usize> = (0..nodes.len())
        .map(|x| {
            let r = uf_find(&mut parent, x);
            let next = ids.len();
            *ids.entry(r).or_insert(next)
        })
        .collect();
    AscendanceForest { nodes, edges, component, components: ids.len(), acyclic }
}

/// Root-word factor indices grouped by forest component, each list in
/// increasing order, keyed by the active leaf the component ends in.
pub fn forest_leaf_sources(spec: &GroupSpec, w: &AlternateWord) -> Vec<(Vec<u8>, Vec<usize>)> {
    let forest = ascendance_forest(spec, w);
    let mut by_comp: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (i, n) in forest.nodes.iter().enumerate() {
        if n.vertex.is_empty() {
            by_comp.entry(forest.component[i]).or_default().push(n.factor);
        }
    }
    let tree = minimal_tree(spec, w);
    let mut out = Vec::new();
    for (v, _) in tree.active_leaves() {
        let idx = forest.nodes.iter().position(|n| &n.vertex == v).unwrap();
        out.push((v.clone(), by_comp.remove(&forest.component[idx]).unwrap_or_default()));
    }
    out
}

/// Boundary function of `w`: active points with a non-trivial label. Labels
/// are ordered products of the root-word `f_j` over forest components.
pub fn boundary_function(spec: &GroupSpec, w: &AlternateWord) -> BTreeMap<Ray, u32> {
    let tree = minimal_tree(spec, w);
    let mut out = BTreeMap::new();
    for (v, factors) in forest_leaf_sources(spec, w) {
        let f = factors.iter().fold(0, |acc, &j| spec.f_group().mul(acc, spec.hf_split(w.k[j]).1));
        if f != 0 {
            let leaf = tree.active_leaves().find(|(x, _)| **x == v).unwrap().1;
            out.insert(active_point(spec, w.level, &v, leaf), f);
        }
    }
    out
}

/// Inverted orbit `{0^∞, r_k 0^∞, r_{k-1} r_k 0^∞, ..}` of the product
/// `r_1 .. r_k` of `letters`, in the right-action convention.
pub fn inverted_orbit(spec: &GroupSpec, level: usize, letters: &[Letter]) -> Result<Vec<Ray>> {
    let mut out = vec![Ray::distinguished()];
    for start in (0..letters.len()).rev() {
        let w = canonical_alternate(spec, level, &letters[start..]);
        out.push(act_ray(spec, &w, &Ray::distinguished())?.0);
    }
    out.sort();
    out.dedup();
    Ok(out)
}

/// Size of the inverted orbit of the reversed inverse of the interior word
/// `h_1 s_2 h_2 .. h_{n-1} s_n`. Its points are translates by `s_1` of the points
/// where the letters of `w` meet the distinguished ray.
pub fn inverted_orbit_activity(spec: &GroupSpec, w: &AlternateWord) -> Result<usize> {
    if w.is_empty() {
        return Ok(0);
    }
    let n = w.len();
    let l = w.level;
    let sg = spec.s_group(l);
    let mut inv = Vec::with_capacity(2 * n);
    for j in (0..n - 1).rev() {
        inv.push(Letter::S(sg.inv(w.s[j + 1])));
        let (h, _) = spec.hf_split(w.k[j]);
        inv.push(Letter::K(spec.hf_join(spec.h_group().inv(h), 0)));
    }
    Ok(inverted_orbit(spec, l, &inv)?.len())
}

/// Decides whether `w` represents the identity. `budget` caps the number of
/// rewriting nodes visited.
pub fn is_trivial(spec: &GroupSpec, w: &AlternateWord, budget: usize) -> Result<bool> {
    let mut visited = 0usize;
    let mut stack = vec![w.clone()];
    while let Some(x) = stack.pop() {
        visited += 1;
        if visited > budget {
            return Err(Error::StateBudget { budget });
        }
        let l = x.level;
        let sg = spec.s_group(l);
        match x.len() {
            0 => {
                if x.s[0] != 0 {
                    return Ok(false);
                }
            }
            1 => {
                let (h, f) = spec.hf_split(x.k[0]);
                let root = sg.mul(sg.mul(x.s[0], spec.sigma(l, h)), x.s[1]);
                if f != 0 || root != 0 || !spec.trivial_below(l, h) {
                    return Ok(false);
                }
            }
            _ => {
                let (children, root) = rewrite_step(spec, &x);
                if root != 0 {
                    return Ok(false);
                }
                stack.extend(children);
            }
        }
    }
    Ok(true)
}

/// Structural normal form of a group element.
///
/// `Rooted` is an element acting only at the root; `Directed` a single
/// normalized `HF` letter; `Node` carries the root permutation and the
/// normal forms of the coordinates. Collapsing to `Rooted` or `Directed` is
/// applied whenever the coordinates allow it, so two words have equal forms
/// exactly when they represent the same element.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CanonicalForm {
    Rooted(Perm),
    Directed { h: u32, f: u32 },
    Node(Perm, Vec<CanonicalForm>),
}

impl CanonicalForm {
    /// Number of entries in the serialized description.
    pub fn size(&self) -> usize {
        match self {
            CanonicalForm::Rooted(_) | CanonicalForm::Directed { .. } => 1,
            CanonicalForm::Node(_, c) => 1 + c.iter().map(CanonicalForm::size).sum::<usize>(),
        }
    }

    pub fn is_identity(&self) -> bool {
        matches!(self, CanonicalForm::Rooted(p) if p.is_identity())
    }
}

impl Serialize for CanonicalForm {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        #[serde(rename_all = "lowercase")]
        enum Repr<'a> {
            Rooted(&'a [u8]),
            Directed { h: u32, f: u32 },
            Node { perm: &'a [u8], children: &'a [CanonicalForm] },
        }
        match self {
            CanonicalForm::Rooted(p) => Repr::Rooted(p.images()),
            CanonicalForm::Directed { h, f } => Repr::Directed { h: *h, f: *f },
            CanonicalForm::Node(p, c) => Repr::Node { perm: p.images(), children: c },
        }
        .serialize(ser)
    }
}

pub(crate) type LetterTable = HashMap<(u32, Vec<CanonicalForm>), CanonicalForm>;

fn letter_tables(spec: &GroupSpec) -> &Vec<LetterTable> {
    spec.canon_tables.get_or_init(|| {
        (0..spec.num_classes())
            .map(|c| {
                let l = c;
                let mut table = HashMap::new();
                for h in spec.h_classes(l) {
                    for f in 0..spec.f_order() as u32 {
                        if let CanonicalForm::Directed { .. } = canon_letter(spec, l, h, f) {
                            let (root, children) = letter_expansion(spec, l, h, f);
                            table.insert((root, children), CanonicalForm::Directed { h, f });
                        }
                    }
                }
                table
            })
            .collect()
    })
}

fn canon_letter(spec: &GroupSpec, l: usize, h: u32, f: u32) -> CanonicalForm {
    if f == 0 && spec.trivial_below(l, h) {
        CanonicalForm::Rooted(*spec.s_group(l).perm(spec.sigma(l, h)))
    } else {
        CanonicalForm::Directed { h: spec.norm_h(l, h), f }
    }
}

/// Coordinates of the word `s_0 (h, f) s_1` one level down.
fn leaf_children(spec: &GroupSpec, l: usize, s0: u32, h: u32, f: u32) -> Vec<CanonicalForm> {
    let cl = spec.class(l);
    let sn = spec.s_group(l + 1);
    let p = spec.s_group(l).perm(s0);
    (0..cl.d)
        .map(|t| {
            let u = p.apply(t);
            if u == 0 {
                canon_letter(spec, l + 1, h, f)
            } else if u <= cl.c {
                CanonicalForm::Rooted(*sn.perm(cl.rho[u - 1][h as usize]))
            } else {
                CanonicalForm::Rooted(Perm::identity(cl.d_next))
            }
        })
        .collect()
}

fn letter_expansion(spec: &GroupSpec, l: usize, h: u32, f: u32) -> (u32, Vec<CanonicalForm>) {
    (spec.sigma(l, h), leaf_children(spec, l, 0, h, f))
}

fn collapse(spec: &GroupSpec, l: usize, root: u32, children: Vec<CanonicalForm>) -> CanonicalForm {
    let perm = *spec.s_group(l).perm(root);
    if children.iter().all(CanonicalForm::is_identity) {
        return CanonicalForm::Rooted(perm);
    }
    let key = (root, children);
    if let Some(c) = letter_tables(spec)[spec.class_of(l)].get(&key) {
        return c.clone();
    }
    CanonicalForm::Node(perm, key.1)
}

fn canon_rec(spec: &GroupSpec, w: &AlternateWord, visited: &mut usize, budget: usize) -> Result<CanonicalForm> {
    *visited += 1;
    if *visited > budget {
        return Err(Error::StateBudget { budget });
    }
    let l = w.level;
    let sg = spec.s_group(l);
    match w.len() {
        0 => Ok(CanonicalForm::Rooted(*sg.perm(w.s[0]))),
        1 => {
            let (h, f) = spec.hf_split(w.k[0]);
            let root = sg.mul(sg.mul(w.s[0], spec.sigma(l, h)), w.s[1]);
            Ok(collapse(spec, l, root, leaf_children(spec, l, w.s[0], h, f)))
        }
        _ => {
            let (children, root) = rewrite_step(spec, w);
            let children = children
                .iter()
                .map(|c| canon_rec(spec, c, visited, budget))
                .collect::<Result<Vec<_>>>()?;
            Ok(collapse(spec, l, root, children))
        }
    }
}

/// Normal form deciding equality of group elements.
pub fn canonical_key(spec: &GroupSpec, w: &AlternateWord, budget: usize) -> Result<CanonicalForm> {
    let mut visited = 0;
    canon_rec(spec, w, &mut visited, budget)
}
