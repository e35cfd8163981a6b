//! Brute-force reference evaluation on a truncated tree.
//!
//! Every letter is turned into a permutation of the vertices at a fixed
//! depth by direct automaton evaluation, and words are composed letter by
//! letter. Boundary labels are read with [`act_ray`] at the points where the
//! word's prefixes meet the distinguished ray. Nothing here goes through the
//! rewriting process.

use std::collections::BTreeMap;

use rand::Rng;

use crate::group_model::{act_ray, act_vertex, GroupSpec, Ray};
use crate::words::{canonical_alternate, AlternateWord, Letter};

/// Depth at which the truncated action of words of length `<= n` (and their
/// pairwise quotients) separates distinct elements.
pub fn oracle_depth(spec: &GroupSpec, n: usize) -> usize {
    let log = if n <= 1 { 0 } else { (usize::BITS - (n - 1).leading_zeros()) as usize };
    log + 2 + spec.num_classes()
}

/// Complete invariant of an element: action on the truncated tree plus the
/// non-trivial boundary labels.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Signature {
    pub action: Vec<u32>,
    pub labels: Vec<(Ray, u32)>,
}

pub struct BruteForce<'a> {
    spec: &'a GroupSpec,
    level: usize,
    depth: usize,
    radix: Vec<usize>,
    s_actions: Vec<Vec<u32>>,
    k_actions: Vec<Vec<u32>>,
}

impl<'a> BruteForce<'a> {
    pub fn new(spec: &'a GroupSpec, level: usize, depth: usize) -> Self {
        let radix: Vec<usize> = (0..depth).map(|i| spec.d(level + i)).collect();
        let count: usize = radix.iter().product();
        let mut me = BruteForce { spec, level, depth, radix, s_actions: Vec::new(), k_actions: Vec::new() };
        let letter_action = |me: &BruteForce, l: Letter| -> Vec<u32> {
            let w = canonical_alternate(spec, level, &[l]);
            (0..count)
                .map(|i| me.index_of(&act_vertex(spec, &w, &me.vertex_of(i)).unwrap()) as u32)
                .collect()
        };
        me.s_actions = (0..spec.s_group(level).order() as u32)
            .map(|x| letter_action(&me, Letter::S(x)))
            .collect();
        me.k_actions = (0..spec.h_group().order() as u32)
            .map(|h| letter_action(&me, Letter::K(spec.hf_join(h, 0))))
            .collect();
        me
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn vertex_count(&self) -> usize {
        self.radix.iter().product()
    }

    pub fn vertex_of(&self, mut i: usize) -> Vec<u8> {
        let mut v = vec![0u8; self.depth];
        for j in (0..self.depth).rev() {
            v[j] = (i % self.radix[j]) as u8;
            i /= self.radix[j];
        }
        v
    }

    pub fn index_of(&self, v: &[u8]) -> usize {
        v.iter().zip(&self.radix).fold(0, |acc, (&x, &r)| acc * r + x as usize)
    }

    /// Image of every depth-`depth` vertex under `w`.
    pub fn action(&self, w: &AlternateWord) -> Vec<u32> {
        let mut img: Vec<u32> = (0..self.vertex_count() as u32).collect();
        let apply = |img: &mut Vec<u32>, a: &[u32]| {
            for x in img.iter_mut() {
                *x = a[*x as usize];
            }
        };
        for j in 0..w.len() {
            apply(&mut img, &self.s_actions[w.s[j] as usize]);
            apply(&mut img, &self.k_actions[self.spec.hf_split(w.k[j]).0 as usize]);
        }
        apply(&mut img, &self.s_actions[w.s[w.len()] as usize]);
        img
    }

    /// Non-trivial boundary labels of `w`, read at every point where a prefix
    /// of `w` meets the distinguished ray.
    pub fn labels(&self, w: &AlternateWord) -> Vec<(Ray, u32)> {
        let spec = self.spec;
        let mut out = BTreeMap::new();
        let mut prefix: Vec<Letter> = Vec::new();
        for j in 0..w.len() {
            prefix.push(Letter::S(w.s[j]));
            let p = canonical_alternate(spec, self.level, &prefix);
            let x = act_ray(spec, &p.inverse(spec), &Ray::distinguished()).unwrap().0;
            if !out.contains_key(&x) {
                let f = act_ray(spec, w, &x).unwrap().1;
                out.insert(x, f);
            }
            prefix.push(Letter::K(w.k[j]));
        }
        out.into_iter().filter(|&(_, f)| f != 0).collect()
    }

    pub fn signature(&self, w: &AlternateWord) -> Signature {
        Signature { action: self.action(w), labels: self.labels(w) }
    }

    pub fn is_trivial(&self, w: &AlternateWord) -> bool {
        self.action(w).iter().enumerate().all(|(i, &x)| i as u32 == x) && self.labels(w).is_empty()
    }
}

/// Uniformly random alternate word of length `n` at `level`.
pub fn random_word<R: Rng>(spec: &GroupSpec, level: usize, n: usize, rng: &mut R) -> AlternateWord {
    let so = spec.s_group(level).order() as u32;
    let ko = spec.hf_order() as u32;
    let s = (0..=n).map(|_| rng.random_range(0..so)).collect();
    let k = (0..n).map(|_| spec.hf_norm(level, rng.random_range(0..ko))).collect();
    AlternateWord { level, s, k }
}

/// Every alternate word of length `n` at `level`, over normalized letters.
pub fn all_words(spec: &GroupSpec, level: usize, n: usize) -> Vec<AlternateWord> {
    let so = spec.s_group(level).order() as u32;
    let ks: Vec<u32> = spec
        .h_classes(level)
        .into_iter()
        .flat_map(|h| (0..spec.f_order() as u32).map(move |f| (h, f)))
        .map(|(h, f)| spec.hf_join(h, f))
        .collect();
    let mut out = vec![AlternateWord::identity(level)];
    out[0].s.clear();
    for j in 0..=n {
        let mut next = Vec::new();
        for w in &out {
            for x in 0..so {
                let mut a = w.clone();
                a.s.push(x);
                if j < n {
                    for &y in &ks {
                        let mut b = a.clone();
                        b.k.push(y);
                        next.push(b);
                    }
                } else {
                    next.push(a);
                }
            }
        }
        out = next;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group_model::{build_group, GroupConfig};
    use crate::words::{is_trivial, DEFAULT_STATE_BUDGET};

    #[test]
    fn enumerates_all_short_words() {
        let spec = build_group(&GroupConfig::dinfty(2)).unwrap();
        assert_eq!(all_words(&spec, 0, 0).len(), 2);
        assert_eq!(all_words(&spec, 0, 2).len(), 8 * 16);
    }

    #[test]
    fn oracle_agrees_on_inverse_products() {
        let spec = build_group(&GroupConfig::pattern(&[2, 3], 2)).unwrap();
        let bf = BruteForce::new(&spec, 0, oracle_depth(&spec, 8));
        let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(7);
        for n in 0..5 {
            let w = random_word(&spec, 0, n, &mut rng);
            let e = w.concat(&spec, &w.inverse(&spec));
            assert!(bf.is_trivial(&e));
            assert!(is_trivial(&spec, &e, DEFAULT_STATE_BUDGET).unwrap());
        }
    }
}
