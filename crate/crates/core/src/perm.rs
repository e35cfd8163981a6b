//! Small permutations and enumerated finite groups.
//!
//! Permutations compose left to right: `a.then(&b)` first applies `a`, then `b`.
//! This matches the right-action convention used for tree automorphisms, where
//! the product `gf` acts as `x -> f(g(x))`.

use std::collections::HashMap;
use std::fmt;

use crate::error::{Error, Result};

/// Largest permutation degree supported by [`Perm`].
pub const MAX_DEGREE: usize = 24;

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Perm {
    len: u8,
    img: [u8; MAX_DEGREE],
}

impl Perm {
    pub fn identity(degree: usize) -> Self {
        assert!(degree <= MAX_DEGREE, "degree {degree} exceeds {MAX_DEGREE}");
        let mut img = [0u8; MAX_DEGREE];
        for (i, x) in img.iter_mut().enumerate().take(degree) {
            *x = i as u8;
        }
        Perm { len: degree as u8, img }
    }

    /// Builds a permutation from its image list, validating bijectivity.
    pub fn from_images(images: &[usize]) -> Result<Self> {
        let degree = images.len();
        if degree > MAX_DEGREE {
            return Err(Error::InvalidPermutation(format!(
                "degree {degree} exceeds {MAX_DEGREE}"
            )));
        }
        let mut seen = [false; MAX_DEGREE];
        let mut img = [0u8; MAX_DEGREE];
        for (i, &x) in images.iter().enumerate() {
            if x >= degree || seen[x] {
                return Err(Error::InvalidPermutation(format!("{images:?} is not a bijection")));
            }
            seen[x] = true;
            img[i] = x as u8;
        }
        Ok(Perm { len: degree as u8, img })
    }

    /// Transposition of `a` and `b`.
    pub fn swap(degree: usize, a: usize, b: usize) -> Self {
        let mut p = Perm::identity(degree);
        p.img.swap(a, b);
        p
    }

    /// The rotation `i -> i + 1 mod degree`.
    pub fn cycle(degree: usize) -> Self {
        let mut p = Perm::identity(degree);
        for i in 0..degree {
            p.img[i] = ((i + 1) % degree) as u8;
        }
        p
    }

    #[inline]
    pub fn degree(&self) -> usize {
        self.len as usize
    }

    #[inline]
    pub fn apply(&self, x: usize) -> usize {
        self.img[x] as usize
    }

    pub fn images(&self) -> &[u8] {
        &self.img[..self.len as usize]
    }

    /// Apply `self`, then `other`.
    #[inline]
    pub fn then(&self, other: &Perm) -> Perm {
        debug_assert_eq!(self.len, other.len);
        let mut img = [0u8; MAX_DEGREE];
        for i in 0..self.len as usize {
            img[i] = other.img[self.img[i] as usize];
        }
        Perm { len: self.len, img }
    }

    pub fn inverse(&self) -> Perm {
        let mut img = [0u8; MAX_DEGREE];
        for i in 0..self.len as usize {
            img[self.img[i] as usize] = i as u8;
        }
        Perm { len: self.len, img }
    }

    pub fn is_identity(&self) -> bool {
        self.images().iter().enumerate().all(|(i, &x)| i == x as usize)
    }
}

impl fmt::Debug for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.images())
    }
}

/// All permutations of `0..degree` in lexicographic order of their image lists.
pub fn all_perms(degree: usize) -> Vec<Perm> {
    fn rec(prefix: &mut Vec<usize>, used: &mut Vec<bool>, out: &mut Vec<Perm>) {
        let n = used.len();
        if prefix.len() == n {
            out.push(Perm::from_images(prefix).expect("valid by construction"));
            return;
        }
        for x in 0..n {
            if !used[x] {
                used[x] = true;
                prefix.push(x);
                rec(prefix, used, out);
                prefix.pop();
                used[x] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; degree], &mut out);
    out
}

/// Element of a finite group: a tuple of permutations, one per factor.
pub type Tuple = Vec<Perm>;

const TABLE_LIMIT: usize = 2048;

/// A finite group with its elements enumerated and indexed.
///
/// Index 0 is always the identity. Multiplication uses a precomputed table for
/// small groups and composes tuples otherwise.
#[derive(Clone)]
pub struct FiniteGroup {
    degrees: Vec<usize>,
    elements: Vec<Tuple>,
    index: HashMap<Tuple, u32>,
    table: Option<Vec<u32>>,
    inverses: Vec<u32>,
}

impl fmt::Debug for FiniteGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FiniteGroup")
            .field("degrees", &self.degrees)
            .field("order", &self.order())
            .finish()
    }
}

impl FiniteGroup {
    /// Closure of `generators` under composition. Each generator is a tuple
    /// whose entries have the given `degrees`.
    pub fn generated(degrees: &[usize], generators: &[Tuple], max_order: usize) -> Result<Self> {
        for g in generators {
            if g.len() != degrees.len() || g.iter().zip(degrees).any(|(p, &d)| p.degree() != d) {
                return Err(Error::InvalidGroup(format!(
                    "generator {g:?} does not match factor degrees {degrees:?}"
                )));
            }
        }
        let identity: Tuple = degrees.iter().map(|&d| Perm::identity(d)).collect();
        let mut elements = vec![identity.clone()];
        let mut index = HashMap::from([(identity, 0u32)]);
        let mut frontier = 0;
        while frontier < elements.len() {
            let x = elements[frontier].clone();
            frontier += 1;
            for g in generators {
                let y = compose(&x, g);
                if !index.contains_key(&y) {
                    if elements.len() >= max_order {
                        return Err(Error::InvalidGroup(format!(
                            "group order exceeds the limit {max_order}"
                        )));
                    }
                    index.insert(y.clone(), elements.len() as u32);
                    elements.push(y);
                }
            }
        }
        Ok(Self::finish(degrees.to_vec(), elements, index))
    }

    /// The full symmetric group on `degree` points.
    pub fn symmetric(degree: usize) -> Self {
        let mut elements: Vec<Tuple> = all_perms(degree).into_iter().map(|p| vec![p]).collect();
        // identity first
        let id = elements.iter().position(|t| t[0].is_identity()).unwrap();
        elements.swap(0, id);
        let index = elements.iter().enumerate().map(|(i, t)| (t.clone(), i as u32)).collect();
        Self::finish(vec![degree], elements, index)
    }

    /// Cyclic group of rotations of `degree` points.
    pub fn cyclic(degree: usize) -> Self {
        let c = Perm::cycle(degree);
        let mut elements = vec![vec![Perm::identity(degree)]];
        let mut x = Perm::identity(degree);
        for _ in 1..degree {
            x = x.then(&c);
            elements.push(vec![x]);
        }
        let index = elements.iter().enumerate().map(|(i, t)| (t.clone(), i as u32)).collect();
        Self::finish(vec![degree], elements, index)
    }

    /// Direct product of symmetric groups, one factor per entry of `degrees`.
    pub fn symmetric_product(degrees: &[usize]) -> Self {
        let mut elements: Vec<Tuple> = vec![Vec::new()];
        for &d in degrees {
            let perms = all_perms(d);
            let mut next = Vec::with_capacity(elements.len() * perms.len());
            for e in &elements {
                for p in &perms {
                    let mut t = e.clone();
                    t.push(*p);
                    next.push(t);
                }
            }
            elements = next;
        }
        let id = elements.iter().position(|t| t.iter().all(Perm::is_identity)).unwrap();
        elements.swap(0, id);
        let index = elements.iter().enumerate().map(|(i, t)| (t.clone(), i as u32)).collect();
        Self::finish(degrees.to_vec(), elements, index)
    }

    fn finish(degrees: Vec<usize>, elements: Vec<Tuple>, index: HashMap<Tuple, u32>) -> Self {
        let n = elements.len();
        let lookup = |t: &Tuple| index[t];
        let inverses = elements
            .iter()
            .map(|t| lookup(&t.iter().map(Perm::inverse).collect()))
            .collect();
        let table = (n <= TABLE_LIMIT).then(|| {
            let mut table = Vec::with_capacity(n * n);
            for a in &elements {
                for b in &elements {
                    table.push(lookup(&compose(a, b)));
                }
            }
            table
        });
        FiniteGroup { degrees, elements, index, table, inverses }
    }

    #[inline]
    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn degrees(&self) -> &[usize] {
        &self.degrees
    }

    #[inline]
    pub fn mul(&self, a: u32, b: u32) -> u32 {
        match &self.table {
            Some(t) => t[a as usize * self.elements.len() + b as usize],
            None => self.index[&compose(&self.elements[a as usize], &self.elements[b as usize])],
        }
    }

    #[inline]
    pub fn inv(&self, a: u32) -> u32 {
        self.inverses[a as usize]
    }

    pub fn element(&self, a: u32) -> &Tuple {
        &self.elements[a as usize]
    }

    /// First factor of element `a`; the whole element for single-factor groups.
    #[inline]
    pub fn perm(&self, a: u32) -> &Perm {
        &self.elements[a as usize][0]
    }

    pub fn index_of(&self, t: &Tuple) -> Option<u32> {
        self.index.get(t).copied()
    }

    pub fn index_of_perm(&self, p: &Perm) -> Option<u32> {
        self.index.get(&vec![*p]).copied()
    }

    pub fn is_abelian(&self) -> bool {
        let n = self.order() as u32;
        (0..n).all(|a| (0..n).all(|b| self.mul(a, b) == self.mul(b, a)))
    }

    pub fn is_transitive(&self) -> bool {
        if self.degrees.len() != 1 {
            return false;
        }
        let d = self.degrees[0];
        let mut reached = vec![false; d];
        for e in &self.elements {
            reached[e[0].apply(0)] = true;
        }
        reached.into_iter().all(|r| r)
    }
}

fn compose(a: &Tuple, b: &Tuple) -> Tuple {
    a.iter().zip(b).map(|(x, y)| x.then(y)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn composition_is_left_to_right() {
        let a = Perm::from_images(&[1, 0, 2]).unwrap();
        let b = Perm::from_images(&[0, 2, 1]).unwrap();
        // 0 -a-> 1 -b-> 2
        assert_eq!(a.then(&b).apply(0), 2);
        assert_eq!(b.then(&a).apply(0), 1);
    }

    #[test]
    fn rejects_non_bijections() {
        assert!(Perm::from_images(&[0, 0]).is_err());
        assert!(Perm::from_images(&[0, 2]).is_err());
    }

    #[test]
    fn symmetric_group_orders_and_tables() {
        for d in 1..=5 {
            let g = FiniteGroup::symmetric(d);
            assert_eq!(g.order(), (1..=d).product::<usize>());
            assert!(g.perm(0).is_identity());
            for a in 0..g.order() as u32 {
                assert_eq!(g.mul(a, g.inv(a)), 0);
            }
        }
        assert!(!FiniteGroup::symmetric(3).is_abelian());
        assert!(FiniteGroup::cyclic(5).is_abelian());
    }

    #[test]
    fn generated_group_matches_product() {
        let s3 = all_perms(3);
        let gens: Vec<Tuple> = vec![
            vec![Perm::swap(2, 0, 1), Perm::identity(3)],
            vec![Perm::identity(2), s3[1]],
            vec![Perm::identity(2), Perm::cycle(3)],
        ];
        let g = FiniteGroup::generated(&[2, 3], &gens, 1000).unwrap();
        assert_eq!(g.order(), 12);
        assert_eq!(FiniteGroup::symmetric_product(&[2, 3]).order(), 12);
    }

    #[test]
    fn large_group_without_table() {
        let g = FiniteGroup::symmetric(7);
        assert_eq!(g.order(), 5040);
        let a = 17;
        assert_eq!(g.mul(a, g.inv(a)), 0);
    }
}
