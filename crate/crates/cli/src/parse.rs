//! Length grids and word literals.

use anyhow::{anyhow, bail, Result};
use entropyforge_core::words::{AlternateWord, Letter};
use entropyforge_core::GroupSpec;

/// Parses a grid such as `16,64,256`, `1..8` or `2^7..2^16`, returned sorted
/// and without duplicates.
pub fn grid(text: &str) -> Result<Vec<usize>> {
    let mut out = Vec::new();
    for item in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        if let Some((a, b)) = item.split_once("..") {
            match (a.strip_prefix("2^"), b.strip_prefix("2^")) {
                (Some(x), Some(y)) => {
                    let (x, y): (u32, u32) = (x.parse()?, y.parse()?);
                    if y >= usize::BITS {
                        bail!("grid bound 2^{y} is too large");
                    }
                    out.extend((x..=y).map(|e| 1usize << e));
                }
                (None, None) => {
                    let (x, y): (usize, usize) = (a.parse()?, b.parse()?);
                    out.extend(x..=y);
                }
                _ => bail!("mixed range {item:?}: use either a..b or 2^a..2^b"),
            }
        } else if let Some(e) = item.strip_prefix("2^") {
            out.push(1usize << e.parse::<u32>()?);
        } else {
            out.push(item.parse().map_err(|_| anyhow!("bad grid entry {item:?}"))?);
        }
    }
    if out.is_empty() {
        bail!("empty grid {text:?}");
    }
    out.sort_unstable();
    out.dedup();
    Ok(out)
}

/// Parses the text form `s1 k(1,0) s0` at `level`; adjacent letters of the
/// same kind are multiplied and missing rooted letters are the identity.
pub fn word(spec: &GroupSpec, level: usize, text: &str) -> Result<AlternateWord> {
    let so = spec.s_group(level).order() as u32;
    let (ho, fo) = (spec.h_group().order() as u32, spec.f_order() as u32);
    let mut letters = Vec::new();
    for tok in text.split_whitespace() {
        if let Some(x) = tok.strip_prefix('s') {
            let x: u32 = x.parse().map_err(|_| anyhow!("bad rooted letter {tok:?}"))?;
            if x >= so {
                bail!("rooted letter {tok:?} out of range (order {so})");
            }
            letters.push(Letter::S(x));
        } else if let Some(body) = tok.strip_prefix("k(").and_then(|t| t.strip_suffix(')')) {
            let (h, f) = body.split_once(',').ok_or_else(|| anyhow!("bad HF letter {tok:?}"))?;
            let (h, f): (u32, u32) = (h.trim().parse()?, f.trim().parse()?);
            if h >= ho || f >= fo {
                bail!("HF letter {tok:?} out of range (|H| = {ho}, |F| = {fo})");
            }
            letters.push(Letter::K(spec.hf_join(h, f)));
        } else {
            bail!("unknown token {tok:?}; expected sN or k(h,f)");
        }
    }
    Ok(entropyforge_core::canonical_alternate(spec, level, &letters))
}

#[cfg(test)]
mod tests {
    use super::*;
    use entropyforge_core::{build_group, GroupConfig};

    #[test]
    fn grids() {
        assert_eq!(grid("3,1,2,2").unwrap(), [1, 2, 3]);
        assert_eq!(grid("2^3..2^5").unwrap(), [8, 16, 32]);
        assert_eq!(grid("0..3,10").unwrap(), [0, 1, 2, 3, 10]);
        assert!(grid("2^3..5").is_err());
        assert!(grid("").is_err());
    }

    #[test]
    fn words_round_trip() {
        let spec = build_group(&GroupConfig::dinfty(2)).unwrap();
        let w = word(&spec, 0, "s1 k(1,0) s0 k(1,1) s1").unwrap();
        assert_eq!(w.display(&spec), "s1 k(1,0) s0 k(1,1) s1");
        assert!(word(&spec, 0, "s2").is_err());
        assert!(word(&spec, 0, "x").is_err());
    }
}
