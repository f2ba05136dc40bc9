//! Critical words and the ℓ-factorization of a word into blocks.

use std::collections::BTreeSet;

use crate::words::{Alphabet, Sym, Word};

/// `C_ℓ`: the length `2ℓ` factors of `w0` centered at cuts `γ` with
/// `ℓ <= γ <= m0 - ℓ`, closed under involution.
pub fn critical_words(
    al: &Alphabet,
    w0: &[Sym],
    ell: usize,
    cuts: &BTreeSet<usize>,
) -> BTreeSet<Word> {
    let m0 = w0.len();
    let mut out = BTreeSet::new();
    if ell == 0 || 2 * ell > m0 {
        return out;
    }
    for &g in cuts.range(ell..=m0 - ell) {
        let f = w0[g - ell..g + ell].to_vec();
        out.insert(al.involute(&f));
        out.insert(f);
    }
    out
}

/// `(u, w, v)` with `|u|, |v|` either `ℓ` or zero.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Block {
    pub u: Word,
    pub w: Word,
    pub v: Word,
}

impl Block {
    pub fn involute(&self, al: &Alphabet) -> Block {
        Block {
            u: al.involute(&self.v),
            w: al.involute(&self.w),
            v: al.involute(&self.u),
        }
    }

    pub fn render(&self, al: &Alphabet) -> String {
        format!(
            "({}, {}, {})",
            al.render(&self.u),
            al.render(&self.w),
            al.render(&self.v)
        )
    }
}

/// `F_ℓ(w)` with the split points `0 = s_0 < ... < s_k = |w|`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LFactorization {
    pub ell: usize,
    pub blocks: Vec<Block>,
    pub bounds: Vec<usize>,
}

impl LFactorization {
    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn render(&self, al: &Alphabet) -> String {
        self.blocks
            .iter()
            .map(|b| b.render(al))
            .collect::<Vec<_>>()
            .join("")
    }

    /// Indices `[p, q]` of the minimal block cover of the positions
    /// `[from, to]`, `from < to`.
    pub fn cover(&self, from: usize, to: usize) -> (usize, usize) {
        let p = self.bounds.partition_point(|&b| b <= from) - 1;
        let q = self.bounds.partition_point(|&b| b < to) - 1;
        (p, q)
    }

    /// Block indices `i` whose split points are exactly `[from, to]`, if
    /// both are split points.
    pub fn exact(&self, from: usize, to: usize) -> Option<(usize, usize)> {
        let p = self.bounds.binary_search(&from).ok()?;
        let q = self.bounds.binary_search(&to).ok()?;
        (p < q).then_some((p, q - 1))
    }
}

/// Split `w` at every `γ` in `[ℓ, |w| - ℓ]` where `w[γ-ℓ, γ+ℓ]` is
/// critical.
pub fn l_factorize(w: &[Sym], ell: usize, crit: &BTreeSet<Word>) -> LFactorization {
    let n = w.len();
    let mut bounds = vec![0];
    if ell >= 1 && n >= 2 * ell {
        for g in ell..=n - ell {
            if g > 0 && g < n && crit.contains(&w[g - ell..g + ell]) {
                bounds.push(g);
            }
        }
    }
    bounds.push(n);
    let k = bounds.len() - 1;
    let blocks = (0..k)
        .map(|i| Block {
            u: if i == 0 {
                Vec::new()
            } else {
                w[bounds[i] - ell..bounds[i]].to_vec()
            },
            w: w[bounds[i]..bounds[i + 1]].to_vec(),
            v: if i + 1 == k {
                Vec::new()
            } else {
                w[bounds[i + 1]..bounds[i + 1] + ell].to_vec()
            },
        })
        .collect();
    LFactorization {
        ell,
        blocks,
        bounds,
    }
}

/// `(Head, body, Tail)`. For a single block the body is empty and head
/// and tail coincide.
pub fn head_body_tail(lf: &LFactorization) -> (Block, Vec<Block>, Block) {
    let k = lf.blocks.len();
    let head = lf.blocks[0].clone();
    let tail = lf.blocks[k - 1].clone();
    let body = if k >= 2 {
        lf.blocks[1..k - 1].to_vec()
    } else {
        Vec::new()
    };
    (head, body, tail)
}
