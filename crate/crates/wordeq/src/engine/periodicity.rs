//! Exponent of periodicity and p-stable normal forms.

use crate::error::{Error, Result};
use crate::words::{Alphabet, Sym, Word};

/// `exp(w)`: the largest `alpha` with `p^alpha` a factor of `w` for some
/// non-empty `p`.
pub fn exponent_of_periodicity(w: &[Sym]) -> usize {
    let n = w.len();
    if n == 0 {
        return 0;
    }
    let mut best = 1;
    for p in 1..=n / 2 {
        let mut run = 0;
        for j in 0..n - p {
            if w[j] == w[j + p] {
                run += 1;
                best = best.max((run + p) / p);
            } else {
                run = 0;
            }
        }
    }
    best
}

pub fn is_primitive(p: &[Sym]) -> bool {
    let n = p.len();
    if n == 0 {
        return false;
    }
    (1..n)
        .filter(|d| n.is_multiple_of(*d))
        .all(|d| (d..n).any(|i| p[i] != p[i - d]))
}

fn occurs(hay: &[Sym], needle: &[Sym]) -> bool {
    needle.is_empty() || hay.windows(needle.len()).any(|w| w == needle)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NfKind {
    /// `p'` is not a factor of `p^2`.
    First,
    /// `p = r s` with `r = r'`, `s = s'`; `r_len = |r|`.
    Second { r_len: usize },
}

/// `(u_0, alpha_1, u_1, ..., alpha_k, u_k)`. For the first kind a negative
/// exponent `-a` stands for `p'^a`; for the second kind `alpha` stands for
/// `p^alpha r`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PStableNF {
    pub kind: NfKind,
    pub words: Vec<Word>,
    pub exps: Vec<i64>,
}

impl PStableNF {
    pub fn reconstruct(&self, al: &Alphabet, p: &[Sym]) -> Word {
        let pbar = al.involute(p);
        let mut out = self.words[0].clone();
        for (i, &e) in self.exps.iter().enumerate() {
            let base: &[Sym] = if e < 0 { &pbar } else { p };
            for _ in 0..e.unsigned_abs() {
                out.extend_from_slice(base);
            }
            if let NfKind::Second { r_len } = self.kind {
                out.extend_from_slice(&p[..r_len]);
            }
            out.extend_from_slice(&self.words[i + 1]);
        }
        out
    }

    pub fn render(&self, al: &Alphabet) -> String {
        let mut parts = vec![al.render(&self.words[0])];
        for (i, e) in self.exps.iter().enumerate() {
            parts.push(e.to_string());
            parts.push(al.render(&self.words[i + 1]));
        }
        format!("({})", parts.join(", "))
    }
}

/// Maximal factors `period^alpha tail` with `alpha >= 2`, as
/// `(start, end, alpha)`, where `tail` is a prefix of `period`.
fn runs(w: &[Sym], period: &[Sym], tail: usize) -> Vec<(usize, usize, usize)> {
    let q = period.len();
    let mut out = Vec::new();
    let at = |i: usize| i + q <= w.len() && &w[i..i + q] == period;
    for s in 0..w.len() {
        if s >= q && at(s - q) {
            continue;
        }
        let mut alpha = 0;
        while at(s + alpha * q) {
            alpha += 1;
        }
        let fits = |a: usize| {
            s + a * q + tail <= w.len() && w[s + a * q..s + a * q + tail] == period[..tail]
        };
        while alpha >= 2 && !fits(alpha) {
            alpha -= 1;
        }
        if alpha >= 2 {
            out.push((s, s + alpha * q + tail, alpha));
        }
    }
    out
}

/// The p-stable normal form of `w`.
pub fn p_stable_normal_form(al: &Alphabet, w: &[Sym], p: &[Sym]) -> Result<PStableNF> {
    if !is_primitive(p) {
        return Err(Error::contract("p must be a non-empty primitive word"));
    }
    let q = p.len();
    let pbar = al.involute(p);
    let p2: Word = p.iter().chain(p.iter()).copied().collect();
    let (kind, found): (NfKind, Vec<(usize, usize, i64)>) = if !occurs(&p2, &pbar) {
        let mut rs: Vec<(usize, usize, i64)> = runs(w, p, 0)
            .into_iter()
            .map(|(s, e, a)| (s, e, a as i64 - 2))
            .collect();
        rs.extend(
            runs(w, &pbar, 0)
                .into_iter()
                .map(|(s, e, a)| (s, e, -(a as i64 - 2))),
        );
        rs.sort();
        (NfKind::First, rs)
    } else {
        let r_len = (0..q)
            .find(|&i| {
                let (r, s) = p.split_at(i);
                al.involute(r) == r && al.involute(s) == s
            })
            .ok_or_else(|| Error::contract("no split p = r s with r and s self-involutive"))?;
        let rs = runs(w, p, r_len)
            .into_iter()
            .map(|(s, e, a)| (s, e, a as i64 - 2))
            .collect();
        (NfKind::Second { r_len }, rs)
    };
    if found.is_empty() {
        return Ok(PStableNF {
            kind,
            words: vec![w.to_vec()],
            exps: vec![],
        });
    }
    let mut words = Vec::new();
    let mut exps = Vec::new();
    let mut from = 0;
    for &(s, e, x) in &found {
        words.push(w[from..s + q].to_vec());
        exps.push(x);
        from = e - q;
    }
    words.push(w[from..].to_vec());
    Ok(PStableNF { kind, words, exps })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponents() {
        let al = Alphabet::constants_from(&["a", "b"], &[]).unwrap();
        assert_eq!(exponent_of_periodicity(&[]), 0);
        assert_eq!(exponent_of_periodicity(&al.parse_word("aa").unwrap()), 2);
        assert_eq!(exponent_of_periodicity(&al.parse_word("ab").unwrap()), 1);
        assert_eq!(
            exponent_of_periodicity(&al.parse_word("abaabaabab").unwrap()),
            3
        );
    }

    #[test]
    fn primitivity() {
        let al = Alphabet::constants_from(&["a", "b"], &[]).unwrap();
        assert!(is_primitive(&al.parse_word("aab").unwrap()));
        assert!(!is_primitive(&al.parse_word("abab").unwrap()));
        assert!(p_stable_normal_form(&al, &[], &al.parse_word("abab").unwrap()).is_err());
    }

    #[test]
    fn no_square_gives_k_zero() {
        let al = Alphabet::constants_from(&["a", "b"], &[]).unwrap();
        let w = al.parse_word("abba").unwrap();
        let nf = p_stable_normal_form(&al, &w, &al.parse_word("ab").unwrap()).unwrap();
        assert!(nf.exps.is_empty());
        assert_eq!(nf.reconstruct(&al, &al.parse_word("ab").unwrap()), w);
    }
}
