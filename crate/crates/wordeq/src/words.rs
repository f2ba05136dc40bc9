//! Involutive alphabets, words, free reduction and intervals.
//!
//! Letters are small integer ids into an [`Alphabet`]. The alphabet stores
//! the bar permutation and a constant/variable tag per letter. Textual
//! names are explicit; by convention the bar of `a` is named `a'`.

use std::collections::HashMap;
use std::fmt;

use crate::error::{Error, Result};

pub type Sym = u32;
pub type Word = Vec<Sym>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Kind {
    Constant,
    Variable,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Alphabet {
    names: Vec<String>,
    bar: Vec<Sym>,
    kind: Vec<Kind>,
    index: HashMap<String, Sym>,
}

fn check_name(name: &str) -> Result<()> {
    if name.is_empty()
        || name == "1"
        || name
            .chars()
            .any(|c| c.is_whitespace() || matches!(c, '(' | ')' | '^' | ';' | '#'))
    {
        return Err(Error::contract(format!("invalid letter name {name:?}")));
    }
    Ok(())
}

impl Alphabet {
    pub fn new() -> Self {
        Self::default()
    }

    /// Alphabet of constants: one pair `a, a'` per entry of `pairs` and one
    /// involution fixed point per entry of `fixed`.
    pub fn constants_from(pairs: &[&str], fixed: &[&str]) -> Result<Self> {
        let mut a = Self::new();
        for p in pairs {
            a.add_pair(p, Kind::Constant)?;
        }
        for f in fixed {
            a.add_fixed(f)?;
        }
        Ok(a)
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    /// Add `name` and its partner `name'`; returns the id of `name`.
    pub fn add_pair(&mut self, name: &str, kind: Kind) -> Result<Sym> {
        if name.ends_with('\'') {
            return Err(Error::contract(format!(
                "letter {name:?} must not end with an apostrophe"
            )));
        }
        self.add_pair_named(name, &format!("{name}'"), kind)
    }

    pub fn add_pair_named(&mut self, name: &str, bar_name: &str, kind: Kind) -> Result<Sym> {
        check_name(name)?;
        check_name(bar_name)?;
        if name == bar_name {
            return Err(Error::contract("a pair needs two distinct names"));
        }
        for n in [name, bar_name] {
            if self.index.contains_key(n) {
                return Err(Error::contract(format!("duplicate letter {n:?}")));
            }
        }
        let id = self.names.len() as Sym;
        self.push(name, id + 1, kind);
        self.push(bar_name, id, kind);
        Ok(id)
    }

    /// Add a constant with `bar(a) = a`.
    pub fn add_fixed(&mut self, name: &str) -> Result<Sym> {
        check_name(name)?;
        if self.index.contains_key(name) {
            return Err(Error::contract(format!("duplicate letter {name:?}")));
        }
        let id = self.names.len() as Sym;
        self.push(name, id, Kind::Constant);
        Ok(id)
    }

    fn push(&mut self, name: &str, bar: Sym, kind: Kind) {
        let id = self.names.len() as Sym;
        self.names.push(name.to_string());
        self.bar.push(bar);
        self.kind.push(kind);
        self.index.insert(name.to_string(), id);
    }

    /// Return the existing letter called `name`, or add the pair.
    pub fn intern_pair(&mut self, name: &str, bar_name: &str, kind: Kind) -> Result<Sym> {
        if let Some(s) = self.lookup(name) {
            return Ok(s);
        }
        if name == bar_name {
            if kind == Kind::Variable {
                return Err(Error::contract(
                    "variables cannot be involution fixed points",
                ));
            }
            return self.add_fixed(name);
        }
        self.add_pair_named(name, bar_name, kind)
    }

    /// Allocate a fresh pair whose name starts with `prefix`.
    pub fn fresh_pair(&mut self, prefix: &str, kind: Kind) -> Sym {
        let mut k = self.names.len();
        loop {
            let name = format!("{prefix}{k}");
            let bar = format!("{name}'");
            if !self.index.contains_key(&name) && !self.index.contains_key(&bar) {
                return self
                    .add_pair_named(&name, &bar, kind)
                    .expect("fresh names are valid");
            }
            k += 1;
        }
    }

    pub fn bar(&self, s: Sym) -> Sym {
        self.bar[s as usize]
    }

    pub fn kind(&self, s: Sym) -> Kind {
        self.kind[s as usize]
    }

    pub fn is_var(&self, s: Sym) -> bool {
        self.kind[s as usize] == Kind::Variable
    }

    pub fn is_const(&self, s: Sym) -> bool {
        self.kind[s as usize] == Kind::Constant
    }

    pub fn is_fixed(&self, s: Sym) -> bool {
        self.bar[s as usize] == s
    }

    pub fn name(&self, s: Sym) -> &str {
        &self.names[s as usize]
    }

    pub fn lookup(&self, name: &str) -> Option<Sym> {
        self.index.get(name).copied()
    }

    pub fn contains(&self, s: Sym) -> bool {
        (s as usize) < self.names.len()
    }

    pub fn symbols(&self) -> impl Iterator<Item = Sym> + '_ {
        0..self.names.len() as Sym
    }

    pub fn constants(&self) -> Vec<Sym> {
        self.symbols().filter(|&s| self.is_const(s)).collect()
    }

    pub fn variables(&self) -> Vec<Sym> {
        self.symbols().filter(|&s| self.is_var(s)).collect()
    }

    /// True when every letter of `self` has the same id, name, bar and kind
    /// in `other`.
    pub fn is_prefix_of(&self, other: &Alphabet) -> bool {
        self.len() <= other.len()
            && (0..self.len()).all(|i| {
                self.names[i] == other.names[i]
                    && self.bar[i] == other.bar[i]
                    && self.kind[i] == other.kind[i]
            })
    }

    /// Reverse the word and bar every letter.
    pub fn involute(&self, w: &[Sym]) -> Word {
        w.iter().rev().map(|&s| self.bar(s)).collect()
    }

    /// Normal form under `a a' -> 1`.
    pub fn free_reduce(&self, w: &[Sym]) -> Word {
        let mut out: Word = Vec::with_capacity(w.len());
        for &s in w {
            match out.last() {
                Some(&t) if self.bar(t) == s => {
                    out.pop();
                }
                _ => out.push(s),
            }
        }
        out
    }

    pub fn is_reduced(&self, w: &[Sym]) -> bool {
        w.windows(2).all(|p| self.bar(p[0]) != p[1])
    }

    /// Space separated names; the empty word renders as `1`.
    pub fn render(&self, w: &[Sym]) -> String {
        if w.is_empty() {
            return "1".to_string();
        }
        let parts: Vec<&str> = w.iter().map(|&s| self.name(s)).collect();
        parts.join(" ")
    }

    /// Parse whitespace separated tokens. A token that is not a letter
    /// name is split greedily into the longest known names, so `ab'c`
    /// reads as `a b' c` when those letters exist. `1` is the empty word.
    pub fn parse_word(&self, text: &str) -> Result<Word> {
        let mut out = Vec::new();
        for tok in text.split_whitespace() {
            if tok == "1" {
                continue;
            }
            if let Some(s) = self.lookup(tok) {
                out.push(s);
                continue;
            }
            let mut rest = tok;
            while !rest.is_empty() {
                let mut found = None;
                for end in (1..=rest.len()).rev() {
                    if !rest.is_char_boundary(end) {
                        continue;
                    }
                    if let Some(s) = self.lookup(&rest[..end]) {
                        found = Some((s, end));
                        break;
                    }
                }
                match found {
                    Some((s, end)) => {
                        out.push(s);
                        rest = &rest[end..];
                    }
                    None => return Err(Error::parse(0, format!("unknown letter in {tok:?}"))),
                }
            }
        }
        Ok(out)
    }

    pub fn display<'a>(&'a self, w: &'a [Sym]) -> DisplayWord<'a> {
        DisplayWord {
            alphabet: self,
            word: w,
        }
    }
}

pub struct DisplayWord<'a> {
    alphabet: &'a Alphabet,
    word: &'a [Sym],
}

impl fmt::Display for DisplayWord<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.alphabet.render(self.word))
    }
}

/// An interval `[from, to]` of positions in a host word. `from > to` denotes
/// the involuted factor.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Interval {
    pub from: usize,
    pub to: usize,
}

impl Interval {
    pub fn new(from: usize, to: usize) -> Self {
        Interval { from, to }
    }

    pub fn bar(self) -> Self {
        Interval {
            from: self.to,
            to: self.from,
        }
    }

    pub fn lo(self) -> usize {
        self.from.min(self.to)
    }

    pub fn hi(self) -> usize {
        self.from.max(self.to)
    }

    pub fn len(self) -> usize {
        self.hi() - self.lo()
    }

    pub fn is_empty(self) -> bool {
        self.from == self.to
    }

    pub fn is_positive(self) -> bool {
        self.from < self.to
    }

    /// Some position strictly inside.
    pub fn contains_strictly(self, p: usize) -> bool {
        self.lo() < p && p < self.hi()
    }
}

/// `w[from, to]`: the factor for `from < to`, the involuted factor for
/// `to < from`, the empty word when equal.
pub fn factor(alphabet: &Alphabet, w: &[Sym], iv: Interval) -> Result<Word> {
    if iv.hi() > w.len() {
        return Err(Error::OutOfRange(format!(
            "interval [{}, {}] in a word of length {}",
            iv.from,
            iv.to,
            w.len()
        )));
    }
    let slice = &w[iv.lo()..iv.hi()];
    Ok(if iv.from <= iv.to {
        slice.to_vec()
    } else {
        alphabet.involute(slice)
    })
}
