//! Exponential expressions: words built from literals, concatenation and
//! integer powers, with cached size and length.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::sync::Arc;

use crate::constraints::{ConstraintHom, MonElem};
use crate::error::{Error, Result};
use crate::words::{Alphabet, Sym, Word};

/// Default expansion cap in letters.
pub const DEFAULT_EXPANSION_CAP: u64 = 1 << 20;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
enum Node {
    Lit(Word),
    Cat(ExpExpr, ExpExpr),
    Pow(ExpExpr, u64),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
struct Inner {
    node: Node,
    size: u64,
    len: u64,
}

/// Immutable, cheaply clonable expression tree. Lengths saturate at
/// `u64::MAX`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ExpExpr(Arc<Inner>);

/// Borrowed view of the top node.
pub enum View<'a> {
    Lit(&'a [Sym]),
    Cat(&'a ExpExpr, &'a ExpExpr),
    Pow(&'a ExpExpr, u64),
}

/// `max{1, ceil(log2 k)}`.
pub fn log_size(k: u64) -> u64 {
    if k <= 2 {
        1
    } else {
        64 - (k - 1).leading_zeros() as u64
    }
}

impl ExpExpr {
    pub fn lit(w: Word) -> Self {
        let n = w.len() as u64;
        ExpExpr(Arc::new(Inner {
            node: Node::Lit(w),
            size: n,
            len: n,
        }))
    }

    pub fn empty() -> Self {
        Self::lit(Vec::new())
    }

    pub fn cat(l: ExpExpr, r: ExpExpr) -> Self {
        let size = l.size().saturating_add(r.size());
        let len = l.len().saturating_add(r.len());
        ExpExpr(Arc::new(Inner {
            node: Node::Cat(l, r),
            size,
            len,
        }))
    }

    pub fn pow(base: ExpExpr, k: u64) -> Self {
        let size = log_size(k).saturating_add(base.size());
        let len = base.len().saturating_mul(k);
        ExpExpr(Arc::new(Inner {
            node: Node::Pow(base, k),
            size,
            len,
        }))
    }

    /// Left-nested concatenation; empty parts are dropped and adjacent
    /// literals merged.
    pub fn concat_all<I: IntoIterator<Item = ExpExpr>>(parts: I) -> Self {
        let mut acc: Option<ExpExpr> = None;
        let mut pending: Word = Vec::new();
        let flush = |acc: &mut Option<ExpExpr>, pending: &mut Word| {
            if !pending.is_empty() {
                let l = ExpExpr::lit(std::mem::take(pending));
                *acc = Some(match acc.take() {
                    Some(a) => ExpExpr::cat(a, l),
                    None => l,
                });
            }
        };
        for p in parts {
            if p.is_empty() {
                continue;
            }
            if let View::Lit(w) = p.view() {
                pending.extend_from_slice(w);
                continue;
            }
            flush(&mut acc, &mut pending);
            acc = Some(match acc.take() {
                Some(a) => ExpExpr::cat(a, p),
                None => p,
            });
        }
        flush(&mut acc, &mut pending);
        acc.unwrap_or_else(ExpExpr::empty)
    }

    pub fn view(&self) -> View<'_> {
        match &self.0.node {
            Node::Lit(w) => View::Lit(w),
            Node::Cat(l, r) => View::Cat(l, r),
            Node::Pow(b, k) => View::Pow(b, *k),
        }
    }

    /// The size `||e||`.
    pub fn size(&self) -> u64 {
        self.0.size
    }

    /// `|eval(e)|`, computed without expansion.
    pub fn len(&self) -> u64 {
        self.0.len
    }

    pub fn is_empty(&self) -> bool {
        self.0.len == 0
    }

    /// Size recomputed from the tree, ignoring caches.
    pub fn recompute_size(&self) -> u64 {
        match self.view() {
            View::Lit(w) => w.len() as u64,
            View::Cat(l, r) => l.recompute_size() + r.recompute_size(),
            View::Pow(b, k) => log_size(k) + b.recompute_size(),
        }
    }

    pub fn eval(&self, cap: u64) -> Result<Word> {
        if self.len() > cap {
            return Err(Error::resource(
                "eval",
                format!("length {} exceeds the cap {cap}", self.len()),
            ));
        }
        let mut out = Vec::with_capacity(self.len() as usize);
        self.eval_into(&mut out);
        Ok(out)
    }

    fn eval_into(&self, out: &mut Word) {
        match self.view() {
            View::Lit(w) => out.extend_from_slice(w),
            View::Cat(l, r) => {
                l.eval_into(out);
                r.eval_into(out);
            }
            View::Pow(b, k) => {
                let start = out.len();
                b.eval_into(out);
                let end = out.len();
                for _ in 1..k {
                    out.extend_from_within(start..end);
                }
                if k == 0 {
                    out.truncate(start);
                }
            }
        }
    }

    /// Letter at position `i` of `eval(e)`, by descent.
    pub fn letter_at(&self, mut i: u64) -> Result<Sym> {
        if i >= self.len() {
            return Err(Error::OutOfRange(format!(
                "position {i} in length {}",
                self.len()
            )));
        }
        let mut e = self;
        loop {
            match e.view() {
                View::Lit(w) => return Ok(w[i as usize]),
                View::Cat(l, r) => {
                    if i < l.len() {
                        e = l;
                    } else {
                        i -= l.len();
                        e = r;
                    }
                }
                View::Pow(b, _) => {
                    i %= b.len();
                    e = b;
                }
            }
        }
    }

    /// Expression for `eval(e)[from, to]` with `from <= to`.
    pub fn factor(&self, from: u64, to: u64) -> Result<ExpExpr> {
        if from > to || to > self.len() {
            return Err(Error::OutOfRange(format!(
                "factor [{from}, {to}] of length {}",
                self.len()
            )));
        }
        Ok(self.factor_unchecked(from, to))
    }

    fn factor_unchecked(&self, i: u64, j: u64) -> ExpExpr {
        if i == j {
            return ExpExpr::empty();
        }
        if i == 0 && j == self.len() {
            return self.clone();
        }
        match self.view() {
            View::Lit(w) => ExpExpr::lit(w[i as usize..j as usize].to_vec()),
            View::Cat(l, r) => {
                let m = l.len();
                if j <= m {
                    l.factor_unchecked(i, j)
                } else if i >= m {
                    r.factor_unchecked(i - m, j - m)
                } else {
                    join(l.factor_unchecked(i, m), r.factor_unchecked(0, j - m))
                }
            }
            View::Pow(b, _) => {
                let p = b.len();
                let (qi, ri, qj, rj) = (i / p, i % p, j / p, j % p);
                if qi == qj {
                    return b.factor_unchecked(ri, rj);
                }
                let mut parts = Vec::new();
                let mut full_from = qi;
                if ri > 0 {
                    parts.push(b.factor_unchecked(ri, p));
                    full_from += 1;
                }
                let mid = qj - full_from;
                if mid == 1 {
                    parts.push(b.clone());
                } else if mid > 1 {
                    parts.push(ExpExpr::pow(b.clone(), mid));
                }
                if rj > 0 {
                    parts.push(b.factor_unchecked(0, rj));
                }
                parts
                    .into_iter()
                    .reduce(join)
                    .unwrap_or_else(ExpExpr::empty)
            }
        }
    }

    /// Expression for `involute(eval(e))`.
    pub fn involute(&self, al: &Alphabet) -> ExpExpr {
        match self.view() {
            View::Lit(w) => ExpExpr::lit(al.involute(w)),
            View::Cat(l, r) => ExpExpr::cat(r.involute(al), l.involute(al)),
            View::Pow(b, k) => ExpExpr::pow(b.involute(al), k),
        }
    }

    /// Replace letters. Letters for which `f` returns `None` stay.
    pub fn substitute(&self, f: &mut dyn FnMut(Sym) -> Option<ExpExpr>) -> ExpExpr {
        match self.view() {
            View::Lit(w) => {
                let mut parts = Vec::new();
                let mut run = Vec::new();
                for &s in w {
                    match f(s) {
                        Some(e) => {
                            if !run.is_empty() {
                                parts.push(ExpExpr::lit(std::mem::take(&mut run)));
                            }
                            parts.push(e);
                        }
                        None => run.push(s),
                    }
                }
                if !run.is_empty() {
                    parts.push(ExpExpr::lit(run));
                }
                parts
                    .into_iter()
                    .reduce(ExpExpr::cat)
                    .unwrap_or_else(ExpExpr::empty)
            }
            View::Cat(l, r) => ExpExpr::cat(l.substitute(f), r.substitute(f)),
            View::Pow(b, k) => ExpExpr::pow(b.substitute(f), k),
        }
    }

    /// `h(eval(e))`, with fast exponentiation at power nodes.
    pub fn hom(&self, h: &ConstraintHom) -> Result<MonElem> {
        match self.view() {
            View::Lit(w) => h.hom_image(w),
            View::Cat(l, r) => Ok(l.hom(h)?.mul(&r.hom(h)?)),
            View::Pow(b, k) => Ok(b.hom(h)?.pow(k)),
        }
    }

    /// Letters occurring in the tree (including under zero powers).
    pub fn letters(&self) -> BTreeSet<Sym> {
        let mut out = BTreeSet::new();
        self.collect_letters(&mut out);
        out
    }

    fn collect_letters(&self, out: &mut BTreeSet<Sym>) {
        match self.view() {
            View::Lit(w) => out.extend(w.iter().copied()),
            View::Cat(l, r) => {
                l.collect_letters(out);
                r.collect_letters(out);
            }
            View::Pow(b, _) => b.collect_letters(out),
        }
    }

    /// Token syntax: literal letters, juxtaposition, `( e )^k`; `1` alone
    /// is the empty word.
    pub fn render(&self, al: &Alphabet) -> String {
        if self.is_empty() && matches!(self.view(), View::Lit(_)) {
            return "1".into();
        }
        let mut s = String::new();
        self.render_into(al, &mut s);
        s.trim().to_string()
    }

    fn render_into(&self, al: &Alphabet, s: &mut String) {
        match self.view() {
            View::Lit(w) => {
                for &a in w {
                    s.push_str(al.name(a));
                    s.push(' ');
                }
            }
            View::Cat(l, r) => {
                l.render_into(al, s);
                r.render_into(al, s);
            }
            View::Pow(b, k) => {
                s.push_str("( ");
                b.render_into(al, s);
                let _ = write!(s, ")^{k} ");
            }
        }
    }

    pub fn parse(al: &Alphabet, text: &str) -> Result<ExpExpr> {
        let spaced = text
            .replace('(', " ( ")
            .replace(')', " ) ")
            .replace('^', " ^ ");
        let toks: Vec<&str> = spaced.split_whitespace().collect();
        let mut pos = 0;
        let e = parse_seq(al, &toks, &mut pos)?;
        if pos != toks.len() {
            return Err(Error::parse(
                0,
                format!("unexpected {:?} in expression", toks[pos]),
            ));
        }
        Ok(e)
    }
}

fn join(a: ExpExpr, b: ExpExpr) -> ExpExpr {
    if a.is_empty() {
        b
    } else if b.is_empty() {
        a
    } else {
        ExpExpr::cat(a, b)
    }
}

fn parse_seq(al: &Alphabet, toks: &[&str], pos: &mut usize) -> Result<ExpExpr> {
    let mut parts: Vec<ExpExpr> = Vec::new();
    let mut run: Word = Vec::new();
    while *pos < toks.len() && toks[*pos] != ")" {
        let t = toks[*pos];
        if t == "(" {
            *pos += 1;
            let inner = parse_seq(al, toks, pos)?;
            if toks.get(*pos) != Some(&")") {
                return Err(Error::parse(0, "missing `)` in expression"));
            }
            *pos += 1;
            let item = if toks.get(*pos) == Some(&"^") {
                let k = toks
                    .get(*pos + 1)
                    .and_then(|t| t.parse::<u64>().ok())
                    .ok_or_else(|| Error::parse(0, "expected an exponent after `^`"))?;
                *pos += 2;
                ExpExpr::pow(inner, k)
            } else {
                inner
            };
            if !run.is_empty() {
                parts.push(ExpExpr::lit(std::mem::take(&mut run)));
            }
            parts.push(item);
        } else if t == "^" {
            return Err(Error::parse(
                0,
                "`^` must follow a parenthesized expression",
            ));
        } else {
            run.extend(al.parse_word(t)?);
            *pos += 1;
        }
    }
    if !run.is_empty() {
        parts.push(ExpExpr::lit(run));
    }
    Ok(parts
        .into_iter()
        .reduce(ExpExpr::cat)
        .unwrap_or_else(ExpExpr::empty))
}

/// `eval(e)[iv]` for an interval of either orientation.
pub fn factor_expr(al: &Alphabet, e: &ExpExpr, from: u64, to: u64) -> Result<ExpExpr> {
    if from <= to {
        e.factor(from, to)
    } else {
        Ok(e.factor(to, from)?.involute(al))
    }
}

pub fn eq_eval(a: &ExpExpr, b: &ExpExpr, cap: u64) -> Result<bool> {
    if a.len() != b.len() {
        return Ok(false);
    }
    Ok(a.eval(cap)? == b.eval(cap)?)
}
