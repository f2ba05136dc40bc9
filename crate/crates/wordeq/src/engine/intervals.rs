//! Cuts of a solution, the interval equivalence, free intervals and the
//! factorization of the solution word into maximal free intervals.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::sync::Arc as Shared;

use crate::error::{Error, Result};
use crate::expressions::ExpExpr;
use crate::frontend::{Equation, Solution};
use crate::words::{Alphabet, Interval, Kind, Sym, Word};

use super::moves::{identity_delta, Arc, BaseChange, Projection};

/// One letter `x_i` of `L R` with its position `[l, r]` in `w0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Occurrence {
    pub letter: Sym,
    pub l: usize,
    pub r: usize,
    pub lhs: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CutData {
    pub w0: Word,
    pub occ: Vec<Occurrence>,
    pub cuts: BTreeSet<usize>,
}

impl CutData {
    pub fn m0(&self) -> usize {
        self.w0.len()
    }
}

fn value(e: &Equation, sigma: &Solution, s: Sym) -> Result<Word> {
    if e.omega.contains(&s) {
        sigma
            .get(s)
            .cloned()
            .ok_or_else(|| Error::contract(format!("no value for {}", e.syms.name(s))))
    } else {
        Ok(vec![s])
    }
}

/// Positions of all `sigma(x_i)` in `w0 = sigma(L) = sigma(R)`. Every
/// variable occurring in the sides must have a non-empty value.
pub fn compute_cuts(e: &Equation, sigma: &Solution, cap: u64) -> Result<CutData> {
    if let Some(d) = e.solution_defect(sigma, cap)? {
        return Err(Error::contract(format!("not a solution: {d}")));
    }
    let mut occ = Vec::new();
    let mut w0 = Vec::new();
    for (side, lhs) in [(&e.lhs, true), (&e.rhs, false)] {
        let mut pos = 0;
        let mut word = Vec::new();
        for s in side.eval(cap)? {
            let v = value(e, sigma, s)?;
            if v.is_empty() {
                return Err(Error::contract(format!(
                    "variable {} has the empty value",
                    e.syms.name(s)
                )));
            }
            occ.push(Occurrence {
                letter: s,
                l: pos,
                r: pos + v.len(),
                lhs,
            });
            pos += v.len();
            word.extend(v);
        }
        if lhs {
            w0 = word;
        }
    }
    let cuts = occ.iter().flat_map(|o| [o.l, o.r]).collect();
    Ok(CutData { w0, occ, cuts })
}

/// Queries on the equivalence generated by the occurrence copies.
pub struct IntervalAnalysis<'a> {
    al: &'a Alphabet,
    cd: &'a CutData,
    free: HashMap<Interval, bool>,
}

impl<'a> IntervalAnalysis<'a> {
    pub fn new(al: &'a Alphabet, cd: &'a CutData) -> Self {
        IntervalAnalysis {
            al,
            cd,
            free: HashMap::new(),
        }
    }

    /// Intervals related to `iv` in one step.
    pub fn neighbours(&self, iv: Interval) -> Vec<Interval> {
        let mut out = Vec::new();
        for oi in &self.cd.occ {
            if iv.lo() < oi.l || iv.hi() > oi.r {
                continue;
            }
            let (mu, nu) = (iv.from - oi.l, iv.to - oi.l);
            for oj in &self.cd.occ {
                if oj.letter == oi.letter {
                    out.push(Interval::new(oj.l + mu, oj.l + nu));
                }
                if oj.letter == self.al.bar(oi.letter) {
                    out.push(Interval::new(oj.r - mu, oj.r - nu));
                }
            }
        }
        out
    }

    /// The equivalence class of `iv`.
    pub fn class(&self, iv: Interval) -> BTreeSet<Interval> {
        let mut seen = BTreeSet::from([iv]);
        let mut queue = VecDeque::from([iv]);
        while let Some(x) = queue.pop_front() {
            for y in self.neighbours(x) {
                if seen.insert(y) {
                    queue.push_back(y);
                }
            }
        }
        seen
    }

    fn has_inner_cut(&self, iv: Interval) -> bool {
        self.cd
            .cuts
            .range(iv.lo() + 1..iv.hi().max(iv.lo() + 1))
            .next()
            .is_some()
    }

    pub fn is_free(&mut self, iv: Interval) -> bool {
        if iv.len() <= 1 {
            return true;
        }
        if let Some(&b) = self.free.get(&iv) {
            return b;
        }
        let class = self.class(iv);
        let free = class.iter().all(|&x| !self.has_inner_cut(x));
        for x in class {
            self.free.insert(x, free);
        }
        free
    }

    /// Implicit cuts of a positive interval.
    pub fn implicit_cuts(&self, iv: Interval) -> BTreeSet<usize> {
        assert!(
            iv.is_positive(),
            "implicit cuts are defined for positive intervals"
        );
        let mut out = BTreeSet::new();
        for x in self.class(iv) {
            for &g in self.cd.cuts.range(x.lo() + 1..x.hi().max(x.lo() + 1)) {
                out.insert(iv.from + g.abs_diff(x.from));
            }
        }
        out
    }

    /// `0 = alpha_0 < ... < alpha_k = m0` with every `[alpha_{i-1}, alpha_i]`
    /// a maximal free interval.
    pub fn maximal_free_bounds(&mut self) -> Vec<usize> {
        let m0 = self.cd.m0();
        let mut bounds = vec![0];
        let mut a = 0;
        while a < m0 {
            let mut b = a + 1;
            while b < m0 && self.is_free(Interval::new(a, b + 1)) {
                b += 1;
            }
            bounds.push(b);
            a = b;
        }
        bounds
    }
}

fn piece_names(al: &Alphabet, w: &[Sym]) -> String {
    let parts: Vec<&str> = w.iter().map(|&s| al.name(s)).collect();
    format!("{{{}}}", parts.join("."))
}

/// Intern the letter standing for the word `w` (of length at least two)
/// and its partner for `involute(w)`.
pub fn intern_word_letter(al: &mut Alphabet, w: &[Sym]) -> Result<Sym> {
    let wb = al.involute(w);
    let name = piece_names(al, w);
    let bar_name = piece_names(al, &wb);
    al.intern_pair(&name, &bar_name, Kind::Constant)
}

/// Result of replacing maximal free intervals by letters.
#[derive(Clone, Debug)]
pub struct FreeFactorization {
    pub bounds: Vec<usize>,
    /// New letters with the words they stand for, both members of each pair.
    pub letters: BTreeMap<Sym, Word>,
    pub w0: Word,
    pub equation: Equation,
    pub sigma: Solution,
    pub arc: Arc,
}

/// Replace every maximal free interval of `w0` by one letter. The sides
/// keep their shape; the new equation lives over the letters of the new
/// solution word.
pub fn maximal_free_factorization(
    e: &Equation,
    sigma: &Solution,
    cap: u64,
) -> Result<FreeFactorization> {
    let cd = compute_cuts(e, sigma, cap)?;
    let bounds = IntervalAnalysis::new(&e.syms, &cd).maximal_free_bounds();
    let mut al = (*e.syms).clone();
    let mut letters = BTreeMap::new();
    let mut w0p = Vec::new();
    let mut at: HashMap<usize, usize> = HashMap::new();
    for (i, win) in bounds.windows(2).enumerate() {
        at.insert(win[0], i);
        let piece = &cd.w0[win[0]..win[1]];
        let s = if piece.len() == 1 {
            piece[0]
        } else {
            let s = intern_word_letter(&mut al, piece)?;
            letters.insert(s, piece.to_vec());
            letters.insert(al.bar(s), al.involute(piece));
            s
        };
        w0p.push(s);
    }
    at.insert(cd.m0(), w0p.len());
    let syms = Shared::new(al);

    let mut h2 = e.h.clone();
    for (&s, w) in &letters {
        h2.insert(s, e.h.hom_image(w)?);
    }
    let mut gamma2 = e.gamma.clone();
    gamma2.extend(letters.keys().copied());
    let gamma_new: BTreeSet<Sym> = w0p.iter().flat_map(|&s| [s, syms.bar(s)]).collect();
    let mut h_new = crate::constraints::ConstraintHom::new(e.h.dim());
    for &s in &gamma_new {
        h_new.insert(s, h2.image(s).cloned().expect("image exists"));
    }
    let target = Equation {
        syms: syms.clone(),
        gamma: gamma_new,
        omega: e.omega.clone(),
        h: h_new,
        rho: e.rho.clone(),
        lhs: e.lhs.clone(),
        rhs: e.rhs.clone(),
        residual: e.residual.clone(),
    };

    let mut sigma2 = Solution::new();
    for x in e.representatives() {
        let Some(o) = cd
            .occ
            .iter()
            .find(|o| o.letter == x || o.letter == syms.bar(x))
        else {
            sigma2.set(&syms, x, sigma.get(x).cloned().unwrap_or_default());
            continue;
        };
        let (i, j) = match (at.get(&o.l), at.get(&o.r)) {
            (Some(&i), Some(&j)) => (i, j),
            _ => {
                return Err(Error::contract(
                    "a cut is not a boundary of the free factorization",
                ))
            }
        };
        let mut w = w0p[i..j].to_vec();
        if o.letter != x {
            w = syms.involute(&w);
        }
        sigma2.set(&syms, x, w);
    }

    let arc = Arc {
        source: e.clone(),
        target: target.clone(),
        pi: Projection {
            syms: syms.clone(),
            map: letters.clone(),
        },
        delta: identity_delta(e),
        beta: BaseChange {
            gamma: gamma2,
            h: h2,
            map: BTreeMap::new(),
        },
    };
    Ok(FreeFactorization {
        bounds,
        letters,
        w0: w0p,
        equation: target,
        sigma: sigma2,
        arc,
    })
}

/// Drop variables with the empty value, `delta(X) = 1`, and variables that
/// do not occur in `L = R`, `delta(X) = sigma(X)`.
pub fn remove_empty_variables(e: &Equation, sigma: &Solution) -> Option<(Arc, Solution)> {
    let used: BTreeSet<Sym> = e.lhs.letters().union(&e.rhs.letters()).copied().collect();
    let absent = |x: Sym| !used.contains(&x) && !used.contains(&e.syms.bar(x));
    let gone: Vec<Sym> = e
        .representatives()
        .into_iter()
        .filter(|&x| absent(x) || sigma.get(x).is_some_and(|w| w.is_empty()))
        .collect();
    if gone.is_empty() {
        return None;
    }
    let empty: Vec<Sym> = gone.iter().copied().filter(|&x| !absent(x)).collect();
    let mut delta = identity_delta(e);
    let mut s2 = sigma.clone();
    for &x in &gone {
        let value = if absent(x) {
            ExpExpr::lit(sigma.get(x).cloned().unwrap_or_default())
        } else {
            ExpExpr::empty()
        };
        delta.set(&e.syms, x, super::moves::Delta::Drop(value));
        delta.rho.remove(&x);
        delta.rho.remove(&e.syms.bar(x));
        s2.remove_pair(&e.syms, x);
    }
    let mut target = e.clone();
    for &x in &gone {
        target.omega.remove(&x);
        target.omega.remove(&e.syms.bar(x));
        target.rho.remove(&x);
        target.rho.remove(&e.syms.bar(x));
    }
    target.lhs = e.lhs.substitute(&mut |s| {
        if empty.contains(&s) || empty.contains(&e.syms.bar(s)) {
            Some(ExpExpr::empty())
        } else {
            None
        }
    });
    target.rhs = e.rhs.substitute(&mut |s| {
        if empty.contains(&s) || empty.contains(&e.syms.bar(s)) {
            Some(ExpExpr::empty())
        } else {
            None
        }
    });
    target
        .residual
        .retain(|p| !gone.contains(&p.var) && !gone.contains(&e.syms.bar(p.var)));
    let arc = Arc {
        source: e.clone(),
        target: target.clone(),
        pi: Projection::identity(e.syms.clone()),
        delta,
        beta: BaseChange::identity(e.gamma.clone(), e.h.clone()),
    };
    Some((arc, s2))
}
