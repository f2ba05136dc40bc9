//! Finite automata over the constants of an involutive alphabet, the Benois
//! saturation, and the Boolean algebra of rational group languages.

use std::collections::{HashMap, VecDeque};
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::words::{Alphabet, Sym};

/// Default cap on the number of subsets explored by determinization.
pub const DEFAULT_SUBSET_CAP: usize = 1 << 16;

/// Nondeterministic automaton. A transition label of `None` is the empty
/// word.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Nfa {
    states: usize,
    trans: Vec<(usize, Option<Sym>, usize)>,
    initial: Vec<bool>,
    finals: Vec<bool>,
}

impl Nfa {
    pub fn new(states: usize) -> Self {
        Nfa {
            states,
            trans: Vec::new(),
            initial: vec![false; states],
            finals: vec![false; states],
        }
    }

    /// Accepts nothing.
    pub fn empty() -> Self {
        Nfa::new(1)
    }

    /// One state accepting every word over the constants of `al`.
    pub fn universal(al: &Alphabet) -> Self {
        let mut a = Nfa::new(1);
        a.set_initial(0);
        a.set_final(0);
        for c in al.constants() {
            a.add_transition(0, Some(c), 0);
        }
        a
    }

    /// Accepts exactly `w`.
    pub fn singleton(w: &[Sym]) -> Self {
        let mut a = Nfa::new(w.len() + 1);
        a.set_initial(0);
        a.set_final(w.len());
        for (i, &s) in w.iter().enumerate() {
            a.add_transition(i, Some(s), i + 1);
        }
        a
    }

    pub fn add_transition(&mut self, p: usize, a: Option<Sym>, q: usize) {
        assert!(p < self.states && q < self.states, "state out of range");
        if !self.trans.contains(&(p, a, q)) {
            self.trans.push((p, a, q));
        }
    }

    pub fn set_initial(&mut self, p: usize) {
        self.initial[p] = true;
    }

    pub fn set_final(&mut self, p: usize) {
        self.finals[p] = true;
    }

    pub fn states(&self) -> usize {
        self.states
    }

    pub fn transitions(&self) -> &[(usize, Option<Sym>, usize)] {
        &self.trans
    }

    pub fn is_initial(&self, p: usize) -> bool {
        self.initial[p]
    }

    pub fn is_final(&self, p: usize) -> bool {
        self.finals[p]
    }

    pub fn is_epsilon_free(&self) -> bool {
        self.trans.iter().all(|t| t.1.is_some())
    }

    pub fn is_deterministic(&self) -> bool {
        if !self.is_epsilon_free() || self.initial.iter().filter(|&&b| b).count() > 1 {
            return false;
        }
        let mut seen = HashMap::new();
        for &(p, a, q) in &self.trans {
            if let Some(prev) = seen.insert((p, a), q) {
                if prev != q {
                    return false;
                }
            }
        }
        true
    }

    fn closure(&self, set: &mut [bool]) {
        let mut stack: Vec<usize> = (0..self.states).filter(|&p| set[p]).collect();
        while let Some(p) = stack.pop() {
            for &(s, a, q) in &self.trans {
                if s == p && a.is_none() && !set[q] {
                    set[q] = true;
                    stack.push(q);
                }
            }
        }
    }

    fn step(&self, set: &[bool], a: Sym) -> Vec<bool> {
        let mut next = vec![false; self.states];
        for &(p, b, q) in &self.trans {
            if b == Some(a) && set[p] {
                next[q] = true;
            }
        }
        self.closure(&mut next);
        next
    }

    pub fn accepts(&self, w: &[Sym]) -> bool {
        let mut cur = self.initial.clone();
        self.closure(&mut cur);
        for &a in w {
            cur = self.step(&cur, a);
            if !cur.iter().any(|&b| b) {
                return false;
            }
        }
        (0..self.states).any(|p| cur[p] && self.finals[p])
    }

    /// Equivalent automaton without empty transitions on the same states.
    pub fn remove_epsilon(&self) -> Nfa {
        if self.is_epsilon_free() {
            return self.clone();
        }
        let closures: Vec<Vec<bool>> = (0..self.states)
            .map(|p| {
                let mut s = vec![false; self.states];
                s[p] = true;
                self.closure(&mut s);
                s
            })
            .collect();
        let mut out = Nfa::new(self.states);
        out.initial = self.initial.clone();
        for p in 0..self.states {
            out.finals[p] = (0..self.states).any(|q| closures[p][q] && self.finals[q]);
        }
        for p in 0..self.states {
            for &(r, a, q) in &self.trans {
                let Some(a) = a else { continue };
                if !closures[p][r] {
                    continue;
                }
                for t in 0..self.states {
                    if closures[q][t] {
                        out.add_transition(p, Some(a), t);
                    }
                }
            }
        }
        out
    }

    /// Accepts every descendant of the language under `a a' -> 1`. Adds
    /// empty transitions `p -> q` whenever `p -a-> r =>* s -a'-> q`, to a
    /// fixpoint, then removes them again. The state set is unchanged.
    pub fn benois_saturate(&self, al: &Alphabet) -> Nfa {
        let n = self.states;
        let mut eps = vec![vec![false; n]; n];
        for &(p, a, q) in &self.trans {
            if a.is_none() {
                eps[p][q] = true;
            }
        }
        loop {
            // Reflexive transitive closure of the empty transitions.
            let mut clo = eps.clone();
            for (p, row) in clo.iter_mut().enumerate() {
                row[p] = true;
            }
            for k in 0..n {
                for i in 0..n {
                    if clo[i][k] {
                        for j in 0..n {
                            if clo[k][j] {
                                clo[i][j] = true;
                            }
                        }
                    }
                }
            }
            let mut changed = false;
            for &(p, a, r) in &self.trans {
                let Some(a) = a else { continue };
                let abar = al.bar(a);
                for s in 0..n {
                    if !clo[r][s] {
                        continue;
                    }
                    for &(s2, b, q) in &self.trans {
                        if s2 == s && b == Some(abar) && !eps[p][q] {
                            eps[p][q] = true;
                            changed = true;
                        }
                    }
                }
            }
            if !changed {
                break;
            }
        }
        let mut with_eps = self.clone();
        for (p, row) in eps.iter().enumerate() {
            for (q, &e) in row.iter().enumerate() {
                if e {
                    with_eps.add_transition(p, None, q);
                }
            }
        }
        with_eps.remove_epsilon()
    }

    /// Intersection.
    pub fn product(&self, other: &Nfa) -> Nfa {
        let a = self.remove_epsilon();
        let b = other.remove_epsilon();
        let idx = |p: usize, q: usize| p * b.states + q;
        let mut out = Nfa::new(a.states * b.states);
        for p in 0..a.states {
            for q in 0..b.states {
                if a.initial[p] && b.initial[q] {
                    out.set_initial(idx(p, q));
                }
                if a.finals[p] && b.finals[q] {
                    out.set_final(idx(p, q));
                }
            }
        }
        for &(p, x, p2) in &a.trans {
            for &(q, y, q2) in &b.trans {
                if x == y {
                    out.add_transition(idx(p, q), x, idx(p2, q2));
                }
            }
        }
        out
    }

    /// Disjoint union.
    pub fn union(&self, other: &Nfa) -> Nfa {
        let off = self.states;
        let mut out = Nfa::new(self.states + other.states);
        out.trans = self.trans.clone();
        for &(p, a, q) in &other.trans {
            out.trans.push((p + off, a, q + off));
        }
        for p in 0..self.states {
            out.initial[p] = self.initial[p];
            out.finals[p] = self.finals[p];
        }
        for p in 0..other.states {
            out.initial[p + off] = other.initial[p];
            out.finals[p + off] = other.finals[p];
        }
        out
    }

    /// Complete deterministic automaton over the constants of `al` via the
    /// subset construction. Fails once more than `cap` subsets appear.
    pub fn determinize(&self, al: &Alphabet, cap: usize) -> Result<Nfa> {
        let letters = al.constants();
        let mut start = self.initial.clone();
        self.closure(&mut start);
        let mut index: HashMap<Vec<bool>, usize> = HashMap::new();
        let mut subsets: Vec<Vec<bool>> = Vec::new();
        let mut edges: Vec<(usize, Sym, usize)> = Vec::new();
        index.insert(start.clone(), 0);
        subsets.push(start);
        let mut queue = VecDeque::from([0usize]);
        while let Some(i) = queue.pop_front() {
            for &a in &letters {
                let next = self.step(&subsets[i], a);
                let j = match index.get(&next) {
                    Some(&j) => j,
                    None => {
                        if subsets.len() >= cap {
                            return Err(Error::resource(
                                "determinize",
                                format!("more than {cap} subset states"),
                            ));
                        }
                        let j = subsets.len();
                        index.insert(next.clone(), j);
                        subsets.push(next);
                        queue.push_back(j);
                        j
                    }
                };
                edges.push((i, a, j));
            }
        }
        let mut out = Nfa::new(subsets.len());
        out.set_initial(0);
        for (i, s) in subsets.iter().enumerate() {
            if (0..self.states).any(|p| s[p] && self.finals[p]) {
                out.set_final(i);
            }
        }
        out.trans = edges.into_iter().map(|(p, a, q)| (p, Some(a), q)).collect();
        Ok(out)
    }

    /// Complement with respect to all words over the constants of `al`.
    pub fn complement(&self, al: &Alphabet, cap: usize) -> Result<Nfa> {
        let mut d = self.determinize(al, cap)?;
        for f in d.finals.iter_mut() {
            *f = !*f;
        }
        Ok(d)
    }

    /// Automaton for the reduced words `w` with `psi(w)` outside
    /// `psi(L(self))`.
    pub fn group_complement(&self, al: &Alphabet, cap: usize) -> Result<Nfa> {
        let sat = self.benois_saturate(al);
        let comp = sat.complement(al, cap)?;
        Ok(comp.product(&reduced_words_dfa(al)))
    }

    /// Parse the text format:
    ///
    /// ```text
    /// states 2
    /// initial 0
    /// final 1
    /// 0 a 1
    /// 1 1 0
    /// ```
    ///
    /// A transition label `1` is the empty word.
    pub fn parse(al: &Alphabet, text: &str) -> Result<Nfa> {
        let mut states: Option<usize> = None;
        let mut initial = Vec::new();
        let mut finals = Vec::new();
        let mut trans = Vec::new();
        for (ln, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let toks: Vec<&str> = line.split_whitespace().collect();
            let num = |t: &str| {
                t.parse::<usize>().map_err(|_| {
                    Error::parse(ln + 1, format!("expected a state number, got {t:?}"))
                })
            };
            match toks[0] {
                "states" => {
                    if toks.len() != 2 {
                        return Err(Error::parse(ln + 1, "usage: states n"));
                    }
                    states = Some(num(toks[1])?);
                }
                "initial" => {
                    for t in &toks[1..] {
                        initial.push(num(t)?);
                    }
                }
                "final" => {
                    for t in &toks[1..] {
                        finals.push(num(t)?);
                    }
                }
                _ => {
                    if toks.len() != 3 {
                        return Err(Error::parse(ln + 1, "expected `p letter q`"));
                    }
                    let p = num(toks[0])?;
                    let q = num(toks[2])?;
                    let a = if toks[1] == "1" {
                        None
                    } else {
                        let s = al.lookup(toks[1]).ok_or_else(|| {
                            Error::parse(ln + 1, format!("unknown letter {:?}", toks[1]))
                        })?;
                        if !al.is_const(s) {
                            return Err(Error::parse(ln + 1, "automata read constants only"));
                        }
                        Some(s)
                    };
                    trans.push((p, a, q, ln + 1));
                }
            }
        }
        let n = states.ok_or_else(|| Error::parse(0, "missing `states` line"))?;
        let mut a = Nfa::new(n);
        let check = |p: usize, ln: usize| {
            if p >= n {
                Err(Error::parse(ln, format!("state {p} out of range")))
            } else {
                Ok(())
            }
        };
        for p in initial {
            check(p, 0)?;
            a.set_initial(p);
        }
        for p in finals {
            check(p, 0)?;
            a.set_final(p);
        }
        for (p, x, q, ln) in trans {
            check(p, ln)?;
            check(q, ln)?;
            a.add_transition(p, x, q);
        }
        Ok(a)
    }

    pub fn render(&self, al: &Alphabet) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "states {}", self.states);
        let list = |v: &[bool]| -> String {
            v.iter()
                .enumerate()
                .filter(|(_, &b)| b)
                .map(|(i, _)| i.to_string())
                .collect::<Vec<_>>()
                .join(" ")
        };
        let _ = writeln!(s, "initial {}", list(&self.initial)).map(|_| ());
        let _ = writeln!(s, "final {}", list(&self.finals));
        for &(p, a, q) in &self.trans {
            let l = a
                .map(|a| al.name(a).to_string())
                .unwrap_or_else(|| "1".into());
            let _ = writeln!(s, "{p} {l} {q}");
        }
        s
    }
}

/// Deterministic automaton with `|constants| + 1` states accepting the
/// freely reduced words.
pub fn reduced_words_dfa(al: &Alphabet) -> Nfa {
    let consts = al.constants();
    let pos: HashMap<Sym, usize> = consts
        .iter()
        .enumerate()
        .map(|(i, &c)| (c, i + 1))
        .collect();
    let mut a = Nfa::new(consts.len() + 1);
    a.set_initial(0);
    for p in 0..=consts.len() {
        a.set_final(p);
    }
    for &c in &consts {
        a.add_transition(0, Some(c), pos[&c]);
        for &last in &consts {
            if al.bar(last) != c {
                a.add_transition(pos[&last], Some(c), pos[&c]);
            }
        }
    }
    a
}
