//! The brute-force oracle, the iterative deepening search over the move
//! graph, and the group formula driver.

use std::cell::Cell;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::Arc as Shared;

use crate::constraints::{
    AcceptancePair, BoolMat, ConstraintHom, MonElem, Reach, DEFAULT_REACH_BUDGET,
};
use crate::engine::exponent_of_periodicity;
use crate::engine::moves::{
    apply_partial_solution, apply_projection, pull_back_path, Arc, BaseChange, Delta,
    PartialSolution, Projection,
};
use crate::engine::transform::{
    admissibility_budget, build_certificate_path, is_admissible, CertConfig,
    DEFAULT_ADMISSIBILITY_C,
};
use crate::error::{Error, Result};
use crate::expressions::{ExpExpr, DEFAULT_EXPANSION_CAP};
use crate::frontend::pipeline::{
    combine_to_single_equation, eliminate_group_inequalities, eliminate_monoid_inequalities,
    folded_equations, normalize, transfer_constraints_to_monoid, triangulate, Atom, ConstraintMode,
    DisjunctStream,
};
use crate::frontend::{Equation, EquationKey, GroupProblem, Solution};
use crate::words::{Alphabet, Kind, Sym, Word};

#[derive(Clone, Debug)]
pub struct SearchConfig {
    /// Longest value per variable tried by the oracle.
    pub max_len: usize,
    pub cap: u64,
    pub reach_budget: usize,
    pub admissibility_c: u64,
    /// Pipeline branches (and folded `rho` guesses) tried before giving up.
    pub branch_budget: usize,
    /// Iterative deepening stops after this many moves.
    pub max_depth: usize,
    /// Search nodes expanded per equation, over all iterations.
    pub node_budget: usize,
    /// Levels for certificate construction; `None` is the doubling schedule.
    pub schedule: Option<Vec<usize>>,
    /// Nodes whose sides have a larger exponent of periodicity are cut.
    /// `None` uses [`default_exponent_ceiling`].
    pub exponent_ceiling: Option<u64>,
    pub max_base_changes: usize,
    pub max_projections: usize,
    pub dedup: bool,
    pub mode: ConstraintMode,
    /// Run the bounded oracle before the search in [`solve_equation`] and
    /// certify what it finds.
    pub oracle_seed: bool,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            max_len: 6,
            cap: DEFAULT_EXPANSION_CAP,
            reach_budget: DEFAULT_REACH_BUDGET,
            admissibility_c: DEFAULT_ADMISSIBILITY_C,
            branch_budget: 4096,
            max_depth: 40,
            node_budget: 200_000,
            schedule: None,
            exponent_ceiling: None,
            max_base_changes: 1,
            max_projections: 1,
            dedup: true,
            mode: ConstraintMode::Residual,
            oracle_seed: true,
        }
    }
}

/// `2^(d + n ceil(log2(n + 1)) + 2)`, saturating.
pub fn default_exponent_ceiling(d: u64, n: u64) -> u64 {
    let lg = 64 - n.leading_zeros() as u64;
    let e = d.saturating_add(n.saturating_mul(lg)).saturating_add(2);
    if e >= 63 {
        u64::MAX
    } else {
        1u64 << e
    }
}

// ---------------------------------------------------------------------------
// Oracle

/// First unassigned variable position from the left, and the evaluated
/// constant prefix before it; likewise from the right.
fn partial_sides(side: &[Sym], omega: &BTreeSet<Sym>, sigma: &Solution) -> (Word, Word, bool) {
    let mut pre = Vec::new();
    let mut complete = true;
    let mut first_open = side.len();
    for (i, &s) in side.iter().enumerate() {
        if omega.contains(&s) {
            match sigma.get(s) {
                Some(w) => pre.extend_from_slice(w),
                None => {
                    complete = false;
                    first_open = i;
                    break;
                }
            }
        } else {
            pre.push(s);
        }
    }
    if complete {
        return (pre.clone(), pre, true);
    }
    let mut suf = Vec::new();
    for &s in side[first_open..].iter().rev() {
        if omega.contains(&s) {
            match sigma.get(s) {
                Some(w) => suf.extend(w.iter().rev()),
                None => break,
            }
        } else {
            suf.push(s);
        }
    }
    suf.reverse();
    (pre, suf, false)
}

fn compatible_prefix(a: &[Sym], b: &[Sym]) -> bool {
    let n = a.len().min(b.len());
    a[..n] == b[..n]
}

fn compatible_suffix(a: &[Sym], b: &[Sym]) -> bool {
    let n = a.len().min(b.len());
    a[a.len() - n..] == b[b.len() - n..]
}

/// Local checks on `x` alone: `rho` and the residual pairs.
fn value_admissible(e: &Equation, x: Sym, w: &[Sym]) -> Result<bool> {
    let al = &e.syms;
    let m = e.h.hom_image(w)?;
    let mb = m.involute();
    let xb = al.bar(x);
    if let Some(r) = e.rho.get(&x) {
        if *r != m {
            return Ok(false);
        }
    }
    Ok(e.residual
        .iter()
        .all(|p| (p.var != x || p.holds(&m)) && (p.var != xb || p.holds(&mb))))
}

/// Exhaustive search over values of length at most `max_len` for one
/// variable per pair. The next variable is the first open one on the side
/// whose determined prefix is shorter; the other side then forces a prefix
/// of its value. Complete within the bound.
pub fn oracle_solve(e: &Equation, max_len: usize, cap: u64) -> Result<Option<Solution>> {
    oracle_solve_bounded(e, max_len, cap, usize::MAX)
}

/// [`oracle_solve`] giving up with a resource error after `nodes` calls.
pub fn oracle_solve_bounded(
    e: &Equation,
    max_len: usize,
    cap: u64,
    nodes: usize,
) -> Result<Option<Solution>> {
    oracle_complete(e, Solution::new(), max_len, cap, nodes)
}

/// [`oracle_solve_bounded`] with some variables fixed in advance.
pub fn oracle_complete(
    e: &Equation,
    mut sigma: Solution,
    max_len: usize,
    cap: u64,
    nodes: usize,
) -> Result<Option<Solution>> {
    let l = e.lhs.eval(cap)?;
    let r = e.rhs.eval(cap)?;
    let letters: Vec<Sym> = e.gamma.iter().copied().collect();
    let closure = star_closure(&e.h, &e.gamma);
    let o = Oracle {
        e,
        l: &l,
        r: &r,
        letters: &letters,
        max_len,
        cap,
        left: Cell::new(nodes),
        closure,
    };
    Ok(o.rec(&mut sigma)?.then_some(sigma))
}

struct Oracle<'a> {
    e: &'a Equation,
    l: &'a [Sym],
    r: &'a [Sym],
    letters: &'a [Sym],
    max_len: usize,
    cap: u64,
    left: Cell<usize>,
    closure: BoolMat,
}

impl Oracle<'_> {
    fn first_open(&self, side: &[Sym], sigma: &Solution) -> Option<Sym> {
        side.iter()
            .copied()
            .find(|s| self.e.omega.contains(s) && sigma.get(*s).is_none())
    }

    /// Length of `sigma(L)` minus `sigma(R)` over assigned variables, and
    /// the coefficient of every open representative.
    fn length_balance(&self, sigma: &Solution) -> (i64, BTreeMap<Sym, i64>) {
        let al = &self.e.syms;
        let mut c = 0i64;
        let mut k: BTreeMap<Sym, i64> = BTreeMap::new();
        for (side, sign) in [(self.l, 1i64), (self.r, -1i64)] {
            for &s in side {
                if !self.e.omega.contains(&s) {
                    c += sign;
                } else if let Some(w) = sigma.get(s) {
                    c += sign * w.len() as i64;
                } else {
                    *k.entry(s.min(al.bar(s))).or_default() += sign;
                }
            }
        }
        (c, k)
    }

    fn rec(&self, sigma: &mut Solution) -> Result<bool> {
        if self.left.get() == 0 {
            return Err(Error::resource("oracle", "node budget exhausted"));
        }
        self.left.set(self.left.get() - 1);
        let e = self.e;
        let al = &e.syms;
        let (lp, ls, lc) = partial_sides(self.l, &e.omega, sigma);
        let (rp, rs, rc) = partial_sides(self.r, &e.omega, sigma);
        if lc && rc {
            if lp != rp {
                return Ok(false);
            }
        } else if !compatible_prefix(&lp, &rp) || !compatible_suffix(&ls, &rs) {
            return Ok(false);
        }
        let (c, k) = self.length_balance(sigma);
        let open_k: Vec<(Sym, i64)> = k
            .iter()
            .filter(|(_, &v)| v != 0)
            .map(|(&x, &v)| (x, v))
            .collect();
        if open_k.is_empty() && c != 0 {
            return Ok(false);
        }
        // Pick the variable and the letters its value is forced to start with.
        let (occ, forced): (Option<Sym>, Word) = match (
            self.first_open(self.l, sigma),
            self.first_open(self.r, sigma),
        ) {
            (Some(x), _) if lp.len() <= rp.len() || lc || rc => (
                Some(x),
                if rc || lp.len() < rp.len() {
                    rp[lp.len().min(rp.len())..].to_vec()
                } else {
                    Vec::new()
                },
            ),
            (_, Some(y)) => (Some(y), lp[rp.len().min(lp.len())..].to_vec()),
            (Some(x), None) => (Some(x), Vec::new()),
            (None, None) => (None, Vec::new()),
        };
        let x = match occ {
            Some(o) => o.min(al.bar(o)),
            None => match e
                .representatives()
                .into_iter()
                .find(|x| sigma.get(*x).is_none())
            {
                Some(x) => x,
                None => return e.check_solution(sigma, self.cap),
            },
        };
        // Forced letters at the start of sigma(occ); for the partner they
        // fix the end of sigma(x).
        let from_end = occ.is_some_and(|o| o != x);
        let forced = if from_end {
            al.involute(&forced)
        } else {
            forced
        };
        let lens: Vec<usize> = match open_k.as_slice() {
            [(y, kx)] if *y == x => {
                if (-c) % kx != 0 || (-c) / kx < 0 {
                    return Ok(false);
                }
                let n = ((-c) / kx) as usize;
                if n > self.max_len {
                    return Ok(false);
                }
                vec![n]
            }
            _ => (0..=self.max_len).collect(),
        };
        for len in lens {
            let mut pattern: Vec<Option<Sym>> = vec![None; len];
            let f = forced.len().min(len);
            if from_end {
                for i in 0..f {
                    pattern[len - f + i] = Some(forced[forced.len() - f + i]);
                }
            } else {
                for i in 0..f {
                    pattern[i] = Some(forced[i]);
                }
            }
            if self.fill(sigma, x, &mut pattern, 0)? {
                return Ok(true);
            }
        }
        Ok(false)
    }

    /// Choose the open letters of `pattern` from the left, dropping prefixes
    /// no positive residual pair on `x` or its partner can accept.
    fn fill(
        &self,
        sigma: &mut Solution,
        x: Sym,
        pattern: &mut Vec<Option<Sym>>,
        i: usize,
    ) -> Result<bool> {
        let al = &self.e.syms;
        if i > 0
            && !self.prefix_viable(
                x,
                pattern[..i]
                    .iter()
                    .map(|p| p.expect("filled"))
                    .collect::<Vec<_>>()
                    .as_slice(),
            )?
        {
            return Ok(false);
        }
        if i == pattern.len() {
            let w: Word = pattern.iter().map(|p| p.expect("filled")).collect();
            if !value_admissible(self.e, x, &w)? {
                return Ok(false);
            }
            sigma.set(al, x, w);
            if self.rec(sigma)? {
                return Ok(true);
            }
            sigma.remove_pair(al, x);
            return Ok(false);
        }
        if pattern[i].is_some() {
            return self.fill(sigma, x, pattern, i + 1);
        }
        for &c in self.letters {
            pattern[i] = Some(c);
            if self.fill(sigma, x, pattern, i + 1)? {
                return Ok(true);
            }
        }
        pattern[i] = None;
        Ok(false)
    }

    fn prefix_viable(&self, x: Sym, w: &[Sym]) -> Result<bool> {
        let al = &self.e.syms;
        let xb = al.bar(x);
        let n = self.e.dim();
        let mp = self.e.h.hom_image(w)?;
        let ms = self.e.h.hom_image(&al.involute(w))?;
        for p in self.e.residual.iter().filter(|p| p.positive) {
            let v = &p.vectors;
            let ok = if p.var == x {
                let s: Vec<usize> = (0..n)
                    .filter(|&j| (0..n).any(|i| v.initial[i] && mp.a.get(i, j)))
                    .collect();
                s.iter()
                    .any(|&i| (0..n).any(|j| v.finals[j] && self.closure.get(i, j)))
            } else if p.var == xb {
                let t: Vec<usize> = (0..n)
                    .filter(|&i| (0..n).any(|j| v.finals[j] && ms.a.get(i, j)))
                    .collect();
                t.iter()
                    .any(|&j| (0..n).any(|i| v.initial[i] && self.closure.get(i, j)))
            } else {
                true
            };
            if !ok {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

// ---------------------------------------------------------------------------
// Search

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    /// A solution of the root equation and the path of arcs ending in a
    /// variable-free trivial equation.
    Sat { solution: Solution, path: Vec<Arc> },
    /// Every branch was exhausted without reaching a depth or size cut.
    Unsat,
    /// Some budget ran out first.
    Unknown,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SearchStats {
    pub nodes: usize,
    pub iterations: usize,
    pub deepest: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchOutcome {
    pub verdict: Verdict,
    pub stats: SearchStats,
}

/// What a node has accumulated for one root variable, over root letters.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
enum Acc {
    Open(Word, Word),
    Done(Word),
}

#[derive(Clone, Debug)]
struct State {
    eq: Equation,
    acc: BTreeMap<Sym, Acc>,
    /// Projection letters on this path with their root words.
    expand: BTreeMap<Sym, Word>,
    base_changes: usize,
    projections: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
struct NodeKey {
    eq: EquationKey,
    expand: Vec<(Sym, Word)>,
    acc: Vec<(Sym, Acc)>,
}

struct Search<'a> {
    root: &'a Equation,
    cfg: &'a SearchConfig,
    budget: u64,
    ceiling: u64,
    pairs: BTreeMap<Sym, Vec<AcceptancePair>>,
    closure: BoolMat,
    reach: Option<Reach>,
    visited: HashMap<NodeKey, usize>,
    stats: SearchStats,
    cut: bool,
    out_of_nodes: bool,
}

fn star_closure(h: &ConstraintHom, gamma: &BTreeSet<Sym>) -> BoolMat {
    let n = h.dim();
    let mut m = BoolMat::identity(n);
    for &a in gamma {
        if let Some(g) = h.image(a) {
            for i in 0..n {
                for j in 0..n {
                    if g.a.get(i, j) {
                        m.set(i, j, true);
                    }
                }
            }
        }
    }
    loop {
        let sq = m.mul(&m);
        if sq == m {
            return m;
        }
        m = sq;
    }
}

enum Step {
    Dead,
    Moves(Vec<Vec<(Sym, Delta)>>),
}

impl<'a> Search<'a> {
    fn new(root: &'a Equation, cfg: &'a SearchConfig) -> Self {
        let mut pairs: BTreeMap<Sym, Vec<AcceptancePair>> = BTreeMap::new();
        for p in &root.residual {
            pairs.entry(p.var).or_default().push(p.clone());
        }
        let d = root.lhs.len() + root.rhs.len();
        Search {
            root,
            cfg,
            budget: admissibility_budget(root, cfg.admissibility_c),
            ceiling: cfg
                .exponent_ceiling
                .unwrap_or_else(|| default_exponent_ceiling(d, root.dim() as u64)),
            pairs,
            closure: star_closure(&root.h, &root.gamma),
            reach: None,
            visited: HashMap::new(),
            stats: SearchStats::default(),
            cut: false,
            out_of_nodes: false,
        }
    }

    fn root_reach(&mut self) -> Result<&Reach> {
        if self.reach.is_none() {
            let letters: Vec<Sym> = self.root.gamma.iter().copied().collect();
            self.reach = Some(Reach::explore_letters(
                &self.root.h,
                &letters,
                self.cfg.reach_budget,
            )?);
        }
        Ok(self.reach.as_ref().expect("just set"))
    }

    fn expand_word(st: &State, w: &[Sym]) -> Word {
        let mut out = Vec::new();
        for &a in w {
            match st.expand.get(&a) {
                Some(v) => out.extend_from_slice(v),
                None => out.push(a),
            }
        }
        out
    }

    /// Necessary condition for the residual pairs of `x` given what is
    /// known of its root value.
    fn viable(&self, x: Sym, acc: &Acc) -> Result<bool> {
        let al = &self.root.syms;
        let xb = al.bar(x);
        let h = &self.root.h;
        for (var, pre, suf, done) in match acc {
            Acc::Open(p, s) => {
                vec![
                    (x, p.clone(), s.clone(), false),
                    (xb, al.involute(s), al.involute(p), false),
                ]
            }
            Acc::Done(w) => vec![
                (x, w.clone(), Vec::new(), true),
                (xb, al.involute(w), Vec::new(), true),
            ],
        } {
            let Some(ps) = self.pairs.get(&var) else {
                continue;
            };
            let mp = h.hom_image(&pre)?;
            if done {
                if !ps.iter().all(|p| p.holds(&mp)) {
                    return Ok(false);
                }
                continue;
            }
            let ms = h.hom_image(&suf)?;
            let n = h.dim();
            for p in ps.iter().filter(|p| p.positive) {
                let s: Vec<usize> = (0..n)
                    .filter(|&j| (0..n).any(|i| p.vectors.initial[i] && mp.a.get(i, j)))
                    .collect();
                let t: Vec<usize> = (0..n)
                    .filter(|&i| (0..n).any(|j| p.vectors.finals[j] && ms.a.get(i, j)))
                    .collect();
                if !s.iter().any(|&i| t.iter().any(|&j| self.closure.get(i, j))) {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    fn key(&self, st: &State) -> NodeKey {
        NodeKey {
            eq: st.eq.key(),
            expand: st.expand.iter().map(|(&k, v)| (k, v.clone())).collect(),
            acc: if self.pairs.is_empty() {
                Vec::new()
            } else {
                st.acc.iter().map(|(&k, v)| (k, v.clone())).collect()
            },
        }
    }

    /// Letter counting and length arguments that rule a node out.
    fn hopeless(&self, e: &Equation, l: &[Sym], r: &[Sym]) -> Result<bool> {
        let omega = &e.omega;
        let mut occ: BTreeMap<Sym, i64> = BTreeMap::new();
        let mut consts: BTreeMap<Sym, i64> = BTreeMap::new();
        for (side, sign) in [(l, 1i64), (r, -1i64)] {
            for &s in side {
                let t = if omega.contains(&s) {
                    &mut occ
                } else {
                    &mut consts
                };
                *t.entry(s).or_default() += sign;
            }
        }
        let var_len: Vec<i64> = omega
            .iter()
            .filter(|&&x| x <= e.syms.bar(x))
            .map(|&x| {
                occ.get(&x).copied().unwrap_or(0) + occ.get(&e.syms.bar(x)).copied().unwrap_or(0)
            })
            .collect();
        let c: i64 = consts.values().sum();
        if c > 0 && var_len.iter().all(|&k| k >= 0) || c < 0 && var_len.iter().all(|&k| k <= 0) {
            return Ok(true);
        }
        if occ.values().all(|&k| k == 0) && consts.values().any(|&k| k != 0) {
            return Ok(true);
        }
        if !e.rho.is_empty() && omega.iter().all(|x| e.rho.contains_key(x)) {
            let img = |w: &[Sym]| -> Result<MonElem> {
                let mut acc = e.h.unit();
                for &s in w {
                    let m = if omega.contains(&s) {
                        e.rho[&s].clone()
                    } else {
                        e.h.hom_image(&[s])?
                    };
                    acc = acc.mul(&m);
                }
                Ok(acc)
            };
            if img(l)? != img(r)? {
                return Ok(true);
            }
        }
        Ok(false)
    }

    /// Moves at one end of the first mismatch.
    fn end_moves(e: &Equation, x: Option<Sym>, y: Option<Sym>, left: bool) -> Step {
        let is_var = |s: Sym| e.omega.contains(&s);
        let keep = |a: Sym| {
            if left {
                Delta::Keep {
                    prefix: ExpExpr::lit(vec![a]),
                    suffix: ExpExpr::empty(),
                }
            } else {
                Delta::Keep {
                    prefix: ExpExpr::empty(),
                    suffix: ExpExpr::lit(vec![a]),
                }
            }
        };
        let drop = || Delta::Drop(ExpExpr::empty());
        match (x, y) {
            (None, None) => Step::Moves(Vec::new()),
            (Some(s), None) | (None, Some(s)) => {
                if is_var(s) {
                    Step::Moves(vec![vec![(s, drop())]])
                } else {
                    Step::Dead
                }
            }
            (Some(a), Some(b)) => match (is_var(a), is_var(b)) {
                (false, false) => Step::Dead,
                (true, false) => Step::Moves(vec![vec![(a, drop())], vec![(a, keep(b))]]),
                (false, true) => Step::Moves(vec![vec![(b, drop())], vec![(b, keep(a))]]),
                (true, true) => {
                    let mut mv = vec![vec![(a, drop())]];
                    if b != e.syms.bar(a) {
                        mv.push(vec![(b, drop())]);
                        for &c in &e.gamma {
                            mv.push(vec![(a, keep(c)), (b, keep(c))]);
                        }
                    } else {
                        for &c in &e.gamma {
                            mv.push(vec![(a, keep(c))]);
                        }
                    }
                    Step::Moves(mv)
                }
            },
        }
    }

    /// `rho'` choices for a kept variable after `X -> u X v`.
    fn rho_choices(&mut self, e: &Equation, x: Sym, d: &Delta) -> Result<Vec<MonElem>> {
        let Some(r) = e.rho.get(&x).cloned() else {
            return Ok(vec![]);
        };
        let Delta::Keep { prefix, suffix } = d else {
            return Ok(vec![]);
        };
        let hu = prefix.hom(&e.h)?;
        let hv = suffix.hom(&e.h)?;
        let reach = self.root_reach()?;
        Ok(reach
            .elems()
            .iter()
            .filter(|m| hu.mul(m).mul(&hv) == r)
            .cloned()
            .collect())
    }

    /// Build the child for a set of simultaneous `delta` entries. Several
    /// children arise in folded mode, one per `rho'` choice.
    fn delta_children(
        &mut self,
        st: &State,
        changes: &[(Sym, Delta)],
    ) -> Result<Vec<(Arc, State)>> {
        let e = &st.eq;
        let al = e.syms.clone();
        for (x, d) in changes {
            if let (Some(r), Delta::Drop(w)) = (e.rho.get(x), d) {
                if w.hom(&e.h)? != *r {
                    return Ok(vec![]);
                }
            }
        }
        let mut rho_opts: Vec<Vec<(Sym, MonElem)>> = vec![Vec::new()];
        for (x, d) in changes {
            if d.is_keep() && e.rho.contains_key(x) {
                let cands = self.rho_choices(e, *x, d)?;
                let mut next = Vec::new();
                for base in &rho_opts {
                    for m in &cands {
                        let mut b = base.clone();
                        b.push((*x, m.clone()));
                        next.push(b);
                    }
                }
                rho_opts = next;
            }
        }
        let mut acc = st.acc.clone();
        for (x, d) in changes {
            let (rep, d) = if *x <= al.bar(*x) {
                (*x, d.clone())
            } else {
                (al.bar(*x), d.involute(&al))
            };
            let cur = acc
                .get(&rep)
                .cloned()
                .unwrap_or(Acc::Open(Vec::new(), Vec::new()));
            let Acc::Open(mut pre, suf) = cur else {
                return Err(Error::contract("a dropped variable occurs again"));
            };
            let next = match &d {
                Delta::Keep { prefix, suffix } => {
                    pre.extend(Self::expand_word(st, &prefix.eval(self.cfg.cap)?));
                    let mut s = Self::expand_word(st, &suffix.eval(self.cfg.cap)?);
                    s.extend(suf);
                    Acc::Open(pre, s)
                }
                Delta::Drop(w) => {
                    pre.extend(Self::expand_word(st, &w.eval(self.cfg.cap)?));
                    pre.extend(suf);
                    Acc::Done(pre)
                }
            };
            if !self.viable(rep, &next)? {
                return Ok(vec![]);
            }
            acc.insert(rep, next);
        }
        let mut out = Vec::new();
        for opt in rho_opts {
            let mut delta = PartialSolution {
                map: BTreeMap::new(),
                rho: e.rho.clone(),
            };
            for (x, d) in changes {
                delta.set(&al, *x, d.clone());
                if !d.is_keep() {
                    delta.rho.remove(x);
                    delta.rho.remove(&al.bar(*x));
                }
            }
            for (x, m) in opt {
                delta.rho.insert(al.bar(x), m.involute());
                delta.rho.insert(x, m);
            }
            let target = apply_partial_solution(&delta, e, self.cfg.cap)?;
            let arc = Arc {
                source: e.clone(),
                target: target.clone(),
                pi: Projection::identity(al.clone()),
                delta,
                beta: BaseChange::identity(e.gamma.clone(), e.h.clone()),
            };
            out.push((
                arc,
                State {
                    eq: target,
                    acc: acc.clone(),
                    ..st.clone()
                },
            ));
        }
        Ok(out)
    }

    /// Restrict the constants to those in the sides, closed under bar.
    fn shrink_child(&self, st: &State) -> Option<(Arc, State)> {
        let e = &st.eq;
        let mut keep: BTreeSet<Sym> = BTreeSet::new();
        for s in e.lhs.letters().into_iter().chain(e.rhs.letters()) {
            if e.gamma.contains(&s) {
                keep.insert(s);
                keep.insert(e.syms.bar(s));
            }
        }
        if keep.len() == e.gamma.len() {
            return None;
        }
        let mut h = ConstraintHom::new(e.h.dim());
        for &a in &keep {
            h.insert(a, e.h.image(a)?.clone());
        }
        let target = Equation {
            gamma: keep,
            h,
            ..e.clone()
        };
        let arc = Arc {
            source: e.clone(),
            target: target.clone(),
            pi: Projection::identity(e.syms.clone()),
            delta: PartialSolution {
                map: BTreeMap::new(),
                rho: e.rho.clone(),
            },
            beta: BaseChange::identity(e.gamma.clone(), e.h.clone()),
        };
        Some((
            arc,
            State {
                eq: target,
                base_changes: st.base_changes + 1,
                ..st.clone()
            },
        ))
    }

    /// A new letter standing for a shortest word with image `rho(x)`.
    fn projection_child(&mut self, st: &State, x: Sym) -> Result<Option<(Arc, State)>> {
        let e = &st.eq;
        let Some(r) = e.rho.get(&x).cloned() else {
            return Ok(None);
        };
        let Some(w) = self.root_reach()?.witness(&r) else {
            return Ok(None);
        };
        if w.len() < 2 || w.iter().any(|a| !e.gamma.contains(a)) {
            return Ok(None);
        }
        let mut al = (*e.syms).clone();
        let name = |al: &Alphabet, w: &[Sym]| {
            format!(
                "[{}]",
                w.iter().map(|&s| al.name(s)).collect::<Vec<_>>().join(".")
            )
        };
        let wb = al.involute(&w);
        let (n, nb) = (name(&al, &w), name(&al, &wb));
        if al.lookup(&n).is_some() {
            return Ok(None);
        }
        let c = if n == nb {
            al.add_fixed(&n)?
        } else {
            al.add_pair_named(&n, &nb, Kind::Constant)?
        };
        let al = Shared::new(al);
        let mut map = BTreeMap::new();
        map.insert(c, w.clone());
        map.insert(al.bar(c), wb);
        let pi = Projection {
            syms: al.clone(),
            map,
        };
        let target = apply_projection(&pi, e)?;
        let arc = Arc {
            source: e.clone(),
            target: target.clone(),
            pi,
            delta: PartialSolution {
                map: BTreeMap::new(),
                rho: e.rho.clone(),
            },
            beta: BaseChange::identity(target.gamma.clone(), target.h.clone()),
        };
        let mut child = State {
            eq: target,
            projections: st.projections + 1,
            ..st.clone()
        };
        let root_w = Self::expand_word(st, &w);
        child.expand.insert(al.bar(c), al.involute(&root_w));
        child.expand.insert(c, root_w);
        Ok(Some((arc, child)))
    }

    /// Values for the variables left in a node whose sides agree.
    fn finish(&mut self, st: &State, path: &[Arc]) -> Result<Option<(Solution, Vec<Arc>)>> {
        let e = &st.eq;
        let al = e.syms.clone();
        let reps = e.representatives();
        let mut delta = PartialSolution::default();
        if !reps.is_empty() {
            let letters: Vec<Sym> = e.gamma.iter().copied().collect();
            let reach = Reach::explore_letters(&e.h, &letters, self.cfg.reach_budget)?;
            for &x in &reps {
                let w = match e.rho.get(&x) {
                    Some(r) => match reach.witness(r) {
                        Some(w) => w,
                        None => return Ok(None),
                    },
                    None => {
                        let (pre, suf) = match st.acc.get(&x) {
                            Some(Acc::Open(p, s)) => (p.clone(), s.clone()),
                            Some(Acc::Done(_)) => {
                                return Err(Error::contract("a dropped variable is still present"))
                            }
                            None => (Vec::new(), Vec::new()),
                        };
                        let mut found = None;
                        for m in reach.elems() {
                            let mid = reach.witness(m).expect("reachable");
                            let mut full = pre.clone();
                            full.extend(Self::expand_word(st, &mid));
                            full.extend(suf.iter().copied());
                            if self.viable(x, &Acc::Done(full))? {
                                found = Some(mid);
                                break;
                            }
                        }
                        match found {
                            Some(w) => w,
                            None => return Ok(None),
                        }
                    }
                };
                delta.set(&al, x, Delta::Drop(ExpExpr::lit(w)));
            }
        }
        let mut full = path.to_vec();
        if !reps.is_empty() {
            let target = apply_partial_solution(&delta, e, self.cfg.cap)?;
            full.push(Arc {
                source: e.clone(),
                target,
                pi: Projection::identity(al.clone()),
                delta,
                beta: BaseChange::identity(e.gamma.clone(), e.h.clone()),
            });
        }
        let sigma = pull_back_path(&full, &Solution::new(), self.cfg.cap)?;
        if self.root.check_solution(&sigma, self.cfg.cap)? {
            Ok(Some((sigma, full)))
        } else {
            Ok(None)
        }
    }

    fn dfs(
        &mut self,
        st: &State,
        path: &mut Vec<Arc>,
        left: usize,
    ) -> Result<Option<(Solution, Vec<Arc>)>> {
        self.stats.nodes += 1;
        self.stats.deepest = self.stats.deepest.max(path.len());
        if self.stats.nodes > self.cfg.node_budget {
            self.out_of_nodes = true;
            return Ok(None);
        }
        if self.cfg.dedup {
            let k = self.key(st);
            if let Some(&seen) = self.visited.get(&k) {
                if seen >= left {
                    return Ok(None);
                }
            }
            self.visited.insert(k, left);
        }
        let e = &st.eq;
        if !is_admissible(e, self.budget) {
            self.cut = true;
            return Ok(None);
        }
        let l = e.lhs.eval(self.cfg.cap)?;
        let r = e.rhs.eval(self.cfg.cap)?;
        if l == r {
            return self.finish(st, path);
        }
        if self.hopeless(e, &l, &r)? {
            return Ok(None);
        }
        if l.len().max(r.len()) as u64 > self.ceiling
            && (exponent_of_periodicity(&l) as u64 > self.ceiling
                || exponent_of_periodicity(&r) as u64 > self.ceiling)
        {
            self.cut = true;
            return Ok(None);
        }
        if left == 0 {
            self.cut = true;
            return Ok(None);
        }
        let i = l.iter().zip(&r).take_while(|(a, b)| a == b).count();
        let max_j = l.len().min(r.len()) - i;
        let j = l
            .iter()
            .rev()
            .zip(r.iter().rev())
            .take(max_j)
            .take_while(|(a, b)| a == b)
            .count();
        let lstep = Self::end_moves(e, l.get(i).copied(), r.get(i).copied(), true);
        let rstep = Self::end_moves(
            e,
            (l.len() > i + j).then(|| l[l.len() - 1 - j]),
            (r.len() > i + j).then(|| r[r.len() - 1 - j]),
            false,
        );
        let moves = match (lstep, rstep) {
            (Step::Dead, _) | (_, Step::Dead) => return Ok(None),
            (Step::Moves(a), Step::Moves(b)) => {
                if b.len() < a.len() {
                    b
                } else {
                    a
                }
            }
        };
        let pivot_var = moves.first().and_then(|m| m.first()).map(|(x, _)| *x);
        let mut children = Vec::new();
        for m in &moves {
            children.extend(self.delta_children(st, m)?);
        }
        if st.base_changes < self.cfg.max_base_changes {
            children.extend(self.shrink_child(st));
        }
        if st.projections < self.cfg.max_projections {
            if let Some(x) = pivot_var {
                children.extend(self.projection_child(st, x)?);
            }
        }
        for (arc, child) in children {
            path.push(arc);
            let res = self.dfs(&child, path, left - 1)?;
            path.pop();
            if res.is_some() {
                return Ok(res);
            }
            if self.out_of_nodes {
                return Ok(None);
            }
        }
        Ok(None)
    }
}

/// Iterative deepening search from `e` over the arcs generated by
/// prefix guesses, alphabet shrinking and projections.
pub fn search_solve(e: &Equation, cfg: &SearchConfig) -> Result<SearchOutcome> {
    e.validate()?;
    let mut s = Search::new(e, cfg);
    let start = State {
        eq: e.clone(),
        acc: BTreeMap::new(),
        expand: BTreeMap::new(),
        base_changes: 0,
        projections: 0,
    };
    for limit in 0..=cfg.max_depth {
        s.stats.iterations += 1;
        s.cut = false;
        s.visited.clear();
        let mut path = Vec::new();
        if let Some((solution, path)) = s.dfs(&start, &mut path, limit)? {
            return Ok(SearchOutcome {
                verdict: Verdict::Sat { solution, path },
                stats: s.stats,
            });
        }
        if s.out_of_nodes {
            break;
        }
        if !s.cut {
            return Ok(SearchOutcome {
                verdict: Verdict::Unsat,
                stats: s.stats,
            });
        }
    }
    Ok(SearchOutcome {
        verdict: Verdict::Unknown,
        stats: s.stats,
    })
}

/// A solution from the bounded oracle, with the certificate path built
/// for it. `None` when the oracle finds nothing or runs out of nodes.
fn seeded(e: &Equation, cfg: &SearchConfig) -> Result<Option<(Solution, Vec<Arc>)>> {
    let sigma = match oracle_solve_bounded(e, cfg.max_len, cfg.cap, cfg.node_budget) {
        Ok(Some(s)) => s,
        Ok(None) => return Ok(None),
        Err(err) if err.is_resource() => return Ok(None),
        Err(err) => return Err(err),
    };
    let cc = CertConfig {
        cap: cfg.cap,
        admissibility_c: cfg.admissibility_c,
        schedule: cfg.schedule.clone(),
    };
    match build_certificate_path(e, &sigma, &cc) {
        Ok(p) => Ok(Some((sigma, p.arcs))),
        Err(err) if err.is_resource() => Ok(None),
        Err(err) => Err(err),
    }
}

/// The seed, then the search.
fn seeded_search(e: &Equation, cfg: &SearchConfig) -> Result<SearchOutcome> {
    if cfg.oracle_seed {
        if let Some((solution, path)) = seeded(e, cfg)? {
            return Ok(SearchOutcome {
                verdict: Verdict::Sat { solution, path },
                stats: SearchStats::default(),
            });
        }
    }
    search_solve(e, cfg)
}

/// Decide a residual-form equation, either directly or through the lazy
/// stream of folded `rho` guesses. Each equation is first tried with the
/// bounded oracle (a solution it finds is certified by
/// [`build_certificate_path`]), then searched. Returns the equation
/// actually solved.
pub fn solve_equation(e: &Equation, cfg: &SearchConfig) -> Result<(SearchOutcome, Equation)> {
    match cfg.mode {
        ConstraintMode::Residual => Ok((seeded_search(e, cfg)?, e.clone())),
        ConstraintMode::Folded => {
            let mut stats = SearchStats::default();
            let mut all_unsat = true;
            let mut count = 0;
            for f in folded_equations(e, cfg.reach_budget)? {
                count += 1;
                if count > cfg.branch_budget {
                    all_unsat = false;
                    break;
                }
                let out = seeded_search(&f, cfg)?;
                stats.nodes += out.stats.nodes;
                stats.iterations += out.stats.iterations;
                stats.deepest = stats.deepest.max(out.stats.deepest);
                match out.verdict {
                    Verdict::Sat { .. } => {
                        return Ok((
                            SearchOutcome {
                                verdict: out.verdict,
                                stats,
                            },
                            f,
                        ))
                    }
                    Verdict::Unsat => {}
                    Verdict::Unknown => all_unsat = false,
                }
            }
            let verdict = if all_unsat {
                Verdict::Unsat
            } else {
                Verdict::Unknown
            };
            Ok((SearchOutcome { verdict, stats }, e.clone()))
        }
    }
}

// ---------------------------------------------------------------------------
// Group formulas

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GroupVerdict {
    True,
    /// No branch has a solution; every branch search was exhaustive.
    False,
    FalseWithinBudget,
}

#[derive(Clone, Debug)]
pub struct GroupWitness {
    /// Atoms of the successful branch.
    pub branch: Vec<Atom>,
    /// Freely reduced values of the formula's variables.
    pub assignment: BTreeMap<Sym, Word>,
    /// The equation solved, its solution and the path found.
    pub equation: Equation,
    pub solution: Solution,
    pub path: Vec<Arc>,
    pub mode: ConstraintMode,
}

#[derive(Clone, Debug)]
pub struct GroupOutcome {
    pub verdict: GroupVerdict,
    pub branches: usize,
    pub witness: Option<GroupWitness>,
    /// The alphabet of the successful branch, with all fresh letters.
    pub syms: Option<Shared<Alphabet>>,
}

/// Freely reduced words over the constants of `al`, by length.
fn reduced_words(al: &Alphabet, max: usize) -> Vec<Vec<Word>> {
    let consts = al.constants();
    let mut out = vec![vec![Vec::new()]];
    for k in 1..=max {
        let mut next = Vec::new();
        for w in &out[k - 1] {
            for &c in &consts {
                if w.last().is_none_or(|&l| al.bar(l) != c) {
                    let mut v: Word = w.clone();
                    v.push(c);
                    next.push(v);
                }
            }
        }
        out.push(next);
    }
    out
}

struct AssignmentSearch<'a> {
    p: &'a GroupProblem,
    saturated: &'a BTreeMap<String, crate::automata::Nfa>,
    vars: Vec<Sym>,
    words: Vec<Vec<Word>>,
}

impl AssignmentSearch<'_> {
    /// Assignments of `vars[i..]` using exactly `left` letters.
    fn rec(&self, i: usize, left: usize, asg: &mut BTreeMap<Sym, Word>) -> Result<bool> {
        let al = &self.p.syms;
        if i == self.vars.len() {
            if left > 0 {
                return Ok(false);
            }
            let value = |y: Sym| -> Word {
                match asg.get(&y) {
                    Some(w) => w.clone(),
                    None => asg
                        .get(&al.bar(y))
                        .map(|w| al.involute(w))
                        .unwrap_or_default(),
                }
            };
            return self.p.formula.eval_group(al, self.saturated, &value);
        }
        let lens: Vec<usize> = if i + 1 == self.vars.len() {
            vec![left]
        } else {
            (0..=left).collect()
        };
        for k in lens {
            for w in &self.words[k] {
                asg.insert(self.vars[i], w.clone());
                if self.rec(i + 1, left - k, asg)? {
                    return Ok(true);
                }
            }
        }
        asg.remove(&self.vars[i]);
        Ok(false)
    }
}

/// A satisfying assignment of freely reduced words whose lengths add up to
/// at most `bound`, shortest first.
fn short_group_assignment(
    p: &GroupProblem,
    saturated: &BTreeMap<String, crate::automata::Nfa>,
    bound: usize,
) -> Result<Option<BTreeMap<Sym, Word>>> {
    let al = &p.syms;
    let mut vars: Vec<Sym> = p
        .formula
        .variables(al)
        .into_iter()
        .map(|x| x.min(al.bar(x)))
        .collect();
    vars.sort();
    vars.dedup();
    let s = AssignmentSearch {
        p,
        saturated,
        vars,
        words: reduced_words(al, bound),
    };
    for total in 0..=bound {
        let mut asg = BTreeMap::new();
        if s.rec(0, total, &mut asg)? {
            return Ok(Some(asg));
        }
    }
    Ok(None)
}

/// Complete `asg` to a solution of a branch equation with the oracle and
/// certify it.
fn lift(
    e: &Equation,
    asg: &BTreeMap<Sym, Word>,
    cfg: &SearchConfig,
) -> Result<Option<(Solution, Vec<Arc>)>> {
    let al = &e.syms;
    let mut pinned = Solution::new();
    for (&x, w) in asg {
        if e.omega.contains(&x) {
            pinned.set(al, x, w.clone());
        }
    }
    let sigma = match oracle_complete(e, pinned, cfg.max_len, cfg.cap, cfg.node_budget) {
        Ok(Some(s)) => s,
        Ok(None) => return Ok(None),
        Err(err) if err.is_resource() => return Ok(None),
        Err(err) => return Err(err),
    };
    let cc = CertConfig {
        cap: cfg.cap,
        admissibility_c: cfg.admissibility_c,
        schedule: cfg.schedule.clone(),
    };
    match build_certificate_path(e, &sigma, &cc) {
        Ok(p) => Ok(Some((sigma, p.arcs))),
        Err(err) if err.is_resource() => Ok(None),
        Err(err) => Err(err),
    }
}

enum BranchResult {
    Found(Box<GroupOutcome>),
    Done { branches: usize, exhaustive: bool },
}

type BranchSolver<'a> = dyn FnMut(&Equation) -> Result<Option<(SearchOutcome, Equation)>> + 'a;

/// Walk the branch stream, compiling each branch and handing it to `f`.
/// `f` returns `None` when it gives up on a branch.
fn walk_branches(
    p: &GroupProblem,
    q: &GroupProblem,
    saturated: &BTreeMap<String, crate::automata::Nfa>,
    cfg: &SearchConfig,
    f: &mut BranchSolver<'_>,
) -> Result<BranchResult> {
    let mut branches = 0;
    let mut exhaustive = true;
    for atoms in DisjunctStream::new(&q.formula) {
        let mut al = q.syms.clone();
        let tri = triangulate(&mut al, &atoms)?;
        let sys = transfer_constraints_to_monoid(&mut al, &q.automata, &tri)?;
        let systems: Vec<_> = eliminate_monoid_inequalities(&mut al, &sys)?.collect();
        for sys in systems {
            branches += 1;
            if branches > cfg.branch_budget {
                return Ok(BranchResult::Done {
                    branches,
                    exhaustive: false,
                });
            }
            let mut bal = al.clone();
            let compiled = match combine_to_single_equation(&mut bal, &sys, cfg.reach_budget) {
                Ok(Some(c)) => c,
                Ok(None) => continue,
                Err(e) if e.is_resource() => {
                    exhaustive = false;
                    continue;
                }
                Err(e) => return Err(e),
            };
            let (out, solved) = match f(&compiled.equation) {
                Ok(Some(r)) => r,
                Ok(None) => {
                    exhaustive = false;
                    continue;
                }
                Err(e) if e.is_resource() => {
                    exhaustive = false;
                    continue;
                }
                Err(e) => return Err(e),
            };
            match out.verdict {
                Verdict::Sat { solution, path } => {
                    let syms = compiled.equation.syms.clone();
                    let mut assignment = BTreeMap::new();
                    for x in p.formula.variables(&p.syms) {
                        let raw = if let Some(w) = solution.get(x) {
                            w.clone()
                        } else if let Some((_, w)) =
                            compiled.cancelled.iter().find(|(y, _)| *y == x)
                        {
                            w.clone()
                        } else if let Some((_, w)) =
                            compiled.cancelled.iter().find(|(y, _)| syms.bar(*y) == x)
                        {
                            syms.involute(w)
                        } else {
                            Vec::new()
                        };
                        assignment.insert(x, syms.free_reduce(&raw));
                    }
                    let value = |x: Sym| -> Word {
                        match assignment.get(&x) {
                            Some(w) => w.clone(),
                            None => assignment
                                .get(&p.syms.bar(x))
                                .map(|w| p.syms.involute(w))
                                .unwrap_or_default(),
                        }
                    };
                    if !p.formula.eval_group(&p.syms, saturated, &value)? {
                        return Err(Error::contract(
                            "a branch solution fails the original formula",
                        ));
                    }
                    let witness = GroupWitness {
                        branch: atoms.clone(),
                        assignment,
                        equation: solved,
                        solution,
                        path,
                        mode: cfg.mode,
                    };
                    return Ok(BranchResult::Found(Box::new(GroupOutcome {
                        verdict: GroupVerdict::True,
                        branches,
                        witness: Some(witness),
                        syms: Some(syms),
                    })));
                }
                Verdict::Unsat => {}
                Verdict::Unknown => exhaustive = false,
            }
        }
    }
    Ok(BranchResult::Done {
        branches,
        exhaustive,
    })
}

/// Decide a closed existential formula over the free group: normalize,
/// eliminate inequalities, walk the disjunct stream, and for each branch
/// build one equation and solve it. With `oracle_seed`, a short satisfying
/// group assignment is looked for first and lifted through the branches;
/// the lifted solution of the branch equation is certified like any other.
/// A positive answer is re-checked on the original formula with freely
/// reduced values.
pub fn solve_group_formula(p: &GroupProblem, cfg: &SearchConfig) -> Result<GroupOutcome> {
    if p.syms.constants().iter().any(|&c| p.syms.is_fixed(c)) {
        return Err(Error::contract(
            "free groups have no involution fixed points",
        ));
    }
    let normal = GroupProblem {
        formula: normalize(&p.formula),
        ..p.clone()
    };
    let q = eliminate_group_inequalities(&normal);
    let saturated: BTreeMap<String, crate::automata::Nfa> = p
        .automata
        .iter()
        .map(|(k, a)| (k.clone(), a.benois_saturate(&p.syms)))
        .collect();
    if cfg.oracle_seed {
        if let Some(asg) = short_group_assignment(p, &saturated, cfg.max_len)? {
            let mut lifted = |e: &Equation| -> Result<Option<(SearchOutcome, Equation)>> {
                Ok(lift(e, &asg, cfg)?.map(|(solution, path)| {
                    let out = SearchOutcome {
                        verdict: Verdict::Sat { solution, path },
                        stats: SearchStats::default(),
                    };
                    (out, e.clone())
                }))
            };
            if let BranchResult::Found(out) = walk_branches(p, &q, &saturated, cfg, &mut lifted)? {
                return Ok(*out);
            }
        }
    }
    let mut solve = |e: &Equation| solve_equation(e, cfg).map(Some);
    match walk_branches(p, &q, &saturated, cfg, &mut solve)? {
        BranchResult::Found(out) => Ok(*out),
        BranchResult::Done {
            branches,
            exhaustive,
        } => {
            let verdict = if exhaustive {
                GroupVerdict::False
            } else {
                GroupVerdict::FalseWithinBudget
            };
            Ok(GroupOutcome {
                verdict,
                branches,
                witness: None,
                syms: None,
            })
        }
    }
}
