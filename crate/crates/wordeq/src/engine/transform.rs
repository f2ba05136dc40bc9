//! ℓ-transformations of a solved equation, compression of block sequences
//! and the certificate path `E0 -> E1 -> ... -> E_m0`.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::Arc as Shared;

use crate::constraints::ConstraintHom;
use crate::error::{Error, Result};
use crate::expressions::{log_size, ExpExpr};
use crate::frontend::{Equation, Solution};
use crate::words::{Alphabet, Kind, Sym, Word};

use super::factorization::{critical_words, head_body_tail, l_factorize, Block, LFactorization};
use super::intervals::{compute_cuts, maximal_free_factorization, remove_empty_variables, CutData};
use super::moves::{pull_back_path, Arc, BaseChange, Delta, PartialSolution, Projection};

/// Longest period tried by [`compress_l_factor`].
pub const MAX_PERIOD: usize = 256;

/// Default constant of the admissibility polynomial.
pub const DEFAULT_ADMISSIBILITY_C: u64 = 64;

fn join_names(al: &Alphabet, w: &[Sym]) -> String {
    if w.is_empty() {
        return "1".into();
    }
    w.iter().map(|&s| al.name(s)).collect::<Vec<_>>().join(".")
}

/// Intern the letter for a block and the one for its involution.
pub fn block_letter(al: &mut Alphabet, b: &Block) -> Result<Sym> {
    let name = |al: &Alphabet, b: &Block| {
        format!(
            "<{}|{}|{}>",
            join_names(al, &b.u),
            join_names(al, &b.w),
            join_names(al, &b.v)
        )
    };
    let bb = b.involute(al);
    let (n, nb) = (name(al, b), name(al, &bb));
    al.intern_pair(&n, &nb, Kind::Constant)
}

/// Greedy compression of a letter sequence: at each position take the
/// repetition covering the most letters (earliest first, shortest period
/// on ties) when a power is smaller than the literal, and recurse into the
/// base.
pub fn compress_l_factor(seq: &[Sym], budget: Option<u64>) -> Result<ExpExpr> {
    let e = compress(seq);
    if let Some(b) = budget {
        if e.size() > b {
            return Err(Error::resource(
                "admissibility",
                format!("compressed size {} exceeds {b}", e.size()),
            ));
        }
    }
    Ok(e)
}

fn compress(seq: &[Sym]) -> ExpExpr {
    let n = seq.len();
    let mut parts = Vec::new();
    let mut lit = Vec::new();
    let mut i = 0;
    while i < n {
        let mut best: Option<(usize, u64)> = None;
        let mut best_cov = 0;
        for p in 1..=((n - i) / 2).min(MAX_PERIOD) {
            let mut t = 0;
            while i + p + t < n && seq[i + t] == seq[i + p + t] {
                t += 1;
            }
            let r = 1 + t / p;
            let cov = p * r;
            if r >= 2 && log_size(r as u64) + (p as u64) < cov as u64 && cov > best_cov {
                best = Some((p, r as u64));
                best_cov = cov;
            }
        }
        match best {
            Some((p, r)) => {
                if !lit.is_empty() {
                    parts.push(ExpExpr::lit(std::mem::take(&mut lit)));
                }
                parts.push(ExpExpr::pow(compress(&seq[i..i + p]), r));
                i += p * r as usize;
            }
            None => {
                lit.push(seq[i]);
                i += 1;
            }
        }
    }
    if !lit.is_empty() {
        parts.push(ExpExpr::lit(lit));
    }
    parts
        .into_iter()
        .reduce(ExpExpr::cat)
        .unwrap_or_else(ExpExpr::empty)
}

/// `C (n + d + log2(|Gamma| + |Omega|))^4` for the input equation.
pub fn admissibility_budget(e0: &Equation, c: u64) -> u64 {
    let d = e0.lhs.len() + e0.rhs.len();
    let k = (e0.gamma.len() + e0.omega.len()).max(2) as u64;
    let lg = 64 - (k - 1).leading_zeros() as u64;
    let base = e0.dim() as u64 + d + lg;
    c.saturating_mul(base.saturating_pow(4))
}

pub fn is_admissible(e: &Equation, budget: u64) -> bool {
    e.size() <= budget && (e.gamma.len() as u64) <= budget && (e.omega.len() as u64) <= budget
}

/// Body data of one variable value at level ℓ.
#[derive(Clone, Debug)]
struct ValueFact {
    head: Block,
    body: Vec<Block>,
    tail: Block,
}

impl ValueFact {
    fn new(w: &[Sym], ell: usize, crit: &BTreeSet<Word>) -> Self {
        let f = l_factorize(w, ell, crit);
        let (head, body, tail) = head_body_tail(&f);
        ValueFact { head, body, tail }
    }

    /// Body interval inside a value placed at `[l, r]`.
    fn body_interval(&self, l: usize, r: usize) -> Option<(usize, usize)> {
        (!self.body.is_empty()).then(|| (l + self.head.w.len(), r - self.tail.w.len()))
    }
}

/// `E_ℓ` together with the data needed to connect it to other levels.
#[derive(Clone, Debug)]
pub struct Level {
    pub ell: usize,
    pub equation: Equation,
    pub sigma: Solution,
    pub fact: LFactorization,
    pub block_syms: Vec<Sym>,
    values: BTreeMap<Sym, ValueFact>,
}

impl Level {
    /// Block cover of the body of `x` at the occurrence `[l, r]`.
    fn body_cover(&self, x: Sym, l: usize, r: usize) -> Option<(usize, usize)> {
        let (a, b) = self.values[&x].body_interval(l, r)?;
        self.fact.exact(a, b)
    }
}

/// Build `E_ℓ` from a preprocessed equation `base` (non-empty values,
/// maximal free intervals of length one) and its solution.
pub fn l_transformation(
    base: &Equation,
    sigma: &Solution,
    cd: &CutData,
    ell: usize,
    budget: Option<u64>,
) -> Result<Level> {
    l_transformation_in(&base.syms, base, sigma, cd, ell, budget)
}

/// As [`l_transformation`], interning block letters into a copy of
/// `universe`, which must extend the alphabet of `base`.
pub fn l_transformation_in(
    universe: &Alphabet,
    base: &Equation,
    sigma: &Solution,
    cd: &CutData,
    ell: usize,
    budget: Option<u64>,
) -> Result<Level> {
    if !base.syms.is_prefix_of(universe) {
        return Err(Error::contract(
            "universe does not extend the alphabet of the equation",
        ));
    }
    let w0 = &cd.w0;
    let crit = critical_words(&base.syms, w0, ell, &cd.cuts);
    let fact = l_factorize(w0, ell, &crit);
    let mut al = universe.clone();
    let block_syms: Vec<Sym> = fact
        .blocks
        .iter()
        .map(|b| block_letter(&mut al, b))
        .collect::<Result<_>>()?;

    let mut values = BTreeMap::new();
    for &x in &base.omega {
        let w = sigma
            .get(x)
            .ok_or_else(|| Error::contract(format!("no value for {}", al.name(x))))?;
        values.insert(x, ValueFact::new(w, ell, &crit));
    }
    let mut body_syms: BTreeMap<Sym, Word> = BTreeMap::new();
    for (&x, vf) in &values {
        let syms: Word = vf
            .body
            .iter()
            .map(|b| block_letter(&mut al, b))
            .collect::<Result<_>>()?;
        body_syms.insert(x, syms);
    }
    let syms = Shared::new(al);

    // Replace body covers by variables, side by side.
    let mut sides = Vec::new();
    for lhs in [true, false] {
        let mut covers: Vec<(usize, usize, Sym)> = Vec::new();
        for o in cd
            .occ
            .iter()
            .filter(|o| o.lhs == lhs && base.omega.contains(&o.letter))
        {
            let Some((a, b)) = values[&o.letter].body_interval(o.l, o.r) else {
                continue;
            };
            let (p, q) = fact.exact(a, b).ok_or_else(|| {
                Error::contract("a variable body does not start and end at block boundaries")
            })?;
            if block_syms[p..=q] != body_syms[&o.letter][..] {
                return Err(Error::contract(
                    "a variable body differs from its block cover",
                ));
            }
            covers.push((p, q, o.letter));
        }
        covers.sort();
        let mut parts = Vec::new();
        let mut i = 0;
        for (p, q, x) in covers {
            if p < i {
                return Err(Error::contract("block covers of variable bodies overlap"));
            }
            parts.push(compress_l_factor(&block_syms[i..p], None)?);
            parts.push(ExpExpr::lit(vec![x]));
            i = q + 1;
        }
        parts.push(compress_l_factor(&block_syms[i..], None)?);
        sides.push(ExpExpr::concat_all(parts));
    }
    let rhs = sides.pop().expect("two sides");
    let lhs = sides.pop().expect("two sides");

    let mut gamma = base.gamma.clone();
    for s in lhs
        .letters()
        .into_iter()
        .chain(rhs.letters())
        .chain(body_syms.values().flatten().copied())
    {
        if !base.omega.contains(&s) {
            gamma.insert(s);
            gamma.insert(syms.bar(s));
        }
    }
    let mut h = ConstraintHom::new(base.dim());
    let words = block_words(&syms, &fact, &block_syms, &values, &body_syms);
    for &a in &gamma {
        let m = match base.h.image(a) {
            Some(m) => m.clone(),
            None => {
                let w = words
                    .get(&a)
                    .ok_or_else(|| Error::contract("block letter without a word"))?;
                base.h.hom_image(w)?
            }
        };
        h.insert(a, m);
    }
    let omega: BTreeSet<Sym> = base
        .omega
        .iter()
        .copied()
        .filter(|x| !body_syms[x].is_empty())
        .collect();
    let mut rho = BTreeMap::new();
    let mut sig = Solution::new();
    for &x in &omega {
        let body: Word = values[&x]
            .body
            .iter()
            .flat_map(|b| b.w.iter().copied())
            .collect();
        if base.rho.contains_key(&x) {
            rho.insert(x, base.h.hom_image(&body)?);
        }
        if x <= syms.bar(x) {
            sig.set(&syms, x, body_syms[&x].clone());
        }
    }
    let eq = Equation {
        syms,
        gamma,
        omega,
        h,
        rho,
        lhs,
        rhs,
        residual: Vec::new(),
    };
    if let Some(b) = budget {
        if !is_admissible(&eq, b) {
            return Err(Error::resource(
                "admissibility",
                format!("E_{ell} has size {} over budget {b}", eq.size()),
            ));
        }
    }
    Ok(Level {
        ell,
        equation: eq,
        sigma: sig,
        fact,
        block_syms,
        values,
    })
}

/// Middle words of all block letters known at this level.
fn block_words(
    al: &Alphabet,
    fact: &LFactorization,
    block_syms: &[Sym],
    values: &BTreeMap<Sym, ValueFact>,
    body_syms: &BTreeMap<Sym, Word>,
) -> HashMap<Sym, Word> {
    let mut out = HashMap::new();
    for (b, &s) in fact.blocks.iter().zip(block_syms) {
        out.insert(al.bar(s), al.involute(&b.w));
        out.insert(s, b.w.clone());
    }
    for (x, vf) in values {
        for (b, &s) in vf.body.iter().zip(&body_syms[x]) {
            out.insert(al.bar(s), al.involute(&b.w));
            out.insert(s, b.w.clone());
        }
    }
    out
}

/// A verified chain of arcs from an input equation to a variable-free one.
#[derive(Clone, Debug)]
pub struct CertPath {
    pub arcs: Vec<Arc>,
    pub levels: Vec<usize>,
}

impl CertPath {
    pub fn last(&self) -> Option<&Equation> {
        self.arcs.last().map(|a| &a.target)
    }
}

#[derive(Clone, Debug)]
pub struct CertConfig {
    pub cap: u64,
    pub admissibility_c: u64,
    /// Explicit levels; `None` means doubling `1, 2, 4, ...` up to `m0`.
    pub schedule: Option<Vec<usize>>,
}

impl Default for CertConfig {
    fn default() -> Self {
        CertConfig {
            cap: crate::expressions::DEFAULT_EXPANSION_CAP,
            admissibility_c: DEFAULT_ADMISSIBILITY_C,
            schedule: None,
        }
    }
}

fn lit(w: &[Sym]) -> ExpExpr {
    compress(w)
}

/// Arc from the preprocessed equation to `E_1` (or any first level):
/// `beta` maps a block to its middle word, `delta(X) = head X tail`.
fn first_arc(base: &Equation, sigma: &Solution, lvl: &Level) -> Arc {
    let al = &lvl.equation.syms;
    let mut delta = PartialSolution {
        map: BTreeMap::new(),
        rho: lvl.equation.rho.clone(),
    };
    for x in base.representatives() {
        let vf = &lvl.values[&x];
        let d = if vf.body.is_empty() {
            Delta::Drop(lit(sigma.get(x).expect("value exists")))
        } else {
            Delta::Keep {
                prefix: lit(&vf.head.w),
                suffix: lit(&vf.tail.w),
            }
        };
        delta.set(al, x, d);
    }
    let words = block_words(al, &lvl.fact, &lvl.block_syms, &lvl.values, &body_map(lvl));
    let mut beta = BaseChange::identity(base.gamma.clone(), base.h.clone());
    for &a in &lvl.equation.gamma {
        if !base.gamma.contains(&a) {
            beta.map.insert(a, lit(&words[&a]));
        }
    }
    Arc {
        source: base.clone(),
        target: lvl.equation.clone(),
        pi: Projection::identity(al.clone()),
        delta,
        beta,
    }
}

fn body_map(lvl: &Level) -> BTreeMap<Sym, Word> {
    let mut al = (*lvl.equation.syms).clone();
    lvl.values
        .iter()
        .map(|(&x, vf)| {
            (
                x,
                vf.body
                    .iter()
                    .map(|b| block_letter(&mut al, b).expect("interned"))
                    .collect(),
            )
        })
        .collect()
}

/// Arc `E_ℓ -> E_ℓ'` for `ℓ < ℓ' <= 2ℓ`.
fn level_arc(base: &Equation, cd: &CutData, lo: &Level, hi: &Level) -> Result<Arc> {
    let al = super::moves::wider(&lo.equation.syms, &hi.equation.syms)?;
    let lo_words = block_words(&al, &lo.fact, &lo.block_syms, &lo.values, &body_map(lo));

    // beta on the letters of E_ℓ': the ℓ-cover of an occurrence.
    let mut pos: HashMap<Sym, usize> = HashMap::new();
    for (j, &s) in hi.block_syms.iter().enumerate() {
        pos.entry(s).or_insert(j);
    }
    let cover_of = |j: usize| -> Result<Word> {
        let (p, q) = lo
            .fact
            .exact(hi.fact.bounds[j], hi.fact.bounds[j + 1])
            .ok_or_else(|| Error::contract("an ℓ'-block is not a union of ℓ-blocks"))?;
        Ok(lo.block_syms[p..=q].to_vec())
    };
    let mut beta_map: BTreeMap<Sym, ExpExpr> = BTreeMap::new();
    for &b in &hi.equation.gamma {
        if base.gamma.contains(&b) || beta_map.contains_key(&b) {
            continue;
        }
        let (w, barred) = match (pos.get(&b), pos.get(&al.bar(b))) {
            (Some(&j), _) => (cover_of(j)?, false),
            (None, Some(&j)) => (cover_of(j)?, true),
            (None, None) => {
                return Err(Error::contract(
                    "an ℓ'-block does not occur in the solution word",
                ))
            }
        };
        let (w, wb) = if barred {
            (al.involute(&w), w)
        } else {
            (w.clone(), al.involute(&w))
        };
        beta_map.insert(al.bar(b), lit(&wb));
        beta_map.insert(b, lit(&w));
    }

    let mut gamma_mid = lo.equation.gamma.clone();
    for e in beta_map.values() {
        for s in e.letters() {
            gamma_mid.insert(s);
            gamma_mid.insert(al.bar(s));
        }
    }
    let mut pi_map = BTreeMap::new();
    let mut h_mid = lo.equation.h.clone();
    for &s in &gamma_mid {
        if !lo.equation.gamma.contains(&s) {
            let w = lo_words
                .get(&s)
                .ok_or_else(|| Error::contract("ℓ-block letter without a word"))?;
            h_mid.insert(s, base.h.hom_image(w)?);
            pi_map.insert(s, w.clone());
        }
    }

    let mut delta = PartialSolution {
        map: BTreeMap::new(),
        rho: hi.equation.rho.clone(),
    };
    for x in lo.equation.representatives() {
        let o = cd
            .occ
            .iter()
            .find(|o| o.letter == x || o.letter == al.bar(x))
            .ok_or_else(|| Error::contract("kept variable does not occur"))?;
        let y = o.letter;
        let (p, q) = lo
            .body_cover(y, o.l, o.r)
            .ok_or_else(|| Error::contract("kept variable without an ℓ-body"))?;
        let d = match hi.values[&y].body_interval(o.l, o.r) {
            None => Delta::Drop(lit(&lo.block_syms[p..=q])),
            Some((a, b)) => {
                let (r, s) = lo
                    .fact
                    .exact(a, b)
                    .ok_or_else(|| Error::contract("ℓ'-body is not a union of ℓ-blocks"))?;
                Delta::Keep {
                    prefix: lit(&lo.block_syms[p..r]),
                    suffix: lit(&lo.block_syms[s + 1..=q]),
                }
            }
        };
        delta.set(&al, y, d);
    }
    Ok(Arc {
        source: lo.equation.clone(),
        target: hi.equation.clone(),
        pi: Projection {
            syms: al.clone(),
            map: pi_map,
        },
        delta,
        beta: BaseChange {
            gamma: gamma_mid,
            h: h_mid,
            map: beta_map,
        },
    })
}

/// Check an arc and the admissibility of both ends.
fn checked(arc: Arc, budget: u64, cap: u64, step: &str) -> Result<Arc> {
    if let Some(d) = arc.defect(cap)? {
        return Err(Error::contract(format!("{step}: {d}")));
    }
    for (name, e) in [("source", &arc.source), ("target", &arc.target)] {
        if !is_admissible(e, budget) {
            return Err(Error::resource(
                "admissibility",
                format!("{step}: {name} has size {} over {budget}", e.size()),
            ));
        }
    }
    Ok(arc)
}

/// Build the certificate path for a solved equation. Stops at the first
/// variable-free equation.
pub fn build_certificate_path(
    e0: &Equation,
    sigma: &Solution,
    cfg: &CertConfig,
) -> Result<CertPath> {
    let cap = cfg.cap;
    if let Some(d) = e0.solution_defect(sigma, cap)? {
        return Err(Error::contract(format!("not a solution: {d}")));
    }
    let budget = admissibility_budget(e0, cfg.admissibility_c);
    let mut arcs = Vec::new();
    let mut levels = Vec::new();
    if e0.is_trivial(cap)? {
        return Ok(CertPath { arcs, levels });
    }
    let (mut cur, mut sig) = (e0.clone(), sigma.clone());
    if let Some((arc, s2)) = remove_empty_variables(&cur, &sig) {
        let arc = checked(arc, budget, cap, "empty variables")?;
        cur = arc.target.clone();
        sig = s2;
        arcs.push(arc);
    }
    let ff = maximal_free_factorization(&cur, &sig, cap)?;
    let arc = checked(ff.arc, budget, cap, "free factorization")?;
    let base = ff.equation;
    let bsig = ff.sigma;
    arcs.push(arc);
    if base.omega.is_empty() {
        return Ok(CertPath { arcs, levels });
    }
    let cd = compute_cuts(&base, &bsig, cap)?;
    let m0 = cd.m0();
    let schedule = match &cfg.schedule {
        Some(s) => s.clone(),
        None => {
            let mut s = vec![1];
            while *s.last().expect("non-empty") < m0 {
                let l = *s.last().expect("non-empty");
                s.push((2 * l).min(m0));
            }
            s
        }
    };
    let mut prev: Option<Level> = None;
    for &ell in &schedule {
        if let Some(p) = &prev {
            if ell <= p.ell || ell > 2 * p.ell {
                return Err(Error::contract(format!(
                    "schedule step {} -> {ell} violates l < l' <= 2l",
                    p.ell
                )));
            }
        }
        let universe = prev
            .as_ref()
            .map(|p| p.equation.syms.clone())
            .unwrap_or_else(|| base.syms.clone());
        let lvl = l_transformation_in(&universe, &base, &bsig, &cd, ell, Some(budget))?;
        let arc = match &prev {
            None => first_arc(&base, &bsig, &lvl),
            Some(p) => level_arc(&base, &cd, p, &lvl)?,
        };
        arcs.push(checked(arc, budget, cap, &format!("level {ell}"))?);
        levels.push(ell);
        let done = lvl.equation.omega.is_empty();
        prev = Some(lvl);
        if done {
            break;
        }
    }
    let path = CertPath { arcs, levels };
    let last = path.last().expect("at least one arc");
    if !last.omega.is_empty() {
        return Err(Error::contract(
            "schedule ended before the equation became variable-free",
        ));
    }
    let back = pull_back_path(&path.arcs, &Solution::new(), cap)?;
    if let Some(d) = e0.solution_defect(&back, cap)? {
        return Err(Error::contract(format!("pulled-back solution fails: {d}")));
    }
    Ok(path)
}
