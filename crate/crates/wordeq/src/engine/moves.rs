//! Base changes, projections, partial solutions, arcs of the search graph
//! and the pull-back of solutions along arcs.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc as Shared;

use crate::constraints::{selfinvolutive_witness, ConstraintHom, MonElem, Reach};
use crate::error::{Error, Result};
use crate::expressions::{eq_eval, ExpExpr};
use crate::frontend::{Equation, Solution};
use crate::words::{Alphabet, Sym, Word};

/// The larger of two compatible universes.
pub fn wider(a: &Shared<Alphabet>, b: &Shared<Alphabet>) -> Result<Shared<Alphabet>> {
    if a.is_prefix_of(b) {
        Ok(b.clone())
    } else if b.is_prefix_of(a) {
        Ok(a.clone())
    } else {
        Err(Error::contract(
            "equations live over incompatible alphabets",
        ))
    }
}

/// `beta: Gamma' -> Gamma*`. Letters of `Gamma'` without an entry map to
/// themselves. `gamma` and `h` describe the codomain.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BaseChange {
    pub gamma: BTreeSet<Sym>,
    pub h: ConstraintHom,
    pub map: BTreeMap<Sym, ExpExpr>,
}

impl BaseChange {
    pub fn identity(gamma: BTreeSet<Sym>, h: ConstraintHom) -> Self {
        BaseChange {
            gamma,
            h,
            map: BTreeMap::new(),
        }
    }

    pub fn image(&self, a: Sym) -> ExpExpr {
        self.map
            .get(&a)
            .cloned()
            .unwrap_or_else(|| ExpExpr::lit(vec![a]))
    }

    fn apply_expr(&self, e: &ExpExpr) -> ExpExpr {
        e.substitute(&mut |s| self.map.get(&s).cloned())
    }

    /// Check `beta(a') = involute(beta(a))` and `h' = h beta` on `gamma'`.
    pub fn defect(
        &self,
        al: &Alphabet,
        gamma_src: &BTreeSet<Sym>,
        h_src: &ConstraintHom,
        cap: u64,
    ) -> Result<Option<String>> {
        for &a in gamma_src {
            let img = self.image(a);
            if let Some(s) = img.letters().into_iter().find(|s| !self.gamma.contains(s)) {
                return Ok(Some(format!(
                    "beta({}) uses {} outside the codomain",
                    al.name(a),
                    al.name(s)
                )));
            }
            if !eq_eval(&self.image(al.bar(a)), &img.involute(al), cap)? {
                return Ok(Some(format!(
                    "beta is not involution compatible at {}",
                    al.name(a)
                )));
            }
            let Some(ha) = h_src.image(a) else {
                return Ok(Some(format!("h' is undefined on {}", al.name(a))));
            };
            if img.hom(&self.h)? != *ha {
                return Ok(Some(format!("h' differs from h beta at {}", al.name(a))));
            }
        }
        Ok(None)
    }
}

/// `beta_*(E')`: rewrite the sides of `e` through `beta`.
pub fn apply_base_change(beta: &BaseChange, e: &Equation, cap: u64) -> Result<Equation> {
    if let Some(d) = beta.defect(&e.syms, &e.gamma, &e.h, cap)? {
        return Err(Error::contract(d));
    }
    Ok(Equation {
        syms: e.syms.clone(),
        gamma: beta.gamma.clone(),
        omega: e.omega.clone(),
        h: beta.h.clone(),
        rho: e.rho.clone(),
        lhs: beta.apply_expr(&e.lhs),
        rhs: beta.apply_expr(&e.rhs),
        residual: e.residual.clone(),
    })
}

/// `pi: Gamma'' -> Gamma*`, the identity on `Gamma`. `map` lists the new
/// letters only; `syms` is a universe containing them.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Projection {
    pub syms: Shared<Alphabet>,
    pub map: BTreeMap<Sym, Word>,
}

impl Projection {
    pub fn identity(syms: Shared<Alphabet>) -> Self {
        Projection {
            syms,
            map: BTreeMap::new(),
        }
    }

    pub fn apply_word(&self, w: &[Sym]) -> Word {
        let mut out = Vec::with_capacity(w.len());
        for &a in w {
            match self.map.get(&a) {
                Some(img) => out.extend_from_slice(img),
                None => out.push(a),
            }
        }
        out
    }

    fn defect(&self, e: &Equation) -> Option<String> {
        let al = &self.syms;
        for (&a, w) in &self.map {
            if e.gamma.contains(&a) {
                return Some(format!("pi moves the old letter {}", al.name(a)));
            }
            if !al.contains(a) || !al.is_const(a) {
                return Some(format!("pi is defined on a non-constant {a}"));
            }
            if self.map.get(&al.bar(a)) != Some(&al.involute(w)) {
                return Some(format!("pi is not involution compatible at {}", al.name(a)));
            }
            if let Some(s) = w.iter().find(|s| !e.gamma.contains(s)) {
                return Some(format!(
                    "pi({}) uses {} outside Gamma",
                    al.name(a),
                    al.name(*s)
                ));
            }
        }
        None
    }
}

/// `pi^*(E)`: enlarge the alphabet, set `h'' = h pi`, keep the sides.
pub fn apply_projection(pi: &Projection, e: &Equation) -> Result<Equation> {
    if let Some(d) = pi.defect(e) {
        return Err(Error::contract(d));
    }
    let mut h = e.h.clone();
    let mut gamma = e.gamma.clone();
    for (&a, w) in &pi.map {
        h.insert(a, e.h.hom_image(w)?);
        gamma.insert(a);
    }
    Ok(Equation {
        syms: wider(&e.syms, &pi.syms)?,
        gamma,
        h,
        ..e.clone()
    })
}

/// Is there a projection from `e` onto the letters of `target` outside
/// `e.gamma`? Returns the witness map on success.
pub fn projection_exists(
    e: &Equation,
    target: &Equation,
    budget: usize,
) -> Result<Option<Projection>> {
    let al = wider(&e.syms, &target.syms)?;
    let reach = Reach::explore_letters(&e.h, &e.gamma.iter().copied().collect::<Vec<_>>(), budget)?;
    let mut map = BTreeMap::new();
    for &a in &target.gamma {
        if e.gamma.contains(&a) || map.contains_key(&a) {
            continue;
        }
        let Some(m) = target.h.image(a) else {
            return Ok(None);
        };
        let w = if al.is_fixed(a) {
            selfinvolutive_witness(&al, &e.h, &reach, m)
        } else {
            reach.witness(m)
        };
        let Some(w) = w else { return Ok(None) };
        map.insert(al.bar(a), al.involute(&w));
        map.insert(a, w);
    }
    Ok(Some(Projection { syms: al, map }))
}

/// `delta(X)`: either `u X v` (kept) or a word over the constants.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Delta {
    Keep { prefix: ExpExpr, suffix: ExpExpr },
    Drop(ExpExpr),
}

impl Delta {
    pub fn identity() -> Self {
        Delta::Keep {
            prefix: ExpExpr::empty(),
            suffix: ExpExpr::empty(),
        }
    }

    pub fn involute(&self, al: &Alphabet) -> Delta {
        match self {
            Delta::Keep { prefix, suffix } => Delta::Keep {
                prefix: suffix.involute(al),
                suffix: prefix.involute(al),
            },
            Delta::Drop(w) => Delta::Drop(w.involute(al)),
        }
    }

    pub fn is_keep(&self) -> bool {
        matches!(self, Delta::Keep { .. })
    }

    fn image(&self, x: Sym) -> ExpExpr {
        match self {
            Delta::Keep { prefix, suffix } => {
                ExpExpr::concat_all([prefix.clone(), ExpExpr::lit(vec![x]), suffix.clone()])
            }
            Delta::Drop(w) => w.clone(),
        }
    }
}

/// `delta: Omega -> Gamma* Omega' Gamma* u Gamma*` with the new `rho'` on
/// the kept variables. Variables without an entry are kept unchanged.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PartialSolution {
    pub map: BTreeMap<Sym, Delta>,
    pub rho: BTreeMap<Sym, MonElem>,
}

impl PartialSolution {
    /// Set `delta(x)` and the matching `delta(x')`.
    pub fn set(&mut self, al: &Alphabet, x: Sym, d: Delta) {
        self.map.insert(al.bar(x), d.involute(al));
        self.map.insert(x, d);
    }

    pub fn get(&self, x: Sym) -> Delta {
        self.map.get(&x).cloned().unwrap_or_else(Delta::identity)
    }

    pub fn kept(&self, omega: &BTreeSet<Sym>) -> BTreeSet<Sym> {
        omega
            .iter()
            .copied()
            .filter(|&x| self.get(x).is_keep())
            .collect()
    }

    fn apply_expr(&self, omega: &BTreeSet<Sym>, e: &ExpExpr) -> ExpExpr {
        e.substitute(&mut |s| {
            if omega.contains(&s) && self.map.contains_key(&s) {
                Some(self.get(s).image(s))
            } else {
                None
            }
        })
    }

    fn defect(&self, e: &Equation, cap: u64) -> Result<Option<String>> {
        let al = &e.syms;
        for &x in &e.omega {
            let d = self.get(x);
            let back = self.get(al.bar(x)).involute(al);
            let same = match (&d, &back) {
                (
                    Delta::Keep {
                        prefix: p1,
                        suffix: s1,
                    },
                    Delta::Keep {
                        prefix: p2,
                        suffix: s2,
                    },
                ) => eq_eval(p1, p2, cap)? && eq_eval(s1, s2, cap)?,
                (Delta::Drop(w1), Delta::Drop(w2)) => eq_eval(w1, w2, cap)?,
                _ => false,
            };
            if !same {
                return Ok(Some(format!(
                    "delta is not involution compatible at {}",
                    al.name(x)
                )));
            }
            let parts: Vec<&ExpExpr> = match &d {
                Delta::Keep { prefix, suffix } => vec![prefix, suffix],
                Delta::Drop(w) => vec![w],
            };
            for p in parts {
                if let Some(s) = p.letters().into_iter().find(|s| !e.gamma.contains(s)) {
                    return Ok(Some(format!(
                        "delta({}) uses {} outside Gamma",
                        al.name(x),
                        al.name(s)
                    )));
                }
            }
            let rho_new = self.rho.get(&x);
            match (e.rho.get(&x), &d) {
                (None, _) => {
                    if rho_new.is_some() {
                        return Ok(Some(format!(
                            "rho' is defined on {} although rho is not",
                            al.name(x)
                        )));
                    }
                }
                (Some(r), Delta::Keep { prefix, suffix }) => {
                    let Some(r2) = rho_new else {
                        return Ok(Some(format!("rho' is missing on the kept {}", al.name(x))));
                    };
                    if prefix.hom(&e.h)?.mul(r2).mul(&suffix.hom(&e.h)?) != *r {
                        return Ok(Some(format!(
                            "rho(X) differs from h(u) rho'(X) h(v) at {}",
                            al.name(x)
                        )));
                    }
                }
                (Some(r), Delta::Drop(w)) => {
                    if w.hom(&e.h)? != *r {
                        return Ok(Some(format!(
                            "rho(X) differs from h(delta(X)) at {}",
                            al.name(x)
                        )));
                    }
                }
            }
        }
        if let Some((&x, _)) = self
            .rho
            .iter()
            .find(|(x, _)| !self.get(**x).is_keep() || !e.omega.contains(x))
        {
            return Ok(Some(format!(
                "rho' is defined on the dropped {}",
                al.name(x)
            )));
        }
        Ok(None)
    }
}

/// `delta_*(E)`.
pub fn apply_partial_solution(delta: &PartialSolution, e: &Equation, cap: u64) -> Result<Equation> {
    if let Some(d) = delta.defect(e, cap)? {
        return Err(Error::contract(d));
    }
    Ok(Equation {
        omega: delta.kept(&e.omega),
        rho: delta.rho.clone(),
        lhs: delta.apply_expr(&e.omega, &e.lhs),
        rhs: delta.apply_expr(&e.omega, &e.rhs),
        residual: Vec::new(),
        ..e.clone()
    })
}

/// An arc `E -> E'` with witness `(pi, delta, beta)` such that
/// `delta_*(pi^*(E))` and `beta_*(E')` represent the same equation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Arc {
    pub source: Equation,
    pub target: Equation,
    pub pi: Projection,
    pub delta: PartialSolution,
    pub beta: BaseChange,
}

impl Arc {
    /// `delta_*(pi^*(E))`.
    pub fn intermediate(&self, cap: u64) -> Result<Equation> {
        apply_partial_solution(&self.delta, &apply_projection(&self.pi, &self.source)?, cap)
    }

    /// Why the arc fails to verify, or `None`. Residual membership checks
    /// are not part of the arc relation and are ignored.
    pub fn defect(&self, cap: u64) -> Result<Option<String>> {
        if let Some(d) = self.pi.defect(&self.source) {
            return Ok(Some(format!("projection: {d}")));
        }
        let ep = apply_projection(&self.pi, &self.source)?;
        if let Some(d) = self.delta.defect(&ep, cap)? {
            return Ok(Some(format!("partial solution: {d}")));
        }
        let mid = apply_partial_solution(&self.delta, &ep, cap)?;
        let t = &self.target;
        if let Err(e) = t.validate() {
            return Ok(Some(format!("target: {e}")));
        }
        if self.beta.gamma != mid.gamma {
            return Ok(Some(
                "base change codomain differs from the projected alphabet".into(),
            ));
        }
        if mid
            .gamma
            .iter()
            .any(|&a| self.beta.h.image(a) != mid.h.image(a))
        {
            return Ok(Some("base change codomain carries a different h".into()));
        }
        if let Some(d) = self.beta.defect(&t.syms, &t.gamma, &t.h, cap)? {
            return Ok(Some(format!("base change: {d}")));
        }
        if t.omega != mid.omega {
            return Ok(Some(
                "target variables differ from the kept variables".into(),
            ));
        }
        if t.rho != mid.rho {
            return Ok(Some("target rho differs from rho'".into()));
        }
        if !eq_eval(&mid.lhs, &self.beta.apply_expr(&t.lhs), cap)? {
            return Ok(Some("left sides differ".into()));
        }
        if !eq_eval(&mid.rhs, &self.beta.apply_expr(&t.rhs), cap)? {
            return Ok(Some("right sides differ".into()));
        }
        Ok(None)
    }

    /// `sigma = pi(beta sigma') delta` on the source variables.
    pub fn pull_back(&self, sigma_t: &Solution, cap: u64) -> Result<Solution> {
        let al = wider(&self.source.syms, &self.target.syms)?;
        let mut beta_cache: BTreeMap<Sym, Word> = BTreeMap::new();
        let mut beta_word = |w: &[Sym]| -> Result<Word> {
            let mut out = Vec::new();
            for &a in w {
                if let std::collections::btree_map::Entry::Vacant(v) = beta_cache.entry(a) {
                    v.insert(self.beta.image(a).eval(cap)?);
                }
                out.extend_from_slice(&beta_cache[&a]);
            }
            Ok(out)
        };
        let mut sigma = Solution::new();
        for x in self.source.representatives() {
            let w = match self.delta.get(x) {
                Delta::Keep { prefix, suffix } => {
                    let mid = sigma_t
                        .get(x)
                        .ok_or_else(|| Error::contract(format!("no value for {}", al.name(x))))?;
                    let mut w = prefix.eval(cap)?;
                    w.extend(beta_word(mid)?);
                    w.extend(suffix.eval(cap)?);
                    w
                }
                Delta::Drop(w) => w.eval(cap)?,
            };
            let w = self.pi.apply_word(&w);
            if w.len() as u64 > cap {
                return Err(Error::resource(
                    "pull-back",
                    "solution exceeds the expansion cap",
                ));
            }
            sigma.set(&al, x, w);
        }
        Ok(sigma)
    }
}

pub fn verify_arc(arc: &Arc, cap: u64) -> Result<bool> {
    Ok(arc.defect(cap)?.is_none())
}

/// Pull `sigma` back along a path of arcs ending at its equation.
pub fn pull_back_path(path: &[Arc], sigma: &Solution, cap: u64) -> Result<Solution> {
    let mut s = sigma.clone();
    for arc in path.iter().rev() {
        s = arc.pull_back(&s, cap)?;
    }
    Ok(s)
}

/// Arc with identity projection and partial solution whose base change is
/// `beta`, from `beta_*(target)` to `target`.
pub fn base_change_arc(beta: BaseChange, target: Equation, cap: u64) -> Result<Arc> {
    let source = apply_base_change(&beta, &target, cap)?;
    let delta = identity_delta(&source);
    Ok(Arc {
        pi: Projection::identity(source.syms.clone()),
        delta,
        beta,
        source,
        target,
    })
}

/// Identity partial solution carrying `rho` unchanged.
pub fn identity_delta(e: &Equation) -> PartialSolution {
    PartialSolution {
        map: BTreeMap::new(),
        rho: e.rho.clone(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::words::Kind;

    fn universe() -> Shared<Alphabet> {
        let mut al = Alphabet::constants_from(&["a", "b", "c"], &[]).unwrap();
        for v in ["X", "Y", "Z"] {
            al.add_pair(v, Kind::Variable).unwrap();
        }
        Shared::new(al)
    }

    fn eq(al: &Shared<Alphabet>, t: &str) -> Equation {
        Equation::parse_plain(al.clone(), t).unwrap()
    }

    fn lit(al: &Alphabet, t: &str) -> ExpExpr {
        ExpExpr::lit(al.parse_word(t).unwrap())
    }

    #[test]
    fn base_change_example() {
        let al = universe();
        let e1 = eq(&al, "X X' = Y a' b' Y Z a Y'");
        let mut beta = BaseChange::identity(e1.gamma.clone(), e1.h.clone());
        for (k, v) in [("a", "a b c b"), ("b", "b c b")] {
            let a = al.lookup(k).unwrap();
            beta.map.insert(a, lit(&al, v));
            beta.map.insert(al.bar(a), lit(&al, v).involute(&al));
        }
        let out = apply_base_change(&beta, &e1, 1000).unwrap();
        let want = eq(&al, "X X' = Y b' c' b' a' b' c' b' Y Z a b c b Y'");
        assert!(eq_eval(&out.lhs, &want.lhs, 1000).unwrap());
        assert!(eq_eval(&out.rhs, &want.rhs, 1000).unwrap());
    }

    #[test]
    fn partial_solution_example() {
        let al = universe();
        let e = eq(&al, "X X' = Y a' b' Y Z a Y'");
        let mut d = PartialSolution::default();
        let x = al.lookup("X").unwrap();
        let z = al.lookup("Z").unwrap();
        d.set(
            &al,
            x,
            Delta::Keep {
                prefix: lit(&al, "a"),
                suffix: ExpExpr::empty(),
            },
        );
        d.set(&al, z, Delta::Drop(lit(&al, "a' b")));
        let out = apply_partial_solution(&d, &e, 1000).unwrap();
        assert_eq!(out.render(), "a X X' a' = Y a' b' Y a' b a Y'");
        assert!(!out.omega.contains(&z));
    }

    #[test]
    fn projection_roundtrip() {
        let mut al = Alphabet::constants_from(&["a", "b"], &[]).unwrap();
        al.add_pair("X", Kind::Variable).unwrap();
        let base = Shared::new(al.clone());
        let e = eq(&base, "X a = a X");
        let c = al.add_pair("c", Kind::Constant).unwrap();
        let big = Shared::new(al);
        let b = big.lookup("b").unwrap();
        let mut pi = Projection::identity(big.clone());
        pi.map.insert(c, vec![b; 100]);
        pi.map.insert(big.bar(c), vec![big.bar(b); 100]);
        let p = apply_projection(&pi, &e).unwrap();
        assert_eq!(p.render(), e.render());
        assert!(p.gamma.contains(&c));
        assert!(projection_exists(&e, &p, 1000).unwrap().is_some());
    }

    #[test]
    fn arc_with_corrupted_delta_fails() {
        let al = universe();
        let e = eq(&al, "X X' = Y a' b' Y Z a Y'");
        let x = al.lookup("X").unwrap();
        let z = al.lookup("Z").unwrap();
        let mut d = PartialSolution::default();
        d.set(
            &al,
            x,
            Delta::Keep {
                prefix: lit(&al, "a"),
                suffix: ExpExpr::empty(),
            },
        );
        d.set(&al, z, Delta::Drop(lit(&al, "a' b")));
        let target = apply_partial_solution(&d, &e, 1000).unwrap();
        let arc = Arc {
            source: e.clone(),
            target: target.clone(),
            pi: Projection::identity(al.clone()),
            delta: d.clone(),
            beta: BaseChange::identity(e.gamma.clone(), e.h.clone()),
        };
        assert!(verify_arc(&arc, 1000).unwrap());
        let mut bad = arc.clone();
        bad.delta.set(
            &al,
            x,
            Delta::Keep {
                prefix: lit(&al, "b"),
                suffix: ExpExpr::empty(),
            },
        );
        assert!(!verify_arc(&bad, 1000).unwrap());
    }
}
