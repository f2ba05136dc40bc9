//! Equations with constraints `(Gamma, h, Omega, rho; L = R)` and their
//! solutions.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::sync::Arc;

use crate::constraints::{AcceptancePair, ConstraintHom, MonElem};
use crate::error::{Error, Result};
use crate::expressions::{eq_eval, ExpExpr};
use crate::words::{Alphabet, Sym, Word};

/// An equation with constraints. All letters live in the shared universe
/// `syms`; `gamma` and `omega` select the constants and variables in
/// play. `rho` may be partial: a variable without an entry is
/// unconstrained except for the `residual` acceptance checks, which are
/// evaluated on a candidate solution.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Equation {
    pub syms: Arc<Alphabet>,
    pub gamma: BTreeSet<Sym>,
    pub omega: BTreeSet<Sym>,
    pub h: ConstraintHom,
    pub rho: BTreeMap<Sym, MonElem>,
    pub lhs: ExpExpr,
    pub rhs: ExpExpr,
    pub residual: Vec<AcceptancePair>,
}

/// Hashable identity of an equation, used for visited sets.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct EquationKey {
    lhs: ExpExpr,
    rhs: ExpExpr,
    gamma: Vec<Sym>,
    rho: Vec<(Sym, MonElem)>,
}

impl Equation {
    /// Equation over all constants and variables of `syms` with a trivial
    /// one-state constraint system.
    pub fn plain(syms: Arc<Alphabet>, lhs: ExpExpr, rhs: ExpExpr) -> Equation {
        let h = ConstraintHom::trivial(&syms);
        Equation {
            gamma: syms.constants().into_iter().collect(),
            omega: syms.variables().into_iter().collect(),
            syms,
            h,
            rho: BTreeMap::new(),
            lhs,
            rhs,
            residual: Vec::new(),
        }
    }

    pub fn parse_plain(syms: Arc<Alphabet>, text: &str) -> Result<Equation> {
        let (l, r) = text
            .split_once('=')
            .ok_or_else(|| Error::parse(0, "expected `L = R`"))?;
        let lhs = ExpExpr::parse(&syms, l)?;
        let rhs = ExpExpr::parse(&syms, r)?;
        Ok(Equation::plain(syms, lhs, rhs))
    }

    pub fn dim(&self) -> usize {
        self.h.dim()
    }

    /// Variables occurring in `L R` or its involution.
    pub fn side_variables(&self) -> BTreeSet<Sym> {
        let mut out = BTreeSet::new();
        for s in self.lhs.letters().into_iter().chain(self.rhs.letters()) {
            if self.omega.contains(&s) {
                out.insert(s);
                out.insert(self.syms.bar(s));
            }
        }
        out
    }

    /// One variable per `{X, X'}` pair, the smaller id.
    pub fn representatives(&self) -> Vec<Sym> {
        self.omega
            .iter()
            .copied()
            .filter(|&x| x <= self.syms.bar(x))
            .collect()
    }

    /// Size `||L|| + ||R||`.
    pub fn size(&self) -> u64 {
        self.lhs.size() + self.rhs.size()
    }

    pub fn is_variable_free(&self) -> bool {
        self.side_variables().is_empty()
    }

    /// No variables and both sides evaluate to the same word.
    pub fn is_trivial(&self, cap: u64) -> Result<bool> {
        Ok(self.omega.is_empty() && eq_eval(&self.lhs, &self.rhs, cap)?)
    }

    pub fn key(&self) -> EquationKey {
        EquationKey {
            lhs: self.lhs.clone(),
            rhs: self.rhs.clone(),
            gamma: self.gamma.iter().copied().collect(),
            rho: self.rho.iter().map(|(&k, v)| (k, v.clone())).collect(),
        }
    }

    /// Check the type invariants.
    pub fn validate(&self) -> Result<()> {
        let al = &self.syms;
        for &a in &self.gamma {
            if !al.contains(a) || !al.is_const(a) || !self.gamma.contains(&al.bar(a)) {
                return Err(Error::contract(format!(
                    "constant set is not closed under involution at {a}"
                )));
            }
            if self.h.image(a).is_none() {
                return Err(Error::contract(format!("h is undefined on {}", al.name(a))));
            }
        }
        for &x in &self.omega {
            if !al.contains(x) || !al.is_var(x) || !self.omega.contains(&al.bar(x)) {
                return Err(Error::contract(format!(
                    "variable set is not closed under involution at {x}"
                )));
            }
        }
        for s in self.lhs.letters().into_iter().chain(self.rhs.letters()) {
            if !self.gamma.contains(&s) && !self.omega.contains(&s) {
                return Err(Error::contract(format!(
                    "letter {} is outside Gamma and Omega",
                    al.name(s)
                )));
            }
        }
        for (&x, m) in &self.rho {
            if !self.omega.contains(&x) {
                return Err(Error::contract(format!(
                    "rho is defined on the non-variable {}",
                    al.name(x)
                )));
            }
            if let Some(mb) = self.rho.get(&al.bar(x)) {
                if *mb != m.involute() {
                    return Err(Error::contract(format!(
                        "rho is not involution compatible at {}",
                        al.name(x)
                    )));
                }
            }
        }
        for &a in &self.gamma {
            if self.h.image(al.bar(a)) != self.h.image(a).map(|m| m.involute()).as_ref() {
                return Err(Error::contract(format!(
                    "h is not involution compatible at {}",
                    al.name(a)
                )));
            }
        }
        Ok(())
    }

    /// Substitute `sigma` into a side.
    pub fn apply(&self, side: &ExpExpr, sigma: &Solution) -> ExpExpr {
        side.substitute(&mut |s| {
            if self.omega.contains(&s) {
                Some(ExpExpr::lit(sigma.get(s).cloned().unwrap_or_default()))
            } else {
                None
            }
        })
    }

    /// Diagnose why `sigma` fails, or `None` when it is a solution.
    pub fn solution_defect(&self, sigma: &Solution, cap: u64) -> Result<Option<String>> {
        let al = &self.syms;
        for &x in &self.omega {
            let Some(w) = sigma.get(x) else {
                return Ok(Some(format!("no value for {}", al.name(x))));
            };
            if let Some(a) = w.iter().find(|a| !self.gamma.contains(a)) {
                return Ok(Some(format!(
                    "value of {} uses {} outside Gamma",
                    al.name(x),
                    al.name(*a)
                )));
            }
            match sigma.get(al.bar(x)) {
                Some(wb) if *wb == al.involute(w) => {}
                _ => {
                    return Ok(Some(format!(
                        "value of {} is not the involution of its partner",
                        al.name(x)
                    )))
                }
            }
            if let Some(m) = self.rho.get(&x) {
                if self.h.hom_image(w)? != *m {
                    return Ok(Some(format!("h(sigma({})) differs from rho", al.name(x))));
                }
            }
        }
        for p in &self.residual {
            if let Some(w) = sigma.get(p.var) {
                if !p.holds(&self.h.hom_image(w)?) {
                    return Ok(Some(format!(
                        "membership check on {} fails",
                        al.name(p.var)
                    )));
                }
            }
        }
        let l = self.apply(&self.lhs, sigma);
        let r = self.apply(&self.rhs, sigma);
        if !eq_eval(&l, &r, cap)? {
            return Ok(Some("sides differ".into()));
        }
        Ok(None)
    }

    pub fn check_solution(&self, sigma: &Solution, cap: u64) -> Result<bool> {
        Ok(self.solution_defect(sigma, cap)?.is_none())
    }

    pub fn render(&self) -> String {
        format!(
            "{} = {}",
            self.lhs.render(&self.syms),
            self.rhs.render(&self.syms)
        )
    }
}

/// `sigma: Omega -> Gamma*`, stored for both members of every pair.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Solution {
    values: BTreeMap<Sym, Word>,
}

impl Solution {
    pub fn new() -> Self {
        Self::default()
    }

    /// Set `sigma(x) = w` and `sigma(x') = involute(w)`.
    pub fn set(&mut self, al: &Alphabet, x: Sym, w: Word) {
        self.values.insert(al.bar(x), al.involute(&w));
        self.values.insert(x, w);
    }

    pub fn get(&self, x: Sym) -> Option<&Word> {
        self.values.get(&x)
    }

    pub fn remove_pair(&mut self, al: &Alphabet, x: Sym) {
        self.values.remove(&x);
        self.values.remove(&al.bar(x));
    }

    pub fn iter(&self) -> impl Iterator<Item = (Sym, &Word)> {
        self.values.iter().map(|(&k, v)| (k, v))
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// One line `X = w` per pair representative.
    pub fn render(&self, al: &Alphabet) -> String {
        let mut s = String::new();
        for (&x, w) in &self.values {
            if x <= al.bar(x) {
                let _ = writeln!(s, "{} = {}", al.name(x), al.render(w));
            }
        }
        s
    }
}
