//! From group formulas to one equation with constraints over a free
//! monoid with involution.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use crate::automata::{reduced_words_dfa, Nfa};
use crate::constraints::{hom_from_automata, AcceptancePair, MonElem, Reach};
use crate::error::{Error, Result};
use crate::expressions::ExpExpr;
use crate::words::{Alphabet, Kind, Sym, Word};

use super::equation::Equation;
use super::formula::{Formula, GroupProblem};

/// Name of the automaton accepting only the empty word, used by the
/// inequality elimination.
pub const ONE_AUTOMATON: &str = "{1}";

/// Push negations down to the atoms.
pub fn normalize(f: &Formula) -> Formula {
    match f {
        Formula::Not(g) => negate(g),
        Formula::And(fs) => Formula::And(fs.iter().map(normalize).collect()),
        Formula::Or(fs) => Formula::Or(fs.iter().map(normalize).collect()),
        atom => atom.clone(),
    }
}

fn negate(f: &Formula) -> Formula {
    match f {
        Formula::Eq(w) => Formula::Neq(w.clone()),
        Formula::Neq(w) => Formula::Eq(w.clone()),
        Formula::In(x, p) => Formula::NotIn(*x, p.clone()),
        Formula::NotIn(x, p) => Formula::In(*x, p.clone()),
        Formula::Not(g) => normalize(g),
        Formula::And(fs) => Formula::Or(fs.iter().map(negate).collect()),
        Formula::Or(fs) => Formula::And(fs.iter().map(negate).collect()),
    }
}

/// Replace every `W != 1` by `W X = 1 and X notin {1}` with a fresh `X`.
/// Expects a normalized formula.
pub fn eliminate_group_inequalities(p: &GroupProblem) -> GroupProblem {
    let mut out = p.clone();
    let mut used = false;
    out.formula = elim(&mut out.syms, &p.formula, &mut used);
    if used {
        let mut one = Nfa::new(1);
        one.set_initial(0);
        one.set_final(0);
        out.automata.insert(ONE_AUTOMATON.to_string(), one);
    }
    out
}

fn elim(al: &mut Alphabet, f: &Formula, used: &mut bool) -> Formula {
    match f {
        Formula::Neq(w) => {
            *used = true;
            let x = al.fresh_pair("N", Kind::Variable);
            let mut wx = w.clone();
            wx.push(x);
            Formula::And(vec![
                Formula::Eq(wx),
                Formula::NotIn(x, ONE_AUTOMATON.to_string()),
            ])
        }
        Formula::Not(g) => Formula::Not(Box::new(elim(al, g, used))),
        Formula::And(fs) => Formula::And(fs.iter().map(|g| elim(al, g, used)).collect()),
        Formula::Or(fs) => Formula::Or(fs.iter().map(|g| elim(al, g, used)).collect()),
        atom => atom.clone(),
    }
}

/// Atoms of a conjunctive branch.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Atom {
    Eq(Word),
    In(Sym, String),
    NotIn(Sym, String),
}

/// Lazy depth-first enumeration of the conjunctions obtained by choosing
/// one side of every disjunction. Branches through an empty `or` are
/// skipped.
pub struct DisjunctStream {
    formula: Formula,
    choices: Vec<usize>,
    done: bool,
}

impl DisjunctStream {
    pub fn new(f: &Formula) -> Self {
        DisjunctStream {
            formula: f.clone(),
            choices: Vec::new(),
            done: false,
        }
    }
}

/// Walk `f` under the current choices. Records the arity of every
/// disjunction met; returns `false` when the branch hits an empty `or`.
fn walk(f: &Formula, choices: &[usize], arities: &mut Vec<usize>, atoms: &mut Vec<Atom>) -> bool {
    match f {
        Formula::Eq(w) => atoms.push(Atom::Eq(w.clone())),
        Formula::In(x, p) => atoms.push(Atom::In(*x, p.clone())),
        Formula::NotIn(x, p) => atoms.push(Atom::NotIn(*x, p.clone())),
        Formula::Neq(_) | Formula::Not(_) => unreachable!("formula is not normalized"),
        Formula::And(fs) => {
            for g in fs {
                if !walk(g, choices, arities, atoms) {
                    return false;
                }
            }
        }
        Formula::Or(fs) => {
            if fs.is_empty() {
                return false;
            }
            let i = arities.len();
            arities.push(fs.len());
            let c = choices.get(i).copied().unwrap_or(0);
            return walk(&fs[c], choices, arities, atoms);
        }
    }
    true
}

impl Iterator for DisjunctStream {
    type Item = Vec<Atom>;

    fn next(&mut self) -> Option<Vec<Atom>> {
        while !self.done {
            let mut arities = Vec::new();
            let mut atoms = Vec::new();
            let alive = walk(&self.formula, &self.choices, &mut arities, &mut atoms);
            let mut ch: Vec<usize> = (0..arities.len())
                .map(|i| self.choices.get(i).copied().unwrap_or(0))
                .collect();
            loop {
                match ch.last() {
                    None => {
                        self.done = true;
                        break;
                    }
                    Some(&c) if c + 1 < arities[ch.len() - 1] => {
                        *ch.last_mut().expect("non-empty") += 1;
                        break;
                    }
                    Some(_) => {
                        ch.pop();
                    }
                }
            }
            self.choices = ch;
            if alive {
                return Some(atoms);
            }
        }
        None
    }
}

/// Equational atoms become `|W| = 3`: short ones are padded with `a a'`,
/// long ones split as `x1 x2 Y = 1`, `Y' x3 ... xk = 1`.
pub fn triangulate(al: &mut Alphabet, atoms: &[Atom]) -> Result<Vec<Atom>> {
    let pad = al
        .constants()
        .into_iter()
        .find(|&c| !al.is_fixed(c))
        .ok_or_else(|| Error::contract("triangulation needs a constant pair"))?;
    let mut out = Vec::new();
    for a in atoms {
        let Atom::Eq(w) = a else {
            out.push(a.clone());
            continue;
        };
        if w.is_empty() {
            continue;
        }
        let mut w = w.clone();
        while w.len() < 3 {
            w.push(pad);
            w.push(al.bar(pad));
        }
        while w.len() > 3 {
            let y = al.fresh_pair("T", Kind::Variable);
            out.push(Atom::Eq(vec![w[0], w[1], y]));
            let mut rest = vec![al.bar(y)];
            rest.extend_from_slice(&w[2..]);
            w = rest;
        }
        out.push(Atom::Eq(w));
    }
    Ok(out)
}

/// Membership of a variable in one of the system's automata.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Membership {
    pub var: Sym,
    pub automaton: usize,
    pub positive: bool,
}

/// Conjunction of equations `U = V`, inequalities `U != V` and
/// memberships, interpreted in the free monoid with involution.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct MonoidSystem {
    pub equations: Vec<(Word, Word)>,
    pub inequalities: Vec<(Word, Word)>,
    pub automata: Vec<Nfa>,
    pub memberships: Vec<Membership>,
}

impl MonoidSystem {
    /// Variables occurring anywhere, closed under involution.
    pub fn variables(&self, al: &Alphabet) -> BTreeSet<Sym> {
        let mut out = BTreeSet::new();
        let pairs = self.equations.iter().chain(&self.inequalities);
        for s in pairs
            .flat_map(|(u, v)| u.iter().chain(v))
            .copied()
            .chain(self.memberships.iter().map(|m| m.var))
        {
            if al.is_var(s) {
                out.insert(s);
                out.insert(al.bar(s));
            }
        }
        out
    }
}

/// `x y z = 1` splits into `x = P Q`, `y = Q' R`, `z = R' P'`.
pub fn triangle_cases(al: &mut Alphabet, xyz: [Sym; 3]) -> Vec<(Word, Word)> {
    let p = al.fresh_pair("P", Kind::Variable);
    let q = al.fresh_pair("Q", Kind::Variable);
    let r = al.fresh_pair("R", Kind::Variable);
    vec![
        (vec![xyz[0]], vec![p, q]),
        (vec![xyz[1]], vec![al.bar(q), r]),
        (vec![xyz[2]], vec![al.bar(r), al.bar(p)]),
    ]
}

/// Move a triangulated conjunction to the monoid side: positive
/// constraints use the saturated automaton, negative ones also demand a
/// reduced value, and every triangle is split.
pub fn transfer_constraints_to_monoid(
    al: &mut Alphabet,
    automata: &BTreeMap<String, Nfa>,
    atoms: &[Atom],
) -> Result<MonoidSystem> {
    let mut sys = MonoidSystem::default();
    let mut index: BTreeMap<String, usize> = BTreeMap::new();
    let mut reduced: Option<usize> = None;
    let mut lookup = |sys: &mut MonoidSystem, al: &Alphabet, name: &str| -> Result<usize> {
        if let Some(&i) = index.get(name) {
            return Ok(i);
        }
        let a = automata
            .get(name)
            .ok_or_else(|| Error::contract(format!("unknown automaton {name:?}")))?;
        sys.automata.push(a.benois_saturate(al));
        index.insert(name.to_string(), sys.automata.len() - 1);
        Ok(sys.automata.len() - 1)
    };
    let mut triangles = Vec::new();
    for a in atoms {
        match a {
            Atom::Eq(w) => {
                let t: [Sym; 3] = w
                    .as_slice()
                    .try_into()
                    .map_err(|_| Error::contract("equational atoms must have length 3"))?;
                triangles.push(t);
            }
            Atom::In(x, p) => {
                let i = lookup(&mut sys, al, p)?;
                sys.memberships.push(Membership {
                    var: *x,
                    automaton: i,
                    positive: true,
                });
            }
            Atom::NotIn(x, p) => {
                let i = lookup(&mut sys, al, p)?;
                sys.memberships.push(Membership {
                    var: *x,
                    automaton: i,
                    positive: false,
                });
                let n = *reduced.get_or_insert_with(|| {
                    sys.automata.push(reduced_words_dfa(al));
                    sys.automata.len() - 1
                });
                sys.memberships.push(Membership {
                    var: *x,
                    automaton: n,
                    positive: true,
                });
            }
        }
    }
    for t in triangles {
        sys.equations.extend(triangle_cases(al, t));
    }
    Ok(sys)
}

/// Mixed-radix counter over `radices`, yielding every digit vector.
fn odometer(radices: Vec<usize>) -> impl Iterator<Item = Vec<usize>> {
    let empty = radices.contains(&0);
    let mut cur: Option<Vec<usize>> = if empty {
        None
    } else {
        Some(vec![0; radices.len()])
    };
    std::iter::from_fn(move || {
        let out = cur.clone()?;
        let mut next = out.clone();
        let mut i = next.len();
        loop {
            if i == 0 {
                cur = None;
                break;
            }
            i -= 1;
            next[i] += 1;
            if next[i] < radices[i] {
                cur = Some(next);
                break;
            }
            next[i] = 0;
        }
        Some(out)
    })
}

/// Replace every `U != V` by one of `U = V a X`, `V = U a X`,
/// `U = X a Y and V = X b Z` (`a != b`), lazily over all choices.
pub fn eliminate_monoid_inequalities(
    al: &mut Alphabet,
    sys: &MonoidSystem,
) -> Result<impl Iterator<Item = MonoidSystem>> {
    let consts: Vec<Sym> = al.constants();
    if sys.inequalities.is_empty() {
        let mut plain = sys.clone();
        plain.inequalities.clear();
        return Ok(Box::new(std::iter::once(plain)) as Box<dyn Iterator<Item = MonoidSystem>>);
    }
    if consts.len() < 2 {
        return Err(Error::contract(
            "inequality elimination needs at least two constants",
        ));
    }
    let mut options: Vec<Vec<Vec<(Word, Word)>>> = Vec::new();
    for (u, v) in &sys.inequalities {
        let x = al.fresh_pair("X", Kind::Variable);
        let y = al.fresh_pair("Y", Kind::Variable);
        let z = al.fresh_pair("Z", Kind::Variable);
        let mut opts = Vec::new();
        for &a in &consts {
            opts.push(vec![(u.clone(), [v.as_slice(), &[a, x]].concat())]);
            opts.push(vec![(v.clone(), [u.as_slice(), &[a, x]].concat())]);
        }
        for &a in &consts {
            for &b in &consts {
                if a != b {
                    opts.push(vec![(u.clone(), vec![x, a, y]), (v.clone(), vec![x, b, z])]);
                }
            }
        }
        options.push(opts);
    }
    let base = MonoidSystem {
        inequalities: Vec::new(),
        ..sys.clone()
    };
    let radices = options.iter().map(|o| o.len()).collect();
    Ok(Box::new(odometer(radices).map(move |digits| {
        let mut s = base.clone();
        for (i, &d) in digits.iter().enumerate() {
            s.equations.extend(options[i][d].iter().cloned());
        }
        s
    })))
}

/// How membership constraints reach the solver.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConstraintMode {
    /// Memberships stay acceptance checks on candidate solutions.
    Residual,
    /// Memberships are folded into guesses of `rho`.
    Folded,
}

/// Output of [`combine_to_single_equation`].
#[derive(Clone, Debug)]
pub struct Compiled {
    /// The equation in residual form: `rho` is empty and every membership
    /// is an acceptance pair.
    pub equation: Equation,
    /// Variables absent from the sides, with a witness value.
    pub cancelled: Vec<(Sym, Word)>,
    pub separator: Sym,
}

/// Join the equations with a fresh separator, add `X in Gamma*` for every
/// variable, compile the memberships into `h` and cancel variables that do
/// not occur in the sides. `None` when a cancelled variable has no value.
pub fn combine_to_single_equation(
    al: &mut Alphabet,
    sys: &MonoidSystem,
    budget: usize,
) -> Result<Option<Compiled>> {
    if !sys.inequalities.is_empty() {
        return Err(Error::contract("eliminate monoid inequalities first"));
    }
    let mut gstar = Nfa::new(1);
    gstar.set_initial(0);
    gstar.set_final(0);
    for c in al.constants() {
        gstar.add_transition(0, Some(c), 0);
    }
    let sep = al.fresh_pair("sep", Kind::Constant);
    let mut lhs = Vec::new();
    let mut rhs = Vec::new();
    for (i, (u, v)) in sys.equations.iter().enumerate() {
        if i > 0 {
            lhs.push(sep);
            rhs.push(sep);
        }
        lhs.extend_from_slice(u);
        rhs.extend_from_slice(v);
    }
    let mut automata = vec![gstar];
    automata.extend(sys.automata.iter().cloned());
    let (h, vecs, _) = hom_from_automata(al, &automata);

    let vars = sys.variables(al);
    let mut pairs: Vec<AcceptancePair> = Vec::new();
    for &x in &vars {
        pairs.push(AcceptancePair {
            var: x,
            vectors: vecs[0].clone(),
            positive: true,
        });
    }
    for m in &sys.memberships {
        pairs.push(AcceptancePair {
            var: m.var,
            vectors: vecs[m.automaton + 1].clone(),
            positive: m.positive,
        });
    }

    let in_sides: BTreeSet<Sym> = lhs
        .iter()
        .chain(&rhs)
        .copied()
        .filter(|&s| al.is_var(s))
        .flat_map(|s| [s, al.bar(s)])
        .collect();
    let mut cancelled = Vec::new();
    let absent: Vec<Sym> = vars
        .iter()
        .copied()
        .filter(|&x| !in_sides.contains(&x) && x <= al.bar(x))
        .collect();
    if !absent.is_empty() {
        let reach = Reach::explore(&h, budget)?;
        for x in absent {
            let xb = al.bar(x);
            let ok = |m: &MonElem| {
                let mb = m.involute();
                pairs
                    .iter()
                    .all(|p| (p.var != x || p.holds(m)) && (p.var != xb || p.holds(&mb)))
            };
            let Some(m) = reach.elems().iter().find(|m| ok(m)) else {
                return Ok(None);
            };
            cancelled.push((x, reach.witness(m).expect("reachable")));
        }
        pairs.retain(|p| in_sides.contains(&p.var));
    }

    let syms = Arc::new(al.clone());
    let equation = Equation {
        gamma: al.constants().into_iter().collect(),
        omega: in_sides,
        h,
        rho: BTreeMap::new(),
        lhs: ExpExpr::lit(lhs),
        rhs: ExpExpr::lit(rhs),
        residual: pairs,
        syms,
    };
    equation.validate()?;
    Ok(Some(Compiled {
        equation,
        cancelled,
        separator: sep,
    }))
}

/// Candidate values of `rho` per pair representative: reachable elements
/// on which every acceptance pair of `X` and of `X'` holds.
pub fn rho_candidates(e: &Equation, budget: usize) -> Result<Vec<(Sym, Vec<MonElem>)>> {
    let reach = Reach::explore_letters(&e.h, &e.gamma.iter().copied().collect::<Vec<_>>(), budget)?;
    let al = &e.syms;
    let mut out = Vec::new();
    for x in e.representatives() {
        let xb = al.bar(x);
        let cands = reach
            .elems()
            .iter()
            .filter(|m| {
                let mb = m.involute();
                e.residual
                    .iter()
                    .all(|p| (p.var != x || p.holds(m)) && (p.var != xb || p.holds(&mb)))
            })
            .cloned()
            .collect();
        out.push((x, cands));
    }
    Ok(out)
}

/// The folded equations: one per combination of candidates, produced
/// lazily, with the acceptance pairs removed.
pub fn folded_equations(e: &Equation, budget: usize) -> Result<impl Iterator<Item = Equation>> {
    let cands = rho_candidates(e, budget)?;
    let radices = cands.iter().map(|(_, c)| c.len()).collect();
    let base = Equation {
        residual: Vec::new(),
        rho: BTreeMap::new(),
        ..e.clone()
    };
    Ok(odometer(radices).map(move |digits| {
        let mut f = base.clone();
        for (i, &d) in digits.iter().enumerate() {
            let (x, c) = &cands[i];
            f.rho.insert(f.syms.bar(*x), c[d].involute());
            f.rho.insert(*x, c[d].clone());
        }
        f
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn abxy() -> Alphabet {
        let mut al = Alphabet::constants_from(&["a", "b"], &[]).unwrap();
        al.add_pair("X", Kind::Variable).unwrap();
        al.add_pair("Y", Kind::Variable).unwrap();
        al
    }

    #[test]
    fn de_morgan() {
        let al = abxy();
        let f = Formula::parse(&al, "(not (and (eq X) (not (in Y P))))").unwrap();
        assert_eq!(normalize(&f).render(&al), "(or (neq X) (in Y P))");
        let g = Formula::parse(&al, "(not (not (eq a)))").unwrap();
        assert_eq!(normalize(&g).render(&al), "(eq a)");
    }

    #[test]
    fn branches() {
        let al = abxy();
        let f = Formula::parse(&al, "(and (or (eq a) (eq b)) (or (eq X) (eq Y)))").unwrap();
        assert_eq!(DisjunctStream::new(&f).count(), 4);
        let g = Formula::parse(&al, "(and (eq a) (eq b))").unwrap();
        assert_eq!(DisjunctStream::new(&g).count(), 1);
        let h = Formula::parse(&al, "(or)").unwrap();
        assert_eq!(DisjunctStream::new(&h).count(), 0);
        let nested = Formula::parse(&al, "(or (and (or (eq a) (eq b) (eq X))) (eq Y))").unwrap();
        let all: Vec<_> = DisjunctStream::new(&nested).collect();
        assert_eq!(all.len(), 4);
    }

    #[test]
    fn triangles() {
        let mut al = abxy();
        let w = al.parse_word("a X b Y a").unwrap();
        let a = al.parse_word("a").unwrap();
        let t = triangulate(&mut al, &[Atom::Eq(w), Atom::Eq(a)]).unwrap();
        assert!(t.iter().all(|a| matches!(a, Atom::Eq(w) if w.len() == 3)));
        assert_eq!(t.len(), 4);
        let Atom::Eq(last) = &t[3] else {
            unreachable!()
        };
        assert_eq!(al.render(last), "a a a'");
    }

    #[test]
    fn monoid_inequalities_need_two_letters() {
        let mut al = Alphabet::constants_from(&[], &["e"]).unwrap();
        let sys = MonoidSystem {
            inequalities: vec![(vec![0], vec![])],
            ..Default::default()
        };
        assert!(eliminate_monoid_inequalities(&mut al, &sys).is_err());
        let mut al = abxy();
        let a = al.lookup("a").unwrap();
        let b = al.lookup("b").unwrap();
        let sys = MonoidSystem {
            inequalities: vec![(vec![a], vec![b])],
            ..Default::default()
        };
        // 2|Gamma| one-sided options plus |Gamma|(|Gamma|-1) split options.
        assert_eq!(
            eliminate_monoid_inequalities(&mut al, &sys)
                .unwrap()
                .count(),
            8 + 12
        );
    }
}
