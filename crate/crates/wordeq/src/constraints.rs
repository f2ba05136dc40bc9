//! The Boolean matrix monoid with involution, the constraint homomorphism
//! `h`, acceptance vectors and the reachable-submonoid searches.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::fmt;

use crate::automata::Nfa;
use crate::error::{Error, Result};
use crate::words::{Alphabet, Sym, Word};

/// Default bound on the size of an explored reachable submonoid.
pub const DEFAULT_REACH_BUDGET: usize = 1_000_000;

/// Square Boolean matrix, one bitset per row.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BoolMat {
    n: usize,
    wpr: usize,
    bits: Vec<u64>,
}

impl BoolMat {
    pub fn zero(n: usize) -> Self {
        let wpr = n.div_ceil(64).max(1);
        BoolMat {
            n,
            wpr,
            bits: vec![0; n * wpr],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.bits[i * self.wpr + j / 64] >> (j % 64) & 1 == 1
    }

    pub fn set(&mut self, i: usize, j: usize, v: bool) {
        let w = &mut self.bits[i * self.wpr + j / 64];
        if v {
            *w |= 1 << (j % 64);
        } else {
            *w &= !(1 << (j % 64));
        }
    }

    fn row(&self, i: usize) -> &[u64] {
        &self.bits[i * self.wpr..(i + 1) * self.wpr]
    }

    pub fn mul(&self, other: &BoolMat) -> BoolMat {
        assert_eq!(self.n, other.n, "dimension mismatch");
        let mut out = BoolMat::zero(self.n);
        for i in 0..self.n {
            for k in 0..self.n {
                if self.get(i, k) {
                    let (src, dst) = (other.row(k), i * self.wpr);
                    for (w, s) in src.iter().enumerate() {
                        out.bits[dst + w] |= s;
                    }
                }
            }
        }
        out
    }

    pub fn transpose(&self) -> BoolMat {
        let mut out = BoolMat::zero(self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                if self.get(i, j) {
                    out.set(j, i, true);
                }
            }
        }
        out
    }
}

impl fmt::Debug for BoolMat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.n {
            let row: String = (0..self.n)
                .map(|j| if self.get(i, j) { '1' } else { '0' })
                .collect();
            writeln!(f, "{row}")?;
        }
        Ok(())
    }
}

/// `diag(A, B)` in `B^{2n x 2n}`. The involution maps it to
/// `diag(B^T, A^T)`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MonElem {
    pub a: BoolMat,
    pub b: BoolMat,
}

impl MonElem {
    pub fn unit(n: usize) -> Self {
        MonElem {
            a: BoolMat::identity(n),
            b: BoolMat::identity(n),
        }
    }

    pub fn dim(&self) -> usize {
        self.a.dim()
    }

    pub fn mul(&self, other: &MonElem) -> MonElem {
        MonElem {
            a: self.a.mul(&other.a),
            b: self.b.mul(&other.b),
        }
    }

    pub fn involute(&self) -> MonElem {
        MonElem {
            a: self.b.transpose(),
            b: self.a.transpose(),
        }
    }

    pub fn pow(&self, mut k: u64) -> MonElem {
        let mut acc = MonElem::unit(self.dim());
        let mut base = self.clone();
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&base);
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Entry of the full `2n x 2n` matrix.
    pub fn entry(&self, i: usize, j: usize) -> bool {
        let n = self.dim();
        match (i < n, j < n) {
            (true, true) => self.a.get(i, j),
            (false, false) => self.b.get(i - n, j - n),
            _ => false,
        }
    }
}

impl fmt::Debug for MonElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = 2 * self.dim();
        for i in 0..n {
            let row: String = (0..n)
                .map(|j| if self.entry(i, j) { '1' } else { '0' })
                .collect();
            writeln!(f, "{row}")?;
        }
        Ok(())
    }
}

/// `h: Gamma -> M`, given on letters.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConstraintHom {
    n: usize,
    images: BTreeMap<Sym, MonElem>,
}

impl ConstraintHom {
    pub fn new(n: usize) -> Self {
        ConstraintHom {
            n,
            images: BTreeMap::new(),
        }
    }

    /// One-state system in which every constant maps to the unit.
    pub fn trivial(al: &Alphabet) -> Self {
        let mut h = ConstraintHom::new(1);
        for c in al.constants() {
            h.insert(c, MonElem::unit(1));
        }
        h
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn insert(&mut self, a: Sym, m: MonElem) {
        assert_eq!(m.dim(), self.n, "dimension mismatch");
        self.images.insert(a, m);
    }

    pub fn image(&self, a: Sym) -> Option<&MonElem> {
        self.images.get(&a)
    }

    pub fn letters(&self) -> impl Iterator<Item = Sym> + '_ {
        self.images.keys().copied()
    }

    pub fn unit(&self) -> MonElem {
        MonElem::unit(self.n)
    }

    /// Product of letter images; the empty word maps to the unit.
    pub fn hom_image(&self, w: &[Sym]) -> Result<MonElem> {
        let mut acc = self.unit();
        for &a in w {
            let m = self
                .image(a)
                .ok_or_else(|| Error::contract(format!("letter {a} has no image under h")))?;
            acc = acc.mul(m);
        }
        Ok(acc)
    }

    /// `h(a') = involute(h(a))` for every letter with an image.
    pub fn is_involution_compatible(&self, al: &Alphabet) -> bool {
        self.images
            .iter()
            .all(|(&a, m)| self.image(al.bar(a)).is_some_and(|mb| *mb == m.involute()))
    }
}

/// Initial and final vectors of one automaton inside the combined state
/// space. Both live in the first diagonal block.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AcceptanceVectors {
    pub initial: Vec<bool>,
    pub finals: Vec<bool>,
}

impl AcceptanceVectors {
    /// `I^T m F`.
    pub fn accepts(&self, m: &MonElem) -> bool {
        let n = m.dim();
        (0..n).any(|i| self.initial[i] && (0..n).any(|j| self.finals[j] && m.a.get(i, j)))
    }
}

/// A membership `X in P` (positive) or `X notin P` (negative).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AcceptancePair {
    pub var: Sym,
    pub vectors: AcceptanceVectors,
    pub positive: bool,
}

impl AcceptancePair {
    pub fn holds(&self, m: &MonElem) -> bool {
        self.vectors.accepts(m) == self.positive
    }
}

/// Combine the automata into one homomorphism over the constants of `al`.
/// The state spaces are laid side by side; `n` is the total state count.
pub fn hom_from_automata(
    al: &Alphabet,
    automata: &[Nfa],
) -> (ConstraintHom, Vec<AcceptanceVectors>, usize) {
    let free: Vec<Nfa> = automata.iter().map(|a| a.remove_epsilon()).collect();
    let n: usize = free.iter().map(|a| a.states()).sum::<usize>().max(1);
    let mut g: HashMap<Sym, BoolMat> = al
        .constants()
        .into_iter()
        .map(|c| (c, BoolMat::zero(n)))
        .collect();
    let mut vecs = Vec::new();
    let mut off = 0;
    for a in &free {
        let mut iv = vec![false; n];
        let mut fv = vec![false; n];
        for p in 0..a.states() {
            iv[off + p] = a.is_initial(p);
            fv[off + p] = a.is_final(p);
        }
        for &(p, x, q) in a.transitions() {
            if let Some(x) = x {
                if let Some(m) = g.get_mut(&x) {
                    m.set(off + p, off + q, true);
                }
            }
        }
        vecs.push(AcceptanceVectors {
            initial: iv,
            finals: fv,
        });
        off += a.states();
    }
    let mut h = ConstraintHom::new(n);
    for c in al.constants() {
        let m = MonElem {
            a: g[&c].clone(),
            b: g[&al.bar(c)].transpose(),
        };
        h.insert(c, m);
    }
    (h, vecs, n)
}

/// The submonoid generated by the letter images, explored breadth first
/// from the unit. Keeps a shortest witness word per element.
#[derive(Clone, Debug)]
pub struct Reach {
    elems: Vec<MonElem>,
    index: HashMap<MonElem, usize>,
    parent: Vec<Option<(usize, Sym)>>,
}

impl Reach {
    pub fn explore(h: &ConstraintHom, budget: usize) -> Result<Reach> {
        Self::explore_letters(h, &h.letters().collect::<Vec<_>>(), budget)
    }

    pub fn explore_letters(h: &ConstraintHom, letters: &[Sym], budget: usize) -> Result<Reach> {
        let unit = h.unit();
        let mut r = Reach {
            elems: vec![unit.clone()],
            index: HashMap::from([(unit, 0)]),
            parent: vec![None],
        };
        let mut queue = VecDeque::from([0usize]);
        while let Some(i) = queue.pop_front() {
            for &a in letters {
                let Some(g) = h.image(a) else { continue };
                let m = r.elems[i].mul(g);
                if r.index.contains_key(&m) {
                    continue;
                }
                if r.elems.len() >= budget {
                    return Err(Error::resource(
                        "reachable submonoid",
                        format!("more than {budget} elements"),
                    ));
                }
                let j = r.elems.len();
                r.index.insert(m.clone(), j);
                r.elems.push(m);
                r.parent.push(Some((i, a)));
                queue.push_back(j);
            }
        }
        Ok(r)
    }

    pub fn len(&self) -> usize {
        self.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elems.is_empty()
    }

    pub fn elems(&self) -> &[MonElem] {
        &self.elems
    }

    pub fn contains(&self, m: &MonElem) -> bool {
        self.index.contains_key(m)
    }

    /// Shortest word mapping to `m`.
    pub fn witness(&self, m: &MonElem) -> Option<Word> {
        let mut i = *self.index.get(m)?;
        let mut w = Vec::new();
        while let Some((p, a)) = self.parent[i] {
            w.push(a);
            i = p;
        }
        w.reverse();
        Some(w)
    }
}

/// Some shortest `w` with `h(w) = target`.
pub fn exists_word_with_image(
    h: &ConstraintHom,
    target: &MonElem,
    budget: usize,
) -> Result<Option<Word>> {
    Ok(Reach::explore(h, budget)?.witness(target))
}

/// Some `w = u a u'` with `a` empty or an involution fixed point and
/// `h(w) = target`.
pub fn exists_selfinvolutive_word_with_image(
    al: &Alphabet,
    h: &ConstraintHom,
    target: &MonElem,
    budget: usize,
) -> Result<Option<Word>> {
    let reach = Reach::explore(h, budget)?;
    Ok(selfinvolutive_witness(al, h, &reach, target))
}

pub fn selfinvolutive_witness(
    al: &Alphabet,
    h: &ConstraintHom,
    reach: &Reach,
    target: &MonElem,
) -> Option<Word> {
    let mut mids: Vec<(Option<Sym>, MonElem)> = vec![(None, h.unit())];
    for a in h.letters() {
        if al.is_fixed(a) {
            mids.push((Some(a), h.image(a).cloned().expect("letter has an image")));
        }
    }
    for b in reach.elems() {
        let binv = b.involute();
        for (a, ha) in &mids {
            if b.mul(ha).mul(&binv) == *target {
                let u = reach.witness(b).expect("element is reachable");
                let mut w = u.clone();
                w.extend(a.iter().copied());
                w.extend(al.involute(&u));
                return Some(w);
            }
        }
    }
    None
}

/// The exponent `c` with `s^c = s^{2c}` for every `s` in `M`: `n!`, and 3
/// for `n = 1`. Rounding `2! = 2` up to 3 would break it for elements of
/// order 2.
pub fn idempotent_exponent(n: usize) -> Result<u64> {
    if n == 0 {
        return Err(Error::contract("n must be positive"));
    }
    if n > 20 {
        return Err(Error::OutOfRange(format!(
            "{n}! does not fit the configured cap"
        )));
    }
    if n == 1 {
        return Ok(3);
    }
    Ok((1..=n as u64).product())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one_state_all(al: &Alphabet) -> Nfa {
        Nfa::universal(al)
    }

    #[test]
    fn universal_membership() {
        let al = Alphabet::constants_from(&["a"], &[]).unwrap();
        let (h, v, n) = hom_from_automata(&al, &[one_state_all(&al)]);
        assert_eq!(n, 1);
        for w in ["", "a", "a' a a"] {
            let m = h.hom_image(&al.parse_word(w).unwrap()).unwrap();
            assert!(v[0].accepts(&m));
        }
        assert!(h.is_involution_compatible(&al));
    }

    #[test]
    fn exponent_values() {
        assert_eq!(idempotent_exponent(1).unwrap(), 3);
        assert_eq!(idempotent_exponent(2).unwrap(), 2);
        assert_eq!(idempotent_exponent(3).unwrap(), 6);
        assert!(idempotent_exponent(21).is_err());
    }

    #[test]
    fn witnesses() {
        let al = Alphabet::constants_from(&["a", "b"], &[]).unwrap();
        let a = al.lookup("a").unwrap();
        let mut nfa = Nfa::new(2);
        nfa.set_initial(0);
        nfa.set_final(1);
        nfa.add_transition(0, Some(a), 1);
        let (h, _, _) = hom_from_automata(&al, &[nfa]);
        let w = exists_word_with_image(&h, &h.unit(), 1000)
            .unwrap()
            .unwrap();
        assert!(w.is_empty());
        let ha = h.image(a).unwrap().clone();
        assert_eq!(
            h.hom_image(&exists_word_with_image(&h, &ha, 1000).unwrap().unwrap())
                .unwrap(),
            ha
        );
        let w = exists_selfinvolutive_word_with_image(&al, &h, &h.unit(), 1000)
            .unwrap()
            .unwrap();
        assert_eq!(w, al.involute(&w));
    }

    #[test]
    fn wide_matrices() {
        let mut m = BoolMat::zero(70);
        m.set(3, 69, true);
        m.set(69, 1, true);
        let p = m.mul(&m);
        assert!(p.get(3, 1));
        assert!(m.transpose().get(69, 3));
    }
}
