//! Text formats for formulas, equations and certificates.
//!
//! All three are line based; `#` starts a comment. Alphabet lines:
//!
//! ```text
//! constants a b        # pairs a/a', b/b'
//! fixed e              # involution fixed points
//! variables X Y        # pairs X/X', Y/Y'
//! pair n m constant    # a pair with explicit names
//! ```
//!
//! Automata are given between `automaton NAME` and `end` in the syntax of
//! [`Nfa::parse`]. A formula file ends with `formula`, followed by the
//! formula itself (it may span several lines). An equation file has one
//! `equation L = R` line and optionally `constrain X P` or
//! `constrain X not P`; the explicit constraint form written by the
//! renderer uses `dim`, `image`, `check`, `rho`, `gamma` and `omega`.
//! A certificate is an equation file followed by `solution` lines and
//! `arc ... end` blocks.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::sync::Arc as Shared;

use crate::automata::Nfa;
use crate::constraints::{
    hom_from_automata, AcceptancePair, AcceptanceVectors, BoolMat, ConstraintHom, MonElem,
};
use crate::engine::moves::{
    apply_partial_solution, apply_projection, pull_back_path, Arc, BaseChange, Delta,
    PartialSolution, Projection,
};
use crate::error::{Error, Result};
use crate::expressions::ExpExpr;
use crate::frontend::{Equation, Formula, GroupProblem, Solution};
use crate::words::{Alphabet, Kind, Sym};

fn strip(line: &str) -> &str {
    line.split('#').next().unwrap_or("").trim()
}

fn bits(v: &[bool]) -> String {
    v.iter().map(|&b| if b { '1' } else { '0' }).collect()
}

fn parse_bits(ln: usize, s: &str) -> Result<Vec<bool>> {
    s.chars()
        .map(|c| match c {
            '0' => Ok(false),
            '1' => Ok(true),
            _ => Err(Error::parse(ln, format!("bad bit {c:?}"))),
        })
        .collect()
}

fn render_mat(m: &BoolMat) -> String {
    let n = m.dim();
    (0..n)
        .map(|i| bits(&(0..n).map(|j| m.get(i, j)).collect::<Vec<_>>()))
        .collect::<Vec<_>>()
        .join("/")
}

fn parse_mat(ln: usize, s: &str, n: usize) -> Result<BoolMat> {
    let rows: Vec<&str> = s.split('/').collect();
    if rows.len() != n {
        return Err(Error::parse(ln, format!("expected {n} matrix rows")));
    }
    let mut m = BoolMat::zero(n);
    for (i, r) in rows.iter().enumerate() {
        let b = parse_bits(ln, r)?;
        if b.len() != n {
            return Err(Error::parse(ln, format!("expected {n} matrix columns")));
        }
        for (j, &v) in b.iter().enumerate() {
            m.set(i, j, v);
        }
    }
    Ok(m)
}

/// `A:rows B:rows`.
pub fn render_elem(m: &MonElem) -> String {
    format!("A:{} B:{}", render_mat(&m.a), render_mat(&m.b))
}

fn parse_elem(ln: usize, toks: &[&str], n: usize) -> Result<MonElem> {
    let get = |p: &str| {
        toks.iter()
            .find_map(|t| t.strip_prefix(p))
            .ok_or_else(|| Error::parse(ln, format!("missing {p} block")))
    };
    Ok(MonElem {
        a: parse_mat(ln, get("A:")?, n)?,
        b: parse_mat(ln, get("B:")?, n)?,
    })
}

/// Collected lines of one input, split into sections.
#[derive(Default)]
struct Sections<'a> {
    alphabet: Vec<(usize, &'a str)>,
    automata: Vec<(usize, String, String)>,
    rest: Vec<(usize, &'a str)>,
    formula: Option<String>,
    arcs: Vec<Vec<(usize, &'a str)>>,
}

fn split_sections(text: &str) -> Result<Sections<'_>> {
    let mut s = Sections::default();
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    while let Some((ln, raw)) = lines.next() {
        let line = strip(raw);
        if line.is_empty() {
            continue;
        }
        let head = line.split_whitespace().next().unwrap_or("");
        match head {
            "constants" | "fixed" | "variables" | "pair" => s.alphabet.push((ln, line)),
            "automaton" => {
                let name = line
                    .split_whitespace()
                    .nth(1)
                    .ok_or_else(|| Error::parse(ln, "automaton needs a name"))?;
                let mut body = String::new();
                loop {
                    let (_, l) = lines
                        .next()
                        .ok_or_else(|| Error::parse(ln, "automaton without `end`"))?;
                    if strip(l) == "end" {
                        break;
                    }
                    body.push_str(l);
                    body.push('\n');
                }
                s.automata.push((ln, name.to_string(), body));
            }
            "formula" => {
                let mut f = line["formula".len()..].to_string();
                for (_, l) in lines.by_ref() {
                    f.push(' ');
                    f.push_str(strip(l));
                }
                s.formula = Some(f);
            }
            "arc" => {
                let mut body = Vec::new();
                loop {
                    let (l2, l) = lines
                        .next()
                        .ok_or_else(|| Error::parse(ln, "arc without `end`"))?;
                    let l = strip(l);
                    if l == "end" {
                        break;
                    }
                    if !l.is_empty() {
                        body.push((l2, l));
                    }
                }
                s.arcs.push(body);
            }
            _ => s.rest.push((ln, line)),
        }
    }
    Ok(s)
}

fn build_alphabet(lines: &[(usize, &str)]) -> Result<Alphabet> {
    let mut al = Alphabet::new();
    let wrap = |ln: usize, r: Result<Sym>| r.map_err(|e| Error::parse(ln, e.to_string()));
    for &(ln, line) in lines {
        let toks: Vec<&str> = line.split_whitespace().collect();
        match toks[0] {
            "constants" => {
                for t in &toks[1..] {
                    wrap(ln, al.add_pair(t, Kind::Constant))?;
                }
            }
            "variables" => {
                for t in &toks[1..] {
                    wrap(ln, al.add_pair(t, Kind::Variable))?;
                }
            }
            "fixed" => {
                for t in &toks[1..] {
                    wrap(ln, al.add_fixed(t))?;
                }
            }
            "pair" => {
                let [_, n, m, k] = toks[..] else {
                    return Err(Error::parse(ln, "usage: pair NAME BAR constant|variable"));
                };
                let kind = match k {
                    "constant" => Kind::Constant,
                    "variable" => Kind::Variable,
                    _ => return Err(Error::parse(ln, format!("unknown kind {k:?}"))),
                };
                if n == m {
                    wrap(ln, al.add_fixed(n))?;
                } else {
                    wrap(ln, al.add_pair_named(n, m, kind))?;
                }
            }
            _ => unreachable!(),
        }
    }
    Ok(al)
}

fn build_automata(
    al: &Alphabet,
    list: &[(usize, String, String)],
) -> Result<BTreeMap<String, Nfa>> {
    let mut out = BTreeMap::new();
    for (ln, name, body) in list {
        let a = Nfa::parse(al, body)
            .map_err(|e| Error::parse(*ln, format!("automaton {name}: {e}")))?;
        if out.insert(name.clone(), a).is_some() {
            return Err(Error::parse(*ln, format!("automaton {name} defined twice")));
        }
    }
    Ok(out)
}

/// Parse a formula file.
pub fn parse_problem(text: &str) -> Result<GroupProblem> {
    let s = split_sections(text)?;
    if let Some(&(ln, _)) = s.rest.first() {
        return Err(Error::parse(ln, "unexpected line in a formula file"));
    }
    let syms = build_alphabet(&s.alphabet)?;
    let automata = build_automata(&syms, &s.automata)?;
    let text = s
        .formula
        .ok_or_else(|| Error::parse(0, "missing `formula`"))?;
    let formula = Formula::parse(&syms, &text)?;
    check_automata_refs(&formula, &automata)?;
    Ok(GroupProblem {
        syms,
        automata,
        formula,
    })
}

fn check_automata_refs(f: &Formula, automata: &BTreeMap<String, Nfa>) -> Result<()> {
    match f {
        Formula::In(_, p) | Formula::NotIn(_, p) if !automata.contains_key(p) => {
            Err(Error::parse(0, format!("unknown automaton {p:?}")))
        }
        Formula::Not(g) => check_automata_refs(g, automata),
        Formula::And(fs) | Formula::Or(fs) => {
            fs.iter().try_for_each(|g| check_automata_refs(g, automata))
        }
        _ => Ok(()),
    }
}

/// An equation file, with any solution lines it carries.
#[derive(Clone, Debug)]
pub struct EquationFile {
    pub equation: Equation,
    pub solution: Option<Solution>,
}

fn lookup(al: &Alphabet, ln: usize, name: &str) -> Result<Sym> {
    al.lookup(name)
        .ok_or_else(|| Error::parse(ln, format!("unknown letter {name:?}")))
}

fn parse_solution_line(al: &Alphabet, ln: usize, rest: &str, sol: &mut Solution) -> Result<()> {
    let (x, w) = rest
        .split_once('=')
        .ok_or_else(|| Error::parse(ln, "usage: solution X = w"))?;
    let x = lookup(al, ln, x.trim())?;
    let w = al
        .parse_word(w)
        .map_err(|e| Error::parse(ln, e.to_string()))?;
    sol.set(al, x, w);
    Ok(())
}

fn equation_from(
    al: Shared<Alphabet>,
    s: &Sections<'_>,
    universe_automata: &BTreeMap<String, Nfa>,
) -> Result<EquationFile> {
    let mut eq_line = None;
    let mut constrain = Vec::new();
    let mut dim = None;
    let mut images: BTreeMap<Sym, MonElem> = BTreeMap::new();
    let mut checks = Vec::new();
    let mut rho = BTreeMap::new();
    let mut gamma = None;
    let mut omega = None;
    let mut sol = Solution::new();
    let mut has_sol = false;
    let names = |ln: usize, toks: &[&str]| -> Result<BTreeSet<Sym>> {
        toks.iter().map(|t| lookup(&al, ln, t)).collect()
    };
    for &(ln, line) in &s.rest {
        let toks: Vec<&str> = line.split_whitespace().collect();
        let need_dim = || dim.ok_or_else(|| Error::parse(ln, "`dim` must come first"));
        match toks[0] {
            "equation" => eq_line = Some((ln, line["equation".len()..].to_string())),
            "constrain" => match toks[1..] {
                [x, p] => constrain.push((ln, x, p, true)),
                [x, "not", p] => constrain.push((ln, x, p, false)),
                _ => return Err(Error::parse(ln, "usage: constrain X [not] P")),
            },
            "dim" => {
                dim = Some(
                    toks.get(1)
                        .and_then(|t| t.parse::<usize>().ok())
                        .filter(|&n| n > 0)
                        .ok_or_else(|| Error::parse(ln, "usage: dim n"))?,
                )
            }
            "image" => {
                let a = lookup(&al, ln, toks.get(1).copied().unwrap_or(""))?;
                let m = parse_elem(ln, &toks[2..], need_dim()?)?;
                images.insert(al.bar(a), m.involute());
                images.insert(a, m);
            }
            "check" => {
                let n = need_dim()?;
                let [_, x, pol, i, f] = toks[..] else {
                    return Err(Error::parse(ln, "usage: check X +|- I:bits F:bits"));
                };
                let x = lookup(&al, ln, x)?;
                let positive = match pol {
                    "+" => true,
                    "-" => false,
                    _ => return Err(Error::parse(ln, "polarity must be + or -")),
                };
                let iv = parse_bits(ln, i.strip_prefix("I:").unwrap_or("?"))?;
                let fv = parse_bits(ln, f.strip_prefix("F:").unwrap_or("?"))?;
                if iv.len() != n || fv.len() != n {
                    return Err(Error::parse(ln, "acceptance vectors have the wrong length"));
                }
                checks.push(AcceptancePair {
                    var: x,
                    vectors: AcceptanceVectors {
                        initial: iv,
                        finals: fv,
                    },
                    positive,
                });
            }
            "rho" => {
                let x = lookup(&al, ln, toks.get(1).copied().unwrap_or(""))?;
                let m = parse_elem(ln, &toks[2..], need_dim()?)?;
                rho.insert(al.bar(x), m.involute());
                rho.insert(x, m);
            }
            "gamma" => gamma = Some(names(ln, &toks[1..])?),
            "omega" => omega = Some(names(ln, &toks[1..])?),
            "solution" => {
                has_sol = true;
                parse_solution_line(&al, ln, &line["solution".len()..], &mut sol)?;
            }
            other => return Err(Error::parse(ln, format!("unknown directive {other:?}"))),
        }
    }
    let (ln, text) = eq_line.ok_or_else(|| Error::parse(0, "missing `equation`"))?;
    let mut e = Equation::parse_plain(al.clone(), &text)
        .map_err(|err| Error::parse(ln, err.to_string()))?;
    if let Some(g) = gamma {
        e.gamma = g;
    }
    if let Some(o) = omega {
        e.omega = o;
    }
    if let Some(n) = dim {
        if !constrain.is_empty() {
            return Err(Error::parse(
                0,
                "use either `constrain` or the explicit `dim` form",
            ));
        }
        let mut h = ConstraintHom::new(n);
        for &a in &e.gamma {
            let m = images
                .get(&a)
                .ok_or_else(|| Error::parse(0, format!("no image for {}", al.name(a))))?;
            h.insert(a, m.clone());
        }
        e.h = h;
        e.residual = checks;
        e.rho = rho;
    } else if !constrain.is_empty() {
        let mut names: Vec<&str> = Vec::new();
        for (_, _, p, _) in &constrain {
            if !names.contains(p) {
                names.push(p);
            }
        }
        let mut list = Vec::new();
        for p in &names {
            list.push(
                universe_automata
                    .get(*p)
                    .cloned()
                    .ok_or_else(|| Error::parse(0, format!("unknown automaton {p:?}")))?,
            );
        }
        let consts: Vec<Sym> = e.gamma.iter().copied().collect();
        let (h, vecs, _) = hom_from_automata(&al, &list);
        let mut hr = ConstraintHom::new(h.dim());
        for a in consts {
            hr.insert(a, h.image(a).expect("constant has an image").clone());
        }
        e.h = hr;
        for (ln, x, p, pos) in constrain {
            let x = lookup(&al, ln, x)?;
            let i = names.iter().position(|q| *q == p).expect("listed");
            e.residual.push(AcceptancePair {
                var: x,
                vectors: vecs[i].clone(),
                positive: pos,
            });
        }
    }
    e.validate()?;
    Ok(EquationFile {
        equation: e,
        solution: has_sol.then_some(sol),
    })
}

/// Parse an equation file.
pub fn parse_equation_file(text: &str) -> Result<EquationFile> {
    let s = split_sections(text)?;
    if s.formula.is_some() || !s.arcs.is_empty() {
        return Err(Error::parse(0, "formula or arc blocks in an equation file"));
    }
    let al = Shared::new(build_alphabet(&s.alphabet)?);
    let automata = build_automata(&al, &s.automata)?;
    equation_from(al, &s, &automata)
}

/// All letters of `al` as `pair` and `fixed` lines, in id order.
pub fn render_alphabet(al: &Alphabet) -> String {
    let mut s = String::new();
    for x in al.symbols() {
        let b = al.bar(x);
        if b == x {
            let _ = writeln!(s, "fixed {}", al.name(x));
        } else if x < b {
            let kind = if al.is_var(x) { "variable" } else { "constant" };
            let _ = writeln!(s, "pair {} {} {kind}", al.name(x), al.name(b));
        }
    }
    s
}

fn names(al: &Alphabet, set: &BTreeSet<Sym>) -> String {
    set.iter()
        .map(|&s| al.name(s))
        .collect::<Vec<_>>()
        .join(" ")
}

/// The explicit form of `e`, without alphabet lines.
fn render_equation_body(e: &Equation, al: &Alphabet) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "dim {}", e.dim());
    for &a in &e.gamma {
        if a <= al.bar(a) {
            let _ = writeln!(
                s,
                "image {} {}",
                al.name(a),
                render_elem(e.h.image(a).expect("image exists"))
            );
        }
    }
    let _ = writeln!(s, "gamma {}", names(al, &e.gamma));
    let _ = writeln!(s, "omega {}", names(al, &e.omega));
    for p in &e.residual {
        let pol = if p.positive { "+" } else { "-" };
        let _ = writeln!(
            s,
            "check {} {pol} I:{} F:{}",
            al.name(p.var),
            bits(&p.vectors.initial),
            bits(&p.vectors.finals)
        );
    }
    for (&x, m) in &e.rho {
        if x <= al.bar(x) {
            let _ = writeln!(s, "rho {} {}", al.name(x), render_elem(m));
        }
    }
    let _ = writeln!(s, "equation {} = {}", e.lhs.render(al), e.rhs.render(al));
    s
}

/// A self-contained equation file for `e`.
pub fn render_equation(e: &Equation) -> String {
    format!(
        "{}{}",
        render_alphabet(&e.syms),
        render_equation_body(e, &e.syms)
    )
}

/// A root equation, an optional solution and a path of arcs.
#[derive(Clone, Debug)]
pub struct Certificate {
    pub root: Equation,
    pub solution: Option<Solution>,
    pub arcs: Vec<Arc>,
}

/// Write a certificate. Letters are taken from the widest universe on the
/// path so that ids survive the round trip.
pub fn render_certificate(
    root: &Equation,
    solution: Option<&Solution>,
    arcs: &[Arc],
) -> Result<String> {
    let mut al = root.syms.clone();
    for a in arcs {
        al = crate::engine::moves::wider(&al, &a.target.syms)?;
        al = crate::engine::moves::wider(&al, &a.pi.syms)?;
    }
    let mut s = render_alphabet(&al);
    s.push_str(&render_equation_body(root, &al));
    if let Some(sol) = solution {
        for (x, w) in sol.iter() {
            if x <= al.bar(x) {
                let _ = writeln!(s, "solution {} = {}", al.name(x), al.render(w));
            }
        }
    }
    for a in arcs {
        s.push_str("arc\n");
        for (&c, w) in &a.pi.map {
            let _ = writeln!(s, "pi {} = {}", al.name(c), al.render(w));
        }
        for (&x, d) in &a.delta.map {
            match d {
                Delta::Keep { prefix, suffix } => {
                    let _ = writeln!(
                        s,
                        "delta {} = keep {} | {}",
                        al.name(x),
                        prefix.render(&al),
                        suffix.render(&al)
                    );
                }
                Delta::Drop(w) => {
                    let _ = writeln!(s, "delta {} = drop {}", al.name(x), w.render(&al));
                }
            }
        }
        for (&x, m) in &a.delta.rho {
            if x <= al.bar(x) {
                let _ = writeln!(s, "rho {} {}", al.name(x), render_elem(m));
            }
        }
        for (&b, e) in &a.beta.map {
            let _ = writeln!(s, "beta {} = {}", al.name(b), e.render(&al));
        }
        let _ = writeln!(s, "gamma {}", names(&al, &a.target.gamma));
        let _ = writeln!(
            s,
            "equation {} = {}",
            a.target.lhs.render(&al),
            a.target.rhs.render(&al)
        );
        s.push_str("end\n");
    }
    Ok(s)
}

/// Parse a certificate. Each arc's source is the previous target; the
/// target's `h` is `h beta` and its variables are the kept ones.
pub fn parse_certificate(text: &str, cap: u64) -> Result<Certificate> {
    let s = split_sections(text)?;
    let al = Shared::new(build_alphabet(&s.alphabet)?);
    let automata = build_automata(&al, &s.automata)?;
    let EquationFile {
        equation: root,
        solution,
    } = equation_from(al.clone(), &s, &automata)?;
    let mut arcs = Vec::new();
    let mut source = root.clone();
    for body in &s.arcs {
        let mut pi = BTreeMap::new();
        let mut delta = PartialSolution::default();
        let mut beta = BTreeMap::new();
        let mut gamma = None;
        let mut eq = None;
        let n = source.dim();
        for &(ln, line) in body {
            let toks: Vec<&str> = line.split_whitespace().collect();
            let after_eq = || {
                line.split_once(" = ")
                    .map(|(_, r)| r)
                    .ok_or_else(|| Error::parse(ln, "expected `=`"))
            };
            let pe = |r: Result<ExpExpr>| r.map_err(|e| Error::parse(ln, e.to_string()));
            match toks[0] {
                "pi" => {
                    let c = lookup(&al, ln, toks.get(1).copied().unwrap_or(""))?;
                    pi.insert(
                        c,
                        al.parse_word(after_eq()?)
                            .map_err(|e| Error::parse(ln, e.to_string()))?,
                    );
                }
                "delta" => {
                    let x = lookup(&al, ln, toks.get(1).copied().unwrap_or(""))?;
                    let r = after_eq()?.trim();
                    let d = if let Some(k) = r.strip_prefix("keep") {
                        let (u, v) = k
                            .split_once(" | ")
                            .ok_or_else(|| Error::parse(ln, "usage: keep u | v"))?;
                        Delta::Keep {
                            prefix: pe(ExpExpr::parse(&al, u))?,
                            suffix: pe(ExpExpr::parse(&al, v))?,
                        }
                    } else if let Some(w) = r.strip_prefix("drop") {
                        Delta::Drop(pe(ExpExpr::parse(&al, w))?)
                    } else {
                        return Err(Error::parse(ln, "delta is `keep u | v` or `drop w`"));
                    };
                    delta.map.insert(x, d);
                }
                "rho" => {
                    let x = lookup(&al, ln, toks.get(1).copied().unwrap_or(""))?;
                    let m = parse_elem(ln, &toks[2..], n)?;
                    delta.rho.insert(al.bar(x), m.involute());
                    delta.rho.insert(x, m);
                }
                "beta" => {
                    let b = lookup(&al, ln, toks.get(1).copied().unwrap_or(""))?;
                    beta.insert(b, pe(ExpExpr::parse(&al, after_eq()?))?);
                }
                "gamma" => {
                    gamma = Some(
                        toks[1..]
                            .iter()
                            .map(|t| lookup(&al, ln, t))
                            .collect::<Result<BTreeSet<Sym>>>()?,
                    )
                }
                "equation" => eq = Some((ln, line["equation".len()..].to_string())),
                other => return Err(Error::parse(ln, format!("unknown arc directive {other:?}"))),
            }
        }
        let pi = Projection {
            syms: al.clone(),
            map: pi,
        };
        let projected = apply_projection(&pi, &source)?;
        let mid = apply_partial_solution(&delta, &projected, cap)?;
        let gamma = gamma.ok_or_else(|| Error::parse(0, "arc without `gamma`"))?;
        let beta = BaseChange {
            gamma: mid.gamma.clone(),
            h: mid.h.clone(),
            map: beta,
        };
        let mut h = ConstraintHom::new(n);
        for &a in &gamma {
            h.insert(a, beta.image(a).hom(&mid.h)?);
        }
        let (ln, text) = eq.ok_or_else(|| Error::parse(0, "arc without `equation`"))?;
        let (l, r) = text
            .split_once('=')
            .ok_or_else(|| Error::parse(ln, "expected `L = R`"))?;
        let target = Equation {
            syms: al.clone(),
            gamma,
            omega: mid.omega.clone(),
            h,
            rho: mid.rho.clone(),
            lhs: ExpExpr::parse(&al, l).map_err(|e| Error::parse(ln, e.to_string()))?,
            rhs: ExpExpr::parse(&al, r).map_err(|e| Error::parse(ln, e.to_string()))?,
            residual: Vec::new(),
        };
        arcs.push(Arc {
            source: source.clone(),
            target: target.clone(),
            pi,
            delta,
            beta,
        });
        source = target;
    }
    Ok(Certificate {
        root,
        solution,
        arcs,
    })
}

impl Certificate {
    /// Why the certificate fails, or `None`: every arc verifies, the path
    /// ends in a trivial equation, the pulled back solution solves the
    /// root, and so does the stated solution if there is one.
    pub fn defect(&self, cap: u64) -> Result<Option<String>> {
        for (i, a) in self.arcs.iter().enumerate() {
            if let Some(d) = a.defect(cap)? {
                return Ok(Some(format!("arc {}: {d}", i + 1)));
            }
        }
        let last = self.arcs.last().map(|a| &a.target).unwrap_or(&self.root);
        if !last.is_trivial(cap)? {
            return Ok(Some("the path does not end in a trivial equation".into()));
        }
        let sigma = pull_back_path(&self.arcs, &Solution::new(), cap)?;
        if let Some(d) = self.root.solution_defect(&sigma, cap)? {
            return Ok(Some(format!("pulled back solution: {d}")));
        }
        if let Some(s) = &self.solution {
            if let Some(d) = self.root.solution_defect(s, cap)? {
                return Ok(Some(format!("stated solution: {d}")));
            }
        }
        Ok(None)
    }
}
