//! Existential formulas over a free group with rational constraints.

use std::collections::BTreeMap;

use crate::automata::Nfa;
use crate::error::{Error, Result};
use crate::words::{Alphabet, Sym, Word};

/// Every variable of the alphabet is existentially quantified.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Formula {
    /// `W = 1` in the free group.
    Eq(Word),
    Neq(Word),
    /// `X in P`, with `P` named in the automaton table.
    In(Sym, String),
    NotIn(Sym, String),
    Not(Box<Formula>),
    And(Vec<Formula>),
    Or(Vec<Formula>),
}

#[derive(Clone, Debug)]
pub struct GroupProblem {
    pub syms: Alphabet,
    pub automata: BTreeMap<String, Nfa>,
    pub formula: Formula,
}

impl Formula {
    /// Evaluate under a group assignment. `sigma` maps variables to words
    /// over the constants; membership is decided on reduced words with the
    /// saturated automata.
    pub fn eval_group(
        &self,
        al: &Alphabet,
        saturated: &BTreeMap<String, Nfa>,
        sigma: &dyn Fn(Sym) -> Word,
    ) -> Result<bool> {
        let subst = |w: &[Sym]| -> Word {
            w.iter()
                .flat_map(|&s| if al.is_var(s) { sigma(s) } else { vec![s] })
                .collect()
        };
        let member = |x: Sym, p: &str| -> Result<bool> {
            let a = saturated
                .get(p)
                .ok_or_else(|| Error::contract(format!("unknown automaton {p:?}")))?;
            Ok(a.accepts(&al.free_reduce(&subst(&[x]))))
        };
        Ok(match self {
            Formula::Eq(w) => al.free_reduce(&subst(w)).is_empty(),
            Formula::Neq(w) => !al.free_reduce(&subst(w)).is_empty(),
            Formula::In(x, p) => member(*x, p)?,
            Formula::NotIn(x, p) => !member(*x, p)?,
            Formula::Not(f) => !f.eval_group(al, saturated, sigma)?,
            Formula::And(fs) => {
                for f in fs {
                    if !f.eval_group(al, saturated, sigma)? {
                        return Ok(false);
                    }
                }
                true
            }
            Formula::Or(fs) => {
                for f in fs {
                    if f.eval_group(al, saturated, sigma)? {
                        return Ok(true);
                    }
                }
                false
            }
        })
    }

    /// Variables mentioned anywhere, without partners.
    pub fn variables(&self, al: &Alphabet) -> Vec<Sym> {
        let mut out = Vec::new();
        self.collect_vars(al, &mut out);
        out.sort();
        out.dedup();
        out
    }

    fn collect_vars(&self, al: &Alphabet, out: &mut Vec<Sym>) {
        match self {
            Formula::Eq(w) | Formula::Neq(w) => {
                out.extend(w.iter().copied().filter(|&s| al.is_var(s)))
            }
            Formula::In(x, _) | Formula::NotIn(x, _) => out.push(*x),
            Formula::Not(f) => f.collect_vars(al, out),
            Formula::And(fs) | Formula::Or(fs) => fs.iter().for_each(|f| f.collect_vars(al, out)),
        }
    }

    pub fn render(&self, al: &Alphabet) -> String {
        match self {
            Formula::Eq(w) => format!("(eq {})", al.render(w)),
            Formula::Neq(w) => format!("(neq {})", al.render(w)),
            Formula::In(x, p) => format!("(in {} {p})", al.name(*x)),
            Formula::NotIn(x, p) => format!("(notin {} {p})", al.name(*x)),
            Formula::Not(f) => format!("(not {})", f.render(al)),
            Formula::And(fs) => format!(
                "(and {})",
                fs.iter()
                    .map(|f| f.render(al))
                    .collect::<Vec<_>>()
                    .join(" ")
            ),
            Formula::Or(fs) => format!(
                "(or {})",
                fs.iter()
                    .map(|f| f.render(al))
                    .collect::<Vec<_>>()
                    .join(" ")
            ),
        }
    }

    /// Parse `(eq W)`, `(neq W)`, `(in X P)`, `(notin X P)`, `(not F)`,
    /// `(and F..)`, `(or F..)`.
    pub fn parse(al: &Alphabet, text: &str) -> Result<Formula> {
        let spaced = text.replace('(', " ( ").replace(')', " ) ");
        let toks: Vec<&str> = spaced.split_whitespace().collect();
        let mut pos = 0;
        let f = parse_formula(al, &toks, &mut pos)?;
        if pos != toks.len() {
            return Err(Error::parse(0, "trailing input after the formula"));
        }
        Ok(f)
    }
}

fn expect(toks: &[&str], pos: &mut usize, t: &str) -> Result<()> {
    if toks.get(*pos) == Some(&t) {
        *pos += 1;
        Ok(())
    } else {
        Err(Error::parse(
            0,
            format!("expected {t:?}, found {:?}", toks.get(*pos)),
        ))
    }
}

fn parse_formula(al: &Alphabet, toks: &[&str], pos: &mut usize) -> Result<Formula> {
    expect(toks, pos, "(")?;
    let head = *toks
        .get(*pos)
        .ok_or_else(|| Error::parse(0, "unexpected end of formula"))?;
    *pos += 1;
    let f = match head {
        "eq" | "neq" => {
            let mut w = Vec::new();
            while *pos < toks.len() && toks[*pos] != ")" {
                w.extend(al.parse_word(toks[*pos])?);
                *pos += 1;
            }
            if head == "eq" {
                Formula::Eq(w)
            } else {
                Formula::Neq(w)
            }
        }
        "in" | "notin" => {
            let x = toks
                .get(*pos)
                .and_then(|t| al.lookup(t))
                .filter(|&s| al.is_var(s));
            let x = x.ok_or_else(|| Error::parse(0, "membership needs a variable"))?;
            let p = toks
                .get(*pos + 1)
                .ok_or_else(|| Error::parse(0, "membership needs an automaton name"))?;
            *pos += 2;
            if head == "in" {
                Formula::In(x, p.to_string())
            } else {
                Formula::NotIn(x, p.to_string())
            }
        }
        "not" => Formula::Not(Box::new(parse_formula(al, toks, pos)?)),
        "and" | "or" => {
            let mut fs = Vec::new();
            while toks.get(*pos) == Some(&"(") {
                fs.push(parse_formula(al, toks, pos)?);
            }
            if head == "and" {
                Formula::And(fs)
            } else {
                Formula::Or(fs)
            }
        }
        other => return Err(Error::parse(0, format!("unknown connective {other:?}"))),
    };
    expect(toks, pos, ")")?;
    Ok(f)
}
