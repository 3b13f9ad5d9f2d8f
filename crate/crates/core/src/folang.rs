//! First-order formulas in the language of groups: a small parser, a
//! renderer, and an exhaustive Tarskian evaluator over finite group
//! structures, so definability claims can be stated as text and
//! machine-checked.
//!
//! Grammar (EBNF):
//!
//! ```text
//! formula := quant | bool
//! quant   := ("A" | "E") var "." formula
//! bool    := implication over "&", "|", "->", "!" and parentheses
//! atom    := term "=" term
//! term    := factor {"*" factor}
//! factor  := var | const | "1" | factor "^-1" | "(" term ")"
//! ```
//!
//! Constants are named `c1..ck` (any `c` followed by digits) and are
//! bound at evaluation time. There are no function symbols beyond the
//! group operations; commutators are written out.

use crate::matgroup::{self, Mat};
use crate::rings::RingSpec;
use std::collections::{BTreeMap, HashMap};
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FormulaError {
    #[error("syntax error at offset {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("unbound variable `{0}`")]
    UnboundVariable(String),
    #[error("unknown constant `{0}`")]
    UnknownConstant(String),
    #[error("formula must have exactly one free variable, found {0:?}")]
    NotOneFreeVariable(Vec<String>),
    #[error("structure is not closed under products")]
    NotClosed,
    #[error("structure has no identity element")]
    NoIdentity,
    #[error("element has no inverse in the structure")]
    NoInverse,
}

// ---------------------------------------------------------------------
// Syntax
// ---------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Term {
    Var(String),
    Const(String),
    One,
    Mul(Box<Term>, Box<Term>),
    Inv(Box<Term>),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    Eq(Term, Term),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Forall(String, Box<Formula>),
    Exists(String, Box<Formula>),
}

impl Formula {
    pub fn free_vars(&self) -> Vec<String> {
        let mut bound = Vec::new();
        let mut free = Vec::new();
        fn walk_term(t: &Term, bound: &[String], free: &mut Vec<String>) {
            match t {
                Term::Var(v) => {
                    if !bound.iter().any(|b| b == v) && !free.iter().any(|f| f == v) {
                        free.push(v.clone());
                    }
                }
                Term::Mul(a, b) => {
                    walk_term(a, bound, free);
                    walk_term(b, bound, free);
                }
                Term::Inv(a) => walk_term(a, bound, free),
                Term::Const(_) | Term::One => {}
            }
        }
        fn walk(f: &Formula, bound: &mut Vec<String>, free: &mut Vec<String>) {
            match f {
                Formula::Eq(a, b) => {
                    walk_term(a, bound, free);
                    walk_term(b, bound, free);
                }
                Formula::Not(inner) => walk(inner, bound, free),
                Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                    walk(a, bound, free);
                    walk(b, bound, free);
                }
                Formula::Forall(v, inner) | Formula::Exists(v, inner) => {
                    bound.push(v.clone());
                    walk(inner, bound, free);
                    bound.pop();
                }
            }
        }
        walk(self, &mut bound, &mut free);
        free
    }

    pub fn constants(&self) -> Vec<String> {
        let mut out = Vec::new();
        fn walk_term(t: &Term, out: &mut Vec<String>) {
            match t {
                Term::Const(c) => {
                    if !out.iter().any(|x| x == c) {
                        out.push(c.clone());
                    }
                }
                Term::Mul(a, b) => {
                    walk_term(a, out);
                    walk_term(b, out);
                }
                Term::Inv(a) => walk_term(a, out),
                _ => {}
            }
        }
        fn walk(f: &Formula, out: &mut Vec<String>) {
            match f {
                Formula::Eq(a, b) => {
                    walk_term(a, out);
                    walk_term(b, out);
                }
                Formula::Not(inner) => walk(inner, out),
                Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                    walk(a, out);
                    walk(b, out);
                }
                Formula::Forall(_, inner) | Formula::Exists(_, inner) => walk(inner, out),
            }
        }
        walk(self, &mut out);
        out
    }
}

// rendering is parenthesized enough that parse(render(f)) == f
impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => write!(f, "{v}"),
            Term::Const(c) => write!(f, "{c}"),
            Term::One => write!(f, "1"),
            Term::Mul(a, b) => {
                write!(f, "{a}*")?;
                match **b {
                    Term::Mul(_, _) => write!(f, "({b})"),
                    _ => write!(f, "{b}"),
                }
            }
            Term::Inv(a) => match **a {
                Term::Var(_) | Term::Const(_) | Term::One => write!(f, "{a}^-1"),
                _ => write!(f, "({a})^-1"),
            },
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::Eq(a, b) => write!(f, "{a} = {b}"),
            Formula::Not(inner) => write!(f, "!({inner})"),
            Formula::And(a, b) => write!(f, "({a}) & ({b})"),
            Formula::Or(a, b) => write!(f, "({a}) | ({b})"),
            Formula::Implies(a, b) => write!(f, "({a}) -> ({b})"),
            Formula::Forall(v, inner) => write!(f, "A {v}. {inner}"),
            Formula::Exists(v, inner) => write!(f, "E {v}. {inner}"),
        }
    }
}

// ---------------------------------------------------------------------
// Parser
// ---------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    One,
    Star,
    Eq,
    And,
    Or,
    Implies,
    Not,
    LParen,
    RParen,
    Dot,
    InvPow,
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>, FormulaError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        match c {
            '*' => {
                out.push((Tok::Star, start));
                i += 1;
            }
            '=' => {
                out.push((Tok::Eq, start));
                i += 1;
            }
            '&' => {
                out.push((Tok::And, start));
                i += 1;
            }
            '|' => {
                out.push((Tok::Or, start));
                i += 1;
            }
            '!' => {
                out.push((Tok::Not, start));
                i += 1;
            }
            '(' => {
                out.push((Tok::LParen, start));
                i += 1;
            }
            ')' => {
                out.push((Tok::RParen, start));
                i += 1;
            }
            '.' => {
                out.push((Tok::Dot, start));
                i += 1;
            }
            '-' => {
                if chars.get(i + 1) == Some(&'>') {
                    out.push((Tok::Implies, start));
                    i += 2;
                } else {
                    return Err(FormulaError::Syntax {
                        pos: start,
                        msg: "expected `->`".into(),
                    });
                }
            }
            '^' => {
                if chars.get(i + 1) == Some(&'-') && chars.get(i + 2) == Some(&'1') {
                    out.push((Tok::InvPow, start));
                    i += 3;
                } else {
                    return Err(FormulaError::Syntax {
                        pos: start,
                        msg: "expected `^-1`".into(),
                    });
                }
            }
            '1' => {
                out.push((Tok::One, start));
                i += 1;
            }
            _ if c.is_alphabetic() || c == '_' => {
                let mut word = String::new();
                while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                    word.push(chars[i]);
                    i += 1;
                }
                out.push((Tok::Ident(word), start));
            }
            _ => {
                return Err(FormulaError::Syntax {
                    pos: start,
                    msg: format!("unexpected character `{c}`"),
                })
            }
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn peek_at(&self, offset: usize) -> Option<&Tok> {
        self.toks.get(self.pos + offset).map(|(t, _)| t)
    }

    fn here(&self) -> usize {
        self.toks.get(self.pos).map(|(_, p)| *p).unwrap_or(self.end)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|(t, _)| t.clone());
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<(), FormulaError> {
        if self.peek() == Some(&tok) {
            self.pos += 1;
            Ok(())
        } else {
            Err(FormulaError::Syntax {
                pos: self.here(),
                msg: format!("expected {what}"),
            })
        }
    }

    fn err(&self, msg: &str) -> FormulaError {
        FormulaError::Syntax {
            pos: self.here(),
            msg: msg.to_string(),
        }
    }

    // formula := implication (right-associative ->)
    fn formula(&mut self) -> Result<Formula, FormulaError> {
        let lhs = self.or_level()?;
        if self.peek() == Some(&Tok::Implies) {
            self.pos += 1;
            let rhs = self.formula()?;
            return Ok(Formula::Implies(Box::new(lhs), Box::new(rhs)));
        }
        Ok(lhs)
    }

    fn or_level(&mut self) -> Result<Formula, FormulaError> {
        let mut lhs = self.and_level()?;
        while self.peek() == Some(&Tok::Or) {
            self.pos += 1;
            let rhs = self.and_level()?;
            lhs = Formula::Or(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn and_level(&mut self) -> Result<Formula, FormulaError> {
        let mut lhs = self.unary()?;
        while self.peek() == Some(&Tok::And) {
            self.pos += 1;
            let rhs = self.unary()?;
            lhs = Formula::And(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Formula, FormulaError> {
        match self.peek() {
            Some(Tok::Not) => {
                self.pos += 1;
                let inner = self.unary()?;
                Ok(Formula::Not(Box::new(inner)))
            }
            Some(Tok::Ident(w)) if (w == "A" || w == "E") => {
                // quantifier only when followed by `var .`
                let is_quant = matches!(self.peek_at(1), Some(Tok::Ident(_)))
                    && self.peek_at(2) == Some(&Tok::Dot);
                if is_quant {
                    let quant = w.clone();
                    self.pos += 1;
                    let var = match self.bump() {
                        Some(Tok::Ident(v)) => v,
                        _ => return Err(self.err("expected variable")),
                    };
                    self.expect(Tok::Dot, "`.`")?;
                    let body = self.formula()?;
                    return Ok(if quant == "A" {
                        Formula::Forall(var, Box::new(body))
                    } else {
                        Formula::Exists(var, Box::new(body))
                    });
                }
                self.atom_or_paren()
            }
            _ => self.atom_or_paren(),
        }
    }

    fn atom_or_paren(&mut self) -> Result<Formula, FormulaError> {
        if self.peek() == Some(&Tok::LParen) {
            // try a parenthesized formula; fall back to an atom whose
            // left term begins with `(`
            let save = self.pos;
            self.pos += 1;
            if let Ok(f) = self.formula() {
                if self.peek() == Some(&Tok::RParen) {
                    self.pos += 1;
                    // only accept when the paren group is not the left
                    // side of an atom
                    if self.peek() != Some(&Tok::Eq) {
                        return Ok(f);
                    }
                }
            }
            self.pos = save;
        }
        self.atom()
    }

    fn atom(&mut self) -> Result<Formula, FormulaError> {
        let lhs = self.term()?;
        self.expect(Tok::Eq, "`=`")?;
        let rhs = self.term()?;
        Ok(Formula::Eq(lhs, rhs))
    }

    fn term(&mut self) -> Result<Term, FormulaError> {
        let mut lhs = self.factor()?;
        while self.peek() == Some(&Tok::Star) {
            self.pos += 1;
            let rhs = self.factor()?;
            lhs = Term::Mul(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn factor(&mut self) -> Result<Term, FormulaError> {
        let mut base = match self.peek() {
            Some(Tok::One) => {
                self.pos += 1;
                Term::One
            }
            Some(Tok::Ident(w)) => {
                let w = w.clone();
                self.pos += 1;
                if w.starts_with('c') && w.len() > 1 && w[1..].chars().all(|c| c.is_ascii_digit())
                {
                    Term::Const(w)
                } else {
                    Term::Var(w)
                }
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let t = self.term()?;
                self.expect(Tok::RParen, "`)`")?;
                t
            }
            _ => return Err(self.err("expected a term")),
        };
        while self.peek() == Some(&Tok::InvPow) {
            self.pos += 1;
            base = Term::Inv(Box::new(base));
        }
        Ok(base)
    }
}

/// Parse a formula, or report a syntax error with its character offset.
pub fn parse(text: &str) -> Result<Formula, FormulaError> {
    let toks = lex(text)?;
    let mut p = Parser {
        toks,
        pos: 0,
        end: text.chars().count(),
    };
    let f = p.formula()?;
    if p.pos != p.toks.len() {
        return Err(p.err("trailing input"));
    }
    Ok(f)
}

// ---------------------------------------------------------------------
// Structures and evaluation
// ---------------------------------------------------------------------

/// A finite group structure: an element list with a product (dense table
/// or matrices multiplied on demand), inverses, the identity, and named
/// constant assignments.
pub struct GroupStructure {
    size: usize,
    identity: usize,
    inverse: Vec<usize>,
    consts: BTreeMap<String, usize>,
    source: MulSource,
}

enum MulSource {
    Table(Vec<u32>),
    Matrices {
        spec: RingSpec,
        mats: Vec<Mat>,
        index: HashMap<Mat, usize>,
    },
}

impl GroupStructure {
    /// Structure over an explicit element list of matrices. Inverses and
    /// the identity must exist within the list; products are computed on
    /// demand and a product falling outside the list is an evaluation
    /// error.
    pub fn from_matrices(
        spec: &RingSpec,
        mats: Vec<Mat>,
        consts: BTreeMap<String, Mat>,
    ) -> Result<Self, FormulaError> {
        let index: HashMap<Mat, usize> = mats
            .iter()
            .enumerate()
            .map(|(i, m)| (m.clone(), i))
            .collect();
        let n = mats.first().map(|m| m.n()).ok_or(FormulaError::NoIdentity)?;
        let identity = *index
            .get(&matgroup::identity(spec, n))
            .ok_or(FormulaError::NoIdentity)?;
        let mut inverse = Vec::with_capacity(mats.len());
        for m in &mats {
            let inv = matgroup::mat_inv(spec, m).map_err(|_| FormulaError::NoInverse)?;
            inverse.push(*index.get(&inv).ok_or(FormulaError::NoInverse)?);
        }
        let mut cmap = BTreeMap::new();
        for (name, m) in consts {
            let idx = *index
                .get(&m)
                .ok_or_else(|| FormulaError::UnknownConstant(name.clone()))?;
            cmap.insert(name, idx);
        }
        Ok(GroupStructure {
            size: mats.len(),
            identity,
            inverse,
            consts: cmap,
            source: MulSource::Matrices {
                spec: spec.clone(),
                mats,
                index,
            },
        })
    }

    /// Structure from a dense product table (row-major `size x size`).
    pub fn from_table(
        table: Vec<u32>,
        size: usize,
        identity: usize,
        consts: BTreeMap<String, usize>,
    ) -> Result<Self, FormulaError> {
        if table.len() != size * size || table.iter().any(|&v| v as usize >= size) {
            return Err(FormulaError::NotClosed);
        }
        let mut inverse = vec![usize::MAX; size];
        for x in 0..size {
            for y in 0..size {
                if table[x * size + y] as usize == identity {
                    inverse[x] = y;
                }
            }
        }
        if inverse.contains(&usize::MAX) {
            return Err(FormulaError::NoInverse);
        }
        Ok(GroupStructure {
            size,
            identity,
            inverse,
            consts,
            source: MulSource::Table(table),
        })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn element(&self, idx: usize) -> Option<&Mat> {
        match &self.source {
            MulSource::Matrices { mats, .. } => mats.get(idx),
            MulSource::Table(_) => None,
        }
    }

    pub fn index_of(&self, m: &Mat) -> Option<usize> {
        match &self.source {
            MulSource::Matrices { index, .. } => index.get(m).copied(),
            MulSource::Table(_) => None,
        }
    }

    fn mul(&self, a: usize, b: usize) -> Result<usize, FormulaError> {
        match &self.source {
            MulSource::Table(t) => Ok(t[a * self.size + b] as usize),
            MulSource::Matrices { spec, mats, index } => {
                let prod = matgroup::mat_mul(spec, &mats[a], &mats[b]);
                index.get(&prod).copied().ok_or(FormulaError::NotClosed)
            }
        }
    }

    fn inv(&self, a: usize) -> usize {
        self.inverse[a]
    }

    /// Full closure check over all pairs (quadratic; intended for small
    /// structures in tests).
    pub fn verify_closure(&self) -> Result<(), FormulaError> {
        for a in 0..self.size {
            for b in 0..self.size {
                self.mul(a, b)?;
            }
        }
        Ok(())
    }
}

fn eval_term(
    t: &Term,
    s: &GroupStructure,
    env: &HashMap<String, usize>,
) -> Result<usize, FormulaError> {
    match t {
        Term::Var(v) => env
            .get(v)
            .copied()
            .ok_or_else(|| FormulaError::UnboundVariable(v.clone())),
        Term::Const(c) => s
            .consts
            .get(c)
            .copied()
            .ok_or_else(|| FormulaError::UnknownConstant(c.clone())),
        Term::One => Ok(s.identity),
        Term::Mul(a, b) => {
            let x = eval_term(a, s, env)?;
            let y = eval_term(b, s, env)?;
            s.mul(x, y)
        }
        Term::Inv(a) => Ok(s.inv(eval_term(a, s, env)?)),
    }
}

/// Truth value by exhaustive quantification over the structure. Free
/// variables must be assigned in `env`.
pub fn eval(
    f: &Formula,
    s: &GroupStructure,
    env: &mut HashMap<String, usize>,
) -> Result<bool, FormulaError> {
    match f {
        Formula::Eq(a, b) => Ok(eval_term(a, s, env)? == eval_term(b, s, env)?),
        Formula::Not(inner) => Ok(!eval(inner, s, env)?),
        Formula::And(a, b) => Ok(eval(a, s, env)? && eval(b, s, env)?),
        Formula::Or(a, b) => Ok(eval(a, s, env)? || eval(b, s, env)?),
        Formula::Implies(a, b) => Ok(!eval(a, s, env)? || eval(b, s, env)?),
        Formula::Forall(v, inner) => {
            let saved = env.get(v).copied();
            let mut out = true;
            for idx in 0..s.size() {
                env.insert(v.clone(), idx);
                if !eval(inner, s, env)? {
                    out = false;
                    break;
                }
            }
            restore(env, v, saved);
            Ok(out)
        }
        Formula::Exists(v, inner) => {
            let saved = env.get(v).copied();
            let mut out = false;
            for idx in 0..s.size() {
                env.insert(v.clone(), idx);
                if eval(inner, s, env)? {
                    out = true;
                    break;
                }
            }
            restore(env, v, saved);
            Ok(out)
        }
    }
}

fn restore(env: &mut HashMap<String, usize>, v: &str, saved: Option<usize>) {
    match saved {
        Some(x) => {
            env.insert(v.to_string(), x);
        }
        None => {
            env.remove(v);
        }
    }
}

/// `{g in S : eval(f, S, x := g)}` for a formula with exactly one free
/// variable.
pub fn define_set(f: &Formula, s: &GroupStructure) -> Result<Vec<usize>, FormulaError> {
    let free = f.free_vars();
    if free.len() != 1 {
        return Err(FormulaError::NotOneFreeVariable(free));
    }
    let var = &free[0];
    let mut env = HashMap::new();
    let mut out = Vec::new();
    for idx in 0..s.size() {
        env.insert(var.clone(), idx);
        if eval(f, s, &mut env)? {
            out.push(idx);
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------
// Corpus: executable renderings of the definability formulas
// ---------------------------------------------------------------------

/// Named corpus of formulas exercised by the test suite; each matches a
/// brute-force set computation.
pub fn corpus() -> Vec<(&'static str, String)> {
    vec![
        ("center", center_formula()),
        ("centralizer-of-c1", centralizer_formula()),
        ("zc-of-c1", zc_formula()),
        ("squares", "E y. x = y*y".to_string()),
        (
            "sqrt-derived-width1",
            sqrt_derived_width1_formula(),
        ),
    ]
}

/// `x` commutes with everything.
pub fn center_formula() -> String {
    "A y. x*y = y*x".to_string()
}

/// `x` commutes with the constant `c1`.
pub fn centralizer_formula() -> String {
    "x*c1 = c1*x".to_string()
}

/// `x` lies in the center of the centralizer of `c1`.
pub fn zc_formula() -> String {
    "(x*c1 = c1*x) & (A y. (y*c1 = c1*y) -> x*y = y*x)".to_string()
}

/// Membership in `sqrt(G')` under the width-one hypothesis: `x^2` is a
/// single commutator.
pub fn sqrt_derived_width1_formula() -> String {
    "E u. E v. x*x = u^-1*v^-1*u*v".to_string()
}

/// The conjugation predicate for the dilation subgroup `d_k(R^x) Z(G)`,
/// rendered for rings whose units are exactly `{1, -1}` (so the unit
/// parameters of a transvection constant `c` give `c` or `c^-1`). The
/// `pairs` list names the transvection constants available in the
/// structure, as `(name, i, j)`.
///
/// Over the triangular group only the upper transvections exist as
/// constants, which leaves the action on the lower pairs invisible; the
/// `dilation_consts` (the sign dilations `d_i(-1)`, bound as extra
/// parameters) restore the constraint: commuting with all of them forces
/// the unitriangular component to vanish whenever `2 != 0` in the ring.
pub fn delta_k_formula(
    k: usize,
    pairs: &[(String, usize, usize)],
    dilation_consts: &[String],
) -> String {
    let mut clauses = Vec::new();
    for (name, i, j) in pairs {
        let conj = format!("x^-1*{name}*x");
        if *i != k && *j != k {
            clauses.push(format!("({conj} = {name})"));
        } else {
            clauses.push(format!("(({conj} = {name}) | ({conj} = {name}^-1))"));
        }
    }
    for name in dilation_consts {
        clauses.push(format!("(x*{name} = {name}*x)"));
    }
    clauses.join(" & ")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matgroup::GroupFamily;
    use proptest::prelude::*;

    fn structure(
        spec: &RingSpec,
        n: usize,
        fam: &GroupFamily,
        consts: Vec<(&str, Mat)>,
    ) -> GroupStructure {
        let mats: Vec<Mat> = matgroup::enumerate_group(spec, n, fam).unwrap().collect();
        let consts = consts
            .into_iter()
            .map(|(k, v)| (k.to_string(), v))
            .collect();
        GroupStructure::from_matrices(spec, mats, consts).unwrap()
    }

    #[test]
    fn parse_basic_shapes() {
        let f = parse("A x. x*c1 = c1*x").unwrap();
        assert_eq!(
            f,
            Formula::Forall(
                "x".into(),
                Box::new(Formula::Eq(
                    Term::Mul(
                        Box::new(Term::Var("x".into())),
                        Box::new(Term::Const("c1".into()))
                    ),
                    Term::Mul(
                        Box::new(Term::Const("c1".into())),
                        Box::new(Term::Var("x".into()))
                    ),
                ))
            )
        );
        let f = parse("E y. x = y*y").unwrap();
        assert_eq!(f.free_vars(), vec!["x".to_string()]);
        // connective precedence: -> binds loosest, right-associative
        let f = parse("x = 1 -> y = 1 -> z = 1").unwrap();
        assert!(
            matches!(f, Formula::Implies(_, ref rhs) if matches!(**rhs, Formula::Implies(_, _)))
        );
        // inverse postfix and parenthesized terms
        let f = parse("(x*y)^-1 = y^-1*x^-1").unwrap();
        assert!(matches!(f, Formula::Eq(Term::Inv(_), _)));
    }

    #[test]
    fn parse_errors_carry_positions() {
        let err = parse("A x. (").unwrap_err();
        match err {
            FormulaError::Syntax { pos, .. } => assert!(pos >= 5, "pos was {pos}"),
            other => panic!("expected syntax error, got {other:?}"),
        }
        assert!(parse("").is_err());
        assert!(parse("x = ").is_err());
        assert!(parse("x == y").is_err());
        assert!(parse("x ^ 2 = y").is_err());
    }

    #[test]
    fn render_parse_roundtrip_on_corpus() {
        for (name, text) in corpus() {
            let f = parse(&text).unwrap_or_else(|e| panic!("{name}: {e}"));
            let rendered = f.to_string();
            let back = parse(&rendered).unwrap_or_else(|e| panic!("{name} rendered: {e}"));
            assert_eq!(back, f, "{name}");
        }
        let delta = delta_k_formula(
            2,
            &[
                ("c12".into(), 1, 2),
                ("c13".into(), 1, 3),
                ("c23".into(), 2, 3),
            ],
            &["c4".into(), "c5".into()],
        );
        let f = parse(&delta).unwrap();
        assert_eq!(parse(&f.to_string()).unwrap(), f);
    }

    #[test]
    fn eval_basics() {
        let spec = RingSpec::modular(2).unwrap();
        let s = structure(&spec, 3, &GroupFamily::Ut, vec![]);
        // UT_3(Z/2) is not abelian
        let f = parse("A x. A y. x*y = y*x").unwrap();
        assert!(!eval(&f, &s, &mut HashMap::new()).unwrap());
        // identity axiom holds
        let f = parse("A x. x*1 = x").unwrap();
        assert!(eval(&f, &s, &mut HashMap::new()).unwrap());
        // with x bound to the identity, x commutes with everything
        let f = parse("A y. x*y = y*x").unwrap();
        let mut env = HashMap::new();
        env.insert("x".to_string(), s.identity());
        assert!(eval(&f, &s, &mut env).unwrap());
        // unbound variable is an error
        assert!(matches!(
            eval(&f, &s, &mut HashMap::new()),
            Err(FormulaError::UnboundVariable(_))
        ));
    }

    #[test]
    fn define_set_center_matches_brute_force() {
        let spec = RingSpec::modular(2).unwrap();
        let mats: Vec<Mat> = matgroup::enumerate_group(&spec, 3, &GroupFamily::Sl)
            .unwrap()
            .collect();
        let brute = matgroup::center(&spec, &mats);
        let s = GroupStructure::from_matrices(&spec, mats, BTreeMap::new()).unwrap();
        let f = parse(&center_formula()).unwrap();
        let set = define_set(&f, &s).unwrap();
        assert_eq!(set.len(), 1);
        assert_eq!(set[0], s.identity());
        assert_eq!(brute.len(), 1);
    }

    #[test]
    fn define_set_centralizer_matches_brute_force() {
        let spec = RingSpec::modular(2).unwrap();
        let t = matgroup::transvection(&spec, 3, 1, 3, &spec.one()).unwrap();
        let mats: Vec<Mat> = matgroup::enumerate_group(&spec, 3, &GroupFamily::Sl)
            .unwrap()
            .collect();
        let brute = matgroup::centralizer(&spec, &mats, &t);
        let s = structure(&spec, 3, &GroupFamily::Sl, vec![("c1", t)]);
        let f = parse(&centralizer_formula()).unwrap();
        let set = define_set(&f, &s).unwrap();
        let got: Vec<Mat> = set.iter().map(|&i| s.element(i).unwrap().clone()).collect();
        assert!(matgroup::sets_equal(&got, &brute));
        // and the center-of-centralizer formula matches the library op
        let zc = matgroup::center(&spec, &brute);
        let f = parse(&zc_formula()).unwrap();
        let got: Vec<Mat> = define_set(&f, &s)
            .unwrap()
            .iter()
            .map(|&i| s.element(i).unwrap().clone())
            .collect();
        assert!(matgroup::sets_equal(&got, &zc));
    }

    #[test]
    fn squares_over_cyclic_five() {
        // T_13 over Z/5 is cyclic of order 5: every element is a square
        let spec = RingSpec::modular(5).unwrap();
        let mats = crate::definability::one_param_subgroup(&spec, 3, 1, 3).unwrap();
        let s = GroupStructure::from_matrices(&spec, mats, BTreeMap::new()).unwrap();
        s.verify_closure().unwrap();
        let f = parse("E y. x = y*y").unwrap();
        assert_eq!(define_set(&f, &s).unwrap().len(), 5);
        // tautology defines the whole group
        let f = parse("x = x").unwrap();
        assert_eq!(define_set(&f, &s).unwrap().len(), 5);
    }

    #[test]
    fn delta_k_formula_matches_library_predicate() {
        // over the triangular group: upper transvection constants plus
        // the sign dilations as extra parameters
        let spec = RingSpec::modular(3).unwrap();
        let pairs: Vec<(String, usize, usize)> = crate::matgroup::upper_pairs(3)
            .into_iter()
            .map(|(i, j)| (format!("c{i}{j}"), i, j))
            .collect();
        let mut consts: Vec<(String, Mat)> = pairs
            .iter()
            .map(|(name, i, j)| {
                (
                    name.clone(),
                    matgroup::transvection(&spec, 3, *i, *j, &spec.one()).unwrap(),
                )
            })
            .collect();
        let dil_names: Vec<String> = (1..=3usize).map(|i| format!("c{}", i + 3)).collect();
        for (i, name) in dil_names.iter().enumerate() {
            consts.push((name.clone(), matgroup::dilation_neg(&spec, 3, i + 1)));
        }
        let s = structure(
            &spec,
            3,
            &GroupFamily::T,
            consts.iter().map(|(n, m)| (n.as_str(), m.clone())).collect(),
        );
        for k in 1..=3usize {
            let f = parse(&delta_k_formula(k, &pairs, &dil_names)).unwrap();
            let set = define_set(&f, &s).unwrap();
            let formula_set: Vec<Mat> = set
                .iter()
                .map(|&i| s.element(i).unwrap().clone())
                .collect();
            let mut predicate_set = Vec::new();
            for idx in 0..s.size() {
                let m = s.element(idx).unwrap();
                if crate::definability::delta_k_membership(&spec, m, k).unwrap() {
                    predicate_set.push(m.clone());
                }
            }
            assert!(
                matgroup::sets_equal(&formula_set, &predicate_set),
                "delta_{k} formula disagrees with the predicate over T_3"
            );
        }

        // over GL_3(Z/2) every transvection pair exists as a constant and
        // no dilation parameters are needed
        let spec = RingSpec::modular(2).unwrap();
        let mut pairs = Vec::new();
        let mut consts: Vec<(String, Mat)> = Vec::new();
        for i in 1..=3usize {
            for j in 1..=3usize {
                if i != j {
                    let name = format!("c{i}{j}");
                    pairs.push((name.clone(), i, j));
                    consts.push((
                        name,
                        matgroup::transvection(&spec, 3, i, j, &spec.one()).unwrap(),
                    ));
                }
            }
        }
        let s = structure(
            &spec,
            3,
            &GroupFamily::Gl,
            consts.iter().map(|(n, m)| (n.as_str(), m.clone())).collect(),
        );
        for k in 1..=3usize {
            let f = parse(&delta_k_formula(k, &pairs, &[])).unwrap();
            let set = define_set(&f, &s).unwrap();
            let formula_set: Vec<Mat> = set
                .iter()
                .map(|&i| s.element(i).unwrap().clone())
                .collect();
            let mut predicate_set = Vec::new();
            for idx in 0..s.size() {
                let m = s.element(idx).unwrap();
                if crate::definability::delta_k_membership(&spec, m, k).unwrap() {
                    predicate_set.push(m.clone());
                }
            }
            assert!(
                matgroup::sets_equal(&formula_set, &predicate_set),
                "delta_{k} formula disagrees with the predicate over GL_3"
            );
        }
    }

    #[test]
    fn sqrt_derived_formula_matches_library() {
        // first confirm the width-one hypothesis: every element of G' is
        // a single commutator in T_3(Z/3)
        let spec = RingSpec::modular(3).unwrap();
        let mats: Vec<Mat> = matgroup::enumerate_group(&spec, 3, &GroupFamily::T)
            .unwrap()
            .collect();
        let derived = crate::definability::derived_subgroup(&spec, &mats).unwrap();
        let mut single_commutators: Vec<Mat> = Vec::new();
        for x in &mats {
            for y in &mats {
                single_commutators.push(matgroup::commutator(&spec, x, y).unwrap());
            }
        }
        assert!(
            matgroup::sets_equal(&derived, &single_commutators),
            "commutator width is not 1; the corpus formula would be unsound"
        );

        let sqrt = crate::definability::sqrt_derived(&spec, &mats).unwrap();
        let s = GroupStructure::from_matrices(&spec, mats, BTreeMap::new()).unwrap();
        let f = parse(&sqrt_derived_width1_formula()).unwrap();
        let got: Vec<Mat> = define_set(&f, &s)
            .unwrap()
            .iter()
            .map(|&i| s.element(i).unwrap().clone())
            .collect();
        assert!(matgroup::sets_equal(&got, &sqrt));
    }

    #[test]
    fn table_structures() {
        // Z/4 as a table
        let table: Vec<u32> = (0..4u32)
            .flat_map(|a| (0..4u32).map(move |b| (a + b) % 4))
            .collect();
        let s = GroupStructure::from_table(table, 4, 0, BTreeMap::new()).unwrap();
        let f = parse("E y. x = y*y").unwrap();
        // squares in Z/4: {0, 2}
        assert_eq!(define_set(&f, &s).unwrap(), vec![0, 2]);
    }

    fn term_strategy() -> impl Strategy<Value = Term> {
        let leaf = prop_oneof![
            Just(Term::One),
            "[xyzw]".prop_map(Term::Var),
            "c[1-3]".prop_map(Term::Const),
        ];
        leaf.prop_recursive(3, 16, 2, |inner| {
            prop_oneof![
                (inner.clone(), inner.clone())
                    .prop_map(|(a, b)| Term::Mul(Box::new(a), Box::new(b))),
                inner.prop_map(|a| Term::Inv(Box::new(a))),
            ]
        })
    }

    fn formula_strategy() -> impl Strategy<Value = Formula> {
        let atom = (term_strategy(), term_strategy()).prop_map(|(a, b)| Formula::Eq(a, b));
        atom.prop_recursive(3, 24, 2, |inner| {
            prop_oneof![
                inner.clone().prop_map(|f| Formula::Not(Box::new(f))),
                (inner.clone(), inner.clone())
                    .prop_map(|(a, b)| Formula::And(Box::new(a), Box::new(b))),
                (inner.clone(), inner.clone())
                    .prop_map(|(a, b)| Formula::Or(Box::new(a), Box::new(b))),
                (inner.clone(), inner.clone())
                    .prop_map(|(a, b)| Formula::Implies(Box::new(a), Box::new(b))),
                ("[xyzw]", inner.clone()).prop_map(|(v, f)| Formula::Forall(v, Box::new(f))),
                ("[xyzw]", inner).prop_map(|(v, f)| Formula::Exists(v, Box::new(f))),
            ]
        })
    }

    proptest! {
        #[test]
        fn render_parse_roundtrip(f in formula_strategy()) {
            let text = f.to_string();
            let back = parse(&text).unwrap();
            prop_assert_eq!(back, f);
        }
    }
}
