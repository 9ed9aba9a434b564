//! The localized algebra of q-difference operators in normal order: coefficients on
//! the left, shift operators `∂_{i,r}` on the right, with `∂_{i,r} w_{i,r}^{1/2} =
//! q w_{i,r}^{1/2} ∂_{i,r}`.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::scalar::{Monomial, Node, Poly, Scalar, ScalarError, Term, Var};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TorusError {
    #[error("denominator factor {0} is outside the localization set")]
    LocalizationViolation(String),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
}

/// A monomial in the commuting shift operators `∂_{i,r}`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Default)]
pub struct DMonomial(Vec<((Node, u16), i32)>);

impl DMonomial {
    pub fn one() -> Self {
        DMonomial(Vec::new())
    }

    pub fn shift(i: Node, r: u16, e: i32) -> Self {
        DMonomial::from_pairs([((i, r), e)])
    }

    pub fn from_pairs<I: IntoIterator<Item = ((Node, u16), i32)>>(it: I) -> Self {
        let mut acc: BTreeMap<(Node, u16), i32> = BTreeMap::new();
        for (k, e) in it {
            *acc.entry(k).or_insert(0) += e;
        }
        DMonomial(acc.into_iter().filter(|&(_, e)| e != 0).collect())
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn pairs(&self) -> &[((Node, u16), i32)] {
        &self.0
    }

    pub fn exponent(&self, i: Node, r: u16) -> i32 {
        self.0
            .iter()
            .find(|(k, _)| *k == (i, r))
            .map_or(0, |&(_, e)| e)
    }

    pub fn mul(&self, o: &DMonomial) -> DMonomial {
        DMonomial::from_pairs(self.0.iter().chain(o.0.iter()).copied())
    }

    pub fn inv(&self) -> DMonomial {
        DMonomial(self.0.iter().map(|&(k, e)| (k, -e)).collect())
    }

    /// The substitution `W_{i,r} -> Q^{2e} W_{i,r}` realising `∂^e · f = f' · ∂^e`.
    pub fn conjugation_map(&self) -> impl Fn(Var) -> Option<Term> + '_ {
        move |v| match v {
            Var::W(i, r) => {
                let e = self.exponent(i, r);
                (e != 0).then(|| Term::q_half(2 * e).mul(&Term::var(v)))
            }
            _ => None,
        }
    }

    /// Moves a monomial in the coefficient variables through `self` from right to left.
    pub fn conjugate_term(&self, t: &Term) -> Term {
        let mut out = t.clone();
        for &(v, e) in t.mono.pairs() {
            if let Var::W(i, r) = v {
                let d = self.exponent(i, r);
                if d != 0 {
                    out = out.mul(&Term::q_half(2 * d * e));
                }
            }
        }
        out
    }
}

impl fmt::Display for DMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self
            .0
            .iter()
            .map(|&((i, r), e)| {
                if e == 1 {
                    format!("D{}_{}", i + 1, r)
                } else {
                    format!("D{}_{}^{}", i + 1, r, e)
                }
            })
            .collect();
        write!(f, "{}", parts.join("*"))
    }
}

/// Returns `s'` with `d · s = s' · d`.
pub fn conjugate_through(d: &DMonomial, s: &Scalar) -> Scalar {
    if d.is_one() {
        return s.clone();
    }
    s.subst(&d.conjugation_map())
        .expect("a monomial rescaling never hits a pole")
}

/// Finite sum of `coefficient · ∂-monomial`, one summand per ∂-monomial.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct TorusElement {
    terms: BTreeMap<DMonomial, Scalar>,
}

impl TorusElement {
    pub fn zero() -> Self {
        TorusElement::default()
    }

    pub fn one() -> Self {
        TorusElement::monomial(Scalar::one(), DMonomial::one())
    }

    pub fn monomial(c: Scalar, d: DMonomial) -> Self {
        let mut t = TorusElement::zero();
        t.add_term(c, d);
        t
    }

    pub fn scalar(c: Scalar) -> Self {
        TorusElement::monomial(c, DMonomial::one())
    }

    pub fn add_term(&mut self, c: Scalar, d: DMonomial) {
        if c.is_zero() {
            return;
        }
        match self.terms.remove(&d) {
            Some(old) => {
                let s = old.add(&c);
                if !s.is_zero() {
                    self.terms.insert(d, s);
                }
            }
            None => {
                self.terms.insert(d, c);
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&DMonomial, &Scalar)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, o: &TorusElement) -> TorusElement {
        let mut out = self.clone();
        for (d, c) in &o.terms {
            out.add_term(c.clone(), d.clone());
        }
        out
    }

    pub fn neg(&self) -> TorusElement {
        TorusElement {
            terms: self
                .terms
                .iter()
                .map(|(d, c)| (d.clone(), c.neg()))
                .collect(),
        }
    }

    pub fn sub(&self, o: &TorusElement) -> TorusElement {
        self.add(&o.neg())
    }

    pub fn scale(&self, s: &Scalar) -> TorusElement {
        let mut out = TorusElement::zero();
        for (d, c) in &self.terms {
            out.add_term(s.mul(c), d.clone());
        }
        out
    }

    /// Normal-ordered product `self · o`.
    pub fn mul(&self, o: &TorusElement) -> TorusElement {
        let mut out = TorusElement::zero();
        for (dx, cx) in &self.terms {
            for (dy, cy) in &o.terms {
                out.add_term(cx.mul(&conjugate_through(dx, cy)), dx.mul(dy));
            }
        }
        out
    }

    /// Product that also checks the localization condition on the result.
    pub fn multiply_normal_order(&self, o: &TorusElement) -> Result<TorusElement, TorusError> {
        let p = self.mul(o);
        check_admissible(&p)?;
        Ok(p)
    }

    /// Applies a substitution of coefficient variables to every coefficient.
    pub fn subst(&self, map: &dyn Fn(Var) -> Option<Term>) -> Result<TorusElement, ScalarError> {
        let mut out = TorusElement::zero();
        for (d, c) in &self.terms {
            out.add_term(c.subst(map)?, d.clone());
        }
        Ok(out)
    }

    pub fn equals(&self, o: &TorusElement) -> bool {
        self.sub(o).is_zero()
    }
}

impl fmt::Display for TorusElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(d, c)| format!("[{}]*{}", c, d))
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// Node orbits used by the localization check: `orbit[i]` is a label shared by i
/// and τi.
#[derive(Debug, Clone)]
pub struct Localization {
    orbit: Vec<usize>,
}

impl Localization {
    /// Plain rule: both w-variables must belong to the same node.
    pub fn per_node() -> Self {
        Localization { orbit: Vec::new() }
    }

    /// Relaxed rule: both w-variables must belong to one τ-orbit.
    pub fn per_orbit(tau: &[usize]) -> Self {
        Localization {
            orbit: tau.iter().enumerate().map(|(i, &t)| i.min(t)).collect(),
        }
    }

    fn orbit_of(&self, i: Node) -> usize {
        self.orbit.get(i as usize).copied().unwrap_or(i as usize)
    }

    /// Whether `atom` is, up to a unit, a generator of the multiplicative set:
    /// a binomial `a − b` whose ratio is `q^m` times one of `w_r^{±1}`,
    /// `w_r^{±2}`, `w_r^{±1} w_s^{±1}` (r ≠ s, same orbit). Atoms in `q` alone
    /// are invertible constants.
    pub fn admits(&self, atom: &Poly) -> bool {
        let only_q = !atom.mentions(|v| v != Var::Q);
        if only_q {
            return true;
        }
        if atom.len() != 2 {
            return false;
        }
        let mut it = atom.terms();
        let (ma, ca) = it.next().unwrap();
        let (mb, cb) = it.next().unwrap();
        if !(ca + cb).is_zero() {
            return false;
        }
        let ratio: Monomial = ma.mul(&mb.inv());
        let mut ws: Vec<(Node, i32)> = Vec::new();
        for &(v, e) in ratio.pairs() {
            match v {
                Var::Q if e % 2 == 0 => {}
                Var::W(i, _) if e % 2 == 0 => ws.push((i, e / 2)),
                _ => return false,
            }
        }
        match ws.as_slice() {
            [(_, e)] => e.abs() <= 2,
            [(i, e), (j, f)] => {
                e.abs() == 1 && f.abs() == 1 && self.orbit_of(*i) == self.orbit_of(*j)
            }
            _ => false,
        }
    }
}

/// Checks the localization condition with the plain per-node rule.
pub fn check_admissible(x: &TorusElement) -> Result<(), TorusError> {
    check_admissible_with(x, &Localization::per_node())
}

pub fn check_admissible_with(x: &TorusElement, loc: &Localization) -> Result<(), TorusError> {
    for (_, c) in x.terms() {
        for (atom, e) in c.factors() {
            if e < 0 && !loc.admits(atom) {
                return Err(TorusError::LocalizationViolation(atom.to_string()));
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Gauss;

    fn w(i: Node, r: u16) -> Term {
        Term::w(i, r, 1)
    }

    #[test]
    fn conjugation_rules() {
        let d = DMonomial::shift(0, 1, 1);
        let s = Scalar::from_term(Term::w_half(0, 1, 1));
        assert!(conjugate_through(&d, &s)
            .equals(&Scalar::from_term(Term::q(1).mul(&Term::w_half(0, 1, 1)))));
        let dinv = DMonomial::shift(0, 1, -1);
        let s = Scalar::from_term(Term::w(0, 1, 2));
        assert!(conjugate_through(&dinv, &s)
            .equals(&Scalar::from_term(Term::q(-4).mul(&Term::w(0, 1, 2)))));
        let z = Scalar::var(Var::Z(1, 1));
        assert!(conjugate_through(&d, &z).equals(&z));
        assert_eq!(
            d.conjugate_term(&Term::w(0, 1, 2)),
            Term::q(4).mul(&Term::w(0, 1, 2))
        );
    }

    #[test]
    fn products() {
        let d = TorusElement::monomial(Scalar::one(), DMonomial::shift(0, 1, 1));
        let wv = TorusElement::scalar(Scalar::from_term(w(0, 1)));
        let expect = TorusElement::monomial(
            Scalar::from_term(Term::q(2).mul(&w(0, 1))),
            DMonomial::shift(0, 1, 1),
        );
        assert!(d.mul(&wv).equals(&expect));
        let wd = wv.mul(&d);
        let sq = TorusElement::monomial(
            Scalar::from_term(Term::q(2).mul(&Term::w(0, 1, 2))),
            DMonomial::shift(0, 1, 2),
        );
        assert!(wd.mul(&wd).equals(&sq));
        assert!(wd.mul(&TorusElement::one()).equals(&wd));
    }

    #[test]
    fn localization() {
        let loc = Localization::per_node();
        let atom = |s: Scalar| s.numerator().canonicalize().1;
        let a = Scalar::binomial(&w(0, 1), &Term::q(3).mul(&w(0, 2)));
        assert!(loc.admits(&atom(a)));
        let b = Scalar::one_minus(&Term::q(-1).mul(&Term::w(0, 1, 2)));
        assert!(loc.admits(&atom(b)));
        let c = Scalar::from_poly(Poly::from_terms([
            w(0, 1),
            w(1, 1).neg(),
            Term::constant(Gauss::from_int(-1)),
        ]));
        assert!(!Localization::per_node().admits(&atom(c.clone())));
        let x = TorusElement::scalar(c.inv().unwrap());
        assert!(matches!(
            check_admissible(&x),
            Err(TorusError::LocalizationViolation(_))
        ));
        // cross-node factors are accepted only inside one τ-orbit
        let cross = atom(Scalar::one_minus(&w(0, 1).mul(&w(1, 1))));
        assert!(!Localization::per_node().admits(&cross));
        assert!(Localization::per_orbit(&[1, 0]).admits(&cross));
    }
}
