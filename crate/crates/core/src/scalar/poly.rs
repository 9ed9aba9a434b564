use std::collections::BTreeMap;
use std::fmt;

use super::gauss::Gauss;
use super::monomial::{Monomial, Term, Var};

/// Sparse multivariate Laurent polynomial with Gaussian-rational coefficients.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Default)]
pub struct Poly {
    terms: BTreeMap<Monomial, Gauss>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly::default()
    }

    pub fn one() -> Self {
        Poly::from_term(Term::one())
    }

    pub fn constant(c: Gauss) -> Self {
        Poly::from_term(Term::constant(c))
    }

    pub fn from_term(t: Term) -> Self {
        let mut terms = BTreeMap::new();
        if !t.coef.is_zero() {
            terms.insert(t.mono, t.coef);
        }
        Poly { terms }
    }

    pub fn from_terms<I: IntoIterator<Item = Term>>(it: I) -> Self {
        let mut p = Poly::zero();
        for t in it {
            p.add_term(t);
        }
        p
    }

    pub fn add_term(&mut self, t: Term) {
        if t.coef.is_zero() {
            return;
        }
        match self.terms.entry(t.mono) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(t.coef);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let s = &*e.get() + &t.coef;
                if s.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = s;
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Gauss)> {
        self.terms.iter()
    }

    /// The single term of a monomial polynomial.
    pub fn as_term(&self) -> Option<Term> {
        if self.terms.len() == 1 {
            let (m, c) = self.terms.iter().next().unwrap();
            Some(Term::new(c.clone(), m.clone()))
        } else {
            None
        }
    }

    pub fn mentions(&self, pred: impl Fn(Var) -> bool) -> bool {
        self.terms
            .keys()
            .any(|m| m.pairs().iter().any(|&(v, _)| pred(v)))
    }

    pub fn add(&self, o: &Poly) -> Poly {
        let (big, small) = if self.len() >= o.len() {
            (self, o)
        } else {
            (o, self)
        };
        let mut out = big.clone();
        for (m, c) in &small.terms {
            out.add_term(Term::new(c.clone(), m.clone()));
        }
        out
    }

    pub fn neg(&self) -> Poly {
        Poly {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }

    pub fn sub(&self, o: &Poly) -> Poly {
        self.add(&o.neg())
    }

    pub fn mul_term(&self, t: &Term) -> Poly {
        if t.coef.is_zero() {
            return Poly::zero();
        }
        Poly {
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.mul(&t.mono), c * &t.coef))
                .collect(),
        }
    }

    pub fn mul(&self, o: &Poly) -> Poly {
        if self.is_zero() || o.is_zero() {
            return Poly::zero();
        }
        if let Some(t) = o.as_term() {
            return self.mul_term(&t);
        }
        if let Some(t) = self.as_term() {
            return o.mul_term(&t);
        }
        let mut acc: std::collections::HashMap<Monomial, Gauss> =
            std::collections::HashMap::with_capacity(self.len() * o.len());
        for (ma, ca) in &self.terms {
            for (mb, cb) in &o.terms {
                let m = ma.mul(mb);
                let c = ca * cb;
                match acc.entry(m) {
                    std::collections::hash_map::Entry::Vacant(e) => {
                        e.insert(c);
                    }
                    std::collections::hash_map::Entry::Occupied(mut e) => {
                        let s = &*e.get() + &c;
                        *e.get_mut() = s;
                    }
                }
            }
        }
        Poly {
            terms: acc.into_iter().filter(|(_, c)| !c.is_zero()).collect(),
        }
    }

    pub fn pow(&self, k: u32) -> Poly {
        let mut acc = Poly::one();
        for _ in 0..k {
            acc = acc.mul(self);
        }
        acc
    }

    /// Simultaneous substitution of variables by terms. Returns `None` when a zero
    /// term would have to be inverted.
    pub fn subst(&self, map: &dyn Fn(Var) -> Option<Term>) -> Option<Poly> {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            out.add_term(subst_monomial(m, map)?.scale(c));
        }
        Some(out)
    }

    /// Evaluates with every variable assigned; `None` if some variable is unassigned
    /// or a zero value is raised to a negative power.
    pub fn eval(&self, val: &dyn Fn(Var) -> Option<Gauss>) -> Option<Gauss> {
        let mut acc = Gauss::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for &(v, e) in m.pairs() {
                t = &t * &val(v)?.pow(e)?;
            }
            acc = &acc + &t;
        }
        Some(acc)
    }

    /// Splits a polynomial with at least two terms as `unit · atom`, where the atom
    /// has every variable's minimum exponent equal to zero and its largest monomial
    /// has coefficient one. Two polynomials that differ by a unit share the same atom.
    pub fn canonicalize(&self) -> (Term, Poly) {
        debug_assert!(self.len() >= 2);
        let mut it = self.terms.keys();
        let mut low = it.next().unwrap().clone();
        for m in it {
            low = low.min_with(m);
        }
        let shift = low.inv();
        let shifted: BTreeMap<Monomial, Gauss> = self
            .terms
            .iter()
            .map(|(m, c)| (m.mul(&shift), c.clone()))
            .collect();
        let (_, lead) = shifted.iter().next_back().unwrap();
        let lead = lead.clone();
        let lead_inv = lead.inv().expect("nonzero coefficient");
        let atom = Poly {
            terms: shifted
                .into_iter()
                .map(|(m, c)| (m, &c * &lead_inv))
                .collect(),
        };
        (Term::new(lead, low), atom)
    }
}

pub(crate) fn subst_monomial(m: &Monomial, map: &dyn Fn(Var) -> Option<Term>) -> Option<Term> {
    let mut keep: Vec<(Var, i32)> = Vec::new();
    let mut t = Term::one();
    for &(v, e) in m.pairs() {
        match map(v) {
            Some(target) => t = t.mul(&target.pow(e)?),
            None => keep.push((v, e)),
        }
    }
    Some(t.mul(&Term::mono(Monomial::from_pairs(keep))))
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in self.terms.iter().rev() {
            let t = Term::new(c.clone(), m.clone());
            let s = t.to_string();
            if first {
                write!(f, "{}", s)?;
            } else if let Some(rest) = s.strip_prefix('-') {
                write!(f, " - {}", rest)?;
            } else {
                write!(f, " + {}", s)?;
            }
            first = false;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q() -> Poly {
        Poly::from_term(Term::q(1))
    }

    #[test]
    fn canonical_atoms_agree_up_to_units() {
        // 1 - q  and  q^3 - q^2  differ by the unit -q^2.
        let a = Poly::one().sub(&q());
        let b = q().pow(3).sub(&q().pow(2));
        assert_eq!(a.canonicalize().1, b.canonicalize().1);
        let (unit, atom) = b.canonicalize();
        assert_eq!(atom.mul_term(&unit), b);
    }

    #[test]
    fn difference_of_squares() {
        let one = Poly::one();
        let lhs = one.sub(&q()).mul(&one.add(&q()));
        assert_eq!(lhs, one.sub(&q().pow(2)));
    }

    #[test]
    fn substitution_is_simultaneous() {
        let x = Var::W(0, 1);
        let y = Var::W(0, 2);
        let p = Poly::from_term(Term::var(x)).add(&Poly::from_term(Term::var(y).pow(-1).unwrap()));
        let swapped = p
            .subst(&|v| match v {
                v if v == x => Some(Term::var(y)),
                v if v == y => Some(Term::var(x)),
                _ => None,
            })
            .unwrap();
        let expect =
            Poly::from_term(Term::var(y)).add(&Poly::from_term(Term::var(x).pow(-1).unwrap()));
        assert_eq!(swapped, expect);
    }
}
