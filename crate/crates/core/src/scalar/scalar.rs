use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use thiserror::Error;

use super::gauss::Gauss;
use super::monomial::{Term, Var};
use super::poly::Poly;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScalarError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("a denominator vanishes under substitution")]
    DenominatorVanishes,
    #[error("variable {0} has no value")]
    Unassigned(Var),
}

/// An exact rational function stored as `poly · ∏ atom^e`.
///
/// Atoms are canonical polynomials (see [`Poly::canonicalize`]) with at least two
/// terms, and exponents may be negative. Denominators are never zero, so a scalar is
/// zero exactly when `poly` is.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Scalar {
    poly: Poly,
    factors: BTreeMap<Poly, i32>,
}

impl Default for Scalar {
    fn default() -> Self {
        Scalar::zero()
    }
}

impl Scalar {
    pub fn zero() -> Self {
        Scalar {
            poly: Poly::zero(),
            factors: BTreeMap::new(),
        }
    }

    pub fn one() -> Self {
        Scalar::from_poly(Poly::one())
    }

    pub fn from_poly(poly: Poly) -> Self {
        Scalar {
            poly,
            factors: BTreeMap::new(),
        }
        .tidy()
    }

    pub fn from_term(t: Term) -> Self {
        Scalar::from_poly(Poly::from_term(t))
    }

    pub fn constant(c: Gauss) -> Self {
        Scalar::from_term(Term::constant(c))
    }

    pub fn int(n: i64) -> Self {
        Scalar::constant(Gauss::from_int(n))
    }

    pub fn var(v: Var) -> Self {
        Scalar::from_term(Term::var(v))
    }

    /// `1 - t`.
    pub fn one_minus(t: &Term) -> Self {
        Scalar::from_poly(Poly::one().sub(&Poly::from_term(t.clone())))
    }

    /// `a - b` for two terms.
    pub fn binomial(a: &Term, b: &Term) -> Self {
        Scalar::from_poly(Poly::from_term(a.clone()).sub(&Poly::from_term(b.clone())))
    }

    pub fn is_zero(&self) -> bool {
        self.poly.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.factors.is_empty() && self.poly.as_term().map_or(false, |t| t.is_one())
    }

    pub fn numerator(&self) -> &Poly {
        &self.poly
    }

    pub fn factors(&self) -> impl Iterator<Item = (&Poly, i32)> {
        self.factors.iter().map(|(p, &e)| (p, e))
    }

    /// The scalar as a single term, when it is one.
    pub fn as_term(&self) -> Option<Term> {
        if self.factors.is_empty() {
            self.poly.as_term()
        } else {
            None
        }
    }

    pub fn mentions(&self, pred: impl Fn(Var) -> bool + Copy) -> bool {
        self.poly.mentions(pred) || self.factors.keys().any(|a| a.mentions(pred))
    }

    fn push_factor(&mut self, atom: Poly, e: i32) {
        if e == 0 {
            return;
        }
        let e0 = self.factors.get(&atom).copied().unwrap_or(0);
        if e0 + e == 0 {
            self.factors.remove(&atom);
        } else {
            self.factors.insert(atom, e0 + e);
        }
    }

    /// Multiplies by `p^e`, folding single terms into the numerator.
    fn absorb(&mut self, p: &Poly, e: i32) -> Result<(), ScalarError> {
        if e == 0 {
            return Ok(());
        }
        if p.is_zero() {
            if e < 0 {
                return Err(ScalarError::DivisionByZero);
            }
            *self = Scalar::zero();
            return Ok(());
        }
        if let Some(t) = p.as_term() {
            let t = t.pow(e).ok_or(ScalarError::DivisionByZero)?;
            self.poly = self.poly.mul_term(&t);
            return Ok(());
        }
        let (unit, atom) = p.canonicalize();
        let unit = unit.pow(e).ok_or(ScalarError::DivisionByZero)?;
        self.poly = self.poly.mul_term(&unit);
        self.push_factor(atom, e);
        Ok(())
    }

    /// Cancels the numerator against a denominator atom when it is a unit multiple of it.
    fn tidy(mut self) -> Self {
        if self.poly.is_zero() {
            self.factors.clear();
            return self;
        }
        if self.poly.len() >= 2 {
            let (unit, atom) = self.poly.canonicalize();
            if self.factors.contains_key(&atom) {
                self.poly = Poly::from_term(unit);
                self.push_factor(atom, 1);
            }
        }
        self
    }

    pub fn mul(&self, o: &Scalar) -> Scalar {
        if self.is_zero() || o.is_zero() {
            return Scalar::zero();
        }
        let mut out = Scalar {
            poly: self.poly.mul(&o.poly),
            factors: self.factors.clone(),
        };
        for (a, &e) in &o.factors {
            out.push_factor(a.clone(), e);
        }
        out.tidy()
    }

    pub fn mul_term(&self, t: &Term) -> Scalar {
        if t.is_zero() {
            return Scalar::zero();
        }
        Scalar {
            poly: self.poly.mul_term(t),
            factors: self.factors.clone(),
        }
    }

    pub fn neg(&self) -> Scalar {
        Scalar {
            poly: self.poly.neg(),
            factors: self.factors.clone(),
        }
    }

    pub fn inv(&self) -> Result<Scalar, ScalarError> {
        if self.is_zero() {
            return Err(ScalarError::DivisionByZero);
        }
        let mut out = Scalar {
            poly: Poly::one(),
            factors: BTreeMap::new(),
        };
        for (a, &e) in &self.factors {
            out.push_factor(a.clone(), -e);
        }
        out.absorb(&self.poly, -1)?;
        Ok(out.tidy())
    }

    pub fn div(&self, o: &Scalar) -> Result<Scalar, ScalarError> {
        Ok(self.mul(&o.inv()?))
    }

    pub fn pow(&self, k: i32) -> Result<Scalar, ScalarError> {
        if k == 0 {
            return Ok(Scalar::one());
        }
        let base = if k < 0 { self.inv()? } else { self.clone() };
        let mut acc = Scalar::one();
        for _ in 0..k.unsigned_abs() {
            acc = acc.mul(&base);
        }
        Ok(acc)
    }

    /// Sum over a common denominator: shared atoms keep their smaller exponent and the
    /// remainder is expanded into the numerators.
    pub fn add(&self, o: &Scalar) -> Scalar {
        if self.is_zero() {
            return o.clone();
        }
        if o.is_zero() {
            return self.clone();
        }
        let mut common: BTreeMap<Poly, i32> = BTreeMap::new();
        for a in self.factors.keys().chain(o.factors.keys()) {
            let ex = self.factors.get(a).copied().unwrap_or(0);
            let ey = o.factors.get(a).copied().unwrap_or(0);
            let m = ex.min(ey);
            if m != 0 {
                common.insert(a.clone(), m);
            }
        }
        let expand = |s: &Scalar| -> Poly {
            let mut p = s.poly.clone();
            let keys = s.factors.keys().chain(common.keys());
            let mut seen = std::collections::BTreeSet::new();
            for a in keys {
                if !seen.insert(a) {
                    continue;
                }
                let e = s.factors.get(a).copied().unwrap_or(0);
                let m = common.get(a).copied().unwrap_or(0);
                debug_assert!(e - m >= 0);
                p = p.mul(&a.pow((e - m) as u32));
            }
            p
        };
        let poly = expand(self).add(&expand(o));
        Scalar {
            poly,
            factors: common,
        }
        .tidy()
    }

    pub fn sub(&self, o: &Scalar) -> Scalar {
        self.add(&o.neg())
    }

    /// Exact equality of the represented rational functions.
    pub fn equals(&self, o: &Scalar) -> bool {
        self.sub(o).is_zero()
    }

    /// Simultaneous substitution of variables by terms.
    pub fn subst(&self, map: &dyn Fn(Var) -> Option<Term>) -> Result<Scalar, ScalarError> {
        let poly = self.poly.subst(map).ok_or(ScalarError::DivisionByZero)?;
        let mut out = Scalar {
            poly,
            factors: BTreeMap::new(),
        };
        for (a, &e) in &self.factors {
            let img = a.subst(map).ok_or(ScalarError::DivisionByZero)?;
            if img.is_zero() {
                if e < 0 {
                    return Err(ScalarError::DenominatorVanishes);
                }
                return Ok(Scalar::zero());
            }
            out.absorb(&img, e)?;
        }
        if out.is_zero() {
            return Ok(Scalar::zero());
        }
        Ok(out.tidy())
    }

    /// Numerical value under an assignment of every variable.
    pub fn eval(&self, val: &dyn Fn(Var) -> Option<Gauss>) -> Result<Gauss, ScalarError> {
        let ev = |p: &Poly| -> Result<Gauss, ScalarError> {
            p.eval(val).ok_or_else(|| {
                let missing = p
                    .terms()
                    .flat_map(|(m, _)| m.pairs().iter().map(|&(v, _)| v))
                    .find(|&v| val(v).is_none());
                match missing {
                    Some(v) => ScalarError::Unassigned(v),
                    None => ScalarError::DivisionByZero,
                }
            })
        };
        let mut acc = ev(&self.poly)?;
        if acc.is_zero() {
            return Ok(acc);
        }
        for (a, &e) in &self.factors {
            let x = ev(a)?;
            if x.is_zero() {
                return if e < 0 {
                    Err(ScalarError::DenominatorVanishes)
                } else {
                    Ok(x)
                };
            }
            acc = &acc * &x.pow(e).unwrap();
        }
        Ok(acc)
    }
}

impl Add for &Scalar {
    type Output = Scalar;
    fn add(self, o: &Scalar) -> Scalar {
        Scalar::add(self, o)
    }
}

impl Sub for &Scalar {
    type Output = Scalar;
    fn sub(self, o: &Scalar) -> Scalar {
        Scalar::sub(self, o)
    }
}

impl Mul for &Scalar {
    type Output = Scalar;
    fn mul(self, o: &Scalar) -> Scalar {
        Scalar::mul(self, o)
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar::neg(self)
    }
}

impl From<Term> for Scalar {
    fn from(t: Term) -> Self {
        Scalar::from_term(t)
    }
}

impl From<Poly> for Scalar {
    fn from(p: Poly) -> Self {
        Scalar::from_poly(p)
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let wrap = |p: &Poly| {
            if p.len() > 1 {
                format!("({})", p)
            } else {
                p.to_string()
            }
        };
        write!(f, "{}", wrap(&self.poly))?;
        let (num, den): (Vec<_>, Vec<_>) = self.factors.iter().partition(|(_, &e)| e > 0);
        for (a, e) in num {
            if *e == 1 {
                write!(f, "*({})", a)?;
            } else {
                write!(f, "*({})^{}", a, e)?;
            }
        }
        for (a, e) in den {
            if *e == -1 {
                write!(f, "/({})", a)?;
            } else {
                write!(f, "/({})^{}", a, -e)?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::monomial::Spectral;

    fn q(k: i32) -> Scalar {
        Scalar::from_term(Term::q(k))
    }

    fn u() -> Term {
        Term::spectral(Spectral::U)
    }

    #[test]
    fn partial_fractions_recombine() {
        // 1/(1-u) - 1/(1-q u) = (1-q) u / ((1-u)(1-q u))
        let a = Scalar::one_minus(&u()).inv().unwrap();
        let b = Scalar::one_minus(&Term::q(1).mul(&u())).inv().unwrap();
        let lhs = a.sub(&b);
        let rhs = Scalar::one()
            .sub(&q(1))
            .mul(&Scalar::from_term(u()))
            .mul(&a)
            .mul(&b);
        assert!(lhs.equals(&rhs));
    }

    #[test]
    fn inverse_cancels() {
        let x = Scalar::one_minus(&u()).mul(&q(3));
        let one = x.mul(&x.inv().unwrap());
        assert!(one.is_one());
    }

    #[test]
    fn vanishing_denominator_is_reported() {
        let s = Scalar::one_minus(&u()).inv().unwrap();
        let err = s
            .subst(&|v| (v == Var::Spec(Spectral::U)).then(Term::one))
            .unwrap_err();
        assert_eq!(err, ScalarError::DenominatorVanishes);
        let s = Scalar::one_minus(&u());
        let z = s
            .subst(&|v| (v == Var::Spec(Spectral::U)).then(Term::one))
            .unwrap();
        assert!(z.is_zero());
    }

    #[test]
    fn evaluation_matches_substitution() {
        let s = Scalar::one_minus(&u()).inv().unwrap().mul(&q(1));
        let val = |v: Var| match v {
            Var::Spec(Spectral::U) => Some(Gauss::from_int(3)),
            Var::Q => Some(Gauss::from_int(2)),
            _ => None,
        };
        // q = 4, so 4 / (1 - 3) = -2
        assert_eq!(s.eval(&val).unwrap(), Gauss::from_int(-2));
    }
}
