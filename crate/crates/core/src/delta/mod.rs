//! Formal delta calculus: factored currents, pinned distributions and the
//! residue expansion `γ⁺ − γ⁻ = Σ δ(a/x) Res_{x=a} γ(x)/x`.

mod current;

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::qtorus::{conjugate_through, DMonomial};
use crate::scalar::{Scalar, ScalarError, Spectral, Term, Var};

pub use current::FactorCurrent;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DeltaError {
    #[error("spectral variable {0} is pinned twice")]
    DoublePin(Spectral),
    #[error("pole of order at least two at {0}")]
    NonSimplePole(String),
    #[error("spectral variable {0} is left with a linked pin")]
    UnpinnedResidual(Spectral),
    #[error("cyclic pins")]
    CyclicPins,
    #[error(transparent)]
    Scalar(#[from] ScalarError),
}

/// Where a summand lives: the pins `var ↦ target` contributed by deltas
/// `δ(target/var)`, and the ∂-monomial on the right.
///
/// A target may mention another spectral variable (a linked pin such as the one
/// coming from `δ(uv)`).
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug, Default)]
pub struct Support {
    pins: Vec<(Spectral, Term)>,
    pub dmon: DMonomial,
}

impl Support {
    pub fn new(pins: Vec<(Spectral, Term)>, dmon: DMonomial) -> Result<Self, DeltaError> {
        let mut s = Support {
            pins: Vec::new(),
            dmon,
        };
        for (v, t) in pins {
            s.pin(v, t)?;
        }
        s.resolve()?;
        Ok(s)
    }

    pub fn pins(&self) -> &[(Spectral, Term)] {
        &self.pins
    }

    pub fn target(&self, v: Spectral) -> Option<&Term> {
        self.pins.iter().find(|(w, _)| *w == v).map(|(_, t)| t)
    }

    fn pin(&mut self, v: Spectral, t: Term) -> Result<(), DeltaError> {
        match self.pins.binary_search_by(|(w, _)| w.cmp(&v)) {
            Ok(_) => Err(DeltaError::DoublePin(v)),
            Err(pos) => {
                self.pins.insert(pos, (v, t));
                Ok(())
            }
        }
    }

    /// Substitutes pins into pin targets until no target mentions a pinned variable.
    fn resolve(&mut self) -> Result<(), DeltaError> {
        for _ in 0..=self.pins.len() {
            let map = self.map_owned();
            let mut changed = false;
            for (v, t) in self.pins.iter_mut() {
                if t.mono.contains(Var::Spec(*v)) {
                    return Err(DeltaError::CyclicPins);
                }
                let lookup = |x: Var| match x {
                    Var::Spec(s) if s != *v => map.get(&s).cloned(),
                    _ => None,
                };
                let img = crate::scalar::poly::subst_monomial(&t.mono, &lookup)
                    .ok_or(ScalarError::DivisionByZero)?
                    .scale(&t.coef);
                if img != *t {
                    *t = img;
                    changed = true;
                }
            }
            if !changed {
                return Ok(());
            }
        }
        Err(DeltaError::CyclicPins)
    }

    fn map_owned(&self) -> BTreeMap<Spectral, Term> {
        self.pins.iter().cloned().collect()
    }

    fn substitution(&self) -> impl Fn(Var) -> Option<Term> + '_ {
        move |v| match v {
            Var::Spec(s) => self.target(s).cloned(),
            _ => None,
        }
    }

    /// Variables whose pin still refers to another spectral variable.
    pub fn linked(&self) -> Option<Spectral> {
        self.pins
            .iter()
            .find(|(_, t)| t.mono.has_spectral())
            .map(|(v, _)| *v)
    }

    fn swap(&self, a: Spectral, b: Spectral) -> Result<Support, DeltaError> {
        let sw = swap_map(a, b);
        let pins = self
            .pins
            .iter()
            .map(|(v, t)| {
                let t = crate::scalar::poly::subst_monomial(&t.mono, &sw)
                    .expect("renaming")
                    .scale(&t.coef);
                (swap_var(*v, a, b), t)
            })
            .collect();
        Support::new(pins, self.dmon.clone())
    }
}

fn swap_var(v: Spectral, a: Spectral, b: Spectral) -> Spectral {
    if v == a {
        b
    } else if v == b {
        a
    } else {
        v
    }
}

fn swap_map(a: Spectral, b: Spectral) -> impl Fn(Var) -> Option<Term> {
    move |v| match v {
        Var::Spec(s) if s == a || s == b => Some(Term::spectral(swap_var(s, a, b))),
        _ => None,
    }
}

impl fmt::Display for Support {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (v, t) in &self.pins {
            write!(f, "δ({}/{}) ", t, v)?;
        }
        write!(f, "{}", self.dmon)
    }
}

/// Finite sum of `coefficient · ∏ δ(target/var) · ∂-monomial`.
///
/// Coefficients are always stored with the pins already substituted, so they only
/// mention spectral variables that are free.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct Distribution {
    terms: BTreeMap<Support, Scalar>,
}

impl Distribution {
    pub fn zero() -> Self {
        Distribution::default()
    }

    /// A pinless, ∂-free scalar (which may mention free spectral variables).
    pub fn scalar(c: Scalar) -> Self {
        let mut d = Distribution::zero();
        d.add_term(Support::default(), c).expect("no pins");
        d
    }

    pub fn single(support: Support, c: Scalar) -> Result<Self, DeltaError> {
        let mut d = Distribution::zero();
        d.add_term(support, c)?;
        Ok(d)
    }

    /// `δ(a b)`-style linked delta: pins `v ↦ target`.
    pub fn delta(v: Spectral, target: Term) -> Result<Self, DeltaError> {
        Distribution::single(
            Support::new(vec![(v, target)], DMonomial::one())?,
            Scalar::one(),
        )
    }

    /// Adds `c` on `support`, substituting the pins into `c` first.
    pub fn add_term(&mut self, support: Support, c: Scalar) -> Result<(), DeltaError> {
        let c = c.subst(&support.substitution())?;
        if c.is_zero() {
            return Ok(());
        }
        match self.terms.get_mut(&support) {
            Some(acc) => {
                let s = acc.add(&c);
                if s.is_zero() {
                    self.terms.remove(&support);
                } else {
                    *acc = s;
                }
            }
            None => {
                self.terms.insert(support, c);
            }
        }
        Ok(())
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Support, &Scalar)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, o: &Distribution) -> Distribution {
        let mut out = self.clone();
        for (s, c) in &o.terms {
            out.add_term(s.clone(), c.clone()).expect("already pinned");
        }
        out
    }

    pub fn neg(&self) -> Distribution {
        Distribution {
            terms: self
                .terms
                .iter()
                .map(|(s, c)| (s.clone(), c.neg()))
                .collect(),
        }
    }

    pub fn sub(&self, o: &Distribution) -> Distribution {
        self.add(&o.neg())
    }

    /// Left multiplication by a scalar; pins are substituted into it.
    pub fn scale(&self, c: &Scalar) -> Result<Distribution, DeltaError> {
        let mut out = Distribution::zero();
        for (s, x) in &self.terms {
            out.add_term(s.clone(), c.mul(x))?;
        }
        Ok(out)
    }

    /// Product `self · o`: the pins and coefficients of `o` are moved left through the
    /// ∂-monomials of `self`, pins are merged and resolved, and the merged pins are
    /// substituted into the coefficient.
    pub fn mul(&self, o: &Distribution) -> Result<Distribution, DeltaError> {
        let mut out = Distribution::zero();
        for (sx, cx) in &self.terms {
            for (sy, cy) in &o.terms {
                let mut pins = sx.pins.clone();
                pins.extend(sy.pins.iter().map(|(v, t)| (*v, sx.dmon.conjugate_term(t))));
                let support = Support::new(pins, sx.dmon.mul(&sy.dmon))?;
                let c = cx.mul(&conjugate_through(&sx.dmon, cy));
                // coefficients were pinned separately; the merged pins may bind more
                out.add_term(support, c)?;
            }
        }
        Ok(out)
    }

    /// `[x, y]_p = x y − p y x`.
    pub fn bracket(
        x: &Distribution,
        y: &Distribution,
        p: &Scalar,
    ) -> Result<Distribution, DeltaError> {
        Ok(x.mul(y)?.sub(&y.mul(x)?.scale(p)?))
    }

    /// Renames `a ↔ b` everywhere.
    pub fn swap(&self, a: Spectral, b: Spectral) -> Result<Distribution, DeltaError> {
        let sw = swap_map(a, b);
        let mut out = Distribution::zero();
        for (s, c) in &self.terms {
            out.add_term(s.swap(a, b)?, c.subst(&sw)?)?;
        }
        Ok(out)
    }

    /// `f(a, b) + f(b, a)`.
    pub fn symmetrize(&self, a: Spectral, b: Spectral) -> Result<Distribution, DeltaError> {
        Ok(self.add(&self.swap(a, b)?))
    }

    /// Substitutes coefficient variables in coefficients and pin targets.
    pub fn subst(&self, map: &dyn Fn(Var) -> Option<Term>) -> Result<Distribution, DeltaError> {
        let mut out = Distribution::zero();
        for (s, c) in &self.terms {
            let pins = s
                .pins
                .iter()
                .map(|(v, t)| {
                    crate::scalar::poly::subst_monomial(&t.mono, map)
                        .map(|m| (*v, m.scale(&t.coef)))
                        .ok_or(DeltaError::Scalar(ScalarError::DivisionByZero))
                })
                .collect::<Result<Vec<_>, _>>()?;
            out.add_term(Support::new(pins, s.dmon.clone())?, c.subst(map)?)?;
        }
        Ok(out)
    }

    /// `γ⁺ − γ⁻` as a sum of pinned deltas in `γ`'s variable.
    pub fn from_residues(gamma: &FactorCurrent) -> Result<Distribution, DeltaError> {
        let mut out = Distribution::zero();
        for (a, r) in gamma.residues()? {
            out.add_term(Support::new(vec![(gamma.var, a)], DMonomial::one())?, r)?;
        }
        Ok(out)
    }

    fn check_pinned(&self) -> Result<(), DeltaError> {
        match self.terms.keys().find_map(Support::linked) {
            Some(v) => Err(DeltaError::UnpinnedResidual(v)),
            None => Ok(()),
        }
    }
}

/// Expands `γ⁺ − γ⁻` via residues.
pub fn expand_by_residues(gamma: &FactorCurrent) -> Result<Distribution, DeltaError> {
    Distribution::from_residues(gamma)
}

/// A support on which the two sides of a comparison disagree.
#[derive(Clone, Debug)]
pub struct Discrepancy {
    pub support: Support,
    pub lhs: Scalar,
    pub rhs: Scalar,
}

impl fmt::Display for Discrepancy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "on {}: lhs = {}, rhs = {}",
            self.support, self.lhs, self.rhs
        )
    }
}

/// Groups both sides by support and returns every support where the coefficients differ.
pub fn canonicalize_compare(
    lhs: &Distribution,
    rhs: &Distribution,
) -> Result<Vec<Discrepancy>, DeltaError> {
    lhs.check_pinned()?;
    rhs.check_pinned()?;
    let mut out = Vec::new();
    let supports: std::collections::BTreeSet<&Support> =
        lhs.terms.keys().chain(rhs.terms.keys()).collect();
    for s in supports {
        let l = lhs.terms.get(s).cloned().unwrap_or_else(Scalar::zero);
        let r = rhs.terms.get(s).cloned().unwrap_or_else(Scalar::zero);
        if !l.equals(&r) {
            out.push(Discrepancy {
                support: s.clone(),
                lhs: l,
                rhs: r,
            });
        }
    }
    Ok(out)
}

impl fmt::Display for Distribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(s, c)| format!("({}) {}", c, s))
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const U: Spectral = Spectral::U;
    const V: Spectral = Spectral::V;

    fn pinned(v: Spectral, t: Term, d: DMonomial, c: Scalar) -> Distribution {
        Distribution::single(Support::new(vec![(v, t)], d).unwrap(), c).unwrap()
    }

    #[test]
    fn pins_move_through_shifts() {
        let w = Term::w(0, 1, 1);
        let x = pinned(
            U,
            w.mul(&Term::q(-1)),
            DMonomial::shift(0, 1, -1),
            Scalar::one(),
        );
        let y = pinned(V, w.mul(&Term::q(-1)), DMonomial::one(), Scalar::one());
        let p = x.mul(&y).unwrap();
        let (s, _) = p.terms().next().unwrap();
        assert_eq!(s.target(V), Some(&w.mul(&Term::q(-3))));
        assert_eq!(s.target(U), Some(&w.mul(&Term::q(-1))));
    }

    #[test]
    fn double_pin_is_rejected() {
        let x = pinned(U, Term::one(), DMonomial::one(), Scalar::one());
        assert_eq!(x.mul(&x), Err(DeltaError::DoublePin(U)));
    }

    #[test]
    fn residue_of_simple_fraction() {
        // γ = x/(x − a) gives δ(a/x) with coefficient 1
        let a = Term::w(0, 1, 1);
        let g = FactorCurrent::linear_inv(Spectral::X, a.clone(), -1);
        let d = expand_by_residues(&g).unwrap();
        let expect = pinned(Spectral::X, a, DMonomial::one(), Scalar::one());
        assert!(canonicalize_compare(&d, &expect).unwrap().is_empty());
    }

    #[test]
    fn laurent_polynomial_has_no_residues() {
        let g = FactorCurrent::power(Spectral::X, 3).mul(&FactorCurrent::linear(
            Spectral::X,
            Term::q(1),
            2,
        ));
        assert!(expand_by_residues(&g).unwrap().is_empty());
    }

    #[test]
    fn kappa_times_antisymmetric_has_single_pole() {
        let x = Spectral::X;
        let kappa = FactorCurrent::linear(x, Term::q(1), 1)
            .mul(&FactorCurrent::linear(x, Term::q(-1), 1))
            .mul(&FactorCurrent::linear(x, Term::one(), -2));
        // x − x^{-1} = −x^{-1}(1 − x)(1 + x)
        let anti = FactorCurrent::power(x, -1)
            .scale(&Scalar::int(-1))
            .mul(&FactorCurrent::linear(x, Term::one(), 1))
            .mul(&FactorCurrent::linear(x, Term::one().neg(), 1));
        let d = expand_by_residues(&anti.mul(&kappa)).unwrap();
        assert_eq!(d.len(), 1);
        let (s, _) = d.terms().next().unwrap();
        assert_eq!(s.target(x), Some(&Term::one()));
    }

    #[test]
    fn linked_pins_resolve_and_are_detected() {
        let link = Distribution::delta(V, Term::spectral(U).inv().unwrap()).unwrap();
        assert!(matches!(
            canonicalize_compare(&link, &Distribution::zero()),
            Err(DeltaError::UnpinnedResidual(V))
        ));
        let a = Term::w(0, 1, 1);
        let p = link
            .mul(&pinned(U, a.clone(), DMonomial::one(), Scalar::one()))
            .unwrap();
        let (s, _) = p.terms().next().unwrap();
        assert_eq!(s.target(V), Some(&a.inv().unwrap()));
        assert!(s.linked().is_none());
    }

    #[test]
    fn symmetrize_swaps_pins() {
        let x = pinned(
            U,
            Term::q(1),
            DMonomial::one(),
            Scalar::from_term(Term::spectral(V)),
        );
        let s = x.symmetrize(U, V).unwrap();
        assert_eq!(s.len(), 2);
    }
}
