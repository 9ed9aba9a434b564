use std::fmt;

use super::gauss::Gauss;

/// Node index of the Dynkin diagram (0-based internally, printed 1-based).
pub type Node = u8;

/// Spectral parameters that can be adjoined to the coefficient field.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Spectral {
    U,
    V,
    U1,
    U2,
    X,
}

impl Spectral {
    pub fn name(self) -> &'static str {
        match self {
            Spectral::U => "u",
            Spectral::V => "v",
            Spectral::U1 => "u1",
            Spectral::U2 => "u2",
            Spectral::X => "x",
        }
    }
}

impl fmt::Display for Spectral {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Base units of the coefficient field.
///
/// `Q` is `q^{1/2}` and `W(i, r)` is `w_{i,r}^{1/2}`, so every half-integer power of
/// `q` or `w_{i,r}` is an integer power of a base unit.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Var {
    Q,
    W(Node, u16),
    Z(Node, u16),
    Zeta(Node),
    Spec(Spectral),
}

impl Var {
    pub fn is_spectral(self) -> bool {
        matches!(self, Var::Spec(_))
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Var::Q => write!(f, "q"),
            Var::W(i, r) => write!(f, "w{}_{}", i + 1, r),
            Var::Z(i, s) => write!(f, "z{}_{}", i + 1, s),
            Var::Zeta(i) => write!(f, "zeta{}", i + 1),
            Var::Spec(s) => write!(f, "{}", s),
        }
    }
}

/// A Laurent monomial in the base units. Zero exponents are never stored.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Default)]
pub struct Monomial(Vec<(Var, i32)>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn var(v: Var) -> Self {
        Monomial(vec![(v, 1)])
    }

    pub fn var_pow(v: Var, e: i32) -> Self {
        if e == 0 {
            Monomial::one()
        } else {
            Monomial(vec![(v, e)])
        }
    }

    /// Builds a monomial from arbitrary (var, exponent) pairs, merging repeats.
    pub fn from_pairs<I: IntoIterator<Item = (Var, i32)>>(pairs: I) -> Self {
        let mut v: Vec<(Var, i32)> = pairs.into_iter().collect();
        v.sort_by(|a, b| a.0.cmp(&b.0));
        let mut out: Vec<(Var, i32)> = Vec::with_capacity(v.len());
        for (var, e) in v {
            match out.last_mut() {
                Some(last) if last.0 == var => last.1 += e,
                _ => out.push((var, e)),
            }
        }
        out.retain(|&(_, e)| e != 0);
        Monomial(out)
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn pairs(&self) -> &[(Var, i32)] {
        &self.0
    }

    pub fn exponent(&self, v: Var) -> i32 {
        self.0
            .binary_search_by(|p| p.0.cmp(&v))
            .map(|k| self.0[k].1)
            .unwrap_or(0)
    }

    pub fn contains(&self, v: Var) -> bool {
        self.exponent(v) != 0
    }

    pub fn has_spectral(&self) -> bool {
        self.0.iter().any(|(v, _)| v.is_spectral())
    }

    pub fn mul(&self, o: &Monomial) -> Monomial {
        let (a, b) = (&self.0, &o.0);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                std::cmp::Ordering::Less => {
                    out.push(a[i]);
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push(b[j]);
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    let e = a[i].1 + b[j].1;
                    if e != 0 {
                        out.push((a[i].0, e));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        Monomial(out)
    }

    pub fn inv(&self) -> Monomial {
        Monomial(self.0.iter().map(|&(v, e)| (v, -e)).collect())
    }

    pub fn pow(&self, k: i32) -> Monomial {
        if k == 0 {
            return Monomial::one();
        }
        Monomial(self.0.iter().map(|&(v, e)| (v, e * k)).collect())
    }

    /// Component-wise minimum of exponents (treating absent variables as 0).
    pub fn min_with(&self, o: &Monomial) -> Monomial {
        let mut pairs: Vec<(Var, i32)> = Vec::new();
        for &(v, e) in &self.0 {
            let m = e.min(o.exponent(v));
            pairs.push((v, m));
        }
        for &(v, e) in &o.0 {
            if !self.contains(v) {
                pairs.push((v, e.min(0)));
            }
        }
        Monomial::from_pairs(pairs)
    }

    /// Removes the variable `v` and returns its exponent.
    pub fn split_off(&self, v: Var) -> (Monomial, i32) {
        let e = self.exponent(v);
        let rest = Monomial(self.0.iter().copied().filter(|p| p.0 != v).collect());
        (rest, e)
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        let mut first = true;
        for &(v, e) in &self.0 {
            if !first {
                write!(f, "*")?;
            }
            first = false;
            // Q and W are half units; print whole-unit exponents.
            let halves = matches!(v, Var::Q | Var::W(..));
            if halves {
                if e % 2 == 0 {
                    if e == 2 {
                        write!(f, "{}", v)?;
                    } else {
                        write!(f, "{}^{}", v, e / 2)?;
                    }
                } else {
                    write!(f, "{}^({}/2)", v, e)?;
                }
            } else if e == 1 {
                write!(f, "{}", v)?;
            } else {
                write!(f, "{}^{}", v, e)?;
            }
        }
        Ok(())
    }
}

/// A coefficient times a monomial.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Term {
    pub coef: Gauss,
    pub mono: Monomial,
}

impl Term {
    pub fn new(coef: Gauss, mono: Monomial) -> Self {
        Term { coef, mono }
    }

    pub fn one() -> Self {
        Term::new(Gauss::one(), Monomial::one())
    }

    pub fn constant(c: Gauss) -> Self {
        Term::new(c, Monomial::one())
    }

    pub fn mono(m: Monomial) -> Self {
        Term::new(Gauss::one(), m)
    }

    pub fn var(v: Var) -> Self {
        Term::mono(Monomial::var(v))
    }

    /// `q^{k/2}`.
    pub fn q_half(k: i32) -> Self {
        Term::mono(Monomial::var_pow(Var::Q, k))
    }

    /// `q^k`.
    pub fn q(k: i32) -> Self {
        Term::q_half(2 * k)
    }

    /// `w_{i,r}^{k/2}`.
    pub fn w_half(i: Node, r: u16, k: i32) -> Self {
        Term::mono(Monomial::var_pow(Var::W(i, r), k))
    }

    /// `w_{i,r}^k`.
    pub fn w(i: Node, r: u16, k: i32) -> Self {
        Term::w_half(i, r, 2 * k)
    }

    pub fn spectral(s: Spectral) -> Self {
        Term::var(Var::Spec(s))
    }

    pub fn is_zero(&self) -> bool {
        self.coef.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.coef.is_one() && self.mono.is_one()
    }

    pub fn mul(&self, o: &Term) -> Term {
        Term::new(&self.coef * &o.coef, self.mono.mul(&o.mono))
    }

    pub fn inv(&self) -> Option<Term> {
        Some(Term::new(self.coef.inv()?, self.mono.inv()))
    }

    pub fn pow(&self, k: i32) -> Option<Term> {
        Some(Term::new(self.coef.pow(k)?, self.mono.pow(k)))
    }

    pub fn neg(&self) -> Term {
        Term::new(-&self.coef, self.mono.clone())
    }

    pub fn scale(&self, c: &Gauss) -> Term {
        Term::new(&self.coef * c, self.mono.clone())
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.mono.is_one() {
            write!(f, "{}", self.coef)
        } else if self.coef.is_one() {
            write!(f, "{}", self.mono)
        } else if (-&self.coef).is_one() {
            write!(f, "-{}", self.mono)
        } else {
            write!(f, "{}*{}", self.coef, self.mono)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_exponents_are_dropped() {
        let m = Monomial::from_pairs([(Var::Q, 2), (Var::W(0, 1), 1), (Var::Q, -2)]);
        assert_eq!(m, Monomial::var(Var::W(0, 1)));
        assert!(m.mul(&m.inv()).is_one());
    }

    #[test]
    fn min_with_handles_absent_vars() {
        let a = Monomial::from_pairs([(Var::Q, 3), (Var::W(0, 1), -1)]);
        let b = Monomial::from_pairs([(Var::Z(0, 1), 2)]);
        let m = a.min_with(&b);
        assert_eq!(m, Monomial::from_pairs([(Var::W(0, 1), -1)]));
    }

    #[test]
    fn display_uses_whole_units() {
        let m = Monomial::from_pairs([(Var::Q, 1), (Var::W(0, 1), 4)]);
        assert_eq!(m.to_string(), "q^(1/2)*w1_1^2");
    }
}
