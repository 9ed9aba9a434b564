use std::collections::BTreeMap;
use std::fmt;

use crate::scalar::{Gauss, Poly, Scalar, ScalarError, Spectral, Term, Var};

use super::DeltaError;

/// A rational function of one spectral variable `x` kept as
/// `c · x^k · ∏ (1 − M x)^e`, with `c` free of `x` and distinct `M`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FactorCurrent {
    pub var: Spectral,
    pub c: Scalar,
    pub k: i32,
    factors: BTreeMap<Term, i32>,
}

impl FactorCurrent {
    pub fn constant(var: Spectral, c: Scalar) -> Self {
        FactorCurrent {
            var,
            c,
            k: 0,
            factors: BTreeMap::new(),
        }
    }

    pub fn one(var: Spectral) -> Self {
        FactorCurrent::constant(var, Scalar::one())
    }

    /// `x^k`.
    pub fn power(var: Spectral, k: i32) -> Self {
        FactorCurrent {
            k,
            ..FactorCurrent::one(var)
        }
    }

    /// `(1 − M x)^e`.
    pub fn linear(var: Spectral, m: Term, e: i32) -> Self {
        let mut f = FactorCurrent::one(var);
        f.push(m, e);
        f
    }

    /// `(1 − M x^{-1})^e`, normalised to the `(1 − M^{-1} x)` form.
    pub fn linear_inv(var: Spectral, m: Term, e: i32) -> Self {
        // (1 − M/x) = −M x^{-1} (1 − M^{-1} x)
        let unit = Scalar::from_term(m.neg()).pow(e).expect("M is nonzero");
        let mut f = FactorCurrent {
            c: unit,
            k: -e,
            ..FactorCurrent::one(var)
        };
        f.push(m.inv().expect("M is nonzero"), e);
        f
    }

    /// `a − b x^s` for `s = ±1`, factored.
    pub fn binomial(var: Spectral, a: Term, b: Term, s: i32) -> Self {
        // a − b x^s = a (1 − (b/a) x^s)
        let ratio = b.mul(&a.inv().expect("a is nonzero"));
        let base = FactorCurrent::constant(var, Scalar::from_term(a));
        let lin = if s > 0 {
            FactorCurrent::linear(var, ratio, 1)
        } else {
            FactorCurrent::linear_inv(var, ratio, 1)
        };
        base.mul(&lin)
    }

    fn push(&mut self, m: Term, e: i32) {
        if e == 0 {
            return;
        }
        let n = self.factors.get(&m).copied().unwrap_or(0) + e;
        if n == 0 {
            self.factors.remove(&m);
        } else {
            self.factors.insert(m, n);
        }
    }

    pub fn factors(&self) -> impl Iterator<Item = (&Term, i32)> {
        self.factors.iter().map(|(m, &e)| (m, e))
    }

    pub fn mul(&self, o: &FactorCurrent) -> FactorCurrent {
        assert_eq!(self.var, o.var, "currents in different variables");
        let mut out = FactorCurrent {
            c: self.c.mul(&o.c),
            k: self.k + o.k,
            ..self.clone()
        };
        for (m, &e) in &o.factors {
            out.push(m.clone(), e);
        }
        out
    }

    pub fn scale(&self, s: &Scalar) -> FactorCurrent {
        FactorCurrent {
            c: self.c.mul(s),
            ..self.clone()
        }
    }

    pub fn pow(&self, n: i32) -> Result<FactorCurrent, ScalarError> {
        Ok(FactorCurrent {
            var: self.var,
            c: self.c.pow(n)?,
            k: self.k * n,
            factors: self
                .factors
                .iter()
                .map(|(m, &e)| (m.clone(), e * n))
                .filter(|&(_, e)| e != 0)
                .collect(),
        })
    }

    pub fn inv(&self) -> Result<FactorCurrent, ScalarError> {
        self.pow(-1)
    }

    /// `x -> λ x`.
    pub fn rescale(&self, lambda: &Term) -> FactorCurrent {
        let mut out = FactorCurrent {
            c: self.c.mul_term(&lambda.pow(self.k).expect("λ is nonzero")),
            factors: BTreeMap::new(),
            ..self.clone()
        };
        for (m, &e) in &self.factors {
            out.push(m.mul(lambda), e);
        }
        out
    }

    /// `x -> x^{-1}`.
    pub fn invert(&self) -> FactorCurrent {
        let mut out = FactorCurrent {
            k: -self.k,
            factors: BTreeMap::new(),
            ..self.clone()
        };
        for (m, &e) in &self.factors {
            out = out.mul(&FactorCurrent::linear_inv(self.var, m.clone(), e));
        }
        out
    }

    /// Renames the spectral variable.
    pub fn with_var(&self, var: Spectral) -> FactorCurrent {
        FactorCurrent {
            var,
            ..self.clone()
        }
    }

    /// Substitutes coefficient variables (never the current's own variable).
    pub fn subst(&self, map: &dyn Fn(Var) -> Option<Term>) -> Result<FactorCurrent, ScalarError> {
        let mut out = FactorCurrent {
            c: self.c.subst(map)?,
            factors: BTreeMap::new(),
            ..self.clone()
        };
        for (m, &e) in &self.factors {
            let img = crate::scalar::poly::subst_monomial(&m.mono, map)
                .ok_or(ScalarError::DivisionByZero)?
                .scale(&m.coef);
            if img.is_zero() {
                continue;
            }
            out.push(img, e);
        }
        Ok(out)
    }

    /// Value at `x = a`.
    pub fn eval_at(&self, a: &Term) -> Result<Scalar, ScalarError> {
        let mut acc = self
            .c
            .mul_term(&a.pow(self.k).ok_or(ScalarError::DivisionByZero)?);
        for (m, &e) in &self.factors {
            let f = Scalar::one_minus(&m.mul(a));
            if f.is_zero() {
                return if e < 0 {
                    Err(ScalarError::DenominatorVanishes)
                } else {
                    Ok(Scalar::zero())
                };
            }
            acc = acc.mul(&f.pow(e)?);
        }
        Ok(acc)
    }

    /// The whole current as a scalar in which `x` is an ordinary variable.
    pub fn to_scalar(&self) -> Scalar {
        self.eval_at(&Term::spectral(self.var))
            .expect("a generic point is never a pole")
    }

    /// Degree and coefficient of the leading term of the expansion at `x = ∞`.
    pub fn leading_at_infinity(&self) -> (i32, Scalar) {
        let mut deg = self.k;
        let mut coef = self.c.clone();
        for (m, &e) in &self.factors {
            deg += e;
            coef = coef.mul(&Scalar::from_term(m.neg()).pow(e).expect("M is nonzero"));
        }
        (deg, coef)
    }

    /// Degree and coefficient of the lowest term of the expansion at `x = 0`.
    pub fn leading_at_zero(&self) -> (i32, Scalar) {
        (self.k, self.c.clone())
    }

    /// `Res_{x=a} γ(x)/x` for every finite nonzero pole `a = M^{-1}`. Poles must be simple.
    pub fn residues(&self) -> Result<Vec<(Term, Scalar)>, DeltaError> {
        let mut out = Vec::new();
        for (m, &e) in &self.factors {
            if e >= 0 {
                continue;
            }
            if e < -1 {
                return Err(DeltaError::NonSimplePole(
                    m.inv().expect("nonzero").to_string(),
                ));
            }
            let a = m.inv().expect("M is nonzero");
            // γ/x = h(x)/(x (1 − M x)) and 1 − M x = −M (x − a), so the residue is −h(a).
            let mut rest = self.clone();
            rest.factors.remove(m);
            let h = rest.eval_at(&a)?;
            out.push((a, h.neg()));
        }
        Ok(out)
    }

    /// Structural equality: the factored form is unique, so this is exact.
    pub fn equals(&self, o: &FactorCurrent) -> bool {
        self.var == o.var && self.k == o.k && self.factors == o.factors && self.c.equals(&o.c)
    }

    /// Coefficients of `x^n` for `n` in `top-order+1 ..= top` of the expansion at ∞
    /// (in decreasing degree), where `top` is the leading degree.
    pub fn expand_at_infinity(&self, order: usize) -> Result<(i32, Vec<Scalar>), ScalarError> {
        // (1 − M x)^e = (−M x)^e (1 − M^{-1} x^{-1})^e
        let (top, lead) = self.leading_at_infinity();
        let mut series = unit_series(order);
        for (m, &e) in &self.factors {
            let minv = m.inv().ok_or(ScalarError::DivisionByZero)?;
            series = series_mul(&series, &binomial_series(&minv, e, order));
        }
        Ok((top, scale_series(series, &lead)))
    }

    /// Coefficients of `x^n` for `n` in `k ..= k+order−1` of the expansion at 0.
    pub fn expand_at_zero(&self, order: usize) -> Result<(i32, Vec<Scalar>), ScalarError> {
        let mut series = unit_series(order);
        for (m, &e) in &self.factors {
            series = series_mul(&series, &binomial_series(m, e, order));
        }
        Ok((self.k, scale_series(series, &self.c)))
    }
}

fn unit_series(order: usize) -> Vec<Poly> {
    let mut s = vec![Poly::zero(); order];
    if let Some(first) = s.first_mut() {
        *first = Poly::one();
    }
    s
}

fn scale_series(series: Vec<Poly>, c: &Scalar) -> Vec<Scalar> {
    series
        .into_iter()
        .map(|p| c.mul(&Scalar::from_poly(p)))
        .collect()
}

/// Truncated power series of `(1 − M t)^e`.
fn binomial_series(m: &Term, e: i32, order: usize) -> Vec<Poly> {
    // coefficient of t^n is (−M)^n · C(e, n) with generalised binomials
    let mut out = Vec::with_capacity(order);
    let mut binom = Gauss::one();
    let mut mpow = Term::one();
    for n in 0..order {
        out.push(Poly::from_term(mpow.scale(&binom)));
        let n = n as i64;
        binom = &binom * &Gauss::from_ratio(e as i64 - n, n + 1);
        mpow = mpow.mul(&m.neg());
    }
    out
}

fn series_mul(a: &[Poly], b: &[Poly]) -> Vec<Poly> {
    let n = a.len();
    (0..n)
        .map(|k| {
            (0..=k).fold(Poly::zero(), |acc, i| {
                if a[i].is_zero() || b[k - i].is_zero() {
                    acc
                } else {
                    acc.add(&a[i].mul(&b[k - i]))
                }
            })
        })
        .collect()
}

impl fmt::Display for FactorCurrent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}]", self.c)?;
        if self.k != 0 {
            write!(f, "*{}^{}", self.var, self.k)?;
        }
        for (m, e) in &self.factors {
            write!(f, "*(1 - {}*{})", m, self.var)?;
            if *e != 1 {
                write!(f, "^{}", e)?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const X: Spectral = Spectral::X;

    #[test]
    fn inverse_factors_are_normalised() {
        let a = Term::w(0, 1, 1);
        let f = FactorCurrent::linear_inv(X, a.clone(), 1);
        let direct = Scalar::one_minus(&a.mul(&Term::spectral(X).inv().unwrap()));
        assert!(f.to_scalar().equals(&direct));
        assert!(f.invert().invert().equals(&f));
    }

    #[test]
    fn kappa_is_inversion_symmetric() {
        let k = FactorCurrent::linear(X, Term::q(1), 1)
            .mul(&FactorCurrent::linear(X, Term::q(-1), 1))
            .mul(&FactorCurrent::linear(X, Term::one(), -2));
        assert!(k.invert().equals(&k));
    }

    #[test]
    fn simple_pole_residue() {
        // 1/(1 − a/x) = x/(x − a): residue of γ/x at a is 1
        let a = Term::w(0, 1, 1);
        let g = FactorCurrent::linear_inv(X, a.clone(), -1);
        let res = g.residues().unwrap();
        assert_eq!(res.len(), 1);
        assert_eq!(res[0].0, a);
        assert!(res[0].1.is_one());
        let double = FactorCurrent::linear(X, Term::one(), -2);
        assert!(matches!(
            double.residues(),
            Err(DeltaError::NonSimplePole(_))
        ));
    }

    #[test]
    fn series_of_geometric() {
        let g = FactorCurrent::linear(X, Term::q(1), -1);
        let (k, s) = g.expand_at_zero(4).unwrap();
        assert_eq!(k, 0);
        for (n, c) in s.iter().enumerate() {
            assert!(c.equals(&Scalar::from_term(Term::q(n as i32))));
        }
        let (top, s) = g.expand_at_infinity(3).unwrap();
        assert_eq!(top, -1);
        // 1/(1 − q x) = −q^{-1} x^{-1} − q^{-2} x^{-2} − …
        assert!(s[0].equals(&Scalar::from_term(Term::q(-1).neg())));
        assert!(s[1].equals(&Scalar::from_term(Term::q(-2).neg())));
    }
}
