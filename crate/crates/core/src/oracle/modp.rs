//! Arithmetic in `F_p` for `p = 2^64 − 2^32 + 1`.
//!
//! Since `p ≡ 1 (mod 4)` the field contains a square root of −1, so Gaussian
//! rationals whose denominators are prime to `p` map into it by a ring homomorphism.

use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::ToPrimitive;

use crate::scalar::{Gauss, Poly, Scalar, Var};

pub const P: u64 = 0xFFFF_FFFF_0000_0001;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Fp(u64);

impl Fp {
    pub const ZERO: Fp = Fp(0);
    pub const ONE: Fp = Fp(1);

    pub fn new(x: u64) -> Self {
        Fp(x % P)
    }

    pub fn value(self) -> u64 {
        self.0
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }

    fn from_bigint(n: &BigInt) -> Self {
        let r = n % BigInt::from(P);
        let r = if r < BigInt::from(0) {
            r + BigInt::from(P)
        } else {
            r
        };
        Fp(r.to_u64().expect("reduced"))
    }

    pub fn pow(self, mut e: u64) -> Fp {
        let mut acc = Fp::ONE;
        let mut b = self;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * b;
            }
            b = b * b;
            e >>= 1;
        }
        acc
    }

    pub fn inv(self) -> Option<Fp> {
        (!self.is_zero()).then(|| self.pow(P - 2))
    }

    pub fn powi(self, e: i32) -> Option<Fp> {
        let b = if e < 0 { self.inv()? } else { self };
        Some(b.pow(e.unsigned_abs() as u64))
    }

    /// A fixed square root of −1.
    pub fn sqrt_minus_one() -> Fp {
        // 7 generates the multiplicative group.
        Fp(7).pow((P - 1) / 4)
    }

    /// Image of a Gaussian rational, `None` if a denominator vanishes mod p.
    pub fn from_gauss(g: &Gauss) -> Option<Fp> {
        let part = |r: &num_rational::BigRational| -> Option<Fp> {
            Some(Fp::from_bigint(r.numer()) * Fp::from_bigint(r.denom()).inv()?)
        };
        Some(part(&g.re)? + Fp::sqrt_minus_one() * part(&g.im)?)
    }
}

impl Add for Fp {
    type Output = Fp;
    fn add(self, o: Fp) -> Fp {
        Fp(((self.0 as u128 + o.0 as u128) % P as u128) as u64)
    }
}

impl Sub for Fp {
    type Output = Fp;
    fn sub(self, o: Fp) -> Fp {
        self + (-o)
    }
}

impl Neg for Fp {
    type Output = Fp;
    fn neg(self) -> Fp {
        if self.0 == 0 {
            self
        } else {
            Fp(P - self.0)
        }
    }
}

impl Mul for Fp {
    type Output = Fp;
    fn mul(self, o: Fp) -> Fp {
        Fp(((self.0 as u128 * o.0 as u128) % P as u128) as u64)
    }
}

/// Value of a polynomial, `None` if a variable is unassigned.
pub fn eval_poly(p: &Poly, val: &dyn Fn(Var) -> Option<Fp>) -> Option<Fp> {
    let mut acc = Fp::ZERO;
    for (m, c) in p.terms() {
        let mut t = Fp::from_gauss(c)?;
        for &(v, e) in m.pairs() {
            t = t * val(v)?.powi(e)?;
        }
        acc = acc + t;
    }
    Some(acc)
}

/// Value of a factored scalar, `None` if a variable is unassigned or a
/// denominator vanishes.
pub fn eval_scalar(s: &Scalar, val: &dyn Fn(Var) -> Option<Fp>) -> Option<Fp> {
    let mut acc = eval_poly(s.numerator(), val)?;
    for (a, e) in s.factors() {
        let x = eval_poly(a, val)?;
        if x.is_zero() && e < 0 {
            return None;
        }
        acc = acc * x.powi(e.max(0))?;
        if e < 0 {
            acc = acc * x.inv()?.pow(e.unsigned_abs() as u64);
        }
    }
    Some(acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_root_of_minus_one() {
        let i = Fp::sqrt_minus_one();
        assert_eq!(i * i, -Fp::ONE);
    }

    #[test]
    fn gauss_image_is_multiplicative() {
        let a = Gauss::from_parts((3, 7), (-5, 11));
        let b = Gauss::from_parts((-2, 9), (1, 64));
        let ab = &a * &b;
        assert_eq!(
            Fp::from_gauss(&ab),
            Some(Fp::from_gauss(&a).unwrap() * Fp::from_gauss(&b).unwrap())
        );
    }
}
