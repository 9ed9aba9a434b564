//! The images of `Θ́_i(u)`, `B_i(u)` and `𝕂_i` in the localized quantum torus.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::delta::{DeltaError, Distribution, FactorCurrent, Support};
use crate::qtorus::{DMonomial, TorusElement};
use crate::satake::{ShiftInstance, ZetaMode};
use crate::scalar::{Gauss, Node, Scalar, ScalarError, Spectral, Term, Var};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ImageError {
    #[error("node {node}: top degree {got} at infinity, expected {expected}")]
    DegreeMismatch {
        node: usize,
        expected: i64,
        got: i64,
    },
    #[error("node {0} is not part of an A_2n pair")]
    WrongCase(usize),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
    #[error(transparent)]
    Delta(#[from] DeltaError),
}

/// Deliberate defects used as negative controls.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Corruption {
    /// Leave out the `ϰ^{θ_i}` factor in the B-images.
    DropKappa,
    /// Use `−℘_i` in place of `℘_i`.
    FlipWp,
    /// Leave out the `δ(u)` constant term.
    OmitConstant,
}

const X: Spectral = Spectral::X;

fn node(i: usize) -> Node {
    i as Node
}

pub fn w_term(i: usize, r: usize) -> Term {
    Term::w(node(i), r as u16, 1)
}

fn z_term(i: usize, s: usize) -> Term {
    Term::var(Var::Z(node(i), s as u16))
}

/// The per-node factored currents the images are assembled from, all in `x`.
#[derive(Debug, Clone)]
pub struct Blocks {
    /// `W_i(x)`
    pub w: Vec<FactorCurrent>,
    /// `Z_i(x)`
    pub z: Vec<FactorCurrent>,
    /// `𝐖_i(x) = W_i(x) W_{τi}(x^{-1})`
    pub bw: Vec<FactorCurrent>,
    /// `𝐙_i(x) = Z_i(x) Z_{τi}(x^{-1})`
    pub bz: Vec<FactorCurrent>,
    /// `ϰ(x)`
    pub kappa: FactorCurrent,
    tau: Vec<usize>,
    v: Vec<u32>,
}

impl Blocks {
    /// `𝐖_{i,r}(x) = W_{τi}(x^{-1}) ∏_{t ≤ 𝐯_i} w_{τi,t}^{-1/2} ∏_{s ≠ r} (1 − w_{i,s}/x)`.
    pub fn bw_r(&self, i: usize, r: usize) -> FactorCurrent {
        let ti = self.tau[i];
        let mut f = self.w[ti].invert();
        for t in 1..=self.v[i] as usize {
            f = f.scale(&Scalar::from_term(Term::w_half(node(ti), t as u16, -1)));
            if t != r {
                f = f.mul(&FactorCurrent::linear_inv(X, w_term(i, t), 1));
            }
        }
        f
    }
}

pub fn build_blocks(inst: &ShiftInstance) -> Blocks {
    let n = inst.rank();
    let w: Vec<FactorCurrent> = (0..n)
        .map(|i| {
            let ti = inst.tau(i);
            (1..=inst.v[i] as usize).fold(FactorCurrent::one(X), |f, r| {
                f.scale(&Scalar::from_term(Term::w_half(node(ti), r as u16, -1)))
                    .mul(&FactorCurrent::linear_inv(X, w_term(i, r), 1))
            })
        })
        .collect();
    let z: Vec<FactorCurrent> = (0..n)
        .map(|i| {
            (1..=inst.w[i].max(0) as usize).fold(FactorCurrent::one(X), |f, s| {
                f.mul(&FactorCurrent::linear_inv(X, z_term(i, s), 1))
            })
        })
        .collect();
    let bw = (0..n).map(|i| w[i].mul(&w[inst.tau(i)].invert())).collect();
    let bz = (0..n).map(|i| z[i].mul(&z[inst.tau(i)].invert())).collect();
    let kappa = FactorCurrent::linear(X, Term::q(1), 1)
        .mul(&FactorCurrent::linear(X, Term::q(-1), 1))
        .mul(&FactorCurrent::linear(X, Term::one(), -2));
    Blocks {
        w,
        z,
        bw,
        bz,
        kappa,
        tau: (0..n).map(|i| inst.tau(i)).collect(),
        v: inst.v.clone(),
    }
}

/// `(x q^℘ − (x q^℘)^{-1})/(x − x^{-1}) = q^℘ (1 − q^{-℘}/x)(1 + q^{-℘}/x) / ((1 − 1/x)(1 + 1/x))`,
/// with `wp2 = 2℘`.
pub fn wp_factor(wp2: i32) -> FactorCurrent {
    if wp2 == 0 {
        return FactorCurrent::one(X);
    }
    let a = Term::q_half(-wp2);
    FactorCurrent::constant(X, Scalar::from_term(Term::q_half(wp2)))
        .mul(&FactorCurrent::linear_inv(X, a.clone(), 1))
        .mul(&FactorCurrent::linear_inv(X, a.neg(), 1))
        .mul(&FactorCurrent::linear_inv(X, Term::one(), -1))
        .mul(&FactorCurrent::linear_inv(X, Term::one().neg(), -1))
}

fn zeta(inst: &ShiftInstance, i: usize) -> Scalar {
    match &inst.zeta {
        ZetaMode::Symbolic => Scalar::var(Var::Zeta(node(i))),
        ZetaMode::Numeric(vals) => Scalar::constant(vals[i].clone()),
    }
}

/// `1/(1 − q²)`
fn inv_one_minus_q2() -> Scalar {
    Scalar::one_minus(&Term::q(2)).inv().expect("nonzero")
}

/// Which part of the B-image a summand comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Side {
    /// `δ(w_{i,r}/(qu)) · … · ∂_{i,r}^{-1}`
    Plus(usize),
    /// `δ(q w_{τi,r} u) · … · ∂_{τi,r}`
    Minus(usize),
    /// `δ(u)` constant term.
    Constant,
}

/// One summand `δ(target/u) · coef · dmon` of a B-image.
#[derive(Debug, Clone)]
pub struct BTerm {
    pub side: Side,
    pub target: Term,
    pub coef: Scalar,
    pub dmon: DMonomial,
}

impl BTerm {
    pub fn chi(&self) -> TorusElement {
        TorusElement::monomial(self.coef.clone(), self.dmon.clone())
    }
}

/// Data of the index identification on an A_2n pair `(i, τi)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct A2nExtension {
    pub node: usize,
    pub n: usize,
}

impl A2nExtension {
    /// `r ↦ r′ = n + 1 − r`
    pub fn prime(&self, r: usize) -> usize {
        self.n + 1 - r
    }
}

/// The full image of one instance.
#[derive(Debug, Clone)]
pub struct GkloImage {
    pub instance: ShiftInstance,
    pub blocks: Blocks,
    /// `Ξ_i(x)`, the image of `Θ́_i(x)`.
    pub xi: Vec<FactorCurrent>,
    pub b: Vec<Vec<BTerm>>,
    pub corruption: Option<Corruption>,
}

pub fn build_xi(
    inst: &ShiftInstance,
    blocks: &Blocks,
    i: usize,
    corruption: Option<Corruption>,
) -> FactorCurrent {
    let ti = inst.tau(i);
    let wp2 = if corruption == Some(Corruption::FlipWp) {
        -inst.wp2[i]
    } else {
        inst.wp2[i]
    };
    let mut xi = FactorCurrent::constant(X, zeta(inst, i).mul(&zeta(inst, ti)))
        .mul(&wp_factor(wp2))
        .mul(&blocks.bz[i])
        .mul(&blocks.bw[i].rescale(&Term::q(1)).inv().expect("nonzero"))
        .mul(&blocks.bw[i].rescale(&Term::q(-1)).inv().expect("nonzero"));
    if inst.theta[i] == 1 {
        xi = xi.mul(&blocks.kappa);
    }
    for j in inst.diagram.neighbours(i) {
        xi = xi.mul(&blocks.bw[j]);
    }
    xi
}

fn eval(f: &FactorCurrent, a: &Term) -> Result<Scalar, ImageError> {
    Ok(f.eval_at(a)?)
}

pub fn build_b_image(
    inst: &ShiftInstance,
    blocks: &Blocks,
    i: usize,
    corruption: Option<Corruption>,
) -> Result<Vec<BTerm>, ImageError> {
    let d = &inst.diagram;
    let o = &inst.orientation;
    let ti = inst.tau(i);
    let zi = zeta(inst, i);
    let mut out = Vec::new();
    let into_i: Vec<usize> = d.neighbours(i).filter(|&j| o.points(j, i)).collect();
    let from_i: Vec<usize> = d.neighbours(i).filter(|&j| o.points(i, j)).collect();
    let bw_at = |i: usize, r: usize| eval(&blocks.bw_r(i, r), &w_term(i, r));

    if d.is_fixed(i) {
        let pre_plus = zi.mul(&inv_one_minus_q2());
        let pre_minus = pre_plus.mul_term(&Term::q(1));
        for r in 1..=inst.v[i] as usize {
            let a = w_term(i, r).mul(&Term::q(-1));
            let ainv = a.inv().expect("nonzero");
            let mut c = pre_plus.mul(&eval(&blocks.z[i], &a)?).div(&bw_at(i, r)?)?;
            for &j in &into_i {
                c = c.mul(&eval(&blocks.bw[j], &a)?);
            }
            for &j in from_i.iter().filter(|&&j| d.is_fixed(j)) {
                c = c.mul(&eval(&blocks.w[j], &ainv)?);
            }
            out.push(BTerm {
                side: Side::Plus(r),
                target: a,
                coef: c,
                dmon: DMonomial::shift(node(i), r as u16, -1),
            });
        }
        for r in 1..=inst.v[i] as usize {
            let a = w_term(i, r).mul(&Term::q(1)).inv().expect("nonzero");
            let ainv = a.inv().expect("nonzero");
            let mut c = pre_minus.mul(&eval(&blocks.z[i], &a)?).div(&bw_at(i, r)?)?;
            if inst.theta[i] == 1 && corruption != Some(Corruption::DropKappa) {
                c = c.mul(&eval(&blocks.kappa, &a)?);
            }
            for &j in &from_i {
                let f = if d.is_fixed(j) {
                    &blocks.w[j]
                } else {
                    &blocks.bw[j]
                };
                c = c.mul(&eval(f, &ainv)?);
            }
            out.push(BTerm {
                side: Side::Minus(r),
                target: a,
                coef: c,
                dmon: DMonomial::shift(node(i), r as u16, 1),
            });
        }
        if inst.theta[i] == 1 && corruption != Some(Corruption::OmitConstant) {
            let one = Term::one();
            let mut c = zi
                .mul_term(&Term::constant(Gauss::i()))
                .mul(&eval(&blocks.z[i], &one)?)
                .div(&Scalar::binomial(&Term::one(), &Term::q(1).neg()))?
                .div(&eval(&blocks.bw[i], &Term::q(1))?)?;
            for j in d.neighbours(i) {
                c = c.mul(&eval(&blocks.w[j], &one)?);
            }
            out.push(BTerm {
                side: Side::Constant,
                target: one,
                coef: c,
                dmon: DMonomial::one(),
            });
        }
    } else {
        let pre_plus = zi
            .mul(&inv_one_minus_q2())
            .mul_term(&Term::q_half(inst.wp2[i].abs()));
        let pre_minus = zi.mul(&inv_one_minus_q2()).mul_term(&Term::q(1).neg());
        for r in 1..=inst.v[i] as usize {
            let a = w_term(i, r).mul(&Term::q(-1));
            let mut c = pre_plus.mul(&eval(&blocks.z[i], &a)?).div(&bw_at(i, r)?)?;
            for &j in &into_i {
                c = c.mul(&eval(&blocks.bw[j], &a)?);
            }
            out.push(BTerm {
                side: Side::Plus(r),
                target: a,
                coef: c,
                dmon: DMonomial::shift(node(i), r as u16, -1),
            });
        }
        let from_ti: Vec<usize> = d.neighbours(ti).filter(|&k| o.points(ti, k)).collect();
        for r in 1..=inst.v[ti] as usize {
            let a = w_term(ti, r).mul(&Term::q(1)).inv().expect("nonzero");
            let ainv = a.inv().expect("nonzero");
            let mut c = pre_minus
                .mul(&eval(&blocks.z[i], &a)?)
                .div(&bw_at(ti, r)?)?;
            for &k in &from_ti {
                c = c.mul(&eval(&blocks.bw[k], &ainv)?);
            }
            out.push(BTerm {
                side: Side::Minus(r),
                target: a,
                coef: c,
                dmon: DMonomial::shift(node(ti), r as u16, 1),
            });
        }
    }
    Ok(out)
}

impl GkloImage {
    pub fn build(inst: &ShiftInstance) -> Result<Self, ImageError> {
        Self::build_with(inst, None)
    }

    pub fn build_with(
        inst: &ShiftInstance,
        corruption: Option<Corruption>,
    ) -> Result<Self, ImageError> {
        let blocks = build_blocks(inst);
        let xi = (0..inst.rank())
            .map(|i| build_xi(inst, &blocks, i, corruption))
            .collect();
        let b = (0..inst.rank())
            .map(|i| build_b_image(inst, &blocks, i, corruption))
            .collect::<Result<_, _>>()?;
        Ok(GkloImage {
            instance: inst.clone(),
            blocks,
            xi,
            b,
            corruption,
        })
    }

    pub fn rank(&self) -> usize {
        self.instance.rank()
    }

    /// `Ξ_i` in the spectral variable `var`.
    pub fn xi_in(&self, i: usize, var: Spectral) -> FactorCurrent {
        self.xi[i].with_var(var)
    }

    /// `Φ(B_i(var))` as a pinned distribution.
    pub fn b_dist(&self, i: usize, var: Spectral) -> Result<Distribution, DeltaError> {
        let mut d = Distribution::zero();
        for t in &self.b[i] {
            d.add_term(
                Support::new(vec![(var, t.target.clone())], t.dmon.clone())?,
                t.coef.clone(),
            )?;
        }
        Ok(d)
    }

    /// `χ^+_{i,r}` (with `r = 0` the constant term) on a fixed node.
    pub fn chi_plus(&self, i: usize, r: usize) -> TorusElement {
        let side = if r == 0 {
            Side::Constant
        } else {
            Side::Plus(r)
        };
        self.find(i, side)
            .map(BTerm::chi)
            .unwrap_or_else(TorusElement::zero)
    }

    /// `χ^-_{i,r}` on a fixed node (`χ^-_{i,0} = 0`).
    pub fn chi_minus(&self, i: usize, r: usize) -> TorusElement {
        if r == 0 {
            return TorusElement::zero();
        }
        self.find(i, Side::Minus(r))
            .map(BTerm::chi)
            .unwrap_or_else(TorusElement::zero)
    }

    fn find(&self, i: usize, side: Side) -> Option<&BTerm> {
        self.b[i].iter().find(|t| t.side == side)
    }

    /// `w_{i,r}^{±1}` with `w_{i,0} = q`, matching the pin of `χ^±_{i,r}` as `w^{±1}/q`.
    pub fn w_signed(i: usize, r: usize, plus: bool) -> Term {
        let w = if r == 0 { Term::q(1) } else { w_term(i, r) };
        if plus {
            w
        } else {
            w.inv().expect("nonzero")
        }
    }

    pub fn extend_a2n(&self, i: usize) -> Result<A2nExtension, ImageError> {
        let ti = self.instance.tau(i);
        if ti == i || self.instance.c(i, ti) != -1 {
            return Err(ImageError::WrongCase(i + 1));
        }
        Ok(A2nExtension {
            node: i,
            n: (self.instance.v[i] + self.instance.v[ti]) as usize,
        })
    }

    /// Extended `w_{i,r}` for `1 ≤ r ≤ n_i`.
    pub fn w_ext(&self, ext: &A2nExtension, r: usize) -> Term {
        let i = ext.node;
        if r <= self.instance.v[i] as usize {
            w_term(i, r)
        } else {
            w_term(self.instance.tau(i), ext.prime(r))
                .inv()
                .expect("nonzero")
        }
    }

    /// Extended `∂_{i,r}`.
    pub fn d_ext(&self, ext: &A2nExtension, r: usize) -> DMonomial {
        let i = ext.node;
        if r <= self.instance.v[i] as usize {
            DMonomial::shift(node(i), r as u16, 1)
        } else {
            DMonomial::shift(node(self.instance.tau(i)), ext.prime(r) as u16, -1)
        }
    }

    /// `χ_{i,r}` for `1 ≤ r ≤ n_i`, so that `B_i(u) = Σ_r δ(w_{i,r}/(qu)) χ_{i,r}`.
    pub fn chi_ext(&self, ext: &A2nExtension, r: usize) -> TorusElement {
        let i = ext.node;
        let side = if r <= self.instance.v[i] as usize {
            Side::Plus(r)
        } else {
            Side::Minus(ext.prime(r))
        };
        self.find(i, side)
            .map(BTerm::chi)
            .unwrap_or_else(TorusElement::zero)
    }

    /// Image of `𝕂_{τi}`: the coefficient of `u^{ℓ_{τi}}` in `Ξ_i` at `u = ∞`.
    pub fn leading_coefficient_k(&self, i: usize) -> Result<Scalar, ImageError> {
        let expected = self.instance.ell[self.instance.tau(i)];
        let (deg, c) = self.xi[i].leading_at_infinity();
        if deg as i64 != expected {
            return Err(ImageError::DegreeMismatch {
                node: i + 1,
                expected,
                got: deg as i64,
            });
        }
        Ok(c)
    }

    /// Sum of the B-summands per side, reassembled as a distribution in `var`.
    pub fn reassemble(&self, i: usize, var: Spectral) -> Result<Distribution, DeltaError> {
        let d = &self.instance.diagram;
        let mut parts: BTreeMap<Support, Scalar> = BTreeMap::new();
        if d.is_fixed(i) {
            for r in 0..=self.instance.v[i] as usize {
                let w = Self::w_signed(i, r, true);
                for (dm, c) in self.chi_plus(i, r).terms() {
                    let pin = if r == 0 {
                        Term::one()
                    } else {
                        w.mul(&Term::q(-1))
                    };
                    parts.insert(Support::new(vec![(var, pin)], dm.clone())?, c.clone());
                }
                if r > 0 {
                    let pin = Self::w_signed(i, r, false).mul(&Term::q(-1));
                    for (dm, c) in self.chi_minus(i, r).terms() {
                        parts.insert(
                            Support::new(vec![(var, pin.clone())], dm.clone())?,
                            c.clone(),
                        );
                    }
                }
            }
        } else {
            for t in &self.b[i] {
                parts.insert(
                    Support::new(vec![(var, t.target.clone())], t.dmon.clone())?,
                    t.coef.clone(),
                );
            }
        }
        let mut out = Distribution::zero();
        for (s, c) in parts {
            out.add_term(s, c)?;
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::satake::catalog_instance;

    #[test]
    fn split_a1_w_block() {
        let inst = catalog_instance("splitA1-v1-t0").unwrap();
        let b = build_blocks(&inst);
        let expect = FactorCurrent::constant(X, Scalar::from_term(Term::w_half(0, 1, -1)))
            .mul(&FactorCurrent::linear_inv(X, w_term(0, 1), 1));
        assert!(b.w[0].equals(&expect));
    }

    #[test]
    fn b_image_term_counts() {
        let inst = catalog_instance("splitA2-v11-t10").unwrap();
        let img = GkloImage::build(&inst).unwrap();
        assert_eq!(img.b[0].len(), 3);
        assert_eq!(img.b[1].len(), 2);
        assert!(img.b[0]
            .iter()
            .any(|t| t.side == Side::Constant && t.target.is_one()));
        let omitted = GkloImage::build_with(&inst, Some(Corruption::OmitConstant)).unwrap();
        assert_eq!(omitted.b[0].len(), 2);
    }

    #[test]
    fn quasi_split_prefactor_has_half_power() {
        let inst = catalog_instance("qsA2-v11").unwrap();
        assert_eq!(inst.wp2[0], -1);
        let img = GkloImage::build(&inst).unwrap();
        assert_eq!(img.b[0].len(), 2);
    }

    #[test]
    fn a2n_extension_indices() {
        let inst = catalog_instance("qsA2-v11").unwrap();
        let img = GkloImage::build(&inst).unwrap();
        let ext = img.extend_a2n(0).unwrap();
        assert_eq!(ext.n, 2);
        assert_eq!(img.w_ext(&ext, 2), w_term(1, 1).inv().unwrap());
        assert_eq!(
            img.d_ext(&ext, 2).mul(&DMonomial::shift(1, 1, 1)),
            DMonomial::one()
        );
        assert!((1..=2).all(|r| ext.prime(ext.prime(r)) == r));
        let split = GkloImage::build(&catalog_instance("splitA1-v1-t0").unwrap()).unwrap();
        assert_eq!(split.extend_a2n(0), Err(ImageError::WrongCase(1)));
    }

    #[test]
    fn degree_matches_and_corruption_is_caught() {
        for inst in crate::satake::build_catalog() {
            let img = GkloImage::build(&inst).unwrap();
            for i in 0..inst.rank() {
                img.leading_coefficient_k(i).unwrap();
            }
        }
        let inst = catalog_instance("splitA1-v1-t0")
            .unwrap()
            .with_multiplicities_unchecked(vec![2]);
        let img = GkloImage::build(&inst).unwrap();
        assert!(matches!(
            img.leading_coefficient_k(0),
            Err(ImageError::DegreeMismatch { .. })
        ));
    }

    #[test]
    fn reassembly_matches_b_image() {
        for name in ["splitA1-v2-t1", "splitA2-v11-t10", "qsA3-v111-t1"] {
            let img = GkloImage::build(&catalog_instance(name).unwrap()).unwrap();
            for i in 0..img.rank() {
                let a = img.reassemble(i, Spectral::U).unwrap();
                let b = img.b_dist(i, Spectral::U).unwrap();
                assert!(crate::delta::canonicalize_compare(&a, &b)
                    .unwrap()
                    .is_empty());
            }
        }
    }
}
