//! An independent check on the symbolic engine.
//!
//! Difference operators act on Laurent monomials in the `w^{1/2}` symbols, and every
//! comparison is repeated at random Gaussian-rational points. Residue expansions are
//! checked against truncated power series at zero and at infinity.

use std::collections::{BTreeMap, BTreeSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::delta::{
    canonicalize_compare, expand_by_residues, Discrepancy, Distribution, FactorCurrent,
};
use crate::qtorus::{DMonomial, TorusElement};
use crate::relcheck::{CheckEntry, DetailedRun, RelationCase};
use crate::scalar::{Gauss, Monomial, Scalar, ScalarError, Spectral, Term, Var};

pub mod modp;
use modp::Fp;

/// Height bound for random numerators and denominators.
pub const HEIGHT: i64 = 64;
/// Exponent window for random test functions.
pub const WINDOW: i32 = 3;
/// Test functions drawn per trial.
pub const FUNCTIONS_PER_TRIAL: usize = 3;
const RETRIES: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("no admissible specialization after {0} draws")]
    BadSpecialization(usize),
}

/// A Laurent monomial in the `w_{i,r}^{1/2}` symbols.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TestFunction(pub Monomial);

impl TestFunction {
    pub fn one() -> Self {
        TestFunction(Monomial::one())
    }

    /// A random monomial over `vars` with exponents in `[-WINDOW, WINDOW]`.
    pub fn random(vars: &BTreeSet<Var>, rng: &mut impl Rng) -> Self {
        TestFunction(Monomial::from_pairs(
            vars.iter().map(|&v| (v, rng.gen_range(-WINDOW..=WINDOW))),
        ))
    }

    pub fn as_scalar(&self) -> Scalar {
        Scalar::from_term(Term::mono(self.0.clone()))
    }
}

/// `Σ c_d · f(q^{2d} w)`: each `∂_{i,r}^e` rescales `w_{i,r}` by `q^{2e}`.
pub fn act(x: &TorusElement, f: &TestFunction) -> Scalar {
    let t = Term::mono(f.0.clone());
    x.terms().fold(Scalar::zero(), |acc, (d, c)| {
        acc.add(&c.mul_term(&d.conjugate_term(&t)))
    })
}

/// Applies `x` to an arbitrary coefficient function rather than a monomial.
pub fn act_on(x: &TorusElement, f: &Scalar) -> Scalar {
    x.terms().fold(Scalar::zero(), |acc, (d, c)| {
        acc.add(&c.mul(&crate::qtorus::conjugate_through(d, f)))
    })
}

/// Outcome of a randomized comparison.
#[derive(Debug, Clone, Serialize)]
pub struct Verdict {
    pub symbolic_equal: bool,
    pub numeric_equal: bool,
    pub trials: usize,
    pub seed: u64,
    /// First trial whose numbers disagreed, if any.
    pub first_mismatch: Option<usize>,
}

impl Verdict {
    pub fn consistent(&self) -> bool {
        self.symbolic_equal == self.numeric_equal
    }
}

fn random_rational(rng: &mut impl Rng) -> (i64, i64) {
    let num = loop {
        let n = rng.gen_range(-HEIGHT..=HEIGHT);
        if n != 0 {
            break n;
        }
    };
    (num, rng.gen_range(1..=HEIGHT))
}

/// A nonzero Gaussian rational whose parts have height at most `HEIGHT`.
pub fn random_gauss(rng: &mut impl Rng) -> Gauss {
    let re = random_rational(rng);
    let im = if rng.gen_bool(0.5) {
        random_rational(rng)
    } else {
        (0, 1)
    };
    Gauss::from_parts(re, im)
}

fn collect_vars(s: &Scalar, out: &mut BTreeSet<Var>) {
    let mut polys = vec![s.numerator()];
    polys.extend(s.factors().map(|(p, _)| p));
    for p in polys {
        for (m, _) in p.terms() {
            out.extend(m.pairs().iter().map(|&(v, _)| v));
        }
    }
}

fn distribution_vars(d: &Distribution, out: &mut BTreeSet<Var>) {
    for (s, c) in d.terms() {
        collect_vars(c, out);
        for (v, t) in s.pins() {
            out.insert(Var::Spec(*v));
            out.extend(t.mono.pairs().iter().map(|&(v, _)| v));
        }
        for ((i, r), _) in s.dmon.pairs() {
            out.insert(Var::W(*i, *r));
        }
    }
}

type Key = Vec<(Spectral, Fp)>;
type Point = BTreeMap<Var, Fp>;

/// One side at a point: per support, the evaluated pins, coefficient and shift.
struct Evaluation {
    rows: Vec<(Key, Fp, DMonomial, BTreeMap<Var, Fp>)>,
}

fn evaluate_rows(d: &Distribution, point: &Point) -> Option<Evaluation> {
    let base = |v: Var| point.get(&v).copied();
    let mut rows = Vec::new();
    for (s, c) in d.terms() {
        let mut key = Vec::new();
        let mut local = point.clone();
        for (v, t) in s.pins() {
            let x = modp::eval_scalar(&Scalar::from_term(t.clone()), &base)?;
            local.insert(Var::Spec(*v), x);
            key.push((*v, x));
        }
        let coef = modp::eval_scalar(c, &|v| local.get(&v).copied())?;
        rows.push((key, coef, s.dmon.clone(), local));
    }
    Some(Evaluation { rows })
}

/// The action of every support group on `f`, keyed by the evaluated pins.
fn act_rows(e: &Evaluation, f: &TestFunction) -> Option<BTreeMap<Key, Fp>> {
    let ft = Term::mono(f.0.clone());
    let mut out: BTreeMap<Key, Fp> = BTreeMap::new();
    for (key, coef, dmon, local) in &e.rows {
        let shifted = modp::eval_scalar(&Scalar::from_term(dmon.conjugate_term(&ft)), &|v| {
            local.get(&v).copied()
        })?;
        let acc = out.entry(key.clone()).or_insert(Fp::ZERO);
        *acc = *acc + *coef * shifted;
    }
    out.retain(|_, g| !g.is_zero());
    Some(out)
}

fn draw_point(vars: &BTreeSet<Var>, rng: &mut impl Rng) -> Option<Point> {
    vars.iter()
        .map(|&v| Some((v, Fp::from_gauss(&random_gauss(rng))?)))
        .collect()
}

/// One trial: `Ok(true)` when the two sides agree numerically.
fn trial(
    x: &Distribution,
    y: &Distribution,
    vars: &BTreeSet<Var>,
    wvars: &BTreeSet<Var>,
    seed: u64,
) -> Result<bool, OracleError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..RETRIES {
        let point = draw_point(vars, &mut rng);
        let fs: Vec<TestFunction> = (0..FUNCTIONS_PER_TRIAL)
            .map(|_| TestFunction::random(wvars, &mut rng))
            .collect();
        let sides = point.and_then(|p| Some((evaluate_rows(x, &p)?, evaluate_rows(y, &p)?)));
        let Some((ex, ey)) = sides else { continue };
        let verdicts: Option<Vec<bool>> = fs
            .iter()
            .map(|f| Some(act_rows(&ex, f)? == act_rows(&ey, f)?))
            .collect();
        if let Some(v) = verdicts {
            return Ok(v.into_iter().all(|b| b));
        }
    }
    Err(OracleError::BadSpecialization(RETRIES))
}

/// Compares `x` and `y` at `trials` random points and against the symbolic verdict.
pub fn randomized_equal(
    x: &Distribution,
    y: &Distribution,
    trials: usize,
    seed: u64,
) -> Result<Verdict, OracleError> {
    let symbolic_equal = matches!(canonicalize_compare(x, y), Ok(ds) if ds.is_empty());
    let mut vars = BTreeSet::new();
    distribution_vars(x, &mut vars);
    distribution_vars(y, &mut vars);
    let wvars: BTreeSet<Var> = vars
        .iter()
        .copied()
        .filter(|v| matches!(v, Var::W(..)))
        .collect();
    let results: Vec<Result<bool, OracleError>> = (0..trials)
        .into_par_iter()
        .map(|t| {
            trial(
                x,
                y,
                &vars,
                &wvars,
                seed.wrapping_mul(0x9E37_79B9_7F4A_7C15)
                    .wrapping_add(t as u64),
            )
        })
        .collect();
    let mut first_mismatch = None;
    for (t, r) in results.into_iter().enumerate() {
        if !r? && first_mismatch.is_none() {
            first_mismatch = Some(t);
        }
    }
    Ok(Verdict {
        symbolic_equal,
        numeric_equal: first_mismatch.is_none(),
        trials,
        seed,
        first_mismatch,
    })
}

/// Randomized comparison of two torus elements through their action on test functions.
pub fn randomized_equal_torus(
    x: &TorusElement,
    y: &TorusElement,
    trials: usize,
    seed: u64,
) -> Result<Verdict, OracleError> {
    let lift = |t: &TorusElement| {
        let mut d = Distribution::zero();
        for (m, c) in t.terms() {
            d.add_term(
                crate::delta::Support::new(Vec::new(), m.clone()).expect("no pins"),
                c.clone(),
            )
            .expect("no pins");
        }
        d
    };
    let mut v = randomized_equal(&lift(x), &lift(y), trials, seed)?;
    v.symbolic_equal = x.equals(y);
    Ok(v)
}

/// Currents with more factors than this are checked at specializations.
pub const SYMBOLIC_FACTOR_LIMIT: usize = 8;
/// Random specializations used for large currents.
pub const SPECIALIZATIONS: usize = 3;

/// Checks `γ⁺ − γ⁻` against `expansion` coefficientwise on degrees `-order..=order`.
///
/// `γ⁺` is the expansion at infinity and `γ⁻` the one at zero. A delta term
/// `c·δ(a/x)` contributes `c·a^{-d}` to the coefficient of `x^d`. Small currents are
/// compared as rational functions. Larger ones have every symbol except the
/// expansion variable replaced by random Gaussian rationals first, since their
/// multivariate series are too dense to expand; each specialization is still
/// compared exactly.
pub fn truncated_series_check(
    gamma: &FactorCurrent,
    expansion: &Distribution,
    order: usize,
) -> Result<bool, ScalarError> {
    if gamma.factors().count() <= SYMBOLIC_FACTOR_LIMIT {
        return series_check_exact(gamma, expansion, order);
    }
    let mut vars = BTreeSet::new();
    collect_vars(&gamma.c, &mut vars);
    for (m, _) in gamma.factors() {
        vars.extend(m.mono.pairs().iter().map(|&(v, _)| v));
    }
    distribution_vars(expansion, &mut vars);
    vars.remove(&Var::Spec(gamma.var));
    let mut rng = ChaCha8Rng::seed_from_u64(0x5E21E5);
    let mut done = 0;
    for _ in 0..SPECIALIZATIONS * RETRIES {
        if done == SPECIALIZATIONS {
            break;
        }
        let point: BTreeMap<Var, Gauss> =
            vars.iter().map(|&v| (v, random_gauss(&mut rng))).collect();
        let map = |v: Var| point.get(&v).cloned().map(Term::constant);
        let (Ok(g), Ok(e)) = (gamma.subst(&map), expansion.subst(&map)) else {
            continue;
        };
        if g.factors().count() != gamma.factors().count() || e.len() != expansion.len() {
            // two poles collided; draw again
            continue;
        }
        if !series_check_exact(&g, &e, order)? {
            return Ok(false);
        }
        done += 1;
    }
    Ok(done == SPECIALIZATIONS)
}

fn series_check_exact(
    gamma: &FactorCurrent,
    expansion: &Distribution,
    order: usize,
) -> Result<bool, ScalarError> {
    let n = order as i32;
    let (top, _) = gamma.leading_at_infinity();
    let plus_len = (top + n + 1).max(1) as usize;
    let (top, plus) = gamma.expand_at_infinity(plus_len)?;
    let (low, _) = gamma.leading_at_zero();
    let minus_len = (n - low + 1).max(1) as usize;
    let (low, minus) = gamma.expand_at_zero(minus_len)?;
    let coef = |series: &[Scalar], idx: i32| -> Scalar {
        if idx >= 0 && (idx as usize) < series.len() {
            series[idx as usize].clone()
        } else {
            Scalar::zero()
        }
    };
    let var = gamma.var;
    for d in -n..=n {
        let lhs = coef(&plus, top - d).sub(&coef(&minus, d - low));
        let mut rhs = Scalar::zero();
        for (s, c) in expansion.terms() {
            if !s.dmon.is_one() || s.pins().len() != 1 {
                return Ok(false);
            }
            let Some(a) = s.target(var) else {
                return Ok(false);
            };
            let ad = a.pow(-d).ok_or(ScalarError::DivisionByZero)?;
            rhs = rhs.add(&c.mul_term(&ad));
        }
        if !lhs.equals(&rhs) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Convenience: the delta monomial `∂_{i,r}^e` as a torus element.
pub fn shift(i: u8, r: u16, e: i32) -> TorusElement {
    TorusElement::monomial(Scalar::one(), DMonomial::shift(i, r, e))
}

/// Numeric verdict for one symbolic check.
#[derive(Debug, Clone, Serialize)]
pub struct Concordance {
    pub label: String,
    pub symbolic_pass: bool,
    pub numeric_pass: bool,
}

impl Concordance {
    pub fn agrees(&self) -> bool {
        self.symbolic_pass == self.numeric_pass
    }
}

/// Oracle results for one relation run.
#[derive(Debug, Clone, Serialize)]
pub struct OracleSummary {
    pub seed: u64,
    pub trials: usize,
    pub order: usize,
    pub checks: Vec<Concordance>,
    /// Residue expansions checked against truncated series, and how many failed.
    pub series_checked: usize,
    pub series_failed: Vec<String>,
}

impl OracleSummary {
    pub fn disagreements(&self) -> impl Iterator<Item = &Concordance> {
        self.checks.iter().filter(|c| !c.agrees())
    }

    pub fn all_agree(&self) -> bool {
        self.disagreements().next().is_none() && self.series_failed.is_empty()
    }
}

fn residual_distributions(ds: &[Discrepancy]) -> (Distribution, Distribution) {
    let mut l = Distribution::zero();
    let mut r = Distribution::zero();
    for d in ds {
        l.add_term(d.support.clone(), d.lhs.clone())
            .expect("pinned support");
        r.add_term(d.support.clone(), d.rhs.clone())
            .expect("pinned support");
    }
    (l, r)
}

/// Replays every evaluated relation and lemma identity of `run` numerically, and
/// checks each residue expansion against its truncated series.
pub fn cross_check(
    run: &DetailedRun,
    trials: usize,
    seed: u64,
    order: usize,
) -> Result<OracleSummary, OracleError> {
    let passed = |case: &RelationCase| {
        run.report
            .entries
            .iter()
            .find(|e| e.kind == case.kind && e.i == Some(case.i + 1) && e.j == Some(case.j + 1))
            .map_or(false, CheckEntry::passed)
    };
    let mut checks = Vec::new();
    let mut series_checked = 0;
    let mut series_failed = Vec::new();
    for ev in &run.evaluated {
        let label = format!("{} ({},{})", ev.case.kind, ev.case.i + 1, ev.case.j + 1);
        let main = randomized_equal(&ev.lhs, &ev.rhs, trials, seed)?;
        let mut numeric_pass = main.numeric_equal;
        if !ev.residual.is_empty() {
            let (l, r) = residual_distributions(&ev.residual);
            numeric_pass &= randomized_equal(&l, &r, trials, seed)?.numeric_equal;
        }
        checks.push(Concordance {
            label: label.clone(),
            symbolic_pass: passed(&ev.case),
            numeric_pass,
        });
        for g in &ev.gammas {
            series_checked += 1;
            let ok = expand_by_residues(g)
                .ok()
                .and_then(|e| truncated_series_check(g, &e, order).ok())
                .unwrap_or(false);
            if !ok {
                series_failed.push(format!("{label}: {g}"));
            }
        }
    }
    for id in &run.lemma_identities {
        let v = randomized_equal_torus(&id.lhs, &id.rhs, trials, seed)?;
        checks.push(Concordance {
            label: id.label.clone(),
            symbolic_pass: v.symbolic_equal,
            numeric_pass: v.numeric_equal,
        });
    }
    Ok(OracleSummary {
        seed,
        trials,
        order,
        checks,
        series_checked,
        series_failed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::delta::Support;
    use Spectral::X;

    #[test]
    fn shift_acts_by_q_squared() {
        let f = TestFunction(Monomial::var_pow(Var::W(0, 1), 2));
        let got = act(&shift(0, 1, 1), &f);
        assert!(got.equals(&Scalar::from_term(Term::q(2).mul(&Term::w(0, 1, 1)))));
        assert!(act(&TorusElement::one(), &f).equals(&f.as_scalar()));
    }

    #[test]
    fn defining_relation_has_no_defect() {
        // ∂ w = q² w ∂
        let w = TorusElement::scalar(Scalar::from_term(Term::w(0, 1, 1)));
        let lhs = shift(0, 1, 1).mul(&w);
        let rhs = w.mul(&shift(0, 1, 1)).scale(&Scalar::from_term(Term::q(2)));
        let f = TestFunction(Monomial::var_pow(Var::W(0, 1), -3));
        assert!(act(&lhs.sub(&rhs), &f).is_zero());
    }

    #[test]
    fn geometric_series_matches_delta() {
        let a = Term::w(0, 1, 1);
        // x/(x − a) = 1/(1 − a x^{-1}) as a current in x
        let gamma = FactorCurrent::linear_inv(X, a.clone(), -1);
        let exp = expand_by_residues(&gamma).unwrap();
        assert!(truncated_series_check(&gamma, &exp, 8).unwrap());
        let wrong = exp.scale(&Scalar::int(2)).unwrap();
        assert!(!truncated_series_check(&gamma, &wrong, 8).unwrap());
    }

    #[test]
    fn laurent_polynomial_has_empty_expansion() {
        let gamma = FactorCurrent::power(X, 3).mul(&FactorCurrent::linear(X, Term::q(1), 2));
        let exp = expand_by_residues(&gamma).unwrap();
        assert!(exp.is_empty());
        assert!(truncated_series_check(&gamma, &exp, 8).unwrap());
    }

    #[test]
    fn randomized_agrees_on_self_and_catches_perturbation() {
        let s = Support::new(vec![(X, Term::w(0, 1, 1))], DMonomial::shift(0, 1, -1)).unwrap();
        let x = Distribution::single(s.clone(), Scalar::one_minus(&Term::q(2))).unwrap();
        let v = randomized_equal(&x, &x, 20, 7).unwrap();
        assert!(v.symbolic_equal && v.numeric_equal);
        let eps = Distribution::single(s, Scalar::from_term(Term::q(5))).unwrap();
        let v = randomized_equal(&x, &x.add(&eps), 3, 7).unwrap();
        assert!(!v.symbolic_equal && !v.numeric_equal && v.consistent());
    }
}
