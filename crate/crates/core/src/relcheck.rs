//! Evaluates both sides of every defining relation under the image map and
//! compares them support by support.

use std::fmt;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::delta::{
    canonicalize_compare, DeltaError, Discrepancy, Distribution, FactorCurrent, Support,
};
use crate::igklo::{Corruption, GkloImage, ImageError};
use crate::qtorus::{DMonomial, TorusElement};
use crate::satake::ShiftInstance;
use crate::scalar::{Scalar, Spectral, Term};

use Spectral::{U, U1, U2, V};

/// Relation families, plus the named suites reported alongside them.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Kind {
    HH,
    HB,
    BB1,
    BB2,
    BB3,
    BB4,
    BB5,
    Serre1,
    Serre2,
    Serre3,
    Deg,
    Symmetry,
    ChiLemma,
    QsLemma,
    Identity,
}

impl Kind {
    pub const RELATIONS: [Kind; 11] = [
        Kind::HH,
        Kind::HB,
        Kind::BB1,
        Kind::BB2,
        Kind::BB3,
        Kind::BB4,
        Kind::BB5,
        Kind::Serre1,
        Kind::Serre2,
        Kind::Serre3,
        Kind::Deg,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Kind::HH => "HH",
            Kind::HB => "HB",
            Kind::BB1 => "BB1",
            Kind::BB2 => "BB2",
            Kind::BB3 => "BB3",
            Kind::BB4 => "BB4",
            Kind::BB5 => "BB5",
            Kind::Serre1 => "Serre1",
            Kind::Serre2 => "Serre2",
            Kind::Serre3 => "Serre3",
            Kind::Deg => "DEG",
            Kind::Symmetry => "Symmetry",
            Kind::ChiLemma => "ChiLemma",
            Kind::QsLemma => "QsLemma",
            Kind::Identity => "Identity",
        }
    }

    pub fn parse(s: &str) -> Option<Kind> {
        Kind::RELATIONS
            .iter()
            .chain(
                [
                    Kind::Symmetry,
                    Kind::ChiLemma,
                    Kind::QsLemma,
                    Kind::Identity,
                ]
                .iter(),
            )
            .copied()
            .find(|k| k.name().eq_ignore_ascii_case(s))
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Which Cartan current sits in the second slot of the `c_{i,τi} = 0` relation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub enum Bb1Convention {
    /// `Θ́_i(u) − Θ́_{τi}(v)`
    #[default]
    TauI,
    /// `Θ́_i(u) − Θ́_i(v)`
    I,
}

#[derive(Debug, Clone, Default)]
pub struct CheckOptions {
    pub bb1: Bb1Convention,
    pub corruption: Option<Corruption>,
}

/// One relation instance: a kind and an ordered node pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct RelationCase {
    pub kind: Kind,
    pub i: usize,
    pub j: usize,
}

/// The B-B relation governing the ordered pair `(i, j)`.
pub fn bb_kind(inst: &ShiftInstance, i: usize, j: usize) -> Kind {
    let ti = inst.tau(i);
    if i == j && ti == i {
        Kind::BB2
    } else if j == ti {
        if inst.c(i, ti) == 0 {
            Kind::BB1
        } else {
            Kind::BB3
        }
    } else if inst.c(i, j) == 0 {
        Kind::BB4
    } else {
        Kind::BB5
    }
}

/// The Serre relation governing the ordered pair `(i, j)`, if any.
pub fn serre_kind(inst: &ShiftInstance, i: usize, j: usize) -> Option<Kind> {
    let ti = inst.tau(i);
    if i == j || inst.c(i, j) != -1 {
        return None;
    }
    Some(if j == ti {
        Kind::Serre3
    } else if ti == i {
        Kind::Serre2
    } else {
        Kind::Serre1
    })
}

/// All applicable relation cases for an instance, in a fixed order.
pub fn enumerate_cases(inst: &ShiftInstance) -> Vec<RelationCase> {
    let n = inst.rank();
    let mut out = Vec::new();
    for i in 0..n {
        for j in 0..n {
            out.push(RelationCase {
                kind: Kind::HH,
                i,
                j,
            });
            out.push(RelationCase {
                kind: Kind::HB,
                i,
                j,
            });
            out.push(RelationCase {
                kind: bb_kind(inst, i, j),
                i,
                j,
            });
            if let Some(k) = serre_kind(inst, i, j) {
                out.push(RelationCase { kind: k, i, j });
            }
        }
        out.push(RelationCase {
            kind: Kind::Deg,
            i,
            j: i,
        });
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

/// A printable record of one disagreeing support.
#[derive(Debug, Clone, Serialize)]
pub struct DiscrepancyRecord {
    pub pins: String,
    pub dmon: String,
    pub lhs: String,
    pub rhs: String,
}

impl From<&Discrepancy> for DiscrepancyRecord {
    fn from(d: &Discrepancy) -> Self {
        let pins = d
            .support
            .pins()
            .iter()
            .map(|(v, t)| format!("{}={}", v, t))
            .collect::<Vec<_>>()
            .join(", ");
        DiscrepancyRecord {
            pins,
            dmon: d.support.dmon.to_string(),
            lhs: d.lhs.to_string(),
            rhs: d.rhs.to_string(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckEntry {
    pub kind: Kind,
    pub label: String,
    pub i: Option<usize>,
    pub j: Option<usize>,
    pub status: Status,
    pub discrepancies: Vec<DiscrepancyRecord>,
    pub note: Option<String>,
    pub millis: u128,
}

impl CheckEntry {
    fn new(kind: Kind, label: impl Into<String>, nodes: Option<(usize, usize)>) -> Self {
        CheckEntry {
            kind,
            label: label.into(),
            i: nodes.map(|p| p.0 + 1),
            j: nodes.map(|p| p.1 + 1),
            status: Status::Pass,
            discrepancies: Vec::new(),
            note: None,
            millis: 0,
        }
    }

    fn with_discrepancies(mut self, ds: &[Discrepancy]) -> Self {
        self.discrepancies = ds.iter().map(DiscrepancyRecord::from).collect();
        self.status = if ds.is_empty() {
            Status::Pass
        } else {
            Status::Fail
        };
        self
    }

    fn failed(mut self, note: impl Into<String>) -> Self {
        self.status = Status::Fail;
        self.note = Some(note.into());
        self
    }

    pub fn passed(&self) -> bool {
        self.status != Status::Fail
    }
}

impl fmt::Display for CheckEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = match self.status {
            Status::Pass => "pass",
            Status::Fail => "FAIL",
            Status::Skipped => "skip",
        };
        write!(f, "{:<5} {:<9} {}", status, self.kind, self.label)?;
        if let Some(n) = &self.note {
            write!(f, "  ({})", n)?;
        }
        for d in self.discrepancies.iter().take(3) {
            write!(
                f,
                "\n        at [{}] {}: lhs = {}, rhs = {}",
                d.pins, d.dmon, d.lhs, d.rhs
            )?;
        }
        if self.discrepancies.len() > 3 {
            write!(f, "\n        … {} more", self.discrepancies.len() - 3)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckReport {
    pub instance: String,
    pub entries: Vec<CheckEntry>,
    pub millis: u128,
}

impl CheckReport {
    pub fn all_pass(&self) -> bool {
        self.entries.iter().all(CheckEntry::passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckEntry> {
        self.entries.iter().filter(|e| !e.passed())
    }
}

/// Both sides of one relation, with every current handed to the residue expansion.
#[derive(Debug, Clone)]
pub struct Evaluated {
    pub case: RelationCase,
    pub lhs: Distribution,
    pub rhs: Distribution,
    pub gammas: Vec<FactorCurrent>,
    /// Disagreements that cannot be written as delta-supported terms.
    pub residual: Vec<Discrepancy>,
}

fn sp(s: Spectral) -> Term {
    Term::spectral(s)
}

fn sc(t: Term) -> Scalar {
    Scalar::from_term(t)
}

/// `a − b`
fn diff(a: Term, b: Term) -> Scalar {
    Scalar::binomial(&a, &b)
}

/// `(x − x^{-1})` as a factored current.
fn antisym(x: Spectral) -> FactorCurrent {
    FactorCurrent::power(x, 1)
        .mul(&FactorCurrent::linear_inv(x, Term::one(), 1))
        .mul(&FactorCurrent::linear_inv(x, Term::one().neg(), 1))
}

/// `δ(ab)` for spectral `a`, `b`, as the linked pin `b ↦ a^{-1}`.
fn delta_product(a: Spectral, b: Spectral) -> Result<Distribution, DeltaError> {
    Distribution::delta(b, sp(a).inv().expect("nonzero"))
}

/// `(a − q^c b) X(a) Y(b) + (b − q^c a) Y(b) X(a)`
fn q_commutator(
    x: &Distribution,
    y: &Distribution,
    a: Spectral,
    b: Spectral,
    c: i32,
) -> Result<Distribution, DeltaError> {
    let first = x.mul(y)?.scale(&diff(sp(a), Term::q(c).mul(&sp(b))))?;
    let second = y.mul(x)?.scale(&diff(sp(b), Term::q(c).mul(&sp(a))))?;
    Ok(first.add(&second))
}

/// `Sym_{u1,u2} [B_i(u1), [B_i(u2), B_j(v)]_q]_{q^{-1}}`
fn serre_lhs(img: &GkloImage, i: usize, j: usize) -> Result<Distribution, DeltaError> {
    let b1 = img.b_dist(i, U1)?;
    let b2 = img.b_dist(i, U2)?;
    let bj = img.b_dist(j, V)?;
    let inner = Distribution::bracket(&b2, &bj, &sc(Term::q(1)))?;
    let outer = Distribution::bracket(&b1, &inner, &sc(Term::q(-1)))?;
    outer.symmetrize(U1, U2)
}

/// `δ(uv) · (γ⁺ − γ⁻)` with `γ` in `u`.
fn paired_residues(gamma: &FactorCurrent, other: Spectral) -> Result<Distribution, DeltaError> {
    delta_product(gamma.var, other)?.mul(&Distribution::from_residues(gamma)?)
}

pub fn evaluate(
    img: &GkloImage,
    case: RelationCase,
    opts: &CheckOptions,
) -> Result<Evaluated, ImageError> {
    let RelationCase { kind, i, j } = case;
    let inst = &img.instance;
    let mut gammas = Vec::new();
    let mut residual = Vec::new();
    let zero = Distribution::zero();
    let (lhs, rhs) = match kind {
        Kind::HH => {
            let a = Distribution::scalar(img.xi_in(i, U).to_scalar());
            let b = Distribution::scalar(img.xi_in(j, V).to_scalar());
            (a.mul(&b)?, b.mul(&a)?)
        }
        Kind::HB => {
            let xi = Distribution::scalar(img.xi_in(i, U).to_scalar());
            let bj = img.b_dist(j, V)?;
            let (c, ct) = (inst.c(i, j), inst.c(inst.tau(i), j));
            let (u, v, ui) = (sp(U), sp(V), sp(U).inv().expect("nonzero"));
            let ratio = diff(Term::q(c).mul(&u), v.clone())
                .mul(&diff(Term::q(ct).mul(&ui), v.clone()))
                .div(&diff(u, Term::q(c).mul(&v)).mul(&diff(ui, Term::q(ct).mul(&v))))?;
            (xi.mul(&bj)?, bj.mul(&xi)?.scale(&ratio)?)
        }
        Kind::BB1 => {
            let lhs =
                Distribution::bracket(&img.b_dist(i, U)?, &img.b_dist(j, V)?, &Scalar::one())?;
            let k = diff(Term::q(1), Term::q(-1)).inv()?;
            let gamma = img.xi_in(i, U).scale(&k);
            let rhs = paired_residues(&gamma, V)?;
            gammas.push(gamma);
            if opts.bb1 == Bb1Convention::I {
                // Θ́_i(v) at v = u^{-1} expands Ξ_{τi}(u) at 0, which differs from Ξ_i(u) at 0
                // by a series that is not delta-supported unless the currents agree.
                let d = img
                    .xi_in(i, U)
                    .to_scalar()
                    .sub(&img.xi_in(inst.tau(i), U).to_scalar())
                    .mul(&k);
                if !d.is_zero() {
                    residual.push(Discrepancy {
                        support: Support::new(
                            vec![(V, sp(U).inv().expect("nonzero"))],
                            DMonomial::one(),
                        )?,
                        lhs: Scalar::zero(),
                        rhs: d,
                    });
                }
            }
            (lhs, rhs)
        }
        Kind::BB2 | Kind::BB3 => {
            let (c, k) = if kind == Kind::BB2 {
                (2, diff(Term::q(-1), Term::q(1)).inv()?)
            } else {
                (-1, diff(Term::q(2), Term::one()).inv()?)
            };
            let lhs = q_commutator(&img.b_dist(i, U)?, &img.b_dist(j, V)?, U, V, c)?;
            let gamma = antisym(U).mul(&img.xi_in(i, U)).scale(&k);
            let rhs = paired_residues(&gamma, V)?;
            gammas.push(gamma);
            (lhs, rhs)
        }
        Kind::BB4 => (
            Distribution::bracket(&img.b_dist(i, U)?, &img.b_dist(j, V)?, &Scalar::one())?,
            zero,
        ),
        Kind::BB5 => (
            q_commutator(&img.b_dist(i, U)?, &img.b_dist(j, V)?, U, V, inst.c(i, j))?,
            zero,
        ),
        Kind::Serre1 => (serre_lhs(img, i, j)?, zero),
        Kind::Serre2 => {
            let gamma = antisym(U1).mul(&img.xi_in(i, U1));
            let deltas = paired_residues(&gamma, U2)?;
            gammas.push(gamma);
            let (u1, u2, v) = (sp(U1), sp(U2), sp(V));
            let pre = sc(v.clone())
                .div(&diff(u1, Term::q(1).mul(&v)).mul(&diff(u2, Term::q(1).mul(&v))))?;
            let rhs = deltas.mul(&img.b_dist(j, V)?)?.scale(&pre)?;
            (serre_lhs(img, i, j)?, rhs)
        }
        Kind::Serre3 => {
            let mut rhs = Distribution::zero();
            for t in &img.b[i] {
                let m = &t.target;
                let mi = m.inv().expect("nonzero");
                // (1+q²)(u2 − v)v / ((q u1 − v)(v − q² u1^{-1})) with v = u2^{-1}, u1 = M
                let pre =
                    FactorCurrent::constant(U2, Scalar::binomial(&Term::one(), &Term::q(2).neg()))
                        .mul(&FactorCurrent::linear_inv(U2, Term::one(), 1))
                        .mul(&FactorCurrent::linear_inv(U2, Term::one().neg(), 1))
                        .mul(
                            &FactorCurrent::binomial(U2, Term::q(1).mul(m), Term::one(), -1)
                                .inv()?,
                        )
                        .mul(
                            &FactorCurrent::binomial(
                                U2,
                                Term::q(2).mul(&mi).neg(),
                                Term::one().neg(),
                                -1,
                            )
                            .inv()?,
                        );
                let gamma = pre.mul(&img.xi_in(i, U2));
                let term = Distribution::single(
                    Support::new(vec![(U1, m.clone())], t.dmon.clone())?,
                    t.coef.clone(),
                )?;
                rhs = rhs.add(&paired_residues(&gamma, V)?.mul(&term)?);
                gammas.push(gamma);
            }
            (serre_lhs(img, i, j)?, rhs.symmetrize(U1, U2)?)
        }
        Kind::Deg | Kind::Symmetry | Kind::ChiLemma | Kind::QsLemma | Kind::Identity => {
            unreachable!("not a two-sided relation")
        }
    };
    Ok(Evaluated {
        case,
        lhs,
        rhs,
        gammas,
        residual,
    })
}

fn case_label(img: &GkloImage, case: &RelationCase) -> String {
    format!(
        "{} ({},{}) on {}",
        case.kind,
        case.i + 1,
        case.j + 1,
        img.instance.name
    )
}

/// Runs one relation and records the outcome; failures never panic.
pub fn check_pair_relation(
    img: &GkloImage,
    case: RelationCase,
    opts: &CheckOptions,
) -> (CheckEntry, Option<Evaluated>) {
    let start = Instant::now();
    let entry = CheckEntry::new(case.kind, case_label(img, &case), Some((case.i, case.j)));
    let (mut entry, ev) = if case.kind == Kind::Deg {
        match img.leading_coefficient_k(case.i) {
            Ok(_) => (entry, None),
            Err(e) => (entry.failed(e.to_string()), None),
        }
    } else {
        match evaluate(img, case, opts) {
            Err(e) => (entry.failed(e.to_string()), None),
            Ok(ev) => match canonicalize_compare(&ev.lhs, &ev.rhs) {
                Err(e) => (entry.failed(e.to_string()), Some(ev)),
                Ok(mut ds) => {
                    ds.extend(ev.residual.iter().cloned());
                    let mut entry = entry.with_discrepancies(&ds);
                    if let Some(r) = uniform_ratio(&ds) {
                        entry.note = Some(format!("lhs/rhs = {r} on every support"));
                    }
                    if matches!(case.kind, Kind::Serre2 | Kind::Serre3) {
                        entry.note = Some(
                            if case.kind == Kind::Serre2 {
                                "prefactor evaluated at pins"
                            } else {
                                "prefactor folded into residues"
                            }
                            .to_string(),
                        );
                    }
                    (entry, Some(ev))
                }
            },
        }
    };
    entry.millis = start.elapsed().as_millis();
    (entry, ev)
}

/// The common value of lhs/rhs when every discrepancy differs by the same factor.
pub fn uniform_ratio(ds: &[Discrepancy]) -> Option<Scalar> {
    let mut ratios = ds.iter().map(|d| {
        if d.rhs.is_zero() || d.lhs.is_zero() {
            None
        } else {
            d.lhs.div(&d.rhs).ok()
        }
    });
    let first = ratios.next()??;
    for r in ratios {
        if !r?.equals(&first) {
            return None;
        }
    }
    Some(first)
}

fn torus_dist(x: &TorusElement) -> Distribution {
    let mut d = Distribution::zero();
    for (m, c) in x.terms() {
        d.add_term(
            Support::new(Vec::new(), m.clone()).expect("no pins"),
            c.clone(),
        )
        .expect("no pins");
    }
    d
}

/// A two-sided identity between quantum torus elements.
#[derive(Debug, Clone)]
pub struct TorusIdentity {
    pub label: String,
    pub lhs: TorusElement,
    pub rhs: TorusElement,
}

impl TorusIdentity {
    fn new(label: String, lhs: TorusElement, rhs: TorusElement) -> Self {
        TorusIdentity { label, lhs, rhs }
    }

    pub fn as_distributions(&self) -> (Distribution, Distribution) {
        (torus_dist(&self.lhs), torus_dist(&self.rhs))
    }

    fn entry(&self, kind: Kind, nodes: (usize, usize)) -> CheckEntry {
        let (l, r) = self.as_distributions();
        let ds = canonicalize_compare(&l, &r).expect("pinless");
        CheckEntry::new(kind, self.label.clone(), Some(nodes)).with_discrepancies(&ds)
    }
}

fn w_scalar_pair(a: Term, k: i32, b: Term) -> (Scalar, Scalar) {
    // (a − q^k b, q^k a − b)
    (
        diff(a.clone(), Term::q(k).mul(&b)),
        diff(Term::q(k).mul(&a), b),
    )
}

/// The four block commutation identities on fixed nodes, all signs, `r = 0` on the `+` side.
pub fn chi_lemma_identities(img: &GkloImage) -> Vec<(TorusIdentity, (usize, usize))> {
    let inst = &img.instance;
    let d = &inst.diagram;
    let fixed: Vec<usize> = (0..inst.rank()).filter(|&i| d.is_fixed(i)).collect();
    let chi = |i: usize, r: usize, plus: bool| {
        if plus {
            img.chi_plus(i, r)
        } else {
            img.chi_minus(i, r)
        }
    };
    let lo = |plus: bool| if plus { 0 } else { 1 };
    let sgn = |plus: bool| if plus { "+" } else { "-" };
    let mut out = Vec::new();
    for &i in &fixed {
        let vi = inst.v[i] as usize;
        for (p1, p2) in [(true, true), (false, false), (true, false), (false, true)] {
            for r in lo(p1)..=vi {
                for s in lo(p2)..=vi {
                    if r == s {
                        continue;
                    }
                    let (a, b) = (chi(i, r, p1), chi(i, s, p2));
                    let (cl, cr) = w_scalar_pair(
                        GkloImage::w_signed(i, r, p1),
                        2,
                        GkloImage::w_signed(i, s, p2),
                    );
                    let label = format!(
                        "chi{}_{},{} chi{}_{},{} on {}",
                        sgn(p1),
                        i + 1,
                        r,
                        sgn(p2),
                        i + 1,
                        s,
                        inst.name
                    );
                    out.push((
                        TorusIdentity::new(label, a.mul(&b).scale(&cl), b.mul(&a).scale(&cr)),
                        (i, i),
                    ));
                }
            }
        }
        for &j in fixed.iter().filter(|&&j| j != i) {
            let c = inst.c(i, j);
            let vj = inst.v[j] as usize;
            for (p1, p2) in [(true, true), (false, false), (true, false), (false, true)] {
                for r in lo(p1)..=vi {
                    for s in lo(p2)..=vj {
                        let (a, b) = (chi(i, r, p1), chi(j, s, p2));
                        let (cl, cr) = w_scalar_pair(
                            GkloImage::w_signed(i, r, p1),
                            c,
                            GkloImage::w_signed(j, s, p2),
                        );
                        let label = format!(
                            "chi{}_{},{} chi{}_{},{} on {}",
                            sgn(p1),
                            i + 1,
                            r,
                            sgn(p2),
                            j + 1,
                            s,
                            inst.name
                        );
                        out.push((
                            TorusIdentity::new(label, a.mul(&b).scale(&cl), b.mul(&a).scale(&cr)),
                            (i, j),
                        ));
                    }
                }
            }
        }
    }
    out
}

/// The three block identities on an `A_2n` pair `i -> τi`, in extended indexing.
pub fn qs_lemma_identities(img: &GkloImage) -> Vec<(TorusIdentity, (usize, usize))> {
    let inst = &img.instance;
    let mut out = Vec::new();
    for i in 0..inst.rank() {
        let j = inst.tau(i);
        if j == i || inst.c(i, j) != -1 || !inst.orientation.points(i, j) {
            continue;
        }
        let (ei, ej) = (
            img.extend_a2n(i).expect("pair"),
            img.extend_a2n(j).expect("pair"),
        );
        let n = ei.n;
        for (node, ext) in [(i, &ei), (j, &ej)] {
            for r in 1..=n {
                for s in (1..=n).filter(|&s| s != r) {
                    let (a, b) = (img.chi_ext(ext, r), img.chi_ext(ext, s));
                    let (cl, cr) = w_scalar_pair(img.w_ext(ext, r), 2, img.w_ext(ext, s));
                    let label = format!(
                        "chi_{},{} chi_{},{} on {}",
                        node + 1,
                        r,
                        node + 1,
                        s,
                        inst.name
                    );
                    out.push((
                        TorusIdentity::new(label, a.mul(&b).scale(&cl), b.mul(&a).scale(&cr)),
                        (node, node),
                    ));
                }
            }
        }
        for r in 1..=n {
            for s in (1..=n).filter(|&s| s != r) {
                let sp_ = ei.prime(s);
                let (a, b) = (img.chi_ext(&ei, r), img.chi_ext(&ej, sp_));
                let (cl, cr) = w_scalar_pair(img.w_ext(&ei, r), -1, img.w_ext(&ej, sp_));
                let label = format!("chi_{},{} chi_{},{} on {}", i + 1, r, j + 1, sp_, inst.name);
                out.push((
                    TorusIdentity::new(label, a.mul(&b).scale(&cl), b.mul(&a).scale(&cr)),
                    (i, j),
                ));
            }
        }
    }
    out
}

/// Inversion symmetries of the factored building blocks and of `Ξ`.
pub fn symmetry_entries(img: &GkloImage) -> Vec<CheckEntry> {
    let inst = &img.instance;
    let b = &img.blocks;
    let mut out = Vec::new();
    let mut push = |label: String, i: usize, ok: bool| {
        let e = CheckEntry::new(Kind::Symmetry, label, Some((i, inst.tau(i))));
        out.push(if ok {
            e
        } else {
            e.failed("factored currents differ")
        });
    };
    for i in 0..inst.rank() {
        let ti = inst.tau(i);
        push(
            format!(
                "bold W_{}(u) = bold W_{}(1/u) on {}",
                i + 1,
                ti + 1,
                inst.name
            ),
            i,
            b.bw[i].equals(&b.bw[ti].invert()),
        );
        push(
            format!(
                "bold Z_{}(u) = bold Z_{}(1/u) on {}",
                i + 1,
                ti + 1,
                inst.name
            ),
            i,
            b.bz[i].equals(&b.bz[ti].invert()),
        );
        push(
            format!("Xi_{}(1/u) = Xi_{}(u) on {}", i + 1, ti + 1, inst.name),
            i,
            img.xi[i].invert().equals(&img.xi[ti]),
        );
    }
    out
}

/// Everything `run_all` checks, with evaluated sides kept for cross-checking.
pub struct DetailedRun {
    pub report: CheckReport,
    pub evaluated: Vec<Evaluated>,
    pub lemma_identities: Vec<TorusIdentity>,
}

pub fn run_all_detailed(
    inst: &ShiftInstance,
    opts: &CheckOptions,
    filter: Option<&dyn Fn(&RelationCase) -> bool>,
) -> Result<DetailedRun, ImageError> {
    let start = Instant::now();
    let img = GkloImage::build_with(inst, opts.corruption)?;
    let cases: Vec<RelationCase> = enumerate_cases(inst)
        .into_iter()
        .filter(|c| filter.map_or(true, |f| f(c)))
        .collect();
    let results: Vec<(CheckEntry, Option<Evaluated>)> = cases
        .par_iter()
        .map(|&c| check_pair_relation(&img, c, opts))
        .collect();
    let mut entries = Vec::new();
    let mut evaluated = Vec::new();
    for (e, ev) in results {
        entries.push(e);
        evaluated.extend(ev);
    }
    let mut lemma_identities = Vec::new();
    if filter.is_none() {
        entries.extend(symmetry_entries(&img));
        for (kind, ids) in [
            (Kind::ChiLemma, chi_lemma_identities(&img)),
            (Kind::QsLemma, qs_lemma_identities(&img)),
        ] {
            let checked: Vec<CheckEntry> = ids
                .par_iter()
                .map(|(id, nodes)| id.entry(kind, *nodes))
                .collect();
            entries.extend(checked);
            lemma_identities.extend(ids.into_iter().map(|(id, _)| id));
        }
    }
    let report = CheckReport {
        instance: inst.name.clone(),
        entries,
        millis: start.elapsed().as_millis(),
    };
    Ok(DetailedRun {
        report,
        evaluated,
        lemma_identities,
    })
}

/// Every applicable relation, the degree checks, the symmetries and the block lemmas.
pub fn run_all(inst: &ShiftInstance, opts: &CheckOptions) -> Result<CheckReport, ImageError> {
    Ok(run_all_detailed(inst, opts, None)?.report)
}

pub mod identities;
pub use identities::identity_suite;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::satake::{build_catalog, catalog_instance};

    #[test]
    fn dispatch_is_total_and_exclusive() {
        for inst in build_catalog() {
            for i in 0..inst.rank() {
                for j in 0..inst.rank() {
                    let k = bb_kind(&inst, i, j);
                    let ti = inst.tau(i);
                    match k {
                        Kind::BB2 => assert!(i == j && i == ti),
                        Kind::BB1 => assert!(j == ti && i != ti && inst.c(i, ti) == 0),
                        Kind::BB3 => assert!(j == ti && inst.c(i, ti) == -1),
                        Kind::BB4 => assert!(j != ti && inst.c(i, j) == 0),
                        Kind::BB5 => assert!(j != ti && inst.c(i, j) != 0),
                        _ => unreachable!(),
                    }
                }
            }
        }
        let a4 = catalog_instance("qsA4-v1111").unwrap();
        let serre3: Vec<_> = enumerate_cases(&a4)
            .into_iter()
            .filter(|c| c.kind == Kind::Serre3)
            .collect();
        assert_eq!(serre3.iter().map(|c| c.i).collect::<Vec<_>>(), vec![1, 2]);
    }

    #[test]
    fn split_a1_bb2_passes() {
        let inst = catalog_instance("splitA1-v1-t0").unwrap();
        let img = GkloImage::build(&inst).unwrap();
        let (e, _) = check_pair_relation(
            &img,
            RelationCase {
                kind: Kind::BB2,
                i: 0,
                j: 0,
            },
            &CheckOptions::default(),
        );
        assert_eq!(e.status, Status::Pass, "{}", e);
    }

    #[test]
    fn dropping_kappa_breaks_something() {
        let inst = catalog_instance("splitA1-v1-t1").unwrap();
        let opts = CheckOptions {
            corruption: Some(Corruption::DropKappa),
            ..Default::default()
        };
        let rep = run_all(&inst, &opts).unwrap();
        assert!(!rep.all_pass());
        assert!(rep.failures().any(|e| !e.discrepancies.is_empty()));
    }
}
