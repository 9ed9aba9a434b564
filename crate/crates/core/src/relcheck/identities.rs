//! Standalone rational and delta identities used in the verification by hand.

use crate::delta::{canonicalize_compare, Discrepancy, Distribution, Support};
use crate::igklo::{build_blocks, GkloImage};
use crate::qtorus::DMonomial;
use crate::satake::build_catalog;
use crate::scalar::{Scalar, Spectral, Term, Var};

use super::{antisym, delta_product, CheckEntry, CheckReport, Kind};
use Spectral::{U, U1, U2, V};

fn t(s: Spectral) -> Term {
    Term::spectral(s)
}

fn q(k: i32) -> Term {
    Term::q(k)
}

fn s(t: Term) -> Scalar {
    Scalar::from_term(t)
}

/// `1 − m`
fn om(m: Term) -> Scalar {
    Scalar::one_minus(&m)
}

fn diff(a: Term, b: Term) -> Scalar {
    Scalar::binomial(&a, &b)
}

fn inv(x: &Scalar) -> Scalar {
    x.inv().expect("nonzero")
}

fn prod(xs: &[Scalar]) -> Scalar {
    xs.iter().fold(Scalar::one(), |a, b| a.mul(b))
}

fn ui(x: Spectral) -> Term {
    t(x).inv().expect("nonzero")
}

fn scalar_entry(label: &str, lhs: &Scalar, rhs: &Scalar) -> CheckEntry {
    let e = CheckEntry::new(Kind::Identity, label, None);
    if lhs.equals(rhs) {
        e
    } else {
        let d = Discrepancy {
            support: Support::default(),
            lhs: lhs.clone(),
            rhs: rhs.clone(),
        };
        e.with_discrepancies(&[d])
    }
}

fn dist_entry(label: &str, lhs: &Distribution, rhs: &Distribution) -> CheckEntry {
    let e = CheckEntry::new(Kind::Identity, label, None);
    match canonicalize_compare(lhs, rhs) {
        Ok(ds) => e.with_discrepancies(&ds),
        Err(err) => e.failed(err.to_string()),
    }
}

/// `(q^c u − v)(q^{c'} u^{-1} − v) / ((u − q^c v)(u^{-1} − q^{c'} v))`
pub fn hb_ratio(c: i32, ct: i32) -> Scalar {
    let (u, v, uinv) = (t(U), t(V), ui(U));
    diff(q(c).mul(&u), v.clone())
        .mul(&diff(q(ct).mul(&uinv), v.clone()))
        .mul(&inv(&diff(u, q(c).mul(&v)).mul(&diff(uinv, q(ct).mul(&v)))))
}

fn hb_identities() -> Vec<CheckEntry> {
    let (u, v) = (t(U), t(V));
    let (uinv, vinv) = (ui(U), ui(V));
    let r2 = hb_ratio(2, 2);
    let rm = hb_ratio(-1, -1);
    let mut out = Vec::new();

    let l = inv(&prod(&[
        om(v.mul(&uinv)),
        om(q(2).mul(&u).mul(&v)),
        om(q(2).mul(&v).mul(&uinv)),
        om(u.mul(&v)),
    ]));
    let r = s(q(-4)).mul(&r2).mul(&inv(&prod(&[
        om(q(-2).mul(&v).mul(&uinv)),
        om(u.mul(&v)),
        om(v.mul(&uinv)),
        om(q(-2).mul(&u).mul(&v)),
    ])));
    out.push(scalar_entry(
        "Cartan-current ratio, c=2, coefficient of the inverse shift",
        &l,
        &r,
    ));

    let l = inv(&prod(&[
        om(q(-2).mul(&uinv).mul(&vinv)),
        om(u.mul(&vinv)),
        om(uinv.mul(&vinv)),
        om(q(-2).mul(&u).mul(&vinv)),
    ]));
    let r = s(q(4)).mul(&r2).mul(&inv(&prod(&[
        om(uinv.mul(&vinv)),
        om(q(2).mul(&u).mul(&vinv)),
        om(q(2).mul(&uinv).mul(&vinv)),
        om(u.mul(&vinv)),
    ])));
    out.push(scalar_entry(
        "Cartan-current ratio, c=2, coefficient of the shift",
        &l,
        &r,
    ));

    let l = om(q(1).mul(&v).mul(&uinv)).mul(&om(q(1).mul(&u).mul(&v)));
    let r = s(q(2))
        .mul(&rm)
        .mul(&om(q(-1).mul(&v).mul(&uinv)))
        .mul(&om(q(-1).mul(&u).mul(&v)));
    out.push(scalar_entry("Cartan-current ratio, c=-1", &l, &r));

    for c in [0, 2, -1] {
        let at_one = hb_ratio(c, c)
            .subst(&|x| (x == Var::Spec(V)).then(Term::one))
            .expect("no pole");
        out.push(scalar_entry(
            &format!("Cartan-current ratio at v=1 is 1, c={}", c),
            &at_one,
            &Scalar::one(),
        ));
    }
    out
}

/// Scalar identities from the derivation of the shifted Serre relation.
fn shifted_serre_identities() -> Vec<CheckEntry> {
    let (u1, u2, v) = (t(U1), t(U2), t(V));
    let (u1i, u2i) = (ui(U1), ui(U2));
    let to_v = |x: &Scalar| {
        x.subst(&|y| (y == Var::Spec(U2)).then(|| ui(V)))
            .expect("no pole")
    };
    let v2 = v.mul(&v);
    let mut out = Vec::new();

    let h01 = om(v2.clone()).mul(&om(q(2))).mul(&inv(
        &om(q(1).mul(&u1i).mul(&v)).mul(&om(q(2).mul(&u1).mul(&v)))
    ));
    let h02 = h01.neg();

    // first form: conjugating B_i(u1) past Θ_{τi}(v) K_i, then pairing u2 with v^{-1}
    // (1 − q v/u1)/(1 − q^{-1} v/u1) · (1 − q² v u1)/(1 − q^{-2} v u1)
    let ratio = om(q(1).mul(&v).mul(&u1i))
        .mul(&inv(&om(q(-1).mul(&v).mul(&u1i))))
        .mul(&om(q(2).mul(&v).mul(&u1)))
        .mul(&inv(&om(q(-2).mul(&v).mul(&u1))));
    let conv = om(v2.clone()).mul(&inv(&om(q(1).mul(&v2))));
    let t1 = s(q(-1).neg())
        .mul(&om(q(1).mul(&u2i).mul(&v)))
        .mul(&inv(&om(q(-2).mul(&u1).mul(&u2i))))
        .mul(&inv(&ratio))
        .mul_term(&q(3))
        .mul(&conv);
    let t2 = om(q(1).mul(&u2i).mul(&v))
        .mul(&inv(&om(q(2).mul(&u1).mul(&u2i))))
        .mul(&conv);
    let inter = s(q(2).neg())
        .mul(&om(v2.clone()))
        .mul(&om(q(-1).mul(&u1i).mul(&v)))
        .mul(&inv(
            &om(q(1).mul(&u1i).mul(&v)).mul(&om(q(2).mul(&u1).mul(&v)))
        ))
        .add(&om(v2.clone()).mul(&inv(&om(q(2).mul(&u1).mul(&v)))));
    out.push(scalar_entry(
        "shifted Serre, first half: reordering",
        &to_v(&t1.add(&t2)),
        &inter,
    ));
    out.push(scalar_entry(
        "shifted Serre, first half: simplification",
        &inter,
        &h01,
    ));

    // second form: B_i(u1) past Θ_i(u2) K_{τi}
    let ratio = om(q(-2).mul(&u2).mul(&u1i))
        .mul(&inv(&om(q(2).mul(&u2).mul(&u1i))))
        .mul(&om(q(-1).mul(&u2).mul(&u1)))
        .mul(&inv(&om(q(1).mul(&u2).mul(&u1))));
    let conv = om(u2.mul(&u2)).mul(&inv(&om(q(1).mul(&u2).mul(&u2))));
    let t1 = s(q(1))
        .mul(&diff(u1i.mul(&v), q(1).mul(&u1i).mul(&u2)))
        .mul(&inv(&om(q(2).mul(&u1i).mul(&u2))))
        .mul(&inv(&ratio))
        .mul_term(&q(-3))
        .mul(&conv);
    let t2 = s(q(-2))
        .mul(&diff(q(1).mul(&u1i).mul(&u2), u1i.mul(&v)))
        .mul(&inv(&om(q(-2).mul(&u1i).mul(&u2))))
        .mul(&conv);
    out.push(scalar_entry(
        "shifted Serre, second half",
        &to_v(&t1.add(&t2)),
        &h02,
    ));
    out
}

/// Coefficient conversions used when matching the split Serre relation.
fn serre_conversions() -> Vec<CheckEntry> {
    let wi = Term::w(0, 1, 1);
    let wj0 = Term::w(1, 1, 1);
    let mut out = Vec::new();
    let pins =
        |ps: Vec<(Spectral, Term)>| Support::new(ps, DMonomial::one()).expect("distinct pins");
    for kappa in [1, -1] {
        let wj = wj0.pow(kappa).expect("nonzero");
        let sup = pins(vec![
            (U1, Term::one()),
            (U2, Term::one()),
            (V, wj.mul(&q(-1))),
        ]);
        let l = Distribution::single(
            sup.clone(),
            s(q(-1).mul(&wj)).mul(&inv(&om(wj.clone()).pow(2).expect("nonzero"))),
        )
        .expect("pinned");
        let pre = s(t(V)).mul(&inv(
            &diff(t(U1), q(1).mul(&t(V))).mul(&diff(t(U2), q(1).mul(&t(V))))
        ));
        let r = Distribution::single(sup, Scalar::one())
            .expect("pinned")
            .scale(&pre)
            .expect("no pole");
        out.push(dist_entry(
            &format!("constant-term conversion, kappa={:+}", kappa),
            &l,
            &r,
        ));

        let wii = wi.inv().expect("nonzero");
        let sup = pins(vec![
            (U1, wi.mul(&q(-1))),
            (U2, q(1).mul(&wii)),
            (V, wj.mul(&q(-1))),
        ]);
        let qq = diff(q(-1), q(1));
        let coef = qq
            .mul(&diff(q(-2).mul(&wi), q(2).mul(&wii)))
            .mul_term(&wj)
            .mul(&inv(
                &diff(q(-1).mul(&wi), wj.clone()).mul(&diff(q(1).mul(&wii), wj.clone()))
            ));
        let l = Distribution::single(sup.clone(), coef.clone()).expect("pinned");
        let pre = qq
            .mul(&diff(t(U1), q(2).mul(&t(U2))))
            .mul_term(&t(V))
            .mul(&inv(
                &diff(t(U1), q(1).mul(&t(V))).mul(&diff(t(U2), q(1).mul(&t(V))))
            ));
        let r = Distribution::single(sup, Scalar::one())
            .expect("pinned")
            .scale(&pre)
            .expect("no pole");
        out.push(dist_entry(
            &format!("paired-term conversion, kappa={:+}", kappa),
            &l,
            &r,
        ));

        for k1 in [1, -1] {
            let a = wi.pow(k1).expect("nonzero");
            let ai = a.inv().expect("nonzero");
            let lhs = qq
                .mul_term(&q(2).mul(&ai))
                .mul(&inv(&diff(q(1).mul(&ai), wj.clone())))
                .sub(
                    &qq.mul_term(&q(-1).mul(&a))
                        .mul(&inv(&diff(q(-1).mul(&a), wj.clone())))
                        .mul(&diff(q(2).mul(&ai), q(-1).mul(&wj)))
                        .mul(&inv(&diff(q(1).mul(&ai), wj.clone()))),
                );
            out.push(scalar_entry(
                &format!("paired-term coefficient sum, signs ({:+},{:+})", k1, kappa),
                &lhs,
                &qq.mul(&diff(q(-2).mul(&a), q(2).mul(&ai)))
                    .mul_term(&wj)
                    .mul(&inv(
                        &diff(q(-1).mul(&a), wj.clone()).mul(&diff(q(1).mul(&ai), wj.clone()))
                    )),
            ));
        }
    }
    out
}

/// Residue coefficients at `u = q^{∓1} w^{±1}` in the rank-one split computation.
fn residue_coefficients() -> Vec<CheckEntry> {
    let w = Term::w(0, 1, 1);
    let wi = w.inv().expect("nonzero");
    let w2 = w.mul(&w);
    let k = inv(&s(q(1)).mul(&om(q(2)).pow(2).expect("nonzero")));
    let a = diff(q(-1).mul(&w), q(3).mul(&wi))
        .mul(&k)
        .mul(&om(q(-2).mul(&w2)))
        .mul(&inv(&om(q(-4).mul(&w2))));
    let b = diff(q(-1).mul(&w), q(1).mul(&wi)).mul(&inv(&diff(q(-1), q(1)).mul(&om(q(2)))));
    let c = diff(q(-1).mul(&wi), q(3).mul(&w))
        .mul_term(&q(3))
        .mul(&inv(&om(q(2)).pow(2).expect("nonzero")))
        .mul(&om(q(2).mul(&w2)))
        .mul(&inv(&om(q(4).mul(&w2))));
    let d = diff(q(1).mul(&w), q(-1).mul(&wi)).mul(&inv(&diff(q(-1), q(1)).mul(&om(q(-2)))));
    vec![
        scalar_entry("rank-one residue coefficient at q^-1 w", &a, &b),
        scalar_entry("rank-one residue coefficient at q^-1 w^-1", &c, &d),
    ]
}

fn kappa_entries() -> Vec<CheckEntry> {
    let inst = build_catalog().into_iter().next().expect("catalog");
    let kappa = build_blocks(&inst).kappa;
    let x = Term::spectral(kappa.var);
    let cleared = kappa
        .to_scalar()
        .mul(&om(x.clone()).pow(2).expect("nonzero"));
    let e1 = CheckEntry::new(Kind::Identity, "kappa(u) = kappa(1/u)", None);
    vec![
        if kappa.invert().equals(&kappa) {
            e1
        } else {
            e1.failed("factored currents differ")
        },
        scalar_entry(
            "kappa(u)(1-u)^2 = (1-qu)(1-u/q)",
            &cleared,
            &om(q(1).mul(&x)).mul(&om(q(-1).mul(&x))),
        ),
    ]
}

/// `Res_{u=a} (u − u^{-1}) Ξ_i(u)/((q² − 1) u)` for every pole `a ≠ ±1`.
fn scaled_residues(img: &GkloImage, i: usize) -> Vec<(Term, Scalar)> {
    let k = inv(&diff(q(2), Term::one()));
    let gamma = antisym(U).mul(&img.xi_in(i, U)).scale(&k);
    gamma
        .residues()
        .expect("simple poles")
        .into_iter()
        .filter(|(a, _)| !(a.is_one() || a.neg().is_one()))
        .collect()
}

/// Residue symmetry between the two nodes of an `A_2n` pair, and the per-index
/// identities that assemble the paired relation from it.
fn a2n_entries() -> Vec<CheckEntry> {
    let mut out = Vec::new();
    for inst in build_catalog() {
        let img = GkloImage::build(&inst).expect("catalog image");
        for i in 0..inst.rank() {
            let j = inst.tau(i);
            if j == i || inst.c(i, j) != -1 || !inst.orientation.points(i, j) {
                continue;
            }
            let (ri, rj) = (scaled_residues(&img, i), scaled_residues(&img, j));
            for (a, res) in &ri {
                let ainv = a.inv().expect("nonzero");
                let label = format!(
                    "residue symmetry at u={} for ({},{}) on {}",
                    a,
                    i + 1,
                    j + 1,
                    inst.name
                );
                match rj.iter().find(|(b, _)| *b == ainv) {
                    Some((_, other)) => out.push(scalar_entry(&label, res, other)),
                    None => out.push(
                        CheckEntry::new(Kind::Identity, label, None).failed("no matching pole"),
                    ),
                }
            }
            let (ei, ej) = (
                img.extend_a2n(i).expect("pair"),
                img.extend_a2n(j).expect("pair"),
            );
            for r in 1..=ei.n {
                let rp = ei.prime(r);
                let wir = img.w_ext(&ei, r);
                let bi = |pin: Term| {
                    Distribution::single(
                        Support::new(vec![(U, pin)], DMonomial::one()).expect("pin"),
                        Scalar::one(),
                    )
                    .expect("pin")
                };
                let chi_i = crate::relcheck::torus_dist(&img.chi_ext(&ei, r));
                let chi_j = crate::relcheck::torus_dist(&img.chi_ext(&ej, rp));
                let di = bi(wir.mul(&q(-1))).mul(&chi_i).expect("pins");
                let dj = Distribution::single(
                    Support::new(vec![(V, img.w_ext(&ej, rp).mul(&q(-1)))], DMonomial::one())
                        .expect("pin"),
                    Scalar::one(),
                )
                .expect("pin")
                .mul(&chi_j)
                .expect("pins");
                let residue_at = |a: &Term| -> Distribution {
                    let r = ri
                        .iter()
                        .find(|(b, _)| b == a)
                        .map(|(_, r)| r.clone())
                        .unwrap_or_else(Scalar::zero);
                    delta_product(U, V)
                        .expect("link")
                        .mul(
                            &Distribution::single(
                                Support::new(vec![(U, a.clone())], DMonomial::one()).expect("pin"),
                                r,
                            )
                            .expect("pin"),
                        )
                        .expect("pins")
                };
                let lhs = di
                    .mul(&dj)
                    .expect("pins")
                    .scale(&diff(t(U), q(-1).mul(&t(V))))
                    .expect("poly");
                out.push(dist_entry(
                    &format!(
                        "paired product chi_{},{} chi_{},{} on {}",
                        i + 1,
                        r,
                        j + 1,
                        rp,
                        inst.name
                    ),
                    &lhs,
                    &residue_at(&wir.mul(&q(-1))),
                ));
                let lhs = dj
                    .mul(&di)
                    .expect("pins")
                    .scale(&diff(t(V), q(-1).mul(&t(U))))
                    .expect("poly");
                let target = lhs
                    .terms()
                    .next()
                    .map(|(s, _)| s.target(U).cloned().expect("pinned"));
                let rhs = target.map(|a| residue_at(&a)).unwrap_or_default();
                out.push(dist_entry(
                    &format!(
                        "paired product chi_{},{} chi_{},{} on {}",
                        j + 1,
                        rp,
                        i + 1,
                        r,
                        inst.name
                    ),
                    &lhs,
                    &rhs,
                ));
            }
        }
    }
    out
}

/// The standalone identities, each as a named entry.
pub fn identity_suite() -> CheckReport {
    let start = std::time::Instant::now();
    let mut entries = Vec::new();
    entries.extend(hb_identities());
    entries.extend(shifted_serre_identities());
    entries.extend(serre_conversions());
    entries.extend(residue_coefficients());
    entries.extend(kappa_entries());
    entries.extend(a2n_entries());
    CheckReport {
        instance: "identities".into(),
        entries,
        millis: start.elapsed().as_millis(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_passes() {
        let rep = identity_suite();
        for e in &rep.entries {
            assert!(e.passed(), "{}", e);
        }
        assert!(rep.entries.len() > 20);
    }

    #[test]
    fn factored_antisymmetric_matches() {
        let a = antisym(U).to_scalar();
        assert!(a.equals(&diff(t(U), ui(U))));
    }
}
