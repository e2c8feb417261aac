//! OPE checks over so_N: currents, pfaffian fields, the split-sum lemmas and
//! the `C_4` expansions.

use std::collections::BTreeMap;

use rand::Rng;
use rayon::prelude::*;

use super::{
    default_j, interpolate_in_n, show, verdict_of, CheckBuilder, Ctx, IdentityCheck, Interpolated,
};
use crate::error::Result;
use crate::field::Field;
use crate::indexset::{f_action, set_minus, IndexSet, IndexSetCombination};
use crate::lie::Family;
use crate::npoly::KnPoly;
use crate::ope::OpeEngine;
use crate::scalar::{Scalar, Q};

fn pair_of(s: &IndexSet) -> (usize, usize) {
    s.pair().expect("2-set")
}

fn skew(e: &OpeEngine, s: &IndexSet) -> Result<Field> {
    let (a, b) = pair_of(s);
    e.skew_current(a, b)
}

fn int(n: i64) -> Scalar {
    Scalar::int(n)
}

fn kp(c: i64) -> KnPoly {
    KnPoly::constant(c)
}

/// `(N-2)(N-3)(N-4)`.
fn cubic() -> KnPoly {
    let n = KnPoly::n();
    n.sub(&kp(2)).mul(&n.sub(&kp(3))).mul(&n.sub(&kp(4)))
}

fn k_plus_2() -> KnPoly {
    KnPoly::k().add(&kp(2))
}

/// `6(k+2)k`.
fn six_k_k2() -> KnPoly {
    k_plus_2().mul(&KnPoly::k()).scale(Q::int(6))
}

fn n_minus_4() -> KnPoly {
    KnPoly::n().sub(&kp(4))
}

/// `-(k+2)((N-2)(N-3)(N-4)+6)`.
fn lemma5_paper() -> KnPoly {
    k_plus_2().mul(&cubic().add(&kp(6))).scale(Q::int(-1))
}

/// Lemma partial sums, indexed by the leading term of the split expansion:
/// 0 and 1 the quartic term without/with the split sign, 2 the
/// `PfF_{F_I2(J\I1)}` term, 3 `(F_I2 PfF_{J\I1})`, 4 `(F_I2 PfF_{J\I1})_1`,
/// 5 `(F_I1 PfF_{F_I2 J})`.
fn lemma_term(
    e: &OpeEngine,
    j: &IndexSet,
    i1: &IndexSet,
    i2: &IndexSet,
    lemma: u8,
) -> Result<Field> {
    let zero = Field::zero(e.tag());
    if lemma == 5 {
        let (x, y) = pair_of(i2);
        let pf = e.pf_field_comb(&f_action(x, y, j))?;
        return e.normal_product(&skew(e, i1)?, &pf);
    }
    let Some((rest, s1)) = set_minus(j, i1) else {
        return Ok(zero);
    };
    let s1 = int(s1 as i64);
    Ok(match lemma {
        0 | 1 => match set_minus(&rest, i2) {
            Some((_, s2)) => Field::unit(e.tag())
                .scale(&(&(&Scalar::k_plus(2) * &Scalar::k()) * &(&s1 * &int(s2 as i64)))),
            None => zero,
        },
        2 => {
            let (x, y) = pair_of(i2);
            e.pf_field_comb(&f_action(x, y, &rest))?.scale(&s1)
        }
        3 => e
            .normal_product(&skew(e, i2)?, &e.pf_field(&rest)?)?
            .scale(&s1),
        4 => e.pole(&skew(e, i2)?, 1, &e.pf_field(&rest)?)?.scale(&s1),
        _ => unreachable!("lemma index"),
    })
}

/// `Σ_I Σ_{I=I1⊔I2} (-1)^{(I1,I2)} ∮ dx/(x-w) X(z)/(z-x)^shift PfF_I(w)`:
/// the pole-`P` coefficient is `Σ ± (X PfF_I)_{P-shift}`. Index = pole order.
pub(super) fn lemma_partial_sum(
    e: &OpeEngine,
    j: &IndexSet,
    lemma: u8,
    shift: i64,
) -> Result<Vec<Field>> {
    let n = e.algebra().n();
    let parts: Vec<BTreeMap<i64, Field>> = IndexSet::subsets(n, 4)
        .par_iter()
        .map(|i| -> Result<BTreeMap<i64, Field>> {
            let mut acc: BTreeMap<i64, Field> = BTreeMap::new();
            let pfi = e.pf_field(i)?;
            for (i1, i2, s) in i.splits(2) {
                let x = lemma_term(e, j, &i1, &i2, lemma)?;
                if x.is_zero() {
                    continue;
                }
                let sign = if lemma == 0 {
                    Scalar::one()
                } else {
                    int(s as i64)
                };
                let r = e.contract(&x, &pfi, shift)?;
                for (m, f) in r.all() {
                    let p = m + shift;
                    if p >= 1 && !f.is_zero() {
                        let slot = acc.entry(p).or_insert_with(|| Field::zero(e.tag()));
                        *slot = slot.add(&f.scale(&sign))?;
                    }
                }
            }
            Ok(acc)
        })
        .collect::<Result<_>>()?;
    let top = parts
        .iter()
        .flat_map(|p| p.keys().copied())
        .max()
        .unwrap_or(0)
        .max(0) as usize;
    let mut out = vec![Field::zero(e.tag()); top + 1];
    for p in parts {
        for (m, f) in p {
            out[m as usize] = out[m as usize].add(&f)?;
        }
    }
    Ok(out)
}

fn depth(v: &[Field]) -> usize {
    v.iter().rposition(|f| !f.is_zero()).unwrap_or(0)
}

fn at(v: &[Field], m: usize) -> Option<&Field> {
    v.get(m)
}

/// Scalar `c` with `v[m] = c·target`, zero included.
fn pole_ratio(v: &[Field], m: usize, target: &Field) -> Option<Scalar> {
    match at(v, m) {
        Some(f) => f.ratio_to(target),
        None => Some(Scalar::zero()),
    }
}

fn poles(r: &crate::ope::OpeResult) -> Vec<Field> {
    let d = r.singular_depth();
    (0..=d as i64)
        .map(|m| {
            if m == 0 {
                r.pole(0).scale(&Scalar::zero())
            } else {
                r.pole(m)
            }
        })
        .collect()
}

/// Shape `pole4 ∝ PfF_J`, `pole3 ∝ ∂PfF_J`, nothing above 4.
struct QuarticShape {
    depth: usize,
    p4: Option<Scalar>,
    p3: Option<Scalar>,
}

fn quartic_shape(e: &OpeEngine, v: &[Field]) -> Result<QuarticShape> {
    let pf = e.pf_field(&default_j())?;
    let dpf = e.derivative(&pf)?;
    Ok(QuarticShape {
        depth: depth(v),
        p4: pole_ratio(v, 4, &pf),
        p3: pole_ratio(v, 3, &dpf),
    })
}

impl QuarticShape {
    fn ok(&self) -> bool {
        self.depth <= 4 && self.p4.is_some() && self.p3.is_some()
    }
}

fn opt(s: &Option<Scalar>) -> String {
    match s {
        Some(s) => s.to_string(),
        None => "not proportional".into(),
    }
}

// ---------------------------------------------------------------- currents

pub(super) fn prop_p1(cx: &Ctx) -> Result<IdentityCheck> {
    let e = cx.sl()?;
    let alg = e.algebra().clone();
    let dim = alg.dim();
    let cur: Vec<Field> = (0..dim).map(|a| e.current(a)).collect::<Result<_>>()?;
    let comb = |c: &[(usize, Q)]| -> Result<Field> {
        let mut f = Field::zero(e.tag());
        for &(g, v) in c {
            f = f.add(&cur[g].scale(&Scalar::from_q(v)))?;
        }
        Ok(f)
    };
    let triples: Vec<(usize, usize, usize)> = (0..dim)
        .flat_map(|a| (0..dim).flat_map(move |b| (0..dim).map(move |c| (a, b, c))))
        .collect();
    let bad: Vec<String> = triples
        .par_iter()
        .map(|&(a, b, c)| -> Result<Option<String>> {
            let bc = e.normal_product(&cur[b], &cur[c])?;
            let r = e.contract(&cur[a], &bc, 0)?;
            let k = Scalar::k();
            let p3 = Field::unit(e.tag()).scale(&k.scale(alg.metric_on_bracket(a, b, c)));
            let ab = comb(alg.bracket(a, b))?;
            let ac = comb(alg.bracket(a, c))?;
            let mut abc = Field::zero(e.tag());
            for &(d, v) in alg.bracket(a, b) {
                abc = abc.add(&comb(alg.bracket(d, c))?.scale(&Scalar::from_q(v)))?;
            }
            let p2 = cur[c]
                .scale(&k.scale(alg.metric(a, b)))
                .add(&cur[b].scale(&k.scale(alg.metric(a, c))))?
                .add(&abc)?;
            let p1 = e
                .normal_product(&ab, &cur[c])?
                .add(&e.normal_product(&cur[b], &ac)?)?;
            let ok =
                r.singular_depth() <= 3 && r.pole(3) == p3 && r.pole(2) == p2 && r.pole(1) == p1;
            Ok((!ok).then(|| format!("({},{},{})", alg.name(a), alg.name(b), alg.name(c))))
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();
    let total = triples.len();
    let mut b = CheckBuilder::new(cx.id);
    b.param(format!("sl N={}; all (a,b,c)", alg.n()))
        .paper(
            "J^a(z)(J^b J^c)(w) = k f_abc/(z-w)^3 + (k d_ab J^c + k d_ac J^b + f_abd f_dce J^e)/(z-w)^2 \
             + (f_abd (J^d J^c) + f_acd (J^b J^d))/(z-w), d read as the invariant form",
        )
        .engine(format!("{}/{total} triples agree in all poles", total - bad.len()));
    if !bad.is_empty() {
        b.diff(format!(
            "fails for {}",
            bad.iter().take(10).cloned().collect::<Vec<_>>().join(", ")
        ));
    }
    b.shape(bad.is_empty(), "six-term contraction");
    Ok(b.finish(verdict_of(&[bad.is_empty()], true)))
}

/// Current combination `Σ c F_pair` from a combination of 2-sets.
fn current_comb(e: &OpeEngine, c: &IndexSetCombination) -> Result<Field> {
    e.pf_field_comb(c)
}

pub(super) fn prop_p2(cx: &Ctx) -> Result<IdentityCheck> {
    let e = cx.so()?;
    let u = cx.wb.uea(Family::So, cx.p.so_n)?;
    let alg = e.algebra().clone();
    let n = alg.n();
    let pairs = IndexSet::subsets(n, 2);
    let mut cases = Vec::new();
    for a in &pairs {
        for bb in &pairs {
            if a.indices().iter().any(|&x| bb.contains(x)) {
                continue;
            }
            for j in &pairs {
                cases.push((j.clone(), a.clone(), bb.clone()));
            }
        }
    }
    let kappa = |x: &IndexSet, y: &IndexSet| -> Scalar {
        let (i, j) = pair_of(x);
        let (k, l) = pair_of(y);
        let (p, s) = alg.skew_index(i, j).expect("pair");
        let (q, t) = alg.skew_index(k, l).expect("pair");
        Scalar::k().scale(alg.metric(p, q) * Q::int((s * t) as i64))
    };
    // (depth ok, printed, moved) per case
    let rows: Vec<(bool, bool, bool)> = cases
        .par_iter()
        .map(|(j, a, bb)| -> Result<(bool, bool, bool)> {
            let fj = skew(&e, j)?;
            let fa = skew(&e, a)?;
            let fb = skew(&e, bb)?;
            let r = e.contract(&fj, &e.normal_product(&fa, &fb)?, 0)?;
            let (x, y) = pair_of(j);
            let (ax, ay) = pair_of(a);
            let (bx, by) = pair_of(bb);
            let word = u.mul(&u.skew(ax, ay)?, &u.skew(bx, by)?)?;
            let ffj = current_comb(&e, &u.act_on_indexset(&word, j)?)?;
            let fja = current_comb(&e, &f_action(x, y, a))?;
            let fjb = current_comb(&e, &f_action(x, y, bb))?;
            let base2 = fb
                .scale(&kappa(j, a))
                .add(&fa.scale(&kappa(j, bb)))?
                .add(&ffj)?;
            let t4 = e.normal_product(&fja, &fb)?;
            let t5 = e.normal_product(&fa, &fjb)?;
            let depth_ok = r.singular_depth() <= 2;
            let printed = depth_ok && r.pole(2) == base2.add(&t4)? && r.pole(1) == t5;
            let moved = depth_ok && r.pole(2) == base2 && r.pole(1) == t4.add(&t5)?;
            Ok((depth_ok, printed, moved))
        })
        .collect::<Result<_>>()?;
    let total = rows.len();
    let depth_ok = rows.iter().filter(|r| r.0).count();
    let printed = rows.iter().filter(|r| r.1).count();
    let moved = rows.iter().filter(|r| r.2).count();
    let mut b = CheckBuilder::new(cx.id);
    b.param(format!("so N={n}; all F_j and disjoint pairs a, b"))
        .paper(
            "printed: pole2 = k d_{j,a} F_b + k d_{j,b} F_a + F_{F_a F_b j} + (F_{F_j a} F_b), pole1 = (F_a F_{F_j b})",
        )
        .paper("with the fourth term at the simple pole, as in the general current formula")
        .engine(format!("poles within {{2,1}}: {depth_ok}/{total}"))
        .engine(format!("printed placement: {printed}/{total}; fourth term at pole 1: {moved}/{total}"));
    if printed < total {
        b.diff(
            "the printed fourth term has weight 2 at the double pole, impossible by weight counting; \
             the general current formula places it at the simple pole",
        );
    }
    if moved < total {
        b.diff(format!(
            "corrected placement still fails on {} cases",
            total - moved
        ));
    }
    b.shape(depth_ok == total, "poles of order 2 and 1 only");
    let verdict = verdict_of(&[printed == total, moved == total], false);
    Ok(b.finish(verdict))
}

/// `F_J(z) PfF_I(w)` over all 2-sets `J` and 4-sets `I`.
struct P4Data {
    total: usize,
    depth_ok: usize,
    pole1_ok: usize,
    simplified: usize,
    precursor: usize,
    precursor_kappa: usize,
    jpf: usize,
    lambda: Vec<Scalar>,
    example: String,
}

fn p4_data(cx: &Ctx) -> Result<P4Data> {
    let e = cx.so()?;
    let u = cx.wb.uea(Family::So, cx.p.so_n)?;
    let n = e.algebra().n();
    let cases: Vec<(IndexSet, IndexSet)> = IndexSet::subsets(n, 2)
        .into_iter()
        .flat_map(|j| {
            IndexSet::subsets(n, 4)
                .into_iter()
                .map(move |i| (j.clone(), i))
        })
        .collect();
    let rows: Vec<[bool; 6]> = cases
        .par_iter()
        .map(|(j, i)| -> Result<[bool; 6]> {
            let (x, y) = pair_of(j);
            let r = e.contract(&e.skew_current(x, y)?, &e.pf_field(i)?, 0)?;
            let p1 = e.pf_field_comb(&f_action(x, y, i))?;
            let fpf = current_comb(&e, &u.act_on_indexset(&u.pfaffian(i)?, j)?)?;
            let minus = match set_minus(i, j) {
                Some((rest, s)) => skew(&e, &rest)?.scale(&int(s as i64)),
                None => Field::zero(e.tag()),
            };
            let kp2 = Scalar::k_plus(2);
            let simplified = fpf.scale(&kp2);
            let precursor = minus.scale(&Scalar::k()).add(&fpf)?;
            let precursor_kappa = minus.scale(&-Scalar::k()).add(&fpf)?;
            let jpf = minus.scale(&kp2);
            let p2 = r.pole(2);
            Ok([
                r.singular_depth() <= 2,
                r.pole(1) == p1,
                p2 == simplified,
                p2 == precursor,
                p2 == jpf,
                p2 == precursor_kappa,
            ])
        })
        .collect::<Result<_>>()?;
    let count = |c: usize| rows.iter().filter(|r| r[c]).count();
    // double-pole scalar relative to the signed complement, where J ⊂ I
    let mut lambda: Vec<Scalar> = Vec::new();
    for (j, i) in &cases {
        if let Some((rest, s)) = set_minus(i, j) {
            let (x, y) = pair_of(j);
            let p2 = e.pole(&e.skew_current(x, y)?, 2, &e.pf_field(i)?)?;
            if let Some(c) = p2.ratio_to(&skew(&e, &rest)?.scale(&int(s as i64))) {
                if !lambda.contains(&c) {
                    lambda.push(c);
                }
            }
        }
    }
    let alg = e.algebra();
    let r = e.contract(&e.skew_current(1, 2)?, &e.pf_field(&default_j())?, 0)?;
    let example = format!(
        "F[1,2](z)Pf[1,2,3,4](w): pole2 = {}; pole1 = {}",
        show(alg, &r.pole(2)),
        show(alg, &r.pole(1))
    );
    Ok(P4Data {
        total: rows.len(),
        depth_ok: count(0),
        pole1_ok: count(1),
        simplified: count(2),
        precursor: count(3),
        precursor_kappa: count(5),
        jpf: count(4),
        lambda,
        example,
    })
}

pub(super) fn prop_p4(cx: &Ctx) -> Result<IdentityCheck> {
    let d = p4_data(cx)?;
    let t = d.total;
    let mut b = CheckBuilder::new(cx.id);
    b.param(format!("so N={}; all |J|=2, |I|=4", cx.p.so_n))
        .paper("simplified: (k+2) F_{PfF_I J}/(z-w)^2 + PfF_{F_J I}/(z-w)")
        .paper("precursor: (k (-1)^(J,I\\J) F_{I\\J} + F_{PfF_I J})/(z-w)^2")
        .engine(d.example.clone())
        .engine(format!(
            "pole2 = lambda (-1)^(J,I\\J) F_{{I\\J}} with lambda in {{{}}}",
            d.lambda.iter().map(|s| s.to_string()).collect::<Vec<_>>().join(", ")
        ))
        .engine(format!(
            "depth<=2: {}/{t}; pole1 = PfF_{{F_J I}}: {}/{t}; simplified: {}/{t}; precursor: {}/{t}; \
             precursor with the invariant form in place of delta: {}/{t}",
            d.depth_ok, d.pole1_ok, d.simplified, d.precursor, d.precursor_kappa
        ));
    if d.simplified < t || d.precursor < t {
        b.diff(format!(
            "simplified reading fails on {} pairs, precursor on {}; the two printed forms differ by a scalar factor; \
             the precursor holds when its delta is read as the invariant form kappa(F_ij,F_ij) = -1, \
             and the simplified form is then twice the true coefficient",
            t - d.simplified,
            t - d.precursor
        ));
    }
    b.shape(
        d.depth_ok == t && d.pole1_ok == t && d.lambda.len() == 1,
        "poles {2,1}, double pole along F_{I\\J}",
    );
    Ok(b.finish(verdict_of(
        &[
            d.simplified == t,
            d.precursor == t || d.precursor_kappa == t,
        ],
        false,
    )))
}

pub(super) fn eq_jpf(cx: &Ctx) -> Result<IdentityCheck> {
    let d = p4_data(cx)?;
    let t = d.total;
    let mut b = CheckBuilder::new(cx.id);
    b.param(format!("so N={}; all |J|=2, |I|=4", cx.p.so_n))
        .paper("F_J^n PfF_I = 0 (n>1); F_J^1 PfF_I = (k+2) PfF_{I\\J}; F_J^0 PfF_I = PfF_{F_J I}")
        .engine(format!(
            "F_J^n = 0 for n>1: {}/{t}; F_J^0: {}/{t}; F_J^1: {}/{t}; F_J^1 PfF_I = lambda PfF_{{I\\J}}, lambda in {{{}}}",
            d.depth_ok,
            d.pole1_ok,
            d.jpf,
            d.lambda.iter().map(|s| s.to_string()).collect::<Vec<_>>().join(", ")
        ));
    if d.jpf < t {
        b.diff(format!(
            "F_J^1 differs from (k+2)PfF_{{I\\J}} on {} pairs; engine value is the negative, the sign of the invariant form on F_ij",
            t - d.jpf
        ));
    }
    b.shape(
        d.depth_ok == t && d.pole1_ok == t && d.lambda.len() == 1,
        "mode pattern",
    );
    Ok(b.finish(verdict_of(
        &[d.jpf == t, d.pole1_ok == t, d.depth_ok == t],
        true,
    )))
}

// --------------------------------------------------------------- pfaffians

/// The simplified two-pfaffian formula for `PfF_J(z) PfF_I(x)`, with fields
/// at `z` re-expanded around `x`. Index = pole order.
fn split_formula(e: &OpeEngine, j: &IndexSet, i: &IndexSet) -> Result<Vec<Field>> {
    let half = Scalar::from_q(Q::new(1, 2));
    let k = Scalar::k();
    let kp2 = Scalar::k_plus(2);
    let mut terms: Vec<(usize, Field)> = Vec::new();
    for (i1, i2, s) in i.splits(2) {
        let c = half.scale(Q::int(s as i64));
        let with = |x: &IndexSet| -> Result<Option<(IndexSet, Scalar)>> {
            Ok(set_minus(j, x).map(|(r, t)| (r, int(t as i64))))
        };
        if let Some((r1, s1)) = with(&i1)? {
            if let Some((_, s2)) = set_minus(&r1, &i2) {
                let v = &(&(&kp2 * &k) * &int(2)) * &(&s1 * &int(s2 as i64));
                terms.push((4, Field::unit(e.tag()).scale(&(&c * &v))));
            }
            let (x, y) = pair_of(&i2);
            let t3 = e.pf_field_comb(&f_action(x, y, &r1))?.scale(&s1);
            terms.push((3, t3.scale(&(&c * &(&kp2 * &int(-2))))));
            let f2 = skew(e, &i2)?;
            let pf = e.pf_field(&r1)?.scale(&s1);
            terms.push((2, e.normal_product(&f2, &pf)?.scale(&(&c * &kp2))));
            terms.push((1, e.pole(&f2, 1, &pf)?.scale(&(&c * &(&kp2 * &int(-1))))));
        }
        if let Some((r2, s2)) = with(&i2)? {
            let f1 = skew(e, &i1)?;
            let pf = e.pf_field(&r2)?.scale(&s2);
            terms.push((2, e.normal_product(&f1, &pf)?.scale(&(&c * &kp2))));
            terms.push((1, e.pole(&f1, 1, &pf)?.scale(&(&c * &kp2))));
        }
        let (x1, y1) = pair_of(&i1);
        let (x2, y2) = pair_of(&i2);
        let a = e.normal_product(&skew(e, &i2)?, &e.pf_field_comb(&f_action(x1, y1, j))?)?;
        let bb = e.normal_product(&skew(e, &i1)?, &e.pf_field_comb(&f_action(x2, y2, j))?)?;
        terms.push((1, a.add(&bb)?.scale(&(&c * &int(-1)))));
    }
    let mut out = vec![Field::zero(e.tag()); 5];
    for (p, f) in terms {
        // f(z)/(z-x)^p = Σ_s ∂^s f(x) (z-x)^{s-p} / s!
        let mut d = f;
        let mut fact = Q::ONE;
        for s in 0..p {
            if s > 0 {
                d = e.derivative(&d)?;
                fact *= Q::int(s as i64);
            }
            out[p - s] = out[p - s].add(&d.scale(&Scalar::from_q(fact.recip())))?;
        }
    }
    Ok(out)
}

pub(super) fn prop_p5(cx: &Ctx) -> Result<IdentityCheck> {
    let e = cx.so()?;
    let n = e.algebra().n();
    let j = default_j();
    let pfj = e.pf_field(&j)?;
    let sets = IndexSet::subsets(n, 4);
    // (overlap, agreeing poles bitmask, engine pole4 ratio to 1 when I=J)
    let rows: Vec<(usize, [bool; 4])> = sets
        .par_iter()
        .map(|i| -> Result<(usize, [bool; 4])> {
            let r = e.contract(&pfj, &e.pf_field(i)?, 0)?;
            let f = split_formula(&e, &j, i)?;
            let ov = i.indices().iter().filter(|&&x| j.contains(x)).count();
            let mut ok = [false; 4];
            for m in 1..=4 {
                ok[m - 1] = r.pole(m as i64) == f[m];
            }
            Ok((ov, ok))
        })
        .collect::<Result<_>>()?;
    let r = e.contract(&pfj, &pfj, 0)?;
    let f = split_formula(&e, &j, &j)?;
    let unit = Field::unit(e.tag());
    let mut b = CheckBuilder::new(cx.id);
    b.param(format!("so N={n}; J={j}; all |I|=4"))
        .paper("simplified split formula for PfF_J(z)PfF_I(x), quartic term (1/2) sum (-1)^(I1,I2) 2(k+2)k PfF_{J\\I1I2}")
        .engine(format!(
            "I=J pole4: engine {} vs formula {}",
            opt(&r.pole(4).ratio_to(&unit)),
            opt(&f[4].ratio_to(&unit))
        ));
    let mut all = true;
    for ov in 0..=4 {
        let cls: Vec<&(usize, [bool; 4])> = rows.iter().filter(|r| r.0 == ov).collect();
        if cls.is_empty() {
            continue;
        }
        let per: Vec<String> = (0..4)
            .rev()
            .map(|m| {
                format!(
                    "p{}:{}/{}",
                    m + 1,
                    cls.iter().filter(|r| r.1[m]).count(),
                    cls.len()
                )
            })
            .collect();
        all &= cls.iter().all(|r| r.1.iter().all(|&x| x));
        b.engine(format!("|I cap J|={ov}: {}", per.join(" ")));
    }
    if !all {
        b.diff("the split formula disagrees with the engine; see per-overlap pole counts");
    }
    b.shape(
        rows.len() == sets.len() && r.singular_depth() <= 4,
        "depth at most 4",
    );
    Ok(b.finish(verdict_of(&[all], true)))
}

pub(super) fn eq_rq2(cx: &Ctx) -> Result<IdentityCheck> {
    let e = cx.so()?;
    let n = e.algebra().n();
    let sets = IndexSet::subsets(n, 4);
    let js = [default_j(), cx.random_four_set(n)];
    let mut worst = 0usize;
    let mut cnt = 0usize;
    for j in &js {
        let pfj = e.pf_field(j)?;
        let depths: Vec<usize> = sets
            .par_iter()
            .map(|i| Ok(e.contract(&pfj, &e.pf_field(i)?, 0)?.singular_depth()))
            .collect::<Result<_>>()?;
        cnt += depths.len();
        worst = worst.max(depths.into_iter().max().unwrap_or(0));
    }
    let ok = worst <= 4;
    let mut b = CheckBuilder::new(cx.id);
    b.param(format!(
        "so N={n}; J in {{{}, {}}}; all |I|=4",
        js[0], js[1]
    ))
    .paper("(PfF_J)_m PfF_I = 0 for m > 2")
    .engine(format!("max singular depth {worst} over {cnt} pairs"));
    b.shape(ok, "no poles above order 4");
    Ok(b.finish(verdict_of(&[ok], true)))
}

pub(super) fn prop_lead_pole(cx: &Ctx) -> Result<IdentityCheck> {
    let e = cx.so()?;
    let u = cx.wb.uea(Family::So, cx.p.so_n)?;
    let n = e.algebra().n();
    let sets = IndexSet::subsets(n, 4);
    let js = [default_j(), cx.random_four_set(n)];
    let mut rows: Vec<(String, usize)> = Vec::new();
    for j in &js {
        let part: Vec<(String, usize)> = sets
            .par_iter()
            .map(|i| -> Result<(String, usize)> {
                let c = u.act_on_indexset(&u.pfaffian(i)?, j)?;
                let a = e.pf_field_comb(&c)?;
                let d = e.contract(&a, &e.pf_field(i)?, 0)?.singular_depth();
                Ok((format!("I={i} J={j}"), d))
            })
            .collect::<Result<_>>()?;
        rows.extend(part);
    }
    let bad: Vec<String> = rows
        .iter()
        .filter(|r| r.1 > 1)
        .map(|r| format!("{} depth {}", r.0, r.1))
        .collect();
    let mut b = CheckBuilder::new(cx.id);
    b.param(format!(
        "so N={n}; J in {{{}, {}}}; all |I|=4",
        js[0], js[1]
    ))
    .paper("PfF_{PfF_I J}(z) PfF_I(w) begins with (z-w)^-1")
    .engine(format!(
        "{}/{} pairs have depth <= 1",
        rows.len() - bad.len(),
        rows.len()
    ));
    if !bad.is_empty() {
        b.diff(bad.iter().take(8).cloned().collect::<Vec<_>>().join(", "));
    }
    b.shape(bad.is_empty(), "leading pole order 1");
    Ok(b.finish(verdict_of(&[bad.is_empty()], true)))
}

pub(super) fn eq_pfb(cx: &Ctx) -> Result<IdentityCheck> {
    let e = cx.so()?;
    let u = cx.wb.uea(Family::So, cx.p.so_n)?;
    let n = e.algebra().n();
    let j = default_j();
    let sets = IndexSet::subsets(n, 4);
    // a_I with the printed sign (+1) and with the engine's commutator sign (-1)
    let per: Vec<[Vec<Field>; 2]> = sets
        .par_iter()
        .map(|i| -> Result<[Vec<Field>; 2]> {
            let first = e.pf_field_comb(&u.act_on_indexset(&u.pfaffian(i)?, &j)?)?;
            let mut second = Field::zero(e.tag());
            for (i1, i2, s) in i.splits(2) {
                let (x, y) = pair_of(&i2);
                let t =
                    e.normal_product(&skew(&e, &i1)?, &e.pf_field_comb(&f_action(x, y, &j))?)?;
                second = second.add(&t.scale(&int(s as i64)))?;
            }
            let bfield = e.pf_field(i)?;
            let mut out: [Vec<Field>; 2] = Default::default();
            for (slot, sigma) in [(0usize, 1i64), (1, -1)] {
                let a = second.add(&first.scale(&int(sigma)))?;
                let ab = e.contract(&a, &bfield, 0)?;
                let ba = e.contract(&bfield, &a, 0)?;
                out[slot] = (0..=5)
                    .map(|m| {
                        if m == 0 {
                            Ok(Field::zero(e.tag()))
                        } else {
                            ab.pole(m).add(&ba.pole(m))
                        }
                    })
                    .collect::<Result<_>>()?;
            }
            Ok(out)
        })
        .collect::<Result<_>>()?;
    let mut b = CheckBuilder::new(cx.id);
    b.param(format!("so N={n}; J={j}; summed over |I|=4"))
        .paper("([PfF_I,PfF_J])(z)PfF_I(w) + PfF_I(z)([PfF_I,PfF_J])(w) = 0");
    let mut verdicts = Vec::new();
    let alg = e.algebra();
    for (slot, label) in [
        (0usize, "printed commutator sign"),
        (1, "engine commutator sign"),
    ] {
        let mut sum = vec![Field::zero(e.tag()); 6];
        let mut each_zero = 0usize;
        for p in &per {
            if p[slot].iter().all(Field::is_zero) {
                each_zero += 1;
            }
            for m in 1..=5 {
                sum[m] = sum[m].add(&p[slot][m])?;
            }
        }
        let nz: Vec<String> = (1..=5)
            .rev()
            .filter(|&m| !sum[m].is_zero())
            .map(|m| format!("p{m}={}", show(alg, &sum[m])))
            .collect();
        b.engine(format!(
            "{label}: per-I vanishing {each_zero}/{}; summed: {}",
            per.len(),
            if nz.is_empty() {
                "0".into()
            } else {
                nz.join(", ")
            }
        ));
        verdicts.push(nz.is_empty());
    }
    if !verdicts[0] {
        b.diff("the symmetrized OPE does not vanish with the printed commutator");
    }
    b.shape(verdicts.iter().any(|&v| v), "symmetrized OPE vanishes");
    Ok(b.finish(verdict_of(&verdicts[..1], true)))
}

fn sample_fields(cx: &Ctx, e: &OpeEngine, count: usize) -> Result<Vec<Field>> {
    let mut rng = cx.rng();
    let n = e.algebra().n();
    let mut out = Vec::new();
    for _ in 0..count {
        let pick = |rng: &mut rand_chacha::ChaCha8Rng| -> Result<Field> {
            let i = rng.gen_range(1..=n);
            let mut j = rng.gen_range(1..=n);
            while j == i {
                j = rng.gen_range(1..=n);
            }
            e.skew_current(i, j)
        };
        let f = match rng.gen_range(0..3) {
            0 => pick(&mut rng)?,
            1 => e.derivative(&pick(&mut rng)?)?,
            _ => {
                let x = pick(&mut rng)?;
                e.normal_product(&x, &pick(&mut rng)?)?
            }
        };
        if f.is_zero() {
            out.push(pick(&mut rng)?);
        } else {
            out.push(f);
        }
    }
    Ok(out)
}

pub(super) fn eq_ab1(cx: &Ctx) -> Result<IdentityCheck> {
    let e = cx.so()?;
    let fs = sample_fields(cx, &e, 12)?;
    let mut ok = 0usize;
    let mut nontrivial = 0usize;
    for t in fs.chunks(3) {
        let r = e.rearrange_assoc(&t[0], &t[1], &t[2])?;
        if r.residual == r.bracket_side {
            ok += 1;
        }
        if !r.residual.is_zero() {
            nontrivial += 1;
        }
    }
    let total = fs.len() / 3;
    let mut b = CheckBuilder::new(cx.id);
    b.param(format!("so N={}; {total} seeded triples", cx.p.so_n))
        .paper("((AB)E) - (A(BE)) = (A[E,B]) + ([E,A]B) + [(AB),E], [X,Y] = (XY) - (YX)")
        .engine(format!(
            "{ok}/{total} triples satisfy it ({nontrivial} with nonzero left side)"
        ));
    if ok < total {
        b.diff(format!("fails on {} triples", total - ok));
    }
    Ok(b.finish(verdict_of(&[ok == total], true)))
}

pub(super) fn eq_ab2(cx: &Ctx) -> Result<IdentityCheck> {
    let e = cx.so()?;
    let fs = sample_fields(cx, &e, 12)?;
    let mut ok = 0usize;
    for t in fs.chunks(2) {
        if e.rearrange_comm(&t[0], &t[1])? == e.normal_product(&t[1], &t[0])? {
            ok += 1;
        }
    }
    let total = fs.len() / 2;
    let mut b = CheckBuilder::new(cx.id);
    b.param(format!("so N={}; {total} seeded pairs", cx.p.so_n))
        .paper("(BA) = (AB) - d(AB)_1 + d^2(AB)_2/2! - ..., (AB)_m the pole-m coefficient")
        .engine(format!("{ok}/{total} pairs satisfy it"));
    if ok < total {
        b.diff(format!("fails on {} pairs", total - ok));
    }
    b.shape(ok == total, "rearrangement");
    Ok(b.finish(verdict_of(&[ok == total], true)))
}

// ------------------------------------------------------------------ lemmas

fn lemma_at(cx: &Ctx, n: usize, lemma: u8, shift: i64) -> Result<std::sync::Arc<Vec<Field>>> {
    cx.wb.lemma_sum(n, lemma, shift)
}

fn compare_poly(b: &mut CheckBuilder, what: &str, got: &Interpolated, want: &KnPoly) -> bool {
    let ok = got.poly() == Some(want);
    b.engine(format!("{what}: {}", got.describe()));
    if !ok {
        match got.poly() {
            Some(p) => b.diff(format!("{what}: engine - paper = {}", p.sub(want))),
            None => b.diff(format!("{what}: not certified as a polynomial in N")),
        };
    }
    ok
}

pub(super) fn lemma_l1(cx: &Ctx) -> Result<IdentityCheck> {
    let n = cx.p.so_n;
    let e = cx.so()?;
    let v = lemma_at(cx, n, 1, 4)?;
    let pf = e.pf_field(&default_j())?;
    let unsigned = lemma_at(cx, n, 0, 4)?;
    let interp = interpolate_in_n(|m| {
        let v = lemma_at(cx, m, 1, 4)?;
        let pf = cx.wb.engine(Family::So, m)?.pf_field(&default_j())?;
        Ok(if depth(&v) == 4 {
            pole_ratio(&v, 4, &pf)
        } else {
            None
        })
    })?;
    let mut b = CheckBuilder::new(cx.id);
    b.param(format!("so N={n}; J={}; N-interpolation", default_j()))
        .paper("6(k+2)k PfF_J/(z-w)^4");
    b.engine(format!(
        "depth {}; pole4 = {} PfF_J",
        depth(&v),
        opt(&pole_ratio(&v, 4, &pf))
    ));
    b.engine(format!(
        "without the split sign: pole4 = {} PfF_J",
        opt(&pole_ratio(&unsigned, 4, &pf))
    ));
    let ok = compare_poly(&mut b, "pole4(k,N)", &interp, &six_k_k2());
    b.diff_if(ok, "the printed sum omits (-1)^(I1,I2); the value holds with the sign carried over from the split expansion");
    b.shape(
        depth(&v) == 4 && pole_ratio(&v, 4, &pf).is_some(),
        "single quartic pole along PfF_J",
    );
    Ok(b.finish(verdict_of(&[ok], true)))
}

impl CheckBuilder {
    fn diff_if(&mut self, cond: bool, s: &str) -> &mut Self {
        if cond {
            self.diff(s);
        }
        self
    }
}

pub(super) fn lemma_l2(cx: &Ctx) -> Result<IdentityCheck> {
    let n = cx.p.so_n;
    let e = cx.so()?;
    let v = lemma_at(cx, n, 2, 3)?;
    let sh = quartic_shape(&e, &v)?;
    let p4 = interpolate_in_n(|m| {
        let e = cx.wb.engine(Family::So, m)?;
        Ok(quartic_shape(&e, &lemma_at(cx, m, 2, 3)?)?.p4)
    })?;
    let p3 = interpolate_in_n(|m| {
        let e = cx.wb.engine(Family::So, m)?;
        Ok(quartic_shape(&e, &lemma_at(cx, m, 2, 3)?)?.p3)
    })?;
    let mut b = CheckBuilder::new(cx.id);
    b.param(format!("so N={n}; J={}; N-interpolation", default_j()))
        .paper("statement: (N-4)(12 PfF_J/(z-w)^4 + 2 dPfF_J/(z-w)^3)")
        .paper("appendix: (N-4)(12 PfF_J/(z-w)^4 + 12 dPfF_J/(z-w)^3)")
        .engine(format!(
            "depth {}; pole4 = {} PfF_J; pole3 = {} dPfF_J",
            sh.depth,
            opt(&sh.p4),
            opt(&sh.p3)
        ));
    let ok4 = compare_poly(&mut b, "pole4(k,N)", &p4, &n_minus_4().scale(Q::int(12)));
    let stmt = p3.poly() == Some(&n_minus_4().scale(Q::int(2)));
    let appx = p3.poly() == Some(&n_minus_4().scale(Q::int(12)));
    b.engine(format!("pole3(k,N): {}", p3.describe()));
    if !stmt {
        b.diff("pole3 differs from the statement's 2(N-4)");
    }
    if !appx {
        b.diff("pole3 differs from the appendix's 12(N-4)");
    }
    b.shape(sh.ok(), "pole4 along PfF_J, pole3 along dPfF_J");
    Ok(b.finish(verdict_of(&[ok4, stmt, appx], false)))
}

/// `|I ∩ J|`-restricted contribution to the pole-`m` coefficient of lemma 3.
fn lemma3_by_overlap(e: &OpeEngine, m: i64) -> Result<Vec<(usize, Field)>> {
    let j = default_j();
    let n = e.algebra().n();
    let mut out: Vec<(usize, Field)> = (0..=4).map(|o| (o, Field::zero(e.tag()))).collect();
    for i in IndexSet::subsets(n, 4) {
        let ov = i.indices().iter().filter(|&&x| j.contains(x)).count();
        let pfi = e.pf_field(&i)?;
        for (i1, i2, s) in i.splits(2) {
            let x = lemma_term(e, &j, &i1, &i2, 3)?;
            if x.is_zero() {
                continue;
            }
            let f = e.pole(&x, m - 2, &pfi)?.scale(&int(s as i64));
            out[ov].1 = out[ov].1.add(&f)?;
        }
    }
    Ok(out.into_iter().filter(|(_, f)| !f.is_zero()).collect())
}

pub(super) fn lemma_l3(cx: &Ctx) -> Result<IdentityCheck> {
    let n = cx.p.so_n;
    let e = cx.so()?;
    let v = lemma_at(cx, n, 3, 2)?;
    let sh = quartic_shape(&e, &v)?;
    let mut b = CheckBuilder::new(cx.id);
    b.param(format!("so N={n}; J={}; N in 5..=9", default_j()))
        .paper("no poles of order greater than 2")
        .engine(format!(
            "depth {}; pole4 = {} PfF_J; pole3 = {} dPfF_J",
            sh.depth,
            opt(&sh.p4),
            opt(&sh.p3)
        ));
    let mut depths = Vec::new();
    for m in [5usize, 6, 7, 8, 9] {
        depths.push(format!("N={m}:{}", depth(&lemma_at(cx, m, 3, 2)?)));
    }
    b.engine(format!("depths {}", depths.join(" ")));
    let p4 = interpolate_in_n(|m| {
        let e = cx.wb.engine(Family::So, m)?;
        Ok(quartic_shape(&e, &lemma_at(cx, m, 3, 2)?)?.p4)
    })?;
    b.engine(format!("pole4(k,N): {}", p4.describe()));
    if sh.depth > 2 {
        let parts = lemma3_by_overlap(&e, 4)?;
        let pf = e.pf_field(&default_j())?;
        let s: Vec<String> = parts
            .iter()
            .map(|(o, f)| format!("|I cap J|={o}: {}", opt(&f.ratio_to(&pf))))
            .collect();
        b.engine(format!("pole4 by overlap: {}", s.join(", ")));
        let ovs: Vec<String> = parts.iter().map(|(o, _)| o.to_string()).collect();
        b.diff(format!(
            "quartic and cubic poles survive; the quartic pole collects contributions from |I cap J| in {{{}}}",
            ovs.join(",")
        ));
    }
    b.shape(sh.depth <= 2, "no poles above order 2");
    Ok(b.finish(verdict_of(&[sh.depth <= 2], true)))
}

pub(super) fn lemma_l4(cx: &Ctx) -> Result<IdentityCheck> {
    let n = cx.p.so_n;
    let list = lemma_at(cx, n, 4, 1)?;
    let stmt = lemma_at(cx, n, 4, 2)?;
    let mut b = CheckBuilder::new(cx.id);
    b.param(format!("so N={n}; J={}; N in 5..=9", default_j()))
        .paper("statement: (F_I2 PfF_{J\\I1})_1(z)/(z-x)^2 has no poles above order 2")
        .paper("term list in the theorem's proof: the same with 1/(z-x)");
    let mut ok_list = true;
    let mut ok_stmt = true;
    let mut ds = Vec::new();
    for m in [5usize, 6, 7, 8, 9] {
        let a = depth(&lemma_at(cx, m, 4, 1)?);
        let c = depth(&lemma_at(cx, m, 4, 2)?);
        ok_list &= a <= 2;
        ok_stmt &= c <= 2;
        ds.push(format!("N={m}:{a}/{c}"));
    }
    b.engine(format!(
        "at N={n}: depth {} with 1/(z-x), {} with 1/(z-x)^2",
        depth(&list),
        depth(&stmt)
    ))
    .engine(format!("depths (1/(z-x) / 1/(z-x)^2): {}", ds.join(" ")));
    if !ok_stmt {
        b.diff("with the statement's 1/(z-x)^2 a cubic pole appears; the term entering the theorem carries 1/(z-x)");
    }
    b.shape(
        ok_list,
        "no poles above order 2 for the term entering the theorem",
    );
    Ok(b.finish(verdict_of(&[ok_list, ok_stmt], false)))
}

pub(super) fn lemma_l5(cx: &Ctx) -> Result<IdentityCheck> {
    let n = cx.p.so_n;
    let e = cx.so()?;
    let v = lemma_at(cx, n, 5, 1)?;
    let sh = quartic_shape(&e, &v)?;
    let p4 = interpolate_in_n(|m| {
        let e = cx.wb.engine(Family::So, m)?;
        Ok(quartic_shape(&e, &lemma_at(cx, m, 5, 1)?)?.p4)
    })?;
    let p3 = interpolate_in_n(|m| {
        let e = cx.wb.engine(Family::So, m)?;
        Ok(quartic_shape(&e, &lemma_at(cx, m, 5, 1)?)?.p3)
    })?;
    let mut b = CheckBuilder::new(cx.id);
    b.param(format!("so N={n}; J={}; N-interpolation", default_j()))
        .paper("-(k+2)((N-2)(N-3)(N-4)+6)(PfF_I/(z-w)^4 + dPfF_I/(z-w)^3), I read as J")
        .engine(format!(
            "depth {}; pole4 = {} PfF_J; pole3 = {} dPfF_J",
            sh.depth,
            opt(&sh.p4),
            opt(&sh.p3)
        ));
    let ok4 = compare_poly(&mut b, "pole4(k,N)", &p4, &lemma5_paper());
    let ok3 = compare_poly(&mut b, "pole3(k,N)", &p3, &lemma5_paper());
    let same = sh.p4.is_some() && sh.p4 == sh.p3;
    if !same {
        b.diff("the derivative companion does not carry the quartic coefficient");
    }
    b.shape(sh.ok(), "pole4 along PfF_J, pole3 along dPfF_J");
    Ok(b.finish(verdict_of(&[ok4, ok3], true)))
}

// -------------------------------------------------------------------- C_4

struct C4Scalars {
    depth: usize,
    p4: Option<Scalar>,
    p3: Option<Scalar>,
}

fn c4_scalars(cx: &Ctx, n: usize, c4_first: bool) -> Result<C4Scalars> {
    let e = cx.wb.engine(Family::So, n)?;
    let r = cx.wb.c4_pf(n, &default_j(), c4_first)?;
    let v = poles(&r);
    let sh = quartic_shape(&e, &v)?;
    Ok(C4Scalars {
        depth: r.singular_depth(),
        p4: sh.p4,
        p3: sh.p3,
    })
}

fn alpha_thm() -> KnPoly {
    six_k_k2()
        .add(&n_minus_4().scale(Q::int(12)))
        .add(&lemma5_paper())
}

fn beta_thm() -> KnPoly {
    n_minus_4().scale(Q::int(12)).add(&lemma5_paper())
}

fn alpha_swapped() -> KnPoly {
    six_k_k2()
        .add(&n_minus_4().scale(Q::int(12)))
        .add(&k_plus_2().mul(&cubic().sub(&kp(6))))
}

pub(super) fn thm_c4_ope(cx: &Ctx) -> Result<IdentityCheck> {
    let n = cx.p.so_n;
    let here = c4_scalars(cx, n, false)?;
    let p4 = interpolate_in_n(|m| Ok(c4_scalars(cx, m, false)?.p4))?;
    let p3 = interpolate_in_n(|m| Ok(c4_scalars(cx, m, false)?.p3))?;
    let mut b = CheckBuilder::new(cx.id);
    b.param(format!("so N={n}; J={}; N-interpolation", default_j()))
        .paper(format!("pole4 = {}", alpha_thm()))
        .paper(format!(
            "pole3 = {} (final form) or 4x that (statement)",
            beta_thm()
        ))
        .engine(format!(
            "depth {}; pole4 = {} PfF_J; pole3 = {} dPfF_J",
            here.depth,
            opt(&here.p4),
            opt(&here.p3)
        ));
    let a = compare_poly(&mut b, "pole4(k,N)", &p4, &alpha_thm());
    let b1 = compare_poly(&mut b, "pole3(k,N)", &p3, &beta_thm());
    let b4 = p3.poly() == Some(&beta_thm().scale(Q::int(4)));
    b.diff(format!(
        "the printed pole4 differs from the swapped-order pole4 {} although both orders share the quartic coefficient",
        alpha_swapped()
    ));
    b.shape(
        here.depth == 4 && here.p4.is_some() && here.p3.is_some(),
        "depth 4, pole4 along PfF_J, pole3 along dPfF_J",
    );
    Ok(b.finish(verdict_of(&[a, b1, b4], false)))
}

pub(super) fn eq_c4_swapped(cx: &Ctx) -> Result<IdentityCheck> {
    let n = cx.p.so_n;
    let here = c4_scalars(cx, n, true)?;
    let p4 = interpolate_in_n(|m| Ok(c4_scalars(cx, m, true)?.p4))?;
    let p3 = interpolate_in_n(|m| Ok(c4_scalars(cx, m, true)?.p3))?;
    let mut b = CheckBuilder::new(cx.id);
    b.param(format!("so N={n}; J={}; N-interpolation", default_j()))
        .paper(format!("pole4 = {}", alpha_swapped()))
        .paper(format!("pole3 = {}", six_k_k2()))
        .engine(format!(
            "depth {}; pole4 = {} PfF_J; pole3 = {} dPfF_J",
            here.depth,
            opt(&here.p4),
            opt(&here.p3)
        ));
    let a = compare_poly(&mut b, "pole4(k,N)", &p4, &alpha_swapped());
    let c = compare_poly(&mut b, "pole3(k,N)", &p3, &six_k_k2());
    b.diff(format!(
        "the printed pole4 differs from the other order's printed {}",
        alpha_thm()
    ));
    b.shape(
        here.depth == 4 && here.p4.is_some() && here.p3.is_some(),
        "depth 4, pole4 along PfF_J, pole3 along dPfF_J",
    );
    Ok(b.finish(verdict_of(&[a, c], false)))
}

/// Engine value of `c(k,N)` in `C_4^{-1} PfF_J = c ∂PfF_J`.
pub fn c4_minus_one_scalar(wb: &super::Workbench, n: usize) -> Result<Option<Scalar>> {
    let e = wb.engine(Family::So, n)?;
    let r = wb.c4_pf(n, &default_j(), true)?;
    Ok(r.pole(3)
        .ratio_to(&e.derivative(&e.pf_field(&default_j())?)?))
}

pub(super) fn cor_s1(cx: &Ctx) -> Result<IdentityCheck> {
    let n = cx.p.so_n;
    let here = c4_scalars(cx, n, true)?;
    let c = interpolate_in_n(|m| c4_minus_one_scalar(cx.wb, m))?;
    let degree_two = here
        .p3
        .as_ref()
        .map(|s| s.is_polynomial() && s.numer().degree() == Some(2))
        .unwrap_or(false);
    let mut b = CheckBuilder::new(cx.id);
    b.param(format!("so N={n}; J={}; N-interpolation", default_j()))
        .paper("C_4^{-1} PfF_J = 6(k+2)k dPfF_J")
        .engine(format!(
            "depth {}; C_4^m PfF_J = 0 for m >= 1: {}; c = {}",
            here.depth,
            here.depth <= 4,
            opt(&here.p3)
        ))
        .engine(format!("c polynomial of degree 2 in k: {degree_two}"));
    let ok = compare_poly(&mut b, "c(k,N)", &c, &six_k_k2());
    let implied = [
        ("pole4 - pole3 of the theorem", alpha_thm().sub(&beta_thm())),
        (
            "with the factor 4",
            alpha_thm().sub(&beta_thm().scale(Q::int(4))),
        ),
        ("with the swapped pole4", alpha_swapped().sub(&beta_thm())),
    ];
    b.diff(format!(
        "the printed data imply different values of c: {}",
        implied
            .iter()
            .map(|(w, p)| format!("{w}: {p}"))
            .collect::<Vec<_>>()
            .join("; ")
    ));
    b.shape(
        here.depth == 4 && here.p3.is_some() && degree_two,
        "depth 4, C_4^{-1} PfF_J proportional to dPfF_J with c of degree 2 in k",
    );
    Ok(b.finish(verdict_of(&[ok], false)))
}
