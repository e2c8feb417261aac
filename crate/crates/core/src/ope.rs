//! Operator product expansions by recursive Wick contraction.
//!
//! Internally everything is expressed through the `n`-th products
//! `a_(n) b`, related to pole coefficients by `(ab)_m = a_(m-1) b`. For
//! `n < 0`, `a_(n) b = (∂^{-n-1} a / (-n-1)!  b)`.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use dashmap::DashMap;

use crate::error::{Error, Result};
use crate::field::{add_into, add_scaled, AlgTag, Field, Letter, Monomial, Terms};
use crate::lie::LieAlgebra;
use crate::scalar::{Scalar, Q};

type Shared = Arc<Terms>;

fn factorial(n: usize) -> Q {
    (1..=n as i64).fold(Q::ONE, |acc, i| acc * Q::int(i))
}

fn binom(n: usize, k: usize) -> Q {
    factorial(n) / (factorial(k) * factorial(n - k))
}

/// `n (n-1) … (n-p+1)` for any integer `n`.
fn falling(n: i64, p: usize) -> Q {
    (0..p as i64).fold(Q::ONE, |acc, i| acc * Q::int(n - i))
}

fn terms_weight_max(t: &Terms) -> usize {
    t.keys().map(Monomial::weight).max().unwrap_or(0)
}

/// Pole-order expansion `a(z) b(w) = Σ_m (ab)_m(w) / (z-w)^m`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OpeResult {
    tag: AlgTag,
    coeffs: BTreeMap<i64, Field>,
    regular_depth: usize,
}

impl OpeResult {
    /// Coefficient of `(z-w)^{-m}`; zero outside the computed window.
    pub fn pole(&self, m: i64) -> Field {
        self.coeffs
            .get(&m)
            .cloned()
            .unwrap_or_else(|| Field::zero(self.tag))
    }

    /// Largest `m` with a nonzero coefficient, or 0 if the singular part vanishes.
    pub fn singular_depth(&self) -> usize {
        self.coeffs
            .iter()
            .filter(|(m, f)| **m > 0 && !f.is_zero())
            .map(|(m, _)| *m as usize)
            .max()
            .unwrap_or(0)
    }

    pub fn regular_depth(&self) -> usize {
        self.regular_depth
    }

    /// Nonzero singular coefficients, highest pole first.
    pub fn singular(&self) -> Vec<(i64, &Field)> {
        self.coeffs
            .iter()
            .rev()
            .filter(|(m, f)| **m > 0 && !f.is_zero())
            .map(|(m, f)| (*m, f))
            .collect()
    }

    /// All stored coefficients, highest pole first (regular ones included even if zero).
    pub fn all(&self) -> Vec<(i64, &Field)> {
        self.coeffs
            .iter()
            .rev()
            .filter(|(m, f)| **m <= 0 || !f.is_zero())
            .map(|(m, f)| (*m, f))
            .collect()
    }

    pub fn display<'a>(&'a self, alg: &'a LieAlgebra) -> OpeDisplay<'a> {
        OpeDisplay { r: self, alg }
    }
}

pub struct OpeDisplay<'a> {
    r: &'a OpeResult,
    alg: &'a LieAlgebra,
}

impl fmt::Display for OpeDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows = self.r.all();
        if rows.is_empty() {
            return writeln!(f, "regular");
        }
        for (m, fl) in rows {
            writeln!(f, "[{m}] {}", fl.display(self.alg))?;
        }
        Ok(())
    }
}

/// Both sides of the reassociation identity.
#[derive(Clone, Debug)]
pub struct AssocCheck {
    /// `((AB)E) - (A(BE))`
    pub residual: Field,
    /// `(A[E,B]) + ([E,A]B) + [(AB),E]` with `[X,Y] = (XY) - (YX)`.
    pub bracket_side: Field,
}

/// The contraction engine over one Lie algebra, with shared memo tables.
pub struct OpeEngine {
    alg: Arc<LieAlgebra>,
    tag: AlgTag,
    nop_letter_memo: DashMap<(Letter, Monomial), Shared>,
    nop_memo: DashMap<(Monomial, Monomial), Shared>,
    cur_memo: DashMap<(u16, u32, Monomial), Shared>,
    prod_memo: DashMap<(u32, Monomial, Monomial), Shared>,
    deriv_memo: DashMap<Monomial, Shared>,
}

fn single(m: Monomial, c: Scalar) -> Terms {
    let mut t = Terms::new();
    add_into(&mut t, m, c);
    t
}

fn cached<K: std::hash::Hash + Eq + Clone>(
    memo: &DashMap<K, Shared>,
    key: K,
    compute: impl FnOnce() -> Terms,
) -> Shared {
    let hit = memo.get(&key).map(|r| r.clone());
    if let Some(h) = hit {
        return h;
    }
    let v = Arc::new(compute());
    memo.entry(key).or_insert(v).clone()
}

impl OpeEngine {
    pub fn new(alg: Arc<LieAlgebra>) -> OpeEngine {
        let tag = AlgTag::of(&alg);
        OpeEngine {
            alg,
            tag,
            nop_letter_memo: DashMap::new(),
            nop_memo: DashMap::new(),
            cur_memo: DashMap::new(),
            prod_memo: DashMap::new(),
            deriv_memo: DashMap::new(),
        }
    }

    pub fn algebra(&self) -> &Arc<LieAlgebra> {
        &self.alg
    }

    pub fn tag(&self) -> AlgTag {
        self.tag
    }

    pub fn cache_size(&self) -> usize {
        self.nop_letter_memo.len()
            + self.nop_memo.len()
            + self.cur_memo.len()
            + self.prod_memo.len()
            + self.deriv_memo.len()
    }

    pub(crate) fn field(&self, t: Terms) -> Field {
        Field::from_terms(self.tag, t)
    }

    fn own(&self, f: &Field) -> Result<()> {
        if f.tag() != self.tag {
            return Err(Error::MixedAlgebras);
        }
        Ok(())
    }

    // ---- letter level ----

    /// `a_(m) b` for two letters, `m >= 0`: a combination of letters and the unit.
    fn letter_on_letter(&self, m: u32, a: Letter, b: Letter) -> Terms {
        let p = a.deriv as usize;
        let m = m as usize;
        let mut out = Terms::new();
        if m < p {
            return out;
        }
        let pre = falling(m as i64, p) * if p % 2 == 1 { -Q::ONE } else { Q::ONE };
        let n = m - p;
        let q = b.deriv as usize;
        let (x, y) = (a.gen as usize, b.gen as usize);
        for i in 0..=q.min(n) {
            let c = pre * binom(q, i) * falling(n as i64, i);
            match n - i {
                0 => {
                    for &(g, f) in self.alg.bracket(x, y) {
                        add_into(
                            &mut out,
                            Monomial::letter(Letter::new(g, q - i)),
                            Scalar::from_q(c * f),
                        );
                    }
                }
                1 if q == i => {
                    let kap = self.alg.metric(x, y);
                    if !kap.is_zero() {
                        add_into(&mut out, Monomial::unit(), Scalar::k().scale(c * kap));
                    }
                }
                _ => {}
            }
        }
        out
    }

    /// `l_(n) B` for a letter `l`, `n >= 0`.
    fn letter_prod(&self, n: u32, l: Letter, b: &Monomial) -> Terms {
        let p = l.deriv as u32;
        if n < p || b.is_unit() {
            return Terms::new();
        }
        let c = falling(n as i64, p as usize) * if p % 2 == 1 { -Q::ONE } else { Q::ONE };
        let r = self.cur_prod(l.gen, n - p, b);
        let mut out = Terms::new();
        add_scaled(&mut out, &r, &Scalar::from_q(c));
        out
    }

    /// `J_a (m) B`, `m >= 0`.
    fn cur_prod(&self, a: u16, m: u32, b: &Monomial) -> Shared {
        if b.is_unit() {
            return Arc::new(Terms::new());
        }
        cached(&self.cur_memo, (a, m, b.clone()), || {
            let (b1, rest) = b.head().expect("nonempty");
            let ja = Letter { gen: a, deriv: 0 };
            let mut out = Terms::new();
            // ((J_a (m) b1) R)
            for (x, c) in self.letter_on_letter(m, ja, b1) {
                match x.letters() {
                    [] => add_scaled(&mut out, &single(rest.clone(), Scalar::one()), &c),
                    [l] => add_scaled(&mut out, &self.nop_letter(*l, &rest), &c),
                    _ => unreachable!(),
                }
            }
            // (b1 (J_a (m) R))
            let inner = self.cur_prod(a, m, &rest);
            for (x, c) in inner.iter() {
                add_scaled(&mut out, &self.nop_letter(b1, x), c);
            }
            // Σ_j C(m,j) (J_a (j) b1)_(m-1-j) R
            for j in 0..m {
                for (x, c) in self.letter_on_letter(j, ja, b1) {
                    if let [l] = x.letters() {
                        let t = self.letter_prod(m - 1 - j, *l, &rest);
                        add_scaled(&mut out, &t, &c.scale(binom(m as usize, j as usize)));
                    }
                }
            }
            out
        })
    }

    /// Canonical form of `(l B)`.
    fn nop_letter(&self, l: Letter, b: &Monomial) -> Shared {
        let ls = b.letters();
        if ls.is_empty() || l <= ls[0] {
            let mut v = Vec::with_capacity(ls.len() + 1);
            v.push(l);
            v.extend_from_slice(ls);
            return Arc::new(single(Monomial::from_sorted(v), Scalar::one()));
        }
        cached(&self.nop_letter_memo, (l, b.clone()), || {
            let (b1, rest) = b.head().expect("nonempty");
            let mut out = Terms::new();
            // (l (b1 R)) = (b1 (l R)) + Σ_j (-1)^j (∂^{j+1}(l_(j) b1)/(j+1)! R)
            let inner = self.nop_letter(l, &rest);
            for (x, c) in inner.iter() {
                add_scaled(&mut out, &self.nop_letter(b1, x), c);
            }
            for j in 0..(l.weight() + b1.weight()) as u32 {
                let sign = if j % 2 == 1 { -Q::ONE } else { Q::ONE };
                let s = sign / factorial(j as usize + 1);
                for (x, c) in self.letter_on_letter(j, l, b1) {
                    if let [y] = x.letters() {
                        let t = self.nop_letter(y.bump(j as usize + 1), &rest);
                        add_scaled(&mut out, &t, &c.scale(s));
                    }
                }
            }
            out
        })
    }

    /// Canonical form of `(A B)` for monomials.
    fn nop(&self, a: &Monomial, b: &Monomial) -> Shared {
        match a.letters() {
            [] => return Arc::new(single(b.clone(), Scalar::one())),
            [l] => return self.nop_letter(*l, b),
            _ => {}
        }
        if b.is_unit() {
            return Arc::new(single(a.clone(), Scalar::one()));
        }
        cached(&self.nop_memo, (a.clone(), b.clone()), || {
            let (l, r) = a.head().expect("nonempty");
            let mut out = Terms::new();
            // ((l R) B) = (l (R B)) + Σ_j [(∂^{j+1} l/(j+1)! (R_(j) B)) + (∂^{j+1} R/(j+1)! (l_(j) B))]
            let rb = self.nop(&r, b);
            for (x, c) in rb.iter() {
                add_scaled(&mut out, &self.nop_letter(l, x), c);
            }
            for j in 0..(r.weight() + b.weight()) as u32 {
                let s = Scalar::from_q(factorial(j as usize + 1).recip());
                let y = self.prod(j, &r, b);
                for (x, c) in y.iter() {
                    add_scaled(
                        &mut out,
                        &self.nop_letter(l.bump(j as usize + 1), x),
                        &(c * &s),
                    );
                }
            }
            for j in 0..(l.weight() + b.weight()) as u32 {
                let z = self.letter_prod(j, l, b);
                if z.is_empty() {
                    continue;
                }
                let d = self.deriv_n(&r, j as usize + 1);
                let s = Scalar::from_q(factorial(j as usize + 1).recip());
                for (dm, dc) in &d {
                    for (zm, zc) in &z {
                        add_scaled(&mut out, &self.nop(dm, zm), &(&(dc * zc) * &s));
                    }
                }
            }
            out
        })
    }

    /// `A_(n) B` for monomials, `n >= 0`.
    fn prod(&self, n: u32, a: &Monomial, b: &Monomial) -> Shared {
        if a.is_unit() || b.is_unit() || (n as usize) >= a.weight() + b.weight() {
            return Arc::new(Terms::new());
        }
        if let [l] = a.letters() {
            return Arc::new(self.letter_prod(n, *l, b));
        }
        cached(&self.prod_memo, (n, a.clone(), b.clone()), || {
            let (l, r) = a.head().expect("nonempty");
            let mut out = Terms::new();
            // Σ_j (∂^j l/j! (R_(n+j) B))
            let mut j = 0u32;
            while ((n + j) as usize) < r.weight() + b.weight() {
                let y = self.prod(n + j, &r, b);
                let s = Scalar::from_q(factorial(j as usize).recip());
                for (x, c) in y.iter() {
                    add_scaled(&mut out, &self.nop_letter(l.bump(j as usize), x), &(c * &s));
                }
                j += 1;
            }
            // Σ_j R_(n-1-j) (l_(j) B)
            for j in 0..(l.weight() + b.weight()) as u32 {
                let z = self.letter_prod(j, l, b);
                if z.is_empty() {
                    continue;
                }
                if j < n {
                    for (zm, zc) in &z {
                        add_scaled(&mut out, &self.prod(n - 1 - j, &r, zm), zc);
                    }
                } else {
                    let m = (j - n) as usize;
                    let d = self.deriv_n(&r, m);
                    let s = Scalar::from_q(factorial(m).recip());
                    for (dm, dc) in &d {
                        for (zm, zc) in &z {
                            add_scaled(&mut out, &self.nop(dm, zm), &(&(dc * zc) * &s));
                        }
                    }
                }
            }
            out
        })
    }

    /// Canonical form of a right-nested product of letters in arbitrary order.
    fn canon(&self, seq: &[Letter]) -> Terms {
        let mut acc = single(Monomial::unit(), Scalar::one());
        for &l in seq.iter().rev() {
            let mut next = Terms::new();
            for (x, c) in &acc {
                add_scaled(&mut next, &self.nop_letter(l, x), c);
            }
            acc = next;
        }
        acc
    }

    fn deriv(&self, m: &Monomial) -> Shared {
        if m.is_unit() {
            return Arc::new(Terms::new());
        }
        cached(&self.deriv_memo, m.clone(), || {
            let mut out = Terms::new();
            let ls = m.letters();
            for i in 0..ls.len() {
                let mut v = ls.to_vec();
                v[i] = v[i].bump(1);
                add_scaled(&mut out, &self.canon(&v), &Scalar::one());
            }
            out
        })
    }

    fn deriv_n(&self, m: &Monomial, r: usize) -> Terms {
        let mut acc = single(m.clone(), Scalar::one());
        for _ in 0..r {
            let mut next = Terms::new();
            for (x, c) in &acc {
                add_scaled(&mut next, &self.deriv(x), c);
            }
            acc = next;
        }
        acc
    }

    /// `A_(n) B` on monomials for any integer `n`.
    fn nth_mono(&self, n: i64, a: &Monomial, b: &Monomial) -> Terms {
        if n >= 0 {
            return (*self.prod(n as u32, a, b)).clone();
        }
        let m = (-n - 1) as usize;
        let s = Scalar::from_q(factorial(m).recip());
        let mut out = Terms::new();
        for (dm, dc) in &self.deriv_n(a, m) {
            add_scaled(&mut out, &self.nop(dm, b), &(dc * &s));
        }
        out
    }

    // ---- public field-level API ----

    /// `a_(n) b` for fields, any integer `n`.
    pub fn nth_product(&self, a: &Field, n: i64, b: &Field) -> Result<Field> {
        self.own(a)?;
        self.own(b)?;
        let mut out = Terms::new();
        for (am, ac) in a.terms() {
            for (bm, bc) in b.terms() {
                add_scaled(&mut out, &self.nth_mono(n, am, bm), &(ac * bc));
            }
        }
        Ok(self.field(out))
    }

    /// Normal-ordered product `(a b)`.
    pub fn normal_product(&self, a: &Field, b: &Field) -> Result<Field> {
        self.nth_product(a, -1, b)
    }

    /// Right-nested normal product of a list of fields.
    pub fn nested(&self, fs: &[Field]) -> Result<Field> {
        let mut acc = Field::unit(self.tag);
        for f in fs.iter().rev() {
            acc = self.normal_product(f, &acc)?;
        }
        Ok(acc)
    }

    pub fn derivative(&self, a: &Field) -> Result<Field> {
        self.derivative_n(a, 1)
    }

    pub fn derivative_n(&self, a: &Field, r: usize) -> Result<Field> {
        self.own(a)?;
        let mut out = Terms::new();
        for (m, c) in a.terms() {
            add_scaled(&mut out, &self.deriv_n(m, r), c);
        }
        Ok(self.field(out))
    }

    /// Full singular part plus `regular_depth` regular coefficients
    /// `(ab)_0, (ab)_{-1}, …`.
    pub fn contract(&self, a: &Field, b: &Field, regular_depth: i64) -> Result<OpeResult> {
        self.own(a)?;
        self.own(b)?;
        if regular_depth < 0 {
            return Err(Error::NegativeDepth(regular_depth));
        }
        let top = (terms_weight_max(a.terms()) + terms_weight_max(b.terms())) as i64;
        let mut coeffs = BTreeMap::new();
        for m in 1..=top {
            coeffs.insert(m, self.nth_product(a, m - 1, b)?);
        }
        for m in (1 - regular_depth)..=0 {
            coeffs.insert(m, self.nth_product(a, m - 1, b)?);
        }
        Ok(OpeResult {
            tag: self.tag,
            coeffs,
            regular_depth: regular_depth as usize,
        })
    }

    /// `(ab)_m`, the coefficient of `(z-w)^{-m}`.
    pub fn pole(&self, a: &Field, m: i64, b: &Field) -> Result<Field> {
        self.nth_product(a, m - 1, b)
    }

    /// `A_n B = (AB)_{n+h}` for `A` homogeneous of weight `h`.
    pub fn mode_action(&self, a: &Field, n: i64, b: &Field) -> Result<Field> {
        let h = a.weight()? as i64;
        self.pole(a, n + h, b)
    }

    /// `((AB)E) - (A(BE))` against the bracket form of the same quantity.
    pub fn rearrange_assoc(&self, a: &Field, b: &Field, e: &Field) -> Result<AssocCheck> {
        let np = |x: &Field, y: &Field| self.normal_product(x, y);
        let br = |x: &Field, y: &Field| np(x, y)?.sub(&np(y, x)?);
        let ab = np(a, b)?;
        let residual = np(&ab, e)?.sub(&np(a, &np(b, e)?)?)?;
        let bracket_side = np(a, &br(e, b)?)?
            .add(&np(&br(e, a)?, b)?)?
            .add(&br(&ab, e)?)?;
        Ok(AssocCheck {
            residual,
            bracket_side,
        })
    }

    /// `(BA)` from the expansion of `A(z)B(w)`:
    /// `(BA) = (AB) - ∂(AB)_1 + ∂²(AB)_2/2! - …`, with `(AB)_m` pole coefficients.
    pub fn rearrange_comm(&self, a: &Field, b: &Field) -> Result<Field> {
        let r = self.contract(a, b, 1)?;
        let mut out = r.pole(0);
        for m in 1..=r.singular_depth() {
            let d = self.derivative_n(&r.pole(m as i64), m)?;
            let s = factorial(m).recip() * if m % 2 == 1 { -Q::ONE } else { Q::ONE };
            out = out.add(&d.scale(&Scalar::from_q(s)))?;
        }
        Ok(out)
    }

    // ---- named constructors ----

    pub fn current(&self, a: usize) -> Result<Field> {
        if a >= self.alg.dim() {
            return Err(Error::InvalidGenerator(format!("basis index {a}")));
        }
        Ok(self.field(single(Monomial::letter(Letter::new(a, 0)), Scalar::one())))
    }

    /// `F_ij` current, with `F_ji = -F_ij`, `F_ii = 0`.
    pub fn skew_current(&self, i: usize, j: usize) -> Result<Field> {
        let n = self.alg.n();
        if let Some(&index) = [i, j].iter().find(|&&x| x == 0 || x > n) {
            return Err(Error::IndexOutOfRange { index, n });
        }
        if i == j {
            return Ok(Field::zero(self.tag));
        }
        let (a, s) = self
            .alg
            .skew_index(i, j)
            .ok_or_else(|| Error::InvalidGenerator(format!("F[{i},{j}] in {:?}", self.alg)))?;
        Ok(self.current(a)?.scale(&Scalar::int(s as i64)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn so(n: usize) -> OpeEngine {
        OpeEngine::new(Arc::new(LieAlgebra::so(n).unwrap()))
    }

    #[test]
    fn current_current() {
        let e = so(5);
        let alg = e.algebra().clone();
        for a in 0..alg.dim() {
            for b in 0..alg.dim() {
                let r = e
                    .contract(&e.current(a).unwrap(), &e.current(b).unwrap(), 0)
                    .unwrap();
                let dp = Field::unit(e.tag()).scale(&Scalar::k().scale(alg.metric(a, b)));
                assert_eq!(r.pole(2), dp);
                let mut sp = Terms::new();
                for &(c, f) in alg.bracket(a, b) {
                    add_into(
                        &mut sp,
                        Monomial::letter(Letter::new(c, 0)),
                        Scalar::from_q(f),
                    );
                }
                assert_eq!(r.pole(1), e.field(sp));
                assert!(r.singular_depth() <= 2);
            }
        }
    }

    #[test]
    fn normal_product_reorders() {
        let e = so(4);
        let f12 = e.skew_current(1, 2).unwrap();
        let f23 = e.skew_current(2, 3).unwrap();
        let ab = e.normal_product(&f12, &f23).unwrap();
        let ba = e.normal_product(&f23, &f12).unwrap();
        // (F12 F23) - (F23 F12) = ∂F13
        let f13 = e.skew_current(1, 3).unwrap();
        assert_eq!(ab.sub(&ba).unwrap(), e.derivative(&f13).unwrap());
        assert_eq!(e.rearrange_comm(&f12, &f23).unwrap(), ba);
    }

    #[test]
    fn derivative_rule() {
        let e = so(5);
        let a = e
            .normal_product(
                &e.skew_current(1, 2).unwrap(),
                &e.skew_current(2, 3).unwrap(),
            )
            .unwrap();
        let b = e.skew_current(1, 3).unwrap();
        // (∂a)_(n) b = -n a_(n-1) b
        let da = e.derivative(&a).unwrap();
        for n in 0..5 {
            let lhs = e.nth_product(&da, n, &b).unwrap();
            let rhs = if n == 0 {
                Field::zero(e.tag())
            } else {
                e.nth_product(&a, n - 1, &b)
                    .unwrap()
                    .scale(&Scalar::int(-n))
            };
            assert_eq!(lhs, rhs, "n={n}");
        }
    }

    #[test]
    fn negative_depth_rejected() {
        let e = so(4);
        let a = e.current(0).unwrap();
        assert_eq!(
            e.contract(&a, &a, -1).unwrap_err(),
            Error::NegativeDepth(-1)
        );
    }
}
