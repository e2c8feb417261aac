//! Symbolic fields: linear combinations of right-nested normal-ordered
//! products of derivatives of currents.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::lie::{Family, LieAlgebra};
use crate::scalar::{Scalar, Q};

/// `∂^deriv J_gen`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Letter {
    pub gen: u16,
    pub deriv: u8,
}

impl Letter {
    pub fn new(gen: usize, deriv: usize) -> Letter {
        Letter {
            gen: gen as u16,
            deriv: deriv as u8,
        }
    }

    pub fn weight(self) -> usize {
        self.deriv as usize + 1
    }

    pub fn bump(self, by: usize) -> Letter {
        Letter {
            gen: self.gen,
            deriv: self.deriv + by as u8,
        }
    }
}

/// Right-nested normal product `(l1(l2(…ln)))` with letters in
/// nondecreasing order; the empty monomial is the identity field.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Default)]
pub struct Monomial(Vec<Letter>);

impl Monomial {
    pub fn unit() -> Monomial {
        Monomial(Vec::new())
    }

    pub fn letter(l: Letter) -> Monomial {
        Monomial(vec![l])
    }

    /// Caller guarantees sortedness.
    pub(crate) fn from_sorted(v: Vec<Letter>) -> Monomial {
        debug_assert!(v.windows(2).all(|w| w[0] <= w[1]));
        Monomial(v)
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_unit(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn weight(&self) -> usize {
        self.0.iter().map(|l| l.weight()).sum()
    }

    pub fn head(&self) -> Option<(Letter, Monomial)> {
        self.0
            .split_first()
            .map(|(h, t)| (*h, Monomial(t.to_vec())))
    }
}

/// Sparse combination of monomials.
pub type Terms = BTreeMap<Monomial, Scalar>;

pub(crate) fn add_into(acc: &mut Terms, m: Monomial, c: Scalar) {
    if c.is_zero() {
        return;
    }
    match acc.entry(m) {
        Entry::Vacant(v) => {
            v.insert(c);
        }
        Entry::Occupied(mut o) => {
            let s = o.get() + &c;
            if s.is_zero() {
                o.remove();
            } else {
                *o.get_mut() = s;
            }
        }
    }
}

pub(crate) fn add_scaled(acc: &mut Terms, x: &Terms, c: &Scalar) {
    if c.is_zero() {
        return;
    }
    for (m, v) in x {
        add_into(acc, m.clone(), if c.is_one() { v.clone() } else { v * c });
    }
}

/// Identifies the algebra a field was built over.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct AlgTag(pub Family, pub usize);

impl AlgTag {
    pub fn of(alg: &LieAlgebra) -> AlgTag {
        AlgTag(alg.family(), alg.n())
    }
}

/// A field over a fixed algebra in canonical form.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Field {
    tag: AlgTag,
    terms: Terms,
}

impl Field {
    pub fn zero(tag: AlgTag) -> Field {
        Field {
            tag,
            terms: Terms::new(),
        }
    }

    pub fn unit(tag: AlgTag) -> Field {
        Field::from_terms(
            tag,
            [(Monomial::unit(), Scalar::one())].into_iter().collect(),
        )
    }

    pub fn from_terms(tag: AlgTag, mut terms: Terms) -> Field {
        terms.retain(|_, c| !c.is_zero());
        Field { tag, terms }
    }

    pub fn tag(&self) -> AlgTag {
        self.tag
    }

    pub fn terms(&self) -> &Terms {
        &self.terms
    }

    pub fn into_terms(self) -> Terms {
        self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, m: &Monomial) -> Scalar {
        self.terms.get(m).cloned().unwrap_or_default()
    }

    pub fn check_same(&self, o: &Field) -> Result<()> {
        if self.tag == o.tag {
            Ok(())
        } else {
            Err(Error::MixedAlgebras)
        }
    }

    pub fn add(&self, o: &Field) -> Result<Field> {
        self.check_same(o)?;
        let mut t = self.terms.clone();
        add_scaled(&mut t, &o.terms, &Scalar::one());
        Ok(Field {
            tag: self.tag,
            terms: t,
        })
    }

    pub fn sub(&self, o: &Field) -> Result<Field> {
        self.add(&o.scale(&Scalar::int(-1)))
    }

    pub fn scale(&self, c: &Scalar) -> Field {
        let mut t = Terms::new();
        add_scaled(&mut t, &self.terms, c);
        Field {
            tag: self.tag,
            terms: t,
        }
    }

    /// Weights present, ascending.
    pub fn weights(&self) -> Vec<usize> {
        let mut w: Vec<usize> = self.terms.keys().map(Monomial::weight).collect();
        w.sort_unstable();
        w.dedup();
        w
    }

    /// Conformal weight of a homogeneous field (zero field: weight 0).
    pub fn weight(&self) -> Result<usize> {
        match self.weights()[..] {
            [] => Ok(0),
            [w] => Ok(w),
            _ => Err(Error::NotHomogeneous),
        }
    }

    /// If `self = c · other` for a scalar `c`, return `c`.
    pub fn ratio_to(&self, other: &Field) -> Option<Scalar> {
        if other.is_zero() {
            return if self.is_zero() {
                Some(Scalar::zero())
            } else {
                None
            };
        }
        let (m, c) = other.terms.iter().next()?;
        let r = &self.coeff(m) / c;
        if self == &other.scale(&r) {
            Some(r)
        } else {
            None
        }
    }

    /// Canonical surface syntax; parseable back to the same field.
    pub fn display<'a>(&'a self, alg: &'a LieAlgebra) -> FieldDisplay<'a> {
        FieldDisplay {
            f: self,
            alg,
            latex: false,
        }
    }

    pub fn latex<'a>(&'a self, alg: &'a LieAlgebra) -> FieldDisplay<'a> {
        FieldDisplay {
            f: self,
            alg,
            latex: true,
        }
    }
}

pub struct FieldDisplay<'a> {
    f: &'a Field,
    alg: &'a LieAlgebra,
    latex: bool,
}

fn letter_text(alg: &LieAlgebra, l: Letter) -> String {
    let mut s = alg.name(l.gen as usize);
    for _ in 0..l.deriv {
        s = format!("d({s})");
    }
    s
}

fn letter_latex(alg: &LieAlgebra, l: Letter) -> String {
    let base = match alg.skew_pair(l.gen as usize) {
        Some((i, j)) => format!("F_{{{i}{j}}}"),
        None => format!("J^{{{}}}", l.gen + 1),
    };
    match l.deriv {
        0 => base,
        1 => format!("\\partial {base}"),
        d => format!("\\partial^{{{d}}} {base}"),
    }
}

fn monomial_text(alg: &LieAlgebra, m: &Monomial, latex: bool) -> String {
    let ls = m.letters();
    if ls.is_empty() {
        return "1".into();
    }
    let names: Vec<String> = ls
        .iter()
        .map(|&l| {
            if latex {
                letter_latex(alg, l)
            } else {
                letter_text(alg, l)
            }
        })
        .collect();
    let mut s = names[names.len() - 1].clone();
    for n in names[..names.len() - 1].iter().rev() {
        s = if latex {
            format!(":{n}\\,{s}:")
        } else {
            format!("({n}{s})")
        };
    }
    s
}

impl fmt::Display for FieldDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.f.is_zero() {
            return f.write_str("0");
        }
        for (n, (m, c)) in self.f.terms.iter().enumerate() {
            let body = monomial_text(self.alg, m, self.latex);
            let (neg, mag) = match c.as_constant() {
                Some(q) if q.is_negative() => (true, Scalar::from_q(-q)),
                _ => (false, c.clone()),
            };
            if n > 0 {
                f.write_str(if neg { " - " } else { " + " })?;
            } else if neg {
                f.write_str("-")?;
            }
            let unit = m.is_unit();
            match mag.as_constant() {
                Some(q) if q.is_one() => f.write_str(&body)?,
                Some(q) if unit => write!(f, "{}", q_text(q, self.latex))?,
                Some(q) if q.is_integer() => write!(f, "{q}*{body}")?,
                _ if unit => write!(f, "({})", scalar_text(&mag, self.latex))?,
                _ => {
                    if self.latex {
                        write!(f, "\\left({}\\right){body}", scalar_text(&mag, true))?
                    } else {
                        write!(f, "({mag})*{body}")?
                    }
                }
            }
        }
        Ok(())
    }
}

fn q_text(q: Q, latex: bool) -> String {
    if latex && !q.is_integer() {
        format!("\\frac{{{}}}{{{}}}", q.numer(), q.denom())
    } else if q.is_integer() {
        q.to_string()
    } else {
        format!("({q})")
    }
}

fn scalar_text(s: &Scalar, latex: bool) -> String {
    if latex {
        let t = s.to_string();
        match t.split_once(")/(") {
            Some((a, b)) => format!("\\frac{{{}}}{{{}}}", &a[1..], &b[..b.len() - 1]),
            None => t,
        }
    } else {
        s.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn monomial_weight_and_order() {
        let a = Letter::new(0, 0);
        let b = Letter::new(0, 2);
        let m = Monomial::from_sorted(vec![a, b]);
        assert_eq!(m.weight(), 4);
        assert!(a < b);
        assert_eq!(Monomial::unit().weight(), 0);
    }

    #[test]
    fn display_nesting() {
        let alg = LieAlgebra::so(6).unwrap();
        let tag = AlgTag::of(&alg);
        let ls = vec![Letter::new(0, 0), Letter::new(5, 0), Letter::new(14, 1)];
        let f = Field::from_terms(
            tag,
            [(Monomial::from_sorted(ls), Scalar::int(-3))]
                .into_iter()
                .collect(),
        );
        assert_eq!(f.display(&alg).to_string(), "-3*(F[1,2](F[2,3]d(F[5,6])))");
        let g = Field::unit(tag).scale(&Scalar::k_plus(2));
        assert_eq!(g.display(&alg).to_string(), "(k+2)");
    }

    #[test]
    fn ratio() {
        let tag = AlgTag(Family::So, 4);
        let m = Monomial::letter(Letter::new(1, 0));
        let f = Field::from_terms(tag, [(m, Scalar::int(2))].into_iter().collect());
        assert_eq!(f.scale(&Scalar::k()).ratio_to(&f), Some(Scalar::k()));
        assert!(f.ratio_to(&Field::unit(tag)).is_none());
    }
}
