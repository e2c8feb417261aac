//! Exact scalars: rationals and rational functions in the level `k`.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{CheckedAdd, CheckedDiv, CheckedMul, CheckedSub, One, Signed, Zero};

use crate::error::Error;

/// An exact rational number.
///
/// Backed by `i128` ratios; every operation is checked and panics on
/// overflow rather than wrapping, so a result is either exact or absent.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Q(Ratio<i128>);

impl Q {
    pub const ZERO: Q = Q(Ratio::new_raw(0, 1));
    pub const ONE: Q = Q(Ratio::new_raw(1, 1));

    pub fn new(n: i128, d: i128) -> Q {
        assert!(d != 0, "zero denominator");
        Q(Ratio::new(n, d))
    }

    pub fn int(n: i64) -> Q {
        Q(Ratio::from_integer(n as i128))
    }

    pub fn numer(&self) -> i128 {
        *self.0.numer()
    }

    pub fn denom(&self) -> i128 {
        *self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_one()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn abs(&self) -> Q {
        Q(self.0.abs())
    }

    pub fn recip(&self) -> Q {
        assert!(!self.is_zero(), "division by zero");
        Q(self.0.recip())
    }

    pub fn pow(&self, e: u32) -> Q {
        (0..e).fold(Q::ONE, |acc, _| acc * *self)
    }

    pub fn to_f64(&self) -> f64 {
        self.numer() as f64 / self.denom() as f64
    }
}

impl From<i64> for Q {
    fn from(n: i64) -> Q {
        Q::int(n)
    }
}

impl From<i32> for Q {
    fn from(n: i32) -> Q {
        Q::int(n as i64)
    }
}

impl Add for Q {
    type Output = Q;
    fn add(self, o: Q) -> Q {
        Q(self.0.checked_add(&o.0).expect("rational overflow in add"))
    }
}

impl Sub for Q {
    type Output = Q;
    fn sub(self, o: Q) -> Q {
        Q(self.0.checked_sub(&o.0).expect("rational overflow in sub"))
    }
}

impl Mul for Q {
    type Output = Q;
    fn mul(self, o: Q) -> Q {
        Q(self.0.checked_mul(&o.0).expect("rational overflow in mul"))
    }
}

impl Div for Q {
    type Output = Q;
    fn div(self, o: Q) -> Q {
        assert!(!o.is_zero(), "division by zero");
        Q(self.0.checked_div(&o.0).expect("rational overflow in div"))
    }
}

impl Neg for Q {
    type Output = Q;
    fn neg(self) -> Q {
        Q(-self.0)
    }
}

impl AddAssign for Q {
    fn add_assign(&mut self, o: Q) {
        *self = *self + o;
    }
}

impl SubAssign for Q {
    fn sub_assign(&mut self, o: Q) {
        *self = *self - o;
    }
}

impl MulAssign for Q {
    fn mul_assign(&mut self, o: Q) {
        *self = *self * o;
    }
}

impl fmt::Display for Q {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.denom() == 1 {
            write!(f, "{}", self.numer())
        } else {
            write!(f, "{}/{}", self.numer(), self.denom())
        }
    }
}

impl fmt::Debug for Q {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Q {
    type Err = Error;
    fn from_str(s: &str) -> Result<Q, Error> {
        let bad = || Error::Parse {
            pos: 0,
            msg: format!("invalid rational `{s}`"),
        };
        let s = s.trim();
        match s.split_once('/') {
            Some((n, d)) => {
                let n: i128 = n.trim().parse().map_err(|_| bad())?;
                let d: i128 = d.trim().parse().map_err(|_| bad())?;
                if d == 0 {
                    return Err(bad());
                }
                Ok(Q::new(n, d))
            }
            None => Ok(Q::new(s.parse().map_err(|_| bad())?, 1)),
        }
    }
}

/// Dense univariate polynomial in `k` with rational coefficients,
/// lowest degree first, no trailing zeros.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Poly(Vec<Q>);

impl Poly {
    pub fn zero() -> Poly {
        Poly(Vec::new())
    }

    pub fn constant(c: Q) -> Poly {
        Poly::from_coeffs(vec![c])
    }

    pub fn one() -> Poly {
        Poly::constant(Q::ONE)
    }

    /// The monomial `k`.
    pub fn k() -> Poly {
        Poly(vec![Q::ZERO, Q::ONE])
    }

    pub fn from_coeffs(mut c: Vec<Q>) -> Poly {
        while c.last().is_some_and(Q::is_zero) {
            c.pop();
        }
        Poly(c)
    }

    pub fn coeffs(&self) -> &[Q] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.0.len() == 1 && self.0[0].is_one()
    }

    /// Degree, with `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    pub fn lead(&self) -> Q {
        self.0.last().copied().unwrap_or(Q::ZERO)
    }

    pub fn coeff(&self, d: usize) -> Q {
        self.0.get(d).copied().unwrap_or(Q::ZERO)
    }

    pub fn scale(&self, c: Q) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly(self.0.iter().map(|&x| x * c).collect())
    }

    pub fn eval(&self, k: Q) -> Q {
        self.0.iter().rev().fold(Q::ZERO, |acc, &c| acc * k + c)
    }

    pub fn monic(&self) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        self.scale(self.lead().recip())
    }

    pub fn div_rem(&self, d: &Poly) -> (Poly, Poly) {
        assert!(!d.is_zero(), "polynomial division by zero");
        let dd = d.0.len() - 1;
        let lead_inv = d.lead().recip();
        let mut r = self.0.clone();
        if r.len() <= dd {
            return (Poly::zero(), self.clone());
        }
        let mut q = vec![Q::ZERO; r.len() - dd];
        for i in (0..q.len()).rev() {
            let c = r[i + dd] * lead_inv;
            q[i] = c;
            if !c.is_zero() {
                for (j, &dc) in d.0.iter().enumerate() {
                    r[i + j] -= c * dc;
                }
            }
        }
        r.truncate(dd);
        (Poly::from_coeffs(q), Poly::from_coeffs(r))
    }

    /// Monic greatest common divisor.
    pub fn gcd(&self, other: &Poly) -> Poly {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r.monic();
        }
        a.monic()
    }

    fn fmt_integer_terms(c: &[i128], f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (d, &x) in c.iter().enumerate().rev() {
            if x == 0 {
                continue;
            }
            let sign = if x < 0 {
                "-"
            } else if first {
                ""
            } else {
                "+"
            };
            let a = x.abs();
            write!(f, "{sign}")?;
            match d {
                0 => write!(f, "{a}")?,
                _ => {
                    if a != 1 {
                        write!(f, "{a}")?;
                    }
                    write!(f, "k")?;
                    if d > 1 {
                        write!(f, "^{d}")?;
                    }
                }
            }
            first = false;
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, o: &Poly) -> Poly {
        let n = self.0.len().max(o.0.len());
        Poly::from_coeffs((0..n).map(|i| self.coeff(i) + o.coeff(i)).collect())
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, o: &Poly) -> Poly {
        let n = self.0.len().max(o.0.len());
        Poly::from_coeffs((0..n).map(|i| self.coeff(i) - o.coeff(i)).collect())
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, o: &Poly) -> Poly {
        if self.is_zero() || o.is_zero() {
            return Poly::zero();
        }
        let mut c = vec![Q::ZERO; self.0.len() + o.0.len() - 1];
        for (i, &a) in self.0.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, &b) in o.0.iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        Poly::from_coeffs(c)
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly(self.0.iter().map(|&c| -c).collect())
    }
}

impl Ord for Poly {
    fn cmp(&self, o: &Poly) -> Ordering {
        self.0
            .len()
            .cmp(&o.0.len())
            .then_with(|| self.0.iter().rev().cmp(o.0.iter().rev()))
    }
}

impl PartialOrd for Poly {
    fn partial_cmp(&self, o: &Poly) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", Scalar::from_poly(self.clone()))
    }
}

/// A rational function in the level `k`, kept reduced with a monic
/// denominator so that structural equality is mathematical equality.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Scalar {
    num: Poly,
    den: Poly,
}

impl Default for Scalar {
    fn default() -> Self {
        Scalar::zero()
    }
}

impl Scalar {
    pub fn zero() -> Scalar {
        Scalar {
            num: Poly::zero(),
            den: Poly::one(),
        }
    }

    pub fn one() -> Scalar {
        Scalar::int(1)
    }

    pub fn int(n: i64) -> Scalar {
        Scalar::from_q(Q::int(n))
    }

    pub fn from_q(q: Q) -> Scalar {
        Scalar {
            num: Poly::constant(q),
            den: Poly::one(),
        }
    }

    pub fn k() -> Scalar {
        Scalar::from_poly(Poly::k())
    }

    /// `k + c`
    pub fn k_plus(c: i64) -> Scalar {
        Scalar::from_poly(Poly::from_coeffs(vec![Q::int(c), Q::ONE]))
    }

    pub fn from_poly(p: Poly) -> Scalar {
        Scalar {
            num: p,
            den: Poly::one(),
        }
    }

    pub fn from_parts(num: Poly, den: Poly) -> Scalar {
        assert!(!den.is_zero(), "zero denominator");
        if num.is_zero() {
            return Scalar::zero();
        }
        if den.degree() == Some(0) {
            let s = den.lead().recip();
            return Scalar {
                num: num.scale(s),
                den: Poly::one(),
            };
        }
        let g = num.gcd(&den);
        let (mut n, _) = num.div_rem(&g);
        let (mut d, _) = den.div_rem(&g);
        let l = d.lead().recip();
        n = n.scale(l);
        d = d.scale(l);
        Scalar { num: n, den: d }
    }

    pub fn numer(&self) -> &Poly {
        &self.num
    }

    pub fn denom(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_one()
    }

    /// The value as a rational constant, if it does not depend on `k`.
    pub fn as_constant(&self) -> Option<Q> {
        match (self.num.degree(), self.den.is_one()) {
            (None, _) => Some(Q::ZERO),
            (Some(0), true) => Some(self.num.lead()),
            _ => None,
        }
    }

    pub fn scale(&self, c: Q) -> Scalar {
        if c.is_zero() {
            return Scalar::zero();
        }
        Scalar {
            num: self.num.scale(c),
            den: self.den.clone(),
        }
    }

    pub fn recip(&self) -> Scalar {
        assert!(!self.is_zero(), "division by zero scalar");
        Scalar::from_parts(self.den.clone(), self.num.clone())
    }

    /// Specialize `k` to a rational value; `None` at a pole.
    pub fn eval(&self, k: Q) -> Option<Q> {
        let d = self.den.eval(k);
        if d.is_zero() {
            None
        } else {
            Some(self.num.eval(k) / d)
        }
    }

    /// Integer-coefficient numerator and denominator with positive
    /// denominator leading coefficient and no common integer content.
    pub fn integer_parts(&self) -> (Vec<i128>, Vec<i128>) {
        let mut l: i128 = 1;
        for c in self.num.coeffs().iter().chain(self.den.coeffs()) {
            l = l.lcm(&c.denom());
        }
        let ql = Q::new(l, 1);
        let n: Vec<i128> = self
            .num
            .coeffs()
            .iter()
            .map(|&c| (c * ql).numer())
            .collect();
        let d: Vec<i128> = self
            .den
            .coeffs()
            .iter()
            .map(|&c| (c * ql).numer())
            .collect();
        let mut g: i128 = 0;
        for &x in n.iter().chain(d.iter()) {
            g = g.gcd(&x);
        }
        if g == 0 {
            g = 1;
        }
        (
            n.into_iter().map(|x| x / g).collect(),
            d.into_iter().map(|x| x / g).collect(),
        )
    }
}

impl From<i64> for Scalar {
    fn from(n: i64) -> Scalar {
        Scalar::int(n)
    }
}

impl From<Q> for Scalar {
    fn from(q: Q) -> Scalar {
        Scalar::from_q(q)
    }
}

impl Add for &Scalar {
    type Output = Scalar;
    fn add(self, o: &Scalar) -> Scalar {
        if self.is_zero() {
            return o.clone();
        }
        if o.is_zero() {
            return self.clone();
        }
        if self.den == o.den {
            let n = &self.num + &o.num;
            if self.den.is_one() {
                return Scalar::from_poly(n);
            }
            return Scalar::from_parts(n, self.den.clone());
        }
        Scalar::from_parts(
            &(&self.num * &o.den) + &(&o.num * &self.den),
            &self.den * &o.den,
        )
    }
}

impl Sub for &Scalar {
    type Output = Scalar;
    fn sub(self, o: &Scalar) -> Scalar {
        self + &(-o)
    }
}

impl Mul for &Scalar {
    type Output = Scalar;
    fn mul(self, o: &Scalar) -> Scalar {
        if self.is_zero() || o.is_zero() {
            return Scalar::zero();
        }
        if self.den.is_one() && o.den.is_one() {
            return Scalar::from_poly(&self.num * &o.num);
        }
        Scalar::from_parts(&self.num * &o.num, &self.den * &o.den)
    }
}

impl Div for &Scalar {
    type Output = Scalar;
    fn div(self, o: &Scalar) -> Scalar {
        self * &o.recip()
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar {
            num: -&self.num,
            den: self.den.clone(),
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for Scalar {
            type Output = Scalar;
            fn $m(self, o: Scalar) -> Scalar {
                (&self).$m(&o)
            }
        }
        impl $tr<&Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, o: &Scalar) -> Scalar {
                (&self).$m(o)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
forward_owned!(Div, div);

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

impl AddAssign<&Scalar> for Scalar {
    fn add_assign(&mut self, o: &Scalar) {
        *self = &*self + o;
    }
}

impl SubAssign<&Scalar> for Scalar {
    fn sub_assign(&mut self, o: &Scalar) {
        *self = &*self - o;
    }
}

impl Ord for Scalar {
    fn cmp(&self, o: &Scalar) -> Ordering {
        self.den.cmp(&o.den).then_with(|| self.num.cmp(&o.num))
    }
}

impl PartialOrd for Scalar {
    fn partial_cmp(&self, o: &Scalar) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

struct IntPoly<'a>(&'a [i128]);

impl fmt::Display for IntPoly<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        Poly::fmt_integer_terms(self.0, f)
    }
}

fn term_count(c: &[i128]) -> usize {
    c.iter().filter(|&&x| x != 0).count()
}

/// Canonical text: expanded integer polynomial in `k`, highest degree
/// first, optionally followed by `/` and the denominator.
impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (n, d) = self.integer_parts();
        if d.len() == 1 && d[0] == 1 {
            return write!(f, "{}", IntPoly(&n));
        }
        if term_count(&n) > 1 {
            write!(f, "({})", IntPoly(&n))?;
        } else {
            write!(f, "{}", IntPoly(&n))?;
        }
        if term_count(&d) > 1 || d.len() > 1 {
            write!(f, "/({})", IntPoly(&d))
        } else {
            write!(f, "/{}", IntPoly(&d))
        }
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

fn parse_poly(s: &str) -> Result<Poly, Error> {
    let bad = |m: &str| Error::Parse {
        pos: 0,
        msg: format!("invalid polynomial `{s}`: {m}"),
    };
    let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let s = s.trim_start_matches('(').trim_end_matches(')');
    if s.is_empty() {
        return Err(bad("empty"));
    }
    let mut coeffs: Vec<Q> = Vec::new();
    let bytes = s.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        let mut sign = 1i128;
        if bytes[i] == b'+' || bytes[i] == b'-' {
            if bytes[i] == b'-' {
                sign = -1;
            }
            i += 1;
        }
        let start = i;
        while i < bytes.len() && bytes[i].is_ascii_digit() {
            i += 1;
        }
        let c: i128 = if start == i {
            1
        } else {
            s[start..i].parse().map_err(|_| bad("coefficient"))?
        };
        let mut deg = 0usize;
        if i < bytes.len() && bytes[i] == b'k' {
            i += 1;
            deg = 1;
            if i < bytes.len() && bytes[i] == b'^' {
                i += 1;
                let st = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                deg = s[st..i].parse().map_err(|_| bad("exponent"))?;
            }
        } else if start == i {
            return Err(bad("dangling sign"));
        }
        if i < bytes.len() && bytes[i] != b'+' && bytes[i] != b'-' {
            return Err(bad("unexpected character"));
        }
        if coeffs.len() <= deg {
            coeffs.resize(deg + 1, Q::ZERO);
        }
        coeffs[deg] += Q::new(sign * c, 1);
    }
    Ok(Poly::from_coeffs(coeffs))
}

/// Parses the canonical text produced by `Display`.
impl FromStr for Scalar {
    type Err = Error;
    fn from_str(s: &str) -> Result<Scalar, Error> {
        let s = s.trim();
        // split on a top-level '/'
        let mut depth = 0;
        let mut split = None;
        for (i, c) in s.char_indices() {
            match c {
                '(' => depth += 1,
                ')' => depth -= 1,
                '/' if depth == 0 => split = Some(i),
                _ => {}
            }
        }
        match split {
            None => Ok(Scalar::from_poly(parse_poly(s)?)),
            Some(i) => {
                let d = parse_poly(&s[i + 1..])?;
                if d.is_zero() {
                    return Err(Error::Parse {
                        pos: i,
                        msg: "zero denominator".into(),
                    });
                }
                Ok(Scalar::from_parts(parse_poly(&s[..i])?, d))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(x: &str) -> Scalar {
        x.parse().unwrap()
    }

    #[test]
    fn canonical_strings() {
        let k = Scalar::k();
        let v = &(&k + &Scalar::int(2)) * &(&k * &Scalar::int(6));
        assert_eq!(v.to_string(), "6k^2+12k");
        assert_eq!((-v.clone()).to_string(), "-6k^2-12k");
        assert_eq!(Scalar::from_q(Q::new(1, 2)).to_string(), "1/2");
        assert_eq!(Scalar::zero().to_string(), "0");
        let t = Scalar::one() / (Scalar::k_plus(3) * Scalar::int(2));
        assert_eq!(t.to_string(), "1/(2k+6)");
        let u = Scalar::k_plus(1) / Scalar::int(2);
        assert_eq!(u.to_string(), "(k+1)/2");
    }

    #[test]
    fn reduction_and_equality() {
        let k = Scalar::k();
        let a = (&k * &k - Scalar::int(4)) / (k.clone() - Scalar::int(2));
        assert_eq!(a, Scalar::k_plus(2));
        assert!(a.is_polynomial());
        let z = &a - &Scalar::k_plus(2);
        assert!(z.is_zero());
    }

    #[test]
    fn parse_round_trip() {
        for t in [
            "6k^2+12k",
            "-k",
            "1/2",
            "(k+1)/2",
            "1/(2k+6)",
            "0",
            "-3k^3+k-7",
        ] {
            assert_eq!(s(t).to_string(), t);
        }
    }

    #[test]
    fn eval_at_pole() {
        let t = Scalar::one() / Scalar::k_plus(3);
        assert_eq!(t.eval(Q::int(-3)), None);
        assert_eq!(t.eval(Q::int(1)), Some(Q::new(1, 4)));
    }

    #[test]
    #[should_panic(expected = "overflow")]
    fn overflow_is_loud() {
        let big = Q::new(i128::MAX / 2, 1);
        let _ = big * Q::int(4);
    }
}
