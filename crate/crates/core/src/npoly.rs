//! Polynomials in the level `k` and the rank `N`, used to state and certify
//! coefficients that depend polynomially on `N`.

use std::collections::BTreeMap;
use std::fmt;

use crate::scalar::{Poly, Scalar, Q};

/// `Σ c_{a,b} k^a N^b`.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct KnPoly(BTreeMap<(u32, u32), Q>);

impl KnPoly {
    pub fn zero() -> KnPoly {
        KnPoly::default()
    }

    pub fn constant(c: i64) -> KnPoly {
        KnPoly::term(Q::int(c), 0, 0)
    }

    pub fn k() -> KnPoly {
        KnPoly::term(Q::ONE, 1, 0)
    }

    pub fn n() -> KnPoly {
        KnPoly::term(Q::ONE, 0, 1)
    }

    pub fn term(c: Q, kdeg: u32, ndeg: u32) -> KnPoly {
        let mut p = KnPoly::zero();
        p.add_term(kdeg, ndeg, c);
        p
    }

    fn add_term(&mut self, a: u32, b: u32, c: Q) {
        let v = self.0.get(&(a, b)).copied().unwrap_or(Q::ZERO) + c;
        if v.is_zero() {
            self.0.remove(&(a, b));
        } else {
            self.0.insert((a, b), v);
        }
    }

    pub fn add(&self, o: &KnPoly) -> KnPoly {
        let mut out = self.clone();
        for (&(a, b), &c) in &o.0 {
            out.add_term(a, b, c);
        }
        out
    }

    pub fn sub(&self, o: &KnPoly) -> KnPoly {
        self.add(&o.scale(Q::int(-1)))
    }

    pub fn mul(&self, o: &KnPoly) -> KnPoly {
        let mut out = KnPoly::zero();
        for (&(a, b), &c) in &self.0 {
            for (&(x, y), &d) in &o.0 {
                out.add_term(a + x, b + y, c * d);
            }
        }
        out
    }

    pub fn scale(&self, c: Q) -> KnPoly {
        let mut out = KnPoly::zero();
        for (&(a, b), &v) in &self.0 {
            out.add_term(a, b, v * c);
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn n_degree(&self) -> u32 {
        self.0.keys().map(|&(_, b)| b).max().unwrap_or(0)
    }

    /// Specialize `N`, leaving a polynomial in `k`.
    pub fn at(&self, n: i64) -> Scalar {
        let mut c: Vec<Q> = Vec::new();
        for (&(a, b), &v) in &self.0 {
            let a = a as usize;
            if c.len() <= a {
                c.resize(a + 1, Q::ZERO);
            }
            c[a] += v * Q::int(n).pow(b);
        }
        Scalar::from_poly(Poly::from_coeffs(c))
    }

    /// Lagrange interpolation in `N` of polynomial-in-`k` samples.
    /// `None` if a sample is not a polynomial in `k`.
    pub fn interpolate(samples: &[(i64, Scalar)]) -> Option<KnPoly> {
        let mut out = KnPoly::zero();
        for (i, (xi, yi)) in samples.iter().enumerate() {
            if !yi.is_polynomial() {
                return None;
            }
            // basis polynomial ℓ_i(N) as coefficients in N
            let mut basis = vec![Q::ONE];
            let mut denom = Q::ONE;
            for (j, (xj, _)) in samples.iter().enumerate() {
                if i == j {
                    continue;
                }
                let mut next = vec![Q::ZERO; basis.len() + 1];
                for (d, &c) in basis.iter().enumerate() {
                    next[d + 1] += c;
                    next[d] -= c * Q::int(*xj);
                }
                basis = next;
                denom *= Q::int(xi - xj);
            }
            for (a, &ck) in yi.numer().coeffs().iter().enumerate() {
                for (b, &cn) in basis.iter().enumerate() {
                    out.add_term(a as u32, b as u32, ck * cn / denom);
                }
            }
        }
        Some(out)
    }
}

impl fmt::Display for KnPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("0");
        }
        for (n, (&(a, b), &c)) in self.0.iter().rev().enumerate() {
            let neg = c.is_negative();
            let mag = c.abs();
            if n > 0 {
                f.write_str(if neg { " - " } else { " + " })?;
            } else if neg {
                f.write_str("-")?;
            }
            let mut parts = Vec::new();
            if !mag.is_one() || (a == 0 && b == 0) {
                parts.push(if mag.is_integer() {
                    mag.to_string()
                } else {
                    format!("({mag})")
                });
            }
            for (sym, d) in [("k", a), ("N", b)] {
                match d {
                    0 => {}
                    1 => parts.push(sym.to_string()),
                    _ => parts.push(format!("{sym}^{d}")),
                }
            }
            f.write_str(&parts.join("*"))?;
        }
        Ok(())
    }
}

impl fmt::Debug for KnPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interpolation_recovers_cubic() {
        let n = KnPoly::n();
        let k = KnPoly::k();
        let c = |x| KnPoly::constant(x);
        let p = n
            .sub(&c(2))
            .mul(&n.sub(&c(3)))
            .mul(&n.sub(&c(4)))
            .mul(&k.add(&c(2)));
        let samples: Vec<_> = (6..=9).map(|x| (x, p.at(x))).collect();
        assert_eq!(KnPoly::interpolate(&samples).unwrap(), p);
        assert_eq!(
            p.at(5),
            Scalar::from_poly(Poly::from_coeffs(vec![Q::int(12), Q::int(6)]))
        );
    }

    #[test]
    fn display() {
        let p = KnPoly::k()
            .mul(&KnPoly::n())
            .scale(Q::int(-3))
            .add(&KnPoly::constant(2));
        assert_eq!(p.to_string(), "-3*k*N + 2");
    }
}
