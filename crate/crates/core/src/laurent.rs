//! Sparse polynomials in `u` and `z`, with `z` allowed negative exponents.
//!
//! Terms are `c * u^i * z^m` with `i >= 0` and `m` any integer. The two
//! coordinate charts of the blown-up plane read the same expression two ways:
//! it is holomorphic on the first chart when every `m >= 0`, and holomorphic
//! on the second chart (coordinates `1/z` and `z*u`) when every `m <= i`.
//!
//! Zero coefficients are never stored, so `is_zero` is an emptiness check and
//! equality is structural.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::Zero;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Error;
use crate::scalar::{ratio_from_str, ratio_to_string, GaussianRational};

/// Exponent pair `u^u z^z`. Ordering is lexicographic in `(u, z)`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Monomial {
    pub u: i32,
    pub z: i32,
}

impl Monomial {
    pub fn new(u: i32, z: i32) -> Self {
        Self { u, z }
    }
}

/// A finite sum of terms `c * u^i * z^m`, `i >= 0`.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct BiLaurent {
    terms: BTreeMap<Monomial, GaussianRational>,
}

impl BiLaurent {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::term(0, 0, GaussianRational::one()).unwrap()
    }

    /// Single term `coef * u^u * z^z`. Fails when `u < 0`.
    pub fn term(u: i32, z: i32, coef: GaussianRational) -> Result<Self, Error> {
        if u < 0 {
            return Err(Error::NegativeUExponent { u, z });
        }
        let mut terms = BTreeMap::new();
        if !coef.is_zero() {
            terms.insert(Monomial::new(u, z), coef);
        }
        Ok(Self { terms })
    }

    /// Sums an arbitrary term list; duplicate monomials accumulate.
    pub fn from_terms<I>(iter: I) -> Result<Self, Error>
    where
        I: IntoIterator<Item = (i32, i32, GaussianRational)>,
    {
        let mut out = Self::zero();
        for (u, z, coef) in iter {
            if u < 0 {
                return Err(Error::NegativeUExponent { u, z });
            }
            out.accumulate(Monomial::new(u, z), coef);
        }
        Ok(out)
    }

    fn accumulate(&mut self, m: Monomial, coef: GaussianRational) {
        if coef.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(coef);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let sum = e.get() + &coef;
                if sum.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Coefficient of `u^u z^z`, zero when absent.
    pub fn coeff(&self, u: i32, z: i32) -> GaussianRational {
        self.terms
            .get(&Monomial::new(u, z))
            .cloned()
            .unwrap_or_else(GaussianRational::zero)
    }

    /// Terms in increasing `(u, z)` order.
    pub fn terms(&self) -> impl Iterator<Item = (Monomial, &GaussianRational)> {
        self.terms.iter().map(|(m, c)| (*m, c))
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in rhs.terms() {
            out.accumulate(m, c.clone());
        }
        out
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in rhs.terms() {
            out.accumulate(m, -c);
        }
        out
    }

    pub fn neg(&self) -> Self {
        let terms = self.terms.iter().map(|(m, c)| (*m, -c)).collect();
        Self { terms }
    }

    pub fn scale(&self, k: &GaussianRational) -> Self {
        if k.is_zero() {
            return Self::zero();
        }
        let terms = self.terms.iter().map(|(m, c)| (*m, c * k)).collect();
        Self { terms }
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        let mut out = Self::zero();
        for (ma, ca) in self.terms() {
            for (mb, cb) in rhs.terms() {
                out.accumulate(Monomial::new(ma.u + mb.u, ma.z + mb.z), ca * cb);
            }
        }
        out
    }

    /// Multiplies by `u^du z^dz`. Panics when `du` drives an exponent negative.
    pub fn mul_monomial(&self, du: i32, dz: i32) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|(m, c)| {
                assert!(m.u + du >= 0, "u exponent driven negative");
                (Monomial::new(m.u + du, m.z + dz), c.clone())
            })
            .collect();
        Self { terms }
    }

    /// Multiplies by `z^dz`.
    pub fn shift_z(&self, dz: i32) -> Self {
        self.mul_monomial(0, dz)
    }

    /// Divides by `u^k` when every term allows it.
    pub fn div_u_exact(&self, k: i32) -> Option<Self> {
        assert!(k >= 0);
        if self.terms.keys().any(|m| m.u < k) {
            return None;
        }
        Some(self.mul_monomial_unchecked(-k, 0))
    }

    fn mul_monomial_unchecked(&self, du: i32, dz: i32) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|(m, c)| (Monomial::new(m.u + du, m.z + dz), c.clone()))
            .collect();
        Self { terms }
    }

    /// Drops every term with `u` exponent above `k`.
    pub fn truncate_u(&self, k: i32) -> Self {
        let terms = self
            .terms
            .iter()
            .filter(|(m, _)| m.u <= k)
            .map(|(m, c)| (*m, c.clone()))
            .collect();
        Self { terms }
    }

    pub fn max_u(&self) -> Option<i32> {
        self.terms.keys().map(|m| m.u).max()
    }

    pub fn min_z(&self) -> Option<i32> {
        self.terms.keys().map(|m| m.z).min()
    }

    pub fn max_z(&self) -> Option<i32> {
        self.terms.keys().map(|m| m.z).max()
    }

    /// Least `u` exponent present; `None` for the zero polynomial, whose
    /// order is plus infinity.
    pub fn u_order(&self) -> Option<i32> {
        self.terms.keys().map(|m| m.u).min()
    }

    /// No negative powers of `z`: holomorphic on the `(z, u)` chart.
    pub fn is_z_holomorphic(&self) -> bool {
        self.terms.keys().all(|m| m.z >= 0)
    }

    /// Every term has `z` exponent at most its `u` exponent: substituting
    /// `z = 1/xi`, `u = xi*v` leaves no pole, so the expression is
    /// holomorphic on the second chart.
    pub fn is_v_holomorphic(&self) -> bool {
        self.terms.keys().all(|m| m.z <= m.u)
    }

    /// Terms violating the second-chart condition, i.e. with `z > u`.
    pub fn v_obstructions(&self) -> impl Iterator<Item = (Monomial, &GaussianRational)> {
        self.terms().filter(|(m, _)| m.z > m.u)
    }
}

fn write_exponent(f: &mut fmt::Formatter<'_>, var: char, e: i32) -> fmt::Result {
    match e {
        0 => Ok(()),
        1 => write!(f, "{var}"),
        _ => write!(f, "{var}^{e}"),
    }
}

impl fmt::Display for BiLaurent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (idx, (m, c)) in self.terms().enumerate() {
            if idx > 0 {
                write!(f, " + ")?;
            }
            let unit_coef = c == &GaussianRational::one();
            let constant_term = m.u == 0 && m.z == 0;
            if unit_coef && !constant_term {
                // bare monomial
            } else if c.im().is_zero() || c.re().is_zero() {
                write!(f, "{c}")?;
            } else {
                write!(f, "({c})")?;
            }
            write_exponent(f, 'z', m.z)?;
            write_exponent(f, 'u', m.u)?;
        }
        Ok(())
    }
}

impl fmt::Debug for BiLaurent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// On-disk form of one term: exponents plus `"num/den"` coefficient strings.
#[derive(Serialize, Deserialize)]
struct TermRecord {
    u: i32,
    z: i32,
    re: String,
    im: String,
}

impl Serialize for BiLaurent {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let records: Vec<TermRecord> = self
            .terms()
            .map(|(m, c)| TermRecord {
                u: m.u,
                z: m.z,
                re: ratio_to_string(c.re()),
                im: ratio_to_string(c.im()),
            })
            .collect();
        records.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for BiLaurent {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let records = Vec::<TermRecord>::deserialize(deserializer)?;
        let mut out = BiLaurent::zero();
        for r in records {
            if r.u < 0 {
                return Err(D::Error::custom(format!(
                    "term u^{} z^{} has negative u exponent",
                    r.u, r.z
                )));
            }
            let re = ratio_from_str(&r.re).map_err(D::Error::custom)?;
            let im = ratio_from_str(&r.im).map_err(D::Error::custom)?;
            out.accumulate(Monomial::new(r.u, r.z), GaussianRational::new(re, im));
        }
        Ok(out)
    }
}
