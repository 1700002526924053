//! Laurent polynomials in one variable over the integers.
//!
//! The variable `v` tracks the Tate twist. Besides the ring structure we need
//! three substitutions:
//!
//! * [`LaurentPoly::bar`]: `v -> v^-1` (Verdier duality),
//! * [`LaurentPoly::sigma`]: `v -> -v^-1` (exchange of `<1>` and `{1}`),
//! * [`LaurentPoly::subst_neg_inv`]: `v -> -t^-1`, turning an Euler pairing
//!   into a graded dimension in `t`.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::de::{self, MapAccess, Visitor};
use serde::ser::{self, SerializeMap};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Integer Laurent polynomial. Zero coefficients are never stored.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct LaurentPoly {
    coeffs: BTreeMap<i64, BigInt>,
}

impl LaurentPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(1)
    }

    /// The variable `v`.
    pub fn v() -> Self {
        Self::monomial(1, 1)
    }

    pub fn constant(c: impl Into<BigInt>) -> Self {
        Self::monomial(c, 0)
    }

    /// `c * v^exp`.
    pub fn monomial(c: impl Into<BigInt>, exp: i64) -> Self {
        let mut p = Self::zero();
        p.add_term(exp, c.into());
        p
    }

    /// Builds a polynomial from `(exponent, coefficient)` pairs, summing repeats.
    pub fn from_terms<I, C>(terms: I) -> Self
    where
        I: IntoIterator<Item = (i64, C)>,
        C: Into<BigInt>,
    {
        let mut p = Self::zero();
        for (e, c) in terms {
            p.add_term(e, c.into());
        }
        p
    }

    pub fn add_term(&mut self, exp: i64, c: BigInt) {
        if c.is_zero() {
            return;
        }
        let slot = self.coeffs.entry(exp).or_insert_with(BigInt::zero);
        *slot += c;
        if slot.is_zero() {
            self.coeffs.remove(&exp);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs.get(&0).is_some_and(|c| c.is_one())
    }

    pub fn coeff(&self, exp: i64) -> BigInt {
        self.coeffs.get(&exp).cloned().unwrap_or_default()
    }

    /// Nonzero terms in ascending exponent order.
    pub fn terms(&self) -> impl Iterator<Item = (i64, &BigInt)> + '_ {
        self.coeffs.iter().map(|(&e, c)| (e, c))
    }

    pub fn min_degree(&self) -> Option<i64> {
        self.coeffs.keys().next().copied()
    }

    pub fn max_degree(&self) -> Option<i64> {
        self.coeffs.keys().next_back().copied()
    }

    pub fn has_nonnegative_coeffs(&self) -> bool {
        self.coeffs.values().all(|c| !c.is_negative())
    }

    /// Multiplies by `v^k`.
    pub fn shift(&self, k: i64) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|(&e, c)| (e + k, c.clone())).collect(),
        }
    }

    pub fn scale(&self, c: &BigInt) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Self {
            coeffs: self.coeffs.iter().map(|(&e, x)| (e, x * c)).collect(),
        }
    }

    /// `v -> v^-1`.
    pub fn bar(&self) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|(&e, c)| (-e, c.clone())).collect(),
        }
    }

    /// `v -> -v^-1`.
    pub fn sigma(&self) -> Self {
        Self {
            coeffs: self
                .coeffs
                .iter()
                .map(|(&e, c)| (-e, if e % 2 == 0 { c.clone() } else { -c }))
                .collect(),
        }
    }

    /// `v -> -v`.
    pub fn negate_variable(&self) -> Self {
        Self {
            coeffs: self
                .coeffs
                .iter()
                .map(|(&e, c)| (e, if e % 2 == 0 { c.clone() } else { -c }))
                .collect(),
        }
    }

    /// Substitutes `v -> -t^-1`; the result is a Laurent polynomial in `t`.
    pub fn subst_neg_inv(&self) -> Self {
        // Same exponent/sign pattern as sigma, read in the new variable.
        self.sigma()
    }

    /// Value at `v = 1`.
    pub fn eval_at_one(&self) -> BigInt {
        self.coeffs.values().sum()
    }

    /// Part with exponent `<= 0`.
    pub fn nonpositive_part(&self) -> Self {
        Self {
            coeffs: self.coeffs.range(..=0).map(|(&e, c)| (e, c.clone())).collect(),
        }
    }

    pub fn is_bar_invariant(&self) -> bool {
        *self == self.bar()
    }

    /// CSV cell rendering: `c*v^k` terms joined by `+`, exponents ascending.
    pub fn to_csv_cell(&self) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        self.coeffs
            .iter()
            .map(|(e, c)| format!("{c}*v^{e}"))
            .collect::<Vec<_>>()
            .join("+")
    }
}

impl fmt::Debug for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (i, (&e, c)) in self.coeffs.iter().enumerate() {
            let neg = c.is_negative();
            let abs = c.abs();
            if i == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            let unit = abs.is_one();
            match e {
                0 => write!(f, "{abs}")?,
                1 if unit => write!(f, "v")?,
                1 => write!(f, "{abs}v")?,
                _ if unit => write!(f, "v^{e}")?,
                _ => write!(f, "{abs}v^{e}")?,
            }
        }
        Ok(())
    }
}

impl From<i64> for LaurentPoly {
    fn from(c: i64) -> Self {
        Self::constant(c)
    }
}

impl From<BigInt> for LaurentPoly {
    fn from(c: BigInt) -> Self {
        Self::constant(c)
    }
}

impl AddAssign<&LaurentPoly> for LaurentPoly {
    fn add_assign(&mut self, rhs: &LaurentPoly) {
        for (&e, c) in &rhs.coeffs {
            self.add_term(e, c.clone());
        }
    }
}

impl SubAssign<&LaurentPoly> for LaurentPoly {
    fn sub_assign(&mut self, rhs: &LaurentPoly) {
        for (&e, c) in &rhs.coeffs {
            self.add_term(e, -c);
        }
    }
}

impl Add for &LaurentPoly {
    type Output = LaurentPoly;
    fn add(self, rhs: &LaurentPoly) -> LaurentPoly {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Sub for &LaurentPoly {
    type Output = LaurentPoly;
    fn sub(self, rhs: &LaurentPoly) -> LaurentPoly {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl Mul for &LaurentPoly {
    type Output = LaurentPoly;
    fn mul(self, rhs: &LaurentPoly) -> LaurentPoly {
        let mut out = LaurentPoly::zero();
        for (&a, x) in &self.coeffs {
            for (&b, y) in &rhs.coeffs {
                out.add_term(a + b, x * y);
            }
        }
        out
    }
}

impl Neg for &LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        LaurentPoly {
            coeffs: self.coeffs.iter().map(|(&e, c)| (e, -c)).collect(),
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for LaurentPoly {
            type Output = LaurentPoly;
            fn $m(self, rhs: LaurentPoly) -> LaurentPoly {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&LaurentPoly> for LaurentPoly {
            type Output = LaurentPoly;
            fn $m(self, rhs: &LaurentPoly) -> LaurentPoly {
                (&self).$m(rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        -&self
    }
}

impl Serialize for LaurentPoly {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(self.coeffs.len()))?;
        for (e, c) in &self.coeffs {
            let c = c
                .to_i64()
                .ok_or_else(|| ser::Error::custom(format!("coefficient {c} exceeds 64 bits")))?;
            map.serialize_entry(&e.to_string(), &c)?;
        }
        map.end()
    }
}

impl<'de> Deserialize<'de> for LaurentPoly {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct PolyVisitor;

        impl<'de> Visitor<'de> for PolyVisitor {
            type Value = LaurentPoly;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a map from string exponents to integer coefficients")
            }

            fn visit_map<M: MapAccess<'de>>(self, mut access: M) -> Result<LaurentPoly, M::Error> {
                let mut p = LaurentPoly::zero();
                while let Some((k, c)) = access.next_entry::<String, i64>()? {
                    let e: i64 = k
                        .trim()
                        .parse()
                        .map_err(|_| de::Error::custom(format!("bad exponent key {k:?}")))?;
                    p.add_term(e, BigInt::from(c));
                }
                Ok(p)
            }
        }

        deserializer.deserialize_map(PolyVisitor)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(terms: &[(i64, i64)]) -> LaurentPoly {
        LaurentPoly::from_terms(terms.iter().copied())
    }

    #[test]
    fn bar_examples() {
        assert_eq!(LaurentPoly::v().bar(), p(&[(-1, 1)]));
        assert_eq!(p(&[(0, 1), (2, 1)]).bar(), p(&[(0, 1), (-2, 1)]));
        assert_eq!(p(&[(-1, 1), (1, -1)]).bar(), p(&[(1, 1), (-1, -1)]));
    }

    #[test]
    fn sigma_examples() {
        assert_eq!(LaurentPoly::v().sigma(), p(&[(-1, -1)]));
        let fixed = p(&[(-1, 1), (1, -1)]);
        assert_eq!(fixed.sigma(), fixed);
        assert_eq!(p(&[(0, 1), (2, 1)]).sigma(), p(&[(0, 1), (-2, 1)]));
    }

    #[test]
    fn subst_neg_inv_examples() {
        assert_eq!(p(&[(0, 1), (-2, 1)]).subst_neg_inv(), p(&[(0, 1), (2, 1)]));
        assert_eq!(LaurentPoly::v().subst_neg_inv(), p(&[(-1, -1)]));
        assert!(LaurentPoly::zero().subst_neg_inv().is_zero());
    }

    #[test]
    fn cancellation_keeps_invariant() {
        let a = p(&[(1, 2), (3, -1)]);
        let b = p(&[(1, -2), (3, 1)]);
        let s = &a + &b;
        assert!(s.is_zero());
        assert_eq!(s.terms().count(), 0);
        assert!(p(&[(5, 0)]).is_zero());
    }

    #[test]
    fn display_and_csv() {
        let x = p(&[(-1, -1), (0, 1), (1, 2)]);
        assert_eq!(x.to_string(), "-v^-1 + 1 + 2v");
        assert_eq!(x.to_csv_cell(), "-1*v^-1+1*v^0+2*v^1");
        assert_eq!(LaurentPoly::zero().to_csv_cell(), "0");
    }

    #[test]
    fn json_roundtrip_and_bad_key() {
        let x = p(&[(-3, 4), (2, -7)]);
        let s = serde_json::to_string(&x).unwrap();
        assert_eq!(s, r#"{"-3":4,"2":-7}"#);
        let back: LaurentPoly = serde_json::from_str(&s).unwrap();
        assert_eq!(back, x);
        assert!(serde_json::from_str::<LaurentPoly>(r#"{"x":1}"#).is_err());
        let zeroed: LaurentPoly = serde_json::from_str(r#"{"0":0,"1":1}"#).unwrap();
        assert_eq!(zeroed, LaurentPoly::v());
    }

    fn arb_poly() -> impl Strategy<Value = LaurentPoly> {
        prop::collection::vec((-6i64..=6, -5i64..=5), 0..6).prop_map(LaurentPoly::from_terms)
    }

    proptest! {
        #[test]
        fn involutions(a in arb_poly()) {
            prop_assert_eq!(a.bar().bar(), a.clone());
            prop_assert_eq!(a.sigma().sigma(), a.clone());
            prop_assert!(a.terms().all(|(_, c)| !c.is_zero()));
        }

        #[test]
        fn substitutions_are_ring_homomorphisms(a in arb_poly(), b in arb_poly()) {
            let prod = &a * &b;
            let sum = &a + &b;
            prop_assert_eq!(prod.bar(), &a.bar() * &b.bar());
            prop_assert_eq!(sum.bar(), &a.bar() + &b.bar());
            prop_assert_eq!(prod.sigma(), &a.sigma() * &b.sigma());
            prop_assert_eq!(sum.sigma(), &a.sigma() + &b.sigma());
        }

        #[test]
        fn sigma_is_bar_after_negation(a in arb_poly()) {
            prop_assert_eq!(a.sigma(), a.bar().negate_variable());
            prop_assert_eq!(a.sigma(), a.negate_variable().bar());
        }

        #[test]
        fn ring_axioms(a in arb_poly(), b in arb_poly(), c in arb_poly()) {
            prop_assert_eq!(&a * &b, &b * &a);
            prop_assert_eq!(&a + &b, &b + &a);
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
            prop_assert_eq!(&a * &LaurentPoly::one(), a.clone());
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        }
    }
}
