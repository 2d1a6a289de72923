//! Exact scalars: arbitrary-precision rationals and the ring Q[pi^2].
//!
//! A [`PiScalar`] is a finite sum `sum_k r_k * pi^(2k)` with `r_k` rational.
//! pi^2 is treated as a formal transcendental, so two scalars are equal
//! exactly when their canonical term maps are equal.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Error;

pub type Rational = num_rational::BigRational;

pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn rat_int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Parses `p/q` or `p` (optional leading sign) into a reduced rational.
pub fn parse_rational(s: &str) -> Result<Rational, Error> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational: {s:?}"));
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let num: BigInt = num.parse().map_err(|_| bad())?;
    let den: BigInt = den.parse().map_err(|_| bad())?;
    if den.is_zero() {
        return Err(Error::Parse(format!("zero denominator in {s:?}")));
    }
    Ok(Rational::new(num, den))
}

/// An element of Q[pi^2], keyed by the exponent `k` of `pi^(2k)`.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct PiScalar {
    terms: BTreeMap<u32, Rational>,
}

impl PiScalar {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::from_rational(Rational::one())
    }

    pub fn from_rational(r: Rational) -> Self {
        Self::monomial(r, 0)
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_rational(rat_int(n))
    }

    /// `r * pi^(2k)`.
    pub fn monomial(r: Rational, k: u32) -> Self {
        let mut terms = BTreeMap::new();
        if !r.is_zero() {
            terms.insert(k, r);
        }
        Self { terms }
    }

    /// `pi^(2k)`.
    pub fn pi2_pow(k: u32) -> Self {
        Self::monomial(Rational::one(), k)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (u32, &Rational)> {
        self.terms.iter().map(|(&k, r)| (k, r))
    }

    pub fn coeff(&self, k: u32) -> Rational {
        self.terms.get(&k).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// The single `(k, r)` pair if the scalar is `r * pi^(2k)` with `r != 0`.
    pub fn single_term(&self) -> Option<(u32, &Rational)> {
        if self.terms.len() == 1 {
            self.terms.iter().next().map(|(&k, r)| (k, r))
        } else {
            None
        }
    }

    /// The rational value, when no pi appears.
    pub fn as_rational(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => self.terms.get(&0).cloned(),
            _ => None,
        }
    }

    pub fn scale(&self, r: &Rational) -> Self {
        if r.is_zero() {
            return Self::zero();
        }
        Self {
            terms: self.terms.iter().map(|(&k, c)| (k, c * r)).collect(),
        }
    }

    pub fn scale_int(&self, n: i64) -> Self {
        self.scale(&rat_int(n))
    }

    /// Multiplies by `pi^(2k)`.
    pub fn shift_pi2(&self, k: u32) -> Self {
        Self {
            terms: self
                .terms
                .iter()
                .map(|(&j, c)| (j + k, c.clone()))
                .collect(),
        }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Adds `a * b` into `self`.
    pub fn add_product(&mut self, a: &PiScalar, b: &PiScalar) {
        for (&i, x) in &a.terms {
            for (&j, y) in &b.terms {
                add_term(&mut self.terms, i + j, x * y);
            }
        }
    }

    pub fn add_scaled(&mut self, a: &PiScalar, r: &Rational) {
        if r.is_zero() {
            return;
        }
        for (&k, x) in &a.terms {
            add_term(&mut self.terms, k, x * r);
        }
    }

    /// Decimal rendering with `digits` places after the point, pi^2 substituted.
    ///
    /// The result is within one unit of the last printed digit. Exact zero
    /// renders as `"0"`.
    pub fn eval(&self, digits: usize) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let digits = digits.max(1);
        // Guard digits cover the magnitude of each term and the error growth
        // of pi^(2k) from a truncated pi.
        let mut guard: usize = 12;
        for (&k, r) in &self.terms {
            let mag = decimal_len(r.numer()) as isize - decimal_len(r.denom()) as isize + 1;
            let mag = mag.max(0) as usize + k as usize + decimal_len(&BigInt::from(2 * k + 1));
            guard = guard.max(12 + mag);
        }
        let prec = digits + guard;
        let scale = pow10(prec);
        let pi = pi_scaled(prec);
        let pi2 = (&pi * &pi) / &scale;

        // Sum of r_k * pi^(2k), scaled by 10^prec.
        let mut total = BigInt::zero();
        let mut power = scale.clone();
        let mut k_done = 0u32;
        for (&k, r) in &self.terms {
            while k_done < k {
                power = (&power * &pi2) / &scale;
                k_done += 1;
            }
            total += (r.numer() * &power).div_floor(r.denom());
        }
        let (neg, mag) = (total.sign() == Sign::Minus, total.abs());
        let unit = pow10(guard);
        let (q, rem) = mag.div_rem(&unit);
        let q = if &rem * 2 >= unit { q + 1u32 } else { q };
        let s = q.to_string();
        let s = if s.len() <= digits {
            format!("{}{}", "0".repeat(digits + 1 - s.len()), s)
        } else {
            s
        };
        let (int_part, frac) = s.split_at(s.len() - digits);
        let sign = if neg && !q.is_zero() { "-" } else { "" };
        format!("{sign}{int_part}.{frac}")
    }

    pub fn to_latex(&self) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (i, (&k, r)) in self.terms.iter().enumerate() {
            let neg = r.is_negative();
            if i > 0 {
                out.push_str(if neg { " - " } else { " + " });
            } else if neg {
                out.push('-');
            }
            let num = r.numer().abs();
            let den = r.denom();
            let pi = match k {
                0 => String::new(),
                k => format!("\\pi^{{{}}}", 2 * k),
            };
            let numer = match (num.is_one(), pi.is_empty()) {
                (true, false) => pi.clone(),
                (_, true) => num.to_string(),
                (false, false) => format!("{num} {pi}"),
            };
            if den.is_one() {
                out.push_str(&numer);
            } else {
                out.push_str(&format!("\\frac{{{numer}}}{{{den}}}"));
            }
        }
        out
    }
}

fn add_term(terms: &mut BTreeMap<u32, Rational>, k: u32, r: Rational) {
    if r.is_zero() {
        return;
    }
    match terms.get_mut(&k) {
        Some(c) => {
            *c += r;
            if c.is_zero() {
                terms.remove(&k);
            }
        }
        None => {
            terms.insert(k, r);
        }
    }
}

fn decimal_len(n: &BigInt) -> usize {
    ((n.bits() as f64) * std::f64::consts::LOG10_2).ceil() as usize + 1
}

fn pow10(e: usize) -> BigInt {
    num_traits::pow(BigInt::from(10u32), e)
}

/// `floor(pi * 10^prec)` up to a few units, via Machin's formula.
fn pi_scaled(prec: usize) -> BigInt {
    let extra = 10;
    let scale = pow10(prec + extra);
    let pi = arctan_inv(5, &scale) * 16 - arctan_inv(239, &scale) * 4;
    pi / pow10(extra)
}

/// `atan(1/x) * scale` by the alternating Taylor series.
fn arctan_inv(x: u32, scale: &BigInt) -> BigInt {
    let x = BigInt::from(x);
    let x2 = &x * &x;
    let mut term = scale / &x;
    let mut sum = term.clone();
    let mut n = 1u32;
    let mut sign = -1;
    while !term.is_zero() {
        term /= &x2;
        let t = &term / BigInt::from(2 * n + 1);
        if sign < 0 {
            sum -= t;
        } else {
            sum += t;
        }
        sign = -sign;
        n += 1;
    }
    sum
}

impl fmt::Display for PiScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        for (i, (&k, r)) in self.terms.iter().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            if k == 0 {
                write!(f, "{r}")?;
            } else {
                write!(f, "{r}*pi^{}", 2 * k)?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for PiScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PiScalar({self})")
    }
}

impl FromStr for PiScalar {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        let s = s.trim();
        if s.is_empty() {
            return Err(Error::Parse("empty scalar".into()));
        }
        let mut terms = BTreeMap::new();
        for part in s.split('+') {
            let part = part.trim();
            let (coeff, k) = match part.split_once("pi^") {
                None => (parse_rational(part)?, 0),
                Some((head, exp)) => {
                    let e: u32 = exp
                        .trim()
                        .parse()
                        .map_err(|_| Error::Parse(format!("bad pi exponent in {part:?}")))?;
                    if !e.is_multiple_of(2) {
                        return Err(Error::Parse(format!("odd power of pi in {part:?}")));
                    }
                    let head = head.trim();
                    let c = match head.strip_suffix('*') {
                        Some(c) => parse_rational(c)?,
                        None if head.is_empty() => Rational::one(),
                        None if head == "-" => -Rational::one(),
                        None => return Err(Error::Parse(format!("bad term {part:?}"))),
                    };
                    (c, e / 2)
                }
            };
            add_term(&mut terms, k, coeff);
        }
        Ok(Self { terms })
    }
}

impl Serialize for PiScalar {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for PiScalar {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

impl From<Rational> for PiScalar {
    fn from(r: Rational) -> Self {
        Self::from_rational(r)
    }
}

impl From<i64> for PiScalar {
    fn from(n: i64) -> Self {
        Self::from_int(n)
    }
}

impl AddAssign<&PiScalar> for PiScalar {
    fn add_assign(&mut self, rhs: &PiScalar) {
        for (&k, r) in &rhs.terms {
            add_term(&mut self.terms, k, r.clone());
        }
    }
}

impl Add<&PiScalar> for &PiScalar {
    type Output = PiScalar;
    fn add(self, rhs: &PiScalar) -> PiScalar {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Add for PiScalar {
    type Output = PiScalar;
    fn add(mut self, rhs: PiScalar) -> PiScalar {
        self += &rhs;
        self
    }
}

impl Neg for &PiScalar {
    type Output = PiScalar;
    fn neg(self) -> PiScalar {
        PiScalar {
            terms: self.terms.iter().map(|(&k, r)| (k, -r)).collect(),
        }
    }
}

impl Neg for PiScalar {
    type Output = PiScalar;
    fn neg(self) -> PiScalar {
        -&self
    }
}

impl Sub<&PiScalar> for &PiScalar {
    type Output = PiScalar;
    fn sub(self, rhs: &PiScalar) -> PiScalar {
        let mut out = self.clone();
        for (&k, r) in &rhs.terms {
            add_term(&mut out.terms, k, -r);
        }
        out
    }
}

impl Sub for PiScalar {
    type Output = PiScalar;
    fn sub(self, rhs: PiScalar) -> PiScalar {
        &self - &rhs
    }
}

impl Mul<&PiScalar> for &PiScalar {
    type Output = PiScalar;
    fn mul(self, rhs: &PiScalar) -> PiScalar {
        let mut out = PiScalar::zero();
        out.add_product(self, rhs);
        out
    }
}

impl Mul for PiScalar {
    type Output = PiScalar;
    fn mul(self, rhs: PiScalar) -> PiScalar {
        &self * &rhs
    }
}
