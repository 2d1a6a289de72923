//! Independent brute-force oracle: builds the recursion integrand as a full
//! ordered Laurent polynomial in (u, z, z_1..z_n), with the kernel expanded
//! from Bernoulli numbers and dE_u(z) from two geometric series, and reads
//! off the coefficient of u^-1. Shares nothing with the engine except the
//! scalar type.

#![allow(dead_code)]

use std::collections::HashMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use wpvol::{CorrelatorPoly, PiScalar, Rational, ShapedPoly};

pub type Mono = Vec<i32>;

#[derive(Clone, Debug, Default)]
pub struct Laurent {
    pub nv: usize,
    pub terms: HashMap<Mono, PiScalar>,
}

impl Laurent {
    pub fn zero(nv: usize) -> Self {
        Self {
            nv,
            terms: HashMap::new(),
        }
    }

    pub fn constant(nv: usize, c: PiScalar) -> Self {
        let mut l = Self::zero(nv);
        l.add(vec![0; nv], &c);
        l
    }

    pub fn add(&mut self, m: Mono, c: &PiScalar) {
        if c.is_zero() {
            return;
        }
        let e = self.terms.entry(m.clone()).or_default();
        *e += c;
        if e.is_zero() {
            self.terms.remove(&m);
        }
    }

    pub fn add_all(&mut self, other: &Laurent) {
        for (m, c) in &other.terms {
            self.add(m.clone(), c);
        }
    }

    /// Product, dropping u-exponents above `u_cap`.
    pub fn mul(&self, other: &Laurent, u_cap: i32) -> Laurent {
        let mut out = Laurent::zero(self.nv);
        for (a, x) in &self.terms {
            for (b, y) in &other.terms {
                if a[0] + b[0] > u_cap {
                    continue;
                }
                let m: Mono = a.iter().zip(b).map(|(p, q)| p + q).collect();
                out.add(m, &(x * y));
            }
        }
        out
    }

    /// Terms with u-exponent `e`, u removed (set to 0).
    pub fn u_coeff(&self, e: i32) -> Laurent {
        let mut out = Laurent::zero(self.nv);
        for (m, c) in &self.terms {
            if m[0] == e {
                let mut m = m.clone();
                m[0] = 0;
                out.add(m, c);
            }
        }
        out
    }

    pub fn has_odd_u(&self) -> bool {
        self.terms.keys().any(|m| m[0].rem_euclid(2) == 1)
    }
}

fn factorial(n: u32) -> BigInt {
    (1..=n).fold(BigInt::one(), |a, k| a * k)
}

fn binom(n: u32, k: u32) -> BigInt {
    factorial(n) / (factorial(k) * factorial(n - k))
}

/// B_0..B_m by the standard recurrence sum_{j<=k} C(k+1, j) B_j = 0.
pub fn bernoulli(m: u32) -> Vec<Rational> {
    let mut b: Vec<Rational> = vec![Rational::one()];
    for k in 1..=m {
        let mut s = Rational::zero();
        for j in 0..k {
            s += Rational::from_integer(binom(k + 1, j)) * &b[j as usize];
        }
        b.push(-s / Rational::from_integer(BigInt::from(k + 1)));
    }
    b
}

/// Coefficients of x / sin x = sum_k c_k x^(2k).
pub fn x_over_sin(k_max: u32) -> Vec<Rational> {
    let b = bernoulli(2 * k_max);
    (0..=k_max)
        .map(|k| {
            let sign = if k % 2 == 0 { -1 } else { 1 };
            let two = num_traits::pow(BigInt::from(2), 2 * k as usize) - BigInt::from(2);
            Rational::from_integer(BigInt::from(sign) * two) * &b[2 * k as usize]
                / Rational::from_integer(factorial(2 * k))
        })
        .collect()
}

/// 2 pi u / sin(2 pi u) coefficients (the WP kernel series s_k).
pub fn wp_kernel_oracle(k_max: u32) -> Vec<PiScalar> {
    x_over_sin(k_max)
        .into_iter()
        .enumerate()
        .map(|(k, c)| {
            let four_k = num_traits::pow(BigInt::from(4), k);
            PiScalar::monomial(c * Rational::from_integer(four_k), k as u32)
        })
        .collect()
}

/// pi dE_u(z) / (u sin 2 pi u), u-exponents up to `u_cap`.
fn kernel(nv: usize, u_cap: i32) -> Laurent {
    let k_max = (u_cap + 2).max(0) as u32 / 2 + 1;
    let s = wp_kernel_oracle(k_max);
    // pi/(u sin 2 pi u) = (1/2u^2) * sum s_k u^2k
    let mut front = Laurent::zero(nv);
    let half = Rational::new(BigInt::one(), BigInt::from(2));
    for (k, c) in s.iter().enumerate() {
        let mut m = vec![0; nv];
        m[0] = 2 * k as i32 - 2;
        front.add(m, &c.scale(&half));
    }
    // dE_u(z) = (1/2)(1/(z-u) - 1/(z+u)), expanded in u/z
    let mut de = Laurent::zero(nv);
    for k in 0..=(u_cap + 2) {
        let mut m = vec![0; nv];
        m[0] = k;
        m[1] = -k - 1;
        let minus = PiScalar::from_rational(half.clone());
        let plus_sign = if k % 2 == 0 { -1 } else { 1 };
        let plus = PiScalar::from_rational(half.clone() * Rational::from_integer(plus_sign.into()));
        de.add(m.clone(), &minus);
        de.add(m, &plus);
    }
    front.mul(&de, u_cap)
}

#[derive(Clone, Copy, Debug)]
pub enum Arg {
    /// `sign * u`
    U(i32),
    /// spectator variable index (0-based within K)
    Z(usize),
}

fn var_index(a: Arg) -> usize {
    match a {
        Arg::U(_) => 0,
        Arg::Z(i) => 2 + i,
    }
}

/// W^0_2(a, b) = 1/(a-b)^2 expanded in u.
fn w02(nv: usize, a: Arg, b: Arg, u_cap: i32) -> Laurent {
    let mut out = Laurent::zero(nv);
    match (a, b) {
        (Arg::U(s1), Arg::U(s2)) => {
            assert_ne!(s1, s2);
            let mut m = vec![0; nv];
            m[0] = -2;
            // 1/((s1 - s2) u)^2
            let d = (s1 - s2) as i64;
            out.add(
                m,
                &PiScalar::from_rational(Rational::new(1.into(), (d * d).into())),
            );
        }
        (Arg::U(s), Arg::Z(j)) | (Arg::Z(j), Arg::U(s)) => {
            // 1/(z - s u)^2 = sum (k+1) (s u)^k z^(-k-2)
            for k in 0..=u_cap.max(0) {
                let mut m = vec![0; nv];
                m[0] = k;
                m[2 + j] = -k - 2;
                let sign = if s < 0 && k % 2 == 1 { -1 } else { 1 };
                out.add(m, &PiScalar::from_int(sign * (k as i64 + 1)));
            }
        }
        _ => panic!("W^0_2 of two spectators does not occur"),
    }
    out
}

/// A stable correlator evaluated at the given arguments, as ordered monomials.
fn stable(nv: usize, w: &CorrelatorPoly, args: &[Arg]) -> Laurent {
    assert_eq!(w.n(), args.len());
    let mut out = Laurent::zero(nv);
    for (key, c) in w.sym().iter() {
        for perm in key.permutations() {
            let mut m = vec![0; nv];
            let mut sign = 1i64;
            for (&d, &a) in perm.iter().zip(args) {
                let e = -(2 * d as i32 + 2);
                m[var_index(a)] += e;
                if let Arg::U(s) = a {
                    if s < 0 && e % 2 != 0 {
                        sign = -sign;
                    }
                }
            }
            out.add(m, &c.scale_int(sign));
        }
    }
    out
}

fn factor(
    nv: usize,
    h: u32,
    args: &[Arg],
    lookup: &dyn Fn(u32, usize) -> CorrelatorPoly,
    u_cap: i32,
) -> Laurent {
    match (h, args.len()) {
        (0, 1) => Laurent::zero(nv),
        (0, 2) => w02(nv, args[0], args[1], u_cap),
        (h, n) => stable(nv, &lookup(h, n), args),
    }
}

/// The bracket B(u) for target W^g_{n+1}, every term multiplied out.
pub fn brute_bracket(
    g: u32,
    n: usize,
    lookup: &dyn Fn(u32, usize) -> CorrelatorPoly,
    u_cap: i32,
) -> Laurent {
    let nv = n + 2;
    let mut b = Laurent::zero(nv);
    if g >= 1 {
        let mut args = vec![Arg::U(1), Arg::U(-1)];
        args.extend((0..n).map(Arg::Z));
        b.add_all(&factor(nv, g - 1, &args, lookup, u_cap));
    }
    for h in 0..=g {
        for mask in 0u32..(1 << n) {
            let mut left = vec![Arg::U(1)];
            let mut right = vec![Arg::U(-1)];
            for i in 0..n {
                if mask & (1 << i) != 0 {
                    left.push(Arg::Z(i));
                } else {
                    right.push(Arg::Z(i));
                }
            }
            let l = factor(nv, h, &left, lookup, u_cap);
            let r = factor(nv, g - h, &right, lookup, u_cap);
            b.add_all(&l.mul(&r, u_cap));
        }
    }
    b
}

/// Res_{u->0} kernel * B(u), as ordered monomials in (z, z_1..z_n).
pub fn brute_correlator(
    g: u32,
    n: usize,
    lookup: &dyn Fn(u32, usize) -> CorrelatorPoly,
) -> Laurent {
    let u_cap = 2 * (3 * g as i32 + n as i32) + 6;
    let b = brute_bracket(g, n, lookup, u_cap);
    assert!(!b.has_odd_u(), "odd power of u survived in the bracket");
    let k = kernel(n + 2, u_cap);
    k.mul(&b, u_cap).u_coeff(-1)
}

/// Expands a correlator into ordered monomials over (u=0, z, z_1..).
pub fn ordered(w: &CorrelatorPoly) -> Laurent {
    let nv = w.n() + 1;
    let mut out = Laurent::zero(nv);
    for (key, c) in w.sym().iter() {
        for perm in key.permutations() {
            let mut m = vec![0];
            m.extend(perm.iter().map(|&d| -(2 * d as i32 + 2)));
            out.add(m, c);
        }
    }
    out
}

pub fn same(a: &Laurent, b: &Laurent) -> bool {
    a.terms.len() == b.terms.len() && a.terms.iter().all(|(m, c)| b.terms.get(m) == Some(c))
}
