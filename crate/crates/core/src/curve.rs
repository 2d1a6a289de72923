//! Spectral curves `x = z^2`, `y` odd, and the recursion kernel series.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::scalar::{PiScalar, Rational};

/// `y(z) = sum_k y_{2k+1} z^(2k+1)` with `x(z) = z^2`.
///
/// `order = Some(t)` means only `y_1 .. y_{2t-1}` are known (a truncated
/// series); `None` means `y` is exactly the polynomial given.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpectralCurve {
    y: BTreeMap<u32, PiScalar>,
    order: Option<usize>,
}

fn factorial(n: u32) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * k)
}

impl SpectralCurve {
    /// Builds a curve from odd coefficients of `y`.
    pub fn from_y(y: BTreeMap<u32, PiScalar>, order: Option<usize>) -> Result<Self> {
        let mut clean = BTreeMap::new();
        for (e, c) in y {
            if e % 2 == 0 {
                return Err(Error::CurveNotOdd(e));
            }
            if !c.is_zero() {
                clean.insert(e, c);
            }
        }
        let curve = Self { y: clean, order };
        curve.branch_inverse()?;
        Ok(curve)
    }

    /// The Weil-Petersson curve `-2y = sin(2 pi z) / (2 pi)` with `order` odd
    /// coefficients materialized.
    pub fn weil_petersson(order: usize) -> Self {
        let mut y = BTreeMap::new();
        for k in 0..order as u32 {
            // y_{2k+1} = -(1/2) (-1)^k (2 pi)^(2k) / (2k+1)!
            let sign = if k % 2 == 0 { -1 } else { 1 };
            let num = BigInt::from(sign) * num_traits::pow(BigInt::from(4), k as usize);
            let den = BigInt::from(2) * factorial(2 * k + 1);
            y.insert(2 * k + 1, PiScalar::monomial(Rational::new(num, den), k));
        }
        Self {
            y,
            order: Some(order),
        }
    }

    /// `y(z) = z - (1/2) sum_j t_{j+2} z^j` for odd times; missing times are 0.
    pub fn from_times(times: &BTreeMap<u32, PiScalar>) -> Result<Self> {
        let mut y = BTreeMap::new();
        y.insert(1, PiScalar::one());
        let half = Rational::new(BigInt::from(-1), BigInt::from(2));
        for (&k, t) in times {
            if k < 3 || k % 2 == 0 {
                return Err(Error::CurveNotOdd(k));
            }
            let e = k - 2;
            let entry = y.entry(e).or_insert_with(PiScalar::zero);
            entry.add_scaled(t, &half);
        }
        Self::from_y(y, None)
    }

    /// Same coefficients, declared known only through `z^(2 order - 1)`.
    pub fn truncated(&self, order: usize) -> Self {
        let y = self
            .y
            .iter()
            .filter(|(&e, _)| (e as usize) < 2 * order)
            .map(|(&e, c)| (e, c.clone()))
            .collect();
        let order = Some(self.order.map_or(order, |o| o.min(order)));
        Self { y, order }
    }

    pub fn order(&self) -> Option<usize> {
        self.order
    }

    /// Coefficient of `z^e` in `y`.
    pub fn y_coeff(&self, e: u32) -> PiScalar {
        self.y.get(&e).cloned().unwrap_or_default()
    }

    pub fn y_coeffs(&self) -> &BTreeMap<u32, PiScalar> {
        &self.y
    }

    /// Highest kernel index `s_k` this curve determines, if bounded.
    pub fn max_kernel_index(&self) -> Option<usize> {
        self.order.map(|t| t.saturating_sub(1))
    }

    /// True when `y_{2k+1}` is a rational multiple of `pi^(2k)` for every k,
    /// which makes every correlator pi-homogeneous.
    pub fn is_graded(&self) -> bool {
        self.y.iter().all(|(&e, c)| match c.single_term() {
            Some((k, _)) => k == (e - 1) / 2,
            None => c.is_zero(),
        })
    }

    /// `1 / y_1`; the branch point must be simple with a rational coefficient.
    fn branch_inverse(&self) -> Result<Rational> {
        let y1 = self.y_coeff(1);
        match y1.as_rational() {
            Some(r) if r.is_zero() => Err(Error::DegenerateBranchPoint),
            Some(r) => Ok(r.recip()),
            None => Err(Error::Parse(format!(
                "y_1 = {y1} must be a nonzero rational"
            ))),
        }
    }

    /// Content hash of the coefficients that determine `s_0 .. s_k`.
    pub fn prefix_id(&self, k: usize) -> String {
        let mut h = Sha256::new();
        h.update(format!("x=z^2;k={k};"));
        for (e, c) in self.y.range(..=(2 * k as u32 + 1)) {
            h.update(format!("y{e}={c};"));
        }
        hex::encode(&h.finalize()[..12])
    }
}

/// `t_{2k+3} = (2 pi)^(2k) (-1)^k / (2k+1)! + 2 delta_{k,0}` for `0 <= k <= kmax`.
pub fn kontsevich_wp_times(kmax: usize) -> BTreeMap<u32, PiScalar> {
    let mut t = BTreeMap::new();
    for k in 0..=kmax as u32 {
        let sign = if k % 2 == 0 { 1 } else { -1 };
        let num = BigInt::from(sign) * num_traits::pow(BigInt::from(4), k as usize);
        let mut v = PiScalar::monomial(Rational::new(num, factorial(2 * k + 1)), k);
        if k == 0 {
            v += &PiScalar::from_int(2);
        }
        t.insert(2 * k + 3, v);
    }
    t
}

/// Coefficients of the even series `u / D(u) = sum_k s_k u^(2k)`,
/// `D(u) = y(-u) - y(u) = -2 y(u)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KernelSeries {
    pub s: Vec<PiScalar>,
}

impl KernelSeries {
    pub fn len(&self) -> usize {
        self.s.len()
    }

    pub fn is_empty(&self) -> bool {
        self.s.is_empty()
    }

    pub fn get(&self, k: usize) -> Option<&PiScalar> {
        self.s.get(k)
    }

    /// Coefficients of `(sum s_k u^2k) * D(u)/u` through `u^(2K)`.
    pub fn back_multiply(&self, curve: &SpectralCurve) -> Vec<PiScalar> {
        let d = d_over_u(curve, self.s.len());
        (0..self.s.len())
            .map(|k| {
                let mut acc = PiScalar::zero();
                for j in 0..=k {
                    acc.add_product(&self.s[j], &d[k - j]);
                }
                acc
            })
            .collect()
    }
}

/// `D(u)/u = -2 sum_k y_{2k+1} u^(2k)`, first `len` coefficients.
fn d_over_u(curve: &SpectralCurve, len: usize) -> Vec<PiScalar> {
    (0..len as u32)
        .map(|k| curve.y_coeff(2 * k + 1).scale_int(-2))
        .collect()
}

/// `s_0 .. s_k_max` by power-series reciprocal of `D(u)/u`.
pub fn kernel_series(curve: &SpectralCurve, k_max: usize) -> Result<KernelSeries> {
    if let Some(avail) = curve.max_kernel_index() {
        if k_max > avail {
            return Err(Error::KernelTooShort {
                needed: k_max,
                available: avail,
            });
        }
    }
    let inv_y1 = curve.branch_inverse()?;
    // 1 / (-2 y_1)
    let inv_lead = inv_y1 * Rational::new(BigInt::from(-1), BigInt::from(2));
    let d = d_over_u(curve, k_max + 1);
    let mut s: Vec<PiScalar> = Vec::with_capacity(k_max + 1);
    s.push(PiScalar::from_rational(inv_lead.clone()));
    for k in 1..=k_max {
        let mut acc = PiScalar::zero();
        for j in 1..=k {
            acc.add_product(&d[j], &s[k - j]);
        }
        s.push(acc.scale(&-inv_lead.clone()));
    }
    Ok(KernelSeries { s })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(x: &str) -> PiScalar {
        x.parse().unwrap()
    }

    #[test]
    fn wp_sine_expansion() {
        let c = SpectralCurve::weil_petersson(5);
        let m2y = |e| c.y_coeff(e).scale_int(-2);
        assert_eq!(m2y(1), p("1"));
        assert_eq!(m2y(3), p("-2/3*pi^2"));
        assert_eq!(m2y(5), p("2/15*pi^4"));
        assert_eq!(m2y(7), p("-4/315*pi^6"));
        assert_eq!(m2y(9), p("2/2835*pi^8"));
        assert!(c.is_graded());
    }

    #[test]
    fn times_values() {
        let t = kontsevich_wp_times(2);
        assert_eq!(t[&3], p("3"));
        assert_eq!(t[&5], p("-2/3*pi^2"));
        assert_eq!(t[&7], p("2/15*pi^4"));
        assert_eq!(t.len(), 3);
    }

    #[test]
    fn times_curve() {
        let airy = SpectralCurve::from_times(&BTreeMap::new()).unwrap();
        assert_eq!(airy.y_coeffs().len(), 1);
        assert_eq!(airy.y_coeff(1), p("1"));
        assert_eq!(airy.order(), None);

        let mut bad = BTreeMap::new();
        bad.insert(3, p("2"));
        assert!(matches!(
            SpectralCurve::from_times(&bad),
            Err(Error::DegenerateBranchPoint)
        ));
        let mut even = BTreeMap::new();
        even.insert(4, p("1"));
        assert!(matches!(
            SpectralCurve::from_times(&even),
            Err(Error::CurveNotOdd(4))
        ));
        let mut low = BTreeMap::new();
        low.insert(1, p("1"));
        assert!(matches!(
            SpectralCurve::from_times(&low),
            Err(Error::CurveNotOdd(1))
        ));
    }

    #[test]
    fn kernel_wp() {
        let c = SpectralCurve::weil_petersson(6);
        let ks = kernel_series(&c, 5).unwrap();
        assert_eq!(ks.s[0], p("1"));
        assert_eq!(ks.s[1], p("2/3*pi^2"));
        let back = ks.back_multiply(&c);
        assert_eq!(back[0], PiScalar::one());
        assert!(back[1..].iter().all(PiScalar::is_zero));
        for (k, s) in ks.s.iter().enumerate() {
            assert_eq!(s.single_term().unwrap().0, k as u32);
        }
        assert!(matches!(
            kernel_series(&c, 6),
            Err(Error::KernelTooShort {
                needed: 6,
                available: 5
            })
        ));
    }

    #[test]
    fn kernel_airy() {
        // y = z: D(u)/u = -2
        let airy = SpectralCurve::from_times(&BTreeMap::new()).unwrap();
        let ks = kernel_series(&airy, 4).unwrap();
        assert_eq!(ks.s[0], p("-1/2"));
        assert!(ks.s[1..].iter().all(PiScalar::is_zero));
        // -2y = z: the normalization with s_0 = 1
        let mut t = BTreeMap::new();
        t.insert(3, p("3"));
        let norm = SpectralCurve::from_times(&t).unwrap();
        let ks = kernel_series(&norm, 4).unwrap();
        assert_eq!(ks.s[0], PiScalar::one());
        assert!(ks.s[1..].iter().all(PiScalar::is_zero));
    }

    #[test]
    fn prefix_id_tracks_used_order() {
        let a = SpectralCurve::weil_petersson(4);
        let b = SpectralCurve::weil_petersson(9);
        assert_eq!(a.prefix_id(3), b.prefix_id(3));
        assert_ne!(a.prefix_id(3), a.prefix_id(2));
        let c = SpectralCurve::from_times(&kontsevich_wp_times(3)).unwrap();
        assert_eq!(c.prefix_id(3), a.prefix_id(3));
    }
}
