//! Laplace dictionary between correlators and volumes, intersection
//! numbers, dilaton identities and closed-surface volumes.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::engine::Engine;
use crate::error::{Error, Result};
use crate::poly::{
    dim, is_stable, m_gn, Convention, CorrelatorPoly, ExponentKey, ShapedPoly, SymPoly, VolumePoly,
};
use crate::scalar::{PiScalar, Rational};

/// Multiplier on the residue side of the correlator-form dilaton identity.
/// With the residue integrand taken as `u cos(2 pi u) - sin(2 pi u)/(2 pi)`,
/// the identity holds for the computed correlators only with this sign.
pub const DILATON_W_SIGN: i64 = -1;

fn factorial(n: u32) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * k)
}

fn laplace_weight(key: &ExponentKey) -> BigInt {
    key.as_slice()
        .iter()
        .map(|&d| factorial(2 * d + 1))
        .product()
}

/// `v_d = w_d / prod (2 d_i + 1)!`, identity convention.
pub fn to_volume(w: &CorrelatorPoly) -> VolumePoly {
    let poly = w
        .poly
        .map_coeffs(|k, c| c.scale(&Rational::new(BigInt::one(), laplace_weight(k))));
    VolumePoly {
        g: w.g,
        convention: Convention::Identity,
        poly,
    }
}

/// Inverse of [`to_volume`].
pub fn to_correlator(v: &VolumePoly) -> Result<CorrelatorPoly> {
    if v.convention != Convention::Identity {
        return Err(Error::ShapeMismatch(
            "to_correlator expects an identity-convention volume".into(),
        ));
    }
    let poly = v
        .poly
        .map_coeffs(|k, c| c.scale(&Rational::from_integer(laplace_weight(k))));
    Ok(CorrelatorPoly { g: v.g, poly })
}

/// Re-expresses a volume in the requested convention.
pub fn with_convention(v: &VolumePoly, target: Convention) -> VolumePoly {
    if v.convention == target {
        return v.clone();
    }
    let m = m_gn(v.g, v.n());
    let factor = Rational::from_integer(BigInt::from(1u32 << m));
    let factor = match target {
        Convention::Intersection => factor,
        Convention::Identity => factor.recip(),
    };
    VolumePoly {
        g: v.g,
        convention: target,
        poly: v.poly.map_coeffs(|_, c| c.scale(&factor)),
    }
}

/// `V_{g,n}` in the identity convention.
pub fn volume(engine: &Engine, g: u32, n: usize) -> Result<VolumePoly> {
    Ok(to_volume(&*engine.correlator(g, n)?))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntersectionEntry {
    pub d0: u32,
    pub value: PiScalar,
}

/// `<kappa_1^d0 tau_d1 ... tau_dn>_g` read off the intersection-convention volume
/// as `d0! prod d_i! v_d`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntersectionTable {
    pub g: u32,
    pub n: usize,
    pub entries: BTreeMap<ExponentKey, IntersectionEntry>,
}

impl IntersectionTable {
    pub fn get(&self, d: &[u32]) -> Option<&IntersectionEntry> {
        self.entries.get(&ExponentKey::new(d.to_vec()))
    }
}

#[derive(Serialize, Deserialize)]
pub struct IntersectionJson {
    pub g: u32,
    pub n: usize,
    pub entries: Vec<IntersectionEntryJson>,
}

#[derive(Serialize, Deserialize)]
pub struct IntersectionEntryJson {
    pub d: Vec<u32>,
    pub d0: u32,
    pub value: PiScalar,
}

impl From<&IntersectionTable> for IntersectionJson {
    fn from(t: &IntersectionTable) -> Self {
        IntersectionJson {
            g: t.g,
            n: t.n,
            entries: t
                .entries
                .iter()
                .map(|(k, e)| IntersectionEntryJson {
                    d: k.as_slice().to_vec(),
                    d0: e.d0,
                    value: e.value.clone(),
                })
                .collect(),
        }
    }
}

pub fn intersection_table(v: &VolumePoly) -> IntersectionTable {
    let v = with_convention(v, Convention::Intersection);
    let top = dim(v.g, v.n());
    let mut entries = BTreeMap::new();
    for (key, c) in v.poly.iter() {
        let d0 = top - key.degree();
        let w: BigInt = key
            .as_slice()
            .iter()
            .map(|&d| factorial(d))
            .product::<BigInt>()
            * factorial(d0);
        entries.insert(
            key.clone(),
            IntersectionEntry {
                d0,
                value: c.scale(&Rational::from_integer(w)),
            },
        );
    }
    IntersectionTable {
        g: v.g,
        n: v.n(),
        entries,
    }
}

pub fn intersection_numbers(engine: &Engine, g: u32, n: usize) -> Result<IntersectionTable> {
    Ok(intersection_table(&volume(engine, g, n)?))
}

/// Taylor coefficients `c_k` of `u cos(2 pi u) - sin(2 pi u)/(2 pi)
/// = sum_k c_k u^(2k+1)`, `k = 0..=k_max`.
pub fn dilaton_series(k_max: usize) -> Vec<PiScalar> {
    (0..=k_max as u32)
        .map(|k| {
            let sign = if k % 2 == 0 { 1 } else { -1 };
            let four_k = BigInt::from(sign) * num_traits::pow(BigInt::from(4), k as usize);
            // (2 pi)^(2k) (-1)^k / (2k)!  and  (2 pi)^(2k) (-1)^k / (2k+1)!
            let cos_part = PiScalar::monomial(Rational::new(four_k.clone(), factorial(2 * k)), k);
            let sin_part = PiScalar::monomial(Rational::new(four_k, factorial(2 * k + 1)), k);
            &cos_part - &sin_part
        })
        .collect()
}

/// Divides by `pi^2`; `None` if a pure-rational term is present.
fn div_pi2(s: &PiScalar) -> Option<PiScalar> {
    let mut out = PiScalar::zero();
    for (k, r) in s.terms() {
        if k == 0 {
            return None;
        }
        out += &PiScalar::monomial(r.clone(), k - 1);
    }
    Some(out)
}

/// `(1/4 pi^2) Res_{u->0} (u cos 2 pi u - sin(2 pi u)/2 pi) F(u)` for
/// `F = sum_d q_d u^-(2d+2)`, given as the `partial_expand` of `F`.
fn residue_pairing(parts: &[(u32, SymPoly)], n: usize) -> Result<SymPoly> {
    let k_max = parts.iter().map(|(d, _)| *d as usize).max().unwrap_or(0);
    let series = dilaton_series(k_max);
    let quarter = Rational::new(BigInt::one(), BigInt::from(4));
    let mut out = SymPoly::zero(n);
    for (d, q) in parts {
        let c = &series[*d as usize];
        let scaled = div_pi2(c)
            .ok_or_else(|| Error::Internal("dilaton series has a pi^0 term".into()))?
            .scale(&quarter);
        out.add_scaled(q, &scaled)?;
    }
    Ok(out)
}

/// `V'(..., 2 i pi) / (2 i pi)` in the last variable, with `L^2 -> -4 pi^2`.
fn derivative_at_2ipi(parts: &[(u32, SymPoly)], n: usize) -> Result<SymPoly> {
    let minus_4pi2 = PiScalar::monomial(Rational::from_integer(BigInt::from(-4)), 1);
    let mut out = SymPoly::zero(n);
    for (d, q) in parts {
        if *d == 0 {
            continue;
        }
        let factor = minus_4pi2.pow(d - 1).scale_int(2 * *d as i64);
        out.add_scaled(q, &factor)?;
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DilatonReport {
    pub holds: bool,
    pub lhs: SymPoly,
    pub rhs: SymPoly,
    /// Sign applied to the residue side (always 1 for the length form).
    pub sign: i64,
}

fn check_dilaton_shape(g: u32, n: usize) -> Result<()> {
    if !is_stable(g, n) {
        return Err(Error::Unstable { g, n });
    }
    Ok(())
}

/// `(2g-2+n) W^g_n(K) = SIGN (1/4 pi^2) Res (u cos 2 pi u - sin(2 pi u)/2 pi) W^g_{n+1}(u,K)`.
///
/// For `n = 0` the left side uses the closed volume from the length form.
pub fn dilaton_check_w(engine: &Engine, g: u32, n: usize) -> Result<DilatonReport> {
    check_dilaton_shape(g, n)?;
    let chi = 2 * g as i64 - 2 + n as i64;
    let upper = engine.correlator(g, n + 1)?;
    let parts = upper.poly.partial_expand(u32::MAX);
    let rhs = residue_pairing(&parts, n)?.map_coeffs(|_, c| c.scale_int(DILATON_W_SIGN));
    let lhs = if n == 0 {
        let mut s = SymPoly::zero(0);
        s.insert(
            ExponentKey::empty(),
            closed_volume(engine, g)?.scale_int(chi),
        );
        s
    } else {
        engine
            .correlator(g, n)?
            .poly
            .map_coeffs(|_, c| c.scale_int(chi))
    };
    Ok(DilatonReport {
        holds: lhs == rhs,
        lhs,
        rhs,
        sign: DILATON_W_SIGN,
    })
}

/// `(2g-2+n) V_{g,n}(K) = V'_{g,n+1}(K, 2 i pi) / (2 i pi)`, identity convention.
///
/// For `n = 0` the left side uses the closed volume from the correlator form.
pub fn dilaton_check_v(engine: &Engine, g: u32, n: usize) -> Result<DilatonReport> {
    check_dilaton_shape(g, n)?;
    let chi = 2 * g as i64 - 2 + n as i64;
    let upper = volume(engine, g, n + 1)?;
    let parts = upper.poly.partial_expand(u32::MAX);
    let rhs = derivative_at_2ipi(&parts, n)?;
    let lhs = if n == 0 {
        let mut s = SymPoly::zero(0);
        s.insert(
            ExponentKey::empty(),
            closed_volume_from_correlator(engine, g)?.scale_int(chi),
        );
        s
    } else {
        volume(engine, g, n)?
            .poly
            .map_coeffs(|_, c| c.scale_int(chi))
    };
    Ok(DilatonReport {
        holds: lhs == rhs,
        lhs,
        rhs,
        sign: 1,
    })
}

/// `V_{g,0} = V'_{g,1}(2 i pi) / (2 i pi (2g-2))`.
pub fn closed_volume(engine: &Engine, g: u32) -> Result<PiScalar> {
    if g < 2 {
        return Err(Error::GenusTooSmall(g));
    }
    let v = volume(engine, g, 1)?;
    let parts = v.poly.partial_expand(u32::MAX);
    let total = derivative_at_2ipi(&parts, 0)?.get(&[]);
    Ok(total.scale(&Rational::new(BigInt::one(), BigInt::from(2 * g - 2))))
}

/// The same scalar from the residue form on `W^g_1`, with [`DILATON_W_SIGN`].
/// This is `W^g_0`, the genus-g term of `ln Z`.
pub fn closed_volume_from_correlator(engine: &Engine, g: u32) -> Result<PiScalar> {
    if g < 2 {
        return Err(Error::GenusTooSmall(g));
    }
    let w = engine.correlator(g, 1)?;
    let parts = w.poly.partial_expand(u32::MAX);
    let total = residue_pairing(&parts, 0)?.get(&[]);
    Ok(total.scale(&Rational::new(
        BigInt::from(DILATON_W_SIGN),
        BigInt::from(2 * g - 2),
    )))
}

/// Exact value at the given lengths, rendered with `digits` decimals.
pub fn evaluate_volume(v: &VolumePoly, lengths: &[Rational], digits: usize) -> Result<String> {
    Ok(volume_at(v, lengths)?.eval(digits))
}

/// Exact value of `V(L_1..L_n)` in `Q[pi^2]`.
pub fn volume_at(v: &VolumePoly, lengths: &[Rational]) -> Result<PiScalar> {
    if lengths.len() != v.n() {
        return Err(Error::LengthCount {
            expected: v.n(),
            got: lengths.len(),
        });
    }
    let squares: Vec<Rational> = lengths.iter().map(|l| l * l).collect();
    let mut total = PiScalar::zero();
    for (key, c) in v.poly.iter() {
        let mut sum = Rational::zero();
        for perm in key.permutations() {
            let mut prod = Rational::one();
            for (sq, &d) in squares.iter().zip(&perm) {
                prod *= num_traits::pow(sq.clone(), d as usize);
            }
            sum += prod;
        }
        total.add_scaled(c, &sum);
    }
    Ok(total)
}
