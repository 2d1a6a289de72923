//! Symmetric polynomial containers keyed by exponent multisets.
//!
//! A key `(d_1, ..., d_n)` is stored sorted non-increasing; the coefficient
//! is that of one ordered monomial, and the polynomial is the sum over the
//! distinct permutations of each key. For correlators the monomial is
//! `prod z_i^-(2 d_i + 2)`, for volumes `prod L_i^(2 d_i)`.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::PiScalar;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ExponentKey(Vec<u32>);

impl ExponentKey {
    pub fn new(mut d: Vec<u32>) -> Self {
        d.sort_unstable_by(|a, b| b.cmp(a));
        Self(d)
    }

    pub fn empty() -> Self {
        Self(Vec::new())
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    /// Adds one exponent, keeping the order.
    pub fn with(&self, v: u32) -> Self {
        let mut d = Vec::with_capacity(self.0.len() + 1);
        let pos = self.0.iter().position(|&x| x < v).unwrap_or(self.0.len());
        d.extend_from_slice(&self.0[..pos]);
        d.push(v);
        d.extend_from_slice(&self.0[pos..]);
        Self(d)
    }

    /// Removes the entry at `idx`.
    pub fn without_index(&self, idx: usize) -> Self {
        let mut d = self.0.clone();
        d.remove(idx);
        Self(d)
    }

    /// Distinct values with multiplicities, in key order.
    pub fn runs(&self) -> Vec<(u32, usize)> {
        let mut out: Vec<(u32, usize)> = Vec::new();
        for &v in &self.0 {
            match out.last_mut() {
                Some((w, c)) if *w == v => *c += 1,
                _ => out.push((v, 1)),
            }
        }
        out
    }

    /// Distinct orderings of the key, lexicographically descending.
    pub fn permutations(&self) -> Vec<Vec<u32>> {
        let mut out = Vec::new();
        let mut cur = self.0.clone();
        loop {
            out.push(cur.clone());
            // previous permutation in lex order
            let n = cur.len();
            if n < 2 {
                break;
            }
            let mut i = n - 1;
            while i > 0 && cur[i - 1] <= cur[i] {
                i -= 1;
            }
            if i == 0 {
                break;
            }
            let mut j = n - 1;
            while cur[j] >= cur[i - 1] {
                j -= 1;
            }
            cur.swap(i - 1, j);
            cur[i..].reverse();
        }
        out
    }
}

impl fmt::Debug for ExponentKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

/// All keys of length `n` with total degree at most `max_degree`.
pub fn keys_up_to(n: usize, max_degree: u32) -> Vec<ExponentKey> {
    fn rec(n: usize, left: u32, cap: u32, cur: &mut Vec<u32>, out: &mut Vec<ExponentKey>) {
        if cur.len() == n {
            out.push(ExponentKey(cur.clone()));
            return;
        }
        for v in (0..=cap.min(left)).rev() {
            cur.push(v);
            rec(n, left - v, v, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(
        n,
        max_degree,
        max_degree,
        &mut Vec::with_capacity(n),
        &mut out,
    );
    out
}

/// The multiset coefficient map shared by correlators and volumes.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct SymPoly {
    n: usize,
    coeffs: BTreeMap<ExponentKey, PiScalar>,
}

impl SymPoly {
    pub fn zero(n: usize) -> Self {
        Self {
            n,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn nvars(&self) -> usize {
        self.n
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&ExponentKey, &PiScalar)> {
        self.coeffs.iter()
    }

    /// Ordered-monomial coefficient; `d` need not be sorted.
    pub fn get(&self, d: &[u32]) -> PiScalar {
        if d.len() != self.n {
            return PiScalar::zero();
        }
        self.get_key(&ExponentKey::new(d.to_vec()))
    }

    pub fn get_key(&self, key: &ExponentKey) -> PiScalar {
        self.coeffs.get(key).cloned().unwrap_or_default()
    }

    pub fn get_ref(&self, key: &ExponentKey) -> Option<&PiScalar> {
        self.coeffs.get(key)
    }

    pub fn add_at(&mut self, key: ExponentKey, c: &PiScalar) {
        assert_eq!(key.len(), self.n, "key length does not match polynomial");
        if c.is_zero() {
            return;
        }
        match self.coeffs.get_mut(&key) {
            Some(e) => {
                *e += c;
                if e.is_zero() {
                    self.coeffs.remove(&key);
                }
            }
            None => {
                self.coeffs.insert(key, c.clone());
            }
        }
    }

    pub fn insert(&mut self, key: ExponentKey, c: PiScalar) {
        assert_eq!(key.len(), self.n, "key length does not match polynomial");
        if c.is_zero() {
            self.coeffs.remove(&key);
        } else {
            self.coeffs.insert(key, c);
        }
    }

    pub fn add_scaled(&mut self, p: &SymPoly, s: &PiScalar) -> Result<()> {
        if p.n != self.n {
            return Err(Error::ShapeMismatch(format!(
                "{} variables vs {}",
                self.n, p.n
            )));
        }
        if s.is_zero() {
            return Ok(());
        }
        for (k, c) in &p.coeffs {
            let e = self.coeffs.entry(k.clone()).or_default();
            e.add_product(c, s);
        }
        self.coeffs.retain(|_, v| !v.is_zero());
        Ok(())
    }

    pub fn map_coeffs(&self, mut f: impl FnMut(&ExponentKey, &PiScalar) -> PiScalar) -> Self {
        let mut out = Self::zero(self.n);
        for (k, c) in &self.coeffs {
            out.insert(k.clone(), f(k, c));
        }
        out
    }

    pub fn max_degree(&self) -> Option<u32> {
        self.coeffs.keys().map(ExponentKey::degree).max()
    }

    /// Splits off one variable: entry `(d, q)` means `q` multiplies the
    /// `d`-th power slot of the removed variable (`u^-(2d+2)` for
    /// correlators). Sorted by `d`; only `d <= max_power`.
    pub fn partial_expand(&self, max_power: u32) -> Vec<(u32, SymPoly)> {
        let mut parts: BTreeMap<u32, SymPoly> = BTreeMap::new();
        if self.n == 0 {
            return Vec::new();
        }
        for (key, c) in &self.coeffs {
            let d = key.as_slice();
            for (i, &v) in d.iter().enumerate() {
                if i > 0 && d[i - 1] == v || v > max_power {
                    continue;
                }
                parts
                    .entry(v)
                    .or_insert_with(|| SymPoly::zero(self.n - 1))
                    .insert(key.without_index(i), c.clone());
            }
        }
        parts.into_iter().collect()
    }
}

/// Volume normalization.
///
/// `Identity` is the normalization in which the dilaton identity in length
/// form holds verbatim; `Intersection` multiplies the (1,1) volume by 2 so that the
/// kappa/tau expansion reads off intersection numbers directly.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Convention {
    Identity,
    Intersection,
}

/// `m_{g,n}`: 1 for (g,n) = (1,1), else 0.
pub fn m_gn(g: u32, n: usize) -> u32 {
    u32::from(g == 1 && n == 1)
}

pub fn is_stable(g: u32, n: usize) -> bool {
    2 * g as i64 - 2 + n as i64 > 0
}

/// `3g - 3 + n`, the complex dimension of the moduli space.
pub fn dim(g: u32, n: usize) -> u32 {
    (3 * g as i64 - 3 + n as i64).max(0) as u32
}

/// `W^g_n`: symmetric polynomial in `1/z_i^2`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CorrelatorPoly {
    pub g: u32,
    pub poly: SymPoly,
}

/// `V_{g,n}`: symmetric even polynomial in the boundary lengths.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VolumePoly {
    pub g: u32,
    pub convention: Convention,
    pub poly: SymPoly,
}

pub trait ShapedPoly {
    fn genus(&self) -> u32;
    fn sym(&self) -> &SymPoly;
    fn sym_mut(&mut self) -> &mut SymPoly;

    fn n(&self) -> usize {
        self.sym().nvars()
    }

    fn get(&self, d: &[u32]) -> PiScalar {
        self.sym().get(d)
    }

    fn same_shape(&self, other: &Self) -> bool;

    /// `self += s * p`.
    fn add_scaled(&mut self, p: &Self, s: &PiScalar) -> Result<()> {
        if !self.same_shape(p) {
            return Err(Error::ShapeMismatch(format!(
                "(g={}, n={}) vs (g={}, n={})",
                self.genus(),
                self.n(),
                p.genus(),
                p.n()
            )));
        }
        self.sym_mut().add_scaled(p.sym(), s)
    }

    /// Degree bound and, when `graded`, pi-homogeneity: a coefficient at
    /// total degree `D` must be a single rational times `pi^(2(dim - D))`.
    fn check_invariants(&self, graded: bool) -> Result<()> {
        let (g, n) = (self.genus(), self.n());
        let top = dim(g, n);
        for (key, c) in self.sym().iter() {
            if key.degree() > top {
                return Err(Error::Internal(format!(
                    "(g={g}, n={n}) key {key:?} exceeds degree bound {top}"
                )));
            }
            if graded {
                let want = top - key.degree();
                match c.single_term() {
                    Some((k, _)) if k == want => {}
                    _ => {
                        return Err(Error::Internal(format!(
                        "(g={g}, n={n}) key {key:?}: coefficient {c} is not a multiple of pi^{}",
                        2 * want
                    )))
                    }
                }
            }
        }
        Ok(())
    }
}

impl ShapedPoly for CorrelatorPoly {
    fn genus(&self) -> u32 {
        self.g
    }
    fn sym(&self) -> &SymPoly {
        &self.poly
    }
    fn sym_mut(&mut self) -> &mut SymPoly {
        &mut self.poly
    }
    fn same_shape(&self, other: &Self) -> bool {
        self.g == other.g && self.poly.nvars() == other.poly.nvars()
    }
}

impl ShapedPoly for VolumePoly {
    fn genus(&self) -> u32 {
        self.g
    }
    fn sym(&self) -> &SymPoly {
        &self.poly
    }
    fn sym_mut(&mut self) -> &mut SymPoly {
        &mut self.poly
    }
    fn same_shape(&self, other: &Self) -> bool {
        self.g == other.g
            && self.poly.nvars() == other.poly.nvars()
            && self.convention == other.convention
    }
}

impl CorrelatorPoly {
    pub fn zero(g: u32, n: usize) -> Self {
        Self {
            g,
            poly: SymPoly::zero(n),
        }
    }

    /// Builds from `(key, coefficient)` pairs; keys are sorted on the way in.
    pub fn from_terms<I>(g: u32, n: usize, terms: I) -> Self
    where
        I: IntoIterator<Item = (Vec<u32>, PiScalar)>,
    {
        let mut poly = SymPoly::zero(n);
        for (d, c) in terms {
            poly.add_at(ExponentKey::new(d), &c);
        }
        Self { g, poly }
    }

    pub fn partial_expand(&self, slot: usize, max_power: u32) -> Result<Vec<(u32, SymPoly)>> {
        if slot == 0 || slot > self.n() {
            return Err(Error::ShapeMismatch(format!(
                "slot {slot} out of range 1..={}",
                self.n()
            )));
        }
        Ok(self.poly.partial_expand(max_power))
    }
}

impl VolumePoly {
    pub fn zero(g: u32, n: usize, convention: Convention) -> Self {
        Self {
            g,
            convention,
            poly: SymPoly::zero(n),
        }
    }

    pub fn is_positive(&self) -> bool {
        self.poly
            .iter()
            .all(|(_, c)| c.terms().all(|(_, r)| num_traits::Signed::is_positive(r)))
    }
}

/// JSON wire form shared by correlators and volumes.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolyJson {
    pub g: u32,
    pub n: usize,
    pub kind: PolyKind,
    pub convention: Option<Convention>,
    pub terms: Vec<TermJson>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PolyKind {
    Correlator,
    Volume,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermJson {
    pub d: Vec<u32>,
    pub coeff: PiScalar,
}

fn terms_json(p: &SymPoly) -> Vec<TermJson> {
    p.iter()
        .map(|(k, c)| TermJson {
            d: k.as_slice().to_vec(),
            coeff: c.clone(),
        })
        .collect()
}

fn terms_from_json(n: usize, terms: &[TermJson]) -> Result<SymPoly> {
    let mut poly = SymPoly::zero(n);
    for t in terms {
        if t.d.len() != n {
            return Err(Error::Parse(format!(
                "term {:?} has {} exponents, expected {n}",
                t.d,
                t.d.len()
            )));
        }
        poly.add_at(ExponentKey::new(t.d.clone()), &t.coeff);
    }
    Ok(poly)
}

impl From<&CorrelatorPoly> for PolyJson {
    fn from(w: &CorrelatorPoly) -> Self {
        PolyJson {
            g: w.g,
            n: w.n(),
            kind: PolyKind::Correlator,
            convention: None,
            terms: terms_json(&w.poly),
        }
    }
}

impl From<&VolumePoly> for PolyJson {
    fn from(v: &VolumePoly) -> Self {
        PolyJson {
            g: v.g,
            n: v.n(),
            kind: PolyKind::Volume,
            convention: Some(v.convention),
            terms: terms_json(&v.poly),
        }
    }
}

impl TryFrom<&PolyJson> for CorrelatorPoly {
    type Error = Error;
    fn try_from(j: &PolyJson) -> Result<Self> {
        if j.kind != PolyKind::Correlator {
            return Err(Error::Parse("expected kind \"correlator\"".into()));
        }
        Ok(CorrelatorPoly {
            g: j.g,
            poly: terms_from_json(j.n, &j.terms)?,
        })
    }
}

impl TryFrom<&PolyJson> for VolumePoly {
    type Error = Error;
    fn try_from(j: &PolyJson) -> Result<Self> {
        if j.kind != PolyKind::Volume {
            return Err(Error::Parse("expected kind \"volume\"".into()));
        }
        Ok(VolumePoly {
            g: j.g,
            convention: j.convention.unwrap_or(Convention::Identity),
            poly: terms_from_json(j.n, &j.terms)?,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;
    use proptest::prelude::*;

    fn s(x: &str) -> PiScalar {
        x.parse().unwrap()
    }

    fn w03() -> CorrelatorPoly {
        CorrelatorPoly::from_terms(0, 3, [(vec![0, 0, 0], s("1"))])
    }

    fn w11() -> CorrelatorPoly {
        CorrelatorPoly::from_terms(1, 1, [(vec![1], s("1/8")), (vec![0], s("1/12*pi^2"))])
    }

    fn w04() -> CorrelatorPoly {
        CorrelatorPoly::from_terms(
            0,
            4,
            [(vec![0, 0, 0, 0], s("2*pi^2")), (vec![1, 0, 0, 0], s("3"))],
        )
    }

    #[test]
    fn get_sorts_and_bounds() {
        assert_eq!(w03().get(&[0, 0, 0]), s("1"));
        assert_eq!(w11().get(&[1]), s("1/8"));
        assert_eq!(w04().get(&[0, 0, 1, 0]), s("3"));
        assert!(w04().get(&[5, 0, 0, 0]).is_zero());
        assert!(w04().get(&[0, 0]).is_zero());
    }

    #[test]
    fn add_scaled_cases() {
        let mut p = w04();
        p.add_scaled(&w04(), &PiScalar::zero()).unwrap();
        assert_eq!(p, w04());
        p.add_scaled(&w04(), &s("-1")).unwrap();
        assert!(p.poly.is_zero());
        let mut q = w03();
        q.add_scaled(&w03(), &PiScalar::one()).unwrap();
        assert_eq!(q.get(&[0, 0, 0]), s("2"));
        assert!(matches!(
            q.add_scaled(&w04(), &PiScalar::one()),
            Err(Error::ShapeMismatch(_))
        ));
    }

    #[test]
    fn partial_expand_examples() {
        let e = w11().partial_expand(1, 10).unwrap();
        assert_eq!(e.len(), 2);
        assert_eq!(e[0].0, 0);
        assert_eq!(e[0].1.get(&[]), s("1/12*pi^2"));
        assert_eq!(e[1].0, 1);
        assert_eq!(e[1].1.get(&[]), s("1/8"));

        let e = w03().partial_expand(1, 10).unwrap();
        assert_eq!(e.len(), 1);
        assert_eq!(e[0].0, 0);
        assert_eq!(e[0].1.get(&[0, 0]), s("1"));

        assert!(CorrelatorPoly::zero(0, 3)
            .partial_expand(1, 5)
            .unwrap()
            .is_empty());
        assert!(w03().partial_expand(4, 5).is_err());

        // max_power cut
        let e = w11().partial_expand(1, 0).unwrap();
        assert_eq!(e.len(), 1);
    }

    #[test]
    fn partial_expand_w04() {
        let e = w04().partial_expand(2, 10).unwrap();
        // u^-2: 2pi^2 + 3(sum 1/z^2) over 3 vars; u^-4: 3
        assert_eq!(e[0].1.get(&[0, 0, 0]), s("2*pi^2"));
        assert_eq!(e[0].1.get(&[1, 0, 0]), s("3"));
        assert_eq!(e[1].1.get(&[0, 0, 0]), s("3"));
        assert_eq!(e[1].1.len(), 1);
    }

    #[test]
    fn keys_enumeration() {
        assert_eq!(keys_up_to(0, 3), vec![ExponentKey::empty()]);
        assert_eq!(keys_up_to(1, 3).len(), 4);
        // partitions of 0..=4 into at most 2 parts: 1+1+2+2+3
        assert_eq!(keys_up_to(2, 4).len(), 9);
    }

    #[test]
    fn permutations_distinct() {
        let k = ExponentKey::new(vec![0, 1, 0]);
        assert_eq!(
            k.permutations(),
            vec![vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]]
        );
        assert_eq!(ExponentKey::new(vec![2, 2]).permutations().len(), 1);
        assert_eq!(ExponentKey::new(vec![3, 1, 2]).permutations().len(), 6);
    }

    #[test]
    fn invariants() {
        assert!(w04().check_invariants(true).is_ok());
        let bad = CorrelatorPoly::from_terms(0, 3, [(vec![1, 0, 0], s("1"))]);
        assert!(bad.check_invariants(false).is_err());
        let mixed = CorrelatorPoly::from_terms(1, 1, [(vec![0], s("1 + 1*pi^2"))]);
        assert!(mixed.check_invariants(false).is_ok());
        assert!(mixed.check_invariants(true).is_err());
    }

    #[test]
    fn json_shape() {
        let j = serde_json::to_string(&PolyJson::from(&w03())).unwrap();
        assert_eq!(
            j,
            r#"{"g":0,"n":3,"kind":"correlator","convention":null,"terms":[{"d":[0,0,0],"coeff":"1"}]}"#
        );
        let back: PolyJson = serde_json::from_str(&j).unwrap();
        assert_eq!(CorrelatorPoly::try_from(&back).unwrap(), w03());
        let v = VolumePoly {
            g: 1,
            convention: Convention::Identity,
            poly: w11().poly,
        };
        let j = serde_json::to_string(&PolyJson::from(&v)).unwrap();
        assert!(j.contains(r#""kind":"volume","convention":"identity""#));
    }

    proptest! {
        #[test]
        fn get_after_add_scaled(
            a in prop::collection::vec((0u32..3, 0u32..3, -5i64..5), 0..6),
            b in prop::collection::vec((0u32..3, 0u32..3, -5i64..5), 0..6),
            sn in -4i64..4, probe0 in 0u32..3, probe1 in 0u32..3,
        ) {
            let mk = |ts: &[(u32, u32, i64)]| CorrelatorPoly::from_terms(
                1, 2, ts.iter().map(|&(x, y, c)| (vec![x, y], PiScalar::from_int(c))));
            let (pa, pb) = (mk(&a), mk(&b));
            let sc = PiScalar::monomial(rat(sn, 3), 1);
            let mut acc = pa.clone();
            acc.add_scaled(&pb, &sc).unwrap();
            let d = [probe0, probe1];
            prop_assert_eq!(acc.get(&d), &pa.get(&d) + &(&pb.get(&d) * &sc));
        }
    }
}
