//! Residue recursion for the correlators `W^g_n`.
//!
//! For a target `W^g_{n+1}(z, K)`, `K = (z_1..z_n)`:
//!
//! ```text
//! W^g_{n+1}(z,K) = Res_{u->0} dE_u(z) / (2u D(u)) * B(u)
//! B(u) = W^{g-1}_{n+2}(u,-u,K) + sum_{h,J} W^h(u,J) W^{g-h}(-u,K\J)
//! ```
//!
//! with `dE_u(z) = sum_m u^(2m+1) / z^(2m+2)` and `u/D(u) = sum_k s_k u^(2k)`.
//! Pairing the kernel against `B(u) = sum_j beta_j u^(2j)` leaves
//! `W = 1/2 sum_m z^-(2m+2) sum_k s_k beta_{-(k+m)}`.

use std::collections::{BTreeMap, HashMap};
use std::path::PathBuf;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::One;
use rayon::prelude::*;

use crate::curve::{kernel_series, KernelSeries, SpectralCurve};
use crate::error::{Error, Result};
use crate::memo::{MemoKey, MemoTable};
use crate::poly::{dim, is_stable, keys_up_to, CorrelatorPoly, ExponentKey, ShapedPoly, SymPoly};
use crate::scalar::{rat, PiScalar, Rational};

/// Lower correlators, keyed by `(g, n)`.
pub type Deps = HashMap<(u32, usize), Arc<CorrelatorPoly>>;

/// `beta_j` (coefficient of `u^(2j)` in `B(u)`, `j <= 0`) as symmetric
/// polynomials in the `n` spectator variables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BracketExpansion {
    pub n: usize,
    pub beta: BTreeMap<i32, SymPoly>,
}

impl BracketExpansion {
    pub fn get(&self, j: i32) -> Option<&SymPoly> {
        self.beta.get(&j)
    }

    /// Largest `p` with `beta_{-p} != 0`.
    pub fn max_pole(&self) -> Option<usize> {
        self.beta
            .iter()
            .filter(|(_, b)| !b.is_zero())
            .map(|(&j, _)| (-j) as usize)
            .max()
    }
}

/// `W^g_{n+1}` with the recursion variable kept apart: entry `(m, e)` is the
/// coefficient of `z^-(2m+2) prod z_i^-(2 e_i + 2)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SplitCorrelator {
    pub g: u32,
    pub n: usize,
    pub coeffs: BTreeMap<(u32, ExponentKey), PiScalar>,
}

impl SplitCorrelator {
    /// Stores, for each full key, the coefficient obtained when the sorted
    /// key's entry at `slot` plays the role of the recursion variable.
    pub fn to_correlator(&self, slot: usize) -> CorrelatorPoly {
        let total = self.n + 1;
        let slot = slot.min(total - 1);
        let mut poly = SymPoly::zero(total);
        for (m, e) in self.coeffs.keys() {
            let full = e.with(*m);
            let picked = (full.as_slice()[slot], full.without_index(slot));
            if let Some(c) = self.coeffs.get(&picked) {
                poly.insert(full, c.clone());
            }
        }
        CorrelatorPoly { g: self.g, poly }
    }

    /// Every choice of recursion variable gives the same coefficient.
    pub fn check_symmetric(&self) -> Result<()> {
        for ((m, e), c) in &self.coeffs {
            let full = e.with(*m);
            let d = full.as_slice();
            for i in 0..d.len() {
                if i > 0 && d[i] == d[i - 1] {
                    continue;
                }
                let other = self
                    .coeffs
                    .get(&(d[i], full.without_index(i)))
                    .cloned()
                    .unwrap_or_default();
                if &other != c {
                    return Err(Error::Internal(format!(
                        "W^{}_{} not symmetric at {:?}: {} vs {}",
                        self.g,
                        self.n + 1,
                        d,
                        c,
                        other
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Stable `(g, n)` shapes that `W^g_{n+1}`'s bracket reads from.
pub fn dependencies(g: u32, n: usize) -> Vec<(u32, usize)> {
    let mut out = Vec::new();
    let mut push = |gg: u32, nn: usize| {
        if is_stable(gg, nn) && !out.contains(&(gg, nn)) {
            out.push((gg, nn));
        }
    };
    if g >= 1 {
        push(g - 1, n + 2);
    }
    for h in 0..=g {
        for j in 0..=n {
            if is_stable(h, 1 + j) && is_stable(g - h, 1 + n - j) {
                push(h, 1 + j);
                push(g - h, 1 + n - j);
            }
        }
    }
    if n >= 1 {
        push(g, n);
    }
    out.sort();
    out
}

fn binomial(n: usize, k: usize) -> i64 {
    let mut r: i64 = 1;
    for i in 0..k {
        r = r * (n - i) as i64 / (i + 1) as i64;
    }
    r
}

/// Sub-multisets `J` of `e` as `(J, e\J, number of index subsets giving J)`.
fn split_multiset(e: &ExponentKey) -> Vec<(ExponentKey, ExponentKey, i64)> {
    let runs = e.runs();
    let mut out = Vec::new();
    let mut choice = vec![0usize; runs.len()];
    loop {
        let mut j = Vec::new();
        let mut rest = Vec::new();
        let mut w = 1i64;
        for (&(v, c), &k) in runs.iter().zip(&choice) {
            j.extend(std::iter::repeat_n(v, k));
            rest.extend(std::iter::repeat_n(v, c - k));
            w *= binomial(c, k);
        }
        out.push((ExponentKey::new(j), ExponentKey::new(rest), w));
        let mut i = 0;
        loop {
            if i == runs.len() {
                return out;
            }
            if choice[i] < runs[i].1 {
                choice[i] += 1;
                break;
            }
            choice[i] = 0;
            i += 1;
        }
    }
}

fn lookup(deps: &Deps, g: u32, n: usize) -> Result<&CorrelatorPoly> {
    deps.get(&(g, n))
        .map(|p| p.as_ref())
        .ok_or_else(|| Error::Internal(format!("missing sub-correlator W^{g}_{n}")))
}

/// `beta_{-p}(e)` for one spectator key `e`, all `0 <= p <= p_max`.
fn bracket_column(
    g: u32,
    n: usize,
    e: &ExponentKey,
    p_max: u32,
    deps: &Deps,
) -> Result<Vec<PiScalar>> {
    let mut col = vec![PiScalar::zero(); p_max as usize + 1];

    // W^{g-1}_{n+2}(u, -u, K)
    if g >= 1 {
        if is_stable(g - 1, n + 2) {
            let w = lookup(deps, g - 1, n + 2)?;
            for p in 2..=p_max {
                let acc = &mut col[p as usize];
                for a in 0..=(p - 2) {
                    let key = e.with(a).with(p - 2 - a);
                    if let Some(c) = w.poly.get_ref(&key) {
                        *acc += c;
                    }
                }
            }
        } else if n == 0 && p_max >= 1 {
            // W^0_2(u, -u) = 1/(4u^2)
            col[1] += &PiScalar::from_rational(rat(1, 4));
        }
    }

    // stable x stable products over (h, J)
    let splits = split_multiset(e);
    for h in 0..=g {
        for (j, rest, mult) in &splits {
            if !(is_stable(h, 1 + j.len()) && is_stable(g - h, 1 + rest.len())) {
                continue;
            }
            let left = lookup(deps, h, 1 + j.len())?;
            let right = lookup(deps, g - h, 1 + rest.len())?;
            let mult = PiScalar::from_int(*mult);
            for p in 2..=p_max {
                let mut acc = PiScalar::zero();
                for a in 0..=(p - 2) {
                    let (Some(x), Some(y)) = (
                        left.poly.get_ref(&j.with(a)),
                        right.poly.get_ref(&rest.with(p - 2 - a)),
                    ) else {
                        continue;
                    };
                    acc.add_product(x, y);
                }
                col[p as usize].add_product(&acc, &mult);
            }
        }
    }

    // W^0_2(u, z_i) W^g_n(-u, K\z_i) + mirror:
    // W^g_n(u, K\z_i) * 2 sum_k (2k+1) u^(2k) / z_i^(2k+2)
    if n >= 1 && is_stable(g, n) {
        let w = lookup(deps, g, n)?;
        let d = e.as_slice();
        for (i, &v) in d.iter().enumerate() {
            if i > 0 && d[i - 1] == v {
                continue;
            }
            let mult = d.iter().filter(|&&x| x == v).count() as i64;
            let weight = PiScalar::from_int(2 * (2 * v as i64 + 1) * mult);
            let rest = e.without_index(i);
            for p in 0..=p_max {
                if p + v == 0 {
                    continue;
                }
                if let Some(c) = w.poly.get_ref(&rest.with(p + v - 1)) {
                    col[p as usize].add_product(c, &weight);
                }
            }
        }
    } else if g == 0 && n == 2 && e.degree() == 0 {
        // W^0_2(u,z_1) W^0_2(-u,z_2) + (z_1 <-> z_2) at u^0
        col[0] += &PiScalar::from_int(2);
    }
    Ok(col)
}

/// Assembles `B(u)` for the target `W^g_{n+1}`.
pub fn bracket_assemble(
    g: u32,
    n: usize,
    deps: &Deps,
    pool: Option<&rayon::ThreadPool>,
) -> Result<BracketExpansion> {
    if !is_stable(g, n + 1) {
        return Err(Error::Unstable { g, n: n + 1 });
    }
    let top = dim(g, n + 1);
    let keys = keys_up_to(n, top);
    let work = |e: &ExponentKey| bracket_column(g, n, e, top - e.degree(), deps);
    let cols: Vec<Result<Vec<PiScalar>>> = match pool {
        Some(pool) => pool.install(|| keys.par_iter().map(work).collect()),
        None => keys.iter().map(work).collect(),
    };
    let mut beta: BTreeMap<i32, SymPoly> = BTreeMap::new();
    for (e, col) in keys.into_iter().zip(cols) {
        for (p, c) in col?.into_iter().enumerate() {
            if !c.is_zero() {
                beta.entry(-(p as i32))
                    .or_insert_with(|| SymPoly::zero(n))
                    .insert(e.clone(), c);
            }
        }
    }
    Ok(BracketExpansion { n, beta })
}

/// Pairs the kernel with the bracket and reads off `u^-1`.
pub fn residue_extract(g: u32, ks: &KernelSeries, b: &BracketExpansion) -> Result<SplitCorrelator> {
    if let Some(p) = b.max_pole() {
        if ks.len() <= p {
            return Err(Error::KernelTooShort {
                needed: p,
                available: ks.len().saturating_sub(1),
            });
        }
    }
    let half = Rational::new(BigInt::one(), BigInt::from(2));
    let mut coeffs: BTreeMap<(u32, ExponentKey), PiScalar> = BTreeMap::new();
    for (&j, poly) in &b.beta {
        let p = (-j) as usize;
        for (e, beta) in poly.iter() {
            for m in 0..=p {
                let s = &ks.s[p - m];
                if s.is_zero() {
                    continue;
                }
                let mut term = PiScalar::zero();
                term.add_product(s, beta);
                coeffs
                    .entry((m as u32, e.clone()))
                    .or_default()
                    .add_scaled(&term, &half);
            }
        }
    }
    coeffs.retain(|_, c| !c.is_zero());
    Ok(SplitCorrelator { g, n: b.n, coeffs })
}

#[derive(Clone, Debug)]
pub struct EngineConfig {
    /// Worker threads for bracket assembly; 1 runs everything inline.
    pub threads: usize,
    pub cache_dir: Option<PathBuf>,
    /// Which entry of a sorted key acts as the recursion variable.
    pub slot: usize,
}

impl Default for EngineConfig {
    fn default() -> Self {
        Self {
            threads: 1,
            cache_dir: None,
            slot: 0,
        }
    }
}

pub struct Engine {
    curve: SpectralCurve,
    memo: MemoTable,
    pool: Option<rayon::ThreadPool>,
    slot: usize,
    graded: bool,
}

impl Engine {
    pub fn new(curve: SpectralCurve, config: EngineConfig) -> Result<Self> {
        let memo = match &config.cache_dir {
            Some(dir) => MemoTable::with_dir(dir)?,
            None => MemoTable::in_memory(),
        };
        let pool = if config.threads > 1 {
            Some(
                rayon::ThreadPoolBuilder::new()
                    .num_threads(config.threads)
                    .build()
                    .map_err(|e| Error::Internal(e.to_string()))?,
            )
        } else {
            None
        };
        let graded = curve.is_graded();
        Ok(Self {
            curve,
            memo,
            pool,
            slot: config.slot,
            graded,
        })
    }

    /// Weil-Petersson curve carrying enough coefficients for `dim <= max_dim`.
    pub fn weil_petersson(max_dim: usize) -> Self {
        Self::new(
            SpectralCurve::weil_petersson(max_dim + 1),
            EngineConfig::default(),
        )
        .expect("in-memory engine")
    }

    pub fn curve(&self) -> &SpectralCurve {
        &self.curve
    }

    pub fn memo(&self) -> &MemoTable {
        &self.memo
    }

    pub fn kernel(&self, k_max: usize) -> Result<KernelSeries> {
        kernel_series(&self.curve, k_max)
    }

    fn check_shape(&self, g: u32, n: usize) -> Result<()> {
        if !is_stable(g, n) {
            return Err(Error::Unstable { g, n });
        }
        if n == 0 {
            return Err(Error::ShapeMismatch(format!(
                "W^{g}_0 has no variables; use the closed volume instead"
            )));
        }
        let need = dim(g, n) as usize;
        if let Some(avail) = self.curve.max_kernel_index() {
            if need > avail {
                return Err(Error::KernelTooShort {
                    needed: need,
                    available: avail,
                });
            }
        }
        Ok(())
    }

    fn deps_for(&self, g: u32, n_spect: usize) -> Result<Deps> {
        let mut deps = Deps::new();
        for (gg, nn) in dependencies(g, n_spect) {
            deps.insert((gg, nn), self.correlator(gg, nn)?);
        }
        Ok(deps)
    }

    /// `B(u)` for the target `W^g_n` (so `n - 1` spectators).
    pub fn bracket(&self, g: u32, n: usize) -> Result<BracketExpansion> {
        self.check_shape(g, n)?;
        let deps = self.deps_for(g, n - 1)?;
        bracket_assemble(g, n - 1, &deps, self.pool.as_ref())
    }

    /// `W^g_n` with the recursion variable kept apart.
    pub fn split_correlator(&self, g: u32, n: usize) -> Result<SplitCorrelator> {
        let b = self.bracket(g, n)?;
        let ks = self.kernel(dim(g, n) as usize)?;
        let split = residue_extract(g, &ks, &b)?;
        debug_assert!(b.beta.values().all(|p| p.nvars() == n - 1));
        Ok(split)
    }

    /// `W^g_n` using `slot` as the recursion variable, bypassing the memo.
    pub fn correlator_via_slot(&self, g: u32, n: usize, slot: usize) -> Result<CorrelatorPoly> {
        let w = self.split_correlator(g, n)?.to_correlator(slot);
        w.check_invariants(self.graded)?;
        Ok(w)
    }

    /// Memoized `W^g_n`.
    pub fn correlator(&self, g: u32, n: usize) -> Result<Arc<CorrelatorPoly>> {
        self.check_shape(g, n)?;
        let truncation = dim(g, n) as usize;
        let key = MemoKey {
            curve_id: self.curve.prefix_id(truncation),
            g,
            n,
        };
        if let Some(w) = self.memo.get(&key, truncation) {
            return Ok(w);
        }
        let w = self.correlator_via_slot(g, n, self.slot)?;
        self.memo.insert(key, truncation, w)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(x: &str) -> PiScalar {
        x.parse().unwrap()
    }

    #[test]
    fn dependency_sets() {
        assert!(dependencies(0, 2).is_empty());
        assert!(dependencies(1, 0).is_empty());
        assert_eq!(dependencies(1, 1), vec![(0, 3), (1, 1)]);
        assert_eq!(dependencies(2, 0), vec![(1, 1), (1, 2)]);
    }

    #[test]
    fn multiset_splits_count_subsets() {
        let e = ExponentKey::new(vec![1, 0, 0]);
        let splits = split_multiset(&e);
        assert_eq!(splits.len(), 6);
        assert_eq!(splits.iter().map(|x| x.2).sum::<i64>(), 8);
        assert_eq!(split_multiset(&ExponentKey::empty()).len(), 1);
    }

    #[test]
    fn bracket_11() {
        let b = bracket_assemble(1, 0, &Deps::new(), None).unwrap();
        assert_eq!(b.beta.len(), 1);
        assert_eq!(b.get(-1).unwrap().get(&[]), s("1/4"));
    }

    #[test]
    fn bracket_03() {
        let b = bracket_assemble(0, 2, &Deps::new(), None).unwrap();
        assert_eq!(b.beta.len(), 1);
        let b0 = b.get(0).unwrap();
        assert_eq!(b0.get(&[0, 0]), s("2"));
        assert_eq!(b0.len(), 1);
    }

    #[test]
    fn bracket_21_top_pole() {
        // W^1_1(u)^2 + W^1_2(u,-u) at u^-8: (1/8)^2 + (5/8 + 3/8 + 5/8)
        let e = Engine::weil_petersson(5);
        let b = e.bracket(2, 1).unwrap();
        assert_eq!(b.get(-4).unwrap().get(&[]), s("105/64"));
        assert_eq!(b.max_pole(), Some(4));
    }

    #[test]
    fn residue_11_by_hand() {
        let e = Engine::weil_petersson(2);
        let w = e.correlator(1, 1).unwrap();
        assert_eq!(w.get(&[1]), s("1/8"));
        assert_eq!(w.get(&[0]), s("1/12*pi^2"));
        let empty = BracketExpansion {
            n: 0,
            beta: BTreeMap::new(),
        };
        let ks = e.kernel(1).unwrap();
        assert!(residue_extract(1, &ks, &empty).unwrap().coeffs.is_empty());
    }

    #[test]
    fn residue_needs_long_kernel() {
        let e = Engine::weil_petersson(5);
        let b = e.bracket(2, 1).unwrap();
        let ks = e.kernel(2).unwrap();
        assert!(matches!(
            residue_extract(2, &ks, &b),
            Err(Error::KernelTooShort { needed: 4, .. })
        ));
    }

    #[test]
    fn unstable_shapes_rejected() {
        let e = Engine::weil_petersson(3);
        for (g, n) in [(0, 0), (0, 1), (0, 2), (1, 0)] {
            assert!(matches!(e.correlator(g, n), Err(Error::Unstable { .. })));
        }
    }

    #[test]
    fn truncated_curve_errors() {
        let e = Engine::new(SpectralCurve::weil_petersson(3), EngineConfig::default()).unwrap();
        assert!(e.correlator(1, 2).is_ok());
        assert!(matches!(
            e.correlator(2, 1),
            Err(Error::KernelTooShort {
                needed: 4,
                available: 2
            })
        ));
    }
}
