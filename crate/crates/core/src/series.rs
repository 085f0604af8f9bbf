//! Exact truncated multivariate Laurent series over [`Rational`], plus the
//! special-function builders (`ς`, `S`, `x/sinh x`, `x/tanh x`, ...) the
//! rest of the crate expands.
//!
//! A series value represents partial knowledge of an exact Laurent series:
//! per variable it carries a *lower bound* (the exact series has no terms
//! below it — a hard support guarantee) and a *truncation order* (every
//! coefficient with all exponents at or below it is stored exactly).
//! Each operation computes the largest window on which its result is
//! unaffected by the operands' discarded tails; reading a coefficient
//! beyond that window is an error, never a silent zero.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num::{One, Signed, Zero};

use crate::rational::{rat_int, Rational};
use crate::{Error, Result};

/// Knowledge-bound sentinel: a truncation order at or above this value
/// means "known to all orders" (the series data is exact).
const UNBOUNDED: i32 = i32::MAX / 2;

fn bound_add(a: i32, b: i32) -> i32 {
    if a >= UNBOUNDED || b >= UNBOUNDED {
        UNBOUNDED
    } else {
        a + b
    }
}

/// A formal variable, identified by name; variables are totally ordered
/// by name, and every series keeps its variable list sorted.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VarId(String);

impl VarId {
    pub fn new(name: impl Into<String>) -> Self {
        VarId(name.into())
    }

    pub fn name(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for VarId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Requested truncation orders per variable, used when materializing
/// symbolic expressions (operator expectations, substitutions) as series.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TruncationSpec {
    orders: BTreeMap<VarId, i32>,
}

impl TruncationSpec {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, var: VarId, order: i32) -> Self {
        self.orders.insert(var, order);
        self
    }

    pub fn set(&mut self, var: VarId, order: i32) {
        self.orders.insert(var, order);
    }

    pub fn order_of(&self, var: &VarId) -> Option<i32> {
        self.orders.get(var).copied()
    }

    pub fn vars(&self) -> impl Iterator<Item = (&VarId, i32)> {
        self.orders.iter().map(|(v, o)| (v, *o))
    }
}

/// Truncated multivariate Laurent series with exact rational coefficients.
///
/// Invariants: `vars` is sorted and duplicate-free; every stored exponent
/// vector lies inside the window; no stored coefficient is zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LaurentSeries {
    vars: Vec<VarId>,
    lower: Vec<i32>,
    upper: Vec<i32>,
    coeffs: BTreeMap<Vec<i32>, Rational>,
}

impl LaurentSeries {
    fn normalized(
        vars: Vec<VarId>,
        lower: Vec<i32>,
        upper: Vec<i32>,
        coeffs: BTreeMap<Vec<i32>, Rational>,
    ) -> Self {
        let mut coeffs: BTreeMap<Vec<i32>, Rational> =
            coeffs.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        debug_assert!(vars.windows(2).all(|w| w[0] < w[1]));
        debug_assert!(coeffs.keys().all(|e| {
            e.iter()
                .zip(lower.iter().zip(upper.iter()))
                .all(|(x, (lo, hi))| lo <= x && x <= hi)
        }));

        // Drop variables that carry no information: exponent always zero,
        // knowledge unbounded, support bound not above zero.
        let removable: Vec<usize> = (0..vars.len())
            .filter(|&i| {
                lower[i] <= 0 && upper[i] >= UNBOUNDED && coeffs.keys().all(|e| e[i] == 0)
            })
            .collect();
        if removable.is_empty() {
            return LaurentSeries {
                vars,
                lower,
                upper,
                coeffs,
            };
        }
        let keep: Vec<usize> = (0..vars.len()).filter(|i| !removable.contains(i)).collect();
        let project = |e: &[i32]| -> Vec<i32> { keep.iter().map(|&i| e[i]).collect() };
        let coeffs = core::mem::take(&mut coeffs)
            .into_iter()
            .map(|(e, c)| (project(&e), c))
            .collect();
        LaurentSeries {
            vars: keep.iter().map(|&i| vars[i].clone()).collect(),
            lower: keep.iter().map(|&i| lower[i]).collect(),
            upper: keep.iter().map(|&i| upper[i]).collect(),
            coeffs,
        }
    }

    /// The zero series (exact).
    pub fn zero() -> Self {
        LaurentSeries {
            vars: vec![],
            lower: vec![],
            upper: vec![],
            coeffs: BTreeMap::new(),
        }
    }

    /// The constant series 1 (exact).
    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    /// A constant series (exact).
    pub fn constant(value: Rational) -> Self {
        let mut coeffs = BTreeMap::new();
        if !value.is_zero() {
            coeffs.insert(vec![], value);
        }
        LaurentSeries {
            vars: vec![],
            lower: vec![],
            upper: vec![],
            coeffs,
        }
    }

    /// `coeff · v1^e1 ··· vk^ek` (exact). Exponents may be negative.
    pub fn monomial(coeff: Rational, exponents: &[(VarId, i32)]) -> Self {
        if coeff.is_zero() {
            return Self::zero();
        }
        let mut items: Vec<(VarId, i32)> = exponents
            .iter()
            .filter(|(_, e)| *e != 0)
            .cloned()
            .collect();
        items.sort_by(|a, b| a.0.cmp(&b.0));
        let vars: Vec<VarId> = items.iter().map(|(v, _)| v.clone()).collect();
        assert!(
            vars.windows(2).all(|w| w[0] != w[1]),
            "duplicate variable in monomial"
        );
        let exps: Vec<i32> = items.iter().map(|(_, e)| *e).collect();
        let mut coeffs = BTreeMap::new();
        let lower = exps.clone();
        coeffs.insert(exps, coeff);
        let upper = vec![UNBOUNDED; vars.len()];
        LaurentSeries {
            vars,
            lower,
            upper,
            coeffs,
        }
    }

    /// An exact finite sum of monomials.
    pub fn polynomial(terms: &[(Rational, &[(VarId, i32)])]) -> Self {
        terms.iter().fold(Self::zero(), |acc, (c, exps)| {
            acc.add(&Self::monomial(c.clone(), exps))
        })
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn vars(&self) -> &[VarId] {
        &self.vars
    }

    /// Window `(lower_bound, truncation_order)` for `var`; `None` for a
    /// variable the series does not involve (it is exact and constant in
    /// every such variable).
    pub fn window(&self, var: &VarId) -> Option<(i32, i32)> {
        self.vars
            .iter()
            .position(|v| v == var)
            .map(|i| (self.lower[i], self.upper[i]))
    }

    /// True when the series is known to all orders (no truncated tail).
    pub fn is_exact(&self) -> bool {
        self.upper.iter().all(|&u| u >= UNBOUNDED)
    }

    /// Number of stored (nonzero) terms.
    pub fn term_count(&self) -> usize {
        self.coeffs.len()
    }

    fn extended(&self, vars: &[VarId]) -> Self {
        debug_assert!(vars.windows(2).all(|w| w[0] < w[1]));
        if self.vars == vars {
            return self.clone();
        }
        let positions: Vec<Option<usize>> = vars
            .iter()
            .map(|v| self.vars.iter().position(|w| w == v))
            .collect();
        assert!(
            self.vars.iter().all(|v| vars.contains(v)),
            "extended() requires a superset of variables"
        );
        let lower = positions
            .iter()
            .map(|p| p.map_or(0, |i| self.lower[i]))
            .collect();
        let upper = positions
            .iter()
            .map(|p| p.map_or(UNBOUNDED, |i| self.upper[i]))
            .collect();
        let coeffs = self
            .coeffs
            .iter()
            .map(|(e, c)| {
                let exps: Vec<i32> = positions.iter().map(|p| p.map_or(0, |i| e[i])).collect();
                (exps, c.clone())
            })
            .collect();
        LaurentSeries {
            vars: vars.to_vec(),
            lower,
            upper,
            coeffs,
        }
    }

    fn union_vars(&self, other: &Self) -> Vec<VarId> {
        let mut vars = self.vars.clone();
        for v in &other.vars {
            if !vars.contains(v) {
                vars.push(v.clone());
            }
        }
        vars.sort();
        vars
    }

    /// Coefficientwise sum. The window is the componentwise minimum of
    /// the two windows; terms the result cannot vouch for are dropped.
    pub fn add(&self, other: &Self) -> Self {
        let vars = self.union_vars(other);
        let a = self.extended(&vars);
        let b = other.extended(&vars);
        let lower: Vec<i32> = a
            .lower
            .iter()
            .zip(&b.lower)
            .map(|(&x, &y)| x.min(y))
            .collect();
        let upper: Vec<i32> = a
            .upper
            .iter()
            .zip(&b.upper)
            .map(|(&x, &y)| x.min(y))
            .collect();
        let in_box = |e: &[i32]| e.iter().zip(&upper).all(|(x, hi)| x <= hi);
        let mut coeffs: BTreeMap<Vec<i32>, Rational> = BTreeMap::new();
        for (e, c) in a.coeffs.iter().chain(b.coeffs.iter()) {
            if in_box(e) {
                *coeffs.entry(e.clone()).or_insert_with(Rational::zero) += c;
            }
        }
        Self::normalized(vars, lower, upper, coeffs)
    }

    pub fn neg(&self) -> Self {
        self.scale(&rat_int(-1))
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    /// Multiply by an exact scalar.
    pub fn scale(&self, factor: &Rational) -> Self {
        if factor.is_zero() {
            // The window information survives even though every known
            // coefficient is zero.
            return Self::normalized(
                self.vars.clone(),
                self.lower.clone(),
                self.upper.clone(),
                BTreeMap::new(),
            );
        }
        let coeffs = self
            .coeffs
            .iter()
            .map(|(e, c)| (e.clone(), c * factor))
            .collect();
        Self::normalized(
            self.vars.clone(),
            self.lower.clone(),
            self.upper.clone(),
            coeffs,
        )
    }

    /// Cauchy product. Result lower bound is the sum of lower bounds;
    /// the truncation order is the largest on which every retained
    /// coefficient is exact: `min(hi_a + lo_b, hi_b + lo_a)` per variable.
    pub fn mul(&self, other: &Self) -> Self {
        let vars = self.union_vars(other);
        let a = self.extended(&vars);
        let b = other.extended(&vars);
        let lower: Vec<i32> = a.lower.iter().zip(&b.lower).map(|(&x, &y)| x + y).collect();
        let upper: Vec<i32> = (0..vars.len())
            .map(|i| bound_add(a.upper[i], b.lower[i]).min(bound_add(b.upper[i], a.lower[i])))
            .collect();
        let mut coeffs: BTreeMap<Vec<i32>, Rational> = BTreeMap::new();
        for (ea, ca) in &a.coeffs {
            for (eb, cb) in &b.coeffs {
                let e: Vec<i32> = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
                if e.iter().zip(&upper).any(|(x, hi)| x > hi) {
                    continue;
                }
                *coeffs.entry(e).or_insert_with(Rational::zero) += ca * cb;
            }
        }
        Self::normalized(vars, lower, upper, coeffs)
    }

    /// `self^k` by repeated squaring; `pow(a, 0) = 1` exactly.
    pub fn pow(&self, k: u32) -> Self {
        let mut result = Self::one();
        let mut base = self.clone();
        let mut e = k;
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        result
    }

    /// Multiplicative inverse, defined when the lowest-order part is a
    /// single monomial with nonzero coefficient (a unit up to a monomial).
    /// The monomial prefactor shifts the lower bounds; the knowledge
    /// window shrinks to `upper - 2·e*` where `e*` is the prefactor
    /// exponent.
    pub fn invert(&self) -> Result<Self> {
        if self.coeffs.is_empty() {
            return Err(Error::NonInvertibleSeries);
        }
        let n = self.vars.len();
        let mut min_exp = vec![i32::MAX; n];
        for e in self.coeffs.keys() {
            for i in 0..n {
                min_exp[i] = min_exp[i].min(e[i]);
            }
        }
        // In several variables the componentwise minimum certifies the
        // lowest-order part only if the declared support bound meets it;
        // one variable is fine because the window is an interval.
        if n > 1 && min_exp != self.lower {
            return Err(Error::NonInvertibleSeries);
        }
        let unit = match self.coeffs.get(&min_exp) {
            Some(c) => c.clone(),
            None => return Err(Error::NonInvertibleSeries),
        };

        let neg_min: Vec<i32> = min_exp.iter().map(|e| -e).collect();
        let shifted = self.shift_exponents(&neg_min, &min_exp);

        if shifted.is_exact() {
            if shifted.coeffs.len() == 1 {
                return Ok(Self::monomial(
                    unit.recip(),
                    &self
                        .vars
                        .iter()
                        .cloned()
                        .zip(neg_min.iter().copied())
                        .collect::<Vec<_>>(),
                ));
            }
            return Err(Error::WindowOverflow {
                detail: "inverse of an exact non-monomial series has unbounded order".to_string(),
            });
        }

        // shifted = unit · (1 + h) with h supported in total degree >= 1;
        // 1/(1+h) = sum (-h)^j, truncated once j exceeds the window's
        // total-degree budget.
        let mut h = shifted.scale(&unit.recip());
        *h.coeffs.entry(vec![0; n]).or_insert_with(Rational::zero) -= Rational::one();
        h.coeffs.retain(|_, c| !c.is_zero());
        let budget: i64 = shifted.upper.iter().map(|&u| u.max(0) as i64).sum();
        let one = Self::one().extended(&self.vars).with_window(&shifted);
        let mut acc = one.clone();
        for _ in 0..budget {
            acc = one.sub(&h.mul(&acc));
        }
        acc = acc.scale(&unit.recip());
        Ok(acc.shift_exponents(&neg_min, &neg_min))
    }

    fn with_window(mut self, like: &Self) -> Self {
        debug_assert_eq!(self.vars, like.vars);
        self.lower = like.lower.clone();
        self.upper = like.upper.clone();
        self
    }

    /// Shift all exponents by `delta` and the lower bound by `lower_delta`
    /// (they differ when a support bound is being tightened first).
    fn shift_exponents(&self, delta: &[i32], lower_delta: &[i32]) -> Self {
        let lower = self
            .lower
            .iter()
            .zip(lower_delta)
            .map(|(l, d)| l + d)
            .collect::<Vec<_>>()
            .iter()
            .zip(self.coeffs.keys().next().map(|_| ()).iter())
            .map(|(l, _)| *l)
            .collect();
        let _ = lower_delta;
        let lower: Vec<i32> = self
            .coeffs
            .keys()
            .fold(vec![i32::MAX; self.vars.len()], |mut acc, e| {
                for i in 0..acc.len() {
                    acc[i] = acc[i].min(e[i] + delta[i]);
                }
                acc
            })
            .iter()
            .zip(self.lower.iter().zip(delta))
            .map(|(&stored_min, (&lo, &d))| stored_min.min(bound_add(lo, d).min(UNBOUNDED)))
            .collect();
        let upper: Vec<i32> = self
            .upper
            .iter()
            .zip(delta)
            .map(|(&u, &d)| bound_add(u, d))
            .collect();
        let coeffs = self
            .coeffs
            .iter()
            .map(|(e, c)| {
                (
                    e.iter().zip(delta).map(|(x, d)| x + d).collect::<Vec<_>>(),
                    c.clone(),
                )
            })
            .collect();
        Self::normalized(self.vars.clone(), lower, upper, coeffs)
    }

    /// Stored coefficient at the given exponents (variables omitted from
    /// `exponents` are read at exponent zero). Below the lower bound the
    /// answer is an exact zero; beyond the truncation order it is an
    /// error, because the stored data cannot vouch for it.
    pub fn coefficient(&self, exponents: &[(VarId, i32)]) -> Result<Rational> {
        for (v, e) in exponents {
            if *e != 0 && !self.vars.contains(v) {
                // Constant (hence exact) in a variable it does not involve.
                return Ok(Rational::zero());
            }
        }
        let mut exps = vec![0i32; self.vars.len()];
        for (v, e) in exponents {
            if let Some(i) = self.vars.iter().position(|w| w == v) {
                exps[i] = *e;
            }
        }
        for i in 0..self.vars.len() {
            if exps[i] > self.upper[i] {
                return Err(Error::OutsideTruncationWindow {
                    detail: alloc::format!(
                        "{}^{} beyond truncation order {}",
                        self.vars[i],
                        exps[i],
                        self.upper[i]
                    ),
                });
            }
        }
        if exps.iter().zip(&self.lower).any(|(e, lo)| e < lo) {
            return Ok(Rational::zero());
        }
        Ok(self.coeffs.get(&exps).cloned().unwrap_or_else(Rational::zero))
    }

    /// Coefficient of `var^e` for a series in a single variable.
    pub fn coefficient_univar(&self, e: i32) -> Result<Rational> {
        match self.vars.len() {
            0 => {
                if e == 0 {
                    Ok(self
                        .coeffs
                        .get(&vec![])
                        .cloned()
                        .unwrap_or_else(Rational::zero))
                } else {
                    Ok(Rational::zero())
                }
            }
            1 => {
                let v = self.vars[0].clone();
                self.coefficient(&[(v, e)])
            }
            _ => Err(Error::Domain {
                detail: "coefficient_univar on a multivariate series".to_string(),
            }),
        }
    }

    /// Substitute `x -> coeff · monomial` into a univariate series.
    /// `orders` gives the truncation order per target variable; it is an
    /// error if the source's unknown tail would land inside that window.
    pub fn substitute_monomial(
        &self,
        coeff: &Rational,
        monomial: &[(VarId, i32)],
        orders: &TruncationSpec,
    ) -> Result<Self> {
        if self.vars.len() > 1 {
            return Err(Error::Domain {
                detail: "substitute_monomial requires a univariate source".to_string(),
            });
        }
        if coeff.is_zero() {
            return Err(Error::Domain {
                detail: "substitute_monomial requires a nonzero coefficient".to_string(),
            });
        }
        let mut target: Vec<(VarId, i32)> = monomial.to_vec();
        target.sort_by(|a, b| a.0.cmp(&b.0));
        if target.is_empty() || target.iter().any(|(_, d)| *d < 1) {
            return Err(Error::Domain {
                detail: "substitution monomial must have positive exponents".to_string(),
            });
        }
        if target.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::Domain {
                detail: "duplicate variable in substitution monomial".to_string(),
            });
        }
        let vars: Vec<VarId> = target.iter().map(|(v, _)| v.clone()).collect();
        let degs: Vec<i32> = target.iter().map(|(_, d)| *d).collect();
        let hi: Vec<i32> = vars
            .iter()
            .map(|v| {
                orders.order_of(v).ok_or_else(|| Error::WindowOverflow {
                    detail: alloc::format!("no truncation order given for {v}"),
                })
            })
            .collect::<Result<_>>()?;

        let (src_lo, src_hi) = if self.vars.is_empty() {
            (0, UNBOUNDED)
        } else {
            (self.lower[0], self.upper[0])
        };
        // Unknown tail of the source maps to exponent vectors k·deg for
        // k > src_hi; all of them must fall outside the target window.
        if src_hi < UNBOUNDED {
            let tail = src_hi as i64 + 1;
            if (0..vars.len()).all(|i| tail * degs[i] as i64 <= hi[i] as i64) {
                return Err(Error::WindowOverflow {
                    detail: alloc::format!(
                        "image of the truncated tail (order {}) lands inside the target window",
                        tail
                    ),
                });
            }
        }
        let lo: Vec<i32> = degs.iter().map(|&d| src_lo.saturating_mul(d)).collect();
        if lo.iter().zip(&hi).any(|(l, h)| l > h) {
            return Err(Error::WindowOverflow {
                detail: "target window cannot hold the image of the source window".to_string(),
            });
        }

        let mut coeffs: BTreeMap<Vec<i32>, Rational> = BTreeMap::new();
        let mut all_inside = true;
        for (e, c) in &self.coeffs {
            let k = if e.is_empty() { 0 } else { e[0] };
            let image: Vec<i32> = degs.iter().map(|&d| k * d).collect();
            if image.iter().zip(&hi).any(|(x, h)| x > h) {
                all_inside = false;
                continue;
            }
            let scaled = c * power_rational(coeff, k);
            *coeffs.entry(image).or_insert_with(Rational::zero) += scaled;
        }
        let upper = if src_hi >= UNBOUNDED && all_inside {
            vec![UNBOUNDED; vars.len()]
        } else {
            hi
        };
        Ok(Self::normalized(vars, lo, upper, coeffs))
    }

    /// Substitute an exact polynomial with no constant term into a
    /// univariate power series: `outer(inner)`. The outer series must be
    /// known far enough to cover the total-degree budget of the window.
    pub fn substitute_poly(&self, inner: &Self, orders: &TruncationSpec) -> Result<Self> {
        if self.vars.len() > 1 {
            return Err(Error::Domain {
                detail: "substitute_poly requires a univariate outer series".to_string(),
            });
        }
        if !self.vars.is_empty() && self.lower[0] < 0 {
            return Err(Error::Domain {
                detail: "substitute_poly requires a power-series outer factor".to_string(),
            });
        }
        if !inner.is_exact() {
            return Err(Error::Domain {
                detail: "substitute_poly requires an exact inner polynomial".to_string(),
            });
        }
        if inner
            .coeffs
            .keys()
            .any(|e| e.iter().any(|&x| x < 0) || e.iter().all(|&x| x == 0))
        {
            return Err(Error::Domain {
                detail: "inner polynomial must vanish at the origin with nonnegative exponents"
                    .to_string(),
            });
        }
        let vars: Vec<VarId> = inner.vars.clone();
        let hi: Vec<i32> = vars
            .iter()
            .map(|v| {
                orders.order_of(v).ok_or_else(|| Error::WindowOverflow {
                    detail: alloc::format!("no truncation order given for {v}"),
                })
            })
            .collect::<Result<_>>()?;
        let budget: i64 = hi.iter().map(|&h| h.max(0) as i64).sum();
        let src_hi = if self.vars.is_empty() {
            UNBOUNDED
        } else {
            self.upper[0]
        };
        if (src_hi as i64) < budget {
            return Err(Error::WindowOverflow {
                detail: alloc::format!(
                    "outer series known to order {src_hi} but the window needs order {budget}"
                ),
            });
        }

        // Horner evaluation over descending powers keeps every
        // intermediate inside the target box.
        let box_lower = vec![0; vars.len()];
        let in_box = |e: &[i32]| e.iter().zip(&hi).all(|(x, h)| x <= h);
        let mut acc: BTreeMap<Vec<i32>, Rational> = BTreeMap::new();
        for k in (0..=budget).rev() {
            // acc = acc * inner
            if k < budget {
                let mut next: BTreeMap<Vec<i32>, Rational> = BTreeMap::new();
                for (ea, ca) in &acc {
                    for (eb, cb) in &inner.coeffs {
                        let e: Vec<i32> = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
                        if in_box(&e) {
                            *next.entry(e).or_insert_with(Rational::zero) += ca * cb;
                        }
                    }
                }
                acc = next;
            }
            let ck = self.coefficient_univar(k as i32)?;
            if !ck.is_zero() {
                *acc.entry(vec![0; vars.len()]).or_insert_with(Rational::zero) += ck;
            }
        }
        Ok(Self::normalized(vars, box_lower, hi, acc))
    }

    /// True when the two series agree on the intersection of their
    /// truncation windows (the notion of equality for partial knowledge
    /// of the same exact series).
    pub fn agrees_with(&self, other: &Self) -> bool {
        let vars = self.union_vars(other);
        let a = self.extended(&vars);
        let b = other.extended(&vars);
        let hi: Vec<i32> = a
            .upper
            .iter()
            .zip(&b.upper)
            .map(|(&x, &y)| x.min(y))
            .collect();
        let in_box = |e: &[i32]| e.iter().zip(&hi).all(|(x, h)| x <= h);
        for (e, c) in &a.coeffs {
            if in_box(e) && b.coeffs.get(e).map_or(!c.is_zero(), |d| c != d) {
                return false;
            }
        }
        for (e, c) in &b.coeffs {
            if in_box(e) && a.coeffs.get(e).map_or(!c.is_zero(), |d| c != d) {
                return false;
            }
        }
        true
    }

    /// Terms in graded-lexicographic order: total degree first, then
    /// exponents lexicographically.
    pub fn terms_graded_lex(&self) -> Vec<(Vec<(VarId, i32)>, Rational)> {
        let mut terms: Vec<(Vec<(VarId, i32)>, Rational)> = self
            .coeffs
            .iter()
            .map(|(e, c)| {
                let named: Vec<(VarId, i32)> = self
                    .vars
                    .iter()
                    .zip(e)
                    .filter(|(_, &x)| x != 0)
                    .map(|(v, &x)| (v.clone(), x))
                    .collect();
                (named, c.clone())
            })
            .collect();
        terms.sort_by(|(a, _), (b, _)| {
            let deg = |t: &[(VarId, i32)]| t.iter().map(|(_, e)| *e as i64).sum::<i64>();
            deg(a).cmp(&deg(b)).then_with(|| a.cmp(b))
        });
        terms
    }
}

fn power_rational(base: &Rational, e: i32) -> Rational {
    if e >= 0 {
        num::pow::pow(base.clone(), e as usize)
    } else {
        num::pow::pow(base.recip(), (-e) as usize)
    }
}

/// Render one monomial, e.g. `x^3*z^-1`; an empty exponent list is `1`.
pub fn format_monomial(exponents: &[(VarId, i32)]) -> String {
    if exponents.is_empty() {
        return "1".to_string();
    }
    let mut out = String::new();
    for (i, (v, e)) in exponents.iter().enumerate() {
        if i > 0 {
            out.push('*');
        }
        let needs_parens = v.name().contains(['+', '-']);
        if needs_parens {
            out.push('(');
        }
        out.push_str(v.name());
        if needs_parens {
            out.push(')');
        }
        if *e != 1 {
            out.push('^');
            out.push_str(&e.to_string());
        }
    }
    out
}

impl fmt::Display for LaurentSeries {
    fmt_doc! {}
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        for (i, (mono, coeff)) in self.terms_graded_lex().into_iter().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            if mono.is_empty() {
                write!(f, "{coeff}")?;
            } else if coeff.is_one() {
                f.write_str(&format_monomial(&mono))?;
            } else if coeff == rat_int(-1) {
                write!(f, "-{}", format_monomial(&mono))?;
            } else {
                write!(f, "{}*{}", coeff, format_monomial(&mono))?;
            }
        }
        Ok(())
    }
}

fn reciprocal_int(n: num::BigInt) -> Rational {
    Rational::new(num::BigInt::one(), n)
}

/// `ς(x) = 2 sinh(x/2) = Σ_k x^{2k+1} / (4^k (2k+1)!)`, truncated at
/// `order`.
pub fn varsigma_series(var: &VarId, order: i32) -> LaurentSeries {
    odd_builder(var, order, |k| {
        reciprocal_int(num::BigInt::from(4u32).pow(k as u32) * crate::rational::factorial(2 * k + 1))
    })
}

/// `S(x) = ς(x)/x = Σ_k x^{2k} / (4^k (2k+1)!)`.
pub fn s_series(var: &VarId, order: i32) -> LaurentSeries {
    even_builder(var, order, |k| {
        reciprocal_int(num::BigInt::from(4u32).pow(k as u32) * crate::rational::factorial(2 * k + 1))
    })
}

/// `cosh(x/2) = Σ_k x^{2k} / (4^k (2k)!)`.
pub fn cosh_half_series(var: &VarId, order: i32) -> LaurentSeries {
    even_builder(var, order, |k| {
        reciprocal_int(num::BigInt::from(4u32).pow(k as u32) * crate::rational::factorial(2 * k))
    })
}

/// `cosh(x) = Σ_k x^{2k} / (2k)!`.
pub fn cosh_series(var: &VarId, order: i32) -> LaurentSeries {
    even_builder(var, order, |k| {
        reciprocal_int(crate::rational::factorial(2 * k))
    })
}

/// `sinh(x)/x = Σ_k x^{2k} / (2k+1)!`.
pub fn sinh_over_x_series(var: &VarId, order: i32) -> LaurentSeries {
    even_builder(var, order, |k| {
        reciprocal_int(crate::rational::factorial(2 * k + 1))
    })
}

/// `x / sinh(x)`, the inverse of `sinh(x)/x`.
pub fn x_over_sinh(var: &VarId, order: i32) -> LaurentSeries {
    sinh_over_x_series(var, order)
        .invert()
        .expect("sinh(x)/x is a unit power series")
}

/// `x / tanh(x) = cosh(x) · x/sinh(x)`.
pub fn x_over_tanh(var: &VarId, order: i32) -> LaurentSeries {
    cosh_series(var, order).mul(&x_over_sinh(var, order))
}

fn even_builder(
    var: &VarId,
    order: i32,
    coeff: impl Fn(usize) -> Rational,
) -> LaurentSeries {
    parity_builder(var, order, 0, coeff)
}

fn odd_builder(var: &VarId, order: i32, coeff: impl Fn(usize) -> Rational) -> LaurentSeries {
    parity_builder(var, order, 1, coeff)
}

fn parity_builder(
    var: &VarId,
    order: i32,
    parity: i32,
    coeff: impl Fn(usize) -> Rational,
) -> LaurentSeries {
    assert!(order >= 0, "builder order must be nonnegative");
    let mut coeffs = BTreeMap::new();
    let mut k = 0usize;
    loop {
        let e = 2 * k as i32 + parity;
        if e > order {
            break;
        }
        coeffs.insert(vec![e], coeff(k));
        k += 1;
    }
    let lower = parity.min(order);
    LaurentSeries::normalized(vec![var.clone()], vec![lower], vec![order], coeffs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    fn x() -> VarId {
        VarId::new("x")
    }

    #[test]
    fn additive_identity_and_inverse() {
        let s = s_series(&x(), 8);
        assert_eq!(LaurentSeries::zero().add(&s), s);
        let vs = varsigma_series(&x(), 7);
        assert!(vs.add(&vs.neg()).is_zero());
    }

    #[test]
    fn add_hand_computed() {
        // (x + x^3/24) + x^3/24 = x + x^3/12
        let a = LaurentSeries::polynomial(&[
            (rat(1, 1), &[(x(), 1)][..]),
            (rat(1, 24), &[(x(), 3)][..]),
        ]);
        let b = LaurentSeries::monomial(rat(1, 24), &[(x(), 3)]);
        let sum = a.add(&b);
        assert_eq!(sum.coefficient_univar(1).unwrap(), rat(1, 1));
        assert_eq!(sum.coefficient_univar(3).unwrap(), rat(1, 12));
    }

    #[test]
    fn mul_identities() {
        let a = varsigma_series(&x(), 9);
        assert_eq!(LaurentSeries::one().mul(&a), a);
        let inv_x = LaurentSeries::monomial(rat(1, 1), &[(x(), -1)]);
        let xx = LaurentSeries::monomial(rat(1, 1), &[(x(), 1)]);
        let prod = inv_x.mul(&xx);
        assert_eq!(prod.coefficient_univar(0).unwrap(), rat(1, 1));
        assert_eq!(prod.term_count(), 1);
    }

    #[test]
    fn varsigma_squared() {
        let vs = varsigma_series(&x(), 7);
        let sq = vs.mul(&vs);
        assert_eq!(sq.coefficient_univar(2).unwrap(), rat(1, 1));
        assert_eq!(sq.coefficient_univar(4).unwrap(), rat(1, 12));
    }

    #[test]
    fn pow_examples() {
        let vs = varsigma_series(&x(), 7);
        assert_eq!(vs.pow(0), LaurentSeries::one());
        let xx = LaurentSeries::monomial(rat(1, 1), &[(x(), 1)]);
        let cubed = xx.pow(3);
        assert_eq!(cubed.coefficient_univar(3).unwrap(), rat(1, 1));
        let s2 = s_series(&x(), 8).pow(2);
        assert_eq!(s2.coefficient_univar(2).unwrap(), rat(1, 12));
    }

    #[test]
    fn invert_examples() {
        assert_eq!(
            LaurentSeries::one().invert().unwrap(),
            LaurentSeries::one()
        );
        let s_inv = s_series(&x(), 8).invert().unwrap();
        assert_eq!(s_inv.coefficient_univar(2).unwrap(), rat(-1, 24));
        let vs_inv = varsigma_series(&x(), 9).invert().unwrap();
        assert_eq!(vs_inv.coefficient_univar(-1).unwrap(), rat(1, 1));
        assert_eq!(vs_inv.coefficient_univar(1).unwrap(), rat(-1, 24));
        assert_eq!(vs_inv.coefficient_univar(3).unwrap(), rat(7, 5760));
    }

    #[test]
    fn invert_is_two_sided() {
        let vs = varsigma_series(&x(), 11);
        let inv = vs.invert().unwrap();
        assert!(vs.mul(&inv).agrees_with(&LaurentSeries::one()));
        assert!(inv.mul(&vs).agrees_with(&LaurentSeries::one()));
    }

    #[test]
    fn invert_rejects_non_monomial_bottom() {
        let z = VarId::new("z");
        let w = VarId::new("w");
        let zw = LaurentSeries::polynomial(&[
            (rat(1, 1), &[(z.clone(), 1)][..]),
            (rat(1, 1), &[(w.clone(), 1)][..]),
        ]);
        assert_eq!(zw.invert(), Err(Error::NonInvertibleSeries));
        assert_eq!(LaurentSeries::zero().invert(), Err(Error::NonInvertibleSeries));
    }

    #[test]
    fn coefficient_window_contract() {
        let vs = varsigma_series(&x(), 5);
        assert_eq!(vs.coefficient_univar(1).unwrap(), rat(1, 1));
        assert_eq!(vs.coefficient_univar(2).unwrap(), rat(0, 1));
        assert_eq!(vs.coefficient_univar(3).unwrap(), rat(1, 24));
        // below the support bound: exact zero
        assert_eq!(vs.coefficient_univar(0).unwrap(), rat(0, 1));
        assert_eq!(vs.coefficient_univar(-3).unwrap(), rat(0, 1));
        // beyond the truncation order: refuse to answer
        assert!(matches!(
            vs.coefficient_univar(6),
            Err(Error::OutsideTruncationWindow { .. })
        ));
    }

    #[test]
    fn substitute_monomial_examples() {
        let u = VarId::new("u");
        let z = VarId::new("z");
        let spec = TruncationSpec::new().with(u.clone(), 6).with(z.clone(), 6);

        let x2 = LaurentSeries::monomial(rat(1, 1), &[(x(), 2)]);
        let img = x2
            .substitute_monomial(&rat(1, 1), &[(u.clone(), 1), (z.clone(), 1)], &spec)
            .unwrap();
        assert_eq!(
            img.coefficient(&[(u.clone(), 2), (z.clone(), 2)]).unwrap(),
            rat(1, 1)
        );

        let spec_x = TruncationSpec::new().with(x(), 7);
        let doubled = varsigma_series(&x(), 7)
            .substitute_monomial(&rat(2, 1), &[(x(), 1)], &spec_x)
            .unwrap();
        assert_eq!(doubled.coefficient_univar(3).unwrap(), rat(1, 3));

        let s_img = s_series(&x(), 6)
            .substitute_monomial(&rat(1, 1), &[(u.clone(), 1), (z.clone(), 1)], &spec)
            .unwrap();
        assert_eq!(
            s_img
                .coefficient(&[(u.clone(), 2), (z.clone(), 2)])
                .unwrap(),
            rat(1, 24)
        );
    }

    #[test]
    fn substitute_monomial_tail_guard() {
        // The source is truncated at order 3; its tail would land inside
        // a window of order 8 in the image variable.
        let spec = TruncationSpec::new().with(VarId::new("y"), 8);
        let result = varsigma_series(&x(), 3).substitute_monomial(
            &rat(1, 1),
            &[(VarId::new("y"), 1)],
            &spec,
        );
        assert!(matches!(result, Err(Error::WindowOverflow { .. })));
    }

    #[test]
    fn substitute_poly_expands_linear_forms() {
        let z = VarId::new("z");
        let w = VarId::new("w");
        let form = LaurentSeries::polynomial(&[
            (rat(1, 1), &[(z.clone(), 1)][..]),
            (rat(1, 1), &[(w.clone(), 1)][..]),
        ]);
        let spec = TruncationSpec::new().with(z.clone(), 3).with(w.clone(), 3);
        let vs = varsigma_series(&x(), 6);
        let img = vs.substitute_poly(&form, &spec).unwrap();
        assert_eq!(img.coefficient(&[(z.clone(), 1)]).unwrap(), rat(1, 1));
        // [z^2 w] of (z+w)^3/24 = 3/24
        assert_eq!(
            img.coefficient(&[(z.clone(), 2), (w.clone(), 1)]).unwrap(),
            rat(1, 8)
        );
        // outer too short for the window
        let short = varsigma_series(&x(), 3);
        assert!(matches!(
            short.substitute_poly(&form, &spec),
            Err(Error::WindowOverflow { .. })
        ));
    }

    #[test]
    fn builder_values() {
        assert_eq!(
            x_over_sinh(&x(), 6).coefficient_univar(2).unwrap(),
            rat(-1, 6)
        );
        assert_eq!(
            x_over_tanh(&x(), 6).coefficient_univar(2).unwrap(),
            rat(1, 3)
        );
        assert_eq!(s_series(&x(), 6).coefficient_univar(0).unwrap(), rat(1, 1));
    }

    #[test]
    fn builder_parity() {
        let vs = varsigma_series(&x(), 11);
        for (mono, _) in vs.terms_graded_lex() {
            assert_eq!(mono[0].1 % 2, 1, "ς must be odd");
        }
        for series in [
            s_series(&x(), 10),
            x_over_sinh(&x(), 10),
            x_over_tanh(&x(), 10),
            cosh_half_series(&x(), 10),
        ] {
            for (mono, _) in series.terms_graded_lex() {
                if !mono.is_empty() {
                    assert_eq!(mono[0].1 % 2, 0, "even series");
                }
            }
        }
    }

    #[test]
    fn window_honesty_under_extension() {
        // Recompute with a larger window; every coefficient readable in
        // the smaller computation must be unchanged.
        let small = x_over_tanh(&x(), 6).mul(&x_over_sinh(&x(), 6).pow(2));
        let large = x_over_tanh(&x(), 12).mul(&x_over_sinh(&x(), 12).pow(2));
        for e in 0..=6 {
            assert_eq!(
                small.coefficient_univar(e).unwrap(),
                large.coefficient_univar(e).unwrap()
            );
        }
        let small_inv = s_series(&x(), 6).invert().unwrap();
        let large_inv = s_series(&x(), 14).invert().unwrap();
        for e in 0..=6 {
            assert_eq!(
                small_inv.coefficient_univar(e).unwrap(),
                large_inv.coefficient_univar(e).unwrap()
            );
        }
    }

    #[test]
    fn display_renders_poles() {
        let inv = varsigma_series(&x(), 5).invert().unwrap();
        let rendered = alloc::format!("{inv}");
        assert!(rendered.starts_with("x^-1"), "got {rendered}");
    }
}
