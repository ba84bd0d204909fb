//! Harmonic numbers `H(n) = 1 + 1/2 + … + 1/n`, with `H(0) = 0`.
//!
//! [`HarmonicTable`] holds compensated prefix sums in `f64` up to a fixed
//! capacity and falls back to the asymptotic expansion
//! `ln n + γ + 1/(2n) − 1/(12n²) + 1/(120n⁴)` above it. [`ExactHarmonic`]
//! is the rational counterpart used as a verification oracle.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Neg, Sub};
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// Euler–Mascheroni constant γ.
pub const EULER_MASCHERONI: f64 = 0.577_215_664_901_532_9;

/// Default table capacity (2^20). The truncation error of the asymptotic
/// tail at this index is below `1/(252 n⁶)`, far under one ulp.
pub const DEFAULT_CAPACITY: usize = 1 << 20;

/// Largest index for which exact rational harmonic numbers are served.
pub const EXACT_LIMIT: usize = 10_000;

/// Ranges at most this wide are summed term by term instead of subtracting
/// two prefix sums.
pub const DIRECT_SUM_SPAN: usize = 64;

/// Smallest table ever built. The expansion is only trusted past this point.
pub const MIN_CAPACITY: usize = 1024;

/// Precomputed `H(0)..=H(max_index)` in double precision.
///
/// Immutable after construction; share it behind an `Arc` (see
/// [`HarmonicTable::shared`]).
#[derive(Clone, Debug)]
pub struct HarmonicTable {
    values: Vec<f64>,
}

impl HarmonicTable {
    /// Builds the table with Neumaier-compensated summation. Requests below
    /// [`MIN_CAPACITY`] are raised to it.
    pub fn new(max_index: usize) -> Self {
        let max_index = max_index.max(MIN_CAPACITY);
        let mut values = Vec::with_capacity(max_index + 1);
        values.push(0.0);
        let mut sum = 0.0f64;
        let mut comp = 0.0f64;
        for i in 1..=max_index {
            let term = 1.0 / i as f64;
            let t = sum + term;
            if sum.abs() >= term {
                comp += (sum - t) + term;
            } else {
                comp += (term - t) + sum;
            }
            sum = t;
            values.push(sum + comp);
        }
        HarmonicTable { values }
    }

    /// Process-wide table of [`DEFAULT_CAPACITY`], built on first use.
    pub fn shared() -> std::sync::Arc<HarmonicTable> {
        static SHARED: OnceLock<std::sync::Arc<HarmonicTable>> = OnceLock::new();
        SHARED
            .get_or_init(|| std::sync::Arc::new(HarmonicTable::new(DEFAULT_CAPACITY)))
            .clone()
    }

    /// Table capacity `N`: `H(n)` is tabulated for `n <= N`.
    pub fn max_index(&self) -> usize {
        self.values.len() - 1
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// `H(n)`. Any `n` is accepted; indices past the table use the
    /// asymptotic expansion.
    pub fn harmonic(&self, n: usize) -> f64 {
        match self.values.get(n) {
            Some(&v) => v,
            None => asymptotic(n),
        }
    }

    /// `H(hi) − H(lo)`.
    pub fn harmonic_diff(&self, lo: usize, hi: usize) -> Result<f64> {
        if lo > hi {
            return Err(Error::Precondition(format!(
                "harmonic_diff requires lo <= hi, got lo = {lo}, hi = {hi}"
            )));
        }
        Ok(self.diff(lo, hi))
    }

    /// Unchecked `H(hi) − H(lo)`; callers guarantee `lo <= hi`.
    pub(crate) fn diff(&self, lo: usize, hi: usize) -> f64 {
        debug_assert!(lo <= hi);
        if lo == hi {
            return 0.0;
        }
        let n = self.max_index();
        if hi - lo <= DIRECT_SUM_SPAN && hi <= n {
            // smallest terms first
            return (lo + 1..=hi).rev().map(|i| 1.0 / i as f64).sum();
        }
        if lo > n {
            return asymptotic_diff(lo, hi);
        }
        self.harmonic(hi) - self.harmonic(lo)
    }
}

impl Default for HarmonicTable {
    fn default() -> Self {
        HarmonicTable::new(DEFAULT_CAPACITY)
    }
}

fn asymptotic(n: usize) -> f64 {
    let x = n as f64;
    let x2 = x * x;
    x.ln() + EULER_MASCHERONI + 1.0 / (2.0 * x) - 1.0 / (12.0 * x2) + 1.0 / (120.0 * x2 * x2)
}

// Same expansion, differenced term by term so the logarithms do not cancel.
fn asymptotic_diff(lo: usize, hi: usize) -> f64 {
    let (l, h) = (lo as f64, hi as f64);
    let log = ((hi - lo) as f64 / l).ln_1p();
    let first = 0.5 / h - 0.5 / l;
    let second = 1.0 / (12.0 * l * l) - 1.0 / (12.0 * h * h);
    let fourth = 1.0 / (120.0 * h.powi(4)) - 1.0 / (120.0 * l.powi(4));
    log + first + second + fourth
}

/// An exact rational number in lowest terms with a positive denominator.
///
/// Used for `H(n)`, for exact distances and for exact triangle slacks (which
/// may be negative).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ExactHarmonic(BigRational);

impl ExactHarmonic {
    pub fn zero() -> Self {
        ExactHarmonic(BigRational::zero())
    }

    /// Reduces `numer / denom`. Panics if `denom` is zero.
    pub fn new(numer: BigInt, denom: BigInt) -> Self {
        ExactHarmonic(BigRational::new(numer, denom))
    }

    pub fn from_integer(n: i64) -> Self {
        ExactHarmonic(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn abs(&self) -> Self {
        ExactHarmonic(self.0.abs())
    }

    /// Nearest `f64`.
    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    pub fn as_ratio(&self) -> &BigRational {
        &self.0
    }
}

impl From<BigRational> for ExactHarmonic {
    fn from(r: BigRational) -> Self {
        ExactHarmonic(r)
    }
}

impl fmt::Display for ExactHarmonic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.0.numer(), self.0.denom())
    }
}

impl Serialize for ExactHarmonic {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl PartialOrd for ExactHarmonic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ExactHarmonic {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.cmp(&other.0)
    }
}

impl Add for ExactHarmonic {
    type Output = ExactHarmonic;
    fn add(self, rhs: Self) -> Self {
        ExactHarmonic(self.0 + rhs.0)
    }
}

impl<'a> Add<&'a ExactHarmonic> for &'a ExactHarmonic {
    type Output = ExactHarmonic;
    fn add(self, rhs: &ExactHarmonic) -> ExactHarmonic {
        ExactHarmonic(&self.0 + &rhs.0)
    }
}

impl Sub for ExactHarmonic {
    type Output = ExactHarmonic;
    fn sub(self, rhs: Self) -> Self {
        ExactHarmonic(self.0 - rhs.0)
    }
}

impl<'a> Sub<&'a ExactHarmonic> for &'a ExactHarmonic {
    type Output = ExactHarmonic;
    fn sub(self, rhs: &ExactHarmonic) -> ExactHarmonic {
        ExactHarmonic(&self.0 - &rhs.0)
    }
}

impl Neg for ExactHarmonic {
    type Output = ExactHarmonic;
    fn neg(self) -> Self {
        ExactHarmonic(-self.0)
    }
}

/// Exact `H(n)` for `n <= EXACT_LIMIT`.
pub fn harmonic_exact(n: usize) -> Result<ExactHarmonic> {
    let table = exact_table(n, "harmonic index")?;
    let (numer, denom) = table.unreduced(n);
    Ok(ExactHarmonic::new(numer.clone(), denom.clone()))
}

/// Exact `H(hi) − H(lo)` for `lo <= hi <= EXACT_LIMIT`.
pub fn harmonic_diff_exact(lo: usize, hi: usize) -> Result<ExactHarmonic> {
    if lo > hi {
        return Err(Error::Precondition(format!(
            "harmonic_diff_exact requires lo <= hi, got lo = {lo}, hi = {hi}"
        )));
    }
    let table = exact_table(hi, "harmonic index")?;
    Ok(table.combine(hi, &[(1, hi), (-1, lo)]))
}

pub(crate) fn exact_table(n: usize, what: &'static str) -> Result<&'static ExactPrefix> {
    if n > EXACT_LIMIT {
        return Err(Error::Capacity {
            what,
            value: n,
            limit: EXACT_LIMIT,
        });
    }
    static TABLE: OnceLock<ExactPrefix> = OnceLock::new();
    Ok(TABLE.get_or_init(|| ExactPrefix::new(EXACT_LIMIT)))
}

/// Unreduced prefix sums `H(n) = numer[n] / lcm(1..=n)`.
///
/// Keeping every prefix over the running lcm makes each step a small
/// multiply and add; reduction happens once, when a value is handed out.
pub(crate) struct ExactPrefix {
    numer: Vec<BigInt>,
    lcm_slot: Vec<u32>,
    lcms: Vec<BigInt>,
}

impl ExactPrefix {
    fn new(limit: usize) -> Self {
        let mut numer = Vec::with_capacity(limit + 1);
        let mut lcm_slot = Vec::with_capacity(limit + 1);
        let mut lcms = vec![BigInt::one()];
        let mut acc = BigInt::zero();
        numer.push(acc.clone());
        lcm_slot.push(0);
        for n in 1..=limit {
            if let Some(p) = prime_power_base(n) {
                let next = lcms.last().unwrap() * p;
                lcms.push(next);
                acc *= p;
            }
            let lcm = lcms.last().unwrap();
            acc += lcm / BigInt::from(n);
            numer.push(acc.clone());
            lcm_slot.push((lcms.len() - 1) as u32);
        }
        ExactPrefix {
            numer,
            lcm_slot,
            lcms,
        }
    }

    fn unreduced(&self, n: usize) -> (&BigInt, &BigInt) {
        (&self.numer[n], &self.lcms[self.lcm_slot[n] as usize])
    }

    /// `Σ coeff·H(index)` over the common denominator `lcm(1..=top)`;
    /// every index must be `<= top`.
    pub(crate) fn combine(&self, top: usize, terms: &[(i64, usize)]) -> ExactHarmonic {
        let denom = &self.lcms[self.lcm_slot[top] as usize];
        let mut numer = BigInt::zero();
        for &(coeff, idx) in terms {
            debug_assert!(idx <= top);
            let (n, d) = self.unreduced(idx);
            if coeff == 0 || n.is_zero() {
                continue;
            }
            numer += n * (denom / d) * coeff;
        }
        ExactHarmonic::new(numer, denom.clone())
    }
}

fn prime_power_base(n: usize) -> Option<usize> {
    if n < 2 {
        return None;
    }
    let p = (2..)
        .take_while(|d| d * d <= n)
        .find(|d| n % d == 0)
        .unwrap_or(n);
    let mut m = n;
    while m % p == 0 {
        m /= p;
    }
    (m == 1).then_some(p)
}
