//! Exact rational arithmetic and continued fractions.
//!
//! Everything here works on [`Int`] (`i128`) with checked arithmetic; an
//! overflow is reported as [`RatcfError::Overflow`] instead of wrapping.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Integer type used for numerators, denominators, digits and counts.
pub type Int = i128;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RatcfError {
    #[error("zero denominator")]
    ZeroDenominator,
    #[error("negative value {0}")]
    Negative(String),
    #[error("{0} is not in [0, 1)")]
    OutOfUnitInterval(Rational),
    #[error("{num}/{den} is not in lowest terms")]
    NotReduced { num: Int, den: Int },
    #[error("invalid digit sequence: {0}")]
    InvalidDigits(String),
    #[error("level {requested} needs more digits than the {available} available")]
    NotEnoughDigits { requested: usize, available: usize },
    #[error("modulus must be positive, got {0}")]
    NonPositiveModulus(Int),
    #[error("{0} and {1} are not coprime")]
    NotCoprime(Int, Int),
    #[error("integer overflow")]
    Overflow,
    #[error("cannot parse {0:?}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, RatcfError>;

pub fn gcd(a: Int, b: Int) -> Int {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

fn mul(a: Int, b: Int) -> Result<Int> {
    a.checked_mul(b).ok_or(RatcfError::Overflow)
}

fn add(a: Int, b: Int) -> Result<Int> {
    a.checked_add(b).ok_or(RatcfError::Overflow)
}

/// A non-negative rational number in lowest terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Rational {
    num: Int,
    den: Int,
}

impl Rational {
    /// Builds `num/den`, reducing it to lowest terms.
    pub fn new(num: Int, den: Int) -> Result<Self> {
        if den == 0 {
            return Err(RatcfError::ZeroDenominator);
        }
        if num < 0 || den < 0 {
            return Err(RatcfError::Negative(format!("{num}/{den}")));
        }
        let g = gcd(num, den);
        Ok(Self {
            num: num / g,
            den: den / g,
        })
    }

    /// Builds `num/den` and rejects input that is not already reduced.
    pub fn reduced(num: Int, den: Int) -> Result<Self> {
        let r = Self::new(num, den)?;
        if r.num != num {
            return Err(RatcfError::NotReduced { num, den });
        }
        Ok(r)
    }

    pub fn zero() -> Self {
        Self { num: 0, den: 1 }
    }

    pub fn num(&self) -> Int {
        self.num
    }

    pub fn den(&self) -> Int {
        self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num == 0
    }

    pub fn to_f64(&self) -> f64 {
        self.num as f64 / self.den as f64
    }

    /// Fractional part of the signed ratio `num/den`, as a value in `[0, 1)`.
    pub fn fract_of(num: Int, den: Int) -> Result<Self> {
        if den <= 0 {
            return Err(RatcfError::NonPositiveModulus(den));
        }
        Self::new(num.rem_euclid(den), den)
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

impl FromStr for Rational {
    type Err = RatcfError;

    /// Parses `"p/q"` (or a bare integer). Non-reduced input is rejected.
    fn from_str(s: &str) -> Result<Self> {
        let parse = |t: &str| {
            t.trim()
                .parse::<Int>()
                .map_err(|_| RatcfError::Parse(s.to_string()))
        };
        match s.split_once('/') {
            Some((p, q)) => Self::reduced(parse(p)?, parse(q)?),
            None => Self::reduced(parse(s)?, 1),
        }
    }
}

/// A finite simple continued fraction `(a_0; a_1, ..., a_K)` with `a_0 = 0`
/// and `a_n >= 1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ContinuedFraction {
    digits: Vec<Int>,
}

impl ContinuedFraction {
    pub fn new(digits: Vec<Int>) -> Result<Self> {
        match digits.first() {
            None => return Err(RatcfError::InvalidDigits("empty".into())),
            Some(&a0) if a0 != 0 => {
                return Err(RatcfError::InvalidDigits(format!("a_0 = {a0}, expected 0")))
            }
            _ => {}
        }
        if let Some((n, a)) = digits.iter().enumerate().skip(1).find(|(_, &a)| a < 1) {
            return Err(RatcfError::InvalidDigits(format!(
                "a_{n} = {a}, expected >= 1"
            )));
        }
        Ok(Self { digits })
    }

    /// `(0, 1, 1, ..., 1)` with `len` entries: a prefix of the golden mean
    /// `(sqrt(5) - 1) / 2`.
    pub fn golden_mean(len: usize) -> Self {
        let mut digits = vec![1; len.max(1)];
        digits[0] = 0;
        Self { digits }
    }

    pub fn digits(&self) -> &[Int] {
        &self.digits
    }

    pub fn len(&self) -> usize {
        self.digits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.digits.is_empty()
    }

    /// Digit `a_k`, if present.
    pub fn digit(&self, k: usize) -> Option<Int> {
        self.digits.get(k).copied()
    }

    /// Last digit is at least 2 whenever there are two or more digits.
    pub fn is_canonical(&self) -> bool {
        self.digits.len() < 2 || self.digits[self.digits.len() - 1] >= 2
    }

    /// First `len` digits.
    pub fn truncate(&self, len: usize) -> Result<Self> {
        if len == 0 || len > self.digits.len() {
            return Err(RatcfError::NotEnoughDigits {
                requested: len,
                available: self.digits.len(),
            });
        }
        Ok(Self {
            digits: self.digits[..len].to_vec(),
        })
    }

    /// Exact value of the full expansion.
    pub fn evaluate(&self) -> Result<Rational> {
        let c = convergents(self, self.digits.len() - 1)?;
        let last = c.last().expect("at least one convergent");
        Rational::new(last.p, last.q)
    }
}

impl fmt::Display for ContinuedFraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.digits.iter().map(|d| d.to_string()).collect();
        write!(f, "{}", parts.join(","))
    }
}

impl FromStr for ContinuedFraction {
    type Err = RatcfError;

    /// Parses a comma-separated digit list such as `"0,3,2,1,2"`.
    fn from_str(s: &str) -> Result<Self> {
        let digits = s
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<Int>()
                    .map_err(|_| RatcfError::Parse(s.to_string()))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(digits)
    }
}

/// Euclidean expansion of `x` in `[0, 1)`, in canonical form.
pub fn cf_expand(x: Rational) -> Result<ContinuedFraction> {
    if x.num >= x.den {
        return Err(RatcfError::OutOfUnitInterval(x));
    }
    let mut digits = vec![0];
    let (mut a, mut b) = (x.den, x.num);
    while b != 0 {
        digits.push(a / b);
        (a, b) = (b, a % b);
    }
    Ok(ContinuedFraction { digits })
}

/// The truncation `p_k/q_k` of a continued fraction at level `k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Convergent {
    pub k: usize,
    pub p: Int,
    pub q: Int,
}

impl Convergent {
    pub fn as_rational(&self) -> Rational {
        Rational {
            num: self.p,
            den: self.q,
        }
    }
}

/// Convergents for levels `0..=up_to` via the three-term recurrence seeded
/// with `(p_{-1}, q_{-1}) = (1, 0)` and `(p_0, q_0) = (0, 1)`.
pub fn convergents(cf: &ContinuedFraction, up_to: usize) -> Result<Vec<Convergent>> {
    if up_to >= cf.digits.len() {
        return Err(RatcfError::NotEnoughDigits {
            requested: up_to + 1,
            available: cf.digits.len(),
        });
    }
    let mut out = Vec::with_capacity(up_to + 1);
    out.push(Convergent { k: 0, p: 0, q: 1 });
    let (mut p_prev, mut q_prev) = (1, 0);
    let (mut p, mut q) = (0, 1);
    for k in 1..=up_to {
        let a = cf.digits[k];
        let p_next = add(mul(a, p)?, p_prev)?;
        let q_next = add(mul(a, q)?, q_prev)?;
        (p_prev, q_prev, p, q) = (p, q, p_next, q_next);
        out.push(Convergent { k, p, q });
    }
    Ok(out)
}

/// Centered residue `x - q * floor(x/q + 1/2)`, in `[-q/2, q/2)`.
pub fn mod_star(x: Int, q: Int) -> Result<Int> {
    if q <= 0 {
        return Err(RatcfError::NonPositiveModulus(q));
    }
    let two_q = mul(2, q)?;
    let shifted = add(mul(2, x)?, q)?;
    let floor = shifted.div_euclid(two_q);
    Ok(x - floor * q)
}

/// Inverse of `p` modulo `q` in `[0, q)`, via the extended Euclidean algorithm.
pub fn mod_inverse(p: Int, q: Int) -> Result<Int> {
    if q <= 0 {
        return Err(RatcfError::NonPositiveModulus(q));
    }
    let (mut r0, mut r1) = (p.rem_euclid(q), q);
    let (mut s0, mut s1): (Int, Int) = (1, 0);
    while r1 != 0 {
        let t = r0 / r1;
        (r0, r1) = (r1, r0 - t * r1);
        (s0, s1) = (s1, s0 - t * s1);
    }
    if r0 != 1 {
        return Err(RatcfError::NotCoprime(p, q));
    }
    Ok(s0.rem_euclid(q))
}

/// `p_k^{-1} mod q_k` read off the convergent ladder as `(-1)^{k-1} q_{k-1}`.
///
/// `ladder` must hold levels `0..=k`. Level 0 has `q_0 = 1` and yields 0.
pub fn inverse_from_ladder(ladder: &[Convergent], k: usize) -> Result<Int> {
    let q_k = ladder
        .get(k)
        .ok_or(RatcfError::NotEnoughDigits {
            requested: k + 1,
            available: ladder.len(),
        })?
        .q;
    let q_prev = if k == 0 { 0 } else { ladder[k - 1].q };
    let signed = if k % 2 == 1 { q_prev } else { -q_prev };
    Ok(signed.rem_euclid(q_k))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(p: Int, q: Int) -> Rational {
        Rational::new(p, q).unwrap()
    }

    #[test]
    fn expand_small_values() {
        assert_eq!(cf_expand(r(0, 1)).unwrap().digits(), &[0]);
        assert_eq!(cf_expand(r(1, 2)).unwrap().digits(), &[0, 2]);
        let cf = cf_expand(r(8, 27)).unwrap();
        assert_eq!(cf.digits(), &[0, 3, 2, 1, 2]);
        assert!(cf.is_canonical());
        assert_eq!(cf.evaluate().unwrap(), r(8, 27));
        // the sibling form evaluates to the same number
        let sibling: ContinuedFraction = "0,3,2,1,1,1".parse().unwrap();
        assert!(!sibling.is_canonical());
        assert_eq!(sibling.evaluate().unwrap(), r(8, 27));
    }

    #[test]
    fn expand_rejects_out_of_range() {
        assert!(matches!(
            cf_expand(r(1, 1)),
            Err(RatcfError::OutOfUnitInterval(_))
        ));
        assert!(cf_expand(r(3, 2)).is_err());
        assert!(Rational::new(-1, 2).is_err());
    }

    #[test]
    fn convergent_ladders() {
        let cf: ContinuedFraction = "0,3,2,1,2".parse().unwrap();
        let c = convergents(&cf, 4).unwrap();
        let pq: Vec<_> = c.iter().map(|c| (c.p, c.q)).collect();
        assert_eq!(pq, vec![(0, 1), (1, 3), (2, 7), (3, 10), (8, 27)]);

        let golden = ContinuedFraction::golden_mean(6);
        let c = convergents(&golden, 5).unwrap();
        let pq: Vec<_> = c.iter().skip(1).map(|c| (c.p, c.q)).collect();
        assert_eq!(pq, vec![(1, 1), (1, 2), (2, 3), (3, 5), (5, 8)]);

        assert!(convergents(&cf, 5).is_err());
    }

    #[test]
    fn mod_star_window() {
        assert_eq!(mod_star(1, 2).unwrap(), -1);
        assert_eq!(mod_star(2, 4).unwrap(), -2);
        assert_eq!(mod_star(0, 7).unwrap(), 0);
        assert_eq!(mod_star(5, 3).unwrap(), -1);
        assert_eq!(mod_star(-3, 7).unwrap(), -3);
        assert_eq!(mod_star(4, 7).unwrap(), -3);
        assert_eq!(mod_star(3, 7).unwrap(), 3);
        assert!(mod_star(1, 0).is_err());
        assert!(mod_star(1, -3).is_err());
    }

    #[test]
    fn inverses() {
        assert_eq!(mod_inverse(3, 10).unwrap(), 7);
        assert_eq!(mod_inverse(0, 1).unwrap(), 0);
        assert!(matches!(mod_inverse(2, 4), Err(RatcfError::NotCoprime(..))));
    }

    #[test]
    fn parsing() {
        assert_eq!("3/10".parse::<Rational>().unwrap(), r(3, 10));
        assert!(matches!(
            "2/4".parse::<Rational>(),
            Err(RatcfError::NotReduced { .. })
        ));
        assert!("x/4".parse::<Rational>().is_err());
        assert!("1/0".parse::<Rational>().is_err());
        assert!("1,2".parse::<ContinuedFraction>().is_err());
        assert!("0,2,0".parse::<ContinuedFraction>().is_err());
        assert_eq!(
            "0, 3,2".parse::<ContinuedFraction>().unwrap().to_string(),
            "0,3,2"
        );
    }

    #[test]
    fn deep_ladder_reports_overflow() {
        let cf =
            ContinuedFraction::new([0].into_iter().chain([1_000_000_000; 60]).collect()).unwrap();
        assert_eq!(convergents(&cf, 60), Err(RatcfError::Overflow));
        // depth 40 with digits <= 9 fits
        let cf = ContinuedFraction::new([0].into_iter().chain([8; 40]).collect()).unwrap();
        assert!(convergents(&cf, 40).is_ok());
    }
}
