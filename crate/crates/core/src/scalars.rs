//! Exact rational arithmetic, squarefree normalization, and the local
//! symbols (Legendre, Hilbert) that every decider in this crate reduces to.
//!
//! Square classes of Q^×/Q^{×2} are represented canonically by squarefree
//! integers: a nonzero rational n/d lies in the class of the squarefree part
//! of n·d. All factoring is deterministic trial division with a configurable
//! bound; an input that cannot be factored completely is an error rather
//! than a silently wrong answer.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Exact rational scalar. `num_rational` maintains exactly the invariants we
/// need: reduced fraction, positive denominator.
pub type Rational = num_rational::BigRational;

/// Default trial-division bound. Desk-scale inputs have tiny prime support;
/// anything that survives division up to 10^6 and is larger than 10^12 is
/// reported as unfactorable instead of being guessed at.
pub const DEFAULT_FACTOR_BOUND: u64 = 1_000_000;

/// A nonzero integer with no repeated prime factor: the canonical
/// representative of a rational square class.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SquarefreeInt(BigInt);

impl SquarefreeInt {
    /// Wraps `value` after checking it is nonzero and squarefree.
    pub fn new(value: impl Into<BigInt>) -> Result<Self> {
        let value = value.into();
        if value.is_zero() {
            return Err(Error::ZeroValue("square class representative"));
        }
        if squarefree_kernel(&value, DEFAULT_FACTOR_BOUND)? != value {
            return Err(Error::Precondition(format!("{value} is not squarefree")));
        }
        Ok(SquarefreeInt(value))
    }

    pub fn one() -> Self {
        SquarefreeInt(BigInt::one())
    }

    pub fn value(&self) -> &BigInt {
        &self.0
    }

    pub fn is_one(&self) -> bool {
        self.0.is_one()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn negated(&self) -> Self {
        SquarefreeInt(-&self.0)
    }

    /// Product in Q^×/Q^{×2}: squarefree part of the integer product.
    pub fn mul(&self, other: &SquarefreeInt) -> Result<Self> {
        Ok(SquarefreeInt(squarefree_kernel(
            &(&self.0 * &other.0),
            DEFAULT_FACTOR_BOUND,
        )?))
    }

    /// Odd valuation test: for a squarefree integer, v_p is 0 or 1.
    pub fn divisible_by(&self, p: u64) -> bool {
        (&self.0 % BigInt::from(p)).is_zero()
    }
}

impl fmt::Display for SquarefreeInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A place of Q: the real embedding or a finite prime.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Place {
    Real,
    Prime(u64),
}

impl Place {
    /// Constructs a finite place, rejecting composite or unit input.
    pub fn prime(p: u64) -> Result<Self> {
        if is_prime_u64(p) {
            Ok(Place::Prime(p))
        } else {
            Err(Error::NotPrime(p))
        }
    }
}

impl fmt::Display for Place {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Place::Real => write!(f, "real"),
            Place::Prime(p) => write!(f, "{p}"),
        }
    }
}

/// Deterministic primality by trial division; adequate for the word-sized
/// primes that appear as places.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    if n % 3 == 0 {
        return n == 3;
    }
    let mut d = 5u64;
    while d.saturating_mul(d) <= n {
        if n % d == 0 || n % (d + 2) == 0 {
            return false;
        }
        d += 6;
    }
    true
}

/// Factors |n| by trial division up to `bound`, returning (prime, exponent)
/// pairs. A leftover cofactor below bound² must itself be prime and is kept;
/// anything larger is an incomplete factorization error.
fn trial_factor(n: &BigInt, bound: u64) -> Result<Vec<(u64, u32)>> {
    debug_assert!(!n.is_zero());
    let bound = bound.clamp(2, 1 << 31);
    let mut out = Vec::new();

    // Fast path: everything at desk scale fits in u128.
    if let Some(mut m) = n.abs().to_u128() {
        let mut push = |p: u64, e: u32| {
            if e > 0 {
                out.push((p, e));
            }
        };
        let mut e = 0;
        while m % 2 == 0 {
            m /= 2;
            e += 1;
        }
        push(2, e);
        let mut d = 3u64;
        while u128::from(d) * u128::from(d) <= m && d <= bound {
            let mut e = 0;
            while m % u128::from(d) == 0 {
                m /= u128::from(d);
                e += 1;
            }
            push(d, e);
            d += 2;
        }
        if m > 1 {
            if m <= u128::from(bound) * u128::from(bound) {
                // No factor up to bound divides m, so m is prime.
                push(m as u64, 1);
            } else {
                return Err(Error::IncompleteFactorization {
                    value: n.to_string(),
                    bound,
                });
            }
        }
        return Ok(out);
    }

    // BigInt path for out-of-word inputs.
    let mut m = n.abs();
    let mut d = BigInt::from(2u32);
    let bound_big = BigInt::from(bound);
    while &d * &d <= m && d <= bound_big {
        let mut e = 0u32;
        while (&m % &d).is_zero() {
            m /= &d;
            e += 1;
        }
        if e > 0 {
            out.push((d.to_u64().unwrap(), e));
        }
        d += if d == BigInt::from(2u32) { 1u32 } else { 2u32 };
    }
    if !m.is_one() {
        if m <= &bound_big * &bound_big {
            out.push((m.to_u64().unwrap(), 1));
        } else {
            return Err(Error::IncompleteFactorization {
                value: n.to_string(),
                bound,
            });
        }
    }
    Ok(out)
}

/// Squarefree kernel of an integer: the product of the primes appearing to
/// odd exponent, with the sign of the input.
fn squarefree_kernel(n: &BigInt, bound: u64) -> Result<BigInt> {
    let mut part = BigInt::one();
    for (p, e) in trial_factor(n, bound)? {
        if e % 2 == 1 {
            part *= BigInt::from(p);
        }
    }
    if n.is_negative() {
        part = -part;
    }
    Ok(part)
}

/// Squarefree part of a nonzero rational: the unique squarefree integer s
/// with x = s·r² for some rational r. The denominator is folded in by
/// multiplying by its square: n/d ≡ n·d mod squares.
pub fn squarefree_part(x: &Rational) -> Result<SquarefreeInt> {
    squarefree_part_with_bound(x, DEFAULT_FACTOR_BOUND)
}

/// As [`squarefree_part`], with an explicit trial-division bound.
pub fn squarefree_part_with_bound(x: &Rational, bound: u64) -> Result<SquarefreeInt> {
    if x.is_zero() {
        return Err(Error::ZeroValue("argument of squarefree_part"));
    }
    let product = x.numer() * x.denom();
    let part = squarefree_kernel(&product, bound)?;
    Ok(SquarefreeInt(part))
}

/// Squarefree part of a nonzero integer.
pub fn squarefree_part_int(n: &BigInt) -> Result<SquarefreeInt> {
    if n.is_zero() {
        return Err(Error::ZeroValue("argument of squarefree_part"));
    }
    let part = squarefree_kernel(n, DEFAULT_FACTOR_BOUND)?;
    Ok(SquarefreeInt(part))
}

/// Legendre symbol (a|p) for odd prime p, by Euler's criterion.
pub fn legendre(a: &BigInt, p: u64) -> Result<i32> {
    if p % 2 == 0 || !is_prime_u64(p) {
        return Err(Error::OddPrimeRequired(p));
    }
    let p_big = BigInt::from(p);
    let a_mod = a.mod_floor(&p_big);
    if a_mod.is_zero() {
        return Ok(0);
    }
    let r = a_mod.modpow(&BigInt::from((p - 1) / 2), &p_big);
    Ok(if r.is_one() { 1 } else { -1 })
}

/// (u-1)/2 mod 2 for an odd integer u, read off from u mod 4.
fn eps2(u: &BigInt) -> u32 {
    if u.mod_floor(&BigInt::from(4u32)) == BigInt::from(3u32) {
        1
    } else {
        0
    }
}

/// (u²-1)/8 mod 2 for an odd integer u, read off from u mod 8.
fn omega2(u: &BigInt) -> u32 {
    let r = u.mod_floor(&BigInt::from(8u32)).to_u32().unwrap();
    if r == 3 || r == 5 {
        1
    } else {
        0
    }
}

/// Hilbert symbol (a,b)_v: +1 iff z² = a·x² + b·y² has a nontrivial solution
/// over the completion of Q at v.
pub fn hilbert_symbol(a: &Rational, b: &Rational, v: Place) -> Result<i32> {
    if a.is_zero() || b.is_zero() {
        return Err(Error::ZeroValue("argument of hilbert_symbol"));
    }
    let sa = squarefree_part(a)?;
    let sb = squarefree_part(b)?;
    Ok(hilbert_squarefree(&sa, &sb, v))
}

/// Hilbert symbol on canonical square-class representatives. Squarefree
/// inputs have valuation 0 or 1 at every prime, so the standard
/// valuation/unit formulas collapse to a handful of cases.
pub fn hilbert_squarefree(a: &SquarefreeInt, b: &SquarefreeInt, v: Place) -> i32 {
    match v {
        Place::Real => {
            if a.is_negative() && b.is_negative() {
                -1
            } else {
                1
            }
        }
        Place::Prime(2) => {
            let (alpha, u) = split_valuation(a.value(), 2);
            let (beta, w) = split_valuation(b.value(), 2);
            let mut exp = eps2(&u) * eps2(&w);
            exp += alpha * omega2(&w);
            exp += beta * omega2(&u);
            if exp % 2 == 0 {
                1
            } else {
                -1
            }
        }
        Place::Prime(p) => {
            let (alpha, u) = split_valuation(a.value(), p);
            let (beta, w) = split_valuation(b.value(), p);
            let mut sym = 1;
            if alpha * beta == 1 && (p - 1) / 2 % 2 == 1 {
                sym = -sym;
            }
            if beta == 1 {
                sym *= legendre(&u, p).expect("p is an odd prime");
            }
            if alpha == 1 {
                sym *= legendre(&w, p).expect("p is an odd prime");
            }
            sym
        }
    }
}

/// For squarefree n: returns (v_p(n) ∈ {0,1}, unit part).
fn split_valuation(n: &BigInt, p: u64) -> (u32, BigInt) {
    let p_big = BigInt::from(p);
    if (n % &p_big).is_zero() {
        (1, n / &p_big)
    } else {
        (0, n.clone())
    }
}

/// The places where any Hilbert/Hasse datum built from these scalars can be
/// nontrivial: the real place, 2, and every prime dividing a numerator or
/// denominator.
pub fn relevant_places(entries: &[Rational]) -> Result<BTreeSet<Place>> {
    let mut places = BTreeSet::new();
    places.insert(Place::Real);
    places.insert(Place::Prime(2));
    for x in entries {
        if x.is_zero() {
            return Err(Error::ZeroValue("entry of relevant_places"));
        }
        for part in [x.numer(), x.denom()] {
            if part.is_one() {
                continue;
            }
            for (p, _) in trial_factor(part, DEFAULT_FACTOR_BOUND)? {
                places.insert(Place::Prime(p));
            }
        }
    }
    Ok(places)
}

/// Places relevant to a list of squarefree coefficients (the form-entry case).
pub(crate) fn relevant_places_squarefree(entries: &[&SquarefreeInt]) -> Result<BTreeSet<Place>> {
    let mut places = BTreeSet::new();
    places.insert(Place::Real);
    places.insert(Place::Prime(2));
    for x in entries {
        for (p, _) in trial_factor(x.value(), DEFAULT_FACTOR_BOUND)? {
            places.insert(Place::Prime(p));
        }
    }
    Ok(places)
}

/// True iff the squarefree integer is a square in the completion at v.
pub(crate) fn is_local_square(x: &SquarefreeInt, v: Place) -> bool {
    match v {
        Place::Real => !x.is_negative(),
        Place::Prime(2) => {
            // An odd 2-adic unit is a square iff it is 1 mod 8; odd valuation
            // is never a square.
            !x.divisible_by(2) && x.value().mod_floor(&BigInt::from(8u32)).is_one()
        }
        Place::Prime(p) => {
            !x.divisible_by(p) && legendre(x.value(), p).expect("p is an odd prime") == 1
        }
    }
}
