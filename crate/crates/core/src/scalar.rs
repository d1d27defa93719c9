//! Exact scalars: rationals, the prime field Z/pZ and the reduction map between them.

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Arbitrary precision rational number, always in lowest terms with positive denominator.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Rational(BigRational);

impl Rational {
    pub fn new(num: impl Into<BigInt>, den: impl Into<BigInt>) -> Self {
        let den = den.into();
        assert!(!den.is_zero(), "zero denominator");
        Rational(BigRational::new(num.into(), den))
    }

    pub fn from_int(n: impl Into<BigInt>) -> Self {
        Rational(BigRational::from_integer(n.into()))
    }

    pub fn zero() -> Self {
        Rational(BigRational::zero())
    }

    pub fn one() -> Self {
        Rational(BigRational::one())
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

    pub fn is_one(&self) -> bool {
        self.0.is_one()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn abs(&self) -> Self {
        Rational(self.0.abs())
    }

    pub fn recip(&self) -> Self {
        Rational(self.0.recip())
    }

    pub fn pow(&self, e: i32) -> Self {
        Rational(num_traits::Pow::pow(&self.0, e))
    }

    pub fn to_i64(&self) -> Option<i64> {
        if self.is_integer() {
            self.numer().to_i64()
        } else {
            None
        }
    }

    pub fn as_big(&self) -> &BigRational {
        &self.0
    }

    /// n! as a rational.
    pub fn factorial(n: u64) -> Self {
        let mut acc = BigInt::one();
        for k in 2..=n {
            acc *= k;
        }
        Rational::from_int(acc)
    }
}

impl From<i64> for Rational {
    fn from(n: i64) -> Self {
        Rational::from_int(n)
    }
}

impl From<i32> for Rational {
    fn from(n: i32) -> Self {
        Rational::from_int(n)
    }
}

impl From<BigInt> for Rational {
    fn from(n: BigInt) -> Self {
        Rational::from_int(n)
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Rational {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::Parse(format!("not a rational: {s:?}"));
        match s.split_once('/') {
            None => Ok(Rational::from_int(BigInt::from_str(s).map_err(|_| bad())?)),
            Some((n, d)) => {
                let n = BigInt::from_str(n.trim()).map_err(|_| bad())?;
                let d = BigInt::from_str(d.trim()).map_err(|_| bad())?;
                if d.is_zero() {
                    return Err(bad());
                }
                Ok(Rational::new(n, d))
            }
        }
    }
}

macro_rules! rational_binop {
    ($tr:ident, $m:ident, $atr:ident, $am:ident) => {
        impl $tr<&Rational> for &Rational {
            type Output = Rational;
            fn $m(self, rhs: &Rational) -> Rational {
                Rational((&self.0).$m(&rhs.0))
            }
        }
        impl $tr<Rational> for Rational {
            type Output = Rational;
            fn $m(self, rhs: Rational) -> Rational {
                Rational(self.0.$m(rhs.0))
            }
        }
        impl $tr<&Rational> for Rational {
            type Output = Rational;
            fn $m(self, rhs: &Rational) -> Rational {
                Rational(self.0.$m(&rhs.0))
            }
        }
        impl $atr<&Rational> for Rational {
            fn $am(&mut self, rhs: &Rational) {
                self.0.$am(&rhs.0);
            }
        }
        impl $atr<Rational> for Rational {
            fn $am(&mut self, rhs: Rational) {
                self.0.$am(rhs.0);
            }
        }
    };
}

rational_binop!(Add, add, AddAssign, add_assign);
rational_binop!(Sub, sub, SubAssign, sub_assign);
rational_binop!(Mul, mul, MulAssign, mul_assign);

impl Div<&Rational> for &Rational {
    type Output = Rational;
    fn div(self, rhs: &Rational) -> Rational {
        assert!(!rhs.is_zero(), "division by zero");
        Rational(&self.0 / &rhs.0)
    }
}

impl Div<Rational> for Rational {
    type Output = Rational;
    fn div(self, rhs: Rational) -> Rational {
        &self / &rhs
    }
}

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-self.0)
    }
}

impl Neg for &Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-&self.0)
    }
}

impl std::iter::Sum for Rational {
    fn sum<I: Iterator<Item = Rational>>(iter: I) -> Self {
        iter.fold(Rational::zero(), |a, b| a + b)
    }
}

/// Element of Z/pZ. Carries its modulus; arithmetic between different moduli panics.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct FpElem {
    value: u64,
    modulus: u64,
}

impl FpElem {
    pub fn new(value: i64, modulus: u64) -> Self {
        let m = modulus as i64;
        FpElem { value: value.rem_euclid(m) as u64, modulus }
    }

    pub fn value(&self) -> u64 {
        self.value
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn is_zero(&self) -> bool {
        self.value == 0
    }

    /// Symmetric representative in (−p/2, p/2].
    pub fn signed(&self) -> i64 {
        if self.value > self.modulus / 2 {
            self.value as i64 - self.modulus as i64
        } else {
            self.value as i64
        }
    }

    fn check(&self, other: &FpElem) {
        assert_eq!(self.modulus, other.modulus, "mixing elements of Z/{}Z and Z/{}Z", self.modulus, other.modulus);
    }

    pub fn pow(&self, mut e: u64) -> FpElem {
        let p = self.modulus;
        let mut base = self.value % p;
        let mut acc = 1 % p;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base % p;
            }
            base = base * base % p;
            e >>= 1;
        }
        FpElem { value: acc, modulus: p }
    }

    /// Inverse by Fermat's little theorem; `None` for zero.
    pub fn inv(&self) -> Option<FpElem> {
        if self.value == 0 {
            None
        } else {
            Some(self.pow(self.modulus - 2))
        }
    }
}

impl fmt::Display for FpElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

impl Add for FpElem {
    type Output = FpElem;
    fn add(self, rhs: FpElem) -> FpElem {
        self.check(&rhs);
        FpElem { value: (self.value + rhs.value) % self.modulus, modulus: self.modulus }
    }
}

impl Sub for FpElem {
    type Output = FpElem;
    fn sub(self, rhs: FpElem) -> FpElem {
        self.check(&rhs);
        FpElem { value: (self.value + self.modulus - rhs.value) % self.modulus, modulus: self.modulus }
    }
}

impl Mul for FpElem {
    type Output = FpElem;
    fn mul(self, rhs: FpElem) -> FpElem {
        self.check(&rhs);
        FpElem { value: self.value * rhs.value % self.modulus, modulus: self.modulus }
    }
}

impl Neg for FpElem {
    type Output = FpElem;
    fn neg(self) -> FpElem {
        FpElem { value: (self.modulus - self.value) % self.modulus, modulus: self.modulus }
    }
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// An odd prime p ≥ 5 together with N_p = (p−3)/2 and a factorial table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrimeContext {
    p: u64,
    factorials: Vec<u64>,
}

impl PrimeContext {
    pub fn new(p: u64) -> Result<Self> {
        if p < 5 || !is_prime(p) || p > (1 << 31) {
            return Err(Error::NotPrime(p));
        }
        let mut factorials = Vec::with_capacity(p as usize);
        let mut acc = 1u64;
        for k in 0..p {
            if k > 0 {
                acc = acc * k % p;
            }
            factorials.push(acc);
        }
        Ok(PrimeContext { p, factorials })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn n_p(&self) -> usize {
        ((self.p - 3) / 2) as usize
    }

    pub fn elem(&self, v: i64) -> FpElem {
        FpElem::new(v, self.p)
    }

    /// k! mod p for k < p.
    pub fn factorial(&self, k: usize) -> FpElem {
        assert!((k as u64) < self.p, "factorial argument {k} not below p = {}", self.p);
        FpElem { value: self.factorials[k], modulus: self.p }
    }

    pub fn inv_factorial(&self, k: usize) -> FpElem {
        self.factorial(k).inv().expect("k! is a unit for k < p")
    }

    pub fn reduce_int(&self, n: &BigInt) -> FpElem {
        let r = n.mod_floor(&BigInt::from(self.p));
        FpElem { value: r.to_u64().unwrap(), modulus: self.p }
    }
}

/// ψ_p: Q_p → Z/pZ.
pub fn psi_p(q: &Rational, ctx: &PrimeContext) -> Result<FpElem> {
    let pb = BigInt::from(ctx.p);
    if q.denom().is_multiple_of(&pb) {
        return Err(Error::DenominatorDivisibleByP { p: ctx.p, degree: None });
    }
    let n = ctx.reduce_int(q.numer());
    let d = ctx.reduce_int(q.denom());
    Ok(n * d.inv().unwrap())
}

/// Legendre symbol (f/p).
pub fn legendre(f: i64, ctx: &PrimeContext) -> i8 {
    let a = ctx.elem(f);
    if a.is_zero() {
        return 0;
    }
    let e = a.pow((ctx.p - 1) / 2);
    if e.value == 1 {
        1
    } else {
        -1
    }
}

/// ε_p(i): −1 when (p−1) | i, else 0.
pub fn epsilon_p(i: u64, ctx: &PrimeContext) -> FpElem {
    if i % (ctx.p - 1) == 0 {
        ctx.elem(-1)
    } else {
        ctx.elem(0)
    }
}

/// Σ_{k=0}^{p−2} (k+1)^i mod p.
pub fn power_sum(i: u64, ctx: &PrimeContext) -> FpElem {
    (1..ctx.p).fold(ctx.elem(0), |acc, x| acc + ctx.elem(x as i64).pow(i))
}

/// Σ over even k in 0..=p−2 of (k+1)^{2i} mod p.
pub fn even_power_sum(i: u64, ctx: &PrimeContext) -> FpElem {
    (1..ctx.p).step_by(2).fold(ctx.elem(0), |acc, x| acc + ctx.elem(x as i64).pow(2 * i))
}

/// Both sides of 1/(N_p−k)! ≡ (1/(N_p+1)!)(−1/4)^{k+1}(2k+2)!/(k+1)! mod p.
pub fn factorial_inverse_identity(k: usize, ctx: &PrimeContext) -> Result<(FpElem, FpElem)> {
    let n = ctx.n_p();
    if k > n {
        return Err(Error::OutOfRange(format!("k = {k} exceeds N_p = {n}")));
    }
    let lhs = ctx.inv_factorial(n - k);
    let quarter = ctx.elem(-1) * ctx.elem(4).inv().unwrap();
    let rhs = ctx.inv_factorial(n + 1)
        * quarter.pow(k as u64 + 1)
        * ctx.factorial(2 * k + 2)
        * ctx.inv_factorial(k + 1);
    Ok((lhs, rhs))
}

/// Scalar field abstraction shared by the skein and weight-system layers.
pub trait Field: Clone + Send + Sync {
    type Elem: Clone + PartialEq + fmt::Debug + fmt::Display + Send + Sync;

    fn characteristic(&self) -> u64;
    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn from_i64(&self, n: i64) -> Self::Elem;
    fn from_rational(&self, q: &Rational) -> Result<Self::Elem>;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn inv(&self, a: &Self::Elem) -> Option<Self::Elem>;
    fn is_zero(&self, a: &Self::Elem) -> bool;

    /// Largest Jones-Wenzl index available (p−2 in characteristic p).
    fn max_color(&self) -> Option<usize> {
        match self.characteristic() {
            0 => None,
            p => Some(p as usize - 2),
        }
    }

    fn div(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        self.mul(a, &self.inv(b).expect("division by zero"))
    }
}

/// The rationals as a [`Field`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Rationals;

impl Field for Rationals {
    type Elem = Rational;

    fn characteristic(&self) -> u64 {
        0
    }
    fn zero(&self) -> Rational {
        Rational::zero()
    }
    fn one(&self) -> Rational {
        Rational::one()
    }
    fn from_i64(&self, n: i64) -> Rational {
        Rational::from(n)
    }
    fn from_rational(&self, q: &Rational) -> Result<Rational> {
        Ok(q.clone())
    }
    fn add(&self, a: &Rational, b: &Rational) -> Rational {
        a + b
    }
    fn sub(&self, a: &Rational, b: &Rational) -> Rational {
        a - b
    }
    fn mul(&self, a: &Rational, b: &Rational) -> Rational {
        a * b
    }
    fn neg(&self, a: &Rational) -> Rational {
        -a
    }
    fn inv(&self, a: &Rational) -> Option<Rational> {
        (!a.is_zero()).then(|| a.recip())
    }
    fn is_zero(&self, a: &Rational) -> bool {
        a.is_zero()
    }
}

impl Field for PrimeContext {
    type Elem = FpElem;

    fn characteristic(&self) -> u64 {
        self.p
    }
    fn zero(&self) -> FpElem {
        self.elem(0)
    }
    fn one(&self) -> FpElem {
        self.elem(1)
    }
    fn from_i64(&self, n: i64) -> FpElem {
        self.elem(n)
    }
    fn from_rational(&self, q: &Rational) -> Result<FpElem> {
        psi_p(q, self)
    }
    fn add(&self, a: &FpElem, b: &FpElem) -> FpElem {
        *a + *b
    }
    fn sub(&self, a: &FpElem, b: &FpElem) -> FpElem {
        *a - *b
    }
    fn mul(&self, a: &FpElem, b: &FpElem) -> FpElem {
        *a * *b
    }
    fn neg(&self, a: &FpElem) -> FpElem {
        -*a
    }
    fn inv(&self, a: &FpElem) -> Option<FpElem> {
        a.inv()
    }
    fn is_zero(&self, a: &FpElem) -> bool {
        a.is_zero()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx(p: u64) -> PrimeContext {
        PrimeContext::new(p).unwrap()
    }

    #[test]
    fn psi_examples() {
        assert_eq!(psi_p(&Rational::zero(), &ctx(7)).unwrap().value(), 0);
        assert_eq!(psi_p(&Rational::new(3, 5), &ctx(7)).unwrap().value(), 2);
        assert!(matches!(
            psi_p(&Rational::new(1, 5), &ctx(5)),
            Err(Error::DenominatorDivisibleByP { p: 5, .. })
        ));
    }

    #[test]
    fn legendre_examples() {
        assert_eq!(legendre(2, &ctx(7)), 1);
        assert_eq!(legendre(3, &ctx(5)), -1);
        assert_eq!(legendre(14, &ctx(7)), 0);
        assert_eq!(legendre(-1, &ctx(7)), -1);
    }

    #[test]
    fn epsilon_and_power_sums() {
        let c7 = ctx(7);
        assert_eq!(epsilon_p(6, &c7).value(), 6);
        assert_eq!(epsilon_p(4, &c7).value(), 0);
        assert_eq!(epsilon_p(0, &c7).value(), 6);
        assert_eq!(power_sum(6, &c7).value(), 6);
        assert_eq!(power_sum(2, &ctx(5)).value(), 0);
        assert_eq!(power_sum(0, &c7).value(), 6);
        assert_eq!(even_power_sum(3, &c7).value(), 3);
        assert_eq!(even_power_sum(1, &c7).value(), 0);
        assert_eq!(even_power_sum(0, &ctx(5)).value(), 2);
    }

    #[test]
    fn factorial_identity_examples() {
        let (l, r) = factorial_inverse_identity(0, &ctx(7)).unwrap();
        assert_eq!((l.value(), r.value()), (4, 4));
        let (l, _) = factorial_inverse_identity(4, &ctx(11)).unwrap();
        assert_eq!(l.value(), 1);
        let (l, r) = factorial_inverse_identity(1, &ctx(11)).unwrap();
        assert_eq!(l, r);
        assert!(factorial_inverse_identity(5, &ctx(11)).is_err());
    }

    #[test]
    fn rational_text() {
        let q: Rational = "-6/4".parse().unwrap();
        assert_eq!(q.to_string(), "-3/2");
        assert_eq!(Rational::from(5).to_string(), "5");
        assert!("1/0".parse::<Rational>().is_err());
    }

    #[test]
    #[should_panic(expected = "mixing")]
    fn mixed_moduli_panic() {
        let _ = FpElem::new(1, 5) + FpElem::new(1, 7);
    }

    #[test]
    fn rejects_small_or_composite() {
        assert!(PrimeContext::new(3).is_err());
        assert!(PrimeContext::new(9).is_err());
    }
}
