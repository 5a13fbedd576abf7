//! Exact scalar arithmetic: arbitrary-precision rationals, univariate
//! polynomials in the deformation parameter λ, and the factorial /
//! binomial primitives everything else is built from.
//!
//! Two coefficient modes share one [`Scalar`] contract:
//! * [`Rational`] — a fixed nonzero rational λ is supplied per call,
//! * [`LambdaPoly`] — λ is the indeterminate, so λ→0 limits are exact.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num::bigint::BigInt;
use num::rational::BigRational;
use num::traits::{One, Zero};
use thiserror::Error;

/// Arbitrary-precision rational. `num` keeps the denominator positive and
/// the fraction reduced after every operation.
pub type Rational = BigRational;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum KernelError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("inexact division")]
    NonDivisible,
    #[error("invalid rational literal `{0}`")]
    BadLiteral(String),
}

pub fn rat(num: i64, den: i64) -> Rational {
    assert!(den != 0, "zero denominator");
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn rat_int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Parses the canonical forms "p/q" and "p" (minus sign on the numerator).
pub fn parse_rational(s: &str) -> Result<Rational, KernelError> {
    let bad = || KernelError::BadLiteral(s.to_string());
    let t = s.trim();
    match t.split_once('/') {
        Some((p, q)) => {
            let p: BigInt = p.trim().parse().map_err(|_| bad())?;
            let q: BigInt = q.trim().parse().map_err(|_| bad())?;
            if q.is_zero() {
                return Err(bad());
            }
            Ok(Rational::new(p, q))
        }
        None => {
            let p: BigInt = t.parse().map_err(|_| bad())?;
            Ok(Rational::from_integer(p))
        }
    }
}

/// Canonical form: "p/q", or "p" when the denominator is 1.
pub fn format_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn factorial(n: u32) -> BigInt {
    let mut acc = BigInt::one();
    for i in 2..=n {
        acc *= BigInt::from(i);
    }
    acc
}

pub fn factorial_rat(n: u32) -> Rational {
    Rational::from_integer(factorial(n))
}

/// Ordinary binomial coefficient with nonnegative integer arguments.
pub fn integer_binomial(n: u32, k: u32) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    num::integer::binomial(BigInt::from(n), BigInt::from(k))
}

/// The exact coefficient ring shared by both λ modes: commutative,
/// characteristic zero, with exact division wherever a quotient exists
/// in the ring.
pub trait Scalar:
    Clone
    + PartialEq
    + fmt::Debug
    + fmt::Display
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
    + Zero
    + One
{
    fn from_int(n: i64) -> Self;
    fn from_rational(r: &Rational) -> Self;
    /// Exact division: `Ok(q)` with `q * d == self`, or `NonDivisible`
    /// when no such ring element exists.
    fn div_exact(&self, d: &Self) -> Result<Self, KernelError>;
    /// True for invertible elements (nonzero constants).
    fn is_unit(&self) -> bool;
    /// Serialized form: "p/q" for rationals, a JSON array of rational
    /// strings (lowest degree first) for λ-polynomials.
    fn canonical_string(&self) -> String;
}

impl Scalar for Rational {
    fn from_int(n: i64) -> Self {
        rat_int(n)
    }

    fn from_rational(r: &Rational) -> Self {
        r.clone()
    }

    fn div_exact(&self, d: &Self) -> Result<Self, KernelError> {
        if d.is_zero() {
            return Err(KernelError::DivisionByZero);
        }
        Ok(self / d)
    }

    fn is_unit(&self) -> bool {
        !self.is_zero()
    }

    fn canonical_string(&self) -> String {
        format_rational(self)
    }
}

/// Dense univariate polynomial in λ over the rationals, lowest degree
/// first, trailing zeros trimmed (the zero polynomial stores nothing).
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct LambdaPoly {
    coeffs: Vec<Rational>,
}

impl LambdaPoly {
    pub fn from_coeffs(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().map_or(false, |c| c.is_zero()) {
            coeffs.pop();
        }
        LambdaPoly { coeffs }
    }

    pub fn constant(r: Rational) -> Self {
        Self::from_coeffs(vec![r])
    }

    /// The indeterminate λ itself.
    pub fn lambda() -> Self {
        LambdaPoly {
            coeffs: vec![Rational::zero(), Rational::one()],
        }
    }

    pub fn degree(&self) -> Option<usize> {
        if self.coeffs.is_empty() {
            None
        } else {
            Some(self.coeffs.len() - 1)
        }
    }

    pub fn coeff(&self, i: usize) -> Rational {
        self.coeffs.get(i).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn eval(&self, at: &Rational) -> Rational {
        let mut acc = Rational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * at + c;
        }
        acc
    }

    /// JSON array of canonical rational strings, lowest degree first.
    pub fn json_array_string(&self) -> String {
        let parts: Vec<String> = self
            .coeffs
            .iter()
            .map(|c| format!("\"{}\"", format_rational(c)))
            .collect();
        format!("[{}]", parts.join(","))
    }
}

impl Add for LambdaPoly {
    type Output = LambdaPoly;
    fn add(self, rhs: LambdaPoly) -> LambdaPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            out.push(self.coeff(i) + rhs.coeff(i));
        }
        LambdaPoly::from_coeffs(out)
    }
}

impl Sub for LambdaPoly {
    type Output = LambdaPoly;
    fn sub(self, rhs: LambdaPoly) -> LambdaPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            out.push(self.coeff(i) - rhs.coeff(i));
        }
        LambdaPoly::from_coeffs(out)
    }
}

impl Neg for LambdaPoly {
    type Output = LambdaPoly;
    fn neg(self) -> LambdaPoly {
        LambdaPoly {
            coeffs: self.coeffs.into_iter().map(|c| -c).collect(),
        }
    }
}

impl Mul for LambdaPoly {
    type Output = LambdaPoly;
    fn mul(self, rhs: LambdaPoly) -> LambdaPoly {
        if self.coeffs.is_empty() || rhs.coeffs.is_empty() {
            return LambdaPoly::zero();
        }
        let mut out = vec![Rational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        LambdaPoly::from_coeffs(out)
    }
}

impl Zero for LambdaPoly {
    fn zero() -> Self {
        LambdaPoly { coeffs: Vec::new() }
    }
    fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }
}

impl One for LambdaPoly {
    fn one() -> Self {
        LambdaPoly::constant(Rational::one())
    }
}

impl fmt::Display for LambdaPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let neg = c < &Rational::zero();
            let mag = if neg { -c.clone() } else { c.clone() };
            if first {
                if neg {
                    write!(f, "-")?;
                }
                first = false;
            } else if neg {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let unit_mag = mag.is_one();
            if i == 0 || !unit_mag {
                write!(f, "{}", format_rational(&mag))?;
            }
            match i {
                0 => {}
                1 => write!(f, "λ")?,
                _ => write!(f, "λ^{}", i)?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

impl Scalar for LambdaPoly {
    fn from_int(n: i64) -> Self {
        LambdaPoly::constant(rat_int(n))
    }

    fn from_rational(r: &Rational) -> Self {
        LambdaPoly::constant(r.clone())
    }

    fn div_exact(&self, d: &Self) -> Result<Self, KernelError> {
        if d.is_zero() {
            return Err(KernelError::DivisionByZero);
        }
        if self.is_zero() {
            return Ok(LambdaPoly::zero());
        }
        if d.is_constant() {
            let d0 = &d.coeffs[0];
            return Ok(LambdaPoly {
                coeffs: self.coeffs.iter().map(|c| c / d0).collect(),
            });
        }
        let dd = d.degree().unwrap();
        let sd = self.degree().unwrap();
        if sd < dd {
            return Err(KernelError::NonDivisible);
        }
        let lead = d.coeffs[dd].clone();
        let mut rem = self.coeffs.clone();
        let mut q = vec![Rational::zero(); sd - dd + 1];
        for i in (dd..=sd).rev() {
            let c = &rem[i] / &lead;
            if !c.is_zero() {
                for j in 0..=dd {
                    let delta = &c * &d.coeffs[j];
                    rem[i - dd + j] -= delta;
                }
            }
            q[i - dd] = c;
        }
        if rem.iter().any(|c| !c.is_zero()) {
            return Err(KernelError::NonDivisible);
        }
        Ok(LambdaPoly::from_coeffs(q))
    }

    fn is_unit(&self) -> bool {
        self.is_constant() && !self.is_zero()
    }

    fn canonical_string(&self) -> String {
        self.json_array_string()
    }
}

/// Exact division of a λ-polynomial by λ. Errors with `NonDivisible` when
/// the constant term is nonzero, i.e. when a closed form was applied
/// outside its validity.
pub fn div_exact_lambda(p: &LambdaPoly) -> Result<LambdaPoly, KernelError> {
    if p.is_zero() {
        return Ok(LambdaPoly::zero());
    }
    if !p.coeffs[0].is_zero() {
        return Err(KernelError::NonDivisible);
    }
    Ok(LambdaPoly {
        coeffs: p.coeffs[1..].to_vec(),
    })
}

/// (x)_{n,λ} = x(x−λ)(x−2λ)⋯(x−(n−1)λ); the empty product for n = 0.
pub fn falling_factorial_deg<S: Scalar>(x: &S, n: u32, lambda: &S) -> S {
    let mut acc = S::one();
    for j in 0..n {
        acc = acc * (x.clone() - lambda.clone() * S::from_int(j as i64));
    }
    acc
}

/// (x)_n = x(x−1)⋯(x−n+1).
pub fn falling_factorial<S: Scalar>(x: &S, n: u32) -> S {
    falling_factorial_deg(x, n, &S::one())
}

/// ⟨α⟩_k = α(α+1)⋯(α+k−1).
pub fn rising_factorial<S: Scalar>(a: &S, k: u32) -> S {
    let mut acc = S::one();
    for j in 0..k {
        acc = acc * (a.clone() + S::from_int(j as i64));
    }
    acc
}

/// Generalized binomial coefficient: (q choose k) = (q)_k / k!.
/// The division by k! is always exact in characteristic zero.
pub fn binomial_general<S: Scalar>(q: &S, k: u32) -> S {
    falling_factorial(q, k)
        .div_exact(&S::from_rational(&factorial_rat(k)))
        .expect("division by k! is exact")
}
