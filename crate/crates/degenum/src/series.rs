//! Truncated formal power series over an exact coefficient ring.
//!
//! A series stores ordinary coefficients 0..=order and is known exactly
//! modulo t^{order+1}. The EGF view (n!·coefficient) is derived, never
//! stored. Variable labels are checked, not coerced: the families here
//! juggle t, x and y, and silent mixing is the main bug risk.

use std::fmt;


use serde_json::json;
use thiserror::Error;

use crate::kernel::{
    binomial_general, factorial_rat, falling_factorial_deg, KernelError, Scalar,
};

/// Label of the formal variable.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Var {
    T,
    X,
    Y,
    U,
}

impl Var {
    pub fn name(self) -> &'static str {
        match self {
            Var::T => "t",
            Var::X => "x",
            Var::Y => "y",
            Var::U => "u",
        }
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SeriesError {
    #[error("variable mismatch: {left} vs {right}")]
    VarMismatch { left: Var, right: Var },
    #[error("constant term of the divisor is not a unit")]
    NonUnitConstantTerm,
    #[error("inner series has a nonzero constant term")]
    NonzeroInnerConstant,
    #[error("index {wanted} exceeds truncation order {order}")]
    OrderExhausted { wanted: usize, order: usize },
    #[error(transparent)]
    Kernel(#[from] KernelError),
}

#[derive(Clone, PartialEq, Debug)]
pub struct PowerSeries<S: Scalar> {
    var: Var,
    coeffs: Vec<S>, // length = order + 1
}

impl<S: Scalar> PowerSeries<S> {
    pub fn from_coeffs(var: Var, coeffs: Vec<S>) -> Self {
        assert!(!coeffs.is_empty(), "a series needs at least the constant term");
        PowerSeries { var, coeffs }
    }

    /// coeffs[n] = f(n) for n = 0..=order.
    pub fn from_fn(var: Var, order: usize, f: impl Fn(usize) -> S) -> Self {
        PowerSeries {
            var,
            coeffs: (0..=order).map(f).collect(),
        }
    }

    pub fn zero(var: Var, order: usize) -> Self {
        Self::from_fn(var, order, |_| S::zero())
    }

    pub fn one(var: Var, order: usize) -> Self {
        Self::constant(var, order, S::one())
    }

    pub fn constant(var: Var, order: usize, c: S) -> Self {
        Self::from_fn(var, order, |n| if n == 0 { c.clone() } else { S::zero() })
    }

    /// The series t itself.
    pub fn identity(var: Var, order: usize) -> Self {
        Self::from_fn(var, order, |n| if n == 1 { S::one() } else { S::zero() })
    }

    pub fn var(&self) -> Var {
        self.var
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, n: usize) -> &S {
        &self.coeffs[n]
    }

    pub fn coeffs(&self) -> &[S] {
        &self.coeffs
    }

    pub fn truncated(&self, order: usize) -> Self {
        let order = order.min(self.order());
        PowerSeries {
            var: self.var,
            coeffs: self.coeffs[..=order].to_vec(),
        }
    }

    fn check_var(&self, other: &Self) -> Result<(), SeriesError> {
        if self.var != other.var {
            return Err(SeriesError::VarMismatch {
                left: self.var,
                right: other.var,
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self, SeriesError> {
        self.check_var(other)?;
        let order = self.order().min(other.order());
        Ok(Self::from_fn(self.var, order, |n| {
            self.coeffs[n].clone() + other.coeffs[n].clone()
        }))
    }

    pub fn sub(&self, other: &Self) -> Result<Self, SeriesError> {
        self.check_var(other)?;
        let order = self.order().min(other.order());
        Ok(Self::from_fn(self.var, order, |n| {
            self.coeffs[n].clone() - other.coeffs[n].clone()
        }))
    }

    pub fn neg(&self) -> Self {
        Self::from_fn(self.var, self.order(), |n| -self.coeffs[n].clone())
    }

    pub fn scale(&self, c: &S) -> Self {
        Self::from_fn(self.var, self.order(), |n| {
            c.clone() * self.coeffs[n].clone()
        })
    }

    /// Adds a constant without changing the order.
    pub fn add_constant(&self, c: &S) -> Self {
        let mut out = self.clone();
        out.coeffs[0] = out.coeffs[0].clone() + c.clone();
        out
    }

    /// Cauchy product, truncated at the smaller order.
    pub fn mul(&self, other: &Self) -> Result<Self, SeriesError> {
        self.check_var(other)?;
        let order = self.order().min(other.order());
        let mut out = vec![S::zero(); order + 1];
        for (i, a) in self.coeffs.iter().take(order + 1).enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().take(order + 1 - i).enumerate() {
                if b.is_zero() {
                    continue;
                }
                out[i + j] = out[i + j].clone() + a.clone() * b.clone();
            }
        }
        Ok(PowerSeries {
            var: self.var,
            coeffs: out,
        })
    }

    /// self^k at this order.
    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::one(self.var, self.order());
        for _ in 0..k {
            acc = acc.mul(self).expect("same variable");
        }
        acc
    }

    /// q with q·b = a modulo t^{order+1}; b must have a unit constant term.
    pub fn div(&self, b: &Self) -> Result<Self, SeriesError> {
        self.check_var(b)?;
        if !b.coeffs[0].is_unit() {
            return Err(SeriesError::NonUnitConstantTerm);
        }
        let order = self.order().min(b.order());
        let mut q = vec![S::zero(); order + 1];
        for n in 0..=order {
            let mut acc = self.coeffs[n].clone();
            for j in 1..=n {
                if b.coeffs[j].is_zero() || q[n - j].is_zero() {
                    continue;
                }
                acc = acc - b.coeffs[j].clone() * q[n - j].clone();
            }
            q[n] = acc.div_exact(&b.coeffs[0])?;
        }
        Ok(PowerSeries {
            var: self.var,
            coeffs: q,
        })
    }

    /// f(g) for g with zero constant term; exact modulo t^{order+1} where
    /// order = min(order(f), order(g)). The result carries g's variable.
    pub fn compose(f: &Self, g: &Self) -> Result<Self, SeriesError> {
        if !g.coeffs[0].is_zero() {
            return Err(SeriesError::NonzeroInnerConstant);
        }
        let order = f.order().min(g.order());
        Ok(compose_coeffs(
            &f.coeffs[..=order],
            &g.truncated(order),
        ))
    }

    /// (1+u)^q = Σ_k (q choose k) u^k for u with zero constant term.
    pub fn binom_pow(u: &Self, q: &S) -> Result<Self, SeriesError> {
        if !u.coeffs[0].is_zero() {
            return Err(SeriesError::NonzeroInnerConstant);
        }
        let coeffs: Vec<S> = (0..=u.order())
            .map(|k| binomial_general(q, k as u32))
            .collect();
        Ok(compose_coeffs(&coeffs, u))
    }

    /// log_λ(1+u). The coefficient route divides by k! only, never by λ,
    /// so it is total in both coefficient modes:
    /// log_λ(1+t) = Σ_{k≥1} c_k t^k with c_k = (1/k!)·Π_{j=1}^{k−1}(λ−j).
    pub fn deg_log(u: &Self, lambda: &S) -> Result<Self, SeriesError> {
        if !u.coeffs[0].is_zero() {
            return Err(SeriesError::NonzeroInnerConstant);
        }
        let order = u.order();
        let mut coeffs = vec![S::zero(); order + 1];
        let mut prod = S::one();
        for k in 1..=order {
            if k > 1 {
                prod = prod * (lambda.clone() - S::from_int(k as i64 - 1));
            }
            coeffs[k] = prod
                .div_exact(&S::from_rational(&factorial_rat(k as u32)))
                .expect("division by k! is exact");
        }
        Ok(compose_coeffs(&coeffs, u))
    }

    /// e_λ^x(u) = Σ_n (x)_{n,λ}/n! · u^n for u with zero constant term.
    pub fn deg_exp(u: &Self, x: &S, lambda: &S) -> Result<Self, SeriesError> {
        if !u.coeffs[0].is_zero() {
            return Err(SeriesError::NonzeroInnerConstant);
        }
        let coeffs: Vec<S> = (0..=u.order())
            .map(|n| {
                falling_factorial_deg(x, n as u32, lambda)
                    .div_exact(&S::from_rational(&factorial_rat(n as u32)))
                    .expect("division by n! is exact")
            })
            .collect();
        Ok(compose_coeffs(&coeffs, u))
    }

    /// (Θ)_{k,λ} with Θ = t·d/dt: maps Σ aₙtⁿ to Σ (n)_{k,λ} aₙ tⁿ.
    pub fn theta_falling(&self, k: u32, lambda: &S) -> Self {
        Self::from_fn(self.var, self.order(), |n| {
            falling_factorial_deg(&S::from_int(n as i64), k, lambda) * self.coeffs[n].clone()
        })
    }

    /// k-th formal derivative; the order drops by k.
    pub fn derive(&self, k: u32) -> Result<Self, SeriesError> {
        let k = k as usize;
        if k > self.order() {
            return Err(SeriesError::OrderExhausted {
                wanted: k,
                order: self.order(),
            });
        }
        let mut cur = self.clone();
        for _ in 0..k {
            let order = cur.order() - 1;
            cur = Self::from_fn(cur.var, order, |n| {
                S::from_int(n as i64 + 1) * cur.coeffs[n + 1].clone()
            });
        }
        Ok(cur)
    }

    /// n! · (ordinary coefficient n) — the t^n/n! reading.
    pub fn egf_coeff(&self, n: usize) -> Result<S, SeriesError> {
        if n > self.order() {
            return Err(SeriesError::OrderExhausted {
                wanted: n,
                order: self.order(),
            });
        }
        Ok(S::from_rational(&factorial_rat(n as u32)) * self.coeffs[n].clone())
    }

    /// [1, s, s², ..], each truncated at this series' order.
    pub fn powers(&self, upto: usize) -> Vec<Self> {
        let mut out = Vec::with_capacity(upto + 1);
        out.push(Self::one(self.var, self.order()));
        for k in 1..=upto {
            let next = out[k - 1].mul(self).expect("same variable");
            out.push(next);
        }
        out
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> PowerSeries<T> {
        PowerSeries {
            var: self.var,
            coeffs: self.coeffs.iter().map(f).collect(),
        }
    }

    /// "1 + t + (1 - λ)/2 t^2 + O(t^3)" style rendering.
    pub fn pretty(&self) -> String {
        let v = self.var.name();
        let mut out = String::new();
        for (n, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let s = c.to_string();
            let (neg, mag) = match s.strip_prefix('-') {
                // a leading '-' on a one-term coefficient moves into the sign
                Some(rest) if !rest.contains(" + ") && !rest.contains(" - ") => {
                    (true, rest.to_string())
                }
                _ => (false, s),
            };
            if out.is_empty() {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let atomic = !mag.contains(' ');
            let coeff_part = if n > 0 && mag == "1" {
                String::new()
            } else if atomic {
                mag
            } else {
                format!("({})", mag)
            };
            out.push_str(&coeff_part);
            if n > 0 {
                if !coeff_part.is_empty() {
                    out.push(' ');
                }
                out.push_str(v);
                if n > 1 {
                    out.push_str(&format!("^{}", n));
                }
            }
        }
        if out.is_empty() {
            out.push('0');
        }
        out.push_str(&format!(" + O({}^{})", v, self.order() + 1));
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "varname": self.var.name(),
            "order": self.order(),
            "coeffs": self.coeffs.iter().map(|c| c.canonical_string()).collect::<Vec<_>>(),
        })
    }
}

/// Horner evaluation of Σ coeffs[k]·g^k; g must have zero constant term
/// (checked by callers).
fn compose_coeffs<S: Scalar>(coeffs: &[S], g: &PowerSeries<S>) -> PowerSeries<S> {
    let mut acc = PowerSeries::zero(g.var, g.order());
    for c in coeffs.iter().rev() {
        acc = acc.mul(g).expect("same variable");
        acc.coeffs[0] = acc.coeffs[0].clone() + c.clone();
    }
    acc
}

/// 1/(1−t) at the given order.
pub fn geometric<S: Scalar>(var: Var, order: usize) -> PowerSeries<S> {
    PowerSeries::from_fn(var, order, |_| S::one())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::{rat, rat_int, LambdaPoly, Rational};
    use num::traits::{One, Zero};
    use proptest::prelude::*;

    fn rs(coeffs: &[(i64, i64)]) -> PowerSeries<Rational> {
        PowerSeries::from_coeffs(Var::T, coeffs.iter().map(|&(n, d)| rat(n, d)).collect())
    }

    #[test]
    fn mul_examples() {
        // (1+t)(1−t) = 1 − t²
        let a = rs(&[(1, 1), (1, 1), (0, 1)]);
        let b = rs(&[(1, 1), (-1, 1), (0, 1)]);
        assert_eq!(a.mul(&b).unwrap(), rs(&[(1, 1), (0, 1), (-1, 1)]));
        // (Σ tⁿ)(1−t) = 1
        let g: PowerSeries<Rational> = geometric(Var::T, 5);
        let one_minus = PowerSeries::one(Var::T, 5).sub(&PowerSeries::identity(Var::T, 5)).unwrap();
        assert_eq!(g.mul(&one_minus).unwrap(), PowerSeries::one(Var::T, 5));
        // (1 + t + t²/2)(1 − t + t²/2) = 1 + 0t + 0t²
        let e = rs(&[(1, 1), (1, 1), (1, 2)]);
        let em = rs(&[(1, 1), (-1, 1), (1, 2)]);
        assert_eq!(e.mul(&em).unwrap(), rs(&[(1, 1), (0, 1), (0, 1)]));
    }

    #[test]
    fn var_mismatch_is_rejected() {
        let a: PowerSeries<Rational> = PowerSeries::one(Var::T, 2);
        let b = PowerSeries::one(Var::X, 2);
        assert_eq!(
            a.mul(&b),
            Err(SeriesError::VarMismatch {
                left: Var::T,
                right: Var::X
            })
        );
    }

    #[test]
    fn div_examples() {
        let one = PowerSeries::<Rational>::one(Var::T, 3);
        let t = PowerSeries::identity(Var::T, 3);
        let one_minus_t = one.sub(&t).unwrap();
        assert_eq!(
            one.div(&one_minus_t).unwrap(),
            rs(&[(1, 1), (1, 1), (1, 1), (1, 1)])
        );
        assert_eq!(
            t.div(&one_minus_t).unwrap(),
            rs(&[(0, 1), (1, 1), (1, 1), (1, 1)])
        );
        let b = rs(&[(1, 1), (-2, 1), (0, 1)]);
        let q = PowerSeries::one(Var::T, 2).div(&b).unwrap();
        assert_eq!(q, rs(&[(1, 1), (2, 1), (4, 1)]));
        assert_eq!(q.mul(&b).unwrap(), PowerSeries::one(Var::T, 2));

        let non_unit = rs(&[(0, 1), (1, 1)]);
        assert_eq!(one.div(&non_unit), Err(SeriesError::NonUnitConstantTerm));
    }

    #[test]
    fn compose_examples() {
        // 1/(1−u) ∘ t² = 1 + t² + t⁴
        let f: PowerSeries<Rational> = geometric(Var::U, 4);
        let g = PowerSeries::from_fn(Var::T, 4, |n| {
            if n == 2 { Rational::one() } else { Rational::zero() }
        });
        assert_eq!(
            PowerSeries::compose(&f, &g).unwrap(),
            rs(&[(1, 1), (0, 1), (1, 1), (0, 1), (1, 1)])
        );
        // f = u passes g through
        let id = PowerSeries::identity(Var::U, 4);
        let any = rs(&[(0, 1), (1, 2), (-3, 1), (1, 7), (2, 1)]);
        assert_eq!(PowerSeries::compose(&id, &any).unwrap(), any);
        // nonzero inner constant
        let bad = PowerSeries::one(Var::T, 4);
        assert_eq!(
            PowerSeries::compose(&f, &bad),
            Err(SeriesError::NonzeroInnerConstant)
        );
    }

    #[test]
    fn binom_pow_examples() {
        let t = PowerSeries::<Rational>::identity(Var::T, 3);
        assert_eq!(
            PowerSeries::binom_pow(&t, &rat_int(2)).unwrap(),
            rs(&[(1, 1), (2, 1), (1, 1), (0, 1)])
        );
        assert_eq!(
            PowerSeries::binom_pow(&t.truncated(2), &rat(1, 2)).unwrap(),
            rs(&[(1, 1), (1, 2), (-1, 8)]).truncated(2)
        );
        assert_eq!(
            PowerSeries::binom_pow(&t, &rat_int(-1)).unwrap(),
            rs(&[(1, 1), (-1, 1), (1, 1), (-1, 1)])
        );
    }

    #[test]
    fn deg_log_examples() {
        // symbolic: t + ((λ−1)/2)t²
        let t = PowerSeries::<LambdaPoly>::identity(Var::T, 2);
        let l = PowerSeries::deg_log(&t, &LambdaPoly::lambda()).unwrap();
        assert_eq!(*l.coeff(1), LambdaPoly::one());
        assert_eq!(
            *l.coeff(2),
            LambdaPoly::from_coeffs(vec![rat(-1, 2), rat(1, 2)])
        );
        // λ = 1: exactly t
        let t8 = PowerSeries::<Rational>::identity(Var::T, 8);
        assert_eq!(PowerSeries::deg_log(&t8, &rat_int(1)).unwrap(), t8);
        // λ → 0 recovers the classical logarithm
        let t5 = PowerSeries::<LambdaPoly>::identity(Var::T, 5);
        let sym = PowerSeries::deg_log(&t5, &LambdaPoly::lambda()).unwrap();
        let at0 = sym.map(|c| c.eval(&Rational::zero()));
        assert_eq!(
            at0,
            rs(&[(0, 1), (1, 1), (-1, 2), (1, 3), (-1, 4), (1, 5)])
        );
    }

    #[test]
    fn deg_exp_examples() {
        let t = PowerSeries::<LambdaPoly>::identity(Var::T, 2);
        let lam = LambdaPoly::lambda();
        let e = PowerSeries::deg_exp(&t, &LambdaPoly::one(), &lam).unwrap();
        assert_eq!(*e.coeff(0), LambdaPoly::one());
        assert_eq!(*e.coeff(1), LambdaPoly::one());
        assert_eq!(
            *e.coeff(2),
            LambdaPoly::from_coeffs(vec![rat(1, 2), rat(-1, 2)])
        );
        // x = 0 gives the constant series 1
        let z = PowerSeries::deg_exp(&t, &LambdaPoly::zero(), &lam).unwrap();
        assert_eq!(z, PowerSeries::one(Var::T, 2));
    }

    #[test]
    fn deg_log_exp_inversion() {
        for lam in [rat(1, 2), rat(-1, 3), rat_int(1), rat(2, 5)] {
            let t = PowerSeries::<Rational>::identity(Var::T, 16);
            let e1 = PowerSeries::deg_exp(&t, &Rational::one(), &lam).unwrap();
            let log_of = PowerSeries::deg_log(
                &e1.sub(&PowerSeries::one(Var::T, 16)).unwrap(),
                &lam,
            )
            .unwrap();
            assert_eq!(log_of, t);
            let l = PowerSeries::deg_log(&t, &lam).unwrap();
            let exp_of = PowerSeries::deg_exp(&l, &Rational::one(), &lam).unwrap();
            assert_eq!(exp_of, PowerSeries::one(Var::T, 16).add(&t).unwrap());
        }
    }

    #[test]
    fn theta_falling_examples() {
        let s = rs(&[(1, 1), (2, 1), (3, 1)]);
        assert_eq!(s.theta_falling(0, &rat(1, 2)), s);
        assert_eq!(
            s.theta_falling(1, &rat(1, 2)),
            rs(&[(0, 1), (2, 1), (6, 1)])
        );
        // k = 2 on t: (1)_{2,λ} t = (1)(1−λ) t
        let t = PowerSeries::<LambdaPoly>::identity(Var::X, 2);
        let got = t.theta_falling(2, &LambdaPoly::lambda());
        assert_eq!(
            *got.coeff(1),
            LambdaPoly::from_coeffs(vec![rat(1, 1), rat(-1, 1)])
        );
    }

    #[test]
    fn derive_examples() {
        let s = rs(&[(1, 1), (1, 1), (1, 1)]);
        assert_eq!(s.derive(1).unwrap(), rs(&[(1, 1), (2, 1)]));
        let t2 = rs(&[(0, 1), (0, 1), (1, 1)]);
        assert_eq!(t2.derive(2).unwrap(), rs(&[(2, 1)]).truncated(0));
        assert!(matches!(
            s.derive(3),
            Err(SeriesError::OrderExhausted { .. })
        ));
    }

    #[test]
    fn egf_coeff_examples() {
        let lam = rat(1, 3);
        let t = PowerSeries::<Rational>::identity(Var::T, 4);
        let e = PowerSeries::deg_exp(&t, &Rational::one(), &lam).unwrap();
        // EGF coefficient 2 of e_λ(t) is (1)_{2,λ} = 1−λ
        assert_eq!(e.egf_coeff(2).unwrap(), Rational::one() - lam);
        assert_eq!(
            PowerSeries::<Rational>::one(Var::T, 1).egf_coeff(0).unwrap(),
            Rational::one()
        );
        assert_eq!(t.egf_coeff(1).unwrap(), Rational::one());
        assert!(t.egf_coeff(5).is_err());
    }

    #[test]
    fn pretty_printing() {
        let s = rs(&[(1, 1), (1, 1), (-1, 2)]);
        assert_eq!(s.pretty(), "1 + t - 1/2 t^2 + O(t^3)");
        let sym = PowerSeries::<LambdaPoly>::identity(Var::T, 2);
        let l = PowerSeries::deg_log(&sym, &LambdaPoly::lambda()).unwrap();
        assert_eq!(l.pretty(), "t + (-1/2 + 1/2λ) t^2 + O(t^3)");
    }

    fn arb_series() -> impl Strategy<Value = PowerSeries<Rational>> {
        proptest::collection::vec((-9i64..=9, 1i64..=9), 5..=13).prop_map(|v| {
            PowerSeries::from_coeffs(Var::T, v.into_iter().map(|(n, d)| rat(n, d)).collect())
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn ring_laws(a in arb_series(), b in arb_series(), c in arb_series()) {
            let order = a.order().min(b.order()).min(c.order());
            let (a, b, c) = (a.truncated(order), b.truncated(order), c.truncated(order));
            prop_assert_eq!(a.mul(&b).unwrap(), b.mul(&a).unwrap());
            prop_assert_eq!(
                a.mul(&b).unwrap().mul(&c).unwrap(),
                a.mul(&b.mul(&c).unwrap()).unwrap()
            );
            prop_assert_eq!(
                a.mul(&b.add(&c).unwrap()).unwrap(),
                a.mul(&b).unwrap().add(&a.mul(&c).unwrap()).unwrap()
            );
        }

        #[test]
        fn div_mul_round_trip(a in arb_series(), b in arb_series()) {
            prop_assume!(b.coeff(0).is_unit());
            let order = a.order().min(b.order());
            let q = a.div(&b).unwrap();
            prop_assert_eq!(q.mul(&b).unwrap(), a.truncated(order));
        }
    }
}
