//! Dense univariate polynomials over the coefficient ring, used for the
//! Fubini-type families and for basis-conversion work.

use std::fmt;



use crate::kernel::Scalar;
use crate::series::{PowerSeries, SeriesError, Var};

/// Trailing zero coefficients are trimmed; the zero polynomial stores
/// nothing and has no degree.
#[derive(Clone, PartialEq, Debug)]
pub struct Poly<S: Scalar> {
    var: Var,
    coeffs: Vec<S>,
}

impl<S: Scalar> Poly<S> {
    pub fn from_coeffs(var: Var, mut coeffs: Vec<S>) -> Self {
        while coeffs.last().map_or(false, |c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { var, coeffs }
    }

    pub fn zero(var: Var) -> Self {
        Poly {
            var,
            coeffs: Vec::new(),
        }
    }

    pub fn constant(var: Var, c: S) -> Self {
        Self::from_coeffs(var, vec![c])
    }

    pub fn monomial(var: Var, deg: usize, c: S) -> Self {
        let mut coeffs = vec![S::zero(); deg + 1];
        coeffs[deg] = c;
        Self::from_coeffs(var, coeffs)
    }

    pub fn var(&self) -> Var {
        self.var
    }

    pub fn degree(&self) -> Option<usize> {
        if self.coeffs.is_empty() {
            None
        } else {
            Some(self.coeffs.len() - 1)
        }
    }

    pub fn coeff(&self, i: usize) -> S {
        self.coeffs.get(i).cloned().unwrap_or_else(S::zero)
    }

    pub fn coeffs(&self) -> &[S] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Horner evaluation.
    pub fn eval(&self, v: &S) -> S {
        let mut acc = S::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * v.clone() + c.clone();
        }
        acc
    }

    /// Substitutes a power series for the variable. Finite sum, so the
    /// argument may have any constant term. The result carries the
    /// argument's variable.
    pub fn eval_series(&self, s: &PowerSeries<S>) -> Result<PowerSeries<S>, SeriesError> {
        let mut acc = PowerSeries::zero(s.var(), s.order());
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(s)?.add_constant(c);
        }
        Ok(acc)
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        Self::from_coeffs(self.var, (0..n).map(|i| self.coeff(i) + other.coeff(i)).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        Self::from_coeffs(self.var, (0..n).map(|i| self.coeff(i) - other.coeff(i)).collect())
    }

    pub fn scale(&self, c: &S) -> Self {
        Self::from_coeffs(
            self.var,
            self.coeffs.iter().map(|a| c.clone() * a.clone()).collect(),
        )
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero(self.var);
        }
        let mut out = vec![S::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].clone() + a.clone() * b.clone();
            }
        }
        Self::from_coeffs(self.var, out)
    }

    pub fn derivative(&self) -> Self {
        if self.coeffs.len() <= 1 {
            return Self::zero(self.var);
        }
        Self::from_coeffs(
            self.var,
            (1..self.coeffs.len())
                .map(|i| S::from_int(i as i64) * self.coeffs[i].clone())
                .collect(),
        )
    }

    pub fn to_series(&self, order: usize) -> PowerSeries<S> {
        PowerSeries::from_fn(self.var, order, |n| self.coeff(n))
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> Poly<T> {
        Poly {
            var: self.var,
            coeffs: self.coeffs.iter().map(f).collect(),
        }
    }
}

// Shares the series pretty-printer's conventions, minus the O() tail.
impl<S: Scalar> fmt::Display for Poly<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            if self.coeffs.is_empty() {
                return write!(f, "0");
            }
            let v = self.var.name();
            let mut first = true;
            for (n, c) in self.coeffs.iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                let s = c.to_string();
                let (neg, mag) = match s.strip_prefix('-') {
                    Some(rest) if !rest.contains(" + ") && !rest.contains(" - ") => {
                        (true, rest.to_string())
                    }
                    _ => (false, s),
                };
                if first {
                    if neg {
                        write!(f, "-")?;
                    }
                    first = false;
                } else {
                    write!(f, "{}", if neg { " - " } else { " + " })?;
                }
                let atomic = !mag.contains(' ');
                let coeff_part = if n > 0 && mag == "1" {
                    String::new()
                } else if atomic {
                    mag
                } else {
                    format!("({})", mag)
                };
                write!(f, "{}", coeff_part)?;
                if n > 0 {
                    if !coeff_part.is_empty() {
                        write!(f, " ")?;
                    }
                    write!(f, "{}", v)?;
                    if n > 1 {
                        write!(f, "^{}", n)?;
                    }
                }
            }
            if first {
                write!(f, "0")?;
            }
            Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::{rat, rat_int, Rational};
    use num::traits::Zero;

    fn p(coeffs: &[i64]) -> Poly<Rational> {
        Poly::from_coeffs(Var::X, coeffs.iter().map(|&n| rat_int(n)).collect())
    }

    #[test]
    fn eval_and_trim() {
        let q = p(&[1, 2, 0, 1]); // 1 + 2x + x³
        assert_eq!(q.eval(&rat_int(2)), rat_int(13));
        assert_eq!(q.eval(&Rational::zero()), rat_int(1));
        assert_eq!(Poly::from_coeffs(Var::X, vec![rat_int(0)]), Poly::zero(Var::X));
        assert_eq!(q.degree(), Some(3));
    }

    #[test]
    fn derivative_and_mul() {
        let q = p(&[1, 2, 0, 1]);
        assert_eq!(q.derivative(), p(&[2, 0, 3]));
        assert_eq!(p(&[1, 1]).mul(&p(&[-1, 1])), p(&[-1, 0, 1]));
    }

    #[test]
    fn eval_series_matches_horner() {
        let q = p(&[0, 1, 2]); // x + 2x²
        let s = PowerSeries::from_coeffs(
            Var::X,
            vec![rat_int(0), rat_int(1), rat_int(1), rat_int(1)],
        ); // x/(1−x) to order 3
        let got = q.eval_series(&s).unwrap();
        // x + 2x² expanded at x/(1−x): x + 3x² + 5x³ + …
        assert_eq!(*got.coeff(1), rat_int(1));
        assert_eq!(*got.coeff(2), rat_int(3));
        assert_eq!(*got.coeff(3), rat_int(5));
    }

    #[test]
    fn display() {
        assert_eq!(p(&[1, -2, 1]).to_string(), "1 - 2 x + x^2");
        assert_eq!(Poly::<Rational>::zero(Var::Y).to_string(), "0");
        assert_eq!(p(&[0, 1]).to_string(), "x");
        assert_eq!(
            Poly::from_coeffs(Var::X, vec![rat(0, 1), rat(-1, 2)]).to_string(),
            "-1/2 x"
        );
    }
}
