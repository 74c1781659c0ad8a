//! Truncated bivariate Taylor jets.
//!
//! A [`Jet2`] of order `N` stores the Taylor coefficients `c_ij` of a smooth
//! function of two chart variables `(u, v)` for all monomials `u^i v^j` with
//! `i + j <= N`. Arithmetic is truncated polynomial arithmetic, so every
//! partial derivative up to order `N` of a composite expression is exact up
//! to floating-point roundoff.
//!
//! Coefficients are stored densely by total degree: degree `d` occupies the
//! slots `d(d+1)/2 ..= d(d+1)/2 + d`, ordered by increasing power of `v`.

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};

use thiserror::Error;

/// Largest supported total order.
pub const MAX_ORDER: usize = 4;

/// Number of coefficients of a jet of order [`MAX_ORDER`].
pub const MAX_COEFFS: usize = (MAX_ORDER + 1) * (MAX_ORDER + 2) / 2;

/// Constant terms closer than this to a singularity are rejected.
pub const DOMAIN_EPS: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum JetError {
    #[error("jet order {0} exceeds the maximum of {MAX_ORDER}")]
    OrderOutOfRange(usize),
    #[error("division by a jet whose constant term {0:e} is (numerically) zero")]
    DivisionByZero(f64),
    #[error("{func} is undefined at constant term {value:e}")]
    Domain { func: &'static str, value: f64 },
    #[error("need a jet of order >= {needed}, got order {got}")]
    InsufficientOrder { needed: usize, got: usize },
}

/// Chart variable selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Var {
    U,
    V,
}

impl Var {
    pub const BOTH: [Var; 2] = [Var::U, Var::V];

    pub fn index(self) -> usize {
        match self {
            Var::U => 0,
            Var::V => 1,
        }
    }

    pub fn from_index(i: usize) -> Var {
        if i == 0 {
            Var::U
        } else {
            Var::V
        }
    }
}

/// Elementary univariate functions that can be composed with a jet.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Elementary {
    Sin,
    Cos,
    Exp,
    Ln,
    Sqrt,
    Pow(f64),
}

/// Binary jet arithmetic selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

#[inline]
const fn slot(i: usize, j: usize) -> usize {
    let d = i + j;
    d * (d + 1) / 2 + j
}

#[inline]
pub const fn coeff_count(order: usize) -> usize {
    (order + 1) * (order + 2) / 2
}

fn factorial(n: usize) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc * k as f64)
}

/// Bivariate truncated Taylor polynomial of order at most [`MAX_ORDER`].
#[derive(Clone, Copy, PartialEq)]
pub struct Jet2 {
    order: u8,
    c: [f64; MAX_COEFFS],
}

impl fmt::Debug for Jet2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Jet2")
            .field("order", &self.order)
            .field("coeffs", &self.coeffs())
            .finish()
    }
}

impl Jet2 {
    fn check_order(order: usize) -> Result<(), JetError> {
        if order > MAX_ORDER {
            Err(JetError::OrderOutOfRange(order))
        } else {
            Ok(())
        }
    }

    /// Constant function. Orders above [`MAX_ORDER`] are clamped.
    pub fn constant(value: f64, order: usize) -> Jet2 {
        let mut c = [0.0; MAX_COEFFS];
        c[0] = value;
        Jet2 {
            order: order.min(MAX_ORDER) as u8,
            c,
        }
    }

    /// Constant of maximal order; combining with any jet truncates to that jet's order.
    pub fn scalar(value: f64) -> Jet2 {
        Jet2::constant(value, MAX_ORDER)
    }

    pub fn zero(order: usize) -> Jet2 {
        Jet2::constant(0.0, order)
    }

    /// Jet of the coordinate function `which` at `value`.
    pub fn variable(which: Var, value: f64, order: usize) -> Result<Jet2, JetError> {
        Jet2::check_order(order)?;
        let mut j = Jet2::constant(value, order);
        if order >= 1 {
            match which {
                Var::U => j.c[slot(1, 0)] = 1.0,
                Var::V => j.c[slot(0, 1)] = 1.0,
            }
        }
        Ok(j)
    }

    /// Builds a jet from coefficients listed in storage order (by total degree,
    /// then by power of `v`). Missing trailing coefficients are zero.
    pub fn from_coeffs(order: usize, coeffs: &[f64]) -> Result<Jet2, JetError> {
        Jet2::check_order(order)?;
        let mut c = [0.0; MAX_COEFFS];
        let n = coeff_count(order).min(coeffs.len());
        c[..n].copy_from_slice(&coeffs[..n]);
        Ok(Jet2 {
            order: order as u8,
            c,
        })
    }

    pub fn order(&self) -> usize {
        self.order as usize
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.c[..coeff_count(self.order())]
    }

    pub fn value(&self) -> f64 {
        self.c[0]
    }

    /// Taylor coefficient of `u^i v^j`; zero beyond the jet order.
    pub fn coeff(&self, i: usize, j: usize) -> f64 {
        if i + j > self.order() {
            0.0
        } else {
            self.c[slot(i, j)]
        }
    }

    /// Partial derivative `d^(i+j) / du^i dv^j` at the expansion point.
    pub fn partial(&self, i: usize, j: usize) -> f64 {
        self.coeff(i, j) * factorial(i) * factorial(j)
    }

    pub fn du(&self) -> f64 {
        self.coeff(1, 0)
    }

    pub fn dv(&self) -> f64 {
        self.coeff(0, 1)
    }

    pub fn first(&self, which: Var) -> f64 {
        match which {
            Var::U => self.du(),
            Var::V => self.dv(),
        }
    }

    /// Second partial `d^2 / dx_a dx_b` with `a, b` chart indices.
    pub fn second(&self, a: Var, b: Var) -> f64 {
        match (a, b) {
            (Var::U, Var::U) => self.partial(2, 0),
            (Var::V, Var::V) => self.partial(0, 2),
            _ => self.partial(1, 1),
        }
    }

    pub fn truncate(&self, order: usize) -> Jet2 {
        if order >= self.order() {
            return *self;
        }
        let mut c = [0.0; MAX_COEFFS];
        let n = coeff_count(order);
        c[..n].copy_from_slice(&self.c[..n]);
        Jet2 {
            order: order as u8,
            c,
        }
    }

    /// Jet of the partial derivative with respect to `which`, one order lower.
    pub fn derivative(&self, which: Var) -> Result<Jet2, JetError> {
        let n = self.order();
        if n == 0 {
            return Err(JetError::InsufficientOrder { needed: 1, got: 0 });
        }
        let mut c = [0.0; MAX_COEFFS];
        for d in 0..n {
            for j in 0..=d {
                let i = d - j;
                c[slot(i, j)] = match which {
                    Var::U => (i + 1) as f64 * self.c[slot(i + 1, j)],
                    Var::V => (j + 1) as f64 * self.c[slot(i, j + 1)],
                };
            }
        }
        Ok(Jet2 {
            order: (n - 1) as u8,
            c,
        })
    }

    /// Like [`derivative`](Self::derivative) but for internal pipelines where
    /// the order is known to be positive.
    pub(crate) fn d(&self, which: Var) -> Jet2 {
        self.derivative(which)
            .expect("derivative of an order-0 jet inside the geometry pipeline")
    }

    fn mul_jet(&self, other: &Jet2) -> Jet2 {
        let n = self.order().min(other.order());
        let mut c = [0.0; MAX_COEFFS];
        for d in 0..=n {
            for j in 0..=d {
                let i = d - j;
                let mut acc = 0.0;
                for k in 0..=i {
                    for l in 0..=j {
                        acc += self.c[slot(k, l)] * other.c[slot(i - k, j - l)];
                    }
                }
                c[slot(i, j)] = acc;
            }
        }
        Jet2 { order: n as u8, c }
    }

    fn zip(&self, other: &Jet2, f: impl Fn(f64, f64) -> f64) -> Jet2 {
        let n = self.order().min(other.order());
        let mut c = [0.0; MAX_COEFFS];
        for (k, ck) in c.iter_mut().enumerate().take(coeff_count(n)) {
            *ck = f(self.c[k], other.c[k]);
        }
        Jet2 { order: n as u8, c }
    }

    fn map_coeffs(&self, f: impl Fn(f64) -> f64) -> Jet2 {
        let mut out = *self;
        for k in 0..coeff_count(self.order()) {
            out.c[k] = f(self.c[k]);
        }
        out
    }

    /// Composes a univariate function given its Taylor coefficients
    /// `taylor[k] = f^(k)(a0) / k!` at the constant term `a0`.
    fn compose(&self, taylor: &[f64]) -> Jet2 {
        let n = self.order();
        let mut delta = *self;
        delta.c[0] = 0.0;
        let mut acc = Jet2::constant(taylor[n], n);
        for k in (0..n).rev() {
            acc = acc.mul_jet(&delta);
            acc.c[0] += taylor[k];
        }
        acc
    }

    pub fn sin(&self) -> Jet2 {
        let x = self.value();
        let t: Vec<f64> = (0..=self.order())
            .map(|k| (x + k as f64 * std::f64::consts::FRAC_PI_2).sin() / factorial(k))
            .collect();
        self.compose(&t)
    }

    pub fn cos(&self) -> Jet2 {
        let x = self.value();
        let t: Vec<f64> = (0..=self.order())
            .map(|k| (x + k as f64 * std::f64::consts::FRAC_PI_2).cos() / factorial(k))
            .collect();
        self.compose(&t)
    }

    pub fn exp(&self) -> Jet2 {
        let e = self.value().exp();
        let t: Vec<f64> = (0..=self.order()).map(|k| e / factorial(k)).collect();
        self.compose(&t)
    }

    pub fn sinh(&self) -> Jet2 {
        let x = self.value();
        let t: Vec<f64> = (0..=self.order())
            .map(|k| if k % 2 == 0 { x.sinh() } else { x.cosh() } / factorial(k))
            .collect();
        self.compose(&t)
    }

    pub fn cosh(&self) -> Jet2 {
        let x = self.value();
        let t: Vec<f64> = (0..=self.order())
            .map(|k| if k % 2 == 0 { x.cosh() } else { x.sinh() } / factorial(k))
            .collect();
        self.compose(&t)
    }

    pub fn ln(&self) -> Result<Jet2, JetError> {
        let x = self.value();
        if x <= DOMAIN_EPS {
            return Err(JetError::Domain {
                func: "ln",
                value: x,
            });
        }
        let t: Vec<f64> = (0..=self.order())
            .map(|k| {
                if k == 0 {
                    x.ln()
                } else {
                    let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
                    sign / (k as f64 * x.powi(k as i32))
                }
            })
            .collect();
        Ok(self.compose(&t))
    }

    /// Real power `a^p`, with binomial Taylor coefficients.
    pub fn powf(&self, p: f64) -> Result<Jet2, JetError> {
        let x = self.value();
        let integral = p.fract() == 0.0;
        if integral && p >= 0.0 {
            return Ok(self.powi(p as u32));
        }
        if integral {
            if x.abs() <= DOMAIN_EPS {
                return Err(JetError::DivisionByZero(x));
            }
        } else if x <= DOMAIN_EPS {
            return Err(JetError::Domain {
                func: "pow",
                value: x,
            });
        }
        let mut t = Vec::with_capacity(self.order() + 1);
        let mut binom = 1.0;
        for k in 0..=self.order() {
            if k > 0 {
                binom *= (p - (k - 1) as f64) / k as f64;
            }
            t.push(binom * x.powf(p - k as f64));
        }
        Ok(self.compose(&t))
    }

    pub fn powi(&self, n: u32) -> Jet2 {
        let mut acc = Jet2::constant(1.0, self.order());
        for _ in 0..n {
            acc = acc.mul_jet(self);
        }
        acc
    }

    pub fn sqrt(&self) -> Result<Jet2, JetError> {
        let x = self.value();
        if x <= DOMAIN_EPS {
            return Err(JetError::Domain {
                func: "sqrt",
                value: x,
            });
        }
        self.powf(0.5)
    }

    pub fn recip(&self) -> Result<Jet2, JetError> {
        let x = self.value();
        if x.abs() <= DOMAIN_EPS {
            return Err(JetError::DivisionByZero(x));
        }
        let t: Vec<f64> = (0..=self.order())
            .map(|k| {
                let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                sign / x.powi(k as i32 + 1)
            })
            .collect();
        Ok(self.compose(&t))
    }

    pub fn checked_div(&self, other: &Jet2) -> Result<Jet2, JetError> {
        Ok(self.mul_jet(&other.recip()?))
    }

    pub fn apply(&self, func: Elementary) -> Result<Jet2, JetError> {
        match func {
            Elementary::Sin => Ok(self.sin()),
            Elementary::Cos => Ok(self.cos()),
            Elementary::Exp => Ok(self.exp()),
            Elementary::Ln => self.ln(),
            Elementary::Sqrt => self.sqrt(),
            Elementary::Pow(p) => self.powf(p),
        }
    }

    pub fn arith(&self, op: ArithOp, other: &Jet2) -> Result<Jet2, JetError> {
        match op {
            ArithOp::Add => Ok(*self + *other),
            ArithOp::Sub => Ok(*self - *other),
            ArithOp::Mul => Ok(*self * *other),
            ArithOp::Div => self.checked_div(other),
        }
    }

    /// Largest coefficient magnitude.
    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs().iter().fold(0.0_f64, |m, c| m.max(c.abs()))
    }
}

impl Add for Jet2 {
    type Output = Jet2;
    fn add(self, rhs: Jet2) -> Jet2 {
        self.zip(&rhs, |a, b| a + b)
    }
}

impl Sub for Jet2 {
    type Output = Jet2;
    fn sub(self, rhs: Jet2) -> Jet2 {
        self.zip(&rhs, |a, b| a - b)
    }
}

impl Mul for Jet2 {
    type Output = Jet2;
    fn mul(self, rhs: Jet2) -> Jet2 {
        self.mul_jet(&rhs)
    }
}

impl Neg for Jet2 {
    type Output = Jet2;
    fn neg(self) -> Jet2 {
        self.map_coeffs(|a| -a)
    }
}

impl AddAssign for Jet2 {
    fn add_assign(&mut self, rhs: Jet2) {
        *self = *self + rhs;
    }
}

impl SubAssign for Jet2 {
    fn sub_assign(&mut self, rhs: Jet2) {
        *self = *self - rhs;
    }
}

impl Add<f64> for Jet2 {
    type Output = Jet2;
    fn add(mut self, rhs: f64) -> Jet2 {
        self.c[0] += rhs;
        self
    }
}

impl Sub<f64> for Jet2 {
    type Output = Jet2;
    fn sub(mut self, rhs: f64) -> Jet2 {
        self.c[0] -= rhs;
        self
    }
}

impl Mul<f64> for Jet2 {
    type Output = Jet2;
    fn mul(self, rhs: f64) -> Jet2 {
        self.map_coeffs(|a| a * rhs)
    }
}

impl Div<f64> for Jet2 {
    type Output = Jet2;
    fn div(self, rhs: f64) -> Jet2 {
        self.map_coeffs(|a| a / rhs)
    }
}

impl Mul<Jet2> for f64 {
    type Output = Jet2;
    fn mul(self, rhs: Jet2) -> Jet2 {
        rhs * self
    }
}
