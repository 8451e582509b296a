//! Closed-form iterates in the right-hand well: `v_n = s_n(ξ) sin ξ + c_n(ξ) cos ξ`
//! with polynomial `s_n`, `c_n`, generic over the coefficient field.

use std::fmt::Debug;

use num_rational::Ratio;
use num_traits::{Num, ToPrimitive};

pub type Rational = Ratio<i128>;

pub trait Coef: Num + Clone + Debug {
    fn from_int(i: i64) -> Self;
    fn to_f64(&self) -> f64;
}

impl Coef for f64 {
    fn from_int(i: i64) -> Self {
        i as f64
    }
    fn to_f64(&self) -> f64 {
        *self
    }
}

impl Coef for Rational {
    fn from_int(i: i64) -> Self {
        Ratio::from_integer(i as i128)
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
}

/// Dense polynomial, lowest degree first, no trailing zeros.
#[derive(Debug, Clone, PartialEq)]
pub struct Poly<T>(pub Vec<T>);

impl<T: Coef> Poly<T> {
    pub fn new(mut c: Vec<T>) -> Self {
        while c.last().is_some_and(|v| v.is_zero()) {
            c.pop();
        }
        Poly(c)
    }

    pub fn zero() -> Self {
        Poly(vec![])
    }

    pub fn constant(c: T) -> Self {
        Poly::new(vec![c])
    }

    pub fn coeff(&self, i: usize) -> T {
        self.0.get(i).cloned().unwrap_or_else(T::zero)
    }

    pub fn degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn add(&self, o: &Self) -> Self {
        let n = self.0.len().max(o.0.len());
        Poly::new((0..n).map(|i| self.coeff(i) + o.coeff(i)).collect())
    }

    pub fn sub(&self, o: &Self) -> Self {
        let n = self.0.len().max(o.0.len());
        Poly::new((0..n).map(|i| self.coeff(i) - o.coeff(i)).collect())
    }

    pub fn scale(&self, s: &T) -> Self {
        Poly::new(self.0.iter().map(|c| c.clone() * s.clone()).collect())
    }

    pub fn deriv(&self) -> Self {
        Poly::new(self.0.iter().enumerate().skip(1).map(|(i, c)| c.clone() * T::from_int(i as i64)).collect())
    }

    /// Antiderivative vanishing at 0.
    pub fn integral(&self) -> Self {
        let mut c = vec![T::zero()];
        c.extend(self.0.iter().enumerate().map(|(i, v)| v.clone() / T::from_int(i as i64 + 1)));
        Poly::new(c)
    }

    pub fn eval(&self, x: &T) -> T {
        self.0.iter().rev().fold(T::zero(), |acc, c| acc * x.clone() + c.clone())
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        self.0.iter().rev().fold(0.0, |acc, c| acc * x + c.to_f64())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PolyIterate<T> {
    pub n: usize,
    /// `s_n = (Π ε_m) S_n` and `c_n = (Π ε_m) C_n`.
    pub s: Poly<T>,
    pub c: Poly<T>,
    pub eps: Vec<T>,
    pub product: T,
}

impl<T: Coef> PolyIterate<T> {
    pub fn s_coeffs(&self) -> Poly<T> {
        Poly::new(self.s.0.iter().map(|v| v.clone() / self.product.clone()).collect())
    }

    pub fn c_coeffs(&self) -> Poly<T> {
        Poly::new(self.c.0.iter().map(|v| v.clone() / self.product.clone()).collect())
    }

    pub fn v(&self, xi: f64) -> f64 {
        self.s.eval_f64(xi) * xi.sin() + self.c.eval_f64(xi) * xi.cos()
    }
}

/// One step: solve `s'' - 2c' = ε s_prev`, `c'' + 2s' = ε c_prev` with
/// `c(0) = 0` and `s(0) + c'(0) = 1`.
fn step<T: Coef>(s_prev: &Poly<T>, c_prev: &Poly<T>, eps: &T) -> (Poly<T>, Poly<T>) {
    let a = s_prev.scale(eps);
    let b = c_prev.scale(eps);
    let r = b.deriv().sub(&a.scale(&T::from_int(2)));
    // u'' + 4u = r has the polynomial solution Σ (-1)^k r^(2k) / 4^(k+1)
    let mut u = Poly::zero();
    let mut term = r;
    let mut denom = T::from_int(4);
    let mut sign = T::one();
    while !term.is_zero() {
        u = u.add(&term.scale(&(sign.clone() / denom.clone())));
        term = term.deriv().deriv();
        denom = denom * T::from_int(4);
        sign = T::zero() - sign;
    }
    let c = u.integral();
    let half = T::one() / T::from_int(2);
    let k = T::one() - u.coeff(0) * half.clone();
    let s = b.integral().sub(&u).scale(&half).add(&Poly::constant(k));
    (s, c)
}

/// Iterates `v_1 … v_n` for the given `ε_m`.
pub fn poly_iterates<T: Coef>(eps: &[T]) -> Vec<PolyIterate<T>> {
    let mut out = Vec::with_capacity(eps.len());
    let mut s = Poly::constant(T::one());
    let mut c = Poly::zero();
    let mut product = T::one();
    for (i, e) in eps.iter().enumerate() {
        let (sn, cn) = step(&s, &c, e);
        product = product * e.clone();
        out.push(PolyIterate { n: i + 1, s: sn.clone(), c: cn.clone(), eps: eps[..=i].to_vec(), product: product.clone() });
        s = sn;
        c = cn;
    }
    out
}

/// Coefficients of `v(ξ) = sin(ξ√(1-ε))/√(1-ε)` in powers of ε:
/// `sin[e]` and `cos[e]` are polynomials in ξ multiplying `ε^e sin ξ` and `ε^e cos ξ`.
#[derive(Debug, Clone, PartialEq)]
pub struct VSeries {
    pub sin: Vec<Poly<Rational>>,
    pub cos: Vec<Poly<Rational>>,
}

fn binom_half(upper_num: i64, j: usize) -> Rational {
    // binomial(upper_num/2, j)
    let a = Rational::new(upper_num as i128, 2);
    let mut r = Rational::from_integer(1);
    for i in 0..j {
        r = r * (a - Rational::from_integer(i as i128)) / Rational::from_integer(i as i128 + 1);
    }
    r
}

/// Truncated product of power series in ε.
fn series_mul(a: &[Rational], b: &[Rational], order: usize) -> Vec<Rational> {
    let mut out = vec![Rational::from_integer(0); order + 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            if i + j <= order {
                out[i + j] += *x * *y;
            }
        }
    }
    out
}

pub fn v_series_coefficients(order: usize) -> VSeries {
    let neg = |j: usize| Rational::from_integer(if j % 2 == 0 { 1 } else { -1 });
    // η = √(1-ε) - 1 and (1-ε)^{-1/2}
    let eta: Vec<Rational> =
        (0..=order).map(|j| if j == 0 { Rational::from_integer(0) } else { binom_half(1, j) * neg(j) }).collect();
    let pre: Vec<Rational> = (0..=order).map(|j| binom_half(-1, j) * neg(j)).collect();
    // ξ^m η^m / m! contributes to cos(ξη) (m even) or sin(ξη) (m odd)
    let zero = || vec![Poly::<Rational>::zero(); order + 1];
    let (mut cos_eta, mut sin_eta) = (zero(), zero());
    let mut eta_pow = vec![Rational::from_integer(0); order + 1];
    eta_pow[0] = Rational::from_integer(1);
    let mut fact = Rational::from_integer(1);
    for m in 0..=order {
        if m > 0 {
            eta_pow = series_mul(&eta_pow, &eta, order);
            fact = fact * Rational::from_integer(m as i128);
        }
        let sign = Rational::from_integer(if (m / 2) % 2 == 0 { 1 } else { -1 });
        for (e, c) in eta_pow.iter().enumerate() {
            if *c == Rational::from_integer(0) {
                continue;
            }
            let mut mono = vec![Rational::from_integer(0); m + 1];
            mono[m] = *c * sign / fact;
            let target = if m % 2 == 0 { &mut cos_eta } else { &mut sin_eta };
            target[e] = target[e].add(&Poly::new(mono));
        }
    }
    // v = pre · (cos(ξη) sin ξ + sin(ξη) cos ξ)
    let (mut s, mut c) = (zero(), zero());
    for (i, p) in pre.iter().enumerate() {
        for e in 0..=order - i {
            s[i + e] = s[i + e].add(&cos_eta[e].scale(p));
            c[i + e] = c[i + e].add(&sin_eta[e].scale(p));
        }
    }
    VSeries { sin: s, cos: c }
}

/// Partial sum of the ε-expansion of `v` through `ε^order`.
pub fn exact_v_series(eps: f64, xi: f64, order: usize) -> f64 {
    let ser = v_series_coefficients(order);
    (0..=order)
        .map(|e| eps.powi(e as i32) * (ser.sin[e].eval_f64(xi) * xi.sin() + ser.cos[e].eval_f64(xi) * xi.cos()))
        .sum()
}

/// `v(ξ)` without expansion, continued past `ε = 1`.
pub fn exact_v(eps: f64, xi: f64) -> f64 {
    let r = 1.0 - eps;
    if r > 0.0 {
        (xi * r.sqrt()).sin() / r.sqrt()
    } else if r < 0.0 {
        (xi * (-r).sqrt()).sinh() / (-r).sqrt()
    } else {
        xi
    }
}
