//! Dense polynomials in `x`, `t` and `(x, t)`, exact rational helpers, and the
//! closed-form integrals the rest of the crate is built on.
//!
//! Coefficients are `f64`. Combinatorial factors (binomials, the half-factorial
//! coefficients `c_j = (2j-1)!!/2^j`) are formed as exact [`Rational`]s and only
//! converted at the point where they multiply a floating-point coefficient.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::ops::{Add, Div, Mul, Neg, Sub};

/// Largest index accepted by [`half_factorial_coeff`]; `(2j-1)!!` overflows
/// `i128` beyond it.
pub const MAX_HALF_FACTORIAL_INDEX: usize = 27;

/// Exact fraction in lowest terms with a positive denominator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Rational {
    num: i128,
    den: i128,
}

fn gcd(mut a: i128, mut b: i128) -> i128 {
    a = a.abs();
    b = b.abs();
    while b != 0 {
        let r = a % b;
        a = b;
        b = r;
    }
    a
}

impl Rational {
    pub const ZERO: Rational = Rational { num: 0, den: 1 };
    pub const ONE: Rational = Rational { num: 1, den: 1 };

    /// Panics if `den == 0`.
    pub fn new(num: i128, den: i128) -> Self {
        assert!(den != 0, "rational with zero denominator");
        let g = gcd(num, den).max(1);
        let sign = if den < 0 { -1 } else { 1 };
        Rational {
            num: sign * num / g,
            den: sign * den / g,
        }
    }

    pub const fn from_integer(n: i128) -> Self {
        Rational { num: n, den: 1 }
    }

    pub fn numer(&self) -> i128 {
        self.num
    }

    pub fn denom(&self) -> i128 {
        self.den
    }

    pub fn is_integer(&self) -> bool {
        self.den == 1
    }

    pub fn to_f64(self) -> f64 {
        self.num as f64 / self.den as f64
    }

    pub fn checked_mul(self, rhs: Rational) -> Option<Rational> {
        // cross-reduce first to keep intermediates small
        let g1 = gcd(self.num, rhs.den).max(1);
        let g2 = gcd(rhs.num, self.den).max(1);
        let num = (self.num / g1).checked_mul(rhs.num / g2)?;
        let den = (self.den / g2).checked_mul(rhs.den / g1)?;
        Some(Rational::new(num, den))
    }

    pub fn checked_add(self, rhs: Rational) -> Option<Rational> {
        let g = gcd(self.den, rhs.den).max(1);
        let lhs_scale = rhs.den / g;
        let rhs_scale = self.den / g;
        let num = self
            .num
            .checked_mul(lhs_scale)?
            .checked_add(rhs.num.checked_mul(rhs_scale)?)?;
        let den = self.den.checked_mul(lhs_scale)?;
        Some(Rational::new(num, den))
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

impl Mul for Rational {
    type Output = Rational;
    fn mul(self, rhs: Rational) -> Rational {
        self.checked_mul(rhs).expect("rational overflow in mul")
    }
}

impl Add for Rational {
    type Output = Rational;
    fn add(self, rhs: Rational) -> Rational {
        self.checked_add(rhs).expect("rational overflow in add")
    }
}

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational {
            num: -self.num,
            den: self.den,
        }
    }
}

impl Sub for Rational {
    type Output = Rational;
    fn sub(self, rhs: Rational) -> Rational {
        self + (-rhs)
    }
}

impl Div for Rational {
    type Output = Rational;
    fn div(self, rhs: Rational) -> Rational {
        assert!(rhs.num != 0, "rational division by zero");
        self * Rational::new(rhs.den, rhs.num)
    }
}

/// Binomial coefficient `C(n, r)`, zero when `r > n`.
pub fn binomial(n: usize, r: usize) -> i128 {
    if r > n {
        return 0;
    }
    let r = r.min(n - r);
    let mut acc: i128 = 1;
    for i in 0..r {
        // exact at every step: acc * (n - i) is divisible by (i + 1)
        acc = acc * (n - i) as i128 / (i + 1) as i128;
    }
    acc
}

/// `c_j = (2j-1)(2j-3)...1 / 2^j`, with `c_0 = 1`.
///
/// Built through `c_j = c_{j-1} (2j-1)/2`, so the recurrence holds exactly.
pub fn half_factorial_coeff(j: usize) -> Rational {
    assert!(
        j <= MAX_HALF_FACTORIAL_INDEX,
        "half_factorial_coeff index {j} exceeds {MAX_HALF_FACTORIAL_INDEX}"
    );
    (1..=j).fold(Rational::ONE, |acc, i| {
        acc * Rational::new(2 * i as i128 - 1, 2)
    })
}

/// Exact factor `c_j C(p, 2j) 4^j` multiplying `x^{p-2j} (k t)^j` when the heat
/// semigroup acts on `x^p`. Always an integer, `p! / ((p-2j)! j!)`.
pub fn heat_monomial_factor(p: usize, j: usize) -> Rational {
    if 2 * j > p {
        return Rational::ZERO;
    }
    half_factorial_coeff(j)
        * Rational::from_integer(binomial(p, 2 * j))
        * Rational::from_integer(1i128 << (2 * j))
}

/// Normalized even Gaussian moment `∫ y^{2j} (π s)^{-1/2} e^{-y²/s} dy = c_j s^j`,
/// where `s = 4kt` for the heat kernel. Odd moments vanish and are not exposed.
pub fn gaussian_moment(j: usize, s: f64) -> f64 {
    half_factorial_coeff(j).to_f64() * libm::pow(s, j as f64)
}

/// Which trigonometric factor an integral or series uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TrigKind {
    Cos,
    Sin,
}

/// `∫₀^l x^m trig(σ x) dx` in closed form.
///
/// For `σ l ≥ m` the integration-by-parts recurrence is run upward from
/// `m = 0`; each step multiplies earlier error by at most `m / (σ l)`. Below
/// that the Taylor series of the trig factor is integrated termwise instead.
pub fn trig_poly_integral(m: usize, sigma: f64, l: f64, kind: TrigKind) -> f64 {
    debug_assert!(sigma > 0.0 && l > 0.0);
    let (c, s) = trig_poly_integrals_upto(m, sigma, l);
    match kind {
        TrigKind::Cos => c[m],
        TrigKind::Sin => s[m],
    }
}

/// Both families `∫₀^l x^i cos(σx) dx` and `∫₀^l x^i sin(σx) dx` for `i = 0..=m`.
pub fn trig_poly_integrals_upto(m: usize, sigma: f64, l: f64) -> (Vec<f64>, Vec<f64>) {
    let theta = sigma * l;
    if theta >= m as f64 && theta > 0.0 {
        upward_trig_integrals(m, sigma, l)
    } else {
        let cos = (0..=m).map(|i| series_trig_integral(i, sigma, l, TrigKind::Cos)).collect();
        let sin = (0..=m).map(|i| series_trig_integral(i, sigma, l, TrigKind::Sin)).collect();
        (cos, sin)
    }
}

fn upward_trig_integrals(m: usize, sigma: f64, l: f64) -> (Vec<f64>, Vec<f64>) {
    let (sl, cl) = libm::sincos(sigma * l);
    let mut cos_int = vec![0.0; m + 1];
    let mut sin_int = vec![0.0; m + 1];
    cos_int[0] = sl / sigma;
    sin_int[0] = (1.0 - cl) / sigma;
    let mut lp = 1.0;
    for i in 1..=m {
        lp *= l;
        let fi = i as f64;
        cos_int[i] = lp * sl / sigma - fi / sigma * sin_int[i - 1];
        sin_int[i] = -lp * cl / sigma + fi / sigma * cos_int[i - 1];
    }
    (cos_int, sin_int)
}

fn series_trig_integral(m: usize, sigma: f64, l: f64, kind: TrigKind) -> f64 {
    // cos(σx) = Σ (-1)^n (σx)^{2n}/(2n)!, sin(σx) = Σ (-1)^n (σx)^{2n+1}/(2n+1)!
    let theta = sigma * l;
    let lm1 = libm::pow(l, (m + 1) as f64);
    let (mut term, mut power) = match kind {
        TrigKind::Cos => (1.0, 0usize),
        TrigKind::Sin => (theta, 1usize),
    };
    let mut sum = 0.0;
    for _ in 0..200 {
        let contrib = term / (m + power + 1) as f64;
        sum += contrib;
        if contrib.abs() < 1e-18 * sum.abs().max(1e-300) && power > 2 * (theta as usize + 1) {
            break;
        }
        term *= -theta * theta / ((power + 1) * (power + 2)) as f64;
        power += 2;
    }
    sum * lm1
}

/// Name of the polynomial variable for [`Poly1`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Var {
    X,
    T,
}

fn trim(coeffs: &mut Vec<f64>) {
    while coeffs.last() == Some(&0.0) {
        coeffs.pop();
    }
}

/// Univariate polynomial with dense coefficients, index = power.
#[derive(Clone, Debug, PartialEq)]
pub struct Poly1 {
    var: Var,
    coeffs: Vec<f64>,
}

impl Poly1 {
    pub fn new(var: Var, mut coeffs: Vec<f64>) -> Self {
        trim(&mut coeffs);
        Poly1 { var, coeffs }
    }

    pub fn zero(var: Var) -> Self {
        Poly1 {
            var,
            coeffs: Vec::new(),
        }
    }

    pub fn constant(var: Var, c: f64) -> Self {
        Poly1::new(var, vec![c])
    }

    pub fn monomial(var: Var, power: usize, c: f64) -> Self {
        let mut coeffs = vec![0.0; power + 1];
        coeffs[power] = c;
        Poly1::new(var, coeffs)
    }

    pub fn var(&self) -> Var {
        self.var
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn coeff(&self, power: usize) -> f64 {
        self.coeffs.get(power).copied().unwrap_or(0.0)
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn eval(&self, at: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * at + c)
    }

    pub fn derivative(&self) -> Poly1 {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, &c)| c * i as f64)
            .collect();
        Poly1::new(self.var, coeffs)
    }

    /// Antiderivative vanishing at zero.
    pub fn antiderivative(&self) -> Poly1 {
        let mut coeffs = Vec::with_capacity(self.coeffs.len() + 1);
        coeffs.push(0.0);
        coeffs.extend(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(i, &c)| c / (i + 1) as f64),
        );
        Poly1::new(self.var, coeffs)
    }

    pub fn scale(&self, factor: f64) -> Poly1 {
        Poly1::new(self.var, self.coeffs.iter().map(|c| c * factor).collect())
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.abs()))
    }

    fn zip_with(&self, rhs: &Poly1, op: impl Fn(f64, f64) -> f64) -> Poly1 {
        assert_eq!(self.var, rhs.var, "polynomials in different variables");
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let coeffs = (0..n).map(|i| op(self.coeff(i), rhs.coeff(i))).collect();
        Poly1::new(self.var, coeffs)
    }
}

impl Add for &Poly1 {
    type Output = Poly1;
    fn add(self, rhs: &Poly1) -> Poly1 {
        self.zip_with(rhs, |a, b| a + b)
    }
}

impl Sub for &Poly1 {
    type Output = Poly1;
    fn sub(self, rhs: &Poly1) -> Poly1 {
        self.zip_with(rhs, |a, b| a - b)
    }
}

impl Mul for &Poly1 {
    type Output = Poly1;
    fn mul(self, rhs: &Poly1) -> Poly1 {
        assert_eq!(self.var, rhs.var, "polynomials in different variables");
        if self.is_zero() || rhs.is_zero() {
            return Poly1::zero(self.var);
        }
        let mut out = vec![0.0; self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly1::new(self.var, out)
    }
}

impl Neg for &Poly1 {
    type Output = Poly1;
    fn neg(self) -> Poly1 {
        self.scale(-1.0)
    }
}

/// Parity of a polynomial in `x`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn admits(self, power: usize) -> bool {
        match self {
            Parity::Even => power.is_multiple_of(2),
            Parity::Odd => power % 2 == 1,
        }
    }
}

impl fmt::Display for Parity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Parity::Even => "even",
            Parity::Odd => "odd",
        })
    }
}

/// Bivariate polynomial; `coeff(i, m)` multiplies `x^i t^m`.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct Poly2 {
    // rows[i] holds the t-coefficients of x^i
    rows: Vec<Vec<f64>>,
}

impl Poly2 {
    pub fn zero() -> Self {
        Poly2 { rows: Vec::new() }
    }

    pub fn from_coeffs(rows: Vec<Vec<f64>>) -> Self {
        let mut p = Poly2 { rows };
        p.normalize();
        p
    }

    pub fn constant(c: f64) -> Self {
        Poly2::from_coeffs(vec![vec![c]])
    }

    pub fn monomial(x_power: usize, t_power: usize, c: f64) -> Self {
        let mut p = Poly2::zero();
        p.add_term(x_power, t_power, c);
        p
    }

    /// Lift a polynomial in either variable.
    pub fn from_poly1(p: &Poly1) -> Self {
        match p.var() {
            Var::X => Poly2::from_coeffs(p.coeffs().iter().map(|&c| vec![c]).collect()),
            Var::T => Poly2::from_coeffs(vec![p.coeffs().to_vec()]),
        }
    }

    fn normalize(&mut self) {
        for row in self.rows.iter_mut() {
            trim(row);
        }
        while self.rows.last().is_some_and(|r| r.is_empty()) {
            self.rows.pop();
        }
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn coeff(&self, x_power: usize, t_power: usize) -> f64 {
        self.rows
            .get(x_power)
            .and_then(|r| r.get(t_power))
            .copied()
            .unwrap_or(0.0)
    }

    /// Adds `c x^i t^m` in place.
    pub fn add_term(&mut self, x_power: usize, t_power: usize, c: f64) {
        if c == 0.0 {
            return;
        }
        if self.rows.len() <= x_power {
            self.rows.resize(x_power + 1, Vec::new());
        }
        let row = &mut self.rows[x_power];
        if row.len() <= t_power {
            row.resize(t_power + 1, 0.0);
        }
        row[t_power] += c;
        self.normalize();
    }

    pub fn is_zero(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn x_degree(&self) -> Option<usize> {
        self.rows.len().checked_sub(1)
    }

    pub fn t_degree(&self) -> Option<usize> {
        self.rows.iter().filter_map(|r| r.len().checked_sub(1)).max()
    }

    /// Nonzero terms as `(x_power, t_power, coeff)`.
    pub fn terms(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.rows.iter().enumerate().flat_map(|(i, row)| {
            row.iter()
                .enumerate()
                .filter(|(_, c)| **c != 0.0)
                .map(move |(m, &c)| (i, m, c))
        })
    }

    pub fn eval(&self, x: f64, t: f64) -> f64 {
        self.rows.iter().rev().fold(0.0, |acc, row| {
            let inner = row.iter().rev().fold(0.0, |a, &c| a * t + c);
            acc * x + inner
        })
    }

    pub fn deriv_x(&self) -> Poly2 {
        let rows = self
            .rows
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, row)| row.iter().map(|c| c * i as f64).collect())
            .collect();
        Poly2::from_coeffs(rows)
    }

    pub fn deriv_t(&self) -> Poly2 {
        let rows = self
            .rows
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .skip(1)
                    .map(|(m, c)| c * m as f64)
                    .collect()
            })
            .collect();
        Poly2::from_coeffs(rows)
    }

    /// Antiderivative in `t` vanishing at `t = 0`.
    pub fn antideriv_t(&self) -> Poly2 {
        let rows = self
            .rows
            .iter()
            .map(|row| {
                let mut out = Vec::with_capacity(row.len() + 1);
                out.push(0.0);
                out.extend(row.iter().enumerate().map(|(m, c)| c / (m + 1) as f64));
                out
            })
            .collect();
        Poly2::from_coeffs(rows)
    }

    /// Antiderivative in `x` vanishing at `x = 0`.
    pub fn antideriv_x(&self) -> Poly2 {
        let mut rows = Vec::with_capacity(self.rows.len() + 1);
        rows.push(Vec::new());
        rows.extend(
            self.rows
                .iter()
                .enumerate()
                .map(|(i, row)| row.iter().map(|c| c / (i + 1) as f64).collect()),
        );
        Poly2::from_coeffs(rows)
    }

    /// `P(x0, t)` as a polynomial in `t`.
    pub fn restrict_x(&self, x0: f64) -> Poly1 {
        let n = self.t_degree().map_or(0, |d| d + 1);
        let mut out = vec![0.0; n];
        for row in self.rows.iter().rev() {
            for (m, o) in out.iter_mut().enumerate() {
                *o = *o * x0 + row.get(m).copied().unwrap_or(0.0);
            }
        }
        Poly1::new(Var::T, out)
    }

    /// `P(x, t0)` as a polynomial in `x`.
    pub fn restrict_t(&self, t0: f64) -> Poly1 {
        let coeffs = self
            .rows
            .iter()
            .map(|row| row.iter().rev().fold(0.0, |a, &c| a * t0 + c))
            .collect();
        Poly1::new(Var::X, coeffs)
    }

    pub fn scale(&self, factor: f64) -> Poly2 {
        Poly2::from_coeffs(
            self.rows
                .iter()
                .map(|r| r.iter().map(|c| c * factor).collect())
                .collect(),
        )
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.terms().fold(0.0, |m, (_, _, c)| m.max(c.abs()))
    }

    /// First monomial `(x_power, t_power)` whose x-power breaks `parity`.
    pub fn parity_violation(&self, parity: Parity) -> Option<(usize, usize)> {
        self.terms()
            .find(|(i, _, _)| !parity.admits(*i))
            .map(|(i, m, _)| (i, m))
    }

    /// True when the t-coefficients do not depend on time.
    pub fn is_time_independent(&self) -> bool {
        self.t_degree().is_none_or(|d| d == 0)
    }

    fn zip_with(&self, rhs: &Poly2, op: impl Fn(f64, f64) -> f64) -> Poly2 {
        let nx = self.rows.len().max(rhs.rows.len());
        let rows = (0..nx)
            .map(|i| {
                let a = self.rows.get(i).map(Vec::as_slice).unwrap_or(&[]);
                let b = rhs.rows.get(i).map(Vec::as_slice).unwrap_or(&[]);
                let nt = a.len().max(b.len());
                (0..nt)
                    .map(|m| {
                        op(
                            a.get(m).copied().unwrap_or(0.0),
                            b.get(m).copied().unwrap_or(0.0),
                        )
                    })
                    .collect()
            })
            .collect();
        Poly2::from_coeffs(rows)
    }
}

impl Add for &Poly2 {
    type Output = Poly2;
    fn add(self, rhs: &Poly2) -> Poly2 {
        self.zip_with(rhs, |a, b| a + b)
    }
}

impl Sub for &Poly2 {
    type Output = Poly2;
    fn sub(self, rhs: &Poly2) -> Poly2 {
        self.zip_with(rhs, |a, b| a - b)
    }
}

impl Mul for &Poly2 {
    type Output = Poly2;
    fn mul(self, rhs: &Poly2) -> Poly2 {
        let mut out = Poly2::zero();
        for (i, m, a) in self.terms() {
            for (j, n, b) in rhs.terms() {
                out.add_term(i + j, m + n, a * b);
            }
        }
        out
    }
}

impl Neg for &Poly2 {
    type Output = Poly2;
    fn neg(self) -> Poly2 {
        self.scale(-1.0)
    }
}
