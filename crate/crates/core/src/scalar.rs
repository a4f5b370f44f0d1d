//! Exact scalars in ℚ(√2) + iℚ(√2).

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};

/// Rational number with arbitrary precision.
pub type Q = BigRational;

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn qf(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

/// Parses an integer, a fraction `p/q`, or a finite decimal into an exact rational.
pub fn parse_rational(s: &str) -> Option<Q> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().ok()?;
        let d: BigInt = d.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        return Some(Q::new(n, d));
    }
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().ok()?),
        None => (s, 0),
    };
    let (neg, body) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int, frac) = body.split_once('.').unwrap_or((body, ""));
    if int.is_empty() && frac.is_empty() {
        return None;
    }
    if !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits: BigInt = format!("{}{}", if int.is_empty() { "0" } else { int }, frac)
        .parse()
        .ok()?;
    let scale = exp - frac.len() as i32;
    let ten = BigInt::from(10);
    let mut r = Q::from_integer(digits);
    if scale >= 0 {
        r *= Q::from_integer(num_traits::pow(ten, scale as usize));
    } else {
        r /= Q::from_integer(num_traits::pow(ten, (-scale) as usize));
    }
    Some(if neg { -r } else { r })
}

pub fn q_to_f64(x: &Q) -> f64 {
    x.to_f64().unwrap_or_else(|| {
        let n = x.numer().to_f64().unwrap_or(f64::NAN);
        let d = x.denom().to_f64().unwrap_or(f64::NAN);
        n / d
    })
}

/// Element a + b√2 of the real quadratic field ℚ(√2).
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct QSqrt2 {
    pub a: Q,
    pub b: Q,
}

impl QSqrt2 {
    pub fn new(a: Q, b: Q) -> Self {
        Self { a, b }
    }
    pub fn rational(a: Q) -> Self {
        Self { a, b: Q::zero() }
    }
    pub fn zero() -> Self {
        Self::rational(Q::zero())
    }
    pub fn one() -> Self {
        Self::rational(Q::one())
    }
    pub fn sqrt2() -> Self {
        Self::new(Q::zero(), Q::one())
    }
    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }
    /// Field norm a² − 2b².
    pub fn norm(&self) -> Q {
        &self.a * &self.a - q(2) * &self.b * &self.b
    }
    pub fn conj_sqrt2(&self) -> Self {
        Self::new(self.a.clone(), -&self.b)
    }
    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let n = self.norm();
        Some(Self::new(&self.a / &n, -&self.b / &n))
    }
    pub fn to_f64(&self) -> f64 {
        q_to_f64(&self.a) + q_to_f64(&self.b) * std::f64::consts::SQRT_2
    }
    /// Exact sign: −1, 0 or 1.
    pub fn signum(&self) -> i32 {
        // Compare a with −b√2 by squaring when the signs differ.
        let sa = sign_q(&self.a);
        let sb = sign_q(&self.b);
        if sb == 0 {
            return sa;
        }
        if sa == 0 {
            return sb;
        }
        if sa == sb {
            return sa;
        }
        let a2 = &self.a * &self.a;
        let b2 = q(2) * &self.b * &self.b;
        if a2 > b2 {
            sa
        } else if a2 < b2 {
            sb
        } else {
            0
        }
    }
    pub fn scale(&self, r: &Q) -> Self {
        Self::new(&self.a * r, &self.b * r)
    }
}

fn sign_q(x: &Q) -> i32 {
    if x.is_positive() {
        1
    } else if x.is_negative() {
        -1
    } else {
        0
    }
}

impl Add for &QSqrt2 {
    type Output = QSqrt2;
    fn add(self, o: &QSqrt2) -> QSqrt2 {
        QSqrt2::new(&self.a + &o.a, &self.b + &o.b)
    }
}
impl Sub for &QSqrt2 {
    type Output = QSqrt2;
    fn sub(self, o: &QSqrt2) -> QSqrt2 {
        QSqrt2::new(&self.a - &o.a, &self.b - &o.b)
    }
}
impl Mul for &QSqrt2 {
    type Output = QSqrt2;
    fn mul(self, o: &QSqrt2) -> QSqrt2 {
        if self.b.is_zero() && o.b.is_zero() {
            return QSqrt2::rational(&self.a * &o.a);
        }
        QSqrt2::new(
            &self.a * &o.a + q(2) * &self.b * &o.b,
            &self.a * &o.b + &self.b * &o.a,
        )
    }
}
impl Neg for &QSqrt2 {
    type Output = QSqrt2;
    fn neg(self) -> QSqrt2 {
        QSqrt2::new(-&self.a, -&self.b)
    }
}

/// Complex scalar (a + b√2) + i(c + d√2).
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct ExactScalar {
    pub re: QSqrt2,
    pub im: QSqrt2,
}

impl ExactScalar {
    pub fn new(re: QSqrt2, im: QSqrt2) -> Self {
        Self { re, im }
    }
    pub fn zero() -> Self {
        Self::new(QSqrt2::zero(), QSqrt2::zero())
    }
    pub fn one() -> Self {
        Self::new(QSqrt2::one(), QSqrt2::zero())
    }
    pub fn i() -> Self {
        Self::new(QSqrt2::zero(), QSqrt2::one())
    }
    pub fn sqrt2() -> Self {
        Self::new(QSqrt2::sqrt2(), QSqrt2::zero())
    }
    pub fn int(n: i64) -> Self {
        Self::rational(q(n))
    }
    pub fn frac(n: i64, d: i64) -> Self {
        Self::rational(qf(n, d))
    }
    pub fn rational(r: Q) -> Self {
        Self::new(QSqrt2::rational(r), QSqrt2::zero())
    }
    pub fn real(r: QSqrt2) -> Self {
        Self::new(r, QSqrt2::zero())
    }
    /// p + q√2 with rational p, q.
    pub fn surd(p: Q, s: Q) -> Self {
        Self::real(QSqrt2::new(p, s))
    }
    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
    pub fn is_one(&self) -> bool {
        self.im.is_zero() && self.re.b.is_zero() && self.re.a.is_one()
    }
    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }
    pub fn conj(&self) -> Self {
        Self::new(self.re.clone(), -&self.im)
    }
    /// |z|² as an element of ℚ(√2).
    pub fn abs2(&self) -> QSqrt2 {
        &(&self.re * &self.re) + &(&self.im * &self.im)
    }
    pub fn inv(&self) -> Option<Self> {
        let n = self.abs2().inv()?;
        let c = self.conj();
        Some(Self::new(&c.re * &n, &c.im * &n))
    }
    pub fn scale_q(&self, r: &Q) -> Self {
        if r.is_one() {
            return self.clone();
        }
        Self::new(self.re.scale(r), self.im.scale(r))
    }
    pub fn to_c64(&self) -> num_complex::Complex64 {
        num_complex::Complex64::new(self.re.to_f64(), self.im.to_f64())
    }
}

impl Add for &ExactScalar {
    type Output = ExactScalar;
    fn add(self, o: &ExactScalar) -> ExactScalar {
        ExactScalar::new(&self.re + &o.re, &self.im + &o.im)
    }
}
impl Sub for &ExactScalar {
    type Output = ExactScalar;
    fn sub(self, o: &ExactScalar) -> ExactScalar {
        ExactScalar::new(&self.re - &o.re, &self.im - &o.im)
    }
}
impl Mul for &ExactScalar {
    type Output = ExactScalar;
    fn mul(self, o: &ExactScalar) -> ExactScalar {
        if self.im.is_zero() && o.im.is_zero() {
            return ExactScalar::real(&self.re * &o.re);
        }
        ExactScalar::new(
            &(&self.re * &o.re) - &(&self.im * &o.im),
            &(&self.re * &o.im) + &(&self.im * &o.re),
        )
    }
}
impl Div for &ExactScalar {
    type Output = ExactScalar;
    fn div(self, o: &ExactScalar) -> ExactScalar {
        self * &o.inv().expect("division by zero scalar")
    }
}
impl Neg for &ExactScalar {
    type Output = ExactScalar;
    fn neg(self) -> ExactScalar {
        ExactScalar::new(-&self.re, -&self.im)
    }
}
impl Neg for ExactScalar {
    type Output = ExactScalar;
    fn neg(self) -> ExactScalar {
        -&self
    }
}
macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for ExactScalar {
            type Output = ExactScalar;
            fn $m(self, o: ExactScalar) -> ExactScalar {
                (&self).$m(&o)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
forward_owned!(Div, div);

impl AddAssign<&ExactScalar> for ExactScalar {
    fn add_assign(&mut self, o: &ExactScalar) {
        self.re.a += &o.re.a;
        self.re.b += &o.re.b;
        self.im.a += &o.im.a;
        self.im.b += &o.im.b;
    }
}
impl SubAssign<&ExactScalar> for ExactScalar {
    fn sub_assign(&mut self, o: &ExactScalar) {
        self.re.a -= &o.re.a;
        self.re.b -= &o.re.b;
        self.im.a -= &o.im.a;
        self.im.b -= &o.im.b;
    }
}

impl fmt::Display for QSqrt2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.a.is_zero(), self.b.is_zero()) {
            (_, true) => write!(f, "{}", self.a),
            (true, false) => write!(f, "{}√2", self.b),
            (false, false) => write!(f, "{}+{}√2", self.a, self.b),
        }
    }
}

impl fmt::Display for ExactScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            write!(f, "{}", self.re)
        } else if self.re.is_zero() {
            write!(f, "i({})", self.im)
        } else {
            write!(f, "({})+i({})", self.re, self.im)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sqrt2_squares_to_two() {
        let s = ExactScalar::sqrt2();
        assert_eq!(&s * &s, ExactScalar::int(2));
    }

    #[test]
    fn inverse_roundtrip() {
        let z = ExactScalar::new(QSqrt2::new(qf(3, 2), q(-1)), QSqrt2::new(q(2), qf(1, 3)));
        assert_eq!(&z * &z.inv().unwrap(), ExactScalar::one());
    }

    #[test]
    fn signum_of_surds() {
        assert_eq!(QSqrt2::new(q(1), q(-1)).signum(), -1);
        assert_eq!(QSqrt2::new(q(2), q(-1)).signum(), 1);
        assert_eq!(QSqrt2::new(q(-3), q(2)).signum(), -1);
        assert_eq!(QSqrt2::zero().signum(), 0);
    }

    #[test]
    fn parses_decimals_and_fractions() {
        assert_eq!(parse_rational("0.25"), Some(qf(1, 4)));
        assert_eq!(parse_rational("-3/6"), Some(qf(-1, 2)));
        assert_eq!(parse_rational("1e-2"), Some(qf(1, 100)));
        assert_eq!(parse_rational("7"), Some(q(7)));
        assert_eq!(parse_rational("x"), None);
        assert_eq!(parse_rational("1/0"), None);
    }
}
