//! Coefficient rings.
//!
//! Every computation in the crate is generic over a [`Scalar`]. Exact work
//! uses [`Rational`]; [`TrigScalar`] adjoins the phase functions of the
//! trigonometric frame changes; `f64` is a cross-checking mode with a fixed
//! tolerance. Which ring is in use is a type parameter, so one computation
//! never mixes modes.

use std::fmt;

use num_bigint::BigInt;
use num_complex::Complex;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

/// Tolerance of the floating-point mode.
pub const FLOAT_TOLERANCE: f64 = 1e-9;

pub trait Scalar: Clone + PartialEq + fmt::Debug + Send + Sync + 'static {
    fn zero() -> Self;
    fn one() -> Self;
    fn from_rational(q: &Rational) -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, rhs: &Self) -> Self;
    fn neg(&self) -> Self;
    fn try_mul(&self, rhs: &Self) -> Result<Self>;
    fn scale(&self, q: &Rational) -> Self;
    /// Human and machine readable rendering (rationals as `p/q`).
    fn render(&self) -> String;

    fn from_int(n: i64) -> Self {
        Self::from_rational(&rat(n, 1))
    }

    fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.neg())
    }

    /// `false` when the value depends on the phase functions.
    fn is_constant(&self) -> bool {
        true
    }

    /// Partial derivatives with respect to the phases `f` and `g`.
    fn phase_partials(&self) -> (Self, Self) {
        (Self::zero(), Self::zero())
    }
}

/// A [`Scalar`] closed under multiplication and division.
pub trait Field: Scalar {
    fn mul(&self, rhs: &Self) -> Self;
    fn inv(&self) -> Option<Self>;

    fn div(&self, rhs: &Self) -> Option<Self> {
        rhs.inv().map(|r| self.mul(&r))
    }

    /// Preference for pivot selection in elimination; larger is better.
    fn pivot_weight(&self) -> f64 {
        if self.is_zero() {
            0.0
        } else {
            1.0
        }
    }
}

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Parses `p/q` or `p` with `q > 0` and `gcd(p, q) = 1`.
pub fn parse_rational(s: &str) -> std::result::Result<Rational, String> {
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n, Some(d)),
        None => (s, None),
    };
    let num: BigInt = num
        .parse()
        .map_err(|_| format!("`{s}` is not a rational number"))?;
    let den: BigInt = match den {
        Some(d) => d
            .parse()
            .map_err(|_| format!("`{s}` is not a rational number"))?,
        None => BigInt::one(),
    };
    if !den.is_positive() {
        return Err(format!("`{s}`: denominator must be positive"));
    }
    if !num.gcd(&den).is_one() {
        return Err(format!("`{s}` is not in lowest terms"));
    }
    Ok(Rational::new_raw(num, den))
}

/// Exact square root of a non-negative rational, if it is rational.
pub fn rational_sqrt(q: &Rational) -> Option<Rational> {
    if q.is_negative() {
        return None;
    }
    let n = q.numer().sqrt();
    let d = q.denom().sqrt();
    (&n * &n == *q.numer() && &d * &d == *q.denom()).then(|| Rational::new(n, d))
}

impl Scalar for Rational {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn from_rational(q: &Rational) -> Self {
        q.clone()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn neg(&self) -> Self {
        -self
    }
    fn sub(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn try_mul(&self, rhs: &Self) -> Result<Self> {
        Ok(self * rhs)
    }
    fn scale(&self, q: &Rational) -> Self {
        self * q
    }
    fn render(&self) -> String {
        self.to_string()
    }
}

impl Field for Rational {
    fn mul(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn inv(&self) -> Option<Self> {
        (!Zero::is_zero(self)).then(|| self.recip())
    }
}

impl Scalar for f64 {
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_rational(q: &Rational) -> Self {
        q.to_f64().unwrap_or(f64::NAN)
    }
    fn is_zero(&self) -> bool {
        self.abs() <= FLOAT_TOLERANCE
    }
    fn add(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn neg(&self) -> Self {
        -self
    }
    fn sub(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn try_mul(&self, rhs: &Self) -> Result<Self> {
        Ok(self * rhs)
    }
    fn scale(&self, q: &Rational) -> Self {
        self * f64::from_rational(q)
    }
    fn render(&self) -> String {
        format!("{self:?}")
    }
}

impl Field for f64 {
    fn mul(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn inv(&self) -> Option<Self> {
        (!Scalar::is_zero(self)).then(|| 1.0 / self)
    }
    fn pivot_weight(&self) -> f64 {
        if Scalar::is_zero(self) {
            0.0
        } else {
            self.abs()
        }
    }
}

impl<S: Field> Scalar for Complex<S> {
    fn zero() -> Self {
        Complex::new(S::zero(), S::zero())
    }
    fn one() -> Self {
        Complex::new(S::one(), S::zero())
    }
    fn from_rational(q: &Rational) -> Self {
        Complex::new(S::from_rational(q), S::zero())
    }
    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
    fn add(&self, rhs: &Self) -> Self {
        Complex::new(self.re.add(&rhs.re), self.im.add(&rhs.im))
    }
    fn neg(&self) -> Self {
        Complex::new(self.re.neg(), self.im.neg())
    }
    fn try_mul(&self, rhs: &Self) -> Result<Self> {
        Ok(Field::mul(self, rhs))
    }
    fn scale(&self, q: &Rational) -> Self {
        Complex::new(self.re.scale(q), self.im.scale(q))
    }
    fn render(&self) -> String {
        match (self.re.is_zero(), self.im.is_zero()) {
            (_, true) => self.re.render(),
            (true, false) => format!("{}i", self.im.render()),
            (false, false) => format!("{} + {}i", self.re.render(), self.im.render()),
        }
    }
}

impl<S: Field> Field for Complex<S> {
    fn mul(&self, rhs: &Self) -> Self {
        Complex::new(
            self.re.mul(&rhs.re).sub(&self.im.mul(&rhs.im)),
            self.re.mul(&rhs.im).add(&self.im.mul(&rhs.re)),
        )
    }
    fn inv(&self) -> Option<Self> {
        let norm = self.re.mul(&self.re).add(&self.im.mul(&self.im));
        let r = norm.inv()?;
        Some(Complex::new(self.re.mul(&r), self.im.neg().mul(&r)))
    }
    fn pivot_weight(&self) -> f64 {
        self.re.pivot_weight().max(self.im.pivot_weight())
    }
}

/// Basis label of the trig extension.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrigBasis {
    One = 0,
    SinF = 1,
    CosF = 2,
    SinG = 3,
    CosG = 4,
}

const TRIG_NAMES: [&str; 5] = ["", "sin f", "cos f", "sin g", "cos g"];

/// Element of the free rational module on `{1, sin f, cos f, sin g, cos g}`.
///
/// Multiplication is only defined when one factor is a rational constant.
#[derive(Debug, Clone, PartialEq)]
pub struct TrigScalar([Rational; 5]);

/// A point on the phase torus with rational sine and cosine values.
#[derive(Debug, Clone, PartialEq)]
pub struct PhasePoint {
    pub sin_f: Rational,
    pub cos_f: Rational,
    pub sin_g: Rational,
    pub cos_g: Rational,
}

impl PhasePoint {
    /// Five distinct angles with rational sine and cosine:
    /// 0, π/2, π, 3π/2 and atan(4/3).
    pub fn circle_samples() -> [(Rational, Rational); 5] {
        [
            (rat(0, 1), rat(1, 1)),
            (rat(1, 1), rat(0, 1)),
            (rat(0, 1), rat(-1, 1)),
            (rat(-1, 1), rat(0, 1)),
            (rat(4, 5), rat(3, 5)),
        ]
    }

    /// Tensor grid of [`Self::circle_samples`]; unisolvent for trig
    /// polynomials of degree at most two in each phase.
    pub fn grid() -> Vec<PhasePoint> {
        let samples = Self::circle_samples();
        let mut out = Vec::with_capacity(25);
        for (sf, cf) in &samples {
            for (sg, cg) in &samples {
                out.push(PhasePoint {
                    sin_f: sf.clone(),
                    cos_f: cf.clone(),
                    sin_g: sg.clone(),
                    cos_g: cg.clone(),
                });
            }
        }
        out
    }
}

impl TrigScalar {
    pub fn constant(q: Rational) -> Self {
        let mut c: [Rational; 5] = Default::default();
        c[0] = q;
        TrigScalar(c)
    }

    pub fn basis(b: TrigBasis) -> Self {
        let mut c: [Rational; 5] = Default::default();
        c[b as usize] = One::one();
        TrigScalar(c)
    }

    pub fn coefficients(&self) -> &[Rational; 5] {
        &self.0
    }

    pub fn evaluate(&self, p: &PhasePoint) -> Rational {
        let c = &self.0;
        &c[0] + &c[1] * &p.sin_f + &c[2] * &p.cos_f + &c[3] * &p.sin_g + &c[4] * &p.cos_g
    }

    fn constant_part(&self) -> Option<&Rational> {
        self.0[1..]
            .iter()
            .all(Zero::is_zero)
            .then_some(&self.0[0])
    }
}

impl Scalar for TrigScalar {
    fn zero() -> Self {
        TrigScalar(Default::default())
    }
    fn one() -> Self {
        Self::constant(One::one())
    }
    fn from_rational(q: &Rational) -> Self {
        Self::constant(q.clone())
    }
    fn is_zero(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }
    fn add(&self, rhs: &Self) -> Self {
        TrigScalar(std::array::from_fn(|i| &self.0[i] + &rhs.0[i]))
    }
    fn neg(&self) -> Self {
        TrigScalar(std::array::from_fn(|i| -&self.0[i]))
    }
    fn try_mul(&self, rhs: &Self) -> Result<Self> {
        if let Some(q) = self.constant_part() {
            Ok(rhs.scale(q))
        } else if let Some(q) = rhs.constant_part() {
            Ok(self.scale(q))
        } else {
            Err(Error::ExtensionOverflow(self.render(), rhs.render()))
        }
    }
    fn scale(&self, q: &Rational) -> Self {
        TrigScalar(std::array::from_fn(|i| &self.0[i] * q))
    }
    fn render(&self) -> String {
        let mut parts = Vec::new();
        for (i, c) in self.0.iter().enumerate() {
            if Zero::is_zero(c) {
                continue;
            }
            parts.push(match (i, c.is_one()) {
                (0, _) => c.to_string(),
                (_, true) => TRIG_NAMES[i].to_string(),
                _ if *c == -<Rational as One>::one() => format!("-{}", TRIG_NAMES[i]),
                _ => format!("{c} {}", TRIG_NAMES[i]),
            });
        }
        if parts.is_empty() {
            "0".into()
        } else {
            parts.join(" + ")
        }
    }
    fn is_constant(&self) -> bool {
        self.constant_part().is_some()
    }
    fn phase_partials(&self) -> (Self, Self) {
        // d(sin) = cos, d(cos) = -sin
        let c = &self.0;
        let mut df: [Rational; 5] = Default::default();
        df[TrigBasis::CosF as usize] = c[1].clone();
        df[TrigBasis::SinF as usize] = -&c[2];
        let mut dg: [Rational; 5] = Default::default();
        dg[TrigBasis::CosG as usize] = c[3].clone();
        dg[TrigBasis::SinG as usize] = -&c[4];
        (TrigScalar(df), TrigScalar(dg))
    }
}

impl fmt::Display for TrigScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_requires_lowest_terms() {
        assert_eq!(parse_rational("-3/2").unwrap(), rat(-3, 2));
        assert_eq!(parse_rational("7").unwrap(), rat(7, 1));
        assert!(parse_rational("2/4").is_err());
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("1/-2").is_err());
        assert!(parse_rational("x").is_err());
    }

    #[test]
    fn sqrt_of_squares_only() {
        assert_eq!(rational_sqrt(&rat(9, 4)), Some(rat(3, 2)));
        assert_eq!(rational_sqrt(&rat(2, 1)), None);
        assert_eq!(rational_sqrt(&rat(-4, 1)), None);
    }

    #[test]
    fn trig_products_with_constants_only() {
        let s = TrigScalar::basis(TrigBasis::SinF);
        let c = TrigScalar::basis(TrigBasis::CosF);
        let two = TrigScalar::from_int(2);
        assert_eq!(s.try_mul(&two).unwrap(), s.scale(&rat(2, 1)));
        assert!(matches!(s.try_mul(&c), Err(Error::ExtensionOverflow(..))));
        assert!(matches!(s.try_mul(&s), Err(Error::ExtensionOverflow(..))));
    }

    #[test]
    fn trig_partials() {
        let x = TrigScalar::basis(TrigBasis::CosF).add(&TrigScalar::basis(TrigBasis::SinG).scale(&rat(3, 1)));
        let (df, dg) = x.phase_partials();
        assert_eq!(df, TrigScalar::basis(TrigBasis::SinF).neg());
        assert_eq!(dg, TrigScalar::basis(TrigBasis::CosG).scale(&rat(3, 1)));
        assert!(!x.is_constant());
    }

    #[test]
    fn grid_points_lie_on_the_torus() {
        for p in PhasePoint::grid() {
            assert_eq!(&p.sin_f * &p.sin_f + &p.cos_f * &p.cos_f, rat(1, 1));
            assert_eq!(&p.sin_g * &p.sin_g + &p.cos_g * &p.cos_g, rat(1, 1));
        }
    }

    #[test]
    fn float_tolerance() {
        assert!(Scalar::is_zero(&1e-12));
        assert!(!Scalar::is_zero(&1e-6));
    }

    #[test]
    fn gaussian_inverse() {
        let z = Complex::new(rat(1, 1), rat(2, 1));
        let w = Field::inv(&z).unwrap();
        assert_eq!(Field::mul(&z, &w), <Complex<Rational> as Scalar>::one());
    }
}
