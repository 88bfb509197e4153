//! Exact angle arithmetic and the complex 3×3 linear algebra kernel.
//!
//! Angles are rationals `q` standing for `qπ`. Every degeneracy predicate is
//! decided on `q` exactly; trigonometric values are plain `f64`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::{Matrix3, SymmetricEigen, Vector3};
use num_complex::Complex64;
use num_rational::Rational64;
use num_traits::{One, Signed, Zero};
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::tolerances;

pub type Cx = Complex64;
pub type Vec3 = Vector3<Cx>;
pub type Mat3 = Matrix3<Cx>;

/// The angle `qπ` for a reduced rational `q`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PiRational(Rational64);

impl PiRational {
    pub fn new(num: i64, den: i64) -> Self {
        PiRational(Rational64::new(num, den))
    }

    pub fn from_ratio(q: Rational64) -> Self {
        PiRational(q)
    }

    pub fn zero() -> Self {
        PiRational(Rational64::zero())
    }

    /// The angle π.
    pub fn pi() -> Self {
        PiRational(Rational64::one())
    }

    pub fn ratio(self) -> Rational64 {
        self.0
    }

    pub fn numer(self) -> i64 {
        *self.0.numer()
    }

    pub fn denom(self) -> i64 {
        *self.0.denom()
    }

    pub fn is_zero(self) -> bool {
        self.0.is_zero()
    }

    pub fn is_integer(self) -> bool {
        self.0.is_integer()
    }

    pub fn is_positive(self) -> bool {
        self.0.is_positive()
    }

    pub fn is_negative(self) -> bool {
        self.0.is_negative()
    }

    /// Coefficient of π as a float.
    pub fn coeff(self) -> f64 {
        self.numer() as f64 / self.denom() as f64
    }

    pub fn radians(self) -> f64 {
        self.coeff() * std::f64::consts::PI
    }

    /// Strictly inside (0, π).
    pub fn in_open_unit(self) -> bool {
        self.0 > Rational64::zero() && self.0 < Rational64::one()
    }

    pub fn sin(self) -> f64 {
        sin_pi(self)
    }

    pub fn cos(self) -> f64 {
        cos_pi(self)
    }

    /// `e^{iqπ}`, with exact zeros at quarter turns.
    pub fn cis(self) -> Cx {
        Cx::new(cos_pi(self), sin_pi(self))
    }
}

impl fmt::Display for PiRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (n, d) = (self.numer(), self.denom());
        let sign = if n < 0 { "-" } else { "" };
        let n = n.abs();
        match (n, d) {
            (0, _) => write!(f, "0"),
            (1, 1) => write!(f, "{sign}π"),
            (_, 1) => write!(f, "{sign}{n}π"),
            (1, _) => write!(f, "{sign}π/{d}"),
            _ => write!(f, "{sign}{n}π/{d}"),
        }
    }
}

impl fmt::Debug for PiRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Serialize for PiRational {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        serialize_ratio(self.0, s)
    }
}

/// Writes a rational as `{"num": n, "den": d}`.
pub fn serialize_ratio<S: Serializer>(q: Rational64, s: S) -> std::result::Result<S::Ok, S::Error> {
    let mut st = s.serialize_struct("Rational", 2)?;
    st.serialize_field("num", q.numer())?;
    st.serialize_field("den", q.denom())?;
    st.end()
}

impl Add for PiRational {
    type Output = PiRational;
    fn add(self, o: PiRational) -> PiRational {
        PiRational(self.0 + o.0)
    }
}

impl Sub for PiRational {
    type Output = PiRational;
    fn sub(self, o: PiRational) -> PiRational {
        PiRational(self.0 - o.0)
    }
}

impl Neg for PiRational {
    type Output = PiRational;
    fn neg(self) -> PiRational {
        PiRational(-self.0)
    }
}

impl Mul<i64> for PiRational {
    type Output = PiRational;
    fn mul(self, k: i64) -> PiRational {
        PiRational(self.0 * k)
    }
}

/// `sin(qπ)`.
///
/// The argument is folded into [0, π/2] before calling `f64::sin`, so the
/// symmetries `sin(-x) = -sin x` and `sin(π-x) = sin x` hold bit for bit.
pub fn sin_pi(q: PiRational) -> f64 {
    let two = Rational64::from_integer(2);
    let one = Rational64::one();
    let half = Rational64::new(1, 2);
    // r in [0, 2)
    let mut r = q.0 % two;
    if r < Rational64::zero() {
        r += two;
    }
    let (sign, mut r) = if r >= one { (-1.0, r - one) } else { (1.0, r) };
    if r > half {
        r = one - r;
    }
    if r.is_zero() {
        return 0.0;
    }
    if r == half {
        return sign;
    }
    let x = *r.numer() as f64 / *r.denom() as f64 * std::f64::consts::PI;
    sign * x.sin()
}

/// `cos(qπ)`, exactly zero at half-integers.
pub fn cos_pi(q: PiRational) -> f64 {
    sin_pi(q + PiRational::new(1, 2))
}

/// An order that may be negative (complex reflection in a point) or infinite.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ExtOrder {
    PositiveInt(u64),
    NegativeInt(u64),
    Infinite,
}

impl ExtOrder {
    /// The order `n` with `1/n = q`; `q = 0` gives ∞.
    pub fn from_reciprocal(q: Rational64) -> Result<ExtOrder> {
        if q.is_zero() {
            return Ok(ExtOrder::Infinite);
        }
        let r = q.recip();
        if !r.is_integer() {
            return Err(Error::NonIntegerOrder(format!("{q}")));
        }
        let n = r.to_integer();
        Ok(if n > 0 {
            ExtOrder::PositiveInt(n as u64)
        } else {
            ExtOrder::NegativeInt(n.unsigned_abs())
        })
    }

    /// Signed integer value, `None` for ∞.
    pub fn value(self) -> Option<i64> {
        match self {
            ExtOrder::PositiveInt(n) => Some(n as i64),
            ExtOrder::NegativeInt(n) => Some(-(n as i64)),
            ExtOrder::Infinite => None,
        }
    }

    pub fn is_positive_finite(self) -> bool {
        matches!(self, ExtOrder::PositiveInt(_))
    }

    pub fn is_negative(self) -> bool {
        matches!(self, ExtOrder::NegativeInt(_))
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, ExtOrder::Infinite)
    }

    /// Negative or infinite.
    pub fn is_degenerate(self) -> bool {
        !self.is_positive_finite()
    }
}

impl fmt::Display for ExtOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.value() {
            Some(v) => write!(f, "{v}"),
            None => write!(f, "∞"),
        }
    }
}

impl Serialize for ExtOrder {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self.value() {
            Some(v) => s.serialize_i64(v),
            None => s.serialize_str("inf"),
        }
    }
}

/// A Hermitian 3×3 form `⟨v, w⟩ = v* H w`.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianForm3 {
    m: Mat3,
}

impl HermitianForm3 {
    pub fn new(m: Mat3) -> Result<Self> {
        let dev = (m - m.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
        if dev > tolerances::HERMITIAN {
            return Err(Error::NotHermitian(dev));
        }
        Ok(HermitianForm3 { m })
    }

    pub fn diagonal(a: f64, b: f64, c: f64) -> Self {
        HermitianForm3 {
            m: Mat3::from_diagonal(&Vec3::new(a.into(), b.into(), c.into())),
        }
    }

    pub fn matrix(&self) -> &Mat3 {
        &self.m
    }

    pub fn inner(&self, v: &Vec3, w: &Vec3) -> Cx {
        (v.adjoint() * self.m * w)[(0, 0)]
    }
}

/// `v* H v` as a real number.
pub fn hermitian_eval(h: &HermitianForm3, v: &Vec3) -> Result<f64> {
    let z = h.inner(v, v);
    if z.im.abs() > 1e-9 * z.norm() + 1e-12 {
        return Err(Error::NonRealResult { re: z.re, im: z.im });
    }
    Ok(z.re)
}

/// Counts of positive, negative and zero eigenvalues.
pub fn signature(h: &HermitianForm3, tol: f64) -> (usize, usize, usize) {
    let eig = SymmetricEigen::new(h.m).eigenvalues;
    let pos = eig.iter().filter(|&&e| e > tol).count();
    let neg = eig.iter().filter(|&&e| e < -tol).count();
    (pos, neg, 3 - pos - neg)
}

pub fn max_abs(m: &Mat3) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Index of the largest-modulus entry (first in column-major order).
fn argmax(m: &Mat3) -> usize {
    let mut best = 0;
    for (i, z) in m.iter().enumerate() {
        if z.norm() > m[best].norm() {
            best = i;
        }
    }
    best
}

/// Scales `m` so its largest-modulus entry is 1.
pub fn normalize_max(m: &Mat3) -> Mat3 {
    let p = m[argmax(m)];
    m / p
}

/// True iff `m = λn` for some scalar λ, up to `tol·‖n‖_max`.
pub fn projective_equal(m: &Mat3, n: &Mat3, tol: f64) -> Result<bool> {
    if max_abs(n) < tol {
        return Err(Error::ZeroMatrix);
    }
    Ok(projective_defect(m, n)? <= tol)
}

/// `‖m − λn‖_max / ‖n‖_max` with `λ = m_i / n_i` at the largest entry of `n`.
pub fn projective_defect(m: &Mat3, n: &Mat3) -> Result<f64> {
    let scale = max_abs(n);
    if scale == 0.0 {
        return Err(Error::ZeroMatrix);
    }
    let i = argmax(n);
    let lambda = m[i] / n[i];
    Ok(max_abs(&(m - n * lambda)) / scale)
}

/// Smallest `n ≤ max_n` with `mⁿ` scalar.
pub fn projective_order(m: &Mat3, max_n: usize, tol: f64) -> Result<ExtOrder> {
    if max_abs(m) < tol {
        return Err(Error::ZeroMatrix);
    }
    let id = Mat3::identity();
    let step = normalize_max(m);
    let mut x = id;
    for n in 1..=max_n {
        x = normalize_max(&(x * step));
        if projective_equal(&x, &id, tol)? {
            return Ok(ExtOrder::PositiveInt(n as u64));
        }
    }
    Err(Error::ExceededBound(max_n))
}

/// Divides a homogeneous vector by its third coordinate.
pub fn dehomogenize(v: &Vec3) -> Result<Vec3> {
    if v[2].norm() < 1e-14 * v.norm().max(1.0) {
        return Err(Error::PointAtInfinity);
    }
    Ok(v / v[2])
}

/// Argument of `z` in units of π, in (-1, 1].
pub fn arg_pi(z: Cx) -> f64 {
    z.arg() / std::f64::consts::PI
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> PiRational {
        PiRational::new(n, d)
    }

    #[test]
    fn sin_pi_exact_values() {
        assert_eq!(sin_pi(q(1, 2)), 1.0);
        assert_eq!(sin_pi(q(1, 1)), 0.0);
        assert_eq!(sin_pi(q(-3, 1)), 0.0);
        assert_eq!(cos_pi(q(1, 2)), 0.0);
        assert_eq!(cos_pi(q(-7, 2)), 0.0);
        assert!((sin_pi(q(1, 6)) - 0.5).abs() < 1e-15);
        assert!((cos_pi(q(1, 3)) - 0.5).abs() < 1e-15);
        assert!((sin_pi(q(7, 6)) + 0.5).abs() < 1e-15);
    }

    #[test]
    fn reduced_form() {
        let a = q(4, 6);
        assert_eq!((a.numer(), a.denom()), (2, 3));
        let b = q(3, -9);
        assert_eq!((b.numer(), b.denom()), (-1, 3));
    }

    #[test]
    fn display() {
        assert_eq!(q(5, 6).to_string(), "5π/6");
        assert_eq!(q(-1, 3).to_string(), "-π/3");
        assert_eq!(q(1, 1).to_string(), "π");
        assert_eq!(q(0, 1).to_string(), "0");
    }

    #[test]
    fn ext_order_from_reciprocal() {
        use num_rational::Rational64 as R;
        assert_eq!(ExtOrder::from_reciprocal(R::new(1, 6)), Ok(ExtOrder::PositiveInt(6)));
        assert_eq!(ExtOrder::from_reciprocal(R::new(-1, 3)), Ok(ExtOrder::NegativeInt(3)));
        assert_eq!(ExtOrder::from_reciprocal(R::new(0, 1)), Ok(ExtOrder::Infinite));
        assert!(matches!(
            ExtOrder::from_reciprocal(R::new(2, 5)),
            Err(Error::NonIntegerOrder(_))
        ));
    }

    #[test]
    fn projective_examples() {
        let m = Mat3::new(
            Cx::new(1.0, 2.0), Cx::new(0.5, 0.0), Cx::new(0.0, -1.0),
            Cx::new(0.0, 0.0), Cx::new(3.0, 1.0), Cx::new(0.2, 0.2),
            Cx::new(1.0, 0.0), Cx::new(0.0, 0.0), Cx::new(2.0, 0.0),
        );
        assert!(projective_equal(&m, &(m * Cx::new(0.0, 2.0)), 1e-9).unwrap());
        let d = Mat3::from_diagonal(&Vec3::new(Cx::one(), q(1, 3).cis(), Cx::one()));
        assert!(!projective_equal(&Mat3::identity(), &d, 1e-9).unwrap());
        assert_eq!(projective_equal(&m, &Mat3::zeros(), 1e-9), Err(Error::ZeroMatrix));
    }

    #[test]
    fn orders() {
        let d = Mat3::from_diagonal(&Vec3::new(Cx::one(), q(2, 4).cis(), Cx::one()));
        assert_eq!(projective_order(&d, 200, 1e-9), Ok(ExtOrder::PositiveInt(4)));
        assert_eq!(projective_order(&Mat3::identity(), 200, 1e-9), Ok(ExtOrder::PositiveInt(1)));
        let irr = Mat3::from_diagonal(&Vec3::new(Cx::one(), Cx::from_polar(1.0, 1.0), Cx::one()));
        assert_eq!(projective_order(&irr, 50, 1e-9), Err(Error::ExceededBound(50)));
    }

    #[test]
    fn signatures() {
        assert_eq!(signature(&HermitianForm3::diagonal(-1.0, -1.0, 1.0), 1e-12), (1, 2, 0));
        assert_eq!(signature(&HermitianForm3::diagonal(0.0, -1.0, 1.0), 1e-12), (1, 1, 1));
    }

    #[test]
    fn eval_zero_vector() {
        let h = HermitianForm3::diagonal(-1.0, -2.0, 3.0);
        assert_eq!(hermitian_eval(&h, &Vec3::zeros()), Ok(0.0));
    }

    #[test]
    fn non_hermitian_rejected() {
        let mut m = Mat3::identity();
        m[(0, 1)] = Cx::new(1.0, 0.0);
        assert!(matches!(HermitianForm3::new(m), Err(Error::NotHermitian(_))));
    }
}
