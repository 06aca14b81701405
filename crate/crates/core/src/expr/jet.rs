use std::ops::{Add, Div, Mul, Neg, Sub};

/// Numeric carrier for expression evaluation and the metric linear algebra.
///
/// Implemented for plain `f64` and for [`Jet2`], so the same code path
/// produces values or values-with-derivatives.
pub trait Real:
    Copy
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn constant(v: f64) -> Self;
    /// The primal value, used for pivoting and domain checks.
    fn value(&self) -> f64;
    /// True when every derivative part is zero.
    fn is_constant(&self) -> bool;

    /// Applies a scalar function given its value, first and second derivative at the primal.
    fn lift(self, f: f64, df: f64, d2f: f64) -> Self;

    fn zero() -> Self {
        Self::constant(0.0)
    }
    fn one() -> Self {
        Self::constant(1.0)
    }
    fn scale(self, s: f64) -> Self {
        self * Self::constant(s)
    }

    fn sin(self) -> Self {
        let v = self.value();
        self.lift(v.sin(), v.cos(), -v.sin())
    }
    fn cos(self) -> Self {
        let v = self.value();
        self.lift(v.cos(), -v.sin(), -v.cos())
    }
    fn exp(self) -> Self {
        let e = self.value().exp();
        self.lift(e, e, e)
    }
    fn sinh(self) -> Self {
        let v = self.value();
        self.lift(v.sinh(), v.cosh(), v.sinh())
    }
    fn cosh(self) -> Self {
        let v = self.value();
        self.lift(v.cosh(), v.sinh(), v.cosh())
    }
    fn tanh(self) -> Self {
        let t = self.value().tanh();
        let sech2 = 1.0 - t * t;
        self.lift(t, sech2, -2.0 * t * sech2)
    }
    /// Caller guarantees a nonnegative primal.
    fn sqrt(self) -> Self {
        let s = self.value().sqrt();
        self.lift(s, 0.5 / s, -0.25 / (s * s * s))
    }
    fn ln(self) -> Self {
        let v = self.value();
        self.lift(v.ln(), 1.0 / v, -1.0 / (v * v))
    }
    /// Power with a constant exponent.
    fn powf(self, c: f64) -> Self {
        let v = self.value();
        if c == 0.0 {
            return Self::one();
        }
        let d1 = if c == 1.0 { 1.0 } else { c * v.powf(c - 1.0) };
        let d2 = if c == 1.0 {
            0.0
        } else if c == 2.0 {
            2.0
        } else {
            c * (c - 1.0) * v.powf(c - 2.0)
        };
        self.lift(v.powf(c), d1, d2)
    }
}

impl Real for f64 {
    fn constant(v: f64) -> Self {
        v
    }
    fn value(&self) -> f64 {
        *self
    }
    fn is_constant(&self) -> bool {
        true
    }
    fn lift(self, f: f64, _df: f64, _d2f: f64) -> Self {
        f
    }
}

/// Truncated second-order Taylor element in two designated directions `a` and `b`.
///
/// Carries `f`, `∂f/∂x_a`, `∂f/∂x_b` and the mixed `∂²f/∂x_a∂x_b`. When
/// `a == b` the mixed part is the pure second derivative.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct Jet2 {
    pub v: f64,
    pub da: f64,
    pub db: f64,
    pub dab: f64,
}

impl Jet2 {
    pub const fn new(v: f64, da: f64, db: f64, dab: f64) -> Self {
        Jet2 { v, da, db, dab }
    }

    /// Seed for coordinate `index` given the two active directions.
    pub fn variable(v: f64, index: usize, dir_a: usize, dir_b: usize) -> Self {
        Jet2 {
            v,
            da: if index == dir_a { 1.0 } else { 0.0 },
            db: if index == dir_b { 1.0 } else { 0.0 },
            dab: 0.0,
        }
    }

    /// First-order dual: value plus one directional derivative.
    pub const fn dual(v: f64, d: f64) -> Self {
        Jet2 {
            v,
            da: d,
            db: 0.0,
            dab: 0.0,
        }
    }
}

impl Add for Jet2 {
    type Output = Jet2;
    fn add(self, o: Jet2) -> Jet2 {
        Jet2::new(
            self.v + o.v,
            self.da + o.da,
            self.db + o.db,
            self.dab + o.dab,
        )
    }
}

impl Sub for Jet2 {
    type Output = Jet2;
    fn sub(self, o: Jet2) -> Jet2 {
        Jet2::new(
            self.v - o.v,
            self.da - o.da,
            self.db - o.db,
            self.dab - o.dab,
        )
    }
}

impl Neg for Jet2 {
    type Output = Jet2;
    fn neg(self) -> Jet2 {
        Jet2::new(-self.v, -self.da, -self.db, -self.dab)
    }
}

impl Mul for Jet2 {
    type Output = Jet2;
    fn mul(self, o: Jet2) -> Jet2 {
        Jet2::new(
            self.v * o.v,
            self.da * o.v + self.v * o.da,
            self.db * o.v + self.v * o.db,
            self.dab * o.v + self.da * o.db + self.db * o.da + self.v * o.dab,
        )
    }
}

impl Div for Jet2 {
    type Output = Jet2;
    fn div(self, o: Jet2) -> Jet2 {
        self * o.lift(1.0 / o.v, -1.0 / (o.v * o.v), 2.0 / (o.v * o.v * o.v))
    }
}

impl Real for Jet2 {
    fn constant(v: f64) -> Self {
        Jet2::new(v, 0.0, 0.0, 0.0)
    }
    fn value(&self) -> f64 {
        self.v
    }
    fn is_constant(&self) -> bool {
        self.da == 0.0 && self.db == 0.0 && self.dab == 0.0
    }
    fn lift(self, f: f64, df: f64, d2f: f64) -> Self {
        Jet2::new(
            f,
            df * self.da,
            df * self.db,
            d2f * self.da * self.db + df * self.dab,
        )
    }
}
