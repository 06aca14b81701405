//! The eight-parameter T-curvature family
//!
//! ```text
//! T(X,Y,Z,V) = a0 R(X,Y,Z,V)
//!            + a1 S(Y,Z) g(X,V) + a2 S(X,Z) g(Y,V) + a3 S(X,Y) g(Z,V)
//!            + a4 S(X,V) g(Y,Z) + a5 S(Y,V) g(X,Z) + a6 S(Z,V) g(X,Y)
//!            + a7 r (g(Y,Z) g(X,V) − g(X,Z) g(Y,V))
//! ```
//!
//! and its twenty named specializations.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::PointFrame;
use crate::tensors::{contract, raise, Tensor, Variance};

/// `a0 … a7`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CoeffVector(pub [f64; 8]);

impl CoeffVector {
    pub fn new(a: [f64; 8]) -> Result<CoeffVector> {
        if a.iter().any(|v| !v.is_finite()) {
            return Err(Error::Invalid(format!(
                "coefficients must be finite: {a:?}"
            )));
        }
        Ok(CoeffVector(a))
    }

    pub fn zero() -> CoeffVector {
        CoeffVector([0.0; 8])
    }

    pub fn a(&self, i: usize) -> f64 {
        self.0[i]
    }

    pub fn scaled(&self, s: f64) -> CoeffVector {
        CoeffVector(self.0.map(|v| v * s))
    }

    pub fn plus(&self, other: &CoeffVector) -> CoeffVector {
        let mut out = self.0;
        for (o, b) in out.iter_mut().zip(other.0) {
            *o += b;
        }
        CoeffVector(out)
    }

    /// `a0 + n a1 + a2 + a3 + a5 + a6`, the weight of `S` in `S_T`.
    pub fn ricci_weight(&self, n: usize) -> f64 {
        let a = &self.0;
        a[0] + n as f64 * a[1] + a[2] + a[3] + a[5] + a[6]
    }

    /// `a4 + (n−1) a7`, the weight of `r g` in `S_T`.
    pub fn scalar_weight(&self, n: usize) -> f64 {
        self.0[4] + (n as f64 - 1.0) * self.0[7]
    }
}

/// Free parameters of the two presets that leave `a0`, `a1` open.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FreeParams {
    pub a0: f64,
    pub a1: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Preset {
    R,
    QuasiConformal(Option<FreeParams>),
    Conformal,
    Conharmonic,
    Concircular,
    PseudoProjective(Option<FreeParams>),
    Projective,
    MProjective,
    W0,
    W0Star,
    W1,
    W1Star,
    W2,
    W3,
    W4,
    W5,
    W6,
    W7,
    W8,
    W9,
    Custom(CoeffVector),
}

pub const PRESET_NAMES: [&str; 20] = [
    "r",
    "quasi-conformal",
    "conformal",
    "conharmonic",
    "concircular",
    "pseudo-projective",
    "projective",
    "m-projective",
    "w0",
    "w0star",
    "w1",
    "w1star",
    "w2",
    "w3",
    "w4",
    "w5",
    "w6",
    "w7",
    "w8",
    "w9",
];

impl Preset {
    /// All twenty named presets; `free` fills the two parametric ones.
    pub fn all(free: Option<FreeParams>) -> Vec<Preset> {
        PRESET_NAMES
            .iter()
            .map(|name| Preset::named(name, free).expect("known name"))
            .collect()
    }

    /// Presets covered by the pseudosymmetry dichotomy:
    /// `R, V, P, M, W0, W0*, W1, W1*, W3 … W8`.
    pub fn dichotomy_list() -> Vec<Preset> {
        use Preset::*;
        vec![
            R,
            Concircular,
            Projective,
            MProjective,
            W0,
            W0Star,
            W1,
            W1Star,
            W3,
            W4,
            W5,
            W6,
            W7,
            W8,
        ]
    }

    pub fn named(name: &str, free: Option<FreeParams>) -> Result<Preset> {
        use Preset::*;
        Ok(match name.to_ascii_lowercase().as_str() {
            "r" => R,
            "quasi-conformal" => QuasiConformal(free),
            "conformal" => Conformal,
            "conharmonic" => Conharmonic,
            "concircular" => Concircular,
            "pseudo-projective" => PseudoProjective(free),
            "projective" => Projective,
            "m-projective" => MProjective,
            "w0" => W0,
            "w0star" => W0Star,
            "w1" => W1,
            "w1star" => W1Star,
            "w2" => W2,
            "w3" => W3,
            "w4" => W4,
            "w5" => W5,
            "w6" => W6,
            "w7" => W7,
            "w8" => W8,
            "w9" => W9,
            _ => return Err(Error::UnknownPreset(name.to_string())),
        })
    }

    pub fn name(&self) -> &'static str {
        use Preset::*;
        match self {
            R => "r",
            QuasiConformal(_) => "quasi-conformal",
            Conformal => "conformal",
            Conharmonic => "conharmonic",
            Concircular => "concircular",
            PseudoProjective(_) => "pseudo-projective",
            Projective => "projective",
            MProjective => "m-projective",
            W0 => "w0",
            W0Star => "w0star",
            W1 => "w1",
            W1Star => "w1star",
            W2 => "w2",
            W3 => "w3",
            W4 => "w4",
            W5 => "w5",
            W6 => "w6",
            W7 => "w7",
            W8 => "w8",
            W9 => "w9",
            Custom(_) => "custom",
        }
    }

    pub fn is_parametric(&self) -> bool {
        matches!(
            self,
            Preset::QuasiConformal(_) | Preset::PseudoProjective(_)
        )
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Preset {
    type Err = Error;

    /// Parametric presets parse without free parameters.
    fn from_str(s: &str) -> Result<Preset> {
        Preset::named(s, None)
    }
}

/// Coefficient vector of `preset` in dimension `n`.
pub fn coefficients(preset: Preset, n: usize) -> Result<CoeffVector> {
    use Preset::*;
    if let Custom(c) = preset {
        return CoeffVector::new(c.0);
    }
    if n < 3 {
        return Err(Error::DimensionTooSmall(n));
    }
    let nf = n as f64;
    let m = 1.0 / (nf - 1.0);
    let mut a = [0.0; 8];
    a[0] = 1.0;
    match preset {
        R => {}
        QuasiConformal(free) => {
            let p = free.ok_or(Error::MissingFreeParameters("quasi-conformal"))?;
            a[0] = p.a0;
            a[1] = p.a1;
            a[2] = -p.a1;
            a[4] = p.a1;
            a[5] = -p.a1;
            a[7] = -(p.a0 / (nf - 1.0) + 2.0 * p.a1) / nf;
        }
        Conformal | Conharmonic => {
            let c = -1.0 / (nf - 2.0);
            a[1] = c;
            a[2] = -c;
            a[4] = c;
            a[5] = -c;
            if preset == Conformal {
                a[7] = 1.0 / ((nf - 1.0) * (nf - 2.0));
            }
        }
        Concircular => a[7] = -1.0 / (nf * (nf - 1.0)),
        PseudoProjective(free) => {
            let p = free.ok_or(Error::MissingFreeParameters("pseudo-projective"))?;
            a[0] = p.a0;
            a[1] = p.a1;
            a[2] = -p.a1;
            a[7] = -(p.a0 / (nf - 1.0) + p.a1) / nf;
        }
        Projective => {
            a[1] = -m;
            a[2] = m;
        }
        MProjective => {
            let c = -m / 2.0;
            a[1] = c;
            a[2] = -c;
            a[4] = c;
            a[5] = -c;
        }
        W0 => {
            a[1] = -m;
            a[5] = m;
        }
        W0Star => {
            a[1] = m;
            a[5] = -m;
        }
        W1 => {
            a[1] = m;
            a[2] = -m;
        }
        W1Star => {
            a[1] = -m;
            a[2] = m;
        }
        W2 => {
            a[4] = -m;
            a[5] = m;
        }
        W3 => {
            a[2] = -m;
            a[4] = m;
        }
        W4 => {
            a[5] = m;
            a[6] = -m;
        }
        W5 => {
            a[2] = -m;
            a[5] = m;
        }
        W6 => {
            a[1] = -m;
            a[6] = m;
        }
        W7 => {
            a[1] = -m;
            a[4] = m;
        }
        W8 => {
            a[1] = -m;
            a[3] = m;
        }
        W9 => {
            a[3] = m;
            a[4] = -m;
        }
        Custom(_) => unreachable!(),
    }
    CoeffVector::new(a)
}

/// `T` as a `(0,4)` tensor at a frame.
pub fn build_t(frame: &PointFrame, c: &CoeffVector) -> Tensor {
    build_t_from(&frame.r04, &frame.ricci, frame.g(), frame.scalar, c)
}

/// Assembly from explicit ingredients; all must share one dimension.
pub fn build_t_from(r04: &Tensor, s: &Tensor, g: &Tensor, r: f64, c: &CoeffVector) -> Tensor {
    let a = &c.0;
    let n = g.dim();
    Tensor::from_fn(n, &[Variance::Co; 4], |i| {
        let (x, y, z, v) = (i[0], i[1], i[2], i[3]);
        let s = |p: usize, q: usize| s.get(&[p, q]);
        let g = |p: usize, q: usize| g.get(&[p, q]);
        a[0] * r04.get(i)
            + a[1] * s(y, z) * g(x, v)
            + a[2] * s(x, z) * g(y, v)
            + a[3] * s(x, y) * g(z, v)
            + a[4] * s(x, v) * g(y, z)
            + a[5] * s(y, v) * g(x, z)
            + a[6] * s(z, v) * g(x, y)
            + a[7] * r * (g(y, z) * g(x, v) - g(x, z) * g(y, v))
    })
}

/// `T(X,Y)Z` as a `(1,3)` tensor, output slot last.
pub fn build_t13(frame: &PointFrame, c: &CoeffVector) -> Tensor {
    raise(&build_t(frame, c), 3, &frame.metric).expect("slot 3 of a rank-4 covariant tensor")
}

/// `S_T(Y,Z) = g^{iv} T(e_i, Y, Z, e_v)`.
pub fn ricci_of_t(frame: &PointFrame, c: &CoeffVector) -> Tensor {
    contract(&build_t(frame, c), 0, 3, &frame.metric).expect("rank-4 contraction")
}

/// `(a0 + n a1 + a2 + a3 + a5 + a6) S + (a4 + (n−1) a7) r g`.
pub fn ricci_of_t_closed_form(frame: &PointFrame, c: &CoeffVector) -> Tensor {
    let n = frame.dim();
    frame
        .ricci
        .scaled(c.ricci_weight(n))
        .axpy(c.scalar_weight(n) * frame.scalar, frame.g())
        .expect("same shape")
}
