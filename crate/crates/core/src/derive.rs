//! Operator-valued 2-forms acting on tensors as derivations.
//!
//! `(B·K)(X1,…,Xs,X,Y) = −Σ_j K(X1,…,B(X,Y)Xj,…,Xs)` for covariant slots; a
//! contravariant slot picks up `+B(X,Y)` applied to the output vector. The two
//! new arguments `(X, Y)` are always the last two slots.

use crate::error::{Error, Result, TensorError};
use crate::tensors::{for_each_index, Tensor, Variance};

use Variance::{Co, Contra};

/// `(X, Y) ↦ B(X, Y)`, stored `[x][y][z][i] = (B(∂x,∂y)∂z)^i`.
#[derive(Clone, Debug, PartialEq)]
pub struct CurvOp(Tensor);

impl CurvOp {
    pub fn new(t: Tensor) -> Result<CurvOp> {
        if t.variance() != [Co, Co, Co, Contra] {
            return Err(TensorError::Shape(format!(
                "operator 2-form needs variance [co, co, co, contra], got {:?}",
                t.variance()
            ))
            .into());
        }
        Ok(CurvOp(t))
    }

    /// `(X ∧_σ Y)Z = σ(Y,Z)X − σ(X,Z)Y`.
    pub fn wedge(sigma: &Tensor) -> Result<CurvOp> {
        check_symmetric(sigma)?;
        let n = sigma.dim();
        Ok(CurvOp(Tensor::from_fn(n, &[Co, Co, Co, Contra], |i| {
            let (x, y, z, o) = (i[0], i[1], i[2], i[3]);
            let mut v = 0.0;
            if o == x {
                v += sigma.get(&[y, z]);
            }
            if o == y {
                v -= sigma.get(&[x, z]);
            }
            v
        })))
    }

    pub fn tensor(&self) -> &Tensor {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    pub fn b(&self, x: usize, y: usize, z: usize, i: usize) -> f64 {
        self.0.get(&[x, y, z, i])
    }

    /// `B(X,Y)Z`.
    pub fn apply(&self, x: &[f64], y: &[f64], z: &[f64]) -> Vec<f64> {
        let n = self.dim();
        let mut out = vec![0.0; n];
        for (a, xa) in x.iter().enumerate() {
            for (b, yb) in y.iter().enumerate() {
                let xy = xa * yb;
                if xy == 0.0 {
                    continue;
                }
                for (c, zc) in z.iter().enumerate() {
                    let w = xy * zc;
                    if w == 0.0 {
                        continue;
                    }
                    for (i, o) in out.iter_mut().enumerate() {
                        *o += w * self.b(a, b, c, i);
                    }
                }
            }
        }
        out
    }

    pub fn argument_antisymmetry_defect(&self) -> f64 {
        self.0.antisymmetry_defect(0, 1).expect("rank 4")
    }
}

fn check_symmetric(sigma: &Tensor) -> Result<()> {
    if sigma.rank() != 2 || sigma.variance() != [Co, Co] {
        return Err(TensorError::Shape("sigma must be a (0,2) tensor".into()).into());
    }
    let deviation = sigma.symmetry_defect(0, 1)?;
    if deviation > 1e-9 * sigma.max_abs().max(1.0) {
        return Err(TensorError::NotSymmetric {
            a: 0,
            b: 1,
            deviation,
        }
        .into());
    }
    Ok(())
}

/// `B·K`, two covariant slots appended.
pub fn derive(b: &CurvOp, k: &Tensor) -> Result<Tensor> {
    let s = k.rank();
    if s == 0 {
        return Err(Error::RankZero);
    }
    let n = b.dim();
    if k.dim() != n {
        return Err(TensorError::DimensionMismatch {
            expected: n,
            got: k.dim(),
        }
        .into());
    }
    let mut variance = k.variance().to_vec();
    variance.extend([Co, Co]);
    let mut out = Tensor::zeros(n, &variance);
    let kv = k.variance().to_vec();
    let strides: Vec<usize> = (0..s).map(|j| k.stride(j)).collect();
    let kd = k.data();
    for_each_index(n, s + 2, |idx| {
        let (x, y) = (idx[s], idx[s + 1]);
        let base = k.offset(&idx[..s]);
        let mut v = 0.0;
        for j in 0..s {
            let kj = idx[j];
            let rest = base - kj * strides[j];
            for m in 0..n {
                let km = kd[rest + m * strides[j]];
                match kv[j] {
                    Co => v -= b.b(x, y, kj, m) * km,
                    Contra => v += b.b(x, y, m, kj) * km,
                }
            }
        }
        out.set(idx, v);
    });
    Ok(out)
}

/// `Q(σ, K) = (X ∧_σ Y)·K`.
pub fn q_op(sigma: &Tensor, k: &Tensor) -> Result<Tensor> {
    derive(&CurvOp::wedge(sigma)?, k)
}

/// `max |B·K − L Q(σ, K)|`.
pub fn condition_residual(lhs: &CurvOp, k: &Tensor, sigma: &Tensor, l: f64) -> Result<f64> {
    let a = derive(lhs, k)?;
    let b = q_op(sigma, k)?;
    Ok(a.axpy(-l, &b)?.max_abs())
}
