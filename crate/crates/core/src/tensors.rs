//! Dense multi-index tensors at a point, with metric-aware index gymnastics.
//!
//! Components are stored row-major in coordinate-basis indices. Each slot
//! carries its own variance flag, so a `(1,3)` tensor in this crate is any
//! rank-4 tensor with exactly one contravariant slot, wherever it sits.

use serde::Serialize;

use crate::error::TensorError;
use crate::expr::Real;

/// Relative tolerance used by [`approx_eq`], scaled by the larger max-abs.
pub const REL_TOL: f64 = 1e-9;
/// Absolute floor used by [`approx_eq`].
pub const ABS_FLOOR: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Variance {
    Co,
    Contra,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Tensor {
    dim: usize,
    variance: Vec<Variance>,
    data: Vec<f64>,
}

/// Visits every multi-index of the given rank in row-major order.
pub fn for_each_index(dim: usize, rank: usize, mut f: impl FnMut(&[usize])) {
    let mut idx = vec![0usize; rank];
    let total = dim.pow(rank as u32);
    for _ in 0..total {
        f(&idx);
        for k in (0..rank).rev() {
            idx[k] += 1;
            if idx[k] < dim {
                break;
            }
            idx[k] = 0;
        }
    }
}

impl Tensor {
    pub fn zeros(dim: usize, variance: &[Variance]) -> Tensor {
        Tensor {
            dim,
            variance: variance.to_vec(),
            data: vec![0.0; dim.pow(variance.len() as u32)],
        }
    }

    pub fn covariant(dim: usize, rank: usize) -> Tensor {
        Tensor::zeros(dim, &vec![Variance::Co; rank])
    }

    pub fn scalar(value: f64) -> Tensor {
        Tensor {
            dim: 1,
            variance: vec![],
            data: vec![value],
        }
    }

    pub fn vector(components: &[f64]) -> Tensor {
        Tensor {
            dim: components.len(),
            variance: vec![Variance::Contra],
            data: components.to_vec(),
        }
    }

    pub fn covector(components: &[f64]) -> Tensor {
        Tensor {
            dim: components.len(),
            variance: vec![Variance::Co],
            data: components.to_vec(),
        }
    }

    pub fn from_data(
        dim: usize,
        variance: &[Variance],
        data: Vec<f64>,
    ) -> Result<Tensor, TensorError> {
        let expected = dim.pow(variance.len() as u32);
        if data.len() != expected {
            return Err(TensorError::Shape(format!(
                "{} components for dimension {dim} and rank {}",
                data.len(),
                variance.len()
            )));
        }
        Ok(Tensor {
            dim,
            variance: variance.to_vec(),
            data,
        })
    }

    pub fn from_fn(
        dim: usize,
        variance: &[Variance],
        mut f: impl FnMut(&[usize]) -> f64,
    ) -> Tensor {
        let mut data = Vec::with_capacity(dim.pow(variance.len() as u32));
        for_each_index(dim, variance.len(), |idx| data.push(f(idx)));
        Tensor {
            dim,
            variance: variance.to_vec(),
            data,
        }
    }

    /// `n × n` identity as a `(1,1)` tensor, contravariant slot first.
    pub fn identity(dim: usize) -> Tensor {
        Tensor::from_fn(dim, &[Variance::Contra, Variance::Co], |i| {
            if i[0] == i[1] {
                1.0
            } else {
                0.0
            }
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.variance.len()
    }

    pub fn variance(&self) -> &[Variance] {
        &self.variance
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn offset(&self, idx: &[usize]) -> usize {
        debug_assert_eq!(idx.len(), self.rank());
        idx.iter().fold(0, |acc, &i| acc * self.dim + i)
    }

    pub fn get(&self, idx: &[usize]) -> f64 {
        self.data[self.offset(idx)]
    }

    pub fn set(&mut self, idx: &[usize], v: f64) {
        let o = self.offset(idx);
        self.data[o] = v;
    }

    /// Value of a rank-0 tensor.
    pub fn value(&self) -> f64 {
        self.data[0]
    }

    pub fn stride(&self, slot: usize) -> usize {
        self.dim.pow((self.rank() - 1 - slot) as u32)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    fn check_shape(&self, other: &Tensor) -> Result<(), TensorError> {
        if self.dim != other.dim {
            return Err(TensorError::DimensionMismatch {
                expected: self.dim,
                got: other.dim,
            });
        }
        if self.rank() != other.rank() {
            return Err(TensorError::Shape(format!(
                "rank {} vs {}",
                self.rank(),
                other.rank()
            )));
        }
        Ok(())
    }

    /// Max-abs componentwise difference.
    pub fn max_diff(&self, other: &Tensor) -> f64 {
        assert_eq!(
            self.data.len(),
            other.data.len(),
            "max_diff on mismatched shapes"
        );
        self.data
            .iter()
            .zip(&other.data)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }

    /// Componentwise (coordinate) inner product.
    pub fn dot(&self, other: &Tensor) -> f64 {
        assert_eq!(
            self.data.len(),
            other.data.len(),
            "dot on mismatched shapes"
        );
        self.data.iter().zip(&other.data).map(|(a, b)| a * b).sum()
    }

    pub fn scaled(&self, s: f64) -> Tensor {
        let mut t = self.clone();
        t.data.iter_mut().for_each(|v| *v *= s);
        t
    }

    /// `self + s * other`.
    pub fn axpy(&self, s: f64, other: &Tensor) -> Result<Tensor, TensorError> {
        self.check_shape(other)?;
        let mut t = self.clone();
        t.data
            .iter_mut()
            .zip(&other.data)
            .for_each(|(a, b)| *a += s * b);
        Ok(t)
    }

    pub fn add(&self, other: &Tensor) -> Result<Tensor, TensorError> {
        self.axpy(1.0, other)
    }

    pub fn sub(&self, other: &Tensor) -> Result<Tensor, TensorError> {
        self.axpy(-1.0, other)
    }

    /// Tensor product; slots of `self` come first.
    pub fn outer(&self, other: &Tensor) -> Result<Tensor, TensorError> {
        if self.rank() > 0 && other.rank() > 0 && self.dim != other.dim {
            return Err(TensorError::DimensionMismatch {
                expected: self.dim,
                got: other.dim,
            });
        }
        let dim = if self.rank() == 0 {
            other.dim
        } else {
            self.dim
        };
        let mut variance = self.variance.clone();
        variance.extend_from_slice(&other.variance);
        let mut data = Vec::with_capacity(self.data.len() * other.data.len());
        for a in &self.data {
            data.extend(other.data.iter().map(|b| a * b));
        }
        Ok(Tensor {
            dim,
            variance,
            data,
        })
    }

    /// Reorders slots: slot `k` of the result is slot `perm[k]` of `self`.
    pub fn permuted(&self, perm: &[usize]) -> Tensor {
        assert_eq!(perm.len(), self.rank());
        let variance: Vec<Variance> = perm.iter().map(|&p| self.variance[p]).collect();
        let mut src = vec![0usize; self.rank()];
        Tensor::from_fn(self.dim, &variance, |idx| {
            for (k, &p) in perm.iter().enumerate() {
                src[p] = idx[k];
            }
            self.get(&src)
        })
    }

    fn check_slots(&self, a: usize, b: usize) -> Result<(), TensorError> {
        for s in [a, b] {
            if s >= self.rank() {
                return Err(TensorError::SlotOutOfRange {
                    slot: s,
                    rank: self.rank(),
                });
            }
        }
        if a == b {
            return Err(TensorError::SameSlot(a));
        }
        Ok(())
    }

    /// Max-abs of `T(..a..b..) - T(..b..a..)`.
    pub fn symmetry_defect(&self, a: usize, b: usize) -> Result<f64, TensorError> {
        self.check_slots(a, b)?;
        Ok(self.pair_defect(a, b, -1.0))
    }

    /// Max-abs of `T(..a..b..) + T(..b..a..)`.
    pub fn antisymmetry_defect(&self, a: usize, b: usize) -> Result<f64, TensorError> {
        self.check_slots(a, b)?;
        Ok(self.pair_defect(a, b, 1.0))
    }

    fn pair_defect(&self, a: usize, b: usize, sign: f64) -> f64 {
        let mut worst = 0.0f64;
        let mut swapped = vec![0; self.rank()];
        for_each_index(self.dim, self.rank(), |idx| {
            swapped.copy_from_slice(idx);
            swapped.swap(a, b);
            worst = worst.max((self.get(idx) + sign * self.get(&swapped)).abs());
        });
        worst
    }

    pub fn is_symmetric(&self, a: usize, b: usize, tol: f64) -> bool {
        self.symmetry_defect(a, b)
            .map(|d| d <= tol)
            .unwrap_or(false)
    }

    pub fn is_antisymmetric(&self, a: usize, b: usize, tol: f64) -> bool {
        self.antisymmetry_defect(a, b)
            .map(|d| d <= tol)
            .unwrap_or(false)
    }

    /// Contracts slot `slot` with a plain component vector (no metric involved).
    pub fn contract_slot_with(&self, slot: usize, v: &[f64]) -> Tensor {
        assert!(slot < self.rank() && v.len() == self.dim);
        let mut variance = self.variance.clone();
        variance.remove(slot);
        let mut src = vec![0usize; self.rank()];
        Tensor::from_fn(self.dim, &variance, |idx| {
            src[..slot].copy_from_slice(&idx[..slot]);
            src[slot + 1..].copy_from_slice(&idx[slot..]);
            (0..self.dim)
                .map(|m| {
                    src[slot] = m;
                    v[m] * self.get(&src)
                })
                .sum()
        })
    }

    /// Full multilinear evaluation, one component vector per slot.
    pub fn evaluate(&self, args: &[&[f64]]) -> f64 {
        assert_eq!(args.len(), self.rank());
        let mut total = 0.0;
        for_each_index(self.dim, self.rank(), |idx| {
            let w: f64 = idx.iter().zip(args).map(|(&i, a)| a[i]).product();
            if w != 0.0 {
                total += w * self.get(idx);
            }
        });
        total
    }
}

/// `max|a - b| <= max(ABS_FLOOR, REL_TOL * max(max|a|, max|b|))`.
pub fn approx_eq(a: &Tensor, b: &Tensor) -> bool {
    if a.data.len() != b.data.len() {
        return false;
    }
    let scale = a.max_abs().max(b.max_abs());
    a.max_diff(b) <= ABS_FLOOR.max(REL_TOL * scale)
}

/// Inverts a row-major `n × n` matrix with partial pivoting; returns the
/// inverse and the determinant, or `None` when a pivot vanishes.
pub fn invert_matrix<N: Real>(m: &[N], n: usize) -> Option<(Vec<N>, N)> {
    let mut a = m.to_vec();
    let mut inv: Vec<N> = (0..n * n)
        .map(|k| if k / n == k % n { N::one() } else { N::zero() })
        .collect();
    let mut det = N::one();
    for col in 0..n {
        let pivot = (col..n).max_by(|&r, &s| {
            a[r * n + col]
                .value()
                .abs()
                .total_cmp(&a[s * n + col].value().abs())
        })?;
        if a[pivot * n + col].value() == 0.0 {
            return None;
        }
        if pivot != col {
            for k in 0..n {
                a.swap(pivot * n + k, col * n + k);
                inv.swap(pivot * n + k, col * n + k);
            }
            det = -det;
        }
        let p = a[col * n + col];
        det = det * p;
        for k in 0..n {
            a[col * n + k] = a[col * n + k] / p;
            inv[col * n + k] = inv[col * n + k] / p;
        }
        for r in 0..n {
            if r == col {
                continue;
            }
            let f = a[r * n + col];
            if f.value() == 0.0 && f.is_constant() {
                continue;
            }
            for k in 0..n {
                a[r * n + k] = a[r * n + k] - f * a[col * n + k];
                inv[r * n + k] = inv[r * n + k] - f * inv[col * n + k];
            }
        }
    }
    Some((inv, det))
}

/// Metric and inverse metric at a point.
#[derive(Clone, Debug)]
pub struct MetricPair {
    pub g: Tensor,
    pub g_inv: Tensor,
    /// Number of negative eigenvalues of `g`.
    pub signature: usize,
    pub det: f64,
}

impl MetricPair {
    pub fn new(g: Tensor) -> Result<MetricPair, TensorError> {
        if g.rank() != 2 || g.variance() != [Variance::Co, Variance::Co] {
            return Err(TensorError::Shape("metric must be a (0,2) tensor".into()));
        }
        let n = g.dim();
        let deviation = g.symmetry_defect(0, 1)?;
        if deviation > 1e-12 * g.max_abs().max(1.0) {
            return Err(TensorError::NotSymmetric {
                a: 0,
                b: 1,
                deviation,
            });
        }
        let (inv, det) = invert_matrix(g.data(), n).ok_or(TensorError::Degenerate { det: 0.0 })?;
        if det.abs() <= 1e-8 {
            return Err(TensorError::Degenerate { det });
        }
        let eig = nalgebra::DMatrix::from_row_slice(n, n, g.data()).symmetric_eigenvalues();
        let signature = eig.iter().filter(|&&e| e < 0.0).count();
        let mut g_inv = Tensor::from_data(n, &[Variance::Contra, Variance::Contra], inv)?;
        // symmetrize away pivoting noise
        for i in 0..n {
            for j in i + 1..n {
                let avg = 0.5 * (g_inv.get(&[i, j]) + g_inv.get(&[j, i]));
                g_inv.set(&[i, j], avg);
                g_inv.set(&[j, i], avg);
            }
        }
        Ok(MetricPair {
            g,
            g_inv,
            signature,
            det,
        })
    }

    pub fn dim(&self) -> usize {
        self.g.dim()
    }

    /// `g(x, y)` for vectors given by components.
    pub fn inner(&self, x: &[f64], y: &[f64]) -> f64 {
        self.g.evaluate(&[x, y])
    }

    pub fn lower_vector(&self, x: &[f64]) -> Vec<f64> {
        let n = self.dim();
        (0..n)
            .map(|i| (0..n).map(|j| self.g.get(&[i, j]) * x[j]).sum())
            .collect()
    }

    pub fn raise_covector(&self, w: &[f64]) -> Vec<f64> {
        let n = self.dim();
        (0..n)
            .map(|i| (0..n).map(|j| self.g_inv.get(&[i, j]) * w[j]).sum())
            .collect()
    }
}

/// Traces slots `a` and `b`. Two covariant slots pair through `g⁻¹`, two
/// contravariant slots through `g`, mixed slots pair directly.
pub fn contract(
    t: &Tensor,
    a: usize,
    b: usize,
    metric: &MetricPair,
) -> Result<Tensor, TensorError> {
    t.check_slots(a, b)?;
    if t.dim() != metric.dim() {
        return Err(TensorError::DimensionMismatch {
            expected: metric.dim(),
            got: t.dim(),
        });
    }
    let n = t.dim();
    let (lo, hi) = if a < b { (a, b) } else { (b, a) };
    let weight: Box<dyn Fn(usize, usize) -> f64> = match (t.variance[a], t.variance[b]) {
        (Variance::Co, Variance::Co) => Box::new(|i, j| metric.g_inv.get(&[i, j])),
        (Variance::Contra, Variance::Contra) => Box::new(|i, j| metric.g.get(&[i, j])),
        _ => Box::new(|i, j| if i == j { 1.0 } else { 0.0 }),
    };
    let mixed = t.variance[a] != t.variance[b];
    let variance: Vec<Variance> = t
        .variance
        .iter()
        .enumerate()
        .filter(|&(k, _)| k != a && k != b)
        .map(|(_, v)| *v)
        .collect();
    let mut src = vec![0usize; t.rank()];
    let out = Tensor::from_fn(n, &variance, |idx| {
        let mut k = 0;
        for (s, slot) in src.iter_mut().enumerate() {
            if s != lo && s != hi {
                *slot = idx[k];
                k += 1;
            }
        }
        let mut sum = 0.0;
        for i in 0..n {
            src[a] = i;
            if mixed {
                src[b] = i;
                sum += t.get(&src);
            } else {
                for j in 0..n {
                    let w = weight(i, j);
                    if w != 0.0 {
                        src[b] = j;
                        sum += w * t.get(&src);
                    }
                }
            }
        }
        sum
    });
    Ok(if out.rank() == 0 {
        Tensor::scalar(out.value())
    } else {
        out
    })
}

fn convert_slot(
    t: &Tensor,
    slot: usize,
    with: &Tensor,
    from: Variance,
    to: Variance,
) -> Result<Tensor, TensorError> {
    if slot >= t.rank() {
        return Err(TensorError::SlotOutOfRange {
            slot,
            rank: t.rank(),
        });
    }
    if t.variance[slot] != from {
        return Err(TensorError::VarianceMismatch { slot });
    }
    if t.dim() != with.dim() {
        return Err(TensorError::DimensionMismatch {
            expected: with.dim(),
            got: t.dim(),
        });
    }
    let n = t.dim();
    let mut variance = t.variance.clone();
    variance[slot] = to;
    let mut src = vec![0usize; t.rank()];
    Ok(Tensor::from_fn(n, &variance, |idx| {
        src.copy_from_slice(idx);
        (0..n)
            .map(|j| {
                src[slot] = j;
                with.get(&[idx[slot], j]) * t.get(&src)
            })
            .sum()
    }))
}

/// Raises a covariant slot with `g⁻¹`.
pub fn raise(t: &Tensor, slot: usize, metric: &MetricPair) -> Result<Tensor, TensorError> {
    convert_slot(t, slot, &metric.g_inv, Variance::Co, Variance::Contra)
}

/// Lowers a contravariant slot with `g`.
pub fn lower(t: &Tensor, slot: usize, metric: &MetricPair) -> Result<Tensor, TensorError> {
    convert_slot(t, slot, &metric.g, Variance::Contra, Variance::Co)
}

/// The endomorphism `Z ↦ σ(Y,Z)X − σ(X,Z)Y` as a `(1,1)` tensor `A[i][z]`
/// (output slot first).
pub fn wedge_sigma(x: &Tensor, y: &Tensor, sigma: &Tensor) -> Result<Tensor, TensorError> {
    let n = sigma.dim();
    for v in [x, y] {
        if v.rank() != 1 || v.variance()[0] != Variance::Contra {
            return Err(TensorError::Shape("wedge arguments must be vectors".into()));
        }
        if v.dim() != n {
            return Err(TensorError::DimensionMismatch {
                expected: n,
                got: v.dim(),
            });
        }
    }
    if sigma.rank() != 2 {
        return Err(TensorError::Shape("sigma must be a (0,2) tensor".into()));
    }
    let sy = sigma.contract_slot_with(0, y.data());
    let sx = sigma.contract_slot_with(0, x.data());
    Ok(Tensor::from_fn(
        n,
        &[Variance::Contra, Variance::Co],
        |idx| {
            let (i, z) = (idx[0], idx[1]);
            sy.data()[z] * x.data()[i] - sx.data()[z] * y.data()[i]
        },
    ))
}
