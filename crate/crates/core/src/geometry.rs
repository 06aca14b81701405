//! From a chart-level metric description to curvature data at a point.
//!
//! Metric components are differentiated exactly with [`Jet2`] arithmetic:
//! one direction-pair jet per `(a, b)` gives `g`, `∂g` and `∂²g`, and the
//! Christoffel formula is then re-evaluated in dual arithmetic along each
//! coordinate direction to get `∂Γ`.
//!
//! Slot conventions follow the `(X, Y, Z, V)` argument order of the curvature
//! operator: `r13[x][y][z][i]` is the `i`-th component of `R(∂x, ∂y)∂z`, and
//! `r04[x][y][z][v] = g(R(∂x, ∂y)∂z, ∂v)`. With
//! `R(X,Y) = [∇X, ∇Y] − ∇[X,Y]` the unit sphere has `R(X,Y)Z = g(Y,Z)X − g(X,Z)Y`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::expr::{parse, Expr, Jet2, Real};
use crate::tensors::{contract, invert_matrix, lower, raise, MetricPair, Tensor, Variance};

use Variance::{Co, Contra};

/// Chart-level description of one example manifold.
#[derive(Clone, Debug)]
pub struct ManifoldSpec {
    pub name: String,
    pub dim: usize,
    /// Upper triangle, row-major: `(0,0), (0,1), …, (1,1), …`.
    metric: Vec<Expr>,
    pub xi: Option<Vec<Expr>>,
    pub k: f64,
    pub epsilon: f64,
    /// Sampling box per coordinate, `[lo, hi]`.
    pub chart_box: Vec<(f64, f64)>,
}

fn tri(i: usize, j: usize, n: usize) -> usize {
    let (i, j) = if i <= j { (i, j) } else { (j, i) };
    i * n - i * (i + 1) / 2 + j
}

impl ManifoldSpec {
    /// Builds a manifold description from expression sources. Missing metric entries are zero;
    /// keys must satisfy `i <= j`.
    pub fn from_sources(
        name: &str,
        dim: usize,
        metric: &[((usize, usize), &str)],
        xi: Option<&[&str]>,
        k: f64,
        epsilon: f64,
        chart_box: &[(f64, f64)],
    ) -> Result<ManifoldSpec> {
        if dim == 0 {
            return Err(Error::Invalid("dimension must be at least 1".into()));
        }
        let mut components = vec![Expr::Const(0.0); dim * (dim + 1) / 2];
        let mut seen = vec![false; components.len()];
        for &((i, j), src) in metric {
            if i > j || j >= dim {
                return Err(Error::Invalid(format!(
                    "metric key {i},{j} is not in the upper triangle of a {dim}-dimensional chart"
                )));
            }
            let slot = tri(i, j, dim);
            if seen[slot] {
                return Err(Error::Invalid(format!("metric key {i},{j} given twice")));
            }
            seen[slot] = true;
            components[slot] =
                parse(src, dim).map_err(|source| Error::MetricComponent { i, j, source })?;
        }
        let xi = match xi {
            Some(list) => {
                if list.len() != dim {
                    return Err(Error::Invalid(format!(
                        "xi has {} components, expected {dim}",
                        list.len()
                    )));
                }
                Some(
                    list.iter()
                        .enumerate()
                        .map(|(index, s)| {
                            parse(s, dim).map_err(|source| Error::FieldComponent { index, source })
                        })
                        .collect::<Result<Vec<_>>>()?,
                )
            }
            None => None,
        };
        if chart_box.len() != dim
            || chart_box
                .iter()
                .any(|(lo, hi)| !lo.is_finite() || !hi.is_finite() || lo > hi)
        {
            return Err(Error::Invalid(
                "chart box needs one finite [lo, hi] pair per coordinate".into(),
            ));
        }
        if epsilon != 1.0 && epsilon != -1.0 {
            return Err(Error::Invalid(format!(
                "epsilon must be +1 or -1, got {epsilon}"
            )));
        }
        if !k.is_finite() {
            return Err(Error::Invalid("k must be finite".into()));
        }
        Ok(ManifoldSpec {
            name: name.to_string(),
            dim,
            metric: components,
            xi,
            k,
            epsilon,
            chart_box: chart_box.to_vec(),
        })
    }

    pub fn with_name(mut self, name: &str) -> ManifoldSpec {
        self.name = name.to_string();
        self
    }

    pub fn metric_expr(&self, i: usize, j: usize) -> &Expr {
        &self.metric[tri(i, j, self.dim)]
    }

    fn component_error(&self, i: usize, j: usize) -> impl Fn(crate::error::ExprError) -> Error {
        move |source| Error::MetricComponent { i, j, source }
    }

    /// Metric components at `p` (full `n × n`, row-major).
    pub fn metric_values(&self, p: &[f64]) -> Result<Vec<f64>> {
        let n = self.dim;
        let mut g = vec![0.0; n * n];
        for i in 0..n {
            for j in i..n {
                let v = self
                    .metric_expr(i, j)
                    .value_at(p)
                    .map_err(self.component_error(i, j))?;
                g[i * n + j] = v;
                g[j * n + i] = v;
            }
        }
        Ok(g)
    }

    pub fn metric_at(&self, p: &[f64]) -> Result<MetricPair> {
        let g = Tensor::from_data(self.dim, &[Co, Co], self.metric_values(p)?)?;
        MetricPair::new(g).map_err(|e| match e {
            crate::error::TensorError::Degenerate { det } => Error::DegenerateMetric {
                point: p.to_vec(),
                det,
            },
            other => other.into(),
        })
    }

    /// `ξ` components at `p`.
    pub fn xi_at(&self, p: &[f64]) -> Result<Vec<f64>> {
        let xi = self
            .xi
            .as_ref()
            .ok_or_else(|| Error::NoUnitField(self.name.clone()))?;
        xi.iter()
            .enumerate()
            .map(|(index, e)| {
                e.value_at(p)
                    .map_err(|source| Error::FieldComponent { index, source })
            })
            .collect()
    }

    /// `∂_a ξ^i` as `[i][a]`.
    pub fn xi_jacobian(&self, p: &[f64]) -> Result<Vec<f64>> {
        let n = self.dim;
        let xi = self
            .xi
            .as_ref()
            .ok_or_else(|| Error::NoUnitField(self.name.clone()))?;
        let mut out = vec![0.0; n * n];
        for (i, e) in xi.iter().enumerate() {
            for a in 0..n {
                let j = e
                    .eval_jet(p, a, a)
                    .map_err(|source| Error::FieldComponent { index: i, source })?;
                out[i * n + a] = j.da;
            }
        }
        Ok(out)
    }

    /// Deterministic low-discrepancy points inside the chart box.
    pub fn sample_points(&self, count: usize, seed: u64) -> Vec<Vec<f64>> {
        (0..count)
            .map(|i| {
                let index = seed.wrapping_mul(7919).wrapping_add(i as u64 + 1);
                self.chart_box
                    .iter()
                    .enumerate()
                    .map(|(d, &(lo, hi))| {
                        lo + (hi - lo) * radical_inverse(index, PRIMES[d % PRIMES.len()])
                    })
                    .collect()
            })
            .collect()
    }
}

const PRIMES: [u64; 10] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29];

/// Halton radical inverse of `index` in `base`.
fn radical_inverse(mut index: u64, base: u64) -> f64 {
    let inv = 1.0 / base as f64;
    let mut f = inv;
    let mut r = 0.0;
    while index > 0 {
        r += f * (index % base) as f64;
        index /= base;
        f *= inv;
    }
    r
}

/// `g`, `∂g` and `∂²g` at a point.
struct MetricJets {
    n: usize,
    g: Vec<f64>,
    /// `[l][i][j] = ∂_l g_ij`
    dg: Vec<f64>,
    /// `[l][m][i][j] = ∂_l ∂_m g_ij`
    ddg: Vec<f64>,
}

impl MetricJets {
    fn at(spec: &ManifoldSpec, p: &[f64]) -> Result<MetricJets> {
        let n = spec.dim;
        if p.len() != n {
            return Err(Error::Invalid(format!(
                "point has {} coordinates, expected {n}",
                p.len()
            )));
        }
        let mut g = vec![0.0; n * n];
        let mut dg = vec![0.0; n * n * n];
        let mut ddg = vec![0.0; n * n * n * n];
        for i in 0..n {
            for j in i..n {
                let e = spec.metric_expr(i, j);
                for a in 0..n {
                    for b in a..n {
                        let Jet2 { v, da, db, dab } =
                            e.eval_jet(p, a, b).map_err(spec.component_error(i, j))?;
                        for (x, y) in [(i, j), (j, i)] {
                            g[x * n + y] = v;
                            dg[(a * n + x) * n + y] = da;
                            dg[(b * n + x) * n + y] = db;
                            ddg[((a * n + b) * n + x) * n + y] = dab;
                            ddg[((b * n + a) * n + x) * n + y] = dab;
                        }
                    }
                }
            }
        }
        Ok(MetricJets { n, g, dg, ddg })
    }
}

/// `Γ^i_jk = ½ g^{il} (∂_j g_lk + ∂_k g_jl − ∂_l g_jk)`, stored `[i][j][k]`.
fn christoffel_formula<N: Real>(g: &[N], dg: &[N], n: usize) -> Option<Vec<N>> {
    let (inv, _) = invert_matrix(g, n)?;
    let d = |l: usize, i: usize, j: usize| dg[(l * n + i) * n + j];
    let mut gamma = vec![N::zero(); n * n * n];
    for i in 0..n {
        for j in 0..n {
            for k in j..n {
                let mut s = N::zero();
                for l in 0..n {
                    s = s + inv[i * n + l] * (d(j, l, k) + d(k, j, l) - d(l, j, k));
                }
                let s = s.scale(0.5);
                gamma[(i * n + j) * n + k] = s;
                gamma[(i * n + k) * n + j] = s;
            }
        }
    }
    Some(gamma)
}

/// Christoffel symbols of the second kind at a point.
#[derive(Clone, Debug)]
pub struct Christoffel {
    pub n: usize,
    /// `[i][j][k] = Γ^i_jk`
    pub symbols: Vec<f64>,
}

impl Christoffel {
    pub fn get(&self, i: usize, j: usize, k: usize) -> f64 {
        self.symbols[(i * self.n + j) * self.n + k]
    }

    /// Max-abs defect of `∂_k g_ij = Γ^l_ki g_lj + Γ^l_kj g_il`.
    pub fn compatibility_defect(&self, spec: &ManifoldSpec, p: &[f64]) -> Result<f64> {
        let jets = MetricJets::at(spec, p)?;
        let n = self.n;
        let mut worst = 0.0f64;
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    let rhs: f64 = (0..n)
                        .map(|l| {
                            self.get(l, k, i) * jets.g[l * n + j]
                                + self.get(l, k, j) * jets.g[i * n + l]
                        })
                        .sum();
                    worst = worst.max((jets.dg[(k * n + i) * n + j] - rhs).abs());
                }
            }
        }
        Ok(worst)
    }
}

fn degenerate(p: &[f64]) -> Error {
    Error::DegenerateMetric {
        point: p.to_vec(),
        det: 0.0,
    }
}

pub fn christoffel(spec: &ManifoldSpec, p: &[f64]) -> Result<Christoffel> {
    spec.metric_at(p)?;
    let jets = MetricJets::at(spec, p)?;
    let symbols = christoffel_formula(&jets.g, &jets.dg, jets.n).ok_or_else(|| degenerate(p))?;
    Ok(Christoffel { n: jets.n, symbols })
}

/// Christoffel symbols from central differences of the metric (no jets).
pub fn christoffel_finite_difference(
    spec: &ManifoldSpec,
    p: &[f64],
    h: f64,
) -> Result<Christoffel> {
    let n = spec.dim;
    let g = spec.metric_values(p)?;
    let mut dg = vec![0.0; n * n * n];
    let mut q = p.to_vec();
    for l in 0..n {
        q[l] = p[l] + h;
        let plus = spec.metric_values(&q)?;
        q[l] = p[l] - h;
        let minus = spec.metric_values(&q)?;
        q[l] = p[l];
        for ij in 0..n * n {
            dg[l * n * n + ij] = (plus[ij] - minus[ij]) / (2.0 * h);
        }
    }
    let symbols = christoffel_formula(&g, &dg, n).ok_or_else(|| degenerate(p))?;
    Ok(Christoffel { n, symbols })
}

/// `Γ` and `∂_m Γ^i_jk` stored `[m][i][j][k]`.
fn christoffel_with_derivatives(spec: &ManifoldSpec, p: &[f64]) -> Result<(Christoffel, Vec<f64>)> {
    let jets = MetricJets::at(spec, p)?;
    let n = jets.n;
    let mut gamma = vec![0.0; n * n * n];
    let mut dgamma = vec![0.0; n * n * n * n];
    for m in 0..n {
        let g: Vec<Jet2> = (0..n * n)
            .map(|ij| Jet2::dual(jets.g[ij], jets.dg[m * n * n + ij]))
            .collect();
        let dg: Vec<Jet2> = (0..n * n * n)
            .map(|lij| {
                let (l, ij) = (lij / (n * n), lij % (n * n));
                Jet2::dual(jets.dg[lij], jets.ddg[(l * n + m) * n * n + ij])
            })
            .collect();
        let gj = christoffel_formula(&g, &dg, n).ok_or_else(|| degenerate(p))?;
        for (idx, jet) in gj.iter().enumerate() {
            gamma[idx] = jet.v;
            dgamma[m * n * n * n + idx] = jet.da;
        }
    }
    Ok((Christoffel { n, symbols: gamma }, dgamma))
}

/// Curvature in both forms: `(1,3)` with the contravariant slot last, and `(0,4)`.
pub fn riemann(spec: &ManifoldSpec, p: &[f64]) -> Result<(Tensor, Tensor)> {
    let metric = spec.metric_at(p)?;
    let (gamma, dgamma) = christoffel_with_derivatives(spec, p)?;
    let r13 = riemann_from_symbols(&gamma, &dgamma);
    let r04 = lower(&r13, 3, &metric)?;
    Ok((r13, r04))
}

fn riemann_from_symbols(gamma: &Christoffel, dgamma: &[f64]) -> Tensor {
    let n = gamma.n;
    let dg = |m: usize, i: usize, j: usize, k: usize| dgamma[((m * n + i) * n + j) * n + k];
    Tensor::from_fn(n, &[Co, Co, Co, Contra], |idx| {
        let (x, y, z, i) = (idx[0], idx[1], idx[2], idx[3]);
        let mut v = dg(x, i, y, z) - dg(y, i, x, z);
        for m in 0..n {
            v += gamma.get(i, x, m) * gamma.get(m, y, z) - gamma.get(i, y, m) * gamma.get(m, x, z);
        }
        v
    })
}

/// All curvature data at one chart point.
#[derive(Clone, Debug)]
pub struct PointFrame {
    pub point: Vec<f64>,
    pub metric: MetricPair,
    pub christoffel: Christoffel,
    /// `R(X,Y)Z`, slots `(X, Y, Z, out)`.
    pub r13: Tensor,
    /// `R(X,Y,Z,V) = g(R(X,Y)Z, V)`.
    pub r04: Tensor,
    /// `S(Y,Z) = tr(X ↦ R(X,Y)Z)`.
    pub ricci: Tensor,
    /// Ricci operator `Q`, stored `[out][in]`.
    pub ricci_op: Tensor,
    pub scalar: f64,
    /// `S^ℓ` for `ℓ = 0 …`; `S^0 = g`.
    pub ricci_powers: Vec<Tensor>,
}

impl PointFrame {
    pub fn dim(&self) -> usize {
        self.metric.dim()
    }

    pub fn g(&self) -> &Tensor {
        &self.metric.g
    }

    /// `S^ℓ`, extending the cache on demand.
    pub fn ricci_power(&mut self, ell: usize) -> &Tensor {
        while self.ricci_powers.len() <= ell {
            let next = next_ricci_power(
                self.ricci_powers.last().expect("S^0 always cached"),
                &self.ricci_op,
            );
            self.ricci_powers.push(next);
        }
        &self.ricci_powers[ell]
    }

    /// Assembles Ricci data from a given curvature tensor. Used by [`frame`]
    /// and by tests that need synthetic curvature.
    pub fn from_curvature(
        point: Vec<f64>,
        metric: MetricPair,
        christoffel: Christoffel,
        r13: Tensor,
        max_ell: usize,
    ) -> Result<PointFrame> {
        let r04 = lower(&r13, 3, &metric)?;
        let ricci = contract(&r13, 0, 3, &metric)?;
        let scalar = contract(&ricci, 0, 1, &metric)?.value();
        let ricci_op = raise(&ricci, 0, &metric)?;
        let mut ricci_powers = vec![metric.g.clone()];
        for _ in 0..max_ell {
            let next = next_ricci_power(ricci_powers.last().unwrap(), &ricci_op);
            ricci_powers.push(next);
        }
        Ok(PointFrame {
            point,
            metric,
            christoffel,
            r13,
            r04,
            ricci,
            ricci_op,
            scalar,
            ricci_powers,
        })
    }
}

/// `S^ℓ(X,Y) = S^{ℓ−1}(QX, Y)`.
fn next_ricci_power(prev: &Tensor, q: &Tensor) -> Tensor {
    let n = q.dim();
    Tensor::from_fn(n, &[Co, Co], |idx| {
        (0..n)
            .map(|m| q.get(&[m, idx[0]]) * prev.get(&[m, idx[1]]))
            .sum()
    })
}

/// Curvature frame at `p`, with `S^ℓ` cached up to `max_ell`.
pub fn frame(spec: &ManifoldSpec, p: &[f64], max_ell: usize) -> Result<PointFrame> {
    let metric = spec.metric_at(p)?;
    let (gamma, dgamma) = christoffel_with_derivatives(spec, p)?;
    let r13 = riemann_from_symbols(&gamma, &dgamma);
    PointFrame::from_curvature(p.to_vec(), metric, gamma, r13, max_ell)
}

/// Max-abs residuals of the algebraic curvature identities at a frame.
#[derive(Clone, Copy, Debug, Default)]
pub struct CurvatureSymmetries {
    pub antisym_xy: f64,
    pub antisym_zv: f64,
    pub pair_exchange: f64,
    pub first_bianchi: f64,
    pub ricci_symmetry: f64,
}

impl CurvatureSymmetries {
    pub fn of(frame: &PointFrame) -> CurvatureSymmetries {
        let r = &frame.r04;
        let n = frame.dim();
        let mut pair = 0.0f64;
        let mut bianchi = 0.0f64;
        crate::tensors::for_each_index(n, 4, |i| {
            let (x, y, z, v) = (i[0], i[1], i[2], i[3]);
            pair = pair.max((r.get(&[x, y, z, v]) - r.get(&[z, v, x, y])).abs());
            let cyc = r.get(&[x, y, z, v]) + r.get(&[y, z, x, v]) + r.get(&[z, x, y, v]);
            bianchi = bianchi.max(cyc.abs());
        });
        CurvatureSymmetries {
            antisym_xy: r.antisymmetry_defect(0, 1).unwrap_or(f64::INFINITY),
            antisym_zv: r.antisymmetry_defect(2, 3).unwrap_or(f64::INFINITY),
            pair_exchange: pair,
            first_bianchi: bianchi,
            ricci_symmetry: frame.ricci.symmetry_defect(0, 1).unwrap_or(f64::INFINITY),
        }
    }

    pub fn max(&self) -> f64 {
        [
            self.antisym_xy,
            self.antisym_zv,
            self.pair_exchange,
            self.first_bianchi,
            self.ricci_symmetry,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

/// A random positive-definite polynomial metric on `[-0.5, 0.5]^n`, written
/// out as expression source so it goes through the parser like user input.
pub fn random_polynomial_metric(n: usize, seed: u64) -> ManifoldSpec {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let monomial = |rng: &mut ChaCha8Rng| -> String {
        let a = rng.random_range(0..n);
        let b = rng.random_range(0..n);
        match rng.random_range(0..3) {
            0 => format!("x{a}"),
            1 => format!("x{a}*x{b}"),
            _ => format!("x{a}^2"),
        }
    };
    let mut sources = Vec::new();
    for i in 0..n {
        for j in i..n {
            let (base, amp, terms) = if i == j { (1.5, 0.3, 3) } else { (0.0, 0.2, 2) };
            let mut s = format!("{base}");
            for _ in 0..terms {
                let c: f64 = rng.random_range(-amp..amp);
                s.push_str(&format!(" + {:.6}*{}", c.abs(), monomial(&mut rng)));
                if c < 0.0 {
                    let idx = s.rfind('+').unwrap();
                    s.replace_range(idx..idx + 1, "-");
                }
            }
            sources.push(((i, j), s));
        }
    }
    let refs: Vec<((usize, usize), &str)> = sources.iter().map(|(k, s)| (*k, s.as_str())).collect();
    ManifoldSpec::from_sources(
        &format!("random-{n}d-{seed}"),
        n,
        &refs,
        None,
        0.0,
        1.0,
        &vec![(-0.5, 0.5); n],
    )
    .expect("generated metric parses")
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn sphere2() -> ManifoldSpec {
        ManifoldSpec::from_sources(
            "s2",
            2,
            &[((0, 0), "1"), ((1, 1), "sin(x0)^2")],
            None,
            1.0,
            1.0,
            &[(0.3, 2.8), (0.0, 6.0)],
        )
        .unwrap()
    }

    fn hyperbolic3() -> ManifoldSpec {
        ManifoldSpec::from_sources(
            "h3",
            3,
            &[((0, 0), "1"), ((1, 1), "exp(2*x0)"), ((2, 2), "exp(2*x0)")],
            Some(&["1", "0", "0"]),
            -1.0,
            1.0,
            &[(-0.5, 0.5); 3],
        )
        .unwrap()
    }

    #[test]
    fn flat_metric_has_no_symbols() {
        let spec = ManifoldSpec::from_sources(
            "e3",
            3,
            &[((0, 0), "1"), ((1, 1), "1"), ((2, 2), "1")],
            None,
            0.0,
            1.0,
            &[(0.0, 1.0); 3],
        )
        .unwrap();
        let c = christoffel(&spec, &[0.2, 0.3, 0.4]).unwrap();
        assert!(c.symbols.iter().all(|&v| v == 0.0));
        let (r13, _) = riemann(&spec, &[0.2, 0.3, 0.4]).unwrap();
        assert_eq!(r13.max_abs(), 0.0);
    }

    #[test]
    fn hyperbolic_symbols_match_finite_differences() {
        let spec = hyperbolic3();
        let p = [0.3, -0.1, 0.2];
        let c = christoffel(&spec, &p).unwrap();
        let fd = christoffel_finite_difference(&spec, &p, 1e-5).unwrap();
        let e2t = (0.6f64).exp();
        assert!((c.get(0, 1, 1) + e2t).abs() < 1e-13);
        assert!((c.get(1, 0, 1) - 1.0).abs() < 1e-13);
        assert!((fd.get(0, 1, 1) + e2t).abs() < 1e-8);
        assert!((fd.get(1, 0, 1) - 1.0).abs() < 1e-8);
    }

    #[test]
    fn sphere_symbol_at_quarter_pi() {
        let c = christoffel(&sphere2(), &[PI / 4.0, 0.1]).unwrap();
        assert!((c.get(0, 1, 1) + 0.5).abs() < 1e-14);
        let fd = christoffel_finite_difference(&sphere2(), &[PI / 4.0, 0.1], 1e-5).unwrap();
        assert!((fd.get(0, 1, 1) + 0.5).abs() < 1e-9);
    }

    #[test]
    fn sphere_curvature_component() {
        let (_, r04) = riemann(&sphere2(), &[PI / 3.0, 0.4]).unwrap();
        // R(∂θ, ∂φ, ∂φ, ∂θ) = g_φφ g_θθ − 0 = sin²θ with R(X,Y)Z = g(Y,Z)X − g(X,Z)Y
        assert!((r04.get(&[0, 1, 1, 0]) - 0.75).abs() < 1e-14);
        assert!((r04.get(&[0, 1, 0, 1]) + 0.75).abs() < 1e-14);
    }

    #[test]
    fn sphere_ricci_from_contraction() {
        let f = frame(&sphere2(), &[1.1, 0.0], 1).unwrap();
        assert!((f.ricci.get(&[0, 0]) - 1.0).abs() < 1e-13);
        assert!((f.ricci.get(&[1, 1]) - 1.1f64.sin().powi(2)).abs() < 1e-13);
        assert!((f.scalar - 2.0).abs() < 1e-13);
    }

    #[test]
    fn hyperbolic_has_constant_negative_curvature() {
        let spec = hyperbolic3();
        let f = frame(&spec, &[0.2, 0.1, -0.3], 2).unwrap();
        let g = f.g();
        let expected = Tensor::from_fn(3, &[Co, Co, Co, Contra], |i| {
            let (x, y, z, o) = (i[0], i[1], i[2], i[3]);
            let gi = &f.metric;
            let d = |a: usize, b: usize| if a == b { 1.0 } else { 0.0 };
            let _ = gi;
            -(g.get(&[y, z]) * d(x, o) - g.get(&[x, z]) * d(y, o))
        });
        assert!(f.r13.max_diff(&expected) < 1e-12);
        assert!((f.scalar + 6.0).abs() < 1e-12);
    }

    #[test]
    fn compatibility_and_degenerate_metric() {
        let spec = hyperbolic3();
        let p = [0.1, 0.2, 0.3];
        let c = christoffel(&spec, &p).unwrap();
        assert!(c.compatibility_defect(&spec, &p).unwrap() < 1e-12);
        let bad = ManifoldSpec::from_sources(
            "bad",
            2,
            &[((0, 0), "x0"), ((1, 1), "1")],
            None,
            0.0,
            1.0,
            &[(0.0, 1.0); 2],
        )
        .unwrap();
        assert!(matches!(
            christoffel(&bad, &[0.0, 0.5]),
            Err(Error::DegenerateMetric { .. })
        ));
    }

    #[test]
    fn spec_validation() {
        let lower_key =
            ManifoldSpec::from_sources("x", 2, &[((1, 0), "1")], None, 0.0, 1.0, &[(0.0, 1.0); 2]);
        assert!(matches!(lower_key, Err(Error::Invalid(_))));
        let bad_expr = ManifoldSpec::from_sources(
            "x",
            2,
            &[((0, 0), "1 +")],
            None,
            0.0,
            1.0,
            &[(0.0, 1.0); 2],
        );
        assert!(matches!(
            bad_expr,
            Err(Error::MetricComponent { i: 0, j: 0, .. })
        ));
    }

    #[test]
    fn sample_points_are_deterministic_and_inside() {
        let spec = hyperbolic3();
        let a = spec.sample_points(20, 3);
        assert_eq!(a, spec.sample_points(20, 3));
        assert!(a.iter().flatten().all(|&v| (-0.5..=0.5).contains(&v)));
        assert_ne!(a, spec.sample_points(20, 4));
    }

    #[test]
    fn random_metric_is_positive_definite() {
        for seed in 0..10 {
            let spec = random_polynomial_metric(3, seed);
            for p in spec.sample_points(5, 0) {
                assert_eq!(spec.metric_at(&p).unwrap().signature, 0);
            }
        }
    }
}
