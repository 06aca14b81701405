//! Unit fields in a k-nullity distribution: the example registry, the nullity
//! identity suite, and closed forms of `T` contracted against `ξ`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::family::{build_t, build_t13, ricci_of_t, CoeffVector};
use crate::geometry::{frame, random_polynomial_metric, ManifoldSpec, PointFrame};
use crate::tensors::{MetricPair, Tensor, Variance};

use Variance::{Co, Contra};

/// Structure class a registry entry stands in for.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ClassTag {
    #[serde(rename = "n(k)-contact")]
    NkContact,
    Sasakian,
    Kenmotsu,
    EpsSasakian,
    ParaSasakian,
    EpsParaSasakian,
    ConstantCurvature,
    Generic,
}

impl ClassTag {
    pub fn name(self) -> &'static str {
        match self {
            ClassTag::NkContact => "n(k)-contact",
            ClassTag::Sasakian => "sasakian",
            ClassTag::Kenmotsu => "kenmotsu",
            ClassTag::EpsSasakian => "eps-sasakian",
            ClassTag::ParaSasakian => "para-sasakian",
            ClassTag::EpsParaSasakian => "eps-para-sasakian",
            ClassTag::ConstantCurvature => "constant-curvature",
            ClassTag::Generic => "generic",
        }
    }

    pub fn from_name(name: &str) -> Option<ClassTag> {
        use ClassTag::*;
        [
            NkContact,
            Sasakian,
            Kenmotsu,
            EpsSasakian,
            ParaSasakian,
            EpsParaSasakian,
            ConstantCurvature,
            Generic,
        ]
        .into_iter()
        .find(|c| c.name() == name)
    }

    /// Whether `(k, ε)` fits the class signature.
    pub fn admits(self, k: f64, epsilon: f64) -> bool {
        match self {
            ClassTag::NkContact => epsilon == 1.0,
            ClassTag::Sasakian => k == 1.0 && epsilon == 1.0,
            ClassTag::Kenmotsu | ClassTag::ParaSasakian => k == -1.0 && epsilon == 1.0,
            ClassTag::EpsSasakian => k == epsilon,
            ClassTag::EpsParaSasakian => k == -epsilon,
            ClassTag::ConstantCurvature | ClassTag::Generic => true,
        }
    }
}

#[derive(Clone, Debug)]
pub struct RegistryEntry {
    pub spec: ManifoldSpec,
    pub class: ClassTag,
    /// Sectional curvature is constant (`= k`) on the whole chart.
    pub constant_curvature: bool,
}

impl RegistryEntry {
    pub fn new(
        spec: ManifoldSpec,
        class: ClassTag,
        constant_curvature: bool,
    ) -> Result<RegistryEntry> {
        if class != ClassTag::Generic {
            if spec.xi.is_none() {
                return Err(Error::NoUnitField(spec.name.clone()));
            }
            if !class.admits(spec.k, spec.epsilon) {
                return Err(Error::Invalid(format!(
                    "class {} does not admit k = {}, epsilon = {}",
                    class.name(),
                    spec.k,
                    spec.epsilon
                )));
            }
        }
        Ok(RegistryEntry {
            spec,
            class,
            constant_curvature,
        })
    }

    pub fn name(&self) -> &str {
        &self.spec.name
    }

    /// Entries with a declared unit field and `(k, ε)`.
    pub fn has_structure(&self) -> bool {
        self.class != ClassTag::Generic && self.spec.xi.is_some()
    }
}

#[allow(clippy::too_many_arguments)]
fn entry(
    name: &str,
    dim: usize,
    metric: &[((usize, usize), &str)],
    xi: &[&str],
    k: f64,
    eps: f64,
    bx: &[(f64, f64)],
    class: ClassTag,
    cc: bool,
) -> RegistryEntry {
    let spec = ManifoldSpec::from_sources(name, dim, metric, Some(xi), k, eps, bx)
        .expect("built-in spec parses");
    RegistryEntry::new(spec, class, cc).expect("built-in entry is consistent")
}

/// The built-in example manifolds.
pub fn builtin_registry() -> Vec<RegistryEntry> {
    use ClassTag::*;
    let angle = (0.3, 1.27);
    let phase = (0.0, 6.0);
    let t = (-0.5, 0.5);
    vec![
        // Hopf coordinates on the unit 3-sphere; ξ is the Hopf field.
        entry(
            "s3",
            3,
            &[((0, 0), "1"), ((1, 1), "cos(x0)^2"), ((2, 2), "sin(x0)^2")],
            &["0", "1", "1"],
            1.0,
            1.0,
            &[angle, phase, phase],
            Sasakian,
            true,
        ),
        entry(
            "s5",
            5,
            &[
                ((0, 0), "1"),
                ((1, 1), "sin(x0)^2"),
                ((2, 2), "cos(x0)^2"),
                ((3, 3), "sin(x0)^2*cos(x1)^2"),
                ((4, 4), "sin(x0)^2*sin(x1)^2"),
            ],
            &["0", "0", "1", "1", "1"],
            1.0,
            1.0,
            &[angle, angle, phase, phase, phase],
            Sasakian,
            true,
        ),
        entry(
            "h3",
            3,
            &[((0, 0), "1"), ((1, 1), "exp(2*x0)"), ((2, 2), "exp(2*x0)")],
            &["1", "0", "0"],
            -1.0,
            1.0,
            &[t, t, t],
            Kenmotsu,
            true,
        ),
        entry(
            "h5",
            5,
            &[
                ((0, 0), "1"),
                ((1, 1), "exp(2*x0)"),
                ((2, 2), "exp(2*x0)"),
                ((3, 3), "exp(2*x0)"),
                ((4, 4), "exp(2*x0)"),
            ],
            &["1", "0", "0", "0", "0"],
            -1.0,
            1.0,
            &[t; 5],
            Kenmotsu,
            true,
        ),
        entry(
            "kenmotsu-warped-3d",
            3,
            &[
                ((0, 0), "1"),
                ((1, 1), "exp(2*x0)"),
                ((2, 2), "exp(2*x0)*sin(x1)^2"),
            ],
            &["1", "0", "0"],
            -1.0,
            1.0,
            &[t, angle, phase],
            Kenmotsu,
            false,
        ),
        entry(
            "kenmotsu-warped-5d",
            5,
            &[
                ((0, 0), "1"),
                ((1, 1), "exp(2*x0)"),
                ((2, 2), "exp(2*x0)*sin(x1)^2"),
                ((3, 3), "exp(2*x0)"),
                ((4, 4), "exp(2*x0)*sin(x3)^2"),
            ],
            &["1", "0", "0", "0", "0"],
            -1.0,
            1.0,
            &[t, angle, phase, angle, phase],
            Kenmotsu,
            false,
        ),
        entry(
            "de-sitter-4d",
            4,
            &[
                ((0, 0), "-1"),
                ((1, 1), "cosh(x0)^2"),
                ((2, 2), "cosh(x0)^2*sin(x1)^2"),
                ((3, 3), "cosh(x0)^2*sin(x1)^2*sin(x2)^2"),
            ],
            &["1", "0", "0", "0"],
            1.0,
            -1.0,
            &[t, angle, angle, phase],
            EpsParaSasakian,
            true,
        ),
        entry(
            "flat-4d",
            4,
            &[((0, 0), "1"), ((1, 1), "1"), ((2, 2), "1"), ((3, 3), "1")],
            &["1", "0", "0", "0"],
            0.0,
            1.0,
            &[t; 4],
            ConstantCurvature,
            true,
        ),
        RegistryEntry::new(
            random_polynomial_metric(3, 0).with_name("random-3d"),
            Generic,
            false,
        )
        .expect("generic entry"),
    ]
}

pub fn builtin(name: &str) -> Option<RegistryEntry> {
    builtin_registry().into_iter().find(|e| e.name() == name)
}

/// A unit vector `ξ` with `g(ξ,ξ) = ε` and `η = ε g(·, ξ)`.
#[derive(Clone, Debug, PartialEq)]
pub struct UnitField {
    pub xi: Vec<f64>,
    pub eta: Vec<f64>,
    pub epsilon: f64,
}

impl UnitField {
    /// Accepts `xi` only if `g(ξ,ξ) = ε` to `1e-9`.
    pub fn new(metric: &MetricPair, xi: Vec<f64>, epsilon: f64) -> Result<UnitField> {
        let found = metric.inner(&xi, &xi);
        if (found - epsilon).abs() > 1e-9 {
            return Err(Error::NotUnit {
                expected: epsilon,
                found,
            });
        }
        let eta = metric
            .lower_vector(&xi)
            .into_iter()
            .map(|v| v * epsilon)
            .collect();
        Ok(UnitField { xi, eta, epsilon })
    }

    /// Normalizes a non-null `v`; `ε` is the sign of `g(v,v)`.
    pub fn normalized(metric: &MetricPair, v: &[f64]) -> Result<UnitField> {
        let q = metric.inner(v, v);
        if q.abs() < 1e-12 {
            return Err(Error::NotUnit {
                expected: 1.0,
                found: q,
            });
        }
        let s = 1.0 / q.abs().sqrt();
        UnitField::new(metric, v.iter().map(|c| c * s).collect(), q.signum())
    }

    pub fn eta_of(&self, x: &[f64]) -> f64 {
        self.eta.iter().zip(x).map(|(a, b)| a * b).sum()
    }
}

/// A point frame together with the unit field and nullity constant.
#[derive(Clone, Debug)]
pub struct NkFrame {
    pub frame: PointFrame,
    pub unit: UnitField,
    pub k: f64,
}

impl NkFrame {
    pub fn at(spec: &ManifoldSpec, p: &[f64], max_ell: usize) -> Result<NkFrame> {
        let frame = frame(spec, p, max_ell)?;
        let xi = spec.xi_at(p)?;
        let unit = UnitField::new(&frame.metric, xi, spec.epsilon)?;
        Ok(NkFrame {
            frame,
            unit,
            k: spec.k,
        })
    }

    pub fn n(&self) -> usize {
        self.frame.dim()
    }

    pub fn epsilon(&self) -> f64 {
        self.unit.epsilon
    }

    pub fn xi(&self) -> &[f64] {
        &self.unit.xi
    }

    pub fn eta(&self) -> &[f64] {
        &self.unit.eta
    }
}

/// Frames at the manifold's deterministic sample points.
pub fn sample_frames(
    spec: &ManifoldSpec,
    count: usize,
    seed: u64,
    max_ell: usize,
) -> Result<Vec<NkFrame>> {
    spec.sample_points(count, seed)
        .iter()
        .map(|p| NkFrame::at(spec, p, max_ell))
        .collect()
}

/// One identity and its worst residual.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IdentityResidual {
    pub tag: String,
    pub residual: f64,
}

fn delta(a: usize, b: usize) -> f64 {
    if a == b {
        1.0
    } else {
        0.0
    }
}

/// `max|lhs − rhs|` over components and over a few random argument tuples.
fn compare(lhs: &Tensor, rhs: &Tensor, rng: &mut ChaCha8Rng) -> f64 {
    let diff = lhs.sub(rhs).expect("identity sides share a shape");
    let mut worst = diff.max_abs();
    if diff.rank() > 0 {
        for _ in 0..3 {
            let args: Vec<Vec<f64>> = (0..diff.rank())
                .map(|_| {
                    (0..diff.dim())
                        .map(|_| rng.random_range(-1.0..1.0))
                        .collect()
                })
                .collect();
            let refs: Vec<&[f64]> = args.iter().map(Vec::as_slice).collect();
            worst = worst.max(diff.evaluate(&refs).abs());
        }
    }
    worst
}

/// Highest Ricci power checked by [`verify_nullity`].
pub const NULLITY_MAX_ELL: usize = 3;

/// Residuals of the nullity identities at one frame.
pub fn verify_nullity(nf: &mut NkFrame) -> Vec<IdentityResidual> {
    let n = nf.n();
    let (eps, k) = (nf.epsilon(), nf.k);
    let nm1 = n as f64 - 1.0;
    let xi = nf.unit.xi.clone();
    let eta = nf.unit.eta.clone();
    let mut rng = ChaCha8Rng::seed_from_u64(
        nf.frame
            .point
            .iter()
            .fold(17u64, |h, v| h.rotate_left(7) ^ v.to_bits()),
    );
    let f = &nf.frame;
    let g = f.g();
    let mut out = Vec::new();
    let mut push = |tag: &str, r: f64| {
        out.push(IdentityResidual {
            tag: tag.to_string(),
            residual: r,
        })
    };

    let unit = (f.metric.inner(&xi, &xi) - eps)
        .abs()
        .max((nf.unit.eta_of(&xi) - 1.0).abs());
    push("eq-cond", unit);

    let r_xy_xi = f.r13.contract_slot_with(2, &xi);
    let rhs = Tensor::from_fn(n, &[Co, Co, Contra], |i| {
        eps * k * (eta[i[1]] * delta(i[0], i[2]) - eta[i[0]] * delta(i[1], i[2]))
    });
    push("eq-curvature", compare(&r_xy_xi, &rhs, &mut rng));

    let r_xi_x_y = f.r13.contract_slot_with(0, &xi);
    let rhs = Tensor::from_fn(n, &[Co, Co, Contra], |i| {
        eps * k * (eps * g.get(&[i[0], i[1]]) * xi[i[2]] - eta[i[1]] * delta(i[0], i[2]))
    });
    push("eq-curvature-2", compare(&r_xi_x_y, &rhs, &mut rng));

    let r_xi_x_xi = r_xi_x_y.contract_slot_with(1, &xi);
    let rhs = Tensor::from_fn(n, &[Co, Contra], |i| {
        eps * k * (eta[i[0]] * xi[i[1]] - delta(i[0], i[1]))
    });
    push("eq-curvature-3", compare(&r_xi_x_xi, &rhs, &mut rng));

    let r_xyz_xi = f.r04.contract_slot_with(3, &xi);
    let rhs = Tensor::from_fn(n, &[Co; 3], |i| {
        eps * k * (eta[i[0]] * g.get(&[i[1], i[2]]) - eta[i[1]] * g.get(&[i[0], i[2]]))
    });
    push("eq-eps-PS-R(X,Y,Z,xi)", compare(&r_xyz_xi, &rhs, &mut rng));

    let eta_r = f.r13.contract_slot_with(3, &eta);
    let rhs = Tensor::from_fn(n, &[Co; 3], |i| {
        k * (eta[i[0]] * g.get(&[i[1], i[2]]) - eta[i[1]] * g.get(&[i[0], i[2]]))
    });
    push("eq-eps-PS-eta(R(X,Y),Z)", compare(&eta_r, &rhs, &mut rng));

    let s_x_xi = f.ricci.contract_slot_with(1, &xi);
    let rhs = Tensor::covector(&eta).scaled(eps * k * nm1);
    push("eq-ricci", compare(&s_x_xi, &rhs, &mut rng));

    let q_xi = f.ricci_op.contract_slot_with(1, &xi);
    push(
        "eq-Q",
        compare(&q_xi, &Tensor::vector(&xi).scaled(k * nm1), &mut rng),
    );

    let s_xi_xi = s_x_xi.contract_slot_with(0, &xi);
    push("eq-S-xi-xi", (s_xi_xi.value() - eps * k * nm1).abs());

    let eta_q = f.ricci_op.contract_slot_with(0, &eta);
    push(
        "eq-eta-QX",
        compare(&eta_q, &Tensor::covector(&eta).scaled(k * nm1), &mut rng),
    );

    for ell in 0..=NULLITY_MAX_ELL {
        let sl = nf.frame.ricci_power(ell).contract_slot_with(1, &xi);
        let rhs = Tensor::covector(&eta).scaled(eps * (k * nm1).powi(ell as i32));
        push(
            &format!("eq-Sp-QX-xi[l={ell}]"),
            compare(&sl, &rhs, &mut rng),
        );
    }
    out
}

/// `max |∇_X ξ − (X − η(X)ξ)|` at a frame built from the manifold.
pub fn kenmotsu_structure_residual(spec: &ManifoldSpec, nf: &NkFrame) -> Result<f64> {
    let n = nf.n();
    let jac = spec.xi_jacobian(&nf.frame.point)?;
    let (xi, eta) = (nf.xi(), nf.eta());
    let mut worst = 0.0f64;
    for a in 0..n {
        for i in 0..n {
            let cov = jac[i * n + a]
                + (0..n)
                    .map(|m| nf.frame.christoffel.get(i, a, m) * xi[m])
                    .sum::<f64>();
            worst = worst.max((cov - (delta(a, i) - eta[a] * xi[i])).abs());
        }
    }
    Ok(worst)
}

/// `T` contracted against `ξ` in the eight ways the lemma describes.
#[derive(Clone, Debug)]
pub struct LemmaForms {
    /// `T(X,Y)ξ`, slots `[x][y][out]`
    pub t_xy_xi: Tensor,
    /// `T(ξ,X)ξ`, slots `[x][out]`
    pub t_xi_x_xi: Tensor,
    /// `T(ξ,Y)Z`, slots `[y][z][out]`
    pub t_xi_yz: Tensor,
    /// `η(T(X,Y)ξ)`
    pub eta_t_xy_xi: Tensor,
    /// `T(X,Y,ξ,V)`
    pub t_xy_xi_v: Tensor,
    /// `T(X,ξ)ξ`, slots `[x][out]`
    pub t_x_xi_xi: Tensor,
    /// `S_T(X,ξ)`
    pub st_x_xi: Tensor,
    /// `S_T(ξ,ξ)`
    pub st_xi_xi: f64,
}

pub const LEMMA_TAGS: [&str; 8] = [
    "eq-X-Y-xi",
    "eq-xi-X-xi",
    "eq-xi-Y-Z",
    "eq-eta-xi-X-Y",
    "eq-X-Y-xi-V",
    "eq-X-xi-xi",
    "eq-ric-T1",
    "eq-ric-T2",
];

impl LemmaForms {
    /// Per-member max-abs differences, in [`LEMMA_TAGS`] order.
    pub fn residuals(&self, other: &LemmaForms) -> Vec<IdentityResidual> {
        let values = [
            self.t_xy_xi.max_diff(&other.t_xy_xi),
            self.t_xi_x_xi.max_diff(&other.t_xi_x_xi),
            self.t_xi_yz.max_diff(&other.t_xi_yz),
            self.eta_t_xy_xi.max_diff(&other.eta_t_xy_xi),
            self.t_xy_xi_v.max_diff(&other.t_xy_xi_v),
            self.t_x_xi_xi.max_diff(&other.t_x_xi_xi),
            self.st_x_xi.max_diff(&other.st_x_xi),
            (self.st_xi_xi - other.st_xi_xi).abs(),
        ];
        LEMMA_TAGS
            .iter()
            .zip(values)
            .map(|(t, r)| IdentityResidual {
                tag: t.to_string(),
                residual: r,
            })
            .collect()
    }

    /// Largest component across all members, for relative tolerances.
    pub fn scale(&self) -> f64 {
        [
            &self.t_xy_xi,
            &self.t_xi_x_xi,
            &self.t_xi_yz,
            &self.eta_t_xy_xi,
            &self.t_xy_xi_v,
            &self.t_x_xi_xi,
            &self.st_x_xi,
        ]
        .iter()
        .map(|t| t.max_abs())
        .fold(self.st_xi_xi.abs(), f64::max)
    }
}

/// Closed forms using only `g, S, Q, r, ξ, η, ε, k, n` and the coefficients.
pub fn lemma_oracle(nf: &NkFrame, c: &CoeffVector) -> LemmaForms {
    let n = nf.n();
    let nf64 = n as f64;
    let nm1 = nf64 - 1.0;
    let (eps, k) = (nf.epsilon(), nf.k);
    let a = &c.0;
    let f = &nf.frame;
    let r = f.scalar;
    let (xi, eta) = (nf.xi(), nf.eta());
    let g = |p: usize, q: usize| f.g().get(&[p, q]);
    let s = |p: usize, q: usize| f.ricci.get(&[p, q]);
    // (QX)^i for X = e_x
    let q = |i: usize, x: usize| f.ricci_op.get(&[i, x]);

    let c1 = -eps * k * a[0] + eps * k * nm1 * a[2] - eps * a[7] * r;
    let c2 = eps * k * a[0] + eps * k * nm1 * a[1] + eps * a[7] * r;

    let t_xy_xi = Tensor::from_fn(n, &[Co, Co, Contra], |i| {
        let (x, y, o) = (i[0], i[1], i[2]);
        c1 * eta[x] * delta(y, o)
            + c2 * eta[y] * delta(x, o)
            + a[3] * s(x, y) * xi[o]
            + eps * a[4] * eta[y] * q(o, x)
            + eps * a[5] * eta[x] * q(o, y)
            + k * nm1 * a[6] * g(x, y) * xi[o]
    });

    let b = eps * k * a[0] + eps * k * nm1 * (a[1] + a[3] + a[4] + a[6]) + eps * a[7] * r;
    let t_xi_x_xi = Tensor::from_fn(n, &[Co, Contra], |i| {
        let (x, o) = (i[0], i[1]);
        c1 * delta(x, o) + eps * a[5] * q(o, x) + b * eta[x] * xi[o]
    });

    let gc = k * a[0] + k * nm1 * a[4] + a[7] * r;
    let t_xi_yz = Tensor::from_fn(n, &[Co, Co, Contra], |i| {
        let (y, z, o) = (i[0], i[1], i[2]);
        gc * g(y, z) * xi[o]
            + a[1] * s(y, z) * xi[o]
            + eps * k * nm1 * a[3] * eta[y] * delta(z, o)
            + eps * a[5] * eta[z] * q(o, y)
            + eps * a[6] * eta[y] * q(o, z)
            + c1 * eta[z] * delta(y, o)
    });

    let eta_t_xy_xi = Tensor::from_fn(n, &[Co, Co], |i| {
        let (x, y) = (i[0], i[1]);
        eps * k * nm1 * (a[1] + a[2] + a[4] + a[5]) * eta[x] * eta[y]
            + a[3] * s(x, y)
            + k * nm1 * a[6] * g(x, y)
    });

    let t_xy_xi_v = Tensor::from_fn(n, &[Co; 3], |i| {
        let (x, y, v) = (i[0], i[1], i[2]);
        c1 * eta[x] * g(y, v)
            + c2 * eta[y] * g(x, v)
            + eps * a[3] * s(x, y) * eta[v]
            + eps * a[4] * eta[y] * s(x, v)
            + eps * a[5] * eta[x] * s(y, v)
            + eps * k * nm1 * a[6] * g(x, y) * eta[v]
    });

    let d = -eps * k * a[0] + eps * k * nm1 * (a[2] + a[3] + a[5] + a[6]) - eps * a[7] * r;
    let t_x_xi_xi = Tensor::from_fn(n, &[Co, Contra], |i| {
        let (x, o) = (i[0], i[1]);
        d * eta[x] * xi[o] + c2 * delta(x, o) + eps * a[4] * q(o, x)
    });

    let st = eps * k * nm1 * c.ricci_weight(n) + eps * r * c.scalar_weight(n);
    let st_x_xi = Tensor::covector(eta).scaled(st);

    LemmaForms {
        t_xy_xi,
        t_xi_x_xi,
        t_xi_yz,
        eta_t_xy_xi,
        t_xy_xi_v,
        t_x_xi_xi,
        st_x_xi,
        st_xi_xi: st,
    }
}

/// The same eight objects by contracting the assembled `T` directly.
pub fn lemma_direct(nf: &NkFrame, c: &CoeffVector) -> LemmaForms {
    let f = &nf.frame;
    let (xi, eta) = (nf.xi(), nf.eta());
    let t04 = build_t(f, c);
    let t13 = build_t13(f, c);
    let t_xy_xi = t13.contract_slot_with(2, xi);
    let t_xi_yz = t13.contract_slot_with(0, xi);
    let t_xi_x_xi = t_xi_yz.contract_slot_with(1, xi);
    let eta_t_xy_xi = t_xy_xi.contract_slot_with(2, eta);
    let t_xy_xi_v = t04.contract_slot_with(2, xi);
    let t_x_xi_xi = t_xy_xi.contract_slot_with(1, xi);
    let st_x_xi = ricci_of_t(f, c).contract_slot_with(1, xi);
    let st_xi_xi = st_x_xi.contract_slot_with(0, xi).value();
    LemmaForms {
        t_xy_xi,
        t_xi_x_xi,
        t_xi_yz,
        eta_t_xy_xi,
        t_xy_xi_v,
        t_x_xi_xi,
        st_x_xi,
        st_xi_xi,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family::{coefficients, Preset};

    fn frames(name: &str, count: usize) -> (RegistryEntry, Vec<NkFrame>) {
        let e = builtin(name).unwrap();
        let f = sample_frames(&e.spec, count, 0, 3).unwrap();
        (e, f)
    }

    fn worst(res: &[IdentityResidual]) -> f64 {
        res.iter().map(|r| r.residual).fold(0.0, f64::max)
    }

    #[test]
    fn warped_kenmotsu_passes_nullity_and_structure() {
        let (e, mut fs) = frames("kenmotsu-warped-3d", 20);
        for f in &mut fs {
            let res = verify_nullity(f);
            assert!(worst(&res) < 1e-9, "{res:?}");
            assert!(kenmotsu_structure_residual(&e.spec, f).unwrap() < 1e-12);
        }
    }

    #[test]
    fn hyperbolic_five_ricci_on_xi() {
        let (_, fs) = frames("h5", 3);
        for f in &fs {
            let s = f.frame.ricci.evaluate(&[f.xi(), f.xi()]);
            assert!((s + 4.0).abs() < 1e-12);
        }
    }

    #[test]
    fn de_sitter_ricci_on_xi() {
        let (_, fs) = frames("de-sitter-4d", 3);
        let x = [0.3, -0.2, 0.5, 0.1];
        for f in &fs {
            assert_eq!(f.epsilon(), -1.0);
            let lhs = f.frame.ricci.evaluate(&[&x, f.xi()]);
            assert!((lhs + 3.0 * f.unit.eta_of(&x)).abs() < 1e-12);
        }
    }

    #[test]
    fn sphere_second_ricci_power_on_xi() {
        let (_, mut fs) = frames("s3", 3);
        let x = [0.4, 0.1, -0.7];
        for f in &mut fs {
            let eta_x = f.unit.eta_of(&x);
            let xi = f.xi().to_vec();
            let v = f.frame.ricci_power(2).evaluate(&[&x, &xi]);
            assert!((v - 4.0 * eta_x).abs() < 1e-12);
        }
    }

    #[test]
    fn flat_entry_has_zero_residuals() {
        let (_, mut fs) = frames("flat-4d", 2);
        assert_eq!(worst(&verify_nullity(&mut fs[0])), 0.0);
    }

    #[test]
    fn not_unit_field_rejected() {
        let spec = ManifoldSpec::from_sources(
            "x",
            3,
            &[((0, 0), "1"), ((1, 1), "1"), ((2, 2), "1")],
            Some(&["2", "0", "0"]),
            0.0,
            1.0,
            &[(0.0, 1.0); 3],
        )
        .unwrap();
        assert!(matches!(
            NkFrame::at(&spec, &[0.5; 3], 1),
            Err(Error::NotUnit { .. })
        ));
        let bad_class = RegistryEntry::new(builtin("h3").unwrap().spec, ClassTag::Sasakian, true);
        assert!(bad_class.is_err());
    }

    #[test]
    fn registry_class_signatures() {
        for e in builtin_registry() {
            assert!(e.class.admits(e.spec.k, e.spec.epsilon), "{}", e.name());
        }
        assert_eq!(
            ClassTag::from_name("eps-para-sasakian"),
            Some(ClassTag::EpsParaSasakian)
        );
    }

    #[test]
    fn lemma_for_curvature_preset_reduces_to_ricci_on_xi() {
        let (_, fs) = frames("h3", 2);
        let c = coefficients(Preset::R, 3).unwrap();
        let forms = lemma_oracle(&fs[0], &c);
        assert!((forms.st_xi_xi + 2.0).abs() < 1e-15);
    }

    #[test]
    fn concircular_on_sphere_vanishes_against_xi() {
        let (_, fs) = frames("s5", 2);
        let c = coefficients(Preset::Concircular, 5).unwrap();
        let direct = lemma_direct(&fs[1], &c);
        assert!(direct.t_x_xi_xi.max_abs() < 1e-12);
        assert!(lemma_oracle(&fs[1], &c).t_x_xi_xi.max_abs() < 1e-12);
    }

    #[test]
    fn oracle_matches_direct_on_warped_models() {
        for name in ["kenmotsu-warped-3d", "kenmotsu-warped-5d", "de-sitter-4d"] {
            let (e, fs) = frames(name, 3);
            for c in [
                [0.7, -0.3, 1.1, 0.4, -0.9, 0.2, 0.6, -1.3],
                [1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
            ] {
                let c = CoeffVector(c);
                for f in &fs {
                    let res = lemma_oracle(f, &c).residuals(&lemma_direct(f, &c));
                    assert!(worst(&res) < 1e-10, "{} {res:?}", e.name());
                }
            }
        }
    }
}
