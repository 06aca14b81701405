//! Fitting `T_a·K = L Q(σ, K)` pointwise, and the consequences drawn from it.
//!
//! `K` is either the covariant `T_b` or its Ricci tensor `S_{T_b}`; `σ` is `g`
//! or a Ricci power `S^ℓ`. `L` is the least-squares ratio of the two sides.

pub mod tables;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::derive::{derive, q_op, CurvOp};
use crate::error::{Error, Result};
use crate::family::{build_t, build_t13, coefficients, ricci_of_t, CoeffVector, Preset};
use crate::geometry::PointFrame;
use crate::nk::{NkFrame, UnitField};
use crate::tensors::{Tensor, Variance};

/// Both sides below this max-abs make a fit degenerate.
pub const DEGENERACY_FLOOR: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConditionKind {
    /// `T_a·T_b = L Q(g, T_b)`
    TtG,
    /// `T_a·T_b = L Q(S^ℓ, T_b)`
    TtSl,
    /// `T_a·S_{T_b} = L Q(g, S_{T_b})`
    TRicciG,
    /// `T_a·S_{T_b} = L Q(S^ℓ, S_{T_b})`
    TRicciSl,
}

impl ConditionKind {
    pub fn name(self) -> &'static str {
        match self {
            ConditionKind::TtG => "tt-g",
            ConditionKind::TtSl => "tt-sl",
            ConditionKind::TRicciG => "t-ricci-g",
            ConditionKind::TRicciSl => "t-ricci-sl",
        }
    }

    pub fn uses_ricci(self) -> bool {
        matches!(self, ConditionKind::TRicciG | ConditionKind::TRicciSl)
    }

    pub fn uses_power(self) -> bool {
        matches!(self, ConditionKind::TtSl | ConditionKind::TRicciSl)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConditionSpec {
    pub kind: ConditionKind,
    pub ta: Preset,
    pub tb: Preset,
    /// Ricci power for the `S^ℓ` kinds; ignored otherwise.
    pub ell: usize,
}

impl ConditionSpec {
    pub fn new(kind: ConditionKind, ta: Preset, tb: Preset, ell: usize) -> ConditionSpec {
        ConditionSpec { kind, ta, tb, ell }
    }

    /// `R·R = L Q(g, R)`.
    pub fn pseudosymmetry() -> ConditionSpec {
        ConditionSpec::new(ConditionKind::TtG, Preset::R, Preset::R, 0)
    }

    /// `R·R = L Q(S^ℓ, R)`.
    pub fn ricci_generalized(ell: usize) -> ConditionSpec {
        ConditionSpec::new(ConditionKind::TtSl, Preset::R, Preset::R, ell)
    }

    /// `R·S = L Q(g, S)`.
    pub fn ricci_pseudosymmetry() -> ConditionSpec {
        ConditionSpec::new(ConditionKind::TRicciG, Preset::R, Preset::R, 0)
    }

    /// Power of `S` used as `σ`; `0` means `g`.
    pub fn sigma_power(&self) -> usize {
        if self.kind.uses_power() {
            self.ell
        } else {
            0
        }
    }

    pub fn label(&self) -> String {
        let sigma = match self.sigma_power() {
            0 => "g".to_string(),
            1 => "S".to_string(),
            l => format!("S^{l}"),
        };
        let k = if self.kind.uses_ricci() {
            format!("S_{}", self.tb)
        } else {
            self.tb.to_string()
        };
        format!("{}·{} = L Q({}, {})", self.ta, k, sigma, k)
    }

    fn coefficients(&self, n: usize) -> Result<(CoeffVector, CoeffVector)> {
        Ok((coefficients(self.ta, n)?, coefficients(self.tb, n)?))
    }
}

/// The argument `K` and the operator `T_a` of a condition at a frame.
fn condition_parts(
    cond: &ConditionSpec,
    frame: &mut PointFrame,
) -> Result<(CurvOp, Tensor, Tensor)> {
    let (ca, cb) = cond.coefficients(frame.dim())?;
    let op = CurvOp::new(build_t13(frame, &ca))?;
    let k = if cond.kind.uses_ricci() {
        ricci_of_t(frame, &cb)
    } else {
        build_t(frame, &cb)
    };
    let sigma = frame.ricci_power(cond.sigma_power()).clone();
    Ok((op, k, sigma))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FitReport {
    /// `None` when the right-hand side vanishes.
    pub l: Option<f64>,
    pub residual: f64,
    pub degenerate: bool,
    pub lhs_max: f64,
    pub rhs_max: f64,
    pub point: Vec<f64>,
}

/// Fits `L` from the two sides, given as tensors of equal shape.
pub fn fit_sides(lhs: &Tensor, rhs: &Tensor, point: Vec<f64>) -> Result<FitReport> {
    let lhs_max = lhs.max_abs();
    let rhs_max = rhs.max_abs();
    let degenerate = lhs_max < DEGENERACY_FLOOR && rhs_max < DEGENERACY_FLOOR;
    let (l, residual) = if rhs_max < DEGENERACY_FLOOR {
        (None, lhs_max)
    } else {
        let l = lhs.dot(rhs) / rhs.dot(rhs);
        (Some(l), lhs.axpy(-l, rhs)?.max_abs())
    };
    Ok(FitReport {
        l,
        residual,
        degenerate,
        lhs_max,
        rhs_max,
        point,
    })
}

/// Pointwise fit of `L` for one condition.
pub fn fit_l(cond: &ConditionSpec, frame: &mut PointFrame) -> Result<FitReport> {
    let (op, k, sigma) = condition_parts(cond, frame)?;
    let lhs = derive(&op, &k)?;
    let rhs = q_op(&sigma, &k)?;
    fit_sides(&lhs, &rhs, frame.point.clone())
}

/// Fits across points, summarized.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LSummary {
    pub points: usize,
    pub degenerate_points: usize,
    /// Mean over points with a numeric `L`.
    pub mean_l: Option<f64>,
    pub max_deviation: Option<f64>,
    pub max_residual: f64,
}

impl LSummary {
    pub fn of(reports: &[FitReport]) -> LSummary {
        let ls: Vec<f64> = reports.iter().filter_map(|r| r.l).collect();
        let mean_l = (!ls.is_empty()).then(|| ls.iter().sum::<f64>() / ls.len() as f64);
        let max_deviation = mean_l.map(|m| ls.iter().map(|l| (l - m).abs()).fold(0.0, f64::max));
        LSummary {
            points: reports.len(),
            degenerate_points: reports.iter().filter(|r| r.degenerate).count(),
            mean_l,
            max_deviation,
            max_residual: reports.iter().map(|r| r.residual).fold(0.0, f64::max),
        }
    }

    pub fn all_degenerate(&self) -> bool {
        self.points > 0 && self.degenerate_points == self.points
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClassificationReport {
    /// `max|S − (r/n) g|`
    pub einstein_residual: f64,
    /// Least-squares `S ≈ α g + β η⊗η`.
    pub alpha: f64,
    pub beta: f64,
    pub eta_einstein_residual: f64,
    pub scalar: f64,
    /// `max|S − k(n−1) g|`
    pub k_einstein_residual: f64,
}

fn eta_outer(eta: &[f64]) -> Tensor {
    Tensor::from_fn(eta.len(), &[Variance::Co; 2], |i| eta[i[0]] * eta[i[1]])
}

pub fn classify(nf: &NkFrame) -> ClassificationReport {
    let f = &nf.frame;
    let n = f.dim() as f64;
    let s = &f.ricci;
    let g = f.g();
    let ee = eta_outer(nf.eta());
    let einstein_residual = s.axpy(-f.scalar / n, g).expect("same shape").max_abs();
    let k_einstein_residual = s.axpy(-nf.k * (n - 1.0), g).expect("same shape").max_abs();
    // normal equations for min |S − αg − βηη|²
    let (gg, ge, eee) = (g.dot(g), g.dot(&ee), ee.dot(&ee));
    let (sg, se) = (s.dot(g), s.dot(&ee));
    let det = gg * eee - ge * ge;
    let (alpha, beta) = if det.abs() > 1e-14 * gg * eee {
        ((sg * eee - se * ge) / det, (gg * se - ge * sg) / det)
    } else {
        (sg / gg, 0.0)
    };
    let eta_einstein_residual = s
        .axpy(-alpha, g)
        .and_then(|t| t.axpy(-beta, &ee))
        .expect("same shape")
        .max_abs();
    ClassificationReport {
        einstein_residual,
        alpha,
        beta,
        eta_einstein_residual,
        scalar: f.scalar,
        k_einstein_residual,
    }
}

fn random_vector(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(-1.0..1.0)).collect()
}

/// The condition evaluated with its pair argument set to `(ξ, X)` and, for
/// `T_b`, its last argument set to `ξ`, at random `U, V, W, X`; computed by
/// vector substitution, not through [`derive`]. Returns the worst
/// `|lhs − L rhs|` over `trials` draws.
pub fn master_identity_check(
    cond: &ConditionSpec,
    frame: &mut PointFrame,
    unit: &UnitField,
    l: f64,
    seed: u64,
    trials: usize,
) -> Result<f64> {
    let n = frame.dim();
    let (op, k, sigma) = condition_parts(cond, frame)?;
    let xi = unit.xi.as_slice();
    let sig = |a: &[f64], b: &[f64]| sigma.evaluate(&[a, b]);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for _ in 0..trials {
        let x = random_vector(&mut rng, n);
        // A Z = T_a(ξ, X) Z and W Z = (ξ ∧_σ X) Z = σ(X,Z) ξ − σ(ξ,Z) X
        let a = |z: &[f64]| op.apply(xi, &x, z);
        let w = |z: &[f64]| {
            let (p, q) = (sig(&x, z), sig(xi, z));
            xi.iter()
                .zip(&x)
                .map(|(s, t)| p * s - q * t)
                .collect::<Vec<f64>>()
        };
        let (lhs, rhs) = if cond.kind.uses_ricci() {
            let u = random_vector(&mut rng, n);
            let side = |m: &dyn Fn(&[f64]) -> Vec<f64>| {
                -k.evaluate(&[&m(&u), xi]) - k.evaluate(&[&u, &m(xi)])
            };
            (side(&a), side(&w))
        } else {
            let (u, v, ww) = (
                random_vector(&mut rng, n),
                random_vector(&mut rng, n),
                random_vector(&mut rng, n),
            );
            let side = |m: &dyn Fn(&[f64]) -> Vec<f64>| {
                -k.evaluate(&[&m(&u), &v, &ww, xi])
                    - k.evaluate(&[&u, &m(&v), &ww, xi])
                    - k.evaluate(&[&u, &v, &m(&ww), xi])
                    - k.evaluate(&[&u, &v, &ww, &m(xi)])
            };
            (side(&a), side(&w))
        };
        worst = worst.max((lhs - l * rhs).abs());
    }
    Ok(worst)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    /// `a0 + a5 + a6 = 0`: the theorem does not apply.
    PreconditionFailed,
    Einstein,
    LBranch,
    EtaEinstein,
    /// Both sides vanish; no `L` to compare.
    Degenerate,
    Violation,
}

impl Verdict {
    pub fn is_violation(self) -> bool {
        self == Verdict::Violation
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DichotomyTolerances {
    /// Relative to `max(1, max|S|)`.
    pub tensor: f64,
    pub l: f64,
    pub coefficient: f64,
}

impl Default for DichotomyTolerances {
    fn default() -> Self {
        DichotomyTolerances {
            tensor: 1e-8,
            l: 1e-6,
            coefficient: 1e-12,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DichotomyReport {
    pub verdict: Verdict,
    pub l: Option<f64>,
    pub k_einstein_residual: f64,
    /// Residual of the η-Einstein relation, when its case applies.
    pub eta_relation_residual: Option<f64>,
}

/// `R·T_a = L Q(g, T_a)` forces `S = k(n−1)g`, `L = k`, or (when
/// `a0+a2+a3+n a4+a5+a6 = 0`) an η-Einstein relation.
pub fn dichotomy_check(
    nf: &NkFrame,
    c: &CoeffVector,
    l: Option<f64>,
    tol: &DichotomyTolerances,
) -> DichotomyReport {
    let a = &c.0;
    let f = &nf.frame;
    let n = f.dim();
    let nf64 = n as f64;
    let (eps, k, r) = (nf.epsilon(), nf.k, f.scalar);
    let scale = f.ricci.max_abs().max(1.0);
    let k_einstein_residual = f
        .ricci
        .axpy(-k * (nf64 - 1.0), f.g())
        .expect("same shape")
        .max_abs();
    let case_two = (a[0] + a[2] + a[3] + nf64 * a[4] + a[5] + a[6]).abs() < tol.coefficient;
    let eta_relation_residual = case_two.then(|| {
        let lhs = f.ricci.scaled(-eps * (a[0] + a[5] + a[6]));
        let gc = eps * (a[4] * r - k * (nf64 - 1.0) * (a[0] + nf64 * a[4] + a[5] + a[6]));
        let rhs = f
            .g()
            .scaled(gc)
            .axpy(
                (a[2] + a[3]) * (r - k * nf64 * (nf64 - 1.0)),
                &eta_outer(nf.eta()),
            )
            .expect("same shape");
        lhs.max_diff(&rhs)
    });
    let verdict = if (a[0] + a[5] + a[6]).abs() < tol.coefficient {
        Verdict::PreconditionFailed
    } else if k_einstein_residual < tol.tensor * scale {
        Verdict::Einstein
    } else if l.is_some_and(|l| (l - k).abs() < tol.l) {
        Verdict::LBranch
    } else if eta_relation_residual.is_some_and(|res| res < tol.tensor * scale) {
        Verdict::EtaEinstein
    } else if l.is_none() {
        Verdict::Degenerate
    } else {
        Verdict::Violation
    };
    DichotomyReport {
        verdict,
        l,
        k_einstein_residual,
        eta_relation_residual,
    }
}

/// `E, F, G` of the `(T_a, S)` condition.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RicciConstants {
    pub e: f64,
    pub f: f64,
    pub g: f64,
}

pub fn ricci_condition_constants(nf: &NkFrame, c: &CoeffVector) -> RicciConstants {
    let a = &c.0;
    let nm1 = nf.n() as f64 - 1.0;
    let (eps, k, r) = (nf.epsilon(), nf.k, nf.frame.scalar);
    RicciConstants {
        e: eps * (k * a[0] + a[7] * r - k * nm1 * a[1] - k * nm1 * a[2]),
        f: -eps * k * nm1 * (k * a[0] + k * nm1 * a[4] + a[7] * r),
        g: -k * k * nm1 * nm1 * (a[1] + a[2] + 2.0 * a[3] + a[4] + a[5] + 2.0 * a[6]),
    }
}

/// `max|ε a5 S² − E S − F g − G η⊗η − L(ε k(n−1) g − ε S)|`.
pub fn ricci_condition_residual(nf: &mut NkFrame, c: &CoeffVector, l: f64) -> f64 {
    let RicciConstants { e, f, g } = ricci_condition_constants(nf, c);
    let eps = nf.epsilon();
    let nm1 = nf.n() as f64 - 1.0;
    let k = nf.k;
    let ee = eta_outer(nf.eta());
    let s2 = nf.frame.ricci_power(2).clone();
    let fr = &nf.frame;
    let lhs = s2
        .scaled(eps * c.0[5])
        .axpy(-e, &fr.ricci)
        .and_then(|t| t.axpy(-f, fr.g()))
        .and_then(|t| t.axpy(-g, &ee))
        .expect("same shape");
    let rhs = fr
        .g()
        .scaled(l * eps * k * nm1)
        .axpy(-l * eps, &fr.ricci)
        .expect("same shape");
    lhs.max_diff(&rhs)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RrslReport {
    pub ell: usize,
    /// False for semisymmetric frames or `k = 0`.
    pub applicable: bool,
    pub fit: FitReport,
    pub predicted_l: Option<f64>,
    /// `max|S^ℓ − k^ℓ (n−1)^ℓ g|`
    pub power_einstein_residual: f64,
}

impl RrslReport {
    /// Whether the measured `L` and `S^ℓ` both match the prediction.
    pub fn prediction_holds(&self, tol_l: f64, tol_tensor: f64) -> bool {
        match (self.fit.l, self.predicted_l) {
            (Some(l), Some(p)) => {
                (l - p).abs() < tol_l && self.power_einstein_residual < tol_tensor
            }
            _ => false,
        }
    }
}

/// Checks `S^ℓ = k^ℓ(n−1)^ℓ g` and `L = 1/(k^{ℓ−1}(n−1)^ℓ)` for `R·R = L Q(S^ℓ, R)`.
pub fn rrsl_corollary_check(nf: &mut NkFrame, ell: usize) -> Result<RrslReport> {
    if ell == 0 {
        return Err(Error::Invalid("the Ricci power must be positive".into()));
    }
    let k = nf.k;
    let nm1 = nf.n() as f64 - 1.0;
    let fit = fit_l(&ConditionSpec::ricci_generalized(ell), &mut nf.frame)?;
    let semisymmetric = fit.lhs_max < DEGENERACY_FLOOR;
    let applicable = !semisymmetric && k != 0.0;
    let target = k.powi(ell as i32) * nm1.powi(ell as i32);
    let power = nf.frame.ricci_power(ell).clone();
    let power_einstein_residual = power.axpy(-target, nf.frame.g())?.max_abs();
    let predicted_l = (k != 0.0).then(|| 1.0 / (k.powi(ell as i32 - 1) * nm1.powi(ell as i32)));
    Ok(RrslReport {
        ell,
        applicable,
        fit,
        predicted_l,
        power_einstein_residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{frame, random_polynomial_metric};
    use crate::nk::{builtin, sample_frames};

    fn nk(name: &str, count: usize) -> Vec<NkFrame> {
        sample_frames(&builtin(name).unwrap().spec, count, 0, 3).unwrap()
    }

    #[test]
    fn random_metric_is_ricci_generalized_with_unit_factor() {
        let spec = random_polynomial_metric(3, 5);
        let mut f = frame(&spec, &spec.sample_points(1, 2)[0], 1).unwrap();
        let fit = fit_l(&ConditionSpec::ricci_generalized(1), &mut f).unwrap();
        assert!(
            (fit.l.unwrap() - 1.0).abs() < 1e-9 && fit.residual < 1e-10,
            "{fit:?}"
        );
    }

    #[test]
    fn warped_kenmotsu_pseudosymmetry_factor() {
        for mut f in nk("kenmotsu-warped-3d", 3) {
            let fit = fit_l(&ConditionSpec::pseudosymmetry(), &mut f.frame).unwrap();
            assert!((fit.l.unwrap() + 1.0).abs() < 1e-9, "{fit:?}");
            let unit = f.unit.clone();
            let res = master_identity_check(
                &ConditionSpec::pseudosymmetry(),
                &mut f.frame,
                &unit,
                -1.0,
                1,
                4,
            )
            .unwrap();
            assert!(res < 1e-10);
            // a wrong factor is caught by the projected identity
            let bad = master_identity_check(
                &ConditionSpec::pseudosymmetry(),
                &mut f.frame,
                &unit,
                -0.5,
                1,
                4,
            )
            .unwrap();
            assert!(bad > 1e-4);
        }
    }

    #[test]
    fn sphere_fit_is_degenerate() {
        for mut f in nk("s5", 2) {
            let fit = fit_l(&ConditionSpec::pseudosymmetry(), &mut f.frame).unwrap();
            assert!(fit.degenerate && fit.l.is_none());
        }
    }

    #[test]
    fn classification_of_models() {
        let h5 = &nk("h5", 1)[0];
        let c = classify(h5);
        assert!(c.k_einstein_residual < 1e-12 && (c.scalar + 20.0).abs() < 1e-11);
        let m3 = &nk("kenmotsu-warped-3d", 1)[0];
        let c = classify(m3);
        assert!(
            c.eta_einstein_residual < 1e-8 && c.beta.abs() > 1e-3 && c.einstein_residual > 1e-3,
            "{c:?}"
        );
        let flat = &nk("flat-4d", 1)[0];
        let c = classify(flat);
        assert_eq!((c.einstein_residual, c.scalar), (0.0, 0.0));
    }

    #[test]
    fn dichotomy_branches() {
        let tol = DichotomyTolerances::default();
        let r = coefficients(Preset::R, 3).unwrap();
        let mut m3 = nk("kenmotsu-warped-3d", 1).remove(0);
        let fit = fit_l(&ConditionSpec::pseudosymmetry(), &mut m3.frame).unwrap();
        assert_eq!(
            dichotomy_check(&m3, &r, fit.l, &tol).verdict,
            Verdict::LBranch
        );
        let s5 = nk("s5", 1).remove(0);
        let r5 = coefficients(Preset::R, 5).unwrap();
        assert_eq!(
            dichotomy_check(&s5, &r5, None, &tol).verdict,
            Verdict::Einstein
        );
        let mut bent = s5.clone();
        bent.frame.ricci.data_mut()[0] += 0.5;
        assert_eq!(
            dichotomy_check(&bent, &r5, Some(0.3), &tol).verdict,
            Verdict::Violation
        );
        let c = CoeffVector([1.0, 0.0, 0.0, 0.0, 0.0, -0.5, -0.5, 0.0]);
        assert_eq!(
            dichotomy_check(&s5, &c, None, &tol).verdict,
            Verdict::PreconditionFailed
        );
    }

    #[test]
    fn ricci_constants_on_hyperbolic_five() {
        let mut h5 = nk("h5", 1).remove(0);
        let c = coefficients(Preset::R, 5).unwrap();
        let k = ricci_condition_constants(&h5, &c);
        assert!(
            (k.e + 1.0).abs() < 1e-12 && (k.f + 4.0).abs() < 1e-12 && k.g == 0.0,
            "{k:?}"
        );
        assert!(ricci_condition_residual(&mut h5, &c, 0.7) < 1e-10);
        let s5 = nk("s5", 1).remove(0);
        let v = coefficients(Preset::Concircular, 5).unwrap();
        assert!(ricci_condition_constants(&s5, &v).e.abs() < 1e-12);
    }

    #[test]
    fn rrsl_inapplicable_on_sphere() {
        let mut s5 = nk("s5", 1).remove(0);
        let rep = rrsl_corollary_check(&mut s5, 1).unwrap();
        assert!(!rep.applicable);
    }

    #[test]
    fn zero_power_matches_metric_kind() {
        let mut f = nk("kenmotsu-warped-3d", 1).remove(0).frame;
        for (sl, g) in [
            (ConditionKind::TtSl, ConditionKind::TtG),
            (ConditionKind::TRicciSl, ConditionKind::TRicciG),
        ] {
            let a = fit_l(
                &ConditionSpec::new(sl, Preset::W3, Preset::Projective, 0),
                &mut f,
            )
            .unwrap();
            let b = fit_l(
                &ConditionSpec::new(g, Preset::W3, Preset::Projective, 0),
                &mut f,
            )
            .unwrap();
            assert_eq!(a, b);
        }
    }
}
