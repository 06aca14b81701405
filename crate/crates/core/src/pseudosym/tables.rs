//! Class-by-class consequences of the pseudosymmetry conditions, checked
//! against the registry models of each class.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use super::{fit_l, ConditionSpec, FitReport, LSummary, DEGENERACY_FLOOR};
use crate::error::{Error, Result};
use crate::family::Preset;
use crate::nk::{sample_frames, ClassTag, NkFrame, RegistryEntry};
use crate::tensors::{Tensor, Variance};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TableName {
    /// `R·T = L Q(g, T)` for the curvature-like presets: `L = k` or `S = k(n−1)g`.
    Tps,
    /// `R·S = L Q(g, S)`: `L = k` or `S = k(n−1)g`.
    RicciPseudo,
    /// `R·W2 = L Q(g, W2)`: `L = k` or `S = (r/n)g`.
    W2,
    /// `R·W9 = L Q(g, W9)`: `L = k` or `S` is η-Einstein.
    W9,
    /// `R·R = L Q(S, R)`: `L = 1/(n−1)` and `S = k(n−1)g`.
    RrS,
    /// `R·R = L Q(S^ℓ, R)`: `L = 1/(k^{ℓ−1}(n−1)^ℓ)` and `S^ℓ = k^ℓ(n−1)^ℓ g`.
    RrSl,
}

pub const TABLE_NAMES: [&str; 6] = ["tps", "ricci-pseudo", "w2", "w9", "rr-s", "rr-sl"];

impl TableName {
    pub fn name(self) -> &'static str {
        match self {
            TableName::Tps => "tps",
            TableName::RicciPseudo => "ricci-pseudo",
            TableName::W2 => "w2",
            TableName::W9 => "w9",
            TableName::RrS => "rr-s",
            TableName::RrSl => "rr-sl",
        }
    }

    /// Either-or tables allow `L = k` as an alternative to the Ricci form;
    /// the Ricci-generalized ones claim both and exclude semisymmetry.
    fn is_dichotomy(self) -> bool {
        !matches!(self, TableName::RrS | TableName::RrSl)
    }

    fn condition(self, ell: usize) -> ConditionSpec {
        match self {
            TableName::Tps => ConditionSpec::pseudosymmetry(),
            TableName::RicciPseudo => ConditionSpec::ricci_pseudosymmetry(),
            TableName::W2 => {
                ConditionSpec::new(super::ConditionKind::TtG, Preset::R, Preset::W2, 0)
            }
            TableName::W9 => {
                ConditionSpec::new(super::ConditionKind::TtG, Preset::R, Preset::W9, 0)
            }
            TableName::RrS => ConditionSpec::ricci_generalized(1),
            TableName::RrSl => ConditionSpec::ricci_generalized(ell),
        }
    }
}

impl fmt::Display for TableName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TableName {
    type Err = Error;

    fn from_str(s: &str) -> Result<TableName> {
        Ok(match s {
            "tps" => TableName::Tps,
            "ricci-pseudo" => TableName::RicciPseudo,
            "w2" => TableName::W2,
            "w9" => TableName::W9,
            "rr-s" => TableName::RrS,
            "rr-sl" => TableName::RrSl,
            _ => {
                return Err(Error::Invalid(format!(
                    "unknown table '{s}', expected one of {}",
                    TABLE_NAMES.join(", ")
                )))
            }
        })
    }
}

/// Rows in table order, with `(k, ε)` as symbols.
const ROWS: [(ClassTag, &str, &str); 6] = [
    (ClassTag::NkContact, "k", "1"),
    (ClassTag::Sasakian, "1", "1"),
    (ClassTag::Kenmotsu, "-1", "1"),
    (ClassTag::EpsSasakian, "ε", "ε"),
    (ClassTag::ParaSasakian, "-1", "1"),
    (ClassTag::EpsParaSasakian, "-ε", "ε"),
];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum WitnessStatus {
    Holds,
    Fails,
    /// The model does not satisfy the hypothesis.
    Inapplicable,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RowStatus {
    Witnessed,
    Unwitnessed,
    Contradicted,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Witness {
    pub entry: String,
    pub k: f64,
    pub epsilon: f64,
    pub predicted_l: Option<f64>,
    pub summary: LSummary,
    /// Worst deviation from the predicted Ricci form.
    pub tensor_residual: f64,
    pub status: WitnessStatus,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TableRow {
    pub class: ClassTag,
    pub l: String,
    pub tensor: String,
    pub witnesses: Vec<Witness>,
    pub status: RowStatus,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CorollaryTable {
    pub name: TableName,
    pub condition: String,
    pub n: usize,
    pub ell: usize,
    pub rows: Vec<TableRow>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TableTolerances {
    /// Fit residual, relative to `max(1, max|lhs|)`.
    pub fit: f64,
    pub l: f64,
    /// Tensor identities, relative to `max(1, max|S|)`.
    pub tensor: f64,
}

impl Default for TableTolerances {
    fn default() -> Self {
        TableTolerances {
            fit: 1e-8,
            l: 1e-6,
            tensor: 1e-8,
        }
    }
}

fn symbolic(table: TableName, k: &str, eps: &str, ell: usize) -> (String, String) {
    let kn = |p: usize| match (k, p) {
        (_, 0) => String::new(),
        ("1", _) => String::new(),
        ("-1", 1) => "-".to_string(),
        ("-1", p) => format!("(-1)^{p}"),
        (k, 1) => k.to_string(),
        (k, p) if !k.starts_with('-') => format!("{k}^{p}"),
        (k, p) => format!("({k})^{p}"),
    };
    let nm1 = |p: usize| {
        if p == 1 {
            "(n-1)".to_string()
        } else {
            format!("(n-1)^{p}")
        }
    };
    match table {
        TableName::Tps | TableName::RicciPseudo => (k.to_string(), format!("{}(n-1)g", kn(1))),
        TableName::W2 => (k.to_string(), "(r/n)g".to_string()),
        TableName::W9 => {
            let e = if eps == "1" {
                String::new()
            } else {
                eps.to_string()
            };
            (
                k.to_string(),
                format!("(r/(n-1) - {k})g + {e}(n{k} - r/(n-1))η⊗η"),
            )
        }
        TableName::RrS | TableName::RrSl => {
            let ell = if table == TableName::RrS { 1 } else { ell };
            let l = format!("1/({}{})", kn(ell - 1), nm1(ell));
            let sl = if ell == 1 {
                "S".to_string()
            } else {
                format!("S^{ell}")
            };
            (l, format!("{sl} = {}{}g", kn(ell), nm1(ell)))
        }
    }
}

/// `S`-side residual of the table's conclusion at one frame.
fn tensor_residual(table: TableName, nf: &mut NkFrame, ell: usize) -> f64 {
    let n = nf.n() as f64;
    let (k, eps) = (nf.k, nf.epsilon());
    let scale = nf.frame.ricci.max_abs().max(1.0);
    let f = &mut nf.frame;
    let r = f.scalar;
    let res = match table {
        TableName::Tps | TableName::RicciPseudo => f
            .ricci
            .axpy(-k * (n - 1.0), f.g())
            .expect("same shape")
            .max_abs(),
        TableName::W2 => f.ricci.axpy(-r / n, f.g()).expect("same shape").max_abs(),
        TableName::W9 => {
            let eta = &nf.unit.eta;
            let ee = Tensor::from_fn(eta.len(), &[Variance::Co; 2], |i| eta[i[0]] * eta[i[1]]);
            let pred = f
                .g()
                .scaled(r / (n - 1.0) - k)
                .axpy(eps * (n * k - r / (n - 1.0)), &ee)
                .expect("same shape");
            f.ricci.max_diff(&pred)
        }
        TableName::RrS | TableName::RrSl => {
            let ell = if table == TableName::RrS { 1 } else { ell };
            let target = (k * (n - 1.0)).powi(ell as i32);
            let sl = f.ricci_power(ell).clone();
            return sl.axpy(-target, f.g()).expect("same shape").max_abs() / target.abs().max(1.0);
        }
    };
    res / scale
}

fn predicted_l(table: TableName, n: usize, k: f64, ell: usize) -> Option<f64> {
    let nm1 = n as f64 - 1.0;
    match table {
        TableName::RrS => Some(1.0 / nm1),
        TableName::RrSl if k != 0.0 => Some(1.0 / (k.powi(ell as i32 - 1) * nm1.powi(ell as i32))),
        TableName::RrSl => None,
        _ => Some(k),
    }
}

fn evaluate_witness(
    table: TableName,
    entry: &RegistryEntry,
    ell: usize,
    points: usize,
    seed: u64,
    tol: &TableTolerances,
) -> Result<Witness> {
    let cond = table.condition(ell);
    let max_ell = cond.sigma_power().max(ell).max(1);
    let mut frames = sample_frames(&entry.spec, points, seed, max_ell)?;
    let mut fits: Vec<FitReport> = Vec::with_capacity(frames.len());
    let mut tensor_res = 0.0f64;
    for nf in &mut frames {
        fits.push(fit_l(&cond, &mut nf.frame)?);
        tensor_res = tensor_res.max(tensor_residual(table, nf, ell));
    }
    let (k, epsilon) = (entry.spec.k, entry.spec.epsilon);
    let predicted = predicted_l(table, entry.spec.dim, k, ell);
    let summary = LSummary::of(&fits);
    let tensor_ok = tensor_res < tol.tensor;
    let fit_ok = |f: &FitReport| f.residual < tol.fit * f.lhs_max.max(1.0);
    let l_ok =
        |f: &FitReport| matches!((f.l, predicted), (Some(l), Some(p)) if (l - p).abs() < tol.l);
    let status = if table.is_dichotomy() {
        if !fits.iter().all(|f| f.degenerate || fit_ok(f)) {
            WitnessStatus::Inapplicable
        } else if tensor_ok || fits.iter().all(|f| !f.degenerate && l_ok(f)) {
            WitnessStatus::Holds
        } else {
            WitnessStatus::Fails
        }
    } else {
        // semisymmetric points, or a failed fit, fall outside the hypothesis
        let semisymmetric = fits.iter().any(|f| f.lhs_max < DEGENERACY_FLOOR);
        if semisymmetric || predicted.is_none() || !fits.iter().all(|f| f.l.is_some() && fit_ok(f))
        {
            WitnessStatus::Inapplicable
        } else if tensor_ok && fits.iter().all(l_ok) {
            WitnessStatus::Holds
        } else {
            WitnessStatus::Fails
        }
    };
    Ok(Witness {
        entry: entry.name().to_string(),
        k,
        epsilon,
        predicted_l: predicted,
        summary,
        tensor_residual: tensor_res,
        status,
    })
}

/// Builds one table for dimension `n`, testing every registry model of each
/// row's class in that dimension.
pub fn corollary_table(
    table: TableName,
    n: usize,
    ell: usize,
    registry: &[RegistryEntry],
    points: usize,
    seed: u64,
    tol: &TableTolerances,
) -> Result<CorollaryTable> {
    if n < 3 {
        return Err(Error::DimensionTooSmall(n));
    }
    if table == TableName::RrSl && ell == 0 {
        return Err(Error::Invalid("the Ricci power must be positive".into()));
    }
    let ell = if table == TableName::RrS { 1 } else { ell };
    let mut rows = Vec::with_capacity(ROWS.len());
    for (class, k, eps) in ROWS {
        let (l, tensor) = symbolic(table, k, eps, ell);
        let witnesses = registry
            .iter()
            .filter(|e| e.class == class && e.spec.dim == n && e.has_structure())
            .map(|e| evaluate_witness(table, e, ell, points, seed, tol))
            .collect::<Result<Vec<_>>>()?;
        let status = if witnesses.iter().any(|w| w.status == WitnessStatus::Fails) {
            RowStatus::Contradicted
        } else if witnesses.iter().any(|w| w.status == WitnessStatus::Holds) {
            RowStatus::Witnessed
        } else {
            RowStatus::Unwitnessed
        };
        rows.push(TableRow {
            class,
            l,
            tensor,
            witnesses,
            status,
        });
    }
    Ok(CorollaryTable {
        name: table,
        condition: table.condition(ell).label(),
        n,
        ell,
        rows,
    })
}
