//! Per-point verification residuals for one manifold, and their aggregation.
//!
//! Work is split per sample point so callers may evaluate points in any order
//! or in parallel; [`aggregate`] restores a fixed suite order.

use serde::Serialize;

use crate::error::Result;
use crate::family::{coefficients, ricci_of_t, ricci_of_t_closed_form, FreeParams, Preset};
use crate::geometry::{christoffel_finite_difference, frame, CurvatureSymmetries};
use crate::nk::{
    lemma_direct, lemma_oracle, verify_nullity, NkFrame, RegistryEntry, NULLITY_MAX_ELL,
};

/// Free parameters used for the parametric presets in suites.
pub const SUITE_FREE_PARAMS: FreeParams = FreeParams { a0: 1.0, a1: 0.3 };

/// Step of the central-difference Christoffel comparison.
pub const FD_STEP: f64 = 1e-5;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteResidual {
    pub id: String,
    /// Label of the equation a check reproduces; `None` for plain geometry.
    pub paper_tag: Option<String>,
    pub residual: f64,
    pub tolerance: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteOutcome {
    pub id: String,
    pub paper_tag: Option<String>,
    pub max_residual: f64,
    pub pass: bool,
}

fn item(id: &str, tag: Option<&str>, residual: f64, tolerance: f64) -> SuiteResidual {
    SuiteResidual {
        id: id.to_string(),
        paper_tag: tag.map(str::to_string),
        residual,
        tolerance,
    }
}

/// Geometry checks: Riemann symmetries, metric compatibility and automatic
/// against finite-difference Christoffel symbols.
pub fn geometry_residuals(entry: &RegistryEntry, p: &[f64]) -> Result<Vec<SuiteResidual>> {
    let spec = &entry.spec;
    let f = frame(spec, p, 1)?;
    let sym = CurvatureSymmetries::of(&f);
    let scale = f.r04.max_abs().max(1.0);
    let fd = christoffel_finite_difference(spec, p, FD_STEP)?;
    let fd_diff = f
        .christoffel
        .symbols
        .iter()
        .zip(&fd.symbols)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    Ok(vec![
        item(
            "geometry.riemann-antisymmetry",
            None,
            sym.antisym_xy.max(sym.antisym_zv) / scale,
            1e-9,
        ),
        item(
            "geometry.pair-exchange",
            None,
            sym.pair_exchange / scale,
            1e-9,
        ),
        item(
            "geometry.first-bianchi",
            None,
            sym.first_bianchi / scale,
            1e-9,
        ),
        item(
            "geometry.ricci-symmetry",
            None,
            sym.ricci_symmetry / scale,
            1e-9,
        ),
        item(
            "geometry.metric-compatibility",
            None,
            f.christoffel.compatibility_defect(spec, p)?,
            1e-9,
        ),
        item("geometry.christoffel-fd", None, fd_diff, 1e-5),
    ])
}

/// Nullity identities, lemma closed forms against direct contraction for
/// every preset, and the Ricci contraction of `T`.
pub fn structure_residuals(entry: &RegistryEntry, p: &[f64]) -> Result<Vec<SuiteResidual>> {
    let spec = &entry.spec;
    let mut out = Vec::new();
    let mut nf = NkFrame::at(spec, p, NULLITY_MAX_ELL)?;
    for r in verify_nullity(&mut nf) {
        out.push(item(
            &format!("nullity.{}", r.tag),
            Some(&r.tag),
            r.residual,
            1e-9,
        ));
    }
    let n = spec.dim;
    let presets = Preset::all(Some(SUITE_FREE_PARAMS));
    let mut lemma: Vec<(String, f64)> = Vec::new();
    let mut closed = 0.0f64;
    let mut conformal = 0.0f64;
    for preset in &presets {
        let c = coefficients(*preset, n)?;
        let oracle = lemma_oracle(&nf, &c);
        let direct = lemma_direct(&nf, &c);
        for (i, r) in direct.residuals(&oracle).into_iter().enumerate() {
            match lemma.get_mut(i) {
                Some((_, v)) => *v = v.max(r.residual),
                None => lemma.push((r.tag, r.residual)),
            }
        }
        let st = ricci_of_t(&nf.frame, &c);
        closed = closed.max(st.max_diff(&ricci_of_t_closed_form(&nf.frame, &c)));
        if *preset == Preset::Conformal {
            conformal = st.max_abs();
        }
    }
    for (tag, r) in lemma {
        out.push(item(&format!("lemma.{tag}"), Some(&tag), r, 1e-8));
    }
    out.push(item(
        "ricci-of-t.closed-form",
        Some("eq-gen-cur-1"),
        closed,
        1e-9,
    ));
    out.push(item(
        "ricci-of-t.conformal-vanishes",
        Some("eq-gen-cur-1"),
        conformal,
        1e-9,
    ));
    Ok(out)
}

/// All checks that apply to an entry at one point.
pub fn point_residuals(entry: &RegistryEntry, p: &[f64]) -> Result<Vec<SuiteResidual>> {
    let mut out = geometry_residuals(entry, p)?;
    if entry.has_structure() {
        out.extend(structure_residuals(entry, p)?);
    }
    Ok(out)
}

/// Worst residual per suite, in first-seen order. `tolerance` replaces every
/// suite's own tolerance when given.
pub fn aggregate(per_point: &[Vec<SuiteResidual>], tolerance: Option<f64>) -> Vec<SuiteOutcome> {
    let mut out: Vec<(SuiteOutcome, f64)> = Vec::new();
    for r in per_point.iter().flatten() {
        match out.iter_mut().find(|(o, _)| o.id == r.id) {
            Some((o, _)) => o.max_residual = o.max_residual.max(r.residual),
            None => out.push((
                SuiteOutcome {
                    id: r.id.clone(),
                    paper_tag: r.paper_tag.clone(),
                    max_residual: r.residual,
                    pass: false,
                },
                r.tolerance,
            )),
        }
    }
    out.into_iter()
        .map(|(mut o, tol)| {
            // NaN residuals fail
            o.pass = o.max_residual < tolerance.unwrap_or(tol);
            o
        })
        .collect()
}
