//! Registry-wide checks: every built-in entry against every suite.

use nullity_core::nk::sample_frames;
use nullity_core::pseudosym::tables::{corollary_table, RowStatus, TableName, TableTolerances};
use nullity_core::pseudosym::{
    dichotomy_check, fit_l, master_identity_check, ConditionSpec, DichotomyTolerances, LSummary,
};
use nullity_core::suites::{aggregate, point_residuals};
use nullity_core::{builtin, builtin_registry, coefficients, ClassTag, Preset};

#[test]
fn every_entry_passes_its_suites() {
    for e in builtin_registry() {
        let per_point: Vec<_> = e
            .spec
            .sample_points(20, 0)
            .iter()
            .map(|p| point_residuals(&e, p).unwrap())
            .collect();
        for o in aggregate(&per_point, None) {
            assert!(o.pass, "{}: {} = {:e}", e.name(), o.id, o.max_residual);
        }
    }
}

#[test]
fn kenmotsu_models_are_pseudosymmetric_with_minus_one() {
    for name in ["kenmotsu-warped-3d", "kenmotsu-warped-5d"] {
        let e = builtin(name).unwrap();
        for cond in [
            ConditionSpec::pseudosymmetry(),
            ConditionSpec::ricci_pseudosymmetry(),
        ] {
            let mut fits = Vec::new();
            for mut nf in sample_frames(&e.spec, 10, 0, 1).unwrap() {
                let fit = fit_l(&cond, &mut nf.frame).unwrap();
                let unit = nf.unit.clone();
                let m = master_identity_check(&cond, &mut nf.frame, &unit, fit.l.unwrap(), 3, 4)
                    .unwrap();
                assert!(m < 1e-7, "{name} {}: master {m:e}", cond.label());
                fits.push(fit);
            }
            let s = LSummary::of(&fits);
            assert!(
                (s.mean_l.unwrap() + 1.0).abs() < 1e-6 && s.max_deviation.unwrap() < 1e-6,
                "{name}: {s:?}"
            );
            assert!(s.max_residual < 1e-8, "{name}: {s:?}");
        }
    }
}

#[test]
fn constant_curvature_fits_are_degenerate() {
    for e in builtin_registry()
        .into_iter()
        .filter(|e| e.constant_curvature)
    {
        for p in e.spec.sample_points(20, 0) {
            let mut f = nullity_core::frame(&e.spec, &p, 1).unwrap();
            let fit = fit_l(&ConditionSpec::pseudosymmetry(), &mut f).unwrap();
            assert!(fit.degenerate && fit.l.is_none(), "{}: {fit:?}", e.name());
        }
    }
}

#[test]
fn dichotomy_holds_across_registry() {
    let tol = DichotomyTolerances::default();
    for e in builtin_registry().into_iter().filter(|e| e.has_structure()) {
        for mut nf in sample_frames(&e.spec, 5, 1, 1).unwrap() {
            for preset in Preset::dichotomy_list() {
                let c = coefficients(preset, e.spec.dim).unwrap();
                let cond =
                    ConditionSpec::new(nullity_core::ConditionKind::TtG, Preset::R, preset, 0);
                let fit = fit_l(&cond, &mut nf.frame).unwrap();
                let rep = dichotomy_check(&nf, &c, fit.l, &tol);
                assert!(
                    !rep.verdict.is_violation(),
                    "{} {preset}: {rep:?}",
                    e.name()
                );
                if e.constant_curvature {
                    assert!(rep.k_einstein_residual < 1e-9, "{}: {rep:?}", e.name());
                }
            }
        }
    }
}

#[test]
fn corollary_tables_on_registry() {
    let reg = builtin_registry();
    let tol = TableTolerances::default();
    for (name, n) in [
        (TableName::Tps, 5),
        (TableName::Tps, 3),
        (TableName::RicciPseudo, 5),
        (TableName::W2, 5),
        (TableName::W9, 3),
        (TableName::RrS, 3),
        (TableName::RrSl, 3),
    ] {
        let t = corollary_table(name, n, 2, &reg, 4, 0, &tol).unwrap();
        for r in &t.rows {
            eprintln!(
                "{name} n={n} {:?}: {:?} {:?}",
                r.class,
                r.status,
                r.witnesses
                    .iter()
                    .map(|w| (
                        w.entry.clone(),
                        w.status,
                        w.summary.mean_l,
                        w.tensor_residual
                    ))
                    .collect::<Vec<_>>()
            );
        }
        let _ = (ClassTag::Kenmotsu, RowStatus::Witnessed);
    }
}
