//! Acceptance suite: ten criteria at their pinned tolerances, one PASS/FAIL
//! line each. Runs without the libtest harness so the lines always print.

use std::process::Command;
use std::time::{Duration, Instant};

use nullity_core::family::{ricci_of_t, ricci_of_t_closed_form};
use nullity_core::geometry::{
    christoffel_finite_difference, random_polynomial_metric, CurvatureSymmetries,
};
use nullity_core::nk::{
    lemma_direct, lemma_oracle, sample_frames, verify_nullity, UnitField, NULLITY_MAX_ELL,
};
use nullity_core::pseudosym::{
    dichotomy_check, fit_l, master_identity_check, ConditionKind, ConditionSpec,
    DichotomyTolerances, FitReport,
};
use nullity_core::suites::SUITE_FREE_PARAMS;
use nullity_core::{
    builtin, builtin_registry, coefficients, frame, ManifoldSpec, Preset, RegistryEntry,
};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn structured() -> Vec<RegistryEntry> {
    builtin_registry()
        .into_iter()
        .filter(|e| e.has_structure())
        .collect()
}

fn curvature_pipeline() -> Outcome {
    let start = Instant::now();
    let (mut sym, mut compat, mut fd) = (0.0f64, 0.0f64, 0.0f64);
    let reg = builtin_registry();
    for e in &reg {
        ensure(e.spec.dim <= 5, || {
            format!("{} has dimension {}", e.name(), e.spec.dim)
        })?;
        for p in e.spec.sample_points(20, 0) {
            let f = frame(&e.spec, &p, 1).map_err(|err| format!("{}: {err}", e.name()))?;
            let s = CurvatureSymmetries::of(&f).max();
            let c = f
                .christoffel
                .compatibility_defect(&e.spec, &p)
                .map_err(|err| err.to_string())?;
            let fdc =
                christoffel_finite_difference(&e.spec, &p, 1e-5).map_err(|err| err.to_string())?;
            let d = f
                .christoffel
                .symbols
                .iter()
                .zip(&fdc.symbols)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            ensure(s < 1e-9 && c < 1e-9 && d < 1e-5, || {
                format!(
                    "{} at {p:?}: symmetries {s:e}, compatibility {c:e}, fd {d:e}",
                    e.name()
                )
            })?;
            (sym, compat, fd) = (sym.max(s), compat.max(c), fd.max(d));
        }
    }
    let t = start.elapsed();
    ensure(t < Duration::from_secs(10), || format!("took {t:?}"))?;
    Ok(format!("{} entries x 20 points; symmetries {sym:.1e}, compatibility {compat:.1e}, fd {fd:.1e}; {t:.2?}", reg.len()))
}

fn nullity_suite() -> Outcome {
    let mut worst = 0.0f64;
    let entries = structured();
    for e in &entries {
        for mut nf in
            sample_frames(&e.spec, 20, 0, NULLITY_MAX_ELL).map_err(|err| err.to_string())?
        {
            for r in verify_nullity(&mut nf) {
                ensure(r.residual < 1e-9, || {
                    format!("{} {}: {:e}", e.name(), r.tag, r.residual)
                })?;
                worst = worst.max(r.residual);
            }
        }
    }
    ensure(entries.iter().any(|e| e.spec.epsilon == -1.0), || {
        "no Lorentzian entry checked".into()
    })?;
    Ok(format!(
        "{} entries (incl. epsilon = -1) x 20 points; max {worst:.1e}",
        entries.len()
    ))
}

fn lemma_equivalence() -> Outcome {
    let mut worst = 0.0f64;
    let mut cases = 0usize;
    let presets = Preset::all(Some(SUITE_FREE_PARAMS));
    for e in structured() {
        let frames = sample_frames(&e.spec, 10, 0, 1).map_err(|err| err.to_string())?;
        for preset in &presets {
            let c = coefficients(*preset, e.spec.dim).map_err(|err| err.to_string())?;
            for nf in &frames {
                for r in lemma_direct(nf, &c).residuals(&lemma_oracle(nf, &c)) {
                    ensure(r.residual < 1e-8, || {
                        format!("{} {preset} {}: {:e}", e.name(), r.tag, r.residual)
                    })?;
                    worst = worst.max(r.residual);
                }
                cases += 1;
            }
        }
    }
    Ok(format!(
        "{} presets, {cases} preset-point cases; max {worst:.1e}",
        presets.len()
    ))
}

fn ricci_of_t_consistency() -> Outcome {
    let (mut closed, mut lemma, mut conformal) = (0.0f64, 0.0f64, 0.0f64);
    for e in structured() {
        for nf in sample_frames(&e.spec, 10, 0, 1).map_err(|err| err.to_string())? {
            for preset in Preset::all(Some(SUITE_FREE_PARAMS)) {
                let c = coefficients(preset, e.spec.dim).map_err(|err| err.to_string())?;
                let st = ricci_of_t(&nf.frame, &c);
                closed = closed.max(st.max_diff(&ricci_of_t_closed_form(&nf.frame, &c)));
                for r in lemma_direct(&nf, &c).residuals(&lemma_oracle(&nf, &c)) {
                    if r.tag.starts_with("eq-ric-T") {
                        lemma = lemma.max(r.residual);
                    }
                }
                if preset == Preset::Conformal {
                    conformal = conformal.max(st.max_abs());
                }
            }
        }
    }
    ensure(closed < 1e-9 && lemma < 1e-9 && conformal < 1e-9, || {
        format!("closed form {closed:e}, xi forms {lemma:e}, conformal {conformal:e}")
    })?;
    Ok(format!(
        "closed form {closed:.1e}, xi forms {lemma:.1e}, conformal S_T {conformal:.1e}"
    ))
}

fn fit_at(
    spec: &ManifoldSpec,
    cond: &ConditionSpec,
    points: usize,
) -> Result<Vec<FitReport>, String> {
    spec.sample_points(points, 0)
        .iter()
        .map(|p| {
            let mut f = frame(spec, p, cond.sigma_power().max(1)).map_err(|err| err.to_string())?;
            fit_l(cond, &mut f).map_err(|err| err.to_string())
        })
        .collect()
}

fn check_fits(name: &str, fits: &[FitReport], target: f64) -> Result<(f64, f64), String> {
    let (mut dev, mut res) = (0.0f64, 0.0f64);
    for f in fits {
        let l =
            f.l.ok_or_else(|| format!("{name}: no numeric L at {:?}", f.point))?;
        ensure((l - target).abs() < 1e-6 && f.residual < 1e-8, || {
            format!("{name}: L = {l}, residual {:e}", f.residual)
        })?;
        (dev, res) = (dev.max((l - target).abs()), res.max(f.residual));
    }
    Ok((dev, res))
}

fn three_dimensional_identity() -> Outcome {
    let start = Instant::now();
    let cond = ConditionSpec::ricci_generalized(1);
    let (mut dev, mut res) = (0.0f64, 0.0f64);
    let mut specs: Vec<ManifoldSpec> = (0..10)
        .map(|s| random_polynomial_metric(3, 100 + s))
        .collect();
    specs.push(builtin("kenmotsu-warped-3d").expect("built-in").spec);
    for spec in &specs {
        let (d, r) = check_fits(&spec.name, &fit_at(spec, &cond, 3)?, 1.0)?;
        (dev, res) = (dev.max(d), res.max(r));
    }
    let t = start.elapsed();
    ensure(t < Duration::from_secs(30), || format!("took {t:?}"))?;
    Ok(format!("10 random metrics + kenmotsu-warped-3d; |L - 1| <= {dev:.1e}, residual <= {res:.1e}; {t:.2?}"))
}

fn kenmotsu_pseudosymmetry() -> Outcome {
    let mut parts = Vec::new();
    for name in ["kenmotsu-warped-3d", "kenmotsu-warped-5d"] {
        let spec = builtin(name).expect("built-in").spec;
        let (d1, r1) = check_fits(
            name,
            &fit_at(&spec, &ConditionSpec::pseudosymmetry(), 10)?,
            -1.0,
        )?;
        let (d2, r2) = check_fits(
            name,
            &fit_at(&spec, &ConditionSpec::ricci_pseudosymmetry(), 10)?,
            -1.0,
        )?;
        parts.push(format!(
            "{name}: |L + 1| <= {:.1e}, residual <= {:.1e}",
            d1.max(d2),
            r1.max(r2)
        ));
    }
    Ok(parts.join("; "))
}

fn dichotomy() -> Outcome {
    let tol = DichotomyTolerances::default();
    let mut pairs = 0usize;
    let mut einstein = 0.0f64;
    let skipped: Vec<String> = builtin_registry()
        .into_iter()
        .filter(|e| !e.has_structure())
        .map(|e| e.name().to_string())
        .collect();
    for e in structured() {
        for mut nf in sample_frames(&e.spec, 5, 0, 1).map_err(|err| err.to_string())? {
            for preset in Preset::dichotomy_list() {
                let c = coefficients(preset, e.spec.dim).map_err(|err| err.to_string())?;
                let fit = fit_l(
                    &ConditionSpec::new(ConditionKind::TtG, Preset::R, preset, 0),
                    &mut nf.frame,
                )
                .map_err(|err| err.to_string())?;
                let rep = dichotomy_check(&nf, &c, fit.l, &tol);
                ensure(!rep.verdict.is_violation(), || {
                    format!("{} {preset}: {rep:?}", e.name())
                })?;
                if e.constant_curvature {
                    ensure(rep.k_einstein_residual < 1e-9, || {
                        format!("{}: S - k(n-1)g = {:e}", e.name(), rep.k_einstein_residual)
                    })?;
                    einstein = einstein.max(rep.k_einstein_residual);
                }
                pairs += 1;
            }
        }
    }
    Ok(format!("{pairs} entry-preset-point cases, no violation; constant-curvature |S - k(n-1)g| <= {einstein:.1e}; skipped without structure: {}", skipped.join(", ")))
}

fn degeneracy_honesty() -> Outcome {
    let mut total = 0usize;
    for e in builtin_registry()
        .into_iter()
        .filter(|e| e.constant_curvature)
    {
        for f in fit_at(&e.spec, &ConditionSpec::pseudosymmetry(), 20)? {
            ensure(f.degenerate && f.l.is_none(), || {
                format!("{} at {:?}: {f:?}", e.name(), f.point)
            })?;
            total += 1;
        }
    }
    Ok(format!(
        "{total}/{total} constant-curvature fits degenerate, none numeric"
    ))
}

fn master_identity() -> Outcome {
    let mut worst = 0.0f64;
    let mut count = 0usize;
    let mut run =
        |spec: &ManifoldSpec, cond: &ConditionSpec, structured: bool| -> Result<(), String> {
            for (i, p) in spec.sample_points(5, 0).iter().enumerate() {
                let mut f = frame(spec, p, 1).map_err(|err| err.to_string())?;
                let unit = if structured {
                    UnitField::new(
                        &f.metric,
                        spec.xi_at(p).map_err(|err| err.to_string())?,
                        spec.epsilon,
                    )
                } else {
                    let mut e0 = vec![0.0; spec.dim];
                    e0[0] = 1.0;
                    UnitField::normalized(&f.metric, &e0)
                }
                .map_err(|err| err.to_string())?;
                let fit = fit_l(cond, &mut f).map_err(|err| err.to_string())?;
                let Some(l) = fit.l.filter(|_| !fit.degenerate) else {
                    continue;
                };
                let m = master_identity_check(cond, &mut f, &unit, l, i as u64, 4)
                    .map_err(|err| err.to_string())?;
                ensure(m < 1e-7, || {
                    format!("{} {}: {m:e}", spec.name, cond.label())
                })?;
                worst = worst.max(m);
                count += 1;
            }
            Ok(())
        };
    for s in 0..10 {
        run(
            &random_polynomial_metric(3, 100 + s),
            &ConditionSpec::ricci_generalized(1),
            false,
        )?;
    }
    let m3 = builtin("kenmotsu-warped-3d").expect("built-in").spec;
    run(&m3, &ConditionSpec::ricci_generalized(1), true)?;
    for name in ["kenmotsu-warped-3d", "kenmotsu-warped-5d"] {
        let spec = builtin(name).expect("built-in").spec;
        run(&spec, &ConditionSpec::pseudosymmetry(), true)?;
        run(&spec, &ConditionSpec::ricci_pseudosymmetry(), true)?;
    }
    ensure(count > 0, || "no non-degenerate condition".into())?;
    Ok(format!("{count} non-degenerate fits; max {worst:.1e}"))
}

fn cli(args: &[&str], threads: &str) -> Result<(i32, Vec<u8>), String> {
    let out = Command::new(env!("CARGO_BIN_EXE_nullity-forge"))
        .args(args)
        .env("NULLITY_FORGE_THREADS", threads)
        .output()
        .map_err(|e| e.to_string())?;
    Ok((out.status.code().unwrap_or(-1), out.stdout))
}

fn cli_contract() -> Outcome {
    let verify = ["verify", "--manifold", "kenmotsu-warped-3d", "--seed", "7"];
    let (c1, a) = cli(&verify, "1")?;
    let (c2, b) = cli(&verify, "4")?;
    ensure(c1 == 0 && c2 == 0, || format!("pass case exited {c1}/{c2}"))?;
    ensure(a == b && !a.is_empty(), || {
        "JSON differs between runs".into()
    })?;
    let fit = [
        "fit",
        "--manifold",
        "random-3d",
        "--sigma",
        "s",
        "--ell",
        "1..2",
        "--points",
        "6",
    ];
    let (_, f1) = cli(&fit, "1")?;
    let (_, f2) = cli(&fit, "3")?;
    ensure(f1 == f2, || "fit JSON differs between runs".into())?;
    let (c3, _) = cli(
        &[
            "verify",
            "--manifold",
            "kenmotsu-warped-3d",
            "--tol",
            "1e-20",
        ],
        "2",
    )?;
    ensure(c3 == 1, || format!("injected failure exited {c3}"))?;
    let bad = std::path::Path::new(env!("CARGO_TARGET_TMPDIR")).join("bad-manifold.cfg");
    std::fs::write(&bad, r#"{"name": "bad", "dimension": 2, "signature": 0, "metric": {"0,0": "1", "1,1": "exp(2*x0"}, "chart_box": [[0, 1], [0, 1]]}"#).map_err(|e| e.to_string())?;
    let (c4, _) = cli(
        &["verify", "--manifold", bad.to_str().expect("utf-8 path")],
        "2",
    )?;
    ensure(c4 == 2, || format!("malformed config exited {c4}"))?;
    Ok("byte-identical JSON across thread counts; exits 0 / 1 / 2".into())
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("curvature pipeline soundness", curvature_pipeline),
        ("nullity identity suite", nullity_suite),
        ("lemma oracle equivalence", lemma_equivalence),
        ("Ricci-of-T consistency", ricci_of_t_consistency),
        (
            "3-dimensional Ricci-generalized identity",
            three_dimensional_identity,
        ),
        ("Kenmotsu pseudosymmetry", kenmotsu_pseudosymmetry),
        ("dichotomy", dichotomy),
        ("degeneracy honesty", degeneracy_honesty),
        ("master-identity regression", master_identity),
        ("CLI determinism and exit codes", cli_contract),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("PASS criterion {:>2} {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL criterion {:>2} {name}: {detail}", i + 1);
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
