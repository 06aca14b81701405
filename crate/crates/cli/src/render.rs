//! Markdown rendering and number formatting.

use std::fmt::Write;

use crate::{PresetsReport, Report};

/// At most 12 significant digits, trailing zeros trimmed.
pub fn sig12(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let mag = x.abs().log10().floor() as i32;
    if !(-5..=12).contains(&mag) {
        return format!("{x:.11e}");
    }
    let prec = (11 - mag).max(0) as usize;
    let s = format!("{x:.prec$}");
    let s = if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    };
    if s == "-0" {
        "0".into()
    } else {
        s
    }
}

fn opt(x: Option<f64>) -> String {
    x.map_or_else(|| "-".into(), sig12)
}

fn sci(x: f64) -> String {
    format!("{x:.2e}")
}

pub fn presets_markdown(r: &PresetsReport) -> String {
    let mut s = format!("Presets at n = {}\n\n| preset | a0 | a1 | a2 | a3 | a4 | a5 | a6 | a7 |\n|---|---|---|---|---|---|---|---|---|\n", r.n);
    for row in &r.presets {
        let cells: Vec<String> = match row.coefficients {
            Some(c) => c.iter().map(|&v| sig12(v)).collect(),
            None => vec!["-".into(); 8],
        };
        let _ = writeln!(s, "| {} | {} |", row.name, cells.join(" | "));
    }
    if r.presets.iter().any(|p| p.coefficients.is_none()) {
        s.push_str("\nParametric presets need --a0 and --a1.\n");
    }
    s
}

pub fn report_markdown(r: &Report) -> String {
    let mut s = String::new();
    if let Some(m) = &r.manifold {
        let _ = writeln!(s, "Manifold `{m}`, {} sample points\n", r.points);
    }
    if !r.suites.is_empty() {
        s.push_str("| suite | tag | max residual | pass |\n|---|---|---|---|\n");
        for o in &r.suites {
            let _ = writeln!(
                s,
                "| {} | {} | {} | {} |",
                o.id,
                o.paper_tag.as_deref().unwrap_or("-"),
                sci(o.max_residual),
                if o.pass { "yes" } else { "NO" }
            );
        }
        s.push('\n');
    }
    if !r.fits.is_empty() {
        s.push_str("| condition | mean L | max deviation | max residual | degenerate | master identity | dichotomy | pass |\n|---|---|---|---|---|---|---|---|\n");
        for f in &r.fits {
            let d = f.dichotomy.as_ref().map_or_else(
                || "-".into(),
                |d| {
                    format!(
                        "E {} / L {} / ηE {} / deg {} / pre {} / viol {}",
                        d.einstein,
                        d.l_branch,
                        d.eta_einstein,
                        d.degenerate,
                        d.precondition_failed,
                        d.violation
                    )
                },
            );
            let _ = writeln!(
                s,
                "| {} | {} | {} | {} | {}/{} | {} | {} | {} |",
                f.condition,
                opt(f.summary.mean_l.map(|l| (l * 1e6).round() / 1e6)),
                f.summary.max_deviation.map_or_else(|| "-".into(), sci),
                sci(f.summary.max_residual),
                f.summary.degenerate_points,
                f.summary.points,
                f.master_identity.map_or_else(|| "-".into(), sci),
                d,
                if f.pass { "yes" } else { "NO" }
            );
        }
        s.push('\n');
    }
    for t in &r.tables {
        let _ = writeln!(
            s,
            "Table `{}`: {} at n = {}{}\n",
            t.name,
            t.condition,
            t.n,
            if t.ell > 1 {
                format!(", ℓ = {}", t.ell)
            } else {
                String::new()
            }
        );
        s.push_str("| class | L | Ricci form | witnesses | status |\n|---|---|---|---|---|\n");
        for row in &t.rows {
            let w: Vec<String> = row
                .witnesses
                .iter()
                .map(|w| {
                    let l = match w.summary.mean_l {
                        Some(l) => format!("L = {}", sig12((l * 1e9).round() / 1e9)),
                        None => "degenerate".into(),
                    };
                    format!(
                        "{} ({l}, predicted {}, Ricci residual {}: {:?})",
                        w.entry,
                        opt(w.predicted_l),
                        sci(w.tensor_residual),
                        w.status
                    )
                })
                .collect();
            let witnesses = if w.is_empty() {
                "-".into()
            } else {
                w.join("; ")
            };
            let _ = writeln!(
                s,
                "| {} | {} | {} | {} | {:?} |",
                row.class.name(),
                row.l,
                row.tensor,
                witnesses,
                row.status
            );
        }
        s.push('\n');
    }
    s
}
