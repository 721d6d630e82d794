use std::fmt::Write;

use crate::results::*;

/// `lambda / E1` below which a computed twisting constant reads as zero.
const LAMBDA_ZERO: f64 = 0.02;

fn verdict(pass: bool) -> &'static str {
    if pass {
        "PASS"
    } else {
        "FAIL"
    }
}

fn checks(out: &mut String, checks: &[Check]) {
    for c in checks {
        let _ = writeln!(out, "{} {} (margin {:e})", verdict(c.pass), c.label, c.margin);
    }
}

fn constants(out: &mut String, rows: &[ConstantRow]) {
    if rows.is_empty() {
        return;
    }
    let width = rows.iter().map(|r| r.name.chars().count()).max().unwrap_or(0);
    out.push_str("constants:\n");
    for r in rows {
        let _ = write!(out, "  {:width$} = {:<24e} {}", r.name, r.value, r.formula);
        if !r.inputs.is_empty() {
            let _ = write!(out, "  [{}]", r.inputs);
        }
        out.push('\n');
    }
}

fn unavailable_line(out: &mut String, section: &SectionInfo, reason: Option<&str>) {
    if section.rotationally_invariant {
        out.push_str("λ ≈ 0 → Hardy machinery unavailable (circular cross-section)\n");
    } else if let Some(r) = reason {
        let _ = writeln!(out, "no explicit bound: {r}");
    }
}

/// Human-readable summary: the constants with their formulas and every check
/// with its margin.
pub fn render(r: &Results) -> String {
    let mut out = String::new();
    let s = &r.section;
    let _ = writeln!(out, "scenario {} ({})", r.scenario, r.scenario_hash);
    let _ = writeln!(out, "cross-section: {}, a = {}, area = {}", s.description, s.a, s.area);
    let _ = writeln!(out, "rotationally invariant: {}", if s.rotationally_invariant { "yes" } else { "no" });
    match &r.outcome {
        Outcome::GroundPair(g) => {
            out.push_str("task: ground_pair\n");
            for row in &g.rows {
                let _ = write!(out, "δ = {}: E1 = {}, E2 = {}, residual {:e}", row.delta, row.e1, row.e2, row.residual);
                if let Some(e) = g.exact {
                    let _ = write!(out, ", relative error {:e}", (row.e1 - e).abs() / e);
                }
                out.push('\n');
            }
            if let Some(e) = g.exact {
                let _ = writeln!(out, "exact E1 = {e}");
            }
        }
        Outcome::Lambda(l) => {
            out.push_str("task: lambda\n");
            for row in &l.rows {
                let _ = writeln!(out, "δ = {}: λ = {:?}, E1 = {:?}, λ/E1 = {:e}", row.delta, row.lambda, row.e1, row.lambda / row.e1);
            }
            for w in l.rows.windows(2) {
                let _ = writeln!(out, "λ ratio δ = {} → {}: {}", w[0].delta, w[1].delta, w[0].lambda / w[1].lambda);
            }
            let small = l.rows.last().is_some_and(|x| x.lambda <= LAMBDA_ZERO * x.e1);
            if s.rotationally_invariant || small {
                unavailable_line(&mut out, s, Some("λ ≈ 0 on the finest grid"));
            } else {
                out.push_str("λ > 0: twisted Hardy inequality available\n");
            }
        }
        Outcome::Spectrum(sp) => {
            let _ = writeln!(out, "task: spectrum, E1 = {}, {} ends", sp.e1, if sp.transparent { "transparent" } else { "Dirichlet" });
            for row in &sp.rows {
                let _ = write!(out, "L = {}: {} eigenvalue(s) below E1", row.half_length, row.count_below);
                if !row.values.is_empty() {
                    let list: Vec<String> = row.values.iter().map(|v| v.to_string()).collect();
                    let _ = write!(out, ": {}", list.join(", "));
                } else if let Some(d) = row.diagnostic {
                    let _ = write!(out, " (bottom of the discrete spectrum {d})");
                }
                out.push('\n');
            }
        }
        Outcome::Hardy(h) => {
            let _ = writeln!(out, "task: hardy, s0 = {:?}, λ = {:?}, E1 = {:?}", h.s0, h.lambda, h.e1);
            unavailable_line(&mut out, s, h.unavailable.as_deref());
            constants(&mut out, &h.constants);
            for run in &h.runs {
                let _ = writeln!(out, "μ* = {:?} at L = {} (residual {:e}, {} pass(es))", run.mu, run.half_length, run.residual, run.passes);
                if s.rotationally_invariant {
                    let _ = writeln!(out, "  μ*/E1 = {:e}", run.mu / h.e1);
                }
            }
            for w in h.runs.windows(2) {
                let _ = writeln!(out, "μ* change L = {} → {}: {:.3}%", w[0].half_length, w[1].half_length, 100.0 * (w[1].mu - w[0].mu).abs() / w[0].mu.abs());
            }
            if let Some(c) = h.c_h {
                let _ = writeln!(out, "c_h bound = {c:e}");
                if let Some(run) = h.runs.last() {
                    let _ = writeln!(out, "sharpness μ*/c_h = {:e}", run.mu / c);
                }
            }
            checks(&mut out, &h.checks);
        }
        Outcome::Sweep(sw) => {
            let _ = writeln!(out, "task: sweep ({:?}), {}, E1 = {:?}, λ = {:?}", sw.mode, sw.k_definition, sw.e1, sw.lambda);
            match sw.epsilon {
                Some(e) => {
                    let _ = writeln!(out, "ε = {e:e} (binding constraint: {})", sw.binding.as_deref().unwrap_or("?"));
                }
                None => {
                    unavailable_line(&mut out, s, None);
                    let _ = writeln!(out, "ε unavailable: {}", sw.unavailable.as_deref().unwrap_or("no twist"));
                }
            }
            constants(&mut out, &sw.constants);
            for row in &sw.rows {
                let _ = write!(out, "k = {:<12e} L = {}: ", row.k, row.half_length);
                match (&row.skipped, row.lowest) {
                    (Some(why), _) => {
                        let _ = write!(out, "skipped ({why})");
                    }
                    (None, Some(v)) => {
                        let _ = write!(out, "{} below E1, lowest {v}", row.count_below);
                    }
                    (None, None) => out.push_str("none below E1"),
                }
                let _ = writeln!(out, " [injectivity {}]", row.injectivity);
            }
            match sw.onset {
                Some(k) => {
                    let _ = writeln!(out, "empirical onset k_c = {k}");
                }
                None => out.push_str("no eigenvalue below E1 at any swept k\n"),
            }
            let every = sw.rows.iter().filter(|r| r.k > 0.0 && r.skipped.is_none()).all(|r| r.count_below > 0);
            let _ = writeln!(out, "eigenvalue below E1 at every k > 0: {}", if every { "yes" } else { "no" });
            if !sw.monotone {
                out.push_str("warning: the onset is not monotone in k\n");
            }
            checks(&mut out, &sw.checks);
        }
        Outcome::Injectivity(i) => {
            out.push_str("task: injectivity\n");
            let _ = writeln!(out, "||kappa1|| = {}, ||kappa2|| = {}, |I| = {}", i.kappa1, i.kappa2, i.interval_length);
            let _ = writeln!(out, "immersion a||kappa1|| = {} (< 1 required)", i.immersion);
            let _ = writeln!(out, "max{{4|I|^2 ||kappa1||^2, 4a(||kappa1|| + ||kappa2||)}} = {} (< 1 certifies)", i.condition);
            let line = match i.verdict.as_str() {
                "certified" => "PASS",
                "inconclusive" => "INCONCLUSIVE",
                _ => "FAIL (not an immersion)",
            };
            let _ = writeln!(out, "injectivity condition: {line}");
            if let Some(q) = i.scan_ratio {
                let _ = writeln!(out, "centre-line scan: min |Γ(s) - Γ(s')|/(2a) over |s - s'| ≥ πa = {q}");
            }
        }
        Outcome::Constants(c) => {
            let _ = writeln!(out, "task: constants, λ = {:?}, E1 = {:?}", c.lambda, c.e1);
            unavailable_line(&mut out, s, None);
            constants(&mut out, &c.constants);
            for n in &c.notes {
                let _ = writeln!(out, "note: {n}");
            }
        }
    }
    out
}
