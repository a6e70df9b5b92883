use std::fs;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde_json::{json, Value};

use super::report::{Outcome, Table, Verdict};
use super::*;
use crate::cmbounds::{allowed_exponents, c_of_g, cm_p1_exponent, cm_profile};
use crate::curvedeg::{
    closed_point_degree_threshold, genus_table, representable, rr_degree_bound, stable_bound, torsion_reach,
    SemigroupSpec,
};
use crate::families::{density_upto, parse_epsilon, exclusion_procedure, FamilyProfile, IntegerSetSpec, ShiftTable};
use crate::gl2::cache::enumerate_cached;
use crate::gl2::{analyze, close_generators, enumerate_subgroups, EnumerationConfig, EnumerationMode, Subgroup};
use crate::orbits::{verify_case_divisibility_with, verify_lemma_nonsplit, verify_lemma_split, OrbitReport};

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report types serialize")
}

fn cell<T: ToString>(v: T) -> String {
    v.to_string()
}

fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let input = |field: &str, message: String| CliError::Input {
        path: path.display().to_string(),
        field: field.to_string(),
        message,
    };
    let text = fs::read_to_string(path).map_err(|e| input("(file)", e.to_string()))?;
    let de = &mut serde_json::Deserializer::from_str(&text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let field = e.path().to_string();
        input(if field == "." { "(root)" } else { &field }, e.into_inner().to_string())
    })
}

fn mode_of(mode: ModeArg, count: u32, ctx: &Context<'_>) -> (EnumerationMode, Option<u64>) {
    match mode {
        ModeArg::Exhaustive => (EnumerationMode::Exhaustive, None),
        ModeArg::Sampled => {
            let seed = ctx.seed.unwrap_or(0);
            (EnumerationMode::Sampled { count, seed }, Some(seed))
        }
    }
}

fn subgroups(p: u32, mode: EnumerationMode, ceiling: u32, ctx: &Context<'_>) -> Result<Vec<Subgroup>, CliError> {
    let config = EnumerationConfig { exhaustive_ceiling: ceiling };
    Ok(match ctx.cache_dir {
        Some(dir) => enumerate_cached(dir, p, mode, config, CODE_VERSION)?,
        None => enumerate_subgroups(p, mode, config)?,
    })
}

fn generator_rows(g: &Subgroup) -> Vec<[u32; 4]> {
    g.generators().iter().map(|x| x.entries()).collect()
}

pub(super) fn verify_cases(a: &VerifyCasesArgs, ctx: &Context<'_>) -> Result<Outcome, CliError> {
    let (mode, seed) = mode_of(a.mode, a.count, ctx);
    let mut table = Table::new(&["p", "subgroup_id", "order", "class", "det_index", "verdict", "corollary_holds"]);
    let mut per_prime = Vec::new();
    let mut failed = false;
    for &p in &a.primes {
        let groups = subgroups(p, mode, a.ceiling, ctx)?;
        let mut reports: Vec<OrbitReport> = Vec::new();
        let mut unclassifiable = Vec::new();
        for g in &groups {
            match verify_case_divisibility_with(g, a.d0) {
                Ok(r) => reports.push(r),
                Err(Gl2Error::Unclassifiable { id, .. }) => unclassifiable.push(id),
                Err(e) => return Err(e.into()),
            }
        }
        let count = |label: &str| reports.iter().filter(|r| r.verdict.label() == label).count();
        let violations: Vec<&OrbitReport> = reports.iter().filter(|r| r.verdict.is_failure()).collect();
        failed |= !violations.is_empty() || !unclassifiable.is_empty();
        for r in &reports {
            table.push(vec![
                cell(r.p),
                r.subgroup_id.clone(),
                cell(r.order),
                r.class.name().to_string(),
                cell(r.det_index),
                r.verdict.label().to_string(),
                r.corollary.as_ref().map(|c| c.holds.to_string()).unwrap_or_default(),
            ]);
        }
        let mut entry = json!({
            "p": p,
            "subgroups": groups.len(),
            "pass": count("pass"),
            "not_applicable": count("not-applicable"),
            "violations": violations,
            "unclassifiable": unclassifiable,
        });
        if a.details {
            entry["reports"] = to_value(&reports);
        }
        per_prime.push(entry);
    }
    let mut body = json!({ "enumeration": to_value(&mode), "primes": per_prime });
    if let Some(seed) = seed {
        body["seed"] = json!(seed);
    }
    Ok(Outcome { verdict: if failed { Verdict::Fail } else { Verdict::Pass }, seed, body, table })
}

pub(super) fn verify_lemmas(a: &VerifyLemmasArgs) -> Result<Outcome, CliError> {
    if a.p_min < 3 || a.p_min > a.p_max {
        return Err(CliError::Usage(format!("need 3 <= p-min <= p-max, got {}..{}", a.p_min, a.p_max)));
    }
    let mut table = Table::new(&["p", "split_pass", "subgroups_checked", "nonsplit_max_order", "nonsplit_pass"]);
    let mut rows = Vec::new();
    let mut pass = true;
    for p in crate::arith::primes_upto(a.p_max as u64).into_iter().filter(|&p| p >= a.p_min as u64) {
        let p = p as u32;
        let split = verify_lemma_split(p)?;
        let nonsplit = verify_lemma_nonsplit(p)?;
        let checked: usize = split.lines.iter().map(|l| l.subgroups_checked).sum();
        pass &= split.pass && nonsplit.pass;
        table.push(vec![cell(p), cell(split.pass), cell(checked), cell(nonsplit.max_order), cell(nonsplit.pass)]);
        rows.push(json!({
            "p": p,
            "split": { "pass": split.pass, "lines": split.lines.len(), "subgroups_checked": checked },
            "nonsplit": { "pass": nonsplit.pass, "max_stabilizer_order": nonsplit.max_order },
        }));
    }
    let verdict = if pass { Verdict::Pass } else { Verdict::Fail };
    Ok(Outcome { verdict, seed: None, body: json!({ "primes": rows }), table })
}

fn parse_matrix(s: &str) -> Result<[i64; 4], CliError> {
    let bad = || CliError::Usage(format!("--gen expects four integers a,b,c,d, got {s:?}"));
    let parts: Vec<i64> = s.split(',').map(|t| t.trim().parse().map_err(|_| bad())).collect::<Result<_, _>>()?;
    parts.try_into().map_err(|_| bad())
}

pub(super) fn classify(a: &ClassifyArgs) -> Result<Outcome, CliError> {
    let gens = a.gens.iter().map(|s| parse_matrix(s)).collect::<Result<Vec<_>, _>>()?;
    let g = close_generators(a.p, &gens)?;
    let mut table = Table::new(&["p", "subgroup_id", "order", "class", "det_index", "projective_type", "verdict"]);
    let mut body = json!({ "p": a.p, "subgroup_id": g.id(), "order": g.order(), "generators": generator_rows(&g) });
    let verdict = match analyze(&g) {
        Ok(analysis) => {
            let report = verify_case_divisibility_with(&g, a.d0)?;
            table.push(vec![
                cell(a.p),
                g.id(),
                cell(g.order()),
                analysis.class.name().to_string(),
                cell(analysis.det_index),
                to_value(&analysis.projective_type).as_str().unwrap_or_default().to_string(),
                report.verdict.label().to_string(),
            ]);
            let verdict = if report.verdict.is_failure() { Verdict::Fail } else { Verdict::ReportOnly };
            body["analysis"] = to_value(&analysis);
            body["divisibility"] = to_value(&report);
            verdict
        }
        Err(Gl2Error::Unclassifiable { .. }) if a.p <= 3 => {
            body["analysis"] = Value::Null;
            Verdict::ReportOnly
        }
        Err(e @ Gl2Error::Unclassifiable { .. }) => {
            body["error"] = json!(e.to_string());
            Verdict::Fail
        }
        Err(e) => return Err(e.into()),
    };
    Ok(Outcome { verdict, seed: None, body, table })
}

pub(super) fn enumerate(a: &EnumerateArgs, ctx: &Context<'_>) -> Result<Outcome, CliError> {
    let (mode, seed) = mode_of(a.mode, a.count, ctx);
    let groups = subgroups(a.p, mode, a.ceiling, ctx)?;
    let mut table = Table::new(&["subgroup_id", "order", "class", "det_index", "projective_type"]);
    let mut rows = Vec::new();
    let mut unclassifiable = false;
    for g in &groups {
        let analysis = analyze(g).ok();
        unclassifiable |= analysis.is_none() && a.p >= 5;
        table.push(vec![
            g.id(),
            cell(g.order()),
            analysis.as_ref().map(|x| x.class.name().to_string()).unwrap_or_default(),
            analysis.as_ref().map(|x| x.det_index.to_string()).unwrap_or_default(),
            analysis
                .as_ref()
                .and_then(|x| to_value(&x.projective_type).as_str().map(str::to_string))
                .unwrap_or_default(),
        ]);
        rows.push(json!({
            "subgroup_id": g.id(),
            "order": g.order(),
            "generators": generator_rows(g),
            "analysis": analysis,
        }));
    }
    let body = json!({ "p": a.p, "enumeration": to_value(&mode), "count": groups.len(), "subgroups": rows });
    let verdict = if unclassifiable { Verdict::Fail } else { Verdict::ReportOnly };
    Ok(Outcome { verdict, seed, body, table })
}

pub(super) fn genus(a: &GenusArgs) -> Result<Outcome, CliError> {
    let rows = genus_table(a.n_max)?;
    let mut table = Table::new(&["n", "genus", "min_guaranteed_degree"]);
    for r in &rows {
        table.push(vec![cell(r.n), cell(r.genus), cell(r.min_guaranteed_degree)]);
    }
    let reach = a
        .reach
        .iter()
        .map(|&d| Ok(json!({ "d": d, "n": torsion_reach(d)? })))
        .collect::<Result<Vec<Value>, CliError>>()?;
    let mut body = json!({ "rows": rows });
    if !reach.is_empty() {
        body["reach"] = json!(reach);
    }
    Ok(Outcome { verdict: Verdict::ReportOnly, seed: None, body, table })
}

pub(super) fn degrees(a: &DegreesArgs) -> Result<Outcome, CliError> {
    let rr = rr_degree_bound(a.g, a.weierstrass);
    let mut table = Table::new(&["quantity", "value"]);
    table.push(vec!["rr_degree_bound".into(), cell(rr)]);
    let mut body = json!({ "g": a.g, "weierstrass": a.weierstrass, "rr_degree_bound": rr });
    if !a.generators.is_empty() {
        let spec = SemigroupSpec::new(a.generators.iter().copied())?;
        let threshold = closed_point_degree_threshold(a.g, &spec)?;
        table.push(vec!["gcd".into(), cell(spec.gcd())]);
        table.push(vec!["threshold".into(), cell(threshold)]);
        body["generators"] = json!(spec.generators());
        body["gcd"] = json!(spec.gcd());
        body["threshold"] = json!(threshold);
    }
    Ok(Outcome { verdict: Verdict::ReportOnly, seed: None, body, table })
}

/// Gaps listed in the report, at most.
const GAP_LIST_LIMIT: u64 = 10_000;

pub(super) fn semigroup(a: &SemigroupArgs) -> Result<Outcome, CliError> {
    let spec = SemigroupSpec::new(a.generators.iter().copied())?;
    let bound = stable_bound(&spec);
    let step = spec.gcd();
    let candidates = (bound / step).min(GAP_LIST_LIMIT);
    let gaps: Vec<u64> = (1..=candidates).map(|k| k * step).filter(|&t| !representable(t, &spec)).collect();
    let mut table = Table::new(&["target", "representable"]);
    let checks: Vec<Value> = a
        .check
        .iter()
        .map(|&t| {
            let r = representable(t, &spec);
            table.push(vec![cell(t), cell(r)]);
            json!({ "target": t, "representable": r })
        })
        .collect();
    let body = json!({
        "generators": spec.generators(),
        "gcd": step,
        "stable_bound": bound,
        "gaps": gaps,
        "gaps_truncated": bound / step > GAP_LIST_LIMIT,
        "checks": checks,
    });
    Ok(Outcome { verdict: Verdict::ReportOnly, seed: None, body, table })
}

fn density_table(x: u64, count: u64, density: &str, approx: f64) -> Table {
    let mut table = Table::new(&["x", "count", "density", "approx"]);
    table.push(vec![cell(x), cell(count), density.to_string(), cell(approx)]);
    table
}

pub(super) fn density(a: &DensityArgs) -> Result<Outcome, CliError> {
    let spec: IntegerSetSpec = read_json(&a.spec)?;
    let report = density_upto(&spec, a.x)?;
    let table = density_table(report.x, report.count, &report.density, report.approx);
    let body = json!({ "spec": spec, "report": report });
    Ok(Outcome { verdict: Verdict::ReportOnly, seed: None, body, table })
}

pub(super) fn ew(a: &EwArgs) -> Result<Outcome, CliError> {
    let shifts = ShiftTable::new(a.c, a.x)?;
    let cutoff = match (&a.cutoff, &a.epsilon) {
        (Some(c), _) => *c,
        (None, Some(eps)) => shifts.least_cutoff(parse_epsilon(eps)?)?,
        (None, None) => unreachable!("clap requires one of --cutoff and --epsilon"),
    };
    let report = shifts.report(cutoff);
    let table = density_table(report.x, report.count, &report.density, report.approx);
    let body = json!({ "c": a.c, "C": cutoff, "report": report });
    Ok(Outcome { verdict: Verdict::ReportOnly, seed: None, body, table })
}

pub(super) fn bepsilon(a: &BepsilonArgs) -> Result<Outcome, CliError> {
    let profile: FamilyProfile = match (&a.profile, a.cm_g) {
        (Some(path), _) => {
            let profile: FamilyProfile = read_json(path)?;
            profile.validate().map_err(|e| CliError::Input {
                path: path.display().to_string(),
                field: "(profile)".into(),
                message: e.to_string(),
            })?;
            profile
        }
        (None, Some(g)) => cm_profile(g)?,
        (None, None) => unreachable!("clap requires one of --profile and --cm-g"),
    };
    let mut table = Table::new(&["epsilon", "C", "L", "N", "log2_b_eps", "excluded_density", "certified"]);
    let mut reports = Vec::new();
    for eps in &a.epsilon {
        let r = exclusion_procedure(&profile, parse_epsilon(eps)?, a.x)?;
        table.push(vec![
            r.epsilon.clone(),
            cell(r.cutoff),
            cell(r.prime_bound),
            cell(r.exponent),
            cell(r.b_eps.log2),
            r.excluded_density.density.clone(),
            cell(r.certified),
        ]);
        reports.push(r);
    }
    let verdict = if reports.iter().all(|r| r.certified) { Verdict::Pass } else { Verdict::Fail };
    Ok(Outcome { verdict, seed: None, body: json!({ "reports": reports }), table })
}

pub(super) fn cm(a: &CmArgs) -> Result<Outcome, CliError> {
    let bounds = c_of_g(a.g)?;
    let mut table = Table::new(&["p", "N", "n"]);
    let mut p1 = Vec::new();
    for p in crate::arith::primes_upto(a.p_max) {
        for big_n in 1..=a.n_max {
            let n = cm_p1_exponent(a.g, p, big_n)?;
            table.push(vec![cell(p), cell(big_n), cell(n)]);
            p1.push(json!({ "p": p, "N": big_n, "n": n }));
        }
    }
    let value = |f: &crate::arith::FactoredInteger| f.value_big().to_string();
    let mut body = json!({
        "g": a.g,
        "H": value(&bounds.h),
        "M": value(&bounds.m),
        "c": value(&bounds.c),
        "factored": bounds,
        "p1_exponents": p1,
    });
    if let Some(d) = a.d {
        body["d"] = json!(d);
        body["allowed_exponents"] = json!(allowed_exponents(a.g, d)?.iter().map(|n| n.to_string()).collect::<Vec<_>>());
    }
    Ok(Outcome { verdict: Verdict::ReportOnly, seed: None, body, table })
}
