//! Embedded reference scenarios and their expected results.
//!
//! Each `repro` name runs only its own files, so fixtures stay independent.

use std::collections::BTreeMap;
use std::fmt;

use crate::closure::{close, Outcome, Rule};
use crate::conditions::{check_all, Condition};
use crate::error::{Error, Result};
use crate::kernel::{upset, Family, Model, WorldSet};
use crate::scenario::{format_ob_listing, parse_listing_line, parse_scenario, run_scenario};
use crate::{evaluator::extension, formula::parse_formula};

const FIXTURES: &[(&str, &str)] = &[
    ("countermodel", include_str!("../fixtures/countermodel.cj")),
    ("cond5-upset", include_str!("../fixtures/cond5-upset.cj")),
    ("c3", include_str!("../fixtures/c3.cj")),
    ("dog4", include_str!("../fixtures/dog4.cj")),
    ("dog4-full", include_str!("../fixtures/dog4-full.cj")),
    ("cases-1", include_str!("../fixtures/cases-1.cj")),
    ("cases-2", include_str!("../fixtures/cases-2.cj")),
    ("cases-3", include_str!("../fixtures/cases-3.cj")),
    ("lemma3", include_str!("../fixtures/lemma3.cj")),
    ("thm-cond5", include_str!("../fixtures/thm-cond5.cj")),
];

/// Expected listing of the baseline dog closure, one context per line.
pub const DOG4_LISTING: &str = include_str!("../fixtures/dog4-listing.txt");

const REPRO_NAMES: &[&str] = &[
    "countermodel",
    "c3",
    "dog4",
    "dog4-full",
    "lemma3",
    "thm-cond5",
    "cond5-upset",
    "cases",
];

/// Names accepted by [`repro`].
pub fn fixture_names() -> &'static [&'static str] {
    REPRO_NAMES
}

/// Raw text of an embedded scenario file.
pub fn fixture(name: &str) -> Result<&'static str> {
    FIXTURES
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, text)| *text)
        .ok_or_else(|| Error::UnknownFixture(name.to_string()))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReproLine {
    pub label: String,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReproReport {
    pub name: String,
    pub lines: Vec<ReproLine>,
}

impl ReproReport {
    fn new(name: &str) -> Self {
        ReproReport {
            name: name.to_string(),
            lines: Vec::new(),
        }
    }

    fn check(&mut self, passed: bool, label: impl Into<String>) {
        self.lines.push(ReproLine {
            label: label.into(),
            passed,
        });
    }

    pub fn passed(&self) -> bool {
        !self.lines.is_empty() && self.lines.iter().all(|l| l.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &ReproLine> {
        self.lines.iter().filter(|l| !l.passed)
    }
}

impl fmt::Display for ReproReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "repro {}", self.name)?;
        for line in &self.lines {
            let tag = if line.passed { "PASS" } else { "FAIL" };
            writeln!(f, "[{tag}] {}", line.label)?;
        }
        let verdict = if self.passed() { "ok" } else { "FAILED" };
        write!(f, "{verdict}: {} checks", self.lines.len())
    }
}

/// Runs an embedded fixture and compares it with its expected results.
pub fn repro(name: &str) -> Result<ReproReport> {
    let mut report = ReproReport::new(name);
    match name {
        "countermodel" => countermodel(&mut report)?,
        "c3" => c3(&mut report)?,
        "dog4" => dog4(&mut report)?,
        "dog4-full" => {
            scenario_checks(&mut report, "dog4-full", true)?;
        }
        "lemma3" => lemma3(&mut report)?,
        "thm-cond5" => thm_cond5(&mut report)?,
        "cond5-upset" => cond5_upset(&mut report)?,
        "cases" => {
            for case in ["cases-1", "cases-2", "cases-3"] {
                scenario_checks(&mut report, case, true)?;
            }
        }
        _ => return Err(Error::UnknownFixture(name.to_string())),
    }
    Ok(report)
}

fn set(model: &Model, names: &str) -> WorldSet {
    names
        .split_whitespace()
        .map(|n| model.world_by_name(n).expect("fixture world"))
        .fold(WorldSet::EMPTY, WorldSet::with)
}

/// Runs a scenario; records its condition report and each check line.
fn scenario_checks(report: &mut ReproReport, name: &str, conditions_clean: bool) -> Result<Model> {
    let scenario = parse_scenario(fixture(name)?)?;
    let run = run_scenario(&scenario)?;
    report.check(
        !run.inconsistent(),
        format!("{name}: closure is consistent"),
    );
    let Some(model) = run.model.clone() else {
        return Err(Error::InvalidArgument(format!("{name}: no model")));
    };
    if conditions_clean {
        report.check(
            run.violations.is_empty(),
            format!(
                "{name}: conditions (1)-(4) hold ({} violations)",
                run.violations.len()
            ),
        );
    }
    for c in &run.checks {
        report.check(
            c.passed(),
            format!(
                "{name}: {} at {} is {}",
                crate::render_formula(&c.formula),
                c.world,
                c.actual
            ),
        );
    }
    Ok(model)
}

fn countermodel(report: &mut ReproReport) -> Result<()> {
    let model = scenario_checks(report, "countermodel", true)?;
    let schema = parse_formula("O(B|A) & <>A -> <>B")?;
    let refuted = model
        .world_ids()
        .any(|w| !crate::holds_at(&model, w, &schema).unwrap_or(true));
    report.check(refuted, "O(B|A) & <>A -> <>B is refuted");
    Ok(())
}

fn c3(report: &mut ReproReport) -> Result<()> {
    let model = scenario_checks(report, "c3", true)?;
    let universe = model.universe();
    let y = set(&model, "y");
    let expected: BTreeMap<WorldSet, Family> = universe
        .subsets()
        .map(|ctx| {
            let fam = if ctx.contains(model.world_by_name("z").unwrap()) {
                upset(set(&model, "z"), universe)
            } else if ctx.contains(model.world_by_name("x").unwrap()) {
                upset(set(&model, "x"), universe)
            } else {
                Ok(Family::new())
            };
            fam.map(|f| (ctx, f))
        })
        .collect::<Result<_>>()?;
    let table_ok = universe
        .subsets()
        .all(|ctx| model.ob().family(ctx) == expected[&ctx]);
    report.check(table_ok, "π table matches");
    report.check(
        universe.subsets().all(|ctx| !model.ob().contains(ctx, y)),
        "{y} ∉ π(X) for every X",
    );
    let nonempty: Vec<&Family> = model
        .ob()
        .entries()
        .map(|(_, f)| f)
        .filter(|f| !f.is_empty())
        .collect();
    let common: Vec<WorldSet> = universe
        .subsets()
        .filter(|m| nonempty.iter().all(|f| f.contains(*m)))
        .collect();
    let least = common
        .iter()
        .copied()
        .find(|m| common.iter().all(|o| m.is_subset(*o)));
    let iff = extension(&model, &parse_formula("A <-> B")?)?;
    report.check(
        least == Some(set(&model, "x z")) && least == Some(iff),
        "{x, z} = ‖A <-> B‖ is the least common member",
    );
    Ok(())
}

fn dog4(report: &mut ReproReport) -> Result<()> {
    let scenario = parse_scenario(fixture("dog4")?)?;
    let run = run_scenario(&scenario)?;
    let Some(model) = run.model.as_ref() else {
        report.check(false, "dog4: closure is consistent");
        return Ok(());
    };
    let names = model.world_names();
    let mut matched = 0;
    let mut lines = 0;
    for line in DOG4_LISTING.lines().filter(|l| !l.trim().is_empty()) {
        lines += 1;
        let (ctx, members) = parse_listing_line(names, line)?;
        let family: Family = members.into_iter().collect();
        if model.ob().family(ctx) == family {
            matched += 1;
        }
    }
    let nonempty_contexts = lines - 1;
    report.check(
        lines == 16 && matched == lines,
        format!(
            "{matched} of {lines} reference lines match ({nonempty_contexts} nonempty contexts plus {{}})"
        ),
    );
    let listing = format_ob_listing(model)?;
    report.check(
        listing.lines().last() == Some("{a, b, c, d}, {{c}}") && listing.lines().count() == 16,
        "listing ends with {a, b, c, d}, {{c}}",
    );
    let witness = vec![set(model, "d"), set(model, "a b d"), model.universe()];
    let warned = run
        .violations
        .iter()
        .any(|v| v.condition == Condition::Expansion && v.witness == witness);
    report.check(
        warned,
        "condition (4) warning issued for X={d}, Y={a, b, d}, Z=W",
    );
    for c in &run.checks {
        report.check(
            c.passed(),
            format!(
                "dog4: {} at {} is {}",
                crate::render_formula(&c.formula),
                c.world,
                c.actual
            ),
        );
    }
    Ok(())
}

fn lemma3(report: &mut ReproReport) -> Result<()> {
    let model = scenario_checks(report, "lemma3", true)?;
    let universe = model.universe();
    let a = set(&model, "a");
    let up = upset(a, universe)?;
    let ok = universe.subsets().all(|x| {
        let fam = model.ob().family(x);
        if x.meets(a) {
            fam == up
        } else {
            fam.is_empty()
        }
    });
    report.check(ok, "π(X) = U({a}) when a ∈ X, ∅ otherwise");
    Ok(())
}

fn thm_cond5(report: &mut ReproReport) -> Result<()> {
    let scenario = parse_scenario(fixture("thm-cond5")?)?;
    let frame = scenario.frame_model()?;
    let options = scenario.effective_options().unwrap_or_default();
    let mut seeded = scenario.ob.clone();
    for (y, z) in crate::scenario::resolve_seeds(&scenario, &frame)? {
        crate::closure::seed_in_place(&mut seeded, y, z)?;
    }
    let without5 = close(&seeded, options.with_close5(false))?;
    let Some(base) = without5.closed() else {
        report.check(false, "closure without (5) is consistent");
        return Ok(());
    };
    let with5 = close(&seeded, options.with_close5(true))?;
    let Outcome::Inconsistent(full) = &with5.outcome else {
        report.check(false, "closure with (5) is inconsistent");
        return Ok(());
    };
    report.check(true, "closure with (5) is inconsistent");
    report.check(full.replay().is_ok(), "full derivation replays");
    let trimmed = full.relative_to(base);
    let bc = set(&frame, "b c");
    report.check(
        trimmed.replay() == Ok(bc),
        "trimmed derivation replays to ∅ ∈ π({b, c})",
    );
    report.check(
        trimmed.rules()
            == vec![
                Rule::Inheritance,
                Rule::Inheritance,
                Rule::Relevance,
                Rule::Relevance,
                Rule::Intersection,
            ],
        format!(
            "rules used: {:?}",
            trimmed
                .rules()
                .iter()
                .map(|r| r.to_string())
                .collect::<Vec<_>>()
        ),
    );
    let premise_ok = trimmed
        .premises
        .iter()
        .all(|p| base.contains(p.context, p.member));
    report.check(
        premise_ok,
        "premises are memberships of the closed lemma model",
    );
    Ok(())
}

fn cond5_upset(report: &mut ReproReport) -> Result<()> {
    let model = scenario_checks(report, "cond5-upset", true)?;
    let w = set(&model, "w");
    let ok = model.ob().family(w) == upset(w, model.universe())?;
    report.check(ok, "π({w}) = U({w})");
    let clean = check_all(&model, true)?.is_clean();
    report.check(clean, "conditions (1)-(5) hold");
    Ok(())
}
