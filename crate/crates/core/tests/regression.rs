//! Frozen outputs, so behaviour changes show up as diffs.

use cjkit::closure::{ClosureOptions, Rule};
use cjkit::scenario::parse_listing_line;
use cjkit::{
    check_all, fixture, format_ob_listing, parse_scenario, run_scenario, upset, Condition, Model,
    WorldSet,
};

fn closed(name: &str, options: Option<ClosureOptions>) -> cjkit::ScenarioReport {
    let mut sc = parse_scenario(fixture(name).unwrap()).unwrap();
    if options.is_some() {
        sc.options = options;
    }
    run_scenario(&sc).unwrap()
}

fn set(model: &Model, names: &str) -> WorldSet {
    names
        .split_whitespace()
        .map(|n| model.world_by_name(n).unwrap())
        .fold(WorldSet::EMPTY, WorldSet::with)
}

#[test]
fn c3_fails_condition_five_seven_times() {
    let report = closed("c3", None);
    let model = report.model.unwrap();
    let all = check_all(&model, true).unwrap();
    assert_eq!(all.count(Condition::Inheritance), 7);
    assert_eq!(all.violations.len(), 7);
    let first = all.of(Condition::Inheritance).next().unwrap();
    assert_eq!(
        first.witness,
        vec![set(&model, "x y"), set(&model, "y"), set(&model, "x y")]
    );
}

#[test]
fn dog4_baseline_has_43_expansion_violations() {
    let report = closed("dog4", None);
    assert_eq!(report.violations.len(), 43);
    assert!(report
        .violations
        .iter()
        .all(|v| v.condition == Condition::Expansion));
    let c = report.closure.unwrap();
    assert_eq!(c.iterations, 2);
    assert_eq!(c.generated.get(&Rule::Relevance), Some(&42));
    assert_eq!(c.generated.get(&Rule::Intersection), None);
}

#[test]
fn dog4_baseline_already_satisfies_condition_five() {
    let base = closed("dog4", None).model.unwrap();
    let with5 = closed("dog4", Some(ClosureOptions::baseline().with_close5(true)));
    assert_eq!(with5.model.unwrap().ob(), base.ob());
}

#[test]
fn dog4_with_four_and_five_is_inconsistent_at_ab() {
    let report = closed("dog4", Some(ClosureOptions::full().with_close5(true)));
    let d = report.closure.unwrap().derivation().cloned().unwrap();
    let names = report.world_names.clone();
    let ab = WorldSet::from_bits(0b0011);
    assert_eq!(d.contradiction, ab);
    assert_eq!(d.replay(), Ok(ab));
    assert_eq!(
        d.rules(),
        vec![
            Rule::Expansion,
            Rule::Inheritance,
            Rule::Relevance,
            Rule::Intersection
        ]
    );
    assert!(d.render(&names).contains("∅ ∈ π({a, b})"));
}

#[test]
fn dog4_full_top_context_is_upset_of_c() {
    let model = closed("dog4-full", None).model.unwrap();
    let w = model.universe();
    let fam = model.ob().family(w);
    assert_eq!(fam, upset(set(&model, "c"), w).unwrap());
    assert!(fam.contains(set(&model, "c d")));
    assert!(fam.contains(set(&model, "b c d")));
}

#[test]
fn dog4_listing_is_byte_stable() {
    let model = closed("dog4", None).model.unwrap();
    let listing = format_ob_listing(&model).unwrap();
    let expected = "\
{}, {}
{a}, {}
{b}, {{b}, {a, b}, {b, c}, {b, d}, {a, b, c}, {a, b, d}, {b, c, d}, {a, b, c, d}}
{a, b}, {{b}, {b, c}, {b, d}, {b, c, d}}
{c}, {{c}, {a, c}, {b, c}, {c, d}, {a, b, c}, {a, c, d}, {b, c, d}, {a, b, c, d}}
{a, c}, {{c}, {b, c}, {c, d}, {b, c, d}}
{b, c}, {{c}, {a, c}, {c, d}, {a, c, d}}
{a, b, c}, {{c}, {c, d}}
{d}, {{d}, {a, d}, {b, d}, {c, d}, {a, b, d}, {a, c, d}, {b, c, d}, {a, b, c, d}}
{a, d}, {{d}, {b, d}, {c, d}, {b, c, d}}
{b, d}, {{d}, {a, d}, {c, d}, {a, c, d}}
{a, b, d}, {{d}, {c, d}}
{c, d}, {{c}, {a, c}, {b, c}, {a, b, c}}
{a, c, d}, {{c}, {b, c}}
{b, c, d}, {{c}, {a, c}}
{a, b, c, d}, {{c}}
";
    assert_eq!(listing, expected);
    for line in listing.lines() {
        let (ctx, members) = parse_listing_line(model.world_names(), line).unwrap();
        let fam: cjkit::Family = members.into_iter().collect();
        assert_eq!(model.ob().family(ctx), fam);
    }
}

#[test]
fn listing_rejects_nine_worlds() {
    let names: Vec<String> = (0..9).map(|i| format!("w{i}")).collect();
    let text = format!("worlds: {}", names.join(" "));
    let model = parse_scenario(&text).unwrap().frame_model().unwrap();
    assert!(matches!(
        format_ob_listing(&model),
        Err(cjkit::Error::TooLarge {
            worlds: 9,
            limit: 8
        })
    ));
}
