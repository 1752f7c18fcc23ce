//! Scenario files: a frame, a valuation, explicit `π` entries, seeds and
//! checks in a line-oriented text format.
//!
//! ```text
//! # comment
//! worlds: a b c d
//! atom Dog: a b d
//! av a: a b                      # default av(w) = {w}
//! pv a: a b c d                  # default pv(w) = W
//! ob {a, b}: {b} {b, c} up{b, d} # explicit π entry; up{…} is an upset
//! seed: ~Dog given true          # make O(~Dog|true) true before closing
//! options: close2 close3 close4 close5 max-iterations=100
//! check a true: [a](Dog & ~Sign)
//! ```
//!
//! `worlds:` must come first. A scenario is closed when it has seeds or an
//! `options:` line; otherwise its explicit `π` is used as is.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::closure::{ctctd_model, ClosureOptions, ClosureReport, Outcome};
use crate::conditions::Violation;
use crate::error::{Error, Result};
use crate::evaluator::{extension, holds_at};
use crate::formula::{parse_formula, render_formula, Formula};
use crate::kernel::{check_dense, show_family, show_set, upset, Model, ObMap, WorldId, WorldSet};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Seed {
    pub consequent: Formula,
    pub antecedent: Formula,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Check {
    pub world: WorldId,
    pub expected: bool,
    pub formula: Formula,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Scenario {
    pub worlds: Vec<String>,
    /// In declaration order.
    pub atoms: Vec<(String, WorldSet)>,
    pub av: Vec<WorldSet>,
    pub pv: Vec<WorldSet>,
    pub ob: ObMap,
    pub seeds: Vec<Seed>,
    pub options: Option<ClosureOptions>,
    pub checks: Vec<Check>,
}

impl Scenario {
    pub fn world_count(&self) -> usize {
        self.worlds.len()
    }

    pub fn world(&self, name: &str) -> Option<WorldId> {
        self.worlds.iter().position(|w| w == name).map(WorldId)
    }

    /// Options closure will run with, if any.
    pub fn effective_options(&self) -> Option<ClosureOptions> {
        match self.options {
            Some(o) => Some(o),
            None if !self.seeds.is_empty() => Some(ClosureOptions::baseline()),
            None => None,
        }
    }

    /// The frame and valuation with an empty `π`.
    pub fn frame_model(&self) -> Result<Model> {
        Model::new(
            self.worlds.clone(),
            self.atoms.iter().cloned().collect(),
            self.av.clone(),
            self.pv.clone(),
            ObMap::new(self.worlds.len()),
        )
    }

    /// Canonical text; parsing it yields an identical scenario.
    pub fn serialize(&self) -> String {
        let n = self.world_count();
        let universe = WorldSet::full(n);
        let names = |s: WorldSet| -> String {
            s.worlds()
                .map(|w| self.worlds[w.0].as_str())
                .collect::<Vec<_>>()
                .join(" ")
        };
        let mut out = String::new();
        let _ = writeln!(out, "worlds: {}", self.worlds.join(" "));
        for (atom, ext) in &self.atoms {
            let _ = writeln!(out, "atom {atom}: {}", names(*ext));
        }
        for w in 0..n {
            let own = WorldSet::singleton(WorldId(w));
            if self.av[w] != own {
                let _ = writeln!(out, "av {}: {}", self.worlds[w], names(self.av[w]));
            }
            if self.pv[w] != universe {
                let _ = writeln!(out, "pv {}: {}", self.worlds[w], names(self.pv[w]));
            }
        }
        for (ctx, fam) in self.ob.entries() {
            let members: Vec<String> = fam.iter().map(|m| show_set(&self.worlds, m)).collect();
            let _ = writeln!(
                out,
                "ob {}: {}",
                show_set(&self.worlds, ctx),
                members.join(" ")
            );
        }
        for seed in &self.seeds {
            let _ = writeln!(
                out,
                "seed: {} given {}",
                render_formula(&seed.consequent),
                render_formula(&seed.antecedent)
            );
        }
        if let Some(o) = &self.options {
            let mut words = Vec::new();
            for (on, word) in [
                (o.close2, "close2"),
                (o.close3, "close3"),
                (o.close4, "close4"),
                (o.close5, "close5"),
            ] {
                if on {
                    words.push(word.to_string());
                }
            }
            if o.max_iterations != ClosureOptions::DEFAULT_MAX_ITERATIONS {
                words.push(format!("max-iterations={}", o.max_iterations));
            }
            let _ = writeln!(out, "options: {}", words.join(" "));
        }
        for check in &self.checks {
            let _ = writeln!(
                out,
                "check {} {}: {}",
                self.worlds[check.world.0],
                check.expected,
                render_formula(&check.formula)
            );
        }
        out
    }
}

fn syntax(line: usize, reason: impl Into<String>) -> Error {
    Error::ScenarioSyntax {
        line,
        reason: reason.into(),
    }
}

struct Reader<'a> {
    worlds: &'a [String],
    line: usize,
}

impl Reader<'_> {
    fn world(&self, name: &str) -> Result<WorldId> {
        self.worlds
            .iter()
            .position(|w| w == name)
            .map(WorldId)
            .ok_or_else(|| Error::UndeclaredWorld(name.to_string()))
    }

    fn world_list(&self, text: &str) -> Result<WorldSet> {
        text.split(|c: char| c.is_whitespace() || c == ',')
            .filter(|t| !t.is_empty())
            .try_fold(WorldSet::EMPTY, |acc, name| Ok(acc.with(self.world(name)?)))
    }

    /// `{a, b}` literal; returns the set and the unparsed rest.
    fn braced<'s>(&self, text: &'s str) -> Result<(WorldSet, &'s str)> {
        let text = text.trim_start();
        let Some(inner) = text.strip_prefix('{') else {
            return Err(syntax(self.line, "expected a set literal like {a, b}"));
        };
        let Some(end) = inner.find('}') else {
            return Err(syntax(self.line, "unterminated set literal"));
        };
        Ok((self.world_list(&inner[..end])?, &inner[end + 1..]))
    }

    fn formula(&self, text: &str, atoms: &[(String, WorldSet)]) -> Result<Formula> {
        let f = parse_formula(text.trim())
            .map_err(|e| syntax(self.line, format!("bad formula {:?}: {e}", text.trim())))?;
        if let Some(missing) = f
            .atoms()
            .into_iter()
            .find(|a| !atoms.iter().any(|(name, _)| name == a))
        {
            return Err(Error::UndeclaredAtom(missing));
        }
        Ok(f)
    }
}

fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '\'')
        && !matches!(s, "Oa" | "Oi" | "O" | "viol" | "true" | "false" | "given")
}

/// Parses a scenario, applying frame defaults.
pub fn parse_scenario(text: &str) -> Result<Scenario> {
    let mut scenario: Option<Scenario> = None;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let Some((head, body)) = content.split_once(':') else {
            return Err(syntax(line, "expected `keyword: …`"));
        };
        let head = head.trim();
        let mut words = head.split_whitespace();
        let keyword = words.next().unwrap_or("");
        let args: Vec<&str> = words.collect();

        if keyword == "worlds" {
            if scenario.is_some() {
                return Err(syntax(line, "worlds declared twice"));
            }
            if !args.is_empty() {
                return Err(syntax(line, "expected `worlds: name …`"));
            }
            let worlds: Vec<String> = body.split_whitespace().map(str::to_string).collect();
            if worlds.is_empty() {
                return Err(Error::EmptyWorldSet);
            }
            if worlds.len() > crate::MAX_WORLDS {
                return Err(Error::TooLarge {
                    worlds: worlds.len(),
                    limit: crate::MAX_WORLDS,
                });
            }
            for (i, w) in worlds.iter().enumerate() {
                if !is_identifier(w) || worlds[..i].contains(w) {
                    return Err(syntax(line, format!("bad or repeated world name {w:?}")));
                }
            }
            let n = worlds.len();
            scenario = Some(Scenario {
                av: (0..n).map(|i| WorldSet::singleton(WorldId(i))).collect(),
                pv: vec![WorldSet::full(n); n],
                ob: ObMap::new(n),
                worlds,
                atoms: Vec::new(),
                seeds: Vec::new(),
                options: None,
                checks: Vec::new(),
            });
            continue;
        }

        let Some(sc) = scenario.as_mut() else {
            return Err(syntax(line, "`worlds:` must come first"));
        };
        let reader = Reader {
            worlds: &sc.worlds,
            line,
        };
        match (keyword, args.as_slice()) {
            ("atom", [name]) => {
                if !is_identifier(name) {
                    return Err(syntax(line, format!("bad atom name {name:?}")));
                }
                if sc.atoms.iter().any(|(a, _)| a == name) {
                    return Err(syntax(line, format!("atom {name} declared twice")));
                }
                let ext = reader.world_list(body)?;
                sc.atoms.push((name.to_string(), ext));
            }
            ("av" | "pv", [world]) => {
                let w = reader.world(world)?;
                let set = reader.world_list(body)?;
                if keyword == "av" {
                    sc.av[w.0] = set;
                } else {
                    sc.pv[w.0] = set;
                }
            }
            ("ob", _) => {
                // The context literal may contain spaces, so re-split on the
                // raw content rather than the head words.
                let after = content.trim_start().strip_prefix("ob").unwrap_or("");
                let (ctx, rest) = reader.braced(after)?;
                let Some(mut rest) = rest.trim_start().strip_prefix(':') else {
                    return Err(syntax(line, "expected `:` after the context"));
                };
                let universe = WorldSet::full(sc.worlds.len());
                loop {
                    rest = rest.trim_start().trim_start_matches(',').trim_start();
                    if rest.is_empty() {
                        break;
                    }
                    if let Some(after_up) = rest.strip_prefix("up") {
                        let (base, tail) = reader.braced(after_up)?;
                        for m in upset(base, universe)?.iter() {
                            sc.ob.insert(ctx, m);
                        }
                        rest = tail;
                    } else {
                        let (m, tail) = reader.braced(rest)?;
                        sc.ob.insert(ctx, m);
                        rest = tail;
                    }
                }
            }
            ("seed", []) => {
                let Some((cons, ante)) = split_given(body) else {
                    return Err(syntax(line, "expected `seed: B given A`"));
                };
                sc.seeds.push(Seed {
                    consequent: reader.formula(cons, &sc.atoms)?,
                    antecedent: reader.formula(ante, &sc.atoms)?,
                });
            }
            ("options", []) => {
                let mut o = ClosureOptions {
                    close2: false,
                    close3: false,
                    ..ClosureOptions::baseline()
                };
                for word in body.split_whitespace() {
                    match word {
                        "close2" => o.close2 = true,
                        "close3" => o.close3 = true,
                        "close4" => o.close4 = true,
                        "close5" => o.close5 = true,
                        _ => match word.strip_prefix("max-iterations=").map(str::parse) {
                            Some(Ok(k)) if k > 0 => o.max_iterations = k,
                            _ => return Err(syntax(line, format!("unknown option {word:?}"))),
                        },
                    }
                }
                sc.options = Some(o);
            }
            ("check", [world, expected]) => {
                let world = reader.world(world)?;
                let expected = match *expected {
                    "true" => true,
                    "false" => false,
                    other => {
                        return Err(syntax(
                            line,
                            format!("expected true or false, got {other:?}"),
                        ))
                    }
                };
                let formula = reader.formula(body, &sc.atoms)?;
                sc.checks.push(Check {
                    world,
                    expected,
                    formula,
                });
            }
            _ => return Err(syntax(line, format!("unrecognized line `{head}:`"))),
        }
    }
    let scenario = scenario.ok_or_else(|| syntax(1, "missing `worlds:` line"))?;
    // Frame validity is checked here so that a parsed scenario always builds.
    scenario.frame_model()?;
    Ok(scenario)
}

fn split_given(body: &str) -> Option<(&str, &str)> {
    let mut offset = 0;
    for token in body.split_inclusive(char::is_whitespace) {
        if token.trim() == "given" {
            let (lhs, rhs) = (&body[..offset], &body[offset + token.len()..]);
            return Some((lhs, rhs));
        }
        offset += token.len();
    }
    None
}

/// Seeds evaluated to `(Y, Z)` pairs against `model`.
pub fn resolve_seeds(scenario: &Scenario, model: &Model) -> Result<Vec<(WorldSet, WorldSet)>> {
    scenario
        .seeds
        .iter()
        .map(|s| {
            Ok((
                extension(model, &s.consequent)?,
                extension(model, &s.antecedent)?,
            ))
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckResult {
    pub world: String,
    pub formula: Formula,
    pub expected: bool,
    pub actual: bool,
}

impl CheckResult {
    pub fn passed(&self) -> bool {
        self.expected == self.actual
    }
}

#[derive(Debug, Clone)]
pub struct ScenarioReport {
    pub world_names: Vec<String>,
    pub model: Option<Model>,
    pub closure: Option<ClosureReport>,
    pub violations: Vec<Violation>,
    pub checks: Vec<CheckResult>,
}

impl ScenarioReport {
    pub fn inconsistent(&self) -> bool {
        matches!(
            self.closure.as_ref().map(|c| &c.outcome),
            Some(Outcome::Inconsistent(_))
        )
    }

    pub fn success(&self) -> bool {
        !self.inconsistent()
            && self.violations.is_empty()
            && self.checks.iter().all(CheckResult::passed)
    }

    /// Human-readable summary.
    pub fn render(&self) -> String {
        let mut out = String::new();
        let names = &self.world_names;
        if let Some(c) = &self.closure {
            let _ = writeln!(out, "closure: {} sweeps", c.iterations);
            for (rule, count) in &c.generated {
                let _ = writeln!(out, "  rule {rule}: {count} memberships added");
            }
            if let Outcome::Inconsistent(d) = &c.outcome {
                let _ = writeln!(out, "INCONSISTENT: ∅ generated");
                out.push_str(&d.render(names));
            }
        }
        if self.violations.is_empty() {
            if self.model.is_some() {
                let _ = writeln!(out, "conditions: all satisfied");
            }
        } else {
            let _ = writeln!(out, "conditions: {} violations", self.violations.len());
            for v in &self.violations {
                let _ = writeln!(out, "  {v}");
            }
        }
        for c in &self.checks {
            let _ = writeln!(
                out,
                "[{}] {}: {} (expected {}, got {})",
                if c.passed() { "PASS" } else { "FAIL" },
                c.world,
                render_formula(&c.formula),
                c.expected,
                c.actual
            );
        }
        out
    }
}

/// Builds the model, checks the conditions and evaluates every check line.
pub fn run_scenario(scenario: &Scenario) -> Result<ScenarioReport> {
    let built = ctctd_model(scenario)?;
    let mut checks = Vec::new();
    if let Some(model) = &built.model {
        for check in &scenario.checks {
            checks.push(CheckResult {
                world: model.world_name(check.world).to_string(),
                formula: check.formula.clone(),
                expected: check.expected,
                actual: holds_at(model, check.world, &check.formula)?,
            });
        }
    }
    Ok(ScenarioReport {
        world_names: scenario.worlds.clone(),
        model: built.model,
        closure: built.closure,
        violations: built.warnings,
        checks,
    })
}

/// One line per context in ascending order: `{members}, {{family}}`.
pub fn format_ob_listing(model: &Model) -> Result<String> {
    check_dense(model.world_count())?;
    let names = model.world_names();
    let mut out = String::new();
    for ctx in model.universe().subsets() {
        let _ = writeln!(
            out,
            "{}, {}",
            show_set(names, ctx),
            show_family(names, model.ob().members(ctx))
        );
    }
    Ok(out)
}

/// Parses one listing line back into `(context, family)`, using `names`.
pub fn parse_listing_line(names: &[String], line: &str) -> Result<(WorldSet, Vec<WorldSet>)> {
    let reader = Reader {
        worlds: names,
        line: 0,
    };
    let (ctx, rest) = reader.braced(line)?;
    let rest = rest.trim_start().strip_prefix(',').unwrap_or(rest).trim();
    let inner = rest
        .strip_prefix('{')
        .and_then(|r| r.strip_suffix('}'))
        .ok_or_else(|| syntax(0, "expected {{…}} family"))?;
    let mut members = Vec::new();
    let mut rest = inner;
    loop {
        rest = rest.trim_start().trim_start_matches(',').trim_start();
        if rest.is_empty() {
            break;
        }
        let (m, tail) = reader.braced(rest)?;
        members.push(m);
        rest = tail;
    }
    Ok((ctx, members))
}

/// Atom extensions by name, for quick lookups in reports.
pub fn atom_map(scenario: &Scenario) -> BTreeMap<String, WorldSet> {
    scenario.atoms.iter().cloned().collect()
}
