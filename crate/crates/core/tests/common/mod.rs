//! Shared helpers for the integration tests: schema templates, random CJ
//! models, and the validity checks run over them.
#![allow(dead_code)]

use std::collections::BTreeMap;

use cjkit::closure::{close, seed_in_place, ClosureOptions};
use cjkit::{
    check_union_property, extension, parse_formula, Formula, Model, ObMap, WorldId, WorldSet,
};
use rand::Rng;

pub const ATOMS: [&str; 3] = ["A", "B", "C"];

/// Schemas over metavariables `P`, `Q`, `R`, each expected valid in every
/// model satisfying conditions (1)-(4).
pub const VALID_SCHEMAS: &[(&str, &str)] = &[
    ("actual implies potential possibility", "<a>P -> <>P"),
    ("axiom T", "([]P -> P) & ([a]P -> P)"),
    ("D'", "~Oa false & ~Oi false"),
    ("violability", "~Oa true & ~Oi true"),
    ("C actual", "Oa P & Oa Q -> Oa(P & Q)"),
    ("C ideal", "Oi P & Oi Q -> Oi(P & Q)"),
    ("restricted factual detachment, actual", "O(Q|P) & [a]P & <a>Q & <a>~Q -> Oa Q"),
    ("restricted factual detachment, ideal", "O(Q|P) & []P & <>Q & <>~Q -> Oi Q"),
    (
        "conditional to material, actual",
        "O(Q|P) & <a>(P & Q) & <a>(P & ~Q) -> Oa(P -> Q)",
    ),
    ("conditional to material, ideal", "O(Q|P) & <>(P & Q) & <>(P & ~Q) -> Oi(P -> Q)"),
    ("restricted deontic detachment, actual", "Oa P & O(Q|P) & <a>(P & Q) -> Oa(P & Q)"),
    ("restricted deontic detachment, ideal", "Oi P & O(Q|P) & <>(P & Q) -> Oi(P & Q)"),
    ("strong violability, actual", "[a]P -> ~Oa P & ~Oa ~P"),
    ("strong violability, ideal", "[]P -> ~Oi P & ~Oi ~P"),
    ("strong classicality, actual", "[a](P <-> Q) -> (Oa P <-> Oa Q)"),
    ("strong classicality, ideal", "[](P <-> Q) -> (Oi P <-> Oi Q)"),
    ("necessary conjunct, actual", "[a]P -> (Oa Q -> Oa(P & Q))"),
    ("potentially necessary conjunct, actual", "[]P -> (Oa Q -> Oa(P & Q))"),
    ("potentially necessary conjunct, ideal", "[]P -> (Oi Q -> Oi(P & Q))"),
    ("restricted SA", "O(Q|P) & <>(P & R & Q) -> O(Q|P & R)"),
];

/// Instances substituted for metavariables.
pub const POOL: &[&str] = &["A", "B", "C", "~A", "A & B", "A | ~C", "true", "false"];

pub fn subst(f: &Formula, map: &BTreeMap<&str, Formula>) -> Formula {
    use Formula::*;
    let s = |g: &Formula| Box::new(subst(g, map));
    match f {
        Atom(name) => map.get(name.as_str()).cloned().unwrap_or_else(|| f.clone()),
        Top | Bottom => f.clone(),
        Not(a) => Not(s(a)),
        And(a, b) => And(s(a), s(b)),
        Or(a, b) => Or(s(a), s(b)),
        Implies(a, b) => Implies(s(a), s(b)),
        Iff(a, b) => Iff(s(a), s(b)),
        BoxStrong(a) => BoxStrong(s(a)),
        DiaStrong(a) => DiaStrong(s(a)),
        BoxActual(a) => BoxActual(s(a)),
        DiaActual(a) => DiaActual(s(a)),
        OblActual(a) => OblActual(s(a)),
        OblIdeal(a) => OblIdeal(s(a)),
        OblCond(a, b) => OblCond(s(a), s(b)),
        Viol(a) => Viol(s(a)),
    }
}

/// Every instance of `template` over [`POOL`], for the metavariables it uses.
pub fn instances(template: &str) -> Vec<Formula> {
    let schema = parse_formula(template).expect("schema parses");
    let metas: Vec<&str> = ["P", "Q", "R"]
        .into_iter()
        .filter(|m| schema.atoms().iter().any(|a| a == m))
        .collect();
    let pool: Vec<Formula> = POOL.iter().map(|p| parse_formula(p).unwrap()).collect();
    let mut out = Vec::new();
    let total = pool.len().pow(metas.len() as u32);
    for mut code in 0..total {
        let mut map = BTreeMap::new();
        for m in &metas {
            map.insert(*m, pool[code % pool.len()].clone());
            code /= pool.len();
        }
        out.push(subst(&schema, &map));
    }
    out
}

/// Pre-instantiated schemas, so each model only pays for evaluation.
pub struct Suite {
    pub schemas: Vec<(&'static str, Vec<Formula>)>,
    pub pool: Vec<Formula>,
}

impl Suite {
    pub fn new() -> Self {
        Suite {
            schemas: VALID_SCHEMAS
                .iter()
                .map(|(label, t)| (*label, instances(t)))
                .collect(),
            pool: POOL.iter().map(|p| parse_formula(p).unwrap()).collect(),
        }
    }

    /// Labels of every check that fails on `model`, with the instance.
    pub fn failures(&self, model: &Model) -> Vec<String> {
        let universe = model.universe();
        let mut bad = Vec::new();
        for (label, insts) in &self.schemas {
            for f in insts {
                if extension(model, f).unwrap() != universe {
                    bad.push(format!("{label}: {f}"));
                }
            }
        }
        bad.extend(classicality_failures(model, &self.pool));
        if !check_union_property(model).unwrap().is_empty() {
            bad.push("union property".into());
        }
        bad
    }
}

impl Default for Suite {
    fn default() -> Self {
        Self::new()
    }
}

/// Formulas with equal extensions are interchangeable under every operator.
pub fn classicality_failures(model: &Model, pool: &[Formula]) -> Vec<String> {
    let ext: Vec<WorldSet> = pool.iter().map(|f| extension(model, f).unwrap()).collect();
    let mut bad = Vec::new();
    for (i, a) in pool.iter().enumerate() {
        for (j, b) in pool.iter().enumerate() {
            if i >= j || ext[i] != ext[j] {
                continue;
            }
            for c in pool {
                let pairs = [
                    (
                        Formula::OblActual(Box::new(a.clone())),
                        Formula::OblActual(Box::new(b.clone())),
                    ),
                    (
                        Formula::OblIdeal(Box::new(a.clone())),
                        Formula::OblIdeal(Box::new(b.clone())),
                    ),
                    (
                        Formula::obl_cond(c.clone(), a.clone()),
                        Formula::obl_cond(c.clone(), b.clone()),
                    ),
                    (
                        Formula::obl_cond(a.clone(), c.clone()),
                        Formula::obl_cond(b.clone(), c.clone()),
                    ),
                ];
                for (x, y) in pairs {
                    if extension(model, &x).unwrap() != extension(model, &y).unwrap() {
                        bad.push(format!("classicality: {x} vs {y}"));
                    }
                }
            }
        }
    }
    bad
}

fn random_set<R: Rng>(rng: &mut R, n: usize) -> WorldSet {
    WorldSet::from_bits(rng.gen_range(0..(1u32 << n)))
}

/// A random frame: `w ∈ av(w) ⊆ pv(w)`.
pub fn random_frame<R: Rng>(rng: &mut R, n: usize) -> (Vec<WorldSet>, Vec<WorldSet>) {
    let mut av = Vec::with_capacity(n);
    let mut pv = Vec::with_capacity(n);
    for w in 0..n {
        let own = WorldSet::singleton(WorldId(w));
        let a = random_set(rng, n).union(own);
        let p = random_set(rng, n).union(a);
        av.push(a);
        pv.push(p);
    }
    (av, pv)
}

/// A CJ model built by closing one to three random conditional seeds under
/// (2), (3) and (4). Inconsistent draws are retried.
pub fn random_closed_model<R: Rng>(rng: &mut R, n: usize) -> Model {
    let universe = WorldSet::full(n);
    let names: Vec<String> = (0..n).map(|i| format!("w{i}")).collect();
    loop {
        let (av, pv) = random_frame(rng, n);
        let valuation: BTreeMap<String, WorldSet> = ATOMS
            .iter()
            .map(|a| (a.to_string(), random_set(rng, n)))
            .collect();
        let mut ob = ObMap::new(n);
        let seeds = rng.gen_range(1..=3);
        for _ in 0..seeds {
            let z = random_set(rng, n).union(WorldSet::singleton(WorldId(rng.gen_range(0..n))));
            let pick = z.worlds().nth(rng.gen_range(0..z.len())).unwrap();
            let y = random_set(rng, n).union(WorldSet::singleton(pick));
            seed_in_place(&mut ob, y.intersection(universe), z).unwrap();
        }
        let report = close(&ob, ClosureOptions::full()).unwrap();
        if let Some(closed) = report.closed() {
            return Model::new(names, valuation, av, pv, closed.clone()).unwrap();
        }
    }
}

pub mod strategies {
    use cjkit::Formula;
    use proptest::prelude::*;

    pub fn atom(names: Vec<&'static str>) -> impl Strategy<Value = Formula> {
        prop_oneof![
            4 => prop::sample::select(names).prop_map(Formula::atom),
            1 => Just(Formula::Top),
            1 => Just(Formula::Bottom),
        ]
    }

    /// Formulas with assorted atom names, at most `depth` levels deep.
    pub fn formula(depth: u32) -> impl Strategy<Value = Formula> {
        formula_over(vec!["A", "B", "C", "Dog", "x_1'"], depth)
    }

    pub fn formula_over(names: Vec<&'static str>, depth: u32) -> impl Strategy<Value = Formula> {
        use Formula::*;
        atom(names).prop_recursive(depth, 64, 2, |inner| {
            let b = |f: Formula| Box::new(f);
            prop_oneof![
                inner.clone().prop_map(move |a| Not(b(a))),
                (inner.clone(), inner.clone()).prop_map(move |(x, y)| And(b(x), b(y))),
                (inner.clone(), inner.clone()).prop_map(move |(x, y)| Or(b(x), b(y))),
                (inner.clone(), inner.clone()).prop_map(move |(x, y)| Implies(b(x), b(y))),
                (inner.clone(), inner.clone()).prop_map(move |(x, y)| Iff(b(x), b(y))),
                inner.clone().prop_map(move |a| BoxStrong(b(a))),
                inner.clone().prop_map(move |a| DiaStrong(b(a))),
                inner.clone().prop_map(move |a| BoxActual(b(a))),
                inner.clone().prop_map(move |a| DiaActual(b(a))),
                inner.clone().prop_map(move |a| OblActual(b(a))),
                inner.clone().prop_map(move |a| OblIdeal(b(a))),
                (inner.clone(), inner.clone()).prop_map(move |(x, y)| OblCond(b(x), b(y))),
                inner.prop_map(move |a| Viol(b(a))),
            ]
        })
    }
}
