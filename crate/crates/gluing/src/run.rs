//! Command dispatch over a resolved spec document.

use std::collections::BTreeMap;
use std::fmt::Display;

use gluing_core::cover::{
    check_covering, functor_of_covering, site_axiom_basechange, site_axiom_compose, site_axiom_iso, CoverError, CoverKind, Covering,
};
use gluing_core::fintop::{enumerate_homeomorphisms, SpaceMap, TopError};
use gluing_core::gdata::{functor_of, validate, DataError, GluingFunctor};
use gluing_core::glue::{
    check_cone, check_glued_properties, check_otop, default_apexes, glue, mediate, verify_universal, Cone, ConeMode, GluedSpace,
    GlueError,
};
use gluing_core::refine::{check_refinement, compose_gdf, induced_map, RefineError};
use gluing_core::DEFAULT_BUDGET;

use crate::dot;
use crate::random;
use crate::report::RunReport;
use crate::spec::SpecDocument;

pub const COMMANDS: [&str; 13] = [
    "validate",
    "glue",
    "check-cone",
    "check-glued",
    "mediate",
    "verify-universal",
    "check-otop",
    "check-refinement",
    "compose",
    "cover-check",
    "cover-functor",
    "site-check",
    "render-dot",
];

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RunError {
    #[error("unknown command {0}; expected one of {list}", list = COMMANDS.join(", "))]
    UnknownCommand(String),
    #[error("unknown target {0}")]
    UnknownTarget(String),
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Budget(String),
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Budget(_) => 3,
            _ => 2,
        }
    }
}

#[derive(Clone, Debug)]
pub struct RunArgs {
    pub target: Option<String>,
    pub budget: u64,
    pub kind: Option<CoverKind>,
    pub seed: u64,
}

impl Default for RunArgs {
    fn default() -> Self {
        RunArgs { target: None, budget: DEFAULT_BUDGET, kind: None, seed: 0 }
    }
}

/// Whether an error is a search budget running out.
pub trait BudgetError {
    fn is_budget(&self) -> bool;
}

impl BudgetError for TopError {
    fn is_budget(&self) -> bool {
        matches!(self, TopError::SearchBudgetExceeded { .. })
    }
}

impl BudgetError for DataError {
    fn is_budget(&self) -> bool {
        matches!(self, DataError::Top(t) if t.is_budget())
    }
}

impl BudgetError for GlueError {
    fn is_budget(&self) -> bool {
        match self {
            GlueError::Top(t) => t.is_budget(),
            GlueError::Data(d) => d.is_budget(),
            _ => false,
        }
    }
}

impl BudgetError for CoverError {
    fn is_budget(&self) -> bool {
        match self {
            CoverError::Top(t) => t.is_budget(),
            CoverError::Data(d) => d.is_budget(),
            CoverError::Glue(g) => g.is_budget(),
            _ => false,
        }
    }
}

impl BudgetError for RefineError {
    fn is_budget(&self) -> bool {
        match self {
            RefineError::Top(t) => t.is_budget(),
            RefineError::Data(d) => d.is_budget(),
            RefineError::Glue(g) => g.is_budget(),
            _ => false,
        }
    }
}

/// Unwraps a module result. Budget errors abort the run; anything else
/// becomes a failed check named `what`.
fn attempt<T, E: BudgetError + Display>(rep: &mut RunReport, what: &str, r: Result<T, E>) -> Result<Option<T>, RunError> {
    match r {
        Ok(v) => Ok(Some(v)),
        Err(e) if e.is_budget() => Err(RunError::Budget(format!("{what}: {e}"))),
        Err(e) => {
            rep.check(what, false, vec![e.to_string()]);
            Ok(None)
        }
    }
}

fn pick<'a, T>(doc: &SpecDocument, map: &'a BTreeMap<String, T>, target: &Option<String>, what: &str) -> Result<(String, &'a T), RunError> {
    if let Some(why) = target.as_ref().and_then(|t| doc.deferred.get(t)) {
        return Err(RunError::Input(why.clone()));
    }
    match target {
        Some(t) => map.get(t).map(|v| (t.clone(), v)).ok_or_else(|| RunError::UnknownTarget(format!("no {what} named {t}"))),
        None if map.len() == 1 => {
            let (k, v) = map.iter().next().expect("one entry");
            Ok((k.clone(), v))
        }
        None if map.is_empty() => match doc.deferred.values().next() {
            Some(why) => Err(RunError::Input(why.clone())),
            None => Err(RunError::UnknownTarget(format!("the document declares no {what}"))),
        },
        None => Err(RunError::UnknownTarget(format!(
            "several {what}s ({}); name one",
            map.keys().cloned().collect::<Vec<_>>().join(", ")
        ))),
    }
}

fn map_lines(m: &SpaceMap) -> Vec<String> {
    m.pairs().into_iter().map(|(a, b)| format!("{a} -> {b}")).collect()
}

fn glued_sections(rep: &mut RunReport, fun: &GluingFunctor, q: &GluedSpace) {
    rep.section(
        format!("classes ({})", q.space.len()),
        q.provenance().into_iter().map(|(c, members)| format!("{c}: {}", members.join(" "))).collect(),
    );
    rep.section("topology", vec![q.space.to_string()]);
    for i in fun.index() {
        rep.section(format!("leg {i}"), map_lines(q.leg(i)));
    }
}

/// Runs one command. Check failures are reported in the returned report;
/// `Err` is reserved for bad input and exhausted budgets.
pub fn run(doc: &SpecDocument, command: &str, args: &RunArgs) -> Result<RunReport, RunError> {
    match command {
        "validate" => cmd_validate(doc, args),
        "glue" => cmd_glue(doc, args),
        "check-cone" => cmd_check_cone(doc, args),
        "check-glued" => cmd_check_glued(doc, args),
        "mediate" => cmd_mediate(doc, args),
        "verify-universal" => cmd_verify_universal(doc, args),
        "check-otop" => cmd_check_otop(doc, args),
        "check-refinement" => cmd_check_refinement(doc, args),
        "compose" => cmd_compose(doc, args),
        "cover-check" => cmd_cover_check(doc, args),
        "cover-functor" => cmd_cover_functor(doc, args),
        "site-check" => cmd_site_check(doc, args),
        "render-dot" => cmd_render_dot(doc, args),
        other => Err(RunError::UnknownCommand(other.into())),
    }
}

fn functor(rep: &mut RunReport, doc: &SpecDocument, name: &str) -> Result<Option<GluingFunctor>, RunError> {
    let gd = doc.gluings.get(name).ok_or_else(|| RunError::UnknownTarget(format!("no gluing named {name}")))?;
    attempt(rep, "gluing data functor", functor_of(gd))
}

fn cmd_validate(doc: &SpecDocument, args: &RunArgs) -> Result<RunReport, RunError> {
    let (name, gd) = pick(doc, &doc.gluings, &args.target, "gluing")?;
    let mut rep = RunReport::new("validate", &name);
    for c in validate(gd).clauses {
        let name = format!("{} ({} checked)", c.name, c.checked);
        rep.expect_none(name, c.witnesses);
    }
    Ok(rep)
}

fn cmd_glue(doc: &SpecDocument, args: &RunArgs) -> Result<RunReport, RunError> {
    let (name, _) = pick(doc, &doc.gluings, &args.target, "gluing")?;
    let mut rep = RunReport::new("glue", &name);
    let Some(fun) = functor(&mut rep, doc, &name)? else { return Ok(rep) };
    let Some(q) = attempt(&mut rep, "glue", glue(&fun))? else { return Ok(rep) };
    rep.check(format!("overlap relation is an equivalence; glued space has {} points", q.space.len()), true, vec![]);
    glued_sections(&mut rep, &fun, &q);
    Ok(rep)
}

/// The named cone, with its functor and the glued space of its gluing.
fn cone_target(
    rep: &mut RunReport,
    doc: &SpecDocument,
    args: &RunArgs,
) -> Result<Option<(GluingFunctor, Cone, Option<GluedSpace>)>, RunError> {
    let (_, c) = pick(doc, &doc.cones, &args.target, "cone")?;
    let Some(fun) = functor(rep, doc, &c.gluing)? else { return Ok(None) };
    let q = attempt(rep, "glue", glue(&fun))?;
    Ok(Some((fun, c.cone.clone(), q)))
}

/// Target naming either a cone or a gluing; a gluing stands for its glued
/// space with its legs.
fn candidate(
    rep: &mut RunReport,
    doc: &SpecDocument,
    args: &RunArgs,
) -> Result<Option<(GluingFunctor, Cone)>, RunError> {
    if let Some(t) = &args.target {
        if let Some(c) = doc.cones.get(t) {
            let Some(fun) = functor(rep, doc, &c.gluing)? else { return Ok(None) };
            return Ok(Some((fun, c.cone.clone())));
        }
    }
    let (name, _) = pick(doc, &doc.gluings, &args.target, "gluing")?;
    let Some(fun) = functor(rep, doc, &name)? else { return Ok(None) };
    let Some(q) = attempt(rep, "glue", glue(&fun))? else { return Ok(None) };
    Ok(Some((fun, q.cone)))
}

fn target_name(args: &RunArgs, doc: &SpecDocument) -> String {
    args.target.clone().unwrap_or_else(|| doc.names().first().map(|(_, n)| n.to_string()).unwrap_or_default())
}

fn cmd_check_cone(doc: &SpecDocument, args: &RunArgs) -> Result<RunReport, RunError> {
    let (name, _) = pick(doc, &doc.cones, &args.target, "cone")?;
    let mut rep = RunReport::new("check-cone", &name);
    let Some((fun, cone, _)) = cone_target(&mut rep, doc, args)? else { return Ok(rep) };
    for mode in ConeMode::ALL {
        let Some(c) = attempt(&mut rep, mode.name(), check_cone(&fun, &cone, mode))? else { continue };
        rep.expect_none(format!("cone conditions, {} mode ({} checked)", mode.name(), c.checked), c.witnesses);
    }
    Ok(rep)
}

fn cmd_check_glued(doc: &SpecDocument, args: &RunArgs) -> Result<RunReport, RunError> {
    let mut rep = RunReport::new("check-glued", &target_name(args, doc));
    let Some((fun, cone)) = candidate(&mut rep, doc, args)? else { return Ok(rep) };
    let Some(r) = attempt(&mut rep, "properties", check_glued_properties(&fun, &cone))? else { return Ok(rep) };
    for p in r.properties {
        rep.expect_none(p.name, p.witnesses);
    }
    Ok(rep)
}

fn cmd_mediate(doc: &SpecDocument, args: &RunArgs) -> Result<RunReport, RunError> {
    let (name, _) = pick(doc, &doc.cones, &args.target, "cone")?;
    let mut rep = RunReport::new("mediate", &name);
    let Some((_, cone, Some(q))) = cone_target(&mut rep, doc, args)? else { return Ok(rep) };
    let Some(mu) = attempt(&mut rep, "mediating map", mediate(&q.cone, &cone))? else { return Ok(rep) };
    rep.check("mediating map from the glued space exists and is continuous", true, vec![]);
    rep.section(format!("mediating map Q -> {}", cone.apex.id()), map_lines(&mu));
    Ok(rep)
}

fn cmd_verify_universal(doc: &SpecDocument, args: &RunArgs) -> Result<RunReport, RunError> {
    let mut rep = RunReport::new("verify-universal", &target_name(args, doc));
    let Some((fun, cone)) = candidate(&mut rep, doc, args)? else { return Ok(rep) };
    let Some(u) = attempt(&mut rep, "universal property", verify_universal(&fun, &cone, &default_apexes(), args.budget))? else {
        return Ok(rep);
    };
    rep.expect_none("candidate is a cone", u.candidate);
    for a in u.apexes {
        rep.expect_none(format!("apex {}: {} cones, each with exactly one mediating map", a.apex, a.cones), a.failures);
    }
    Ok(rep)
}

fn cmd_check_otop(doc: &SpecDocument, args: &RunArgs) -> Result<RunReport, RunError> {
    let (name, _) = pick(doc, &doc.gluings, &args.target, "gluing")?;
    let mut rep = RunReport::new("check-otop", &name);
    let Some(fun) = functor(&mut rep, doc, &name)? else { return Ok(rep) };
    let Some(q) = attempt(&mut rep, "glue", glue(&fun))? else { return Ok(rep) };
    let o = check_otop(&fun, &q);
    rep.expect_none("anchors and transitions are open maps", o.not_open.clone());
    let mut emb = Vec::new();
    let mut open = Vec::new();
    for (i, r, img_open) in &o.legs {
        if !r.embedding {
            emb.push(format!("leg {i} is not an embedding"));
        }
        if !img_open {
            open.push(format!("image of leg {i} is not open"));
        }
    }
    rep.expect_none("legs are embeddings", emb);
    rep.expect_none("leg images are open", open);
    rep.expect_none("leg images cover", o.uncovered);
    Ok(rep)
}

fn cmd_check_refinement(doc: &SpecDocument, args: &RunArgs) -> Result<RunReport, RunError> {
    let (name, d) = pick(doc, &doc.refinements, &args.target, "refinement")?;
    let mut rep = RunReport::new("check-refinement", &name);
    let r = &d.refinement;
    let Some(nat) = attempt(&mut rep, "naturality", check_refinement(r))? else { return Ok(rep) };
    rep.expect_none(format!("naturality ({} squares)", nat.squares), nat.witnesses);
    if !rep.passed {
        return Ok(rep);
    }
    let Some(fine) = attempt(&mut rep, "glue fine", glue(&r.fine))? else { return Ok(rep) };
    let Some(coarse) = attempt(&mut rep, "glue coarse", glue(&r.coarse))? else { return Ok(rep) };
    let Some(mu) = attempt(&mut rep, "induced map", induced_map(r, &fine, &coarse))? else { return Ok(rep) };
    rep.check(format!("induced map {} -> {} commutes with every leg", d.fine, d.coarse), true, vec![]);
    rep.section("induced map", map_lines(&mu));
    Ok(rep)
}

fn cmd_compose(doc: &SpecDocument, args: &RunArgs) -> Result<RunReport, RunError> {
    let (name, m) = pick(doc, &doc.metas, &args.target, "meta")?;
    let mut rep = RunReport::new("compose", &name);
    let comp = match compose_gdf(&m.data) {
        Ok(c) => c,
        Err(e) if e.is_budget() => return Err(RunError::Budget(e.to_string())),
        Err(e @ RefineError::HypothesisBFailed(..)) => {
            rep.check("glued triples are pullbacks of glued pairs", false, vec![e.to_string()]);
            return Ok(rep);
        }
        Err(e) => {
            rep.check("compose", false, vec![e.to_string()]);
            return Ok(rep);
        }
    };
    for (t, c) in &comp.hypothesis_b {
        rep.check(
            format!("glued triple at {t} is the pullback of the glued pairs ({} points)", c.dom().len()),
            c.is_homeomorphism(),
            vec![],
        );
    }
    rep.check(format!("{} edge maps agree with the composed functor", comp.edge_maps.len()), true, vec![]);
    let mut nodes = Vec::new();
    for (o, q) in &comp.node_glued {
        nodes.push(format!("{o}: {} points ({})", q.space.len(), m.nodes[o]));
    }
    rep.section("glued nodes", nodes);
    let Some(q) = attempt(&mut rep, "glue composed", comp.glue())? else { return Ok(rep) };
    rep.check(format!("composed glued space has {} points", q.space.len()), true, vec![]);
    glued_sections(&mut rep, &comp.functor, &q);
    Ok(rep)
}

fn covering_target(doc: &SpecDocument, args: &RunArgs) -> Result<(String, Covering), RunError> {
    let (name, c) = pick(doc, &doc.coverings, &args.target, "covering")?;
    let c = match args.kind {
        Some(k) => c.with_kind(k),
        None => c.clone(),
    };
    Ok((name, c))
}

fn cmd_cover_check(doc: &SpecDocument, args: &RunArgs) -> Result<RunReport, RunError> {
    let (name, c) = covering_target(doc, args)?;
    let mut rep = RunReport::new("cover-check", &name);
    let r = check_covering(&c);
    rep.expect_none(format!("legs meet the {} covering conditions", c.kind.name()), r.leg_failures);
    rep.expect_none("leg images cover the base", r.uncovered.into_iter().map(|p| format!("{p} is uncovered")).collect());
    Ok(rep)
}

fn cmd_cover_functor(doc: &SpecDocument, args: &RunArgs) -> Result<RunReport, RunError> {
    let (name, c) = covering_target(doc, args)?;
    let mut rep = RunReport::new("cover-functor", &name);
    let Some(g) = attempt(&mut rep, "gluing of the covering", functor_of_covering(&c))? else { return Ok(rep) };
    let why = match &g.from_base {
        Ok(_) if !g.is_iso() => vec!["mediating maps are not mutually inverse".into()],
        Ok(_) => vec![],
        Err(e) => vec![format!("no map back from {}: {e}", c.base.id())],
    };
    rep.expect_none(format!("glued space is homeomorphic to {} via mediating maps", c.base.id()), why);
    rep.expect_none("leg image intersections are the anchored overlaps", g.intersection_failures().to_vec());
    glued_sections(&mut rep, &g.functor, &g.glued);
    rep.section(format!("mediating map Q -> {}", c.base.id()), map_lines(&g.to_base));
    Ok(rep)
}

fn cmd_site_check(doc: &SpecDocument, args: &RunArgs) -> Result<RunReport, RunError> {
    let (name, c) = covering_target(doc, args)?;
    let mut rep = RunReport::new("site-check", &name);
    let r = check_covering(&c);
    if !r.passed() {
        rep.check("input is a covering", false, vec![r.to_string()]);
        return Ok(rep);
    }
    let mut rng = random::rng(args.seed);
    let mut iso = Vec::new();
    if !site_axiom_iso(&SpaceMap::identity(&c.base)) {
        iso.push(format!("identity of {} is not a covering", c.base.id()));
    }
    let homeos = attempt(&mut rep, "automorphisms", enumerate_homeomorphisms(&c.base, &c.base, args.budget))?.unwrap_or_default();
    for h in &homeos {
        if !site_axiom_iso(h) {
            iso.push(format!("{h} is not a covering"));
        }
    }
    rep.expect_none(format!("homeomorphisms are coverings ({} checked)", homeos.len() + 1), iso);
    let mut comp = Vec::new();
    for round in 0..4 {
        let subs = if round == 0 {
            c.legs.iter().map(|(i, l)| (i.clone(), Covering::identity(l.dom(), c.kind))).collect()
        } else {
            random::random_subcoverings(&mut rng, &c)
        };
        let Some((_, r)) = attempt(&mut rep, "composite covering", site_axiom_compose(&c, &subs))? else { return Ok(rep) };
        if !r.passed() {
            comp.push(r.to_string());
        }
    }
    rep.expect_none("composites of coverings are coverings (4 families)", comp);
    let mut base = Vec::new();
    let mut kinds = Vec::new();
    for k in 0..6 {
        let phi = if k == 0 {
            SpaceMap::identity(&c.base)
        } else {
            use rand::Rng;
            let n = rng.random_range(1..=4);
            let v = random::random_space(&mut rng, n, "V");
            random::random_continuous_map(&mut rng, &v, &c.base)
        };
        let Some((out, r)) = attempt(&mut rep, "base change", site_axiom_basechange(&c, &phi))? else { return Ok(rep) };
        if !r.passed() {
            base.push(format!("along {phi}: {r}"));
        }
        if out.kind != c.kind {
            kinds.push(format!("along {phi}: kind became {}", out.kind.name()));
        }
    }
    rep.expect_none("base changes are coverings (6 maps)", base);
    rep.expect_none("base change keeps the covering kind", kinds);
    Ok(rep)
}

fn cmd_render_dot(doc: &SpecDocument, args: &RunArgs) -> Result<RunReport, RunError> {
    let target = args.target.clone().ok_or_else(|| RunError::UnknownTarget("render-dot needs a target".into()))?;
    let mut rep = RunReport::new("render-dot", &target);
    let text = if let Some(ix) = target.strip_prefix("index:") {
        let ix: Vec<&str> = ix.split(',').map(str::trim).filter(|s| !s.is_empty()).collect();
        dot::index_dot(&ix).map_err(|e| RunError::Input(e.to_string()))?
    } else if let Some(gd) = doc.gluings.get(&target) {
        let Some(fun) = attempt(&mut rep, "gluing data functor", functor_of(gd))? else { return Ok(rep) };
        dot::gluing_dot(&target, &fun)
    } else if let Some(m) = doc.metas.get(&target) {
        dot::meta_dot(&target, m)
    } else {
        return Err(RunError::UnknownTarget(format!("{target} is not index:..., a gluing or a meta-gluing")));
    };
    rep.output = Some(text);
    Ok(rep)
}
