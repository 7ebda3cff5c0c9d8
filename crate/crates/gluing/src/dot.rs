//! DOT rendering of index categories, gluings and meta-gluings. Output
//! order follows the sorted object and generator lists, so equal inputs
//! give identical text.

use std::fmt::Write;

use gluing_core::fintop::SpaceMap;
use gluing_core::gdata::GluingFunctor;
use gluing_core::glidx::{IndexCategory, IndexError};
use gluing_core::glue::glue;

use crate::spec::MetaDecl;

fn esc(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

fn table(m: &SpaceMap) -> String {
    m.pairs().iter().map(|(a, b)| format!("{a}->{b}")).collect::<Vec<_>>().join(", ")
}

/// Objects as nodes and non-identity generators as edges, in the
/// direction of the index category.
pub fn index_dot<S: AsRef<str>>(index: &[S]) -> Result<String, IndexError> {
    let cat = IndexCategory::new(index)?;
    let mut out = String::new();
    let _ = writeln!(out, "digraph \"Gl({})\" {{", esc(&cat.index().join(",")));
    let _ = writeln!(out, "  rankdir=LR;");
    for o in cat.objects() {
        let _ = writeln!(out, "  \"{}\";", esc(&o.to_string()));
    }
    for g in cat.generators() {
        if g.dom() != g.cod() {
            let _ = writeln!(out, "  \"{}\" -> \"{}\" [label=\"{}\"];", esc(&g.dom().to_string()), esc(&g.cod().to_string()), esc(&g.label()));
        }
    }
    out.push_str("}\n");
    Ok(out)
}

/// Every object with its space, generator images drawn the way the maps
/// go, and the legs into the glued space when gluing succeeds.
pub fn gluing_dot(name: &str, fun: &GluingFunctor) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "digraph \"{}\" {{", esc(name));
    let _ = writeln!(out, "  rankdir=LR;");
    for (o, s) in fun.objects() {
        let _ = writeln!(out, "  \"{}\" [label=\"{}\\n{} ({} points)\"];", esc(&o.to_string()), esc(&o.to_string()), esc(s.id()), s.len());
    }
    for (g, m) in fun.generator_images() {
        if g.dom() == g.cod() {
            continue;
        }
        let _ = writeln!(
            out,
            "  \"{}\" -> \"{}\" [label=\"{}\\n{}\"];",
            esc(&g.cod().to_string()),
            esc(&g.dom().to_string()),
            esc(&g.label()),
            esc(&table(m))
        );
    }
    if let Ok(q) = glue(fun) {
        let _ = writeln!(out, "  \"glued\" [shape=box, label=\"glued ({} points)\"];", q.space.len());
        for i in fun.index() {
            let _ = writeln!(out, "  \"[{}]\" -> \"glued\" [style=bold, label=\"iota({})\\n{}\"];", esc(i), esc(i), esc(&table(q.leg(i))));
        }
    }
    out.push_str("}\n");
    out
}

/// The meta index category with each object labelled by its node gluing
/// and each edge by its refinement.
pub fn meta_dot(name: &str, meta: &MetaDecl) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "digraph \"{}\" {{", esc(name));
    let _ = writeln!(out, "  rankdir=LR;");
    for (o, g) in &meta.nodes {
        let _ = writeln!(out, "  \"{}\" [label=\"{}\\n{}\"];", esc(&o.to_string()), esc(&o.to_string()), esc(g));
    }
    for (g, r) in &meta.edges {
        if g.dom() == g.cod() {
            continue;
        }
        let _ = writeln!(
            out,
            "  \"{}\" -> \"{}\" [label=\"{}\\n{}\"];",
            esc(&g.cod().to_string()),
            esc(&g.dom().to_string()),
            esc(&g.label()),
            esc(r)
        );
    }
    out.push_str("}\n");
    out
}
