//! The spec files under `fixtures/` are generated from the in-code fixtures.
//! Run with `GLUING_REGENERATE=1` to rewrite them after a deliberate change.

use std::path::PathBuf;

use gluing::spec::{parse_spec, serialize_spec, ParseOptions, SpecDocument};
use gluing_core::fixtures;

fn path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

fn generated() -> Vec<(&'static str, SpecDocument)> {
    let mut torus = SpecDocument::default();
    torus.add_meta("torus", &fixtures::torus_meta());
    torus.add_meta("torus_extra", &fixtures::torus_meta_with_extra_point());
    torus.add_gluing("flat", &fixtures::torus_flat());

    let mut broken = SpecDocument::default();
    broken.add_gluing("broken", &fixtures::broken_projection_data());

    let mut swapped = SpecDocument::default();
    swapped.add_gluing("swapped", &fixtures::corrupted_cocycle());

    let mut coverings = SpecDocument::default();
    coverings.add_covering("c4_two_arcs", &fixtures::c4_two_arcs());
    coverings.add_covering("sq9_two_strips", &fixtures::sq9_two_strips());

    let mut collapse = SpecDocument::default();
    let (r, _, _) = fixtures::point_pair_into_circle();
    collapse.add_refinement("collapse", "pair", "circ", &r);

    vec![
        ("torus.toml", torus),
        ("broken_cocycle.toml", broken),
        ("swapped_transitions.toml", swapped),
        ("coverings.toml", coverings),
        ("collapse.toml", collapse),
    ]
}

#[test]
fn spec_files_match_fixtures() {
    let regenerate = std::env::var_os("GLUING_REGENERATE").is_some();
    for (file, doc) in generated() {
        let text = serialize_spec(&doc).unwrap();
        let back = parse_spec(&text, ParseOptions::default()).unwrap_or_else(|e| panic!("{file}: {e}"));
        assert_eq!(serialize_spec(&back).unwrap(), text, "{file} does not round trip");
        assert!(back.deferred.is_empty(), "{file}: {:?}", back.deferred);
        if regenerate {
            std::fs::write(path(file), &text).unwrap();
        } else {
            let on_disk = std::fs::read_to_string(path(file)).unwrap_or_else(|e| panic!("{file}: {e}"));
            assert_eq!(on_disk, text, "{file} is stale; rerun with GLUING_REGENERATE=1");
        }
    }
}
