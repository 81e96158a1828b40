//! Regenerates the bundled fixture documents.
//!
//! cargo run -p orbispark --example gen_fixtures -- crates/orbispark/fixtures

use std::path::PathBuf;
use std::sync::Arc;

use orbispark::format::{document, to_json, Loaded, NamedCochain};
use orbispark_core::atlas::GoodAtlas;
use orbispark_core::cochain::{total_d, Cochain, Domain, OrderedCochain};
use orbispark_core::fixtures;
use orbispark_core::indexcomb::IndexString;
use orbispark_core::polyform::{integer, PolyForm, Polynomial};

fn named(name: &str, c: &Cochain) -> NamedCochain {
    NamedCochain { name: name.to_string(), value: OrderedCochain::from_cochain(c, c.max_len()) }
}

fn on_every_chart(atlas: &Arc<GoodAtlas>, f: &PolyForm) -> Cochain {
    let mut c = Cochain::zero(atlas.clone(), Domain::Subsets);
    for &i in atlas.nonempty_indices() {
        c.insert(&IndexString::single(i), f.clone()).expect("invariant");
    }
    c
}

fn s1_cochains(a: &Arc<GoodAtlas>) -> Vec<NamedCochain> {
    let winding = fixtures::s1_winding_spark(a).expect("s1-arcs");
    let one = on_every_chart(a, &PolyForm::constant(1, integer(1)));
    let mut step = Cochain::zero(a.clone(), Domain::Subsets);
    for (v, k) in [("1", 0), ("2", 1), ("3", 2)] {
        let i = a.vertices().subset(&[v]).expect("vertex");
        step.insert(&IndexString::single(i), PolyForm::constant(1, integer(k))).expect("constant");
    }
    let x2 = Polynomial::var(1, 0).mul_poly(&Polynomial::var(1, 0));
    let exact = total_d(&on_every_chart(a, &PolyForm::function(x2)));
    let mut dx = Cochain::zero(a.clone(), Domain::Subsets);
    for &i in a.nonempty_indices() {
        dx.insert(&IndexString::single(i), PolyForm::dx(1, 0)).expect("invariant");
    }
    vec![
        named("zero", &Cochain::zero(a.clone(), Domain::Subsets)),
        named("winding", &winding),
        named("winding-shifted", &winding.add(&one).expect("same atlas")),
        named("step", &step),
        named("dx", &dx),
        named("exact", &exact),
    ]
}

fn main() {
    let dir = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "crates/orbispark/fixtures".into()));
    std::fs::create_dir_all(&dir).expect("fixture directory");

    let s1 = Arc::new(fixtures::s1_arcs());
    let mirror = fixtures::mirror_morphisms();
    let chain = fixtures::chain();
    let docs = [
        ("s1-arcs.json", Loaded { cochains: s1_cochains(&s1), atlases: vec![s1], ..Loaded::default() }),
        (
            "mirror-interval.json",
            Loaded {
                atlases: vec![mirror.atlas.clone()],
                systems: vec![mirror.id.clone(), mirror.tw.clone()],
                transformations: vec![mirror.flip.clone(), mirror.unflip.clone()],
                ..Loaded::default()
            },
        ),
        ("cone-z4.json", Loaded { atlases: vec![Arc::new(fixtures::cone_z4())], ..Loaded::default() }),
        (
            "chain.json",
            Loaded {
                atlases: vec![chain.u.clone(), chain.v.clone(), chain.w.clone()],
                systems: vec![chain.f0.clone(), chain.f1.clone(), chain.f2.clone(), chain.g1.clone(), chain.g2.clone()],
                transformations: vec![chain.gamma.clone(), chain.alpha.clone(), chain.beta.clone()],
                ..Loaded::default()
            },
        ),
    ];
    for (file, loaded) in docs {
        let path = dir.join(file);
        std::fs::write(&path, to_json(&document(&loaded))).expect("write fixture");
        println!("wrote {}", path.display());
    }
}
