//! Printing a pivot model and reading it back gives the same model.

mod common;

use common::{corpus_source, corpus_stems, load};
use cpforge::frontend::{extract_source, inject, parse_data, parse_model};
use cpforge::ir::PivotModel;
use cpforge::passes::{run_chain, PassId};

fn reread(m: &PivotModel) -> PivotModel {
    let x = extract_source(m);
    let model = parse_model(&x.model).unwrap_or_else(|e| panic!("{e}\n{}", x.model));
    let data = parse_data(&x.data).unwrap_or_else(|e| panic!("{e}\n{}", x.data));
    inject(&model, &data).unwrap_or_else(|e| panic!("{e:?}\n{}", x.model))
}

fn accepted() -> Vec<String> {
    let mut stems = corpus_stems("clean");
    stems.push("golfers".into());
    stems.push("golden/golfers_flat".into());
    stems
}

#[test]
fn corpus_models_survive_a_print_and_reread() {
    for stem in accepted() {
        let m = load(&stem);
        let once = reread(&m);
        assert_eq!(once, m, "{stem}");
        assert_eq!(extract_source(&reread(&once)), extract_source(&once), "{stem}");
    }
}

#[test]
fn pass_outputs_survive_a_print_and_reread() {
    let chains: [&[PassId]; 4] = [
        &[PassId::FlattenClasses],
        &[PassId::FlattenClasses, PassId::FlattenRecords],
        &[PassId::FlattenClasses, PassId::FlattenRecords, PassId::RemoveEnums, PassId::RemoveIf],
        &[PassId::RemoveIf, PassId::UnrollLoops, PassId::SimplifyConstants, PassId::FlattenMatrices],
    ];
    for stem in accepted() {
        for chain in chains {
            let out = run_chain(&load(&stem), chain).unwrap().model;
            assert_eq!(reread(&out), out, "{stem} after {chain:?}");
        }
    }
}

#[test]
fn reprinting_is_idempotent_on_text() {
    for stem in accepted() {
        let src = corpus_source(&stem);
        let first = extract_source(&load(&stem));
        let second = extract_source(&reread(&load(&stem)));
        assert_eq!(first, second, "{stem} ({} lines)", src.line_count());
    }
}
