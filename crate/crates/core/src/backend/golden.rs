use std::collections::BTreeSet;

use super::locals::free_names;
use super::*;
use crate::checker::check;
use crate::frontend::{inject, parse_data, parse_data_file, parse_model, parse_model_file};
use crate::ir::PivotModel;
use crate::passes::{run_chain, PassId};

fn golfers() -> PivotModel {
    let m = parse_model_file("golfers.scm", include_str!("../../../../corpus/golfers.scm")).unwrap();
    let d = parse_data_file("golfers.scd", include_str!("../../../../corpus/golfers.scd")).unwrap();
    inject(&m, &d).unwrap()
}

fn flat(model: &PivotModel, chain: &[PassId]) -> PivotModel {
    assert_eq!(check(model), vec![]);
    run_chain(model, chain).unwrap().model
}

fn flat_golfers() -> PivotModel {
    flat(&golfers(), &[PassId::FlattenClasses, PassId::FlattenRecords, PassId::RemoveEnums])
}

fn program(model: &PivotModel) -> EclModel {
    introduce_locals(&to_eclipse(model).unwrap())
}

fn model(src: &str, data: &str) -> PivotModel {
    inject(&parse_model(src).unwrap(), &parse_data(data).unwrap()).unwrap()
}

#[test]
fn golfers_program_matches_golden_file() {
    let text = emit(&program(&flat_golfers()));
    assert_eq!(text, include_str!("../../../../corpus/golden/golfers.ecl"));
}

#[test]
fn golfers_program_shape() {
    let ecl = program(&flat_golfers());
    let p = &ecl.predicates[0];
    assert_eq!(p.name, "socialGolfers");
    assert_eq!(p.params, vec!["L"]);
    assert_eq!(p.body[3], EclAtom::IntsetsDecl { list_var: "WEEKS_GROUPS_PLAYERS".into(), count: 12, lo: 1, hi: 9 });
    assert_eq!(loop_depth(&p.body[5]), 4);
    assert_eq!(loop_depth(&p.body[6]), 3);
    assert_eq!(p.body.last(), Some(&EclAtom::LabelSets { list: "L".into() }));
    let c = atom_census(&p.body);
    assert_eq!((c.const_binds, c.nth_calls, c.card_binds, c.is_binds), (3, 5, 3, 5));
}

fn check_params(atoms: &[EclAtom], visible: &BTreeSet<String>) {
    let mut visible = visible.clone();
    for a in atoms {
        if let EclAtom::ForLoop { iter, params, body, .. } = a {
            let mut inside: BTreeSet<String> = params.iter().cloned().collect();
            inside.insert(iter.clone());
            for n in free_names(body) {
                assert!(inside.contains(&n), "`{n}` read in loop over {iter} but not passed in");
            }
            for p in params {
                assert!(visible.contains(p), "param `{p}` of loop over {iter} is not bound outside");
            }
            check_params(body, &inside);
        }
        visible.extend(free_names(std::slice::from_ref(a)));
        match a {
            EclAtom::ConstBind { name, .. } | EclAtom::ListAlias { name, .. } | EclAtom::CollectVars { name, .. } => {
                visible.insert(name.clone());
            }
            EclAtom::IntsetsDecl { list_var, .. } => {
                visible.insert(list_var.clone());
            }
            EclAtom::IntsetDecl { var, .. } | EclAtom::DomainDecl { var, .. } | EclAtom::ArrayDecl { var, .. } => {
                visible.insert(var.clone());
            }
            _ => {}
        }
    }
}

#[test]
fn loop_params_are_exactly_what_bodies_need() {
    let ecl = program(&flat_golfers());
    let head: BTreeSet<String> = ecl.predicates[0].params.iter().cloned().collect();
    check_params(&ecl.predicates[0].body, &head);
}

fn queens(n: i64) -> PivotModel {
    model(
        "main class Queens { int q[n] in [1, n]; constraint noAttack { \
         forall(i in 1..n) { forall(j in i+1..n) { \
         q[i] != q[j]; q[i]-q[j] != j-i; q[j]-q[i] != j-i; } } } }",
        &format!("int n := {n};"),
    )
}

#[test]
fn integer_models_use_arrays_and_labeling() {
    let text = emit(&program(&flat(&queens(5), &[PassId::FlattenClasses])));
    assert!(text.starts_with("queens(L):-\n N is 5,\n dim(Q,[5]),\n Q :: 1..5,\n term_variables([Q],L),\n"), "{text}");
    assert!(text.contains("(for(I,1,N), param(N,Q) do"), "{text}");
    assert!(text.contains("Q[I]-Q[J] #\\= J-I"), "{text}");
    assert!(text.ends_with(" labeling(L).\n"), "{text}");
}

#[test]
fn unrolled_queens_have_no_loops() {
    let m = flat(&queens(4), &[PassId::FlattenClasses, PassId::UnrollLoops]);
    let ecl = program(&m);
    let c = atom_census(&ecl.predicates[0].body);
    assert_eq!(c.loops, 0);
    assert_eq!(c.constraints, 18);
}

#[test]
fn locals_avoid_names_already_in_use() {
    let m = model(
        "main class M { int set v1[2] in [1, 3]; int k in [1, 2]; \
         constraint c { card(v1[k+1] intersect v1[k+1]) >= k; } }",
        "",
    );
    let m = flat(&m, &[PassId::FlattenClasses]);
    let err = to_eclipse(&m).unwrap_err();
    assert!(matches!(err, BackendError::UnsupportedConstruct { .. }));

    let m = model(
        "main class M { int set v1[2] in [1, 3]; constraint c { forall(v2 in 1..1) { \
         card(v1[v2+1] intersect v1[v2+1]) >= 1; card(v1[v2]) = 2; } } }",
        "",
    );
    let ecl = program(&flat(&m, &[PassId::FlattenClasses]));
    let text = emit(&ecl);
    // one index local and one element local for the repeated access
    assert!(text.contains("V3 is V2+1,\n  nth(V4,V3,L),\n  #(V4 /\\ V4,V5),\n  V5 #>= 1,\n  nth(V6,V2,L),\n  #(V6,2)"), "{text}");
}

#[test]
fn locals_restart_at_one_per_run() {
    let flat = flat_golfers();
    let a = emit(&program(&flat));
    let b = emit(&program(&flat));
    assert_eq!(a, b);
    assert!(a.contains("V1 is"));
}

#[test]
fn unflattened_constructs_are_rejected() {
    let cases = [
        golfers(),
        flat(&golfers(), &[PassId::FlattenClasses]),
        flat(&golfers(), &[PassId::FlattenClasses, PassId::FlattenRecords]),
        model("main class M { int x in [0, 1]; constraint c { if (x > 0) { x < 2; } } }", ""),
        model("main class M { int m[2,2] in [0, 1]; }", ""),
    ];
    for (k, m) in cases.iter().enumerate() {
        let m = if k >= 3 { flat(m, &[PassId::FlattenClasses]) } else { m.clone() };
        assert!(
            matches!(to_eclipse(&m), Err(BackendError::UnsupportedConstruct { .. })),
            "case {k}"
        );
    }
}

#[test]
fn model_without_variables_only_labels() {
    let m = model("main class M { }", "");
    let text = emit(&program(&flat(&m, &[PassId::FlattenClasses])));
    assert_eq!(text, "m(L):- label_sets(L).\n");
}
