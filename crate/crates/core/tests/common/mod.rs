//! Shared corpus access, model generators and the pass-equivalence suite.
#![allow(dead_code)]

use std::path::PathBuf;

use proptest::prelude::*;
use proptest::strategy::ValueTree;
use proptest::test_runner::TestRunner;

use cpforge::checker::check;
use cpforge::frontend::{inject, parse_data_file, parse_model_file};
use cpforge::ir::PivotModel;
use cpforge::oracle::{equivalent, Instance};
use cpforge::passes::{run_chain, PassId};
use cpforge::pipeline::SourceText;

pub fn corpus_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus")
}

/// Model and data text of a corpus entry such as `clean/queens`.
pub fn corpus_source(stem: &str) -> SourceText {
    let model = corpus_dir().join(format!("{stem}.scm"));
    let data = corpus_dir().join(format!("{stem}.scd"));
    let data = data.exists().then_some(data);
    let mut src = SourceText::read(&model, data.as_deref()).unwrap();
    // locations name the file only, as when run from the corpus directory
    src.model_file = format!("{}.scm", stem.rsplit('/').next().unwrap());
    src.data_file = format!("{}.scd", stem.rsplit('/').next().unwrap());
    src
}

/// Stems of every model in a corpus subdirectory, sorted.
pub fn corpus_stems(dir: &str) -> Vec<String> {
    let mut stems: Vec<String> = std::fs::read_dir(corpus_dir().join(dir))
        .unwrap()
        .filter_map(|e| {
            let name = e.unwrap().file_name().into_string().unwrap();
            name.strip_suffix(".scm").map(|s| format!("{dir}/{s}"))
        })
        .collect();
    stems.sort();
    stems
}

pub fn load_text(model: &str, data: &str) -> PivotModel {
    let m = parse_model_file("m.scm", model).unwrap_or_else(|e| panic!("{e}\n{model}"));
    let d = parse_data_file("d.scd", data).unwrap_or_else(|e| panic!("{e}\n{data}"));
    let pivot = inject(&m, &d).unwrap_or_else(|e| panic!("{e:?}\n{model}"));
    let errors: Vec<_> = check(&pivot).into_iter().filter(|p| p.is_error()).collect();
    assert!(errors.is_empty(), "{errors:?}\n{model}\n{data}");
    pivot
}

pub fn load(stem: &str) -> PivotModel {
    let src = corpus_source(stem);
    load_text(&src.model, &src.data)
}

/// Fixture, expected location, expected wording.
pub const DEFECTS: [(&str, &str, &str); 6] = [
    ("operator_mismatch", "operator_mismatch.scm:5:3", "operator `+` does not apply to int and bool"),
    ("chained_equality", "chained_equality.scm:6:3", "several equalities"),
    ("nonconstant_bound", "nonconstant_bound.scm:3:2", "must be based on constant expressions"),
    ("inverted_interval", "inverted_interval.scm:2:2", "empty domain"),
    ("inheritance_cycle", "inheritance_cycle.scm:1:1", "cycle through A, B"),
    ("composition_cycle", "composition_cycle.scm:4:1", "cycle through Node, Leaf"),
];


/// Passes that must run before `pass` for its input to be meaningful.
pub fn prerequisites(pass: PassId) -> Vec<PassId> {
    match pass {
        PassId::FlattenRecords | PassId::FlattenMatrices => vec![PassId::FlattenClasses],
        _ => vec![],
    }
}

/// Runs `pass` on `model` (after its prerequisites) and compares solution
/// sets through the pass's name map. `Err` carries a readable reason.
pub fn pass_preserves_solutions(pass: PassId, model: &PivotModel) -> Result<(usize, bool), String> {
    let input = run_chain(model, &prerequisites(pass)).map_err(|e| e.to_string())?.model;
    let out = pass.run(&input).map_err(|e| format!("{}: {e}", pass.token()))?;
    let changed = out.model != input;
    let e = equivalent(&input, &out.model, &out.names, &Instance::default()).map_err(|e| e.to_string())?;
    if e.equal {
        Ok((e.left, changed))
    } else {
        Err(format!(
            "{} changed the solutions ({} before, {} after); witness {:?}",
            pass.token(),
            e.left,
            e.right,
            e.witness
        ))
    }
}

/// Hand-written models exercising each pass: `(model, data)` text.
pub fn hand_written(pass: PassId) -> Vec<(String, String)> {
    let corpus = |stem: &str| {
        let s = corpus_source(stem);
        (s.model, s.data)
    };
    let text = |m: &str, d: &str| (m.to_string(), d.to_string());
    match pass {
        PassId::FlattenClasses | PassId::FlattenRecords => vec![
            corpus("clean/golfers_small"),
            corpus("clean/engine"),
            corpus("clean/schedule"),
            text(
                "main class M { P ps[2]; constraint c { ps[1].v < ps[2].v; } } \
                 class P { int v in [0, 2]; bool on; constraint c { on implies v > 0; } }",
                "",
            ),
            text(
                "main class M { Outer o; int t in [0, 3]; constraint c { o.i.x + o.y = t; } } \
                 class Outer { Inner i; int y in [0, 1]; } class Inner { int x in [1, 2]; }",
                "",
            ),
            text(
                "abstract class Shape { int side in [1, 3]; } \
                 class Square extends Shape { constraint c { side != 2; } } \
                 main class M { Square s[2]; constraint c { s[1].side + s[2].side = 4; } }",
                "",
            ),
        ],
        PassId::RemoveEnums => vec![
            corpus("clean/marriage"),
            corpus("clean/golfers_small"),
            text("main class M { Color c; Color d; constraint k { c < d; d != blue; } }", "enum Color := {red, green, blue};"),
            text("main class M { Color c[2]; constraint k { c[1] = c[2] implies c[1] = red; } }", "enum Color := {red, green};"),
            text("main class M { Color set s; constraint k { card(s) = 2; } }", "enum Color := {red, green, blue};"),
            text("main class M { Size z in {s, l}; int q in [0, 2]; constraint k { z = l or q = 0; } }", "enum Size := {s, m, l};"),
        ],
        PassId::RemoveIf => vec![
            corpus("clean/engine"),
            corpus("clean/marriage"),
            corpus("clean/schedule"),
            text("main class M { int x in [0, 3]; bool b; constraint c { if (b) { x > 1; } else { x < 1; } } }", ""),
            text(
                "main class M { int x in [0, 2]; int y in [0, 2]; constraint c { \
                 if (x = 1) { if (y > 0) { x + y = 3; } else { y = 0; } } } }",
                "",
            ),
            text(
                "main class M { int a[2] in [0, 2]; constraint c { forall(i in 1..2) { \
                 if (a[i] > 0) { a[i] != i; a[i] <= 1; } } } }",
                "",
            ),
        ],
        PassId::UnrollLoops => vec![
            corpus("clean/queens"),
            corpus("clean/golfers_small"),
            corpus("clean/schedule"),
            text("main class M { int a[3] in [0, 2]; constraint c { forall(i in 1..2) { a[i] < a[i+1]; } } }", ""),
            text(
                "main class M { int a[3] in [0, 1]; constraint c { forall(i in 1..n) { \
                 forall(j in i+1..n) { a[i] + a[j] <= 1; } } } }",
                "int n := 3;",
            ),
            text(
                "main class M { int a[2] in [0, 3]; bool b; constraint c { forall(i in 1..2) { \
                 if (b) { a[i] = i; } } forall(k in 3..1) { a[1] = 99; } } }",
                "",
            ),
        ],
        PassId::SimplifyConstants => vec![
            corpus("clean/engine"),
            corpus("clean/queens"),
            corpus("clean/schedule"),
            text(
                "main class M { int x in [0, k*2]; constraint c { x + (k - 2) * 5 >= k; true or x = 1; x != k - 2; } }",
                "int k := 2;",
            ),
            text(
                "main class M { int a[n+1] in [0, 2]; bool b; constraint c { \
                 b and (n > 1) implies a[n] = 1; not (n = 2) or a[1] < a[3]; } }",
                "int n := 2;",
            ),
            text(
                "main class M { int x in [0, 3]; constraint c { x / 2 = k / 3; false implies x = 0; } }",
                "int k := 4;",
            ),
        ],
        PassId::FlattenMatrices => vec![
            corpus("clean/schedule"),
            text("main class M { int m[2, 2] in [0, 1]; constraint c { m[1, 1] + m[2, 2] = 1; m[1, 2] != m[2, 1]; } }", ""),
            text(
                "main class M { int m[r, c] in [0, 1]; constraint k { forall(i in 1..r) { \
                 m[i, 1] + m[i, c] = 1; } } }",
                "int r := 2; int c := 2;",
            ),
            text(
                "model G; int g[2, 2] in [1, 2]; constraint diag { g[1, 1] = g[2, 2]; \
                 forall(j in 1..2) { g[1, j] <= g[2, j]; } }",
                "",
            ),
            text(
                "main class M { bool m[2, 2]; int x in [0, 1]; constraint c { \
                 m[1, 1] or m[2, 2]; m[1, 2] implies x = 1; } }",
                "",
            ),
        ],
    }
}

fn int_term(atoms: Vec<String>, depth: u32) -> BoxedStrategy<String> {
    let leaf = prop_oneof![
        3 => proptest::sample::select(atoms),
        1 => (0i64..4).prop_map(|v| v.to_string()),
    ];
    leaf.prop_recursive(depth, 8, 2, |inner| {
        (inner.clone(), proptest::sample::select(vec!["+", "-", "*"]), inner)
            .prop_map(|(l, op, r)| format!("({l} {op} {r})"))
    })
    .boxed()
}

fn bool_expr(ints: Vec<String>, bools: Vec<String>) -> BoxedStrategy<String> {
    let cmp = (
        int_term(ints.clone(), 1),
        proptest::sample::select(vec!["=", "!=", "<", "<=", ">", ">="]),
        int_term(ints, 1),
    )
        .prop_map(|(l, op, r)| format!("{l} {op} {r}"));
    let leaf = if bools.is_empty() {
        cmp.boxed()
    } else {
        prop_oneof![3 => cmp, 1 => proptest::sample::select(bools)].boxed()
    };
    leaf.prop_recursive(2, 6, 2, |inner| {
        prop_oneof![
            (inner.clone(), proptest::sample::select(vec!["and", "or", "implies"]), inner.clone())
                .prop_map(|(l, op, r)| format!("({l}) {op} ({r})")),
            inner.prop_map(|e| format!("not ({e})")),
        ]
    })
    .boxed()
}

fn domain() -> impl Strategy<Value = (i64, i64)> {
    (0i64..3, 0i64..4).prop_map(|(lo, w)| (lo, lo + w))
}

/// Generated `(model, data)` text for models that exercise `pass`: at most
/// four declared variables, integer domains at most four wide and set
/// universes of at most four values.
pub fn generated_strategy(pass: PassId) -> BoxedStrategy<(String, String)> {
    match pass {
        PassId::FlattenClasses | PassId::FlattenRecords => (
            domain(),
            domain(),
            any::<bool>(),
            1usize..3,
        )
            .prop_flat_map(|((xl, xh), (yl, yh), inherit, copies)| {
                let obj = if copies == 1 { "o" } else { "os[1]" };
                let outer = vec!["x".to_string(), format!("{obj}.y"), format!("{obj}.z")];
                let inner = vec!["y".to_string(), "z".to_string()];
                (bool_expr(outer, vec![]), bool_expr(inner, vec![])).prop_map(move |(top, own)| {
                    let decl = if copies == 1 { "C o;".to_string() } else { format!("C os[{copies}];") };
                    let (base, ext) = if inherit {
                        (format!("class B {{ int y in [{yl}, {yh}]; }}\n"), " extends B")
                    } else {
                        (String::new(), "")
                    };
                    let y = if inherit { String::new() } else { format!("int y in [{yl}, {yh}]; ") };
                    let model = format!(
                        "main class M {{ int x in [{xl}, {xh}]; {decl} constraint top {{ ({top}) or x = {xl}; }} }}\n\
                         {base}class C{ext} {{ {y}int z in [0, 1]; constraint own {{ ({own}) or z = 0; }} }}\n"
                    );
                    (model, String::new())
                })
            })
            .boxed(),
        PassId::RemoveEnums => (2usize..4, any::<bool>())
            .prop_flat_map(|(n, with_set)| {
                let lits: Vec<String> = ["red", "green", "blue"][..n].iter().map(|s| s.to_string()).collect();
                let atoms = {
                    let mut a = vec!["c".to_string(), "d".to_string()];
                    a.extend(lits.iter().cloned());
                    a
                };
                (
                    proptest::sample::select(atoms.clone()),
                    proptest::sample::select(vec!["=", "!=", "<", ">="]),
                    proptest::sample::select(atoms),
                    bool_expr(vec!["x".into()], vec![]),
                )
                    .prop_map(move |(l, op, r, extra)| {
                        let set = if with_set { " Color set s; " } else { " " };
                        let card = if with_set { " card(s) >= 1;" } else { "" };
                        let model = format!(
                            "main class M {{ Color c; Color d;{set}int x in [0, 2]; \
                             constraint k {{ {l} {op} {r}; ({l} = {r}) implies ({extra});{card} }} }}"
                        );
                        (model, format!("enum Color := {{{}}};", lits.join(", ")))
                    })
            })
            .boxed(),
        PassId::RemoveIf => (domain(), domain(), any::<bool>(), any::<bool>())
            .prop_flat_map(|((xl, xh), (yl, yh), with_else, nested)| {
                let ints = vec!["x".to_string(), "y".to_string()];
                let b = bool_expr(ints.clone(), vec!["b".into()]);
                (b.clone(), b.clone(), b.clone(), b).prop_map(move |(cond, t, e, inner)| {
                    let then_body = if nested { format!("if ({inner}) {{ {t}; }}") } else { format!("{t};") };
                    let else_body = if with_else { format!(" else {{ {e}; }}") } else { String::new() };
                    let model = format!(
                        "main class M {{ int x in [{xl}, {xh}]; int y in [{yl}, {yh}]; bool b; \
                         constraint c {{ if ({cond}) {{ {then_body} }}{else_body} }} }}"
                    );
                    (model, String::new())
                })
            })
            .boxed(),
        PassId::UnrollLoops => (2i64..4, domain(), any::<bool>())
            .prop_flat_map(|(n, (lo, hi), nested)| {
                let atoms = vec!["a[i]".to_string(), "i".to_string(), "a[1]".to_string()];
                bool_expr(atoms, vec![]).prop_map(move |body| {
                    let inner = if nested {
                        format!("forall(j in i+1..n) {{ a[i] != a[j] or ({body}); }}")
                    } else {
                        format!("{body};")
                    };
                    let model = format!(
                        "main class M {{ int a[n] in [{lo}, {hi}]; constraint c {{ forall(i in 1..n) {{ {inner} }} }} }}"
                    );
                    (model, format!("int n := {n};"))
                })
            })
            .boxed(),
        PassId::SimplifyConstants => (0i64..3, 1i64..3, domain())
            .prop_flat_map(|(k, m, (lo, hi))| {
                let ints = vec!["x".to_string(), "k".to_string(), "m".to_string(), "(k * m)".to_string()];
                (bool_expr(ints.clone(), vec!["t".into()]), bool_expr(ints, vec!["t".into()])).prop_map(
                    move |(a, b)| {
                        let model = format!(
                            "main class M {{ int x in [{lo}, {hi} + k]; constraint c {{ {a}; ({b}) or x = {lo}; }} }}"
                        );
                        (model, format!("int k := {k}; int m := {m}; bool t := true;"))
                    },
                )
            })
            .boxed(),
        PassId::FlattenMatrices => (1i64..3, 2i64..3, 0i64..2)
            .prop_flat_map(|(r, c, lo)| {
                let atoms = vec!["m[1, 1]".to_string(), format!("m[{r}, {c}]"), "m[1, c]".to_string(), "x".into()];
                bool_expr(atoms, vec![]).prop_map(move |body| {
                    let model = format!(
                        "main class M {{ int m[r, c] in [{lo}, {}]; int x in [0, 1]; \
                         constraint k {{ {body}; forall(j in 1..c) {{ m[r, j] >= x; }} }} }}",
                        lo + 1
                    );
                    (model, format!("int r := {r}; int c := {c};"))
                })
            })
            .boxed(),
    }
}

/// `count` generated models for `pass`, the same on every run.
pub fn generated(pass: PassId, count: usize) -> Vec<(String, String)> {
    let mut runner = TestRunner::deterministic();
    let strategy = generated_strategy(pass);
    (0..count).map(|_| strategy.new_tree(&mut runner).unwrap().current()).collect()
}

/// Outcome of the suite for one pass.
pub struct PassSuite {
    pub pass: PassId,
    pub hand_written: usize,
    pub generated: usize,
    /// Models the pass rewrote.
    pub changed: usize,
    /// Models with at least one solution.
    pub satisfiable: usize,
    pub failures: Vec<String>,
}

pub fn equivalence_suite(pass: PassId, generated_count: usize) -> PassSuite {
    let hand = hand_written(pass);
    let gen = generated(pass, generated_count);
    let (mut changed, mut satisfiable) = (0, 0);
    let mut failures = Vec::new();
    for (k, (model, data)) in hand.iter().chain(gen.iter()).enumerate() {
        let m = load_text(model, data);
        match pass_preserves_solutions(pass, &m) {
            Ok((count, rewrote)) => {
                changed += rewrote as usize;
                satisfiable += (count > 0) as usize;
            }
            Err(reason) => failures.push(format!("model {k}: {reason}\n{model}\n{data}")),
        }
    }
    PassSuite { pass, hand_written: hand.len(), generated: gen.len(), changed, satisfiable, failures }
}
