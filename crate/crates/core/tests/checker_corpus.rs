//! Defect fixtures are each caught where they occur; the clean corpus is clean.

mod common;

use common::{corpus_source, corpus_stems, load, DEFECTS};
use cpforge::checker::check;
use cpforge::pipeline::check_sources;
use cpforge::Severity;

#[test]
fn each_defect_is_reported_at_its_location() {
    for (name, location, wording) in DEFECTS {
        let problems = check_sources(&corpus_source(&format!("defects/{name}"))).unwrap();
        let errors: Vec<_> = problems.iter().filter(|p| p.severity == Severity::Error).collect();
        assert_eq!(errors.len(), 1, "{name}: {problems:?}");
        assert_eq!(errors[0].location, location, "{name}");
        assert!(errors[0].description.contains(wording), "{name}: {}", errors[0]);
    }
}

#[test]
fn every_defect_fixture_is_covered() {
    let stems = corpus_stems("defects");
    assert_eq!(stems.len(), DEFECTS.len());
    for (name, ..) in DEFECTS {
        assert!(stems.contains(&format!("defects/{name}")), "{name}");
    }
}

#[test]
fn clean_corpus_has_no_problems() {
    let mut stems = corpus_stems("clean");
    stems.push("golfers".into());
    for stem in stems {
        assert_eq!(check_sources(&corpus_source(&stem)).unwrap(), vec![], "{stem}");
    }
}

#[test]
fn checking_is_pure() {
    for stem in corpus_stems("clean") {
        let m = load(&stem);
        assert_eq!(check(&m), check(&m.clone()), "{stem}");
    }
    for (name, ..) in DEFECTS {
        let src = corpus_source(&format!("defects/{name}"));
        assert_eq!(check_sources(&src).unwrap(), check_sources(&src).unwrap());
    }
}
