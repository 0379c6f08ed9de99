//! The files under `data/` are generated from the bundled fixtures. Run
//! with `CAUSALOG_BLESS=1` to rewrite them after changing a fixture or a
//! file format.

use std::path::PathBuf;

use causalog::graph_file::{parse_graph, write_graph};
use causalog::program_file::{parse_program, write_program};
use causalog::proof_file::{parse_proof, write_proof, ProofFile};
use causalog::scm_file::{parse_scm, write_scm};
use causalog_core::axioms::System;
use causalog_core::fixtures;
use causalog_core::simprog::{compile_scm, DEFAULT_BIT_CAP};

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data").join(name)
}

fn expected() -> Vec<(String, String)> {
    let mut files = Vec::new();
    for (name, m) in fixtures::expressivity_models() {
        files.push((format!("{name}.scm"), write_scm(&m)));
    }
    files.push(("fig1.g".into(), write_graph(&fixtures::fig1_graph())));
    let proof = ProofFile {
        signature: Some(fixtures::front_door_signature()),
        system: System::Ax2,
        assumptions: fixtures::front_door_assumptions(),
        lines: fixtures::front_door_proof(),
    };
    files.push(("front_door.proof".into(), write_proof(&proof)));
    let copy = compile_scm(&fixtures::prop2_m1(), None, DEFAULT_BIT_CAP).unwrap();
    files.push(("copy.prog".into(), write_program(&copy.program)));
    files
}

#[test]
fn bundled_files_match_fixtures() {
    let bless = std::env::var_os("CAUSALOG_BLESS").is_some();
    for (name, text) in expected() {
        let path = data(&name);
        if bless {
            std::fs::write(&path, &text).unwrap();
            continue;
        }
        let on_disk = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}; rerun with CAUSALOG_BLESS=1", path.display()));
        assert_eq!(on_disk, text, "{} is stale; rerun with CAUSALOG_BLESS=1", path.display());
    }
}

#[test]
fn bundled_files_parse_back() {
    for (name, m) in fixtures::expressivity_models() {
        let text = std::fs::read_to_string(data(&format!("{name}.scm"))).unwrap();
        assert_eq!(parse_scm(&text).unwrap(), m);
    }
    let g = parse_graph(&std::fs::read_to_string(data("fig1.g")).unwrap()).unwrap();
    assert_eq!(g.named_edges(), fixtures::fig1_graph().named_edges());
    let p = parse_proof(&std::fs::read_to_string(data("front_door.proof")).unwrap()).unwrap();
    assert_eq!(p.lines, fixtures::front_door_proof());
    assert_eq!(p.assumptions, fixtures::front_door_assumptions());
    let prog = parse_program(&std::fs::read_to_string(data("copy.prog")).unwrap()).unwrap();
    assert_eq!(prog.instructions().len(), 3);
}
