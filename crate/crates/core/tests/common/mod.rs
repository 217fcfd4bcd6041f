#![allow(dead_code)]

use indrec_core::frontend::{parse_theory, Candidate, ParseOptions, TheoryEnv};
use indrec_core::kernel::Prop;

pub const REV: &str = include_str!("../../../../corpus/rev.thy");

pub fn rev_env() -> TheoryEnv {
    parse_theory(REV, &ParseOptions::default()).expect("rev.thy parses")
}

pub fn env_of(src: &str) -> TheoryEnv {
    parse_theory(src, &ParseOptions::default()).unwrap_or_else(|e| panic!("{e}"))
}

pub fn goal(env: &TheoryEnv, name: &str) -> Prop {
    env.goal(name).unwrap_or_else(|| panic!("no goal {name}")).prop.clone()
}

pub fn cand(env: &TheoryEnv, g: &Prop, text: &str) -> Candidate {
    indrec_core::frontend::parse_candidate(text, env, g).unwrap_or_else(|e| panic!("{text}: {e}"))
}

pub fn corpus_sources() -> Vec<(String, String)> {
    let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/../../corpus");
    let mut out: Vec<(String, String)> = std::fs::read_dir(dir)
        .expect("corpus dir")
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "thy"))
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), std::fs::read_to_string(&p).unwrap()))
        .collect();
    out.sort();
    out
}
