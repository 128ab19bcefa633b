use std::fs;
use std::path::Path;

use ggp_core::dsl::{load, parse, print, DslError};

enum Expect {
    Ok,
    Syntax(u32, u32),
    Semantic(u32, u32, String),
}

fn header(text: &str) -> Expect {
    let line = text.lines().next().and_then(|l| l.strip_prefix("# expect: ")).expect("corpus header");
    let parts: Vec<&str> = line.split_whitespace().collect();
    let pos = |s: &str| {
        let (l, c) = s.split_once(':').unwrap();
        (l.parse().unwrap(), c.parse().unwrap())
    };
    match parts.as_slice() {
        ["ok"] => Expect::Ok,
        ["syntax", p] => {
            let (l, c) = pos(p);
            Expect::Syntax(l, c)
        }
        ["semantic", p, class] => {
            let (l, c) = pos(p);
            Expect::Semantic(l, c, class.to_string())
        }
        _ => panic!("bad header {line}"),
    }
}

fn corpus() -> Vec<(String, String)> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/dsl_corpus");
    let mut docs: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "ggp"))
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), fs::read_to_string(&p).unwrap()))
        .collect();
    docs.sort();
    docs
}

#[test]
fn corpus_is_large_enough() {
    assert!(corpus().len() >= 20);
}

#[test]
fn every_document_meets_its_header() {
    for (name, text) in corpus() {
        match (header(&text), load(&text)) {
            (Expect::Ok, Ok(_)) => {}
            (Expect::Syntax(l, c), Err(e @ DslError::Syntax { .. })) => {
                assert_eq!((e.pos().line, e.pos().col), (l, c), "{name}: {e}");
            }
            (Expect::Semantic(l, c, class), Err(DslError::Semantic { pos, error })) => {
                assert_eq!((pos.line, pos.col, error.class()), (l, c, class), "{name}: {error}");
            }
            (_, got) => panic!("{name}: unexpected outcome {got:?}"),
        }
    }
}

#[test]
fn parsed_documents_round_trip() {
    for (name, text) in corpus() {
        let Ok(doc) = parse(&text) else { continue };
        let printed = print(&doc);
        let again = parse(&printed).unwrap_or_else(|e| panic!("{name}: canonical form fails to parse: {e}\n{printed}"));
        assert_eq!(again, doc, "{name}");
        assert_eq!(print(&again), printed, "{name}");
    }
}

#[test]
fn error_messages_carry_positions() {
    for (name, text) in corpus() {
        if let Err(e) = load(&text) {
            let p = e.pos();
            assert!(e.to_string().starts_with(&format!("{}:{}: ", p.line, p.col)), "{name}: {e}");
        }
    }
}
