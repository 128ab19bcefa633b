//! Canonical text form. Blocks come out in a fixed order (base, characters,
//! params, epsilon, tasks) with one declaration per line.

use std::fmt::Write;

use crate::param::Form;
use crate::sign::Sign;

use super::ast::*;

fn short(s: Sign) -> &'static str {
    if s.is_plus() {
        "+"
    } else {
        "-"
    }
}

pub fn print_char_expr(e: &CharExpr) -> String {
    let mut parts: Vec<String> = e.factors.iter().map(|(g, k)| if *k == 1 { g.clone() } else { format!("{g}^{k}") }).collect();
    if let Some((p, q)) = e.slope {
        parts.push(if q == 1 { format!("|.|^{p}") } else { format!("|.|^{p}/{q}") });
    }
    parts.join(" * ")
}

fn print_key_ref(k: &KeyRef) -> String {
    match (&k.label, &k.twist) {
        (Some(l), Some(t)) => format!("{l} * {}", print_char_expr(t)),
        (Some(l), None) => l.clone(),
        (None, Some(t)) => print_char_expr(t),
        (None, None) => "1".to_string(),
    }
}

fn print_summand(s: &SummandDecl) -> String {
    let mut out = String::new();
    if s.pair {
        out.push_str("pair ");
    }
    if s.mult != 1 {
        write!(out, "{} x ", s.mult).unwrap();
    }
    match &s.atom {
        AtomDecl::Character => out.push_str("char"),
        AtomDecl::Labelled { label, dim, sign } => {
            write!(out, "{label} dim {dim}").unwrap();
            match sign {
                Some(sg) => write!(out, " sign {}", short(*sg)).unwrap(),
                None => out.push_str(" plain"),
            }
        }
    }
    if let Some(t) = &s.twist {
        write!(out, " * {}", print_char_expr(t)).unwrap();
    }
    if s.tempered {
        out.push_str(" tempered");
    }
    if s.sl2_trivial {
        out.push_str(" sl2triv");
    }
    out.push(';');
    out
}

pub fn print(doc: &Document) -> String {
    let mut out = String::new();
    if let Some(b) = &doc.base {
        writeln!(out, "base {{\n  omega_minus_one = {};\n}}", b.omega_minus_one).unwrap();
    }
    if let Some(c) = &doc.characters {
        let mode = match c.mode {
            CharMode::Independent => "independent",
            CharMode::Identified => "identified",
        };
        writeln!(out, "characters {{\n  n = {};\n  mode = {mode};\n}}", c.n).unwrap();
    }
    for p in &doc.params {
        let form = match p.form {
            Form::SkewHermitian => "W",
            Form::Hermitian => "V",
        };
        write!(out, "param {} on U({form},{},{})", p.name, p.rank, short(p.sign)).unwrap();
        for (on, name) in [
            (p.flags.supercuspidal, "supercuspidal"),
            (p.flags.generic, "generic"),
            (p.flags.tempered, "tempered"),
            (p.flags.discrete, "discrete"),
        ] {
            if on {
                write!(out, " {name}").unwrap();
            }
        }
        out.push_str(" {\n");
        for s in &p.summands {
            writeln!(out, "  {}", print_summand(s)).unwrap();
        }
        out.push_str("}\n");
    }
    if let Some(e) = &doc.epsilon {
        out.push_str("epsilon {\n");
        for x in &e.entries {
            writeln!(out, "  ({}, {}; {}) = {};", print_key_ref(&x.left), print_key_ref(&x.right), x.psi, x.value).unwrap();
        }
        out.push_str("}\n");
    }
    for t in &doc.tasks {
        match &t.kind {
            TaskKind::Packet { param } => writeln!(out, "task packet {param};").unwrap(),
            TaskKind::Theta { step, param } => {
                let step = if *step == Step::Up1 { "up1" } else { "up2" };
                writeln!(out, "task theta {step} {param};").unwrap()
            }
            TaskKind::Ggp { phi1, phi, certified } => {
                let c = if *certified { " certified" } else { "" };
                writeln!(out, "task ggp {phi1} {phi}{c};").unwrap()
            }
        }
    }
    out
}
