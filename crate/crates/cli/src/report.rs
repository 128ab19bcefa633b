//! JSON shapes for every command. Objects are `serde_json::Map`, which keeps keys
//! sorted, so output is byte-stable for fixed input.

use serde_json::{json, Value};

use ggp_core::component::{component_group, SChar};
use ggp_core::epsilon::OracleCall;
use ggp_core::param::{AtomKind, LParameter, Summand};
use ggp_core::recipe::{DistinguishedPair, MultiplicityReport, PacketMember};
use ggp_core::theta::ThetaContext;
use ggp_core::verify::seesaw::SeesawTrace;
use ggp_core::verify::suite::{SuiteConfig, SuiteReport};

pub const SCHEMA: &str = "ggp-report/1";

pub fn envelope(command: &str, mut body: Value) -> Value {
    let obj = body.as_object_mut().expect("report bodies are objects");
    obj.insert("schema".into(), json!(SCHEMA));
    obj.insert("command".into(), json!(command));
    body
}

pub fn summand(s: &Summand) -> Value {
    let a = s.atom();
    let (kind, sign) = match a.kind {
        AtomKind::Character => ("character", None),
        AtomKind::SelfDual(sg) => ("self_dual", Some(sg)),
        AtomKind::Plain => ("plain", None),
    };
    json!({
        "text": s.to_string(),
        "label": a.label,
        "dim": a.dim,
        "kind": kind,
        "sign": sign,
        "twist": s.twist(),
        "tempered": a.tempered,
        "sl2_trivial": a.sl2_trivial,
    })
}

pub fn parameter(phi: &LParameter) -> Value {
    let g = phi.group();
    json!({
        "text": phi.to_string(),
        "group": g.to_string(),
        "rank": g.rank,
        "form": g.form.letter().to_string(),
        "duality": g.duality,
        "same_type": phi.same_type_blocks().iter().map(|(s, m)| json!({"summand": summand(s), "mult": m})).collect::<Vec<_>>(),
        "dual_pairs": phi.dual_pair_blocks().iter().map(|(a, b, m)| json!({"member": summand(a), "partner": summand(b), "mult": m})).collect::<Vec<_>>(),
        "flags": phi.flags(),
    })
}

/// A character as a table over the canonical basis of `S_phi`.
pub fn character(phi: &LParameter, eta: &SChar) -> Value {
    let basis = component_group(phi);
    json!({
        "text": eta.to_string(),
        "index": eta.index(),
        "values": basis.basis().iter().zip(&eta.values).map(|(b, v)| json!({"basis": b.to_string(), "value": v})).collect::<Vec<_>>(),
    })
}

pub fn member(m: &PacketMember) -> Value {
    json!({
        "parameter": m.parameter.to_string(),
        "character": character(&m.parameter, &m.character),
        "side": m.side,
    })
}

pub fn pair(p: &DistinguishedPair) -> Value {
    json!({ "upper": member(&p.upper), "lower": member(&p.lower), "source": p.source })
}

pub fn context(ctx: &ThetaContext) -> Value {
    json!({ "chi_v": ctx.chi_v, "chi_w": ctx.chi_w, "chi_v_text": ctx.chi_v.to_string(), "chi_w_text": ctx.chi_w.to_string() })
}

pub fn audit(calls: &[OracleCall]) -> Value {
    json!(calls)
}

pub fn multiplicity(r: &MultiplicityReport) -> Value {
    json!({
        "case": r.case.name(),
        "chi_w_multiplicity": r.chi_w_multiplicity,
        "lifted_phi1": parameter(&r.lifted_phi1),
        "recovered_phi2": r.recovered_phi2.as_ref().map(parameter),
        "pair": r.case.pair().map(pair),
        "audit": audit(&r.audit),
    })
}

pub fn trace(t: &SeesawTrace) -> Value {
    json!({
        "steps": t.steps,
        "eps_prime": t.eps_prime,
        "eps": t.eps,
        "faults": t.faults,
        "pair": t.pair.as_ref().map(pair),
        "calls": audit(&t.calls),
    })
}

pub fn suite(config: &SuiteConfig, report: &SuiteReport) -> Value {
    let tally = |parity| serde_json::to_value(report.tally(parity)).expect("tally serializes");
    json!({
        "config": {
            "seeds": config.seeds.len(),
            "first_seed": config.seeds.first(),
            "max_rank": config.max_rank,
            "parities": config.parities,
            "backends": config.backends,
            "identify_chi": config.identify_chi,
        },
        "summary": {
            "entries": report.entries.len(),
            "passed": report.entries.iter().filter(|e| e.pass).count(),
            "failed": report.failures().count(),
            "all_pass": report.all_pass(),
            "by_property": tally(None),
            "odd": tally(Some(ggp_core::verify::suite::Parity::Odd)),
            "even": tally(Some(ggp_core::verify::suite::Parity::Even)),
        },
        "entries": report.entries,
    })
}
