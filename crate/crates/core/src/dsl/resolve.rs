//! From syntax to core values: characters, parameters and the epsilon table.

use std::collections::BTreeMap;

use num_rational::Ratio;

use crate::epsilon::{EpsTable, PairKey};
use crate::param::{Atom, BaseFieldData, Block, CharE, FlagRequest, GroupTag, LParameter, ParamError, StandardCharacters, Summand};
use crate::recipe::GgpSetup;

use super::ast::*;
use super::lexer::Pos;
use super::{DslError, SemanticError};

/// A resolved document.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Workspace {
    pub base: BaseFieldData,
    pub n: Option<u32>,
    pub chars: Option<StandardCharacters>,
    pub params: BTreeMap<String, LParameter>,
    pub table: Option<EpsTable>,
    pub tasks: Vec<Task>,
}

impl Workspace {
    pub fn param(&self, name: &str) -> Result<&LParameter, SemanticError> {
        self.params.get(name).ok_or_else(|| SemanticError::UnknownParam(name.to_string()))
    }

    /// The recipe setup, when a `characters` block is present.
    pub fn setup(&self, certified: bool) -> Option<GgpSetup> {
        let (n, chars) = (self.n?, self.chars.clone()?);
        let mut s = GgpSetup::new(n, chars);
        s.base = self.base;
        s.irreducibility_certified = certified;
        Some(s)
    }
}

fn semantic(pos: Pos, error: SemanticError) -> DslError {
    DslError::Semantic { pos, error }
}

struct Ctx<'a> {
    chars: Option<&'a StandardCharacters>,
    /// label -> (dim, sign or plain), for consistency across the document.
    atoms: BTreeMap<String, (u32, Option<crate::Sign>)>,
}

impl Ctx<'_> {
    fn char_expr(&self, e: &CharExpr) -> Result<CharE, DslError> {
        let mut out = CharE::trivial();
        for (g, k) in &e.factors {
            let chars = self.chars.ok_or_else(|| semantic(e.pos, SemanticError::MissingCharacters))?;
            let base = match g.as_str() {
                "chi" => &chars.chi,
                "chi_V" => &chars.chi_v,
                "chi_W" => &chars.chi_w,
                _ => return Err(semantic(e.pos, SemanticError::UnknownCharacter(g.clone()))),
            };
            out = &out * &base.pow(*k);
        }
        if let Some((p, q)) = e.slope {
            out = &out * &CharE::abs_power(Ratio::new(p, q));
        }
        Ok(out)
    }

    fn twist(&self, t: &Option<CharExpr>) -> Result<CharE, DslError> {
        t.as_ref().map_or(Ok(CharE::trivial()), |e| self.char_expr(e))
    }

    fn summand(&mut self, s: &SummandDecl) -> Result<Summand, DslError> {
        let twist = self.twist(&s.twist)?;
        let atom = match &s.atom {
            AtomDecl::Character => Atom::character(),
            AtomDecl::Labelled { label, dim, sign } => {
                if let Some(prev) = self.atoms.insert(label.clone(), (*dim, *sign)) {
                    if prev != (*dim, *sign) {
                        return Err(semantic(s.pos, SemanticError::LabelConflict(label.clone())));
                    }
                }
                match sign {
                    Some(sg) => Atom::self_dual(label.clone(), *dim, *sg),
                    None => Atom::plain(label.clone(), *dim),
                }
            }
        };
        Ok(Summand::new(atom.with_tempered(s.tempered).with_sl2_trivial(s.sl2_trivial), twist))
    }

    fn param(&mut self, p: &ParamDecl) -> Result<LParameter, DslError> {
        let tag = GroupTag::new(p.rank, p.form);
        if tag.duality != p.sign {
            let e = ParamError::NotGenuine { form: p.form, rank: p.rank, expected: tag.duality, found: p.sign };
            return Err(semantic(p.pos, SemanticError::Param(e)));
        }
        let mut seen = BTreeMap::new();
        let mut blocks = Vec::new();
        for s in &p.summands {
            let summand = self.summand(s)?;
            if let AtomDecl::Labelled { label, .. } = &s.atom {
                if seen.insert(label.clone(), ()).is_some() {
                    return Err(semantic(s.pos, SemanticError::DuplicateLabel(label.clone())));
                }
            }
            blocks.push(if s.pair { Block::DualPair { member: summand, mult: s.mult } } else { Block::times(summand, s.mult) });
        }
        let request = FlagRequest {
            tempered: p.flags.tempered.then_some(true),
            discrete: p.flags.discrete.then_some(true),
            supercuspidal_packet: p.flags.supercuspidal,
            generic: p.flags.generic,
        };
        LParameter::new(blocks, tag, request).map_err(|e| semantic(p.pos, SemanticError::Param(e)))
    }

    fn key_side(&self, k: &KeyRef, pos: Pos) -> Result<Summand, DslError> {
        let twist = self.twist(&k.twist)?;
        match &k.label {
            None => Ok(Summand::character(twist)),
            Some(l) => {
                let base = l.trim_end_matches('~');
                if !self.atoms.contains_key(base) {
                    return Err(semantic(pos, SemanticError::UnknownLabel(l.clone())));
                }
                Ok(Summand::new(Atom::plain(l.clone(), 1), twist))
            }
        }
    }
}

pub fn resolve(doc: &Document) -> Result<Workspace, DslError> {
    let chars = doc.characters.as_ref().map(|c| match c.mode {
        CharMode::Independent => StandardCharacters::independent(c.n),
        CharMode::Identified => StandardCharacters::identified(c.n),
    });
    let mut ctx = Ctx { chars: chars.as_ref(), atoms: BTreeMap::new() };
    let mut params = BTreeMap::new();
    for p in &doc.params {
        let phi = ctx.param(p)?;
        if params.insert(p.name.clone(), phi).is_some() {
            return Err(semantic(p.pos, SemanticError::DuplicateParam(p.name.clone())));
        }
    }
    let table = match &doc.epsilon {
        None => None,
        Some(e) => {
            let mut t = EpsTable::new();
            for x in &e.entries {
                let key = PairKey::new(&ctx.key_side(&x.left, x.pos)?, &ctx.key_side(&x.right, x.pos)?);
                if t.insert(key.clone(), x.psi, x.value).is_some() {
                    return Err(semantic(x.pos, SemanticError::DuplicateEntry(format!("{key} at {}", x.psi))));
                }
            }
            Some(t)
        }
    };
    for t in &doc.tasks {
        let names: Vec<&String> = match &t.kind {
            TaskKind::Packet { param } | TaskKind::Theta { param, .. } => vec![param],
            TaskKind::Ggp { phi1, phi, .. } => vec![phi1, phi],
        };
        for name in names {
            if !params.contains_key(name) {
                return Err(semantic(t.pos, SemanticError::UnknownParam(name.clone())));
            }
        }
        if !matches!(t.kind, TaskKind::Packet { .. }) && chars.is_none() {
            return Err(semantic(t.pos, SemanticError::MissingCharacters));
        }
    }
    Ok(Workspace {
        base: BaseFieldData { omega_at_minus_one: doc.base.as_ref().map_or(crate::Sign::Plus, |b| b.omega_minus_one) },
        n: doc.characters.as_ref().map(|c| c.n),
        chars,
        params,
        table,
        tasks: doc.tasks.clone(),
    })
}
