//! Recursive-descent parser, one token of lookahead.

use std::str::FromStr;

use crate::epsilon::PsiTag;
use crate::param::Form;
use crate::sign::Sign;

use super::ast::*;
use super::lexer::{tokenize, Pos, Tok, Token};
use super::{DslError, SemanticError};

struct Parser {
    toks: Vec<Token>,
    at: usize,
}

type PResult<T> = Result<T, DslError>;

fn is_label(s: &str) -> bool {
    s.starts_with(|c: char| c.is_ascii_uppercase())
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].tok
    }

    fn pos(&self) -> Pos {
        self.toks[self.at].pos
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.at].clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn error<T>(&self, expected: &[&str]) -> PResult<T> {
        Err(DslError::Syntax {
            pos: self.pos(),
            found: self.peek().to_string(),
            expected: expected.iter().map(|s| s.to_string()).collect(),
        })
    }

    fn expect(&mut self, tok: Tok) -> PResult<Pos> {
        if *self.peek() == tok {
            Ok(self.bump().pos)
        } else {
            self.error(&[&tok.to_string()])
        }
    }

    fn at_keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw)
    }

    fn keyword(&mut self, kw: &str) -> PResult<Pos> {
        if self.at_keyword(kw) {
            Ok(self.bump().pos)
        } else {
            self.error(&[&format!("`{kw}`")])
        }
    }

    fn ident(&mut self, what: &str) -> PResult<(String, Pos)> {
        match self.peek().clone() {
            Tok::Ident(s) => Ok((s, self.bump().pos)),
            _ => self.error(&[what]),
        }
    }

    fn int(&mut self, what: &str) -> PResult<u64> {
        match *self.peek() {
            Tok::Int(n) => {
                self.bump();
                Ok(n)
            }
            _ => self.error(&[what]),
        }
    }

    fn small(&mut self, what: &str) -> PResult<u32> {
        let pos = self.pos();
        let n = self.int(what)?;
        u32::try_from(n).map_err(|_| semantic(pos, SemanticError::BadValue { key: what.to_string(), value: n.to_string() }))
    }

    /// `+`, `-`, `+1` or `-1`.
    fn sign(&mut self) -> PResult<Sign> {
        let s = match self.peek() {
            Tok::Plus => Sign::Plus,
            Tok::Minus => Sign::Minus,
            _ => return self.error(&["`+`", "`-`"]),
        };
        self.bump();
        if let Tok::Int(n) = *self.peek() {
            if n != 1 {
                return self.error(&["`1`"]);
            }
            self.bump();
        }
        Ok(s)
    }

    fn signed_int(&mut self) -> PResult<i64> {
        let neg = match self.peek() {
            Tok::Minus => {
                self.bump();
                true
            }
            Tok::Plus => {
                self.bump();
                false
            }
            _ => false,
        };
        let pos = self.pos();
        let n = self.int("an integer")?;
        let n = i64::try_from(n).map_err(|_| semantic(pos, SemanticError::BadValue { key: "integer".into(), value: n.to_string() }))?;
        Ok(if neg { -n } else { n })
    }

    fn document(&mut self) -> PResult<Document> {
        let mut doc = Document::default();
        loop {
            let pos = self.pos();
            match self.peek().clone() {
                Tok::Eof => return Ok(doc),
                Tok::Ident(kw) => match kw.as_str() {
                    "base" => {
                        let b = self.base()?;
                        if doc.base.replace(b).is_some() {
                            return Err(semantic(pos, SemanticError::DuplicateBlock("base")));
                        }
                    }
                    "characters" => {
                        let c = self.characters()?;
                        if doc.characters.replace(c).is_some() {
                            return Err(semantic(pos, SemanticError::DuplicateBlock("characters")));
                        }
                    }
                    "param" => doc.params.push(self.param()?),
                    "epsilon" => {
                        let e = self.epsilon()?;
                        if doc.epsilon.replace(e).is_some() {
                            return Err(semantic(pos, SemanticError::DuplicateBlock("epsilon")));
                        }
                    }
                    "task" => doc.tasks.push(self.task()?),
                    _ => return self.error(&ITEM_START),
                },
                _ => return self.error(&ITEM_START),
            }
        }
    }

    /// `{ key = value; ... }` with the value parsed by `value` per key.
    fn settings(&mut self, mut value: impl FnMut(&mut Parser, &str, Pos) -> PResult<()>) -> PResult<()> {
        self.expect(Tok::LBrace)?;
        while *self.peek() != Tok::RBrace {
            let (key, pos) = self.ident("a setting name or `}`")?;
            self.expect(Tok::Eq)?;
            value(self, &key, pos)?;
            self.expect(Tok::Semi)?;
        }
        self.expect(Tok::RBrace)?;
        Ok(())
    }

    fn base(&mut self) -> PResult<BaseDecl> {
        let pos = self.keyword("base")?;
        let mut omega = None;
        self.settings(|p, key, kpos| match key {
            "omega_minus_one" => {
                let s = p.sign()?;
                if omega.replace(s).is_some() {
                    return Err(semantic(kpos, SemanticError::DuplicateKey(key.into())));
                }
                Ok(())
            }
            _ => Err(semantic(kpos, SemanticError::UnknownKey(key.into()))),
        })?;
        let omega_minus_one = omega.ok_or_else(|| semantic(pos, SemanticError::MissingKey("omega_minus_one".into())))?;
        Ok(BaseDecl { pos, omega_minus_one })
    }

    fn characters(&mut self) -> PResult<CharactersDecl> {
        let pos = self.keyword("characters")?;
        let (mut n, mut mode) = (None, None);
        self.settings(|p, key, kpos| {
            let dup = match key {
                "n" => n.replace(p.small("an integer")?).is_some(),
                "mode" => {
                    let (m, mpos) = p.ident("`independent` or `identified`")?;
                    let m = match m.as_str() {
                        "independent" => CharMode::Independent,
                        "identified" => CharMode::Identified,
                        _ => return Err(semantic(mpos, SemanticError::BadValue { key: "mode".into(), value: m })),
                    };
                    mode.replace(m).is_some()
                }
                _ => return Err(semantic(kpos, SemanticError::UnknownKey(key.into()))),
            };
            if dup {
                return Err(semantic(kpos, SemanticError::DuplicateKey(key.into())));
            }
            Ok(())
        })?;
        let n = n.ok_or_else(|| semantic(pos, SemanticError::MissingKey("n".into())))?;
        if n == 0 {
            return Err(semantic(pos, SemanticError::BadValue { key: "n".into(), value: "0".into() }));
        }
        Ok(CharactersDecl { pos, n, mode: mode.unwrap_or(CharMode::Independent) })
    }

    fn param(&mut self) -> PResult<ParamDecl> {
        let pos = self.keyword("param")?;
        let (name, _) = self.ident("a parameter name")?;
        self.keyword("on")?;
        self.keyword("U")?;
        self.expect(Tok::LParen)?;
        let (form, fpos) = self.ident("`W` or `V`")?;
        let form = match form.as_str() {
            "W" => Form::SkewHermitian,
            "V" => Form::Hermitian,
            _ => return Err(DslError::Syntax { pos: fpos, found: format!("`{form}`"), expected: vec!["`W`".into(), "`V`".into()] }),
        };
        self.expect(Tok::Comma)?;
        let rank = self.small("a rank")?;
        self.expect(Tok::Comma)?;
        let sign = self.sign()?;
        self.expect(Tok::RParen)?;
        let mut flags = FlagDecl::default();
        while let Tok::Ident(f) = self.peek().clone() {
            let fpos = self.pos();
            let slot = match f.as_str() {
                "supercuspidal" => &mut flags.supercuspidal,
                "generic" => &mut flags.generic,
                "tempered" => &mut flags.tempered,
                "discrete" => &mut flags.discrete,
                _ => return self.error(&["a flag", "`{`"]),
            };
            if std::mem::replace(slot, true) {
                return Err(semantic(fpos, SemanticError::DuplicateKey(f)));
            }
            self.bump();
        }
        self.expect(Tok::LBrace)?;
        let mut summands = Vec::new();
        while *self.peek() != Tok::RBrace {
            summands.push(self.summand()?);
        }
        self.expect(Tok::RBrace)?;
        Ok(ParamDecl { pos, name, form, rank, sign, flags, summands })
    }

    fn summand(&mut self) -> PResult<SummandDecl> {
        let pos = self.pos();
        let pair = self.at_keyword("pair");
        if pair {
            self.bump();
        }
        let mut mult = 1;
        if let Tok::Int(_) = self.peek() {
            let mpos = self.pos();
            mult = self.small("a multiplicity")?;
            if mult == 0 {
                return Err(semantic(mpos, SemanticError::BadValue { key: "multiplicity".into(), value: "0".into() }));
            }
            self.keyword("x")?;
        }
        let atom = match self.peek().clone() {
            Tok::Ident(s) if s == "char" => {
                self.bump();
                AtomDecl::Character
            }
            Tok::Ident(label) if is_label(&label) => {
                self.bump();
                self.keyword("dim")?;
                let dim = self.small("a dimension")?;
                let sign = match self.peek() {
                    Tok::Ident(s) if s == "sign" => {
                        self.bump();
                        Some(self.sign()?)
                    }
                    Tok::Ident(s) if s == "plain" => {
                        self.bump();
                        None
                    }
                    _ => return self.error(&["`sign`", "`plain`"]),
                };
                AtomDecl::Labelled { label, dim, sign }
            }
            _ => return self.error(&["an atom label", "`char`", "`pair`", "a multiplicity", "`}`"]),
        };
        let twist = if *self.peek() == Tok::Star {
            self.bump();
            Some(self.char_expr()?)
        } else {
            None
        };
        let (mut tempered, mut sl2_trivial) = (false, false);
        while let Tok::Ident(a) = self.peek().clone() {
            let apos = self.pos();
            let slot = match a.as_str() {
                "tempered" => &mut tempered,
                "sl2triv" => &mut sl2_trivial,
                _ => return self.error(&["`tempered`", "`sl2triv`", "`*`", "`;`"]),
            };
            if std::mem::replace(slot, true) {
                return Err(semantic(apos, SemanticError::DuplicateKey(a)));
            }
            self.bump();
        }
        self.expect(Tok::Semi)?;
        Ok(SummandDecl { pos, pair, mult, atom, twist, tempered, sl2_trivial })
    }

    fn char_expr(&mut self) -> PResult<CharExpr> {
        let pos = self.pos();
        let mut expr = CharExpr { pos, ..CharExpr::default() };
        loop {
            match self.peek().clone() {
                Tok::Ident(g) if !is_label(&g) => {
                    self.bump();
                    let e = if *self.peek() == Tok::Caret {
                        self.bump();
                        self.signed_int()?
                    } else {
                        1
                    };
                    expr.factors.push((g, e));
                }
                Tok::Abs => {
                    let apos = self.bump().pos;
                    self.expect(Tok::Caret)?;
                    let p = self.signed_int()?;
                    let q = if *self.peek() == Tok::Slash {
                        self.bump();
                        let qpos = self.pos();
                        let q = self.int("a denominator")?;
                        if q == 0 {
                            return Err(semantic(qpos, SemanticError::BadValue { key: "slope".into(), value: format!("{p}/0") }));
                        }
                        q as i64
                    } else {
                        1
                    };
                    if expr.slope.replace((p, q)).is_some() {
                        return Err(semantic(apos, SemanticError::DuplicateKey("|.|".into())));
                    }
                }
                _ => return self.error(&["a character name", "`|.|`"]),
            }
            if *self.peek() != Tok::Star {
                return Ok(expr);
            }
            self.bump();
        }
    }

    fn key_ref(&mut self) -> PResult<KeyRef> {
        let label = match self.peek().clone() {
            Tok::Ident(l) if is_label(&l) => {
                self.bump();
                Some(l)
            }
            Tok::Int(1) => {
                self.bump();
                None
            }
            Tok::Ident(_) | Tok::Abs => return Ok(KeyRef { label: None, twist: Some(self.char_expr()?) }),
            _ => return self.error(&["an atom label", "`1`", "a character"]),
        };
        let twist = if *self.peek() == Tok::Star {
            self.bump();
            Some(self.char_expr()?)
        } else {
            None
        };
        Ok(KeyRef { label, twist })
    }

    fn epsilon(&mut self) -> PResult<EpsilonDecl> {
        let pos = self.keyword("epsilon")?;
        self.expect(Tok::LBrace)?;
        let mut entries = Vec::new();
        while *self.peek() != Tok::RBrace {
            let epos = self.expect(Tok::LParen)?;
            let left = self.key_ref()?;
            self.expect(Tok::Comma)?;
            let right = self.key_ref()?;
            self.expect(Tok::Semi)?;
            let (psi, ppos) = self.ident("`psiE`, `psi2E` or `psiNeg2E`")?;
            let psi = PsiTag::from_str(&psi).map_err(|_| DslError::Syntax {
                pos: ppos,
                found: format!("`{psi}`"),
                expected: vec!["`psiE`".into(), "`psi2E`".into(), "`psiNeg2E`".into()],
            })?;
            self.expect(Tok::RParen)?;
            self.expect(Tok::Eq)?;
            let value = self.sign()?;
            self.expect(Tok::Semi)?;
            entries.push(EpsEntry { pos: epos, left, right, psi, value });
        }
        self.expect(Tok::RBrace)?;
        Ok(EpsilonDecl { pos, entries })
    }

    fn task(&mut self) -> PResult<Task> {
        let pos = self.keyword("task")?;
        let (kind, kpos) = self.ident("`packet`, `theta` or `ggp`")?;
        let kind = match kind.as_str() {
            "packet" => TaskKind::Packet { param: self.ident("a parameter name")?.0 },
            "theta" => {
                let step = match self.peek() {
                    Tok::Ident(s) if s == "up1" => Step::Up1,
                    Tok::Ident(s) if s == "up2" => Step::Up2,
                    _ => return self.error(&["`up1`", "`up2`"]),
                };
                self.bump();
                TaskKind::Theta { step, param: self.ident("a parameter name")?.0 }
            }
            "ggp" => {
                let phi1 = self.ident("a parameter name")?.0;
                let phi = self.ident("a parameter name")?.0;
                let certified = self.at_keyword("certified");
                if certified {
                    self.bump();
                }
                TaskKind::Ggp { phi1, phi, certified }
            }
            _ => {
                return Err(DslError::Syntax {
                    pos: kpos,
                    found: format!("`{kind}`"),
                    expected: vec!["`packet`".into(), "`theta`".into(), "`ggp`".into()],
                })
            }
        };
        self.expect(Tok::Semi)?;
        Ok(Task { pos, kind })
    }
}

const ITEM_START: [&str; 6] = ["`base`", "`characters`", "`param`", "`epsilon`", "`task`", "end of input"];

fn semantic(pos: Pos, error: SemanticError) -> DslError {
    DslError::Semantic { pos, error }
}

pub fn parse(src: &str) -> Result<Document, DslError> {
    let toks =
        tokenize(src).map_err(|e| DslError::Syntax { pos: e.pos, found: format!("`{}`", e.found), expected: vec!["a token".into()] })?;
    let mut p = Parser { toks, at: 0 };
    p.document()
}
