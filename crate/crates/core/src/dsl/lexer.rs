use std::fmt;

/// 1-based line and column. Positions never take part in equality, so a
/// reparsed document compares equal to the original.
#[derive(Clone, Copy, Debug, Default, Eq, PartialOrd, Ord)]
pub struct Pos {
    pub line: u32,
    pub col: u32,
}

impl PartialEq for Pos {
    fn eq(&self, _: &Pos) -> bool {
        true
    }
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    Int(u64),
    Plus,
    Minus,
    Star,
    Caret,
    Slash,
    LParen,
    RParen,
    LBrace,
    RBrace,
    Comma,
    Semi,
    Eq,
    /// `|.|`
    Abs,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Int(n) => write!(f, "`{n}`"),
            Tok::Plus => f.write_str("`+`"),
            Tok::Minus => f.write_str("`-`"),
            Tok::Star => f.write_str("`*`"),
            Tok::Caret => f.write_str("`^`"),
            Tok::Slash => f.write_str("`/`"),
            Tok::LParen => f.write_str("`(`"),
            Tok::RParen => f.write_str("`)`"),
            Tok::LBrace => f.write_str("`{`"),
            Tok::RBrace => f.write_str("`}`"),
            Tok::Comma => f.write_str("`,`"),
            Tok::Semi => f.write_str("`;`"),
            Tok::Eq => f.write_str("`=`"),
            Tok::Abs => f.write_str("`|.|`"),
            Tok::Eof => f.write_str("end of input"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Token {
    pub tok: Tok,
    pub pos: Pos,
}

/// A character the lexer cannot start a token with.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LexError {
    pub pos: Pos,
    pub found: String,
}

fn ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn ident_continue(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '~'
}

struct Cursor {
    chars: Vec<char>,
    i: usize,
    pos: Pos,
}

impl Cursor {
    fn peek_at(&self, k: usize) -> Option<char> {
        self.chars.get(self.i + k).copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek_at(0)?;
        self.i += 1;
        if c == '\n' {
            self.pos.line += 1;
            self.pos.col = 1;
        } else {
            self.pos.col += 1;
        }
        Some(c)
    }

    fn take_while(&mut self, f: impl Fn(char) -> bool) -> String {
        let mut s = String::new();
        while let Some(c) = self.peek_at(0).filter(|c| f(*c)) {
            s.push(c);
            self.bump();
        }
        s
    }
}

pub fn tokenize(src: &str) -> Result<Vec<Token>, LexError> {
    let mut cur = Cursor { chars: src.chars().collect(), i: 0, pos: Pos { line: 1, col: 1 } };
    let mut out = Vec::new();
    while let Some(c) = cur.peek_at(0) {
        let pos = cur.pos;
        if c.is_whitespace() {
            cur.bump();
            continue;
        }
        if c == '#' {
            cur.take_while(|c| c != '\n');
            continue;
        }
        if ident_start(c) {
            out.push(Token { tok: Tok::Ident(cur.take_while(ident_continue)), pos });
            continue;
        }
        if c.is_ascii_digit() {
            let s = cur.take_while(|c| c.is_ascii_digit());
            let n = s.parse().map_err(|_| LexError { pos, found: s.clone() })?;
            out.push(Token { tok: Tok::Int(n), pos });
            continue;
        }
        if c == '|' {
            if cur.peek_at(1) == Some('.') && cur.peek_at(2) == Some('|') {
                for _ in 0..3 {
                    cur.bump();
                }
                out.push(Token { tok: Tok::Abs, pos });
                continue;
            }
            return Err(LexError { pos, found: c.to_string() });
        }
        let tok = match c {
            '+' => Tok::Plus,
            '-' => Tok::Minus,
            '*' => Tok::Star,
            '^' => Tok::Caret,
            '/' => Tok::Slash,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            '{' => Tok::LBrace,
            '}' => Tok::RBrace,
            ',' => Tok::Comma,
            ';' => Tok::Semi,
            '=' => Tok::Eq,
            _ => return Err(LexError { pos, found: c.to_string() }),
        };
        cur.bump();
        out.push(Token { tok, pos });
    }
    out.push(Token { tok: Tok::Eof, pos: cur.pos });
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn positions_and_comments() {
        let toks = tokenize("# header\nparam x |.|^-1/2;").unwrap();
        assert_eq!(toks[0].tok, Tok::Ident("param".into()));
        assert_eq!((toks[0].pos.line, toks[0].pos.col), (2, 1));
        assert_eq!(toks[2].tok, Tok::Abs);
        assert_eq!((toks[2].pos.line, toks[2].pos.col), (2, 9));
        assert_eq!(toks.last().unwrap().tok, Tok::Eof);
    }

    #[test]
    fn stray_character() {
        let e = tokenize("a\n  @").unwrap_err();
        assert_eq!((e.pos.line, e.pos.col, e.found.as_str()), (2, 3, "@"));
    }
}
