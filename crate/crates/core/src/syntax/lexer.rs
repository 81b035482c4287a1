//! Tokenizer. Unicode connectives are folded into their ASCII spelling.

use super::SyntaxError;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    Num(u64),
    /// Punctuation and operators, in ASCII spelling.
    Sym(&'static str),
    Eof,
}

#[derive(Clone, Debug)]
pub struct Token {
    pub tok: Tok,
    pub line: usize,
    pub col: usize,
}

const SYMBOLS: &[&str] = &[
    ":=", "|-", "-o", "->", "=>", "!=", "/\\", "\\/", "(", ")", "{", "}", "[", "]", ";", ",", ".", "=", "*", "|", "&",
    "+", "!", "?", "\\", ":", "@", "^", "~",
];

fn unicode(c: char) -> Option<&'static str> {
    Some(match c {
        '⊗' => "*",
        '⅋' => "|",
        '⊕' => "+",
        '≠' => "!=",
        '⊸' => "-o",
        '⊃' => "=>",
        '∧' => "/\\",
        '∨' => "\\/",
        'λ' => "\\",
        '⊢' => "|-",
        '→' => "->",
        '¬' => "~",
        _ => return None,
    })
}

fn unicode_word(c: char) -> Option<&'static str> {
    Some(match c {
        '∀' => "all",
        '∃' => "ex",
        'µ' | 'μ' => "mu",
        'ν' => "nu",
        '⊤' => "top",
        '⊥' => "bot",
        _ => return None,
    })
}

pub fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

pub fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '\''
}

pub fn tokenize(src: &str) -> Result<Vec<Token>, SyntaxError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    while i < chars.len() {
        let c = chars[i];
        let (tl, tc) = (line, col);
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            { i += 1; col += 1; }
            continue;
        }
        if c == '#' {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        let push = |tok: Tok, out: &mut Vec<Token>| out.push(Token { tok, line: tl, col: tc });
        if is_ident_start(c) {
            let start = i;
            while i < chars.len() && is_ident_char(chars[i]) {
                { i += 1; col += 1; }
            }
            push(Tok::Ident(chars[start..i].iter().collect()), &mut out);
            continue;
        }
        if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                { i += 1; col += 1; }
            }
            let s: String = chars[start..i].iter().collect();
            let n = s.parse().map_err(|_| SyntaxError::new(tl, tc, format!("numeral {s} is too large")))?;
            push(Tok::Num(n), &mut out);
            continue;
        }
        if let Some(w) = unicode_word(c) {
            { i += 1; col += 1; }
            push(Tok::Ident(w.to_string()), &mut out);
            continue;
        }
        if let Some(s) = unicode(c) {
            { i += 1; col += 1; }
            push(Tok::Sym(s), &mut out);
            continue;
        }
        let rest: String = chars[i..chars.len().min(i + 2)].iter().collect();
        match SYMBOLS.iter().find(|s| rest.starts_with(**s)) {
            Some(s) => {
                { let n = s.chars().count(); i += n; col += n; }
                push(Tok::Sym(s), &mut out);
            }
            None => return Err(SyntaxError::new(tl, tc, format!("unexpected character {c:?}"))),
        }
    }
    out.push(Token { tok: Tok::Eof, line, col });
    Ok(out)
}
