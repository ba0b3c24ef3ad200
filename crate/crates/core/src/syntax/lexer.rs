//! Shared tokenizer for the program format and the assertion languages.

use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    Num(u64),
    // punctuation
    Semi,
    Comma,
    Dot,
    DotDot,
    Question,
    LParen,
    RParen,
    LBrace,
    RBrace,
    LBracket,
    RBracket,
    Assign,   // :=
    BoxPlus,  // [+]
    Star,
    Plus,
    Minus,
    Bang,
    AndAnd,
    OrOr,
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    MapsTo,    // |->
    NotMapsTo, // |-/>
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Num(n) => write!(f, "`{n}`"),
            Tok::Semi => write!(f, "`;`"),
            Tok::Comma => write!(f, "`,`"),
            Tok::Dot => write!(f, "`.`"),
            Tok::DotDot => write!(f, "`..`"),
            Tok::Question => write!(f, "`?`"),
            Tok::LParen => write!(f, "`(`"),
            Tok::RParen => write!(f, "`)`"),
            Tok::LBrace => write!(f, "`{{`"),
            Tok::RBrace => write!(f, "`}}`"),
            Tok::LBracket => write!(f, "`[`"),
            Tok::RBracket => write!(f, "`]`"),
            Tok::Assign => write!(f, "`:=`"),
            Tok::BoxPlus => write!(f, "`[+]`"),
            Tok::Star => write!(f, "`*`"),
            Tok::Plus => write!(f, "`+`"),
            Tok::Minus => write!(f, "`-`"),
            Tok::Bang => write!(f, "`!`"),
            Tok::AndAnd => write!(f, "`&&`"),
            Tok::OrOr => write!(f, "`||`"),
            Tok::Eq => write!(f, "`=`"),
            Tok::Ne => write!(f, "`!=`"),
            Tok::Lt => write!(f, "`<`"),
            Tok::Le => write!(f, "`<=`"),
            Tok::Gt => write!(f, "`>`"),
            Tok::Ge => write!(f, "`>=`"),
            Tok::MapsTo => write!(f, "`|->`"),
            Tok::NotMapsTo => write!(f, "`|-/>`"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Token {
    pub tok: Tok,
    pub pos: Pos,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LexError {
    pub pos: Pos,
    pub message: String,
}

pub fn tokenize(src: &str) -> Result<Vec<Token>, LexError> {
    let bytes = src.as_bytes();
    let mut toks = Vec::new();
    let mut i = 0;
    let mut line = 1;
    let mut col = 1;

    macro_rules! pos {
        () => {
            Pos { line, col }
        };
    }

    while i < bytes.len() {
        let c = bytes[i] as char;
        let start = pos!();
        let mut advance = |i: &mut usize, n: usize| {
            *i += n;
            col += n;
        };
        match c {
            ' ' | '\t' | '\r' => {
                advance(&mut i, 1);
            }
            '\n' => {
                i += 1;
                line += 1;
                col = 1;
            }
            '/' if bytes.get(i + 1) == Some(&b'/') => {
                while i < bytes.len() && bytes[i] != b'\n' {
                    i += 1;
                }
            }
            '0'..='9' => {
                let mut j = i;
                while j < bytes.len() && bytes[j].is_ascii_digit() {
                    j += 1;
                }
                let text = &src[i..j];
                let n: u64 = text.parse().map_err(|_| LexError {
                    pos: start,
                    message: format!("integer literal `{text}` out of range"),
                })?;
                toks.push(Token { tok: Tok::Num(n), pos: start });
                let n = j - i;
                advance(&mut i, n);
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let mut j = i;
                while j < bytes.len()
                    && ((bytes[j] as char).is_ascii_alphanumeric() || bytes[j] == b'_')
                {
                    j += 1;
                }
                // primes allowed at the end of identifiers (x', y'')
                while j < bytes.len() && bytes[j] == b'\'' {
                    j += 1;
                }
                toks.push(Token {
                    tok: Tok::Ident(src[i..j].to_string()),
                    pos: start,
                });
                let n = j - i;
                advance(&mut i, n);
            }
            ';' => {
                toks.push(Token { tok: Tok::Semi, pos: start });
                advance(&mut i, 1);
            }
            ',' => {
                toks.push(Token { tok: Tok::Comma, pos: start });
                advance(&mut i, 1);
            }
            '.' => {
                if bytes.get(i + 1) == Some(&b'.') {
                    toks.push(Token { tok: Tok::DotDot, pos: start });
                    advance(&mut i, 2);
                } else {
                    toks.push(Token { tok: Tok::Dot, pos: start });
                    advance(&mut i, 1);
                }
            }
            '?' => {
                toks.push(Token { tok: Tok::Question, pos: start });
                advance(&mut i, 1);
            }
            '(' => {
                toks.push(Token { tok: Tok::LParen, pos: start });
                advance(&mut i, 1);
            }
            ')' => {
                toks.push(Token { tok: Tok::RParen, pos: start });
                advance(&mut i, 1);
            }
            '{' => {
                toks.push(Token { tok: Tok::LBrace, pos: start });
                advance(&mut i, 1);
            }
            '}' => {
                toks.push(Token { tok: Tok::RBrace, pos: start });
                advance(&mut i, 1);
            }
            '[' => {
                if bytes.get(i + 1) == Some(&b'+') && bytes.get(i + 2) == Some(&b']') {
                    toks.push(Token { tok: Tok::BoxPlus, pos: start });
                    advance(&mut i, 3);
                } else {
                    toks.push(Token { tok: Tok::LBracket, pos: start });
                    advance(&mut i, 1);
                }
            }
            ']' => {
                toks.push(Token { tok: Tok::RBracket, pos: start });
                advance(&mut i, 1);
            }
            ':' => {
                if bytes.get(i + 1) == Some(&b'=') {
                    toks.push(Token { tok: Tok::Assign, pos: start });
                    advance(&mut i, 2);
                } else {
                    return Err(LexError {
                        pos: start,
                        message: "expected `:=`".to_string(),
                    });
                }
            }
            '*' => {
                toks.push(Token { tok: Tok::Star, pos: start });
                advance(&mut i, 1);
            }
            '+' => {
                toks.push(Token { tok: Tok::Plus, pos: start });
                advance(&mut i, 1);
            }
            '-' => {
                toks.push(Token { tok: Tok::Minus, pos: start });
                advance(&mut i, 1);
            }
            '!' => {
                if bytes.get(i + 1) == Some(&b'=') {
                    toks.push(Token { tok: Tok::Ne, pos: start });
                    advance(&mut i, 2);
                } else {
                    toks.push(Token { tok: Tok::Bang, pos: start });
                    advance(&mut i, 1);
                }
            }
            '&' => {
                if bytes.get(i + 1) == Some(&b'&') {
                    toks.push(Token { tok: Tok::AndAnd, pos: start });
                    advance(&mut i, 2);
                } else {
                    return Err(LexError {
                        pos: start,
                        message: "expected `&&`".to_string(),
                    });
                }
            }
            '|' => {
                if bytes.get(i + 1) == Some(&b'-') && bytes.get(i + 2) == Some(&b'>') {
                    toks.push(Token { tok: Tok::MapsTo, pos: start });
                    advance(&mut i, 3);
                } else if bytes.get(i + 1) == Some(&b'-')
                    && bytes.get(i + 2) == Some(&b'/')
                    && bytes.get(i + 3) == Some(&b'>')
                {
                    toks.push(Token { tok: Tok::NotMapsTo, pos: start });
                    advance(&mut i, 4);
                } else if bytes.get(i + 1) == Some(&b'|') {
                    toks.push(Token { tok: Tok::OrOr, pos: start });
                    advance(&mut i, 2);
                } else {
                    return Err(LexError {
                        pos: start,
                        message: "expected `||`, `|->` or `|-/>`".to_string(),
                    });
                }
            }
            '=' => {
                // accept both `=` and `==`
                if bytes.get(i + 1) == Some(&b'=') {
                    toks.push(Token { tok: Tok::Eq, pos: start });
                    advance(&mut i, 2);
                } else {
                    toks.push(Token { tok: Tok::Eq, pos: start });
                    advance(&mut i, 1);
                }
            }
            '<' => {
                if bytes.get(i + 1) == Some(&b'=') {
                    toks.push(Token { tok: Tok::Le, pos: start });
                    advance(&mut i, 2);
                } else {
                    toks.push(Token { tok: Tok::Lt, pos: start });
                    advance(&mut i, 1);
                }
            }
            '>' => {
                if bytes.get(i + 1) == Some(&b'=') {
                    toks.push(Token { tok: Tok::Ge, pos: start });
                    advance(&mut i, 2);
                } else {
                    toks.push(Token { tok: Tok::Gt, pos: start });
                    advance(&mut i, 1);
                }
            }
            other => {
                return Err(LexError {
                    pos: start,
                    message: format!("unexpected character `{other}`"),
                });
            }
        }
    }
    Ok(toks)
}
