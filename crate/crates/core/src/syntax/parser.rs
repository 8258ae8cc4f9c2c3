use thiserror::Error;

use super::{Alphabet, Arm, CtorName, Expr, Ident, Program};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ParseErrorKind {
    Syntax,
    ArityMismatch,
    DuplicatePatternCtor,
    DuplicateDef,
    UnboundName,
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
#[error("{line}:{col}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub kind: ParseErrorKind,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Int(i64),
    Lower(String),
    Upper(String),
    Rec,
    Match,
    Err,
    Let,
    Ctor,
    Arrow,
    /// `(`; the flag is set when no whitespace precedes it.
    LParen(bool),
    RParen,
    LBrace,
    RBrace,
    Bar,
    Comma,
    Semi,
    Eq,
    Slash,
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Int(n) => format!("integer `{n}`"),
            Tok::Lower(s) | Tok::Upper(s) => format!("`{s}`"),
            Tok::Rec => "`rec`".into(),
            Tok::Match => "`match`".into(),
            Tok::Err => "`err`".into(),
            Tok::Let => "`let`".into(),
            Tok::Ctor => "`ctor`".into(),
            Tok::Arrow => "`->`".into(),
            Tok::LParen(_) => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::LBrace => "`{`".into(),
            Tok::RBrace => "`}`".into(),
            Tok::Bar => "`|`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Semi => "`;`".into(),
            Tok::Eq => "`=`".into(),
            Tok::Slash => "`/`".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    line: usize,
    col: usize,
}

fn lex(text: &str) -> Result<Vec<Token>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    let mut spaced = true;
    let err = |line, col, message: String| ParseError {
        line,
        col,
        kind: ParseErrorKind::Syntax,
        message,
    };
    while i < chars.len() {
        let c = chars[i];
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            spaced = true;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            spaced = true;
            continue;
        }
        if c == '-' && chars.get(i + 1) == Some(&'-') {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            spaced = true;
            continue;
        }
        let (start_line, start_col) = (line, col);
        let tok = if c.is_ascii_digit() || (c == '-' && chars.get(i + 1).is_some_and(|d| d.is_ascii_digit())) {
            let start = i;
            i += 1;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let lexeme: String = chars[start..i].iter().collect();
            col += i - start;
            let n = lexeme.parse::<i64>().map_err(|_| {
                err(
                    start_line,
                    start_col,
                    format!("integer literal `{lexeme}` out of range"),
                )
            })?;
            Tok::Int(n)
        } else if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_' || chars[i] == '\'') {
                i += 1;
            }
            let word: String = chars[start..i].iter().collect();
            col += i - start;
            match word.as_str() {
                "rec" => Tok::Rec,
                "match" => Tok::Match,
                "err" => Tok::Err,
                "let" => Tok::Let,
                "ctor" => Tok::Ctor,
                _ if c.is_uppercase() => Tok::Upper(word),
                _ => Tok::Lower(word),
            }
        } else {
            let two: String = chars[i..(i + 2).min(chars.len())].iter().collect();
            if two == "->" {
                i += 2;
                col += 2;
                Tok::Arrow
            } else {
                i += 1;
                col += 1;
                match c {
                    '(' => Tok::LParen(!spaced),
                    ')' => Tok::RParen,
                    '{' => Tok::LBrace,
                    '}' => Tok::RBrace,
                    '|' => Tok::Bar,
                    ',' => Tok::Comma,
                    ';' => Tok::Semi,
                    '=' => Tok::Eq,
                    '/' => Tok::Slash,
                    _ => return Err(err(start_line, start_col, format!("unexpected character `{c}`"))),
                }
            }
        };
        spaced = false;
        out.push(Token {
            tok,
            line: start_line,
            col: start_col,
        });
    }
    out.push(Token {
        tok: Tok::Eof,
        line,
        col,
    });
    Ok(out)
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    alphabet: Alphabet,
    defs: Vec<Ident>,
    scope: Vec<Ident>,
    /// First unbound occurrence in the current item; reported once the item
    /// parsed, so structural errors take precedence.
    unbound: Option<((usize, usize), Ident)>,
}

type PResult<T> = Result<T, ParseError>;

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn here(&self) -> (usize, usize) {
        let t = &self.toks[self.pos];
        (t.line, t.col)
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error_at(&self, (line, col): (usize, usize), kind: ParseErrorKind, message: String) -> ParseError {
        ParseError {
            line,
            col,
            kind,
            message,
        }
    }

    fn unexpected(&self, wanted: &str) -> ParseError {
        self.error_at(
            self.here(),
            ParseErrorKind::Syntax,
            format!("expected {wanted}, found {}", self.peek().describe()),
        )
    }

    fn expect(&mut self, tok: Tok, wanted: &str) -> PResult<()> {
        let matches = match (&tok, self.peek()) {
            (Tok::LParen(_), Tok::LParen(_)) => true,
            (a, b) => a == b,
        };
        if matches {
            self.bump();
            Ok(())
        } else {
            Err(self.unexpected(wanted))
        }
    }

    fn lower(&mut self) -> PResult<Ident> {
        match self.peek().clone() {
            Tok::Lower(s) => {
                self.bump();
                Ok(s)
            }
            _ => Err(self.unexpected("an identifier")),
        }
    }

    fn ctor_use(&mut self, name: &str, arity: usize, at: (usize, usize)) -> PResult<CtorName> {
        self.alphabet.declare(name, arity).map_err(|known| {
            self.error_at(
                at,
                ParseErrorKind::ArityMismatch,
                format!("constructor `{name}` used with {arity} argument(s) but has arity {known}"),
            )
        })?;
        Ok(CtorName::new(name, arity))
    }

    fn item_done(&mut self) -> PResult<()> {
        match self.unbound.take() {
            Some((at, x)) => Err(self.error_at(at, ParseErrorKind::UnboundName, format!("unbound name `{x}`"))),
            None => Ok(()),
        }
    }

    fn program(&mut self) -> PResult<Program> {
        let mut defs = Vec::new();
        let mut main = None;
        loop {
            match self.peek() {
                Tok::Eof => break,
                Tok::Ctor => {
                    self.bump();
                    let at = self.here();
                    let name = match self.peek().clone() {
                        Tok::Upper(s) => {
                            self.bump();
                            s
                        }
                        _ => return Err(self.unexpected("a constructor name")),
                    };
                    self.expect(Tok::Slash, "`/`")?;
                    let arity = match self.peek().clone() {
                        Tok::Int(n) if n >= 0 => {
                            self.bump();
                            n as usize
                        }
                        _ => return Err(self.unexpected("an arity")),
                    };
                    self.expect(Tok::Semi, "`;`")?;
                    self.ctor_use(&name, arity, at)?;
                }
                Tok::Let => {
                    self.bump();
                    let at = self.here();
                    let name = self.lower()?;
                    if self.defs.contains(&name) {
                        return Err(self.error_at(
                            at,
                            ParseErrorKind::DuplicateDef,
                            format!("`{name}` is already defined"),
                        ));
                    }
                    self.expect(Tok::Eq, "`=`")?;
                    let body = self.expr()?;
                    self.expect(Tok::Semi, "`;`")?;
                    self.item_done()?;
                    self.defs.push(name.clone());
                    defs.push((name, body));
                }
                _ => {
                    main = Some(self.expr()?);
                    if self.peek() == &Tok::Semi {
                        self.bump();
                    }
                    if self.peek() != &Tok::Eof {
                        return Err(self.unexpected("end of input"));
                    }
                    self.item_done()?;
                    break;
                }
            }
        }
        Ok(Program {
            defs,
            main,
            alphabet: self.alphabet.clone(),
        })
    }

    fn expr(&mut self) -> PResult<Expr> {
        match self.peek() {
            Tok::Rec => {
                self.bump();
                let fun = self.lower()?;
                self.expect(Tok::LParen(true), "`(`")?;
                let param = self.lower()?;
                self.expect(Tok::RParen, "`)`")?;
                self.expect(Tok::Arrow, "`->`")?;
                self.scope.push(fun.clone());
                self.scope.push(param.clone());
                let body = self.expr();
                self.scope.truncate(self.scope.len() - 2);
                Ok(Expr::Rec {
                    fun,
                    param,
                    body: Box::new(body?),
                })
            }
            Tok::Match => {
                self.bump();
                let scrutinee = self.expr()?;
                self.expect(Tok::LBrace, "`{`")?;
                let mut arms: Vec<Arm> = Vec::new();
                if self.peek() != &Tok::RBrace {
                    loop {
                        let at = self.here();
                        let arm = self.arm()?;
                        if arms.iter().any(|a| a.ctor.name() == arm.ctor.name()) {
                            return Err(self.error_at(
                                at,
                                ParseErrorKind::DuplicatePatternCtor,
                                format!("constructor `{}` occurs twice in one match", arm.ctor),
                            ));
                        }
                        arms.push(arm);
                        if self.peek() == &Tok::Bar {
                            self.bump();
                        } else {
                            break;
                        }
                    }
                }
                self.expect(Tok::RBrace, "`}` or `|`")?;
                Ok(Expr::Match(Box::new(scrutinee), arms))
            }
            _ => self.app(),
        }
    }

    fn arm(&mut self) -> PResult<Arm> {
        let at = self.here();
        let name = match self.peek().clone() {
            Tok::Upper(s) => {
                self.bump();
                s
            }
            _ => return Err(self.unexpected("a constructor pattern")),
        };
        let mut binders: Vec<Ident> = Vec::new();
        if self.peek() == &Tok::LParen(true) {
            self.bump();
            loop {
                let bat = self.here();
                let b = self.lower()?;
                if binders.contains(&b) {
                    return Err(self.error_at(
                        bat,
                        ParseErrorKind::Syntax,
                        format!("binder `{b}` repeated in pattern"),
                    ));
                }
                binders.push(b);
                if self.peek() == &Tok::Comma {
                    self.bump();
                } else {
                    break;
                }
            }
            self.expect(Tok::RParen, "`)`")?;
        }
        let ctor = self.ctor_use(&name, binders.len(), at)?;
        self.expect(Tok::Arrow, "`->`")?;
        let mark = self.scope.len();
        self.scope.extend(binders.iter().cloned());
        let body = self.expr();
        self.scope.truncate(mark);
        Ok(Arm {
            ctor,
            binders,
            body: body?,
        })
    }

    fn starts_atom(&self) -> bool {
        matches!(
            self.peek(),
            Tok::Int(_) | Tok::Err | Tok::Lower(_) | Tok::Upper(_) | Tok::LParen(_)
        )
    }

    fn app(&mut self) -> PResult<Expr> {
        let mut e = self.atom()?;
        while self.starts_atom() {
            let arg = self.atom()?;
            e = Expr::app(e, arg);
        }
        Ok(e)
    }

    fn atom(&mut self) -> PResult<Expr> {
        let at = self.here();
        match self.peek().clone() {
            Tok::Int(n) => {
                self.bump();
                Ok(Expr::Int(n))
            }
            Tok::Err => {
                self.bump();
                Ok(Expr::Err)
            }
            Tok::Lower(x) => {
                self.bump();
                if !self.scope.contains(&x) && !self.defs.contains(&x) && self.unbound.is_none() {
                    self.unbound = Some((at, x.clone()));
                }
                Ok(Expr::Var(x))
            }
            Tok::Upper(name) => {
                self.bump();
                let mut args = Vec::new();
                if self.peek() == &Tok::LParen(true) {
                    self.bump();
                    loop {
                        args.push(self.expr()?);
                        if self.peek() == &Tok::Comma {
                            self.bump();
                        } else {
                            break;
                        }
                    }
                    self.expect(Tok::RParen, "`)` or `,`")?;
                }
                let ctor = self.ctor_use(&name, args.len(), at)?;
                Ok(Expr::Ctor(ctor, args))
            }
            Tok::LParen(_) => {
                self.bump();
                let e = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(e)
            }
            _ => Err(self.unexpected("an expression")),
        }
    }
}

/// Parses a whole source file. Arities are fixed by `ctor Name/n;`
/// declarations or by first use, and checked across the file.
pub fn parse_program(text: &str) -> Result<Program, ParseError> {
    let toks = lex(text)?;
    let mut p = Parser {
        toks,
        pos: 0,
        alphabet: Alphabet::new(),
        defs: Vec::new(),
        scope: Vec::new(),
        unbound: None,
    };
    p.program()
}

/// Parses a source file that must end in a main expression and returns that
/// expression with all definitions inlined.
pub fn parse_expr(text: &str) -> Result<Expr, ParseError> {
    let program = parse_program(text)?;
    program.inlined_main().ok_or_else(|| ParseError {
        line: 1,
        col: 1,
        kind: ParseErrorKind::Syntax,
        message: "expected a main expression".into(),
    })
}
