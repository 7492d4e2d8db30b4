//! OpenQASM 2.0 subset parser.
//!
//! Supported grammar: an optional `OPENQASM 2.0;` header, `include` lines
//! (ignored), exactly one `qreg`, at most one `creg`, the gate statements
//! `x y z h s sdg t tdg rx ry rz u/u3 cx cz swap cp`, `barrier` (accepted and
//! dropped), and `measure`. Angle parameters are arithmetic expressions over
//! decimal literals and `pi` with `+ - * /` and parentheses. Single-qubit
//! gates broadcast over a bare register operand. Only terminal full
//! measurement is honored; gates after a `measure` are rejected.

use crate::circuit::Circuit;
use crate::error::{Error, Result};
use crate::gates::{Gate, GateKind};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Number(f64),
    Str(String),
    Symbol(char),
    Arrow,
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: usize,
    col: usize,
}

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
    line: usize,
    col: usize,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Self {
            src: src.as_bytes(),
            pos: 0,
            line: 1,
            col: 1,
        }
    }

    fn bump(&mut self) -> u8 {
        let b = self.src[self.pos];
        self.pos += 1;
        if b == b'\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        b
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn peek2(&self) -> Option<u8> {
        self.src.get(self.pos + 1).copied()
    }

    fn error(&self, msg: impl Into<String>) -> Error {
        Error::QasmSyntax {
            line: self.line,
            col: self.col,
            msg: msg.into(),
        }
    }

    fn tokenize(mut self) -> Result<Vec<Spanned>> {
        let mut out = Vec::new();
        while let Some(b) = self.peek() {
            if b.is_ascii_whitespace() {
                self.bump();
                continue;
            }
            if b == b'/' && self.peek2() == Some(b'/') {
                while self.peek().is_some_and(|c| c != b'\n') {
                    self.bump();
                }
                continue;
            }
            let (line, col) = (self.line, self.col);
            let tok = match b {
                b'a'..=b'z' | b'A'..=b'Z' | b'_' => {
                    let mut s = String::new();
                    while self
                        .peek()
                        .is_some_and(|c| c.is_ascii_alphanumeric() || c == b'_')
                    {
                        s.push(self.bump() as char);
                    }
                    Tok::Ident(s)
                }
                b'0'..=b'9' | b'.' => {
                    let mut s = String::new();
                    while self
                        .peek()
                        .is_some_and(|c| c.is_ascii_digit() || c == b'.' || c == b'e' || c == b'E')
                    {
                        // allow a sign directly after an exponent marker
                        s.push(self.bump() as char);
                        if (s.ends_with('e') || s.ends_with('E'))
                            && self.peek().is_some_and(|c| c == b'+' || c == b'-')
                        {
                            s.push(self.bump() as char);
                        }
                    }
                    let v: f64 = s
                        .parse()
                        .map_err(|_| self.error(format!("malformed number `{s}`")))?;
                    Tok::Number(v)
                }
                b'"' => {
                    self.bump();
                    let mut s = String::new();
                    loop {
                        match self.peek() {
                            Some(b'"') => {
                                self.bump();
                                break;
                            }
                            Some(_) => s.push(self.bump() as char),
                            None => return Err(self.error("unterminated string literal")),
                        }
                    }
                    Tok::Str(s)
                }
                b'-' if self.peek2() == Some(b'>') => {
                    self.bump();
                    self.bump();
                    Tok::Arrow
                }
                b';' | b',' | b'(' | b')' | b'[' | b']' | b'+' | b'-' | b'*' | b'/' => {
                    Tok::Symbol(self.bump() as char)
                }
                other => {
                    return Err(self.error(format!("unexpected character `{}`", other as char)))
                }
            };
            out.push(Spanned { tok, line, col });
        }
        Ok(out)
    }
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
    qreg: Option<(String, usize)>,
    creg: Option<(String, usize)>,
    gates: Vec<Gate>,
    measured: bool,
}

const GATE_NAMES: &[&str] = &[
    "x", "y", "z", "h", "s", "sdg", "t", "tdg", "rx", "ry", "rz", "u", "u3", "cx", "cz", "swap",
    "cp",
];

impl Parser {
    fn peek(&self) -> Option<&Spanned> {
        self.toks.get(self.pos)
    }

    fn bump(&mut self) -> Option<Spanned> {
        let t = self.toks.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn here(&self) -> (usize, usize) {
        self.toks
            .get(self.pos)
            .or_else(|| self.toks.last())
            .map(|s| (s.line, s.col))
            .unwrap_or((1, 1))
    }

    fn error(&self, msg: impl Into<String>) -> Error {
        let (line, col) = self.here();
        Error::QasmSyntax {
            line,
            col,
            msg: msg.into(),
        }
    }

    fn expect_symbol(&mut self, sym: char) -> Result<()> {
        match self.bump() {
            Some(Spanned {
                tok: Tok::Symbol(c),
                ..
            }) if c == sym => Ok(()),
            Some(s) => Err(Error::QasmSyntax {
                line: s.line,
                col: s.col,
                msg: format!("expected `{sym}`"),
            }),
            None => Err(self.error(format!("expected `{sym}`, found end of input"))),
        }
    }

    fn expect_ident(&mut self) -> Result<String> {
        match self.bump() {
            Some(Spanned {
                tok: Tok::Ident(s), ..
            }) => Ok(s),
            Some(s) => Err(Error::QasmSyntax {
                line: s.line,
                col: s.col,
                msg: "expected identifier".into(),
            }),
            None => Err(self.error("expected identifier, found end of input")),
        }
    }

    fn expect_uint(&mut self) -> Result<usize> {
        match self.bump() {
            Some(Spanned {
                tok: Tok::Number(v),
                line,
                col,
            }) => {
                if v.fract() == 0.0 && v >= 0.0 {
                    Ok(v as usize)
                } else {
                    Err(Error::QasmSyntax {
                        line,
                        col,
                        msg: format!("expected a nonnegative integer, got {v}"),
                    })
                }
            }
            Some(s) => Err(Error::QasmSyntax {
                line: s.line,
                col: s.col,
                msg: "expected an integer".into(),
            }),
            None => Err(self.error("expected an integer, found end of input")),
        }
    }

    fn at_symbol(&self, sym: char) -> bool {
        matches!(self.peek(), Some(Spanned { tok: Tok::Symbol(c), .. }) if *c == sym)
    }

    // expr := term (('+'|'-') term)* ; term := unary (('*'|'/') unary)* ;
    // unary := '-' unary | atom ; atom := number | 'pi' | '(' expr ')'
    fn parse_expr(&mut self) -> Result<f64> {
        let mut acc = self.parse_term()?;
        loop {
            if self.at_symbol('+') {
                self.bump();
                acc += self.parse_term()?;
            } else if self.at_symbol('-') {
                self.bump();
                acc -= self.parse_term()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn parse_term(&mut self) -> Result<f64> {
        let mut acc = self.parse_unary()?;
        loop {
            if self.at_symbol('*') {
                self.bump();
                acc *= self.parse_unary()?;
            } else if self.at_symbol('/') {
                self.bump();
                let d = self.parse_unary()?;
                if d == 0.0 {
                    return Err(self.error("division by zero in angle expression"));
                }
                acc /= d;
            } else {
                return Ok(acc);
            }
        }
    }

    fn parse_unary(&mut self) -> Result<f64> {
        if self.at_symbol('-') {
            self.bump();
            return Ok(-self.parse_unary()?);
        }
        match self.bump() {
            Some(Spanned {
                tok: Tok::Number(v),
                ..
            }) => Ok(v),
            Some(Spanned {
                tok: Tok::Ident(s),
                line,
                col,
            }) => {
                if s == "pi" {
                    Ok(std::f64::consts::PI)
                } else {
                    Err(Error::QasmSyntax {
                        line,
                        col,
                        msg: format!("unknown symbol `{s}` in angle expression"),
                    })
                }
            }
            Some(Spanned {
                tok: Tok::Symbol('('),
                ..
            }) => {
                let v = self.parse_expr()?;
                self.expect_symbol(')')?;
                Ok(v)
            }
            Some(s) => Err(Error::QasmSyntax {
                line: s.line,
                col: s.col,
                msg: "expected a number, `pi`, or `(`".into(),
            }),
            None => Err(self.error("unterminated angle expression")),
        }
    }

    /// Operand: `name` (whole register) or `name[i]`.
    fn parse_operand(&mut self) -> Result<(String, Option<usize>)> {
        let name = self.expect_ident()?;
        if self.at_symbol('[') {
            self.bump();
            let idx = self.expect_uint()?;
            self.expect_symbol(']')?;
            Ok((name, Some(idx)))
        } else {
            Ok((name, None))
        }
    }

    fn resolve_qubit(&self, name: &str, idx: Option<usize>, line: usize, col: usize) -> Result<usize> {
        let (qname, size) = self
            .qreg
            .as_ref()
            .ok_or_else(|| Error::QasmSyntax {
                line,
                col,
                msg: "qubit used before any qreg declaration".into(),
            })?;
        if name != qname {
            return Err(Error::QasmSyntax {
                line,
                col,
                msg: format!("unknown quantum register `{name}`"),
            });
        }
        let idx = idx.ok_or_else(|| Error::QasmSyntax {
            line,
            col,
            msg: "expected an indexed qubit operand".into(),
        })?;
        if idx >= *size {
            return Err(Error::QubitOutOfRange {
                index: idx,
                n_qubits: *size,
            });
        }
        Ok(idx)
    }

    fn parse_gate_statement(&mut self, name: String, line: usize, col: usize) -> Result<()> {
        if self.measured {
            return Err(Error::QasmSyntax {
                line,
                col,
                msg: "gates after measurement are not supported".into(),
            });
        }
        let mut params = Vec::new();
        if self.at_symbol('(') {
            self.bump();
            if !self.at_symbol(')') {
                params.push(self.parse_expr()?);
                while self.at_symbol(',') {
                    self.bump();
                    params.push(self.parse_expr()?);
                }
            }
            self.expect_symbol(')')?;
        }
        let kind = GateKind::from_name(&name, &params).map_err(|e| match e {
            Error::InvalidGate(msg) => Error::QasmSyntax { line, col, msg },
            other => other,
        })?;

        let mut operands = Vec::new();
        operands.push(self.parse_operand()?);
        while self.at_symbol(',') {
            self.bump();
            operands.push(self.parse_operand()?);
        }
        self.expect_symbol(';')?;

        if kind.n_qubits() == 1 {
            if operands.len() != 1 {
                return Err(Error::QasmSyntax {
                    line,
                    col,
                    msg: format!("gate `{name}` takes one operand"),
                });
            }
            let (ref reg, idx) = operands[0];
            match idx {
                Some(_) => {
                    let q = self.resolve_qubit(reg, idx, line, col)?;
                    self.gates.push(Gate::new(kind, vec![q])?);
                }
                None => {
                    // broadcast over the whole register
                    let size = self.register_size(reg, line, col)?;
                    for q in 0..size {
                        self.gates.push(Gate::new(kind, vec![q])?);
                    }
                }
            }
        } else {
            if operands.len() != 2 {
                return Err(Error::QasmSyntax {
                    line,
                    col,
                    msg: format!("gate `{name}` takes two operands"),
                });
            }
            let a = self.resolve_qubit(&operands[0].0, operands[0].1, line, col)?;
            let b = self.resolve_qubit(&operands[1].0, operands[1].1, line, col)?;
            if a == b {
                return Err(Error::QasmSyntax {
                    line,
                    col,
                    msg: format!("gate `{name}` requires distinct qubits"),
                });
            }
            self.gates.push(Gate::new(kind, vec![a, b])?);
        }
        Ok(())
    }

    fn register_size(&self, name: &str, line: usize, col: usize) -> Result<usize> {
        match &self.qreg {
            Some((qname, size)) if qname == name => Ok(*size),
            _ => Err(Error::QasmSyntax {
                line,
                col,
                msg: format!("unknown quantum register `{name}`"),
            }),
        }
    }

    fn skip_to_semicolon(&mut self) {
        while let Some(s) = self.bump() {
            if matches!(s.tok, Tok::Symbol(';')) {
                break;
            }
        }
    }

    fn parse_program(&mut self) -> Result<()> {
        while let Some(spanned) = self.bump() {
            let (line, col) = (spanned.line, spanned.col);
            let name = match spanned.tok {
                Tok::Ident(s) => s,
                Tok::Symbol(';') => continue,
                _ => {
                    return Err(Error::QasmSyntax {
                        line,
                        col,
                        msg: "expected a statement".into(),
                    })
                }
            };
            match name.as_str() {
                "OPENQASM" => {
                    let version = match self.bump() {
                        Some(Spanned {
                            tok: Tok::Number(v),
                            ..
                        }) => v,
                        _ => {
                            return Err(Error::QasmSyntax {
                                line,
                                col,
                                msg: "expected a version number after OPENQASM".into(),
                            })
                        }
                    };
                    if (version - 2.0).abs() > 1e-9 {
                        return Err(Error::QasmSyntax {
                            line,
                            col,
                            msg: format!("unsupported OPENQASM version {version}"),
                        });
                    }
                    self.expect_symbol(';')?;
                }
                "include" => self.skip_to_semicolon(),
                "qreg" => {
                    if self.qreg.is_some() {
                        return Err(Error::QasmSyntax {
                            line,
                            col,
                            msg: "multiple qreg declarations are not supported".into(),
                        });
                    }
                    let reg = self.expect_ident()?;
                    self.expect_symbol('[')?;
                    let size = self.expect_uint()?;
                    self.expect_symbol(']')?;
                    self.expect_symbol(';')?;
                    if size == 0 {
                        return Err(Error::QasmSyntax {
                            line,
                            col,
                            msg: "qreg must have at least one qubit".into(),
                        });
                    }
                    self.qreg = Some((reg, size));
                }
                "creg" => {
                    if self.creg.is_some() {
                        return Err(Error::QasmSyntax {
                            line,
                            col,
                            msg: "multiple creg declarations are not supported".into(),
                        });
                    }
                    let reg = self.expect_ident()?;
                    self.expect_symbol('[')?;
                    let size = self.expect_uint()?;
                    self.expect_symbol(']')?;
                    self.expect_symbol(';')?;
                    self.creg = Some((reg, size));
                }
                "barrier" => self.skip_to_semicolon(),
                "measure" => {
                    let _src = self.parse_operand()?;
                    match self.bump() {
                        Some(Spanned { tok: Tok::Arrow, .. }) => {}
                        _ => {
                            return Err(Error::QasmSyntax {
                                line,
                                col,
                                msg: "expected `->` in measure statement".into(),
                            })
                        }
                    }
                    let _dst = self.parse_operand()?;
                    self.expect_symbol(';')?;
                    self.measured = true;
                }
                gate if GATE_NAMES.contains(&gate) => {
                    self.parse_gate_statement(name, line, col)?;
                }
                other => {
                    return Err(Error::UnsupportedGate {
                        name: other.to_string(),
                        line,
                    });
                }
            }
        }
        Ok(())
    }
}

/// Parse an OpenQASM 2.0 program in the supported subset.
pub fn parse_qasm(text: &str) -> Result<Circuit> {
    let toks = Lexer::new(text).tokenize()?;
    let mut parser = Parser {
        toks,
        pos: 0,
        qreg: None,
        creg: None,
        gates: Vec::new(),
        measured: false,
    };
    parser.parse_program()?;
    let (_, n_qubits) = parser.qreg.ok_or(Error::QasmSyntax {
        line: 1,
        col: 1,
        msg: "program declares no qreg".into(),
    })?;
    let mut circuit = Circuit::new(n_qubits, parser.gates)?;
    circuit.measured = parser.measured;
    Ok(circuit)
}
