//! OpenQASM 2.0 subset: a single `qreg`, the built-in gate names of
//! [`GateKind`], and `measure`. `include` and `creg` lines are accepted and
//! ignored.
//!
//! Trailing `measure` statements coalesce into one terminal measurement in
//! statement order. A `measure` followed by further gates stays a
//! single-qubit mid-circuit measurement.

use std::f64::consts::PI;
use std::fmt::Write as _;

use crate::circuit::{Circuit, GateKind, GateOp};
use crate::error::{Result, SimError};

fn parse_err(line: usize, token: &str, message: impl Into<String>) -> SimError {
    SimError::Parse { line, token: token.to_string(), message: message.into() }
}

/// Strips `//` comments and splits into `;`-terminated statements tagged
/// with the line each statement starts on.
fn statements(text: &str) -> Result<Vec<(usize, String)>> {
    let mut out = Vec::new();
    let mut current = String::new();
    let mut start_line = 1;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split("//").next().unwrap_or("");
        for ch in line.chars() {
            if ch == ';' {
                let stmt = current.trim().to_string();
                if !stmt.is_empty() {
                    out.push((start_line, stmt));
                }
                current.clear();
            } else {
                if current.trim().is_empty() && !ch.is_whitespace() {
                    start_line = line_no;
                }
                current.push(ch);
            }
        }
        current.push(' ');
    }
    let rest = current.trim();
    if !rest.is_empty() {
        return Err(parse_err(start_line, rest, "missing `;`"));
    }
    Ok(out)
}

/// Recursive-descent evaluator for gate parameters: numbers, `pi`,
/// `+ - * /`, unary minus and parentheses.
struct ExprParser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> ExprParser<'a> {
    fn eval(text: &'a str) -> Option<f64> {
        let mut p = ExprParser { src: text.as_bytes(), pos: 0 };
        let v = p.expr()?;
        p.skip_ws();
        (p.pos == p.src.len()).then_some(v)
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn expr(&mut self) -> Option<f64> {
        let mut v = self.term()?;
        while let Some(op @ (b'+' | b'-')) = self.peek() {
            self.pos += 1;
            let rhs = self.term()?;
            v = if op == b'+' { v + rhs } else { v - rhs };
        }
        Some(v)
    }

    fn term(&mut self) -> Option<f64> {
        let mut v = self.factor()?;
        while let Some(op @ (b'*' | b'/')) = self.peek() {
            self.pos += 1;
            let rhs = self.factor()?;
            v = if op == b'*' { v * rhs } else { v / rhs };
        }
        Some(v)
    }

    fn factor(&mut self) -> Option<f64> {
        match self.peek()? {
            b'-' => {
                self.pos += 1;
                Some(-self.factor()?)
            }
            b'+' => {
                self.pos += 1;
                self.factor()
            }
            b'(' => {
                self.pos += 1;
                let v = self.expr()?;
                (self.peek()? == b')').then(|| self.pos += 1)?;
                Some(v)
            }
            b'p' => {
                self.src[self.pos..].starts_with(b"pi").then(|| self.pos += 2)?;
                Some(PI)
            }
            _ => self.number(),
        }
    }

    fn number(&mut self) -> Option<f64> {
        let start = self.pos;
        while let Some(&c) = self.src.get(self.pos) {
            let exp_sign = (c == b'-' || c == b'+')
                && self.pos > start
                && matches!(self.src[self.pos - 1], b'e' | b'E');
            if c.is_ascii_digit() || c == b'.' || c == b'e' || c == b'E' || exp_sign {
                self.pos += 1;
            } else {
                break;
            }
        }
        std::str::from_utf8(&self.src[start..self.pos]).ok()?.parse().ok()
    }
}

struct Register {
    name: String,
    size: usize,
}

/// Parses `name[idx]` or a bare register name (expanded to every qubit).
fn parse_qubits(arg: &str, reg: &Register, line: usize) -> Result<Vec<usize>> {
    let arg = arg.trim();
    match arg.find('[') {
        Some(open) => {
            let name = arg[..open].trim();
            let close = arg
                .rfind(']')
                .ok_or_else(|| parse_err(line, arg, "unterminated index"))?;
            if name != reg.name {
                return Err(parse_err(line, name, "unknown quantum register"));
            }
            let idx: usize = arg[open + 1..close]
                .trim()
                .parse()
                .map_err(|_| parse_err(line, arg, "bad qubit index"))?;
            if idx >= reg.size {
                return Err(parse_err(line, arg, format!("qubit index out of range (qreg size {})", reg.size)));
            }
            Ok(vec![idx])
        }
        None if arg == reg.name => Ok((0..reg.size).collect()),
        None => Err(parse_err(line, arg, "unknown quantum register")),
    }
}

fn gate_kind(name: &str, params: &[f64], line: usize) -> Result<GateKind> {
    let expect = |count: usize| -> Result<()> {
        if params.len() == count {
            Ok(())
        } else {
            Err(parse_err(line, name, format!("expected {count} parameter(s)")))
        }
    };
    let kind = match name {
        "h" => GateKind::H,
        "x" => GateKind::X,
        "y" => GateKind::Y,
        "z" => GateKind::Z,
        "s" => GateKind::S,
        "sdg" => GateKind::Sdg,
        "t" => GateKind::T,
        "tdg" => GateKind::Tdg,
        "cx" | "CX" => GateKind::Cnot,
        "cz" => GateKind::Cz,
        "swap" => GateKind::Swap,
        "rx" | "ry" | "rz" => {
            expect(1)?;
            match name {
                "rx" => GateKind::rx(params[0]),
                "ry" => GateKind::ry(params[0]),
                _ => GateKind::rz(params[0]),
            }
        }
        _ => return Err(parse_err(line, name, "unsupported gate")),
    };
    if !matches!(kind, GateKind::Rx(_) | GateKind::Ry(_) | GateKind::Rz(_)) {
        expect(0)?;
    }
    Ok(kind)
}

pub fn parse_qasm(text: &str) -> Result<Circuit> {
    let mut reg: Option<Register> = None;
    let mut ops: Vec<GateOp> = Vec::new();
    let mut pending_measure: Vec<usize> = Vec::new();

    for (line, stmt) in statements(text)? {
        let keyword = stmt.split_whitespace().next().unwrap_or("");
        let head_end = stmt.find(|c: char| c.is_whitespace() || c == '(').unwrap_or(stmt.len());
        let head = &stmt[..head_end];
        match keyword {
            "OPENQASM" => {
                let version = stmt[8..].trim();
                if !version.starts_with('2') {
                    return Err(parse_err(line, version, "only OpenQASM 2.0 is supported"));
                }
                continue;
            }
            "include" | "creg" => continue,
            "qreg" => {
                if reg.is_some() {
                    return Err(parse_err(line, "qreg", "only one quantum register is supported"));
                }
                let decl = stmt[4..].trim();
                let (name, size) = decl
                    .split_once('[')
                    .and_then(|(n, rest)| Some((n.trim(), rest.strip_suffix(']')?.trim().parse().ok()?)))
                    .ok_or_else(|| parse_err(line, decl, "malformed qreg"))?;
                if size == 0 {
                    return Err(parse_err(line, decl, "empty register"));
                }
                reg = Some(Register { name: name.to_string(), size });
                continue;
            }
            _ => {}
        }
        let reg = reg
            .as_ref()
            .ok_or_else(|| parse_err(line, keyword, "statement before qreg"))?;
        if head == "measure" {
            let target = stmt[7..].split("->").next().unwrap_or("");
            pending_measure.extend(parse_qubits(target, reg, line)?);
            continue;
        }

        let (name, params, args) = match stmt.find('(') {
            Some(open) if open == head_end => {
                let close = stmt
                    .find(')')
                    .ok_or_else(|| parse_err(line, head, "unterminated parameter list"))?;
                let params = stmt[open + 1..close]
                    .split(',')
                    .map(|p| ExprParser::eval(p).ok_or_else(|| parse_err(line, p.trim(), "bad parameter")))
                    .collect::<Result<Vec<_>>>()?;
                (head, params, &stmt[close + 1..])
            }
            _ => (head, Vec::new(), &stmt[head_end..]),
        };
        let kind = gate_kind(name, &params, line)?;
        let qubit_args = args
            .split(',')
            .map(|a| parse_qubits(a, reg, line))
            .collect::<Result<Vec<_>>>()?;

        for q in pending_measure.drain(..) {
            ops.push(GateOp::single(GateKind::Measure, q));
        }
        match (kind.arity(), qubit_args.as_slice()) {
            (Some(1), [qs]) => ops.extend(qs.iter().map(|&q| GateOp::single(kind.clone(), q))),
            (Some(2), [a, b]) if a.len() == 1 && b.len() == 1 => {
                if a[0] == b[0] {
                    return Err(parse_err(line, name, "repeated qubit"));
                }
                ops.push(GateOp::pair(kind, a[0], b[0]));
            }
            _ => return Err(parse_err(line, name, "wrong number of qubit arguments")),
        }
    }

    let reg = reg.ok_or_else(|| parse_err(1, "", "no qreg declared"))?;
    if !pending_measure.is_empty() {
        let mut seen = Vec::new();
        for q in pending_measure {
            if !seen.contains(&q) {
                seen.push(q);
            }
        }
        ops.push(GateOp::new(GateKind::Measure, seen));
    }
    Circuit::from_ops(reg.size, ops)
}

/// Renders a circuit as OpenQASM 2.0 that [`parse_qasm`] reads back to an
/// equal circuit. Channels and explicit matrices cannot be exported.
pub fn emit_qasm(circuit: &Circuit) -> Result<String> {
    let n = circuit.n_qubits();
    let mut out = String::from("OPENQASM 2.0;\ninclude \"qelib1.inc\";\n");
    writeln!(out, "qreg q[{n}];").unwrap();
    if circuit.ops().iter().any(|op| op.kind == GateKind::Measure) {
        writeln!(out, "creg c[{n}];").unwrap();
    }
    for op in circuit.ops() {
        let qs = &op.support;
        match &op.kind {
            GateKind::BitFlip(_) | GateKind::Depolarize(_) | GateKind::Matrix1(_) | GateKind::Matrix2(_) => {
                return Err(SimError::UnsupportedExport(op.kind.to_string()));
            }
            GateKind::Measure => {
                for q in qs {
                    writeln!(out, "measure q[{q}] -> c[{q}];").unwrap();
                }
            }
            GateKind::Rx(a) | GateKind::Ry(a) | GateKind::Rz(a) => {
                writeln!(out, "{}({:?}) q[{}];", op.kind.name(), a.radians(), qs[0]).unwrap();
            }
            kind if qs.len() == 2 => {
                writeln!(out, "{} q[{}],q[{}];", kind.name(), qs[0], qs[1]).unwrap();
            }
            kind => writeln!(out, "{} q[{}];", kind.name(), qs[0]).unwrap(),
        }
    }
    Ok(out)
}
