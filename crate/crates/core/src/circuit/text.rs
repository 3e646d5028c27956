//! Line-oriented text format.
//!
//! ```text
//! wires 3 clbits 2
//! meta name demo
//! ry 1 0.7853981633974483   # comment
//! cx 1 2
//! cif 1 0 h 0
//! barrier 0 1 2
//! meas 2 0
//! ```

use std::fmt::Write as _;

use super::{Circuit, Instruction};
use crate::error::{Error, Result};

pub(crate) fn mnemonic(instr: &Instruction) -> &'static str {
    use Instruction::*;
    match instr {
        RotY { .. } => "ry",
        RotZ { .. } => "rz",
        Hadamard(_) => "h",
        PauliX(_) => "x",
        SqrtX(_) => "sx",
        TGate(_) => "t",
        Cnot { .. } => "cx",
        Swap(..) => "swap",
        Measure { .. } => "meas",
        Barrier(_) => "barrier",
        ClassicallyControlled { .. } => "cif",
    }
}

fn write_instr(out: &mut String, instr: &Instruction) {
    use Instruction::*;
    let m = mnemonic(instr);
    match instr {
        RotY { wire, angle } | RotZ { wire, angle } => write!(out, "{m} {wire} {angle}"),
        Hadamard(w) | PauliX(w) | SqrtX(w) | TGate(w) => write!(out, "{m} {w}"),
        Cnot { control, target } => write!(out, "{m} {control} {target}"),
        Swap(a, b) => write!(out, "{m} {a} {b}"),
        Measure { wire, clbit } => write!(out, "{m} {wire} {clbit}"),
        Barrier(ws) => {
            out.push_str(m);
            for w in ws {
                let _ = write!(out, " {w}");
            }
            Ok(())
        }
        ClassicallyControlled {
            clbit,
            value,
            inner,
        } => {
            let _ = write!(out, "{m} {clbit} {} ", u8::from(*value));
            write_instr(out, inner);
            Ok(())
        }
    }
    .expect("writing to a String cannot fail");
}

pub fn serialize(circuit: &Circuit) -> String {
    let mut out = format!("wires {} clbits {}\n", circuit.n_wires, circuit.n_clbits);
    for (k, v) in &circuit.metadata {
        let _ = writeln!(out, "meta {k} {v}");
    }
    for instr in &circuit.instructions {
        write_instr(&mut out, instr);
        out.push('\n');
    }
    out
}

struct Cursor<'a> {
    line: usize,
    tokens: &'a [&'a str],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn err(&self, token: &str, message: impl Into<String>) -> Error {
        Error::Parse {
            line: self.line,
            token: token.to_string(),
            message: message.into(),
        }
    }

    fn next(&mut self, what: &str) -> Result<&'a str> {
        let tok = self
            .tokens
            .get(self.pos)
            .copied()
            .ok_or_else(|| self.err("<eol>", format!("expected {what}")))?;
        self.pos += 1;
        Ok(tok)
    }

    fn index(&mut self, what: &str) -> Result<usize> {
        let tok = self.next(what)?;
        tok.parse()
            .map_err(|_| self.err(tok, format!("expected {what}")))
    }

    fn angle(&mut self) -> Result<f64> {
        let tok = self.next("angle")?;
        let a: f64 = tok.parse().map_err(|_| self.err(tok, "expected angle"))?;
        if a.is_finite() {
            Ok(a)
        } else {
            Err(self.err(tok, "angle must be finite"))
        }
    }

    fn instruction(&mut self, nested: bool) -> Result<Instruction> {
        let name = self.next("instruction")?;
        let instr = match name {
            "ry" => Instruction::ry(self.index("wire")?, self.angle()?),
            "rz" => Instruction::rz(self.index("wire")?, self.angle()?),
            "h" => Instruction::Hadamard(self.index("wire")?),
            "x" => Instruction::PauliX(self.index("wire")?),
            "sx" => Instruction::SqrtX(self.index("wire")?),
            "t" => Instruction::TGate(self.index("wire")?),
            "cx" => Instruction::cx(self.index("control")?, self.index("target")?),
            "swap" => Instruction::Swap(self.index("wire")?, self.index("wire")?),
            "meas" => Instruction::measure(self.index("wire")?, self.index("clbit")?),
            "barrier" => {
                let mut ws = Vec::new();
                while self.pos < self.tokens.len() {
                    ws.push(self.index("wire")?);
                }
                Instruction::Barrier(ws)
            }
            "cif" if !nested => {
                let clbit = self.index("clbit")?;
                let tok = self.next("condition value")?;
                let value = match tok {
                    "0" => false,
                    "1" => true,
                    _ => return Err(self.err(tok, "condition must be 0 or 1")),
                };
                let inner = self.instruction(true)?;
                Instruction::cif(clbit, value, inner)
            }
            "cif" => return Err(self.err(name, "nested classical control")),
            other => return Err(self.err(other, "unknown instruction")),
        };
        Ok(instr)
    }
}

pub fn parse(text: &str) -> Result<Circuit> {
    let mut circuit: Option<Circuit> = None;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let tokens: Vec<&str> = body.split_whitespace().collect();
        let mut cur = Cursor {
            line,
            tokens: &tokens,
            pos: 0,
        };
        let Some(c) = circuit.as_mut() else {
            if tokens.len() != 4 || tokens[0] != "wires" || tokens[2] != "clbits" {
                return Err(cur.err(tokens[0], "expected header `wires N clbits M`"));
            }
            cur.pos = 1;
            let n_wires = cur.index("wire count")?;
            cur.pos = 3;
            let n_clbits = cur.index("clbit count")?;
            circuit = Some(Circuit::new(n_wires, n_clbits));
            continue;
        };
        if tokens[0] == "meta" {
            let key = tokens
                .get(1)
                .ok_or_else(|| cur.err("meta", "metadata key missing"))?;
            let value = body["meta".len()..]
                .trim_start()
                .strip_prefix(key)
                .unwrap_or("")
                .trim();
            c.set_meta(key, value);
            continue;
        }
        let instr = cur.instruction(false)?;
        if cur.pos != tokens.len() {
            return Err(cur.err(tokens[cur.pos], "unexpected trailing token"));
        }
        instr
            .check(c.n_wires, c.n_clbits, false)
            .map_err(|e| cur.err(tokens[0], e.to_string()))?;
        c.push(instr);
    }
    circuit.ok_or_else(|| Error::Parse {
        line: text.lines().count().max(1),
        token: "<eof>".into(),
        message: "missing header".into(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_circuit_is_header_only() {
        let c = Circuit::new(3, 2);
        let text = serialize(&c);
        assert_eq!(text, "wires 3 clbits 2\n");
        assert_eq!(parse(&text).unwrap(), c);
    }

    #[test]
    fn cx_line_parses() {
        let c = parse("wires 2 clbits 0\ncx 0 1\n").unwrap();
        assert_eq!(c.instructions, vec![Instruction::cx(0, 1)]);
    }

    #[test]
    fn comments_and_blank_lines_are_ignored() {
        let c = parse("# header next\n\nwires 2 clbits 1 # two wires\nh 0 # hadamard\n").unwrap();
        assert_eq!(c.instructions, vec![Instruction::Hadamard(0)]);
    }

    #[test]
    fn unknown_gate_reports_line_and_token() {
        match parse("wires 2 clbits 0\nh 0\nccx 0 1\n") {
            Err(Error::Parse { line, token, .. }) => {
                assert_eq!(line, 3);
                assert_eq!(token, "ccx");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn syntax_errors_are_located() {
        match parse("wires 2 clbits 0\nry 0 abc\n") {
            Err(Error::Parse { line, token, .. }) => {
                assert_eq!((line, token.as_str()), (2, "abc"));
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(parse("cx 0 1\n").is_err());
        assert!(parse("wires 2 clbits 0\ncx 0 5\n").is_err());
        assert!(parse("wires 2 clbits 1\ncif 0 1 cif 0 1 x 0\n").is_err());
        assert!(parse("wires 2 clbits 0\ncx 0 1 1\n").is_err());
    }

    #[test]
    fn full_vocabulary_round_trips() {
        let mut c = Circuit::new(3, 2);
        c.set_meta("name", "all gates");
        c.extend([
            Instruction::ry(0, -0.25),
            Instruction::rz(1, 1e-9),
            Instruction::Hadamard(2),
            Instruction::PauliX(0),
            Instruction::SqrtX(1),
            Instruction::TGate(2),
            Instruction::cx(2, 0),
            Instruction::Swap(0, 1),
            Instruction::Barrier(vec![0, 2]),
            Instruction::measure(1, 1),
            Instruction::cif(1, true, Instruction::PauliX(2)),
        ]);
        let text = serialize(&c);
        let back = parse(&text).unwrap();
        assert_eq!(back, c);
        assert_eq!(serialize(&back), text);
    }
}
