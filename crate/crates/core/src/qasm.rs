//! OpenQASM 2.0 emission and a strict parser for the emitted subset.
//!
//! Emitted gate set: `h`, `x`, `ry`, `cx`, `ccx` (all in qelib1.inc), plus
//! `measure`. Multi-controlled gates are decomposed exactly:
//!
//! * negative-polarity controls become an X-sandwich around the positive
//!   form;
//! * an X with k >= 3 controls uses the borrowed-qubit recursion
//!   `ccx(c_k, b, t) . mcx(c_1..c_{k-1}, b) . ccx(c_k, b, t) .
//!   mcx(c_1..c_{k-1}, b)` with any idle qubit `b`, which may carry
//!   arbitrary state and is restored;
//! * a rotation with k >= 2 controls uses the halved-angle recursion
//!   `cry(t/2; c_k) . mcx(c_1..c_{k-1} -> c_k) . cry(-t/2; c_k) .
//!   mcx(c_1..c_{k-1} -> c_k) . mcry(t/2; c_1..c_{k-1})`, with
//!   `cry(t) = ry(t/2) cx ry(-t/2) cx`;
//! * a controlled Hadamard is conjugated through a controlled X:
//!   `ry(pi/4) . mcx . ry(-pi/4)` on the target.
//!
//! Every primitive is real-valued, so decomposed circuits match the direct
//! multi-controlled simulation without any global-phase caveat.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::f64::consts::FRAC_PI_4;
use core::fmt::Write as _;

use crate::circuit::Circuit;
use crate::error::{Error, Result};
use crate::state::{GateKind, GateOp};

/// A `measure q[qubit] -> register[bit];` statement.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MeasureSpec {
    pub qubit: usize,
    pub register: String,
    pub bit: usize,
}

/// Primitive instructions of the emitted subset.
#[derive(Debug, Clone, PartialEq)]
enum Prim {
    H(usize),
    X(usize),
    Ry(f64, usize),
    Cx(usize, usize),
    Ccx(usize, usize, usize),
}

fn mcx_prims(
    controls: &[usize],
    target: usize,
    num_qubits: usize,
    out: &mut Vec<Prim>,
) -> Result<()> {
    match controls {
        [] => out.push(Prim::X(target)),
        [c] => out.push(Prim::Cx(*c, target)),
        [c1, c2] => out.push(Prim::Ccx(*c1, *c2, target)),
        _ => {
            let (rest, last) = controls.split_at(controls.len() - 1);
            let last = last[0];
            let borrow = (0..num_qubits)
                .find(|q| *q != target && !controls.contains(q))
                .ok_or(Error::NoBorrowQubit {
                    controls: controls.len(),
                })?;
            out.push(Prim::Ccx(last, borrow, target));
            mcx_prims(rest, borrow, num_qubits, out)?;
            out.push(Prim::Ccx(last, borrow, target));
            mcx_prims(rest, borrow, num_qubits, out)?;
        }
    }
    Ok(())
}

fn mcry_prims(
    theta: f64,
    controls: &[usize],
    target: usize,
    num_qubits: usize,
    out: &mut Vec<Prim>,
) -> Result<()> {
    match controls {
        [] => out.push(Prim::Ry(theta, target)),
        [c] => {
            out.push(Prim::Ry(theta / 2.0, target));
            out.push(Prim::Cx(*c, target));
            out.push(Prim::Ry(-theta / 2.0, target));
            out.push(Prim::Cx(*c, target));
        }
        _ => {
            let (rest, last) = controls.split_at(controls.len() - 1);
            let last = last[0];
            mcry_prims(theta / 2.0, &[last], target, num_qubits, out)?;
            mcx_prims(rest, last, num_qubits, out)?;
            mcry_prims(-theta / 2.0, &[last], target, num_qubits, out)?;
            mcx_prims(rest, last, num_qubits, out)?;
            mcry_prims(theta / 2.0, rest, target, num_qubits, out)?;
        }
    }
    Ok(())
}

fn decompose_gate(gate: &GateOp, num_qubits: usize, out: &mut Vec<Prim>) -> Result<()> {
    gate.validate(num_qubits)?;
    let negatives: Vec<usize> = gate
        .controls
        .iter()
        .filter(|c| !c.value)
        .map(|c| c.qubit)
        .collect();
    for &q in &negatives {
        out.push(Prim::X(q));
    }
    let positives: Vec<usize> = gate.controls.iter().map(|c| c.qubit).collect();
    match gate.kind {
        GateKind::PauliX => mcx_prims(&positives, gate.target, num_qubits, out)?,
        GateKind::RotationY(theta) => mcry_prims(theta, &positives, gate.target, num_qubits, out)?,
        GateKind::Hadamard => {
            if positives.is_empty() {
                out.push(Prim::H(gate.target));
            } else {
                out.push(Prim::Ry(FRAC_PI_4, gate.target));
                mcx_prims(&positives, gate.target, num_qubits, out)?;
                out.push(Prim::Ry(-FRAC_PI_4, gate.target));
            }
        }
    }
    for &q in negatives.iter().rev() {
        out.push(Prim::X(q));
    }
    Ok(())
}

/// Emit OpenQASM 2.0 for an arbitrary gate list over `num_qubits` qubits,
/// followed by the given measurements.
pub fn export_gates_qasm(
    num_qubits: usize,
    gates: &[GateOp],
    measurements: &[MeasureSpec],
) -> Result<String> {
    let mut prims = Vec::new();
    for gate in gates {
        decompose_gate(gate, num_qubits, &mut prims)?;
    }

    let mut text = String::new();
    text.push_str("OPENQASM 2.0;\n");
    text.push_str("include \"qelib1.inc\";\n");
    let _ = writeln!(text, "qreg q[{num_qubits}];");
    let mut creg_sizes: BTreeMap<&str, usize> = BTreeMap::new();
    for m in measurements {
        let size = creg_sizes.entry(m.register.as_str()).or_insert(0);
        *size = (*size).max(m.bit + 1);
    }
    for (name, size) in &creg_sizes {
        let _ = writeln!(text, "creg {name}[{size}];");
    }
    for prim in &prims {
        match prim {
            Prim::H(t) => {
                let _ = writeln!(text, "h q[{t}];");
            }
            Prim::X(t) => {
                let _ = writeln!(text, "x q[{t}];");
            }
            Prim::Ry(theta, t) => {
                let _ = writeln!(text, "ry({theta}) q[{t}];");
            }
            Prim::Cx(c, t) => {
                let _ = writeln!(text, "cx q[{c}],q[{t}];");
            }
            Prim::Ccx(c1, c2, t) => {
                let _ = writeln!(text, "ccx q[{c1}],q[{c2}],q[{t}];");
            }
        }
    }
    for m in measurements {
        let _ = writeln!(text, "measure q[{}] -> {}[{}];", m.qubit, m.register, m.bit);
    }
    Ok(text)
}

/// Emit a localization circuit with ancilla and location measurements into
/// the `m_anc` and `m_loc` classical registers.
pub fn export_qasm(circuit: &Circuit) -> Result<String> {
    let layout = circuit.layout();
    let mut measurements = Vec::new();
    measurements.push(MeasureSpec {
        qubit: layout.ancilla(),
        register: "m_anc".to_string(),
        bit: 0,
    });
    for (bit, qubit) in layout.location().enumerate() {
        measurements.push(MeasureSpec {
            qubit,
            register: "m_loc".to_string(),
            bit,
        });
    }
    export_gates_qasm(layout.total_qubits(), circuit.gates(), &measurements)
}

/// A parsed program: gate list over the declared qubits plus measurements.
#[derive(Debug, Clone, PartialEq)]
pub struct ParsedProgram {
    pub num_qubits: usize,
    pub gates: Vec<GateOp>,
    pub measurements: Vec<MeasureSpec>,
}

struct RegisterTable {
    // name -> (offset, size)
    qregs: BTreeMap<String, (usize, usize)>,
    cregs: BTreeMap<String, usize>,
    num_qubits: usize,
}

impl RegisterTable {
    fn resolve_qubit(&self, arg: &str, line: usize) -> Result<usize> {
        let (name, index) = parse_indexed(arg, line)?;
        let (offset, size) = self
            .qregs
            .get(name)
            .ok_or_else(|| parse_err(line, format!("unknown quantum register '{name}'")))?;
        if index >= *size {
            return Err(parse_err(
                line,
                format!("index {index} out of range for qreg {name}[{size}]"),
            ));
        }
        Ok(offset + index)
    }
}

fn parse_err(line: usize, message: String) -> Error {
    Error::QasmParse { line, message }
}

fn parse_indexed(arg: &str, line: usize) -> Result<(&str, usize)> {
    let arg = arg.trim();
    let open = arg
        .find('[')
        .ok_or_else(|| parse_err(line, format!("expected reg[index], found '{arg}'")))?;
    if !arg.ends_with(']') {
        return Err(parse_err(line, format!("missing ']' in '{arg}'")));
    }
    let name = &arg[..open];
    let index: usize = arg[open + 1..arg.len() - 1]
        .trim()
        .parse()
        .map_err(|_| parse_err(line, format!("bad register index in '{arg}'")))?;
    if name.is_empty() {
        return Err(parse_err(line, format!("missing register name in '{arg}'")));
    }
    Ok((name, index))
}

fn split_args(args: &str, expected: usize, line: usize) -> Result<Vec<&str>> {
    let parts: Vec<&str> = args.split(',').map(str::trim).collect();
    if parts.len() != expected || parts.iter().any(|p| p.is_empty()) {
        return Err(parse_err(
            line,
            format!("expected {expected} argument(s), found '{args}'"),
        ));
    }
    Ok(parts)
}

fn distinct(qubits: &[usize], line: usize) -> Result<()> {
    for (i, q) in qubits.iter().enumerate() {
        if qubits[..i].contains(q) {
            return Err(parse_err(line, format!("repeated qubit q[{q}]")));
        }
    }
    Ok(())
}

/// Parse the emitted OpenQASM 2.0 subset back into a gate list. Statements
/// must be semicolon-terminated; `//` comments and `barrier` are skipped.
pub fn parse_qasm(text: &str) -> Result<ParsedProgram> {
    let mut table = RegisterTable {
        qregs: BTreeMap::new(),
        cregs: BTreeMap::new(),
        num_qubits: 0,
    };
    let mut gates = Vec::new();
    let mut measurements = Vec::new();
    let mut seen_header = false;

    for (line_idx, raw_line) in text.lines().enumerate() {
        let line = line_idx + 1;
        let code = match raw_line.find("//") {
            Some(pos) => &raw_line[..pos],
            None => raw_line,
        };
        let code = code.trim();
        if code.is_empty() {
            continue;
        }
        if !code.ends_with(';') {
            return Err(parse_err(line, format!("missing ';' after '{code}'")));
        }
        for piece in code.split(';') {
            let stmt = piece.trim();
            if stmt.is_empty() {
                continue;
            }
            if !seen_header {
                if stmt == "OPENQASM 2.0" {
                    seen_header = true;
                    continue;
                }
                return Err(parse_err(
                    line,
                    "file must start with 'OPENQASM 2.0;'".to_string(),
                ));
            }
            if let Some(rest) = stmt.strip_prefix("include") {
                let inc = rest.trim();
                if inc != "\"qelib1.inc\"" {
                    return Err(parse_err(line, format!("unsupported include {inc}")));
                }
                continue;
            }
            if let Some(rest) = stmt.strip_prefix("qreg ") {
                let (name, size) = parse_indexed(rest, line)?;
                if table.qregs.contains_key(name) {
                    return Err(parse_err(line, format!("duplicate qreg '{name}'")));
                }
                table
                    .qregs
                    .insert(name.to_string(), (table.num_qubits, size));
                table.num_qubits += size;
                continue;
            }
            if let Some(rest) = stmt.strip_prefix("creg ") {
                let (name, size) = parse_indexed(rest, line)?;
                table.cregs.insert(name.to_string(), size);
                continue;
            }
            if stmt.starts_with("barrier") {
                continue;
            }
            if let Some(rest) = stmt.strip_prefix("measure ") {
                let parts: Vec<&str> = rest.split("->").map(str::trim).collect();
                if parts.len() != 2 {
                    return Err(parse_err(line, format!("malformed measure '{stmt}'")));
                }
                let qubit = table.resolve_qubit(parts[0], line)?;
                let (creg, bit) = parse_indexed(parts[1], line)?;
                let size = *table
                    .cregs
                    .get(creg)
                    .ok_or_else(|| parse_err(line, format!("unknown creg '{creg}'")))?;
                if bit >= size {
                    return Err(parse_err(
                        line,
                        format!("bit {bit} out of range for creg {creg}[{size}]"),
                    ));
                }
                measurements.push(MeasureSpec {
                    qubit,
                    register: creg.to_string(),
                    bit,
                });
                continue;
            }

            // Gate application.
            let (head, args) = match stmt.find(|c: char| c.is_whitespace() || c == '(') {
                Some(pos) => stmt.split_at(pos),
                None => {
                    return Err(parse_err(line, format!("malformed statement '{stmt}'")));
                }
            };
            match head {
                "h" | "x" => {
                    let parts = split_args(args, 1, line)?;
                    let target = table.resolve_qubit(parts[0], line)?;
                    gates.push(if head == "h" {
                        GateOp::h(target)
                    } else {
                        GateOp::x(target)
                    });
                }
                "ry" => {
                    let rest = args.trim_start();
                    let rest = rest.strip_prefix('(').ok_or_else(|| {
                        parse_err(line, format!("ry needs a parenthesized angle in '{stmt}'"))
                    })?;
                    let close = rest.find(')').ok_or_else(|| {
                        parse_err(line, format!("unclosed angle parenthesis in '{stmt}'"))
                    })?;
                    let theta: f64 = rest[..close].trim().parse().map_err(|_| {
                        parse_err(line, format!("bad angle '{}'", rest[..close].trim()))
                    })?;
                    let parts = split_args(&rest[close + 1..], 1, line)?;
                    let target = table.resolve_qubit(parts[0], line)?;
                    gates.push(GateOp::ry(theta, target));
                }
                "cx" => {
                    let parts = split_args(args, 2, line)?;
                    let control = table.resolve_qubit(parts[0], line)?;
                    let target = table.resolve_qubit(parts[1], line)?;
                    distinct(&[control, target], line)?;
                    gates.push(GateOp::x(target).controlled_on(control, true));
                }
                "ccx" => {
                    let parts = split_args(args, 3, line)?;
                    let c1 = table.resolve_qubit(parts[0], line)?;
                    let c2 = table.resolve_qubit(parts[1], line)?;
                    let target = table.resolve_qubit(parts[2], line)?;
                    distinct(&[c1, c2, target], line)?;
                    gates.push(
                        GateOp::x(target)
                            .controlled_on(c1, true)
                            .controlled_on(c2, true),
                    );
                }
                other => {
                    return Err(parse_err(line, format!("unsupported gate '{other}'")));
                }
            }
        }
    }

    if !seen_header {
        return Err(parse_err(1, "empty program".to_string()));
    }
    if table.num_qubits == 0 {
        return Err(parse_err(1, "no qreg declared".to_string()));
    }
    Ok(ParsedProgram {
        num_qubits: table.num_qubits,
        gates,
        measurements,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::StateVector;
    use alloc::vec;
    use num_complex::Complex64;

    fn states_match(a: &StateVector, b: &StateVector, tol: f64) {
        assert_eq!(a.num_qubits(), b.num_qubits());
        for (x, y) in a.amplitudes().iter().zip(b.amplitudes()) {
            assert!((x - y).norm() <= tol, "amplitude mismatch: {x} vs {y}");
        }
    }

    /// Compare the direct multi-controlled simulation against the emitted
    /// decomposition on every basis state.
    fn check_decomposition(gate: GateOp, num_qubits: usize) {
        let text = export_gates_qasm(num_qubits, core::slice::from_ref(&gate), &[]).unwrap();
        let parsed = parse_qasm(&text).unwrap();
        assert_eq!(parsed.num_qubits, num_qubits);
        let dim = 1usize << num_qubits;
        for basis in 0..dim {
            let mut amps = vec![Complex64::new(0.0, 0.0); dim];
            amps[basis] = Complex64::new(1.0, 0.0);
            let mut direct = StateVector::from_amplitudes(amps.clone()).unwrap();
            direct.apply_gate(&gate).unwrap();
            let mut decomposed = StateVector::from_amplitudes(amps).unwrap();
            decomposed.apply_gates(&parsed.gates).unwrap();
            states_match(&direct, &decomposed, 1e-12);
        }
    }

    #[test]
    fn single_hadamard_emits_header_and_gate() {
        let text = export_gates_qasm(1, &[GateOp::h(0)], &[]).unwrap();
        assert!(text.starts_with("OPENQASM 2.0;\ninclude \"qelib1.inc\";\n"));
        assert!(text.contains("qreg q[1];"));
        assert!(text.contains("h q[0];"));
    }

    #[test]
    fn empty_gate_list_emits_declarations_only() {
        let text = export_gates_qasm(3, &[], &[]).unwrap();
        let parsed = parse_qasm(&text).unwrap();
        assert_eq!(parsed.num_qubits, 3);
        assert!(parsed.gates.is_empty());
        assert!(parsed.measurements.is_empty());
    }

    #[test]
    fn controlled_rotation_round_trips() {
        check_decomposition(GateOp::ry(0.28096, 1).controlled_on(0, true), 2);
    }

    #[test]
    fn double_controlled_rotation_round_trips() {
        check_decomposition(
            GateOp::ry(2.65649, 2)
                .controlled_on(0, true)
                .controlled_on(1, true),
            3,
        );
    }

    #[test]
    fn many_controlled_rotation_round_trips() {
        check_decomposition(
            GateOp::ry(1.2345, 4)
                .controlled_on(0, true)
                .controlled_on(1, false)
                .controlled_on(2, true)
                .controlled_on(3, false),
            6,
        );
    }

    #[test]
    fn multi_controlled_x_round_trips() {
        check_decomposition(
            GateOp::x(3)
                .controlled_on(0, true)
                .controlled_on(1, true)
                .controlled_on(2, true),
            5,
        );
        check_decomposition(
            GateOp::x(4)
                .controlled_on(0, true)
                .controlled_on(1, false)
                .controlled_on(2, true)
                .controlled_on(3, true),
            6,
        );
    }

    #[test]
    fn controlled_hadamard_round_trips() {
        check_decomposition(GateOp::h(1).controlled_on(0, true), 3);
        check_decomposition(
            GateOp::h(2).controlled_on(0, true).controlled_on(1, false),
            4,
        );
    }

    #[test]
    fn decomposition_preserves_superpositions() {
        let gate = GateOp::ry(0.777, 2)
            .controlled_on(0, true)
            .controlled_on(1, false)
            .controlled_on(3, true);
        let text = export_gates_qasm(5, core::slice::from_ref(&gate), &[]).unwrap();
        let parsed = parse_qasm(&text).unwrap();
        let prep: Vec<GateOp> = (0..5).map(GateOp::h).collect();
        let mut direct = StateVector::new(5).unwrap();
        direct.apply_gates(&prep).unwrap();
        direct.apply_gate(&gate).unwrap();
        let mut decomposed = StateVector::new(5).unwrap();
        decomposed.apply_gates(&prep).unwrap();
        decomposed.apply_gates(&parsed.gates).unwrap();
        states_match(&direct, &decomposed, 1e-12);
    }

    #[test]
    fn gate_with_no_free_borrow_qubit_is_rejected() {
        let gate = GateOp::x(0)
            .controlled_on(1, true)
            .controlled_on(2, true)
            .controlled_on(3, true);
        assert!(matches!(
            export_gates_qasm(4, &[gate], &[]),
            Err(Error::NoBorrowQubit { controls: 3 })
        ));
    }

    #[test]
    fn measurements_are_emitted_and_parsed() {
        let measures = vec![
            MeasureSpec {
                qubit: 0,
                register: "m_anc".to_string(),
                bit: 0,
            },
            MeasureSpec {
                qubit: 2,
                register: "m_loc".to_string(),
                bit: 0,
            },
        ];
        let text = export_gates_qasm(3, &[GateOp::h(0)], &measures).unwrap();
        assert!(text.contains("creg m_anc[1];"));
        assert!(text.contains("creg m_loc[1];"));
        assert!(text.contains("measure q[0] -> m_anc[0];"));
        let parsed = parse_qasm(&text).unwrap();
        assert_eq!(parsed.measurements, measures);
    }

    #[test]
    fn parser_rejects_malformed_programs() {
        assert!(matches!(
            parse_qasm("qreg q[2];"),
            Err(Error::QasmParse { line: 1, .. })
        ));
        assert!(matches!(
            parse_qasm("OPENQASM 2.0;\nqreg q[2];\nfoo q[0];"),
            Err(Error::QasmParse { line: 3, .. })
        ));
        assert!(matches!(
            parse_qasm("OPENQASM 2.0;\nqreg q[2];\nh q[5];"),
            Err(Error::QasmParse { line: 3, .. })
        ));
        assert!(matches!(
            parse_qasm("OPENQASM 2.0;\nqreg q[2];\ncx q[0],q[0];"),
            Err(Error::QasmParse { line: 3, .. })
        ));
        assert!(matches!(
            parse_qasm("OPENQASM 2.0;\nqreg q[2];\nh q[0]"),
            Err(Error::QasmParse { line: 3, .. })
        ));
    }

    #[test]
    fn comments_and_barriers_are_skipped() {
        let text = "OPENQASM 2.0;\n// preamble\nqreg q[1];\nh q[0]; // flip\nbarrier q;\n";
        let parsed = parse_qasm(text).unwrap();
        assert_eq!(parsed.gates, vec![GateOp::h(0)]);
    }

    #[test]
    fn negative_controls_are_x_sandwiched_in_the_text() {
        let gate = GateOp::x(1).controlled_on(0, false);
        let text = export_gates_qasm(2, &[gate], &[]).unwrap();
        let lines: Vec<&str> = text.lines().skip(3).collect();
        assert_eq!(lines, vec!["x q[0];", "cx q[0],q[1];", "x q[0];"]);
    }
}
