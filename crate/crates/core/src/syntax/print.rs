//! Pretty printer. `parse_command(print_command(c)) == c` for every tree,
//! which the proptests pin down.

use super::*;
use std::fmt::Write;

pub fn print_command(c: &Command, vars: &[String]) -> String {
    let mut out = String::new();
    cmd(&mut out, c, vars);
    out
}

fn cmd(out: &mut String, c: &Command, vars: &[String]) {
    match c {
        Command::Atomic(a) => atomic(out, a, vars),
        Command::Seq(l, r) => {
            // `;` parses right-associatively, so a seq in left position needs
            // explicit grouping
            if matches!(**l, Command::Seq(..)) {
                out.push('(');
                cmd(out, l, vars);
                out.push(')');
            } else {
                cmd(out, l, vars);
            }
            out.push_str(" ; ");
            cmd(out, r, vars);
        }
        Command::Choice(l, r) => {
            out.push('(');
            cmd(out, l, vars);
            out.push_str(" [+] ");
            cmd(out, r, vars);
            out.push(')');
        }
        Command::Star(inner) => {
            out.push('(');
            cmd(out, inner, vars);
            out.push_str(")*");
        }
    }
}

fn atomic(out: &mut String, a: &AtomicCmd, vars: &[String]) {
    match a {
        AtomicCmd::Skip => out.push_str("skip"),
        AtomicCmd::Assign(x, e) => {
            let _ = write!(out, "{} := {}", vars[*x], print_aexp(e, vars));
        }
        AtomicCmd::Assume(b) => {
            let _ = write!(out, "({})?", print_bexp(b, vars));
        }
        AtomicCmd::Havoc(x) => {
            let _ = write!(out, "{} := nondet()", vars[*x]);
        }
        AtomicCmd::Alloc(x) => {
            let _ = write!(out, "{} := alloc()", vars[*x]);
        }
        AtomicCmd::Free(x) => {
            let _ = write!(out, "free({})", vars[*x]);
        }
        AtomicCmd::Load(x, y) => {
            let _ = write!(out, "{} := [{}]", vars[*x], vars[*y]);
        }
        AtomicCmd::Store(x, y) => {
            let _ = write!(out, "[{}] := {}", vars[*x], vars[*y]);
        }
    }
}

pub fn print_bexp(b: &BExp, vars: &[String]) -> String {
    let mut out = String::new();
    bexp(&mut out, b, vars, false);
    out
}

/// `rhs_of_and` forces parentheses around a nested `&&` in right position
/// (the parser folds `&&` to the left).
fn bexp(out: &mut String, b: &BExp, vars: &[String], rhs_of_and: bool) {
    // sugar reintroduced on output: `!false` prints as `true`,
    // `!(!a && !b)` prints as `a || b`; both reparse to the same tree
    if let BExp::Not(inner) = b {
        if **inner == BExp::False {
            out.push_str("true");
            return;
        }
        if let BExp::And(l, r) = &**inner {
            if let (BExp::Not(dl), BExp::Not(dr)) = (&**l, &**r) {
                out.push('(');
                bexp(out, dl, vars, false);
                out.push_str(" || ");
                bexp(out, dr, vars, false);
                out.push(')');
                return;
            }
        }
    }
    match b {
        BExp::False => out.push_str("false"),
        BExp::Not(inner) => {
            out.push('!');
            match **inner {
                BExp::Not(_) => bexp(out, inner, vars, false),
                _ => {
                    out.push('(');
                    bexp(out, inner, vars, false);
                    out.push(')');
                }
            }
        }
        BExp::And(l, r) => {
            if rhs_of_and {
                out.push('(');
            }
            bexp(out, l, vars, false);
            out.push_str(" && ");
            bexp(out, r, vars, true);
            if rhs_of_and {
                out.push(')');
            }
        }
        BExp::Cmp(op, l, r) => {
            let opstr = match op {
                CmpOp::Eq => "=",
                CmpOp::Ne => "!=",
                CmpOp::Lt => "<",
                CmpOp::Le => "<=",
                CmpOp::Gt => ">",
                CmpOp::Ge => ">=",
            };
            let _ = write!(out, "{} {} {}", print_aexp(l, vars), opstr, print_aexp(r, vars));
        }
    }
}

pub fn print_aexp(a: &AExp, vars: &[String]) -> String {
    let mut out = String::new();
    aexp(&mut out, a, vars, 0, false);
    out
}

fn aexp(out: &mut String, a: &AExp, vars: &[String], parent_prec: u8, rhs: bool) {
    match a {
        AExp::Lit(n) => {
            let _ = write!(out, "{n}");
        }
        AExp::Var(x) => out.push_str(&vars[*x]),
        AExp::Bin(op, l, r) => {
            let (prec, opstr) = match op {
                ABinOp::Add => (1, "+"),
                ABinOp::Sub => (1, "-"),
                ABinOp::Mul => (2, "*"),
                ABinOp::Mod => (2, "mod"),
            };
            let need = prec < parent_prec || (prec == parent_prec && rhs);
            if need {
                out.push('(');
            }
            aexp(out, l, vars, prec, false);
            let _ = write!(out, " {opstr} ");
            aexp(out, r, vars, prec, true);
            if need {
                out.push(')');
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::super::{parse_command, parse_program};
    use super::*;

    fn roundtrip(src: &str) {
        let p = parse_program(src).unwrap();
        let printed = print_command(&p.body, &p.vars);
        let again = parse_command(&printed, &p.vars, p.heap_mode()).unwrap();
        assert_eq!(again, p.body, "printed as {printed}");
    }

    #[test]
    fn prints_spec_forms() {
        let p = parse_program("vars x; ((x > 0)?)*").unwrap();
        assert_eq!(print_command(&p.body, &p.vars), "((x > 0)?)*");
        let p = parse_program("vars x; skip").unwrap();
        assert_eq!(print_command(&p.body, &p.vars), "skip");
    }

    #[test]
    fn roundtrips() {
        roundtrip("vars x, y, z; if (x mod 2 = 0) { if (y mod 2 = 1) { z := 42 } else { skip } } else { skip }");
        roundtrip("vars x, n; n := nondet(); ((n > 0)? ; x := x + n ; n := nondet())* ; (n <= 0)?");
        roundtrip("vars x; while (x < 3) { x := x * 2 }");
        roundtrip("vars x, y; heap locs 2 ints 0..1; x := alloc() ; [x] := y ; y := [x] ; free(x)");
        roundtrip("vars x, y; (x := 1 - x - 1 [+] y := x * (y + 1))");
        roundtrip("vars x; (x = 0 || x > 2 && x < 1)?");
    }
}
