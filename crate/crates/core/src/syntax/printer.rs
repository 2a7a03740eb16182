use std::fmt;

use super::Formula;

const IFF: u8 = 1;
const IMPLIES: u8 = 2;
const OR: u8 = 3;
const AND: u8 = 4;
const UNARY: u8 = 5;

fn precedence(f: &Formula) -> u8 {
    match f {
        Formula::Iff(..) => IFF,
        Formula::Implies(..) => IMPLIES,
        Formula::Or(..) => OR,
        Formula::And(..) => AND,
        _ => UNARY,
    }
}

fn write_at(f: &Formula, min: u8, out: &mut fmt::Formatter<'_>) -> fmt::Result {
    if precedence(f) < min {
        out.write_str("(")?;
        write_formula(f, out)?;
        out.write_str(")")
    } else {
        write_formula(f, out)
    }
}

fn write_modal(out: &mut fmt::Formatter<'_>, head: fmt::Arguments, body: &Formula) -> fmt::Result {
    out.write_fmt(head)?;
    out.write_str(" ")?;
    write_at(body, UNARY, out)
}

fn write_formula(f: &Formula, out: &mut fmt::Formatter<'_>) -> fmt::Result {
    match f {
        Formula::Atom(p) => write!(out, "{p}"),
        Formula::True => out.write_str("true"),
        Formula::False => out.write_str("false"),
        Formula::Not(g) => {
            out.write_str("!")?;
            write_at(g, UNARY, out)
        }
        // left associative
        Formula::And(l, r) | Formula::Or(l, r) | Formula::Iff(l, r) => {
            let (p, sym) = match f {
                Formula::And(..) => (AND, " & "),
                Formula::Or(..) => (OR, " | "),
                _ => (IFF, " <-> "),
            };
            write_at(l, p, out)?;
            out.write_str(sym)?;
            write_at(r, p + 1, out)
        }
        Formula::Implies(l, r) => {
            write_at(l, IMPLIES + 1, out)?;
            out.write_str(" -> ")?;
            write_at(r, IMPLIES, out)
        }
        Formula::E(n, g) => write_modal(out, format_args!("E[{n}]"), g),
        Formula::S(n, g) => write_modal(out, format_args!("S[{n}]"), g),
        Formula::C(n, g) => write_modal(out, format_args!("C[{n}]"), g),
        Formula::D(n, g) => write_modal(out, format_args!("D[{n}]"), g),
        Formula::B(i, n, g) => write_modal(out, format_args!("B[{i};{n}]"), g),
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_formula(self, f)
    }
}
