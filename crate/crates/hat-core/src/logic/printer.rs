//! Pretty-printer for the surface syntax.
//!
//! Output reparses to a structurally equal AST. The printer recognizes the
//! expansion patterns of `&`, `A`, `p+` and `p*` and prints them in sugared
//! form; every other node is printed with its core constructor. Because the
//! sugared forms expand to exactly the matched ASTs, the round trip is the
//! identity.

use super::{Formula, Var};

const QUANT: u8 = 0;
const OR: u8 = 2;
const AND: u8 = 3;
const NOT: u8 = 4;
const ATOM: u8 = 5;

pub(super) fn print(f: &Formula) -> String {
    let mut out = String::new();
    emit(f, QUANT, &mut out);
    out
}

fn as_and(f: &Formula) -> Option<(&Formula, &Formula)> {
    if let Formula::Not(inner) = f {
        if let Formula::Or(l, r) = &**inner {
            if let (Formula::Not(a), Formula::Not(b)) = (&**l, &**r) {
                return Some((a, b));
            }
        }
    }
    None
}

fn as_forall(f: &Formula) -> Option<(&Var, &Formula)> {
    if let Formula::Not(inner) = f {
        if let Formula::Exists(v, body) = &**inner {
            if let Formula::Not(payload) = &**body {
                return Some((v, payload));
            }
        }
    }
    None
}

fn as_plus(f: &Formula) -> Option<(&str, &Var, &Var)> {
    if let Formula::Tc { bound, body, args } = f {
        if bound.0 == "v1" && bound.1 == "v2" {
            if let Formula::Atom(p, atom_args) = &**body {
                if atom_args.len() == 2 && atom_args[0] == "v1" && atom_args[1] == "v2" {
                    return Some((p, &args.0, &args.1));
                }
            }
        }
    }
    None
}

fn as_star(f: &Formula) -> Option<(&str, &Var, &Var)> {
    if let Formula::Or(l, r) = f {
        if let Some((p, a, b)) = as_plus(l) {
            if let Formula::Atom(eq, eq_args) = &**r {
                if eq == super::EQ && eq_args.len() == 2 && &eq_args[0] == a && &eq_args[1] == b {
                    return Some((p, a, b));
                }
            }
        }
    }
    None
}

fn level(f: &Formula) -> u8 {
    match f {
        Formula::False | Formula::True | Formula::Atom(..) | Formula::SetMember(..) => ATOM,
        Formula::Tc { .. } => ATOM,
        Formula::Or(..) => {
            if as_star(f).is_some() {
                ATOM
            } else {
                OR
            }
        }
        Formula::Not(..) => {
            if as_and(f).is_some() {
                AND
            } else if as_forall(f).is_some() {
                QUANT
            } else {
                NOT
            }
        }
        Formula::Exists(..) | Formula::ExistsSets(..) => QUANT,
    }
}

fn emit(f: &Formula, min: u8, out: &mut String) {
    if level(f) < min {
        out.push('(');
        write_node(f, out);
        out.push(')');
    } else {
        write_node(f, out);
    }
}

fn write_node(f: &Formula, out: &mut String) {
    if let Some((p, a, b)) = as_star(f) {
        out.push_str(p);
        out.push_str("*(");
        out.push_str(a);
        out.push(',');
        out.push_str(b);
        out.push(')');
        return;
    }
    if let Some((l, r)) = as_and(f) {
        emit(l, AND, out);
        out.push_str(" & ");
        emit(r, AND + 1, out);
        return;
    }
    if let Some((v, body)) = as_forall(f) {
        out.push_str("A ");
        out.push_str(v);
        let mut rest = body;
        while let Some((v2, body2)) = as_forall(rest) {
            out.push(',');
            out.push_str(v2);
            rest = body2;
        }
        out.push_str(": ");
        emit(rest, QUANT, out);
        return;
    }
    match f {
        Formula::False => out.push('0'),
        Formula::True => out.push('1'),
        Formula::Atom(p, args) => {
            out.push_str(p);
            out.push('(');
            for (i, a) in args.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                out.push_str(a);
            }
            out.push(')');
        }
        Formula::Not(inner) => {
            out.push('!');
            emit(inner, NOT, out);
        }
        Formula::Or(l, r) => {
            emit(l, OR, out);
            out.push_str(" | ");
            emit(r, OR + 1, out);
        }
        Formula::Exists(v, body) => {
            out.push_str("E ");
            out.push_str(v);
            let mut rest: &Formula = body;
            while let Formula::Exists(v2, body2) = rest {
                out.push(',');
                out.push_str(v2);
                rest = body2;
            }
            out.push_str(": ");
            emit(rest, QUANT, out);
        }
        Formula::Tc { bound, body, args } => {
            if let Some((p, a, b)) = as_plus(f) {
                out.push_str(p);
                out.push_str("+(");
                out.push_str(a);
                out.push(',');
                out.push_str(b);
                out.push(')');
                return;
            }
            out.push_str("TC(");
            out.push_str(&bound.0);
            out.push(',');
            out.push_str(&bound.1);
            out.push_str("; ");
            emit(body, QUANT, out);
            out.push_str(")(");
            out.push_str(&args.0);
            out.push(',');
            out.push_str(&args.1);
            out.push(')');
        }
        Formula::SetMember(v, sv) => {
            out.push_str(v);
            out.push_str(" in $");
            out.push_str(sv);
        }
        Formula::ExistsSets(svs, body) => {
            out.push_str("ES ");
            for (i, sv) in svs.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                out.push('$');
                out.push_str(sv);
            }
            out.push_str(": ");
            emit(body, QUANT, out);
        }
    }
}
