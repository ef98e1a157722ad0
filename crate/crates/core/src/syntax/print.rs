use std::fmt;

use super::formula::{Formula, Group};

impl fmt::Display for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Group::All => write!(f, "{{A}}"),
            Group::Agents(s) => {
                write!(f, "{{")?;
                for (k, a) in s.iter().enumerate() {
                    if k > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{a}")?;
                }
                write!(f, "}}")
            }
        }
    }
}

// Binding strength, loosest first.
const IFF: u8 = 0;
const IMP: u8 = 1;
const OR: u8 = 2;
const AND: u8 = 3;
const UNARY: u8 = 4;

/// Prints `f`, folding the sugared shapes (`|`, `->`, duals) back into their
/// surface syntax so that parsing the output yields `f` again.
fn render(f: &Formula, ctx: u8, out: &mut String) {
    let (level, text) = shape(f);
    if level < ctx {
        out.push('(');
        out.push_str(&text);
        out.push(')');
    } else {
        out.push_str(&text);
    }
}

fn sub(f: &Formula, ctx: u8) -> String {
    let mut s = String::new();
    render(f, ctx, &mut s);
    s
}

fn shape(f: &Formula) -> (u8, String) {
    match f {
        Formula::Atom(p) => (UNARY, p.clone()),
        Formula::And(a, b) => (AND, format!("{} & {}", sub(a, AND), sub(b, UNARY))),
        Formula::Not(inner) => match &**inner {
            Formula::And(a, b) => match (&**a, &**b) {
                (Formula::Not(x), Formula::Not(y)) if !is_implication(x) => {
                    (OR, format!("{} | {}", sub(x, OR), sub(y, AND)))
                }
                (x, Formula::Not(y)) => (IMP, format!("{} -> {}", sub(x, OR), sub(y, IMP))),
                _ => (UNARY, format!("~{}", sub(inner, UNARY))),
            },
            Formula::Box(g, x) if matches!(&**x, Formula::Not(_)) => dual("Dia", g, x),
            Formula::Forall(g, x) if matches!(&**x, Formula::Not(_)) => dual("Exists", g, x),
            Formula::K(g, x) if matches!(&**x, Formula::Not(_)) => dual("<K", g, x),
            Formula::B(g, x) if matches!(&**x, Formula::Not(_)) => dual("<B", g, x),
            _ => (UNARY, format!("~{}", sub(inner, UNARY))),
        },
        Formula::Box(g, x) => (UNARY, format!("Box{g} {}", sub(x, UNARY))),
        Formula::Forall(g, x) => (UNARY, format!("Forall{g} {}", sub(x, UNARY))),
        Formula::K(g, x) => (UNARY, format!("K{g} {}", sub(x, UNARY))),
        Formula::B(g, x) => (UNARY, format!("B{g} {}", sub(x, UNARY))),
        Formula::Share(g, x) => (UNARY, format!("[share{g}] {}", sub(x, UNARY))),
    }
}

fn dual(op: &str, g: &Group, negated: &Formula) -> (u8, String) {
    let Formula::Not(x) = negated else { unreachable!() };
    let close = if op.starts_with('<') { ">" } else { "" };
    (UNARY, format!("{op}{g}{close} {}", sub(x, UNARY)))
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        render(self, IFF, &mut s);
        f.write_str(&s)
    }
}

// `~(a & ~b)` reads better as `a -> b` than as the disjunct of an `|`.
fn is_implication(f: &Formula) -> bool {
    matches!(f, Formula::And(_, b) if matches!(&**b, Formula::Not(_)))
}
