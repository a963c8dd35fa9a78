//! Textual rendering of formulas. `parse(format(phi))` reproduces `phi`
//! structurally; numbers use the shortest round-tripping decimal form.

use std::fmt;

use super::{Formula, FormulaKind, LinearPredicate, TimeInterval};

/// Operator precedence, used to decide where parentheses are required.
#[derive(PartialEq, PartialOrd, Clone, Copy)]
enum Prec {
    Until = 1,
    Or = 2,
    And = 3,
    Unary = 4,
    Atom = 5,
}

fn prec(phi: &Formula) -> Prec {
    match phi.kind() {
        FormulaKind::True | FormulaKind::Pred(_) => Prec::Atom,
        FormulaKind::Not(_)
        | FormulaKind::Eventually(_, _)
        | FormulaKind::Globally(_, _)
        | FormulaKind::Freeze(_, _) => Prec::Unary,
        FormulaKind::And(_, _) => Prec::And,
        FormulaKind::Or(_, _) => Prec::Or,
        FormulaKind::Until(_, _, _) => Prec::Until,
    }
}

fn write_child(f: &mut fmt::Formatter<'_>, child: &Formula, min: Prec) -> fmt::Result {
    if (prec(child) as u8) < (min as u8) {
        write!(f, "({child})")
    } else {
        write!(f, "{child}")
    }
}

/// Unary operators take their operand in parentheses unless it is `true`
/// or another unary chain, mirroring the written convention `F[1, 5](I >= 50)`.
fn write_unary_operand(f: &mut fmt::Formatter<'_>, child: &Formula) -> fmt::Result {
    match prec(child) {
        Prec::Unary => write!(f, "{child}"),
        Prec::Atom if matches!(child.kind(), FormulaKind::True) => write!(f, "{child}"),
        _ => write!(f, "({child})"),
    }
}

impl fmt::Display for TimeInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo(), self.hi())
    }
}

impl fmt::Display for LinearPredicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (index, name, coeff)) in self.terms().enumerate() {
            let magnitude = coeff.abs();
            if i == 0 {
                if coeff < 0.0 {
                    write!(f, "-")?;
                }
            } else if coeff < 0.0 {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            if magnitude != 1.0 {
                write!(f, "{magnitude}*")?;
            }
            write!(f, "{name}")?;
            if let Some(index) = index {
                write!(f, "*{index}")?;
            }
        }
        // terms >= -offset keeps the constant on the comparison side
        let rhs = -self.offset();
        let rhs = if rhs == 0.0 { 0.0 } else { rhs };
        write!(f, " >= {rhs}")
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind() {
            FormulaKind::True => write!(f, "true"),
            FormulaKind::Pred(p) => write!(f, "{p}"),
            FormulaKind::Not(p) => {
                write!(f, "!")?;
                write_unary_operand(f, p)
            }
            FormulaKind::Or(l, r) => {
                write_child(f, l, Prec::Or)?;
                write!(f, " || ")?;
                write_child(f, r, Prec::And)
            }
            FormulaKind::And(l, r) => {
                write_child(f, l, Prec::And)?;
                write!(f, " && ")?;
                write_child(f, r, Prec::Unary)
            }
            FormulaKind::Until(i, l, r) => {
                write_child(f, l, Prec::Or)?;
                write!(f, " U{i} ")?;
                write_child(f, r, Prec::Until)
            }
            FormulaKind::Eventually(i, p) => {
                write!(f, "F{i}")?;
                write_unary_operand(f, p)
            }
            FormulaKind::Globally(i, p) => {
                write!(f, "G{i}")?;
                write_unary_operand(f, p)
            }
            FormulaKind::Freeze(i, p) => {
                write!(f, "*{i} ")?;
                write_unary_operand(f, p)
            }
        }
    }
}
