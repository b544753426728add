//! Built-in phormas used throughout the tests and by `--builtin`.

use crate::boolexpr::{parse_bool, BoolExpr, CmpOp};
use crate::compositions::CompConstraint;
use crate::error::{Error, Result};
use crate::seqcore::{Bounds, PhormaSpec, Restriction};

/// L-shaped pieces `(X, Y, x, y)` up to symmetry.
pub const L_PIECE: &str = "(a1 >= a3) & (a2 >= a4) & (a1 >= a2) & ((a1 != a2) | (a3 >= a4)) \
                           & ((a1 != a3) | (a2 = a4)) & ((a2 != a4) | (a1 = a3))";

/// T-pieces truncated along z, parameters `(x, X, y, Y, z, Zm, Z)`.
pub const T_Z_PIECE: &str = "(a2 >= a1) & (a4 >= a3) & (a7 >= a6) & (a6 >= a5) & (a2 >= a4) \
                             & ((a2 != a4) | (a1 >= a3)) & ((a1 != a2) | (a5 = a6)) \
                             & ((a3 != a4) | (a1 = a2)) & ((a3 != a4) | (a5 = a7))";

fn chain(n: usize, op: CmpOp) -> BoolExpr {
    match n {
        0 | 1 => BoolExpr::Empty,
        2 => BoolExpr::leaf(1, op, 2),
        _ => BoolExpr::And((1..n).map(|i| BoolExpr::leaf(i, op, i + 1)).collect()),
    }
}

fn spec(bounds: Vec<u32>, expr: BoolExpr) -> Result<PhormaSpec> {
    PhormaSpec::new(Bounds::new(bounds)?, Restriction::Expr(expr), CompConstraint::All)
}

/// Non-increasing sequences of length `n` bounded by `amax`.
pub fn sym_ge(n: usize, amax: u32) -> Result<PhormaSpec> {
    spec(vec![amax; n], chain(n, CmpOp::Ge))
}

/// Strictly decreasing sequences of length `n` bounded by `amax`.
pub fn sym_gt(n: usize, amax: u32) -> Result<PhormaSpec> {
    spec(vec![amax; n], chain(n, CmpOp::Gt))
}

pub fn l_piece(p: u32, q: u32) -> Result<PhormaSpec> {
    spec(vec![p, q, p, q], parse_bool(L_PIECE, 4)?)
}

pub fn t_z_piece(bounds: Vec<u32>) -> Result<PhormaSpec> {
    if bounds.len() != 7 {
        return Err(Error::Spec(format!("Tz needs 7 bounds, got {}", bounds.len())));
    }
    spec(bounds, parse_bool(T_Z_PIECE, 7)?)
}

/// Parses `sym_ge:n:amax`, `sym_gt:n:amax`, `L:p:q` or `Tz:a1,..,a7`
/// (bounds accept the `v^k` run shorthand).
pub fn parse_builtin(text: &str) -> Result<PhormaSpec> {
    let bad = || Error::Spec(format!("unknown builtin `{text}`"));
    let mut fields = text.split(':');
    let kind = fields.next().ok_or_else(bad)?;
    let args: Vec<&str> = fields.collect();
    let num = |s: &str| s.trim().parse::<u32>().map_err(|_| bad());
    match (kind, args.as_slice()) {
        ("sym_ge", [n, a]) => sym_ge(num(n)? as usize, num(a)?),
        ("sym_gt", [n, a]) => sym_gt(num(n)? as usize, num(a)?),
        ("L", [p, q]) => l_piece(num(p)?, num(q)?),
        ("Tz", [list]) => t_z_piece(crate::specio::parse_bounds_list(&list.replace(',', " "))?),
        _ => Err(bad()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_builtins() {
        let s = parse_builtin("Tz:15^2,17^2,19^3").unwrap();
        assert_eq!(s.bounds().as_slice(), &[15, 15, 17, 17, 19, 19, 19]);
        assert_eq!(parse_builtin("L:7:5").unwrap(), l_piece(7, 5).unwrap());
        assert_eq!(parse_builtin("sym_gt:3:9").unwrap().n(), 3);
        assert!(parse_builtin("L:7").is_err());
        assert!(parse_builtin("Tz:1,2,3").is_err());
        assert!(parse_builtin("nope:1").is_err());
    }

    #[test]
    fn t_z_has_nine_clauses() {
        match parse_bool(T_Z_PIECE, 7).unwrap() {
            BoolExpr::And(cs) => assert_eq!(cs.len(), 9),
            other => panic!("{other:?}"),
        }
    }
}
