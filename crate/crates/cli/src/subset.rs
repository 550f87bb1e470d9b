//! Point selection expressions such as `x<2&z>0.9`.

use std::fmt;

use lcf_risk::reliability::LifePoint;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Var {
    X,
    Y,
    Z,
    T,
    Chi,
    EpsA,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Op {
    Lt,
    Le,
    Gt,
    Ge,
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Condition {
    var: Var,
    op: Op,
    value: f64,
}

/// Conjunction of comparisons on `x`, `y`, `z`, `T`, `chi` or `eps_a`.
#[derive(Debug, Clone, PartialEq)]
pub struct Subset {
    source: String,
    conditions: Vec<Condition>,
}

impl fmt::Display for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.source)
    }
}

impl std::str::FromStr for Subset {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let source: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if source.is_empty() {
            return Err("empty subset expression".into());
        }
        let conditions = source.split('&').map(parse_condition).collect::<Result<_, _>>()?;
        Ok(Subset { source, conditions })
    }
}

fn parse_condition(text: &str) -> Result<Condition, String> {
    let at = text
        .find(['<', '>'])
        .ok_or_else(|| format!("`{text}`: expected a comparison such as x<2"))?;
    let (name, rest) = text.split_at(at);
    let (op, number) = match rest.as_bytes() {
        [b'<', b'=', ..] => (Op::Le, &rest[2..]),
        [b'>', b'=', ..] => (Op::Ge, &rest[2..]),
        [b'<', ..] => (Op::Lt, &rest[1..]),
        _ => (Op::Gt, &rest[1..]),
    };
    let var = match name {
        "x" => Var::X,
        "y" => Var::Y,
        "z" => Var::Z,
        "T" => Var::T,
        "chi" => Var::Chi,
        "eps_a" => Var::EpsA,
        _ => {
            return Err(format!(
                "`{text}`: unknown variable `{name}` (use x, y, z, T, chi, eps_a)"
            ))
        }
    };
    let value: f64 = number
        .parse()
        .map_err(|_| format!("`{text}`: `{number}` is not a number"))?;
    if !value.is_finite() {
        return Err(format!("`{text}`: bound must be finite"));
    }
    Ok(Condition { var, op, value })
}

impl Subset {
    pub fn contains(&self, p: &LifePoint) -> bool {
        self.conditions.iter().all(|c| {
            let v = match c.var {
                Var::X => p.position[0],
                Var::Y => p.position[1],
                Var::Z => p.position[2],
                Var::T => p.temperature,
                Var::Chi => p.chi,
                Var::EpsA => p.eps_a,
            };
            match c.op {
                Op::Lt => v < c.value,
                Op::Le => v <= c.value,
                Op::Gt => v > c.value,
                Op::Ge => v >= c.value,
            }
        })
    }
}
