//! Line-oriented sparse text format for [`SdpProblem`].
//!
//! ```text
//! sdp <num_vars> max|min
//! var <index> <name>
//! obj <index> <value>
//! con <id> le|ge|eq <rhs>
//! coef <id> <var> <value>
//! lmi <id> <dim>
//! entry <lmi id> const|<var> <row> <col> <re> <im>
//! ```
//!
//! Blank lines and lines starting with `#` are ignored. Matrix entries list
//! the upper triangle only. Floats are written in shortest round-trip form.

use std::fmt::Write as _;
use std::str::FromStr;

use num_complex::Complex64;

use super::{LmiBlock, Relation, ScalarConstraint, SdpProblem, Sense, SparseHermitian};
use crate::error::{Error, Result};

pub fn dump_problem(problem: &SdpProblem) -> String {
    let mut out = String::new();
    let sense = match problem.sense {
        Sense::Maximize => "max",
        Sense::Minimize => "min",
    };
    writeln!(out, "sdp {} {sense}", problem.num_vars()).unwrap();
    for (i, name) in problem.var_names.iter().enumerate() {
        writeln!(out, "var {i} {name}").unwrap();
    }
    for (i, c) in problem.objective.iter().enumerate() {
        if *c != 0.0 {
            writeln!(out, "obj {i} {c:e}").unwrap();
        }
    }
    for (id, con) in problem.scalar_constraints.iter().enumerate() {
        let rel = match con.relation {
            Relation::Le => "le",
            Relation::Ge => "ge",
            Relation::Eq => "eq",
        };
        writeln!(out, "con {id} {rel} {:e}", con.rhs).unwrap();
        for (v, a) in &con.coeffs {
            writeln!(out, "coef {id} {v} {a:e}").unwrap();
        }
    }
    for (id, block) in problem.lmi_blocks.iter().enumerate() {
        writeln!(out, "lmi {id} {}", block.dim).unwrap();
        let mut emit = |var: String, m: &SparseHermitian| {
            for (r, c, v) in m.entries() {
                writeln!(out, "entry {id} {var} {r} {c} {:e} {:e}", v.re, v.im).unwrap();
            }
        };
        emit("const".into(), &block.constant);
        for (v, m) in &block.terms {
            emit(v.to_string(), m);
        }
    }
    out
}

fn field<T: FromStr>(tok: Option<&str>, line: usize, what: &str) -> Result<T> {
    let tok = tok.ok_or_else(|| Error::Config {
        line,
        message: format!("missing {what}"),
    })?;
    tok.parse().map_err(|_| Error::Config {
        line,
        message: format!("invalid {what} `{tok}`"),
    })
}

pub fn load_problem(text: &str) -> Result<SdpProblem> {
    let mut problem: Option<SdpProblem> = None;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let body = raw.trim();
        if body.is_empty() || body.starts_with('#') {
            continue;
        }
        let mut tok = body.split_whitespace();
        let kind = tok.next().unwrap();
        let bad = |message: String| Error::Config { line, message };
        if kind == "sdp" {
            let n: usize = field(tok.next(), line, "variable count")?;
            let sense = match tok.next() {
                Some("max") => Sense::Maximize,
                Some("min") => Sense::Minimize,
                other => return Err(bad(format!("expected max or min, found {other:?}"))),
            };
            problem = Some(SdpProblem::new((0..n).map(|i| format!("y{i}")).collect(), sense));
            continue;
        }
        let p = problem.as_mut().ok_or_else(|| bad("record before `sdp` header".into()))?;
        let var = |v: usize| if v < p.num_vars() { Ok(v) } else { Err(bad(format!("variable {v} out of range"))) };
        match kind {
            "var" => {
                let i = var(field(tok.next(), line, "variable")?)?;
                p.var_names[i] = field(tok.next(), line, "name")?;
            }
            "obj" => {
                let i = var(field(tok.next(), line, "variable")?)?;
                p.objective[i] = field(tok.next(), line, "coefficient")?;
            }
            "con" => {
                let id: usize = field(tok.next(), line, "constraint id")?;
                if id != p.scalar_constraints.len() {
                    return Err(bad(format!("constraint {id} out of order")));
                }
                let relation = match tok.next() {
                    Some("le") => Relation::Le,
                    Some("ge") => Relation::Ge,
                    Some("eq") => Relation::Eq,
                    other => return Err(bad(format!("unknown relation {other:?}"))),
                };
                let rhs = field(tok.next(), line, "right-hand side")?;
                p.scalar_constraints.push(ScalarConstraint::new(Vec::new(), relation, rhs));
            }
            "coef" => {
                let id: usize = field(tok.next(), line, "constraint id")?;
                let i = var(field(tok.next(), line, "variable")?)?;
                let a = field(tok.next(), line, "coefficient")?;
                let con = p.scalar_constraints.get_mut(id).ok_or_else(|| bad(format!("unknown constraint {id}")))?;
                con.coeffs.push((i, a));
            }
            "lmi" => {
                let id: usize = field(tok.next(), line, "block id")?;
                if id != p.lmi_blocks.len() {
                    return Err(bad(format!("block {id} out of order")));
                }
                let dim: usize = field(tok.next(), line, "dimension")?;
                if dim == 0 {
                    return Err(bad("zero block dimension".into()));
                }
                p.lmi_blocks.push(LmiBlock::new(dim));
            }
            "entry" => {
                let id: usize = field(tok.next(), line, "block id")?;
                let target = tok.next().ok_or_else(|| bad("missing variable".into()))?;
                let target = if target == "const" {
                    None
                } else {
                    Some(var(field(Some(target), line, "variable")?)?)
                };
                let r: usize = field(tok.next(), line, "row")?;
                let c: usize = field(tok.next(), line, "column")?;
                let re: f64 = field(tok.next(), line, "real part")?;
                let im: f64 = field(tok.next(), line, "imaginary part")?;
                let block = p.lmi_blocks.get_mut(id).ok_or_else(|| bad(format!("unknown block {id}")))?;
                if r >= block.dim || c >= block.dim {
                    return Err(bad(format!("entry ({r}, {c}) outside {0}x{0}", block.dim)));
                }
                let v = Complex64::new(re, im);
                match target {
                    None => block.constant.add(r, c, v),
                    Some(i) => match block.terms.iter_mut().find(|t| t.0 == i) {
                        Some(t) => t.1.add(r, c, v),
                        None => {
                            let mut m = SparseHermitian::zeros(block.dim);
                            m.add(r, c, v);
                            block.terms.push((i, m));
                        }
                    },
                }
            }
            other => return Err(bad(format!("unknown record `{other}`"))),
        }
        if tok.next().is_some() {
            return Err(bad("trailing tokens".into()));
        }
    }
    problem.ok_or_else(|| Error::Parse("missing `sdp` header".into()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_out_of_range_variable() {
        let err = load_problem("sdp 1 min\nobj 3 1.0\n").unwrap_err();
        assert_eq!(err.to_string(), "line 2: variable 3 out of range");
    }

    #[test]
    fn round_trip_preserves_problem() {
        let mut p = SdpProblem::new(vec!["a".into(), "b".into()], Sense::Maximize);
        p.objective = vec![0.1, -3.0];
        p.scalar_constraints.push(ScalarConstraint::new(vec![(0, 1.0), (1, 1.0 / 3.0)], Relation::Le, 2.0));
        let mut b = LmiBlock::new(2);
        b.constant.add(0, 1, Complex64::new(0.5, -1e-17));
        let mut t = SparseHermitian::zeros(2);
        t.add(1, 1, Complex64::new(std::f64::consts::PI, 0.0));
        b.add_term(1, t);
        p.lmi_blocks.push(b);
        assert_eq!(load_problem(&dump_problem(&p)).unwrap(), p);
    }
}
