//! Integer linear program for OWA-Winner: export in the text LP format
//! understood by common MIP solvers, and verification of solver output.
//!
//! Variables are `x_j` (item `j` is selected) and `x_i_j_k` (agent `i` sees
//! item `j` as its `k`-th best selected item), all 1-based. Constraints:
//!
//! - (a) `sum_j x_j = K`
//! - (b) `x_i_j_k <= x_j`
//! - (c) `sum_j x_i_j_k = 1` for every agent and position
//! - (d) `sum_k x_i_j_k <= 1` for every agent and item
//! - (e) position `k` carries at least the utility of position `k+1`; only
//!   emitted when the OWA vector is not nonincreasing, since otherwise an
//!   optimum sorts itself
//! - (f), (g) all variables binary
//!
//! The objective `sum alpha_k u_ij x_i_j_k` is maximized. Coefficients are
//! written as integers; for fractional inputs everything is multiplied by a
//! common denominator, which a header comment records.

use std::collections::HashMap;
use std::fmt::Write;

use crate::error::{Error, Result};
use crate::model::{Instance, WinnerSet};
use crate::nonfinicky::preference_order;
use crate::number::Rational;
use crate::owa::classify;

const TERMS_PER_LINE: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LpStats {
    pub variables: usize,
    pub constraints: usize,
}

pub fn lp_stats(inst: &Instance) -> LpStats {
    let (n, m, k) = (inst.n(), inst.m(), inst.k());
    let ordering = if needs_ordering(inst) { n * (k - 1) } else { 0 };
    LpStats {
        variables: m + n * m * k,
        constraints: 1 + n * m * k + n * k + n * m + ordering,
    }
}

fn needs_ordering(inst: &Instance) -> bool {
    !classify(inst.owa()).nonincreasing
}

fn item_var(j: usize) -> String {
    format!("x_{}", j + 1)
}

fn slot_var(i: usize, j: usize, k: usize) -> String {
    format!("x_{}_{}_{}", i + 1, j + 1, k + 1)
}

/// Writes `name: t1 + t2 ... <rel> rhs`, wrapping long sums.
fn write_row(out: &mut String, name: &str, terms: &[(i128, String)], tail: &str) {
    let _ = write!(out, " {name}:");
    let nonzero: Vec<&(i128, String)> = terms.iter().filter(|(c, _)| *c != 0).collect();
    if nonzero.is_empty() {
        let var = terms.first().map_or("x_1", |(_, v)| v.as_str());
        let _ = write!(out, " 0 {var}");
    }
    for (idx, (c, var)) in nonzero.iter().enumerate() {
        if idx > 0 && idx % TERMS_PER_LINE == 0 {
            out.push_str("\n  ");
        }
        let sign = if *c < 0 { "-" } else { "+" };
        if idx > 0 || *c < 0 {
            let _ = write!(out, " {sign}");
        }
        match c.unsigned_abs() {
            1 => {
                let _ = write!(out, " {var}");
            }
            a => {
                let _ = write!(out, " {a} {var}");
            }
        }
    }
    let _ = writeln!(out, "{tail}");
}

/// The program for `inst` in LP format. Byte-deterministic.
pub fn emit_lp(inst: &Instance) -> String {
    let (n, m, k) = (inst.n(), inst.m(), inst.k());
    let u = inst.utilities();
    let alpha = inst.owa().scaled_values();
    let scale = u.scale_denom() * inst.owa().scale_denom();

    let mut out = String::new();
    let _ = writeln!(out, "\\ OWA-Winner: n = {n}, m = {m}, K = {k}");
    if scale != 1 {
        let _ = writeln!(out, "\\ objective coefficients scaled by {scale}");
    }
    out.push_str("Maximize\n");
    let mut objective = Vec::with_capacity(n * m * k);
    for i in 0..n {
        let row = u.scaled_row(i);
        for (j, uij) in row.iter().enumerate() {
            for (pos, a) in alpha.iter().enumerate() {
                objective.push((a * uij, slot_var(i, j, pos)));
            }
        }
    }
    write_row(&mut out, "obj", &objective, "");

    out.push_str("Subject To\n");
    let all_items: Vec<(i128, String)> = (0..m).map(|j| (1, item_var(j))).collect();
    write_row(&mut out, "a", &all_items, &format!(" = {k}"));
    for i in 0..n {
        for j in 0..m {
            for pos in 0..k {
                let terms = [(1, slot_var(i, j, pos)), (-1, item_var(j))];
                let name = format!("b_{}_{}_{}", i + 1, j + 1, pos + 1);
                write_row(&mut out, &name, &terms, " <= 0");
            }
        }
    }
    for i in 0..n {
        for pos in 0..k {
            let terms: Vec<_> = (0..m).map(|j| (1, slot_var(i, j, pos))).collect();
            write_row(&mut out, &format!("c_{}_{}", i + 1, pos + 1), &terms, " = 1");
        }
    }
    for i in 0..n {
        for j in 0..m {
            let terms: Vec<_> = (0..k).map(|pos| (1, slot_var(i, j, pos))).collect();
            write_row(&mut out, &format!("d_{}_{}", i + 1, j + 1), &terms, " <= 1");
        }
    }
    if needs_ordering(inst) {
        for i in 0..n {
            let row = u.scaled_row(i);
            for pos in 0..k - 1 {
                let mut terms: Vec<_> = (0..m).map(|j| (row[j], slot_var(i, j, pos))).collect();
                terms.extend((0..m).map(|j| (-row[j], slot_var(i, j, pos + 1))));
                write_row(&mut out, &format!("e_{}_{}", i + 1, pos + 1), &terms, " >= 0");
            }
        }
    }

    out.push_str("Binary\n");
    for j in 0..m {
        let _ = writeln!(out, " {}", item_var(j));
    }
    for i in 0..n {
        for j in 0..m {
            for pos in 0..k {
                let _ = writeln!(out, " {}", slot_var(i, j, pos));
            }
        }
    }
    out.push_str("End\n");
    out
}

/// A 0/1 value for every program variable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Assignment {
    n: usize,
    m: usize,
    k: usize,
    items: Vec<bool>,
    slots: Vec<bool>,
}

impl Assignment {
    pub fn empty(inst: &Instance) -> Self {
        let (n, m, k) = (inst.n(), inst.m(), inst.k());
        Assignment {
            n,
            m,
            k,
            items: vec![false; m],
            slots: vec![false; n * m * k],
        }
    }

    pub fn item(&self, j: usize) -> bool {
        self.items[j]
    }

    pub fn set_item(&mut self, j: usize, v: bool) {
        self.items[j] = v;
    }

    pub fn slot(&self, i: usize, j: usize, k: usize) -> bool {
        self.slots[(i * self.m + j) * self.k + k]
    }

    pub fn set_slot(&mut self, i: usize, j: usize, k: usize, v: bool) {
        self.slots[(i * self.m + j) * self.k + k] = v;
    }

    pub fn selected_items(&self) -> Vec<usize> {
        (0..self.m).filter(|&j| self.items[j]).collect()
    }

    /// Objective value in the instance's own units (unscaled).
    pub fn objective(&self, inst: &Instance) -> Rational {
        let alpha = inst.owa().as_slice();
        let mut total = Rational::from_integer(0);
        for i in 0..self.n {
            for j in 0..self.m {
                for (pos, a) in alpha.iter().enumerate() {
                    if self.slot(i, j, pos) {
                        total += a * inst.utilities().get(i, j);
                    }
                }
            }
        }
        total
    }
}

/// Selects `items` and fills each agent's positions in descending utility
/// order, equal utilities by item index.
pub fn canonical_assignment(inst: &Instance, items: &[usize]) -> Result<Assignment> {
    let winners = WinnerSet::new(inst, items.to_vec())?;
    let mut asg = Assignment::empty(inst);
    for &j in winners.items() {
        asg.set_item(j, true);
    }
    for i in 0..inst.n() {
        let order = preference_order(inst, i);
        let picked: Vec<usize> = order.into_iter().filter(|&j| asg.item(j)).collect();
        for (pos, j) in picked.into_iter().enumerate() {
            asg.set_slot(i, j, pos, true);
        }
    }
    Ok(asg)
}

/// Reads `name value` lines. Blank lines and lines starting with `#` or `\`
/// are skipped. Values must be within `1e-6` of 0 or 1; every variable must
/// appear exactly once.
pub fn parse_solution(inst: &Instance, text: &str) -> Result<Assignment> {
    let (n, m, k) = (inst.n(), inst.m(), inst.k());
    let mut index: HashMap<String, Option<(usize, usize, usize)>> = HashMap::new();
    for j in 0..m {
        index.insert(item_var(j), None);
    }
    for i in 0..n {
        for j in 0..m {
            for pos in 0..k {
                index.insert(slot_var(i, j, pos), Some((i, j, pos)));
            }
        }
    }
    let mut asg = Assignment::empty(inst);
    let mut seen: HashMap<String, usize> = HashMap::new();
    for (ln, line) in text.lines().enumerate() {
        let line_no = ln + 1;
        let trimmed = line.trim_start();
        if trimmed.is_empty() || trimmed.starts_with('#') || trimmed.starts_with('\\') {
            continue;
        }
        let col = |s: &str| s.as_ptr() as usize - line.as_ptr() as usize + 1;
        let err = |column: usize, message: String| Error::Parse {
            line: line_no,
            column,
            message,
        };
        let mut fields = trimmed.split_whitespace();
        let name = fields.next().expect("nonempty line");
        let Some(value) = fields.next() else {
            return Err(err(col(name) + name.len(), "expected a value after the variable name".into()));
        };
        if let Some(extra) = fields.next() {
            return Err(err(col(extra), format!("unexpected token '{extra}'")));
        }
        let Some(target) = index.get(name) else {
            return Err(err(col(name), format!("unknown variable '{name}'")));
        };
        if let Some(prev) = seen.insert(name.to_string(), line_no) {
            return Err(err(col(name), format!("'{name}' already set on line {prev}")));
        }
        let v: f64 = value
            .parse()
            .map_err(|_| err(col(value), format!("'{value}' is not a number")))?;
        let bit = if v.abs() <= 1e-6 {
            false
        } else if (v - 1.0).abs() <= 1e-6 {
            true
        } else {
            let constraint = if target.is_some() { "f" } else { "g" };
            return Err(Error::ConstraintViolation {
                constraint,
                detail: format!("{name} = {value} is not binary (line {line_no})"),
            });
        };
        match *target {
            None => asg.set_item(name[2..].parse::<usize>().expect("item name") - 1, bit),
            Some((i, j, pos)) => asg.set_slot(i, j, pos, bit),
        }
    }
    if seen.len() < index.len() {
        let mut missing: Vec<&String> = index.keys().filter(|v| !seen.contains_key(*v)).collect();
        missing.sort();
        return Err(Error::InvalidParameter(format!(
            "solution gives no value for {} variable(s), first {}",
            missing.len(),
            missing[0]
        )));
    }
    Ok(asg)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Verification {
    pub objective: Rational,
    pub winners: WinnerSet,
    /// Whether the objective equals the committee score, i.e. the slot
    /// positions follow each agent's utilities.
    pub objective_matches_score: bool,
}

fn violation(constraint: &'static str, detail: String) -> Error {
    Error::ConstraintViolation { constraint, detail }
}

/// Checks every constraint of the program, then compares the objective with
/// the score of the selected committee.
pub fn verify_solution(inst: &Instance, asg: &Assignment) -> Result<Verification> {
    let (n, m, k) = (inst.n(), inst.m(), inst.k());
    let selected = asg.selected_items();
    if selected.len() != k {
        return Err(violation(
            "a",
            format!("{} items selected, expected {k}", selected.len()),
        ));
    }
    for i in 0..n {
        for j in 0..m {
            for pos in 0..k {
                if asg.slot(i, j, pos) && !asg.item(j) {
                    return Err(violation(
                        "b",
                        format!("{} = 1 but {} = 0", slot_var(i, j, pos), item_var(j)),
                    ));
                }
            }
        }
    }
    for i in 0..n {
        for pos in 0..k {
            let c = (0..m).filter(|&j| asg.slot(i, j, pos)).count();
            if c != 1 {
                return Err(violation(
                    "c",
                    format!("agent {} has {c} items at position {}", i + 1, pos + 1),
                ));
            }
        }
    }
    for i in 0..n {
        for j in 0..m {
            let c = (0..k).filter(|&pos| asg.slot(i, j, pos)).count();
            if c > 1 {
                return Err(violation(
                    "d",
                    format!("agent {} places a{} at {c} positions", i + 1, j + 1),
                ));
            }
        }
    }
    let at = |i: usize, pos: usize| {
        (0..m)
            .find(|&j| asg.slot(i, j, pos))
            .map(|j| inst.utilities().get(i, j))
            .expect("(c) holds")
    };
    if needs_ordering(inst) {
        for i in 0..n {
            for pos in 0..k - 1 {
                if at(i, pos) < at(i, pos + 1) {
                    return Err(violation(
                        "e",
                        format!(
                            "agent {} has utility {} at position {} below {} at position {}",
                            i + 1,
                            at(i, pos),
                            pos + 1,
                            at(i, pos + 1),
                            pos + 2
                        ),
                    ));
                }
            }
        }
    }
    let objective = asg.objective(inst);
    let winners = WinnerSet::new(inst, selected)?;
    if objective > winners.score() || (needs_ordering(inst) && objective != winners.score()) {
        return Err(violation(
            "objective",
            format!(
                "objective {objective} disagrees with committee score {}",
                winners.score()
            ),
        ));
    }
    Ok(Verification {
        objective_matches_score: objective == winners.score(),
        objective,
        winners,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{brute_force, DEFAULT_BUDGET};
    use crate::model::{OwaVector, UtilityMatrix};
    use crate::testdata::*;

    #[test]
    fn counts_match_emitted_rows() {
        for inst in [example1_instance(&[2, 1, 0]), exjl_instance(&[0, 1, 0])] {
            let lp = emit_lp(&inst);
            let stats = lp_stats(&inst);
            let body: Vec<&str> = lp.lines().collect();
            let st = body.iter().position(|l| *l == "Subject To").unwrap();
            let bin = body.iter().position(|l| *l == "Binary").unwrap();
            let rows = body[st + 1..bin].iter().filter(|l| !l.starts_with("  ")).count();
            assert_eq!(rows, stats.constraints);
            assert_eq!(body.len() - bin - 2, stats.variables);
        }
        let s = lp_stats(&exjl_instance(&[0, 1, 0]));
        assert_eq!(s.variables, 6 + 3 * 6 * 3);
        assert_eq!(s.constraints, 1 + 54 + 9 + 18 + 6);
    }

    #[test]
    fn example_optimum_through_the_program() {
        let inst = example1_instance(&[2, 1, 0]);
        let opt = brute_force(&inst, DEFAULT_BUDGET).unwrap();
        let asg = canonical_assignment(&inst, &[0, 1, 5]).unwrap();
        let v = verify_solution(&inst, &asg).unwrap();
        assert_eq!(v.objective, Rational::from_integer(77));
        assert_eq!(v.objective, opt.score());
        assert!(v.objective_matches_score);
    }

    #[test]
    fn violations_name_the_constraint() {
        let inst = example1_instance(&[2, 1, 0]);
        let mut asg = canonical_assignment(&inst, &[0, 1, 5]).unwrap();
        asg.set_item(2, true);
        assert!(matches!(
            verify_solution(&inst, &asg),
            Err(Error::ConstraintViolation { constraint: "a", .. })
        ));

        let mut asg = canonical_assignment(&inst, &[0, 1, 5]).unwrap();
        asg.set_slot(0, 0, 1, true);
        asg.set_slot(0, 1, 1, false);
        let err = verify_solution(&inst, &asg).unwrap_err();
        assert!(matches!(err, Error::ConstraintViolation { constraint: "d", .. }));
        assert!(err.to_string().contains("(d)"));

        let mut asg = canonical_assignment(&inst, &[0, 1, 5]).unwrap();
        asg.set_slot(0, 0, 0, false);
        asg.set_slot(0, 2, 0, true);
        assert!(matches!(
            verify_solution(&inst, &asg),
            Err(Error::ConstraintViolation { constraint: "b", .. })
        ));
    }

    #[test]
    fn unsorted_slots_lower_the_objective() {
        let inst = example1_instance(&[2, 1, 0]);
        let mut asg = canonical_assignment(&inst, &[0, 1, 5]).unwrap();
        // Agent 1 sees a1 (5) first and a2 (4) second; swap them.
        asg.set_slot(0, 0, 0, false);
        asg.set_slot(0, 1, 0, true);
        asg.set_slot(0, 1, 1, false);
        asg.set_slot(0, 0, 1, true);
        let v = verify_solution(&inst, &asg).unwrap();
        assert_eq!(v.objective, Rational::from_integer(76));
        assert!(!v.objective_matches_score);

        let inst = example1_instance(&[1, 2, 1]);
        assert!(matches!(
            verify_solution(&inst, &asg),
            Err(Error::ConstraintViolation { constraint: "e", .. })
        ));
    }

    #[test]
    fn solution_round_trip() {
        let inst = exjl_instance(&[2, 1, 0]);
        let asg = canonical_assignment(&inst, &[0, 3, 4]).unwrap();
        let mut text = String::from("# solver output\n");
        for j in 0..6 {
            text += &format!("{} {}\n", item_var(j), asg.item(j) as u8);
        }
        for i in 0..3 {
            for j in 0..6 {
                for pos in 0..3 {
                    let v = if asg.slot(i, j, pos) { "1.0000000001" } else { "-0" };
                    text += &format!("{} {v}\n", slot_var(i, j, pos));
                }
            }
        }
        assert_eq!(parse_solution(&inst, &text).unwrap(), asg);
        let bad = text.replace("x_1 1", "x_1 0.5");
        assert!(matches!(
            parse_solution(&inst, &bad),
            Err(Error::ConstraintViolation { constraint: "g", .. })
        ));
        let err = parse_solution(&inst, "x_9 1\n").unwrap_err();
        assert_eq!(
            err,
            Error::Parse {
                line: 1,
                column: 1,
                message: "unknown variable 'x_9'".into()
            }
        );
        assert!(matches!(
            parse_solution(&inst, "x_1 1\n"),
            Err(Error::InvalidParameter(_))
        ));
    }

    #[test]
    fn fractional_inputs_are_scaled() {
        let u = UtilityMatrix::new(vec![vec![Rational::new(1, 2), Rational::from_integer(1)]]).unwrap();
        let inst = Instance::new(u, OwaVector::from_integers(&[1]).unwrap()).unwrap();
        let lp = emit_lp(&inst);
        assert!(lp.contains("scaled by 2"));
        assert!(lp.contains(" obj: x_1_1_1 + 2 x_1_2_1\n"));
    }

    #[test]
    fn long_rows_wrap() {
        let u = UtilityMatrix::from_integers(&[[1; 20]]).unwrap();
        let inst = Instance::new(u, OwaVector::from_integers(&[1]).unwrap()).unwrap();
        let lp = emit_lp(&inst);
        assert!(lp.lines().any(|l| l.starts_with("   + x_9")));
    }
}
