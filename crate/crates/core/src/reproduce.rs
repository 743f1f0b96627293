//! End-to-end recomputation of the bundled examples against their expected
//! values.

use std::fmt::Write as _;

use crate::bounds::{
    binary_structural_bound, binary_structural_formula, binary_triple_bound, fcpc_redundancy,
    lower_bound_drm_submatrix, lower_bound_joins, lower_bound_trivial, optimal_redundancy_exact,
    upper_bound_grouping, BoundStatus, Certificate,
};
use crate::codec::{multi_step_construct, verify_gfcpc, SystematicEncoding};
use crate::dcode::SearchBudget;
use crate::drm::{gfcpc_drm, GfcpcProblem};
use crate::error::{Error, Result};
use crate::fixtures::{example, read_annotated_matrix, Example};
use crate::partition::Partition;

/// One compared quantity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Check {
    pub quantity: String,
    pub computed: String,
    pub expected: String,
}

impl Check {
    pub fn matches(&self) -> bool {
        self.computed == self.expected
    }
}

#[derive(Clone, Debug)]
pub struct Reproduction {
    pub id: String,
    pub title: String,
    pub checks: Vec<Check>,
}

impl Reproduction {
    pub fn all_match(&self) -> bool {
        self.checks.iter().all(Check::matches)
    }

    pub fn mismatches(&self) -> Vec<&Check> {
        self.checks.iter().filter(|c| !c.matches()).collect()
    }

    /// Side-by-side table of computed and expected values.
    pub fn render(&self) -> String {
        let header = ["quantity", "computed", "expected", ""];
        let rows: Vec<[String; 4]> = self
            .checks
            .iter()
            .map(|c| {
                [
                    c.quantity.clone(),
                    c.computed.clone(),
                    c.expected.clone(),
                    if c.matches() { "ok" } else { "MISMATCH" }.to_string(),
                ]
            })
            .collect();
        let width = |i: usize| {
            rows.iter()
                .map(|r| r[i].chars().count())
                .chain([header[i].len()])
                .max()
                .unwrap()
        };
        let w = [width(0), width(1), width(2)];
        let mut out = format!("{}: {}\n", self.id, self.title);
        let line = |a: &str, b: &str, c: &str, d: &str| {
            format!("  {a:<w0$}  {b:<w1$}  {c:<w2$}  {d}", w0 = w[0], w1 = w[1], w2 = w[2])
                .trim_end()
                .to_string()
        };
        writeln!(out, "{}", line(header[0], header[1], header[2], header[3])).unwrap();
        for r in &rows {
            writeln!(out, "{}", line(&r[0], &r[1], &r[2], &r[3])).unwrap();
        }
        out
    }
}

struct Sheet<'a> {
    ex: &'a Example,
    checks: Vec<Check>,
}

impl Sheet<'_> {
    fn push(&mut self, quantity: &str, computed: impl ToString, expected: impl ToString) {
        self.checks.push(Check {
            quantity: quantity.to_string(),
            computed: computed.to_string(),
            expected: expected.to_string(),
        });
    }

    /// Checks that a bundled table verifies against a problem.
    fn table(&mut self, name: &str, prob: &GfcpcProblem) -> Result<SystematicEncoding> {
        let enc = self.ex.encoding(name)?;
        let report = verify_gfcpc(&enc, prob)?;
        let computed = match report.violations.len() {
            0 => "valid".to_string(),
            n => format!("{n} violations"),
        };
        self.push(&format!("{name} verifies"), computed, "valid");
        Ok(enc)
    }

    fn partition_matches(&mut self, quantity: &str, computed: &Partition, name: &str) -> Result<()> {
        let expected = self.ex.partition(name)?;
        let verdict = |p: &Partition| {
            if *p == expected {
                format!("{} blocks, as listed", p.num_blocks())
            } else {
                format!("{} blocks, differs", p.num_blocks())
            }
        };
        self.push(quantity, verdict(computed), verdict(&expected));
        Ok(())
    }
}

fn list(xs: &[usize]) -> String {
    xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
}

fn exact_value(r: &crate::bounds::BoundReport) -> String {
    match (r.status, r.value) {
        (BoundStatus::Exact, Some(v)) => v.to_string(),
        (status, v) => format!("{status} {}", v.map_or("-".into(), |v| v.to_string())),
    }
}

fn fcpc(p: &Partition, d: usize, budget: &SearchBudget) -> Result<String> {
    let v = fcpc_redundancy(p, d, budget)?;
    Ok(if v.is_exact() {
        v.upper.to_string()
    } else {
        format!("[{}, {}]", v.lower, v.upper)
    })
}

fn ex1(s: &mut Sheet, budget: &SearchBudget) -> Result<()> {
    let want = s.ex.expected()?;
    let prob = s.ex.problem("problem.txt")?;
    let (p1, p2) = (&prob.partitions()[0], &prob.partitions()[1]);
    let t1 = s.table("table1.enc", &GfcpcProblem::single(p1.clone(), 3)?)?;
    let t2 = s.table("table2.enc", &GfcpcProblem::single(p2.clone(), 5)?)?;
    let t3 = s.table("table3.enc", &prob)?;
    s.push("table redundancies", list(&[t1.r(), t2.r(), t3.r()]), want.text("table-redundancy")?);
    let sep = [fcpc(p1, 3, budget)?, fcpc(p2, 5, budget)?];
    s.push("r(P1;3) r(P2;5)", sep.join(" "), want.text("separate")?);
    let sum: usize = sep.iter().filter_map(|x| x.parse::<usize>().ok()).sum();
    s.push("separate sum", sum, want.int("separate-sum")?);
    s.partition_matches("join P1vP2", &p1.join(p2)?, "join.part")?;
    let (enc, trace) = multi_step_construct(&prob, budget)?;
    s.push("multi-step trace", list(&trace.redundancies()), want.text("multistep-trace")?);
    s.push("multi-step total", trace.total_redundancy(), want.int("multistep-total")?);
    s.push("multi-step verifies", verify_gfcpc(&enc, &prob)?.is_valid(), true);
    Ok(())
}

fn ex2(s: &mut Sheet, budget: &SearchBudget) -> Result<()> {
    let want = s.ex.expected()?;
    let prob = s.ex.problem("problem.txt")?;
    let (p1, p2) = (&prob.partitions()[0], &prob.partitions()[1]);
    let join_file = s.ex.problem_file("join-problem.txt")?;
    let join_prob = s.ex.problem("join-problem.txt")?;
    let msgs = join_file.messages.clone().unwrap_or_default();
    let sub = lower_bound_drm_submatrix(&join_prob, &msgs, budget)?;
    s.push("submatrix bound (000 100 200 010)", exact_value(&sub), want.int("submatrix-bound")?);
    let t5 = s.table("table5.enc", &prob)?;
    let t6 = s.table("table6.enc", &join_prob)?;
    s.push("table redundancies", list(&[t5.r(), t6.r()]), want.text("table-redundancy")?);
    s.partition_matches("join P1vP2", &p1.join(p2)?, "join.part")?;
    let sep = [fcpc(p1, 3, budget)?, fcpc(p2, 5, budget)?];
    s.push("r(P1;3) r(P2;5)", sep.join(" "), want.text("separate")?);
    let sum: usize = sep.iter().filter_map(|x| x.parse::<usize>().ok()).sum();
    s.push("separate sum", sum, want.int("separate-sum")?);
    s.push("r(P1vP2;5)", fcpc(&p1.join(p2)?, 5, budget)?, want.int("join-fcpc")?);
    let (enc, trace) = multi_step_construct(&prob, budget)?;
    s.push("multi-step trace", list(&trace.redundancies()), want.text("multistep-trace")?);
    s.push("multi-step total", trace.total_redundancy(), want.int("multistep-total")?);
    s.push("multi-step verifies", verify_gfcpc(&enc, &prob)?.is_valid(), true);
    s.push("lower-join", exact_value(&lower_bound_joins(&prob, budget)?), want.int("lower-join")?);
    s.push("exact optimum", exact_value(&optimal_redundancy_exact(&prob, budget)?), want.int("exact")?);
    Ok(())
}

fn ex3(s: &mut Sheet, budget: &SearchBudget) -> Result<()> {
    let want = s.ex.expected()?;
    let prob = s.ex.problem("problem.txt")?;
    let p = prob.partitions();
    let join = |levels: &[usize]| prob.join_of(levels);
    let targets = [
        ("table-a.enc", p[0].clone(), 3),
        ("table-b.enc", p[1].clone(), 3),
        ("table-c.enc", p[2].clone(), 11),
        ("table-d.enc", join(&[0, 1])?, 3),
        ("table-e.enc", join(&[1, 2])?, 11),
        ("table-f.enc", join(&[0, 2])?, 11),
        ("table-g.enc", join(&[0, 1, 2])?, 11),
    ];
    let mut reds = Vec::new();
    for (name, part, d) in targets {
        reds.push(s.table(name, &GfcpcProblem::single(part, d)?)?.r());
    }
    s.push("table redundancies", list(&reds), want.text("table-redundancy")?);

    let g = upper_bound_grouping(&prob, budget)?;
    if let Certificate::Grouping { best, table } = &g.certificate {
        let totals: Vec<usize> = table.iter().map(|r| r.total()).collect();
        s.push("grouping table", list(&totals), want.text("grouping")?);
        s.push("grouping minimum", exact_value(&g), want.int("grouping-min")?);
        s.push("best grouping", best, want.text("grouping-best")?);
    }
    let ms_table = s.table("multistep.enc", &prob)?;
    let (enc, trace) = multi_step_construct(&prob, budget)?;
    s.push("multi-step table redundancy", ms_table.r(), want.int("multistep-total")?);
    s.push("multi-step trace", list(&trace.redundancies()), want.text("multistep-trace")?);
    s.push("multi-step total", trace.total_redundancy(), want.int("multistep-total")?);
    s.push("multi-step verifies", verify_gfcpc(&enc, &prob)?.is_valid(), true);
    let lj = lower_bound_joins(&prob, budget)?;
    if let Certificate::Levels { terms, .. } = &lj.certificate {
        let t: Vec<usize> = terms.iter().map(|t| t.value.upper).collect();
        s.push("join terms r(Q_h;d_h)", list(&t), want.text("join-terms")?);
    }
    s.push("lower-join", exact_value(&lj), want.int("lower-join")?);
    s.push("lower-trivial", exact_value(&lower_bound_trivial(&prob)?), want.int("trivial")?);
    let exact = optimal_redundancy_exact(&prob, budget)?;
    let lo = want.int("lower-join")?;
    let hi = want.int("multistep-total")?;
    let inside = exact.status == BoundStatus::Exact && exact.value.is_some_and(|v| (lo..=hi).contains(&v));
    s.push(
        &format!("exact optimum ({}) in [{lo}, {hi}]", exact_value(&exact)),
        if inside { "inside" } else { "outside" },
        "inside",
    );
    Ok(())
}

fn ex4(s: &mut Sheet, _budget: &SearchBudget) -> Result<()> {
    let want = s.ex.expected()?;
    let prob = s.ex.problem("problem.txt")?;
    let m = read_annotated_matrix(s.ex.file("drm.txt")?, prob.space())?;
    let d = gfcpc_drm(&prob, &m.order)?;
    let n = m.order.len();
    let mut wrong = 0;
    let mut marked = 0;
    for i in 0..n {
        for j in 0..n {
            let c = m.cells[i][j];
            if d.get(i, j) != c.value || d.source_level(i, j) != c.level {
                wrong += 1;
            }
            if c.marked_zero {
                marked += 1;
                if prob.partitions().iter().any(|p| !p.same_block(&m.order[i], &m.order[j]).unwrap()) {
                    wrong += 1;
                }
            }
        }
    }
    s.push("matrix entries matching", format!("{}/{}", n * n - wrong, n * n), format!("{}/{}", n * n, n * n));
    s.push("same-block zero entries", marked, want.int("marked-zeros")?);
    let p = prob.partitions();
    let joins = [
        ("join P1vP2", p[0].join(&p[1])?, "join12.part"),
        ("join P1vP3", p[0].join(&p[2])?, "join13.part"),
        ("join P2vP3", p[1].join(&p[2])?, "join23.part"),
        ("join P1vP2vP3", prob.join_of(&[0, 1, 2])?, "join123.part"),
    ];
    let mut counts = Vec::new();
    for (q, part, name) in &joins {
        s.partition_matches(q, part, name)?;
        counts.push(part.num_blocks());
    }
    s.push("join block counts", list(&counts), want.text("join-blocks")?);
    Ok(())
}

fn ex5(s: &mut Sheet, _budget: &SearchBudget) -> Result<()> {
    let want = s.ex.expected()?;
    let prob = s.ex.problem("problem.txt")?;
    let r = binary_triple_bound(&prob)?;
    if let Certificate::Triple(w) = &r.certificate {
        s.push("triple witness", format!("{} {} {}", w.u, w.v, w.w), want.text("triple-witness")?);
    } else {
        s.push("triple witness", "none", want.text("triple-witness")?);
    }
    s.push("triple bound", exact_value(&r), want.int("triple-bound")?);
    for case in ["a", "b"] {
        let prob = s.ex.problem(&format!("conditions-{case}/problem.txt"))?;
        let r = binary_structural_bound(&prob)?;
        let computed = match &r.certificate {
            Certificate::Structural(w) => format!("{} {} {} {}", w.condition, w.v, w.w, w.u),
            _ => "none".to_string(),
        };
        s.push(&format!("case ({case}) witness"), computed, want.text(&format!("condition-{case}"))?);
    }
    let prob = s.ex.problem("conditions-c/problem.txt")?;
    let (p1, p2) = (&prob.partitions()[0], &prob.partitions()[1]);
    let both = crate::bounds::scan_condition_one(p1, p2)?.is_some()
        && crate::bounds::scan_condition_two(p1, p2)?.is_some();
    s.push("case (c) both conditions hold", both, true);
    s.push("case (c) bound", exact_value(&binary_structural_bound(&prob)?), want.int("condition-c-bound")?);
    Ok(())
}

fn ex6(s: &mut Sheet, budget: &SearchBudget) -> Result<()> {
    let want = s.ex.expected()?;
    let prob = s.ex.problem("problem.txt")?;
    let t8 = s.table("table8.enc", &prob)?;
    s.push("table redundancy", t8.r(), want.int("table-redundancy")?);
    let exact = optimal_redundancy_exact(&prob, budget)?;
    s.push("exact optimum", exact_value(&exact), want.int("exact")?);
    let formula = binary_structural_formula(prob.distances()[0], prob.distances()[1]);
    s.push("binary structural formula", formula, want.int("structural-formula")?);
    let exceeds = exact.value.is_some_and(|v| formula > v);
    s.push("formula exceeds the optimum", exceeds, true);
    let refused = matches!(binary_structural_bound(&prob), Err(Error::Domain(_)));
    s.push("binary bounds refuse q = 3", refused, true);
    Ok(())
}

pub const EXAMPLE_IDS: [&str; 6] = ["ex1", "ex2", "ex3", "ex4", "ex5", "ex6"];

/// Recomputes one example. Errors mean the pipeline itself failed; value
/// disagreements are reported as mismatched checks.
pub fn reproduce(id: &str, budget: &SearchBudget) -> Result<Reproduction> {
    let ex = example(id)?;
    let mut sheet = Sheet {
        ex,
        checks: Vec::new(),
    };
    match id {
        "ex1" => ex1(&mut sheet, budget)?,
        "ex2" => ex2(&mut sheet, budget)?,
        "ex3" => ex3(&mut sheet, budget)?,
        "ex4" => ex4(&mut sheet, budget)?,
        "ex5" => ex5(&mut sheet, budget)?,
        "ex6" => ex6(&mut sheet, budget)?,
        _ => unreachable!("example() accepted {id}"),
    }
    Ok(Reproduction {
        id: id.to_string(),
        title: ex.title.to_string(),
        checks: sheet.checks,
    })
}
