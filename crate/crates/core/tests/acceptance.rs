use std::collections::BTreeSet;
use std::panic::{self, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::Instant;

use qse::condlang::{parse_program, BranchTree, CondExpr, Node, RelOp};
use qse::harness::{
    brute_force_partition, compare_partitions, coverage, coverage_sweep, division_count_report,
    embedded_corpus, random_programs, with_widths, GeneratorConfig, SweepMode,
};
use qse::partition::{
    decode_outcome, group_by_branch, run_and_extract, sample_histogram, simulate, Partition,
    TestCase,
};
use qse::qcore::{
    adder_fragment, comparator_fragment, multiplier_fragment, qubit_range, CircuitFragment,
    QubitId, Statevector,
};
use qse::qsynth::{
    apply_not, compile, logical_and_fragment, logical_or_fragment, logical_semantics,
    relational_semantics, FlagPair, FlagSemantics, QseCircuit,
};

const DART: &str = "var x:3; var y:2;
    if (x + y < 4) { if (x > y) {A} else {B} } else { if (y > 1) {C} else {D} }";

fn dart() -> QseCircuit {
    compile(&parse_program(DART).unwrap()).unwrap()
}

fn xy(pairs: &[(u64, u64)]) -> BTreeSet<TestCase> {
    pairs
        .iter()
        .map(|&(x, y)| TestCase::new(vec![("x".into(), x), ("y".into(), y)]))
        .collect()
}

fn dart_subsets() -> Vec<(&'static str, &'static str, BTreeSet<TestCase>)> {
    vec![
        ("A", "1001", xy(&[(1, 0), (2, 0), (3, 0), (2, 1)])),
        (
            "B",
            "0*01",
            xy(&[(0, 0), (0, 1), (0, 2), (0, 3), (1, 1), (1, 2)]),
        ),
        (
            "C",
            "10*0",
            xy(&[
                (2, 2),
                (3, 2),
                (4, 2),
                (5, 2),
                (6, 2),
                (7, 2),
                (1, 3),
                (2, 3),
                (3, 3),
                (4, 3),
                (5, 3),
                (6, 3),
                (7, 3),
            ]),
        ),
        (
            "D",
            "0**0",
            xy(&[
                (4, 0),
                (5, 0),
                (6, 0),
                (7, 0),
                (3, 1),
                (4, 1),
                (5, 1),
                (6, 1),
                (7, 1),
            ]),
        ),
    ]
}

fn golden_partition() {
    let start = Instant::now();
    let p = run_and_extract(&dart()).unwrap();
    assert_eq!(p.branches.len(), 4);
    for (id, pattern, cases) in dart_subsets() {
        let b = p.branch(id).unwrap();
        assert_eq!(b.cases, cases, "branch {id}");
        assert_eq!(b.pattern.as_deref(), Some(pattern), "branch {id}");
    }
    assert!(start.elapsed().as_secs_f64() < 5.0);
}

fn golden_amplitudes() {
    let c = dart();
    let state = simulate(&c).unwrap();
    let support: Vec<(usize, f64)> = state
        .support(1e-12)
        .map(|(i, a)| (i, a.norm_sqr()))
        .collect();
    assert_eq!(support.len(), 32);
    for (_, p) in &support {
        assert!((p - 1.0 / 32.0).abs() < 1e-9);
    }
    let work_mask: usize = c.layout.work_qubits().iter().map(|q| q.mask()).sum();
    let dirty: f64 = (0..state.amplitudes().len())
        .filter(|i| i & work_mask != 0)
        .map(|i| state.probability(i))
        .sum();
    assert!(dirty < 1e-9);
    let s_mask: usize = c.layout.s_qubits().iter().map(|q| q.mask()).sum();
    let inputs: BTreeSet<usize> = support.iter().map(|(i, _)| i & s_mask).collect();
    assert_eq!(inputs.len(), 32);
}

fn measurement_histogram() {
    let c = dart();
    let hist = sample_histogram(&c, 8192, 7).unwrap();
    assert_eq!(hist.len(), 32);
    for (key, &count) in &hist {
        assert!((176..=336).contains(&count), "{key}: {count}");
    }
    let groups = group_by_branch(&c, &hist);
    assert_eq!(groups.len(), 4);
    for (id, _, cases) in dart_subsets() {
        let pattern = c.dictionary.pattern(id).unwrap();
        let support: BTreeSet<TestCase> = groups[id]
            .keys()
            .map(|k| {
                let flags = u64::from_str_radix(&k[..c.layout.flag_width], 2).unwrap();
                assert!(pattern.matches(flags), "{k} outside {pattern}");
                decode_outcome(&c, k).unwrap().1
            })
            .collect();
        assert_eq!(support, cases, "branch {id}");
    }
}

fn encode(reg: &[QubitId], value: u64) -> usize {
    reg.iter()
        .enumerate()
        .filter(|(i, _)| value >> i & 1 == 1)
        .map(|(_, q)| q.mask())
        .sum()
}

fn decode(reg: &[QubitId], index: usize) -> u64 {
    reg.iter()
        .enumerate()
        .map(|(i, q)| ((index & q.mask() != 0) as u64) << i)
        .sum()
}

fn run_basis(frag: &CircuitFragment, num_qubits: usize, index: usize) -> usize {
    let mut state = Statevector::new(num_qubits).unwrap();
    state.set_basis(index);
    state.apply(frag).unwrap();
    let support: Vec<usize> = state.support(1e-9).map(|(i, _)| i).collect();
    assert_eq!(support.len(), 1);
    assert!((state.probability(support[0]) - 1.0).abs() < 1e-9);
    support[0]
}

fn arithmetic_truth_tables() {
    let (a, b, sum, anc) = (
        qubit_range(0, 3),
        qubit_range(3, 3),
        qubit_range(6, 4),
        qubit_range(10, 2),
    );
    let adder = adder_fragment(&a, &b, &sum, &anc).unwrap();
    let mut cases = 0;
    for x in 0..8 {
        for y in 0..8 {
            let out = run_basis(&adder, 12, encode(&a, x) | encode(&b, y));
            assert_eq!(
                out,
                encode(&a, x) | encode(&b, y) | encode(&sum, x + y),
                "{x}+{y}"
            );
            cases += 1;
        }
    }
    assert_eq!(cases, 64);

    let (a, b, prod, anc) = (
        qubit_range(0, 2),
        qubit_range(2, 2),
        qubit_range(4, 4),
        qubit_range(8, 1),
    );
    let mul = multiplier_fragment(&a, &b, &prod, &anc).unwrap();
    for x in 0..4 {
        for y in 0..4 {
            let out = run_basis(&mul, 9, encode(&a, x) | encode(&b, y));
            assert_eq!(decode(&prod, out), x * y, "{x}*{y}");
            assert_eq!(out & !encode(&prod, x * y), encode(&a, x) | encode(&b, y));
        }
    }

    let (a, b, anc) = (qubit_range(0, 3), qubit_range(3, 3), qubit_range(8, 3));
    let (hi, lo) = (QubitId(6), QubitId(7));
    let cmp = comparator_fragment(&a, &b, hi, lo, &anc).unwrap();
    for x in 0..8u64 {
        for y in 0..8u64 {
            let input = encode(&a, x) | encode(&b, y);
            let out = run_basis(&cmp, 11, input);
            assert_eq!(out & !(hi.mask() | lo.mask()), input);
            let flags = format!(
                "{}{}",
                (out & hi.mask() != 0) as u8,
                (out & lo.mask() != 0) as u8
            );
            let expected = match x.cmp(&y) {
                std::cmp::Ordering::Greater => "10",
                std::cmp::Ordering::Less => "01",
                std::cmp::Ordering::Equal => "00",
            };
            assert_eq!(flags, expected, "{x} vs {y}");
        }
    }
}

const OPS: [RelOp; 6] = [
    RelOp::Lt,
    RelOp::Le,
    RelOp::Gt,
    RelOp::Ge,
    RelOp::Eq,
    RelOp::Ne,
];

/// Comparator flag states for a > b, a < b and a = b, with the operand values
/// that produce them.
const OUTCOMES: [(bool, bool, u64, u64); 3] = [
    (true, false, 1, 0),
    (false, true, 0, 1),
    (false, false, 0, 0),
];

fn pair_state(pair: FlagPair, (hi, lo, _, _): (bool, bool, u64, u64)) -> usize {
    ((hi as usize) * pair.hi.mask()) | ((lo as usize) * pair.lo.mask())
}

fn logical_operators() {
    // two relational operands on 5 qubits
    let lp = FlagPair {
        hi: QubitId(1),
        lo: QubitId(0),
    };
    let rp = FlagPair {
        hi: QubitId(3),
        lo: QubitId(2),
    };
    let out = QubitId(4);
    let mut checked = 0;
    for &lop in &OPS {
        for &rop in &OPS {
            let l = relational_semantics(lop, lp);
            let r = relational_semantics(rop, rp);
            let and = logical_and_fragment(&l.sat, &r.sat, out).unwrap();
            let or = logical_or_fragment(&l.sat, &r.sat, out).unwrap();
            for lo in OUTCOMES {
                for ro in OUTCOMES {
                    let lt = lop.holds(lo.2, lo.3);
                    let rt = rop.holds(ro.2, ro.3);
                    for init in [false, true] {
                        let input = pair_state(lp, lo)
                            | pair_state(rp, ro)
                            | ((init as usize) * out.mask());
                        for (frag, truth) in [(&and, lt && rt), (&or, lt || rt)] {
                            let result = run_basis(frag, 5, input);
                            assert_eq!(result & !out.mask(), input & !out.mask());
                            assert_eq!(result & out.mask() != 0, init ^ truth, "{lop:?} {rop:?}");
                            checked += 1;
                        }
                    }
                }
            }
        }
    }
    assert_eq!(checked, 36 * 9 * 4);

    // a logical operand, optionally negated, against a relational one on 4 qubits
    let lflag = QubitId(0);
    let rp = FlagPair {
        hi: QubitId(2),
        lo: QubitId(1),
    };
    let out = QubitId(3);
    for negate in [false, true] {
        for &rop in &OPS {
            let l: FlagSemantics = if negate {
                apply_not(logical_semantics(lflag))
            } else {
                logical_semantics(lflag)
            };
            let r = relational_semantics(rop, rp);
            let and = logical_and_fragment(&l.sat, &r.sat, out).unwrap();
            let or = logical_or_fragment(&l.sat, &r.sat, out).unwrap();
            for lv in [false, true] {
                for ro in OUTCOMES {
                    let lt = lv != negate;
                    let rt = rop.holds(ro.2, ro.3);
                    let input = ((lv as usize) * lflag.mask()) | pair_state(rp, ro);
                    assert_eq!(run_basis(&and, 4, input) & out.mask() != 0, lt && rt);
                    assert_eq!(run_basis(&or, 4, input) & out.mask() != 0, lt || rt);
                }
            }
        }
    }
}

fn ops_used(trees: &[BranchTree]) -> BTreeSet<String> {
    fn walk(cond: &CondExpr, out: &mut BTreeSet<String>) {
        match cond {
            CondExpr::Rel(l, op, r) => {
                out.insert(op.symbol().to_string());
                for side in [l, r] {
                    let text = side.to_string();
                    for sym in ["+", "*"] {
                        if text.contains(sym) {
                            out.insert(sym.to_string());
                        }
                    }
                }
            }
            CondExpr::And(l, r) => {
                out.insert("&&".into());
                walk(l, out);
                walk(r, out);
            }
            CondExpr::Or(l, r) => {
                out.insert("||".into());
                walk(l, out);
                walk(r, out);
            }
            CondExpr::Not(inner) => {
                out.insert("!".into());
                walk(inner, out);
            }
        }
    }
    let mut out = BTreeSet::new();
    for t in trees {
        qse::condlang::visit_conditions(&t.root, &mut |c| walk(c, &mut out));
    }
    out
}

fn random_equivalence() {
    let start = Instant::now();
    let config = GeneratorConfig {
        max_depth: 3,
        max_input_width: 10,
        qubit_ceiling: 22,
    };
    let programs = random_programs(2024, 100, &config);
    let used = ops_used(&programs);
    for op in ["<", "<=", ">", ">=", "==", "!=", "+", "*", "&&", "||", "!"] {
        assert!(used.contains(op), "operator {op} never generated");
    }
    for (i, t) in programs.iter().enumerate() {
        assert!(t.input_width() <= 10 && t.root.depth() <= 3);
        let q = run_and_extract(&compile(t).unwrap()).unwrap();
        let cmp = compare_partitions(&q, &brute_force_partition(t).unwrap()).unwrap();
        assert!(cmp.passed(), "program {i}:\n{t}\n{cmp}");
    }
    assert!(start.elapsed().as_secs() < 600);
}

fn structural_counts() {
    let expected = [
        ("dart", 3, 4),
        ("power", 7, 11),
        ("stat", 2, 3),
        ("tcas", 4, 5),
        ("early", 1, 2),
        ("basic00181", 2, 3),
        ("snp3-ok", 1, 1),
        ("CWE789", 3, 6),
    ];
    let table = division_count_report(&embedded_corpus()).unwrap();
    println!("{table}");
    assert_eq!(table.rows.len(), expected.len());
    for (row, (name, divisions, paths)) in table.rows.iter().zip(expected) {
        assert_eq!(row.name, name);
        assert_eq!(row.divisions, divisions, "{name}");
        assert_eq!(row.feasible_paths, paths, "{name}");
        assert!(row.divisions <= row.feasible_paths);
    }
}

fn coverage_minimality() {
    let designated: Vec<_> = embedded_corpus()
        .into_iter()
        .filter(|p| p.coverage_width.is_some())
        .collect();
    assert_eq!(designated.len(), 3);
    let mut minima = Vec::new();
    for program in &designated {
        let t = program.tree().unwrap();
        let report = coverage_sweep(&t, 6, SweepMode::Oracle).unwrap();
        assert!(report.curve.is_monotone(), "{}", program.name);
        assert_eq!(
            report.curve.points.last().unwrap().1,
            1.0,
            "{}",
            program.name
        );
        let w = report.minimal_width.unwrap();
        if w > 1 {
            assert!(coverage(&t.with_uniform_width(w - 1), SweepMode::Oracle).unwrap() < 1.0);
        }
        let widths = report.minimal_widths.clone().unwrap();
        let at_minimum = with_widths(&t, &widths);
        assert_eq!(coverage(&at_minimum, SweepMode::Oracle).unwrap(), 1.0);
        for i in 0..widths.len() {
            if widths[i].1 > 1 {
                let mut narrower = widths.clone();
                narrower[i].1 -= 1;
                let c = coverage(&with_widths(&t, &narrower), SweepMode::Oracle).unwrap();
                assert!(c < 1.0, "{}: {narrower:?} still covers", program.name);
            }
        }
        let q = run_and_extract(&compile(&at_minimum).unwrap()).unwrap();
        assert!(
            compare_partitions(&q, &brute_force_partition(&at_minimum).unwrap())
                .unwrap()
                .passed()
        );
        minima.push(w);
    }
    println!("uniform full-coverage widths {minima:?}");
    assert_eq!(minima, [2, 4, 5]);
}

fn with_root(
    tree: &BranchTree,
    cond: CondExpr,
    then_branch: &Node,
    else_branch: &Node,
) -> BranchTree {
    BranchTree {
        decls: tree.decls.clone(),
        root: Node::branch(cond, then_branch.clone(), else_branch.clone()),
    }
}

fn gate_multiset(c: &QseCircuit) -> Vec<String> {
    let mut gates: Vec<String> = c.full().gates.iter().map(|g| format!("{g:?}")).collect();
    gates.sort();
    gates
}

fn subset(p: &Partition, id: &str) -> BTreeSet<TestCase> {
    p.branch(id).unwrap().cases.clone()
}

fn not_is_free() {
    let programs = random_programs(99, 20, &GeneratorConfig::default());
    for t in &programs {
        let Node::If {
            cond,
            then_branch,
            else_branch,
        } = &t.root
        else {
            panic!("generated programs branch at the root");
        };

        // `if (!c) {T} else {E}` against `if (c) {E} else {T}`; the arm blocks
        // are emitted in opposite orders
        let negated = with_root(t, CondExpr::negate(cond.clone()), then_branch, else_branch);
        let exchanged = with_root(t, cond.clone(), else_branch, then_branch);
        let (nc, ec) = (compile(&negated).unwrap(), compile(&exchanged).unwrap());
        assert_eq!(gate_multiset(&nc), gate_multiset(&ec), "{t}");
        let (np, ep) = (run_and_extract(&nc).unwrap(), run_and_extract(&ec).unwrap());
        for id in t.leaf_ids() {
            assert_eq!(subset(&np, id), subset(&ep, id));
        }

        // `if (!c) {T} else {E}` with leaf arms
        let flat = BranchTree {
            decls: t.decls.clone(),
            root: Node::branch(cond.clone(), Node::leaf("T"), Node::leaf("E")),
        };
        let wrapped = BranchTree {
            decls: t.decls.clone(),
            root: Node::branch(
                CondExpr::negate(cond.clone()),
                Node::leaf("T"),
                Node::leaf("E"),
            ),
        };
        let (fc, wc) = (compile(&flat).unwrap(), compile(&wrapped).unwrap());
        assert_eq!(fc.full().gates, wc.full().gates, "{t}");
        let (fp, wp) = (run_and_extract(&fc).unwrap(), run_and_extract(&wc).unwrap());
        assert_eq!(subset(&wp, "T"), subset(&fp, "E"));
        assert_eq!(subset(&wp, "E"), subset(&fp, "T"));
    }
}

fn main() -> ExitCode {
    let criteria: [(&str, fn()); 9] = [
        ("golden worked example: partition", golden_partition),
        ("golden worked example: amplitudes", golden_amplitudes),
        ("measurement histogram", measurement_histogram),
        ("arithmetic module truth tables", arithmetic_truth_tables),
        ("logical-operator circuits", logical_operators),
        (
            "oracle equivalence on 100 random programs",
            random_equivalence,
        ),
        ("corpus structural counts", structural_counts),
        ("coverage sweep minimality", coverage_minimality),
        ("negation emits no gates", not_is_free),
    ];
    let mut failures = 0;
    for (n, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = panic::catch_unwind(AssertUnwindSafe(check));
        let verdict = if outcome.is_ok() { "PASS" } else { "FAIL" };
        if outcome.is_err() {
            failures += 1;
        }
        println!(
            "criterion {}: {verdict} {name} ({:.2?})",
            n + 1,
            start.elapsed()
        );
    }
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
