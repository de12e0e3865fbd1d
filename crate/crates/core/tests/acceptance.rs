//! End-to-end acceptance run. Prints one PASS/FAIL line per criterion and
//! exits nonzero if any criterion fails.

use std::collections::{BTreeMap, BTreeSet};
use std::process::ExitCode;
use std::time::Instant;

use qmds::cli::{char3_tags, cmd_search, general_tags, lemma_report, write_sweep, FieldArgs, Format, Mode, SearchArgs};
use qmds::construct::{literal_q3_table, small_q3_table};
use qmds::gf::{make_field, Element, FieldCtx};
use qmds::search::{exhaustive_search, randomized_repair, SearchConfig, DEFAULT_MAX_CANDIDATES};
use qmds::verify::{brute_dual_distance, brute_min_distance, certify, dual_distance, min_distance, rank};
use qmds::GeneratorMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SWEEP_FIELDS: [(u32, u32); 8] = [(3, 1), (5, 1), (7, 1), (3, 2), (11, 1), (13, 1), (5, 2), (3, 3)];

/// Machine report bytes, all-rows-pass flag, and case tag per row, by (p, r).
type Sweeps = BTreeMap<(u32, u32), (Vec<u8>, bool, Vec<String>)>;

struct Outcome {
    pass: bool,
    detail: String,
}

fn jobs() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

/// Machine sweep bytes plus the case tag of each row.
fn sweep(p: u32, r: u32) -> (Vec<u8>, bool, Vec<String>) {
    let ctx = make_field(p, r).unwrap();
    let mut buf = Vec::new();
    let report = write_sweep(&ctx, jobs(), Format::Machine, &mut buf).unwrap();
    let all = report.totals.failed == 0
        && report.rows.len() == ctx.order() as usize - 2
        && report.rows.iter().all(|row| {
            row.quantum.is_some_and(|qp| {
                qp.n == row.n && qp.k == row.n as i64 - 4 && qp.d == 3 && qp.mds && qp.q == ctx.q()
            }) && row.oracle_agreement != "false"
        });
    (buf, all, report.rows.iter().map(|r| r.case.clone()).collect())
}

fn criterion_1(sweeps: &Sweeps) -> Outcome {
    let failed: Vec<String> = sweeps
        .iter()
        .filter(|(_, v)| !v.1)
        .map(|((p, r), _)| format!("{}", p.pow(*r)))
        .collect();
    let rows: usize = sweeps.values().map(|v| v.2.len()).sum();
    Outcome {
        pass: failed.is_empty(),
        detail: if failed.is_empty() {
            format!("q in {{3,5,7,9,11,13,25,27}}, {rows} lengths, all [[n,n-4,3]] MDS")
        } else {
            format!("failing q: {}", failed.join(","))
        },
    }
}

fn criterion_2(sweeps: &Sweeps) -> Outcome {
    let mut notes = Vec::new();
    let seen = |fields: &[(u32, u32)]| -> BTreeSet<String> {
        fields.iter().flat_map(|f| sweeps[f].2.iter().cloned()).collect()
    };
    let char3 = seen(&[(3, 2), (3, 3)]);
    let missing3: Vec<String> = char3_tags().into_iter().filter(|t| !char3.contains(t)).collect();

    let mut general = seen(&[(5, 1), (7, 1), (11, 1), (13, 1)]);
    let mut missing: Vec<String> = general_tags().into_iter().filter(|t| !general.contains(t)).collect();
    // Tags not reached by the base primes: keep sweeping larger primes.
    for p in [17u32, 19, 23, 29, 31, 37] {
        if missing.is_empty() {
            break;
        }
        let (_, ok, tags) = sweep(p, 1);
        if !ok {
            notes.push(format!("q={p} sweep failed"));
        }
        general.extend(tags);
        let reached: Vec<String> = missing.iter().filter(|t| general.contains(*t)).cloned().collect();
        if !reached.is_empty() {
            notes.push(format!("{} first at q={p}", reached.join(",")));
        }
        missing.retain(|t| !general.contains(t));
    }
    let pass = missing3.is_empty() && missing.is_empty() && notes.iter().all(|n| !n.contains("failed"));
    let mut detail = format!("{} char-3 tags, {} general tags", char3_tags().len(), general_tags().len());
    if !notes.is_empty() {
        detail += &format!("; {}", notes.join("; "));
    }
    if !missing3.is_empty() || !missing.is_empty() {
        detail += &format!("; never fired: {:?} {:?}", missing3, missing);
    }
    Outcome { pass, detail }
}

fn criterion_3() -> Outcome {
    let fields = [(3, 1), (5, 1), (7, 1), (3, 2), (11, 1), (13, 1), (17, 1), (19, 1), (23, 1), (5, 2), (3, 3)];
    let bad: Vec<u32> = fields
        .iter()
        .filter(|&&(p, r)| {
            let ctx = make_field(p, r).unwrap();
            !lemma_report(&ctx).is_ok_and(|rep| rep.all_hold())
        })
        .map(|&(p, r)| p.pow(r))
        .collect();
    Outcome {
        pass: bad.is_empty(),
        detail: if bad.is_empty() {
            format!("{} odd q <= 27: fibres, norm sum, pair identity", fields.len())
        } else {
            format!("failing q: {bad:?}")
        },
    }
}

fn random_rank2(ctx: &FieldCtx, rng: &mut ChaCha8Rng) -> GeneratorMatrix {
    loop {
        let n = rng.gen_range(3..=12);
        let mut draw = || (0..n).map(|_| ctx.element(rng.gen_range(0..ctx.order())).unwrap()).collect::<Vec<Element>>();
        let (a, b) = (draw(), draw());
        let m = GeneratorMatrix::new(a, b).unwrap();
        if rank(ctx, &m) == 2 {
            return m;
        }
    }
}

fn criterion_4() -> Outcome {
    let mut mismatches = Vec::new();
    let mut checked = 0;
    for p in [3u32, 5] {
        let ctx = make_field(p, 1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0000 + p as u64);
        for i in 0..1000 {
            let m = random_rank2(&ctx, &mut rng);
            let d = min_distance(&ctx, &m).unwrap();
            let bd = brute_min_distance(&ctx, &m).unwrap();
            let dd = dual_distance(&ctx, &m).unwrap();
            let bdd = brute_dual_distance(&ctx, &m);
            checked += 1;
            if d != bd || dd != bdd {
                mismatches.push(format!("q={p} #{i}: d {d}/{bd} dual {dd}/{bdd}"));
            }
        }
    }
    Outcome {
        pass: mismatches.is_empty(),
        detail: if mismatches.is_empty() {
            format!("{checked} random rank-2 matrices agree with enumeration")
        } else {
            mismatches.into_iter().take(5).collect::<Vec<_>>().join("; ")
        },
    }
}

fn criterion_5() -> Outcome {
    let ctx = make_field(3, 1).unwrap();
    let mut pass = true;
    let mut audit = Vec::new();
    for n in 4..=10 {
        let literal = literal_q3_table(&ctx, n).unwrap();
        let literal_ok = certify(&ctx, &literal).passes();
        if [4, 5, 9].contains(&n) && !literal_ok {
            pass = false;
        }
        let (used, repaired) = match small_q3_table(&ctx, n) {
            Ok(v) => v,
            Err(_) => {
                pass = false;
                audit.push(format!("n={n}: literal FAIL, repair none"));
                continue;
            }
        };
        pass &= certify(&ctx, &used).passes() && repaired != literal_ok;
        audit.push(format!(
            "n={n}: literal {}, repair {}",
            if literal_ok { "pass" } else { "FAIL" },
            if repaired { "used" } else { "not needed" }
        ));
    }
    // Repair must also recover a corrupted table within two edits.
    let mut broken = literal_q3_table(&ctx, 9).unwrap();
    broken.set(0, 3, ctx.add(broken.get(0, 3), Element::ONE));
    broken.set(1, 6, ctx.add(broken.get(1, 6), Element::ONE));
    match randomized_repair(&ctx, &broken, &SearchConfig::repair(2, 7)) {
        Ok(Some(fix)) if fix.edits <= 2 && certify(&ctx, &fix.matrix).passes() => {
            audit.push(format!("corrupted n=9 repaired in {} edits", fix.edits))
        }
        _ => {
            pass = false;
            audit.push("corrupted n=9 not repaired".into());
        }
    }
    for line in &audit {
        println!("    {line}");
    }
    Outcome {
        pass,
        detail: "q=3 tables n=4..10 audited".into(),
    }
}

fn search_bytes(n: usize) -> Vec<u8> {
    let args = SearchArgs {
        field: FieldArgs {
            p: 3,
            r: 1,
            format: Format::Machine,
        },
        n,
        mode: Mode::Exhaustive,
        seed: 0,
        allow_even_q: false,
        max_candidates: DEFAULT_MAX_CANDIDATES,
        out: None,
    };
    let (mut out, mut err) = (Vec::new(), Vec::new());
    assert_eq!(cmd_search(&args, &mut out, &mut err).unwrap(), 0);
    out
}

fn criterion_6() -> Outcome {
    let ctx = make_field(3, 1).unwrap();
    let mut counts = Vec::new();
    let mut pass = true;
    for n in 4..=6 {
        match exhaustive_search(&ctx, n, &SearchConfig::exhaustive(n)) {
            Ok(outcome) => {
                let ok = !outcome.matrices.is_empty() && outcome.matrices.iter().all(|m| certify(&ctx, m).passes());
                pass &= ok;
                counts.push(format!("n={n}: {} of {}", outcome.matrices.len(), outcome.candidates));
            }
            Err(e) => {
                pass = false;
                counts.push(format!("n={n}: {e}"));
            }
        }
    }
    Outcome {
        pass,
        detail: counts.join(", "),
    }
}

fn criterion_7(sweeps: &Sweeps, searches: &[Vec<u8>]) -> Outcome {
    let mut diffs = Vec::new();
    for (&(p, r), first) in sweeps {
        if sweep(p, r).0 != first.0 {
            diffs.push(format!("sweep q={}", p.pow(r)));
        }
    }
    // A single worker must give the same bytes as the parallel run.
    let ctx = make_field(5, 2).unwrap();
    let mut serial = Vec::new();
    write_sweep(&ctx, 1, Format::Machine, &mut serial).unwrap();
    if serial != sweeps[&(5, 2)].0 {
        diffs.push("sweep q=25 jobs=1".into());
    }
    for (i, first) in searches.iter().enumerate() {
        if &search_bytes(4 + i) != first {
            diffs.push(format!("search n={}", 4 + i));
        }
    }
    Outcome {
        pass: diffs.is_empty(),
        detail: if diffs.is_empty() {
            "repeat sweeps and searches are byte-identical".into()
        } else {
            format!("differ: {}", diffs.join(", "))
        },
    }
}

fn report(index: usize, started: Instant, outcome: Outcome) -> bool {
    println!(
        "criterion {index}: {} ({:.2}s) {}",
        if outcome.pass { "PASS" } else { "FAIL" },
        started.elapsed().as_secs_f64(),
        outcome.detail
    );
    outcome.pass
}

fn main() -> ExitCode {
    let mut all = true;

    let t = Instant::now();
    let sweeps: BTreeMap<_, _> = SWEEP_FIELDS.iter().map(|&(p, r)| ((p, r), sweep(p, r))).collect();
    all &= report(1, t, criterion_1(&sweeps));

    let t = Instant::now();
    all &= report(2, t, criterion_2(&sweeps));

    let t = Instant::now();
    all &= report(3, t, criterion_3());

    let t = Instant::now();
    all &= report(4, t, criterion_4());

    let t = Instant::now();
    all &= report(5, t, criterion_5());

    let t = Instant::now();
    let c6 = criterion_6();
    let searches: Vec<Vec<u8>> = (4..=6).map(search_bytes).collect();
    all &= report(6, t, c6);

    let t = Instant::now();
    all &= report(7, t, criterion_7(&sweeps, &searches));

    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
