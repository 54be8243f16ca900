//! Acceptance run: one PASS/FAIL line per criterion.
//!
//! Every expected value is checked against an oracle written here, not in
//! the library: residuals are counted by slicing truth tables, families are
//! filtered by their definitions, and counts come from exhaustive loops.
//!
//! Two criteria cannot pass as stated (the early count at n = 4 and the
//! 47-state game). They print FAIL together with the evidence, and the run
//! only succeeds if that evidence itself checks out.

use std::collections::{BTreeSet, HashSet};
use std::process::ExitCode;
use std::time::Instant;

use maxcomplex_cli::cache::Cache;
use maxcomplex_core::bounds::{complete_dfa_bound, csg_bound, general_bound, monotone_bound};
use maxcomplex_core::counting::{count_max, o_i, onto_count, onto_first_count, OntoSpec};
use maxcomplex_core::csg::{
    build_csg_witness, count_early, enumerate_csg_masks, enumerate_early_masks,
    search_csg_relation, search_early_relation,
};
use maxcomplex_core::lattice::{
    build_witness_language, check_relation, enumerate_monotone_masks, lemma_les_check,
    named_embedding,
};
use maxcomplex_core::minauto::{mn_class_count, Membership};
use maxcomplex_core::witness::construct_maximal;
use maxcomplex_core::{
    state_complexity, BigCount, Certificate, ColoredFunction, Embedding, Error, SearchConfig,
    SearchOutcome,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Distinct nonzero residuals, counted depth by depth from the table.
fn residual_oracle(table: &[u32], b: usize, n: u32) -> usize {
    (0..=n)
        .map(|d| {
            let block = b.pow(n - d);
            table
                .chunks(block)
                .filter(|r| r.iter().any(|&v| v != 0))
                .collect::<HashSet<_>>()
                .len()
        })
        .sum()
}

fn bits(mask: u64, n: u32) -> Vec<u32> {
    (0..1usize << n).map(|r| (mask >> r & 1) as u32).collect()
}

/// `sum_i min(b^i, c^(b^(n-i)) - 1)` in machine integers.
fn general_bound_oracle(b: u128, c: u128, n: u32) -> u128 {
    (0..=n)
        .map(|i| {
            let tower = u32::try_from(b.pow(n - i))
                .ok()
                .and_then(|e| c.checked_pow(e))
                .map_or(u128::MAX, |t| t - 1);
            b.pow(i).min(tower)
        })
        .sum()
}

fn is_monotone_oracle(mask: u64, n: u32) -> bool {
    (0..1u64 << n).all(|x| mask >> x & 1 == 0 || (0..n).all(|k| mask >> (x | 1 << k) & 1 == 1))
}

/// Moving a 1 one place earlier (towards the first variable, the high bit)
/// keeps the word accepted.
fn is_early_oracle(mask: u64, n: u32) -> bool {
    (0..1u64 << n).all(|x| {
        mask >> x & 1 == 0
            || (0..n.saturating_sub(1)).all(|k| {
                // bit k+1 is the position just before bit k
                let moved = (x >> k & 1 == 1 && x >> (k + 1) & 1 == 0).then(|| x ^ (0b11 << k));
                moved.is_none_or(|y| mask >> y & 1 == 1)
            })
    })
}

fn word_set(mask: u64) -> BTreeSet<String> {
    (0..8)
        .filter(|r| mask >> r & 1 == 1)
        .map(|r| format!("{r:03b}"))
        .collect()
}

/// The 60 sets of three-bit words with seven states, as tabulated.
const MAXIMAL_N3: [&str; 60] = [
    "000,001,010,101",
    "000,001,010,111",
    "000,001,011,100",
    "000,001,100,111",
    "000,001,011,110",
    "000,001,101,110",
    "000,010,011,101",
    "000,010,011,111",
    "001,010,011,100",
    "010,011,100,111",
    "001,010,011,110",
    "010,011,101,110",
    "000,011,100,101",
    "000,100,101,111",
    "001,010,100,101",
    "010,100,101,111",
    "001,100,101,110",
    "011,100,101,110",
    "000,011,110,111",
    "000,101,110,111",
    "001,010,110,111",
    "010,101,110,111",
    "001,100,110,111",
    "011,100,110,111",
    "000,001,010,100,111",
    "000,001,010,101,110",
    "000,001,011,100,110",
    "000,001,011,101,110",
    "000,001,011,100,111",
    "000,001,010,101,111",
    "000,010,011,100,111",
    "000,010,011,101,110",
    "001,010,011,100,110",
    "001,010,011,101,110",
    "001,010,011,100,111",
    "000,010,011,101,111",
    "000,010,100,101,111",
    "000,011,100,101,110",
    "001,010,100,101,110",
    "001,011,100,101,110",
    "001,010,100,101,111",
    "000,011,100,101,111",
    "000,010,101,110,111",
    "000,011,100,110,111",
    "001,010,100,110,111",
    "001,011,100,110,111",
    "001,010,101,110,111",
    "000,011,101,110,111",
    "000,001,010,011,100,111",
    "000,001,010,011,101,110",
    "000,001,010,100,101,111",
    "000,001,011,100,101,110",
    "000,001,010,101,110,111",
    "000,001,011,100,110,111",
    "000,010,011,100,101,111",
    "001,010,011,100,101,110",
    "000,010,011,101,110,111",
    "001,010,011,100,110,111",
    "000,011,100,101,110,111",
    "001,010,100,101,110,111",
];

struct Verdict {
    pass: bool,
    detail: String,
    /// For a FAIL: the shortfall is real and its evidence was re-verified here.
    documented: bool,
}

fn pass(detail: impl Into<String>) -> Verdict {
    Verdict {
        pass: true,
        detail: detail.into(),
        documented: false,
    }
}

fn check(cond: bool, what: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(what.into())
    }
}

type Step = Result<Verdict, String>;

fn exhaustive_three() -> Step {
    let mut best = 0;
    let mut winners = BTreeSet::new();
    for mask in 0..256u64 {
        let t = bits(mask, 3);
        let sc = residual_oracle(&t, 2, 3);
        check(
            state_complexity(&ColoredFunction::new(2, 3, 2, t).unwrap()) == sc,
            format!("mask {mask:#x}"),
        )?;
        if sc > best {
            best = sc;
            winners.clear();
        }
        if sc == best {
            winners.insert(word_set(mask));
        }
    }
    let table: BTreeSet<BTreeSet<String>> = MAXIMAL_N3
        .iter()
        .map(|s| s.split(',').map(str::to_string).collect())
        .collect();
    let sizes = |k: usize| winners.iter().filter(|z| z.len() == k).count();
    check(
        best == 7 && general_bound(2, 2, 3) == BigCount::from(7u32),
        format!("max {best}"),
    )?;
    check(
        winners.len() == 60,
        format!("{} maximal languages", winners.len()),
    )?;
    check((sizes(4), sizes(5), sizes(6)) == (24, 24, 12), "size split")?;
    check(winners == table, "maximal sets differ from the table")?;
    Ok(pass(
        "max 7 = general_bound(2,2,3); 60 languages (24/24/12) equal to the table",
    ))
}

fn counting_vs_brute() -> Step {
    let mut seen = Vec::new();
    for n in 1..=4u32 {
        let len = 1usize << n;
        let bound = general_bound_oracle(2, 2, n) as usize;
        let attained = (0..1u64 << len)
            .filter(|&m| residual_oracle(&bits(m, n), 2, n) == bound)
            .count();
        let (_, formula) = count_max(2, 2, n).map_err(|e| e.to_string())?;
        check(
            formula == BigCount::from(attained),
            format!("n={n}: formula {formula}, brute {attained}"),
        )?;
        seen.push(attained.to_string());
    }
    Ok(pass(format!(
        "count_max(2,2,n) = brute force for n=1..4: {}",
        seen.join(", ")
    )))
}

fn surjective_maps(domain: u32, codomain: u32, must_hit: u32) -> u64 {
    let total = (codomain as u64).pow(domain);
    (0..total)
        .filter(|&code| {
            let mut hit = 0u64;
            let mut c = code;
            for _ in 0..domain {
                hit |= 1 << (c % codomain as u64);
                c /= codomain as u64;
            }
            hit & ((1 << must_hit) - 1) == (1 << must_hit) - 1
        })
        .count() as u64
}

fn o_machinery() -> Step {
    let o43 = surjective_maps(4, 3, 3);
    let o33 = surjective_maps(3, 3, 3);
    check(
        (o43, o33) == (36, 6),
        format!("oracle O_4,3={o43} O_3,3={o33}"),
    )?;
    let onto = onto_first_count(OntoSpec::new(4, 4).unwrap()).unwrap();
    check(
        onto == BigCount::from(surjective_maps(4, 4, 3)) && onto == BigCount::from(60u32),
        format!("onto_first_count {onto}"),
    )?;
    check(onto_count(4, 3) == BigCount::from(o43), "onto_count(4,3)")?;
    check(onto_count(3, 3) == BigCount::from(o33), "onto_count(3,3)")?;
    check(
        o_i(2, 2, 3, 1).unwrap() == BigCount::from(0u32),
        "o_i(2,2,3,1)",
    )?;
    check(
        o_i(2, 2, 3, 2).unwrap() == BigCount::from(60u32),
        "o_i(2,2,3,2)",
    )?;
    Ok(pass(
        "O_4,3=36, O_3,3=6, onto_first_count(4,4)=60, o_i(2,2,3,1)=0, o_i(2,2,3,2)=60",
    ))
}

fn witness_attainment() -> Step {
    let mut reached = Vec::new();
    for (b, c, top) in [(2u32, 2u32, 12u32), (2, 3, 10), (3, 2, 7)] {
        for n in 0..=top {
            let f = construct_maximal(b, c, n).map_err(|e| format!("({b},{c},{n}): {e}"))?;
            let sc = residual_oracle(f.table(), b as usize, n);
            let bound = general_bound_oracle(b as u128, c as u128, n);
            check(
                sc as u128 == bound,
                format!("({b},{c},{n}): {sc} states, bound {bound}"),
            )?;
            check(
                general_bound(b, c, n) == BigCount::from(bound),
                format!("general_bound({b},{c},{n})"),
            )?;
            check(
                state_complexity(&f) == sc,
                format!("library count at ({b},{c},{n})"),
            )?;
        }
        reached.push(format!("({b},{c}) n<={top}"));
    }
    Ok(pass(format!(
        "attained for {}; general_bound(2,2,6) = {} by direct summation",
        reached.join(", "),
        general_bound_oracle(2, 2, 6)
    )))
}

fn bound_tables() -> Step {
    check(
        general_bound(2, 2, 3) == BigCount::from(7u32),
        "general_bound(2,2,3)",
    )?;
    let (_, complete) = complete_dfa_bound(2, 3).map_err(|e| e.to_string())?;
    check(
        complete == BigCount::from(8u32),
        format!("complete_dfa_bound(2,3) = {complete}"),
    )?;
    let table = [1u32, 2, 4, 6, 10, 15, 23, 39, 58, 90, 154];
    for (n, &v) in table.iter().enumerate() {
        check(
            monotone_bound(n as u32).unwrap() == BigCount::from(v),
            format!("monotone_bound({n})"),
        )?;
    }
    check(
        csg_bound(8).unwrap() == BigCount::from(47u32),
        "csg_bound(8)",
    )?;
    Ok(pass(
        "7, 8 = 7+1, monotone (1,2,4,6,10,15,23,39,58,90,154), csg_bound(8) = 47",
    ))
}

fn monotone_tightness() -> Step {
    for n in 0..=5u32 {
        let family: Vec<u64> = match n {
            0..=4 => (0..1u64 << (1u64 << n))
                .filter(|&m| is_monotone_oracle(m, n))
                .collect(),
            _ => enumerate_monotone_masks(n).unwrap(),
        };
        if n == 5 {
            check(family.len() == 7581, "7581 monotone functions at n = 5")?;
            check(
                family.iter().all(|&m| is_monotone_oracle(m, 5)),
                "non-monotone mask at n = 5",
            )?;
        }
        let best = family
            .iter()
            .map(|&m| residual_oracle(&bits(m, n), 2, n))
            .max()
            .unwrap();
        check(
            BigCount::from(best) == monotone_bound(n).unwrap(),
            format!("n={n}: best {best}"),
        )?;
    }
    let asian = ColoredFunction::from_words(2, 3, ["011", "100", "101", "110", "111"]).unwrap();
    let majority = ColoredFunction::from_words(2, 3, ["011", "101", "110", "111"]).unwrap();
    check(
        residual_oracle(asian.table(), 2, 3) == 6 && state_complexity(&asian) == 6,
        "Asian",
    )?;
    check(
        residual_oracle(majority.table(), 2, 3) == 6 && state_complexity(&majority) == 6,
        "majority",
    )?;
    Ok(pass(
        "max over monotone languages = monotone_bound(n) for n<=5; Asian 6, majority 6",
    ))
}

fn lattice_counts() -> Step {
    let monotone: Vec<usize> = (0..=6)
        .map(|n| enumerate_monotone_masks(n).unwrap().len())
        .collect();
    check(
        monotone == [2, 3, 6, 20, 168, 7581, 7828354],
        format!("monotone {monotone:?}"),
    )?;
    for n in 0..=4u32 {
        let brute = (0..1u64 << (1u64 << n))
            .filter(|&m| is_monotone_oracle(m, n))
            .count();
        check(
            brute == monotone[n as usize],
            format!("monotone brute n={n}"),
        )?;
    }
    let games: Vec<usize> = (0..=6)
        .map(|n| enumerate_csg_masks(n).unwrap().len())
        .collect();
    check(
        games == [2, 3, 5, 10, 27, 119, 1173],
        format!("csg {games:?}"),
    )?;
    for n in 0..=4u32 {
        let brute = (0..1u64 << (1u64 << n))
            .filter(|&m| is_monotone_oracle(m, n) && is_early_oracle(m, n))
            .count();
        check(brute == games[n as usize], format!("csg brute n={n}"))?;
    }
    let early: Vec<u64> = (0..=5).map(|n| count_early(n).unwrap()).collect();
    for n in 0..=4u32 {
        let brute = (0..1u64 << (1u64 << n))
            .filter(|&m| is_early_oracle(m, n))
            .count() as u64;
        check(
            brute == early[n as usize],
            format!("early brute n={n}: {brute}"),
        )?;
    }
    check(
        enumerate_early_masks(5).unwrap().len() as u64 == early[5],
        "early enumeration n=5",
    )?;
    let stated = [2u64, 4, 12, 64, 700, 36864];
    if early == stated {
        return Ok(pass("monotone, early and CSG counts as stated"));
    }
    let off: Vec<String> = (0..6)
        .filter(|&n| early[n] != stated[n])
        .map(|n| format!("n={n}: {} (stated {})", early[n], stated[n]))
        .collect();
    // only the n = 4 entry is off, and brute force above settles it
    check(
        off.len() == 1 && early[4] == 800,
        format!("unexpected early counts {early:?}"),
    )?;
    Ok(Verdict {
        pass: false,
        detail: format!(
            "monotone (2,3,6,20,168,7581,7828354) and CSG (2,3,5,10,27,119,1173) match; early counts {early:?} \
             differ from the stated list at {}; brute force over all 65536 functions confirms 800",
            off.join(", ")
        ),
        documented: true,
    })
}

fn embeddings() -> Step {
    for e in Embedding::ALL {
        let (i, j) = e.shape();
        let map = named_embedding(e).map_err(|err| err.to_string())?;
        let cert = check_relation(i, j, &map)
            .unwrap()
            .map_err(|f| format!("{}: {f}", e.name()))?;
        // re-check the defining properties by hand
        let images = cert.images();
        check(
            images.iter().collect::<HashSet<_>>().len() == images.len(),
            format!("{} not injective", e.name()),
        )?;
        for x in 0..images.len() {
            for k in 0..i {
                let y = x | 1 << k;
                check(
                    images[x] & !images[y] == 0,
                    format!("{} not isotone", e.name()),
                )?;
            }
            check(
                is_monotone_oracle(images[x], j) && images[x] != 0,
                format!("{} leaves the family", e.name()),
            )?;
        }
        let half = 1u32 << (j - 1);
        let low = (1u64 << half) - 1;
        let reached: HashSet<u64> = images
            .iter()
            .flat_map(|&g| [g & low, g >> half])
            .filter(|&h| h != 0)
            .collect();
        let needed = (1..1u64 << half)
            .filter(|&h| is_monotone_oracle(h, j - 1))
            .count();
        check(
            reached.len() == needed,
            format!("{} covers {} of {needed}", e.name(), reached.len()),
        )?;
    }
    check(lemma_les_check(), "switching lemma")?;
    Ok(pass("post_alh (2,3), fig39 (4,3), both_restricted (3,3), alh (4,4), small (5,4), friday (6,4); lemma holds"))
}

fn monotone_witnesses() -> Step {
    let expect = [1usize, 2, 4, 6, 10, 15, 23, 39, 58, 90, 154];
    for (n, &want) in expect.iter().enumerate() {
        let f = build_witness_language(n as u32)
            .map_err(|e| format!("n={n}: {e}"))?
            .to_function();
        let t = f.table();
        let monotone = (0..t.len()).all(|x| t[x] == 0 || (0..n).all(|k| t[x | 1 << k] == 1));
        check(monotone, format!("n={n} not monotone"))?;
        let sc = residual_oracle(t, 2, n as u32);
        check(sc == want, format!("n={n}: {sc} states"))?;
    }
    Ok(pass(
        "build_witness_language(n) reaches (1,2,4,6,10,15,23,39,58,90,154)",
    ))
}

fn csg_chain() -> Step {
    let dir = std::path::Path::new(env!("CARGO_TARGET_TMPDIR")).join("acceptance-cache");
    let _ = std::fs::remove_dir_all(&dir);
    let cache = Cache::new(&dir);
    let params = "order=majorization i=4 j=4";
    let search = || -> Result<String, String> {
        match search_csg_relation(4, 4, &SearchConfig::default()).map_err(|e| e.to_string())? {
            SearchOutcome::Found { certificate, nodes } => {
                Ok(Certificate::from_adequacy(&certificate, Some(nodes)).to_string())
            }
            other => Err(format!("search gave {other:?}")),
        }
    };
    let (text, hit) = cache
        .get_or_insert("certificate", params, || {
            search().map_err(anyhow::Error::msg)
        })
        .map_err(|e| e.to_string())?;
    check(!hit, "fresh cache")?;
    let (again, hit) = cache
        .get_or_insert("certificate", params, || unreachable!())
        .map_err(|e| e.to_string())?;
    check(hit && again == text, "certificate cached")?;
    let cert: Certificate = text.parse().map_err(|e: Error| e.to_string())?;
    let checked = cert
        .verify()
        .map_err(|e| e.to_string())?
        .map_err(|f| f.to_string())?;
    check(
        checked.map.target.len() == 26 && checked.covered.len() == 9,
        "sizes 26 and 9",
    )?;
    let relation = "search_csg_relation(4,4) certified: E_4 into C_4^- (26) onto C_3^- (9), cached";

    // the 47-state game
    match build_csg_witness(8, &SearchConfig::default()) {
        Ok(f) => {
            let sc = residual_oracle(&f.to_function().into_table(), 2, 8);
            return if sc == 47 {
                Ok(pass(format!(
                    "{relation}; 8-variable witness has 47 states"
                )))
            } else {
                Err(format!("witness has {sc} states"))
            };
        }
        Err(Error::NoWitness) => {}
        Err(e) => return Err(e.to_string()),
    }
    // evidence: the boundary-respecting relation does not exist, and the same
    // gap already shows at n = 4 and n = 6 by exhaustion
    let early = search_early_relation(4, 4, &SearchConfig::default()).map_err(|e| e.to_string())?;
    check(
        matches!(early, SearchOutcome::Refuted { .. }),
        format!("early (4,4) search gave {early:?}"),
    )?;
    check(!checked.composable, "plain certificate composes")?;
    let mut best = Vec::new();
    for n in [4u32, 6] {
        let m = enumerate_csg_masks(n)
            .unwrap()
            .into_iter()
            .map(|m| residual_oracle(&bits(m, n), 2, n))
            .max()
            .unwrap();
        best.push(format!("n={n}: {m} < {}", csg_bound(n).unwrap()));
    }
    Ok(Verdict {
        pass: false,
        detail: format!(
            "{relation}; no 8-variable game reaches 47: composing needs the relation to respect earliness across \
             the split, and that search is refuted exhaustively; exhaustive maxima {}",
            best.join(", ")
        ),
        documented: true,
    })
}

fn cross_implementation() -> Step {
    for mask in 0..256u64 {
        let f = ColoredFunction::new(2, 3, 2, bits(mask, 3)).unwrap();
        check(
            state_complexity(&f) == mn_class_count(&f, Membership::Plain).unwrap(),
            format!("mask {mask:#x}"),
        )?;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    for k in 0..1000 {
        let t: Vec<u32> = (0..32).map(|_| rng.gen_range(0..2)).collect();
        let f = ColoredFunction::new(2, 5, 2, t.clone()).unwrap();
        let sc = state_complexity(&f);
        check(
            sc == mn_class_count(&f, Membership::Plain).unwrap(),
            format!("sample {k}"),
        )?;
        check(
            sc == residual_oracle(&t, 2, 5),
            format!("sample {k} vs slicing oracle"),
        )?;
    }
    Ok(pass("residual count = pairwise class count on all 256 n=3 languages and 1000 seeded n=5 languages"))
}

type Criterion = (&'static str, fn() -> Step);

fn main() -> ExitCode {
    let criteria: [Criterion; 11] = [
        ("exhaustive n=3 and the 60 maximal sets", exhaustive_three),
        ("maximal-language count vs brute force", counting_vs_brute),
        ("onto counts and o_i", o_machinery),
        ("general-bound witnesses", witness_attainment),
        ("bound tables", bound_tables),
        ("monotone tightness", monotone_tightness),
        ("lattice counts", lattice_counts),
        ("named embeddings", embeddings),
        ("monotone witnesses n<=10", monotone_witnesses),
        ("complete simple game chain", csg_chain),
        ("residuals vs pairwise oracle", cross_implementation),
    ];
    let mut ok = true;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let verdict = run();
        let secs = start.elapsed().as_secs_f64();
        match verdict {
            Ok(v) => {
                let tag = if v.pass { "PASS" } else { "FAIL" };
                println!("{tag} {:>2} {name} ({secs:.1}s): {}", k + 1, v.detail);
                ok &= v.pass || v.documented;
            }
            Err(why) => {
                println!("FAIL {:>2} {name} ({secs:.1}s): {why}", k + 1);
                ok = false;
            }
        }
    }
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
