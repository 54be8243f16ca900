use std::fs;
use std::io::Write;
use std::path::Path;

use anyhow::{bail, Context, Result};
use maxcomplex_core::bounds::{complete_dfa_bound, csg_bound, general_bound, monotone_bound};
use maxcomplex_core::certificate::Status;
use maxcomplex_core::counting::count_max;
use maxcomplex_core::csg::{
    build_csg_witness, enumerate_csg_masks, enumerate_early_masks, search_csg_relation,
    search_early_relation,
};
use maxcomplex_core::lattice::{
    build_witness_with, check_relation, enumerate_monotone_masks, lemma_les_check, named_embedding,
    relation_shape, search_relation,
};
use maxcomplex_core::minauto::{export_dot, mn_class_count, states_by_depth, Membership};
use maxcomplex_core::witness::construct_maximal;
use maxcomplex_core::{
    is_early, minimal_pdfa, state_complexity, BigCount, Certificate, ColoredFunction, Embedding,
    Error, Order, SearchConfig, SearchOutcome,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::args::*;
use crate::cache::{sha256_hex, Cache};
use crate::exit::Failure;
use crate::langfile::LanguageFile;

/// Largest `c^(b^n)` accepted by `count-max --verify-brute`.
pub const BRUTE_LIMIT: u64 = 1 << 20;

pub struct Session<'a> {
    pub out: &'a mut dyn Write,
    pub cache: Cache,
    pub seed: u64,
    pub threads: usize,
}

pub fn run(cli: Cli, out: &mut dyn Write, cache: Cache) -> Result<()> {
    let mut ctx = Session {
        out,
        cache,
        seed: cli.seed,
        threads: cli.threads.max(1),
    };
    match cli.command {
        Command::Complexity(a) => complexity(&mut ctx, a),
        Command::Bound(a) => bound(&mut ctx, a),
        Command::Construct(a) => construct(&mut ctx, a),
        Command::CountMax(a) => count_max_cmd(&mut ctx, a),
        Command::Lattice(l) => lattice(&mut ctx, l),
        Command::Crosscheck(a) => crosscheck(&mut ctx, a),
    }
}

fn emit_json(out: &mut dyn Write, v: &Value) -> Result<()> {
    writeln!(out, "{}", serde_json::to_string_pretty(v)?)?;
    Ok(())
}

pub fn read_language(path: &Path) -> Result<LanguageFile> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    text.parse::<LanguageFile>()
        .with_context(|| format!("parsing {}", path.display()))
}

fn write_language(path: &Path, f: &ColoredFunction) -> Result<()> {
    fs::write(path, LanguageFile::from_function(f).to_string())
        .with_context(|| format!("writing {}", path.display()))
}

fn complexity(ctx: &mut Session, a: ComplexityArgs) -> Result<()> {
    let lf = read_language(&a.input)?;
    if lf.is_empty() {
        eprintln!("warning: {} lists no accepted words", a.input.display());
    }
    let f = lf.to_function()?;
    let sc = state_complexity(&f);
    let depths = states_by_depth(&f);
    let bound = general_bound(lf.b, lf.c, lf.n);
    if let Some(path) = &a.dot {
        let dot = export_dot(&minimal_pdfa(&f)?);
        fs::write(path, dot).with_context(|| format!("writing {}", path.display()))?;
    }
    let oracle = if a.mn_crosscheck {
        Some(mn_class_count(&f, Membership::Plain)?)
    } else {
        None
    };
    if a.json {
        let mut v = json!({
            "b": lf.b,
            "c": lf.c,
            "n": lf.n,
            "complexity": sc,
            "bound": bound.to_string(),
            "attained": BigCount::from(sc) == bound,
            "states_by_depth": depths,
        });
        if let Some(o) = oracle {
            v["mn_classes"] = json!(o);
        }
        emit_json(ctx.out, &v)?;
    } else {
        writeln!(ctx.out, "complexity {sc}")?;
        writeln!(ctx.out, "bound {bound}")?;
        let depths: Vec<String> = depths.iter().map(|d| d.to_string()).collect();
        writeln!(ctx.out, "states_by_depth {}", depths.join(" "))?;
        if let Some(o) = oracle {
            writeln!(ctx.out, "mn_classes {o}")?;
        }
    }
    match oracle {
        Some(o) if o != sc => {
            Err(Failure::Mismatch(format!("residual count {sc} but pairwise oracle {o}")).into())
        }
        _ => Ok(()),
    }
}

fn bound(ctx: &mut Session, a: BoundArgs) -> Result<()> {
    let (name, value, split) = match a.kind {
        Kind::General => ("general", general_bound(a.b, a.c, a.n), None),
        Kind::Complete => {
            let (r, v) = complete_dfa_bound(a.b, a.n)?;
            ("complete", v, Some(r))
        }
        Kind::Monotone => ("monotone", monotone_bound(a.n)?, None),
        Kind::Csg => ("csg", csg_bound(a.n)?, None),
    };
    if a.json {
        let mut v = json!({ "kind": name, "n": a.n, "bound": value.to_string() });
        if matches!(a.kind, Kind::General | Kind::Complete) {
            v["b"] = json!(a.b);
        }
        if a.kind == Kind::General {
            v["c"] = json!(a.c);
        }
        if let Some(r) = split {
            v["split"] = json!(r);
        }
        emit_json(ctx.out, &v)
    } else {
        writeln!(ctx.out, "{value}")?;
        Ok(())
    }
}

fn construct(ctx: &mut Session, a: ConstructArgs) -> Result<()> {
    let f = construct_maximal(a.b, a.c, a.n)?;
    write_language(&a.out, &f)?;
    // verify what was written, not what was built
    let back = read_language(&a.out)?.to_function()?;
    let sc = state_complexity(&back);
    let bound = general_bound(a.b, a.c, a.n);
    let attained = BigCount::from(sc) == bound;
    if a.json {
        emit_json(
            ctx.out,
            &json!({
                "b": a.b, "c": a.c, "n": a.n,
                "complexity": sc,
                "bound": bound.to_string(),
                "attained": attained,
                "out": a.out.display().to_string(),
            }),
        )?;
    } else {
        writeln!(ctx.out, "complexity {sc}")?;
        writeln!(ctx.out, "bound {bound}")?;
        writeln!(ctx.out, "wrote {}", a.out.display())?;
    }
    if !attained {
        return Err(Failure::Mismatch(format!("witness has {sc} states, bound is {bound}")).into());
    }
    Ok(())
}

/// Maximum complexity over all functions `[b]^n -> [c]` and the functions attaining it.
pub fn brute_maximal(b: u32, c: u32, n: u32) -> Result<(usize, Vec<ColoredFunction>)> {
    let total = (c as u64)
        .checked_pow(
            (b as u64)
                .checked_pow(n)
                .and_then(|l| u32::try_from(l).ok())
                .unwrap_or(u32::MAX),
        )
        .filter(|&t| t <= BRUTE_LIMIT)
        .ok_or_else(|| {
            Error::Capacity(format!(
                "{c}^({b}^{n}) languages exceed the brute-force limit of 2^20"
            ))
        })?;
    let len = (b as usize).pow(n);
    let mut table = vec![0u32; len];
    let mut best = 0;
    let mut winners = Vec::new();
    for _ in 0..total {
        let f = ColoredFunction::new(b, n, c, table.clone())?;
        let sc = state_complexity(&f);
        if sc > best {
            best = sc;
            winners.clear();
        }
        if sc == best {
            winners.push(f);
        }
        // next table in base c, last rank fastest
        for slot in table.iter_mut().rev() {
            *slot += 1;
            if *slot < c {
                break;
            }
            *slot = 0;
        }
    }
    Ok((best, winners))
}

fn show_set(f: &ColoredFunction) -> String {
    let words: Vec<String> = f
        .support()
        .into_iter()
        .map(|(w, color)| {
            if f.colors() > 2 {
                format!("{w}:{color}")
            } else {
                w.to_string()
            }
        })
        .collect();
    format!("{{{}}}", words.join(","))
}

fn count_max_cmd(ctx: &mut Session, a: CountMaxArgs) -> Result<()> {
    let (i, count) = count_max(a.b, a.c, a.n)?;
    let brute = if a.verify_brute {
        Some(brute_maximal(a.b, a.c, a.n)?)
    } else {
        None
    };
    let bound = general_bound(a.b, a.c, a.n);
    if a.json {
        let mut v =
            json!({ "b": a.b, "c": a.c, "n": a.n, "crossover": i, "count": count.to_string() });
        if let Some((best, winners)) = &brute {
            v["brute_max"] = json!(best);
            v["brute_count"] = json!(winners.len());
            if a.emit {
                v["languages"] = json!(winners.iter().map(show_set).collect::<Vec<_>>());
            }
        }
        emit_json(ctx.out, &v)?;
    } else {
        writeln!(ctx.out, "crossover {i}")?;
        writeln!(ctx.out, "count {count}")?;
        if let Some((best, winners)) = &brute {
            writeln!(ctx.out, "brute_max {best}")?;
            writeln!(ctx.out, "brute_count {}", winners.len())?;
            if a.emit {
                for f in winners {
                    writeln!(ctx.out, "{}", show_set(f))?;
                }
            }
        }
    }
    if let Some((best, winners)) = brute {
        if BigCount::from(best) != bound || BigCount::from(winners.len()) != count {
            return Err(Failure::Mismatch(format!(
                "brute force found {} languages of complexity {best}; formula says {count} at bound {bound}",
                winners.len()
            ))
            .into());
        }
    }
    Ok(())
}

fn lattice(ctx: &mut Session, cmd: LatticeCommand) -> Result<()> {
    match cmd {
        LatticeCommand::Enumerate {
            n,
            family,
            list,
            json,
        } => enumerate(ctx, n, family, list, json),
        LatticeCommand::VerifyEmbedding { name, json } => {
            verify_embedding(ctx, name.as_deref(), json)
        }
        LatticeCommand::Search(a) => search(ctx, a),
        LatticeCommand::Witness {
            n,
            csg,
            out,
            budget,
            json,
        } => witness(ctx, n, csg, &out, budget, json),
        LatticeCommand::LemmaLes => {
            if lemma_les_check() {
                writeln!(ctx.out, "lemma holds")?;
                Ok(())
            } else {
                Err(Failure::Mismatch("lemma fails".into()).into())
            }
        }
    }
}

fn family_masks(n: u32, family: Family) -> Result<Vec<u64>> {
    Ok(match family {
        Family::Monotone => enumerate_monotone_masks(n)?,
        Family::Early => enumerate_early_masks(n)?,
        Family::Csg => enumerate_csg_masks(n)?,
    })
}

fn family_name(family: Family) -> &'static str {
    match family {
        Family::Monotone => "monotone",
        Family::Early => "early",
        Family::Csg => "csg",
    }
}

fn mask_lines(masks: &[u64]) -> String {
    masks.iter().map(|m| format!("{m:x}\n")).collect()
}

fn enumerate(ctx: &mut Session, n: u32, family: Family, list: bool, as_json: bool) -> Result<()> {
    let name = family_name(family);
    let params = format!("family={name} n={n}");
    let (body, hit) = ctx.cache.get_or_insert("enumerate", &params, || {
        let masks = family_masks(n, family)?;
        Ok(format!(
            "count={}\ndigest={}\n",
            masks.len(),
            sha256_hex(mask_lines(&masks).as_bytes())
        ))
    })?;
    if hit {
        eprintln!("cached: {}", ctx.cache.path("enumerate", &params).display());
    }
    let field = |key: &str| -> Result<String> {
        body.lines()
            .find_map(|l| l.strip_prefix(key))
            .map(str::to_string)
            .with_context(|| format!("cache entry lacks {key}"))
    };
    let (count, digest) = (field("count=")?, field("digest=")?);
    if as_json {
        let count: u64 = count.parse()?;
        emit_json(
            ctx.out,
            &json!({ "family": name, "n": n, "count": count, "digest": digest }),
        )?;
    } else {
        writeln!(ctx.out, "{name} n={n} count={count} digest={digest}")?;
    }
    if list {
        write!(ctx.out, "{}", mask_lines(&family_masks(n, family)?))?;
    }
    Ok(())
}

fn embedding_report(e: Embedding) -> Result<(Value, Option<String>)> {
    let (i, j) = e.shape();
    let order = Order::Product;
    let arrow = format!(
        "2^{i} -> {} => {}",
        order.nonzero_count(j).unwrap_or(0),
        order.nonzero_count(j - 1).unwrap_or(0)
    );
    let map = named_embedding(e)?;
    Ok(match check_relation(i, j, &map)? {
        Ok(cert) => (
            json!({
                "name": e.name(), "i": i, "j": j, "relation": arrow, "ok": true,
                "strong": cert.strong.is_some(), "uses_zero": cert.uses_zero,
            }),
            None,
        ),
        Err(failure) => (
            json!({ "name": e.name(), "i": i, "j": j, "relation": arrow, "ok": false, "failure": failure.to_string() }),
            Some(failure.to_string()),
        ),
    })
}

fn verify_embedding(ctx: &mut Session, name: Option<&str>, as_json: bool) -> Result<()> {
    let list: Vec<Embedding> = match name {
        Some(n) => vec![n.parse()?],
        None => Embedding::ALL.to_vec(),
    };
    let mut reports = Vec::new();
    let mut failed = Vec::new();
    for e in list {
        let (v, failure) = embedding_report(e)?;
        if !as_json {
            match &failure {
                None => writeln!(
                    ctx.out,
                    "{}: {} OK",
                    e.name(),
                    v["relation"].as_str().unwrap_or("")
                )?,
                Some(f) => writeln!(
                    ctx.out,
                    "{}: {} FAILED: {f}",
                    e.name(),
                    v["relation"].as_str().unwrap_or("")
                )?,
            }
        }
        if failure.is_some() {
            failed.push(e.name());
        }
        reports.push(v);
    }
    if as_json {
        let v = if reports.len() == 1 {
            reports.remove(0)
        } else {
            Value::Array(reports)
        };
        emit_json(ctx.out, &v)?;
    }
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::Mismatch(format!("embedding check failed: {}", failed.join(", "))).into())
    }
}

fn search_params(order: Order, i: u32, j: u32, early: bool) -> String {
    format!("order={} i={i} j={j} early={early}", order.name())
}

fn write_certificate(
    ctx: &Session,
    cert: &Certificate,
    out: Option<&Path>,
    params: &str,
) -> Result<String> {
    let text = cert.to_string();
    let path = match out {
        Some(p) => {
            fs::write(p, &text).with_context(|| format!("writing {}", p.display()))?;
            p.to_path_buf()
        }
        None if cert.is_complete() => ctx.cache.store("certificate", params, &text)?,
        // checkpoints are handed back through --resume, so they stay plain
        None => {
            let p = ctx.cache.path("checkpoint", params);
            fs::create_dir_all(ctx.cache.dir())?;
            fs::write(&p, &text).with_context(|| format!("writing {}", p.display()))?;
            p
        }
    };
    Ok(path.display().to_string())
}

fn search(ctx: &mut Session, a: SearchArgs) -> Result<()> {
    let order = if a.csg {
        Order::Majorization
    } else {
        Order::Product
    };
    let params = search_params(order, a.i, a.j, a.early);
    let mut resume = Vec::new();
    if let Some(path) = &a.resume {
        let text =
            fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let cert: Certificate = text
            .parse()
            .with_context(|| format!("parsing {}", path.display()))?;
        if (cert.order, cert.i, cert.j) != (order, a.i, a.j) {
            bail!(
                "{} is for {} ({}, {}), not {} ({}, {})",
                path.display(),
                cert.order.name(),
                cert.i,
                cert.j,
                order.name(),
                a.i,
                a.j
            );
        }
        match cert.status {
            Status::Partial { path } => resume = path,
            Status::Complete => bail!("{} is already a complete certificate", path.display()),
        }
    } else if let Some(cached) = ctx.cache.load("certificate", &params) {
        if let Ok(cert) = cached.parse::<Certificate>() {
            if matches!(cert.verify(), Ok(Ok(ref c)) if !a.early || c.composable) {
                eprintln!(
                    "cached: {}",
                    ctx.cache.path("certificate", &params).display()
                );
                if let Some(p) = &a.out {
                    fs::write(p, &cached).with_context(|| format!("writing {}", p.display()))?;
                }
                return report_found(ctx, &cert, cert.nodes.unwrap_or(0), true, a.json);
            }
        }
    }
    let config = SearchConfig {
        budget: a.budget,
        resume,
        threads: ctx.threads,
    };
    let outcome = match (order, a.early) {
        (Order::Product, _) => search_relation(a.i, a.j, &config)?,
        (Order::Majorization, false) => search_csg_relation(a.i, a.j, &config)?,
        (Order::Majorization, true) => search_early_relation(a.i, a.j, &config)?,
    };
    match outcome {
        SearchOutcome::Found { certificate, nodes } => {
            let cert = Certificate::from_adequacy(&certificate, Some(nodes));
            ctx.cache.store("certificate", &params, &cert.to_string())?;
            let stale = ctx.cache.path("checkpoint", &params);
            if stale.exists() {
                fs::remove_file(&stale).with_context(|| format!("removing {}", stale.display()))?;
            }
            if let Some(p) = &a.out {
                write_certificate(ctx, &cert, Some(p), &params)?;
            }
            report_found(ctx, &cert, nodes, false, a.json)
        }
        SearchOutcome::Exhausted { checkpoint, nodes } => {
            let cert = Certificate::checkpoint(order, a.i, a.j, checkpoint, nodes);
            let path = write_certificate(ctx, &cert, a.out.as_deref(), &params)?;
            if a.json {
                emit_json(
                    ctx.out,
                    &json!({ "status": "exhausted", "nodes": nodes, "checkpoint": path }),
                )?;
            } else {
                writeln!(ctx.out, "exhausted after {nodes} nodes")?;
                writeln!(ctx.out, "checkpoint {path}")?;
            }
            Err(Failure::Exhausted(format!(
                "budget of {} nodes spent; resume with --resume {path}",
                a.budget
            ))
            .into())
        }
        SearchOutcome::Refuted { nodes } => {
            if a.json {
                emit_json(ctx.out, &json!({ "status": "refuted", "nodes": nodes }))?;
            } else {
                writeln!(ctx.out, "refuted after {nodes} nodes")?;
            }
            Err(Failure::Mismatch(format!("no relation exists for ({}, {})", a.i, a.j)).into())
        }
    }
}

fn report_found(
    ctx: &mut Session,
    cert: &Certificate,
    nodes: u64,
    cached: bool,
    as_json: bool,
) -> Result<()> {
    let checked = cert
        .verify()?
        .map_err(|f| anyhow::anyhow!("certificate does not verify: {f}"))?;
    let target = checked.map.target.len();
    if as_json {
        emit_json(
            ctx.out,
            &json!({
                "status": "found",
                "order": cert.order.name(),
                "i": cert.i,
                "j": cert.j,
                "nodes": nodes,
                "cached": cached,
                "target_size": target,
                "covered": checked.covered.len(),
                "composable": checked.composable,
            }),
        )
    } else {
        writeln!(
            ctx.out,
            "found after {nodes} nodes{}",
            if cached { " (cached)" } else { "" }
        )?;
        writeln!(ctx.out, "target {target} covered {}", checked.covered.len())?;
        if cert.order == Order::Majorization {
            writeln!(ctx.out, "composable {}", checked.composable)?;
        }
        write!(ctx.out, "{cert}")?;
        Ok(())
    }
}

fn witness(
    ctx: &mut Session,
    n: u32,
    csg: bool,
    out: &Path,
    budget: u64,
    as_json: bool,
) -> Result<()> {
    let config = SearchConfig {
        budget,
        resume: Vec::new(),
        threads: ctx.threads,
    };
    let (bound, built) = if csg {
        (csg_bound(n)?, build_csg_witness(n, &config))
    } else {
        (monotone_bound(n)?, build_witness_with(n, &config))
    };
    let f = match built {
        Ok(m) => m.to_function(),
        Err(Error::NoWitness) => {
            let order = if csg {
                Order::Majorization
            } else {
                Order::Product
            };
            let (i, j) = relation_shape(order, n)?;
            return Err(Failure::Mismatch(format!(
                "no language of {n} variables reaches {bound} states: the relation at shape ({i}, {j}) is refuted"
            ))
            .into());
        }
        Err(e) => return Err(e.into()),
    };
    write_language(out, &f)?;
    let back = read_language(out)?.to_function()?;
    let sc = state_complexity(&back);
    let attained = BigCount::from(sc) == bound;
    let early = csg && is_early(&back)?;
    if as_json {
        let mut v = json!({
            "n": n,
            "family": if csg { "csg" } else { "monotone" },
            "complexity": sc,
            "bound": bound.to_string(),
            "attained": attained,
            "out": out.display().to_string(),
        });
        if csg {
            v["early"] = json!(early);
        }
        emit_json(ctx.out, &v)?;
    } else {
        writeln!(ctx.out, "complexity {sc}")?;
        writeln!(ctx.out, "bound {bound}")?;
        writeln!(ctx.out, "wrote {}", out.display())?;
    }
    if !attained || (csg && !early) {
        return Err(Failure::Mismatch(format!("witness has {sc} states, bound is {bound}")).into());
    }
    Ok(())
}

fn crosscheck(ctx: &mut Session, a: CrosscheckArgs) -> Result<()> {
    let len = (a.b as u64)
        .checked_pow(a.n)
        .filter(|&l| l <= 1 << 12)
        .ok_or_else(|| {
            Error::Capacity(format!(
                "{}^{} words is too many for the pairwise oracle",
                a.b, a.n
            ))
        })?;
    let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed);
    let mut disagreements = Vec::new();
    for _ in 0..a.samples {
        let table: Vec<u32> = (0..len).map(|_| rng.gen_range(0..a.c)).collect();
        let f = ColoredFunction::new(a.b, a.n, a.c, table)?;
        let (sc, oracle) = (state_complexity(&f), mn_class_count(&f, Membership::Plain)?);
        if sc != oracle {
            disagreements.push(LanguageFile::from_function(&f).to_string());
        }
    }
    if a.json {
        emit_json(
            ctx.out,
            &json!({ "b": a.b, "c": a.c, "n": a.n, "seed": ctx.seed, "samples": a.samples, "disagreements": disagreements.len() }),
        )?;
    } else {
        writeln!(
            ctx.out,
            "{} of {} languages agree",
            a.samples - disagreements.len(),
            a.samples
        )?;
        for d in &disagreements {
            write!(ctx.out, "{d}")?;
        }
    }
    if disagreements.is_empty() {
        Ok(())
    } else {
        Err(Failure::Mismatch(format!("{} disagreements", disagreements.len())).into())
    }
}
