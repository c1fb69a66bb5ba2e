//! One function per subcommand; each returns the JSON result payload.

use std::path::Path;

use rand::rngs::StdRng;
use rand::seq::index::sample;
use rand::SeedableRng;
use serde_json::{json, Value};

use wordmap_core::chars::{
    check_table, fs_indicator, gowers_np_check, gowers_threshold, min_nontrivial_degree,
};
use wordmap_core::grp::is_quasisimple;
use wordmap_core::witness::{
    main2_certificate, main3_certificate, main4_certificate, sl2_certificate, squares_check,
    two_squares_certificate, witness_certificate, Main4Variant,
};
use wordmap_core::words::{parse_word, width, word_image, Width};
use wordmap_core::{Certificate, ExponentParams, Family, GroupData, GroupSpec};

use crate::{scan, CertCmd, CmdResult, Command, Ctx, Failure, GroupCmd, SquaresCmd, WitnessCmd, WordArgs, WordCmd};

pub(crate) fn dispatch(ctx: &mut Ctx, command: Command) -> CmdResult {
    match command {
        Command::Group(GroupCmd::Info { spec }) => group_info(ctx, &spec),
        Command::Word(cmd) => word(ctx, cmd),
        Command::Squares(SquaresCmd::Check { spec }) => squares(ctx, &spec),
        Command::Chartable { spec, values } => chartable(ctx, &spec, values),
        Command::Cert(cmd) => cert(ctx, cmd),
        Command::Witness(WitnessCmd::Central { n, q, eps, out }) => {
            let cert = ctx.time("construct", |_| witness_certificate(n, q, eps))?;
            ctx.report.group = Some(cert.group.clone());
            finish_cert(cert, out.as_deref())
        }
        Command::Gowers { spec, trials } => gowers(ctx, &spec, trials),
        Command::Scan(args) => scan::run(ctx, args),
    }
}

/// Class summary with a representative matrix.
pub(crate) fn class_json(data: &GroupData, c: usize) -> Value {
    json!({
        "class": c,
        "order": data.classes.rep_orders[c],
        "size": data.classes.sizes[c],
        "representative": data.group.element(data.classes.reps[c]).rows(),
    })
}

fn group_info(ctx: &mut Ctx, spec: &str) -> CmdResult {
    let data = ctx.group(spec)?;
    let qs = ctx.time("classes", |_| is_quasisimple(&data.group, &data.classes));
    Ok(json!({
        "order": data.order(),
        "predicted_order": data.spec.predicted_order().map(|o| o.to_string()),
        "degree": data.group.degree(),
        "field_size": data.field().size(),
        "center_order": qs.center_order,
        "classes": data.classes.num_classes(),
        "perfect": qs.perfect,
        "quasisimple": qs.quasisimple,
        "exponent": data.classes.exponent,
    }))
}

fn word(ctx: &mut Ctx, cmd: WordCmd) -> CmdResult {
    let (args, max) = match &cmd {
        WordCmd::Image(a) | WordCmd::Surjective(a) => (a, None),
        WordCmd::Width { args, max } => (args, Some(*max)),
    };
    let WordArgs { spec, word, strategy, eval_cap } = args;
    let parsed = parse_word(word)?;
    if parsed.collapsed {
        ctx.warn(format!("{word:?} reduces to the trivial word"));
    }
    let data = ctx.group(spec)?;
    let sc = ctx.time("structure_constants", |_| data.structure_constants());
    let image = ctx.time("image", |_| {
        word_image(&data.group, &data.classes, Some(sc), &parsed.word, (*strategy).into(), *eval_cap)
    })?;
    let missed: Vec<Value> = image.missed().into_iter().map(|c| class_json(&data, c)).collect();
    let mut out = json!({ "word": parsed.word.to_string() });
    match cmd {
        WordCmd::Image(_) => {
            out["image_size"] = json!(image.element_count());
            out["covered_classes"] = json!(image.classes().collect::<Vec<_>>());
            out["missed"] = json!(missed);
        }
        WordCmd::Surjective(_) => {
            out["surjective"] = json!(image.is_full());
            out["missed"] = json!(missed);
        }
        WordCmd::Width { .. } => {
            let max = max.expect("width has a bound");
            let w = ctx.time("width", |_| width(&data.group, &data.classes, Some(sc), &image, max))?;
            match w {
                Width::Exact(m) => out["width"] = json!(m),
                Width::ExceedsMax(m) => {
                    out["width"] = Value::Null;
                    out["exceeds_max"] = json!(m);
                }
            }
        }
    }
    Ok(out)
}

fn squares(ctx: &mut Ctx, spec: &str) -> CmdResult {
    let data = ctx.group(spec)?;
    let cap = ctx.global.class_cap;
    let report = ctx.time("criterion", |_| squares_check(&data, cap))?;
    if report.quasisimple && !report.all_products {
        return Err(Failure::Verification(format!(
            "{spec} is quasisimple but some class is not a product of two squares"
        )));
    }
    if !report.quasisimple {
        ctx.warn("group is not quasisimple; no surjectivity is predicted");
    }
    Ok(serde_json::to_value(report)?)
}

fn chartable(ctx: &mut Ctx, spec: &str, values: bool) -> CmdResult {
    let data = ctx.group(spec)?;
    let cap = ctx.global.class_cap;
    let table = ctx.time("dixon", |_| data.character_table(cap))?;
    let report = ctx.time("check", |_| check_table(table, &data.classes))?;
    let nu = fs_indicator(table, &data.classes, 2)?;
    if !report.ok(data.order()) {
        return Err(Failure::Verification(format!("character table checks fail: {report:?}")));
    }
    let mut out = json!({
        "prime": table.prime,
        "degrees": table.degrees,
        "class_sizes": table.class_sizes,
        "class_orders": data.classes.rep_orders,
        "real": table.real,
        "fs_indicators": nu.iter().map(|r| r.to_string()).collect::<Vec<_>>(),
        "report": report,
    });
    if values {
        let rows: Vec<Vec<String>> =
            table.values.iter().map(|row| row.iter().map(|v| v.to_string()).collect()).collect();
        out["conductor"] = json!(table.ring().conductor());
        out["values"] = json!(rows);
    }
    Ok(out)
}

fn write_cert(cert: &Certificate, path: &Path) -> Result<(), Failure> {
    std::fs::write(path, serde_json::to_string_pretty(cert)? + "\n")?;
    Ok(())
}

fn finish_cert(cert: Certificate, out: Option<&Path>) -> CmdResult {
    if let Some(path) = out {
        write_cert(&cert, path)?;
    }
    if !cert.verified {
        return Err(Failure::Verification(format!("{} certificate is not verified", cert.kind)));
    }
    Ok(serde_json::to_value(cert)?)
}

fn cert(ctx: &mut Ctx, cmd: CertCmd) -> CmdResult {
    let limits = ctx.limits();
    let (cert, out) = match cmd {
        CertCmd::Sl2 { q, out } => {
            let data = ctx.group_spec(&GroupSpec::new(Family::SL, 2, q)?)?;
            (ctx.time("certify", |_| sl2_certificate(&data, limits))?, out)
        }
        CertCmd::Main2 { n, q, eps, p, variant, out } => {
            let params = ExponentParams { n, q, eps, p, variant: variant.parse()? };
            wordmap_core::witness::main2_exponent(&params)?;
            let data = ctx.group_spec(&wordmap_core::witness::main2_group(&params)?)?;
            (ctx.time("certify", |_| main2_certificate(&data, &params, limits))?, out)
        }
        CertCmd::Main3 { n, q, eps, p, out } => {
            wordmap_core::witness::main3_rule(n, q, eps, p)?;
            let family = if eps > 0 { Family::SL } else { Family::SU };
            let data = ctx.group_spec(&GroupSpec::new(family, n as usize, q)?)?;
            (ctx.time("certify", |_| main3_certificate(&data, n, q, eps, p, limits))?, out)
        }
        CertCmd::Main4 { variant, n, q, eps, out } => {
            let variant: Main4Variant = variant.parse()?;
            wordmap_core::witness::main4_rule(variant, n, q, eps)?;
            let spec = match variant {
                Main4Variant::I if eps > 0 => GroupSpec::new(Family::SL, n as usize, q)?,
                Main4Variant::I => GroupSpec::new(Family::SU, n as usize, q)?,
                Main4Variant::II => GroupSpec::new(Family::Sp, 2 * n as usize, q)?,
            };
            let data = ctx.group_spec(&spec)?;
            (ctx.time("certify", |_| main4_certificate(&data, variant, n, q, eps, limits))?, out)
        }
        CertCmd::Squares { spec, out } => {
            let data = ctx.group(&spec)?;
            (ctx.time("certify", |_| two_squares_certificate(&data, limits))?, out)
        }
        CertCmd::Verify { file } => {
            let cert: Certificate = serde_json::from_slice(&std::fs::read(&file)?)?;
            ctx.report.group = Some(cert.group.clone());
            let ok = ctx.time("verify", |_| cert.verify(limits))?;
            if !ok {
                return Err(Failure::Verification(format!("{} does not verify", file.display())));
            }
            return Ok(json!({
                "kind": cert.kind.to_string(),
                "word": cert.word,
                "claim": cert.claim.to_string(),
                "verified": ok,
            }));
        }
    };
    finish_cert(cert, out.as_deref())
}

fn gowers(ctx: &mut Ctx, spec: &str, trials: u64) -> CmdResult {
    let data = ctx.group(spec)?;
    let cap = ctx.global.class_cap;
    let table = ctx.time("dixon", |_| data.character_table(cap))?;
    let order = data.group.order();
    let m = min_nontrivial_degree(table);
    let size = (gowers_threshold(order as u64, m) as usize + 1).min(order);
    let seed = ctx.global.seed;
    ctx.time("products", |_| -> Result<(), Failure> {
        for t in 0..trials {
            let mut rng = StdRng::seed_from_u64(seed.wrapping_add(t));
            let ys: [Vec<usize>; 3] = std::array::from_fn(|_| sample(&mut rng, order, size).into_vec());
            let r = gowers_np_check(&data.group, table, [&ys[0], &ys[1], &ys[2]])?;
            if r.product_is_group != Some(true) {
                return Err(Failure::Verification(format!("trial {t}: {r:?}")));
            }
        }
        Ok(())
    })?;
    Ok(json!({ "m": m, "subset_size": size, "trials": trials, "seed": seed, "all_products_full": true }))
}
