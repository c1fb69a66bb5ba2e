//! Acceptance criteria 1–10. Prints one PASS/FAIL line per criterion and
//! exits nonzero if any fails.

use std::collections::BTreeMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use rand::rngs::StdRng;
use rand::seq::index::sample;
use rand::SeedableRng;

use wordmap_core::chars::{
    check_table, gowers_np_check, gowers_threshold, min_nontrivial_degree, power_word_counts_brute,
};
use wordmap_core::store::{from_bytes, load_bundle, save_bundle, to_bytes};
use wordmap_core::witness::{
    central_two_squares_witness, main2_certificate, main3_certificate, main4_certificate,
    sl2_certificate, squares_check, Evidence, ExponentParams, Main4Variant, UnipotentSearch,
    Variant, WitnessCase, CLASS_CAP,
};
use wordmap_core::words::{parse_word, width, word_image, Width, DEFAULT_EVAL_CAP};
use wordmap_core::{EnumLimits, GroupData, ImageStrategy, Matrix, Word};

const SUITE: [&str; 8] =
    ["SL(2,5)", "SL(2,7)", "SL(2,9)", "SL(2,11)", "SL(2,13)", "SL(3,4)", "SU(3,3)", "Sp(4,3)"];

struct Groups(BTreeMap<String, GroupData>);

impl Groups {
    fn get(&mut self, spec: &str) -> &GroupData {
        self.0.entry(spec.to_string()).or_insert_with(|| {
            GroupData::build(&spec.parse().unwrap(), EnumLimits::default()).unwrap()
        })
    }
}

type Check = fn(&mut Groups) -> Result<String, String>;

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn two_squares(groups: &mut Groups) -> Result<String, String> {
    for spec in SUITE {
        let r = squares_check(groups.get(spec), CLASS_CAP).map_err(err)?;
        ensure(r.all_products, format!("{spec}: some class fails the criterion"))?;
    }
    Ok(format!("{} groups, every class a product of two squares", SUITE.len()))
}

fn criterion_identity(groups: &mut Groups) -> Result<String, String> {
    let mut classes = 0;
    for spec in SUITE {
        // squares_check enforces |G|·Σ = count for every class and errors otherwise
        let r = squares_check(groups.get(spec), CLASS_CAP).map_err(err)?;
        classes += r.classes.len();
    }
    for spec in ["SL(2,5)", "SL(2,7)"] {
        let data = groups.get(spec);
        let r = squares_check(data, CLASS_CAP).map_err(err)?;
        let brute = power_word_counts_brute(&data.group, 2);
        for c in &r.classes {
            ensure(
                brute[data.classes.reps[c.class]] as u128 == c.count,
                format!("{spec}: class {} brute count differs", c.class),
            )?;
        }
    }
    Ok(format!("{classes} classes, exact equality; brute force agrees on SL(2,5), SL(2,7)"))
}

fn sl2_counterexamples(groups: &mut Groups) -> Result<String, String> {
    // (17² − 1)_2 = 32 forces a = 4 at q = 17
    for (q, a) in [(5u64, 2u32), (11, 2), (13, 2), (7, 3), (17, 4)] {
        let data = groups.get(&format!("SL(2,{q})"));
        let cert = sl2_certificate(data, EnumLimits::default()).map_err(err)?;
        let Evidence::MissedElement { sl2: Some(facts), .. } = &cert.evidence else {
            return Err(format!("q={q}: missing facts"));
        };
        ensure(cert.verified && facts.a == a, format!("q={q}: a = {}", facts.a))?;
        ensure(facts.max_two_power_order < 1 << (a + 1), format!("q={q}: order 2^(a+1) present"))?;
        ensure(facts.stable == facts.nontrivial_powers, format!("q={q}: stability"))?;
        ensure(cert.word == format!("x^{0} y^{0}", 1u64 << a), format!("q={q}: word {}", cert.word))?;
    }
    // at q = 17 the exponent 8 is too small: −I = x⁸ for x of order 16
    let data = groups.get("SL(2,17)");
    let minus_one = data.class_of_matrix(&Matrix::scalar(2, 16)).unwrap();
    let w: Word = "x^8 y^8".parse().unwrap();
    let image = word_image(&data.group, &data.classes, Some(data.structure_constants()), &w, ImageStrategy::Auto, DEFAULT_EVAL_CAP)
        .map_err(err)?;
    ensure(image.contains(minus_one), "q=17: −I missed by x⁸y⁸")?;
    Ok("q = 5, 11, 13 (a = 2), q = 7 (a = 3), q = 17 (a = 4): −I missed, three facts hold; −I ∈ x⁸y⁸(SL(2,17))".into())
}

fn desk_instances(groups: &mut Groups) -> Result<String, String> {
    let limits = EnumLimits::default();
    let mut words = Vec::new();
    let sl34 = groups.get("SL(3,4)");
    let p = ExponentParams { n: 3, q: 4, eps: 1, p: 3, variant: Variant::III };
    words.push(main2_certificate(sl34, &p, limits).map_err(err)?);
    words.push(main3_certificate(sl34, 3, 4, 1, 3, limits).map_err(err)?);
    let sl25 = groups.get("SL(2,5)");
    let p = ExponentParams { n: 2, q: 5, eps: 1, p: 2, variant: Variant::I };
    words.push(main2_certificate(sl25, &p, limits).map_err(err)?);
    let sp25 = groups.get("Sp(2,5)");
    words.push(main4_certificate(sp25, Main4Variant::II, 1, 5, 1, limits).map_err(err)?);
    let gl25 = groups.get("GL(2,5)");
    let p = ExponentParams { n: 2, q: 5, eps: 1, p: 2, variant: Variant::II };
    let gl = main2_certificate(gl25, &p, limits).map_err(err)?;
    let Evidence::MissedElement { element, .. } = &gl.evidence else {
        return Err("GL(2,5): wrong evidence".into());
    };
    ensure(*element == Matrix::scalar(2, 4), "GL(2,5): missed element is not −I")?;
    words.push(gl);
    let expected = ["x^3 y^3", "x^9 y^9", "x^8 y^8", "x^8 y^8", "x^8 y^8"];
    for (cert, want) in words.iter().zip(expected) {
        ensure(cert.verified && cert.word == want, format!("{}: {} unverified", cert.group, cert.word))?;
    }
    Ok("x³y³, x⁹y⁹ on SL(3,4); x⁸y⁸ on SL(2,5), Sp(2,5); −I ∉ x⁸y⁸(GL(2,5))".into())
}

fn witnesses(_: &mut Groups) -> Result<String, String> {
    let start = Instant::now();
    for (n, q, case) in [
        (2, 9, WitnessCase::Diagonal),
        (2, 7, WitnessCase::NormOneTorus),
        (4, 5, WitnessCase::SingerTorus),
    ] {
        let w = central_two_squares_witness(n, q, 1).map_err(err)?;
        ensure(w.case == case && w.verify().map_err(err)?, format!("SL({n},{q}) witness"))?;
    }
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(1), format!("took {elapsed:?}"))?;
    Ok(format!("SL(2,9), SL(2,7), SL(4,5) in {elapsed:?}"))
}

fn character_tables(groups: &mut Groups) -> Result<String, String> {
    for spec in ["SL(2,5)", "SL(2,7)", "Sp(4,3)"] {
        let data = groups.get(spec);
        let table = data.character_table(CLASS_CAP).map_err(err)?;
        let report = check_table(table, &data.classes).map_err(err)?;
        ensure(report.ok(data.order()), format!("{spec}: {report:?}"))?;
    }
    Ok("orthogonality, Σχ(1)² = |G|, χ(1) | |G| and Σν₂χ(1) = #{g : g² = 1}".into())
}

fn widths(groups: &mut Groups) -> Result<String, String> {
    let data = groups.get("SL(2,5)");
    let (g, cd, sc) = (&data.group, &data.classes, Some(data.structure_constants()));
    let image = |w: &str, s| word_image(g, cd, sc, &w.parse::<Word>().unwrap(), s, DEFAULT_EVAL_CAP);
    let sq = image("x^2", ImageStrategy::Auto).map_err(err)?;
    let w2 = width(g, cd, sc, &sq, 8).map_err(err)?;
    ensure(w2 == Width::Exact(2), format!("width(x²) = {w2:?}"))?;
    let x4 = image("x^4", ImageStrategy::Auto).map_err(err)?;
    let w4 = width(g, cd, sc, &x4, 8).map_err(err)?;
    ensure(!matches!(w4, Width::Exact(m) if m < 3), format!("width(x⁴) = {w4:?}"))?;
    let brute = image("[x,y]", ImageStrategy::Brute).map_err(err)?;
    let reduced = image("[x,y]", ImageStrategy::ClassReduced).map_err(err)?;
    ensure(brute == reduced, "commutator images differ")?;
    let wb = width(g, cd, sc, &brute, 8).map_err(err)?;
    let wr = width(g, cd, sc, &reduced, 8).map_err(err)?;
    ensure(wb == wr, "commutator widths differ")?;
    Ok(format!("x²: {w2:?}, x⁴: {w4:?}, [x,y]: {wb:?} under both strategies"))
}

fn gowers(groups: &mut Groups) -> Result<String, String> {
    let data = groups.get("SL(2,7)");
    let table = data.character_table(CLASS_CAP).map_err(err)?;
    let order = data.group.order();
    let size = gowers_threshold(order as u64, min_nontrivial_degree(table)) as usize + 1;
    for seed in 0..200u64 {
        let mut rng = StdRng::seed_from_u64(seed);
        let ys: [Vec<usize>; 3] = std::array::from_fn(|_| sample(&mut rng, order, size).into_vec());
        let report = gowers_np_check(&data.group, table, [&ys[0], &ys[1], &ys[2]]).map_err(err)?;
        ensure(report.product_is_group == Some(true), format!("seed {seed}: {report:?}"))?;
    }
    Ok(format!("200 seeds, |Y_i| = {size}, every product is G"))
}

fn unipotent(groups: &mut Groups) -> Result<String, String> {
    let mut counts = Vec::new();
    for (spec, p) in [("SL(2,5)", 5u64), ("SL(3,4)", 2)] {
        let data = groups.get(spec);
        let g = &data.group;
        let center = g.center();
        let search = UnipotentSearch::new(g, &data.classes, p);
        let mut n = 0;
        for x in (0..g.order()).filter(|x| !center.contains(x)) {
            let (u, v) = search.factor(x).ok_or_else(|| format!("{spec}: element {x} not factored"))?;
            ensure(g.mul(u, v) == x, format!("{spec}: bad factorization"))?;
            n += 1;
        }
        counts.push(n);
    }
    let data = groups.get("SL(2,5)");
    let minus_i = data.group.index_of(&Matrix::scalar(2, 4)).unwrap();
    let search = UnipotentSearch::new(&data.group, &data.classes, 5);
    ensure(search.factor(minus_i).is_none(), "−I factored in SL(2,5)")?;
    Ok(format!("{} + {} non-central elements factored; −I NotFound", counts[0], counts[1]))
}

const CORPUS: [&str; 50] = [
    "1", "x", "y", "z", "x^2", "x^-1", "x^0", "x y", "x^2 y^2", "x^4 y^4",
    "x^8 y^8", "x^3 y^3", "x^9 y^9", "x^2 y^-3", "y x", "x x", "x x^-1", "x y x^-1 y^-1", "[x,y]", "[y,x]",
    "[x,y]^2", "[x^2,y^3]", "[[x,y],z]", "[x,[y,z]]", "[x,y] [y,z]", "(x y)^2", "(x y)^-1", "((x y)^2 z)^3", "((x^2)^3)^-1", "(x^2 y)^3 x^-1",
    "x1", "x2^5", "x1 x2 x3", "x4 x5^-2", "x9^3 x1", "[x1,x2]^3", "(x1 x2^-1)^4 x3", "x^+2 y", "x ^ 2 y ^ -1", "  x  y  ",
    "(1)", "1^5", "x 1 y", "[x,x]", "(x y x^-1)^-1", "[x y, y x]", "[x^-1,y^-1]^-1", "((x))", "x^2 y^2 z^2", "(x^3 [y,z])^2",
];

fn infrastructure(groups: &mut Groups) -> Result<String, String> {
    let dir = tempfile::tempdir().map_err(err)?;
    for spec in SUITE {
        let data = groups.get(spec);
        data.character_table(CLASS_CAP).map_err(err)?;
        let bundle = data.bundle(true).map_err(err)?;
        let (bytes, hash) = to_bytes(&bundle).map_err(err)?;
        let back = from_bytes(&bytes).map_err(err)?;
        ensure(back == bundle, format!("{spec}: decoded bundle differs"))?;
        ensure(to_bytes(&back).map_err(err)?.0 == bytes, format!("{spec}: bytes differ"))?;
        let path = dir.path().join(spec.replace(['(', ')', ','], "_"));
        ensure(save_bundle(&bundle, &path).map_err(err)? == hash, format!("{spec}: hash differs"))?;
        let loaded = load_bundle(&path).map_err(err)?;
        ensure(to_bytes(&loaded).map_err(err)?.0 == bytes, format!("{spec}: file round trip differs"))?;
    }
    for text in CORPUS {
        let w = parse_word(text).map_err(|e| format!("{text:?}: {e}"))?.word;
        let printed = w.to_string();
        let again = parse_word(&printed).map_err(|e| format!("{printed:?}: {e}"))?.word;
        ensure(again == w && again.to_string() == printed, format!("{text:?} does not round-trip"))?;
    }
    Ok(format!("{} bundles byte-identical, {} words round-trip", SUITE.len(), CORPUS.len()))
}

fn main() {
    let criteria: [(&str, Check, Option<u64>); 10] = [
        ("two-squares surjectivity", two_squares, Some(300)),
        ("criterion equals solution count", criterion_identity, None),
        ("SL(2,q) counterexamples", sl2_counterexamples, Some(120)),
        ("exponent desk instances", desk_instances, Some(180)),
        ("central witnesses", witnesses, Some(1)),
        ("character-table integrity", character_tables, Some(120)),
        ("width reporting", widths, None),
        ("size-criterion products", gowers, None),
        ("unipotent factorization", unipotent, None),
        ("store and grammar round trips", infrastructure, None),
    ];
    let mut groups = Groups(BTreeMap::new());
    let mut failed = 0;
    for (i, (name, check, budget)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(|| check(&mut groups)))
            .unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        let outcome = match (outcome, budget) {
            (Ok(_), Some(b)) if secs >= b as f64 => Err(format!("runtime {secs:.1}s over {b}s")),
            (o, _) => o,
        };
        match outcome {
            Ok(detail) => println!("PASS criterion {:>2} {name}: {detail} ({secs:.2}s)", i + 1),
            Err(e) => {
                failed += 1;
                println!("FAIL criterion {:>2} {name}: {e} ({secs:.2}s)", i + 1);
            }
        }
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
