//! Acceptance criteria 1-9, one PASS/FAIL line each. Exits nonzero if
//! any criterion fails.

use std::cmp::Ordering;
use std::fs;
use std::process::Command;
use std::time::{Duration, Instant};

use exact_lp::Limits;
use num_bigint::BigInt;
use ptf_core::threshold_analysis::{
    certify_coefficient_lemma, check_sign_representation, check_sign_representation_uv, sign_degree, theorem_bound,
    verify_theorem_instance, CoefficientLemma, RepresentationProblem, Verdict, WeightMode, WeightOptions,
    WeightStatus,
};
use ptf_core::tuple_order::oracle::oracle_compare;
use ptf_core::{make_hard, to_uv, witness_gate, GroupShape, OrderContext, TupleIndex, Variant};
use ptf_harness::strip_timing;

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn e<E: std::fmt::Display>(err: E) -> String {
    err.to_string()
}

fn weak(ks: &[usize]) -> GroupShape {
    GroupShape::weak(ks).expect("valid shape")
}

fn strong(ks: &[usize]) -> GroupShape {
    GroupShape::strong(ks).expect("valid shape")
}

fn gate_shapes() -> Vec<GroupShape> {
    vec![weak(&[2, 3]), weak(&[2, 2, 3]), weak(&[4, 3]), strong(&[3, 3]), strong(&[5, 3])]
}

/// Exhaustive gate check per shape, each under `limit`.
fn gates_pass(shapes: &[GroupShape], limit: Duration) -> Outcome {
    let mut notes = Vec::new();
    for shape in shapes {
        let t = Instant::now();
        let f = make_hard(shape).map_err(e)?;
        let p = witness_gate(shape).map_err(e)?;
        let check = check_sign_representation(&p, &f).map_err(e)?;
        ensure(check.passed(), || format!("{shape}: {check:?}"))?;
        let took = t.elapsed();
        ensure(took < limit, || format!("{shape}: {took:?} over {limit:?}"))?;
        notes.push(format!("{} n={} {} inputs {:.2?}", shape.key(), f.n(), f.table_len(), took));
    }
    Ok(notes.join("; "))
}

fn criterion_1() -> Outcome {
    gates_pass(&gate_shapes()[..3], Duration::from_secs(5))
}

fn criterion_2() -> Outcome {
    gates_pass(&gate_shapes()[3..], Duration::from_secs(5))
}

fn criterion_3() -> Outcome {
    let mut notes = Vec::new();
    for shape in [weak(&[2, 3]), strong(&[3, 3])] {
        let t = Instant::now();
        let f = make_hard(&shape).map_err(e)?;
        let r = sign_degree(&f, 3, &Limits::default()).map_err(e)?;
        ensure(r.degree == Some(2), || format!("{shape}: sign degree {:?}", r.degree))?;
        let step = r.steps.iter().find(|s| s.degree == 1).ok_or("no degree-1 step")?;
        let cert = step.certificate.as_ref().ok_or("degree 1 has no refutation")?;
        ensure(!cert.rows.is_empty(), || "empty refutation".into())?;
        RepresentationProblem::xy(&f, 1).map_err(e)?.verify(cert).map_err(e)?;
        let took = t.elapsed();
        ensure(took < Duration::from_secs(60), || format!("{shape}: {took:?}"))?;
        notes.push(format!("{} degree 2, {}-row refutation {:.2?}", shape.key(), cert.rows.len(), took));
    }
    Ok(notes.join("; "))
}

fn criterion_4() -> Outcome {
    let t = Instant::now();
    let mut jobs: Vec<(CoefficientLemma, usize)> = Vec::new();
    for k in 2..=6 {
        jobs.push((CoefficientLemma::GtExp, k));
        jobs.push((CoefficientLemma::GtStep, k));
    }
    for k in [3, 5] {
        for l in [CoefficientLemma::G1Pos, CoefficientLemma::G1Mono, CoefficientLemma::G0All] {
            jobs.push((l, k));
        }
    }
    let mut count = 0;
    for (lemma, k) in jobs {
        let r = certify_coefficient_lemma(lemma, k, &Limits::default()).map_err(e)?;
        ensure(r.verdict == Verdict::Certified, || format!("{lemma} k={k}: {}", r.verdict))?;
        let sys = lemma.system(k).map_err(e)?;
        for res in &r.results {
            let cert = res.certificate.as_ref().ok_or_else(|| format!("{lemma} k={k}: no certificate"))?;
            sys.verify(cert).map_err(|err| format!("{lemma} k={k} {}: {err}", res.inequality.label))?;
            count += 1;
        }
    }
    let took = t.elapsed();
    ensure(took < Duration::from_secs(60), || format!("{took:?}"))?;
    Ok(format!("{count} inequalities certified and replayed in {took:.2?}"))
}

fn criterion_5() -> Outcome {
    let t = Instant::now();
    let shape = weak(&[2, 3]);
    let r = verify_theorem_instance(&shape, WeightMode::Exact, &WeightOptions::default()).map_err(e)?;
    ensure(r.weight.status == WeightStatus::Optimal, || format!("{:?}", r.weight.status))?;
    let w = r.exact_weight.clone().ok_or("no exact weight")?;
    let bound = theorem_bound(&shape);
    ensure(bound.value == BigInt::from(1), || format!("bound {}", bound.value))?;
    ensure(w >= bound.value, || format!("W {w} below bound {}", bound.value))?;
    let c = r.chain.as_ref().ok_or("no chain readout")?;
    ensure(c.alpha == TupleIndex::new(vec![1, 1]) && c.beta == TupleIndex::new(vec![2, 1]), || {
        format!("pair {} {}", c.alpha, c.beta)
    })?;
    ensure(c.exponent == 2, || format!("exponent {}", c.exponent))?;
    ensure(c.w_beta >= &c.w_alpha * 4, || format!("w_beta {} < 4 * {}", c.w_beta, c.w_alpha))?;
    let took = t.elapsed();
    ensure(took < Duration::from_secs(600), || format!("{took:?}"))?;
    Ok(format!(
        "W(f,2) = {w} >= 1; w{} = {} >= 4 * w{} = {}; {:.2?}",
        c.beta,
        c.w_beta,
        c.alpha,
        &c.w_alpha * 4,
        took
    ))
}

fn criterion_6() -> Outcome {
    let mut notes = Vec::new();
    for shape in gate_shapes() {
        let p = witness_gate(&shape).map_err(e)?;
        let q = to_uv(&p, &shape).map_err(e)?;
        let factor = match shape.variant() {
            Variant::Weak => BigInt::from(1) << shape.d(),
            Variant::Strong => BigInt::from(shape.n()).pow(shape.d() as u32),
        };
        let limit = &factor * p.weight();
        ensure(q.weight() <= limit, || format!("{shape}: {} > {limit}", q.weight()))?;
        let f = make_hard(&shape).map_err(e)?;
        ensure(check_sign_representation_uv(&q, &f, &shape).map_err(e)?.passed(), || {
            format!("{shape}: converted gate fails")
        })?;
        notes.push(format!("{} {} <= {limit}", shape.key(), q.weight()));
    }
    Ok(notes.join("; "))
}

fn all_tuples(shape: &GroupShape) -> Vec<TupleIndex> {
    let mut out = vec![vec![]];
    for l in 1..=shape.d() {
        out = out
            .into_iter()
            .flat_map(|p: Vec<usize>| {
                shape.coord_range(l).map(move |c| {
                    let mut t = p.clone();
                    t.push(c);
                    t
                })
            })
            .collect();
    }
    out.into_iter().map(TupleIndex::new).collect()
}

fn criterion_7() -> Outcome {
    let mut shapes = gate_shapes();
    shapes.push(weak(&[4]));
    let mut pairs = 0usize;
    for shape in &shapes {
        let ctx = OrderContext::new(shape);
        let k = all_tuples(shape);
        ensure(k.len() <= 2000, || format!("{shape}: |K| = {}", k.len()))?;
        let cmp = |a: &TupleIndex, b: &TupleIndex| ctx.compare(a, b).expect("valid tuples");
        for a in &k {
            for b in &k {
                let c = cmp(a, b);
                ensure(c == oracle_compare(shape, a.coords(), b.coords()), || format!("{shape}: {a} vs {b}"))?;
                ensure(c == cmp(b, a).reverse(), || format!("{shape}: antisymmetry {a} {b}"))?;
                ensure((c == Ordering::Equal) == (a == b), || format!("{shape}: {a} == {b}"))?;
                pairs += 1;
                if c != Ordering::Less {
                    continue;
                }
                for z in &k {
                    if cmp(b, z) == Ordering::Less {
                        ensure(cmp(a, z) == Ordering::Less, || format!("{shape}: transitivity {a} {b} {z}"))?;
                    }
                }
            }
        }
        let seq = ctx.enumerate_ordered().map_err(e)?;
        ensure(seq.len() == k.len(), || format!("{shape}: enumeration length"))?;
        ensure(seq.windows(2).all(|w| cmp(&w[0], &w[1]) == Ordering::Less), || {
            format!("{shape}: enumeration not increasing")
        })?;
    }
    // d = 2: up the first column, down the second, and so on
    for (k1, k2) in [(2, 3), (4, 3), (3, 5)] {
        let shape = weak(&[k1, k2]);
        let seq = OrderContext::new(&shape).enumerate_ordered().map_err(e)?;
        for (i, t) in seq.iter().enumerate() {
            let (a, b) = (t.get(1), t.get(2));
            let pos = (a - 1) * k2 + if a % 2 == 1 { b } else { k2 + 1 - b };
            ensure(pos == i + 1, || format!("{shape}: {t} at rank {}", i + 1))?;
        }
    }
    Ok(format!("{} shapes, {pairs} ordered pairs, snake pattern for d=2", shapes.len()))
}

fn criterion_8() -> Outcome {
    let mut notes = Vec::new();
    for shape in &gate_shapes()[..3] {
        let p = witness_gate(shape).map_err(e)?;
        let k_size = shape.k_size();
        let want = (BigInt::from(1) << shape.d()) * ((BigInt::from(1) << (k_size + 1)) - 2);
        ensure(p.weight() == want, || format!("{shape}: W = {}, formula {want}", p.weight()))?;
        notes.push(format!("{} W = {want}", shape.key()));
    }
    Ok(notes.join("; "))
}

fn criterion_9() -> Outcome {
    let dir = tempfile::tempdir().map_err(e)?;
    let mut csvs = Vec::new();
    for (i, (workers, seed)) in [(1, 0), (3, 17)].into_iter().enumerate() {
        let out = dir.path().join(format!("run{i}"));
        let status = Command::new(env!("CARGO_BIN_EXE_ptflab"))
            .args(["reproduce", "weak-2-3", "--workers", &workers.to_string(), "--seed", &seed.to_string()])
            .arg("--out")
            .arg(&out)
            .status()
            .map_err(e)?;
        ensure(status.success(), || format!("run {i} exited with {status}"))?;
        let text = fs::read_to_string(out.join("results.csv")).map_err(e)?;
        let mut certs: Vec<String> = fs::read_dir(out.join("certs"))
            .map_err(e)?
            .map(|d| d.map(|d| d.file_name().to_string_lossy().into_owned()))
            .collect::<Result<_, _>>()
            .map_err(e)?;
        certs.sort();
        csvs.push((strip_timing(&text).map_err(e)?, certs));
    }
    ensure(csvs[0] == csvs[1], || "CSV or certificates differ between runs".into())?;
    Ok(format!("{} rows, {} certificates identical", csvs[0].0.lines().count() - 1, csvs[0].1.len()))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("witness gates, weak", criterion_1),
        ("witness gates, strong", criterion_2),
        ("sign degree", criterion_3),
        ("coefficient lemmas", criterion_4),
        ("weight theorem instance", criterion_5),
        ("basis-change bounds", criterion_6),
        ("ordering integrity", criterion_7),
        ("witness weight formula", criterion_8),
        ("determinism", criterion_9),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        match f() {
            Ok(note) => println!("criterion {} ({name}): PASS  {note}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {} ({name}): FAIL  {why}", i + 1);
            }
        }
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
