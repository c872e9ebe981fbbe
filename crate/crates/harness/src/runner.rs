//! Executes an experiment spec: one job per (shape, mode), lemma size and
//! exponent table, run on a worker pool and reassembled in spec order.

use std::time::Instant;

use exact_lp::rational::format as fmt_rational;
use exact_lp::{BnbLimits, Limits};
use num_bigint::BigInt;
use ptf_core::threshold_analysis::{
    certify_coefficient_lemma, certify_main_chain, min_weight, sign_degree, theorem_bound, verify_theorem_instance,
    verify_witness_gate, CoefficientLemma, Verdict, WeightMode, WeightOptions, WeightStatus,
};
use ptf_core::{make_hard, GroupShape};
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rayon::prelude::*;
use serde::Serialize;

use crate::spec::{ExperimentSpec, ExponentTable, Mode};
use crate::store::{CertStore, ResultRow};
use crate::Result;

#[derive(Clone, Debug)]
pub struct RunOptions {
    pub workers: usize,
    /// Permutes the order jobs are started in; results are unaffected.
    pub seed: u64,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions { workers: 1, seed: 0 }
    }
}

#[derive(Clone, Debug, Default)]
pub struct RunReport {
    pub rows: Vec<ResultRow>,
    pub certs: CertStore,
}

impl RunReport {
    pub fn failed(&self) -> bool {
        self.rows.iter().any(ResultRow::is_failure)
    }
}

#[derive(Clone, Debug)]
enum Job {
    Shape(GroupShape, Mode),
    Lemma(CoefficientLemma, usize),
    Exponents(ExponentTable),
}

/// Rows and certificates of one job.
struct Sink<'a> {
    spec: &'a ExperimentSpec,
    shape: String,
    rows: Vec<ResultRow>,
    certs: CertStore,
}

impl Sink<'_> {
    fn cert<T: Serialize>(&mut self, value: &T) -> Result<String> {
        Ok(self.certs.put(serde_json::to_value(value)?))
    }

    fn row(&mut self, metric: &str, value: impl ToString, verdict: Option<Verdict>, cert: &str, detail: &str) {
        self.rows.push(ResultRow {
            experiment: self.spec.name.clone(),
            shape: self.shape.clone(),
            metric: metric.to_string(),
            value: value.to_string(),
            verdict: verdict.map(|v| v.as_str().to_string()).unwrap_or_default(),
            certificate: cert.to_string(),
            detail: detail.to_string(),
            wall_ms: 0,
        });
    }
}

fn jobs(spec: &ExperimentSpec) -> Result<Vec<Job>> {
    let mut out = Vec::new();
    let theorem = spec.modes.contains(&Mode::Theorem);
    for shape in spec.shapes()? {
        for &mode in &spec.modes {
            // the theorem report carries the exact weight
            if mode == Mode::MinweightExact && theorem {
                continue;
            }
            out.push(Job::Shape(shape.clone(), mode));
        }
    }
    for job in &spec.lemmas {
        for &k in &job.ks {
            out.push(Job::Lemma(job.lemma, k));
        }
    }
    if let Some(t) = &spec.exponent_table {
        out.push(Job::Exponents(t.clone()));
    }
    Ok(out)
}

pub fn run(spec: &ExperimentSpec, opts: &RunOptions) -> Result<RunReport> {
    spec.validate()?;
    let jobs = jobs(spec)?;
    let mut order: Vec<usize> = (0..jobs.len()).collect();
    order.shuffle(&mut StdRng::seed_from_u64(opts.seed));
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.workers.max(1))
        .build()
        .expect("thread pool");
    let mut done: Vec<(usize, Result<(Vec<ResultRow>, CertStore)>)> = pool.install(|| {
        order
            .par_iter()
            .map(|&i| (i, run_job(spec, &jobs[i])))
            .collect()
    });
    done.sort_by_key(|(i, _)| *i);
    let mut report = RunReport::default();
    for (_, out) in done {
        let (rows, certs) = out?;
        report.rows.extend(rows);
        report.certs.merge(certs);
    }
    Ok(report)
}

fn run_job(spec: &ExperimentSpec, job: &Job) -> Result<(Vec<ResultRow>, CertStore)> {
    let start = Instant::now();
    let shape = match job {
        Job::Shape(s, _) => s.key(),
        Job::Lemma(l, k) => format!("{l}-{k}"),
        Job::Exponents(t) => format!("n={}", t.n),
    };
    let mut sink = Sink {
        spec,
        shape,
        rows: Vec::new(),
        certs: CertStore::default(),
    };
    let outcome = match job {
        Job::Shape(s, mode) => shape_job(&mut sink, s, *mode),
        Job::Lemma(l, k) => lemma_job(&mut sink, *l, *k),
        Job::Exponents(t) => exponent_job(&mut sink, t),
    };
    if let Err(e) = outcome {
        let name = match job {
            Job::Shape(_, mode) => mode_name(*mode),
            Job::Lemma(..) => "lemma".into(),
            Job::Exponents(_) => "exponent_table".into(),
        };
        let verdict = match &e {
            crate::Error::Core(ptf_core::Error::Budget(_) | ptf_core::Error::Cap(_)) => Verdict::Skipped,
            _ => Verdict::Fail,
        };
        sink.row(&name, "", Some(verdict), "", &e.to_string());
    }
    let ms = start.elapsed().as_millis() as u64;
    for r in &mut sink.rows {
        r.wall_ms = ms;
    }
    Ok((sink.rows, sink.certs))
}

fn mode_name(mode: Mode) -> String {
    serde_json::to_value(mode)
        .ok()
        .and_then(|v| v.as_str().map(str::to_string))
        .unwrap_or_default()
}

fn binomial_sum(n: usize, d: usize) -> usize {
    let mut total = 0usize;
    let mut c = 1usize;
    for i in 0..=d.min(n) {
        total = total.saturating_add(c);
        c = c.saturating_mul(n - i) / (i + 1);
    }
    total
}

fn weight_options(spec: &ExperimentSpec) -> WeightOptions {
    WeightOptions {
        bnb: BnbLimits {
            max_nodes: spec.budgets.nodes,
            ..BnbLimits::default()
        },
        incumbent: None,
    }
}

fn shape_job(sink: &mut Sink, shape: &GroupShape, mode: Mode) -> Result<()> {
    let budgets = &sink.spec.budgets;
    let d = shape.d();
    let name = mode_name(mode);
    if shape.n() > budgets.n_cap {
        sink.row(&name, "", Some(Verdict::Skipped), "", &format!("n = {} over cap", shape.n()));
        return Ok(());
    }
    let solves = matches!(mode, Mode::Signdeg | Mode::MinweightLp | Mode::MinweightExact | Mode::Theorem);
    if solves && binomial_sum(shape.n(), d) > budgets.column_cap {
        let cols = binomial_sum(shape.n(), d);
        sink.row(&name, "", Some(Verdict::Skipped), "", &format!("{cols} columns over cap"));
        return Ok(());
    }
    let asserted = shape.satisfies_hypotheses();
    match mode {
        Mode::VerifyGate => {
            let r = verify_witness_gate(shape)?;
            let cert = sink.cert(&r)?;
            for c in &r.checks {
                let value = match c.name.as_str() {
                    "basis_change" => r.uv_weight.to_string(),
                    "symmetrized_witness" => String::new(),
                    _ => r.weight.to_string(),
                };
                sink.row(&c.name, value, Some(c.verdict), &cert, &c.detail);
            }
        }
        Mode::Signdeg => {
            let f = make_hard(shape)?;
            let r = sign_degree(&f, d, &Limits::default())?;
            let cert = sink.cert(&r)?;
            let value = r.degree.map(|v| v.to_string()).unwrap_or_default();
            let detail = format!("expected {d}");
            sink.row("sign_degree", value, Some(Verdict::from_bool(r.degree == Some(d))), &cert, &detail);
            if let Some(step) = r.steps.iter().rev().find(|s| !s.feasible) {
                let v = if step.certificate.is_some() { Verdict::Certified } else { Verdict::Fail };
                let detail = format!("{} columns", step.columns);
                sink.row("refuted_degree", step.degree, Some(v), &cert, &detail);
            }
        }
        Mode::MinweightLp | Mode::MinweightExact => {
            let f = make_hard(shape)?;
            let wm = if mode == Mode::MinweightLp { WeightMode::Lp } else { WeightMode::Exact };
            let out = min_weight(&f, d, wm, &weight_options(sink.spec))?;
            let cert = sink.cert(&out)?;
            let metric = if wm == WeightMode::Lp { "W_lp" } else { "W_exact" };
            let verdict = match out.status {
                WeightStatus::Optimal => None,
                WeightStatus::Budget => Some(Verdict::Skipped),
                WeightStatus::Infeasible => Some(Verdict::Fail),
            };
            let value = out.value.as_ref().map(fmt_rational).unwrap_or_default();
            sink.row(metric, value, verdict, &cert, &format!("{:?}, {} nodes", out.status, out.nodes));
            if wm == WeightMode::Exact {
                let lb = out.lower_bound.as_ref().map(fmt_rational).unwrap_or_default();
                sink.row("W_exact_lower_bound", lb, None, &cert, "");
            }
        }
        Mode::Lemmas => {
            let r = certify_main_chain(shape, &Limits::default())?;
            for res in &r.results {
                let cert = sink.cert(res)?;
                let verdict = match res.verdict {
                    Verdict::Violated if !asserted => Verdict::NotAsserted,
                    v => v,
                };
                sink.row(&format!("chain: {}", res.inequality.label), "", Some(verdict), &cert, "");
            }
        }
        Mode::Theorem => {
            let wm = if sink.spec.modes.contains(&Mode::MinweightExact) {
                WeightMode::Exact
            } else {
                WeightMode::Lp
            };
            let r = verify_theorem_instance(shape, wm, &weight_options(sink.spec))?;
            let cert = sink.cert(&r)?;
            let bound_detail = if asserted { "hypotheses met" } else { "hypotheses not met" };
            sink.row("bound_exponent", r.bound.exponent, None, &cert, bound_detail);
            sink.row("bound", &r.bound.value, None, &cert, bound_detail);
            let lp = r.lp_lower_bound.as_ref().map(fmt_rational).unwrap_or_default();
            sink.row("W_lp", lp, None, &cert, "");
            if let Some(w) = &r.exact_weight {
                sink.row("W_exact", w, None, &cert, &format!("{} nodes", r.weight.nodes));
            }
            for c in &r.checks {
                let value = match c.name.as_str() {
                    "theorem_bound" => r.bound.value.to_string(),
                    "chain" => r.chain.as_ref().map(|c| c.w_beta.to_string()).unwrap_or_default(),
                    _ => String::new(),
                };
                if matches!(c.name.as_str(), "weight_solve" | "theorem_bound" | "chain" | "symmetrized_solver_gate") {
                    sink.row(&c.name, value, Some(c.verdict), &cert, &c.detail);
                }
            }
        }
        Mode::Bound => {
            let b = theorem_bound(shape);
            let detail = match (b.asserted, b.log_rounding) {
                (true, Some(r)) => format!("hypotheses met; {r}"),
                (true, None) => "hypotheses met".to_string(),
                (false, _) => "hypotheses not met".to_string(),
            };
            sink.row("bound_exponent", b.exponent, None, "", &detail);
            sink.row("bound", &b.value, None, "", &detail);
        }
    }
    Ok(())
}

fn lemma_job(sink: &mut Sink, lemma: CoefficientLemma, k: usize) -> Result<()> {
    let r = certify_coefficient_lemma(lemma, k, &Limits::default())?;
    for res in &r.results {
        let cert = sink.cert(res)?;
        sink.row(&res.inequality.label, "", Some(res.verdict), &cert, "");
    }
    Ok(())
}

fn exponent_job(sink: &mut Sink, t: &ExponentTable) -> Result<()> {
    let values: Vec<(usize, BigInt)> = t
        .ks
        .iter()
        .map(|&k| (k, BigInt::from(k - 1).pow((t.n / k) as u32)))
        .collect();
    let cert = sink.cert(
        &values
            .iter()
            .map(|(k, v)| (k.to_string(), v.to_string()))
            .collect::<std::collections::BTreeMap<_, _>>(),
    )?;
    for (k, v) in &values {
        sink.row(&format!("(k-1)^(n/k) k={k}"), v, None, &cert, "");
    }
    let best = values.iter().max_by(|a, b| a.1.cmp(&b.1)).map(|(k, _)| *k).unwrap_or(0);
    let detail = format!("expected k={}", t.expect_max);
    sink.row("argmax_k", best, Some(Verdict::from_bool(best == t.expect_max)), &cert, &detail);
    Ok(())
}
