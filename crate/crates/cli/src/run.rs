//! Executes a job. Tasks run on a bounded rayon pool and share the lattice
//! and ground state read-only; results are collected in task order.

use std::collections::BTreeMap;
use std::sync::Arc;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use toric_tee::dense::{dense_entropy, dense_from_stabilizers, MAX_DENSE_QUBITS, MAX_REDUCED_QUBITS};
use toric_tee::entropy::entropy;
use toric_tee::excitations::{code_syndrome, condensation_check, half_excitation};
use toric_tee::graph::reduce_randomized;
use toric_tee::{
    area_report, build_restriction_graph, build_toric_code, cond_mutual_info, entropy_fattal, entropy_restricted_rank,
    fix_ground_state_with, gamma_2d, gamma_line, gamma_point, reduce, CodeLattice, CondensationKind, Face, Region,
    StabilizerState,
};

use crate::error::{CliError, CliResult};
use crate::report::{
    CheckRow, EntropyMethodLabel, EntropyRow, ExcitationOutput, GraphOutput, InvariantOutput, ReportDocument,
    TaskOutput, TaskResult, Timing, ToolInfo, SCHEMA_VERSION,
};
use crate::reproduce;
use crate::spec::{JobSpec, MethodChoice, Probe, Resolved, TaskSpec, TemplateInput};

#[derive(Clone, Copy, Debug, Default)]
pub struct RunOptions {
    /// Worker count; `None` uses rayon's default.
    pub threads: Option<usize>,
}

/// Everything the tasks share.
struct Context {
    lattice: Option<Arc<CodeLattice>>,
    state: Option<StabilizerState>,
    regions: BTreeMap<String, Region>,
    seed: u64,
}

impl Context {
    fn build(job: &JobSpec) -> CliResult<Self> {
        let (lattice, state) = match &job.lattice {
            Some(input) => {
                let spec = input.to_spec()?;
                let l = Arc::new(build_toric_code(&spec).map_err(|e| CliError::validation("lattice", e))?);
                let s = fix_ground_state_with(l.clone(), input.logicals.into())?;
                (Some(l), Some(s))
            }
            None => (None, None),
        };
        let mut regions = BTreeMap::new();
        if let Some(l) = &lattice {
            for (name, r) in &job.regions {
                regions.insert(name.clone(), r.build(l, name)?);
            }
        } else if !job.regions.is_empty() {
            return Err(CliError::validation("regions", "regions need a [lattice] table"));
        }
        Ok(Self {
            lattice,
            state,
            regions,
            seed: job.seed.unwrap_or(0),
        })
    }

    fn lattice(&self) -> &Arc<CodeLattice> {
        self.lattice.as_ref().expect("validated: task has a lattice")
    }

    fn state(&self) -> &StabilizerState {
        self.state.as_ref().expect("validated: task has a lattice")
    }

    /// Independent stream per task so results do not depend on scheduling.
    fn rng(&self, task: usize) -> ChaCha8Rng {
        let mut r = ChaCha8Rng::seed_from_u64(self.seed);
        r.set_stream(task as u64);
        r
    }
}

pub fn run(job: &JobSpec, opts: RunOptions) -> CliResult<ReportDocument> {
    job.validate()?;
    let start = Instant::now();
    let ctx = Context::build(job)?;
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(t) = opts.threads {
        pool = pool.num_threads(t.max(1));
    }
    let pool = pool.build().map_err(|e| CliError::Usage(format!("thread pool: {e}")))?;
    let outcomes: Vec<CliResult<(TaskResult, f64)>> = pool.install(|| {
        job.tasks
            .par_iter()
            .enumerate()
            .map(|(i, t)| {
                let t0 = Instant::now();
                let r = run_task(&ctx, i, t)?;
                Ok((r, t0.elapsed().as_secs_f64()))
            })
            .collect()
    });
    let mut results = Vec::with_capacity(outcomes.len());
    let mut task_seconds = Vec::with_capacity(outcomes.len());
    for o in outcomes {
        let (r, secs) = o?;
        results.push(r);
        task_seconds.push(secs);
    }
    Ok(ReportDocument {
        schema_version: SCHEMA_VERSION,
        tool: ToolInfo::default(),
        input: job.clone(),
        results,
        timing: Timing {
            threads: pool.current_num_threads(),
            total_seconds: start.elapsed().as_secs_f64(),
            task_seconds,
        },
    })
}

fn run_task(ctx: &Context, i: usize, t: &TaskSpec) -> CliResult<TaskResult> {
    let at = format!("task {i} ({})", t.kind());
    let (passed, output) = match t {
        TaskSpec::Entropy { regions, method } => entropy_task(ctx, regions, *method, &at)?,
        TaskSpec::Invariant(template) => invariant_task(ctx, template, &at)?,
        TaskSpec::GraphReduce {
            region,
            plane_y,
            random_orders,
        } => graph_task(ctx, i, region, *plane_y, *random_orders, &at)?,
        TaskSpec::ExcitationCheck { face, probe } => excitation_task(ctx, face, *probe, &at)?,
        TaskSpec::VerifySuite { cases } => verify_task(ctx, i, *cases)?,
        TaskSpec::ReproducePaper {} => {
            let targets = reproduce::targets();
            (targets.iter().all(|t| t.passed), TaskOutput::Targets { targets })
        }
    };
    Ok(TaskResult {
        task: i,
        kind: t.kind(),
        passed,
        output,
    })
}

fn entropy_task(ctx: &Context, names: &[String], method: MethodChoice, at: &str) -> CliResult<(bool, TaskOutput)> {
    let (l, s) = (ctx.lattice(), ctx.state());
    let rows: Vec<CliResult<(bool, EntropyRow)>> = names
        .par_iter()
        .map(|name| {
            let r = &ctx.regions[name];
            let err = |e| CliError::validation(at, e);
            let (bits, agree, label) = match method {
                MethodChoice::Both => {
                    let a = entropy_restricted_rank(s, r).map_err(err)?.entropy_bits;
                    let b = entropy_fattal(s, r).map_err(err)?.entropy_bits;
                    (a, a == b, EntropyMethodLabel::Both)
                }
                MethodChoice::RestrictedRank => {
                    let e = entropy_restricted_rank(s, r).map_err(err)?;
                    (e.entropy_bits, true, e.method.into())
                }
                MethodChoice::FattalPairs => {
                    let e = entropy_fattal(s, r).map_err(err)?;
                    (e.entropy_bits, true, e.method.into())
                }
            };
            let area = area_report(l, r);
            Ok((
                agree,
                EntropyRow {
                    name: name.clone(),
                    qubits: r.len(),
                    entropy_bits: bits,
                    method: label,
                    predicted: area.area as i64 - area.components_rough_free as i64,
                    area,
                },
            ))
        })
        .collect();
    let mut all = true;
    let mut out = Vec::with_capacity(rows.len());
    for row in rows {
        let (agree, row) = row?;
        all &= agree;
        out.push(row);
    }
    Ok((all, TaskOutput::Entropy { rows: out }))
}

fn invariant_task(ctx: &Context, template: &TemplateInput, at: &str) -> CliResult<(bool, TaskOutput)> {
    let (l, s) = (ctx.lattice(), ctx.state());
    let err = |e| CliError::validation(at, e);
    let (face, report) = match template.resolve(at)? {
        Resolved::Point(f, p) => (Some(f), gamma_point(s, f, &p).map_err(err)?),
        Resolved::Line(f, p) => (Some(f), gamma_line(s, f, &p).map_err(err)?),
        Resolved::TwoD(p) => (None, gamma_2d(s, &p).map_err(err)?),
    };
    let part = template.build(l, at)?;
    let n = [part.bc(), part.cd(), part.b.clone(), part.d.clone()].map(|r| area_report(l, &r).components_rough_free);
    Ok((
        report.is_consistent(),
        TaskOutput::Invariant(InvariantOutput {
            face: face.map(|f| f.to_string()),
            boundary: face.map(|f| l.spec().boundary(f)),
            report,
            components_rough_free: n,
        }),
    ))
}

fn graph_task(
    ctx: &Context,
    i: usize,
    name: &str,
    plane_y: i64,
    orders: usize,
    at: &str,
) -> CliResult<(bool, TaskOutput)> {
    let (l, s) = (ctx.lattice(), ctx.state());
    let r = &ctx.regions[name];
    let g = build_restriction_graph(l, r, plane_y).map_err(|e| CliError::validation(at, e))?;
    let expected = entropy(s, r)?;
    let (vertices, edges, dangling) = (g.n_vertices(), g.n_edges(), g.n_dangling());
    let mut rng = ctx.rng(i);
    let random_ebits: Vec<usize> = (0..orders).map(|_| reduce_randomized(g.clone(), &mut rng).ebits).collect();
    let det = reduce(g);
    let complete = det.residual.is_empty();
    let passed = complete && det.ebits == expected && random_ebits.iter().all(|&e| e == expected);
    Ok((
        passed,
        TaskOutput::GraphReduce(GraphOutput {
            name: name.to_string(),
            vertices,
            edges,
            dangling,
            expected_bits: expected,
            ebits: det.ebits,
            complete,
            steps: det.steps,
            random_ebits,
        }),
    ))
}

fn excitation_task(ctx: &Context, face: &str, probe: Probe, at: &str) -> CliResult<(bool, TaskOutput)> {
    let (l, s) = (ctx.lattice(), ctx.state());
    let err = |e| CliError::validation(at, e);
    let f = Face::parse(face).map_err(err)?;
    let kind = match probe {
        Probe::Point => CondensationKind::Point,
        Probe::Line => CondensationKind::Line,
    };
    let p = half_excitation(l, f, kind).map_err(err)?;
    let condensed = condensation_check(s, f, kind).map_err(err)?;
    Ok((
        true,
        TaskOutput::Excitation(ExcitationOutput {
            face: f.to_string(),
            boundary: l.spec().boundary(f),
            probe,
            operator_weight: p.operator.weight(),
            syndrome_weight: code_syndrome(l, &p.operator)?.len(),
            condensed,
        }),
    ))
}

struct Tally {
    row: CheckRow,
}

impl Tally {
    fn new(name: &str) -> Self {
        Self {
            row: CheckRow {
                name: name.into(),
                cases: 0,
                failures: 0,
                first_failure: None,
            },
        }
    }

    fn record(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.row.cases += 1;
        if !ok {
            self.row.failures += 1;
            self.row.first_failure.get_or_insert_with(what);
        }
    }
}

fn random_region<R: Rng>(n: usize, rng: &mut R) -> Region {
    let p = rng.gen_range(0.1..0.9);
    Region::from_qubits(n, (0..n).filter(|_| rng.gen_bool(p))).expect("indices in range")
}

/// Seeded property checks on the job's lattice.
fn verify_task(ctx: &Context, i: usize, cases: usize) -> CliResult<(bool, TaskOutput)> {
    let s = ctx.state();
    let n = s.n_qubits();
    let mut rng = ctx.rng(i);
    let mut engines = Tally::new("engines agree");
    let mut purity = Tally::new("S(R) = S(complement)");
    let mut ssa = Tally::new("I(A:C|B) >= 0");
    for c in 0..cases {
        let r = random_region(n, &mut rng);
        let a = entropy_restricted_rank(s, &r)?.entropy_bits;
        let b = entropy_fattal(s, &r)?.entropy_bits;
        engines.record(a == b, || format!("case {c}: rank {a}, pairs {b}"));
        let rc = entropy_restricted_rank(s, &r.complement())?.entropy_bits;
        purity.record(a == rc, || format!("case {c}: {a} vs {rc}"));
        let labels: Vec<u8> = (0..n).map(|_| rng.gen_range(0..4)).collect();
        let part = |k: u8| Region::from_qubits(n, (0..n).filter(|&j| labels[j] == k)).expect("indices in range");
        let v = cond_mutual_info(s, &part(0), &part(1), &part(2))?;
        ssa.record(v >= 0, || format!("case {c}: {v}"));
    }
    let mut checks = vec![engines.row, purity.row, ssa.row];
    if n <= MAX_DENSE_QUBITS {
        let mut dense = Tally::new("dense entropy matches");
        let psi = dense_from_stabilizers(s)?;
        for c in 0..cases {
            let mut r = random_region(n, &mut rng);
            if r.len() > MAX_REDUCED_QUBITS {
                r = r.complement();
            }
            let want = entropy(s, &r)? as f64;
            let got = dense_entropy(&psi, &r)?;
            dense.record((got - want).abs() <= 1e-9, || format!("case {c}: dense {got}, exact {want}"));
        }
        checks.push(dense.row);
    }
    let passed = checks.iter().all(|c| c.failures == 0);
    Ok((passed, TaskOutput::Checks { checks }))
}
