//! Task execution. Each task yields a JSON record with canonical expression strings
//! and a list of checks; a task fails when any of its expectations does not hold.

use poisfol::cohomology::{decide_exactness, foliation_kuranishi_decide};
use poisfol::expr::{self, print_canonical, print_foliated, print_function, print_path};
use poisfol::foliation::{bott_differential, graph_involutive, phi, v2};
use poisfol::linfty::{certified_rank, check_poisson, kuranishi_cochain, l1, l2, l3, mc_residual, verify_path};
use poisfol::multivector::schouten;
use poisfol::testkit::check_dirac_fiber;
use poisfol::{
    Complex, DeformationPath, ExactnessVerdict, FoliatedFormNF, FoliationVerdict, Multivector, PathClaim,
    RegularPoissonStructure, SolverOptions, TorusFunction, Value, Q,
};
use serde_json::{json, Value as Json};

use crate::scenario::{ComplexTag, FoliatedInput, FoliatedOrMultivector, FoliatedTerm, Side, Task, VerdictTag};
use crate::{RunError, RunOptions};

/// Default seed for randomized tasks when neither the flag nor the scenario sets one.
pub const DEFAULT_SEED: u64 = 0x5EED_2024;

pub struct Context<'a> {
    pub rp: &'a RegularPoissonStructure,
    pub opts: &'a RunOptions,
    pub scenario_seed: Option<u64>,
}

/// Accumulates the checks of one task.
struct Checks {
    items: Vec<Json>,
    ok: bool,
}

impl Checks {
    fn new() -> Self {
        Checks { items: vec![], ok: true }
    }
    fn push(&mut self, name: &str, expected: String, computed: String, holds: bool) {
        self.ok &= holds;
        self.items.push(json!({ "check": name, "expected": expected, "computed": computed, "holds": holds }));
    }
}

fn elab(e: poisfol::Error) -> RunError {
    RunError::Elaboration(e.to_string())
}

impl Context<'_> {
    fn dim(&self) -> usize {
        self.rp.dim()
    }
    fn mv(&self, src: &str) -> Result<Multivector, RunError> {
        expr::parse_multivector(src, self.dim()).map_err(elab)
    }
    fn function(&self, src: &str) -> Result<TorusFunction, RunError> {
        expr::parse_function(src, self.dim()).map_err(elab)
    }
    fn rational(&self, src: &str) -> Result<Q, RunError> {
        let f = self.function(src)?;
        match f.as_constant() {
            Some(c) if c.im == Q::from_integer(0.into()) => Ok(c.re),
            _ => Err(RunError::Elaboration(format!("{src:?} is not a real rational constant"))),
        }
    }
    fn path(&self, src: &str) -> Result<DeformationPath, RunError> {
        expr::parse_path(src, self.dim()).map(DeformationPath::new).map_err(elab)
    }
    fn foliated_terms(&self, terms: &[FoliatedTerm]) -> Result<FoliatedFormNF, RunError> {
        let mut out = FoliatedFormNF::zero(self.dim());
        for t in terms {
            let form = expr::parse_form(&t.form, self.dim()).map_err(elab)?;
            out = &out + &FoliatedFormNF::decomposable(&form, t.direction - 1);
        }
        Ok(out)
    }
    fn foliated_input(&self, input: &FoliatedInput) -> Result<Result<FoliatedFormNF, String>, RunError> {
        Ok(match input {
            FoliatedInput::Multivector(src) => phi(self.rp, &self.mv(src)?).map_err(|e| e.to_string()),
            FoliatedInput::Terms(t) => Ok(self.foliated_terms(t)?),
        })
    }
    fn solver(&self, complex: Complex, box_bound: Option<i32>) -> SolverOptions {
        SolverOptions {
            box_bound: box_bound.or(self.opts.box_bound),
            complex,
            parallel: self.opts.parallel,
            ..SolverOptions::default()
        }
    }
    fn seed(&self, task_seed: Option<u64>) -> u64 {
        self.opts.seed.or(task_seed).or(self.scenario_seed).unwrap_or(DEFAULT_SEED)
    }
}

fn mv_text(m: &Multivector) -> String {
    print_canonical(&Value::Multivector(m.clone()))
}

fn expect_mv(checks: &mut Checks, ctx: &Context, name: &str, expected: &Option<String>, computed: &Multivector) -> Result<(), RunError> {
    if let Some(src) = expected {
        let e = ctx.mv(src)?;
        checks.push(name, mv_text(&e), mv_text(computed), e == *computed);
    }
    Ok(())
}

fn expect_foliated(
    checks: &mut Checks,
    ctx: &Context,
    name: &str,
    expected: &Option<Vec<FoliatedTerm>>,
    computed: &FoliatedFormNF,
) -> Result<(), RunError> {
    if let Some(terms) = expected {
        let e = ctx.foliated_terms(terms)?;
        checks.push(name, print_foliated(&e), print_foliated(computed), e == *computed);
    }
    Ok(())
}

fn verdict_json(v: &ExactnessVerdict) -> (VerdictTag, Json) {
    match v {
        ExactnessVerdict::Exact(p) => (VerdictTag::Exact, json!({ "verdict": "exact", "primitive": mv_text(p) })),
        ExactnessVerdict::NotExact(w) => (
            VerdictTag::NotExact,
            json!({
                "verdict": "not-exact",
                "witness": {
                    "case": w.case.tag(),
                    "component": blade_text(&w.component.indices(), "d"),
                    "average": print_function(&w.average),
                }
            }),
        ),
        ExactnessVerdict::Inconclusive(b) => (VerdictTag::Inconclusive, json!({ "verdict": "inconclusive", "box": b })),
    }
}

fn foliation_verdict_json(v: &FoliationVerdict) -> (VerdictTag, Json) {
    match v {
        FoliationVerdict::Exact(p) => (VerdictTag::Exact, json!({ "verdict": "exact", "primitive": print_foliated(p) })),
        FoliationVerdict::NotExact(w) => (
            VerdictTag::NotExact,
            json!({
                "verdict": "not-exact",
                "witness": {
                    "component": blade_text(&w.component.indices(), "dt"),
                    "direction": format!("d{}", w.direction + 1),
                    "average": print_function(&w.average),
                }
            }),
        ),
        FoliationVerdict::Inconclusive(why) => (VerdictTag::Inconclusive, json!({ "verdict": "inconclusive", "reason": why })),
    }
}

fn blade_text(idx: &[usize], prefix: &str) -> String {
    if idx.is_empty() {
        return "1".into();
    }
    idx.iter().map(|i| format!("{prefix}{}", i + 1)).collect::<Vec<_>>().join("^")
}

fn expect_verdict(checks: &mut Checks, expected: Option<VerdictTag>, found: VerdictTag) {
    if let Some(e) = expected {
        checks.push("verdict", e.as_str().into(), found.as_str().into(), e == found);
    }
}

/// Runs one task. Domain errors (for instance a non-good argument) are reported as a
/// failed task; expression errors abort the run.
pub fn run_task(ctx: &Context, task: &Task) -> Result<Json, RunError> {
    let mut checks = Checks::new();
    let result = match execute(ctx, task, &mut checks) {
        Ok(r) => r,
        Err(TaskError::Run(e)) => return Err(e),
        Err(TaskError::Domain(msg)) => {
            checks.ok = false;
            json!({ "error": msg })
        }
    };
    Ok(json!({
        "id": task.id(),
        "type": task.kind(),
        "status": if checks.ok { "pass" } else { "fail" },
        "result": result,
        "checks": checks.items,
    }))
}

enum TaskError {
    Run(RunError),
    Domain(String),
}

impl From<RunError> for TaskError {
    fn from(e: RunError) -> Self {
        TaskError::Run(e)
    }
}

fn domain<T>(r: poisfol::Result<T>) -> Result<T, TaskError> {
    r.map_err(|e| TaskError::Domain(e.to_string()))
}

fn execute(ctx: &Context, task: &Task, checks: &mut Checks) -> Result<Json, TaskError> {
    let rp = ctx.rp;
    Ok(match task {
        Task::PoissonCheck { bivector, expect_poisson, expect_rank, .. } => {
            let b = match bivector {
                Some(src) => ctx.mv(src)?,
                None => rp.pi.clone(),
            };
            let jac = schouten(&b, &b);
            let poisson = check_poisson(&b);
            let rank = certified_rank(&b);
            if let Some(e) = expect_poisson {
                checks.push("poisson", e.to_string(), poisson.to_string(), *e == poisson);
            }
            if let Some(e) = expect_rank {
                let found = rank.map(|r| r.to_string()).unwrap_or_else(|| "uncertified".into());
                checks.push("rank", e.to_string(), found, rank == Some(*e));
            }
            json!({
                "bivector": mv_text(&b),
                "self_bracket": mv_text(&jac),
                "poisson": poisson,
                "rank": rank,
            })
        }
        Task::Schouten { left, right, expect, .. } => {
            let v = schouten(&ctx.mv(left)?, &ctx.mv(right)?);
            expect_mv(checks, ctx, "value", expect, &v)?;
            json!({ "value": mv_text(&v) })
        }
        Task::L2 { left, right, expect, .. } => {
            let v = l2(rp, &ctx.mv(left)?, &ctx.mv(right)?);
            expect_mv(checks, ctx, "value", expect, &v)?;
            json!({ "value": mv_text(&v) })
        }
        Task::L3 { args, expect, .. } => {
            let v = l3(rp, &ctx.mv(&args[0])?, &ctx.mv(&args[1])?, &ctx.mv(&args[2])?);
            expect_mv(checks, ctx, "value", expect, &v)?;
            json!({ "value": mv_text(&v) })
        }
        Task::Mc { element, expect_mc, .. } => {
            let r = mc_residual(rp, &ctx.mv(element)?);
            if let Some(e) = expect_mc {
                checks.push("maurer_cartan", e.to_string(), r.is_mc.to_string(), *e == r.is_mc);
            }
            json!({
                "residual": mv_text(&r.residual),
                "l1": mv_text(&r.parts[0]),
                "l2_half": mv_text(&r.parts[1]),
                "l3_sixth": mv_text(&r.parts[2]),
                "maurer_cartan": r.is_mc,
            })
        }
        Task::Kuranishi { element, side, expect_cochain, expect_verdict: ev, .. } => {
            let z = ctx.mv(element)?;
            match side {
                Side::Good => {
                    let w = domain(kuranishi_cochain(rp, &z))?;
                    if let Some(FoliatedOrMultivector::Multivector(src)) = expect_cochain {
                        expect_mv(checks, ctx, "cochain", &Some(src.clone()), &w)?;
                    } else if expect_cochain.is_some() {
                        return Err(RunError::Schema("good-side cochain must be a multivector".into()).into());
                    }
                    let v = domain(decide_exactness(rp, &w, &ctx.solver(Complex::Good, None)))?;
                    let (tag, mut j) = verdict_json(&v);
                    expect_verdict(checks, *ev, tag);
                    j["cochain"] = json!(mv_text(&w));
                    j
                }
                Side::Foliation => {
                    let eta = domain(phi(rp, &z))?;
                    let (w, v) = domain(foliation_kuranishi_decide(&rp.splitting, &eta))?;
                    match expect_cochain {
                        Some(FoliatedOrMultivector::Terms(t)) => expect_foliated(checks, ctx, "cochain", &Some(t.clone()), &w)?,
                        Some(FoliatedOrMultivector::Multivector(_)) => {
                            return Err(RunError::Schema("foliation-side cochain must be a list of terms".into()).into())
                        }
                        None => {}
                    }
                    let (tag, mut j) = foliation_verdict_json(&v);
                    expect_verdict(checks, *ev, tag);
                    j["phi"] = json!(print_foliated(&eta));
                    j["cochain"] = json!(print_foliated(&w));
                    j
                }
            }
        }
        Task::Phi { element, expect, expect_cocycle, graph_involutive_at, .. } => {
            let eta = domain(phi(rp, &ctx.mv(element)?))?;
            expect_foliated(checks, ctx, "value", expect, &eta)?;
            let d = bott_differential(&rp.splitting, &eta);
            if let Some(e) = expect_cocycle {
                checks.push("cocycle", e.to_string(), d.is_zero().to_string(), *e == d.is_zero());
            }
            let mut j = json!({ "value": print_foliated(&eta), "v1": print_foliated(&d) });
            if let Some(ts) = graph_involutive_at {
                let mut rows = vec![];
                for src in ts {
                    let t = ctx.rational(src)?;
                    let scaled = eta.scale(&poisfol::Gauss::real(t.clone()));
                    let inv = graph_involutive(&rp.splitting, &scaled);
                    checks.push(&format!("graph_involutive(t={t})"), "true".into(), inv.to_string(), inv);
                    rows.push(json!({ "t": t.to_string(), "involutive": inv }));
                }
                j["graph_involutive"] = Json::Array(rows);
            }
            j
        }
        Task::V2 { left, right, expect, .. } => {
            let a = ctx.foliated_input(left)?.map_err(TaskError::Domain)?;
            let b = ctx.foliated_input(right)?.map_err(TaskError::Domain)?;
            let v = v2(&rp.splitting, &a, &b);
            expect_foliated(checks, ctx, "value", expect, &v)?;
            json!({ "left": print_foliated(&a), "right": print_foliated(&b), "value": print_foliated(&v) })
        }
        Task::Exactness { cocycle, complex, box_bound, expect_verdict: ev, expect_witness, .. } => {
            let w = ctx.mv(cocycle)?;
            let cx = match complex {
                Some(ComplexTag::Full) => Complex::Full,
                Some(ComplexTag::Good) => Complex::Good,
                None if ctx.opts.full_complex => Complex::Full,
                None => Complex::Good,
            };
            let v = domain(decide_exactness(rp, &w, &ctx.solver(cx, *box_bound)))?;
            let (tag, mut j) = verdict_json(&v);
            expect_verdict(checks, *ev, tag);
            if let Some(src) = expect_witness {
                let e = ctx.function(src)?;
                let found = match &v {
                    ExactnessVerdict::NotExact(r) => Some(r.average.clone()),
                    _ => None,
                };
                let text = found.as_ref().map(print_function).unwrap_or_else(|| "none".into());
                checks.push("witness", print_function(&e), text, found.as_ref() == Some(&e));
            }
            if let ExactnessVerdict::Exact(p) = &v {
                let back = l1(rp, p);
                checks.push("primitive", mv_text(&w), mv_text(&back), back == w);
            }
            j["complex"] = json!(if cx == Complex::Full { "full" } else { "good" });
            j
        }
        Task::PathVerify { path, poisson, tangent, wedge_power, rank, .. } => {
            let p = ctx.path(path)?;
            let mut claims = vec![];
            if poisson == &Some(true) {
                claims.push(PathClaim::PoissonIdentically);
            }
            if let Some(src) = tangent {
                claims.push(PathClaim::TangentEquals(ctx.mv(src)?));
            }
            for w in wedge_power {
                claims.push(match &w.equals {
                    Some(src) => PathClaim::WedgePowerEquals(w.power, ctx.path(src)?),
                    None => PathClaim::WedgePowerVanishes(w.power),
                });
            }
            if let Some(r) = rank {
                let ts = r.at.iter().map(|s| ctx.rational(s)).collect::<Result<Vec<_>, _>>()?;
                claims.push(PathClaim::RankCertAt(ts, r.rank));
            }
            let outcomes = domain(verify_path(rp, &p, &claims))?;
            let mut rows = vec![];
            for o in &outcomes {
                let (name, expected) = claim_text(&o.claim);
                checks.push(&name, expected.clone(), o.computed.clone(), o.holds);
                rows.push(json!({ "claim": name, "holds": o.holds }));
            }
            if poisson == &Some(false) {
                let s = p.schouten(&p);
                checks.push("not_poisson", "nonzero".into(), print_path(s.coeffs()), !s.is_zero());
            }
            json!({ "path": print_path(p.coeffs()), "claims": rows })
        }
        Task::DiracSuite { fibers, seed, .. } => {
            let base = ctx.seed(*seed);
            let mut failures = vec![];
            for k in 0..*fibers as u64 {
                if let Err(msg) = check_dirac_fiber(base.wrapping_add(k)) {
                    failures.push(json!({ "fiber": k, "failure": msg }));
                }
            }
            let passed = *fibers - failures.len();
            checks.push("fibers", fibers.to_string(), passed.to_string(), failures.is_empty());
            failures.truncate(5);
            json!({ "seed": base, "fibers": fibers, "passed": passed, "failures": failures })
        }
    })
}

fn claim_text(c: &PathClaim) -> (String, String) {
    match c {
        PathClaim::PoissonIdentically => ("poisson".into(), "0".into()),
        PathClaim::WedgePowerVanishes(m) => (format!("wedge_power({m})"), "0".into()),
        PathClaim::WedgePowerEquals(m, p) => (format!("wedge_power({m})"), print_path(p.coeffs())),
        PathClaim::TangentEquals(z) => ("tangent".into(), mv_text(z)),
        PathClaim::RankCertAt(ts, r) => {
            let at = ts.iter().map(|t| t.to_string()).collect::<Vec<_>>().join(",");
            (format!("rank(t={at})"), vec![r.to_string(); ts.len()].join(","))
        }
    }
}
