//! Subcommand implementations.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};
use structmat::generators::gen_matvec;
use structmat::oracle::{dense_inv, dense_mul, dense_rank, dense_solve_displacement, ORACLE_LIMIT};
use structmat::pade::planted_instance;
use structmat::{
    inv, pade_solve, solve, struct_mul, toeplitz_operator, DenseMatrix, FlavorHint, Fp, Generator,
    InvOutcome, Modulus, PadeOutcome, Poly, PolyFamily, SolveOutcome, SolverConfig,
};

use crate::instance::{
    elem, operator_spec, rows_of, values, CliError, CliResult, FamilySpec, InstanceFile, KindSpec,
    OperatorSpec, PadeFile, PrimeChoice,
};

/// Family flavor requested on the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum FlavorArg {
    General,
    SinglePower,
    Geometric,
}

/// Task of `run` and `bench`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Task {
    Mul,
    Inv,
    Solve,
}

impl Task {
    fn name(self) -> &'static str {
        match self {
            Task::Mul => "mul",
            Task::Inv => "inv",
            Task::Solve => "solve",
        }
    }
}

/// Result tags of `run` and `pade`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Tag {
    Ok,
    Singular,
    NoSolution,
    Failure,
}

/// Parameters of `gen`.
#[derive(Debug, Clone)]
pub struct GenParams {
    pub m: usize,
    pub n: usize,
    pub alpha: usize,
    pub beta: usize,
    pub kind: KindSpec,
    pub p_flavor: FlavorArg,
    pub q_flavor: FlavorArg,
    pub p_phi: u64,
    pub q_phi: u64,
    pub geom_ratio: Option<u64>,
    pub transpose_p: bool,
    pub transpose_q: bool,
    pub seed: u64,
    pub prime: PrimeChoice,
}

fn random_elem<M: Modulus>(rng: &mut ChaCha8Rng) -> Fp<M> {
    Fp::from_canonical(rng.gen_range(0..M::P))
}

fn draw_family<M: Modulus>(
    rng: &mut ChaCha8Rng,
    flavor: FlavorArg,
    m: usize,
    phi: u64,
    ratio: Option<u64>,
) -> CliResult<FamilySpec> {
    Ok(match flavor {
        FlavorArg::SinglePower => FamilySpec::SinglePower {
            degree: m,
            phi: elem::<M>(phi)?.value(),
        },
        FlavorArg::Geometric => {
            let q = match ratio {
                Some(q) => elem::<M>(q)?,
                None => Fp::from_canonical(rng.gen_range(2..M::P)),
            };
            let u = Fp::<M>::from_canonical(rng.gen_range(1..M::P));
            PolyFamily::geometric(u, q, m)
                .map_err(|e| CliError::InfeasibleSpec(format!("geometric family: {e}")))?;
            FamilySpec::Geometric {
                u: u.value(),
                q: q.value(),
                d: m,
            }
        }
        FlavorArg::General => loop {
            let mut polys = Vec::new();
            let mut left = m;
            while left > 0 {
                let d = rng.gen_range(1..=left.min(4));
                let mut c: Vec<Fp<M>> = (0..d).map(|_| random_elem(rng)).collect();
                c.push(Fp::ONE);
                polys.push(Poly::new(c));
                left -= d;
            }
            if PolyFamily::new(polys.clone(), FlavorHint::General).is_ok() {
                break FamilySpec::General {
                    polys: polys.iter().map(|p| values(p.coeffs())).collect(),
                };
            }
        },
    })
}

fn random_rows<M: Modulus>(rng: &mut ChaCha8Rng, r: usize, c: usize) -> Vec<Vec<u64>> {
    (0..r)
        .map(|_| (0..c).map(|_| random_elem::<M>(rng).value()).collect())
        .collect()
}

/// Builds a reproducible random instance with an invertible operator.
pub fn cmd_gen(p: &GenParams) -> CliResult<InstanceFile> {
    match p.prime {
        PrimeChoice::Default => gen_with::<structmat::P998>(p),
        PrimeChoice::P62 => gen_with::<structmat::P62>(p),
    }
}

fn gen_with<M: Modulus>(p: &GenParams) -> CliResult<InstanceFile> {
    if p.m == 0 || p.n == 0 {
        return Err(CliError::BadInput("dimensions must be positive".into()));
    }
    if p.alpha > p.m.min(p.n) {
        return Err(CliError::BadInput(format!(
            "alpha = {} exceeds min(m, n)",
            p.alpha
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    let mut found = None;
    for _ in 0..64 {
        let spec = OperatorSpec {
            kind: p.kind,
            p: draw_family::<M>(&mut rng, p.p_flavor, p.m, p.p_phi, p.geom_ratio)?,
            q: draw_family::<M>(&mut rng, p.q_flavor, p.n, p.q_phi, p.geom_ratio)?,
            transpose_p: p.transpose_p,
            transpose_q: p.transpose_q,
        };
        if crate::instance::operator::<M>(&spec)?.is_invertible() {
            found = Some(spec);
            break;
        }
    }
    let operator = found.ok_or_else(|| {
        CliError::InfeasibleSpec("no invertible operator with these families".into())
    })?;
    let g = random_rows::<M>(&mut rng, p.m, p.alpha);
    let h = random_rows::<M>(&mut rng, p.n, p.alpha);
    let b_matrix = random_rows::<M>(&mut rng, p.n, p.beta);
    let x0: Vec<Fp<M>> = (0..p.n).map(|_| random_elem(&mut rng)).collect();
    let mut inst = InstanceFile {
        prime: p.prime,
        operator,
        g,
        h,
        b_matrix: Some(b_matrix),
        rhs: None,
        last_row: None,
        seed: p.seed,
    };
    let gen = inst.decode::<M>()?.gen;
    inst.rhs = Some(values(&gen_matvec(&gen, &x0)?));
    Ok(inst)
}

/// Report written by `run`.
#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub task: Task,
    pub tag: Tag,
    pub prime: PrimeChoice,
    pub m: usize,
    pub n: usize,
    pub alpha: usize,
    pub seed: u64,
    pub wall_ns: u128,
    /// `None` when the instance exceeds the oracle range or there is nothing to check.
    pub verified: Option<bool>,
    pub result: Value,
}

impl RunReport {
    /// Process exit code: 3 on a Failure tag, 1 on a verification mismatch, 0 otherwise.
    pub fn exit_code(&self) -> i32 {
        if self.verified == Some(false) {
            1
        } else if self.tag == Tag::Failure {
            3
        } else {
            0
        }
    }
}

/// Runs `task` on an instance.
pub fn cmd_run(
    inst: &InstanceFile,
    task: Task,
    verify: bool,
    seed: Option<u64>,
) -> CliResult<RunReport> {
    match inst.prime {
        PrimeChoice::Default => run_with::<structmat::P998>(inst, task, verify, seed),
        PrimeChoice::P62 => run_with::<structmat::P62>(inst, task, verify, seed),
    }
}

fn dense_of<M: Modulus>(gen: &Generator<M>) -> CliResult<Option<DenseMatrix<M>>> {
    if gen.m() * gen.n() > ORACLE_LIMIT {
        return Ok(None);
    }
    Ok(Some(dense_solve_displacement(
        &gen.op,
        &gen.displacement(),
    )?))
}

fn run_with<M: Modulus>(
    inst: &InstanceFile,
    task: Task,
    verify: bool,
    seed: Option<u64>,
) -> CliResult<RunReport> {
    let prob = inst.decode::<M>()?;
    let gen = &prob.gen;
    if !gen.op.is_invertible() {
        return Err(CliError::BadInput(
            "displacement operator is not invertible".into(),
        ));
    }
    let seed = seed.unwrap_or(inst.seed);
    let cfg = SolverConfig::seeded(seed);
    let dense = if verify { dense_of(gen)? } else { None };
    let start = Instant::now();
    let (tag, result, verified) = match task {
        Task::Mul => {
            let b = prob
                .b_matrix
                .as_ref()
                .ok_or_else(|| CliError::BadInput("mul needs a B matrix".into()))?;
            if gen.len() > gen.n() {
                return Err(CliError::BadInput("mul needs alpha <= n".into()));
            }
            let c = struct_mul(gen, b)?;
            let verified = dense.map(|a| dense_mul(&a, b) == c);
            (Tag::Ok, json!({ "matrix": rows_of(&c) }), verified)
        }
        Task::Inv => match inv(gen, &cfg)? {
            InvOutcome::Inverse(ig) => {
                let verified = match &dense {
                    Some(a) => {
                        let ai = dense_solve_displacement(&ig.op, &ig.displacement())?;
                        Some(dense_mul(a, &ai) == DenseMatrix::identity(gen.m()))
                    }
                    None => None,
                };
                let result = json!({ "operator": operator_spec(&ig.op), "g": rows_of(&ig.g), "h": rows_of(&ig.h) });
                (Tag::Ok, result, verified)
            }
            InvOutcome::Singular => (
                Tag::Singular,
                Value::Null,
                dense.map(|a| dense_inv(&a).is_err()),
            ),
            InvOutcome::Failure => (Tag::Failure, Value::Null, None),
        },
        Task::Solve => {
            let b = prob
                .rhs
                .as_ref()
                .ok_or_else(|| CliError::BadInput("solve needs a right-hand side b".into()))?;
            match solve(gen, b, &cfg)? {
                SolveOutcome::Solution(x) => {
                    let verified = dense.map(|a| {
                        let homogeneous_ok = !b.iter().all(|v| v.is_zero())
                            || dense_rank(&a) == gen.n()
                            || x.iter().any(|v| !v.is_zero());
                        a.mul_vec(&x) == *b && homogeneous_ok
                    });
                    (Tag::Ok, json!({ "x": values(&x) }), verified)
                }
                SolveOutcome::NoSolution => (
                    Tag::NoSolution,
                    Value::Null,
                    dense.map(|a| a.solve(b).is_err()),
                ),
                SolveOutcome::Failure => (Tag::Failure, Value::Null, None),
            }
        }
    };
    Ok(RunReport {
        task,
        tag,
        prime: inst.prime,
        m: gen.m(),
        n: gen.n(),
        alpha: gen.len(),
        seed,
        wall_ns: start.elapsed().as_nanos(),
        verified,
        result,
    })
}

/// One benchmark measurement.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, serde::Deserialize)]
pub struct BenchRow {
    pub task: String,
    pub m: usize,
    pub n: usize,
    pub alpha: usize,
    pub beta: usize,
    pub seed: u64,
    pub wall_ns: u128,
    pub verified: Option<bool>,
}

/// Parameters of `bench`.
#[derive(Debug, Clone)]
pub struct BenchParams {
    pub sizes: Vec<usize>,
    pub alphas: Vec<usize>,
    pub beta: usize,
    pub reps: usize,
    pub tasks: Vec<Task>,
    pub baseline: bool,
    pub verify: bool,
    pub seed: u64,
    pub prime: PrimeChoice,
}

/// Times the tasks on square Toeplitz-like instances; rows are sorted by
/// `(task, m, alpha, seed)`.
pub fn cmd_bench(p: &BenchParams) -> CliResult<Vec<BenchRow>> {
    match p.prime {
        PrimeChoice::Default => bench_with::<structmat::P998>(p),
        PrimeChoice::P62 => bench_with::<structmat::P62>(p),
    }
}

fn bench_with<M: Modulus>(p: &BenchParams) -> CliResult<Vec<BenchRow>> {
    let mut rows = Vec::new();
    for &m in &p.sizes {
        for &alpha in &p.alphas {
            if alpha > m {
                return Err(CliError::BadInput(format!(
                    "alpha = {alpha} exceeds m = {m}"
                )));
            }
            for rep in 0..p.reps {
                let seed = p.seed.wrapping_add(rep as u64);
                let mut rng = ChaCha8Rng::seed_from_u64(seed ^ ((m as u64) << 20) ^ alpha as u64);
                let gen = Generator::new(
                    toeplitz_operator::<M>(m, m),
                    DenseMatrix::from_fn(m, alpha, |_, _| random_elem(&mut rng)),
                    DenseMatrix::from_fn(m, alpha, |_, _| random_elem(&mut rng)),
                )?;
                let b = DenseMatrix::from_fn(m, p.beta, |_, _| random_elem(&mut rng));
                let dense = if p.verify { dense_of(&gen)? } else { None };
                let mut row = |task: &str, wall_ns: u128, verified: Option<bool>| {
                    rows.push(BenchRow {
                        task: task.into(),
                        m,
                        n: m,
                        alpha,
                        beta: p.beta,
                        seed,
                        wall_ns,
                        verified,
                    })
                };
                for &task in &p.tasks {
                    let cfg = SolverConfig::seeded(seed);
                    let start = Instant::now();
                    let (wall_ns, verified) = match task {
                        Task::Mul => {
                            let c = struct_mul(&gen, &b)?;
                            (
                                start.elapsed().as_nanos(),
                                dense.as_ref().map(|a| dense_mul(a, &b) == c),
                            )
                        }
                        Task::Inv => {
                            let out = inv(&gen, &cfg)?;
                            let t = start.elapsed().as_nanos();
                            let v = match (&out, &dense) {
                                (InvOutcome::Inverse(ig), Some(a)) => {
                                    let ai = dense_solve_displacement(&ig.op, &ig.displacement())?;
                                    Some(dense_mul(a, &ai) == DenseMatrix::identity(m))
                                }
                                _ => None,
                            };
                            (t, v)
                        }
                        Task::Solve => {
                            let rhs = b.column(0);
                            let out = solve(&gen, &rhs, &cfg)?;
                            let t = start.elapsed().as_nanos();
                            let v = match (&out, &dense) {
                                (SolveOutcome::Solution(x), Some(a)) => Some(a.mul_vec(x) == rhs),
                                _ => None,
                            };
                            (t, v)
                        }
                    };
                    row(task.name(), wall_ns, verified);
                }
                if p.baseline {
                    let start = Instant::now();
                    let cols = b
                        .columns()
                        .iter()
                        .map(|c| gen_matvec(&gen, c))
                        .collect::<structmat::Result<Vec<_>>>()?;
                    let t = start.elapsed().as_nanos();
                    let c = DenseMatrix::from_columns(m, &cols);
                    row(
                        "mul_naive",
                        t,
                        dense.as_ref().map(|a| dense_mul(a, &b) == c),
                    );
                }
            }
        }
    }
    rows.sort_by(|a, b| (&a.task, a.m, a.alpha, a.seed).cmp(&(&b.task, b.m, b.alpha, b.seed)));
    Ok(rows)
}

/// Writes bench rows as CSV.
pub fn write_csv<W: std::io::Write>(rows: &[BenchRow], w: W) -> CliResult<()> {
    let mut wr = csv::Writer::from_writer(w);
    for r in rows {
        wr.serialize(r)?;
    }
    wr.flush()?;
    Ok(())
}

/// Report written by `pade`.
#[derive(Debug, Clone, Serialize)]
pub struct PadeReport {
    pub tag: Tag,
    pub prime: PrimeChoice,
    pub seed: u64,
    pub generator_length: usize,
    pub unknowns: usize,
    pub equations: usize,
    /// Coefficients of `f_1, ..., f_alpha`, low degree first.
    pub f: Option<Vec<Vec<u64>>>,
    pub verified: Option<bool>,
    pub problem: PadeFile,
}

impl PadeReport {
    pub fn exit_code(&self) -> i32 {
        match (self.tag, self.verified) {
            (_, Some(false)) => 1,
            (Tag::Failure, _) => 3,
            _ => 0,
        }
    }
}

/// Source of a Padé problem.
#[derive(Debug, Clone)]
pub enum PadeSource {
    File(PadeFile),
    Planted {
        modulus_degrees: Vec<usize>,
        bounds: Vec<usize>,
        prime: PrimeChoice,
    },
}

pub fn cmd_pade(src: &PadeSource, seed: u64) -> CliResult<PadeReport> {
    let prime = match src {
        PadeSource::File(f) => f.prime,
        PadeSource::Planted { prime, .. } => *prime,
    };
    match prime {
        PrimeChoice::Default => pade_with::<structmat::P998>(src, prime, seed),
        PrimeChoice::P62 => pade_with::<structmat::P62>(src, prime, seed),
    }
}

fn pade_with<M: Modulus>(src: &PadeSource, prime: PrimeChoice, seed: u64) -> CliResult<PadeReport> {
    let problem = match src {
        PadeSource::File(f) => f.decode::<M>()?,
        PadeSource::Planted {
            modulus_degrees,
            bounds,
            ..
        } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            planted_instance::<M, _>(&mut rng, modulus_degrees, bounds)?.0
        }
    };
    let out = pade_solve(&problem, &SolverConfig::seeded(seed))?;
    let (tag, f, verified) = match out {
        PadeOutcome::Solution(f) => {
            let ok = problem.residue_ok(&f)? && f.iter().any(|p| !p.is_zero());
            let coeffs = f
                .iter()
                .zip(&problem.bounds)
                .map(|(p, &nj)| values(&p.to_vec(nj)))
                .collect();
            (Tag::Ok, Some(coeffs), Some(ok))
        }
        PadeOutcome::NoSolution => (Tag::NoSolution, None, None),
        PadeOutcome::Failure => (Tag::Failure, None, None),
    };
    Ok(PadeReport {
        tag,
        prime,
        seed,
        generator_length: problem.bounds.len(),
        unknowns: problem.unknowns(),
        equations: problem.moduli.iter().map(|p| p.len() - 1).sum(),
        f,
        verified,
        problem: PadeFile::encode(prime, &problem),
    })
}
