//! Acceptance run: each criterion prints one PASS/FAIL line; the process
//! exits nonzero if any criterion fails.

mod common;

use std::time::{Duration, Instant};

use common::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use structmat::generators::toeplitz_operator;
use structmat::oracle::{dense_apply_operator, dense_inv, dense_rank};
use structmat::pade::planted_instance;
use structmat::structmul::{mul_unbalanced, mulq};
use structmat::{
    gen_matvec, inv, pade_solve, reconstruct_dense, solve, struct_mul, DisplacementOperator,
    InvOutcome, OperatorKind, PadeOutcome, PadeProblem, SolveOutcome, SolverConfig,
};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn reconstruction() -> Outcome {
    let mut r = rng(1);
    let mut bad = 0;
    for i in 0..500 {
        let (kind, tp, tq) = variant(i);
        let (m, n) = (r.gen_range(1..=48), r.gen_range(1..=48));
        let op = random_invertible_op(&mut r, m, n, kind, tp, tq);
        let alpha = r.gen_range(0..=6);
        let gen = random_gen(&mut r, op, alpha);
        let a = reconstruct_dense(&gen).unwrap();
        if dense_apply_operator(&gen.op, &a).unwrap() != gen.displacement() {
            bad += 1;
        }
    }
    outcome(bad == 0, format!("{} of 500 exact", 500 - bad))
}

fn multiplication() -> Outcome {
    let mut r = rng(2);
    let (mut bad, mut stein, mut wide, mut tall) = (0, 0, 0, 0);
    for i in 0..200 {
        let (kind, tp, tq) = variant(i);
        let (m, n) = (r.gen_range(1..=64), r.gen_range(1..=64));
        let op = random_invertible_op(&mut r, m, n, kind, tp, tq);
        let alpha = r.gen_range(1..=8usize.min(n));
        let beta = r.gen_range(1..=8);
        let gen = random_gen(&mut r, op, alpha);
        let b = Mat::random(n, beta, &mut r);
        stein += usize::from(kind == OperatorKind::Stein);
        wide += usize::from(alpha < beta);
        tall += usize::from(beta < alpha);
        if struct_mul(&gen, &b).unwrap() != reconstruct_dense(&gen).unwrap().mul(&b) {
            bad += 1;
        }
    }
    let covered = stein > 0 && wide > 0 && tall > 0;
    outcome(
        bad == 0 && covered,
        format!(
            "{} of 200 exact (stein {stein}, alpha<beta {wide}, beta<alpha {tall})",
            200 - bad
        ),
    )
}

fn polynomial_products() -> Outcome {
    let mut r = rng(3);
    let (mut bad, mut power, mut odd) = (0, 0, 0);
    for i in 0..200 {
        let (m, n) = (r.gen_range(1..=64), r.gen_range(1..=64));
        let alpha = r.gen_range(1..=8usize.min(n));
        let beta = r.gen_range(1..=8);
        let is_power = i % 4 == 0;
        let q = if is_power {
            P::monomial(F::ONE, n)
        } else {
            monic(&mut r, n)
        };
        let u: Vec<P> = (0..alpha).map(|_| poly_of(&mut r, m)).collect();
        let v: Vec<P> = (0..alpha).map(|_| poly_of(&mut r, n)).collect();
        let w: Vec<P> = (0..beta).map(|_| poly_of(&mut r, n)).collect();
        let expect = naive_mulq(&u, &v, &w, &q);
        let mut ok = mulq(&u, &v, &w, m, &q).unwrap() == expect;
        if is_power {
            power += 1;
            ok &= mul_unbalanced(&u, &v, &w, m, n).unwrap() == expect;
        }
        odd += usize::from(!n.is_power_of_two());
        bad += usize::from(!ok);
    }
    outcome(
        bad == 0 && power > 0 && odd > 0,
        format!(
            "{} of 200 exact (Q = x^n {power}, non-power-of-two n {odd})",
            200 - bad
        ),
    )
}

/// Toeplitz-like or Hankel-like operator of size `m x m`.
fn toeplitz_or_hankel(i: usize, m: usize) -> Op {
    if i.is_multiple_of(2) {
        toeplitz_operator(m, m)
    } else {
        DisplacementOperator::binomial(OperatorKind::Sylvester, m, F::ZERO, m, F::ONE, false, false)
    }
}

/// Planted rank-deficient `m x m` matrix with displacement rank at most 4.
fn rank_deficient(r: &mut ChaCha8Rng, i: usize, m: usize) -> Mat {
    if i.is_multiple_of(2) {
        let k = r.gen_range(0..m);
        recurrent_hankel(r, m, m, k)
    } else {
        let k = r.gen_range(0..=2.min(m - 1));
        low_rank(r, m, m, k)
    }
}

fn inversion() -> Outcome {
    let mut r = rng(4);
    let (mut bad, mut failures, mut runs) = (0, 0, 0);
    for i in 0..100 {
        let m = r.gen_range(1..=64);
        let gen = loop {
            let alpha = r.gen_range(1..=4usize.min(m));
            let g = random_gen(&mut r, toeplitz_or_hankel(i, m), alpha);
            if reconstruct_dense(&g).unwrap().rank() == m {
                break g;
            }
        };
        let cfg = SolverConfig::seeded(i as u64);
        runs += 1;
        match inv(&gen, &cfg).unwrap() {
            InvOutcome::Inverse(g) => {
                let a = reconstruct_dense(&gen).unwrap();
                bad += usize::from(reconstruct_dense(&g).unwrap().mul(&a) != Mat::identity(m));
            }
            InvOutcome::Singular => bad += 1,
            InvOutcome::Failure => failures += 1,
        }
    }
    let (mut singular, mut false_inverse, mut sing_failures) = (0, 0, 0);
    for i in 0..50 {
        let m = r.gen_range(2..=64);
        let a = rank_deficient(&mut r, i, m);
        let gen = generator_of(toeplitz_or_hankel(i, m), &a);
        assert!(gen.len() <= 4 && a.rank() < m);
        runs += 1;
        match inv(&gen, &SolverConfig::seeded(1000 + i as u64)).unwrap() {
            InvOutcome::Singular => singular += 1,
            InvOutcome::Inverse(_) => false_inverse += 1,
            InvOutcome::Failure => {
                failures += 1;
                sing_failures += 1;
            }
        }
    }
    let rate = failures as f64 / runs as f64;
    outcome(
        bad == 0 && false_inverse == 0 && singular + sing_failures == 50 && rate < 0.6,
        format!(
            "{bad} wrong inverses, singular {singular} of 50 ({sing_failures} failure tags), \
             {false_inverse} false inverses, failure rate {rate:.3}"
        ),
    )
}

fn random_operator_for_solve(r: &mut ChaCha8Rng, i: usize, m: usize, n: usize) -> Op {
    let (kind, tp, tq) = variant(i);
    random_invertible_op(r, m, n, kind, tp, tq)
}

fn solving() -> Outcome {
    let mut r = rng(5);
    let (mut bad, mut failures, mut runs) = (0, 0, 0);
    let mut run = |gen: &Gen, b: &[F], seed: u64, check: &dyn Fn(&SolveOutcome) -> bool| {
        runs += 1;
        match solve(gen, b, &SolverConfig::seeded(seed)).unwrap() {
            SolveOutcome::Failure => failures += 1,
            out => bad += usize::from(!check(&out)),
        }
    };
    for i in 0..100 {
        let (m, n) = (r.gen_range(1..=48), r.gen_range(1..=48));
        let op = random_operator_for_solve(&mut r, i, m, n);
        let alpha = r.gen_range(1..=4usize.min(m).min(n));
        let gen = random_gen(&mut r, op, alpha);
        let a = reconstruct_dense(&gen).unwrap();
        let b = a.mul_vec(&vec_of(&mut r, n));
        run(
            &gen,
            &b,
            i as u64,
            &|o| matches!(o, SolveOutcome::Solution(x) if a.mul_vec(x) == b),
        );
    }
    for i in 0..50 {
        let m = r.gen_range(2..=48);
        let n = r.gen_range(1..=48);
        let op = random_operator_for_solve(&mut r, i, m, n);
        let a = if i % 2 == 0 {
            {
                let k = r.gen_range(0..m);
                recurrent_hankel(&mut r, m, n, k)
            }
        } else {
            {
                let k = r.gen_range(0..=2.min(m - 1));
                low_rank(&mut r, m, n, k)
            }
        };
        let b = loop {
            let b = vec_of(&mut r, m);
            if Mat::hcat(m, &[&a, &Mat::from_columns(m, std::slice::from_ref(&b))]).rank()
                > a.rank()
            {
                break b;
            }
        };
        let gen = generator_of(op, &a);
        run(&gen, &b, 100 + i as u64, &|o| {
            *o == SolveOutcome::NoSolution
        });
    }
    for i in 0..50 {
        let n = r.gen_range(2..=48);
        let m = r.gen_range(1..=48);
        let op = random_operator_for_solve(&mut r, i, m, n);
        let k = r.gen_range(0..n);
        let a = if i % 2 == 0 {
            recurrent_hankel(&mut r, m, n, k)
        } else {
            low_rank(&mut r, m, n, k.min(2))
        };
        assert!(a.rank() < n);
        let gen = generator_of(op, &a);
        let zero = vec![F::ZERO; m];
        run(
            &gen,
            &zero,
            200 + i as u64,
            &|o| matches!(o, SolveOutcome::Solution(x) if x.iter().any(|c| !c.is_zero()) && a.mul_vec(x) == zero),
        );
    }
    let rate = failures as f64 / runs as f64;
    outcome(
        bad == 0 && rate < 0.6,
        format!(
            "{bad} wrong of {} decided runs, failure rate {rate:.3}",
            runs - failures
        ),
    )
}

fn rank_invariance() -> Outcome {
    let mut r = rng(6);
    let (mut bad, mut stein) = (0, 0);
    for i in 0..100 {
        let (kind, tp, tq) = variant(i);
        let m = r.gen_range(1..=24);
        let op = random_invertible_op(&mut r, m, m, kind, tp, tq);
        let (gen, a) = loop {
            let alpha = r.gen_range(1..=4usize.min(m));
            let gen = random_gen(&mut r, op.clone(), alpha);
            let a = reconstruct_dense(&gen).unwrap();
            if a.rank() == m {
                break (gen, a);
            }
        };
        stein += usize::from(kind == OperatorKind::Stein);
        let lhs = dense_rank(&gen.displacement());
        let rhs = dense_rank(
            &dense_apply_operator(&op.inverse_operator(), &dense_inv(&a).unwrap()).unwrap(),
        );
        bad += usize::from(lhs != rhs);
    }
    outcome(
        bad == 0 && stein > 0 && stein < 100,
        format!("{} of 100 equal (stein {stein})", 100 - bad),
    )
}

fn median(mut v: Vec<Duration>) -> Duration {
    v.sort();
    v[v.len() / 2]
}

fn time_median(reps: usize, mut f: impl FnMut()) -> Duration {
    f();
    median(
        (0..reps)
            .map(|_| {
                let t = Instant::now();
                f();
                t.elapsed()
            })
            .collect(),
    )
}

fn scaling() -> Outcome {
    let mut r = rng(7);
    let (alpha, beta) = (8, 8);
    let mut times = Vec::new();
    let mut naive_4096 = Duration::ZERO;
    for k in 10..=13 {
        let m = 1usize << k;
        let gen = random_gen(&mut r, toeplitz_operator(m, m), alpha);
        let b = Mat::random(m, beta, &mut r);
        times.push(time_median(5, || {
            std::hint::black_box(struct_mul(&gen, &b).unwrap());
        }));
        if k == 12 {
            let cols = b.columns();
            naive_4096 = time_median(5, || {
                for c in &cols {
                    std::hint::black_box(gen_matvec(&gen, c).unwrap());
                }
            });
        }
    }
    let ratios: Vec<f64> = times
        .windows(2)
        .map(|w| w[1].as_secs_f64() / w[0].as_secs_f64())
        .collect();
    let speedup = naive_4096.as_secs_f64() / times[2].as_secs_f64();
    let ms: Vec<String> = times
        .iter()
        .map(|t| format!("{:.1}", t.as_secs_f64() * 1e3))
        .collect();
    let rs: Vec<String> = ratios.iter().map(|x| format!("{x:.2}")).collect();
    outcome(
        ratios.iter().all(|&x| x <= 3.0) && speedup >= 1.5,
        format!(
            "median ms at m = 2^10..2^13: [{}], doubling ratios [{}], speedup over matvec loop at 2^12 {speedup:.2}x",
            ms.join(", "),
            rs.join(", ")
        ),
    )
}

fn crt_layer() -> Outcome {
    let mut r = rng(8);
    let (mut bad, mut max_d) = (0, 0);
    for i in 0..100 {
        let d = r.gen_range(1..=128);
        let fam = match i % 3 {
            0 => structmat::PolyFamily::geometric(
                F::new(r.gen_range(1..1000)),
                F::new(r.gen_range(2..1000)),
                d,
            )
            .unwrap(),
            _ => {
                let degs: Vec<usize> = (0..d).map(|_| r.gen_range(1..=16)).collect();
                family_with_degrees(&mut r, &degs)
            }
        };
        max_d = max_d.max(fam.len());
        let m = fam.total_degree();
        let la = r.gen_range(0..2 * m + 1);
        let a = poly_of(&mut r, la);
        let mut ok = fam.crt(&fam.red(&a)).unwrap() == a.rem(fam.product()).unwrap();
        let parts: Vec<P> = fam
            .polys()
            .iter()
            .map(|p| poly_of(&mut r, p.len() - 1))
            .collect();
        ok &= fam.comb_inv(&fam.comb(&parts).unwrap()) == parts;

        let sm = r.gen_range(1..=32);
        let small = random_family(&mut r, sm);
        let wt = structmat::operators::dense_w(&small).transpose();
        let u = vec_of(&mut r, small.total_degree());
        ok &= small.red_transposed(&u, false) == wt.mul_vec(&u);
        ok &= wt.mul_vec(&small.red_transposed(&u, true)) == u;
        bad += usize::from(!ok);
    }
    outcome(
        bad == 0,
        format!("{} of 100 families pass (largest d = {max_d})", 100 - bad),
    )
}

/// Random family of coprime monic factors with the given degrees.
fn family_with_degrees(
    r: &mut ChaCha8Rng,
    degs: &[usize],
) -> structmat::PolyFamily<structmat::P998> {
    loop {
        let polys = degs.iter().map(|&k| monic(r, k)).collect();
        if let Ok(f) = structmat::PolyFamily::new(polys, structmat::FlavorHint::General) {
            return f;
        }
    }
}

/// `sum_j f_j R_{i,j} mod P_i == 0` for every `i`, by long division.
fn residues_vanish(prob: &PadeProblem<structmat::P998>, f: &[P]) -> bool {
    prob.moduli.iter().zip(&prob.residuals).all(|(p, row)| {
        let s = f
            .iter()
            .zip(row)
            .fold(P::zero(), |acc, (fj, rj)| &acc + &(fj * rj));
        s.divrem(p).unwrap().1.is_zero()
    })
}

fn pade() -> Outcome {
    let (mut bad, mut failures) = (0, 0);
    for seed in 0..20u64 {
        let mut r = rng(900 + seed);
        let d = r.gen_range(1..=2);
        let degs: Vec<usize> = (0..d).map(|_| r.gen_range(1..=64 / d)).collect();
        let alpha = r.gen_range(2..=3);
        let bounds: Vec<usize> = (0..alpha).map(|_| r.gen_range(1..=24)).collect();
        let (prob, _) = planted_instance::<structmat::P998, _>(&mut r, &degs, &bounds).unwrap();
        match pade_solve(&prob, &SolverConfig::seeded(seed)).unwrap() {
            PadeOutcome::Solution(f) => {
                let shaped = f.iter().zip(&prob.bounds).all(|(fj, &nj)| fj.len() <= nj);
                let nonzero = f.iter().any(|p| !p.is_zero());
                bad += usize::from(!(shaped && nonzero && residues_vanish(&prob, &f)));
            }
            PadeOutcome::NoSolution => bad += 1,
            PadeOutcome::Failure => failures += 1,
        }
    }
    outcome(
        bad == 0,
        format!(
            "{} of {} decided runs valid, {failures} failure tags",
            20 - failures - bad,
            20 - failures
        ),
    )
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 9] = [
        ("reconstruction soundness", reconstruction),
        ("multiplication equivalence", multiplication),
        ("mul_rec/mulq oracle equivalence", polynomial_products),
        ("inversion", inversion),
        ("solve", solving),
        ("rank invariance", rank_invariance),
        ("scaling probe", scaling),
        ("crt/poly layer", crt_layer),
        ("pade demo", pade),
    ];
    let mut all = true;
    for (k, (name, f)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let o = f();
        let tag = if o.pass { "PASS" } else { "FAIL" };
        println!(
            "criterion {} {name}: {tag} ({}; {:.1}s)",
            k + 1,
            o.detail,
            t.elapsed().as_secs_f64()
        );
        all &= o.pass;
    }
    if !all {
        std::process::exit(1);
    }
}
