//! Simultaneous (Hermite-Padé type) approximation: find `f_1, ..., f_alpha`,
//! not all zero, `deg f_j < n_j`, with `sum_j f_j R_{i,j} = 0 mod P_i` for all `i`.
//!
//! The linear map `(f_j) -> (sum_j f_j R_{i,j} mod P_i)_i` has a generator of
//! length `alpha` for the Stein operator `Δ_{M_P, Z_{N,phi}^t}`, `N = sum_j n_j`.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::field::{Fp, Modulus, P998};
use crate::generators::{gen_compress, Generator};
use crate::matrix::DenseMatrix;
use crate::operators::{DisplacementOperator, OperatorKind};
use crate::poly::family::{FlavorHint, PolyFamily};
use crate::poly::Poly;
use crate::structsolve::{solve, SolveOutcome, SolverConfig};

/// Attempts at drawing `phi` before giving up.
const PHI_ATTEMPTS: usize = 64;

/// An approximation problem: moduli `P_i`, residuals `R_{i,j}` and degree bounds `n_j`.
#[derive(Debug, Clone)]
pub struct PadeProblem<M: Modulus = P998> {
    pub moduli: Vec<Poly<M>>,
    /// `residuals[i][j] = R_{i,j}`.
    pub residuals: Vec<Vec<Poly<M>>>,
    pub bounds: Vec<usize>,
}

/// Outcome of [`pade_solve`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PadeOutcome<M: Modulus = P998> {
    /// Polynomials `f_j`, not all zero, satisfying every congruence.
    Solution(Vec<Poly<M>>),
    /// Only the zero tuple satisfies the congruences.
    NoSolution,
    /// The randomized solver did not succeed.
    Failure,
}

impl<M: Modulus> PadeProblem<M> {
    fn validate(&self) -> Result<Arc<PolyFamily<M>>> {
        let alpha = self.bounds.len();
        if alpha == 0 || self.moduli.is_empty() {
            return Err(Error::BadDegreeProfile(
                "need at least one modulus and one unknown".into(),
            ));
        }
        if self.bounds.contains(&0) {
            return Err(Error::BadDegreeProfile(
                "degree bounds must be positive".into(),
            ));
        }
        if self.residuals.len() != self.moduli.len()
            || self.residuals.iter().any(|r| r.len() != alpha)
        {
            return Err(Error::DimensionMismatch(
                "residual table must be d x alpha".into(),
            ));
        }
        Ok(Arc::new(PolyFamily::new(
            self.moduli.clone(),
            FlavorHint::General,
        )?))
    }

    /// Total number of unknown coefficients `N`.
    pub fn unknowns(&self) -> usize {
        self.bounds.iter().sum()
    }

    /// Whether `f` satisfies every congruence (the zero tuple included).
    pub fn residue_ok(&self, f: &[Poly<M>]) -> Result<bool> {
        if f.len() != self.bounds.len() {
            return Ok(false);
        }
        for (p, row) in self.moduli.iter().zip(&self.residuals) {
            let mut acc = Poly::zero();
            for (fj, r) in f.iter().zip(row) {
                acc = &acc + &(fj * r);
            }
            if !acc.rem(p)?.is_zero() {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Dense matrix of the map `(f_j) -> (sum_j f_j R_{i,j} mod P_i)_i`.
    pub fn dense_matrix(&self) -> Result<DenseMatrix<M>> {
        let fam = self.validate()?;
        let mut cols = Vec::with_capacity(self.unknowns());
        for (j, &nj) in self.bounds.iter().enumerate() {
            for k in 0..nj {
                let parts: Vec<Poly<M>> = (0..fam.len())
                    .map(|i| {
                        fam.mulmod_factor(i, &self.residuals[i][j], &Poly::monomial(Fp::ONE, k))
                    })
                    .collect();
                cols.push(fam.stack(&parts));
            }
        }
        Ok(DenseMatrix::from_columns(fam.total_degree(), &cols))
    }
}

/// Generator of the system matrix for `Δ_{M_P, Z_{N,phi}^t}`, of length `alpha`.
pub fn pade_generator<M: Modulus>(problem: &PadeProblem<M>, phi: Fp<M>) -> Result<Generator<M>> {
    let fam = problem.validate()?;
    let (d, alpha, n) = (fam.len(), problem.bounds.len(), problem.unknowns());
    let shifted = |i: usize, j: usize| {
        let xn = Poly::monomial(Fp::ONE, problem.bounds[j]);
        fam.mulmod_factor(i, &problem.residuals[i][j], &xn)
    };
    let mut gcols = Vec::with_capacity(alpha);
    let mut hcols = Vec::with_capacity(alpha);
    let mut offset = 0;
    for j in 0..alpha {
        let parts: Vec<Poly<M>> = (0..d)
            .map(|i| {
                let r = fam
                    .factor_reducer(i)
                    .reduce(problem.residuals[i][j].coeffs());
                let prev = if j == 0 {
                    shifted(i, alpha - 1).scale(phi)
                } else {
                    shifted(i, j - 1)
                };
                &r - &prev
            })
            .collect();
        gcols.push(fam.stack(&parts));
        let mut e = vec![Fp::ZERO; n];
        e[offset] = Fp::ONE;
        hcols.push(e);
        offset += problem.bounds[j];
    }
    let q = Arc::new(PolyFamily::single_power(n, phi));
    let op = DisplacementOperator::basic(OperatorKind::Stein, fam.clone(), q);
    Generator::new(
        op,
        DenseMatrix::from_columns(fam.total_degree(), &gcols),
        DenseMatrix::from_columns(n, &hcols),
    )
}

/// Solves the approximation problem; every returned solution is checked
/// against the congruences before it is reported.
pub fn pade_solve<M: Modulus>(
    problem: &PadeProblem<M>,
    cfg: &SolverConfig<M>,
) -> Result<PadeOutcome<M>> {
    problem.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x7061_6465);
    let gen = (0..PHI_ATTEMPTS)
        .map(|_| pade_generator(problem, Fp::new(rng.gen_range(1..M::P))))
        .find(|g| g.as_ref().map_or(true, |g| g.op.is_invertible()));
    let gen = match gen {
        Some(g) => gen_compress(&g?),
        None => return Ok(PadeOutcome::Failure),
    };
    let m = gen.m();
    let x = match solve(&gen, &vec![Fp::ZERO; m], cfg)? {
        SolveOutcome::Solution(x) => x,
        SolveOutcome::NoSolution => {
            return Err(Error::PreconditionViolated(
                "homogeneous system reported inconsistent".into(),
            ))
        }
        SolveOutcome::Failure => return Ok(PadeOutcome::Failure),
    };
    if x.iter().all(|c| c.is_zero()) {
        return Ok(PadeOutcome::NoSolution);
    }
    let mut f = Vec::with_capacity(problem.bounds.len());
    let mut offset = 0;
    for &nj in &problem.bounds {
        f.push(Poly::new(x[offset..offset + nj].to_vec()));
        offset += nj;
    }
    if problem.residue_ok(&f)? {
        Ok(PadeOutcome::Solution(f))
    } else {
        Ok(PadeOutcome::Failure)
    }
}

/// Random planted instance: random coprime moduli of the given degrees, random
/// `f_j` with `deg f_j < n_j`, and residuals satisfying the congruences.
pub fn planted_instance<M: Modulus, R: Rng + ?Sized>(
    rng: &mut R,
    modulus_degrees: &[usize],
    bounds: &[usize],
) -> Result<(PadeProblem<M>, Vec<Poly<M>>)> {
    let alpha = bounds.len();
    if alpha < 2 {
        return Err(Error::BadDegreeProfile(
            "planted instances need at least two unknowns".into(),
        ));
    }
    if bounds.contains(&0) || modulus_degrees.is_empty() || modulus_degrees.contains(&0) {
        return Err(Error::BadDegreeProfile(
            "degrees and bounds must be positive".into(),
        ));
    }
    let moduli = loop {
        let moduli: Vec<Poly<M>> = modulus_degrees
            .iter()
            .map(|&k| {
                let mut c: Vec<Fp<M>> = (0..k).map(|_| Fp::new(rng.gen_range(0..M::P))).collect();
                c.push(Fp::ONE);
                Poly::new(c)
            })
            .collect();
        if PolyFamily::new(moduli.clone(), FlavorHint::General).is_ok() {
            break moduli;
        }
    };
    let f: Vec<Poly<M>> = bounds
        .iter()
        .map(|&nj| {
            let mut c: Vec<Fp<M>> = (0..nj).map(|_| Fp::new(rng.gen_range(0..M::P))).collect();
            c[0] = Fp::ONE;
            Poly::new(c)
        })
        .collect();
    let mut residuals = Vec::with_capacity(moduli.len());
    for p in &moduli {
        // R_j random for j >= 1, then R_0 = -f_0^{-1} sum_{j >= 1} f_j R_j mod P
        let mut row: Vec<Poly<M>> = (0..alpha)
            .map(|_| {
                Poly::new(
                    (0..p.len() - 1)
                        .map(|_| Fp::new(rng.gen_range(0..M::P)))
                        .collect(),
                )
            })
            .collect();
        let mut acc = Poly::zero();
        for j in 1..alpha {
            acc = &acc + &(&f[j] * &row[j]);
        }
        let inv = match f[0].inv_mod(p) {
            Some(inv) => inv,
            None => return planted_instance(rng, modulus_degrees, bounds),
        };
        row[0] = (&acc * &inv).rem(p)?.scale(-Fp::ONE);
        residuals.push(row);
    }
    Ok((
        PadeProblem {
            moduli,
            residuals,
            bounds: bounds.to_vec(),
        },
        f,
    ))
}
