//! JSON instance files and their conversion to library types.

use std::sync::Arc;

use clap::ValueEnum;
use serde::{Deserialize, Serialize};
use structmat::{
    DenseMatrix, DisplacementOperator, Flavor, FlavorHint, Fp, Generator, Modulus, OperatorKind,
    PadeProblem, Poly, PolyFamily,
};
use thiserror::Error;

/// Errors of the command-line front end; all map to exit code 2.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("bad input: {0}")]
    BadInput(String),
    #[error("infeasible parameters: {0}")]
    InfeasibleSpec(String),
    #[error(transparent)]
    Library(#[from] structmat::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type CliResult<T> = Result<T, CliError>;

/// Field selection.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum, Default)]
#[serde(rename_all = "lowercase")]
pub enum PrimeChoice {
    /// 998244353.
    #[default]
    Default,
    /// 4179340454199820289.
    P62,
}

/// Operator kind as written in instance files.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum KindSpec {
    Sylvester,
    Stein,
}

impl From<KindSpec> for OperatorKind {
    fn from(k: KindSpec) -> Self {
        match k {
            KindSpec::Sylvester => OperatorKind::Sylvester,
            KindSpec::Stein => OperatorKind::Stein,
        }
    }
}

impl From<OperatorKind> for KindSpec {
    fn from(k: OperatorKind) -> Self {
        match k {
            OperatorKind::Sylvester => KindSpec::Sylvester,
            OperatorKind::Stein => KindSpec::Stein,
        }
    }
}

/// A polynomial family, tagged by flavor. Coefficients are listed from low to high degree.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "flavor", rename_all = "snake_case")]
pub enum FamilySpec {
    General { polys: Vec<Vec<u64>> },
    SinglePower { degree: usize, phi: u64 },
    Geometric { u: u64, q: u64, d: usize },
}

/// Displacement operator descriptor.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OperatorSpec {
    pub kind: KindSpec,
    pub p: FamilySpec,
    pub q: FamilySpec,
    pub transpose_p: bool,
    pub transpose_q: bool,
}

/// Problem instance: operator, generator and optional right-hand sides.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceFile {
    pub prime: PrimeChoice,
    pub operator: OperatorSpec,
    /// Rows of `G`.
    pub g: Vec<Vec<u64>>,
    /// Rows of `H`.
    pub h: Vec<Vec<u64>>,
    /// Rows of the dense factor `B` for `mul`.
    #[serde(rename = "B", default, skip_serializing_if = "Option::is_none")]
    pub b_matrix: Option<Vec<Vec<u64>>>,
    /// Right-hand side for `solve`.
    #[serde(rename = "b", default, skip_serializing_if = "Option::is_none")]
    pub rhs: Option<Vec<u64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub last_row: Option<Vec<u64>>,
    pub seed: u64,
}

/// Padé problem file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PadeFile {
    pub prime: PrimeChoice,
    pub moduli: Vec<Vec<u64>>,
    /// `residuals[i][j]` are the coefficients of `R_{i,j}`.
    pub residuals: Vec<Vec<Vec<u64>>>,
    pub bounds: Vec<usize>,
}

/// Decoded instance over a concrete field.
pub struct Problem<M: Modulus> {
    pub gen: Generator<M>,
    pub b_matrix: Option<DenseMatrix<M>>,
    pub rhs: Option<Vec<Fp<M>>>,
}

pub fn elem<M: Modulus>(v: u64) -> CliResult<Fp<M>> {
    if v >= M::P {
        return Err(CliError::BadInput(format!(
            "entry {v} is not reduced modulo {}",
            M::P
        )));
    }
    Ok(Fp::from_canonical(v))
}

pub fn vector<M: Modulus>(v: &[u64]) -> CliResult<Vec<Fp<M>>> {
    v.iter().map(|&x| elem(x)).collect()
}

pub fn poly<M: Modulus>(c: &[u64]) -> CliResult<Poly<M>> {
    Ok(Poly::new(vector(c)?))
}

pub fn matrix<M: Modulus>(rows: &[Vec<u64>], ncols: Option<usize>) -> CliResult<DenseMatrix<M>> {
    let c = ncols.or_else(|| rows.first().map(|r| r.len())).unwrap_or(0);
    let mut data = Vec::with_capacity(rows.len() * c);
    for r in rows {
        if r.len() != c {
            return Err(CliError::BadInput("ragged matrix".into()));
        }
        data.extend(vector::<M>(r)?);
    }
    Ok(DenseMatrix::from_vec(rows.len(), c, data))
}

pub fn rows_of<M: Modulus>(a: &DenseMatrix<M>) -> Vec<Vec<u64>> {
    (0..a.rows())
        .map(|i| a.row(i).iter().map(|x| x.value()).collect())
        .collect()
}

pub fn values<M: Modulus>(v: &[Fp<M>]) -> Vec<u64> {
    v.iter().map(|x| x.value()).collect()
}

pub fn family<M: Modulus>(spec: &FamilySpec) -> CliResult<Arc<PolyFamily<M>>> {
    let fam = match spec {
        FamilySpec::General { polys } => {
            let ps = polys
                .iter()
                .map(|c| poly(c))
                .collect::<CliResult<Vec<_>>>()?;
            PolyFamily::new(ps, FlavorHint::General)?
        }
        FamilySpec::SinglePower { degree, phi } => {
            if *degree == 0 {
                return Err(CliError::BadInput(
                    "single power family needs a positive degree".into(),
                ));
            }
            PolyFamily::single_power(*degree, elem(*phi)?)
        }
        FamilySpec::Geometric { u, q, d } => PolyFamily::geometric(elem(*u)?, elem(*q)?, *d)
            .map_err(|e| CliError::InfeasibleSpec(format!("geometric family: {e}")))?,
    };
    Ok(Arc::new(fam))
}

pub fn family_spec<M: Modulus>(fam: &PolyFamily<M>) -> FamilySpec {
    match fam.flavor() {
        Flavor::SinglePower { phi } => FamilySpec::SinglePower {
            degree: fam.total_degree(),
            phi: phi.value(),
        },
        Flavor::Geometric { u, q } => FamilySpec::Geometric {
            u: u.value(),
            q: q.value(),
            d: fam.len(),
        },
        Flavor::General => FamilySpec::General {
            polys: fam.polys().iter().map(|p| values(p.coeffs())).collect(),
        },
    }
}

pub fn operator<M: Modulus>(spec: &OperatorSpec) -> CliResult<DisplacementOperator<M>> {
    Ok(DisplacementOperator::new(
        spec.kind.into(),
        family(&spec.p)?,
        family(&spec.q)?,
        spec.transpose_p,
        spec.transpose_q,
    ))
}

pub fn operator_spec<M: Modulus>(op: &DisplacementOperator<M>) -> OperatorSpec {
    OperatorSpec {
        kind: op.kind.into(),
        p: family_spec(&op.p),
        q: family_spec(&op.q),
        transpose_p: op.transpose_p,
        transpose_q: op.transpose_q,
    }
}

impl InstanceFile {
    /// Validates the instance and converts it to library types.
    pub fn decode<M: Modulus>(&self) -> CliResult<Problem<M>> {
        let op = operator::<M>(&self.operator)?;
        let alpha = self.g.first().map_or(0, |r| r.len());
        let g = matrix::<M>(&self.g, Some(alpha))?;
        let h = matrix::<M>(&self.h, Some(alpha))?;
        if g.rows() != op.m() || h.rows() != op.n() {
            return Err(CliError::BadInput(format!(
                "generator has {} x {} rows, operator expects {} x {}",
                g.rows(),
                h.rows(),
                op.m(),
                op.n()
            )));
        }
        let mut gen = Generator::new(op, g, h)?;
        if let Some(u) = &self.last_row {
            if u.len() != gen.n() {
                return Err(CliError::BadInput("last_row has the wrong length".into()));
            }
            gen = gen.with_last_row(vector(u)?);
        }
        let b_matrix = match &self.b_matrix {
            Some(rows) => {
                let b = matrix::<M>(rows, None)?;
                if b.rows() != gen.n() {
                    return Err(CliError::BadInput(format!(
                        "B has {} rows, expected {}",
                        b.rows(),
                        gen.n()
                    )));
                }
                Some(b)
            }
            None => None,
        };
        let rhs = match &self.rhs {
            Some(b) if b.len() != gen.m() => {
                return Err(CliError::BadInput(format!(
                    "b has length {}, expected {}",
                    b.len(),
                    gen.m()
                )))
            }
            Some(b) => Some(vector(b)?),
            None => None,
        };
        Ok(Problem { gen, b_matrix, rhs })
    }
}

impl PadeFile {
    pub fn decode<M: Modulus>(&self) -> CliResult<PadeProblem<M>> {
        Ok(PadeProblem {
            moduli: self
                .moduli
                .iter()
                .map(|c| poly(c))
                .collect::<CliResult<_>>()?,
            residuals: self
                .residuals
                .iter()
                .map(|row| row.iter().map(|c| poly(c)).collect::<CliResult<Vec<_>>>())
                .collect::<CliResult<_>>()?,
            bounds: self.bounds.clone(),
        })
    }

    pub fn encode<M: Modulus>(prime: PrimeChoice, p: &PadeProblem<M>) -> Self {
        PadeFile {
            prime,
            moduli: p.moduli.iter().map(|x| values(x.coeffs())).collect(),
            residuals: p
                .residuals
                .iter()
                .map(|row| row.iter().map(|x| values(x.coeffs())).collect())
                .collect(),
            bounds: p.bounds.clone(),
        }
    }
}
