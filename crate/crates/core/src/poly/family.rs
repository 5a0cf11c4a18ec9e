//! Families of monic pairwise coprime polynomials and the maps between
//! `F[x]_m` and `prod F[x]_{m_i}`: multiple reduction, Chinese remaindering,
//! linear recombination, and the transposes used by symmetrized operators.

use std::fmt;
use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::field::{Fp, Modulus, P998};

use super::geom::{self, geom_eval};
use super::{mul_slices, y_apply_with, Poly, Reducer};

/// Flavor requested by the caller; verified at construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FlavorHint {
    General,
    SinglePower,
    Geometric,
}

/// Verified shape of a family, enabling fast paths.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Flavor<M: Modulus> {
    General,
    /// One polynomial `x^m - phi`.
    SinglePower {
        phi: Fp<M>,
    },
    /// `P_i = x - u q^i`.
    Geometric {
        u: Fp<M>,
        q: Fp<M>,
    },
}

#[derive(Clone)]
struct Node<M: Modulus> {
    lo: usize,
    hi: usize,
    deg: usize,
    parent_deg: usize,
    prod: Poly<M>,
    children: Option<(usize, usize)>,
    reducer: Reducer<M>,
}

/// Monic pairwise coprime `P_1, ..., P_d` with subproduct tree and CRT data.
#[derive(Clone)]
pub struct PolyFamily<M: Modulus = P998> {
    polys: Vec<Poly<M>>,
    offsets: Vec<usize>,
    nodes: Vec<Node<M>>,
    root: usize,
    leaf_node: Vec<usize>,
    e: Vec<Poly<M>>,
    f: Vec<Poly<M>>,
    flavor: Flavor<M>,
    rev_inv: OnceLock<Vec<Poly<M>>>,
    node_rev_inv: OnceLock<Vec<Poly<M>>>,
}

impl<M: Modulus> fmt::Debug for PolyFamily<M> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PolyFamily")
            .field("polys", &self.polys)
            .field("flavor", &self.flavor)
            .finish()
    }
}

impl<M: Modulus> PartialEq for PolyFamily<M> {
    fn eq(&self, other: &Self) -> bool {
        self.polys == other.polys
    }
}

impl<M: Modulus> PolyFamily<M> {
    pub fn new(polys: Vec<Poly<M>>, hint: FlavorHint) -> Result<Self> {
        if polys.is_empty() {
            return Err(Error::DimensionMismatch(
                "a family needs at least one polynomial".into(),
            ));
        }
        for (i, p) in polys.iter().enumerate() {
            if !p.is_monic() || p.len() < 2 {
                return Err(Error::NotMonic(i));
            }
        }
        let flavor = detect_flavor(&polys, hint)?;
        let mut offsets = vec![0];
        for p in &polys {
            offsets.push(offsets.last().unwrap() + p.len() - 1);
        }
        let mut fam = PolyFamily {
            polys,
            offsets,
            nodes: Vec::new(),
            root: 0,
            leaf_node: Vec::new(),
            e: Vec::new(),
            f: Vec::new(),
            flavor,
            rev_inv: OnceLock::new(),
            node_rev_inv: OnceLock::new(),
        };
        fam.leaf_node = vec![0; fam.polys.len()];
        let m = fam.total_degree();
        fam.root = fam.build_node(0, fam.polys.len(), 2 * m);
        let d = fam.len();
        if d == 1 {
            fam.e = vec![Poly::one()];
            fam.f = vec![Poly::one()];
            return Ok(fam);
        }
        let ones = vec![Poly::one(); d];
        let pstar = fam.comb_tree(&ones);
        fam.e = fam.red_tree(&pstar);
        let mut f = Vec::with_capacity(d);
        for i in 0..d {
            match fam.e[i].inv_mod(&fam.polys[i]) {
                Some(fi) => f.push(fi),
                None => {
                    let j = (0..d)
                        .find(|&j| j != i && Poly::gcd(&fam.polys[i], &fam.polys[j]).len() > 1)
                        .unwrap_or(i);
                    return Err(Error::NotCoprime(i.min(j), i.max(j)));
                }
            }
        }
        fam.f = f;
        Ok(fam)
    }

    /// Single polynomial `x^m - phi`.
    pub fn single_power(m: usize, phi: Fp<M>) -> Self {
        Self::new(vec![Poly::binomial(m, phi)], FlavorHint::SinglePower).expect("binomial family")
    }

    /// `x - u q^i` for `i < d`.
    pub fn geometric(u: Fp<M>, q: Fp<M>, d: usize) -> Result<Self> {
        geom::check_distinct(u, q, d)?;
        let mut polys = Vec::with_capacity(d);
        let mut pt = u;
        for _ in 0..d {
            polys.push(Poly::new(vec![-pt, Fp::ONE]));
            pt *= q;
        }
        Self::new(polys, FlavorHint::Geometric)
    }

    fn build_node(&mut self, lo: usize, hi: usize, parent_deg: usize) -> usize {
        let deg = self.offsets[hi] - self.offsets[lo];
        let (prod, children) = if hi - lo == 1 {
            (self.polys[lo].clone(), None)
        } else {
            // split so that each side holds about half of the degree
            let target = self.offsets[lo] + deg / 2;
            let mut s = lo + 1;
            let mut best = usize::MAX;
            for c in lo + 1..hi {
                let dist = self.offsets[c].abs_diff(target);
                if dist < best {
                    best = dist;
                    s = c;
                }
            }
            let l = self.build_node(lo, s, deg);
            let r = self.build_node(s, hi, deg);
            let prod = &self.nodes[l].prod * &self.nodes[r].prod;
            (prod, Some((l, r)))
        };
        let reducer = Reducer::new(&prod, parent_deg.max(2 * deg));
        self.nodes.push(Node {
            lo,
            hi,
            deg,
            parent_deg,
            prod,
            children,
            reducer,
        });
        let id = self.nodes.len() - 1;
        if children.is_none() {
            self.leaf_node[lo] = id;
        }
        id
    }

    /// Number of polynomials `d`.
    pub fn len(&self) -> usize {
        self.polys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.polys.is_empty()
    }

    pub fn polys(&self) -> &[Poly<M>] {
        &self.polys
    }

    pub fn degree(&self, i: usize) -> usize {
        self.offsets[i + 1] - self.offsets[i]
    }

    /// Start of block `i` in stacked vectors; `offsets()[d] = m`.
    pub fn offsets(&self) -> &[usize] {
        &self.offsets
    }

    pub fn total_degree(&self) -> usize {
        *self.offsets.last().unwrap()
    }

    pub fn product(&self) -> &Poly<M> {
        &self.nodes[self.root].prod
    }

    pub fn flavor(&self) -> Flavor<M> {
        self.flavor
    }

    pub fn e(&self) -> &[Poly<M>] {
        &self.e
    }

    pub fn f(&self) -> &[Poly<M>] {
        &self.f
    }

    /// Reducer for `P_i`.
    pub fn factor_reducer(&self, i: usize) -> &Reducer<M> {
        &self.nodes[self.leaf_node[i]].reducer
    }

    /// Reducer for the product `P`.
    pub fn product_reducer(&self) -> &Reducer<M> {
        &self.nodes[self.root].reducer
    }

    /// `rev(P_i)^{-1} mod x^{m_i}` for each `i`, computed once.
    pub fn rev_inverses(&self) -> &[Poly<M>] {
        self.rev_inv.get_or_init(|| {
            self.polys
                .iter()
                .map(|p| {
                    let k = p.len() - 1;
                    p.rev(k).unwrap().series_inv(k).unwrap()
                })
                .collect()
        })
    }

    /// Splits a stacked vector into its `d` blocks.
    pub fn split<'a>(&self, v: &'a [Fp<M>]) -> Vec<&'a [Fp<M>]> {
        assert_eq!(v.len(), self.total_degree());
        (0..self.len())
            .map(|i| &v[self.offsets[i]..self.offsets[i + 1]])
            .collect()
    }

    /// Stacks residues, padding block `i` to length `m_i`.
    pub fn stack(&self, parts: &[Poly<M>]) -> Vec<Fp<M>> {
        let mut out = Vec::with_capacity(self.total_degree());
        for (i, p) in parts.iter().enumerate() {
            out.extend(p.to_vec(self.degree(i)));
        }
        out
    }

    /// Blocks of a stacked vector as polynomials.
    pub fn unstack(&self, v: &[Fp<M>]) -> Vec<Poly<M>> {
        self.split(v)
            .into_iter()
            .map(|b| Poly::new(b.to_vec()))
            .collect()
    }

    fn check_parts(&self, parts: &[Poly<M>]) -> Result<()> {
        if parts.len() != self.len() {
            return Err(Error::DimensionMismatch(format!(
                "expected {} parts, got {}",
                self.len(),
                parts.len()
            )));
        }
        for (i, p) in parts.iter().enumerate() {
            if p.len() > self.degree(i) {
                return Err(Error::DimensionMismatch(format!(
                    "part {} has degree >= {}",
                    i,
                    self.degree(i)
                )));
            }
        }
        Ok(())
    }

    /// Multiple reduction: `a mod P_i` for each `i`.
    pub fn red(&self, a: &Poly<M>) -> Vec<Poly<M>> {
        if let Flavor::Geometric { u, q } = self.flavor {
            if self.len() > 1 {
                return geom_eval(u, q, a, self.len())
                    .expect("verified geometric family")
                    .into_iter()
                    .map(Poly::constant)
                    .collect();
            }
        }
        self.red_tree(a)
    }

    fn red_tree(&self, a: &Poly<M>) -> Vec<Poly<M>> {
        let mut out = vec![Poly::zero(); self.len()];
        let r = self.nodes[self.root].reducer.reduce(a.coeffs());
        self.descend(self.root, r, &mut out);
        out
    }

    fn descend(&self, node: usize, r: Poly<M>, out: &mut [Poly<M>]) {
        match self.nodes[node].children {
            None => out[self.nodes[node].lo] = r,
            Some((l, rr)) => {
                let rl = self.nodes[l].reducer.reduce(r.coeffs());
                let rr_ = self.nodes[rr].reducer.reduce(r.coeffs());
                self.descend(l, rl, out);
                self.descend(rr, rr_, out);
            }
        }
    }

    /// Linear recombination `sum_i A_i P / P_i`.
    pub fn comb(&self, parts: &[Poly<M>]) -> Result<Poly<M>> {
        self.check_parts(parts)?;
        if self.len() == 1 {
            return Ok(parts[0].clone());
        }
        if let Flavor::Geometric { u, q } = self.flavor {
            let vals: Vec<Fp<M>> = parts
                .iter()
                .zip(&self.e)
                .map(|(a, e)| a.coeff(0) * e.coeff(0))
                .collect();
            return geom::geom_interp_with_product(u, q, &vals, self.product());
        }
        Ok(self.comb_tree(parts))
    }

    fn comb_tree(&self, parts: &[Poly<M>]) -> Poly<M> {
        self.comb_node(self.root, parts)
    }

    fn comb_node(&self, node: usize, parts: &[Poly<M>]) -> Poly<M> {
        match self.nodes[node].children {
            None => parts[self.nodes[node].lo].clone(),
            Some((l, r)) => {
                let cl = self.comb_node(l, parts);
                let cr = self.comb_node(r, parts);
                &(&cl * &self.nodes[r].prod) + &(&cr * &self.nodes[l].prod)
            }
        }
    }

    /// Inverse of [`comb`](Self::comb): reduction followed by multiplication by `F_i`.
    pub fn comb_inv(&self, a: &Poly<M>) -> Vec<Poly<M>> {
        let res = self.red(a);
        if self.len() == 1 {
            return res;
        }
        res.iter()
            .enumerate()
            .map(|(i, r)| self.mulmod_factor(i, r, &self.f[i]))
            .collect()
    }

    /// Chinese remaindering: the unique `A` of degree `< m` with `A mod P_i = residues_i`.
    pub fn crt(&self, residues: &[Poly<M>]) -> Result<Poly<M>> {
        self.check_parts(residues)?;
        if self.len() == 1 {
            return Ok(residues[0].clone());
        }
        if let Flavor::Geometric { u, q } = self.flavor {
            let vals: Vec<Fp<M>> = residues.iter().map(|r| r.coeff(0)).collect();
            return geom::geom_interp_with_product(u, q, &vals, self.product());
        }
        let scaled: Vec<Poly<M>> = residues
            .iter()
            .enumerate()
            .map(|(i, r)| self.mulmod_factor(i, r, &self.f[i]))
            .collect();
        Ok(self.comb_tree(&scaled))
    }

    /// `a * b mod P_i`.
    pub fn mulmod_factor(&self, i: usize, a: &Poly<M>, b: &Poly<M>) -> Poly<M> {
        let prod = a * b;
        self.factor_reducer(i).reduce(prod.coeffs())
    }

    fn node_rev_inverses(&self) -> &[Poly<M>] {
        self.node_rev_inv.get_or_init(|| {
            self.nodes
                .iter()
                .map(|n| {
                    n.prod
                        .rev(n.deg)
                        .unwrap()
                        .series_inv(n.parent_deg.max(n.deg))
                        .unwrap()
                })
                .collect()
        })
    }

    /// `W_P^t u` (or `W_P^{-t} u` when `inverse`), where `W_P` is the matrix of [`red`](Self::red)
    /// on `F[x]_m` and `u` is a stacked vector of length `m`.
    pub fn red_transposed(&self, u: &[Fp<M>], inverse: bool) -> Vec<Fp<M>> {
        assert_eq!(u.len(), self.total_degree());
        if self.len() == 1 {
            return u.to_vec();
        }
        if inverse {
            let mut leaves = vec![Vec::new(); self.len()];
            self.comb_transposed(self.root, u.to_vec(), &mut leaves);
            let mut out = Vec::with_capacity(u.len());
            let ri = self.rev_inverses();
            for (i, x) in leaves.into_iter().enumerate() {
                out.extend(self.modmul_transposed_factor(i, &self.f[i], &x, &ri[i]));
            }
            return out;
        }
        if let Flavor::Geometric { u: u0, q } = self.flavor {
            let m = self.total_degree();
            let vals = geom_eval(Fp::ONE, q, &Poly::new(u.to_vec()), m)
                .expect("verified geometric family");
            let mut out = Vec::with_capacity(m);
            let mut pw = Fp::ONE;
            for v in vals {
                out.push(v * pw);
                pw *= u0;
            }
            return out;
        }
        self.red_t_node(self.root, u)
    }

    fn red_t_node(&self, node: usize, u: &[Fp<M>]) -> Vec<Fp<M>> {
        let nd = &self.nodes[node];
        match nd.children {
            None => u[self.offsets[nd.lo]..self.offsets[nd.hi]].to_vec(),
            Some((l, r)) => {
                let xl = self.red_t_node(l, u);
                let xr = self.red_t_node(r, u);
                let mut a = self.tred(l, &xl, nd.deg);
                let b = self.tred(r, &xr, nd.deg);
                for (x, y) in a.iter_mut().zip(&b) {
                    *x += *y;
                }
                a
            }
        }
    }

    /// Transposed reduction modulo the product at `node` from `F[x]_n`:
    /// the first `n` terms of the linear recurrent sequence seeded by `x`.
    fn tred(&self, node: usize, x: &[Fp<M>], n: usize) -> Vec<Fp<M>> {
        let nd = &self.nodes[node];
        let a = nd.deg;
        let reva = nd.prod.rev(a).unwrap();
        let num = reva.mul_trunc(&Poly::new(x.to_vec()), a);
        let inv = &self.node_rev_inverses()[node];
        num.mul_trunc(inv, n).to_vec(n)
    }

    fn comb_transposed(&self, node: usize, w: Vec<Fp<M>>, leaves: &mut [Vec<Fp<M>>]) {
        let nd = &self.nodes[node];
        match nd.children {
            None => leaves[nd.lo] = w,
            Some((l, r)) => {
                let xl = middle_product(&self.nodes[r].prod, &w, self.nodes[l].deg);
                let xr = middle_product(&self.nodes[l].prod, &w, self.nodes[r].deg);
                self.comb_transposed(l, xl, leaves);
                self.comb_transposed(r, xr, leaves);
            }
        }
    }

    /// `M_{F,P_i}^t v` through the symmetrizer of `P_i`.
    fn modmul_transposed_factor(
        &self,
        i: usize,
        f: &Poly<M>,
        v: &[Fp<M>],
        rev_inv: &Poly<M>,
    ) -> Vec<Fp<M>> {
        let p = &self.polys[i];
        let yv = y_apply_with(p, v, false, None);
        let w = self.mulmod_factor(i, f, &Poly::new(yv)).to_vec(p.len() - 1);
        y_apply_with(p, &w, true, Some(rev_inv))
    }
}

/// Transpose of multiplication by `b` from `F[x]_a` into `F[x]_{a + deg b}`.
fn middle_product<M: Modulus>(b: &Poly<M>, w: &[Fp<M>], a: usize) -> Vec<Fp<M>> {
    let db = b.len() - 1;
    let revb = b.rev(db).unwrap();
    let prod = mul_slices(revb.coeffs(), w);
    (0..a)
        .map(|i| prod.get(db + i).copied().unwrap_or(Fp::ZERO))
        .collect()
}

fn detect_flavor<M: Modulus>(polys: &[Poly<M>], hint: FlavorHint) -> Result<Flavor<M>> {
    match hint {
        FlavorHint::General => Ok(Flavor::General),
        FlavorHint::SinglePower => {
            if polys.len() != 1 {
                return Err(Error::BadFlavor(
                    "single_power needs exactly one polynomial".into(),
                ));
            }
            match polys[0].as_binomial() {
                Some(phi) => Ok(Flavor::SinglePower { phi }),
                None => Err(Error::BadFlavor(
                    "polynomial is not of the form x^m - phi".into(),
                )),
            }
        }
        FlavorHint::Geometric => {
            if polys.iter().any(|p| p.len() != 2) {
                return Err(Error::BadFlavor("geometric families are linear".into()));
            }
            let roots: Vec<Fp<M>> = polys.iter().map(|p| -p.coeff(0)).collect();
            let u = roots[0];
            let q = if roots.len() == 1 {
                Fp::ONE
            } else {
                match u.inv() {
                    Ok(ui) => roots[1] * ui,
                    Err(_) => {
                        return Err(Error::BadFlavor(
                            "geometric progression starts at zero".into(),
                        ))
                    }
                }
            };
            let mut pt = u;
            for r in &roots {
                if *r != pt {
                    return Err(Error::BadFlavor(
                        "roots are not a geometric progression".into(),
                    ));
                }
                pt *= q;
            }
            geom::check_distinct(u, q, roots.len())?;
            Ok(Flavor::Geometric { u, q })
        }
    }
}
