//! Infeasible-start primal-dual interior-point method (HKM search direction
//! with a Mehrotra predictor-corrector step).
//!
//! After eliminating equalities the problem is in the form
//! `max b·z  s.t.  C_j - Σ_f z_f A_jf ⪰ 0` (semidefinite blocks) and
//! `c_l - a_l·z >= 0` (scalar rows). The iteration works on that pair and its
//! conic dual `min Σ C_j•X_j + c·x  s.t.  A(X) = b, X ⪰ 0`.

use std::collections::BTreeMap;

use nalgebra::{Cholesky, DMatrix, DVector, SymmetricEigen};

use super::{Relation, SdpOptions, SdpProblem, SdpSolution, SdpStatus, Sense, SparseHermitian};
use crate::error::Result;

/// Full-storage triplets of a real symmetric matrix.
type Triplets = Vec<(usize, usize, f64)>;

const DIVERGENCE: f64 = 1e10;

struct Block {
    n: usize,
    c: DMatrix<f64>,
    terms: Vec<(usize, Triplets)>,
}

struct LpRow {
    c: f64,
    a: Vec<(usize, f64)>,
}

struct Standard {
    b: DVector<f64>,
    blocks: Vec<Block>,
    lp: Vec<LpRow>,
}

/// Every original variable as `constant + Σ coef·z_f` over the free variables.
struct Elimination {
    maps: Vec<(f64, Vec<(usize, f64)>)>,
    num_free: usize,
}

impl Elimination {
    fn lift(&self, z: &[f64]) -> Vec<f64> {
        self.maps
            .iter()
            .map(|(c0, coefs)| c0 + coefs.iter().map(|&(f, a)| a * z[f]).sum::<f64>())
            .collect()
    }

    /// Maps `Σ a_i y_i` to `(constant, dense coefficients over z)`.
    fn affine(&self, coeffs: &[(usize, f64)]) -> (f64, Vec<f64>) {
        let mut c0 = 0.0;
        let mut out = vec![0.0; self.num_free];
        for &(i, a) in coeffs {
            let (k, row) = &self.maps[i];
            c0 += a * k;
            for &(f, t) in row {
                out[f] += a * t;
            }
        }
        (c0, out)
    }
}

/// Reduced row echelon elimination of the equality constraints. Returns
/// `None` when they are inconsistent.
fn eliminate(problem: &SdpProblem) -> Option<Elimination> {
    let m = problem.num_vars();
    let eqs: Vec<_> = problem.scalar_constraints.iter().filter(|c| c.relation == Relation::Eq).collect();
    let mut e = DMatrix::<f64>::zeros(eqs.len(), m + 1);
    for (r, c) in eqs.iter().enumerate() {
        for &(i, a) in &c.coeffs {
            e[(r, i)] += a;
        }
        e[(r, m)] = c.rhs;
    }
    for r in 0..e.nrows() {
        let scale = e.row(r).columns(0, m).amax();
        if scale > 0.0 {
            e.row_mut(r).scale_mut(1.0 / scale);
        }
    }
    let mut pivots: Vec<(usize, usize)> = Vec::new();
    let mut row = 0;
    for col in 0..m {
        if row == e.nrows() {
            break;
        }
        let (best, val) = (row..e.nrows()).map(|r| (r, e[(r, col)].abs())).fold((row, -1.0), |a, b| if b.1 > a.1 { b } else { a });
        if val <= 1e-12 {
            continue;
        }
        e.swap_rows(row, best);
        let p = e[(row, col)];
        e.row_mut(row).scale_mut(1.0 / p);
        for r in 0..e.nrows() {
            if r != row {
                let f = e[(r, col)];
                if f != 0.0 {
                    for k in 0..=m {
                        let v = e[(row, k)];
                        e[(r, k)] -= f * v;
                    }
                }
            }
        }
        pivots.push((row, col));
        row += 1;
    }
    for r in row..e.nrows() {
        if e[(r, m)].abs() > 1e-9 {
            return None;
        }
    }
    let mut is_pivot = vec![None; m];
    for &(r, c) in &pivots {
        is_pivot[c] = Some(r);
    }
    let free: Vec<usize> = (0..m).filter(|&c| is_pivot[c].is_none()).collect();
    let mut maps = Vec::with_capacity(m);
    for var in 0..m {
        match is_pivot[var] {
            None => {
                let f = free.binary_search(&var).unwrap();
                maps.push((0.0, vec![(f, 1.0)]));
            }
            Some(r) => {
                let coefs = free
                    .iter()
                    .enumerate()
                    .filter_map(|(f, &col)| {
                        let a = e[(r, col)];
                        (a != 0.0).then_some((f, -a))
                    })
                    .collect();
                maps.push((e[(r, m)], coefs));
            }
        }
    }
    Some(Elimination { maps, num_free: free.len() })
}

/// Adds `scale · F` (or its real embedding when `complex`) to `out`.
fn embed_into(f: &SparseHermitian, complex: bool, scale: f64, out: &mut DMatrix<f64>) {
    let n = f.dim();
    for &(r, c, v) in f.entries() {
        let mut put = |r: usize, c: usize, re: f64, im: f64| {
            out[(r, c)] += scale * re;
            if complex {
                out[(r + n, c + n)] += scale * re;
                out[(r, c + n)] -= scale * im;
                out[(r + n, c)] += scale * im;
            }
        };
        put(r, c, v.re, v.im);
        if r != c {
            put(c, r, v.re, -v.im);
        }
    }
}

fn sparsify(m: &DMatrix<f64>) -> Triplets {
    let mut t = Vec::new();
    for c in 0..m.ncols() {
        for r in 0..m.nrows() {
            let v = m[(r, c)];
            if v != 0.0 {
                t.push((r, c, v));
            }
        }
    }
    t
}

fn standardize(problem: &SdpProblem, elim: &Elimination) -> Standard {
    let mz = elim.num_free;
    let sign = match problem.sense {
        Sense::Maximize => 1.0,
        Sense::Minimize => -1.0,
    };
    let obj: Vec<(usize, f64)> = problem.objective.iter().enumerate().map(|(i, &c)| (i, sign * c)).collect();
    let (_, b) = elim.affine(&obj);

    let mut lp = Vec::new();
    for con in &problem.scalar_constraints {
        let (a0, a) = elim.affine(&con.coeffs);
        let (c, a): (f64, Vec<f64>) = match con.relation {
            Relation::Eq => continue,
            Relation::Le => (con.rhs - a0, a),
            Relation::Ge => (a0 - con.rhs, a.iter().map(|v| -v).collect()),
        };
        let scale = a.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let scale = if scale > 0.0 { scale } else { 1.0 };
        lp.push(LpRow {
            c: c / scale,
            a: a.iter().enumerate().filter(|(_, v)| **v != 0.0).map(|(f, v)| (f, v / scale)).collect(),
        });
    }

    let mut blocks = Vec::new();
    for lmi in &problem.lmi_blocks {
        let complex = !(lmi.constant.is_real() && lmi.terms.iter().all(|(_, f)| f.is_real()));
        let n = if complex { 2 * lmi.dim } else { lmi.dim };
        let mut c = DMatrix::zeros(n, n);
        embed_into(&lmi.constant, complex, 1.0, &mut c);
        let mut terms: BTreeMap<usize, DMatrix<f64>> = BTreeMap::new();
        for (var, f) in &lmi.terms {
            let (k, row) = &elim.maps[*var];
            if *k != 0.0 {
                embed_into(f, complex, *k, &mut c);
            }
            for &(z, t) in row {
                let a = terms.entry(z).or_insert_with(|| DMatrix::zeros(n, n));
                embed_into(f, complex, -t, a);
            }
        }
        let terms = terms.into_iter().map(|(z, a)| (z, sparsify(&a))).filter(|(_, t)| !t.is_empty()).collect();
        blocks.push(Block { n, c, terms });
    }
    debug_assert_eq!(b.len(), mz);
    Standard {
        b: DVector::from_vec(b),
        blocks,
        lp,
    }
}

fn sparse_dot(a: &Triplets, g: &DMatrix<f64>) -> f64 {
    a.iter().map(|&(r, c, v)| v * g[(r, c)]).sum()
}

/// Largest `α` with `X + α dX ⪰ 0`, or infinity. `None` if `X` is not
/// positive definite.
fn max_step(x: &DMatrix<f64>, dx: &DMatrix<f64>) -> Option<f64> {
    let l = Cholesky::new(x.clone())?.l();
    let t = l.solve_lower_triangular(dx)?;
    let t = l.solve_lower_triangular(&t.transpose())?;
    let t = (&t + t.transpose()) * 0.5;
    let lmin = SymmetricEigen::new(t).eigenvalues.min();
    Some(if lmin >= 0.0 { f64::INFINITY } else { -1.0 / lmin })
}

fn lp_max_step(x: &DVector<f64>, dx: &DVector<f64>) -> f64 {
    x.iter().zip(dx.iter()).filter(|(_, d)| **d < 0.0).map(|(x, d)| -x / d).fold(f64::INFINITY, f64::min)
}

fn sym(m: DMatrix<f64>) -> DMatrix<f64> {
    (&m + m.transpose()) * 0.5
}

struct Iterate {
    x: Vec<DMatrix<f64>>,
    s: Vec<DMatrix<f64>>,
    xl: DVector<f64>,
    sl: DVector<f64>,
    z: DVector<f64>,
}

#[derive(Clone, Copy)]
struct Measures {
    pinf: f64,
    dinf: f64,
    gap: f64,
    pobj: f64,
    dobj: f64,
}

struct Outcome {
    z: DVector<f64>,
    status: SdpStatus,
    iterations: usize,
    measures: Measures,
    message: Option<String>,
}

impl Standard {
    fn m(&self) -> usize {
        self.b.len()
    }

    fn apply_a(&self, x: &[DMatrix<f64>], xl: &DVector<f64>) -> DVector<f64> {
        let mut out = DVector::zeros(self.m());
        for (blk, xj) in self.blocks.iter().zip(x) {
            for (f, a) in &blk.terms {
                out[*f] += sparse_dot(a, xj);
            }
        }
        for (row, x) in self.lp.iter().zip(xl.iter()) {
            for &(f, a) in &row.a {
                out[f] += a * x;
            }
        }
        out
    }

    fn dual_slack(&self, j: usize, z: &DVector<f64>) -> DMatrix<f64> {
        let blk = &self.blocks[j];
        let mut m = blk.c.clone();
        for (f, a) in &blk.terms {
            for &(r, c, v) in a {
                m[(r, c)] -= v * z[*f];
            }
        }
        m
    }

    fn lp_slack(&self, z: &DVector<f64>) -> DVector<f64> {
        DVector::from_iterator(self.lp.len(), self.lp.iter().map(|r| r.c - r.a.iter().map(|&(f, a)| a * z[f]).sum::<f64>()))
    }

    fn norm_c(&self) -> f64 {
        let sq: f64 = self.blocks.iter().map(|b| b.c.norm_squared()).sum::<f64>() + self.lp.iter().map(|r| r.c * r.c).sum::<f64>();
        sq.sqrt()
    }

    fn initial(&self) -> Iterate {
        let m = self.m();
        let mut x = Vec::new();
        let mut s = Vec::new();
        for blk in &self.blocks {
            let rn = (blk.n as f64).sqrt();
            let mut xi = 10.0f64.max(rn);
            let mut eta = 10.0f64.max(rn).max(blk.c.norm());
            for (f, a) in &blk.terms {
                let na = a.iter().map(|t| t.2 * t.2).sum::<f64>().sqrt();
                xi = xi.max(rn * (1.0 + self.b[*f].abs()) / (1.0 + na));
                eta = eta.max(na);
            }
            x.push(DMatrix::identity(blk.n, blk.n) * xi);
            s.push(DMatrix::identity(blk.n, blk.n) * eta);
        }
        let mut xl = DVector::zeros(self.lp.len());
        let mut sl = DVector::zeros(self.lp.len());
        for (l, row) in self.lp.iter().enumerate() {
            let mut xi = 10.0f64;
            let mut eta = 10.0f64.max(row.c.abs());
            for &(f, a) in &row.a {
                xi = xi.max((1.0 + self.b[f].abs()) / (1.0 + a.abs()));
                eta = eta.max(a.abs());
            }
            xl[l] = xi;
            sl[l] = eta;
        }
        Iterate {
            x,
            s,
            xl,
            sl,
            z: DVector::zeros(m),
        }
    }

    fn measures(&self, it: &Iterate, rp: &DVector<f64>, rd: &[DMatrix<f64>], rdl: &DVector<f64>) -> Measures {
        let pobj: f64 = self.blocks.iter().zip(&it.x).map(|(b, x)| b.c.dot(x)).sum::<f64>()
            + self.lp.iter().zip(it.xl.iter()).map(|(r, x)| r.c * x).sum::<f64>();
        let dobj = self.b.dot(&it.z);
        let rd_norm = (rd.iter().map(|m| m.norm_squared()).sum::<f64>() + rdl.norm_squared()).sqrt();
        Measures {
            pinf: rp.norm() / (1.0 + self.b.norm()),
            dinf: rd_norm / (1.0 + self.norm_c()),
            gap: (pobj - dobj).abs() / (1.0 + pobj.abs() + dobj.abs()),
            pobj,
            dobj,
        }
    }

    /// Schur complement `M_fg = Σ_j tr(A_jf X_j A_jg S_j^{-1}) + Σ_l a_lf a_lg x_l / s_l`.
    fn schur(&self, it: &Iterate, sinv: &[DMatrix<f64>]) -> DMatrix<f64> {
        let m = self.m();
        let mut big = DMatrix::zeros(m, m);
        for ((blk, x), zi) in self.blocks.iter().zip(&it.x).zip(sinv) {
            let n = blk.n;
            let t = blk.terms.len();
            let dense: Vec<bool> = blk.terms.iter().map(|(_, a)| a.len() > n).collect();
            let mut local = DMatrix::<f64>::zeros(t, t);
            for g in 0..t {
                let ag = &blk.terms[g].1;
                if dense[g] {
                    let mut xa = DMatrix::<f64>::zeros(n, n);
                    for &(r, c, v) in ag {
                        xa.column_mut(c).axpy(v, &x.column(r), 1.0);
                    }
                    let bg = xa * zi;
                    for f in 0..t {
                        local[(f, g)] = blk.terms[f].1.iter().map(|&(r, c, v)| v * bg[(c, r)]).sum();
                    }
                } else {
                    for f in 0..t {
                        if dense[f] {
                            continue;
                        }
                        let af = &blk.terms[f].1;
                        let mut acc = 0.0;
                        for &(r, c, v) in af {
                            for &(s, tt, w) in ag {
                                acc += v * w * x[(c, s)] * zi[(tt, r)];
                            }
                        }
                        local[(f, g)] = acc;
                    }
                }
            }
            for g in 0..t {
                if !dense[g] {
                    for f in 0..t {
                        if dense[f] {
                            local[(f, g)] = local[(g, f)];
                        }
                    }
                }
            }
            for f in 0..t {
                for g in 0..t {
                    big[(blk.terms[f].0, blk.terms[g].0)] += 0.5 * (local[(f, g)] + local[(g, f)]);
                }
            }
        }
        for (l, row) in self.lp.iter().enumerate() {
            let d = it.xl[l] / it.sl[l];
            for &(f, a) in &row.a {
                for &(g, b) in &row.a {
                    big[(f, g)] += d * a * b;
                }
            }
        }
        big
    }
}

fn factor_schur(m: &DMatrix<f64>) -> Option<Cholesky<f64, nalgebra::Dyn>> {
    if let Some(c) = Cholesky::new(m.clone()) {
        return Some(c);
    }
    let scale = m.diagonal().amax().max(1e-300);
    let mut delta = 1e-14 * scale;
    while delta < 1e-4 * scale {
        let reg = m + DMatrix::identity(m.nrows(), m.ncols()) * delta;
        if let Some(c) = Cholesky::new(reg) {
            return Some(c);
        }
        delta *= 100.0;
    }
    None
}

struct Direction {
    dx: Vec<DMatrix<f64>>,
    ds: Vec<DMatrix<f64>>,
    dxl: DVector<f64>,
    dsl: DVector<f64>,
    dz: DVector<f64>,
}

fn run(std: &Standard, opts: &SdpOptions) -> Outcome {
    let nu = std.blocks.iter().map(|b| b.n).sum::<usize>() + std.lp.len();
    let nu = nu.max(1) as f64;
    let data_scale = 1.0f64.max(std.b.norm()).max(std.norm_c());
    let mut it = std.initial();
    let mut tau = 0.9;
    let mut stalls = 0;
    let mut iter = 0usize;
    let mut best: Option<(f64, DVector<f64>, Measures)> = None;
    // Failures hand back the best iterate seen so far.
    macro_rules! bail {
        ($msg:expr) => {{
            let (score, z, measures) = best.take().expect("at least one iterate is measured");
            return Outcome {
                z,
                status: SdpStatus::NumericalFailure,
                iterations: iter,
                measures,
                message: Some(format!("{} (best residual {score:.3e})", $msg)),
            };
        }};
    }
    loop {
        let rp = &std.b - std.apply_a(&it.x, &it.xl);
        let rd: Vec<DMatrix<f64>> = (0..std.blocks.len()).map(|j| std.dual_slack(j, &it.z) - &it.s[j]).collect();
        let rdl = std.lp_slack(&it.z) - &it.sl;
        let meas = std.measures(&it, &rp, &rd, &rdl);
        let finish = move |it: Iterate, status, msg: Option<String>, meas| Outcome {
            z: it.z,
            status,
            iterations: iter,
            measures: meas,
            message: msg,
        };
        iter += 1;
        log::trace!(
            "it {iter:3}: pobj {:+.8e} dobj {:+.8e} pinf {:.1e} dinf {:.1e} gap {:.1e}",
            meas.pobj,
            meas.dobj,
            meas.pinf,
            meas.dinf,
            meas.gap
        );
        let score = meas.pinf.max(meas.dinf).max(meas.gap);
        if score <= opts.tol {
            return finish(it, SdpStatus::Optimal, None, meas);
        }
        match &best {
            Some((b, _, _)) if *b <= score => {
                if score > 1e3 * b && *b < 1e-4 {
                    bail!("residuals grew away from the best iterate");
                }
            }
            _ => best = Some((score, it.z.clone(), meas)),
        }
        if it.z.norm() > DIVERGENCE * data_scale && meas.dobj > 0.0 {
            return finish(it, SdpStatus::Unbounded, Some("objective diverges along a feasible ray".into()), meas);
        }
        let trace_x: f64 = it.x.iter().map(|x| x.trace()).sum::<f64>() + it.xl.sum();
        if trace_x > DIVERGENCE * data_scale && meas.pobj < 0.0 {
            return finish(it, SdpStatus::Infeasible, Some("multipliers diverge: constraints admit no point".into()), meas);
        }
        if iter > opts.max_iter {
            bail!("iteration limit reached");
        }

        let mu = (it.x.iter().zip(&it.s).map(|(x, s)| x.dot(s)).sum::<f64>() + it.xl.dot(&it.sl)) / nu;
        let mut sinv = Vec::with_capacity(it.s.len());
        for s in &it.s {
            match Cholesky::new(s.clone()) {
                Some(c) => sinv.push(sym(c.inverse())),
                None => bail!("slack matrix lost definiteness"),
            }
        }
        let schur = std.schur(&it, &sinv);
        let Some(chol) = factor_schur(&schur) else {
            bail!("Schur complement is singular");
        };

        // Complementarity target H = σμ S⁻¹ - X [- dXa dSa S⁻¹], so that
        // dX = H - X dS S⁻¹ and the Schur right-hand side uses G = H - X Rd S⁻¹.
        let direction = |sigma_mu: f64, corr: Option<&Direction>| -> Direction {
            let mut h = Vec::with_capacity(std.blocks.len());
            let mut g = Vec::with_capacity(std.blocks.len());
            for j in 0..std.blocks.len() {
                let x = &it.x[j];
                let zi = &sinv[j];
                let mut hj = zi * sigma_mu - x;
                if let Some(c) = corr {
                    hj -= &c.dx[j] * &c.ds[j] * zi;
                }
                g.push(&hj - x * &rd[j] * zi);
                h.push(hj);
            }
            let mut hl = DVector::zeros(std.lp.len());
            for l in 0..std.lp.len() {
                let (x, s) = (it.xl[l], it.sl[l]);
                hl[l] = sigma_mu / s - x;
                if let Some(c) = corr {
                    hl[l] -= c.dxl[l] * c.dsl[l] / s;
                }
            }
            let gl = DVector::from_iterator(std.lp.len(), (0..std.lp.len()).map(|l| hl[l] - it.xl[l] * rdl[l] / it.sl[l]));
            let rhs = &rp - std.apply_a(&g, &gl);
            let mut dz = chol.solve(&rhs);
            for _ in 0..2 {
                let r = &rhs - &schur * &dz;
                dz += chol.solve(&r);
            }
            let mut ds = Vec::with_capacity(std.blocks.len());
            let mut dx = Vec::with_capacity(std.blocks.len());
            for (j, blk) in std.blocks.iter().enumerate() {
                let mut d = rd[j].clone();
                for (f, a) in &blk.terms {
                    for &(r, c, v) in a {
                        d[(r, c)] -= v * dz[*f];
                    }
                }
                dx.push(sym(&h[j] - &it.x[j] * &d * &sinv[j]));
                ds.push(d);
            }
            let dsl = DVector::from_iterator(
                std.lp.len(),
                std.lp.iter().enumerate().map(|(l, r)| rdl[l] - r.a.iter().map(|&(f, a)| a * dz[f]).sum::<f64>()),
            );
            let dxl = DVector::from_iterator(std.lp.len(), (0..std.lp.len()).map(|l| hl[l] - it.xl[l] * dsl[l] / it.sl[l]));
            Direction { dx, ds, dxl, dsl, dz }
        };

        let steps = |d: &Direction| -> Option<(f64, f64)> {
            let mut ap = lp_max_step(&it.xl, &d.dxl);
            let mut ad = lp_max_step(&it.sl, &d.dsl);
            for j in 0..std.blocks.len() {
                ap = ap.min(max_step(&it.x[j], &d.dx[j])?);
                ad = ad.min(max_step(&it.s[j], &d.ds[j])?);
            }
            Some((ap, ad))
        };

        let pred = direction(0.0, None);
        let Some((ap, ad)) = steps(&pred) else {
            bail!("iterate lost definiteness");
        };
        let (ap, ad) = (ap.min(1.0), ad.min(1.0));
        let mut mu_aff = 0.0;
        for j in 0..std.blocks.len() {
            mu_aff += (&it.x[j] + &pred.dx[j] * ap).dot(&(&it.s[j] + &pred.ds[j] * ad));
        }
        mu_aff += (&it.xl + &pred.dxl * ap).dot(&(&it.sl + &pred.dsl * ad));
        mu_aff /= nu;
        let sigma = (mu_aff / mu).clamp(0.0, 1.0).powi(3);

        let corr = direction(sigma * mu, Some(&pred));
        let Some((ap, ad)) = steps(&corr) else {
            bail!("iterate lost definiteness");
        };
        let ap = (tau * ap).min(1.0);
        let ad = (tau * ad).min(1.0);
        tau = 0.9 + 0.09 * ap.min(ad);
        log::trace!("sigma {sigma:.2e} steps {ap:.3e} {ad:.3e}");

        for j in 0..std.blocks.len() {
            it.x[j] += &corr.dx[j] * ap;
            it.s[j] += &corr.ds[j] * ad;
        }
        it.xl += &corr.dxl * ap;
        it.sl += &corr.dsl * ad;
        it.z += &corr.dz * ad;

        if ap.max(ad) < 1e-8 {
            stalls += 1;
            if stalls >= 5 {
                bail!("step lengths collapsed");
            }
        } else {
            stalls = 0;
        }
    }
}

/// Solves `problem` to relative accuracy `opts.tol`.
pub fn solve(problem: &SdpProblem, opts: &SdpOptions) -> Result<SdpSolution> {
    problem.validate()?;
    let Some(elim) = eliminate(problem) else {
        return Ok(SdpSolution {
            values: vec![0.0; problem.num_vars()],
            objective: f64::NAN,
            status: SdpStatus::Infeasible,
            primal_residual: f64::INFINITY,
            dual_residual: 0.0,
            gap: f64::INFINITY,
            iterations: 0,
            message: Some("equality constraints are inconsistent".into()),
        });
    };
    let std = standardize(problem, &elim);
    let out = run(&std, opts);
    let values = elim.lift(out.z.as_slice());
    let objective = problem.objective_value(&values);
    log::debug!(
        "sdp: {:?} after {} iterations (pinf {:.2e}, dinf {:.2e}, gap {:.2e})",
        out.status,
        out.iterations,
        out.measures.pinf,
        out.measures.dinf,
        out.measures.gap
    );
    Ok(SdpSolution {
        values,
        objective,
        status: out.status,
        primal_residual: out.measures.dinf,
        dual_residual: out.measures.pinf,
        gap: out.measures.gap,
        iterations: out.iterations,
        message: out.message,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sdp::{LmiBlock, ScalarConstraint};
    use num_complex::Complex64;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// min x  s.t.  [[x, 1], [1, x]] ⪰ 0  has optimum x = 1.
    #[test]
    fn two_by_two_boundary() {
        let mut p = SdpProblem::new(vec!["x".into()], Sense::Minimize);
        p.objective[0] = 1.0;
        let mut b = LmiBlock::new(2);
        b.constant.add(0, 1, c(1.0, 0.0));
        let mut id = SparseHermitian::zeros(2);
        id.add(0, 0, c(1.0, 0.0));
        id.add(1, 1, c(1.0, 0.0));
        b.add_term(0, id);
        p.lmi_blocks.push(b);
        let s = solve(&p, &SdpOptions::default()).unwrap();
        assert_eq!(s.status, SdpStatus::Optimal);
        assert!((s.values[0] - 1.0).abs() < 1e-7, "{}", s.values[0]);
    }

    /// min x  s.t.  [[x, j], [-j, x]] ⪰ 0 exercises the complex embedding.
    #[test]
    fn complex_boundary() {
        let mut p = SdpProblem::new(vec!["x".into()], Sense::Minimize);
        p.objective[0] = 1.0;
        let mut b = LmiBlock::new(2);
        b.constant.add(0, 1, c(0.0, 2.0));
        let mut id = SparseHermitian::zeros(2);
        id.add(0, 0, c(1.0, 0.0));
        id.add(1, 1, c(1.0, 0.0));
        b.add_term(0, id);
        p.lmi_blocks.push(b);
        let s = solve(&p, &SdpOptions::default()).unwrap();
        assert_eq!(s.status, SdpStatus::Optimal);
        assert!((s.values[0] - 2.0).abs() < 1e-7, "{}", s.values[0]);
    }

    #[test]
    fn equalities_are_eliminated() {
        // max x + y  s.t.  x - y = 1,  x <= 3,  [[2 - y]] ⪰ 0
        let mut p = SdpProblem::new(vec!["x".into(), "y".into()], Sense::Maximize);
        p.objective = vec![1.0, 1.0];
        p.scalar_constraints.push(ScalarConstraint::new(vec![(0, 1.0), (1, -1.0)], Relation::Eq, 1.0));
        p.scalar_constraints.push(ScalarConstraint::new(vec![(0, 1.0)], Relation::Le, 3.0));
        let mut b = LmiBlock::new(1);
        b.constant.add(0, 0, c(2.0, 0.0));
        let mut m = SparseHermitian::zeros(1);
        m.add(0, 0, c(-1.0, 0.0));
        b.add_term(1, m);
        p.lmi_blocks.push(b);
        let s = solve(&p, &SdpOptions::default()).unwrap();
        assert_eq!(s.status, SdpStatus::Optimal);
        assert!((s.values[0] - 3.0).abs() < 1e-7 && (s.values[1] - 2.0).abs() < 1e-7, "{:?}", s.values);
        assert!((s.objective - 5.0).abs() < 1e-7);
    }

    #[test]
    fn inconsistent_equalities() {
        let mut p = SdpProblem::new(vec!["x".into()], Sense::Minimize);
        p.scalar_constraints.push(ScalarConstraint::new(vec![(0, 1.0)], Relation::Eq, 1.0));
        p.scalar_constraints.push(ScalarConstraint::new(vec![(0, 2.0)], Relation::Eq, 3.0));
        assert_eq!(solve(&p, &SdpOptions::default()).unwrap().status, SdpStatus::Infeasible);
    }

    #[test]
    fn detects_infeasible_lmi() {
        // x >= 1 and [[-x]] ⪰ 0 cannot both hold.
        let mut p = SdpProblem::new(vec!["x".into()], Sense::Minimize);
        p.objective[0] = 1.0;
        p.scalar_constraints.push(ScalarConstraint::new(vec![(0, 1.0)], Relation::Ge, 1.0));
        let mut b = LmiBlock::new(1);
        let mut m = SparseHermitian::zeros(1);
        m.add(0, 0, c(-1.0, 0.0));
        b.add_term(0, m);
        p.lmi_blocks.push(b);
        assert_eq!(solve(&p, &SdpOptions::default()).unwrap().status, SdpStatus::Infeasible);
    }

    #[test]
    fn detects_unbounded() {
        // max x  s.t.  [[1 + x]] ⪰ 0
        let mut p = SdpProblem::new(vec!["x".into()], Sense::Maximize);
        p.objective[0] = 1.0;
        let mut b = LmiBlock::new(1);
        b.constant.add(0, 0, c(1.0, 0.0));
        b.add_term(0, SparseHermitian::diagonal_unit(1, 0));
        p.lmi_blocks.push(b);
        assert_eq!(solve(&p, &SdpOptions::default()).unwrap().status, SdpStatus::Unbounded);
    }
}
