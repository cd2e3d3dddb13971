//! Builders for the two semidefinite programs of the beamforming problem.

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::{LmiBlock, Relation, ScalarConstraint, SdpProblem, Sense, SparseHermitian};
use crate::error::{Error, Result};
use crate::model::ChannelSet;

fn check_targets(channels: &ChannelSet, targets: &[f64], noise: f64) -> Result<()> {
    if targets.len() != channels.num_users() {
        return Err(Error::DimensionMismatch(format!(
            "{} SINR targets for {} users",
            targets.len(),
            channels.num_users()
        )));
    }
    if let Some(t) = targets.iter().find(|t| !(**t > 0.0 && t.is_finite())) {
        return Err(Error::Domain(format!("SINR target must be positive, got {t}")));
    }
    if !(noise > 0.0 && noise.is_finite()) {
        return Err(Error::Domain(format!("noise power must be positive, got {noise}")));
    }
    Ok(())
}

/// Lagrange dual of the sum-power problem.
///
/// Variables are `q[k,n]` at index `k·N + n` (free sign) followed by
/// `alpha[k]` at index `K·N + k`. The problem maximizes `σ² Σ_k α_k` subject
/// to `Σ_n q_kn <= 1`, `α_k >= 0` and, for every user `k`,
/// `diag(q_k) + Σ_{i≠k} α_i g_ik g_ik^H - (α_k/Γ_k) g_kk g_kk^H ⪰ 0`.
pub fn assemble_dual_problem(channels: &ChannelSet, targets: &[f64], noise: f64) -> Result<SdpProblem> {
    check_targets(channels, targets, noise)?;
    let (k_users, n) = (channels.num_users(), channels.units());
    let alpha = |k: usize| k_users * n + k;
    let mut names: Vec<String> = (0..k_users).flat_map(|k| (0..n).map(move |u| format!("q[{k},{u}]"))).collect();
    names.extend((0..k_users).map(|k| format!("alpha[{k}]")));
    let mut p = SdpProblem::new(names, Sense::Maximize);
    for k in 0..k_users {
        p.objective[alpha(k)] = noise;
        p.scalar_constraints.push(ScalarConstraint::new((0..n).map(|u| (k * n + u, 1.0)).collect(), Relation::Le, 1.0));
        p.scalar_constraints.push(ScalarConstraint::new(vec![(alpha(k), 1.0)], Relation::Ge, 0.0));
    }
    for k in 0..k_users {
        let mut block = LmiBlock::new(n);
        for u in 0..n {
            block.add_term(k * n + u, SparseHermitian::diagonal_unit(n, u));
        }
        for i in 0..k_users {
            let g = channels.gain(i, k).as_slice();
            let scale = if i == k { -1.0 / targets[k] } else { 1.0 };
            block.add_term(alpha(i), SparseHermitian::rank_one(g, scale));
        }
        p.lmi_blocks.push(block);
    }
    Ok(p)
}

/// Variable layout of the semidefinite relaxation: each Hermitian `W_k` takes
/// `N²` real parameters (diagonal, then real and imaginary parts of the strict
/// upper triangle in row-major order), followed by the `K` powers.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SdrLayout {
    pub num_users: usize,
    pub units: usize,
}

impl SdrLayout {
    fn base(&self, k: usize) -> usize {
        k * self.units * self.units
    }

    fn pair(&self, r: usize, c: usize) -> usize {
        debug_assert!(r < c);
        let n = self.units;
        r * n - r * (r + 1) / 2 + (c - r - 1)
    }

    pub fn diag(&self, k: usize, n: usize) -> usize {
        self.base(k) + n
    }

    pub fn re(&self, k: usize, r: usize, c: usize) -> usize {
        self.base(k) + self.units + 2 * self.pair(r, c)
    }

    pub fn im(&self, k: usize, r: usize, c: usize) -> usize {
        self.re(k, r, c) + 1
    }

    pub fn power(&self, k: usize) -> usize {
        self.num_users * self.units * self.units + k
    }
}

pub fn sdr_param_count(num_users: usize, units: usize) -> usize {
    num_users * units * units + num_users
}

/// `g^H W g` as sparse coefficients over the parameters of `W_k`.
fn quadratic_form(layout: &SdrLayout, k: usize, g: &[Complex64], scale: f64, out: &mut Vec<(usize, f64)>) {
    let n = layout.units;
    for r in 0..n {
        out.push((layout.diag(k, r), scale * g[r].norm_sqr()));
        for c in r + 1..n {
            let h = g[r].conj() * g[c];
            out.push((layout.re(k, r, c), 2.0 * scale * h.re));
            out.push((layout.im(k, r, c), -2.0 * scale * h.im));
        }
    }
}

/// Semidefinite relaxation of the sum-power problem in `W_k = p_k θ_k θ_k^H`:
/// minimize `Σ p_k` subject to `[W_k]_nn = p_k`, `W_k ⪰ 0` and
/// `g_kk^H W_k g_kk >= Γ_k (Σ_{i≠k} g_ki^H W_i g_ki + σ²)`.
pub fn assemble_sdr_problem(channels: &ChannelSet, targets: &[f64], noise: f64) -> Result<(SdpProblem, SdrLayout)> {
    check_targets(channels, targets, noise)?;
    let layout = SdrLayout {
        num_users: channels.num_users(),
        units: channels.units(),
    };
    let (k_users, n) = (layout.num_users, layout.units);
    let mut names = vec![String::new(); sdr_param_count(k_users, n)];
    for k in 0..k_users {
        for r in 0..n {
            names[layout.diag(k, r)] = format!("W{k}[{r},{r}]");
            for c in r + 1..n {
                names[layout.re(k, r, c)] = format!("ReW{k}[{r},{c}]");
                names[layout.im(k, r, c)] = format!("ImW{k}[{r},{c}]");
            }
        }
        names[layout.power(k)] = format!("p[{k}]");
    }
    let mut p = SdpProblem::new(names, Sense::Minimize);
    for k in 0..k_users {
        p.objective[layout.power(k)] = 1.0;
        for r in 0..n {
            p.scalar_constraints
                .push(ScalarConstraint::new(vec![(layout.diag(k, r), 1.0), (layout.power(k), -1.0)], Relation::Eq, 0.0));
        }
        let mut coeffs = Vec::new();
        quadratic_form(&layout, k, channels.gain(k, k).as_slice(), 1.0, &mut coeffs);
        for i in (0..k_users).filter(|&i| i != k) {
            quadratic_form(&layout, i, channels.gain(k, i).as_slice(), -targets[k], &mut coeffs);
        }
        p.scalar_constraints.push(ScalarConstraint::new(coeffs, Relation::Ge, targets[k] * noise));
    }
    let one = Complex64::new(1.0, 0.0);
    let j = Complex64::new(0.0, 1.0);
    for k in 0..k_users {
        let mut block = LmiBlock::new(n);
        for r in 0..n {
            block.add_term(layout.diag(k, r), SparseHermitian::diagonal_unit(n, r));
            for c in r + 1..n {
                let mut re = SparseHermitian::zeros(n);
                re.add(r, c, one);
                block.add_term(layout.re(k, r, c), re);
                let mut im = SparseHermitian::zeros(n);
                im.add(r, c, j);
                block.add_term(layout.im(k, r, c), im);
            }
        }
        p.lmi_blocks.push(block);
    }
    Ok((p, layout))
}

/// Splits relaxation variables into the matrices `W_k` and powers `p_k`.
pub fn sdr_unpack(layout: &SdrLayout, values: &[f64]) -> (Vec<DMatrix<Complex64>>, Vec<f64>) {
    let n = layout.units;
    let mats = (0..layout.num_users)
        .map(|k| {
            let mut w = DMatrix::zeros(n, n);
            for r in 0..n {
                w[(r, r)] = Complex64::new(values[layout.diag(k, r)], 0.0);
                for c in r + 1..n {
                    let z = Complex64::new(values[layout.re(k, r, c)], values[layout.im(k, r, c)]);
                    w[(r, c)] = z;
                    w[(c, r)] = z.conj();
                }
            }
            w
        })
        .collect();
    let powers = (0..layout.num_users).map(|k| values[layout.power(k)]).collect();
    (mats, powers)
}
