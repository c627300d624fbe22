//! Numerical evaluation of Fliess operators: iterated integrals, closed loops, and
//! generating series of control-affine state-space models.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::Zero;

use crate::error::{FpaError, Result};
use crate::series::{q_to_f64, qr, CommSeries, Monomial, NCSeries, Terms, Q};
use crate::taylor::{Expr, TaylorPoly};
use crate::word::{enumerate_words_upto, Word};

/// Uniformly sampled input channels `u_1..u_m` on `t_k = k·dt`, `k = 0..len`.
#[derive(Clone, Debug)]
pub struct SignalGrid {
    pub dt: f64,
    pub channels: Vec<Vec<f64>>,
}

impl SignalGrid {
    pub fn len(&self) -> usize {
        self.channels.first().map_or(0, |c| c.len())
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn times(&self) -> Vec<f64> {
        (0..self.len()).map(|k| k as f64 * self.dt).collect()
    }

    /// `u_i(t_k)` with `u_0 = 1`.
    fn u(&self, i: usize, k: usize) -> f64 {
        if i == 0 {
            1.0
        } else {
            self.channels[i - 1][k]
        }
    }

    fn interp(&self, i: usize, t: f64) -> f64 {
        let s = t / self.dt;
        let k = (s.floor() as usize).min(self.len() - 1);
        if k + 1 >= self.len() {
            return self.channels[i][k];
        }
        let f = s - k as f64;
        self.channels[i][k] * (1.0 - f) + self.channels[i][k + 1] * f
    }

    pub fn sample(signals: &[InputSignal], t_end: f64, dt: f64) -> SignalGrid {
        let n = grid_len(t_end, dt);
        SignalGrid { dt, channels: signals.iter().map(|s| (0..n).map(|k| s.eval(k as f64 * dt)).collect()).collect() }
    }
}

/// Number of samples covering `[0, t_end]`.
pub fn grid_len(t_end: f64, dt: f64) -> usize {
    (t_end / dt + 1e-9).floor() as usize + 1
}

#[derive(Clone, Debug, PartialEq)]
pub enum InputSignal {
    Const(f64),
    /// `before` until `at`, then `after`.
    Step {
        at: f64,
        before: f64,
        after: f64,
    },
    /// `amp · sin(freq · t + phase)`.
    Sin {
        amp: f64,
        freq: f64,
        phase: f64,
    },
    /// Coefficients in increasing powers of `t`.
    Poly(Vec<f64>),
    Samples(Vec<f64>),
}

impl InputSignal {
    pub fn eval(&self, t: f64) -> f64 {
        match self {
            InputSignal::Const(a) => *a,
            InputSignal::Step { at, before, after } => {
                if t < *at {
                    *before
                } else {
                    *after
                }
            }
            InputSignal::Sin { amp, freq, phase } => amp * (freq * t + phase).sin(),
            InputSignal::Poly(c) => c.iter().rev().fold(0.0, |acc, a| acc * t + a),
            InputSignal::Samples(_) => panic!("sampled signals have no continuous-time value"),
        }
    }
}

/// Iterated integrals `E_η[u](t_k)` for a suffix-closed set of words.
#[derive(Clone, Debug)]
pub struct ChenIntegrals {
    pub values: BTreeMap<Word, Vec<f64>>,
}

fn suffix_closure<'a, I: IntoIterator<Item = &'a Word>>(words: I) -> BTreeSet<Word> {
    let mut out = BTreeSet::new();
    for w in words {
        for s in 0..=w.len() {
            out.insert(Word::from(&w.letters()[s..]));
        }
    }
    out
}

impl ChenIntegrals {
    /// Trapezoidal quadrature of `E_{x_i η}(t) = ∫_0^t u_i(τ) E_η(τ) dτ` on the grid.
    pub fn for_words<'a, I: IntoIterator<Item = &'a Word>>(u: &SignalGrid, words: I) -> Result<ChenIntegrals> {
        let n = u.len();
        let mut values: BTreeMap<Word, Vec<f64>> = BTreeMap::new();
        for w in suffix_closure(words) {
            if w.is_empty() {
                values.insert(w, vec![1.0; n]);
                continue;
            }
            let i = w.letters()[0] as usize;
            if i > u.channels.len() {
                return Err(FpaError::ShapeMismatch(format!("word {w} uses input x{i} but only {} channels given", u.channels.len())));
            }
            let inner = &values[&Word::from(&w.letters()[1..])];
            let mut e = vec![0.0; n];
            for k in 1..n {
                e[k] = e[k - 1] + 0.5 * u.dt * (u.u(i, k - 1) * inner[k - 1] + u.u(i, k) * inner[k]);
            }
            values.insert(w, e);
        }
        Ok(ChenIntegrals { values })
    }

    /// All words of length `≤ maxdeg` over `x0..x_m`, `m` the channel count.
    pub fn all(u: &SignalGrid, maxdeg: usize) -> Result<ChenIntegrals> {
        let words = enumerate_words_upto(u.channels.len(), maxdeg);
        Self::for_words(u, &words)
    }
}

/// `F_c[u](t_k) = Σ (c,η) E_η[u](t_k)`, one row per output.
pub fn fliess_eval(c: &NCSeries, u: &SignalGrid) -> Result<Vec<Vec<f64>>> {
    if u.channels.len() != c.m() {
        return Err(FpaError::ShapeMismatch(format!("{} input channels for a series with {} inputs", u.channels.len(), c.m())));
    }
    let chen = ChenIntegrals::for_words(u, &c.support())?;
    Ok((0..c.ell())
        .map(|i| {
            let mut y = vec![0.0; u.len()];
            for (w, a) in c.terms(i) {
                let a = q_to_f64(a);
                for (yk, ek) in y.iter_mut().zip(&chen.values[w]) {
                    *yk += a * ek;
                }
            }
            y
        })
        .collect())
}

/// `f_d(z)` for the truncated static map `d`.
pub fn static_eval(d: &CommSeries, z: &[f64]) -> Vec<f64> {
    (0..d.ncomps())
        .map(|i| d.terms(i).iter().map(|(k, a)| q_to_f64(a) * k.0.iter().zip(z).map(|(&e, &x)| x.powi(e as i32)).product::<f64>()).sum())
        .collect()
}

/// Control-affine model `ẋ = g_0(x) + Σ g_i(x) u_i`, `y = h(x)`, `x(0) = x0`.
#[derive(Clone, Debug)]
pub struct StateSpaceModel {
    /// `fields[i][j]` is component `j` of `g_i`.
    pub fields: Vec<Vec<Expr>>,
    pub output: Vec<Expr>,
    pub x0: Vec<Q>,
}

impl StateSpaceModel {
    pub fn dim(&self) -> usize {
        self.x0.len()
    }

    pub fn inputs(&self) -> usize {
        self.fields.len() - 1
    }

    pub fn outputs(&self) -> usize {
        self.output.len()
    }

    fn rhs(&self, x: &[f64], u: &[f64]) -> Vec<f64> {
        let mut dx: Vec<f64> = self.fields[0].iter().map(|e| e.eval(x)).collect();
        for (i, ui) in u.iter().enumerate() {
            for (d, e) in dx.iter_mut().zip(&self.fields[i + 1]) {
                *d += ui * e.eval(x);
            }
        }
        dx
    }

    pub fn h(&self, x: &[f64]) -> Vec<f64> {
        self.output.iter().map(|e| e.eval(x)).collect()
    }

    /// `θ̈ + sin θ = u`, `y = θ`, `θ(0) = 0`, `θ̇(0) = 1`.
    pub fn pendulum() -> Self {
        StateSpaceModel {
            fields: vec![vec![Expr::Var(1), Expr::Neg(Box::new(Expr::Sin(Box::new(Expr::Var(0)))))], vec![Expr::c(0), Expr::c(1)]],
            output: vec![Expr::Var(0)],
            x0: vec![Q::zero(), qr(1, 1)],
        }
    }
}

/// Generating series by iterated Lie derivatives:
/// `(c, x_{i_1}⋯x_{i_k}) = L_{g_{i_k}}⋯L_{g_{i_1}} h (x0)`.
pub fn series_from_statespace(model: &StateSpaceModel, n: usize) -> Result<NCSeries> {
    let dim = model.dim();
    let m = model.inputs();
    let fields: Vec<Vec<TaylorPoly>> =
        model.fields.iter().map(|g| g.iter().map(|e| e.taylor(&model.x0, n)).collect::<Result<Vec<_>>>()).collect::<Result<_>>()?;
    let mut comps = Vec::with_capacity(model.outputs());
    for out in &model.output {
        let mut terms = Terms::new();
        let mut level: Vec<(Word, TaylorPoly)> = vec![(Word::empty(), out.taylor(&model.x0, n)?)];
        for len in 0..=n {
            let mut next = Vec::new();
            for (w, p) in &level {
                let v = p.value_at_origin();
                if !v.is_zero() {
                    terms.insert(w.clone(), v);
                }
                if len == n {
                    continue;
                }
                let grads: Vec<TaylorPoly> = (0..dim).map(|j| p.derivative(j)).collect();
                for (i, g) in fields.iter().enumerate().take(m + 1) {
                    let mut lie = TaylorPoly::zero(dim, p.degree().saturating_sub(1));
                    for (gj, dj) in g.iter().zip(&grads) {
                        lie = lie.add(&gj.mul(dj));
                    }
                    let mut wl = w.letters().to_vec();
                    wl.push(i as u8);
                    next.push((Word(wl), lie));
                }
            }
            level = next;
        }
        comps.push(terms);
    }
    Ok(NCSeries::from_raw(m, n, comps))
}

/// `x̃ - x̃³/3! + x̃⁵/5! - …` through the given odd degree, flagged as a truncated series.
pub fn sine_series(degree: usize) -> CommSeries {
    let mut d = CommSeries::zero(1, 1, degree, false);
    let mut fact = num_bigint::BigInt::from(1);
    for k in 1..=degree {
        fact *= k;
        if k % 2 == 1 {
            let sign = if k % 4 == 1 { 1 } else { -1 };
            d.add_coeff(Monomial(vec![k as u32]), 0, Q::new(sign.into(), fact.clone())).unwrap();
        }
    }
    d
}

/// Plant in a closed loop: a state-space model or a generating series.
#[derive(Clone, Debug)]
pub enum Plant {
    Model(StateSpaceModel),
    Series(NCSeries),
}

pub const LOOP_MAX_ITER: usize = 50;
pub const LOOP_TOL: f64 = 1e-12;

/// Output of `y = F[v + f_d(y)]` on the grid of `v`.
pub fn closed_loop_sim(plant: &Plant, d: &CommSeries, v: &SignalGrid) -> Result<Vec<Vec<f64>>> {
    match plant {
        Plant::Model(model) => closed_loop_model(model, d, v),
        Plant::Series(c) => closed_loop_series(c, d, v),
    }
}

fn check_loop(ell: usize, m: usize, d: &CommSeries, v: &SignalGrid) -> Result<()> {
    if d.nvars() != ell || d.ncomps() != m || v.channels.len() != m {
        return Err(FpaError::ShapeMismatch("feedback map, plant, and input channels disagree in size".into()));
    }
    if v.is_empty() {
        return Err(FpaError::Domain("empty input grid".into()));
    }
    Ok(())
}

fn closed_loop_model(model: &StateSpaceModel, d: &CommSeries, v: &SignalGrid) -> Result<Vec<Vec<f64>>> {
    check_loop(model.outputs(), model.inputs(), d, v)?;
    let m = model.inputs();
    let input = |x: &[f64], t: f64| -> Vec<f64> {
        let fb = static_eval(d, &model.h(x));
        (0..m).map(|i| v.interp(i, t) + fb[i]).collect()
    };
    let f = |x: &[f64], t: f64| model.rhs(x, &input(x, t));
    let mut x: Vec<f64> = model.x0.iter().map(q_to_f64).collect();
    let mut ys: Vec<Vec<f64>> = vec![Vec::with_capacity(v.len()); model.outputs()];
    let dt = v.dt;
    for k in 0..v.len() {
        for (row, y) in ys.iter_mut().zip(model.h(&x)) {
            row.push(y);
        }
        if k + 1 == v.len() {
            break;
        }
        let t = k as f64 * dt;
        let axpy = |a: &[f64], s: f64, b: &[f64]| -> Vec<f64> { a.iter().zip(b).map(|(p, q)| p + s * q).collect() };
        let k1 = f(&x, t);
        let k2 = f(&axpy(&x, dt / 2.0, &k1), t + dt / 2.0);
        let k3 = f(&axpy(&x, dt / 2.0, &k2), t + dt / 2.0);
        let k4 = f(&axpy(&x, dt, &k3), t + dt);
        for j in 0..x.len() {
            x[j] += dt / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
        }
    }
    Ok(ys)
}

fn closed_loop_series(c: &NCSeries, d: &CommSeries, v: &SignalGrid) -> Result<Vec<Vec<f64>>> {
    check_loop(c.ell(), c.m(), d, v)?;
    let m = c.m();
    // suffix-closed words in increasing length, so inner integrals update first
    let words: Vec<Word> = suffix_closure(&c.support()).into_iter().collect();
    let index: BTreeMap<&Word, usize> = words.iter().enumerate().map(|(k, w)| (w, k)).collect();
    let plan: Vec<Option<(usize, usize)>> =
        words.iter().map(|w| if w.is_empty() { None } else { Some((w.letters()[0] as usize, index[&Word::from(&w.letters()[1..])])) }).collect();
    let coeffs: Vec<Vec<(usize, f64)>> = (0..c.ell()).map(|i| c.terms(i).iter().map(|(w, a)| (index[w], q_to_f64(a))).collect()).collect();
    let output = |e: &[f64]| -> Vec<f64> { coeffs.iter().map(|row| row.iter().map(|&(k, a)| a * e[k]).sum()).collect() };
    let effective = |y: &[f64], k: usize| -> Vec<f64> {
        let fb = static_eval(d, y);
        (0..m).map(|i| v.channels[i][k] + fb[i]).collect()
    };
    let u_of = |w: &[f64], i: usize| if i == 0 { 1.0 } else { w[i - 1] };

    let mut e_prev: Vec<f64> = words.iter().map(|w| if w.is_empty() { 1.0 } else { 0.0 }).collect();
    let mut y = output(&e_prev);
    let mut w_prev = effective(&y, 0);
    let mut ys: Vec<Vec<f64>> = y.iter().map(|&v0| vec![v0]).collect();
    let half = 0.5 * v.dt;
    for k in 1..v.len() {
        let mut w_cur = w_prev.clone();
        let mut e = e_prev.clone();
        let mut converged = false;
        for _ in 0..LOOP_MAX_ITER {
            for (j, p) in plan.iter().enumerate() {
                if let Some((i, inner)) = *p {
                    e[j] = e_prev[j] + half * (u_of(&w_prev, i) * e_prev[inner] + u_of(&w_cur, i) * e[inner]);
                }
            }
            y = output(&e);
            let w_new = effective(&y, k);
            let diff = w_new.iter().zip(&w_cur).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            w_cur = w_new;
            if diff <= LOOP_TOL * (1.0 + w_cur.iter().map(|a| a.abs()).fold(0.0, f64::max)) {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(FpaError::NoConvergence { iterations: LOOP_MAX_ITER });
        }
        for (row, yi) in ys.iter_mut().zip(&y) {
            row.push(*yi);
        }
        e_prev = e;
        w_prev = w_cur;
    }
    Ok(ys)
}

/// Ratios `err(T) / err(T/2)` along `T, T/2, T/4, …`.
pub fn halving_ratios<F: FnMut(f64) -> f64>(mut err: F, t: f64, halvings: usize) -> Vec<(f64, f64)> {
    let errs: Vec<(f64, f64)> = (0..=halvings)
        .map(|h| {
            let th = t / 2f64.powi(h as i32);
            (th, err(th))
        })
        .collect();
    errs.windows(2).map(|p| (p[0].0, p[0].1 / p[1].1)).collect()
}
