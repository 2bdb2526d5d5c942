//! Hitting times of bounded fair random walks.
//!
//! These are the walks a single conflict performs while RLS pushes it along
//! a path: state 0 means the conflict is resolved, and a vertex of degree
//! three or more acts as a reflecting barrier. The module provides the
//! closed forms, an exact first-step linear solve, and Monte Carlo
//! estimates for one walk and for the minimum over `η` walks run in
//! lockstep (one step of every walk per generation, as in the island model).
//!
//! # Reflection conventions
//!
//! How the reflecting end is modelled changes the expected absorption time
//! from `x0`:
//!
//! | convention | top behaviour | `E[T0 | x0]` (p = 1) |
//! |---|---|---|
//! | [`Reflection::Barrier`] | a step from `k-1` up to `k` is rejected | `x0 (2k - x0 - 1)` |
//! | [`Reflection::Bounce`]  | `k` is occupied, leaves to `k-1` surely | `x0 (2k - x0)` |
//! | [`Reflection::Sticky`]  | `k` is occupied, leaves to `k-1` w.p. 1/2 | `x0 (2k - x0 + 1)` |
//!
//! `Barrier` is the default: it is what tailored RLS does at a vertex of
//! degree ≥ 3 (the flip is rejected and the conflict stays put), and it is
//! the convention under which `x0 (2k - x0 - 1)` is exact. Under `Barrier`,
//! state `k` is never occupied; a walk started at `k` is treated as
//! standing at `k - 1`.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest `k` accepted by [`exact_hitting_times`].
pub const EXACT_LIMIT: usize = 10_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Boundary {
    /// 0 absorbs, `k` reflects.
    AbsorbZeroReflectK,
    /// Both 0 and `k` absorb.
    AbsorbBoth,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Reflection {
    #[default]
    Barrier,
    Bounce,
    Sticky,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RandomWalkSpec {
    pub k: usize,
    pub x0: usize,
    /// Probability that a step moves at all; `1 - p` is the self-loop.
    pub p: f64,
    pub boundary: Boundary,
    pub reflection: Reflection,
}

impl RandomWalkSpec {
    pub fn reflecting(k: usize, x0: usize, p: f64) -> Self {
        RandomWalkSpec {
            k,
            x0,
            p,
            boundary: Boundary::AbsorbZeroReflectK,
            reflection: Reflection::Barrier,
        }
    }

    pub fn two_sided(k: usize, x0: usize, p: f64) -> Self {
        RandomWalkSpec {
            k,
            x0,
            p,
            boundary: Boundary::AbsorbBoth,
            reflection: Reflection::Barrier,
        }
    }

    pub fn with_reflection(mut self, reflection: Reflection) -> Self {
        self.reflection = reflection;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(Error::InvalidParameters("walk needs k >= 1".into()));
        }
        if self.x0 > self.k {
            return Err(Error::InvalidParameters(format!(
                "start state {} outside [0, {}]",
                self.x0, self.k
            )));
        }
        if !(self.p > 0.0 && self.p <= 1.0) {
            return Err(Error::InvalidParameters(format!("p = {} outside (0, 1]", self.p)));
        }
        Ok(())
    }
}

/// `x0 (2k - x0 - 1) / p`: expected absorption time at 0 with a reflecting
/// barrier at `k`.
pub fn expected_absorption_closed_form(spec: &RandomWalkSpec) -> Result<f64> {
    spec.validate()?;
    if spec.boundary != Boundary::AbsorbZeroReflectK {
        return Err(Error::InvalidParameters("closed form needs AbsorbZeroReflectK".into()));
    }
    // a start on the barrier counts as a start at k - 1
    let x = spec.x0.min(spec.k - 1) as f64;
    let k = spec.k as f64;
    Ok(x * (2.0 * k - x - 1.0) / spec.p)
}

/// `x0 (k - x0) / p`: expected time until 0 or `k` is hit.
pub fn expected_two_sided_closed_form(spec: &RandomWalkSpec) -> Result<f64> {
    spec.validate()?;
    if spec.boundary != Boundary::AbsorbBoth {
        return Err(Error::InvalidParameters("closed form needs AbsorbBoth".into()));
    }
    let (x, k) = (spec.x0 as f64, spec.k as f64);
    Ok(x * (k - x) / spec.p)
}

/// Solves `sub[i] y[i-1] + diag[i] y[i] + sup[i] y[i+1] = rhs[i]`.
fn solve_tridiagonal(sub: &[f64], diag: &[f64], sup: &[f64], rhs: &[f64]) -> Vec<f64> {
    let n = diag.len();
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];
    for i in 0..n {
        let prev_c = if i > 0 { c[i - 1] } else { 0.0 };
        let prev_d = if i > 0 { d[i - 1] } else { 0.0 };
        let denom = diag[i] - sub[i] * prev_c;
        c[i] = sup[i] / denom;
        d[i] = (rhs[i] - sub[i] * prev_d) / denom;
    }
    let mut y = vec![0.0; n];
    for i in (0..n).rev() {
        y[i] = d[i] - if i + 1 < n { c[i] * y[i + 1] } else { 0.0 };
    }
    y
}

/// Expected hitting times from every start state `0..=k`, from the
/// first-step equations. `spec.x0` is ignored.
pub fn exact_hitting_times(spec: &RandomWalkSpec) -> Result<Vec<f64>> {
    spec.validate()?;
    if spec.k > EXACT_LIMIT {
        return Err(Error::TooLarge {
            n: spec.k,
            limit: EXACT_LIMIT,
        });
    }
    let (k, p) = (spec.k, spec.p);
    let half = p / 2.0;
    // unknowns are the transient states 1..=top
    let top = match (spec.boundary, spec.reflection) {
        (Boundary::AbsorbBoth, _) | (Boundary::AbsorbZeroReflectK, Reflection::Barrier) => k - 1,
        (Boundary::AbsorbZeroReflectK, _) => k,
    };
    let mut times = vec![0.0; k + 1];
    if top == 0 {
        return Ok(times);
    }
    let mut sub = vec![-half; top];
    let mut diag = vec![p; top];
    let mut sup = vec![-half; top];
    let rhs = vec![1.0; top];
    sub[0] = 0.0;
    sup[top - 1] = 0.0;
    if spec.boundary == Boundary::AbsorbZeroReflectK {
        let last = top - 1;
        match spec.reflection {
            // rejected up-step folds into the self-loop
            Reflection::Barrier => diag[last] = half,
            Reflection::Bounce => {
                diag[last] = p;
                sub[last] = -p;
            }
            Reflection::Sticky => diag[last] = half,
        }
    }
    let y = solve_tridiagonal(&sub, &diag, &sup, &rhs);
    times[1..=top].copy_from_slice(&y);
    if spec.boundary == Boundary::AbsorbZeroReflectK && spec.reflection == Reflection::Barrier {
        times[k] = times[k - 1];
    }
    Ok(times)
}

/// Buffered fair coin flips drawn 64 at a time.
struct Coins {
    bits: u64,
    left: u32,
}

impl Coins {
    fn new() -> Self {
        Coins { bits: 0, left: 0 }
    }

    #[inline]
    fn flip<R: Rng + ?Sized>(&mut self, rng: &mut R) -> bool {
        if self.left == 0 {
            self.bits = rng.gen();
            self.left = 64;
        }
        let b = self.bits & 1 == 1;
        self.bits >>= 1;
        self.left -= 1;
        b
    }
}

/// One step of a walk in state `x` (not absorbed).
#[inline]
fn step<R: Rng + ?Sized>(spec: &RandomWalkSpec, x: usize, coins: &mut Coins, rng: &mut R) -> usize {
    if spec.p < 1.0 && !rng.gen_bool(spec.p) {
        return x;
    }
    let k = spec.k;
    let up = coins.flip(rng);
    match spec.boundary {
        Boundary::AbsorbBoth => {
            if up {
                x + 1
            } else {
                x - 1
            }
        }
        Boundary::AbsorbZeroReflectK => match spec.reflection {
            Reflection::Barrier => {
                if !up {
                    x - 1
                } else if x + 1 >= k {
                    x
                } else {
                    x + 1
                }
            }
            Reflection::Bounce if x == k => k - 1,
            Reflection::Sticky if x == k => {
                if up {
                    k
                } else {
                    k - 1
                }
            }
            _ => {
                if up {
                    x + 1
                } else {
                    x - 1
                }
            }
        },
    }
}

fn absorbed(spec: &RandomWalkSpec, x: usize) -> bool {
    x == 0 || (spec.boundary == Boundary::AbsorbBoth && x == spec.k)
}

/// Simulates one walk from `spec.x0` until absorption or until `cap` steps
/// have elapsed; returns the elapsed steps.
pub fn simulate_hitting_time<R: Rng + ?Sized>(spec: &RandomWalkSpec, cap: u64, rng: &mut R) -> u64 {
    let mut x = if spec.boundary == Boundary::AbsorbZeroReflectK && spec.reflection == Reflection::Barrier {
        spec.x0.min(spec.k - 1)
    } else {
        spec.x0
    };
    let mut coins = Coins::new();
    let mut t = 0;
    while !absorbed(spec, x) && t < cap {
        x = step(spec, x, &mut coins, rng);
        t += 1;
    }
    t
}

/// Sample summary of `T_η`, the first generation at which any of `η`
/// lockstep walks from state 1 reaches 0.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MinOfEtaStats {
    pub k: usize,
    pub eta: usize,
    pub mean: f64,
    pub variance: f64,
    pub std_error: f64,
    /// All samples, ascending.
    pub sorted_samples: Vec<u64>,
}

impl MinOfEtaStats {
    /// Empirical `Pr[T_η >= t]`.
    pub fn tail(&self, t: u64) -> f64 {
        let below = self.sorted_samples.partition_point(|&s| s < t);
        (self.sorted_samples.len() - below) as f64 / self.sorted_samples.len() as f64
    }
}

fn summarize(samples: &[u64]) -> (f64, f64, f64) {
    let n = samples.len() as f64;
    let mean = samples.iter().map(|&s| s as f64).sum::<f64>() / n;
    let variance = if samples.len() > 1 {
        samples.iter().map(|&s| (s as f64 - mean).powi(2)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    (mean, variance, (variance / n).sqrt())
}

/// Monte Carlo estimate of `T_η` for walks on `0..=k` with a reflecting
/// barrier at `k`, all starting in state 1.
pub fn simulate_min_of_eta<R: Rng + ?Sized>(
    k: usize,
    eta: usize,
    samples: usize,
    rng: &mut R,
) -> Result<MinOfEtaStats> {
    if k < 2 || eta == 0 || samples == 0 {
        return Err(Error::InvalidParameters(format!(
            "need k >= 2, eta >= 1, samples >= 1 (got k={k}, eta={eta}, samples={samples})"
        )));
    }
    let spec = RandomWalkSpec::reflecting(k, 1, 1.0);
    let mut coins = Coins::new();
    let mut walks = vec![1usize; eta];
    let mut out = Vec::with_capacity(samples);
    for _ in 0..samples {
        walks.fill(1);
        let mut t = 0u64;
        loop {
            t += 1;
            let mut hit = false;
            for x in walks.iter_mut() {
                *x = step(&spec, *x, &mut coins, rng);
                hit |= *x == 0;
            }
            if hit {
                break;
            }
        }
        out.push(t);
    }
    let (mean, variance, std_error) = summarize(&out);
    out.sort_unstable();
    Ok(MinOfEtaStats {
        k,
        eta,
        mean,
        variance,
        std_error,
        sorted_samples: out,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TailCheck {
    pub k: usize,
    pub r: u32,
    /// The threshold `2 r k²`.
    pub threshold: u64,
    pub empirical: f64,
    pub bound: f64,
    /// Three standard errors of the empirical estimate.
    pub margin: f64,
    pub passed: bool,
}

/// Checks `Pr[T0 >= 2 r k²] <= 2^-r` by simulation, starting from the
/// slowest start state `k` of the walk that occupies `k` and leaves it
/// surely.
pub fn check_tail_bound<R: Rng + ?Sized>(k: usize, r: u32, samples: usize, rng: &mut R) -> Result<TailCheck> {
    if r == 0 || k == 0 || samples == 0 {
        return Err(Error::InvalidParameters("need k >= 1, r >= 1, samples >= 1".into()));
    }
    let spec = RandomWalkSpec::reflecting(k, k, 1.0).with_reflection(Reflection::Bounce);
    let threshold = 2 * r as u64 * (k as u64).pow(2);
    let hits = (0..samples)
        .filter(|_| simulate_hitting_time(&spec, threshold, rng) >= threshold)
        .count();
    let empirical = hits as f64 / samples as f64;
    let margin = 3.0 * (empirical * (1.0 - empirical) / samples as f64).sqrt();
    let bound = 0.5f64.powi(r as i32);
    Ok(TailCheck {
        k,
        r,
        threshold,
        empirical,
        bound,
        margin,
        passed: empirical <= bound + margin,
    })
}
