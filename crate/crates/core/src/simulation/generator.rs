use rand::distr::Open01;
use rand::Rng;
use rand_distr::{Distribution, Gamma};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::inference::replicate_rng;
use crate::sample::{Sample, SubjectRecord};

/// Generator and study settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimConfig {
    /// Dependence parameter `θ ≥ 1`; 1 means independent stages.
    pub theta: f64,
    /// Per-stage rates `α_j`; the last entry is reused for later stages.
    pub alpha: Vec<f64>,
    /// Upper end `K` of the censoring distribution `Uniform(0, K)`.
    pub censor_upper: f64,
    pub n: usize,
    pub reps: usize,
    /// Bootstrap replicates per Monte Carlo replication.
    pub bootstrap: usize,
    /// Evaluation times; empty means the survival-quantile grid of stage 1.
    pub grid: Vec<f64>,
    /// Highest stage analysed. Trajectories always run to censoring.
    pub max_stage: u32,
    /// Level of the intervals and tests.
    pub level_alpha: f64,
    pub seed: u64,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            theta: 1.0,
            alpha: vec![1.25],
            censor_upper: 10.0,
            n: 200,
            reps: 500,
            bootstrap: 100,
            grid: Vec::new(),
            max_stage: 3,
            level_alpha: 0.05,
            seed: 1,
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidArgument(m));
        if !(self.theta >= 1.0 && self.theta.is_finite()) {
            return bad(format!("theta must be ≥ 1, got {}", self.theta));
        }
        if self.alpha.is_empty() {
            return bad("at least one stage rate alpha is required".into());
        }
        if let Some(a) = self.alpha.iter().find(|a| !(**a > 1.0 && a.is_finite())) {
            return bad(format!("stage rates alpha must be > 1, got {a}"));
        }
        if !(self.censor_upper > 0.0 && self.censor_upper.is_finite()) {
            return bad(format!("censor_upper must be positive, got {}", self.censor_upper));
        }
        if self.n == 0 {
            return bad("n must be positive".into());
        }
        if self.reps == 0 {
            return bad("reps must be positive".into());
        }
        if self.bootstrap < 2 {
            return bad("bootstrap must be at least 2".into());
        }
        if self.max_stage == 0 {
            return bad("max_stage must be positive".into());
        }
        if !(self.level_alpha > 0.0 && self.level_alpha < 1.0) {
            return bad(format!("level_alpha must lie in (0, 1), got {}", self.level_alpha));
        }
        if self.grid.iter().any(|t| !(t.is_finite() && *t >= 0.0)) {
            return bad("grid times must be finite and non-negative".into());
        }
        Ok(())
    }

    /// `α_j` for stage `j` (1-based).
    pub fn alpha_at(&self, j: u32) -> f64 {
        let i = (j.max(1) as usize - 1).min(self.alpha.len() - 1);
        self.alpha[i]
    }

    /// The configured grid, or the survival-quantile grid for `α_1`.
    pub fn effective_grid(&self) -> Vec<f64> {
        if self.grid.is_empty() {
            quantile_grid(self.alpha_at(1))
        } else {
            self.grid.clone()
        }
    }
}

/// Times where `e^{−αt}` equals 0.8, 0.7, …, 0.2.
pub fn quantile_grid(alpha: f64) -> Vec<f64> {
    [0.8, 0.7, 0.6, 0.5, 0.4, 0.3, 0.2]
        .iter()
        .map(|s: &f64| -s.ln() / alpha)
        .collect()
}

/// Draws the frailty: `Gamma(1/(θ − 1), 1)`, or exactly 1 when `θ = 1`.
pub fn sample_frailty<R: Rng + ?Sized>(theta: f64, rng: &mut R) -> Result<f64> {
    Ok(frailty_dist(theta)?.map_or(1.0, |g| g.sample(rng)))
}

fn frailty_dist(theta: f64) -> Result<Option<Gamma<f64>>> {
    if !(theta >= 1.0 && theta.is_finite()) {
        return Err(Error::InvalidArgument(format!("theta must be ≥ 1, got {theta}")));
    }
    if theta == 1.0 {
        return Ok(None);
    }
    Gamma::new(1.0 / (theta - 1.0), 1.0)
        .map(Some)
        .map_err(|e| Error::InvalidArgument(format!("frailty distribution: {e}")))
}

/// `F_1(∞ | w)`, the probability of a cause-1 event given the frailty.
pub fn type1_mass(w: f64, alpha: f64, theta: f64) -> f64 {
    if theta == 1.0 {
        1.0 / alpha
    } else {
        (w * (1.0 - alpha.powf(theta - 1.0))).exp()
    }
}

/// Cause-1 incidence given the frailty,
/// `F_1(t | w) = exp[w(1 − x^{1−θ})]` with `x = α⁻¹(1 − e^{−αt})`.
pub fn conditional_cif1(t: f64, w: f64, alpha: f64, theta: f64) -> f64 {
    let x = -(-alpha * t).exp_m1() / alpha;
    if theta == 1.0 {
        x
    } else {
        (w * (1.0 - x.powf(1.0 - theta))).exp()
    }
}

/// Inverse of [`conditional_cif1`] in `t`, for `0 < u < F_1(∞ | w)`.
pub fn conditional_cif1_inv(u: f64, w: f64, alpha: f64, theta: f64) -> Result<f64> {
    let mass = type1_mass(w, alpha, theta);
    if !(u > 0.0 && u < mass) {
        return Err(Error::InvalidArgument(format!(
            "u = {u} outside (0, {mass}), the cause-1 range"
        )));
    }
    let x = if theta == 1.0 {
        u
    } else {
        (1.0 - u.ln() / w).powf(1.0 / (1.0 - theta))
    };
    Ok(-(-alpha * x).ln_1p() / alpha)
}

struct Generator<'a> {
    config: &'a SimConfig,
    frailty: Option<Gamma<f64>>,
}

impl<'a> Generator<'a> {
    fn new(config: &'a SimConfig) -> Result<Self> {
        config.validate()?;
        Ok(Generator {
            config,
            frailty: frailty_dist(config.theta)?,
        })
    }

    /// Latent stage-`j` gap and cause for frailty `w`.
    fn gap<R: Rng + ?Sized>(&self, w: f64, j: u32, rng: &mut R) -> (f64, u8) {
        let alpha = self.config.alpha_at(j);
        loop {
            let u: f64 = rng.sample(Open01);
            let (gap, cause) = if u < type1_mass(w, alpha, self.config.theta) {
                (conditional_cif1_inv(u, w, alpha, self.config.theta).expect("u within cause-1 range"), 1)
            } else {
                let v: f64 = rng.sample(Open01);
                (-v.ln() / alpha, 2)
            };
            // a zero gap needs an extreme uniform; redraw the stage
            if gap > 0.0 {
                return (gap, cause);
            }
        }
    }

    fn subject<R: Rng + ?Sized>(&self, id: String, rng: &mut R) -> SubjectRecord {
        let cfg = self.config;
        let w = self.frailty.as_ref().map_or(1.0, |g| g.sample(rng));
        let c = rng.sample::<f64, _>(Open01) * cfg.censor_upper;
        let mut events = Vec::new();
        let mut cum = 0.0;
        loop {
            let (gap, cause) = self.gap(w, events.len() as u32 + 1, rng);
            let next = cum + gap;
            if next >= c {
                break;
            }
            events.push((gap, cause));
            cum = next;
        }
        SubjectRecord::from_events(id, c, &events, 2).expect("generated trajectory is valid")
    }
}

/// One subject: frailty and censoring time, then gaps until the cumulative
/// time passes `C`.
pub fn gen_subject<R: Rng + ?Sized>(
    config: &SimConfig,
    id: impl Into<String>,
    rng: &mut R,
) -> Result<SubjectRecord> {
    Ok(Generator::new(config)?.subject(id.into(), rng))
}

/// `config.n` subjects with ids `000001`, `000002`, ….
pub fn gen_sample<R: Rng + ?Sized>(config: &SimConfig, rng: &mut R) -> Result<Sample> {
    let gen = Generator::new(config)?;
    let subjects = (1..=config.n).map(|i| gen.subject(format!("{i:06}"), rng)).collect();
    Sample::new(subjects, 2)
}

/// The first `stages` latent `(gap, cause)` pairs of one subject, before
/// censoring, sharing one frailty draw.
pub fn latent_gaps<R: Rng + ?Sized>(config: &SimConfig, stages: u32, rng: &mut R) -> Result<Vec<(f64, u8)>> {
    let gen = Generator::new(config)?;
    let w = gen.frailty.as_ref().map_or(1.0, |g| g.sample(rng));
    Ok((1..=stages).map(|j| gen.gap(w, j, rng)).collect())
}

/// Censoring proportions at one stage over a generated cohort.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CensoringRate {
    pub stage: u32,
    /// Subjects with a stage-`j` record.
    pub reached: usize,
    /// Subjects whose stage-`j` record is censored.
    pub censored: usize,
    /// `censored / reached`.
    pub rate: f64,
    /// `censored / cohort size`.
    pub rate_of_cohort: f64,
}

/// Censoring proportions for stages `1..=stages` over `subjects` generated
/// subjects (random stream 0 of `config.seed`).
pub fn censoring_rates(config: &SimConfig, subjects: usize, stages: u32) -> Result<Vec<CensoringRate>> {
    let gen = Generator::new(config)?;
    let mut rng = replicate_rng(config.seed, 0);
    let mut reached = vec![0usize; stages as usize];
    let mut censored = vec![0usize; stages as usize];
    for i in 0..subjects {
        let s = gen.subject(i.to_string(), &mut rng);
        for r in s.records().iter().take(stages as usize) {
            let j = r.stage as usize - 1;
            reached[j] += 1;
            if !r.is_event() {
                censored[j] += 1;
            }
        }
    }
    Ok((0..stages as usize)
        .map(|j| CensoringRate {
            stage: j as u32 + 1,
            reached: reached[j],
            censored: censored[j],
            rate: if reached[j] > 0 { censored[j] as f64 / reached[j] as f64 } else { 0.0 },
            rate_of_cohort: censored[j] as f64 / subjects.max(1) as f64,
        })
        .collect())
}
