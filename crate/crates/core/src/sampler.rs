//! Monte Carlo sampling of gauge field configurations under the Wilson and
//! Villain plaquette actions, plus quadrature checks of the per-plaquette
//! weight's moment and convolution conditions.
//!
//! Couplings follow the scaling ε = 2^{−N}, t = ε² = 2^{−2N}, β = ε^{−2}.
//! U(1) bonds are updated by exact heat-bath (von Mises for Wilson, wrapped
//! Gaussian for Villain); SU(2) bonds by Metropolis with random-walk
//! proposals exp(σξ)·U.

use crate::field::{positive_bonds, GaugeField};
use crate::group::{wrap_angle, AlgebraVector, LieGroup, Su2, U1};
use crate::lattice::{Bond, Rect, Scale};
use rand::Rng;
use rand_distr::StandardNormal;
use std::f64::consts::{PI, TAU};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ActionKind {
    Wilson,
    Villain,
}

#[derive(Debug, Clone, Copy)]
pub struct ActionSpec {
    pub kind: ActionKind,
    pub n: Scale,
    /// Maximum number of terms kept in Villain character/wrap sums.
    pub truncation: u32,
}

impl ActionSpec {
    pub fn new(kind: ActionKind, n: Scale) -> ActionSpec {
        ActionSpec { kind, n, truncation: 32 }
    }

    /// Lattice spacing ε = 2^{−N}.
    pub fn epsilon(&self) -> f64 {
        0.5f64.powi(self.n as i32)
    }

    /// Heat-kernel time t = ε².
    pub fn t(&self) -> f64 {
        0.25f64.powi(self.n as i32)
    }

    /// Wilson coupling β = ε^{−2}.
    pub fn beta(&self) -> f64 {
        4.0f64.powi(self.n as i32)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum SamplerError {
    #[error("density truncation produced a non-positive value; raise the truncation level")]
    NonPositiveDensity,
    #[error("villain truncation level must be at least 1")]
    BadTruncation,
}

/// Unnormalized log weight of the Villain U(1) action at plaquette angle θ:
/// log Σ_n exp(−(θ+2πn)²/(2t)).
pub fn villain_u1_log_density(theta: f64, t: f64, truncation: u32) -> Result<f64, SamplerError> {
    if truncation < 1 {
        return Err(SamplerError::BadTruncation);
    }
    let k = truncation as i64;
    let mut max = f64::NEG_INFINITY;
    let expo = |n: i64| -(theta + TAU * n as f64).powi(2) / (2.0 * t);
    for n in -k..=k {
        max = max.max(expo(n));
    }
    let mut sum = 0.0;
    for n in -k..=k {
        sum += (expo(n) - max).exp();
    }
    Ok(max + sum.ln())
}

/// Unnormalized log weight of the Villain SU(2) action as a function of the
/// class angle φ = |log x| ∈ [0, π]. For t ≥ 1/2 the character sum
/// Σ_{n≥1} n e^{−(n²−1)t/2} sin(nφ)/sin(φ) converges in a few terms; for
/// t < 1/2 it cancels catastrophically, so the Poisson-resummed form of the
/// same function, e^{t/2}·√(π/(2t³))·Σ_k (φ+2πk)e^{−(φ+2πk)²/(2t)}/sin(φ),
/// is used instead.
pub fn su2_villain_log_density(phi: f64, t: f64, truncation: u32) -> Result<f64, SamplerError> {
    if truncation < 1 {
        return Err(SamplerError::BadTruncation);
    }
    let phi = phi.clamp(1e-6, PI - 1e-6);
    if t >= 0.5 {
        let mut sum = 0.0;
        for n in 1..=truncation as i64 {
            let amp = n as f64 * (-((n * n - 1) as f64) * t / 2.0).exp();
            if amp < 1e-14 {
                break;
            }
            sum += amp * (n as f64 * phi).sin();
        }
        sum /= phi.sin();
        if sum <= 0.0 {
            return Err(SamplerError::NonPositiveDensity);
        }
        Ok(sum.ln())
    } else {
        // Only the images at φ and φ − 2π ever matter here: with t ≤ 1/2 the
        // |j| ≥ 2 terms are below e^{−2π²/t} ≤ 7e−18 relative to the leading
        // one, under the f64 noise floor.
        let k = (truncation as i64).min(1);
        let expo = |j: i64| -(phi + TAU * j as f64).powi(2) / (2.0 * t);
        let mut max = f64::NEG_INFINITY;
        for j in -k..=k {
            max = max.max(expo(j));
        }
        let mut sum = 0.0;
        for j in -k..=k {
            sum += (phi + TAU * j as f64) * (expo(j) - max).exp();
        }
        if sum <= 0.0 {
            return Err(SamplerError::NonPositiveDensity);
        }
        Ok(t / 2.0 + 0.5 * (PI / (2.0 * t.powi(3))).ln() + max + sum.ln() - phi.sin().ln())
    }
}

/// The two plaquettes whose boundary contains the given bond.
pub fn bond_plaquettes(b: Bond) -> [Rect; 2] {
    let c = b.canonical();
    [Rect::plaquette(c.base), Rect::plaquette(c.base.shift(c.axis.perp(), -1))]
}

/// Sign with which `b` is traversed in the boundary word of `p`.
fn traversal_sign(p: Rect, b: Bond) -> f64 {
    let c = b.canonical();
    for e in p.boundary_word() {
        if e.canonical() == c {
            return if e.positive == b.positive { 1.0 } else { -1.0 };
        }
    }
    panic!("bond not on plaquette boundary");
}

#[derive(Debug, Clone)]
pub struct ChainState<G: LieGroup> {
    pub field: GaugeField<G>,
    pub sweeps: u64,
    pub proposals: u64,
    pub accepted: u64,
    /// Metropolis random-walk scale; unused by heat-bath groups.
    pub sigma: f64,
}

impl<G: LieGroup> ChainState<G> {
    /// Cold start: U ≡ 1.
    pub fn cold(n: Scale) -> ChainState<G> {
        ChainState {
            field: GaugeField::identity(n),
            sweeps: 0,
            proposals: 0,
            accepted: 0,
            sigma: 0.5f64.powi(n as i32),
        }
    }

    /// Hot start: Haar-random bonds.
    pub fn hot<R: Rng + ?Sized>(n: Scale, rng: &mut R) -> ChainState<G> {
        let mut s = ChainState::cold(n);
        s.field = GaugeField::from_fn(n, |_| G::haar(rng));
        s
    }

    pub fn acceptance_rate(&self) -> f64 {
        if self.proposals == 0 {
            f64::NAN
        } else {
            self.accepted as f64 / self.proposals as f64
        }
    }
}

/// Groups the sampler knows how to update.
pub trait Sampleable: LieGroup + Sized {
    /// Unnormalized log plaquette weight log Q_N(x). Depends only on the
    /// conjugacy class, so Q(x) = Q(x⁻¹) = Q(yxy⁻¹) structurally.
    fn log_density(spec: &ActionSpec, x: Self::Point) -> Result<f64, SamplerError>;

    /// One full-lattice update pass, bonds in raster order.
    fn sweep<R: Rng + ?Sized>(
        state: &mut ChainState<Self>,
        spec: &ActionSpec,
        rng: &mut R,
    ) -> Result<(), SamplerError>;
}

pub fn density<G: Sampleable>(spec: &ActionSpec, x: G::Point) -> Result<f64, SamplerError> {
    Ok(G::log_density(spec, x)?.exp())
}

impl Sampleable for U1 {
    fn log_density(spec: &ActionSpec, x: f64) -> Result<f64, SamplerError> {
        match spec.kind {
            ActionKind::Wilson => Ok(spec.beta() * (x.cos() - 1.0)),
            ActionKind::Villain => villain_u1_log_density(x, spec.t(), spec.truncation),
        }
    }

    fn sweep<R: Rng + ?Sized>(
        state: &mut ChainState<U1>,
        spec: &ActionSpec,
        rng: &mut R,
    ) -> Result<(), SamplerError> {
        for (axis, base) in positive_bonds(state.field.n) {
            let b = Bond::positive(base, axis);
            let theta = state.field.get(b);
            // Conditional weight Q(θ'−m_1)·Q(θ'−m_2), with m_i read off the
            // two plaquette holonomies through this bond.
            let mut means = [0.0; 2];
            for (slot, p) in bond_plaquettes(b).into_iter().enumerate() {
                let f = state.field.get_plaquette_angle(p);
                means[slot] = wrap_angle(theta - traversal_sign(p, b) * f);
            }
            let new = match spec.kind {
                ActionKind::Villain => {
                    // Product of two wrapped Gaussians of variance t: after
                    // unwrapping, a mixture over the relative winding k of
                    // Gaussians N(midpoint − πk, t/2) with log weights
                    // −(Δ + 2πk)²/(4t). Sampling only the dominant branch
                    // would freeze frustrated bonds (Δ near ±π) and the
                    // chain then never relaxes a disordered start.
                    let t = spec.t();
                    let delta = wrap_angle(means[0] - means[1]);
                    let lw = |k: f64| -(delta + TAU * k) * (delta + TAU * k) / (4.0 * t);
                    let (w_minus, w0, w_plus) = (lw(-1.0), lw(0.0), lw(1.0));
                    let m = w0.max(w_minus).max(w_plus);
                    let (e_minus, e0, e_plus) =
                        ((w_minus - m).exp(), (w0 - m).exp(), (w_plus - m).exp());
                    let u = rng.random::<f64>() * (e_minus + e0 + e_plus);
                    let k = if u < e_minus {
                        -1.0
                    } else if u < e_minus + e0 {
                        0.0
                    } else {
                        1.0
                    };
                    let mean = means[0] - delta / 2.0 - PI * k;
                    let xi: f64 = rng.sample(StandardNormal);
                    wrap_angle(mean + (t / 2.0).sqrt() * xi)
                }
                ActionKind::Wilson => {
                    let beta = spec.beta();
                    let re = beta * (means[0].cos() + means[1].cos());
                    let im = beta * (means[0].sin() + means[1].sin());
                    let kappa = re.hypot(im);
                    let mu = im.atan2(re);
                    wrap_angle(mu + sample_von_mises(kappa, rng))
                }
            };
            state.field.set(b, new);
            state.proposals += 1;
            state.accepted += 1;
        }
        state.sweeps += 1;
        Ok(())
    }
}

impl Sampleable for Su2 {
    fn log_density(spec: &ActionSpec, x: <Su2 as LieGroup>::Point) -> Result<f64, SamplerError> {
        match spec.kind {
            ActionKind::Wilson => Ok(spec.beta() * (Su2::re_trace(x) - Su2::FUND_DIM)),
            ActionKind::Villain => {
                let phi = Su2::log(x).norm();
                su2_villain_log_density(phi, spec.t(), spec.truncation)
            }
        }
    }

    fn sweep<R: Rng + ?Sized>(
        state: &mut ChainState<Su2>,
        spec: &ActionSpec,
        rng: &mut R,
    ) -> Result<(), SamplerError> {
        for (axis, base) in positive_bonds(state.field.n) {
            let b = Bond::positive(base, axis);
            let plaqs = bond_plaquettes(b);
            let local = |u: &GaugeField<Su2>| -> Result<f64, SamplerError> {
                let mut s = 0.0;
                for p in plaqs {
                    s += Su2::log_density(spec, u.plaquette_holonomy(p.base))?;
                }
                Ok(s)
            };
            let old_val = state.field.get(b);
            let old_w = local(&state.field)?;
            let xi = [
                state.sigma * rng.sample::<f64, _>(StandardNormal),
                state.sigma * rng.sample::<f64, _>(StandardNormal),
                state.sigma * rng.sample::<f64, _>(StandardNormal),
            ];
            state.field.set(b, Su2::mul(Su2::exp(xi), old_val));
            let new_w = local(&state.field)?;
            state.proposals += 1;
            if rng.random::<f64>().ln() < new_w - old_w {
                state.accepted += 1;
            } else {
                state.field.set(b, old_val);
            }
        }
        state.sweeps += 1;
        Ok(())
    }
}

impl GaugeField<U1> {
    /// Plaquette holonomy as an angle (wrapped sum of signed bond angles).
    fn get_plaquette_angle(&self, p: Rect) -> f64 {
        self.plaquette_holonomy(p.base)
    }
}

/// Best-Fisher rejection sampler for the von Mises distribution centred at 0.
fn sample_von_mises<R: Rng + ?Sized>(kappa: f64, rng: &mut R) -> f64 {
    if kappa < 1e-8 {
        return PI * (2.0 * rng.random::<f64>() - 1.0);
    }
    let tau = 1.0 + (1.0 + 4.0 * kappa * kappa).sqrt();
    let rho = (tau - (2.0 * tau).sqrt()) / (2.0 * kappa);
    let r = (1.0 + rho * rho) / (2.0 * rho);
    loop {
        let u1: f64 = rng.random();
        let z = (PI * u1).cos();
        let f = (1.0 + r * z) / (r + z);
        let c = kappa * (r - f);
        let u2: f64 = rng.random();
        if c * (2.0 - c) - u2 > 0.0 || (c / u2).ln() + 1.0 - c >= 0.0 {
            let u3: f64 = rng.random();
            return f.acos().copysign(u3 - 0.5);
        }
    }
}

/// Default burn-in sweep count, 10·2^{2N}.
pub fn default_burnin(n: Scale) -> u64 {
    10 << (2 * n)
}

/// Default thinning interval, 2^{2N} sweeps.
pub fn default_thin(n: Scale) -> u64 {
    1 << (2 * n)
}

#[derive(Debug, Clone, Copy)]
pub struct RunPlan {
    pub burnin: u64,
    pub thin: u64,
    pub samples: usize,
    /// Adapt σ toward 40-60% acceptance during burn-in only.
    pub adapt: bool,
}

impl RunPlan {
    pub fn defaults(n: Scale, samples: usize) -> RunPlan {
        RunPlan { burnin: default_burnin(n), thin: default_thin(n), samples, adapt: true }
    }
}

/// Run one chain, handing each decorrelated sample to `collect`.
pub fn run_chain<G: Sampleable, R: Rng + ?Sized>(
    spec: &ActionSpec,
    plan: &RunPlan,
    state: &mut ChainState<G>,
    rng: &mut R,
    mut collect: impl FnMut(usize, &GaugeField<G>),
) -> Result<(), SamplerError> {
    let window = 50u64;
    let mut window_start = (state.proposals, state.accepted);
    for s in 0..plan.burnin {
        G::sweep(state, spec, rng)?;
        if plan.adapt && s % window == window - 1 {
            let dp = state.proposals - window_start.0;
            let da = state.accepted - window_start.1;
            if dp > 0 {
                let rate = da as f64 / dp as f64;
                if rate < 0.4 {
                    state.sigma *= 0.85;
                } else if rate > 0.6 {
                    state.sigma *= 1.15;
                }
            }
            window_start = (state.proposals, state.accepted);
        }
    }
    for i in 0..plan.samples {
        for _ in 0..plan.thin {
            G::sweep(state, spec, rng)?;
        }
        collect(i, &state.field);
    }
    Ok(())
}

/// Report from the action condition checks: the β-moment of the plaquette
/// weight against 2^{−βN}, and (U(1) only) the min/max of the M-fold
/// self-convolution Q^{⋆M} on a grid.
#[derive(Debug, Clone)]
pub struct ConditionsReport {
    pub beta: f64,
    pub moment: f64,
    /// moment / 2^{−βN}.
    pub ratio: f64,
    pub m: u64,
    /// None for SU(2): the convolution bound is not verified there.
    pub convolution_min_max: Option<(f64, f64)>,
}

fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, intervals: usize) -> f64 {
    let k = intervals + intervals % 2;
    let h = (b - a) / k as f64;
    let mut s = f(a) + f(b);
    for i in 1..k {
        s += f(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    s * h / 3.0
}

fn convolution_power_m(n: Scale) -> u64 {
    1u64.max(1u64 << (2 * n).saturating_sub(3))
}

/// Quadrature check of the moment condition for U(1), plus the Fourier-exact
/// evaluation of Q^{⋆M} with M = 1 ∨ 2^{2N−3}.
pub fn check_conditions_u1(
    spec: &ActionSpec,
    beta: f64,
    points: usize,
) -> Result<ConditionsReport, SamplerError> {
    assert!(beta >= 2.0);
    let q = |theta: f64| density::<U1>(spec, theta).unwrap();
    let z = simpson(&q, -PI, PI, points);
    let moment = simpson(|th| th.abs().powf(beta) * q(th), -PI, PI, points) / z;
    let ratio = moment / 0.5f64.powf(beta * spec.n as f64);

    let m = convolution_power_m(spec.n);
    let qhat = |k: u64| -> f64 {
        match spec.kind {
            ActionKind::Villain => (-((k * k) as f64) * spec.t() / 2.0).exp(),
            ActionKind::Wilson => {
                simpson(|th| (k as f64 * th).cos() * q(th), -PI, PI, points) / z
            }
        }
    };
    let mut coeffs = Vec::new();
    for k in 1..=2000u64 {
        let c = qhat(k).powf(m as f64);
        if c.abs() < 1e-18 {
            break;
        }
        coeffs.push(c);
    }
    let grid = 512;
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..grid {
        let th = -PI + TAU * i as f64 / grid as f64;
        let mut v = 1.0 / TAU;
        for (k, c) in coeffs.iter().enumerate() {
            v += c * ((k as f64 + 1.0) * th).cos() / PI;
        }
        lo = lo.min(v);
        hi = hi.max(v);
    }
    Ok(ConditionsReport { beta, moment, ratio, m, convolution_min_max: Some((lo, hi)) })
}

/// Quadrature check of the moment condition for SU(2) via Weyl integration
/// over the class angle with weight (2/π)·sin²φ. The convolution condition
/// is reported as unchecked.
pub fn check_conditions_su2(
    spec: &ActionSpec,
    beta: f64,
    points: usize,
) -> Result<ConditionsReport, SamplerError> {
    assert!(beta >= 2.0);
    let logq = |phi: f64| match spec.kind {
        ActionKind::Wilson => spec.beta() * (2.0 * phi.cos() - 2.0),
        ActionKind::Villain => {
            su2_villain_log_density(phi, spec.t(), spec.truncation).unwrap_or(f64::NEG_INFINITY)
        }
    };
    let w = |phi: f64| (2.0 / PI) * phi.sin().powi(2) * logq(phi).exp();
    let z = simpson(&w, 0.0, PI, points);
    let moment = simpson(|phi| phi.powf(beta) * w(phi), 0.0, PI, points) / z;
    let ratio = moment / 0.5f64.powf(beta * spec.n as f64);
    Ok(ConditionsReport {
        beta,
        moment,
        ratio,
        m: convolution_power_m(spec.n),
        convolution_min_max: None,
    })
}
