//! Closed-form early-time correlation values and everything derived from
//! them: asymptotics, front velocities, threshold-crossing times, and front
//! snapshots.
//!
//! Every correlation value is carried as a [`LogValue`]: the interesting
//! regimes involve factorials of tens of thousands and magnitudes below
//! 1e-170, far outside linear f64 range. Couplings enter the closed forms
//! through |Δ/γ| only; the correlation is a norm and the general path-sum
//! squares every weight, so the sign cannot matter.

use std::f64::consts::{E, LN_2, PI};

use crate::error::{Error, Result};
use crate::graph::{MinPathRoute, MinPathSummary};
use crate::logval::{ln_factorial, ln_multinomial, LogValue};

/// Natural log of the leading-order prefactor for a uniform chain:
/// `2^(k+1) π^(2k-1) / (2k-1)! · |Δ/γ|^(k-1)`.
fn ln_chain_prefactor(k: u64, delta_over_gamma: f64) -> f64 {
    let kf = k as f64;
    (kf + 1.0) * LN_2 + (2.0 * kf - 1.0) * PI.ln() - ln_factorial(2 * k - 1)
        + (kf - 1.0) * delta_over_gamma.abs().ln()
}

/// Natural log of the general leading-order prefactor
/// `2^(L+2) π^(2L+1) / (2L+1)! · sqrt(weight_sum)` for a resolved route.
fn ln_route_prefactor(route: &MinPathRoute) -> f64 {
    let l = route.hops as f64;
    (l + 2.0) * LN_2 + (2.0 * l + 1.0) * PI.ln() - ln_factorial(2 * route.hops as u64 + 1)
        + 0.5 * route.weight_sum.ln_magnitude()
}

/// Leading power of t/τ and the log prefactor for a minimum-path summary.
pub fn leading_prefactor(summary: &MinPathSummary) -> Result<(usize, f64)> {
    let route = summary.route.as_ref().ok_or(Error::Unreachable {
        from: summary.source,
        to: summary.target,
    })?;
    Ok((2 * route.hops + 1, ln_route_prefactor(route)))
}

/// Early-time correlation between the reference qubit 1 and qubit `k` on a
/// uniform chain: `2^(k+1) π^(2k-1) / (2k-1)! · |Δ/γ|^(k-1) · (t/τ)^(2k-1)`.
pub fn chain_correlation(k: u64, delta_over_gamma: f64, t_over_tau: f64) -> LogValue {
    assert!(k >= 1, "chain sites are 1-based");
    assert!(t_over_tau >= 0.0, "time must be nonnegative");
    if t_over_tau == 0.0 {
        return LogValue::ZERO;
    }
    let ln = ln_chain_prefactor(k, delta_over_gamma) + (2 * k - 1) as f64 * t_over_tau.ln();
    LogValue::from_ln(ln)
}

/// Early-time correlation for an arbitrary network from its minimum-path
/// summary: `2^(L+2) π^(2L+1) / (2L+1)! · (t/τ)^(2L+1) · sqrt(weight_sum)`.
pub fn general_correlation(summary: &MinPathSummary, t_over_tau: f64) -> Result<LogValue> {
    assert!(t_over_tau >= 0.0, "time must be nonnegative");
    let (order, ln_prefactor) = leading_prefactor(summary)?;
    if t_over_tau == 0.0 {
        return Ok(LogValue::ZERO);
    }
    Ok(LogValue::from_ln(
        ln_prefactor + order as f64 * t_over_tau.ln(),
    ))
}

/// Early-time correlation between the origin and the `(n, m)` site of a
/// square lattice; the path multiplicity enters as sqrt((n+m)!/(n!m!)).
pub fn lattice2d_correlation(n: u64, m: u64, delta_over_gamma: f64, t_over_tau: f64) -> LogValue {
    lattice_correlation(&[n, m], delta_over_gamma, t_over_tau)
}

/// Early-time correlation between the origin and the `(n, m, p)` site of a
/// cubic lattice; the path multiplicity is the multinomial
/// sqrt((n+m+p)!/(n!m!p!)).
pub fn lattice3d_correlation(
    n: u64,
    m: u64,
    p: u64,
    delta_over_gamma: f64,
    t_over_tau: f64,
) -> LogValue {
    lattice_correlation(&[n, m, p], delta_over_gamma, t_over_tau)
}

fn lattice_correlation(offsets: &[u64], delta_over_gamma: f64, t_over_tau: f64) -> LogValue {
    assert!(t_over_tau >= 0.0, "time must be nonnegative");
    if t_over_tau == 0.0 {
        return LogValue::ZERO;
    }
    let total: u64 = offsets.iter().sum();
    let tf = total as f64;
    let ln = (tf + 2.0) * LN_2 + (2.0 * tf + 1.0) * PI.ln() - ln_factorial(2 * total + 1)
        + 0.5 * ln_multinomial(offsets)
        + tf * delta_over_gamma.abs().ln()
        + (2.0 * tf + 1.0) * t_over_tau.ln();
    LogValue::from_ln(ln)
}

/// Large-k form of the chain correlation, the factorial replaced by its
/// Stirling limit:
/// `sqrt(2/π) sqrt(γ/Δ) k^(-1/2) (v_LR (t/τ) / (k - 1/2))^(2k-1)`.
///
/// Documented to be crude at small k; the relative log error decays like
/// 1/k.
pub fn chain_asymptotic(k: u64, delta_over_gamma: f64, t_over_tau: f64) -> LogValue {
    assert!(k >= 1, "chain sites are 1-based");
    assert!(t_over_tau >= 0.0, "time must be nonnegative");
    if t_over_tau == 0.0 {
        return LogValue::ZERO;
    }
    let dg = delta_over_gamma.abs();
    let v = E * PI * (dg / 2.0).sqrt();
    let kf = k as f64;
    let ln = 0.5 * (LN_2 - PI.ln()) - 0.5 * dg.ln() - 0.5 * kf.ln()
        + (2.0 * kf - 1.0) * ((v * t_over_tau).ln() - (kf - 0.5).ln());
    LogValue::from_ln(ln)
}

/// Exponential limit of the front shape at very large k:
/// `e sqrt(2/π) sqrt(γ/Δ) k^(-1/2) exp(-2 (k - v_LR t/τ))`.
pub fn chain_exponential_front(k: u64, delta_over_gamma: f64, t_over_tau: f64) -> LogValue {
    assert!(k >= 1, "chain sites are 1-based");
    let dg = delta_over_gamma.abs();
    let v = E * PI * (dg / 2.0).sqrt();
    let kf = k as f64;
    let ln = 1.0 + 0.5 * (LN_2 - PI.ln()) - 0.5 * dg.ln() - 0.5 * kf.ln()
        - 2.0 * (kf - v * t_over_tau);
    LogValue::from_ln(ln)
}

/// Front velocity of the uniform chain, `eπ sqrt(Δ/2γ)`, in qubits per unit
/// t/τ.
pub fn v_lr_chain(delta_over_gamma: f64) -> Result<f64> {
    if !(delta_over_gamma > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "coupling must be positive, got {delta_over_gamma}"
        )));
    }
    Ok(E * PI * (delta_over_gamma / 2.0).sqrt())
}

/// Front velocity along a direction given by its direction cosines.
///
/// With S = Σ aᵢ the velocity is
/// `eπ sqrt(Δ/2γ) · (S / Π aᵢ^(aᵢ/S))^(1/4) / S`,
/// which is the printed tan-based angular formula rewritten in direction
/// cosines. The rewrite makes the endpoint limits explicit: every 0^0-type
/// factor becomes an `aᵢ ln aᵢ` term with the algebraic limit
/// `x ln x -> 0` as `x -> 0`, so axis and equatorial directions evaluate
/// exactly rather than through a numerical limit.
fn v_lr_from_cosines(cosines: &[f64], delta_over_gamma: f64) -> Result<f64> {
    if !(delta_over_gamma > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "coupling must be positive, got {delta_over_gamma}"
        )));
    }
    let sum: f64 = cosines.iter().sum();
    let x_ln_x: f64 = cosines
        .iter()
        .map(|&a| if a > 0.0 { a * a.ln() } else { 0.0 })
        .sum();
    let ln_inside = sum.ln() - x_ln_x / sum;
    Ok(E * PI * (delta_over_gamma / 2.0).sqrt() * (0.25 * ln_inside).exp() / sum)
}

const WEDGE_TOLERANCE: f64 = 1e-12;

/// Angular front velocity on the square lattice for `0 <= θ <= π/4`; other
/// directions must be folded into the wedge first (see
/// [`fundamental_angle_2d`]). θ = 0 returns [`v_lr_chain`] exactly.
pub fn v_lr_2d(theta: f64, delta_over_gamma: f64) -> Result<f64> {
    if !(-WEDGE_TOLERANCE..=PI / 4.0 + WEDGE_TOLERANCE).contains(&theta) {
        return Err(Error::AngleOutsideWedge(format!(
            "theta = {theta} not in [0, pi/4]"
        )));
    }
    let theta = theta.clamp(0.0, PI / 4.0);
    v_lr_from_cosines(&[theta.cos(), theta.sin()], delta_over_gamma)
}

/// Angular front velocity on the cubic lattice inside the fundamental wedge:
/// azimuthal `0 <= θ <= π/4` and polar φ large enough that the direction
/// cosines are ordered. The equatorial plane φ = π/2 reduces to
/// [`v_lr_2d`]; arbitrary directions go through [`reduce_direction`].
pub fn v_lr_3d(theta: f64, phi: f64, delta_over_gamma: f64) -> Result<f64> {
    if !(-WEDGE_TOLERANCE..=PI / 4.0 + WEDGE_TOLERANCE).contains(&theta) {
        return Err(Error::AngleOutsideWedge(format!(
            "theta = {theta} not in [0, pi/4]"
        )));
    }
    let theta = theta.clamp(0.0, PI / 4.0);
    let a = (phi.sin() * theta.cos()).max(0.0);
    let b = (phi.sin() * theta.sin()).max(0.0);
    let c = phi.cos().max(0.0);
    if phi.cos() < -WEDGE_TOLERANCE || phi < 0.0 {
        return Err(Error::AngleOutsideWedge(format!(
            "phi = {phi} not in (0, pi/2]"
        )));
    }
    if c > b + WEDGE_TOLERANCE {
        return Err(Error::AngleOutsideWedge(format!(
            "direction cosines unordered: cos(phi) = {c} exceeds sin(phi) sin(theta) = {b}"
        )));
    }
    v_lr_from_cosines(&[a, b, c.min(b)], delta_over_gamma)
}

/// Fold an arbitrary planar angle into the fundamental wedge `[0, π/4]` of
/// the square-lattice symmetry group.
pub fn fundamental_angle_2d(theta: f64) -> f64 {
    let a = theta.cos().abs();
    let b = theta.sin().abs();
    b.min(a).atan2(b.max(a))
}

/// Fold an arbitrary direction into the fundamental wedge: component signs
/// are dropped and the axes permuted so the direction cosines descend.
/// Accepts 1, 2, or 3 components; the vector need not be normalized.
pub fn reduce_direction(direction: &[f64]) -> Result<Vec<f64>> {
    if direction.is_empty() || direction.len() > 3 {
        return Err(Error::InvalidArgument(format!(
            "direction must have 1 to 3 components, got {}",
            direction.len()
        )));
    }
    let norm: f64 = direction.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm == 0.0 || !norm.is_finite() {
        return Err(Error::InvalidArgument(
            "direction must be a finite nonzero vector".into(),
        ));
    }
    let mut cosines: Vec<f64> = direction.iter().map(|x| x.abs() / norm).collect();
    cosines.sort_by(|a, b| b.partial_cmp(a).expect("finite cosines"));
    Ok(cosines)
}

/// Front velocity along an arbitrary lattice direction, after symmetry
/// reduction.
pub fn v_lr_direction(direction: &[f64], delta_over_gamma: f64) -> Result<f64> {
    let cosines = reduce_direction(direction)?;
    v_lr_from_cosines(&cosines, delta_over_gamma)
}

/// Angular velocity table for the spec'd lattice dimension.
///
/// For the chain this is the single saturation velocity; for lattices it is
/// a grid over the fundamental wedge. The axis limit of every table equals
/// the chain value.
#[derive(Clone, Debug)]
pub struct VelocityProfile {
    pub delta_over_gamma: f64,
    /// The 1D chain velocity, the axis limit of the angular tables.
    pub axis_velocity: f64,
    pub samples: Vec<AngularVelocity>,
}

#[derive(Clone, Copy, Debug)]
pub struct AngularVelocity {
    pub theta: f64,
    /// Polar angle; `None` for planar profiles.
    pub phi: Option<f64>,
    pub velocity: f64,
}

impl VelocityProfile {
    pub fn chain(delta_over_gamma: f64) -> Result<Self> {
        Ok(VelocityProfile {
            delta_over_gamma,
            axis_velocity: v_lr_chain(delta_over_gamma)?,
            samples: Vec::new(),
        })
    }

    /// θ grid of `steps + 1` points over `[0, π/4]`.
    pub fn lattice2d(delta_over_gamma: f64, steps: usize) -> Result<Self> {
        if steps == 0 {
            return Err(Error::InvalidArgument("need at least one angle step".into()));
        }
        let mut samples = Vec::with_capacity(steps + 1);
        for i in 0..=steps {
            let theta = PI / 4.0 * i as f64 / steps as f64;
            samples.push(AngularVelocity {
                theta,
                phi: None,
                velocity: v_lr_2d(theta, delta_over_gamma)?,
            });
        }
        Ok(VelocityProfile {
            delta_over_gamma,
            axis_velocity: v_lr_chain(delta_over_gamma)?,
            samples,
        })
    }

    /// Grid over the fundamental wedge: for each of the `theta_steps + 1`
    /// azimuthal angles, `phi_steps + 1` polar angles from the ordering
    /// boundary down to the equator.
    pub fn lattice3d(
        delta_over_gamma: f64,
        theta_steps: usize,
        phi_steps: usize,
    ) -> Result<Self> {
        if theta_steps == 0 || phi_steps == 0 {
            return Err(Error::InvalidArgument("need at least one angle step".into()));
        }
        let mut samples = Vec::new();
        for i in 0..=theta_steps {
            let theta = PI / 4.0 * i as f64 / theta_steps as f64;
            // smallest polar angle keeping cos(phi) <= sin(phi) sin(theta)
            let phi_min = (1.0 / theta.sin()).atan();
            for j in 0..=phi_steps {
                let phi = phi_min + (PI / 2.0 - phi_min) * j as f64 / phi_steps as f64;
                samples.push(AngularVelocity {
                    theta,
                    phi: Some(phi),
                    velocity: v_lr_3d(theta, phi, delta_over_gamma)?,
                });
            }
        }
        Ok(VelocityProfile {
            delta_over_gamma,
            axis_velocity: v_lr_chain(delta_over_gamma)?,
            samples,
        })
    }
}

/// Time at which the leading-order chain correlation crosses `c_thresh`,
/// from the closed-form inversion
/// `t/τ = exp((ln c_thresh - ln prefactor) / (2k-1))`.
pub fn threshold_time_chain(k: u64, delta_over_gamma: f64, c_thresh: f64) -> Result<f64> {
    if k == 0 {
        return Err(Error::InvalidArgument("chain sites are 1-based".into()));
    }
    if !(c_thresh > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "threshold must be positive, got {c_thresh}"
        )));
    }
    let ln_t =
        (c_thresh.ln() - ln_chain_prefactor(k, delta_over_gamma)) / (2 * k - 1) as f64;
    Ok(ln_t.exp())
}

/// Threshold-crossing time for an arbitrary reachable pair.
pub fn threshold_time(summary: &MinPathSummary, c_thresh: f64) -> Result<f64> {
    if !(c_thresh > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "threshold must be positive, got {c_thresh}"
        )));
    }
    let (order, ln_prefactor) = leading_prefactor(summary)?;
    Ok(((c_thresh.ln() - ln_prefactor) / order as f64).exp())
}

/// One threshold crossing along a ray of sites.
#[derive(Clone, Copy, Debug)]
pub struct ThresholdCrossing {
    /// Chain index, or ordinal position along the supplied ray.
    pub site: usize,
    pub t_over_tau: f64,
    /// Backwards finite difference `1 / (t_k - t_(k-1))`; absent for the
    /// first site.
    pub velocity: Option<f64>,
}

fn crossings_from_times(sites_and_times: Vec<(usize, f64)>) -> Result<Vec<ThresholdCrossing>> {
    let mut out: Vec<ThresholdCrossing> = Vec::with_capacity(sites_and_times.len());
    for (site, t) in sites_and_times {
        let velocity = match out.last() {
            None => None,
            Some(prev) => {
                if t == prev.t_over_tau {
                    return Err(Error::DegenerateCrossing {
                        first: prev.site,
                        second: site,
                    });
                }
                Some(1.0 / (t - prev.t_over_tau))
            }
        };
        out.push(ThresholdCrossing {
            site,
            t_over_tau: t,
            velocity,
        });
    }
    Ok(out)
}

/// Backwards finite-difference front velocity along a uniform chain, one
/// crossing per site `1..=k_max`.
pub fn finite_difference_velocity_chain(
    k_max: usize,
    delta_over_gamma: f64,
    c_thresh: f64,
) -> Result<Vec<ThresholdCrossing>> {
    if k_max == 0 {
        return Err(Error::InvalidArgument("need at least one site".into()));
    }
    let times = (1..=k_max)
        .map(|k| Ok((k, threshold_time_chain(k as u64, delta_over_gamma, c_thresh)?)))
        .collect::<Result<Vec<_>>>()?;
    crossings_from_times(times)
}

/// Backwards finite-difference front velocity along an arbitrary ray of
/// sites given by their minimum-path summaries, in ray order.
pub fn finite_difference_velocity(
    ray: &[MinPathSummary],
    c_thresh: f64,
) -> Result<Vec<ThresholdCrossing>> {
    if ray.is_empty() {
        return Err(Error::InvalidArgument("need at least one site".into()));
    }
    let times = ray
        .iter()
        .enumerate()
        .map(|(i, summary)| Ok((i + 1, threshold_time(summary, c_thresh)?)))
        .collect::<Result<Vec<_>>>()?;
    crossings_from_times(times)
}

/// Site coordinates in a front snapshot.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SiteCoords {
    Chain(u64),
    Plane(i64, i64),
    Volume(i64, i64, i64),
    /// 1-based qubit index of an arbitrary network.
    Node(usize),
}

#[derive(Clone, Copy, Debug)]
pub struct SnapshotSite {
    pub coords: SiteCoords,
    pub log10_correlation: f64,
}

/// Spatial snapshot of the correlation at one time. Sites whose value rises
/// above the clip level are omitted, as are sites with identically zero
/// correlation, so `t = 0` produces an empty snapshot.
#[derive(Clone, Debug)]
pub struct FrontSnapshot {
    pub t_over_tau: f64,
    pub clip_log10: f64,
    pub sites: Vec<SnapshotSite>,
}

impl FrontSnapshot {
    fn push(&mut self, coords: SiteCoords, value: LogValue) {
        if value.is_zero() {
            return;
        }
        let log10 = value.log10_magnitude();
        if log10 <= self.clip_log10 {
            self.sites.push(SnapshotSite {
                coords,
                log10_correlation: log10,
            });
        }
    }
}

/// Chain snapshot over sites `k_lo..=k_hi`.
pub fn front_snapshot_chain(
    k_lo: u64,
    k_hi: u64,
    delta_over_gamma: f64,
    t_over_tau: f64,
    clip_log10: f64,
    site_cap: usize,
) -> Result<FrontSnapshot> {
    if k_lo == 0 || k_hi < k_lo {
        return Err(Error::InvalidArgument(format!(
            "invalid chain site range {k_lo}..={k_hi}"
        )));
    }
    let requested = (k_hi - k_lo + 1) as usize;
    if requested > site_cap {
        return Err(Error::SiteCapExceeded {
            cap: site_cap,
            requested,
        });
    }
    let mut snapshot = FrontSnapshot {
        t_over_tau,
        clip_log10,
        sites: Vec::new(),
    };
    for k in k_lo..=k_hi {
        snapshot.push(
            SiteCoords::Chain(k),
            chain_correlation(k, delta_over_gamma, t_over_tau),
        );
    }
    Ok(snapshot)
}

/// Square-lattice snapshot over all sites with coordinates in `[-n, n]^2`.
pub fn front_snapshot_lattice2d(
    extent: u64,
    delta_over_gamma: f64,
    t_over_tau: f64,
    clip_log10: f64,
    site_cap: usize,
) -> Result<FrontSnapshot> {
    let side = 2 * extent + 1;
    let requested = (side * side) as usize;
    if requested > site_cap {
        return Err(Error::SiteCapExceeded {
            cap: site_cap,
            requested,
        });
    }
    let mut snapshot = FrontSnapshot {
        t_over_tau,
        clip_log10,
        sites: Vec::new(),
    };
    let n = extent as i64;
    for kx in -n..=n {
        for ky in -n..=n {
            snapshot.push(
                SiteCoords::Plane(kx, ky),
                lattice2d_correlation(
                    kx.unsigned_abs(),
                    ky.unsigned_abs(),
                    delta_over_gamma,
                    t_over_tau,
                ),
            );
        }
    }
    Ok(snapshot)
}

/// Cubic-lattice snapshot over all sites with coordinates in `[-n, n]^3`.
pub fn front_snapshot_lattice3d(
    extent: u64,
    delta_over_gamma: f64,
    t_over_tau: f64,
    clip_log10: f64,
    site_cap: usize,
) -> Result<FrontSnapshot> {
    let side = 2 * extent + 1;
    let requested = (side * side * side) as usize;
    if requested > site_cap {
        return Err(Error::SiteCapExceeded {
            cap: site_cap,
            requested,
        });
    }
    let mut snapshot = FrontSnapshot {
        t_over_tau,
        clip_log10,
        sites: Vec::new(),
    };
    let n = extent as i64;
    for kx in -n..=n {
        for ky in -n..=n {
            for kz in -n..=n {
                snapshot.push(
                    SiteCoords::Volume(kx, ky, kz),
                    lattice3d_correlation(
                        kx.unsigned_abs(),
                        ky.unsigned_abs(),
                        kz.unsigned_abs(),
                        delta_over_gamma,
                        t_over_tau,
                    ),
                );
            }
        }
    }
    Ok(snapshot)
}

/// Snapshot of an arbitrary network from one reference qubit, using the
/// general path-sum form per site. Unreachable sites are omitted (their
/// correlation vanishes at every order of the expansion).
pub fn front_snapshot_graph(
    graph: &crate::graph::CouplingGraph,
    reference: usize,
    t_over_tau: f64,
    clip_log10: f64,
) -> Result<FrontSnapshot> {
    let summaries = graph.min_path_summaries_from(reference)?;
    let mut snapshot = FrontSnapshot {
        t_over_tau,
        clip_log10,
        sites: Vec::new(),
    };
    for summary in &summaries {
        if summary.route.is_some() {
            snapshot.push(
                SiteCoords::Node(summary.target),
                general_correlation(summary, t_over_tau)?,
            );
        }
    }
    Ok(snapshot)
}
