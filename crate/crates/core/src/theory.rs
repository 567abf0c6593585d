//! Closed-form tradeoff curves in the small-library regime.
//!
//! All curves are the dominant terms of asymptotic expressions: the vanishing
//! corrections have no computable form at finite size and are dropped. Baselines are
//! order-of-growth reference lines with unit constants.

use crate::{Error, Result};

/// Which expression produced a point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CaseTag {
    Achievable(u8),
    Outer(u8),
    Simulated,
    OrderReference,
}

impl std::fmt::Display for CaseTag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CaseTag::Achievable(k) => write!(f, "achievable_case{k}"),
            CaseTag::Outer(k) => write!(f, "outer_case{k}"),
            CaseTag::Simulated => write!(f, "simulated"),
            CaseTag::OrderReference => write!(f, "order_reference"),
        }
    }
}

impl std::str::FromStr for CaseTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parse_case = |rest: &str| {
            rest.parse::<u8>()
                .map_err(|_| Error::invalid(format!("unknown case tag {s:?}")))
        };
        if let Some(rest) = s.strip_prefix("achievable_case") {
            return Ok(CaseTag::Achievable(parse_case(rest)?));
        }
        if let Some(rest) = s.strip_prefix("outer_case") {
            return Ok(CaseTag::Outer(parse_case(rest)?));
        }
        match s {
            "simulated" => Ok(CaseTag::Simulated),
            "order_reference" => Ok(CaseTag::OrderReference),
            _ => Err(Error::invalid(format!("unknown case tag {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SourceTag {
    Achievable,
    Outer,
    Simulated,
    BaselineBroadcast,
    BaselineCoded,
}

impl SourceTag {
    pub fn as_str(&self) -> &'static str {
        match self {
            SourceTag::Achievable => "achievable",
            SourceTag::Outer => "outer",
            SourceTag::Simulated => "simulated",
            SourceTag::BaselineBroadcast => "baseline_broadcast",
            SourceTag::BaselineCoded => "baseline_coded",
        }
    }
}

impl std::fmt::Display for SourceTag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for SourceTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "achievable" => Ok(SourceTag::Achievable),
            "outer" => Ok(SourceTag::Outer),
            "simulated" => Ok(SourceTag::Simulated),
            "baseline_broadcast" => Ok(SourceTag::BaselineBroadcast),
            "baseline_coded" => Ok(SourceTag::BaselineCoded),
            _ => Err(Error::invalid(format!("unknown source tag {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvePoint {
    /// Outage probability.
    pub p: f64,
    /// Throughput in bit/s/Hz.
    pub t: f64,
    pub case: CaseTag,
    pub source: SourceTag,
}

/// Points ordered by non-decreasing outage.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct TradeoffCurve {
    pub points: Vec<CurvePoint>,
    pub warnings: Vec<String>,
}

impl TradeoffCurve {
    pub fn new(mut points: Vec<CurvePoint>) -> Self {
        points.sort_by(|a, b| a.p.total_cmp(&b.p));
        TradeoffCurve {
            points,
            warnings: Vec::new(),
        }
    }

    pub fn extend(&mut self, other: TradeoffCurve) {
        self.points.extend(other.points);
        self.points.sort_by(|a, b| a.p.total_cmp(&b.p));
        self.warnings.extend(other.warnings);
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    Small,
    Large,
    VeryLarge,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegimeReport {
    pub regime: Regime,
    /// `m / n^alpha`.
    pub ratio: f64,
    /// Boundary between the large and very large regimes.
    pub threshold: f64,
}

/// Default cut-off on `m / n^alpha` below which a finite network counts as small-library.
pub const DEFAULT_SMALL_EPSILON: f64 = 0.1;

pub fn alpha(gamma_r: f64) -> f64 {
    (2.0 - gamma_r) / (1.0 - gamma_r)
}

fn check_gamma(gamma_r: f64) -> Result<()> {
    if !(gamma_r > 0.0 && gamma_r < 1.0) {
        return Err(Error::invalid(format!(
            "closed-form curves need 0 < gamma_r < 1, got {gamma_r}"
        )));
    }
    Ok(())
}

pub fn regime_classify(n: usize, m: usize, gamma_r: f64, epsilon_small: f64) -> Result<RegimeReport> {
    check_gamma(gamma_r)?;
    let a = alpha(gamma_r);
    let ratio = m as f64 / (n as f64).powf(a);
    let threshold = (gamma_r.powf(gamma_r) / (1.0 - gamma_r)).powf(a / (2.0 - gamma_r));
    let regime = if ratio < epsilon_small {
        Regime::Small
    } else if ratio <= threshold {
        Regime::Large
    } else {
        Regime::VeryLarge
    };
    Ok(RegimeReport {
        regime,
        ratio,
        threshold,
    })
}

/// Network and scheme parameters for the closed-form curves.
#[derive(Debug, Clone, PartialEq)]
pub struct TheoryParams {
    pub gamma_r: f64,
    pub m: usize,
    pub n: usize,
    /// Reuse factor `K`.
    pub reuse: f64,
    /// Link rate `C`.
    pub rate: f64,
    pub delta: f64,
    /// Defaults to `gamma_r`.
    pub rho1: Option<f64>,
    /// Defaults to its lower bound `((1 - gamma_r) / gamma_r^gamma_r)^(1 / (2 - gamma_r))`.
    pub rho2: Option<f64>,
    /// Defaults to `rho4`.
    pub rho3: Option<f64>,
}

impl TheoryParams {
    pub fn new(gamma_r: f64, m: usize, n: usize) -> Self {
        TheoryParams {
            gamma_r,
            m,
            n,
            reuse: 4.0,
            rate: 1.0,
            delta: 1.0,
            rho1: None,
            rho2: None,
            rho3: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        check_gamma(self.gamma_r)?;
        if self.m == 0 || self.n == 0 {
            return Err(Error::invalid("m and n must be >= 1"));
        }
        if !(self.reuse >= 1.0) || !(self.rate > 0.0) || !(self.delta > 0.0) {
            return Err(Error::invalid("need K >= 1, C > 0 and Delta > 0"));
        }
        if let Some(r1) = self.rho1 {
            if !(r1 >= self.gamma_r) {
                return Err(Error::invalid(format!(
                    "rho1 = {r1} is below its lower bound gamma_r = {}",
                    self.gamma_r
                )));
            }
        }
        if let Some(r2) = self.rho2 {
            let floor = self.rho2_floor();
            if !(r2 >= floor * (1.0 - 1e-12)) {
                return Err(Error::invalid(format!(
                    "rho2 = {r2} is below its lower bound {floor}"
                )));
            }
        }
        if let Some(r3) = self.rho3 {
            if !(r3 > 0.0) {
                return Err(Error::invalid("rho3 must be positive"));
            }
        }
        Ok(())
    }

    pub fn alpha(&self) -> f64 {
        alpha(self.gamma_r)
    }

    fn gg(&self) -> f64 {
        self.gamma_r.powf(self.gamma_r)
    }

    /// `((1 - gamma_r) / gamma_r^gamma_r)`
    fn spread(&self) -> f64 {
        (1.0 - self.gamma_r) / self.gg()
    }

    /// `A = gamma_r^(gamma_r / (1 - gamma_r))`.
    pub fn big_a(&self) -> f64 {
        self.gamma_r.powf(self.gamma_r / (1.0 - self.gamma_r))
    }

    /// `a(gamma_r) = gamma_r^gamma_r ((1 - gamma_r) / gamma_r^gamma_r)^(1/alpha)`.
    pub fn a_gamma(&self) -> f64 {
        self.gg() * self.spread().powf(1.0 / self.alpha())
    }

    pub fn rho1(&self) -> f64 {
        self.rho1.unwrap_or(self.gamma_r)
    }

    pub fn rho2_floor(&self) -> f64 {
        self.spread().powf(1.0 / (2.0 - self.gamma_r))
    }

    pub fn rho2(&self) -> f64 {
        self.rho2.unwrap_or_else(|| self.rho2_floor())
    }

    pub fn rho3(&self) -> Result<f64> {
        match self.rho3 {
            Some(r) => Ok(r),
            None => solve_rho4(self.gamma_r, self.delta),
        }
    }

    /// `B = gamma_r^gamma_r rho2^(1 - gamma_r) / (1 + gamma_r^gamma_r rho2^(2 - gamma_r))`.
    pub fn big_b(&self) -> f64 {
        let g = self.gamma_r;
        let r2 = self.rho2();
        self.gg() * r2.powf(1.0 - g) / (1.0 + self.gg() * r2.powf(2.0 - g))
    }

    /// `D = a / (1 + a ((1 - gamma_r) / gamma_r^gamma_r)^(1 / (2 - gamma_r)))`.
    pub fn big_d(&self) -> f64 {
        let a = self.a_gamma();
        a / (1.0 + a * self.spread().powf(1.0 / (2.0 - self.gamma_r)))
    }

    /// `m^(-1/alpha)`.
    pub fn m_scale(&self) -> f64 {
        (self.m as f64).powf(-1.0 / self.alpha())
    }

    fn slot_rate(&self) -> f64 {
        self.rate / self.reuse
    }

    fn exponent(&self) -> f64 {
        1.0 / (1.0 - self.gamma_r)
    }

    /// Outage reached by clusters of `g_c` nodes in the achievable scheme.
    pub fn cluster_outage(&self, g_c: f64) -> f64 {
        1.0 - self.gg() * (g_c / self.m as f64).powf(1.0 - self.gamma_r)
    }

    /// Case-2 achievable throughput `C A / (K m (1 - p)^(1 / (1 - gamma_r)))`.
    pub fn achievable_case2(&self, p: f64) -> f64 {
        self.slot_rate() * self.big_a() / (self.m as f64 * (1.0 - p).powf(self.exponent()))
    }

    /// Case-1 outer throughput `16 C / (Delta^2 m (1 - p)^(1 / (1 - gamma_r)))`.
    pub fn outer_case1(&self, p: f64) -> f64 {
        16.0 * self.rate
            / (self.delta * self.delta * self.m as f64 * (1.0 - p).powf(self.exponent()))
    }

    /// `f1(rho) = 16 C / (Delta^2 rho) (1 - exp(-(1 + 3 Delta / 2)^(2 (2 - gamma_r)) rho^(2 - gamma_r)))`.
    pub fn f1(&self, rho: f64) -> f64 {
        let beta = (1.0 + 1.5 * self.delta).powi(2);
        let e = 2.0 - self.gamma_r;
        16.0 * self.rate / (self.delta * self.delta * rho) * -(-(beta * rho).powf(e)).exp_m1()
    }

    fn achievable_bounds(&self) -> AchievableBounds {
        let g = self.gamma_r;
        let s = self.m_scale();
        AchievableBounds {
            case2_low: 1.0 - g,
            case2_high: 1.0 - self.gg() * s,
            case3_low: 1.0 - self.gg() * self.rho2().powf(1.0 - g) * s,
            case4_low: 1.0 - self.a_gamma() * s,
        }
    }
}

struct AchievableBounds {
    case2_low: f64,
    case2_high: f64,
    case3_low: f64,
    case4_low: f64,
}

/// Grid along which a curve is evaluated.
#[derive(Debug, Clone, PartialEq)]
pub enum CurveGrid {
    /// Outage probabilities; each is assigned to the case whose interval contains it.
    Outage(Vec<f64>),
    /// Cluster sizes `g_c` (achievable case 2) or `g_R` (outer case 1).
    ClusterSizes(Vec<f64>),
}

fn small_regime_warning(params: &TheoryParams) -> Option<String> {
    match regime_classify(params.n, params.m, params.gamma_r, DEFAULT_SMALL_EPSILON) {
        Ok(r) if r.regime != Regime::Small => Some(format!(
            "m / n^alpha = {:.3e} is outside the small-library regime; dominant terms may not apply",
            r.ratio
        )),
        _ => None,
    }
}

fn geometric(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    if count < 2 || hi <= lo {
        return vec![lo];
    }
    let ratio = (hi / lo).ln() / (count - 1) as f64;
    (0..count).map(|i| lo * (ratio * i as f64).exp()).collect()
}

/// Achievable tradeoff of random caching with clustering.
pub fn achievable_curve(params: &TheoryParams, grid: &CurveGrid) -> Result<TradeoffCurve> {
    params.validate()?;
    let g = params.gamma_r;
    let m = params.m as f64;
    let s = params.m_scale();
    let b = params.achievable_bounds();
    let mut points = Vec::new();
    let mut warnings: Vec<String> = small_regime_warning(params).into_iter().collect();
    let point = |p: f64, t: f64, k: u8| CurvePoint {
        p,
        t,
        case: CaseTag::Achievable(k),
        source: SourceTag::Achievable,
    };

    match grid {
        CurveGrid::ClusterSizes(sizes) => {
            for &g_c in sizes {
                if !(g_c > 0.0) {
                    return Err(Error::invalid(format!("cluster size must be positive, got {g_c}")));
                }
                let p = params.cluster_outage(g_c);
                points.push(point(p, params.achievable_case2(p), 2));
            }
        }
        CurveGrid::Outage(ps) => {
            for &p in ps {
                if !(0.0..=1.0).contains(&p) {
                    return Err(Error::invalid(format!("outage {p} outside [0, 1]")));
                }
                if p >= b.case4_low {
                    points.push(point(p, params.slot_rate() * params.big_d() * s, 4));
                } else if p >= b.case3_low {
                    points.push(point(p, params.slot_rate() * params.big_b() * s, 3));
                } else if p >= b.case2_low && p <= b.case2_high {
                    points.push(point(p, params.achievable_case2(p), 2));
                } else if p > 0.0 && p < b.case2_low {
                    let rho1 = g - (p / (1.0 - g)).ln();
                    points.push(point(p, params.slot_rate() / (rho1 * m), 1));
                } else {
                    warnings.push(format!("outage {p} falls between achievable cases; skipped"));
                }
            }
        }
    }
    let mut curve = TradeoffCurve::new(points);
    curve.warnings = warnings;
    Ok(curve)
}

/// All four achievable cases on default grids: `rho1` from its lower bound upward,
/// `g_c` geometric between `m^(1/alpha)` and `gamma_r m`, the case-3 interval
/// endpoints and the case-4 tail.
pub fn default_achievable_curve(params: &TheoryParams, points_per_case: usize) -> Result<TradeoffCurve> {
    params.validate()?;
    let g = params.gamma_r;
    let m = params.m as f64;
    let s = params.m_scale();
    let b = params.achievable_bounds();
    let mut points = Vec::new();
    let mut warnings: Vec<String> = small_regime_warning(params).into_iter().collect();
    let mk = |p: f64, t: f64, k: u8| CurvePoint {
        p,
        t,
        case: CaseTag::Achievable(k),
        source: SourceTag::Achievable,
    };

    let rho1_lo = params.rho1();
    for rho1 in geometric(rho1_lo, rho1_lo * 20.0, points_per_case) {
        let p = (1.0 - g) * (g - rho1).exp();
        points.push(mk(p, params.slot_rate() / (rho1 * m), 1));
    }
    let g_lo = m.powf(1.0 / params.alpha());
    let g_hi = g * m;
    if g_hi > g_lo {
        for g_c in geometric(g_lo, g_hi, points_per_case) {
            let p = params.cluster_outage(g_c);
            points.push(mk(p, params.achievable_case2(p), 2));
        }
    } else {
        warnings.push("cluster-size range for case 2 is empty at this m".into());
    }
    if b.case3_low <= b.case4_low {
        let t3 = params.slot_rate() * params.big_b() * s;
        points.push(mk(b.case3_low, t3, 3));
        if b.case4_low > b.case3_low {
            points.push(mk(b.case4_low, t3, 3));
        }
    } else {
        warnings.push("case-3 outage interval is empty at this m".into());
    }
    let t4 = params.slot_rate() * params.big_d() * s;
    let steps = points_per_case.max(2);
    for i in 0..steps {
        let p = b.case4_low + (1.0 - b.case4_low) * i as f64 / (steps - 1) as f64;
        points.push(mk(p, t4, 4));
    }
    let mut curve = TradeoffCurve::new(points);
    curve.warnings = warnings;
    Ok(curve)
}

/// Positive root of `((1 + 3 Delta / 2)^2 rho)^(2 - gamma_r) = ln(1 + (2 - gamma_r) ((1 + 3 Delta / 2)^2 rho)^(2 - gamma_r))`.
///
/// With `y = (beta rho)^(2 - gamma_r)` the equation is `y = ln(1 + c y)`, `c = 2 - gamma_r > 1`,
/// which has the trivial root `y = 0` and exactly one positive root, found by bisection.
pub fn solve_rho4(gamma_r: f64, delta: f64) -> Result<f64> {
    check_gamma(gamma_r)?;
    if !(delta > 0.0) || !delta.is_finite() {
        return Err(Error::invalid(format!("Delta must be > 0, got {delta}")));
    }
    let c = 2.0 - gamma_r;
    let h = |y: f64| (c * y).ln_1p() - y;
    // ln(1 + x) >= x - x^2 / 2 gives h > 0 at (c - 1) / c^2.
    let mut lo = (c - 1.0) / (c * c);
    let mut hi = 1.0;
    const CAP: usize = 200;
    let mut expansions = 0;
    while h(hi) >= 0.0 {
        lo = hi;
        hi *= 2.0;
        expansions += 1;
        if expansions > 64 {
            return Err(Error::NoConvergence(expansions));
        }
    }
    let mut iterations = 0;
    while hi - lo > 1e-15 * hi {
        let mid = 0.5 * (lo + hi);
        if h(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        iterations += 1;
        if iterations > CAP {
            return Err(Error::NoConvergence(iterations));
        }
    }
    let y = 0.5 * (lo + hi);
    let beta = (1.0 + 1.5 * delta).powi(2);
    Ok(y.powf(1.0 / c) / beta)
}

/// Residual of the `rho4` equation in its original form.
pub fn rho4_residual(gamma_r: f64, delta: f64, rho: f64) -> f64 {
    let beta = (1.0 + 1.5 * delta).powi(2);
    let y = (beta * rho).powf(2.0 - gamma_r);
    y - ((2.0 - gamma_r) * y).ln_1p()
}

impl TheoryParams {
    fn outer_bounds(&self) -> Result<(f64, f64, f64)> {
        let rho4 = solve_rho4(self.gamma_r, self.delta)?;
        let rho3 = self.rho3()?;
        let s = self.m_scale();
        let e = 1.0 - self.gamma_r;
        Ok((rho4, 1.0 - rho3.powf(e) * s, 1.0 - rho4.powf(e) * s))
    }

    /// Outer bound at outage `p`, with the case that applies.
    pub fn outer_at(&self, p: f64) -> Result<(f64, u8)> {
        let (rho4, case2_low, case3_low) = self.outer_bounds()?;
        let s = self.m_scale();
        Ok(if p >= case3_low {
            (self.f1(rho4) * s, 3)
        } else if p >= case2_low {
            let rho3 = self.rho3()?;
            (self.outer_case1(p).min(self.f1(rho3) * s), 2)
        } else {
            (self.outer_case1(p), 1)
        })
    }
}

/// Outer bound on the optimal tradeoff.
///
/// Case 1 is parametrized by `g_R` as `p = 1 - (g_R / n)^(1 - gamma_r)` while its
/// throughput scales with `m`, exactly as the bound is stated.
pub fn outer_bound_curve(params: &TheoryParams, grid: &CurveGrid) -> Result<TradeoffCurve> {
    params.validate()?;
    let mut points = Vec::new();
    let mut warnings: Vec<String> = small_regime_warning(params).into_iter().collect();
    let mk = |p: f64, t: f64, k: u8| CurvePoint {
        p,
        t,
        case: CaseTag::Outer(k),
        source: SourceTag::Outer,
    };
    match grid {
        CurveGrid::ClusterSizes(sizes) => {
            let cap = 16.0 * params.n as f64 / (params.delta * params.delta);
            for &g_r in sizes {
                if !(g_r > 0.0) || g_r > cap * (1.0 + 1e-12) {
                    return Err(Error::invalid(format!(
                        "g_R = {g_r} outside (0, 16 n / Delta^2 = {cap}]"
                    )));
                }
                let p = 1.0 - (g_r / params.n as f64).powf(1.0 - params.gamma_r);
                if p < 0.0 {
                    warnings.push(format!("g_R = {g_r} gives negative outage; skipped"));
                    continue;
                }
                points.push(mk(p, params.outer_case1(p), 1));
            }
        }
        CurveGrid::Outage(ps) => {
            for &p in ps {
                if !(0.0..=1.0).contains(&p) {
                    return Err(Error::invalid(format!("outage {p} outside [0, 1]")));
                }
                let (t, case) = params.outer_at(p)?;
                points.push(mk(p, t, case));
            }
        }
    }
    let mut curve = TradeoffCurve::new(points);
    curve.warnings = warnings;
    Ok(curve)
}

/// Outer bound on default grids: `g_R` geometric between `m^(1/alpha)` and
/// `16 n / Delta^2` (negative-outage points dropped), then the case-2/3 tail.
pub fn default_outer_curve(params: &TheoryParams, points_per_case: usize) -> Result<TradeoffCurve> {
    params.validate()?;
    let lo = (params.m as f64).powf(1.0 / params.alpha());
    let hi = 16.0 * params.n as f64 / (params.delta * params.delta);
    let mut curve = outer_bound_curve(params, &CurveGrid::ClusterSizes(geometric(lo, hi, points_per_case)))?;
    curve.warnings.retain(|w| !w.contains("negative outage"));
    let (_, case2_low, case3_low) = params.outer_bounds()?;
    let start = case2_low.min(case3_low).max(0.0);
    let steps = points_per_case.max(2);
    let tail: Vec<f64> = (0..steps)
        .map(|i| start + (1.0 - start) * i as f64 / (steps - 1) as f64)
        .collect();
    curve.extend(outer_bound_curve(params, &CurveGrid::Outage(tail))?);
    curve.warnings.dedup();
    Ok(curve)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Baselines {
    /// Cellular broadcast, order `1/n`.
    pub broadcast: f64,
    /// Coded multicast, order `max(1/n, 1/m)`.
    pub coded_multicast: f64,
}

pub fn baseline_throughputs(n: usize, m: usize, rate: f64) -> Result<Baselines> {
    if n == 0 || m == 0 {
        return Err(Error::invalid("n and m must be >= 1"));
    }
    let (n, m) = (n as f64, m as f64);
    Ok(Baselines {
        broadcast: rate / n,
        coded_multicast: rate * (1.0 / n).max(1.0 / m),
    })
}

impl Baselines {
    /// Zero-outage reference points.
    pub fn curve(&self) -> TradeoffCurve {
        TradeoffCurve::new(vec![
            CurvePoint {
                p: 0.0,
                t: self.broadcast,
                case: CaseTag::OrderReference,
                source: SourceTag::BaselineBroadcast,
            },
            CurvePoint {
                p: 0.0,
                t: self.coded_multicast,
                case: CaseTag::OrderReference,
                source: SourceTag::BaselineCoded,
            },
        ])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn alpha_values() {
        assert_eq!(alpha(0.5), 3.0);
        assert!((alpha(0.6) - 3.5).abs() < 1e-12);
    }

    #[test]
    fn reference_network_is_small_library() {
        let r = regime_classify(10_000, 1000, 0.6, DEFAULT_SMALL_EPSILON).unwrap();
        assert_eq!(r.regime, Regime::Small);
        assert!((r.ratio - 1e-11).abs() < 1e-24);
    }

    #[test]
    fn regime_threshold_gamma_half() {
        // tau = (0.5^0.5 / 0.5)^(3 / 1.5) = (sqrt 2)^2 = 2.
        let n: usize = 100;
        let m = 1_000_000; // n^3
        let r = regime_classify(n, m, 0.5, DEFAULT_SMALL_EPSILON).unwrap();
        assert!((r.ratio - 1.0).abs() < 1e-12);
        assert!((r.threshold - 2.0).abs() < 1e-12);
        assert_eq!(r.regime, Regime::Large);
        let r = regime_classify(n, 3_000_000, 0.5, DEFAULT_SMALL_EPSILON).unwrap();
        assert_eq!(r.regime, Regime::VeryLarge);
    }

    #[test]
    fn constants_gamma_half() {
        let p = TheoryParams::new(0.5, 1000, 10_000);
        assert!((p.big_a() - 0.5).abs() < 1e-15);
        // 0.5^0.5 * (0.5 / 0.5^0.5)^(1/3) = 2^(-1/2) * 2^(-1/6) = 2^(-2/3)
        assert!((p.a_gamma() - 2f64.powf(-2.0 / 3.0)).abs() < 1e-15);
        assert!((p.a_gamma() - 0.629_960_524_947_436_6).abs() < 1e-15);
    }

    #[test]
    fn case2_point_reference_network() {
        let mut p = TheoryParams::new(0.6, 1000, 10_000);
        p.reuse = 4.0;
        let curve = achievable_curve(&p, &CurveGrid::ClusterSizes(vec![100.0])).unwrap();
        let pt = curve.points[0];
        let expected_p = 1.0 - 0.6f64.powf(0.6) * 0.1f64.powf(0.4);
        assert!((pt.p - expected_p).abs() < 1e-15);
        assert!((pt.t - 2.5e-3).abs() < 1e-15);
        assert_eq!(pt.case, CaseTag::Achievable(2));
    }

    #[test]
    fn rho4_gamma_half_delta_one() {
        let rho4 = solve_rho4(0.5, 1.0).unwrap();
        let y = (6.25 * rho4).powf(1.5);
        assert!((y - 0.762).abs() < 1e-3);
        assert!((rho4 - 0.133).abs() < 1e-3);
        assert!(rho4_residual(0.5, 1.0, rho4).abs() < 1e-10);
        assert!(rho4 > 0.0);
    }

    #[test]
    fn rho4_rejects_bad_inputs() {
        assert!(solve_rho4(1.0, 1.0).is_err());
        assert!(solve_rho4(0.5, 0.0).is_err());
    }

    #[test]
    fn f1_large_rho_limit() {
        let p = TheoryParams::new(0.5, 1000, 10_000);
        let rho = 1e3;
        assert!((p.f1(rho) - 16.0 / rho).abs() < 1e-15);
    }

    #[test]
    fn baselines() {
        let b = baseline_throughputs(10_000, 1000, 1.0).unwrap();
        assert_eq!((b.broadcast, b.coded_multicast), (1e-4, 1e-3));
        let b = baseline_throughputs(500, 500, 2.0).unwrap();
        assert_eq!(b.broadcast, b.coded_multicast);
        let b = baseline_throughputs(100, 5000, 1.0).unwrap();
        assert_eq!(b.coded_multicast, 0.01);
    }

    #[test]
    fn parameter_bounds_enforced() {
        let mut p = TheoryParams::new(0.5, 1000, 10_000);
        p.rho1 = Some(0.4);
        assert!(achievable_curve(&p, &CurveGrid::Outage(vec![0.5])).is_err());
        let mut p = TheoryParams::new(0.5, 1000, 10_000);
        p.rho2 = Some(0.1);
        assert!(p.validate().is_err());
        let p = TheoryParams::new(0.5, 1000, 10_000);
        assert!(outer_bound_curve(&p, &CurveGrid::ClusterSizes(vec![1e9])).is_err());
    }

    #[test]
    fn case3_interval_degenerate_at_default_rho2() {
        let p = TheoryParams::new(0.4, 1000, 10_000);
        let b = p.achievable_bounds();
        assert!((b.case3_low - b.case4_low).abs() < 1e-12);
    }

    #[test]
    fn outage_grid_cases_are_continuous_at_case1_case2_boundary() {
        let p = TheoryParams::new(0.3, 1000, 10_000);
        let edge = 1.0 - 0.3;
        let c = achievable_curve(&p, &CurveGrid::Outage(vec![edge - 1e-12, edge])).unwrap();
        assert_eq!(c.points[0].case, CaseTag::Achievable(1));
        assert_eq!(c.points[1].case, CaseTag::Achievable(2));
        assert!((c.points[0].t - c.points[1].t).abs() / c.points[1].t < 1e-9);
    }

    #[test]
    fn case2_decreases_as_outage_tightens() {
        let p = TheoryParams::new(0.6, 1000, 10_000);
        let sizes: Vec<f64> = (4..=600).step_by(7).map(|g| g as f64).collect();
        let c = achievable_curve(&p, &CurveGrid::ClusterSizes(sizes)).unwrap();
        for w in c.points.windows(2) {
            assert!(w[0].p <= w[1].p);
            assert!(w[0].t <= w[1].t);
        }
    }

    #[test]
    fn default_curves_are_sorted_and_nonempty() {
        let p = TheoryParams::new(0.6, 1000, 10_000);
        for c in [default_achievable_curve(&p, 20).unwrap(), default_outer_curve(&p, 20).unwrap()] {
            assert!(!c.is_empty());
            assert!(c.points.windows(2).all(|w| w[0].p <= w[1].p));
            assert!(c.points.iter().all(|pt| pt.t >= 0.0 && (0.0..=1.0).contains(&pt.p)));
        }
    }

    #[test]
    fn tag_round_trip() {
        for tag in [CaseTag::Achievable(3), CaseTag::Outer(1), CaseTag::Simulated, CaseTag::OrderReference] {
            assert_eq!(tag.to_string().parse::<CaseTag>().unwrap(), tag);
        }
        for s in ["achievable", "outer", "simulated", "baseline_broadcast", "baseline_coded"] {
            assert_eq!(s.parse::<SourceTag>().unwrap().as_str(), s);
        }
    }
}
