//! Interval sets E₂ and E₄, the deformation angle cos φ on them, and their
//! Akhiezer weights.
//!
//! ```text
//! E₂ = [-1,-b] ∪ [b,1]                          0 <= b < 1
//! E₄ = [-1,-b] ∪ [-√(1-b²), √(1-b²)] ∪ [b,1]    1/√2 <= b < 1
//! ```

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Relative slack used when deciding whether a point is on an endpoint.
pub const ENDPOINT_TOL: f64 = 1e-14;

/// Smallest admissible weight exponent is `-1/2 + MU_MARGIN` (exclusive).
pub const MU_MARGIN: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SetKind {
    /// `[-1, 1]`
    FullRange,
    /// `[0, 1]`
    HalfRange,
    /// One symmetric gap.
    E2,
    /// Two symmetric gaps.
    E4,
}

impl SetKind {
    pub fn name(self) -> &'static str {
        match self {
            SetKind::FullRange => "full",
            SetKind::HalfRange => "half",
            SetKind::E2 => "e2",
            SetKind::E4 => "e4",
        }
    }

    /// Checks `b` against the kind's legal range. Full and half range ignore it.
    pub fn check_gap(self, b: f64) -> Result<()> {
        match self {
            SetKind::FullRange | SetKind::HalfRange => Ok(()),
            SetKind::E2 => {
                if (0.0..1.0).contains(&b) {
                    Ok(())
                } else {
                    Err(Error::domain(format!("E2 needs 0 <= b < 1, got b = {b}")))
                }
            }
            SetKind::E4 => {
                if b >= e4_lower_bound() && b < 1.0 {
                    Ok(())
                } else {
                    Err(Error::domain(format!(
                        "E4 needs 1/sqrt(2) <= b < 1, got b = {b}"
                    )))
                }
            }
        }
    }
}

impl fmt::Display for SetKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SetKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "full" | "fullrange" => Ok(SetKind::FullRange),
            "half" | "halfrange" => Ok(SetKind::HalfRange),
            "e2" => Ok(SetKind::E2),
            "e4" => Ok(SetKind::E4),
            other => Err(Error::domain(format!("unknown set `{other}`"))),
        }
    }
}

fn e4_lower_bound() -> f64 {
    FRAC_1_SQRT_2 * (1.0 - ENDPOINT_TOL)
}

/// True when an E₄ parameter is (numerically) the gap-closing value 1/√2.
pub fn e4_is_degenerate(b: f64) -> bool {
    (b - FRAC_1_SQRT_2).abs() <= ENDPOINT_TOL
}

/// `√(1-b²)`, computed as `√((1-b)(1+b))`. Exactly `b` in the degenerate E₄ case.
pub fn inner_edge(b: f64) -> f64 {
    if e4_is_degenerate(b) {
        FRAC_1_SQRT_2
    } else {
        ((1.0 - b) * (1.0 + b)).sqrt()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
    /// The weight has an inverse-square-root singularity at `lo`.
    pub lo_singular: bool,
    /// The weight has an inverse-square-root singularity at `hi`.
    pub hi_singular: bool,
}

impl Interval {
    fn new(lo: f64, hi: f64, lo_singular: bool, hi_singular: bool) -> Self {
        debug_assert!(lo < hi);
        Interval {
            lo,
            hi,
            lo_singular,
            hi_singular,
        }
    }

    pub fn contains(&self, x: f64) -> bool {
        let slack = ENDPOINT_TOL * x.abs().max(1.0);
        x >= self.lo - slack && x <= self.hi + slack
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }
}

/// An ordered union of disjoint closed intervals.
#[derive(Debug, Clone, PartialEq)]
pub struct IntervalSet {
    pub kind: SetKind,
    pub b: f64,
    pub intervals: Vec<Interval>,
}

impl IntervalSet {
    pub fn contains(&self, x: f64) -> bool {
        contains(self, x)
    }

    /// Total length of the set.
    pub fn measure(&self) -> f64 {
        self.intervals.iter().map(|i| i.hi - i.lo).sum()
    }

    /// Endpoints where the weight is singular.
    pub fn singular_points(&self) -> Vec<f64> {
        let mut pts = Vec::new();
        for iv in &self.intervals {
            if iv.lo_singular {
                pts.push(iv.lo);
            }
            if iv.hi_singular {
                pts.push(iv.hi);
            }
        }
        pts
    }
}

/// True iff `x` lies in some interval of `set` (endpoints included, with a
/// relative slack of [`ENDPOINT_TOL`]).
pub fn contains(set: &IntervalSet, x: f64) -> bool {
    set.intervals.iter().any(|iv| iv.contains(x))
}

pub fn make_set(kind: SetKind, b: f64) -> Result<IntervalSet> {
    kind.check_gap(b)?;
    let intervals = match kind {
        SetKind::FullRange => vec![Interval::new(-1.0, 1.0, true, true)],
        SetKind::HalfRange => vec![Interval::new(0.0, 1.0, false, true)],
        SetKind::E2 if b == 0.0 => vec![Interval::new(-1.0, 1.0, true, true)],
        // w_E₂ = √((x+b) / ((1-x²)(x-b))): singular at ±1 and b
        SetKind::E2 => vec![
            Interval::new(-1.0, -b, true, false),
            Interval::new(b, 1.0, true, true),
        ],
        SetKind::E4 if e4_is_degenerate(b) => vec![Interval::new(-1.0, 1.0, true, true)],
        // w_E₄ singular at ±1, b and -√(1-b²)
        SetKind::E4 => {
            let c = inner_edge(b);
            vec![
                Interval::new(-1.0, -b, true, false),
                Interval::new(-c, c, true, false),
                Interval::new(b, 1.0, true, true),
            ]
        }
    };
    let b = match kind {
        SetKind::FullRange | SetKind::HalfRange => 0.0,
        _ => b,
    };
    Ok(IntervalSet { kind, b, intervals })
}

fn near(x: f64, r: f64) -> bool {
    (x - r).abs() <= ENDPOINT_TOL * x.abs().max(1.0)
}

fn require_member(kind: SetKind, x: f64, b: f64) -> Result<IntervalSet> {
    let set = make_set(kind, b)?;
    if !set.contains(x) {
        return Err(Error::domain(format!("x = {x} is not in {kind}(b = {b})")));
    }
    Ok(set)
}

/// `sign(x) √((x² - b²) / (1 - b²))` on E₂.
pub fn cos_phi_e2(x: f64, b: f64) -> Result<f64> {
    require_member(SetKind::E2, x, b)?;
    let num = ((x.abs() - b) * (x.abs() + b)).max(0.0);
    let mag = (num / ((1.0 - b) * (1.0 + b))).sqrt().min(1.0);
    Ok(if x < 0.0 { -mag } else { mag })
}

/// cos φ on E₄.
///
/// The magnitude is `√|(x²-b²)(x²-c²)| / (bc)` with `c = √(1-b²)`, which is
/// the square-root ratio times the degree-two Pell polynomial
/// `(x-b)(x+c)/(bc)` after cancelling the common factors. The sign is `+`
/// on the outer intervals and `-` on the middle interval.
pub fn cos_phi_e4(x: f64, b: f64) -> Result<f64> {
    require_member(SetKind::E4, x, b)?;
    let c = inner_edge(b);
    let ax = x.abs();
    let prod = ((ax - b) * (ax + b) * (ax - c) * (ax + c)).abs();
    let mag = (prod.sqrt() / (b * c)).min(1.0);
    Ok(if ax <= c { -mag } else { mag })
}

/// Akhiezer weight of E₂, `√((x+b) / ((1-x²)(x-b)))`.
pub fn weight_e2(x: f64, b: f64) -> Result<f64> {
    require_member(SetKind::E2, x, b)?;
    if near(x, 1.0) || near(x, -1.0) {
        return Err(Error::Pole { at: x });
    }
    if b == 0.0 {
        return Ok(1.0 / ((1.0 - x) * (1.0 + x)).sqrt());
    }
    if near(x, b) {
        return Err(Error::Pole { at: x });
    }
    let ratio = (x + b) / ((1.0 - x) * (1.0 + x) * (x - b));
    Ok(ratio.max(0.0).sqrt())
}

/// Akhiezer weight of E₄,
/// `√((x-c)(x+b) / ((1-x²)(x-b)(x+c)))` with `c = √(1-b²)`.
pub fn weight_e4(x: f64, b: f64) -> Result<f64> {
    require_member(SetKind::E4, x, b)?;
    if near(x, 1.0) || near(x, -1.0) {
        return Err(Error::Pole { at: x });
    }
    let c = inner_edge(b);
    if e4_is_degenerate(b) {
        // the gap factors cancel in pairs
        return Ok(1.0 / ((1.0 - x) * (1.0 + x)).sqrt());
    }
    if near(x, b) || near(x, -c) {
        return Err(Error::Pole { at: x });
    }
    let ratio = ((x - c) * (x + b)) / ((1.0 - x) * (1.0 + x) * (x - b) * (x + c));
    Ok(ratio.max(0.0).sqrt())
}

/// A moment request: the power `n` of cos φ, the weight exponent `mu`, and
/// the gap parameter `b` (ignored for the full and half range).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentQuery {
    pub kind: SetKind,
    pub n: u32,
    pub mu: f64,
    pub b: f64,
}

impl MomentQuery {
    pub fn new(kind: SetKind, n: u32, mu: f64, b: f64) -> Self {
        MomentQuery { kind, n, mu, b }
    }

    pub fn validate(&self) -> Result<()> {
        check_mu(self.mu)?;
        self.kind.check_gap(self.b)
    }
}

pub fn check_mu(mu: f64) -> Result<()> {
    if mu.is_finite() && mu > -0.5 + MU_MARGIN {
        Ok(())
    } else {
        Err(Error::domain(format!(
            "weight exponent needs mu > -1/2 (+{MU_MARGIN:e}), got mu = {mu}"
        )))
    }
}
