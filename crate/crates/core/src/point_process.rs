//! Poisson point processes, ALOHA thinning and the relay region.

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::{Distribution, Poisson};

use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const ORIGIN: Point = Point { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn distance(&self, other: &Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

/// Bounded planar region used as a sampling window or as the relay region.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Region {
    Disc { center: Point, radius: f64 },
    Annulus { center: Point, r_in: f64, r_out: f64 },
    Rectangle { min: Point, max: Point },
}

impl Region {
    pub fn disc(center: Point, radius: f64) -> Result<Self> {
        let r = Region::Disc { center, radius };
        r.validate()?;
        Ok(r)
    }

    pub fn annulus(center: Point, r_in: f64, r_out: f64) -> Result<Self> {
        let r = Region::Annulus { center, r_in, r_out };
        r.validate()?;
        Ok(r)
    }

    /// Axis-aligned rectangle spanned by two opposite corners.
    pub fn rectangle(a: Point, b: Point) -> Result<Self> {
        let r = Region::Rectangle {
            min: Point::new(a.x.min(b.x), a.y.min(b.y)),
            max: Point::new(a.x.max(b.x), a.y.max(b.y)),
        };
        r.validate()?;
        Ok(r)
    }

    pub fn validate(&self) -> Result<()> {
        let finite = |v: f64| v.is_finite();
        match *self {
            Region::Disc { center, radius } => {
                if !(finite(center.x) && finite(center.y) && finite(radius) && radius > 0.0) {
                    return Err(Error::invalid("region", "disc radius must be finite and > 0"));
                }
            }
            Region::Annulus { center, r_in, r_out } => {
                if !(finite(center.x) && finite(center.y) && finite(r_out) && r_in >= 0.0 && r_out > r_in) {
                    return Err(Error::invalid("region", "annulus needs r_out > r_in >= 0"));
                }
            }
            Region::Rectangle { min, max } => {
                if !(finite(min.x) && finite(min.y) && finite(max.x) && finite(max.y))
                    || max.x <= min.x
                    || max.y <= min.y
                {
                    return Err(Error::invalid("region", "rectangle must have positive width and height"));
                }
            }
        }
        Ok(())
    }

    pub fn measure(&self) -> f64 {
        match *self {
            Region::Disc { radius, .. } => PI * radius * radius,
            Region::Annulus { r_in, r_out, .. } => PI * (r_out * r_out - r_in * r_in),
            Region::Rectangle { min, max } => (max.x - min.x) * (max.y - min.y),
        }
    }

    pub fn contains(&self, p: &Point) -> bool {
        match *self {
            Region::Disc { center, radius } => p.distance(&center) <= radius,
            Region::Annulus { center, r_in, r_out } => {
                let d = p.distance(&center);
                d >= r_in && d <= r_out
            }
            Region::Rectangle { min, max } => p.x >= min.x && p.x <= max.x && p.y >= min.y && p.y <= max.y,
        }
    }

    /// Smallest distance from `p` to any point of the region (0 if inside).
    pub fn distance_to(&self, p: &Point) -> f64 {
        match *self {
            Region::Disc { center, radius } => (p.distance(&center) - radius).max(0.0),
            Region::Annulus { center, r_in, r_out } => {
                let d = p.distance(&center);
                if d < r_in {
                    r_in - d
                } else {
                    (d - r_out).max(0.0)
                }
            }
            Region::Rectangle { min, max } => {
                let dx = (min.x - p.x).max(0.0).max(p.x - max.x);
                let dy = (min.y - p.y).max(0.0).max(p.y - max.y);
                dx.hypot(dy)
            }
        }
    }

    pub fn center(&self) -> Point {
        match *self {
            Region::Disc { center, .. } | Region::Annulus { center, .. } => center,
            Region::Rectangle { min, max } => Point::new(0.5 * (min.x + max.x), 0.5 * (min.y + max.y)),
        }
    }

    /// One point drawn uniformly on the region.
    pub fn sample_uniform<R: Rng + ?Sized>(&self, rng: &mut R) -> Point {
        match *self {
            Region::Disc { center, radius } => polar(center, radius * rng.random::<f64>().sqrt(), rng),
            Region::Annulus { center, r_in, r_out } => {
                let u: f64 = rng.random();
                let r = (r_in * r_in + u * (r_out * r_out - r_in * r_in)).sqrt();
                polar(center, r, rng)
            }
            Region::Rectangle { min, max } => {
                let u: f64 = rng.random();
                let v: f64 = rng.random();
                Point::new(min.x + u * (max.x - min.x), min.y + v * (max.y - min.y))
            }
        }
    }
}

fn polar<R: Rng + ?Sized>(center: Point, r: f64, rng: &mut R) -> Point {
    let theta = 2.0 * PI * rng.random::<f64>();
    Point::new(center.x + r * theta.cos(), center.y + r * theta.sin())
}

/// Lebesgue measure of `region` in m².
pub fn region_measure(region: &Region) -> f64 {
    region.measure()
}

/// Homogeneous PPP of `intensity` (nodes/m²) restricted to `window`.
pub fn sample_ppp<R: Rng + ?Sized>(intensity: f64, window: &Region, rng: &mut R) -> Result<Vec<Point>> {
    if !(intensity >= 0.0 && intensity.is_finite()) {
        return Err(Error::invalid("intensity", format!("must be finite and >= 0, got {intensity}")));
    }
    let mean = intensity * window.measure();
    if mean == 0.0 {
        return Ok(Vec::new());
    }
    let count = Poisson::new(mean)
        .map_err(|e| Error::invalid("intensity", e.to_string()))?
        .sample(rng) as usize;
    Ok((0..count).map(|_| window.sample_uniform(rng)).collect())
}

/// One realisation of the ALOHA-marked node population.
#[derive(Clone, Debug, PartialEq)]
pub struct NodeField {
    pub transmitters: Vec<Point>,
    pub relays: Vec<Point>,
    pub lambda: f64,
    pub p: f64,
}

impl NodeField {
    /// Intensity of the transmitting subset, λp.
    pub fn lambda_t(&self) -> f64 {
        self.lambda * self.p
    }

    /// Intensity of the idle (relay-eligible) subset, λ(1−2p).
    pub fn lambda_r(&self) -> f64 {
        self.lambda * (1.0 - 2.0 * self.p)
    }
}

pub fn check_aloha_p(p: f64) -> Result<()> {
    if p > 0.0 && p < 0.5 {
        Ok(())
    } else {
        Err(Error::invalid("aloha_p", format!("must lie in (0, 0.5), got {p}")))
    }
}

/// Marks each node transmitter with probability `p`, receiver with
/// probability `p` and idle otherwise. Receivers are not retained.
pub fn thin_aloha<R: Rng + ?Sized>(nodes: &[Point], lambda: f64, p: f64, rng: &mut R) -> Result<NodeField> {
    check_aloha_p(p)?;
    let mut transmitters = Vec::new();
    let mut relays = Vec::with_capacity(nodes.len());
    for &node in nodes {
        let u: f64 = rng.random();
        if u < p {
            transmitters.push(node);
        } else if u >= 2.0 * p {
            relays.push(node);
        }
    }
    Ok(NodeField {
        transmitters,
        relays,
        lambda,
        p,
    })
}

/// Idle nodes of `field` inside `d_ab`. Every such node is assumed able to
/// decode both sources, so no SNR filtering is applied.
pub fn candidate_relays(field: &NodeField, d_ab: &Region) -> Result<Vec<Point>> {
    let inside: Vec<Point> = field.relays.iter().copied().filter(|p| d_ab.contains(p)).collect();
    if inside.is_empty() {
        Err(Error::EmptyRelaySet)
    } else {
        Ok(inside)
    }
}

/// Relay set conditioned on being non-empty: the node process over `d_ab` is
/// resampled until at least one idle node falls inside. Returns the relays
/// and the number of rejected (empty) draws.
pub fn sample_relay_set<R: Rng + ?Sized>(
    lambda: f64,
    p: f64,
    d_ab: &Region,
    max_attempts: u64,
    rng: &mut R,
) -> Result<(Vec<Point>, u64)> {
    let mut rejected = 0;
    while rejected < max_attempts {
        let nodes = sample_ppp(lambda, d_ab, rng)?;
        let field = thin_aloha(&nodes, lambda, p, rng)?;
        match candidate_relays(&field, d_ab) {
            Ok(relays) => return Ok((relays, rejected)),
            Err(Error::EmptyRelaySet) => rejected += 1,
            Err(e) => return Err(e),
        }
    }
    Err(Error::RelayResampleLimit { attempts: max_attempts })
}
