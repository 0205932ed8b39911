//! Fixed quadrature rules: periodic trapezoid on circles, Gauss-Legendre panels on arcs,
//! truncated trapezoid on the real line.

use std::f64::consts::{PI, TAU};
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Precision profile scaling every rule used by the solver and the spectral routines.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Profile {
    Fast,
    #[default]
    Standard,
    Paranoid,
}

impl FromStr for Profile {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "fast" => Ok(Profile::Fast),
            "standard" => Ok(Profile::Standard),
            "paranoid" => Ok(Profile::Paranoid),
            other => Err(format!("unknown profile '{other}' (expected fast|standard|paranoid)")),
        }
    }
}

/// Resolved rule parameters for a profile.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureConfig {
    pub profile: Profile,
    /// Minimum node count of circle rules.
    pub circle_min: usize,
    /// Gauss order per arc panel.
    pub order: usize,
    /// Minimum panel count per arc.
    pub panels: usize,
    /// Half-width of the truncated line rule.
    pub line_t: f64,
    /// Spacing of the line rule.
    pub line_h: f64,
}

impl QuadratureConfig {
    pub fn new(profile: Profile) -> Self {
        match profile {
            Profile::Fast => Self { profile, circle_min: 256, order: 10, panels: 8, line_t: 30.0, line_h: 0.1 },
            Profile::Standard => Self { profile, circle_min: 512, order: 12, panels: 8, line_t: 40.0, line_h: 0.05 },
            Profile::Paranoid => Self { profile, circle_min: 1024, order: 16, panels: 16, line_t: 40.0, line_h: 0.025 },
        }
    }

    pub fn circle_nodes(&self, bandwidth: usize) -> usize {
        self.circle_min.max(8 * bandwidth)
    }

    /// Arc rule resolving trigonometric polynomials of degree `degree` on an arc.
    pub fn arc_rule(&self, start: f64, end: f64, degree: usize) -> ArcRule {
        let width = end - start;
        // Each panel of width w sees about degree * w / 2 radians of phase on either side.
        let needed = (degree as f64 * width / (0.6 * self.order as f64)).ceil() as usize;
        ArcRule::graded(start, end, self.panels.max(needed + 4), self.order, 2.0, 3)
    }

    pub fn line_rule(&self) -> LineRule {
        LineRule::new(self.line_t, self.line_h)
    }
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(order: usize) -> (Vec<f64>, Vec<f64>) {
    let n = order;
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

#[derive(Debug, Clone, PartialEq)]
pub struct PeriodicRule {
    pub m: usize,
}

impl PeriodicRule {
    pub fn new(m: usize) -> Self {
        assert!(m > 0, "periodic rule needs at least one node");
        Self { m }
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.m).map(|k| TAU * k as f64 / self.m as f64).collect()
    }

    pub fn weight(&self) -> f64 {
        TAU / self.m as f64
    }
}

pub fn integrate_circle(samples: &[Complex64], rule: &PeriodicRule, radius: f64) -> Complex64 {
    assert_eq!(samples.len(), rule.m);
    samples.iter().sum::<Complex64>() * (rule.weight() * radius)
}

/// Composite Gauss-Legendre rule on an angular interval.
#[derive(Debug, Clone, PartialEq)]
pub struct ArcRule {
    pub panels: Vec<(f64, f64)>,
    pub order: usize,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl ArcRule {
    pub fn from_panels(panels: Vec<(f64, f64)>, order: usize) -> Self {
        let (x, w) = gauss_legendre(order);
        let mut nodes = Vec::with_capacity(panels.len() * order);
        let mut weights = Vec::with_capacity(panels.len() * order);
        for &(a, b) in &panels {
            let half = 0.5 * (b - a);
            let mid = 0.5 * (a + b);
            for (xi, wi) in x.iter().zip(&w) {
                nodes.push(mid + half * xi);
                weights.push(half * wi);
            }
        }
        Self { panels, order, nodes, weights }
    }

    pub fn uniform(start: f64, end: f64, panels: usize, order: usize) -> Self {
        let h = (end - start) / panels as f64;
        let p = (0..panels).map(|k| (start + k as f64 * h, start + (k + 1) as f64 * h)).collect();
        Self::from_panels(p, order)
    }

    /// Panels shrinking by `ratio` over the `levels` panels nearest each endpoint.
    pub fn graded(start: f64, end: f64, panels: usize, order: usize, ratio: f64, levels: usize) -> Self {
        let panels = panels.max(2);
        let sizes: Vec<f64> = (0..panels)
            .map(|k| {
                let from_end = k.min(panels - 1 - k).min(levels);
                ratio.powi(from_end as i32)
            })
            .collect();
        let total: f64 = sizes.iter().sum();
        let mut a = start;
        let mut p = Vec::with_capacity(panels);
        for (k, s) in sizes.iter().enumerate() {
            let b = if k + 1 == panels { end } else { a + (end - start) * s / total };
            p.push((a, b));
            a = b;
        }
        Self::from_panels(p, order)
    }

    /// The same panels split in half.
    pub fn refined(&self) -> Self {
        let p = self
            .panels
            .iter()
            .flat_map(|&(a, b)| {
                let m = 0.5 * (a + b);
                [(a, m), (m, b)]
            })
            .collect();
        Self::from_panels(p, self.order)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

pub fn integrate_arc(samples: &[Complex64], rule: &ArcRule, radius: f64) -> Complex64 {
    assert_eq!(samples.len(), rule.len());
    samples.iter().zip(&rule.weights).map(|(f, w)| f * *w).sum::<Complex64>() * radius
}

/// Uniform trapezoid nodes `-T + k h` on `[-T, T]`.
#[derive(Debug, Clone, PartialEq)]
pub struct LineRule {
    pub t: f64,
    pub h: f64,
    n: usize,
}

impl LineRule {
    pub fn new(t: f64, h: f64) -> Self {
        assert!(t > 0.0 && h > 0.0);
        let n = (2.0 * t / h).round() as usize + 1;
        // Snap the spacing so that both endpoints are nodes.
        let h = 2.0 * t / (n - 1) as f64;
        Self { t, h, n }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn node(&self, k: usize) -> f64 {
        // Symmetric evaluation so that node(k) == -node(n - 1 - k) exactly.
        let half = (self.n - 1) as f64 / 2.0;
        (k as f64 - half) * self.h
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.n).map(|k| self.node(k)).collect()
    }

    pub fn weight(&self, k: usize) -> f64 {
        if k == 0 || k + 1 == self.n {
            0.5 * self.h
        } else {
            self.h
        }
    }
}

pub fn integrate_line(samples: &[Complex64], rule: &LineRule) -> Complex64 {
    assert_eq!(samples.len(), rule.len());
    // Pair nodes symmetrically so odd integrands cancel exactly.
    let n = rule.len();
    let mut acc = Complex64::new(0.0, 0.0);
    for k in 0..n / 2 {
        acc += (samples[k] + samples[n - 1 - k]) * rule.weight(k);
    }
    if n % 2 == 1 {
        acc += samples[n / 2] * rule.weight(n / 2);
    }
    acc
}
