use num_complex::Complex64;

use crate::error::{Error, Result};

/// Integration rule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Rule {
    /// Composite trapezoid over `panels` equal panels.
    Trapezoid { panels: usize },
    /// Composite Gauss-Legendre, `nodes` points on each of `panels` equal panels.
    GaussLegendre { panels: usize, nodes: usize },
    /// Adaptive Gauss-Kronrod 7/15 with global bisection.
    Adaptive,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature {
    pub rule: Rule,
    /// Absolute tolerance. Only the adaptive rule acts on it.
    pub tolerance: f64,
    /// Interval budget of the adaptive rule.
    pub max_subdivisions: usize,
}

pub const DEFAULT_TOLERANCE: f64 = 1e-8;
const MAX_GL_NODES: usize = 64;

impl Quadrature {
    pub fn new(rule: Rule, tolerance: f64, max_subdivisions: usize) -> Result<Self> {
        if !(tolerance > 0.0) {
            return Err(Error::config(format!("quadrature tolerance must be > 0, got {tolerance}")));
        }
        if max_subdivisions == 0 {
            return Err(Error::config("max subdivisions must be >= 1"));
        }
        match rule {
            Rule::Trapezoid { panels } | Rule::GaussLegendre { panels, .. } if panels == 0 => {
                return Err(Error::config("fixed rules need at least one panel"));
            }
            Rule::GaussLegendre { nodes, .. } if nodes == 0 || nodes > MAX_GL_NODES => {
                return Err(Error::config(format!(
                    "Gauss-Legendre node count must be in 1..={MAX_GL_NODES}"
                )));
            }
            _ => {}
        }
        Ok(Self {
            rule,
            tolerance,
            max_subdivisions,
        })
    }

    pub fn trapezoid(panels: usize) -> Result<Self> {
        Self::new(Rule::Trapezoid { panels }, DEFAULT_TOLERANCE, 1)
    }

    pub fn gauss_legendre(panels: usize, nodes: usize) -> Result<Self> {
        Self::new(Rule::GaussLegendre { panels, nodes }, DEFAULT_TOLERANCE, 1)
    }

    pub fn adaptive(tolerance: f64, max_subdivisions: usize) -> Result<Self> {
        Self::new(Rule::Adaptive, tolerance, max_subdivisions)
    }

    /// Fixed rule used for radial Fresnel integrals over `length` meters:
    /// 8-point Gauss-Legendre panels no wider than half a wavelength, i.e.
    /// sixteen nodes per wavelength.
    pub fn radial(length: f64, wavelength: f64) -> Self {
        let panels = ((length / (0.5 * wavelength)).ceil() as usize).max(1);
        Self {
            rule: Rule::GaussLegendre { panels, nodes: 8 },
            tolerance: DEFAULT_TOLERANCE,
            max_subdivisions: 1,
        }
    }

    /// Same rule with twice as many panels.
    pub fn refined(&self) -> Self {
        let rule = match self.rule {
            Rule::Trapezoid { panels } => Rule::Trapezoid { panels: 2 * panels },
            Rule::GaussLegendre { panels, nodes } => Rule::GaussLegendre {
                panels: 2 * panels,
                nodes,
            },
            Rule::Adaptive => Rule::Adaptive,
        };
        Self { rule, ..*self }
    }

    /// Panel width for fixed rules.
    pub fn step(&self, a: f64, b: f64) -> Option<f64> {
        match self.rule {
            Rule::Trapezoid { panels } | Rule::GaussLegendre { panels, .. } => {
                Some((b - a) / panels as f64)
            }
            Rule::Adaptive => None,
        }
    }

    /// Abscissae and weights of a fixed rule on `[a, b]`. `None` for the
    /// adaptive rule, whose nodes depend on the integrand.
    pub fn nodes(&self, a: f64, b: f64) -> Option<Vec<(f64, f64)>> {
        let h = self.step(a, b)?;
        let mut out = Vec::new();
        match self.rule {
            Rule::Trapezoid { panels } => {
                out.reserve(panels + 1);
                for i in 0..=panels {
                    let w = if i == 0 || i == panels { 0.5 * h } else { h };
                    out.push((a + i as f64 * h, w));
                }
            }
            Rule::GaussLegendre { panels, nodes } => {
                let (xs, ws) = gauss_legendre_nodes(nodes);
                out.reserve(panels * nodes);
                for p in 0..panels {
                    let mid = a + (p as f64 + 0.5) * h;
                    for (x, w) in xs.iter().zip(&ws) {
                        out.push((mid + 0.5 * h * x, 0.5 * h * w));
                    }
                }
            }
            Rule::Adaptive => unreachable!(),
        }
        Some(out)
    }

    pub fn integrate<F>(&self, f: F, a: f64, b: f64) -> Result<Complex64>
    where
        F: Fn(f64) -> Complex64,
    {
        match self.nodes(a, b) {
            Some(nodes) => {
                let mut acc = Complex64::new(0.0, 0.0);
                for (x, w) in nodes {
                    acc += checked(f(x), x)? * w;
                }
                Ok(acc)
            }
            None => adaptive_gk15(&f, a, b, self.tolerance, self.max_subdivisions),
        }
    }
}

/// `∫_a^b f(ρ) dρ` on a radial coordinate.
pub fn integrate_radial<F>(f: F, a: f64, b: f64, q: &Quadrature) -> Result<Complex64>
where
    F: Fn(f64) -> Complex64,
{
    if !(a >= 0.0) || !(b > a) {
        return Err(Error::domain(format!(
            "radial interval [{a}, {b}] must satisfy 0 <= a < b"
        )));
    }
    q.integrate(f, a, b)
}

fn checked(v: Complex64, x: f64) -> Result<Complex64> {
    if v.re.is_finite() && v.im.is_finite() {
        Ok(v)
    } else {
        Err(Error::domain(format!("integrand is not finite at {x}")))
    }
}

/// Gauss-Legendre nodes and weights on `[-1, 1]` by Newton iteration on `P_n`.
pub fn gauss_legendre_nodes(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut xs = vec![0.0; n];
    let mut ws = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, dp) = legendre_with_derivative(n, x);
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        xs[i] = -x;
        xs[n - 1 - i] = x;
        ws[i] = w;
        ws[n - 1 - i] = w;
    }
    (xs, ws)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
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
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

const GK15_NODES: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const GK15_WEIGHTS: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
// Gauss 7-point weights attach to the odd Kronrod nodes (indices 1, 3, 5, 7).
const G7_WEIGHTS: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15<F: Fn(f64) -> Complex64>(f: &F, a: f64, b: f64) -> Result<(Complex64, f64)> {
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut kronrod = Complex64::new(0.0, 0.0);
    let mut gauss = Complex64::new(0.0, 0.0);
    for (i, (&x, &w)) in GK15_NODES.iter().zip(&GK15_WEIGHTS).enumerate() {
        let pair = if x == 0.0 {
            checked(f(mid), mid)?
        } else {
            checked(f(mid - half * x), mid - half * x)? + checked(f(mid + half * x), mid + half * x)?
        };
        kronrod += pair * w;
        if i % 2 == 1 {
            gauss += pair * G7_WEIGHTS[i / 2];
        }
    }
    Ok((kronrod * half, ((kronrod - gauss) * half).norm()))
}

fn adaptive_gk15<F: Fn(f64) -> Complex64>(
    f: &F,
    a: f64,
    b: f64,
    tolerance: f64,
    max_subdivisions: usize,
) -> Result<Complex64> {
    let (v, e) = gk15(f, a, b)?;
    let mut intervals = vec![(a, b, v, e)];
    loop {
        let total_err: f64 = intervals.iter().map(|iv| iv.3).sum();
        if total_err <= tolerance {
            return Ok(intervals.iter().map(|iv| iv.2).sum());
        }
        if intervals.len() >= max_subdivisions {
            return Err(Error::domain(format!(
                "adaptive quadrature on [{a}, {b}] reached {max_subdivisions} subdivisions \
                 with error estimate {total_err:e}"
            )));
        }
        let (worst, _) = intervals
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.total_cmp(&y.1 .3))
            .expect("non-empty");
        let (lo, hi, _, _) = intervals.swap_remove(worst);
        let m = 0.5 * (lo + hi);
        let (v1, e1) = gk15(f, lo, m)?;
        let (v2, e2) = gk15(f, m, hi)?;
        intervals.push((lo, m, v1, e1));
        intervals.push((m, hi, v2, e2));
    }
}
