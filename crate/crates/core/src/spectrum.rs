//! Discrete spectral data: user input, canonicalization into the fundamental
//! region, and the symmetry orbit feeding the reconstruction systems.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::uniformization::{region_of, Region, SpectralPoint};

/// Relative distance below which two eigenvalues (or an eigenvalue and the
/// background circle) are considered coincident.
pub const COINCIDENCE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PoleOrder {
    Simple,
    Double,
}

impl PoleOrder {
    /// Multiplier `m` in `arg(q+/q-) = m * sum(arg z_n)`, with `q+` the
    /// `x -> +inf` limit of the reconstructed field.
    pub fn theta_multiplier(self) -> f64 {
        match self {
            PoleOrder::Simple => -4.0,
            PoleOrder::Double => -8.0,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            PoleOrder::Simple => "simple",
            PoleOrder::Double => "double",
        }
    }
}

/// Sign convention for the inversion symmetry of the norming constants and
/// the matching right-hand side of the reconstruction system.
///
/// `A` uses the inversion relation `A+[z] = (z^2/q-^2) A-[-Q0^2/z]` (and its
/// double-pole analogue) together with the right-hand side obtained from the
/// second column of the jump problem, `-i q-/xi_s`. `B` flips both. Only `A`
/// produces solutions of the PDE; `B` is kept for fault injection and for
/// auditing the adjudication.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
pub enum SignConvention {
    #[default]
    #[serde(rename = "a")]
    A,
    #[serde(rename = "b")]
    B,
}

impl SignConvention {
    pub fn sign(self) -> f64 {
        match self {
            SignConvention::A => 1.0,
            SignConvention::B => -1.0,
        }
    }

    pub fn other(self) -> Self {
        match self {
            SignConvention::A => SignConvention::B,
            SignConvention::B => SignConvention::A,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            SignConvention::A => "a",
            SignConvention::B => "b",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EigenEntry {
    pub z: Complex64,
    pub a_plus: Complex64,
    /// Second norming constant, double poles only. Defaults to zero.
    #[serde(default)]
    pub b_plus: Complex64,
}

impl EigenEntry {
    pub fn new(z: Complex64, a_plus: Complex64) -> Self {
        Self {
            z,
            a_plus,
            b_plus: Complex64::new(0.0, 0.0),
        }
    }

    pub fn with_b(mut self, b_plus: Complex64) -> Self {
        self.b_plus = b_plus;
        self
    }
}

/// The complete input defining one exact solution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralConfig {
    pub q_minus: Complex64,
    pub epsilon: f64,
    #[serde(default)]
    pub gamma0: f64,
    pub pole_order: PoleOrder,
    pub eigenvalues: Vec<EigenEntry>,
    /// Admit eigenvalues on the circle `|z| = Q0` (Akhmediev-type,
    /// space-periodic solutions). Such points sit on the continuous spectrum,
    /// so they are rejected unless explicitly requested.
    #[serde(default)]
    pub allow_circle: bool,
}

impl SpectralConfig {
    pub fn new(q_minus: Complex64, epsilon: f64, pole_order: PoleOrder) -> Self {
        Self {
            q_minus,
            epsilon,
            gamma0: 0.0,
            pole_order,
            eigenvalues: Vec::new(),
            allow_circle: false,
        }
    }

    pub fn with_eigenvalue(mut self, entry: EigenEntry) -> Self {
        self.eigenvalues.push(entry);
        self
    }

    pub fn with_gamma0(mut self, gamma0: f64) -> Self {
        self.gamma0 = gamma0;
        self
    }

    /// Scattering-side background amplitude `Q0 = |q-|`.
    pub fn q0(&self) -> f64 {
        self.q_minus.norm()
    }

    pub fn n(&self) -> usize {
        self.eigenvalues.len()
    }

    /// PDE-side background amplitude `|u+-| = Q0 / |epsilon|`.
    pub fn u_background(&self) -> f64 {
        self.q0() / self.epsilon.abs()
    }
}

/// One violated invariant of a [`SpectralConfig`].
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Diagnostic {
    EpsilonZero,
    ZeroBackground,
    NonFinite {
        field: String,
    },
    ZeroNormingConstant {
        index: usize,
    },
    ContourEigenvalue {
        index: usize,
        z: [f64; 2],
    },
    BranchPoint {
        index: usize,
        z: [f64; 2],
    },
    DuplicateEigenvalue {
        first: usize,
        second: usize,
        hint: String,
    },
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Diagnostic::EpsilonZero => write!(f, "EpsilonZero: epsilon must be nonzero"),
            Diagnostic::ZeroBackground => {
                write!(f, "ZeroBackground: |q_minus| must be positive (approach the ZBC limit with a small background)")
            }
            Diagnostic::NonFinite { field } => write!(f, "NonFinite: {field} is not finite"),
            Diagnostic::ZeroNormingConstant { index } => {
                write!(
                    f,
                    "ZeroNormingConstant: A_plus of eigenvalue {index} is zero"
                )
            }
            Diagnostic::ContourEigenvalue { index, z } => write!(
                f,
                "ContourEigenvalue: eigenvalue {index} = {}{:+}i lies on the continuous spectrum",
                z[0], z[1]
            ),
            Diagnostic::BranchPoint { index, z } => write!(
                f,
                "BranchPoint: eigenvalue {index} = {}{:+}i is a branch point of the uniformization",
                z[0], z[1]
            ),
            Diagnostic::DuplicateEigenvalue {
                first,
                second,
                hint,
            } => write!(
                f,
                "DuplicateEigenvalue: eigenvalues {first} and {second} coincide; {hint}"
            ),
        }
    }
}

pub const DUPLICATE_HINT_SIMPLE: &str = "coincident simple poles are singular, use Double mode";
pub const DUPLICATE_HINT_DOUBLE: &str = "double-pole eigenvalues must be distinct";

/// Picks the representative of the orbit `{z, z*, -Q0^2/z, -Q0^2/z*}` with
/// `Im > 0` and `|z| > Q0`.
pub fn canonicalize_eigenvalue(z: Complex64, q0: f64) -> Result<Complex64> {
    if !(q0 > 0.0 && q0.is_finite()) {
        return Err(Error::InvalidBackground(q0));
    }
    if z.im == 0.0 || on_circle(z, q0) || !z.is_finite() {
        return Err(Error::ContourEigenvalue(z));
    }
    let w = if z.norm() < q0 { -q0 * q0 / z } else { z };
    Ok(if w.im < 0.0 { w.conj() } else { w })
}

fn on_circle(z: Complex64, q0: f64) -> bool {
    (z.norm() - q0).abs() <= COINCIDENCE_TOL * q0
}

/// Canonical form of an eigenvalue honoring `allow_circle`: points on the
/// background circle are kept on it and moved to the upper half plane.
fn canonical_entry(z: Complex64, q0: f64, allow_circle: bool) -> Result<Complex64> {
    if allow_circle && z.im != 0.0 && on_circle(z, q0) && z.is_finite() {
        return Ok(if z.im < 0.0 { z.conj() } else { z });
    }
    canonicalize_eigenvalue(z, q0)
}

/// Checks every invariant of the configuration. Empty means valid.
pub fn validate(cfg: &SpectralConfig) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    if !cfg.q_minus.is_finite() {
        out.push(Diagnostic::NonFinite {
            field: "q_minus".into(),
        });
    }
    if !cfg.epsilon.is_finite() {
        out.push(Diagnostic::NonFinite {
            field: "epsilon".into(),
        });
    } else if cfg.epsilon == 0.0 {
        out.push(Diagnostic::EpsilonZero);
    }
    if !cfg.gamma0.is_finite() {
        out.push(Diagnostic::NonFinite {
            field: "gamma0".into(),
        });
    }
    let q0 = cfg.q0();
    let background_ok = q0 > 0.0 && q0.is_finite();
    if cfg.q_minus.is_finite() && !background_ok {
        out.push(Diagnostic::ZeroBackground);
    }

    let mut canonical: Vec<Option<Complex64>> = Vec::with_capacity(cfg.n());
    for (index, e) in cfg.eigenvalues.iter().enumerate() {
        if !e.z.is_finite() || !e.a_plus.is_finite() || !e.b_plus.is_finite() {
            out.push(Diagnostic::NonFinite {
                field: format!("eigenvalues[{index}]"),
            });
            canonical.push(None);
            continue;
        }
        if e.a_plus == Complex64::new(0.0, 0.0) {
            out.push(Diagnostic::ZeroNormingConstant { index });
        }
        if !background_ok {
            canonical.push(None);
            continue;
        }
        match canonical_entry(e.z, q0, cfg.allow_circle) {
            Ok(c) => {
                // On the circle the orbit collapses onto the branch points when
                // z is purely imaginary: xi and xi-hat coincide there.
                if on_circle(c, q0) && c.re.abs() <= COINCIDENCE_TOL * q0 {
                    out.push(Diagnostic::BranchPoint {
                        index,
                        z: [e.z.re, e.z.im],
                    });
                    canonical.push(None);
                } else {
                    canonical.push(Some(c));
                }
            }
            Err(_) => {
                out.push(Diagnostic::ContourEigenvalue {
                    index,
                    z: [e.z.re, e.z.im],
                });
                canonical.push(None);
            }
        }
    }
    let hint = match cfg.pole_order {
        PoleOrder::Simple => DUPLICATE_HINT_SIMPLE,
        PoleOrder::Double => DUPLICATE_HINT_DOUBLE,
    };
    for i in 0..canonical.len() {
        for j in (i + 1)..canonical.len() {
            if let (Some(a), Some(b)) = (canonical[i], canonical[j]) {
                if (a - b).norm() <= COINCIDENCE_TOL * a.norm().max(b.norm()) {
                    out.push(Diagnostic::DuplicateEigenvalue {
                        first: i,
                        second: j,
                        hint: hint.into(),
                    });
                }
            }
        }
    }
    out
}

/// `q+ = q- exp(i m sum arg z_n)`, `m = -4` (simple) or `-8` (double), using the
/// canonical representatives of the eigenvalues.
pub fn compute_q_plus(cfg: &SpectralConfig) -> Complex64 {
    let q0 = cfg.q0();
    let phase: f64 = cfg
        .eigenvalues
        .iter()
        .map(|e| {
            canonical_entry(e.z, q0, cfg.allow_circle)
                .unwrap_or(e.z)
                .arg()
        })
        .sum();
    cfg.q_minus * Complex64::from_polar(1.0, wrap_phase(cfg.pole_order.theta_multiplier() * phase))
}

/// Wraps an angle into `(-pi, pi]`.
pub fn wrap_phase(a: f64) -> f64 {
    let mut r = a.rem_euclid(2.0 * PI);
    if r > PI {
        r -= 2.0 * PI;
    }
    r
}

/// The extended eigenvalues `xi_n` (n = 1..2N), their mirrors
/// `xi_hat_n = -Q0^2/xi_n`, and every norming constant the reconstruction
/// needs, all derived from the user's `z_n`, `A+[z_n]`, `B+[z_n]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrbitTable {
    pub order: PoleOrder,
    pub convention: SignConvention,
    pub q0: f64,
    pub q_minus: Complex64,
    pub q_plus: Complex64,
    /// `xi_n = z_n` for n < N, `-Q0^2/conj(z_{n-N})` for n >= N.
    pub xi: Vec<Complex64>,
    pub xi_hat: Vec<Complex64>,
    pub a_plus_xi: Vec<Complex64>,
    pub a_minus_xihat: Vec<Complex64>,
    /// Empty in simple mode.
    pub b_plus_xi: Vec<Complex64>,
    pub b_minus_xihat: Vec<Complex64>,
    /// True when some eigenvalue sits on the background circle.
    pub on_circle: bool,
}

impl OrbitTable {
    /// Number of user eigenvalues `N`.
    pub fn n(&self) -> usize {
        self.xi.len() / 2
    }

    /// Canonical user eigenvalues `z_1..z_N`.
    pub fn eigenvalues(&self) -> &[Complex64] {
        &self.xi[..self.n()]
    }

    /// Multiplier `s` of the inversion relation for this convention and order:
    /// `A-[xi_hat] = s * factor(xi) * A+[xi]`.
    pub(crate) fn inversion_factor(&self, xi: Complex64) -> Complex64 {
        inversion_factor(self.order, self.convention, xi, self.q0, self.q_minus)
    }
}

fn inversion_factor(
    order: PoleOrder,
    conv: SignConvention,
    xi: Complex64,
    q0: f64,
    q_minus: Complex64,
) -> Complex64 {
    let s = conv.sign();
    match order {
        PoleOrder::Simple => s * q_minus * q_minus / (xi * xi),
        PoleOrder::Double => {
            let q04 = q0.powi(4);
            s * q04 * q_minus / (xi.powi(4) * q_minus.conj())
        }
    }
}

/// [`validate`] as a `Result`. A lone duplicate is reported as
/// [`Error::DuplicateEigenvalue`] so the remedy reaches the user.
pub fn check(cfg: &SpectralConfig) -> Result<()> {
    let diags = validate(cfg);
    if let Some(Diagnostic::DuplicateEigenvalue { first, second, .. }) = diags
        .iter()
        .find(|d| matches!(d, Diagnostic::DuplicateEigenvalue { .. }))
    {
        if diags.len() == 1 {
            return Err(Error::DuplicateEigenvalue {
                first: *first,
                second: *second,
                hint: match cfg.pole_order {
                    PoleOrder::Simple => DUPLICATE_HINT_SIMPLE,
                    PoleOrder::Double => DUPLICATE_HINT_DOUBLE,
                },
            });
        }
    }
    if !diags.is_empty() {
        return Err(Error::InvalidConfig(diags));
    }
    Ok(())
}

/// Builds the orbit table. Fails on invalid configurations (including
/// coincident eigenvalues).
pub fn derive_orbit(cfg: &SpectralConfig, convention: SignConvention) -> Result<OrbitTable> {
    check(cfg)?;

    let q0 = cfg.q0();
    let n = cfg.n();
    let q_minus = cfg.q_minus;
    let mut zs = Vec::with_capacity(n);
    let mut on_circle_any = false;
    for e in &cfg.eigenvalues {
        let c = canonical_entry(e.z, q0, cfg.allow_circle)?;
        if c != e.z {
            log::info!("eigenvalue {} canonicalized to {}", e.z, c);
        }
        on_circle_any |= on_circle(c, q0);
        zs.push(c);
    }

    let mut xi = Vec::with_capacity(2 * n);
    xi.extend(zs.iter().copied());
    xi.extend(zs.iter().map(|z| -q0 * q0 / z.conj()));
    let xi_hat: Vec<Complex64> = xi.iter().map(|x| -q0 * q0 / x).collect();

    // A+ on the mirrored points from the composite (conjugation + inversion)
    // relation, then A- on every xi_hat from the inversion relation alone.
    let mut a_plus_xi = Vec::with_capacity(2 * n);
    a_plus_xi.extend(cfg.eigenvalues.iter().map(|e| e.a_plus));
    for (z, e) in zs.iter().zip(&cfg.eigenvalues) {
        let f = inversion_factor(cfg.pole_order, convention, *z, q0, q_minus);
        a_plus_xi.push(-(f * e.a_plus).conj());
    }
    let a_minus_xihat = xi
        .iter()
        .zip(&a_plus_xi)
        .map(|(x, a)| inversion_factor(cfg.pole_order, convention, *x, q0, q_minus) * a)
        .collect();

    let (b_plus_xi, b_minus_xihat) = match cfg.pole_order {
        PoleOrder::Simple => (Vec::new(), Vec::new()),
        PoleOrder::Double => {
            // B-[-Q0^2/z] = (z^2/Q0^2) (B+[z] - 2/z); B-[z*] = conj(B+[z]).
            let inv = |z: Complex64, b: Complex64| z * z / (q0 * q0) * (b - 2.0 / z);
            let mut bp = Vec::with_capacity(2 * n);
            bp.extend(cfg.eigenvalues.iter().map(|e| e.b_plus));
            for (z, e) in zs.iter().zip(&cfg.eigenvalues) {
                bp.push(inv(*z, e.b_plus).conj());
            }
            let bm = xi.iter().zip(&bp).map(|(x, b)| inv(*x, *b)).collect();
            (bp, bm)
        }
    };

    Ok(OrbitTable {
        order: cfg.pole_order,
        convention,
        q0,
        q_minus,
        q_plus: compute_q_plus(cfg),
        xi,
        xi_hat,
        a_plus_xi,
        a_minus_xihat,
        b_plus_xi,
        b_minus_xihat,
        on_circle: on_circle_any,
    })
}

/// Region membership of the extended eigenvalues: `xi in D+`, `xi_hat in D-`.
pub fn orbit_regions_ok(orbit: &OrbitTable) -> bool {
    orbit.xi.iter().zip(&orbit.xi_hat).all(|(x, h)| {
        let (Ok(px), Ok(ph)) = (
            SpectralPoint::new(*x, orbit.q0),
            SpectralPoint::new(*h, orbit.q0),
        ) else {
            return false;
        };
        region_of(px) == Region::DPlus && region_of(ph) == Region::DMinus
    })
}
