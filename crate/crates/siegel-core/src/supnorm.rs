//! Sup-norm bound machinery: matrix beta integrals, lattice sums over the
//! parabolic groups, the cusp-sum integral bounds, the counting polynomial of
//! the compact case, and the assembled cocompact and cofinite bounds.

use nalgebra::Cholesky;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::f64::consts::PI;

use crate::error::{validation, Result, SiegelError};
use crate::heat::{weighted_bound_many, HeatResult};
use crate::integration::{gaussian_moment, QuadratureSpec};
use crate::linalg::{det_c, RMat};
use crate::spherical::{Calibration, FjConfig};
use crate::symplectic::{act, cosh_product, radial_coordinates, SiegelPoint, SymplecticMatrix};

/// Cusp-decay constant for degree one: the first Fourier exponent of `Delta`.
pub const C2_DEGREE_ONE: f64 = 2.0 * PI;

/// `ln Gamma(x)`, exact products for integers and half-integers up to 170.
pub fn ln_gamma(x: f64) -> f64 {
    let twice = 2.0 * x;
    if x > 0.0 && x <= 170.0 && (twice - twice.round()).abs() < 1e-12 {
        let m = twice.round() as i64;
        let (mut v, start) = if m % 2 == 0 { (0.0, 1.0) } else { (0.5 * PI.ln(), 0.5) };
        let mut a = start;
        while a < x - 1e-9 {
            v += a.ln();
            a += 1.0;
        }
        return v;
    }
    statrs::function::gamma::ln_gamma(x)
}

fn divergent(what: &str) -> SiegelError {
    SiegelError::Divergent(what.to_string())
}

/// `int_{Sym_n(R)} det(1 + T^2)^{-alpha} [dT]`.
pub fn hua_beta(n: usize, alpha: f64) -> Result<f64> {
    Ok(log_hua_beta(n, alpha)?.exp())
}

pub fn log_hua_beta(n: usize, alpha: f64) -> Result<f64> {
    if n == 0 {
        return validation("hua_beta needs n >= 1");
    }
    let nf = n as f64;
    if !(alpha > nf / 2.0) {
        return Err(divergent(&format!("Hua integral diverges for alpha = {alpha} <= n/2 = {}", nf / 2.0)));
    }
    let mut v = nf * (nf + 1.0) / 4.0 * PI.ln() + ln_gamma(alpha - nf / 2.0) - ln_gamma(alpha);
    for nu in 1..n {
        let nu = nu as f64;
        v += ln_gamma(2.0 * alpha - (nf + nu) / 2.0) - ln_gamma(2.0 * alpha - nu);
    }
    Ok(v)
}

/// `int_{R^{p x q}} det(1_p + X X^t)^{-mu} [dX]`.
pub fn rectangular_beta(p: usize, q: usize, mu: f64) -> Result<f64> {
    Ok(log_rectangular_beta(p, q, mu)?.exp())
}

pub fn log_rectangular_beta(p: usize, q: usize, mu: f64) -> Result<f64> {
    if q == 0 || p == 0 {
        return Ok(0.0);
    }
    let (pf, qf) = (p as f64, q as f64);
    if !(mu > (pf + qf - 1.0) / 2.0) {
        return Err(divergent(&format!(
            "rectangular beta integral diverges for mu = {mu} <= (p + q - 1)/2 = {}",
            (pf + qf - 1.0) / 2.0
        )));
    }
    let mut v = pf * qf / 2.0 * PI.ln();
    for l in 1..=q {
        let s = (l as f64 - 1.0) / 2.0;
        v += ln_gamma(mu - s - pf / 2.0) - ln_gamma(mu - s);
    }
    Ok(v)
}

/// An element of the level-`l` parabolic group fixing the `j`-th standard boundary component.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CuspGroupElement {
    pub n: usize,
    pub j: usize,
    /// `(n - j) x j`, row major.
    pub l: Vec<i64>,
    /// `(n - j) x j`, row major.
    pub h: Vec<i64>,
    /// `(n - j) x (n - j)` symmetric, row major.
    pub s2: Vec<i64>,
    pub level: i64,
}

impl CuspGroupElement {
    pub fn new(n: usize, j: usize, l: Vec<i64>, h: Vec<i64>, s2: Vec<i64>, level: i64) -> Result<Self> {
        if j >= n {
            return validation("boundary degree j must satisfy j < n");
        }
        let m = n - j;
        if l.len() != m * j || h.len() != m * j || s2.len() != m * m {
            return validation("block sizes do not match (n, j)");
        }
        for a in 0..m {
            for b in 0..a {
                if s2[a * m + b] != s2[b * m + a] {
                    return validation("S2 must be symmetric");
                }
            }
        }
        if level < 1 {
            return validation("level must be >= 1");
        }
        Ok(CuspGroupElement { n, j, l, h, s2, level })
    }

    /// `A = [[1_j, 0], [l L, 1]]`.
    pub fn a(&self) -> RMat {
        let (n, j) = (self.n, self.j);
        let mut a = RMat::identity(n, n);
        for r in 0..n - j {
            for c in 0..j {
                a[(j + r, c)] = (self.level * self.l[r * j + c]) as f64;
            }
        }
        a
    }

    /// `S = [[0, l H^t], [l H, l S2]]`.
    pub fn s(&self) -> RMat {
        let (n, j) = (self.n, self.j);
        let m = n - j;
        let lv = self.level as f64;
        let mut s = RMat::zeros(n, n);
        for r in 0..m {
            for c in 0..j {
                let v = lv * self.h[r * j + c] as f64;
                s[(j + r, c)] = v;
                s[(c, j + r)] = v;
            }
            for c in 0..m {
                s[(j + r, j + c)] = lv * self.s2[r * m + c] as f64;
            }
        }
        s
    }

    /// `[[A, A S], [0, A^{-t}]]`.
    pub fn matrix(&self) -> SymplecticMatrix {
        let n = self.n;
        let a = self.a();
        let s = self.s();
        let ainv_t = a.clone().try_inverse().expect("unipotent").transpose().map(f64::round);
        let mut g = RMat::zeros(2 * n, 2 * n);
        g.view_mut((0, 0), (n, n)).copy_from(&a);
        g.view_mut((0, n), (n, n)).copy_from(&(&a * &s));
        g.view_mut((n, n), (n, n)).copy_from(&ainv_t);
        SymplecticMatrix::from_raw(g)
    }

    /// `A (Z + S) A^t`.
    pub fn act(&self, z: &SiegelPoint) -> Result<SiegelPoint> {
        let a = self.a();
        let x = &a * (z.x() + self.s()) * a.transpose();
        let y = &a * z.y() * a.transpose();
        SiegelPoint::new(x, y)
    }

    fn max_entry(&self) -> i64 {
        self.l.iter().chain(&self.h).chain(&self.s2).map(|v| v.abs()).max().unwrap_or(0)
    }
}

/// Free integer coordinates of an element: `L`, `H`, upper triangle of `S2`.
fn coordinate_count(n: usize, j: usize) -> usize {
    let m = n - j;
    2 * m * j + m * (m + 1) / 2
}

fn element_from_coords(n: usize, j: usize, c: &[i64], level: i64) -> CuspGroupElement {
    let m = n - j;
    let l = c[..m * j].to_vec();
    let h = c[m * j..2 * m * j].to_vec();
    let mut s2 = vec![0; m * m];
    let mut k = 2 * m * j;
    for a in 0..m {
        for b in a..m {
            s2[a * m + b] = c[k];
            s2[b * m + a] = c[k];
            k += 1;
        }
    }
    CuspGroupElement { n, j, l, h, s2, level }
}

/// Elements with every free coordinate in `[-cutoff, cutoff]`, shell by shell.
pub fn cusp_group_elements(n: usize, j: usize, cutoff: i64, level: i64) -> Result<Vec<CuspGroupElement>> {
    if j >= n {
        return validation("boundary degree j must satisfy j < n");
    }
    let d = coordinate_count(n, j);
    let side = (2 * cutoff + 1) as usize;
    let total = side
        .checked_pow(d as u32)
        .filter(|t| *t <= 50_000_000)
        .ok_or_else(|| SiegelError::Unsupported(format!("{d} coordinates at cutoff {cutoff} is too many terms")))?;
    let mut out: Vec<CuspGroupElement> = (0..total)
        .map(|mut idx| {
            let c: Vec<i64> = (0..d)
                .map(|_| {
                    let v = (idx % side) as i64 - cutoff;
                    idx /= side;
                    v
                })
                .collect();
            element_from_coords(n, j, &c, level)
        })
        .collect();
    out.sort_by_key(|e| e.max_entry());
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CuspSum {
    pub value: f64,
    /// Geometric tail estimate from the ratio of the last two shells.
    pub tail: f64,
    pub terms: usize,
    /// Sum of each shell `max |entry| = m`, `m = 0..=cutoff`.
    pub shells: Vec<f64>,
    pub warnings: Vec<String>,
}

/// `sum prod ch(r_j(Z, gamma Z))^{-kappa}` over the parabolic group elements up to `cutoff`.
pub fn cusp_sum_direct(n: usize, j: usize, z: &SiegelPoint, kappa: u32, cutoff: i64, level: i64) -> Result<CuspSum> {
    if z.degree() != n {
        return validation("Z must have degree n");
    }
    if (kappa as usize) < n + 1 {
        return Err(SiegelError::Domain(format!("need kappa >= n + 1, got {kappa}")));
    }
    if cutoff < 1 || level < 1 {
        return validation("cutoff and level must be >= 1");
    }
    let elems = cusp_group_elements(n, j, cutoff, level)?;
    let mut shells = vec![0.0; cutoff as usize + 1];
    for e in &elems {
        let w = e.act(z)?;
        let c = cosh_product(z, &w)?;
        shells[e.max_entry() as usize] += c.powf(kappa as f64 / 2.0);
    }
    let value: f64 = shells.iter().sum();
    let last = shells[cutoff as usize];
    let prev = shells[cutoff as usize - 1];
    let tail = if last == 0.0 {
        0.0
    } else if prev > 0.0 && last < prev {
        let q = last / prev;
        last * q / (1.0 - q)
    } else {
        f64::INFINITY
    };
    let mut warnings = Vec::new();
    if tail > 0.01 * value {
        warnings.push(format!(
            "tail estimate {tail:.3e} exceeds 1% of the sum; raise the cutoff"
        ));
    }
    Ok(CuspSum {
        value,
        tail,
        terms: elems.len(),
        shells,
        warnings,
    })
}

/// The integral majorant of [`cusp_sum_direct`] from the lattice-to-integral step.
///
/// `j = 0`: `2^{n(n+1)/2} det(Y)^{(n+1)/2} l^{-n(n+1)/2} B_Hua(n, kappa/2)`.
/// `j >= 1`: the Jacobian powers of `det P_2` (Cholesky `Y = B B^t`) times the
/// Hua factor on `Sym_{n-j}` and two rectangular beta factors over `(n-j) x j`.
pub fn cusp_sum_bound(n: usize, j: usize, y: &RMat, kappa: u32, level: i64) -> Result<f64> {
    Ok(log_cusp_sum_bound(n, j, y, kappa, level)?.exp())
}

pub fn log_cusp_sum_bound(n: usize, j: usize, y: &RMat, kappa: u32, level: i64) -> Result<f64> {
    if y.nrows() != n || y.ncols() != n || j >= n {
        return validation("Y must be n x n and j < n");
    }
    if (kappa as usize) < n + 1 {
        return Err(SiegelError::Domain(format!("need kappa >= n + 1, got {kappa}")));
    }
    if level < 1 {
        return validation("level must be >= 1");
    }
    let chol = Cholesky::new(y.clone()).ok_or_else(|| SiegelError::Domain("Y is not positive definite".into()))?;
    let b = chol.l();
    let ln2 = std::f64::consts::LN_2;
    let ll = (level as f64).ln();
    let k = kappa as f64;
    let m = n - j;
    let (mf, jf) = (m as f64, j as f64);
    let log_det_p2: f64 = (j..n).map(|i| b[(i, i)].ln()).sum();
    let sym_dim = mf * (mf + 1.0) / 2.0;
    let rect_dim = mf * jf;
    // [dS2][dH][dL] = 2^{sym + 2 rect} l^{-sym - 2 rect} det(P2)^{m + 1 + 2j} [dT][dH~][dL~]
    let mut v = (sym_dim + 2.0 * rect_dim) * (ln2 - ll) + (mf + 1.0 + 2.0 * jf) * log_det_p2;
    v += log_hua_beta(m, k / 2.0)?;
    if j > 0 {
        // det Q^{-mu}, Q = 1 + L~L~^t + H~H~^t; H~ = E U contributes det(E)^j
        let mu = k - (mf + 1.0) / 2.0;
        v += log_rectangular_beta(m, j, mu)?;
        v += log_rectangular_beta(m, j, mu - jf / 2.0)?;
    }
    Ok(v)
}

/// `prod_j (kappa - (n-j+1))/2 * prod_{l<m} (kappa - (n - (l+m)/2 + 1)) * prod_{l<m} (m-l)/2`.
pub fn cusp_local_factor(n: usize, kappa: f64) -> f64 {
    let nf = n as f64;
    let mut v: f64 = (1..=n).map(|j| (kappa - (nf - j as f64 + 1.0)) / 2.0).product();
    for l in 1..=n {
        for m in l + 1..=n {
            let (lf, mf) = (l as f64, m as f64);
            v *= (kappa - (nf - (lf + mf) / 2.0 + 1.0)) * (mf - lf) / 2.0;
        }
    }
    v
}

/// Coefficients of `H_n(kappa, t)` as a polynomial in `kappa` and `sqrt(t)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoefficientTable {
    pub n: usize,
    /// `(power of kappa, power of sqrt t) -> coefficient`.
    pub entries: BTreeMap<(u32, u32), f64>,
}

impl CoefficientTable {
    pub fn evaluate(&self, kappa: f64, t: f64) -> f64 {
        let s = t.sqrt();
        self.entries.iter().map(|(&(a, b), c)| c * kappa.powi(a as i32) * s.powi(b as i32)).sum()
    }

    pub fn kappa_degree(&self) -> u32 {
        self.entries.iter().filter(|(_, c)| **c != 0.0).map(|(&(a, _), _)| a).max().unwrap_or(0)
    }
}

type Poly = BTreeMap<Vec<u8>, f64>;

/// Linear factor as `(variable, coefficient)` pairs over `xi_1..xi_n, kappa*s, s`;
/// index `n` is `kappa * s` and `n + 1` is `s`.
fn compact_factors(n: usize) -> Vec<Vec<(usize, f64)>> {
    let nf = n as f64;
    let ks = n;
    let s = n + 1;
    let mut f = Vec::new();
    for j in 1..=n {
        // xi_j + (kappa - (n - j + 1)) s / 2
        f.push(vec![(j - 1, 1.0), (ks, 0.5), (s, -(nf - j as f64 + 1.0) / 2.0)]);
    }
    for l in 1..=n {
        for m in l + 1..=n {
            let (lf, mf) = (l as f64, m as f64);
            f.push(vec![(l - 1, 1.0), (m - 1, -1.0), (s, (lf - mf) / 2.0)]);
            f.push(vec![(l - 1, 1.0), (m - 1, 1.0), (ks, 1.0), (s, -(nf - (lf + mf) / 2.0 + 1.0))]);
        }
    }
    f
}

/// `H_n(kappa, t)`: the Gaussian integral of the product of shifted squares,
/// expanded exactly and integrated monomial by monomial.
pub fn compact_h_table(n: usize) -> Result<CoefficientTable> {
    if n == 0 {
        return validation("n must be >= 1");
    }
    if n > 4 {
        return Err(SiegelError::Unsupported(format!("polynomial expansion needs n <= 4, got {n}")));
    }
    // variables: xi_1..xi_n, kappa, s
    let nvars = n + 2;
    let mut p = Poly::new();
    p.insert(vec![0u8; nvars], 1.0);
    for f in compact_factors(n) {
        // each factor enters squared; kappa*s bumps two exponents at once
        for _ in 0..2 {
            let mut out = Poly::new();
            for (mono, c) in &p {
                for &(var, coef) in &f {
                    let mut m = mono.clone();
                    if var == n {
                        m[n] += 1;
                        m[n + 1] += 1;
                    } else {
                        m[var] += 1;
                    }
                    *out.entry(m).or_insert(0.0) += c * coef;
                }
            }
            p = out;
        }
    }
    let mut entries = BTreeMap::new();
    for (mono, c) in p {
        let moment: f64 = mono[..n].iter().map(|&e| gaussian_moment(e as u32)).product();
        if moment == 0.0 {
            continue;
        }
        *entries.entry((mono[n] as u32, mono[n + 1] as u32)).or_insert(0.0) += c * moment;
    }
    Ok(CoefficientTable { n, entries })
}

/// Value of `H_n(kappa, t)` together with its coefficient table.
pub fn compact_h_polynomial(n: usize, kappa: f64, t: f64) -> Result<(f64, CoefficientTable)> {
    let table = compact_h_table(n)?;
    Ok((table.evaluate(kappa, t), table))
}

/// Which group the bound is for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundSetting {
    Cocompact,
    Cofinite,
    Cover(i64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Exponent {
    pub num: u32,
    pub den: u32,
}

impl Exponent {
    pub fn value(&self) -> f64 {
        self.num as f64 / self.den as f64
    }

    fn reduced(num: u32, den: u32) -> Self {
        fn g(a: u32, b: u32) -> u32 {
            if b == 0 {
                a
            } else {
                g(b, a % b)
            }
        }
        let d = g(num, den).max(1);
        Exponent { num: num / d, den: den / d }
    }
}

impl std::fmt::Display for Exponent {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundEvaluation {
    pub label: String,
    pub t: Option<f64>,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub n: usize,
    pub kappa: u32,
    pub setting: BoundSetting,
    pub exponent: Exponent,
    /// `bound / kappa^exponent` at this `kappa`.
    pub constant_estimate: f64,
    pub bound: f64,
    pub evaluations: Vec<BoundEvaluation>,
    /// Counting and torsion constants of the group, not computable here.
    pub group_constant: f64,
    pub notes: Vec<String>,
}

/// `kappa * int_0^inf exp(-kappa t) kappa^a t^{b/2} dt` summed over table entries
/// with `a` in `powers` (all entries when `None`).
fn laplace_of_h(table: &CoefficientTable, kappa: f64, power: Option<u32>) -> f64 {
    let mut v = 0.0;
    for (&(a, b), c) in &table.entries {
        if power.is_some_and(|p| p != a) {
            continue;
        }
        let p = b as f64 / 2.0;
        v += c * (a as f64 * kappa.ln() + ln_gamma(p + 1.0) - (p + 1.0) * kappa.ln()).exp();
    }
    kappa * v
}

/// Compact-case bound: the Laplace transform in `t` of the top-degree part
/// `kappa^{n(n+1)} t^{n(n+1)/2} mu(sqrt t)` of `H_n`.
pub fn cocompact_bound(n: usize, kappa: u32) -> Result<BoundReport> {
    if (kappa as usize) < n + 1 {
        return Err(SiegelError::Domain(format!("need kappa >= n + 1, got {kappa}")));
    }
    let table = compact_h_table(n)?;
    let k = kappa as f64;
    let top = table.kappa_degree();
    let bound = laplace_of_h(&table, k, Some(top));
    let exponent = Exponent::reduced((n * (n + 1)) as u32, 2);
    Ok(BoundReport {
        n,
        kappa,
        setting: BoundSetting::Cocompact,
        exponent,
        constant_estimate: bound / k.powf(exponent.value()),
        bound,
        evaluations: vec![
            BoundEvaluation {
                label: "laplace_transform_of_leading_H".into(),
                t: None,
                value: bound,
            },
            BoundEvaluation {
                label: "laplace_transform_of_full_H".into(),
                t: None,
                value: laplace_of_h(&table, k, None),
            },
            BoundEvaluation {
                label: "H_at_t_1_over_kappa".into(),
                t: Some(1.0 / k),
                value: table.evaluate(k, 1.0 / k),
            },
        ],
        group_constant: 1.0,
        notes: vec!["group counting constant reported as 1".into()],
    })
}

/// Cofinite (`level = 1`) or cover (`level > 1`) bound: the compact part plus
/// the cusp local factor times the cusp-sum bound at `Y = (kappa l / 2 c2) 1`,
/// summed over the boundary degrees `j`.
pub fn cofinite_bound(n: usize, kappa: u32, level: i64, c2: f64) -> Result<BoundReport> {
    if level < 1 {
        return validation("level must be >= 1");
    }
    if !(c2 > 0.0) {
        return validation("c2 must be positive");
    }
    let compact = cocompact_bound(n, kappa)?;
    let k = kappa as f64;
    let local = cusp_local_factor(n, k);
    let y = RMat::identity(n, n) * (k * level as f64 / (2.0 * c2));
    let mut evaluations = vec![
        BoundEvaluation {
            label: "compact_part".into(),
            t: None,
            value: compact.bound,
        },
        BoundEvaluation {
            label: "cusp_local_factor".into(),
            t: None,
            value: local,
        },
    ];
    let mut cusp = 0.0;
    for j in 0..n {
        let v = cusp_sum_bound(n, j, &y, kappa, level)?;
        evaluations.push(BoundEvaluation {
            label: format!("cusp_sum_bound_j{j}"),
            t: None,
            value: v,
        });
        cusp += v;
    }
    let bound = compact.bound + local * cusp;
    let exponent = Exponent::reduced((3 * n * (n + 1)) as u32, 4);
    evaluations.push(BoundEvaluation {
        label: "cusp_part".into(),
        t: None,
        value: local * cusp,
    });
    Ok(BoundReport {
        n,
        kappa,
        setting: if level == 1 { BoundSetting::Cofinite } else { BoundSetting::Cover(level) },
        exponent,
        constant_estimate: bound / k.powf(exponent.value()),
        bound,
        evaluations,
        group_constant: 1.0,
        notes: vec![
            "group counting constant reported as 1".into(),
            format!("cusp-decay constant c2 = {c2}"),
        ],
    })
}

/// `exp(-(n kappa/4)(kappa - n - 1) t) sum_gamma K^(kappa)_t bound at R(Z, gamma Z)`.
pub fn periodized_heat_bound(
    z: &SiegelPoint,
    kappa: u32,
    t: f64,
    elements: &[SymplecticMatrix],
    cal: &Calibration,
    cfg: &FjConfig,
    spec: &QuadratureSpec,
) -> Result<HeatResult> {
    let n = z.degree();
    if elements.is_empty() {
        return Ok(HeatResult {
            value: 0.0,
            std_error: 0.0,
            warnings: Vec::new(),
        });
    }
    let mut rs = Vec::with_capacity(elements.len());
    for g in elements {
        let w = act(g, z)?;
        rs.push(radial_coordinates(z, &w)?.r);
    }
    let parts = weighted_bound_many(n, &rs, t, kappa, cal, cfg, spec)?;
    let k = kappa as f64;
    let nf = n as f64;
    let damp = (-(nf * k / 4.0) * (k - nf - 1.0) * t).exp();
    // the per-point estimates share samples, so their errors add linearly
    let value = damp * parts.iter().map(|p| p.value).sum::<f64>();
    let std_error = damp * parts.iter().map(|p| p.std_error).sum::<f64>();
    let mut warnings: Vec<String> = parts.into_iter().flat_map(|p| p.warnings).collect();
    warnings.sort();
    warnings.dedup();
    Ok(HeatResult {
        value,
        std_error,
        warnings,
    })
}

/// Least-squares slope of `log y` against `log x`.
pub fn log_log_slope(x: &[f64], y: &[f64]) -> f64 {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

/// `det(C Z + D)` is 1 for every element of the parabolic groups.
pub fn automorphy_is_unimodular(g: &CuspGroupElement, z: &SiegelPoint) -> bool {
    let m = g.matrix().automorphy(z);
    (det_c(&m).norm() - 1.0).abs() < 1e-12
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gamma_half_integers() {
        assert!((ln_gamma(1.5).exp() - PI.sqrt() / 2.0).abs() < 1e-15);
        assert!((ln_gamma(5.0).exp() - 24.0).abs() < 1e-12);
        assert!((ln_gamma(2.3) - statrs::function::gamma::ln_gamma(2.3)).abs() < 1e-12);
    }

    #[test]
    fn local_factor_examples() {
        assert_eq!(cusp_local_factor(1, 12.0), 5.5);
        assert!((cusp_local_factor(2, 10.0) - 76.5).abs() < 1e-12);
    }
}
