//! Points of the Siegel upper half-space, the symplectic action and the
//! basic invariants of a pair of points.

use nalgebra::{DVector, SVD};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{validation, Result, SiegelError};
use crate::linalg::{
    asymmetry, compose, det_c, hermitian_eigenvalues, imag_part, inverse_checked, is_positive_definite, real_part,
    sqrt_and_inv_sqrt, symmetrize, symmetrize_c, to_complex, udu, CMat, RMat, I,
};

const SYM_TOL: f64 = 1e-12;
const SYMPLECTIC_TOL: f64 = 1e-10;
const MAX_COND: f64 = 1e13;

/// A point `Z = X + iY` with `X`, `Y` real symmetric and `Y > 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PointRepr", into = "PointRepr")]
pub struct SiegelPoint {
    x: RMat,
    y: RMat,
}

#[derive(Serialize, Deserialize)]
struct PointRepr {
    n: usize,
    #[serde(rename = "X")]
    x: Vec<f64>,
    #[serde(rename = "Y")]
    y: Vec<f64>,
}

impl TryFrom<PointRepr> for SiegelPoint {
    type Error = SiegelError;
    fn try_from(r: PointRepr) -> Result<Self> {
        if r.n == 0 || r.x.len() != r.n * r.n || r.y.len() != r.n * r.n {
            return validation("X and Y must be row-major arrays of length n*n");
        }
        SiegelPoint::new(
            RMat::from_row_slice(r.n, r.n, &r.x),
            RMat::from_row_slice(r.n, r.n, &r.y),
        )
    }
}

impl From<SiegelPoint> for PointRepr {
    fn from(p: SiegelPoint) -> Self {
        let n = p.degree();
        PointRepr {
            n,
            x: row_major(&p.x),
            y: row_major(&p.y),
        }
    }
}

pub(crate) fn row_major(m: &RMat) -> Vec<f64> {
    (0..m.nrows())
        .flat_map(|i| (0..m.ncols()).map(move |j| (i, j)))
        .map(|ij| m[ij])
        .collect()
}

impl SiegelPoint {
    pub fn new(x: RMat, y: RMat) -> Result<Self> {
        let n = x.nrows();
        if n == 0 || x.ncols() != n || y.nrows() != n || y.ncols() != n {
            return validation("X and Y must be square of the same size");
        }
        if asymmetry(&x) > SYM_TOL * (1.0 + x.amax()) || asymmetry(&y) > SYM_TOL * (1.0 + y.amax())
        {
            return validation("X and Y must be symmetric");
        }
        if x.iter().chain(y.iter()).any(|v| !v.is_finite()) {
            return validation("non-finite entry");
        }
        let y = symmetrize(&y);
        if !is_positive_definite(&y) {
            return Err(SiegelError::Domain("Im(Z) is not positive definite".into()));
        }
        Ok(SiegelPoint { x: symmetrize(&x), y })
    }

    /// Build from a complex matrix that is symmetric up to rounding.
    pub fn from_z(z: &CMat) -> Result<Self> {
        let z = symmetrize_c(z);
        SiegelPoint::new(real_part(&z), imag_part(&z))
    }

    /// The base point `i 1_n`.
    pub fn base(n: usize) -> Self {
        SiegelPoint {
            x: RMat::zeros(n, n),
            y: RMat::identity(n, n),
        }
    }

    /// `i * diag(d)`.
    pub fn imaginary_diagonal(d: &[f64]) -> Result<Self> {
        let n = d.len();
        SiegelPoint::new(RMat::zeros(n, n), RMat::from_diagonal(&DVector::from_column_slice(d)))
    }

    pub fn degree(&self) -> usize {
        self.x.nrows()
    }

    pub fn x(&self) -> &RMat {
        &self.x
    }

    pub fn y(&self) -> &RMat {
        &self.y
    }

    pub fn z(&self) -> CMat {
        compose(&self.x, &self.y)
    }

    pub fn z_conj(&self) -> CMat {
        compose(&self.x, &(-&self.y))
    }
}

/// A real `2n x 2n` matrix with `g^t J g = J`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MatrixRepr", into = "MatrixRepr")]
pub struct SymplecticMatrix {
    g: RMat,
}

#[derive(Serialize, Deserialize)]
struct MatrixRepr {
    n: usize,
    g: Vec<f64>,
}

impl TryFrom<MatrixRepr> for SymplecticMatrix {
    type Error = SiegelError;
    fn try_from(r: MatrixRepr) -> Result<Self> {
        if r.g.len() != 4 * r.n * r.n {
            return validation("g must be a row-major array of length 4n^2");
        }
        SymplecticMatrix::new(RMat::from_row_slice(2 * r.n, 2 * r.n, &r.g))
    }
}

impl From<SymplecticMatrix> for MatrixRepr {
    fn from(m: SymplecticMatrix) -> Self {
        MatrixRepr {
            n: m.degree(),
            g: row_major(&m.g),
        }
    }
}

/// The standard skew form `J_n = [[0, 1], [-1, 0]]`.
pub fn j_form(n: usize) -> RMat {
    let mut j = RMat::zeros(2 * n, 2 * n);
    for i in 0..n {
        j[(i, n + i)] = 1.0;
        j[(n + i, i)] = -1.0;
    }
    j
}

/// Entrywise defect `max |g^t J g - J|`.
pub fn symplectic_defect(g: &RMat) -> f64 {
    let n = g.nrows() / 2;
    let j = j_form(n);
    (g.transpose() * &j * g - j).amax()
}

impl SymplecticMatrix {
    pub fn new(g: RMat) -> Result<Self> {
        if g.nrows() != g.ncols() || g.nrows() % 2 != 0 || g.nrows() == 0 {
            return validation("symplectic matrix must be 2n x 2n");
        }
        let scale = g.amax().max(1.0).powi(2);
        let defect = symplectic_defect(&g);
        if !(defect <= SYMPLECTIC_TOL * scale) {
            return validation(format!("matrix is not symplectic (defect {defect:.3e})"));
        }
        Ok(SymplecticMatrix { g })
    }

    pub fn from_blocks(a: &RMat, b: &RMat, c: &RMat, d: &RMat) -> Result<Self> {
        let n = a.nrows();
        let mut g = RMat::zeros(2 * n, 2 * n);
        g.view_mut((0, 0), (n, n)).copy_from(a);
        g.view_mut((0, n), (n, n)).copy_from(b);
        g.view_mut((n, 0), (n, n)).copy_from(c);
        g.view_mut((n, n), (n, n)).copy_from(d);
        SymplecticMatrix::new(g)
    }

    pub fn identity(n: usize) -> Self {
        SymplecticMatrix {
            g: RMat::identity(2 * n, 2 * n),
        }
    }

    pub fn j(n: usize) -> Self {
        SymplecticMatrix { g: j_form(n) }
    }

    /// `[[1, S], [0, 1]]` for symmetric `S`.
    pub fn translation(s: &RMat) -> Result<Self> {
        let n = s.nrows();
        SymplecticMatrix::from_blocks(
            &RMat::identity(n, n),
            s,
            &RMat::zeros(n, n),
            &RMat::identity(n, n),
        )
    }

    /// `[[U^t, 0], [0, U^{-1}]]`, acting by `Z -> U^t Z U`.
    pub fn conjugation(u: &RMat) -> Result<Self> {
        let n = u.nrows();
        let ui = u
            .clone()
            .try_inverse()
            .ok_or_else(|| SiegelError::Validation("U is singular".into()))?;
        SymplecticMatrix::from_blocks(&u.transpose(), &RMat::zeros(n, n), &RMat::zeros(n, n), &ui)
    }

    /// `exp(r) = diag(e^{r_1}, ..., e^{r_n}, e^{-r_1}, ..., e^{-r_n})`.
    pub fn diagonal_exp(r: &[f64]) -> Self {
        let n = r.len();
        let mut g = RMat::zeros(2 * n, 2 * n);
        for (j, rj) in r.iter().enumerate() {
            g[(j, j)] = rj.exp();
            g[(n + j, n + j)] = (-rj).exp();
        }
        SymplecticMatrix { g }
    }

    pub(crate) fn from_raw(g: RMat) -> Self {
        SymplecticMatrix { g }
    }

    pub fn degree(&self) -> usize {
        self.g.nrows() / 2
    }

    pub fn matrix(&self) -> &RMat {
        &self.g
    }

    fn block(&self, i: usize, j: usize) -> RMat {
        let n = self.degree();
        self.g.view((i * n, j * n), (n, n)).into_owned()
    }

    pub fn a(&self) -> RMat {
        self.block(0, 0)
    }
    pub fn b(&self) -> RMat {
        self.block(0, 1)
    }
    pub fn c(&self) -> RMat {
        self.block(1, 0)
    }
    pub fn d(&self) -> RMat {
        self.block(1, 1)
    }

    pub fn compose(&self, other: &SymplecticMatrix) -> SymplecticMatrix {
        SymplecticMatrix {
            g: &self.g * &other.g,
        }
    }

    /// `g^{-1} = [[D^t, -B^t], [-C^t, A^t]]`.
    pub fn inverse(&self) -> SymplecticMatrix {
        let n = self.degree();
        let mut g = RMat::zeros(2 * n, 2 * n);
        g.view_mut((0, 0), (n, n)).copy_from(&self.d().transpose());
        g.view_mut((0, n), (n, n)).copy_from(&(-self.b().transpose()));
        g.view_mut((n, 0), (n, n)).copy_from(&(-self.c().transpose()));
        g.view_mut((n, n), (n, n)).copy_from(&self.a().transpose());
        SymplecticMatrix { g }
    }

    pub fn is_integral(&self, tol: f64) -> bool {
        self.g.iter().all(|v| (v - v.round()).abs() <= tol)
    }

    /// `CZ + D`.
    pub fn automorphy(&self, z: &SiegelPoint) -> CMat {
        to_complex(&self.c()) * z.z() + to_complex(&self.d())
    }
}

/// `gZ = (AZ + B)(CZ + D)^{-1}`.
pub fn act(g: &SymplecticMatrix, z: &SiegelPoint) -> Result<SiegelPoint> {
    if g.degree() != z.degree() {
        return validation("degree mismatch between g and Z");
    }
    let zc = z.z();
    let num = to_complex(&g.a()) * &zc + to_complex(&g.b());
    let den = g.automorphy(z);
    let w = num * inverse_checked(&den, MAX_COND)?;
    SiegelPoint::from_z(&w).map_err(|e| match e {
        SiegelError::Domain(m) => SiegelError::Conditioning(format!("image lost positivity: {m}")),
        other => other,
    })
}

fn same_degree(z: &SiegelPoint, w: &SiegelPoint) -> Result<()> {
    if z.degree() != w.degree() {
        return validation("points have different degrees");
    }
    Ok(())
}

/// `Y^{-1/2} (W - X) Y^{-1/2}`: the image of `W` under the real symplectic
/// map that sends `Z` to `i 1_n`.
pub fn recenter(z: &SiegelPoint, w: &SiegelPoint) -> Result<CMat> {
    same_degree(z, w)?;
    let (_, yi) = sqrt_and_inv_sqrt(z.y())?;
    let yi = to_complex(&yi);
    Ok(symmetrize_c(&(&yi * (w.z() - to_complex(z.x())) * &yi)))
}

/// Singular values `s_j` of `zeta = (V - i)(V + i)^{-1}`, descending, paired
/// with `1 - s_j^2`, where `V = L^{-1} (W - X) L^{-t}` and `Y = L L^t`.
///
/// The cross-ratio matrix of `(i 1_n, V)` is `zeta * conj(zeta)` with `zeta`
/// symmetric, so its eigenvalues are the `s_j^2`. The complements come from
/// `1 - zeta^* zeta = 4 A^* Im(V) A`, `A = (V + i)^{-1}`, which has no
/// cancellation when `s_j` is close to 1.
fn cayley_singular_values(z: &SiegelPoint, w: &SiegelPoint) -> Result<Vec<(f64, f64)>> {
    same_degree(z, w)?;
    let n = z.degree();
    let chol = z
        .y()
        .clone()
        .cholesky()
        .ok_or_else(|| SiegelError::Domain("Im Z is not positive definite".into()))?;
    let li = to_complex(
        &chol
            .l()
            .try_inverse()
            .ok_or_else(|| SiegelError::Conditioning("singular Cholesky factor".into()))?,
    );
    let v = symmetrize_c(&(&li * (w.z() - to_complex(z.x())) * li.transpose()));
    let a = inverse_checked(&(&v + CMat::identity(n, n) * I), MAX_COND)?;
    let zeta = symmetrize_c(&(CMat::identity(n, n) - &a * (I * 2.0)));
    let mut s: Vec<f64> = SVD::new(zeta, false, false).singular_values.iter().cloned().collect();
    s.sort_by(|p, q| q.partial_cmp(p).unwrap());
    let m = a.adjoint() * to_complex(&imag_part(&v)) * &a * Complex64::new(4.0, 0.0);
    let mut mu = hermitian_eigenvalues(&m);
    mu.reverse();
    Ok(s.into_iter().zip(mu).collect())
}

/// Eigenvalues of the cross-ratio matrix, each in `[0, 1)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossRatioSpectrum {
    pub rho: Vec<f64>,
}

/// Eigenvalues of `(Z-W)(conj Z - W)^{-1}(conj Z - conj W)(Z - conj W)^{-1}`, descending.
pub fn cross_ratio_spectrum(z: &SiegelPoint, w: &SiegelPoint) -> Result<CrossRatioSpectrum> {
    let s = cayley_singular_values(z, w)?;
    let mut rho = Vec::with_capacity(s.len());
    for (sj, mj) in s {
        let r = if sj < 0.5 { sj * sj } else { 1.0 - mj };
        if r >= 1.0 {
            return Err(SiegelError::Numerical(format!(
                "cross-ratio eigenvalue {r} is not below 1"
            )));
        }
        rho.push(r);
    }
    Ok(CrossRatioSpectrum { rho })
}

/// The literal cross-ratio product, for diagnostics and tests.
pub fn cross_ratio_matrix(z: &SiegelPoint, w: &SiegelPoint) -> Result<CMat> {
    same_degree(z, w)?;
    let (zc, zb, wc, wb) = (z.z(), z.z_conj(), w.z(), w.z_conj());
    let f1 = &zc - &wc;
    let f2 = inverse_checked(&(&zb - &wc), MAX_COND)?;
    let f3 = &zb - &wb;
    let f4 = inverse_checked(&(&zc - &wb), MAX_COND)?;
    Ok(f1 * f2 * f3 * f4)
}

/// Ordered radial coordinates `r_1 >= ... >= r_n >= 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialVector {
    pub r: Vec<f64>,
    pub canonical: bool,
}

impl RadialVector {
    /// Sort descending after taking absolute values, i.e. move into the closed chamber.
    pub fn canonical(r: &[f64]) -> Self {
        let mut v: Vec<f64> = r.iter().map(|x| x.abs()).collect();
        v.sort_by(|a, b| b.partial_cmp(a).unwrap());
        RadialVector { r: v, canonical: true }
    }

    pub fn raw(r: &[f64]) -> Self {
        let canonical =
            r.iter().all(|&x| x >= 0.0) && r.windows(2).all(|w| w[0] >= w[1]);
        RadialVector { r: r.to_vec(), canonical }
    }

    pub fn zero(n: usize) -> Self {
        RadialVector { r: vec![0.0; n], canonical: true }
    }

    pub fn len(&self) -> usize {
        self.r.len()
    }

    pub fn is_empty(&self) -> bool {
        self.r.is_empty()
    }
}

/// `r_j` with `th(r_j)^2 = rho_j`, descending.
pub fn radial_coordinates(z: &SiegelPoint, w: &SiegelPoint) -> Result<RadialVector> {
    let s = cayley_singular_values(z, w)?;
    let mut r = Vec::with_capacity(s.len());
    for (sj, mj) in s {
        if sj < 0.5 {
            r.push(sj.atanh());
        } else if mj > 0.0 {
            // atanh(s) = log(1 + s) - log(1 - s^2) / 2
            r.push((1.0 + (1.0 - mj).sqrt()).ln() - 0.5 * mj.ln());
        } else {
            return Err(SiegelError::Domain(format!(
                "cross-ratio root {sj} is not below 1"
            )));
        }
    }
    Ok(RadialVector { r, canonical: true })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DistanceConvention {
    /// `sqrt(2) * (sum log^2((1+sqrt rho)/(1-sqrt rho)))^{1/2}`.
    Paper,
    /// Riemannian distance of `ds^2 = tr(Y^{-1} dZ Y^{-1} d conj Z)`; `log 2` between `i` and `2i`.
    Metric,
}

impl std::str::FromStr for DistanceConvention {
    type Err = SiegelError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "paper" => Ok(DistanceConvention::Paper),
            "metric" => Ok(DistanceConvention::Metric),
            other => validation(format!("unknown distance convention '{other}'")),
        }
    }
}

pub fn distance(z: &SiegelPoint, w: &SiegelPoint, convention: DistanceConvention) -> Result<f64> {
    let r = radial_coordinates(z, w)?;
    let s = r.r.iter().map(|rj| (2.0 * rj).powi(2)).sum::<f64>().sqrt();
    Ok(match convention {
        DistanceConvention::Paper => std::f64::consts::SQRT_2 * s,
        DistanceConvention::Metric => s,
    })
}

/// `prod 1/ch^2(r_j) = 4^n det(Im Z) det(Im W) / |det(W - conj Z)|^2`.
pub fn cosh_product(z: &SiegelPoint, w: &SiegelPoint) -> Result<f64> {
    same_degree(z, w)?;
    let n = z.degree() as i32;
    let dz = z.y().determinant();
    let dw = w.y().determinant();
    let den = det_c(&(w.z() - z.z_conj())).norm_sqr();
    Ok(4f64.powi(n) * dz * dw / den)
}

fn cayley_matrix(z: &CMat) -> Result<CMat> {
    let n = z.nrows();
    let id = CMat::identity(n, n) * I;
    let num = z - &id;
    let den = z + &id;
    Ok(symmetrize_c(&(num * inverse_checked(&den, MAX_COND)?)))
}

/// `(Z - i)(Z + i)^{-1}`, a point of the bounded domain.
pub fn cayley(z: &SiegelPoint) -> Result<CMat> {
    cayley_matrix(&z.z())
}

/// `i (1 + zeta)(1 - zeta)^{-1}`; requires `zeta conj(zeta) < 1`.
pub fn inverse_cayley(zeta: &CMat) -> Result<SiegelPoint> {
    let n = zeta.nrows();
    if zeta.ncols() != n || n == 0 {
        return validation("zeta must be square");
    }
    let asym = (zeta - zeta.transpose()).camax();
    if asym > SYM_TOL * (1.0 + zeta.camax()) {
        return validation("zeta must be symmetric");
    }
    let smax = SVD::new(zeta.clone(), false, false)
        .singular_values
        .iter()
        .cloned()
        .fold(0.0, f64::max);
    if !(smax < 1.0) {
        return Err(SiegelError::Domain(format!(
            "zeta lies on or outside the boundary (largest singular value {smax})"
        )));
    }
    let id = CMat::identity(n, n);
    let num = (&id + zeta) * I;
    let den = &id - zeta;
    SiegelPoint::from_z(&(num * inverse_checked(&den, MAX_COND)?))
}

/// `H(g)` with `g in K_0 exp(H(g)) N_0`.
///
/// Reads the a-part of `W = g^{-1} i 1_n` from `Im W = P D P^t` with `P` unit
/// upper-triangular, and returns `-log(D)/2`.
pub fn iwasawa_a_part(g: &SymplecticMatrix) -> Result<Vec<f64>> {
    let w = act(&g.inverse(), &SiegelPoint::base(g.degree()))?;
    let (_, d) = udu(w.y())?;
    Ok(d.iter().map(|dj| -0.5 * dj.ln()).collect())
}

#[derive(Clone, Copy)]
enum Part {
    X,
    Y,
}

fn shifted(z: &SiegelPoint, part: Part, j: usize, k: usize, delta: f64) -> (RMat, RMat) {
    let (mut x, mut y) = (z.x().clone(), z.y().clone());
    let m = match part {
        Part::X => &mut x,
        Part::Y => &mut y,
    };
    m[(j, k)] += delta;
    if j != k {
        m[(k, j)] += delta;
    }
    (x, y)
}

fn index_pairs(n: usize) -> Vec<(usize, usize)> {
    let mut v = Vec::new();
    for j in 0..n {
        for k in j..n {
            v.push((j, k));
        }
    }
    v
}

/// Second-order central differences of `f` in the coordinates of one block.
struct Derivatives {
    grad: Vec<Complex64>,
    hess: Vec<Vec<Complex64>>,
}

fn block_derivatives<F>(f: &F, z: &SiegelPoint, part: Part, h: f64, f0: Complex64) -> Result<Derivatives>
where
    F: Fn(&SiegelPoint) -> Complex64,
{
    let pairs = index_pairs(z.degree());
    let m = pairs.len();
    let eval = |shifts: &[(usize, f64)]| -> Result<Complex64> {
        let mut p = z.clone();
        for &(u, d) in shifts {
            let (j, k) = pairs[u];
            let (x, y) = shifted(&p, part, j, k, d);
            p = SiegelPoint::new(x, y).map_err(|_| {
                SiegelError::StepSize(format!("stencil with step {h} leaves the cone Y > 0"))
            })?;
        }
        Ok(f(&p))
    };
    let mut grad = vec![Complex64::new(0.0, 0.0); m];
    let mut hess = vec![vec![Complex64::new(0.0, 0.0); m]; m];
    let h2 = h * h;
    for u in 0..m {
        let fp = eval(&[(u, h)])?;
        let fm = eval(&[(u, -h)])?;
        grad[u] = (fp - fm) / (2.0 * h);
        hess[u][u] = (fp - 2.0 * f0 + fm) / h2;
        for v in 0..u {
            let fpp = eval(&[(u, h), (v, h)])?;
            let fpm = eval(&[(u, h), (v, -h)])?;
            let fmp = eval(&[(u, -h), (v, h)])?;
            let fmm = eval(&[(u, -h), (v, -h)])?;
            let val = (fpp - fpm - fmp + fmm) / (4.0 * h2);
            hess[u][v] = val;
            hess[v][u] = val;
        }
    }
    Ok(Derivatives { grad, hess })
}

fn laplacian_at_step<F>(f: &F, z: &SiegelPoint, kappa: u32, h: f64) -> Result<Complex64>
where
    F: Fn(&SiegelPoint) -> Complex64,
{
    let n = z.degree();
    let pairs = index_pairs(n);
    let idx = |a: usize, b: usize| -> usize {
        let (j, k) = if a <= b { (a, b) } else { (b, a) };
        pairs.iter().position(|&p| p == (j, k)).unwrap()
    };
    let coef = |a: usize, b: usize| if a == b { 1.0 } else { 0.5 };
    let f0 = f(z);
    let dx = block_derivatives(f, z, Part::X, h, f0)?;
    let dy = block_derivatives(f, z, Part::Y, h, f0)?;
    let y = z.y();
    let mut acc = Complex64::new(0.0, 0.0);
    // tr(Y (Y d)^t d) = sum Y_ab Y_cd d_db d_ca
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                for d in 0..n {
                    let w = y[(a, b)] * y[(c, d)] * coef(d, b) * coef(c, a);
                    if w == 0.0 {
                        continue;
                    }
                    let (u, v) = (idx(d, b), idx(c, a));
                    acc += (dx.hess[u][v] + dy.hess[u][v]) * w;
                }
            }
        }
    }
    // -i kappa tr(Y dX)
    let mut first = Complex64::new(0.0, 0.0);
    for a in 0..n {
        for b in 0..n {
            first += dx.grad[idx(b, a)] * (y[(a, b)] * coef(b, a));
        }
    }
    Ok(acc - I * (kappa as f64) * first)
}

/// Finite-difference evaluation of the weight-`kappa` Siegel-Maass Laplacian.
///
/// Uses central differences with step `h`; when the result at `h` and `h/2`
/// disagree by more than `1e-6` relative, the Richardson combination of the two
/// is returned instead.
pub fn apply_maass_laplacian<F>(f: F, z: &SiegelPoint, kappa: u32, h: f64) -> Result<Complex64>
where
    F: Fn(&SiegelPoint) -> Complex64,
{
    if !(h > 0.0) {
        return validation("step must be positive");
    }
    let d1 = laplacian_at_step(&f, z, kappa, h)?;
    let d2 = laplacian_at_step(&f, z, kappa, 0.5 * h)?;
    let scale = d1.norm().max(d2.norm()).max(f(z).norm()).max(f64::MIN_POSITIVE);
    if (d1 - d2).norm() <= 1e-6 * scale {
        Ok(d1)
    } else {
        Ok((d2 * 4.0 - d1) / 3.0)
    }
}

/// Random real symplectic matrix `k a n`, used by tests and benches.
pub fn random_symplectic<R: rand::Rng + ?Sized>(n: usize, rng: &mut R, spread: f64) -> SymplecticMatrix {
    use rand_distr::{Distribution, StandardNormal};
    let mut gauss = || -> f64 { StandardNormal.sample(rng) };
    // unipotent translation and conjugation parts
    let mut s = RMat::zeros(n, n);
    let mut u = RMat::identity(n, n);
    for j in 0..n {
        for k in j..n {
            let v = spread * gauss();
            s[(j, k)] = v;
            s[(k, j)] = v;
            if k > j {
                u[(j, k)] = spread * gauss();
            }
        }
    }
    let r: Vec<f64> = (0..n).map(|_| spread * gauss()).collect();
    let ta = SymplecticMatrix::translation(&s).unwrap();
    let cu = SymplecticMatrix::conjugation(&u).unwrap();
    let a = SymplecticMatrix::diagonal_exp(&r);
    let k = crate::integration::unitary_to_k0(&crate::integration::haar_unitary(n, rng));
    k.compose(&a).compose(&cu).compose(&ta)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt1(x: f64, y: f64) -> SiegelPoint {
        SiegelPoint::new(RMat::from_element(1, 1, x), RMat::from_element(1, 1, y)).unwrap()
    }

    #[test]
    fn translation_and_inversion() {
        let g = SymplecticMatrix::new(RMat::from_row_slice(2, 2, &[1.0, 1.0, 0.0, 1.0])).unwrap();
        let w = act(&g, &pt1(0.0, 1.0)).unwrap();
        assert!((w.x()[(0, 0)] - 1.0).abs() < 1e-15 && (w.y()[(0, 0)] - 1.0).abs() < 1e-15);
        let w = act(&SymplecticMatrix::j(1), &pt1(0.0, 2.0)).unwrap();
        assert!(w.x()[(0, 0)].abs() < 1e-15 && (w.y()[(0, 0)] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn non_symplectic_rejected() {
        let g = RMat::from_row_slice(2, 2, &[2.0, 0.0, 0.0, 1.0]);
        assert!(matches!(SymplecticMatrix::new(g), Err(SiegelError::Validation(_))));
    }

    #[test]
    fn pair_invariants_n1() {
        let (z, w) = (pt1(0.0, 1.0), pt1(0.0, 2.0));
        let rho = cross_ratio_spectrum(&z, &w).unwrap().rho[0];
        assert!((rho - 1.0 / 9.0).abs() < 1e-15);
        let r = radial_coordinates(&z, &w).unwrap().r[0];
        assert!((r - 0.5 * 2f64.ln()).abs() < 1e-15);
        let dp = distance(&z, &w, DistanceConvention::Paper).unwrap();
        assert!((dp - std::f64::consts::SQRT_2 * 2f64.ln()).abs() < 1e-14);
        let dm = distance(&z, &w, DistanceConvention::Metric).unwrap();
        assert!((dm - 2f64.ln()).abs() < 1e-14);
        assert!((cosh_product(&z, &w).unwrap() - 8.0 / 9.0).abs() < 1e-15);
    }

    #[test]
    fn cayley_round_trip_n1() {
        let z = pt1(0.0, 2.0);
        let zeta = cayley(&z).unwrap();
        assert!((zeta[(0, 0)] - Complex64::new(1.0 / 3.0, 0.0)).norm() < 1e-15);
        let back = inverse_cayley(&zeta).unwrap();
        assert!((back.z() - z.z()).norm() < 1e-14);
        let outside = CMat::from_element(1, 1, Complex64::new(1.0, 0.0));
        assert!(matches!(inverse_cayley(&outside), Err(SiegelError::Domain(_))));
    }

    #[test]
    fn laplacian_of_power_function() {
        let s = 2.5;
        let f = |p: &SiegelPoint| Complex64::new(p.y()[(0, 0)].powf(s), 0.0);
        let v = apply_maass_laplacian(f, &pt1(0.3, 1.0), 0, 1e-3).unwrap();
        assert!((v.re - s * (s - 1.0)).abs() < 1e-6, "{v}");
    }
}
