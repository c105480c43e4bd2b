//! Minkowski reduction of positive-definite forms and Siegel reduction of
//! points of the upper half-space toward the standard fundamental domain.

use serde::{Deserialize, Serialize};

use crate::error::{Result, SiegelError};
use crate::linalg::{symmetrize, RMat};
use crate::symplectic::{act, SiegelPoint, SymplecticMatrix};

pub const DEFAULT_RADIUS: i64 = 5;
const REL_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReductionResult {
    #[serde(rename = "Z_reduced")]
    pub z_reduced: SiegelPoint,
    pub gamma: SymplecticMatrix,
    pub steps: usize,
    /// True when the inversion list is not known to be complete for this degree.
    pub heuristic: bool,
}

fn to_real(u: &[Vec<i64>]) -> RMat {
    let n = u.len();
    RMat::from_fn(n, n, |i, j| u[i][j] as f64)
}

fn gram(y: &RMat, u: &[Vec<i64>]) -> RMat {
    let um = to_real(u);
    symmetrize(&(um.transpose() * y * um))
}

/// LLL on the columns of `u` with respect to the form `y`.
fn lll(y: &RMat, u: &mut [Vec<i64>]) {
    let n = y.nrows();
    let delta = 0.99;
    let mut k = 1;
    let mut guard = 0;
    while k < n && guard < 10_000 {
        guard += 1;
        for j in (0..k).rev() {
            let (mu, _) = gram_schmidt(&gram(y, u));
            let q = mu[k][j].round() as i64;
            if q != 0 {
                for row in u.iter_mut() {
                    row[k] -= q * row[j];
                }
            }
        }
        let (mu, b) = gram_schmidt(&gram(y, u));
        if b[k] >= (delta - mu[k][k - 1] * mu[k][k - 1]) * b[k - 1] {
            k += 1;
        } else {
            for row in u.iter_mut() {
                row.swap(k, k - 1);
            }
            k = (k - 1).max(1);
        }
    }
}

fn gram_schmidt(g: &RMat) -> (Vec<Vec<f64>>, Vec<f64>) {
    let n = g.nrows();
    let mut mu = vec![vec![0.0; n]; n];
    let mut b = vec![0.0; n];
    for i in 0..n {
        for j in 0..i {
            let mut v = g[(i, j)];
            for l in 0..j {
                v -= mu[j][l] * mu[i][l] * b[l];
            }
            mu[i][j] = v / b[j];
        }
        b[i] = g[(i, i)] - (0..i).map(|l| mu[i][l] * mu[i][l] * b[l]).sum::<f64>();
    }
    (mu, b)
}

fn det_i64(m: &[Vec<i64>]) -> i64 {
    let k = m.len();
    match k {
        0 => 1,
        1 => m[0][0],
        _ => (0..k)
            .map(|c| {
                let minor: Vec<Vec<i64>> = m[1..]
                    .iter()
                    .map(|row| row.iter().enumerate().filter(|(j, _)| *j != c).map(|(_, v)| *v).collect())
                    .collect();
                let sign = if c % 2 == 0 { 1 } else { -1 };
                sign * m[0][c] * det_i64(&minor)
            })
            .sum(),
    }
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

fn row_subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for last in k - 1..n {
        for mut s in row_subsets(last, k - 1) {
            s.push(last);
            out.push(s);
        }
    }
    out
}

/// Columns `vs` (each of length n) extend to a basis of `Z^n` iff the gcd of
/// their maximal minors is 1.
fn extends_to_basis(vs: &[Vec<i64>]) -> bool {
    let n = vs[0].len();
    let k = vs.len();
    let mut g = 0;
    for rows in row_subsets(n, k) {
        let m: Vec<Vec<i64>> = rows.iter().map(|&r| vs.iter().map(|v| v[r]).collect()).collect();
        g = gcd(g, det_i64(&m));
        if g == 1 {
            return true;
        }
    }
    g == 1
}

fn lattice_box(n: usize, radius: i64) -> Vec<Vec<i64>> {
    let side = (2 * radius + 1) as usize;
    let total = side.pow(n as u32);
    (0..total)
        .map(|mut idx| {
            (0..n)
                .map(|_| {
                    let c = (idx % side) as i64 - radius;
                    idx /= side;
                    c
                })
                .collect::<Vec<i64>>()
        })
        .filter(|v| v.iter().any(|&c| c != 0))
        .collect()
}

fn form(y: &RMat, v: &[i64]) -> f64 {
    let n = v.len();
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            acc += v[i] as f64 * y[(i, j)] * v[j] as f64;
        }
    }
    acc
}

fn check_pd(y: &RMat) -> Result<()> {
    let n = y.nrows();
    if n == 0 || y.ncols() != n {
        return Err(SiegelError::Validation("expected a non-empty square matrix".into()));
    }
    if !crate::linalg::is_positive_definite(&symmetrize(y)) {
        return Err(SiegelError::Domain("matrix is not positive definite".into()));
    }
    Ok(())
}

/// Minkowski-reduce `y`: returns `(Y_red, U)` with `Y_red = U^t y U`.
///
/// LLL preconditioning followed by greedy successive minima over the box of
/// radius [`DEFAULT_RADIUS`], then sign normalization of the superdiagonal.
pub fn minkowski_reduce(y: &RMat) -> Result<(RMat, RMat)> {
    check_pd(y)?;
    let n = y.nrows();
    if n > 4 {
        return Err(SiegelError::Unsupported(format!("Minkowski reduction needs n <= 4, got {n}")));
    }
    let y = symmetrize(y);
    let mut u: Vec<Vec<i64>> = (0..n).map(|i| (0..n).map(|j| i64::from(i == j)).collect()).collect();
    lll(&y, &mut u);
    let y1 = gram(&y, &u);

    let mut cands: Vec<(f64, Vec<i64>)> = lattice_box(n, DEFAULT_RADIUS)
        .into_iter()
        .map(|v| (form(&y1, &v), v))
        .collect();
    cands.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then_with(|| b.1.cmp(&a.1)));

    let mut chosen: Vec<Vec<i64>> = Vec::with_capacity(n);
    for _ in 0..n {
        let pick = cands.iter().find(|(_, v)| {
            let mut trial = chosen.clone();
            trial.push(v.clone());
            extends_to_basis(&trial)
        });
        match pick {
            Some((_, v)) => chosen.push(v.clone()),
            None => return Err(SiegelError::Numerical("no admissible lattice vector in the search box".into())),
        }
    }

    // w = u * chosen (columns)
    let mut w: Vec<Vec<i64>> = vec![vec![0; n]; n];
    for i in 0..n {
        for (k, v) in chosen.iter().enumerate() {
            w[i][k] = (0..n).map(|l| u[i][l] * v[l]).sum();
        }
    }
    for k in 0..n.saturating_sub(1) {
        let g = gram(&y, &w);
        if g[(k, k + 1)] < 0.0 {
            for row in w.iter_mut() {
                row[k + 1] = -row[k + 1];
            }
        }
    }
    Ok((gram(&y, &w), to_real(&w)))
}

/// Checks ordering, superdiagonal signs, `|2 y_jk| <= y_jj`, and the
/// primitive-vector minimality over `||h||_inf <= bound`.
pub fn is_minkowski_reduced(y: &RMat, bound: i64) -> bool {
    let n = y.nrows();
    if n == 0 || y.ncols() != n || check_pd(y).is_err() {
        return false;
    }
    let tol = |v: f64| REL_TOL * v.abs().max(1e-300);
    for k in 0..n {
        if k + 1 < n {
            if y[(k, k)] > y[(k + 1, k + 1)] + tol(y[(k + 1, k + 1)]) {
                return false;
            }
            if y[(k, k + 1)] < -tol(y[(k, k)]) {
                return false;
            }
        }
        for j in 0..k {
            if 2.0 * y[(j, k)].abs() > y[(j, j)] + tol(y[(j, j)]) {
                return false;
            }
        }
    }
    for h in lattice_box(n, bound) {
        let val = form(y, &h);
        for k in 0..n {
            let g = h[k..].iter().fold(0, |acc, &c| gcd(acc, c));
            if g == 1 && val < y[(k, k)] - tol(y[(k, k)]) {
                return false;
            }
        }
    }
    true
}

fn subset_inversion(n: usize, mask: usize) -> SymplecticMatrix {
    let p = RMat::from_fn(n, n, |i, j| if i == j && mask >> i & 1 == 1 { 1.0 } else { 0.0 });
    let id = RMat::identity(n, n);
    let a = &id - &p;
    SymplecticMatrix::from_blocks(&a, &(-&p), &p, &a).expect("subset inversion is symplectic")
}

/// Candidate moves: inversions on each coordinate subset, composed with
/// small symmetric integer shifts supported on that subset.
fn candidates(n: usize) -> Vec<SymplecticMatrix> {
    let mut out = Vec::new();
    for mask in 1..(1usize << n) {
        let idx: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
        let pairs: Vec<(usize, usize)> = idx
            .iter()
            .flat_map(|&i| idx.iter().filter(move |&&j| j >= i).map(move |&j| (i, j)))
            .collect();
        let inv = subset_inversion(n, mask);
        let total = 3usize.pow(pairs.len() as u32);
        for mut code in 0..total {
            let mut s = RMat::zeros(n, n);
            for &(i, j) in &pairs {
                let v = (code % 3) as f64 - 1.0;
                code /= 3;
                s[(i, j)] = v;
                s[(j, i)] = v;
            }
            let t = SymplecticMatrix::translation(&s).expect("integral shift");
            out.push(inv.compose(&t));
        }
    }
    out
}

fn integral(g: SymplecticMatrix) -> SymplecticMatrix {
    SymplecticMatrix::from_raw(g.matrix().map(f64::round))
}

/// Reduce `z` toward the Siegel fundamental domain.
///
/// Each round Minkowski-reduces `Y`, translates `X` into `[-1/2, 1/2]`, then
/// applies the candidate with the smallest `|det(CZ + D)| < 1`, if any.
pub fn siegel_reduce(z: &SiegelPoint, max_iter: usize) -> Result<ReductionResult> {
    let n = z.degree();
    if n > 3 {
        return Err(SiegelError::Unsupported(format!("Siegel reduction needs n <= 3, got {n}")));
    }
    let cands = candidates(n);
    let mut cur = z.clone();
    let mut gamma = SymplecticMatrix::identity(n);
    let mut steps = 0usize;

    for _ in 0..max_iter {
        let (_, u) = minkowski_reduce(cur.y())?;
        if u != RMat::identity(n, n) {
            let g = SymplecticMatrix::conjugation(&u)?;
            cur = act(&g, &cur)?;
            gamma = integral(g.compose(&gamma));
            steps += 1;
        }
        let shift = cur.x().map(|v| -v.round());
        if shift.iter().any(|&v| v != 0.0) {
            let g = SymplecticMatrix::translation(&shift)?;
            cur = act(&g, &cur)?;
            gamma = integral(g.compose(&gamma));
            steps += 1;
        }

        let best = cands
            .iter()
            .map(|g| (g.automorphy(&cur), g))
            .map(|(m, g)| (crate::linalg::det_c(&m).norm(), g))
            .min_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        match best {
            Some((d, g)) if d < 1.0 - 1e-12 => {
                cur = act(g, &cur)?;
                gamma = integral(g.compose(&gamma));
                steps += 1;
            }
            _ => {
                return Ok(ReductionResult {
                    z_reduced: cur,
                    gamma,
                    steps,
                    heuristic: n > 1,
                })
            }
        }
    }
    Err(SiegelError::Convergence {
        iterations: max_iter,
        partial: Box::new(ReductionResult {
            z_reduced: cur,
            gamma,
            steps,
            heuristic: n > 1,
        }),
    })
}
