//! Real Jordan types of 3x3 matrices.
//!
//! Every real 3x3 matrix is similar to one of
//!
//! ```text
//! J1 = [[a,0,0],[0,b,0],[0,0,d]]    J2 = [[a,0,0],[0,b,c],[0,-c,b]]  (c > 0)
//! J3 = [[a,0,0],[0,b,1],[0,0,b]]    J4 = [[a,1,0],[0,a,1],[0,0,a]]
//! ```
//!
//! [`jordanize`] returns the type with `P` such that `P A P^-1 = J`.

use alloc::vec::Vec;

use libm::{cbrt, fabs, sqrt};

/// Real 3x3 matrix, row-major.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Matrix3(pub [[f64; 3]; 3]);

impl Matrix3 {
    pub const IDENTITY: Matrix3 = Matrix3([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]);
    pub const ZERO: Matrix3 = Matrix3([[0.0; 3]; 3]);

    pub fn from_ints(m: [[i64; 3]; 3]) -> Self {
        Matrix3(m.map(|r| r.map(|x| x as f64)))
    }

    pub fn diag(a: f64, b: f64, c: f64) -> Self {
        Matrix3([[a, 0.0, 0.0], [0.0, b, 0.0], [0.0, 0.0, c]])
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().flatten().all(|x| x.is_finite())
    }

    pub fn mul(&self, o: &Matrix3) -> Matrix3 {
        let mut r = Matrix3::ZERO;
        for i in 0..3 {
            for j in 0..3 {
                r.0[i][j] = (0..3).map(|k| self.0[i][k] * o.0[k][j]).sum();
            }
        }
        r
    }

    pub fn mul_vec(&self, v: &[f64; 3]) -> [f64; 3] {
        core::array::from_fn(|i| (0..3).map(|k| self.0[i][k] * v[k]).sum())
    }

    pub fn sub(&self, o: &Matrix3) -> Matrix3 {
        let mut r = *self;
        for i in 0..3 {
            for j in 0..3 {
                r.0[i][j] -= o.0[i][j];
            }
        }
        r
    }

    pub fn shift(&self, lambda: f64) -> Matrix3 {
        self.sub(&Matrix3::diag(lambda, lambda, lambda))
    }

    pub fn transpose(&self) -> Matrix3 {
        Matrix3(core::array::from_fn(|i| core::array::from_fn(|j| self.0[j][i])))
    }

    pub fn from_columns(c: [[f64; 3]; 3]) -> Matrix3 {
        Matrix3(c).transpose()
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().flatten().fold(0.0, |m, x| m.max(fabs(*x)))
    }

    pub fn trace(&self) -> f64 {
        self.0[0][0] + self.0[1][1] + self.0[2][2]
    }

    pub fn det(&self) -> f64 {
        let m = &self.0;
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    }

    /// Inverse by cofactors; `None` when singular.
    pub fn inverse(&self) -> Option<Matrix3> {
        let d = self.det();
        if d == 0.0 || !d.is_finite() {
            return None;
        }
        let m = &self.0;
        let cof = |i: usize, j: usize| {
            let (r0, r1) = ((i + 1) % 3, (i + 2) % 3);
            let (c0, c1) = ((j + 1) % 3, (j + 2) % 3);
            m[r0][c0] * m[r1][c1] - m[r0][c1] * m[r1][c0]
        };
        Some(Matrix3(core::array::from_fn(|i| core::array::from_fn(|j| cof(j, i) / d))))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum JordanKind {
    J1,
    J2,
    J3,
    J4,
}

impl JordanKind {
    pub fn name(self) -> &'static str {
        match self {
            JordanKind::J1 => "J1",
            JordanKind::J2 => "J2",
            JordanKind::J3 => "J3",
            JordanKind::J4 => "J4",
        }
    }

    pub fn index(self) -> u8 {
        match self {
            JordanKind::J1 => 1,
            JordanKind::J2 => 2,
            JordanKind::J3 => 3,
            JordanKind::J4 => 4,
        }
    }
}

/// Jordan type, parameters and similarity transform `P A P^-1 = J`.
///
/// Unused parameters are zero: J2 has no `d`, J3 no `c, d`, J4 only `a`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct JordanForm {
    pub kind: JordanKind,
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub p: Matrix3,
    pub pinv: Matrix3,
}

impl JordanForm {
    pub fn matrix(&self) -> Matrix3 {
        let (a, b, c, d) = (self.a, self.b, self.c, self.d);
        Matrix3(match self.kind {
            JordanKind::J1 => [[a, 0.0, 0.0], [0.0, b, 0.0], [0.0, 0.0, d]],
            JordanKind::J2 => [[a, 0.0, 0.0], [0.0, b, c], [0.0, -c, b]],
            JordanKind::J3 => [[a, 0.0, 0.0], [0.0, b, 1.0], [0.0, 0.0, b]],
            JordanKind::J4 => [[a, 1.0, 0.0], [0.0, a, 1.0], [0.0, 0.0, a]],
        })
    }

    /// `max |P A P^-1 - J|`.
    pub fn residual(&self, a: &Matrix3) -> f64 {
        self.p.mul(a).mul(&self.pinv).sub(&self.matrix()).max_abs()
    }
}

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum JordanError {
    #[error("eigenvector basis is ill-conditioned (condition number {0:e})")]
    IllConditioned(f64),
    #[error("matrix has non-finite entries")]
    NonFinite,
}

/// Coefficients `(c2, c1, c0)` of `det(lI - A) = l^3 + c2 l^2 + c1 l + c0`.
pub fn characteristic_poly(a: &Matrix3) -> (f64, f64, f64) {
    let m = &a.0;
    let minors = m[0][0] * m[1][1] - m[0][1] * m[1][0] + m[0][0] * m[2][2] - m[0][2] * m[2][0] + m[1][1] * m[2][2]
        - m[1][2] * m[2][1];
    (-a.trace(), minors, -a.det())
}

/// Discriminant of `l^3 + p l^2 + q l + r`; negative iff there is a complex pair.
pub fn discriminant(p: f64, q: f64, r: f64) -> f64 {
    18.0 * p * q * r - 4.0 * p * p * p * r + p * p * q * q - 4.0 * q * q * q - 27.0 * r * r
}

pub fn default_tol(a: &Matrix3) -> f64 {
    1e-9 * (1.0 + a.max_abs())
}

const MAX_COND: f64 = 1e12;

/// Singular values (descending) and right singular vectors (as columns of
/// the returned array, matching order), by one-sided Jacobi rotations.
pub fn svd(a: &Matrix3) -> ([f64; 3], [[f64; 3]; 3]) {
    let mut u = a.transpose().0; // u[j] is column j of A
    let mut v = Matrix3::IDENTITY.0; // v[j] is column j of V
    for _sweep in 0..60 {
        let mut rotated = false;
        for i in 0..2 {
            for j in i + 1..3 {
                let alpha: f64 = u[i].iter().map(|x| x * x).sum();
                let beta: f64 = u[j].iter().map(|x| x * x).sum();
                let gamma: f64 = (0..3).map(|k| u[i][k] * u[j][k]).sum();
                if gamma == 0.0 || fabs(gamma) <= 1e-15 * sqrt(alpha * beta) {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (fabs(zeta) + sqrt(1.0 + zeta * zeta));
                let c = 1.0 / sqrt(1.0 + t * t);
                let s = c * t;
                for k in 0..3 {
                    let (x, y) = (u[i][k], u[j][k]);
                    u[i][k] = c * x - s * y;
                    u[j][k] = s * x + c * y;
                    let (x, y) = (v[i][k], v[j][k]);
                    v[i][k] = c * x - s * y;
                    v[j][k] = s * x + c * y;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let sigma: [f64; 3] = core::array::from_fn(|j| sqrt(u[j].iter().map(|x| x * x).sum()));
    let mut order = [0usize, 1, 2];
    order.sort_by(|&x, &y| sigma[y].total_cmp(&sigma[x]));
    (order.map(|j| sigma[j]), order.map(|j| v[j]))
}

/// Orthonormal basis of `{v : |A v| <= tol}` via the SVD.
fn null_basis(a: &Matrix3, tol: f64) -> Vec<[f64; 3]> {
    let (s, v) = svd(a);
    (0..3).filter(|&i| s[i] <= tol).map(|i| v[i]).collect()
}

fn norm(v: &[f64; 3]) -> f64 {
    sqrt(v.iter().map(|x| x * x).sum())
}

/// Unit length, largest-magnitude component positive.
fn normalize(v: [f64; 3]) -> [f64; 3] {
    let n = norm(&v);
    let big = (0..3).max_by(|&i, &j| fabs(v[i]).total_cmp(&fabs(v[j]))).unwrap_or(0);
    let s = if v[big] < 0.0 { -1.0 / n } else { 1.0 / n };
    v.map(|x| x * s)
}

/// Real eigenvalue structure of the characteristic polynomial.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Spectrum {
    Distinct(f64, f64, f64),
    /// `(double, simple)`
    Double(f64, f64),
    Triple(f64),
    /// `(real, re, im)` with `im > 0`
    Complex(f64, f64, f64),
}

/// Eigenvalue structure. Repeated roots are decided on the exact rational
/// discriminant of the (exactly representable) input, then computed roots
/// closer than `tol` are merged.
pub fn spectrum(a: &Matrix3, tol: f64) -> Spectrum {
    if let Some(s) = exact_repeated(a) {
        return s;
    }
    let (p, q, r) = characteristic_poly(a);
    let disc = discriminant(p, q, r);
    let f = |x: f64| ((x + p) * x + q) * x + r;
    let df = |x: f64| (3.0 * x + 2.0 * p) * x + q;
    let polish = |mut x: f64| {
        for _ in 0..8 {
            let d = df(x);
            if d == 0.0 {
                break;
            }
            let step = f(x) / d;
            x -= step;
            if fabs(step) <= 1e-16 * (1.0 + fabs(x)) {
                break;
            }
        }
        x
    };
    // depressed cubic t^3 + pp t + qq with l = t - p/3
    let pp = q - p * p / 3.0;
    let qq = 2.0 * p * p * p / 27.0 - p * q / 3.0 + r;
    if disc < 0.0 {
        let h = qq * qq / 4.0 + pp * pp * pp / 27.0;
        let sh = sqrt(h.max(0.0));
        let t = cbrt(-qq / 2.0 + sh) + cbrt(-qq / 2.0 - sh);
        let real = polish(t - p / 3.0);
        // deflate: l^2 + (p + real) l + (q + real (p + real))
        let b1 = p + real;
        let c0 = q + real * b1;
        let re = -b1 / 2.0;
        let im = sqrt((c0 - re * re).max(0.0));
        if im > tol {
            return Spectrum::Complex(real, re, im);
        }
        return merge([real, re, re], tol);
    }
    let m = 2.0 * sqrt((-pp / 3.0).max(0.0));
    let arg = if m == 0.0 { 0.0 } else { (3.0 * qq / (pp * m)).clamp(-1.0, 1.0) };
    let theta = libm::acos(arg) / 3.0;
    let two_pi_3 = 2.0 * core::f64::consts::PI / 3.0;
    let roots = [0usize, 1, 2].map(|k| polish(m * libm::cos(theta - two_pi_3 * k as f64) - p / 3.0));
    merge(roots, tol)
}

fn merge(mut roots: [f64; 3], tol: f64) -> Spectrum {
    roots.sort_by(f64::total_cmp);
    let (x, y, z) = (roots[0], roots[1], roots[2]);
    match (y - x <= tol, z - y <= tol) {
        (true, true) => Spectrum::Triple((x + y + z) / 3.0),
        (true, false) => Spectrum::Double((x + y) / 2.0, z),
        (false, true) => Spectrum::Double((y + z) / 2.0, x),
        (false, false) => Spectrum::Distinct(x, y, z),
    }
}

/// Repeated-root structure from exact arithmetic, if the discriminant vanishes.
fn exact_repeated(a: &Matrix3) -> Option<Spectrum> {
    use num_traits::{ToPrimitive, Zero};
    let m = crate::linalg::RatMatrix3::from_f64(&a.0)?;
    let e = &m.0;
    let tr = &e[0][0] + &e[1][1] + &e[2][2];
    let minors = &e[0][0] * &e[1][1] - &e[0][1] * &e[1][0] + &e[0][0] * &e[2][2] - &e[0][2] * &e[2][0]
        + &e[1][1] * &e[2][2]
        - &e[1][2] * &e[2][1];
    let (p, q, r) = (-tr, minors, -m.det());
    let q18 = crate::expr::q;
    let disc = q18(18) * &p * &q * &r - q18(4) * &p * &p * &p * &r + &p * &p * &q * &q - q18(4) * &q * &q * &q
        - q18(27) * &r * &r;
    if !disc.is_zero() {
        return None;
    }
    let ex = &p * &p - q18(3) * &q;
    if ex.is_zero() {
        return Some(Spectrum::Triple((-p / q18(3)).to_f64()?));
    }
    let dbl = (q18(9) * &r - &p * &q) / (q18(2) * &ex);
    let simple = -p - q18(2) * &dbl;
    Some(Spectrum::Double(dbl.to_f64()?, simple.to_f64()?))
}

fn cond(q: &Matrix3) -> f64 {
    let (s, _) = svd(q);
    if s[2] == 0.0 {
        f64::INFINITY
    } else {
        s[0] / s[2]
    }
}

fn finish(kind: JordanKind, params: [f64; 4], cols: [[f64; 3]; 3]) -> Result<JordanForm, JordanError> {
    let qm = Matrix3::from_columns(cols);
    let k = cond(&qm);
    if !(k <= MAX_COND) {
        return Err(JordanError::IllConditioned(k));
    }
    let p = qm.inverse().ok_or(JordanError::IllConditioned(f64::INFINITY))?;
    let [a, b, c, d] = params;
    Ok(JordanForm {
        kind,
        a,
        b,
        c,
        d,
        p,
        pinv: qm,
    })
}

/// Eigenvector for a simple real eigenvalue.
fn eigvec(a: &Matrix3, l: f64) -> [f64; 3] {
    let (_, v) = svd(&a.shift(l));
    normalize(v[2])
}

/// Vector `q` in the null space of `outer` maximizing `|inner q|`.
fn chain_top(outer: &Matrix3, inner: &Matrix3, tol: f64) -> [f64; 3] {
    let basis = null_basis(outer, tol);
    if basis.is_empty() {
        let (_, v) = svd(inner);
        return normalize(v[0]);
    }
    // restrict inner to the basis: columns inner*b_k, pad to 3x3
    let mut cols = [[0.0; 3]; 3];
    for (k, b) in basis.iter().enumerate() {
        cols[k] = inner.mul_vec(b);
    }
    let (_, w) = svd(&Matrix3::from_columns(cols));
    let mut qv = [0.0; 3];
    for (k, b) in basis.iter().enumerate() {
        for i in 0..3 {
            qv[i] += w[0][k] * b[i];
        }
    }
    normalize(qv)
}

/// Real Jordan type of `a`. `tol` clusters eigenvalues and decides ranks.
pub fn jordanize(a: &Matrix3, tol: Option<f64>) -> Result<JordanForm, JordanError> {
    if !a.is_finite() {
        return Err(JordanError::NonFinite);
    }
    let tol = tol.unwrap_or_else(|| default_tol(a));
    match spectrum(a, tol) {
        Spectrum::Distinct(x, y, z) => finish(JordanKind::J1, [x, y, 0.0, z], [eigvec(a, x), eigvec(a, y), eigvec(a, z)]),
        Spectrum::Complex(real, re, im) => {
            let e = eigvec(a, real);
            let (vr, vi) = complex_eigvec(a, re, im);
            finish(JordanKind::J2, [real, re, im, 0.0], [e, vr, vi])
        }
        Spectrum::Double(m, s) => {
            let n = a.shift(m);
            let null = null_basis(&n, tol);
            if null.len() >= 2 {
                let mut ev = [s, m, m];
                let mut cols = [eigvec(a, s), normalize(null[0]), normalize(null[1])];
                sort_diagonal(&mut ev, &mut cols);
                return finish(JordanKind::J1, [ev[0], ev[1], 0.0, ev[2]], cols);
            }
            let q3 = chain_top(&n.mul(&n), &n, tol);
            let q2 = n.mul_vec(&q3);
            finish(JordanKind::J3, [s, m, 0.0, 0.0], [eigvec(a, s), q2, q3])
        }
        Spectrum::Triple(l) => {
            let n = a.shift(l);
            let null = null_basis(&n, tol);
            match null.len() {
                3 => finish(JordanKind::J1, [l, l, 0.0, l], Matrix3::IDENTITY.0),
                2 => {
                    let q3 = chain_top(&Matrix3::ZERO, &n, tol);
                    let q2 = n.mul_vec(&q3);
                    let u = normalize(q2);
                    // null-space direction orthogonal to q2
                    let pick = null
                        .iter()
                        .map(|b| {
                            let d: f64 = (0..3).map(|i| b[i] * u[i]).sum();
                            core::array::from_fn(|i| b[i] - d * u[i])
                        })
                        .max_by(|x: &[f64; 3], y: &[f64; 3]| norm(x).total_cmp(&norm(y)))
                        .unwrap_or([0.0; 3]);
                    finish(JordanKind::J3, [l, l, 0.0, 0.0], [normalize(pick), q2, q3])
                }
                _ => {
                    let q3 = chain_top(&Matrix3::ZERO, &n.mul(&n), tol);
                    let q2 = n.mul_vec(&q3);
                    let q1 = n.mul_vec(&q2);
                    finish(JordanKind::J4, [l, 0.0, 0.0, 0.0], [q1, q2, q3])
                }
            }
        }
    }
}

fn sort_diagonal(ev: &mut [f64; 3], cols: &mut [[f64; 3]; 3]) {
    let mut idx = [0usize, 1, 2];
    idx.sort_by(|&i, &j| ev[i].total_cmp(&ev[j]).then(i.cmp(&j)));
    let (e0, c0) = (*ev, *cols);
    for (k, &i) in idx.iter().enumerate() {
        ev[k] = e0[i];
        cols[k] = c0[i];
    }
}

/// Real and imaginary parts of an eigenvector for `re + i im`, phased so
/// that the first significant component is real and equal to one.
fn complex_eigvec(a: &Matrix3, re: f64, im: f64) -> ([f64; 3], [f64; 3]) {
    type C = (f64, f64);
    let mul = |x: C, y: C| (x.0 * y.0 - x.1 * y.1, x.0 * y.1 + x.1 * y.0);
    let sub = |x: C, y: C| (x.0 - y.0, x.1 - y.1);
    let rows: [[C; 3]; 3] = core::array::from_fn(|i| {
        core::array::from_fn(|j| {
            let d = if i == j { (re, im) } else { (0.0, 0.0) };
            sub((a.0[i][j], 0.0), d)
        })
    });
    let cross = |u: &[C; 3], w: &[C; 3]| -> [C; 3] {
        [
            sub(mul(u[1], w[2]), mul(u[2], w[1])),
            sub(mul(u[2], w[0]), mul(u[0], w[2])),
            sub(mul(u[0], w[1]), mul(u[1], w[0])),
        ]
    };
    let cnorm = |v: &[C; 3]| sqrt(v.iter().map(|z| z.0 * z.0 + z.1 * z.1).sum());
    let v = [(0, 1), (0, 2), (1, 2)]
        .iter()
        .map(|&(i, j)| cross(&rows[i], &rows[j]))
        .max_by(|x, y| cnorm(x).total_cmp(&cnorm(y)))
        .unwrap_or([(0.0, 0.0); 3]);
    let n = cnorm(&v);
    let k = (0..3)
        .find(|&i| sqrt(v[i].0 * v[i].0 + v[i].1 * v[i].1) > 1e-6 * n)
        .unwrap_or(0);
    // divide by v[k]
    let d = v[k];
    let dd = d.0 * d.0 + d.1 * d.1;
    let inv = (d.0 / dd, -d.1 / dd);
    let w: [C; 3] = core::array::from_fn(|i| mul(v[i], inv));
    (w.map(|z| z.0), w.map(|z| z.1))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: &Matrix3, b: &Matrix3, tol: f64) -> bool {
        a.sub(b).max_abs() <= tol
    }

    #[test]
    fn char_poly_examples() {
        assert_eq!(characteristic_poly(&Matrix3::diag(1.0, 2.0, 3.0)), (-6.0, 11.0, -6.0));
        assert_eq!(characteristic_poly(&Matrix3::ZERO), (0.0, 0.0, 0.0));
        let m = Matrix3::from_ints([[0, 0, 0], [0, 0, 1], [0, -1, 0]]);
        let (c2, c1, c0) = characteristic_poly(&m);
        assert_eq!((c2, c1, c0 + 0.0), (0.0, 1.0, 0.0));
    }

    #[test]
    fn canonical_inputs_are_fixed() {
        let j = jordanize(&Matrix3::diag(1.0, 2.0, 3.0), None).unwrap();
        assert_eq!(j.kind, JordanKind::J1);
        assert!((j.a - 1.0).abs() < 1e-12 && (j.b - 2.0).abs() < 1e-12 && (j.d - 3.0).abs() < 1e-12);
        assert!(close(&j.p, &Matrix3::IDENTITY, 1e-12));

        let m = Matrix3::from_ints([[2, 0, 0], [0, 3, 5], [0, -5, 3]]);
        let j = jordanize(&m, None).unwrap();
        assert_eq!(j.kind, JordanKind::J2);
        assert!((j.a - 2.0).abs() < 1e-12 && (j.b - 3.0).abs() < 1e-12 && (j.c - 5.0).abs() < 1e-12);
        assert!(close(&j.p, &Matrix3::IDENTITY, 1e-12));

        let m = Matrix3::from_ints([[4, 1, 0], [0, 4, 1], [0, 0, 4]]);
        let j = jordanize(&m, None).unwrap();
        assert_eq!(j.kind, JordanKind::J4);
        assert_eq!(j.a, 4.0);
        assert!(close(&j.p, &Matrix3::IDENTITY, 1e-12));

        let m = Matrix3::from_ints([[7, 0, 0], [0, 7, 1], [0, 0, 7]]);
        let j = jordanize(&m, None).unwrap();
        assert_eq!((j.kind, j.a, j.b), (JordanKind::J3, 7.0, 7.0));
        assert!(close(&j.p, &Matrix3::IDENTITY, 1e-12));

        let m = Matrix3::from_ints([[2, 0, 0], [0, 5, 1], [0, 0, 5]]);
        let j = jordanize(&m, None).unwrap();
        assert_eq!((j.kind, j.a, j.b), (JordanKind::J3, 2.0, 5.0));
        assert!(close(&j.p, &Matrix3::IDENTITY, 1e-12));
    }

    #[test]
    fn j2_sign_is_normalized() {
        let m = Matrix3::from_ints([[2, 0, 0], [0, 3, -5], [0, 5, 3]]);
        let j = jordanize(&m, None).unwrap();
        assert_eq!(j.kind, JordanKind::J2);
        assert!(j.c > 0.0);
        assert!(j.residual(&m) < 1e-10);
    }

    #[test]
    fn svd_null_space() {
        let m = Matrix3::from_ints([[1, 2, 3], [2, 4, 6], [1, 1, 1]]);
        let (s, v) = svd(&m);
        assert!(s[2] < 1e-12);
        let r = m.mul_vec(&v[2]);
        assert!(norm(&r) < 1e-12);
    }
}
