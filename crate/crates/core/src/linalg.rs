//! Dense Hermitian eigensolver on top of LAPACK.
//!
//! One Householder tridiagonalization serves both the full eigenvalue list
//! (`dsterf`) and a contiguous index window of eigenvectors (`dstemr`
//! followed by the back-transformation `dormtr`/`zunmtr`).

use lapack::c64;

use crate::error::{Error, Result};

/// Column-major Hermitian matrix; only the lower triangle is referenced.
#[derive(Clone, Debug, PartialEq)]
pub enum HermitianMatrix {
    Real { n: usize, a: Vec<f64> },
    Complex { n: usize, a: Vec<c64> },
}

impl HermitianMatrix {
    pub fn n(&self) -> usize {
        match self {
            Self::Real { n, .. } | Self::Complex { n, .. } => *n,
        }
    }

    pub fn is_real(&self) -> bool {
        matches!(self, Self::Real { .. })
    }

    /// Element `(row, col)`.
    pub fn get(&self, row: usize, col: usize) -> c64 {
        match self {
            Self::Real { n, a } => c64::new(a[col * n + row], 0.0),
            Self::Complex { n, a } => a[col * n + row],
        }
    }

    pub fn trace(&self) -> f64 {
        (0..self.n()).map(|i| self.get(i, i).re).sum()
    }

    /// Largest `|A_ij − conj(A_ji)|`.
    pub fn hermiticity_defect(&self) -> f64 {
        let n = self.n();
        let mut worst = 0.0f64;
        for c in 0..n {
            for r in c..n {
                worst = worst.max((self.get(r, c) - self.get(c, r).conj()).norm());
            }
        }
        worst
    }
}

/// Eigenvectors as columns, real or complex to match the matrix.
#[derive(Clone, Debug, PartialEq)]
pub enum Eigenvectors {
    Real(Vec<f64>),
    Complex(Vec<c64>),
}

/// All eigenvalues plus eigenvectors for the ascending index window
/// `first..first + energies.len()`.
#[derive(Clone, Debug, PartialEq)]
pub struct PartialEigen {
    pub all_eigenvalues: Vec<f64>,
    pub first: usize,
    pub energies: Vec<f64>,
    pub vectors: Eigenvectors,
}

impl PartialEigen {
    /// Column `k` of the returned window as complex amplitudes.
    pub fn vector(&self, k: usize) -> Vec<c64> {
        let n = self.all_eigenvalues.len();
        match &self.vectors {
            Eigenvectors::Real(z) => z[k * n..(k + 1) * n].iter().map(|&v| c64::new(v, 0.0)).collect(),
            Eigenvectors::Complex(z) => z[k * n..(k + 1) * n].to_vec(),
        }
    }
}

fn check(routine: &'static str, info: i32) -> Result<()> {
    if info == 0 {
        Ok(())
    } else {
        Err(Error::Lapack { routine, info })
    }
}

fn as_i32(n: usize) -> Result<i32> {
    i32::try_from(n).map_err(|_| Error::Capability(format!("matrix dimension {n} exceeds LAPACK's index range")))
}

/// Tridiagonal form plus what is needed to undo the reduction.
enum Reduced {
    Real { a: Vec<f64>, tau: Vec<f64> },
    Complex { a: Vec<c64>, tau: Vec<c64> },
}

fn tridiagonalize(m: HermitianMatrix) -> Result<(Reduced, Vec<f64>, Vec<f64>)> {
    let n = m.n();
    let ni = as_i32(n)?;
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n.max(1)];
    let mut info = 0;
    match m {
        HermitianMatrix::Real { mut a, .. } => {
            let mut tau = vec![0.0; n.max(1)];
            let mut query = [0.0];
            unsafe { lapack::dsytrd(b'L', ni, &mut a, ni, &mut d, &mut e, &mut tau, &mut query, -1, &mut info) };
            check("dsytrd", info)?;
            let lwork = query[0] as usize;
            let mut work = vec![0.0; lwork.max(1)];
            unsafe {
                lapack::dsytrd(b'L', ni, &mut a, ni, &mut d, &mut e, &mut tau, &mut work, lwork as i32, &mut info)
            };
            check("dsytrd", info)?;
            Ok((Reduced::Real { a, tau }, d, e))
        }
        HermitianMatrix::Complex { mut a, .. } => {
            let mut tau = vec![c64::new(0.0, 0.0); n.max(1)];
            let mut query = [c64::new(0.0, 0.0)];
            unsafe { lapack::zhetrd(b'L', ni, &mut a, ni, &mut d, &mut e, &mut tau, &mut query, -1, &mut info) };
            check("zhetrd", info)?;
            let lwork = query[0].re as usize;
            let mut work = vec![c64::new(0.0, 0.0); lwork.max(1)];
            unsafe {
                lapack::zhetrd(b'L', ni, &mut a, ni, &mut d, &mut e, &mut tau, &mut work, lwork as i32, &mut info)
            };
            check("zhetrd", info)?;
            Ok((Reduced::Complex { a, tau }, d, e))
        }
    }
}

fn tridiagonal_eigenvalues(d: &[f64], e: &[f64]) -> Result<Vec<f64>> {
    let n = d.len();
    let mut w = d.to_vec();
    let mut e = e[..n.saturating_sub(1)].to_vec();
    e.push(0.0);
    let mut info = 0;
    unsafe { lapack::dsterf(as_i32(n)?, &mut w, &mut e, &mut info) };
    check("dsterf", info)?;
    Ok(w)
}

/// All eigenvalues in ascending order.
pub fn eigenvalues(m: HermitianMatrix) -> Result<Vec<f64>> {
    if m.n() == 0 {
        return Ok(Vec::new());
    }
    let (_, d, e) = tridiagonalize(m)?;
    tridiagonal_eigenvalues(&d, &e)
}

/// All eigenvalues, then eigenvectors for the window `[first, first + count)`
/// chosen by `select` from the ascending eigenvalue list.
pub fn eigh_window(m: HermitianMatrix, select: impl FnOnce(&[f64]) -> (usize, usize)) -> Result<PartialEigen> {
    let n = m.n();
    if n == 0 {
        return Err(Error::arg("empty matrix"));
    }
    let ni = as_i32(n)?;
    let (reduced, d, e) = tridiagonalize(m)?;
    let all = tridiagonal_eigenvalues(&d, &e)?;
    let (first, count) = select(&all);
    if count == 0 || first + count > n {
        return Err(Error::arg(format!("eigenvector window {first}+{count} outside 0..{n}")));
    }

    let mut dd = d.clone();
    let mut ee = e.clone();
    let mut m_found = 0;
    let mut w = vec![0.0; n];
    let mut z = vec![0.0; n * count];
    let mut isuppz = vec![0; 2 * count];
    let mut tryrac = 1;
    let nzc = [count as i32];
    let (il, iu) = ((first + 1) as i32, (first + count) as i32);
    let mut info = 0;
    let mut wq = [0.0];
    let mut iwq = [0];
    unsafe {
        lapack::dstemr(
            b'V',
            b'I',
            ni,
            &mut dd,
            &mut ee,
            0.0,
            0.0,
            il,
            iu,
            &mut m_found,
            &mut w,
            &mut z,
            ni,
            &nzc,
            &mut isuppz,
            &mut tryrac,
            &mut wq,
            -1,
            &mut iwq,
            -1,
            &mut info,
        )
    };
    check("dstemr", info)?;
    let mut work = vec![0.0; (wq[0] as usize).max(1)];
    let mut iwork = vec![0; (iwq[0] as usize).max(1)];
    let (lw, liw) = (work.len() as i32, iwork.len() as i32);
    unsafe {
        lapack::dstemr(
            b'V',
            b'I',
            ni,
            &mut dd,
            &mut ee,
            0.0,
            0.0,
            il,
            iu,
            &mut m_found,
            &mut w,
            &mut z,
            ni,
            &nzc,
            &mut isuppz,
            &mut tryrac,
            &mut work,
            lw,
            &mut iwork,
            liw,
            &mut info,
        )
    };
    check("dstemr", info)?;
    if m_found as usize != count {
        return Err(Error::Invariant(format!("dstemr returned {m_found} of {count} eigenpairs")));
    }
    w.truncate(count);
    let ci = count as i32;

    let vectors = match reduced {
        Reduced::Real { a, tau } => {
            let mut q = [0.0];
            unsafe { lapack::dormtr(b'L', b'L', b'N', ni, ci, &a, ni, &tau, &mut z, ni, &mut q, -1, &mut info) };
            check("dormtr", info)?;
            let mut work = vec![0.0; (q[0] as usize).max(1)];
            let lw = work.len() as i32;
            unsafe { lapack::dormtr(b'L', b'L', b'N', ni, ci, &a, ni, &tau, &mut z, ni, &mut work, lw, &mut info) };
            check("dormtr", info)?;
            Eigenvectors::Real(z)
        }
        Reduced::Complex { a, tau } => {
            let mut zc: Vec<c64> = z.iter().map(|&v| c64::new(v, 0.0)).collect();
            let mut q = [c64::new(0.0, 0.0)];
            unsafe { lapack::zunmtr(b'L', b'L', b'N', ni, ci, &a, ni, &tau, &mut zc, ni, &mut q, -1, &mut info) };
            check("zunmtr", info)?;
            let mut work = vec![c64::new(0.0, 0.0); (q[0].re as usize).max(1)];
            let lw = work.len() as i32;
            unsafe { lapack::zunmtr(b'L', b'L', b'N', ni, ci, &a, ni, &tau, &mut zc, ni, &mut work, lw, &mut info) };
            check("zunmtr", info)?;
            Eigenvectors::Complex(zc)
        }
    };
    Ok(PartialEigen { all_eigenvalues: all, first, energies: w, vectors })
}
