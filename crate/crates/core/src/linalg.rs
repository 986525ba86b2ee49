//! Thin safe wrappers over the LAPACK/BLAS routines this crate relies on.
//! All matrices are column-major.

use std::os::raw::{c_char, c_int};
use std::sync::Once;

use lapack_sys::__BindgenComplex as LapackComplex;
use num_complex::Complex64;

extern "C" {
    fn openblas_set_num_threads(n: c_int);
    fn zgemm_(
        transa: *const c_char,
        transb: *const c_char,
        m: *const c_int,
        n: *const c_int,
        k: *const c_int,
        alpha: *const Complex64,
        a: *const Complex64,
        lda: *const c_int,
        b: *const Complex64,
        ldb: *const c_int,
        beta: *const Complex64,
        c: *mut Complex64,
        ldc: *const c_int,
    );
    fn dgemm_(
        transa: *const c_char,
        transb: *const c_char,
        m: *const c_int,
        n: *const c_int,
        k: *const c_int,
        alpha: *const f64,
        a: *const f64,
        lda: *const c_int,
        b: *const f64,
        ldb: *const c_int,
        beta: *const f64,
        c: *mut f64,
        ldc: *const c_int,
    );
}

static SINGLE_THREADED: Once = Once::new();

/// Parallelism lives at the trial level, so BLAS itself runs on one thread.
fn init() {
    SINGLE_THREADED.call_once(|| unsafe { openblas_set_num_threads(1) });
}

fn as_lapack(p: *mut Complex64) -> *mut LapackComplex<f64> {
    p.cast()
}

fn dim(n: usize) -> c_int {
    c_int::try_from(n).expect("matrix dimension exceeds LAPACK integer range")
}

/// Eigenvalues (ascending) of the Hermitian matrix stored in `a`; when
/// `vectors` is set, `a` is overwritten with the orthonormal eigenvectors.
pub(crate) fn heevd(n: usize, a: &mut [Complex64], vectors: bool) -> Result<Vec<f64>, i32> {
    init();
    assert_eq!(a.len(), n * n);
    let ni = dim(n);
    let jobz = if vectors { b'V' } else { b'N' } as c_char;
    let uplo = b'L' as c_char;
    let mut w = vec![0.0; n];
    let mut info: c_int = 0;
    let mut wq = [Complex64::new(0.0, 0.0)];
    let mut rq = [0.0f64];
    let mut iq = [0 as c_int];
    let query: c_int = -1;
    unsafe {
        lapack_sys::zheevd_(
            &jobz,
            &uplo,
            &ni,
            as_lapack(a.as_mut_ptr()),
            &ni.max(1),
            w.as_mut_ptr(),
            as_lapack(wq.as_mut_ptr()),
            &query,
            rq.as_mut_ptr(),
            &query,
            iq.as_mut_ptr(),
            &query,
            &mut info,
        );
    }
    if info != 0 {
        return Err(info);
    }
    let lwork = (wq[0].re as c_int).max(1);
    let lrwork = (rq[0] as c_int).max(1);
    let liwork = iq[0].max(1);
    let mut work = vec![Complex64::new(0.0, 0.0); lwork as usize];
    let mut rwork = vec![0.0; lrwork as usize];
    let mut iwork = vec![0 as c_int; liwork as usize];
    unsafe {
        lapack_sys::zheevd_(
            &jobz,
            &uplo,
            &ni,
            as_lapack(a.as_mut_ptr()),
            &ni.max(1),
            w.as_mut_ptr(),
            as_lapack(work.as_mut_ptr()),
            &lwork,
            rwork.as_mut_ptr(),
            &lrwork,
            iwork.as_mut_ptr(),
            &liwork,
            &mut info,
        );
    }
    if info != 0 {
        return Err(info);
    }
    Ok(w)
}

/// Reduces a Hermitian matrix to real symmetric tridiagonal form using the
/// lower triangle. The unitary similarity fixes the first basis vector, so
/// the trailing block of the result is similar to the leading minor.
pub(crate) fn hetrd_lower(n: usize, a: &mut [Complex64]) -> Result<(Vec<f64>, Vec<f64>), i32> {
    init();
    assert_eq!(a.len(), n * n);
    let ni = dim(n);
    let uplo = b'L' as c_char;
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n.saturating_sub(1).max(1)];
    let mut tau = vec![Complex64::new(0.0, 0.0); n.saturating_sub(1).max(1)];
    let mut info: c_int = 0;
    let mut wq = [Complex64::new(0.0, 0.0)];
    let query: c_int = -1;
    unsafe {
        lapack_sys::zhetrd_(
            &uplo,
            &ni,
            as_lapack(a.as_mut_ptr()),
            &ni.max(1),
            d.as_mut_ptr(),
            e.as_mut_ptr(),
            as_lapack(tau.as_mut_ptr()),
            as_lapack(wq.as_mut_ptr()),
            &query,
            &mut info,
        );
    }
    if info != 0 {
        return Err(info);
    }
    let lwork = (wq[0].re as c_int).max(1);
    let mut work = vec![Complex64::new(0.0, 0.0); lwork as usize];
    unsafe {
        lapack_sys::zhetrd_(
            &uplo,
            &ni,
            as_lapack(a.as_mut_ptr()),
            &ni.max(1),
            d.as_mut_ptr(),
            e.as_mut_ptr(),
            as_lapack(tau.as_mut_ptr()),
            as_lapack(work.as_mut_ptr()),
            &lwork,
            &mut info,
        );
    }
    if info != 0 {
        return Err(info);
    }
    e.truncate(n.saturating_sub(1));
    Ok((d, e))
}

/// Eigenvalues of a real symmetric tridiagonal matrix, ascending.
pub(crate) fn sterf(mut d: Vec<f64>, mut e: Vec<f64>) -> Result<Vec<f64>, i32> {
    init();
    let ni = dim(d.len());
    if e.is_empty() {
        e.push(0.0);
    }
    let mut info: c_int = 0;
    unsafe { lapack_sys::dsterf_(&ni, d.as_mut_ptr(), e.as_mut_ptr(), &mut info) };
    if info != 0 {
        return Err(info);
    }
    Ok(d)
}

/// Solves `A X = B` in place by LU with partial pivoting; `b` holds `nrhs`
/// columns of length `n` on entry and the solution on exit.
pub(crate) fn gesv(n: usize, a: &mut [Complex64], b: &mut [Complex64]) -> Result<(), i32> {
    init();
    assert_eq!(a.len(), n * n);
    assert_eq!(b.len() % n.max(1), 0);
    let ni = dim(n);
    let nrhs = dim(b.len() / n.max(1));
    let mut ipiv = vec![0 as c_int; n];
    let mut info: c_int = 0;
    unsafe {
        lapack_sys::zgesv_(
            &ni,
            &nrhs,
            as_lapack(a.as_mut_ptr()),
            &ni.max(1),
            ipiv.as_mut_ptr(),
            as_lapack(b.as_mut_ptr()),
            &ni.max(1),
            &mut info,
        );
    }
    if info != 0 {
        return Err(info);
    }
    Ok(())
}

/// `C = A B` for complex column-major `A` (m x k) and `B` (k x n).
pub(crate) fn zgemm(m: usize, n: usize, k: usize, a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    init();
    assert_eq!(a.len(), m * k);
    assert_eq!(b.len(), k * n);
    let mut c = vec![Complex64::new(0.0, 0.0); m * n];
    if m == 0 || n == 0 || k == 0 {
        return c;
    }
    let (mi, ni, ki) = (dim(m), dim(n), dim(k));
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    let no = b'N' as c_char;
    unsafe {
        zgemm_(
            &no,
            &no,
            &mi,
            &ni,
            &ki,
            &one,
            a.as_ptr(),
            &mi,
            b.as_ptr(),
            &ki,
            &zero,
            c.as_mut_ptr(),
            &mi,
        );
    }
    c
}

/// `C = A B` for real column-major `A` (m x k) and `B` (k x n).
pub(crate) fn dgemm(m: usize, n: usize, k: usize, a: &[f64], b: &[f64]) -> Vec<f64> {
    init();
    assert_eq!(a.len(), m * k);
    assert_eq!(b.len(), k * n);
    let mut c = vec![0.0; m * n];
    if m == 0 || n == 0 || k == 0 {
        return c;
    }
    let (mi, ni, ki) = (dim(m), dim(n), dim(k));
    let no = b'N' as c_char;
    unsafe {
        dgemm_(
            &no,
            &no,
            &mi,
            &ni,
            &ki,
            &1.0,
            a.as_ptr(),
            &mi,
            b.as_ptr(),
            &ki,
            &0.0,
            c.as_mut_ptr(),
            &mi,
        );
    }
    c
}
