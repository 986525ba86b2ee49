// BLAS and LAPACK come from the system OpenBLAS, which bundles both.
fn main() {
    println!("cargo:rustc-link-lib=dylib=openblas");
}
