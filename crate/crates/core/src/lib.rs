pub mod arith;
pub mod birational;
pub mod cyclo;
pub mod elliptic_genus;
pub mod error;
pub mod fan_io;
pub mod jacobi_forms;
pub mod lattice_alg;
pub mod multifan;
pub mod poly;
pub mod qseries;
pub mod ratfun;
pub mod sr_ring;
pub mod zeta;

/// Worker pool for the parallel sums, sized by `MFEL_THREADS` when set.
pub fn pool() -> &'static rayon::ThreadPool {
    static POOL: std::sync::OnceLock<rayon::ThreadPool> = std::sync::OnceLock::new();
    POOL.get_or_init(|| {
        let n = std::env::var("MFEL_THREADS").ok().and_then(|s| s.parse().ok()).unwrap_or(0);
        rayon::ThreadPoolBuilder::new().num_threads(n).build().expect("thread pool")
    })
}
