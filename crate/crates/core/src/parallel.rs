use crate::error::{Error, Result};

/// Either the global rayon pool or a dedicated one with a fixed worker count.
pub(crate) enum Pool {
    Global,
    Local(rayon::ThreadPool),
}

impl Pool {
    pub(crate) fn new(threads: Option<usize>) -> Result<Self> {
        match threads {
            None => Ok(Pool::Global),
            Some(n) => rayon::ThreadPoolBuilder::new()
                .num_threads(n.max(1))
                .build()
                .map(Pool::Local)
                .map_err(|e| Error::Config(format!("cannot start {n} worker threads: {e}"))),
        }
    }

    pub(crate) fn install<R, F>(&self, f: F) -> R
    where
        R: Send,
        F: FnOnce() -> R + Send,
    {
        match self {
            Pool::Global => f(),
            Pool::Local(pool) => pool.install(f),
        }
    }
}
