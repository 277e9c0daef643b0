//! Execution shim: the enumeration kernels are written once against these
//! helpers; the `parallel` feature selects rayon, otherwise sequential
//! equivalents run. Both orderings are identical (rayon's indexed collect and
//! find_first preserve input order), so results never depend on the feature.

#[cfg(feature = "parallel")]
mod imp {
    use rayon::prelude::*;

    pub fn filter_map_range<T, F>(lo: u64, hi: u64, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(u64) -> Option<T> + Sync + Send,
    {
        (lo..hi).into_par_iter().filter_map(f).collect()
    }

    pub fn flat_map_range<T, F>(lo: u64, hi: u64, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(u64) -> Vec<T> + Sync + Send,
    {
        (lo..hi).into_par_iter().flat_map_iter(f).collect()
    }

    /// First match in index order.
    pub fn find_first_range<T, F>(lo: u64, hi: u64, f: F) -> Option<T>
    where
        T: Send,
        F: Fn(u64) -> Option<T> + Sync + Send,
    {
        (lo..hi).into_par_iter().find_map_first(f)
    }

    pub fn map_items<A, B, F>(items: Vec<A>, f: F) -> Vec<B>
    where
        A: Send,
        B: Send,
        F: Fn(A) -> B + Sync + Send,
    {
        items.into_par_iter().map(f).collect()
    }
}

#[cfg(not(feature = "parallel"))]
mod imp {
    pub fn filter_map_range<T, F>(lo: u64, hi: u64, f: F) -> Vec<T>
    where
        F: Fn(u64) -> Option<T>,
    {
        (lo..hi).filter_map(f).collect()
    }

    pub fn flat_map_range<T, F>(lo: u64, hi: u64, f: F) -> Vec<T>
    where
        F: Fn(u64) -> Vec<T>,
    {
        (lo..hi).flat_map(f).collect()
    }

    pub fn find_first_range<T, F>(lo: u64, hi: u64, f: F) -> Option<T>
    where
        F: Fn(u64) -> Option<T>,
    {
        (lo..hi).find_map(f)
    }

    pub fn map_items<A, B, F>(items: Vec<A>, f: F) -> Vec<B>
    where
        F: Fn(A) -> B,
    {
        items.into_iter().map(f).collect()
    }
}

pub(crate) use imp::{filter_map_range, find_first_range, flat_map_range, map_items};
