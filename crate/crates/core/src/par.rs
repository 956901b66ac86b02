//! Data-parallel helpers with a sequential fallback.
//!
//! Every helper returns results in input order, so callers that pick "the
//! first hit" get the same answer whichever mode runs.

/// Execution mode for the batch helpers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Parallelism {
    /// Plain iterator loop.
    Sequential,
    /// Rayon work stealing when the `parallel` feature is on; otherwise the
    /// sequential loop.
    #[default]
    Parallel,
}

impl Parallelism {
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Parallelism::Parallel
    }
}

/// Maps `f` over `items`, preserving order.
pub fn map<T, R, F>(mode: Parallelism, items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if mode.is_parallel() && items.len() > 1 {
        use rayon::prelude::*;
        return items.par_iter().map(f).collect();
    }
    let _ = mode;
    items.iter().map(f).collect()
}

/// Index of the first item (in input order) for which `f` returns `Some`,
/// together with the value.
pub fn find_first<T, R, F>(mode: Parallelism, items: &[T], f: F) -> Option<(usize, R)>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> Option<R> + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if mode.is_parallel() && items.len() > 1 {
        use rayon::prelude::*;
        return items
            .par_iter()
            .enumerate()
            .find_map_first(|(i, x)| f(x).map(|r| (i, r)));
    }
    let _ = mode;
    items.iter().enumerate().find_map(|(i, x)| f(x).map(|r| (i, r)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_hit_is_order_stable() {
        let v: Vec<u32> = (0..1000).collect();
        for mode in [Parallelism::Sequential, Parallelism::Parallel] {
            let hit = find_first(mode, &v, |&x| (x % 97 == 96).then_some(x * 2));
            assert_eq!(hit, Some((96, 192)));
            assert_eq!(map(mode, &v, |x| x + 1)[999], 1000);
        }
    }
}
