use std::sync::Mutex;

/// Memoized stage-indexed sequence. Stage `n` is filled from stages
/// `0..n` in order and `tighten` folds each raw value with its predecessor,
/// so the stored sequence is monotone regardless of the raw evaluator.
pub(crate) struct Stream<T> {
    eval: Box<dyn Fn(u32) -> T + Send + Sync>,
    tighten: fn(T, &T) -> T,
    memo: Mutex<Vec<T>>,
}

impl<T: Clone> Stream<T> {
    pub(crate) fn new(eval: Box<dyn Fn(u32) -> T + Send + Sync>, tighten: fn(T, &T) -> T) -> Self {
        Stream {
            eval,
            tighten,
            memo: Mutex::new(Vec::new()),
        }
    }

    pub(crate) fn get(&self, stage: u32) -> T {
        let mut memo = self.memo.lock().unwrap_or_else(|e| e.into_inner());
        while memo.len() <= stage as usize {
            let k = memo.len() as u32;
            let raw = (self.eval)(k);
            let v = match memo.last() {
                Some(prev) => (self.tighten)(raw, prev),
                None => raw,
            };
            memo.push(v);
        }
        memo[stage as usize].clone()
    }
}
