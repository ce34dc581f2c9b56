use super::goal::Direction;

/// Index of the candidate with the smallest (increasing) or largest
/// (decreasing) key. Ties go to the smallest index; `None` when empty.
pub fn select<K: Ord>(keys: impl IntoIterator<Item = K>, dir: Direction) -> Option<usize> {
    let mut best: Option<(usize, K)> = None;
    for (i, k) in keys.into_iter().enumerate() {
        let better = match &best {
            None => true,
            Some((_, b)) => match dir {
                Direction::Increasing => k < *b,
                Direction::Decreasing => k > *b,
            },
        };
        if better {
            best = Some((i, k));
        }
    }
    best.map(|b| b.0)
}
