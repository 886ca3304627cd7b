//! Direct repair: co-locate every split pair with as few exchanges as possible
//! while never disturbing a pair that is already together.

use super::Assignment;
use crate::error::{Error, Result};

/// Returns a copy of `assignment` in which every pair of `pairs` is co-located.
pub fn repair(assignment: &Assignment, pairs: &[(usize, usize)]) -> Result<Assignment> {
    repair_moves(assignment, pairs).map(|(a, _)| a)
}

/// Repair plus the exchanges it made, in order.
///
/// Pairs are handled in ascending order. For a split pair one endpoint joins
/// the other's cluster by exchanging with a holder there, ranked: idle, then a
/// qubit with no partner in the slice, then a split endpoint whose partner sits
/// in the mover's cluster (fixing two pairs at once), then any split endpoint.
/// Ties go to the lower destination cluster, then the lower holder id. When
/// neither cluster has room, both endpoints move into the lowest third cluster
/// with two movable holders. Each step settles at least one more pair.
pub fn repair_moves(
    assignment: &Assignment,
    pairs: &[(usize, usize)],
) -> Result<(Assignment, Vec<(usize, usize)>)> {
    let mut a = assignment.clone();
    let mut partner: Vec<Option<usize>> = vec![None; a.holders()];
    let mut order: Vec<(usize, usize)> = Vec::with_capacity(pairs.len());
    for &(x, y) in pairs {
        for h in [x, y] {
            if h >= a.holders() {
                return Err(Error::MissingHolder(h));
            }
            if partner[h].is_some() {
                return Err(Error::NotMatching(h));
            }
        }
        partner[x] = Some(y);
        partner[y] = Some(x);
        order.push((x.min(y), x.max(y)));
    }
    order.sort_unstable();

    let mut moves = Vec::new();
    while let Some(&(x, y)) = order.iter().find(|&&(x, y)| !a.co_located(x, y)) {
        let rank = |a: &Assignment, h: usize, mover_cluster: usize| -> Option<u8> {
            if h == x || h == y {
                return None;
            }
            match partner[h] {
                None if a.is_idle(h) => Some(0),
                None => Some(1),
                Some(q) if a.co_located(h, q) => None,
                Some(q) if a.cluster(q) == mover_cluster => Some(2),
                Some(_) => Some(3),
            }
        };

        let mut single: Option<((u8, usize, usize), usize)> = None;
        for (mover, stay) in [(x, y), (y, x)] {
            let dest = a.cluster(stay);
            for h in a.members(dest) {
                if let Some(r) = rank(&a, h, a.cluster(mover)) {
                    let key = (r, dest, h);
                    if single.is_none_or(|(k, _)| key < k) {
                        single = Some((key, mover));
                    }
                }
            }
        }
        if let Some(((_, _, h), mover)) = single {
            a.exchange(mover, h);
            moves.push((mover, h));
            continue;
        }

        let (cx, cy) = (a.cluster(x), a.cluster(y));
        let third = (0..a.clusters())
            .filter(|&c| c != cx && c != cy)
            .find_map(|c| {
                let mut free: Vec<(u8, usize)> = a
                    .members(c)
                    .filter_map(|h| rank(&a, h, cx).map(|r| (r, h)))
                    .collect();
                free.sort_unstable();
                (free.len() >= 2).then(|| (free[0].1, free[1].1))
            });
        match third {
            Some((h1, h2)) => {
                a.exchange(x, h1);
                a.exchange(y, h2);
                moves.push((x, h1));
                moves.push((y, h2));
            }
            None => return Err(Error::Unrepairable { a: x, b: y }),
        }
    }
    Ok((a, moves))
}
