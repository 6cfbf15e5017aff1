//! Deterministic fan-out of a depth-first search over its first-level choices.
//!
//! Branches are merged in choice order, so the merged result is exactly what a
//! sequential search would return, including whether the node limit was hit.

use std::thread;

use super::Search;

/// Result of searching below one first-level choice.
pub(crate) struct Branch<W> {
    pub found: Option<W>,
    pub nodes: u64,
    /// The branch stopped because it used more than its node allowance.
    pub cut: bool,
}

/// Node counter for one branch.
pub(crate) struct Counter {
    pub nodes: u64,
    limit: Option<u64>,
}

impl Counter {
    pub fn new(limit: Option<u64>) -> Self {
        Self { nodes: 0, limit }
    }

    /// Counts a node; false once the allowance is exceeded.
    pub fn tick(&mut self) -> bool {
        self.nodes += 1;
        self.limit.is_none_or(|l| self.nodes <= l)
    }
}

pub(crate) fn fan_out<C, W, E, I, F>(
    choices: I,
    threads: usize,
    node_limit: Option<u64>,
    branch: F,
) -> Result<Search<W>, E>
where
    I: Iterator<Item = C>,
    C: Send,
    W: Send,
    E: Send,
    F: Fn(C, Option<u64>) -> Result<Branch<W>, E> + Sync,
{
    let mut used = 0u64;
    let mut choices = choices.peekable();
    let batch = threads.max(1);
    while choices.peek().is_some() {
        let chunk: Vec<C> = choices.by_ref().take(batch).collect();
        let results: Vec<Result<Branch<W>, E>> = if batch == 1 {
            // Sequential: hand the branch only what is left of the budget.
            let remaining = node_limit.map(|l| l.saturating_sub(used));
            chunk.into_iter().map(|c| branch(c, remaining)).collect()
        } else {
            let branch = &branch;
            thread::scope(|s| {
                let handles: Vec<_> = chunk
                    .into_iter()
                    .map(|c| s.spawn(move || branch(c, node_limit)))
                    .collect();
                handles
                    .into_iter()
                    .map(|h| h.join().expect("search thread panicked"))
                    .collect()
            })
        };
        for r in results {
            let b = r?;
            used += b.nodes;
            if b.cut || node_limit.is_some_and(|l| used > l) {
                // A sequential run stops at exactly limit + 1 nodes.
                let nodes = node_limit.map_or(used, |l| used.min(l + 1));
                return Ok(Search::BudgetExceeded { nodes });
            }
            if let Some(witness) = b.found {
                return Ok(Search::Found { witness, nodes: used });
            }
        }
    }
    Ok(Search::Exhausted { nodes: used })
}
