//! Feasibility of bipartite transportation problems by maximum flow.
//!
//! Supplies `p_i` must be shipped to demands `q_j` along allowed arcs
//! `(i, j)` of unbounded capacity. The solver is generic over the weight
//! type so that small instances can be decided in exact rational arithmetic.

use std::collections::VecDeque;

use num_rational::BigRational;
use num_traits::{Signed, Zero};

/// Arithmetic needed by the flow solver.
pub trait Weight: Clone + PartialOrd {
    fn zero() -> Self;
    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    /// True when the value is large enough to carry flow.
    fn is_positive(&self) -> bool;
}

impl Weight for f64 {
    fn zero() -> Self {
        0.0
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn is_positive(&self) -> bool {
        *self > 1e-15
    }
}

impl Weight for BigRational {
    fn zero() -> Self {
        Zero::zero()
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn is_positive(&self) -> bool {
        Signed::is_positive(self)
    }
}

fn min<T: Weight>(a: &T, b: &T) -> T {
    if a < b {
        a.clone()
    } else {
        b.clone()
    }
}

/// Maximum flow value and the arc flows `t[i][j]`.
#[derive(Debug, Clone)]
pub struct Flow<T> {
    pub value: T,
    pub plan: Vec<Vec<T>>,
}

/// Edmonds–Karp on the network source → supplies → demands → sink.
pub fn max_flow<T: Weight>(
    supply: &[T],
    demand: &[T],
    allowed: impl Fn(usize, usize) -> bool,
) -> Flow<T> {
    let (n, m) = (supply.len(), demand.len());
    let arcs: Vec<Vec<usize>> = (0..n).map(|i| (0..m).filter(|&j| allowed(i, j)).collect()).collect();
    let mut plan = vec![vec![T::zero(); m]; n];
    let mut out_s: Vec<T> = supply.to_vec();
    let mut in_t: Vec<T> = demand.to_vec();
    let mut value = T::zero();
    let budget = 4 * (n + m + 2).pow(3) + 64;
    for _ in 0..budget {
        // BFS over residual graph: left nodes 0..n, right nodes n..n+m.
        let mut prev: Vec<Option<usize>> = vec![None; n + m];
        let mut queue = VecDeque::new();
        for i in 0..n {
            if out_s[i].is_positive() {
                prev[i] = Some(usize::MAX);
                queue.push_back(i);
            }
        }
        let mut end = None;
        while let Some(u) = queue.pop_front() {
            if u < n {
                for &j in &arcs[u] {
                    let v = n + j;
                    if prev[v].is_none() {
                        prev[v] = Some(u);
                        if in_t[j].is_positive() {
                            end = Some(v);
                            break;
                        }
                        queue.push_back(v);
                    }
                }
                if end.is_some() {
                    break;
                }
            } else {
                let j = u - n;
                for i in 0..n {
                    if prev[i].is_none() && plan[i][j].is_positive() {
                        prev[i] = Some(u);
                        queue.push_back(i);
                    }
                }
            }
        }
        let Some(end) = end else { break };
        let mut path = vec![end];
        let mut v = end;
        while let Some(u) = prev[v].filter(|&u| u != usize::MAX) {
            path.push(u);
            v = u;
        }
        path.reverse();
        let mut bottleneck = min(&out_s[path[0]], &in_t[end - n]);
        for w in path.windows(2) {
            if w[0] >= n {
                bottleneck = min(&bottleneck, &plan[w[1]][w[0] - n]);
            }
        }
        out_s[path[0]] = out_s[path[0]].sub(&bottleneck);
        in_t[end - n] = in_t[end - n].sub(&bottleneck);
        for w in path.windows(2) {
            if w[0] < n {
                let j = w[1] - n;
                plan[w[0]][j] = plan[w[0]][j].add(&bottleneck);
            } else {
                let j = w[0] - n;
                plan[w[1]][j] = plan[w[1]][j].sub(&bottleneck);
            }
        }
        value = value.add(&bottleneck);
    }
    Flow { value, plan }
}

/// Whether all supply can be shipped and all demand met, with the plan.
///
/// Tries exact rational arithmetic first when both totals agree exactly and
/// each side has at most 64 entries. If that is infeasible, or the inputs
/// are larger or unbalanced, binary64 with slack `1e-9` decides.
pub fn feasible(
    supply: &[f64],
    demand: &[f64],
    allowed: impl Fn(usize, usize) -> bool,
) -> Option<Vec<Vec<f64>>> {
    let to_q = |x: f64| BigRational::from_float(x).unwrap_or_else(Zero::zero);
    let sq: Vec<BigRational> = supply.iter().map(|&x| to_q(x)).collect();
    let dq: Vec<BigRational> = demand.iter().map(|&x| to_q(x)).collect();
    let ts = sq.iter().fold(<BigRational as num_traits::Zero>::zero(), |a, b| a + b);
    let td = dq.iter().fold(<BigRational as num_traits::Zero>::zero(), |a, b| a + b);
    if supply.len() <= 64 && demand.len() <= 64 && ts == td {
        let flow = max_flow(&sq, &dq, &allowed);
        if flow.value == ts {
            return Some(
                flow.plan
                    .iter()
                    .map(|row| row.iter().map(to_f64).collect())
                    .collect(),
            );
        }
    }
    let total_s: f64 = supply.iter().sum();
    let total_d: f64 = demand.iter().sum();
    if (total_s - total_d).abs() > 1e-9 {
        return None;
    }
    let flow = max_flow(supply, demand, &allowed);
    ((flow.value - total_d).abs() <= 1e-9).then_some(flow.plan)
}

fn to_f64(x: &BigRational) -> f64 {
    use num_traits::ToPrimitive;
    x.to_f64().unwrap_or(f64::NAN)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_plan() {
        let plan = feasible(&[0.5, 0.5], &[0.5, 0.5], |i, j| i == j).unwrap();
        assert_eq!(plan, vec![vec![0.5, 0.0], vec![0.0, 0.5]]);
        assert!(feasible(&[0.5, 0.5], &[0.5, 0.5], |i, j| i == 0 && j == 0).is_none());
    }

    #[test]
    fn augmenting_paths_reroute() {
        // Greedy 0→0 must be undone to reach a complete matching.
        let plan = feasible(&[0.5, 0.5], &[0.5, 0.5], |i, j| i == 0 || j == 0).unwrap();
        assert_eq!(plan[1][0], 0.5);
        assert_eq!(plan[0][1], 0.5);
    }

    #[test]
    fn inexact_weights_use_slack() {
        let s = [0.1, 0.2, 0.7];
        let d = [0.3, 0.7];
        assert!(feasible(&s, &d, |i, j| (i < 2) == (j == 0)).is_some());
    }
}
