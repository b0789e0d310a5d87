//! Integral feasible flows with lower and upper arc bounds.
//!
//! Lower bounds are removed by the usual excess/demand transformation and the
//! resulting maximum-flow problem is solved with breadth-first augmenting
//! paths. The capacity type is any primitive integer.

use std::collections::VecDeque;

use num_traits::PrimInt;

use crate::error::{NclError, Result};

/// Upper bound of an arc.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Capacity<C> {
    Finite(C),
    Unbounded,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Arc<C> {
    pub from: usize,
    pub to: usize,
    pub lower: C,
    pub upper: Capacity<C>,
}

/// Directed network on nodes `0..node_count` with bounded arcs.
#[derive(Clone, Debug)]
pub struct FlowNetwork<C> {
    node_count: usize,
    arcs: Vec<Arc<C>>,
}

struct Residual<C> {
    // (to, remaining capacity, index of the reverse entry in adjacency[to])
    adjacency: Vec<Vec<(usize, C, usize)>>,
}

impl<C: PrimInt> Residual<C> {
    fn new(n: usize) -> Self {
        Residual {
            adjacency: vec![Vec::new(); n],
        }
    }

    fn add(&mut self, from: usize, to: usize, cap: C) -> (usize, usize) {
        let fi = self.adjacency[from].len();
        let ti = self.adjacency[to].len() + usize::from(from == to);
        self.adjacency[from].push((to, cap, ti));
        self.adjacency[to].push((from, C::zero(), fi));
        (from, fi)
    }

    fn max_flow(&mut self, s: usize, t: usize) -> Result<C> {
        let mut total = C::zero();
        loop {
            let mut prev: Vec<Option<(usize, usize)>> = vec![None; self.adjacency.len()];
            let mut visited = vec![false; self.adjacency.len()];
            visited[s] = true;
            let mut queue = VecDeque::from([s]);
            while let Some(x) = queue.pop_front() {
                if x == t {
                    break;
                }
                for (k, &(y, cap, _)) in self.adjacency[x].iter().enumerate() {
                    if cap > C::zero() && !visited[y] {
                        visited[y] = true;
                        prev[y] = Some((x, k));
                        queue.push_back(y);
                    }
                }
            }
            if !visited[t] {
                return Ok(total);
            }
            let mut bottleneck = C::max_value();
            let mut y = t;
            while let Some((x, k)) = prev[y] {
                bottleneck = bottleneck.min(self.adjacency[x][k].1);
                y = x;
            }
            let mut y = t;
            while let Some((x, k)) = prev[y] {
                let (to, cap, rev) = self.adjacency[x][k];
                self.adjacency[x][k].1 = cap - bottleneck;
                self.adjacency[to][rev].1 = self.adjacency[to][rev].1 + bottleneck;
                y = x;
            }
            total = total
                .checked_add(&bottleneck)
                .ok_or(NclError::Overflow("summing flow"))?;
        }
    }
}

impl<C: PrimInt> FlowNetwork<C> {
    pub fn new(node_count: usize) -> Self {
        FlowNetwork {
            node_count,
            arcs: Vec::new(),
        }
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn arcs(&self) -> &[Arc<C>] {
        &self.arcs
    }

    /// Adds an arc and returns its index.
    pub fn add_arc(&mut self, from: usize, to: usize, lower: C, upper: Capacity<C>) -> Result<usize> {
        if from >= self.node_count || to >= self.node_count {
            return Err(NclError::MalformedNetwork(format!(
                "arc {from}->{to} leaves the node range"
            )));
        }
        if lower < C::zero() {
            return Err(NclError::MalformedNetwork(format!(
                "arc {from}->{to} has a negative lower bound"
            )));
        }
        if let Capacity::Finite(u) = upper {
            if u < lower {
                return Err(NclError::MalformedNetwork(format!(
                    "arc {from}->{to} has upper bound below its lower bound"
                )));
            }
        }
        self.arcs.push(Arc { from, to, lower, upper });
        Ok(self.arcs.len() - 1)
    }

    /// Finds an integral `source`→`sink` flow respecting every bound, with
    /// conservation at all other nodes. Returns the flow on each arc, or
    /// `None` when no such flow exists. Only flows whose value into `sink`
    /// is non-negative are considered.
    ///
    /// Unbounded arcs are capped at the sum of all lower bounds. A feasible
    /// flow of minimum total value never exceeds that on any arc, so the cap
    /// loses no solutions.
    pub fn feasible_flow(&self, source: usize, sink: usize) -> Result<Option<Vec<C>>> {
        if source >= self.node_count || sink >= self.node_count || source == sink {
            return Err(NclError::MalformedNetwork(
                "source and sink must be distinct nodes".into(),
            ));
        }
        let mut big = C::zero();
        for a in &self.arcs {
            big = big
                .checked_add(&a.lower)
                .ok_or(NclError::Overflow("summing lower bounds"))?;
        }
        let super_source = self.node_count;
        let super_sink = self.node_count + 1;
        let mut residual = Residual::new(self.node_count + 2);
        let mut lower_in = vec![C::zero(); self.node_count];
        let mut lower_out = vec![C::zero(); self.node_count];
        let mut handles = Vec::with_capacity(self.arcs.len());
        for a in &self.arcs {
            let upper = match a.upper {
                Capacity::Finite(u) => u,
                Capacity::Unbounded => big.max(a.lower),
            };
            handles.push(residual.add(a.from, a.to, upper - a.lower));
            lower_in[a.to] = lower_in[a.to]
                .checked_add(&a.lower)
                .ok_or(NclError::Overflow("moving lower bounds"))?;
            lower_out[a.from] = lower_out[a.from]
                .checked_add(&a.lower)
                .ok_or(NclError::Overflow("moving lower bounds"))?;
        }
        residual.add(sink, source, big);
        let mut demand = C::zero();
        for node in 0..self.node_count {
            let (inflow, outflow) = (lower_in[node], lower_out[node]);
            if inflow > outflow {
                residual.add(super_source, node, inflow - outflow);
                demand = demand
                    .checked_add(&(inflow - outflow))
                    .ok_or(NclError::Overflow("summing demand"))?;
            } else if outflow > inflow {
                residual.add(node, super_sink, outflow - inflow);
            }
        }
        if residual.max_flow(super_source, super_sink)? != demand {
            return Ok(None);
        }
        let flows = self
            .arcs
            .iter()
            .zip(&handles)
            .map(|(a, &(from, k))| {
                let remaining = residual.adjacency[from][k].1;
                let upper = match a.upper {
                    Capacity::Finite(u) => u,
                    Capacity::Unbounded => big.max(a.lower),
                };
                a.lower + (upper - a.lower - remaining)
            })
            .collect();
        Ok(Some(flows))
    }

    /// Maximum `source`→`sink` flow value, ignoring lower bounds.
    pub fn max_flow_value(&self, source: usize, sink: usize) -> Result<C> {
        let mut big = C::zero();
        for a in &self.arcs {
            if let Capacity::Finite(u) = a.upper {
                big = big.checked_add(&u).ok_or(NclError::Overflow("summing capacities"))?;
            }
        }
        let mut residual = Residual::new(self.node_count);
        for a in &self.arcs {
            let cap = match a.upper {
                Capacity::Finite(u) => u,
                Capacity::Unbounded => big,
            };
            residual.add(a.from, a.to, cap);
        }
        residual.max_flow(source, sink)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check_flow(net: &FlowNetwork<i64>, s: usize, t: usize, flows: &[i64]) {
        let mut balance = vec![0i64; net.node_count()];
        for (a, &f) in net.arcs().iter().zip(flows) {
            assert!(f >= a.lower);
            if let Capacity::Finite(u) = a.upper {
                assert!(f <= u);
            }
            balance[a.from] -= f;
            balance[a.to] += f;
        }
        for (v, &b) in balance.iter().enumerate() {
            if v != s && v != t {
                assert_eq!(b, 0, "conservation at node {v}");
            }
        }
    }

    #[test]
    fn lower_bound_forces_flow_through_detour() {
        // s=0, t=3; the arc 1->2 demands at least two units.
        let mut net = FlowNetwork::<i64>::new(4);
        net.add_arc(0, 1, 0, Capacity::Finite(3)).unwrap();
        net.add_arc(1, 2, 2, Capacity::Finite(2)).unwrap();
        net.add_arc(2, 3, 0, Capacity::Unbounded).unwrap();
        net.add_arc(1, 3, 0, Capacity::Finite(1)).unwrap();
        let flows = net.feasible_flow(0, 3).unwrap().unwrap();
        check_flow(&net, 0, 3, &flows);
        assert_eq!(flows[1], 2);
    }

    #[test]
    fn conflicting_bounds_are_infeasible() {
        let mut net = FlowNetwork::<i32>::new(3);
        net.add_arc(0, 1, 1, Capacity::Finite(1)).unwrap();
        net.add_arc(1, 2, 2, Capacity::Unbounded).unwrap();
        assert_eq!(net.feasible_flow(0, 2).unwrap(), None);
    }

    #[test]
    fn invalid_bounds_are_rejected() {
        let mut net = FlowNetwork::<u8>::new(2);
        assert!(net.add_arc(0, 1, 3, Capacity::Finite(2)).is_err());
        assert!(net.add_arc(0, 2, 0, Capacity::Finite(2)).is_err());
    }

    #[test]
    fn max_flow_on_diamond() {
        let mut net = FlowNetwork::<u32>::new(4);
        net.add_arc(0, 1, 0, Capacity::Finite(3)).unwrap();
        net.add_arc(0, 2, 0, Capacity::Finite(2)).unwrap();
        net.add_arc(1, 2, 0, Capacity::Finite(1)).unwrap();
        net.add_arc(1, 3, 0, Capacity::Finite(2)).unwrap();
        net.add_arc(2, 3, 0, Capacity::Finite(3)).unwrap();
        assert_eq!(net.max_flow_value(0, 3).unwrap(), 5);
    }
}
