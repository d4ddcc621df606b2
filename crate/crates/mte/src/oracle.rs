//! Independent exact solver for the variability linear programs.
//!
//! A 0/1-gain transportation objective over couplings of two marginals is a
//! pure routing question: how much mass can flow from supplies to demands
//! using only region cells. Scaling both marginals by their least common
//! denominator `D` turns the instance into a bipartite max-flow problem with
//! integer capacities; flow integrality makes the optimum an exact multiple
//! of `1/D`. The flow solver shares no logic with the greedy fill, so
//! agreement between the two is a genuine cross-check.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive};

use crate::core::{Marginal, OutcomeSpace, Rational};
use crate::error::{Error, Result};
use crate::variability::VariabilityPair;

/// A transportation instance in scaled-integer form: supplies and demands
/// are the marginals times their least common denominator, and `gain`
/// marks the cells that count toward the objective.
#[derive(Debug, Clone)]
pub struct TransportInstance {
    pub k: usize,
    pub scale: BigInt,
    pub supplies: Vec<i128>,
    pub demands: Vec<i128>,
    pub gain: Vec<Vec<bool>>,
}

impl TransportInstance {
    pub fn new<F>(eta_a: &Marginal, eta_b: &Marginal, region: F) -> Result<Self>
    where
        F: Fn(usize, usize) -> bool,
    {
        if eta_a.k() != eta_b.k() {
            return Err(Error::DimensionMismatch {
                left: eta_a.k(),
                right: eta_b.k(),
            });
        }
        let k = eta_a.k();
        let mut scale = BigInt::one();
        for v in eta_a.probs().iter().chain(eta_b.probs()) {
            scale = scale.lcm(v.denom());
        }
        let to_units = |v: &Rational| -> Result<i128> {
            // v * scale is integral because scale is a common denominator.
            let units = v.numer() * (&scale / v.denom());
            units.to_i128().ok_or(Error::ScaleOverflow)
        };
        let supplies = eta_a.probs().iter().map(to_units).collect::<Result<_>>()?;
        let demands = eta_b.probs().iter().map(to_units).collect::<Result<_>>()?;
        let gain = (0..k)
            .map(|x| (0..k).map(|y| region(x, y)).collect())
            .collect();
        Ok(TransportInstance {
            k,
            scale,
            supplies,
            demands,
            gain,
        })
    }

    /// Maximum mass routable through gain cells, as an exact probability.
    pub fn max_region_mass(&self) -> Rational {
        let flow = self.max_flow_units();
        Rational::from_big(BigInt::from(flow), self.scale.clone())
    }

    /// Edmonds-Karp max flow from a source over rows and columns to a sink.
    /// Node layout: 0 = source, 1..=k rows, k+1..=2k columns, 2k+1 = sink.
    fn max_flow_units(&self) -> i128 {
        let k = self.k;
        let node_count = 2 * k + 2;
        let (source, sink) = (0, 2 * k + 1);
        let mut graph = FlowGraph::new(node_count);
        for x in 0..k {
            graph.add_edge(source, 1 + x, self.supplies[x]);
        }
        for y in 0..k {
            graph.add_edge(1 + k + y, sink, self.demands[y]);
        }
        for x in 0..k {
            for y in 0..k {
                if self.gain[x][y] {
                    let cap = self.supplies[x].min(self.demands[y]);
                    if cap > 0 {
                        graph.add_edge(1 + x, 1 + k + y, cap);
                    }
                }
            }
        }
        graph.max_flow(source, sink)
    }
}

struct Edge {
    to: usize,
    rev: usize,
    cap: i128,
}

struct FlowGraph {
    adj: Vec<Vec<Edge>>,
}

impl FlowGraph {
    fn new(n: usize) -> Self {
        FlowGraph {
            adj: (0..n).map(|_| Vec::new()).collect(),
        }
    }

    fn add_edge(&mut self, from: usize, to: usize, cap: i128) {
        let rev_from = self.adj[to].len();
        let rev_to = self.adj[from].len();
        self.adj[from].push(Edge {
            to,
            rev: rev_from,
            cap,
        });
        self.adj[to].push(Edge {
            to: from,
            rev: rev_to,
            cap: 0,
        });
    }

    fn max_flow(&mut self, source: usize, sink: usize) -> i128 {
        let mut total = 0i128;
        loop {
            // BFS for a shortest augmenting path.
            let mut prev: Vec<Option<(usize, usize)>> = vec![None; self.adj.len()];
            let mut queue = std::collections::VecDeque::from([source]);
            'bfs: while let Some(u) = queue.pop_front() {
                for (i, e) in self.adj[u].iter().enumerate() {
                    if e.cap > 0 && prev[e.to].is_none() && e.to != source {
                        prev[e.to] = Some((u, i));
                        if e.to == sink {
                            break 'bfs;
                        }
                        queue.push_back(e.to);
                    }
                }
            }
            if prev[sink].is_none() {
                return total;
            }
            // Bottleneck along the path.
            let mut bottleneck = i128::MAX;
            let mut v = sink;
            while v != source {
                let (u, i) = prev[v].expect("path reconstructed from BFS");
                bottleneck = bottleneck.min(self.adj[u][i].cap);
                v = u;
            }
            // Augment.
            let mut v = sink;
            while v != source {
                let (u, i) = prev[v].expect("path reconstructed from BFS");
                self.adj[u][i].cap -= bottleneck;
                let rev = self.adj[u][i].rev;
                self.adj[v][rev].cap += bottleneck;
                v = u;
            }
            total += bottleneck;
        }
    }
}

/// Exact maximum of the mass placed on `region` cells over all couplings of
/// the two marginals.
pub fn lp_max_region_mass<F>(region: F, eta_a: &Marginal, eta_b: &Marginal) -> Result<Rational>
where
    F: Fn(usize, usize) -> bool,
{
    Ok(TransportInstance::new(eta_a, eta_b, region)?.max_region_mass())
}

/// The variability pair computed purely by linear programming:
/// `nu_lower` maximizes mass strictly below `r`, and `nu_upper` is one minus
/// the maximum mass strictly above `r`.
pub fn oracle_variability(r: i64, eta_a: &Marginal, eta_b: &Marginal) -> Result<VariabilityPair> {
    if eta_a.k() != eta_b.k() {
        return Err(Error::DimensionMismatch {
            left: eta_a.k(),
            right: eta_b.k(),
        });
    }
    OutcomeSpace::new(eta_a.k())?.check_effect(r)?;
    let below = lp_max_region_mass(|x, y| (x as i64 - y as i64) < r, eta_a, eta_b)?;
    let above = lp_max_region_mass(|x, y| (x as i64 - y as i64) > r, eta_a, eta_b)?;
    Ok(VariabilityPair {
        r,
        nu_lower: below,
        nu_upper: &Rational::one() - &above,
    })
}
