//! Simple-n-ods: trees that are a union of arcs joined at one end point.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::graph::{Graph, VertexId, Walk};

/// A graph with a designated branch vertex and its arm decomposition.
///
/// Arms are walks from the branch to a leaf. For three or more arms the
/// branch is the unique vertex of degree at least three; for arcs it is
/// carried explicitly.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimpleNOd {
    graph: Arc<Graph>,
    branch: usize,
    arms: Vec<Vec<usize>>,
}

impl SimpleNOd {
    /// Builds an od from explicit arms, checking every invariant.
    pub fn from_arms(graph: Arc<Graph>, branch: &VertexId, arms: &[Walk]) -> Result<Self> {
        let b = graph.idx(branch)?;
        let mut idx_arms = Vec::with_capacity(arms.len());
        for arm in arms {
            arm.check(&graph)?;
            idx_arms.push(arm.vertices().iter().map(|v| graph.idx(v)).collect::<Result<Vec<_>>>()?);
        }
        let od = SimpleNOd { graph, branch: b, arms: idx_arms };
        od.check()?;
        Ok(od)
    }

    fn check(&self) -> Result<()> {
        let g = &self.graph;
        if self.arms.is_empty() {
            return Err(Error::NotSimpleNOd("no arms".into()));
        }
        let mut seen = vec![false; g.vertex_count()];
        seen[self.branch] = true;
        let mut edges = 0;
        for arm in &self.arms {
            if arm.len() < 2 || arm[0] != self.branch {
                return Err(Error::NotSimpleNOd("arm must start at the branch and have an edge".into()));
            }
            for &v in &arm[1..] {
                if seen[v] {
                    return Err(Error::NotSimpleNOd(format!("{} lies on two arms or repeats", g.name(v))));
                }
                seen[v] = true;
            }
            if g.degree(*arm.last().unwrap()) != 1 {
                return Err(Error::NotSimpleNOd("arm does not end at a leaf".into()));
            }
            edges += arm.len() - 1;
        }
        if edges != g.edge_count() || !seen.iter().all(|&s| s) {
            return Err(Error::NotSimpleNOd("arms do not cover the graph".into()));
        }
        if self.arms.len() >= 3 {
            let high: Vec<usize> = (0..g.vertex_count()).filter(|&v| g.degree(v) >= 3).collect();
            if high != [self.branch] {
                return Err(Error::NotSimpleNOd("branch is not the unique vertex of degree >= 3".into()));
            }
        }
        Ok(())
    }

    pub fn graph(&self) -> &Arc<Graph> {
        &self.graph
    }

    pub fn branch(&self) -> usize {
        self.branch
    }

    pub fn branch_name(&self) -> &VertexId {
        self.graph.name(self.branch)
    }

    pub fn arm_count(&self) -> usize {
        self.arms.len()
    }

    pub fn arm_indices(&self) -> &[Vec<usize>] {
        &self.arms
    }

    pub fn arms(&self) -> Vec<Walk> {
        self.arms.iter().map(|a| Walk(a.iter().map(|&v| self.graph.name(v).clone()).collect())).collect()
    }

    pub fn arm(&self, i: usize) -> Walk {
        Walk(self.arms[i].iter().map(|&v| self.graph.name(v).clone()).collect())
    }
}

/// Recovers the arm decomposition of `g`.
///
/// Arms are ordered by the canonical order of their first non-branch vertex.
/// For arcs, `branch_hint` (or else the least end point) is the branch.
pub fn recognize_simple_n_od(g: &Arc<Graph>, branch_hint: Option<&VertexId>) -> Result<SimpleNOd> {
    if !g.is_tree() {
        return Err(Error::NotSimpleNOd("graph has a cycle".into()));
    }
    if g.edge_count() == 0 {
        return Err(Error::NotSimpleNOd("single vertex has no arms".into()));
    }
    let high: Vec<usize> = (0..g.vertex_count()).filter(|&v| g.degree(v) >= 3).collect();
    let branch = match high.as_slice() {
        [] => match branch_hint {
            Some(h) => g.idx(h)?,
            None => (0..g.vertex_count()).find(|&v| g.degree(v) == 1).expect("a path has end points"),
        },
        [b] => {
            if let Some(h) = branch_hint {
                if g.idx(h)? != *b {
                    return Err(Error::NotSimpleNOd(format!("hint {h} is not the branch vertex")));
                }
            }
            *b
        }
        _ => return Err(Error::NotSimpleNOd(format!("{} vertices of degree >= 3", high.len()))),
    };
    let arms = g
        .neighbors(branch)
        .iter()
        .map(|&first| {
            let mut arm = vec![branch, first];
            while g.degree(*arm.last().unwrap()) == 2 {
                let (prev, cur) = (arm[arm.len() - 2], arm[arm.len() - 1]);
                let next = *g.neighbors(cur).iter().find(|&&y| y != prev).unwrap();
                arm.push(next);
            }
            arm
        })
        .collect();
    Ok(SimpleNOd { graph: g.clone(), branch, arms })
}
