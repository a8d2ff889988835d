//! Sheaves given extensionally: finite poset, finite stalks, tabulated maps.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use super::SheafError;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GenericSheafSpec {
    pub id: String,
    nodes: Vec<String>,
    /// Reflexive-transitive closure of the declared order.
    leq: Vec<Vec<bool>>,
    stalks: Vec<Vec<String>>,
    maps: BTreeMap<(usize, usize), BTreeMap<String, String>>,
}

/// A triple `lower ≤ middle ≤ upper` on which composition fails for `element`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub lower: String,
    pub middle: String,
    pub upper: String,
    pub element: String,
    pub direct: String,
    pub composed: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AxiomReport {
    pub violations: Vec<Violation>,
}

impl AxiomReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn first(&self) -> Option<&Violation> {
        self.violations.first()
    }
}

/// One stalk element per node of the domain, in node declaration order.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct GenericSection {
    pub assignment: Vec<(String, String)>,
}

impl GenericSheafSpec {
    /// `order` holds `(a, b)` pairs meaning `a ≤ b`; `maps` are keyed by node pair.
    pub fn new(
        id: impl Into<String>,
        nodes: Vec<String>,
        order: &[(String, String)],
        stalks: BTreeMap<String, Vec<String>>,
        maps: BTreeMap<(String, String), BTreeMap<String, String>>,
    ) -> Result<GenericSheafSpec, SheafError> {
        let id = id.into();
        if nodes.is_empty() {
            return Err(SheafError::EmptySpec(id));
        }
        for (i, n) in nodes.iter().enumerate() {
            if nodes[..i].contains(n) {
                return Err(SheafError::DuplicateNode { spec: id, node: n.clone() });
            }
        }
        let index = |name: &str| {
            nodes.iter().position(|n| n == name).ok_or_else(|| SheafError::UnknownNode(name.to_string()))
        };
        let n = nodes.len();
        let mut leq = vec![vec![false; n]; n];
        for (i, row) in leq.iter_mut().enumerate() {
            row[i] = true;
        }
        for (a, b) in order {
            leq[index(a)?][index(b)?] = true;
        }
        for k in 0..n {
            for i in 0..n {
                if leq[i][k] {
                    let row = leq[k].clone();
                    for (cell, reach) in leq[i].iter_mut().zip(row) {
                        *cell |= reach;
                    }
                }
            }
        }
        for i in 0..n {
            for j in (i + 1)..n {
                if leq[i][j] && leq[j][i] {
                    return Err(SheafError::CyclicOrder { spec: id, a: nodes[i].clone(), b: nodes[j].clone() });
                }
            }
        }
        let mut stalk_vec = vec![Vec::new(); n];
        for (name, elems) in stalks {
            stalk_vec[index(&name)?] = elems;
        }
        let mut map_idx = BTreeMap::new();
        for ((a, b), table) in maps {
            map_idx.insert((index(&a)?, index(&b)?), table);
        }
        Ok(GenericSheafSpec { id, nodes, leq, stalks: stalk_vec, maps: map_idx })
    }

    pub fn nodes(&self) -> &[String] {
        &self.nodes
    }

    pub fn node_index(&self, name: &str) -> Option<usize> {
        self.nodes.iter().position(|n| n == name)
    }

    pub fn stalk(&self, node: usize) -> &[String] {
        &self.stalks[node]
    }

    pub fn leq(&self, a: usize, b: usize) -> bool {
        self.leq[a][b]
    }

    /// Strictly comparable pairs `a < b`.
    pub fn order_pairs(&self) -> Vec<(usize, usize)> {
        let n = self.nodes.len();
        let mut out = Vec::new();
        for a in 0..n {
            for b in 0..n {
                if a != b && self.leq[a][b] {
                    out.push((a, b));
                }
            }
        }
        out
    }

    /// `R(from ≤ to)` applied to `element`; identity on `from == to`.
    pub fn restrict(&self, from: usize, to: usize, element: &str) -> Result<String, SheafError> {
        if from == to {
            return Ok(element.to_string());
        }
        let table = self.maps.get(&(from, to)).ok_or_else(|| SheafError::MissingMap {
            spec: self.id.clone(),
            from: self.nodes[from].clone(),
            to: self.nodes[to].clone(),
        })?;
        let image = table.get(element).ok_or_else(|| SheafError::MapDomain {
            spec: self.id.clone(),
            from: self.nodes[from].clone(),
            to: self.nodes[to].clone(),
            element: element.to_string(),
        })?;
        if !self.stalks[to].contains(image) {
            return Err(SheafError::MapCodomain {
                spec: self.id.clone(),
                from: self.nodes[from].clone(),
                to: self.nodes[to].clone(),
                element: image.clone(),
            });
        }
        Ok(image.clone())
    }

    /// Checks that every strictly comparable pair has a map defined on the
    /// whole source stalk and landing in the target stalk.
    pub fn check_maps(&self) -> Result<(), SheafError> {
        for (a, b) in self.order_pairs() {
            for e in &self.stalks[a] {
                self.restrict(a, b, e)?;
            }
        }
        Ok(())
    }
}

/// Composition law on every triple `x < y < z`, reporting all violations in
/// lexicographic triple order.
pub fn verify_axioms(spec: &GenericSheafSpec) -> Result<AxiomReport, SheafError> {
    spec.check_maps()?;
    let n = spec.nodes.len();
    let mut violations = Vec::new();
    for x in 0..n {
        for y in 0..n {
            if x == y || !spec.leq(x, y) {
                continue;
            }
            for z in 0..n {
                if z == y || z == x || !spec.leq(y, z) {
                    continue;
                }
                for e in &spec.stalks[x] {
                    let direct = spec.restrict(x, z, e)?;
                    let composed = spec.restrict(y, z, &spec.restrict(x, y, e)?)?;
                    if direct != composed {
                        violations.push(Violation {
                            lower: spec.nodes[x].clone(),
                            middle: spec.nodes[y].clone(),
                            upper: spec.nodes[z].clone(),
                            element: e.clone(),
                            direct,
                            composed,
                        });
                        break;
                    }
                }
            }
        }
    }
    Ok(AxiomReport { violations })
}

/// All sections over `domain` (node indices), by backtracking in order of
/// increasing number of lower nodes. Compatibility is checked on every
/// comparable pair inside the domain.
pub fn enumerate_sections(spec: &GenericSheafSpec, domain: &[usize]) -> Result<Vec<GenericSection>, SheafError> {
    spec.check_maps()?;
    let mut order: Vec<usize> = domain.to_vec();
    order.sort();
    order.dedup();
    order.sort_by_key(|&x| (order_rank(spec, x), x));
    let mut chosen: Vec<(usize, String)> = Vec::with_capacity(order.len());
    let mut out = Vec::new();
    extend(spec, &order, &mut chosen, &mut out)?;
    out.sort();
    Ok(out)
}

fn order_rank(spec: &GenericSheafSpec, x: usize) -> usize {
    (0..spec.nodes.len()).filter(|&y| y != x && spec.leq(y, x)).count()
}

fn extend(
    spec: &GenericSheafSpec,
    order: &[usize],
    chosen: &mut Vec<(usize, String)>,
    out: &mut Vec<GenericSection>,
) -> Result<(), SheafError> {
    let Some(&node) = order.get(chosen.len()) else {
        let mut assignment: Vec<(usize, String)> = chosen.clone();
        assignment.sort_by_key(|(n, _)| *n);
        out.push(GenericSection {
            assignment: assignment.into_iter().map(|(n, e)| (spec.nodes[n].clone(), e)).collect(),
        });
        return Ok(());
    };
    'candidates: for e in &spec.stalks[node] {
        for (other, oe) in chosen.iter() {
            if spec.leq(*other, node) && spec.restrict(*other, node, oe)? != *e {
                continue 'candidates;
            }
            if spec.leq(node, *other) && spec.restrict(node, *other, e)? != *oe {
                continue 'candidates;
            }
        }
        chosen.push((node, e.clone()));
        extend(spec, order, chosen, out)?;
        chosen.pop();
    }
    Ok(())
}
